//! Identity suite run by `verify`: every closed-form relation the library
//! relies on, evaluated for one space.

use std::f64::consts::PI;

use cone_index::density;
use cone_index::index::{conformal_residual, q_schwarzschild, q_schwarzschild_direct, SeparatedTestFunction};
use cone_index::radial::{apply_mode_operator, closed_form_v_derivatives, fc_candidate, ivp_mode, supersolution};
use cone_index::{MinimalLink, SchwarzschildSpace};
use serde::Serialize;

use crate::error::RunError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            passed: value.is_finite() && value <= tolerance,
        }
    }
}

fn core<T>(what: &str, r: cone_index::Result<T>) -> Result<T, RunError> {
    r.map_err(|e| RunError::from_core(format!("verify {what}"), e))
}

fn log_points(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(move |i| {
        let t = i as f64 / (count - 1) as f64;
        if i + 1 == count {
            hi
        } else {
            (a + t * (b - a)).exp()
        }
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Largest `|v'' + V v| / (|v''| + |V v|)` over log-spaced radii in `[R0, 10³R0]`.
pub fn kernel_residual(space: &SchwarzschildSpace, points: usize) -> Result<f64, RunError> {
    let r0 = space.horizon_radius;
    let mut worst = 0.0f64;
    for r in log_points(r0, 1e3 * r0, points) {
        let (v, _, v2) = core("kernel", closed_form_v_derivatives(space, r))?;
        let pot = core("kernel", space.radial_potential(r))?;
        let scale = v2.abs() + (pot * v).abs();
        worst = worst.max((v2 + pot * v).abs() / scale);
    }
    Ok(worst)
}

/// Largest relative residual of `g_j`, j ≤ `j_max`, and the largest
/// deviation of β_j from `((n−3)/2)² + (jπ/ln(R/R0))²`.
pub fn ivp_residuals(space: &SchwarzschildSpace, outer_radius: f64, j_max: u32) -> Result<(f64, f64), RunError> {
    let r0 = space.horizon_radius;
    let c = ((space.dimension as f64) - 3.0) / 2.0;
    let log_len = (outer_radius / r0).ln();
    let (mut residual, mut beta_err) = (0.0f64, 0.0f64);
    for j in 1..=j_max {
        let g = core("ivp", ivp_mode(space, outer_radius, j))?;
        let expected = c * c + (j as f64 * PI / log_len).powi(2);
        beta_err = beta_err.max(rel(g.beta, expected));
        for r in log_points(r0, outer_radius, 400) {
            let (v, v1, v2) = g.derivatives(r);
            let scale = (r * r * v2).abs() + ((space.dimension as f64) - 2.0) * (r * v1).abs() + (g.beta * v).abs();
            if scale > 0.0 {
                residual = residual.max(g.residual(r).abs() / scale);
            }
        }
    }
    Ok((residual, beta_err))
}

/// Deterministic VanishBoth test functions used by the two-route checks.
pub fn sample_profiles() -> Vec<SeparatedTestFunction> {
    vec![
        SeparatedTestFunction::sine_series(0, vec![1.0]),
        SeparatedTestFunction::sine_series(0, vec![1.0, 0.5, -0.25]),
        SeparatedTestFunction::sine_series(1, vec![0.3, -1.0, 0.2, 0.1]),
        SeparatedTestFunction::ivp(0, 2),
    ]
}

pub fn identity_suite(space: &SchwarzschildSpace, profile_tolerance: f64) -> Result<Vec<Check>, RunError> {
    let n = space.dimension;
    let r0 = space.horizon_radius;
    let mut out = Vec::new();

    out.push(Check::new("kernel_identity", kernel_residual(space, 1000)?, 1e-10));

    let (psi, dpsi) = core("fc_candidate", fc_candidate(space, r0))?;
    out.push(Check::new("fc_candidate_neumann", (dpsi * r0 / psi).abs(), 1e-12));

    let equator = core("equator", MinimalLink::equator(n))?;
    let mut worst_super = 0.0f64;
    for r in log_points(r0, 1e3 * r0, 400) {
        let u = core("supersolution", supersolution(space, r))?;
        let lu = core("supersolution", apply_mode_operator(space, equator.first_eigenvalue(), r, u))?;
        let scale = u.2.abs() + (u.1 / r).abs() * n as f64 + (u.0 / (r * r)).abs() * n as f64;
        worst_super = worst_super.max(lu / scale);
    }
    out.push(Check::new("supersolution_sign", worst_super.max(0.0), 1e-12));

    for factor in [(2.0 * PI).exp(), 100.0, (4.0 * PI).exp()] {
        let (res, beta) = ivp_residuals(space, factor * r0, 5)?;
        out.push(Check::new(format!("ivp_residual@{factor:.6e}"), res, 1e-9));
        out.push(Check::new(format!("ivp_beta@{factor:.6e}"), beta, 1e-12));
    }

    let mut links = vec![equator.clone()];
    if n >= 4 {
        links.push(core("clifford", MinimalLink::clifford(n, 1))?);
    }
    let big_r = 100.0 * r0;
    let (mut two_route, mut potential_route) = (0.0f64, 0.0f64);
    for link in &links {
        for psi in sample_profiles() {
            two_route = two_route.max(core("two_route", conformal_residual(space, link, &psi, big_r))?);
            let a = core("two_route", q_schwarzschild(space, link, &psi, big_r))?;
            let b = core("two_route", q_schwarzschild_direct(space, link, &psi, big_r))?;
            potential_route = potential_route.max((a - b).abs() / a.abs().max(b.abs()).max(1.0));
        }
    }
    out.push(Check::new("two_route_conformal", two_route, 1e-6));
    out.push(Check::new("two_route_potential", potential_route, 1e-6));

    let f0 = core("isotropic_factor", space.isotropic_factor(r0))?;
    out.push(Check::new("cross_picture_s0", rel(space.areal_horizon_radius, r0 * f0), 1e-12));
    out.push(Check::new(
        "horizon_area_mass",
        rel(space.areal_horizon_radius.powi(n as i32 - 2), 2.0 * space.mass),
        1e-12,
    ));

    let profile = core(
        "areal_profile",
        space.areal_profile(space.default_profile_extent(), profile_tolerance),
    )?;
    out.push(Check::new("areal_profile_residual", profile.max_node_residual(), profile_tolerance));

    let top = profile.r_max();
    let ladder = density::default_rho_ladder(&profile, 6);
    let mut mu_err = 0.0f64;
    let mut mono = 0.0f64;
    for link in &links {
        for &rho in &ladder {
            let q = core("mu_volume", density::mu_volume(&profile, link, rho))?;
            let c = core("mu_volume", density::mu_volume_closed(&profile, link, rho))?;
            mu_err = mu_err.max(rel(q, c));
        }
        for (s, r) in [(0.0, r0), (r0, 10.0 * r0), (10.0 * r0, top)] {
            mono = mono.max(core("monotonicity", density::monotonicity_residual(&profile, link, s, r))?);
        }
        out.push(Check::new(
            format!("boundary_area_routes:{}", link.label),
            rel(density::boundary_area(space, link), density::boundary_area_from_metric(space, link)),
            1e-12,
        ));
    }
    out.push(Check::new("mu_closed_form", mu_err, 1e-9));
    out.push(Check::new("monotonicity_identity", mono, 1e-8));

    if let Some(cl) = links.get(1) {
        let rep = core("density_report", density::density_report(&profile, cl, &equator, &ladder))?;
        out.push(Check::new("cone_equality", rep.cone_equality_error(), 1e-8));
        out.push(Check::new("density_two_route", rel(rep.theta_numeric, rep.theta_closed), 1e-6));
    }
    let bridging = core("bridging", density::bridging_ratio(&profile, &equator, top))?;
    out.push(Check::new("bridging_limit", (bridging - 1.0).abs(), 1e-3));

    Ok(out)
}
