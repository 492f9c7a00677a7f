//! Densities of cones at infinity in the polar picture
//! `g = dr² + h(r)² g_{S^{n-1}}`, where the cone over Γ is `[0, ∞) × Γ`.
//!
//! Two measures appear: the plain volume `h^(n−2) dr dv_Γ` and the
//! μ-measure weighted by the static potential `f = h'`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pos_pow, ArealProfile, SchwarzschildSpace};
use crate::link::MinimalLink;
use crate::quadrature::gauss_legendre_panels;

/// Relative slack for equality and threshold comparisons.
pub const EQUALITY_SLACK: f64 = 1e-8;

/// Area of the Clifford torus in S³.
pub const WILLMORE_THRESHOLD: f64 = 2.0 * PI * PI;

fn check_link(op: &'static str, space: &SchwarzschildSpace, link: &MinimalLink) -> Result<()> {
    if link.ambient_dimension != space.dimension {
        return Err(Error::domain(
            op,
            format!(
                "link '{}' lives in dimension {}, space has dimension {}",
                link.label, link.ambient_dimension, space.dimension
            ),
        ));
    }
    Ok(())
}

fn check_rho(op: &'static str, profile: &ArealProfile, rho: f64) -> Result<()> {
    if !(rho >= 0.0 && rho <= profile.r_max() * (1.0 + 1e-14)) {
        return Err(Error::domain(
            op,
            format!("ρ = {rho} outside profile range [0, {}]", profile.r_max()),
        ));
    }
    Ok(())
}

/// `∫_0^ρ g(h, h') dr` with five-point panels on the profile nodes.
fn integrate_profile(profile: &ArealProfile, rho: f64, g: impl Fn(f64, f64) -> f64) -> f64 {
    let rho = rho.min(profile.r_max());
    if rho <= 0.0 {
        return 0.0;
    }
    // the horizon panel carries the series part, so it is split further
    let first = profile.grid[1].min(rho);
    let mut breaks: Vec<f64> = (0..8).map(|i| first * i as f64 / 8.0).collect();
    breaks.extend(profile.grid.iter().copied().skip(1).take_while(|&r| r < rho));
    breaks.push(rho);
    gauss_legendre_panels(
        |r| {
            let (h, p) = profile.eval_unchecked(r);
            g(h, p)
        },
        &breaks,
    )
}

/// μ(Σ_Γ ∩ B_ρ) = |Γ| ∫_0^ρ h' h^(n−2) dr, by quadrature.
pub fn mu_volume(profile: &ArealProfile, link: &MinimalLink, rho: f64) -> Result<f64> {
    check_link("mu_volume", &profile.space, link)?;
    check_rho("mu_volume", profile, rho)?;
    let e = profile.space.nf() - 2.0;
    Ok(link.volume * integrate_profile(profile, rho, |h, p| p * pos_pow(h, e)))
}

/// Antiderivative form `|Γ| (h(ρ)^(n−1) − s0^(n−1)) / (n−1)`.
pub fn mu_volume_closed(profile: &ArealProfile, link: &MinimalLink, rho: f64) -> Result<f64> {
    check_link("mu_volume_closed", &profile.space, link)?;
    check_rho("mu_volume_closed", profile, rho)?;
    let space = &profile.space;
    let k = space.nf() - 1.0;
    let s0 = space.areal_horizon_radius;
    let excess = (profile.excess(rho)? / s0).max(0.0);
    // h^k − s0^k without cancellation next to the horizon
    Ok(link.volume * pos_pow(s0, k) * (k * excess.ln_1p()).exp_m1() / k)
}

/// Schwarzschild volume of `Σ_Γ ∩ B_ρ`, `|Γ| ∫_0^ρ h^(n−2) dr`.
pub fn cone_volume(profile: &ArealProfile, link: &MinimalLink, rho: f64) -> Result<f64> {
    check_link("cone_volume", &profile.space, link)?;
    check_rho("cone_volume", profile, rho)?;
    let e = profile.space.nf() - 2.0;
    Ok(link.volume * integrate_profile(profile, rho, |h, _| pos_pow(h, e)))
}

/// `(n−1) vol(Σ_Γ ∩ B_ρ) / (|Γ| h(ρ)^(n−1))`, which tends to 1 as ρ → ∞.
pub fn bridging_ratio(profile: &ArealProfile, link: &MinimalLink, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::domain("bridging_ratio", format!("need ρ > 0, got {rho}")));
    }
    let k = profile.space.nf() - 1.0;
    let vol = cone_volume(profile, link, rho)?;
    Ok(k * vol / (link.volume * pos_pow(profile.h(rho)?, k)))
}

/// μ(Σ_Γ ∩ B_ρ) / h(ρ)^(n−1); nondecreasing in ρ.
pub fn mu_ratio(profile: &ArealProfile, link: &MinimalLink, rho: f64) -> Result<f64> {
    let mu = mu_volume(profile, link, rho)?;
    Ok(mu / pos_pow(profile.h(rho)?, profile.space.nf() - 1.0))
}

/// area(∂Σ) for the cone over Γ: `2m |Γ|`.
pub fn boundary_area(space: &SchwarzschildSpace, link: &MinimalLink) -> f64 {
    2.0 * space.mass * link.volume
}

/// The same area measured in the metric on the horizon, `s0^(n−2) |Γ|`.
pub fn boundary_area_from_metric(space: &SchwarzschildSpace, link: &MinimalLink) -> f64 {
    pos_pow(space.areal_horizon_radius, space.d()) * link.volume
}

/// |R0⁻¹ ∂Σ|: the horizon boundary of a cone rescaled to the unit sphere is Γ.
pub fn rescaled_boundary_volume(link: &MinimalLink) -> f64 {
    link.volume
}

/// Both sides of the monotonicity identity for the cone over Γ between the
/// balls `B_σ` and `B_ρ`; the perpendicular term vanishes on cones.
pub fn monotonicity_sides(
    profile: &ArealProfile,
    link: &MinimalLink,
    sigma: f64,
    rho: f64,
) -> Result<(f64, f64)> {
    if !(sigma >= 0.0 && sigma <= rho) {
        return Err(Error::domain(
            "monotonicity_residual",
            format!("need 0 ≤ σ ≤ ρ, got σ={sigma}, ρ={rho}"),
        ));
    }
    let space = &profile.space;
    let k = space.nf() - 1.0;
    let inv = |r: f64| -> Result<f64> { Ok(pos_pow(profile.h(r)?, -k)) };
    let (inv_s, inv_r) = (inv(sigma)?, inv(rho)?);
    let lhs = mu_volume(profile, link, rho)? * inv_r;
    let rhs = mu_volume(profile, link, sigma)? * inv_s
        + space.areal_horizon_radius / k * (inv_s - inv_r) * boundary_area(space, link);
    Ok((lhs, rhs))
}

/// `|LHS − RHS|` of the monotonicity identity relative to `|Γ|/(n−1)`, the
/// limit of the left side.
pub fn monotonicity_residual(profile: &ArealProfile, link: &MinimalLink, sigma: f64, rho: f64) -> Result<f64> {
    let (lhs, rhs) = monotonicity_sides(profile, link, sigma, rho)?;
    let scale = link.volume / (profile.space.nf() - 1.0);
    Ok((lhs - rhs).abs() / scale)
}

/// Density ratios along a ladder and their extrapolated limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub rho_ladder: Vec<f64>,
    pub rungs: Vec<f64>,
    pub extrapolated: f64,
}

/// Γ-density of the cone over `subject` relative to the cone over `reference`.
pub fn theta(
    profile: &ArealProfile,
    subject: &MinimalLink,
    reference: &MinimalLink,
    rho_ladder: &[f64],
) -> Result<ThetaEstimate> {
    if rho_ladder.is_empty() {
        return Err(Error::domain("theta", "empty ρ ladder"));
    }
    if rho_ladder.windows(2).any(|w| w[1] <= w[0]) || !(rho_ladder[0] > 0.0) {
        return Err(Error::domain("theta", "ρ ladder must be positive and increasing"));
    }
    let rungs = rho_ladder
        .iter()
        .map(|&rho| Ok(cone_volume(profile, subject, rho)? / cone_volume(profile, reference, rho)?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ThetaEstimate {
        rho_ladder: rho_ladder.to_vec(),
        extrapolated: extrapolate_tail(&rungs),
        rungs,
    })
}

/// Aitken's Δ² on the last three rungs, skipped when the differences are at
/// rounding level or do not contract.
fn extrapolate_tail(rungs: &[f64]) -> f64 {
    let last = *rungs.last().expect("non-empty");
    if rungs.len() < 3 {
        return last;
    }
    let [a, b, c] = [rungs[rungs.len() - 3], rungs[rungs.len() - 2], last];
    let (d1, d2) = (b - a, c - b);
    let floor = 1e-13 * c.abs().max(1.0);
    if d1.abs() <= floor || d2.abs() <= floor || d2.abs() >= d1.abs() {
        return last;
    }
    c - d2 * d2 / (d2 - d1)
}

/// Density of a cone subject read off from the boundary area, with zero
/// perpendicular term.
pub fn theta_closed(space: &SchwarzschildSpace, subject: &MinimalLink, reference: &MinimalLink) -> f64 {
    boundary_area(space, subject) / (2.0 * space.mass * reference.volume)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RigidityClass {
    EqualityCone,
    StrictInequality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WillmoreFlag {
    BelowThreshold,
    AboveThreshold,
    NotApplicable,
}

/// ε(n) in the small-density regularity statement is not explicit, so no
/// verdict is ever possible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AllardFlag {
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rigidity {
    pub rigidity_class: RigidityClass,
    pub willmore_flag: WillmoreFlag,
    /// `|Γ|θ` sits on 2π² within the slack; reported as above threshold.
    pub willmore_boundary_case: bool,
    /// Equality below threshold in dimension 4: the horizon boundary is a
    /// great sphere or a Clifford torus.
    pub great_sphere_or_clifford: bool,
    pub allard_flag: AllardFlag,
    /// `2m |Γ| θ − area(∂Σ)`.
    pub equality_gap: f64,
}

pub fn rigidity_classify(
    space: &SchwarzschildSpace,
    subject: &MinimalLink,
    theta: f64,
    reference: &MinimalLink,
) -> Result<Rigidity> {
    if !theta.is_finite() {
        return Err(Error::domain("rigidity_classify", format!("θ = {theta} is not finite")));
    }
    let area = boundary_area(space, subject);
    let weighted = 2.0 * space.mass * reference.volume * theta;
    let gap = weighted - area;
    let rigidity_class = if gap.abs() <= EQUALITY_SLACK * area.abs().max(1.0) {
        RigidityClass::EqualityCone
    } else {
        RigidityClass::StrictInequality
    };
    let (willmore_flag, boundary) = if space.dimension == 4 {
        let w = reference.volume * theta;
        let slack = EQUALITY_SLACK * WILLMORE_THRESHOLD;
        if (w - WILLMORE_THRESHOLD).abs() <= slack {
            (WillmoreFlag::AboveThreshold, true)
        } else if w < WILLMORE_THRESHOLD {
            (WillmoreFlag::BelowThreshold, false)
        } else {
            (WillmoreFlag::AboveThreshold, false)
        }
    } else {
        (WillmoreFlag::NotApplicable, false)
    };
    Ok(Rigidity {
        rigidity_class,
        willmore_flag,
        willmore_boundary_case: boundary,
        great_sphere_or_clifford: rigidity_class == RigidityClass::EqualityCone
            && willmore_flag == WillmoreFlag::BelowThreshold,
        allard_flag: AllardFlag::Indeterminate,
        equality_gap: gap,
    })
}

/// Geometric ρ ladder `r_max · 2^(−k)`, `k = rungs−1, …, 0`.
pub fn default_rho_ladder(profile: &ArealProfile, rungs: usize) -> Vec<f64> {
    let top = profile.r_max();
    (0..rungs.max(1)).rev().map(|k| top * 0.5f64.powi(k as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub space: SchwarzschildSpace,
    pub subject_link: String,
    pub reference_link: String,
    pub subject_volume: f64,
    pub reference_volume: f64,
    pub rho_ladder: Vec<f64>,
    pub theta_rungs: Vec<f64>,
    pub theta_numeric: f64,
    pub theta_closed: f64,
    pub boundary_area: f64,
    pub boundary_area_from_metric: f64,
    /// |R0⁻¹∂Σ|.
    pub rescaled_boundary_volume: f64,
    /// Largest residual over consecutive ladder pairs, starting from σ = 0.
    pub monotonicity_residual: f64,
    /// Largest `|μ_quadrature/μ_closed − 1|` over the ladder.
    pub mu_closed_form_error: f64,
    /// Bridging ratio at the top rung.
    pub bridging_ratio: f64,
    pub equality_gap: f64,
    pub rigidity_class: RigidityClass,
    pub willmore_flag: WillmoreFlag,
    pub willmore_boundary_case: bool,
    pub great_sphere_or_clifford: bool,
    pub allard_flag: AllardFlag,
}

impl DensityReport {
    pub const CSV_HEADER: &'static str = "n,m,subject,reference,theta_numeric,theta_closed,boundary_area,equality_gap,monotonicity_residual,rigidity,willmore,boundary_case,allard";

    /// Cells in [`Self::CSV_HEADER`] order.
    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.space.dimension.to_string(),
            self.space.mass.to_string(),
            self.subject_link.clone(),
            self.reference_link.clone(),
            format!("{:.12e}", self.theta_numeric),
            format!("{:.12e}", self.theta_closed),
            format!("{:.12e}", self.boundary_area),
            format!("{:.3e}", self.equality_gap),
            format!("{:.3e}", self.monotonicity_residual),
            format!("{:?}", self.rigidity_class),
            format!("{:?}", self.willmore_flag),
            self.willmore_boundary_case.to_string(),
            format!("{:?}", self.allard_flag),
        ]
    }

    pub fn csv_row(&self) -> String {
        self.csv_fields().join(",")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("density report serializes")
    }

    /// Cone equality `|Γ_ref| θ = |R0⁻¹∂Σ|` within `tol` (relative).
    pub fn cone_equality_error(&self) -> f64 {
        (self.reference_volume * self.theta_numeric - self.rescaled_boundary_volume).abs()
            / self.rescaled_boundary_volume
    }
}

/// Full density report for a cone subject on the given ρ ladder.
pub fn density_report(
    profile: &ArealProfile,
    subject: &MinimalLink,
    reference: &MinimalLink,
    rho_ladder: &[f64],
) -> Result<DensityReport> {
    let space = profile.space;
    check_link("density_report", &space, subject)?;
    check_link("density_report", &space, reference)?;
    let estimate = theta(profile, subject, reference, rho_ladder)?;
    let rigidity = rigidity_classify(&space, subject, estimate.extrapolated, reference)?;

    let mut residual = 0.0f64;
    let mut mu_error = 0.0f64;
    let mut sigma = 0.0;
    for &rho in rho_ladder {
        residual = residual.max(monotonicity_residual(profile, subject, sigma, rho)?);
        let quad = mu_volume(profile, subject, rho)?;
        let closed = mu_volume_closed(profile, subject, rho)?;
        mu_error = mu_error.max((quad / closed - 1.0).abs());
        sigma = rho;
    }
    let top = *rho_ladder.last().expect("non-empty ladder");

    Ok(DensityReport {
        space,
        subject_link: subject.label.clone(),
        reference_link: reference.label.clone(),
        subject_volume: subject.volume,
        reference_volume: reference.volume,
        rho_ladder: estimate.rho_ladder,
        theta_rungs: estimate.rungs,
        theta_numeric: estimate.extrapolated,
        theta_closed: theta_closed(&space, subject, reference),
        boundary_area: boundary_area(&space, subject),
        boundary_area_from_metric: boundary_area_from_metric(&space, subject),
        rescaled_boundary_volume: rescaled_boundary_volume(subject),
        monotonicity_residual: residual,
        mu_closed_form_error: mu_error,
        bridging_ratio: bridging_ratio(profile, subject, top)?,
        equality_gap: rigidity.equality_gap,
        rigidity_class: rigidity.rigidity_class,
        willmore_flag: rigidity.willmore_flag,
        willmore_boundary_case: rigidity.willmore_boundary_case,
        great_sphere_or_clifford: rigidity.great_sphere_or_clifford,
        allard_flag: rigidity.allard_flag,
    })
}
