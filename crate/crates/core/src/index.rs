//! Index forms of cones over minimal links and their aggregation into Morse
//! index counts.
//!
//! Test functions are separated, `ψ(p, r) = f_k(p) u(r)`, with `f_k` an
//! L²(Γ)-normalized eigenfunction of the link Jacobi operator. Every form below
//! is therefore per unit `∫_Γ f_k² = 1`; the volume of Γ never enters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pos_pow, SchwarzschildSpace};
use crate::link::{Level, LinkKind, MinimalLink};
use crate::quadrature::{adaptive_simpson, gauss_legendre_panels};
use crate::radial::{
    count_negative, ivp_mode, steklov_shot, InnerBc, ModeProblem, ModeSpectrumResult, OuterCondition, RadialGrid,
    SteklovOutcome,
};

/// Absolute tolerance of the form quadratures.
pub const FORM_TOLERANCE: f64 = 1e-10;
/// A witness value below this certifies a negative direction.
pub const WITNESS_THRESHOLD: f64 = -1e-6;
/// Default number of Γ-levels entering an index report.
pub const DEFAULT_K_MAX: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryClass {
    VanishBoth,
    VanishOuterOnly,
}

/// Radial factor `u(r)` of a separated test function on `[R0, R]`, written in
/// `t = ln(r/R0)` with `T = ln(R/R0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RadialProfile {
    /// The closed-form Dirichlet mode `g_j`.
    Ivp { j: u32 },
    /// `u = r^(−(n−3)/2) Σ a_j sin(jπt/T)`.
    SineSeries { coefficients: Vec<f64> },
    /// `u = r^(−(n−3)/2) Σ a_j cos((j − 1/2)πt/T)`; vanishes at R only.
    HalfCosineSeries { coefficients: Vec<f64> },
    /// Values of `u` at equally spaced `t` nodes spanning `[0, T]`, linear in between.
    Nodes { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatedTestFunction {
    pub link_level: usize,
    pub radial_profile: RadialProfile,
    pub boundary_class: BoundaryClass,
}

impl SeparatedTestFunction {
    pub fn ivp(link_level: usize, j: u32) -> Self {
        Self {
            link_level,
            radial_profile: RadialProfile::Ivp { j },
            boundary_class: BoundaryClass::VanishBoth,
        }
    }

    pub fn sine_series(link_level: usize, coefficients: Vec<f64>) -> Self {
        Self {
            link_level,
            radial_profile: RadialProfile::SineSeries { coefficients },
            boundary_class: BoundaryClass::VanishBoth,
        }
    }

    pub fn zero(link_level: usize) -> Self {
        Self::sine_series(link_level, Vec::new())
    }

    /// `(u, du/dr)` at `r` for the interval `[R0, R]`.
    pub fn eval(&self, space: &SchwarzschildSpace, outer_radius: f64, r: f64) -> Result<(f64, f64)> {
        let r0 = space.horizon_radius;
        let big_t = (outer_radius / r0).ln();
        let c = (space.nf() - 3.0) / 2.0;
        let t = (r / r0).ln().clamp(0.0, big_t);
        let from_y = |y: f64, yt: f64| {
            let w = pos_pow(r, -c);
            (w * y, w * (yt - c * y) / r)
        };
        Ok(match &self.radial_profile {
            RadialProfile::Ivp { j } => {
                let g = ivp_mode(space, outer_radius, *j)?;
                let (u, u1, _) = g.derivatives(r);
                (u, u1)
            }
            RadialProfile::SineSeries { coefficients } => {
                let (mut y, mut yt) = (0.0, 0.0);
                for (i, a) in coefficients.iter().enumerate() {
                    let w = (i + 1) as f64 * std::f64::consts::PI / big_t;
                    let (s, co) = (w * t).sin_cos();
                    y += a * s;
                    yt += a * w * co;
                }
                from_y(y, yt)
            }
            RadialProfile::HalfCosineSeries { coefficients } => {
                let (mut y, mut yt) = (0.0, 0.0);
                for (i, a) in coefficients.iter().enumerate() {
                    let w = (i as f64 + 0.5) * std::f64::consts::PI / big_t;
                    let (s, co) = (w * t).sin_cos();
                    y += a * co;
                    yt -= a * w * s;
                }
                from_y(y, yt)
            }
            RadialProfile::Nodes { values } => {
                if values.len() < 2 {
                    return Err(Error::domain("separated_test_function", "need at least two node values"));
                }
                let h = big_t / (values.len() - 1) as f64;
                let i = ((t / h).floor() as usize).min(values.len() - 2);
                let slope = (values[i + 1] - values[i]) / h;
                (values[i] + slope * (t - h * i as f64), slope / r)
            }
        })
    }

    fn check_boundary(&self, op: &'static str, space: &SchwarzschildSpace, outer_radius: f64) -> Result<()> {
        let inner = self.eval(space, outer_radius, space.horizon_radius)?.0;
        let outer = self.eval(space, outer_radius, outer_radius)?.0;
        let scale = self.sup_norm(space, outer_radius)?.max(1.0);
        let tol = 1e-14 * scale;
        if outer.abs() > tol {
            return Err(Error::domain(op, format!("profile does not vanish at R (value {outer:e})")));
        }
        let needs_inner = matches!(self.boundary_class, BoundaryClass::VanishBoth);
        if needs_inner && inner.abs() > tol {
            return Err(Error::domain(op, format!("profile does not vanish at R0 (value {inner:e})")));
        }
        Ok(())
    }

    fn sup_norm(&self, space: &SchwarzschildSpace, outer_radius: f64) -> Result<f64> {
        Ok(match &self.radial_profile {
            RadialProfile::Nodes { values } => values.iter().fold(0.0, |a, v| a.max(v.abs())),
            RadialProfile::SineSeries { coefficients } | RadialProfile::HalfCosineSeries { coefficients } => {
                coefficients.iter().map(|a| a.abs()).sum::<f64>()
                    * pos_pow(space.horizon_radius, -(space.nf() - 3.0) / 2.0)
            }
            RadialProfile::Ivp { j } => ivp_mode(space, outer_radius, *j)?.normalization,
        })
    }

    fn require_vanish_both(&self, op: &'static str, space: &SchwarzschildSpace, outer_radius: f64) -> Result<()> {
        if self.boundary_class != BoundaryClass::VanishBoth {
            return Err(Error::domain(op, "form requires a VanishBoth test function"));
        }
        if let RadialProfile::HalfCosineSeries { .. } = self.radial_profile {
            return Err(Error::domain(op, "half-cosine profiles do not vanish at R0"));
        }
        self.check_boundary(op, space, outer_radius)
    }
}

/// Integrates `g(r) dr` over `[R0, R]` through `t = ln(r/R0)`.
fn integrate_radial<G: Fn(f64) -> f64>(
    op: &'static str,
    space: &SchwarzschildSpace,
    outer_radius: f64,
    psi: &SeparatedTestFunction,
    g: G,
) -> Result<f64> {
    let r0 = space.horizon_radius;
    let big_t = (outer_radius / r0).ln();
    let in_t = |t: f64| {
        let r = r0 * t.exp();
        g(r) * r
    };
    match &psi.radial_profile {
        RadialProfile::Nodes { values } => {
            // piecewise linear profile: exact panels between nodes
            let sub = 8 * (values.len() - 1);
            let breaks: Vec<f64> = (0..=sub).map(|i| big_t * i as f64 / sub as f64).collect();
            Ok(gauss_legendre_panels(in_t, &breaks))
        }
        _ => Ok(adaptive_simpson(in_t, 0.0, big_t, FORM_TOLERANCE, 64)
            .map_err(|e| Error::numeric(op, e.to_string()))?
            .value),
    }
}

fn level_eigenvalue(link: &MinimalLink, level: usize) -> Result<f64> {
    let spectrum = link.jacobi_spectrum(level + 1)?;
    Ok(spectrum.levels[level].eigenvalue)
}

fn check_radius(op: &'static str, space: &SchwarzschildSpace, outer_radius: f64) -> Result<()> {
    if !(outer_radius > space.horizon_radius && outer_radius.is_finite()) {
        return Err(Error::domain(op, format!("need R > R0, got {outer_radius}")));
    }
    Ok(())
}

/// Euclidean index form `∫ |∇ψ|² − |A|²ψ²` of the cone over `[R0, R]`.
///
/// On the closed-form modes this is `λ_k + β_j`; otherwise it is integrated.
pub fn q_delta(
    space: &SchwarzschildSpace,
    link: &MinimalLink,
    psi: &SeparatedTestFunction,
    outer_radius: f64,
) -> Result<f64> {
    check_radius("q_delta", space, outer_radius)?;
    psi.require_vanish_both("q_delta", space, outer_radius)?;
    let lambda = level_eigenvalue(link, psi.link_level)?;
    if let RadialProfile::Ivp { j } = psi.radial_profile {
        return Ok(lambda + ivp_mode(space, outer_radius, j)?.beta);
    }
    let area = space.nf() - 2.0;
    integrate_radial("q_delta", space, outer_radius, psi, |r| {
        let (u, u1) = psi.eval(space, outer_radius, r).unwrap_or((0.0, 0.0));
        (u1 * u1 + lambda * u * u / (r * r)) * pos_pow(r, area)
    })
}

/// `∫ V u² r^(n−2) dr`, the amount by which the Schwarzschild form falls
/// below the Euclidean one.
pub fn potential_correction(
    space: &SchwarzschildSpace,
    psi: &SeparatedTestFunction,
    outer_radius: f64,
) -> Result<f64> {
    let area = space.nf() - 2.0;
    integrate_radial("q_schwarzschild", space, outer_radius, psi, |r| {
        let (u, _) = psi.eval(space, outer_radius, r).unwrap_or((0.0, 0.0));
        space.radial_potential(r).unwrap_or(0.0) * u * u * pos_pow(r, area)
    })
}

/// Schwarzschild index form on `F⁻¹ψ`, through the Euclidean form and the
/// potential `V`.
pub fn q_schwarzschild(
    space: &SchwarzschildSpace,
    link: &MinimalLink,
    psi: &SeparatedTestFunction,
    outer_radius: f64,
) -> Result<f64> {
    let base = q_delta(space, link, psi, outer_radius)?;
    Ok(base - potential_correction(space, psi, outer_radius)?)
}

/// Schwarzschild index form on `W = F⁻¹ψ` assembled directly in `g_Sch`:
/// gradient, ambient Ricci curvature of the conformal metric and `|A|²`.
pub fn q_schwarzschild_direct(
    space: &SchwarzschildSpace,
    link: &MinimalLink,
    psi: &SeparatedTestFunction,
    outer_radius: f64,
) -> Result<f64> {
    check_radius("q_schwarzschild_direct", space, outer_radius)?;
    psi.require_vanish_both("q_schwarzschild_direct", space, outer_radius)?;
    let lambda = level_eigenvalue(link, psi.link_level)?;
    let shape = link.shape_norm_sq;
    let n = space.nf();
    let big_n = space.cone_dimension as f64;
    integrate_radial("q_schwarzschild_direct", space, outer_radius, psi, |r| {
        let (u, u1) = psi.eval(space, outer_radius, r).unwrap_or((0.0, 0.0));
        let big_f = space.cone_factor_unchecked(r);
        let big_f1 = space.cone_factor_derivative_unchecked(r);
        let w = u / big_f;
        let w1 = u1 / big_f - u * big_f1 / (big_f * big_f);
        let f = space.isotropic_factor_unchecked(r);
        let p1 = space.isotropic_log_derivative(r);
        let p2 = space.isotropic_log_second_derivative(r);
        // Ric(ξ, ξ) for a unit normal tangent to the coordinate spheres
        let ric = (-(n - 2.0) * p1 / r - p2 - (n - 1.0) * p1 / r - (n - 2.0) * p1 * p1) / (f * f);
        let a_sq = shape / (r * r * f * f);
        let grad = pos_pow(f, big_n - 2.0) * (w1 * w1 + (lambda + shape) * w * w / (r * r));
        let zeroth = pos_pow(f, big_n) * (ric + a_sq) * w * w;
        (grad - zeroth) * pos_pow(r, big_n - 1.0)
    })
}

/// Relative gap between the directly assembled Schwarzschild form on `F⁻¹ψ`
/// and the Euclidean form corrected by `(N/(N−2)) F⁻¹ Δ_δ F`.
pub fn conformal_residual(
    space: &SchwarzschildSpace,
    link: &MinimalLink,
    psi: &SeparatedTestFunction,
    outer_radius: f64,
) -> Result<f64> {
    let lhs = q_schwarzschild_direct(space, link, psi, outer_radius)?;
    let big_n = space.cone_dimension as f64;
    let correction = integrate_radial("conformal_residual", space, outer_radius, psi, |r| {
        let (u, _) = psi.eval(space, outer_radius, r).unwrap_or((0.0, 0.0));
        let lap = space.cone_factor_second_derivative_unchecked(r)
            + (big_n - 1.0) * space.cone_factor_derivative_unchecked(r) / r;
        big_n / (big_n - 2.0) * lap / space.cone_factor_unchecked(r) * u * u * pos_pow(r, big_n - 1.0)
    })?;
    let rhs = q_delta(space, link, psi, outer_radius)? - correction;
    Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0))
}

/// `a(R) = (n−2) ln(R/R0) / (2π)`.
pub fn log_gap_a(space: &SchwarzschildSpace, outer_radius: f64) -> Result<f64> {
    check_radius("log_gap_a", space, outer_radius)?;
    Ok(space.d() * (outer_radius / space.horizon_radius).ln() / (2.0 * std::f64::consts::PI))
}

fn sech_sq(x: f64) -> f64 {
    let c = x.abs().min(350.0).cosh();
    1.0 / (c * c)
}

/// `G_j(R) = ((n−2)j/(2a))² − ((n−1)j/(2π)) ∫_0^π sech²(a j s) sin²(s) ds`.
pub fn g_term(space: &SchwarzschildSpace, outer_radius: f64, j: u32) -> Result<f64> {
    if j == 0 {
        return Err(Error::domain("g_term", "j starts at 1"));
    }
    let a = log_gap_a(space, outer_radius)?;
    let jf = j as f64;
    let pi = std::f64::consts::PI;
    let integral = adaptive_simpson(|s| sech_sq(a * jf * s) * s.sin().powi(2), 0.0, pi, FORM_TOLERANCE, 16)
        .map_err(|e| Error::numeric("g_term", e.to_string()))?
        .value;
    Ok((space.d() * jf / (2.0 * a)).powi(2) - (space.nf() - 1.0) * jf / (2.0 * pi) * integral)
}

/// Exact Schwarzschild form on `F⁻¹(f₁ g_j)` minus `λ₁ + ((n−3)/2)²`:
/// `((n−2)j/(2a))² − ((n−1)/(2π)) ∫_0^π sech²(a s) sin²(j s) ds`.
pub fn g_term_exact(space: &SchwarzschildSpace, outer_radius: f64, j: u32) -> Result<f64> {
    if j == 0 {
        return Err(Error::domain("g_term_exact", "j starts at 1"));
    }
    let a = log_gap_a(space, outer_radius)?;
    let jf = j as f64;
    let pi = std::f64::consts::PI;
    let integral = adaptive_simpson(|s| sech_sq(a * s) * (jf * s).sin().powi(2), 0.0, pi, FORM_TOLERANCE, 16 * j as usize)
        .map_err(|e| Error::numeric("g_term_exact", e.to_string()))?
        .value;
    Ok((space.d() * jf / (2.0 * a)).powi(2) - (space.nf() - 1.0) / (2.0 * pi) * integral)
}

/// `λ₁(Γ) + ((n−3)/2)² + G_j(R)`; negative values certify a negative
/// direction of the Dirichlet problem.
pub fn witness_value(space: &SchwarzschildSpace, link: &MinimalLink, j: u32, outer_radius: f64) -> Result<f64> {
    let c = (space.nf() - 3.0) / 2.0;
    Ok(link.first_eigenvalue() + c * c + g_term(space, outer_radius, j)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DivergenceVerdict {
    Stable,
    FiniteAtThisR,
    DivergentTrend,
}

impl DivergenceVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            DivergenceVerdict::Stable => "Stable",
            DivergenceVerdict::FiniteAtThisR => "FiniteAtThisR",
            DivergenceVerdict::DivergentTrend => "DivergentTrend",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeCounts {
    pub negative: usize,
    pub nonpositive: usize,
    pub refined: bool,
}

impl ModeCounts {
    const ZERO: ModeCounts = ModeCounts {
        negative: 0,
        nonpositive: 0,
        refined: true,
    };

    fn from_result(res: &ModeSpectrumResult) -> Self {
        Self {
            negative: res.negative_count,
            nonpositive: res.nonpositive_count,
            refined: res.refined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub k: usize,
    pub eigenvalue: f64,
    pub multiplicity: u64,
    /// Dirichlet on both ends.
    pub dirichlet: ModeCounts,
    /// Neumann on the horizon, Dirichlet on S(R).
    pub free: ModeCounts,
    /// Neumann on the horizon, `∂ν w = κ(R) w` on S(R).
    pub robin: ModeCounts,
    pub steklov: SteklovOutcome,
    /// Steklov shooting reached full agreement between resolutions.
    pub steklov_settled: bool,
    /// All counts of this level are zero by a positivity bound.
    pub certified_positive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderRung {
    pub r_over_r0: f64,
    pub ind_d: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub space: SchwarzschildSpace,
    pub link_label: String,
    pub link: MinimalLink,
    pub r_outer: f64,
    pub r_over_r0: f64,
    pub per_mode: Vec<ModeReport>,
    /// Non-positive Dirichlet eigenvalues.
    pub ind_d: u64,
    pub null_d: u64,
    /// Negative eigenvalues with Neumann horizon data.
    pub ind_f: u64,
    pub null_f: u64,
    /// Steklov eigenvalues below 1.
    pub ind_r: u64,
    /// `ind_d + null_d + ind_r`.
    pub ind_m: u64,
    /// Negative eigenvalues of the free-boundary form counted directly.
    pub ind_m_direct: u64,
    pub k_max: usize,
    pub levels_used: usize,
    /// Every Γ-level past the last one used provably contributes nothing.
    pub truncation_certified: bool,
    pub grid_size: usize,
    pub refined: bool,
    pub degenerate_steklov: bool,
    pub ladder: Vec<LadderRung>,
    pub divergence_verdict: DivergenceVerdict,
}

impl IndexReport {
    pub const CSV_HEADER: &'static str =
        "n,m,link,r_over_r0,ind_d,null_d,ind_f,ind_r,ind_m,ind_m_direct,verdict,truncation_certified,refined";

    /// Cells in [`Self::CSV_HEADER`] order.
    pub fn csv_fields(&self) -> Vec<String> {
        vec![
            self.space.dimension.to_string(),
            self.space.mass.to_string(),
            self.link_label.clone(),
            self.r_over_r0.to_string(),
            self.ind_d.to_string(),
            self.null_d.to_string(),
            self.ind_f.to_string(),
            self.ind_r.to_string(),
            self.ind_m.to_string(),
            self.ind_m_direct.to_string(),
            self.divergence_verdict.as_str().to_string(),
            self.truncation_certified.to_string(),
            self.refined.to_string(),
        ]
    }

    pub fn csv_row(&self) -> String {
        self.csv_fields().join(",")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("index report serializes")
    }

    /// `ind_D ≤ ind_F ≤ ind_M`, and the decomposition when no Steklov
    /// computation was degenerate.
    pub fn orderings_hold(&self) -> bool {
        self.ind_d <= self.ind_f && self.ind_f <= self.ind_m
    }
}

fn with_level<T>(k: usize, what: &str, res: Result<T>) -> Result<T> {
    res.map_err(|e| Error::numeric("index_report", format!("level {k}, {what}: {e}")))
}

fn level_problem(
    space: &SchwarzschildSpace,
    eigenvalue: f64,
    outer_radius: f64,
    inner: InnerBc,
    outer: OuterCondition,
) -> Result<ModeProblem> {
    ModeProblem::new(*space, eigenvalue, outer_radius, inner, outer)
}

fn dirichlet_index(
    space: &SchwarzschildSpace,
    levels: &[Level],
    outer_radius: f64,
    grid_size: usize,
) -> Result<u64> {
    let mut total = 0;
    for (k, level) in levels.iter().enumerate() {
        let p = level_problem(space, level.eigenvalue, outer_radius, InnerBc::Dirichlet, OuterCondition::Dirichlet)?;
        if p.is_pointwise_positive() {
            continue;
        }
        let grid = RadialGrid::for_problem(&p, grid_size)?;
        let res = with_level(k, "dirichlet", count_negative(&p, &grid))?;
        total += level.multiplicity * res.nonpositive_count as u64;
    }
    Ok(total)
}

/// Mode-by-mode index counts of the cone over `link` truncated at radius R.
pub fn index_report(
    space: &SchwarzschildSpace,
    link: &MinimalLink,
    outer_radius: f64,
    k_max: usize,
    grid_size: usize,
) -> Result<IndexReport> {
    check_radius("index_report", space, outer_radius)?;
    if k_max == 0 {
        return Err(Error::domain("index_report", "k_max must be at least 1"));
    }
    if link.ambient_dimension != space.dimension {
        return Err(Error::domain(
            "index_report",
            format!("link '{}' is not a link in S^{}", link.label, space.dimension - 1),
        ));
    }
    let available = match &link.kind {
        LinkKind::Raw { levels } => levels.iter().take(k_max + 1).copied().collect(),
        _ => link.jacobi_spectrum(k_max + 1)?.levels,
    };
    let used = k_max.min(available.len());
    let levels = &available[..used];

    let mut per_mode = Vec::with_capacity(used);
    for (k, level) in levels.iter().enumerate() {
        let p_d = level_problem(space, level.eigenvalue, outer_radius, InnerBc::Dirichlet, OuterCondition::Dirichlet)?;
        let p_f = level_problem(
            space,
            level.eigenvalue,
            outer_radius,
            InnerBc::SchwarzschildNeumann,
            OuterCondition::Dirichlet,
        )?;
        let p_m = level_problem(
            space,
            level.eigenvalue,
            outer_radius,
            InnerBc::SchwarzschildNeumann,
            OuterCondition::Steklov,
        )?;
        let certified_positive = p_m.robin_form_certified_positive();
        let shot = with_level(k, "steklov", steklov_shot(&p_m))?;
        let mode = if certified_positive {
            ModeReport {
                k,
                eigenvalue: level.eigenvalue,
                multiplicity: level.multiplicity,
                dirichlet: ModeCounts::ZERO,
                free: ModeCounts::ZERO,
                robin: ModeCounts::ZERO,
                steklov: shot.outcome,
                steklov_settled: shot.settled,
                certified_positive,
            }
        } else {
            let count = |p: &ModeProblem, what: &str| -> Result<ModeCounts> {
                if p.is_pointwise_positive() && p.outer_bc == crate::radial::OuterBc::Dirichlet {
                    return Ok(ModeCounts::ZERO);
                }
                let grid = RadialGrid::for_problem(p, grid_size)?;
                Ok(ModeCounts::from_result(&with_level(k, what, count_negative(p, &grid))?))
            };
            ModeReport {
                k,
                eigenvalue: level.eigenvalue,
                multiplicity: level.multiplicity,
                dirichlet: count(&p_d, "dirichlet")?,
                free: count(&p_f, "free")?,
                robin: count(&p_m, "robin")?,
                steklov: shot.outcome,
                steklov_settled: shot.settled,
                certified_positive,
            }
        };
        per_mode.push(mode);
    }

    let weighted = |f: &dyn Fn(&ModeReport) -> u64| per_mode.iter().map(|m| m.multiplicity * f(m)).sum::<u64>();
    let ind_d = weighted(&|m| m.dirichlet.nonpositive as u64);
    let null_d = weighted(&|m| (m.dirichlet.nonpositive - m.dirichlet.negative) as u64);
    let ind_f = weighted(&|m| m.free.negative as u64);
    let null_f = weighted(&|m| (m.free.nonpositive - m.free.negative) as u64);
    let ind_r = weighted(&|m| m.steklov.contributes() as u64);
    let ind_m_direct = weighted(&|m| m.robin.negative as u64);
    let degenerate_steklov = per_mode.iter().any(|m| m.steklov == SteklovOutcome::Degenerate);
    let refined = per_mode
        .iter()
        .all(|m| m.dirichlet.refined && m.free.refined && m.robin.refined);

    let truncation_certified = match available.get(used) {
        Some(next) => level_problem(
            space,
            next.eigenvalue,
            outer_radius,
            InnerBc::SchwarzschildNeumann,
            OuterCondition::Steklov,
        )?
        .robin_form_certified_positive(),
        None => per_mode.last().is_some_and(|m| m.certified_positive),
    };

    let r0 = space.horizon_radius;
    let ratio = outer_radius / r0;
    let mut ladder = Vec::with_capacity(3);
    for e in [0.25, 0.5] {
        let rung = r0 * ratio.powf(e);
        ladder.push(LadderRung {
            r_over_r0: rung / r0,
            ind_d: dirichlet_index(space, levels, rung, grid_size)?,
        });
    }
    ladder.push(LadderRung {
        r_over_r0: ratio,
        ind_d,
    });
    let divergence_verdict = if ladder[0].ind_d < ladder[1].ind_d && ladder[1].ind_d < ladder[2].ind_d {
        DivergenceVerdict::DivergentTrend
    } else if ind_f == 0 {
        DivergenceVerdict::Stable
    } else {
        DivergenceVerdict::FiniteAtThisR
    };

    Ok(IndexReport {
        space: *space,
        link_label: link.label.clone(),
        link: link.clone(),
        r_outer: outer_radius,
        r_over_r0: ratio,
        per_mode,
        ind_d,
        null_d,
        ind_f,
        null_f,
        ind_r,
        ind_m: ind_d + null_d + ind_r,
        ind_m_direct,
        k_max,
        levels_used: used,
        truncation_certified,
        grid_size,
        refined,
        degenerate_steklov,
        ladder,
        divergence_verdict,
    })
}
