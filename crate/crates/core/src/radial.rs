//! Radial mode problems for cones over a link Γ.
//!
//! Separating variables `ψ(p, r) = f_k(p) u(r)` in the Euclidean picture turns
//! the Jacobi operator into the Sturm–Liouville family
//!
//! ```text
//! L_k = d²/dr² + (N−1)/r d/dr + V(r) − λ_k(Γ)/r²
//! ```
//!
//! with eigenvalue weight `F^(4/(N−2))`. Writing `t = ln(r/R0)` and
//! `u = r^(−c) y` with `c = (n−3)/2`, the mode form becomes the Schrödinger form
//!
//! ```text
//! Q_k(y) = ∫_0^T y'² + (c² + λ_k − r²V) y² dt  (+ β_T y(T)² for Steklov data)
//! ```
//!
//! and the Schwarzschild Neumann condition on the horizon (the Robin condition
//! `u' + c u / R0 = 0`) becomes the plain Neumann condition `y'(0) = 0`. All
//! discretizations below are assembled in this form on a uniform grid in `t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pos_pow, SchwarzschildSpace};
use crate::link::MinimalLink;
use crate::tridiag::TridiagonalPencil;

/// Relative half-width of the band around zero in which an eigenvalue counts
/// as null rather than negative or positive.
pub const NULL_TOLERANCE: f64 = 1e-8;
/// Number of lowest eigenvalues reported with each count.
pub const REPORTED_EIGENVALUES: usize = 4;
/// Agreement required between the two shooting resolutions.
pub const SHOOTING_AGREEMENT: f64 = 1e-8;
/// `|y(R)|` below this fraction of `|(y, y')|` is a Dirichlet collision.
pub const DEGENERATE_STEKLOV: f64 = 1e-10;
/// A Steklov value within this distance of 1 is a null direction of the
/// free-boundary form and does not contribute.
pub const STEKLOV_NULL_BAND: f64 = 1e-8;

/// Closed-form solution `g_j` of the radial Dirichlet problem
/// `−r² g'' − (n−2) r g' = β g`, `g(R0) = g(R) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvpMode {
    pub j: u32,
    pub r_inner: f64,
    pub r_outer: f64,
    /// Half of `n − 3`, the decay exponent of `g_j`.
    pub decay: f64,
    pub beta: f64,
    /// Normalization in `L²([R0, R], r^(n−4) dr)`.
    pub normalization: f64,
}

impl IvpMode {
    fn log_length(&self) -> f64 {
        (self.r_outer / self.r_inner).ln()
    }

    fn frequency(&self) -> f64 {
        self.j as f64 * std::f64::consts::PI / self.log_length()
    }

    /// `(g, g', g'')` at `r`.
    pub fn derivatives(&self, r: f64) -> (f64, f64, f64) {
        let a = self.decay;
        let w = self.frequency();
        let phase = w * (r / self.r_inner).ln();
        let (s, c) = phase.sin_cos();
        let scale = self.normalization * pos_pow(r, -a);
        let g = scale * s;
        let g1 = scale / r * (-a * s + w * c);
        let g2 = scale / (r * r) * ((a * (a + 1.0) - w * w) * s - (2.0 * a + 1.0) * w * c);
        (g, g1, g2)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.derivatives(r).0
    }

    /// Residual `−r²g'' − (n−2) r g' − β g` at `r`.
    pub fn residual(&self, r: f64) -> f64 {
        let (g, g1, g2) = self.derivatives(r);
        -r * r * g2 - (2.0 * self.decay + 1.0) * r * g1 - self.beta * g
    }
}

/// The `j`-th closed-form radial mode on `[R0, R]`.
pub fn ivp_mode(space: &SchwarzschildSpace, outer_radius: f64, j: u32) -> Result<IvpMode> {
    let r0 = space.horizon_radius;
    if !(outer_radius > r0 && outer_radius.is_finite()) {
        return Err(Error::domain("ivp_mode", format!("need R > R0, got R = {outer_radius}")));
    }
    if j == 0 {
        return Err(Error::domain("ivp_mode", "mode index j starts at 1"));
    }
    let decay = (space.nf() - 3.0) / 2.0;
    let log_len = (outer_radius / r0).ln();
    let w = j as f64 * std::f64::consts::PI / log_len;
    Ok(IvpMode {
        j,
        r_inner: r0,
        r_outer: outer_radius,
        decay,
        beta: decay * decay + w * w,
        normalization: (2.0 / log_len).sqrt(),
    })
}

/// Potential `W_k(r) = V(r) − (4λ_k + (n−2)(n−4)) / (4r²)` of the mode
/// equation written for `v = r^((N−1)/2) u`.
pub fn wk_potential(space: &SchwarzschildSpace, lambda_k: f64, r: f64) -> Result<f64> {
    let v = space.radial_potential(r)?;
    let n = space.nf();
    Ok(v - (4.0 * lambda_k + (n - 2.0) * (n - 4.0)) / (4.0 * r * r))
}

/// `(X, X', X'')` for `X = 2r^(n−2)/(m + 2r^(n−2)) = x/(1+x)`.
fn kernel_base(space: &SchwarzschildSpace, r: f64) -> (f64, f64, f64) {
    let d = space.d();
    let x = space.ratio(r);
    let base = x / (1.0 + x);
    // dX/dr = d x / (r (1+x)²);  d²X/dr² = d x ((d−1)(1+x) − 2 d x) / (r² (1+x)³)
    let first = d * x / (r * (1.0 + x) * (1.0 + x));
    let second = d * x * ((d - 1.0) * (1.0 + x) - 2.0 * d * x) / (r * r * (1.0 + x).powi(3));
    (base, first, second)
}

/// Kernel function `v(r) = (2r^(n−2)/(m + 2r^(n−2)))^(1/(n−2))` with `v'' + V v = 0`.
pub fn closed_form_v(space: &SchwarzschildSpace, r: f64) -> Result<f64> {
    Ok(closed_form_v_derivatives(space, r)?.0)
}

/// `(v, v', v'')` by the chain rule through `X`; independent of the potential.
pub fn closed_form_v_derivatives(space: &SchwarzschildSpace, r: f64) -> Result<(f64, f64, f64)> {
    space.radial_potential(r)?;
    let p = 1.0 / space.d();
    let (x, x1, x2) = kernel_base(space, r);
    let v = pos_pow(x, p);
    let v1 = p * pos_pow(x, p - 1.0) * x1;
    let v2 = p * (p - 1.0) * pos_pow(x, p - 2.0) * x1 * x1 + p * pos_pow(x, p - 1.0) * x2;
    Ok((v, v1, v2))
}

/// Fischer-Colbrie candidate `ψ = 2r^((n−2)/2)/(m + 2r^(n−2))` and `dψ/dr`.
pub fn fc_candidate(space: &SchwarzschildSpace, r: f64) -> Result<(f64, f64)> {
    space.radial_potential(r)?;
    let n = space.nf();
    let m = space.mass;
    // with x = 2r^(n-2)/m:  ψ = x r^(-(n-2)/2) / (1+x) · (2/m)^0 after simplification
    let x = space.ratio(r);
    let rd = pos_pow(r, (n - 2.0) / 2.0);
    let denom = m * (1.0 + x);
    let psi = 2.0 * rd / denom;
    let dpsi = (n - 2.0) * pos_pow(r, n / 2.0 - 2.0) * m * (1.0 - x) / (denom * denom);
    Ok((psi, dpsi))
}

/// `L_k u` for a radial function given by `(u, u', u'')` at `r`.
pub fn apply_mode_operator(
    space: &SchwarzschildSpace,
    lambda_k: f64,
    r: f64,
    (u, u1, u2): (f64, f64, f64),
) -> Result<f64> {
    let v = space.radial_potential(r)?;
    let big_n = space.cone_dimension as f64;
    Ok(u2 + (big_n - 1.0) / r * u1 + v * u - lambda_k / (r * r) * u)
}

/// `(u, u', u'')` for the supersolution `u = r^(−(N−1)/2) v(r)`.
pub fn supersolution(space: &SchwarzschildSpace, r: f64) -> Result<(f64, f64, f64)> {
    let (v, v1, v2) = closed_form_v_derivatives(space, r)?;
    let a = (space.cone_dimension as f64 - 1.0) / 2.0;
    let w = pos_pow(r, -a);
    let w1 = -a * w / r;
    let w2 = a * (a + 1.0) * w / (r * r);
    Ok((w * v, w1 * v + w * v1, w2 * v + 2.0 * w1 * v1 + w * v2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerBc {
    Dirichlet,
    /// `∂w/∂ν = 0` on the horizon for the Schwarzschild-picture unknown.
    SchwarzschildNeumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterBc {
    Dirichlet,
    /// `∂w/∂ν = λ q w` on S(R) with `q = κ(R)`.
    Steklov { q: f64 },
}

/// Outer boundary requested from [`make_mode_problem`]; Steklov data is
/// completed with `q = κ(R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterCondition {
    Dirichlet,
    Steklov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    /// `r^(n−4) dr`, the weight in which the closed-form modes are orthonormal;
    /// eigenvalues are dimensionless.
    Euclidean,
    /// `F^(4/(N−2)) r^(N−1) dr`, the eigenvalue weight of the Jacobi problem.
    SchwarzschildWeight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeProblem {
    pub space: SchwarzschildSpace,
    /// Index of the Γ-level.
    pub level: usize,
    pub mode_eigenvalue: f64,
    pub multiplicity: u64,
    pub r_inner: f64,
    pub r_outer: f64,
    pub inner_bc: InnerBc,
    pub outer_bc: OuterBc,
    pub weight_kind: WeightKind,
}

impl ModeProblem {
    /// A mode problem for an explicit Γ-eigenvalue.
    pub fn new(
        space: SchwarzschildSpace,
        mode_eigenvalue: f64,
        outer_radius: f64,
        inner_bc: InnerBc,
        outer: OuterCondition,
    ) -> Result<Self> {
        if !(outer_radius > space.horizon_radius && outer_radius.is_finite()) {
            return Err(Error::domain(
                "make_mode_problem",
                format!("need R > R0 = {}, got {outer_radius}", space.horizon_radius),
            ));
        }
        if !mode_eigenvalue.is_finite() {
            return Err(Error::domain("make_mode_problem", "mode eigenvalue is not finite"));
        }
        let outer_bc = match outer {
            OuterCondition::Dirichlet => OuterBc::Dirichlet,
            OuterCondition::Steklov => OuterBc::Steklov {
                q: space.umbilicity(outer_radius)?,
            },
        };
        Ok(Self {
            space,
            level: 0,
            mode_eigenvalue,
            multiplicity: 1,
            r_inner: space.horizon_radius,
            r_outer: outer_radius,
            inner_bc,
            outer_bc,
            weight_kind: WeightKind::Euclidean,
        })
    }

    pub fn with_weight(mut self, weight_kind: WeightKind) -> Self {
        self.weight_kind = weight_kind;
        self
    }

    pub fn with_boundary(mut self, inner_bc: InnerBc, outer: OuterCondition) -> Result<Self> {
        let fresh = Self::new(self.space, self.mode_eigenvalue, self.r_outer, inner_bc, outer)?;
        self.inner_bc = fresh.inner_bc;
        self.outer_bc = fresh.outer_bc;
        Ok(self)
    }

    /// `T = ln(R/R0)`.
    pub fn log_length(&self) -> f64 {
        (self.r_outer / self.r_inner).ln()
    }

    fn shift(&self) -> f64 {
        let c = (self.space.nf() - 3.0) / 2.0;
        c * c + self.mode_eigenvalue
    }

    /// Potential `c² + λ_k − r²V` of the Schrödinger form at `t`.
    pub fn schrodinger_potential(&self, t: f64) -> f64 {
        self.shift() - self.space.scaled_potential(t)
    }

    /// Smallest value of the Schrödinger potential; the maximum of `r²V` is
    /// `(n−1)/4`, attained on the horizon.
    pub fn potential_floor(&self) -> f64 {
        self.shift() - (self.space.nf() - 1.0) / 4.0
    }

    /// Coefficient `β_T` of `y(T)²` contributed by Steklov data with λ = 1.
    pub fn outer_robin_coefficient(&self) -> f64 {
        let s = &self.space;
        let r = self.r_outer;
        let c = (s.nf() - 3.0) / 2.0;
        let kappa = match self.outer_bc {
            OuterBc::Steklov { q } => q,
            OuterBc::Dirichlet => s.umbilicity(r).unwrap_or(0.0),
        };
        let f = s.isotropic_factor_unchecked(r);
        let log_f = s.cone_factor_derivative_unchecked(r) / s.cone_factor_unchecked(r);
        -c + r * (-log_f - kappa * f)
    }

    /// True when the form is positive for both Dirichlet and Neumann horizon
    /// data: the Schrödinger potential is positive everywhere.
    pub fn is_pointwise_positive(&self) -> bool {
        self.potential_floor() > 0.0
    }

    /// True when the free-boundary form with Steklov data at λ = 1 is
    /// provably positive; then every count of this mode, and of every mode with a
    /// larger Γ-eigenvalue, vanishes.
    pub fn robin_form_certified_positive(&self) -> bool {
        let floor = self.potential_floor();
        if floor <= 0.0 {
            return false;
        }
        let k = floor.sqrt();
        k * (k * self.log_length()).tanh() + self.outer_robin_coefficient() > 0.0
    }
}

/// Builds the mode problem at level `k` of the link's Jacobi spectrum.
pub fn make_mode_problem(
    space: &SchwarzschildSpace,
    link: &MinimalLink,
    k: usize,
    outer_radius: f64,
    inner_bc: InnerBc,
    outer: OuterCondition,
) -> Result<ModeProblem> {
    if link.ambient_dimension != space.dimension {
        return Err(Error::domain(
            "make_mode_problem",
            format!(
                "link lives in S^{} but the space has dimension {}",
                link.ambient_dimension - 1,
                space.dimension
            ),
        ));
    }
    let spectrum = link.jacobi_spectrum(k + 1).map_err(|_| {
        Error::domain("make_mode_problem", format!("unknown level {k} for link '{}'", link.label))
    })?;
    let level = spectrum.levels[k];
    let mut problem = ModeProblem::new(*space, level.eigenvalue, outer_radius, inner_bc, outer)?;
    problem.level = k;
    problem.multiplicity = level.multiplicity;
    Ok(problem)
}

/// Nodes of a logarithmically spaced grid on `[R0, R]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub size: usize,
}

impl RadialGrid {
    pub const MIN_SIZE: usize = 16;

    pub fn new(r_inner: f64, r_outer: f64, size: usize) -> Result<Self> {
        if size < Self::MIN_SIZE {
            return Err(Error::domain("radial_grid", format!("size {size} below {}", Self::MIN_SIZE)));
        }
        if !(r_inner > 0.0 && r_outer > r_inner && r_outer.is_finite()) {
            return Err(Error::domain("radial_grid", format!("bad interval [{r_inner}, {r_outer}]")));
        }
        let log_len = (r_outer / r_inner).ln();
        let step = log_len / (size - 1) as f64;
        let mut nodes: Vec<f64> = (0..size).map(|i| r_inner * (step * i as f64).exp()).collect();
        nodes[0] = r_inner;
        nodes[size - 1] = r_outer;
        Ok(Self { nodes, size })
    }

    pub fn for_problem(problem: &ModeProblem, size: usize) -> Result<Self> {
        Self::new(problem.r_inner, problem.r_outer, size)
    }

    /// Uniform spacing in `t = ln(r/R0)`.
    pub fn log_step(&self) -> f64 {
        (self.nodes[self.size - 1] / self.nodes[0]).ln() / (self.size - 1) as f64
    }

    /// The grid with every interval halved.
    pub fn refined(&self) -> Self {
        Self::new(self.nodes[0], self.nodes[self.size - 1], 2 * self.size - 1)
            .expect("refinement of a valid grid")
    }

    fn spans(&self, problem: &ModeProblem) -> bool {
        let tol = 1e-12;
        (self.nodes[0] - problem.r_inner).abs() <= tol * problem.r_inner
            && (self.nodes[self.size - 1] - problem.r_outer).abs() <= tol * problem.r_outer
    }
}

/// Stiffness and mass of a discretized mode problem plus the index of the
/// first unknown node.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledMode {
    pub pencil: TridiagonalPencil,
    pub first_node: usize,
}

impl AssembledMode {
    /// CSV dump `node,t,diag,off,mass` (the last row has an empty `off`).
    pub fn to_csv(&self, grid: &RadialGrid) -> String {
        let h = grid.log_step();
        let mut out = String::from("node,t,diag,off,mass\n");
        for i in 0..self.pencil.len() {
            let node = self.first_node + i;
            let off = self.pencil.off.get(i).map(|v| format!("{v:.17e}")).unwrap_or_default();
            out.push_str(&format!(
                "{node},{:.17e},{:.17e},{off},{:.17e}\n",
                h * node as f64,
                self.pencil.diag[i],
                self.pencil.mass[i]
            ));
        }
        out
    }
}

/// Assembles the Schrödinger form of a mode problem with second-order finite
/// differences (midpoint stiffness, trapezoid potential and lumped mass).
pub fn assemble(problem: &ModeProblem, grid: &RadialGrid, weight: WeightKind) -> Result<AssembledMode> {
    if !grid.spans(problem) {
        return Err(Error::domain(
            "count_negative",
            format!(
                "grid [{}, {}] does not span [{}, {}]",
                grid.nodes[0],
                grid.nodes[grid.size - 1],
                problem.r_inner,
                problem.r_outer
            ),
        ));
    }
    let last = grid.size - 1;
    let h = grid.log_step();
    let first_node = match problem.inner_bc {
        InnerBc::Dirichlet => 1,
        InnerBc::SchwarzschildNeumann => 0,
    };
    let last_node = match problem.outer_bc {
        OuterBc::Dirichlet => last - 1,
        OuterBc::Steklov { .. } => last,
    };
    if last_node < first_node {
        return Err(Error::domain("count_negative", "no free nodes"));
    }
    let space = &problem.space;
    let mut diag = Vec::with_capacity(last_node - first_node + 1);
    let mut mass = Vec::with_capacity(diag.capacity());
    for i in first_node..=last_node {
        let t = h * i as f64;
        let trap = if i == 0 || i == last { 0.5 } else { 1.0 };
        let stiff = (if i > 0 { 1.0 } else { 0.0 } + if i < last { 1.0 } else { 0.0 }) / h;
        diag.push(stiff + trap * h * problem.schrodinger_potential(t));
        let w = match weight {
            WeightKind::Euclidean => 1.0,
            WeightKind::SchwarzschildWeight => {
                let r = grid.nodes[i];
                let f = space.isotropic_factor_unchecked(r);
                f * f * r * r
            }
        };
        mass.push(trap * h * w);
    }
    if let OuterBc::Steklov { .. } = problem.outer_bc {
        *diag.last_mut().unwrap() += problem.outer_robin_coefficient();
    }
    let off = vec![-1.0 / h; diag.len() - 1];
    Ok(AssembledMode {
        pencil: TridiagonalPencil { diag, off, mass },
        first_node,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrumResult {
    pub negative_count: usize,
    pub nonpositive_count: usize,
    /// Negative pivots of the stiffness matrix on the requested grid alone.
    pub inertia_negative_count: usize,
    /// Lowest eigenvalues in the weight of `weight_kind` on the requested grid.
    pub smallest_eigenvalues: Vec<f64>,
    /// Dimensionless eigenvalues after Richardson extrapolation over the
    /// refinement pair; these decide the sign of eigenvalues close to zero.
    pub extrapolated_eigenvalues: Vec<f64>,
    pub grid_size: usize,
    /// Inertia counts agreed with those on the doubled grid.
    pub refined: bool,
}

fn null_tolerance(problem: &ModeProblem) -> f64 {
    NULL_TOLERANCE * problem.shift().abs().max(1.0)
}

fn counts_on(problem: &ModeProblem, grid: &RadialGrid) -> Result<(usize, usize, AssembledMode)> {
    let assembled = assemble(problem, grid, WeightKind::Euclidean)?;
    let negative = assembled.pencil.count_below(0.0)?;
    let nonpositive = assembled.pencil.count_below(null_tolerance(problem))?;
    Ok((negative, nonpositive, assembled))
}

/// Negative and non-positive eigenvalue counts of a mode problem.
///
/// The inertia of the discrete form is computed on `grid` and on its
/// refinement. Every eigenvalue up to one past the larger non-positive count
/// is then extrapolated from the pair (the scheme is second order), and the
/// extrapolated values are what get counted. Without this step a mode whose
/// true eigenvalue is below the discretization error, such as the
/// asymptotically null mode of a stable cone on a long interval, would be
/// counted as negative on every grid.
pub fn count_negative(problem: &ModeProblem, grid: &RadialGrid) -> Result<ModeSpectrumResult> {
    let (negative, nonpositive, euclidean) = counts_on(problem, grid)?;
    let fine_grid = grid.refined();
    let (neg_fine, nonpos_fine, fine) = counts_on(problem, &fine_grid)?;
    let window = (nonpositive.max(nonpos_fine) + 1).min(euclidean.pencil.len());
    let coarse_eig = euclidean.pencil.smallest_eigenvalues(window);
    let fine_eig = fine.pencil.smallest_eigenvalues(window);
    let extrapolated: Vec<f64> = coarse_eig
        .iter()
        .zip(&fine_eig)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect();
    let eps = null_tolerance(problem);
    let pencil = match problem.weight_kind {
        WeightKind::Euclidean => euclidean.pencil,
        WeightKind::SchwarzschildWeight => assemble(problem, grid, WeightKind::SchwarzschildWeight)?.pencil,
    };
    Ok(ModeSpectrumResult {
        negative_count: extrapolated.iter().filter(|e| **e < -eps).count(),
        nonpositive_count: extrapolated.iter().filter(|e| **e < eps).count(),
        inertia_negative_count: negative,
        smallest_eigenvalues: pencil.smallest_eigenvalues(REPORTED_EIGENVALUES),
        extrapolated_eigenvalues: extrapolated,
        grid_size: grid.size,
        refined: negative == neg_fine && nonpositive == nonpos_fine,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum SteklovOutcome {
    Value(f64),
    /// The solution vanishes on S(R): the mode carries Dirichlet nullity.
    Degenerate,
}

impl SteklovOutcome {
    /// Whether the mode adds to the Steklov index (eigenvalue below 1).
    pub fn contributes(&self) -> bool {
        matches!(self, SteklovOutcome::Value(v) if *v < 1.0 - STEKLOV_NULL_BAND)
    }
}

/// Integrates `y'' = q(t) y` on `[0, T]` with RK4 and returns the final
/// `(y, y')` scaled to unit length.
fn shoot(problem: &ModeProblem, start: (f64, f64), steps: usize) -> (f64, f64) {
    let big_t = problem.log_length();
    let h = big_t / steps as f64;
    let q = |t: f64| problem.schrodinger_potential(t);
    let (mut y, mut p) = start;
    for i in 0..steps {
        let t = h * i as f64;
        let q0 = q(t);
        let qm = q(t + 0.5 * h);
        let q1 = q(t + h);
        let k1 = (p, q0 * y);
        let k2 = (p + 0.5 * h * k1.1, qm * (y + 0.5 * h * k1.0));
        let k3 = (p + 0.5 * h * k2.1, qm * (y + 0.5 * h * k2.0));
        let k4 = (p + h * k3.1, q1 * (y + h * k3.0));
        y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        let norm = y.hypot(p);
        if norm > 1e100 {
            y /= norm;
            p /= norm;
        }
    }
    let norm = y.hypot(p);
    (y / norm, p / norm)
}

fn steklov_from_end(problem: &ModeProblem, (y, p): (f64, f64), kappa: f64) -> SteklovOutcome {
    if y.abs() <= DEGENERATE_STEKLOV {
        return SteklovOutcome::Degenerate;
    }
    let s = &problem.space;
    let r = problem.r_outer;
    let c = (s.nf() - 3.0) / 2.0;
    let log_f = s.cone_factor_derivative_unchecked(r) / s.cone_factor_unchecked(r);
    let f = s.isotropic_factor_unchecked(r);
    SteklovOutcome::Value((p / y - c - r * log_f) / (r * kappa * f))
}

/// Outcome of the Steklov shooting together with its resolution record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteklovShot {
    pub outcome: SteklovOutcome,
    /// Difference between the last two resolutions.
    pub spread: f64,
    pub steps: usize,
    /// The two resolutions agreed to [`SHOOTING_AGREEMENT`].
    pub settled: bool,
}

/// Steklov eigenvalue `λ = ∂_ν w / (κ(R) w)` on S(R) of the mode solution of
/// the Jacobi equation with the given horizon condition, by shooting.
pub fn steklov_value(problem: &ModeProblem) -> Result<SteklovOutcome> {
    Ok(steklov_shot(problem)?.outcome)
}

/// [`steklov_value`] with the resolution record.
///
/// Solutions that decay along the whole interval are amplified out of
/// rounding noise by a factor of order `e^T`, so on long intervals the two
/// resolutions may stop approaching each other before they agree to
/// [`SHOOTING_AGREEMENT`]. Once doubling the resolution no longer shrinks the
/// spread, the finer value is accepted if the spread is far too small to move
/// it across 1 (`settled = false`); otherwise this is a numeric error.
pub fn steklov_shot(problem: &ModeProblem) -> Result<SteklovShot> {
    let OuterBc::Steklov { q: kappa } = problem.outer_bc else {
        return Err(Error::domain("steklov_value", "outer boundary condition is not Steklov"));
    };
    if !(kappa > 0.0) {
        return Err(Error::domain("steklov_value", format!("q = κ(R) must be positive, got {kappa}")));
    }
    let start = match problem.inner_bc {
        InnerBc::SchwarzschildNeumann => (1.0, 0.0),
        InnerBc::Dirichlet => (0.0, 1.0),
    };
    let big_t = problem.log_length();
    let omega = (problem.shift().abs() + (problem.space.nf() - 1.0) / 4.0).sqrt();
    let mut steps = ((big_t * omega.max(1.0) / 0.01).ceil() as usize).max(1000);
    let mut coarse = steklov_from_end(problem, shoot(problem, start, steps), kappa);
    // Smallest spread seen so far with its value, and the largest spread since.
    let mut best: Option<(f64, f64)> = None;
    let mut noise = 0.0f64;
    let mut stalls = 0;
    while steps < (1 << 22) {
        let fine = steklov_from_end(problem, shoot(problem, start, 2 * steps), kappa);
        steps *= 2;
        match (coarse, fine) {
            (SteklovOutcome::Degenerate, SteklovOutcome::Degenerate) => {
                return Ok(SteklovShot {
                    outcome: fine,
                    spread: 0.0,
                    steps,
                    settled: true,
                })
            }
            (SteklovOutcome::Value(x), SteklovOutcome::Value(y)) => {
                let spread = (x - y).abs();
                if spread <= SHOOTING_AGREEMENT * y.abs().max(1.0) {
                    return Ok(SteklovShot {
                        outcome: fine,
                        spread,
                        steps,
                        settled: true,
                    });
                }
                match best {
                    Some((b, _)) if spread >= 0.5 * b => {
                        stalls += 1;
                        noise = noise.max(spread);
                    }
                    _ => {
                        best = Some((spread, y));
                        noise = noise.max(spread);
                        if stalls == 0 {
                            noise = spread;
                        }
                        stalls = 0;
                    }
                }
                if stalls >= 2 {
                    let (_, value) = best.expect("set before any stall");
                    if (value - 1.0).abs() > 100.0 * noise + STEKLOV_NULL_BAND {
                        return Ok(SteklovShot {
                            outcome: SteklovOutcome::Value(value),
                            spread: noise,
                            steps,
                            settled: false,
                        });
                    }
                    break;
                }
            }
            _ => {
                best = None;
                stalls = 0;
            }
        }
        coarse = fine;
    }
    Err(Error::numeric(
        "steklov_value",
        format!(
            "shooting did not settle to {SHOOTING_AGREEMENT:e} for λ_k = {} on [{}, {}]",
            problem.mode_eigenvalue, problem.r_inner, problem.r_outer
        ),
    ))
}
