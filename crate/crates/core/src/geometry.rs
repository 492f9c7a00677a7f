//! The n-dimensional Riemannian Schwarzschild manifold.
//!
//! Two pictures are used throughout the crate:
//!
//! * the isotropic picture, `{|x| ≥ R0} ⊂ ℝⁿ` with `g = f(|x|)² δ`, where
//!   radial functions of the cone are expressed in the Euclidean radius `r`;
//! * the polar picture, `g = dr² + h(r)² g_{S^{n-1}}`, where `r` is the
//!   Schwarzschild distance to the horizon and `h` the areal radius.
//!
//! Most closed forms are evaluated through `x = (r/R0)^(n-2) = 2 r^(n-2)/m`,
//! which keeps every factor well scaled for very large radii.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack admitted when checking `r ≥ R0`, relative to `R0`.
const RADIUS_SLACK: f64 = 1e-13;

/// `base^exponent` for a strictly positive base, through `exp/ln`.
#[inline]
pub(crate) fn pos_pow(base: f64, exponent: f64) -> f64 {
    debug_assert!(base > 0.0, "pos_pow on non-positive base {base}");
    (exponent * base.ln()).exp()
}

/// Ambient Schwarzschild space of dimension `n` and mass `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchwarzschildSpace {
    /// Ambient dimension n ≥ 3.
    pub dimension: usize,
    /// Mass m > 0.
    pub mass: f64,
    /// Isotropic horizon radius R0 = (m/2)^(1/(n-2)).
    pub horizon_radius: f64,
    /// Areal horizon radius s0 = (2m)^(1/(n-2)).
    pub areal_horizon_radius: f64,
    /// Dimension N = n - 1 of the cones.
    pub cone_dimension: usize,
}

impl SchwarzschildSpace {
    pub fn new(dimension: usize, mass: f64) -> Result<Self> {
        if dimension < 3 {
            return Err(Error::domain(
                "make_space",
                format!("dimension must be at least 3, got {dimension}"),
            ));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::domain(
                "make_space",
                format!("mass must be positive and finite, got {mass}"),
            ));
        }
        let k = 1.0 / (dimension as f64 - 2.0);
        Ok(Self {
            dimension,
            mass,
            horizon_radius: pos_pow(mass / 2.0, k),
            areal_horizon_radius: pos_pow(2.0 * mass, k),
            cone_dimension: dimension - 1,
        })
    }

    pub(crate) fn nf(&self) -> f64 {
        self.dimension as f64
    }

    /// `n - 2` as a float; the exponent that appears in every factor.
    pub(crate) fn d(&self) -> f64 {
        self.dimension as f64 - 2.0
    }

    fn check_radius(&self, op: &'static str, r: f64) -> Result<()> {
        if !r.is_finite() || r < self.horizon_radius * (1.0 - RADIUS_SLACK) {
            return Err(Error::domain(
                op,
                format!("radius {r} lies inside the horizon R0 = {}", self.horizon_radius),
            ));
        }
        Ok(())
    }

    /// `x = (r/R0)^(n-2)`.
    #[inline]
    pub(crate) fn ratio(&self, r: f64) -> f64 {
        pos_pow(r / self.horizon_radius, self.d())
    }

    /// Isotropic conformal factor f(r) with `g_Sch = f² δ`.
    pub fn isotropic_factor(&self, r: f64) -> Result<f64> {
        self.check_radius("isotropic_factor", r)?;
        Ok(self.isotropic_factor_unchecked(r))
    }

    pub(crate) fn isotropic_factor_unchecked(&self, r: f64) -> f64 {
        let x = self.ratio(r);
        pos_pow(1.0 + 1.0 / x, 2.0 / self.d())
    }

    /// `f'(r)/f(r)` for the isotropic factor.
    pub(crate) fn isotropic_log_derivative(&self, r: f64) -> f64 {
        let s = 1.0 / self.ratio(r);
        -2.0 * s / (r * (1.0 + s))
    }

    /// `(f'/f)'(r)`.
    pub(crate) fn isotropic_log_second_derivative(&self, r: f64) -> f64 {
        // φ = (2/(n-2)) ln(1+s), s = (m/2) r^(2-n)
        let d = self.d();
        let s = 1.0 / self.ratio(r);
        let s1 = -d * s / r;
        let s2 = d * (d + 1.0) * s / (r * r);
        (2.0 / d) * (s2 / (1.0 + s) - s1 * s1 / ((1.0 + s) * (1.0 + s)))
    }

    fn cone_exponent(&self) -> f64 {
        (self.cone_dimension as f64 - 2.0) / self.d()
    }

    /// Conformal factor F(r) of the induced cone metric, `g = F^(4/(N-2)) g_δ`.
    pub fn cone_factor(&self, r: f64) -> Result<f64> {
        self.check_radius("cone_factor", r)?;
        Ok(self.cone_factor_unchecked(r))
    }

    pub(crate) fn cone_factor_unchecked(&self, r: f64) -> f64 {
        pos_pow(1.0 + 1.0 / self.ratio(r), self.cone_exponent())
    }

    /// Analytic F'(r) = −(N−2)(m/2) r^(1−n) (1 + m/(2r^(n−2)))^((N−2)/(n−2) − 1).
    pub fn cone_factor_derivative(&self, r: f64) -> Result<f64> {
        self.check_radius("cone_factor_derivative", r)?;
        Ok(self.cone_factor_derivative_unchecked(r))
    }

    pub(crate) fn cone_factor_derivative_unchecked(&self, r: f64) -> f64 {
        let e = self.cone_exponent();
        let s = 1.0 / self.ratio(r);
        let nn = self.cone_dimension as f64;
        -(nn - 2.0) * (s / r) * pos_pow(1.0 + s, e - 1.0)
    }

    pub(crate) fn cone_factor_second_derivative_unchecked(&self, r: f64) -> f64 {
        let e = self.cone_exponent();
        let d = self.d();
        let s = 1.0 / self.ratio(r);
        let s1 = -d * s / r;
        let s2 = d * (d + 1.0) * s / (r * r);
        e * (e - 1.0) * pos_pow(1.0 + s, e - 2.0) * s1 * s1 + e * pos_pow(1.0 + s, e - 1.0) * s2
    }

    /// Umbilicity κ(R) of the coordinate sphere S(R) in the Schwarzschild metric.
    pub fn umbilicity(&self, radius: f64) -> Result<f64> {
        self.check_radius("umbilicity", radius)?;
        let x = self.ratio(radius).max(1.0);
        let r0 = self.horizon_radius;
        // (R^(n-2) - R0^(n-2)) R / (R^(n-2) + R0^(n-2))^(n/(n-2)) with R^(n-2) = x R0^(n-2)
        Ok((x - 1.0) * radius / (r0 * r0) / pos_pow(x + 1.0, self.nf() / self.d()))
    }

    /// Radial potential V(r) = m(n−1)/(2rⁿ) · (2r^(n−2)/(m + 2r^(n−2)))².
    pub fn radial_potential(&self, r: f64) -> Result<f64> {
        self.check_radius("radial_potential", r)?;
        let x = self.ratio(r);
        Ok((self.nf() - 1.0) * x / ((1.0 + x) * (1.0 + x) * r * r))
    }

    /// `r² V(r)` at logarithmic coordinate `t = ln(r/R0) ≥ 0`.
    ///
    /// Equals `(n−1)/(4 cosh²((n−2)t/2))`; its maximum `(n−1)/4` sits on the horizon.
    pub fn scaled_potential(&self, t: f64) -> f64 {
        let half = 0.5 * self.d() * t;
        let c = half.cosh();
        (self.nf() - 1.0) / (4.0 * c * c)
    }

    /// Default extent of areal profiles: `10³ R0`.
    pub fn default_profile_extent(&self) -> f64 {
        1e3 * self.horizon_radius
    }

    /// Integrates the areal radius h(r) on `[0, r_max]`.
    pub fn areal_profile(&self, r_max: f64, tol: f64) -> Result<ArealProfile> {
        ArealProfile::integrate(*self, r_max, tol)
    }
}

/// Areal radius h(r) as a function of the Schwarzschild distance r to the horizon.
///
/// Stores nodes of `h` and `h' = f` (the static potential), and interpolates
/// `h` with quintic and `h'` with cubic Hermite pieces; `h''` is available in closed form from the
/// equation `h'' = (n−2) m h^(1−n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArealProfile {
    pub space: SchwarzschildSpace,
    pub grid: Vec<f64>,
    pub h_values: Vec<f64>,
    /// `h − s0` at the nodes; the integrated state.
    pub excess_values: Vec<f64>,
    pub hprime_values: Vec<f64>,
    pub interpolation_order: usize,
    pub tolerance: f64,
}

impl ArealProfile {
    fn second_derivative(space: &SchwarzschildSpace, h: f64) -> f64 {
        space.d() * space.mass * pos_pow(h, 1.0 - space.nf())
    }

    /// `sqrt(1 − 2m h^(2−n))`, the right-hand side of the first-order equation.
    pub fn static_potential_of(space: &SchwarzschildSpace, h: f64) -> f64 {
        // 1 − (s0/h)^(n−2) without cancellation next to the horizon
        let s0 = space.areal_horizon_radius;
        let excess = ((h - s0) / s0).max(0.0);
        (-(-space.d() * excess.ln_1p()).exp_m1()).sqrt()
    }

    /// `(h, h')` from `h = s0 + h2 r²/2 + h4 r⁴/24 + O(r⁶)`, which removes the
    /// square-root degeneracy of h' at the horizon.
    /// Returned as `(h − s0, h')`.
    fn horizon_series_excess(space: &SchwarzschildSpace, r: f64) -> (f64, f64) {
        let s0 = space.areal_horizon_radius;
        let nf = space.nf();
        let h2 = Self::second_derivative(space, s0);
        let h4 = space.d() * (1.0 - nf) * space.mass * pos_pow(s0, -nf) * h2;
        (h2 * r * r / 2.0 + h4 * r.powi(4) / 24.0, h2 * r + h4 * r.powi(3) / 6.0)
    }

    fn integrate(space: SchwarzschildSpace, r_max: f64, tol: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) || !(tol > 0.0) {
            return Err(Error::domain(
                "areal_profile",
                format!("need r_max > 0 and tol > 0, got r_max={r_max}, tol={tol}"),
            ));
        }
        let mut step_factor = 5e-3;
        let mut last_residual = f64::NAN;
        for _ in 0..6 {
            let profile = Self::integrate_with(space, r_max, tol, step_factor);
            let node = profile.max_node_residual();
            let mid = profile.max_midpoint_residual();
            if node <= tol && mid <= 10.0 * tol {
                return Ok(profile);
            }
            last_residual = node.max(mid / 10.0);
            step_factor *= 0.5;
        }
        Err(Error::numeric(
            "areal_profile",
            format!("residual {last_residual:e} above tolerance {tol:e} after refinement"),
        ))
    }

    fn integrate_with(space: SchwarzschildSpace, r_max: f64, tol: f64, step_factor: f64) -> Self {
        let s0 = space.areal_horizon_radius;
        let accel = |h: f64| Self::second_derivative(&space, h);

        let first = (step_factor * s0).min(r_max);
        let (e_first, p_first) = Self::horizon_series_excess(&space, first);
        let mut grid = vec![0.0, first];
        let mut ev = vec![0.0, e_first];
        let mut pv = vec![0.0, p_first];

        // the state is e = h − s0, which keeps its relative accuracy near the horizon
        let mut r = first;
        while r < r_max {
            let step = (step_factor * (s0 + r)).min(r_max - r);
            let (e, p) = (*ev.last().unwrap(), *pv.last().unwrap());
            let k1 = (p, accel(s0 + e));
            let k2 = (p + 0.5 * step * k1.1, accel(s0 + e + 0.5 * step * k1.0));
            let k3 = (p + 0.5 * step * k2.1, accel(s0 + e + 0.5 * step * k2.0));
            let k4 = (p + step * k3.1, accel(s0 + e + step * k3.0));
            let en = e + step / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            let pn = p + step / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            r = if r_max - r - step <= 1e-12 * r_max { r_max } else { r + step };
            grid.push(r);
            ev.push(en);
            pv.push(pn);
        }
        ArealProfile {
            space,
            grid,
            h_values: ev.iter().map(|e| s0 + e).collect(),
            excess_values: ev,
            hprime_values: pv,
            interpolation_order: 5,
            tolerance: tol,
        }
    }

    pub fn r_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    fn locate(&self, r: f64) -> usize {
        match self.grid.binary_search_by(|g| g.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(self.grid.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.grid.len() - 2),
        }
    }

    fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
        let w = x1 - x0;
        let s = (x - x0) / w;
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * w * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * w * d1
    }

    /// Quintic Hermite piece matching value, slope and curvature at both ends.
    #[allow(clippy::too_many_arguments)]
    fn hermite5(x0: f64, x1: f64, y: [f64; 2], d: [f64; 2], a: [f64; 2], x: f64) -> f64 {
        let w = x1 - x0;
        let s = (x - x0) / w;
        let (s2, s3) = (s * s, s * s * s);
        let (s4, s5) = (s3 * s, s3 * s2);
        (1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5) * y[0]
            + (s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5) * w * d[0]
            + 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5) * w * w * a[0]
            + (10.0 * s3 - 15.0 * s4 + 6.0 * s5) * y[1]
            + (-4.0 * s3 + 7.0 * s4 - 3.0 * s5) * w * d[1]
            + 0.5 * (s3 - 2.0 * s4 + s5) * w * w * a[1]
    }

    pub(crate) fn eval_unchecked(&self, r: f64) -> (f64, f64) {
        let (e, p) = self.eval_excess_unchecked(r);
        (self.space.areal_horizon_radius + e, p)
    }

    /// `(h − s0, h')` at `r`.
    fn eval_excess_unchecked(&self, r: f64) -> (f64, f64) {
        if r <= self.grid[1] {
            return Self::horizon_series_excess(&self.space, r);
        }
        let i = self.locate(r);
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let (e0, e1) = (self.excess_values[i], self.excess_values[i + 1]);
        let (p0, p1) = (self.hprime_values[i], self.hprime_values[i + 1]);
        let a0 = Self::second_derivative(&self.space, self.h_values[i]);
        let a1 = Self::second_derivative(&self.space, self.h_values[i + 1]);
        // e ~ r² next to the horizon; a cubic piece loses ~1e-8 of it there
        let e = Self::hermite5(x0, x1, [e0, e1], [p0, p1], [a0, a1], r);
        let p = Self::hermite(x0, x1, p0, p1, a0, a1, r);
        (e, p)
    }

    fn check_range(&self, op: &'static str, r: f64) -> Result<()> {
        if !(r >= 0.0 && r <= self.r_max() * (1.0 + 1e-14)) {
            return Err(Error::domain(
                op,
                format!("r = {r} outside profile range [0, {}]", self.r_max()),
            ));
        }
        Ok(())
    }

    /// Areal radius h(r).
    pub fn h(&self, r: f64) -> Result<f64> {
        self.check_range("areal_profile.h", r)?;
        Ok(self.eval_unchecked(r).0)
    }

    /// `h(r) − s0`, without cancellation below the first grid node.
    pub fn excess(&self, r: f64) -> Result<f64> {
        self.check_range("areal_profile.excess", r)?;
        Ok(self.eval_excess_unchecked(r).0)
    }

    /// h'(r), which is the static potential f evaluated at distance r.
    pub fn hprime(&self, r: f64) -> Result<f64> {
        self.check_range("areal_profile.hprime", r)?;
        Ok(self.eval_unchecked(r).1)
    }

    /// Divergence of the conformal field X = h ∂_r along a minimal hypersurface: (n−1) f.
    pub fn conformal_field_divergence(&self, r: f64) -> Result<f64> {
        Ok((self.space.nf() - 1.0) * self.hprime(r)?)
    }

    fn residual_at(&self, h: f64, p: f64) -> f64 {
        (p - Self::static_potential_of(&self.space, h)).abs()
    }

    /// Largest first-order residual `|h' − sqrt(1 − 2m h^(2−n))|` over the nodes.
    pub fn max_node_residual(&self) -> f64 {
        self.h_values
            .iter()
            .zip(&self.hprime_values)
            .map(|(&h, &p)| self.residual_at(h, p))
            .fold(0.0, f64::max)
    }

    /// Same residual at the interval midpoints, through the interpolants.
    pub fn max_midpoint_residual(&self) -> f64 {
        self.grid
            .windows(2)
            .map(|w| {
                let (h, p) = self.eval_unchecked(0.5 * (w[0] + w[1]));
                self.residual_at(h, p)
            })
            .fold(0.0, f64::max)
    }

    /// CSV dump with columns `r,h,hprime`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,h,hprime\n");
        for ((r, h), p) in self.grid.iter().zip(&self.h_values).zip(&self.hprime_values) {
            out.push_str(&format!("{r:.17e},{h:.17e},{p:.17e}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn make_space_examples() {
        let s = SchwarzschildSpace::new(4, 2.0).unwrap();
        assert_relative_eq!(s.horizon_radius, 1.0, epsilon = 1e-15);
        assert_relative_eq!(s.areal_horizon_radius, 2.0, epsilon = 1e-15);
        assert_eq!(s.cone_dimension, 3);
        let s = SchwarzschildSpace::new(3, 2.0).unwrap();
        assert_relative_eq!(s.horizon_radius, 1.0, epsilon = 1e-15);
        assert_relative_eq!(s.areal_horizon_radius, 4.0, epsilon = 1e-14);
        let s = SchwarzschildSpace::new(8, 2.0).unwrap();
        assert_relative_eq!(s.horizon_radius, 1.0, epsilon = 1e-15);
        // 2^(1/3) to 17 digits
        assert_relative_eq!(s.areal_horizon_radius, 1.259_921_049_894_873_2, max_relative = 1e-15);
    }

    #[test]
    fn make_space_rejects_bad_input() {
        assert!(matches!(SchwarzschildSpace::new(2, 1.0), Err(Error::Domain { .. })));
        assert!(SchwarzschildSpace::new(4, 0.0).is_err());
        assert!(SchwarzschildSpace::new(4, -1.0).is_err());
        assert!(SchwarzschildSpace::new(4, f64::NAN).is_err());
    }

    #[test]
    fn horizon_relations() {
        for n in 3..=12 {
            for m in [0.3, 1.0, 2.0, 7.5] {
                let s = SchwarzschildSpace::new(n, m).unwrap();
                let r0 = s.horizon_radius;
                assert_relative_eq!(2.0 * r0.powi(n as i32 - 2), m, max_relative = 1e-13);
                let f0 = s.isotropic_factor(r0).unwrap();
                assert_relative_eq!(r0 * f0, s.areal_horizon_radius, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn factor_examples() {
        let s4 = SchwarzschildSpace::new(4, 2.0).unwrap();
        assert_relative_eq!(s4.isotropic_factor(1.0).unwrap(), 2.0, epsilon = 1e-14);
        assert!((s4.isotropic_factor(1e8).unwrap() - 1.0).abs() < 1e-15);
        let s5 = SchwarzschildSpace::new(5, 2.0).unwrap();
        assert_relative_eq!(s5.isotropic_factor(1.0).unwrap(), 2f64.powf(2.0 / 3.0), max_relative = 1e-14);
        assert_relative_eq!(s4.cone_factor(1.0).unwrap(), 2f64.sqrt(), max_relative = 1e-14);
        let s6 = SchwarzschildSpace::new(6, 2.0).unwrap();
        assert_relative_eq!(
            s6.cone_factor(2.0).unwrap(),
            (1.0 + 1.0 / 16.0f64).powf(0.75),
            max_relative = 1e-14
        );
        for n in 4..=10 {
            let s = SchwarzschildSpace::new(n, 1.3).unwrap();
            let expect = 2f64.powf((n as f64 - 3.0) / (n as f64 - 2.0));
            assert_relative_eq!(s.cone_factor(s.horizon_radius).unwrap(), expect, max_relative = 1e-13);
        }
    }

    #[test]
    fn factors_reject_interior_radii() {
        let s = SchwarzschildSpace::new(4, 2.0).unwrap();
        assert!(s.isotropic_factor(0.5).is_err());
        assert!(s.cone_factor(0.99).is_err());
        assert!(s.umbilicity(0.0).is_err());
        assert!(s.radial_potential(f64::NAN).is_err());
    }

    #[test]
    fn umbilicity_examples() {
        let s = SchwarzschildSpace::new(4, 2.0).unwrap();
        assert_eq!(s.umbilicity(1.0).unwrap(), 0.0);
        assert_relative_eq!(s.umbilicity(2.0).unwrap(), 6.0 / 25.0, max_relative = 1e-14);
        let s5 = SchwarzschildSpace::new(5, 2.0).unwrap();
        let r0 = s5.horizon_radius;
        let big_r = 2.0 * r0;
        let direct = (big_r.powi(3) - r0.powi(3)) * big_r / (big_r.powi(3) + r0.powi(3)).powf(5.0 / 3.0);
        assert_relative_eq!(s5.umbilicity(big_r).unwrap(), direct, max_relative = 1e-13);
    }

    #[test]
    fn umbilicity_matches_conformal_sphere_curvature() {
        // κ = (1/f)(1/R + f'/f) for a round sphere under g = f² δ.
        for n in [4, 6, 9] {
            let s = SchwarzschildSpace::new(n, 1.7).unwrap();
            for k in [1.01, 1.5, 3.0, 40.0] {
                let r = k * s.horizon_radius;
                let f = s.isotropic_factor(r).unwrap();
                let expect = (1.0 / r + s.isotropic_log_derivative(r)) / f;
                assert_relative_eq!(s.umbilicity(r).unwrap(), expect, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn potential_examples() {
        let s = SchwarzschildSpace::new(4, 2.0).unwrap();
        // both factored forms: 3/(1+r²)² and the defining expression
        for r in [1.0f64, 3.0, 7.0] {
            let direct = 2.0 * 3.0 / (2.0 * r.powi(4)) * (2.0 * r * r / (2.0 + 2.0 * r * r)).powi(2);
            let simple = 3.0 / (1.0 + r * r).powi(2);
            assert_relative_eq!(s.radial_potential(r).unwrap(), direct, max_relative = 1e-14);
            assert_relative_eq!(s.radial_potential(r).unwrap(), simple, max_relative = 1e-14);
        }
        assert_relative_eq!(s.radial_potential(1.0).unwrap(), 0.75, max_relative = 1e-15);
        assert_relative_eq!(s.radial_potential(3.0).unwrap(), 0.03, max_relative = 1e-14);
        assert!(s.radial_potential(1e6).unwrap() < 1e-23);
    }

    #[test]
    fn scaled_potential_agrees_with_potential() {
        for n in [4, 5, 8, 11] {
            let s = SchwarzschildSpace::new(n, 0.7).unwrap();
            for t in [0.0, 0.3, 2.0, 9.0] {
                let r = s.horizon_radius * f64::exp(t);
                let v = s.radial_potential(r).unwrap();
                assert_relative_eq!(s.scaled_potential(t), v * r * r, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn areal_profile_initial_data_and_trend() {
        let s = SchwarzschildSpace::new(4, 2.0).unwrap();
        let p = s.areal_profile(s.default_profile_extent(), 1e-9).unwrap();
        assert_eq!(p.h(0.0).unwrap(), 2.0);
        assert_eq!(p.hprime(0.0).unwrap(), 0.0);
        let mut last = -1.0;
        let mut gaps = Vec::new();
        for r in [1.0, 10.0, 100.0, 500.0, 1000.0] {
            let hp = p.hprime(r).unwrap();
            assert!(hp > last && hp < 1.0);
            last = hp;
            gaps.push(p.h(r).unwrap() - r);
        }
        // h(r) − r settles to a constant
        assert!((gaps[4] - gaps[3]).abs() < (gaps[2] - gaps[1]).abs());
        assert!(p.max_midpoint_residual() <= 10.0 * p.tolerance);
        assert!(p.h(1001.0).is_err());
    }

    #[test]
    fn areal_profile_in_several_dimensions() {
        for n in [3, 5, 8] {
            let s = SchwarzschildSpace::new(n, 1.0).unwrap();
            let p = s.areal_profile(200.0 * s.horizon_radius, 1e-9).unwrap();
            assert!(p.max_node_residual() <= 1e-9);
            assert!(p.h_values.windows(2).all(|w| w[1] > w[0]));
            assert!(p.to_csv().starts_with("r,h,hprime\n"));
        }
    }

    #[test]
    fn cone_factor_derivative_second_order() {
        for n in [4, 7] {
            let s = SchwarzschildSpace::new(n, 2.0).unwrap();
            let r = 1.7 * s.horizon_radius;
            let exact = s.cone_factor_derivative(r).unwrap();
            let fd = |h: f64| (s.cone_factor(r + h).unwrap() - s.cone_factor(r - h).unwrap()) / (2.0 * h);
            let e1 = (fd(1e-2) - exact).abs();
            let e2 = (fd(5e-3) - exact).abs();
            let ratio = e1 / e2;
            assert!((3.5..4.5).contains(&ratio), "convergence ratio {ratio}");
        }
    }
}
