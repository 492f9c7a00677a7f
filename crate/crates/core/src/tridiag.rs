//! Symmetric tridiagonal pencils `K − σ M` with diagonal positive `M`.
//!
//! Inertia is read off the pivots of the LDLᵀ factorization (Sylvester's law
//! of inertia): the number of negative pivots of `K − σ M` equals the number
//! of generalized eigenvalues below `σ`.

use crate::error::{Error, Result};

/// Relative pivot size below which the factorization is declared singular.
pub const PIVOT_BREAKDOWN: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalPencil {
    /// Main diagonal of the stiffness matrix.
    pub diag: Vec<f64>,
    /// Off-diagonal of the stiffness matrix, `diag.len() - 1` entries.
    pub off: Vec<f64>,
    /// Diagonal of the (lumped) mass matrix; every entry positive.
    pub mass: Vec<f64>,
}

impl TridiagonalPencil {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn scale(&self, shift: f64) -> f64 {
        let mut s: f64 = 0.0;
        for i in 0..self.len() {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < self.len() { self.off[i].abs() } else { 0.0 };
            s = s.max((self.diag[i] - shift * self.mass[i]).abs() + left + right);
        }
        s.max(f64::MIN_POSITIVE)
    }

    /// Number of generalized eigenvalues strictly below `shift`.
    ///
    /// Fails with [`Error::PivotBreakdown`] when a pivot falls below
    /// [`PIVOT_BREAKDOWN`] times the matrix scale, i.e. when `shift` sits on an
    /// eigenvalue to working precision.
    pub fn count_below(&self, shift: f64) -> Result<usize> {
        let scale = self.scale(shift);
        let guard = PIVOT_BREAKDOWN * scale;
        let mut count = 0;
        let mut pivot = 0.0;
        for i in 0..self.len() {
            let d = self.diag[i] - shift * self.mass[i];
            pivot = if i == 0 {
                d
            } else {
                d - self.off[i - 1] * self.off[i - 1] / pivot
            };
            if !pivot.is_finite() || pivot.abs() < guard {
                return Err(Error::PivotBreakdown {
                    index: i,
                    pivot,
                    scale,
                });
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Sturm count that never fails: a vanishing pivot is nudged to the
    /// guard value, which is what bisection needs.
    fn sturm_count(&self, shift: f64) -> usize {
        let guard = PIVOT_BREAKDOWN * self.scale(shift);
        let mut count = 0;
        let mut pivot: f64 = 0.0;
        for i in 0..self.len() {
            let d = self.diag[i] - shift * self.mass[i];
            pivot = if i == 0 {
                d
            } else {
                d - self.off[i - 1] * self.off[i - 1] / pivot
            };
            if pivot.abs() < guard {
                pivot = if pivot < 0.0 { -guard } else { guard };
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure of the spectrum of `M^{-1/2} K M^{-1/2}`.
    fn spectral_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.len() {
            let mi = self.mass[i].sqrt();
            let mut radius = 0.0;
            if i > 0 {
                radius += self.off[i - 1].abs() / (mi * self.mass[i - 1].sqrt());
            }
            if i + 1 < self.len() {
                radius += self.off[i].abs() / (mi * self.mass[i + 1].sqrt());
            }
            let centre = self.diag[i] / self.mass[i];
            lo = lo.min(centre - radius);
            hi = hi.max(centre + radius);
        }
        (lo, hi)
    }

    /// The `count` smallest generalized eigenvalues by Sturm bisection.
    pub fn smallest_eigenvalues(&self, count: usize) -> Vec<f64> {
        let count = count.min(self.len());
        if count == 0 {
            return Vec::new();
        }
        let (lo0, hi0) = self.spectral_bounds();
        let pad = 1e-9 * (hi0 - lo0).abs().max(1.0);
        (0..count)
            .map(|k| {
                let (mut lo, mut hi) = (lo0 - pad, hi0 + pad);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(1e-300) {
                        break;
                    }
                    if self.sturm_count(mid) > k {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }
}
