//! One-dimensional quadrature: adaptive Simpson with an evaluation budget and
//! fixed-order Gauss–Legendre panels.

use crate::error::{Error, Result};

/// Hard cap on integrand evaluations for a single adaptive Simpson call.
pub const MAX_EVALUATIONS: usize = 1 << 20;

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

struct Simpson<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    evaluations: usize,
    budget: usize,
    error: f64,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    fn eval(&mut self, x: f64) -> f64 {
        self.evaluations += 1;
        (self.f)(x)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Option<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        if self.evaluations + 2 > self.budget {
            return None;
        }
        let flm = self.eval(lm);
        let frm = self.eval(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            self.error += delta.abs() / 15.0;
            return Some(left + right + delta / 15.0);
        }
        let l = self.recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
        let r = self.recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
        Some(l + r)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// The interval is first split into `initial_panels` equal pieces so that
/// integrands with isolated features are not missed by the first estimate.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, initial_panels: usize) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) || !(tol > 0.0) {
        return Err(Error::domain(
            "adaptive_simpson",
            format!("bad interval [{a}, {b}] or tolerance {tol}"),
        ));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let panels = initial_panels.max(1);
    let mut state = Simpson {
        f: &f,
        evaluations: 0,
        budget: MAX_EVALUATIONS,
        error: 0.0,
    };
    let width = (b - a) / panels as f64;
    let panel_tol = tol / panels as f64;
    let mut total = 0.0;
    let mut fa = state.eval(a);
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { lo + width };
        let mid = 0.5 * (lo + hi);
        let fm = state.eval(mid);
        let fb = state.eval(hi);
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        let piece = state
            .recurse(lo, hi, fa, fm, fb, whole, panel_tol, 48)
            .ok_or_else(|| {
                Error::numeric(
                    "adaptive_simpson",
                    format!("evaluation budget of {MAX_EVALUATIONS} exhausted on [{a}, {b}]"),
                )
            })?;
        if !piece.is_finite() {
            return Err(Error::numeric(
                "adaptive_simpson",
                format!("non-finite integrand on [{lo}, {hi}]"),
            ));
        }
        total += piece;
        fa = fb;
    }
    Ok(Integral {
        value: total,
        error_estimate: state.error,
        evaluations: state.evaluations,
    })
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Five-point Gauss–Legendre rule applied on each interval between
/// consecutive `breakpoints`.
pub fn gauss_legendre_panels<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64]) -> f64 {
    breakpoints
        .windows(2)
        .map(|w| {
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[1] + w[0]);
            half * GL5_NODES
                .iter()
                .zip(GL5_WEIGHTS.iter())
                .map(|(x, wt)| wt * f(mid + half * x))
                .sum::<f64>()
        })
        .sum()
}
