//! Closed minimal hypersurfaces Γ ⊂ S^(n−1) used as cone links, with their
//! Jacobi spectra `J_Γ f = −Δ_Γ f − |A_Γ|² f`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when merging numerically equal eigenvalues into one level.
pub const LEVEL_MERGE_TOLERANCE: f64 = 1e-9;

/// Volume ω_k of the unit k-sphere.
pub fn sphere_volume(k: i64) -> Result<f64> {
    if k < 0 {
        return Err(Error::domain("sphere_volume", format!("negative dimension {k}")));
    }
    let mut even = 2.0;
    let mut odd = 2.0 * PI;
    if k == 0 {
        return Ok(even);
    }
    if k == 1 {
        return Ok(odd);
    }
    for j in 2..=k {
        if j % 2 == 0 {
            even = 2.0 * PI * even / (j as f64 - 1.0);
        } else {
            odd = 2.0 * PI * odd / (j as f64 - 1.0);
        }
    }
    Ok(if k % 2 == 0 { even } else { odd })
}

fn binomial(n: i64, k: i64) -> u64 {
    if k < 0 || n < k || n < 0 {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Multiplicity of the degree-`a` eigenspace of the Laplacian on the round `S^p`.
pub fn harmonic_multiplicity(p: usize, a: usize) -> u64 {
    let (p, a) = (p as i64, a as i64);
    binomial(a + p, p) - binomial(a + p - 2, p)
}

/// One eigenvalue level with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub eigenvalue: f64,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LinkKind {
    /// Totally geodesic great sphere S^(n−2).
    Equator,
    /// Clifford product S^p(√(p/(n−2))) × S^q(√(q/(n−2))).
    Clifford { p: usize, q: usize },
    /// User-supplied link; the listed levels are trusted as given.
    Raw { levels: Vec<Level> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalLink {
    /// The link lives in S^(ambient_dimension − 1).
    pub ambient_dimension: usize,
    pub kind: LinkKind,
    /// Volume |Γ|.
    pub volume: f64,
    /// The constant |A_Γ|².
    pub shape_norm_sq: f64,
    pub label: String,
}

/// The lowest Jacobi eigenvalue levels of a link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiSpectrum {
    pub levels: Vec<Level>,
    pub count: usize,
    pub link_label: String,
}

impl JacobiSpectrum {
    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.levels.iter().map(|l| l.eigenvalue)
    }
}

/// On-disk record for a user-supplied link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLinkRecord {
    pub ambient_n: usize,
    pub volume: f64,
    pub shape_norm_sq: f64,
    /// `[value, multiplicity]` pairs in ascending order.
    pub eigenvalues: Vec<(f64, u64)>,
}

impl MinimalLink {
    pub fn equator(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain("equator", format!("ambient dimension {n} < 3")));
        }
        Ok(Self {
            ambient_dimension: n,
            kind: LinkKind::Equator,
            volume: sphere_volume(n as i64 - 2)?,
            shape_norm_sq: 0.0,
            label: "equator".into(),
        })
    }

    pub fn clifford(n: usize, p: usize) -> Result<Self> {
        if n < 4 || p < 1 || p + 3 > n {
            return Err(Error::domain(
                "clifford",
                format!("need n ≥ 4 and 1 ≤ p ≤ n−3, got n={n}, p={p}"),
            ));
        }
        let q = n - 2 - p;
        let (r1, r2) = Self::clifford_radii_of(n, p);
        let volume = sphere_volume(p as i64)? * r1.powi(p as i32) * sphere_volume(q as i64)? * r2.powi(q as i32);
        Ok(Self {
            ambient_dimension: n,
            kind: LinkKind::Clifford { p, q },
            volume,
            shape_norm_sq: n as f64 - 2.0,
            label: format!("clifford:{p}"),
        })
    }

    fn clifford_radii_of(n: usize, p: usize) -> (f64, f64) {
        let d = n as f64 - 2.0;
        ((p as f64 / d).sqrt(), ((d - p as f64) / d).sqrt())
    }

    /// Radii of the two sphere factors for a Clifford link.
    pub fn clifford_radii(&self) -> Option<(f64, f64)> {
        match self.kind {
            LinkKind::Clifford { p, .. } => Some(Self::clifford_radii_of(self.ambient_dimension, p)),
            _ => None,
        }
    }

    /// A link given by explicit data; only structural consistency is checked.
    pub fn raw(
        ambient_n: usize,
        volume: f64,
        shape_norm_sq: f64,
        levels: Vec<Level>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let bad = |detail: String| Err(Error::Parse(detail));
        if ambient_n < 3 {
            return bad(format!("ambient_n must be at least 3, got {ambient_n}"));
        }
        if !(volume > 0.0 && volume.is_finite()) {
            return bad(format!("volume must be positive and finite, got {volume}"));
        }
        if !(shape_norm_sq >= 0.0 && shape_norm_sq.is_finite()) {
            return bad(format!("shape_norm_sq must be non-negative, got {shape_norm_sq}"));
        }
        if levels.is_empty() {
            return bad("eigenvalue list is empty".into());
        }
        for (i, l) in levels.iter().enumerate() {
            if !l.eigenvalue.is_finite() {
                return bad(format!("eigenvalue #{i} is not finite"));
            }
            if l.multiplicity == 0 {
                return bad(format!("eigenvalue #{i} has zero multiplicity"));
            }
        }
        if levels.windows(2).any(|w| w[1].eigenvalue <= w[0].eigenvalue) {
            return bad("eigenvalues must be strictly ascending".into());
        }
        let first = levels[0].eigenvalue;
        if (first + shape_norm_sq).abs() > LEVEL_MERGE_TOLERANCE * shape_norm_sq.max(1.0) {
            return bad(format!(
                "first eigenvalue {first} must equal −shape_norm_sq = {}",
                -shape_norm_sq
            ));
        }
        Ok(Self {
            ambient_dimension: ambient_n,
            kind: LinkKind::Raw { levels },
            volume,
            shape_norm_sq,
            label: label.into(),
        })
    }

    /// Decodes a raw-link JSON record.
    pub fn from_json(text: &str, label: impl Into<String>) -> Result<Self> {
        let record: RawLinkRecord =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("raw link: {e}")))?;
        let levels = record
            .eigenvalues
            .iter()
            .map(|&(eigenvalue, multiplicity)| Level {
                eigenvalue,
                multiplicity,
            })
            .collect();
        Self::raw(
            record.ambient_n,
            record.volume,
            record.shape_norm_sq,
            levels,
            label,
        )
    }

    pub fn is_totally_geodesic(&self) -> bool {
        self.shape_norm_sq == 0.0
    }

    /// First Jacobi eigenvalue λ₁(Γ) = −|A_Γ|² (the constant mode).
    pub fn first_eigenvalue(&self) -> f64 {
        match &self.kind {
            LinkKind::Raw { levels } => levels[0].eigenvalue,
            // + 0.0 turns −0 into 0 for totally geodesic links
            _ => -self.shape_norm_sq + 0.0,
        }
    }

    /// `4 λ₁(Γ) + (n−2)(n−4)`; a non-negative margin makes the cone stable.
    pub fn stability_margin(&self) -> f64 {
        let n = self.ambient_dimension as f64;
        4.0 * self.first_eigenvalue() + (n - 2.0) * (n - 4.0)
    }

    /// The lowest `count` distinct Jacobi levels with multiplicities.
    pub fn jacobi_spectrum(&self, count: usize) -> Result<JacobiSpectrum> {
        if count == 0 {
            return Err(Error::domain("jacobi_spectrum", "count must be at least 1"));
        }
        let levels = match &self.kind {
            LinkKind::Equator => self.equator_levels(count),
            LinkKind::Clifford { .. } => {
                let mut cutoff = count.max(2);
                loop {
                    if let Some(levels) = self.clifford_levels(count, cutoff) {
                        break levels;
                    }
                    cutoff *= 2;
                }
            }
            LinkKind::Raw { levels } => {
                if levels.len() < count {
                    return Err(Error::domain(
                        "jacobi_spectrum",
                        format!(
                            "raw link '{}' lists {} levels, {count} requested",
                            self.label,
                            levels.len()
                        ),
                    ));
                }
                levels[..count].to_vec()
            }
        };
        Ok(JacobiSpectrum {
            levels,
            count,
            link_label: self.label.clone(),
        })
    }

    /// Clifford levels enumerated over `a, b ≤ cutoff`.
    ///
    /// Returns `None` unless the cutoff is proven sufficient: every excluded
    /// lattice point has `a > cutoff` or `b > cutoff`, and the level sum is
    /// increasing in each index, so it is enough that both frontier values
    /// exceed the largest returned level.
    pub fn jacobi_spectrum_with_cutoff(&self, count: usize, cutoff: usize) -> Option<JacobiSpectrum> {
        let levels = match &self.kind {
            LinkKind::Clifford { .. } => self.clifford_levels(count, cutoff)?,
            _ => return self.jacobi_spectrum(count).ok(),
        };
        Some(JacobiSpectrum {
            levels,
            count,
            link_label: self.label.clone(),
        })
    }

    fn equator_levels(&self, count: usize) -> Vec<Level> {
        let n = self.ambient_dimension;
        (0..count)
            .map(|l| Level {
                eigenvalue: (l * (l + n - 3)) as f64,
                multiplicity: harmonic_multiplicity(n - 2, l),
            })
            .collect()
    }

    fn clifford_value(&self, a: usize, b: usize) -> f64 {
        let LinkKind::Clifford { p, q } = self.kind else {
            unreachable!()
        };
        let d = self.ambient_dimension as f64 - 2.0;
        let (a, b) = (a as f64, b as f64);
        d * (a * (a + p as f64 - 1.0) / p as f64 + b * (b + q as f64 - 1.0) / q as f64 - 1.0)
    }

    fn clifford_levels(&self, count: usize, cutoff: usize) -> Option<Vec<Level>> {
        let LinkKind::Clifford { p, q } = self.kind else {
            return None;
        };
        let mut raw: Vec<(f64, u64)> = Vec::with_capacity((cutoff + 1) * (cutoff + 1));
        for a in 0..=cutoff {
            for b in 0..=cutoff {
                let mult = harmonic_multiplicity(p, a) * harmonic_multiplicity(q, b);
                raw.push((self.clifford_value(a, b), mult));
            }
        }
        raw.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut levels: Vec<Level> = Vec::new();
        for (value, mult) in raw {
            match levels.last_mut() {
                Some(last)
                    if (value - last.eigenvalue).abs()
                        <= LEVEL_MERGE_TOLERANCE * value.abs().max(1.0) =>
                {
                    last.multiplicity += mult
                }
                _ => levels.push(Level {
                    eigenvalue: value,
                    multiplicity: mult,
                }),
            }
        }
        if levels.len() < count {
            return None;
        }
        levels.truncate(count);
        let top = levels.last().unwrap().eigenvalue;
        let frontier = self
            .clifford_value(cutoff + 1, 0)
            .min(self.clifford_value(0, cutoff + 1));
        (frontier > top + LEVEL_MERGE_TOLERANCE * top.abs().max(1.0)).then_some(levels)
    }
}
