use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::FamilyError;
use crate::so3::Vec3;
use crate::tolerance::ALGEBRAIC;
use crate::trace::{SpectrumCase, TraceShape};

/// Warping directions `u_q` and, for each member `q`, the comparison subset `Q_q`
/// (never containing `q` itself) used by the refined switching rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpingDirections {
    directions: Vec<Vec3>,
    subsets: Vec<Vec<usize>>,
}

impl WarpingDirections {
    pub fn new(directions: Vec<Vec3>, subsets: Vec<Vec<usize>>) -> Result<Self, FamilyError> {
        let n = directions.len();
        if n < 2 || subsets.len() != n {
            return Err(FamilyError::InvalidDirections(format!(
                "{n} directions with {} subsets",
                subsets.len()
            )));
        }
        if let Some(u) = directions.iter().find(|u| (u.norm() - 1.0).abs() > ALGEBRAIC) {
            return Err(FamilyError::InvalidDirections(format!("direction {u:?} is not unit")));
        }
        for (q, sub) in subsets.iter().enumerate() {
            if sub.is_empty() || sub.iter().any(|&p| p >= n || p == q) {
                return Err(FamilyError::InvalidDirections(format!("bad subset {sub:?} for member {q}")));
            }
        }
        Ok(Self { directions, subsets })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn direction(&self, q: usize) -> Vec3 {
        self.directions[q]
    }

    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    /// `Q_q`.
    pub fn subset(&self, q: usize) -> &[usize] {
        &self.subsets[q]
    }

    /// `U_q`.
    pub fn subset_directions(&self, q: usize) -> Vec<Vec3> {
        self.subsets[q].iter().map(|&p| self.directions[p]).collect()
    }
}

/// Direction design for each multiplicity case.
///
/// Indexing: item 1 `[v₁, −v₁, v₂, −v₂, v₃, −v₃]`; item 2 `[v₁, −v₁, v₂, −v₂]`;
/// item 3 `u_n = v₁ cos(nπ/3) + v₂ sin(nπ/3)`, `n = 0..6`; items 4–5 `[u, −u]`.
pub fn select_directions(shape: &TraceShape) -> Result<WarpingDirections, FamilyError> {
    let tag = shape.tag();
    let [v1, v2, v3] = tag.basis;
    let orthogonal_subsets = |dirs: &[Vec3]| -> Vec<Vec<usize>> {
        (0..dirs.len())
            .map(|q| {
                (0..dirs.len())
                    .filter(|&p| p != q && dirs[p].dot(&dirs[q]).abs() <= ALGEBRAIC)
                    .collect()
            })
            .collect()
    };
    match tag.case {
        SpectrumCase::AllEqual => {
            let dirs = vec![v1, -v1, v2, -v2, v3, -v3];
            let subsets = orthogonal_subsets(&dirs);
            WarpingDirections::new(dirs, subsets)
        }
        SpectrumCase::TwoLargeEqualPosMin => {
            let dirs = vec![v1, -v1, v2, -v2];
            let subsets = orthogonal_subsets(&dirs);
            WarpingDirections::new(dirs, subsets)
        }
        SpectrumCase::TwoLargeEqualAnyMin => {
            let dirs: Vec<Vec3> = (0..6)
                .map(|n| {
                    let (s, c) = (n as f64 * PI / 3.0).sin_cos();
                    (v1 * c + v2 * s).normalized().unwrap_or(v1)
                })
                .collect();
            // −u_q sits three steps away, the two neighbours at ±60° have u_pᵀu_q = ½
            let subsets = (0..6).map(|q| vec![(q + 1) % 6, (q + 3) % 6, (q + 5) % 6]).map(sorted).collect();
            WarpingDirections::new(dirs, subsets)
        }
        SpectrumCase::TwoSmallEqual => {
            let ratio = tag.lambda_g[2] / tag.lambda_g[1];
            let sin2 = 0.5 * ratio.min(1.0);
            let (s, c) = (sin2.sqrt(), (1.0 - sin2).sqrt());
            let u = (v3 * c + v1 * s).normalized().unwrap_or(v3);
            WarpingDirections::new(vec![u, -u], vec![vec![1], vec![0]])
        }
        SpectrumCase::AllDistinct => {
            let u = search_distinct_direction(shape)?;
            WarpingDirections::new(vec![u, -u], vec![vec![1], vec![0]])
        }
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Maximise `min(Δ(v₂, u), Δ(v₃, u))` over a 1° grid on the hemisphere around `v₃`.
fn search_distinct_direction(shape: &TraceShape) -> Result<Vec3, FamilyError> {
    let [b1, b2, b3] = shape.tag().basis;
    let deg = PI / 180.0;
    let mut best = (f64::NEG_INFINITY, b3);
    for pol in 0..=90 {
        let (sp, cp) = (pol as f64 * deg).sin_cos();
        let n_az = if pol == 0 { 1 } else { 360 };
        for az in 0..n_az {
            let (sa, ca) = (az as f64 * deg).sin_cos();
            let u = (b1 * (sp * ca) + b2 * (sp * sa) + b3 * cp).normalized().unwrap_or(b3);
            let score = shape.delta_vu(&b2, &u)?.min(shape.delta_vu(&b3, &u)?);
            if score > best.0 {
                best = (score, u);
            }
        }
    }
    if best.0 > 0.0 {
        Ok(best.1)
    } else {
        Err(FamilyError::DirectionSearchFailed(best.0))
    }
}
