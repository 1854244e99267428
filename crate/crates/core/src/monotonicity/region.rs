//! Classification of the tripartite coefficient simplex
//! `p₊₋₋ + p₋₊₋ + p₋₋₊ = 3`.
//!
//! At `N = 3` every nontrivial `α_V` equals some `α_{k}` by complement
//! symmetry, so `α ≤ 0` reduces to three triangle inequalities and the
//! single-element counterexample covers the rest.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Slack on the triangle inequalities.
pub const REGION_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct RegionPoint {
    /// `(p₊₋₋, p₋₊₋, p₋₋₊)`.
    pub p: [f64; 3],
    pub admissible: bool,
    pub monotone: bool,
}

impl RegionPoint {
    pub fn classify(p: [f64; 3]) -> Self {
        let admissible = p.iter().all(|&v| v >= -REGION_TOL);
        Self {
            p,
            admissible,
            monotone: admissible && triangle_inequalities(p),
        }
    }
}

/// `p_j + p_k ≥ p_i` for every `i`, which is `α_{i} ≤ 0`.
pub fn triangle_inequalities(p: [f64; 3]) -> bool {
    (0..3).all(|i| {
        let others: f64 = (0..3).filter(|&j| j != i).map(|j| p[j]).sum();
        others - p[i] >= -REGION_TOL
    })
}

/// Lattice with `resolution + 1` points along each edge, `C(resolution + 2, 2)`
/// points in total.
pub fn tripartite_region(resolution: usize) -> Result<Vec<RegionPoint>> {
    if resolution < 2 {
        return Err(Error::InvalidConfig(format!(
            "resolution must be >= 2, got {resolution}"
        )));
    }
    let step = 3.0 / resolution as f64;
    let mut out = Vec::with_capacity((resolution + 1) * (resolution + 2) / 2);
    for i in 0..=resolution {
        for j in 0..=resolution - i {
            let k = resolution - i - j;
            out.push(RegionPoint::classify([
                i as f64 * step,
                j as f64 * step,
                k as f64 * step,
            ]));
        }
    }
    Ok(out)
}

pub fn region_to_csv(points: &[RegionPoint]) -> String {
    let mut out = String::from("p1,p2,p3,admissible,monotone\n");
    for pt in points {
        writeln!(
            out,
            "{},{},{},{},{}",
            pt.p[0], pt.p[1], pt.p[2], pt.admissible, pt.monotone
        )
        .expect("string write");
    }
    out
}
