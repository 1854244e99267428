//! The one-parameter four-party family: `α = 7` on `∅` and `N`, `κ₁` on one-
//! and three-party subsets, `κ₂ = (−14 − 8κ₁)/6` on pairs. It is normalized
//! for every `κ₁` and admissible for `κ₁ ∈ [−7, 0]`.

use std::fmt::Write as _;

use super::search::{search, SearchConfig};
use crate::concurrence::{validate, CoefficientsAlpha, ConcurrenceSpec};
use crate::error::{Error, Result};

/// Bisection stops once the bracket is this narrow.
pub const BOUNDARY_RESOLUTION: f64 = 0.05;

pub fn kappa2(kappa1: f64) -> f64 {
    (-14.0 - 8.0 * kappa1) / 6.0
}

pub fn kappa_alpha(kappa1: f64) -> Result<CoefficientsAlpha> {
    let k2 = kappa2(kappa1);
    CoefficientsAlpha::from_size_fn(4, |k| match k {
        0 | 4 => 7.0,
        1 | 3 => kappa1,
        _ => k2,
    })
}

/// Errors with `InvalidSpec` outside `[−7, 0]`.
pub fn kappa_spec(kappa1: f64) -> Result<ConcurrenceSpec> {
    ConcurrenceSpec::from_alpha(kappa_alpha(kappa1)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KappaPoint {
    pub kappa1: f64,
    pub kappa2: f64,
    /// NaN when the point is not admissible and was not searched.
    pub min_gap: f64,
    pub violated: bool,
    pub admissible: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KappaScanResult {
    /// One entry per grid value, in grid order.
    pub points: Vec<KappaPoint>,
    /// Extra points evaluated while bisecting.
    pub refinements: Vec<KappaPoint>,
    /// Midpoint of the final bracket around the first violated to
    /// non-violated transition in increasing `κ₁`.
    pub boundary_estimate: Option<f64>,
}

impl KappaScanResult {
    pub fn kappa1_grid(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.kappa1).collect()
    }

    pub fn min_gap_per_point(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.min_gap).collect()
    }

    /// Grid and refinement rows, sorted by `κ₁`.
    pub fn to_csv(&self) -> String {
        let mut rows: Vec<&KappaPoint> = self.points.iter().chain(&self.refinements).collect();
        rows.sort_by(|a, b| a.kappa1.total_cmp(&b.kappa1));
        let mut out = String::from("kappa1,kappa2,min_gap,violated\n");
        for p in rows {
            writeln!(out, "{},{},{:.11e},{}", p.kappa1, p.kappa2, p.min_gap, p.violated).expect("string write");
        }
        out
    }
}

/// Runs the violation search at every grid value, then bisects the first
/// sign change to [`BOUNDARY_RESOLUTION`].
pub fn kappa_scan(grid: &[f64], dims: &[usize], cfg: &SearchConfig) -> Result<KappaScanResult> {
    if dims.len() != 4 {
        return Err(Error::dims(4, dims.len()));
    }
    if grid.iter().any(|k| !k.is_finite()) {
        return Err(Error::InvalidConfig("kappa grid must be finite".into()));
    }
    let points = grid
        .iter()
        .map(|&k| scan_point(k, dims, cfg))
        .collect::<Result<Vec<_>>>()?;

    let mut sorted: Vec<&KappaPoint> = points.iter().filter(|p| p.admissible).collect();
    sorted.sort_by(|a, b| a.kappa1.total_cmp(&b.kappa1));
    let bracket = sorted
        .windows(2)
        .find(|w| w[0].violated && !w[1].violated)
        .map(|w| (w[0].kappa1, w[1].kappa1));

    let mut refinements = Vec::new();
    let boundary_estimate = match bracket {
        None => None,
        Some((mut lo, mut hi)) => {
            while hi - lo > BOUNDARY_RESOLUTION {
                let mid = 0.5 * (lo + hi);
                let p = scan_point(mid, dims, cfg)?;
                if p.violated {
                    lo = mid;
                } else {
                    hi = mid;
                }
                refinements.push(p);
            }
            Some(0.5 * (lo + hi))
        }
    };
    Ok(KappaScanResult {
        points,
        refinements,
        boundary_estimate,
    })
}

fn scan_point(kappa1: f64, dims: &[usize], cfg: &SearchConfig) -> Result<KappaPoint> {
    let alpha = kappa_alpha(kappa1)?;
    let admissible = validate(&alpha).is_admissible();
    let (min_gap, violated) = if admissible {
        let spec = ConcurrenceSpec::from_alpha(alpha)?;
        let r = search(&spec, dims, cfg)?;
        (r.min_gap(), r.min_gap() < -cfg.tolerance)
    } else {
        (f64::NAN, false)
    };
    Ok(KappaPoint {
        kappa1,
        kappa2: kappa2(kappa1),
        min_gap,
        violated,
        admissible,
    })
}

/// `−7, −6.5, …, 0`.
pub fn default_kappa_grid() -> Vec<f64> {
    (0..=14).map(|i| -7.0 + 0.5 * i as f64).collect()
}
