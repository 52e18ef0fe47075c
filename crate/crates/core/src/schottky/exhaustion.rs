use serde::Serialize;

use super::tree::{limit_set, LimitSetStop};
use super::{SchottkyData, SchottkyError, DEFAULT_NODE_BUDGET};

/// Boundary curves of `W_n`: `2g(2g-1)^n`. `None` on overflow.
pub fn boundary_curve_count(genus: usize, n: usize) -> Option<u128> {
    let g = genus as u128;
    (0..n).try_fold(2 * g, |acc, _| acc.checked_mul(2 * g - 1))
}

/// Fundamental-domain copies in `W_n`: `1 + Σ_{k<n} 2g(2g-1)^k`.
pub fn copy_count(genus: usize, n: usize) -> Option<u128> {
    (0..n).try_fold(1u128, |acc, k| acc.checked_add(boundary_curve_count(genus, k)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExhaustionLevel {
    pub n: usize,
    pub boundary_curves: u128,
    pub copies: u128,
    /// Radius extrema over the boundary circles of `W_n`, i.e. the image
    /// disks of word length `n + 1`.
    pub max_radius: f64,
    pub min_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExhaustionStats {
    pub genus: usize,
    pub levels: Vec<ExhaustionLevel>,
}

impl ExhaustionStats {
    pub fn boundary_curves(&self) -> Vec<u128> {
        self.levels.iter().map(|l| l.boundary_curves).collect()
    }

    pub fn copies(&self) -> Vec<u128> {
        self.levels.iter().map(|l| l.copies).collect()
    }
}

/// Counts for `n = 0..=n_max`, with radii read off a verified disk tree of
/// depth `n_max + 1`.
pub fn exhaustion_stats(s: &SchottkyData, n_max: usize) -> Result<ExhaustionStats, SchottkyError> {
    exhaustion_stats_with_budget(s, n_max, DEFAULT_NODE_BUDGET)
}

pub fn exhaustion_stats_with_budget(s: &SchottkyData, n_max: usize, budget: u64) -> Result<ExhaustionStats, SchottkyError> {
    let g = s.genus();
    let overflow = || SchottkyError::DepthLimit { requested: u128::MAX, budget };
    let needed = copy_count(g, n_max + 1).ok_or_else(overflow)? - 1;
    if needed > budget as u128 {
        return Err(SchottkyError::DepthLimit { requested: needed, budget });
    }
    let tree = limit_set(s, LimitSetStop::depth(n_max + 1).with_budget(budget))?;
    let levels = (0..=n_max)
        .map(|n| {
            let (min_radius, max_radius) = tree.radius_range(n + 1).unwrap_or((f64::NAN, f64::NAN));
            Ok(ExhaustionLevel {
                n,
                boundary_curves: boundary_curve_count(g, n).ok_or_else(overflow)?,
                copies: copy_count(g, n).ok_or_else(overflow)?,
                max_radius,
                min_radius,
            })
        })
        .collect::<Result<_, SchottkyError>>()?;
    Ok(ExhaustionStats { genus: g, levels })
}
