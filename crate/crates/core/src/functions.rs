//! Sampled test functions: random sums of tents and their Lipschitz
//! constants on the sample.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::space::{PointId, SampledSpace};

/// `x(p) = sum_j h_j (1 - d(p, c_j) / r_j)_+`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TentSum {
    pub centers: Vec<PointId>,
    pub heights: Vec<f64>,
    pub radii: Vec<f64>,
}

impl TentSum {
    pub fn eval(&self, space: &SampledSpace) -> Vec<f64> {
        (0..space.len())
            .map(|p| {
                self.centers
                    .iter()
                    .zip(&self.heights)
                    .zip(&self.radii)
                    .map(|((&c, &h), &r)| h * (1.0 - space.distance(p, c) / r).max(0.0))
                    .sum()
            })
            .collect()
    }

    /// `sum_j |h_j| / r_j`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.heights.iter().zip(&self.radii).map(|(h, r)| h.abs() / r).sum()
    }
}

/// Between 1 and `max_tents` tents with random centres, heights in
/// `[-1, 1]` and radii in `radius_range`.
pub fn random_tents<R: Rng>(space: &SampledSpace, rng: &mut R, max_tents: usize, radius_range: (f64, f64)) -> TentSum {
    let k = rng.gen_range(1..=max_tents.max(1));
    let mut t = TentSum { centers: vec![], heights: vec![], radii: vec![] };
    for _ in 0..k {
        t.centers.push(rng.gen_range(0..space.len()));
        t.heights.push(rng.gen_range(-1.0..=1.0));
        t.radii.push(rng.gen_range(radius_range.0..=radius_range.1));
    }
    t
}

/// `max |x(p) - x(q)| / d(p, q)` over all sample pairs.
pub fn lipschitz(space: &SampledSpace, x: &[f64]) -> f64 {
    let mut best: f64 = 0.0;
    for p in 0..space.len() {
        for q in p + 1..space.len() {
            let d = space.distance(p, q);
            if d > 0.0 {
                best = best.max((x[p] - x[q]).abs() / d);
            }
        }
    }
    best
}
