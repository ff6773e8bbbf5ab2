//! Concrete operators and groups: rotations, translations, flips, scalings,
//! the shift family on the remark25 space and the swap group on onepoint01N.

use std::collections::HashMap;
use std::f64::consts::TAU;

use crate::operators::{GroupSpec, PointMap, WeightedComposition};
use crate::space::{onepoint_point, PointId, SampledSpace};

fn coord_key(c: &[f64]) -> Vec<u64> {
    c.iter().map(|x| if *x == 0.0 { 0 } else { x.to_bits() }).collect()
}

/// Resolves an image coordinate to a sample point: exact coordinate match
/// first, nearest point within the resolution otherwise.
struct Resolver<'a> {
    space: &'a SampledSpace,
    exact: HashMap<Vec<u64>, PointId>,
}

impl<'a> Resolver<'a> {
    fn new(space: &'a SampledSpace) -> Self {
        let exact = (0..space.len()).map(|p| (coord_key(space.coords(p)), p)).collect();
        Resolver { space, exact }
    }

    fn resolve(&self, c: &[f64]) -> Option<PointId> {
        self.exact.get(&coord_key(c)).copied().or_else(|| self.space.nearest(c))
    }
}

/// Weight-one operator from a coordinate map and its inverse.
pub fn coordinate_operator(
    space: &SampledSpace,
    label: &str,
    f: impl Fn(&[f64]) -> Vec<f64>,
    finv: impl Fn(&[f64]) -> Vec<f64>,
) -> WeightedComposition {
    let r = Resolver::new(space);
    let forward: PointMap = (0..space.len()).map(|p| r.resolve(&f(space.coords(p)))).collect();
    let backward: PointMap = (0..space.len()).map(|p| r.resolve(&finv(space.coords(p)))).collect();
    WeightedComposition::unchecked(label, vec![1.0; space.len()], forward, backward)
}

/// Index of the circle factor's point count, read from the first
/// coordinate's grid on circle and circle_x_interval samples.
fn circle_points(space: &SampledSpace) -> usize {
    let mut angles: Vec<u64> = (0..space.len()).map(|p| space.coords(p)[0].to_bits()).collect();
    angles.sort_unstable();
    angles.dedup();
    angles.len()
}

/// Rotation of the angle coordinate by `steps` grid steps.
pub fn rotation_steps(space: &SampledSpace, steps: i64) -> WeightedComposition {
    let n = circle_points(space) as i64;
    let step = TAU / n as f64;
    let idx = |a: f64| (a / step).round() as i64;
    let rot = move |c: &[f64], k: i64| {
        let mut out = c.to_vec();
        out[0] = (idx(c[0]) + k).rem_euclid(n) as f64 * step;
        out
    };
    coordinate_operator(space, &format!("rot{steps}"), |c| rot(c, steps), |c| rot(c, -steps))
}

/// Rotation by an arbitrary angle, resolved to the nearest sample.
pub fn rotation_by_angle(space: &SampledSpace, angle: f64) -> WeightedComposition {
    let rot = |c: &[f64], a: f64| {
        let mut out = c.to_vec();
        out[0] = (c[0] + a).rem_euclid(TAU);
        out
    };
    coordinate_operator(space, &format!("rot({angle})"), |c| rot(c, angle), |c| rot(c, -angle))
}

/// The cyclic group of rotations by multiples of `2 pi / q`. The word cap
/// `q / 2` reaches every element using the generator and its inverse.
pub fn rotation_group(space: &SampledSpace, q: usize) -> GroupSpec {
    let n = circle_points(space);
    assert!(q > 0 && n.is_multiple_of(q), "rotation group order must divide the circle sample");
    let r = rotation_steps(space, (n / q) as i64).with_label("r");
    GroupSpec::new(vec![r], (q / 2).max(1), true).expect("valid generator")
}

/// `theta -> theta + 1/n` for `n = 1..=count`.
pub fn rotation_sequence(space: &SampledSpace, count: usize) -> Vec<WeightedComposition> {
    (1..=count).map(|n| rotation_by_angle(space, 1.0 / n as f64).with_label(&format!("rot(1/{n})"))).collect()
}

/// Translation of the first coordinate by `c`.
pub fn translation(space: &SampledSpace, c: f64) -> WeightedComposition {
    let shift = |x: &[f64], a: f64| {
        let mut out = x.to_vec();
        out[0] += a;
        out
    };
    coordinate_operator(space, &format!("shift({c})"), |x| shift(x, c), |x| shift(x, -c))
}

/// `(theta, s) -> (theta, 1 - s)` on circle_x_interval.
pub fn interval_flip(space: &SampledSpace) -> WeightedComposition {
    let flip = |x: &[f64]| {
        let mut out = x.to_vec();
        let last = out.len() - 1;
        out[last] = 1.0 - out[last];
        out
    };
    coordinate_operator(space, "flip", flip, flip)
}

/// Multiplication by a positive constant.
pub fn scale(space: &SampledSpace, factor: f64) -> WeightedComposition {
    let id = WeightedComposition::identity(space);
    WeightedComposition::unchecked(
        &format!("scale({factor})"),
        vec![factor; space.len()],
        id.forward().clone(),
        id.backward().clone(),
    )
}

/// Member `n` of the remark25 family: shifts the column `(0, i)`, `i >= n`,
/// up by one, feeds `(n, n)` into `(0, n)` and pulls row `n` down.
pub fn remark25_map(space: &SampledSpace, n: usize) -> WeightedComposition {
    let nf = n as f64;
    let f = move |c: &[f64]| -> Vec<f64> {
        let (a, b) = (c[0], c[1]);
        if a == 0.0 && b >= nf {
            vec![0.0, b + 1.0]
        } else if a == nf && b == nf {
            vec![0.0, nf]
        } else if a == nf && b > nf {
            vec![nf, b - 1.0]
        } else {
            c.to_vec()
        }
    };
    let finv = move |c: &[f64]| -> Vec<f64> {
        let (a, b) = (c[0], c[1]);
        if a == 0.0 && b > nf {
            vec![0.0, b - 1.0]
        } else if a == 0.0 && b == nf {
            vec![nf, nf]
        } else if a == nf && b >= nf {
            vec![nf, b + 1.0]
        } else {
            c.to_vec()
        }
    };
    coordinate_operator(space, &format!("phi{n}"), f, finv)
}

/// The first `count` members of the remark25 family. Members with
/// `n > n_max` move only points outside the window and act as the identity
/// on the sample.
pub fn remark25_family(space: &SampledSpace, count: usize) -> Vec<WeightedComposition> {
    (1..=count).map(|n| remark25_map(space, n)).collect()
}

/// The witness function: 1 on the `a = 0` column, 0 elsewhere.
pub fn remark25_witness(space: &SampledSpace) -> Vec<f64> {
    (0..space.len()).map(|p| if space.coords(p)[0] == 0.0 { 1.0 } else { 0.0 }).collect()
}

/// Swap of `(0, n)` and `(1, n)` with weight 2 at `(0, n)` and 1/2 at
/// `(1, n)`.
pub fn onepoint_swap(space: &SampledSpace, n: usize) -> WeightedComposition {
    let p0 = onepoint_point(space, 0, Some(n)).expect("level inside the sample");
    let p1 = onepoint_point(space, 1, Some(n)).expect("level inside the sample");
    let mut weight = vec![1.0; space.len()];
    weight[p0] = 2.0;
    weight[p1] = 0.5;
    let mut map: PointMap = (0..space.len()).map(Some).collect();
    map.swap(p0, p1);
    WeightedComposition::unchecked(&format!("g{n}"), weight, map.clone(), map)
}

/// The bounded group generated by all swaps `g_1..g_{n_max}`.
pub fn onepoint_group(space: &SampledSpace, n_max: usize, word_cap: usize) -> GroupSpec {
    let gens = (1..=n_max).map(|n| onepoint_swap(space, n)).collect();
    GroupSpec::new(gens, word_cap, true).expect("valid generators")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{builtin_space, remark25_point, BuiltinSpace};

    #[test]
    fn remark25_map_matches_listing() {
        let s = builtin_space(&BuiltinSpace::Remark25 { n_max: 6 }).unwrap();
        let p = |a, b| remark25_point(&s, a, b).unwrap();
        let g = remark25_map(&s, 3);
        g.validate(&s).unwrap();
        assert_eq!(g.forward()[p(0, Some(3))], Some(p(0, Some(4))));
        assert_eq!(g.forward()[p(0, Some(2))], Some(p(0, Some(2))));
        assert_eq!(g.forward()[p(3, Some(3))], Some(p(0, Some(3))));
        assert_eq!(g.forward()[p(3, Some(5))], Some(p(3, Some(4))));
        assert_eq!(g.forward()[p(3, Some(2))], Some(p(3, Some(2))));
        assert_eq!(g.forward()[p(2, Some(5))], Some(p(2, Some(5))));
        assert_eq!(g.forward()[p(0, None)], Some(p(0, None)));
        // (0, 7) is outside the window and resolves to (0, inf).
        assert_eq!(g.forward()[p(0, Some(6))], Some(p(0, None)));
        assert_eq!(g.backward()[p(0, Some(3))], Some(p(3, Some(3))));
        assert_eq!(g.backward()[p(3, Some(6))], None);
    }

    #[test]
    fn witness_moves_by_one() {
        let s = builtin_space(&BuiltinSpace::Remark25 { n_max: 10 }).unwrap();
        let x = remark25_witness(&s);
        for g in remark25_family(&s, 10) {
            let y = g.apply(&x);
            let d = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert_eq!(d, 1.0);
        }
    }

    #[test]
    fn rotation_steps_is_a_permutation() {
        let s = builtin_space(&BuiltinSpace::CircleXInterval { circle_points: 24, interval_points: 5 }).unwrap();
        let r = rotation_steps(&s, 2);
        r.validate(&s).unwrap();
        let mut img: Vec<_> = r.forward().iter().map(|p| p.unwrap()).collect();
        img.sort_unstable();
        assert_eq!(img, (0..s.len()).collect::<Vec<_>>());
        let f = interval_flip(&s);
        f.validate(&s).unwrap();
        assert!(f.forward().iter().all(|p| p.is_some()));
    }
}
