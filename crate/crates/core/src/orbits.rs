//! Orbit closures of the group action on points and tuples, sample-scale
//! equivalence, nowhere-density and the greedy choice of base points with
//! disjoint orbit closures.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{OrbitError, SpaceError};
use crate::operators::GroupSpec;
use crate::space::{indistinct, within, PointId, SampledSpace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitClosure {
    pub base: Vec<PointId>,
    /// Breadth-first order; the base comes first.
    pub samples: Vec<Vec<PointId>>,
    pub word_cap: usize,
    pub hull_tolerance: f64,
    /// Generator images that left the sampled window.
    pub escaped: usize,
    /// True when no new sample appeared before the cap.
    pub saturated: bool,
}

impl OrbitClosure {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Index of a sample within the hull tolerance of `s`.
    pub fn position(&self, space: &SampledSpace, s: &[PointId]) -> Option<usize> {
        if let Some(i) = self.samples.iter().position(|x| x.as_slice() == s) {
            return Some(i);
        }
        self.samples.iter().position(|x| indistinct(space.tuple_distance(x, s), self.hull_tolerance))
    }

    pub fn contains(&self, space: &SampledSpace, s: &[PointId]) -> bool {
        self.position(space, s).is_some()
    }
}

fn check_points(space: &SampledSpace, t: &[PointId]) -> Result<(), OrbitError> {
    match t.iter().find(|&&p| p >= space.len()) {
        Some(&p) => Err(OrbitError::Space(SpaceError::UnknownPoint(p))),
        None => Ok(()),
    }
}

/// Images of `t` under words of length at most `cap`, deduplicated at twice
/// the resolution.
pub fn orbit_closure(
    space: &SampledSpace,
    group: &GroupSpec,
    t: &[PointId],
    cap: usize,
) -> Result<OrbitClosure, OrbitError> {
    check_points(space, t)?;
    let tol = space.tolerance();
    let mut samples = vec![t.to_vec()];
    let mut exact: HashSet<Vec<PointId>> = HashSet::from([t.to_vec()]);
    let mut frontier = vec![0usize];
    let mut escaped = 0;
    let mut saturated = group.generators.is_empty();
    for _ in 0..cap {
        let mut next = Vec::new();
        for &i in &frontier {
            for g in &group.generators {
                let img: Option<Vec<PointId>> = samples[i].iter().map(|&p| g.forward()[p]).collect();
                let Some(img) = img else {
                    escaped += 1;
                    continue;
                };
                if exact.contains(&img) {
                    continue;
                }
                if samples.iter().any(|x| indistinct(space.tuple_distance(x, &img), tol)) {
                    continue;
                }
                exact.insert(img.clone());
                next.push(samples.len());
                samples.push(img);
            }
        }
        if next.is_empty() {
            saturated = true;
            break;
        }
        frontier = next;
    }
    if !saturated {
        // Closed exactly at the cap when no frontier sample extends.
        saturated = frontier.iter().all(|&i| {
            group.generators.iter().all(|g| match samples[i].iter().map(|&p| g.forward()[p]).collect::<Option<Vec<_>>>() {
                Some(img) => exact.contains(&img) || samples.iter().any(|x| indistinct(space.tuple_distance(x, &img), tol)),
                None => true,
            })
        });
    }
    Ok(OrbitClosure { base: t.to_vec(), samples, word_cap: cap, hull_tolerance: tol, escaped, saturated })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equivalence {
    /// `s` lies in the sampled closure of the orbit of `t`.
    pub holds: bool,
    /// `t` lies in the sampled closure of the orbit of `s`.
    pub reverse: bool,
    /// The two one-sided tests disagree (a resolution artifact).
    pub disagreement: bool,
}

/// `s ~ t` iff `s` lies in the orbit closure of `t`; the reverse inclusion
/// is tested too and any disagreement reported.
pub fn equivalent(
    space: &SampledSpace,
    group: &GroupSpec,
    s: &[PointId],
    t: &[PointId],
    cap: usize,
    tol: f64,
) -> Result<Equivalence, OrbitError> {
    if s.len() != t.len() {
        return Err(OrbitError::LengthMismatch(s.len(), t.len()));
    }
    let near = |orbit: &OrbitClosure, x: &[PointId]| {
        orbit.samples.iter().any(|y| y.as_slice() == x || indistinct(space.tuple_distance(y, x), tol))
    };
    let holds = near(&orbit_closure(space, group, t, cap)?, s);
    let reverse = near(&orbit_closure(space, group, s, cap)?, t);
    Ok(Equivalence { holds, reverse, disagreement: holds != reverse })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NowhereDenseVerdict {
    pub pass: bool,
    pub probe_radius: f64,
    pub balls_checked: usize,
    /// Centre of the first ball covered by the fattened orbit.
    pub covered_ball: Option<PointId>,
}

/// No ball of `probe_radius` around a sample point is covered by the orbit
/// sample fattened by the resolution. Orbits of single points only.
pub fn nowhere_dense_check(
    orbit: &OrbitClosure,
    space: &SampledSpace,
    probe_radius: f64,
) -> Result<NowhereDenseVerdict, OrbitError> {
    if orbit.base.len() != 1 {
        return Err(OrbitError::LengthMismatch(orbit.base.len(), 1));
    }
    let res = space.resolution();
    let covered: Vec<bool> = (0..space.len())
        .map(|p| orbit.samples.iter().any(|x| within(space.distance(p, x[0]), res)))
        .collect();
    for c in 0..space.len() {
        let full = (0..space.len()).filter(|&p| within(space.distance(c, p), probe_radius)).all(|p| covered[p]);
        if full {
            return Ok(NowhereDenseVerdict { pass: false, probe_radius, balls_checked: c + 1, covered_ball: Some(c) });
        }
    }
    Ok(NowhereDenseVerdict { pass: true, probe_radius, balls_checked: space.len(), covered_ball: None })
}

/// Farthest-point ordering of the sample starting at point 0; ties go to
/// the lowest id. Used as the dense reference sequence.
pub struct ReferenceSequence<'a> {
    space: &'a SampledSpace,
    gap: Vec<f64>,
    started: bool,
}

impl<'a> ReferenceSequence<'a> {
    pub fn new(space: &'a SampledSpace) -> Self {
        ReferenceSequence { space, gap: vec![f64::INFINITY; space.len()], started: false }
    }
}

impl Iterator for ReferenceSequence<'_> {
    type Item = PointId;

    fn next(&mut self) -> Option<PointId> {
        let next = if self.started {
            let mut best = 0;
            for p in 1..self.gap.len() {
                if self.gap[p] > self.gap[best] {
                    best = p;
                }
            }
            if self.gap[best] == 0.0 {
                return None;
            }
            best
        } else {
            self.started = true;
            0
        };
        for p in 0..self.gap.len() {
            self.gap[p] = self.gap[p].min(self.space.distance(next, p));
        }
        Some(next)
    }
}

pub fn reference_sequence(space: &SampledSpace, count: usize) -> Vec<PointId> {
    ReferenceSequence::new(space).take(count).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    /// 1-based position in the reference sequence.
    pub step: usize,
    pub reference: PointId,
    /// `None` when the reference point already lies in an earlier orbit
    /// closure and no admissible point is within the radius.
    pub chosen: Option<PointId>,
    pub distance: Option<f64>,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseSelection {
    pub points: Vec<PointId>,
    pub audit: Vec<SelectionStep>,
    pub tolerance: f64,
}

/// Greedy choice of `count` base points with disjoint orbit closures.
///
/// Step `k` picks the point nearest to the reference point `s_k` within
/// `max(2^-k, resolution)` that avoids the orbit closures of earlier choices
/// fattened by twice the resolution. A reference point that is itself inside
/// such a closure and has no admissible neighbour is skipped: its
/// neighbourhood is already represented by an earlier orbit.
pub fn select_dense_points(
    space: &SampledSpace,
    group: &GroupSpec,
    cap: usize,
    count: usize,
) -> Result<DenseSelection, OrbitError> {
    let tol = space.tolerance();
    let mut forbidden = vec![false; space.len()];
    let mut points = Vec::new();
    let mut audit = Vec::new();
    let mut refs = ReferenceSequence::new(space).enumerate();
    while points.len() < count {
        let Some((k, s)) = refs.next() else {
            return Err(OrbitError::ResolutionTooCoarse(audit.len() + 1));
        };
        let step = k + 1;
        let radius = (-(step as f64)).exp2().max(space.resolution());
        let mut best: Option<(f64, PointId)> = None;
        for c in 0..space.len() {
            if forbidden[c] {
                continue;
            }
            let d = space.distance(s, c);
            if within(d, radius) && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, c));
            }
        }
        let Some((d, c)) = best else {
            if forbidden[s] {
                audit.push(SelectionStep { step, reference: s, chosen: None, distance: None, radius });
                continue;
            }
            return Err(OrbitError::ResolutionTooCoarse(step));
        };
        points.push(c);
        audit.push(SelectionStep { step, reference: s, chosen: Some(c), distance: Some(d), radius });
        let orbit = orbit_closure(space, group, &[c], cap)?;
        for x in &orbit.samples {
            for p in 0..space.len() {
                if !forbidden[p] && indistinct(space.distance(p, x[0]), tol) {
                    forbidden[p] = true;
                }
            }
        }
    }
    Ok(DenseSelection { points, audit, tolerance: tol })
}
