//! Weighted composition operators `Tf = a * (f o phi)` on sampled spaces,
//! group words over generators, and convergence checkers for sequences of
//! such operators.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::OperatorError;
use crate::space::{indistinct, within, CompactSet, PointId, SampledSpace};

/// Image of each sample point; `None` when the image leaves the sampled
/// window.
pub type PointMap = Vec<Option<PointId>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedComposition {
    label: String,
    weight: Vec<f64>,
    forward: PointMap,
    backward: PointMap,
}

impl WeightedComposition {
    /// Validated constructor: positive finite weights and round trips that
    /// move no point by more than twice the resolution.
    pub fn new(
        space: &SampledSpace,
        label: &str,
        weight: Vec<f64>,
        forward: PointMap,
        backward: PointMap,
    ) -> Result<Self, OperatorError> {
        let op = Self::unchecked(label, weight, forward, backward);
        op.validate(space)?;
        Ok(op)
    }

    pub fn unchecked(label: &str, weight: Vec<f64>, forward: PointMap, backward: PointMap) -> Self {
        WeightedComposition { label: label.to_string(), weight, forward, backward }
    }

    pub fn identity(space: &SampledSpace) -> Self {
        let n = space.len();
        Self::unchecked("id", vec![1.0; n], (0..n).map(Some).collect(), (0..n).map(Some).collect())
    }

    pub fn validate(&self, space: &SampledSpace) -> Result<(), OperatorError> {
        let n = space.len();
        for len in [self.weight.len(), self.forward.len(), self.backward.len()] {
            if len != n {
                return Err(OperatorError::SizeMismatch { label: self.label.clone(), expected: n, got: len });
            }
        }
        if let Some(p) = self.weight.iter().position(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(OperatorError::BadWeight { label: self.label.clone(), point: p });
        }
        let bound = 2.0 * space.resolution();
        for (there, back) in [(&self.forward, &self.backward), (&self.backward, &self.forward)] {
            for p in 0..n {
                let Some(q) = there[p] else { continue };
                if q >= n {
                    return Err(OperatorError::Space(crate::error::SpaceError::UnknownPoint(q)));
                }
                if let Some(r) = back[q] {
                    let d = space.distance(p, r);
                    if !within(d, bound) {
                        return Err(OperatorError::RoundTrip { label: self.label.clone(), point: p, displacement: d });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = label.to_string();
        self
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    pub fn forward(&self) -> &PointMap {
        &self.forward
    }

    pub fn backward(&self) -> &PointMap {
        &self.backward
    }

    pub fn len(&self) -> usize {
        self.weight.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weight.is_empty()
    }

    /// `(Tf)(y) = a(y) f(phi(y))`; escaped images read `f = 0`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.forward
            .iter()
            .zip(&self.weight)
            .map(|(img, &a)| img.map_or(0.0, |q| a * f[q]))
            .collect()
    }

    pub fn sup_weight(&self) -> f64 {
        self.weight.iter().copied().fold(0.0, f64::max)
    }

    pub fn inf_weight(&self) -> f64 {
        self.weight.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_weight_one(&self, tol: f64) -> bool {
        self.weight.iter().all(|w| (w - 1.0).abs() <= tol)
    }

    /// Same weight and forward map.
    pub fn same_action(&self, other: &Self) -> bool {
        self.forward == other.forward && self.weight == other.weight
    }

    fn key(&self) -> (PointMap, Vec<u64>) {
        (self.forward.clone(), self.weight.iter().map(|w| w.to_bits()).collect())
    }
}

/// The product `hg`: `phi_hg = phi_g o phi_h`, `a_hg = a_h * (a_g o phi_h)`.
pub fn compose(h: &WeightedComposition, g: &WeightedComposition) -> Result<WeightedComposition, OperatorError> {
    if h.len() != g.len() {
        return Err(OperatorError::SizeMismatch { label: g.label.clone(), expected: h.len(), got: g.len() });
    }
    let n = h.len();
    let mut weight = Vec::with_capacity(n);
    let mut forward = Vec::with_capacity(n);
    let mut backward = Vec::with_capacity(n);
    for y in 0..n {
        match h.forward[y] {
            Some(z) => {
                weight.push(h.weight[y] * g.weight[z]);
                forward.push(g.forward[z]);
            }
            None => {
                weight.push(h.weight[y]);
                forward.push(None);
            }
        }
        backward.push(g.backward[y].and_then(|z| h.backward[z]));
    }
    Ok(WeightedComposition::unchecked(&format!("{}*{}", h.label, g.label), weight, forward, backward))
}

/// `g^-1 = (1 / a_g o phi_g^-1, phi_g^-1)`.
pub fn invert(g: &WeightedComposition) -> WeightedComposition {
    let weight = g.backward.iter().map(|b| b.map_or(1.0, |z| 1.0 / g.weight[z])).collect();
    WeightedComposition::unchecked(&format!("{}^-1", g.label), weight, g.backward.clone(), g.forward.clone())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub generators: Vec<WeightedComposition>,
    pub word_cap: usize,
    /// Declared relative SOT-closedness; reported, never proved.
    pub relatively_closed: bool,
}

impl GroupSpec {
    /// Appends the formal inverse of every generator not already present.
    pub fn new(
        generators: Vec<WeightedComposition>,
        word_cap: usize,
        relatively_closed: bool,
    ) -> Result<Self, OperatorError> {
        if word_cap < 1 {
            return Err(OperatorError::WordCap);
        }
        if let Some(first) = generators.first() {
            if let Some(bad) = generators.iter().find(|g| g.len() != first.len()) {
                return Err(OperatorError::SizeMismatch {
                    label: bad.label.clone(),
                    expected: first.len(),
                    got: bad.len(),
                });
            }
        }
        let mut all = generators.clone();
        for g in &generators {
            let inv = invert(g);
            if !all.iter().any(|h| h.same_action(&inv)) {
                all.push(inv);
            }
        }
        Ok(GroupSpec { generators: all, word_cap, relatively_closed })
    }

    pub fn trivial(_space: &SampledSpace) -> Self {
        GroupSpec { generators: vec![], word_cap: 1, relatively_closed: true }
    }

    pub fn validate(&self, space: &SampledSpace) -> Result<(), OperatorError> {
        if self.word_cap < 1 {
            return Err(OperatorError::WordCap);
        }
        for g in &self.generators {
            g.validate(space)?;
        }
        Ok(())
    }

    pub fn with_cap(&self, word_cap: usize) -> Self {
        GroupSpec { word_cap, ..self.clone() }
    }

    /// Distinct operators given by words of length at most `word_cap`, in
    /// breadth-first order (identity first).
    pub fn expand(&self, space: &SampledSpace) -> ExpandedGroup {
        let id = WeightedComposition::identity(space);
        let mut seen: HashMap<(PointMap, Vec<u64>), usize> = HashMap::new();
        seen.insert(id.key(), 0);
        let mut elements = vec![GroupElement { word: vec![], op: id }];
        let mut frontier = vec![0usize];
        let mut complete = self.generators.is_empty();
        for _ in 0..self.word_cap {
            let mut next = Vec::new();
            for &e in &frontier {
                for (gi, g) in self.generators.iter().enumerate() {
                    let op = compose(&elements[e].op, g).expect("generators share the space");
                    let key = op.key();
                    if seen.contains_key(&key) {
                        continue;
                    }
                    let mut word = elements[e].word.clone();
                    word.push(gi);
                    seen.insert(key, elements.len());
                    next.push(elements.len());
                    let label = word.iter().map(|&i| self.generators[i].label.as_str()).collect::<Vec<_>>().join("*");
                    elements.push(GroupElement { word, op: op.with_label(&label) });
                }
            }
            if next.is_empty() {
                complete = true;
                break;
            }
            frontier = next;
        }
        if !complete {
            // Closed exactly at the cap when no frontier word extends.
            complete = frontier.iter().all(|&e| {
                self.generators.iter().all(|g| {
                    seen.contains_key(&compose(&elements[e].op, g).expect("generators share the space").key())
                })
            });
        }
        ExpandedGroup { elements, word_cap: self.word_cap, complete }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    /// Generator indices, applied left to right.
    pub word: Vec<usize>,
    pub op: WeightedComposition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpandedGroup {
    pub elements: Vec<GroupElement>,
    pub word_cap: usize,
    /// True when the word set closed up before the cap was reached.
    pub complete: bool,
}

impl ExpandedGroup {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn ops(&self) -> impl Iterator<Item = &WeightedComposition> {
        self.elements.iter().map(|e| &e.op)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SotOptions {
    pub epsilon: f64,
    pub weight_bound: f64,
    /// Also test the inverse family for local equicontinuity.
    pub moreover: bool,
}

impl Default for SotOptions {
    fn default() -> Self {
        SotOptions { epsilon: 1e-3, weight_bound: 1e6, moreover: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SotWitness {
    /// 1-based position in the sequence.
    pub n: usize,
    pub compact: usize,
    pub point: PointId,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub pass: bool,
    pub witness: Option<SotWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactOutcome {
    pub compact: usize,
    pub label: String,
    pub onset_map: Option<usize>,
    pub onset_weight: Option<usize>,
    /// First index of the window on which the inverse condition is tested.
    pub tail_start: usize,
    pub map_uniform: bool,
    pub weight_uniform: bool,
    pub inverse_close: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoreoverReport {
    pub inverse_equicontinuous: bool,
    pub witness: Option<EquiWitness>,
    /// When the shortcut applies, condition (1) must imply condition (3).
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SotVerdict {
    pub sequence_length: usize,
    pub epsilon: f64,
    pub sup_weight: f64,
    pub map_uniform: ConditionReport,
    pub weight_uniform: ConditionReport,
    pub inverse_close: ConditionReport,
    pub compacts: Vec<CompactOutcome>,
    pub convergent: bool,
    pub moreover: Option<MoreoverReport>,
}

/// First index from which every later term is at most `eps`.
fn onset(values: &[f64], eps: f64) -> Option<usize> {
    let mut start = None;
    for (i, &v) in values.iter().enumerate().rev() {
        if within(v, eps) {
            start = Some(i);
        } else {
            break;
        }
    }
    start
}

struct Violation {
    n: usize,
    point: PointId,
    value: f64,
}

/// Sample-scale test of the three conditions characterising
/// `g_n -> g` in the strong operator topology.
///
/// For each compact `K` the map and weight conditions hold when the sup over
/// `K` is eventually at most `eps` within the sequence. The inverse condition
/// is tested on the window where both of those already hold, since a finite
/// sequence can only refute it after the others have settled.
pub fn check_sot_convergence(
    space: &SampledSpace,
    seq: &[WeightedComposition],
    limit: &WeightedComposition,
    compacts: &[CompactSet],
    opts: &SotOptions,
) -> Result<SotVerdict, OperatorError> {
    if seq.is_empty() {
        return Err(OperatorError::EmptyFamily);
    }
    limit.validate(space)?;
    let mut sup_weight = limit.sup_weight();
    for (i, g) in seq.iter().enumerate() {
        g.validate(space)?;
        let s = g.sup_weight().max(1.0 / g.inf_weight());
        if s > opts.weight_bound {
            return Err(OperatorError::Unbounded { member: i + 1, sup: s, bound: opts.weight_bound });
        }
        sup_weight = sup_weight.max(g.sup_weight());
    }
    let eps = opts.epsilon;
    let big = f64::INFINITY;
    let mut outcomes = Vec::new();
    let mut worst: [Option<(usize, usize, Violation)>; 3] = [None, None, None];
    let keep = |slot: usize, k: usize, v: Violation, worst: &mut [Option<(usize, usize, Violation)>; 3]| {
        let better = match &worst[slot] {
            None => true,
            Some((_, ck, cv)) => (v.n, k, v.point) < (cv.n, *ck, cv.point),
        };
        if better {
            worst[slot] = Some((slot, k, v));
        }
    };
    for (ki, k) in compacts.iter().enumerate() {
        let mut d1 = Vec::with_capacity(seq.len());
        let mut d2 = Vec::with_capacity(seq.len());
        let mut arg1 = Vec::with_capacity(seq.len());
        let mut arg2 = Vec::with_capacity(seq.len());
        for g in seq {
            let (mut m1, mut p1, mut m2, mut p2) = (0.0f64, k.members[0], 0.0f64, k.members[0]);
            for &t in &k.members {
                let d = match (g.forward[t], limit.forward[t]) {
                    (Some(a), Some(b)) => space.distance(a, b),
                    (None, None) => 0.0,
                    _ => big,
                };
                if d > m1 {
                    m1 = d;
                    p1 = t;
                }
                let w = (g.weight[t] - limit.weight[t]).abs();
                if w > m2 {
                    m2 = w;
                    p2 = t;
                }
            }
            d1.push(m1);
            arg1.push(p1);
            d2.push(m2);
            arg2.push(p2);
        }
        let on1 = onset(&d1, eps);
        let on2 = onset(&d2, eps);
        let last = seq.len() - 1;
        let tail = match (on1, on2) {
            (Some(a), Some(b)) => a.max(b),
            _ => last,
        };
        if on1.is_none() {
            keep(0, ki, Violation { n: last + 1, point: arg1[last], value: d1[last] }, &mut worst);
        }
        if on2.is_none() {
            keep(1, ki, Violation { n: last + 1, point: arg2[last], value: d2[last] }, &mut worst);
        }
        let mut pre_image = vec![false; space.len()];
        let pre_list: Vec<PointId> = k.members.iter().filter_map(|&t| limit.backward[t]).collect();
        for &p in &pre_list {
            pre_image[p] = true;
        }
        let mut close = true;
        'stage: for (n, g) in seq.iter().enumerate().skip(tail) {
            for &t in &k.members {
                let d = match g.backward[t] {
                    None => big,
                    Some(p) if pre_image[p] => 0.0,
                    Some(p) => pre_list.iter().map(|&q| space.distance(p, q)).fold(big, f64::min),
                };
                if !within(d, eps) {
                    close = false;
                    keep(2, ki, Violation { n: n + 1, point: t, value: d }, &mut worst);
                    break 'stage;
                }
            }
        }
        outcomes.push(CompactOutcome {
            compact: ki,
            label: k.label.clone(),
            onset_map: on1.map(|i| i + 1),
            onset_weight: on2.map(|i| i + 1),
            tail_start: tail + 1,
            map_uniform: on1.is_some(),
            weight_uniform: on2.is_some(),
            inverse_close: close,
        });
    }
    let report = |slot: usize, worst: &[Option<(usize, usize, Violation)>; 3]| ConditionReport {
        pass: worst[slot].is_none(),
        witness: worst[slot]
            .as_ref()
            .map(|(_, k, v)| SotWitness { n: v.n, compact: *k, point: v.point, value: v.value }),
    };
    let map_uniform = report(0, &worst);
    let weight_uniform = report(1, &worst);
    let inverse_close = report(2, &worst);
    let convergent = map_uniform.pass && weight_uniform.pass && inverse_close.pass;
    let moreover = if opts.moreover {
        let family: Vec<&PointMap> = seq.iter().map(|g| &g.backward).chain([&limit.backward]).collect();
        let mut witness = None;
        for k in compacts {
            let grid = ModuliGrid::default_for(space, k);
            let rep = check_local_equicontinuity(space, &family, k, &grid)?;
            if !rep.pass {
                witness = rep.rows.into_iter().find_map(|r| r.witness);
                break;
            }
        }
        let inverse_equicontinuous = witness.is_none();
        Some(MoreoverReport {
            inverse_equicontinuous,
            witness,
            consistent: !inverse_equicontinuous || !map_uniform.pass || inverse_close.pass,
        })
    } else {
        None
    };
    Ok(SotVerdict {
        sequence_length: seq.len(),
        epsilon: eps,
        sup_weight,
        map_uniform,
        weight_uniform,
        inverse_close,
        compacts: outcomes,
        convergent,
        moreover,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuliGrid {
    pub epsilons: Vec<f64>,
    pub deltas: Vec<f64>,
}

impl ModuliGrid {
    /// Epsilons 1/2, 1/4, 1/8 and dyadic deltas strictly above the smallest
    /// separation of `k`, so that every grid delta constrains some pair.
    pub fn default_for(space: &SampledSpace, k: &CompactSet) -> Self {
        let sep = space.separation(&k.members);
        let mut deltas: Vec<f64> = (1..128).map(|j| (-(j as f64)).exp2()).filter(|&d| d > sep).collect();
        if deltas.is_empty() {
            deltas.push(1.0);
        }
        // Tolerances at or below the sample spacing are not testable.
        let mut epsilons: Vec<f64> = [0.5, 0.25, 0.125].into_iter().filter(|&e| e > sep).collect();
        if epsilons.is_empty() {
            epsilons.push(deltas[0]);
        }
        ModuliGrid { epsilons, deltas }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquiWitness {
    pub member: usize,
    pub s: PointId,
    pub t: PointId,
    pub d_st: f64,
    pub d_images: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusRow {
    pub epsilon: f64,
    /// Largest grid delta valid for every member, if any.
    pub delta: Option<f64>,
    pub witness: Option<EquiWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquicontinuityReport {
    pub rows: Vec<ModulusRow>,
    pub pass: bool,
}

/// For each epsilon, the largest grid delta such that `d(s,t) < delta`
/// implies `d(gs, gt) < epsilon` for every member `g` and `s, t` in `k`.
/// When no grid delta works, the pair with the smallest distance whose images
/// separate by at least epsilon is returned.
pub fn check_local_equicontinuity(
    space: &SampledSpace,
    family: &[&PointMap],
    k: &CompactSet,
    grid: &ModuliGrid,
) -> Result<EquicontinuityReport, OperatorError> {
    if family.is_empty() {
        return Err(OperatorError::EmptyFamily);
    }
    let mut rows = Vec::new();
    for &eps in &grid.epsilons {
        let mut best: Option<EquiWitness> = None;
        for (a, &s) in k.members.iter().enumerate() {
            for &t in &k.members[a + 1..] {
                let d = space.distance(s, t);
                if best.as_ref().is_some_and(|b| d >= b.d_st) {
                    continue;
                }
                for (m, g) in family.iter().enumerate() {
                    let (Some(gs), Some(gt)) = (g[s], g[t]) else { continue };
                    let di = space.distance(gs, gt);
                    if !indistinct(di, eps) {
                        best = Some(EquiWitness { member: m, s, t, d_st: d, d_images: di });
                        break;
                    }
                }
            }
        }
        let limit = best.as_ref().map_or(f64::INFINITY, |b| b.d_st);
        let delta = grid.deltas.iter().copied().filter(|&d| within(d, limit)).fold(None, |acc: Option<f64>, d| {
            Some(acc.map_or(d, |a| a.max(d)))
        });
        let witness = if delta.is_none() { best } else { None };
        rows.push(ModulusRow { epsilon: eps, delta, witness });
    }
    let pass = rows.iter().all(|r| r.delta.is_some());
    Ok(EquicontinuityReport { rows, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseReport {
    pub pointwise: bool,
    pub pointwise_witness: Option<PointId>,
    pub sot: SotVerdict,
    /// Pointwise convergence and SOT convergence agree.
    pub equivalence_held: bool,
}

/// Under local equicontinuity of the group, pointwise convergence of the
/// maps is equivalent to SOT convergence. Checks the precondition on every
/// exhaustion set, then evaluates both sides.
pub fn pointwise_implies_sot(
    space: &SampledSpace,
    group: &GroupSpec,
    seq: &[WeightedComposition],
    limit: &WeightedComposition,
    opts: &SotOptions,
) -> Result<PointwiseReport, OperatorError> {
    if seq.is_empty() {
        return Err(OperatorError::EmptyFamily);
    }
    let expanded = group.expand(space);
    let family: Vec<&PointMap> = expanded
        .ops()
        .flat_map(|g| [&g.forward, &g.backward])
        .chain(seq.iter().flat_map(|g| [&g.forward, &g.backward]))
        .collect();
    let compacts = space.exhaustion_sets();
    for (ci, k) in compacts.iter().enumerate() {
        let rep = check_local_equicontinuity(space, &family, k, &ModuliGrid::default_for(space, k))?;
        if let Some(w) = rep.rows.iter().find_map(|r| r.witness.clone()) {
            return Err(OperatorError::NotEquicontinuous {
                compact: ci,
                member: w.member,
                s: w.s,
                t: w.t,
                d_st: w.d_st,
                d_images: w.d_images,
            });
        }
    }
    let mut pointwise_witness = None;
    for t in 0..space.len() {
        let d: Vec<f64> = seq
            .iter()
            .map(|g| match (g.forward[t], limit.forward[t]) {
                (Some(a), Some(b)) => space.distance(a, b),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            })
            .collect();
        if onset(&d, opts.epsilon).is_none() {
            pointwise_witness = Some(t);
            break;
        }
    }
    let sot = check_sot_convergence(space, seq, limit, &compacts, &SotOptions { moreover: false, ..*opts })?;
    let pointwise = pointwise_witness.is_none();
    Ok(PointwiseReport { pointwise, pointwise_witness, equivalence_held: pointwise == sot.convergent, sot })
}
