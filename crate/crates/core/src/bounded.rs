//! Bounded groups of lattice isomorphisms. With `m(t) = inf_g a_g(t)` and
//! `m_G = 1/m`, the norm `||x||_G = sup_g ||g x||` equals `||m_G x||_inf`,
//! and `M_{m_G} g M_{m_G}^-1` is an isometry for every `g`.

use serde::{Deserialize, Serialize};

use crate::error::BoundedError;
use crate::operators::{ExpandedGroup, GroupSpec, WeightedComposition};
use crate::space::{PointId, SampledSpace};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedSettings {
    /// Largest admissible `sup a_g` over the enumerated words.
    pub weight_bound: f64,
    /// Oscillation of `m` at the finest sample scale that counts as a jump.
    pub jump_threshold: f64,
}

impl Default for BoundedSettings {
    fn default() -> Self {
        BoundedSettings { weight_bound: 1e6, jump_threshold: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discontinuity {
    pub point: PointId,
    pub label: String,
    pub neighbour: PointId,
    pub distance: f64,
    pub jump: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    /// Non-isolated points examined.
    pub checked: usize,
    pub flagged: Vec<Discontinuity>,
    pub continuous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedGroupNorm {
    pub m: Vec<f64>,
    pub m_g: Vec<f64>,
    /// Max over words of `sup a_g`.
    pub c_g: f64,
    pub word_cap: usize,
    pub words: usize,
    pub complete: bool,
    pub continuity: ContinuityReport,
    #[serde(skip)]
    elements: Vec<WeightedComposition>,
}

impl BoundedGroupNorm {
    pub fn elements(&self) -> &[WeightedComposition] {
        &self.elements
    }
}

/// Checks `sup a_g <= bound` over the expanded words.
pub fn check_bounded(ex: &ExpandedGroup, bound: f64) -> Result<f64, BoundedError> {
    let sup = ex.ops().map(WeightedComposition::sup_weight).fold(0.0, f64::max);
    if !(sup <= bound) {
        return Err(BoundedError::Unbounded { cap: ex.word_cap, sup, bound });
    }
    Ok(sup)
}

/// At a non-isolated `t`, the largest `|m(s) - m(t)|` over the points `s`
/// at the smallest positive distance from `t`.
pub fn continuity_report(space: &SampledSpace, m: &[f64], threshold: f64) -> ContinuityReport {
    let mut checked = 0;
    let mut flagged = Vec::new();
    for t in (0..space.len()).filter(|&t| !space.is_isolated(t)) {
        checked += 1;
        let finest = (0..space.len())
            .filter(|&s| s != t)
            .map(|s| space.distance(s, t))
            .filter(|&d| d > 0.0)
            .fold(f64::INFINITY, f64::min);
        let worst = (0..space.len())
            .filter(|&s| s != t && space.distance(s, t) <= finest)
            .map(|s| (s, (m[s] - m[t]).abs()))
            .fold(None, |best: Option<(PointId, f64)>, (s, j)| match best {
                Some((_, bj)) if bj >= j => best,
                _ => Some((s, j)),
            });
        if let Some((s, jump)) = worst.filter(|&(_, j)| j >= threshold) {
            flagged.push(Discontinuity {
                point: t,
                label: space.label(t).to_string(),
                neighbour: s,
                distance: finest,
                jump,
            });
        }
    }
    ContinuityReport { checked, continuous: flagged.is_empty(), flagged }
}

pub fn m_weight(space: &SampledSpace, group: &GroupSpec, settings: &BoundedSettings) -> Result<BoundedGroupNorm, BoundedError> {
    group.validate(space)?;
    let ex = group.expand(space);
    let c_g = check_bounded(&ex, settings.weight_bound)?;
    let mut m = vec![f64::INFINITY; space.len()];
    for op in ex.ops() {
        for (mt, &a) in m.iter_mut().zip(op.weight()) {
            *mt = mt.min(a);
        }
    }
    let m_g = m.iter().map(|v| 1.0 / v).collect();
    let continuity = continuity_report(space, &m, settings.jump_threshold);
    Ok(BoundedGroupNorm {
        m,
        m_g,
        c_g,
        word_cap: ex.word_cap,
        words: ex.len(),
        complete: ex.complete,
        continuity,
        elements: ex.elements.into_iter().map(|e| e.op).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupNormValue {
    /// `||m_G x||_inf`.
    pub value: f64,
    /// `max_g ||g x||_inf` over the enumerated words.
    pub direct: f64,
    pub sup_norm: f64,
}

pub fn group_norm(x: &[f64], bgn: &BoundedGroupNorm) -> GroupNormValue {
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let weighted: Vec<f64> = x.iter().zip(&bgn.m_g).map(|(a, b)| a * b).collect();
    GroupNormValue {
        value: sup(&weighted),
        direct: bgn.elements.iter().map(|g| sup(&g.apply(x))).fold(0.0, f64::max),
        sup_norm: sup(x),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conjugated {
    pub op: WeightedComposition,
    /// `max |a'(t) - 1|` over points with a sampled image.
    pub weight_deviation: f64,
    pub warnings: Vec<String>,
}

/// `M_{m_G} g M_{m_G}^-1`, with weight `a_g(t) m(phi t) / m(t)`.
pub fn conjugate(g: &WeightedComposition, bgn: &BoundedGroupNorm) -> Conjugated {
    let mut weight = g.weight().to_vec();
    let mut dev: f64 = 0.0;
    for (t, w) in weight.iter_mut().enumerate() {
        if let Some(q) = g.forward()[t] {
            *w *= bgn.m[q] / bgn.m[t];
            dev = dev.max((*w - 1.0).abs());
        }
    }
    let warnings = bgn
        .continuity
        .flagged
        .iter()
        .map(|d| format!("m_G jumps by {} at {}", d.jump, d.label))
        .collect();
    Conjugated {
        op: WeightedComposition::unchecked(
            &format!("phi({})", g.label()),
            weight,
            g.forward().clone(),
            g.backward().clone(),
        ),
        weight_deviation: dev,
        warnings,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapStep {
    pub cap: usize,
    pub words: usize,
    pub min_m: f64,
    pub c_g: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapTrace {
    pub steps: Vec<CapStep>,
    /// `m` never increases pointwise as the cap grows.
    pub monotone: bool,
}

pub fn cap_trace(space: &SampledSpace, group: &GroupSpec, caps: &[usize], settings: &BoundedSettings) -> Result<CapTrace, BoundedError> {
    let mut steps = Vec::new();
    let mut prev: Option<Vec<f64>> = None;
    let mut monotone = true;
    for &cap in caps {
        let b = m_weight(space, &group.with_cap(cap), settings)?;
        if let Some(p) = &prev {
            monotone &= b.m.iter().zip(p).all(|(a, b)| a <= b);
        }
        steps.push(CapStep {
            cap,
            words: b.words,
            min_m: b.m.iter().copied().fold(f64::INFINITY, f64::min),
            c_g: b.c_g,
        });
        prev = Some(b.m);
    }
    Ok(CapTrace { steps, monotone })
}
