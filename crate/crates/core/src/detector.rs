//! Isometry detection for the renormed space: a weighted composition is an
//! isometry only if its weight is 1 and it carries every tuple of base
//! points to a tuple with the same dual fingerprint `a(t)`.

use serde::{Deserialize, Serialize};

use crate::error::NormError;
use crate::norm::{dual_norm_delta, unit_vector, RenormConfig};
use crate::operators::WeightedComposition;
use crate::space::{within, PointId};
use crate::tuples::TupleIndex;

/// Tolerance on solved fingerprint vectors.
pub const FINGERPRINT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedInG,
    Rejected,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightReport {
    pub weight_ok: bool,
    /// `max |a(p) - 1|` over points off the base orbits.
    pub max_deviation: f64,
    pub witness: Option<PointId>,
    pub points_checked: usize,
    /// Per base point: its image stays on its own orbit.
    pub orbit_preserved: Vec<bool>,
}

/// For an isometry `T = a (f o phi)`, `a(p) = |||delta_p|||^* / |||delta_{phi p}|||^*`,
/// and both duals are 1 off the base orbits.
pub fn check_weight_one(op: &WeightedComposition, cfg: &RenormConfig) -> WeightReport {
    let mut max_deviation: f64 = 0.0;
    let mut witness = None;
    let mut checked = 0;
    for p in 0..cfg.space().len() {
        let Some(q) = op.forward()[p] else { continue };
        if cfg.locate(p).is_some() || cfg.locate(q).is_some() {
            continue;
        }
        checked += 1;
        let implied = dual_norm_delta(p, cfg) / dual_norm_delta(q, cfg);
        let dev = (op.weight()[p] - implied).abs();
        if dev > max_deviation {
            max_deviation = dev;
            witness = Some(p);
        }
    }
    let orbit_preserved = (1..=cfg.depth())
        .map(|i| {
            let p = cfg.point(i, 0).expect("base point");
            op.forward()[p].is_some_and(|q| cfg.locate(q).is_some_and(|(j, _)| j == i))
        })
        .collect();
    WeightReport {
        weight_ok: max_deviation <= FINGERPRINT_TOL,
        max_deviation,
        witness,
        points_checked: checked,
        orbit_preserved,
    }
}

/// `a(t)`; for a single slot, `(1 / lambda_i)`.
pub fn fingerprint(t: &TupleIndex, cfg: &RenormConfig) -> Result<Vec<f64>, NormError> {
    unit_vector(t, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// The image resolved to a registered class.
    Class,
    /// A single slot left every base orbit; its dual norm is 1.
    OffOrbit,
    /// The image has slots on foreign orbits; decided by single-slot tests.
    Foreign,
    /// The operator leaves the sampled window on the tuple.
    Escaped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TupleTest {
    pub start: u64,
    pub len: u64,
    pub image: Option<Vec<PointId>>,
    pub fingerprint: Vec<f64>,
    pub image_fingerprint: Option<Vec<f64>>,
    pub route: Route,
    pub mismatch: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordMatch {
    pub element: usize,
    pub word: String,
    /// Max displacement between `phi` and the word on the base points.
    pub base_distance: f64,
    /// Max displacement on the whole sample.
    pub sample_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RejectionWitness {
    Weight { point: PointId, weight: f64, implied: f64 },
    Fingerprint { start: u64, len: u64, image: Vec<PointId>, expected: Vec<f64>, found: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryVerdict {
    pub operator: String,
    pub weight: WeightReport,
    pub tuples: Vec<TupleTest>,
    pub approx_group_element: Option<WordMatch>,
    pub verdict: Verdict,
    pub witness: Option<RejectionWitness>,
}

fn differs(a: &[f64], b: &[f64]) -> bool {
    a.len() != b.len() || a.iter().zip(b).any(|(x, y)| (x - y).abs() > FINGERPRINT_TOL)
}

fn image_of(op: &WeightedComposition, pts: &[PointId]) -> Option<Vec<PointId>> {
    pts.iter().map(|&p| op.forward()[p]).collect()
}

/// Fingerprint of the image tuple `s` of `t` and how it was obtained.
fn image_fingerprint(t: &TupleIndex, s: &[PointId], cfg: &RenormConfig) -> Result<(Option<Vec<f64>>, Route), NormError> {
    if s.len() == 1 {
        return Ok((Some(vec![dual_norm_delta(s[0], cfg)]), if cfg.locate(s[0]).is_some() { Route::Class } else { Route::OffOrbit }));
    }
    let Some(st) = cfg.resolve(t.start(), s) else {
        return Ok((None, Route::Foreign));
    };
    Ok((Some(fingerprint(&st, cfg)?), Route::Class))
}

/// Tests the tuples `(t_i^0, .., t_{i+n}^0)`, `i + n <= test_depth`
/// (single slots included), then looks for a word within the tolerance
/// of `phi` on the whole sample.
pub fn certify(op: &WeightedComposition, cfg: &RenormConfig, test_depth: u64) -> Result<IsometryVerdict, NormError> {
    let weight = check_weight_one(op, cfg);
    let mut witness = weight.witness.filter(|_| !weight.weight_ok).map(|p| RejectionWitness::Weight {
        point: p,
        weight: op.weight()[p],
        implied: dual_norm_delta(p, cfg) / dual_norm_delta(op.forward()[p].expect("checked point"), cfg),
    });
    let top = test_depth.min(cfg.depth());
    let mut tuples = Vec::new();
    for len in 1..=top {
        for start in 1..=top + 1 - len {
            let t = TupleIndex { index: crate::tuples::ConsecutiveIndex { start, len }, gammas: vec![0; len as usize] };
            let pts = cfg.tuple_points(&t)?;
            let fp = if len == 1 { vec![1.0 / cfg.params().lambda(start)] } else { fingerprint(&t, cfg)? };
            let image = image_of(op, &pts);
            let (image_fp, route) = match &image {
                None => (None, Route::Escaped),
                Some(s) => image_fingerprint(&t, s, cfg)?,
            };
            let mismatch = image_fp.as_ref().is_some_and(|f| differs(&fp, f));
            if mismatch && witness.is_none() {
                witness = Some(RejectionWitness::Fingerprint {
                    start,
                    len,
                    image: image.clone().expect("image exists"),
                    expected: fp.clone(),
                    found: image_fp.clone().expect("fingerprint exists"),
                });
            }
            tuples.push(TupleTest { start, len, image, fingerprint: fp, image_fingerprint: image_fp, route, mismatch });
        }
    }

    let tol = cfg.space().tolerance();
    let mut best: Option<WordMatch> = None;
    for (e, el) in cfg.expanded().elements.iter().enumerate() {
        let g = el.op.forward();
        let gap = |ps: &mut dyn Iterator<Item = PointId>| {
            ps.map(|p| match (op.forward()[p], g[p]) {
                (Some(a), Some(b)) => cfg.space().distance(a, b),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
        };
        let sample_distance = gap(&mut (0..cfg.space().len()));
        if best.as_ref().is_none_or(|b| sample_distance < b.sample_distance) {
            best = Some(WordMatch {
                element: e,
                word: el.op.label().to_string(),
                base_distance: gap(&mut cfg.base_points().iter().copied()),
                sample_distance,
            });
        }
    }
    let matched = best.as_ref().is_some_and(|b| within(b.sample_distance, tol));
    let verdict = if witness.is_some() {
        Verdict::Rejected
    } else if matched {
        Verdict::CertifiedInG
    } else {
        Verdict::Inconclusive
    };
    Ok(IsometryVerdict { operator: op.label().to_string(), weight, tuples, approx_group_element: best, verdict, witness })
}

/// Re-evaluates a rejection witness from scratch.
pub fn recheck(w: &RejectionWitness, op: &WeightedComposition, cfg: &RenormConfig) -> Result<bool, NormError> {
    match w {
        RejectionWitness::Weight { point, .. } => {
            let Some(q) = op.forward()[*point] else { return Ok(false) };
            let implied = dual_norm_delta(*point, cfg) / dual_norm_delta(q, cfg);
            Ok((op.weight()[*point] - implied).abs() > FINGERPRINT_TOL)
        }
        RejectionWitness::Fingerprint { start, len, image, .. } => {
            let t = TupleIndex { index: crate::tuples::ConsecutiveIndex { start: *start, len: *len }, gammas: vec![0; *len as usize] };
            let pts = cfg.tuple_points(&t)?;
            if image_of(op, &pts).as_deref() != Some(image.as_slice()) {
                return Ok(false);
            }
            let fp = if *len == 1 { vec![1.0 / cfg.params().lambda(*start)] } else { fingerprint(&t, cfg)? };
            let (found, _) = image_fingerprint(&t, image, cfg)?;
            Ok(found.is_some_and(|f| differs(&fp, &f)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::norm::RenormSettings;
    use crate::operators::{compose, GroupSpec};
    use crate::space::{builtin_space, BuiltinSpace};

    fn line_cfg() -> RenormConfig {
        let s = builtin_space(&BuiltinSpace::Line { resolution: 0.01, half_width: 10.0 }).unwrap();
        let g = GroupSpec::trivial(&s);
        RenormConfig::build(s, g, &RenormSettings { depth: 5, ..Default::default() }).unwrap()
    }

    fn rot_cfg() -> RenormConfig {
        let s = builtin_space(&BuiltinSpace::CircleXInterval { circle_points: 48, interval_points: 11 }).unwrap();
        let g = gallery::rotation_group(&s, 6);
        RenormConfig::build(s, g, &RenormSettings { depth: 4, gamma_cap: 6, ..Default::default() }).unwrap()
    }

    #[test]
    fn identity_certified() {
        let cfg = line_cfg();
        let id = WeightedComposition::identity(cfg.space());
        let v = certify(&id, &cfg, 5).unwrap();
        assert_eq!(v.verdict, Verdict::CertifiedInG);
        assert!(v.weight.orbit_preserved.iter().all(|&b| b));
    }

    #[test]
    fn scaling_rejected_by_weight() {
        let cfg = line_cfg();
        let s = gallery::scale(cfg.space(), 1.2);
        let w = check_weight_one(&s, &cfg);
        assert!((w.max_deviation - 0.2).abs() < 1e-12);
        let v = certify(&s, &cfg, 5).unwrap();
        assert_eq!(v.verdict, Verdict::Rejected);
        assert!(recheck(v.witness.as_ref().unwrap(), &s, &cfg).unwrap());
    }

    #[test]
    fn translation_rejected_by_fingerprint() {
        let cfg = line_cfg();
        let t = gallery::translation(cfg.space(), 0.3);
        let w = check_weight_one(&t, &cfg);
        assert!(w.weight_ok);
        let v = certify(&t, &cfg, 5).unwrap();
        assert_eq!(v.verdict, Verdict::Rejected);
        let wit = v.witness.clone().unwrap();
        assert!(matches!(wit, RejectionWitness::Fingerprint { .. }));
        assert!(recheck(&wit, &t, &cfg).unwrap());
        assert_eq!(certify(&t, &cfg, 5).unwrap(), v);
    }

    #[test]
    fn group_words_certified_and_flip_rejected() {
        let cfg = rot_cfg();
        for el in &cfg.expanded().elements {
            let v = certify(&el.op, &cfg, 4).unwrap();
            assert_eq!(v.verdict, Verdict::CertifiedInG, "{}", el.op.label());
        }
        let r = &cfg.group().generators[0];
        let f = gallery::interval_flip(cfg.space());
        let rf = compose(r, &f).unwrap();
        let v = certify(&rf, &cfg, 4).unwrap();
        assert_eq!(v.verdict, Verdict::Rejected);
        assert!(recheck(v.witness.as_ref().unwrap(), &rf, &cfg).unwrap());
    }

    #[test]
    fn fingerprints_are_class_functions() {
        let cfg = rot_cfg();
        let t = TupleIndex::new(1, vec![0, 0, 0]).unwrap();
        let g = &cfg.group().generators[0];
        let img: Vec<PointId> = cfg.tuple_points(&t).unwrap().iter().map(|&p| g.forward()[p].unwrap()).collect();
        let gt = cfg.resolve(1, &img).unwrap();
        assert_eq!(fingerprint(&gt, &cfg).unwrap(), fingerprint(&t, &cfg).unwrap());
        let other = TupleIndex::new(1, vec![0, 1, 0]).unwrap();
        let (a, b) = (fingerprint(&t, &cfg).unwrap(), fingerprint(&other, &cfg).unwrap());
        assert!(differs(&a, &b));
    }
}
