//! Finite samples of locally compact metric spaces.
//!
//! A [`SampledSpace`] stores point coordinates, a closed-form or tabulated
//! metric, a nested compact exhaustion and a resolution. Every tolerance used
//! elsewhere in the crate is a multiple of the resolution.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SpaceError;

pub type PointId = usize;

/// Relative slack applied to tolerance comparisons so that grid distances
/// equal to a multiple of the step do not flip on rounding.
const SLACK: f64 = 1e-9;

/// `d < tol`, robust to rounding at exact grid multiples.
pub fn indistinct(d: f64, tol: f64) -> bool {
    d < tol * (1.0 - SLACK)
}

/// `d <= delta`, robust to rounding at exact grid multiples.
pub fn within(d: f64, delta: f64) -> bool {
    d <= delta * (1.0 + SLACK)
}

/// Closed-form metrics on point coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Metric {
    Euclidean { dim: usize },
    /// Arc length on the unit circle; one angle coordinate.
    Circle,
    /// Pairs `(a, b)`: `2^-min(b, d)` on the `a = 0` column, `1` otherwise.
    Remark25,
    /// Pairs `(i, k)` plus a point at infinity stored as `k = inf`.
    OnePoint01N,
    /// Tabulated matrix; the single coordinate is the row index.
    Explicit { size: usize, entries: Vec<f64> },
    /// Max metric over factors with concatenated coordinates.
    Max { factors: Vec<Metric> },
}

impl Metric {
    pub fn dim(&self) -> usize {
        match self {
            Metric::Euclidean { dim } => *dim,
            Metric::Circle | Metric::Explicit { .. } => 1,
            Metric::Remark25 | Metric::OnePoint01N => 2,
            Metric::Max { factors } => factors.iter().map(Metric::dim).sum(),
        }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean { dim } => {
                if *dim == 1 {
                    (a[0] - b[0]).abs()
                } else {
                    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
                }
            }
            Metric::Circle => {
                let d = (a[0] - b[0]).abs() % TAU;
                d.min(TAU - d)
            }
            Metric::Remark25 => {
                if a[0] == b[0] && a[1] == b[1] {
                    0.0
                } else if a[0].max(b[0]) >= 1.0 {
                    1.0
                } else {
                    (-a[1].min(b[1])).exp2()
                }
            }
            Metric::OnePoint01N => {
                if a[0] == b[0] && a[1] == b[1] {
                    0.0
                } else {
                    (-a[1].min(b[1])).exp2()
                }
            }
            Metric::Explicit { size, entries } => entries[a[0] as usize * size + b[0] as usize],
            Metric::Max { factors } => {
                let mut off = 0;
                let mut best = 0.0f64;
                for f in factors {
                    let k = f.dim();
                    best = best.max(f.distance(&a[off..off + k], &b[off..off + k]));
                    off += k;
                }
                best
            }
        }
    }
}

/// Serialized form of a space; validated into a [`SampledSpace`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDocument {
    pub name: String,
    pub labels: Vec<String>,
    #[serde(with = "coord_serde")]
    pub coords: Vec<Vec<f64>>,
    pub metric: Metric,
    pub exhaustion: Vec<Vec<PointId>>,
    pub resolution: f64,
    pub isolated: Vec<bool>,
}

/// Coordinates may be infinite; JSON has no infinity, so those are written as
/// the strings `"inf"` and `"-inf"`.
mod coord_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Coord {
        Num(f64),
        Text(String),
    }

    fn encode(x: f64) -> Coord {
        if x == f64::INFINITY {
            Coord::Text("inf".into())
        } else if x == f64::NEG_INFINITY {
            Coord::Text("-inf".into())
        } else {
            Coord::Num(x)
        }
    }

    pub fn serialize<S: Serializer>(v: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<Vec<Coord>> = v.iter().map(|c| c.iter().map(|&x| encode(x)).collect()).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
        let raw: Vec<Vec<Coord>> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|c| {
                c.into_iter()
                    .map(|x| match x {
                        Coord::Num(v) => Ok(v),
                        Coord::Text(t) if t == "inf" => Ok(f64::INFINITY),
                        Coord::Text(t) if t == "-inf" => Ok(f64::NEG_INFINITY),
                        Coord::Text(t) => Err(serde::de::Error::custom(format!("bad coordinate {t:?}"))),
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceDocument", into = "SpaceDocument")]
pub struct SampledSpace {
    doc: SpaceDocument,
}

impl TryFrom<SpaceDocument> for SampledSpace {
    type Error = SpaceError;

    fn try_from(doc: SpaceDocument) -> Result<Self, SpaceError> {
        SampledSpace::new(doc)
    }
}

impl From<SampledSpace> for SpaceDocument {
    fn from(s: SampledSpace) -> Self {
        s.doc
    }
}

impl SampledSpace {
    /// Validates structure: sizes, coordinate dimension, nested exhaustion
    /// covering the sample, positive resolution. Metric axioms are checked
    /// separately by [`check_metric`].
    pub fn new(doc: SpaceDocument) -> Result<Self, SpaceError> {
        let n = doc.coords.len();
        let bad = |m: &str| Err(SpaceError::Invalid(m.to_string()));
        if n == 0 {
            return bad("no points");
        }
        if doc.labels.len() != n || doc.isolated.len() != n {
            return bad("labels and isolated flags must match the point count");
        }
        if !(doc.resolution > 0.0 && doc.resolution.is_finite()) {
            return bad("resolution must be positive");
        }
        let dim = doc.metric.dim();
        if doc.coords.iter().any(|c| c.len() != dim) {
            return bad("coordinate dimension does not match the metric");
        }
        if let Metric::Explicit { size, entries } = &doc.metric {
            if *size != n || entries.len() != n * n {
                return bad("explicit metric must be an n by n matrix");
            }
            if doc.coords.iter().enumerate().any(|(i, c)| c[0] != i as f64) {
                return bad("explicit metric coordinates must be the point ids");
            }
        }
        if doc.exhaustion.is_empty() {
            return bad("empty exhaustion");
        }
        let mut prev: BTreeSet<PointId> = BTreeSet::new();
        for k in &doc.exhaustion {
            let set: BTreeSet<PointId> = k.iter().copied().collect();
            if set.iter().any(|&p| p >= n) {
                return bad("exhaustion refers to a missing point");
            }
            if !prev.is_subset(&set) {
                return bad("exhaustion is not nested");
            }
            prev = set;
        }
        if prev.len() != n {
            return bad("exhaustion does not cover the sample");
        }
        Ok(SampledSpace { doc })
    }

    pub fn name(&self) -> &str {
        &self.doc.name
    }

    pub fn len(&self) -> usize {
        self.doc.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc.coords.is_empty()
    }

    pub fn resolution(&self) -> f64 {
        self.doc.resolution
    }

    /// Default identification tolerance, twice the resolution.
    pub fn tolerance(&self) -> f64 {
        2.0 * self.doc.resolution
    }

    pub fn metric(&self) -> &Metric {
        &self.doc.metric
    }

    pub fn label(&self, p: PointId) -> &str {
        &self.doc.labels[p]
    }

    pub fn labels(&self) -> &[String] {
        &self.doc.labels
    }

    pub fn coords(&self, p: PointId) -> &[f64] {
        &self.doc.coords[p]
    }

    pub fn is_isolated(&self, p: PointId) -> bool {
        self.doc.isolated[p]
    }

    pub fn exhaustion(&self) -> &[Vec<PointId>] {
        &self.doc.exhaustion
    }

    pub fn distance(&self, a: PointId, b: PointId) -> f64 {
        self.doc.metric.distance(&self.doc.coords[a], &self.doc.coords[b])
    }

    pub fn distance_to_coords(&self, a: PointId, c: &[f64]) -> f64 {
        self.doc.metric.distance(&self.doc.coords[a], c)
    }

    /// Max metric on tuples.
    pub fn tuple_distance(&self, s: &[PointId], t: &[PointId]) -> f64 {
        s.iter().zip(t).map(|(&a, &b)| self.distance(a, b)).fold(0.0, f64::max)
    }

    /// Nearest sample point to `c`, provided it lies within the resolution.
    /// Ties go to the lowest id.
    pub fn nearest(&self, c: &[f64]) -> Option<PointId> {
        let mut best: Option<(f64, PointId)> = None;
        for p in 0..self.len() {
            let d = self.distance_to_coords(p, c);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, p));
            }
        }
        best.filter(|(d, _)| within(*d, self.doc.resolution)).map(|(_, p)| p)
    }

    pub fn find_label(&self, label: &str) -> Option<PointId> {
        self.doc.labels.iter().position(|l| l == label)
    }

    pub fn document(&self) -> &SpaceDocument {
        &self.doc
    }

    /// Every point as a compact set, the top of the exhaustion.
    pub fn top(&self) -> CompactSet {
        CompactSet {
            members: self.doc.exhaustion.last().cloned().unwrap_or_default(),
            label: "top".into(),
        }
    }

    pub fn exhaustion_sets(&self) -> Vec<CompactSet> {
        self.doc
            .exhaustion
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mut members = m.clone();
                members.sort_unstable();
                CompactSet { members, label: format!("K{}", i + 1) }
            })
            .collect()
    }

    /// Smallest positive distance between two members of `set`.
    pub fn separation(&self, set: &[PointId]) -> f64 {
        let mut best = f64::INFINITY;
        for (a, &s) in set.iter().enumerate() {
            for &t in &set[a + 1..] {
                let d = self.distance(s, t);
                if d > 0.0 && d < best {
                    best = d;
                }
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompactSet {
    pub members: Vec<PointId>,
    pub label: String,
}

impl CompactSet {
    pub fn new(space: &SampledSpace, members: Vec<PointId>, label: &str) -> Result<Self, SpaceError> {
        if members.is_empty() {
            return Err(SpaceError::EmptyCompact);
        }
        if let Some(&p) = members.iter().find(|&&p| p >= space.len()) {
            return Err(SpaceError::UnknownPoint(p));
        }
        let mut members = members;
        members.sort_unstable();
        members.dedup();
        Ok(CompactSet { members, label: label.to_string() })
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.members.binary_search(&p).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fattening {
    pub set: CompactSet,
    /// Whether the fattening lies inside the top exhaustion set.
    pub inside_top: bool,
    /// Index of the smallest exhaustion set containing the fattening.
    pub level: Option<usize>,
}

/// `{t : d(t, K) <= delta}` over the sample.
pub fn fatten(space: &SampledSpace, k: &CompactSet, delta: f64) -> Result<Fattening, SpaceError> {
    if k.members.is_empty() {
        return Err(SpaceError::EmptyCompact);
    }
    if !(delta > 0.0) {
        return Err(SpaceError::Invalid("fattening radius must be positive".into()));
    }
    let members: Vec<PointId> = (0..space.len())
        .filter(|&t| k.members.iter().any(|&s| within(space.distance(s, t), delta)))
        .collect();
    let level = space.exhaustion().iter().position(|e| {
        let e: BTreeSet<_> = e.iter().collect();
        members.iter().all(|p| e.contains(p))
    });
    let top = space.exhaustion().last().expect("validated");
    let top: BTreeSet<_> = top.iter().collect();
    let inside_top = members.iter().all(|p| top.contains(p));
    Ok(Fattening {
        set: CompactSet { members, label: format!("{}+{}", k.label, delta) },
        inside_top,
        level,
    })
}

/// Cartesian product with the max metric. Point `(i, j)` has id
/// `i * b.len() + j`.
pub fn product(a: &SampledSpace, b: &SampledSpace) -> SampledSpace {
    let (na, nb) = (a.len(), b.len());
    let mut labels = Vec::with_capacity(na * nb);
    let mut coords = Vec::with_capacity(na * nb);
    let mut isolated = Vec::with_capacity(na * nb);
    for i in 0..na {
        for j in 0..nb {
            labels.push(format!("({},{})", a.label(i), b.label(j)));
            let mut c = a.coords(i).to_vec();
            c.extend_from_slice(b.coords(j));
            coords.push(c);
            isolated.push(a.is_isolated(i) && b.is_isolated(j));
        }
    }
    let flat = |m: &Metric| match m {
        Metric::Max { factors } => factors.clone(),
        other => vec![other.clone()],
    };
    let mut factors = flat(a.metric());
    factors.extend(flat(b.metric()));
    let levels = a.exhaustion().len().max(b.exhaustion().len());
    let exhaustion = (0..levels)
        .map(|m| {
            let ka = &a.exhaustion()[m.min(a.exhaustion().len() - 1)];
            let kb = &b.exhaustion()[m.min(b.exhaustion().len() - 1)];
            let mut v: Vec<PointId> =
                ka.iter().flat_map(|&i| kb.iter().map(move |&j| i * nb + j)).collect();
            v.sort_unstable();
            v
        })
        .collect();
    SampledSpace::new(SpaceDocument {
        name: format!("{}x{}", a.name(), b.name()),
        labels,
        coords,
        metric: Metric::Max { factors },
        exhaustion,
        resolution: a.resolution().max(b.resolution()),
        isolated,
    })
    .expect("product of valid spaces is valid")
}

/// Builds a space from an explicit distance matrix.
pub fn explicit_space(
    name: &str,
    labels: Vec<String>,
    matrix: Vec<Vec<f64>>,
    exhaustion: Vec<Vec<PointId>>,
    resolution: f64,
    isolated: Vec<bool>,
) -> Result<SampledSpace, SpaceError> {
    let n = matrix.len();
    if matrix.iter().any(|r| r.len() != n) {
        return Err(SpaceError::Invalid("distance matrix is not square".into()));
    }
    SampledSpace::new(SpaceDocument {
        name: name.into(),
        labels,
        coords: (0..n).map(|i| vec![i as f64]).collect(),
        metric: Metric::Explicit { size: n, entries: matrix.into_iter().flatten().collect() },
        exhaustion,
        resolution,
        isolated,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BuiltinSpace {
    Line { resolution: f64, half_width: f64 },
    Circle { points: usize },
    Interval { points: usize },
    Plane { resolution: f64, half_width: f64 },
    Remark25 { n_max: usize },
    #[serde(rename = "onepoint01N")]
    OnePoint01N { n_max: usize },
    CircleXInterval { circle_points: usize, interval_points: usize },
}

impl BuiltinSpace {
    /// The named space at its default resolution.
    pub fn from_name(name: &str) -> Result<Self, SpaceError> {
        Ok(match name {
            "line" => BuiltinSpace::Line { resolution: 0.01, half_width: 10.0 },
            "circle" => BuiltinSpace::Circle { points: 64 },
            "interval" => BuiltinSpace::Interval { points: 101 },
            "plane" => BuiltinSpace::Plane { resolution: 0.1, half_width: 2.0 },
            "remark25" => BuiltinSpace::Remark25 { n_max: 50 },
            "onepoint01N" => BuiltinSpace::OnePoint01N { n_max: 50 },
            "circle_x_interval" => BuiltinSpace::CircleXInterval { circle_points: 120, interval_points: 21 },
            other => return Err(SpaceError::UnknownBuiltin(other.to_string())),
        })
    }
}

fn grid_1d(lo: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| lo + k as f64 * step).collect()
}

pub fn builtin_space(spec: &BuiltinSpace) -> Result<SampledSpace, SpaceError> {
    let invalid = |m: &str| SpaceError::Invalid(m.to_string());
    match *spec {
        BuiltinSpace::Line { resolution, half_width } => {
            if !(resolution > 0.0 && half_width > 0.0) {
                return Err(invalid("line needs positive resolution and width"));
            }
            let count = (2.0 * half_width / resolution).round() as usize + 1;
            let xs = grid_1d(-half_width, resolution, count);
            let levels = half_width.ceil() as usize;
            let exhaustion = (1..=levels)
                .map(|m| {
                    let r = if m == levels { f64::INFINITY } else { m as f64 };
                    (0..count).filter(|&p| within(xs[p].abs(), r)).collect()
                })
                .collect();
            SampledSpace::new(SpaceDocument {
                name: "line".into(),
                labels: xs.iter().map(|x| format!("{x:.6}")).collect(),
                coords: xs.iter().map(|&x| vec![x]).collect(),
                metric: Metric::Euclidean { dim: 1 },
                exhaustion,
                resolution,
                isolated: vec![false; count],
            })
        }
        BuiltinSpace::Circle { points } => {
            if points < 3 {
                return Err(invalid("circle needs at least 3 points"));
            }
            let step = TAU / points as f64;
            SampledSpace::new(SpaceDocument {
                name: "circle".into(),
                labels: (0..points).map(|k| format!("theta{k}")).collect(),
                coords: (0..points).map(|k| vec![k as f64 * step]).collect(),
                metric: Metric::Circle,
                exhaustion: vec![(0..points).collect()],
                resolution: step / 2.0,
                isolated: vec![false; points],
            })
        }
        BuiltinSpace::Interval { points } => {
            if points < 2 {
                return Err(invalid("interval needs at least 2 points"));
            }
            let step = 1.0 / (points - 1) as f64;
            SampledSpace::new(SpaceDocument {
                name: "interval".into(),
                labels: (0..points).map(|k| format!("{:.6}", k as f64 * step)).collect(),
                coords: (0..points).map(|k| vec![k as f64 * step]).collect(),
                metric: Metric::Euclidean { dim: 1 },
                exhaustion: vec![(0..points).collect()],
                resolution: step / 2.0,
                isolated: vec![false; points],
            })
        }
        BuiltinSpace::Plane { resolution, half_width } => {
            if !(resolution > 0.0 && half_width > 0.0) {
                return Err(invalid("plane needs positive resolution and width"));
            }
            let side = (2.0 * half_width / resolution).round() as usize + 1;
            let xs = grid_1d(-half_width, resolution, side);
            let mut coords = Vec::with_capacity(side * side);
            for &x in &xs {
                for &y in &xs {
                    coords.push(vec![x, y]);
                }
            }
            let levels = half_width.ceil() as usize;
            let exhaustion = (1..=levels)
                .map(|m| {
                    let r = if m == levels { f64::INFINITY } else { m as f64 };
                    (0..coords.len())
                        .filter(|&p| within(coords[p][0].abs().max(coords[p][1].abs()), r))
                        .collect()
                })
                .collect();
            SampledSpace::new(SpaceDocument {
                name: "plane".into(),
                labels: coords.iter().map(|c| format!("({:.6},{:.6})", c[0], c[1])).collect(),
                isolated: vec![false; coords.len()],
                coords,
                metric: Metric::Euclidean { dim: 2 },
                exhaustion,
                resolution,
            })
        }
        BuiltinSpace::Remark25 { n_max } => {
            if n_max < 1 {
                return Err(invalid("n_max must be at least 1"));
            }
            let mut labels = Vec::new();
            let mut coords = Vec::new();
            for x in 1..=n_max {
                labels.push(format!("(0,{x})"));
                coords.push(vec![0.0, x as f64]);
            }
            labels.push("(0,inf)".into());
            coords.push(vec![0.0, f64::INFINITY]);
            let chain = coords.len();
            for i in 1..=n_max {
                for j in 1..=n_max {
                    labels.push(format!("({i},{j})"));
                    coords.push(vec![i as f64, j as f64]);
                }
            }
            let exhaustion = (1..=n_max)
                .map(|m| {
                    (0..coords.len())
                        .filter(|&p| p < chain || (coords[p][0] as usize <= m && coords[p][1] as usize <= m))
                        .collect()
                })
                .collect();
            let mut isolated = vec![true; coords.len()];
            isolated[chain - 1] = false;
            SampledSpace::new(SpaceDocument {
                name: "remark25".into(),
                labels,
                coords,
                metric: Metric::Remark25,
                exhaustion,
                resolution: (-(n_max as f64 + 1.0)).exp2(),
                isolated,
            })
        }
        BuiltinSpace::OnePoint01N { n_max } => {
            if n_max < 1 {
                return Err(invalid("n_max must be at least 1"));
            }
            let mut labels = Vec::new();
            let mut coords = Vec::new();
            for k in 1..=n_max {
                for i in 0..2 {
                    labels.push(format!("({i},{k})"));
                    coords.push(vec![i as f64, k as f64]);
                }
            }
            labels.push("inf".into());
            coords.push(vec![-1.0, f64::INFINITY]);
            let n = coords.len();
            let mut isolated = vec![true; n];
            isolated[n - 1] = false;
            SampledSpace::new(SpaceDocument {
                name: "onepoint01N".into(),
                labels,
                coords,
                metric: Metric::OnePoint01N,
                exhaustion: vec![(0..n).collect()],
                resolution: (-(n_max as f64 + 1.0)).exp2(),
                isolated,
            })
        }
        BuiltinSpace::CircleXInterval { circle_points, interval_points } => {
            let c = builtin_space(&BuiltinSpace::Circle { points: circle_points })?;
            let i = builtin_space(&BuiltinSpace::Interval { points: interval_points })?;
            let mut p = product(&c, &i);
            p.doc.name = "circle_x_interval".into();
            Ok(p)
        }
    }
}

/// The point of the remark25 space with the given pair; `None` as second
/// coordinate means infinity.
pub fn remark25_point(space: &SampledSpace, a: usize, b: Option<usize>) -> Option<PointId> {
    match b {
        Some(b) => space.find_label(&format!("({a},{b})")),
        None if a == 0 => space.find_label("(0,inf)"),
        None => None,
    }
}

/// Point `(i, k)` of the onepoint01N space, or the point at infinity.
pub fn onepoint_point(space: &SampledSpace, i: usize, k: Option<usize>) -> Option<PointId> {
    match k {
        Some(k) => space.find_label(&format!("({i},{k})")),
        None => space.find_label("inf"),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricAudit {
    pub exhaustive: bool,
    pub triples_checked: u64,
}

/// Symmetry, identity of indiscernibles and the triangle inequality.
/// Exhaustive when the space has at most `exhaustive_cap` points, otherwise
/// over `random_triples` seeded random triples.
pub fn check_metric(
    space: &SampledSpace,
    exhaustive_cap: usize,
    random_triples: u64,
    seed: u64,
) -> Result<MetricAudit, SpaceError> {
    let n = space.len();
    let fail = |axiom, points: Vec<PointId>| Err(SpaceError::MetricAxiom { axiom, points });
    let pair = |a: PointId, b: PointId| -> Result<(), SpaceError> {
        let d = space.distance(a, b);
        if !(d >= 0.0) || d != space.distance(b, a) {
            return fail("symmetry", vec![a, b]);
        }
        if (d == 0.0) != (a == b) {
            return fail("identity", vec![a, b]);
        }
        Ok(())
    };
    let check = |a: PointId, b: PointId, c: PointId| -> Result<(), SpaceError> {
        let ab = space.distance(a, b);
        let bc = space.distance(b, c);
        let ac = space.distance(a, c);
        let slack = 1e-12 * (1.0 + ab + bc);
        if ac > ab + bc + slack {
            return fail("triangle", vec![a, b, c]);
        }
        Ok(())
    };
    if n <= exhaustive_cap {
        for a in 0..n {
            for b in 0..n {
                pair(a, b)?;
                for c in 0..n {
                    check(a, b, c)?;
                }
            }
        }
        return Ok(MetricAudit { exhaustive: true, triples_checked: (n as u64).pow(3) });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_triples {
        let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        pair(a, b)?;
        check(a, b, c)?;
    }
    Ok(MetricAudit { exhaustive: false, triples_checked: random_triples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval_grid(hi: f64, step: f64) -> SampledSpace {
        let count = (hi / step).round() as usize + 1;
        let xs = grid_1d(0.0, step, count);
        SampledSpace::new(SpaceDocument {
            name: "grid".into(),
            labels: xs.iter().map(|x| format!("{x}")).collect(),
            coords: xs.iter().map(|&x| vec![x]).collect(),
            metric: Metric::Euclidean { dim: 1 },
            exhaustion: vec![(0..count).collect()],
            resolution: step,
            isolated: vec![false; count],
        })
        .unwrap()
    }

    #[test]
    fn fatten_unit_interval() {
        let s = interval_grid(3.0, 0.01);
        let k = CompactSet::new(&s, (0..=100).collect(), "K").unwrap();
        let f = fatten(&s, &k, 0.1).unwrap();
        assert_eq!(f.set.members, (0..=110).collect::<Vec<_>>());
        assert!(f.inside_top);
        let tiny = fatten(&s, &k, 0.001).unwrap();
        assert_eq!(tiny.set.members, k.members);
    }

    #[test]
    fn fatten_empty_is_error() {
        let s = interval_grid(1.0, 0.5);
        let k = CompactSet { members: vec![], label: "e".into() };
        assert_eq!(fatten(&s, &k, 0.1), Err(SpaceError::EmptyCompact));
        assert_eq!(CompactSet::new(&s, vec![], "e"), Err(SpaceError::EmptyCompact));
    }

    #[test]
    fn fatten_remark25_tail() {
        let s = builtin_space(&BuiltinSpace::Remark25 { n_max: 8 }).unwrap();
        let mut k: Vec<PointId> = (3..=8).map(|i| remark25_point(&s, 0, Some(i)).unwrap()).collect();
        k.push(remark25_point(&s, 0, None).unwrap());
        let k = CompactSet::new(&s, k, "tail").unwrap();
        // 2^-2 = 0.25 > 0.2, so nothing is added.
        assert_eq!(fatten(&s, &k, 0.2).unwrap().set.members, k.members);
        let wider = fatten(&s, &k, 0.3).unwrap().set;
        let mut expect = k.members.clone();
        expect.push(remark25_point(&s, 0, Some(2)).unwrap());
        expect.sort_unstable();
        assert_eq!(wider.members, expect);
    }

    #[test]
    fn remark25_shape() {
        let s = builtin_space(&BuiltinSpace::Remark25 { n_max: 5 }).unwrap();
        assert_eq!(s.len(), 6 + 25);
        let a = remark25_point(&s, 0, Some(2)).unwrap();
        let b = remark25_point(&s, 0, Some(4)).unwrap();
        let inf = remark25_point(&s, 0, None).unwrap();
        let g = remark25_point(&s, 3, Some(1)).unwrap();
        assert_eq!(s.distance(a, b), 0.25);
        assert_eq!(s.distance(b, inf), 1.0 / 16.0);
        assert_eq!(s.distance(a, g), 1.0);
        assert!(!s.is_isolated(inf));
        assert!(s.is_isolated(a));
        check_metric(&s, 2500, 0, 0).unwrap();
    }

    #[test]
    fn onepoint_shape() {
        let s = builtin_space(&BuiltinSpace::OnePoint01N { n_max: 4 }).unwrap();
        assert_eq!(s.len(), 9);
        let p = onepoint_point(&s, 0, Some(3)).unwrap();
        let q = onepoint_point(&s, 1, Some(2)).unwrap();
        let inf = onepoint_point(&s, 0, None).unwrap();
        assert_eq!(s.distance(p, q), 0.25);
        assert_eq!(s.distance(p, inf), 0.125);
        check_metric(&s, 2500, 0, 0).unwrap();
    }

    #[test]
    fn line_default() {
        let s = builtin_space(&BuiltinSpace::from_name("line").unwrap()).unwrap();
        assert_eq!(s.len(), 2001);
        assert_eq!(s.exhaustion().len(), 10);
        assert_eq!(s.exhaustion()[0].len(), 201);
        assert_eq!(s.exhaustion()[9].len(), 2001);
    }

    #[test]
    fn product_with_two_points() {
        let two = explicit_space(
            "two",
            vec!["p".into(), "q".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![vec![0, 1]],
            1.0,
            vec![true, true],
        )
        .unwrap();
        let grid = builtin_space(&BuiltinSpace::Interval { points: 3 }).unwrap();
        let p = product(&two, &grid);
        assert_eq!(p.len(), 6);
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(p.distance(j, 3 + k), 1.0);
            }
        }
        assert_eq!(p.distance(0, 2), 1.0);
        assert_eq!(p.distance(0, 1), 0.5);
        assert_eq!(p.resolution(), 1.0);
    }

    #[test]
    fn product_with_singleton_is_isometric() {
        let c = builtin_space(&BuiltinSpace::Circle { points: 12 }).unwrap();
        let one = explicit_space("one", vec!["*".into()], vec![vec![0.0]], vec![vec![0]], 0.1, vec![true]).unwrap();
        let p = product(&c, &one);
        for a in 0..12 {
            for b in 0..12 {
                assert_eq!(p.distance(a, b), c.distance(a, b));
            }
        }
    }

    #[test]
    fn circle_by_interval_audit() {
        let c = builtin_space(&BuiltinSpace::Circle { points: 64 }).unwrap();
        let i = builtin_space(&BuiltinSpace::Interval { points: 16 }).unwrap();
        let p = product(&c, &i);
        assert_eq!(p.len(), 1024);
        assert_eq!(p.exhaustion().len(), 1);
        assert_eq!(p.exhaustion()[0].len(), 1024);
    }

    #[test]
    fn unknown_builtin() {
        assert!(matches!(BuiltinSpace::from_name("torus"), Err(SpaceError::UnknownBuiltin(_))));
    }

    #[test]
    fn serde_round_trip() {
        let s = builtin_space(&BuiltinSpace::Remark25 { n_max: 3 }).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: SampledSpace = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let mut doc = s.document().clone();
        doc.exhaustion = vec![vec![0]];
        assert!(SampledSpace::new(doc).is_err());
    }
}
