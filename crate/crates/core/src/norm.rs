//! The lattice renorming of `C_0(X)`: seminorms `rho_t`, the norm
//! `|||x||| = sup_t rho_t(x)` with a certified truncation bound, tent witness
//! functions, and the dual-norm computations on finite atomic measures.

use std::collections::HashMap;
use std::sync::{RwLock, RwLockReadGuard};

use serde::{Deserialize, Serialize};

use crate::error::NormError;
use crate::operators::{ExpandedGroup, GroupSpec};
use crate::orbits::{equivalent, orbit_closure, select_dense_points, DenseSelection, OrbitClosure};
use crate::space::{indistinct, PointId, SampledSpace};
use crate::tuples::{
    c_value, choose_parameters, enumerate, enumerated_up_to, exceptional_classes, verify_bmap, BmapReport,
    ClassRegistry, ConsecutiveIndex, Exponent, Parameters, TupleIndex,
};

/// Inputs of [`RenormConfig::build`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormSettings {
    pub c: f64,
    /// Largest `i + n` of an evaluated tuple.
    pub depth: u64,
    pub gamma_cap: u32,
    /// Word cap for orbit closures; the group's own cap when absent.
    pub word_cap: Option<usize>,
}

impl Default for RenormSettings {
    fn default() -> Self {
        RenormSettings { c: 1.1, depth: 6, gamma_cap: 16, word_cap: None }
    }
}

#[derive(Clone, Debug)]
struct PrefixNode {
    parent: u32,
    depth: u8,
    label: u32,
    point: PointId,
    coef: f64,
}

const ROOT: u32 = u32::MAX;

pub struct RenormConfig {
    space: SampledSpace,
    group: GroupSpec,
    expanded: ExpandedGroup,
    params: Parameters,
    depth: u64,
    gamma_cap: u32,
    word_cap: usize,
    selection: DenseSelection,
    orbits: Vec<OrbitClosure>,
    locations: HashMap<PointId, (u64, u32)>,
    /// `label_maps[e][b][gamma]`: label of the image of orbit point `gamma`
    /// of base `b + 1` under element `e`.
    label_maps: Vec<Vec<Vec<Option<u32>>>>,
    registry: RwLock<ClassRegistry>,
    tree: Vec<(u64, Vec<PrefixNode>)>,
    tuple_count: usize,
    gamma_truncated: bool,
    bmap: BmapReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub space: String,
    pub points: usize,
    pub resolution: f64,
    pub c: f64,
    pub big_l: u64,
    pub lambda_rule: String,
    pub depth: u64,
    pub gamma_cap: u32,
    pub word_cap: usize,
    pub group_elements: usize,
    pub group_complete: bool,
    pub base_points: Vec<String>,
    pub orbit_sizes: Vec<usize>,
    pub orbits_saturated: bool,
    pub tuples: usize,
    pub classes: usize,
    pub gamma_truncated: bool,
}

impl RenormConfig {
    pub fn build(space: SampledSpace, group: GroupSpec, settings: &RenormSettings) -> Result<Self, NormError> {
        if settings.depth < 2 {
            return Err(NormError::Depth);
        }
        group.validate(&space)?;
        let params = choose_parameters(settings.c)?;
        let word_cap = settings.word_cap.unwrap_or(group.word_cap);
        let expanded = group.with_cap(word_cap).expand(&space);
        for (e, g) in expanded.ops().enumerate() {
            if let Some(p) = g.weight().iter().position(|w| (w - 1.0).abs() > 1e-12) {
                return Err(NormError::NotIsometric { element: e, point: p, weight: g.weight()[p] });
            }
        }
        let depth = settings.depth;
        let selection = select_dense_points(&space, &group, word_cap, depth as usize)?;
        let mut orbits = Vec::with_capacity(selection.points.len());
        let mut locations = HashMap::new();
        for (b, &p) in selection.points.iter().enumerate() {
            let o = orbit_closure(&space, &group, &[p], word_cap)?;
            for (g, x) in o.samples.iter().enumerate() {
                locations.entry(x[0]).or_insert((b as u64 + 1, g as u32));
            }
            orbits.push(o);
        }
        let gamma_truncated =
            orbits.iter().any(|o| !o.saturated || o.len() > settings.gamma_cap as usize);

        let mut label_maps = Vec::with_capacity(expanded.len());
        for g in expanded.ops() {
            let per_base = orbits
                .iter()
                .map(|o| {
                    o.samples
                        .iter()
                        .map(|x| g.forward()[x[0]].and_then(|q| o.position(&space, &[q])).map(|l| l as u32))
                        .collect()
                })
                .collect();
            label_maps.push(per_base);
        }

        let mut cfg = RenormConfig {
            space,
            group,
            expanded,
            params,
            depth,
            gamma_cap: settings.gamma_cap,
            word_cap,
            selection,
            orbits,
            locations,
            label_maps,
            registry: RwLock::new(ClassRegistry::new()),
            tree: Vec::new(),
            tuple_count: 0,
            gamma_truncated,
            bmap: BmapReport {
                depth,
                big_l: 0,
                classes: 0,
                properties: vec![],
                chain_max: 0.0,
                supremum_attained: false,
                pass: false,
            },
        };

        let mut registry = ClassRegistry::new();
        let mut count = 0;
        for m in 1..=enumerated_up_to(depth) {
            let idx = enumerate(m)?;
            let limits: Vec<u32> = (0..idx.len).map(|k| cfg.gamma_limit(idx.start + k)).collect();
            let mut gammas = vec![0u32; idx.len as usize];
            loop {
                let t = TupleIndex { index: idx, gammas: gammas.clone() };
                registry.classify(&t, || cfg.images(&t));
                count += 1;
                if !advance(&mut gammas, &limits) {
                    break;
                }
            }
        }
        cfg.tuple_count = count;
        cfg.bmap = verify_bmap(&cfg.params, depth, &registry);
        cfg.tree = (1..depth).map(|i| (i, cfg.prefix_tree(i, &registry))).collect();
        cfg.registry = RwLock::new(registry);
        Ok(cfg)
    }

    fn prefix_tree(&self, start: u64, registry: &ClassRegistry) -> Vec<PrefixNode> {
        let mut nodes = Vec::new();
        let mut labels = Vec::new();
        self.grow(start, ROOT, &mut labels, registry, &mut nodes);
        nodes
    }

    fn grow(
        &self,
        start: u64,
        parent: u32,
        labels: &mut Vec<u32>,
        registry: &ClassRegistry,
        nodes: &mut Vec<PrefixNode>,
    ) {
        let slot = start + labels.len() as u64;
        if slot > self.depth {
            return;
        }
        for g in 0..self.gamma_limit(slot) {
            labels.push(g);
            let coef = if labels.len() == 1 {
                self.params.lambda(start)
            } else {
                let t = TupleIndex { index: ConsecutiveIndex { start, len: labels.len() as u64 }, gammas: labels.clone() };
                let k = registry.exponent_of(&t).expect("registered at build");
                self.params.inverse_b(k)
            };
            let id = nodes.len() as u32;
            nodes.push(PrefixNode {
                parent,
                depth: (labels.len() - 1) as u8,
                label: g,
                point: self.orbits[slot as usize - 1].samples[g as usize][0],
                coef,
            });
            self.grow(start, id, labels, registry, nodes);
            labels.pop();
        }
    }

    /// Label tuples equivalent to `t` under the enumerated group elements.
    fn images(&self, t: &TupleIndex) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = Vec::with_capacity(self.label_maps.len());
        for maps in &self.label_maps {
            let img: Option<Vec<u32>> = t
                .gammas
                .iter()
                .enumerate()
                .map(|(k, &g)| {
                    let b = (t.start() - 1) as usize + k;
                    maps.get(b).and_then(|m| m.get(g as usize)).copied().flatten()
                })
                .collect();
            if let Some(img) = img {
                if !out.contains(&img) {
                    out.push(img);
                }
            }
        }
        out
    }

    pub fn space(&self) -> &SampledSpace {
        &self.space
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn expanded(&self) -> &ExpandedGroup {
        &self.expanded
    }

    pub fn params(&self) -> &Parameters {
        &self.params
    }

    pub fn depth(&self) -> u64 {
        self.depth
    }

    pub fn gamma_cap(&self) -> u32 {
        self.gamma_cap
    }

    pub fn word_cap(&self) -> usize {
        self.word_cap
    }

    pub fn selection(&self) -> &DenseSelection {
        &self.selection
    }

    pub fn base_points(&self) -> &[PointId] {
        &self.selection.points
    }

    pub fn bmap_report(&self) -> &BmapReport {
        &self.bmap
    }

    pub fn gamma_truncated(&self) -> bool {
        self.gamma_truncated
    }

    pub fn tuple_count(&self) -> usize {
        self.tuple_count
    }

    /// Orbit of the base point `t_i^0`, `i >= 1`.
    pub fn orbit(&self, i: u64) -> Result<&OrbitClosure, NormError> {
        if i == 0 {
            return Err(NormError::BaseIndex(i));
        }
        self.orbits.get(i as usize - 1).ok_or(NormError::BaseIndex(i))
    }

    /// Number of evaluated labels of base `i`.
    pub fn gamma_limit(&self, i: u64) -> u32 {
        self.orbits.get(i as usize - 1).map_or(0, |o| (o.len() as u32).min(self.gamma_cap))
    }

    /// The point `t_i^gamma`.
    pub fn point(&self, i: u64, gamma: u32) -> Result<PointId, NormError> {
        let o = self.orbit(i)?;
        o.samples.get(gamma as usize).map(|x| x[0]).ok_or(NormError::Label { base: i as usize, gamma })
    }

    pub fn tuple_points(&self, t: &TupleIndex) -> Result<Vec<PointId>, NormError> {
        t.gammas.iter().enumerate().map(|(k, &g)| self.point(t.start() + k as u64, g)).collect()
    }

    /// The base orbit containing `p` (within twice the resolution) and the
    /// label of `p` in it.
    pub fn locate(&self, p: PointId) -> Option<(u64, u32)> {
        if let Some(&hit) = self.locations.get(&p) {
            return Some(hit);
        }
        self.orbits
            .iter()
            .enumerate()
            .find_map(|(b, o)| o.position(&self.space, &[p]).map(|g| (b as u64 + 1, g as u32)))
    }

    /// Label tuple of the points `s` read as slots of bases
    /// `start, start+1, ...`.
    pub fn resolve(&self, start: u64, s: &[PointId]) -> Option<TupleIndex> {
        let mut gammas = Vec::with_capacity(s.len());
        for (k, &p) in s.iter().enumerate() {
            let o = self.orbits.get((start as usize + k).checked_sub(1)?)?;
            gammas.push(o.position(&self.space, &[p])? as u32);
        }
        TupleIndex::new(start, gammas).ok()
    }

    pub fn registry(&self) -> RwLockReadGuard<'_, ClassRegistry> {
        self.registry.read().expect("registry lock")
    }

    /// Class of `t`, registering it on first query.
    pub fn classify(&self, t: &TupleIndex) -> Result<usize, NormError> {
        self.tuple_points(t)?;
        if let Some(id) = self.registry().lookup(t) {
            return Ok(id);
        }
        let images = self.images(t);
        let mut reg = self.registry.write().expect("registry lock");
        Ok(reg.classify(t, || images).0)
    }

    pub fn exponent(&self, t: &TupleIndex) -> Result<Exponent, NormError> {
        let id = self.classify(t)?;
        Ok(self.registry().class(id).exponent)
    }

    pub fn inverse_b(&self, t: &TupleIndex) -> Result<f64, NormError> {
        Ok(self.params.inverse_b(self.exponent(t)?))
    }

    /// Overrides a class exponent; used to build synthetic registries.
    pub fn set_exponent(&self, id: usize, k: Exponent) {
        self.registry.write().expect("registry lock").set_exponent(id, k);
    }

    /// Every evaluated tuple in enumeration order.
    pub fn tuples(&self) -> Vec<TupleIndex> {
        let mut out = Vec::with_capacity(self.tuple_count);
        for m in 1..=enumerated_up_to(self.depth) {
            let idx = enumerate(m).expect("m >= 1");
            let limits: Vec<u32> = (0..idx.len).map(|k| self.gamma_limit(idx.start + k)).collect();
            let mut gammas = vec![0u32; idx.len as usize];
            loop {
                out.push(TupleIndex { index: idx, gammas: gammas.clone() });
                if !advance(&mut gammas, &limits) {
                    break;
                }
            }
        }
        out
    }

    pub fn summary(&self) -> ConfigSummary {
        ConfigSummary {
            space: self.space.name().to_string(),
            points: self.space.len(),
            resolution: self.space.resolution(),
            c: self.params.c,
            big_l: self.params.big_l,
            lambda_rule: self.params.lambda_rule.clone(),
            depth: self.depth,
            gamma_cap: self.gamma_cap,
            word_cap: self.word_cap,
            group_elements: self.expanded.len(),
            group_complete: self.expanded.complete,
            base_points: self.base_points().iter().map(|&p| self.space.label(p).to_string()).collect(),
            orbit_sizes: self.orbits.iter().map(OrbitClosure::len).collect(),
            orbits_saturated: self.orbits.iter().all(|o| o.saturated),
            tuples: self.tuple_count,
            classes: self.registry().len(),
            gamma_truncated: self.gamma_truncated,
        }
    }
}

/// Lexicographic successor of `g` below `limits`; false after the last.
fn advance(g: &mut [u32], limits: &[u32]) -> bool {
    for k in (0..g.len()).rev() {
        g[k] += 1;
        if g[k] < limits[k] {
            return true;
        }
        g[k] = 0;
    }
    false
}

fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `rho_t(x) = lambda_i |x(t_0)| + sum_k |x(t_k)| / b(t|^k)`.
pub fn rho(t: &TupleIndex, x: &[f64], cfg: &RenormConfig) -> Result<f64, NormError> {
    let pts = cfg.tuple_points(t)?;
    let mut s = cfg.params.lambda(t.start()) * x[pts[0]].abs();
    for k in 1..pts.len() {
        s += x[pts[k]].abs() * cfg.inverse_b(&t.prefix(k))?;
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    /// Certified lower bound: `max(sup of evaluated rho_t, ||x||_inf)`.
    pub value: f64,
    /// `upper - value`.
    pub truncation_bound: f64,
    pub upper: f64,
    pub sup_norm: f64,
    /// Largest evaluated `rho_t`.
    pub evaluated_sup: f64,
    pub argmax: Option<TupleIndex>,
    /// Labels beyond the gamma cap were not evaluated; their contribution is
    /// not covered by the bound.
    pub gamma_truncated: bool,
}

/// `sup_t rho_t(x)` over tuples with `i + n <= depth` and labels below
/// `max_label`, with the traversal index of the first maximiser.
fn evaluated_sup(x: &[f64], cfg: &RenormConfig, max_label: u32) -> (f64, Option<(usize, u32)>) {
    let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let mut best = 0.0;
    let mut arg = None;
    let mut partial = vec![0.0; cfg.depth as usize + 1];
    for (ti, (_, nodes)) in cfg.tree.iter().enumerate() {
        let mut skip_below: Option<u8> = None;
        for (ni, node) in nodes.iter().enumerate() {
            if let Some(d) = skip_below {
                if node.depth > d {
                    continue;
                }
                skip_below = None;
            }
            if node.label >= max_label {
                skip_below = Some(node.depth);
                continue;
            }
            let d = node.depth as usize;
            let base = if d == 0 { 0.0 } else { partial[d - 1] };
            partial[d] = base + node.coef * abs[node.point];
            if d >= 1 && partial[d] > best {
                best = partial[d];
                arg = Some((ti, ni as u32));
            }
        }
    }
    (best, arg)
}

fn node_tuple(cfg: &RenormConfig, tree: usize, node: u32) -> TupleIndex {
    let (start, nodes) = &cfg.tree[tree];
    let mut labels = Vec::new();
    let mut cur = node;
    while cur != ROOT {
        labels.push(nodes[cur as usize].label);
        cur = nodes[cur as usize].parent;
    }
    labels.reverse();
    TupleIndex { index: ConsecutiveIndex { start: *start, len: labels.len() as u64 }, gammas: labels }
}

/// `|||x|||` with a two-sided certificate `value <= |||x||| <= upper`.
///
/// Tuples with `i + n > depth` are bounded through their in-depth prefix
/// plus `||x|| sum_{j > depth} L^-(3j-4)`, or by `(lambda_depth + tail) ||x||`
/// when they start at `depth` or later.
pub fn triple_norm(x: &[f64], cfg: &RenormConfig) -> NormValue {
    let s = sup_norm(x);
    let (e, arg) = evaluated_sup(x, cfg, u32::MAX);
    let tail = cfg.params.chain_tail(cfg.depth + 1);
    let value = e.max(s);
    let upper = (e + s * tail).max((cfg.params.lambda(cfg.depth) + tail) * s).max(value);
    NormValue {
        value,
        truncation_bound: upper - value,
        upper,
        sup_norm: s,
        evaluated_sup: e,
        argmax: arg.map(|(t, n)| node_tuple(cfg, t, n)),
        gamma_truncated: cfg.gamma_truncated,
    }
}

/// Value of the evaluated sup as a function of the label cap.
pub fn gamma_sensitivity(x: &[f64], cfg: &RenormConfig, caps: &[u32]) -> Vec<(u32, f64)> {
    let s = sup_norm(x);
    caps.iter().map(|&c| (c, evaluated_sup(x, cfg, c).0.max(s))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessTarget {
    pub point: PointId,
    pub value: f64,
    pub radius: f64,
    /// Base index whose orbit the target lies on.
    pub base: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessSpec {
    pub targets: Vec<WitnessTarget>,
    /// The cutoff `M`: balls avoid the orbits of bases `1..=M` other than
    /// their own.
    pub cutoff_m: u64,
    pub epsilon: f64,
    /// The tuple whose exceptional classes the balls avoid.
    pub tuple: Option<TupleIndex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AvoidanceCheck {
    pub target: usize,
    pub base: u64,
    /// Distance from the target to the nearest orbit point of `base`.
    pub clearance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessAudit {
    pub r1: Vec<AvoidanceCheck>,
    /// Bases in `depth+1..=M` are not sampled; tuples through them are
    /// covered by the truncation bound.
    pub unsampled_bases: bool,
    pub exceptional_classes: usize,
    pub exceptional_members: usize,
    pub cutoff_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub values: Vec<f64>,
    pub audit: WitnessAudit,
}

/// Sum of tents `value (1 - d/radius)_+`.
pub fn tent_function(space: &SampledSpace, targets: &[WitnessTarget]) -> Vec<f64> {
    (0..space.len())
        .map(|p| {
            targets
                .iter()
                .map(|t| t.value * (1.0 - space.distance(p, t.point) / t.radius).max(0.0))
                .sum()
        })
        .collect()
}

/// Smallest `M > i + n` with `lambda_M + L^(3-M) < min(lambda_{i+n+1}, 1 + eps)`.
pub fn cutoff_for_tuple(last: u64, eps: f64, params: &Parameters) -> u64 {
    let l = params.big_l as f64;
    let cap = params.lambda(last + 1).min(1.0 + eps);
    (last + 1..).find(|&m| params.lambda(m) + l.powf(3.0 - m as f64) < cap).expect("lambda decreases to 1")
}

/// Smallest `M` with `lambda_M + L^(5-3M) < 1 + eps`.
pub fn cutoff_for_point(eps: f64, params: &Parameters) -> u64 {
    let l = params.big_l as f64;
    (1..).find(|&m| params.lambda(m) + l.powf(5.0 - 3.0 * m as f64) < 1.0 + eps).expect("lambda decreases to 1")
}

fn clearance(cfg: &RenormConfig, p: PointId, base: u64) -> f64 {
    cfg.orbits[base as usize - 1].samples.iter().map(|x| cfg.space.distance(p, x[0])).fold(f64::INFINITY, f64::min)
}

/// Chooses ball radii for a witness on `t` with values `u`: each ball meets
/// its own base orbit only at its centre, misses every other orbit of bases
/// `1..=min(M, depth)` and the other balls.
pub fn plan_witness(t: &TupleIndex, u: &[f64], eps: f64, max_radius: f64, cfg: &RenormConfig) -> Result<WitnessSpec, NormError> {
    let pts = cfg.tuple_points(t)?;
    if u.len() != pts.len() {
        return Err(NormError::Witness(format!("{} values for {} targets", u.len(), pts.len())));
    }
    let m = cutoff_for_tuple(t.index.last(), eps, &cfg.params);
    let reach = m.min(cfg.depth);
    let mut targets = Vec::new();
    for (k, &p) in pts.iter().enumerate() {
        let own = t.start() + k as u64;
        let mut r = max_radius;
        for j in 1..=reach {
            let o = &cfg.orbits[j as usize - 1];
            for x in &o.samples {
                if j == own && x[0] == p {
                    continue;
                }
                r = r.min(cfg.space.distance(p, x[0]));
            }
        }
        for (a, &q) in pts.iter().enumerate() {
            if a != k {
                r = r.min(cfg.space.distance(p, q) / 2.0);
            }
        }
        targets.push(WitnessTarget { point: p, value: u[k], radius: r, base: Some(own) });
    }
    Ok(WitnessSpec { targets, cutoff_m: m, epsilon: eps, tuple: Some(t.clone()) })
}

/// A single-ball witness at `p` of height `value` whose ball contains no
/// other orbit point of the first `depth` bases.
pub fn plan_point_witness(p: PointId, value: f64, eps: f64, max_radius: f64, cfg: &RenormConfig) -> WitnessSpec {
    let own = cfg.locate(p).map(|(b, _)| b);
    let m = cutoff_for_point(eps, &cfg.params);
    let mut r = max_radius;
    for j in 1..=cfg.depth {
        for x in &cfg.orbits[j as usize - 1].samples {
            if x[0] != p {
                r = r.min(cfg.space.distance(p, x[0]));
            }
        }
    }
    WitnessSpec {
        targets: vec![WitnessTarget { point: p, value, radius: r, base: own }],
        cutoff_m: m,
        epsilon: eps,
        tuple: None,
    }
}

/// Builds the tent witness after checking disjointness, the radius floor,
/// orbit avoidance and, when a tuple is given, that every exceptional class
/// leaves the balls.
pub fn witness_function(spec: &WitnessSpec, cfg: &RenormConfig) -> Result<Witness, NormError> {
    let space = &cfg.space;
    let res = space.resolution();
    for (k, t) in spec.targets.iter().enumerate() {
        if indistinct(t.radius, res) {
            return Err(NormError::Witness(format!(
                "ball {k} around {} has radius {} below the resolution {res}",
                space.label(t.point),
                t.radius
            )));
        }
        for (j, s) in spec.targets.iter().enumerate().skip(k + 1) {
            if indistinct(space.distance(t.point, s.point), t.radius + s.radius) {
                return Err(NormError::Witness(format!("balls {k} and {j} overlap")));
            }
        }
    }
    let reach = spec.cutoff_m.min(cfg.depth);
    let mut r1 = Vec::new();
    for (k, t) in spec.targets.iter().enumerate() {
        for j in 1..=reach {
            if Some(j) == t.base {
                continue;
            }
            let c = clearance(cfg, t.point, j);
            if c < t.radius {
                return Err(NormError::Witness(format!(
                    "ball {k} around {} meets the orbit of base point {j}",
                    space.label(t.point)
                )));
            }
            r1.push(AvoidanceCheck { target: k, base: j, clearance: c });
        }
    }
    let mut ex_classes = 0;
    let mut ex_members = 0;
    if let Some(t) = &spec.tuple {
        let (i, n) = (t.start(), t.n());
        let inside = |slot: usize, p: PointId| {
            let tg = &spec.targets[slot];
            space.distance(p, tg.point) < tg.radius
        };
        let reg = cfg.registry();
        for p in i..i + n {
            for q in 1..=i + n - p {
                for id in exceptional_classes(t, p, q, None, &cfg.params, &reg)? {
                    ex_classes += 1;
                    let index = reg.class(id).representative.index;
                    for g in reg.members(id) {
                        ex_members += 1;
                        let member = TupleIndex { index, gammas: g.clone() };
                        let pts = cfg.tuple_points(&member)?;
                        let all_in = pts.iter().enumerate().all(|(j, &x)| inside((p - i) as usize + j, x));
                        if all_in {
                            return Err(NormError::Witness(format!(
                                "exceptional orbit of {member} meets the balls at ({p}, {q})"
                            )));
                        }
                    }
                }
            }
        }
    }
    let l = cfg.params.big_l as f64;
    let m = spec.cutoff_m as f64;
    let cutoff_holds = match &spec.tuple {
        Some(t) => {
            let cap = cfg.params.lambda(t.index.last() + 1).min(1.0 + spec.epsilon);
            spec.cutoff_m > t.index.last() && cfg.params.lambda(spec.cutoff_m) + l.powf(3.0 - m) < cap
        }
        None => cfg.params.lambda(spec.cutoff_m) + l.powf(5.0 - 3.0 * m) < 1.0 + spec.epsilon,
    };
    if !cutoff_holds {
        return Err(NormError::Witness(format!("cutoff M = {} does not satisfy its inequality", spec.cutoff_m)));
    }
    Ok(Witness {
        values: tent_function(space, &spec.targets),
        audit: WitnessAudit {
            r1,
            unsampled_bases: spec.cutoff_m > cfg.depth,
            exceptional_classes: ex_classes,
            exceptional_members: ex_members,
            cutoff_holds,
        },
    })
}

/// `|||delta_p|||^*`: `1/lambda_i` on the orbit of `t_i^0`, 1 elsewhere.
pub fn dual_norm_delta(p: PointId, cfg: &RenormConfig) -> f64 {
    match cfg.locate(p) {
        Some((i, _)) => 1.0 / cfg.params.lambda(i),
        None => 1.0,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaCheck {
    pub point: PointId,
    pub analytic: f64,
    /// `x(p) / upper(x)` for the witness bump: a lower bound.
    pub lower: f64,
    /// `x(p) / value(x)`.
    pub estimate: f64,
    pub relative_gap: f64,
}

/// Numerical evidence for [`dual_norm_delta`] from a bump at `p`.
pub fn delta_cross_check(p: PointId, cfg: &RenormConfig) -> Result<DeltaCheck, NormError> {
    let analytic = dual_norm_delta(p, cfg);
    let spec = plan_point_witness(p, analytic, 1e-3, 0.25, cfg);
    let w = witness_function(&spec, cfg)?;
    let n = triple_norm(&w.values, cfg);
    let lower = w.values[p] / n.upper;
    let estimate = w.values[p] / n.value;
    Ok(DeltaCheck { point: p, analytic, lower, estimate, relative_gap: (analytic - lower).abs() / analytic })
}

/// Upper triangular `(n+1) x (n+1)` system with diagonal `lambdas` and
/// off-diagonal entries `zeta[j][k]`, `k > j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangularSystem {
    pub lambdas: Vec<f64>,
    pub zeta: Vec<Vec<f64>>,
}

impl TriangularSystem {
    pub fn new(lambdas: Vec<f64>, zeta: Vec<Vec<f64>>) -> Result<Self, NormError> {
        let n = lambdas.len();
        if n == 0 || zeta.len() != n || zeta.iter().any(|r| r.len() != n) {
            return Err(NormError::Malformed(format!("expected {n} rows of length {n}")));
        }
        for (j, row) in zeta.iter().enumerate() {
            if row[..=j].iter().any(|&z| z != 0.0) {
                return Err(NormError::Malformed(format!("row {j} is not upper triangular")));
            }
        }
        Ok(TriangularSystem { lambdas, zeta })
    }

    pub fn size(&self) -> usize {
        self.lambdas.len()
    }

    /// Row `k` as a functional: `z_k^*`.
    pub fn row(&self, k: usize) -> Vec<f64> {
        let mut r = self.zeta[k].clone();
        r[k] = self.lambdas[k];
        r
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        (0..self.size()).map(|k| self.row(k).iter().zip(z).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn apply_transpose(&self, a: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n).map(|k| (0..n).map(|j| a[j] * self.row(j)[k]).sum()).collect()
    }

    /// Bound on column `k` (0-based): `9^(1 - 3k)`.
    pub fn zeta_bound(k: usize) -> f64 {
        9f64.powi(1 - 3 * k as i32)
    }

    /// Diagonal in `(1, 1.1]` and decreasing, `0 <= zeta_jk <= 9^(1-3k)`.
    pub fn check_hypotheses(&self) -> Result<(), NormError> {
        for (k, &l) in self.lambdas.iter().enumerate() {
            if !(l > 1.0 && l <= 1.1) || (k > 0 && l >= self.lambdas[k - 1]) {
                return Err(NormError::Hypothesis { index: k, value: l });
            }
        }
        for (j, row) in self.zeta.iter().enumerate() {
            for (k, &z) in row.iter().enumerate().skip(j + 1) {
                let bound = Self::zeta_bound(k);
                if !(0.0..=bound).contains(&z) {
                    return Err(NormError::ZetaBound { row: j, col: k, value: z, bound });
                }
            }
        }
        Ok(())
    }
}

/// Rows `z_k^* = (0, .., 0, lambda_{i+k}, 1/b(t|_k^{k+1}), .., 1/b(t|_k^n))`.
pub fn build_matrix(t: &TupleIndex, cfg: &RenormConfig) -> Result<TriangularSystem, NormError> {
    let len = t.gammas.len();
    let lambdas = (0..len).map(|k| cfg.params.lambda(t.start() + k as u64)).collect();
    let mut zeta = vec![vec![0.0; len]; len];
    for j in 0..len {
        for k in j + 1..len {
            zeta[j][k] = cfg.inverse_b(&t.sub(j, k))?;
        }
    }
    let sys = TriangularSystem::new(lambdas, zeta)?;
    sys.check_hypotheses()?;
    Ok(sys)
}

/// Back substitution for `T a = 1`; entries must lie in `[4/5, 1]`.
pub fn solve_unit(sys: &TriangularSystem) -> Result<Vec<f64>, NormError> {
    let n = sys.size();
    let mut a = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[j] * sys.zeta[k][j]).sum();
        a[k] = (1.0 - s) / sys.lambdas[k];
    }
    if let Some(k) = a.iter().position(|&v| !(0.8..=1.0).contains(&v)) {
        return Err(NormError::Hypothesis { index: k, value: a[k] });
    }
    Ok(a)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub alpha: Vec<f64>,
    pub alpha_sum: f64,
    /// `beta . a(t)`, equal to `alpha_sum` when `a(t)` solves `T a = 1`.
    pub beta_dot_unit: f64,
}

/// Forward substitution for `T^T alpha = beta` with `beta` in
/// `[4/5, 6/5]^(n+1)`; entries of `alpha` must lie in `[0, 2)`.
pub fn dual_decompose(beta: &[f64], sys: &TriangularSystem) -> Result<Decomposition, NormError> {
    let n = sys.size();
    if beta.len() != n {
        return Err(NormError::Malformed(format!("beta has {} entries, system has {n}", beta.len())));
    }
    if let Some(k) = beta.iter().position(|&b| !(0.8..=1.2).contains(&b)) {
        return Err(NormError::BetaWindow { index: k, value: beta[k], lo: 0.8, hi: 1.2 });
    }
    let mut alpha = vec![0.0; n];
    for k in 0..n {
        let s: f64 = (0..k).map(|i| alpha[i] * sys.zeta[i][k]).sum();
        alpha[k] = (beta[k] - s) / sys.lambdas[k];
    }
    if let Some(k) = alpha.iter().position(|&v| !(0.0..2.0).contains(&v)) {
        return Err(NormError::Hypothesis { index: k, value: alpha[k] });
    }
    let a = solve_unit(sys)?;
    Ok(Decomposition {
        alpha_sum: alpha.iter().sum(),
        beta_dot_unit: beta.iter().zip(&a).map(|(b, x)| b * x).sum(),
        alpha,
    })
}

/// `a(t)`, the unit solution of the matrix of `t`.
pub fn unit_vector(t: &TupleIndex, cfg: &RenormConfig) -> Result<Vec<f64>, NormError> {
    solve_unit(&build_matrix(t, cfg)?)
}

fn check_atom_window(beta: &[f64]) -> Result<(), NormError> {
    match beta.iter().position(|&b| !(0.8..=1.0).contains(&b)) {
        Some(k) => Err(NormError::BetaWindow { index: k, value: beta[k], lo: 0.8, hi: 1.0 }),
        None => Ok(()),
    }
}

/// `||| sum_k beta_k delta_{t_k} |||^* = a(t) . beta` for `beta` in
/// `[4/5, 1]^(n+1)`. A single atom gives `beta / lambda_i`.
pub fn dual_norm_atoms(t: &TupleIndex, beta: &[f64], cfg: &RenormConfig) -> Result<f64, NormError> {
    if beta.len() != t.gammas.len() {
        return Err(NormError::Malformed(format!("beta has {} entries, tuple has {}", beta.len(), t.gammas.len())));
    }
    check_atom_window(beta)?;
    let a = unit_vector(t, cfg)?;
    Ok(a.iter().zip(beta).map(|(x, b)| x * b).sum())
}

/// [`dual_norm_atoms`] for a point tuple `s` read as slots of bases
/// `start, ..`; `s` must resolve to orbit labels.
pub fn dual_norm_atoms_points(start: u64, s: &[PointId], beta: &[f64], cfg: &RenormConfig) -> Result<f64, NormError> {
    check_atom_window(beta)?;
    if s.len() == 1 {
        return match cfg.orbit(start)?.position(&cfg.space, s) {
            Some(_) => Ok(beta[0] / cfg.params.lambda(start)),
            None => Err(NormError::Unresolved(format!("point {} is off the orbit of base {start}", s[0]))),
        };
    }
    let t = cfg.resolve(start, s).ok_or_else(|| {
        NormError::Unresolved(format!("{s:?} has a slot off its base orbit; use comparison_matrix"))
    })?;
    dual_norm_atoms(&t, beta, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomRow {
    pub beta: Vec<f64>,
    pub analytic: f64,
    /// `max_u beta . u / upper(x_u)` over the witnesses `x_u`.
    pub lower: f64,
    pub best_u: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomOracle {
    pub tuple: TupleIndex,
    pub witnesses: usize,
    /// `max_u value(x_u) / max_k z_k^*(u)`; at most `1 + eps`.
    pub worst_row_ratio: f64,
    pub rows: Vec<AtomRow>,
}

/// Brute-force lower bounds for [`dual_norm_atoms`] from bump witnesses
/// with peak values `u` ranging over `grid^(n+1)`.
pub fn atoms_oracle(t: &TupleIndex, betas: &[Vec<f64>], grid: &[f64], eps: f64, max_radius: f64, cfg: &RenormConfig) -> Result<AtomOracle, NormError> {
    let sys = build_matrix(t, cfg)?;
    let len = t.gammas.len();
    let mut rows = betas
        .iter()
        .map(|b| Ok(AtomRow { beta: b.clone(), analytic: dual_norm_atoms(t, b, cfg)?, lower: 0.0, best_u: vec![] }))
        .collect::<Result<Vec<_>, NormError>>()?;
    let mut worst_row_ratio: f64 = 0.0;
    let mut witnesses = 0;
    let mut digits = vec![0usize; len];
    loop {
        let u: Vec<f64> = digits.iter().map(|&d| grid[d]).collect();
        let w = witness_function(&plan_witness(t, &u, eps, max_radius, cfg)?, cfg)?;
        let n = triple_norm(&w.values, cfg);
        for row in &mut rows {
            let lower = row.beta.iter().zip(&u).map(|(b, v)| b * v).sum::<f64>() / n.upper;
            if lower > row.lower {
                row.lower = lower;
                row.best_u = u.clone();
            }
        }
        let top = sys.apply(&u).into_iter().fold(0.0, f64::max);
        worst_row_ratio = worst_row_ratio.max(n.value / top);
        witnesses += 1;
        let Some(k) = digits.iter().position(|&d| d + 1 < grid.len()) else { break };
        digits[k] += 1;
        digits[..k].iter_mut().for_each(|d| *d = 0);
    }
    Ok(AtomOracle { tuple: t.clone(), witnesses, worst_row_ratio, rows })
}

/// The matrix of `t` with `zeta_{0n}` replaced by `L^-c(t)`.
pub fn comparison_system(t: &TupleIndex, cfg: &RenormConfig) -> Result<TriangularSystem, NormError> {
    let mut sys = build_matrix(t, cfg)?;
    let n = t.n() as usize;
    sys.zeta[0][n] = (cfg.params.big_l as f64).powf(-(c_value(t) as f64));
    Ok(sys)
}

/// Matrix for a tuple `s` almost equivalent to `t` but equivalent to no
/// `(t_i^g0, .., t_{i+n-1}^g{n-1}, t_{i+n}^g)`. Entries other than
/// `zeta_{0n}` are those of `t`, since `b` is constant on classes.
pub fn comparison_matrix(s: &[PointId], t: &TupleIndex, cfg: &RenormConfig) -> Result<TriangularSystem, NormError> {
    let n = t.n() as usize;
    if s.len() != n + 1 {
        return Err(NormError::Comparison(format!("length {} against {}", s.len(), n + 1)));
    }
    let tp = cfg.tuple_points(t)?;
    let tol = cfg.space.tolerance();
    let eq = |a: &[PointId], b: &[PointId]| -> Result<bool, NormError> {
        Ok(equivalent(&cfg.space, &cfg.group, a, b, cfg.word_cap, tol)?.holds)
    };
    if !eq(&s[..n], &tp[..n])? {
        return Err(NormError::Comparison("initial segments are not equivalent".into()));
    }
    if !eq(&s[1..], &tp[1..])? {
        return Err(NormError::Comparison("final segments are not equivalent".into()));
    }
    let last = t.index.last();
    let o = cfg.orbit(last)?;
    for g in 0..o.len() as u32 {
        let mut cand = tp.clone();
        cand[n] = cfg.point(last, g)?;
        if eq(s, &cand)? {
            return Err(NormError::Comparison(format!("s is equivalent to the tuple with last label {g}")));
        }
    }
    comparison_system(t, cfg)
}

/// Whether two tuples of points are within the tolerance slot-wise.
pub fn same_points(cfg: &RenormConfig, a: &[PointId], b: &[PointId]) -> bool {
    a.len() == b.len() && indistinct(cfg.space.tuple_distance(a, b), cfg.space.tolerance())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::space::{builtin_space, BuiltinSpace};

    fn line_cfg(depth: u64) -> RenormConfig {
        let s = builtin_space(&BuiltinSpace::Line { resolution: 0.01, half_width: 10.0 }).unwrap();
        let g = GroupSpec::trivial(&s);
        RenormConfig::build(s, g, &RenormSettings { depth, ..Default::default() }).unwrap()
    }

    fn rot_cfg() -> RenormConfig {
        let s = builtin_space(&BuiltinSpace::Circle { points: 96 }).unwrap();
        let g = gallery::rotation_group(&s, 4);
        RenormConfig::build(s, g, &RenormSettings { depth: 4, gamma_cap: 4, ..Default::default() }).unwrap()
    }

    #[test]
    fn zero_function() {
        let cfg = line_cfg(4);
        let n = triple_norm(&vec![0.0; cfg.space().len()], &cfg);
        assert_eq!((n.value, n.truncation_bound), (0.0, 0.0));
    }

    #[test]
    fn rho_of_constant() {
        let cfg = line_cfg(4);
        let x = vec![1.0; cfg.space().len()];
        let t = TupleIndex::new(1, vec![0, 0]).unwrap();
        assert_eq!(rho(&t, &x, &cfg).unwrap(), 1.05 + 22f64.powi(-2));
    }

    #[test]
    fn rho_invariance_under_generators() {
        let cfg = rot_cfg();
        let n = cfg.space().len();
        let x: Vec<f64> = (0..n).map(|p| ((p * 7919) % 31) as f64 / 31.0).collect();
        for g in &cfg.group().generators {
            let gx = g.apply(&x);
            for t in cfg.tuples().iter().filter(|t| t.n() <= 2) {
                let pts = cfg.tuple_points(t).unwrap();
                let img: Vec<PointId> = pts.iter().map(|&p| g.forward()[p].unwrap()).collect();
                let gt = cfg.resolve(t.start(), &img).unwrap();
                assert_eq!(rho(&gt, &x, &cfg).unwrap(), rho(t, &gx, &cfg).unwrap());
            }
        }
    }

    #[test]
    fn norm_is_homogeneous_and_lattice() {
        let cfg = line_cfg(5);
        let n = cfg.space().len();
        let x: Vec<f64> = (0..n).map(|p| ((p as f64) * 0.37).sin()).collect();
        let nx = triple_norm(&x, &cfg).value;
        let neg: Vec<f64> = x.iter().map(|v| -2.0 * v).collect();
        let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        assert_eq!(triple_norm(&neg, &cfg).value, 2.0 * nx);
        assert_eq!(triple_norm(&abs, &cfg).value, nx);
    }

    #[test]
    fn prefix_tree_matches_direct_rho() {
        let cfg = rot_cfg();
        let n = cfg.space().len();
        let x: Vec<f64> = (0..n).map(|p| ((p * 31) % 17) as f64 / 17.0).collect();
        let direct = cfg.tuples().iter().map(|t| rho(t, &x, &cfg).unwrap()).fold(0.0, f64::max);
        let v = triple_norm(&x, &cfg);
        assert!((v.evaluated_sup - direct).abs() <= 1e-15);
        assert_eq!(rho(&v.argmax.unwrap(), &x, &cfg).unwrap(), v.evaluated_sup);
    }

    #[test]
    fn bmap_holds_on_rotation_config() {
        let cfg = rot_cfg();
        assert!(cfg.bmap_report().pass, "{:?}", cfg.bmap_report());
        let s = cfg.summary();
        assert_eq!(s.orbit_sizes, vec![4; 4]);
        assert!(!s.gamma_truncated);
    }

    #[test]
    fn small_systems() {
        let t = TriangularSystem::new(vec![1.05], vec![vec![0.0]]).unwrap();
        assert_eq!(solve_unit(&t).unwrap(), vec![1.0 / 1.05]);
        let d = TriangularSystem::new(vec![1.05; 3], vec![vec![0.0; 3]; 3]).unwrap();
        assert_eq!(solve_unit(&d).unwrap(), vec![1.0 / 1.05; 3]);
        let beta = [0.9, 1.0, 1.1];
        let dec = dual_decompose(&beta, &d).unwrap();
        for k in 0..3 {
            assert_eq!(dec.alpha[k], beta[k] / 1.05);
        }
    }

    fn two_by_two() -> TriangularSystem {
        TriangularSystem::new(vec![1.05, 1.025], vec![vec![0.0, 1.0 / 81.0], vec![0.0, 0.0]]).unwrap()
    }

    #[test]
    fn two_by_two_back_substitution() {
        let a = solve_unit(&two_by_two()).unwrap();
        assert!((a[1] - 0.975_609_756_097_561_1).abs() < 1e-15);
        assert!((a[0] - 0.940_909_938_199_911_1).abs() < 1e-15);
        let r = two_by_two().apply(&a);
        assert!(r.iter().all(|v| (v - 1.0).abs() <= 1e-12));
    }

    #[test]
    fn two_by_two_forward_substitution() {
        let sys = two_by_two();
        let d = dual_decompose(&[1.0, 1.0], &sys).unwrap();
        assert!((d.alpha[0] - 0.952_380_952_380_952_3).abs() < 1e-15);
        assert!((d.alpha[1] - 0.964_138_741_916_519_8).abs() < 1e-15);
        assert!((d.alpha_sum - d.beta_dot_unit).abs() < 1e-12);
        let r = sys.apply_transpose(&d.alpha);
        assert!(r.iter().all(|v| (v - 1.0).abs() <= 1e-12));
        assert!(matches!(dual_decompose(&[1.3, 1.0], &sys), Err(NormError::BetaWindow { .. })));
    }

    #[test]
    fn hypothesis_violation_reported() {
        let bad = TriangularSystem::new(vec![1.05, 1.02], vec![vec![0.0, 0.5], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(bad.check_hypotheses(), Err(NormError::ZetaBound { row: 0, col: 1, .. })));
        assert!(matches!(solve_unit(&bad), Err(NormError::Hypothesis { index: 0, .. })));
    }

    #[test]
    fn matrix_of_first_pair() {
        let cfg = line_cfg(4);
        let t = TupleIndex::new(1, vec![0, 0]).unwrap();
        let m = build_matrix(&t, &cfg).unwrap();
        assert_eq!(m.lambdas, vec![1.05, 1.025]);
        assert_eq!(m.zeta[0][1], 22f64.powi(-2));
        let single = dual_norm_atoms_points(3, &[cfg.point(3, 0).unwrap()], &[1.0], &cfg).unwrap();
        assert_eq!(single, 1.0 / cfg.params().lambda(3));
        let ones = dual_norm_atoms(&TupleIndex::new(1, vec![0, 0, 0]).unwrap(), &[1.0; 3], &cfg).unwrap();
        assert!((2.4..=3.0).contains(&ones));
    }

    #[test]
    fn equivalent_tuples_share_matrices() {
        let cfg = rot_cfg();
        let t = TupleIndex::new(1, vec![0, 1, 2]).unwrap();
        let g = &cfg.group().generators[0];
        let img: Vec<PointId> = cfg.tuple_points(&t).unwrap().iter().map(|&p| g.forward()[p].unwrap()).collect();
        let gt = cfg.resolve(1, &img).unwrap();
        assert_ne!(gt, t);
        assert_eq!(build_matrix(&gt, &cfg).unwrap(), build_matrix(&t, &cfg).unwrap());
        let beta = [0.9, 0.85, 1.0];
        assert_eq!(dual_norm_atoms(&gt, &beta, &cfg).unwrap(), dual_norm_atoms(&t, &beta, &cfg).unwrap());
    }

    #[test]
    fn comparison_against_synthetic_class() {
        let cfg = line_cfg(4);
        let t = TupleIndex::new(1, vec![0, 0]).unwrap();
        let id = cfg.classify(&t).unwrap();
        let c = c_value(&t) as i64;
        cfg.set_exponent(id, Exponent::from_integer(c - 1));
        let a = solve_unit(&build_matrix(&t, &cfg).unwrap()).unwrap();
        let b = solve_unit(&comparison_system(&t, &cfg).unwrap()).unwrap();
        assert_eq!(a[1], b[1]);
        let l = 22f64;
        let diff = (l.powi(-(c as i32 - 1)) - l.powi(-(c as i32))) * a[1] / 1.05;
        assert!(((b[0] - a[0]) - diff).abs() < 1e-15);
        let pts = cfg.tuple_points(&t).unwrap();
        assert!(matches!(comparison_matrix(&pts, &t, &cfg), Err(NormError::Comparison(_))));
    }

    #[test]
    fn delta_duals() {
        let cfg = line_cfg(4);
        let t3 = cfg.point(3, 0).unwrap();
        assert_eq!(dual_norm_delta(t3, &cfg), 1.0 / cfg.params().lambda(3));
        let far = cfg.space().find_label("3.330000").unwrap();
        assert_eq!(dual_norm_delta(far, &cfg), 1.0);
        for p in [t3, far] {
            let c = delta_cross_check(p, &cfg).unwrap();
            assert!(c.relative_gap <= 0.02, "{c:?}");
        }
    }

    #[test]
    fn single_target_witness() {
        let cfg = line_cfg(4);
        let p = cfg.point(2, 0).unwrap();
        let spec = plan_point_witness(p, 0.9, 1e-3, 0.5, &cfg);
        let w = witness_function(&spec, &cfg).unwrap();
        let n = triple_norm(&w.values, &cfg);
        let lam = cfg.params().lambda(2);
        assert!(n.value >= lam * 0.9 - 1e-15 && n.value <= lam * 0.9 + n.truncation_bound + 1e-15);
        let mut overlap = spec.clone();
        overlap.targets.push(WitnessTarget { point: p - 1, value: 1.0, radius: 0.5, base: None });
        assert!(witness_function(&overlap, &cfg).is_err());
    }

    #[test]
    fn full_witness_norm_matches_rows() {
        let cfg = rot_cfg();
        let t = TupleIndex::new(1, vec![0, 2, 1]).unwrap();
        let u = [1.0; 3];
        let spec = plan_witness(&t, &u, 1e-3, 0.25, &cfg).unwrap();
        let w = witness_function(&spec, &cfg).unwrap();
        let sys = build_matrix(&t, &cfg).unwrap();
        let a = (0..3).map(|k| sys.row(k).iter().zip(&u).map(|(r, v)| r * v).sum::<f64>()).fold(0.0, f64::max);
        let n = triple_norm(&w.values, &cfg);
        assert!(n.value >= a - 1e-15);
        assert!(n.value <= (1.0 + spec.epsilon) * a);
    }

    #[test]
    fn atom_oracle_brackets_analytic() {
        let cfg = rot_cfg();
        let t = TupleIndex::new(2, vec![1, 0]).unwrap();
        let o = atoms_oracle(&t, &[vec![0.9, 0.85], vec![1.0, 0.8]], &[0.8, 0.9, 1.0], 1e-3, 0.25, &cfg).unwrap();
        assert_eq!(o.witnesses, 9);
        for r in &o.rows {
            assert!(r.lower <= r.analytic && r.lower >= 0.95 * r.analytic, "{o:?}");
        }
        assert!(o.worst_row_ratio <= 1.0 + 1e-3);
    }
}
