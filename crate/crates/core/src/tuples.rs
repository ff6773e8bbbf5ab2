//! Consecutive index sequences, their triangular enumeration, the weight map
//! `b` on orbit classes of tuples and the comparability code `c`.
//!
//! Rows of the enumeration are `(r, r+1), (r-1, r, r+1), ..., (1, ..., r+1)`.
//! Class exponents are exact rationals; `b = L^k`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::TupleError;

pub type Exponent = Ratio<i64>;

/// `(start, start+1, ..., start+len-1)` with `start >= 1`, `len >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConsecutiveIndex {
    pub start: u64,
    pub len: u64,
}

impl ConsecutiveIndex {
    pub fn new(start: u64, len: u64) -> Result<Self, TupleError> {
        if start < 1 || len < 2 {
            return Err(TupleError::BadIndex { start, len });
        }
        Ok(ConsecutiveIndex { start, len })
    }

    /// `n` in `(i, ..., i+n)`.
    pub fn n(&self) -> u64 {
        self.len - 1
    }

    pub fn last(&self) -> u64 {
        self.start + self.len - 1
    }
}

impl fmt::Display for ConsecutiveIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}..{})", self.start, self.last())
    }
}

/// The `m`-th consecutive sequence, `m >= 1`.
pub fn enumerate(m: u64) -> Result<ConsecutiveIndex, TupleError> {
    if m < 1 {
        return Err(TupleError::ZeroIndex);
    }
    // Smallest row r with r(r+1)/2 >= m.
    let mut r = (((8.0 * m as f64 + 1.0).sqrt() - 1.0) / 2.0).floor() as u64;
    while r * (r + 1) / 2 < m {
        r += 1;
    }
    while r > 1 && (r - 1) * r / 2 >= m {
        r -= 1;
    }
    let p = m - (r - 1) * r / 2;
    Ok(ConsecutiveIndex { start: r - p + 1, len: p + 1 })
}

pub fn enumeration_index(idx: &ConsecutiveIndex) -> u64 {
    let r = idx.last() - 1;
    (r - 1) * r / 2 + idx.n()
}

/// Number of sequences with last element at most `depth`.
pub fn enumerated_up_to(depth: u64) -> u64 {
    if depth < 2 {
        0
    } else {
        depth * (depth - 1) / 2
    }
}

/// An element of `N`: slot `j` is the orbit point with label `gammas[j]` of
/// base point `start + j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TupleIndex {
    pub index: ConsecutiveIndex,
    pub gammas: Vec<u32>,
}

impl TupleIndex {
    pub fn new(start: u64, gammas: Vec<u32>) -> Result<Self, TupleError> {
        let index = ConsecutiveIndex::new(start, gammas.len() as u64)?;
        Ok(TupleIndex { index, gammas })
    }

    pub fn start(&self) -> u64 {
        self.index.start
    }

    pub fn n(&self) -> u64 {
        self.index.n()
    }

    pub fn m(&self) -> u64 {
        enumeration_index(&self.index)
    }

    /// Slots `j..=k` as a tuple of their own (requires `k > j`).
    pub fn sub(&self, j: usize, k: usize) -> TupleIndex {
        TupleIndex {
            index: ConsecutiveIndex { start: self.index.start + j as u64, len: (k - j + 1) as u64 },
            gammas: self.gammas[j..=k].to_vec(),
        }
    }

    /// The prefix `t|^k`: slots `0..=k`.
    pub fn prefix(&self, k: usize) -> TupleIndex {
        self.sub(0, k)
    }

    pub fn key(&self) -> (u64, Vec<u32>) {
        (self.m(), self.gammas.clone())
    }
}

impl fmt::Display for TupleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.index, self.gammas)
    }
}

/// `c(t) = 3m` where `a_m = iota(t)`.
pub fn c_value(t: &TupleIndex) -> u64 {
    3 * t.m()
}

/// Exact rational from the shortest decimal representation of `x`.
pub fn decimal_rational(x: f64) -> Option<Exponent> {
    let text = format!("{x}");
    let (int, frac) = match text.split_once('.') {
        Some((a, b)) => (a, b),
        None => (text.as_str(), ""),
    };
    if frac.len() > 15 {
        return None;
    }
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let digits = format!("{int}{frac}");
    let num: i64 = digits.parse().ok()?;
    Some(Ratio::new(num, den))
}

/// `C`, the `lambda` rule and `L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub c: f64,
    pub c_exact: Exponent,
    pub big_l: u64,
    pub lambda_rule: String,
}

impl Parameters {
    /// `lambda_i = 1 + (C - 1) 2^-i`.
    pub fn lambda(&self, i: u64) -> f64 {
        1.0 + (self.c - 1.0) * (-(i as f64)).exp2()
    }

    /// `1 / b` for an exponent `k`.
    pub fn inverse_b(&self, k: Exponent) -> f64 {
        (self.big_l as f64).powf(-ratio_f64(k))
    }

    /// `sum_{n >= 1} L^-n < C - lambda_1`, exactly.
    pub fn property3(&self) -> bool {
        let lhs = Ratio::new(1, self.big_l as i64 - 1);
        let rhs = (self.c_exact - 1) / 2;
        lhs < rhs
    }

    /// `sum_{j >= start} L^-(3j - 4)`: the bound on all chain terms whose
    /// index sequence ends at `start` or later.
    pub fn chain_tail(&self, start: u64) -> f64 {
        let l = self.big_l as f64;
        l.powf(-(3.0 * start as f64 - 4.0)) / (1.0 - l.powi(-3))
    }
}

pub fn ratio_f64(k: Exponent) -> f64 {
    *k.numer() as f64 / *k.denom() as f64
}

/// `lambda_i = 1 + (C-1) 2^-i` and the smallest integer `L > 9` with
/// `1/(L-1) < C - lambda_1`. The comparison is exact on the decimal value of
/// `C`.
pub fn choose_parameters(c: f64) -> Result<Parameters, TupleError> {
    let exact = decimal_rational(c).ok_or(TupleError::ConstantOutOfRange(c))?;
    if !(exact > Ratio::from_integer(1) && exact <= Ratio::new(11, 10)) {
        return Err(TupleError::ConstantOutOfRange(c));
    }
    // 1/(L-1) < (C-1)/2  <=>  L - 1 > 2/(C-1).
    let bound = Ratio::from_integer(2) / (exact - 1);
    let mut l = (bound.to_integer() + 1).max(10);
    while Ratio::from_integer(l - 1) <= bound {
        l += 1;
    }
    Ok(Parameters { c, c_exact: exact, big_l: l as u64, lambda_rule: "1 + (C-1)*2^-i".into() })
}

/// `k = c_m - 1/ordinal`.
pub fn default_exponent(m: u64, ordinal: u64) -> Exponent {
    Ratio::from_integer(3 * m as i64) - Ratio::new(1, ordinal as i64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub id: usize,
    pub m: u64,
    pub ordinal: u64,
    pub representative: TupleIndex,
    pub exponent: Exponent,
}

/// Orbit classes of tuples in order of first query. A class is the set of
/// label tuples reachable from its representative by the enumerated words.
#[derive(Clone, Debug, Default)]
pub struct ClassRegistry {
    classes: Vec<ClassEntry>,
    members: HashMap<(u64, Vec<u32>), usize>,
    member_lists: Vec<Vec<Vec<u32>>>,
    per_m: BTreeMap<u64, Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegistryDocument {
    pub classes: Vec<ClassEntry>,
}

impl ClassRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn lookup(&self, t: &TupleIndex) -> Option<usize> {
        self.members.get(&t.key()).copied()
    }

    /// Class of `t`, registering it with the next ordinal for its `m` when
    /// none of its images is known. `images` lists label tuples equivalent to
    /// `t` (including `t`).
    pub fn classify(&mut self, t: &TupleIndex, images: impl FnOnce() -> Vec<Vec<u32>>) -> (usize, bool) {
        if let Some(id) = self.lookup(t) {
            return (id, false);
        }
        let m = t.m();
        let images = images();
        if let Some(id) = images.iter().find_map(|g| self.members.get(&(m, g.clone())).copied()) {
            self.add_members(id, m, std::iter::once(t.gammas.clone()).chain(images));
            return (id, false);
        }
        (self.insert_class(t.clone(), images, None), true)
    }

    /// Registers a new class. `exponent` overrides `c_m - 1/ordinal`.
    pub fn insert_class(&mut self, representative: TupleIndex, images: Vec<Vec<u32>>, exponent: Option<Exponent>) -> usize {
        let m = representative.m();
        let ordinal = self.per_m.get(&m).map_or(0, Vec::len) as u64 + 1;
        let id = self.classes.len();
        self.classes.push(ClassEntry {
            id,
            m,
            ordinal,
            exponent: exponent.unwrap_or_else(|| default_exponent(m, ordinal)),
            representative: representative.clone(),
        });
        self.member_lists.push(Vec::new());
        self.per_m.entry(m).or_default().push(id);
        self.add_members(id, m, std::iter::once(representative.gammas).chain(images));
        id
    }

    fn add_members(&mut self, id: usize, m: u64, keys: impl Iterator<Item = Vec<u32>>) {
        for g in keys {
            if let std::collections::hash_map::Entry::Vacant(e) = self.members.entry((m, g.clone())) {
                e.insert(id);
                self.member_lists[id].push(g);
            }
        }
    }

    /// Fault injection and synthetic registries.
    pub fn set_exponent(&mut self, id: usize, exponent: Exponent) {
        self.classes[id].exponent = exponent;
    }

    pub fn class(&self, id: usize) -> &ClassEntry {
        &self.classes[id]
    }

    pub fn classes(&self) -> &[ClassEntry] {
        &self.classes
    }

    pub fn members(&self, id: usize) -> &[Vec<u32>] {
        &self.member_lists[id]
    }

    pub fn classes_with_m(&self, m: u64) -> &[usize] {
        self.per_m.get(&m).map_or(&[], Vec::as_slice)
    }

    pub fn exponent_of(&self, t: &TupleIndex) -> Result<Exponent, TupleError> {
        self.lookup(t).map(|id| self.classes[id].exponent).ok_or_else(|| TupleError::Unregistered(t.to_string()))
    }

    pub fn document(&self) -> RegistryDocument {
        RegistryDocument { classes: self.classes.clone() }
    }

    /// Every member tuple of every class, with its class id.
    pub fn all_members(&self) -> impl Iterator<Item = (usize, TupleIndex)> + '_ {
        self.member_lists.iter().enumerate().flat_map(move |(id, list)| {
            let index = self.classes[id].representative.index;
            list.iter().map(move |g| (id, TupleIndex { index, gammas: g.clone() }))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub property: u8,
    pub pass: bool,
    pub checked: u64,
    pub violation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BmapReport {
    pub depth: u64,
    pub big_l: u64,
    pub classes: usize,
    pub properties: Vec<PropertyResult>,
    /// Largest value of `lambda_i + sum 1/b + tail` over enumerated chains.
    pub chain_max: f64,
    /// Whether `L^c` itself is attained by a class; never for lazily
    /// discovered families.
    pub supremum_attained: bool,
    pub pass: bool,
}

/// Properties 1-7 of the weight maps on every registered tuple with
/// `i + n <= depth`.
pub fn verify_bmap(params: &Parameters, depth: u64, registry: &ClassRegistry) -> BmapReport {
    let in_depth = |t: &TupleIndex| t.index.last() <= depth;
    let mut props = Vec::new();

    // 1: b is injective on classes.
    let mut exps: Vec<(Exponent, usize)> =
        registry.classes().iter().filter(|c| in_depth(&c.representative)).map(|c| (c.exponent, c.id)).collect();
    exps.sort();
    let dup = exps.windows(2).find(|w| w[0].0 == w[1].0);
    props.push(PropertyResult {
        property: 1,
        pass: dup.is_none(),
        checked: exps.len() as u64,
        violation: dup.map(|w| format!("classes {} and {} share exponent {}", w[0].1, w[1].1, w[0].0)),
    });

    // 2: c is 3m and m determines iota.
    let mut v2 = None;
    let mut n2 = 0;
    for c in registry.classes().iter().filter(|c| in_depth(&c.representative)) {
        n2 += 1;
        let rep = &c.representative;
        let ok = c.m == rep.m() && enumerate(c.m).ok() == Some(rep.index) && c_value(rep) == 3 * c.m;
        if !ok && v2.is_none() {
            v2 = Some(format!("class {} with index {}", c.id, rep.index));
        }
    }
    props.push(PropertyResult { property: 2, pass: v2.is_none(), checked: n2, violation: v2 });

    // 3: exact.
    props.push(PropertyResult {
        property: 3,
        pass: params.property3(),
        checked: 1,
        violation: (!params.property3()).then(|| format!("1/(L-1) >= C - lambda_1 for L = {}", params.big_l)),
    });

    // 4: c - 1 <= k <= c, strictly increasing in the ordinal for fixed m.
    let mut v4 = None;
    let mut n4 = 0;
    for (&m, ids) in &registry.per_m {
        if enumerate(m).map_or(true, |i| i.last() > depth) {
            continue;
        }
        let c = Ratio::from_integer(3 * m as i64);
        let mut prev: Option<Exponent> = None;
        for &id in ids {
            n4 += 1;
            let k = registry.class(id).exponent;
            if (k < c - 1 || k > c || prev.is_some_and(|p| k <= p)) && v4.is_none() {
                v4 = Some(format!("class {id} (m = {m}) has exponent {k}"));
            }
            prev = Some(k);
        }
    }
    props.push(PropertyResult { property: 4, pass: v4.is_none(), checked: n4, violation: v4 });

    // 5: k >= 3(i+n) - 4.
    let mut v5 = None;
    let mut n5 = 0;
    for c in registry.classes().iter().filter(|c| in_depth(&c.representative)) {
        n5 += 1;
        let bound = Ratio::from_integer(3 * c.representative.index.last() as i64 - 4);
        if c.exponent < bound && v5.is_none() {
            v5 = Some(format!("class {} exponent {} < {}", c.id, c.exponent, bound));
        }
    }
    props.push(PropertyResult { property: 5, pass: v5.is_none(), checked: n5, violation: v5 });

    // 6: b(t') > L b(t) for one-slot extensions; 7: chain sums.
    let mut v6 = None;
    let mut n6 = 0;
    let mut v7 = None;
    let mut n7 = 0;
    let mut chain_max = params.lambda(depth) + params.chain_tail(depth + 1);
    for (id, t) in registry.all_members() {
        if !in_depth(&t) {
            continue;
        }
        let k = registry.class(id).exponent;
        let n = t.n() as usize;
        if n >= 2 {
            n6 += 1;
            match registry.exponent_of(&t.prefix(n - 1)) {
                Ok(kp) if k > kp + 1 => {}
                Ok(kp) => {
                    if v6.is_none() {
                        v6 = Some(format!("{t}: exponent {k} <= {kp} + 1"));
                    }
                }
                Err(e) => {
                    if v6.is_none() {
                        v6 = Some(e.to_string());
                    }
                }
            }
        }
        n7 += 1;
        let mut sum = params.lambda(t.start());
        let mut missing = None;
        for j in 1..=n {
            match registry.exponent_of(&t.prefix(j)) {
                Ok(kj) => sum += params.inverse_b(kj),
                Err(e) => missing = Some(e.to_string()),
            }
        }
        let total = sum + params.chain_tail(t.index.last() + 1);
        chain_max = chain_max.max(total);
        // Rounding in the sum is below (n + 2) ulp of a value near 1.
        let slack = (n as f64 + 2.0) * f64::EPSILON * 2.0;
        if (missing.is_some() || total + slack >= params.c) && v7.is_none() {
            v7 = Some(missing.unwrap_or_else(|| format!("{t}: chain sum {total} >= C")));
        }
    }
    if chain_max >= params.c && v7.is_none() {
        v7 = Some(format!("chain bound {chain_max} >= C"));
    }
    props.push(PropertyResult { property: 6, pass: v6.is_none(), checked: n6, violation: v6 });
    props.push(PropertyResult { property: 7, pass: v7.is_none(), checked: n7 + 1, violation: v7 });
    props.sort_by_key(|p| p.property);

    let supremum_attained = registry.classes().iter().any(|c| c.exponent == Ratio::from_integer(3 * c.m as i64));
    let pass = props.iter().all(|p| p.pass);
    BmapReport {
        depth,
        big_l: params.big_l,
        classes: registry.classes().iter().filter(|c| in_depth(&c.representative)).count(),
        properties: props,
        chain_max,
        supremum_attained,
        pass,
    }
}

/// Registered classes with index sequence `(p, ..., p+q)` whose weight lies
/// below that of the matching sub-tuple of `t` (the `(p, q)` condition), or,
/// with `eps` and `(p, q) = (i, n)`, below `L^c(t) / (1 + eps)`.
pub fn exceptional_classes(
    t: &TupleIndex,
    p: u64,
    q: u64,
    eps: Option<f64>,
    params: &Parameters,
    registry: &ClassRegistry,
) -> Result<Vec<usize>, TupleError> {
    let (i, n) = (t.start(), t.n());
    if p < i || p >= i + n || q < 1 || q > i + n - p {
        return Err(TupleError::ExceptionalBounds { p, q });
    }
    let target = ConsecutiveIndex { start: p, len: q + 1 };
    let m = enumeration_index(&target);
    let whole = p == i && q == n;
    let below: Box<dyn Fn(Exponent) -> bool> = match eps {
        Some(e) if whole => {
            let cut = c_value(t) as f64 - (1.0 + e).ln() / (params.big_l as f64).ln();
            Box::new(move |k| ratio_f64(k) < cut)
        }
        _ => {
            let j = (p - i) as usize;
            let k_sub = registry.exponent_of(&t.sub(j, j + q as usize))?;
            Box::new(move |k| k < k_sub)
        }
    };
    Ok(registry.classes_with_m(m).iter().copied().filter(|&id| below(registry.class(id).exponent)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_examples() {
        let want = [(1, 1, 2), (2, 2, 2), (3, 1, 3), (4, 3, 2), (5, 2, 3), (6, 1, 4)];
        for (m, start, len) in want {
            assert_eq!(enumerate(m).unwrap(), ConsecutiveIndex { start, len });
        }
        assert_eq!(enumerate(0), Err(TupleError::ZeroIndex));
    }

    #[test]
    fn round_trip() {
        for m in 1..=10_000 {
            assert_eq!(enumeration_index(&enumerate(m).unwrap()), m);
        }
    }

    #[test]
    fn rows_follow_the_recursion() {
        // a_{k+1} = (i-1, ..., i+n) when i > 1, else (n, n+1).
        for m in 1..2000 {
            let a = enumerate(m).unwrap();
            let b = enumerate(m + 1).unwrap();
            if a.start > 1 {
                assert_eq!(b, ConsecutiveIndex { start: a.start - 1, len: a.len + 1 });
            } else {
                assert_eq!(b, ConsecutiveIndex { start: a.len, len: 2 });
            }
        }
    }

    #[test]
    fn c_values() {
        assert_eq!(c_value(&TupleIndex::new(1, vec![0, 0]).unwrap()), 3);
        assert_eq!(c_value(&TupleIndex::new(1, vec![0, 0, 0]).unwrap()), 9);
        assert_eq!(c_value(&TupleIndex::new(2, vec![0, 4, 1]).unwrap()), 15);
    }

    #[test]
    fn parameters() {
        let p = choose_parameters(1.1).unwrap();
        assert_eq!(p.big_l, 22);
        assert_eq!(p.lambda(1), 1.05);
        assert!(p.property3());
        let p = choose_parameters(1.01).unwrap();
        assert_eq!(p.big_l, 202);
        assert_eq!(p.lambda(1), 1.005);
        assert!(choose_parameters(1.0).is_err());
        assert!(choose_parameters(1.2).is_err());
    }

    #[test]
    fn first_class_exponent() {
        let mut r = ClassRegistry::new();
        let t = TupleIndex::new(1, vec![0, 0]).unwrap();
        let (id, new) = r.classify(&t, || vec![vec![0, 0]]);
        assert!(new);
        assert_eq!(r.class(id).exponent, Ratio::from_integer(2));
        let p = choose_parameters(1.1).unwrap();
        assert_eq!(p.inverse_b(r.class(id).exponent), 1.0 / 484.0);
    }

    fn trivial_registry(depth: u64) -> ClassRegistry {
        let mut r = ClassRegistry::new();
        for m in 1..=enumerated_up_to(depth) {
            let idx = enumerate(m).unwrap();
            let t = TupleIndex { index: idx, gammas: vec![0; idx.len as usize] };
            r.classify(&t, || vec![t.gammas.clone()]);
        }
        r
    }

    #[test]
    fn trivial_group_passes() {
        let p = choose_parameters(1.1).unwrap();
        let r = trivial_registry(6);
        let rep = verify_bmap(&p, 6, &r);
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.classes, 15);
        assert!(!rep.supremum_attained);
    }

    #[test]
    fn corrupted_exponent_breaks_injectivity() {
        let p = choose_parameters(1.1).unwrap();
        let mut r = ClassRegistry::new();
        let t = TupleIndex::new(1, vec![0, 0]).unwrap();
        r.classify(&t, std::vec::Vec::new);
        let s = TupleIndex::new(1, vec![0, 1]).unwrap();
        r.classify(&s, std::vec::Vec::new);
        r.set_exponent(1, r.class(0).exponent);
        let rep = verify_bmap(&p, 2, &r);
        assert!(!rep.properties[0].pass);
        assert!(!rep.pass);
    }

    #[test]
    fn extension_spot_check() {
        let p = choose_parameters(1.1).unwrap();
        let r = trivial_registry(3);
        let t = TupleIndex::new(1, vec![0, 0]).unwrap();
        let t2 = TupleIndex::new(1, vec![0, 0, 0]).unwrap();
        let b = |x: &TupleIndex| 1.0 / p.inverse_b(r.exponent_of(x).unwrap());
        assert!(b(&t2) > 22.0 * b(&t));
        // property 5 for (2,3,4): c = 15, k = 14 >= 8.
        let r4 = trivial_registry(4);
        let u = TupleIndex::new(2, vec![0, 0, 0]).unwrap();
        assert_eq!(r4.exponent_of(&u).unwrap(), Ratio::from_integer(14));
    }

    #[test]
    fn exceptional_examples() {
        let p = choose_parameters(1.1).unwrap();
        let t = TupleIndex::new(1, vec![0, 1, 0]).unwrap();
        let mut single = ClassRegistry::new();
        single.classify(&t.sub(0, 1), std::vec::Vec::new);
        assert!(exceptional_classes(&t, 1, 1, None, &p, &single).unwrap().is_empty());

        let mut two = ClassRegistry::new();
        let first = two.insert_class(TupleIndex::new(1, vec![0, 0]).unwrap(), vec![], None);
        two.insert_class(t.sub(0, 1), vec![], None);
        assert_eq!(exceptional_classes(&t, 1, 1, None, &p, &two).unwrap(), vec![first]);
        assert!(exceptional_classes(&t, 0, 1, None, &p, &two).is_err());
        assert!(exceptional_classes(&t, 2, 2, None, &p, &two).is_err());

        let mut whole = ClassRegistry::new();
        let c = c_value(&t) as i64;
        let id = whole.insert_class(t.clone(), vec![], Some(Ratio::from_integer(c - 1)));
        assert_eq!(exceptional_classes(&t, 1, 2, Some(0.1), &p, &whole).unwrap(), vec![id]);
    }
}
