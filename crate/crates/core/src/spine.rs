//! The momentum algebra: momentum modes `epsilon_p`, projections,
//! structure coefficients and momentum Plücker residuals.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{combinations, wronskian_weight, Blade, ModelShape, Multivector};
use crate::scalar::Coeff;

/// Default ceiling on `C(N, L)` for table construction.
pub const DEFAULT_BLADE_CEILING: u128 = 1 << 20;

const TABLE_FORMAT: &str = "structure-v1";

/// Degree sum of the grade-`m L` blades carrying momentum `p`.
fn target_degree_sum(shape: &ModelShape, m: usize, p: i64) -> i64 {
    let ml = (m * shape.charge()) as i64;
    ml * (shape.dim() as i64 - 1) / 2 + p
}

/// The momentum mode `epsilon_p`: all grade-`L` blades of momentum `p`,
/// weighted by their Wronskian weight. Zero when `|p| > K`.
pub fn epsilon<C: Coeff>(p: i64, shape: &ModelShape) -> Multivector<C> {
    let n = shape.dim();
    if p.abs() > shape.radius() {
        return Multivector::zero(n);
    }
    let target = target_degree_sum(shape, 1, p);
    let terms = combinations(n, shape.charge())
        .filter(|b| b.degree_sum() == target)
        .map(|b| (b, C::from_bigint(&wronskian_weight(b))));
    Multivector::from_terms(n, terms).expect("blades lie inside the space")
}

/// All momentum modes of a shape, indexed by `p` in `[-K, K]`.
#[derive(Debug, Clone)]
pub struct Spine<C> {
    shape: ModelShape,
    modes: Vec<Multivector<C>>,
}

impl<C: Coeff> Spine<C> {
    pub fn new(shape: &ModelShape) -> Self {
        let k = shape.radius();
        let n = shape.dim();
        let mut modes = vec![Multivector::zero(n); (2 * k + 1) as usize];
        let base = target_degree_sum(shape, 1, 0);
        for b in combinations(n, shape.charge()) {
            let p = b.degree_sum() - base;
            let w = C::from_bigint(&wronskian_weight(b));
            modes[(p + k) as usize] = modes[(p + k) as usize]
                .add(&Multivector::term(n, b, w))
                .expect("same dimension");
        }
        Spine {
            shape: *shape,
            modes,
        }
    }

    pub fn shape(&self) -> &ModelShape {
        &self.shape
    }

    /// `epsilon_p`, or `None` outside `|p| <= K`.
    pub fn mode(&self, p: i64) -> Option<&Multivector<C>> {
        let k = self.shape.radius();
        (p.abs() <= k).then(|| &self.modes[(p + k) as usize])
    }

    pub fn momenta(&self) -> std::ops::RangeInclusive<i64> {
        let k = self.shape.radius();
        -k..=k
    }

    /// `sum_p coeff(p) epsilon_p` over `|p| <= K`.
    pub fn combine(&self, coeff: impl Fn(i64) -> C) -> Multivector<C> {
        let mut acc = Multivector::zero(self.shape.dim());
        for p in self.momenta() {
            let c = coeff(p);
            if !c.is_zero() {
                acc = acc.add(&self.modes[(p + self.shape.radius()) as usize].scale(&c))
                    .expect("same dimension");
            }
        }
        acc
    }
}

/// Projection `pi_p^m`: keeps blades of grade `m L` whose degree sum is
/// `m L (N-1)/2 + p`.
pub fn momentum_project<C: Coeff>(
    a: &Multivector<C>,
    m: usize,
    p: i64,
    shape: &ModelShape,
) -> Multivector<C> {
    let grade = m * shape.charge();
    let target = target_degree_sum(shape, m, p);
    a.filter(|b| b.grade() == grade && b.degree_sum() == target)
}

/// Universal structure coefficients `C_P = star(epsilon_{p_1} ∧ ... ∧ epsilon_{p_M})`
/// keyed by weakly increasing zero-sum tuples. Zero entries are omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTable {
    shape: ModelShape,
    entries: BTreeMap<Vec<i64>, BigInt>,
}

/// Every weakly increasing `len`-tuple over `[-k, k]` summing to `total`.
pub fn zero_sum_keys(len: usize, k: i64, total: i64) -> Vec<Vec<i64>> {
    fn rec(prefix: &mut Vec<i64>, len: usize, k: i64, remaining: i64, out: &mut Vec<Vec<i64>>) {
        let left = (len - prefix.len()) as i64;
        if left == 0 {
            if remaining == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let lo = prefix.last().copied().unwrap_or(-k);
        for p in lo..=k {
            // remaining entries are all >= p and <= k
            if remaining < p * left || remaining > k * left {
                continue;
            }
            prefix.push(p);
            rec(prefix, len, k, remaining - p, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(len), len, k, total, &mut out);
    out
}

impl StructureTable {
    pub fn build(shape: &ModelShape) -> Result<Self> {
        Self::build_with_ceiling(shape, DEFAULT_BLADE_CEILING)
    }

    pub fn build_with_ceiling(shape: &ModelShape, ceiling: u128) -> Result<Self> {
        let size = shape.blade_count();
        if size > ceiling {
            return Err(Error::ResourceGuard {
                what: "C(N, L)",
                size,
                ceiling,
            });
        }
        let spine: Spine<num_rational::BigRational> = Spine::new(shape);
        let m = shape.particles();
        let k = shape.radius();
        let n = shape.dim();

        // Group keys by their (M-1)-prefix so each prefix wedge is built once.
        let mut by_prefix: BTreeMap<Vec<i64>, Vec<i64>> = BTreeMap::new();
        for key in zero_sum_keys(m, k, 0) {
            let last = key[m - 1];
            by_prefix.entry(key[..m - 1].to_vec()).or_default().push(last);
        }
        let groups: Vec<(Vec<i64>, Vec<i64>)> = by_prefix.into_iter().collect();
        let computed: Vec<Vec<(Vec<i64>, BigInt)>> = groups
            .par_iter()
            .map(|(prefix, lasts)| {
                let factors: Vec<&Multivector<_>> =
                    prefix.iter().map(|p| spine.mode(*p).unwrap()).collect();
                let wedge = Multivector::wedge_all(n, factors).expect("same dimension");
                lasts
                    .iter()
                    .filter_map(|last| {
                        let c = wedge.star_wedge(spine.mode(*last).unwrap()).unwrap();
                        debug_assert!(c.is_integer());
                        let c = c.to_integer();
                        (!c.is_zero()).then(|| {
                            let mut key = prefix.clone();
                            key.push(*last);
                            (key, c)
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(StructureTable {
            shape: *shape,
            entries: computed.into_iter().flatten().collect(),
        })
    }

    pub fn shape(&self) -> &ModelShape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &BTreeMap<Vec<i64>, BigInt> {
        &self.entries
    }

    /// `C_P` for any ordering of `P`; zero when absent.
    pub fn get(&self, p: &[i64]) -> BigInt {
        let mut key = p.to_vec();
        key.sort_unstable();
        self.entries.get(&key).cloned().unwrap_or_default()
    }

    /// `(1/M!) sum_{P} C_P prod m̂_{p_i}` over ordered tuples, i.e. the
    /// partition function of the shifted moments `shifted`.
    pub fn partition<C: Coeff>(&self, shifted: impl Fn(i64) -> C) -> C {
        let mut acc = C::zero();
        for (key, c) in &self.entries {
            let mut term = C::from_bigint(c);
            for p in key {
                term = term * shifted(*p);
            }
            acc = acc + term / C::from_bigint(&multiplicity_factorials(key));
        }
        acc
    }

    /// `(1/(M-1)!) sum C_{(q, p_1..p_{M-1})} prod m̂_{p_i}` over ordered
    /// `(M-1)`-tuples: the table expansion of `star(epsilon_q ∧ gamma^{∧(M-1)}/(M-1)!)`.
    pub fn insertion<C: Coeff>(&self, q: i64, shifted: impl Fn(i64) -> C) -> C {
        let mut acc = C::zero();
        for (key, c) in &self.entries {
            let Some(pos) = key.iter().position(|p| *p == q) else {
                continue;
            };
            let rest: Vec<i64> = key
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != pos)
                .map(|(_, p)| *p)
                .collect();
            let mut term = C::from_bigint(c);
            for p in &rest {
                term = term * shifted(*p);
            }
            acc = acc + term / C::from_bigint(&multiplicity_factorials(&rest));
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(k, c)| json!([k, c.to_string()]))
            .collect();
        json!({
            "L": self.shape.charge(),
            "M": self.shape.particles(),
            "K": self.shape.radius(),
            "entries": entries,
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let header = |name: &str| -> Result<usize> {
            match &value[name] {
                Value::Number(n) => n.as_u64().map(|v| v as usize),
                Value::String(s) => s.parse().ok(),
                _ => None,
            }
            .ok_or_else(|| Error::Parse(format!("structure table: bad header {name:?}")))
        };
        let shape = ModelShape::new(header("L")?, header("M")?)?;
        if header("K")? as i64 != shape.radius() {
            return Err(Error::Parse("structure table: K does not match L, M".into()));
        }
        let bad = || Error::Parse("structure table: malformed entry".into());
        let mut entries = BTreeMap::new();
        for entry in value["entries"].as_array().ok_or_else(bad)? {
            let pair = entry.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
            let mut key = pair[0]
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|v| match v {
                    Value::Number(n) => n.as_i64(),
                    Value::String(s) => s.parse().ok(),
                    _ => None,
                })
                .collect::<Option<Vec<i64>>>()
                .ok_or_else(bad)?;
            key.sort_unstable();
            if key.len() != shape.particles()
                || key.iter().sum::<i64>() != 0
                || key.iter().any(|p| p.abs() > shape.radius())
            {
                return Err(Error::Parse(format!("structure table: invalid key {key:?}")));
            }
            let c: BigInt = pair[1].as_str().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if !c.is_zero() {
                entries.insert(key, c);
            }
        }
        Ok(StructureTable { shape, entries })
    }

    pub fn cache_path(dir: &Path, shape: &ModelShape) -> PathBuf {
        dir.join(TABLE_FORMAT).join(format!(
            "L{}-M{}.json",
            shape.charge(),
            shape.particles()
        ))
    }

    /// Loads a cached table, building and storing it when missing.
    pub fn load_or_build(shape: &ModelShape, cache_dir: Option<&Path>) -> Result<Self> {
        let Some(dir) = cache_dir else {
            return Self::build(shape);
        };
        let path = Self::cache_path(dir, shape);
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(table) = serde_json::from_str(&text)
                .map_err(Error::from)
                .and_then(|v| Self::from_json(&v))
            {
                if table.shape == *shape {
                    return Ok(table);
                }
            }
        }
        let table = Self::build(shape)?;
        std::fs::create_dir_all(path.parent().unwrap())?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        std::fs::write(&tmp, serde_json::to_string(&table.to_json())?)?;
        std::fs::rename(&tmp, &path)?;
        Ok(table)
    }
}

/// `prod mult!` over the multiplicities of the entries of a sorted key.
fn multiplicity_factorials(key: &[i64]) -> BigInt {
    let mut out = BigInt::from(1);
    let mut run = 0u64;
    for i in 0..key.len() {
        run = if i > 0 && key[i] == key[i - 1] { run + 1 } else { 1 };
        out *= run;
    }
    out
}

/// Number of ordered `M`-tuples over `[-K, K]` with zero sum.
pub fn ordered_zero_sum_count(shape: &ModelShape) -> u128 {
    let k = shape.radius();
    let width = (2 * k + 1) as usize;
    // counts[s] = number of ordered tuples with sum s - j*k so far
    let mut counts = vec![1u128];
    for _ in 0..shape.particles() {
        let mut next = vec![0u128; counts.len() + width - 1];
        for (s, c) in counts.iter().enumerate() {
            for d in 0..width {
                next[s + d] += c;
            }
        }
        counts = next;
    }
    counts[(k as usize) * shape.particles()]
}

/// `r_n = sum_{p+q=n} epsilon_p ∧ epsilon_q`.
pub fn plucker_residual<C: Coeff>(n: i64, spine: &Spine<C>) -> Multivector<C> {
    let mut acc = Multivector::zero(spine.shape().dim());
    for p in spine.momenta() {
        if let Some(eq) = spine.mode(n - p) {
            let term = spine.mode(p).unwrap().wedge(eq).expect("same dimension");
            acc = acc.add(&term).expect("same dimension");
        }
    }
    acc
}

/// `sum_{p_1+...+p_j=n} epsilon_{p_1} ∧ ... ∧ epsilon_{p_j}` for `2 <= j <= M`.
pub fn higher_plucker_residual<C: Coeff>(n: i64, j: usize, spine: &Spine<C>) -> Result<Multivector<C>> {
    let m = spine.shape().particles();
    if j < 2 || j > m {
        return Err(Error::OutOfRange(format!("order j = {j} (need 2 <= j <= {m})")));
    }
    Ok(power_sums(j, spine).remove(&n).unwrap_or_else(|| Multivector::zero(spine.shape().dim())))
}

/// All momentum components of `(sum_p epsilon_p)^{∧j}` over ordered tuples,
/// keyed by total momentum.
pub fn power_sums<C: Coeff>(j: usize, spine: &Spine<C>) -> BTreeMap<i64, Multivector<C>> {
    let dim = spine.shape().dim();
    let mut level: BTreeMap<i64, Multivector<C>> = BTreeMap::new();
    level.insert(0, Multivector::one(dim));
    for _ in 0..j {
        let mut next: BTreeMap<i64, Multivector<C>> = BTreeMap::new();
        for (s, acc) in &level {
            for p in spine.momenta() {
                let term = spine.mode(p).unwrap().wedge(acc).expect("same dimension");
                if term.is_zero() {
                    continue;
                }
                let slot = next.entry(s + p).or_insert_with(|| Multivector::zero(dim));
                *slot = slot.add(&term).expect("same dimension");
            }
        }
        level = next;
    }
    level
}

/// Finite-band Toeplitz operator `epsilon_q -> sum_j T_{q-j} epsilon_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzOperator<C> {
    band: BTreeMap<i64, C>,
}

impl<C: Coeff> ToeplitzOperator<C> {
    pub fn new(band: impl IntoIterator<Item = (i64, C)>) -> Self {
        ToeplitzOperator {
            band: band.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn identity() -> Self {
        Self::new([(0, C::one())])
    }

    pub fn band(&self) -> &BTreeMap<i64, C> {
        &self.band
    }

    /// `T epsilon_q`, for any integer `q`; modes with `|j| > K` vanish.
    pub fn apply(&self, q: i64, spine: &Spine<C>) -> Multivector<C> {
        let mut acc = Multivector::zero(spine.shape().dim());
        for (offset, t) in &self.band {
            if let Some(mode) = spine.mode(q - offset) {
                acc = acc.add(&mode.scale(t)).expect("same dimension");
            }
        }
        acc
    }
}

/// `r_{n,T} = sum_{p+q=n} epsilon_p ∧ T epsilon_q`, summed over `|p| <= K`.
pub fn toeplitz_residual<C: Coeff>(
    op: &ToeplitzOperator<C>,
    n: i64,
    spine: &Spine<C>,
) -> Multivector<C> {
    let mut acc = Multivector::zero(spine.shape().dim());
    for p in spine.momenta() {
        let rhs = op.apply(n - p, spine);
        if rhs.is_zero() {
            continue;
        }
        let term = spine.mode(p).unwrap().wedge(&rhs).expect("same dimension");
        acc = acc.add(&term).expect("same dimension");
    }
    acc
}

/// Whether every stored blade of `a` has grade `N` and momentum zero.
pub fn saturated_momentum_is_zero<C: Coeff>(a: &Multivector<C>, shape: &ModelShape) -> bool {
    a.terms()
        .keys()
        .filter(|b| b.grade() == shape.dim())
        .all(|b: &Blade| b.momentum(shape.dim()) == Some(0))
}
