use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use rayon::prelude::*;
use serde_json::{Map, Value};

use super::blade::{Blade, MAX_DIM};
use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, Coeff};

/// Products with at least this many term pairs are expanded in parallel.
const PAR_THRESHOLD: usize = 1 << 14;
/// Left-operand terms per parallel chunk. Fixed so float reductions do not
/// depend on the worker count.
const CHUNK: usize = 32;

/// Sparse element of the exterior algebra over an `dim`-dimensional space.
///
/// Terms are kept in canonical (lexicographic) blade order with no stored
/// zeros, so equal elements have identical representations.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector<C = BigRational> {
    dim: usize,
    terms: BTreeMap<Blade, C>,
}

impl<C: Coeff> Multivector<C> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Multivector {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// The grade-0 element `c`.
    pub fn scalar(dim: usize, c: C) -> Self {
        Self::term(dim, Blade::EMPTY, c)
    }

    pub fn one(dim: usize) -> Self {
        Self::scalar(dim, C::one())
    }

    pub fn term(dim: usize, blade: Blade, c: C) -> Self {
        let mut m = Self::zero(dim);
        assert!(blade.span() <= dim, "blade {blade:?} outside dimension {dim}");
        m.accumulate(blade, c);
        m
    }

    /// Sums repeated blades; rejects blades outside the space.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Blade, C)>,
    {
        if dim > MAX_DIM {
            return Err(Error::InvalidShape(format!("dimension {dim} exceeds {MAX_DIM}")));
        }
        let mut m = Self::zero(dim);
        for (b, c) in terms {
            if b.span() > dim {
                return Err(Error::OutOfRange(format!("blade {b:?} in dimension {dim}")));
            }
            m.accumulate(b, c);
        }
        Ok(m)
    }

    pub(crate) fn accumulate(&mut self, blade: Blade, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(blade) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<Blade, C> {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Blade, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, blade: Blade) -> C {
        self.terms.get(&blade).cloned().unwrap_or_else(C::zero)
    }

    pub fn grades(&self) -> BTreeSet<usize> {
        self.terms.keys().map(|b| b.grade()).collect()
    }

    /// The common grade of all terms, if there is exactly one.
    pub fn homogeneous_grade(&self) -> Option<usize> {
        let g = self.grades();
        (g.len() == 1).then(|| *g.iter().next().unwrap())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.accumulate(*b, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_zero() {
            return Self::zero(self.dim);
        }
        self.map(|c| c.clone() * k.clone())
    }

    fn map(&self, f: impl Fn(&C) -> C) -> Self {
        let mut out = Self::zero(self.dim);
        for (b, c) in &self.terms {
            out.accumulate(*b, f(c));
        }
        out
    }

    /// Converts coefficients into another field.
    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Multivector<D> {
        let mut out = Multivector::<D>::zero(self.dim);
        for (b, c) in &self.terms {
            out.accumulate(*b, f(c));
        }
        out
    }

    /// Keeps the terms whose blade satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(Blade) -> bool) -> Self {
        Multivector {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| keep(**b))
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }

    pub fn grade_part(&self, grade: usize) -> Self {
        self.filter(|b| b.grade() == grade)
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let rhs: Vec<(Blade, &C)> = other.terms.iter().map(|(b, c)| (*b, c)).collect();
        let expand = |chunk: &[(&Blade, &C)]| {
            let mut part: BTreeMap<Blade, C> = BTreeMap::new();
            for (ja, ca) in chunk {
                for (jb, cb) in &rhs {
                    let s = ja.merge_sign(*jb);
                    if s == 0 {
                        continue;
                    }
                    let prod = (*ca).clone() * (*cb).clone();
                    let prod = if s < 0 { -prod } else { prod };
                    let key = ja.union(*jb);
                    match part.get_mut(&key) {
                        Some(acc) => *acc = acc.clone() + prod,
                        None => {
                            part.insert(key, prod);
                        }
                    }
                }
            }
            part
        };
        let lhs: Vec<(&Blade, &C)> = self.terms.iter().collect();
        let partials: Vec<BTreeMap<Blade, C>> = if lhs.len() * rhs.len() >= PAR_THRESHOLD {
            lhs.par_chunks(CHUNK).map(expand).collect()
        } else {
            lhs.chunks(CHUNK).map(expand).collect()
        };
        let mut out = Self::zero(self.dim);
        for part in partials {
            for (b, c) in part {
                out.accumulate(b, c);
            }
        }
        Ok(out)
    }

    /// Wedge of a sequence, left to right. The empty product is 1.
    pub fn wedge_all<'a, I>(dim: usize, factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Self>,
    {
        let mut acc = Self::one(dim);
        for f in factors {
            acc = acc.wedge(f)?;
        }
        Ok(acc)
    }

    /// Coefficient of the volume blade `e_I`.
    pub fn star(&self) -> C {
        self.coeff(Blade::full(self.dim))
    }

    /// `star(self ∧ other)` without forming the product.
    pub fn star_wedge(&self, other: &Self) -> Result<C> {
        self.check_dim(other)?;
        let full = Blade::full(self.dim);
        let mut acc = C::zero();
        for (ja, ca) in &self.terms {
            let comp = Blade::from_bits(full.bits() ^ ja.bits());
            if let Some(cb) = other.terms.get(&comp) {
                let prod = ca.clone() * cb.clone();
                acc = if ja.merge_sign(comp) < 0 {
                    acc - prod
                } else {
                    acc + prod
                };
            }
        }
        Ok(acc)
    }
}

impl Multivector<BigRational> {
    /// JSON object mapping `"r1,r2,..."` to `"num/den"`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (b, c) in &self.terms {
            map.insert(b.key(), Value::String(format_rational(c)));
        }
        Value::Object(map)
    }

    pub fn from_json(dim: usize, value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("multivector must be a JSON object".into()))?;
        let mut terms = Vec::with_capacity(obj.len());
        for (k, v) in obj {
            let s = v
                .as_str()
                .ok_or_else(|| Error::Parse(format!("coefficient of {k:?} must be a string")))?;
            terms.push((Blade::parse_key(k)?, parse_rational(s)?));
        }
        Self::from_terms(dim, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn e(dim: usize, d: &[usize]) -> Multivector {
        Multivector::term(dim, Blade::from_degrees(d).unwrap(), int(1))
    }

    #[test]
    fn basic_wedges() {
        let e0 = e(4, &[0]);
        let e1 = e(4, &[1]);
        assert_eq!(e0.wedge(&e1).unwrap(), e(4, &[0, 1]));
        assert_eq!(e1.wedge(&e0).unwrap(), e(4, &[0, 1]).neg());
        let a = e0.add(&e1).unwrap();
        let b = e0.sub(&e1).unwrap();
        assert_eq!(a.wedge(&b).unwrap(), e(4, &[0, 1]).scale(&int(-2)));
        assert!(e0.wedge(&e0).unwrap().is_zero());
    }

    #[test]
    fn star_projection() {
        let v = e(4, &[0, 1, 2, 3])
            .scale(&ratio(7, 3))
            .add(&e(4, &[0]).scale(&int(5)))
            .unwrap();
        assert_eq!(v.star(), ratio(7, 3));
        assert_eq!(e(4, &[0, 1, 2, 3]).star(), int(1));
        assert_eq!(e(4, &[0, 1, 2]).star(), int(0));
    }

    #[test]
    fn star_wedge_matches_product() {
        let a = e(4, &[0, 2]).add(&e(4, &[1, 3]).scale(&int(3))).unwrap();
        let b = e(4, &[1, 3]).add(&e(4, &[0, 2]).scale(&ratio(1, 2))).unwrap();
        assert_eq!(a.star_wedge(&b).unwrap(), a.wedge(&b).unwrap().star());
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let err = e(4, &[0]).wedge(&e(5, &[1])).unwrap_err();
        assert_eq!(err, Error::ShapeMismatch { left: 4, right: 5 });
    }

    #[test]
    fn no_stored_zeros() {
        let a = e(4, &[0]).sub(&e(4, &[0])).unwrap();
        assert!(a.is_zero());
        assert!(Multivector::from_terms(4, [(Blade::single(1), int(0))])
            .unwrap()
            .is_zero());
        assert!(Multivector::from_terms(4, [(Blade::single(4), int(1))]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let a = e(4, &[0, 2]).scale(&ratio(-5, 7)).add(&e(4, &[]).scale(&int(2))).unwrap();
        let j = a.to_json();
        assert_eq!(j["0,2"], "-5/7");
        assert_eq!(j[""], "2");
        assert_eq!(Multivector::from_json(4, &j).unwrap(), a);
    }

    #[test]
    fn grades() {
        let a = e(4, &[0, 2]).add(&e(4, &[1])).unwrap();
        assert_eq!(a.homogeneous_grade(), None);
        assert_eq!(a.grade_part(2), e(4, &[0, 2]));
        assert_eq!(e(4, &[1, 2]).homogeneous_grade(), Some(2));
    }
}
