use std::collections::BTreeMap;

use num_rational::BigRational;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, pow, Coeff};

/// Finite Laurent polynomial in the spectral parameter `z`; zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPolynomial<C = BigRational> {
    terms: BTreeMap<i64, C>,
}

impl<C: Coeff> Default for LaurentPolynomial<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> LaurentPolynomial<C> {
    pub fn zero() -> Self {
        LaurentPolynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(exp: i64, c: C) -> Self {
        Self::from_terms([(exp, c)])
    }

    /// Sums repeated exponents and drops zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, C)>) -> Self {
        let mut acc: BTreeMap<i64, C> = BTreeMap::new();
        for (e, c) in terms {
            let slot = acc.entry(e).or_insert_with(C::zero);
            *slot = slot.clone() + c;
        }
        acc.retain(|_, c| !c.is_zero());
        LaurentPolynomial { terms: acc }
    }

    pub fn terms(&self) -> &BTreeMap<i64, C> {
        &self.terms
    }

    pub fn coeff(&self, exp: i64) -> C {
        self.terms.get(&exp).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(e, c)| (*e, c.clone())),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().flat_map(|(e1, c1)| {
            other
                .terms
                .iter()
                .map(move |(e2, c2)| (e1 + e2, c1.clone() * c2.clone()))
        }))
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, c.clone() * k.clone())))
    }

    /// Value at `z`; `z = 0` is rejected when negative powers are present.
    pub fn eval(&self, z: &C) -> Result<C> {
        if z.is_zero() && self.min_exp().is_some_and(|e| e < 0) {
            return Err(Error::OutOfRange("negative power evaluated at z = 0".into()));
        }
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let zp = if *e >= 0 {
                pow(z, *e as u32)
            } else {
                C::one() / pow(z, (-*e) as u32)
            };
            acc = acc + c.clone() * zp;
        }
        Ok(acc)
    }
}

impl LaurentPolynomial<BigRational> {
    /// `{"exponent": "coefficient"}`, exponents in ascending order.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (e, c) in &self.terms {
            map.insert(e.to_string(), Value::String(format_rational(c)));
        }
        Value::Object(map)
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("Laurent polynomial must be a JSON object".into()))?;
        let mut terms = Vec::new();
        for (k, v) in obj {
            let e: i64 = k
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent {k:?}")))?;
            let c = v
                .as_str()
                .ok_or_else(|| Error::Parse(format!("coefficient at {k} must be a string")))?;
            terms.push((e, parse_rational(c)?));
        }
        Ok(Self::from_terms(terms))
    }
}

impl LaurentPolynomial<f64> {
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (e, c) in &self.terms {
            map.insert(e.to_string(), Value::from(*c));
        }
        Value::Object(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn arithmetic_and_eval() {
        let a = LaurentPolynomial::from_terms([(0, int(1)), (1, int(1))]);
        let b = LaurentPolynomial::from_terms([(0, int(1)), (-1, int(-1))]);
        let p = a.mul(&b);
        // (1 + z)(1 - 1/z) = z - 1/z
        assert_eq!(p, LaurentPolynomial::from_terms([(1, int(1)), (-1, int(-1))]));
        assert_eq!(p.eval(&int(2)).unwrap(), ratio(3, 2));
        assert!(p.eval(&int(0)).is_err());
        assert_eq!(a.eval(&int(0)).unwrap(), int(1));
        assert!(a.add(&a.scale(&int(-1))).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let p = LaurentPolynomial::from_terms([(-3, ratio(2, 15)), (4, int(1)), (0, int(0))]);
        let j = p.to_json();
        assert_eq!(j.to_string(), r#"{"-3":"2/15","4":"1"}"#);
        assert_eq!(LaurentPolynomial::from_json(&j).unwrap(), p);
        assert!(LaurentPolynomial::from_json(&serde_json::json!({"x": "1"})).is_err());
    }
}
