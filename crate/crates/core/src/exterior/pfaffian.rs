use super::blade::Blade;
use super::multivector::Multivector;
use crate::error::{Error, Result};
use crate::scalar::Coeff;

const FLOAT_REL_TOL: f64 = 1e-12;

fn antisymmetric_pair<C: Coeff>(a: &C, b: &C) -> bool {
    let sum = a.clone() + b.clone();
    if C::is_exact() {
        sum.is_zero()
    } else {
        let scale = a.to_f64().abs().max(b.to_f64().abs());
        sum.to_f64().abs() <= FLOAT_REL_TOL * scale
    }
}

/// Classical Pfaffian by recursive expansion along the first row.
pub fn pfaffian_classical<C: Coeff>(a: &[Vec<C>]) -> Result<C> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidShape("matrix is not square".into()));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::OddDimension(n));
    }
    for i in 0..n {
        for j in i..n {
            if !antisymmetric_pair(&a[i][j], &a[j][i]) {
                return Err(Error::NotAntisymmetric(i, j));
            }
        }
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(expand(a, &idx))
}

fn expand<C: Coeff>(a: &[Vec<C>], idx: &[usize]) -> C {
    if idx.is_empty() {
        return C::one();
    }
    let first = idx[0];
    let mut acc = C::zero();
    for pos in 1..idx.len() {
        let entry = &a[first][idx[pos]];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|(k, _)| *k + 1 != pos)
            .map(|(_, &i)| i)
            .collect();
        let term = entry.clone() * expand(a, &rest);
        // (-1)^(pos+1) with pos counted from 0 in idx
        acc = if pos % 2 == 1 { acc + term } else { acc - term };
    }
    acc
}

/// The 2-form `sum_{j<k} a_jk e_j ∧ e_k` of an antisymmetric array.
pub fn two_form<C: Coeff>(a: &[Vec<C>]) -> Result<Multivector<C>> {
    let n = a.len();
    let mut terms = Vec::new();
    for (j, row) in a.iter().enumerate() {
        for (k, c) in row.iter().enumerate().skip(j + 1) {
            terms.push((Blade::single(j).union(Blade::single(k)), c.clone()));
        }
    }
    Multivector::from_terms(n, terms)
}

/// Antisymmetric array of a 2-form (grade-2 part only).
pub fn two_form_matrix<C: Coeff>(form: &Multivector<C>) -> Vec<Vec<C>> {
    let n = form.dim();
    let mut a = vec![vec![C::zero(); n]; n];
    for (b, c) in form.iter() {
        if b.grade() != 2 {
            continue;
        }
        let mut d = b.degrees();
        let (j, k) = (d.next().unwrap(), d.next().unwrap());
        a[j][k] = c.clone();
        a[k][j] = -c.clone();
    }
    a
}
