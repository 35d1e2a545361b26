use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::blade::{combinations, Blade};
use super::multivector::Multivector;
use super::ModelShape;
use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial, pow, Coeff};

/// Grade-1 form `v(x) = sum_r x^r e_r`.
pub fn fermion_vector<C: Coeff>(x: &C, dim: usize) -> Multivector<C> {
    derivative_vector(x, 0, dim)
}

/// `D^l v(x)` with `D^l = (1/l!) d^l/dx^l`: slot `r` carries `C(r,l) x^(r-l)`.
pub fn derivative_vector<C: Coeff>(x: &C, l: usize, dim: usize) -> Multivector<C> {
    let terms = (l..dim).map(|r| {
        let c = C::from_bigint(&binomial(r as u64, l as u64)) * pow(x, (r - l) as u32);
        (Blade::single(r), c)
    });
    Multivector::from_terms(dim, terms).expect("slots lie inside the space")
}

/// Plücker coordinate weight of `V_L` on rows `J`:
/// `prod_{i<k}(r_k - r_i) / (0! 1! ... (L-1)!)`, an integer.
pub fn wronskian_weight(blade: Blade) -> BigInt {
    let r: Vec<i64> = blade.degrees().map(|d| d as i64).collect();
    let mut num = BigInt::one();
    for k in 0..r.len() {
        for i in 0..k {
            num *= r[k] - r[i];
        }
    }
    let den = (0..r.len() as u64).fold(BigInt::one(), |acc, l| acc * factorial(l));
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// The charge-`L` particle at `x`: coefficient of `e_J` is
/// `wronskian_weight(J) * x^(sum J - L(L-1)/2)`.
pub fn omega<C: Coeff>(x: &C, shape: &ModelShape) -> Multivector<C> {
    let offset = shape.wronskian_offset();
    let terms = combinations(shape.dim(), shape.charge()).map(|b| {
        let e = (b.degree_sum() - offset) as u32;
        (b, C::from_bigint(&wronskian_weight(b)) * pow(x, e))
    });
    Multivector::from_terms(shape.dim(), terms).expect("blades lie inside the space")
}

/// `v(x) ∧ D^1 v(x) ∧ ... ∧ D^(L-1) v(x)`, built literally from the
/// derivative columns.
pub fn omega_from_derivatives<C: Coeff>(x: &C, shape: &ModelShape) -> Result<Multivector<C>> {
    let n = shape.dim();
    let cols: Vec<Multivector<C>> = (0..shape.charge())
        .map(|l| derivative_vector(x, l, n))
        .collect();
    Multivector::wedge_all(n, &cols)
}

/// `a^{∧k} / k!`, accumulated as `D_j = (D_{j-1} ∧ a) / j`.
pub fn divided_wedge_power<C: Coeff>(a: &Multivector<C>, k: usize) -> Result<Multivector<C>> {
    if let Some(g) = a.grades().into_iter().find(|g| g % 2 == 1) {
        return Err(Error::OddGrade(g));
    }
    let mut acc = Multivector::one(a.dim());
    for j in 1..=k {
        if acc.is_zero() {
            break;
        }
        acc = acc.wedge(a)?.scale(&(C::one() / C::from_i64(j as i64)));
    }
    Ok(acc)
}

fn check_grade_l<C: Coeff>(a: &Multivector<C>, shape: &ModelShape) -> Result<()> {
    if a.dim() != shape.dim() {
        return Err(Error::ShapeMismatch {
            left: a.dim(),
            right: shape.dim(),
        });
    }
    if let Some(b) = a.terms().keys().find(|b| b.grade() != shape.charge()) {
        return Err(Error::GradeMismatch {
            expected: shape.charge(),
            found: b.grade().to_string(),
        });
    }
    Ok(())
}

/// `star(a^{∧M} / M!)` for a grade-`L` form.
pub fn hyperpfaffian<C: Coeff>(a: &Multivector<C>, shape: &ModelShape) -> Result<C> {
    check_grade_l(a, shape)?;
    let m = shape.particles();
    let background = divided_wedge_power(a, m - 1)?;
    Ok(background.star_wedge(a)? / C::from_i64(m as i64))
}
