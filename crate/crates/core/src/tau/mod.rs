//! Tau functions, Miwa shifts, the wave functions `psi^-`/`psi^+`,
//! extraction by adjunction and the Hirota residue.
//!
//! Backgrounds are given by moment sequences only; times never appear.
//! Laurent coefficients are bare values in units of the moment scale tag.

mod laurent;

pub use laurent::LaurentPolynomial;

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::ensemble::{insertion_amplitudes, partition_function, MomentSequence, Route};
use crate::error::{Error, Result};
use crate::exterior::ModelShape;
use crate::scalar::{binomial, pow, Coeff, Scalar};

/// `tau_M = star(gamma^{∧M} / M!)`, i.e. the partition function.
pub fn tau<C: Coeff>(moments: &MomentSequence<C>, shape: &ModelShape) -> Result<Scalar<C>> {
    partition_function(moments, shape, Route::Hyperpfaffian)
}

/// Bare `tau_m` with the convention `tau_0 = 1`.
fn tau_value<C: Coeff>(moments: &MomentSequence<C>, l: usize, m: usize) -> Result<C> {
    if m == 0 {
        return Ok(C::one());
    }
    Ok(tau(moments, &ModelShape::new(l, m)?)?.value)
}

/// Moments of `z^{-L^2} (z - x)^{L^2} dmu(x)`:
/// `m'_k = z^{-L^2} sum_j C(L^2, j) z^{L^2-j} (-1)^j m_{k+j}`.
///
/// Returns every `m'_k` the input supports, i.e. `k <= D - L^2`.
pub fn miwa_negative_moments<C: Coeff>(
    moments: &MomentSequence<C>,
    z: &C,
    shape: &ModelShape,
) -> Result<MomentSequence<C>> {
    if z.is_zero() {
        return Err(Error::OutOfRange("Miwa shift at z = 0".into()));
    }
    let b = shape.beta() as i64;
    moments.require(b)?;
    let weights: Vec<C> = (0..=b)
        .map(|j| {
            let c = C::from_bigint(&binomial(b as u64, j as u64)) / pow(z, j as u32);
            if j % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect();
    let values = (0..=moments.degree() - b)
        .map(|k| {
            weights.iter().enumerate().fold(C::zero(), |acc, (j, w)| {
                acc + w.clone() * moments.values()[(k as usize) + j].clone()
            })
        })
        .collect();
    Ok(MomentSequence::with_scale(values, moments.scale().cloned()))
}

/// `psi^-(z) = sum_p A_p z^{p+K}` with `A_p = star_M(epsilon_p ∧ gamma^{∧(M-1)}/(M-1)!)`.
pub fn psi_minus<C: Coeff>(
    moments: &MomentSequence<C>,
    shape: &ModelShape,
) -> Result<LaurentPolynomial<C>> {
    let amps = insertion_amplitudes(moments, shape)?;
    Ok(LaurentPolynomial::from_terms(
        amps.into_iter().enumerate().map(|(i, a)| (i as i64, a)),
    ))
}

/// Default truncation `max(2K, 1)`.
pub fn default_k_cut(shape: &ModelShape) -> usize {
    (2 * shape.radius()).max(1) as usize
}

/// `psi^+(z) = sum_{k=1}^{k_cut} B_k z^{-k}` with
/// `B_k = C(L^2+k-1, k) sum_p m̂'_{k+p} star_{M+1}(epsilon_p ∧ gamma'^{∧M}/M!)`,
/// everything taken in the `(M+1)`-particle system.
pub fn psi_plus<C: Coeff>(
    moments_plus: &MomentSequence<C>,
    shape: &ModelShape,
    k_cut: usize,
) -> Result<LaurentPolynomial<C>> {
    if k_cut < 1 {
        return Err(Error::OutOfRange("k_cut must be at least 1".into()));
    }
    let up = shape.with_particles(shape.particles() + 1)?;
    let kp = up.radius();
    moments_plus.require(k_cut as i64 + 2 * kp)?;
    let amps = insertion_amplitudes(moments_plus, &up)?;
    let beta = shape.beta() as u64;
    let mut terms = Vec::with_capacity(k_cut);
    for k in 1..=k_cut as i64 {
        let mut acc = C::zero();
        for (i, a) in amps.iter().enumerate() {
            // p = i - K', m̂'_{k+p} = m_{k+i}
            acc = acc + a.clone() * moments_plus.get(k + i as i64)?.clone();
        }
        let c = C::from_bigint(&binomial(beta + k as u64 - 1, k as u64));
        terms.push((-k, c * acc));
    }
    Ok(LaurentPolynomial::from_terms(terms))
}

/// `star_M(xi_{-q} Gamma_+)`, evaluated through its adjunction value
/// `star_M(epsilon_q ∧ gamma_+^{∧(M-1)}/(M-1)!)`; zero for `|q| > K`.
pub fn extraction_evaluate<C: Coeff>(
    q: i64,
    moments_plus: &MomentSequence<C>,
    shape: &ModelShape,
) -> Result<C> {
    let amps = insertion_amplitudes(moments_plus, shape)?;
    let k = shape.radius();
    if q.abs() > k {
        return Ok(C::zero());
    }
    Ok(amps[(q + k) as usize].clone())
}

/// Both wave functions of one Hirota pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePair<C = BigRational> {
    pub psi_minus: LaurentPolynomial<C>,
    pub psi_plus: LaurentPolynomial<C>,
    pub k_cut: usize,
}

impl<C: Coeff> WavePair<C> {
    pub fn build(
        moments: &MomentSequence<C>,
        moments_plus: &MomentSequence<C>,
        shape: &ModelShape,
        k_cut: usize,
    ) -> Result<Self> {
        Ok(WavePair {
            psi_minus: psi_minus(moments, shape)?,
            psi_plus: psi_plus(moments_plus, shape, k_cut)?,
            k_cut,
        })
    }

    /// `[z^0](psi^- psi^+) = sum_p A_p B_{p+K}`.
    pub fn residue(&self) -> C {
        self.psi_minus
            .terms()
            .iter()
            .filter(|(e, _)| **e >= 1)
            .fold(C::zero(), |acc, (e, a)| {
                acc + a.clone() * self.psi_plus.coeff(-*e)
            })
    }

    pub fn product(&self) -> LaurentPolynomial<C> {
        self.psi_minus.mul(&self.psi_plus)
    }
}

impl WavePair<BigRational> {
    pub fn to_json(&self) -> Value {
        json!({
            "psi_minus": self.psi_minus.to_json(),
            "psi_plus": self.psi_plus.to_json(),
            "k_cut": self.k_cut,
        })
    }
}

/// Hirota residue `[z^0](psi^-(t; z) psi^+(t'; z))` at truncation `k_cut`.
pub fn hirota_residual<C: Coeff>(
    moments: &MomentSequence<C>,
    moments_plus: &MomentSequence<C>,
    shape: &ModelShape,
    k_cut: usize,
) -> Result<C> {
    Ok(WavePair::build(moments, moments_plus, shape, k_cut)?.residue())
}

/// The whole product `psi^- psi^+`.
pub fn transport_spectrum<C: Coeff>(
    moments: &MomentSequence<C>,
    moments_plus: &MomentSequence<C>,
    shape: &ModelShape,
    k_cut: usize,
) -> Result<LaurentPolynomial<C>> {
    Ok(WavePair::build(moments, moments_plus, shape, k_cut)?.product())
}

/// `z^{2K} tau_{M-1}(t - L^2[z^{-1}])`: the particle inserted at `z`,
/// computed from the shifted moments alone.
pub fn miwa_insertion<C: Coeff>(moments: &MomentSequence<C>, z: &C, shape: &ModelShape) -> Result<C> {
    moments.require(2 * shape.radius())?;
    let shifted = miwa_negative_moments(moments, z, shape)?;
    let inner = tau_value(&shifted, shape.charge(), shape.particles() - 1)?;
    Ok(pow(z, 2 * shape.radius() as u32) * inner)
}

/// `z^{2K} tau_{M-1}(shifted) / tau_M`.
pub fn miwa_ratio<C: Coeff>(moments: &MomentSequence<C>, z: &C, shape: &ModelShape) -> Result<C> {
    let denom = tau_value(moments, shape.charge(), shape.particles())?;
    if denom.is_zero() {
        return Err(Error::Unsupported("tau_M vanishes".into()));
    }
    Ok(miwa_insertion(moments, z, shape)? / denom)
}
