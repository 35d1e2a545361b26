//! Wave-function coefficients and the Hirota residue checked against
//! direct multivariate polynomial integration over the moment functional.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use hyperpf::ensemble::{moments_needed, MomentSequence, NamedWeight};
use hyperpf::exterior::ModelShape;
use hyperpf::oracle::{random_moments, seeded_rng};
use hyperpf::scalar::{binomial, factorial, int, pow, ratio};
use hyperpf::tau::{
    default_k_cut, hirota_residual, miwa_insertion, miwa_ratio, psi_minus, psi_plus, tau,
    transport_spectrum,
};

type Q = BigRational;

/// Dense-key multivariate polynomial.
#[derive(Clone, Debug)]
struct Poly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl Poly {
    fn one(vars: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; vars], Q::one());
        Poly { vars, terms }
    }

    /// `x_i - x_j`.
    fn diff(vars: usize, i: usize, j: usize) -> Self {
        let mut a = vec![0; vars];
        a[i] = 1;
        let mut b = vec![0; vars];
        b[j] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(a, Q::one());
        terms.insert(b, -Q::one());
        Poly { vars, terms }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut terms: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *terms.entry(e).or_insert_with(Q::zero) += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly { vars: self.vars, terms }
    }

    fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::one(self.vars), |acc, _| acc.mul(self))
    }

    /// Integrates variables `1..vars` against `m`; returns coefficients in
    /// variable 0.
    fn integrate_rest(&self, m: &MomentSequence) -> Vec<Q> {
        let top = self.terms.keys().map(|e| e[0]).max().unwrap_or(0) as usize;
        let mut out = vec![Q::zero(); top + 1];
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for &k in &e[1..] {
                v *= m.get(k as i64).unwrap();
            }
            out[e[0] as usize] += v;
        }
        out
    }
}

/// `prod_{i>=1} (x_0 - x_i)^b * prod_{1<=i<j} (x_i - x_j)^b` in `1 + n` variables.
fn kernel(n: usize, beta: u32) -> Poly {
    let vars = n + 1;
    let mut p = Poly::one(vars);
    for i in 1..vars {
        p = p.mul(&Poly::diff(vars, 0, i).pow(beta));
    }
    for i in 1..vars {
        for j in i + 1..vars {
            p = p.mul(&Poly::diff(vars, i, j).pow(beta));
        }
    }
    p
}

fn fact(n: usize) -> Q {
    Q::from_integer(factorial(n as u64))
}

/// `[z^k] (1/(M-1)!) ∫ prod (z - x_i)^b |Δ|^b dmu^{M-1}` for `k = 0..=2K`.
fn brute_psi_minus(m: &MomentSequence, shape: &ModelShape) -> Vec<Q> {
    let n = shape.particles() - 1;
    kernel(n, shape.beta())
        .integrate_rest(m)
        .into_iter()
        .map(|c| c / fact(n))
        .collect()
}

/// `C(b+k-1, k) ∫ y^k (1/M!) ∫ prod (y - x_i)^b |Δ|^b dmu'^M dmu'(y)`.
fn brute_psi_plus(mp: &MomentSequence, shape: &ModelShape, k_cut: usize) -> Vec<Q> {
    let n = shape.particles();
    let inner: Vec<Q> = kernel(n, shape.beta())
        .integrate_rest(mp)
        .into_iter()
        .map(|c| c / fact(n))
        .collect();
    let beta = shape.beta() as u64;
    (1..=k_cut)
        .map(|k| {
            let s: Q = inner
                .iter()
                .enumerate()
                .map(|(j, c)| c * mp.get((j + k) as i64).unwrap())
                .sum();
            s * Q::from_integer(binomial(beta + k as u64 - 1, k as u64))
        })
        .collect()
}

fn plus_len(shape: &ModelShape, k_cut: usize) -> usize {
    k_cut + shape.beta() as usize * shape.particles() + 1
}

const SHAPES: [(usize, usize); 3] = [(2, 2), (2, 3), (4, 2)];

#[test]
fn psi_minus_matches_polynomial_integration() {
    let mut rng = seeded_rng(101);
    for (l, m) in SHAPES {
        let shape = ModelShape::new(l, m).unwrap();
        for _ in 0..3 {
            let moms = random_moments(&mut rng, moments_needed(&shape), 9);
            let psi = psi_minus(&moms, &shape).unwrap();
            let brute = brute_psi_minus(&moms, &shape);
            assert_eq!(brute.len() as i64, 2 * shape.radius() + 1);
            for (k, c) in brute.iter().enumerate() {
                assert_eq!(psi.coeff(k as i64), *c, "{shape} z^{k}");
            }
        }
    }
}

#[test]
fn psi_plus_matches_polynomial_integration() {
    let mut rng = seeded_rng(202);
    for (l, m) in SHAPES {
        let shape = ModelShape::new(l, m).unwrap();
        let k_cut = default_k_cut(&shape) + 2;
        let mp = random_moments(&mut rng, plus_len(&shape, k_cut), 9);
        let psi = psi_plus(&mp, &shape, k_cut).unwrap();
        for (i, b) in brute_psi_plus(&mp, &shape, k_cut).iter().enumerate() {
            assert_eq!(psi.coeff(-(i as i64) - 1), *b, "{shape} B_{}", i + 1);
        }
    }
}

#[test]
fn hirota_residue_matches_polynomial_integration() {
    let mut rng = seeded_rng(303);
    for (l, m) in SHAPES {
        let shape = ModelShape::new(l, m).unwrap();
        let k_cut = default_k_cut(&shape);
        for _ in 0..2 {
            let t = random_moments(&mut rng, moments_needed(&shape), 9);
            let tp = random_moments(&mut rng, plus_len(&shape, k_cut), 9);
            let a = brute_psi_minus(&t, &shape);
            let b = brute_psi_plus(&tp, &shape, k_cut);
            let expected: Q = (1..=k_cut).map(|k| &a[k] * &b[k - 1]).sum();
            let actual = hirota_residual(&t, &tp, &shape, k_cut).unwrap();
            assert_eq!(actual, expected, "{shape}");
            let spectrum = transport_spectrum(&t, &tp, &shape, k_cut).unwrap();
            assert_eq!(spectrum.coeff(0), expected);
        }
    }
}

#[test]
fn uniform_residue_value() {
    // both backgrounds uniform on [0, 1]
    let shape = ModelShape::new(2, 2).unwrap();
    let k_cut = default_k_cut(&shape);
    let w = NamedWeight::unit_interval();
    let t = w.moments(moments_needed(&shape)).unwrap();
    let tp = w.moments(plus_len(&shape, k_cut)).unwrap();
    let a = brute_psi_minus(&t, &shape);
    let b = brute_psi_plus(&tp, &shape, k_cut);
    let expected: Q = (1..=k_cut).map(|k| &a[k] * &b[k - 1]).sum();
    assert_eq!(hirota_residual(&t, &tp, &shape, k_cut).unwrap(), expected);
    assert!(!expected.is_zero());
}

#[test]
fn psi_minus_is_shifted_lower_tau_and_ratio_carries_tau() {
    let mut rng = seeded_rng(404);
    for (l, m) in SHAPES {
        let shape = ModelShape::new(l, m).unwrap();
        let moms = random_moments(&mut rng, moments_needed(&shape) + shape.beta() as usize, 9);
        let tau_m = tau(&moms, &shape).unwrap().value;
        if tau_m.is_zero() {
            continue;
        }
        let psi = psi_minus(&moms, &shape).unwrap();
        for z in [int(2), ratio(-3, 4), ratio(7, 5), int(-6)] {
            let lhs = psi.eval(&z).unwrap();
            assert_eq!(lhs, miwa_insertion(&moms, &z, &shape).unwrap(), "{shape}");
            assert_eq!(miwa_ratio(&moms, &z, &shape).unwrap() * &tau_m, lhs, "{shape}");
        }
    }
}

#[test]
fn worked_uniform_wave_values() {
    let shape = ModelShape::new(2, 2).unwrap();
    let moms = NamedWeight::unit_interval().moments(9).unwrap();
    let at3 = psi_minus(&moms, &shape).unwrap().eval(&int(3)).unwrap();
    assert_eq!(at3, ratio(1, 5) - int(3) + int(18) - int(54) + int(81));
    assert_eq!(miwa_ratio(&moms, &int(3), &shape).unwrap(), int(1266));
    // ∫_0^1 (1 - x/3)^4 dx = (3/5)(1 - (2/3)^5)
    let shifted_tau1 = ratio(3, 5) * (int(1) - pow(&ratio(2, 3), 5));
    assert_eq!(at3, pow(&int(3), 4) * shifted_tau1);
}
