//! Independent checks that never touch the exterior algebra: direct
//! products, closed-form integrals, Gauss rules and Monte Carlo.

use std::num::NonZeroUsize;

use gauss_quad::hermite::GaussHermite;
use gauss_quad::legendre::GaussLegendre;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{insertion_amplitudes, moments_needed, partition_function, NamedWeight, Route};
use crate::error::{Error, Result};
use crate::exterior::ModelShape;
use crate::scalar::{factorial, pow, rational_to_f64, Coeff, Scalar, ScaleTag};

/// Number of Monte Carlo shards; fixed so results do not depend on the
/// worker count.
pub const SHARDS: u64 = 64;

/// Upper bound on tensor-grid size.
pub const MAX_GRID_POINTS: u128 = 50_000_000;

/// `prod_{i<k} (x_k - x_i)^{L^2}`.
pub fn direct_interaction<C: Coeff>(points: &[C], l: u32) -> C {
    let mut acc = C::one();
    for k in 0..points.len() {
        for i in 0..k {
            acc = acc * pow(&(points[k].clone() - points[i].clone()), l * l);
        }
    }
    acc
}

fn interaction_f64(points: &[f64], beta: i32) -> f64 {
    let mut acc = 1.0;
    for k in 0..points.len() {
        for i in 0..k {
            acc *= (points[k] - points[i]).powi(beta);
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    TensorQuadrature,
    MonteCarlo,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed_form" | "closed-form" => Ok(Method::ClosedForm),
            "tensor_quadrature" | "quadrature" => Ok(Method::TensorQuadrature),
            "monte_carlo" | "monte-carlo" | "mc" => Ok(Method::MonteCarlo),
            _ => Err(Error::Parse(format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrationReport {
    pub method: Method,
    pub estimate: f64,
    pub std_error: f64,
    pub samples_or_nodes: u64,
    pub seed: Option<u64>,
    pub budget: u64,
}

impl IntegrationReport {
    /// `|estimate - exact| <= k * std_error`.
    pub fn brackets(&self, exact: f64, k: f64) -> bool {
        (self.estimate - exact).abs() <= k * self.std_error
    }
}

fn big_to_rational(b: BigInt) -> BigRational {
    BigRational::from_integer(b)
}

/// Exact `Z` for uniform and Gaussian weights (Selberg and Mehta integrals
/// with `gamma = L^2/2`, an integer for even `L`).
pub fn closed_form_partition(weight: &NamedWeight, shape: &ModelShape) -> Result<Scalar> {
    let n = shape.particles() as u64;
    let g = (shape.beta() / 2) as u64;
    let fact = |k: u64| big_to_rational(factorial(k));
    let mfact = fact(n);
    match weight {
        NamedWeight::Uniform { a, b } => {
            let mut s = BigRational::one();
            for j in 0..n {
                s = s * fact(j * g) * fact(j * g) * fact((j + 1) * g)
                    / (fact(1 + (n + j - 1) * g) * fact(g));
            }
            let len = b - a;
            let e = (n + g * n * (n - 1)) as u32;
            Ok(Scalar::plain(s * pow(&len, e) / mfact))
        }
        NamedWeight::Gaussian => {
            let mut s = BigRational::one();
            for j in 1..=n {
                s = s * fact(j * g) / fact(g);
            }
            let two = big_to_rational(BigInt::from(2));
            s /= pow(&two, (g * n * (n - 1) / 2) as u32);
            Ok(Scalar::scaled(s / mfact, Some(ScaleTag::sqrt_pi()), n as i32))
        }
        NamedWeight::Explicit(_) => Err(Error::Unsupported(
            "closed form needs a named weight".into(),
        )),
    }
}

/// One-dimensional rule for `w`, returning (node, weight) pairs that
/// already include the weight function.
fn rule_for(weight: &NamedWeight, count: usize) -> Result<Vec<(f64, f64)>> {
    let deg = NonZeroUsize::new(count.max(1)).unwrap();
    match weight {
        NamedWeight::Uniform { a, b } => {
            let (a, b) = (rational_to_f64(a), rational_to_f64(b));
            let half = 0.5 * (b - a);
            Ok(GaussLegendre::new(deg)
                .as_node_weight_pairs()
                .iter()
                .map(|(x, w)| (half * x + 0.5 * (a + b), half * w))
                .collect())
        }
        NamedWeight::Gaussian => Ok(GaussHermite::new(deg).as_node_weight_pairs().to_vec()),
        NamedWeight::Explicit(_) => Err(Error::Unsupported("quadrature needs a named weight".into())),
    }
}

/// Nodes per axis that integrate `|Δ|^{L^2}` over `dims` variables exactly.
fn exact_node_count(shape: &ModelShape, dims: usize) -> usize {
    // per-variable degree of the interaction among `dims + 1` points at most
    let deg = shape.beta() as usize * dims.max(1);
    deg / 2 + 1
}

/// `sum over the tensor grid of prod w_i * f(x)`.
fn tensor_sum(rule: &[(f64, f64)], dims: usize, f: impl Fn(&[f64]) -> f64 + Sync) -> Result<(f64, u64)> {
    let per = rule.len() as u128;
    let total = per.checked_pow(dims as u32).unwrap_or(u128::MAX);
    if total > MAX_GRID_POINTS {
        return Err(Error::ResourceGuard {
            what: "tensor grid points",
            size: total,
            ceiling: MAX_GRID_POINTS,
        });
    }
    if dims == 0 {
        return Ok((f(&[]), 1));
    }
    let outer: Vec<f64> = (0..rule.len())
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0usize; dims];
            idx[0] = first;
            let mut pts = vec![0.0; dims];
            let mut acc = 0.0;
            loop {
                let mut w = 1.0;
                for (d, &i) in idx.iter().enumerate() {
                    pts[d] = rule[i].0;
                    w *= rule[i].1;
                }
                acc += w * f(&pts);
                let mut d = dims - 1;
                loop {
                    if d == 0 {
                        return acc;
                    }
                    idx[d] += 1;
                    if idx[d] < rule.len() {
                        break;
                    }
                    idx[d] = 0;
                    d -= 1;
                }
            }
        })
        .collect();
    Ok((outer.iter().sum(), total as u64))
}

/// Running mean and second central moment, mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64) * (o.n as f64) / n as f64,
        }
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

enum Sampler {
    Uniform { a: f64, len: f64 },
    Gaussian(Normal<f64>),
}

impl Sampler {
    fn new(weight: &NamedWeight) -> Result<Self> {
        match weight {
            NamedWeight::Uniform { a, b } => Ok(Sampler::Uniform {
                a: rational_to_f64(a),
                len: rational_to_f64(&(b - a)),
            }),
            // exp(-x^2) / sqrt(pi) is N(0, 1/2)
            NamedWeight::Gaussian => Ok(Sampler::Gaussian(
                Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).unwrap(),
            )),
            NamedWeight::Explicit(_) => Err(Error::Unsupported(
                "Monte Carlo needs a named weight".into(),
            )),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Sampler::Uniform { a, len } => a + len * rng.random::<f64>(),
            Sampler::Gaussian(n) => n.sample(rng),
        }
    }
}

/// Mean of `f` over `samples` i.i.d. draws of `dims` points from the
/// normalized base measure. Sharded with one ChaCha stream per shard.
fn monte_carlo_mean(
    weight: &NamedWeight,
    dims: usize,
    samples: u64,
    seed: u64,
    f: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<Moments> {
    let sampler = Sampler::new(weight)?;
    let base = samples / SHARDS;
    let extra = samples % SHARDS;
    let parts: Vec<Moments> = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let count = base + u64::from(shard < extra);
            let mut acc = Moments::default();
            let mut pts = vec![0.0; dims];
            for _ in 0..count {
                for p in pts.iter_mut() {
                    *p = sampler.draw(&mut rng);
                }
                acc.push(f(&pts));
            }
            acc
        })
        .collect();
    Ok(parts.into_iter().fold(Moments::default(), Moments::merge))
}

/// Default Monte Carlo sample count.
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

/// Estimates `Z = (1/M!) ∫ |Δ(x)|^{L^2} prod dmu(x_i)`.
///
/// `budget` is the sample count for Monte Carlo and the nodes per axis for
/// tensor quadrature (0 picks the exact-degree rule).
pub fn integrate_partition(
    weight: &NamedWeight,
    shape: &ModelShape,
    method: Method,
    budget: u64,
    seed: u64,
) -> Result<IntegrationReport> {
    let m = shape.particles();
    let beta = shape.beta() as i32;
    let mfact = factorial(m as u64).to_f64().unwrap();
    match method {
        Method::ClosedForm => Ok(IntegrationReport {
            method,
            estimate: closed_form_partition(weight, shape)?.to_f64(),
            std_error: 0.0,
            samples_or_nodes: 0,
            seed: None,
            budget,
        }),
        Method::TensorQuadrature => {
            let per = if budget == 0 {
                exact_node_count(shape, m - 1)
            } else {
                budget as usize
            };
            let rule = rule_for(weight, per)?;
            let (sum, nodes) = tensor_sum(&rule, m, |x| interaction_f64(x, beta))?;
            Ok(IntegrationReport {
                method,
                estimate: sum / mfact,
                std_error: 0.0,
                samples_or_nodes: nodes,
                seed: None,
                budget,
            })
        }
        Method::MonteCarlo => {
            let samples = if budget == 0 { DEFAULT_SAMPLES } else { budget };
            let stats = monte_carlo_mean(weight, m, samples, seed, |x| interaction_f64(x, beta))?;
            let factor = weight.mass().powi(m as i32) / mfact;
            Ok(IntegrationReport {
                method,
                estimate: factor * stats.mean,
                std_error: factor * stats.std_error(),
                samples_or_nodes: samples,
                seed: Some(seed),
                budget,
            })
        }
    }
}

/// Estimates `R_1(x) = w(x) / ((M-1)! Z) ∫ |Δ(x, y_2..y_M)|^{L^2} prod dmu(y_i)`
/// with `Z` taken from the closed form.
pub fn integrate_r1(
    weight: &NamedWeight,
    shape: &ModelShape,
    x: f64,
    method: Method,
    budget: u64,
    seed: u64,
) -> Result<IntegrationReport> {
    let m = shape.particles();
    let beta = shape.beta() as i32;
    let z = closed_form_partition(weight, shape)?.to_f64();
    let w = weight
        .density_f64(x)
        .ok_or_else(|| Error::Unsupported("R_1 needs a named weight".into()))?;
    let prefactor = w / (factorial(m as u64 - 1).to_f64().unwrap() * z);
    let integrand = |ys: &[f64]| {
        let mut acc = interaction_f64(ys, beta);
        for y in ys {
            acc *= (x - y).powi(beta);
        }
        acc
    };
    if m == 1 || w == 0.0 {
        return Ok(IntegrationReport {
            method,
            estimate: if m == 1 { prefactor } else { 0.0 },
            std_error: 0.0,
            samples_or_nodes: 0,
            seed: None,
            budget,
        });
    }
    match method {
        Method::ClosedForm => Err(Error::Unsupported("no closed form for R_1".into())),
        Method::TensorQuadrature => {
            let per = if budget == 0 {
                exact_node_count(shape, m - 1)
            } else {
                budget as usize
            };
            let rule = rule_for(weight, per)?;
            let (sum, nodes) = tensor_sum(&rule, m - 1, integrand)?;
            Ok(IntegrationReport {
                method,
                estimate: prefactor * sum,
                std_error: 0.0,
                samples_or_nodes: nodes,
                seed: None,
                budget,
            })
        }
        Method::MonteCarlo => {
            let samples = if budget == 0 { DEFAULT_SAMPLES } else { budget };
            let stats = monte_carlo_mean(weight, m - 1, samples, seed, integrand)?;
            let factor = prefactor * weight.mass().powi(m as i32 - 1);
            Ok(IntegrationReport {
                method,
                estimate: factor * stats.mean,
                std_error: factor * stats.std_error(),
                samples_or_nodes: samples,
                seed: Some(seed),
                budget,
            })
        }
    }
}

/// `∫ R_1(x) dx` by a Gauss rule applied to the algebraic density
/// `w(x) star(omega(x) ∧ Gamma_-) / Z`. Should equal `M`.
pub fn r1_quadrature_total(weight: &NamedWeight, shape: &ModelShape) -> Result<f64> {
    let moments = weight.moments(moments_needed(shape))?;
    let amps: Vec<f64> = insertion_amplitudes(&moments, shape)?
        .iter()
        .map(rational_to_f64)
        .collect();
    let z = partition_function(&moments, shape, Route::Hyperpfaffian)?.value;
    let z = rational_to_f64(&z);
    // amplitudes carry scale^(M-1), Z carries scale^M
    let scale = moments.scale().map_or(1.0, |t| t.value);
    let rule = rule_for(weight, amps.len() / 2 + 1)?;
    let poly = |x: f64| amps.iter().rev().fold(0.0, |acc, a| acc * x + a);
    let total: f64 = rule.iter().map(|(x, w)| w * poly(*x)).sum();
    Ok(total / (z * scale))
}

/// Numeric moments of `exp(sum_i t_i x^i)`, on `support` if given, else on
/// the whole line (needs the top nonzero time to be even with negative
/// coefficient).
pub fn time_vector_moments(
    times: &[(u32, f64)],
    degree: usize,
    support: Option<(f64, f64)>,
    tolerance: f64,
) -> Result<crate::ensemble::MomentSequence<f64>> {
    let top = times
        .iter()
        .filter(|(_, t)| *t != 0.0)
        .max_by_key(|(i, _)| *i)
        .copied();
    let weight = |x: f64| times.iter().map(|(i, t)| t * x.powi(*i as i32)).sum::<f64>().exp();
    let values = match support {
        Some((a, b)) => {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(Error::NonIntegrable(format!("bad support [{a}, {b}]")));
            }
            (0..=degree)
                .map(|k| {
                    quadrature::integrate(|x| x.powi(k as i32) * weight(x), a, b, tolerance)
                        .integral
                })
                .collect()
        }
        None => {
            match top {
                Some((i, t)) if i >= 2 && i % 2 == 0 && t < 0.0 => {}
                _ => {
                    return Err(Error::NonIntegrable(
                        "top time must be even with negative coefficient".into(),
                    ))
                }
            }
            // x = s / (1 - s^2) maps (-1, 1) onto the line
            (0..=degree)
                .map(|k| {
                    let f = |s: f64| {
                        let d = 1.0 - s * s;
                        if d <= 0.0 {
                            return 0.0;
                        }
                        let x = s / d;
                        let v = x.powi(k as i32) * weight(x) * (1.0 + s * s) / (d * d);
                        if v.is_finite() {
                            v
                        } else {
                            0.0
                        }
                    };
                    quadrature::integrate(f, -1.0, 1.0, tolerance).integral
                })
                .collect()
        }
    };
    Ok(crate::ensemble::MomentSequence::new(values))
}

/// Random rational `a/b` with `|a| <= bound`, `1 <= b <= bound`.
pub fn random_rational(rng: &mut impl Rng, bound: i64) -> BigRational {
    let a = rng.random_range(-bound..=bound);
    let b = rng.random_range(1..=bound);
    crate::scalar::ratio(a, b)
}

/// `count` random rational moments with no scale tag.
pub fn random_moments(rng: &mut impl Rng, count: usize, bound: i64) -> crate::ensemble::MomentSequence {
    crate::ensemble::MomentSequence::new((0..count).map(|_| random_rational(rng, bound)).collect())
}

/// Seeded generator used by every randomized check.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
