//! Moment sequences, named weights, the Gram form, partition functions and
//! correlation densities.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{
    combinations, divided_wedge_power, hyperpfaffian, omega, wronskian_weight, ModelShape,
    Multivector,
};
use crate::scalar::{format_rational, parse_rational, ratio, Coeff, Scalar, ScaleTag};
use crate::spine::{Spine, StructureTable};

/// Moments `m_0..m_D` of the ensemble weight, optionally all carrying one
/// common scale tag (power 1).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence<C = BigRational> {
    values: Vec<C>,
    scale: Option<ScaleTag>,
}

impl<C: Coeff> MomentSequence<C> {
    pub fn new(values: Vec<C>) -> Self {
        MomentSequence {
            values,
            scale: None,
        }
    }

    pub fn with_scale(values: Vec<C>, scale: Option<ScaleTag>) -> Self {
        MomentSequence { values, scale }
    }

    pub fn values(&self) -> &[C] {
        &self.values
    }

    pub fn scale(&self) -> Option<&ScaleTag> {
        self.scale.as_ref()
    }

    /// Highest available index `D`, or -1 when empty.
    pub fn degree(&self) -> i64 {
        self.values.len() as i64 - 1
    }

    pub fn get(&self, k: i64) -> Result<&C> {
        if k < 0 || k > self.degree() {
            return Err(Error::MomentRange {
                index: k,
                available: self.degree(),
            });
        }
        Ok(&self.values[k as usize])
    }

    /// Shifted moment `m̂_p = m_{p+K}`.
    pub fn shifted(&self, p: i64, shape: &ModelShape) -> Result<&C> {
        self.get(p + shape.radius())
    }

    /// Checks that `m_0..m_max` are all present.
    pub fn require(&self, max: i64) -> Result<()> {
        if self.degree() < max {
            return Err(Error::MomentRange {
                index: max,
                available: self.degree(),
            });
        }
        Ok(())
    }

    /// Scalar wrapper carrying the sequence's scale at the given power.
    pub fn scalar(&self, value: C, power: i32) -> Scalar<C> {
        Scalar::scaled(value, self.scale.clone(), power)
    }

    pub fn scaled_by(&self, c: &C) -> Self {
        MomentSequence {
            values: self.values.iter().map(|v| v.clone() * c.clone()).collect(),
            scale: self.scale.clone(),
        }
    }

    /// Plain floating moments with any scale folded in.
    pub fn to_float(&self) -> MomentSequence<f64> {
        let f = self.scale.as_ref().map_or(1.0, |t| t.value);
        MomentSequence::new(self.values.iter().map(|v| v.to_f64() * f).collect())
    }

    pub fn truncated(&self, len: usize) -> Self {
        MomentSequence {
            values: self.values.iter().take(len).cloned().collect(),
            scale: self.scale.clone(),
        }
    }
}

impl MomentSequence<BigRational> {
    pub fn to_json(&self) -> Value {
        json!({
            "scale": self.scale,
            "moments": self.values.iter().map(format_rational).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let scale = match &value["scale"] {
            Value::Null => None,
            v => Some(serde_json::from_value::<ScaleTag>(v.clone())?),
        };
        let values = value["moments"]
            .as_array()
            .ok_or_else(|| Error::Parse("moments file needs a \"moments\" array".into()))?
            .iter()
            .map(|v| match v {
                Value::String(s) => parse_rational(s),
                Value::Number(n) if n.is_i64() => Ok(crate::scalar::int(n.as_i64().unwrap())),
                _ => Err(Error::Parse(format!("moment {v} must be a rational string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MomentSequence { values, scale })
    }
}

/// Pointwise weight value, exact when the weight is rational at the point.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightValue {
    Exact(BigRational),
    Float(f64),
}

impl WeightValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            WeightValue::Exact(r) => r.to_f64(),
            WeightValue::Float(f) => *f,
        }
    }
}

/// Concrete weight families.
#[derive(Debug, Clone, PartialEq)]
pub enum NamedWeight {
    /// Lebesgue measure on `[a, b]`.
    Uniform { a: BigRational, b: BigRational },
    /// `exp(-x^2)` on the line; moments carry the scale `sqrt(pi)`.
    Gaussian,
    /// Moments only; no pointwise values.
    Explicit(MomentSequence),
}

impl NamedWeight {
    pub fn uniform(a: BigRational, b: BigRational) -> Result<Self> {
        if a >= b {
            return Err(Error::Parse(format!("uniform interval [{a}, {b}] is empty")));
        }
        Ok(NamedWeight::Uniform { a, b })
    }

    pub fn unit_interval() -> Self {
        NamedWeight::Uniform {
            a: BigRational::zero(),
            b: BigRational::one(),
        }
    }

    /// Parses `uniform:a,b` or `gaussian`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.eq_ignore_ascii_case("gaussian") {
            return Ok(NamedWeight::Gaussian);
        }
        if let Some(rest) = spec.strip_prefix("uniform:") {
            let (a, b) = rest
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected uniform:a,b, got {spec:?}")))?;
            return NamedWeight::uniform(parse_rational(a)?, parse_rational(b)?);
        }
        Err(Error::Parse(format!("unknown weight {spec:?}")))
    }

    /// `m_0..m_{count-1}`.
    pub fn moments(&self, count: usize) -> Result<MomentSequence> {
        match self {
            NamedWeight::Uniform { a, b } => {
                let mut pa = a.clone();
                let mut pb = b.clone();
                let values = (0..count)
                    .map(|k| {
                        let v = (&pb - &pa) / BigRational::from_integer(BigInt::from(k + 1));
                        pa = &pa * a;
                        pb = &pb * b;
                        v
                    })
                    .collect();
                Ok(MomentSequence::new(values))
            }
            NamedWeight::Gaussian => {
                // m_{2k} = (2k-1)!! / 2^k, m_{2k+1} = 0, in units of sqrt(pi)
                let mut values = Vec::with_capacity(count);
                let mut even = BigRational::one();
                for k in 0..count {
                    if k % 2 == 1 {
                        values.push(BigRational::zero());
                    } else {
                        values.push(even.clone());
                        even *= ratio((k + 1) as i64, 2);
                    }
                }
                Ok(MomentSequence::with_scale(values, Some(ScaleTag::sqrt_pi())))
            }
            NamedWeight::Explicit(m) => {
                m.require(count as i64 - 1)?;
                Ok(m.truncated(count))
            }
        }
    }

    /// `w(x)`, or `None` for explicit moment input.
    pub fn density(&self, x: &BigRational) -> Option<WeightValue> {
        match self {
            NamedWeight::Uniform { a, b } => Some(WeightValue::Exact(if a <= x && x <= b {
                BigRational::one()
            } else {
                BigRational::zero()
            })),
            NamedWeight::Gaussian => {
                let xf = x.to_f64();
                Some(WeightValue::Float((-xf * xf).exp()))
            }
            NamedWeight::Explicit(_) => None,
        }
    }

    pub fn density_f64(&self, x: f64) -> Option<f64> {
        match self {
            NamedWeight::Uniform { a, b } => {
                Some(if a.to_f64() <= x && x <= b.to_f64() { 1.0 } else { 0.0 })
            }
            NamedWeight::Gaussian => Some((-x * x).exp()),
            NamedWeight::Explicit(_) => None,
        }
    }

    /// Total mass `m_0` as a float.
    pub fn mass(&self) -> f64 {
        match self {
            NamedWeight::Uniform { a, b } => (b - a).to_f64(),
            NamedWeight::Gaussian => std::f64::consts::PI.sqrt(),
            NamedWeight::Explicit(m) => m.to_float().values().first().copied().unwrap_or(0.0),
        }
    }

    pub fn label(&self) -> String {
        match self {
            NamedWeight::Uniform { a, b } => format!("uniform:{a},{b}"),
            NamedWeight::Gaussian => "gaussian".into(),
            NamedWeight::Explicit(_) => "explicit".into(),
        }
    }
}

/// Number of moments `m_0..m_{2K}` needed to build the Gram form.
pub fn moments_needed(shape: &ModelShape) -> usize {
    (2 * shape.radius() + 1) as usize
}

/// Gram form `gamma = sum_p m̂_p epsilon_p`.
pub fn gram_form<C: Coeff>(moments: &MomentSequence<C>, shape: &ModelShape) -> Result<Multivector<C>> {
    moments.require(2 * shape.radius())?;
    let spine = Spine::<C>::new(shape);
    Ok(gram_form_on(&spine, moments))
}

pub(crate) fn gram_form_on<C: Coeff>(spine: &Spine<C>, moments: &MomentSequence<C>) -> Multivector<C> {
    let shape = *spine.shape();
    spine.combine(|p| moments.shifted(p, &shape).cloned().unwrap_or_else(|_| C::zero()))
}

/// Gram form from the blade formula `Gr_J = weight(J) * m_{sum J - L(L-1)/2}`.
pub fn gram_form_blades<C: Coeff>(
    moments: &MomentSequence<C>,
    shape: &ModelShape,
) -> Result<Multivector<C>> {
    moments.require(2 * shape.radius())?;
    let offset = shape.wronskian_offset();
    let mut terms = Vec::new();
    for b in combinations(shape.dim(), shape.charge()) {
        let m = moments.get(b.degree_sum() - offset)?;
        terms.push((b, C::from_bigint(&wronskian_weight(b)) * m.clone()));
    }
    Multivector::from_terms(shape.dim(), terms)
}

/// How the partition function is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// `star(gamma^{∧M} / M!)` in the exterior algebra.
    Hyperpfaffian,
    /// `(1/M!) sum_P C_P prod m̂_{p_i}` from the structure table.
    StructurePoly,
}

/// Process-wide memo of structure tables.
pub fn shared_table(shape: &ModelShape) -> Result<Arc<StructureTable>> {
    static TABLES: OnceLock<Mutex<HashMap<ModelShape, Arc<StructureTable>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(Default::default);
    if let Some(t) = tables.lock().unwrap().get(shape) {
        return Ok(t.clone());
    }
    let table = Arc::new(StructureTable::build(shape)?);
    tables.lock().unwrap().insert(*shape, table.clone());
    Ok(table)
}

/// Partition function `Z`, homogeneous of degree `M` in the moments; the
/// scale tag comes out at power `M`.
pub fn partition_function<C: Coeff>(
    moments: &MomentSequence<C>,
    shape: &ModelShape,
    route: Route,
) -> Result<Scalar<C>> {
    moments.require(2 * shape.radius())?;
    let z = match route {
        Route::Hyperpfaffian => hyperpfaffian(&gram_form(moments, shape)?, shape)?,
        Route::StructurePoly => partition_from_table(moments, shared_table(shape)?.as_ref())?,
    };
    Ok(moments.scalar(z, shape.particles() as i32))
}

/// Structure-polynomial route with an explicit table.
pub fn partition_from_table<C: Coeff>(moments: &MomentSequence<C>, table: &StructureTable) -> Result<C> {
    let shape = *table.shape();
    moments.require(2 * shape.radius())?;
    Ok(table.partition(|p| moments.shifted(p, &shape).unwrap().clone()))
}

/// `star(omega(x_1) ∧ ... ∧ omega(x_m) ∧ gamma^{∧(M-m)}/(M-m)!)`.
pub fn insertion_value<C: Coeff>(
    points: &[C],
    moments: &MomentSequence<C>,
    shape: &ModelShape,
) -> Result<C> {
    let m = points.len();
    if m > shape.particles() {
        return Err(Error::OutOfRange(format!(
            "{m} inserted points for M = {}",
            shape.particles()
        )));
    }
    let gamma = gram_form(moments, shape)?;
    let background = divided_wedge_power(&gamma, shape.particles() - m)?;
    let mut acc = background;
    for x in points {
        acc = omega(x, shape).wedge(&acc)?;
    }
    Ok(acc.star())
}

/// Insertion amplitudes `A_p = star(epsilon_p ∧ gamma^{∧(M-1)}/(M-1)!)` for
/// `p = -K..=K`, i.e. the coefficients of `star(omega(x) ∧ Gamma_-)` at
/// `x^{K+p}`.
pub fn insertion_amplitudes<C: Coeff>(
    moments: &MomentSequence<C>,
    shape: &ModelShape,
) -> Result<Vec<C>> {
    moments.require(2 * shape.radius())?;
    let spine = Spine::<C>::new(shape);
    let gamma = gram_form_on(&spine, moments);
    let background = divided_wedge_power(&gamma, shape.particles() - 1)?;
    spine
        .momenta()
        .map(|p| spine.mode(p).unwrap().star_wedge(&background))
        .collect()
}

/// The `m`-point correlation at exact points, split into the weightless
/// factor `star(...)/Z` and the product of pointwise weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    pub weightless: Scalar<BigRational>,
    /// `prod w(x_i)`; `None` for explicit moment input.
    pub weight: Option<WeightValue>,
}

impl Correlation {
    /// The full density when every factor is exact.
    pub fn exact(&self) -> Option<Scalar<BigRational>> {
        match &self.weight {
            Some(WeightValue::Exact(w)) => Some(Scalar::scaled(
                self.weightless.value.clone() * w.clone(),
                self.weightless.scale.clone(),
                self.weightless.power,
            )),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.weight.as_ref().map(|w| w.to_f64() * self.weightless.to_f64())
    }
}

/// `R_m(x_1..x_m) = prod w(x_i) / Z * star(omega(x_1) ∧ ... ∧ gamma^{∧(M-m)}/(M-m)!)`.
///
/// Explicit-moment weights need `weightless = true`; the returned
/// `weight` is then `None`.
pub fn correlation(
    points: &[BigRational],
    weight: &NamedWeight,
    shape: &ModelShape,
    weightless: bool,
) -> Result<Correlation> {
    let m = points.len();
    if m < 1 || m > shape.particles() {
        return Err(Error::OutOfRange(format!(
            "correlation order {m} (need 1 <= m <= {})",
            shape.particles()
        )));
    }
    let pointwise = match weight {
        NamedWeight::Explicit(_) if !weightless => return Err(Error::UnknownWeight),
        NamedWeight::Explicit(_) => None,
        named => Some(product_of_weights(named, points)),
    };
    let moments = weight.moments(moments_needed(shape))?;
    let z = partition_function(&moments, shape, Route::Hyperpfaffian)?;
    if z.value.is_zero() {
        return Err(Error::Unsupported("partition function vanishes".into()));
    }
    let value = insertion_value(points, &moments, shape)?;
    let power = shape.particles() as i32;
    let weightless = moments.scalar(value / z.value.clone(), -power);
    Ok(Correlation {
        weightless,
        weight: pointwise,
    })
}

fn product_of_weights(weight: &NamedWeight, points: &[BigRational]) -> WeightValue {
    let mut exact = BigRational::one();
    let mut float = 1.0f64;
    let mut all_exact = true;
    for x in points {
        match weight.density(x).expect("named weight") {
            WeightValue::Exact(w) => exact *= w,
            WeightValue::Float(w) => {
                all_exact = false;
                float *= w
            }
        }
    }
    if all_exact {
        WeightValue::Exact(exact)
    } else {
        WeightValue::Float(float * exact.to_f64())
    }
}

/// `∫ R_1 dmu`-style check: integrates the polynomial `star(omega(x) ∧ Gamma_-)`
/// against the moments and divides by `Z`. Equals `M`.
pub fn r1_moment_integral<C: Coeff>(moments: &MomentSequence<C>, shape: &ModelShape) -> Result<C> {
    let amps = insertion_amplitudes(moments, shape)?;
    let mut acc = C::zero();
    for (i, a) in amps.iter().enumerate() {
        // amplitude of x^{K+p} sits at index p + K
        acc = acc + a.clone() * moments.get(i as i64)?.clone();
    }
    let z = partition_function(moments, shape, Route::Hyperpfaffian)?;
    Ok(acc / z.value)
}
