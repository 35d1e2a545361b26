//! Sparse exterior algebra over the fermionic space of an ensemble shape.
//!
//! Slots are monomial degrees `0..N`. Centered (half-integer) indices are
//! never stored; they only show up through [`Blade::momentum`] and
//! [`Blade::centered_doubled`].

mod blade;
mod forms;
mod multivector;
mod pfaffian;

pub use blade::{combinations, Blade, Degrees, MAX_DIM};
pub use forms::{
    derivative_vector, divided_wedge_power, fermion_vector, hyperpfaffian, omega,
    omega_from_derivatives, wronskian_weight,
};
pub use multivector::Multivector;
pub use pfaffian::{pfaffian_classical, two_form, two_form_matrix};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `M` particles of even charge `L`; fermionic dimension `N = L*M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelShape {
    l: usize,
    m: usize,
}

impl ModelShape {
    pub fn new(l: usize, m: usize) -> Result<Self> {
        if l < 2 || !l.is_multiple_of(2) {
            return Err(Error::InvalidShape(format!(
                "charge L = {l} must be even and at least 2"
            )));
        }
        if m < 1 {
            return Err(Error::InvalidShape("particle count M must be positive".into()));
        }
        if l * m > MAX_DIM {
            return Err(Error::InvalidShape(format!(
                "N = L*M = {} exceeds {MAX_DIM}",
                l * m
            )));
        }
        Ok(ModelShape { l, m })
    }

    /// Particle charge `L`.
    pub fn charge(&self) -> usize {
        self.l
    }

    /// Particle count `M`.
    pub fn particles(&self) -> usize {
        self.m
    }

    /// Fermionic dimension `N = L*M`.
    pub fn dim(&self) -> usize {
        self.l * self.m
    }

    /// Momentum radius `K = L^2 (M-1) / 2`.
    pub fn radius(&self) -> i64 {
        (self.l * self.l * (self.m - 1) / 2) as i64
    }

    /// `L^2`, the interaction exponent.
    pub fn beta(&self) -> u32 {
        (self.l * self.l) as u32
    }

    /// Same charge, different particle count.
    pub fn with_particles(&self, m: usize) -> Result<Self> {
        ModelShape::new(self.l, m)
    }

    /// Number of grade-`L` blades, `C(N, L)`.
    pub fn blade_count(&self) -> u128 {
        let (n, k) = (self.dim() as u128, self.l as u128);
        (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Degree offset `L(L-1)/2` between a blade's degree sum and its
    /// Wronskian exponent.
    pub fn wronskian_offset(&self) -> i64 {
        (self.l * (self.l - 1) / 2) as i64
    }

    pub fn volume(&self) -> Blade {
        Blade::full(self.dim())
    }
}

impl std::fmt::Display for ModelShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "L={},M={}", self.l, self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_constants() {
        let s = ModelShape::new(2, 2).unwrap();
        assert_eq!((s.dim(), s.radius(), s.blade_count()), (4, 2, 6));
        let s = ModelShape::new(4, 3).unwrap();
        assert_eq!((s.dim(), s.radius(), s.blade_count()), (12, 16, 495));
        assert_eq!(ModelShape::new(2, 1).unwrap().radius(), 0);
    }

    #[test]
    fn invalid_shapes() {
        assert!(ModelShape::new(3, 2).is_err());
        assert!(ModelShape::new(0, 2).is_err());
        assert!(ModelShape::new(2, 0).is_err());
        assert!(ModelShape::new(2, 33).is_err());
    }
}
