//! Per-particle measurement settings: the pair (a_j, a'_j) of directions
//! defining the spin observables A_j and A'_j.

use crate::error::{QbError, Result};
use crate::pauli::UnitVector3;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSettings {
    pairs: Vec<(UnitVector3, UnitVector3)>,
}

impl MeasurementSettings {
    pub fn new(pairs: Vec<(UnitVector3, UnitVector3)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(QbError::Config("settings need at least one particle".into()));
        }
        Ok(Self { pairs })
    }

    /// The same directions on every particle.
    pub fn uniform(n: usize, a: UnitVector3, a_prime: UnitVector3) -> Result<Self> {
        Self::new(vec![(a, a_prime); n])
    }

    /// A = sigma_y, A' = sigma_x on every particle; the settings that drive
    /// GHZ states to the extremal Mermin-Klyshko values.
    pub fn mermin_xy(n: usize) -> Self {
        Self::uniform(n, UnitVector3::y_axis(), UnitVector3::x_axis()).expect("n >= 1")
    }

    /// A = A' = sigma_z on every particle.
    pub fn all_z(n: usize) -> Self {
        Self::uniform(n, UnitVector3::z_axis(), UnitVector3::z_axis()).expect("n >= 1")
    }

    /// Two-particle planar settings in the x-y plane, given as azimuthal
    /// angles (a, a') and (b, b') in radians.
    pub fn planar_chsh(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        let dir = |phi: f64| UnitVector3::from_angles(std::f64::consts::FRAC_PI_2, phi);
        Self::new(vec![(dir(a), dir(a_prime)), (dir(b), dir(b_prime))]).expect("two particles")
    }

    pub fn num_particles(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(UnitVector3, UnitVector3)] {
        &self.pairs
    }

    pub fn pair(&self, particle: usize) -> (UnitVector3, UnitVector3) {
        self.pairs[particle]
    }

    /// Swaps a_j and a'_j on every particle.
    pub fn prime_swapped(&self) -> Self {
        Self {
            pairs: self.pairs.iter().map(|&(a, ap)| (ap, a)).collect(),
        }
    }

    /// Applies a permutation of particle labels: pair j of the result is
    /// pair perm[j] of the input.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.pairs.len() {
            return Err(QbError::Config("permutation length mismatch".into()));
        }
        let pairs = perm.iter().map(|&j| self.pairs[j]).collect();
        Self::new(pairs)
    }

    pub fn require_n(&self, n: usize) -> Result<()> {
        if self.pairs.len() != n {
            return Err(QbError::ParticleCount {
                n: self.pairs.len(),
                detail: format!("settings for {} particles, expected {}", self.pairs.len(), n),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_swap_is_involution() {
        let s = MeasurementSettings::mermin_xy(3);
        assert_eq!(s.prime_swapped().prime_swapped(), s);
    }

    #[test]
    fn planar_settings_are_unit() {
        let s = MeasurementSettings::planar_chsh(0.0, 1.0, 2.0, 3.0);
        for (a, ap) in s.pairs() {
            assert!((a.dot(a) - 1.0).abs() < 1e-12);
            assert!((ap.dot(ap) - 1.0).abs() < 1e-12);
        }
    }
}
