//! Spin observables: unit directions on the Bloch sphere and the 2x2
//! Hermitian matrices they generate.

use crate::error::{QbError, Result};
use crate::linalg::{CMat, C64, TOL_CONSTRUCT};
use serde::{Deserialize, Serialize};

/// A measurement direction; invariant |v| = 1 within 1e-12.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitVector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitVector3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if (norm - 1.0).abs() > TOL_CONSTRUCT {
            return Err(QbError::NonUnitVector { x, y, z, norm });
        }
        Ok(Self { x, y, z })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm < 1e-300 {
            return Err(QbError::NonUnitVector { x, y, z, norm });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Direction from polar angles: (sin t cos p, sin t sin p, cos t).
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }

    pub fn x_axis() -> Self {
        Self { x: 1.0, y: 0.0, z: 0.0 }
    }

    pub fn y_axis() -> Self {
        Self { x: 0.0, y: 1.0, z: 0.0 }
    }

    pub fn z_axis() -> Self {
        Self { x: 0.0, y: 0.0, z: 1.0 }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Self) -> (f64, f64, f64) {
        (
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }
}

pub fn sigma_x() -> CMat {
    ndarray::array![
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    ]
}

pub fn sigma_y() -> CMat {
    ndarray::array![
        [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        [C64::new(0.0, 1.0), C64::new(0.0, 0.0)]
    ]
}

pub fn sigma_z() -> CMat {
    ndarray::array![
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]
    ]
}

/// The spin observable u . sigma. Hermitian, involutory, eigenvalues +/-1.
pub fn pauli_observable(u: &UnitVector3) -> CMat {
    ndarray::array![
        [C64::new(u.z, 0.0), C64::new(u.x, -u.y)],
        [C64::new(u.x, u.y), C64::new(-u.z, 0.0)]
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigen, identity, max_abs_diff, trace};
    use rand::{Rng, SeedableRng};

    #[test]
    fn axis_aligned_cases() {
        assert_eq!(max_abs_diff(&pauli_observable(&UnitVector3::z_axis()), &sigma_z()), 0.0);
        assert_eq!(max_abs_diff(&pauli_observable(&UnitVector3::x_axis()), &sigma_x()), 0.0);
        assert_eq!(max_abs_diff(&pauli_observable(&UnitVector3::y_axis()), &sigma_y()), 0.0);
    }

    #[test]
    fn tilted_direction_eigenvalues() {
        // direct 2x2 eigensolve oracle
        let s = 1.0 / 2.0_f64.sqrt();
        let u = UnitVector3::new(s, 0.0, s).unwrap();
        let m = pauli_observable(&u);
        let (evals, _) = hermitian_eigen(&m);
        assert!((evals[0] + 1.0).abs() < 1e-12);
        assert!((evals[1] - 1.0).abs() < 1e-12);
        assert!(trace(&m).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_unit() {
        assert!(UnitVector3::new(0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn involutory_over_random_directions() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let v = UnitVector3::normalized(
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
            )
            .unwrap();
            let m = pauli_observable(&v);
            let sq = m.dot(&m);
            assert!(max_abs_diff(&sq, &identity(2)) <= TOL_CONSTRUCT);
        }
    }
}
