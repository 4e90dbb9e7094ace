//! Schmidt decomposition of two-qubit pure states via the 2x2
//! singular-value route on the amplitude matrix.
//!
//! The decomposition is reported in the biorthogonal form
//! |psi> = p |phi_1>|chi_1> - q |phi_2>|chi_2>, p >= q >= 0, with the minus
//! sign absorbed into the phase of the second local basis vector.

use crate::error::{QbError, Result};
use crate::linalg::{hermitian_eigen, CMat, CVec};
use crate::state::QuantumState;

#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub p: f64,
    pub q: f64,
    /// Orthonormal basis {|phi_1>, |phi_2>} on particle 0, as columns.
    pub basis1: CMat,
    /// Orthonormal basis {|chi_1>, |chi_2>} on particle 1, as columns.
    pub basis2: CMat,
}

impl SchmidtForm {
    /// Rebuilds p |phi_1>|chi_1> - q |phi_2>|chi_2> as a 4-vector.
    pub fn reconstruct(&self) -> CVec {
        let mut v = CVec::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                v[2 * i + j] = self.basis1[(i, 0)] * self.basis2[(j, 0)] * self.p
                    - self.basis1[(i, 1)] * self.basis2[(j, 1)] * self.q;
            }
        }
        v
    }
}

/// Fidelity |<a|b>|^2 between unit vectors.
pub fn fidelity(a: &CVec, b: &CVec) -> f64 {
    crate::linalg::inner(a, b).norm_sqr()
}

pub fn schmidt_decompose(state: &QuantumState) -> Result<SchmidtForm> {
    if state.num_particles() != 2 {
        return Err(QbError::ParticleCount {
            n: state.num_particles(),
            detail: "Schmidt decomposition requires a two-qubit state".into(),
        });
    }
    let amps = state
        .pure_amplitudes()
        .ok_or_else(|| QbError::InvalidState {
            detail: "Schmidt decomposition requires a pure state".into(),
        })?;

    // amplitude matrix M[i][j] = <ij|psi>, particle 0 rows
    let m = ndarray::array![[amps[0], amps[1]], [amps[2], amps[3]]];
    let mdag = crate::linalg::dagger(&m);

    // right singular vectors from M^dag M (ascending eigenvalues)
    let (evals, v) = hermitian_eigen(&mdag.dot(&m));
    let q = evals[0].max(0.0).sqrt();
    let p = evals[1].max(0.0).sqrt();

    let v1 = v.column(1).to_owned(); // singular value p
    let v2 = v.column(0).to_owned(); // singular value q

    // left vectors: u_k = M v_k / sigma_k; for a degenerate sigma ~ 0 pick
    // the orthogonal complement of u_1.
    let u1 = {
        let mut u = m.dot(&v1);
        let norm: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        u.mapv_inplace(|z| z / norm);
        u
    };
    let u2 = if q > 1e-9 {
        let mut u = m.dot(&v2);
        let norm: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        u.mapv_inplace(|z| z / norm);
        u
    } else {
        CVec::from(vec![-u1[1].conj(), u1[0].conj()])
    };

    // |psi> = p u1 (x) conj(v1) + q u2 (x) conj(v2); flip the sign of chi_2
    // to land on the p ... - q ... convention.
    let basis1 = ndarray::array![[u1[0], u2[0]], [u1[1], u2[1]]];
    let basis2 = ndarray::array![
        [v1[0].conj(), -v2[0].conj()],
        [v1[1].conj(), -v2[1].conj()]
    ];

    let form = SchmidtForm { p, q, basis1, basis2 };
    let rec = form.reconstruct();
    let amps_owned = amps.to_owned();
    if fidelity(&rec, &amps_owned) < 1.0 - 1e-10 {
        return Err(QbError::Inconsistency(format!(
            "Schmidt reconstruction fidelity {} too low",
            fidelity(&rec, &amps_owned)
        )));
    }
    Ok(form)
}
