//! n-qubit quantum states: pure vectors and density matrices, standard
//! constructions (GHZ, singlet, products, mixtures), partial traces and the
//! JSON wire format.
//!
//! Convention: particle 0 is the most significant index of the state vector.
//! All tensor products and the recursive operators' "last particle" follow
//! this ordering.

use crate::error::{QbError, Result};
use crate::linalg::{
    hermitian_eigen, is_hermitian, kron, kron_vec, trace, CMat, CVec, C64, TOL_CONSTRUCT,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Largest dimension at which mixed-state positivity is verified by a full
/// eigensolve. Larger states must come from positivity-preserving recipes.
pub const POSITIVITY_CHECK_DIM: usize = 64;

/// Dense operators are kept to at most this many qubits by default.
pub const MAX_DENSE_QUBITS: usize = 10;
/// Hard cap behind an explicit opt-in.
pub const MAX_DENSE_QUBITS_EXTENDED: usize = 12;

#[derive(Debug, Clone)]
pub enum Representation {
    Pure(CVec),
    Mixed(CMat),
}

#[derive(Debug, Clone)]
pub struct QuantumState {
    n: usize,
    repr: Representation,
}

impl QuantumState {
    /// Validated pure-state constructor: length 2^n, unit norm.
    pub fn pure(n: usize, amplitudes: CVec) -> Result<Self> {
        let dim = 1usize << n;
        if amplitudes.len() != dim {
            return Err(QbError::DimensionMismatch {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq.sqrt() - 1.0).abs() > TOL_CONSTRUCT {
            return Err(QbError::InvalidState {
                detail: format!("pure-state norm {} != 1", norm_sq.sqrt()),
            });
        }
        Ok(Self {
            n,
            repr: Representation::Pure(amplitudes),
        })
    }

    /// Validated density-matrix constructor: Hermitian, unit trace, and
    /// positive semidefinite (checked up to dimension 64).
    pub fn mixed(n: usize, rho: CMat) -> Result<Self> {
        let dim = 1usize << n;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(QbError::DimensionMismatch {
                expected: dim,
                got: rho.nrows(),
            });
        }
        if !is_hermitian(&rho, TOL_CONSTRUCT) {
            return Err(QbError::NotHermitian {
                deviation: crate::linalg::hermiticity_defect(&rho),
            });
        }
        let tr = trace(&rho);
        if (tr.re - 1.0).abs() > TOL_CONSTRUCT || tr.im.abs() > TOL_CONSTRUCT {
            return Err(QbError::InvalidState {
                detail: format!("trace {} != 1", tr),
            });
        }
        if dim <= POSITIVITY_CHECK_DIM {
            let (evals, _) = hermitian_eigen(&rho);
            if evals[0] < -1e-10 {
                return Err(QbError::InvalidState {
                    detail: format!("negative eigenvalue {}", evals[0]),
                });
            }
        }
        Ok(Self {
            n,
            repr: Representation::Mixed(rho),
        })
    }

    /// Recipe constructor bypassing the positivity eigensolve; used by
    /// operations that preserve validity by construction.
    pub(crate) fn mixed_unchecked(n: usize, rho: CMat) -> Self {
        Self {
            n,
            repr: Representation::Mixed(rho),
        }
    }

    pub fn num_particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Representation::Pure(_))
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn pure_amplitudes(&self) -> Option<&CVec> {
        match &self.repr {
            Representation::Pure(v) => Some(v),
            Representation::Mixed(_) => None,
        }
    }

    /// Density matrix of the state (projector for pure inputs).
    pub fn density(&self) -> CMat {
        match &self.repr {
            Representation::Pure(v) => {
                let d = v.len();
                let mut rho = CMat::zeros((d, d));
                for i in 0..d {
                    for j in 0..d {
                        rho[(i, j)] = v[i] * v[j].conj();
                    }
                }
                rho
            }
            Representation::Mixed(rho) => rho.clone(),
        }
    }

    /// Tr(rho . op), asserting the imaginary residue is negligible.
    pub fn expectation(&self, op: &CMat) -> Result<f64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(QbError::DimensionMismatch {
                expected: self.dim(),
                got: op.nrows(),
            });
        }
        if !is_hermitian(op, TOL_CONSTRUCT) {
            return Err(QbError::NotHermitian {
                deviation: crate::linalg::hermiticity_defect(op),
            });
        }
        let value = match &self.repr {
            Representation::Pure(v) => crate::linalg::inner(v, &op.dot(v)),
            Representation::Mixed(rho) => {
                let d = self.dim();
                let mut tr = C64::new(0.0, 0.0);
                for i in 0..d {
                    for j in 0..d {
                        tr += rho[(i, j)] * op[(j, i)];
                    }
                }
                tr
            }
        };
        let scale = 1.0 + crate::linalg::max_abs(op);
        if value.im.abs() > 1e-10 * scale {
            return Err(QbError::Inconsistency(format!(
                "expectation has imaginary residue {}",
                value.im
            )));
        }
        Ok(value.re)
    }

    /// Reduced density matrix on `keep` (0-based, ascending global order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<CMat> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.iter().any(|&p| p >= self.n) {
            return Err(QbError::InvalidPartition(format!(
                "keep set {:?} out of range for n={}",
                keep, self.n
            )));
        }
        let traced: Vec<usize> = (0..self.n).filter(|p| !keep.contains(p)).collect();
        let rho = self.density();
        let dk = 1usize << keep.len();
        let dt = 1usize << traced.len();
        // global index with particle p occupying bit (n-1-p) from the LSB
        let assemble = |kept_bits: usize, traced_bits: usize| -> usize {
            let mut idx = 0usize;
            for (pos, &p) in keep.iter().enumerate() {
                let bit = (kept_bits >> (keep.len() - 1 - pos)) & 1;
                idx |= bit << (self.n - 1 - p);
            }
            for (pos, &p) in traced.iter().enumerate() {
                let bit = (traced_bits >> (traced.len() - 1 - pos)) & 1;
                idx |= bit << (self.n - 1 - p);
            }
            idx
        };
        let mut out = CMat::zeros((dk, dk));
        for i in 0..dk {
            for j in 0..dk {
                let mut acc = C64::new(0.0, 0.0);
                for e in 0..dt {
                    acc += rho[(assemble(i, e), assemble(j, e))];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    /// SHA-256 digest of the canonical serialized form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(&StateJson::from(self)).expect("state serializes");
        let mut hasher = Sha256::new();
        hasher.update(&json);
        format!("{:x}", hasher.finalize())
    }
}

/// (|0...0> + phase |1...1>)/sqrt(2) in the computational basis.
pub fn ghz_state(n: usize, plus: bool) -> Result<QuantumState> {
    if n < 2 {
        return Err(QbError::ParticleCount {
            n,
            detail: "GHZ state needs n >= 2".into(),
        });
    }
    let dim = 1usize << n;
    let mut amp = CVec::zeros(dim);
    let s = 1.0 / 2.0_f64.sqrt();
    amp[0] = C64::new(s, 0.0);
    amp[dim - 1] = C64::new(if plus { s } else { -s }, 0.0);
    QuantumState::pure(n, amp)
}

/// (|01> - |10>)/sqrt(2).
pub fn singlet() -> QuantumState {
    let s = 1.0 / 2.0_f64.sqrt();
    let amp = CVec::from(vec![
        C64::new(0.0, 0.0),
        C64::new(s, 0.0),
        C64::new(-s, 0.0),
        C64::new(0.0, 0.0),
    ]);
    QuantumState::pure(2, amp).expect("singlet is normalized")
}

/// |0>^n product state (all spins up).
pub fn all_up(n: usize) -> QuantumState {
    let mut amp = CVec::zeros(1 << n);
    amp[0] = C64::new(1.0, 0.0);
    QuantumState::pure(n, amp).expect("basis state")
}

/// The W state (equal superposition of single-excitation basis states).
pub fn w_state(n: usize) -> Result<QuantumState> {
    if n < 2 {
        return Err(QbError::ParticleCount {
            n,
            detail: "W state needs n >= 2".into(),
        });
    }
    let dim = 1usize << n;
    let mut amp = CVec::zeros(dim);
    let s = 1.0 / (n as f64).sqrt();
    for p in 0..n {
        amp[1usize << (n - 1 - p)] = C64::new(s, 0.0);
    }
    QuantumState::pure(n, amp)
}

/// Maximally mixed state I / 2^n.
pub fn maximally_mixed(n: usize) -> QuantumState {
    let dim = 1usize << n;
    let rho = crate::linalg::identity(dim).mapv(|z| z / dim as f64);
    QuantumState::mixed_unchecked(n, rho)
}

fn permute_pure(v: &CVec, groups_concat: &[usize], n: usize) -> CVec {
    // v is indexed by the concatenated group ordering; spread its bits into
    // the global slots.
    let dim = 1usize << n;
    let mut out = CVec::zeros(dim);
    for idx in 0..dim {
        let mut gidx = 0usize;
        for (pos, &p) in groups_concat.iter().enumerate() {
            let bit = (idx >> (n - 1 - pos)) & 1;
            gidx |= bit << (n - 1 - p);
        }
        out[gidx] = v[idx];
    }
    out
}

fn permute_mixed(rho: &CMat, groups_concat: &[usize], n: usize) -> CMat {
    let dim = 1usize << n;
    let map: Vec<usize> = (0..dim)
        .map(|idx| {
            let mut gidx = 0usize;
            for (pos, &p) in groups_concat.iter().enumerate() {
                let bit = (idx >> (n - 1 - pos)) & 1;
                gidx |= bit << (n - 1 - p);
            }
            gidx
        })
        .collect();
    let mut out = CMat::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            out[(map[i], map[j])] = rho[(i, j)];
        }
    }
    out
}

/// Tensor product of `parts` placed at the particle slots named by
/// `partition` (0-based). The partition must cover 0..n exactly once.
pub fn compose_state(parts: &[QuantumState], partition: &[Vec<usize>]) -> Result<QuantumState> {
    if parts.len() != partition.len() {
        return Err(QbError::InvalidPartition(format!(
            "{} parts but {} groups",
            parts.len(),
            partition.len()
        )));
    }
    let mut all: Vec<usize> = partition.iter().flatten().copied().collect();
    let n = all.len();
    all.sort_unstable();
    if all != (0..n).collect::<Vec<_>>() {
        return Err(QbError::InvalidPartition(format!(
            "groups {:?} do not cover 0..{} exactly once",
            partition, n
        )));
    }
    for (part, group) in parts.iter().zip(partition.iter()) {
        if part.num_particles() != group.len() {
            return Err(QbError::DimensionMismatch {
                expected: 1 << group.len(),
                got: part.dim(),
            });
        }
    }
    let concat: Vec<usize> = partition.iter().flatten().copied().collect();
    let any_mixed = parts.iter().any(|p| !p.is_pure());
    if any_mixed {
        let mut rho = CMat::from_elem((1, 1), C64::new(1.0, 0.0));
        for part in parts {
            rho = kron(&rho, &part.density());
        }
        Ok(QuantumState::mixed_unchecked(
            n,
            permute_mixed(&rho, &concat, n),
        ))
    } else {
        let mut v = CVec::from(vec![C64::new(1.0, 0.0)]);
        for part in parts {
            v = kron_vec(&v, part.pure_amplitudes().expect("pure"));
        }
        QuantumState::pure(n, permute_pure(&v, &concat, n))
    }
}

/// Convex mixture sum_i w_i rho_i; pure inputs are promoted to projectors.
pub fn mixture(weights: &[f64], states: &[QuantumState]) -> Result<QuantumState> {
    if weights.len() != states.len() {
        return Err(QbError::InvalidWeights(format!(
            "{} weights for {} states",
            weights.len(),
            states.len()
        )));
    }
    if states.is_empty() {
        return Err(QbError::InvalidWeights("empty mixture".into()));
    }
    if weights.iter().any(|&w| w < 0.0) {
        return Err(QbError::InvalidWeights("negative weight".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > TOL_CONSTRUCT {
        return Err(QbError::InvalidWeights(format!("weights sum to {total}")));
    }
    let n = states[0].num_particles();
    if states.iter().any(|s| s.num_particles() != n) {
        return Err(QbError::DimensionMismatch {
            expected: 1 << n,
            got: 0,
        });
    }
    let dim = 1usize << n;
    let mut rho = CMat::zeros((dim, dim));
    for (w, s) in weights.iter().zip(states.iter()) {
        if *w == 0.0 {
            continue;
        }
        rho = rho + s.density().mapv(|z| z * *w);
    }
    Ok(QuantumState::mixed_unchecked(n, rho))
}

/// JSON wire format: {n, kind, data} with data as interleaved re/im pairs,
/// row-major for matrices.
#[derive(Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub n: usize,
    pub kind: String,
    pub data: Vec<f64>,
}

impl From<&QuantumState> for StateJson {
    fn from(state: &QuantumState) -> Self {
        match state.representation() {
            Representation::Pure(v) => StateJson {
                n: state.num_particles(),
                kind: "pure".into(),
                data: v.iter().flat_map(|z| [z.re, z.im]).collect(),
            },
            Representation::Mixed(rho) => StateJson {
                n: state.num_particles(),
                kind: "mixed".into(),
                data: rho.iter().flat_map(|z| [z.re, z.im]).collect(),
            },
        }
    }
}

impl StateJson {
    pub fn into_state(self) -> Result<QuantumState> {
        let dim = 1usize << self.n;
        let complex: Vec<C64> = self
            .data
            .chunks(2)
            .map(|c| C64::new(c[0], *c.get(1).unwrap_or(&0.0)))
            .collect();
        match self.kind.as_str() {
            "pure" => QuantumState::pure(self.n, CVec::from(complex)),
            "mixed" => {
                if complex.len() != dim * dim {
                    return Err(QbError::DimensionMismatch {
                        expected: dim * dim,
                        got: complex.len(),
                    });
                }
                let rho = CMat::from_shape_vec((dim, dim), complex)
                    .map_err(|e| QbError::InvalidState { detail: e.to_string() })?;
                QuantumState::mixed(self.n, rho)
            }
            other => Err(QbError::InvalidState {
                detail: format!("unknown kind {other:?}"),
            }),
        }
    }
}
