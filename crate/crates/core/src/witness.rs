//! Evaluation of the linear and quadratic Bell quantities on a state,
//! comparison against the separability-class bounds, and the certification
//! verdict.
//!
//! The quadratic witness in S form is q_s = <S+>^2 + <S->^2; in F form it
//! is q_f = <F>^2 + <F'>^2 with q_s = 2^(n-2) q_f. A state is certified
//! fully entangled when q_s exceeds 2^(2n-2) beyond numerical tolerance;
//! every quantum state obeys q_s <= 2^(2n-1).

use crate::error::{QbError, Result};
use crate::operators::{chsh_xy, family_expectations};
use crate::settings::MeasurementSettings;
use crate::state::QuantumState;
use serde::{Deserialize, Serialize};

/// Strictly positive violation beyond this margin is required for
/// certification.
pub const VERDICT_TOL: f64 = 1e-9;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedFullyEntangled,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessReport {
    pub schema_version: u32,
    pub n: usize,
    pub f: f64,
    pub fprime: f64,
    pub splus: f64,
    pub sminus: f64,
    pub q_f: f64,
    pub q_s: f64,
    pub bound_biseparable_s: f64,
    pub bound_global_s: f64,
    pub bound_biseparable_f: f64,
    pub bound_global_f: f64,
    /// (|<S+/->| bound on the biseparable class, bound on all states).
    pub linear_s_bounds: (f64, f64),
    /// (max(|<F>|,|<F'>|) bound on the biseparable class, on all states).
    pub linear_f_bounds: (f64, f64),
    pub verdict: Verdict,
    pub margin: f64,
    pub settings: MeasurementSettings,
    pub state_digest: String,
}

/// The two-particle quadratic quantities x = <AB' + A'B>, y = <AB - A'B'>,
/// q = x^2 + y^2; q <= 4 for every quantum state and settings.
pub fn chsh_quadratic(
    state: &QuantumState,
    settings: &MeasurementSettings,
) -> Result<(f64, f64, f64)> {
    if state.num_particles() != 2 {
        return Err(QbError::ParticleCount {
            n: state.num_particles(),
            detail: "chsh_quadratic requires n = 2".into(),
        });
    }
    settings.require_n(2)?;
    let (x_op, y_op) = chsh_xy(settings)?;
    let x = state.expectation(&x_op)?;
    let y = state.expectation(&y_op)?;
    Ok((x, y, x * x + y * y))
}

/// Thresholds as a function of n, computed at run time (never tabulated).
/// The q_f bounds are the q_s bounds divided by 2^(n-2).
pub fn bounds(n: usize) -> (f64, f64, f64, f64) {
    let bisep_s = 2.0_f64.powi(2 * n as i32 - 2);
    let global_s = 2.0_f64.powi(2 * n as i32 - 1);
    let scale = 2.0_f64.powi(n as i32 - 2);
    (bisep_s, global_s, bisep_s / scale, global_s / scale)
}

pub fn linear_s_bounds(n: usize) -> (f64, f64) {
    let b = 2.0_f64.powi(n as i32 - 1);
    (b, b * 2.0_f64.sqrt())
}

pub fn linear_f_bounds(n: usize) -> (f64, f64) {
    (
        2.0_f64.powf(n as f64 / 2.0),
        2.0_f64.powf((n as f64 + 1.0) / 2.0),
    )
}

pub fn evaluate(state: &QuantumState, settings: &MeasurementSettings) -> Result<WitnessReport> {
    let n = state.num_particles();
    if n < 3 {
        return Err(QbError::ParticleCount {
            n,
            detail: "witness evaluation requires n >= 3".into(),
        });
    }
    settings.require_n(n)?;
    let (f, fprime, splus, sminus) = family_expectations(n, settings, state)?;
    let q_f = f * f + fprime * fprime;
    let q_s = splus * splus + sminus * sminus;

    // cross-check the two construction paths through the identity
    let scale = 2.0_f64.powi(n as i32 - 2);
    let reference = q_s.abs().max(scale * q_f.abs()).max(1.0);
    if (q_s - scale * q_f).abs() > 1e-8 * reference {
        return Err(QbError::Inconsistency(format!(
            "q_s = {q_s} vs 2^(n-2) q_f = {}",
            scale * q_f
        )));
    }

    let (bisep_s, global_s, bisep_f, global_f) = bounds(n);
    let margin = q_s - bisep_s;
    let verdict = if margin > VERDICT_TOL {
        Verdict::CertifiedFullyEntangled
    } else {
        Verdict::Inconclusive
    };
    Ok(WitnessReport {
        schema_version: SCHEMA_VERSION,
        n,
        f,
        fprime,
        splus,
        sminus,
        q_f,
        q_s,
        bound_biseparable_s: bisep_s,
        bound_global_s: global_s,
        bound_biseparable_f: bisep_f,
        bound_global_f: global_f,
        linear_s_bounds: linear_s_bounds(n),
        linear_f_bounds: linear_f_bounds(n),
        verdict,
        margin,
        settings: settings.clone(),
        state_digest: state.digest(),
    })
}

/// The two independent linear tests: |<F +/- F'>| <= 2^(n-1) style bounds
/// on the S side and max(|<F>|, |<F'>|) on the F side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearReport {
    pub n: usize,
    pub abs_splus: f64,
    pub abs_sminus: f64,
    pub max_abs_f: f64,
    pub s_bound_biseparable: f64,
    pub s_bound_global: f64,
    pub f_bound_biseparable: f64,
    pub f_bound_global: f64,
    /// |<S+/->| exceeds the biseparable bound 2^(n-1).
    pub violates_s_linear: bool,
    /// max(|<F>|,|<F'>|) exceeds the biseparable bound 2^(n/2).
    pub violates_f_linear: bool,
}

pub fn check_linear(state: &QuantumState, settings: &MeasurementSettings) -> Result<LinearReport> {
    let n = state.num_particles();
    if n < 3 {
        return Err(QbError::ParticleCount {
            n,
            detail: "linear report requires n >= 3".into(),
        });
    }
    settings.require_n(n)?;
    let (f, fprime, splus, sminus) = family_expectations(n, settings, state)?;
    let (s_bisep, s_global) = linear_s_bounds(n);
    let (f_bisep, f_global) = linear_f_bounds(n);
    let abs_splus = splus.abs();
    let abs_sminus = sminus.abs();
    let max_abs_f = f.abs().max(fprime.abs());
    Ok(LinearReport {
        n,
        abs_splus,
        abs_sminus,
        max_abs_f,
        s_bound_biseparable: s_bisep,
        s_bound_global: s_global,
        f_bound_biseparable: f_bisep,
        f_bound_global: f_global,
        violates_s_linear: abs_splus > s_bisep + VERDICT_TOL || abs_sminus > s_bisep + VERDICT_TOL,
        violates_f_linear: max_abs_f > f_bisep + VERDICT_TOL,
    })
}
