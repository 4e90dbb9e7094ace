//! Maximization of Bell quantities over measurement settings (and
//! optionally over pure biseparable states) by multi-start Nelder-Mead over
//! angle coordinates, plus the planar-angle machinery behind the
//! two-particle quadratic bound.

use crate::error::{QbError, Result};
use crate::linalg::{hermitian_eigen, CMat, CVec, C64};
use crate::operators::{build_f, build_s, chsh_operator, chsh_xy};
use crate::pauli::UnitVector3;
use crate::random::rng_for;
use crate::settings::MeasurementSettings;
use crate::state::{compose_state, QuantumState};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    QS,
    QF,
    AbsF,
    AbsSPlus,
    AbsSMinus,
    /// |<AB + AB' + A'B - A'B'>| at n = 2.
    Chsh,
    /// x^2 + y^2 at n = 2.
    ChshQuadratic,
}

impl Objective {
    pub fn requires_two_particles(&self) -> bool {
        matches!(self, Objective::Chsh | Objective::ChshQuadratic)
    }

    /// The bound no quantum state exceeds, used as an optimizer sanity cap.
    pub fn global_bound(&self, n: usize) -> f64 {
        match self {
            Objective::QS => 2.0_f64.powi(2 * n as i32 - 1),
            Objective::QF => 2.0_f64.powi(2 * n as i32 - 1) / 2.0_f64.powi(n as i32 - 2),
            Objective::AbsF => 2.0_f64.powf((n as f64 + 1.0) / 2.0),
            Objective::AbsSPlus | Objective::AbsSMinus => {
                2.0_f64.powi(n as i32 - 1) * 2.0_f64.sqrt()
            }
            Objective::Chsh => 2.0 * 2.0_f64.sqrt(),
            Objective::ChshQuadratic => 4.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizationConfig {
    pub objective: Objective,
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Fix all polar angles to pi/2 (x-y plane), halving the coordinate
    /// count. Defaults to on for two-particle quadratic studies.
    pub planar: Option<bool>,
}

impl OptimizationConfig {
    pub fn new(objective: Objective) -> Self {
        Self {
            objective,
            restarts: 20,
            max_iterations: 4000,
            tolerance: 1e-10,
            seed: 0,
            planar: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(QbError::Config("restarts must be >= 1".into()));
        }
        if self.tolerance <= 0.0 {
            return Err(QbError::Config("tolerance must be positive".into()));
        }
        Ok(())
    }

    fn planar_resolved(&self) -> bool {
        self.planar
            .unwrap_or(self.objective.requires_two_particles())
    }
}

/// Evaluates the objective from scratch at the given settings.
pub fn objective_value(
    objective: Objective,
    state: &QuantumState,
    settings: &MeasurementSettings,
) -> Result<f64> {
    let n = state.num_particles();
    match objective {
        Objective::Chsh => Ok(state.expectation(&chsh_operator(settings)?)?.abs()),
        Objective::ChshQuadratic => {
            let (_, _, q) = crate::witness::chsh_quadratic(state, settings)?;
            Ok(q)
        }
        Objective::AbsF => Ok(build_f(n, settings, false)?.expectation(state)?.abs()),
        Objective::AbsSPlus => Ok(build_s(n, settings, true)?.expectation(state)?.abs()),
        Objective::AbsSMinus => Ok(build_s(n, settings, false)?.expectation(state)?.abs()),
        Objective::QF => {
            let r = crate::witness::evaluate(state, settings)?;
            Ok(r.q_f)
        }
        Objective::QS => {
            let r = crate::witness::evaluate(state, settings)?;
            Ok(r.q_s)
        }
    }
}

/// Search coordinates: per particle (theta, phi, theta', phi'), or
/// (phi, phi') under the planar restriction.
pub fn settings_from_angles(angles: &[f64], n: usize, planar: bool) -> MeasurementSettings {
    let pairs = (0..n)
        .map(|j| {
            if planar {
                let phi = angles[2 * j];
                let phi_p = angles[2 * j + 1];
                (
                    UnitVector3::from_angles(PI / 2.0, phi),
                    UnitVector3::from_angles(PI / 2.0, phi_p),
                )
            } else {
                let (t, p, tp, pp) = (
                    angles[4 * j],
                    angles[4 * j + 1],
                    angles[4 * j + 2],
                    angles[4 * j + 3],
                );
                (
                    UnitVector3::from_angles(t, p),
                    UnitVector3::from_angles(tp, pp),
                )
            }
        })
        .collect();
    MeasurementSettings::new(pairs).expect("n >= 1")
}

/// Canonicalizes to theta in [0, pi], phi in [0, 2 pi).
pub fn canonical_angles(theta: f64, phi: f64) -> (f64, f64) {
    let mut t = theta.rem_euclid(2.0 * PI);
    let mut p = phi;
    if t > PI {
        t = 2.0 * PI - t;
        p += PI;
    }
    (t, p.rem_euclid(2.0 * PI))
}

/// One downhill-simplex minimization run.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_iterations: usize,
    tolerance: f64,
) -> (Vec<f64>, f64, usize) {
    let dim = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    let mut iterations = 0;
    while iterations < max_iterations {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        // simplex diameter convergence
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(simplex[0].0.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max)
            })
            .fold(0.0_f64, f64::max);
        if diameter < tolerance {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|(x, _)| x[i]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> = (0..dim)
            .map(|i| centroid[i] + alpha * (centroid[i] - worst.0[i]))
            .collect();
        let f_reflect = f(&reflect);
        if f_reflect < simplex[0].1 {
            let expand: Vec<f64> = (0..dim)
                .map(|i| centroid[i] + gamma * (reflect[i] - centroid[i]))
                .collect();
            let f_expand = f(&expand);
            simplex[dim] = if f_expand < f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
        } else if f_reflect < simplex[dim - 1].1 {
            simplex[dim] = (reflect, f_reflect);
        } else {
            let contract: Vec<f64> = (0..dim)
                .map(|i| centroid[i] + rho * (worst.0[i] - centroid[i]))
                .collect();
            let f_contract = f(&contract);
            if f_contract < worst.1 {
                simplex[dim] = (contract, f_contract);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = (0..dim)
                        .map(|i| best[i] + sigma * (entry.0[i] - best[i]))
                        .collect();
                    let fx = f(&x);
                    *entry = (x, fx);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    (simplex[0].0.clone(), simplex[0].1, iterations)
}

#[derive(Debug, Clone, Serialize)]
pub struct RestartRecord {
    pub restart: usize,
    pub iterations: usize,
    pub value: f64,
    pub angles: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    pub settings: MeasurementSettings,
    pub value: f64,
    pub trace: Vec<RestartRecord>,
}

/// Multi-start Nelder-Mead over setting angles; deterministic under a fixed
/// seed. The reported value is re-evaluated from the returned settings.
pub fn optimize_settings(
    state: &QuantumState,
    config: &OptimizationConfig,
) -> Result<OptimizationResult> {
    config.validate()?;
    let n = state.num_particles();
    if config.objective.requires_two_particles() && n != 2 {
        return Err(QbError::Config(format!(
            "objective {:?} requires a two-particle state, got n = {n}",
            config.objective
        )));
    }
    let planar = config.planar_resolved();
    let coords = if planar { 2 * n } else { 4 * n };

    let mut trace = Vec::with_capacity(config.restarts);
    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    for restart in 0..config.restarts {
        let mut rng = rng_for(config.seed, restart as u64);
        let x0: Vec<f64> = (0..coords).map(|_| rng.gen::<f64>() * 2.0 * PI).collect();
        let objective = config.objective;
        let f = |angles: &[f64]| -> f64 {
            let s = settings_from_angles(angles, n, planar);
            -objective_value(objective, state, &s).unwrap_or(f64::NEG_INFINITY)
        };
        let (angles, neg_value, iterations) =
            nelder_mead(f, &x0, 0.7, config.max_iterations, config.tolerance);
        let value = -neg_value;
        trace.push(RestartRecord {
            restart,
            iterations,
            value,
            angles: angles.clone(),
        });
        // lowest restart index wins ties
        let better = match &best {
            None => true,
            Some((_, bv, _)) => value > *bv,
        };
        if better {
            best = Some((restart, value, angles));
        }
    }
    let (_, _, angles) = best.expect("restarts >= 1");
    let settings = settings_from_angles(&angles, n, planar);
    let value = objective_value(config.objective, state, &settings)?;
    let cap = config.objective.global_bound(n);
    if value > cap + 1e-6 {
        return Err(QbError::Inconsistency(format!(
            "optimizer value {value} exceeds the global bound {cap}; operator construction bug"
        )));
    }
    Ok(OptimizationResult {
        settings,
        value,
        trace,
    })
}

/// The pinned extremal Svetlichny settings for three particles: every
/// particle measures in the x-y plane at azimuth -pi/12, primed at
/// 5 pi/12. Drives GHZ_3 to |<S->| = 4 sqrt 2.
pub fn svetlichny_opt_settings(n: usize) -> MeasurementSettings {
    assert_eq!(n, 3, "pinned Svetlichny settings are three-particle");
    let phi = -PI / 12.0;
    let dir = |p: f64| UnitVector3::from_angles(PI / 2.0, p);
    MeasurementSettings::new(vec![(dir(phi), dir(phi + PI / 2.0)); 3]).expect("n = 3")
}

// --- biseparable-class optimization ---

fn bipartitions(n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    // masks with particle 0 always on the left avoid double counting
    for mask in 0..(1usize << (n - 1)) {
        let mask = mask << 1 | 1;
        if mask == (1 << n) - 1 {
            continue;
        }
        let left: Vec<usize> = (0..n).filter(|p| (mask >> p) & 1 == 1).collect();
        let right: Vec<usize> = (0..n).filter(|p| (mask >> p) & 1 == 0).collect();
        out.push((left, right));
    }
    out
}

/// <phi_other| Op |phi_other>, a Hermitian operator on the `block` slots.
fn effective_operator(
    op: &CMat,
    n: usize,
    block: &[usize],
    other: &[usize],
    phi_other: &CVec,
) -> CMat {
    let db = 1usize << block.len();
    let do_ = 1usize << other.len();
    let assemble = |block_bits: usize, other_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &p) in block.iter().enumerate() {
            idx |= ((block_bits >> (block.len() - 1 - pos)) & 1) << (n - 1 - p);
        }
        for (pos, &p) in other.iter().enumerate() {
            idx |= ((other_bits >> (other.len() - 1 - pos)) & 1) << (n - 1 - p);
        }
        idx
    };
    let mut out = CMat::zeros((db, db));
    for i in 0..db {
        for j in 0..db {
            let mut acc = C64::new(0.0, 0.0);
            for e in 0..do_ {
                for ep in 0..do_ {
                    acc += phi_other[e].conj() * op[(assemble(i, e), assemble(j, ep))] * phi_other[ep];
                }
            }
            out[(i, j)] = acc;
        }
    }
    out
}

fn top_eigenvector(m: &CMat) -> CVec {
    let (evals, evecs) = hermitian_eigen(m);
    let top = evals.len() - 1;
    evecs.column(top).to_owned()
}

/// The linearization of the objective at the current expectations: a single
/// Hermitian operator whose expectation the state step maximizes.
fn gradient_operator(
    objective: Objective,
    n: usize,
    settings: &MeasurementSettings,
    state: &QuantumState,
) -> Result<CMat> {
    match objective {
        Objective::AbsF => {
            let h = build_f(n, settings, false)?;
            let sign = h.expectation(state)?.signum();
            Ok(h.dense()?.mapv(|z| z * sign))
        }
        Objective::AbsSPlus => {
            let h = build_s(n, settings, true)?;
            let sign = h.expectation(state)?.signum();
            Ok(h.dense()?.mapv(|z| z * sign))
        }
        Objective::AbsSMinus => {
            let h = build_s(n, settings, false)?;
            let sign = h.expectation(state)?.signum();
            Ok(h.dense()?.mapv(|z| z * sign))
        }
        Objective::QF => {
            let f = build_f(n, settings, false)?;
            let fp = build_f(n, settings, true)?;
            let (cf, cfp) = (f.expectation(state)?, fp.expectation(state)?);
            // degenerate at the origin: fall back to F
            if cf.abs() + cfp.abs() < 1e-12 {
                return f.dense();
            }
            Ok(f.dense()?.mapv(|z| z * cf) + fp.dense()?.mapv(|z| z * cfp))
        }
        Objective::QS => {
            let sp = build_s(n, settings, true)?;
            let sm = build_s(n, settings, false)?;
            let (cp, cm) = (sp.expectation(state)?, sm.expectation(state)?);
            if cp.abs() + cm.abs() < 1e-12 {
                return sp.dense();
            }
            Ok(sp.dense()?.mapv(|z| z * cp) + sm.dense()?.mapv(|z| z * cm))
        }
        Objective::Chsh => {
            let op = chsh_operator(settings)?;
            let sign = state.expectation(&op)?.signum();
            Ok(op.mapv(|z| z * sign))
        }
        Objective::ChshQuadratic => {
            let (x_op, y_op) = chsh_xy(settings)?;
            let (cx, cy) = (state.expectation(&x_op)?, state.expectation(&y_op)?);
            if cx.abs() + cy.abs() < 1e-12 {
                return Ok(x_op);
            }
            Ok(x_op.mapv(|z| z * cx) + y_op.mapv(|z| z * cy))
        }
    }
}

#[derive(Debug, Clone)]
pub struct BiseparableOptimum {
    pub state: QuantumState,
    pub settings: MeasurementSettings,
    pub value: f64,
    pub partition: (Vec<usize>, Vec<usize>),
}

/// Supremum estimate of the objective over pure biseparable states, by
/// alternating a settings step (Nelder-Mead) with a state step
/// (eigenvector update of each factor against the linearized objective).
pub fn optimize_over_biseparable(
    n: usize,
    config: &OptimizationConfig,
) -> Result<BiseparableOptimum> {
    config.validate()?;
    if n < 3 {
        return Err(QbError::ParticleCount {
            n,
            detail: "biseparable-class optimization requires n >= 3".into(),
        });
    }
    let parts = bipartitions(n);
    let mut best: Option<BiseparableOptimum> = None;

    for restart in 0..config.restarts {
        let mut rng = rng_for(config.seed.wrapping_add(1), restart as u64);
        let (left, right) = parts[restart % parts.len()].clone();
        let mut factor_left = crate::random::random_pure(left.len(), &mut rng);
        let mut factor_right = crate::random::random_pure(right.len(), &mut rng);
        let mut angles: Vec<f64> = (0..4 * n).map(|_| rng.gen::<f64>() * 2.0 * PI).collect();
        let mut current_value = f64::NEG_INFINITY;

        for _round in 0..50 {
            let state = compose_state(
                &[factor_left.clone(), factor_right.clone()],
                &[left.clone(), right.clone()],
            )?;

            // settings step
            let objective = config.objective;
            let f = |a: &[f64]| -> f64 {
                let s = settings_from_angles(a, n, false);
                -objective_value(objective, &state, &s).unwrap_or(f64::NEG_INFINITY)
            };
            let (new_angles, neg_value, _) = nelder_mead(f, &angles, 0.5, 400, 1e-10);
            angles = new_angles;
            let settings = settings_from_angles(&angles, n, false);
            let mut value = -neg_value;

            // state step: refresh each factor as the dominant eigenvector of
            // the linearized objective restricted to its block
            for _ in 0..4 {
                let state = compose_state(
                    &[factor_left.clone(), factor_right.clone()],
                    &[left.clone(), right.clone()],
                )?;
                let w = gradient_operator(config.objective, n, &settings, &state)?;
                let eff_left = effective_operator(
                    &w,
                    n,
                    &left,
                    &right,
                    factor_right.pure_amplitudes().expect("pure factor"),
                );
                factor_left =
                    QuantumState::pure(left.len(), normalize(top_eigenvector(&eff_left)))?;
                let state = compose_state(
                    &[factor_left.clone(), factor_right.clone()],
                    &[left.clone(), right.clone()],
                )?;
                let w = gradient_operator(config.objective, n, &settings, &state)?;
                let eff_right = effective_operator(
                    &w,
                    n,
                    &right,
                    &left,
                    factor_left.pure_amplitudes().expect("pure factor"),
                );
                factor_right =
                    QuantumState::pure(right.len(), normalize(top_eigenvector(&eff_right)))?;
            }
            let state = compose_state(
                &[factor_left.clone(), factor_right.clone()],
                &[left.clone(), right.clone()],
            )?;
            value = value.max(objective_value(config.objective, &state, &settings)?);

            if value - current_value < 1e-10 {
                break;
            }
            current_value = value;
        }

        let state = compose_state(
            &[factor_left.clone(), factor_right.clone()],
            &[left.clone(), right.clone()],
        )?;
        let settings = settings_from_angles(&angles, n, false);
        let value = objective_value(config.objective, &state, &settings)?;
        let better = match &best {
            None => true,
            Some(b) => value > b.value,
        };
        if better {
            best = Some(BiseparableOptimum {
                state,
                settings,
                value,
                partition: (left, right),
            });
        }
    }
    Ok(best.expect("restarts >= 1"))
}

fn normalize(mut v: CVec) -> CVec {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv_inplace(|z| z / norm);
    v
}

// --- planar-angle machinery ---

/// The cyclic angles a->b, b->a', a'->b', b'->a of four coplanar
/// directions; they sum to 2 pi.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PlanarAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl PlanarAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self { alpha, beta, gamma, delta }
    }

    /// Successive in-plane angles of four coplanar unit vectors taken in
    /// the cyclic order a, b, a', b'.
    pub fn from_vectors(
        a: &UnitVector3,
        b: &UnitVector3,
        a_prime: &UnitVector3,
        b_prime: &UnitVector3,
    ) -> Result<Self> {
        let (nx, ny, nz) = b.cross(b_prime);
        let norm = (nx * nx + ny * ny + nz * nz).sqrt();
        if norm < 1e-9 {
            return Err(QbError::Config("b and b' do not span a plane".into()));
        }
        let normal = UnitVector3::normalized(nx, ny, nz)?;
        // The orientation of the plane normal fixes the winding sense; pick
        // the sign whose four steps close up to a single turn.
        let build = |normal: &UnitVector3| -> Result<Self> {
            let e1 = *b;
            let (cx, cy, cz) = normal.cross(&e1);
            let e2 = UnitVector3::normalized(cx, cy, cz)?;
            let azimuth = |v: &UnitVector3| v.dot(&e2).atan2(v.dot(&e1));
            let step = |from: f64, to: f64| -> f64 { (to - from).rem_euclid(2.0 * PI) };
            let (pa, pb, pap, pbp) =
                (azimuth(a), azimuth(b), azimuth(a_prime), azimuth(b_prime));
            Ok(Self {
                alpha: step(pa, pb),
                beta: step(pb, pap),
                gamma: step(pap, pbp),
                delta: step(pbp, pa),
            })
        };
        let forward = build(&normal)?;
        let flipped = build(&UnitVector3::normalized(-normal.x, -normal.y, -normal.z)?)?;
        if (forward.sum() - 2.0 * PI).abs() <= (flipped.sum() - 2.0 * PI).abs() {
            Ok(forward)
        } else {
            Ok(flipped)
        }
    }

    pub fn sum(&self) -> f64 {
        self.alpha + self.beta + self.gamma + self.delta
    }
}

/// (cos beta + cos delta)^2 + (cos alpha - cos gamma)^2; at most 4 whenever
/// the four angles close up to a full turn.
pub fn planar_quadratic_value(angles: &PlanarAngles) -> Result<f64> {
    let closure = (angles.sum() - 2.0 * PI).abs();
    // allow extra turns: the four steps of a cyclic arrangement may wind
    // k full circles; only the printed single-turn case is admitted
    if closure > 1e-9 {
        return Err(QbError::Config(format!(
            "angles sum to 2 pi + {closure:.3e}; constraint violated"
        )));
    }
    let x = angles.beta.cos() + angles.delta.cos();
    let y = angles.alpha.cos() - angles.gamma.cos();
    Ok(x * x + y * y)
}

#[derive(Debug, Clone, Serialize)]
pub struct CoplanarityReport {
    pub objective_value: f64,
    /// Largest out-of-plane angle (radians) of a or a' relative to the
    /// plane spanned by b and b'.
    pub max_out_of_plane: f64,
    pub coplanar: bool,
}

/// Confirms that optima of x^2 + y^2 on a maximally entangled two-qubit
/// state have all four directions coplanar: fits the best plane through
/// {a, a', b, b'} (smallest-eigenvalue direction of the moment matrix) and
/// measures the worst out-of-plane angle.
pub fn coplanarity_check(
    settings: &MeasurementSettings,
    state: &QuantumState,
) -> Result<CoplanarityReport> {
    settings.require_n(2)?;
    let value = objective_value(Objective::ChshQuadratic, state, settings)?;
    let (a, ap) = settings.pair(0);
    let (b, bp) = settings.pair(1);
    let vectors = [a, ap, b, bp];
    let mut moment = CMat::zeros((3, 3));
    for v in &vectors {
        let c = [v.x, v.y, v.z];
        for i in 0..3 {
            for j in 0..3 {
                moment[(i, j)] += C64::new(c[i] * c[j], 0.0);
            }
        }
    }
    let (_, evecs) = hermitian_eigen(&moment);
    let normal = UnitVector3::normalized(
        evecs[(0, 0)].re,
        evecs[(1, 0)].re,
        evecs[(2, 0)].re,
    )?;
    let out_of_plane = |v: &UnitVector3| v.dot(&normal).abs().min(1.0).asin();
    let max_out_of_plane = vectors.iter().map(out_of_plane).fold(0.0_f64, f64::max);
    Ok(CoplanarityReport {
        objective_value: value,
        max_out_of_plane,
        coplanar: max_out_of_plane <= 1e-4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{ghz_state, singlet};

    fn quick(objective: Objective, restarts: usize, seed: u64) -> OptimizationConfig {
        let mut c = OptimizationConfig::new(objective);
        c.restarts = restarts;
        c.seed = seed;
        c
    }

    #[test]
    fn singlet_chsh_reaches_cirelson() {
        let r = optimize_settings(&singlet(), &quick(Objective::Chsh, 6, 1)).unwrap();
        assert!((r.value - 2.0 * 2.0_f64.sqrt()).abs() < 1e-6, "value {}", r.value);
    }

    #[test]
    fn ghz3_extremes() {
        let g = ghz_state(3, true).unwrap();
        let r = optimize_settings(&g, &quick(Objective::AbsF, 8, 2)).unwrap();
        assert!((r.value - 4.0).abs() < 1e-6, "abs_f {}", r.value);

        let r = optimize_settings(&g, &quick(Objective::QS, 8, 3)).unwrap();
        assert!((32.0 - r.value).abs() < 1e-4, "q_s {}", r.value);
    }

    #[test]
    fn svetlichny_fixture_hits_4_sqrt2() {
        let g = ghz_state(3, true).unwrap();
        let s = svetlichny_opt_settings(3);
        let v = build_s(3, &s, false).unwrap().expectation(&g).unwrap();
        assert!((v - 4.0 * 2.0_f64.sqrt()).abs() < 1e-12, "S- = {v}");
    }

    #[test]
    fn reproducibility_bit_for_bit() {
        let g = ghz_state(3, true).unwrap();
        let a = optimize_settings(&g, &quick(Objective::AbsF, 3, 7)).unwrap();
        let b = optimize_settings(&g, &quick(Objective::AbsF, 3, 7)).unwrap();
        assert_eq!(a.settings, b.settings);
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn monotone_in_restarts() {
        let g = ghz_state(3, true).unwrap();
        let mut last = f64::NEG_INFINITY;
        for restarts in [1, 2, 4] {
            let r = optimize_settings(&g, &quick(Objective::AbsSMinus, restarts, 11)).unwrap();
            assert!(r.value >= last - 1e-12);
            last = r.value;
        }
    }

    #[test]
    fn planar_quadratic_examples() {
        let half_pi = PI / 2.0;
        let v = planar_quadratic_value(&PlanarAngles::new(half_pi, half_pi, half_pi, half_pi))
            .unwrap();
        assert!(v.abs() < 1e-12);
        let v = planar_quadratic_value(&PlanarAngles::new(PI, 0.0, PI, 0.0)).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        assert!(planar_quadratic_value(&PlanarAngles::new(1.0, 1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn planar_angles_from_vectors_close_up() {
        let dir = |p: f64| UnitVector3::from_angles(PI / 2.0, p);
        let a = dir(0.0);
        let b = dir(0.7);
        let ap = dir(2.0);
        let bp = dir(4.0);
        let ang = PlanarAngles::from_vectors(&a, &b, &ap, &bp).unwrap();
        assert!((ang.sum() - 2.0 * PI).abs() < 1e-12);
        assert!((ang.alpha - 0.7).abs() < 1e-12);
    }

    #[test]
    fn biseparable_qf_tightness_n3() {
        let mut c = quick(Objective::QF, 9, 21);
        c.max_iterations = 800;
        let r = optimize_over_biseparable(3, &c).unwrap();
        assert!(r.value >= 8.0 - 1e-3, "q_f supremum estimate {}", r.value);
        assert!(r.value <= 8.0 + 1e-9);
    }

    #[test]
    fn coplanarity_of_quadratic_optimum() {
        let mut c = quick(Objective::ChshQuadratic, 5, 13);
        c.planar = Some(false);
        let r = optimize_settings(&singlet(), &c).unwrap();
        assert!((r.value - 4.0).abs() < 1e-6);
        let report = coplanarity_check(&r.settings, &singlet()).unwrap();
        assert!(report.coplanar, "out of plane {}", report.max_out_of_plane);
    }
}
