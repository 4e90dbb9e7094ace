//! The recursive Bell operator families F_n, F'_n (Mermin-Klyshko) and
//! S+/-_n (Svetlichny), their signed term expansions, dense Kronecker
//! assembly, a matrix-free pure-state evaluation path, and numerical
//! verification of the operator identities relating the two families.
//!
//! Recursion bases: F_2 = AB + AB' + A'B - A'B' (one recursion step then
//! reproduces the standard three-particle form exactly; unit-tested, not
//! assumed), and the explicit eight-term S+/-_3. Higher n by
//!   F_n  = 1/2 F_{n-1}(A_n + A'_n) + 1/2 F'_{n-1}(A_n - A'_n)
//!   S+/-_{n+1} = S+/-_n A_{n+1} -/+ S-/+_n A'_{n+1}
//! with the new particle appended at the least significant slot.

use crate::error::{QbError, Result};
use crate::linalg::{is_hermitian, kron, CMat, CVec, C64, TOL_CONSTRUCT};
use crate::pauli::pauli_observable;
use crate::settings::MeasurementSettings;
use crate::state::{QuantumState, MAX_DENSE_QUBITS, MAX_DENSE_QUBITS_EXTENDED};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellFamily {
    F,
    FPrime,
    SPlus,
    SMinus,
}

impl BellFamily {
    pub fn label(&self) -> &'static str {
        match self {
            BellFamily::F => "F",
            BellFamily::FPrime => "F'",
            BellFamily::SPlus => "S+",
            BellFamily::SMinus => "S-",
        }
    }
}

/// Exact dyadic rational num / 2^den_log2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Dyadic {
    pub num: i64,
    pub den_log2: u32,
}

impl Dyadic {
    pub fn new(num: i64, den_log2: u32) -> Self {
        Self { num, den_log2 }.normalized()
    }

    pub fn one() -> Self {
        Self { num: 1, den_log2: 0 }
    }

    fn normalized(mut self) -> Self {
        while self.den_log2 > 0 && self.num % 2 == 0 {
            self.num /= 2;
            self.den_log2 -= 1;
        }
        self
    }

    pub fn add(self, other: Self) -> Self {
        let d = self.den_log2.max(other.den_log2);
        Self {
            num: self.num * (1i64 << (d - self.den_log2))
                + other.num * (1i64 << (d - other.den_log2)),
            den_log2: d,
        }
        .normalized()
    }

    pub fn mul(self, other: Self) -> Self {
        Self {
            num: self.num * other.num,
            den_log2: self.den_log2 + other.den_log2,
        }
        .normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.den_log2) as f64
    }
}

/// One signed product term: a coefficient and a primed/unprimed choice per
/// particle (false = unprimed).
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Dyadic,
    pub choice: Vec<bool>,
}

impl Term {
    pub fn choice_string(&self) -> String {
        self.choice.iter().map(|&p| if p { 'p' } else { 'u' }).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermExpansion {
    pub n: usize,
    pub terms: Vec<Term>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: f64,
    pub choice: String,
}

impl TermExpansion {
    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|t| TermJson {
                coeff: t.coeff.to_f64(),
                choice: t.choice_string(),
            })
            .collect()
    }

    /// Weighted Kronecker reconstruction of the dense operator.
    pub fn to_dense(&self, settings: &MeasurementSettings) -> Result<CMat> {
        settings.require_n(self.n)?;
        let dim = 1usize << self.n;
        let mut out = CMat::zeros((dim, dim));
        for term in &self.terms {
            let mut m = CMat::from_elem((1, 1), C64::new(1.0, 0.0));
            for (j, &primed) in term.choice.iter().enumerate() {
                let (a, ap) = settings.pair(j);
                let dir = if primed { ap } else { a };
                m = kron(&m, &pauli_observable(&dir));
            }
            out = out + m.mapv(|z| z * term.coeff.to_f64());
        }
        Ok(out)
    }
}

type TermMap = BTreeMap<Vec<bool>, Dyadic>;

fn map_to_expansion(n: usize, map: TermMap) -> TermExpansion {
    let terms = map
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(choice, coeff)| Term { coeff, choice })
        .collect();
    TermExpansion { n, terms }
}

/// Appends one particle to every term, distributing over the two choices
/// with the given weights.
fn append_particle(map: &TermMap, weight_u: Dyadic, weight_p: Dyadic) -> TermMap {
    let mut out = TermMap::new();
    for (choice, &coeff) in map {
        for (primed, w) in [(false, weight_u), (true, weight_p)] {
            if w.is_zero() {
                continue;
            }
            let mut c = choice.clone();
            c.push(primed);
            let entry = out.entry(c).or_insert(Dyadic::new(0, 0));
            *entry = entry.add(coeff.mul(w));
        }
    }
    out
}

fn merge(a: TermMap, b: TermMap) -> TermMap {
    let mut out = a;
    for (choice, coeff) in b {
        let entry = out.entry(choice).or_insert(Dyadic::new(0, 0));
        *entry = entry.add(coeff);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn f2_base() -> (TermMap, TermMap) {
    let mut f = TermMap::new();
    f.insert(vec![false, false], Dyadic::one());
    f.insert(vec![false, true], Dyadic::one());
    f.insert(vec![true, false], Dyadic::one());
    f.insert(vec![true, true], Dyadic::new(-1, 0));
    let fp = prime_swap_map(&f);
    (f, fp)
}

fn prime_swap_map(map: &TermMap) -> TermMap {
    map.iter()
        .map(|(choice, &coeff)| (choice.iter().map(|&p| !p).collect(), coeff))
        .collect()
}

/// Term maps for (F_n, F'_n).
fn f_term_maps(n: usize) -> (TermMap, TermMap) {
    assert!(n >= 2);
    let (mut f, mut fp) = f2_base();
    let half = Dyadic::new(1, 1);
    let neg_half = Dyadic::new(-1, 1);
    for _ in 3..=n {
        let next_f = merge(
            append_particle(&f, half, half),
            append_particle(&fp, half, neg_half),
        );
        let next_fp = prime_swap_map(&next_f);
        f = next_f;
        fp = next_fp;
    }
    (f, fp)
}

fn s3_base() -> (TermMap, TermMap) {
    // S-_3 = ABC + ABC' + AB'C + A'BC - AB'C' - A'BC' - A'B'C - A'B'C'
    // S+_3 = ABC - ABC' - AB'C - A'BC - AB'C' - A'BC' - A'B'C + A'B'C'
    let one = Dyadic::one();
    let neg = Dyadic::new(-1, 0);
    let mut s_minus = TermMap::new();
    let mut s_plus = TermMap::new();
    for bits in 0..8u8 {
        let choice = vec![bits & 4 != 0, bits & 2 != 0, bits & 1 != 0];
        let primes = choice.iter().filter(|&&p| p).count();
        // sign by primed count: S-: (+,+,-,-), S+: (+,-,-,+)
        s_minus.insert(choice.clone(), if primes <= 1 { one } else { neg });
        s_plus.insert(choice, if primes == 0 || primes == 3 { one } else { neg });
    }
    (s_plus, s_minus)
}

/// Term maps for (S+_n, S-_n).
fn s_term_maps(n: usize) -> (TermMap, TermMap) {
    assert!(n >= 3);
    let (mut sp, mut sm) = s3_base();
    let one = Dyadic::one();
    let neg = Dyadic::new(-1, 0);
    let zero = Dyadic::new(0, 0);
    for _ in 4..=n {
        // S+_{k+1} = S+_k A - S-_k A',  S-_{k+1} = S-_k A + S+_k A'
        let next_sp = merge(
            append_particle(&sp, one, zero),
            append_particle(&sm, zero, neg),
        );
        let next_sm = merge(
            append_particle(&sm, one, zero),
            append_particle(&sp, zero, one),
        );
        sp = next_sp;
        sm = next_sm;
    }
    (sp, sm)
}

fn family_term_map(family: BellFamily, n: usize) -> TermMap {
    match family {
        BellFamily::F => f_term_maps(n).0,
        BellFamily::FPrime => f_term_maps(n).1,
        BellFamily::SPlus => s_term_maps(n).0,
        BellFamily::SMinus => s_term_maps(n).1,
    }
}

/// An immutable handle on one member of a Bell operator family at fixed
/// settings. The dense matrix is materialized only within the dense cap.
#[derive(Debug, Clone)]
pub struct BellOperatorHandle {
    pub family: BellFamily,
    pub n: usize,
    pub settings: MeasurementSettings,
    pub dense: Option<CMat>,
}

impl BellOperatorHandle {
    fn build(family: BellFamily, n: usize, settings: MeasurementSettings) -> Result<Self> {
        settings.require_n(n)?;
        let dense = if n <= MAX_DENSE_QUBITS {
            let m = dense_operator(family, n, &settings);
            debug_assert!(is_hermitian(&m, TOL_CONSTRUCT));
            Some(m)
        } else {
            None
        };
        Ok(Self { family, n, settings, dense })
    }

    /// Dense 2^n x 2^n matrix; fails above the explicit opt-in cap.
    pub fn dense(&self) -> Result<CMat> {
        if let Some(m) = &self.dense {
            return Ok(m.clone());
        }
        if self.n > MAX_DENSE_QUBITS_EXTENDED {
            return Err(QbError::ParticleCount {
                n: self.n,
                detail: format!("dense construction capped at {MAX_DENSE_QUBITS_EXTENDED} qubits"),
            });
        }
        Ok(dense_operator(self.family, self.n, &self.settings))
    }

    pub fn expansion(&self) -> TermExpansion {
        expand_terms(self)
    }

    /// Expectation on any state: matrix-free for pure states, dense trace
    /// for density matrices.
    pub fn expectation(&self, state: &QuantumState) -> Result<f64> {
        if state.num_particles() != self.n {
            return Err(QbError::DimensionMismatch {
                expected: 1 << self.n,
                got: state.dim(),
            });
        }
        if state.is_pure() {
            apply_to_pure(self, state)
        } else {
            state.expectation(&self.dense()?)
        }
    }
}

pub fn build_f(n: usize, settings: &MeasurementSettings, primed: bool) -> Result<BellOperatorHandle> {
    if n < 2 {
        return Err(QbError::ParticleCount {
            n,
            detail: "F_n requires n >= 2".into(),
        });
    }
    let family = if primed { BellFamily::FPrime } else { BellFamily::F };
    BellOperatorHandle::build(family, n, settings.clone())
}

pub fn build_s(n: usize, settings: &MeasurementSettings, plus: bool) -> Result<BellOperatorHandle> {
    if n < 3 {
        return Err(QbError::ParticleCount {
            n,
            detail: "S+/-_n requires n >= 3".into(),
        });
    }
    let family = if plus { BellFamily::SPlus } else { BellFamily::SMinus };
    BellOperatorHandle::build(family, n, settings.clone())
}

/// Signed term expansion whose weighted Kronecker sum reproduces the dense
/// operator. Needed by the hidden-variable module, which evaluates signed
/// correlator sums without matrices.
pub fn expand_terms(handle: &BellOperatorHandle) -> TermExpansion {
    map_to_expansion(handle.n, family_term_map(handle.family, handle.n))
}

fn observable_pair(settings: &MeasurementSettings, j: usize) -> (CMat, CMat) {
    let (a, ap) = settings.pair(j);
    (pauli_observable(&a), pauli_observable(&ap))
}

/// Dense (F_n, F'_n) by recursive Kronecker assembly.
fn f_pair_dense(n: usize, settings: &MeasurementSettings) -> (CMat, CMat) {
    let (a0, a0p) = observable_pair(settings, 0);
    let (a1, a1p) = observable_pair(settings, 1);
    let mut f = kron(&a0, &(&a1 + &a1p)) + kron(&a0p, &(&a1 - &a1p));
    let mut fp = kron(&a0p, &(&a1p + &a1)) + kron(&a0, &(&a1p - &a1));
    for k in 2..n {
        let (ak, akp) = observable_pair(settings, k);
        let plus = &ak + &akp;
        let minus = &ak - &akp;
        let next_f = (kron(&f, &plus) + kron(&fp, &minus)).mapv(|z| z * 0.5);
        let next_fp = (kron(&fp, &plus) - kron(&f, &minus)).mapv(|z| z * 0.5);
        f = next_f;
        fp = next_fp;
    }
    (f, fp)
}

/// Dense (S+_n, S-_n): the eight-term base, then the recursion.
fn s_pair_dense(n: usize, settings: &MeasurementSettings) -> (CMat, CMat) {
    let (sp3_map, sm3_map) = s3_base();
    let base = |map: &TermMap| -> CMat {
        let mut out = CMat::zeros((8, 8));
        for (choice, coeff) in map {
            let mut m = CMat::from_elem((1, 1), C64::new(1.0, 0.0));
            for (j, &primed) in choice.iter().enumerate() {
                let (a, ap) = observable_pair(settings, j);
                m = kron(&m, if primed { &ap } else { &a });
            }
            out = out + m.mapv(|z| z * coeff.to_f64());
        }
        out
    };
    let mut sp = base(&sp3_map);
    let mut sm = base(&sm3_map);
    for k in 3..n {
        let (ak, akp) = observable_pair(settings, k);
        let next_sp = kron(&sp, &ak) - kron(&sm, &akp);
        let next_sm = kron(&sm, &ak) + kron(&sp, &akp);
        sp = next_sp;
        sm = next_sm;
    }
    (sp, sm)
}

fn dense_operator(family: BellFamily, n: usize, settings: &MeasurementSettings) -> CMat {
    match family {
        BellFamily::F => f_pair_dense(n, settings).0,
        BellFamily::FPrime => f_pair_dense(n, settings).1,
        BellFamily::SPlus => s_pair_dense(n, settings).0,
        BellFamily::SMinus => s_pair_dense(n, settings).1,
    }
}

/// The CHSH split X = AB' + A'B, Y = AB - A'B' as dense 4x4 operators.
pub fn chsh_xy(settings: &MeasurementSettings) -> Result<(CMat, CMat)> {
    settings.require_n(2)?;
    let (a, ap) = observable_pair(settings, 0);
    let (b, bp) = observable_pair(settings, 1);
    let x = kron(&a, &bp) + kron(&ap, &b);
    let y = kron(&a, &b) - kron(&ap, &bp);
    Ok((x, y))
}

/// The CHSH combination AB + AB' + A'B - A'B'.
pub fn chsh_operator(settings: &MeasurementSettings) -> Result<CMat> {
    settings.require_n(2)?;
    let (a, ap) = observable_pair(settings, 0);
    let (b, bp) = observable_pair(settings, 1);
    Ok(kron(&a, &(&b + &bp)) + kron(&ap, &(&b - &bp)))
}

// --- matrix-free pure-state path ---

/// Applies a 2x2 matrix to the least significant qubit of a vector.
fn apply_lsb(m: &CMat, v: &CVec) -> CVec {
    let len = v.len();
    let mut out = CVec::zeros(len);
    for i in (0..len).step_by(2) {
        let v0 = v[i];
        let v1 = v[i + 1];
        out[i] = m[(0, 0)] * v0 + m[(0, 1)] * v1;
        out[i + 1] = m[(1, 0)] * v0 + m[(1, 1)] * v1;
    }
    out
}

fn split_lsb(v: &CVec) -> (CVec, CVec) {
    let half = v.len() / 2;
    let mut even = CVec::zeros(half);
    let mut odd = CVec::zeros(half);
    for i in 0..half {
        even[i] = v[2 * i];
        odd[i] = v[2 * i + 1];
    }
    (even, odd)
}

fn interleave_lsb(even: &CVec, odd: &CVec) -> CVec {
    let mut out = CVec::zeros(even.len() * 2);
    for i in 0..even.len() {
        out[2 * i] = even[i];
        out[2 * i + 1] = odd[i];
    }
    out
}

/// (F_k psi, F'_k psi) without materializing dense matrices; psi lives on
/// particles 0..k.
fn apply_f_pair(k: usize, settings: &MeasurementSettings, psi: &CVec) -> (CVec, CVec) {
    if k == 2 {
        let (f, fp) = f_pair_dense(2, settings);
        return (f.dot(psi), fp.dot(psi));
    }
    let (ak, akp) = observable_pair(settings, k - 1);
    let plus = &ak + &akp;
    let minus = &ak - &akp;
    let u = apply_lsb(&plus, psi);
    let v = apply_lsb(&minus, psi);
    let apply_sub = |w: &CVec| -> (CVec, CVec) {
        let (w0, w1) = split_lsb(w);
        let (f0, fp0) = apply_f_pair(k - 1, settings, &w0);
        let (f1, fp1) = apply_f_pair(k - 1, settings, &w1);
        (interleave_lsb(&f0, &f1), interleave_lsb(&fp0, &fp1))
    };
    let (fu, fpu) = apply_sub(&u);
    let (fv, fpv) = apply_sub(&v);
    let f = (&fu + &fpv).mapv(|z| z * 0.5);
    let fp = (&fpu - &fv).mapv(|z| z * 0.5);
    (f, fp)
}

/// (S+_k psi, S-_k psi) matrix-free.
fn apply_s_pair(k: usize, settings: &MeasurementSettings, psi: &CVec) -> (CVec, CVec) {
    if k == 3 {
        let (sp, sm) = s_pair_dense(3, settings);
        return (sp.dot(psi), sm.dot(psi));
    }
    let (ak, akp) = observable_pair(settings, k - 1);
    let a = apply_lsb(&ak, psi);
    let b = apply_lsb(&akp, psi);
    let apply_sub = |w: &CVec| -> (CVec, CVec) {
        let (w0, w1) = split_lsb(w);
        let (sp0, sm0) = apply_s_pair(k - 1, settings, &w0);
        let (sp1, sm1) = apply_s_pair(k - 1, settings, &w1);
        (interleave_lsb(&sp0, &sp1), interleave_lsb(&sm0, &sm1))
    };
    let (spa, sma) = apply_sub(&a);
    let (spb, smb) = apply_sub(&b);
    (&spa - &smb, &sma + &spb)
}

/// <psi|Op|psi> computed by recursive application, never building the dense
/// 2^n x 2^n matrix. Agrees with the dense path within 1e-9.
pub fn apply_to_pure(handle: &BellOperatorHandle, state: &QuantumState) -> Result<f64> {
    let psi = state.pure_amplitudes().ok_or_else(|| QbError::InvalidState {
        detail: "matrix-free path requires a pure state".into(),
    })?;
    if psi.len() != 1 << handle.n {
        return Err(QbError::DimensionMismatch {
            expected: 1 << handle.n,
            got: psi.len(),
        });
    }
    let op_psi = match handle.family {
        BellFamily::F => apply_f_pair(handle.n, &handle.settings, psi).0,
        BellFamily::FPrime => apply_f_pair(handle.n, &handle.settings, psi).1,
        BellFamily::SPlus => apply_s_pair(handle.n, &handle.settings, psi).0,
        BellFamily::SMinus => apply_s_pair(handle.n, &handle.settings, psi).1,
    };
    let value = crate::linalg::inner(psi, &op_psi);
    if value.im.abs() > 1e-9 * (1.0 + value.norm()) {
        return Err(QbError::Inconsistency(format!(
            "matrix-free expectation has imaginary residue {}",
            value.im
        )));
    }
    Ok(value.re)
}

/// All four family expectations (f, f', s+, s-) on one state.
pub fn family_expectations(
    n: usize,
    settings: &MeasurementSettings,
    state: &QuantumState,
) -> Result<(f64, f64, f64, f64)> {
    let f = build_f(n, settings, false)?.expectation(state)?;
    let fp = build_f(n, settings, true)?.expectation(state)?;
    let sp = build_s(n, settings, true)?.expectation(state)?;
    let sm = build_s(n, settings, false)?.expectation(state)?;
    Ok((f, fp, sp, sm))
}

/// Residuals of the operator identities tying the S and F families
/// together, plus the convention-independent quadratic identity evaluated
/// on a batch of random states.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub n: usize,
    /// ||S+_3 + F_3 + F'_3||_max and ||S-_3 - F_3 + F'_3||_max.
    pub comp_residuals: Option<(f64, f64)>,
    /// Max-entry residuals of the parity relations at this n, as printed.
    pub parity_residuals: (f64, f64),
    /// Which sign/label mapping matched; "as-printed" when the displayed
    /// convention holds directly.
    pub sign_convention: String,
    /// Max over the state batch of |q_s - 2^{n-2} q_f|.
    pub quadratic_residual: f64,
    pub quadratic_scale: f64,
}

pub fn verify_identities(
    n: usize,
    settings: &MeasurementSettings,
    num_states: usize,
    seed: u64,
) -> Result<IdentityReport> {
    if n < 3 {
        return Err(QbError::ParticleCount {
            n,
            detail: "identities require n >= 3".into(),
        });
    }
    settings.require_n(n)?;

    // Eq-level comparison at n=3 on the first three particles' settings.
    let comp_residuals = {
        let s3 = MeasurementSettings::new(settings.pairs()[..3].to_vec())?;
        let (f3, fp3) = f_pair_dense(3, &s3);
        let (sp3, sm3) = s_pair_dense(3, &s3);
        let r_plus = crate::linalg::max_abs(&(&sp3 + &f3 + &fp3));
        let r_minus = crate::linalg::max_abs(&(&(&sm3 - &f3) + &fp3));
        Some((r_plus, r_minus))
    };

    let (f, fp) = f_pair_dense(n, settings);
    let (sp, sm) = s_pair_dense(n, settings);

    // Parity relations as printed: for n = 2k+1,
    //   S+/- = 2^(k-1) ( (-1)^(k(k+/-1)/2) F -/+ (-1)^(k(k-/+1)/2) F' );
    // for n = 2k, S+/- = 2^(k-1) (-1)^(k(k+/-1)/2) times one of {F, F'},
    // the pairing alternating with the parity of k.
    let (rhs_plus, rhs_minus) = parity_rhs(n, &f, &fp);
    let residual_printed = (
        crate::linalg::max_abs_diff(&sp, &rhs_plus),
        crate::linalg::max_abs_diff(&sm, &rhs_minus),
    );
    let scale = crate::linalg::max_abs(&sp).max(1.0);
    let (parity_residuals, sign_convention) = if residual_printed.0 <= 1e-10 * scale
        && residual_printed.1 <= 1e-10 * scale
    {
        (residual_printed, "as-printed".to_string())
    } else {
        // document the observed mapping rather than silently altering
        // operators: search over global signs and an F <-> F' relabeling
        let mut best = (residual_printed, "as-printed (mismatch)".to_string());
        for (label, swap) in [("F,F'", false), ("F'<->F", true)] {
            for s_p in [1.0, -1.0] {
                for s_m in [1.0, -1.0] {
                    let (bp, bm) = if swap {
                        parity_rhs(n, &fp, &f)
                    } else {
                        parity_rhs(n, &f, &fp)
                    };
                    let r = (
                        crate::linalg::max_abs_diff(&sp, &bp.mapv(|z| z * s_p)),
                        crate::linalg::max_abs_diff(&sm, &bm.mapv(|z| z * s_m)),
                    );
                    if r.0.max(r.1) < best.0 .0.max(best.0 .1) {
                        best = (r, format!("{label}, signs ({s_p:+}, {s_m:+})"));
                    }
                }
            }
        }
        best
    };

    // Quadratic identity on a batch of random states; this check is the
    // convention-independent anchor.
    let mut quadratic_residual = 0.0_f64;
    for stream in 0..num_states as u64 {
        let state = crate::random::random_state(
            n,
            crate::random::StateKind::PureHaar,
            seed,
            stream,
        )?;
        let fv = state.expectation(&f)?;
        let fpv = state.expectation(&fp)?;
        let spv = state.expectation(&sp)?;
        let smv = state.expectation(&sm)?;
        let lhs = spv * spv + smv * smv;
        let rhs = 2.0_f64.powi(n as i32 - 2) * (fv * fv + fpv * fpv);
        quadratic_residual = quadratic_residual.max((lhs - rhs).abs());
    }
    let quadratic_scale = 4.0_f64.powi(n as i32);

    Ok(IdentityReport {
        n,
        comp_residuals,
        parity_residuals,
        sign_convention,
        quadratic_residual,
        quadratic_scale,
    })
}

fn parity_rhs(n: usize, f: &CMat, fp: &CMat) -> (CMat, CMat) {
    if n % 2 == 1 {
        let k = (n - 1) / 2;
        let scale = 2.0_f64.powi(k as i32 - 1);
        let sign = |e: usize| if e % 2 == 0 { 1.0 } else { -1.0 };
        let sgn_up = sign(k * (k + 1) / 2);
        let sgn_dn = sign(k * (k - 1) / 2);
        let rhs_plus = (f.mapv(|z| z * sgn_up) - fp.mapv(|z| z * sgn_dn)).mapv(|z| z * scale);
        let rhs_minus = (f.mapv(|z| z * sgn_dn) + fp.mapv(|z| z * sgn_up)).mapv(|z| z * scale);
        (rhs_plus, rhs_minus)
    } else {
        // For even n the pairing alternates with k: S+/- is proportional to
        // (F, F') when k is even and to (F', F) when k is odd, with the same
        // sign factors either way. Follows from iterating the recursion:
        // k=2 -> (-2F, -2F'), k=3 -> (4F', -4F), k=4 -> (8F, 8F').
        let k = n / 2;
        let scale = 2.0_f64.powi(k as i32 - 1);
        let sign = |e: usize| if e % 2 == 0 { 1.0 } else { -1.0 };
        let sgn_up = sign(k * (k + 1) / 2);
        let sgn_dn = sign(k * (k - 1) / 2);
        let (first, second) = if k % 2 == 0 { (f, fp) } else { (fp, f) };
        (
            first.mapv(|z| z * scale * sgn_up),
            second.mapv(|z| z * scale * sgn_dn),
        )
    }
}
