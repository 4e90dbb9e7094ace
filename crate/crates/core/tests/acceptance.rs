//! End-to-end acceptance gate. Each test covers one criterion, prints a
//! single PASS line with the measured numbers, and fails loudly otherwise.

use quadbell::hv::{
    brute_force_local_max, brute_force_ps_max, eval_hv, paper_example_model,
};
use quadbell::operators::{
    apply_to_pure, build_f, build_s, family_expectations, verify_identities,
};
use quadbell::optimizer::{
    coplanarity_check, optimize_over_biseparable, optimize_settings, planar_quadratic_value,
    Objective, OptimizationConfig, PlanarAngles,
};
use quadbell::random::{random_settings, random_state, rng_for, StateKind};
use quadbell::schmidt::schmidt_decompose;
use quadbell::settings::MeasurementSettings;
use quadbell::state::{all_up, ghz_state, singlet};
use quadbell::witness::{bounds, chsh_quadratic, linear_f_bounds, linear_s_bounds};
use rand::Rng;

const SWEEP: usize = 10_000;

fn config(objective: Objective, restarts: usize, seed: u64) -> OptimizationConfig {
    let mut c = OptimizationConfig::new(objective);
    c.restarts = restarts;
    c.seed = seed;
    c
}

#[test]
fn criterion_01_two_particle_quadratic_bound() {
    let mut max_q = f64::NEG_INFINITY;
    for stream in 0..SWEEP as u64 {
        let kind = if stream % 2 == 0 {
            StateKind::PureHaar
        } else {
            StateKind::MixedGinibre
        };
        let state = random_state(2, kind, 1, stream).unwrap();
        let mut rng = rng_for(2, stream);
        let settings = random_settings(2, &mut rng);
        let (_, _, q) = chsh_quadratic(&state, &settings).unwrap();
        max_q = max_q.max(q);
    }
    assert!(max_q <= 4.0 + 1e-9, "max q over sweep: {max_q}");

    let (_, _, q_up) = chsh_quadratic(&all_up(2), &MeasurementSettings::all_z(2)).unwrap();
    assert!((q_up - 4.0).abs() <= 1e-12, "all-up all-z q: {q_up}");
    println!("criterion 01 PASS: max q = {max_q:.9} <= 4, product-state q = {q_up}");
}

#[test]
fn criterion_02_cirelson_attainment() {
    let result = optimize_settings(&singlet(), &config(Objective::Chsh, 16, 3)).unwrap();
    let target = 2.0 * 2.0_f64.sqrt();
    assert!((result.value - target).abs() <= 1e-6, "chsh value {}", result.value);
    let (x, y, _) = chsh_quadratic(&singlet(), &result.settings).unwrap();
    let r2 = 2.0_f64.sqrt();
    assert!(
        (x.abs() - r2).abs() <= 1e-6 && (y.abs() - r2).abs() <= 1e-6,
        "optimum components x={x} y={y}"
    );
    println!(
        "criterion 02 PASS: chsh = {:.9} (2*sqrt2 = {target:.9}), |x| = {:.7}, |y| = {:.7}",
        result.value,
        x.abs(),
        y.abs()
    );
}

#[test]
fn criterion_03_ghz3_extremes() {
    let ghz = ghz_state(3, true).unwrap();
    let f = optimize_settings(&ghz, &config(Objective::AbsF, 16, 5)).unwrap();
    assert!((f.value - 4.0).abs() <= 1e-6, "|<F3>| {}", f.value);
    let sp = optimize_settings(&ghz, &config(Objective::AbsSPlus, 16, 5)).unwrap();
    let target_s = 4.0 * 2.0_f64.sqrt();
    assert!((sp.value - target_s).abs() <= 1e-6, "|<S+3>| {}", sp.value);
    let qf = optimize_settings(&ghz, &config(Objective::QF, 16, 5)).unwrap();
    assert!((qf.value - 16.0).abs() <= 1e-5, "q_f {}", qf.value);
    let qs = optimize_settings(&ghz, &config(Objective::QS, 16, 5)).unwrap();
    assert!((qs.value - 32.0).abs() <= 1e-4, "q_s {}", qs.value);
    println!(
        "criterion 03 PASS: |F| = {:.8}, |S+| = {:.8}, q_f = {:.7}, q_s = {:.6}",
        f.value, sp.value, qf.value, qs.value
    );
}

#[test]
fn criterion_04_biseparable_bound_and_tightness_n3() {
    let (bisep_s, _, bisep_f, _) = bounds(3);
    let fixed = [
        MeasurementSettings::mermin_xy(3),
        quadbell::optimizer::svetlichny_opt_settings(3),
    ];
    let (mut max_qf, mut max_qs) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for stream in 0..SWEEP as u64 {
        let state = random_state(3, StateKind::Biseparable, 7, stream).unwrap();
        let mut rng = rng_for(8, stream);
        let random = random_settings(3, &mut rng);
        for settings in fixed.iter().chain(std::iter::once(&random)) {
            let (f, fp, s_plus, s_minus) = family_expectations(3, settings, &state).unwrap();
            max_qf = max_qf.max(f * f + fp * fp);
            max_qs = max_qs.max(s_plus * s_plus + s_minus * s_minus);
        }
    }
    assert!(max_qf <= bisep_f + 1e-9, "biseparable q_f sweep max {max_qf}");
    assert!(max_qs <= bisep_s + 1e-9, "biseparable q_s sweep max {max_qs}");

    let mut c = config(Objective::QF, 10, 11);
    c.max_iterations = 800;
    let attained = optimize_over_biseparable(3, &c).unwrap();
    assert!(
        attained.value >= bisep_f - 1e-3,
        "biseparable q_f supremum estimate {}",
        attained.value
    );
    println!(
        "criterion 04 PASS: sweep max q_f = {max_qf:.7} <= {bisep_f}, q_s = {max_qs:.7} <= {bisep_s}, attained q_f = {:.7}",
        attained.value
    );
}

#[test]
fn criterion_05_general_n_bounds() {
    for n in [4usize, 5] {
        let (bisep_s, global_s, _, _) = bounds(n);
        let (mut max_arbitrary, mut max_bisep) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for stream in 0..SWEEP as u64 {
            let mut rng = rng_for(100 + n as u64, stream);
            let settings = random_settings(n, &mut rng);
            let arbitrary = random_state(n, StateKind::PureHaar, 13, stream).unwrap();
            let (_, _, sp, sm) = family_expectations(n, &settings, &arbitrary).unwrap();
            max_arbitrary = max_arbitrary.max(sp * sp + sm * sm);
            let bisep = random_state(n, StateKind::Biseparable, 17, stream).unwrap();
            let (_, _, sp, sm) = family_expectations(n, &settings, &bisep).unwrap();
            max_bisep = max_bisep.max(sp * sp + sm * sm);
        }
        assert!(max_arbitrary <= global_s + 1e-9, "n={n} arbitrary q_s {max_arbitrary}");
        assert!(max_bisep <= bisep_s + 1e-9, "n={n} biseparable q_s {max_bisep}");
        println!(
            "criterion 05 PASS (n={n}): arbitrary q_s max {max_arbitrary:.6} <= {global_s}, biseparable {max_bisep:.6} <= {bisep_s}"
        );
    }
}

#[test]
fn criterion_06_operator_identities() {
    let mut rng = rng_for(23, 0);
    for n in 3..=6 {
        let settings = random_settings(n, &mut rng);
        let report = verify_identities(n, &settings, 100, 29).unwrap();
        if n == 3 {
            let (cp, cm) = report.comp_residuals.unwrap();
            assert!(cp <= 1e-10 && cm <= 1e-10, "composition residuals {cp} {cm}");
        }
        assert!(
            report.parity_residuals.0 <= 1e-10 && report.parity_residuals.1 <= 1e-10,
            "n={n} parity residuals {:?} ({})",
            report.parity_residuals,
            report.sign_convention
        );
        assert!(
            report.quadratic_residual <= 1e-8 * report.quadratic_scale,
            "n={n} quadratic residual {}",
            report.quadratic_residual
        );
    }
    println!("criterion 06 PASS: composition, parity, and quadratic identities hold for n = 3..6");
}

#[test]
fn criterion_07_linear_bounds() {
    for n in 3..=5usize {
        let (f_bisep, f_global) = linear_f_bounds(n);
        let (s_bisep, s_global) = linear_s_bounds(n);
        let (mut mf_b, mut mf_g, mut ms_b, mut ms_g) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
        for stream in 0..SWEEP as u64 {
            let mut rng = rng_for(200 + n as u64, stream);
            let settings = random_settings(n, &mut rng);
            let bisep = random_state(n, StateKind::Biseparable, 31, stream).unwrap();
            let (f, fp, sp, sm) = family_expectations(n, &settings, &bisep).unwrap();
            mf_b = mf_b.max(f.abs().max(fp.abs()));
            ms_b = ms_b.max(sp.abs().max(sm.abs()));
            let arbitrary = random_state(n, StateKind::PureHaar, 37, stream).unwrap();
            let (f, fp, sp, sm) = family_expectations(n, &settings, &arbitrary).unwrap();
            mf_g = mf_g.max(f.abs().max(fp.abs()));
            ms_g = ms_g.max(sp.abs().max(sm.abs()));
        }
        assert!(mf_b <= f_bisep + 1e-9, "n={n} biseparable |F| {mf_b} vs {f_bisep}");
        assert!(mf_g <= f_global + 1e-9, "n={n} global |F| {mf_g} vs {f_global}");
        assert!(ms_b <= s_bisep + 1e-9, "n={n} biseparable |S| {ms_b} vs {s_bisep}");
        assert!(ms_g <= s_global + 1e-9, "n={n} global |S| {ms_g} vs {s_global}");
        println!(
            "criterion 07 PASS (n={n}): |F| {mf_b:.5}/{f_bisep:.5} {mf_g:.5}/{f_global:.5}, |S| {ms_b:.5}/{s_bisep:.5} {ms_g:.5}/{s_global:.5}"
        );
    }
}

#[test]
fn criterion_08_hidden_variable_counterexample() {
    let s = MeasurementSettings::mermin_xy(3);
    let f3 = build_f(3, &s, false).unwrap().expansion();
    let sp3 = build_s(3, &s, true).unwrap().expansion();
    let sm3 = build_s(3, &s, false).unwrap().expansion();

    let model = paper_example_model();
    let splus = eval_hv(&model, &sp3).unwrap();
    let sminus = eval_hv(&model, &sm3).unwrap();
    assert_eq!((splus, sminus), (4.0, 4.0));
    let q_s = splus * splus + sminus * sminus;
    let (bisep_s, _, _, _) = bounds(3);
    assert_eq!(q_s, 32.0);
    assert!(q_s > bisep_s);

    assert_eq!(brute_force_ps_max(&sp3).unwrap().max_value, 4.0);
    assert_eq!(brute_force_ps_max(&sm3).unwrap().max_value, 4.0);
    assert_eq!(brute_force_ps_max(&f3).unwrap().max_value, 4.0);
    assert_eq!(brute_force_local_max(&f3).unwrap(), 2.0);
    println!(
        "criterion 08 PASS: model gives <S+/-> = 4, q_s = 32 > {bisep_s}; vertex maxima S = 4, F = 4, local F = 2"
    );
}

#[test]
fn criterion_09_planar_angle_machinery() {
    // admissible tuples: four positive angles closing up to a full turn
    let mut rng = rng_for(41, 0);
    let mut max_value = f64::NEG_INFINITY;
    for _ in 0..SWEEP {
        let draws: Vec<f64> = (0..4).map(|_| -rng.gen::<f64>().ln()).collect();
        let total: f64 = draws.iter().sum();
        let scale = 2.0 * std::f64::consts::PI / total;
        let a = PlanarAngles::new(
            draws[0] * scale,
            draws[1] * scale,
            draws[2] * scale,
            2.0 * std::f64::consts::PI - (draws[0] + draws[1] + draws[2]) * scale,
        );
        let v = planar_quadratic_value(&a).unwrap();
        max_value = max_value.max(v);
    }
    assert!(max_value <= 4.0 + 1e-9, "planar quadratic max {max_value}");

    let mut worst_fidelity = 1.0_f64;
    for stream in 0..1000u64 {
        let state = random_state(2, StateKind::PureHaar, 43, stream).unwrap();
        let form = schmidt_decompose(&state).unwrap();
        let rebuilt = form.reconstruct();
        let overlap: f64 = rebuilt
            .iter()
            .zip(state.pure_amplitudes().unwrap().iter())
            .map(|(a, b)| a.conj() * b)
            .sum::<quadbell::linalg::C64>()
            .norm();
        worst_fidelity = worst_fidelity.min(overlap * overlap);
    }
    assert!(worst_fidelity >= 1.0 - 1e-10, "schmidt fidelity {worst_fidelity}");

    let mut c = config(Objective::ChshQuadratic, 8, 47);
    c.planar = Some(false);
    let result = optimize_settings(&singlet(), &c).unwrap();
    assert!((result.value - 4.0).abs() <= 1e-6);
    let report = coplanarity_check(&result.settings, &singlet()).unwrap();
    assert!(
        report.coplanar,
        "out-of-plane angle {} rad at the optimum",
        report.max_out_of_plane
    );
    println!(
        "criterion 09 PASS: planar max = {max_value:.9} <= 4, schmidt fidelity >= {worst_fidelity:.12}, out-of-plane = {:.2e} rad",
        report.max_out_of_plane
    );
}

#[test]
fn criterion_10_dense_vs_matrix_free() {
    let mut worst = 0.0_f64;
    for n in 2..=10usize {
        let mut rng = rng_for(300 + n as u64, 0);
        let settings = random_settings(n, &mut rng);
        let mut handles = vec![
            build_f(n, &settings, false).unwrap(),
            build_f(n, &settings, true).unwrap(),
        ];
        if n >= 3 {
            handles.push(build_s(n, &settings, true).unwrap());
            handles.push(build_s(n, &settings, false).unwrap());
        }
        let dense: Vec<_> = handles.iter().map(|h| h.dense().unwrap()).collect();
        for stream in 0..100u64 {
            let state = random_state(n, StateKind::PureHaar, 53, stream).unwrap();
            for (handle, op) in handles.iter().zip(&dense) {
                let direct = state.expectation(op).unwrap();
                let matrix_free = apply_to_pure(handle, &state).unwrap();
                worst = worst.max((direct - matrix_free).abs());
            }
        }
    }
    assert!(worst <= 1e-9, "dense vs matrix-free disagreement {worst}");
    println!("criterion 10 PASS: max dense vs matrix-free deviation = {worst:.3e} (n up to 10)");
}
