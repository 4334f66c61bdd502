use std::f64::consts::PI;

use magnon_core::model::Channel;
use magnon_core::{
    find_optimum, run_sweep, survival_temperature, Mode, Param, SqueezeDrive, SweepAxis, SweepOptions,
    SystemConfig,
};

fn opts() -> SweepOptions {
    SweepOptions::default()
}

#[test]
fn phase_plane_depends_only_on_phase_difference() {
    let cfg = SystemConfig::baseline_double();
    let n = 25;
    let axes = [
        SweepAxis::new(Param::SqueezePhase(Channel::First), 0.0, 2.0 * PI, n).unwrap(),
        SweepAxis::new(Param::SqueezePhase(Channel::Second), 0.0, 2.0 * PI, n).unwrap(),
    ];
    let res = run_sweep(&cfg, &axes, &opts()).unwrap();
    for i in 1..n {
        for j in 1..n {
            let here = res.at(&[i, j]);
            let diag = res.at(&[i - 1, j - 1]);
            assert!((here - diag).abs() < 1e-9, "({i}, {j}): {here} vs {diag}");
        }
    }
    // In phase beats out of phase.
    assert!(res.at(&[0, 0]) > 0.4);
    assert!(res.at(&[0, (n - 1) / 2]) < 1e-6);
}

#[test]
fn single_drive_phase_is_irrelevant() {
    let cfg = SystemConfig::baseline_single();
    let axis = SweepAxis::new(Param::SqueezePhase(Channel::First), 0.0, 2.0 * PI, 41).unwrap();
    let res = run_sweep(&cfg, &[axis], &opts()).unwrap();
    let first = res.values[0];
    assert!(first > 0.0);
    assert!(res.values.iter().all(|v| (v - first).abs() < 1e-9));
}

#[test]
fn squeezing_plane_has_interior_optimum() {
    let cfg = SystemConfig::baseline_double();
    let axes = [
        SweepAxis::new(Param::SqueezeStrength(Channel::First), 0.0, 2.0, 21).unwrap(),
        SweepAxis::new(Param::SqueezeStrength(Channel::Second), 0.0, 2.0, 21).unwrap(),
    ];
    let res = run_sweep(&cfg, &axes, &opts()).unwrap();
    let opt = find_optimum(&res).unwrap();
    assert!(opt.indices.iter().all(|&i| i > 0 && i < 20), "{opt:?}");

    let single = run_sweep(
        &SystemConfig::baseline_single(),
        &[SweepAxis::new(Param::SqueezeStrength(Channel::First), 0.0, 2.0, 41).unwrap()],
        &opts(),
    )
    .unwrap();
    let opt = find_optimum(&single).unwrap();
    assert!(opt.indices[0] > 0 && opt.indices[0] < 40, "{opt:?}");
}

#[test]
fn detuning_optimum_sits_near_the_supermode() {
    // With Δ_m1 = −Δ_m2 = J/2 the best cavity detunings lie in the negative
    // quadrant at |Δ_a| ≈ J; magnon dressing pulls the peak slightly beyond J.
    for cfg in [SystemConfig::baseline_double(), SystemConfig::baseline_single()] {
        let j = cfg.j;
        let axes = [
            SweepAxis::new(Param::Detuning(Mode::Cavity1), -2.0 * j, 2.0 * j, 51).unwrap(),
            SweepAxis::new(Param::Detuning(Mode::Cavity2), -2.0 * j, 2.0 * j, 51).unwrap(),
        ];
        let opt = find_optimum(&run_sweep(&cfg, &axes, &opts()).unwrap()).unwrap();
        for p in &opt.params {
            assert!(*p < 0.0 && (p.abs() / j - 1.0).abs() < 0.25, "{:?}", opt.params);
        }
    }
}

#[test]
fn single_squeezed_decay_cut_is_monotone() {
    let mut cfg = SystemConfig::baseline_single();
    let kappa = cfg.cavity1.decay;
    cfg.cavity1.decay = 2.5 * kappa;
    let axis = SweepAxis::new(Param::Decay(Mode::Cavity2), 0.05 * kappa, 5.0 * kappa, 60).unwrap();
    let res = run_sweep(&cfg, &[axis], &opts()).unwrap();
    assert!(res.values.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{:?}", res.values);

    // The double-squeezed cut is not monotone.
    let mut cfg = SystemConfig::baseline_double();
    cfg.cavity1.decay = 2.5 * kappa;
    let res = run_sweep(&cfg, &[axis], &opts()).unwrap();
    assert!(res.values.windows(2).any(|w| w[1] > w[0]));
}

#[test]
fn double_dominates_single_in_temperature() {
    let axis = SweepAxis::new(Param::Temperature, 0.0, 0.6, 31).unwrap();
    let double = run_sweep(&SystemConfig::baseline_double(), &[axis], &opts()).unwrap();
    let single = run_sweep(&SystemConfig::baseline_single(), &[axis], &opts()).unwrap();
    for (d, s) in double.values.iter().zip(&single.values) {
        assert!(d >= s, "{d} < {s}");
    }
    assert!(double.values[0] > single.values[0]);
}

#[test]
fn survival_temperatures() {
    let double = survival_temperature(&SystemConfig::baseline_double(), 0.6, 1e-4).unwrap();
    let single = survival_temperature(&SystemConfig::baseline_single(), 0.6, 1e-4).unwrap();
    assert!((0.40..0.50).contains(&double), "{double}");
    assert!((0.23..0.29).contains(&single), "{single}");
}

#[test]
fn label_swap_leaves_sweeps_unchanged() {
    let mut cfg = SystemConfig::baseline_double();
    cfg.drive2 = Some(SqueezeDrive { r: 0.6, theta: 0.4 });
    cfg.cavity2.decay *= 1.7;
    let swapped = cfg.swapped();
    let axis = SweepAxis::new(Param::Temperature, 0.0, 0.4, 9).unwrap();
    let a = run_sweep(&cfg, &[axis], &opts()).unwrap();
    let b = run_sweep(&swapped, &[axis], &opts()).unwrap();
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).abs() < 1e-10);
    }
}
