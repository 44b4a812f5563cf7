//! Detector comparison: inverse-rotation check versus one swap test.
//!
//! Sweeps the squared overlap q between the honest and presented states and
//! Monte Carlos both detectors. The rotation check flags a mismatch with
//! probability 1 - q; a single swap test only reaches 1/2 - q/2, so the
//! rotation curve dominates everywhere below q = 1.

use crate::attest::single_exchange;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::experiments::{within, Curve, Report};
use crate::qsim::{swap_test, StateVector};
use crate::rng::derive_seed;
use crate::stats::freq_std_err;
use crate::trials::run_trials;

pub fn run(cfg: &ExperimentConfig, seed: u64, trials: Option<u64>) -> Result<Report> {
    let trials = cfg.trials_or(trials, 30_000);
    let steps = cfg.overlap_steps;
    let mut report = Report::new("swap_rotation", seed);
    let mut rotation_curve = Vec::with_capacity(steps);
    let mut swap_curve = Vec::with_capacity(steps);
    let mut all_matched = true;
    let mut dominates = true;

    for i in 0..steps {
        let q = i as f64 / (steps - 1) as f64;
        // Angle gap with acceptance probability exactly q.
        let gap = 2.0 * q.sqrt().acos();
        let reference = StateVector::from_amplitudes(vec![1.0.into(), 0.0.into()])?;
        let presented =
            StateVector::from_amplitudes(vec![q.sqrt().into(), (1.0 - q).sqrt().into()])?;

        let rot_hits: u64 = run_trials(trials, derive_seed(seed, 2 * i as u64), |_, rng| {
            single_exchange(gap, 0.0, rng).map(|bit| u64::from(bit == 0))
        })
        .into_iter()
        .sum::<Result<u64>>()?;
        let swap_hits: u64 = run_trials(trials, derive_seed(seed, 2 * i as u64 + 1), |_, rng| {
            swap_test(reference.clone(), presented.clone(), rng).map(|bit| u64::from(bit == 1))
        })
        .into_iter()
        .sum::<Result<u64>>()?;

        let rot = rot_hits as f64 / trials as f64;
        let swap = swap_hits as f64 / trials as f64;
        let rot_true = 1.0 - q;
        let swap_true = 0.5 - q / 2.0;
        let rot_se = freq_std_err(rot_true, trials);
        let swap_se = freq_std_err(swap_true, trials);

        report.row(
            format!("method=rotation;q={q}"),
            rot,
            Some(rot_true),
            Some(rot_se),
            trials,
        );
        report.row(
            format!("method=swap;q={q}"),
            swap,
            Some(swap_true),
            Some(swap_se),
            trials,
        );
        rotation_curve.push((q, rot));
        swap_curve.push((q, swap));

        all_matched &= within(rot, rot_true, 3.0 * rot_se) && within(swap, swap_true, 3.0 * swap_se);
        if q < 1.0 {
            dominates &= rot > swap;
        }
    }

    report.curves.push(Curve {
        name: "rotation".into(),
        x_label: "overlap_sq".into(),
        y_label: "detection".into(),
        points: rotation_curve,
    });
    report.curves.push(Curve {
        name: "swap".into(),
        x_label: "overlap_sq".into(),
        y_label: "detection".into(),
        points: swap_curve,
    });

    report.check(
        "detection_matches_analytic_3sigma",
        all_matched,
        format!("both detectors within 3 sigma across {steps} overlap points"),
    );
    report.check(
        "rotation_dominates_below_one",
        dominates,
        "rotation detection strictly above swap detection for every q < 1".into(),
    );
    Ok(report)
}
