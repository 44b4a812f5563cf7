//! Does sampling more memory bits help detect a fixed corruption fraction?
//!
//! For each corruption fraction eps, draws a fresh memory, flips each bit
//! independently with probability eps, samples b bits from both images at the
//! same pseudo-random addresses, and records the squared overlap of the two
//! amplitude-encoded samples. The expectation sits at (1 - eps)^2 whatever b
//! is, so the fitted slope over b must be statistically zero.
//!
//! Design note: the ratio normalization inside the overlap lifts the mean by
//! O(1/b). The default grid starts at b = 8192 with 600 trials per point,
//! which keeps that lift well under one standard error so the flatness
//! checks measure the claim, not the estimator.

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::experiments::{within, Curve, Report};
use crate::memory::{Checksum, ClassicalMemory};
use crate::rng::derive_seed;
use crate::soteria::{sample_memory_bits, sampled_overlap_sq};
use crate::stats::{mean, mean_std_err, wls_line};
use crate::trials::run_trials;

pub fn run(cfg: &ExperimentConfig, seed: u64, trials: Option<u64>) -> Result<Report> {
    let trials = cfg.trials_or(trials, 600);
    let mut report = Report::new("sample_length", seed);

    // The worked five- and six-entry samples; exact, so tolerance is zero.
    let w1 = sampled_overlap_sq(&[1, 0, 1, 1, 0], &[0, 0, 1, 1, 0])?.sqrt();
    let w2 = sampled_overlap_sq(&[1, 0, 1, 1, 0, 1], &[0, 0, 1, 1, 0, 1])?.sqrt();
    let t1 = 2.0 / 6.0f64.sqrt();
    let t2 = 3.0f64.sqrt() / 2.0;
    report.row("worked=five_entry".into(), w1, Some(t1), None, 1);
    report.row("worked=six_entry".into(), w2, Some(t2), None, 1);
    report.check(
        "worked_overlaps_exact",
        within(w1, t1, 0.0) && within(w2, t2, 0.0),
        format!("sampled overlaps {w1:.5} and {w2:.5}"),
    );

    let eps_grid: Vec<f64> = if cfg.epsilons.is_empty() {
        vec![cfg.epsilon]
    } else {
        cfg.epsilons.clone()
    };

    for (ei, &eps) in eps_grid.iter().enumerate() {
        let analytic = (1.0 - eps) * (1.0 - eps);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut ses = Vec::new();
        let mut curve = Vec::new();
        let mut level_ok = true;

        for (bi, &b) in cfg.sample_lengths.iter().enumerate() {
            let master = derive_seed(seed, (ei * cfg.sample_lengths.len() + bi) as u64);
            let samples: Vec<f64> = run_trials(trials, master, |_, rng| -> Result<f64> {
                let mem = ClassicalMemory::random(cfg.word_bits, cfg.words, rng)?;
                let mut bad = mem.clone();
                for bit in 0..mem.total_bits() {
                    if rng.chance(eps) {
                        bad.flip_bit(bit)?;
                    }
                }
                let nonce = Checksum::random(cfg.lambda_bits, rng)?;
                let a = sample_memory_bits(&mem, &nonce, b)?;
                let v = sample_memory_bits(&bad, &nonce, b)?;
                sampled_overlap_sq(&a, &v)
            })
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;

            let m = mean(&samples);
            let se = mean_std_err(&samples);
            report.row(
                format!("eps={eps};b={b}"),
                m,
                Some(analytic),
                Some(se),
                trials,
            );
            level_ok &= within(m, analytic, 3.0 * se);
            xs.push(b as f64);
            ys.push(m);
            ses.push(se);
            curve.push((b as f64, m));
        }

        let (slope, _, slope_se) = wls_line(&xs, &ys, &ses);
        report.row(
            format!("eps={eps};fit=slope_per_bit"),
            slope,
            Some(0.0),
            Some(slope_se),
            trials * xs.len() as u64,
        );
        report.check(
            &format!("slope_ci_contains_zero_eps_{eps}"),
            slope.abs() <= 1.96 * slope_se,
            format!("slope {slope:.3e} with standard error {slope_se:.3e}"),
        );
        report.check(
            &format!("level_matches_eps_{eps}"),
            level_ok,
            format!("every per-b mean within 3 sigma of {analytic:.4}"),
        );
        report.curves.push(Curve {
            name: format!("overlap_sq_eps_{eps}"),
            x_label: "sampled_bits".into(),
            y_label: "mean_overlap_sq".into(),
            points: curve,
        });
    }

    Ok(report)
}
