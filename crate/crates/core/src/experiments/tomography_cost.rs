//! How many challenge copies does a faithful classical decode need?
//!
//! The decoder rounds N * amplitude-estimate per component, N = sqrt(weight),
//! so the copy budget for a fixed per-component success rate must grow as
//! N^2. The sweep measures the minimum copies reaching the agreement target
//! for each response weight and fits the log-log slope, which lands at 2.

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::experiments::{within, Curve, Report};
use crate::qsim::{amplitude_encode, StateVector};
use crate::rng::{derive_seed, SimRng};
use crate::soteria::{decode_response_bits, single_copy_agreement};
use crate::stats::{freq_std_err, ols_slope};
use crate::trials::run_trials;

/// Fraction of components decoded correctly over `probes` independent
/// decodes from `copies` copies. A decode that rounds any component outside
/// {0, 1} still scores its per-component matches.
fn agreement(
    state: &StateVector,
    weight: usize,
    copies: usize,
    probes: u64,
    master: u64,
) -> Result<f64> {
    let norm = (weight as f64).sqrt();
    let per_trial: Vec<Result<f64>> = run_trials(probes, master, |_, rng| {
        let batch: Vec<StateVector> = vec![state.clone(); copies];
        let rounded = match decode_response_bits(&batch, norm, rng) {
            Ok(bits) => bits.iter().map(|&b| i64::from(b)).collect(),
            Err(Error::DecodeFailure(rounded)) => rounded,
            Err(e) => return Err(e),
        };
        let hits = rounded.iter().take(weight).filter(|&&r| r == 1).count();
        Ok(hits as f64 / weight as f64)
    });
    let mut sum = 0.0;
    for t in &per_trial {
        match t {
            Ok(v) => sum += v,
            Err(e) => return Err(Error::InvalidArgument(format!("probe failed: {e}"))),
        }
    }
    Ok(sum / probes as f64)
}

/// Smallest copy count whose agreement reaches `target`: doubling bracket,
/// then binary search. Monte Carlo wiggle at the boundary is part of the
/// measurement.
fn min_copies(
    state: &StateVector,
    weight: usize,
    target: f64,
    probes: u64,
    master: u64,
) -> Result<(usize, f64)> {
    let eval = |c: usize| agreement(state, weight, c, probes, derive_seed(master, c as u64));
    let mut hi = 1usize;
    while eval(hi)? < target {
        hi *= 2;
        if hi > (1 << 16) {
            return Err(Error::InvalidArgument(format!(
                "no copy count under {hi} reaches agreement {target}"
            )));
        }
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if eval(mid)? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, eval(hi)?))
}

pub fn run(cfg: &ExperimentConfig, seed: u64, trials: Option<u64>) -> Result<Report> {
    let probes = cfg.trials_or(trials, cfg.probe_trials);
    let mut report = Report::new("tomography_cost", seed);
    let mut log_n = Vec::new();
    let mut log_c = Vec::new();
    let mut curve = Vec::new();
    let mut fourth_moment_ok = true;

    for (wi, &w) in cfg.response_weights.iter().enumerate() {
        let state = amplitude_encode(&vec![1.0; w])?;
        let n = (w as f64).sqrt();
        let master = derive_seed(seed, wi as u64);

        let (copies, reached) = min_copies(&state, w, cfg.agreement_target, probes, master)?;
        report.row(format!("weight={w};stat=min_copies"), copies as f64, None, None, probes);
        report.row(
            format!("weight={w};stat=agreement_at_min"),
            reached,
            None,
            Some(freq_std_err(reached, probes * w as u64)),
            probes,
        );

        // One copy, both parties measure once: agreement is the fourth
        // moment, 1/weight for a flat response.
        let mut rng = SimRng::from_seed(derive_seed(master, u64::MAX));
        let (single, analytic) = single_copy_agreement(&state, 10_000, &mut rng);
        let se = freq_std_err(analytic, 10_000);
        report.row(
            format!("weight={w};stat=single_copy_agreement"),
            single,
            Some(analytic),
            Some(se),
            10_000,
        );
        fourth_moment_ok &= within(single, analytic, 3.0 * se);

        log_n.push(n.ln());
        log_c.push((copies as f64).ln());
        curve.push((n, copies as f64));
    }

    // A basis-state response needs exactly one copy.
    let basis = amplitude_encode(&[0.0, 0.0, 1.0, 0.0])?;
    let mut rng = SimRng::from_seed(derive_seed(seed, u64::MAX - 1));
    let decoded = decode_response_bits(std::slice::from_ref(&basis), 1.0, &mut rng)?;
    let basis_exact = decoded == vec![0, 0, 1, 0];
    let (basis_single, basis_analytic) = single_copy_agreement(&basis, 4_000, &mut rng);
    report.row(
        "weight=1;stat=one_copy_decode_exact".into(),
        f64::from(u8::from(basis_exact)),
        Some(1.0),
        None,
        1,
    );
    report.row(
        "weight=1;stat=single_copy_agreement".into(),
        basis_single,
        Some(basis_analytic),
        None,
        4_000,
    );

    let slope = ols_slope(&log_n, &log_c);
    report.row(
        "fit=loglog_slope".into(),
        slope,
        Some(2.0),
        None,
        probes * cfg.response_weights.len() as u64,
    );
    report.curves.push(Curve {
        name: "min_copies".into(),
        x_label: "normalization_n".into(),
        y_label: "min_copies".into(),
        points: curve,
    });

    report.check(
        "quadratic_copy_scaling",
        within(slope, 2.0, 0.3),
        format!("log-log slope {slope:.3}"),
    );
    report.check(
        "single_copy_agreement_is_fourth_moment",
        fourth_moment_ok,
        "one-copy agreement within 3 sigma of the fourth moment at every weight".into(),
    );
    report.check(
        "basis_state_decodes_from_one_copy",
        basis_exact && basis_single == 1.0,
        format!("decode exact: {basis_exact}, agreement {basis_single}"),
    );
    Ok(report)
}
