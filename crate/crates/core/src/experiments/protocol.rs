//! Full-protocol scenario sweeps: honest, corrupted memory, relayed prover,
//! and a round-trip threshold boundary walk.
//!
//! Honest runs must accept every time. Corruption is per-word bit flips at
//! the configured rate; detection compounds over rounds but a diverged
//! checksum still passes a single angle check with probability
//! 1/2 + 2/pi^2, so the reject rate has a ceiling below 1 for finite rounds.
//! The relay scenario reroutes round traffic through a colluder; the extra
//! flight time trips the very first timed round. The boundary walk nudges
//! the compute allowance by single float steps around the measured
//! round-trip time and demands the verdict flip exactly where the
//! comparison does.

use crate::adversary::{flip_words, proxy_wrap};
use crate::attest::{
    run_full_protocol, session_network, ProtocolParams, ProverActor, Verdict,
};
use crate::channels::{BellPairStore, NetworkConfig};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::experiments::{within, Curve, Report};
use crate::memory::ClassicalMemory;
use crate::rng::{derive_seed, SimRng};
use crate::stats::freq_std_err;
use crate::trials::run_trials;

/// Long-run reject rate of the default corrupted scenario (1% of words, 8
/// rounds of 256 steps over 1024 words), frozen from a 40960-trial reference
/// run at seed 0. Checked to 3 sigma; the analytic ceiling for diverged
/// chains puts it near 0.94, never at 1.
pub const CORRUPTED_REJECT_REFERENCE: f64 = 0.93828125;
const REFERENCE_TRIALS: u64 = 40_960;

fn run_one(
    prover: &ProverActor,
    verifier_mem: &ClassicalMemory,
    params: &ProtocolParams,
    net: &NetworkConfig,
    rng: &mut SimRng,
) -> Result<Verdict> {
    let mut store = BellPairStore::with_budget(params.required_pairs());
    Ok(run_full_protocol(prover, verifier_mem, params, net, &mut store, rng)?.verdict)
}

fn ulp_offset(x: f64, k: i64) -> f64 {
    debug_assert!(x > 0.0);
    f64::from_bits((x.to_bits() as i64 + k) as u64)
}

pub fn run(cfg: &ExperimentConfig, seed: u64, trials: Option<u64>) -> Result<Report> {
    let trials = cfg.trials_or(trials, 1000);
    let params = cfg.protocol_params()?;
    let mut report = Report::new("protocol", seed);

    // Honest prover at the registered position.
    let honest: u64 = run_trials(trials, derive_seed(seed, 1), |_, rng| -> Result<u64> {
        let mem = ClassicalMemory::random(cfg.word_bits, cfg.words, rng)?;
        let prover = ProverActor::honest(mem.clone(), "prover");
        let net = session_network(
            cfg.prover_distance_m,
            cfg.signal_speed_m_s,
            cfg.processing_delay_s,
        )?;
        Ok(u64::from(run_one(&prover, &mem, &params, &net, rng)?.is_accept()))
    })
    .into_iter()
    .sum::<Result<u64>>()?;
    let honest_rate = honest as f64 / trials as f64;
    report.row(
        "scenario=honest".into(),
        honest_rate,
        Some(1.0),
        Some(freq_std_err(honest_rate, trials)),
        trials,
    );
    report.check(
        "honest_always_accepts",
        honest_rate == 1.0,
        format!("accept rate {honest_rate}"),
    );

    // Per-word corruption at the configured rate.
    let rejected: u64 = run_trials(trials, derive_seed(seed, 2), |_, rng| -> Result<u64> {
        let mem = ClassicalMemory::random(cfg.word_bits, cfg.words, rng)?;
        let bad = flip_words(&mem, cfg.flip_probability, rng)?;
        let prover = ProverActor::honest(bad, "prover");
        let net = session_network(
            cfg.prover_distance_m,
            cfg.signal_speed_m_s,
            cfg.processing_delay_s,
        )?;
        Ok(u64::from(!run_one(&prover, &mem, &params, &net, rng)?.is_accept()))
    })
    .into_iter()
    .sum::<Result<u64>>()?;
    let reject_rate = rejected as f64 / trials as f64;
    let n = trials as f64;
    let reject_se = freq_std_err(reject_rate.clamp(1.0 / n, 1.0 - 1.0 / n), trials);
    report.row(
        "scenario=corrupted".into(),
        reject_rate,
        Some(CORRUPTED_REJECT_REFERENCE),
        Some(reject_se),
        trials,
    );
    // Only gate against the frozen reference when running its exact shape.
    let default_shape = cfg.flip_probability == 0.01
        && cfg.rounds == 8
        && cfg.chain_steps == 256
        && cfg.words == 1024;
    if default_shape {
        let ref_se = freq_std_err(CORRUPTED_REJECT_REFERENCE, REFERENCE_TRIALS);
        report.check(
            "corrupted_reject_rate_matches_reference",
            within(
                reject_rate,
                CORRUPTED_REJECT_REFERENCE,
                3.0 * (reject_se * reject_se + ref_se * ref_se).sqrt().max(reject_se),
            ),
            format!("reject rate {reject_rate} vs frozen {CORRUPTED_REJECT_REFERENCE}"),
        );
    }

    // Honest memory, but round traffic relayed through a distant colluder.
    let proxy_trials = trials.min(400);
    let timed_out: u64 =
        run_trials(proxy_trials, derive_seed(seed, 3), |_, rng| -> Result<u64> {
            let mem = ClassicalMemory::random(cfg.word_bits, cfg.words, rng)?;
            let net = session_network(
                cfg.prover_distance_m,
                cfg.signal_speed_m_s,
                cfg.processing_delay_s,
            )?
            .with_endpoint("colluder", cfg.prover_distance_m * cfg.proxy_factor)?;
            let mut prover = ProverActor::honest(mem.clone(), "prover");
            proxy_wrap(&mut prover, "colluder", &net)?;
            let verdict = run_one(&prover, &mem, &params, &net, rng)?;
            Ok(u64::from(verdict == Verdict::AbortTiming { round: 1 }))
        })
        .into_iter()
        .sum::<Result<u64>>()?;
    let timeout_rate = timed_out as f64 / proxy_trials as f64;
    report.row(
        format!("scenario=proxy;factor={}", cfg.proxy_factor),
        timeout_rate,
        Some(1.0),
        Some(freq_std_err(timeout_rate, proxy_trials)),
        proxy_trials,
    );
    report.check(
        "proxy_times_out_at_round_one",
        timeout_rate == 1.0,
        format!("abort rate {timeout_rate} at {}x distance", cfg.proxy_factor),
    );

    // Boundary walk: tie the distance bound to the prover's position so the
    // pivot allowance stays above the chain compute floor, measure the
    // honest round trip, then step the allowance one float at a time.
    let boundary_params = ProtocolParams::new(
        cfg.lambda_bits,
        1,
        cfg.chain_steps,
        cfg.per_step_compute_s,
        cfg.allowed_compute_s,
        cfg.prover_distance_m * 1.2,
        cfg.signal_speed_m_s,
        cfg.clock_slack_s,
    )?;
    let net = session_network(
        cfg.prover_distance_m,
        cfg.signal_speed_m_s,
        cfg.processing_delay_s,
    )?;
    let mut rng = SimRng::from_seed(derive_seed(seed, 4));
    let mem = ClassicalMemory::random(cfg.word_bits, cfg.words, &mut rng)?;
    let prover = ProverActor::honest(mem.clone(), "prover");
    let mut store = BellPairStore::unbounded();
    let transcript =
        run_full_protocol(&prover, &mem, &boundary_params, &net, &mut store, &mut rng)?;
    let rtt = transcript.rounds[0].received_at - transcript.rounds[0].sent_at;
    let light_bound = boundary_params.round_threshold() - boundary_params.allowed_compute_s;
    let pivot = rtt - light_bound;

    let mut consistent = true;
    let mut aborted_any = false;
    let mut accepted_any = false;
    let mut curve = Vec::new();
    for k in -3i64..=3 {
        let allowance = ulp_offset(pivot, k);
        let p = ProtocolParams::new(
            cfg.lambda_bits,
            1,
            cfg.chain_steps,
            cfg.per_step_compute_s,
            allowance,
            cfg.prover_distance_m * 1.2,
            cfg.signal_speed_m_s,
            cfg.clock_slack_s,
        )?;
        let verdict = run_one(&prover, &mem, &p, &net, &mut rng)?;
        let expect_abort = rtt >= p.round_threshold();
        let aborted = verdict == Verdict::AbortTiming { round: 1 };
        consistent &= aborted == expect_abort && (aborted || verdict == Verdict::Accept);
        aborted_any |= aborted;
        accepted_any |= !aborted;
        report.row(
            format!("scenario=boundary;offset_ulps={k}"),
            f64::from(u8::from(aborted)),
            Some(f64::from(u8::from(expect_abort))),
            None,
            1,
        );
        curve.push((k as f64, f64::from(u8::from(aborted))));
    }
    report.curves.push(Curve {
        name: "boundary".into(),
        x_label: "allowance_offset_ulps".into(),
        y_label: "aborted".into(),
        points: curve,
    });
    report.check(
        "verdict_flips_exactly_at_threshold",
        consistent && aborted_any && accepted_any,
        format!(
            "comparison-consistent: {consistent}, both sides seen: {}",
            aborted_any && accepted_any
        ),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> ExperimentConfig {
        ExperimentConfig {
            rounds: 2,
            chain_steps: 16,
            allowed_compute_s: 1.1 * 16.0 * 1.0e-7,
            words: 64,
            flip_probability: 0.2,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn honest_proxy_and_boundary_behave() {
        let report = run(&quick_cfg(), 41, Some(40)).unwrap();
        for check in &report.checks {
            assert!(check.passed, "{check:?}");
        }
        let boundary_rows = report
            .rows
            .iter()
            .filter(|r| r.params.starts_with("scenario=boundary"))
            .count();
        assert_eq!(boundary_rows, 7);
    }

    #[test]
    fn corrupted_scenario_rejects_often() {
        // Heavy corruption: with 4 rounds the expected reject rate is about
        // 1 - 0.7026^4 = 0.76, far enough above the 0.5 line for 60 trials.
        let cfg = ExperimentConfig {
            rounds: 4,
            ..quick_cfg()
        };
        let report = run(&cfg, 42, Some(60)).unwrap();
        let row = report
            .rows
            .iter()
            .find(|r| r.params == "scenario=corrupted")
            .unwrap();
        assert!(row.measured > 0.5, "reject rate {}", row.measured);
        assert!(row.std_err.is_some());
    }

    #[test]
    fn seeded_reruns_match() {
        let a = run(&quick_cfg(), 43, Some(25)).unwrap();
        let b = run(&quick_cfg(), 43, Some(25)).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.measured, y.measured, "{}", x.params);
        }
    }
}
