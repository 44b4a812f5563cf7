//! Detection ceiling for bounded quantum tampering.
//!
//! Each stored qubit is displaced by 2-norm magnitude eps with probability
//! p; the verifier swap-tests the response read from the perturbed memory
//! against the honest one. Measured detection must stay under
//! (p eps)^2 / 2 - (p eps)^4 / 8 and grow quadratically in eps. At p = 1
//! the displacement is deterministic and the bound is met with equality,
//! which is where the sweep pins its slope; Bernoulli mixing at p < 1 puts
//! the average displacement inside the norm, so the bound as written is a
//! per-realization statement and the default sweep keeps p = 1.

use crate::adversary::perturb_quantum_memory;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::experiments::{within, Curve, Report};
use crate::memory::{quantum_memory_read, QuantumMemory};
use crate::qsim::{random_state, swap_test};
use crate::rng::derive_seed;
use crate::stats::{freq_std_err, ols_slope};
use crate::trials::run_trials;

/// Stored words per trial; index register plus stored qubit must leave room
/// for the swap-test ancilla over two copies.
const QMEM_WORDS: usize = 16;
const INDEX_QUBITS: usize = 4;

fn bound(p: f64, eps: f64) -> f64 {
    let pe2 = (p * eps) * (p * eps);
    pe2 / 2.0 - pe2 * pe2 / 8.0
}

fn detection_rate(p: f64, eps: f64, trials: u64, master: u64) -> Result<f64> {
    let hits: u64 = run_trials(trials, master, |_, rng| -> Result<u64> {
        let bits: Vec<u8> = (0..QMEM_WORDS).map(|_| rng.bit()).collect();
        let qmem = QuantumMemory::from_bits(&bits)?;
        let tampered = perturb_quantum_memory(&qmem, p, eps, rng)?;
        let index = random_state(INDEX_QUBITS, rng)?;
        let expected = quantum_memory_read(&qmem, &index)?;
        let answer = quantum_memory_read(&tampered, &index)?;
        Ok(u64::from(swap_test(answer, expected, rng)? == 1))
    })
    .into_iter()
    .sum::<Result<u64>>()?;
    Ok(hits as f64 / trials as f64)
}

pub fn run(cfg: &ExperimentConfig, seed: u64, trials: Option<u64>) -> Result<Report> {
    let trials = cfg.trials_or(trials, 40_000);
    let mut report = Report::new("epsilon_bound", seed);

    // Untouched memory is undetectable, exactly.
    let zero = detection_rate(1.0, 0.0, 2000, derive_seed(seed, u64::MAX))?;
    report.row("p=1;eps=0".into(), zero, Some(0.0), Some(0.0), 2000);
    report.check(
        "zero_perturbation_is_invisible",
        zero == 0.0,
        format!("detection {zero} at eps = 0"),
    );

    let mut never_violated = true;
    for (pi, &p) in cfg.flip_probabilities.iter().enumerate() {
        let mut curve_measured = Vec::new();
        let mut curve_bound = Vec::new();
        let mut log_eps = Vec::new();
        let mut log_det = Vec::new();

        for (ei, &eps) in cfg.epsilons.iter().enumerate() {
            if eps == 0.0 {
                continue;
            }
            let master = derive_seed(seed, (pi * cfg.epsilons.len() + ei) as u64);
            let measured = detection_rate(p, eps, trials, master)?;
            let ceiling = bound(p, eps);
            let se = freq_std_err(ceiling.max(1.0 / trials as f64), trials);
            report.row(
                format!("p={p};eps={eps}"),
                measured,
                Some(ceiling),
                Some(se),
                trials,
            );
            never_violated &= measured <= ceiling + 3.0 * se;
            curve_measured.push((eps, measured));
            curve_bound.push((eps, ceiling));
            if measured > 0.0 {
                log_eps.push(eps.ln());
                log_det.push(measured.ln());
            }
        }

        if log_eps.len() == curve_measured.len() && log_eps.len() >= 2 {
            let slope = ols_slope(&log_eps, &log_det);
            report.row(
                format!("p={p};fit=loglog_slope"),
                slope,
                Some(2.0),
                None,
                trials * log_eps.len() as u64,
            );
            report.check(
                &format!("quadratic_detection_p_{p}"),
                within(slope, 2.0, 0.3),
                format!("log-log slope {slope:.3}"),
            );
        }

        report.curves.push(Curve {
            name: format!("detection_p_{p}"),
            x_label: "eps".into(),
            y_label: "detection".into(),
            points: curve_measured,
        });
        report.curves.push(Curve {
            name: format!("bound_p_{p}"),
            x_label: "eps".into(),
            y_label: "detection_bound".into(),
            points: curve_bound,
        });
    }

    report.check(
        "bound_never_violated",
        never_violated,
        "measured detection under the ceiling plus 3 sigma at every point".into(),
    );
    Ok(report)
}
