//! No circuit can spread close states apart: unitarity pins every pairwise
//! overlap, so the best possible "quantum hash" preserves exactly the
//! similarity it was supposed to break. The sweep applies random unitaries
//! to random state pairs across register widths and reports the worst
//! squared-overlap deviation seen, which is floating-point dust.

use crate::adversary::unitary_overlap_defect;
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::experiments::{Curve, Report};
use crate::qsim::{random_state, UnitaryOp};
use crate::rng::{derive_seed, SimRng};

const DEFECT_BOUND: f64 = 1e-9;

pub fn run(cfg: &ExperimentConfig, seed: u64, trials: Option<u64>) -> Result<Report> {
    let candidates = cfg.trials_or(trials, 1000);
    let mut report = Report::new("hash_impossibility", seed);
    let mut curve = Vec::new();
    let mut all_bounded = true;

    for (i, &n) in cfg.unitary_qubits.iter().enumerate() {
        let mut rng = SimRng::from_seed(derive_seed(seed, i as u64));
        let worst = unitary_overlap_defect(n, candidates as usize, &mut rng)?;
        report.row(
            format!("qubits={n};dim={}", 1usize << n),
            worst,
            Some(0.0),
            None,
            candidates,
        );
        curve.push(((1usize << n) as f64, worst));
        all_bounded &= worst < DEFECT_BOUND;
    }

    // The identity circuit moves nothing at all; deviation is exactly zero.
    let n = *cfg.unitary_qubits.last().expect("validated nonempty");
    let mut rng = SimRng::from_seed(derive_seed(seed, u64::MAX));
    let a = random_state(n, &mut rng)?;
    let b = random_state(n, &mut rng)?;
    let id = UnitaryOp::identity(1 << n)?;
    let identity_defect =
        (id.apply(&a)?.fidelity(&id.apply(&b)?)? - a.fidelity(&b)?).abs();
    report.row(
        format!("qubits={n};unitary=identity"),
        identity_defect,
        Some(0.0),
        None,
        1,
    );

    report.curves.push(Curve {
        name: "max_defect".into(),
        x_label: "dim".into(),
        y_label: "max_overlap_defect".into(),
        points: curve,
    });
    report.check(
        "overlap_preserved_under_every_unitary",
        all_bounded,
        format!("max deviation under {DEFECT_BOUND:e} across dims"),
    );
    report.check(
        "identity_preserves_exactly",
        identity_defect == 0.0,
        format!("identity deviation {identity_defect:e}"),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defects_are_dust_at_every_width() {
        let cfg = ExperimentConfig {
            unitary_qubits: vec![1, 2, 3],
            ..ExperimentConfig::default()
        };
        let report = run(&cfg, 51, Some(200)).unwrap();
        assert!(report.all_passed(), "{:?}", report.checks);
        for row in report.rows.iter().filter(|r| r.params.contains("dim=")) {
            assert!(row.measured < 1e-9, "{}: {}", row.params, row.measured);
        }
    }

    #[test]
    fn reruns_bitwise_match() {
        let cfg = ExperimentConfig::default();
        let a = run(&cfg, 52, Some(50)).unwrap();
        let b = run(&cfg, 52, Some(50)).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.measured, y.measured);
        }
    }
}
