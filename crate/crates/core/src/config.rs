//! Flat key-value experiment configuration.
//!
//! One TOML document drives every command; unknown keys are rejected so a
//! typo cannot silently fall back to a default. Each field maps onto a
//! module-level invariant and `validate` rebuilds the corresponding module
//! types so a bad value fails before any trial runs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::attest::ProtocolParams;
use crate::error::{Error, Result};
use crate::memory::Checksum;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Optional experiment id; when set it must match the command being run.
    pub experiment: Option<String>,
    /// Default trial count, overridable per run from the command line.
    pub trials: Option<u64>,

    // Memory shape.
    pub word_bits: u16,
    pub words: usize,

    // Challenge and checksum sizes.
    pub kappa: usize,
    pub lambda_bits: usize,

    // Timed protocol.
    pub rounds: usize,
    pub chain_steps: usize,
    pub per_step_compute_s: f64,
    pub allowed_compute_s: f64,
    pub max_distance_m: f64,
    pub signal_speed_m_s: f64,
    pub clock_slack_s: f64,
    pub processing_delay_s: f64,
    pub prover_distance_m: f64,
    /// Colluder distance as a multiple of the prover distance.
    pub proxy_factor: f64,

    // Adversary knobs.
    pub delta: f64,
    pub epsilon: f64,
    pub flip_probability: f64,

    // Baseline protocol verification.
    pub copies: usize,
    pub swap_trials: usize,

    // Sweep grids.
    pub overlap_steps: usize,
    pub sample_lengths: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub flip_probabilities: Vec<f64>,
    pub response_weights: Vec<usize>,
    pub unitary_qubits: Vec<usize>,

    // Tomography search.
    pub agreement_target: f64,
    pub probe_trials: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: None,
            trials: None,
            word_bits: 32,
            words: 1024,
            kappa: 32,
            lambda_bits: 128,
            rounds: 8,
            chain_steps: 256,
            per_step_compute_s: 1.0e-7,
            allowed_compute_s: 1.1 * 256.0 * 1.0e-7,
            max_distance_m: 300.0,
            signal_speed_m_s: 3.0e8,
            clock_slack_s: 1.0e-9,
            processing_delay_s: 1.0e-8,
            prover_distance_m: 100.0,
            proxy_factor: 10.0,
            delta: 0.01,
            epsilon: 0.25,
            flip_probability: 0.01,
            copies: 4000,
            swap_trials: 1,
            overlap_steps: 21,
            sample_lengths: vec![8192, 12288, 16384, 24576, 32768],
            epsilons: vec![0.05, 0.1, 0.2],
            flip_probabilities: vec![1.0],
            response_weights: vec![4, 8, 16, 32],
            unitary_qubits: vec![1, 2, 3, 4],
            agreement_target: 0.95,
            probe_trials: 400,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| Error::InvalidArgument(format!("bad config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rebuild the module types each field feeds so every invariant fires
    /// before any trial is spent.
    pub fn validate(&self) -> Result<()> {
        crate::memory::ClassicalMemory::new(self.word_bits, vec![0; self.words.max(1)])?;
        if self.words == 0 {
            return Err(Error::InvalidArgument("words must be at least 1".into()));
        }
        Checksum::zero(self.lambda_bits)?;
        if self.kappa < 2 {
            return Err(Error::InvalidArgument(format!(
                "kappa must be at least 2, got {}",
                self.kappa
            )));
        }
        self.protocol_params()?;
        if !self.processing_delay_s.is_finite() || self.processing_delay_s < 0.0 {
            return Err(Error::InvalidArgument(
                "processing delay must be nonnegative".into(),
            ));
        }
        let placement_ok = self.prover_distance_m.is_finite()
            && self.prover_distance_m > 0.0
            && self.proxy_factor.is_finite()
            && self.proxy_factor >= 1.0;
        if !placement_ok {
            return Err(Error::InvalidArgument(
                "prover distance must be positive and proxy factor at least 1".into(),
            ));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must lie in (0, 1], got {}",
                self.delta
            )));
        }
        for &e in self.epsilons.iter().chain([&self.epsilon]) {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidArgument(format!(
                    "epsilon must lie in [0, 1], got {e}"
                )));
            }
        }
        for &p in self.flip_probabilities.iter().chain([&self.flip_probability]) {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "flip probability must lie in [0, 1], got {p}"
                )));
            }
        }
        if self.copies == 0 || self.swap_trials == 0 {
            return Err(Error::InvalidArgument(
                "copies and swap_trials must be at least 1".into(),
            ));
        }
        if self.overlap_steps < 2 {
            return Err(Error::InvalidArgument(
                "overlap sweep needs at least 2 steps".into(),
            ));
        }
        if self.sample_lengths.is_empty() || self.sample_lengths.contains(&0) {
            return Err(Error::InvalidArgument(
                "sample_lengths must be nonempty positive".into(),
            ));
        }
        if self.response_weights.is_empty()
            || self
                .response_weights
                .iter()
                .any(|&w| w < 2 || !w.is_power_of_two())
        {
            return Err(Error::InvalidArgument(
                "response_weights must be powers of two >= 2".into(),
            ));
        }
        if self.unitary_qubits.is_empty()
            || self
                .unitary_qubits
                .iter()
                .any(|&n| n == 0 || n > crate::qsim::MAX_QUBITS)
        {
            return Err(Error::InvalidArgument(
                "unitary_qubits must be within the simulator width".into(),
            ));
        }
        if !(0.0 < self.agreement_target && self.agreement_target < 1.0) {
            return Err(Error::InvalidArgument(
                "agreement_target must lie in (0, 1)".into(),
            ));
        }
        if self.probe_trials == 0 {
            return Err(Error::InvalidArgument(
                "probe_trials must be at least 1".into(),
            ));
        }
        if let Some(0) = self.trials {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        Ok(())
    }

    pub fn protocol_params(&self) -> Result<ProtocolParams> {
        ProtocolParams::new(
            self.lambda_bits,
            self.rounds,
            self.chain_steps,
            self.per_step_compute_s,
            self.allowed_compute_s,
            self.max_distance_m,
            self.signal_speed_m_s,
            self.clock_slack_s,
        )
    }

    /// Trial count for a command: explicit override, then the config file,
    /// then the command's own default.
    pub fn trials_or(&self, override_trials: Option<u64>, default: u64) -> u64 {
        override_trials.or(self.trials).unwrap_or(default)
    }

    /// Enforce the optional experiment pin against the command actually run.
    pub fn check_experiment(&self, command: &str) -> Result<()> {
        match &self.experiment {
            Some(e) if e != command => Err(Error::InvalidArgument(format!(
                "config pins experiment '{e}' but '{command}' was requested"
            ))),
            _ => Ok(()),
        }
    }
}
