use num_complex::Complex64;

use super::state::StateVector;
use crate::error::{Error, Result};
use crate::rng::SimRng;

/// The four Bell states. The two-bit labels are fixed:
/// `PhiPlus = 00`, `PhiMinus = 01`, `PsiPlus = 10`, `PsiMinus = 11`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    pub fn bits(self) -> (u8, u8) {
        match self {
            BellOutcome::PhiPlus => (0, 0),
            BellOutcome::PhiMinus => (0, 1),
            BellOutcome::PsiPlus => (1, 0),
            BellOutcome::PsiMinus => (1, 1),
        }
    }

    pub fn from_bits(b0: u8, b1: u8) -> Result<Self> {
        match (b0, b1) {
            (0, 0) => Ok(BellOutcome::PhiPlus),
            (0, 1) => Ok(BellOutcome::PhiMinus),
            (1, 0) => Ok(BellOutcome::PsiPlus),
            (1, 1) => Ok(BellOutcome::PsiMinus),
            _ => Err(Error::InvalidArgument(format!(
                "bell bits must each be 0 or 1, got ({b0}, {b1})"
            ))),
        }
    }

    /// Two-qubit coefficients `(c00, c01, c10, c11)` of the Bell state.
    pub fn coefficients(self) -> [Complex64; 4] {
        let s = Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0);
        match self {
            BellOutcome::PhiPlus => [s, Complex64::ZERO, Complex64::ZERO, s],
            BellOutcome::PhiMinus => [s, Complex64::ZERO, Complex64::ZERO, -s],
            BellOutcome::PsiPlus => [Complex64::ZERO, s, s, Complex64::ZERO],
            BellOutcome::PsiMinus => [Complex64::ZERO, s, -s, Complex64::ZERO],
        }
    }

    pub fn state(self) -> StateVector {
        StateVector::from_amplitudes(self.coefficients().to_vec()).expect("bell state")
    }
}

/// Measure `qubits` (in the listed order) in the computational basis.
/// Returns the outcome bits and the collapsed, renormalized state.
pub fn measure_computational(
    state: &StateVector,
    qubits: &[usize],
    rng: &mut SimRng,
) -> Result<(Vec<u8>, StateVector)> {
    if qubits.is_empty() {
        return Err(Error::InvalidArgument("measure at least one qubit".into()));
    }
    let mut masks = Vec::with_capacity(qubits.len());
    for &q in qubits {
        let m = state.qubit_mask(q)?;
        if masks.contains(&m) {
            return Err(Error::InvalidArgument(format!("duplicate qubit {q}")));
        }
        masks.push(m);
    }

    let n_outcomes = 1usize << qubits.len();
    let mut probs = vec![0.0f64; n_outcomes];
    for (i, a) in state.amplitudes().iter().enumerate() {
        probs[outcome_key(i, &masks)] += a.norm_sqr();
    }

    let outcome = sample_discrete(&probs, rng);
    let mut collapsed = state.clone();
    for (i, a) in collapsed.amplitudes_mut().iter_mut().enumerate() {
        if outcome_key(i, &masks) != outcome {
            *a = Complex64::ZERO;
        }
    }
    collapsed.renormalize();

    let bits = (0..qubits.len())
        .map(|k| ((outcome >> (qubits.len() - 1 - k)) & 1) as u8)
        .collect();
    Ok((bits, collapsed))
}

/// Single-shot full-register readout without building the collapsed state.
/// Equivalent to `measure_computational` over all qubits, returning the index.
pub fn measure_index(state: &StateVector, rng: &mut SimRng) -> usize {
    let probs: Vec<f64> = state.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    sample_discrete(&probs, rng)
}

fn outcome_key(index: usize, masks: &[usize]) -> usize {
    let mut key = 0usize;
    for &m in masks {
        key = (key << 1) | usize::from(index & m != 0);
    }
    key
}

/// Draw an index proportional to `weights` (weights sum to ~1 but are used
/// as given, so float dust cannot bias the last bucket).
fn sample_discrete(weights: &[f64], rng: &mut SimRng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.f64() * total;
    let mut last_nonzero = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_nonzero = i;
            if u < w {
                return i;
            }
            u -= w;
        }
    }
    last_nonzero
}

/// Project qubits `(qa, qb)` onto the Bell basis. Returns the sampled outcome
/// and the collapsed full state (the pair left exactly in that Bell state).
pub fn measure_bell(
    state: &StateVector,
    pair: (usize, usize),
    rng: &mut SimRng,
) -> Result<(BellOutcome, StateVector)> {
    let (probs, parts) = bell_components(state, pair)?;
    let k = sample_discrete(&probs, rng);
    let outcome = BellOutcome::ALL[k];
    let norm = probs[k].sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidArgument(
            "sampled zero-probability bell outcome".into(),
        ));
    }

    let ma = state.qubit_mask(pair.0)?;
    let mb = state.qubit_mask(pair.1)?;
    let coef = outcome.coefficients();
    let mut amps = vec![Complex64::ZERO; state.dim()];
    for (rest, c) in parts[k].iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let base = expand_rest(rest, ma, mb);
        for (ab, u) in coef.iter().enumerate() {
            if u.norm_sqr() == 0.0 {
                continue;
            }
            let idx = base
                | if ab & 0b10 != 0 { ma } else { 0 }
                | if ab & 0b01 != 0 { mb } else { 0 };
            amps[idx] = u * c / norm;
        }
    }
    let collapsed = StateVector::from_amplitudes(amps)?;
    Ok((outcome, collapsed))
}

/// Like [`measure_bell`] but returns the post-measurement state of the
/// *other* qubits (relative order preserved). The measured pair factors out
/// exactly, so nothing is lost. Errors if only the pair itself exists.
pub fn measure_bell_remainder(
    state: &StateVector,
    pair: (usize, usize),
    rng: &mut SimRng,
) -> Result<(BellOutcome, StateVector)> {
    if state.n_qubits() < 3 {
        return Err(Error::InvalidArgument(
            "no remainder qubits outside the measured pair".into(),
        ));
    }
    let (probs, mut parts) = bell_components(state, pair)?;
    let k = sample_discrete(&probs, rng);
    let outcome = BellOutcome::ALL[k];
    let norm = probs[k].sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidArgument(
            "sampled zero-probability bell outcome".into(),
        ));
    }
    for c in &mut parts[k] {
        *c /= norm;
    }
    let remainder = StateVector::from_amplitudes(std::mem::take(&mut parts[k]))?;
    Ok((outcome, remainder))
}

/// For each Bell outcome on `pair`: outcome probability plus the unnormalized
/// remainder amplitudes indexed by the other qubits.
fn bell_components(
    state: &StateVector,
    pair: (usize, usize),
) -> Result<([f64; 4], [Vec<Complex64>; 4])> {
    let (qa, qb) = pair;
    if qa == qb {
        return Err(Error::InvalidArgument("bell pair qubits must differ".into()));
    }
    let ma = state.qubit_mask(qa)?;
    let mb = state.qubit_mask(qb)?;
    let rest_dim = state.dim() >> 2;
    let mut parts: [Vec<Complex64>; 4] =
        std::array::from_fn(|_| vec![Complex64::ZERO; rest_dim.max(1)]);
    let mut probs = [0.0f64; 4];
    let amps = state.amplitudes();
    #[allow(clippy::needless_range_loop)] // `rest` is a compact index, expanded below
    for rest in 0..rest_dim.max(1) {
        let base = expand_rest(rest, ma, mb);
        let psi = [
            amps[base],
            amps[base | mb],
            amps[base | ma],
            amps[base | ma | mb],
        ];
        for (k, outcome) in BellOutcome::ALL.iter().enumerate() {
            let coef = outcome.coefficients();
            let c: Complex64 = coef
                .iter()
                .zip(&psi)
                .map(|(u, p)| u.conj() * p)
                .sum();
            probs[k] += c.norm_sqr();
            parts[k][rest] = c;
        }
    }
    Ok((probs, parts))
}

/// Spread the compact remainder index over the basis-index bits not owned by
/// the measured pair.
fn expand_rest(rest: usize, ma: usize, mb: usize) -> usize {
    let mut out = 0usize;
    let mut src = rest;
    let mut bit = 1usize;
    while src != 0 || bit <= out {
        if bit & (ma | mb) == 0 {
            if src & 1 != 0 {
                out |= bit;
            }
            src >>= 1;
        }
        bit <<= 1;
    }
    out
}

/// Destructive SWAP test between two states of equal width: returns the
/// ancilla bit, `0` with probability `1/2 + |<a|b>|^2 / 2`. Consumes both
/// inputs; equal states can never return `1`.
pub fn swap_test(a: StateVector, b: StateVector, rng: &mut SimRng) -> Result<u8> {
    let mut overlap_sq = a.fidelity(&b)?;
    // Snap float dust so identical inputs are exactly indistinguishable.
    if overlap_sq > 1.0 - 1e-12 {
        overlap_sq = 1.0;
    }
    let p0 = 0.5 + 0.5 * overlap_sq;
    Ok(u8::from(rng.f64() >= p0))
}

/// Estimate `|alpha_i|` for every basis index by measuring fresh copies drawn
/// from `source`. Consumes exactly `n_samples` copies; errors if the supply
/// runs dry or the copies disagree in width.
pub fn tomography_estimate<I>(source: I, n_samples: usize, rng: &mut SimRng) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = StateVector>,
{
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be positive".into()));
    }
    let mut it = source.into_iter();
    let mut counts: Vec<u64> = Vec::new();
    for drawn in 0..n_samples {
        let state = it.next().ok_or(Error::SupplyExhausted {
            drawn,
            requested: n_samples,
        })?;
        if counts.is_empty() {
            counts = vec![0; state.dim()];
        } else if counts.len() != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: counts.len(),
                got: state.dim(),
            });
        }
        counts[measure_index(&state, rng)] += 1;
    }
    Ok(counts
        .iter()
        .map(|&c| (c as f64 / n_samples as f64).sqrt())
        .collect())
}
