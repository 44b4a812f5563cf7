//! Executable baseline attestation: the two table-lookup variants (quantum
//! memory and classical memory) built on an ideal QPUF model, plus the
//! drivers that expose their statistical failure modes numerically.
//!
//! The QPUF is a memoized table keyed on the classical challenge descriptor:
//! honest parties prepare challenge states from classical strings anyway, so
//! the key stands in for "same physical challenge". Responses are drawn
//! fresh on first query (Haar-random, or a random fixed-weight bit encoding)
//! and never change afterwards.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::memory::{chk, gen, read, Checksum, ClassicalMemory, Nonce, QuantumMemory};
use crate::qsim::{amplitude_encode, measure_index, random_state, swap_test, StateVector};
use crate::rng::SimRng;

/// How the table fills in a response the first time a challenge is seen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QpufMode {
    /// Haar-random pure state over `response_qubits` qubits.
    Haar { response_qubits: usize },
    /// Amplitude-encoded random bit string of length `dim` with exactly
    /// `weight` ones; the normalization factor `sqrt(weight)` is public.
    EncodedBits { dim: usize, weight: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StoredResponse {
    re: Vec<f64>,
    im: Vec<f64>,
    /// Ground-truth bits for `EncodedBits` responses.
    bits: Option<Vec<u8>>,
}

impl StoredResponse {
    fn state(&self) -> Result<StateVector> {
        let amps = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| num_complex::Complex64::new(r, i))
            .collect();
        StateVector::from_amplitudes(amps)
    }
}

/// Ideal-QPUF lookup table: same challenge descriptor, same response, with
/// responses drawn lazily. Serializable so a baseline can be reproduced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QpufTable {
    challenge_bits: usize,
    mode: QpufMode,
    entries: BTreeMap<String, StoredResponse>,
}

fn descriptor_key(bits: &[u8]) -> Result<String> {
    if let Some(&b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::InvalidArgument(format!(
            "challenge bits must be 0 or 1, got {b}"
        )));
    }
    Ok(bits.iter().map(|&b| char::from(b'0' + b)).collect())
}

impl QpufTable {
    pub fn new(challenge_bits: usize, mode: QpufMode) -> Result<Self> {
        if challenge_bits < 2 {
            return Err(Error::InvalidArgument(format!(
                "challenge length must be at least 2 bits, got {challenge_bits}"
            )));
        }
        match mode {
            QpufMode::Haar { response_qubits } => {
                if response_qubits == 0 || response_qubits > crate::qsim::MAX_QUBITS {
                    return Err(Error::InvalidArgument(format!(
                        "response register of {response_qubits} qubits is unsupported"
                    )));
                }
            }
            QpufMode::EncodedBits { dim, weight } => {
                if weight == 0 || weight > dim {
                    return Err(Error::InvalidArgument(format!(
                        "response weight {weight} must be in [1, {dim}]"
                    )));
                }
                if dim > 1 << crate::qsim::MAX_QUBITS {
                    return Err(Error::InvalidArgument(format!(
                        "response dimension {dim} exceeds the register cap"
                    )));
                }
            }
        }
        Ok(QpufTable {
            challenge_bits,
            mode,
            entries: BTreeMap::new(),
        })
    }

    pub fn challenge_bits(&self) -> usize {
        self.challenge_bits
    }

    pub fn mode(&self) -> QpufMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Decode normalization factor: `sqrt(weight)` for bit encodings, 1 for
    /// Haar responses (whose honest decode is a plain nearest-bit round).
    pub fn normalization(&self) -> f64 {
        match self.mode {
            QpufMode::Haar { .. } => 1.0,
            QpufMode::EncodedBits { weight, .. } => (weight as f64).sqrt(),
        }
    }

    /// Query the QPUF. `challenge` is consumed, as a physical query would
    /// consume it, and must actually be the encoding of `descriptor`; the
    /// ideal model has no answer for states it was never defined on.
    pub fn eval(
        &mut self,
        challenge: StateVector,
        descriptor: &[u8],
        rng: &mut SimRng,
    ) -> Result<StateVector> {
        let expected = encode_challenge(descriptor)?;
        if challenge.fidelity(&expected)? < 1.0 - 1e-9 {
            return Err(Error::InvalidArgument(
                "challenge state does not encode the claimed descriptor".into(),
            ));
        }
        self.respond(descriptor, rng)
    }

    /// Table lookup half of [`QpufTable::eval`], for callers that track
    /// descriptors directly.
    pub fn respond(&mut self, descriptor: &[u8], rng: &mut SimRng) -> Result<StateVector> {
        if descriptor.len() != self.challenge_bits {
            return Err(Error::DimensionMismatch {
                expected: self.challenge_bits,
                got: descriptor.len(),
            });
        }
        let key = descriptor_key(descriptor)?;
        if let Some(stored) = self.entries.get(&key) {
            return stored.state();
        }
        let (state, bits) = match self.mode {
            QpufMode::Haar { response_qubits } => (random_state(response_qubits, rng)?, None),
            QpufMode::EncodedBits { dim, weight } => {
                let bits = random_weighted_bits(dim, weight, rng);
                let values: Vec<f64> = bits.iter().map(|&b| f64::from(b)).collect();
                (amplitude_encode(&values)?, Some(bits))
            }
        };
        let stored = StoredResponse {
            re: state.amplitudes().iter().map(|a| a.re).collect(),
            im: state.amplitudes().iter().map(|a| a.im).collect(),
            bits,
        };
        self.entries.insert(key, stored);
        Ok(state)
    }

    /// Ground-truth response bits for an `EncodedBits` challenge already in
    /// the table (what the table creator recorded at setup).
    pub fn response_bits(&self, descriptor: &[u8]) -> Result<Option<Vec<u8>>> {
        let key = descriptor_key(descriptor)?;
        Ok(self.entries.get(&key).and_then(|s| s.bits.clone()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&json)?)
    }
}

/// Amplitude-encode a challenge bit string. All-zero strings have no
/// encoding and are rejected.
pub fn encode_challenge(bits: &[u8]) -> Result<StateVector> {
    let values: Vec<f64> = bits.iter().map(|&b| f64::from(b)).collect();
    amplitude_encode(&values)
}

fn random_weighted_bits(dim: usize, weight: usize, rng: &mut SimRng) -> Vec<u8> {
    // Uniform subset of `weight` positions: partial Fisher-Yates.
    let mut idx: Vec<usize> = (0..dim).collect();
    for i in 0..weight {
        let j = i + rng.index(dim - i);
        idx.swap(i, j);
    }
    let mut bits = vec![0u8; dim];
    for &i in &idx[..weight] {
        bits[i] = 1;
    }
    bits
}

/// Parameters of one baseline attestation instance.
#[derive(Debug, Clone)]
pub struct SoteriaParams {
    /// Challenge length in bits.
    pub kappa: usize,
    /// Identical challenge copies the prover receives.
    pub copies: usize,
    /// Public per-run nonce mixed into the checksum seed.
    pub r_w: Checksum,
    /// Number of swap-test repetitions at verification.
    pub swap_trials: usize,
}

impl SoteriaParams {
    pub fn new(kappa: usize, copies: usize, swap_trials: usize, r_w: Checksum) -> Result<Self> {
        if kappa < 2 {
            return Err(Error::InvalidArgument(format!(
                "challenge length must be at least 2, got {kappa}"
            )));
        }
        if copies == 0 {
            return Err(Error::InvalidArgument("copies must be at least 1".into()));
        }
        if swap_trials == 0 {
            return Err(Error::InvalidArgument(
                "swap_trials must be at least 1".into(),
            ));
        }
        Ok(SoteriaParams {
            kappa,
            copies,
            r_w,
            swap_trials,
        })
    }
}

/// Setup phase: draw `n_pairs` random nonzero challenge strings, query the
/// QPUF for each, and record the pairs the verifier stores.
pub fn soteria_setup(
    table: &mut QpufTable,
    n_pairs: usize,
    rng: &mut SimRng,
) -> Result<Vec<(Vec<u8>, StateVector)>> {
    let mut out = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        let bits = loop {
            let bits: Vec<u8> = (0..table.challenge_bits()).map(|_| rng.bit()).collect();
            // The all-zero string has no amplitude encoding; redraw.
            if bits.contains(&1) {
                break bits;
            }
        };
        let response = table.respond(&bits, rng)?;
        out.push((bits, response));
    }
    Ok(out)
}

/// Tomography decode: estimate per-component magnitudes from `copies`
/// measured response copies and round `N * alpha_i` to the nearest integer
/// (half-up). Errors if any component rounds outside {0, 1}.
pub fn decode_response_bits(
    copies: &[StateVector],
    normalization: f64,
    rng: &mut SimRng,
) -> Result<Vec<u8>> {
    let estimates =
        crate::qsim::tomography_estimate(copies.iter().cloned(), copies.len(), rng)?;
    let rounded: Vec<i64> = estimates
        .iter()
        .map(|&a| (normalization * a + 0.5).floor() as i64)
        .collect();
    if rounded.iter().any(|&r| r != 0 && r != 1) {
        return Err(Error::DecodeFailure(rounded));
    }
    Ok(rounded.iter().map(|&r| r as u8).collect())
}

fn bits_to_checksum(bits: &[u8]) -> Result<Checksum> {
    if bits.len() % 8 != 0 {
        return Err(Error::InvalidArgument(format!(
            "bit string length {} is not byte-aligned",
            bits.len()
        )));
    }
    let mut bytes = vec![0u8; bits.len() / 8];
    for (i, &b) in bits.iter().enumerate() {
        bytes[i / 8] |= b << (7 - i % 8);
    }
    Checksum::from_bytes(bytes)
}

/// Classical-memory response: decode the QPUF output from `copies` copies,
/// seed the address chain with `decoded xor R_w`, checksum every word the
/// chain visits (one pass over the memory, `mem.len()` steps), and
/// amplitude-encode the final checksum's bits.
pub fn soteria_respond_classical(
    mem: &ClassicalMemory,
    table: &mut QpufTable,
    challenge: &[u8],
    params: &SoteriaParams,
    rng: &mut SimRng,
) -> Result<StateVector> {
    let response = table.respond(challenge, rng)?;
    let copies: Vec<StateVector> = (0..params.copies).map(|_| response.clone()).collect();
    let decoded = decode_response_bits(&copies, table.normalization(), rng)?;
    respond_classical_with_bits(mem, &decoded, &params.r_w)
}

/// The deterministic tail of the classical response, starting from already
/// decoded response bits. Split out so experiments can compare two parties'
/// decodes directly.
pub fn respond_classical_with_bits(
    mem: &ClassicalMemory,
    decoded_bits: &[u8],
    r_w: &Checksum,
) -> Result<StateVector> {
    let seed = bits_to_checksum(decoded_bits)?.xor(r_w)?;
    let mut nonce: Nonce = seed.clone();
    let mut sum = Checksum::zero(seed.len_bits())?;
    for _ in 0..mem.len() {
        let (next, addr) = gen(&nonce, &[], mem.len())?;
        nonce = next;
        sum = chk(&sum, read(mem, addr)?, (0, 0))?;
    }
    let sigma: Vec<f64> = checksum_bits(&sum).iter().map(|&b| f64::from(b)).collect();
    amplitude_encode(&sigma)
}

fn checksum_bits(c: &Checksum) -> Vec<u8> {
    c.as_bytes()
        .iter()
        .flat_map(|&byte| (0..8).map(move |i| (byte >> (7 - i)) & 1))
        .collect()
}

/// Quantum-memory response: the QPUF output is used directly as the index
/// register of a superposed memory read.
pub fn soteria_respond_quantum(
    qmem: &QuantumMemory,
    table: &mut QpufTable,
    challenge: &[u8],
    rng: &mut SimRng,
) -> Result<StateVector> {
    let index = table.respond(challenge, rng)?;
    crate::memory::quantum_memory_read(qmem, &index)
}

/// Verification: run `n` swap tests between fresh copies of the received
/// response and the expected state; fail iff any test returns 1. Each trial
/// stands for one consumed copy pair.
pub fn soteria_verify(
    response: &StateVector,
    expected: &StateVector,
    swap_trials: usize,
    rng: &mut SimRng,
) -> Result<bool> {
    for _ in 0..swap_trials {
        if swap_test(response.clone(), expected.clone(), rng)? == 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Single-copy agreement experiment: prover and verifier each measure one
/// copy of the same response state in the computational basis and succeed
/// only when they land on the same outcome. Returns
/// `(measured agreement, analytic sum of fourth powers)`.
pub fn single_copy_agreement(
    response: &StateVector,
    trials: u64,
    rng: &mut SimRng,
) -> (f64, f64) {
    let analytic: f64 = response
        .amplitudes()
        .iter()
        .map(|a| {
            let p = a.norm_sqr();
            p * p
        })
        .sum();
    let mut agree = 0u64;
    for _ in 0..trials {
        let prover = measure_index(response, rng);
        let verifier = measure_index(response, rng);
        if prover == verifier {
            agree += 1;
        }
    }
    (agree as f64 / trials as f64, analytic)
}

/// Bit-level memory sampling: walk the address chain over individual bits
/// and return the `b` sampled bits in visit order.
pub fn sample_memory_bits(mem: &ClassicalMemory, seed: &Nonce, b: usize) -> Result<Vec<u8>> {
    if b == 0 {
        return Err(Error::InvalidArgument("sample at least one bit".into()));
    }
    let total = mem.total_bits();
    let mut nonce = seed.clone();
    let mut out = Vec::with_capacity(b);
    for _ in 0..b {
        let (next, bit_addr) = gen(&nonce, &[], total)?;
        nonce = next;
        let word = read(mem, bit_addr / mem.word_bits() as usize)?;
        out.push(((word >> (bit_addr % mem.word_bits() as usize)) & 1) as u8);
    }
    Ok(out)
}

/// Squared overlap of the amplitude encodings of two equal-length bit
/// strings, in closed form: `(shared ones)^2 / (w_a * w_b)`. Agrees with the
/// state-level fidelity but has no register-size ceiling, so samples far
/// larger than the simulator can hold still work.
pub fn sampled_overlap_sq(bits_a: &[u8], bits_b: &[u8]) -> Result<f64> {
    if bits_a.len() != bits_b.len() {
        return Err(Error::DimensionMismatch {
            expected: bits_a.len(),
            got: bits_b.len(),
        });
    }
    let mut shared = 0u64;
    let mut wa = 0u64;
    let mut wb = 0u64;
    for (&a, &b) in bits_a.iter().zip(bits_b) {
        if a > 1 || b > 1 {
            return Err(Error::InvalidArgument(
                "sampled bits must be 0 or 1".into(),
            ));
        }
        wa += u64::from(a);
        wb += u64::from(b);
        shared += u64::from(a & b);
    }
    if wa == 0 || wb == 0 {
        return Err(Error::ZeroVector);
    }
    Ok((shared * shared) as f64 / (wa * wb) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::freq_std_err;

    fn haar_table() -> QpufTable {
        QpufTable::new(8, QpufMode::Haar { response_qubits: 4 }).unwrap()
    }

    #[test]
    fn same_descriptor_same_response() {
        let mut table = haar_table();
        let mut rng = SimRng::from_seed(201);
        let bits = vec![1, 0, 1, 1, 0, 0, 1, 0];
        let a = table.respond(&bits, &mut rng).unwrap();
        let b = table.respond(&bits, &mut rng).unwrap();
        assert!(a.fidelity(&b).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn eval_checks_the_challenge_state() {
        let mut table = haar_table();
        let mut rng = SimRng::from_seed(202);
        let bits = vec![0, 1, 0, 0, 0, 0, 0, 0];
        let good = encode_challenge(&bits).unwrap();
        assert!(table.eval(good, &bits, &mut rng).is_ok());
        let wrong = encode_challenge(&[1, 1, 0, 0, 0, 0, 0, 0]).unwrap();
        assert!(table.eval(wrong, &bits, &mut rng).is_err());
    }

    #[test]
    fn distinct_descriptors_have_nearly_orthogonal_responses() {
        // Haar over 16 dimensions: mean pairwise overlap^2 is 1/16.
        let mut table = haar_table();
        let mut rng = SimRng::from_seed(203);
        let pairs = soteria_setup(&mut table, 2000, &mut rng).unwrap();
        let mut sum = 0.0;
        let mut count = 0u32;
        for chunk in pairs.chunks(2) {
            if chunk.len() < 2 || chunk[0].0 == chunk[1].0 {
                continue;
            }
            sum += chunk[0].1.fidelity(&chunk[1].1).unwrap();
            count += 1;
        }
        let mean = sum / f64::from(count);
        assert!(mean < 0.1, "mean Haar overlap^2 {mean} not near 1/16");
    }

    #[test]
    fn table_persists_and_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.json");
        let mut rng = SimRng::from_seed(204);
        let mut table =
            QpufTable::new(8, QpufMode::EncodedBits { dim: 16, weight: 4 }).unwrap();
        let pairs = soteria_setup(&mut table, 8, &mut rng).unwrap();
        table.save(&path).unwrap();
        let mut reloaded = QpufTable::load(&path).unwrap();
        for (bits, response) in &pairs {
            let again = reloaded.respond(bits, &mut rng).unwrap();
            assert!(again.fidelity(response).unwrap() > 1.0 - 1e-9);
            assert_eq!(
                reloaded.response_bits(bits).unwrap(),
                table.response_bits(bits).unwrap()
            );
        }
    }

    #[test]
    fn setup_challenges_are_distinct_and_seeded() {
        let run = |seed: u64| {
            let mut table = haar_table();
            let mut rng = SimRng::from_seed(seed);
            soteria_setup(&mut table, 16, &mut rng)
                .unwrap()
                .into_iter()
                .map(|(bits, _)| bits)
                .collect::<Vec<_>>()
        };
        let a = run(7);
        assert_eq!(a, run(7));
        assert_ne!(a, run(8));
        // Birthday bound at 16 draws over 2^8 strings leaves collisions
        // unlikely but possible; distinctness just needs to dominate.
        let distinct: std::collections::HashSet<_> = a.iter().collect();
        assert!(distinct.len() >= 15);
    }

    #[test]
    fn encoded_bits_have_exact_weight() {
        let mut table = QpufTable::new(8, QpufMode::EncodedBits { dim: 32, weight: 8 }).unwrap();
        let mut rng = SimRng::from_seed(205);
        let pairs = soteria_setup(&mut table, 20, &mut rng).unwrap();
        for (bits, _) in &pairs {
            let stored = table.response_bits(bits).unwrap().unwrap();
            assert_eq!(stored.len(), 32);
            assert_eq!(stored.iter().filter(|&&b| b == 1).count(), 8);
        }
    }

    #[test]
    fn generous_copies_decode_the_response_exactly() {
        let mut table = QpufTable::new(8, QpufMode::EncodedBits { dim: 16, weight: 4 }).unwrap();
        let mut rng = SimRng::from_seed(206);
        let (bits, response) = soteria_setup(&mut table, 1, &mut rng).unwrap().remove(0);
        let truth = table.response_bits(&bits).unwrap().unwrap();
        let copies: Vec<StateVector> = (0..4000).map(|_| response.clone()).collect();
        let decoded = decode_response_bits(&copies, table.normalization(), &mut rng).unwrap();
        // Padded components decode to zero; compare the leading dim bits.
        assert_eq!(&decoded[..truth.len()], &truth[..]);
    }

    #[test]
    fn starved_decode_reports_failure() {
        // One copy of a 4-one state: the single measured component rounds to
        // round(2 * 1) = 2, outside bits.
        let mut table = QpufTable::new(8, QpufMode::EncodedBits { dim: 16, weight: 4 }).unwrap();
        let mut rng = SimRng::from_seed(207);
        let (_, response) = soteria_setup(&mut table, 1, &mut rng).unwrap().remove(0);
        match decode_response_bits(&[response], table.normalization(), &mut rng) {
            Err(Error::DecodeFailure(vals)) => {
                assert!(vals.iter().any(|&v| v > 1));
            }
            other => panic!("expected decode failure, got {other:?}"),
        }
    }

    #[test]
    fn single_copy_agreement_matches_fourth_moment() {
        let mut rng = SimRng::from_seed(208);
        let response = random_state(4, &mut rng).unwrap();
        let trials = 10_000;
        let (measured, analytic) = single_copy_agreement(&response, trials, &mut rng);
        let sigma = freq_std_err(analytic, trials).max(1e-4);
        assert!(
            (measured - analytic).abs() < 3.0 * sigma,
            "agreement {measured} vs analytic {analytic}"
        );
    }

    #[test]
    fn basis_state_response_always_agrees() {
        let mut rng = SimRng::from_seed(209);
        let response = StateVector::basis(4, 9).unwrap();
        let (measured, analytic) = single_copy_agreement(&response, 2000, &mut rng);
        assert_eq!(measured, 1.0);
        assert!((analytic - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_parties_produce_identical_classical_responses() {
        let mut rng = SimRng::from_seed(210);
        let mem = ClassicalMemory::random(32, 64, &mut rng).unwrap();
        let r_w = Checksum::random(32, &mut rng).unwrap();
        let bits = vec![0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1,
                        0, 0, 1, 1, 0, 1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0];
        let a = respond_classical_with_bits(&mem, &bits, &r_w).unwrap();
        let b = respond_classical_with_bits(&mem, &bits, &r_w).unwrap();
        assert!(a.fidelity(&b).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn different_decodes_produce_different_responses() {
        let mut rng = SimRng::from_seed(211);
        let mem = ClassicalMemory::random(32, 64, &mut rng).unwrap();
        let r_w = Checksum::random(32, &mut rng).unwrap();
        let mut bits = vec![0u8; 32];
        bits[3] = 1;
        let a = respond_classical_with_bits(&mem, &bits, &r_w).unwrap();
        bits[7] = 1;
        let b = respond_classical_with_bits(&mem, &bits, &r_w).unwrap();
        assert!(a.fidelity(&b).unwrap() < 0.99, "seed change went unnoticed");
    }

    #[test]
    fn quantum_response_reads_exact_word_for_basis_index() {
        // Force a basis response by seeding the table entry manually via
        // the EncodedBits mode with weight 1.
        let mut table = QpufTable::new(8, QpufMode::EncodedBits { dim: 4, weight: 1 }).unwrap();
        let mut rng = SimRng::from_seed(212);
        let qmem = QuantumMemory::from_bits(&[1, 0, 1, 0]).unwrap();
        let (bits, response) = soteria_setup(&mut table, 1, &mut rng).unwrap().remove(0);
        let word_index = response
            .amplitudes()
            .iter()
            .position(|a| a.norm_sqr() > 0.5)
            .unwrap();
        let out = soteria_respond_quantum(&qmem, &mut table, &bits, &mut rng).unwrap();
        let expected = response.tensor(qmem.word(word_index).unwrap()).unwrap();
        assert!(out.fidelity(&expected).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn honest_quantum_parties_agree_exactly() {
        let mut table = haar_table();
        let mut rng = SimRng::from_seed(213);
        let qmem = QuantumMemory::from_bits(&[1, 0, 1, 1, 0, 0, 1, 0, 1, 0, 1, 1, 0, 1, 0, 0])
            .unwrap();
        let (bits, _) = soteria_setup(&mut table, 1, &mut rng).unwrap().remove(0);
        let prover = soteria_respond_quantum(&qmem, &mut table.clone(), &bits, &mut rng).unwrap();
        let verifier = soteria_respond_quantum(&qmem, &mut table, &bits, &mut rng).unwrap();
        assert!(prover.fidelity(&verifier).unwrap() > 1.0 - 1e-9);
        assert!(soteria_verify(&prover, &verifier, 16, &mut rng).unwrap());
    }

    #[test]
    fn orthogonal_response_passes_single_test_half_the_time() {
        let mut rng = SimRng::from_seed(214);
        let a = StateVector::basis(3, 1).unwrap();
        let b = StateVector::basis(3, 6).unwrap();
        let n = 100_000;
        let passes: u64 = (0..n)
            .map(|_| u64::from(soteria_verify(&a, &b, 1, &mut rng).unwrap()))
            .sum();
        let f = passes as f64 / n as f64;
        assert!(
            (f - 0.5).abs() < 3.0 * freq_std_err(0.5, n),
            "single-test pass rate {f}"
        );
    }

    #[test]
    fn detection_rate_matches_repeated_test_formula() {
        // overlap^2 = 1 - eps, n tests: detect with 1 - (1 - eps/2)^n.
        let eps = 0.2f64;
        let n_tests = 10;
        let a = amplitude_encode(&[(1.0f64 - eps).sqrt(), eps.sqrt()]).unwrap();
        let b = StateVector::basis(1, 0).unwrap();
        assert!((a.fidelity(&b).unwrap() - (1.0 - eps)).abs() < 1e-12);
        let mut rng = SimRng::from_seed(215);
        let trials = 40_000;
        let detected: u64 = (0..trials)
            .map(|_| u64::from(!soteria_verify(&a, &b, n_tests, &mut rng).unwrap()))
            .sum();
        let f = detected as f64 / trials as f64;
        let analytic = 1.0 - (1.0 - eps / 2.0).powi(n_tests as i32);
        assert!(
            (f - analytic).abs() < 3.0 * freq_std_err(analytic, trials),
            "detection {f} vs analytic {analytic}"
        );
    }

    #[test]
    fn worked_sampled_overlaps() {
        // (1,0,1,1,0) vs (0,0,1,1,0): overlap 2/sqrt(6) = 0.81650.
        let o1 = sampled_overlap_sq(&[1, 0, 1, 1, 0], &[0, 0, 1, 1, 0]).unwrap();
        assert!((o1.sqrt() - 2.0 / 6.0f64.sqrt()).abs() < 1e-12);
        // Six entries, one extra mismatched one: overlap sqrt(3)/2 = 0.86603.
        let o2 = sampled_overlap_sq(&[1, 0, 1, 1, 0, 1], &[0, 0, 1, 1, 0, 1]).unwrap();
        assert!((o2.sqrt() - 3.0f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_overlap_matches_state_fidelity() {
        let mut rng = SimRng::from_seed(219);
        for len in [2usize, 3, 5, 8, 17, 64, 300] {
            for _ in 0..20 {
                let mut a: Vec<u8> = (0..len).map(|_| rng.bit()).collect();
                let mut b: Vec<u8> = (0..len).map(|_| rng.bit()).collect();
                a[0] = 1;
                b[len - 1] = 1;
                let closed = sampled_overlap_sq(&a, &b).unwrap();
                let via_states = encode_challenge(&a)
                    .unwrap()
                    .fidelity(&encode_challenge(&b).unwrap())
                    .unwrap();
                assert!(
                    (closed - via_states).abs() < 1e-12,
                    "len {len}: {closed} vs {via_states}"
                );
            }
        }
        assert!(sampled_overlap_sq(&[0, 0], &[1, 1]).is_err());
        assert!(sampled_overlap_sq(&[1, 2], &[1, 1]).is_err());
    }

    #[test]
    fn sampling_is_deterministic_given_seed_and_memory() {
        let mut rng = SimRng::from_seed(216);
        let mem = ClassicalMemory::random(32, 32, &mut rng).unwrap();
        let seed = Checksum::random(128, &mut rng).unwrap();
        assert_eq!(
            sample_memory_bits(&mem, &seed, 64).unwrap(),
            sample_memory_bits(&mem, &seed, 64).unwrap()
        );
    }
}
