//! Attestable memory models.
//!
//! Classical side: fixed-width words plus the three primitives every
//! checksum chain is built from: `gen` (nonce to next nonce and address),
//! `read`, and `chk` (fold one word into a running checksum). Both `gen` and
//! `chk` are SHA-256 based; `gen` runs the hash in counter mode so any
//! checksum length up to 256 bits comes out of one design.
//!
//! Quantum side: an ordered list of single-qubit states addressed by a
//! superposed index register, read as the composite
//! `sum_i alpha_i |i> (x) |psi_i>`.
//!
//! All byte-level layouts here are little-endian.

use std::io::{Read as _, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::qsim::{StateVector, MAX_QUBITS};
use crate::rng::SimRng;

/// Default checksum/nonce length in bits.
pub const DEFAULT_LAMBDA_BITS: usize = 128;
/// Default memory word width in bits.
pub const DEFAULT_WORD_BITS: u16 = 32;
/// Default number of words.
pub const DEFAULT_WORD_COUNT: usize = 1024;

/// Index into a [`ClassicalMemory`], in `[0, m)`.
pub type Address = usize;

/// A fixed-length bit string: checksum chain values, nonces, and seeds.
/// Lengths are byte-aligned and capped at one SHA-256 output (256 bits).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Checksum(Vec<u8>);

/// Nonces have the same shape and constraints as checksums.
pub type Nonce = Checksum;

fn check_lambda(bits: usize) -> Result<()> {
    if bits % 8 != 0 || !(8..=256).contains(&bits) {
        return Err(Error::InvalidArgument(format!(
            "checksum length must be a multiple of 8 in [8, 256] bits, got {bits}"
        )));
    }
    Ok(())
}

impl Checksum {
    pub fn zero(lambda_bits: usize) -> Result<Self> {
        check_lambda(lambda_bits)?;
        Ok(Checksum(vec![0u8; lambda_bits / 8]))
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self> {
        check_lambda(bytes.len() * 8)?;
        Ok(Checksum(bytes))
    }

    pub fn random(lambda_bits: usize, rng: &mut SimRng) -> Result<Self> {
        check_lambda(lambda_bits)?;
        let mut bytes = vec![0u8; lambda_bits / 8];
        rng.fill_bytes(&mut bytes);
        Ok(Checksum(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len_bits(&self) -> usize {
        self.0.len() * 8
    }

    /// Bitwise XOR with an equal-length value (seed mixing).
    pub fn xor(&self, other: &Checksum) -> Result<Checksum> {
        if self.0.len() != other.0.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len_bits(),
                got: other.len_bits(),
            });
        }
        Ok(Checksum(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Fixed-width word memory. Words live in the low `word_bits` bits of each
/// `u64`; the upper bits are always zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalMemory {
    word_bits: u16,
    words: Vec<u64>,
}

impl ClassicalMemory {
    pub fn new(word_bits: u16, words: Vec<u64>) -> Result<Self> {
        if word_bits == 0 || word_bits > 64 {
            return Err(Error::InvalidArgument(format!(
                "word width must be in [1, 64] bits, got {word_bits}"
            )));
        }
        if words.is_empty() {
            return Err(Error::InvalidArgument("memory needs at least 1 word".into()));
        }
        let mask = word_mask(word_bits);
        if let Some(w) = words.iter().find(|&&w| w & !mask != 0) {
            return Err(Error::InvalidArgument(format!(
                "word {w:#x} does not fit in {word_bits} bits"
            )));
        }
        Ok(ClassicalMemory { word_bits, words })
    }

    pub fn random(word_bits: u16, m: usize, rng: &mut SimRng) -> Result<Self> {
        let mask = word_mask(word_bits);
        let words = (0..m).map(|_| rng.u64() & mask).collect();
        Self::new(word_bits, words)
    }

    pub fn word_bits(&self) -> u16 {
        self.word_bits
    }

    /// Number of words, `m`.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        false // m >= 1 by construction
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn total_bits(&self) -> usize {
        self.words.len() * self.word_bits as usize
    }

    /// Flip a single bit, addressed over the whole memory as
    /// `word * word_bits + bit_in_word`.
    pub fn flip_bit(&mut self, bit_index: usize) -> Result<()> {
        if bit_index >= self.total_bits() {
            return Err(Error::IndexOutOfRange {
                index: bit_index,
                len: self.total_bits(),
            });
        }
        let w = bit_index / self.word_bits as usize;
        let b = bit_index % self.word_bits as usize;
        self.words[w] ^= 1u64 << b;
        Ok(())
    }

    /// Normalized Hamming distance in `[0, 1]`: differing bits over total bits.
    pub fn normalized_distance(&self, other: &ClassicalMemory) -> Result<f64> {
        if self.word_bits != other.word_bits || self.words.len() != other.words.len() {
            return Err(Error::DimensionMismatch {
                expected: self.total_bits(),
                got: other.total_bits(),
            });
        }
        let diff: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum();
        Ok(f64::from(diff) / self.total_bits() as f64)
    }

    /// Serialize to a small-header binary image:
    /// magic `QMEM`, format version u16, word width u16, word count u64,
    /// then each word in `ceil(word_bits/8)` little-endian bytes.
    pub fn write_image(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(b"QMEM")?;
        f.write_all(&1u16.to_le_bytes())?;
        f.write_all(&self.word_bits.to_le_bytes())?;
        f.write_all(&(self.words.len() as u64).to_le_bytes())?;
        let nb = bytes_per_word(self.word_bits);
        for w in &self.words {
            f.write_all(&w.to_le_bytes()[..nb])?;
        }
        Ok(())
    }

    pub fn read_image(path: &Path) -> Result<Self> {
        let mut f = std::fs::File::open(path)?;
        let mut magic = [0u8; 4];
        f.read_exact(&mut magic)?;
        if &magic != b"QMEM" {
            return Err(Error::Format("bad memory image magic".into()));
        }
        let mut u16buf = [0u8; 2];
        f.read_exact(&mut u16buf)?;
        let version = u16::from_le_bytes(u16buf);
        if version != 1 {
            return Err(Error::Format(format!("unsupported image version {version}")));
        }
        f.read_exact(&mut u16buf)?;
        let word_bits = u16::from_le_bytes(u16buf);
        let mut u64buf = [0u8; 8];
        f.read_exact(&mut u64buf)?;
        let m = u64::from_le_bytes(u64buf) as usize;
        if word_bits == 0 || word_bits > 64 || m == 0 {
            return Err(Error::Format("corrupt memory image header".into()));
        }
        let nb = bytes_per_word(word_bits);
        let mut words = Vec::with_capacity(m);
        for _ in 0..m {
            let mut wbuf = [0u8; 8];
            f.read_exact(&mut wbuf[..nb])?;
            words.push(u64::from_le_bytes(wbuf));
        }
        Self::new(word_bits, words)
    }
}

fn word_mask(word_bits: u16) -> u64 {
    if word_bits >= 64 {
        u64::MAX
    } else {
        (1u64 << word_bits) - 1
    }
}

fn bytes_per_word(word_bits: u16) -> usize {
    (word_bits as usize).div_ceil(8)
}

/// Nonce evolution: hash `nonce || chained_bits` in counter mode, take the
/// first 64 output bits modulo `m` as the address and the next `lambda` bits
/// as the next nonce. Deterministic; `chained_bits` holds one bit per entry.
pub fn gen(nonce: &Nonce, chained_bits: &[u8], m: usize) -> Result<(Nonce, Address)> {
    if m == 0 {
        return Err(Error::InvalidArgument("memory word count is zero".into()));
    }
    if let Some(&b) = chained_bits.iter().find(|&&b| b > 1) {
        return Err(Error::InvalidArgument(format!(
            "chained bits must be 0 or 1, got {b}"
        )));
    }
    let lambda_bytes = nonce.as_bytes().len();
    let needed = 8 + lambda_bytes;
    let mut stream = Vec::with_capacity(needed.next_multiple_of(32));
    let mut counter = 0u32;
    while stream.len() < needed {
        let mut h = Sha256::new();
        h.update(nonce.as_bytes());
        h.update((chained_bits.len() as u64).to_le_bytes());
        h.update(pack_bits(chained_bits));
        h.update(counter.to_le_bytes());
        stream.extend_from_slice(&h.finalize());
        counter += 1;
    }
    let address = u64::from_le_bytes(stream[..8].try_into().unwrap()) % (m as u64);
    let next = Checksum::from_bytes(stream[8..8 + lambda_bytes].to_vec())?;
    Ok((next, address as usize))
}

fn pack_bits(bits: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        out[i / 8] |= b << (7 - i % 8);
    }
    out
}

/// Fetch one word.
pub fn read(mem: &ClassicalMemory, addr: Address) -> Result<u64> {
    mem.words
        .get(addr)
        .copied()
        .ok_or(Error::IndexOutOfRange {
            index: addr,
            len: mem.words.len(),
        })
}

/// Fold one word into the running checksum:
/// SHA-256 over `prev || word (8 bytes LE) || rot_bits` truncated to the
/// checksum length. `rot_bits` are the previous round's two rotation bits.
pub fn chk(prev: &Checksum, word: u64, rot_bits: (u8, u8)) -> Result<Checksum> {
    if rot_bits.0 > 1 || rot_bits.1 > 1 {
        return Err(Error::InvalidArgument(format!(
            "rotation bits must each be 0 or 1, got {rot_bits:?}"
        )));
    }
    let mut h = Sha256::new();
    h.update(prev.as_bytes());
    h.update(word.to_le_bytes());
    h.update([(rot_bits.0 << 1) | rot_bits.1]);
    let digest = h.finalize();
    Checksum::from_bytes(digest[..prev.as_bytes().len()].to_vec())
}

/// Map a checksum to a rotation angle in `[0, pi]`:
/// `theta = pi * (top 52 bits) / 2^52`. The 52-bit cap makes the quotient an
/// exact f64, so two honest parties derive bit-identical angles. Checksums
/// shorter than 64 bits are zero-extended on the right first.
pub fn checksum_to_angle(m: &Checksum) -> f64 {
    let mut head = [0u8; 8];
    let n = m.as_bytes().len().min(8);
    head[..n].copy_from_slice(&m.as_bytes()[..n]);
    let top = u64::from_be_bytes(head) >> 12;
    std::f64::consts::PI * (top as f64) / (1u64 << 52) as f64
}

/// Ordered single-qubit word states.
#[derive(Debug, Clone)]
pub struct QuantumMemory {
    stored: Vec<StateVector>,
}

impl QuantumMemory {
    pub fn new(stored: Vec<StateVector>) -> Result<Self> {
        if stored.is_empty() {
            return Err(Error::InvalidArgument(
                "quantum memory needs at least 1 word".into(),
            ));
        }
        if let Some(s) = stored.iter().find(|s| s.n_qubits() != 1) {
            return Err(Error::InvalidArgument(format!(
                "quantum words must be single qubits, got {} qubits",
                s.n_qubits()
            )));
        }
        Ok(QuantumMemory { stored })
    }

    /// Store classical bits as `|0>` / `|1>` word states.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let stored = bits
            .iter()
            .map(|&b| {
                if b > 1 {
                    return Err(Error::InvalidArgument(format!("bit must be 0 or 1, got {b}")));
                }
                StateVector::basis(1, b as usize)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(stored)
    }

    pub fn len(&self) -> usize {
        self.stored.len()
    }

    pub fn is_empty(&self) -> bool {
        false // m >= 1 by construction
    }

    pub fn word(&self, i: usize) -> Result<&StateVector> {
        self.stored.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.stored.len(),
        })
    }

    pub fn words(&self) -> &[StateVector] {
        &self.stored
    }

    pub(crate) fn words_mut(&mut self) -> &mut [StateVector] {
        &mut self.stored
    }

    /// Qubits an index register must have: `ceil(log2 m)`, at least 1.
    pub fn index_qubits(&self) -> usize {
        let m = self.stored.len();
        (usize::BITS - (m - 1).leading_zeros()).max(1) as usize
    }
}

/// Superposed read: `sum_i alpha_i |i>_index (x) |psi_i>_word`, renormalized.
/// Index components beyond the last word address an implicit `|0>` word, so
/// non-power-of-two memories still read cleanly.
pub fn quantum_memory_read(qmem: &QuantumMemory, index: &StateVector) -> Result<StateVector> {
    let nq = qmem.index_qubits();
    if index.n_qubits() != nq {
        return Err(Error::DimensionMismatch {
            expected: 1 << nq,
            got: index.dim(),
        });
    }
    if nq + 1 > MAX_QUBITS {
        return Err(Error::RegisterLimit {
            requested: nq + 1,
            max: MAX_QUBITS,
        });
    }
    let zero = StateVector::basis(1, 0)?;
    let mut amps = vec![num_complex::Complex64::ZERO; index.dim() * 2];
    for (i, alpha) in index.amplitudes().iter().enumerate() {
        if alpha.norm_sqr() == 0.0 {
            continue;
        }
        let word = qmem.stored.get(i).unwrap_or(&zero);
        for (b, w) in word.amplitudes().iter().enumerate() {
            amps[i * 2 + b] = alpha * w;
        }
    }
    let mut out = StateVector::from_amplitudes(amps)?;
    out.renormalize();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::amplitude_encode;
    use approx::assert_abs_diff_eq;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn words_must_fit_their_width() {
        assert!(ClassicalMemory::new(8, vec![0xff]).is_ok());
        assert!(ClassicalMemory::new(8, vec![0x100]).is_err());
        assert!(ClassicalMemory::new(0, vec![0]).is_err());
        assert!(ClassicalMemory::new(65, vec![0]).is_err());
        assert!(ClassicalMemory::new(32, vec![]).is_err());
        assert!(ClassicalMemory::new(64, vec![u64::MAX]).is_ok());
    }

    #[test]
    fn read_is_bounds_checked() {
        let mem = ClassicalMemory::new(16, vec![7, 11]).unwrap();
        assert_eq!(read(&mem, 0).unwrap(), 7);
        assert_eq!(read(&mem, 1).unwrap(), 11);
        assert!(matches!(
            read(&mem, 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn gen_is_deterministic() {
        let nonce = Checksum::from_bytes(vec![0xab; 16]).unwrap();
        let a = gen(&nonce, &[1, 0], 1024).unwrap();
        let b = gen(&nonce, &[1, 0], 1024).unwrap();
        assert_eq!(a, b);
        let c = gen(&nonce, &[0, 0], 1024).unwrap();
        assert_ne!(a.1, c.1, "different chained bits should move the address");
    }

    #[test]
    fn gen_single_bit_flip_changes_address() {
        // Different address in all but ~m^-1 of trials.
        let mut rng = SimRng::from_seed(101);
        let m = 1024;
        let mut collisions = 0u32;
        for _ in 0..1000 {
            let nonce = Checksum::random(128, &mut rng).unwrap();
            let mut flipped = nonce.as_bytes().to_vec();
            let bit = rng.index(128);
            flipped[bit / 8] ^= 1 << (bit % 8);
            let flipped = Checksum::from_bytes(flipped).unwrap();
            let (_, a0) = gen(&nonce, &[], m).unwrap();
            let (_, a1) = gen(&flipped, &[], m).unwrap();
            if a0 == a1 {
                collisions += 1;
            }
        }
        // 2/m of 1000 trials allows at most 1 chance collision.
        assert!(collisions <= 1, "saw {collisions} address collisions");
    }

    #[test]
    fn gen_addresses_are_uniform() {
        let mut rng = SimRng::from_seed(102);
        let m = 256usize;
        let mut counts = vec![0u64; m];
        let mut nonce = Checksum::random(128, &mut rng).unwrap();
        for _ in 0..100_000 {
            let (next, addr) = gen(&nonce, &[], m).unwrap();
            counts[addr] += 1;
            nonce = next;
        }
        let chi2 = crate::stats::chi_squared_uniform(&counts);
        let crit = ChiSquared::new((m - 1) as f64).unwrap().inverse_cdf(0.999);
        assert!(chi2 < crit, "chi^2 {chi2} exceeds {crit} at p = 0.001");
    }

    #[test]
    fn gen_nonce_stream_has_no_short_cycle() {
        let mut nonce = Checksum::zero(128).unwrap();
        let mut seen = std::collections::HashSet::new();
        for _ in 0..10_000 {
            assert!(seen.insert(nonce.clone()), "nonce cycle detected");
            nonce = gen(&nonce, &[], 16).unwrap().0;
        }
    }

    #[test]
    fn chk_is_deterministic_and_rot_sensitive() {
        let prev = Checksum::zero(128).unwrap();
        assert_eq!(
            chk(&prev, 42, (1, 0)).unwrap(),
            chk(&prev, 42, (1, 0)).unwrap()
        );
        let mut rng = SimRng::from_seed(103);
        for _ in 0..1000 {
            let prev = Checksum::random(128, &mut rng).unwrap();
            let word = rng.u64();
            let outs = [
                chk(&prev, word, (0, 0)).unwrap(),
                chk(&prev, word, (0, 1)).unwrap(),
                chk(&prev, word, (1, 0)).unwrap(),
                chk(&prev, word, (1, 1)).unwrap(),
            ];
            for i in 0..4 {
                for j in i + 1..4 {
                    assert_ne!(outs[i], outs[j], "rotation bits collided");
                }
            }
        }
        assert!(chk(&prev, 0, (2, 0)).is_err());
    }

    /// Frozen reference chain: 8 fixed words, zero nonce and checksum, four
    /// gen/read/chk steps. Recorded once from this implementation; any change
    /// to the hashing layout must show up here.
    #[test]
    fn checksum_chain_golden_value() {
        let mem = ClassicalMemory::new(
            32,
            vec![
                0x00000000, 0x11111111, 0x22222222, 0x33333333, 0x44444444, 0x55555555, 0x66666666,
                0x77777777,
            ],
        )
        .unwrap();
        let mut nonce = Checksum::zero(128).unwrap();
        let mut sum = Checksum::zero(128).unwrap();
        for _ in 0..4 {
            let (next, addr) = gen(&nonce, &[1, 0], mem.len()).unwrap();
            nonce = next;
            sum = chk(&sum, read(&mem, addr).unwrap(), (0, 1)).unwrap();
        }
        assert_eq!(sum.to_hex(), "904424a656959b5be62ee12caee55cb1");
    }

    #[test]
    fn identical_parties_agree_bit_for_bit() {
        let mut rng = SimRng::from_seed(104);
        let mem = ClassicalMemory::random(32, 64, &mut rng).unwrap();
        let run = |mem: &ClassicalMemory| -> Checksum {
            let mut nonce = Checksum::from_bytes(vec![5; 16]).unwrap();
            let mut sum = Checksum::from_bytes(vec![9; 16]).unwrap();
            for step in 0..256u32 {
                let bits = [(step & 1) as u8, ((step >> 1) & 1) as u8];
                let (next, addr) = gen(&nonce, &bits, mem.len()).unwrap();
                nonce = next;
                sum = chk(&sum, read(mem, addr).unwrap(), (bits[0], bits[1])).unwrap();
            }
            sum
        };
        assert_eq!(run(&mem), run(&mem.clone()));
    }

    #[test]
    fn visited_bit_flip_always_changes_final_checksum() {
        let mut rng = SimRng::from_seed(105);
        let chain = |mem: &ClassicalMemory, seed: &Checksum| -> (Checksum, Vec<Address>) {
            let mut nonce = seed.clone();
            let mut sum = Checksum::zero(128).unwrap();
            let mut visited = Vec::new();
            for _ in 0..32 {
                let (next, addr) = gen(&nonce, &[], mem.len()).unwrap();
                nonce = next;
                visited.push(addr);
                sum = chk(&sum, read(mem, addr).unwrap(), (0, 0)).unwrap();
            }
            (sum, visited)
        };
        for _ in 0..1000 {
            let mut mem = ClassicalMemory::random(32, 16, &mut rng).unwrap();
            let seed = Checksum::random(128, &mut rng).unwrap();
            let (clean, visited) = chain(&mem, &seed);
            let word = visited[rng.index(visited.len())];
            let bit = word * 32 + rng.index(32);
            mem.flip_bit(bit).unwrap();
            let (dirty, _) = chain(&mem, &seed);
            assert_ne!(clean, dirty, "flip of a visited bit went undetected");
        }
    }

    #[test]
    fn address_coverage_matches_coupon_collector() {
        // N = m ln m draws leave about one word unvisited on average.
        let m = 256usize;
        let n = (m as f64 * (m as f64).ln()).ceil() as usize;
        let mut rng = SimRng::from_seed(106);
        let mut total_unvisited = 0usize;
        let reps = 50;
        for _ in 0..reps {
            let mut seen = vec![false; m];
            let mut nonce = Checksum::random(128, &mut rng).unwrap();
            for _ in 0..n {
                let (next, addr) = gen(&nonce, &[], m).unwrap();
                nonce = next;
                seen[addr] = true;
            }
            total_unvisited += seen.iter().filter(|&&s| !s).count();
        }
        let mean = total_unvisited as f64 / reps as f64;
        assert!(
            (0.2..=2.5).contains(&mean),
            "mean unvisited words {mean}, expected about 1"
        );
    }

    #[test]
    fn angle_encoding_boundaries() {
        let zero = Checksum::zero(128).unwrap();
        assert_eq!(checksum_to_angle(&zero), 0.0);
        let ones = Checksum::from_bytes(vec![0xff; 16]).unwrap();
        let theta = checksum_to_angle(&ones);
        let pi = std::f64::consts::PI;
        // Top of range sits one quantization step below pi, give or take the
        // final rounding of the product.
        assert!(theta < pi);
        assert!(pi - theta <= pi / (1u64 << 52) as f64 + pi * f64::EPSILON);
    }

    #[test]
    fn angles_stay_in_range_and_equal_checksums_give_equal_states() {
        let mut rng = SimRng::from_seed(107);
        for _ in 0..1000 {
            let c = Checksum::random(128, &mut rng).unwrap();
            let theta = checksum_to_angle(&c);
            assert!((0.0..=std::f64::consts::PI).contains(&theta));
            assert_eq!(theta.to_bits(), checksum_to_angle(&c.clone()).to_bits());
        }
    }

    #[test]
    fn memory_image_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mem.qmem");
        let mut rng = SimRng::from_seed(108);
        for word_bits in [8u16, 12, 32, 64] {
            let mem = ClassicalMemory::random(word_bits, 33, &mut rng).unwrap();
            mem.write_image(&path).unwrap();
            let back = ClassicalMemory::read_image(&path).unwrap();
            assert_eq!(mem, back);
        }
    }

    #[test]
    fn corrupt_image_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.qmem");
        std::fs::write(&path, b"NOPE").unwrap();
        assert!(ClassicalMemory::read_image(&path).is_err());
    }

    #[test]
    fn basis_index_reads_the_exact_word() {
        let words = vec![
            StateVector::basis(1, 0).unwrap(),
            StateVector::basis(1, 1).unwrap(),
            amplitude_encode(&[0.6, 0.8]).unwrap(),
        ];
        let qmem = QuantumMemory::new(words.clone()).unwrap();
        assert_eq!(qmem.index_qubits(), 2);
        for (i, w) in words.iter().enumerate() {
            let index = StateVector::basis(2, i).unwrap();
            let out = quantum_memory_read(&qmem, &index).unwrap();
            let expected = index.tensor(w).unwrap();
            assert!(out.fidelity(&expected).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn uniform_index_over_two_bit_words_gives_a_bell_state() {
        let qmem = QuantumMemory::from_bits(&[0, 1]).unwrap();
        let index = amplitude_encode(&[1.0, 1.0]).unwrap();
        let out = quantum_memory_read(&qmem, &index).unwrap();
        let bell = crate::qsim::BellOutcome::PhiPlus.state();
        assert!(out.fidelity(&bell).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn superposed_reads_stay_normalized() {
        let mut rng = SimRng::from_seed(109);
        for _ in 0..20 {
            let m = 2 + rng.index(7); // 2..=8 words
            let words = (0..m)
                .map(|_| crate::qsim::random_state(1, &mut rng).unwrap())
                .collect();
            let qmem = QuantumMemory::new(words).unwrap();
            let index = crate::qsim::random_state(qmem.index_qubits(), &mut rng).unwrap();
            let out = quantum_memory_read(&qmem, &index).unwrap();
            assert_abs_diff_eq!(out.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn index_width_is_checked() {
        let qmem = QuantumMemory::from_bits(&[0, 1, 1]).unwrap();
        let narrow = StateVector::basis(1, 0).unwrap();
        assert!(matches!(
            quantum_memory_read(&qmem, &narrow),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn checksum_xor_mixes_seeds() {
        let a = Checksum::from_bytes(vec![0b1010_1010; 16]).unwrap();
        let b = Checksum::from_bytes(vec![0b0110_0110; 16]).unwrap();
        assert_eq!(a.xor(&b).unwrap().as_bytes(), &[0b1100_1100; 16][..]);
        let short = Checksum::zero(64).unwrap();
        assert!(a.xor(&short).is_err());
    }
}
