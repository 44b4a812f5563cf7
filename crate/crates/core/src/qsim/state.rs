use num_complex::Complex64;

use super::{MAX_QUBITS, NORM_TOL};
use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Pure state of an `n`-qubit register as a dense, normalized amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index>` on `n_qubits` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, len: dim });
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index] = Complex64::ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Build from raw amplitudes; the length must be a power of two and the
    /// vector must already be normalized to within [`NORM_TOL`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude vector length {dim} is not a power of two >= 2"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_width(n_qubits)?;
        let state = StateVector { n_qubits, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Basis-index bit mask owned by qubit `q` (qubit 0 is most significant).
    pub fn qubit_mask(&self, q: usize) -> Result<usize> {
        if q >= self.n_qubits {
            return Err(Error::IndexOutOfRange {
                index: q,
                len: self.n_qubits,
            });
        }
        Ok(1usize << (self.n_qubits - 1 - q))
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub(crate) fn renormalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// `<self|other>`; conjugate-linear in `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    /// Kronecker product `self (x) other`; `self`'s qubits become the leading ones.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n_qubits = self.n_qubits + other.n_qubits;
        check_width(n_qubits)?;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Probability of reading `1` when measuring qubit `q` alone.
    pub fn prob_one(&self, q: usize) -> Result<f64> {
        let mask = self.qubit_mask(q)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }
}

fn check_width(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::InvalidArgument("register needs at least one qubit".into()));
    }
    if n_qubits > MAX_QUBITS {
        return Err(Error::RegisterLimit {
            requested: n_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Encode a real vector as state amplitudes: zero-pad to the next power of
/// two, divide by the Euclidean norm. The all-zero vector has no encoding.
pub fn amplitude_encode(values: &[f64]) -> Result<StateVector> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("cannot encode an empty vector".into()));
    }
    let dim = values.len().next_power_of_two().max(2);
    let n_qubits = dim.trailing_zeros() as usize;
    check_width(n_qubits)?;
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut amps = vec![Complex64::ZERO; dim];
    for (i, v) in values.iter().enumerate() {
        amps[i] = Complex64::new(v / norm, 0.0);
    }
    Ok(StateVector { n_qubits, amps })
}

/// Haar-random pure state: normalized vector of iid complex Gaussians.
pub fn random_state(n_qubits: usize, rng: &mut SimRng) -> Result<StateVector> {
    check_width(n_qubits)?;
    let dim = 1usize << n_qubits;
    let mut amps = Vec::with_capacity(dim);
    for _ in 0..dim {
        amps.push(Complex64::new(rng.normal(), rng.normal()));
    }
    let mut state = StateVector { n_qubits, amps };
    state.renormalize();
    Ok(state)
}
