use num_complex::Complex64;

use super::state::StateVector;
use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Gate set used by the protocols. `Ry` follows the module convention
/// documented in [`crate::qsim`]: `Ry(t)|1> = sin(t/2)|0> + cos(t/2)|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H,
    X,
    Z,
    Ry(f64),
    Cnot,
}

impl Gate {
    /// 2x2 matrix for single-qubit gates, row-major.
    fn single_matrix(self) -> Option<[Complex64; 4]> {
        let r = |x: f64| Complex64::new(x, 0.0);
        match self {
            Gate::H => {
                let s = 1.0 / 2.0_f64.sqrt();
                Some([r(s), r(s), r(s), r(-s)])
            }
            Gate::X => Some([r(0.0), r(1.0), r(1.0), r(0.0)]),
            Gate::Z => Some([r(1.0), r(0.0), r(0.0), r(-1.0)]),
            Gate::Ry(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                Some([r(c), r(s), r(-s), r(c)])
            }
            Gate::Cnot => None,
        }
    }
}

impl StateVector {
    /// Apply `gate` in place. Single-qubit gates take one target; `Cnot`
    /// takes `[control, target]`.
    pub fn apply_gate(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        match gate {
            Gate::Cnot => {
                let [control, target]: [usize; 2] = targets
                    .try_into()
                    .map_err(|_| Error::InvalidArgument("Cnot takes [control, target]".into()))?;
                if control == target {
                    return Err(Error::InvalidArgument(
                        "Cnot control and target must differ".into(),
                    ));
                }
                let cm = self.qubit_mask(control)?;
                let tm = self.qubit_mask(target)?;
                let amps = self.amplitudes_mut();
                // Swap amplitudes of |c=1,t=0> and |c=1,t=1> pairs.
                for i in 0..amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        amps.swap(i, i | tm);
                    }
                }
                Ok(())
            }
            _ => {
                let [q]: [usize; 1] = targets.try_into().map_err(|_| {
                    Error::InvalidArgument("single-qubit gate takes one target".into())
                })?;
                let mask = self.qubit_mask(q)?;
                let m = gate.single_matrix().expect("single-qubit gate");
                let amps = self.amplitudes_mut();
                for i in 0..amps.len() {
                    if i & mask == 0 {
                        let j = i | mask;
                        let (a0, a1) = (amps[i], amps[j]);
                        amps[i] = m[0] * a0 + m[1] * a1;
                        amps[j] = m[2] * a0 + m[3] * a1;
                    }
                }
                Ok(())
            }
        }
    }

    /// Convenience: apply and return the state for chaining in tests.
    pub fn with_gate(mut self, gate: Gate, targets: &[usize]) -> Result<StateVector> {
        self.apply_gate(gate, targets)?;
        Ok(self)
    }
}

/// Dense unitary on a full register, row-major.
#[derive(Debug, Clone)]
pub struct UnitaryOp {
    dim: usize,
    m: Vec<Complex64>,
}

impl UnitaryOp {
    pub fn identity(dim: usize) -> Result<Self> {
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "unitary dimension {dim} must be a power of two >= 2"
            )));
        }
        let mut m = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            m[r * dim + r] = Complex64::ONE;
        }
        Ok(UnitaryOp { dim, m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row * self.dim + col]
    }

    /// `U |state>`; the operator must span the whole register.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: state.dim(),
            });
        }
        let x = state.amplitudes();
        let mut y = vec![Complex64::ZERO; self.dim];
        for (r, out) in y.iter_mut().enumerate() {
            let row = &self.m[r * self.dim..(r + 1) * self.dim];
            *out = row.iter().zip(x).map(|(u, a)| u * a).sum();
        }
        StateVector::from_amplitudes(y)
    }

    /// Max deviation of `U U^dagger` from the identity; diagnostic for tests.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                let mut s = Complex64::ZERO;
                for k in 0..d {
                    s += self.entry(r, k) * self.entry(c, k).conj();
                }
                let target = if r == c { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

/// Haar-random unitary: modified Gram-Schmidt over a complex Ginibre matrix.
/// Columns are normalized with positive real scale factors, which makes the
/// decomposition unique and the resulting Q Haar-distributed.
pub fn random_unitary(dim: usize, rng: &mut SimRng) -> Result<UnitaryOp> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "unitary dimension {dim} must be a power of two >= 2"
        )));
    }
    // Column-major scratch for Gram-Schmidt.
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex64::new(rng.normal(), rng.normal()))
                .collect()
        })
        .collect();
    for c in 0..dim {
        let (done, rest) = cols.split_at_mut(c);
        let cur = &mut rest[0];
        for prev in done.iter() {
            let proj: Complex64 = prev
                .iter()
                .zip(cur.iter())
                .map(|(p, v)| p.conj() * v)
                .sum();
            for (v, p) in cur.iter_mut().zip(prev) {
                *v -= proj * p;
            }
        }
        let norm = cur.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in cur.iter_mut() {
            *v /= norm;
        }
    }
    let mut m = vec![Complex64::ZERO; dim * dim];
    for (c, col) in cols.iter().enumerate() {
        for (r, v) in col.iter().enumerate() {
            m[r * dim + c] = *v;
        }
    }
    Ok(UnitaryOp { dim, m })
}
