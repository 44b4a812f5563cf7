//! Entangled-pair channels: shared Bell pairs with single-use semantics,
//! teleportation, and superdense coding, plus the timed classical/quantum
//! network in [`net`].
//!
//! A [`BellPairStore`] owns every pair and tracks its stage. Pairs move
//! `Shared -> (Encoded | AwaitingCorrection) -> Consumed`; any attempt to
//! reuse a stage is a protocol error, which is what turns "no cloning" into
//! an enforceable API rule.

mod net;

pub use net::{timed_send, timed_send_via, Endpoint, NetworkConfig, Payload, TimedMessage};

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::qsim::{measure_bell_remainder, BellOutcome, Gate, StateVector};
use crate::rng::SimRng;

/// Opaque handle to one entangled pair inside a [`BellPairStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct PairHandle(pub u64);

#[derive(Debug, Clone)]
enum PairSlot {
    /// Fresh Phi+ pair; qubit 0 is the sender half, qubit 1 the receiver half.
    Shared(StateVector),
    /// Superdense-encoded; the sender half is in transit.
    Encoded(StateVector),
    /// Teleport measurement done; receiver qubit waiting for its correction.
    AwaitingCorrection(StateVector),
    Consumed,
}

impl PairSlot {
    fn stage(&self) -> &'static str {
        match self {
            PairSlot::Shared(_) => "shared",
            PairSlot::Encoded(_) => "encoded",
            PairSlot::AwaitingCorrection(_) => "awaiting-correction",
            PairSlot::Consumed => "consumed",
        }
    }
}

/// Owner of all entangled pairs in a run, with an optional provisioning budget.
#[derive(Debug, Default)]
pub struct BellPairStore {
    slots: HashMap<u64, PairSlot>,
    next: u64,
    budget: Option<usize>,
    created: usize,
}

impl BellPairStore {
    pub fn unbounded() -> Self {
        Self::default()
    }

    /// Store that refuses to create more than `budget` pairs; models the
    /// pre-shared entanglement available to a protocol run.
    pub fn with_budget(budget: usize) -> Self {
        BellPairStore {
            budget: Some(budget),
            ..Self::default()
        }
    }

    pub fn created(&self) -> usize {
        self.created
    }

    /// Current joint state of a pair, for analysis and interception tests.
    pub fn pair_state(&self, pair: PairHandle) -> Option<&StateVector> {
        match self.slots.get(&pair.0)? {
            PairSlot::Shared(s) | PairSlot::Encoded(s) => Some(s),
            _ => None,
        }
    }

    fn slot_mut(&mut self, pair: PairHandle) -> Result<&mut PairSlot> {
        self.slots
            .get_mut(&pair.0)
            .ok_or(Error::UnknownPair(pair.0))
    }
}

/// Create one Phi+ pair and hand back its handle. Fails when the
/// provisioning budget is exhausted.
pub fn make_bell_pair(store: &mut BellPairStore) -> Result<PairHandle> {
    if let Some(budget) = store.budget {
        if store.created >= budget {
            return Err(Error::PairBudget {
                budget,
                used: store.created,
            });
        }
    }
    let handle = PairHandle(store.next);
    store.next += 1;
    store.created += 1;
    store
        .slots
        .insert(handle.0, PairSlot::Shared(BellOutcome::PhiPlus.state()));
    Ok(handle)
}

/// Sender side of teleportation: Bell-measure (payload, sender half) and
/// return the two rotation bits the receiver needs. Consumes the payload and
/// the sender half; the pair moves to `AwaitingCorrection`.
pub fn teleport_send(
    store: &mut BellPairStore,
    payload: StateVector,
    pair: PairHandle,
    rng: &mut SimRng,
) -> Result<BellOutcome> {
    if payload.n_qubits() != 1 {
        return Err(Error::InvalidArgument(
            "teleport payload must be a single qubit".into(),
        ));
    }
    let slot = store.slot_mut(pair)?;
    let PairSlot::Shared(pair_state) = slot else {
        return Err(match slot {
            PairSlot::Consumed | PairSlot::AwaitingCorrection(_) => Error::PairConsumed(pair.0),
            _ => Error::PairStage(pair.0, slot.stage()),
        });
    };
    // Composite order: qubit 0 payload, qubit 1 sender half, qubit 2 receiver half.
    let joint = payload.tensor(pair_state)?;
    let (outcome, receiver_qubit) = measure_bell_remainder(&joint, (0, 1), rng)?;
    *slot = PairSlot::AwaitingCorrection(receiver_qubit);
    Ok(outcome)
}

/// Receiver side: apply the correction selected by the rotation bits and
/// return the reconstructed qubit. Deliberately wrong bits are applied as
/// given (the result is then a different state). Consumes the pair.
pub fn teleport_receive(
    store: &mut BellPairStore,
    pair: PairHandle,
    bits: BellOutcome,
) -> Result<StateVector> {
    let slot = store.slot_mut(pair)?;
    let PairSlot::AwaitingCorrection(qubit) = slot else {
        return Err(match slot {
            PairSlot::Consumed => Error::PairConsumed(pair.0),
            _ => Error::PairStage(pair.0, slot.stage()),
        });
    };
    let mut out = qubit.clone();
    match bits {
        BellOutcome::PhiPlus => {}
        BellOutcome::PhiMinus => out.apply_gate(Gate::Z, &[0])?,
        BellOutcome::PsiPlus => out.apply_gate(Gate::X, &[0])?,
        BellOutcome::PsiMinus => {
            // XZ correction: Z first, then X.
            out.apply_gate(Gate::Z, &[0])?;
            out.apply_gate(Gate::X, &[0])?;
        }
    }
    *slot = PairSlot::Consumed;
    Ok(out)
}

/// Superdense send: rotate the sender half so the joint state becomes the
/// Bell state labeled by `bits`, then put the half in transit. Returns the
/// handle standing in for the transmitted qubit.
pub fn superdense_encode(
    store: &mut BellPairStore,
    bits: (u8, u8),
    pair: PairHandle,
) -> Result<PairHandle> {
    BellOutcome::from_bits(bits.0, bits.1)?;
    let slot = store.slot_mut(pair)?;
    let PairSlot::Shared(state) = slot else {
        return Err(match slot {
            PairSlot::Consumed => Error::PairConsumed(pair.0),
            _ => Error::PairStage(pair.0, slot.stage()),
        });
    };
    let mut encoded = state.clone();
    // On the sender half (qubit 0): 00 -> I, 01 -> Z, 10 -> X, 11 -> X then Z.
    if bits.0 == 1 {
        encoded.apply_gate(Gate::X, &[0])?;
    }
    if bits.1 == 1 {
        encoded.apply_gate(Gate::Z, &[0])?;
    }
    *slot = PairSlot::Encoded(encoded);
    Ok(pair)
}

/// Superdense receive: with both halves in hand, undo the encoding
/// (CNOT from the transmitted half, then H on it) and read the two bits.
/// Deterministic; consumes the pair.
pub fn superdense_decode(store: &mut BellPairStore, pair: PairHandle) -> Result<(u8, u8)> {
    let slot = store.slot_mut(pair)?;
    let PairSlot::Encoded(state) = slot else {
        return Err(match slot {
            PairSlot::Consumed => Error::PairConsumed(pair.0),
            PairSlot::Shared(_) => Error::PairStage(pair.0, "shared (missing encoded half)"),
            _ => Error::PairStage(pair.0, slot.stage()),
        });
    };
    let mut s = state.clone();
    s.apply_gate(Gate::Cnot, &[0, 1])?;
    s.apply_gate(Gate::H, &[0])?;
    // The result is a computational basis state; read it off exactly.
    let index = s
        .amplitudes()
        .iter()
        .position(|a| a.norm_sqr() > 0.5)
        .expect("superdense decode must land on a basis state");
    *slot = PairSlot::Consumed;
    // Measured (q0, q1) map back to message bits in reverse order.
    let m0 = ((index >> 1) & 1) as u8;
    let m1 = (index & 1) as u8;
    Ok((m1, m0))
}
