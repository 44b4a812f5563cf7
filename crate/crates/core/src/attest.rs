//! The timed attestation protocol: a proximity (setup) phase followed by K
//! challenge rounds. Each round superdense-codes two challenge bits to the
//! prover, who drives an N-step gen/read/chk chain over its memory,
//! angle-encodes the final checksum, and teleports the response qubit back.
//! The verifier checks two things per round: the round-trip time against
//! `Delta + delta/c`, and the response qubit against its own reference
//! checksum via inverse rotation and measurement.
//!
//! Chain state is threaded across rounds (`m[i+1][0] = m[i][N]`,
//! `n[i+1][0] = n[i][N]`, and each chk step folds in the previous round's
//! teleport rotation bits), so a prover cannot answer round i without having
//! answered rounds 1..i-1 against the same memory.
//!
//! Round index 0 names the proximity phase in verdicts and records.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::{
    make_bell_pair, superdense_decode, superdense_encode, teleport_receive, teleport_send,
    timed_send_via, BellPairStore, NetworkConfig, Payload,
};
use crate::error::{Error, Result};
use crate::memory::{checksum_to_angle, chk, gen, read, Checksum, ClassicalMemory, Nonce};
use crate::qsim::{measure_computational, BellOutcome, Gate, StateVector};
use crate::rng::SimRng;

/// All scalar knobs of one protocol instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Nonce and checksum length in bits.
    pub lambda_bits: usize,
    /// Number of challenge rounds, K.
    pub rounds: usize,
    /// Checksum-chain steps per round, N.
    pub chain_steps: usize,
    /// Honest prover compute time per chain step (seconds).
    pub per_step_compute_s: f64,
    /// Allowed processing time Delta (seconds).
    pub allowed_compute_s: f64,
    /// Allowed prover distance delta (meters).
    pub max_distance_m: f64,
    /// Signal speed c the verifier assumes (meters/second).
    pub signal_speed_m_s: f64,
    /// Clock-comparison slack added to the proximity threshold (seconds).
    pub clock_slack_s: f64,
}

impl ProtocolParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        lambda_bits: usize,
        rounds: usize,
        chain_steps: usize,
        per_step_compute_s: f64,
        allowed_compute_s: f64,
        max_distance_m: f64,
        signal_speed_m_s: f64,
        clock_slack_s: f64,
    ) -> Result<Self> {
        Checksum::zero(lambda_bits)?;
        if lambda_bits < 64 {
            return Err(Error::InvalidArgument(format!(
                "lambda of {lambda_bits} bits leaves the angle encoding underfed"
            )));
        }
        if rounds == 0 || chain_steps == 0 {
            return Err(Error::InvalidArgument(
                "rounds and chain steps must both be at least 1".into(),
            ));
        }
        if !per_step_compute_s.is_finite() || per_step_compute_s <= 0.0 {
            return Err(Error::InvalidArgument(
                "per-step compute time must be positive".into(),
            ));
        }
        let honest = chain_steps as f64 * per_step_compute_s;
        if allowed_compute_s < honest {
            return Err(Error::InvalidArgument(format!(
                "allowed compute {allowed_compute_s}s is below the honest chain time {honest}s"
            )));
        }
        let geometry_ok = max_distance_m.is_finite()
            && max_distance_m > 0.0
            && signal_speed_m_s.is_finite()
            && signal_speed_m_s > 0.0
            && clock_slack_s.is_finite()
            && clock_slack_s >= 0.0;
        if !geometry_ok {
            return Err(Error::InvalidArgument(
                "distance and speed must be positive, slack nonnegative".into(),
            ));
        }
        Ok(ProtocolParams {
            lambda_bits,
            rounds,
            chain_steps,
            per_step_compute_s,
            allowed_compute_s,
            max_distance_m,
            signal_speed_m_s,
            clock_slack_s,
        })
    }

    /// Reference configuration: lambda 128, K = 8, N = 256, 100ns per chain
    /// step, Delta at 10% over the honest chain time, 300m bound, vacuum
    /// light speed, 1ns clock slack.
    pub fn standard() -> Self {
        let chain_steps = 256;
        let per_step = 1.0e-7;
        ProtocolParams::new(
            128,
            8,
            chain_steps,
            per_step,
            1.1 * chain_steps as f64 * per_step,
            300.0,
            3.0e8,
            1.0e-9,
        )
        .expect("reference parameters are valid")
    }

    /// Per-round abort threshold on `t' - t`.
    pub fn round_threshold(&self) -> f64 {
        self.allowed_compute_s + self.max_distance_m / self.signal_speed_m_s
    }

    /// Proximity threshold: channel speed only, no compute allowance.
    pub fn proximity_threshold(&self) -> f64 {
        2.0 * self.max_distance_m / self.signal_speed_m_s + self.clock_slack_s
    }

    /// Bell pairs one full run consumes: one teleport for proximity, then a
    /// superdense plus a teleport pair per round.
    pub fn required_pairs(&self) -> usize {
        2 * self.rounds + 1
    }
}

/// Final protocol outcome. `round: 0` is the proximity phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Accept,
    AbortTiming { round: usize },
    AbortChecksum { round: usize },
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// Timing and measurement record of the proximity phase.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProximityRecord {
    pub sent_at: f64,
    pub received_at: f64,
    pub rtt: f64,
    pub threshold: f64,
    pub rotation_bits: (u8, u8),
    pub measured: u8,
}

/// One challenge round as the verifier saw it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub challenge_bits: (u8, u8),
    pub sent_at: f64,
    pub received_at: f64,
    pub rotation_bits: (u8, u8),
    pub measured: u8,
    /// Verifier-side reference checksum for this round, hex.
    pub verifier_checksum: String,
}

/// Full run record: proximity phase, every round, final verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Transcript {
    pub proximity: ProximityRecord,
    pub rounds: Vec<RoundRecord>,
    pub verdict: Verdict,
}

impl Transcript {
    /// Line-oriented JSON: proximity record, one line per round, verdict.
    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        use std::io::Write as _;
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "{}", serde_json::to_string(&self.proximity)?)?;
        for r in &self.rounds {
            writeln!(f, "{}", serde_json::to_string(r)?)?;
        }
        writeln!(f, "{}", serde_json::to_string(&self.verdict)?)?;
        Ok(())
    }
}

/// The prover as the protocol sees it: a memory, a registered (near-side)
/// endpoint, optionally a distinct endpoint doing the round computation
/// (an outsourcing colluder), and an optional wrong proximity value for
/// dishonest-setup tests.
#[derive(Debug, Clone)]
pub struct ProverActor {
    pub mem: ClassicalMemory,
    pub endpoint: String,
    pub compute_endpoint: Option<String>,
    pub proximity_override: Option<Checksum>,
}

impl ProverActor {
    pub fn honest(mem: ClassicalMemory, endpoint: &str) -> Self {
        ProverActor {
            mem,
            endpoint: endpoint.to_string(),
            compute_endpoint: None,
            proximity_override: None,
        }
    }

    /// Round-trip route for challenge-round traffic, verifier first.
    fn round_route<'a>(&'a self, verifier: &'a str) -> Vec<&'a str> {
        match &self.compute_endpoint {
            Some(c) if *c != self.endpoint => vec![verifier, self.endpoint.as_str(), c.as_str()],
            _ => vec![verifier, self.endpoint.as_str()],
        }
    }
}

/// Angle-encode a checksum: `Ry(theta)|1> = sin(theta/2)|0> + cos(theta/2)|1>`.
pub fn angle_response(checksum: &Checksum) -> Result<StateVector> {
    angle_state(checksum_to_angle(checksum))
}

/// The response qubit for a raw angle.
pub fn angle_state(theta: f64) -> Result<StateVector> {
    StateVector::basis(1, 1)?.with_gate(Gate::Ry(theta), &[0])
}

/// Verifier-side check of a teleported response: apply the teleport
/// correction for `rotation_bits`, inverse-rotate by the angle of
/// `expected`, measure. Returns the measured bit; 1 means consistent,
/// 0 means the memory (or the response) is compromised.
pub fn verify_response_qubit(
    store: &mut BellPairStore,
    pair: crate::channels::PairHandle,
    rotation_bits: BellOutcome,
    expected: &Checksum,
    rng: &mut SimRng,
) -> Result<u8> {
    verify_response_angle(store, pair, rotation_bits, checksum_to_angle(expected), rng)
}

/// [`verify_response_qubit`] with the expected angle given directly.
pub fn verify_response_angle(
    store: &mut BellPairStore,
    pair: crate::channels::PairHandle,
    rotation_bits: BellOutcome,
    theta_expected: f64,
    rng: &mut SimRng,
) -> Result<u8> {
    let mut qubit = teleport_receive(store, pair, rotation_bits)?;
    qubit.apply_gate(Gate::Ry(-theta_expected), &[0])?;
    let (bits, _) = measure_computational(&qubit, &[0], rng)?;
    Ok(bits[0])
}

/// One response-verify exchange in isolation (no clocks, fresh pair):
/// the prover teleports `Ry(theta_prover)|1>`, the verifier corrects and
/// inverse-rotates by `theta_expected`. Acceptance probability is
/// `cos^2((theta_prover - theta_expected)/2)`.
pub fn single_exchange(theta_prover: f64, theta_expected: f64, rng: &mut SimRng) -> Result<u8> {
    let mut store = BellPairStore::unbounded();
    let pair = make_bell_pair(&mut store)?;
    let bits = teleport_send(&mut store, angle_state(theta_prover)?, pair, rng)?;
    verify_response_angle(&mut store, pair, bits, theta_expected, rng)
}

/// Per-party chain state carried across rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ChainState {
    nonce: Nonce,
    checksum: Checksum,
    rot_bits: (u8, u8),
}

impl ChainState {
    /// Advance by one round: N gen/read/chk steps with the round's challenge
    /// bits folded into every address draw.
    fn advance(
        &mut self,
        mem: &ClassicalMemory,
        challenge: (u8, u8),
        steps: usize,
    ) -> Result<()> {
        for _ in 0..steps {
            let (next, addr) = gen(&self.nonce, &[challenge.0, challenge.1], mem.len())?;
            self.nonce = next;
            self.checksum = chk(&self.checksum, read(mem, addr)?, self.rot_bits)?;
        }
        Ok(())
    }
}

/// Everything both parties share after the proximity phase.
#[derive(Debug, Clone)]
pub struct SessionState {
    clock: f64,
    verifier_chain: ChainState,
    prover_chain: ChainState,
}

impl SessionState {
    pub fn clock(&self) -> f64 {
        self.clock
    }
}

/// Setup and proximity phase. The verifier draws the initial nonce and
/// checksum, sends them in the clear, and times a reflected angle-encoded
/// teleport of the checksum against the pure channel bound `2 delta / c`.
/// Returns the record plus the session state seeding round 1.
pub fn run_setup_proximity(
    prover: &ProverActor,
    params: &ProtocolParams,
    net: &NetworkConfig,
    store: &mut BellPairStore,
    rng: &mut SimRng,
) -> Result<(ProximityRecord, SessionState)> {
    let verifier = "verifier";
    net.endpoint(verifier)?;
    net.endpoint(&prover.endpoint)?;

    let n0: Nonce = Checksum::random(params.lambda_bits, rng)?;
    let m0 = Checksum::random(params.lambda_bits, rng)?;

    // t0: classical (n0, m0) leave the verifier. The reflection is answered
    // at the registered endpoint; it needs no memory, only the cleartext m0.
    let sent_at = 0.0;
    let mut payload = n0.as_bytes().to_vec();
    payload.extend_from_slice(m0.as_bytes());
    let to_prover = timed_send_via(
        Payload::Classical(payload),
        &[verifier, &prover.endpoint],
        sent_at,
        net,
    )?;

    let reflected = prover.proximity_override.as_ref().unwrap_or(&m0);
    let pair = make_bell_pair(store)?;
    let rot = teleport_send(store, angle_response(reflected)?, pair, rng)?;
    let back = timed_send_via(
        Payload::Classical(vec![rot.bits().0, rot.bits().1]),
        &[&prover.endpoint, verifier],
        to_prover.arrives_at,
        net,
    )?;
    let received_at = back.arrives_at;

    let measured = verify_response_qubit(store, pair, rot, &m0, rng)?;
    let record = ProximityRecord {
        sent_at,
        received_at,
        rtt: received_at - sent_at,
        threshold: params.proximity_threshold(),
        rotation_bits: rot.bits(),
        measured,
    };
    let chain = ChainState {
        nonce: n0,
        checksum: m0,
        rot_bits: rot.bits(),
    };
    let session = SessionState {
        clock: received_at,
        verifier_chain: chain.clone(),
        prover_chain: chain,
    };
    Ok((record, session))
}

/// One challenge round. Precondition: the proximity phase passed and
/// `session` carries its state. Both parties advance their own chains; the
/// verifier's record is returned.
#[allow(clippy::too_many_arguments)]
pub fn run_challenge_round(
    round: usize,
    prover: &ProverActor,
    verifier_mem: &ClassicalMemory,
    session: &mut SessionState,
    params: &ProtocolParams,
    net: &NetworkConfig,
    store: &mut BellPairStore,
    rng: &mut SimRng,
) -> Result<RoundRecord> {
    if verifier_mem.len() != prover.mem.len() {
        return Err(Error::DimensionMismatch {
            expected: verifier_mem.len(),
            got: prover.mem.len(),
        });
    }
    let route = prover.round_route("verifier");
    let challenge = (rng.bit(), rng.bit());

    // Verifier encodes the challenge on its half of a fresh pair and sends
    // the half off, stamping t_i.
    let pair = make_bell_pair(store)?;
    superdense_encode(store, challenge, pair)?;
    let sent_at = session.clock;
    let challenge_msg = timed_send_via(Payload::Quantum(pair), &route, sent_at, net)?;

    // Prover decodes and drives its chain; the verifier advances its own
    // reference chain with the same challenge bits.
    let decoded = superdense_decode(store, pair)?;
    session
        .prover_chain
        .advance(&prover.mem, decoded, params.chain_steps)?;
    session
        .verifier_chain
        .advance(verifier_mem, challenge, params.chain_steps)?;

    // Response: angle-encode the prover's final checksum, teleport it, send
    // the rotation bits back classically. t'_i is stamped at their arrival.
    let compute_done =
        challenge_msg.arrives_at + params.chain_steps as f64 * params.per_step_compute_s;
    let response_pair = make_bell_pair(store)?;
    let response = angle_response(&session.prover_chain.checksum)?;
    let rot = teleport_send(store, response, response_pair, rng)?;
    let back_route: Vec<&str> = route.iter().rev().copied().collect();
    let rot_msg = timed_send_via(
        Payload::Classical(vec![rot.bits().0, rot.bits().1]),
        &back_route,
        compute_done,
        net,
    )?;
    let received_at = rot_msg.arrives_at;

    let measured = verify_response_qubit(
        store,
        response_pair,
        rot,
        &session.verifier_chain.checksum,
        rng,
    )?;

    // Chaining: both sides fold the fresh rotation bits into the next round.
    session.prover_chain.rot_bits = rot.bits();
    session.verifier_chain.rot_bits = rot.bits();
    session.clock = received_at;

    Ok(RoundRecord {
        round,
        challenge_bits: challenge,
        sent_at,
        received_at,
        rotation_bits: rot.bits(),
        measured,
        verifier_checksum: session.verifier_chain.checksum.to_hex(),
    })
}

/// Full protocol: proximity phase, K rounds, then the abort scan. The scan
/// walks rounds in order and flags the first violation, timing before
/// checksum within a round; `round: 0` verdicts come from the proximity
/// phase, which gates the rounds entirely.
pub fn run_full_protocol(
    prover: &ProverActor,
    verifier_mem: &ClassicalMemory,
    params: &ProtocolParams,
    net: &NetworkConfig,
    store: &mut BellPairStore,
    rng: &mut SimRng,
) -> Result<Transcript> {
    let (proximity, mut session) = run_setup_proximity(prover, params, net, store, rng)?;
    if proximity.rtt >= proximity.threshold {
        return Ok(Transcript {
            proximity,
            rounds: Vec::new(),
            verdict: Verdict::AbortTiming { round: 0 },
        });
    }
    if proximity.measured == 0 {
        return Ok(Transcript {
            proximity,
            rounds: Vec::new(),
            verdict: Verdict::AbortChecksum { round: 0 },
        });
    }

    let mut rounds = Vec::with_capacity(params.rounds);
    for i in 1..=params.rounds {
        rounds.push(run_challenge_round(
            i,
            prover,
            verifier_mem,
            &mut session,
            params,
            net,
            store,
            rng,
        )?);
    }

    let threshold = params.round_threshold();
    let mut verdict = Verdict::Accept;
    for r in &rounds {
        if r.received_at - r.sent_at >= threshold {
            verdict = Verdict::AbortTiming { round: r.round };
            break;
        }
        if r.measured == 0 {
            verdict = Verdict::AbortChecksum { round: r.round };
            break;
        }
    }
    Ok(Transcript {
        proximity,
        rounds,
        verdict,
    })
}

/// Two-endpoint network for one verifier-prover session, prover at
/// `distance_m`.
pub fn session_network(
    distance_m: f64,
    signal_speed_m_s: f64,
    processing_delay_s: f64,
) -> Result<NetworkConfig> {
    NetworkConfig::new(signal_speed_m_s, processing_delay_s)?
        .with_endpoint("verifier", 0.0)?
        .with_endpoint("prover", distance_m)
}
