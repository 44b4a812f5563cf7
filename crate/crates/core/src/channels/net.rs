//! Discrete-event timing model for classical and quantum transmissions.
//!
//! One logical clock (seconds, `f64`) covers the whole run. Sending never
//! blocks; it just computes when the message lands:
//! `arrives_at = sent_at + distance / signal_speed + processing_delay`.
//! Relayed sends sum the leg distances and pay the processing delay once at
//! delivery (relays are passive taps), so a man-in-the-middle at extra
//! one-way distance `x` inflates every round trip by exactly `2x/c`.

use serde::{Deserialize, Serialize};

use super::PairHandle;
use crate::error::{Error, Result};

/// A named party at a fixed position on a line (meters). Positions rather
/// than a distance table keep triangle inequality violations unrepresentable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Endpoint {
    pub name: String,
    pub position_m: f64,
}

/// Static description of the network: signal speed, per-hop processing
/// delay, and the set of endpoints.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub signal_speed_m_s: f64,
    pub processing_delay_s: f64,
    pub endpoints: Vec<Endpoint>,
}

impl NetworkConfig {
    pub fn new(signal_speed_m_s: f64, processing_delay_s: f64) -> Result<Self> {
        if !signal_speed_m_s.is_finite() || signal_speed_m_s <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "signal speed must be positive, got {signal_speed_m_s}"
            )));
        }
        if !processing_delay_s.is_finite() || processing_delay_s < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "processing delay must be nonnegative, got {processing_delay_s}"
            )));
        }
        Ok(NetworkConfig {
            signal_speed_m_s,
            processing_delay_s,
            endpoints: Vec::new(),
        })
    }

    pub fn with_endpoint(mut self, name: &str, position_m: f64) -> Result<Self> {
        if !position_m.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "endpoint {name} has non-finite position"
            )));
        }
        if self.endpoints.iter().any(|e| e.name == name) {
            return Err(Error::InvalidArgument(format!(
                "duplicate endpoint name {name}"
            )));
        }
        self.endpoints.push(Endpoint {
            name: name.to_string(),
            position_m,
        });
        Ok(self)
    }

    pub fn endpoint(&self, name: &str) -> Result<&Endpoint> {
        self.endpoints
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::UnknownEndpoint(name.to_string()))
    }

    pub fn distance(&self, a: &str, b: &str) -> Result<f64> {
        Ok((self.endpoint(a)?.position_m - self.endpoint(b)?.position_m).abs())
    }

    /// One-way light time plus processing for a direct send.
    pub fn latency(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.distance(a, b)? / self.signal_speed_m_s + self.processing_delay_s)
    }
}

/// What travels over a link: classical bytes, or custody of one half of an
/// entangled pair (the state itself stays in the [`super::BellPairStore`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Classical(Vec<u8>),
    Quantum(PairHandle),
}

/// A sent message with its full timing record.
#[derive(Debug, Clone)]
pub struct TimedMessage {
    pub payload: Payload,
    pub from: String,
    pub to: String,
    pub sent_at: f64,
    pub arrives_at: f64,
}

/// Direct transmission at time `clock`.
pub fn timed_send(
    payload: Payload,
    from: &str,
    to: &str,
    clock: f64,
    net: &NetworkConfig,
) -> Result<TimedMessage> {
    timed_send_via(payload, &[from, to], clock, net)
}

/// Transmission relayed through every endpoint on `route` in order. Each leg
/// adds its light time; the processing delay is paid once, at delivery.
pub fn timed_send_via(
    payload: Payload,
    route: &[&str],
    clock: f64,
    net: &NetworkConfig,
) -> Result<TimedMessage> {
    if route.len() < 2 {
        return Err(Error::InvalidArgument(
            "route needs at least a sender and a receiver".into(),
        ));
    }
    let mut arrives_at = clock + net.processing_delay_s;
    for leg in route.windows(2) {
        arrives_at += net.distance(leg[0], leg[1])? / net.signal_speed_m_s;
    }
    Ok(TimedMessage {
        payload,
        from: route[0].to_string(),
        to: route[route.len() - 1].to_string(),
        sent_at: clock,
        arrives_at,
    })
}
