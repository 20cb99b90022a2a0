//! Messages, transcripts and run reports shared by both algorithms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::encoding::{NodeData, Share, SharingParams};
use crate::field::FieldElement;
use crate::graph::DEALER;
use crate::units::Units;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    DealerData,
    Relay,
    FallbackChunk,
}

impl MessageKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MessageKind::DealerData => "dealer_data",
            MessageKind::Relay => "relay",
            MessageKind::FallbackChunk => "fallback_chunk",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Message {
    pub tick: u64,
    pub src: usize,
    pub dst: usize,
    pub payload: Vec<FieldElement>,
    pub kind: MessageKind,
}

fn node_token(v: usize) -> String {
    if v == DEALER {
        "D".into()
    } else {
        v.to_string()
    }
}

/// CSV with header `tick,src,dst,payload_len,kind`.
pub fn transcript_csv(messages: &[Message]) -> String {
    let mut out = String::from("tick,src,dst,payload_len,kind\n");
    for m in messages {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            m.tick,
            node_token(m.src),
            node_token(m.dst),
            m.payload.len(),
            m.kind.as_str()
        );
    }
    out
}

/// Exact sum of small fractions without a bignum per addition.
#[derive(Debug, Clone, Default)]
pub(crate) struct Tally {
    whole: u64,
    frac: BTreeMap<u64, u64>,
}

impl Tally {
    pub(crate) fn add(&mut self, num: u64, den: u64) {
        if den == 1 {
            self.whole += num;
        } else {
            *self.frac.entry(den).or_default() += num;
        }
    }

    pub(crate) fn to_rational(&self) -> BigRational {
        let mut acc = BigRational::from_integer(BigInt::from(self.whole));
        for (&den, &num) in &self.frac {
            acc += BigRational::new(BigInt::from(num), BigInt::from(den));
        }
        acc
    }

    pub(crate) fn merge(&mut self, other: &Tally) {
        self.whole += other.whole;
        for (&den, &num) in &other.frac {
            *self.frac.entry(den).or_default() += num;
        }
    }
}

/// Accumulates traffic for one run.
#[derive(Debug, Clone)]
pub(crate) struct Recorder {
    pub transcript: Vec<Message>,
    pub field_elements: u64,
    pub ideal: Tally,
    pub download: Vec<Tally>,
    pub control: u64,
}

impl Recorder {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            transcript: Vec::new(),
            field_elements: 0,
            ideal: Tally::default(),
            download: vec![Tally::default(); n + 1],
            control: 0,
        }
    }

    /// Logs a message whose idealised size is `num/den` field elements.
    pub(crate) fn send(
        &mut self,
        tick: u64,
        src: usize,
        dst: usize,
        payload: Vec<FieldElement>,
        kind: MessageKind,
        (num, den): (u64, u64),
    ) {
        self.field_elements += payload.len() as u64;
        self.ideal.add(num, den);
        self.download[dst].add(num, den);
        self.transcript.push(Message {
            tick,
            src,
            dst,
            payload,
            kind,
        });
    }
}

/// A single fallback intervention.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FallbackAction {
    pub strategy: String,
    /// Node being served.
    pub target: usize,
    /// Node whose relay value was supplied, if any.
    pub supplier: Option<usize>,
    /// Node that originated the secure transmission.
    pub source: usize,
    pub paths: Vec<Vec<usize>>,
    pub field_elements: u64,
    pub units: Units,
    pub randomness_draws: usize,
    pub unservable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub algorithm: String,
    pub params: SharingParams,
    pub seed: Option<u64>,
    pub graph_digest: String,
    pub secret_len: usize,
    pub total_field_elements: u64,
    /// Idealised traffic divided by the secret size.
    pub total_units: Units,
    /// Integral traffic divided by the secret size.
    pub integral_units: Units,
    pub per_node_download: BTreeMap<usize, Units>,
    pub randomness_draws: usize,
    pub randomness_units: Units,
    pub delivered: BTreeSet<usize>,
    pub stalled: BTreeSet<usize>,
    /// Nodes that computed a share different from the dealer's.
    pub mismatched: BTreeSet<usize>,
    pub adversaries: BTreeSet<usize>,
    pub control_messages: u64,
    pub fallback_log: Vec<FallbackAction>,
    pub fallback_cost_units: Units,
}

impl RunReport {
    pub fn all_delivered(&self) -> bool {
        self.stalled.is_empty()
    }

    /// Honest participants that ended with the correct share.
    pub fn honest_delivered(&self) -> bool {
        self.stalled.iter().all(|v| self.adversaries.contains(v))
    }
}

/// Everything a run produced, including the data each node computed.
#[derive(Debug, Clone)]
pub struct Run {
    pub report: RunReport,
    pub transcript: Vec<Message>,
    pub node_data: BTreeMap<usize, NodeData>,
    pub shares: BTreeMap<usize, Share>,
}

pub(crate) fn units_of(t: &Tally, secret_len: usize) -> Units {
    Units::Finite(t.to_rational() / BigRational::from_integer(BigInt::from(secret_len)))
}

pub(crate) fn count_units(count: u64, secret_len: usize) -> Units {
    Units::Finite(BigRational::new(BigInt::from(count), BigInt::from(secret_len)))
}

pub(crate) fn zero_units() -> Units {
    Units::Finite(BigRational::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    #[test]
    fn tally_sums_exactly() {
        let mut t = Tally::default();
        for den in 1..=300u64 {
            t.add(1, den);
        }
        let mut expect = BigRational::zero();
        for den in 1..=300u64 {
            expect += BigRational::new(1.into(), den.into());
        }
        assert_eq!(t.to_rational(), expect);
    }

    #[test]
    fn csv_format() {
        let f = FieldSpec::new(7).unwrap();
        let mut r = Recorder::new(3);
        r.send(0, DEALER, 1, vec![f.one(), f.zero()], MessageKind::DealerData, (2, 1));
        r.send(1, 1, 3, vec![f.one()], MessageKind::Relay, (1, 1));
        assert_eq!(
            transcript_csv(&r.transcript),
            "tick,src,dst,payload_len,kind\n0,D,1,2,dealer_data\n1,1,3,1,relay\n"
        );
        assert_eq!(r.field_elements, 3);
        assert_eq!(units_of(&r.download[3], 1), Units::int(1));
    }
}
