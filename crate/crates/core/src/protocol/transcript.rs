use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ProtocolConfig;
use crate::error::{DqsError, Result};
use crate::quantum::{Axis, SignedAxis};

const FORMAT_TAG: &str = "# dqs-transcript v1";
const COLUMNS: &str = "index,action,probe,alice_axis,alice_outcome,bob_axis,bob_outcome,sift";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BobAction {
    /// Probe left unencoded.
    Check,
    /// Phase encoded.
    Encode,
    Discard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiftStatus {
    KeptCheck,
    KeptEstimation,
    /// Measured, but the choices did not match.
    SiftedOut,
    Discarded,
}

/// A measured observable and its outcome: `±1`, or `0` when the probe was
/// found outside the logical subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub axis: Axis,
    pub outcome: i8,
}

impl Observation {
    pub fn is_leak(&self) -> bool {
        self.outcome == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub index: u64,
    pub action: BobAction,
    /// Alice's probe label (MUB variant).
    pub probe_label: Option<SignedAxis>,
    /// Alice's reference-qubit measurement (entanglement variant).
    pub alice: Option<Observation>,
    pub bob: Option<Observation>,
    pub sift: SiftStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct RoundCounts {
    /// `N_c`
    pub check: u64,
    /// `N_e`
    pub estimation: u64,
    pub discarded: u64,
    pub sifted_out: u64,
}

impl RoundCounts {
    pub fn total(&self) -> u64 {
        self.check + self.estimation + self.discarded + self.sifted_out
    }

    /// Rounds not used by either the check or the estimate, the `N_d` fed to
    /// the de Finetti term.
    pub fn unused(&self) -> u64 {
        self.discarded + self.sifted_out
    }
}

/// Every round of one execution, in round order.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub config: ProtocolConfig,
    pub records: Vec<RoundRecord>,
}

impl Transcript {
    pub fn counts(&self) -> RoundCounts {
        let mut c = RoundCounts::default();
        for r in &self.records {
            match r.sift {
                SiftStatus::KeptCheck => c.check += 1,
                SiftStatus::KeptEstimation => c.estimation += 1,
                SiftStatus::Discarded => c.discarded += 1,
                SiftStatus::SiftedOut => c.sifted_out += 1,
            }
        }
        c
    }

    pub fn kept(&self, status: SiftStatus) -> impl Iterator<Item = &RoundRecord> {
        self.records.iter().filter(move |r| r.sift == status)
    }

    /// The shortest prefix of the transcript containing `checks` kept check
    /// rounds (the whole transcript if it has fewer).
    pub fn prefix_with_checks(&self, checks: u64) -> Transcript {
        let mut seen = 0;
        let mut end = self.records.len();
        for (i, r) in self.records.iter().enumerate() {
            if r.sift == SiftStatus::KeptCheck {
                seen += 1;
                if seen == checks {
                    end = i + 1;
                    break;
                }
            }
        }
        Transcript { config: self.config.clone(), records: self.records[..end].to_vec() }
    }

    /// SHA-256 of the canonical JSON encoding of the configuration.
    pub fn config_hash(&self) -> String {
        config_hash(&self.config)
    }

    /// Line-oriented text form: header lines starting with `#`, then one
    /// CSV row per round. Check, sifted-out and discarded rounds are written
    /// first and estimation rounds last, mirroring the order in which the
    /// outcomes are disclosed during reconciliation.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(FORMAT_TAG);
        out.push('\n');
        out.push_str(&format!("# config_hash {}\n", self.config_hash()));
        out.push_str(&format!("# seed {}\n", self.config.seed));
        out.push_str(&format!("# config {}\n", canonical_json(&self.config)));
        out.push_str(&format!("# columns {COLUMNS}\n"));
        let (estimation, rest): (Vec<&RoundRecord>, Vec<&RoundRecord>) =
            self.records.iter().partition(|r| r.sift == SiftStatus::KeptEstimation);
        for r in rest.into_iter().chain(estimation) {
            out.push_str(&format_record(r));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Transcript> {
        let mut config: Option<ProtocolConfig> = None;
        let mut hash: Option<String> = None;
        let mut records = Vec::new();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, l)) if l.trim_end() == FORMAT_TAG => {}
            _ => return Err(parse_err(1, "missing format tag")),
        }
        for (i, line) in lines {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix("# ") {
                let (key, value) = header.split_once(' ').unwrap_or((header, ""));
                match key {
                    "config_hash" => hash = Some(value.to_string()),
                    "config" => {
                        config = Some(serde_json::from_str(value).map_err(|e| parse_err(line_no, &e.to_string()))?)
                    }
                    "seed" | "columns" => {}
                    other => return Err(parse_err(line_no, &format!("unknown header `{other}`"))),
                }
                continue;
            }
            records.push(parse_record(line).map_err(|reason| parse_err(line_no, &reason))?);
        }
        let config = config.ok_or_else(|| parse_err(0, "missing config header"))?;
        if let Some(h) = hash {
            if h != config_hash(&config) {
                return Err(parse_err(0, "config hash does not match config"));
            }
        }
        records.sort_by_key(|r| r.index);
        if records.windows(2).any(|w| w[0].index == w[1].index) {
            return Err(parse_err(0, "duplicate round index"));
        }
        Ok(Transcript { config, records })
    }
}

fn parse_err(line: usize, reason: &str) -> DqsError {
    DqsError::TranscriptParse { line, reason: reason.to_string() }
}

fn canonical_json(config: &ProtocolConfig) -> String {
    serde_json::to_string(config).expect("config serialises")
}

pub fn config_hash(config: &ProtocolConfig) -> String {
    hex::encode(Sha256::digest(canonical_json(config).as_bytes()))
}

impl fmt::Display for BobAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BobAction::Check => "check",
            BobAction::Encode => "encode",
            BobAction::Discard => "discard",
        })
    }
}

impl FromStr for BobAction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "check" => Ok(BobAction::Check),
            "encode" => Ok(BobAction::Encode),
            "discard" => Ok(BobAction::Discard),
            other => Err(format!("unknown action `{other}`")),
        }
    }
}

impl fmt::Display for SiftStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SiftStatus::KeptCheck => "kept_check",
            SiftStatus::KeptEstimation => "kept_estimation",
            SiftStatus::SiftedOut => "sifted_out",
            SiftStatus::Discarded => "discarded",
        })
    }
}

impl FromStr for SiftStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "kept_check" => Ok(SiftStatus::KeptCheck),
            "kept_estimation" => Ok(SiftStatus::KeptEstimation),
            "sifted_out" => Ok(SiftStatus::SiftedOut),
            "discarded" => Ok(SiftStatus::Discarded),
            other => Err(format!("unknown sift status `{other}`")),
        }
    }
}

fn format_record(r: &RoundRecord) -> String {
    let label = r.probe_label.map_or("-".to_string(), |l| l.to_string());
    let obs = |o: Option<Observation>| match o {
        Some(o) => (o.axis.to_string(), o.outcome.to_string()),
        None => ("-".to_string(), "-".to_string()),
    };
    let (aa, ao) = obs(r.alice);
    let (ba, bo) = obs(r.bob);
    format!("{},{},{label},{aa},{ao},{ba},{bo},{}", r.index, r.action, r.sift)
}

fn parse_record(line: &str) -> std::result::Result<RoundRecord, String> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != 8 {
        return Err(format!("expected 8 fields, found {}", f.len()));
    }
    let index = f[0].parse::<u64>().map_err(|e| format!("index: {e}"))?;
    let action = f[1].parse()?;
    let probe_label = match f[2] {
        "-" => None,
        s => Some(s.parse::<SignedAxis>().map_err(|e| e.to_string())?),
    };
    let obs = |axis: &str, outcome: &str| -> std::result::Result<Option<Observation>, String> {
        match (axis, outcome) {
            ("-", "-") => Ok(None),
            (a, o) => {
                let axis = a.parse::<Axis>().map_err(|e| e.to_string())?;
                let outcome = o.parse::<i8>().map_err(|e| format!("outcome: {e}"))?;
                if !(-1..=1).contains(&outcome) {
                    return Err(format!("outcome {outcome} not in {{-1, 0, 1}}"));
                }
                Ok(Some(Observation { axis, outcome }))
            }
        }
    };
    Ok(RoundRecord {
        index,
        action,
        probe_label,
        alice: obs(f[3], f[4])?,
        bob: obs(f[5], f[6])?,
        sift: f[7].parse()?,
    })
}
