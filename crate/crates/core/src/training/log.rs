use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Hex SHA-256 of the canonical JSON form of `value`.
pub fn config_hash<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable config");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub phase: usize,
    pub objective: String,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub phase: usize,
    pub objective: String,
    pub epoch: usize,
    pub mean_loss: f64,
    pub dev_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub seed: u64,
    pub config_hash: String,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogEvent {
    Step(StepRecord),
    Epoch(EpochRecord),
    SkippedStep {
        step: u64,
        phase: usize,
        reason: String,
    },
    BestCheckpoint {
        epoch: usize,
        dev_accuracy: f64,
    },
    EarlyStop {
        epoch: usize,
    },
}

/// Training record. Wall time is kept out of the serialized log so that
/// replays produce identical bytes; it goes to a separate sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainLog {
    pub header: LogHeader,
    pub events: Vec<LogEvent>,
    pub wall_time_secs: f64,
}

impl TrainLog {
    pub fn new(seed: u64, config: serde_json::Value) -> Self {
        TrainLog {
            header: LogHeader {
                seed,
                config_hash: config_hash(&config),
                config,
            },
            events: Vec::new(),
            wall_time_secs: 0.0,
        }
    }

    pub fn steps(&self) -> impl Iterator<Item = &StepRecord> {
        self.events.iter().filter_map(|e| match e {
            LogEvent::Step(s) => Some(s),
            _ => None,
        })
    }

    pub fn epochs(&self) -> impl Iterator<Item = &EpochRecord> {
        self.events.iter().filter_map(|e| match e {
            LogEvent::Epoch(r) => Some(r),
            _ => None,
        })
    }

    /// Number the next step record should carry.
    pub fn next_step(&self) -> u64 {
        self.events
            .iter()
            .rev()
            .find_map(|e| match e {
                LogEvent::Step(s) => Some(s.step),
                LogEvent::SkippedStep { step, .. } => Some(*step),
                _ => None,
            })
            .unwrap_or(0)
            + 1
    }

    pub fn losses(&self) -> Vec<f64> {
        self.steps().map(|s| s.loss).collect()
    }

    /// Appends a later stage's events (e.g. fine-tuning after
    /// pre-training), renumbering its phases and steps to follow ours.
    pub fn extend(&mut self, other: TrainLog) {
        let phase_base = self.steps().map(|s| s.phase + 1).max().unwrap_or(0);
        let step_base = self.steps().map(|s| s.step).max().unwrap_or(0);
        for mut e in other.events {
            match &mut e {
                LogEvent::Step(s) => {
                    s.phase += phase_base;
                    s.step += step_base;
                }
                LogEvent::Epoch(r) => r.phase += phase_base,
                LogEvent::SkippedStep { step, phase, .. } => {
                    *step += step_base;
                    *phase += phase_base;
                }
                LogEvent::BestCheckpoint { .. } | LogEvent::EarlyStop { .. } => {}
            }
            self.events.push(e);
        }
        self.wall_time_secs += other.wall_time_secs;
    }

    /// Line-delimited JSON: the header line, then one line per event.
    pub fn to_ldj(&self) -> String {
        let mut out =
            serde_json::to_string(&serde_json::json!({ "header": self.header })).expect("json");
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("json"));
            out.push('\n');
        }
        out
    }

    pub fn parse_ldj(text: &str) -> Result<TrainLog, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let first = lines.next().ok_or("empty log")?;
        #[derive(Deserialize)]
        struct H {
            header: LogHeader,
        }
        let header = serde_json::from_str::<H>(first)
            .map_err(|e| format!("header: {e}"))?
            .header;
        let events = lines
            .enumerate()
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("line {}: {e}", i + 2)))
            .collect::<Result<_, _>>()?;
        Ok(TrainLog {
            header,
            events,
            wall_time_secs: 0.0,
        })
    }

    /// Sidecar with the non-reproducible fields.
    pub fn timing_json(&self) -> String {
        serde_json::json!({ "config_hash": self.header.config_hash, "wall_time_secs": self.wall_time_secs })
            .to_string()
    }
}
