//! Structured pass/fail records for the verification suites.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::family::{Family, FamilyRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Not run, with the reason in the notes (e.g. a missing input file).
    Skip,
    /// Measurements only; no verdict is implied.
    Empirical,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
            Status::Empirical => "EMPIRICAL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyRecord>,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

impl Witness {
    pub fn new(detail: impl Into<String>) -> Self {
        Witness {
            family: None,
            detail: detail.into(),
            margin: None,
        }
    }

    pub fn family(mut self, f: &Family) -> Self {
        self.family = Some(f.to_record());
        self
    }

    pub fn margin(mut self, m: f64) -> Self {
        self.margin = Some(m);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Stable identifier of the property checked.
    pub claim: String,
    /// One-line description of the property.
    pub statement: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub status: Status,
    /// Number of individual instances checked.
    pub checks: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
}

impl VerificationReport {
    pub fn new(claim: &str, statement: &str) -> Self {
        VerificationReport {
            claim: claim.to_string(),
            statement: statement.to_string(),
            k: None,
            n: None,
            seed: None,
            samples: None,
            status: Status::Pass,
            checks: 0,
            min_margin: None,
            notes: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn with_k(mut self, k: u32) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_n(mut self, n: u32) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_seed(mut self, seed: u64, samples: usize) -> Self {
        self.seed = Some(seed);
        self.samples = Some(samples);
        self
    }

    /// Records one instance. A failed instance must come with the witness
    /// that shows it, so failing reports always carry a counterexample.
    pub fn check(&mut self, ok: bool, counterexample: impl FnOnce() -> Witness) {
        self.checks += 1;
        if !ok {
            self.status = Status::Fail;
            if self.witnesses.len() < 16 {
                self.witnesses.push(counterexample());
            }
        }
    }

    pub fn margin(&mut self, m: f64) {
        self.min_margin = Some(self.min_margin.map_or(m, |x| x.min(m)));
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn skip(mut self, reason: impl Into<String>) -> Self {
        self.status = Status::Skip;
        self.notes.push(reason.into());
        self
    }

    pub fn empirical(mut self) -> Self {
        self.status = Status::Empirical;
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    /// `claim,k,n,samples,min_margin,status`
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.claim,
            opt(self.k.map(|x| x.to_string())),
            opt(self.n.map(|x| x.to_string())),
            opt(self.samples.map(|x| x.to_string())),
            opt(self.min_margin.map(|x| format!("{x:.6e}"))),
            self.status
        )
    }
}

pub const CSV_HEADER: &str = "claim,k,n,samples,min_margin,status";

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.status, self.claim, self.statement)?;
        let mut tags = Vec::new();
        if let Some(k) = self.k {
            tags.push(format!("k={k}"));
        }
        if let Some(n) = self.n {
            tags.push(format!("n={n}"));
        }
        if let Some(s) = self.seed {
            tags.push(format!("seed={s}"));
        }
        tags.push(format!("checks={}", self.checks));
        if let Some(m) = self.min_margin {
            tags.push(format!("min_margin={m:.3e}"));
        }
        write!(f, " ({})", tags.join(", "))?;
        for n in &self.notes {
            write!(f, "\n    note: {n}")?;
        }
        for w in &self.witnesses {
            write!(f, "\n    witness: {}", w.detail)?;
            if let Some(fam) = &w.family {
                write!(f, " {:?}", fam.boundary)?;
            }
        }
        Ok(())
    }
}
