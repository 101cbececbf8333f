//! Report envelope, text rendering and atomic output.

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Positive,
    Negative,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Positive
        } else {
            Verdict::Negative
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Positive => 0,
            Verdict::Negative => 1,
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub schema_version: u32,
    pub command: &'static str,
    pub verdict: Verdict,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explain: Option<Map<String, Value>>,
    /// Emit only `result.document` in JSON mode.
    #[serde(skip)]
    pub bare: bool,
}

impl Report {
    pub fn new(command: &'static str, verdict: Verdict, result: impl Serialize) -> anyhow::Result<Self> {
        Ok(Self {
            schema_version: qmrg::io::SCHEMA_VERSION,
            command,
            verdict,
            result: serde_json::to_value(result)?,
            explain: None,
            bare: false,
        })
    }

    pub fn with_explain(mut self, on: bool) -> Self {
        if on {
            self.explain = Some(
                explain(self.command)
                    .iter()
                    .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
                    .collect(),
            );
        }
        self
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        Ok(match format {
            Format::Json if self.bare && self.explain.is_none() => {
                serde_json::to_string_pretty(&self.result["document"])? + "\n"
            }
            Format::Json => serde_json::to_string_pretty(self)? + "\n",
            Format::Text => {
                let mut out = format!("{}: {}\n", self.command, serde_json::to_value(self.verdict)?.as_str().unwrap_or(""));
                if let Value::Object(fields) = &self.result {
                    for (k, v) in fields {
                        out.push_str(&format!("  {k}: {}\n", scalar(v)));
                    }
                } else {
                    out.push_str(&format!("  {}\n", scalar(&self.result)));
                }
                if let Some(ex) = &self.explain {
                    out.push_str("explain:\n");
                    for (k, v) in ex {
                        out.push_str(&format!("  {k}: {}\n", v.as_str().unwrap_or("")));
                    }
                }
                out
            }
        })
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Meaning of the result fields of each command.
fn explain(command: &str) -> &'static [(&'static str, &'static str)] {
    match command {
        "verify" | "value" => &[
            ("value", "winning probability under the uniform question distribution"),
            ("cellWin", "winning probability per question pair (row, column)"),
            ("clamped", "probabilities clipped into [0, 1]; nonzero only from rounding noise"),
            ("maxImaginary", "largest imaginary part met while computing probabilities"),
            ("perfect", "value equals 1 within the tolerance"),
        ],
        "pqss" => &[
            ("spaceDim", "dimension of the common +1 eigenspace of all cell projectors"),
            ("perCellRanks", "rank of the cell projector for each question pair"),
            ("clusters", "groups of equal Schmidt coefficients of the supplied state"),
            ("membership", "distance of the supplied state to the space; a member within tolerance"),
        ],
        "schmidt" => &[
            ("coefficients", "Schmidt coefficients in decreasing order"),
            ("rank", "number of coefficients above the rank cutoff"),
            ("clusters", "equal-coefficient groups, each checked as a perfect strategy on its own"),
            ("betaNorm", "sum of squared cluster weights; 1 for a normalized state"),
        ],
        "certify" => &[
            ("verdict", "contradiction when no state can satisfy every constraint"),
            ("rule", "the elimination, parity or atom-split rule that closed the proof"),
            ("witness", "data that lets the proof be rechecked by hand"),
            ("trace", "proof steps in the order they were found"),
        ],
        "nogo-2xn" => &[
            ("certificate", "parity proof for odd n, a classical table for even n"),
            ("coloring", "membership of each answer in the term paired with Bob's first answer"),
            ("classicalValue", "best deterministic winning probability, for even n"),
        ],
        "inequality" => &[
            ("correlations", "sum over cells of the correlation of Alice's and Bob's observables"),
            ("aliceProducts", "sum of expectations of Alice's line products"),
            ("bobProducts", "sum of expectations of Bob's line products"),
            ("total", "correlations plus Alice's products minus Bob's products"),
        ],
        "integrate" => &[
            ("strategy", "weighted direct sum of the inputs, in the strategy file schema"),
            ("value", "winning probability of the combined strategy"),
        ],
        "classical" => &[
            ("value", "best winning probability over deterministic strategies"),
            ("wins", "winning question pairs of the optimum"),
            ("alice", "Alice's answer per row in an optimal table"),
            ("bob", "Bob's answer per column in an optimal table"),
        ],
        "fixtures" => &[("document", "the requested built-in input in its file schema")],
        "index-sets" => &[
            ("sets", "per position, the 1-based slots answering +1 and -1"),
            ("tuples", "answer tuple of each slot"),
            ("bijection", "whether the recursive construction matches the direct one"),
        ],
        _ => &[],
    }
}

/// Writes through a temporary file in the destination directory, then
/// renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
