use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reducer::{SentenceSegmenter, MAX_THRESHOLD};

/// How many sentences a cascade keeps verbatim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KMode {
    Fixed(f64),
    Adaptive,
}

/// A context-reduction method under evaluation.
///
/// Textual form, as accepted by [`FromStr`]:
///
/// ```text
/// original | fixed_k:<θ> | adaptive_k | sc_only:<rate> | cqsumdp
/// semantic_compression | external:<name> | cascade:<θ|adaptive>:<base>
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Original,
    FixedK(f64),
    AdaptiveK,
    ScOnly(f64),
    Cqsumdp,
    SemanticCompression,
    External(String),
    Cascade { base: Box<Method>, k: KMode },
}

pub const METHOD_SYNTAX: &str = "original, fixed_k:<theta>, adaptive_k, sc_only:<rate>, cqsumdp, \
semantic_compression, external:<name>, cascade:<theta|adaptive>:<base method>";

impl Method {
    pub fn validate(&self) -> Result<()> {
        match self {
            Method::FixedK(theta)
            | Method::Cascade {
                k: KMode::Fixed(theta),
                ..
            } if !(0.0..=MAX_THRESHOLD).contains(theta) => Err(Error::InvalidThreshold(*theta)),
            Method::ScOnly(rate) if !(0.0..1.0).contains(rate) => Err(Error::InvalidRate(*rate)),
            Method::External(name) if name.is_empty() => Err(Error::InvalidConfig(
                "external summarizer name is empty".into(),
            )),
            Method::Cascade { base, .. } => match base.as_ref() {
                Method::Cascade { .. } => {
                    Err(Error::InvalidConfig("cascades cannot be nested".into()))
                }
                other => other.validate(),
            },
            _ => Ok(()),
        }
    }

    pub fn needs_agent(&self) -> bool {
        matches!(
            self,
            Method::AdaptiveK
                | Method::Cascade {
                    k: KMode::Adaptive,
                    ..
                }
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Original => f.write_str("original"),
            Method::FixedK(t) => write!(f, "fixed_k:{t}"),
            Method::AdaptiveK => f.write_str("adaptive_k"),
            Method::ScOnly(r) => write!(f, "sc_only:{r}"),
            Method::Cqsumdp => f.write_str("cqsumdp"),
            Method::SemanticCompression => f.write_str("semantic_compression"),
            Method::External(name) => write!(f, "external:{name}"),
            Method::Cascade {
                base,
                k: KMode::Fixed(t),
            } => write!(f, "cascade:{t}:{base}"),
            Method::Cascade {
                base,
                k: KMode::Adaptive,
            } => write!(f, "cascade:adaptive:{base}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || {
            Error::InvalidConfig(format!(
                "unknown method `{s}`; expected one of: {METHOD_SYNTAX}"
            ))
        };
        let number = |v: &str| v.parse::<f64>().map_err(|_| bad());
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let method = match (head, arg) {
            ("original", None) => Method::Original,
            ("fixed_k", Some(v)) => Method::FixedK(number(v)?),
            ("adaptive_k", None) => Method::AdaptiveK,
            ("sc_only", Some(v)) => Method::ScOnly(number(v)?),
            ("cqsumdp", None) => Method::Cqsumdp,
            ("semantic_compression", None) => Method::SemanticCompression,
            ("external", Some(name)) => Method::External(name.to_string()),
            ("cascade", Some(rest)) => {
                let (k, base) = rest.split_once(':').ok_or_else(bad)?;
                let k = if k == "adaptive" {
                    KMode::Adaptive
                } else {
                    KMode::Fixed(number(k)?)
                };
                Method::Cascade {
                    base: Box::new(base.parse()?),
                    k,
                }
            }
            _ => return Err(bad()),
        };
        method.validate()?;
        Ok(method)
    }
}

/// Comma-separated method list.
pub fn parse_methods(csv: &str) -> Result<Vec<Method>> {
    let methods = csv
        .split(',')
        .filter(|m| !m.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Method>>>()?;
    if methods.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "no methods given; expected: {METHOD_SYNTAX}"
        )));
    }
    Ok(methods)
}

/// Any external mapping from (context, query) to a summary.
pub trait Summarizer: Send + Sync {
    fn summarize(&self, context: &str, query: Option<&str>) -> Result<String>;
}

/// First `n` sentences of the context.
#[derive(Debug, Clone)]
pub struct LeadSummarizer {
    pub sentences: usize,
    pub segmenter: SentenceSegmenter,
}

impl LeadSummarizer {
    pub fn new(sentences: usize) -> Self {
        Self {
            sentences,
            segmenter: SentenceSegmenter::default(),
        }
    }
}

impl Summarizer for LeadSummarizer {
    fn summarize(&self, context: &str, _query: Option<&str>) -> Result<String> {
        Ok(self
            .segmenter
            .segment(context)
            .into_iter()
            .take(self.sentences)
            .collect::<Vec<_>>()
            .join(" "))
    }
}

pub const QUERY_ENV: &str = "LEANCTX_QUERY";

/// Runs an executable with the context on stdin and the query in
/// `LEANCTX_QUERY`; trimmed stdout is the summary.
#[derive(Debug, Clone)]
pub struct CommandSummarizer {
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl CommandSummarizer {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        Self {
            program: program.into(),
            args: Vec::new(),
        }
    }
}

impl Summarizer for CommandSummarizer {
    fn summarize(&self, context: &str, query: Option<&str>) -> Result<String> {
        let failed = |msg: String| {
            Error::provider(format!("{}: {msg}", self.program.display()), None, false)
        };
        let mut cmd = Command::new(&self.program);
        cmd.args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped());
        match query {
            Some(q) => cmd.env(QUERY_ENV, q),
            None => cmd.env_remove(QUERY_ENV),
        };
        let mut child = cmd.spawn().map_err(|e| failed(e.to_string()))?;
        if let Some(mut stdin) = child.stdin.take() {
            stdin
                .write_all(context.as_bytes())
                .map_err(|e| failed(e.to_string()))?;
        }
        let output = child
            .wait_with_output()
            .map_err(|e| failed(e.to_string()))?;
        if !output.status.success() {
            return Err(failed(format!(
                "exited with {}: {}",
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        Ok(String::from_utf8_lossy(&output.stdout).trim().to_string())
    }
}
