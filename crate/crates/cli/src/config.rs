//! Run configuration shared by the flag parser and `--config` JSON files.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use lpfnt_core::{Error, KStrategy, NodeFamily, PNorm, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Indexset,
    Nodes,
    Grid,
    Transform,
    Approximate,
    Activity,
    Eval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
    Binary,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Binary => "binary",
        })
    }
}

/// `p` as given in JSON: a number or the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Number(f64),
    Text(String),
}

impl PValue {
    fn parse(&self) -> Result<PNorm> {
        match self {
            PValue::Number(v) => PNorm::new(*v),
            PValue::Text(s) => s.parse(),
        }
    }
}

/// Every knob of every command. Which fields are required depends on
/// `command`; [`RunConfig::validate`] checks them before anything runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub p: Option<PValue>,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub nodes: Option<String>,
    /// Number of random test points (`approximate`).
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub tubes_out: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub naive: bool,
    #[serde(default)]
    pub inverse: bool,
    #[serde(default)]
    pub dump: bool,
    /// Points are already in `[-1, 1]^m` (`eval`).
    #[serde(default)]
    pub reference: bool,
    /// Coefficient file to evaluate instead of a model (`eval`).
    #[serde(default)]
    pub coeffs: Option<PathBuf>,
    #[serde(default)]
    pub k: Option<String>,
    #[serde(default)]
    pub mc: Option<String>,
    #[serde(default)]
    pub sweep: Option<String>,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        RunConfig {
            command,
            m: None,
            n: None,
            p: None,
            model: None,
            nodes: None,
            samples: None,
            seed: None,
            input: None,
            out: None,
            tubes_out: None,
            format: None,
            naive: false,
            inverse: false,
            dump: false,
            reference: false,
            coeffs: None,
            k: None,
            mc: None,
            sweep: None,
            threads: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    fn need<T: Clone>(&self, value: &Option<T>, flag: &str) -> Result<T> {
        value.clone().ok_or_else(|| {
            Error::InvalidArgument(format!("{} requires --{flag}", self.command.name()))
        })
    }

    fn p_or(&self, default: Option<PNorm>) -> Result<PNorm> {
        match (&self.p, default) {
            (Some(p), _) => p.parse(),
            (None, Some(d)) => Ok(d),
            (None, None) => self.need(&None, "p"),
        }
    }

    fn family(&self) -> Result<NodeFamily> {
        match &self.nodes {
            None => Ok(NodeFamily::default()),
            Some(s) => s.parse(),
        }
    }

    fn format(&self, allowed: &[Format], default: Format) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Error::InvalidArgument(format!(
                "{} does not support --format {f}",
                self.command.name()
            )))
        }
    }

    fn reject(&self, set: bool, flag: &str) -> Result<()> {
        if set {
            return Err(Error::InvalidArgument(format!(
                "--{flag} does not apply to {}",
                self.command.name()
            )));
        }
        Ok(())
    }

    /// Checks required fields, parses strings and resolves defaults.
    pub fn validate(&self) -> Result<Job> {
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("--threads must be positive".into()));
        }
        use CommandKind::*;
        if !matches!(self.command, Transform) {
            self.reject(self.naive, "naive")?;
            self.reject(self.inverse, "inverse")?;
        }
        if !matches!(self.command, Activity) {
            self.reject(self.k.is_some(), "k")?;
            self.reject(self.mc.is_some(), "mc")?;
        }
        if !matches!(self.command, Approximate) {
            self.reject(self.sweep.is_some(), "sweep")?;
        }
        let job = match self.command {
            Indexset => Job::Indexset {
                m: self.need(&self.m, "m")?,
                n: self.need(&self.n, "n")?,
                p: self.p_or(None)?,
                dump: self.dump,
                tubes_out: self.tubes_out.clone(),
                format: self.format(&[Format::Text, Format::Json], Format::Text)?,
            },
            Nodes => Job::Nodes {
                n: self.need(&self.n, "n")?,
                family: self.family()?,
            },
            Grid => Job::Grid {
                m: self.need(&self.m, "m")?,
                n: self.need(&self.n, "n")?,
                p: self.p_or(None)?,
                family: self.family()?,
            },
            Transform => {
                if self.naive && self.inverse {
                    return Err(Error::InvalidArgument("--naive and --inverse are exclusive".into()));
                }
                let format = if self.inverse {
                    self.format(&[Format::Csv], Format::Csv)?
                } else {
                    self.format(&[Format::Csv, Format::Binary], Format::Csv)?
                };
                if format == Format::Binary && self.out.is_none() {
                    return Err(Error::InvalidArgument("binary output requires --out".into()));
                }
                let p = match &self.p {
                    Some(p) => Some(p.parse()?),
                    None => None,
                };
                if !self.inverse && (self.m.is_none() || self.n.is_none() || p.is_none()) {
                    return Err(Error::InvalidArgument("transform requires --m, --n and --p".into()));
                }
                Job::Transform {
                    input: self.need(&self.input, "input")?,
                    shape: match (self.m, self.n, p) {
                        (Some(m), Some(n), Some(p)) => Some((m, n, p)),
                        (None, None, None) => None,
                        _ => {
                            return Err(Error::InvalidArgument(
                                "--m, --n and --p must be given together".into(),
                            ))
                        }
                    },
                    family: self.family()?,
                    naive: self.naive,
                    inverse: self.inverse,
                    format,
                }
            }
            Approximate => {
                let model = self.need(&self.model, "model")?;
                let sweep = self.sweep.as_deref().map(parse_sweep).transpose()?;
                let ps = match (&self.p, sweep) {
                    (Some(p), _) => vec![p.parse()?],
                    (None, Some(_)) => vec![PNorm::ONE, PNorm::TWO, PNorm::INFINITY],
                    (None, None) => vec![PNorm::TWO],
                };
                let degrees = match (sweep, self.n) {
                    (Some(_), Some(_)) => {
                        return Err(Error::InvalidArgument("--sweep replaces --n".into()));
                    }
                    (Some((a, b)), None) => (a..=b).collect(),
                    (None, n) => vec![self.need(&n, "n")?],
                };
                let test_points = self.samples.unwrap_or(10_000);
                if test_points == 0 {
                    return Err(Error::InvalidArgument("--samples must be positive".into()));
                }
                let default = if sweep.is_some() { Format::Csv } else { Format::Text };
                Job::Approximate {
                    model,
                    m: self.m,
                    degrees,
                    ps,
                    family: self.family()?,
                    test_points,
                    seed: self.seed.unwrap_or(0),
                    format: self.format(&[Format::Text, Format::Csv, Format::Json], default)?,
                }
            }
            Activity => Job::Activity {
                model: self.need(&self.model, "model")?,
                m: self.m,
                n: self.need(&self.n, "n")?,
                p: self.p_or(Some(PNorm::TWO))?,
                family: self.family()?,
                k: match &self.k {
                    Some(k) => k.parse()?,
                    None => KStrategy::default(),
                },
                mc: self.mc.as_deref().map(parse_mc).transpose()?,
                seed: self.seed.unwrap_or(0),
                format: self.format(&[Format::Json, Format::Text], Format::Json)?,
            },
            Eval => {
                let source = match (&self.model, &self.coeffs) {
                    (Some(model), None) => EvalSource::Model(model.clone()),
                    (None, Some(path)) => EvalSource::Coefficients(path.clone()),
                    _ => {
                        return Err(Error::InvalidArgument(
                            "eval requires exactly one of --model and --coeffs".into(),
                        ))
                    }
                };
                Job::Eval {
                    source,
                    m: self.m,
                    family: self.family()?,
                    points: self.need(&self.input, "input")?,
                    reference: self.reference,
                }
            }
        };
        Ok(job)
    }
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Indexset => "indexset",
            CommandKind::Nodes => "nodes",
            CommandKind::Grid => "grid",
            CommandKind::Transform => "transform",
            CommandKind::Approximate => "approximate",
            CommandKind::Activity => "activity",
            CommandKind::Eval => "eval",
        }
    }
}

impl FromStr for CommandKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Parse(format!("unknown command `{s}`")))
    }
}

/// `"n1:n2"` with `n1 <= n2`.
pub fn parse_sweep(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("invalid sweep `{s}`, expected n1:n2"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

/// `"N,R"` with both positive.
pub fn parse_mc(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("invalid --mc `{s}`, expected N,R"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalSource {
    Model(String),
    Coefficients(PathBuf),
}

/// A validated command ready to execute.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Indexset {
        m: usize,
        n: usize,
        p: PNorm,
        dump: bool,
        tubes_out: Option<PathBuf>,
        format: Format,
    },
    Nodes {
        n: usize,
        family: NodeFamily,
    },
    Grid {
        m: usize,
        n: usize,
        p: PNorm,
        family: NodeFamily,
    },
    Transform {
        input: PathBuf,
        shape: Option<(usize, usize, PNorm)>,
        family: NodeFamily,
        naive: bool,
        inverse: bool,
        format: Format,
    },
    Approximate {
        model: String,
        m: Option<usize>,
        degrees: Vec<usize>,
        ps: Vec<PNorm>,
        family: NodeFamily,
        test_points: usize,
        seed: u64,
        format: Format,
    },
    Activity {
        model: String,
        m: Option<usize>,
        n: usize,
        p: PNorm,
        family: NodeFamily,
        k: KStrategy,
        mc: Option<(usize, usize)>,
        seed: u64,
        format: Format,
    },
    Eval {
        source: EvalSource,
        m: Option<usize>,
        family: NodeFamily,
        points: PathBuf,
        reference: bool,
    },
}
