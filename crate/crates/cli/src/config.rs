//! Experiment configuration: TOML files, flag overrides and per-kind defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nonsep_core::games::{MetricKind, BOUND_TOLERANCE};
use nonsep_core::weyl::Rotation;
use nonsep_core::Label;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CcrCheck,
    LemmaWitness,
    EprWitness,
    GnsDemo,
    GameNonseparable,
    GameFinite,
    GameOptimize,
    GameEpsilon,
    ChainRoundtrip,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 9] = [
        ExperimentKind::CcrCheck,
        ExperimentKind::LemmaWitness,
        ExperimentKind::EprWitness,
        ExperimentKind::GnsDemo,
        ExperimentKind::GameNonseparable,
        ExperimentKind::GameFinite,
        ExperimentKind::GameOptimize,
        ExperimentKind::GameEpsilon,
        ExperimentKind::ChainRoundtrip,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::CcrCheck => "ccr-check",
            ExperimentKind::LemmaWitness => "lemma-witness",
            ExperimentKind::EprWitness => "epr-witness",
            ExperimentKind::GnsDemo => "gns-demo",
            ExperimentKind::GameNonseparable => "game-nonseparable",
            ExperimentKind::GameFinite => "game-finite",
            ExperimentKind::GameOptimize => "game-optimize",
            ExperimentKind::GameEpsilon => "game-epsilon",
            ExperimentKind::ChainRoundtrip => "chain-roundtrip",
        }
    }

    /// Parameters the kind reads, besides `seed`, `tolerances` and output.
    fn parameters(self) -> &'static [Param] {
        use Param::*;
        match self {
            ExperimentKind::CcrCheck => &[Trials, Theta, MaxSupport],
            ExperimentKind::LemmaWitness => &[Trials, Theta, MaxSupport],
            ExperimentKind::EprWitness => &[Trials, Theta, MaxSupport, X, P],
            ExperimentKind::GnsDemo => &[Trials, X, P],
            ExperimentKind::GameNonseparable => &[Inputs],
            ExperimentKind::GameFinite => &[Trials, N, Inputs, Strategy],
            ExperimentKind::GameOptimize => &[N, Inputs, Restarts, Iterations],
            ExperimentKind::GameEpsilon => &[Trials, Metric, Epsilon, N, Inputs, Sites],
            ExperimentKind::ChainRoundtrip => &[Trials, Sites],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("unknown experiment kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    JsonLines,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json-lines" => Ok(OutputFormat::JsonLines),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(CliError::Config(format!("unknown format {other:?}"))),
        }
    }
}

/// Numerical slack used by every pass/fail decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Amplitude and residual agreement.
    pub amplitude: f64,
    /// Slack on `G ≤ n/|X|` and `Σ g ≤ n`.
    pub bound: f64,
    /// How close the optimizer must come to `n/|X|`.
    pub attain: f64,
    /// Slack on `‖ψ‖ = 1`.
    pub norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            amplitude: 1e-12,
            bound: BOUND_TOLERANCE,
            attain: 1e-6,
            norm: nonsep_core::epr::NORM_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricKind>,
    /// `0`, `pi/2`, `pi`, `3pi/2` or an exact `cos,sin` pair.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_support: Option<usize>,
    /// JSON strategy fixture for `game-finite`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Param {
    Trials,
    N,
    Inputs,
    Restarts,
    Iterations,
    Epsilon,
    Metric,
    Theta,
    X,
    P,
    Sites,
    MaxSupport,
    Strategy,
}

impl Param {
    const ALL: [Param; 13] = [
        Param::Trials,
        Param::N,
        Param::Inputs,
        Param::Restarts,
        Param::Iterations,
        Param::Epsilon,
        Param::Metric,
        Param::Theta,
        Param::X,
        Param::P,
        Param::Sites,
        Param::MaxSupport,
        Param::Strategy,
    ];

    fn name(self) -> &'static str {
        match self {
            Param::Trials => "trials",
            Param::N => "n",
            Param::Inputs => "inputs",
            Param::Restarts => "restarts",
            Param::Iterations => "iterations",
            Param::Epsilon => "epsilon",
            Param::Metric => "metric",
            Param::Theta => "theta",
            Param::X => "x",
            Param::P => "p",
            Param::Sites => "sites",
            Param::MaxSupport => "max-support",
            Param::Strategy => "strategy",
        }
    }
}

/// Largest support drawn for random kets and bikets.
const SUPPORT_CAP: usize = 64;
/// Largest chain the roundtrip and dyadic game accept.
const SITES_CAP: usize = 4096;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(name: &str, v: Option<usize>) -> Result<(), CliError> {
    match v {
        Some(0) => Err(bad(format!("{name} must be at least 1"))),
        _ => Ok(()),
    }
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            seed: 0,
            trials: None,
            n: None,
            inputs: None,
            restarts: None,
            iterations: None,
            epsilon: None,
            metric: None,
            theta: None,
            x: None,
            p: None,
            sites: None,
            max_support: None,
            strategy: None,
            out: None,
            format: None,
            tolerances: Tolerances::default(),
        }
    }

    fn is_set(&self, p: Param) -> bool {
        match p {
            Param::Trials => self.trials.is_some(),
            Param::N => self.n.is_some(),
            Param::Inputs => self.inputs.is_some(),
            Param::Restarts => self.restarts.is_some(),
            Param::Iterations => self.iterations.is_some(),
            Param::Epsilon => self.epsilon.is_some(),
            Param::Metric => self.metric.is_some(),
            Param::Theta => self.theta.is_some(),
            Param::X => self.x.is_some(),
            Param::P => self.p.is_some(),
            Param::Sites => self.sites.is_some(),
            Param::MaxSupport => self.max_support.is_some(),
            Param::Strategy => self.strategy.is_some(),
        }
    }

    /// Fills in the defaults of the kind and checks every parameter.
    ///
    /// The result is the config echo stored in the run record; resolving it
    /// again is a no-op.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let allowed = self.kind.parameters();
        for p in Param::ALL {
            if self.is_set(p) && !allowed.contains(&p) {
                return Err(bad(format!("`{}` does not apply to {}", p.name(), self.kind)));
            }
        }
        match self.kind {
            ExperimentKind::CcrCheck => {
                self.trials.get_or_insert(1000);
                self.theta.get_or_insert_with(|| "0".into());
                self.max_support.get_or_insert(6);
            }
            ExperimentKind::LemmaWitness => {
                self.trials.get_or_insert(100);
                self.theta.get_or_insert_with(|| "0".into());
                self.max_support.get_or_insert(12);
            }
            ExperimentKind::EprWitness => {
                self.trials.get_or_insert(1000);
                self.theta.get_or_insert_with(|| "0".into());
                self.max_support.get_or_insert(6);
                self.x.get_or_insert_with(Label::zero);
                self.p.get_or_insert_with(Label::zero);
            }
            ExperimentKind::GnsDemo => {
                self.trials.get_or_insert(100);
                self.x.get_or_insert_with(Label::zero);
                self.p.get_or_insert_with(Label::zero);
            }
            ExperimentKind::GameNonseparable => {
                self.inputs.get_or_insert(100);
            }
            ExperimentKind::GameFinite => {
                self.trials
                    .get_or_insert(if self.strategy.is_some() { 1 } else { 200 });
                if self.strategy.is_some() && (self.n.is_some() || self.inputs.is_some()) {
                    return Err(bad("a strategy fixture fixes n and inputs"));
                }
            }
            ExperimentKind::GameOptimize => {
                self.n.get_or_insert(2);
                self.inputs.get_or_insert(3);
                self.restarts.get_or_insert(20);
                self.iterations.get_or_insert(500);
            }
            ExperimentKind::GameEpsilon => match *self.metric.get_or_insert(MetricKind::Standard) {
                MetricKind::Standard => {
                    if self.n.is_some() || self.inputs.is_some() || self.sites.is_some() {
                        return Err(bad("the standard metric uses only trials and epsilon"));
                    }
                    self.trials.get_or_insert(100);
                    self.epsilon.get_or_insert_with(|| Label::ratio(1, 10));
                }
                MetricKind::Discrete => {
                    if self.trials.is_some() || self.sites.is_some() {
                        return Err(bad("the discrete metric uses only n, inputs and epsilon"));
                    }
                    self.n.get_or_insert(2);
                    self.inputs.get_or_insert(3);
                    self.epsilon.get_or_insert_with(|| Label::ratio(1, 2));
                }
                MetricKind::Dyadic => {
                    if self.n.is_some() || self.inputs.is_some() {
                        return Err(bad("the dyadic metric uses only trials, sites and epsilon"));
                    }
                    self.trials.get_or_insert(100);
                    let sites = *self.sites.get_or_insert(16);
                    positive("sites", Some(sites))?;
                    if sites > SITES_CAP {
                        return Err(bad(format!("sites must be at most {SITES_CAP}")));
                    }
                    self.epsilon.get_or_insert_with(|| Label::dyadic(sites as u32));
                }
            },
            ExperimentKind::ChainRoundtrip => {
                self.trials.get_or_insert(1000);
                self.sites.get_or_insert(16);
            }
        }
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), CliError> {
        positive("trials", self.trials)?;
        positive("n", self.n)?;
        positive("inputs", self.inputs)?;
        positive("restarts", self.restarts)?;
        positive("iterations", self.iterations)?;
        positive("sites", self.sites)?;
        positive("max-support", self.max_support)?;
        if self.max_support.is_some_and(|s| s > SUPPORT_CAP) {
            return Err(bad(format!("max-support must be at most {SUPPORT_CAP}")));
        }
        if self.sites.is_some_and(|s| s > SITES_CAP) {
            return Err(bad(format!("sites must be at most {SITES_CAP}")));
        }
        if self.n.is_some_and(|n| n > 16) {
            return Err(bad("n must be at most 16"));
        }
        if let Some(eps) = &self.epsilon {
            if eps <= &Label::zero() {
                return Err(bad(format!("epsilon must be positive, got {eps}")));
            }
        }
        if let Some(theta) = &self.theta {
            theta.parse::<Rotation>().map_err(|e| bad(e.to_string()))?;
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("amplitude", t.amplitude),
            ("bound", t.bound),
            ("attain", t.attain),
            ("norm", t.norm),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(bad(format!(
                    "tolerance {name} must be a finite non-negative number"
                )));
            }
        }
        Ok(())
    }

    pub fn rotation(&self) -> Rotation {
        self.theta
            .as_deref()
            .unwrap_or("0")
            .parse()
            .expect("theta validated by resolve")
    }

    /// Resolves a relative `strategy` path against `base`.
    fn anchor(&mut self, base: &Path) {
        if let Some(s) = &self.strategy {
            if s.is_relative() {
                self.strategy = Some(base.join(s));
            }
        }
    }
}

/// Values given on the command line; `Some` overrides the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub n: Option<usize>,
    pub inputs: Option<usize>,
    pub restarts: Option<usize>,
    pub iterations: Option<usize>,
    pub epsilon: Option<Label>,
    pub metric: Option<MetricKind>,
    pub theta: Option<String>,
    pub x: Option<Label>,
    pub p: Option<Label>,
    pub sites: Option<usize>,
    pub max_support: Option<usize>,
    pub strategy: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl Overrides {
    pub fn apply(self, c: &mut ExperimentConfig) {
        macro_rules! take {
            ($($f:ident),*) => {$(
                if let Some(v) = self.$f {
                    c.$f = Some(v);
                }
            )*};
        }
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        take!(
            trials,
            n,
            inputs,
            restarts,
            iterations,
            epsilon,
            metric,
            theta,
            x,
            p,
            sites,
            max_support,
            strategy,
            out,
            format
        );
    }
}

/// Contents of a config file: one flat experiment or an `[[experiment]]` list.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigFile {
    Single(Box<ExperimentConfig>),
    Suite(Vec<ExperimentConfig>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    experiment: Vec<ExperimentConfig>,
}

pub fn parse_config(text: &str, default_kind: Option<ExperimentKind>) -> Result<ConfigFile, CliError> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| bad(e.to_string()))?;
    if table.contains_key("experiment") {
        let suite: SuiteFile = table
            .try_into()
            .map_err(|e: toml::de::Error| bad(e.to_string()))?;
        return Ok(ConfigFile::Suite(suite.experiment));
    }
    if let Some(kind) = default_kind {
        table
            .entry("kind")
            .or_insert_with(|| toml::Value::String(kind.as_str().into()));
    }
    let single: ExperimentConfig = table
        .try_into()
        .map_err(|e: toml::de::Error| bad(e.to_string()))?;
    Ok(ConfigFile::Single(Box::new(single)))
}

pub fn load_config(path: &Path, default_kind: Option<ExperimentKind>) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut file = parse_config(&text, default_kind)?;
    let base = path.parent().unwrap_or(Path::new("."));
    match &mut file {
        ConfigFile::Single(c) => c.anchor(base),
        ConfigFile::Suite(cs) => cs.iter_mut().for_each(|c| c.anchor(base)),
    }
    Ok(file)
}

/// Renders the resolved config as the TOML a user could have written.
pub fn to_toml(config: &ExperimentConfig) -> String {
    toml::to_string(config).expect("config serializes")
}

/// Kind-ordered index of configs, for grouping.
pub fn by_kind<T, F>(items: &[T], kind: F) -> BTreeMap<ExperimentKind, Vec<&T>>
where
    F: Fn(&T) -> ExperimentKind,
{
    let mut groups: BTreeMap<ExperimentKind, Vec<&T>> = BTreeMap::new();
    for item in items {
        groups.entry(kind(item)).or_default().push(item);
    }
    groups
}
