//! Scenario configuration: JSON, schema 1, rationals as `"p/q"` strings.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use shintani_core::embed::SignConfig;
use shintani_core::{Element, Rational, Spec};
use thiserror::Error;

use crate::expr::{parse_element, Env, ExprError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("bad rational `{0}`")]
    Rational(String),
    #[error("field: {0}")]
    Field(shintani_core::Error),
    #[error("element `{0}`: {1}")]
    Element(String, ExprError),
    #[error("`{0}` is not a unit (norm {1})")]
    NotUnit(String, Rational),
    #[error("`{0}` is not totally positive")]
    NotTotallyPositive(String),
    #[error("scenario `{0}` refers to unknown element `{1}`")]
    Unresolved(String, String),
    #[error("duplicate scenario id `{0}`")]
    DuplicateId(String),
    #[error("{0}")]
    Other(String),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    /// `c0 .. c3` of `c0 + c1 x + c2 x^2 + c3 x^3`
    pub coeffs: [String; 4],
    /// ascending root index used for each embedding
    #[serde(default = "default_order")]
    pub embedding_order: [usize; 3],
}

fn default_order() -> [usize; 3] {
    [0, 1, 2]
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionConfig {
    pub start_bits: u32,
    pub max_bits: u32,
    pub escalation_factor: u32,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        let d = SignConfig::default();
        PrecisionConfig { start_bits: d.start_bits, max_bits: d.max_bits, escalation_factor: d.escalation_factor }
    }
}

/// A domain and the pair generating the group it tiles.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct DomainRef {
    /// `colmez`, `b`, `b1` or `b2`
    pub domain: String,
    pub units: [String; 2],
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Translates of the Colmez domain meeting `pi^-1 D`, against the
    /// `{0,1}^2` bound.
    Counterexample {
        units: [String; 2],
        pi: String,
        #[serde(default = "window8")]
        window: i64,
        /// exponent pairs that must be in the support
        #[serde(default)]
        expect_witnesses: Vec<(i64, i64)>,
    },
    Construction {
        units: [String; 2],
        pi: String,
        #[serde(default)]
        overrides: Option<[String; 2]>,
        #[serde(default)]
        expect_l: Option<i64>,
        #[serde(default = "lmax")]
        l_max: i64,
        #[serde(default = "one")]
        min_power: i64,
        #[serde(default = "qmax")]
        q_max: String,
    },
    /// Exact cover box of `pi^-1 B` by nonnegative translates.
    Inclusion {
        units: [String; 2],
        pi: String,
        #[serde(default = "window6")]
        window: i64,
    },
    Case {
        units: [String; 2],
        pi: String,
        #[serde(default)]
        expect: Option<String>,
        #[serde(default = "window6")]
        window: i64,
    },
    Identities {
        units: [String; 2],
        pi: String,
        /// `Case1` or `Case2`; classified when absent
        #[serde(default)]
        case: Option<String>,
    },
    Fdcheck {
        #[serde(flatten)]
        domain: DomainRef,
        #[serde(default = "samples")]
        samples: usize,
        #[serde(default = "window8")]
        window: i64,
        #[serde(default)]
        seed: u64,
    },
    Direction {
        units: [String; 2],
        #[serde(default = "one")]
        l: i64,
        #[serde(default = "points")]
        n_points: usize,
        #[serde(default = "yes")]
        expect_pass: bool,
    },
    Figures {
        /// `colmez` or `cover`
        figure: String,
        units: [String; 2],
        #[serde(default)]
        domain: Option<String>,
        #[serde(default)]
        pi: Option<String>,
        #[serde(default)]
        block: Option<(i64, i64)>,
        #[serde(default = "one")]
        l: i64,
        #[serde(default = "points")]
        n_points: usize,
        #[serde(default)]
        title: Option<String>,
    },
}

fn window8() -> i64 {
    8
}
fn window6() -> i64 {
    6
}
fn lmax() -> i64 {
    8
}
fn one() -> i64 {
    1
}
fn qmax() -> String {
    "64".into()
}
fn samples() -> usize {
    1000
}
fn points() -> usize {
    shintani_core::render::DEFAULT_POINTS
}
fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Scenario {
    pub id: String,
    #[serde(flatten)]
    pub kind: ScenarioKind,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Counterexample { .. } => "counterexample",
            ScenarioKind::Construction { .. } => "construction",
            ScenarioKind::Inclusion { .. } => "inclusion",
            ScenarioKind::Case { .. } => "case",
            ScenarioKind::Identities { .. } => "identities",
            ScenarioKind::Fdcheck { .. } => "fdcheck",
            ScenarioKind::Direction { .. } => "direction",
            ScenarioKind::Figures { .. } => "figures",
        }
    }

    fn names(&self) -> Vec<&String> {
        let mut v: Vec<&String> = vec![];
        match self {
            ScenarioKind::Counterexample { units, pi, .. }
            | ScenarioKind::Inclusion { units, pi, .. }
            | ScenarioKind::Case { units, pi, .. }
            | ScenarioKind::Identities { units, pi, .. } => {
                v.extend(units.iter());
                v.push(pi);
            }
            ScenarioKind::Construction { units, pi, overrides, .. } => {
                v.extend(units.iter());
                v.push(pi);
                if let Some(o) = overrides {
                    v.extend(o.iter());
                }
            }
            ScenarioKind::Fdcheck { domain, .. } => v.extend(domain.units.iter()),
            ScenarioKind::Direction { units, .. } => v.extend(units.iter()),
            ScenarioKind::Figures { units, pi, .. } => {
                v.extend(units.iter());
                if let Some(p) = pi {
                    v.push(p);
                }
            }
        }
        v
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub schema: u32,
    pub field: FieldConfig,
    #[serde(default)]
    pub precision: PrecisionConfig,
    pub elements: BTreeMap<String, String>,
    #[serde(default)]
    pub units: Vec<String>,
    #[serde(default)]
    pub totally_positive: Vec<String>,
    pub scenarios: Vec<Scenario>,
}

/// A validated configuration with every element evaluated.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub raw: RawConfig,
    pub spec: Arc<Spec>,
    pub elements: BTreeMap<String, Element>,
    pub precision: SignConfig,
}

pub fn parse_rational(s: &str) -> Result<Rational, ConfigError> {
    s.trim().parse::<Rational>().map_err(|_| ConfigError::Rational(s.to_string()))
}

// evaluates named expressions on demand, in any order, rejecting cycles
struct Lazy<'a> {
    exprs: &'a BTreeMap<String, String>,
    done: BTreeMap<String, Element>,
    active: BTreeSet<String>,
    spec: &'a Arc<Spec>,
}

impl Env for Lazy<'_> {
    fn lookup(&mut self, name: &str) -> Option<Result<Element, ExprError>> {
        if let Some(e) = self.done.get(name) {
            return Some(Ok(e.clone()));
        }
        let src = self.exprs.get(name)?.clone();
        if !self.active.insert(name.to_string()) {
            return Some(Err(ExprError::Math(format!("`{}` is defined in terms of itself", name))));
        }
        let spec = self.spec.clone();
        let r = parse_element(&src, &spec, self);
        self.active.remove(name);
        if let Ok(v) = &r {
            self.done.insert(name.to_string(), v.clone());
        }
        Some(r)
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text)?;
        Self::from_raw(raw)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
        Self::from_json(&text)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        if raw.schema != 1 {
            return Err(ConfigError::Schema(raw.schema));
        }
        let c: Vec<Rational> = raw.field.coeffs.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?;
        let spec = Spec::new([c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()]).map_err(ConfigError::Field)?;
        let mut lazy = Lazy { exprs: &raw.elements, done: BTreeMap::new(), active: BTreeSet::new(), spec: &spec };
        for name in raw.elements.keys() {
            if let Some(Err(e)) = lazy.lookup(name) {
                return Err(ConfigError::Element(name.clone(), e));
            }
        }
        let elements = lazy.done;
        let p = &raw.precision;
        let precision = SignConfig::new(p.start_bits, p.max_bits, p.escalation_factor).map_err(ConfigError::Field)?;
        let cfg = ScenarioConfig { spec, elements, precision, raw };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let emb = shintani_core::embed::Embedding::new(&self.spec, self.raw.field.embedding_order).map_err(ConfigError::Field)?;
        for u in &self.raw.units {
            let x = self.get(u).ok_or_else(|| ConfigError::Unresolved("units".into(), u.clone()))?;
            let n = x.norm();
            if n != Rational::from_integer(1.into()) && n != Rational::from_integer((-1).into()) {
                return Err(ConfigError::NotUnit(u.clone(), n));
            }
        }
        for t in &self.raw.totally_positive {
            let x = self.get(t).ok_or_else(|| ConfigError::Unresolved("totally_positive".into(), t.clone()))?;
            if !emb.is_totally_positive(x, &self.precision).map_err(ConfigError::Field)? {
                return Err(ConfigError::NotTotallyPositive(t.clone()));
            }
        }
        let mut ids = BTreeSet::new();
        for s in &self.raw.scenarios {
            if !ids.insert(&s.id) {
                return Err(ConfigError::DuplicateId(s.id.clone()));
            }
            for n in s.kind.names() {
                if !self.elements.contains_key(n) {
                    return Err(ConfigError::Unresolved(s.id.clone(), n.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Element> {
        self.elements.get(name)
    }

    pub fn scenario(&self, id: &str) -> Option<&Scenario> {
        self.raw.scenarios.iter().find(|s| s.id == id)
    }
}

/// The bundled example configuration.
pub const EXAMPLE_JSON: &str = include_str!("../data/example.json");
