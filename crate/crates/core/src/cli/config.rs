//! Run configuration: flags, config files, and their merge.

use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagonal_bases::{hamiltonian_basis, nbc_basis, DiagonalBasisSet, RootOrdering};
use crate::verlinde_sum::default_precision;

/// `"2"`, `"1..4"` (inclusive) or `"1,3,5"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RangeSpec {
    One(u64),
    List(Vec<u64>),
    Text(String),
}

impl RangeSpec {
    pub fn values(&self) -> anyhow::Result<Vec<u64>> {
        let v = match self {
            RangeSpec::One(x) => vec![*x],
            RangeSpec::List(v) => v.clone(),
            RangeSpec::Text(s) => parse_range(s)?,
        };
        if v.is_empty() {
            bail!("empty range");
        }
        Ok(v)
    }
}

impl FromStr for RangeSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        parse_range(s)?;
        Ok(RangeSpec::Text(s.to_string()))
    }
}

fn parse_range(s: &str) -> anyhow::Result<Vec<u64>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let lo: u64 = a.trim().parse().with_context(|| format!("bad range {s:?}"))?;
        let hi: u64 = b.trim().trim_start_matches('=').parse().with_context(|| format!("bad range {s:?}"))?;
        if lo > hi {
            bail!("empty range {s:?}");
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|t| t.trim().parse().with_context(|| format!("bad integer {t:?}"))).collect()
}

/// `"1,0,-1"`.
pub fn parse_weight(s: &str) -> anyhow::Result<Vec<i64>> {
    s.split(',').map(|t| t.trim().parse::<i64>().with_context(|| format!("bad weight entry {t:?}"))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Sum,
    Residue,
}

pub fn parse_routes(s: &str) -> anyhow::Result<Vec<Route>> {
    let mut out = Vec::new();
    for t in s.split(',').map(str::trim) {
        out.push(match t {
            "sum" => Route::Sum,
            "residue" => Route::Residue,
            _ => bail!("unknown route {t:?} (expected sum or residue)"),
        });
    }
    Ok(out)
}

/// `hamiltonian:M`, `nbc:lex`, `nbc:revlex`, `nbc:seed:N`, `nbc:13,14,...` or `all`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisChoice {
    Hamiltonian(usize),
    NbcLex,
    NbcRevLex,
    NbcSeed(u64),
    NbcOrder(String),
    All,
}

impl FromStr for BasisChoice {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let s = s.trim();
        if s == "all" {
            return Ok(Self::All);
        }
        if let Some(m) = s.strip_prefix("hamiltonian:") {
            return Ok(Self::Hamiltonian(m.parse().context("bad hamiltonian index")?));
        }
        match s.strip_prefix("nbc:") {
            Some("lex") => Ok(Self::NbcLex),
            Some("revlex") => Ok(Self::NbcRevLex),
            Some(rest) => match rest.strip_prefix("seed:") {
                Some(n) => Ok(Self::NbcSeed(n.parse().context("bad seed")?)),
                None => Ok(Self::NbcOrder(rest.to_string())),
            },
            None => bail!("unknown basis choice {s:?}"),
        }
    }
}

impl std::fmt::Display for BasisChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Hamiltonian(m) => write!(f, "hamiltonian:{m}"),
            Self::NbcLex => write!(f, "nbc:lex"),
            Self::NbcRevLex => write!(f, "nbc:revlex"),
            Self::NbcSeed(n) => write!(f, "nbc:seed:{n}"),
            Self::NbcOrder(o) => write!(f, "nbc:{o}"),
            Self::All => write!(f, "all"),
        }
    }
}

impl Serialize for BasisChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BasisChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A random total order of the edges of `K_r`.
pub fn seeded_ordering(r: usize, seed: u64) -> RootOrdering {
    let mut edges = RootOrdering::lexicographic(r).edges().to_vec();
    edges.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    RootOrdering::new(r, edges).expect("a permutation of all edges")
}

pub fn reverse_lex(r: usize) -> RootOrdering {
    let mut edges = RootOrdering::lexicographic(r).edges().to_vec();
    edges.reverse();
    RootOrdering::new(r, edges).expect("a permutation of all edges")
}

impl BasisChoice {
    /// Labelled basis sets; `All` gives every `H_m` and the lex, reverse-lex nbc sets.
    pub fn build(&self, r: usize) -> anyhow::Result<Vec<(String, DiagonalBasisSet)>> {
        Ok(match self {
            Self::Hamiltonian(m) => vec![(self.to_string(), hamiltonian_basis(*m, r)?)],
            Self::NbcLex => vec![(self.to_string(), nbc_basis(&RootOrdering::lexicographic(r), r)?)],
            Self::NbcRevLex => vec![(self.to_string(), nbc_basis(&reverse_lex(r), r)?)],
            Self::NbcSeed(n) => vec![(self.to_string(), nbc_basis(&seeded_ordering(r, *n), r)?)],
            Self::NbcOrder(o) => vec![(self.to_string(), nbc_basis(&RootOrdering::parse(r, o)?, r)?)],
            Self::All => {
                let mut v = Vec::new();
                for m in 1..=r {
                    v.push((format!("hamiltonian:{m}"), hamiltonian_basis(m, r)?));
                }
                v.push(("nbc:lex".into(), nbc_basis(&RootOrdering::lexicographic(r), r)?));
                v.push(("nbc:revlex".into(), nbc_basis(&reverse_lex(r), r)?));
                v
            }
        })
    }
}

/// Everything a `ver` or `crosscheck` run needs. Config files use the same
/// flat keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub r: Vec<u64>,
    pub g: RangeSpec,
    pub k: RangeSpec,
    /// Explicit weights; empty means the admissible grid.
    pub lambda: Vec<Vec<i64>>,
    pub grid: bool,
    pub routes: Vec<Route>,
    pub precision: usize,
    pub trunc: Option<u32>,
    pub basis: BasisChoice,
    pub threads: Option<usize>,
    pub format: Format,
    pub both_sides: bool,
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            r: vec![2],
            g: RangeSpec::One(1),
            k: RangeSpec::One(1),
            lambda: Vec::new(),
            grid: false,
            routes: vec![Route::Sum, Route::Residue],
            precision: default_precision(),
            trunc: None,
            basis: BasisChoice::Hamiltonian(1),
            threads: None,
            format: Format::Json,
            both_sides: false,
            timing: true,
        }
    }
}

impl RunConfig {
    /// Reads TOML (`.toml`) or JSON (anything else).
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        } else {
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.r.is_empty() || self.r.iter().any(|&r| !(2..=8).contains(&r)) {
            bail!("rank must be between 2 and 8");
        }
        if self.g.values()?.contains(&0) {
            bail!("genus must be at least 1");
        }
        if self.k.values()?.contains(&0) {
            bail!("level must be at least 1");
        }
        if self.precision < 64 {
            bail!("precision must be at least 64 bits");
        }
        if self.routes.is_empty() {
            bail!("no routes requested");
        }
        for lam in &self.lambda {
            if lam.iter().sum::<i64>() != 0 {
                bail!("weight {lam:?} does not sum to zero");
            }
            if !self.r.contains(&(lam.len() as u64)) {
                bail!("weight {lam:?} has the wrong length");
            }
        }
        Ok(())
    }
}
