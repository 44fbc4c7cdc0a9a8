//! Experiment configuration: sources and cost functions load from a TOML
//! document. Probabilities and costs are written as *quoted decimal strings*
//! ("0.25", not 0.25) so they parse to exact rationals instead of rounded
//! floats.
//!
//! ```toml
//! [source]
//! type = "iid"
//! pmf = ["0.75", "0.25"]
//!
//! [cost]
//! K = 2
//! depth = 0
//! [cost.table]
//! "" = ["1", "2"]
//! ```
//!
//! Markov sources take `initial` and `transition` (a row per current symbol);
//! mixtures take `[[source.components]]` entries each with a `weight` and a
//! nested source spec. Cost tables are keyed by context strings over the
//! digits `0..K-1`, the empty string being the root context, and need a row
//! for every context of every length `0..=depth`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost_model::CostFunction;
use crate::error::{Error, Result};
use crate::numeric::parse_decimal;
use crate::sources::{Pmf, SourceModel};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmf: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transition: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentSpec>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub weight: String,
    #[serde(flatten)]
    pub source: SourceSpec,
}

impl SourceSpec {
    pub fn build(&self) -> Result<SourceModel> {
        match self.kind.as_str() {
            "iid" => {
                let pmf = self
                    .pmf
                    .as_ref()
                    .ok_or_else(|| Error::Config("iid source needs `pmf`".into()))?;
                Ok(SourceModel::iid(parse_pmf(pmf)?))
            }
            "markov" => {
                let initial = self
                    .initial
                    .as_ref()
                    .ok_or_else(|| Error::Config("markov source needs `initial`".into()))?;
                let transition = self
                    .transition
                    .as_ref()
                    .ok_or_else(|| Error::Config("markov source needs `transition`".into()))?;
                let rows = transition
                    .iter()
                    .map(|row| parse_pmf(row))
                    .collect::<Result<Vec<_>>>()?;
                SourceModel::markov(parse_pmf(initial)?, rows)
            }
            "mixture" => {
                let comps = self
                    .components
                    .as_ref()
                    .ok_or_else(|| Error::Config("mixture source needs `components`".into()))?;
                let parts = comps
                    .iter()
                    .map(|c| Ok((parse_decimal(&c.weight)?, c.source.build()?)))
                    .collect::<Result<Vec<_>>>()?;
                SourceModel::mixture(parts)
            }
            other => Err(Error::Config(format!(
                "unknown source type {other:?} (expected iid, markov, or mixture)"
            ))),
        }
    }
}

fn parse_pmf(entries: &[String]) -> Result<Pmf> {
    Pmf::new(
        entries
            .iter()
            .map(|s| parse_decimal(s))
            .collect::<Result<Vec<_>>>()?,
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostSpec {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(default)]
    pub depth: usize,
    /// Context string (digits over 0..K-1; "" is the root) -> per-symbol
    /// costs as decimal strings.
    pub table: BTreeMap<String, Vec<String>>,
}

impl CostSpec {
    pub fn build(&self) -> Result<CostFunction> {
        let mut table = BTreeMap::new();
        for (ctx_str, row) in &self.table {
            let ctx = ctx_str
                .chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .filter(|&d| (d as usize) < self.k)
                        .map(|d| d as u8)
                        .ok_or_else(|| {
                            Error::Config(format!(
                                "context {ctx_str:?} must use digits 0..{}",
                                self.k
                            ))
                        })
                })
                .collect::<Result<Vec<u8>>>()?;
            let costs = row
                .iter()
                .map(|s| parse_decimal(s))
                .collect::<Result<Vec<_>>>()?;
            table.insert(ctx, costs);
        }
        CostFunction::new(self.k, self.depth, &table)
    }
}

/// Grid specification for spectrum/threshold abscissas.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || self.stop < self.start {
            return Err(Error::Config(format!(
                "bad grid {}..{} step {}",
                self.start, self.stop, self.step
            )));
        }
        let count = ((self.stop - self.start) / self.step).round() as usize + 1;
        if count > 1_000_000 {
            return Err(Error::Config("grid has more than 1e6 points".into()));
        }
        Ok((0..count).map(|i| self.start + i as f64 * self.step).collect())
    }
}

/// Optional parameters; commands apply their own defaults and CLI flags win.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ParamsSpec {
    pub n: Option<usize>,
    pub n_schedule: Option<Vec<usize>>,
    pub epsilon: Option<f64>,
    pub a: Option<f64>,
    pub l: Option<f64>,
    pub rate: Option<f64>,
    pub eta: Option<f64>,
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
    pub z: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub grid: Option<GridSpec>,
    pub order: Option<String>,
    pub method: Option<String>,
}

/// A full experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: Option<SourceSpec>,
    pub cost: Option<CostSpec>,
    #[serde(default)]
    pub params: ParamsSpec,
}

impl ExperimentConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn source_model(&self) -> Result<SourceModel> {
        self.source
            .as_ref()
            .ok_or_else(|| Error::Config("config has no [source] section".into()))?
            .build()
    }

    pub fn cost_function(&self) -> Result<CostFunction> {
        self.cost
            .as_ref()
            .ok_or_else(|| Error::Config("config has no [cost] section".into()))?
            .build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational_to_f64;

    #[test]
    fn parses_iid_config() {
        let cfg = ExperimentConfig::from_str(
            r#"
[source]
type = "iid"
pmf = ["0.75", "0.25"]

[cost]
K = 2
depth = 0
[cost.table]
"" = ["1", "2"]

[params]
n = 8
seed = 42
"#,
        )
        .unwrap();
        let src = cfg.source_model().unwrap();
        assert_eq!(src.alphabet(), 2);
        let p = src.probability(&[1, 0]).unwrap();
        assert!((rational_to_f64(&p) - 0.1875).abs() < 1e-15);
        let cf = cfg.cost_function().unwrap();
        assert_eq!(cf.c_max(), 2.0);
        assert_eq!(cfg.params.n, Some(8));
        assert_eq!(cfg.params.seed, Some(42));
    }

    #[test]
    fn parses_markov_and_mixture() {
        let cfg = ExperimentConfig::from_str(
            r#"
[source]
type = "markov"
initial = ["1", "0"]
transition = [["0", "1"], ["1", "0"]]
"#,
        )
        .unwrap();
        let src = cfg.source_model().unwrap();
        assert_eq!(rational_to_f64(&src.probability(&[0, 1, 0]).unwrap()), 1.0);

        let cfg = ExperimentConfig::from_str(
            r#"
[source]
type = "mixture"

[[source.components]]
weight = "0.3"
type = "iid"
pmf = ["0.9", "0.1"]

[[source.components]]
weight = "0.7"
type = "iid"
pmf = ["0.6", "0.4"]
"#,
        )
        .unwrap();
        let src = cfg.source_model().unwrap();
        let p = src.probability(&[1]).unwrap();
        assert!((rational_to_f64(&p) - 0.31).abs() < 1e-15);
    }

    #[test]
    fn parses_contextual_cost_table() {
        let cfg = ExperimentConfig::from_str(
            r#"
[cost]
K = 2
depth = 1
[cost.table]
"" = ["1", "1"]
"0" = ["1", "2"]
"1" = ["2", "1"]
"#,
        )
        .unwrap();
        let cf = cfg.cost_function().unwrap();
        assert_eq!(cf.depth(), 1);
        assert_eq!(cf.string_cost(&[0, 1, 1]).unwrap(), 4.0);
    }

    #[test]
    fn rejects_bad_configs() {
        // Unquoted floats are a type error: decimals must be strings.
        assert!(ExperimentConfig::from_str("[source]\ntype = \"iid\"\npmf = [0.5, 0.5]").is_err());
        // Unknown type.
        let cfg =
            ExperimentConfig::from_str("[source]\ntype = \"hmm\"\npmf = [\"1\"]").unwrap();
        assert!(cfg.source_model().is_err());
        // Missing context row.
        let cfg = ExperimentConfig::from_str(
            "[cost]\nK = 2\ndepth = 1\n[cost.table]\n\"\" = [\"1\", \"1\"]",
        )
        .unwrap();
        assert!(cfg.cost_function().is_err());
        // Bad context digits.
        let cfg = ExperimentConfig::from_str(
            "[cost]\nK = 2\ndepth = 1\n[cost.table]\n\"\" = [\"1\", \"1\"]\n\"2\" = [\"1\", \"1\"]\n\"0\" = [\"1\",\"1\"]\n\"1\" = [\"1\",\"1\"]",
        )
        .unwrap();
        assert!(cfg.cost_function().is_err());
    }

    #[test]
    fn grid_points() {
        let g = GridSpec {
            start: 0.5,
            stop: 0.6,
            step: 0.05,
        };
        let pts = g.points().unwrap();
        assert_eq!(pts.len(), 3);
        assert!((pts[2] - 0.6).abs() < 1e-12);
        assert!(GridSpec {
            start: 1.0,
            stop: 0.0,
            step: 0.1
        }
        .points()
        .is_err());
    }
}
