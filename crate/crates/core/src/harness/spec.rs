use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::descent::CorrelationQuery;
use crate::error::{Error, Result};
use crate::limits::DEFAULT_F2_ORDER;
use crate::samplers::{Distribution, GenEwensParams, StickVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    TwEdge,
    Vkls,
    DescentCorr,
    DescentDensity,
    EdgeTwoSample,
    Couple,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        Self::TwEdge,
        Self::Vkls,
        Self::DescentCorr,
        Self::DescentDensity,
        Self::EdgeTwoSample,
        Self::Couple,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::TwEdge => "tw-edge",
            Self::Vkls => "vkls",
            Self::DescentCorr => "descent-corr",
            Self::DescentDensity => "descent-density",
            Self::EdgeTwoSample => "edge-two-sample",
            Self::Couple => "couple",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown experiment kind {s:?}")))
    }
}

/// Named law plus its raw parameters, as written in spec files and flags.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DistributionSpec {
    pub name: String,
    pub theta: Option<f64>,
    pub weights: Option<Vec<f64>>,
    pub x: Option<Vec<f64>>,
    pub x0: Option<f64>,
    /// Law applied off the fixed set of a diluted distribution.
    pub base: Option<String>,
}

impl DistributionSpec {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Self::default()
        }
    }

    /// Builds the law; `diluted` uses `base` (default `uniform`) with the
    /// same `theta`, `weights` and `x`.
    pub fn build(&self) -> Result<Distribution> {
        let d = match self.name.as_str() {
            "diluted" => {
                let x0 = self.x0.ok_or_else(|| missing("x0", "diluted"))?;
                let base_name = self.base.as_deref().unwrap_or("uniform");
                if base_name == "diluted" {
                    return Err(Error::InvalidParameter("nested dilution".into()));
                }
                let base = self.simple(base_name)?;
                Distribution::Diluted {
                    x0,
                    base: Box::new(base),
                }
            }
            name => self.simple(name)?,
        };
        d.validate()?;
        Ok(d)
    }

    fn simple(&self, name: &str) -> Result<Distribution> {
        Ok(match name {
            "uniform" => Distribution::Uniform,
            "ewens" => Distribution::Ewens {
                theta: self.theta.ok_or_else(|| missing("theta", name))?,
            },
            "pd" => Distribution::PdEwens {
                theta: self.theta.ok_or_else(|| missing("theta", name))?,
            },
            "gen-ewens" => Distribution::GenEwens(GenEwensParams::from_weights(
                self.weights.as_deref().ok_or_else(|| missing("weights", name))?,
            )?),
            "central" => Distribution::Central(StickVector::from_unsorted(
                self.x.clone().ok_or_else(|| missing("x", name))?,
            )?),
            other => return Err(Error::Parse(format!("unknown distribution {other:?}"))),
        })
    }
}

fn missing(key: &str, dist: &str) -> Error {
    Error::InvalidParameter(format!("distribution {dist} needs {key}"))
}

/// Declarative Monte Carlo run.
///
/// Spec files hold one `key = value` pair per line; `#` starts a comment.
/// Keys: `kind`, `dist`, `theta`, `weights`, `x`, `x0`, `base`, `n`, `reps`,
/// `seed`, `k`, `conjugate`, `sets` (`;`-separated, each `,`-separated),
/// `order` (F₂ quadrature), `threshold` (vkls), `out`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub dist: DistributionSpec,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    /// Number of edge rows.
    pub k: usize,
    /// Use columns of the shape (decreasing subsequences) instead of rows.
    pub conjugate: bool,
    pub sets: Vec<CorrelationQuery>,
    pub order: usize,
    pub threshold: f64,
    pub out: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            dist: DistributionSpec::named("uniform"),
            n: 100,
            reps: 100,
            seed: 0,
            k: 1,
            conjugate: false,
            sets: Vec::new(),
            order: DEFAULT_F2_ORDER,
            threshold: 0.08,
            out: None,
        }
    }

    /// Parses spec-file text; `kind` must be present.
    pub fn parse(text: &str) -> Result<Self> {
        let pairs = parse_pairs(text)?;
        let kind = pairs
            .iter()
            .find(|(k, _)| k == "kind")
            .map(|(_, v)| v.parse())
            .transpose()?
            .ok_or_else(|| Error::Parse("spec has no kind".into()))?;
        let mut spec = Self::new(kind);
        for (k, v) in &pairs {
            spec.set(k, v)?;
        }
        Ok(spec)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "kind" => self.kind = v.parse()?,
            "dist" => self.dist.name = v.to_string(),
            "theta" => self.dist.theta = Some(num(key, v)?),
            "weights" => self.dist.weights = Some(list(key, v)?),
            "x" => self.dist.x = Some(list(key, v)?),
            "x0" => self.dist.x0 = Some(num(key, v)?),
            "base" => self.dist.base = Some(v.to_string()),
            "n" => self.n = num(key, v)?,
            "reps" => self.reps = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "k" => self.k = num(key, v)?,
            "conjugate" => self.conjugate = num(key, v)?,
            "sets" => {
                self.sets = v
                    .split(';')
                    .filter(|s| !s.trim().is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            "order" => self.order = num(key, v)?,
            "threshold" => self.threshold = num(key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            other => return Err(Error::Parse(format!("unknown spec key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<Distribution> {
        if self.n == 0 || self.reps == 0 || self.k == 0 {
            return Err(Error::InvalidParameter(
                "n, reps and k must be at least 1".into(),
            ));
        }
        if self.kind == ExperimentKind::DescentCorr && self.sets.is_empty() {
            return Err(Error::InvalidParameter("descent-corr needs sets".into()));
        }
        self.dist.build()
    }
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", no + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.parse()
        .map_err(|e| Error::Parse(format!("{key} = {v:?}: {e}")))
}

pub(crate) fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| num(key, t.trim()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_file() {
        let text = "\
# descent correlations
kind = descent-corr
dist = diluted
base = ewens
theta = 2.5
x0 = 0.25
n = 50
reps = 1000
seed = 7
sets = 1,2; 1,3;2
";
        let spec = ExperimentSpec::parse(text).unwrap();
        assert_eq!(spec.kind, ExperimentKind::DescentCorr);
        assert_eq!(spec.sets.len(), 3);
        assert_eq!(spec.seed, 7);
        let d = spec.validate().unwrap();
        assert_eq!(
            d,
            Distribution::Diluted {
                x0: 0.25,
                base: Box::new(Distribution::Ewens { theta: 2.5 })
            }
        );
    }

    #[test]
    fn errors() {
        assert!(ExperimentSpec::parse("n = 3").is_err());
        assert!(ExperimentSpec::parse("kind = nope").is_err());
        assert!(ExperimentSpec::parse("kind = vkls\nbogus = 1").is_err());
        assert!(ExperimentSpec::parse("kind = vkls\nn 3").is_err());
        let mut s = ExperimentSpec::parse("kind = vkls\nreps = 0").unwrap();
        assert!(s.validate().is_err());
        s.reps = 1;
        s.set("dist", "ewens").unwrap();
        assert!(s.validate().is_err());
        s.set("theta", "-1").unwrap();
        assert!(s.validate().is_err());
        s.set("theta", "1").unwrap();
        assert!(s.validate().is_ok());
        let d = ExperimentSpec::parse("kind = descent-corr").unwrap();
        assert!(d.validate().is_err());
    }

    #[test]
    fn kinds_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
    }

    #[test]
    fn central_sticks_sorted() {
        let mut s = ExperimentSpec::new(ExperimentKind::Vkls);
        s.set("dist", "central").unwrap();
        s.set("x", "0.2,0.3").unwrap();
        match s.validate().unwrap() {
            Distribution::Central(x) => assert_eq!(x.sticks(), &[0.3, 0.2]),
            other => panic!("{other:?}"),
        }
    }
}
