//! Algorithm ids accepted by the CLI.
//!
//! Sizes that are not part of an instance file ride on the id: `k` for the
//! selection and prophet families, `f` and `requests` for facility location,
//! `requests` for Steiner tree.

use ro_arena::covering::FitRule;
use ro_arena::graphical::{ForestProblem, RandomThreshold, VertexPermutation};
use ro_arena::online::OnlineAlgorithm;
use ro_arena::packing::OnlinePacking;
use ro_arena::secretary::{
    KAdaptive, KHalves, KOblivious, KSegmented, SelectionProblem, WaitAndPick,
};
use ro_arena::stochastic::ProphetFromSamples;

use crate::error::{BenchError, Result};
use crate::instance::Kind;
use crate::spec::Spec;

pub type SelectionAlg = Box<dyn OnlineAlgorithm<SelectionProblem> + Send + Sync>;
pub type ForestAlg = Box<dyn OnlineAlgorithm<ForestProblem> + Send + Sync>;

pub enum Algorithm {
    Selection {
        alg: SelectionAlg,
        k: usize,
    },
    Forest(ForestAlg),
    Packing(OnlinePacking),
    Matching,
    Sap,
    Bins(FitRule),
    /// `requests: None` means one request per metric point.
    Facility {
        f: f64,
        requests: Option<usize>,
    },
    Steiner {
        greedy: bool,
        requests: Option<usize>,
    },
    Prophet {
        alg: ProphetFromSamples,
        k: usize,
    },
}

impl std::fmt::Debug for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Selection { .. } => "Selection",
            Algorithm::Forest(_) => "Forest",
            Algorithm::Packing(_) => "Packing",
            Algorithm::Matching => "Matching",
            Algorithm::Sap => "Sap",
            Algorithm::Bins(_) => "Bins",
            Algorithm::Facility { .. } => "Facility",
            Algorithm::Steiner { .. } => "Steiner",
            Algorithm::Prophet { .. } => "Prophet",
        })
    }
}

impl Algorithm {
    /// Instance kind the algorithm runs on.
    pub fn kind(&self) -> Kind {
        match self {
            Algorithm::Selection { .. } => Kind::Values,
            Algorithm::Forest(_) => Kind::Graph,
            Algorithm::Packing(_) => Kind::Packing,
            Algorithm::Matching => Kind::Matrix,
            Algorithm::Sap => Kind::Bipartite,
            Algorithm::Bins(_) => Kind::Sizes,
            Algorithm::Facility { .. } | Algorithm::Steiner { .. } => Kind::Metric,
            Algorithm::Prophet { .. } => Kind::Prophet,
        }
    }

    /// Whether requests are points of a metric, so i.i.d. arrivals make sense.
    pub fn takes_point_requests(&self) -> bool {
        self.kind() == Kind::Metric
    }
}

#[derive(Debug)]
pub struct Registered {
    /// Canonical spelling, used as the CSV algorithm column.
    pub spec: Spec,
    pub algorithm: Algorithm,
}

pub const ALGORITHMS: [&str; 19] = [
    "secretary-50",
    "secretary-37",
    "waitpick",
    "ksec-seg",
    "ksec-halves",
    "ksec-obliv",
    "ksec-adapt",
    "graph-randthresh",
    "graph-vperm",
    "packlp-adapt",
    "match-value",
    "match-sap",
    "bp-best",
    "bp-first",
    "bp-next",
    "facloc",
    "steiner-iid",
    "steiner-greedy",
    "prophet-sample",
];

fn budget(spec: &Spec) -> Result<usize> {
    let k = spec.get_or("k", 1usize)?;
    if k == 0 {
        return Err(BenchError::usage(format!(
            "{}: k must be at least 1",
            spec.name
        )));
    }
    Ok(k)
}

pub fn parse(text: &str) -> Result<Registered> {
    let spec = Spec::parse(text)?;
    let selection = |alg: SelectionAlg, k: usize| Algorithm::Selection { alg, k };
    let algorithm = match spec.name.as_str() {
        "secretary-50" | "secretary-37" => {
            spec.only(&[])?;
            let alg = if spec.name == "secretary-50" {
                WaitAndPick::fifty_percent()
            } else {
                WaitAndPick::thirty_seven_percent()
            };
            selection(Box::new(alg), 1)
        }
        "waitpick" => {
            spec.only(&["m"])?;
            selection(Box::new(WaitAndPick::with_prefix(spec.require("m")?)), 1)
        }
        "ksec-seg" => {
            spec.only(&["k"])?;
            selection(Box::new(KSegmented), budget(&spec)?)
        }
        "ksec-halves" => {
            spec.only(&["k"])?;
            selection(Box::new(KHalves), budget(&spec)?)
        }
        "ksec-obliv" => {
            spec.only(&["k", "delta", "eps"])?;
            let alg = match (spec.get::<f64>("delta")?, spec.get::<f64>("eps")?) {
                (None, None) => KOblivious::default(),
                (Some(d), e) => KOblivious::new(d, e.unwrap_or(d))?,
                (None, Some(e)) => KOblivious::new(e, e)?,
            };
            selection(Box::new(alg), budget(&spec)?)
        }
        "ksec-adapt" => {
            spec.only(&["k", "delta"])?;
            let alg = match spec.get::<f64>("delta")? {
                None => KAdaptive::default(),
                Some(d) => KAdaptive::with_delta(d)?,
            };
            selection(Box::new(alg), budget(&spec)?)
        }
        "graph-randthresh" => {
            spec.only(&["r"])?;
            Algorithm::Forest(Box::new(match spec.get::<u32>("r")? {
                None => RandomThreshold::default(),
                Some(r) => RandomThreshold::with_r(r),
            }))
        }
        "graph-vperm" => {
            spec.only(&[])?;
            Algorithm::Forest(Box::new(VertexPermutation))
        }
        "packlp-adapt" => {
            spec.only(&["delta"])?;
            Algorithm::Packing(match spec.get::<f64>("delta")? {
                None => OnlinePacking::default(),
                Some(d) => OnlinePacking::with_delta(d)?,
            })
        }
        "match-value" => {
            spec.only(&[])?;
            Algorithm::Matching
        }
        "match-sap" => {
            spec.only(&[])?;
            Algorithm::Sap
        }
        "bp-best" | "bp-first" | "bp-next" => {
            spec.only(&[])?;
            Algorithm::Bins(match spec.name.as_str() {
                "bp-best" => FitRule::Best,
                "bp-first" => FitRule::First,
                _ => FitRule::Next,
            })
        }
        "facloc" => {
            spec.only(&["f", "requests"])?;
            let f: f64 = spec.get_or("f", 1.0)?;
            if !(f > 0.0 && f.is_finite()) {
                return Err(BenchError::usage(format!(
                    "facloc: opening cost f={f} must be positive"
                )));
            }
            Algorithm::Facility {
                f,
                requests: spec.get("requests")?,
            }
        }
        "steiner-iid" | "steiner-greedy" => {
            spec.only(&["requests"])?;
            Algorithm::Steiner {
                greedy: spec.name == "steiner-greedy",
                requests: spec.get("requests")?,
            }
        }
        "prophet-sample" => {
            spec.only(&["inner", "k"])?;
            let inner = spec.get_str("inner").unwrap_or("secretary-50");
            Algorithm::Prophet {
                alg: ProphetFromSamples::by_id(inner)?,
                k: budget(&spec)?,
            }
        }
        other => return Err(BenchError::usage(format!("unknown algorithm '{other}'"))),
    };
    Ok(Registered { spec, algorithm })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_id_parses() {
        for id in ALGORITHMS {
            let text = if id == "waitpick" { "waitpick:m=2" } else { id };
            assert!(parse(text).is_ok(), "{id}");
        }
    }

    #[test]
    fn bad_ids() {
        assert!(matches!(parse("nope"), Err(BenchError::Usage(_))));
        assert!(matches!(parse("waitpick"), Err(BenchError::Usage(_))));
        assert!(matches!(parse("ksec-seg:k=0"), Err(BenchError::Usage(_))));
        assert!(matches!(
            parse("secretary-50:k=3"),
            Err(BenchError::Usage(_))
        ));
        assert!(matches!(
            parse("prophet-sample:inner=secretary-37"),
            Err(BenchError::Core(ro_arena::Error::ContractViolation(_)))
        ));
        assert!(parse("ksec-obliv:delta=0.1,eps=0.2,k=50").is_ok());
    }
}
