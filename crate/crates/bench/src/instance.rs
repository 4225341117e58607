//! Instance generators and the plain-text file formats.
//!
//! Values, sizes and distributions are one real per line. Graphs use a
//! `p <vertices> <edges>` header followed by `u v weight` lines; a bipartite
//! graph numbers its right side after its left side and may state the left
//! size with a `c left <count>` line (otherwise the halves are equal).
//! Matrices are dense rows, metrics a point count followed by the distance
//! rows, prophet instances `sample value` lines, and packing LPs JSON.
//! Lines starting with `#` or blank lines are ignored everywhere.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use ro_arena::arrival::{rng_for, Stream};
use ro_arena::covering::{gen_halves, BinPackingInstance};
use ro_arena::graphical::{Edge, WeightedGraph};
use ro_arena::matching::{gen_cycle_instance, BipartiteGraph, BipartiteValueMatrix};
use ro_arena::metric::{MetricSpace, RequestDistribution};
use ro_arena::packing::PackingInstance;
use ro_arena::secretary::gen_lb_instance;
use ro_arena::stochastic::ProphetProblem;
use ro_arena::ValueInstance;

use crate::error::{BenchError, Result};
use crate::spec::Spec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Values,
    Graph,
    Bipartite,
    Packing,
    Matrix,
    Sizes,
    Metric,
    Prophet,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Values => "values",
            Kind::Graph => "graph",
            Kind::Bipartite => "bipartite graph",
            Kind::Packing => "packing LP",
            Kind::Matrix => "value matrix",
            Kind::Sizes => "item sizes",
            Kind::Metric => "metric",
            Kind::Prophet => "prophet samples",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Instance {
    Values(ValueInstance),
    Graph(WeightedGraph),
    Bipartite(BipartiteGraph),
    Packing(PackingInstance),
    Matrix(BipartiteValueMatrix),
    Sizes(BinPackingInstance),
    Metric(MetricSpace),
    Prophet {
        samples: Vec<f64>,
        values: ValueInstance,
    },
}

impl Instance {
    pub fn kind(&self) -> Kind {
        match self {
            Instance::Values(_) => Kind::Values,
            Instance::Graph(_) => Kind::Graph,
            Instance::Bipartite(_) => Kind::Bipartite,
            Instance::Packing(_) => Kind::Packing,
            Instance::Matrix(_) => Kind::Matrix,
            Instance::Sizes(_) => Kind::Sizes,
            Instance::Metric(_) => Kind::Metric,
            Instance::Prophet { .. } => Kind::Prophet,
        }
    }

    /// Serializes in the file format for its kind. Reals use the shortest
    /// representation that reads back to the same `f64`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match self {
            Instance::Values(v) => lines(&mut s, v.values()),
            Instance::Sizes(b) => lines(&mut s, b.sizes()),
            Instance::Graph(g) => {
                let _ = writeln!(s, "p {} {}", g.vertex_count(), g.edges().len());
                for e in g.edges() {
                    let _ = writeln!(s, "{} {} {}", e.u, e.v, e.weight);
                }
            }
            Instance::Bipartite(g) => {
                let edges: Vec<_> = g.edges().collect();
                let _ = writeln!(s, "p {} {}", g.left() + g.right(), edges.len());
                let _ = writeln!(s, "c left {}", g.left());
                for (u, v) in edges {
                    let _ = writeln!(s, "{u} {} 1", g.left() + v);
                }
            }
            Instance::Packing(p) => {
                s = serde_json::to_string_pretty(p).expect("packing instances serialize");
                s.push('\n');
            }
            Instance::Matrix(m) => rows(&mut s, m.rows().iter().map(Vec::as_slice)),
            Instance::Metric(m) => {
                let _ = writeln!(s, "{}", m.len());
                rows(&mut s, m.rows());
            }
            Instance::Prophet { samples, values } => {
                for (a, b) in samples.iter().zip(values.values()) {
                    let _ = writeln!(s, "{a} {b}");
                }
            }
        }
        s
    }
}

fn lines(s: &mut String, xs: &[f64]) {
    for x in xs {
        let _ = writeln!(s, "{x}");
    }
}

fn rows<'a>(s: &mut String, rs: impl Iterator<Item = &'a [f64]>) {
    for r in rs {
        let line: Vec<String> = r.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
}

pub const GENERATORS: [&str; 11] = [
    "uniform-values",
    "lb-values",
    "gnm-graph",
    "gnp-graph",
    "packing",
    "matrix",
    "cycle",
    "halves",
    "uniform-sizes",
    "euclid-metric",
    "prophet-uniform",
];

/// Builds the instance named by a generator spec. Deterministic in
/// `(spec, seed)`; random draws come from the instance stream of `seed`.
pub fn generate(spec: &Spec, seed: u64) -> Result<Instance> {
    let inst = match spec.name.as_str() {
        "uniform-values" => {
            spec.only(&["n"])?;
            Instance::Values(ValueInstance::uniform(spec.require("n")?, seed)?)
        }
        "lb-values" => {
            spec.only(&["n", "k"])?;
            Instance::Values(gen_lb_instance(
                spec.require("n")?,
                spec.require("k")?,
                seed,
            )?)
        }
        "gnm-graph" => {
            spec.only(&["v", "m"])?;
            Instance::Graph(WeightedGraph::random(
                spec.require("v")?,
                spec.require("m")?,
                seed,
            )?)
        }
        "gnp-graph" => {
            spec.only(&["v", "p"])?;
            let v: usize = spec.require("v")?;
            let p: f64 = spec.require("p")?;
            if !(0.0..=1.0).contains(&p) {
                return Err(BenchError::usage(format!(
                    "gnp-graph: p={p} is not a probability"
                )));
            }
            let mut rng = rng_for(seed, Stream::Instance);
            let mut edges = Vec::new();
            for a in 0..v {
                for b in a + 1..v {
                    // Both draws happen for every pair so the weights do not
                    // depend on which pairs were kept.
                    let keep = rng.random::<f64>() < p;
                    let weight = rng.random::<f64>();
                    if keep {
                        edges.push(Edge { u: a, v: b, weight });
                    }
                }
            }
            Instance::Graph(WeightedGraph::new(v, edges)?)
        }
        "packing" => {
            spec.only(&["n", "d", "k"])?;
            Instance::Packing(PackingInstance::random(
                spec.require("n")?,
                spec.require("d")?,
                spec.require("k")?,
                seed,
            )?)
        }
        "matrix" => {
            spec.only(&["agents", "items"])?;
            let agents: usize = spec.require("agents")?;
            let items: usize = spec.get_or("items", agents)?;
            let mut rng = rng_for(seed, Stream::Instance);
            let rows = (0..agents)
                .map(|_| (0..items).map(|_| rng.random::<f64>()).collect())
                .collect();
            Instance::Matrix(BipartiteValueMatrix::new(rows)?)
        }
        "cycle" => {
            spec.only(&["n"])?;
            Instance::Bipartite(gen_cycle_instance(spec.require("n")?)?)
        }
        "halves" => {
            spec.only(&["n", "eps"])?;
            Instance::Sizes(gen_halves(spec.require("n")?, spec.require("eps")?)?)
        }
        "uniform-sizes" => {
            spec.only(&["n", "lo", "hi"])?;
            let n: usize = spec.require("n")?;
            let lo: f64 = spec.get_or("lo", 0.0)?;
            let hi: f64 = spec.get_or("hi", 1.0)?;
            if !(0.0 <= lo && lo < hi && hi <= 1.0) {
                return Err(BenchError::usage(format!(
                    "uniform-sizes needs 0 <= lo < hi <= 1, got {lo}, {hi}"
                )));
            }
            let mut rng = rng_for(seed, Stream::Instance);
            // Sizes lie in (lo, hi].
            let sizes = (0..n)
                .map(|_| hi - (hi - lo) * rng.random::<f64>())
                .collect();
            Instance::Sizes(BinPackingInstance::new(sizes)?)
        }
        "euclid-metric" => {
            spec.only(&["n"])?;
            Instance::Metric(MetricSpace::random_euclidean(spec.require("n")?, seed)?)
        }
        "prophet-uniform" => {
            spec.only(&["n"])?;
            let p = ProphetProblem::uniform(spec.require("n")?, 1, seed)?;
            Instance::Prophet {
                samples: p.samples().to_vec(),
                values: p.values().clone(),
            }
        }
        other => return Err(BenchError::usage(format!("unknown generator '{other}'"))),
    };
    Ok(inst)
}

/// Where an experiment's instances come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Generator(Spec),
}

impl Source {
    /// A string naming a registered generator is a generator spec; anything
    /// else is a file path.
    pub fn parse(text: &str) -> Result<Self> {
        let head = text.split(':').next().unwrap_or("");
        if GENERATORS.contains(&head) {
            Ok(Source::Generator(Spec::parse(text)?))
        } else if text.is_empty() {
            Err(BenchError::usage("empty instance source"))
        } else {
            Ok(Source::File(PathBuf::from(text)))
        }
    }

    pub fn label(&self) -> String {
        match self {
            Source::File(p) => p.display().to_string(),
            Source::Generator(s) => s.to_string(),
        }
    }

    pub fn is_file(&self) -> bool {
        matches!(self, Source::File(_))
    }

    /// Loads or generates an instance of the wanted kind.
    pub fn instance(&self, kind: Kind, seed: u64) -> Result<Instance> {
        let inst = match self {
            Source::File(p) => load(p, kind)?,
            Source::Generator(s) => generate(s, seed)?,
        };
        if inst.kind() != kind {
            return Err(BenchError::usage(format!(
                "{} yields a {} instance but the algorithm needs {}",
                self.label(),
                inst.kind().name(),
                kind.name()
            )));
        }
        Ok(inst)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))
}

/// Meaningful lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn reals(path: &Path, line: usize, text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<f64>().map_err(|_| {
                BenchError::parse(
                    path.display().to_string(),
                    format!("line {line}: '{t}' is not a number"),
                )
            })
        })
        .collect()
}

fn one_per_line(path: &Path, text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (no, l) in content_lines(text) {
        let xs = reals(path, no, l)?;
        if xs.len() != 1 {
            return Err(BenchError::parse(
                path.display().to_string(),
                format!("line {no}: expected one number"),
            ));
        }
        out.push(xs[0]);
    }
    Ok(out)
}

struct EdgeList {
    vertices: usize,
    left: Option<usize>,
    edges: Vec<(usize, usize, f64)>,
}

fn edge_list(path: &Path, text: &str) -> Result<EdgeList> {
    let bad = |no: usize, msg: &str| {
        BenchError::parse(path.display().to_string(), format!("line {no}: {msg}"))
    };
    let mut header: Option<(usize, usize)> = None;
    let mut left = None;
    let mut edges = Vec::new();
    for (no, l) in content_lines(text) {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "p" => {
                let (Some(v), Some(e)) = (
                    toks.get(1).and_then(|t| t.parse().ok()),
                    toks.get(2).and_then(|t| t.parse().ok()),
                ) else {
                    return Err(bad(no, "header must be 'p <vertices> <edges>'"));
                };
                if header.replace((v, e)).is_some() {
                    return Err(bad(no, "second header"));
                }
            }
            "c" => {
                if toks.get(1) == Some(&"left") {
                    left = Some(
                        toks.get(2)
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| bad(no, "bad 'c left' line"))?,
                    );
                }
            }
            _ => {
                if header.is_none() {
                    return Err(bad(no, "edge before the 'p' header"));
                }
                if toks.len() != 3 {
                    return Err(bad(no, "expected 'u v weight'"));
                }
                let u = toks[0].parse().map_err(|_| bad(no, "bad vertex"))?;
                let v = toks[1].parse().map_err(|_| bad(no, "bad vertex"))?;
                let w = toks[2].parse().map_err(|_| bad(no, "bad weight"))?;
                edges.push((u, v, w));
            }
        }
    }
    let (vertices, count) = header.ok_or_else(|| bad(0, "missing 'p' header"))?;
    if count != edges.len() {
        return Err(bad(
            0,
            &format!("header promises {count} edges, found {}", edges.len()),
        ));
    }
    Ok(EdgeList {
        vertices,
        left,
        edges,
    })
}

fn matrix_rows(path: &Path, text: &str) -> Result<Vec<Vec<f64>>> {
    content_lines(text)
        .map(|(no, l)| reals(path, no, l))
        .collect()
}

/// Reads an instance file in the format of `kind`.
pub fn load(path: &Path, kind: Kind) -> Result<Instance> {
    let text = read(path)?;
    let name = path.display().to_string();
    let inst = match kind {
        Kind::Values => Instance::Values(ValueInstance::new(one_per_line(path, &text)?)?),
        Kind::Sizes => Instance::Sizes(BinPackingInstance::new(one_per_line(path, &text)?)?),
        Kind::Graph => {
            let el = edge_list(path, &text)?;
            let edges = el
                .edges
                .into_iter()
                .map(|(u, v, weight)| Edge { u, v, weight })
                .collect();
            Instance::Graph(WeightedGraph::new(el.vertices, edges)?)
        }
        Kind::Bipartite => {
            let el = edge_list(path, &text)?;
            let left = match el.left {
                Some(l) if l <= el.vertices => l,
                Some(l) => {
                    return Err(BenchError::parse(
                        name,
                        format!("left side {l} exceeds the vertex count"),
                    ))
                }
                None if el.vertices % 2 == 0 => el.vertices / 2,
                None => {
                    return Err(BenchError::parse(
                        name,
                        "odd vertex count needs a 'c left' line",
                    ))
                }
            };
            let mut pairs = Vec::with_capacity(el.edges.len());
            for (u, v, _) in el.edges {
                // Either endpoint order is accepted.
                let (a, b) = if u < left { (u, v) } else { (v, u) };
                if a >= left || b < left || b >= el.vertices {
                    return Err(BenchError::parse(
                        name,
                        format!("edge {u} {v} does not cross the bipartition"),
                    ));
                }
                pairs.push((a, b - left));
            }
            Instance::Bipartite(BipartiteGraph::new(left, el.vertices - left, &pairs)?)
        }
        Kind::Packing => {
            let p: PackingInstance =
                serde_json::from_str(&text).map_err(|e| BenchError::parse(name, e.to_string()))?;
            Instance::Packing(p)
        }
        Kind::Matrix => Instance::Matrix(BipartiteValueMatrix::new(matrix_rows(path, &text)?)?),
        Kind::Metric => {
            let mut rows = matrix_rows(path, &text)?;
            if rows.is_empty() || rows[0].len() != 1 {
                return Err(BenchError::parse(
                    name,
                    "metric file must start with the point count",
                ));
            }
            let n = rows.remove(0)[0];
            if n != rows.len() as f64 {
                return Err(BenchError::parse(
                    name,
                    format!("count {n} but {} rows", rows.len()),
                ));
            }
            Instance::Metric(MetricSpace::new(rows)?)
        }
        Kind::Prophet => {
            let rows = matrix_rows(path, &text)?;
            if rows.iter().any(|r| r.len() != 2) {
                return Err(BenchError::parse(
                    name,
                    "expected 'sample value' on every line",
                ));
            }
            Instance::Prophet {
                samples: rows.iter().map(|r| r[0]).collect(),
                values: ValueInstance::new(rows.iter().map(|r| r[1]).collect())?,
            }
        }
    };
    Ok(inst)
}

/// Reads a request distribution (one probability per line).
pub fn load_distribution(path: &Path) -> Result<RequestDistribution> {
    Ok(RequestDistribution::new(one_per_line(path, &read(path)?)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(spec: &str) {
        let inst = generate(&Spec::parse(spec).unwrap(), 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.txt");
        std::fs::write(&path, inst.to_text()).unwrap();
        let back = load(&path, inst.kind()).unwrap();
        assert_eq!(back.to_text(), inst.to_text(), "{spec}");
    }

    #[test]
    fn files_round_trip() {
        for spec in [
            "uniform-values:n=20",
            "gnm-graph:v=6,m=10",
            "gnp-graph:v=6,p=0.5",
            "packing:n=5,d=2,k=3",
            "matrix:agents=3,items=4",
            "cycle:n=5",
            "uniform-sizes:n=8",
            "euclid-metric:n=5",
            "prophet-uniform:n=4",
        ] {
            round_trip(spec);
        }
    }

    #[test]
    fn source_detection() {
        assert!(matches!(
            Source::parse("halves:n=10,eps=0.1").unwrap(),
            Source::Generator(_)
        ));
        assert!(matches!(
            Source::parse("data/x.txt").unwrap(),
            Source::File(_)
        ));
        assert!(Source::parse("halves:n=10")
            .unwrap()
            .instance(Kind::Sizes, 0)
            .is_err());
        let src = Source::parse("cycle:n=4").unwrap();
        assert!(matches!(
            src.instance(Kind::Values, 0),
            Err(BenchError::Usage(_))
        ));
    }
}
