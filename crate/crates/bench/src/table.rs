//! The versioned CSV schema, run summaries and the pooled report.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use ro_arena::numeric::mean_and_stderr;
use ro_arena::{RunSummary, TrialRecord};

use crate::error::{BenchError, Result};

pub const VERSION_LINE: &str = "# ro-arena csv v1";
pub const COLUMNS: [&str; 8] = [
    "trial",
    "seed",
    "algorithm",
    "instance",
    "n",
    "alg_objective",
    "oracle_objective",
    "ratio",
];

fn real(x: f64) -> String {
    // Empty float sums are -0.0; print them as 0.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Serializes records (in the given order) with one `counter.<name>`
/// column per counter seen in any record; missing counters are empty.
pub fn to_csv(records: &[TrialRecord]) -> Vec<u8> {
    let names: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.counters.keys().map(String::as_str))
        .collect();
    let mut out = Vec::new();
    out.extend_from_slice(VERSION_LINE.as_bytes());
    out.push(b'\n');
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let header: Vec<String> = COLUMNS
        .iter()
        .map(|c| c.to_string())
        .chain(names.iter().map(|n| format!("counter.{n}")))
        .collect();
    w.write_record(&header).expect("writing to memory");
    for (t, r) in records.iter().enumerate() {
        let mut row = vec![
            t.to_string(),
            r.seed.to_string(),
            r.algorithm_id.clone(),
            r.instance_id.clone(),
            r.n.to_string(),
            real(r.alg_objective),
            real(r.oracle_objective),
            real(r.ratio),
        ];
        row.extend(
            names
                .iter()
                .map(|n| r.counters.get(*n).map_or(String::new(), |v| v.to_string())),
        );
        w.write_record(&row).expect("writing to memory");
    }
    w.into_inner().expect("flushing to memory")
}

/// Writes `bytes` to `path` through a temporary sibling, so a failed run
/// never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = std::path::PathBuf::from(tmp);
    let result = std::fs::write(&tmp, bytes).and_then(|_| std::fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(BenchError::io(path, e));
    }
    Ok(())
}

/// Human-readable summary of a run.
pub fn summary_text(records: &[TrialRecord]) -> String {
    let Some(s) = RunSummary::from_records(records) else {
        return "no trials\n".into();
    };
    let first = &records[0];
    let mut t = String::new();
    let _ = writeln!(t, "algorithm  {}", first.algorithm_id);
    let _ = writeln!(t, "instance   {}", first.instance_id);
    let _ = writeln!(t, "trials     {}", s.trials);
    let _ = writeln!(
        t,
        "ratio      {:.6} ± {:.6} (min {:.6}, max {:.6})",
        s.mean_ratio, s.std_error, s.min_ratio, s.max_ratio
    );
    let _ = writeln!(t, "objective  {:.6} ± {:.6}", s.mean_alg, s.alg_std_error);
    let _ = writeln!(t, "optimum    {:.6}", s.mean_oracle);
    let _ = writeln!(t, "gap        {:.6}", s.relative_gap());
    for (name, mean) in &s.counter_means {
        let _ = writeln!(t, "counter    {name} = {mean:.6}");
    }
    t
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub trial: u64,
    pub seed: u64,
    pub algorithm: String,
    pub instance: String,
    pub n: usize,
    pub alg_objective: f64,
    pub oracle_objective: f64,
    pub ratio: f64,
    pub counters: Vec<(String, Option<i64>)>,
}

/// Parses a CSV written by [`to_csv`], checking the version line and the
/// fixed columns.
pub fn parse_csv(name: &str, text: &str) -> Result<Vec<Row>> {
    let body = match text.split_once('\n') {
        Some((first, rest)) if first.trim_end() == VERSION_LINE => rest,
        _ => {
            return Err(BenchError::parse(
                name,
                format!("first line must be '{VERSION_LINE}'"),
            ))
        }
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(body.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| BenchError::parse(name, e.to_string()))?
        .clone();
    for (i, want) in COLUMNS.iter().enumerate() {
        match header.get(i) {
            Some(got) if got == *want => {}
            Some(got) => {
                return Err(BenchError::parse(
                    name,
                    format!("column {} must be '{want}', found '{got}'", i + 1),
                ))
            }
            None => return Err(BenchError::parse(name, format!("missing column '{want}'"))),
        }
    }
    let counter_names: Vec<String> = header
        .iter()
        .skip(COLUMNS.len())
        .map(|h| {
            h.strip_prefix("counter.")
                .map(str::to_string)
                .ok_or_else(|| {
                    BenchError::parse(name, format!("column '{h}' is not a counter.<name> column"))
                })
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| BenchError::parse(name, e.to_string()))?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = |i: usize| {
            BenchError::parse(
                name,
                format!(
                    "row {}: bad value '{}' in column '{}'",
                    line + 1,
                    field(i),
                    header.get(i).unwrap_or("?")
                ),
            )
        };
        let num = |i: usize| field(i).parse::<f64>().map_err(|_| bad(i));
        let counters = counter_names
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let i = COLUMNS.len() + j;
                let v = if field(i).is_empty() {
                    None
                } else {
                    Some(field(i).parse().map_err(|_| bad(i))?)
                };
                Ok((c.clone(), v))
            })
            .collect::<Result<_>>()?;
        rows.push(Row {
            trial: field(0).parse().map_err(|_| bad(0))?,
            seed: field(1).parse().map_err(|_| bad(1))?,
            algorithm: field(2).to_string(),
            instance: field(3).to_string(),
            n: field(4).parse().map_err(|_| bad(4))?,
            alg_objective: num(5)?,
            oracle_objective: num(6)?,
            ratio: num(7)?,
            counters,
        });
    }
    Ok(rows)
}

/// Pooled statistics of one (algorithm, instance) group.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub algorithm: String,
    pub instance: String,
    pub trials: usize,
    pub mean_ratio: f64,
    pub std_error: f64,
    pub mean_alg: f64,
    pub mean_oracle: f64,
    /// `|mean_oracle - mean_alg| / mean_oracle`.
    pub gap: f64,
}

/// Groups rows from every file by (algorithm, instance), in order of first
/// appearance. Means pool all trials, so each file counts by its row count.
pub fn aggregate(rows: &[Row]) -> Vec<ReportRow> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in rows {
        let key = (r.algorithm.as_str(), r.instance.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(a, i)| {
            let group: Vec<&Row> = rows
                .iter()
                .filter(|r| r.algorithm == a && r.instance == i)
                .collect();
            let ratios: Vec<f64> = group.iter().map(|r| r.ratio).collect();
            let (mean_ratio, se) = mean_and_stderr(&ratios);
            let mean_alg = group.iter().map(|r| r.alg_objective).sum::<f64>() / group.len() as f64;
            let mean_oracle =
                group.iter().map(|r| r.oracle_objective).sum::<f64>() / group.len() as f64;
            ReportRow {
                algorithm: a.to_string(),
                instance: i.to_string(),
                trials: group.len(),
                mean_ratio,
                std_error: if se.is_nan() { 0.0 } else { se },
                mean_alg,
                mean_oracle,
                gap: (mean_oracle - mean_alg).abs() / mean_oracle,
            }
        })
        .collect()
}

pub fn report_text(rows: &[ReportRow]) -> String {
    let aw = rows
        .iter()
        .map(|r| r.algorithm.len())
        .max()
        .unwrap_or(0)
        .max("algorithm".len());
    let iw = rows
        .iter()
        .map(|r| r.instance.len())
        .max()
        .unwrap_or(0)
        .max("instance".len());
    let mut t = String::new();
    let _ = writeln!(
        t,
        "{:aw$}  {:iw$}  {:>8}  {:>12}  {:>10}  {:>12}  {:>12}  {:>8}",
        "algorithm",
        "instance",
        "trials",
        "mean_ratio",
        "std_error",
        "mean_alg",
        "mean_oracle",
        "gap"
    );
    for r in rows {
        let _ = writeln!(
            t,
            "{:aw$}  {:iw$}  {:>8}  {:>12.6}  {:>10.6}  {:>12.6}  {:>12.6}  {:>8.5}",
            r.algorithm,
            r.instance,
            r.trials,
            r.mean_ratio,
            r.std_error,
            r.mean_alg,
            r.mean_oracle,
            r.gap
        );
    }
    t
}

/// Reads and pools the given CSV files.
pub fn report_files(paths: &[impl AsRef<Path>]) -> Result<Vec<ReportRow>> {
    if paths.is_empty() {
        return Err(BenchError::usage("report needs at least one CSV"));
    }
    let mut rows = Vec::new();
    for p in paths {
        let p = p.as_ref();
        let text = std::fs::read_to_string(p).map_err(|e| BenchError::io(p, e))?;
        rows.extend(parse_csv(&p.display().to_string(), &text)?);
    }
    Ok(aggregate(&rows))
}
