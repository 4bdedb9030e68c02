//! Reproducible Monte Carlo experiments.
//!
//! Sample `i` of role `r` draws from `RngStream::new(seed, (r << 48) | i)`, so
//! output depends only on the spec, never on the number of worker threads.

mod spec;
mod stats;

pub use spec::{DistributionSpec, ExperimentKind, ExperimentSpec};
pub use stats::{ks_one_sample, ks_two_sample, ks_two_sample_critical, EmpiricalCdf};

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::coupling::merge_all;
use crate::descent::{
    block_product_correlation, contains_descents, correlation, kernel_coeffs,
    EmpiricalCorrelation, DEFAULT_WILSON_Z,
};
use crate::error::{Error, Result};
use crate::limits::{rescale_edge_real, vkls_sup_distance, F2Evaluator};
use crate::perm::Permutation;
use crate::rng::RngStream;
use crate::rsk::rsk_shape;
use crate::samplers::{Distribution, PermutationSampler, Sampler};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PERMLAB_THREADS";

const ROLE_DIST: u64 = 0;
const ROLE_REFERENCE: u64 = 1;

pub fn stream(seed: u64, role: u64, index: usize) -> RngStream {
    RngStream::new(seed, (role << 48) | index as u64)
}

/// First `k` rows of the RSK shape, padded with zeros.
pub fn edge_rows(sigma: &Permutation, k: usize) -> Vec<usize> {
    if k == 1 {
        return vec![sigma.lis_length()];
    }
    rsk_shape(sigma).top_rows(k)
}

/// First `k` columns of the RSK shape, padded with zeros.
pub fn edge_rows_conjugate(sigma: &Permutation, k: usize) -> Vec<usize> {
    if k == 1 {
        return vec![sigma.lds_length()];
    }
    rsk_shape(sigma).conjugate().top_rows(k)
}

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Int(v) => write!(f, "{v}"),
            Self::Float(v) => write!(f, "{v:.16e}"),
            Self::Text(s) => f.write_str(s),
        }
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Self::Int(v as i64)
    }
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Self::Int(v) => Some(*v as f64),
            Self::Float(v) => Some(*v),
            Self::Text(_) => None,
        }
    }
}

/// Table of records plus named summary statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub kind: ExperimentKind,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Vec<(String, f64)>,
}

impl ExperimentResult {
    fn new(kind: ExperimentKind, header: &[&str]) -> Self {
        Self {
            kind,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn summary_value(&self, name: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let at = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| &r[at]).collect())
    }

    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.into_iter().map(Value::as_f64).collect()
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII output")
    }

    /// Summary as `statistic,value` CSV.
    pub fn summary_csv(&self) -> String {
        let mut s = String::from("statistic,value\n");
        for (k, v) in &self.summary {
            s.push_str(&format!("{k},{}\n", Value::Float(*v)));
        }
        s
    }
}

/// Runs `f` on a pool sized by [`THREADS_ENV`] when it is set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok());
    match cap {
        Some(threads) if threads > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map(|pool| pool.install(f))
            .unwrap_or_else(|e| panic!("thread pool: {e}")),
        _ => f(),
    }
}

/// `x₀` of a diluted law, zero otherwise.
fn dilution(d: &Distribution) -> f64 {
    match d {
        Distribution::Diluted { x0, .. } => *x0,
        _ => 0.0,
    }
}

/// Runs the experiment and writes its CSV to `spec.out` when set.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let result = run_in_memory(spec)?;
    if let Some(path) = &spec.out {
        let file = std::fs::File::create(path)?;
        result.write_csv(std::io::BufWriter::new(file))?;
    }
    Ok(result)
}

/// Runs the experiment without touching the filesystem.
pub fn run_in_memory(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let dist = spec.validate()?;
    let sampler = dist.sampler(spec.n)?;
    with_thread_cap(|| match spec.kind {
        ExperimentKind::TwEdge => tw_edge(spec, &dist, &sampler),
        ExperimentKind::Vkls => Ok(vkls(spec, &sampler)),
        ExperimentKind::DescentCorr => descent_corr(spec, &dist, &sampler),
        ExperimentKind::DescentDensity => Ok(descent_density(spec, &dist, &sampler)),
        ExperimentKind::EdgeTwoSample => edge_two_sample(spec, &dist, &sampler),
        ExperimentKind::Couple => Ok(couple(spec, &sampler)),
    })
}

fn samples_map<T: Send>(
    spec: &ExperimentSpec,
    role: u64,
    n: usize,
    sampler: &(impl PermutationSampler + ?Sized),
    f: impl Fn(Permutation) -> T + Sync,
) -> Vec<T> {
    (0..spec.reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(spec.seed, role, i);
            f(sampler.sample(n, &mut rng))
        })
        .collect()
}

/// Effective size used for rescaling: `(1 − x₀)n` for columns of a diluted law.
fn effective_size(spec: &ExperimentSpec, dist: &Distribution) -> f64 {
    if spec.conjugate {
        (1.0 - dilution(dist)) * spec.n as f64
    } else {
        spec.n as f64
    }
}

fn rows_of(spec: &ExperimentSpec) -> impl Fn(&Permutation) -> Vec<usize> + Sync + '_ {
    move |p| {
        if spec.conjugate {
            edge_rows_conjugate(p, spec.k)
        } else {
            edge_rows(p, spec.k)
        }
    }
}

/// `F₂` at the distinct values of a lattice sample.
fn ks_against_f2(cdf: &EmpiricalCdf, order: usize) -> f64 {
    let eval = F2Evaluator::new(order);
    let mut memo: HashMap<u64, f64> = HashMap::new();
    for &v in cdf.values() {
        memo.entry(v.to_bits()).or_insert_with(|| eval.cdf(v));
    }
    ks_one_sample(cdf, |v| memo[&v.to_bits()])
}

fn tw_edge(spec: &ExperimentSpec, dist: &Distribution, sampler: &Sampler) -> Result<ExperimentResult> {
    let m = effective_size(spec, dist);
    let rows = samples_map(spec, ROLE_DIST, spec.n, sampler, |p| rows_of(spec)(&p));
    let mut header = vec!["index".to_string()];
    for j in 1..=spec.k {
        header.push(format!("row{j}"));
    }
    for j in 1..=spec.k {
        header.push(format!("rescaled{j}"));
    }
    let mut res = ExperimentResult::new(ExperimentKind::TwEdge, &[]);
    res.header = header;
    let mut first = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let mut rec: Vec<Value> = vec![i.into()];
        rec.extend(r.iter().map(|&v| Value::from(v)));
        let scaled: Vec<f64> = r.iter().map(|&v| rescale_edge_real(v, m)).collect();
        first.push(scaled[0]);
        rec.extend(scaled.into_iter().map(Value::from));
        res.rows.push(rec);
    }
    let cdf = EmpiricalCdf::new(first)?;
    res.summary.push(("mean".into(), cdf.mean()));
    res.summary.push(("variance".into(), cdf.variance()));
    res.summary.push(("ks_f2".into(), ks_against_f2(&cdf, spec.order)));
    Ok(res)
}

fn vkls(spec: &ExperimentSpec, sampler: &Sampler) -> ExperimentResult {
    let n = spec.n;
    let d = samples_map(spec, ROLE_DIST, n, sampler, |p| {
        vkls_sup_distance(&rsk_shape(&p), n).expect("shape of size n")
    });
    let mut res = ExperimentResult::new(ExperimentKind::Vkls, &["index", "sup_distance"]);
    for (i, &v) in d.iter().enumerate() {
        res.rows.push(vec![i.into(), v.into()]);
    }
    let within = d.iter().filter(|&&v| v <= spec.threshold).count();
    res.summary.push(("mean".into(), d.iter().sum::<f64>() / d.len() as f64));
    res.summary.push(("max".into(), d.iter().copied().fold(0.0, f64::max)));
    res.summary.push(("threshold".into(), spec.threshold));
    res.summary.push(("within_threshold".into(), within as f64));
    res
}

fn descent_corr(spec: &ExperimentSpec, dist: &Distribution, sampler: &Sampler) -> Result<ExperimentResult> {
    let n = spec.n;
    if let Some(bad) = spec.sets.iter().find(|q| q.max() + 1 > n) {
        return Err(Error::InvalidParameter(format!("{bad} out of range for n = {n}")));
    }
    let sets = &spec.sets;
    let hits = (0..spec.reps)
        .into_par_iter()
        .map(|i| {
            let p = sampler.sample(n, &mut stream(spec.seed, ROLE_DIST, i));
            sets.iter().map(|q| usize::from(contains_descents(&p, q))).collect::<Vec<_>>()
        })
        .reduce(
            || vec![0; sets.len()],
            |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect(),
        );
    let x0 = dist.limiting_dust();
    let band = sets.iter().map(|q| q.default_band()).max().unwrap_or(4);
    let kernel = kernel_coeffs(x0, band)?;
    let mut res = ExperimentResult::new(
        ExperimentKind::DescentCorr,
        &[
            "set", "hits", "reps", "empirical", "std_error", "wilson_low", "wilson_high",
            "determinant", "block_product", "z_score",
        ],
    );
    let mut worst = 0.0f64;
    for (q, &h) in sets.iter().zip(&hits) {
        let e = EmpiricalCorrelation::from_counts(h, spec.reps, DEFAULT_WILSON_Z);
        let det = correlation(&kernel, q)?;
        let sd = (det * (1.0 - det) / spec.reps as f64).sqrt();
        let z = if sd > 0.0 { (e.estimate - det) / sd } else { 0.0 };
        worst = worst.max(z.abs());
        res.rows.push(vec![
            format!("\"{}\"", q.elements().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")).into(),
            h.into(),
            spec.reps.into(),
            e.estimate.into(),
            e.std_error.into(),
            e.wilson_low.into(),
            e.wilson_high.into(),
            det.into(),
            block_product_correlation(x0, q).into(),
            z.into(),
        ]);
    }
    res.summary.push(("x0".into(), x0));
    res.summary.push(("max_abs_z".into(), worst));
    Ok(res)
}

fn descent_density(spec: &ExperimentSpec, dist: &Distribution, sampler: &Sampler) -> ExperimentResult {
    let n = spec.n;
    let counts = samples_map(spec, ROLE_DIST, n, sampler, |p| p.descent_count());
    let mut res = ExperimentResult::new(ExperimentKind::DescentDensity, &["index", "descents", "density"]);
    let dens: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    for (i, (&c, &d)) in counts.iter().zip(&dens).enumerate() {
        res.rows.push(vec![i.into(), c.into(), d.into()]);
    }
    let m = dens.iter().sum::<f64>() / dens.len() as f64;
    let var = if dens.len() > 1 {
        dens.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (dens.len() - 1) as f64
    } else {
        0.0
    };
    let x0 = dist.limiting_dust();
    res.summary.push(("mean".into(), m));
    res.summary.push(("std_error".into(), (var / dens.len() as f64).sqrt()));
    res.summary.push(("limit".into(), 0.5 * (1.0 - x0 * x0)));
    res
}

fn edge_two_sample(spec: &ExperimentSpec, dist: &Distribution, sampler: &Sampler) -> Result<ExperimentResult> {
    let m = effective_size(spec, dist);
    let n_ref = (m.round() as usize).max(1);
    let ours = samples_map(spec, ROLE_DIST, spec.n, sampler, |p| rows_of(spec)(&p));
    let reference = samples_map(spec, ROLE_REFERENCE, n_ref, &Sampler::Uniform, |p| rows_of(spec)(&p));
    let mut header = vec!["group".to_string(), "index".to_string()];
    for j in 1..=spec.k {
        header.push(format!("row{j}"));
    }
    for j in 1..=spec.k {
        header.push(format!("rescaled{j}"));
    }
    let mut res = ExperimentResult::new(ExperimentKind::EdgeTwoSample, &[]);
    res.header = header;
    let mut scaled_ours = vec![Vec::with_capacity(spec.reps); spec.k];
    let mut scaled_ref = vec![Vec::with_capacity(spec.reps); spec.k];
    for (group, data, size, store) in [
        ("dist", &ours, m, &mut scaled_ours),
        ("reference", &reference, n_ref as f64, &mut scaled_ref),
    ] {
        for (i, r) in data.iter().enumerate() {
            let mut rec: Vec<Value> = vec![group.into(), i.into()];
            rec.extend(r.iter().map(|&v| Value::from(v)));
            for (j, &v) in r.iter().enumerate() {
                let s = rescale_edge_real(v, size);
                store[j].push(s);
                rec.push(s.into());
            }
            res.rows.push(rec);
        }
    }
    for j in 0..spec.k {
        let a = EmpiricalCdf::new(scaled_ours[j].clone())?;
        let b = EmpiricalCdf::new(scaled_ref[j].clone())?;
        res.summary.push((format!("ks_two_sample_row{}", j + 1), ks_two_sample(&a, &b)));
        if j == 0 {
            res.summary.push(("ks_f2_dist".into(), ks_against_f2(&a, spec.order)));
            res.summary.push(("ks_f2_reference".into(), ks_against_f2(&b, spec.order)));
            res.summary.push(("mean_dist".into(), a.mean()));
            res.summary.push(("mean_reference".into(), b.mean()));
        }
    }
    res.summary.push(("reference_n".into(), n_ref as f64));
    res.summary.push((
        "ks_critical_99".into(),
        ks_two_sample_critical(spec.reps, spec.reps, 0.01),
    ));
    Ok(res)
}

fn couple(spec: &ExperimentSpec, sampler: &Sampler) -> ExperimentResult {
    let n = spec.n;
    let recs = (0..spec.reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(spec.seed, ROLE_DIST, i);
            let p = sampler.sample(n, &mut rng);
            let t = merge_all(&p, &mut rng);
            (p.cycle_count(), p.lis_length(), t.lis_length())
        })
        .collect::<Vec<_>>();
    let mut res = ExperimentResult::new(
        ExperimentKind::Couple,
        &["index", "cycles", "lis_before", "lis_after", "bound", "within_bound"],
    );
    let mut violations = 0;
    for (i, &(c, a, b)) in recs.iter().enumerate() {
        let bound = 2 * (c - 1);
        let ok = a.abs_diff(b) <= bound;
        violations += usize::from(!ok);
        res.rows.push(vec![i.into(), c.into(), a.into(), b.into(), bound.into(), ok.into()]);
    }
    res.summary.push(("violations".into(), violations as f64));
    res
}
