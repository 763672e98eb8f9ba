//! Monte-Carlo MISE comparison of single-bandwidth estimators and their
//! aggregates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::density::Density;
use super::ise::{IseGrid, ISE_GRID_POINTS};
use super::rng::{replication_seed, rng_from_seed, substream_seed};
use super::split::{
    av_split_weights, prepare_splits, rt_criterion, rt_weights, SplitPart, SplitScheme,
};
use crate::averaging::{fit_model, solve_weights, Mode, WeightVector};
use crate::bandwidth::{BandwidthSet, Selector};
use crate::error::{Error, Result};
use crate::kernel::Kde;
use crate::numeric::NeumaierSum;
use crate::sample::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Nrd,
    Nrd0,
    Sj,
    Av,
    AvConv,
    AvSplit,
    Rt,
    RtConv,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Nrd,
        Method::Nrd0,
        Method::Sj,
        Method::Av,
        Method::AvConv,
        Method::AvSplit,
        Method::Rt,
        Method::RtConv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Nrd => "nrd",
            Method::Nrd0 => "nrd0",
            Method::Sj => "sj",
            Method::Av => "AV",
            Method::AvConv => "AVconv",
            Method::AvSplit => "AVsplit",
            Method::Rt => "RT",
            Method::RtConv => "RTconv",
        }
    }

    /// Selector for single-bandwidth methods.
    pub fn selector(self) -> Option<Selector> {
        match self {
            Method::Nrd => Some(Selector::Nrd),
            Method::Nrd0 => Some(Selector::Nrd0),
            Method::Sj => Some(Selector::Sj),
            _ => None,
        }
    }

    fn uses_full_average(self) -> bool {
        matches!(self, Method::Av | Method::AvConv)
    }

    fn uses_splits(self) -> bool {
        matches!(self, Method::AvSplit | Method::Rt | Method::RtConv)
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                kind: "method",
                name: s.to_string(),
                expected: Method::ALL.map(Method::name).join(", "),
            })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkConfig {
    pub densities: Vec<Density>,
    pub sample_sizes: Vec<usize>,
    pub methods: Vec<Method>,
    pub replications: usize,
    pub seed: u64,
    /// Experts combined by the aggregates.
    pub selectors: Vec<Selector>,
    pub scheme: SplitScheme,
    pub grid_points: usize,
    pub parallel: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            densities: Density::ALL.to_vec(),
            sample_sizes: vec![50, 100, 200, 500, 1000, 2000],
            methods: Method::ALL.to_vec(),
            replications: 1000,
            seed: 1,
            selectors: Selector::ALL.to_vec(),
            scheme: SplitScheme::default(),
            grid_points: ISE_GRID_POINTS,
            parallel: true,
        }
    }
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 2 {
            return Err(Error::InvalidArgument(format!(
                "at least 2 replications are needed, got {}",
                self.replications
            )));
        }
        if self.densities.is_empty() || self.sample_sizes.is_empty() || self.methods.is_empty() {
            return Err(Error::InvalidArgument(
                "densities, sample sizes and methods must be non-empty".into(),
            ));
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidArgument(
                "grid needs at least 2 points".into(),
            ));
        }
        Ok(())
    }
}

/// ISE (or the failure reason) of every configured method for one replication.
pub type ReplicationOutcome = Vec<std::result::Result<f64, Error>>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiseRow {
    pub density: Density,
    pub n: usize,
    pub method: Method,
    pub mise: f64,
    pub mc_std_error: f64,
    pub replications: usize,
    pub failed: usize,
    pub seed: u64,
    /// False when more than 1% of the replications failed.
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureRecord {
    pub density: Density,
    pub n: usize,
    pub method: Method,
    pub replication: usize,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiseReport {
    pub rows: Vec<MiseRow>,
    pub failures: Vec<FailureRecord>,
}

pub const CSV_HEADER: &str = "density,n,method,mise,mc_se,reps,failed,seed";

/// 17 significant digits.
fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl MiseReport {
    pub fn row(&self, density: Density, n: usize, method: Method) -> Option<&MiseRow> {
        self.rows
            .iter()
            .find(|r| r.density == density && r.n == n && r.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.density,
                r.n,
                r.method,
                fmt_float(r.mise),
                fmt_float(r.mc_std_error),
                r.replications,
                r.failed,
                r.seed
            ));
        }
        out
    }

    /// Human-readable table with MISE and standard errors scaled by 10⁵.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<8} {:>6} {:<8} {:>12} {:>10} {:>6} {:>6}\n",
            "density", "n", "method", "MISE x1e5", "SE x1e5", "reps", "failed"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:<8} {:>6} {:<8} {:>12.2} {:>10.2} {:>6} {:>6}{}\n",
                r.density.name(),
                r.n,
                r.method.name(),
                r.mise * 1e5,
                r.mc_std_error * 1e5,
                r.replications,
                r.failed,
                if r.valid { "" } else { "  INVALID" }
            ));
        }
        out
    }
}

type FullAverage = (Vec<Kde>, Vec<(Mode, Result<WeightVector>)>);

/// Everything fitted for one replication before ISEs are computed.
struct Fitted {
    full: BTreeMap<Selector, Result<Kde>>,
    average: Option<Result<FullAverage>>,
    splits: Option<Result<Vec<SplitPart>>>,
    split_weights: BTreeMap<Method, Result<Vec<WeightVector>>>,
}

fn fit_replication(sample: &Sample, config: &BenchmarkConfig, rep_seed: u64) -> Fitted {
    let methods = &config.methods;
    let mut wanted: Vec<Selector> = methods.iter().filter_map(|m| m.selector()).collect();
    let wants_average = methods.iter().any(|m| m.uses_full_average());
    if wants_average {
        wanted.extend(config.selectors.iter().copied());
    }
    wanted.sort();
    wanted.dedup();
    let full: BTreeMap<Selector, Result<Kde>> = wanted
        .into_iter()
        .map(|sel| {
            (
                sel,
                sel.select(sample).and_then(|h| Kde::new(sample.clone(), h)),
            )
        })
        .collect();

    let average = wants_average.then(|| {
        let experts = config
            .selectors
            .iter()
            .map(|sel| full[sel].clone())
            .collect::<Result<Vec<Kde>>>()?;
        let set = BandwidthSet::new(
            config
                .selectors
                .iter()
                .zip(&experts)
                .map(|(s, e)| (s.name().to_string(), e.bandwidth()))
                .collect(),
        )?;
        let (model, _, _) = fit_model(sample, &set)?;
        let weights = [Mode::Linear, Mode::Convex]
            .into_iter()
            .filter(|mode| {
                methods.contains(match mode {
                    Mode::Linear => &Method::Av,
                    Mode::Convex => &Method::AvConv,
                })
            })
            .map(|mode| (mode, solve_weights(&model.sigma, mode)))
            .collect();
        Ok((experts, weights))
    });

    let wants_splits = methods.iter().any(|m| m.uses_splits());
    let splits = wants_splits.then(|| {
        prepare_splits(
            sample,
            &config.selectors,
            &config.scheme,
            substream_seed(rep_seed, "split"),
        )
    });
    let mut split_weights = BTreeMap::new();
    if let Some(Ok(parts)) = &splits {
        for &m in methods.iter().filter(|m| m.uses_splits()) {
            let w = parts
                .iter()
                .map(|p| match m {
                    Method::AvSplit => av_split_weights(p).map(|(w, _)| w),
                    Method::Rt => {
                        rt_criterion(p).and_then(|(g, b)| rt_weights(&g, &b, Mode::Linear))
                    }
                    _ => rt_criterion(p).and_then(|(g, b)| rt_weights(&g, &b, Mode::Convex)),
                })
                .collect::<Result<Vec<_>>>();
            split_weights.insert(m, w);
        }
    }
    Fitted {
        full,
        average,
        splits,
        split_weights,
    }
}

fn combine(grids: &[&Vec<f64>], weights: &[f64], scale: f64, out: &mut [f64]) {
    for (g, &w) in grids.iter().zip(weights) {
        for (o, v) in out.iter_mut().zip(g.iter()) {
            *o += scale * w * v;
        }
    }
}

/// Runs one replication: draws the sample, fits every configured method
/// and returns their ISEs in the order of `config.methods`.
pub fn run_replication(
    config: &BenchmarkConfig,
    density: Density,
    n: usize,
    replication: usize,
) -> ReplicationOutcome {
    let rep_seed = replication_seed(config.seed, density, n, replication);
    let sample = match density.sample_with(n, &mut rng_from_seed(rep_seed)) {
        Ok(s) => s,
        Err(e) => return vec![Err(e); config.methods.len()],
    };
    let fitted = fit_replication(&sample, config, rep_seed);

    // one padded window for every estimate of this replication
    let mut max_h: f64 = 0.0;
    for kde in fitted.full.values().flatten() {
        max_h = max_h.max(kde.bandwidth());
    }
    if let Some(Ok(parts)) = &fitted.splits {
        for e in parts.iter().flat_map(|p| &p.experts) {
            max_h = max_h.max(e.bandwidth());
        }
    }
    let spec = density.spec();
    let grid = IseGrid::with_points(&spec, max_h, config.grid_points);

    let full_values: BTreeMap<Selector, Vec<f64>> = fitted
        .full
        .iter()
        .filter_map(|(s, k)| k.as_ref().ok().map(|k| (*s, grid.kde_values(k))))
        .collect();
    let any_split_ok = fitted.split_weights.values().any(|w| w.is_ok());
    let split_values: Vec<Vec<Vec<f64>>> = match &fitted.splits {
        Some(Ok(parts)) if any_split_ok => parts
            .iter()
            .map(|p| p.experts.iter().map(|e| grid.kde_values(e)).collect())
            .collect(),
        _ => Vec::new(),
    };

    let points = grid.xs().len();
    config
        .methods
        .iter()
        .map(|&method| {
            if let Some(sel) = method.selector() {
                fitted.full[&sel].as_ref().map_err(Clone::clone)?;
                return Ok(grid.ise_of_values(&full_values[&sel]));
            }
            if method.uses_full_average() {
                let (_, weights) = fitted
                    .average
                    .as_ref()
                    .expect("fitted")
                    .as_ref()
                    .map_err(Clone::clone)?;
                let mode = if method == Method::Av {
                    Mode::Linear
                } else {
                    Mode::Convex
                };
                let w = weights
                    .iter()
                    .find(|(m, _)| *m == mode)
                    .expect("solved")
                    .1
                    .as_ref()
                    .map_err(Clone::clone)?;
                let grids: Vec<&Vec<f64>> =
                    config.selectors.iter().map(|s| &full_values[s]).collect();
                let mut values = vec![0.0; points];
                combine(&grids, &w.weights, 1.0, &mut values);
                return Ok(grid.ise_of_values(&values));
            }
            fitted
                .splits
                .as_ref()
                .expect("fitted")
                .as_ref()
                .map_err(Clone::clone)?;
            let per_split = fitted.split_weights[&method]
                .as_ref()
                .map_err(Clone::clone)?;
            let scale = 1.0 / per_split.len() as f64;
            let mut values = vec![0.0; points];
            for (w, grids) in per_split.iter().zip(&split_values) {
                let refs: Vec<&Vec<f64>> = grids.iter().collect();
                combine(&refs, &w.weights, scale, &mut values);
            }
            Ok(grid.ise_of_values(&values))
        })
        .collect()
}

/// Mean, Monte-Carlo standard error and failure count of one method.
fn summarize(values: impl Iterator<Item = std::result::Result<f64, ()>>) -> (f64, f64, usize) {
    let mut ok = Vec::new();
    let mut failed = 0;
    for v in values {
        match v {
            Ok(x) => ok.push(x),
            Err(()) => failed += 1,
        }
    }
    if ok.is_empty() {
        return (f64::NAN, f64::NAN, failed);
    }
    let m = ok.len() as f64;
    let mean = ok.iter().copied().collect::<NeumaierSum>().value() / m;
    let se = if ok.len() > 1 {
        let ss = ok
            .iter()
            .map(|x| (x - mean) * (x - mean))
            .collect::<NeumaierSum>()
            .value();
        (ss / (m - 1.0)).sqrt() / m.sqrt()
    } else {
        0.0
    };
    (mean, se, failed)
}

/// Estimated MISE of every configured method on every (density, n) cell.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<MiseReport> {
    config.validate()?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &density in &config.densities {
        for &n in &config.sample_sizes {
            let outcomes: Vec<ReplicationOutcome> = if config.parallel {
                (0..config.replications)
                    .into_par_iter()
                    .map(|r| run_replication(config, density, n, r))
                    .collect()
            } else {
                (0..config.replications)
                    .map(|r| run_replication(config, density, n, r))
                    .collect()
            };
            for (mi, &method) in config.methods.iter().enumerate() {
                for (r, outcome) in outcomes.iter().enumerate() {
                    if let Err(e) = &outcome[mi] {
                        failures.push(FailureRecord {
                            density,
                            n,
                            method,
                            replication: r,
                            reason: e.code(),
                        });
                    }
                }
                let (mise, se, failed) = summarize(
                    outcomes
                        .iter()
                        .map(|o| o[mi].as_ref().copied().map_err(|_| ())),
                );
                rows.push(MiseRow {
                    density,
                    n,
                    method,
                    mise,
                    mc_std_error: se,
                    replications: config.replications,
                    failed,
                    seed: config.seed,
                    valid: (failed as f64) <= 0.01 * config.replications as f64,
                });
            }
        }
    }
    Ok(MiseReport { rows, failures })
}
