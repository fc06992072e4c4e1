//! Approximation-ratio experiment on random instances: CSV rows and a
//! standalone SVG box plot.

use crate::gda::{GdaEngine, Strategy};
use crate::instances::{gen_random, CapacityRule, DistKind, InstanceError, RandomParams};
use crate::oracle::{optimal_with_table, ratio_of, OracleError, DEFAULT_BUDGET};
use crate::prob::{format_sig, ExactProsTable, McConfig, ProsResult, Value};
use crate::rational;
use rayon::prelude::*;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl From<crate::prob::ProbError> for ExperimentError {
    fn from(e: crate::prob::ProbError) -> Self {
        ExperimentError::Oracle(e.into())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Trials per (size, capacity rule) cell.
    pub trials: usize,
    /// `(n, m)` pairs.
    pub sizes: Vec<(usize, usize)>,
    pub capacity_rules: Vec<CapacityRule>,
    pub strategies: Vec<Strategy>,
    pub seed: u64,
    pub budget: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            trials: 500,
            sizes: vec![(3, 3), (4, 4)],
            capacity_rules: vec![CapacityRule::AllOnes],
            strategies: Strategy::ALL.to_vec(),
            seed: 42,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub capacity_rule: String,
    pub strategy: Strategy,
    pub algorithm_pros: ProsResult,
    pub optimal_pros: ProsResult,
    pub ratio: Value,
}

/// Seed of trial `index`, independent of scheduling.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    crate::prob::stream_key(&[master, index as u64])
}

fn run_trial(
    trial: usize,
    seed: u64,
    n: usize,
    m: usize,
    rule: &CapacityRule,
    cfg: &ExperimentConfig,
) -> Result<Vec<ExperimentRow>, ExperimentError> {
    let inst = gen_random(&RandomParams {
        n,
        m,
        capacities: rule.clone(),
        features: 2,
        dist: DistKind::UniformSimplex,
        seed,
    })?;
    let table = ExactProsTable::new(&inst)?;
    let opt = optimal_with_table(&inst, &table, cfg.budget)?;
    let mc = McConfig::default();
    let mut rows = Vec::with_capacity(cfg.strategies.len());
    for &strategy in &cfg.strategies {
        let mut engine = GdaEngine::new(&inst, strategy, &mc).map_err(OracleError::from)?;
        let (matching, _) = engine.run(&inst);
        let pros = table.pros_unchecked(&inst, &matching);
        rows.push(ExperimentRow {
            trial,
            seed,
            n,
            m,
            capacity_rule: rule.name(),
            strategy,
            ratio: ratio_of(&pros, &opt.best_pros),
            algorithm_pros: pros,
            optimal_pros: opt.best_pros.clone(),
        });
    }
    Ok(rows)
}

/// Runs every cell's trials in parallel; rows come back in trial order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRow>, ExperimentError> {
    let mut jobs = Vec::new();
    for &(n, m) in &cfg.sizes {
        for rule in &cfg.capacity_rules {
            // fail fast on an invalid cell instead of inside a worker
            rule.capacities(n, m)?;
            for _ in 0..cfg.trials {
                let index = jobs.len();
                jobs.push((index, n, m, rule.clone()));
            }
        }
    }
    let chunks: Vec<Vec<ExperimentRow>> = jobs
        .par_iter()
        .map(|(index, n, m, rule)| run_trial(*index, trial_seed(cfg.seed, *index), *n, *m, rule, cfg))
        .collect::<Result<_, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn decimal(v: f64) -> String {
    format_sig(v, 12)
}

fn exact_text(p: &ProsResult) -> String {
    p.exact().map(rational::format).unwrap_or_default()
}

pub fn to_csv(rows: &[ExperimentRow]) -> Result<String, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "trial",
        "seed",
        "n",
        "m",
        "strategy",
        "algorithm_pros",
        "optimal_pros",
        "ratio",
        "capacity_rule",
        "algorithm_pros_exact",
        "optimal_pros_exact",
        "ratio_exact",
    ])?;
    for r in rows {
        w.write_record([
            r.trial.to_string(),
            r.seed.to_string(),
            r.n.to_string(),
            r.m.to_string(),
            r.strategy.to_string(),
            decimal(r.algorithm_pros.value()),
            decimal(r.optimal_pros.value()),
            decimal(r.ratio.to_f64()),
            r.capacity_rule.clone(),
            exact_text(&r.algorithm_pros),
            exact_text(&r.optimal_pros),
            r.ratio.exact().map(rational::format).unwrap_or_default(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Tukey box statistics with linearly interpolated quartiles.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxStats {
    pub count: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn box_stats(values: &[f64]) -> Option<BoxStats> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let (q1, median, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside: Vec<f64> = v.iter().copied().filter(|&x| x >= lo_fence && x <= hi_fence).collect();
    Some(BoxStats {
        count: v.len(),
        q1,
        median,
        q3,
        whisker_low: inside.first().copied().unwrap_or(q1),
        whisker_high: inside.last().copied().unwrap_or(q3),
        outliers: v.into_iter().filter(|&x| x < lo_fence || x > hi_fence).collect(),
    })
}

/// Grouped box plot of ratios: one group per (n, m, rule), one box per strategy.
pub fn render_svg(rows: &[ExperimentRow]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    let (left, right, top, bottom) = (60.0, 20.0, 40.0, 80.0);
    let plot_h = H - top - bottom;
    let y_of = |v: f64| top + (1.0 - v.clamp(0.0, 1.0)) * plot_h;

    let mut groups: Vec<(String, Vec<Strategy>)> = Vec::new();
    for r in rows {
        let key = format!("n={} m={} {}", r.n, r.m, r.capacity_rule);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, strategies)) => {
                if !strategies.contains(&r.strategy) {
                    strategies.push(r.strategy);
                }
            }
            None => groups.push((key, vec![r.strategy])),
        }
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 800 500" width="800" height="500" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="800" height="500" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="400" y="22" text-anchor="middle" font-size="14">Approximation ratio of ProS by strategy</text>"#
    );
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        let y = y_of(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"##,
            W - right,
            left - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{:.2}" stroke="black"/>"#,
        top + plot_h
    );

    let plot_w = W - left - right;
    let group_w = if groups.is_empty() { plot_w } else { plot_w / groups.len() as f64 };
    let colors = ["#4c72b0", "#dd8452", "#55a868", "#c44e52"];
    for (g, (key, strategies)) in groups.iter().enumerate() {
        let gx = left + g as f64 * group_w;
        let slot = group_w / (strategies.len() as f64 + 1.0);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{key}</text>"#,
            gx + group_w / 2.0,
            H - 20.0
        );
        for (k, strategy) in strategies.iter().enumerate() {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| {
                    r.strategy == *strategy && format!("n={} m={} {}", r.n, r.m, r.capacity_rule) == *key
                })
                .map(|r| r.ratio.to_f64())
                .collect();
            let Some(b) = box_stats(&values) else { continue };
            let cx = gx + slot * (k as f64 + 1.0);
            let half = (slot * 0.35).min(30.0);
            let color = colors[k % colors.len()];
            let _ = writeln!(
                svg,
                r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
                y_of(b.whisker_high),
                y_of(b.q3)
            );
            let _ = writeln!(
                svg,
                r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
                y_of(b.q1),
                y_of(b.whisker_low)
            );
            for w in [b.whisker_low, b.whisker_high] {
                let _ = writeln!(
                    svg,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
                    cx - half / 2.0,
                    y_of(w),
                    cx + half / 2.0,
                    y_of(w)
                );
            }
            let _ = writeln!(
                svg,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.6" stroke="black"/>"#,
                cx - half,
                y_of(b.q3),
                2.0 * half,
                (y_of(b.q1) - y_of(b.q3)).max(0.5)
            );
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="2"/>"#,
                cx - half,
                y_of(b.median),
                cx + half,
                y_of(b.median)
            );
            for o in &b.outliers {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{cx:.2}" cy="{:.2}" r="2" fill="none" stroke="{color}"/>"#,
                    y_of(*o)
                );
            }
            let _ = writeln!(
                svg,
                r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                H - bottom + 16.0,
                strategy.name().to_uppercase()
            );
            let _ = writeln!(
                svg,
                r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle" font-size="9">med {:.3}</text>"#,
                H - bottom + 30.0,
                b.median
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}
