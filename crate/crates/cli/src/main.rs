use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fbmatch::experiment::{self, ExperimentConfig, ExperimentError};
use fbmatch::gda::{run_gda, Strategy};
use fbmatch::goldens::{paper_goldens, run_goldens};
use fbmatch::instances::{canonical, gen_random, CapacityRule, DistKind, FamilyParams, RandomParams};
use fbmatch::oracle::{self, audit_ic, IcLevel, MisreportSpace, OracleError};
use fbmatch::prob::{self, McConfig, ProsResult};
use fbmatch::rational::{self, Rational};
use fbmatch::{parse_instance, parse_matching, Instance, Matching};
use serde_json::{json, Value as Json};
use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_GOLDEN: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "fbmatch", version, about = "School choice with feature-based uncertain preferences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct McArgs {
    /// Monte Carlo samples, used only when no exact evaluator applies.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl McArgs {
    fn config(&self) -> McConfig {
        McConfig {
            samples: self.samples,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run GDA with one strategy and report the matching and its ProS.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value = "heuf")]
        strategy: Strategy,
        #[command(flatten)]
        mc: McArgs,
        /// Print round-by-round proposals and rejections.
        #[arg(long)]
        trace: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the ProS of a given matching (a file or inline text).
    Pros {
        instance: PathBuf,
        matching: String,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive search for the matching of maximum ProS.
    Optimal {
        instance: PathBuf,
        #[arg(long, default_value_t = oracle::DEFAULT_BUDGET)]
        budget: u64,
        /// Also report this strategy's approximation ratio.
        #[arg(long)]
        strategy: Option<Strategy>,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit incentive compatibility over deterministic misreports.
    AuditIc {
        instance: PathBuf,
        #[arg(long, default_value = "heuf")]
        strategy: Strategy,
        #[arg(long, value_enum, default_value = "certainty")]
        level: Level,
        #[arg(long, default_value_t = oracle::DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Approximation ratios on random instances, written as CSV and SVG.
    Experiment {
        /// Trials per (size, capacity rule) cell.
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Comma-separated sizes `NxM` (or `N` for a square instance).
        #[arg(long, default_value = "3x3,4x4")]
        sizes: String,
        #[arg(long, value_enum, default_value = "ones")]
        capacities: CapacityChoice,
        /// Repeat to select strategies; all four by default.
        #[arg(long = "strategy")]
        strategies: Vec<Strategy>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = oracle::DEFAULT_BUDGET)]
        budget: u64,
        /// CSV path; the SVG is written next to it.
        #[arg(long, default_value = "ratios.csv")]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Check every named golden value; exit 1 if any fails.
    PaperCheck {
        /// Override an expectation, e.g. `example1_3.loicv.pros=10/17`.
        #[arg(long = "expect", value_name = "NAME=VALUE")]
        expect: Vec<String>,
    },
    /// Emit a canonical or random instance as JSON.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Level {
    Certainty,
    Rationality,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CapacityChoice {
    Ones,
    Total,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Example1_1,
    Example1_2,
    Example1_3,
    Theorem5,
    Theorem8,
    HerfTight,
    GoldenRatio,
    NonTransitive,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DistChoice {
    Uniform,
    Discrete,
    PointMass,
    Beta,
    SymmetricBeta,
}

#[derive(Subcommand)]
enum GenCommand {
    Family {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "1/2")]
        y: String,
        #[arg(long, default_value = "1/2")]
        z: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Random {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 2)]
        features: usize,
        #[arg(long, value_enum, default_value = "uniform")]
        dist: DistChoice,
        /// Support size for `--dist discrete`.
        #[arg(long, default_value_t = 3)]
        points: usize,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 5.0)]
        beta: f64,
        #[arg(long, value_enum, default_value = "ones")]
        capacities: CapacityChoice,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    let budget = e.chain().any(|cause| {
        matches!(cause.downcast_ref::<OracleError>(), Some(OracleError::BudgetExceeded { .. }))
            || matches!(
                cause.downcast_ref::<ExperimentError>(),
                Some(ExperimentError::Oracle(OracleError::BudgetExceeded { .. }))
            )
    });
    if budget {
        EXIT_BUDGET
    } else {
        EXIT_INPUT
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve {
            instance,
            strategy,
            mc,
            trace,
            format,
            out,
        } => {
            let inst = load_instance(&instance)?;
            let mc = mc.config();
            let (matching, gda_trace) = run_gda(&inst, strategy, &mc)?;
            let pros = prob::pros_auto(&inst, &matching, &mc)?;
            let breakdown = breakdown_json(&inst, &matching, &mc)?;
            let text = match format {
                Format::Json => {
                    let mut doc = json!({
                        "strategy": strategy.name(),
                        "matching": matching.to_json(&inst),
                        "pros": pros_json(&pros),
                        "students": breakdown,
                    });
                    if trace {
                        doc["trace"] = trace_json(&inst, &gda_trace);
                    }
                    pretty(&doc)
                }
                _ => {
                    let mut s = String::new();
                    if trace {
                        s.push_str(&gda_trace.render(&inst));
                    }
                    s.push_str(&format!("strategy: {}\n", strategy.name()));
                    s.push_str(&format!("matching: {}\n", matching.display(&inst)));
                    s.push_str(&breakdown_text(&breakdown));
                    s.push_str(&format!("pros: {pros} ({})\n", pros.kind()));
                    s
                }
            };
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Pros {
            instance,
            matching,
            mc,
            format,
            out,
        } => {
            let inst = load_instance(&instance)?;
            let text = if Path::new(&matching).is_file() {
                fs::read_to_string(&matching).with_context(|| format!("reading {matching}"))?
            } else {
                matching
            };
            let m = parse_matching(&inst, &text)?;
            let mc = mc.config();
            let pros = prob::pros_auto(&inst, &m, &mc)?;
            let breakdown = breakdown_json(&inst, &m, &mc)?;
            let text = match format {
                Format::Json => pretty(&json!({
                    "matching": m.to_json(&inst),
                    "pros": pros_json(&pros),
                    "students": breakdown,
                })),
                _ => format!(
                    "matching: {}\n{}pros: {pros} ({})\n",
                    m.display(&inst),
                    breakdown_text(&breakdown),
                    pros.kind()
                ),
            };
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Optimal {
            instance,
            budget,
            strategy,
            mc,
            format,
            out,
        } => {
            let inst = load_instance(&instance)?;
            let best = oracle::optimal_pros(&inst, budget)?;
            let ratio = match strategy {
                Some(s) => Some(oracle::approx_ratio(&inst, s, &mc.config(), budget)?),
                None => None,
            };
            let text = match format {
                Format::Json => {
                    let mut doc = json!({
                        "best_matching": best.best_matching.to_json(&inst),
                        "best_pros": pros_json(&best.best_pros),
                        "matchings_examined": best.matchings_examined,
                    });
                    if let Some(r) = &ratio {
                        doc["strategy"] = json!(r.strategy.name());
                        doc["matching"] = r.matching.to_json(&inst);
                        doc["algorithm_pros"] = pros_json(&r.algorithm_pros);
                        doc["ratio"] = json!(r.ratio.to_string());
                    }
                    pretty(&doc)
                }
                _ => {
                    let mut s = format!(
                        "best matching: {}\nbest pros: {}\nmatchings examined: {}\n",
                        best.best_matching.display(&inst),
                        best.best_pros,
                        best.matchings_examined
                    );
                    if let Some(r) = &ratio {
                        s.push_str(&format!(
                            "{} matching: {}\n{} pros: {}\nratio: {}\n",
                            r.strategy.name(),
                            r.matching.display(&inst),
                            r.strategy.name(),
                            r.algorithm_pros,
                            r.ratio
                        ));
                    }
                    s
                }
            };
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Command::AuditIc {
            instance,
            strategy,
            level,
            budget,
            mc,
            format,
            out,
        } => {
            let inst = load_instance(&instance)?;
            let level = match level {
                Level::Certainty => IcLevel::Certainty,
                Level::Rationality => IcLevel::Rationality,
            };
            let report = audit_ic(
                &inst,
                strategy,
                level,
                &MisreportSpace::DeterministicOrders,
                &mc.config(),
                budget,
            )?;
            let college = |c: Option<usize>| c.map(|c| inst.college_id(c).to_string());
            let text = match format {
                Format::Json => pretty(&json!({
                    "level": level.name(),
                    "strategy": strategy.name(),
                    "misreports_tried": report.misreports_tried,
                    "summary": report.summary(),
                    "violations": report.violations.iter().map(|v| json!({
                        "student": inst.student_id(v.student),
                        "misreport": v.misreport,
                        "truthful": college(v.truthful),
                        "obtained": college(v.obtained),
                        "probability": v.probability.to_string(),
                    })).collect::<Vec<_>>(),
                })),
                _ => {
                    let mut s = format!("{}\n", report.summary());
                    for v in &report.violations {
                        s.push_str(&format!(
                            "  {} reporting {}: {} -> {} with probability {}\n",
                            inst.student_id(v.student),
                            v.misreport,
                            college(v.truthful).unwrap_or_else(|| "-".into()),
                            college(v.obtained).unwrap_or_else(|| "-".into()),
                            v.probability
                        ));
                    }
                    s
                }
            };
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Experiment {
            trials,
            sizes,
            capacities,
            strategies,
            seed,
            budget,
            out,
            svg,
        } => {
            let cfg = ExperimentConfig {
                trials,
                sizes: parse_sizes(&sizes)?,
                capacity_rules: capacity_rules(capacities),
                strategies: if strategies.is_empty() {
                    Strategy::ALL.to_vec()
                } else {
                    strategies
                },
                seed,
                budget,
            };
            let rows = experiment::run_experiment(&cfg)?;
            let csv = experiment::to_csv(&rows)?;
            write_file(&out, &csv)?;
            let svg_path = svg.unwrap_or_else(|| out.with_extension("svg"));
            write_file(&svg_path, &experiment::render_svg(&rows))?;
            println!("wrote {} rows to {} and a box plot to {}", rows.len(), out.display(), svg_path.display());
            for &s in &cfg.strategies {
                let ratios: Vec<f64> = rows.iter().filter(|r| r.strategy == s).map(|r| r.ratio.to_f64()).collect();
                if let Some(b) = experiment::box_stats(&ratios) {
                    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                    println!("{:>5}: median {:.4}, q1 {:.4}, q3 {:.4}, min {:.4}", s.name(), b.median, b.q1, b.q3, min);
                }
            }
            Ok(0)
        }
        Command::PaperCheck { expect } => {
            let mut overrides = HashMap::new();
            for e in &expect {
                let (k, v) = e
                    .split_once('=')
                    .ok_or_else(|| anyhow!("--expect takes NAME=VALUE, got {e:?}"))?;
                overrides.insert(k.trim().to_string(), v.trim().to_string());
            }
            let goldens = paper_goldens();
            for k in overrides.keys() {
                if !goldens.iter().any(|g| &g.name == k) {
                    bail!("unknown golden {k:?}");
                }
            }
            let outcomes = run_goldens(&goldens, &overrides);
            for o in &outcomes {
                println!("{}", o.line());
            }
            let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.name.as_str()).collect();
            println!("{} of {} goldens passed", outcomes.len() - failed.len(), outcomes.len());
            if failed.is_empty() {
                Ok(0)
            } else {
                println!("failed: {}", failed.join(", "));
                Ok(EXIT_GOLDEN)
            }
        }
        Command::Gen { what } => {
            let (inst, out) = match what {
                GenCommand::Family {
                    family,
                    delta,
                    epsilon,
                    n,
                    k,
                    y,
                    z,
                    out,
                } => {
                    let rat = |s: Option<String>, default: (i64, i64)| -> Result<Rational> {
                        match s {
                            Some(s) => rational::parse(&s).map_err(|e| anyhow!(e)),
                            None => Ok(rational::frac(default.0, default.1)),
                        }
                    };
                    let params = match family {
                        Family::Example1_1 => FamilyParams::Example1_1,
                        Family::Example1_2 => FamilyParams::Example1_2,
                        Family::Example1_3 => FamilyParams::Example1_3,
                        Family::Theorem5 => FamilyParams::Theorem5 {
                            delta: rat(delta, (1, 10))?,
                            epsilon: rat(epsilon, (1, 1000))?,
                        },
                        Family::Theorem8 => FamilyParams::Theorem8 {
                            delta: rat(delta, (1, 10))?,
                            epsilon: rat(epsilon, (1, 1000))?,
                        },
                        Family::HerfTight => FamilyParams::HerfTight {
                            n,
                            delta: rat(delta, (1, 10))?,
                            epsilon: rat(epsilon, (1, 1000))?,
                        },
                        Family::GoldenRatio => FamilyParams::GoldenRatio {
                            k,
                            y: rat(Some(y), (1, 2))?,
                            z: rat(Some(z), (1, 2))?,
                        },
                        Family::NonTransitive => FamilyParams::NonTransitive,
                    };
                    (canonical(&params)?, out)
                }
                GenCommand::Random {
                    n,
                    m,
                    features,
                    dist,
                    points,
                    alpha,
                    beta,
                    capacities,
                    seed,
                    out,
                } => {
                    let rule = match capacities {
                        CapacityChoice::Ones => CapacityRule::AllOnes,
                        CapacityChoice::Total => CapacityRule::TotalSeatsEqualsN,
                        CapacityChoice::Both => bail!("gen random takes one capacity rule"),
                    };
                    let dist = match dist {
                        DistChoice::Uniform => DistKind::UniformSimplex,
                        DistChoice::Discrete => DistKind::Discrete { points },
                        DistChoice::PointMass => DistKind::PointMass,
                        DistChoice::Beta => DistKind::Beta { alpha, beta },
                        DistChoice::SymmetricBeta => DistKind::SymmetricBetaRandom,
                    };
                    let inst = gen_random(&RandomParams {
                        n,
                        m: m.unwrap_or(n),
                        capacities: rule,
                        features,
                        dist,
                        seed,
                    })?;
                    (inst, out)
                }
            };
            let mut text = inst.to_json_string();
            text.push('\n');
            emit(&text, out.as_deref())?;
            Ok(0)
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_sizes(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (n, m) = s.split_once('x').unwrap_or((s, s));
            Ok((
                n.parse().with_context(|| format!("bad size {s:?}"))?,
                m.parse().with_context(|| format!("bad size {s:?}"))?,
            ))
        })
        .collect()
}

fn capacity_rules(choice: CapacityChoice) -> Vec<CapacityRule> {
    match choice {
        CapacityChoice::Ones => vec![CapacityRule::AllOnes],
        CapacityChoice::Total => vec![CapacityRule::TotalSeatsEqualsN],
        CapacityChoice::Both => vec![CapacityRule::AllOnes, CapacityRule::TotalSeatsEqualsN],
    }
}

fn pros_json(p: &ProsResult) -> Json {
    let mut doc = json!({ "kind": p.kind(), "value": p.value(), "text": p.to_string() });
    if let Some(r) = p.exact() {
        doc["exact"] = json!(rational::format(r));
    }
    if let ProsResult::Estimate { std_err, samples, seed, .. } = p {
        doc["std_err"] = json!(std_err);
        doc["samples"] = json!(samples);
        doc["seed"] = json!(seed);
    }
    doc
}

fn breakdown_json(inst: &Instance, m: &Matching, mc: &McConfig) -> Result<Json> {
    let rows = prob::stability_breakdown(inst, m, mc)?;
    Ok(Json::Array(
        rows.iter()
            .map(|b| {
                json!({
                    "student": inst.student_id(b.student),
                    "college": b.held.map(|c| inst.college_id(c)),
                    "potential_blocks": b.potential.iter().map(|(c, p)| json!({
                        "college": inst.college_id(*c),
                        "probability": p.to_string(),
                    })).collect::<Vec<_>>(),
                    "no_block": b.no_block.as_ref().map(|v| v.to_string()),
                })
            })
            .collect(),
    ))
}

fn breakdown_text(doc: &Json) -> String {
    let mut s = String::new();
    for row in doc.as_array().into_iter().flatten() {
        let blocks: Vec<String> = row["potential_blocks"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|b| format!("{} ({})", b["college"].as_str().unwrap_or("?"), b["probability"].as_str().unwrap_or("?")))
            .collect();
        s.push_str(&format!(
            "  {} at {}: potential blocks [{}]",
            row["student"].as_str().unwrap_or("?"),
            row["college"].as_str().unwrap_or("-"),
            blocks.join(", ")
        ));
        if let Some(p) = row["no_block"].as_str() {
            s.push_str(&format!(", no block {p}"));
        }
        s.push('\n');
    }
    s
}

fn trace_json(inst: &Instance, trace: &fbmatch::gda::GdaTrace) -> Json {
    Json::Array(
        trace
            .rounds
            .iter()
            .map(|r| {
                json!({
                    "proposals": r.proposals.iter()
                        .map(|&(s, c)| json!([inst.student_id(s), inst.college_id(c)]))
                        .collect::<Vec<_>>(),
                    "rejections": r.rejections.iter()
                        .map(|&(c, s)| json!([inst.college_id(c), inst.student_id(s)]))
                        .collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn pretty(doc: &Json) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("json serializes");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
