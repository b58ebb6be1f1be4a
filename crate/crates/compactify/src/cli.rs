//! `compactify` subcommands.
//!
//! Exit codes: 0 success, 1 input or IO error, 2 usage error, 3 a valid
//! negative answer (no extension, incomparable, non-strict enlargement),
//! 4 a violated numeric tolerance.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use compactify_core::{
    build_compactification, check_ball_cylinder_inclusions, check_extendability_with, compare,
    enlarge, product_distance, BuildParams, Comparison, ProductPoint, ProductSpace, TailSide,
    Thresholds, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain;
use crate::io::{self, IoError};
use crate::report::{Header, Report, RunConfig, Timing};
use crate::verify;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NEGATIVE: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "compactify",
    version,
    about = "Hausdorff compactifications of the real line from finite function families"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a model from a family and write it with its remainder.
    Build {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        remainder_csv: Option<PathBuf>,
        #[arg(long)]
        image_csv: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Decide whether a function extends continuously to the model.
    ExtendCheck {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        function: PathBuf,
        /// Strictly decreasing radii, comma separated.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
        #[arg(long)]
        pass_threshold: Option<f64>,
        #[arg(long)]
        fail_threshold: Option<f64>,
        #[arg(long)]
        min_fail_witnesses: Option<usize>,
        /// Also treat an inconclusive verdict as negative.
        #[arg(long)]
        expect_extends: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Look for comparison maps between two models in both directions.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Append a function as a new coordinate and rebuild.
    Enlarge {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        remainder_csv: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// List the remainder clusters of a model and export point clouds.
    Remainder {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        image_csv: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Check the product metric axioms and ball/cylinder inclusions on random points.
    MetricCheck {
        #[arg(long, default_value_t = 5)]
        dims: usize,
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
        #[arg(long, default_value_t = 0.3)]
        radius: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Build an ascending chain, its bonds and its limit.
    ChainDemo {
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the acceptance suite.
    Verify {
        #[arg(long, conflicts_with = "criterion")]
        all: bool,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=11))]
        criterion: Vec<u8>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub json_report: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ParamArgs {
    #[arg(long)]
    pub r_image: Option<f64>,
    #[arg(long)]
    pub r_tail_lo: Option<f64>,
    #[arg(long)]
    pub r_tail_hi: Option<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long)]
    pub tail_step: Option<f64>,
    #[arg(long)]
    pub cluster_radius: Option<f64>,
}

impl ParamArgs {
    pub fn resolve(&self) -> BuildParams {
        let d = BuildParams::default();
        BuildParams {
            r_image: self.r_image.unwrap_or(d.r_image),
            r_tail_lo: self.r_tail_lo.unwrap_or(d.r_tail_lo),
            r_tail_hi: self.r_tail_hi.unwrap_or(d.r_tail_hi),
            grid_step: self.grid_step.unwrap_or(d.grid_step),
            tail_step: self.tail_step.unwrap_or(d.tail_step),
            cluster_radius: self.cluster_radius.unwrap_or(d.cluster_radius),
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Core(#[from] compactify_core::Error),
    #[error("{0}")]
    Usage(String),
}

type Outcome = Result<u8, Failure>;

/// Parses `argv` and runs the subcommand.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

pub fn main_exit<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    ExitCode::from(run(argv))
}

fn emit<T: Serialize>(
    common: &CommonArgs,
    config: RunConfig,
    result: T,
    start: Instant,
    timings: Vec<Timing>,
) -> Result<(), Failure> {
    let report = Report {
        header: Header::now(start.elapsed().as_secs_f64(), timings),
        config,
        result,
    };
    match &common.json_report {
        Some(path) => io::write_json(path, &report)?,
        None => print!("{}", io::to_json(&report)),
    }
    Ok(())
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn validated(config: RunConfig) -> Result<RunConfig, Failure> {
    config.validate().map_err(Failure::Usage)?;
    Ok(config)
}

#[derive(Serialize)]
struct ClusterRow {
    cluster: usize,
    side: TailSide,
    center: ProductPoint,
    witnesses: usize,
}

#[derive(Serialize)]
struct ModelSummary {
    family: Vec<String>,
    dim: usize,
    image_samples: usize,
    remainder_separation: f64,
    clusters: Vec<ClusterRow>,
}

fn summarize(m: &compactify_core::CompactificationModel) -> ModelSummary {
    ModelSummary {
        family: m
            .family()
            .functions()
            .iter()
            .map(ToString::to_string)
            .collect(),
        dim: m.dim(),
        image_samples: m.image_cloud().len(),
        remainder_separation: m.remainder_separation(),
        clusters: m
            .remainder()
            .iter()
            .enumerate()
            .map(|(cluster, c)| ClusterRow {
                cluster,
                side: c.side,
                center: c.center.clone(),
                witnesses: c.witnesses.len(),
            })
            .collect(),
    }
}

fn dispatch(command: Command) -> Outcome {
    let start = Instant::now();
    match command {
        Command::Build {
            family,
            out,
            remainder_csv,
            image_csv,
            params,
            common,
        } => {
            let mut config = RunConfig::new("build", params.resolve(), common.seed)
                .input("family", path_str(&family))
                .output("model", path_str(&out));
            if let Some(p) = &remainder_csv {
                config = config.output("remainder_csv", path_str(p));
            }
            if let Some(p) = &image_csv {
                config = config.output("image_csv", path_str(p));
            }
            let config = validated(config)?;
            let fam = io::read_family(&family)?;
            let model = build_compactification(fam, config.build_params)?;
            io::write_model(&out, &model)?;
            if let Some(p) = &remainder_csv {
                io::write_remainder_csv(p, &model)?;
            }
            if let Some(p) = &image_csv {
                io::write_image_csv(p, &model)?;
            }
            eprintln!("{} remainder clusters", model.remainder().len());
            emit(&common, config, summarize(&model), start, vec![])?;
            Ok(EXIT_OK)
        }
        Command::ExtendCheck {
            model,
            function,
            deltas,
            pass_threshold,
            fail_threshold,
            min_fail_witnesses,
            expect_extends,
            common,
        } => {
            let m = io::read_model(&model)?;
            let f = io::read_function(&function)?;
            let mut config = RunConfig::new("extend-check", *m.params(), common.seed)
                .input("model", path_str(&model))
                .input("function", path_str(&function))
                .input("expect_extends", expect_extends);
            let t = &mut config.tolerances;
            if let Some(d) = deltas {
                t.deltas = d;
            }
            let defaults = Thresholds::default();
            t.thresholds = Thresholds {
                pass: pass_threshold.unwrap_or(defaults.pass),
                fail: fail_threshold.unwrap_or(defaults.fail),
                min_fail_witnesses: min_fail_witnesses.unwrap_or(defaults.min_fail_witnesses),
            };
            let config = validated(config)?;
            let report = check_extendability_with(
                &m,
                &f,
                &config.tolerances.deltas,
                config.tolerances.thresholds,
            )
            .map_err(|e| match e {
                compactify_core::Error::InvalidParameter(msg) => Failure::Usage(msg),
                e => e.into(),
            })?;
            eprintln!("verdict: {}", report.verdict.name());
            let code = match &report.verdict {
                Verdict::FailsToExtend { .. } => EXIT_NEGATIVE,
                Verdict::Inconclusive { .. } if expect_extends => EXIT_NEGATIVE,
                _ => EXIT_OK,
            };
            emit(&common, config, report, start, vec![])?;
            Ok(code)
        }
        Command::Compare { a, b, common } => {
            let ma = io::read_model(&a)?;
            let mb = io::read_model(&b)?;
            let config = RunConfig::new("compare", *ma.params(), common.seed)
                .input("a", path_str(&a))
                .input("b", path_str(&b));
            let b_below_a = compare(&ma, &mb);
            let a_below_b = compare(&mb, &ma);
            let results = [&b_below_a, &a_below_b];
            let any_witness = results.iter().any(|c| c.witness().is_some());
            let numeric = results
                .iter()
                .any(|c| matches!(c, Comparison::Incomparable(i) if i.is_numeric()));
            let code = if any_witness {
                EXIT_OK
            } else if numeric {
                EXIT_NUMERIC
            } else {
                EXIT_NEGATIVE
            };
            eprintln!(
                "b <= a: {}; a <= b: {}",
                b_below_a.witness().is_some(),
                a_below_b.witness().is_some()
            );
            #[derive(Serialize)]
            struct Both {
                b_below_a: Comparison,
                a_below_b: Comparison,
                equivalent: bool,
            }
            let equivalent = b_below_a.witness().is_some() && a_below_b.witness().is_some();
            emit(
                &common,
                config,
                Both {
                    b_below_a,
                    a_below_b,
                    equivalent,
                },
                start,
                vec![],
            )?;
            Ok(code)
        }
        Command::Enlarge {
            model,
            function,
            out,
            remainder_csv,
            common,
        } => {
            let m = io::read_model(&model)?;
            let f = io::read_function(&function)?;
            let mut config = RunConfig::new("enlarge", *m.params(), common.seed)
                .input("model", path_str(&model))
                .input("function", path_str(&function))
                .output("model", path_str(&out));
            if let Some(p) = &remainder_csv {
                config = config.output("remainder_csv", path_str(p));
            }
            let e = enlarge(&m, &f)?;
            io::write_model(&out, &e.model)?;
            if let Some(p) = &remainder_csv {
                io::write_remainder_csv(p, &e.model)?;
            }
            eprintln!("{}", if e.strict { "STRICT" } else { "not strict" });
            #[derive(Serialize)]
            struct Enlarged {
                strict: bool,
                old_verdict: Verdict,
                witness: compactify_core::ComparisonWitness,
                old_clusters: usize,
                new_clusters: usize,
                family: Vec<String>,
            }
            let code = if e.strict { EXIT_OK } else { EXIT_NEGATIVE };
            emit(
                &common,
                config,
                Enlarged {
                    strict: e.strict,
                    old_verdict: e.old_report.verdict,
                    witness: e.witness,
                    old_clusters: m.remainder().len(),
                    new_clusters: e.model.remainder().len(),
                    family: e
                        .model
                        .family()
                        .functions()
                        .iter()
                        .map(ToString::to_string)
                        .collect(),
                },
                start,
                vec![],
            )?;
            Ok(code)
        }
        Command::Remainder {
            model,
            csv,
            image_csv,
            common,
        } => {
            let m = io::read_model(&model)?;
            let mut config = RunConfig::new("remainder", *m.params(), common.seed)
                .input("model", path_str(&model));
            if let Some(p) = &csv {
                config = config.output("csv", path_str(p));
                io::write_remainder_csv(p, &m)?;
            }
            if let Some(p) = &image_csv {
                config = config.output("image_csv", path_str(p));
                io::write_image_csv(p, &m)?;
            }
            emit(&common, config, summarize(&m), start, vec![])?;
            Ok(EXIT_OK)
        }
        Command::MetricCheck {
            dims,
            pairs,
            radius,
            common,
        } => {
            if dims == 0 {
                return Err(Failure::Usage("--dims must be at least 1".into()));
            }
            let config = validated(
                RunConfig::new("metric-check", BuildParams::default(), common.seed)
                    .input("dims", dims)
                    .input("pairs", pairs)
                    .input("radius", radius),
            )?;
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Failure::Usage("--radius must be positive".into()));
            }
            let result = metric_check(dims, pairs, radius, common.seed)?;
            let code = if result.violations() == 0 {
                EXIT_OK
            } else {
                EXIT_NUMERIC
            };
            eprintln!("{} violations", result.violations());
            emit(&common, config, result, start, vec![])?;
            Ok(code)
        }
        Command::ChainDemo {
            levels,
            out_dir,
            params,
            common,
        } => {
            if levels == 0 {
                return Err(Failure::Usage("--levels must be at least 1".into()));
            }
            let config = validated(
                RunConfig::new("chain-demo", params.resolve(), common.seed)
                    .input("levels", levels)
                    .output("out_dir", path_str(&out_dir)),
            )?;
            let (summary, timings) = chain_demo(levels, &out_dir, config.build_params)?;
            let code = if summary.dominations.iter().all(|d| d.witness.is_some()) {
                EXIT_OK
            } else {
                EXIT_NUMERIC
            };
            io::write_json(&out_dir.join("summary.json"), &summary)?;
            emit(&common, config, summary, start, timings)?;
            Ok(code)
        }
        Command::Verify {
            all,
            criterion,
            common,
        } => {
            let ids: Vec<u8> = if all {
                verify::CRITERIA.iter().map(|c| c.id).collect()
            } else if criterion.is_empty() {
                return Err(Failure::Usage(
                    "pass --all or at least one --criterion".into(),
                ));
            } else {
                criterion
            };
            let config = RunConfig::new("verify", BuildParams::default(), common.seed)
                .input("criteria", format!("{ids:?}"));
            let (outcomes, timings) = verify::run_suite(&ids, common.seed, verify::worker_count());
            for o in &outcomes {
                eprintln!(
                    "criterion {:>2} {:<36} {}",
                    o.id,
                    o.name,
                    if o.passed { "PASS" } else { "FAIL" }
                );
            }
            let code = if outcomes.iter().all(|o| o.passed) {
                EXIT_OK
            } else {
                EXIT_NUMERIC
            };
            emit(&common, config, outcomes, start, timings)?;
            Ok(code)
        }
    }
}

#[derive(Serialize)]
struct MetricCheck {
    dims: usize,
    pairs: usize,
    symmetry_violations: usize,
    identity_violations: usize,
    triangle_violations: usize,
    max_triangle_excess: f64,
    inclusion: compactify_core::InclusionReport,
}

impl MetricCheck {
    fn violations(&self) -> usize {
        self.symmetry_violations
            + self.identity_violations
            + self.triangle_violations
            + self.inclusion.violations.len()
    }
}

fn metric_check(dims: usize, pairs: usize, radius: f64, seed: u64) -> Result<MetricCheck, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| {
        ProductPoint::new((0..dims).map(|_| rng.random_range(-1.0..=1.0)).collect())
    };
    let (mut sym, mut id, mut tri) = (0, 0, 0);
    let mut excess = f64::NEG_INFINITY;
    let mut sample = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let (x, y, z) = (point(&mut rng), point(&mut rng), point(&mut rng));
        let d = |a: &ProductPoint, b: &ProductPoint| product_distance(a, b);
        let (dxy, dyx, dyz, dxz) = (d(&x, &y)?, d(&y, &x)?, d(&y, &z)?, d(&x, &z)?);
        if !(dxy >= 0.0) || dxy != dyx {
            sym += 1;
        }
        if d(&x, &x)? != 0.0 || (dxy == 0.0) != (x == y) {
            id += 1;
        }
        excess = excess.max(dxz - dxy - dyz);
        if dxz > dxy + dyz + 1e-12 {
            tri += 1;
        }
        sample.push((x, y));
    }
    let inclusion = check_ball_cylinder_inclusions(&ProductSpace::cube(dims), &sample, radius)?;
    Ok(MetricCheck {
        dims,
        pairs,
        symmetry_violations: sym,
        identity_violations: id,
        triangle_violations: tri,
        max_triangle_excess: excess,
        inclusion,
    })
}

#[derive(Serialize)]
struct ChainLevel {
    level: usize,
    file: String,
    family: Vec<String>,
    clusters: usize,
}

#[derive(Serialize)]
struct ChainSummary {
    levels: Vec<ChainLevel>,
    bond_residuals: Vec<f64>,
    limit_file: String,
    limit_family: Vec<String>,
    limit_clusters: usize,
    dominations: Vec<chain::Domination>,
}

fn chain_demo(
    levels: usize,
    out_dir: &Path,
    params: BuildParams,
) -> Result<(ChainSummary, Vec<Timing>), Failure> {
    fs::create_dir_all(out_dir).map_err(|source| IoError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let t = Instant::now();
    let system = chain::build_chain(levels, params)?;
    let mut timings = vec![Timing {
        name: "build chain".into(),
        seconds: t.elapsed().as_secs_f64(),
    }];
    let mut rows = Vec::with_capacity(levels);
    for (n, m) in system.levels().iter().enumerate() {
        let file = format!("level_{n}.bin");
        io::write_model(&out_dir.join(&file), m)?;
        rows.push(ChainLevel {
            level: n,
            file,
            family: m
                .family()
                .functions()
                .iter()
                .map(ToString::to_string)
                .collect(),
            clusters: m.remainder().len(),
        });
    }
    io::write_json(&out_dir.join("bonds.json"), &system.bonds())?;
    let t = Instant::now();
    let limit = system.chain_limit()?;
    io::write_model(&out_dir.join("limit.bin"), &limit)?;
    let dominations = chain::dominations(&system, &limit);
    timings.push(Timing {
        name: "limit and comparisons".into(),
        seconds: t.elapsed().as_secs_f64(),
    });
    Ok((
        ChainSummary {
            levels: rows,
            bond_residuals: system.bonds().iter().map(|b| b.residual).collect(),
            limit_file: "limit.bin".into(),
            limit_family: limit
                .family()
                .functions()
                .iter()
                .map(ToString::to_string)
                .collect(),
            limit_clusters: limit.remainder().len(),
            dominations,
        },
        timings,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from([
            "compactify",
            "extend-check",
            "--model",
            "m.bin",
            "--function",
            "f.json",
            "--deltas",
            "0.2,0.1",
            "--expect-extends",
        ])
        .unwrap();
        match cli.command {
            Command::ExtendCheck {
                deltas,
                expect_extends,
                ..
            } => {
                assert_eq!(deltas, Some(vec![0.2, 0.1]));
                assert!(expect_extends);
            }
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["compactify", "build", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["compactify", "frobnicate"]), EXIT_USAGE);
        assert_eq!(
            run(["compactify", "verify", "--criterion", "12"]),
            EXIT_USAGE
        );
        assert_eq!(run(["compactify", "--help"]), EXIT_OK);
    }

    #[test]
    fn params_resolve_over_defaults() {
        let p = ParamArgs {
            r_image: Some(10.0),
            ..ParamArgs::default()
        }
        .resolve();
        assert_eq!(p.r_image, 10.0);
        assert_eq!(p.r_tail_hi, BuildParams::default().r_tail_hi);
    }

    #[test]
    fn metric_check_is_seeded() {
        let a = serde_json::to_string(&metric_check(5, 500, 0.3, 7).unwrap()).unwrap();
        let b = serde_json::to_string(&metric_check(5, 500, 0.3, 7).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(metric_check(5, 500, 0.3, 7).unwrap().violations(), 0);
    }
}
