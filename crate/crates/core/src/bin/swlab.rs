use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use swlab::construction::Regime;
use swlab::experiments::checks::{self, MASS_TOL};
use swlab::experiments::verdict::{self, Verdict};
use swlab::experiments::{
    emit, rows_to_csv, run_inflation_outcomes, run_q2_boundedness, to_csv_string, CaseConfig, Column, Config,
    Format, Stage,
};
use swlab::solver::write_checkpoint;
use swlab::Error;

#[derive(Parser)]
#[command(name = "swlab", version, about = "Norm inflation experiments for 2D viscous shallow water")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Data norms ‖u₀‖ of a construction family, with optional substrate self-checks.
    Norms {
        #[command(flatten)]
        case: CaseArgs,
        /// Also run the transform, partition, dilation and paraproduct checks.
        #[arg(long)]
        check: bool,
    },
    /// Inflation sweep: ‖u₀‖, ‖U₀(t₀)‖, ‖U₁(t₀)‖ and optionally the full solution.
    Inflate {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        solver: bool,
        /// Apply the trend criteria and exit with 3 when they fail.
        #[arg(long)]
        verdict: bool,
        /// SVG plot of `--column` against N.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value = "ratio")]
        column: Column,
    },
    /// Operator-norm trend of the bilinear term over random pairs and both constructions.
    #[command(name = "q2-bound")]
    Q2Bound {
        #[arg(long)]
        config: Option<PathBuf>,
        /// N values for the random pairs.
        #[arg(long = "N", value_delimiter = ',')]
        n: Option<Vec<u32>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Norm exponents q.
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full solution of one construction up to t₀, or the solver self-checks.
    Solve {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        dt_divisor: Option<f64>,
        /// Write the final state here.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Run mass, linearization and temporal-order checks instead.
        #[arg(long)]
        check: bool,
    },
    /// Pseudo-spectral bilinear term against the dense Fourier-sum oracle.
    #[command(name = "oracle-check")]
    OracleCheck {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        pairs: usize,
        #[arg(long, default_value_t = 3)]
        seed: u64,
    },
}

#[derive(Args)]
struct CaseArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    regime: Option<Regime>,
    #[arg(long = "N", value_delimiter = ',')]
    n: Option<Vec<u32>>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    c: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(path: Option<&Path>) -> Result<Config, Error> {
    match path {
        Some(p) => Config::load(p),
        None => Config::from_toml(""),
    }
}

impl CaseArgs {
    fn config(&self) -> Result<Config, Error> {
        let mut cfg = load(self.config.as_deref())?;
        let case = match cfg.case.take() {
            Some(c) => c,
            None => CaseConfig {
                regime: self.regime.ok_or_else(|| Error::Config("--regime or [case] required".into()))?,
                n_list: Vec::new(),
                delta: self.delta.ok_or_else(|| Error::Config("--delta or [case] required".into()))?,
                q: self.q.ok_or_else(|| Error::Config("--q or [case] required".into()))?,
                eps: 0.01,
                c: 2,
                length_scale: None,
            },
        };
        let mut case = case;
        if let Some(r) = self.regime {
            case.regime = r;
        }
        if let Some(n) = &self.n {
            case.n_list = n.clone();
        }
        if let Some(q) = self.q {
            case.q = q;
        }
        if let Some(d) = self.delta {
            case.delta = d;
        }
        if let Some(c) = self.c {
            case.c = c;
        }
        if let Some(s) = self.seed {
            cfg.sweep.seed = s;
        }
        cfg.case = Some(case);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn report(name: &str, v: &Verdict) -> bool {
    eprintln!("{}: {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    v.pass
}

/// Exit status: 0 success, 2 every row refused for resources, 3 failed check.
fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Norms { case, check } => {
            let cfg = case.config()?;
            let outcomes = run_inflation_outcomes(&cfg, Stage::Data)?;
            let records: Vec<_> = outcomes.iter().map(|o| o.record.clone()).collect();
            write_out(case.out.as_deref(), &to_csv_string(&records)?)?;
            if !records.is_empty() && records.iter().all(|r| r.rejected()) {
                return Ok(2);
            }
            let mut ok = true;
            if records.len() >= 2 {
                ok &= report("data norms", &verdict::data_norm_verdict(&records, cfg.sweep.residual_threshold));
            }
            if check {
                let s = checks::substrate_check(cfg.sweep.seed)?;
                ok &= report("substrate", &Verdict { pass: s.pass(), detail: format!("{s:?}") });
                let b = checks::besov_check(cfg.sweep.seed, 100)?;
                ok &= report("besov", &Verdict { pass: b.pass(), detail: format!("{b:?}") });
            }
            Ok(if ok { 0 } else { 3 })
        }
        Command::Inflate { case, solver, verdict: want_verdict, svg, column } => {
            let cfg = case.config()?;
            let stage = if solver || cfg.solver.enabled { Stage::Solver } else { Stage::Picard };
            let outcomes = run_inflation_outcomes(&cfg, stage)?;
            let records: Vec<_> = outcomes.iter().map(|o| o.record.clone()).collect();
            write_out(case.out.as_deref(), &to_csv_string(&records)?)?;
            if let Some(p) = svg {
                emit(&records, Format::Svg, column, &p)?;
            }
            if !records.is_empty() && records.iter().all(|r| r.rejected()) {
                return Ok(2);
            }
            let mut ok = report("triangle", &verdict::triangle_verdict(&records));
            for o in outcomes.iter().filter(|o| o.solver.is_some()) {
                ok &= report(&format!("solver N={}", o.record.n), &verdict::solver_row_verdict(o, MASS_TOL));
            }
            if want_verdict {
                ok &= report("inflation", &verdict::inflation_verdict(&records, cfg.sweep.residual_threshold));
                ok &= report("resources", &verdict::resource_verdict(&outcomes));
            }
            Ok(if ok { 0 } else { 3 })
        }
        Command::Q2Bound { config, n, trials, seed, q, out } => {
            let mut cfg = load(config.as_deref())?;
            if let Some(n) = n {
                cfg.sweep.n_list = n;
            }
            if let Some(t) = trials {
                cfg.sweep.trials = t;
            }
            if let Some(s) = seed {
                cfg.sweep.seed = s;
            }
            if let Some(q) = q {
                cfg.sweep.q_values = q;
            }
            cfg.validate()?;
            let rep = run_q2_boundedness(&cfg)?;
            write_out(out.as_deref(), &rows_to_csv(&rep.rows)?)?;
            let mut ok = true;
            for v in &rep.verdicts {
                let detail = match &v.fit {
                    Some(f) => format!("slope {:.4}, residual {:.4}, maxima {:?}", f.exponent, f.residual, v.maxima),
                    None => format!("no fit, maxima {:?}", v.maxima),
                };
                ok &= report(&format!("q={}", v.q), &Verdict { pass: v.pass == Some(true), detail });
            }
            Ok(if ok { 0 } else { 3 })
        }
        Command::Solve { case, dt_divisor, checkpoint, check } => {
            if check {
                let s = checks::solver_check(case.seed.unwrap_or(4))?;
                let ok = report("solver", &Verdict { pass: s.pass(), detail: format!("{s:?}") });
                return Ok(if ok { 0 } else { 3 });
            }
            let mut cfg = case.config()?;
            if let Some(d) = dt_divisor {
                cfg.solver.dt_divisor = d;
                cfg.validate()?;
            }
            let family = cfg.require_case()?.clone();
            let &n = family.n_list.first().ok_or_else(|| Error::Config("no N given".into()))?;
            let o = match swlab::experiments::run_inflation_case(&cfg, &family, n, Stage::Solver) {
                Ok(o) => o,
                Err(e @ (Error::Positivity { .. } | Error::BlowUp(_))) => {
                    eprintln!("FAIL: solver: {e}");
                    return Ok(3);
                }
                Err(e) => return Err(e),
            };
            write_out(case.out.as_deref(), &to_csv_string(std::slice::from_ref(&o.record))?)?;
            if o.record.rejected() {
                eprintln!("rejected: {}", o.rejection.as_deref().unwrap_or(""));
                return Ok(2);
            }
            if let (Some(path), Some(sol)) = (checkpoint, &o.solver) {
                write_checkpoint(&path, &sol.state)?;
            }
            let ok = report(&format!("solver N={n}"), &verdict::solver_row_verdict(&o, MASS_TOL));
            Ok(if ok { 0 } else { 3 })
        }
        Command::OracleCheck { config, pairs, seed } => {
            let cfg = load(config.as_deref())?;
            let r = checks::oracle_check(seed, pairs, &cfg.quadrature)?;
            let ok = report("oracle", &Verdict { pass: r.pass(), detail: format!("{r:?}") });
            Ok(if ok { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Error::Resource(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
