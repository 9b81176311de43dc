use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use hurwitz_toda::config::{parse_rational, Overrides, RunConfig};
use hurwitz_toda::hurwitz::{hurwitz_table, DEFAULT_BRUTEFORCE_LIMIT};
use hurwitz_toda::suite::{run_suite, write_report};
use hurwitz_toda::tau::{Deriv, Tau, TauKind, TauPoint, TauSpec};
use hurwitz_toda::{Error, Rational};

const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "hurwitz-toda", version, about = "Hurwitz tau functions and integrable-structure checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long = "Q", global = true, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    tbar1: Option<String>,
    /// Comma-separated c_1,...,c_K.
    #[arg(long, global = true, allow_hyphen_values = true)]
    c: Option<String>,
    /// Tau truncation degree.
    #[arg(long = "Dmax", global = true)]
    dmax: Option<usize>,
    /// Shift order of the dressing operators.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Working precision in decimal digits.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Comma-separated check families or groups.
    #[arg(long, global = true)]
    checks: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long = "cache-dir", global = true)]
    cache_dir: Option<PathBuf>,
    /// Omit wall times so repeated runs give identical reports.
    #[arg(long, global = true)]
    reproducible: bool,
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the selected checks and write the JSON report.
    Verify,
    /// Table of double Hurwitz numbers with brute-force cross-check.
    Hurwitz {
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
        #[arg(long, default_value_t = 3)]
        rmax: usize,
    },
    /// Evaluate Z or Zt (or a partial derivative) at one point.
    TauEval {
        #[arg(long, default_value = "1/3", allow_hyphen_values = true)]
        s: String,
        /// Comma-separated t_1,...,t_m.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        t: String,
        /// Derivative orders, e.g. `s=1,t1=2,tbar1=1`.
        #[arg(long, default_value = "")]
        deriv: String,
        #[arg(long, value_enum, default_value_t = Kind::Z)]
        kind: Kind,
    },
    /// Run one initial-value operator identity.
    Opcheck {
        #[arg(value_enum)]
        identity: Identity,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Z,
    Ztilde,
}

#[derive(Clone, Copy, ValueEnum)]
enum Identity {
    CanonicalCommutation,
    InitialRouteEquality,
    LogStringEquations,
    StringEquationsNumeric,
    ReductionExact,
}

impl Identity {
    fn family(self) -> &'static str {
        match self {
            Identity::CanonicalCommutation => "canonical-commutation",
            Identity::InitialRouteEquality => "initial-route-equality",
            Identity::LogStringEquations => "log-string-equations",
            Identity::StringEquationsNumeric => "string-equations-numeric",
            Identity::ReductionExact => "reduction-exact",
        }
    }
}

fn config_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("configuration error: {message}");
    ExitCode::from(EXIT_CONFIG)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), ExitCode> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| {
            eprintln!("cannot write {}: {e}", path.display());
            ExitCode::from(1)
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn parse_deriv(text: &str) -> Result<Deriv, String> {
    let mut deriv = Deriv::none();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (var, n) = item.split_once('=').unwrap_or((item, "1"));
        let n: usize = n.parse().map_err(|_| format!("bad derivative order in {item:?}"))?;
        deriv = match var {
            "s" => deriv.and_s(n),
            "tbar1" => deriv.and_tbar(1, n),
            v if v.starts_with('t') => {
                let k: usize = v[1..].parse().map_err(|_| format!("bad variable {v:?}"))?;
                if k == 0 {
                    return Err("times are numbered from t1".into());
                }
                deriv.and_t(k, n)
            }
            v => return Err(format!("unknown variable {v:?}")),
        };
    }
    Ok(deriv)
}

fn tau_eval(config: &RunConfig, s: &str, t: &str, deriv: &str, kind: Kind) -> ExitCode {
    let s = match parse_rational(s) {
        Ok(v) => v,
        Err(e) => return config_error(format!("--s: {e}")),
    };
    let t: Result<Vec<Rational>, String> =
        t.split(',').map(str::trim).filter(|x| !x.is_empty()).map(parse_rational).collect();
    let t = match t {
        Ok(v) => v,
        Err(e) => return config_error(format!("--t: {e}")),
    };
    let deriv = match parse_deriv(deriv) {
        Ok(d) => d,
        Err(e) => return config_error(format!("--deriv: {e}")),
    };
    let spec = TauSpec::new(config.dmax, config.beta.0.clone(), config.q.0.clone()).with_precision(config.precision);
    let tau = match Tau::new(spec) {
        Ok(t) => t,
        Err(e) => return config_error(e),
    };
    let point = TauPoint::single(s, t, config.tbar1.0.clone());
    let kind = match kind {
        Kind::Z => TauKind::Z,
        Kind::Ztilde => TauKind::Ztilde,
    };
    match tau.eval(kind, &point, &deriv) {
        Ok(value) => {
            let doc = json!({
                "kind": format!("{kind:?}"),
                "point": point,
                "derivative": deriv,
                "D": config.dmax,
                "precision": config.precision,
                "value": value.value,
                "tail_bound": value.tail_bound,
                "terms": value.terms,
            });
            let text = serde_json::to_string_pretty(&doc).expect("serializable");
            if let Err(code) = emit(&text, config.out.as_ref()) {
                return code;
            }
            if value.tail_bound.is_none() {
                eprintln!("tail majorant diverges: value is uncertified");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e @ Error::Precondition(_)) => config_error(e),
        Err(e) => {
            eprintln!("evaluation failed: {e}");
            ExitCode::from(1)
        }
    }
}

fn verify(config: &RunConfig) -> ExitCode {
    let run = match run_suite(config) {
        Ok(r) => r,
        Err(Error::Config(m)) => return config_error(m),
        Err(e) => {
            eprintln!("suite failed: {e}");
            return ExitCode::from(1);
        }
    };
    let report = &run.report;
    match &config.out {
        Some(path) => {
            if let Err(e) = write_report(report, path) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => println!("{}", report.to_json()),
    }
    for check in &report.checks {
        eprintln!("{:<13} {}", format!("{:?}", check.verdict).to_lowercase(), check.id);
    }
    let s = &report.summary;
    eprintln!("{} checks: {} passed, {} failed, {} inconclusive", s.total, s.passed, s.failed, s.inconclusive);
    if let Some(stats) = run.cache {
        eprintln!("cache: {} hits, {} misses ({} corrupt), {} writes", stats.hits, stats.misses, stats.corrupt, stats.writes);
    }
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let g = cli.global;
    let overrides = Overrides {
        beta: g.beta,
        q: g.q,
        tbar1: g.tbar1,
        c: g.c,
        dmax: g.dmax,
        order: g.order,
        precision: g.precision,
        checks: g.checks,
        out: g.out,
        cache_dir: g.cache_dir,
        reproducible: g.reproducible,
        workers: g.workers,
    };
    let mut config = match RunConfig::load(g.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(e) => return config_error(e),
    };
    match cli.command {
        Command::Verify => verify(&config),
        Command::Opcheck { identity } => {
            config.checks = vec![identity.family().to_string()];
            verify(&config)
        }
        Command::Hurwitz { max_degree, rmax } => {
            if max_degree > 5 {
                return config_error(format!("--max-degree {max_degree} exceeds the limit 5"));
            }
            let rows = match hurwitz_table(max_degree, rmax, DEFAULT_BRUTEFORCE_LIMIT) {
                Ok(rows) => rows,
                Err(e) => return config_error(e),
            };
            let all_match = rows.iter().all(|r| r.matches != Some(false));
            let doc = json!({ "max_degree": max_degree, "rmax": rmax, "rows": rows, "all_match": all_match });
            if let Err(code) = emit(&serde_json::to_string_pretty(&doc).expect("serializable"), config.out.as_ref()) {
                return code;
            }
            if all_match {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::TauEval { s, t, deriv, kind } => tau_eval(&config, &s, &t, &deriv, kind),
    }
}
