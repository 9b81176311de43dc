//! Batch driver: expands a [`RunConfig`] into check jobs, runs them on a
//! worker pool and assembles the report in id order.

use std::collections::VecDeque;
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use num_traits::Zero;

use crate::cache::{Cache, CacheStats};
use crate::config::RunConfig;
use crate::dressing::{check_derivative_oracle, BAPoint, Dressing};
use crate::error::{Error, Result};
use crate::hurwitz::{hurwitz_table, DEFAULT_BRUTEFORCE_LIMIT};
use crate::partitions::partitions_up_to;
use crate::poly::Rational;
use crate::real::{bits_for_digits, Real};
use crate::report::{CheckReport, ExactCheck, Report};
use crate::schur::{eval_special_c, schur_poly};
use crate::stringeq::{self, GstreqParams};
use crate::tau::{Tau, TauPoint, TauSpec};

/// Absolute tolerance of the finite-difference oracle.
pub const FD_TOLERANCE_EXP: i64 = 15;
/// Tolerance of the reduction comparison between the two routes.
pub const REDUCTION_TOLERANCE_EXP: i64 = 8;
/// Threshold of the numeric string equations.
pub const GSTREQ_TOLERANCE_EXP: i64 = 6;

pub struct SuiteRun {
    pub report: Report,
    pub cache: Option<CacheStats>,
}

type Task = Box<dyn FnOnce() -> Result<CheckReport> + Send>;

struct Job {
    id: String,
    identity: &'static str,
    task: Task,
}

fn job(id: String, identity: &'static str, task: impl FnOnce() -> Result<CheckReport> + Send + 'static) -> Job {
    Job {
        id,
        identity,
        task: Box::new(task),
    }
}

fn ten_pow(exp: i64, prec: u32) -> Real {
    Real::from_int(10, prec).powi(exp)
}

fn list(v: &[Rational]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn point_suffix(p: &BAPoint) -> String {
    format!("@s={},t=({}),z={}", p.s, list(&p.t), p.z)
}

/// Runs `f` at the configured `D` and, when `hi` is given, again at `D + 2`;
/// the ratio of the `primary` residuals must be at most 1/2 unless the lower
/// residual already sits at the precision floor.
fn with_convergence(
    lo: CheckReport,
    hi: Option<CheckReport>,
    primary: &str,
    floor: &Real,
) -> CheckReport {
    let Some(hi) = hi else { return lo };
    let mut report = lo;
    let (Some(r_lo), Some(r_hi)) = (report.measurement(primary), hi.measurement(primary)) else {
        report.note("convergence not measured: primary residual missing");
        return report.finish();
    };
    let (r_lo, r_hi) = (r_lo.residual.abs(), r_hi.residual.abs());
    report.note(format!("{primary} at D+2: {}", r_hi.to_sci_string(4)));
    if r_lo <= *floor {
        report.note("convergence not measured: residual at the precision floor");
    } else {
        let half = Real::one(r_lo.prec()).mul_pow2(-1);
        report.measure("D to D+2 residual ratio", &r_hi / &r_lo, half);
    }
    report.finish()
}

struct Shared {
    config: RunConfig,
    tau: Option<std::result::Result<Arc<Tau>, Error>>,
    tau_hi: Option<std::result::Result<Arc<Tau>, Error>>,
}

impl Shared {
    fn tau(&self) -> Result<Arc<Tau>> {
        self.tau.clone().expect("tau built when tau checks are selected")
    }

    fn tau_hi(&self) -> Result<Option<Arc<Tau>>> {
        match &self.tau_hi {
            Some(t) => t.clone().map(Some),
            None => Ok(None),
        }
    }

    fn points(&self) -> Vec<BAPoint> {
        let c = &self.config;
        let mut out = Vec::new();
        for s in c.s_values() {
            for t in c.t_values() {
                for z in &c.z_list() {
                    out.push(BAPoint::new(s.clone(), t.clone(), c.tbar1.0.clone(), z.clone()).with_shift_order(c.order));
                }
            }
        }
        out
    }
}

fn build_tau(config: &RunConfig, degree: usize) -> Result<Arc<Tau>> {
    let spec = TauSpec::new(degree, config.beta.0.clone(), config.q.0.clone()).with_precision(config.precision);
    Ok(Arc::new(Tau::new(spec)?))
}

fn hurwitz_check(d_max: usize, r_max: usize) -> Result<CheckReport> {
    let mut report = CheckReport::new("hurwitz-oracle", "character formula equals brute-force monodromy count")
        .param("d_max", d_max)
        .param("r_max", r_max);
    let rows = hurwitz_table(d_max, r_max, DEFAULT_BRUTEFORCE_LIMIT)?;
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.matches != Some(true))
        .map(|r| format!("d={} r={} mu={:?} nu={:?}", r.degree, r.r, r.mu.parts(), r.nu.parts()))
        .collect();
    report.note(format!("{} coefficients compared", rows.len()));
    let detail = (!bad.is_empty()).then(|| bad.iter().take(5).cloned().collect::<Vec<_>>().join("; "));
    report.exact(ExactCheck::new("mismatching coefficients", bad.len(), detail));
    Ok(report.finish())
}

fn schur_check(max: usize, cache: Option<&Cache>) -> Result<CheckReport> {
    let mut report = CheckReport::new("schur-special-value", "S_lambda(c, 0, 0, ...) = dim(lambda)/|lambda|! c^|lambda|")
        .param("max_size", max)
        .param("c", "1, -1, 3/2");
    let cs = [Rational::from_integer(1.into()), Rational::from_integer((-1).into()), Rational::new(3.into(), 2.into())];
    let mut bad = Vec::new();
    let mut count = 0;
    for lambda in partitions_up_to(max) {
        let nvars = lambda.size().max(1);
        let poly = match cache {
            Some(cache) => {
                let polys = cache.schur_polys(lambda.size(), nvars)?;
                polys.into_iter().find(|(l, _)| *l == lambda).map(|(_, p)| p).expect("partition listed")
            }
            None => schur_poly(&lambda, nvars),
        };
        for c in &cs {
            let mut at = vec![Rational::zero(); nvars];
            at[0] = c.clone();
            count += 1;
            if poly.eval(&at) != eval_special_c(&lambda, c) {
                bad.push(format!("lambda={:?} c={c}", lambda.parts()));
            }
        }
    }
    report.note(format!("{count} evaluations compared"));
    let detail = (!bad.is_empty()).then(|| bad.iter().take(5).cloned().collect::<Vec<_>>().join("; "));
    report.exact(ExactCheck::new("mismatching evaluations", bad.len(), detail));
    Ok(report.finish())
}

fn jobs(shared: &Arc<Shared>, cache: Option<&Arc<Cache>>) -> Vec<Job> {
    let config = &shared.config;
    let prec = bits_for_digits(config.precision);
    let floor = ten_pow(-(config.precision as i64 - 15), prec);
    let mut out = Vec::new();
    for family in config.selected() {
        match family {
            "hurwitz-oracle" => {
                let (d, r) = (config.hurwitz_dmax, config.hurwitz_rmax);
                out.push(job(family.into(), "double Hurwitz numbers", move || hurwitz_check(d, r)));
            }
            "schur-special-value" => {
                let max = config.schur_max;
                let cache = cache.cloned();
                out.push(job(family.into(), "Schur special value", move || schur_check(max, cache.as_deref())));
            }
            "linear-s-tbar1" => {
                let tol = ten_pow(-(config.precision as i64 - 20), prec);
                for s in config.s_values() {
                    for t in config.t_values() {
                        let point = TauPoint::single(s.clone(), t.clone(), config.tbar1.0.clone());
                        let id = format!("{family}@s={s},t=({})", list(&t));
                        let (sh, tol) = (shared.clone(), tol.clone());
                        out.push(job(id, "s and tb1 flows of Zt", move || sh.tau()?.check_linear_s_tbar1(&point, &tol)));
                    }
                }
            }
            "ba-linear" => {
                for p in shared.points() {
                    for k in [1usize, 2] {
                        let id = format!("ba-linear-t{k}{}", point_suffix(&p));
                        let (sh, fl, p) = (shared.clone(), floor.clone(), p.clone());
                        out.push(job(id, "Baker-Akhiezer linear equations", move || {
                            let lo = Dressing::new(sh.tau()?, p.clone())?.check_ba_linear(k, None)?;
                            let hi = match (k, sh.tau_hi()?) {
                                (1, Some(t)) => Some(Dressing::new(t, p)?.check_ba_linear(k, None)?),
                                _ => None,
                            };
                            Ok(with_convergence(lo, hi, "t1 equation", &fl))
                        }));
                    }
                }
            }
            "log-eigen" => {
                for p in shared.points() {
                    let id = format!("{family}{}", point_suffix(&p));
                    let (sh, fl) = (shared.clone(), floor.clone());
                    out.push(job(id, "logarithmic spectral equation", move || {
                        let lo = Dressing::new(sh.tau()?, p.clone())?.check_log_eigen(None)?;
                        let hi = match sh.tau_hi()? {
                            Some(t) => Some(Dressing::new(t, p)?.check_log_eigen(None)?),
                            None => None,
                        };
                        Ok(with_convergence(lo, hi, "relative residual", &fl))
                    }));
                }
            }
            "exp-identity" => {
                for p in shared.points() {
                    let id = format!("{family}{}", point_suffix(&p));
                    let (sh, n) = (shared.clone(), config.n_exp);
                    out.push(job(id, "exponential of the reduced operator", move || {
                        Dressing::new(sh.tau()?, p)?.check_exp_identity(n, None)
                    }));
                }
            }
            "reduced-lax" => {
                for p in shared.points() {
                    for k in [1usize, 2] {
                        let id = format!("reduced-lax-t{k}{}", point_suffix(&p));
                        let (sh, p) = (shared.clone(), p.clone());
                        out.push(job(id, "reduced Lax equation", move || {
                            Dressing::new(sh.tau()?, p)?.check_fkl_lax(k, None)
                        }));
                    }
                }
            }
            "toda-field" => {
                for p in shared.points() {
                    let id = format!("{family}{}", point_suffix(&p));
                    let (sh, fl) = (shared.clone(), floor.clone());
                    out.push(job(id, "Toda-like field equation", move || {
                        let lo = Dressing::new(sh.tau()?, p.clone())?.check_toda_field(None)?;
                        let hi = match sh.tau_hi()? {
                            Some(t) => Some(Dressing::new(t, p)?.check_toda_field(None)?),
                            None => None,
                        };
                        Ok(with_convergence(lo, hi, "residual", &fl))
                    }));
                }
            }
            "canonical-commutation" | "log-string-equations" => {
                let (k, n) = (config.k_times, config.n_window);
                out.push(job(family.into(), "initial-value operator identities", move || {
                    let data = stringeq::build_initial_dressing(k, n)?;
                    Ok(if family == "canonical-commutation" {
                        stringeq::check_canonical_commutation(&data)
                    } else {
                        stringeq::check_log_string_equations(&data)
                    })
                }));
            }
            "initial-route-equality" => {
                let (k, n) = (config.k_times, config.n_window);
                out.push(job(family.into(), "initial-value closed forms", move || {
                    stringeq::check_route_equality(k, n)
                }));
            }
            "string-equations-numeric" => {
                let c = config.c();
                for s in config.s_values() {
                    let mut params = GstreqParams::new(config.beta.0.clone(), config.q.0.clone(), c.clone());
                    params.precision = config.precision;
                    params.n_exp = config.n_exp;
                    params.s_points = vec![s.clone()];
                    params.tolerance = Rational::new(1.into(), num_traits::pow(10.into(), GSTREQ_TOLERANCE_EXP as usize));
                    let n = config.n_numeric;
                    out.push(job(format!("{family}@s={s}"), "string equations on test functions", move || {
                        let data = stringeq::build_initial_dressing(params.c.len(), n)?;
                        stringeq::check_gstreq_on_testfuncs(&data, &params)
                    }));
                }
            }
            "reduction-exact" => {
                let n = config.n_window;
                out.push(job(family.into(), "single-sector reduction", move || stringeq::check_reduction_exact(n)));
            }
            "reduction-numeric" => {
                let sh = shared.clone();
                let tol = ten_pow(-REDUCTION_TOLERANCE_EXP, prec);
                out.push(job(family.into(), "single-sector reduction", move || {
                    let points: Vec<BAPoint> = sh.points();
                    stringeq::check_reduction_numeric(&sh.tau()?, &points, &tol)
                }));
            }
            "derivative-oracle" => {
                let sh = shared.clone();
                let tol = ten_pow(-FD_TOLERANCE_EXP, prec);
                let h = config.fd_step.0.clone();
                out.push(job(family.into(), "analytic derivatives", move || {
                    let p = sh.points().into_iter().next().expect("validated non-empty");
                    check_derivative_oracle(&sh.tau()?, &p, &h, &tol)
                }));
            }
            other => unreachable!("unknown family {other}"),
        }
    }
    out
}

/// Tau-dependent families.
const TAU_FAMILIES: &[&str] = &[
    "linear-s-tbar1",
    "ba-linear",
    "log-eigen",
    "exp-identity",
    "reduced-lax",
    "toda-field",
    "reduction-numeric",
    "derivative-oracle",
];

fn run_job(job: Job, reproducible: bool) -> CheckReport {
    let start = Instant::now();
    let outcome = (job.task)();
    let elapsed = start.elapsed().as_millis() as u64;
    let mut report = match outcome {
        Ok(mut r) => {
            r.id = job.id;
            r
        }
        Err(e) => {
            let mut r = CheckReport::new(job.id, job.identity);
            if matches!(e, Error::Divergence { .. } | Error::PrecisionExhausted { .. }) {
                r.mark_inconclusive(e.to_string());
            }
            r.error = Some(e.to_string());
            r.finish()
        }
    };
    report.wall_time_ms = (!reproducible).then_some(elapsed);
    report
}

/// Runs every selected check; errors are recorded per check.
pub fn run_suite(config: &RunConfig) -> Result<SuiteRun> {
    config.validate().map_err(|e| Error::Config(e.to_string()))?;
    let start = Instant::now();
    let selected = config.selected();
    let cache = match &config.cache_dir {
        Some(dir) => Some(Arc::new(Cache::open(dir)?)),
        None => None,
    };
    let needs_tau = selected.iter().any(|f| TAU_FAMILIES.contains(f));
    let convergence = config.convergence && selected.iter().any(|f| ["ba-linear", "log-eigen", "toda-field"].contains(f));
    if let Some(cache) = &cache {
        let hi = if convergence { config.dmax + 2 } else { config.dmax };
        let d_chars = hi.max(config.hurwitz_dmax).max(config.schur_max);
        if needs_tau {
            cache.warm(d_chars, config.dmax, config.dmax)?;
            if convergence {
                cache.warm(0, hi, hi)?;
            }
        } else {
            cache.warm(d_chars, 0, 1)?;
        }
    }
    let shared = Arc::new(Shared {
        config: config.clone(),
        tau: needs_tau.then(|| build_tau(config, config.dmax)),
        tau_hi: (needs_tau && convergence).then(|| build_tau(config, config.dmax + 2)),
    });
    let queue = Mutex::new(jobs(&shared, cache.as_ref()).into_iter().collect::<VecDeque<_>>());
    let results = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..config.workers {
            scope.spawn(|| loop {
                let next = queue.lock().expect("job queue poisoned").pop_front();
                let Some(job) = next else { break };
                let report = run_job(job, config.reproducible);
                results.lock().expect("results poisoned").push(report);
            });
        }
    });
    let checks = results.into_inner().expect("results poisoned");
    let wall = (!config.reproducible).then(|| start.elapsed().as_millis() as u64);
    Ok(SuiteRun {
        report: Report::new(config.to_json(), checks, wall),
        cache: cache.map(|c| c.stats()),
    })
}

/// Writes the report as pretty JSON with a trailing newline.
pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    std::fs::write(path, report.to_json() + "\n")?;
    Ok(())
}
