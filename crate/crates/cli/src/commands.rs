use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use euqoe_core::protocol::build_protocol;
use euqoe_core::protocol::ProtocolRecord;
use rayon::prelude::*;

use crate::cache::{self, Cache};
use crate::config::{Point, RunConfig};
use crate::error::{exit, CliError};
use crate::rows::{evaluate_point, fmt_f64, to_csv, ResultRow};
use crate::verify::{conservation_suite, oracle_suite, wightman_suite, SuiteReport};

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::io(&path.display().to_string(), e))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Evaluates the base point and writes it as a one-row CSV.
pub fn efficiency(cfg: &RunConfig, out: Option<&Path>) -> Result<i32, CliError> {
    let eval = evaluate_point(&cfg.base);
    for w in &eval.warnings {
        eprintln!("warning: {w}");
    }
    write_output(out, &to_csv([&eval.row]))?;
    match eval.error {
        Some(e) => Err(e),
        None => Ok(exit::SUCCESS),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepStats {
    pub rows: usize,
    pub computed: usize,
    pub cached: usize,
    pub failed: usize,
}

fn evaluate_cached(cache: &Cache, point: &Point) -> (ResultRow, bool) {
    let key = cache::key(point);
    if let Some(row) = cache.get(&key) {
        return (row, true);
    }
    let eval = evaluate_point(point);
    for w in &eval.warnings {
        eprintln!("warning: {w}");
    }
    if eval.error.is_none() {
        if let Err(e) = cache.put(&key, &eval.row) {
            eprintln!("warning: cache write failed: {e}");
        }
    }
    (eval.row, false)
}

/// Gnuplot script plotting both efficiency columns against the first axis.
pub fn gnuplot_script(cfg: &RunConfig, csv: &Path) -> String {
    let x = cfg.axes.first().map(|a| a.key.column()).unwrap_or("tau_a");
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set xlabel '{x}'");
    let _ = writeln!(s, "set ylabel 'efficiency'");
    if cfg
        .axes
        .first()
        .is_some_and(|a| a.spacing == crate::config::Spacing::Log)
    {
        let _ = writeln!(s, "set logscale x");
    }
    let _ = writeln!(
        s,
        "plot '{f}' using '{x}':'eta_e' with linespoints, '{f}' using '{x}':'eta_e_closed_form' with lines, \
         '{f}' using '{x}':'eta_0' with lines dashtype 2",
        f = csv.display()
    );
    s
}

fn gnuplot_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".gp");
    out.with_file_name(name)
}

/// Evaluates the sweep grid in parallel, reusing cached rows.
pub fn sweep(
    cfg: &RunConfig,
    out: Option<&Path>,
    workers: Option<usize>,
) -> Result<(i32, SweepStats), CliError> {
    if cfg.axes.is_empty() {
        return Err(CliError::config(
            "sweep: no axes configured, set sweep.axis",
        ));
    }
    cfg.check_grid()?;
    let points = cfg.grid();
    let cache = Cache::open(&cfg.cache_dir)
        .map_err(|e| CliError::io(&cfg.cache_dir.display().to_string(), e))?;
    let threads = match workers {
        Some(0) => return Err(CliError::config("--workers: must be at least 1")),
        Some(n) => n,
        None => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::config(format!("--workers: {e}")))?;
    let results: Vec<(ResultRow, bool)> = pool.install(|| {
        points
            .par_iter()
            .map(|p| evaluate_cached(&cache, p))
            .collect()
    });
    let stats = SweepStats {
        rows: results.len(),
        cached: results.iter().filter(|r| r.1).count(),
        computed: results.iter().filter(|r| !r.1).count(),
        failed: results.iter().filter(|r| r.0.failed()).count(),
    };
    write_output(out, &to_csv(results.iter().map(|r| &r.0)))?;
    if let Some(out) = out {
        let gp = gnuplot_path(out);
        std::fs::write(&gp, gnuplot_script(cfg, out))
            .map_err(|e| CliError::io(&gp.display().to_string(), e))?;
    }
    eprintln!(
        "{} rows, {} computed, {} from cache, {} failed",
        stats.rows, stats.computed, stats.cached, stats.failed
    );
    if stats.rows > 0 && stats.failed == stats.rows {
        return Err(CliError::numeric(format!(
            "sweep: all {} rows failed",
            stats.rows
        )));
    }
    Ok((exit::SUCCESS, stats))
}

/// Renders a protocol record as TOML.
pub fn render_protocol(r: &ProtocolRecord) -> String {
    let mut s = String::new();
    let num = |s: &mut String, k: &str, v: f64| {
        let _ = if v.is_finite() {
            writeln!(s, "{k} = {}", fmt_f64(v))
        } else {
            writeln!(s, "{k} = nan")
        };
    };
    num(&mut s, "omega1", r.omega1);
    num(&mut s, "omega2", r.omega2);
    num(&mut s, "alpha_aH", r.alpha_ah);
    num(&mut s, "alpha_aC", r.alpha_ac);
    num(&mut s, "aH2", r.a_h2);
    num(&mut s, "aH1", r.alpha_ah * r.a_h2);
    num(&mut s, "aC2", r.a_h2);
    num(&mut s, "aC1", r.alpha_ac * r.a_h2);
    num(&mut s, "tau_a", r.tau_a);
    num(&mut s, "tau_b", r.alpha_ah * r.tau_a);
    let _ = writeln!(s, "dimension = \"{}\"", r.dimension);
    let parity = r.parity.map(|p| p.as_str()).unwrap_or("degenerate");
    let _ = writeln!(s, "parity = \"{parity}\"");
    if let Some(i1) = &r.i1 {
        num(&mut s, "i1", i1.value);
        num(&mut s, "i1_reduced", i1.reduced);
        num(&mut s, "i1_error", i1.reduced_error);
        let sign = match r.parity {
            None => "zero",
            Some(_) if i1.reduced > 0.0 => "positive",
            Some(_) => "negative",
        };
        let _ = writeln!(s, "i1_sign = \"{sign}\"");
    }
    if let Some(t) = &r.traces {
        num(&mut s, "trace_v", t.v);
        num(&mut s, "trace_aH", t.heat);
        num(&mut s, "trace_aC", t.cool);
    }
    num(&mut s, "conservation_residual", r.conservation_residual);
    num(&mut s, "eta_0", r.eta_0);
    num(&mut s, "eta_e", r.eta_e);
    let _ = writeln!(s, "valid = {}", r.valid());
    if let Some(f) = &r.failure {
        let _ = writeln!(s, "failure = {:?}", f);
    }
    let _ = writeln!(s, "\n[checks]");
    for (name, ok) in r.checks.named() {
        let _ = writeln!(s, "{name} = \"{}\"", if ok { "pass" } else { "fail" });
    }
    s
}

/// Builds the protocol at the base point; exits 4 if any check fails.
pub fn protocol(cfg: &RunConfig, out: Option<&Path>) -> Result<i32, CliError> {
    let b = &cfg.base;
    let record = build_protocol(
        b.omega1,
        b.omega2,
        b.alpha_ah,
        b.a_h2,
        b.tau_a,
        b.dimension,
        &b.numerics(),
    )?;
    write_output(out, &render_protocol(&record))?;
    if record.valid() {
        return Ok(exit::SUCCESS);
    }
    let message = if !record.checks.constraint_chain {
        format!(
            "protocol infeasible: alpha_aH = {} outside (eta_0, 1) = ({}, 1)",
            fmt_f64(b.alpha_ah),
            fmt_f64(record.eta_0)
        )
    } else {
        format!(
            "protocol checks failed: {}",
            record.checks.failing().join(", ")
        )
    };
    Err(CliError::infeasible(message))
}

/// Runs the verification suites and prints their reports.
pub fn verify(cfg: &RunConfig, out: Option<&Path>) -> Result<i32, CliError> {
    let dim = cfg.base.dimension;
    let suites: [Box<dyn Fn() -> SuiteReport + '_>; 3] = [
        Box::new(move || wightman_suite(dim)),
        Box::new(|| oracle_suite(cfg)),
        Box::new(|| conservation_suite(cfg)),
    ];
    let mut reports = Vec::new();
    for suite in &suites {
        let r = suite();
        if out.is_none() {
            print!("{r}");
        }
        reports.push(r);
    }
    if let Some(out) = out {
        let text: String = reports.iter().map(ToString::to_string).collect();
        write_output(Some(out), &text)?;
    }
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name)
        .collect();
    if failed.is_empty() {
        Ok(exit::SUCCESS)
    } else {
        Err(CliError::verification(format!(
            "verification failed: {}",
            failed.join(", ")
        )))
    }
}
