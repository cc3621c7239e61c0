//! Commands behind the `imreg` binary: run a scenario, run the verification
//! suites, sweep a parameter grid. Everything here returns data or a
//! [`CliError`]; printing and exit codes live in `main.rs`.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use imreg::oracles::{run_suite, CheckRecord};
use imreg::scenario::ScenarioConfig;
use imreg::sim::{metrics, simulate, Metrics, Trace};
use rayon::prelude::*;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

/// Tolerance for the reported settle time.
pub const SETTLE_TOL: f64 = 0.05;
/// Length of the tail window for rms(e), capped at the horizon.
pub const TAIL_WINDOW: f64 = 20.0;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] imreg::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use imreg::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_CONFIG,
            CliError::Core(E::Config(_) | E::InvalidArgument(_) | E::Precondition(_)) => {
                EXIT_CONFIG
            }
            CliError::Core(_) => EXIT_NUMERIC,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Header line plus one line per row, numbers in shortest round-trip form.
pub fn write_csv(trace: &Trace, path: &Path) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut line = trace.names.join(",");
    line.push('\n');
    w.write_all(line.as_bytes()).map_err(io_err(path))?;
    for row in &trace.rows {
        line.clear();
        for (j, x) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            let _ = write!(line, "{x:?}");
        }
        line.push('\n');
        w.write_all(line.as_bytes()).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_csv(path: &Path) -> Result<Trace, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    let names: Vec<String> = match lines.next() {
        Some(h) => h.split(',').map(str::to_string).collect(),
        None => return Err(CliError::Usage(format!("{}: empty CSV", path.display()))),
    };
    let mut trace = Trace::empty(names);
    for (i, l) in lines.enumerate() {
        let row = l
            .split(',')
            .map(|s| s.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), i + 2)))?;
        trace.rows.push(row);
    }
    Ok(trace)
}

/// One figure panel: a title and the trace columns drawn against `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub series: Vec<String>,
}

/// Panels for the usual figures: output vs reference, error, internal-model
/// state, learned coefficients, gain and control.
pub fn default_panels(trace: &Trace) -> Vec<Panel> {
    let group = |prefix: &str| -> Vec<String> {
        trace
            .group(prefix)
            .into_iter()
            .map(|j| trace.names[j].clone())
            .collect()
    };
    let mut out = vec![
        Panel {
            title: "output".into(),
            series: vec!["y".into()],
        },
        Panel {
            title: "tracking error".into(),
            series: vec!["e".into()],
        },
        Panel {
            title: "plant state".into(),
            series: group("x"),
        },
        Panel {
            title: "internal model state".into(),
            series: group("eta"),
        },
        Panel {
            title: "learned coefficients".into(),
            series: group("ahat"),
        },
        Panel {
            title: "gain".into(),
            series: vec!["khat".into()],
        },
        Panel {
            title: "control".into(),
            series: vec!["u".into()],
        },
    ];
    if trace.index_of("xhat1").is_some() {
        out.insert(
            3,
            Panel {
                title: "filter state".into(),
                series: group("xhat"),
            },
        );
    }
    out.retain(|p| !p.series.is_empty());
    out
}

/// Writes `<series>.dat` (`t value` per line) for every series in `panels`
/// plus `plot.txt` describing the panels.
pub fn emit_plot(trace: &Trace, panels: &[Panel], dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let t = trace.times();
    let mut desc =
        String::from("# one panel per block; each series is <name>.dat with columns t value\n");
    for p in panels {
        let _ = writeln!(desc, "\n[{}]\nx = t", p.title);
        for s in &p.series {
            let col = trace
                .column(s)
                .ok_or_else(|| CliError::Usage(format!("trace has no column '{s}'")))?;
            let path = dir.join(format!("{s}.dat"));
            let mut body = String::with_capacity(col.len() * 24);
            for (ti, y) in t.iter().zip(&col) {
                let _ = writeln!(body, "{ti:?} {y:?}");
            }
            fs::write(&path, body).map_err(io_err(&path))?;
            let _ = writeln!(desc, "series = {s}.dat");
        }
    }
    let path = dir.join("plot.txt");
    fs::write(&path, desc).map_err(io_err(&path))
}

/// Shortest decimal that parses back to the same `f64`, with an exponent
/// for very small or large magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".into(), num)
}

pub fn trace_metrics(trace: &Trace, a_true: Option<&[f64]>) -> Result<Metrics, CliError> {
    let t = trace.times();
    let span = t.last().copied().unwrap_or(0.0) - t.first().copied().unwrap_or(0.0);
    Ok(metrics(trace, SETTLE_TOL, TAIL_WINDOW.min(span), a_true)?)
}

pub fn metrics_report(name: &str, trace: &Trace, m: &Metrics, seconds: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario = {name}");
    let _ = writeln!(s, "samples = {}", trace.len());
    let _ = writeln!(
        s,
        "t_end = {}",
        num(trace.times().last().copied().unwrap_or(0.0))
    );
    let _ = writeln!(s, "settle_time_{SETTLE_TOL} = {}", fmt_opt(m.settle_time));
    let _ = writeln!(s, "tail_rms_e = {}", num(m.tail_rms));
    let _ = writeln!(s, "max_abs_e = {}", num(m.max_abs_e));
    let _ = writeln!(s, "a_err_final = {}", fmt_opt(m.a_err_final));
    let a: Vec<String> = trace.last("ahat").into_iter().map(num).collect();
    let _ = writeln!(s, "a_hat_final = [{}]", a.join(", "));
    let _ = writeln!(s, "runtime_s = {seconds:.3}");
    s
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub name: String,
    pub trace_path: PathBuf,
    pub metrics_path: PathBuf,
    pub plot_dir: Option<PathBuf>,
    pub metrics: Metrics,
    pub rows: usize,
}

/// Runs one scenario and writes `<name>_trace.csv`, `<name>_metrics.txt` and,
/// when `plot` is set, `<name>_plot/`.
pub fn cmd_run(
    source: &str,
    overrides: &[String],
    out: &Path,
    plot: bool,
) -> Result<RunOutput, CliError> {
    let cfg = ScenarioConfig::load(source, overrides)?;
    let sc = cfg.build::<f64>()?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let started = Instant::now();
    let trace = simulate(&sc)?;
    let seconds = started.elapsed().as_secs_f64();
    let m = trace_metrics(&trace, sc.a_true.as_deref())?;

    let trace_path = out.join(format!("{}_trace.csv", sc.name));
    write_csv(&trace, &trace_path)?;
    let metrics_path = out.join(format!("{}_metrics.txt", sc.name));
    fs::write(&metrics_path, metrics_report(&sc.name, &trace, &m, seconds))
        .map_err(io_err(&metrics_path))?;
    let plot_dir = if plot {
        let dir = out.join(format!("{}_plot", sc.name));
        emit_plot(&trace, &default_panels(&trace), &dir)?;
        Some(dir)
    } else {
        None
    };
    Ok(RunOutput {
        name: sc.name,
        trace_path,
        metrics_path,
        plot_dir,
        metrics: m,
        rows: trace.len(),
    })
}

/// Runs a verification suite; never stops at the first failed check.
pub fn cmd_verify(suite: &str, seed: u64) -> Result<Vec<CheckRecord>, CliError> {
    Ok(run_suite(suite, seed)?)
}

/// One sweep axis, `key=v1,v2,...`. Commas inside brackets belong to array
/// values.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub key: String,
    pub values: Vec<String>,
}

impl GridAxis {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let (key, rest) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("grid axis '{spec}' is not key=v1,v2,...")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(CliError::Usage(format!(
                "grid axis '{spec}' has an empty key"
            )));
        }
        let mut values = Vec::new();
        let (mut depth, mut cur) = (0i32, String::new());
        for c in rest.chars() {
            match c {
                '[' => depth += 1,
                ']' => depth -= 1,
                ',' if depth == 0 => {
                    values.push(std::mem::take(&mut cur).trim().to_string());
                    continue;
                }
                _ => {}
            }
            cur.push(c);
        }
        if !cur.trim().is_empty() {
            values.push(cur.trim().to_string());
        }
        values.retain(|v| !v.is_empty());
        Ok(Self {
            key: key.to_string(),
            values,
        })
    }
}

/// Cartesian product of the axes; empty when there are no axes or any axis
/// has no values.
pub fn grid_points(axes: &[GridAxis]) -> Vec<Vec<String>> {
    if axes.is_empty() || axes.iter().any(|a| a.values.is_empty()) {
        return Vec::new();
    }
    let mut points: Vec<Vec<String>> = vec![Vec::new()];
    for a in axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                a.values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect();
    }
    points
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub values: Vec<String>,
    pub result: Result<Metrics, String>,
}

pub const SWEEP_METRIC_COLUMNS: [&str; 6] = [
    "status",
    "settle_time",
    "tail_rms_e",
    "max_abs_e",
    "a_err_final",
    "error",
];

fn sweep_point(
    source: &str,
    overrides: &[String],
    axes: &[GridAxis],
    values: &[String],
) -> Result<Metrics, String> {
    let mut ov = overrides.to_vec();
    ov.extend(
        axes.iter()
            .zip(values)
            .map(|(a, v)| format!("{}={v}", a.key)),
    );
    let run = || -> Result<Metrics, CliError> {
        let sc = ScenarioConfig::load(source, &ov)?.build::<f64>()?;
        let trace = simulate(&sc)?;
        trace_metrics(&trace, sc.a_true.as_deref())
    };
    run().map_err(|e| e.to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_sweep_csv(axes: &[GridAxis], rows: &[SweepRow], path: &Path) -> Result<(), CliError> {
    let mut s = String::new();
    let header: Vec<&str> = axes
        .iter()
        .map(|a| a.key.as_str())
        .chain(SWEEP_METRIC_COLUMNS)
        .collect();
    s.push_str(&header.join(","));
    s.push('\n');
    for r in rows {
        let mut fields: Vec<String> = r.values.iter().map(|v| csv_field(v)).collect();
        match &r.result {
            Ok(m) => fields.extend([
                "ok".into(),
                fmt_opt(m.settle_time),
                num(m.tail_rms),
                num(m.max_abs_e),
                fmt_opt(m.a_err_final),
                String::new(),
            ]),
            Err(e) => {
                fields.extend([
                    "error".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]);
                fields.push(csv_field(e));
            }
        }
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    fs::write(path, s).map_err(io_err(path))
}

/// Runs every grid point on up to `workers` threads and writes
/// `<out>/<name>_sweep.csv`. A failing point is recorded in its row.
pub fn cmd_sweep(
    source: &str,
    overrides: &[String],
    axes: &[GridAxis],
    workers: usize,
    out: &Path,
) -> Result<(PathBuf, Vec<SweepRow>), CliError> {
    // the base scenario and every axis key must load before anything runs
    let base = ScenarioConfig::load(source, overrides)?;
    base.build::<f64>()?;
    let points = grid_points(axes);
    if let Some(first) = points.first() {
        let mut ov = overrides.to_vec();
        ov.extend(
            axes.iter()
                .zip(first)
                .map(|(a, v)| format!("{}={v}", a.key)),
        );
        ScenarioConfig::load(source, &ov)?;
    }
    fs::create_dir_all(out).map_err(io_err(out))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .map(|values| SweepRow {
                values: values.clone(),
                result: sweep_point(source, overrides, axes, values),
            })
            .collect()
    });
    let path = out.join(format!("{}_sweep.csv", base.name));
    write_sweep_csv(axes, &rows, &path)?;
    Ok((path, rows))
}
