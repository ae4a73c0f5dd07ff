//! Command-line front end: evaluate fractional derivatives, check the
//! first-order rotation transformation laws, scan invariant combinations,
//! and run the rotation-generator identity suite. Reports are CSV (default)
//! or JSON, written to stdout or --output, and are byte-stable across runs
//! for a fixed configuration.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frac2d::fracderiv::FracOrder;
use frac2d::{
    commutator_integer_checks, fit_combination_constant, frac_deriv, in_wedge,
    infinitesimal_caputo, infinitesimal_rl, scan_invariant, Axis, DerivKind, Error as CoreError,
    InvariantExpr, Point, PowerSum, QuadratureSpec, Rotation, Route, ScalarField,
};

const EXIT_CHECK_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;

const DEFAULT_PRECISION: usize = 10;
const NODES_ENV: &str = "FRAC2D_NODES";
const RATIO_WINDOW: (f64, f64) = (3.0, 5.0);
/// Residual bound for the integer-order (classical gradient) reduction.
const INTEGER_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Parser)]
#[command(
    name = "frac2d",
    version,
    about = "Fractional derivatives on the first quadrant and their behavior under frame rotation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args)]
struct GlobalOpts {
    /// Quadrature node count (default 64; env FRAC2D_NODES; config key `nodes`)
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Significant digits in numeric output (default 10; config key `precision`)
    #[arg(long, global = true)]
    precision: Option<usize>,
    /// Report format (default csv; config key `format`)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Plain-text config file (`key = value` lines); flags win over it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, ValueEnum)]
enum AxisArg {
    X,
    Y,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Axis {
        match a {
            AxisArg::X => Axis::X,
            AxisArg::Y => Axis::Y,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum KindArg {
    Rl,
    Caputo,
    /// Fractional integral of order alpha (the RL operator at -alpha)
    Integral,
}

#[derive(Copy, Clone, ValueEnum)]
enum LawArg {
    Rl,
    Caputo,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a fractional derivative or integral at points
    Deriv(DerivArgs),
    /// Check a first-order transformation law via Richardson ratios
    TransformCheck(TransformArgs),
    /// Scan an invariant combination over rotation angles, or fit A
    InvariantScan(ScanArgs),
    /// Run the rotation-generator commutator identity suite
    IdentitySuite,
}

#[derive(Args)]
struct DerivArgs {
    #[arg(long, value_enum, default_value = "rl")]
    kind: KindArg,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "x")]
    axis: AxisArg,
    /// Builtin (const1 | r2 | r4), inline power sum `c,bx,by;...`, or @file
    #[arg(long)]
    field: String,
    /// Evaluation point `x,y` (repeatable)
    #[arg(long = "point", required = true)]
    points: Vec<String>,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long, value_enum)]
    law: LawArg,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "x")]
    axis: AxisArg,
    #[arg(long)]
    field: String,
    /// Comma-separated rotation angles, e.g. `0.04,0.02`
    #[arg(long)]
    phi: String,
    #[arg(long = "point", required = true)]
    points: Vec<String>,
}

#[derive(Args)]
struct ScanArgs {
    /// Invariant expression id (const-xa, const-ya, const-diff, const-quad,
    /// q1, q1-same, q2, q2-yy, qc, qc-same)
    #[arg(long, required_unless_present = "fit_a")]
    expr: Option<String>,
    /// Fit the mixing constant A of Q1 + A*Q2 instead of scanning
    #[arg(long = "fit-A")]
    fit_a: bool,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    field: String,
    #[arg(long, default_value = "0,0.02,0.04")]
    phi: String,
    #[arg(long = "point", required = true)]
    points: Vec<String>,
}

/// Failure classes mapped to exit codes.
enum CliError {
    Usage(String),
    Domain(String),
    Check(String),
}

impl CliError {
    fn exit(self) -> ExitCode {
        let (code, label, msg) = match self {
            CliError::Usage(m) => (EXIT_USAGE, "usage error", m),
            CliError::Domain(m) => (EXIT_DOMAIN, "domain error", m),
            CliError::Check(m) => (EXIT_CHECK_FAIL, "check failed", m),
        };
        eprintln!("frac2d: {label}: {msg}");
        ExitCode::from(code)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        match e {
            CoreError::Parse(m) => CliError::Usage(m),
            CoreError::Fit(m) => CliError::Check(m),
            other => CliError::Domain(other.to_string()),
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

/// Resolved run settings: flags > config file > environment > defaults.
struct Settings {
    quad: QuadratureSpec,
    precision: usize,
    format: Format,
    output: Option<PathBuf>,
}

fn resolve_settings(g: &GlobalOpts) -> Result<Settings, CliError> {
    let mut nodes: Option<usize> = None;
    let mut precision: Option<usize> = None;
    let mut format: Option<Format> = None;

    if let Ok(v) = std::env::var(NODES_ENV) {
        let n = v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{NODES_ENV}={v} is not a node count")))?;
        nodes = Some(n);
    }
    if let Some(path) = &g.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line `{line}` is not key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "nodes" => {
                    nodes = Some(value.parse().map_err(|_| {
                        CliError::Usage(format!("config: nodes = {value} is not a node count"))
                    })?)
                }
                "precision" => {
                    precision = Some(value.parse().map_err(|_| {
                        CliError::Usage(format!("config: precision = {value} is not a digit count"))
                    })?)
                }
                "format" => {
                    format = Some(match value {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        other => {
                            return usage(format!("config: format = {other} (want csv or json)"))
                        }
                    })
                }
                other => return usage(format!("config: unknown key `{other}`")),
            }
        }
    }
    // flags win
    let nodes = g.nodes.or(nodes).unwrap_or(frac2d::DEFAULT_NODES);
    let precision = g.precision.or(precision).unwrap_or(DEFAULT_PRECISION);
    let format = g.format.or(format).unwrap_or(Format::Csv);
    if precision == 0 || precision > 17 {
        return usage(format!("precision {precision} out of range 1..=17"));
    }
    let quad = QuadratureSpec::with_nodes(nodes);
    quad.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Settings {
        quad,
        precision,
        format,
        output: g.output.clone(),
    })
}

fn parse_point(s: &str) -> Result<Point, CliError> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("point `{s}` must be `x,y`")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("bad coordinate `{v}` in point `{s}`")))
    };
    Ok(Point::new(parse(x)?, parse(y)?))
}

fn parse_points(list: &[String]) -> Result<Vec<Point>, CliError> {
    list.iter().map(|s| parse_point(s)).collect()
}

fn parse_phis(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad angle `{v}` in phi list `{s}`")))
        })
        .collect()
}

fn parse_field(spec: &str) -> Result<ScalarField, CliError> {
    match spec {
        "const1" => Ok(ScalarField::constant(1.0)),
        "r2" => Ok(ScalarField::r2()),
        "r4" => Ok(ScalarField::r4()),
        _ => {
            let text = if let Some(path) = spec.strip_prefix('@') {
                std::fs::read_to_string(path).map_err(|e| {
                    CliError::Usage(format!("cannot read field file {path}: {e}"))
                })?
            } else {
                spec.to_string()
            };
            let ps = PowerSum::parse(&text).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(ScalarField::from_power_sum(ps))
        }
    }
}

/// Fixed-significant-digit decimal formatting (scientific notation for
/// extreme magnitudes); deterministic, so reports are byte-stable.
fn fmt_sig(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", sig - 1, v);
    let (mant, exp) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= sig as i32 {
        return sci;
    }
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = exp + 1; // digits before the decimal point
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..(-point) {
            out.push('0');
        }
        out.push_str(digits.trim_end_matches('0'));
        if out.ends_with('.') {
            out.pop();
        }
    } else if (point as usize) >= digits.len() {
        out.push_str(&digits);
        for _ in 0..(point as usize - digits.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&digits[..point as usize]);
        let frac = digits[point as usize..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    }
    if out == "-0" {
        "0".into()
    } else {
        out
    }
}

/// A report is a header plus rows of (already formatted) cells.
struct Report {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Report {
    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let items: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let map: serde_json::Map<String, serde_json::Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), serde_json::Value::String(v.clone())))
                            .collect();
                        serde_json::Value::Object(map)
                    })
                    .collect();
                let mut out = serde_json::to_string_pretty(&items).expect("json");
                out.push('\n');
                out
            }
        }
    }
}

fn emit(report: &Report, s: &Settings) -> Result<(), CliError> {
    let text = report.render(s.format);
    match &s.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_deriv(args: &DerivArgs, s: &Settings) -> Result<u8, CliError> {
    let field = parse_field(&args.field)?;
    let points = parse_points(&args.points)?;
    let axis: Axis = args.axis.into();
    let (kind, alpha) = match args.kind {
        KindArg::Rl => (DerivKind::RiemannLiouville, args.alpha),
        KindArg::Caputo => (DerivKind::Caputo, args.alpha),
        KindArg::Integral => {
            if !(args.alpha > 0.0) {
                return usage(format!(
                    "fractional integral order must be positive, got {}",
                    args.alpha
                ));
            }
            (DerivKind::RiemannLiouville, -args.alpha)
        }
    };
    // fail fast: every point must have a positive integration-axis coordinate
    for &p in &points {
        if !(axis.coord(p) > 0.0) {
            return Err(CliError::Domain(format!(
                "point ({}, {}) has a non-positive {axis}-coordinate",
                p.x, p.y
            )));
        }
    }
    let mut report = Report {
        columns: vec!["point_x", "point_y", "value"],
        rows: Vec::new(),
    };
    for &p in &points {
        let v = frac_deriv(&field, kind, axis, alpha, p, &s.quad)?;
        report.rows.push(vec![
            fmt_sig(p.x, s.precision),
            fmt_sig(p.y, s.precision),
            fmt_sig(v, s.precision),
        ]);
    }
    emit(&report, s)?;
    Ok(0)
}

fn cmd_transform_check(args: &TransformArgs, s: &Settings) -> Result<u8, CliError> {
    let field = parse_field(&args.field)?;
    let points = parse_points(&args.points)?;
    let phis = parse_phis(&args.phi)?;
    let axis: Axis = args.axis.into();
    let order = FracOrder::new(args.alpha).map_err(|e| CliError::Domain(e.to_string()))?;
    let integer_case = order.integer_order().is_some();
    // fail fast: all (phi, point) pairs must stay inside the wedge
    for &p in &points {
        if !p.in_open_quadrant() {
            return Err(CliError::Domain(format!(
                "point ({}, {}) is outside the open first quadrant",
                p.x, p.y
            )));
        }
        for &phi in &phis {
            if !in_wedge(&Rotation::new(phi), p) {
                return Err(CliError::Domain(format!(
                    "point ({}, {}) leaves the wedge at phi = {phi}",
                    p.x, p.y
                )));
            }
        }
    }
    let mut report = Report {
        columns: vec![
            "phi", "point_x", "point_y", "lhs", "rhs", "residual", "ratio", "pass",
        ],
        rows: Vec::new(),
    };
    let mut all_pass = true;
    for &phi in &phis {
        for &p in &points {
            let rep = match args.law {
                LawArg::Rl => infinitesimal_rl(&field, axis, &order, phi, p, &s.quad, true)?,
                LawArg::Caputo => {
                    infinitesimal_caputo(&field, axis, &order, phi, p, &s.quad, true)?
                }
            };
            // at integer order the law reduces to the classical rotated
            // gradient; the residual is the reduction defect and must be
            // at machine level, the ratio carries no information there
            let pass = if integer_case {
                rep.residual <= INTEGER_RESIDUAL_TOL
            } else {
                rep.richardson_ratio
                    .map(|r| r >= RATIO_WINDOW.0 && r <= RATIO_WINDOW.1)
                    .unwrap_or(false)
            };
            all_pass &= pass;
            report.rows.push(vec![
                fmt_sig(phi, s.precision),
                fmt_sig(p.x, s.precision),
                fmt_sig(p.y, s.precision),
                fmt_sig(rep.lhs, s.precision),
                fmt_sig(rep.rhs, s.precision),
                fmt_sig(rep.residual, s.precision),
                rep.richardson_ratio
                    .map(|r| fmt_sig(r, s.precision))
                    .unwrap_or_default(),
                pass.to_string(),
            ]);
        }
    }
    emit(&report, s)?;
    Ok(if all_pass { 0 } else { EXIT_CHECK_FAIL })
}

fn cmd_invariant_scan(args: &ScanArgs, s: &Settings) -> Result<u8, CliError> {
    let field = parse_field(&args.field)?;
    let points = parse_points(&args.points)?;
    let phis = parse_phis(&args.phi)?;
    for &p in &points {
        if !p.in_open_quadrant() {
            return Err(CliError::Domain(format!(
                "point ({}, {}) is outside the open first quadrant",
                p.x, p.y
            )));
        }
    }
    if args.fit_a {
        let fit = fit_combination_constant(&field, args.alpha, &phis, &points, &s.quad, Route::Auto)?;
        let mut report = Report {
            columns: vec!["A", "post_fit_ratio", "q1_drift_rms", "q2_drift_rms"],
            rows: Vec::new(),
        };
        report.rows.push(vec![
            fmt_sig(fit.a, s.precision),
            fit.post_fit_ratio
                .map(|r| fmt_sig(r, s.precision))
                .unwrap_or_default(),
            fmt_sig(fit.q1_drift_rms, s.precision),
            fmt_sig(fit.q2_drift_rms, s.precision),
        ]);
        emit(&report, s)?;
        let window_ok = fit
            .post_fit_ratio
            .map(|r| r >= RATIO_WINDOW.0 && r <= RATIO_WINDOW.1)
            .unwrap_or(true); // ratio absent means the combination sits at the noise floor
        return Ok(if window_ok { 0 } else { EXIT_CHECK_FAIL });
    }
    let id = args.expr.as_deref().expect("clap enforces expr without --fit-A");
    let expr = InvariantExpr::from_id(id)
        .ok_or_else(|| CliError::Usage(format!("unknown invariant expression `{id}`")))?;
    let scan = scan_invariant(expr, &field, args.alpha, &phis, &points, &s.quad)?;
    for w in &scan.warnings {
        eprintln!("frac2d: warning: {w}");
    }
    let mut report = Report {
        columns: vec![
            "expr_id", "alpha", "phi", "point_x", "point_y", "value", "deviation",
        ],
        rows: Vec::new(),
    };
    for row in &scan.rows {
        report.rows.push(vec![
            row.expr_id.clone(),
            fmt_sig(row.alpha, s.precision),
            fmt_sig(row.phi, s.precision),
            fmt_sig(row.point_x, s.precision),
            fmt_sig(row.point_y, s.precision),
            fmt_sig(row.value, s.precision),
            fmt_sig(row.deviation, s.precision),
        ]);
    }
    emit(&report, s)?;
    Ok(0)
}

fn cmd_identity_suite(s: &Settings) -> Result<u8, CliError> {
    let suite = commutator_integer_checks(1e-10);
    let mut report = Report {
        columns: vec!["check", "max_err", "pass"],
        rows: Vec::new(),
    };
    for c in &suite.checks {
        report.rows.push(vec![
            c.name.clone(),
            fmt_sig(c.max_err, s.precision),
            c.pass.to_string(),
        ]);
    }
    emit(&report, s)?;
    Ok(if suite.all_pass() { 0 } else { EXIT_CHECK_FAIL })
}

fn run() -> Result<u8, CliError> {
    let cli = Cli::parse();
    let settings = resolve_settings(&cli.global)?;
    match &cli.cmd {
        Cmd::Deriv(args) => cmd_deriv(args, &settings),
        Cmd::TransformCheck(args) => cmd_transform_check(args, &settings),
        Cmd::InvariantScan(args) => cmd_invariant_scan(args, &settings),
        Cmd::IdentitySuite => cmd_identity_suite(&settings),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => e.exit(),
    }
}
