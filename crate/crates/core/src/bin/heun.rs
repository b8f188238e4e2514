use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heun::geometry::BranchCutSet;
use heun::{EvalResult, Evaluator, FunctionKind, HeunError, HeunParams, Path, PointClass, Settings};
use num_complex::Complex64;
use serde_json::{json, Value};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_SINGULAR: u8 = 4;
const EXIT_SELFTEST: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "heun", version, about = "Evaluate the local Heun functions HeunL and HeunS")]
struct Cli {
    /// Step ratio of the analytic continuation, in [0.05, 0.9]
    #[arg(long, global = true, default_value_t = 0.5)]
    kappa: f64,
    /// Cap on the number of terms of a single series
    #[arg(long, global = true, default_value_t = 20_000)]
    max_terms: usize,
    #[arg(long, global = true, value_enum, default_value_t = Kind::Hl)]
    kind: Kind,
    /// Output is always JSON Lines; accepted for compatibility
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Hl,
    Hs,
}

impl From<Kind> for FunctionKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Hl => FunctionKind::HeunL,
            Kind::Hs => FunctionKind::HeunS,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Value and derivative at one point
    Eval {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        z: Complex64,
    },
    /// Continuation along a polyline starting at 0
    Path {
        #[command(flatten)]
        params: ParamArgs,
        /// Waypoints "x1,y1;x2,y2;..." after the implicit leading 0
        #[arg(long, allow_hyphen_values = true)]
        path: Option<String>,
        /// Target of the default path when --path is absent
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        z: Option<Complex64>,
    },
    /// Rectangular sweep written as JSON Lines
    Grid {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: PathBuf,
        /// Adds the relative error "lambda" against a known solution
        #[arg(long, value_enum)]
        reference: Option<Reference>,
    },
    /// Closed-form check Hl(4, 9/4; 3/2, 3/2, 1/2, 2; z) = 2/(sqrt(4-z)(1-z))
    Selftest {
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Half-width of the square grid
        #[arg(long, default_value_t = 20.0)]
        extent: f64,
    },
}

#[derive(Args, Debug)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    a: Complex64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    q: Complex64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    alpha: Complex64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    beta: Complex64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    gamma: Complex64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    delta: Complex64,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    re_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    re_max: f64,
    #[arg(long)]
    re_steps: usize,
    #[arg(long, allow_hyphen_values = true)]
    im_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    im_max: f64,
    #[arg(long)]
    im_steps: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Reference {
    ClosedForm,
}

/// "re,im" or a bare real number.
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| format!("'{t}' is not a number: {e}"))
    };
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
        None => Ok(Complex64::new(parse(s)?, 0.0)),
    }
}

fn parse_path(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(parse_complex)
        .collect()
}

impl ParamArgs {
    fn build(&self) -> Result<HeunParams, HeunError> {
        HeunParams::new(self.a, self.q, self.alpha, self.beta, self.gamma, self.delta)
    }
}

fn closed_form_params() -> HeunParams {
    HeunParams::real(4.0, 2.25, 1.5, 1.5, 0.5, 2.0).expect("valid parameters")
}

/// `h = 2/(sqrt(4-z)(1-z))` and `h'`.
fn closed_form(z: Complex64) -> (Complex64, Complex64) {
    let h = 2.0 / ((4.0 - z).sqrt() * (1.0 - z));
    (h, h * (0.5 / (4.0 - z) + 1.0 / (1.0 - z)))
}

fn lambda(r: &EvalResult, z: Complex64) -> f64 {
    let (h, dh) = closed_form(z);
    (r.f - h).norm() / (1.0 + h.norm()) + (r.df - dh).norm() / (1.0 + dh.norm())
}

fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn pair(z: Complex64) -> Value {
    json!([number(z.re), number(z.im)])
}

fn err_field(r: f64) -> Value {
    if r.is_nan() {
        json!("nan")
    } else if r.is_infinite() {
        json!("inf")
    } else {
        json!(r)
    }
}

fn record(z: Complex64, r: &EvalResult, route: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("z".into(), pair(z));
    m.insert("f".into(), pair(r.f));
    m.insert("df".into(), pair(r.df));
    m.insert("err".into(), err_field(r.r));
    m.insert("nterms".into(), json!(r.n_terms));
    m.insert("route".into(), json!(route));
    m
}

fn empty_record(z: Complex64, route: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("z".into(), pair(z));
    m.insert("f".into(), Value::Null);
    m.insert("df".into(), Value::Null);
    m.insert("err".into(), Value::Null);
    m.insert("nterms".into(), json!(0));
    m.insert("route".into(), json!(route));
    m
}

fn error_record(z: Complex64, e: &HeunError) -> serde_json::Map<String, Value> {
    let mut m = empty_record(z, "error");
    m.insert("error".into(), json!(e.kind()));
    m.insert("message".into(), json!(e.to_string()));
    match e {
        HeunError::NonConvergence { n_terms, r, .. } | HeunError::PathTooClose { n_terms, r, .. } => {
            m.insert("nterms".into(), json!(n_terms));
            m.insert("err".into(), err_field(*r));
        }
        _ => {}
    }
    m
}

fn exit_code(e: &HeunError) -> u8 {
    match e {
        HeunError::InvalidParams(_) | HeunError::InvalidPath(_) | HeunError::DomainError { .. } => {
            EXIT_USAGE
        }
        HeunError::SingularPoint { .. } | HeunError::OnCut { .. } => EXIT_SINGULAR,
        HeunError::NonConvergence { .. }
        | HeunError::PathTooClose { .. }
        | HeunError::IllConditioned { .. }
        | HeunError::NearApexLoss => EXIT_NUMERIC,
    }
}

fn fail(z: Complex64, e: &HeunError) -> ExitCode {
    eprintln!("{}", Value::Object(error_record(z, e)));
    ExitCode::from(exit_code(e))
}

fn usage(message: &str) -> ExitCode {
    eprintln!("{}", json!({"error": "usage", "message": message}));
    ExitCode::from(EXIT_USAGE)
}

fn grid_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn cmd_eval(ev: &Evaluator, kind: FunctionKind, params: &ParamArgs, z: Complex64) -> ExitCode {
    let p = match params.build() {
        Ok(p) => p,
        Err(e) => return fail(z, &e),
    };
    match ev.evaluate(&p, kind, z) {
        Ok(e) => {
            println!("{}", Value::Object(record(z, &e.result, &e.route.name())));
            ExitCode::SUCCESS
        }
        Err(e) => fail(z, &e),
    }
}

fn cmd_path(
    ev: &Evaluator,
    kind: FunctionKind,
    params: &ParamArgs,
    path: Option<&str>,
    z: Option<Complex64>,
) -> ExitCode {
    let points = match path.map(parse_path).transpose() {
        Ok(points) => points.unwrap_or_default(),
        Err(msg) => return usage(&msg),
    };
    match (points.is_empty(), z) {
        (true, Some(z)) => return cmd_eval(ev, kind, params, z),
        (true, None) => return usage("either --path or --z is required"),
        (false, Some(_)) => return usage("--path and --z are mutually exclusive"),
        (false, None) => {}
    }
    let end = *points.last().expect("non-empty");
    let p = match params.build() {
        Ok(p) => p,
        Err(e) => return fail(end, &e),
    };
    let path = match Path::from_points(&p, &points) {
        Ok(path) => path,
        Err(e) => return fail(end, &e),
    };
    let result = match kind {
        FunctionKind::HeunL => ev.heunl_multivalued(&p, &path),
        FunctionKind::HeunS => ev.heuns_multivalued(&p, &path),
    };
    match result {
        Ok(r) => {
            let mut m = record(end, &r, "path");
            m.insert("winding".into(), json!(path.final_arg()));
            println!("{}", Value::Object(m));
            ExitCode::SUCCESS
        }
        Err(e) => fail(end, &e),
    }
}

fn cmd_grid(
    ev: &Evaluator,
    kind: FunctionKind,
    params: &ParamArgs,
    grid: &GridArgs,
    out: &PathBuf,
    reference: Option<Reference>,
) -> ExitCode {
    if grid.re_steps < 2 || grid.im_steps < 2 {
        return usage("grid steps must be at least 2");
    }
    let bounds = [grid.re_min, grid.re_max, grid.im_min, grid.im_max];
    if bounds.iter().any(|b| !b.is_finite()) {
        return usage("grid bounds must be finite");
    }
    let p = match params.build() {
        Ok(p) => p,
        Err(e) => return fail(Complex64::new(0.0, 0.0), &e),
    };
    let file = match File::create(out) {
        Ok(f) => f,
        Err(e) => return usage(&format!("cannot create {}: {e}", out.display())),
    };
    let mut w = BufWriter::new(file);
    let res = grid_nodes(grid.re_min, grid.re_max, grid.re_steps);
    let ims = grid_nodes(grid.im_min, grid.im_max, grid.im_steps);
    for &im in &ims {
        for &re in &res {
            let z = Complex64::new(re, im);
            let line = match ev.classify(&p, kind, z) {
                PointClass::Singular(_) | PointClass::OnCut(_) => empty_record(z, "skipped"),
                _ => match ev.evaluate(&p, kind, z) {
                    Ok(e) => {
                        let mut m = record(z, &e.result, &e.route.name());
                        if let Some(Reference::ClosedForm) = reference {
                            m.insert("lambda".into(), number(lambda(&e.result, z)));
                        }
                        m
                    }
                    Err(e) => error_record(z, &e),
                },
            };
            if let Err(e) = writeln!(w, "{}", Value::Object(line)) {
                return usage(&format!("write failed: {e}"));
            }
        }
    }
    if let Err(e) = w.flush() {
        return usage(&format!("write failed: {e}"));
    }
    ExitCode::SUCCESS
}

fn cmd_selftest(settings: Settings, tol: f64, steps: usize, extent: f64) -> ExitCode {
    if steps < 2 || !(extent > 0.0) {
        return usage("selftest needs --steps >= 2 and --extent > 0");
    }
    let p = closed_form_params();
    let ev = Evaluator::new(settings);
    let cuts = BranchCutSet::new(&p, FunctionKind::HeunL);
    let nodes = grid_nodes(-extent, extent, steps);
    let (mut max_lambda, mut sum, mut count, mut skipped) = (0.0f64, 0.0, 0usize, 0usize);
    let mut max_terms = 0;
    let mut worst = Complex64::new(0.0, 0.0);
    let mut failures = 0usize;
    for &im in &nodes {
        for &re in &nodes {
            let z = Complex64::new(re, im);
            if p.singular_distance(z) < 1e-8 || cuts.distance(z) < 1e-8 {
                skipped += 1;
                continue;
            }
            match ev.heunl(&p, z) {
                Ok(r) => {
                    let l = lambda(&r, z);
                    if !(l <= max_lambda) {
                        max_lambda = l;
                        worst = z;
                    }
                    sum += l;
                    count += 1;
                    max_terms = max_terms.max(r.n_terms);
                }
                Err(e) => {
                    failures += 1;
                    eprintln!("{}", Value::Object(error_record(z, &e)));
                }
            }
        }
    }
    let mean = if count > 0 { sum / count as f64 } else { 0.0 };
    let pass = failures == 0 && max_lambda <= tol;
    println!(
        "{}",
        json!({
            "max_lambda": number(max_lambda),
            "mean_lambda": number(mean),
            "max_nterms": max_terms,
            "worst_z": pair(worst),
            "evaluated": count,
            "skipped": skipped,
            "failed": failures,
            "tol": tol,
            "pass": pass,
        })
    );
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_SELFTEST)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = match Settings::new(cli.kappa, cli.max_terms) {
        Ok(s) => s,
        Err(e) => return usage(&e.to_string()),
    };
    let ev = Evaluator::new(settings);
    let kind = FunctionKind::from(cli.kind);
    let code = match &cli.command {
        Command::Eval { params, z } => cmd_eval(&ev, kind, params, *z),
        Command::Path { params, path, z } => cmd_path(&ev, kind, params, path.as_deref(), *z),
        Command::Grid {
            params,
            grid,
            out,
            reference,
        } => cmd_grid(&ev, kind, params, grid, out, *reference),
        Command::Selftest { tol, steps, extent } => cmd_selftest(settings, *tol, *steps, *extent),
    };
    let _ = io::stdout().flush();
    code
}
