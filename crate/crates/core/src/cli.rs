//! Command-line front end: one subcommand per verification workflow.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
//! domain and I/O errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::asymptotics::decay_scan;
use crate::curvature::{
    extremal_check, legendre_roundtrip, scalar_curvature_abreu, scalar_curvature_reduced, LEGENDRE_HESSIAN_TOL,
    LEGENDRE_IDENTITY_TOL,
};
use crate::error::{Error, Result};
use crate::polytope::PolytopeKind;
use crate::potentials::{admissibility, RadialKahlerPotential, TFamilyPotential, TPotential, TPotentialLabel};
use crate::report::{emit, number, Check, Format, RunReport, Table};
use crate::scalarflat::{
    burns_simanca_potential, delta_check, rational, scalar_flat_family, solve_boundary_coefficients,
    RationalPolynomial,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "toric-kahler", version, about = "Verify U(n)-invariant Kähler metrics in symplectic coordinates")]
struct Cli {
    /// Seed for every random sample drawn by a workflow.
    #[arg(long, global = true, default_value = "0", value_parser = parse_seed)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scalar curvature of a t-potential at given t values.
    Curvature(CurvatureArgs),
    /// Closed-form curvature of the catalog over a range of dimensions.
    VerifyCatalog(CatalogArgs),
    /// Boundary matching of the scalar-flat family on a polytope.
    Derive(DeriveArgs),
    /// Legendre duality between radial Kähler potentials and t-potentials.
    Legendre(LegendreArgs),
    /// Decay of the Burns–Simanca metric towards the flat metric.
    Decay(DecayArgs),
    /// Sampled check of F''(t) > -1/t.
    Admissible(AdmissibleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Reduced,
    Abreu,
    Both,
}

#[derive(Debug, Args)]
struct CurvatureArgs {
    /// flat, fubini_study, generalized_burns, burns_simanca or family:A:B.
    #[arg(long)]
    potential: String,
    #[arg(long, value_parser = parse_count)]
    dim: usize,
    /// Comma-separated t values.
    #[arg(long = "t", value_delimiter = ',', required = true, allow_negative_numbers = true, value_parser = parse_real)]
    t: Vec<f64>,
    #[arg(long, value_enum, default_value = "reduced")]
    method: Method,
    /// Defaults to 1e-9 for the jet path and 1e-4 for finite differences.
    #[arg(long, value_parser = parse_real)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct CatalogArgs {
    /// Inclusive range `a..b`.
    #[arg(long, default_value = "1..5", value_parser = parse_dims)]
    dims: (usize, usize),
    #[arg(long, default_value = "1e-9", value_parser = parse_real)]
    tol: f64,
    /// Random Fubini–Study sample points per dimension.
    #[arg(long, default_value = "20", value_parser = parse_count)]
    samples: usize,
}

#[derive(Debug, Args)]
struct DeriveArgs {
    #[arg(long, default_value = "blowup")]
    polytope: String,
    #[arg(long, value_parser = parse_count)]
    dim: usize,
}

#[derive(Debug, Args)]
struct LegendreArgs {
    /// flat or fubini_study.
    #[arg(long, default_value = "fubini_study")]
    potential: String,
    #[arg(long, default_value = "2", value_parser = parse_count)]
    dim: usize,
    #[arg(long, default_value = "50", value_parser = parse_count)]
    points: usize,
}

#[derive(Debug, Args)]
struct DecayArgs {
    #[arg(long, value_parser = parse_count)]
    dim: usize,
    #[arg(long, default_value = "1e2", value_parser = parse_real)]
    u_min: f64,
    #[arg(long, default_value = "1e6", value_parser = parse_real)]
    u_max: f64,
    #[arg(long, default_value = "32", value_parser = parse_count)]
    samples: usize,
    /// Allowed distance of the fitted slope from 1 - n.
    #[arg(long, default_value = "0.1", value_parser = parse_real)]
    slope_tol: f64,
}

#[derive(Debug, Args)]
struct AdmissibleArgs {
    #[arg(long)]
    potential: String,
    /// Needed by burns_simanca and family potentials.
    #[arg(long, default_value = "2", value_parser = parse_count)]
    dim: usize,
    #[arg(long, allow_negative_numbers = true, value_parser = parse_real)]
    t_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true, value_parser = parse_real)]
    t_max: Option<f64>,
    #[arg(long, default_value = "100", value_parser = parse_count)]
    samples: usize,
}

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// Non-negative integer, also written as `1e3`.
fn parse_count(s: &str) -> std::result::Result<usize, String> {
    let v = parse_real(s)?;
    if v < 0.0 || v.fract() != 0.0 || v > 9.007_199_254_740_992e15 {
        return Err(format!("`{s}` is not a non-negative integer"));
    }
    Ok(v as usize)
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    s.trim()
        .parse::<u64>()
        .or_else(|_| parse_count(s).map(|v| v as u64))
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("`{s}` is not a range a..b"))?;
    let (a, b) = (parse_count(a)?, parse_count(b)?);
    if a > b {
        return Err(format!("empty range `{s}`"));
    }
    Ok((a, b))
}

/// Resolves a t-potential name in dimension `n`.
pub fn resolve_potential(name: &str, n: usize) -> Result<TPotential> {
    match name {
        "flat" => Ok(TPotential::flat()),
        "fubini_study" => Ok(TPotential::fubini_study()),
        "generalized_burns" => Ok(TPotential::generalized_burns()),
        "burns_simanca" => burns_simanca_potential(n),
        _ => {
            let parts: Vec<&str> = name.split(':').collect();
            match parts.as_slice() {
                ["family", a, b] => {
                    let a = parse_real(a).map_err(Error::Domain)?;
                    let b = parse_real(b).map_err(Error::Domain)?;
                    scalar_flat_family(n, a, b)
                }
                _ => Err(Error::Domain(format!("unknown potential `{name}`"))),
            }
        }
    }
}

fn resolve_radial(name: &str) -> Result<RadialKahlerPotential> {
    match name {
        "flat" => Ok(RadialKahlerPotential::flat()),
        "fubini_study" => Ok(RadialKahlerPotential::fubini_study()),
        other => Err(Error::Domain(format!("unknown radial potential `{other}`"))),
    }
}

/// Closed-form scalar curvature of the catalog, where known.
pub fn expected_curvature(label: &TPotentialLabel, n: usize, t: f64) -> Option<f64> {
    let n = n as f64;
    match label {
        TPotentialLabel::Flat | TPotentialLabel::BurnsSimanca { .. } | TPotentialLabel::ScalarFlatFamily { .. } => {
            Some(0.0)
        }
        TPotentialLabel::FubiniStudy => Some(n * (n + 1.0)),
        TPotentialLabel::GeneralizedBurns => Some((n - 1.0) * (n - 2.0) / (t * t)),
        TPotentialLabel::Custom(_) => None,
    }
}

/// Parses `args` (program name first), runs the workflow and writes the report.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    let report = match dispatch(&cli, stderr) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_ERROR;
        }
    };
    if let Err(e) = emit(&report, cli.format, cli.output.as_deref(), stdout) {
        let _ = writeln!(stderr, "error: cannot write report: {e}");
        return EXIT_ERROR;
    }
    if report.passed() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn dispatch(cli: &Cli, stderr: &mut dyn Write) -> Result<RunReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut report = match &cli.command {
        Command::Curvature(a) => curvature(a)?,
        Command::VerifyCatalog(a) => verify_catalog(a, &mut rng)?,
        Command::Derive(a) => derive(a)?,
        Command::Legendre(a) => legendre(a, &mut rng)?,
        Command::Decay(a) => {
            let r = decay(a)?;
            if cli.format == Format::Csv {
                if let Some(Value::Number(slope)) = r.results.first().map(|c| &c.measured) {
                    let _ = writeln!(stderr, "fitted_slope={slope}");
                }
            }
            r
        }
        Command::Admissible(a) => admissible(a)?,
    };
    report.input("seed", cli.seed);
    Ok(report)
}

fn curvature(args: &CurvatureArgs) -> Result<RunReport> {
    let n = args.dim;
    let pot = resolve_potential(&args.potential, n)?;
    let mut report = RunReport::new("curvature");
    report
        .input("potential", args.potential.as_str())
        .input("dim", n)
        .input("t", args.t.clone())
        .input("method", format!("{:?}", args.method).to_lowercase());
    let family = TFamilyPotential {
        potential: pot.clone(),
        n,
    };
    for &t in &args.t {
        let expected = expected_curvature(pot.label(), n, t);
        let mut record = |name: String, s: f64, tol: f64| {
            let check = match expected {
                Some(e) => Check::close(name, s, e, tol),
                None => Check::flag(name, s.is_finite(), number(s)),
            };
            report.push(check);
        };
        if matches!(args.method, Method::Reduced | Method::Both) {
            let s = scalar_curvature_reduced(&pot, n, t)?;
            record(format!("S_reduced(t={t})"), s, args.tol.unwrap_or(1e-9));
        }
        if matches!(args.method, Method::Abreu | Method::Both) {
            let x = vec![t / n as f64; n];
            let s = scalar_curvature_abreu(&family, &x)?;
            record(format!("S_abreu(t={t})"), s, args.tol.unwrap_or(1e-4));
        }
    }
    Ok(report)
}

fn verify_catalog(args: &CatalogArgs, rng: &mut ChaCha8Rng) -> Result<RunReport> {
    let (lo, hi) = args.dims;
    if lo < 1 {
        return Err(Error::InvalidDimension(lo));
    }
    let tol = args.tol;
    let mut report = RunReport::new("verify-catalog");
    report
        .input("dims", format!("{lo}..{hi}"))
        .input("tol", tol)
        .input("samples", args.samples);
    let fs = TPotential::fubini_study();
    let gb = TPotential::generalized_burns();
    let flat = TPotential::flat();
    let gb_ts = [1.5, 2.0, 5.0, 10.0];
    let bs_ts = [1.01, 1.1, 2.0, 10.0, 100.0];
    for n in lo..=hi {
        let nf = n as f64;
        let fs_ts: Vec<f64> = (0..args.samples).map(|_| rng.gen_range(0.01..0.99)).collect();
        for &t in &fs_ts {
            let s = scalar_curvature_reduced(&fs, n, t)?;
            report.push(Check::close(format!("fubini_study n={n} S(t={t:.6})"), s, nf * (nf + 1.0), tol));
        }
        if !fs_ts.is_empty() {
            let ext = extremal_check(&fs, n, &fs_ts)?;
            report.push(Check::flag(
                format!("fubini_study n={n} extremal"),
                ext.extremal,
                number(ext.max_residual),
            ));
        }
        let gb_value = (nf - 1.0) * (nf - 2.0);
        let mut gb_max = 0.0f64;
        for &t in &gb_ts {
            let s = scalar_curvature_reduced(&gb, n, t)?;
            gb_max = gb_max.max(s.abs());
            report.push(Check::close(format!("generalized_burns n={n} S·t²(t={t})"), s * t * t, gb_value, tol));
        }
        // Scalar-flat exactly in dimensions 1 and 2.
        report.push(Check::exact(
            format!("generalized_burns n={n} scalar-flat"),
            Value::from(gb_max <= tol),
            Value::from(n <= 2),
        ));
        let s = scalar_curvature_reduced(&flat, n, 3.0)?;
        report.push(Check::close(format!("flat n={n} S(t=3)"), s, 0.0, tol));
        if n >= 2 {
            let bs = burns_simanca_potential(n)?;
            for &t in &bs_ts {
                let s = scalar_curvature_reduced(&bs, n, t)?;
                report.push(Check::close(format!("burns_simanca n={n} S(t={t})"), s, 0.0, tol));
            }
        }
    }
    Ok(report)
}

/// `Σ_{i=1}^{n-1} tⁱ - (n - 2)`.
fn expected_quotient(n: usize) -> RationalPolynomial {
    let mut coeffs = vec![rational(1); n];
    coeffs[0] = rational(2 - n as i64);
    RationalPolynomial::new(coeffs)
}

fn descending(q: &RationalPolynomial) -> Vec<String> {
    let mut c = q.coeff_strings();
    c.reverse();
    c
}

fn derive(args: &DeriveArgs) -> Result<RunReport> {
    let kind: PolytopeKind = args.polytope.parse()?;
    if kind != PolytopeKind::Blowup {
        return Err(Error::Domain(format!(
            "boundary matching is defined for the blowup polytope, not `{}`",
            args.polytope
        )));
    }
    let n = args.dim;
    let m = solve_boundary_coefficients(n)?;
    let mut report = RunReport::new("derive");
    report.input("polytope", args.polytope.as_str()).input("dim", n);
    let ni = n as i64;
    report.push(Check::exact("A", Value::from(m.a.to_string()), Value::from((ni - 1).to_string())));
    report.push(Check::exact("B", Value::from(m.b.to_string()), Value::from((2 - ni).to_string())));
    report.push(Check::exact(
        "Q coefficients (descending)",
        Value::from(descending(&m.quotient)),
        Value::from(descending(&expected_quotient(n))),
    ));
    report.push(Check::exact("Q", Value::from(m.quotient.to_string()), Value::from(expected_quotient(n).to_string())));
    report.push(Check::exact("remainder", Value::from(m.remainder.to_string()), Value::from("0")));
    let q1 = m.quotient.eval(&rational(1));
    report.push(Check::exact("Q(1)", Value::from(q1.to_string()), Value::from("1")));
    report.push(Check::flag(
        "Q > 0 on [1, ∞)",
        m.quotient_positive_on_ray(),
        Value::from(m.quotient.to_string()),
    ));
    let dc = delta_check(&m, &[1.0, 1.5, 2.0, 5.0, 10.0, 100.0])?;
    report.push(Check::flag("δ > 0", dc.min_delta > 0.0, number(dc.min_delta)));
    report.push(Check::at_most(
        "det G⁻¹ = δ Π l_i (relative)",
        dc.max_relative_error,
        crate::scalarflat::FACTORIZATION_TOL,
    ));
    report.push(Check::flag("δ check", dc.passed, Value::Null));
    Ok(report)
}

fn legendre(args: &LegendreArgs, rng: &mut ChaCha8Rng) -> Result<RunReport> {
    let f = resolve_radial(&args.potential)?;
    if args.dim < 1 {
        return Err(Error::InvalidDimension(0));
    }
    let mut report = RunReport::new("legendre");
    report
        .input("potential", args.potential.as_str())
        .input("dim", args.dim)
        .input("points", args.points);
    let mut identity = 0.0f64;
    let mut hessian = 0.0f64;
    let mut x_err = 0.0f64;
    for _ in 0..args.points {
        let a: Vec<f64> = (0..args.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = legendre_roundtrip(&f, &a)?;
        identity = identity.max(r.identity_residual.abs());
        hessian = hessian.max(r.hessian_max_error);
        x_err = x_err.max(r.max_x_error);
    }
    report.push(Check::at_most("max |f + g - Σ a_i x_i|", identity, LEGENDRE_IDENTITY_TOL));
    report.push(Check::at_most("max |Hess_a f - G⁻¹|", hessian, LEGENDRE_HESSIAN_TOL));
    report.push(Check::at_most("max |x - 2e^{2a}f'(s)|", x_err, LEGENDRE_HESSIAN_TOL));
    Ok(report)
}

fn decay(args: &DecayArgs) -> Result<RunReport> {
    let r = decay_scan(args.dim, args.u_min, args.u_max, args.samples)?;
    let mut report = RunReport::new("decay");
    report
        .input("dim", args.dim)
        .input("u_min", args.u_min)
        .input("u_max", args.u_max)
        .input("samples", args.samples);
    report.push(Check::close("fitted_slope", r.fitted_slope, r.expected_slope, args.slope_tol));
    let monotone = r.samples.windows(2).all(|w| w[1].deviation < w[0].deviation);
    report.push(Check::flag("deviation decreasing in u", monotone, Value::from(r.samples.len())));
    report.input("fitted_samples", r.fitted_samples);
    report.table = Some(Table {
        header: vec!["u".into(), "deviation".into()],
        rows: r.samples.iter().map(|s| vec![s.u, s.deviation]).collect(),
    });
    Ok(report)
}

fn admissible(args: &AdmissibleArgs) -> Result<RunReport> {
    let pot = resolve_potential(&args.potential, args.dim)?;
    let domain = pot.domain();
    let lo = args.t_min.unwrap_or(if domain.lo > 0.0 { domain.lo + 1e-3 } else { 1e-3 });
    let hi = args.t_max.unwrap_or(if domain.hi.is_finite() { domain.hi - 1e-3 } else { 100.0 });
    if !(lo < hi) || !domain.contains_with_margin(lo, 0.0) || !domain.contains_with_margin(hi, 0.0) {
        return Err(Error::Domain(format!(
            "range [{lo}, {hi}] is not inside ({}, {})",
            domain.lo, domain.hi
        )));
    }
    let mut report = RunReport::new("admissible");
    report
        .input("potential", args.potential.as_str())
        .input("dim", args.dim)
        .input("t_min", lo)
        .input("t_max", hi)
        .input("samples", args.samples);
    let a = admissibility(&pot, (lo, hi), args.samples)?;
    let witness = a.witness.map(number).unwrap_or(Value::Null);
    report.push(Check::flag("F'' + 1/t > 0", a.passed, witness));
    report.push(Check::flag("min F'' + 1/t", a.min_margin > 0.0, number(a.min_margin)));
    Ok(report)
}
