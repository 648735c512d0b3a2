use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use hofwalk_core::asympt::{asymptotic_fit_check, growth_constants};
use hofwalk_core::cyclo::{parse_rational, Cyclotomic, CyclotomicField, FluxContext};
use hofwalk_core::error::Error as CoreError;
use hofwalk_core::hofstadter::{butterfly_export, trace_moment_numeric, write_butterfly_csv, DensityOfStates};
use hofwalk_core::moments::{
    dos_generating_identity_check, moments_by_series, moments_by_sum_formula, moments_table_by_dp, moments_table_by_sum_formula, MomentTable,
};
use hofwalk_core::spectrum::{band_poly_from_secular, band_poly_via_determinant, kreft_via_nested_sums, BandPolynomial};
use hofwalk_core::walks::{closed_zn_dp, enumerate_z};

#[derive(Parser, Debug)]
#[command(name = "hofwalk", version, about = "Algebraic-area walk counts and Hofstadter moments")]
struct Cli {
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Decimal digits used when evaluating exact values as floats.
    #[arg(long, global = true, default_value_t = 30)]
    precision: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Flux {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    q: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Z_n: weighted count of closed walks of length n.
    Zn {
        #[command(flatten)]
        flux: Flux,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = ZnRoute::Dp)]
        route: ZnRoute,
    },
    /// Table of Z_0 ..= Z_N.
    Moments {
        #[command(flatten)]
        flux: Flux,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = MomentRoute::Series)]
        route: MomentRoute,
    },
    /// Band polynomial b(z) and its Kreft coefficients.
    Band {
        #[command(flatten)]
        flux: Flux,
        #[arg(long, value_enum, default_value_t = BandRoute::Det)]
        route: BandRoute,
    },
    /// Growth constants of Z_n.
    Asympt {
        #[command(flatten)]
        flux: Flux,
        /// Also report the relative fit error up to this n.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Band edges for every flux with q <= qmax, as CSV.
    Butterfly {
        #[arg(long)]
        qmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density of states sampled on [-4, 4].
    Dos {
        #[command(flatten)]
        flux: Flux,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Check the resolvent against the moment series at this rational point.
        #[arg(long)]
        z0: Option<String>,
    },
    /// Compare every moment route for all fluxes and even n up to the bounds.
    Xcheck {
        #[arg(long)]
        qmax: u32,
        #[arg(long)]
        nmax: usize,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ZnRoute {
    Enum,
    Dp,
    Series,
    Sum,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MomentRoute {
    Series,
    Sum,
    Dp,
    All,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum BandRoute {
    Det,
    Kreft,
    Secular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Serialize)]
struct ExactValue {
    display: String,
    exact: Cyclotomic,
    float: f64,
}

fn exact_value(c: &Cyclotomic, precision: u32) -> ExactValue {
    ExactValue { display: c.to_string(), exact: c.clone(), float: c.to_complex(precision).re }
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ValueValidation, msg).exit()
}

fn flux_context(f: Flux) -> FluxContext {
    FluxContext::new(f.p, f.q).unwrap_or_else(|e| usage_error(e))
}

fn configure_threads() {
    if let Ok(v) = std::env::var("HOFWALK_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .unwrap_or_else(|| usage_error(format!("HOFWALK_THREADS must be a positive integer, got {v:?}")));
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
    }
}

struct Outcome {
    json: Value,
    text: String,
    csv: Option<String>,
    ok: bool,
}

impl Outcome {
    fn new(json: Value, text: String) -> Self {
        Outcome { json, text, csv: None, ok: true }
    }
}

fn zn(ctx: FluxContext, n: usize, route: ZnRoute, precision: u32) -> Result<Outcome> {
    if n % 2 == 1 {
        usage_error(format!("--n must be even, got {n}"));
    }
    let value = match route {
        ZnRoute::Dp => closed_zn_dp(n, ctx)?,
        ZnRoute::Series => moments_by_series(ctx, n)?.values()[n].clone(),
        ZnRoute::Sum if n == 0 => Cyclotomic::one(&CyclotomicField::new(ctx)),
        ZnRoute::Sum => moments_by_sum_formula(ctx, n)?,
        ZnRoute::Enum => {
            let field = CyclotomicField::new(ctx);
            let mut acc = Cyclotomic::zero(&field);
            for m in 0..=n / 2 {
                acc = acc + enumerate_z(m, m, n / 2 - m, n / 2 - m, ctx)?;
            }
            acc
        }
    };
    let route_name = format!("{route:?}").to_lowercase();
    let v = exact_value(&value, precision);
    let text = format!("Z_{n}({ctx}) = {} ≈ {}", v.display, v.float);
    let csv = format!("n,float,exact\n{n},{},{}\n", v.float, v.display);
    let json = json!({ "p": ctx.p(), "q": ctx.q(), "n": n, "route": route_name, "exact": v.exact, "display": v.display, "float": v.float });
    Ok(Outcome { csv: Some(csv), ..Outcome::new(json, text) })
}

fn table_rows(table: &MomentTable, precision: u32) -> Vec<(usize, ExactValue)> {
    (0..=table.max_n()).step_by(2).map(|n| (n, exact_value(&table.values()[n], precision))).collect()
}

fn moments(ctx: FluxContext, n: usize, route: MomentRoute, precision: u32) -> Result<Outcome> {
    let series = || moments_by_series(ctx, n);
    let table = match route {
        MomentRoute::Series => series()?,
        MomentRoute::Sum => moments_table_by_sum_formula(ctx, n)?,
        MomentRoute::Dp => moments_table_by_dp(ctx, n)?,
        MomentRoute::All => {
            let tables = [("series", series()?), ("sum", moments_table_by_sum_formula(ctx, n)?), ("dp", moments_table_by_dp(ctx, n)?)];
            let mut diffs = Vec::new();
            for k in (0..=n).step_by(2) {
                let reference = &tables[0].1.values()[k];
                for (name, t) in &tables[1..] {
                    if &t.values()[k] != reference {
                        diffs.push(json!({ "n": k, "series": reference.to_string(), *name: t.values()[k].to_string() }));
                    }
                }
            }
            if !diffs.is_empty() {
                let text = diffs.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n");
                let json = json!({ "p": ctx.p(), "q": ctx.q(), "route": "all", "mismatches": diffs });
                return Ok(Outcome { ok: false, ..Outcome::new(json, format!("route mismatch:\n{text}")) });
            }
            tables.into_iter().next().unwrap().1
        }
    };
    let route_name = format!("{route:?}").to_lowercase();
    let rows = table_rows(&table, precision);
    let text = rows.iter().map(|(k, v)| format!("Z_{k} = {} ≈ {}", v.display, v.float)).collect::<Vec<_>>().join("\n");
    let mut csv = String::from("n,float,exact\n");
    for (k, v) in &rows {
        csv.push_str(&format!("{k},{},{}\n", v.float, v.display));
    }
    let moments: Vec<Value> = rows
        .into_iter()
        .map(|(k, v)| json!({ "n": k, "route": route_name, "exact": v.exact, "display": v.display, "float": v.float }))
        .collect();
    let json = json!({ "p": ctx.p(), "q": ctx.q(), "route": route_name, "moments": moments });
    Ok(Outcome { csv: Some(csv), ..Outcome::new(json, text) })
}

fn band(ctx: FluxContext, route: BandRoute, precision: u32) -> Result<Outcome> {
    let b = match route {
        BandRoute::Det => band_poly_via_determinant(ctx)?,
        BandRoute::Kreft => BandPolynomial::from_kreft(ctx, &kreft_via_nested_sums(ctx))?,
        BandRoute::Secular => band_poly_from_secular(ctx)?,
    };
    let coeffs: Vec<ExactValue> = b.b().coeffs().iter().map(|c| exact_value(c, precision)).collect();
    let kreft: Vec<ExactValue> = b.kreft().iter().map(|c| exact_value(c, precision)).collect();
    let text = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.float != 0.0 || !c.exact.is_zero())
        .map(|(k, c)| format!("[z^{k}] {} ≈ {}", c.display, c.float))
        .collect::<Vec<_>>()
        .join("\n");
    let mut csv = String::from("power,float,exact\n");
    for (k, c) in coeffs.iter().enumerate() {
        csv.push_str(&format!("{k},{},{}\n", c.float, c.display));
    }
    let route_name = format!("{route:?}").to_lowercase();
    let json = json!({ "p": ctx.p(), "q": ctx.q(), "route": route_name, "b": coeffs, "kreft": kreft });
    Ok(Outcome { csv: Some(csv), ..Outcome::new(json, text) })
}

fn asympt(ctx: FluxContext, n: Option<usize>) -> Result<Outcome> {
    let gc = match growth_constants(ctx) {
        Err(CoreError::ComplexDominant(zs)) => {
            let zs: Vec<[f64; 2]> = zs.iter().map(|z| [z.re, z.im]).collect();
            let json = json!({ "p": ctx.p(), "q": ctx.q(), "error": "complex dominant singularities", "singularities": zs });
            return Ok(Outcome { ok: false, ..Outcome::new(json, format!("{ctx}: complex dominant singularities {zs:?}")) });
        }
        other => other?,
    };
    let singularities: Vec<[f64; 2]> = gc.singularities.iter().map(|z| [z.re, z.im]).collect();
    let mut text = format!("{ctx}: Z_n ~ (β/n) α^n with α = {}, β = {}, ρ = {}", gc.alpha, gc.beta, gc.rho);
    let mut json = json!({ "p": ctx.p(), "q": ctx.q(), "alpha": gc.alpha, "beta": gc.beta, "rho": gc.rho, "singularities": singularities });
    if let Some(n) = n {
        let fit = asymptotic_fit_check(&moments_by_series(ctx, n)?)?;
        for (k, err) in &fit {
            text.push_str(&format!("\nn = {k}: relative error {err:.3e}"));
        }
        json["fit"] = fit.iter().map(|(k, err)| json!({ "n": k, "relative_error": err })).collect();
    }
    Ok(Outcome::new(json, text))
}

fn butterfly(qmax: u32, out: Option<PathBuf>, format: Format) -> Result<Outcome> {
    if qmax == 0 {
        usage_error("--qmax must be at least 1");
    }
    let rows = butterfly_export(qmax);
    let mut buf = Vec::new();
    write_butterfly_csv(&rows, &mut buf)?;
    let csv = String::from_utf8(buf)?;
    let json = serde_json::to_value(&rows)?;
    match out {
        Some(path) => {
            let body = if format == Format::Json { serde_json::to_string_pretty(&json)? + "\n" } else { csv };
            std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
            let summary = json!({ "rows": rows.len(), "out": path.display().to_string() });
            Ok(Outcome { csv: None, ..Outcome::new(summary, format!("wrote {} rows to {}", rows.len(), path.display())) })
        }
        None => Ok(Outcome { csv: Some(csv.clone()), ..Outcome::new(json, csv.trim_end().to_string()) }),
    }
}

fn dos(ctx: FluxContext, grid: usize, z0: Option<String>) -> Result<Outcome> {
    if grid < 2 {
        usage_error("--grid must be at least 2");
    }
    let z0 = z0.map(|s| parse_rational(&s).unwrap_or_else(|e| usage_error(e)));
    let dos = DensityOfStates::new(ctx)?;
    let samples: Vec<(f64, f64)> = (0..grid)
        .map(|i| {
            let e = -4.0 + 8.0 * i as f64 / (grid - 1) as f64;
            (e, dos.density(e))
        })
        .collect();
    let norm = dos.normalization();
    let bands: Vec<[f64; 2]> = dos.bands().iter().map(|&(a, b)| [a, b]).collect();
    let mut csv = String::from("E,rho\n");
    for (e, r) in &samples {
        csv.push_str(&format!("{e},{r}\n"));
    }
    let mut json = json!({
        "p": ctx.p(),
        "q": ctx.q(),
        "normalization": norm,
        "bands": bands,
        "samples": samples.iter().map(|&(e, r)| json!({ "E": e, "rho": r })).collect::<Vec<_>>(),
    });
    let mut text = format!("{ctx}: {} band(s), ∫ρ = {norm}", bands.len());
    let mut ok = true;
    if let Some(z0) = z0 {
        let report = dos_generating_identity_check(ctx, &z0, 1e-6)?;
        ok = report.holds();
        text.push_str(&format!("\nresolvent at z0 = {z0}: quadrature {}, series {}, residual {:.3e}", report.lhs, report.rhs, report.residual));
        json["resolvent"] = serde_json::to_value(&report)?;
    }
    Ok(Outcome { csv: Some(csv), ok, ..Outcome::new(json, text) })
}

#[derive(Serialize)]
struct FluxCheck {
    p: u32,
    q: u32,
    mismatches: Vec<Value>,
    spectral_max_error: f64,
}

fn xcheck_flux(ctx: FluxContext, nmax: usize, grid: usize) -> Result<FluxCheck> {
    let series = moments_by_series(ctx, nmax)?;
    let sum = moments_table_by_sum_formula(ctx, nmax)?;
    let exact_floats = series.to_f64();
    let mut mismatches = Vec::new();
    let mut spectral_max_error: f64 = 0.0;
    for n in (2..=nmax).step_by(2) {
        let s = &series.values()[n];
        let dp = closed_zn_dp(n, ctx)?;
        for (route, v) in [("sum", &sum.values()[n]), ("dp", &dp)] {
            if v != s {
                mismatches.push(json!({ "n": n, "route": route, "series": s.to_string(), "value": v.to_string() }));
            }
        }
        let numeric = trace_moment_numeric(ctx, n as u32, grid);
        let err = (numeric - exact_floats[n]).abs() / exact_floats[n].abs().max(1.0);
        spectral_max_error = spectral_max_error.max(err);
        if err > 1e-6 {
            mismatches.push(json!({ "n": n, "route": "spectral", "series": exact_floats[n], "value": numeric }));
        }
    }
    Ok(FluxCheck { p: ctx.p(), q: ctx.q(), mismatches, spectral_max_error })
}

fn xcheck(qmax: u32, nmax: usize, grid: usize) -> Result<Outcome> {
    if qmax == 0 {
        usage_error("--qmax must be at least 1");
    }
    let results: Vec<FluxCheck> =
        FluxContext::all_up_to(qmax).into_par_iter().map(|ctx| xcheck_flux(ctx, nmax, grid)).collect::<Result<_>>()?;
    let failed: usize = results.iter().map(|r| r.mismatches.len()).sum();
    let mut text = String::new();
    for r in &results {
        let status = if r.mismatches.is_empty() { "ok" } else { "MISMATCH" };
        text.push_str(&format!("{}/{}: {status} (spectral error {:.2e})\n", r.p, r.q, r.spectral_max_error));
        for m in &r.mismatches {
            text.push_str(&format!("  {m}\n"));
        }
    }
    text.push_str(&format!("{} flux(es), {failed} mismatch(es)", results.len()));
    let json = json!({ "qmax": qmax, "nmax": nmax, "grid": grid, "mismatches": failed, "fluxes": results });
    Ok(Outcome { ok: failed == 0, ..Outcome::new(json, text) })
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads();
    let format = match (cli.json, cli.csv) {
        (true, _) => Format::Json,
        (_, true) => Format::Csv,
        _ => Format::Text,
    };
    let precision = cli.precision;
    let outcome = match cli.command {
        Command::Zn { flux, n, route } => zn(flux_context(flux), n, route, precision)?,
        Command::Moments { flux, n, route } => moments(flux_context(flux), n, route, precision)?,
        Command::Band { flux, route } => band(flux_context(flux), route, precision)?,
        Command::Asympt { flux, n } => asympt(flux_context(flux), n)?,
        Command::Butterfly { qmax, out } => butterfly(qmax, out, format)?,
        Command::Dos { flux, grid, z0 } => dos(flux_context(flux), grid, z0)?,
        Command::Xcheck { qmax, nmax, grid } => xcheck(qmax, nmax, grid)?,
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&outcome.json)?)?,
        Format::Csv => match &outcome.csv {
            Some(csv) => write!(out, "{csv}")?,
            None => writeln!(out, "{}", outcome.text)?,
        },
        Format::Text => writeln!(out, "{}", outcome.text)?,
    }
    out.flush()?;
    Ok(outcome.ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
