//! `theta-morse`: period matrices, curvature grids and Morse censuses of the
//! Theta metric on hyperelliptic curves.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use theta_morse::io::{census_json, fmt6, fmt6_complex, periods_json, read_curve_file, read_cycles_file};
use theta_morse::metric::{grid_samples, write_grid_csv, Window};
use theta_morse::morse::{census, gauss_bonnet, IntegrationConfig};
use theta_morse::periods::{build_cycle_basis, manual_cycles, period_matrix_from_cycles, validate_riemann};
use theta_morse::verify::{all_passed, format_table, run_verification, VerifyOptions};
use theta_morse::{build_metric, Chart, CurveSpec, Error, MorseCensus, PeriodData, QuadratureConfig, SearchOptions};

#[derive(Parser, Debug)]
#[command(
    name = "theta-morse",
    version,
    about = "Curvature of the Theta metric on hyperelliptic curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Curve file: {"branch_points": [[re, im], ...]}.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file (standard output if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Relative convergence tolerance for the period quadrature.
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    /// Manual cycle file replacing the automatic homology basis.
    #[arg(long, global = true)]
    cycles: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalized period matrix, B-matrix and Riemann relation residuals.
    Periods,
    /// CSV grid of K and rho^2 over a window of one chart.
    Grid {
        /// Samples per side.
        #[arg(long, default_value_t = 200)]
        grid_size: usize,
        /// Rectangle x0,x1,y0,y1 in the chart coordinate.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
        window: Option<Window>,
        #[arg(long, value_enum, default_value_t = ChartArg::Affine)]
        chart: ChartArg,
    },
    /// Critical points of K with Morse indices and the Euler check.
    Critical {
        /// Seeds per side of the Newton seed grid in each chart.
        #[arg(long)]
        seed_density: Option<usize>,
    },
    /// Runs every self-check and prints a pass/fail table.
    Verify {
        #[arg(long)]
        seed_density: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ChartArg {
    Affine,
    Infinity,
}

fn parse_window(s: &str) -> Result<Window, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.len() != 4 {
        return Err(format!("expected x0,x1,y0,y1, got {} values", v.len()));
    }
    let w = Window {
        x0: v[0],
        x1: v[1],
        y0: v[2],
        y1: v[3],
    };
    w.validate().map_err(|e| e.to_string())?;
    Ok(w)
}

const EXIT_INPUT: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        _ if e.is_input_error() => EXIT_INPUT,
        Error::NormalizationFailed(_)
        | Error::NoValidSignPattern { .. }
        | Error::NotPositiveDefinite { .. }
        | Error::HermiticityViolation { .. }
        | Error::FlatMetric { .. }
        | Error::CensusInconsistent { .. }
        | Error::HypothesesNotMet(_) => EXIT_VALIDATION,
        _ => EXIT_NUMERICAL,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if let Some(te) = e.downcast_ref::<Error>() {
                eprintln!("error: {}: {te}", te.code());
                ExitCode::from(exit_code(te))
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_INPUT)
            }
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    let c = &cli.common;
    let Some(input) = &c.input else {
        bail!("--input <path> is required");
    };
    let curve = read_curve_file(input)?;
    let mut quad = QuadratureConfig::default();
    if let Some(t) = c.quad_tol {
        quad.tolerance = t;
    }
    quad.validate()?;

    let format = c.format;
    let (text, code) = match &cli.command {
        Command::Periods => cmd_periods(
            &curve,
            &quad,
            c,
            expect_format(format, Format::Text, &[Format::Text, Format::Json])?,
        )?,
        Command::Grid {
            grid_size,
            window,
            chart,
        } => {
            expect_format(format, Format::Csv, &[Format::Csv])?;
            let data = periods(&curve, &quad, c)?;
            let metric = build_metric(&data)?;
            let chart = match chart {
                ChartArg::Affine => Chart::Affine,
                ChartArg::Infinity => Chart::Infinity,
            };
            let samples = grid_samples(&metric, chart, window.unwrap_or_default(), *grid_size)?;
            let mut buf = Vec::new();
            write_grid_csv(&samples, &mut buf)?;
            (String::from_utf8(buf).context("grid output is UTF-8")?, 0)
        }
        Command::Critical { seed_density } => {
            let fmt = expect_format(format, Format::Json, &[Format::Json, Format::Text])?;
            cmd_critical(&curve, &quad, c, search_options(*seed_density)?, fmt)?
        }
        Command::Verify { seed_density } => {
            let fmt = expect_format(format, Format::Text, &[Format::Text])?;
            debug_assert_eq!(fmt, Format::Text);
            if c.cycles.is_some() {
                bail!("verify always uses the automatic cycle basis; drop --cycles");
            }
            let opts = VerifyOptions {
                quadrature: quad,
                search: search_options(*seed_density)?,
                ..VerifyOptions::default()
            };
            let rows = run_verification(&curve, &opts)?;
            let code = if all_passed(&rows) { 0 } else { EXIT_VALIDATION };
            (format_table(&rows), code)
        }
    };
    emit(c, &text)?;
    Ok(code)
}

fn expect_format(given: Option<Format>, default: Format, allowed: &[Format]) -> anyhow::Result<Format> {
    let f = given.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(Error::InvalidConfig(format!("format {f:?} is not available for this command")).into());
    }
    Ok(f)
}

fn search_options(seed_density: Option<usize>) -> anyhow::Result<SearchOptions> {
    let mut o = SearchOptions::default();
    if let Some(n) = seed_density {
        o.seed_density = n;
    }
    o.validate()?;
    Ok(o)
}

fn periods(curve: &CurveSpec, quad: &QuadratureConfig, c: &Common) -> anyhow::Result<PeriodData> {
    let cycles = match &c.cycles {
        Some(path) => manual_cycles(curve, &read_cycles_file(path)?)?,
        None => build_cycle_basis(curve, quad)?,
    };
    Ok(period_matrix_from_cycles(curve, cycles, quad)?)
}

fn emit(c: &Common, text: &str) -> anyhow::Result<()> {
    match &c.out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(f);
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn cmd_periods(curve: &CurveSpec, quad: &QuadratureConfig, c: &Common, fmt: Format) -> anyhow::Result<(String, u8)> {
    let data = periods(curve, quad, c)?;
    let metric = build_metric(&data)?;
    let report = validate_riemann(&data, quad.symmetry_tolerance);
    let code = if report.passed { 0 } else { EXIT_VALIDATION };
    if fmt == Format::Json {
        return Ok((periods_json(&data, metric.b(), &report), code));
    }
    let g = data.genus();
    let mut s = String::new();
    if let Some(l) = curve.label() {
        s.push_str(&format!("curve: {l}\n"));
    }
    s.push_str(&format!("genus: {g}\n"));
    s.push_str("branch points:\n");
    for (i, a) in curve.branch_points().iter().enumerate() {
        s.push_str(&format!("  {:>2}  {}\n", i + 1, fmt6_complex(*a)));
    }
    matrix_block(&mut s, "period matrix Z", |i, j| data.z[(i, j)], g);
    let eig = data.z.im().symmetric_eigenvalues();
    s.push_str(&format!(
        "eigenvalues of Im Z: {}\n",
        eig.iter().map(|e| fmt6(*e)).collect::<Vec<_>>().join(", ")
    ));
    let b = metric.b();
    matrix_block(&mut s, "B matrix", |i, j| b[(i, j)], g);
    s.push_str(&format!("B-cycle signs: {:?}\n", data.sign_pattern));
    s.push_str(&format!(
        "Riemann relations: {} ({})\n",
        if report.passed { "pass" } else { "FAIL" },
        report.summary()
    ));
    Ok((s, code))
}

fn matrix_block(s: &mut String, title: &str, entry: impl Fn(usize, usize) -> theta_morse::Complex64, g: usize) {
    s.push_str(&format!("{title}:\n"));
    for i in 0..g {
        let row: Vec<String> = (0..g).map(|j| format!("{:>28}", fmt6_complex(entry(i, j)))).collect();
        s.push_str(&format!("  {}\n", row.join(" ")));
    }
}

fn cmd_critical(
    curve: &CurveSpec,
    quad: &QuadratureConfig,
    c: &Common,
    opts: SearchOptions,
    fmt: Format,
) -> anyhow::Result<(String, u8)> {
    let data = periods(curve, quad, c)?;
    let metric = build_metric(&data)?;
    let cs: MorseCensus = census(&metric, &opts)?;
    let gb = gauss_bonnet(&metric, &IntegrationConfig::default())?;
    for w in &cs.warnings {
        eprintln!("warning: {w}");
    }
    let code = if cs.is_morse_function && cs.euler_lhs == cs.euler_rhs {
        0
    } else {
        EXIT_VALIDATION
    };
    if fmt == Format::Json {
        return Ok((census_json(&cs, Some(&gb)), code));
    }
    let mut s = format!(
        "{:<9} {:>28} {:>13} {:>6} {:>5} {:>11}\n",
        "chart", "coordinate", "K", "index", "lifts", "residual"
    );
    for p in &cs.critical_points {
        s.push_str(&format!(
            "{:<9} {:>28} {:>13} {:>6} {:>5} {:>11}\n",
            p.location.chart.as_str(),
            fmt6_complex(p.location.u),
            fmt6(p.k_value),
            p.index.to_string(),
            p.multiplicity(),
            fmt6(p.residual)
        ));
    }
    s.push_str(&format!(
        "I0 = {}, I1 = {}, I2 = {}, degenerate = {}\n",
        cs.i0, cs.i1, cs.i2, cs.degenerate_count
    ));
    s.push_str(&format!("I0 - I1 + I2 = {}, 2 - 2g = {}\n", cs.euler_lhs, cs.euler_rhs));
    s.push_str(&format!(
        "Morse function: {}\n",
        if cs.is_morse_function { "yes" } else { "no" }
    ));
    s.push_str(&format!(
        "Gauss-Bonnet: integral {}, expected {}\n",
        fmt6(gb.integral),
        fmt6(gb.expected)
    ));
    Ok((s, code))
}
