//! Command-line front end: spectra, matching scans, index curves, the
//! field-free flux tube and the verification suites.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fluxtube::ab::{ab_zero_modes, index_ab, zero_modes_json, ZeroModeRegime};
use fluxtube::finite_tube::scan_roots;
use fluxtube::radial::{Channel, FluxConfig, Spin};
use fluxtube::spectrum::{enumerate_spectrum, index_singular};
use fluxtube::verify::run_suite;

#[derive(Parser)]
#[command(name = "fluxtube", version, about = "Spin-1/2 particle in a magnetic field with a singular flux tube")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// json or csv
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// write here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the R → 0 spectrum
    Spectrum {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
        e_max: f64,
        /// angular momentum range a..b
        #[arg(long = "m", default_value = "-4..4", value_parser = parse_m_range, allow_hyphen_values = true)]
        m: (i64, i64),
        #[command(flatten)]
        out: Output,
    },
    /// Roots of the finite-radius matching condition
    MatchScan {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        r_tube: f64,
        #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
        e_max: f64,
        #[arg(long, default_value_t = fluxtube::finite_tube::DEFAULT_SCAN_STEP, allow_hyphen_values = true)]
        step: f64,
        #[arg(long = "m", default_value = "-3..3", value_parser = parse_m_range, allow_hyphen_values = true)]
        m: (i64, i64),
        #[command(flatten)]
        out: Output,
    },
    /// Index curves I_s and I_AB over an alpha grid
    Indices {
        /// lo:hi:step
        #[arg(long, default_value = "-3:3:0.05", value_parser = parse_grid, allow_hyphen_values = true)]
        alpha_grid: AlphaGrid,
        #[command(flatten)]
        out: Output,
    },
    /// Zero modes of the field-free flux tube
    Ab {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true)]
        r_tube: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Run verification suites; exits 2 if any check fails
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn parse_m_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got '{s}'"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("bad lower bound '{a}': {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("bad upper bound '{b}': {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

#[derive(Clone)]
struct AlphaGrid(Vec<f64>);

fn decimals(s: &str) -> i32 {
    s.split_once('.').map_or(0, |(_, f)| f.len() as i32)
}

/// `lo:hi:step`, inclusive of `hi`; points are rounded to the decimals
/// written in the flags so that grid points like 0.5 come out exact.
fn parse_grid(s: &str) -> Result<AlphaGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo_s, hi_s, step_s] = parts[..] else {
        return Err(format!("expected lo:hi:step, got '{s}'"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad number '{x}': {e}"));
    let (lo, hi, step) = (num(lo_s)?, num(hi_s)?, num(step_s)?);
    if !(step > 0.0) || hi < lo {
        return Err(format!("need step > 0 and lo <= hi, got '{s}'"));
    }
    let scale = 10f64.powi(decimals(lo_s).max(decimals(step_s)));
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok(AlphaGrid((0..=n).map(|i| ((lo + step * i as f64) * scale).round() / scale).collect()))
}

fn emit(text: &str, path: &Option<PathBuf>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Serialize)]
struct RootRow {
    sigma: f64,
    m: i64,
    #[serde(rename = "E")]
    energy: f64,
    residual: f64,
}

#[derive(Serialize)]
struct IndexRow {
    alpha: f64,
    #[serde(rename = "I_s")]
    i_s: i64,
    #[serde(rename = "I_AB")]
    i_ab: i64,
}

#[derive(Serialize)]
struct ModeRow {
    sigma: f64,
    m: i64,
    m_plus_alpha: f64,
    regime: &'static str,
    nu: f64,
}

fn regime_name(r: ZeroModeRegime) -> &'static str {
    match r {
        ZeroModeRegime::Normalizable => "normalizable",
        ZeroModeRegime::LogNormalized => "log-normalized",
        ZeroModeRegime::NonNormalizable => "non-normalizable",
    }
}

/// Returns the process exit code: 0 ok, 2 verification failure.
fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Spectrum {
            alpha,
            kappa,
            e_max,
            m,
            out,
        } => {
            let t = enumerate_spectrum(alpha, kappa, e_max, m.0, m.1)?;
            let text = match out.format.unwrap_or(Format::Json) {
                Format::Json => t.to_json(),
                Format::Csv => t.to_csv(),
            };
            emit(&text, &out.output)?;
        }
        Command::MatchScan {
            alpha,
            r_tube,
            e_max,
            step,
            m,
            out,
        } => {
            let cfg = FluxConfig::landau(alpha, r_tube)?;
            if !(step > 0.0) || !(e_max > 0.0) {
                bail!("need step > 0 and e-max > 0");
            }
            let mut rows = Vec::new();
            for sigma in [Spin::Down, Spin::Up] {
                for mm in m.0..=m.1 {
                    for r in scan_roots(&cfg, Channel::new(sigma, mm), -0.25, e_max, step) {
                        rows.push(RootRow {
                            sigma: sigma.value(),
                            m: mm,
                            energy: r.energy,
                            residual: r.residual_at_root,
                        });
                    }
                }
            }
            let text = match out.format.unwrap_or(Format::Json) {
                Format::Json => serde_json::to_string_pretty(&serde_json::json!({
                    "alpha": alpha,
                    "r_tube": r_tube,
                    "roots": rows,
                }))?,
                Format::Csv => to_csv(&rows)?,
            };
            emit(&text, &out.output)?;
        }
        Command::Indices { alpha_grid, out } => {
            let rows: Vec<IndexRow> = alpha_grid
                .0
                .iter()
                .map(|&alpha| IndexRow {
                    alpha,
                    i_s: index_singular(alpha),
                    i_ab: index_ab(alpha),
                })
                .collect();
            let text = match out.format.unwrap_or(Format::Csv) {
                Format::Json => serde_json::to_string_pretty(&rows)?,
                Format::Csv => to_csv(&rows)?,
            };
            emit(&text, &out.output)?;
        }
        Command::Ab { alpha, r_tube, out } => {
            let text = match out.format.unwrap_or(Format::Json) {
                Format::Json => zero_modes_json(alpha, r_tube)?,
                Format::Csv => {
                    let rows: Vec<ModeRow> = ab_zero_modes(alpha, r_tube)?
                        .iter()
                        .map(|z| ModeRow {
                            sigma: z.channel.sigma.value(),
                            m: z.channel.m,
                            m_plus_alpha: z.channel.nu(alpha),
                            regime: regime_name(z.regime),
                            nu: z.nu,
                        })
                        .collect();
                    to_csv(&rows)?
                }
            };
            emit(&text, &out.output)?;
        }
        Command::Verify { suite, output } => {
            let report = run_suite(&suite)?;
            emit(&report.to_json(), &output)?;
            if !report.all_passed {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    eprintln!("FAILED {}: {} (tolerance {})", c.name, c.measured, c.tolerance);
                }
                return Ok(2);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
