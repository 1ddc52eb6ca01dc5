use std::io::Write;
use std::path::PathBuf;

use rtgrowth::analysis::{sweep_theta_with, write_sweep_csv, SweepReport};
use rtgrowth::fixedpoint::{solve_lambda_with, write_growth_json};
use rtgrowth::oracle::{dispersion_curve, write_dispersion_csv, DispersionPoint};
use rtgrowth::spectrum::{
    alpha_curve_with, enumerate_modes, fmt_num, smallest_magnitude, write_alpha_curve_csv,
    AlphaCurve, Branch,
};
use rtgrowth::{CutoffPolicy, Discretization, FluidConfig};
use serde::Serialize;

use crate::{open_out, verify, Cli, Command, Failure, Format};

/// Relative disagreement above which a mode is flagged in `oracle-compare`.
pub const ORACLE_FLAG_TOL: f64 = 5e-5;

pub fn dispatch(cli: &Cli, cfg: &FluidConfig, format: Format) -> Result<(), Failure> {
    let disc = Discretization::new(cli.resolution as usize)?;
    let policy = cli.kmax.map(CutoffPolicy::Fixed).unwrap_or_default();
    let mut out = open_out(cli.out.as_deref())?;
    match cli.command {
        Command::Growth => {
            let r = solve_lambda_with(cfg, disc, cli.tol, policy)?;
            match format {
                Format::Json => write_growth_json(&r, &mut out)?,
                Format::Csv => {
                    let s = r.summary();
                    writeln!(
                        out,
                        "lambda,argmax_k,fixed_point_residual,bound_m,theta,resolution,bracket_steps,branch"
                    )?;
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        fmt_num(s.lambda),
                        fmt_num(s.argmax_k),
                        fmt_num(s.fixed_point_residual),
                        fmt_num(s.bound_m),
                        fmt_num(s.theta),
                        s.resolution,
                        s.bracket_steps,
                        s.branch.as_str()
                    )?;
                }
            }
        }
        Command::AlphaCurve => {
            let curve = alpha_curve_with(cfg, &cli.s_grid, disc, policy)?;
            match format {
                Format::Csv => write_alpha_curve_csv(&curve, &mut out)?,
                Format::Json => write_json(&mut out, &CurveJson::from(&curve))?,
            }
        }
        Command::DispersionCurve => {
            let ks = k_grid(cli, cfg)?;
            let rows = dispersion_curve(cfg, &ks, disc, cli.tol, false)?;
            match format {
                Format::Csv => write_dispersion_csv(&rows, &mut out)?,
                Format::Json => write_json(&mut out, &rows)?,
            }
        }
        Command::OracleCompare => {
            let ks = k_grid(cli, cfg)?;
            let rows = dispersion_curve(cfg, &ks, disc, cli.tol, true)?;
            match format {
                Format::Csv => write_compare_csv(&rows, &mut out)?,
                Format::Json => write_json(&mut out, &rows)?,
            }
        }
        Command::SweepTheta => {
            let sweep = sweep_theta_with(cfg, &cli.theta_grid, disc, cli.tol, policy)?;
            let report = SweepReport::new(&sweep, cfg)?;
            match format {
                Format::Csv => write_sweep_csv(&sweep, &mut out)?,
                Format::Json => write_json(&mut out, &sweep)?,
            }
            match report_path(cli) {
                Some(p) => write_json(&mut open_out(Some(&p))?, &report)?,
                None => write_json(&mut std::io::stderr(), &report)?,
            }
        }
        Command::Verify => {
            let checks = verify::run_suite(cfg, disc, cli.tol, &cli.s_grid)?;
            for c in &checks {
                eprintln!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            match format {
                Format::Json => write_json(&mut out, &checks)?,
                Format::Csv => {
                    writeln!(out, "check,pass")?;
                    for c in &checks {
                        writeln!(out, "{},{}", c.name, c.pass)?;
                    }
                }
            }
            out.flush()?;
            let failed = checks.iter().filter(|c| !c.pass).count();
            if failed > 0 {
                return Err(Failure::Checks(failed));
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// `<out>.report.json` next to the sweep output.
pub fn report_path(cli: &Cli) -> Option<PathBuf> {
    cli.out.as_ref().map(|p| {
        let mut s = p.clone().into_os_string();
        s.push(".report.json");
        PathBuf::from(s)
    })
}

fn k_grid(cli: &Cli, cfg: &FluidConfig) -> Result<Vec<f64>, Failure> {
    match &cli.k_grid {
        Some(ks) => {
            if let Some(k) = ks.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
                return Err(Failure::Usage(format!("wave numbers must be positive, got {k}")));
            }
            Ok(ks.clone())
        }
        None => Ok(enumerate_modes(cfg, 5.0 * smallest_magnitude(cfg))?.magnitudes()),
    }
}

fn write_json<W: Write + ?Sized, T: Serialize + ?Sized>(out: &mut W, v: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct CurvePoint {
    s: f64,
    alpha: f64,
    argmax_k: f64,
    branch: Branch,
}

#[derive(Serialize)]
struct CurveJson {
    k_max: f64,
    zero_bracket: Option<(f64, f64)>,
    samples: Vec<CurvePoint>,
}

impl From<&AlphaCurve> for CurveJson {
    fn from(c: &AlphaCurve) -> Self {
        CurveJson {
            k_max: c.k_max,
            zero_bracket: c.zero_bracket,
            samples: c
                .samples
                .iter()
                .map(|v| CurvePoint {
                    s: v.s,
                    alpha: v.alpha,
                    argmax_k: v.argmax_k,
                    branch: v.branch,
                })
                .collect(),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

fn write_compare_csv<W: Write + ?Sized>(rows: &[DispersionPoint], out: &mut W) -> Result<(), Failure> {
    writeln!(
        out,
        "k,lambda_oracle,lambda_variational,rel_diff,lambda_extrapolated,rel_diff_extrapolated,flagged"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_num(r.k),
            opt(r.lambda_oracle),
            opt(r.lambda_variational),
            opt(r.rel_diff),
            opt(r.lambda_extrapolated),
            opt(r.rel_diff_extrapolated),
            r.flagged(ORACLE_FLAG_TOL)
        )?;
    }
    Ok(())
}
