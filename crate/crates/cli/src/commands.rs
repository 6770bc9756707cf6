use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use distortia::io::{read_samples, read_scenarios, write_knots};
use distortia::logarithm::{default_grid, existence_check, LogOptions};
use distortia::portfolio::{optimize, PortfolioOptions};
use distortia::properties::{diagnose, diagnose_numeric, PropertyTable};
use distortia::semigroup::DEFAULT_ACCURACY;
use distortia::{alpha, craroc, glr, raroc, sharpe, build_semigroup, DistortionSpec, Error, GeneratorSpec, Result, Semigroup};
use serde_json::{json, Value};

use crate::json::{self, num};
use crate::values::parse_list;
use crate::{Cli, Command, Format};

pub const ACCURACY_VAR: &str = "DISTORTIA_ACCURACY";

/// Semigroup accuracy, overridable through the environment.
fn accuracy() -> Result<f64> {
    match std::env::var(ACCURACY_VAR) {
        Err(_) => Ok(DEFAULT_ACCURACY),
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|a| a.is_finite() && *a > 0.0)
            .ok_or_else(|| Error::Config(format!("{ACCURACY_VAR} must be a positive number, got '{s}'"))),
    }
}

fn semigroup(spec: &str) -> Result<(String, Semigroup)> {
    let spec: GeneratorSpec = spec.parse()?;
    let s = build_semigroup(&spec.build()?, accuracy()?)?;
    Ok((spec.to_string(), s))
}

/// A TSV cell with the same rounding as the JSON output.
fn cell(x: f64) -> String {
    match num(x) {
        Value::String(s) => s,
        v => v.to_string(),
    }
}

fn render(format: Format, value: Value, tsv: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Format::Tsv => tsv(),
    }
}

pub fn run(cli: &Cli) -> Result<String> {
    let f = cli.format;
    match &cli.command {
        Command::Psi { semigroup: spec, t, x } => {
            let (canon, s) = semigroup(spec)?;
            let (ts, xs) = (parse_list(t)?, parse_list(x)?);
            let mut rows = Vec::with_capacity(ts.len() * xs.len());
            for &t in &ts {
                for &x in &xs {
                    rows.push((t, x, s.psi(t, x)?));
                }
            }
            let value = json!({
                "semigroup": canon,
                "accuracy": num(s.accuracy()),
                "values": rows.iter().map(|&(t, x, y)| json!({ "t": num(t), "x": num(x), "psi": num(y) })).collect::<Vec<_>>(),
            });
            Ok(render(f, value, || {
                let mut out = String::from("t\tx\tpsi\n");
                for &(t, x, y) in &rows {
                    let _ = writeln!(out, "{}\t{}\t{}", cell(t), cell(x), cell(y));
                }
                out
            }))
        }
        Command::Index { semigroup: spec, samples, tol, t_max } => {
            let (canon, s) = semigroup(spec)?;
            let d = read_samples(samples)?;
            let r = alpha(&s, &d, *tol, *t_max)?;
            let mut value = json!({ "semigroup": canon, "atoms": d.len(), "mean": num(d.mean()) });
            value.as_object_mut().unwrap().append(json::alpha(&r).as_object_mut().unwrap());
            Ok(render(f, value, || {
                format!("value\tstatus\n{}\t{}\n", cell(r.value), json::status(r.status))
            }))
        }
        Command::Measures { samples, lambda, craroc: spec } => {
            let d = read_samples(samples)?;
            let spec: DistortionSpec = spec.parse()?;
            let psi = spec.build(accuracy()?)?;
            let sr = sharpe(&d)?;
            let (ra, gl, cr) = (raroc(&d, *lambda)?, glr(&d), craroc(&d, &psi));
            let value = json!({
                "lambda": num(*lambda),
                "craroc_distortion": spec.to_string(),
                "sharpe": num(sr),
                "raroc": json::ratio(&ra),
                "glr": json::ratio(&gl),
                "craroc": json::ratio(&cr),
            });
            Ok(render(f, value, || {
                format!(
                    "measure\tvalue\nsharpe\t{}\nraroc\t{}\nglr\t{}\ncraroc\t{}\n",
                    cell(sr),
                    cell(ra.value),
                    cell(gl.value),
                    cell(cr.value)
                )
            }))
        }
        Command::Log { distortion, grid, knots_out, max_iter } => {
            let spec: DistortionSpec = distortion.parse()?;
            let psi = spec.build(accuracy()?)?;
            let grid = match grid {
                Some(g) => parse_list(g)?,
                None => default_grid(),
            };
            let opts = LogOptions { max_iter: *max_iter, ..LogOptions::default() };
            let report = existence_check(&psi, None, &grid, &opts)?;
            if let Some(path) = knots_out {
                write_knots(create(path)?, &report.recovery.knots)?;
            }
            let value = json::existence(&spec.to_string(), &report);
            Ok(render(f, value, || {
                let mut out = String::from("x\tg\tconverged\n");
                for e in &report.recovery.estimates {
                    let _ = writeln!(out, "{}\t{}\t{}", cell(e.x), cell(e.g), e.converged);
                }
                out
            }))
        }
        Command::Props { specs, numeric } => {
            if specs.is_empty() {
                return Err(Error::Validation("props needs at least one generator spec".into()));
            }
            let rows = specs
                .iter()
                .map(|s| {
                    let g = s.parse::<GeneratorSpec>()?.build()?;
                    if *numeric {
                        diagnose_numeric(&g)
                    } else {
                        diagnose(&g)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let table = PropertyTable { rows };
            let value = json!({ "rows": table.rows.iter().map(json::property).collect::<Vec<_>>() });
            Ok(render(f, value, || table.to_tsv()))
        }
        Command::Portfolio { semigroup: spec, scenarios, starts, seed, tol, t_max } => {
            let (canon, s) = semigroup(spec)?;
            let m = read_scenarios(scenarios)?;
            let opts = PortfolioOptions { starts: *starts, seed: *seed, tol: *tol, t_max: *t_max, ..PortfolioOptions::default() };
            let sol = optimize(&s, &m, &opts)?;
            let value = json::portfolio(&canon, &sol);
            Ok(render(f, value, || {
                let dir: Vec<String> = sol.direction.iter().map(|&x| cell(x)).collect();
                format!(
                    "alpha_star\tstatus\tdirection\tunique\n{}\t{}\t{}\t{}\n",
                    cell(sol.alpha_star),
                    json::status(sol.status),
                    dir.join(","),
                    sol.uniqueness_flag
                )
            }))
        }
    }
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
