//! CSV formats: samples `pnl[,weight]`, knots `x,g`, distortion tables
//! `x,psi` and scenarios `p,asset1,...,assetd`. Every file has a header row.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::choquet::EmpiricalDistribution;
use crate::distortion::Distortion;
use crate::error::{Error, Result};
use crate::portfolio::ScenarioMatrix;
use crate::real::Real;

/// Rows of a numeric CSV whose header must start with `expected`.
fn read_table<R: Read>(reader: R, expected: &[&str], what: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.to_ascii_lowercase()).collect();
    if header.len() < expected.len() || header.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(Error::Validation(format!(
            "{what} file must start with header '{}', found '{}'",
            expected.join(","),
            header.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Validation(format!("{what} row {}: '{f}' is not a number", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Validation(format!("{what} file has no rows")));
    }
    Ok((header, rows))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn cast<F: Real>(v: f64) -> F {
    F::lit(v)
}

pub fn parse_samples<F: Real, R: Read>(reader: R) -> Result<EmpiricalDistribution<F>> {
    let (header, rows) = read_table(reader, &["pnl"], "sample")?;
    let weighted = header.get(1).is_some_and(|h| h == "weight");
    let width = if weighted { 2 } else { 1 };
    let mut values = Vec::with_capacity(rows.len());
    let mut weights = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(Error::Validation(format!("sample row {} has {} fields, expected {width}", i + 1, r.len())));
        }
        values.push(cast(r[0]));
        if weighted {
            weights.push(cast(r[1]));
        }
    }
    EmpiricalDistribution::from_samples(&values, weighted.then_some(&weights[..]))
}

pub fn read_samples<F: Real>(path: &Path) -> Result<EmpiricalDistribution<F>> {
    parse_samples(open(path)?)
}

fn pairs<F: Real>(rows: Vec<Vec<f64>>, what: &str) -> Result<Vec<(F, F)>> {
    rows.into_iter()
        .enumerate()
        .map(|(i, r)| match r[..] {
            [a, b] => Ok((cast(a), cast(b))),
            _ => Err(Error::Validation(format!("{what} row {} has {} fields, expected 2", i + 1, r.len()))),
        })
        .collect()
}

pub fn parse_knots<F: Real, R: Read>(reader: R) -> Result<Vec<(F, F)>> {
    let (_, rows) = read_table(reader, &["x", "g"], "knot")?;
    pairs(rows, "knot")
}

pub fn read_knots<F: Real>(path: &Path) -> Result<Vec<(F, F)>> {
    parse_knots(open(path)?)
}

pub fn write_knots<F: Real, W: Write>(out: W, knots: &[(F, F)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "g"])?;
    for &(x, g) in knots {
        w.write_record([x.to_string(), g.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// A piecewise-linear distortion through the table; non-concave tables are
/// rejected.
pub fn parse_distortion<F: Real, R: Read>(reader: R) -> Result<Distortion<F>> {
    let (_, rows) = read_table(reader, &["x", "psi"], "distortion")?;
    Distortion::piecewise_linear(&pairs(rows, "distortion")?)
}

pub fn read_distortion<F: Real>(path: &Path) -> Result<Distortion<F>> {
    parse_distortion(open(path)?)
}

pub fn parse_scenarios<F: Real, R: Read>(reader: R) -> Result<ScenarioMatrix<F>> {
    let (header, rows) = read_table(reader, &["p"], "scenario")?;
    let d = header.len() - 1;
    let mut gains = Vec::with_capacity(rows.len());
    let mut probs = Vec::with_capacity(rows.len());
    for (i, r) in rows.into_iter().enumerate() {
        if r.len() != d + 1 {
            return Err(Error::Validation(format!("scenario row {} has {} fields, expected {}", i + 1, r.len(), d + 1)));
        }
        probs.push(cast(r[0]));
        gains.push(r[1..].iter().map(|&v| cast(v)).collect());
    }
    ScenarioMatrix::new(gains, probs)
}

pub fn read_scenarios<F: Real>(path: &Path) -> Result<ScenarioMatrix<F>> {
    parse_scenarios(open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_with_and_without_weights() {
        let d: EmpiricalDistribution<f64> = parse_samples("pnl\n3\n-1\n".as_bytes()).unwrap();
        assert_eq!(d.values(), &[-1.0, 3.0]);
        let d: EmpiricalDistribution<f64> = parse_samples("pnl,weight\n-1,3\n3,1\n".as_bytes()).unwrap();
        assert_eq!(d.probs(), &[0.75, 0.25]);
        assert!(parse_samples::<f64, _>("value\n1\n".as_bytes()).is_err());
        assert!(parse_samples::<f64, _>("pnl\nabc\n".as_bytes()).is_err());
        assert!(parse_samples::<f64, _>("pnl\n".as_bytes()).is_err());
    }

    #[test]
    fn knots_round_trip() {
        let k = vec![(0.25, 0.1), (0.5, 0.125)];
        let mut buf = Vec::new();
        write_knots(&mut buf, &k).unwrap();
        assert_eq!(parse_knots::<f64, _>(&buf[..]).unwrap(), k);
    }

    #[test]
    fn distortion_table_must_be_concave() {
        assert!(parse_distortion::<f64, _>("x,psi\n0.5,0.75\n".as_bytes()).is_ok());
        assert!(parse_distortion::<f64, _>("x,psi\n0.5,0.25\n".as_bytes()).is_err());
    }

    #[test]
    fn scenarios() {
        let m: ScenarioMatrix<f64> = parse_scenarios("p,a,b\n0.5,1,-1\n0.5,-1,2\n".as_bytes()).unwrap();
        assert_eq!((m.scenarios(), m.assets()), (2, 2));
        assert!(parse_scenarios::<f64, _>("p,a\n0.5,1\n0.6,2\n".as_bytes()).is_err());
    }
}
