//! Text specifications of generators and distortions.
//!
//! Generators:
//! `cvar | aimin | aimax | wang | knots:<path> | scale(<float>,<spec>) |
//! dual(<spec>) | mix(<spec>,<spec>) | min(<spec>,<spec>) | max(<spec>,<spec>)`.
//!
//! Distortions:
//! `identity | pow(<p>) | clamp(<c>) | draws(<k>) | wang(<t>) | wang1 |
//! flow(<generator>,<t>) | dual(<distortion>) | csv:<path>`; a bare path
//! ending in `.csv` is read as a table.
//!
//! Whitespace is ignored outside paths. A path runs to the next `,` or `)` at
//! the same nesting level. `Display` prints the canonical form, and parsing
//! it again gives the same value.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::distortion::Distortion;
use crate::error::{Error, Result};
use crate::generator::{
    concave_majorant_max, dual_generator, min_generators, scale_generator, sum_generators, Builtin, Generator,
};
use crate::io::{read_distortion, read_knots};
use crate::real::Real;
use crate::semigroup::build_semigroup;

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Builtin(Builtin),
    Knots(PathBuf),
    Scale(f64, Box<GeneratorSpec>),
    Dual(Box<GeneratorSpec>),
    Mix(Box<GeneratorSpec>, Box<GeneratorSpec>),
    Min(Box<GeneratorSpec>, Box<GeneratorSpec>),
    Max(Box<GeneratorSpec>, Box<GeneratorSpec>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistortionSpec {
    Identity,
    Power(f64),
    Clamp(f64),
    Draws(f64),
    Wang(f64),
    Flow(GeneratorSpec, f64),
    Dual(Box<DistortionSpec>),
    Table(PathBuf),
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Config(format!("bad spec '{}' at offset {}: {msg}", self.src, self.pos))
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += self.rest().chars().next().map_or(0, char::len_utf8);
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn eat(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let n = self.rest().find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(self.rest().len());
        let s = &self.rest()[..n];
        self.pos += n;
        s
    }

    /// Raw text up to the next `,` or `)` at nesting level 0.
    fn raw(&mut self) -> &'a str {
        let mut depth = 0usize;
        let mut end = self.rest().len();
        for (i, c) in self.rest().char_indices() {
            match c {
                '(' => depth += 1,
                ')' if depth == 0 => {
                    end = i;
                    break;
                }
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    end = i;
                    break;
                }
                _ => {}
            }
        }
        let s = &self.rest()[..end];
        self.pos += end;
        s
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let s = self.raw().trim();
        s.parse::<f64>().map_err(|_| {
            self.pos = start;
            self.err(&format!("'{s}' is not a number"))
        })
    }

    fn path(&mut self) -> Result<PathBuf> {
        let s = self.raw().trim();
        if s.is_empty() {
            return Err(self.err("empty path"));
        }
        Ok(PathBuf::from(s))
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.rest().is_empty() {
            Ok(())
        } else {
            Err(self.err("trailing input"))
        }
    }
}

fn parse_generator(c: &mut Cursor<'_>) -> Result<GeneratorSpec> {
    let name = c.ident();
    let binary = |c: &mut Cursor<'_>| -> Result<(Box<GeneratorSpec>, Box<GeneratorSpec>)> {
        c.eat('(')?;
        let a = parse_generator(c)?;
        c.eat(',')?;
        let b = parse_generator(c)?;
        c.eat(')')?;
        Ok((Box::new(a), Box::new(b)))
    };
    Ok(match name {
        "knots" => {
            c.eat(':')?;
            GeneratorSpec::Knots(c.path()?)
        }
        "scale" => {
            c.eat('(')?;
            let l = c.number()?;
            c.eat(',')?;
            let g = parse_generator(c)?;
            c.eat(')')?;
            GeneratorSpec::Scale(l, Box::new(g))
        }
        "dual" => {
            c.eat('(')?;
            let g = parse_generator(c)?;
            c.eat(')')?;
            GeneratorSpec::Dual(Box::new(g))
        }
        "mix" => {
            let (a, b) = binary(c)?;
            GeneratorSpec::Mix(a, b)
        }
        "min" => {
            let (a, b) = binary(c)?;
            GeneratorSpec::Min(a, b)
        }
        "max" => {
            let (a, b) = binary(c)?;
            GeneratorSpec::Max(a, b)
        }
        "" => return Err(c.err("expected a generator name")),
        other => GeneratorSpec::Builtin(Builtin::from_name(other)?),
    })
}

fn parse_distortion(c: &mut Cursor<'_>) -> Result<DistortionSpec> {
    c.skip_ws();
    let save = c.pos;
    let name = c.ident();
    let unary = |c: &mut Cursor<'_>| -> Result<f64> {
        c.eat('(')?;
        let v = c.number()?;
        c.eat(')')?;
        Ok(v)
    };
    Ok(match name {
        "identity" => DistortionSpec::Identity,
        "pow" => DistortionSpec::Power(unary(c)?),
        "clamp" => DistortionSpec::Clamp(unary(c)?),
        "draws" => DistortionSpec::Draws(unary(c)?),
        "wang" => DistortionSpec::Wang(unary(c)?),
        "wang1" => DistortionSpec::Wang(1.0),
        "flow" => {
            c.eat('(')?;
            let g = parse_generator(c)?;
            c.eat(',')?;
            let t = c.number()?;
            c.eat(')')?;
            DistortionSpec::Flow(g, t)
        }
        "dual" => {
            c.eat('(')?;
            let d = parse_distortion(c)?;
            c.eat(')')?;
            DistortionSpec::Dual(Box::new(d))
        }
        "csv" if c.rest().starts_with(':') => {
            c.eat(':')?;
            DistortionSpec::Table(c.path()?)
        }
        _ => {
            c.pos = save;
            let p = c.path()?;
            if p.extension().is_some_and(|e| e == "csv") {
                DistortionSpec::Table(p)
            } else {
                return Err(c.err("unknown distortion"));
            }
        }
    })
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut c = Cursor::new(s);
        let g = parse_generator(&mut c)?;
        c.finish()?;
        Ok(g)
    }
}

impl FromStr for DistortionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut c = Cursor::new(s);
        let d = parse_distortion(&mut c)?;
        c.finish()?;
        Ok(d)
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::Builtin(b) => write!(f, "{b}"),
            GeneratorSpec::Knots(p) => write!(f, "knots:{}", p.display()),
            GeneratorSpec::Scale(l, g) => write!(f, "scale({l},{g})"),
            GeneratorSpec::Dual(g) => write!(f, "dual({g})"),
            GeneratorSpec::Mix(a, b) => write!(f, "mix({a},{b})"),
            GeneratorSpec::Min(a, b) => write!(f, "min({a},{b})"),
            GeneratorSpec::Max(a, b) => write!(f, "max({a},{b})"),
        }
    }
}

impl fmt::Display for DistortionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistortionSpec::Identity => f.write_str("identity"),
            DistortionSpec::Power(p) => write!(f, "pow({p})"),
            DistortionSpec::Clamp(c) => write!(f, "clamp({c})"),
            DistortionSpec::Draws(k) => write!(f, "draws({k})"),
            DistortionSpec::Wang(t) => write!(f, "wang({t})"),
            DistortionSpec::Flow(g, t) => write!(f, "flow({g},{t})"),
            DistortionSpec::Dual(d) => write!(f, "dual({d})"),
            DistortionSpec::Table(p) => write!(f, "csv:{}", p.display()),
        }
    }
}

/// Resolve relative paths against `base`.
fn resolve(base: Option<&Path>, p: &Path) -> PathBuf {
    match base {
        Some(b) if p.is_relative() => b.join(p),
        _ => p.to_path_buf(),
    }
}

impl GeneratorSpec {
    pub fn build<F: Real>(&self) -> Result<Generator<F>> {
        self.build_in(None)
    }

    /// Build, reading knot files relative to `base` when given.
    pub fn build_in<F: Real>(&self, base: Option<&Path>) -> Result<Generator<F>> {
        Ok(match self {
            GeneratorSpec::Builtin(b) => Generator::builtin(*b),
            GeneratorSpec::Knots(p) => {
                let path = resolve(base, p);
                Generator::from_knots(&read_knots(&path)?, &p.display().to_string())?
            }
            GeneratorSpec::Scale(l, g) => scale_generator(F::lit(*l), &g.build_in(base)?)?,
            GeneratorSpec::Dual(g) => dual_generator(&g.build_in(base)?),
            GeneratorSpec::Mix(a, b) => sum_generators(&a.build_in(base)?, &b.build_in(base)?),
            GeneratorSpec::Min(a, b) => min_generators(&a.build_in(base)?, &b.build_in(base)?),
            GeneratorSpec::Max(a, b) => concave_majorant_max(&a.build_in(base)?, &b.build_in(base)?)?,
        })
    }
}

impl DistortionSpec {
    /// Build; `accuracy` is used for `flow(...)` semigroups.
    pub fn build<F: Real>(&self, accuracy: F) -> Result<Distortion<F>> {
        Ok(match self {
            DistortionSpec::Identity => Distortion::identity(),
            DistortionSpec::Power(p) => Distortion::power(F::lit(*p))?,
            DistortionSpec::Clamp(c) => Distortion::clamp(F::lit(*c))?,
            DistortionSpec::Draws(k) => Distortion::min_of_draws(F::lit(*k))?,
            DistortionSpec::Wang(t) => Distortion::wang(F::lit(*t))?,
            DistortionSpec::Flow(g, t) => Arc::new(build_semigroup(&g.build()?, accuracy)?).distortion_at(F::lit(*t))?,
            DistortionSpec::Dual(d) => d.build(accuracy)?.dual(),
            DistortionSpec::Table(p) => read_distortion(p)?,
        })
    }
}

/// Parse and build a generator in one step.
pub fn parse_generator_spec<F: Real>(s: &str) -> Result<Generator<F>> {
    s.parse::<GeneratorSpec>()?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let cases = [
            ("cvar", "cvar"),
            (" scale( 0.5 , mix(cvar, aimax) )", "scale(0.5,mix(cvar,aimax))"),
            ("max(min(cvar,wang),dual(aimin))", "max(min(cvar,wang),dual(aimin))"),
            ("knots:data/g.csv", "knots:data/g.csv"),
        ];
        for (src, canon) in cases {
            let g: GeneratorSpec = src.parse().unwrap();
            assert_eq!(g.to_string(), canon);
            assert_eq!(canon.parse::<GeneratorSpec>().unwrap(), g);
        }
        let d: DistortionSpec = "wang1".parse().unwrap();
        assert_eq!(d.to_string(), "wang(1)");
        assert_eq!("flow(dual(cvar), 2)".parse::<DistortionSpec>().unwrap().to_string(), "flow(dual(cvar),2)");
        assert_eq!("tables/l2.csv".parse::<DistortionSpec>().unwrap().to_string(), "csv:tables/l2.csv");
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "cvarx", "scale(a,cvar)", "mix(cvar)", "dual(cvar", "cvar)", "knots:"] {
            assert!(bad.parse::<GeneratorSpec>().is_err(), "{bad}");
        }
        for bad in ["pow", "pow(x)", "flow(cvar)", "nope"] {
            assert!(bad.parse::<DistortionSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn builds() {
        let g: Generator<f64> = parse_generator_spec("scale(2,cvar)").unwrap();
        assert_eq!(g.eval(0.25), 0.5);
        let d = "dual(clamp(2))".parse::<DistortionSpec>().unwrap().build(1e-9f64).unwrap();
        assert!((d.eval(0.5) - 0.75).abs() < 1e-15);
    }
}
