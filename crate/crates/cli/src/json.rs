//! JSON rendering with a fixed field order and 15 significant digits.
//! Non-finite numbers become the strings `"inf"`, `"-inf"` and `"nan"`.

use distortia::logarithm::{ExistenceReport, PointEstimate, Verdict};
use distortia::portfolio::{PortfolioSolution, StartRecord};
use distortia::properties::{PropertyReport, SlopeBranch};
use distortia::tail::Confidence;
use distortia::{AlphaResult, AlphaStatus, Ratio};
use serde_json::{json, Map, Value};

pub fn num(x: f64) -> Value {
    if x.is_nan() {
        return Value::from("nan");
    }
    if x.is_infinite() {
        return Value::from(if x > 0.0 { "inf" } else { "-inf" });
    }
    // Rounding through a 15-digit decimal keeps the shortest representation
    // at no more than 15 digits.
    let rounded: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    Value::from(rounded)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn pair(p: (f64, f64)) -> Value {
    Value::Array(vec![num(p.0), num(p.1)])
}

pub fn status(s: AlphaStatus) -> &'static str {
    match s {
        AlphaStatus::Zero => "zero",
        AlphaStatus::Interior => "interior",
        AlphaStatus::AtCap => "at_cap",
        AlphaStatus::Infinite => "infinite",
    }
}

fn confidence(c: Confidence) -> &'static str {
    match c {
        Confidence::Analytic => "analytic",
        Confidence::NumericConfident => "numeric",
        Confidence::NumericBorderline => "borderline",
    }
}

pub fn alpha(r: &AlphaResult<f64>) -> Value {
    json!({
        "value": num(r.value),
        "status": status(r.status),
        "bracket": pair(r.bracket),
        "evaluations": r.evaluations,
    })
}

pub fn ratio(r: &Ratio<f64>) -> Value {
    json!({
        "value": num(r.value),
        "numerator": num(r.numerator),
        "denominator": num(r.denominator),
        "degenerate": r.degenerate,
    })
}

fn estimate(e: &PointEstimate<f64>) -> Value {
    json!({
        "x": num(e.x),
        "g": num(e.g),
        "iterations": e.iterations,
        "rel_change": num(e.rel_change),
        "converged": e.converged,
    })
}

pub fn existence(distortion: &str, r: &ExistenceReport<f64>) -> Value {
    let rec = &r.recovery;
    let c = &rec.concavity;
    json!({
        "distortion": distortion,
        "verdict": match r.verdict { Verdict::Plausible => "plausible", Verdict::Rejected => "rejected" },
        "reasons": r.reasons,
        "psi_prime_at_1": num(rec.psi_prime_at_1),
        "hypothesis_holds": rec.hypothesis_holds,
        "trivial": rec.trivial,
        "roundtrip_error": num(rec.roundtrip_error),
        "concavity": {
            "passed": c.passed,
            "violation": num(c.violation),
            "tolerance": num(c.tolerance),
            "worst_triple": c.worst_triple.map(|t| Value::Array(t.iter().map(|&p| pair(p)).collect())),
        },
        "jump": rec.jump.map(|j| json!({ "location": num(j.location), "factor": num(j.factor) })),
        "estimates": rec.estimates.iter().map(estimate).collect::<Vec<_>>(),
        "knots": rec.knots.iter().map(|&p| pair(p)).collect::<Vec<_>>(),
    })
}

fn verdict(holds: bool, c: Confidence, mut extra: Map<String, Value>) -> Value {
    let mut m = Map::new();
    m.insert("holds".into(), Value::from(holds));
    m.insert("confidence".into(), Value::from(confidence(c)));
    m.append(&mut extra);
    Value::Object(m)
}

fn fields(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("fields takes an object"),
    }
}

pub fn property(r: &PropertyReport<f64>) -> Value {
    let (i, ii, iii, iv) = (&r.zero_at_zero, &r.strict_concavity, &r.infinite_slope_at_zero, &r.zero_slope_at_one);
    let branch = match iv.branch {
        SlopeBranch::IntegralConverges => "integral_converges",
        SlopeBranch::SlopeMinusInfinity => "slope_minus_infinity",
        SlopeBranch::Neither => "neither",
    };
    json!({
        "generator": r.generator,
        "signs": r.signs(),
        "I": verdict(i.holds, i.confidence, fields(json!({
            "g0": num(i.g0),
            "lower_tail_divergent": i.lower_tail_divergent,
        }))),
        "II": verdict(ii.holds, ii.confidence, fields(json!({
            "min_slack": num(ii.min_slack),
            "margin": num(ii.margin),
        }))),
        "III": verdict(iii.holds, iii.confidence, fields(json!({
            "slope": num(iii.slope),
            "trace": iii.trace.iter().map(|&p| pair(p)).collect::<Vec<_>>(),
        }))),
        "IV": verdict(iv.holds, iv.confidence, fields(json!({
            "branch": branch,
            "upper_integral": num(iv.upper_integral),
            "slope": num(iv.slope),
        }))),
        "notes": r.notes,
    })
}

fn start(r: &StartRecord<f64>) -> Value {
    json!({
        "start": nums(&r.start),
        "direction": nums(&r.direction),
        "alpha": num(r.alpha),
        "status": status(r.status),
        "evaluations": r.evaluations,
    })
}

pub fn portfolio(semigroup: &str, s: &PortfolioSolution<f64>) -> Value {
    json!({
        "semigroup": semigroup,
        "direction": nums(&s.direction),
        "alpha_star": num(s.alpha_star),
        "status": status(s.status),
        "uniqueness_flag": s.uniqueness_flag,
        "arbitrage": s.arbitrage,
        "all_zero": s.all_zero,
        "starts": s.starts.iter().map(start).collect::<Vec<_>>(),
    })
}
