//! Numeric list arguments: `a,b,c` or `start:stop:count`.

use distortia::Error;

pub fn parse_list(s: &str) -> Result<Vec<f64>, Error> {
    let bad = |msg: &str| Error::Config(format!("bad value list '{s}': {msg}"));
    let number = |t: &str| t.trim().parse::<f64>().map_err(|_| bad(&format!("'{}' is not a number", t.trim())));
    let parts: Vec<&str> = s.split(':').collect();
    let xs = match parts.as_slice() {
        [single] => single.split(',').map(number).collect::<Result<Vec<_>, _>>()?,
        [start, stop, count] => {
            let (a, b) = (number(start)?, number(stop)?);
            let n: usize = count.trim().parse().map_err(|_| bad("count must be a positive integer"))?;
            match n {
                0 => return Err(bad("count must be a positive integer")),
                1 => vec![a],
                // Endpoints are hit exactly.
                _ => (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
            }
        }
        _ => return Err(bad("use 'a,b,...' or 'start:stop:count'")),
    };
    if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
        return Err(bad(&format!("{x} is not finite")));
    }
    Ok(xs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("0.1, 0.5,1").unwrap(), vec![0.1, 0.5, 1.0]);
        assert_eq!(parse_list("0:1:5").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_list("0.3:0.7:1").unwrap(), vec![0.3]);
        assert!(parse_list("0:1:0").is_err());
        assert!(parse_list("0:1").is_err());
        assert!(parse_list("x").is_err());
        assert!(parse_list("inf").is_err());
    }
}
