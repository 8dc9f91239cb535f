//! Grid syntax: `a,b,c`, `lin:start:stop:count` or `log:start:stop:count`.

use crate::error::CliError;

pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Config(format!("bad grid `{text}`: {why}"));
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| bad(&format!("`{s}` is not a number")))
    };
    let values = if let Some(rest) = text.strip_prefix("lin:").or(text.strip_prefix("log:")) {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected kind:start:stop:count"));
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad("count must be a positive integer"))?;
        if n == 0 {
            return Err(bad("count must be a positive integer"));
        }
        let frac = |i: usize| if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        if text.starts_with("log:") {
            if a <= 0.0 || b <= 0.0 {
                return Err(bad("log grids need positive end points"));
            }
            let (la, lb) = (a.ln(), b.ln());
            let mut v: Vec<f64> = (0..n).map(|i| (la + (lb - la) * frac(i)).exp()).collect();
            v[0] = a;
            if n > 1 {
                v[n - 1] = b;
            }
            v
        } else {
            (0..n).map(|i| a + (b - a) * frac(i)).collect()
        }
    } else {
        text.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(num)
            .collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(bad("grid is empty"));
    }
    Ok(values)
}

pub fn rho_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let v = parse_grid(text)?;
    if let Some(r) = v.iter().find(|&&r| !(r > 0.0 && r < 1.0)) {
        return Err(CliError::Config(format!("rho = {r} is outside (0, 1)")));
    }
    Ok(v)
}

pub fn x_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let v = parse_grid(text)?;
    if let Some(x) = v.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(CliError::Config(format!("x = {x} must be positive")));
    }
    Ok(v)
}

pub fn n_grid(text: &str) -> Result<Vec<u64>, CliError> {
    parse_grid(text)?
        .into_iter()
        .map(|v| {
            let n = v.round();
            if n >= 1.0 && (v - n).abs() < 1e-9 {
                Ok(n as u64)
            } else {
                Err(CliError::Config(format!("n = {v} is not a positive integer")))
            }
        })
        .collect()
}
