use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::error::CliError;

/// Round-trip representation: 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn sink(out: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    let w: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::Writer::from_writer(w))
}

/// Collects per-row failures so good rows still get written. The exit
/// status is the most severe one seen: numeric (4) over configuration (3).
#[derive(Default)]
pub struct RowErrors {
    count: usize,
    code: i32,
}

impl RowErrors {
    pub fn record(&mut self, what: &str, e: &mg1tail_core::Error) -> String {
        self.count += 1;
        self.code = self.code.max(CliError::from(e.clone()).exit_code());
        let msg = e.to_string();
        eprintln!("error: {what}: {msg}");
        msg
    }

    pub fn finish(&self) -> Result<(), CliError> {
        let msg = format!("{} row(s) failed", self.count);
        match self.count {
            0 => Ok(()),
            _ if self.code == 3 => Err(CliError::Config(msg)),
            _ => Err(CliError::Numeric(msg)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn row_errors_keep_worst_code() {
        use mg1tail_core::Error;
        let mut errs = RowErrors::default();
        assert!(errs.finish().is_ok());
        errs.record("a", &Error::Config("bad".into()));
        assert_eq!(errs.finish().unwrap_err().exit_code(), 3);
        errs.record("b", &Error::NoPositiveRoot { log_rho: -0.5 });
        assert_eq!(errs.finish().unwrap_err().exit_code(), 4);
    }
}
