//! Loop-count distribution tables and their CSV form.
//!
//! The export format is fixed so identical configurations produce
//! byte-identical files: `#`-prefixed `key = value` metadata lines in
//! insertion order, a `k,probability` header, then one row per loop count
//! with the probability rendered as `%.12e`.

use std::io::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LoopDistribution {
    probabilities: Vec<f64>,
    metadata: Vec<(String, String)>,
}

impl LoopDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::invalid("distribution needs at least one entry"));
        }
        if probabilities.iter().any(|p| !p.is_finite() || *p < -1e-12) {
            return Err(Error::invalid("probabilities must be finite and nonnegative"));
        }
        Ok(LoopDistribution {
            probabilities,
            metadata: Vec::new(),
        })
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn expectation(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.total() - 1.0).abs() <= tol
    }

    /// Sup-norm distance against another distribution, padding the shorter
    /// support with zeros.
    pub fn sup_distance(&self, other: &LoopDistribution) -> f64 {
        let len = self.probabilities.len().max(other.probabilities.len());
        (0..len)
            .map(|k| {
                let a = self.probabilities.get(k).copied().unwrap_or(0.0);
                let b = other.probabilities.get(k).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .fold(0.0_f64, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (key, value) in &self.metadata {
            writeln!(out, "# {key} = {value}")?;
        }
        writeln!(out, "k,probability")?;
        for (k, p) in self.probabilities.iter().enumerate() {
            writeln!(out, "{k},{}", format_sci(*p))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

/// C-style `%.12e` rendering: twelve fractional digits, two-digit signed
/// exponent (three where needed).
pub fn format_sci(x: f64) -> String {
    let raw = format!("{:.12e}", x);
    let (mantissa, exponent) = raw.split_once('e').expect("exponential format");
    let (sign, digits) = match exponent.strip_prefix('-') {
        Some(rest) => ('-', rest),
        None => ('+', exponent),
    };
    format!("{mantissa}e{sign}{digits:0>2}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_format_matches_c_convention() {
        assert_eq!(format_sci(0.0), "0.000000000000e+00");
        assert_eq!(format_sci(1.0), "1.000000000000e+00");
        assert_eq!(format_sci(2.0 / 3.0), "6.666666666667e-01");
        assert_eq!(format_sci(0.25), "2.500000000000e-01");
        assert_eq!(format_sci(-1.5e-12), "-1.500000000000e-12");
        assert_eq!(format_sci(3.25e100), "3.250000000000e+100");
    }

    #[test]
    fn csv_layout() {
        let d = LoopDistribution::new(vec![0.25, 0.5, 0.25])
            .unwrap()
            .with_meta("model", "dctc-ecp")
            .with_meta("M", 2);
        let text = d.to_csv_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# model = dctc-ecp");
        assert_eq!(lines[1], "# M = 2");
        assert_eq!(lines[2], "k,probability");
        assert_eq!(lines[3], "0,2.500000000000e-01");
        assert_eq!(lines.len(), 6);
    }

    #[test]
    fn expectation_and_distance() {
        let a = LoopDistribution::new(vec![0.25, 0.5, 0.25]).unwrap();
        assert!((a.expectation() - 1.0).abs() < 1e-15);
        assert!(a.is_normalized(1e-12));
        let b = LoopDistribution::new(vec![0.25, 0.5, 0.2, 0.05]).unwrap();
        assert!((a.sup_distance(&b) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_probabilities() {
        assert!(LoopDistribution::new(vec![]).is_err());
        assert!(LoopDistribution::new(vec![f64::NAN]).is_err());
        assert!(LoopDistribution::new(vec![-0.5, 1.5]).is_err());
    }
}
