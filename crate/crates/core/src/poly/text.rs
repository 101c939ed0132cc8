//! Plain-text polynomial format.
//!
//! ```text
//! nvars=3
//! 1 2 0 0
//! 1 0 2 0
//! -1 0 0 0
//! ```
//!
//! One term per line, coefficient first, then one exponent per variable.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::str::FromStr;

use super::MultiPoly;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ParsePolyError {
    #[error("missing `nvars=<n>` header")]
    MissingHeader,
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
}

impl MultiPoly {
    /// Renders the polynomial in the text format. Coefficients use the
    /// shortest representation that parses back to the same `f64`.
    pub fn to_text(&self) -> String {
        let mut out = format!("nvars={}\n", self.nvars());
        for (e, c) in self.terms() {
            write!(out, "{c:e}").unwrap();
            for k in e {
                write!(out, " {k}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

impl FromStr for MultiPoly {
    type Err = ParsePolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(ParsePolyError::MissingHeader)?;
        let nvars: usize = header
            .strip_prefix("nvars=")
            .ok_or(ParsePolyError::MissingHeader)?
            .trim()
            .parse()
            .map_err(|e| ParsePolyError::Line {
                line: hline,
                msg: format!("bad nvars: {e}"),
            })?;
        let mut terms = Vec::new();
        for (line, text) in lines {
            let err = |msg: String| ParsePolyError::Line { line, msg };
            let mut fields = text.split_whitespace();
            let coeff: f64 = fields
                .next()
                .expect("non-empty line")
                .parse()
                .map_err(|e| err(format!("bad coefficient: {e}")))?;
            if !coeff.is_finite() {
                return Err(err("coefficient is not finite".into()));
            }
            let exps = fields
                .map(|f| {
                    f.parse::<u32>()
                        .map_err(|e| err(format!("bad exponent `{f}`: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if exps.len() != nvars {
                return Err(err(format!(
                    "expected {nvars} exponents, found {}",
                    exps.len()
                )));
            }
            terms.push((coeff, exps));
        }
        Ok(MultiPoly::from_terms(nvars, terms).expect("lengths checked"))
    }
}

impl serde::Serialize for MultiPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

impl<'de> serde::Deserialize<'de> for MultiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
