//! Parsers for the `kind:params` strings accepted by --density and --func.

use std::path::Path;

use provar_core::measure::DensityFn;
use provar_core::poly::{truncated_series, MultiPoly, SeriesFamily, SeriesSpec};

use crate::error::{CliError, Result};

fn split(spec: &str) -> (&str, &str) {
    spec.split_once(':').unwrap_or((spec, ""))
}

fn numbers(flag: &'static str, params: &str, count: usize) -> Result<Vec<f64>> {
    let values: Vec<f64> = params
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::invalid(flag, format!("expected numbers, got `{params}`")))?;
    if values.len() != count || values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::invalid(
            flag,
            format!("expected {count} finite comma-separated numbers, got `{params}`"),
        ));
    }
    Ok(values)
}

fn positive(flag: &'static str, name: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::invalid(
            flag,
            format!("{name} must be > 0, got {v}"),
        ))
    }
}

fn order(flag: &'static str, v: f64) -> Result<u32> {
    if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
        Ok(v as u32)
    } else {
        Err(CliError::invalid(
            flag,
            format!("truncation order must be an integer >= 0, got {v}"),
        ))
    }
}

pub fn read_poly(path: &Path) -> Result<MultiPoly> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    text.parse().map_err(|source| CliError::ParsePoly {
        path: path.to_owned(),
        source,
    })
}

fn series_poly(flag: &'static str, family: SeriesFamily, k: u32) -> Result<MultiPoly> {
    truncated_series(&SeriesSpec::new(family, k))
        .map_err(|e| CliError::invalid(flag, e.to_string()))
}

/// Parses a --density value; `nvars` comes from the box.
pub fn parse_density(spec: &str, nvars: usize) -> Result<DensityFn> {
    const FLAG: &str = "--density";
    let (kind, params) = split(spec);
    let density = match kind {
        "const" => {
            let v = numbers(FLAG, params, 1)?;
            DensityFn::Constant { nvars, value: v[0] }
        }
        "poly" => DensityFn::Polynomial {
            poly: read_poly(Path::new(params))?,
        },
        "exp" => {
            let v = numbers(FLAG, params, 1)?;
            DensityFn::Exponential {
                rate: positive(FLAG, "rate", v[0])?,
            }
        }
        "gauss" => {
            let v = numbers(FLAG, params, 2)?;
            DensityFn::Gaussian {
                mean: v[0],
                sigma: positive(FLAG, "sigma", v[1])?,
            }
        }
        "series-exp" => {
            let v = numbers(FLAG, params, 2)?;
            let rate = positive(FLAG, "rate", v[0])?;
            DensityFn::Polynomial {
                poly: series_poly(FLAG, SeriesFamily::Exponential { rate }, order(FLAG, v[1])?)?,
            }
        }
        "series-gauss" => {
            let v = numbers(FLAG, params, 3)?;
            let family = SeriesFamily::Gaussian {
                mean: v[0],
                sigma: positive(FLAG, "sigma", v[1])?,
            };
            DensityFn::Polynomial {
                poly: series_poly(FLAG, family, order(FLAG, v[2])?)?,
            }
        }
        _ => {
            return Err(CliError::invalid(
                FLAG,
                format!("unknown density kind `{kind}`; see --help"),
            ))
        }
    };
    Ok(density)
}

pub type Function = Box<dyn Fn(&[f64]) -> f64 + Sync>;

/// Parses a --func value for Bernstein approximation. Returns the function
/// and its number of variables.
pub fn parse_function(spec: &str, nvars: usize) -> Result<(Function, usize)> {
    const FLAG: &str = "--func";
    let (kind, params) = split(spec);
    let axis: Box<dyn Fn(f64) -> f64 + Sync> = match kind {
        "poly" => {
            let poly = read_poly(Path::new(params))?;
            let n = poly.nvars();
            return Ok((Box::new(move |x: &[f64]| poly.eval_unchecked(x)), n));
        }
        "const" => {
            let c = numbers(FLAG, params, 1)?[0];
            return Ok((Box::new(move |_: &[f64]| c), nvars));
        }
        "abs" => {
            let a = numbers(FLAG, params, 1)?[0];
            Box::new(move |x| (x - a).abs())
        }
        "exp" => {
            let rate = positive(FLAG, "rate", numbers(FLAG, params, 1)?[0])?;
            Box::new(move |x| rate * (-rate * x).exp())
        }
        "gauss" => {
            let v = numbers(FLAG, params, 2)?;
            let (mean, sigma) = (v[0], positive(FLAG, "sigma", v[1])?);
            let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
            Box::new(move |x| {
                let z = (x - mean) / sigma;
                norm * (-0.5 * z * z).exp()
            })
        }
        _ => {
            return Err(CliError::invalid(
                FLAG,
                format!("unknown function kind `{kind}`; see --help"),
            ))
        }
    };
    Ok((
        Box::new(move |x: &[f64]| x.iter().map(|&t| axis(t)).product()),
        nvars,
    ))
}

/// Parses a --func value for the series method.
pub fn parse_series_family(spec: &str) -> Result<SeriesFamily> {
    const FLAG: &str = "--func";
    let (kind, params) = split(spec);
    match kind {
        "exp" => Ok(SeriesFamily::Exponential {
            rate: positive(FLAG, "rate", numbers(FLAG, params, 1)?[0])?,
        }),
        "gauss" => {
            let v = numbers(FLAG, params, 2)?;
            Ok(SeriesFamily::Gaussian {
                mean: v[0],
                sigma: positive(FLAG, "sigma", v[1])?,
            })
        }
        "coef" => {
            let count = params.split(',').count();
            Ok(SeriesFamily::ExplicitCoefficients {
                coefficients: numbers(FLAG, params, count)?,
            })
        }
        "shift" => Ok(SeriesFamily::ShiftedPower {
            shift: numbers(FLAG, params, 1)?[0],
        }),
        _ => Err(CliError::invalid(
            FLAG,
            format!("unknown series family `{kind}`; see --help"),
        )),
    }
}
