//! Measurement overlays: a header line, then rows of
//! `a_nm, a_err_nm, grad_Pa, grad_err_Pa`.

use std::path::Path;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPoint {
    /// Separation in meters.
    pub separation: f64,
    pub separation_error: f64,
    /// F'/R in Pa.
    pub gradient: f64,
    pub gradient_error: f64,
}

pub fn parse_overlay(text: &str, origin: &str) -> Result<Vec<DataPoint>, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    if lines.next().is_none() {
        return Err(CliError::Input(format!("{origin}: empty overlay file")));
    }
    let mut points = Vec::new();
    for (idx, line) in lines {
        let row = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(CliError::Input(format!(
                "{origin} line {row}: expected 4 fields, found {}",
                fields.len()
            )));
        }
        let mut values = [0.0f64; 4];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field.parse().map_err(|_| {
                CliError::Input(format!("{origin} line {row}: '{field}' is not a number"))
            })?;
        }
        let [a, a_err, grad, grad_err] = values;
        if !(a > 0.0) || !(a_err >= 0.0) || !(grad_err > 0.0) || !grad.is_finite() {
            return Err(CliError::Input(format!(
                "{origin} line {row}: need a > 0, a_err >= 0 and grad_err > 0"
            )));
        }
        points.push(DataPoint {
            separation: a * 1e-9,
            separation_error: a_err * 1e-9,
            gradient: grad,
            gradient_error: grad_err,
        });
    }
    if points.is_empty() {
        return Err(CliError::Input(format!("{origin}: no data rows")));
    }
    Ok(points)
}

pub fn load_overlay(path: &Path) -> Result<Vec<DataPoint>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_overlay(&text, &path.display().to_string())
}

/// Signed distance from the band [min, max] to the data value, in units of
/// the data's error bar; zero when the value lies inside the band.
pub fn band_residual(point: &DataPoint, min: f64, max: f64) -> f64 {
    if point.gradient > max {
        (point.gradient - max) / point.gradient_error
    } else if point.gradient < min {
        (point.gradient - min) / point.gradient_error
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rows_and_converts_units() {
        let pts = parse_overlay(
            "a_nm,a_err_nm,grad_Pa,grad_err_Pa\n250, 1, 0.5, 0.01\n\n",
            "t",
        )
        .unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].separation - 250e-9).abs() < 1e-20);
        assert_eq!(pts[0].gradient, 0.5);
    }

    #[test]
    fn errors_name_the_row() {
        let err = parse_overlay("h\n250,1,0.5,0.01\n260,1,x,0.01\n", "f.csv").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = parse_overlay("h\n250,1,0.5\n", "f.csv").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        assert!(parse_overlay("h\n", "f.csv").is_err());
        assert!(parse_overlay("", "f.csv").is_err());
        assert!(parse_overlay("h\n250,1,0.5,0\n", "f.csv").is_err());
    }

    #[test]
    fn residual_is_zero_inside_band() {
        let p = DataPoint {
            separation: 3e-7,
            separation_error: 0.0,
            gradient: 1.0,
            gradient_error: 0.1,
        };
        assert_eq!(band_residual(&p, 0.9, 1.1), 0.0);
        assert!((band_residual(&p, 1.2, 1.3) + 2.0).abs() < 1e-12);
        assert!((band_residual(&p, 0.5, 0.8) - 2.0).abs() < 1e-12);
    }
}
