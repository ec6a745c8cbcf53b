//! Comma-separated matrix files: one row per line, integer or real
//! entries. Integer payloads round-trip exactly; real payloads are
//! written with 12 significant digits.

use crate::{AppError, AppResult};

fn rows_of(text: &str) -> Vec<Vec<&str>> {
    text.lines()
        .map(|line| line.trim_end_matches('\r').trim())
        .filter(|line| !line.is_empty())
        .map(|line| line.split(',').map(str::trim).collect())
        .collect()
}

fn shape_checked<T>(context: &str, rows: Vec<Vec<T>>) -> AppResult<(usize, usize, Vec<T>)> {
    if rows.is_empty() {
        return Err(AppError::Parse { context: context.into(), msg: "no rows".into() });
    }
    let cols = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(AppError::Parse {
                context: context.into(),
                msg: format!("row {} has {} entries, expected {}", i + 1, row.len(), cols),
            });
        }
    }
    let r = rows.len();
    Ok((r, cols, rows.into_iter().flatten().collect()))
}

/// Parses a strictly integer matrix.
pub fn parse_int_matrix(context: &str, text: &str) -> AppResult<(usize, usize, Vec<i128>)> {
    let mut out = Vec::new();
    for row in rows_of(text) {
        let mut parsed = Vec::with_capacity(row.len());
        for tok in row {
            parsed.push(tok.parse::<i128>().map_err(|_| AppError::Parse {
                context: context.into(),
                msg: format!("not an integer: {tok:?}"),
            })?);
        }
        out.push(parsed);
    }
    shape_checked(context, out)
}

/// Parses a matrix that may hold real entries; reports whether every
/// entry was integral (so exact backends may use it).
pub fn parse_real_matrix(context: &str, text: &str) -> AppResult<(usize, usize, Vec<f64>, bool)> {
    let mut integral = true;
    let mut out = Vec::new();
    for row in rows_of(text) {
        let mut parsed = Vec::with_capacity(row.len());
        for tok in row {
            let v: f64 = tok.parse().map_err(|_| AppError::Parse {
                context: context.into(),
                msg: format!("not a number: {tok:?}"),
            })?;
            if !v.is_finite() {
                return Err(AppError::Parse {
                    context: context.into(),
                    msg: format!("non-finite entry: {tok:?}"),
                });
            }
            // Integral only while the value is exactly representable.
            integral &= v.fract() == 0.0 && v.abs() <= 2f64.powi(53);
            parsed.push(v);
        }
        out.push(parsed);
    }
    let (r, c, data) = shape_checked(context, out)?;
    Ok((r, c, data, integral))
}

pub fn format_int_csv(rows: usize, cols: usize, data: &[i128]) -> String {
    debug_assert_eq!(rows * cols, data.len());
    let mut out = String::new();
    for r in 0..rows {
        for c in 0..cols {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&data[r * cols + c].to_string());
        }
        out.push('\n');
    }
    out
}

/// Real CSV with 12 significant digits.
pub fn format_real_csv(rows: usize, cols: usize, data: &[f64]) -> String {
    debug_assert_eq!(rows * cols, data.len());
    let mut out = String::new();
    for r in 0..rows {
        for c in 0..cols {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:.11e}", data[r * cols + c]));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_matrix_round_trips() {
        let text = "1, 2, 3\n-4,5,6\n";
        let (r, c, data) = parse_int_matrix("t", text).unwrap();
        assert_eq!((r, c), (2, 3));
        assert_eq!(data, [1, 2, 3, -4, 5, 6]);
        let again = parse_int_matrix("t", &format_int_csv(r, c, &data)).unwrap();
        assert_eq!(again.2, data);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = parse_int_matrix("t", "1,2\n3\n").unwrap_err();
        assert!(format!("{err}").contains("row 2"));
    }

    #[test]
    fn real_matrix_flags_integrality() {
        let (_, _, _, integral) = parse_real_matrix("t", "1,2\n3,4\n").unwrap();
        assert!(integral);
        let (_, _, data, integral) = parse_real_matrix("t", "1.5,2\n3,4\n").unwrap();
        assert!(!integral);
        assert_eq!(data[0], 1.5);
        // 2.0 parses as the exact integer 2.
        let (_, _, _, integral) = parse_real_matrix("t", "2.0\n").unwrap();
        assert!(integral);
    }

    #[test]
    fn real_csv_keeps_twelve_significant_digits() {
        let v = [core::f64::consts::PI, -1.0 / 3.0];
        let text = format_real_csv(1, 2, &v);
        let (_, _, back, _) = parse_real_matrix("t", &text).unwrap();
        for (a, b) in back.iter().zip(v) {
            assert!((a - b).abs() <= 1e-11 * b.abs());
        }
    }

    #[test]
    fn empty_and_non_numeric_inputs_error() {
        assert!(parse_int_matrix("t", "\n\n").is_err());
        assert!(parse_int_matrix("t", "1,x\n").is_err());
        assert!(parse_real_matrix("t", "nan\n").is_err());
    }
}
