//! Axis values from `start:step:stop` ranges or comma lists.

use std::str::FromStr;

/// Parses `start:step:stop` (inclusive of `stop` when it lands on the grid),
/// a comma-separated list, or a single value. The result must be non-empty
/// and strictly increasing.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return Err(format!("range `{text}` must be start:step:stop"));
        };
        let (start, step, stop) = (num::<f64>(a)?, num::<f64>(b)?, num::<f64>(c)?);
        if step.is_nan() || step <= 0.0 {
            return Err(format!("range step must be positive in `{text}`"));
        }
        if stop < start {
            return Err(format!("range `{text}` has stop below start"));
        }
        // Small slack so 0.1-type steps still reach their stop value.
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| start + i as f64 * step).collect()
    } else {
        text.split(',')
            .map(num::<f64>)
            .collect::<Result<Vec<_>, _>>()?
    };
    check_increasing(&values, text)?;
    Ok(values)
}

/// Integer grid, e.g. pilot lengths or antenna counts.
pub fn parse_int_grid(text: &str) -> Result<Vec<usize>, String> {
    let values = parse_grid(text)?;
    values
        .iter()
        .map(|&v| {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(format!(
                    "`{text}` must contain non-negative integers, found {v}"
                ))
            }
        })
        .collect()
}

fn num<T: FromStr>(s: &str) -> Result<T, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", s.trim()))
}

fn check_increasing(values: &[f64], text: &str) -> Result<(), String> {
    if values.is_empty() {
        return Err("empty grid".into());
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(format!("grid `{text}` has non-finite values"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(format!("grid `{text}` must be strictly increasing"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(
            parse_grid("-10:5:20").unwrap(),
            vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0]
        );
        assert_eq!(parse_grid("0:2:5").unwrap(), vec![0.0, 2.0, 4.0]);
        assert_eq!(parse_grid("0:0.1:0.3").unwrap().len(), 4);
        assert_eq!(parse_grid("3").unwrap(), vec![3.0]);
        assert_eq!(parse_grid("1, 2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        assert_eq!(parse_int_grid("4:4:16").unwrap(), vec![4, 8, 12, 16]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(parse_grid("1:0:3").is_err());
        assert!(parse_grid("3:1:1").is_err());
        assert!(parse_grid("1,1").is_err());
        assert!(parse_grid("2,1").is_err());
        assert!(parse_grid("a").is_err());
        assert!(parse_grid("1:2").is_err());
        assert!(parse_int_grid("1.5").is_err());
    }
}
