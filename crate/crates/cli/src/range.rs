//! Grid syntax: `a:b:step`, a comma list, or a single number.

fn clean(v: f64) -> f64 {
    format!("{v:.11e}").parse().unwrap_or(v)
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty grid".into());
    }
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad number '{t}': {e}")))
            .map(|r| r.and_then(|v| if v.is_finite() { Ok(v) } else { Err(format!("non-finite value {v}")) }))
            .collect(),
        3 => {
            let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number '{t}': {e}"));
            let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if ![a, b, step].iter().all(|v| v.is_finite()) {
                return Err("range bounds must be finite".into());
            }
            if step == 0.0 || (b - a) * step < 0.0 {
                return Err(format!("step {step} does not lead from {a} to {b}"));
            }
            let span = (b - a) / step;
            let n = if (span - span.round()).abs() < 1e-9 { span.round() } else { span.floor() };
            if n > 1e6 {
                return Err(format!("range {s} has more than a million points"));
            }
            Ok((0..=n as usize).map(|i| clean(a + i as f64 * step)).collect())
        }
        _ => Err(format!("'{s}' is neither a:b:step nor a list")),
    }
}

/// A window `a:b` of ladder levels.
pub fn parse_window(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("window '{s}' is not a:b"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("bad window start: {e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("bad window end: {e}"))?;
    if b <= a {
        return Err(format!("window {a}:{b} is empty"));
    }
    Ok((a, b))
}

/// Comma-separated coordinates.
pub fn parse_coords(s: &str) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = parse_grid(s)?;
    if s.contains(':') {
        return Err(format!("'{s}' is a range, not a point"));
    }
    Ok(v)
}

pub fn parse_u32_list(s: &str) -> Result<Vec<u32>, String> {
    s.split(',').map(|t| t.trim().parse::<u32>().map_err(|e| format!("bad integer '{t}': {e}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_grid("-1:4:0.25").unwrap().len(), 21);
        assert_eq!(parse_grid("0:1:0.1").unwrap()[3], 0.3);
        assert_eq!(parse_grid("0:1:0.3").unwrap(), vec![0.0, 0.3, 0.6, 0.9]);
        assert_eq!(parse_grid("2:0:-1").unwrap(), vec![2.0, 1.0, 0.0]);
        assert_eq!(parse_grid("1").unwrap(), vec![1.0]);
        assert_eq!(parse_grid("0.5, 2").unwrap(), vec![0.5, 2.0]);
        for bad in ["", "0:1:0", "0:1:-1", "a", "0:1", "1:2:3:4", "nan"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn windows_and_points() {
        assert_eq!(parse_window("2:9").unwrap(), (2, 9));
        assert!(parse_window("3:3").is_err());
        assert_eq!(parse_coords("0.5,0.25").unwrap(), vec![0.5, 0.25]);
        assert!(parse_coords("0:1:0.5").is_err());
        assert_eq!(parse_u32_list("1,2,16").unwrap(), vec![1, 2, 16]);
    }

    proptest::proptest! {
        #[test]
        fn grids_hit_both_ends(a in -50i32..50, n in 1usize..200, step in 1u32..40) {
            let step = step as f64 / 8.0;
            let (lo, hi) = (a as f64 / 4.0, a as f64 / 4.0 + n as f64 * step);
            let g = parse_grid(&format!("{lo}:{hi}:{step}")).unwrap();
            proptest::prop_assert_eq!(g.len(), n + 1);
            proptest::prop_assert_eq!(g[0], lo);
            proptest::prop_assert!((g[n] - hi).abs() < 1e-9);
        }

        #[test]
        fn printed_numbers_parse_back(v in proptest::num::f64::NORMAL) {
            let back: f64 = crate::format::num(v).parse().unwrap();
            proptest::prop_assert!(((back - v) / v).abs() < 1e-11);
        }
    }
}
