//! CSV rendering: RFC 4180 quoting, LF line endings, 17 significant digits.

use crate::error::CliError;

/// Formats a real with 17 significant digits; non-finite values as `inf`,
/// `-inf` or `nan`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn render(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io {
        path: None,
        source: e.into(),
    };
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io {
        path: None,
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parses `start:stop:step` into an evenly spaced grid including `stop`
/// when it lies on the grid.
pub fn parse_grid(flag: &str, spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::validation(
            flag,
            format!("{spec:?} is not start:stop:step"),
        ));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| CliError::validation(flag, format!("{p:?} is not a finite number")))?;
    }
    let [start, stop, step] = v;
    if step <= 0.0 {
        return Err(CliError::validation(flag, "step must be > 0"));
    }
    if stop < start {
        return Err(CliError::validation(flag, "stop must be >= start"));
    }
    let count = ((stop - start) / step + 1e-9).floor() + 1.0;
    if count > 1e6 {
        return Err(CliError::validation(
            flag,
            format!("{count} grid points exceed the limit of 1e6"),
        ));
    }
    Ok((0..count as usize)
        .map(|i| start + i as f64 * step)
        .collect())
}

/// Parses a comma-separated list.
pub fn parse_list<T: std::str::FromStr>(flag: &str, spec: &str) -> Result<Vec<T>, CliError> {
    let items: Result<Vec<T>, _> = spec
        .split(',')
        .map(|s| {
            s.trim().parse::<T>().map_err(|_| {
                CliError::validation(flag, format!("{:?} is not a valid entry", s.trim()))
            })
        })
        .collect();
    let items = items?;
    if items.is_empty() {
        return Err(CliError::validation(flag, "empty list"));
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.5), "5.0000000000000000e-1");
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn grids() {
        assert_eq!(
            parse_grid("--g", "0:1:0.25").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!(parse_grid("--g", "0:1:0.1").unwrap().len(), 11);
        assert_eq!(parse_grid("--g", "0.5:0.5:1").unwrap(), vec![0.5]);
        assert!(parse_grid("--g", "0:1").is_err());
        assert!(parse_grid("--g", "1:0:0.1").is_err());
        assert!(parse_grid("--g", "0:1:0").is_err());
    }

    #[test]
    fn quoting_and_line_endings() {
        let s = render(&["a", "b"], &[vec!["x,y".into(), "1".into()]]).unwrap();
        assert_eq!(s, "a,b\n\"x,y\",1\n");
    }

    #[test]
    fn lists() {
        assert_eq!(
            parse_list::<usize>("--n-list", "1, 2,3").unwrap(),
            vec![1, 2, 3]
        );
        assert!(parse_list::<usize>("--n-list", "1,x").is_err());
    }
}
