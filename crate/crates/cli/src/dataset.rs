//! `x,y[,w]` tables with an optional single header row.

use std::path::Path;

use hpspline::FitProblem;

use crate::error::{CliError, CliResult};

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

pub fn read_dataset(path: &Path) -> CliResult<FitProblem> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_dataset(&text, path)
}

/// Parses dataset text; `origin` is only used in error messages.
pub fn parse_dataset(text: &str, origin: &Path) -> CliResult<FitProblem> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let (mut x, mut y, mut w) = (Vec::new(), Vec::new(), Vec::new());
    let mut columns = None;
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(origin, line, e.to_string())
        })?;
        let line = record.position().map_or(index as u64 + 1, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(values) => values,
            Err(_) if index == 0 => continue,
            Err(e) => return Err(parse_error(origin, line, format!("not a number: {e}"))),
        };
        if !(2..=3).contains(&values.len()) {
            return Err(parse_error(
                origin,
                line,
                format!("expected 2 or 3 columns (x, y[, w]), found {}", values.len()),
            ));
        }
        if *columns.get_or_insert(values.len()) != values.len() {
            return Err(parse_error(origin, line, "inconsistent column count"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(parse_error(origin, line, "non-finite value"));
        }
        if let Some(&prev) = x.last() {
            if values[0] <= prev {
                return Err(parse_error(
                    origin,
                    line,
                    format!("x = {} does not increase (previous {prev})", values[0]),
                ));
            }
        }
        if values.len() == 3 && values[2] <= 0.0 {
            return Err(parse_error(origin, line, format!("weight {} must be positive", values[2])));
        }
        x.push(values[0]);
        y.push(values[1]);
        if values.len() == 3 {
            w.push(values[2]);
        }
    }
    if x.len() < 2 {
        return Err(parse_error(origin, 0, format!("need at least 2 data rows, found {}", x.len())));
    }
    let problem = if w.is_empty() {
        FitProblem::new(x, y)
    } else {
        FitProblem::with_weights(x, y, w)
    };
    Ok(problem?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> CliResult<FitProblem> {
        parse_dataset(text, Path::new("t.csv"))
    }

    #[test]
    fn header_and_weights() {
        let p = parse("x,y,w\n0,1,2\n0.5,2,1\n1,3,1\n").unwrap();
        assert_eq!(p.sites(), &[0.0, 0.5, 1.0]);
        assert_eq!(p.weights(), &[2.0, 1.0, 1.0]);
    }

    #[test]
    fn no_header() {
        let p = parse("0, 1\n1, 2\n").unwrap();
        assert!(p.unit_weights());
    }

    #[test]
    fn reports_line_numbers() {
        match parse("x,y\n0,1\n0.5,abc\n") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse("0,1\n1,2\n0.5,3\n") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse("0,1\n1,2,-1\n") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn second_header_is_an_error() {
        assert!(matches!(parse("x,y\nx,y\n0,1\n1,2\n"), Err(CliError::Parse { line: 2, .. })));
    }

    #[test]
    fn too_short() {
        assert!(parse("x,y\n0,1\n").is_err());
    }
}
