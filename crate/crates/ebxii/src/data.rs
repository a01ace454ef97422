//! Data sets: loading, reflection and the bundled samples.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// A labelled univariate sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
    /// Where the numbers came from, plus any transforms applied.
    pub provenance: String,
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{0}: no data values")]
    Empty(PathBuf),
}

/// Reads one number per line, or field `column` (0-based) of comma-separated
/// rows. Blank lines and lines starting with `#` are skipped. A leading
/// `# source:` comment, if present, becomes the provenance.
pub fn load_series(path: impl AsRef<Path>, column: Option<usize>) -> Result<Series, DataError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut series = parse_series(&text, column).map_err(|(line, msg)| DataError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    })?;
    if series.values.is_empty() {
        return Err(DataError::Empty(path.to_path_buf()));
    }
    series.label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    if series.provenance.is_empty() {
        series.provenance = path.display().to_string();
    }
    Ok(series)
}

/// Parses the text of a data file. Errors carry the 1-based line number.
pub fn parse_series(text: &str, column: Option<usize>) -> Result<Series, (usize, String)> {
    let mut values = Vec::new();
    let mut provenance = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(src) = comment.trim().strip_prefix("source:") {
                if provenance.is_empty() {
                    provenance = src.trim().to_string();
                }
            }
            continue;
        }
        let field = match column {
            None => line,
            Some(k) => line
                .split(',')
                .nth(k)
                .ok_or_else(|| (i + 1, format!("no column {k} in '{line}'")))?
                .trim(),
        };
        let v: f64 = field
            .parse()
            .map_err(|_| (i + 1, format!("'{field}' is not a number")))?;
        if !v.is_finite() {
            return Err((i + 1, format!("'{field}' is not finite")));
        }
        values.push(v);
    }
    Ok(Series {
        label: String::new(),
        values,
        provenance,
    })
}

/// Outcome of [`reflect_transform`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reflected {
    pub series: Series,
    /// How many outputs are `<= 0`.
    pub non_positive: usize,
}

impl Reflected {
    pub fn warning(&self) -> Option<String> {
        (self.non_positive > 0).then(|| {
            format!(
                "{} of {} reflected values are not positive",
                self.non_positive,
                self.series.values.len()
            )
        })
    }
}

/// Maps every value `x` to `pivot - x`.
pub fn reflect_transform(series: &Series, pivot: f64) -> Reflected {
    let values: Vec<f64> = series.values.iter().map(|x| pivot - x).collect();
    let non_positive = values.iter().filter(|v| **v <= 0.0).count();
    Reflected {
        series: Series {
            label: series.label.clone(),
            values,
            provenance: format!("{}; reflected as {pivot} - x", series.provenance),
        },
        non_positive,
    }
}

/// Directory holding the bundled data files.
pub fn bundled_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

/// The bundled glass-fibre strength sample.
pub fn strengths() -> Result<Series, DataError> {
    load_series(bundled_dir().join("strengths.txt"), None)
}

/// Location of the roller-height data: `EBXII_ROLLER_DATA` if set, else the
/// bundled path. `None` when the file is absent.
pub fn roller_path() -> Option<PathBuf> {
    let path = std::env::var_os("EBXII_ROLLER_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| bundled_dir().join("roller.txt"));
    path.is_file().then_some(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skips_comments_and_blanks() {
        let s = parse_series("1.0\n2.5\n# note\n3\n", None).unwrap();
        assert_eq!(s.values, vec![1.0, 2.5, 3.0]);
        let s = parse_series("\n  \n4e-1\n", None).unwrap();
        assert_eq!(s.values, vec![0.4]);
    }

    #[test]
    fn reports_the_bad_line() {
        assert_eq!(parse_series("abc\n", None).unwrap_err().0, 1);
        assert_eq!(parse_series("1\n# x\n1,5\n", None).unwrap_err().0, 3);
        assert_eq!(parse_series("1\ninf\n", None).unwrap_err().0, 2);
    }

    #[test]
    fn picks_a_column() {
        let s = parse_series("# source: here\n1,2.5\n3, 4\n", Some(1)).unwrap();
        assert_eq!(s.values, vec![2.5, 4.0]);
        assert_eq!(s.provenance, "here");
        assert!(parse_series("1,2\n", Some(2)).is_err());
    }

    #[test]
    fn reflection() {
        let s = Series {
            label: "x".into(),
            values: vec![2.3],
            provenance: String::new(),
        };
        let r = reflect_transform(&s, 6.0);
        assert!((r.series.values[0] - 3.7).abs() < 1e-15);
        assert!(r.warning().is_none());

        let s = Series {
            values: vec![1.0, 2.0],
            ..s
        };
        let r = reflect_transform(&s, 0.0);
        assert_eq!(r.series.values, vec![-1.0, -2.0]);
        assert_eq!(r.non_positive, 2);
        assert!(r.warning().is_some());
    }

    #[test]
    fn empty_file_is_an_error() {
        let dir = std::env::temp_dir().join(format!("ebxii-empty-{}", std::process::id()));
        fs::write(&dir, "# only a comment\n").unwrap();
        assert!(matches!(load_series(&dir, None), Err(DataError::Empty(_))));
        fs::remove_file(&dir).unwrap();
        assert!(matches!(
            load_series("/nonexistent/x.txt", None),
            Err(DataError::Io { .. })
        ));
    }

    #[test]
    fn bundled_strengths() {
        let s = strengths().unwrap();
        assert_eq!(s.values.len(), 63);
        assert!(s.provenance.contains("Smith"));
    }
}
