//! Reading samples and parsing list-valued flags.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use kdeavg::Sample;

/// Parses one number per line; blank lines are skipped.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .with_context(|| format!("line {}: cannot parse {line:?} as a number", i + 1))?;
        if !v.is_finite() {
            bail!("line {}: value {line:?} is not finite", i + 1);
        }
        values.push(v);
    }
    Ok(values)
}

pub fn read_sample(path: &Path) -> Result<Sample> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let values = parse_values(&text).with_context(|| format!("in {}", path.display()))?;
    if values.len() < 4 {
        bail!(
            "{}: need at least 4 observations, got {}",
            path.display(),
            values.len()
        );
    }
    Ok(Sample::new(values)?)
}

/// Comma separated list of names or numbers.
pub fn parse_list<T>(raw: &str) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: std::error::Error + Send + Sync + 'static,
{
    let items = raw
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .with_context(|| format!("invalid list entry {s:?}"))
        })
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        bail!("empty list {raw:?}");
    }
    Ok(items)
}

/// Evaluation grid given as `lo:hi:points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn xs(&self) -> Vec<f64> {
        kdeavg::numeric::linspace(self.lo, self.hi, self.points)
    }
}

impl FromStr for GridSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, points] = parts.as_slice() else {
            bail!("grid must look like lo:hi:points, got {s:?}");
        };
        let lo: f64 = lo
            .trim()
            .parse()
            .with_context(|| format!("grid lower bound {lo:?}"))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .with_context(|| format!("grid upper bound {hi:?}"))?;
        let points: usize = points
            .trim()
            .parse()
            .with_context(|| format!("grid points {points:?}"))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            bail!("grid bounds must be finite with lo < hi, got {lo}:{hi}");
        }
        if points < 2 {
            bail!("grid needs at least 2 points, got {points}");
        }
        Ok(Self { lo, hi, points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kdeavg::bench::{Density, Method};

    #[test]
    fn blank_lines_are_ignored() {
        assert_eq!(
            parse_values("1\n\n 2.5 \n-3e-1\n").unwrap(),
            vec![1.0, 2.5, -0.3]
        );
    }

    #[test]
    fn bad_line_is_named() {
        let err = parse_values("1\n2\n3\nabc\n").unwrap_err();
        assert!(format!("{err:#}").contains("line 4"), "{err:#}");
        let err = parse_values("1\n\ninf\n").unwrap_err();
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn grid_spec() {
        let g: GridSpec = "-3:3:7".parse().unwrap();
        assert_eq!(g.xs(), vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert!("0:1:1".parse::<GridSpec>().is_err());
        assert!("1:0:10".parse::<GridSpec>().is_err());
        assert!("0:1".parse::<GridSpec>().is_err());
    }

    #[test]
    fn lists() {
        let ms: Vec<Method> = parse_list("nrd0, AV").unwrap();
        assert_eq!(ms, vec![Method::Nrd0, Method::Av]);
        let ns: Vec<usize> = parse_list("200,1000").unwrap();
        assert_eq!(ns, vec![200, 1000]);
        let err = parse_list::<Density>("Norm,Laplace").unwrap_err();
        assert!(format!("{err:#}").contains("Mix03"), "{err:#}");
        assert!(parse_list::<usize>(" , ").is_err());
    }
}
