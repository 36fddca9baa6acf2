use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Measurement level of the ratings, which fixes the distance function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// δ² = 1 when the two values differ.
    Nominal,
    /// δ² = (v - v')².
    Interval,
}

impl Level {
    fn distance(&self, a: f64, b: f64) -> f64 {
        match self {
            Level::Nominal => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            Level::Interval => (a - b) * (a - b),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Nominal => "nominal",
            Level::Interval => "interval",
        })
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nominal" => Ok(Level::Nominal),
            "interval" => Ok(Level::Interval),
            other => Err(Error::invalid(format!("unknown level {other:?}"))),
        }
    }
}

/// Annotators by units. `cells[a][u]` is annotator `a`'s value for unit `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityMatrix {
    pub annotators: Vec<String>,
    pub units: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
}

impl ReliabilityMatrix {
    pub fn new(annotators: Vec<String>, units: Vec<String>, cells: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if cells.len() != annotators.len() {
            return Err(Error::invalid(format!(
                "{} annotators but {} rows",
                annotators.len(),
                cells.len()
            )));
        }
        if let Some(row) = cells.iter().find(|row| row.len() != units.len()) {
            return Err(Error::invalid(format!(
                "row of length {} for {} units",
                row.len(),
                units.len()
            )));
        }
        if cells.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite rating"));
        }
        Ok(ReliabilityMatrix {
            annotators,
            units,
            cells,
        })
    }

    /// Builds a matrix with generated labels, mostly for tests.
    pub fn from_rows(cells: Vec<Vec<Option<f64>>>) -> Result<Self> {
        let n_units = cells.first().map_or(0, Vec::len);
        let annotators = (0..cells.len()).map(|i| format!("a{i}")).collect();
        let units = (0..n_units).map(|i| format!("u{i}")).collect();
        ReliabilityMatrix::new(annotators, units, cells)
    }

    pub fn unit_values(&self, unit: usize) -> impl Iterator<Item = f64> + '_ {
        self.cells.iter().filter_map(move |row| row[unit])
    }

    /// Units rated by at least two annotators.
    pub fn pairable_units(&self) -> usize {
        (0..self.units.len())
            .filter(|&u| self.unit_values(u).count() >= 2)
            .count()
    }

    /// Maps every value to 1 when it is at least `cut`, else 0.
    pub fn thresholded(&self, cut: f64) -> ReliabilityMatrix {
        let cells = self
            .cells
            .iter()
            .map(|row| row.iter().map(|v| v.map(|x| if x >= cut { 1.0 } else { 0.0 })).collect())
            .collect();
        ReliabilityMatrix {
            annotators: self.annotators.clone(),
            units: self.units.clone(),
            cells,
        }
    }
}

/// Krippendorff's alpha computed from the coincidence matrix.
///
/// Units with fewer than two values are ignored. Fails with
/// [`Error::InsufficientData`] when there is nothing to pair or when the
/// expected disagreement is zero. Returns exactly 1.0 when no disagreement
/// is observed.
pub fn alpha(matrix: &ReliabilityMatrix, level: Level) -> Result<f64> {
    if matrix.annotators.len() < 2 {
        return Err(Error::InsufficientData("fewer than two annotators".into()));
    }
    let mut values: Vec<f64> = matrix.cells.iter().flatten().flatten().copied().collect();
    values.sort_by(f64::total_cmp);
    values.dedup_by(|a, b| a.total_cmp(b).is_eq());
    let index = |v: f64| values.binary_search_by(|x| x.total_cmp(&v)).expect("value present");

    let k = values.len();
    let mut coincidence = vec![vec![0.0f64; k]; k];
    let mut pairable = 0usize;
    for u in 0..matrix.units.len() {
        let in_unit: Vec<usize> = matrix.unit_values(u).map(index).collect();
        let m = in_unit.len();
        if m < 2 {
            continue;
        }
        pairable += 1;
        let w = 1.0 / (m - 1) as f64;
        for (i, &c) in in_unit.iter().enumerate() {
            for (j, &d) in in_unit.iter().enumerate() {
                if i != j {
                    coincidence[c][d] += w;
                }
            }
        }
    }
    if pairable == 0 {
        return Err(Error::InsufficientData("no unit has two ratings".into()));
    }

    let marginals: Vec<f64> = coincidence.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = marginals.iter().sum();
    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..k {
        for d in 0..k {
            let delta = level.distance(values[c], values[d]);
            observed += coincidence[c][d] * delta;
            expected += marginals[c] * marginals[d] * delta;
        }
    }
    observed /= n;
    expected /= n * (n - 1.0);
    if expected == 0.0 {
        return Err(Error::InsufficientData("no variation in the ratings".into()));
    }
    if observed == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - observed / expected)
}
