//! Rank-based comparison statistics over algorithm × dataset matrices.

use std::io::{Read, Write};
use std::path::Path;

use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal};

use crate::error::{Error, Result};

/// Rectangular grid of aggregate results: one row per dataset, one column
/// per algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultMatrix {
    algorithms: Vec<String>,
    datasets: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl ResultMatrix {
    pub fn new(
        algorithms: Vec<String>,
        datasets: Vec<String>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if algorithms.len() < 2 {
            return Err(Error::Config("need at least two algorithms".into()));
        }
        if values.len() != datasets.len() {
            return Err(Error::Config(format!(
                "{} datasets but {} value rows",
                datasets.len(),
                values.len()
            )));
        }
        for (row, dataset) in values.iter().zip(&datasets) {
            if row.len() != algorithms.len() {
                return Err(Error::Config(format!(
                    "row '{dataset}' has {} cells, expected {}",
                    row.len(),
                    algorithms.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("row '{dataset}' has a missing cell")));
            }
        }
        Ok(ResultMatrix {
            algorithms,
            datasets,
            values,
        })
    }

    pub fn algorithms(&self) -> &[String] {
        &self.algorithms
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn column(&self, algorithm: &str) -> Option<Vec<f64>> {
        let idx = self.algorithms.iter().position(|a| a == algorithm)?;
        Some(self.values.iter().map(|row| row[idx]).collect())
    }

    /// CSV layout: header `dataset,<algo>,...`, one row per dataset.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Config(e.to_string()))?
            .clone();
        if headers.len() < 3 {
            return Err(Error::Config(
                "matrix needs a dataset column and at least two algorithms".into(),
            ));
        }
        let algorithms: Vec<String> = headers.iter().skip(1).map(String::from).collect();
        let mut datasets = Vec::new();
        let mut values = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Parse {
                line: i + 2,
                message: e.to_string(),
            })?;
            if record.len() != headers.len() {
                return Err(Error::Parse {
                    line: i + 2,
                    message: format!("expected {} columns, found {}", headers.len(), record.len()),
                });
            }
            datasets.push(record[0].to_string());
            let row: Vec<f64> = record
                .iter()
                .skip(1)
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| Error::Parse {
                        line: i + 2,
                        message: format!("'{v}' is not a number"),
                    })
                })
                .collect::<Result<_>>()?;
            values.push(row);
        }
        ResultMatrix::new(algorithms, datasets, values)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["dataset".to_string()];
        header.extend(self.algorithms.iter().cloned());
        w.write_record(&header)
            .map_err(|e| Error::Internal(e.to_string()))?;
        for (dataset, row) in self.datasets.iter().zip(&self.values) {
            let mut record = vec![dataset.clone()];
            record.extend(row.iter().map(|v| format!("{v:.3}")));
            w.write_record(&record)
                .map_err(|e| Error::Internal(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Friedman test outcome: per-algorithm average ranks and the test
/// statistics.
#[derive(Debug, Clone)]
pub struct FriedmanReport {
    pub algorithms: Vec<String>,
    /// Mean rank per algorithm. Ranks ascend with goodness: the best
    /// algorithm per dataset receives rank `k` when higher values are
    /// better, rank 1 otherwise — ties share the mean rank.
    pub average_ranks: Vec<f64>,
    pub higher_is_better: bool,
    pub chi_square: f64,
    pub chi_square_p: f64,
    pub f_statistic: f64,
    pub f_dof: (usize, usize),
    pub f_p: f64,
    /// Nemenyi critical difference at alpha = 0.05, when tabulated.
    pub nemenyi_cd: Option<f64>,
}

/// Friedman test with average ranks across datasets.
pub fn friedman(matrix: &ResultMatrix, higher_is_better: bool) -> Result<FriedmanReport> {
    let k = matrix.algorithms().len();
    let n = matrix.datasets().len();
    if k < 2 || n < 2 {
        return Err(Error::Config(format!(
            "friedman needs at least 2 algorithms and 2 datasets, got {k} x {n}"
        )));
    }
    let mut rank_sums = vec![0.0f64; k];
    for row in matrix.values() {
        let ranks = tied_ranks(row);
        for (sum, rank) in rank_sums.iter_mut().zip(&ranks) {
            *sum += rank;
        }
    }
    let average_ranks: Vec<f64> = rank_sums.iter().map(|s| s / n as f64).collect();

    let kf = k as f64;
    let nf = n as f64;
    let sum_sq: f64 = average_ranks.iter().map(|r| r * r).sum();
    let chi_square = 12.0 * nf / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0) * (kf + 1.0) / 4.0);
    let chi_square_p = 1.0
        - ChiSquared::new(kf - 1.0)
            .map_err(|e| Error::Internal(e.to_string()))?
            .cdf(chi_square.max(0.0));

    let denominator = nf * (kf - 1.0) - chi_square;
    let f_statistic = if denominator > 0.0 {
        (nf - 1.0) * chi_square / denominator
    } else {
        f64::INFINITY
    };
    let f_dof = (k - 1, (k - 1) * (n - 1));
    let f_p = if f_statistic.is_finite() {
        1.0 - FisherSnedecor::new(f_dof.0 as f64, f_dof.1 as f64)
            .map_err(|e| Error::Internal(e.to_string()))?
            .cdf(f_statistic)
    } else {
        0.0
    };

    Ok(FriedmanReport {
        algorithms: matrix.algorithms().to_vec(),
        average_ranks,
        higher_is_better,
        chi_square,
        chi_square_p,
        f_statistic,
        f_dof,
        f_p,
        nemenyi_cd: nemenyi_critical_difference(k, n),
    })
}

/// Nemenyi critical difference `q_alpha * sqrt(k (k+1) / (6 N))` at
/// alpha = 0.05, for `k` up to the tabulated 10.
pub fn nemenyi_critical_difference(k: usize, n: usize) -> Option<f64> {
    // Studentized range / sqrt(2) at alpha = 0.05, k = 2..=10.
    const Q05: [f64; 9] = [
        1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164,
    ];
    if !(2..=10).contains(&k) || n == 0 {
        return None;
    }
    let q = Q05[k - 2];
    Some(q * ((k * (k + 1)) as f64 / (6.0 * n as f64)).sqrt())
}

#[derive(Debug, Clone)]
pub struct WilcoxonReport {
    /// Pairs retained after dropping zero differences.
    pub n_used: usize,
    pub positive: usize,
    pub negative: usize,
    /// The smaller of the signed rank sums.
    pub t_statistic: f64,
    pub p_two_tailed: f64,
    /// True when the exact null distribution was enumerated (small n).
    pub exact: bool,
}

/// Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped; absolute differences are ranked with ties
/// sharing the mean rank. For ten or more retained pairs the two-tailed p
/// comes from the normal approximation with tie and continuity corrections,
/// below that from the exact enumeration of sign assignments.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonReport> {
    if a.len() != b.len() {
        return Err(Error::Config(
            "paired samples must have equal length".into(),
        ));
    }
    if a.len() < 5 {
        return Err(Error::Config("need at least 5 pairs".into()));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Err(Error::Config("all differences are zero".into()));
    }
    let n = diffs.len();
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = tied_ranks(&abs);
    let mut w_pos = 0.0;
    let mut w_neg = 0.0;
    let mut positive = 0;
    let mut negative = 0;
    for (d, r) in diffs.iter().zip(&ranks) {
        if *d > 0.0 {
            w_pos += r;
            positive += 1;
        } else {
            w_neg += r;
            negative += 1;
        }
    }
    let t = w_pos.min(w_neg);

    let (p, exact) = if n >= 10 {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let mut variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0;
        // tie correction: subtract sum(t^3 - t) / 48 over tie groups
        variance -= tie_correction(&abs) / 48.0;
        if variance <= 0.0 {
            return Err(Error::Config("degenerate variance (all ties)".into()));
        }
        let z = (t - mean + 0.5) / variance.sqrt();
        let normal = Normal::new(0.0, 1.0).map_err(|e| Error::Internal(e.to_string()))?;
        ((2.0 * normal.cdf(z)).min(1.0), false)
    } else {
        // Exact: enumerate every sign assignment of the ranks.
        let mut at_or_below = 0u64;
        let total = 1u64 << n;
        for mask in 0..total {
            let mut w = 0.0;
            for (i, r) in ranks.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    w += r;
                }
            }
            if w <= t + 1e-12 {
                at_or_below += 1;
            }
        }
        (((2.0 * at_or_below as f64) / total as f64).min(1.0), true)
    };

    Ok(WilcoxonReport {
        n_used: n,
        positive,
        negative,
        t_statistic: t,
        p_two_tailed: p,
        exact,
    })
}

/// Ascending ranks (1-based) with ties sharing the mean rank.
fn tied_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mean_rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mean_rank;
        }
        i = j + 1;
    }
    ranks
}

fn tie_correction(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut total = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        total += t * t * t - t;
        i = j + 1;
    }
    total
}
