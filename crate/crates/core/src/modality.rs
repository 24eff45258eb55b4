//! Modality sets and bistochastic transition-probability matrices.
//!
//! A modality set carries the `N` distinguishable outcomes of one measurement
//! setting; the transition matrix `Π = (p_{ij})` collects the probabilities
//! of landing in outcome `j` of a second setting when starting from outcome
//! `i` of the first. Validation enforces bistochasticity — both row and
//! column sums equal to 1 — because only then can the entrywise square roots
//! be candidates for the moduli of a unitary. After removing the `2N − 1`
//! independent normalization constraints, `(N − 1)²` free parameters remain.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::RealMatrix;

/// Default tolerance when validating externally supplied probabilities;
/// looser than the unitarity tolerance because inputs may come from
/// finite-sample estimates or text serialization.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-9;

/// Structured rejection from [`validate_bistochastic`], naming the first
/// violated constraint.
#[derive(Clone, Debug, PartialEq)]
pub enum ValidationError {
    ZeroDimension,
    NonFinite { row: usize, col: usize },
    NegativeEntry { row: usize, col: usize, value: f64 },
    EntryExceedsOne { row: usize, col: usize, value: f64 },
    RowSum { row: usize, sum: f64 },
    ColumnSum { col: usize, sum: f64 },
    NotSquare { n_rows: usize, n_cols: usize },
    DuplicateLabel { label: String },
    LabelCount { expected: usize, got: usize },
}

impl ValidationError {
    /// How far the offending quantity is from its admissible range.
    pub fn deficit(&self) -> f64 {
        match self {
            Self::NegativeEntry { value, .. } => -value,
            Self::EntryExceedsOne { value, .. } => value - 1.0,
            Self::RowSum { sum, .. } | Self::ColumnSum { sum, .. } => (sum - 1.0).abs(),
            _ => 0.0,
        }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ZeroDimension => write!(f, "dimension must be at least 1"),
            Self::NonFinite { row, col } => write!(f, "non-finite entry at ({row}, {col})"),
            Self::NegativeEntry { row, col, value } => {
                write!(f, "negative entry {value} at ({row}, {col})")
            }
            Self::EntryExceedsOne { row, col, value } => {
                write!(f, "entry {value} at ({row}, {col}) exceeds 1")
            }
            Self::RowSum { row, sum } => write!(f, "row {row} sums to {sum}, expected 1"),
            Self::ColumnSum { col, sum } => write!(f, "column {col} sums to {sum}, expected 1"),
            Self::NotSquare { n_rows, n_cols } => {
                write!(f, "matrix is {n_rows}x{n_cols}, expected square")
            }
            Self::DuplicateLabel { label } => write!(f, "duplicate modality label {label:?}"),
            Self::LabelCount { expected, got } => {
                write!(f, "expected {expected} labels, got {got}")
            }
        }
    }
}

impl core::error::Error for ValidationError {}

/// The `N` distinguishable outcomes of one measurement setting.
///
/// Labels are metadata only; all numerics work with indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModalitySet {
    labels: Vec<String>,
}

impl ModalitySet {
    pub fn new(labels: Vec<String>) -> Result<Self, ValidationError> {
        if labels.is_empty() {
            return Err(ValidationError::ZeroDimension);
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(ValidationError::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }
        Ok(Self { labels })
    }

    /// `prefix_0 .. prefix_{n-1}`.
    pub fn indexed(n: usize, prefix: &str) -> Result<Self, ValidationError> {
        if n == 0 {
            return Err(ValidationError::ZeroDimension);
        }
        let labels = (0..n)
            .map(|i| {
                let mut s = String::from(prefix);
                s.push('_');
                s.push_str(itoa(i).as_str());
                s
            })
            .collect();
        Ok(Self { labels })
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

fn itoa(mut v: usize) -> String {
    if v == 0 {
        return String::from("0");
    }
    let mut digits = Vec::new();
    while v > 0 {
        digits.push(b'0' + (v % 10) as u8);
        v /= 10;
    }
    digits.reverse();
    String::from_utf8(digits).expect("ascii digits")
}

/// Validated `N×N` transition-probability matrix between two modality sets.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMatrix {
    dimension: usize,
    entries: Vec<f64>,
    source_labels: Option<ModalitySet>,
    target_labels: Option<ModalitySet>,
}

impl ProbabilityMatrix {
    /// Crate-internal constructor for matrices that are bistochastic by
    /// construction (e.g. squared moduli of a unitary).
    pub(crate) fn new_unchecked(dimension: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), dimension * dimension);
        Self {
            dimension,
            entries,
            source_labels: None,
            target_labels: None,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dimension + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn source_labels(&self) -> Option<&ModalitySet> {
        self.source_labels.as_ref()
    }

    pub fn target_labels(&self) -> Option<&ModalitySet> {
        self.target_labels.as_ref()
    }

    /// Attaches modality labels; both sets must match the dimension.
    pub fn with_labels(
        mut self,
        source: Option<ModalitySet>,
        target: Option<ModalitySet>,
    ) -> Result<Self, ValidationError> {
        for set in [&source, &target].into_iter().flatten() {
            if set.dimension() != self.dimension {
                return Err(ValidationError::LabelCount {
                    expected: self.dimension,
                    got: set.dimension(),
                });
            }
        }
        self.source_labels = source;
        self.target_labels = target;
        Ok(self)
    }

    pub fn as_real_matrix(&self) -> RealMatrix {
        RealMatrix::from_fn(self.dimension, self.dimension, |i, j| self.get(i, j))
    }

    /// Re-checks the bistochasticity constraints at the given tolerance.
    pub fn check(&self, tol: f64) -> Result<(), ValidationError> {
        check_entries(self.dimension, &self.entries, tol)
    }
}

fn check_entries(n: usize, entries: &[f64], tol: f64) -> Result<(), ValidationError> {
    for (k, &v) in entries.iter().enumerate() {
        let (row, col) = (k / n, k % n);
        if !v.is_finite() {
            return Err(ValidationError::NonFinite { row, col });
        }
        if v < -tol {
            return Err(ValidationError::NegativeEntry { row, col, value: v });
        }
        if v > 1.0 + tol {
            return Err(ValidationError::EntryExceedsOne { row, col, value: v });
        }
    }
    for row in 0..n {
        let sum: f64 = entries[row * n..(row + 1) * n].iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(ValidationError::RowSum { row, sum });
        }
    }
    for col in 0..n {
        let sum: f64 = (0..n).map(|row| entries[row * n + col]).sum();
        if (sum - 1.0).abs() > tol {
            return Err(ValidationError::ColumnSum { col, sum });
        }
    }
    Ok(())
}

/// Validates a raw square array as a bistochastic probability matrix.
///
/// Checks run in a fixed order — finiteness, entry range, row sums, column
/// sums — and the first violation beyond `tol` is reported with its index
/// and magnitude. Validation is idempotent: a matrix that validates once
/// validates again to an equal value.
pub fn validate_bistochastic(
    raw: &RealMatrix,
    tol: f64,
) -> Result<ProbabilityMatrix, ValidationError> {
    if !raw.is_square() {
        return Err(ValidationError::NotSquare {
            n_rows: raw.n_rows(),
            n_cols: raw.n_cols(),
        });
    }
    let n = raw.n_rows();
    check_entries(n, raw.entries(), tol)?;
    Ok(ProbabilityMatrix {
        dimension: n,
        entries: raw.entries().to_vec(),
        source_labels: None,
        target_labels: None,
    })
}

/// Number of free parameters in an `n×n` bistochastic matrix: `(n − 1)²`.
pub fn independent_parameter_count(n: usize) -> Result<usize, ValidationError> {
    if n == 0 {
        return Err(ValidationError::ZeroDimension);
    }
    Ok((n - 1) * (n - 1))
}

/// The `2n × n²` linear system of row-sum and column-sum constraints on the
/// entries of an `n×n` matrix, row-major in the unknowns.
pub fn constraint_matrix(n: usize) -> Result<RealMatrix, ValidationError> {
    if n == 0 {
        return Err(ValidationError::ZeroDimension);
    }
    Ok(RealMatrix::from_fn(2 * n, n * n, |c, e| {
        let (row, col) = (e / n, e % n);
        if c < n {
            // Constraint c: sum of row c.
            if row == c {
                1.0
            } else {
                0.0
            }
        } else if col == c - n {
            // Constraint n + c': sum of column c'.
            1.0
        } else {
            0.0
        }
    }))
}

/// Numerical rank of the normalization constraint system; equals `2n − 1`
/// (the row-sum and column-sum totals coincide), so that
/// `n² − rank = (n − 1)²` matches [`independent_parameter_count`].
pub fn normalization_constraint_rank(n: usize) -> Result<usize, ValidationError> {
    let constraints = constraint_matrix(n)?;
    Ok(crate::linalg::numerical_rank(&constraints, 1e-10))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn identity_is_valid() {
        let pi = validate_bistochastic(&RealMatrix::identity(3), 1e-12).unwrap();
        assert_eq!(pi.dimension(), 3);
        assert_eq!(pi.get(0, 0), 1.0);
        assert_eq!(pi.get(0, 1), 0.0);
    }

    #[test]
    fn flat_third_matrix_is_valid() {
        let flat = RealMatrix::from_fn(3, 3, |_, _| 1.0 / 3.0);
        assert!(validate_bistochastic(&flat, 1e-12).is_ok());
    }

    #[test]
    fn row_sum_violation_is_named() {
        let raw = RealMatrix::new(2, 2, vec![0.9, 0.0, 0.1, 1.0]).unwrap();
        let err = validate_bistochastic(&raw, 1e-9).unwrap_err();
        assert_eq!(
            err,
            ValidationError::RowSum {
                row: 0,
                sum: 0.9
            }
        );
        assert!((err.deficit() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn entry_range_violations_are_named() {
        let raw = RealMatrix::new(2, 2, vec![-0.2, 1.2, 1.2, -0.2]).unwrap();
        assert_eq!(
            validate_bistochastic(&raw, 1e-9).unwrap_err(),
            ValidationError::NegativeEntry {
                row: 0,
                col: 0,
                value: -0.2
            }
        );
        let raw = RealMatrix::new(1, 1, vec![1.5]).unwrap();
        assert!(matches!(
            validate_bistochastic(&raw, 1e-9).unwrap_err(),
            ValidationError::EntryExceedsOne { .. }
        ));
    }

    #[test]
    fn column_sum_violation_is_named() {
        // Rows sum to 1, columns do not.
        let raw = RealMatrix::new(2, 2, vec![0.7, 0.3, 0.5, 0.5]).unwrap();
        assert!(matches!(
            validate_bistochastic(&raw, 1e-9).unwrap_err(),
            ValidationError::ColumnSum { col: 0, .. }
        ));
    }

    #[test]
    fn non_square_rejected() {
        let raw = RealMatrix::zeros(2, 3);
        assert!(matches!(
            validate_bistochastic(&raw, 1e-9).unwrap_err(),
            ValidationError::NotSquare { .. }
        ));
    }

    #[test]
    fn validation_is_idempotent() {
        let flat = RealMatrix::from_fn(4, 4, |_, _| 0.25);
        let once = validate_bistochastic(&flat, 1e-12).unwrap();
        let twice = validate_bistochastic(&once.as_real_matrix(), 1e-12).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn parameter_count_examples() {
        assert_eq!(independent_parameter_count(1).unwrap(), 0);
        assert_eq!(independent_parameter_count(2).unwrap(), 1);
        assert_eq!(independent_parameter_count(3).unwrap(), 4);
        assert!(independent_parameter_count(0).is_err());
    }

    #[test]
    fn constraint_rank_examples() {
        assert_eq!(normalization_constraint_rank(1).unwrap(), 1);
        assert_eq!(normalization_constraint_rank(2).unwrap(), 3);
        assert_eq!(normalization_constraint_rank(3).unwrap(), 5);
    }

    #[test]
    fn rank_defect_matches_parameter_count_up_to_16() {
        for n in 1..=16usize {
            let rank = normalization_constraint_rank(n).unwrap();
            assert_eq!(rank, 2 * n - 1, "n = {n}");
            assert_eq!(
                n * n - rank,
                independent_parameter_count(n).unwrap(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn labels_must_be_unique_and_sized() {
        assert!(ModalitySet::new(vec!["a".to_string(), "a".to_string()]).is_err());
        let set = ModalitySet::indexed(3, "b").unwrap();
        assert_eq!(set.labels()[2], "b_2");
        let pi = validate_bistochastic(&RealMatrix::identity(2), 1e-12).unwrap();
        assert!(pi
            .clone()
            .with_labels(Some(ModalitySet::indexed(3, "b").unwrap()), None)
            .is_err());
        let labeled = pi
            .with_labels(
                Some(ModalitySet::indexed(2, "b").unwrap()),
                Some(ModalitySet::indexed(2, "c").unwrap()),
            )
            .unwrap();
        assert_eq!(labeled.source_labels().unwrap().dimension(), 2);
    }
}
