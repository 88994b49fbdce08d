//! The bistochastic matrix of squared Clebsch-Gordan coefficients and the
//! probability distributions its columns carry.
//!
//! Rows are (m1, m2) pairs in lexicographically descending order; columns
//! are (j, m) with j descending from j1+j2 to |j1-j2| and m descending
//! within each j. That fixed order makes matrix dumps reproducible
//! byte-for-byte. Zero entries are kept in the matrix (row/column sums
//! need them) but omitted from distribution supports.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cg::{block_columns, block_rows, clebsch_gordan, triangle, CouplingLabel};
use crate::exact::{check_pair, check_spin, valid_pair, HalfInt};
use crate::{Error, Result};

/// Identifies the CG column a joint distribution came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColumnLabel {
    pub j1: HalfInt,
    pub j2: HalfInt,
    pub j: HalfInt,
    pub m: HalfInt,
}

/// N x N matrix of squared coefficients, N = (2j1+1)(2j2+1), with every
/// row and column summing to exactly 1.
#[derive(Clone, Debug)]
pub struct BistochasticMatrix {
    j1: HalfInt,
    j2: HalfInt,
    rows: Vec<(HalfInt, HalfInt)>,
    cols: Vec<(HalfInt, HalfInt)>,
    row_lookup: BTreeMap<(i64, i64), usize>,
    col_lookup: BTreeMap<(i64, i64), usize>,
    entries: Vec<Vec<BigRational>>,
}

impl BistochasticMatrix {
    pub fn j1(&self) -> HalfInt {
        self.j1
    }
    pub fn j2(&self) -> HalfInt {
        self.j2
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, r: usize, s: usize) -> &BigRational {
        &self.entries[r][s]
    }

    /// r -> (m1, m2)
    pub fn row_label(&self, r: usize) -> (HalfInt, HalfInt) {
        self.rows[r]
    }

    /// s -> (j, m)
    pub fn col_label(&self, s: usize) -> (HalfInt, HalfInt) {
        self.cols[s]
    }

    /// (m1, m2) -> r
    pub fn row_of(&self, m1: HalfInt, m2: HalfInt) -> Option<usize> {
        self.row_lookup.get(&(m1.twice(), m2.twice())).copied()
    }

    /// (j, m) -> s
    pub fn col_of(&self, j: HalfInt, m: HalfInt) -> Option<usize> {
        self.col_lookup.get(&(j.twice(), m.twice())).copied()
    }

    pub fn row_labels(&self) -> &[(HalfInt, HalfInt)] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[(HalfInt, HalfInt)] {
        &self.cols
    }
}

/// Builds the squared-coefficient matrix for a (j1, j2) block and checks
/// bistochasticity at construction: every row and column sums to exactly 1.
pub fn build_bistochastic(j1: HalfInt, j2: HalfInt) -> Result<BistochasticMatrix> {
    check_spin(j1)?;
    check_spin(j2)?;
    let rows = block_rows(j1, j2);
    let cols = block_columns(j1, j2);
    debug_assert_eq!(rows.len(), cols.len());

    let entries: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|&(m1, m2)| {
            cols.iter()
                .map(|&(j, m)| {
                    let label = CouplingLabel::new(j1, m1, j2, m2, j, m)
                        .expect("block labels are pair-valid");
                    clebsch_gordan(&label).squared()
                })
                .collect()
        })
        .collect();

    for (r, row) in entries.iter().enumerate() {
        let sum: BigRational = row.iter().sum();
        assert!(
            sum.is_one(),
            "row {r} of the ({j1}, {j2}) block sums to {sum}, not 1"
        );
    }
    for s in 0..cols.len() {
        let sum: BigRational = entries.iter().map(|row| &row[s]).sum();
        assert!(
            sum.is_one(),
            "column {s} of the ({j1}, {j2}) block sums to {sum}, not 1"
        );
    }

    let row_lookup = rows
        .iter()
        .enumerate()
        .map(|(r, &(m1, m2))| ((m1.twice(), m2.twice()), r))
        .collect();
    let col_lookup = cols
        .iter()
        .enumerate()
        .map(|(s, &(j, m))| ((j.twice(), m.twice()), s))
        .collect();

    Ok(BistochasticMatrix {
        j1,
        j2,
        rows,
        cols,
        row_lookup,
        col_lookup,
        entries,
    })
}

/// Exact probability distribution over (m1, m2) pairs. CG-derived joints
/// carry their column label and have support on the line m1 + m2 = m;
/// synthetic joints (for independence or delta tests) carry no label.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    column: Option<ColumnLabel>,
    support: Vec<((HalfInt, HalfInt), BigRational)>,
}

impl JointDistribution {
    /// Builds a synthetic joint from explicit support points. Probabilities
    /// must be nonnegative and sum to exactly 1; zero points are dropped.
    pub fn from_support(points: Vec<((HalfInt, HalfInt), BigRational)>) -> Result<Self> {
        let mut total = BigRational::zero();
        for (label, p) in &points {
            if p.is_negative() {
                return Err(Error::InvalidDistribution {
                    reason: format!("negative probability {p} at ({}, {})", label.0, label.1),
                });
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution {
                reason: format!("probabilities sum to {total}, not 1"),
            });
        }
        Ok(JointDistribution {
            column: None,
            support: points.into_iter().filter(|(_, p)| !p.is_zero()).collect(),
        })
    }

    pub fn column(&self) -> Option<ColumnLabel> {
        self.column
    }

    pub fn support(&self) -> &[((HalfInt, HalfInt), BigRational)] {
        &self.support
    }

    pub fn probabilities(&self) -> impl Iterator<Item = &BigRational> {
        self.support.iter().map(|(_, p)| p)
    }
}

/// Exact probability distribution over single half-integer labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityDistribution {
    support: Vec<(HalfInt, BigRational)>,
}

impl ProbabilityDistribution {
    pub fn from_support(points: Vec<(HalfInt, BigRational)>) -> Result<Self> {
        let mut total = BigRational::zero();
        for (label, p) in &points {
            if p.is_negative() {
                return Err(Error::InvalidDistribution {
                    reason: format!("negative probability {p} at {label}"),
                });
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution {
                reason: format!("probabilities sum to {total}, not 1"),
            });
        }
        Ok(ProbabilityDistribution {
            support: points.into_iter().filter(|(_, p)| !p.is_zero()).collect(),
        })
    }

    pub fn support(&self) -> &[(HalfInt, BigRational)] {
        &self.support
    }

    pub fn probabilities(&self) -> impl Iterator<Item = &BigRational> {
        self.support.iter().map(|(_, p)| p)
    }
}

/// Joint distribution of (m1, m2) for a fixed column (j, m):
/// p(m1, m2) = |<j1 m1 j2 m2|j m>|^2, zero points omitted.
pub fn column_joint(j1: HalfInt, j2: HalfInt, j: HalfInt, m: HalfInt) -> Result<JointDistribution> {
    check_spin(j1)?;
    check_spin(j2)?;
    check_pair(j, m)?;
    if !triangle(j1, j2, j) {
        return Err(Error::NonAddressableColumn { j1, j2, j, m });
    }

    let mut support = Vec::new();
    let mut total = BigRational::zero();
    let mut tm1 = j1.twice();
    while tm1 >= -j1.twice() {
        let m1 = HalfInt::from_twice(tm1);
        let m2 = m - m1;
        if valid_pair(j2, m2) {
            let label = CouplingLabel::new(j1, m1, j2, m2, j, m)?;
            let p = clebsch_gordan(&label).squared();
            if !p.is_zero() {
                total += &p;
                support.push(((m1, m2), p));
            }
        }
        tm1 -= 2;
    }
    assert!(
        total.is_one(),
        "column ({j}, {m}) probabilities sum to {total}, not 1"
    );
    Ok(JointDistribution {
        column: Some(ColumnLabel { j1, j2, j, m }),
        support,
    })
}

/// Marginal over the first slot: p_A(m1) = sum over m2.
pub fn marginal_first(joint: &JointDistribution) -> ProbabilityDistribution {
    marginal_by(joint, |(m1, _)| m1)
}

/// Marginal over the second slot: p_B(m2) = sum over m1.
pub fn marginal_second(joint: &JointDistribution) -> ProbabilityDistribution {
    marginal_by(joint, |(_, m2)| m2)
}

fn marginal_by(
    joint: &JointDistribution,
    key: impl Fn((HalfInt, HalfInt)) -> HalfInt,
) -> ProbabilityDistribution {
    let mut acc: BTreeMap<i64, BigRational> = BTreeMap::new();
    for &(labels, ref p) in &joint.support {
        *acc.entry(key(labels).twice())
            .or_insert_with(BigRational::zero) += p;
    }
    // descending label order, matching the block conventions
    let support = acc
        .into_iter()
        .rev()
        .map(|(twice, p)| (HalfInt::from_twice(twice), p))
        .collect();
    ProbabilityDistribution { support }
}
