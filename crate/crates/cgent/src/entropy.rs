//! Shannon and Tsallis entropies of the column distributions, mutual
//! information, and the three inequality families checked on them.
//!
//! Distributions stay exact rationals; each probability is converted to a
//! float exactly once per entropy evaluation. Margins are floats guarded by
//! a fixed roundoff threshold of 1e-12 (logarithms are irrational, so
//! exact-rational margins do not exist).

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cg::block_columns;
use crate::exact::{check_spin, HalfInt};
use crate::prob::{column_joint, marginal_first, marginal_second, JointDistribution, ProbabilityDistribution};
use crate::{Error, Result};

/// Pass threshold for inequality margins backed by exact rationals.
pub const MARGIN_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LogBase {
    #[serde(rename = "e")]
    Natural,
    #[serde(rename = "2")]
    Base2,
}

impl std::fmt::Display for LogBase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LogBase::Natural => f.write_str("e"),
            LogBase::Base2 => f.write_str("2"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyValue {
    pub value: f64,
    pub log_base: LogBase,
}

fn ratio_f64(p: &BigRational) -> f64 {
    let num = p.numer().to_f64().unwrap_or(f64::INFINITY);
    let den = p.denom().to_f64().unwrap_or(f64::INFINITY);
    num / den
}

fn entropy_of<'a>(probs: impl Iterator<Item = &'a BigRational>, base: LogBase) -> f64 {
    let mut h = 0.0;
    for p in probs {
        let pf = ratio_f64(p);
        if pf > 0.0 {
            h -= match base {
                LogBase::Natural => pf * pf.ln(),
                LogBase::Base2 => pf * pf.log2(),
            };
        }
    }
    h
}

fn tsallis_of<'a>(probs: impl Iterator<Item = &'a BigRational>, q: f64) -> Result<f64> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidEntropicIndex { q });
    }
    if q == 1.0 {
        // analytic limit: Shannon entropy in natural log
        return Ok(entropy_of(probs, LogBase::Natural));
    }
    let power_sum: f64 = probs.map(|p| ratio_f64(p).powf(q)).sum();
    Ok((power_sum - 1.0) / (1.0 - q))
}

/// Shannon entropy H = -sum p log p, with 0 log 0 = 0.
pub fn shannon(p: &ProbabilityDistribution, base: LogBase) -> EntropyValue {
    EntropyValue {
        value: entropy_of(p.probabilities(), base),
        log_base: base,
    }
}

/// Shannon entropy of a joint distribution, H(AB).
pub fn shannon_joint(joint: &JointDistribution, base: LogBase) -> EntropyValue {
    EntropyValue {
        value: entropy_of(joint.probabilities(), base),
        log_base: base,
    }
}

/// Tsallis entropy T_q = (sum p^q - 1) / (1 - q); q = 1 is the Shannon
/// limit in natural log.
pub fn tsallis(p: &ProbabilityDistribution, q: f64) -> Result<EntropyValue> {
    Ok(EntropyValue {
        value: tsallis_of(p.probabilities(), q)?,
        log_base: LogBase::Natural,
    })
}

pub fn tsallis_joint(joint: &JointDistribution, q: f64) -> Result<EntropyValue> {
    Ok(EntropyValue {
        value: tsallis_of(joint.probabilities(), q)?,
        log_base: LogBase::Natural,
    })
}

/// Mutual information I = H(A) + H(B) - H(AB) of a joint distribution.
pub fn mutual_information(joint: &JointDistribution, base: LogBase) -> f64 {
    let a = shannon(&marginal_first(joint), base).value;
    let b = shannon(&marginal_second(joint), base).value;
    a + b - shannon_joint(joint, base).value
}

/// Subadditivity margin H(A) + H(B) - H(AB); numerically identical to the
/// mutual information, kept as the named inequality check.
pub fn subadditivity_margin(joint: &JointDistribution, base: LogBase) -> f64 {
    mutual_information(joint, base)
}

/// Araki-Lieb margin H(AB) - |H(A) - H(B)|.
pub fn araki_lieb_margin(joint: &JointDistribution, base: LogBase) -> f64 {
    let a = shannon(&marginal_first(joint), base).value;
    let b = shannon(&marginal_second(joint), base).value;
    shannon_joint(joint, base).value - (a - b).abs()
}

/// Tsallis information I_q = T_q(A) + T_q(B) - T_q(AB).
pub fn tsallis_information(joint: &JointDistribution, q: f64) -> Result<f64> {
    let a = tsallis(&marginal_first(joint), q)?.value;
    let b = tsallis(&marginal_second(joint), q)?.value;
    Ok(a + b - tsallis_joint(joint, q)?.value)
}

#[derive(Clone, Debug, Serialize)]
pub struct JointProbability {
    pub m1: HalfInt,
    pub m2: HalfInt,
    /// exact value as a reduced fraction "p/q"
    pub probability: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TsallisMargin {
    pub q: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ColumnInequalityRecord {
    pub j: HalfInt,
    pub m: HalfInt,
    pub probabilities: Vec<JointProbability>,
    pub mutual_information: f64,
    pub subadditivity_margin: f64,
    pub araki_lieb_margin: f64,
    pub tsallis_margins: Vec<TsallisMargin>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub j1: HalfInt,
    pub j2: HalfInt,
    pub log_base: LogBase,
    pub q_grid: Vec<f64>,
    pub tolerance: f64,
    pub columns: Vec<ColumnInequalityRecord>,
    pub pass: bool,
}

/// Evaluates subadditivity, Araki-Lieb, and Tsallis margins for every
/// column (j, m) of the (j1, j2) block. Passes iff every margin clears
/// -[`MARGIN_TOLERANCE`].
pub fn verify_inequalities(
    j1: HalfInt,
    j2: HalfInt,
    q_grid: &[f64],
    base: LogBase,
) -> Result<InequalityReport> {
    check_spin(j1)?;
    check_spin(j2)?;
    for &q in q_grid {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidEntropicIndex { q });
        }
    }

    let mut columns = Vec::new();
    let mut pass = true;
    for (j, m) in block_columns(j1, j2) {
        let joint = column_joint(j1, j2, j, m)?;
        let mi = mutual_information(&joint, base);
        let sub = subadditivity_margin(&joint, base);
        let araki = araki_lieb_margin(&joint, base);
        let mut tsallis_margins = Vec::with_capacity(q_grid.len());
        for &q in q_grid {
            let margin = tsallis_information(&joint, q)?;
            pass &= margin >= -MARGIN_TOLERANCE;
            tsallis_margins.push(TsallisMargin { q, margin });
        }
        pass &= sub >= -MARGIN_TOLERANCE && araki >= -MARGIN_TOLERANCE;
        columns.push(ColumnInequalityRecord {
            j,
            m,
            probabilities: joint
                .support()
                .iter()
                .map(|&((m1, m2), ref p)| JointProbability {
                    m1,
                    m2,
                    probability: p.to_string(),
                })
                .collect(),
            mutual_information: mi,
            subadditivity_margin: sub,
            araki_lieb_margin: araki,
            tsallis_margins,
        });
    }

    Ok(InequalityReport {
        j1,
        j2,
        log_base: base,
        q_grid: q_grid.to_vec(),
        tolerance: MARGIN_TOLERANCE,
        columns,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn h(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn dist(probs: &[(i64, i64)]) -> ProbabilityDistribution {
        let support = probs
            .iter()
            .enumerate()
            .map(|(i, &(n, d))| (HalfInt::from_int(i as i64), rational(n, d)))
            .collect();
        ProbabilityDistribution::from_support(support).unwrap()
    }

    fn paper_joint() -> JointDistribution {
        column_joint(h(5), h(4), h(9), h(1)).unwrap()
    }

    #[test]
    fn shannon_uniform_four_bits() {
        let p = dist(&[(1, 4), (1, 4), (1, 4), (1, 4)]);
        assert_eq!(shannon(&p, LogBase::Base2).value, 2.0);
    }

    #[test]
    fn shannon_delta_is_zero() {
        let p = dist(&[(1, 1)]);
        assert_eq!(shannon(&p, LogBase::Base2).value, 0.0);
        assert_eq!(shannon(&p, LogBase::Natural).value, 0.0);
    }

    #[test]
    fn shannon_dyadic() {
        let p = dist(&[(1, 2), (1, 4), (1, 4)]);
        assert_eq!(shannon(&p, LogBase::Base2).value, 1.5);
    }

    #[test]
    fn shannon_zero_prob_outcome_is_inert() {
        let with_zero = ProbabilityDistribution::from_support(vec![
            (HalfInt::from_int(0), rational(1, 2)),
            (HalfInt::from_int(1), rational(1, 2)),
            (HalfInt::from_int(2), rational(0, 1)),
        ])
        .unwrap();
        let without = dist(&[(1, 2), (1, 2)]);
        assert_eq!(
            shannon(&with_zero, LogBase::Natural).value,
            shannon(&without, LogBase::Natural).value
        );
    }

    #[test]
    fn base_consistency() {
        let p = dist(&[(1, 126), (20, 126), (60, 126), (40, 126), (5, 126)]);
        let natural = shannon(&p, LogBase::Natural).value;
        let bits = shannon(&p, LogBase::Base2).value;
        assert!((bits - natural / std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn tsallis_uniform_four_q2() {
        let p = dist(&[(1, 4), (1, 4), (1, 4), (1, 4)]);
        assert_eq!(tsallis(&p, 2.0).unwrap().value, 0.75);
    }

    #[test]
    fn tsallis_delta_any_q() {
        let p = dist(&[(1, 1)]);
        for q in [0.3, 1.0, 2.0, 7.5] {
            assert_eq!(tsallis(&p, q).unwrap().value, 0.0);
        }
    }

    #[test]
    fn tsallis_rejects_bad_q() {
        let p = dist(&[(1, 1)]);
        assert!(matches!(
            tsallis(&p, 0.0),
            Err(Error::InvalidEntropicIndex { .. })
        ));
        assert!(tsallis(&p, -1.0).is_err());
        assert!(tsallis(&p, f64::NAN).is_err());
    }

    #[test]
    fn tsallis_limit_approaches_shannon() {
        let joint = paper_joint();
        let p = marginal_first(&joint);
        let target = shannon(&p, LogBase::Natural).value;
        for q in [1.0 - 1e-6, 1.0 + 1e-6] {
            assert!((tsallis(&p, q).unwrap().value - target).abs() <= 1e-5);
        }
    }

    #[test]
    fn mutual_information_paper_anchor() {
        let mi = mutual_information(&paper_joint(), LogBase::Natural);
        assert!((mi - 1.176).abs() < 1e-3, "got {mi}");
    }

    #[test]
    fn mutual_information_product_is_zero() {
        // p(a, b) = p(a) p(b), synthetic
        let pa = [rational(1, 2), rational(1, 3), rational(1, 6)];
        let pb = [rational(1, 4), rational(3, 4)];
        let mut support = Vec::new();
        for (i, a) in pa.iter().enumerate() {
            for (k, b) in pb.iter().enumerate() {
                support.push(((HalfInt::from_int(i as i64), HalfInt::from_int(k as i64)), a * b));
            }
        }
        let joint = JointDistribution::from_support(support).unwrap();
        assert!(mutual_information(&joint, LogBase::Natural).abs() <= 1e-12);
    }

    #[test]
    fn mutual_information_delta_is_zero() {
        let joint = column_joint(h(1), h(1), h(2), h(2)).unwrap();
        assert_eq!(mutual_information(&joint, LogBase::Natural), 0.0);
    }

    #[test]
    fn araki_lieb_equals_joint_entropy_on_columns() {
        let joint = paper_joint();
        let margin = araki_lieb_margin(&joint, LogBase::Natural);
        let h_ab = shannon_joint(&joint, LogBase::Natural).value;
        assert!((margin - h_ab).abs() <= 1e-12);
        assert!((margin - 1.176).abs() < 1e-3);
        let delta = column_joint(h(1), h(1), h(2), h(2)).unwrap();
        assert_eq!(araki_lieb_margin(&delta, LogBase::Natural), 0.0);
    }

    #[test]
    fn degenerate_coupling_identity() {
        for (j, m) in [(h(9), h(1)), (h(5), h(3)), (h(7), h(-1))] {
            let joint = column_joint(h(5), h(4), j, m).unwrap();
            let h_ab = shannon_joint(&joint, LogBase::Natural).value;
            let h_a = shannon(&marginal_first(&joint), LogBase::Natural).value;
            let h_b = shannon(&marginal_second(&joint), LogBase::Natural).value;
            assert!((h_ab - h_a).abs() <= 1e-12);
            assert!((h_ab - h_b).abs() <= 1e-12);
            assert!((mutual_information(&joint, LogBase::Natural) - h_a).abs() <= 1e-12);
        }
    }

    #[test]
    fn tsallis_information_paper_values() {
        let joint = paper_joint();
        let i1 = tsallis_information(&joint, 1.0).unwrap();
        assert_eq!(i1, mutual_information(&joint, LogBase::Natural));
        let i2 = tsallis_information(&joint, 2.0).unwrap();
        let expected = 1.0 - 5626.0 / 15876.0;
        assert!((i2 - expected).abs() <= 1e-12, "got {i2}, want {expected}");
        let delta = column_joint(h(1), h(1), h(2), h(2)).unwrap();
        for q in [0.5, 1.0, 3.0] {
            assert_eq!(tsallis_information(&delta, q).unwrap(), 0.0);
        }
    }

    #[test]
    fn verify_paper_block() {
        let report = verify_inequalities(h(5), h(4), &[0.5, 1.0, 2.0], LogBase::Natural).unwrap();
        assert!(report.pass);
        assert_eq!(report.columns.len(), 30);
    }

    #[test]
    fn verify_half_half_margins() {
        let report = verify_inequalities(h(1), h(1), &[1.0], LogBase::Natural).unwrap();
        assert!(report.pass);
        let ln2 = std::f64::consts::LN_2;
        for col in &report.columns {
            let near_zero = col.subadditivity_margin.abs() <= 1e-12;
            let near_ln2 = (col.subadditivity_margin - ln2).abs() <= 1e-12;
            assert!(near_zero || near_ln2, "margin {}", col.subadditivity_margin);
        }
    }

    #[test]
    fn verify_one_one_wide_q() {
        let report = verify_inequalities(h(2), h(2), &[0.25, 4.0], LogBase::Natural).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn verify_rejects_bad_grid() {
        assert!(verify_inequalities(h(1), h(1), &[0.5, -1.0], LogBase::Natural).is_err());
    }
}
