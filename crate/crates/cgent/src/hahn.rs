//! Hahn polynomials on a finite lattice and the Clebsch-Gordan backend
//! built on them.
//!
//! The polynomial is evaluated through a terminating 3F2 series computed by
//! incremental term ratios in exact rationals. Every gamma value appearing
//! in the weight and norm is an integer factorial for parameters reachable
//! from coupling labels, so no continuous gamma function is involved.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cg::{clebsch_gordan, CouplingLabel};
use crate::exact::{check_spin, factorial, phase, HalfInt, SignedSqrtRational};
use crate::{cg, Error, Result};

/// Parameters of h_n^(alpha,beta)(x, N): degree n, evaluation point x, and
/// lattice size N (`points`).
#[derive(Clone, Debug, PartialEq)]
pub struct HahnParams {
    degree: u64,
    alpha: BigRational,
    beta: BigRational,
    x: u64,
    points: u64,
}

impl HahnParams {
    pub fn new(
        degree: u64,
        alpha: BigRational,
        beta: BigRational,
        x: u64,
        points: u64,
    ) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidHahnParams {
                reason: "lattice needs at least one point".into(),
            });
        }
        if degree > points - 1 {
            return Err(Error::InvalidHahnParams {
                reason: format!("degree {degree} exceeds points - 1 = {}", points - 1),
            });
        }
        if x > points - 1 {
            return Err(Error::InvalidHahnParams {
                reason: format!("evaluation point {x} exceeds points - 1 = {}", points - 1),
            });
        }
        Ok(HahnParams {
            degree,
            alpha,
            beta,
            x,
            points,
        })
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }
    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }
    pub fn beta(&self) -> &BigRational {
        &self.beta
    }
    pub fn x(&self) -> u64 {
        self.x
    }
    pub fn points(&self) -> u64 {
        self.points
    }
}

/// Terminating 3F2(a1, a2, a3; b1, b2; 1) with a1 a nonpositive integer.
///
/// Terms are built by the exact ratio
/// term[k+1] = term[k] * (a1+k)(a2+k)(a3+k) / ((b1+k)(b2+k)(k+1)).
/// If another upper parameter hits zero first the series has terminated and
/// the partial sum is returned; a vanishing lower factor while the numerator
/// is still alive is a singular-parameter error.
pub fn hyp3f2_terminating(
    a1: i64,
    a2: &BigRational,
    a3: &BigRational,
    b1: &BigRational,
    b2: &BigRational,
) -> Result<BigRational> {
    if a1 > 0 {
        return Err(Error::InvalidHahnParams {
            reason: format!("3F2 upper parameter a1 = {a1} must be a nonpositive integer"),
        });
    }
    let last = a1.unsigned_abs();
    let a1 = BigRational::from_integer(BigInt::from(a1));
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for k in 0..last {
        let kq = BigRational::from_integer(BigInt::from(k));
        let numerator = (&a1 + &kq) * (a2 + &kq) * (a3 + &kq);
        if numerator.is_zero() {
            break;
        }
        for lower in [b1, b2] {
            if (lower + &kq).is_zero() {
                return Err(Error::SingularHypergeometric {
                    parameter: lower.clone(),
                    term: k + 1,
                });
            }
        }
        let denominator =
            (b1 + &kq) * (b2 + &kq) * BigRational::from_integer(BigInt::from(k + 1));
        term *= numerator / denominator;
        sum += &term;
    }
    Ok(sum)
}

/// h_n^(alpha,beta)(x, N), exact.
pub fn hahn_polynomial(p: &HahnParams) -> Result<BigRational> {
    let n = p.degree;
    let points = BigRational::from_integer(BigInt::from(p.points));
    let prefactor = BigRational::from_integer(BigInt::from(phase(n as i64)))
        * crate::exact::pochhammer(&(&points - BigRational::from_integer(BigInt::from(n))), n)
        * crate::exact::pochhammer(&(p.beta.clone() + BigRational::one()), n)
        / BigRational::from_integer(factorial(n));
    let a3 = &p.alpha + &p.beta + BigRational::from_integer(BigInt::from(n + 1));
    let series = hyp3f2_terminating(
        -(n as i64),
        &BigRational::from_integer(-BigInt::from(p.x)),
        &a3,
        &(p.beta.clone() + BigRational::one()),
        &(BigRational::one() - points),
    )?;
    Ok(prefactor * series)
}

/// Gamma of a positive integer argument, as a factorial.
fn gamma_int(arg: &BigRational) -> Result<BigInt> {
    if !arg.is_integer() || !arg.is_positive() {
        return Err(Error::GammaDomain { arg: arg.clone() });
    }
    let n = arg.to_integer();
    // factorial(arg - 1); arguments stay small for every reachable label
    let n = u64::try_from(n - 1u8).map_err(|_| Error::GammaDomain { arg: arg.clone() })?;
    Ok(factorial(n))
}

fn check_weight_domain(alpha: &BigRational, beta: &BigRational) -> Result<()> {
    let minus_one = -BigRational::one();
    if alpha <= &minus_one || beta <= &minus_one {
        return Err(Error::WeightDomain {
            alpha: alpha.clone(),
            beta: beta.clone(),
        });
    }
    Ok(())
}

/// Weight rho(x) = Gamma(N+alpha-x) Gamma(beta+1+x) / (Gamma(x+1) Gamma(N-x)).
pub fn weight_rho(x: u64, alpha: &BigRational, beta: &BigRational, points: u64) -> Result<BigRational> {
    check_weight_domain(alpha, beta)?;
    let xq = BigRational::from_integer(BigInt::from(x));
    let nq = BigRational::from_integer(BigInt::from(points));
    let one = BigRational::one();
    let num = BigRational::from_integer(
        gamma_int(&(&nq + alpha - &xq))? * gamma_int(&(beta + &one + &xq))?,
    );
    let den = BigRational::from_integer(gamma_int(&(&xq + &one))? * gamma_int(&(&nq - &xq))?);
    Ok(num / den)
}

/// Squared norm d_n^2 of the Hahn polynomial of degree n.
pub fn norm_sq(n: u64, alpha: &BigRational, beta: &BigRational, points: u64) -> Result<BigRational> {
    check_weight_domain(alpha, beta)?;
    if points == 0 || n > points - 1 {
        return Err(Error::InvalidHahnParams {
            reason: format!("norm degree {n} exceeds points - 1"),
        });
    }
    let nq = BigRational::from_integer(BigInt::from(n));
    let points_q = BigRational::from_integer(BigInt::from(points));
    let one = BigRational::one();
    let ab = alpha + beta;
    let numerator = BigRational::from_integer(
        gamma_int(&(alpha + &nq + &one))?
            * gamma_int(&(beta + &nq + &one))?
            * gamma_int(&(&ab + &nq + &points_q + &one))?,
    );
    let denominator = (&ab + &nq + &nq + &one)
        * BigRational::from_integer(
            factorial(n) * factorial(points - n - 1) * gamma_int(&(&ab + &nq + &one))?,
        );
    Ok(numerator / denominator)
}

/// Clebsch-Gordan coefficient through the Hahn representation:
/// CG = (-1)^(j1-m1) sqrt(rho(x)) / d_n * h_n^(alpha,beta)(x, N) with
/// n = j-m, x = j2-m2, N = j1+j2-m+1, alpha = m-j1+j2, beta = m+j1-j2.
///
/// Labels with m < 0 are first reflected (all projections negated, sign
/// (-1)^(j1+j2-j)) to reach the weight's domain; labels still outside
/// alpha, beta > -1 after that are reported as unsupported. Selection-rule
/// violations return exact zero, matching [`clebsch_gordan`].
pub fn cg_via_hahn(label: &CouplingLabel) -> Result<SignedSqrtRational> {
    if label.m1() + label.m2() != label.m() || !label.is_addressable() {
        return Ok(SignedSqrtRational::zero());
    }

    let (work, flip_sign) = if label.m().twice() < 0 {
        let exp = (label.j1() + label.j2() - label.j()).as_integer().unwrap();
        (label.reflected(), phase(exp))
    } else {
        (*label, 1)
    };

    let alpha = (work.m() - work.j1() + work.j2()).to_rational();
    let beta = (work.m() + work.j1() - work.j2()).to_rational();
    let minus_one = -BigRational::one();
    if alpha <= minus_one || beta <= minus_one {
        return Err(Error::UnsupportedLabel { alpha, beta });
    }

    let n = (work.j() - work.m()).as_nonneg_integer().unwrap();
    let x = (work.j2() - work.m2()).as_nonneg_integer().unwrap();
    let points = (work.j1() + work.j2() - work.m()).as_nonneg_integer().unwrap() + 1;

    let params = HahnParams::new(n, alpha.clone(), beta.clone(), x, points)?;
    let rho = weight_rho(x, &alpha, &beta, points)?;
    let dn_sq = norm_sq(n, &alpha, &beta, points)?;
    let h = hahn_polynomial(&params)?;

    let sign_exp = (work.j1() - work.m1()).as_integer().unwrap();
    let coeff = h
        * BigRational::from_integer(BigInt::from(phase(sign_exp)))
        * BigRational::from_integer(BigInt::from(flip_sign));
    Ok(SignedSqrtRational::from_scaled_sqrt(coeff, rho / dn_sq))
}

/// One label whose two backends disagreed.
#[derive(Clone, Debug)]
pub struct HahnMismatch {
    pub label: CouplingLabel,
    pub direct: SignedSqrtRational,
    pub via_hahn: SignedSqrtRational,
}

/// One label outside the Hahn domain even after reflection.
#[derive(Clone, Debug)]
pub struct HahnSkippedLabel {
    pub label: CouplingLabel,
    pub alpha: BigRational,
    pub beta: BigRational,
}

#[derive(Clone, Debug)]
pub struct HahnEquivalenceReport {
    pub j1: HalfInt,
    pub j2: HalfInt,
    pub labels_checked: usize,
    pub matched: usize,
    pub mismatches: Vec<HahnMismatch>,
    pub skipped: Vec<HahnSkippedLabel>,
    pub pass: bool,
}

/// Compares `cg_via_hahn` against the explicit-sum backend for every label
/// of the (j1, j2) block, requiring exact equality; out-of-domain labels
/// are listed rather than silently dropped.
pub fn equivalence_report(j1: HalfInt, j2: HalfInt) -> Result<HahnEquivalenceReport> {
    check_spin(j1)?;
    check_spin(j2)?;
    let mut report = HahnEquivalenceReport {
        j1,
        j2,
        labels_checked: 0,
        matched: 0,
        mismatches: Vec::new(),
        skipped: Vec::new(),
        pass: true,
    };
    for (m1, m2) in cg::block_rows(j1, j2) {
        for (j, m) in cg::block_columns(j1, j2) {
            let label = CouplingLabel::new(j1, m1, j2, m2, j, m)?;
            report.labels_checked += 1;
            match cg_via_hahn(&label) {
                Ok(via) => {
                    let direct = clebsch_gordan(&label);
                    if via == direct {
                        report.matched += 1;
                    } else {
                        report.mismatches.push(HahnMismatch {
                            label,
                            direct,
                            via_hahn: via,
                        });
                    }
                }
                Err(Error::UnsupportedLabel { alpha, beta }) => {
                    report.skipped.push(HahnSkippedLabel { label, alpha, beta });
                }
                Err(other) => return Err(other),
            }
        }
    }
    report.pass = report.mismatches.is_empty();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn h(twice: i64) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    fn label(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> CouplingLabel {
        CouplingLabel::new(h(tj1), h(tm1), h(tj2), h(tm2), h(tj), h(tm)).unwrap()
    }

    #[test]
    fn hyp3f2_single_term() {
        let v = hyp3f2_terminating(0, &rational(7, 3), &int(5), &int(1), &int(9)).unwrap();
        assert_eq!(v, BigRational::one());
    }

    #[test]
    fn hyp3f2_two_terms() {
        let v = hyp3f2_terminating(-1, &int(-1), &int(2), &int(1), &int(2)).unwrap();
        assert_eq!(v, int(2));
    }

    #[test]
    fn hyp3f2_zero_upper_kills_series() {
        let v = hyp3f2_terminating(-2, &int(0), &rational(5, 2), &int(1), &int(3)).unwrap();
        assert_eq!(v, BigRational::one());
    }

    #[test]
    fn hyp3f2_singular_lower_parameter() {
        let err = hyp3f2_terminating(-2, &int(1), &int(1), &int(-1), &int(1)).unwrap_err();
        match err {
            Error::SingularHypergeometric { parameter, term } => {
                assert_eq!(parameter, int(-1));
                assert_eq!(term, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn hyp3f2_numerator_terminates_before_singular_lower() {
        // (a2)_k dies at k = 1, so the zero of (b2)_k at the same index is
        // never consumed.
        let v = hyp3f2_terminating(-2, &int(-1), &int(1), &int(1), &int(-1)).unwrap();
        assert_eq!(v, int(-1));
    }

    #[test]
    fn hahn_degree_zero_is_one() {
        let p = HahnParams::new(0, rational(3, 2), rational(-1, 2), 2, 4).unwrap();
        assert_eq!(hahn_polynomial(&p).unwrap(), BigRational::one());
    }

    #[test]
    fn hahn_degree_one_values() {
        let p = HahnParams::new(1, int(0), int(0), 0, 3).unwrap();
        assert_eq!(hahn_polynomial(&p).unwrap(), int(-2));
        let p = HahnParams::new(1, int(0), int(0), 2, 3).unwrap();
        assert_eq!(hahn_polynomial(&p).unwrap(), int(2));
    }

    #[test]
    fn hahn_params_validation() {
        assert!(HahnParams::new(3, int(0), int(0), 0, 3).is_err());
        assert!(HahnParams::new(0, int(0), int(0), 3, 3).is_err());
        assert!(HahnParams::new(0, int(0), int(0), 0, 0).is_err());
    }

    #[test]
    fn weight_examples() {
        assert_eq!(weight_rho(1, &int(0), &int(0), 4).unwrap(), BigRational::one());
        assert_eq!(weight_rho(0, &int(1), &int(0), 2).unwrap(), int(2));
        assert_eq!(weight_rho(1, &int(0), &int(1), 2).unwrap(), int(2));
    }

    #[test]
    fn weight_domain_errors() {
        assert!(matches!(
            weight_rho(0, &int(-1), &int(0), 2),
            Err(Error::WeightDomain { .. })
        ));
        assert!(matches!(
            weight_rho(0, &rational(1, 2), &int(0), 2),
            Err(Error::GammaDomain { .. })
        ));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm_sq(0, &int(0), &int(0), 3).unwrap(), int(3));
        assert_eq!(norm_sq(0, &int(1), &int(0), 2).unwrap(), int(3));
        assert_eq!(norm_sq(0, &int(0), &int(0), 1).unwrap(), BigRational::one());
    }

    #[test]
    fn hahn_orthogonality_against_weight() {
        // sum_x rho(x) h_n(x) h_n'(x) = delta_nn' d_n^2, exactly.
        for (alpha, beta) in [(int(0), int(0)), (int(1), int(0)), (int(2), int(1))] {
            for points in 1..=5u64 {
                for n in 0..points {
                    for n2 in 0..points {
                        let mut acc = BigRational::zero();
                        for x in 0..points {
                            let rho = weight_rho(x, &alpha, &beta, points).unwrap();
                            let pa =
                                HahnParams::new(n, alpha.clone(), beta.clone(), x, points).unwrap();
                            let pb =
                                HahnParams::new(n2, alpha.clone(), beta.clone(), x, points).unwrap();
                            acc += rho
                                * hahn_polynomial(&pa).unwrap()
                                * hahn_polynomial(&pb).unwrap();
                        }
                        let expected = if n == n2 {
                            norm_sq(n, &alpha, &beta, points).unwrap()
                        } else {
                            BigRational::zero()
                        };
                        assert_eq!(acc, expected, "alpha={alpha} beta={beta} N={points} n={n} n'={n2}");
                    }
                }
            }
        }
    }

    #[test]
    fn cg_via_hahn_stretched_state() {
        let v = cg_via_hahn(&label(5, 5, 4, 4, 9, 9)).unwrap();
        assert_eq!(v, SignedSqrtRational::one());
    }

    #[test]
    fn cg_via_hahn_spin_half_example() {
        let v = cg_via_hahn(&label(1, 1, 1, -1, 2, 0)).unwrap();
        assert_eq!(v, SignedSqrtRational::new(1, rational(1, 2)));
    }

    #[test]
    fn cg_via_hahn_binomial_oracle() {
        // <5/2 3/2 2 -1 | 9/2 1/2> = +sqrt(20/126)
        let v = cg_via_hahn(&label(5, 3, 4, -2, 9, 1)).unwrap();
        assert_eq!(v.sign(), 1);
        assert_eq!(v.squared(), rational(20, 126));
        assert!((v.to_f64() - (20.0f64 / 126.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cg_via_hahn_negative_m_reflects() {
        let l = label(2, 0, 2, -2, 2, -2);
        let v = cg_via_hahn(&l).unwrap();
        assert!(!v.is_zero());
        assert_eq!(v, clebsch_gordan(&l));
    }

    #[test]
    fn cg_via_hahn_selection_rules_zero() {
        assert!(cg_via_hahn(&label(1, 1, 1, 1, 2, 0)).unwrap().is_zero());
        assert!(cg_via_hahn(&label(1, 1, 1, 1, 6, 2)).unwrap().is_zero());
    }

    #[test]
    fn cg_via_hahn_out_of_domain_label() {
        // (j1=1, j2=0) block at m = 0 maps to alpha = -1 on both sides of
        // the reflection.
        let err = cg_via_hahn(&label(2, 0, 0, 0, 2, 0)).unwrap_err();
        assert!(matches!(err, Error::UnsupportedLabel { .. }));
    }

    #[test]
    fn equivalence_small_blocks() {
        for (tj1, tj2) in [(1, 1), (5, 4), (2, 2)] {
            let report = equivalence_report(h(tj1), h(tj2)).unwrap();
            assert!(report.pass, "2j1={tj1} 2j2={tj2}: {:?}", report.mismatches);
            assert_eq!(report.labels_checked, report.matched + report.skipped.len());
        }
    }

    #[test]
    fn equivalence_equal_spins_has_no_skips() {
        let report = equivalence_report(h(5), h(4)).unwrap();
        assert!(report.skipped.is_empty());
        let report = equivalence_report(h(1), h(1)).unwrap();
        assert!(report.skipped.is_empty());
    }

    #[test]
    fn equivalence_unequal_spins_reports_skips() {
        let report = equivalence_report(h(2), h(0)).unwrap();
        assert!(report.pass);
        assert!(!report.skipped.is_empty());
        for skip in &report.skipped {
            let minus_one = -BigRational::one();
            assert!(skip.alpha <= minus_one || skip.beta <= minus_one);
        }
    }
}
