use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::count::{count_with, CountMethod};
use super::log_value::LogValue;
use super::sums::f_k_lower;
use crate::error::{Error, Result};

/// Below this exponent gap the `2^{2d²}` correction is evaluated exactly; beyond it
/// its relative effect is under `2^-4000` and it is dropped.
const EXACT_CORRECTION_GAP: i64 = 4096;

/// `2√e · 2^{2^{d-1}}`.
pub fn asymptotic_estimate(d: usize) -> Result<LogValue> {
    if d == 0 || d > 62 {
        return Err(Error::Domain(format!(
            "asymptotic estimate needs 1 ≤ d ≤ 62, got {d}"
        )));
    }
    Ok(&LogValue::pow2((1i64 << (d - 1)) + 1) * &LogValue::e().sqrt())
}

/// `2 Σ_{k≤d} f_lower(k) 2^{2^{d-1} - kd} - 2^{2d²}`.
#[derive(Clone, Debug, Serialize)]
pub struct LowerBound {
    pub d: usize,
    pub negative: bool,
    /// `log2 |bound|`; `None` when the bound is exactly zero.
    pub magnitude: Option<LogValue>,
    /// The subtracted `2^{2d²}` exceeds the main sum.
    pub correction_dominates: bool,
    /// The correction was below working precision and left out.
    pub correction_dropped: bool,
    /// Signed `bound / (2√e · 2^{2^{d-1}})`.
    pub ratio_to_asymptote: f64,
}

pub fn lower_bound_assembly(d: usize) -> Result<LowerBound> {
    if d == 0 || d > 30 {
        return Err(Error::Domain(format!(
            "lower bound assembly needs 1 ≤ d ≤ 30, got {d}"
        )));
    }
    let half = 1i64 << (d - 1);
    let mut main = BigRational::zero();
    for k in 0..=d {
        let scale = BigRational::new(BigInt::one(), BigInt::one() << (k * d));
        main += f_k_lower(d, k, false) * scale;
    }
    main *= BigInt::from(2);
    // Everything is divided through by 2^{2^{d-1}}.
    let gap = 2 * (d * d) as i64 - half;
    let correction_dropped = gap < -EXACT_CORRECTION_GAP;
    let scaled = if correction_dropped {
        main
    } else if gap >= 0 {
        main - BigRational::from_integer(BigInt::one() << gap as u64)
    } else {
        main - BigRational::new(BigInt::one(), BigInt::one() << (-gap) as u64)
    };
    let negative = scaled.is_negative();
    let (magnitude, ratio) = if scaled.is_zero() {
        (None, 0.0)
    } else {
        let m = &LogValue::from_ratio(&scaled.abs())? * &LogValue::pow2(half);
        let r = (&m / &asymptotic_estimate(d)?).to_f64();
        (Some(m), if negative { -r } else { r })
    };
    Ok(LowerBound {
        d,
        negative,
        magnitude,
        correction_dominates: negative,
        correction_dropped,
        ratio_to_asymptote: ratio,
    })
}

/// One row of the convergence table.
#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub d: usize,
    #[serde(serialize_with = "crate::cli::record::biguint_string")]
    pub count: BigUint,
    pub asymptote: LogValue,
    pub ratio: f64,
}

/// `|𝓘(Q_d)| / (2√e · 2^{2^{d-1}})` for `d = 1..=d_max`.
pub fn ratio_table(d_max: usize, extended: bool, parallelism: usize) -> Result<Vec<RatioRow>> {
    (1..=d_max)
        .map(|d| {
            let count = count_with(d, CountMethod::Split, extended, parallelism)?;
            let asymptote = asymptotic_estimate(d)?;
            let ratio = (&LogValue::from_biguint(&count)? / &asymptote).to_f64();
            Ok(RatioRow {
                d,
                count,
                asymptote,
                ratio,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn asymptote_values() {
        let a = asymptotic_estimate(1).unwrap();
        assert!((a.log2_f64() - 2.721_347_520_444_482).abs() < 1e-12);
        assert!((a.to_f64() - 6.594885082800512).abs() < 1e-9);
        assert!((asymptotic_estimate(3).unwrap().log2_f64() - 5.72135).abs() < 1e-5);
        assert_eq!(
            asymptotic_estimate(10).unwrap().to_decimal(7),
            "513.7213475"
        );
        assert!(asymptotic_estimate(0).is_err());
    }

    #[test]
    fn ratios() {
        let expect = [0.4549, 0.5307, 0.6634, 0.8802, 1.1776];
        for row in ratio_table(5, false, 2).unwrap() {
            assert!(
                (row.ratio - expect[row.d - 1]).abs() < 1e-3,
                "d = {}: {}",
                row.d,
                row.ratio
            );
        }
    }

    #[test]
    fn small_dimension_is_negative() {
        let lb = lower_bound_assembly(3).unwrap();
        assert!(lb.negative && lb.correction_dominates);
        // 48 - 2^18
        let expect = BigUint::from((1u64 << 18) - 48);
        let m = lb.magnitude.unwrap();
        assert_eq!(
            m.to_decimal(30),
            LogValue::from_biguint(&expect).unwrap().to_decimal(30)
        );
    }

    /// The bound straight from integers: `2 Σ_k ⌊prod⌋/k! · 2^{2^{d-1} - kd} - 2^{2d²}`,
    /// scaled by `2^{-2^{d-1}}` and compared against `2√e` in doubles.
    fn ratio_oracle(d: usize) -> f64 {
        let half = 1i64 << (d - 1);
        let step = (d * (d - 1) / 2 + 1) as i64;
        let mut total = BigRational::zero();
        for k in 0..=d as i64 {
            let mut num = BigInt::one();
            let mut den = BigInt::one();
            for j in 0..k {
                num *= (half - j * step).max(0);
                den *= j + 1;
            }
            total += BigRational::new(num, den * (BigInt::one() << (k as usize * d)));
        }
        total *= BigInt::from(2);
        let gap = 2 * (d * d) as i64 - half;
        total -= if gap >= 0 {
            BigRational::from_integer(BigInt::one() << gap as usize)
        } else {
            BigRational::new(BigInt::one(), BigInt::one() << (-gap) as usize)
        };
        total.to_f64().unwrap() / (2.0 * 0.5f64.exp())
    }

    #[test]
    fn dimension_fourteen_against_oracle() {
        let lb = lower_bound_assembly(14).unwrap();
        assert!(!lb.negative);
        let r = ratio_oracle(14);
        assert!(
            (lb.ratio_to_asymptote - r).abs() < 1e-12,
            "{} vs {r}",
            lb.ratio_to_asymptote
        );
        assert!((r - 0.998_602_402_067).abs() < 1e-11, "{r}");
    }

    #[test]
    fn at_least_the_empty_term() {
        for d in [9, 12, 20, 30] {
            let lb = lower_bound_assembly(d).unwrap();
            // 2 · 2^{2^{d-1}} - 2^{2d²} relative to the asymptote is 1/√e minus a vanishing part.
            assert!(
                lb.ratio_to_asymptote >= 1.0 / 0.5f64.exp() - 1e-9,
                "d = {d}"
            );
        }
        assert!(lower_bound_assembly(30).unwrap().correction_dropped);
    }
}
