use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Fractional bits kept in a [`LogValue`].
pub const FRAC_BITS: u32 = 128;
/// Working precision of intermediate mantissas.
const WORK: u32 = 192;
const GUARD: u32 = 16;

/// A positive magnitude stored as its base-2 logarithm in fixed point.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LogValue {
    /// `log2 · 2^FRAC_BITS`, rounded to nearest.
    fixed: BigInt,
}

impl LogValue {
    /// `2^n`.
    pub fn pow2(n: i64) -> Self {
        LogValue {
            fixed: BigInt::from(n) << FRAC_BITS,
        }
    }

    pub fn one() -> Self {
        Self::pow2(0)
    }

    pub fn from_biguint(x: &BigUint) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::Domain("the logarithm of zero is undefined".into()));
        }
        Ok(LogValue {
            fixed: log2_fixed(x, 0),
        })
    }

    pub fn from_ratio(r: &BigRational) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::Domain(format!("log of non-positive value {r}")));
        }
        let num = r.numer().magnitude();
        let den = r.denom().magnitude();
        Ok(LogValue {
            fixed: log2_fixed(num, 0) - log2_fixed(den, 0),
        })
    }

    /// Euler's number, from the rational partial sum `Σ_{k≤60} 1/k!` (error below `2^-270`).
    pub fn e() -> &'static LogValue {
        static CELL: OnceLock<LogValue> = OnceLock::new();
        CELL.get_or_init(|| {
            let mut sum = BigRational::zero();
            let mut term = BigRational::one();
            for k in 1..=61u32 {
                sum += &term;
                term /= BigInt::from(k);
            }
            LogValue::from_ratio(&sum).expect("e is positive")
        })
    }

    /// `√x`.
    pub fn sqrt(&self) -> Self {
        LogValue {
            fixed: &self.fixed >> 1,
        }
    }

    /// `x^k`.
    pub fn powi(&self, k: i64) -> Self {
        LogValue {
            fixed: &self.fixed * k,
        }
    }

    /// The base-2 logarithm as a double.
    pub fn log2_f64(&self) -> f64 {
        self.fixed.to_f64().unwrap_or(f64::NAN) / 2f64.powi(FRAC_BITS as i32)
    }

    /// The value itself as a double; infinite or zero when out of range.
    pub fn to_f64(&self) -> f64 {
        self.log2_f64().exp2()
    }

    /// `⌊log2⌋`.
    pub fn floor_log2(&self) -> BigInt {
        &self.fixed >> FRAC_BITS
    }

    /// `log2` in decimal with `digits` fractional digits, rounded half up.
    pub fn to_decimal(&self, digits: usize) -> String {
        let neg = self.fixed.sign() == Sign::Minus;
        let abs = self.fixed.magnitude();
        let mut int = abs >> FRAC_BITS;
        let rem = abs - (&int << FRAC_BITS);
        let scale = num_traits::pow(BigUint::from(10u32), digits);
        let mut frac = (rem * &scale + (BigUint::one() << (FRAC_BITS - 1))) >> FRAC_BITS;
        if frac >= scale {
            frac -= &scale;
            int += 1u32;
        }
        let sign = if neg && !(int.is_zero() && frac.is_zero()) {
            "-"
        } else {
            ""
        };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac:0>digits$}")
        }
    }
}

impl Mul for &LogValue {
    type Output = LogValue;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &LogValue) -> LogValue {
        LogValue {
            fixed: &self.fixed + &rhs.fixed,
        }
    }
}

impl Div for &LogValue {
    type Output = LogValue;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &LogValue) -> LogValue {
        LogValue {
            fixed: &self.fixed - &rhs.fixed,
        }
    }
}

impl Add for &LogValue {
    type Output = LogValue;

    /// `log2(2^a + 2^b) = max + log2(1 + 2^{min - max})`.
    fn add(self, rhs: &LogValue) -> LogValue {
        let (hi, lo) = if self.fixed >= rhs.fixed {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let diff = &lo.fixed - &hi.fixed;
        let cutoff = -(BigInt::from(WORK + GUARD) << FRAC_BITS);
        if diff < cutoff {
            return hi.clone();
        }
        let whole = &diff >> FRAC_BITS;
        let frac = (&diff - (&whole << FRAC_BITS)).magnitude().clone();
        let shift = (-whole).to_u32().expect("bounded by the cutoff");
        let y = exp2_frac(&frac) >> shift;
        let s = (BigUint::one() << WORK) + y;
        LogValue {
            fixed: &hi.fixed + log2_fixed(&s, WORK),
        }
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.fixed.cmp(&other.fixed)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^{}", self.to_decimal(f.precision().unwrap_or(12)))
    }
}

impl fmt::Debug for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogValue({})", self.to_decimal(20))
    }
}

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal(20))
    }
}

/// `log2(x / 2^scale) · 2^FRAC_BITS` by repeated squaring of the mantissa.
fn log2_fixed(x: &BigUint, scale: u32) -> BigInt {
    let e = x.bits() - 1;
    let mut m = if e <= u64::from(WORK) {
        x << (u64::from(WORK) - e)
    } else {
        x >> (e - u64::from(WORK))
    };
    let two = BigUint::one() << (WORK + 1);
    let mut frac = BigUint::zero();
    for _ in 0..FRAC_BITS + GUARD {
        m = (&m * &m) >> WORK;
        frac <<= 1;
        if m >= two {
            m >>= 1;
            frac |= BigUint::one();
        }
    }
    let frac = (frac + (BigUint::one() << (GUARD - 1))) >> GUARD;
    ((BigInt::from(e) - BigInt::from(scale)) << FRAC_BITS) + BigInt::from(frac)
}

/// `2^{2^-i} · 2^WORK` for `i = 1..=FRAC_BITS`.
fn root_table() -> &'static [BigUint] {
    static CELL: OnceLock<Vec<BigUint>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = Vec::with_capacity(FRAC_BITS as usize);
        let mut c = (BigUint::from(2u32) << (2 * WORK)).sqrt();
        for _ in 0..FRAC_BITS {
            let next = (&c << WORK).sqrt();
            out.push(c);
            c = next;
        }
        out
    })
}

/// `2^{f / 2^FRAC_BITS} · 2^WORK` for `0 ≤ f < 2^FRAC_BITS`.
fn exp2_frac(f: &BigUint) -> BigUint {
    let roots = root_table();
    let mut r = BigUint::one() << WORK;
    for (i, c) in roots.iter().enumerate() {
        if f.bit(u64::from(FRAC_BITS) - 1 - i as u64) {
            r = (r * c) >> WORK;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn exact_powers() {
        let x = LogValue::from_biguint(&(BigUint::one() << 1000u32)).unwrap();
        assert_eq!(x, LogValue::pow2(1000));
        assert_eq!(x.to_decimal(5), "1000.00000");
        assert!(LogValue::from_biguint(&BigUint::zero()).is_err());
    }

    #[test]
    fn logs_of_small_integers() {
        for n in 1u32..200 {
            let x = LogValue::from_biguint(&BigUint::from(n)).unwrap();
            assert!(close(x.log2_f64(), (n as f64).log2(), 1e-14), "n = {n}");
        }
        let third = LogValue::from_ratio(&BigRational::new(1.into(), 3.into())).unwrap();
        assert!(close(third.log2_f64(), -(3f64.log2()), 1e-14));
    }

    #[test]
    fn e_digits() {
        // log2 e = 1.44269504088896340735992468100189213742664595415298593413544...
        assert_eq!(
            LogValue::e().to_decimal(30),
            "1.442695040888963407359924681002"
        );
    }

    #[test]
    fn log_sum_exp() {
        let three = LogValue::from_biguint(&BigUint::from(3u32)).unwrap();
        let five = LogValue::from_biguint(&BigUint::from(5u32)).unwrap();
        let eight = LogValue::pow2(3);
        assert_eq!((&three + &five).to_decimal(35), eight.to_decimal(35));
        let huge = LogValue::pow2(100_000);
        assert_eq!(&huge + &LogValue::one(), huge);
        let a = LogValue::from_biguint(&BigUint::from(123_456_789u64)).unwrap();
        let b = LogValue::from_biguint(&BigUint::from(987_654_321u64)).unwrap();
        let c = LogValue::from_biguint(&BigUint::from(1_111_111_110u64)).unwrap();
        assert_eq!((&a + &b).to_decimal(35), c.to_decimal(35));
    }

    #[test]
    fn products_and_roots() {
        let six = LogValue::from_biguint(&BigUint::from(6u32)).unwrap();
        let two = LogValue::pow2(1);
        let three = LogValue::from_biguint(&BigUint::from(3u32)).unwrap();
        assert_eq!((&two * &three).to_decimal(36), six.to_decimal(36));
        assert_eq!((&six / &three).to_decimal(36), two.to_decimal(36));
        assert_eq!(LogValue::pow2(4).sqrt(), LogValue::pow2(2));
        assert_eq!(LogValue::pow2(3).powi(-2), LogValue::pow2(-6));
    }

    #[test]
    fn decimal_rounding() {
        assert_eq!(LogValue::pow2(-3).to_decimal(2), "-3.00");
        let x = LogValue::from_ratio(&BigRational::new(3.into(), 2.into())).unwrap();
        // log2 1.5 = 0.5849625007...
        assert_eq!(x.to_decimal(4), "0.5850");
        assert_eq!(x.to_decimal(0), "1");
    }
}
