use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};

/// `H(x) = -x log2 x - (1 - x) log2 (1 - x)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "entropy argument {x} outside [0, 1]"
        )));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

/// Checks `Σ_{i ≤ ⌊cN⌋} C(N, i) ≤ 2^{H(c) N}` exactly.
///
/// With `c = p/q` in lowest terms the right side raised to the `q`-th power is
/// `q^{qN} / (p^{pN} (q-p)^{(q-p)N})`, so the test is the integer inequality
/// `sum^q · p^{pN} · (q-p)^{(q-p)N} ≤ q^{qN}`.
pub fn entropy_bound_holds(n: u64, c: Ratio<u64>) -> Result<bool> {
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    if c > Ratio::new(1, 2) {
        return Err(Error::Domain(format!("c = {c} exceeds 1/2")));
    }
    tail_within_entropy_bound(n, *c.numer(), *c.denom())
}

fn tail_within_entropy_bound(n: u64, p: u64, q: u64) -> Result<bool> {
    if q.saturating_mul(n) > 1_000_000 {
        return Err(Error::SizeLimit(format!(
            "exact comparison for N = {n}, c = {p}/{q} is too large"
        )));
    }
    let floor_cn = p * n / q;
    let mut sum = BigUint::zero();
    let mut term = BigUint::one();
    for i in 0..=floor_cn {
        if i > 0 {
            term = term * (n - i + 1) / i;
        }
        sum += &term;
    }
    let pow = |base: u64, exp: u64| -> BigUint { Pow::pow(BigUint::from(base), exp) };
    // 0^0 = 1 covers c = 0.
    let lhs = Pow::pow(sum, q) * pow(p, p * n) * pow(q - p, (q - p) * n);
    let rhs = pow(q, q * n);
    Ok(lhs <= rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // 2 - (3/4) log2 3
        let expect = 2.0 - 0.75 * 3f64.log2();
        assert!((binary_entropy(0.25).unwrap() - expect).abs() < 1e-12);
        assert!((binary_entropy(0.25).unwrap() - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn bound_examples() {
        assert!(entropy_bound_holds(10, Ratio::new(3, 10)).unwrap());
        assert!(entropy_bound_holds(1, Ratio::new(1, 2)).unwrap());
        assert!(entropy_bound_holds(7, Ratio::new(0, 1)).unwrap());
        assert!(entropy_bound_holds(3, Ratio::new(2, 3)).is_err());
    }

    #[test]
    fn exact_comparison_detects_violations() {
        // Past c = 1/2 the inequality fails: N = 3, c = 2/3 gives 7 > 2^{2.75}.
        assert!(!tail_within_entropy_bound(3, 2, 3).unwrap());
        assert!(7.0 > 2f64.powf(3.0 * binary_entropy(2.0 / 3.0).unwrap()));
    }

    #[test]
    fn agrees_with_floating_point_away_from_ties() {
        for n in 1..=30u64 {
            for k in 0..=n / 2 {
                let c = Ratio::new(k, n);
                let sum: f64 = (0..=k)
                    .map(|i| crate::combinatorics::binomial(n, i).to_f64().unwrap())
                    .sum();
                let bound = 2f64.powf(binary_entropy(k as f64 / n as f64).unwrap() * n as f64);
                if (sum - bound).abs() > 1e-6 * bound {
                    assert_eq!(
                        entropy_bound_holds(n, c).unwrap(),
                        sum <= bound,
                        "N={n} k={k}"
                    );
                }
            }
        }
    }
}
