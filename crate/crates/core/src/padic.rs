//! Exact p-adic valuation primitives.
//!
//! The integer functions are generic over any [`Integer`] type, so the same
//! code serves `u64`, `i64`, [`BigNat`] and [`BigSigned`]. Negative integers
//! are valuated by absolute value; the valuation of zero is
//! [`Valuation::Infinite`].

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use serde_json::json;

use crate::error::{invalid, Error, Result};
use crate::report::ConjectureReport;
use crate::valuation::Valuation;
use crate::BigNat;

/// Trial-division primality test. Only tiny primes occur in this crate.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

fn scalar<T: FromPrimitive>(x: u64) -> T {
    T::from_u64(x).expect("small constant fits the integer type")
}

/// Largest `e` with `p^e | n`; `Infinite` for `n = 0`.
///
/// Strips `p, p^2, p^4, ...` while they divide and then walks back down, so
/// the number of divisions is logarithmic in the valuation.
pub fn nu_int<T>(p: u64, n: &T) -> Result<Valuation>
where
    T: Integer + Clone + FromPrimitive,
{
    require_prime(p)?;
    if n.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let mut rest = n.clone();
    let mut powers: Vec<T> = vec![scalar(p)];
    let mut v: i64 = 0;
    loop {
        let top = powers.last().expect("non-empty").clone();
        if !rest.is_multiple_of(&top) {
            break;
        }
        rest = rest / top.clone();
        v += 1i64 << (powers.len() - 1);
        powers.push(top.clone() * top);
    }
    powers.pop();
    for (i, pw) in powers.iter().enumerate().rev() {
        if rest.is_multiple_of(pw) {
            rest = rest / pw.clone();
            v += 1i64 << i;
        }
    }
    Ok(Valuation::Finite(v))
}

/// `nu_p(a/b) = nu_p(a) - nu_p(b)`; `Infinite` iff the rational is zero.
pub fn nu_rat<T>(p: u64, r: &Ratio<T>) -> Result<Valuation>
where
    T: Integer + Clone + FromPrimitive,
{
    require_prime(p)?;
    if r.numer().is_zero() {
        return Ok(Valuation::Infinite);
    }
    let num = nu_int(p, r.numer())?.finite().expect("nonzero numerator");
    let den = nu_int(p, r.denom())?.finite().expect("nonzero denominator");
    Ok(Valuation::Finite(num - den))
}

/// 2-adic valuation of a big natural via its trailing zero count.
pub fn nu2_big(n: &BigUint) -> Valuation {
    match n.trailing_zeros() {
        Some(t) => Valuation::Finite(t as i64),
        None => Valuation::Infinite,
    }
}

pub fn nu2_signed(n: &BigInt) -> Valuation {
    match n.trailing_zeros() {
        Some(t) => Valuation::Finite(t as i64),
        None => Valuation::Infinite,
    }
}

pub fn nu2_u64(n: u64) -> Valuation {
    if n == 0 {
        Valuation::Infinite
    } else {
        Valuation::Finite(n.trailing_zeros() as i64)
    }
}

pub fn nu2_i64(n: i64) -> Valuation {
    nu2_u64(n.unsigned_abs())
}

/// Sum of the base-`p` digits of `n` (`n >= 0`).
pub fn digit_sum<T>(p: u64, n: &T) -> Result<u64>
where
    T: Integer + Clone + FromPrimitive + ToPrimitive,
{
    require_prime(p)?;
    if *n < T::zero() {
        return Err(invalid("digit sum of a negative number"));
    }
    let base: T = scalar(p);
    let mut rest = n.clone();
    let mut sum = 0u64;
    while !rest.is_zero() {
        let (q, r) = rest.div_rem(&base);
        sum += r.to_u64().expect("digit below p");
        rest = q;
    }
    Ok(sum)
}

/// Binary digit sum of a machine word.
pub fn s2(n: u64) -> u64 {
    n.count_ones() as u64
}

/// Legendre: `nu_p(m!) = (m - s_p(m)) / (p - 1)`, without forming `m!`.
pub fn legendre_factorial_val<T>(p: u64, m: &T) -> Result<Valuation>
where
    T: Integer + Clone + FromPrimitive + ToPrimitive,
{
    let s = digit_sum(p, m)?;
    let v = (m.clone() - scalar::<T>(s)) / scalar::<T>(p - 1);
    let v = v
        .to_i64()
        .ok_or_else(|| invalid("factorial valuation does not fit in 64 bits"))?;
    Ok(Valuation::Finite(v))
}

/// Kummer: `nu_2(C(m, k)) = s_2(k) + s_2(m - k) - s_2(m)`.
pub fn kummer_binomial_val<T>(m: &T, k: &T) -> Result<Valuation>
where
    T: Integer + Clone + FromPrimitive + ToPrimitive,
{
    if k > m {
        return Err(invalid("binomial C(m, k) needs k <= m"));
    }
    let v = digit_sum(2, k)? + digit_sum(2, &(m.clone() - k.clone()))? - digit_sum(2, m)?;
    Ok(Valuation::Finite(v as i64))
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`, with `(a)_0 = 1`.
pub fn pochhammer<T>(a: &T, k: u64) -> Result<T>
where
    T: Integer + Clone + FromPrimitive,
{
    if *a < T::one() {
        return Err(invalid("Pochhammer symbol needs a >= 1"));
    }
    let mut acc = T::one();
    let mut term = a.clone();
    for _ in 0..k {
        acc = acc * term.clone();
        term = term + T::one();
    }
    Ok(acc)
}

pub fn factorial(n: u64) -> BigNat {
    (1..=n).fold(BigNat::one(), |acc, i| acc * i)
}

pub fn binomial(n: u64, k: u64) -> BigNat {
    if k > n {
        return BigNat::zero();
    }
    num_integer::binomial(BigNat::from(n), BigNat::from(k))
}

/// Checks, for `1 <= m <= m_max`, with exact integers:
/// `nu_2(5^(2^m) - 1) = m + 2`, `nu_2(3^(2^m) - 1) = m + 2` and
/// `nu_2(5^(2^m) - 3^(2^m)) = m + 3`.
pub fn power_lemma_report(m_max: u32) -> Result<ConjectureReport> {
    if m_max < 1 {
        return Err(invalid("m_max must be at least 1"));
    }
    let mut report = ConjectureReport::new("power-lemmas").param("m_max", m_max);
    let one = BigNat::one();
    // 5^(2^m) and 3^(2^m) by repeated squaring, starting from m = 1.
    let mut five = BigNat::from(25u32);
    let mut three = BigNat::from(9u32);
    for m in 1..=m_max {
        let m_i = m as i64;
        let a1 = nu2_big(&(&five - &one));
        let a2 = nu2_big(&(&three - &one));
        let a3 = nu2_big(&(&five - &three));
        report.check(a1 == Valuation::Finite(m_i + 2), || {
            json!({"lemma": "5^(2^m)-1", "m": m, "expected": m_i + 2, "found": a1})
        });
        report.check(a2 == Valuation::Finite(m_i + 2), || {
            json!({"lemma": "3^(2^m)-1", "m": m, "expected": m_i + 2, "found": a2})
        });
        report.check(a3 == Valuation::Finite(m_i + 3), || {
            json!({"lemma": "5^(2^m)-3^(2^m)", "m": m, "expected": m_i + 3, "found": a3})
        });
        if m < m_max {
            five = &five * &five;
            three = &three * &three;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn fin(v: i64) -> Valuation {
        Valuation::Finite(v)
    }

    #[test]
    fn nu_int_examples() {
        assert_eq!(nu_int(2, &12u64).unwrap(), fin(2));
        assert_eq!(nu_int(2, &0u64).unwrap(), Valuation::Infinite);
        assert_eq!(nu_int(3, &45u64).unwrap(), fin(2));
        assert_eq!(nu_int(2, &-48i64).unwrap(), fin(4));
        assert_eq!(nu_int(2, &BigInt::from(-96)).unwrap(), fin(5));
        assert_eq!(nu_int(4, &16u64), Err(Error::NotPrime(4)));
        assert_eq!(nu_int(1, &16u64), Err(Error::NotPrime(1)));
    }

    #[test]
    fn nu_int_large_powers() {
        let n = BigUint::from(3u32) << 1000u32;
        assert_eq!(nu_int(2, &n).unwrap(), fin(1000));
        let n = num_traits::pow(BigUint::from(5u32), 777) * 7u32;
        assert_eq!(nu_int(5, &n).unwrap(), fin(777));
    }

    #[test]
    fn nu_rat_examples() {
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(nu_rat(2, &r(3, 8)).unwrap(), fin(-3));
        assert_eq!(nu_rat(2, &r(4, 6)).unwrap(), fin(1));
        assert_eq!(nu_rat(5, &r(1, 1)).unwrap(), fin(0));
        assert_eq!(nu_rat(3, &r(0, 7)).unwrap(), Valuation::Infinite);
    }

    #[test]
    fn digit_sums() {
        assert_eq!(digit_sum(2, &10u64).unwrap(), 2);
        assert_eq!(digit_sum(2, &255u64).unwrap(), 8);
        assert_eq!(digit_sum(3, &10u64).unwrap(), 2);
        assert_eq!(digit_sum(2, &0u64).unwrap(), 0);
        assert!(digit_sum(2, &-1i64).is_err());
    }

    #[test]
    fn legendre_examples() {
        // 10! = 3628800 = 2^8 * 14175
        assert_eq!(nu_int(2, &3628800u64).unwrap(), fin(8));
        assert_eq!(legendre_factorial_val(2, &10u64).unwrap(), fin(8));
        // 9! = 362880 = 3^4 * 4480
        assert_eq!(nu_int(3, &362880u64).unwrap(), fin(4));
        assert_eq!(legendre_factorial_val(3, &9u64).unwrap(), fin(4));
        for r in 0..20u32 {
            assert_eq!(legendre_factorial_val(2, &(1u64 << r)).unwrap(), fin((1i64 << r) - 1));
        }
    }

    #[test]
    fn kummer_examples() {
        assert_eq!(kummer_binomial_val(&4u64, &2u64).unwrap(), fin(1));
        assert_eq!(kummer_binomial_val(&37u64, &0u64).unwrap(), fin(0));
        for r in 0..30u32 {
            assert_eq!(kummer_binomial_val(&(1u64 << r), &1u64).unwrap(), fin(r as i64));
        }
        assert!(kummer_binomial_val(&3u64, &4u64).is_err());
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(&9u64, 0).unwrap(), 1);
        assert_eq!(pochhammer(&3u64, 4).unwrap(), 360);
        assert_eq!(pochhammer(&BigUint::one(), 20).unwrap(), factorial(20));
        assert!(pochhammer(&0u64, 3).is_err());
    }

    #[test]
    fn power_lemmas_first_values() {
        // m = 1: 24, 8 and 16.
        assert_eq!(nu2_u64(24), fin(3));
        assert_eq!(nu2_u64(8), fin(3));
        assert_eq!(nu2_u64(16), fin(4));
        let r = power_lemma_report(8).unwrap();
        assert!(r.is_consistent());
        assert_eq!(r.checked, 24);
        assert!(power_lemma_report(0).is_err());
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
