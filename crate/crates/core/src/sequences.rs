//! Auxiliary sequences: the triple-binomial sums `b_{l,m}` and `A_{l,m}`,
//! partial sums `L_k(n) = sum 2^j / j^k`, and the sums `T_p(n, k)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use serde_json::json;

use crate::error::{invalid, Error, Result};
use crate::padic::{binomial, factorial, is_prime, nu2_big, nu2_signed, pochhammer, s2};
use crate::report::ConjectureReport;
use crate::stirling::{ModStirlingEngine, Precision};
use crate::valuation::{Valuation, ValuationOutcome};
use crate::{BigNat, BigRat, BigSigned};

/// `b_{l,m} = sum_{k=l}^{m} 2^k C(2m-2k, m-k) C(m+k, m) C(k, l)`.
pub fn b_lm(l: u64, m: u64) -> Result<BigNat> {
    if l > m {
        return Err(invalid(format!("need l <= m, got l = {l}, m = {m}")));
    }
    let mut sum = BigNat::zero();
    for k in l..=m {
        let term = binomial(2 * (m - k), m - k) * binomial(m + k, m) * binomial(k, l);
        sum += term << k;
    }
    Ok(sum)
}

/// `A_{l,m} = l! m! b_{l,m} / 2^(m-l)`.
pub fn a_lm(l: u64, m: u64) -> Result<BigNat> {
    let num = factorial(l) * factorial(m) * b_lm(l, m)?;
    let shift = m - l;
    let low_bits = num.trailing_zeros().unwrap_or(u64::MAX);
    if low_bits < shift {
        return Err(Error::Invariant(format!("A_{{{l},{m}}} is not an integer")));
    }
    Ok(num >> shift)
}

/// Direct valuation of `A_{l,m}` against `nu_2((m+1-l)_{2l}) + l` and
/// `3l - s_2(m+l) + s_2(m-l)`, for `l <= min(l_max, m)`, `m <= m_max`.
pub fn a_lm_val_check(l_max: u64, m_max: u64) -> Result<ConjectureReport> {
    let mut report = ConjectureReport::new("alm").param("l_max", l_max).param("m_max", m_max);
    for m in 0..=m_max {
        for l in 0..=l_max.min(m) {
            let direct = nu2_big(&a_lm(l, m)?);
            let rising = pochhammer(&BigNat::from(m + 1 - l), 2 * l)?;
            let theorem = nu2_big(&rising).shift(l as i64);
            let corollary = Valuation::Finite(3 * l as i64 - s2(m + l) as i64 + s2(m - l) as i64);
            report.check(direct == theorem && theorem == corollary, || {
                json!({"l": l, "m": m, "direct": direct, "pochhammer": theorem, "digit_sum": corollary})
            });
        }
    }
    Ok(report)
}

/// `L_k(n) = sum_{j=1}^{n} 2^j / j^k`.
pub fn cohen_sum(k: u32, n: u64) -> Result<BigRat> {
    let (numerators, den) = cohen_numerators(k, n)?;
    Ok(BigRat::new(numerators.last().expect("n >= 1").clone(), den))
}

/// Numerators of `L_k(1..=n_max)` over the shared denominator
/// `lcm(1..=n_max)^k`, unreduced.
fn cohen_numerators(k: u32, n_max: u64) -> Result<(Vec<BigSigned>, BigSigned)> {
    if k == 0 || n_max == 0 {
        return Err(invalid("need k >= 1 and n >= 1"));
    }
    let lcm = (1..=n_max).fold(BigSigned::one(), |acc, j| acc.lcm(&BigSigned::from(j)));
    let den = lcm.pow(k);
    let mut out = Vec::with_capacity(n_max as usize);
    let mut acc = BigSigned::zero();
    for j in 1..=n_max {
        acc += (&den / BigSigned::from(j).pow(k)) << j;
        out.push(acc.clone());
    }
    Ok((out, den))
}

/// `nu_2(L_k(n))` for `1 <= n <= n_max`, without reducing each fraction.
pub fn cohen_valuations(k: u32, n_max: u64) -> Result<Vec<Valuation>> {
    let (numerators, den) = cohen_numerators(k, n_max)?;
    let d = nu2_signed(&den);
    Ok(numerators.iter().map(|num| nu2_signed(num) + Valuation::Finite(-d.finite().expect("den > 0"))).collect())
}

/// `[L_k(1), ..., L_k(n_max)]`.
pub fn cohen_partial_sums(k: u32, n_max: u64) -> Result<Vec<BigRat>> {
    if k == 0 || n_max == 0 {
        return Err(invalid("need k >= 1 and n >= 1"));
    }
    let mut out = Vec::with_capacity(n_max as usize);
    let mut acc = BigRat::zero();
    let mut pow2 = BigSigned::one();
    for j in 1..=n_max {
        pow2 <<= 1;
        acc += BigRat::new(pow2.clone(), BigSigned::from(j).pow(k));
        out.push(acc.clone());
    }
    Ok(out)
}

/// Predicted `nu_2(L_k(2^m))` for `k = 1, 2` and `m >= 4`.
pub fn cohen_prediction(k: u32, m: u32) -> Option<i64> {
    if m < 4 {
        return None;
    }
    let p = 1i64 << m;
    match k {
        1 => Some(p + 2 * m as i64 - 4),
        2 => Some(p + m as i64 - 1),
        _ => None,
    }
}

/// `nu_2(L_1(2^m))` and `nu_2(L_2(2^m))` for `m_min <= m <= m_max`. Exponents
/// below 4 are evaluated and listed but not asserted.
pub fn cohen_check(m_min: u32, m_max: u32) -> Result<ConjectureReport> {
    if m_max > 14 {
        return Err(invalid("m_max above 14 is too expensive for exact sums"));
    }
    let mut report = ConjectureReport::new("cohen").param("m_min", m_min).param("m_max", m_max);
    if m_min > m_max {
        return Ok(report);
    }
    let n_top = 1u64 << m_max;
    let l1 = cohen_valuations(1, n_top)?;
    let l2 = cohen_valuations(2, n_top)?;
    let mut rows = Vec::new();
    let mut out_of_range = Vec::new();
    for m in m_min..=m_max {
        let idx = (1usize << m) - 1;
        let (v1, v2) = (l1[idx], l2[idx]);
        rows.push(json!({"m": m, "l1": v1, "l2": v2}));
        match (cohen_prediction(1, m), cohen_prediction(2, m)) {
            (Some(p1), Some(p2)) => {
                report.check(v1 == Valuation::Finite(p1), || json!({"m": m, "k": 1, "expected": p1, "found": v1}));
                report.check(v2 == Valuation::Finite(p2), || json!({"m": m, "k": 2, "expected": p2, "found": v2}));
            }
            _ => out_of_range.push(m),
        }
    }
    if !out_of_range.is_empty() {
        report.note(format!("out of stated range (m < 4), not asserted: {out_of_range:?}"));
        report.set("out_of_stated_range", json!(out_of_range));
    }
    report.set("valuations", json!(rows));
    Ok(report)
}

/// `T_p(n, k) = sum_{0 <= j <= k, p does not divide j} (-1)^(k-j) C(k, j) j^n`.
pub fn t_sum(p: u64, n: u64, k: u64) -> Result<BigSigned> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 || k == 0 {
        return Err(invalid("need n >= 1 and k >= 1"));
    }
    let exp = u32::try_from(n).map_err(|_| invalid("n too large"))?;
    let mut sum = BigSigned::zero();
    for j in (1..=k).filter(|j| j % p != 0) {
        let term = BigInt::from(binomial(k, j)) * BigInt::from(j).pow(exp);
        if (k - j).is_even() {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}

/// `nu_2(k! S(n,k)) = nu_2(T_2(n,k))` for `1 <= k <= k_max`, `k <= n <= n_max`.
pub fn clarke_conjecture_check(n_max: u64, k_max: u32, precision: Precision) -> Result<ConjectureReport> {
    if k_max == 0 || n_max < k_max as u64 {
        return Err(invalid("need n_max >= k_max >= 1"));
    }
    let mut report = ConjectureReport::new("clarke-conjecture").param("n_max", n_max).param("k_max", k_max);
    for k in 1..=k_max {
        let engine = ModStirlingEngine::with_precision(k, precision);
        for n in k as u64..=n_max {
            let t = nu2_signed(&t_sum(2, n, k as u64)?);
            match engine.factorial_scaled_valuation(n) {
                ValuationOutcome::Exact(v) => {
                    report.check(v == t, || json!({"n": n, "k": k, "stirling_side": v, "t_side": t}))
                }
                ValuationOutcome::PrecisionExceeded { bits } => {
                    report.inconclusive(json!({"n": n, "k": k, "precision_exceeded": bits}))
                }
            }
        }
    }
    report.note("only n >= k is tested: below it k! S(n,k) = 0 while T_2(n,k) need not vanish");
    report.note("the identity is a conjecture; agreement here is empirical");
    Ok(report)
}
