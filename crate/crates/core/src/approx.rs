//! Integer approximations to `nu_2(S(m, 5))` and their error terms.

use serde_json::json;

use crate::error::{invalid, Result};
use crate::padic::nu2_u64;
use crate::report::ConjectureReport;
use crate::stirling::{ModStirlingEngine, Precision};
use crate::valuation::{Valuation, ValuationOutcome};

/// `(1 - (-1)^(m mod p)) / 2`: 1 when `m mod p` is odd.
pub fn lambda_p(p: u64, m: u64) -> u64 {
    (m % p) & 1
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn f1(m: u64) -> u64 {
    (m + 1) / 2 + 112 * lambda_p(2, m) + 50 * lambda_p(2, m + 1)
}

pub fn x1(m: u64) -> u64 {
    156 + 125 * (4 * m / 3) + 6 * ((2 * m + 1) / 3)
}

/// Membership in `{ x1(m) : m >= 0 }`, by binary search on the increasing `x1`.
pub fn in_i1(n: u64) -> bool {
    in_increasing(n, x1)
}

pub fn x2(m: u64) -> u64 {
    109 + 107 * ((4 * m + 2) / 3) + 85 * ((4 * m + 1) / 3)
}

pub fn in_i2(n: u64) -> bool {
    in_increasing(n, x2)
}

fn in_increasing(n: u64, f: fn(u64) -> u64) -> bool {
    // Both sequences grow by more than 1 per step, so m <= n.
    let (mut lo, mut hi) = (0u64, n + 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match f(mid).cmp(&n) {
            std::cmp::Ordering::Equal => return true,
            std::cmp::Ordering::Less => lo = mid + 1,
            std::cmp::Ordering::Greater => hi = mid,
        }
    }
    false
}

/// `(m3, alpha, beta)`.
pub fn aux_indicators(m: u64) -> (u64, i64, i64) {
    let l3 = |x| lambda_p(3, x) as i64;
    let l2 = |x| lambda_p(2, x) as i64;
    let m3 = (m + 2) % 3;
    let alpha = l3(m + 2) * (1 + l3(m)) + l2(m + 1) * l3(m);
    let beta = alpha + sign(m as i64 + 1) * l3(m);
    (m3, alpha, beta)
}

pub fn f2(m: u64) -> u64 {
    let (m3, _, _) = aux_indicators(m);
    let central = [1u64, 2, 6][m3 as usize];
    central * ((m + 2) / 3) + 208 * lambda_p(3, m + 1) + 27 * lambda_p(2, m) * lambda_p(3, m)
}

/// May be 0 (at `m = 0`).
pub fn f3(m: u64) -> u64 {
    let l3 = lambda_p(3, m);
    let lead = if l3 == 1 { 1 } else { 4 };
    lead * ((m + 2) / 3) + l3 * (85 * l3 + 8 * lambda_p(2, m + 1) + 2 * lambda_p(3, m + 1))
}

/// Evaluates the error terms with one shared `k = 5` engine.
#[derive(Debug, Clone)]
pub struct Approximator {
    engine: ModStirlingEngine,
}

impl Default for Approximator {
    fn default() -> Self {
        Approximator::new(Precision::default())
    }
}

impl Approximator {
    pub fn new(precision: Precision) -> Self {
        Approximator { engine: ModStirlingEngine::with_precision(5, precision) }
    }

    pub fn q(&self, n: u64) -> ValuationOutcome {
        self.engine.valuation(n)
    }

    /// `nu_2(S(m,5)) - nu_2(f1(m))` for `m >= 5`.
    pub fn err1(&self, m: u64) -> Result<i64> {
        if m < 5 {
            return Err(invalid("Err1 needs m >= 5"));
        }
        let q = self.engine.valuation_result(m)?.finite().expect("S(m,5) > 0");
        let f = nu2_u64(f1(m)).finite().expect("f1 > 0");
        Ok(q - f)
    }

    /// `Err1(x1(m)) - (-1)^alpha_m nu_2(f2(m))`.
    pub fn err2(&self, m: u64) -> Result<i64> {
        let (_, alpha, _) = aux_indicators(m);
        let f = nu2_u64(f2(m)).finite().expect("f2 > 0");
        Ok(self.err1(x1(m))? - sign(alpha) * f)
    }
}

pub fn err1(m: u64) -> Result<i64> {
    Approximator::default().err1(m)
}

pub fn err2(m: u64) -> Result<i64> {
    Approximator::default().err2(m)
}

/// Three sub-reports over `[5, n_max]`:
///
/// * `first-approximation`: indices where `nu_2(S(n,5)) != nu_2(f1(n))`
///   against `I1`;
/// * `second-approximation`: `Err1(x1(m)) = (-1)^alpha_m nu_2(f2(m))` for
///   `x1(m) <= n_max`, exempting `m` in `I2`;
/// * `third-approximation`: agreement census of `Err2(x2(m))` with
///   `(-1)^beta(x2(m)) nu_2(f3(x2(m)))` for `x2(m) <= n_max`; never asserted.
pub fn approx_report(n_max: u64, precision: Precision) -> Result<ConjectureReport> {
    if n_max < 156 {
        return Err(invalid("m_max must be at least 156"));
    }
    let ap = Approximator::new(precision);
    let mut report = ConjectureReport::new("approx").param("m_max", n_max);

    let mut first = ConjectureReport::new("first-approximation");
    let mut disagree = Vec::new();
    for n in 5..=n_max {
        match ap.q(n) {
            ValuationOutcome::Exact(q) => {
                let differs = q != nu2_u64(f1(n));
                if differs {
                    disagree.push(n);
                }
                first.check(differs == in_i1(n), || {
                    json!({"n": n, "disagrees": differs, "in_i1": in_i1(n), "q": q, "f1": f1(n)})
                });
            }
            ValuationOutcome::PrecisionExceeded { bits } => {
                first.inconclusive(json!({"n": n, "precision_exceeded": bits}))
            }
        }
    }
    if let Some(&n) = disagree.first() {
        first.set("first_disagreement", json!({"n": n, "err1": ap.err1(n)?}));
    }
    first.set("disagreements", json!(disagree));
    report.push_sub(first);

    let mut second = ConjectureReport::new("second-approximation");
    let mut exempt = Vec::new();
    let mut rows = Vec::new();
    for m in (0..).take_while(|&m| x1(m) <= n_max) {
        let (_, alpha, _) = aux_indicators(m);
        let lhs = ap.err1(x1(m));
        let lhs = match lhs {
            Ok(v) => v,
            Err(crate::Error::PrecisionExceeded { bits, .. }) => {
                second.inconclusive(json!({"m": m, "x1": x1(m), "precision_exceeded": bits}));
                continue;
            }
            Err(e) => return Err(e),
        };
        let rhs = sign(alpha) * nu2_u64(f2(m)).finite().expect("f2 > 0");
        rows.push(json!({"m": m, "x1": x1(m), "err1": lhs, "predicted": rhs}));
        if in_i2(m) {
            exempt.push(json!({"m": m, "holds": lhs == rhs}));
            continue;
        }
        second.check(lhs == rhs, || json!({"m": m, "x1": x1(m), "err1": lhs, "predicted": rhs}));
    }
    second.set("rows", json!(rows));
    second.set("exempt_in_i2", json!(exempt));
    report.push_sub(second);

    let mut third = ConjectureReport::new("third-approximation");
    let mut agree = Vec::new();
    let mut differ = Vec::new();
    for m in (0..).take_while(|&m| x2(m) <= n_max) {
        let n = x2(m);
        let (_, _, beta) = aux_indicators(n);
        let lhs = match ap.err2(n) {
            Ok(v) => v,
            Err(crate::Error::PrecisionExceeded { bits, .. }) => {
                third.inconclusive(json!({"m": m, "precision_exceeded": bits}));
                continue;
            }
            Err(e) => return Err(e),
        };
        let rhs = match nu2_u64(f3(n)) {
            Valuation::Finite(v) => json!(sign(beta) * v),
            Valuation::Infinite => json!("inf"),
        };
        if rhs == json!(lhs) {
            agree.push(m);
        } else {
            differ.push(json!({"m": m, "x2": n, "err2": lhs, "predicted": rhs}));
        }
    }
    third.set("agree", json!(agree));
    third.set("disagree", json!(differ));
    third.note("census only: the claim is for most values, with no exception set");
    report.push_sub(third);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_p(2, 7), 1);
        assert_eq!(lambda_p(2, 4), 0);
        assert_eq!(lambda_p(3, 4), 1);
        assert_eq!(lambda_p(3, 5), 0);
    }

    #[test]
    fn f1_examples() {
        assert_eq!(f1(28), 64);
        assert_eq!(f1(31), 128);
        assert_eq!(f1(156), 128);
        assert_eq!(err1(156).unwrap(), 4);
        assert_eq!(err1(28).unwrap(), 0);
    }

    #[test]
    fn i1_examples() {
        assert_eq!((0..5).map(x1).collect::<Vec<_>>(), vec![156, 287, 412, 668, 799]);
        assert!(in_i1(156) && in_i1(799));
        assert!(!in_i1(157));
        assert!(!in_i1(0));
        for m in 0..1000 {
            let x = x1(m);
            assert!(in_i1(x));
            assert!(!in_i1(x + 1));
            if m % 3 == 1 {
                assert_eq!(x % 2, 1);
            } else {
                assert_eq!(x % 256, 156);
            }
        }
    }

    #[test]
    fn aux_examples() {
        assert_eq!(aux_indicators(1), (0, 0, 1));
        assert_eq!(aux_indicators(0), (2, 0, 0));
        assert_eq!(aux_indicators(4).0, 0);
        assert_eq!(aux_indicators(4).1, 1);
    }

    #[test]
    fn f2_f3_examples() {
        assert_eq!(f2(0), 208);
        assert_eq!(nu2_u64(f2(0)), Valuation::Finite(4));
        assert_eq!(x2(0), 109);
        assert_eq!(x2(1), 408);
        assert_eq!(f3(1), 86);
        assert_eq!(f3(0), 0);
        assert_eq!(nu2_u64(f3(0)), Valuation::Infinite);
        assert_eq!(f3(4), 95);
        assert!(in_i2(109) && in_i2(408) && !in_i2(110));
    }

    #[test]
    fn increasing() {
        for m in 0..10_000 {
            assert!(x1(m + 1) > x1(m));
            assert!(x2(m + 1) > x2(m));
        }
    }

    #[test]
    fn report_to_1000() {
        let r = approx_report(1000, Precision::default()).unwrap();
        let first = r.find("first-approximation").unwrap();
        assert!(first.is_consistent());
        assert_eq!(first.data["disagreements"], json!([156, 287, 412, 668, 799, 924]));
        assert_eq!(first.data["first_disagreement"], json!({"n": 156, "err1": 4}));
        assert!(r.find("second-approximation").unwrap().is_consistent());
        assert!(approx_report(155, Precision::default()).is_err());
    }
}
