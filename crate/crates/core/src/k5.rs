//! The order `k = 5`: the surviving chain of classes, exceptional indices
//! `i` with `q(4i) != q(4i+3)` where `q(n) = nu_2(S(n,5))`, and the c-set.

use serde::Serialize;
use serde_json::json;

use crate::classes::{build_level_tree_with, classify_with, ClassStatus, ResidueClass, ValuationCache};
use crate::error::{invalid, Error, Result};
use crate::report::ConjectureReport;
use crate::stirling::Precision;
use crate::valuation::Valuation;

const K: u32 = 5;

/// Members inspected per class in the `k = 5` checks (indices `i <= 200`).
pub const K5_SAMPLES: u32 = 201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainLink {
    pub level: u32,
    /// Residue of the non-constant class on the `0 mod 4` branch.
    pub j: u64,
    /// Its constant sibling at the same level.
    pub sibling_j: u64,
    pub sibling_value: Valuation,
}

/// Surviving class at each level `2..=m_max` on the branch through `C_{2,0}`.
pub fn k5_surviving_chain(m_max: u32) -> Result<Vec<ChainLink>> {
    k5_surviving_chain_with(m_max, K5_SAMPLES, Precision::default())
}

pub fn k5_surviving_chain_with(m_max: u32, samples: u32, precision: Precision) -> Result<Vec<ChainLink>> {
    if m_max < 2 {
        return Err(invalid("m_max must be at least 2"));
    }
    let tree = build_level_tree_with(K, m_max, samples, precision)?;
    let mut chain = Vec::new();
    for m in 2..=m_max {
        let level = tree.level(m).expect("level built");
        let live: Vec<u64> = level.survivors.iter().copied().filter(|j| j % 4 == 0).collect();
        let [j] = live[..] else {
            return Err(Error::Inconclusive(format!(
                "level {m}: expected one non-constant class on the 0 mod 4 branch, found {live:?}"
            )));
        };
        let sibling_j = j ^ (1u64 << (m - 1));
        let sibling_value = level
            .status_of(sibling_j)
            .and_then(ClassStatus::constant_value)
            .ok_or_else(|| Error::Inconclusive(format!("level {m}: sibling C_{{{m},{sibling_j}}} not constant")))?;
        chain.push(ChainLink { level: m, j, sibling_j, sibling_value });
    }
    Ok(chain)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExceptionalScan {
    pub i_max: u64,
    pub indices: Vec<u64>,
    /// `(i, q(4i), q(4i+3))` for each exceptional `i`.
    pub pairs: Vec<(u64, Valuation, Valuation)>,
    /// Exceptional set equals `{ 32j + 7 : j >= 0 } ∩ [2, i_max]`.
    pub matches_pattern: bool,
}

pub fn exceptional_indices(i_max: u64) -> Result<ExceptionalScan> {
    exceptional_indices_with(i_max, Precision::default())
}

pub fn exceptional_indices_with(i_max: u64, precision: Precision) -> Result<ExceptionalScan> {
    if i_max < 2 {
        return Err(invalid("i_max must be at least 2"));
    }
    let mut cache = ValuationCache::new(K, precision);
    let mut indices = Vec::new();
    let mut pairs = Vec::new();
    for i in 2..=i_max {
        let a = cache.get(4 * i)?;
        let b = cache.get(4 * i + 3)?;
        if a != b {
            indices.push(i);
            pairs.push((i, a, b));
        }
    }
    let pattern: Vec<u64> = (2..=i_max).filter(|i| i % 32 == 7).collect();
    let matches_pattern = pattern == indices;
    Ok(ExceptionalScan { i_max, indices, pairs, matches_pattern })
}

pub fn exceptional_report(i_max: u64, precision: Precision) -> Result<ConjectureReport> {
    let mut report = ConjectureReport::new("exceptional").param("i_max", i_max);
    let scan = match exceptional_indices_with(i_max, precision) {
        Ok(s) => s,
        Err(Error::PrecisionExceeded { n, k, bits }) => {
            report.inconclusive(json!({"n": n, "k": k, "precision_exceeded": bits}));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    for i in 2..=i_max {
        let in_pattern = i % 32 == 7;
        let exceptional = scan.indices.binary_search(&i).is_ok();
        report.check(in_pattern == exceptional, || json!({"i": i, "exceptional": exceptional, "pattern": in_pattern}));
    }
    report.note("pattern tested is 32j + 7 with j >= 0, so i = 7 is included");
    report.set("scan", serde_json::to_value(&scan).expect("scan serialises"));
    Ok(report)
}

/// `c_1` is the first member of `C_{2,0}`; `c_i` is the first member of the
/// level-`(i+1)` chain class that exceeds `c_{i-1}`.
pub fn c_set_sequence(count: usize) -> Result<Vec<u64>> {
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    let m_max = u32::try_from(count + 1).map_err(|_| invalid("count too large"))?;
    if m_max > crate::classes::MAX_LEVEL {
        return Err(invalid(format!("count must be at most {}", crate::classes::MAX_LEVEL - 1)));
    }
    let chain = k5_surviving_chain_with(m_max.max(2), 64, Precision::default())?;
    let mut out: Vec<u64> = Vec::with_capacity(count);
    for link in chain.iter().take(count) {
        let class = ResidueClass::new(K, link.level, link.j)?;
        let prev = out.last().copied();
        let next = class.members().find(|&n| prev.is_none_or(|p| n > p)).expect("classes are infinite");
        out.push(next);
    }
    Ok(out)
}

fn scan_family(
    cache: &mut ValuationCache,
    report: &mut ConjectureReport,
    label: &str,
    modulus: u64,
    offset: u64,
    i_max: u64,
    ok: impl Fn(i64) -> bool,
) -> Result<()> {
    for i in 0..=i_max {
        let n = modulus * i + offset;
        if n < K as u64 {
            continue;
        }
        match cache.get(n) {
            Ok(v) => report.check(v.finite().is_some_and(&ok), || json!({"family": label, "n": n, "valuation": v})),
            Err(Error::PrecisionExceeded { bits, .. }) => {
                report.inconclusive(json!({"family": label, "n": n, "precision_exceeded": bits}))
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// For `3 <= m <= m_max` and both level-`(m-1)` survivors: every sampled
/// member of both children exceeds `m - 3`, exactly one child is constant
/// at `m - 2`, and the other child's samples all exceed `m - 2`. Also scans
/// the fixed congruence families for `i <= i_max`.
pub fn k5_theorem_report(m_max: u32, i_max: u64, precision: Precision) -> Result<ConjectureReport> {
    if m_max < 3 {
        return Err(invalid("m_max must be at least 3"));
    }
    let samples = u32::try_from(i_max + 1).map_err(|_| invalid("i_max too large"))?.max(2);
    let mut cache = ValuationCache::new(K, precision);
    let tree = build_level_tree_with(K, m_max, samples, precision)?;

    let mut split = ConjectureReport::new("level-splitting").param("m_max", m_max).param("samples", samples);
    for m in 3..=m_max {
        let parent = tree.level(m - 1).expect("level built");
        split.check(parent.survivors.len() == 2, || {
            json!({"level": m - 1, "survivors": parent.survivors})
        });
        for &pj in &parent.survivors {
            let children = ResidueClass { k: K, m: m - 1, j: pj }.children();
            let mut constant_at = 0;
            let mut above = 0;
            for child in &children {
                let members: Vec<u64> = child.members().take(samples as usize).collect();
                let mut vals = Vec::with_capacity(members.len());
                for &n in &members {
                    match cache.get(n) {
                        Ok(v) => vals.push((n, v.finite().unwrap_or(i64::MAX))),
                        Err(Error::PrecisionExceeded { bits, .. }) => {
                            split.inconclusive(json!({"level": m, "n": n, "precision_exceeded": bits}))
                        }
                        Err(e) => return Err(e),
                    }
                }
                let low: Vec<_> = vals.iter().filter(|&&(_, v)| v <= m as i64 - 3).collect();
                split.check(low.is_empty(), || json!({"level": m, "j": child.j, "not_above_m_minus_3": low}));
                let target = m as i64 - 2;
                if vals.iter().all(|&(_, v)| v == target) {
                    constant_at += 1;
                } else if vals.iter().all(|&(_, v)| v > target) {
                    above += 1;
                }
            }
            split.check(constant_at == 1 && above == 1, || {
                json!({"level": m, "parent_j": pj, "constant_at_m_minus_2": constant_at, "above_m_minus_2": above})
            });
        }
    }

    let mut families = ConjectureReport::new("congruence-families").param("i_max", i_max);
    let table: [(&str, u64, u64, fn(i64) -> bool); 8] = [
        ("8i", 8, 0, |v| v == 1),
        ("8i+3", 8, 3, |v| v == 1),
        ("8i+4", 8, 4, |v| v >= 2),
        ("8i+7", 8, 7, |v| v >= 2),
        ("16i+4", 16, 4, |v| v == 2),
        ("16i+7", 16, 7, |v| v == 2),
        ("16i+12", 16, 12, |v| v >= 3),
        ("16i+15", 16, 15, |v| v >= 3),
    ];
    for (label, modulus, offset, ok) in table {
        scan_family(&mut cache, &mut families, label, modulus, offset, i_max, ok)?;
    }

    let mut chain_report = ConjectureReport::new("surviving-chain").param("m_max", m_max);
    match k5_surviving_chain_with(m_max, samples, precision) {
        Ok(chain) => {
            for link in &chain {
                chain_report.check(link.sibling_value == Valuation::Finite(link.level as i64 - 2), || {
                    json!(link)
                });
            }
            chain_report.set("chain", serde_json::to_value(&chain).expect("chain serialises"));
        }
        Err(Error::Inconclusive(why)) => chain_report.inconclusive(json!({"reason": why})),
        Err(e) => return Err(e),
    }

    let mut report = ConjectureReport::new("k5-theorem").param("m_max", m_max).param("i_max", i_max);
    report.push_sub(split);
    report.push_sub(families);
    report.push_sub(chain_report);
    report.note(format!("constancy judged on the first {samples} members of each class"));
    Ok(report)
}

/// Valuations of the `C_{2,0}` members `8, 12, 16, ...` (first `count`).
pub fn c20_values(count: usize) -> Result<Vec<Valuation>> {
    let mut cache = ValuationCache::new(K, Precision::default());
    let class = ResidueClass::new(K, 2, 0)?;
    class.members().take(count).map(|n| cache.get(n)).collect()
}

/// Classify one `k = 5` class over `samples` members.
pub fn classify_k5(m: u32, j: u64, samples: u32) -> Result<ClassStatus> {
    let mut cache = ValuationCache::new(K, Precision::default());
    classify_with(&mut cache, &ResidueClass::new(K, m, j)?, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(v: &[i64]) -> Vec<Valuation> {
        v.iter().map(|&x| Valuation::Finite(x)).collect()
    }

    #[test]
    fn chain_residues() {
        let chain = k5_surviving_chain(10).unwrap();
        let js: Vec<u64> = chain.iter().map(|l| l.j).collect();
        assert_eq!(js, vec![0, 4, 12, 28, 28, 28, 156, 156, 156]);
        for link in &chain {
            assert_eq!(link.sibling_value, Valuation::Finite(link.level as i64 - 2));
        }
        assert_eq!(chain[1].sibling_j, 0);
        assert_eq!(chain[2].sibling_j, 4);
        assert!(k5_surviving_chain(1).is_err());
    }

    #[test]
    fn exceptional_examples() {
        let scan = exceptional_indices(110).unwrap();
        assert_eq!(scan.indices, vec![7, 39, 71, 103]);
        assert!(scan.matches_pattern);
        assert_eq!(scan.pairs[0], (7, Valuation::Finite(6), Valuation::Finite(7)));
        assert!(exceptional_indices(1).is_err());
        assert!(exceptional_report(200, Precision::default()).unwrap().is_consistent());
    }

    #[test]
    fn c_set_examples() {
        assert_eq!(c_set_sequence(9).unwrap(), vec![8, 12, 28, 60, 92, 156, 412, 668, 1180]);
        assert_eq!(c_set_sequence(1).unwrap(), vec![8]);
        assert!(c_set_sequence(0).is_err());
    }

    #[test]
    fn c20_prefix() {
        assert_eq!(
            c20_values(20).unwrap(),
            fin(&[1, 3, 1, 2, 1, 6, 1, 2, 1, 3, 1, 2, 1, 4, 1, 2, 1, 3, 1, 2])
        );
    }

    #[test]
    fn corollary_class() {
        assert_eq!(
            classify_k5(2, 1, 50).unwrap(),
            ClassStatus::ConstantUpTo { value: Valuation::Finite(0), samples: 50 }
        );
        assert_eq!(
            classify_k5(2, 2, 50).unwrap(),
            ClassStatus::ConstantUpTo { value: Valuation::Finite(0), samples: 50 }
        );
    }

    #[test]
    fn theorem_report_small() {
        let r = k5_theorem_report(7, 60, Precision::default()).unwrap();
        assert!(r.is_consistent(), "{}", r.to_json_pretty());
    }
}
