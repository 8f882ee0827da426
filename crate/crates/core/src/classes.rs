//! Residue classes `C_{m,j} = { 2^m i + j >= k }` and the level tree of
//! classes on which `nu_2(S(n, k))` is not constant.

use std::collections::HashMap;

use serde::Serialize;
use serde_json::json;

use crate::error::{invalid, Error, Result};
use crate::report::ConjectureReport;
use crate::stirling::{ModStirlingEngine, Precision};
use crate::valuation::Valuation;

/// Highest level accepted; keeps `2^m * samples` inside `u64`.
pub const MAX_LEVEL: u32 = 40;

/// Default number of members inspected before a class is called constant.
pub const DEFAULT_SAMPLES: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ResidueClass {
    pub k: u32,
    pub m: u32,
    /// Always reduced, `0 <= j < 2^m`.
    pub j: u64,
}

impl ResidueClass {
    /// `j` is reduced mod `2^m`.
    pub fn new(k: u32, m: u32, j: u64) -> Result<Self> {
        if m == 0 || m > MAX_LEVEL {
            return Err(invalid(format!("level must be in 1..={MAX_LEVEL}, got {m}")));
        }
        Ok(ResidueClass { k, m, j: j & ((1u64 << m) - 1) })
    }

    pub fn modulus(&self) -> u64 {
        1u64 << self.m
    }

    /// Smallest `i` with `2^m i + j >= k`.
    fn first_i(&self) -> u64 {
        let k = self.k as u64;
        if self.j >= k {
            0
        } else {
            (k - self.j).div_ceil(self.modulus())
        }
    }

    /// The `idx`-th member (0-based) in increasing order.
    pub fn member(&self, idx: u64) -> u64 {
        (self.first_i() + idx) * self.modulus() + self.j
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        (0..).map(move |i| self.member(i))
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.k as u64 && n % self.modulus() == self.j
    }

    /// `C_{m+1, j}` and `C_{m+1, j + 2^m}`.
    pub fn children(&self) -> [ResidueClass; 2] {
        let m = self.m + 1;
        [
            ResidueClass { k: self.k, m, j: self.j },
            ResidueClass { k: self.k, m, j: self.j + self.modulus() },
        ]
    }
}

pub fn class_members(c: &ResidueClass, count: usize) -> Result<Vec<u64>> {
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    Ok(c.members().take(count).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub n: u64,
    pub valuation: Valuation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ClassStatus {
    /// Every one of the first `samples` members has valuation `value`.
    ConstantUpTo { value: Valuation, samples: u32 },
    /// Two members with different valuations, in increasing order of `n`.
    NonConstant { witnesses: [Witness; 2] },
    /// The valuation of member `n` could not be settled.
    Inconclusive { n: u64, reason: String },
}

impl ClassStatus {
    pub fn is_non_constant(&self) -> bool {
        matches!(self, ClassStatus::NonConstant { .. })
    }

    pub fn constant_value(&self) -> Option<Valuation> {
        match self {
            ClassStatus::ConstantUpTo { value, .. } => Some(*value),
            _ => None,
        }
    }
}

/// Memoised `nu_2(S(n, k))` for one `k`.
#[derive(Debug)]
pub struct ValuationCache {
    engine: ModStirlingEngine,
    memo: HashMap<u64, Valuation>,
}

impl ValuationCache {
    pub fn new(k: u32, precision: Precision) -> Self {
        ValuationCache { engine: ModStirlingEngine::with_precision(k, precision), memo: HashMap::new() }
    }

    pub fn k(&self) -> u32 {
        self.engine.k()
    }

    pub fn get(&mut self, n: u64) -> Result<Valuation> {
        if let Some(v) = self.memo.get(&n) {
            return Ok(*v);
        }
        let v = self.engine.valuation_result(n)?;
        self.memo.insert(n, v);
        Ok(v)
    }
}

/// Scan the first `samples` members; stop at the first disagreement.
pub fn classify_with(cache: &mut ValuationCache, c: &ResidueClass, samples: u32) -> Result<ClassStatus> {
    if samples < 2 {
        return Err(invalid("samples must be at least 2"));
    }
    if cache.k() != c.k {
        return Err(invalid(format!("cache is for k = {}, class for k = {}", cache.k(), c.k)));
    }
    let mut first: Option<Witness> = None;
    for n in c.members().take(samples as usize) {
        let v = cache.get(n)?;
        if v.is_infinite() {
            return Ok(ClassStatus::Inconclusive { n, reason: "zero Stirling number inside class".into() });
        }
        match first {
            None => first = Some(Witness { n, valuation: v }),
            Some(w) if w.valuation != v => {
                return Ok(ClassStatus::NonConstant { witnesses: [w, Witness { n, valuation: v }] })
            }
            Some(_) => {}
        }
    }
    let value = first.expect("samples >= 2").valuation;
    Ok(ClassStatus::ConstantUpTo { value, samples })
}

pub fn classify_class(c: &ResidueClass, samples: u32) -> Result<ClassStatus> {
    classify_with(&mut ValuationCache::new(c.k, Precision::default()), c, samples)
}

/// `m0` with `2^(m0-1) < k <= 2^m0`.
pub fn m0_of(k: u32) -> u32 {
    if k <= 1 {
        0
    } else {
        32 - (k - 1).leading_zeros()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassEntry {
    pub j: u64,
    #[serde(flatten)]
    pub status: ClassStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Level {
    pub m: u32,
    /// Residues of the non-constant classes, ascending.
    pub survivors: Vec<u64>,
    /// Every class examined at this level, ascending by residue.
    pub classes: Vec<ClassEntry>,
    pub inconclusive: bool,
}

impl Level {
    /// Residues and values of the classes judged constant.
    pub fn constants(&self) -> Vec<(u64, Valuation)> {
        self.classes.iter().filter_map(|c| c.status.constant_value().map(|v| (c.j, v))).collect()
    }

    pub fn status_of(&self, j: u64) -> Option<&ClassStatus> {
        self.classes.iter().find(|c| c.j == j).map(|c| &c.status)
    }
}

/// Level 1 holds `C_{1,0}` and `C_{1,1}`; level `m + 1` holds the two
/// children of every level-`m` class that is not constant. Inconclusive
/// classes are split as well so nothing is dropped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelTree {
    pub k: u32,
    pub m0: u32,
    pub samples: u32,
    pub levels: Vec<Level>,
}

impl LevelTree {
    pub fn level(&self, m: u32) -> Option<&Level> {
        self.levels.get(m.checked_sub(1)? as usize)
    }

    pub fn first_constant_level(&self) -> Option<u32> {
        self.levels.iter().find(|l| !l.constants().is_empty()).map(|l| l.m)
    }
}

pub fn build_level_tree(k: u32, m_max: u32, samples: u32) -> Result<LevelTree> {
    build_level_tree_with(k, m_max, samples, Precision::default())
}

pub fn build_level_tree_with(k: u32, m_max: u32, samples: u32, precision: Precision) -> Result<LevelTree> {
    if k < 3 {
        return Err(invalid(format!("level trees need k >= 3, got {k}")));
    }
    if !(2..=MAX_LEVEL).contains(&m_max) {
        return Err(invalid(format!("m_max must be in 2..={MAX_LEVEL}, got {m_max}")));
    }
    if samples < 2 {
        return Err(invalid("samples must be at least 2"));
    }
    let mut cache = ValuationCache::new(k, precision);
    let mut levels: Vec<Level> = Vec::new();
    let mut frontier: Vec<ResidueClass> = vec![ResidueClass::new(k, 1, 0)?, ResidueClass::new(k, 1, 1)?];
    for m in 1..=m_max {
        let mut classes = Vec::with_capacity(frontier.len());
        for c in &frontier {
            let status = match classify_with(&mut cache, c, samples) {
                Ok(s) => s,
                Err(Error::PrecisionExceeded { n, bits, .. }) => {
                    ClassStatus::Inconclusive { n, reason: format!("residue zero modulo 2^{bits}") }
                }
                Err(e) => return Err(e),
            };
            classes.push(ClassEntry { j: c.j, status });
        }
        classes.sort_by_key(|c| c.j);
        let survivors: Vec<u64> =
            classes.iter().filter(|c| c.status.is_non_constant()).map(|c| c.j).collect();
        let inconclusive = classes.iter().any(|c| matches!(c.status, ClassStatus::Inconclusive { .. }));
        frontier = classes
            .iter()
            .filter(|c| c.status.constant_value().is_none())
            .flat_map(|c| ResidueClass { k, m, j: c.j }.children())
            .collect();
        levels.push(Level { m, survivors, classes, inconclusive });
    }
    Ok(LevelTree { k, m0: m0_of(k), samples, levels })
}

/// Checks, on the level tree up to `m_max`:
///
/// 1. no level below `m0 - 1` has a constant class, and level `m0 - 1` has one;
/// 2. every level `m >= m0` has exactly `2^(m0-2)` non-constant classes, and
///    each of them has exactly one non-constant child.
pub fn verify_main_conjecture(k: u32, m_max: u32, samples: u32) -> Result<ConjectureReport> {
    verify_main_conjecture_with(k, m_max, samples, Precision::default())
}

pub fn verify_main_conjecture_with(
    k: u32,
    m_max: u32,
    samples: u32,
    precision: Precision,
) -> Result<ConjectureReport> {
    let mut report = ConjectureReport::new("main-conjecture")
        .param("k", k)
        .param("m_max", m_max)
        .param("samples", samples)
        .param("max_bits", precision.max_bits);
    if k <= 4 {
        report.note(format!(
            "k = {k}: the valuation depends only on the parity of n, so both level-1 classes are \
             constant and no later level exists; the class-count claim has nothing to count"
        ));
        report.inconclusive(json!({"k": k, "reason": "degenerate order"}));
        return Ok(report);
    }
    let tree = build_level_tree_with(k, m_max, samples, precision)?;
    let m0 = tree.m0;
    let expected = 1usize << (m0 - 2);
    report.set("m0", m0);
    report.set("expected_classes_per_level", expected);
    report.set("first_constant_level", json!(tree.first_constant_level()));
    report.set(
        "survivors_per_level",
        json!(tree.levels.iter().map(|l| l.survivors.len()).collect::<Vec<_>>()),
    );

    for level in &tree.levels {
        if level.inconclusive {
            let cls: Vec<_> = level
                .classes
                .iter()
                .filter(|c| matches!(c.status, ClassStatus::Inconclusive { .. }))
                .collect();
            report.inconclusive(json!({"level": level.m, "classes": cls}));
        }
    }

    // Part 1.
    for level in tree.levels.iter().filter(|l| l.m + 2 <= m0) {
        let constants = level.constants();
        report.check(constants.is_empty(), || {
            json!({"part": 1, "level": level.m, "unexpected_constants": constants})
        });
    }
    match tree.level(m0 - 1) {
        Some(level) => report.check(!level.constants().is_empty(), || {
            json!({"part": 1, "level": level.m, "missing": "no constant class at level m0 - 1"})
        }),
        None => report.note(format!("level m0 - 1 = {} lies beyond m_max", m0 - 1)),
    }

    // Part 2.
    for level in tree.levels.iter().filter(|l| l.m >= m0) {
        let found = level.survivors.len();
        report.check(found == expected, || {
            let classes: Vec<_> = level.classes.iter().filter(|c| c.status.is_non_constant()).collect();
            json!({"part": 2, "level": level.m, "expected": expected, "found": found, "non_constant": classes})
        });
        let Some(next) = tree.level(level.m + 1) else { continue };
        for &j in &level.survivors {
            let c = ResidueClass { k, m: level.m, j };
            let live = c
                .children()
                .iter()
                .filter(|ch| next.status_of(ch.j).is_some_and(ClassStatus::is_non_constant))
                .count();
            report.check(live == 1, || {
                json!({"part": 2, "level": level.m, "j": j, "non_constant_children": live})
            });
        }
    }
    if m_max < m0 {
        report.note(format!("m_max = {m_max} is below m0 = {m0}; the per-level count was not exercised"));
    }
    report.note(format!("constancy is judged on the first {samples} members of each class"));
    report.set("tree", serde_json::to_value(&tree).expect("tree serialises"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::nu2_big;
    use crate::stirling::stirling_exact;

    fn class(k: u32, m: u32, j: u64) -> ResidueClass {
        ResidueClass::new(k, m, j).unwrap()
    }

    #[test]
    fn member_examples() {
        assert_eq!(class_members(&class(5, 2, 1), 3).unwrap(), vec![5, 9, 13]);
        assert_eq!(class_members(&class(5, 6, 28), 2).unwrap(), vec![28, 92]);
        assert_eq!(class_members(&class(10, 4, 7), 2).unwrap(), vec![23, 39]);
        assert!(class_members(&class(10, 4, 7), 0).is_err());
        assert_eq!(class(5, 2, 4).j, 0);
        assert!(ResidueClass::new(5, 0, 0).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_class(&class(5, 2, 1), 50).unwrap(),
            ClassStatus::ConstantUpTo { value: Valuation::Finite(0), samples: 50 }
        );
        assert_eq!(
            classify_class(&class(11, 3, 4), 50).unwrap(),
            ClassStatus::ConstantUpTo { value: Valuation::Finite(1), samples: 50 }
        );
        let w = |n, v| Witness { n, valuation: Valuation::Finite(v) };
        assert_eq!(
            classify_class(&class(5, 2, 0), 50).unwrap(),
            ClassStatus::NonConstant { witnesses: [w(8, 1), w(12, 3)] }
        );
        // Early exit: S(6,5) = 15 and S(8,5) = 1050 already disagree.
        assert_eq!(
            classify_class(&class(5, 1, 0), 50).unwrap(),
            ClassStatus::NonConstant { witnesses: [w(6, 0), w(8, 1)] }
        );
        assert!(classify_class(&class(5, 1, 0), 1).is_err());
    }

    #[test]
    fn m0_values() {
        assert_eq!(m0_of(5), 3);
        assert_eq!(m0_of(8), 3);
        assert_eq!(m0_of(9), 4);
        assert_eq!(m0_of(16), 4);
        assert_eq!(m0_of(17), 5);
        assert_eq!(m0_of(2), 1);
    }

    #[test]
    fn tree_examples() {
        let t = build_level_tree(11, 4, 64).unwrap();
        assert_eq!(t.level(3).unwrap().survivors, vec![0, 1, 2, 7]);
        let l3 = t.level(3).unwrap();
        for (j, v) in [(3, 0), (4, 1), (5, 0), (6, 1)] {
            assert_eq!(l3.status_of(j).unwrap().constant_value(), Some(Valuation::Finite(v)));
        }
        assert_eq!(t.level(4).unwrap().status_of(2).unwrap().constant_value(), Some(Valuation::Finite(2)));

        let t = build_level_tree(10, 5, 64).unwrap();
        let l5 = t.level(5).unwrap();
        assert_eq!(l5.survivors, vec![7, 8, 9, 14]);
        assert_eq!(
            l5.constants(),
            [23, 24, 25, 30].iter().map(|&j| (j, Valuation::Finite(2))).collect::<Vec<_>>()
        );

        let t = build_level_tree(5, 10, 64).unwrap();
        assert_eq!(t.m0, 3);
        assert_eq!(t.level(2).unwrap().survivors, vec![0, 3]);
        assert_eq!(t.first_constant_level(), Some(2));
        assert!(t.levels.iter().skip(1).all(|l| l.survivors.len() == 2));

        assert!(build_level_tree(2, 5, 64).is_err());
        assert!(build_level_tree(5, 1, 64).is_err());
    }

    #[test]
    fn tree_json_fields() {
        let v = serde_json::to_value(build_level_tree(5, 3, 16).unwrap()).unwrap();
        assert_eq!(v["k"], 5);
        assert_eq!(v["m0"], 3);
        let c = &v["levels"][0]["classes"][0];
        assert_eq!(c["status"], "non_constant");
        assert_eq!(c["witnesses"].as_array().unwrap().len(), 2);
        assert_eq!(v["levels"][1]["classes"][1]["status"], "constant_up_to");
    }

    #[test]
    fn main_conjecture_small_k() {
        for k in [5, 6, 7, 9, 11] {
            let r = verify_main_conjecture(k, 8, 64).unwrap();
            assert!(r.is_consistent(), "k = {k}: {:?}", r.counterexamples);
        }
        let r = verify_main_conjecture(4, 8, 64).unwrap();
        assert_eq!(r.status, crate::Status::Inconclusive);
    }

    #[test]
    fn witnesses_are_certificates() {
        for k in [5u32, 7, 10, 12] {
            let t = build_level_tree(k, 6, 32).unwrap();
            for level in &t.levels {
                for c in &level.classes {
                    if let ClassStatus::NonConstant { witnesses } = &c.status {
                        let exact: Vec<_> = witnesses
                            .iter()
                            .map(|w| nu2_big(&stirling_exact(w.n, k as u64).unwrap()))
                            .collect();
                        assert_eq!(exact[0], witnesses[0].valuation);
                        assert_eq!(exact[1], witnesses[1].valuation);
                        assert_ne!(exact[0], exact[1]);
                        let rc = class(k, level.m, c.j);
                        assert!(rc.contains(witnesses[0].n) && rc.contains(witnesses[1].n));
                    }
                }
            }
        }
    }
}
