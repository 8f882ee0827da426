use std::path::Path;

use stirval::approx::{aux_indicators, f1, f2, f3, in_i1, in_i2, x1, x2};

#[derive(Debug, serde::Deserialize)]
struct Row {
    m: u64,
    f1: u64,
    f2: u64,
    f3: u64,
    x1: u64,
    x2: u64,
}

fn rows() -> Vec<Row> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/approx_golden.csv");
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.deserialize().map(|r| r.unwrap()).collect()
}

#[test]
fn approximants_match_table() {
    let rows = rows();
    assert_eq!(rows.len(), 20);
    for r in rows {
        assert_eq!((f1(r.m), f2(r.m), f3(r.m)), (r.f1, r.f2, r.f3), "m = {}", r.m);
        assert_eq!((x1(r.m), x2(r.m)), (r.x1, r.x2), "m = {}", r.m);
        assert!(in_i1(r.x1) && in_i2(r.x2));
    }
}

// Straight from the definitions, with the floors and parities spelled out.
fn aux_oracle(m: u64) -> (u64, i64, i64) {
    let odd = |x: u64| x % 2 == 1;
    let l3 = |x: u64| i64::from(odd(x % 3));
    let l2 = |x: u64| i64::from(odd(x % 2));
    let alpha = l3(m + 2) * (1 + l3(m)) + l2(m + 1) * l3(m);
    let s = if (m + 1) % 2 == 0 { 1 } else { -1 };
    ((m + 2) % 3, alpha, alpha + s * l3(m))
}

#[test]
fn aux_indicators_match_definition() {
    for m in 0..600 {
        assert_eq!(aux_indicators(m), aux_oracle(m), "m = {m}");
    }
    let (m3, alpha, beta) = aux_indicators(1);
    assert_eq!((m3, alpha, beta), (0, 0, 1));
}
