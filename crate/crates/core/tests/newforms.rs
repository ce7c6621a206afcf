use std::collections::{BTreeSet, HashMap};

use bogocert::algnum::splitting_type;
use bogocert::arith::{is_prime, is_square_mod, pow_mod};
use bogocert::lmfdb::{LmfdbClient, Policy};
use bogocert::newforms::assumption::{has_fourth_root, lower_level};
use bogocert::newforms::table::REFERENCE_TABLE;
use bogocert::newforms::{
    certify, check_assumption1, frobenius_charpoly, full_report, irreducible_quadratic, mascot_diamond_check,
    reproduce_table, CertifyOutcome, DataSource, NewformRecord, P2Status,
};
use bogocert::{Error, Result};
use num_bigint::BigUint;

fn offline() -> LmfdbClient {
    LmfdbClient::new(std::env::temp_dir().join("bogocert-test-empty-cache"), None, Policy::OfflineOnly)
}

fn record(label: &str) -> NewformRecord {
    offline().newform(label).unwrap()
}

/// Newform data from the bundled fixtures, with newspace dimensions overridden.
struct Overridden {
    dims: HashMap<(u64, u64), u64>,
}

impl DataSource for Overridden {
    fn newform(&self, label: &str) -> Result<NewformRecord> {
        offline().newform(label)
    }
    fn newspace_dim(&self, level: u64, weight: u64, orbit: u64) -> Result<u64> {
        match self.dims.get(&(level, orbit)) {
            Some(&d) => Ok(d),
            None => offline().newspace_dim(level, weight, orbit),
        }
    }
}

fn brute_roots(coeffs: &[u64], p: u64) -> BTreeSet<u64> {
    (0..p)
        .filter(|&x| coeffs.iter().rev().fold(0, |acc, &c| (acc * x + c) % p) == 0)
        .collect()
}

#[test]
fn worked_example_30_2_e_a() {
    let rec = record("30.2.e.a");
    assert_eq!(rec.hecke_degree(), 4);
    let split = splitting_type(&rec.field, 409).unwrap();
    let roots: BTreeSet<u64> = split.degree_one_roots().into_iter().collect();
    assert_eq!(roots, BTreeSet::from([31, 66, 343, 378]));
    assert_eq!(brute_roots(&[1, 0, 0, 0, 1], 409), roots);

    let c = 409 - 169;
    assert!(!has_fourth_root(c, 409));
    assert!((0..409u64).all(|x| pow_mod(x, 4, 409) != c));

    let data = offline();
    let report = full_report(&rec, 409, &data).unwrap();
    assert!(report.p0 && report.p1 && report.p3);
    assert!(report.p2_positive());
    assert!(report.verdict());
    match &report.p2 {
        P2Status::Evidence { per_prime, product_conditional } => {
            assert_eq!(per_prime.len(), 4);
            assert!(*product_conditional);
            for e in per_prime {
                assert!(e.irreducible && e.lower_level_empty);
                // Independent irreducibility check by root search.
                let f = e.charpoly;
                let coeffs = [f.constant, (409 - f.trace) % 409, 1];
                assert!(brute_roots(&coeffs, 409).is_empty());
            }
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn worked_example_21_2_e_a() {
    let rec = record("21.2.e.a");
    assert_eq!(rec.computed_conductor(), 7);
    assert!(rec.a(199).unwrap().is_zero());
    assert!(rec.a(701).unwrap().is_zero());
    assert!(rec.chi(701).unwrap().is_one());
    let split = splitting_type(&rec.field, 199).unwrap();
    let root = split.degree_one_roots()[0];
    let f = frobenius_charpoly(&rec, 701, 199, root).unwrap();
    // X^2 - a_r X + r chi(r) = X^2 + 701.
    assert_eq!(f.trace, 0);
    assert_eq!(f.constant, 701 % 199);
    assert!(irreducible_quadratic(&f));
    assert!(brute_roots(&[f.constant, 0, 1], 199).is_empty());
    // 701 itself is a square mod 199 (30^2 = 900 = 701 + 199); -701 is not.
    assert!(is_square_mod(701 % 199, 199));
    assert_eq!(30 * 30 % 199, 701 % 199);
    assert!(!is_square_mod(199 - 701 % 199, 199));

    let out = certify(&rec, 500, &offline()).unwrap();
    let cert = out.certificate().expect("certified");
    assert_eq!(cert.p, 199);
    assert!(cert.verdict);
}

#[test]
fn certify_reference_forms() {
    let expected = [
        ("24.2.d.a", 61),
        ("26.2.c.a", 19),
        ("26.2.b.a", 29),
        ("30.2.c.a", 29),
        ("34.2.c.a", 37),
        ("35.2.b.a", 89),
        ("39.2.b.a", 73),
        ("42.2.e.a", 13),
        ("45.2.e.a", 31),
        ("30.2.e.a", 409),
        ("21.2.e.a", 199),
    ];
    let data = offline();
    for (label, p) in expected {
        let rec = record(label);
        let out = certify(&rec, 500, &data).unwrap();
        let cert = out.certificate().unwrap_or_else(|| panic!("{label} not certified"));
        assert_eq!(cert.p, p, "{label}");
        assert!(cert.verdict);
        // Smallest qualifying prime: nothing below p passes the full check.
        for q in (5..p).filter(|&q| is_prime(q)) {
            let ok = full_report(&rec, q, &data).map(|r| r.verdict()).unwrap_or(false);
            let unramified = splitting_type(&rec.field, q).unwrap().is_unramified();
            assert!(!(ok && unramified), "{label}: {q} also qualifies");
        }
        // Constants.
        assert_eq!(cert.constants.c1, BigUint::from(p).pow(2));
        assert_eq!(cert.constants.c2, BigUint::from(p).pow(4 * rec.hecke_degree() as u32));
        assert_eq!(cert.constants.g, BigUint::from(2u32).pow(2 * (p as u32 - 1)));
        assert_eq!(cert.delta, p * p - 1);
        assert_eq!(cert.filtration.len(), 3);
        assert_eq!(cert.filtration[0].galois_order, (p * p - 1) as u128);
        assert!(cert.constants.bogomolov.log10_c < 0.0);
    }
}

#[test]
fn no_certificate_for_39_2_j_a() {
    let rec = record("39.2.j.a");
    let data = offline();
    let out = certify(&rec, 500, &data).unwrap();
    match &out {
        CertifyOutcome::Failed(f) => {
            let at37 = f.failures.iter().find(|x| x.p == 37).unwrap();
            assert!(at37.reasons.iter().any(|r| r.contains("level 13")), "{at37:?}");
        }
        CertifyOutcome::Certified(c) => panic!("unexpected certificate at {}", c.p),
    }
    // The only admissible l is 3, and S_2(13, chi) is one-dimensional.
    let (m, orbit) = lower_level(&rec, 3).unwrap();
    assert_eq!(m, 13);
    assert_eq!(data.newspace_dim(m, 2, orbit).unwrap(), 1);
}

#[test]
fn nonzero_lower_level_blocks_certification() {
    let rec = record("30.2.e.a");
    let (m, orbit) = lower_level(&rec, 2).unwrap();
    let blocked = Overridden { dims: HashMap::from([((m, orbit), 1)]) };
    let report = full_report(&rec, 409, &blocked).unwrap();
    // l = 3 and l = 5 divide the conductor or are unavailable, so nothing else helps.
    assert!(!report.verdict());
    assert!(report.failures().iter().any(|f| f.contains(&format!("level {m}"))));
}

#[test]
fn second_l_is_tried() {
    // 42.2.e.a: l = 2 gives level 21 (nonzero), l = 3 gives level 14 (zero).
    let rec = record("42.2.e.a");
    let data = offline();
    let root = splitting_type(&rec.field, 13).unwrap().degree_one_roots()[0];
    let f = frobenius_charpoly(&rec, 41, 13, root).unwrap();
    let e2 = mascot_diamond_check(&rec, 13, root, f.r, 2, &data).unwrap();
    assert_eq!((e2.lower_level, e2.lower_level_dim), (21, 1));
    let e3 = mascot_diamond_check(&rec, 13, root, f.r, 3, &data).unwrap();
    assert_eq!((e3.lower_level, e3.lower_level_dim), (14, 0));
    let report = full_report(&rec, 13, &data).unwrap();
    match &report.p2 {
        P2Status::Evidence { per_prime, .. } => assert!(per_prime.iter().all(|e| e.l == 3)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn table_reproduction() {
    let t = reproduce_table(&offline()).unwrap();
    assert_eq!(t.total, 10);
    assert_eq!(t.matched, 8);
    let row = |label: &str| t.rows.iter().find(|r| r.label == label).unwrap();

    let r35 = row("35.2.b.a");
    assert!(!r35.a_p_zero);
    assert!(!r35.irreducible_mod_p);
    assert_eq!(r35.first_valid_p, Some(89));
    assert_eq!(r35.charpoly, "X^2+19");

    let r39 = row("39.2.b.a");
    assert_eq!(r39.conductor, 13);
    assert!(!r39.a_r_zero);
    let cols: Vec<&str> = r39.diffs.iter().map(|d| d.column.as_str()).collect();
    assert!(cols.contains(&"conductor") && cols.contains(&"charpoly"));

    for (reference, got) in REFERENCE_TABLE.iter().zip(&t.rows) {
        assert_eq!(reference.label, got.label);
        if !["35.2.b.a", "39.2.b.a"].contains(&reference.label) {
            assert!(got.matches(), "{}: {:?}", got.label, got.diffs);
            assert_eq!(got.charpoly, reference.charpoly);
            assert!(got.a_p_zero && got.a_r_zero && got.irreducible_mod_p);
            assert!(got.chi_r_sign.is_some());
        }
    }
}

#[test]
fn table_rows_against_direct_computation() {
    // Rational rows: the polynomial is X^2 + s r with s = chi(r) in {+1, -1}.
    let data = offline();
    for reference in REFERENCE_TABLE.iter() {
        let rec = data.newform(reference.label).unwrap();
        let chi = rec.chi(reference.r).unwrap();
        if rec.a(reference.r).unwrap().is_zero() {
            let s: i64 = if chi.is_one() { 1 } else { -1 };
            let c = (s * reference.r as i64).rem_euclid(reference.p as i64) as u64;
            let irreducible = brute_roots(&[c, 0, 1], reference.p).is_empty();
            let t = reproduce_table(&data).unwrap();
            let row = t.rows.iter().find(|r| r.label == reference.label).unwrap();
            assert_eq!(row.irreducible_mod_p, irreducible, "{}", reference.label);
        }
    }
}

#[test]
fn assumption_checks() {
    let rec = record("24.2.d.a");
    let r = check_assumption1(&rec, 61).unwrap();
    assert!(r.p0 && r.p1 && r.p3);
    assert!(matches!(r.p2, P2Status::NotChecked));
    let r = check_assumption1(&rec, 3).unwrap();
    assert!(!r.p0 && !r.p3);
    assert!(matches!(check_assumption1(&rec, 9), Err(Error::InvalidInput(_))));
    assert!(matches!(check_assumption1(&rec, 1009), Err(Error::DataInsufficient(_))));

    let mut cm = rec.clone();
    cm.cm = true;
    assert!(matches!(check_assumption1(&cm, 61), Err(Error::NotApplicable(_))));
}

#[test]
fn checks_are_monotone_in_data() {
    let full = record("30.2.e.a");
    let data = offline();
    for keep in [100usize, 300, 410, 700] {
        let mut short = full.clone();
        short.an.truncate(keep);
        for p in [7u64, 11, 13, 409, 601] {
            if let Ok(r) = check_assumption1(&short, p) {
                let f = check_assumption1(&full, p).unwrap();
                assert_eq!((r.p0, r.p1, r.p3), (f.p0, f.p1, f.p3));
            }
            if let (Ok(r), Ok(f)) = (full_report(&short, p, &data), full_report(&full, p, &data)) {
                assert!(!r.verdict() || f.verdict());
            }
        }
    }
}

#[test]
fn certify_bound_beyond_data_is_an_error() {
    let rec = record("24.2.d.a");
    assert!(matches!(certify(&rec, 5000, &offline()), Err(Error::DataInsufficient(_))));
    match certify(&rec, 50, &offline()).unwrap() {
        CertifyOutcome::Failed(f) => assert_eq!(f.bound, 50),
        CertifyOutcome::Certified(c) => panic!("certified at {}", c.p),
    }
}

#[test]
fn certificates_are_deterministic() {
    let rec = record("30.2.e.a");
    let a = serde_json::to_string(&certify(&rec, 500, &offline()).unwrap()).unwrap();
    let b = serde_json::to_string(&certify(&rec, 500, &offline()).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bundled_records_are_consistent() {
    let data = offline();
    for label in REFERENCE_TABLE.iter().map(|r| r.label).chain(["30.2.e.a", "21.2.e.a"]) {
        let rec = data.newform(label).unwrap();
        // Hecke multiplicativity a_mn = a_m a_n for coprime m, n.
        for m in 2..30u64 {
            for n in 2..30u64 {
                if num_integer::gcd(m, n) == 1 && m * n <= rec.coeff_bound() {
                    assert_eq!(rec.a(m * n).unwrap(), &(rec.a(m).unwrap() * rec.a(n).unwrap()), "{label}: a_{m}{n}");
                }
            }
        }
        // a_{p^2} = a_p^2 - chi(p) p^(k-1) for p not dividing N.
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            if rec.level % p != 0 && p * p <= rec.coeff_bound() {
                let ap = rec.a(p).unwrap();
                let chi = rec.chi(p).unwrap();
                let pk = bogocert::algnum::FieldElement::from_int(&rec.field, p.pow(rec.weight as u32 - 1) as i64);
                assert_eq!(rec.a(p * p).unwrap(), &(&(ap * ap) - &(&pk * &chi)), "{label}: a_{p}^2");
            }
        }
    }
}
