use bogocert::algnum::{apply_automorphism, AbelianAutomorphism, FieldElement, IntPoly, NumberField};
use bogocert::arith::valuation;
use bogocert::heights::{accelerate, accelerate_f64, bogomolov_constant, lower_bound, weil_height, BoundParams};
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use std::sync::Arc;

const TOL: f64 = 1e-9;

fn zeta8() -> Arc<NumberField> {
    NumberField::cyclotomic(8).unwrap()
}

fn elem(k: &Arc<NumberField>, c: &[i64]) -> FieldElement {
    FieldElement::from_i64s(k, c).unwrap()
}

fn h(x: &FieldElement) -> f64 {
    let v = weil_height(x).unwrap();
    assert!(v.width() < 1e-10, "wide enclosure {v}");
    v.midpoint()
}

/// Height of an algebraic integer of Q(zeta_8) straight from its four complex
/// conjugates; no minimal polynomial involved.
fn oracle_height(c: &[i64]) -> f64 {
    [1u32, 3, 5, 7]
        .iter()
        .map(|&a| {
            let z = Complex64::from_polar(1.0, std::f64::consts::PI * a as f64 / 4.0);
            let v: Complex64 = c.iter().enumerate().map(|(i, &ci)| z.powu(i as u32) * ci as f64).sum();
            v.norm().max(1.0).ln()
        })
        .sum::<f64>()
        / 4.0
}

fn coords() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-6i64..=6, 4).prop_filter("nonzero", |c| c.iter().any(|&x| x != 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn matches_conjugate_oracle(c in coords()) {
        let x = elem(&zeta8(), &c);
        prop_assert!((h(&x) - oracle_height(&c)).abs() < TOL);
    }

    #[test]
    fn galois_invariance(c in coords()) {
        let k = zeta8();
        let x = elem(&k, &c);
        let hx = h(&x);
        for sigma in AbelianAutomorphism::all(&k).unwrap() {
            let y = apply_automorphism(&sigma, &x).unwrap();
            prop_assert!((h(&y) - hx).abs() < TOL);
        }
    }

    #[test]
    fn power_rule(c in coords(), m in prop::sample::select(vec![-3i64, -2, -1, 1, 2, 3])) {
        let x = elem(&zeta8(), &c);
        let y = x.pow(m).unwrap();
        prop_assert!((h(&y) - m.unsigned_abs() as f64 * h(&x)).abs() < TOL);
    }

    #[test]
    fn subadditivity(a in coords(), b in coords()) {
        let k = zeta8();
        let (x, y) = (elem(&k, &a), elem(&k, &b));
        let (hx, hy) = (h(&x), h(&y));
        prop_assert!(h(&(&x * &y)) <= hx + hy + TOL);
        let s = &x + &y;
        if !s.is_zero() {
            prop_assert!(h(&s) <= hx + hy + 2f64.ln() + TOL);
        }
    }

    #[test]
    fn kronecker_on_random_elements(c in coords()) {
        let x = elem(&zeta8(), &c);
        prop_assert_eq!(h(&x) < TOL, x.is_root_of_unity());
    }

    #[test]
    fn accelerate_is_monotone(p in prop::sample::select(vec![3u64, 5, 7, 11]), num in 1i64..50, den in 1i64..50, lam in 0u64..40) {
        let rho = BigRational::new(num.into(), den.into());
        let a = accelerate(p, &rho, &BigUint::from(lam)).unwrap();
        let b = accelerate(p, &rho, &BigUint::from(lam + 1)).unwrap();
        prop_assert!(b > a);
        prop_assert!(b <= &a * BigRational::from_integer(p.into()));
        prop_assert!(b <= &a + BigRational::from_integer(1.into()));
    }
}

#[test]
fn kronecker_on_all_24th_roots_of_unity() {
    let k = NumberField::cyclotomic(24).unwrap();
    let zeta = FieldElement::generator(&k);
    for j in 0..24 {
        let x = zeta.pow(j).unwrap();
        let v = weil_height(&x).unwrap();
        assert!(v.contains(0.0) && v.upper < 1e-10, "zeta^{j}: {v}");
        assert!(x.is_root_of_unity());
    }
    let one = FieldElement::one(&k);
    let two = FieldElement::from_int(&k, 2);
    for j in 0..24 {
        // 2 + zeta^j is torsion only for zeta^j = -1.
        let x = &two + &zeta.pow(j).unwrap();
        assert_eq!(x.is_root_of_unity(), j == 12);
        assert_eq!(h(&x) > 1e-3, j != 12);
        let y = &one + &zeta.pow(j).unwrap();
        if !y.is_zero() {
            assert_eq!(h(&y) < TOL, y.is_root_of_unity(), "1 + zeta^{j}");
        }
    }
}

#[test]
fn reference_values() {
    let two = FieldElement::from_minimal_polynomial(&"x - 2".parse::<IntPoly>().unwrap()).unwrap();
    assert!((h(&two) - 2f64.ln()).abs() < 1e-10);
    let half = FieldElement::from_minimal_polynomial(&"2*x - 1".parse::<IntPoly>().unwrap()).unwrap();
    assert!((h(&half) - 2f64.ln()).abs() < 1e-10);

    // Quadratic formula: one root (1 + sqrt 5)/2 outside the unit disk.
    let phi = FieldElement::from_minimal_polynomial(&"x^2 - x - 1".parse::<IntPoly>().unwrap()).unwrap();
    let log_phi = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    assert!((h(&phi) - log_phi / 2.0).abs() < 1e-10);
    assert!((h(&phi) * 2.0 - 0.481_211_825_059_603_4).abs() < 1e-10);

    let cbrt2 = FieldElement::from_minimal_polynomial(&"x^3 - 2".parse::<IntPoly>().unwrap()).unwrap();
    assert!((h(&cbrt2) - 2f64.ln() / 3.0).abs() < 1e-10);
    assert!(weil_height(&FieldElement::zero(&zeta8())).is_err());
}

#[test]
fn non_monic_minimal_polynomials() {
    // 3x^2 - 2: roots +-sqrt(2/3), Mahler measure 3.
    let x = FieldElement::from_minimal_polynomial(&"3*x^2 - 2".parse::<IntPoly>().unwrap()).unwrap();
    assert!((h(&x) - 3f64.ln() / 2.0).abs() < 1e-10);
    assert_eq!(x.minimal_polynomial(), IntPoly::from_i64(&[-2, 0, 3]));
    assert!(FieldElement::from_minimal_polynomial(&"x^2 - 4".parse::<IntPoly>().unwrap()).is_err());
}

fn random_pairs(p: u64, rho: u32, count: usize, seed: u64) -> Vec<(BigInt, BigInt)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let m = BigInt::from(p).pow(rho);
    (0..count)
        .map(|_| {
            let g1 = BigInt::from(rng.random_range(-1_000_000i64..1_000_000));
            let t = loop {
                let t = rng.random_range(-1000i64..1000);
                if t != 0 {
                    break t;
                }
            };
            let g2 = &g1 + &m * t;
            (g1, g2)
        })
        .collect()
}

#[test]
fn accelerate_against_valuation_oracle() {
    for p in [5u64, 7] {
        for rho in [1u32, 2] {
            for lam in 0u32..=3 {
                let s = accelerate(p, &BigRational::from_integer(rho.into()), &BigUint::from(lam)).unwrap();
                let e = p.pow(lam) as u32;
                for (g1, g2) in random_pairs(p, rho, 100, p * 100 + rho as u64 * 10 + lam as u64) {
                    let diff = g1.pow(e) - g2.pow(e);
                    let v = valuation(&diff, p).expect("distinct powers");
                    assert!(BigRational::from_integer(v.into()) >= s, "p={p} rho={rho} lambda={lam}: v={v} < s={s}");
                }
            }
        }
    }
}

#[test]
fn accelerate_examples() {
    let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    assert_eq!(accelerate(5, &r(1, 1), &BigUint::from(0u32)).unwrap(), r(1, 1));
    assert_eq!(accelerate(5, &r(1, 1), &BigUint::from(2u32)).unwrap(), r(3, 1));
    assert_eq!(accelerate(5, &r(1, 10), &BigUint::from(1u32)).unwrap(), r(1, 2));
    assert!((accelerate_f64(5, 0.1, 1).unwrap() - 0.5).abs() < 1e-15);
    // Closed form agrees with naive iteration far out.
    let mut s = r(1, 409 * 409);
    for _ in 0..200 {
        let a = &s * BigRational::from_integer(409.into());
        let b = &s + r(1, 1);
        s = if a < b { a } else { b };
    }
    assert_eq!(accelerate(409, &r(1, 409 * 409), &BigUint::from(200u32)).unwrap(), s);
}

#[test]
fn bogomolov_constant_examples() {
    let one = BigRational::from_integer(1.into());
    let k = bogomolov_constant(5, &one, &BigUint::from(1u32)).unwrap();
    assert_eq!(k.lambda, BigUint::from(0u32));
    assert!((k.c - 2.5f64.ln() / 2.0).abs() < 1e-9);
    assert!((k.c - 0.4581).abs() < 1e-4);

    let k = bogomolov_constant(3, &one, &BigUint::from(1u32)).unwrap();
    assert!((k.c - 1.5f64.ln() / 2.0).abs() < 1e-12);

    let k = bogomolov_constant(5, &BigRational::from_integer(25.into()), &BigUint::from(2u32)).unwrap();
    assert_eq!(k.lambda, BigUint::from(3u32));
    assert!((k.c - 2.5f64.ln() / (2.0 * 125.0)).abs() < 1e-15);

    // lambda is the first step at which the threshold is met.
    let c1 = BigRational::from_integer(49.into());
    let c2 = BigUint::from(20u32);
    let k = bogomolov_constant(7, &c1, &c2).unwrap();
    let rho = BigRational::new(1.into(), 49.into());
    let lam = k.lambda.clone();
    assert!(accelerate(7, &rho, &lam).unwrap() >= BigRational::from_integer(20.into()));
    assert!(accelerate(7, &rho, &(lam - 1u32)).unwrap() < BigRational::from_integer(20.into()));
    assert!(bogomolov_constant(2, &one, &BigUint::from(1u32)).is_err());
}

#[test]
fn lower_bound_formula() {
    let mk = |a, b, s, ratio, rho, p| BoundParams { a, b, rho, s_size: s, degree_ratio: ratio, p };
    let v = lower_bound(&mk(1, 1, 1, (1, 1), 2.0, 3)).unwrap();
    assert!((v - 0.7520).abs() < 1e-4);
    let v = lower_bound(&mk(1, 2, 4, (1, 4), 1.0, 5)).unwrap();
    assert!((v - (5f64.ln() - 2f64.ln()) / 3.0).abs() < 1e-12);
    let v = lower_bound(&mk(1, 1, 1, (1, 1), 1e-300, 3)).unwrap();
    assert!((v + 2f64.ln() / 2.0).abs() < 1e-12);
}
