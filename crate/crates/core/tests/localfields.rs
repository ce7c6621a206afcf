use std::collections::{BTreeMap, HashSet};

use bogocert::arith::{factorize, is_square_mod};
use bogocert::localfields::{
    assumption3_constants, central_exponent, delta, gal_structure, norm_surjective, omega_order,
    ramification_filtration, unit_group_oracle, CrystallineParams, OracleResult,
};
use num_bigint::BigUint;
use num_rational::Ratio;

/// Z_q / p^n modelled independently as (Z/p^n)[y]/(y^2 - r), r a non-residue.
struct Quadratic {
    m: u64,
    r: u64,
}

impl Quadratic {
    fn new(p: u64, n: u32) -> Self {
        let r = (2..p).find(|&r| !is_square_mod(r, p)).unwrap();
        Quadratic { m: p.pow(n), r }
    }
    fn mul(&self, a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
        let m = self.m;
        ((a.0 * b.0 + a.1 * b.1 % m * self.r) % m, (a.0 * b.1 + a.1 * b.0) % m)
    }
    fn pow(&self, mut a: (u64, u64), mut e: u64) -> (u64, u64) {
        let mut acc = (1 % self.m, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }
}

/// Primary invariants of a finite abelian group from counts of l^j-torsion.
fn primary_invariants(elems: &[(u64, u64)], q: &Quadratic) -> Vec<u128> {
    let order = elems.len() as u64;
    let one = (1 % q.m, 0);
    let mut out = Vec::new();
    for (l, e) in factorize(order) {
        // t[j] = #{x : x^(l^j) = 1}
        let t: Vec<u64> = (0..=e)
            .map(|j| elems.iter().filter(|&&x| q.pow(x, l.pow(j)) == one).count() as u64)
            .collect();
        // Number of cyclic factors of order >= l^j is log_l(t[j] / t[j-1]).
        let at_least: Vec<u32> = (1..=e as usize).map(|j| (t[j] / t[j - 1]).ilog(l)).collect();
        for j in 1..=e as usize {
            let exactly = at_least[j - 1] - at_least.get(j).copied().unwrap_or(0);
            for _ in 0..exactly {
                out.push((l as u128).pow(j as u32));
            }
        }
    }
    out.sort_unstable();
    out
}

fn formula_primary(invariants: &[u128]) -> Vec<u128> {
    let mut out = Vec::new();
    for &d in invariants {
        for (l, e) in factorize(d as u64) {
            out.push((l as u128).pow(e));
        }
    }
    out.sort_unstable();
    out
}

fn oracle(p: u64, k: u64, n: u32) -> Vec<u128> {
    let q = Quadratic::new(p, n);
    let mut units = Vec::new();
    for a in 0..q.m {
        for b in 0..q.m {
            // Units are the elements nonzero mod p.
            if a % p != 0 || b % p != 0 {
                units.push((a, b));
            }
        }
    }
    let image: HashSet<(u64, u64)> = units.iter().map(|&u| q.pow(u, k - 1)).collect();
    primary_invariants(&image.into_iter().collect::<Vec<_>>(), &q)
}

#[test]
fn galois_structure_matches_enumeration() {
    for (p, n) in [(5u64, 1u32), (5, 2), (7, 1), (7, 2), (11, 1), (13, 1)] {
        for k in 2..=14u64 {
            if (k - 1) % p == 0 {
                continue;
            }
            let params = CrystallineParams::new(p, k, n).unwrap();
            let s = gal_structure(&params).unwrap();
            assert_eq!(s.order, s.invariants.iter().product::<u128>());
            assert_eq!(formula_primary(&s.invariants), oracle(p, k, n), "p={p} k={k} n={n}");
            match unit_group_oracle(&params).unwrap() {
                OracleResult::Enumerated { matches_formula, .. } => assert!(matches_formula),
                OracleResult::FormulaOnly { .. } => assert!((params.q as u128).pow(2 * n) > 1_000_000),
            }
        }
    }
}

#[test]
fn reference_structure() {
    let params = CrystallineParams::new(5, 2, 2).unwrap();
    let s = gal_structure(&params).unwrap();
    assert_eq!(s.invariants, vec![24, 5, 5]);
    assert_eq!(s.order, 600);
    match unit_group_oracle(&params).unwrap() {
        OracleResult::Enumerated { unit_count, image_order, primary_invariants, matches_formula } => {
            assert_eq!(unit_count, 600);
            assert_eq!(image_order, 600);
            assert_eq!(primary_invariants, vec![3, 5, 5, 8]);
            assert!(matches_formula);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        unit_group_oracle(&CrystallineParams::new(11, 2, 3).unwrap()).unwrap(),
        OracleResult::FormulaOnly { .. }
    ));
}

#[test]
fn delta_values() {
    assert_eq!(delta(5, 2).unwrap(), 24);
    assert_eq!(delta(7, 4).unwrap(), 16);
    assert_eq!(delta(409, 2).unwrap(), 409 * 409 - 1);
    assert!(delta(4, 2).is_err());
    for p in [5u64, 7, 11, 13] {
        for k in 2..40 {
            assert_eq!(delta(p, k).unwrap(), (p * p - 1) / num_integer::gcd(p * p - 1, k - 1));
        }
    }
}

/// Herbrand phi at integer u: sum over t = 1..u of |G_t| / |G_0|.
fn phi(f: &bogocert::localfields::RamificationFiltration, u: u128) -> Ratio<u128> {
    let g0 = f.order_at(0);
    (1..=u).map(|t| Ratio::new(f.order_at(t), g0)).fold(Ratio::from_integer(0), |a, b| a + b)
}

#[test]
fn filtration_reference_values() {
    let f = ramification_filtration(&CrystallineParams::new(5, 2, 2).unwrap()).unwrap();
    assert_eq!(f.last_break, 24);
    assert_eq!(f.last_order, 25);
    let f1 = ramification_filtration(&CrystallineParams::new(5, 2, 1).unwrap()).unwrap();
    assert_eq!(f1.last_break, 0);
    assert_eq!(f1.last_order, 24);
    for n in 1..=6 {
        let f = ramification_filtration(&CrystallineParams::new(5, 2, n).unwrap()).unwrap();
        assert_eq!(f.ramification_index % (f.last_break + 1), 0);
        assert_eq!(f.ratio(), (24, 1), "n={n}");
    }
}

#[test]
fn filtration_is_consistent() {
    for (p, k) in [(5u64, 2u64), (5, 3), (7, 2), (7, 4), (11, 6), (13, 3)] {
        for n in 1..=4 {
            let params = CrystallineParams::new(p, k, n).unwrap();
            let f = ramification_filtration(&params).unwrap();
            let s = gal_structure(&params).unwrap();
            // G_0 is the whole (totally ramified) group.
            assert_eq!(f.order_at(0), s.order);
            assert_eq!(f.ramification_index, s.order);
            // Nonincreasing, and trivial past the last break.
            let mut prev = f.order_at(0);
            for i in 0..=f.last_break.min(5000) {
                let o = f.order_at(i);
                assert!(o <= prev);
                prev = o;
            }
            assert_eq!(f.order_at(f.last_break), f.last_order);
            assert_eq!(f.order_at(f.last_break + 1), 1);
            // Hasse-Arf: abelian, so jumps in the upper numbering are integers.
            if f.last_break <= 5000 {
                for b in &f.breaks {
                    assert!(phi(&f, b.i_end).is_integer(), "p={p} k={k} n={n} break at {}", b.i_end);
                }
            }
            // Ranges tile [0, last_break].
            assert_eq!(f.breaks[0].i_start, 0);
            for w in f.breaks.windows(2) {
                assert_eq!(w[0].i_end + 1, w[1].i_start);
            }
        }
    }
}

#[test]
fn norm_is_surjective_off_degenerate_weights() {
    for p in [5u64, 7, 11] {
        for n in 2..=3 {
            for k in 2..=12 {
                let r = norm_surjective(p, n, k).unwrap();
                assert_eq!(r.quotient_size, p);
                assert_eq!(r.degenerate, (k - 1) % p == 0);
                assert_eq!(r.surjective, !r.degenerate, "p={p} n={n} k={k}");
            }
        }
    }
    assert!(norm_surjective(5, 1, 2).is_err());
}

#[test]
fn central_exponent_values() {
    assert_eq!(central_exponent(5, 2).unwrap(), BigUint::from(256u32));
    assert_eq!(central_exponent(409, 2).unwrap(), BigUint::from(2u32).pow(816));
    assert!(central_exponent(5, 5).is_err());
    assert!(central_exponent(5, 1).is_err());
}

#[test]
fn constants_and_break_bound() {
    let r = assumption3_constants(5, 2, 1, 6).unwrap();
    assert_eq!(r.c1, BigUint::from(25u32));
    assert_eq!(r.c2, BigUint::from(625u32));
    assert!(r.all_ok);
    for c in &r.checks {
        assert_eq!(c.ratio, (24, 1));
        assert!(c.ok);
    }
    let r = assumption3_constants(7, 4, 2, 8).unwrap();
    assert_eq!(r.c2, BigUint::from(7u32).pow(8));
    for c in &r.checks {
        assert!(Ratio::new(c.ratio.0, c.ratio.1) <= Ratio::from_integer(48u128));
    }
    assert!(r.all_ok);
    assert!(assumption3_constants(5, 2, 0, 3).is_err());
    assert!(assumption3_constants(3, 2, 1, 3).is_err());
}

#[test]
fn omega_orders() {
    let o = omega_order(1).unwrap();
    assert_eq!(o.direct.iter().copied().collect::<Vec<_>>(), vec![1, 2]);
    assert_eq!(o.twisted.iter().copied().collect::<Vec<_>>(), vec![4]);
    // Oracle: for each admissible order a of omega, the orders of zeta_a^u * i.
    for m in 1..=12u64 {
        let o = omega_order(m).unwrap();
        let mut direct = BTreeMap::new();
        for a in 1..=4 * m {
            // An element of order a squares to order a / gcd(a, 2).
            if a / num_integer::gcd(a, 2) == m {
                direct.insert(a, ());
            }
        }
        assert_eq!(o.direct.iter().copied().collect::<Vec<_>>(), direct.keys().copied().collect::<Vec<_>>(), "m={m}");
    }
}
