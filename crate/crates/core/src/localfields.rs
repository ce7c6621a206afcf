//! The Galois group of the p^n-division fields over the unramified quadratic
//! extension of Q_p, its ramification filtration, and the unit-group model
//! used to check both by enumeration.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::algnum::fp_poly::least_irreducible;
use crate::arith::{factorize, gcd, is_prime, mul_mod, pow_mod};
use crate::error::{Error, Result};

/// Largest q^(2n) for which the unit-group oracle enumerates.
pub const ORACLE_CAP: u128 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrystallineParams {
    pub p: u64,
    pub k: u64,
    pub q: u64,
    pub n: u32,
    pub delta: u64,
}

impl CrystallineParams {
    pub fn new(p: u64, k: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if k < 2 {
            return Err(Error::invalid("weight must be at least 2"));
        }
        if n < 1 {
            return Err(Error::invalid("level n must be at least 1"));
        }
        let q = p.checked_mul(p).ok_or_else(|| Error::Unsupported("p too large".into()))?;
        Ok(CrystallineParams { p, k, q, n, delta: delta(p, k)? })
    }

    /// gcd(q - 1, k - 1).
    pub fn g(&self) -> u64 {
        gcd(self.q - 1, self.k - 1)
    }

    /// Whether p >= 5, p does not divide k - 1 and (p + 1)/2 does not divide k - 1.
    pub fn satisfies_p3(&self) -> bool {
        p3_holds(self.p, self.k)
    }
}

pub fn p3_holds(p: u64, k: u64) -> bool {
    p >= 5 && !(k - 1).is_multiple_of(p) && !(k - 1).is_multiple_of(p.div_ceil(2))
}

/// (p^2 - 1) / gcd(p^2 - 1, k - 1).
pub fn delta(p: u64, k: u64) -> Result<u64> {
    if !is_prime(p) || k < 2 {
        return Err(Error::invalid("delta needs p prime and k >= 2"));
    }
    let q1 = p * p - 1;
    Ok(q1 / gcd(q1, k - 1))
}

fn checked_pow(b: u64, e: u32) -> Result<u128> {
    (b as u128)
        .checked_pow(e)
        .ok_or_else(|| Error::Unsupported(format!("{b}^{e} overflows")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisStructure {
    pub invariants: Vec<u128>,
    pub order: u128,
}

/// Invariants `[delta, p^(n-1), p^(n-1)]` with trivial factors dropped.
pub fn gal_structure(params: &CrystallineParams) -> Result<GaloisStructure> {
    let pn1 = checked_pow(params.p, params.n - 1)?;
    let invariants: Vec<u128> = [params.delta as u128, pn1, pn1]
        .into_iter()
        .filter(|&x| x > 1)
        .collect();
    let order = invariants.iter().product();
    Ok(GaloisStructure { invariants, order })
}

/// Primary decomposition: sorted list of prime powers.
pub fn primary_parts(invariants: &[u128]) -> Vec<u128> {
    let mut out = Vec::new();
    for &d in invariants {
        for (l, e) in factorize(d as u64) {
            out.push((l as u128).pow(e));
        }
    }
    out.sort_unstable();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Break {
    /// First and last index i in this range.
    pub i_start: u128,
    pub i_end: u128,
    /// G_i = Gal(L(p^n) / L(p^j)).
    pub fixed_level: u32,
    pub group_order: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationFiltration {
    pub breaks: Vec<Break>,
    /// Last index with nontrivial G_i.
    pub last_break: u128,
    pub last_order: u128,
    /// e_n = delta q^(n-1).
    pub ramification_index: u128,
}

impl RamificationFiltration {
    /// `e_n / (i_n + 1)` as a reduced fraction.
    pub fn ratio(&self) -> (u128, u128) {
        let num = self.ramification_index;
        let den = self.last_break + 1;
        let g = gcd_u128(num, den);
        (num / g, den / g)
    }

    pub fn order_at(&self, i: u128) -> u128 {
        self.breaks
            .iter()
            .find(|b| b.i_start <= i && i <= b.i_end)
            .map_or(1, |b| b.group_order)
    }
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd_u128(b, a % b)
    }
}

/// Lower-numbered filtration: G_0 is the whole group, and for 1 <= j < n,
/// G_i = Gal(L(p^n)/L(p^j)) when q^(j-1) <= g i <= q^j - 1.
pub fn ramification_filtration(params: &CrystallineParams) -> Result<RamificationFiltration> {
    let q = params.q;
    let g = params.g() as u128;
    let n = params.n;
    let e_n = params.delta as u128 * checked_pow(q, n - 1)?;
    let mut breaks = vec![Break { i_start: 0, i_end: 0, fixed_level: 0, group_order: e_n }];
    for j in 1..n {
        let lo = checked_pow(q, j - 1)?;
        let hi = checked_pow(q, j)? - 1;
        breaks.push(Break {
            i_start: lo.div_ceil(g),
            i_end: hi / g,
            fixed_level: j,
            group_order: checked_pow(q, n - j)?,
        });
    }
    let last = breaks.last().expect("nonempty");
    Ok(RamificationFiltration {
        last_break: last.i_end,
        last_order: last.group_order,
        ramification_index: e_n,
        breaks,
    })
}

/// The ring (Z/p^n)[x]/(f) for the least monic irreducible quadratic f mod p.
#[derive(Clone, Debug)]
pub struct UnitGroupModel {
    pub p: u64,
    pub n: u32,
    modulus: u64,
    /// f = x^2 + c1 x + c0.
    c0: u64,
    c1: u64,
}

type Unit = (u64, u64);

impl UnitGroupModel {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) || n == 0 {
            return Err(Error::invalid("unit group model needs p prime and n >= 1"));
        }
        let f = least_irreducible(p, 2);
        let modulus = p.checked_pow(n).ok_or_else(|| Error::Unsupported("p^n overflows".into()))?;
        Ok(UnitGroupModel { p, n, modulus, c0: f.coeffs()[0], c1: f.coeffs()[1] })
    }

    pub fn defining_coeffs(&self) -> (u64, u64) {
        (self.c0, self.c1)
    }

    pub fn mul(&self, a: Unit, b: Unit) -> Unit {
        let m = self.modulus;
        // (a0 + a1 x)(b0 + b1 x) with x^2 = -c1 x - c0
        let x0 = mul_mod(a.0, b.0, m);
        let x1 = (mul_mod(a.0, b.1, m) + mul_mod(a.1, b.0, m)) % m;
        let x2 = mul_mod(a.1, b.1, m);
        let r0 = (x0 + m - mul_mod(x2, self.c0, m)) % m;
        let r1 = (x1 + m - mul_mod(x2, self.c1, m)) % m;
        (r0, r1)
    }

    pub fn pow(&self, a: Unit, mut e: u64) -> Unit {
        let mut acc = (1 % self.modulus, 0);
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// a + b x is a unit iff it is nonzero mod p.
    pub fn units(&self) -> Vec<Unit> {
        let m = self.modulus;
        let mut out = Vec::new();
        for a in 0..m {
            for b in 0..m {
                if a % self.p != 0 || b % self.p != 0 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// N(a + b x) = a^2 - c1 a b + c0 b^2 modulo p^n.
    pub fn norm(&self, u: Unit) -> u64 {
        let m = self.modulus;
        let t = mul_mod(mul_mod(self.c1, u.0, m), u.1, m);
        (mul_mod(u.0, u.0, m) + m - t + mul_mod(self.c0, mul_mod(u.1, u.1, m), m)) % m
    }
}

/// Abelian invariants (as prime powers) of a finite abelian group given by
/// its element set and multiplication, from counts of l^j-torsion.
pub fn abelian_primary_invariants<T, F>(elements: &[T], identity: &T, pow: F) -> Vec<u128>
where
    T: PartialEq,
    F: Fn(&T, u64) -> T,
{
    let order = elements.len() as u64;
    let mut out = Vec::new();
    for (l, e) in factorize(order) {
        // counts[j] = |A[l^j]|
        let counts: Vec<u64> = (0..=e)
            .map(|j| elements.iter().filter(|x| pow(x, l.pow(j)) == *identity).count() as u64)
            .collect();
        // r_j = number of cyclic factors of exponent >= j = log_l(counts[j] / counts[j-1])
        let ranks: Vec<u32> = (1..=e as usize)
            .map(|j| ilog_exact(counts[j] / counts[j - 1], l))
            .collect();
        for j in 1..=e as usize {
            let next = ranks.get(j).copied().unwrap_or(0);
            for _ in 0..ranks[j - 1] - next {
                out.push((l as u128).pow(j as u32));
            }
        }
    }
    out.sort_unstable();
    out
}

fn ilog_exact(mut x: u64, l: u64) -> u32 {
    let mut e = 0;
    while x > 1 {
        x /= l;
        e += 1;
    }
    e
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OracleResult {
    Enumerated {
        unit_count: u128,
        image_order: u128,
        primary_invariants: Vec<u128>,
        matches_formula: bool,
    },
    FormulaOnly { reason: String },
}

/// Enumerate the (k-1)-th power image of the units of (Z/p^n)[x]/(f) and
/// compare its structure with [`gal_structure`].
pub fn unit_group_oracle(params: &CrystallineParams) -> Result<OracleResult> {
    let size = checked_pow(params.q, 2 * params.n).unwrap_or(u128::MAX);
    if size > ORACLE_CAP {
        return Ok(OracleResult::FormulaOnly {
            reason: format!("q^(2n) = {} exceeds the enumeration cap {ORACLE_CAP}", size),
        });
    }
    let model = UnitGroupModel::new(params.p, params.n)?;
    let units = model.units();
    let image: HashSet<Unit> = units.iter().map(|&u| model.pow(u, params.k - 1)).collect();
    let image: Vec<Unit> = image.into_iter().collect();
    let one = (1 % model.modulus, 0);
    let primary = abelian_primary_invariants(&image, &one, |&x, e| model.pow(x, e));
    let formula = gal_structure(params)?;
    Ok(OracleResult::Enumerated {
        unit_count: units.len() as u128,
        image_order: image.len() as u128,
        matches_formula: primary == primary_parts(&formula.invariants),
        primary_invariants: primary,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormReport {
    pub surjective: bool,
    /// p divides k - 1, so the power map kills the quotient.
    pub degenerate: bool,
    pub image_size: u64,
    pub quotient_size: u64,
}

/// Image of `u -> N(u)^(k-1)` from (1 + p^(n-1) O)/(1 + p^n O) onto
/// (1 + p^(n-1) Z_p)/(1 + p^n Z_p), which has p elements.
pub fn norm_surjective(p: u64, n: u32, k: u64) -> Result<NormReport> {
    if n < 2 {
        return Err(Error::invalid("the norm quotient is modelled for n >= 2"));
    }
    if k < 2 {
        return Err(Error::invalid("weight must be at least 2"));
    }
    let model = UnitGroupModel::new(p, n)?;
    let step = p.pow(n - 1);
    let mut image = BTreeSet::new();
    for y0 in 0..p {
        for y1 in 0..p {
            let u = ((1 + y0 * step) % model.modulus, (y1 * step) % model.modulus);
            let v = pow_mod(model.norm(u), k - 1, model.modulus);
            image.insert(v);
        }
    }
    let image_size = image.len() as u64;
    Ok(NormReport {
        surjective: image_size == p,
        degenerate: (k - 1).is_multiple_of(p),
        image_size,
        quotient_size: p,
    })
}

/// g = M^(2(p-1)), the integer by which the central element acts.
pub fn central_exponent(p: u64, m: u64) -> Result<BigUint> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if m < 2 {
        return Err(Error::invalid("M must be at least 2 so that g > 1"));
    }
    if gcd(m, p) != 1 {
        return Err(Error::invalid(format!("M = {m} is not prime to p = {p}")));
    }
    Ok(crate::arith::big_pow(m, 2 * (p - 1)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCheck {
    pub n: u32,
    pub e_n: u128,
    pub i_n: u128,
    /// e_n / (i_n + 1) as (numerator, denominator).
    pub ratio: (u128, u128),
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assumption3Report {
    #[serde(with = "crate::serde_big::uint")]
    pub c1: BigUint,
    #[serde(with = "crate::serde_big::uint")]
    pub c2: BigUint,
    pub checks: Vec<LevelCheck>,
    pub all_ok: bool,
}

/// C1 = p^2 and C2 = p^(4 d), with e_n/(i_n + 1) <= q - 1 < C1 checked for n <= n_max.
pub fn assumption3_constants(p: u64, k: u64, hecke_degree: u32, n_max: u32) -> Result<Assumption3Report> {
    if hecke_degree == 0 {
        return Err(Error::invalid("Hecke field degree must be at least 1"));
    }
    if !is_prime(p) || k < 2 {
        return Err(Error::invalid("need p prime and k >= 2"));
    }
    if !p3_holds(p, k) {
        return Err(Error::invalid(format!(
            "(p, k) = ({p}, {k}) violates p >= 5, p not dividing k-1, (p+1)/2 not dividing k-1"
        )));
    }
    let q = (p * p) as u128;
    let c1 = crate::arith::big_pow(p, 2);
    let c2 = crate::arith::big_pow(p, 4 * hecke_degree as u64);
    let mut checks = Vec::new();
    for n in 1..=n_max {
        let params = CrystallineParams::new(p, k, n)?;
        let filt = ramification_filtration(&params)?;
        let (num, den) = filt.ratio();
        // num/den <= q - 1 < q = C1
        checks.push(LevelCheck {
            n,
            e_n: filt.ramification_index,
            i_n: filt.last_break,
            ratio: (num, den),
            ok: num <= (q - 1) * den,
        });
    }
    let all_ok = checks.iter().all(|c| c.ok);
    Ok(Assumption3Report { c1, c2, checks, all_ok })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaOrders {
    /// Orders m' such that an element of order m' squares to order m.
    pub direct: BTreeSet<u64>,
    /// Orders after twisting by a primitive fourth root of unity.
    pub twisted: BTreeSet<u64>,
}

/// Admissible orders of omega given the order of chi(p) = omega(p^-1)^2.
pub fn omega_order(chi_order: u64) -> Result<OmegaOrders> {
    if chi_order == 0 {
        return Err(Error::invalid("order must be positive"));
    }
    let m = chi_order;
    let direct: BTreeSet<u64> = if m % 2 == 1 { [m, 2 * m].into() } else { [2 * m].into() };
    // Order of u/a + 1/4 in Q/Z over generators u of the cyclic group of order a.
    let mut twisted = BTreeSet::new();
    for &a in &direct {
        for u in (0..a.max(1)).filter(|&u| gcd(u, a) == 1 || a == 1) {
            let num = (4 * u + a) % (4 * a);
            let den = 4 * a;
            let g = gcd(num, den);
            twisted.insert(if num == 0 { 1 } else { den / g });
        }
    }
    Ok(OmegaOrders { direct, twisted })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_examples() {
        assert_eq!(delta(5, 2).unwrap(), 24);
        assert_eq!(delta(5, 25).unwrap(), 1);
        assert_eq!(delta(5, 13).unwrap(), 2);
    }

    #[test]
    fn structures() {
        let s = gal_structure(&CrystallineParams::new(5, 2, 1).unwrap()).unwrap();
        assert_eq!((s.invariants, s.order), (vec![24], 24));
        let s = gal_structure(&CrystallineParams::new(5, 2, 2).unwrap()).unwrap();
        assert_eq!((s.invariants, s.order), (vec![24, 5, 5], 600));
        let s = gal_structure(&CrystallineParams::new(5, 25, 1).unwrap()).unwrap();
        assert_eq!((s.invariants, s.order), (vec![], 1));
    }

    #[test]
    fn filtrations() {
        let f = ramification_filtration(&CrystallineParams::new(5, 2, 2).unwrap()).unwrap();
        assert_eq!((f.last_break, f.last_order), (24, 25));
        assert_eq!(f.ratio(), (24, 1));
        let f = ramification_filtration(&CrystallineParams::new(5, 2, 1).unwrap()).unwrap();
        assert_eq!((f.last_break, f.last_order), (0, 24));
        let f = ramification_filtration(&CrystallineParams::new(7, 4, 3).unwrap()).unwrap();
        // g = gcd(48, 3) = 3: ranges [0], [1, 16], [17, 800]
        let ranges: Vec<(u128, u128)> = f.breaks.iter().map(|b| (b.i_start, b.i_end)).collect();
        assert_eq!(ranges, vec![(0, 0), (1, 16), (17, 800)]);
    }

    #[test]
    fn oracle_small_cases() {
        for (p, k, n) in [(5, 2, 1), (5, 2, 2), (7, 2, 1), (5, 13, 1)] {
            let params = CrystallineParams::new(p, k, n).unwrap();
            match unit_group_oracle(&params).unwrap() {
                OracleResult::Enumerated { matches_formula, .. } => assert!(matches_formula, "{p} {k} {n}"),
                other => panic!("unexpected {other:?}"),
            }
        }
        let big = CrystallineParams::new(7, 2, 2).unwrap();
        assert!(matches!(unit_group_oracle(&big).unwrap(), OracleResult::FormulaOnly { .. }));
    }

    #[test]
    fn norms() {
        assert!(norm_surjective(5, 2, 2).unwrap().surjective);
        assert!(norm_surjective(7, 2, 2).unwrap().surjective);
        let d = norm_surjective(5, 2, 6).unwrap();
        assert!(d.degenerate && !d.surjective);
        assert!(norm_surjective(5, 1, 2).is_err());
    }

    #[test]
    fn central_exponents() {
        assert_eq!(central_exponent(5, 2).unwrap(), BigUint::from(256u32));
        assert_eq!(central_exponent(7, 2).unwrap(), BigUint::from(4096u32));
        assert!(central_exponent(5, 1).is_err());
        assert!(central_exponent(5, 10).is_err());
    }

    #[test]
    fn assumption3() {
        let r = assumption3_constants(5, 2, 4, 6).unwrap();
        assert_eq!(r.c1, BigUint::from(25u32));
        assert_eq!(r.c2, crate::arith::big_pow(5, 16));
        assert!(r.all_ok);
        let r = assumption3_constants(199, 2, 2, 3).unwrap();
        assert_eq!(r.c2, crate::arith::big_pow(199, 8));
        assert!(assumption3_constants(5, 2, 0, 3).is_err());
        assert!(assumption3_constants(3, 2, 1, 3).is_err());
        assert!(assumption3_constants(5, 4, 1, 3).is_err());
    }

    #[test]
    fn omega_orders() {
        let o = omega_order(1).unwrap();
        assert_eq!(o.direct, [1, 2].into());
        assert_eq!(o.twisted, [4].into());
        assert_eq!(omega_order(2).unwrap().direct, [4].into());
        assert_eq!(omega_order(4).unwrap().direct, [8].into());
    }
}
