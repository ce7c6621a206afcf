//! Polynomials over a prime field and their factorisation.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::algnum::poly::IntPoly;
use crate::arith::{inv_mod, is_prime, mul_mod};
use crate::error::{Error, Result};

/// Exhaustive root scans are used for linear factors below this modulus.
const ROOT_SCAN_LIMIT: u64 = 1 << 16;

/// Polynomial over F_p, constant term first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { p, coeffs }
    }

    pub fn from_int(poly: &IntPoly, p: u64) -> Self {
        let coeffs = poly
            .coeffs()
            .iter()
            .map(|c| crate::arith::reduce_bigint(c, p))
            .collect();
        FpPoly::new(p, coeffs)
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        FpPoly::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn monic(&self) -> FpPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.leading(), self.p).expect("field element invertible");
        self.scale(inv)
    }

    pub fn scale(&self, c: u64) -> FpPoly {
        FpPoly::new(
            self.p,
            self.coeffs.iter().map(|&a| mul_mod(a, c, self.p)).collect(),
        )
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| (mul_mod(acc, x, self.p) + c) % self.p)
    }

    pub fn add(&self, other: &FpPoly) -> FpPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        FpPoly::new(
            self.p,
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0) + other.coeffs.get(i).copied().unwrap_or(0)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &FpPoly) -> FpPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let p = self.p;
        FpPoly::new(
            p,
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).copied().unwrap_or(0);
                    let b = other.coeffs.get(i).copied().unwrap_or(0);
                    (a + p - b) % p
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p as u128;
        let mut out = vec![0u128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a as u128 * b as u128) % p;
            }
        }
        FpPoly::new(self.p, out.into_iter().map(|c| c as u64).collect())
    }

    pub fn div_rem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        if self.coeffs.len() < d.coeffs.len() {
            return (FpPoly::zero(p), self.clone());
        }
        let inv = inv_mod(d.leading(), p).expect("invertible leading coefficient");
        let dd = d.degree();
        let mut r = self.coeffs.clone();
        let mut q = vec![0u64; self.coeffs.len() - dd];
        for k in (0..q.len()).rev() {
            let c = mul_mod(r[k + dd], inv, p);
            if c != 0 {
                for (j, &dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = (r[k + j] + p - mul_mod(c, dc, p)) % p;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn rem(&self, d: &FpPoly) -> FpPoly {
        self.div_rem(d).1
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &FpPoly) -> FpPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> FpPoly {
        FpPoly::new(
            self.p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| mul_mod(c, i as u64 % self.p, self.p))
                .collect(),
        )
    }

    /// `self^exp mod modulus`.
    pub fn pow_mod(&self, exp: &BigUint, modulus: &FpPoly) -> FpPoly {
        let mut acc = FpPoly::one(self.p).rem(modulus);
        let base = self.rem(modulus);
        for i in (0..exp.bits()).rev() {
            acc = acc.mul(&acc).rem(modulus);
            if exp.bit(i) {
                acc = acc.mul(&base).rem(modulus);
            }
        }
        acc
    }

    /// Inverse of the Frobenius on a polynomial whose derivative vanishes.
    fn pth_root(&self) -> FpPoly {
        let p = self.p as usize;
        FpPoly::new(
            self.p,
            self.coeffs.iter().step_by(p).copied().collect(),
        )
    }

    fn pow(&self, e: u32) -> FpPoly {
        (0..e).fold(FpPoly::one(self.p), |acc, _| acc.mul(self))
    }

    /// Roots in F_p by exhaustive scan, ascending.
    pub fn roots_by_scan(&self) -> Vec<u64> {
        (0..self.p).filter(|&x| self.eval(x) == 0).collect()
    }

    fn cmp_key(&self, other: &FpPoly) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "X")?,
                (1, _) => write!(f, "{c}*X")?,
                (_, 1) => write!(f, "X^{i}")?,
                _ => write!(f, "{c}*X^{i}")?,
            }
        }
        Ok(())
    }
}

/// Factorisation of a polynomial mod p: a unit times monic irreducibles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpFactorization {
    pub p: u64,
    pub unit: u64,
    pub factors: Vec<(FpPoly, u32)>,
}

impl FpFactorization {
    pub fn expand(&self) -> FpPoly {
        self.factors
            .iter()
            .fold(FpPoly::new(self.p, vec![self.unit]), |acc, (f, m)| acc.mul(&f.pow(*m)))
    }

    /// Roots of the linear factors, ascending.
    pub fn linear_roots(&self) -> Vec<u64> {
        let mut roots: Vec<u64> = self
            .factors
            .iter()
            .filter(|(f, _)| f.degree() == 1)
            .map(|(f, _)| (self.p - f.coeffs()[0]) % self.p)
            .collect();
        roots.sort_unstable();
        roots
    }
}

/// Factor `poly` into monic irreducibles over F_p.
pub fn factor_mod_p(poly: &IntPoly, p: u64) -> Result<FpFactorization> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if poly.is_zero() {
        return Err(Error::invalid("cannot factor the zero polynomial"));
    }
    let f = FpPoly::from_int(poly, p);
    if f.degree() != poly.degree() || f.is_zero() {
        return Err(Error::invalid(format!(
            "leading coefficient of {poly} is divisible by {p}"
        )));
    }
    Ok(factor_fp(&f))
}

pub fn factor_fp(f: &FpPoly) -> FpFactorization {
    let p = f.modulus();
    let unit = f.leading();
    let monic = f.monic();
    let mut factors: Vec<(FpPoly, u32)> = Vec::new();
    for (sqf, mult) in squarefree(&monic) {
        for (block, d) in distinct_degree(&sqf) {
            for irr in equal_degree(&block, d) {
                match factors.iter_mut().find(|(g, _)| *g == irr) {
                    Some(entry) => entry.1 += mult,
                    None => factors.push((irr, mult)),
                }
            }
        }
    }
    factors.sort_by(|a, b| a.0.cmp_key(&b.0));
    FpFactorization { p, unit, factors }
}

/// Squarefree decomposition of a monic polynomial: pairs (squarefree part, multiplicity).
fn squarefree(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let p = f.modulus();
    let mut out = Vec::new();
    if f.degree() == 0 {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        for (g, m) in squarefree(&f.pth_root()) {
            out.push((g, m * p as u32));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.div_rem(&c).0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.div_rem(&y).0;
        if fac.degree() > 0 {
            out.push((fac.monic(), i));
        }
        i += 1;
        w = y;
        c = c.div_rem(&w).0;
    }
    if c.degree() > 0 {
        for (g, m) in squarefree(&c.monic().pth_root()) {
            out.push((g, m * p as u32));
        }
    }
    out
}

/// Distinct-degree factorisation of a squarefree monic polynomial.
fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.modulus();
    let pb = BigUint::from(p);
    let x = FpPoly::x(p);
    let mut rest = f.clone();
    let mut h = x.clone();
    let mut out = Vec::new();
    let mut d = 1;
    while rest.degree() >= 2 * d {
        h = h.pow_mod(&pb, &rest);
        let g = rest.gcd(&h.sub(&x));
        if !g.is_one() {
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    if rest.degree() > 0 {
        let deg = rest.degree();
        out.push((rest.monic(), deg));
    }
    out
}

/// Split a product of distinct monic irreducibles of degree `d`.
fn equal_degree(f: &FpPoly, d: usize) -> Vec<FpPoly> {
    let p = f.modulus();
    if f.degree() == d {
        return vec![f.clone()];
    }
    if d == 1 && p < ROOT_SCAN_LIMIT {
        return f
            .roots_by_scan()
            .into_iter()
            .map(|r| FpPoly::new(p, vec![(p - r) % p, 1]))
            .collect();
    }
    let mut pending = vec![f.clone()];
    let mut done = Vec::new();
    let mut counter: u64 = p;
    while let Some(g) = pending.pop() {
        if g.degree() == d {
            done.push(g);
            continue;
        }
        loop {
            let a = candidate(counter, p, g.degree());
            counter += 1;
            if let Some(h) = split_with(&g, &a, d) {
                let other = g.div_rem(&h).0;
                pending.push(h);
                pending.push(other.monic());
                break;
            }
        }
    }
    done
}

/// Deterministic enumeration of non-constant polynomials of degree below `bound`.
fn candidate(mut k: u64, p: u64, bound: usize) -> FpPoly {
    let mut coeffs = Vec::new();
    while k > 0 && coeffs.len() < bound {
        coeffs.push(k % p);
        k /= p;
    }
    FpPoly::new(p, coeffs)
}

fn split_with(g: &FpPoly, a: &FpPoly, d: usize) -> Option<FpPoly> {
    let p = g.modulus();
    if a.degree() == 0 {
        return None;
    }
    let b = if p == 2 {
        // Absolute trace to F_2: a + a^2 + ... + a^(2^(nd-1)) with n = 1 here.
        let mut acc = a.rem(g);
        let mut t = acc.clone();
        for _ in 1..d {
            t = t.mul(&t).rem(g);
            acc = acc.add(&t);
        }
        acc
    } else {
        let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) >> 1;
        a.pow_mod(&e, g).sub(&FpPoly::one(p))
    };
    if b.is_zero() {
        return None;
    }
    let h = g.gcd(&b);
    (h.degree() > 0 && h.degree() < g.degree()).then_some(h)
}

/// Lexicographically least monic irreducible of degree `d` over F_p
/// (ordered by coefficients from X^(d-1) down to the constant term).
pub fn least_irreducible(p: u64, d: usize) -> FpPoly {
    assert!(d >= 1);
    if d == 1 {
        return FpPoly::x(p);
    }
    let total = (p as u128).pow(d as u32);
    for k in 0..total {
        // Most significant digit is the X^(d-1) coefficient.
        let mut coeffs = vec![0u64; d + 1];
        coeffs[d] = 1;
        let mut rest = k;
        for i in 0..d {
            coeffs[i] = (rest % p as u128) as u64;
            rest /= p as u128;
        }
        let f = FpPoly::new(p, coeffs);
        if is_irreducible(&f) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

pub fn is_irreducible(f: &FpPoly) -> bool {
    if f.degree() == 0 {
        return false;
    }
    let fac = factor_fp(f);
    fac.factors.len() == 1 && fac.factors[0].1 == 1
}
