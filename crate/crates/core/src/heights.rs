//! Weil heights, the place-sum lower bound, p-adic acceleration and the
//! resulting Bogomolov constant.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algnum::embed::certified_roots;
use crate::algnum::field::FieldElement;
use crate::algnum::galois::{apply_automorphism, AbelianAutomorphism};
use crate::error::{Error, Result};

/// Working precision (bits) for root enclosures.
const HEIGHT_PRECISION: u32 = 128;

/// Certified enclosure of a height, in natural-log units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightValue {
    pub lower: f64,
    pub upper: f64,
}

impl HeightValue {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        (self.lower + self.upper) / 2.0
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

impl fmt::Display for HeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.15}, {:.15}]", self.lower, self.upper)
    }
}

fn widen_down(v: f64) -> f64 {
    v - v.abs() * 8.0 * f64::EPSILON - 1e-300
}

fn widen_up(v: f64) -> f64 {
    v + v.abs() * 8.0 * f64::EPSILON + 1e-300
}

fn ln_bigint(x: &BigInt) -> f64 {
    let x = x.abs();
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().map(f64::ln).unwrap_or(f64::INFINITY)
    } else {
        let shift = bits - 64;
        (&x >> shift as usize).to_f64().unwrap_or(1.0).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Absolute logarithmic Weil height via the Mahler measure of the minimal polynomial.
pub fn weil_height(x: &FieldElement) -> Result<HeightValue> {
    if x.is_zero() {
        return Err(Error::invalid("the height of 0 is undefined here"));
    }
    let mp = x.minimal_polynomial();
    let d = mp.degree() as f64;
    let roots = certified_roots(&mp, HEIGHT_PRECISION)?;
    let lc = ln_bigint(&mp.leading());
    let (mut lo, mut hi) = (lc, lc);
    for r in &roots {
        let (a, b) = r.abs_bounds();
        lo += a.max(1.0).ln();
        hi += b.max(1.0).ln();
    }
    let lower = widen_down(widen_down(lo) / d).max(0.0);
    let upper = widen_up(widen_up(hi) / d).max(lower);
    Ok(HeightValue { lower, upper })
}

/// A positive rational given as `a/b`, an integer, or a decimal such as `0.04`.
pub fn parse_positive_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let v = if let Some((int, frac)) = t.split_once('.') {
        if t.contains('/') {
            return Err(Error::invalid(format!("cannot mix '.' and '/' in {t:?}")));
        }
        let digits = format!("{int}{frac}");
        let num = BigInt::from_str(&digits).map_err(|e| Error::invalid(format!("bad number {t:?}: {e}")))?;
        BigRational::new(num, BigInt::from(10u32).pow(frac.len() as u32))
    } else {
        crate::algnum::field::parse_rational(t)?
    };
    if !v.is_positive() {
        return Err(Error::invalid(format!("{t} must be positive")));
    }
    Ok(v)
}

/// Parameters of the place-sum lower bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub a: u64,
    pub b: u64,
    pub rho: f64,
    pub s_size: u64,
    /// `[L_v : Q_p] / [L : Q]` as (numerator, denominator).
    pub degree_ratio: (u64, u64),
    pub p: u64,
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        let (n, d) = self.degree_ratio;
        if self.a == 0 || self.b == 0 {
            return Err(Error::invalid("a and b must be at least 1"));
        }
        if !self.rho.is_finite() || self.rho <= 0.0 {
            return Err(Error::invalid("rho must be positive"));
        }
        if self.s_size == 0 {
            return Err(Error::invalid("|S| must be positive"));
        }
        if n == 0 || d == 0 || n > d {
            return Err(Error::invalid("degree ratio must lie in (0, 1]"));
        }
        if !crate::arith::is_prime(self.p) {
            return Err(Error::invalid(format!("{} is not prime", self.p)));
        }
        Ok(())
    }
}

/// `(|S| * ratio * rho * log p - log 2) / (a + b)`; may be nonpositive.
pub fn lower_bound(params: &BoundParams) -> Result<f64> {
    params.validate()?;
    let (n, d) = params.degree_ratio;
    let ratio = n as f64 / d as f64;
    let p = params.p as f64;
    Ok((params.s_size as f64 * ratio * params.rho * p.ln() - std::f64::consts::LN_2)
        / (params.a + params.b) as f64)
}

/// Number of initial steps of `s -> min(p s, s + 1)` that multiply by p,
/// capped at `cap`: the least k with `rho p^k > 1/(p-1)`.
fn multiply_steps(p: u64, rho: &BigRational, cap: Option<&BigUint>) -> (u64, BigRational) {
    let threshold = BigRational::new(BigInt::one(), BigInt::from(p - 1));
    let pr = BigRational::from_integer(BigInt::from(p));
    let mut s = rho.clone();
    let mut k = 0u64;
    while s <= threshold {
        if cap.is_some_and(|c| BigUint::from(k) >= *c) {
            break;
        }
        s = &s * &pr;
        k += 1;
    }
    (k, s)
}

/// `s_{p,rho}(lambda)`: iterate `s -> min(p s, s + 1)` lambda times from rho.
pub fn accelerate(p: u64, rho: &BigRational, lambda: &BigUint) -> Result<BigRational> {
    if !rho.is_positive() {
        return Err(Error::invalid("rho must be positive"));
    }
    if !crate::arith::is_prime(p) {
        return Err(Error::invalid(format!("p = {p} is not prime")));
    }
    let (k, s) = multiply_steps(p, rho, Some(lambda));
    let rest = lambda - BigUint::from(k);
    Ok(s + BigRational::from_integer(BigInt::from(rest)))
}

/// Floating-point convenience wrapper around [`accelerate`].
pub fn accelerate_f64(p: u64, rho: f64, lambda: u64) -> Result<f64> {
    let r = BigRational::from_float(rho).ok_or_else(|| Error::invalid("rho must be finite"))?;
    let s = accelerate(p, &r, &BigUint::from(lambda))?;
    Ok(s.to_f64().unwrap_or(f64::INFINITY))
}

/// The constant `c = log(p/2) / (2 p^lambda)` with lambda minimal such that
/// `s_{p, 1/C1}(lambda) >= C2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BogomolovConstant {
    pub p: u64,
    #[serde(with = "crate::serde_big::rational")]
    pub c1: BigRational,
    #[serde(with = "crate::serde_big::uint")]
    pub c2: BigUint,
    #[serde(with = "crate::serde_big::uint")]
    pub lambda: BigUint,
    /// `c` as an f64; 0 when it underflows.
    pub c: f64,
    pub log10_c: f64,
}

impl BogomolovConstant {
    /// Human-readable form of c that survives underflow.
    pub fn c_display(&self) -> String {
        if self.c > 0.0 && self.c.is_normal() {
            format!("{:.12e}", self.c)
        } else if self.log10_c.abs() > 1e15 {
            format!("10^({:.9e})", self.log10_c)
        } else {
            let e = self.log10_c.floor();
            format!("{:.6}e{}", 10f64.powf(self.log10_c - e), e as i64)
        }
    }
}

pub fn bogomolov_constant(p: u64, c1: &BigRational, c2: &BigUint) -> Result<BogomolovConstant> {
    if p < 3 || !crate::arith::is_prime(p) {
        return Err(Error::invalid(format!("p = {p} must be a prime >= 3")));
    }
    if !c1.is_positive() {
        return Err(Error::invalid("C1 must be positive"));
    }
    if c2.is_zero() {
        return Err(Error::invalid("C2 must be positive"));
    }
    let rho = c1.recip();
    let target = BigRational::from_integer(BigInt::from(c2.clone()));
    let pr = BigRational::from_integer(BigInt::from(p));
    let (k, s_k) = multiply_steps(p, &rho, None);
    // Smallest lambda within the multiplicative phase, if any.
    let mut s = rho.clone();
    let mut lambda = None;
    for j in 0..=k {
        if s >= target {
            lambda = Some(BigUint::from(j));
            break;
        }
        s = &s * &pr;
    }
    let lambda = lambda.unwrap_or_else(|| {
        let gap = &target - &s_k;
        let steps = gap.ceil().to_integer();
        BigUint::from(k) + steps.to_biguint().unwrap_or_default()
    });
    debug_assert!(accelerate(p, &rho, &lambda).map(|v| v >= target).unwrap_or(false));
    let lf = lambda.to_f64().unwrap_or(f64::INFINITY);
    let base = (p as f64 / 2.0).ln() / 2.0;
    let log10_c = base.log10() - lf * (p as f64).log10();
    let c = if lf < 1000.0 {
        base / (p as f64).powf(lf)
    } else {
        0.0
    };
    Ok(BogomolovConstant {
        p,
        c1: c1.clone(),
        c2: c2.clone(),
        lambda,
        c,
        log10_c,
    })
}

/// Result of forming `beta = tau(x) / x^g`.
#[derive(Clone, Debug)]
pub struct SpecialElement {
    pub beta: FieldElement,
    pub height_x: HeightValue,
    pub height_beta: HeightValue,
    /// `h(x) >= h(beta) / (g + 1)` up to the interval widths.
    pub bound_holds: bool,
}

pub fn special_element(x: &FieldElement, tau: &AbelianAutomorphism, g: u64) -> Result<SpecialElement> {
    if g < 2 {
        return Err(Error::invalid("g must be an integer greater than 1"));
    }
    if x.is_zero() {
        return Err(Error::invalid("x must be nonzero"));
    }
    if x.is_root_of_unity() {
        return Err(Error::invalid(
            "x is a root of unity; beta would force h(x) = 0",
        ));
    }
    let beta = &apply_automorphism(tau, x)? * &x.pow(g as i64)?.inverse()?;
    if beta.is_root_of_unity() {
        return Err(Error::invalid("beta is a root of unity, which forces h(x) = 0"));
    }
    let height_x = weil_height(x)?;
    let height_beta = weil_height(&beta)?;
    let bound_holds = (g as f64 + 1.0) * height_x.upper + 1e-12 >= height_beta.lower;
    Ok(SpecialElement { beta, height_x, height_beta, bound_holds })
}
