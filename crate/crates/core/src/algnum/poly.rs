use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Polynomial with integer coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn x_minus(c: i64) -> Self {
        Self::from_i64(&[-c, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive(&self) -> IntPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        IntPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn eval_mod(&self, x: u64, p: u64) -> u64 {
        let m = BigInt::from(p);
        let x = BigInt::from(x);
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc * &x + c).mod_floor(&m);
        }
        crate::arith::reduce_bigint(&acc, p)
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// The m-th cyclotomic polynomial.
    pub fn cyclotomic(m: u64) -> IntPoly {
        assert!(m >= 1);
        // Phi_m = prod_{d | m} (X^d - 1)^{mu(m/d)}, computed by exact division.
        let mut num = IntPoly::from_i64(&[1]);
        let mut den = IntPoly::from_i64(&[1]);
        for d in 1..=m {
            if !m.is_multiple_of(d) {
                continue;
            }
            let mut xd = vec![BigInt::zero(); d as usize + 1];
            xd[0] = BigInt::from(-1);
            xd[d as usize] = BigInt::one();
            let xd = IntPoly::new(xd);
            match mobius(m / d) {
                1 => num = num.mul(&xd),
                -1 => den = den.mul(&xd),
                _ => {}
            }
        }
        let (q, r) = num.to_rat().div_rem(&den.to_rat());
        debug_assert!(r.is_zero());
        q.to_int().expect("cyclotomic quotient is integral")
    }
}

fn mobius(n: u64) -> i32 {
    let f = crate::arith::factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.coeffs, "X")
    }
}

pub(crate) fn write_poly<T: fmt::Display + Signed + Clone>(
    f: &mut fmt::Formatter<'_>,
    coeffs: &[T],
    var: &str,
) -> fmt::Result {
    if coeffs.iter().all(|c| c.is_zero()) {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        first = false;
        let unit = mag.is_one();
        match i {
            0 => write!(f, "{mag}")?,
            1 if unit => write!(f, "{var}")?,
            1 => write!(f, "{mag}*{var}")?,
            _ if unit => write!(f, "{var}^{i}")?,
            _ => write!(f, "{mag}*{var}^{i}")?,
        }
    }
    Ok(())
}

/// Parses `1,0,0,0,1` or `[1, 0, 0, 0, 1]` (constant term first), or a
/// polynomial in x such as `x^4 + 1` or `2*x^2 - 3x + 1`.
impl FromStr for IntPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.contains(['x', 'X']) {
            return parse_symbolic(s);
        }
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        if body.trim().is_empty() {
            return Ok(IntPoly::zero());
        }
        let coeffs = body
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|e| Error::invalid(format!("bad coefficient {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntPoly::new(coeffs))
    }
}

fn parse_symbolic(s: &str) -> Result<IntPoly> {
    let bad = || Error::invalid(format!("cannot parse polynomial {s:?}"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase().replace("**", "^");
    if t.is_empty() {
        return Err(bad());
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, c) in t.char_indices() {
        if (c == '+' || c == '-') && i > 0 && !t[..i].ends_with('^') {
            terms.push(&t[start..i]);
            start = i;
        }
    }
    terms.push(&t[start..]);
    let mut coeffs: Vec<BigInt> = Vec::new();
    for term in terms {
        let (neg, body) = match term.strip_prefix('-') {
            Some(b) => (true, b),
            None => (false, term.strip_prefix('+').unwrap_or(term)),
        };
        let (coef, exp) = match body.split_once('x') {
            None => (body, 0usize),
            Some((c, rest)) => {
                let e = match rest.strip_prefix('^') {
                    Some(e) => e.parse().map_err(|_| bad())?,
                    None if rest.is_empty() => 1,
                    None => return Err(bad()),
                };
                (c.strip_suffix('*').unwrap_or(c), e)
            }
        };
        let mut c: BigInt = if coef.is_empty() {
            if exp == 0 {
                return Err(bad());
            }
            BigInt::one()
        } else {
            coef.parse().map_err(|_| bad())?
        };
        if neg {
            c = -c;
        }
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, BigInt::zero());
        }
        coeffs[exp] += c;
    }
    Ok(IntPoly::new(coeffs))
}

/// Dense polynomial over Q, constant term first. Internal workhorse for
/// characteristic and minimal polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly {
    pub(crate) coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn monic(&self) -> RatPoly {
        let lc = self.leading();
        RatPoly::new(self.coeffs.iter().map(|c| c / &lc).collect())
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = BigRational::zero();
        RatPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) - other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::new(Vec::new());
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let lc = d.leading();
        if self.coeffs.len() < d.coeffs.len() {
            return (RatPoly::new(Vec::new()), self.clone());
        }
        let mut q = vec![BigRational::zero(); self.coeffs.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (RatPoly::new(q), RatPoly::new(r))
    }

    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// Clear denominators and content to a primitive integer polynomial.
    pub fn to_primitive_int(&self) -> IntPoly {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        IntPoly::new(ints).primitive()
    }

    pub fn to_int(&self) -> Option<IntPoly> {
        if self.coeffs.iter().all(|c| c.is_integer()) {
            Some(IntPoly::new(self.coeffs.iter().map(|c| c.to_integer()).collect()))
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(IntPoly::cyclotomic(1), IntPoly::from_i64(&[-1, 1]));
        assert_eq!(IntPoly::cyclotomic(4), IntPoly::from_i64(&[1, 0, 1]));
        assert_eq!(IntPoly::cyclotomic(6), IntPoly::from_i64(&[1, -1, 1]));
        assert_eq!(IntPoly::cyclotomic(8), IntPoly::from_i64(&[1, 0, 0, 0, 1]));
        assert_eq!(IntPoly::cyclotomic(12), IntPoly::from_i64(&[1, 0, -1, 0, 1]));
        assert_eq!(IntPoly::cyclotomic(5), IntPoly::from_i64(&[1, 1, 1, 1, 1]));
    }

    #[test]
    fn display_and_parse() {
        let p: IntPoly = "[-2, 0, 0, 1]".parse().unwrap();
        assert_eq!(p.to_string(), "X^3 - 2");
        assert_eq!(IntPoly::from_i64(&[1, -1, 1]).to_string(), "X^2 - X + 1");
        assert!("1,x".parse::<IntPoly>().is_err());
        assert_eq!("x^2 - x - 1".parse::<IntPoly>().unwrap(), IntPoly::from_i64(&[-1, -1, 1]));
        assert_eq!("2*x^3+x**2-4".parse::<IntPoly>().unwrap(), IntPoly::from_i64(&[-4, 0, 1, 2]));
        assert_eq!("-X+3".parse::<IntPoly>().unwrap(), IntPoly::from_i64(&[3, -1]));
        assert!("x^".parse::<IntPoly>().is_err());
    }

    #[test]
    fn primitive_part() {
        let p = IntPoly::from_i64(&[4, -6, -2]);
        assert_eq!(p.primitive(), IntPoly::from_i64(&[-2, 3, 1]));
    }
}
