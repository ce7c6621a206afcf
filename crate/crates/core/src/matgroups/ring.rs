use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algnum::fp_poly::{least_irreducible, FpPoly};
use crate::arith::{inv_mod, is_prime, mul_mod};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingKind {
    /// Z / p^n.
    ZmodPn { p: u64, n: u32 },
    /// Product of F_{p^f} for the listed residual degrees.
    ProductField { p: u64, degrees: Vec<u32> },
}

/// A finite ring Z/p^n or a product of finite fields of characteristic p.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteRingSpec {
    kind: RingKind,
    /// Defining polynomial of each field component (monic, constant first).
    moduli: Vec<Vec<u64>>,
    offsets: Vec<usize>,
    width: usize,
    modulus: u64,
}

/// Component-wise residues: one value for Z/p^n, otherwise the power-basis
/// coefficients of each field component concatenated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElem(pub Vec<u64>);

impl FiniteRingSpec {
    pub fn zmod(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) || n == 0 {
            return Err(Error::invalid(format!("Z/{p}^{n} needs p prime and n >= 1")));
        }
        let modulus = p
            .checked_pow(n)
            .filter(|&m| m < (1 << 31))
            .ok_or_else(|| Error::Unsupported(format!("{p}^{n} is too large")))?;
        Ok(FiniteRingSpec {
            kind: RingKind::ZmodPn { p, n },
            moduli: Vec::new(),
            offsets: vec![0],
            width: 1,
            modulus,
        })
    }

    pub fn product_field(p: u64, degrees: &[u32]) -> Result<Self> {
        if !is_prime(p) || degrees.is_empty() || degrees.contains(&0) {
            return Err(Error::invalid("product of fields needs p prime and positive degrees"));
        }
        if degrees.iter().sum::<u32>() > 8 {
            return Err(Error::Unsupported("total residual degree above 8".into()));
        }
        let moduli: Vec<Vec<u64>> = degrees
            .iter()
            .map(|&f| least_irreducible(p, f as usize).coeffs().to_vec())
            .collect();
        let mut offsets = Vec::with_capacity(degrees.len());
        let mut w = 0;
        for &f in degrees {
            offsets.push(w);
            w += f as usize;
        }
        Ok(FiniteRingSpec {
            kind: RingKind::ProductField { p, degrees: degrees.to_vec() },
            moduli,
            offsets,
            width: w,
            modulus: p,
        })
    }

    pub fn field(p: u64, f: u32) -> Result<Self> {
        Self::product_field(p, &[f])
    }

    pub fn kind(&self) -> &RingKind {
        &self.kind
    }

    pub fn p(&self) -> u64 {
        match self.kind {
            RingKind::ZmodPn { p, .. } | RingKind::ProductField { p, .. } => p,
        }
    }

    /// Number of F_p coordinates (1 for Z/p^n).
    pub fn width(&self) -> usize {
        self.width
    }

    /// Residue modulus of each coordinate.
    pub fn coord_modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_fp_algebra(&self) -> bool {
        match self.kind {
            RingKind::ZmodPn { n, .. } => n == 1,
            RingKind::ProductField { .. } => true,
        }
    }

    pub fn cardinality(&self) -> u128 {
        (self.modulus as u128).pow(self.width as u32)
    }

    pub fn degrees(&self) -> Vec<u32> {
        match &self.kind {
            RingKind::ZmodPn { .. } => vec![1],
            RingKind::ProductField { degrees, .. } => degrees.clone(),
        }
    }

    pub fn component_moduli(&self) -> Vec<FpPoly> {
        self.moduli.iter().map(|m| FpPoly::new(self.p(), m.clone())).collect()
    }

    /// |GL_2| of the ring.
    pub fn gl2_order(&self) -> u128 {
        match self.kind {
            RingKind::ZmodPn { p, n } => {
                let p = p as u128;
                let q4 = (p.pow(n)).pow(4);
                q4 / (p * p * p * p) * (p * p - 1) * (p * p - p)
            }
            RingKind::ProductField { p, ref degrees } => degrees
                .iter()
                .map(|&f| {
                    let q = (p as u128).pow(f);
                    (q * q - 1) * (q * q - q)
                })
                .product(),
        }
    }

    pub fn zero(&self) -> RingElem {
        RingElem(vec![0; self.width])
    }

    pub fn one(&self) -> RingElem {
        self.from_int(1)
    }

    /// Image of a rational integer (diagonally in products).
    pub fn from_int(&self, c: i64) -> RingElem {
        let r = crate::arith::reduce_i64(c, self.modulus);
        let mut v = vec![0; self.width];
        for &o in &self.offsets {
            v[o] = r;
        }
        RingElem(v)
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let m = self.modulus;
        RingElem(a.0.iter().zip(&b.0).map(|(x, y)| (x + y) % m).collect())
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let m = self.modulus;
        RingElem(a.0.iter().zip(&b.0).map(|(x, y)| (x + m - y) % m).collect())
    }

    pub fn neg(&self, a: &RingElem) -> RingElem {
        self.sub(&self.zero(), a)
    }

    /// Multiply by an integer scalar.
    pub fn scale(&self, a: &RingElem, c: u64) -> RingElem {
        let m = self.modulus;
        RingElem(a.0.iter().map(|x| mul_mod(*x, c % m, m)).collect())
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        match self.kind {
            RingKind::ZmodPn { .. } => RingElem(vec![mul_mod(a.0[0], b.0[0], self.modulus)]),
            RingKind::ProductField { p, ref degrees } => {
                let mut out = vec![0; self.width];
                for (i, &f) in degrees.iter().enumerate() {
                    let o = self.offsets[i];
                    let f = f as usize;
                    let prod = field_mul(&a.0[o..o + f], &b.0[o..o + f], &self.moduli[i], p);
                    out[o..o + f].copy_from_slice(&prod);
                }
                RingElem(out)
            }
        }
    }

    pub fn is_zero(&self, a: &RingElem) -> bool {
        a.0.iter().all(|&x| x == 0)
    }

    pub fn is_unit(&self, a: &RingElem) -> bool {
        match self.kind {
            RingKind::ZmodPn { p, .. } => !a.0[0].is_multiple_of(p),
            RingKind::ProductField { ref degrees, .. } => degrees.iter().enumerate().all(|(i, &f)| {
                let o = self.offsets[i];
                a.0[o..o + f as usize].iter().any(|&x| x != 0)
            }),
        }
    }

    pub fn inv(&self, a: &RingElem) -> Option<RingElem> {
        if !self.is_unit(a) {
            return None;
        }
        match self.kind {
            RingKind::ZmodPn { .. } => Some(RingElem(vec![inv_mod(a.0[0], self.modulus)?])),
            RingKind::ProductField { p, ref degrees } => {
                let mut out = vec![0; self.width];
                for (i, &f) in degrees.iter().enumerate() {
                    let o = self.offsets[i];
                    let f = f as usize;
                    // a^(q - 2) in F_q.
                    let q = p.pow(f as u32);
                    let mut acc = vec![0; f];
                    acc[0] = 1;
                    let mut base = a.0[o..o + f].to_vec();
                    let mut e = q - 2;
                    while e > 0 {
                        if e & 1 == 1 {
                            acc = field_mul(&acc, &base, &self.moduli[i], p);
                        }
                        base = field_mul(&base, &base, &self.moduli[i], p);
                        e >>= 1;
                    }
                    out[o..o + f].copy_from_slice(&acc);
                }
                Some(RingElem(out))
            }
        }
    }

    pub fn pow(&self, a: &RingElem, mut e: u64) -> RingElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Every element, in a fixed order.
    pub fn elements(&self) -> Vec<RingElem> {
        let m = self.modulus;
        let total = self.cardinality() as u64;
        (0..total)
            .map(|mut k| {
                let mut v = vec![0; self.width];
                for x in v.iter_mut() {
                    *x = k % m;
                    k /= m;
                }
                RingElem(v)
            })
            .collect()
    }

    pub fn units(&self) -> Vec<RingElem> {
        self.elements().into_iter().filter(|a| self.is_unit(a)).collect()
    }

    /// An F_p basis (products) or the generator 1 (Z/p^n).
    pub fn additive_basis(&self) -> Vec<RingElem> {
        (0..self.width)
            .map(|i| {
                let mut v = vec![0; self.width];
                v[i] = 1;
                RingElem(v)
            })
            .collect()
    }

    /// Whether `a` lies in the diagonal copy of F_p (or of Z/p^n).
    pub fn is_prime_field_scalar(&self, a: &RingElem) -> bool {
        let c = a.0[self.offsets[0]];
        self.offsets.iter().enumerate().all(|(i, &o)| {
            let f = self.width_of(i);
            a.0[o] == c && a.0[o + 1..o + f].iter().all(|&x| x == 0)
        })
    }

    fn width_of(&self, i: usize) -> usize {
        match &self.kind {
            RingKind::ZmodPn { .. } => 1,
            RingKind::ProductField { degrees, .. } => degrees[i] as usize,
        }
    }

    pub fn component_ranges(&self) -> Vec<std::ops::Range<usize>> {
        (0..self.offsets.len())
            .map(|i| self.offsets[i]..self.offsets[i] + self.width_of(i))
            .collect()
    }

    /// Reduce a Z/p^n element modulo p^m (m <= n).
    pub fn reduce_to(&self, a: &RingElem, target: &FiniteRingSpec) -> Result<RingElem> {
        match (&self.kind, &target.kind) {
            (RingKind::ZmodPn { p, n }, RingKind::ZmodPn { p: q, n: m }) if p == q && m <= n => {
                Ok(RingElem(vec![a.0[0] % target.modulus]))
            }
            _ => Err(Error::invalid(format!("no reduction map from {self} to {target}"))),
        }
    }

    pub fn elem_from_json(&self, v: &serde_json::Value) -> Result<RingElem> {
        match v {
            serde_json::Value::Number(n) => {
                let c = n
                    .as_i64()
                    .ok_or_else(|| Error::invalid(format!("entry {n} is not an integer")))?;
                Ok(self.from_int(c))
            }
            serde_json::Value::Array(parts) if !self.offsets.is_empty() => {
                if parts.len() != self.offsets.len() {
                    return Err(Error::invalid(format!(
                        "expected {} components, got {}",
                        self.offsets.len(),
                        parts.len()
                    )));
                }
                let mut out = vec![0; self.width];
                for (i, part) in parts.iter().enumerate() {
                    let coeffs: Vec<i64> = match part {
                        serde_json::Value::Number(n) => vec![n.as_i64().unwrap_or(0)],
                        serde_json::Value::Array(cs) => cs.iter().map(|c| c.as_i64().unwrap_or(0)).collect(),
                        _ => return Err(Error::invalid(format!("bad component {part}"))),
                    };
                    let f = self.width_of(i);
                    if coeffs.len() > f {
                        return Err(Error::invalid(format!("component {i} has degree {f}, got {} coefficients", coeffs.len())));
                    }
                    for (j, c) in coeffs.iter().enumerate() {
                        out[self.offsets[i] + j] = crate::arith::reduce_i64(*c, self.modulus);
                    }
                }
                Ok(RingElem(out))
            }
            _ => Err(Error::invalid(format!("bad ring element {v}"))),
        }
    }

    pub fn elem_to_json(&self, a: &RingElem) -> serde_json::Value {
        if self.is_prime_field_scalar(a) {
            return serde_json::Value::from(a.0[0]);
        }
        serde_json::Value::Array(
            self.component_ranges()
                .into_iter()
                .map(|r| {
                    if r.len() == 1 {
                        serde_json::Value::from(a.0[r.start])
                    } else {
                        serde_json::Value::from(a.0[r].to_vec())
                    }
                })
                .collect(),
        )
    }
}

/// Multiply in F_p[x]/(m) for a monic modulus `m` of degree f.
fn field_mul(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let f = a.len();
    if f == 1 {
        return vec![mul_mod(a[0], b[0], p)];
    }
    let mut prod = vec![0u64; 2 * f - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    for k in (f..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (j, &mj) in m.iter().enumerate().take(f) {
            let idx = k - f + j;
            prod[idx] = (prod[idx] + p - mul_mod(c, mj, p)) % p;
        }
    }
    prod.truncate(f);
    prod
}

impl fmt::Display for FiniteRingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            RingKind::ZmodPn { p, n } => write!(f, "Z/{}", p.pow(*n)),
            RingKind::ProductField { p, degrees } => {
                let parts: Vec<String> = degrees
                    .iter()
                    .map(|&d| if d == 1 { format!("GF({p})") } else { format!("GF({p}^{d})") })
                    .collect();
                write!(f, "{}", parts.join("x"))
            }
        }
    }
}

/// Parses `Z/25`, `Z/5^2`, `GF(5)`, `GF(5^2)`, `GF(5)xGF(5)`.
impl FromStr for FiniteRingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid(format!("unrecognised ring {s:?}"));
        if let Some(rest) = s.strip_prefix("Z/") {
            let (p, n) = parse_prime_power(rest).ok_or_else(bad)?;
            return FiniteRingSpec::zmod(p, n);
        }
        let mut p0 = None;
        let mut degrees = Vec::new();
        for part in s.split(['x', '*', '×']) {
            let inner = part
                .trim()
                .strip_prefix("GF(")
                .and_then(|r| r.strip_suffix(')'))
                .or_else(|| part.trim().strip_prefix("F_"))
                .ok_or_else(bad)?;
            let (p, f) = match inner.split_once('^') {
                Some((p, f)) => (p.trim().parse().map_err(|_| bad())?, f.trim().parse().map_err(|_| bad())?),
                None => (inner.trim().parse().map_err(|_| bad())?, 1u32),
            };
            if p0.is_some_and(|q| q != p) {
                return Err(Error::invalid("all components must share the characteristic"));
            }
            p0 = Some(p);
            degrees.push(f);
        }
        FiniteRingSpec::product_field(p0.ok_or_else(bad)?, &degrees)
    }
}

fn parse_prime_power(s: &str) -> Option<(u64, u32)> {
    if let Some((p, n)) = s.split_once('^') {
        return Some((p.trim().parse().ok()?, n.trim().parse().ok()?));
    }
    let m: u64 = s.trim().parse().ok()?;
    let f = crate::arith::factorize(m);
    (f.len() == 1).then(|| f[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for s in ["Z/25", "GF(5)", "GF(5^2)", "GF(5)xGF(5)", "GF(3)xGF(3^2)"] {
            let r: FiniteRingSpec = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert_eq!("Z/5^2".parse::<FiniteRingSpec>().unwrap().to_string(), "Z/25");
        assert!("Z/12".parse::<FiniteRingSpec>().is_err());
        assert!("GF(5)xGF(7)".parse::<FiniteRingSpec>().is_err());
    }

    #[test]
    fn field_axioms_in_gf25() {
        let r = FiniteRingSpec::field(5, 2).unwrap();
        let els = r.elements();
        assert_eq!(els.len(), 25);
        for a in &els {
            if r.is_unit(a) {
                assert_eq!(r.mul(a, &r.inv(a).unwrap()), r.one());
            }
        }
        assert_eq!(r.units().len(), 24);
        // Multiplicative group of F_25 is cyclic: some element has order 24.
        let has_gen = r.units().iter().any(|a| {
            (1..24).all(|e| r.pow(a, e) != r.one())
        });
        assert!(has_gen);
    }

    #[test]
    fn zmod_units() {
        let r = FiniteRingSpec::zmod(5, 2).unwrap();
        assert_eq!(r.units().len(), 20);
        assert_eq!(r.gl2_order(), 625 * 480);
        assert_eq!(FiniteRingSpec::field(5, 1).unwrap().gl2_order(), 480);
    }
}
