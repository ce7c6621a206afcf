use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algnum::fp_poly::{factor_mod_p, FpPoly};
use crate::algnum::poly::{IntPoly, RatPoly};
use crate::arith::{euler_phi, primes_up_to};
use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Cyclotomic(u64),
    Quadratic(i64),
    Generic,
}

/// A number field Q[X]/(f) with f monic and irreducible.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NumberField {
    poly: IntPoly,
    kind: FieldKind,
}

impl NumberField {
    pub fn cyclotomic(m: u64) -> Result<Arc<Self>> {
        if m == 0 {
            return Err(Error::invalid("cyclotomic index must be positive"));
        }
        if euler_phi(m) as usize > MAX_DEGREE {
            return Err(Error::Unsupported(format!(
                "Q(zeta_{m}) has degree {} > {MAX_DEGREE}",
                euler_phi(m)
            )));
        }
        Ok(Arc::new(NumberField {
            poly: IntPoly::cyclotomic(m),
            kind: FieldKind::Cyclotomic(m),
        }))
    }

    /// Q(sqrt d) presented as Q[X]/(X^2 - d); `d` must be squarefree and not 1.
    pub fn quadratic(d: i64) -> Result<Arc<Self>> {
        if d == 0 || d == 1 || !squarefree_i64(d) {
            return Err(Error::invalid(format!("{d} is not a squarefree integer other than 0, 1")));
        }
        Ok(Arc::new(NumberField {
            poly: IntPoly::from_i64(&[-d, 0, 1]),
            kind: FieldKind::Quadratic(d),
        }))
    }

    /// Field defined by a monic irreducible polynomial. Cyclotomic and
    /// pure quadratic polynomials are recognised and tagged.
    pub fn from_poly(poly: IntPoly) -> Result<Arc<Self>> {
        if poly.degree() == 0 || !poly.is_monic() {
            return Err(Error::invalid(format!("defining polynomial {poly} must be monic of positive degree")));
        }
        if poly.degree() > MAX_DEGREE {
            return Err(Error::Unsupported(format!("degree {} > {MAX_DEGREE}", poly.degree())));
        }
        if !is_irreducible_over_q(&poly) {
            return Err(Error::invalid(format!("{poly} is reducible over Q")));
        }
        let n = poly.degree() as u64;
        let kind = (1..=60u64)
            .filter(|&m| euler_phi(m) == n)
            .find(|&m| IntPoly::cyclotomic(m) == poly)
            .map(FieldKind::Cyclotomic)
            .or_else(|| {
                let c = poly.coeffs();
                (n == 2 && c[1].is_zero())
                    .then(|| (-&c[0]).to_i64())
                    .flatten()
                    .filter(|&d| squarefree_i64(d))
                    .map(FieldKind::Quadratic)
            })
            .unwrap_or(FieldKind::Generic);
        Ok(Arc::new(NumberField { poly, kind }))
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// Discriminant of the defining polynomial.
    pub fn poly_discriminant(&self) -> BigInt {
        discriminant(&self.poly)
    }

    pub fn display_name(&self) -> String {
        match self.kind {
            FieldKind::Cyclotomic(4) => "Q(i)".into(),
            FieldKind::Cyclotomic(3) | FieldKind::Cyclotomic(6) => "Q(sqrt(-3))".into(),
            FieldKind::Cyclotomic(m) => format!("Q(zeta_{m})"),
            FieldKind::Quadratic(d) => format!("Q(sqrt({d}))"),
            FieldKind::Generic => format!("Q[X]/({})", self.poly),
        }
    }
}

fn squarefree_i64(d: i64) -> bool {
    crate::arith::factorize(d.unsigned_abs())
        .iter()
        .all(|&(_, e)| e == 1)
}

/// Discriminant via the Sylvester determinant (fraction-free Bareiss).
pub fn discriminant(f: &IntPoly) -> BigInt {
    let n = f.degree();
    if n == 0 {
        return BigInt::one();
    }
    let df: Vec<BigInt> = f
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    let m = n - 1;
    let size = n + m;
    let mut a = vec![vec![BigInt::zero(); size]; size];
    let fc: Vec<BigInt> = f.coeffs().iter().rev().cloned().collect();
    let dc: Vec<BigInt> = df.iter().rev().cloned().collect();
    for i in 0..m {
        for (j, c) in fc.iter().enumerate() {
            a[i][i + j] = c.clone();
        }
    }
    for i in 0..n {
        for (j, c) in dc.iter().enumerate() {
            a[m + i][i + j] = c.clone();
        }
    }
    let res = bareiss_det(a);
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    BigInt::from(sign) * res / f.leading()
}

fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Exact irreducibility test over Q for monic polynomials of small degree.
///
/// A prime with irreducible reduction settles the question at once. Otherwise
/// every subset of at most half the complex roots is turned into a candidate
/// factor, rounded to integers and tried by exact division.
pub fn is_irreducible_over_q(f: &IntPoly) -> bool {
    let n = f.degree();
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let rf = f.to_rat();
    if rf.gcd(&rf.derivative()).degree() > 0 {
        return false;
    }
    for p in primes_up_to(200) {
        if let Ok(fac) = factor_mod_p(f, p) {
            if fac.factors.len() == 1 && fac.factors[0].1 == 1 {
                return true;
            }
        }
    }
    let roots = crate::algnum::embed::approx_roots_f64(f);
    for size in 1..=n / 2 {
        for subset in subsets(n, size) {
            if let Some(g) = rounded_factor(&subset.iter().map(|&i| roots[i]).collect::<Vec<_>>()) {
                let (_, r) = rf.div_rem(&g.to_rat());
                if r.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn rounded_factor(roots: &[num_complex::Complex64]) -> Option<IntPoly> {
    let mut c = vec![num_complex::Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![num_complex::Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        c = next;
    }
    let mut ints = Vec::with_capacity(c.len());
    for z in c {
        let k = z.re.round();
        if (z.re - k).abs() > 1e-4 * (1.0 + k.abs()) || z.im.abs() > 1e-4 * (1.0 + k.abs()) {
            return None;
        }
        ints.push(BigInt::from(k as i128));
    }
    Some(IntPoly::new(ints))
}

/// Element of a number field in the power basis 1, X, ..., X^(d-1).
#[derive(Clone, Debug)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coords: Vec<BigRational>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.poly == other.field.poly && self.coords == other.coords
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl FieldElement {
    pub fn new(field: &Arc<NumberField>, coords: Vec<BigRational>) -> Result<Self> {
        if coords.len() > field.degree() {
            return Err(Error::invalid(format!(
                "{} coordinates given for a degree {} field",
                coords.len(),
                field.degree()
            )));
        }
        let mut coords = coords;
        coords.resize(field.degree(), BigRational::zero());
        Ok(FieldElement { field: field.clone(), coords })
    }

    pub fn from_i64s(field: &Arc<NumberField>, coords: &[i64]) -> Result<Self> {
        Self::new(
            field,
            coords.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
        )
    }

    pub fn from_int(field: &Arc<NumberField>, c: i64) -> Self {
        Self::from_rational(field, BigRational::from_integer(c.into()))
    }

    pub fn from_rational(field: &Arc<NumberField>, c: BigRational) -> Self {
        let mut coords = vec![BigRational::zero(); field.degree()];
        coords[0] = c;
        FieldElement { field: field.clone(), coords }
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::from_int(field, 0)
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_int(field, 1)
    }

    /// The class of X.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        Self::reduce(field, RatPoly::new(vec![BigRational::zero(), BigRational::one()]))
    }

    fn reduce(field: &Arc<NumberField>, p: RatPoly) -> Self {
        let (_, r) = p.div_rem(&field.poly.to_rat());
        let mut coords = r.coeffs;
        coords.resize(field.degree(), BigRational::zero());
        FieldElement { field: field.clone(), coords }
    }

    /// A root of the irreducible integer polynomial `f`, in the field cut out
    /// by the monic polynomial of `lc(f) * root`.
    pub fn from_minimal_polynomial(f: &IntPoly) -> Result<Self> {
        if f.degree() == 0 {
            return Err(Error::invalid("a minimal polynomial has positive degree"));
        }
        if !is_irreducible_over_q(f) {
            return Err(Error::invalid(format!("{f} is reducible over Q")));
        }
        let n = f.degree();
        let lc = f.leading();
        // g(y) = lc^(n-1) f(y / lc)
        let coeffs: Vec<BigInt> = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| if i == n { BigInt::one() } else { c * num_traits::pow(lc.clone(), n - 1 - i) })
            .collect();
        let field = NumberField::from_poly(IntPoly::new(coeffs))?;
        let y = FieldElement::generator(&field);
        let inv = BigRational::new(BigInt::one(), lc);
        Ok(&y * &FieldElement::from_rational(&field, inv))
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// Rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.coords[1..]
            .iter()
            .all(|c| c.is_zero())
            .then(|| self.coords[0].clone())
    }

    fn as_poly(&self) -> RatPoly {
        RatPoly::new(self.coords.clone())
    }

    fn check_same(&self, other: &Self) {
        assert!(
            self.field.poly == other.field.poly,
            "mixing elements of different fields"
        );
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::invalid("zero has no inverse"));
        }
        // Extended Euclid: s*a + t*f = 1.
        let f = self.field.poly.to_rat();
        let (mut r0, mut r1) = (f, self.as_poly());
        let zero = RatPoly::new(Vec::new());
        let one = RatPoly::new(vec![BigRational::one()]);
        let (mut s0, mut s1) = (zero, one);
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 is a nonzero constant because f is irreducible.
        let c = r0.leading();
        let inv = RatPoly::new(s0.coeffs.iter().map(|x| x / &c).collect());
        Ok(Self::reduce(&self.field, inv))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = FieldElement::one(&self.field);
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Matrix of multiplication by this element on the power basis (column j = self * X^j).
    pub fn mult_matrix(&self) -> Vec<Vec<BigRational>> {
        let n = self.field.degree();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        let x = FieldElement::generator(&self.field);
        let mut col = self.clone();
        for j in 0..n {
            for i in 0..n {
                m[i][j] = col.coords[i].clone();
            }
            col = &col * &x;
        }
        m
    }

    /// Characteristic polynomial of the multiplication map (Faddeev-LeVerrier).
    pub fn charpoly(&self) -> RatPoly {
        let a = self.mult_matrix();
        let n = a.len();
        let mut c = vec![BigRational::zero(); n + 1];
        c[n] = BigRational::one();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = matmul(&a, &m);
            for (i, row) in next.iter_mut().enumerate() {
                row[i] += &c[n - k + 1];
            }
            m = next;
            let am = matmul(&a, &m);
            let tr: BigRational = (0..n).map(|i| am[i][i].clone()).sum();
            c[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
        }
        RatPoly::new(c)
    }

    pub fn minimal_polynomial(&self) -> IntPoly {
        let chi = self.charpoly();
        let g = chi.gcd(&chi.derivative());
        let (q, _) = chi.div_rem(&g);
        q.to_primitive_int()
    }

    pub fn trace(&self) -> BigRational {
        let chi = self.charpoly();
        -chi.coeffs[chi.degree() - 1].clone()
    }

    pub fn norm(&self) -> BigRational {
        let chi = self.charpoly();
        let c0 = chi.coeffs.first().cloned().unwrap_or_else(BigRational::zero);
        if chi.degree().is_multiple_of(2) {
            c0
        } else {
            -c0
        }
    }

    /// Evaluate an integer polynomial at this element.
    pub fn eval_poly(&self, p: &IntPoly) -> Self {
        p.coeffs().iter().rev().fold(FieldElement::zero(&self.field), |acc, c| {
            &(&acc * self) + &FieldElement::from_rational(&self.field, BigRational::from_integer(c.clone()))
        })
    }

    /// Whether some power of the element equals 1, decided exactly.
    pub fn is_root_of_unity(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let mp = self.minimal_polynomial();
        // A root of unity of degree d has order m with phi(m) = d, and phi(m) >= sqrt(m/2).
        let d = mp.degree() as u64;
        let bound = 2 * d * d + 2;
        (1..=bound).any(|m| euler_phi(m) == d && IntPoly::cyclotomic(m) == mp)
    }

    /// Reduction of the coordinates modulo p.
    pub fn reduce_mod(&self, p: u64) -> Result<FpPoly> {
        let coeffs = self
            .coords
            .iter()
            .map(|c| rational_mod(c, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(FpPoly::new(p, coeffs))
    }
}

/// Reduce a rational number modulo p.
pub fn rational_mod(c: &BigRational, p: u64) -> Result<u64> {
    let num = crate::arith::reduce_bigint(c.numer(), p);
    let den = crate::arith::reduce_bigint(c.denom(), p);
    let inv = crate::arith::inv_mod(den, p)
        .ok_or_else(|| Error::invalid(format!("denominator of {c} is divisible by {p}")))?;
    Ok(crate::arith::mul_mod(num, inv, p))
}

fn matmul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    let mut out = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        self.check_same(rhs);
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self.check_same(rhs);
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        self.check_same(rhs);
        FieldElement::reduce(&self.field, self.as_poly().mul(&rhs.as_poly()))
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = match self.field.kind {
            FieldKind::Cyclotomic(m) => format!("z{m}"),
            FieldKind::Quadratic(_) => "s".to_string(),
            FieldKind::Generic => "a".to_string(),
        };
        crate::algnum::poly::write_poly(f, &self.coords, &var)
    }
}

/// Parse a coordinate list such as `[1, 0, -1/2]`.
pub fn parse_coords(s: &str) -> Result<Vec<BigRational>> {
    let body = s.trim().trim_start_matches('[').trim_end_matches(']');
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    body.split(',').map(|t| parse_rational(t.trim())).collect()
}

pub fn parse_rational(t: &str) -> Result<BigRational> {
    let t = t.trim().trim_matches('"');
    let bad = |e: &dyn fmt::Display| Error::invalid(format!("bad rational {t:?}: {e}"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|e| bad(&e))?;
            let d = BigInt::from_str(d.trim()).map_err(|e| bad(&e))?;
            if d.is_zero() {
                return Err(Error::invalid(format!("zero denominator in {t:?}")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(t).map_err(|e| bad(&e))?)),
    }
}

pub fn format_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl FieldElement {
    pub fn coords_string(&self) -> String {
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        format!("[{}]", parts.join(", "))
    }

    pub fn max_abs_coord(&self) -> BigRational {
        self.coords
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}
