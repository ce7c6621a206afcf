//! Complex embeddings with certified error bounds.
//!
//! Roots are refined by Durand-Kerner iteration in dyadic fixed point and then
//! certified with the inclusion bound
//! `|z_i - root| <= n |f(z_i)| / |lc * prod_{j != i} (z_i - z_j)|`,
//! evaluated in exact integer arithmetic. Pairwise disjoint disks contain
//! exactly one root each.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::algnum::field::FieldElement;
use crate::algnum::poly::IntPoly;
use crate::error::{Error, Result};

/// A dyadic complex number `(re + i im) / 2^scale` within `2^(1 - precision)` of a root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexApprox {
    pub re: BigInt,
    pub im: BigInt,
    pub scale: u32,
    pub precision: u32,
}

impl ComplexApprox {
    pub fn re_f64(&self) -> f64 {
        scaled_to_f64(&self.re, self.scale)
    }

    pub fn im_f64(&self) -> f64 {
        scaled_to_f64(&self.im, self.scale)
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.re_f64(), self.im_f64())
    }

    /// Certified absolute error bound.
    pub fn error_bound(&self) -> f64 {
        2f64.powi(1 - self.precision as i32)
    }

    /// Conservative bounds `lo <= |root| <= hi`.
    pub fn abs_bounds(&self) -> (f64, f64) {
        let norm2 = &self.re * &self.re + &self.im * &self.im;
        let s = norm2.sqrt();
        let lo = scaled_to_f64(&s, self.scale);
        let hi = scaled_to_f64(&(s + 1), self.scale);
        let slack = |v: f64| v.abs() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE;
        let r = self.error_bound();
        ((lo - slack(lo) - r).max(0.0), hi + slack(hi) + r)
    }
}

fn scaled_to_f64(x: &BigInt, scale: u32) -> f64 {
    let bits = x.bits() as i64;
    let shift = (bits - 60).max(0);
    let top = (x >> shift as usize).to_f64().unwrap_or(0.0);
    top * 2f64.powi((shift - scale as i64) as i32)
}

/// Every complex conjugate of `x`, i.e. the roots of its minimal polynomial.
pub fn complex_embeddings(x: &FieldElement, precision: u32) -> Result<Vec<ComplexApprox>> {
    certified_roots(&x.minimal_polynomial(), precision)
}

/// Certified approximations to all roots of a squarefree integer polynomial,
/// sorted by decreasing real part, then decreasing imaginary part.
pub fn certified_roots(f: &IntPoly, precision: u32) -> Result<Vec<ComplexApprox>> {
    if precision < 64 {
        return Err(Error::invalid("precision must be at least 64 bits"));
    }
    let n = f.degree();
    if f.is_zero() || n == 0 {
        return Ok(Vec::new());
    }
    let seeds = approx_roots_f64(f);
    let mut work = precision + 32;
    for _ in 0..8 {
        let mut z: Vec<(BigInt, BigInt)> = seeds
            .iter()
            .map(|c| (f64_to_fixed(c.re, work), f64_to_fixed(c.im, work)))
            .collect();
        refine(f, &mut z, work);
        if certify(f, &z, work, precision) {
            let mut out: Vec<ComplexApprox> = z
                .into_iter()
                .map(|(re, im)| ComplexApprox { re, im, scale: work, precision })
                .collect();
            out.sort_by(|a, b| {
                b.re.cmp(&a.re).then_with(|| b.im.cmp(&a.im))
            });
            return Ok(out);
        }
        work *= 2;
    }
    Err(Error::Unsupported(format!("could not certify the roots of {f}")))
}

fn f64_to_fixed(v: f64, scale: u32) -> BigInt {
    if v == 0.0 || !v.is_finite() {
        return BigInt::zero();
    }
    let (mant, exp) = frexp(v);
    // v = mant * 2^exp with mant in [0.5, 1)
    let m = (mant * 2f64.powi(53)) as i64;
    let e = exp - 53 + scale as i32;
    let m = BigInt::from(m);
    if e >= 0 {
        m << e as usize
    } else {
        m >> (-e) as usize
    }
}

fn frexp(v: f64) -> (f64, i32) {
    let e = v.abs().log2().floor() as i32 + 1;
    (v / 2f64.powi(e), e)
}

type Gauss = (BigInt, BigInt);

fn gmul(a: &Gauss, b: &Gauss) -> Gauss {
    (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
}

fn gsub(a: &Gauss, b: &Gauss) -> Gauss {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn gnorm(a: &Gauss) -> BigInt {
    &a.0 * &a.0 + &a.1 * &a.1
}

fn shr(a: Gauss, s: u32) -> Gauss {
    (a.0 >> s as usize, a.1 >> s as usize)
}

/// Durand-Kerner refinement in fixed point with `scale` fractional bits.
fn refine(f: &IntPoly, z: &mut [Gauss], scale: u32) {
    let n = z.len();
    let lc = f.leading();
    let one = BigInt::from(1) << scale as usize;
    for _ in 0..200 {
        let mut max_step = BigInt::zero();
        for i in 0..n {
            let mut val: Gauss = (BigInt::zero(), BigInt::zero());
            for c in f.coeffs().iter().rev() {
                val = shr(gmul(&val, &z[i]), scale);
                val.0 += c << scale as usize;
            }
            let mut den: Gauss = (&lc << scale as usize, BigInt::zero());
            for j in 0..n {
                if j != i {
                    den = shr(gmul(&den, &gsub(&z[i], &z[j])), scale);
                }
            }
            let dn = gnorm(&den);
            if dn.is_zero() {
                // Coincident iterates: nudge apart.
                z[i].1 += &one >> 8usize;
                max_step = one.clone();
                continue;
            }
            let conj = (den.0.clone(), -den.1.clone());
            let num = gmul(&val, &conj);
            let corr = ((num.0 << scale as usize) / &dn, (num.1 << scale as usize) / &dn);
            let step = corr.0.abs().max(corr.1.abs());
            if step > max_step {
                max_step = step;
            }
            z[i] = gsub(&z[i], &corr);
        }
        if max_step.bits() <= 4 {
            break;
        }
    }
}

/// Exact check that each disk of radius `2^(1-precision)` holds exactly one root.
fn certify(f: &IntPoly, z: &[Gauss], scale: u32, precision: u32) -> bool {
    let n = z.len();
    let w = scale as usize;
    let lc = f.leading();
    for i in 0..n {
        let fval = horner_exact(f, &z[i], w);
        let mut prod: Gauss = (BigInt::from(1), BigInt::zero());
        for j in 0..n {
            if j != i {
                prod = gmul(&prod, &gsub(&z[i], &z[j]));
            }
        }
        // n^2 |F|^2 2^(2 prec - 2) <= lc^2 |P|^2 2^(2w)
        let lhs = (BigInt::from((n * n) as u64) * gnorm(&fval)) << (2 * precision as usize - 2);
        let rhs = ((&lc * &lc) * gnorm(&prod)) << (2 * w);
        if lhs > rhs {
            return false;
        }
        for j in i + 1..n {
            let d = gnorm(&gsub(&z[i], &z[j]));
            if (d << (2 * precision as usize - 4)) <= (BigInt::from(1) << (2 * w)) {
                return false;
            }
        }
    }
    true
}

/// `2^(w n) f(a / 2^w)` as an exact Gaussian integer.
fn horner_exact(f: &IntPoly, a: &Gauss, w: usize) -> Gauss {
    let n = f.degree();
    let mut acc: Gauss = (BigInt::zero(), BigInt::zero());
    let mut scale_pow = 0usize;
    for c in f.coeffs().iter().rev() {
        // invariant: acc = 2^(w * scale_pow) * (partial Horner value)
        acc = gmul(&acc, a);
        acc.0 += c << (w * scale_pow);
        scale_pow += 1;
    }
    debug_assert_eq!(scale_pow, n + 1);
    acc
}

/// Floating-point approximations to all roots (Durand-Kerner), used as seeds.
pub fn approx_roots_f64(f: &IntPoly) -> Vec<Complex64> {
    let n = f.degree();
    let c: Vec<f64> = f.coeffs().iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect();
    let lc = c[n];
    let monic: Vec<f64> = c.iter().map(|x| x / lc).collect();
    let radius = 1.0 + monic[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius.min(2.0)).collect();
    let eval = |x: Complex64| monic.iter().rev().fold(Complex64::zero(), |acc, &a| acc * x + a);
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                z[i] += Complex64::new(1e-3, 1e-3);
                delta = 1.0;
                continue;
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm() / (1.0 + z[i].norm()));
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algnum::field::NumberField;

    #[test]
    fn rational_element_has_one_embedding() {
        let k = NumberField::cyclotomic(4).unwrap();
        let e = complex_embeddings(&FieldElement::from_int(&k, 2), 64).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e[0].re_f64() - 2.0).abs() < 1e-15);
        assert!(e[0].im_f64().abs() < 1e-15);
    }

    #[test]
    fn gaussian_unit() {
        let k = NumberField::cyclotomic(4).unwrap();
        let e = complex_embeddings(&FieldElement::generator(&k), 64).unwrap();
        assert_eq!(e.len(), 2);
        assert!((e[0].im_f64() - 1.0).abs() < 1e-15);
        assert!((e[1].im_f64() + 1.0).abs() < 1e-15);
        assert!(e[0].error_bound() <= 2f64.powi(-63));
    }

    #[test]
    fn golden_ratio_against_quadratic_formula() {
        let k = NumberField::quadratic(5).unwrap();
        // (1 + sqrt 5) / 2
        let phi = FieldElement::new(
            &k,
            vec![
                num_rational::BigRational::new(1.into(), 2.into()),
                num_rational::BigRational::new(1.into(), 2.into()),
            ],
        )
        .unwrap();
        let e = complex_embeddings(&phi, 128).unwrap();
        let s5 = 5f64.sqrt();
        assert!((e[0].re_f64() - (1.0 + s5) / 2.0).abs() < 1e-15);
        assert!((e[1].re_f64() - (1.0 - s5) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn high_precision_is_certified() {
        let f = IntPoly::from_i64(&[-2, 0, 0, 1]);
        let roots = certified_roots(&f, 256).unwrap();
        assert_eq!(roots.len(), 3);
        // The real cube root of 2: compare 200-bit truncation with integer cube root.
        let real = &roots[0];
        assert!(real.im.bits() < 8);
        let target: BigInt = (BigInt::from(2) << 600usize).cbrt();
        let approx = &real.re >> (real.scale as usize - 200);
        assert!((approx - target).abs() <= BigInt::from(2));
    }

    #[test]
    fn precision_floor_is_enforced() {
        assert!(certified_roots(&IntPoly::from_i64(&[-1, 1]), 32).is_err());
    }
}
