use crate::arith::mul_mod;
use crate::error::{Error, Result};
use crate::matgroups::mat::Mat2;
use crate::matgroups::ring::{FiniteRingSpec, RingElem, RingKind};

/// For `m = I + p^(n-1) A` over Z/p^n, return `A mod p` over Z/p.
pub fn log_map(spec: &FiniteRingSpec, m: &Mat2) -> Result<(FiniteRingSpec, Mat2)> {
    let (p, n) = match spec.kind() {
        RingKind::ZmodPn { p, n } => (*p, *n),
        _ => return Err(Error::invalid("log map is defined over Z/p^n")),
    };
    if n < 2 {
        return Err(Error::invalid("log map needs n >= 2"));
    }
    let step = p.pow(n - 1);
    let diff = m.sub(spec, &Mat2::identity(spec));
    let target = FiniteRingSpec::zmod(p, 1)?;
    let mut out = Vec::with_capacity(4);
    for e in &diff.entries {
        let v = e.0[0];
        if v % step != 0 {
            return Err(Error::invalid(format!(
                "matrix {} is not congruent to I modulo {step}",
                m.display(spec)
            )));
        }
        out.push(RingElem(vec![(v / step) % p]));
    }
    let [a, b, c, d]: [RingElem; 4] = out.try_into().expect("four entries");
    Ok((target, Mat2::new(a, b, c, d)))
}

/// `I + p^(n-1) * lift(A)` over Z/p^n.
pub fn exp_map(spec: &FiniteRingSpec, a: &Mat2) -> Result<Mat2> {
    let (p, n) = match spec.kind() {
        RingKind::ZmodPn { p, n } if *n >= 2 => (*p, *n),
        _ => return Err(Error::invalid("exp map needs Z/p^n with n >= 2")),
    };
    let step = p.pow(n - 1);
    let m = spec.coord_modulus();
    let lifted = Mat2 {
        entries: std::array::from_fn(|i| RingElem(vec![mul_mod(a.entries[i].0[0] % p, step, m)])),
    };
    Ok(Mat2::identity(spec).add(spec, &lifted))
}

/// The kernel of reduction GL_2(Z/p^n) -> GL_2(Z/p^(n-1)), enumerated.
pub fn reduction_kernel(spec: &FiniteRingSpec) -> Result<Vec<Mat2>> {
    let p = spec.p();
    let base = FiniteRingSpec::zmod(p, 1)?;
    let els = base.elements();
    let mut out = Vec::with_capacity(els.len().pow(4));
    for a in &els {
        for b in &els {
            for c in &els {
                for d in &els {
                    out.push(exp_map(spec, &Mat2::new(a.clone(), b.clone(), c.clone(), d.clone()))?);
                }
            }
        }
    }
    Ok(out)
}
