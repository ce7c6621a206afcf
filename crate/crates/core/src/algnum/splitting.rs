use serde::{Deserialize, Serialize};

use crate::algnum::field::{rational_mod, FieldElement, NumberField};
use crate::algnum::fp_poly::factor_mod_p;
use crate::arith::{mul_mod, pow_mod};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeFactor {
    pub e: u32,
    pub f: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root: Option<u64>,
}

/// Decomposition of a rational prime, read off from the defining polynomial mod p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeFactorization {
    pub p: u64,
    pub factors: Vec<PrimeFactor>,
}

impl PrimeFactorization {
    pub fn degree_one_roots(&self) -> Vec<u64> {
        self.factors
            .iter()
            .filter(|f| f.f == 1 && f.e == 1)
            .filter_map(|f| f.root)
            .collect()
    }

    pub fn is_unramified(&self) -> bool {
        self.factors.iter().all(|f| f.e == 1)
    }

    pub fn total_degree(&self) -> u32 {
        self.factors.iter().map(|f| f.e * f.f).sum()
    }
}

/// Factor p via the reduction of the defining polynomial. A repeated factor is
/// reported as ramification.
pub fn splitting_type(field: &NumberField, p: u64) -> Result<PrimeFactorization> {
    let fac = factor_mod_p(field.poly(), p)?;
    let mut factors: Vec<PrimeFactor> = fac
        .factors
        .iter()
        .map(|(g, m)| PrimeFactor {
            e: *m,
            f: g.degree() as u32,
            root: (g.degree() == 1).then(|| (p - g.coeffs()[0]) % p),
        })
        .collect();
    factors.sort_by_key(|f| (f.f, f.root, f.e));
    Ok(PrimeFactorization { p, factors })
}

/// Image of `x` in the residue field F_p of the degree-one prime (p, X - root).
pub fn residue_image(x: &FieldElement, p: u64, root: u64) -> Result<u64> {
    let f = x.field().poly();
    if f.eval_mod(root, p) != 0 {
        return Err(Error::invalid(format!("{root} is not a root of {f} modulo {p}")));
    }
    let mut acc = 0u64;
    for c in x.coords().iter().rev() {
        acc = (mul_mod(acc, root % p, p) + rational_mod(c, p)?) % p;
    }
    Ok(acc)
}

/// Order of a nonzero residue in F_p^*.
pub fn residue_order(a: u64, p: u64) -> u64 {
    let mut order = p - 1;
    for (q, _) in crate::arith::factorize(p - 1) {
        while order.is_multiple_of(q) && pow_mod(a, order / q, p) == 1 {
            order /= q;
        }
    }
    order
}
