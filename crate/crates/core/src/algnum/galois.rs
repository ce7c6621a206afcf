use std::sync::Arc;

use serde::Serialize;

use crate::algnum::field::{FieldElement, FieldKind, NumberField};
use crate::arith::gcd;
use crate::error::{Error, Result};

/// The automorphism zeta_m -> zeta_m^a of a cyclotomic field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianAutomorphism {
    #[serde(skip)]
    field: Arc<NumberField>,
    modulus: u64,
    exponent: u64,
}

impl AbelianAutomorphism {
    pub fn new(field: &Arc<NumberField>, exponent: i64) -> Result<Self> {
        let m = match field.kind() {
            FieldKind::Cyclotomic(m) => m,
            _ => {
                return Err(Error::Unsupported(format!(
                    "Galois action is implemented for cyclotomic fields only, not {}",
                    field.display_name()
                )))
            }
        };
        let a = crate::arith::reduce_i64(exponent, m.max(1));
        if gcd(a, m) != 1 && m > 1 {
            return Err(Error::invalid(format!("exponent {exponent} is not prime to {m}")));
        }
        Ok(AbelianAutomorphism { field: field.clone(), modulus: m, exponent: a })
    }

    pub fn identity(field: &Arc<NumberField>) -> Result<Self> {
        Self::new(field, 1)
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn compose(&self, other: &Self) -> Self {
        AbelianAutomorphism {
            field: self.field.clone(),
            modulus: self.modulus,
            exponent: crate::arith::mul_mod(self.exponent, other.exponent, self.modulus.max(1)),
        }
    }

    /// All automorphisms, by increasing exponent.
    pub fn all(field: &Arc<NumberField>) -> Result<Vec<Self>> {
        let m = match field.kind() {
            FieldKind::Cyclotomic(m) => m,
            _ => return Err(Error::Unsupported("non-cyclotomic field".into())),
        };
        (1..=m.max(1))
            .filter(|&a| gcd(a, m) == 1)
            .map(|a| Self::new(field, a as i64))
            .collect()
    }
}

pub fn apply_automorphism(a: &AbelianAutomorphism, x: &FieldElement) -> Result<FieldElement> {
    if a.field.poly() != x.field().poly() {
        return Err(Error::invalid("automorphism and element live in different fields"));
    }
    let image_of_gen = FieldElement::generator(&a.field).pow(a.exponent as i64)?;
    let mut acc = FieldElement::zero(&a.field);
    for c in x.coords().iter().rev() {
        acc = &(&acc * &image_of_gen) + &FieldElement::from_rational(&a.field, c.clone());
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn action_on_zeta8() {
        let k = NumberField::cyclotomic(8).unwrap();
        let z = FieldElement::generator(&k);
        let id = AbelianAutomorphism::identity(&k).unwrap();
        assert_eq!(apply_automorphism(&id, &z).unwrap(), z);
        let t = AbelianAutomorphism::new(&k, 3).unwrap();
        let once = apply_automorphism(&t, &z).unwrap();
        assert_eq!(once, z.pow(3).unwrap());
        assert_eq!(apply_automorphism(&t, &once).unwrap(), z);
        assert_eq!(t.compose(&t).exponent(), 1);
    }

    #[test]
    fn rejects_non_cyclotomic_fields() {
        let k = NumberField::quadratic(5).unwrap();
        assert!(matches!(AbelianAutomorphism::new(&k, 1), Err(Error::Unsupported(_))));
        let k = NumberField::cyclotomic(8).unwrap();
        assert!(AbelianAutomorphism::new(&k, 2).is_err());
    }
}
