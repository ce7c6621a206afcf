use std::fmt;

use crate::error::{Error, Result};
use crate::matgroups::ring::{FiniteRingSpec, RingElem};

/// A 2x2 matrix, entries row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    pub entries: [RingElem; 4],
}

impl Mat2 {
    pub fn new(a: RingElem, b: RingElem, c: RingElem, d: RingElem) -> Self {
        Mat2 { entries: [a, b, c, d] }
    }

    pub fn from_ints(r: &FiniteRingSpec, v: [i64; 4]) -> Self {
        Mat2::new(r.from_int(v[0]), r.from_int(v[1]), r.from_int(v[2]), r.from_int(v[3]))
    }

    pub fn identity(r: &FiniteRingSpec) -> Self {
        Self::scalar(r, &r.one())
    }

    pub fn zero(r: &FiniteRingSpec) -> Self {
        Self::scalar(r, &r.zero())
    }

    pub fn scalar(r: &FiniteRingSpec, x: &RingElem) -> Self {
        Mat2::new(x.clone(), r.zero(), r.zero(), x.clone())
    }

    /// E12(x) = [[1, x], [0, 1]].
    pub fn e12(r: &FiniteRingSpec, x: &RingElem) -> Self {
        Mat2::new(r.one(), x.clone(), r.zero(), r.one())
    }

    /// E21(x) = [[1, 0], [x, 1]].
    pub fn e21(r: &FiniteRingSpec, x: &RingElem) -> Self {
        Mat2::new(r.one(), r.zero(), x.clone(), r.one())
    }

    pub fn mul(&self, r: &FiniteRingSpec, o: &Mat2) -> Mat2 {
        let [a, b, c, d] = &self.entries;
        let [e, f, g, h] = &o.entries;
        Mat2::new(
            r.add(&r.mul(a, e), &r.mul(b, g)),
            r.add(&r.mul(a, f), &r.mul(b, h)),
            r.add(&r.mul(c, e), &r.mul(d, g)),
            r.add(&r.mul(c, f), &r.mul(d, h)),
        )
    }

    pub fn add(&self, r: &FiniteRingSpec, o: &Mat2) -> Mat2 {
        Mat2 {
            entries: std::array::from_fn(|i| r.add(&self.entries[i], &o.entries[i])),
        }
    }

    pub fn sub(&self, r: &FiniteRingSpec, o: &Mat2) -> Mat2 {
        Mat2 {
            entries: std::array::from_fn(|i| r.sub(&self.entries[i], &o.entries[i])),
        }
    }

    pub fn scale(&self, r: &FiniteRingSpec, c: u64) -> Mat2 {
        Mat2 {
            entries: std::array::from_fn(|i| r.scale(&self.entries[i], c)),
        }
    }

    pub fn det(&self, r: &FiniteRingSpec) -> RingElem {
        let [a, b, c, d] = &self.entries;
        r.sub(&r.mul(a, d), &r.mul(b, c))
    }

    pub fn trace(&self, r: &FiniteRingSpec) -> RingElem {
        r.add(&self.entries[0], &self.entries[3])
    }

    pub fn is_invertible(&self, r: &FiniteRingSpec) -> bool {
        r.is_unit(&self.det(r))
    }

    pub fn inverse(&self, r: &FiniteRingSpec) -> Option<Mat2> {
        let di = r.inv(&self.det(r))?;
        let [a, b, c, d] = &self.entries;
        Some(Mat2::new(
            r.mul(d, &di),
            r.mul(&r.neg(b), &di),
            r.mul(&r.neg(c), &di),
            r.mul(a, &di),
        ))
    }

    /// `u m u^-1`.
    pub fn conjugate_by(&self, r: &FiniteRingSpec, u: &Mat2) -> Option<Mat2> {
        Some(u.mul(r, self).mul(r, &u.inverse(r)?))
    }

    pub fn pow(&self, r: &FiniteRingSpec, mut e: u64) -> Mat2 {
        let mut acc = Mat2::identity(r);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(r, &base);
            }
            base = base.mul(r, &base);
            e >>= 1;
        }
        acc
    }

    /// Parse `[[a, b], [c, d]]`; entries are integers or per-component coefficient lists.
    pub fn parse(r: &FiniteRingSpec, s: &str) -> Result<Mat2> {
        let v: serde_json::Value = serde_json::from_str(s.trim())
            .map_err(|e| Error::invalid(format!("bad matrix {s:?}: {e}")))?;
        let rows = v
            .as_array()
            .filter(|rows| rows.len() == 2)
            .ok_or_else(|| Error::invalid(format!("matrix {s:?} must have two rows")))?;
        let mut entries = Vec::with_capacity(4);
        for row in rows {
            let row = row
                .as_array()
                .filter(|row| row.len() == 2)
                .ok_or_else(|| Error::invalid(format!("matrix {s:?} must have two columns")))?;
            for e in row {
                entries.push(r.elem_from_json(e)?);
            }
        }
        let [a, b, c, d]: [RingElem; 4] = entries.try_into().expect("four entries");
        Ok(Mat2::new(a, b, c, d))
    }

    pub fn to_json(&self, r: &FiniteRingSpec) -> serde_json::Value {
        let e: Vec<serde_json::Value> = self.entries.iter().map(|x| r.elem_to_json(x)).collect();
        serde_json::json!([[e[0], e[1]], [e[2], e[3]]])
    }

    pub fn display<'a>(&'a self, r: &'a FiniteRingSpec) -> impl fmt::Display + 'a {
        MatDisplay(self, r)
    }
}

struct MatDisplay<'a>(&'a Mat2, &'a FiniteRingSpec);

impl fmt::Display for MatDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_json(self.1))
    }
}
