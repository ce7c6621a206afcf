use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use serde_json::Value;

use crate::algnum::field::{is_irreducible_over_q, parse_rational, FieldElement, NumberField};
use crate::algnum::IntPoly;
use crate::arith::{gcd, primes_up_to};
use crate::error::{Error, Result};

/// A normalized eigenform with its nebentypus and an initial segment of
/// q-expansion coefficients.
#[derive(Clone, Debug)]
pub struct NewformRecord {
    pub label: String,
    pub level: u64,
    pub weight: u64,
    pub char_conductor: u64,
    /// chi(a) for residues a mod the conductor, coprime to it.
    pub char_values: BTreeMap<u64, FieldElement>,
    pub field: Arc<NumberField>,
    /// a_1, ..., a_B.
    pub an: Vec<FieldElement>,
    pub cm: bool,
    /// Recorded as given; never checked.
    pub twist_minimal: Option<bool>,
}

#[derive(Deserialize)]
struct Raw {
    label: String,
    level: u64,
    weight: u64,
    char_conductor: u64,
    char_values: BTreeMap<String, Vec<Value>>,
    field_poly: Vec<i64>,
    an: BTreeMap<String, Vec<Value>>,
    #[serde(default)]
    cm: bool,
    #[serde(default)]
    twist_minimal: Option<bool>,
}

/// Drop leading `#` comment lines (provenance headers).
pub fn strip_header(text: &str) -> &str {
    let mut rest = text;
    while rest.starts_with('#') {
        rest = rest.find('\n').map_or("", |i| &rest[i + 1..]);
    }
    rest
}

fn header_lines(text: &str) -> usize {
    text.lines().take_while(|l| l.starts_with('#')).count()
}

fn coord(v: &Value) -> Option<BigRational> {
    match v {
        Value::Number(n) => n.as_i64().map(|i| BigRational::from_integer(BigInt::from(i))),
        Value::String(s) => parse_rational(s).ok(),
        _ => None,
    }
}

impl NewformRecord {
    /// Parse and validate a record. Line numbers in errors refer to `text`.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let offset = header_lines(text);
        let body = strip_header(text);
        let schema = |line: usize, message: String| Error::Schema {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let find = |needle: &str| body.lines().position(|l| l.contains(needle)).map_or(0, |i| i + 1 + offset);
        let raw: Raw = serde_json::from_str(body).map_err(|e| schema(e.line() + offset, e.to_string()))?;

        let mut parts = raw.label.split('.');
        let (n, k) = (parts.next(), parts.next());
        if n != Some(&raw.level.to_string()) || k != Some(&raw.weight.to_string()) || parts.count() != 2 {
            return Err(schema(find("\"label\""), format!("label {} does not match level/weight", raw.label)));
        }
        if raw.level == 0 || raw.weight < 1 {
            return Err(schema(find("\"level\""), "level and weight must be positive".into()));
        }
        if raw.char_conductor == 0 || !raw.level.is_multiple_of(raw.char_conductor) {
            return Err(schema(find("\"char_conductor\""), "conductor must divide the level".into()));
        }
        let poly = IntPoly::from_i64(&raw.field_poly);
        if poly.degree() == 0 || !poly.is_monic() || !is_irreducible_over_q(&poly) {
            return Err(schema(find("\"field_poly\""), format!("{poly} is not monic irreducible")));
        }
        let field = NumberField::from_poly(poly).map_err(|e| schema(find("\"field_poly\""), e.to_string()))?;
        let d = field.degree();
        let elem = |key: &str, v: &[Value], what: &str| -> Result<FieldElement> {
            let coords: Option<Vec<BigRational>> = v.iter().map(coord).collect();
            match coords {
                Some(c) if c.len() == d => FieldElement::new(&field, c),
                _ => Err(schema(find(&format!("\"{key}\"")), format!("{what}[{key}] needs {d} rational coordinates"))),
            }
        };

        let mut an = Vec::with_capacity(raw.an.len());
        let mut keyed: BTreeMap<u64, FieldElement> = BTreeMap::new();
        for (key, v) in &raw.an {
            let n: u64 = key.parse().map_err(|_| schema(find(&format!("\"{key}\"")), format!("bad index {key:?}")))?;
            keyed.insert(n, elem(key, v, "an")?);
        }
        for (i, (n, a)) in keyed.into_iter().enumerate() {
            if n != i as u64 + 1 {
                return Err(schema(find("\"an\""), format!("coefficients must be contiguous from 1; missing a_{}", i + 1)));
            }
            an.push(a);
        }
        if an.first().is_none_or(|a| !a.is_one()) {
            return Err(schema(find("\"an\""), "a_1 must be 1 (normalized eigenform)".into()));
        }

        let c = raw.char_conductor;
        let mut char_values = BTreeMap::new();
        for (key, v) in &raw.char_values {
            let a: u64 = key.parse().map_err(|_| schema(find(&format!("\"{key}\"")), format!("bad residue {key:?}")))?;
            if a >= c.max(2) || gcd(a, c) != 1 {
                return Err(schema(find("\"char_values\""), format!("residue {a} is not a unit mod {c}")));
            }
            let x = elem(key, v, "char_values")?;
            if !x.is_root_of_unity() {
                return Err(schema(find("\"char_values\""), format!("chi({a}) is not a root of unity")));
            }
            char_values.insert(a % c, x);
        }
        let units = (0..c).filter(|&a| gcd(a, c) == 1).count();
        if char_values.len() != units {
            return Err(schema(find("\"char_values\""), format!("expected {units} character values, found {}", char_values.len())));
        }
        for (&a, x) in &char_values {
            for (&b, y) in &char_values {
                if char_values[&(a * b % c)] != x * y {
                    return Err(schema(find("\"char_values\""), format!("character not multiplicative at ({a}, {b})")));
                }
            }
        }
        Ok(NewformRecord {
            label: raw.label,
            level: raw.level,
            weight: raw.weight,
            char_conductor: c,
            char_values,
            field,
            an,
            cm: raw.cm,
            twist_minimal: raw.twist_minimal,
        })
    }

    pub fn coeff_bound(&self) -> u64 {
        self.an.len() as u64
    }

    pub fn hecke_degree(&self) -> usize {
        self.field.degree()
    }

    pub fn a(&self, n: u64) -> Result<&FieldElement> {
        if n == 0 {
            return Err(Error::invalid("coefficients start at a_1"));
        }
        self.an
            .get(n as usize - 1)
            .ok_or_else(|| Error::data(format!("{}: a_{n} not in record (known up to a_{})", self.label, self.an.len())))
    }

    /// chi(n), or None when n shares a factor with the conductor.
    pub fn chi(&self, n: u64) -> Option<FieldElement> {
        if gcd(n, self.char_conductor) != 1 {
            return None;
        }
        self.char_values.get(&(n % self.char_conductor)).cloned()
    }

    /// Multiplicative order of chi(n).
    pub fn order_of_chi_at(&self, n: u64) -> Option<u64> {
        let x = self.chi(n)?;
        let mut y = x.clone();
        for m in 1..=240u64 {
            if y.is_one() {
                return Some(m);
            }
            y = &y * &x;
        }
        None
    }

    /// Smallest modulus that chi is defined mod, recomputed from its values.
    pub fn computed_conductor(&self) -> u64 {
        let c = self.char_conductor;
        let mut best = c;
        for d in (1..c).filter(|d| c.is_multiple_of(*d)) {
            let trivial_on_kernel = self
                .char_values
                .iter()
                .filter(|(a, _)| **a % d == 1 % d)
                .all(|(_, v)| v.is_one());
            if trivial_on_kernel {
                best = best.min(d);
            }
        }
        best
    }

    /// Primes q with q | N exactly once.
    pub fn exact_level_primes(&self) -> Vec<u64> {
        primes_up_to(self.level)
            .into_iter()
            .filter(|&q| self.level.is_multiple_of(q) && !(self.level / q).is_multiple_of(q))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = r#"# source: test
{
 "label": "5.2.a.a", "level": 5, "weight": 2, "char_conductor": 5,
 "char_values": {"1": [1, 0], "2": [0, 1], "3": [0, -1], "4": [-1, 0]},
 "field_poly": [1, 0, 1],
 "an": {"1": [1, 0], "2": [0, 1]}
}"#;

    #[test]
    fn parse_minimal() {
        let r = NewformRecord::parse(MINI, "mini").unwrap();
        assert_eq!(r.coeff_bound(), 2);
        assert_eq!(r.order_of_chi_at(2), Some(4));
        assert_eq!(r.chi(10), None);
        assert_eq!(r.computed_conductor(), 5);
        assert!(r.a(3).is_err());
    }

    #[test]
    fn rejects_unnormalized() {
        let bad = MINI.replace("\"1\": [1, 0], \"2\": [0, 1]}", "\"1\": [0, 0], \"2\": [0, 1]}");
        match NewformRecord::parse(&bad, "bad") {
            Err(Error::Schema { line, message, .. }) => {
                assert!(message.contains("a_1"));
                assert_eq!(line, 6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_non_multiplicative() {
        let bad = MINI.replace("\"3\": [0, -1]", "\"3\": [0, 1]");
        assert!(NewformRecord::parse(&bad, "bad").is_err());
    }

    #[test]
    fn syntax_error_has_line() {
        let bad = MINI.replace("\"weight\": 2,", "\"weight\": ,");
        match NewformRecord::parse(&bad, "bad") {
            Err(Error::Schema { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
