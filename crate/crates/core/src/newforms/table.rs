use serde::{Deserialize, Serialize};

use num_traits::Signed;

use crate::algnum::field::{rational_mod, FieldElement};
use crate::algnum::{residue_image, splitting_type};
use crate::arith::{is_square_mod, primes_up_to};
use crate::error::{Error, Result};
use crate::newforms::assumption::{frobenius_data, lower_level};
use crate::newforms::record::NewformRecord;
use crate::newforms::DataSource;

/// One row of the reference table of trace-zero examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReferenceRow {
    pub label: &'static str,
    pub level: u64,
    pub field: &'static str,
    pub conductor: u64,
    pub r: u64,
    pub p: u64,
    pub charpoly: &'static str,
}

pub const REFERENCE_TABLE: [ReferenceRow; 10] = [
    ReferenceRow { label: "24.2.d.a", level: 24, field: "Q(i)", conductor: 8, r: 11, p: 61, charpoly: "X^2-11" },
    ReferenceRow { label: "26.2.c.a", level: 26, field: "Q(sqrt(-3))", conductor: 13, r: 83, p: 19, charpoly: "X^2+83" },
    ReferenceRow { label: "26.2.b.a", level: 26, field: "Q(i)", conductor: 13, r: 11, p: 29, charpoly: "X^2-11" },
    ReferenceRow { label: "30.2.c.a", level: 30, field: "Q(i)", conductor: 5, r: 19, p: 29, charpoly: "X^2+19" },
    ReferenceRow { label: "34.2.c.a", level: 34, field: "Q(i)", conductor: 17, r: 89, p: 37, charpoly: "X^2+89" },
    ReferenceRow { label: "35.2.b.a", level: 35, field: "Q(i)", conductor: 5, r: 19, p: 73, charpoly: "X^2+19" },
    ReferenceRow { label: "39.2.j.a", level: 39, field: "Q(sqrt(-3))", conductor: 13, r: 239, p: 37, charpoly: "X^2-239" },
    ReferenceRow { label: "39.2.b.a", level: 39, field: "Q(sqrt(-3))", conductor: 5, r: 31, p: 73, charpoly: "X^2-31" },
    ReferenceRow { label: "42.2.e.a", level: 42, field: "Q(sqrt(-3))", conductor: 7, r: 41, p: 13, charpoly: "X^2+41" },
    ReferenceRow { label: "45.2.e.a", level: 45, field: "Q(sqrt(-3))", conductor: 9, r: 937, p: 31, charpoly: "X^2+937" },
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDiff {
    pub column: String,
    pub expected: String,
    pub computed: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub level: u64,
    pub field: String,
    pub conductor: u64,
    pub r: u64,
    pub p: u64,
    pub charpoly: String,
    pub a_p_zero: bool,
    pub a_r_zero: bool,
    /// chi(r) when it is +1 or -1.
    pub chi_r_sign: Option<i8>,
    pub irreducible_mod_p: bool,
    /// Dimensions of the newspaces N/l with the same character, for each admissible l.
    pub lower_levels: Vec<(u64, u64)>,
    /// Smallest p >= 5 not dividing N with a_p = 0 and the row's polynomial irreducible mod p.
    pub first_valid_p: Option<u64>,
    pub diffs: Vec<FieldDiff>,
}

impl TableRow {
    pub fn matches(&self) -> bool {
        self.diffs.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub rows: Vec<TableRow>,
    pub matched: usize,
    pub total: usize,
}

impl TableReport {
    pub fn all_match(&self) -> bool {
        self.matched == self.total
    }
}

fn term(c: &FieldElement, first: bool) -> String {
    match c.as_rational() {
        Some(q) => {
            let s = crate::algnum::field::format_rational(&q.abs());
            let sign = if q < num_rational::BigRational::from_integer(0.into()) { "-" } else if first { "" } else { "+" };
            format!("{sign}{s}")
        }
        None => format!("{}({c})", if first { "" } else { "+" }),
    }
}

/// `X^2-a X+b` with integer coefficients printed compactly.
pub fn format_charpoly(trace: &FieldElement, constant: &FieldElement) -> String {
    let mut s = "X^2".to_string();
    if !trace.is_zero() {
        let t = term(&-trace, false);
        s.push_str(if t == "+1" { "+" } else if t == "-1" { "-" } else { &t });
        s.push('X');
    }
    if !constant.is_zero() {
        s.push_str(&term(constant, false));
    }
    s
}

/// Irreducibility of X^2 - t X + c mod p, at the first degree-one prime when
/// the coefficients are not rational.
fn irreducible_at(t: &FieldElement, c: &FieldElement, p: u64) -> Result<Option<bool>> {
    let (tb, cb) = match (t.as_rational(), c.as_rational()) {
        (Some(t), Some(c)) => (rational_mod(&t, p)?, rational_mod(&c, p)?),
        _ => {
            let split = splitting_type(t.field(), p)?;
            let Some(&root) = split.degree_one_roots().first() else {
                return Ok(None);
            };
            (residue_image(t, p, root)?, residue_image(c, p, root)?)
        }
    };
    let disc = (tb * tb % p + p - 4 * cb % p) % p;
    Ok(Some(!is_square_mod(disc, p)))
}

/// Recompute one reference row from its record.
pub fn check_row(reference: &ReferenceRow, rec: &NewformRecord, data: &dyn DataSource) -> Result<TableRow> {
    let (p, r) = (reference.p, reference.r);
    let (t, c) = frobenius_data(rec, r)?;
    let charpoly = format_charpoly(&t, &c);
    let chi_r = rec.chi(r).ok_or_else(|| Error::invalid(format!("chi({r}) undefined")))?;
    let chi_r_sign = chi_r.as_rational().and_then(|q| {
        if q == num_rational::BigRational::from_integer(1.into()) {
            Some(1)
        } else if q == num_rational::BigRational::from_integer((-1).into()) {
            Some(-1)
        } else {
            None
        }
    });
    let a_p_zero = rec.a(p)?.is_zero();
    let a_r_zero = t.is_zero();
    let irreducible_mod_p = irreducible_at(&t, &c, p)?.unwrap_or(false);
    let conductor = rec.computed_conductor();
    let mut lower_levels = Vec::new();
    for l in rec.exact_level_primes().into_iter().filter(|l| !rec.char_conductor.is_multiple_of(*l)) {
        let (m, orbit) = lower_level(rec, l)?;
        lower_levels.push((m, data.newspace_dim(m, rec.weight, orbit)?));
    }
    let first_valid_p = primes_up_to(rec.coeff_bound())
        .into_iter()
        .filter(|&q| q >= 5 && q != r && !rec.level.is_multiple_of(q))
        .find(|&q| {
            rec.a(q).is_ok_and(|a| a.is_zero()) && irreducible_at(&t, &c, q).ok().flatten() == Some(true)
        });

    let computed = [
        ("level", reference.level.to_string(), rec.level.to_string()),
        ("field", reference.field.to_string(), rec.field.display_name()),
        ("conductor", reference.conductor.to_string(), conductor.to_string()),
        ("charpoly", reference.charpoly.to_string(), charpoly.clone()),
        ("a_p = 0", "true".into(), a_p_zero.to_string()),
        ("a_r = 0", "true".into(), a_r_zero.to_string()),
        ("chi(r) = +-1", "true".into(), chi_r_sign.is_some().to_string()),
        ("irreducible mod p", "true".into(), irreducible_mod_p.to_string()),
    ];
    let diffs = computed
        .into_iter()
        .filter(|(_, e, c)| e != c)
        .map(|(col, e, c)| FieldDiff { column: col.to_string(), expected: e, computed: c })
        .collect();
    Ok(TableRow {
        label: rec.label.clone(),
        level: rec.level,
        field: rec.field.display_name(),
        conductor,
        r,
        p,
        charpoly,
        a_p_zero,
        a_r_zero,
        chi_r_sign,
        irreducible_mod_p,
        lower_levels,
        first_valid_p,
        diffs,
    })
}

/// Recompute every reference row. Any missing record aborts the whole table.
pub fn reproduce_table(data: &dyn DataSource) -> Result<TableReport> {
    let records: Vec<NewformRecord> = REFERENCE_TABLE
        .iter()
        .map(|row| data.newform(row.label))
        .collect::<Result<_>>()?;
    let rows: Vec<TableRow> = REFERENCE_TABLE
        .iter()
        .zip(&records)
        .map(|(row, rec)| check_row(row, rec, data))
        .collect::<Result<_>>()?;
    let matched = rows.iter().filter(|r| r.matches()).count();
    Ok(TableReport { total: rows.len(), matched, rows })
}
