use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algnum::field::FieldElement;
use crate::algnum::{residue_image, splitting_type, PrimeFactorization};
use crate::arith::{gcd, is_prime, is_square_mod, pow_mod, primes_up_to};
use crate::error::{Error, Result};
use crate::localfields::p3_holds;
use crate::newforms::conrey::orbit_key;
use crate::newforms::record::NewformRecord;
use crate::newforms::DataSource;

/// X^2 - trace X + constant over F_p, reduced at the degree-one prime (p, root).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusPoly {
    pub p: u64,
    pub root: u64,
    pub r: u64,
    pub trace: u64,
    pub constant: u64,
}

impl FrobeniusPoly {
    pub fn discriminant(&self) -> u64 {
        let p = self.p;
        let t2 = self.trace * self.trace % p;
        (t2 + p - 4 * self.constant % p) % p
    }
}

impl fmt::Display for FrobeniusPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^2")?;
        if self.trace != 0 {
            write!(f, " + {}X", (self.p - self.trace) % self.p)?;
        }
        if self.constant != 0 {
            write!(f, " + {}", self.constant)?;
        }
        write!(f, " mod {}", self.p)
    }
}

fn check_cm(rec: &NewformRecord) -> Result<()> {
    if rec.cm {
        return Err(Error::NotApplicable(format!(
            "{} has complex multiplication: its Galois image is abelian over an imaginary quadratic field",
            rec.label
        )));
    }
    Ok(())
}

/// Exact Frobenius trace and determinant at r: (a_r, r^(k-1) chi(r)).
pub fn frobenius_data(rec: &NewformRecord, r: u64) -> Result<(FieldElement, FieldElement)> {
    if !is_prime(r) {
        return Err(Error::invalid(format!("r = {r} is not prime")));
    }
    if rec.level.is_multiple_of(r) {
        return Err(Error::invalid(format!("r = {r} divides the level {}", rec.level)));
    }
    let a = rec.a(r)?.clone();
    let chi = rec
        .chi(r)
        .ok_or_else(|| Error::invalid(format!("chi({r}) undefined")))?;
    let scale = FieldElement::from_rational(
        &rec.field,
        num_rational::BigRational::from_integer(num_bigint::BigInt::from(r).pow(rec.weight as u32 - 1)),
    );
    Ok((a, &scale * &chi))
}

/// X^2 - a_r X + r^(k-1) chi(r), reduced at the degree-one prime (p, root).
pub fn frobenius_charpoly(rec: &NewformRecord, r: u64, p: u64, root: u64) -> Result<FrobeniusPoly> {
    if r == p {
        return Err(Error::invalid("r must differ from p"));
    }
    let (a, c) = frobenius_data(rec, r)?;
    Ok(FrobeniusPoly {
        p,
        root,
        r,
        trace: residue_image(&a, p, root)?,
        constant: residue_image(&c, p, root)?,
    })
}

/// Whether the quadratic has no root in F_p.
pub fn irreducible_quadratic(q: &FrobeniusPoly) -> bool {
    if q.p == 2 {
        return (0..2).all(|x| !(x * x + (2 - q.trace % 2) * x + q.constant).is_multiple_of(2));
    }
    !is_square_mod(q.discriminant(), q.p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigImageEvidence {
    pub p: u64,
    pub root: u64,
    pub r: u64,
    pub charpoly: FrobeniusPoly,
    pub irreducible: bool,
    pub l: u64,
    pub lower_level: u64,
    pub lower_char_orbit: u64,
    pub lower_level_dim: u64,
    pub lower_level_empty: bool,
}

impl BigImageEvidence {
    pub fn is_positive(&self) -> bool {
        self.irreducible && self.lower_level_empty
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum P2Status {
    NotChecked,
    /// One entry per degree-one prime above p. With several primes the claim
    /// for the whole product ring is conditional on the per-prime statements.
    Evidence { per_prime: Vec<BigImageEvidence>, product_conditional: bool },
    Undetermined { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub p: u64,
    pub p0: bool,
    pub p1: bool,
    pub p3: bool,
    pub p2: P2Status,
    pub splitting: PrimeFactorization,
}

impl AssumptionReport {
    pub fn p2_positive(&self) -> bool {
        match &self.p2 {
            P2Status::Evidence { per_prime, .. } => !per_prime.is_empty() && per_prime.iter().all(BigImageEvidence::is_positive),
            _ => false,
        }
    }

    pub fn verdict(&self) -> bool {
        self.p0 && self.p1 && self.p3 && self.p2_positive()
    }

    /// Names of the conditions that fail.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.p0 {
            out.push("P0: p divides N".to_string());
        }
        if !self.p1 {
            out.push("P1: a_p != 0".to_string());
        }
        if !self.p3 {
            out.push("P3: p < 5 or p | k-1 or (p+1)/2 | k-1".to_string());
        }
        match &self.p2 {
            P2Status::NotChecked => {}
            P2Status::Undetermined { reason } => out.push(format!("P2 undetermined: {reason}")),
            P2Status::Evidence { per_prime, .. } => {
                for e in per_prime.iter().filter(|e| !e.is_positive()) {
                    if !e.irreducible {
                        out.push(format!("P2: Frobenius polynomial at r = {} reducible mod ({}, {})", e.r, e.p, e.root));
                    }
                    if !e.lower_level_empty {
                        out.push(format!("P2: level {} newspace for the character is nonzero", e.lower_level));
                    }
                }
            }
        }
        out
    }
}

/// Evaluate P0, P1 and P3 at p and record how p splits in the Hecke field.
pub fn check_assumption1(rec: &NewformRecord, p: u64) -> Result<AssumptionReport> {
    check_cm(rec)?;
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let ap = rec.a(p)?;
    Ok(AssumptionReport {
        p,
        p0: !rec.level.is_multiple_of(p),
        p1: ap.is_zero(),
        p3: p3_holds(p, rec.weight),
        p2: P2Status::NotChecked,
        splitting: splitting_type(&rec.field, p)?,
    })
}

/// Level-lowering data: the newspace of level N/l with the same character.
pub fn lower_level(rec: &NewformRecord, l: u64) -> Result<(u64, u64)> {
    if !rec.level.is_multiple_of(l) || (rec.level / l).is_multiple_of(l) {
        return Err(Error::invalid(format!("l = {l} must divide N = {} exactly once", rec.level)));
    }
    if rec.char_conductor.is_multiple_of(l) {
        return Err(Error::invalid(format!("l = {l} divides the conductor of the character")));
    }
    let m = rec.level / l;
    let kernel: Vec<bool> = (0..m)
        .map(|a| gcd(a, m) == 1 && rec.chi(a).is_some_and(|x| x.is_one()))
        .collect();
    Ok((m, orbit_key(m, &kernel)?))
}

/// Big-image evidence at one degree-one prime (p, root) with auxiliary r and l.
pub fn mascot_diamond_check(
    rec: &NewformRecord,
    p: u64,
    root: u64,
    r: u64,
    l: u64,
    data: &dyn DataSource,
) -> Result<BigImageEvidence> {
    check_cm(rec)?;
    if rec.weight != 2 {
        return Err(Error::NotApplicable("the level-lowering route is only available in weight 2".into()));
    }
    if p.is_multiple_of(l) {
        return Err(Error::invalid("l must differ from p"));
    }
    if rec.level.is_multiple_of(r) || gcd(r, rec.char_conductor) != 1 {
        return Err(Error::invalid(format!("r = {r} must be prime to N")));
    }
    let (m, orbit) = lower_level(rec, l)?;
    let charpoly = frobenius_charpoly(rec, r, p, root)?;
    let dim = data.newspace_dim(m, rec.weight, orbit)?;
    Ok(BigImageEvidence {
        p,
        root,
        r,
        irreducible: irreducible_quadratic(&charpoly),
        charpoly,
        l,
        lower_level: m,
        lower_char_orbit: orbit,
        lower_level_dim: dim,
        lower_level_empty: dim == 0,
    })
}

/// Smallest r whose Frobenius polynomial is irreducible at (p, root).
pub fn find_auxiliary_r(rec: &NewformRecord, p: u64, root: u64) -> Result<Option<FrobeniusPoly>> {
    for r in primes_up_to(rec.coeff_bound()) {
        if r == p || rec.level.is_multiple_of(r) || gcd(r, rec.char_conductor) != 1 {
            continue;
        }
        let f = frobenius_charpoly(rec, r, p, root)?;
        if irreducible_quadratic(&f) {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// Candidate l: primes dividing N exactly once and prime to p and the conductor.
pub fn auxiliary_l_candidates(rec: &NewformRecord, p: u64) -> Vec<u64> {
    rec.exact_level_primes()
        .into_iter()
        .filter(|&l| l != p && !rec.char_conductor.is_multiple_of(l))
        .collect()
}

/// Full P0-P3 report with P2 evidence at every degree-one prime above p.
pub fn full_report(rec: &NewformRecord, p: u64, data: &dyn DataSource) -> Result<AssumptionReport> {
    let mut report = check_assumption1(rec, p)?;
    report.p2 = p2_status(rec, p, &report.splitting, data)?;
    Ok(report)
}

pub(crate) fn p2_status(
    rec: &NewformRecord,
    p: u64,
    splitting: &PrimeFactorization,
    data: &dyn DataSource,
) -> Result<P2Status> {
    if rec.weight != 2 {
        return Ok(P2Status::Undetermined { reason: format!("weight {} is outside the level-lowering route", rec.weight) });
    }
    if rec.level.is_multiple_of(p) {
        return Ok(P2Status::Undetermined { reason: "p divides the level".into() });
    }
    let roots = splitting.degree_one_roots();
    if roots.is_empty() {
        return Ok(P2Status::Undetermined { reason: format!("no degree-one prime above {p}") });
    }
    let ls = auxiliary_l_candidates(rec, p);
    if ls.is_empty() {
        return Ok(P2Status::Undetermined { reason: "no prime l divides N exactly once and is prime to the conductor".into() });
    }
    let mut per_prime = Vec::new();
    for &root in &roots {
        let Some(f) = find_auxiliary_r(rec, p, root)? else {
            return Ok(P2Status::Undetermined {
                reason: format!("no r up to {} gives an irreducible Frobenius polynomial at ({p}, {root})", rec.coeff_bound()),
            });
        };
        let mut chosen = None;
        for &l in &ls {
            let e = mascot_diamond_check(rec, p, root, f.r, l, data)?;
            let done = e.is_positive();
            chosen = Some(e);
            if done {
                break;
            }
        }
        per_prime.push(chosen.expect("ls nonempty"));
    }
    Ok(P2Status::Evidence {
        product_conditional: splitting.factors.len() > 1,
        per_prime,
    })
}

/// Whether some x in F_p satisfies x^4 = c.
pub fn has_fourth_root(c: u64, p: u64) -> bool {
    let c = c % p;
    if c == 0 {
        return true;
    }
    let g = gcd(4, p - 1);
    pow_mod(c, (p - 1) / g, p) == 1
}
