use num_bigint::BigUint;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::primes_up_to;
use crate::error::{Error, Result};
use crate::heights::{bogomolov_constant, BogomolovConstant};
use crate::localfields::{central_exponent, gal_structure, ramification_filtration, CrystallineParams};
use crate::newforms::assumption::{check_assumption1, p2_status, AssumptionReport};
use crate::newforms::record::NewformRecord;
use crate::newforms::DataSource;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub n: u32,
    /// Order of Gal(L(p^n)/L).
    pub galois_order: u128,
    /// Last ramification break and the order of the group there.
    pub i_n: u128,
    pub last_group_order: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    #[serde(with = "crate::serde_big::uint")]
    pub c1: BigUint,
    #[serde(with = "crate::serde_big::uint")]
    pub c2: BigUint,
    /// Central exponent g = 2^(2(p-1)).
    #[serde(with = "crate::serde_big::uint")]
    pub g: BigUint,
    pub bogomolov: BogomolovConstant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub label: String,
    pub p: u64,
    pub embedding: (u64, u64),
    pub hecke_degree: usize,
    pub report: AssumptionReport,
    pub delta: u64,
    pub filtration: Vec<LevelSummary>,
    pub constants: Constants,
    pub notes: Vec<String>,
    pub verdict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeFailure {
    pub p: u64,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativeReport {
    pub label: String,
    pub bound: u64,
    pub failures: Vec<PrimeFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CertifyOutcome {
    Certified(Box<Certificate>),
    Failed(NegativeReport),
}

impl CertifyOutcome {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            CertifyOutcome::Certified(c) => Some(c),
            CertifyOutcome::Failed(_) => None,
        }
    }
}

/// P0, P1, P3 and unramifiedness; cheap and independent per prime.
fn screen(rec: &NewformRecord, p: u64) -> Result<std::result::Result<AssumptionReport, Vec<String>>> {
    let report = check_assumption1(rec, p)?;
    let mut reasons: Vec<String> = report.failures();
    if !report.splitting.is_unramified() {
        reasons.push("p ramifies in the Hecke field".into());
    } else if report.splitting.degree_one_roots().is_empty() {
        reasons.push("no degree-one prime above p".into());
    }
    Ok(if reasons.is_empty() { Ok(report) } else { Err(reasons) })
}

/// Smallest p up to `bound` at which every hypothesis is verified, with all
/// constants assembled.
pub fn certify(rec: &NewformRecord, bound: u64, data: &dyn DataSource) -> Result<CertifyOutcome> {
    if rec.cm {
        return Err(Error::NotApplicable(format!(
            "{} has complex multiplication: its Galois image is abelian over an imaginary quadratic field",
            rec.label
        )));
    }
    if bound > rec.coeff_bound() {
        return Err(Error::data(format!(
            "{}: search bound {bound} exceeds the coefficients in the record (a_n known up to n = {})",
            rec.label,
            rec.coeff_bound()
        )));
    }
    let primes = primes_up_to(bound);
    let screened: Vec<_> = primes.par_iter().map(|&p| screen(rec, p).map(|s| (p, s))).collect::<Result<_>>()?;
    let mut failures = Vec::new();
    for (p, s) in screened {
        match s {
            Err(reasons) => failures.push(PrimeFailure { p, reasons }),
            Ok(mut report) => {
                report.p2 = p2_status(rec, p, &report.splitting, data)?;
                if report.verdict() {
                    return Ok(CertifyOutcome::Certified(Box::new(assemble(rec, report)?)));
                }
                failures.push(PrimeFailure { p, reasons: report.failures() });
            }
        }
    }
    Ok(CertifyOutcome::Failed(NegativeReport { label: rec.label.clone(), bound, failures }))
}

fn assemble(rec: &NewformRecord, report: AssumptionReport) -> Result<Certificate> {
    let p = report.p;
    let d = rec.hecke_degree();
    let mut filtration = Vec::new();
    let mut delta = 0;
    for n in 1..=3 {
        let params = CrystallineParams::new(p, rec.weight, n)?;
        delta = params.delta;
        let gal = gal_structure(&params)?;
        let f = ramification_filtration(&params)?;
        filtration.push(LevelSummary { n, galois_order: gal.order, i_n: f.last_break, last_group_order: f.last_order });
    }
    let c1 = crate::arith::big_pow(p, 2);
    let c2 = crate::arith::big_pow(p, 4 * d as u64);
    let bogomolov = bogomolov_constant(p, &BigRational::from_integer(c1.clone().into()), &c2)?;
    let root = report.splitting.degree_one_roots()[0];
    let mut notes = vec![
        "the inner-twist field is unramified at p; C2 uses the Hecke field degree".to_string(),
        "twist minimality is taken from the record and not checked".to_string(),
    ];
    if let crate::newforms::assumption::P2Status::Evidence { product_conditional: true, .. } = report.p2 {
        notes.push("several primes lie above p; the image statement for the product ring rests on the per-prime evidence".into());
    }
    let verdict = report.verdict() && bogomolov.log10_c.is_finite();
    Ok(Certificate {
        label: rec.label.clone(),
        p,
        embedding: (p, root),
        hecke_degree: d,
        delta,
        filtration,
        constants: Constants { c1, c2, g: central_exponent(p, 2)?, bogomolov },
        notes,
        verdict,
        report,
    })
}
