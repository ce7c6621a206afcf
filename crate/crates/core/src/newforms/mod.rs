//! Newform records, the P0-P3 checks, big-image evidence and certificates.

pub mod assumption;
pub mod certify;
pub mod conrey;
pub mod record;
pub mod table;

pub use assumption::{
    check_assumption1, frobenius_charpoly, full_report, irreducible_quadratic, mascot_diamond_check, AssumptionReport,
    BigImageEvidence, FrobeniusPoly, P2Status,
};
pub use certify::{certify, Certificate, CertifyOutcome, NegativeReport};
pub use record::NewformRecord;
pub use table::{reproduce_table, TableReport, TableRow, REFERENCE_TABLE};

use crate::error::Result;

/// Where records and newspace dimensions come from.
pub trait DataSource: Sync {
    fn newform(&self, label: &str) -> Result<NewformRecord>;
    /// Dimension of the weight-k newspace of level N for the character orbit
    /// with least Conrey index `orbit`.
    fn newspace_dim(&self, level: u64, weight: u64, orbit: u64) -> Result<u64>;
}
