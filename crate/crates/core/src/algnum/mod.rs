//! Exact arithmetic in small number fields.

pub mod embed;
pub mod field;
pub mod fp_poly;
pub mod galois;
pub mod poly;
pub mod splitting;

pub use embed::{complex_embeddings, ComplexApprox};
pub use field::{FieldElement, FieldKind, NumberField};
pub use fp_poly::{factor_mod_p, FpFactorization, FpPoly};
pub use galois::{apply_automorphism, AbelianAutomorphism};
pub use poly::IntPoly;
pub use splitting::{residue_image, splitting_type, PrimeFactor, PrimeFactorization};
