//! Finite matrix groups over Z/p^n and products of finite fields.

pub mod finite;
pub mod group;
pub mod log;
pub mod mat;
pub mod ring;
pub mod subspace;

pub use finite::{fiber_product, FiberProduct, FiniteGroup, GroupHom};
pub use group::{
    center, contains_sl2, ghat, gl2, group_closure, nonsplit_cartan, normal_closure, sl2, SubgroupGens,
    DEFAULT_CAP,
};
pub use log::log_map;
pub use mat::Mat2;
pub use ring::{FiniteRingSpec, RingElem, RingKind};
pub use subspace::{adjoint_closure, trace_subspaces, MatSubspace};
