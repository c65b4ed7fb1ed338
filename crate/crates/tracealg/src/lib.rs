//! Exact computation with trace polynomials evaluated on n×n matrices.

pub mod scalar_poly;
pub mod syntax;
pub mod generic_eval;
pub mod identities;
pub mod positivity;
pub mod ps3;
pub mod reynolds;
pub mod trace_ring;
