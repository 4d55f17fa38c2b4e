#![allow(clippy::needless_range_loop)]

pub mod check;
pub mod corpus;
pub mod covers;
pub mod dimension;
pub mod extension;
pub mod hyperbolic;
pub mod metric;
pub mod nerve;
pub mod scalar;
pub mod sphere_ext;
