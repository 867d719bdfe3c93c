//! Catalog constructors under the short names the unit tests use.

pub use crate::catalog::{
    cz_calculus, group_algebra as group_hopf, pair, suq2, suq2_calculus, torus,
    torus_calculus_with as torus_calculus, u1, u1_calculus,
};
