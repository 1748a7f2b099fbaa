//! Reference computations kept apart from the main crate so the tests can
//! check it against code that shares none of its implementation.

pub mod grid;
pub mod lobpcg;
pub mod rates;
