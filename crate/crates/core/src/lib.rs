//! Explicit-state model checking of browser certificate-validation ceremonies.

pub mod harness;
pub mod kernel;
pub mod ltl;
pub mod models;
pub mod statespace;
