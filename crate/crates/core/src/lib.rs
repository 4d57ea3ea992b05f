//! Quantum-style semantic analysis of keyword pairs in short documents.
//!
//! Documents are tokenized and stemmed ([`preprocess`]), turned into
//! Hyperspace Analogue to Language co-occurrence matrices ([`hal`]), and each
//! keyword pair is scored twice ([`semspace`]): by the cosine of the keyword
//! vectors and by the Born-rule expectation of two Pauli-type operators on
//! the projected document state. [`report`] sweeps window lengths and writes
//! CSV/SVG, [`query`] selects sub-corpora and [`cli`] wires it together.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod hal;
pub mod preprocess;
pub mod query;
pub mod report;
pub mod semspace;

pub use error::{Error, Result};
