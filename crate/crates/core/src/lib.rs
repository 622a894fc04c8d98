//! State-sum invariants of link, linkoid and knotoid diagrams.
//!
//! A diagram is stored as an oriented combinatorial map ([`diagram`]), decorated
//! with stars ([`stars`]). Invariants are computed either by enumerating states
//! ([`statesum`]) or as permanents of a crossing-by-region matrix ([`matrix`]),
//! over an exact Laurent-polynomial ring ([`poly`]).

pub mod diagram;
pub mod invariants;
pub mod stars;
pub mod matrix;
pub mod moves;
pub mod par;
pub mod planar;
pub mod statesum;
pub mod poly;

/// Shared error type for diagram construction and surgery.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("diagram: {0}")]
    Diagram(String),
    #[error("stars: {0}")]
    Stars(String),
    #[error("move: {0}")]
    Move(String),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
