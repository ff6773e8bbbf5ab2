//! Lattice renormings of C0(X) at finite sampling resolution.
//!
//! The crate models a locally compact space by a finite sample, represents
//! lattice isomorphisms as weighted compositions, and builds the renorming
//! whose isometry group is a prescribed group `G`: tuple enumeration and the
//! weight maps `b`, `c`, the seminorms `rho_t`, the new norm with a certified
//! truncation bound, dual norms of atoms through triangular solves, and an
//! isometry detector. Bounded (non-isometric) groups are handled by the
//! extremal weight `m_G`.

pub mod bounded;
pub mod cli;
pub mod detector;
pub mod error;
pub mod functions;
pub mod gallery;
pub mod norm;
pub mod operators;
pub mod orbits;
pub mod space;
pub mod tuples;
