//! A desk-scale laboratory for the 3SUM-Indexing data structure problem.
//!
//! The crate builds instances over finite abelian groups, compiles two
//! combinatorial source problems (reachability oracles in butterfly graphs,
//! blocked lopsided set disjointness) into instance/query encoders, realizes
//! the adversarial input distributions and bit-probe audits used in
//! information-theoretic arguments, and runs preprocessing-adversary
//! experiments against an immunized random-oracle one-way function. Every
//! construction is checkable against a brute-force oracle.

pub mod adversary;
pub mod bitprobe;
pub mod butterfly;
pub mod cellprobe;
pub mod codec;
pub mod error;
pub mod group;
pub mod inversion;
pub mod lsd;
pub mod owf;
pub mod tsum;

pub use error::{Error, Result};
pub use group::{GroupElement, GroupSpec};
pub use tsum::TsumInstance;
