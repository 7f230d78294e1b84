//! Constant-term proofs of binomial-sum congruences modulo primes.
//!
//! * [`modarith`]: residues, Lucas' theorem, factorial decompositions.
//! * [`laurent`]: sparse multivariate Laurent polynomials with exact division.
//! * [`ctengine`]: the symbolic constant-term pipeline for sums up to `r·p^a`.
//! * [`families`]: the sequence families and brute-force oracles.
//! * [`classify`]: case-table discovery, audits of printed tables, conjecture checks.

pub mod classify;
pub mod ctengine;
pub mod families;
pub mod laurent;
pub mod modarith;

pub use ctengine::{extract, KernelSpec, PeriodicSeries, SymIndex, SymPoly};
pub use families::{oracle_sum, FamilyId, FamilySpec};
pub use laurent::{LaurentPoly, Ring};
pub use modarith::{Prime, SymResidue};
