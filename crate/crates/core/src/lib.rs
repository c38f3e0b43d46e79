//! Censuses of cyclic, abelian and nilpotent numbers inside Beatty
//! sequences ⌊αn + β⌋, with exact quadratic-irrational arithmetic and a
//! suite of executable analytic diagnostics.
//!
//! An integer n is a cyclic (abelian, nilpotent) number when every group
//! of order n is cyclic (abelian, nilpotent); arithmetically these are
//! the conditions gcd(n, φ(n)) = 1, cubefree with gcd(n, F(n)) = 1, and
//! gcd(n, F(n)) = 1, where F(p^a) = (p^a-1)(p^{a-1}-1)···(p-1) extended
//! multiplicatively. Their counting functions restricted to a Beatty
//! sequence with irrational slope α > 1 track the unrestricted ones with
//! density 1/α, and the census here measures that convergence exactly.
//!
//! Modules:
//! - [`arith`]: factorization sieve, the three predicates, a big-integer oracle
//! - [`beatty`]: exact membership/enumeration, continued fractions, ‖αn‖
//! - [`census`]: segmented parallel counting with checkpoints and resume
//! - [`analytic`]: constants, Mertens diagnostics, rough counts, series evaluators
//! - [`expsum`]: Erdős–Turán, exponential-sum, min-sum, Vaaler and divisor diagnostics
//! - [`cli`]: the `beatty-census` command-line front end

pub mod analytic;
pub mod arith;
pub mod beatty;
pub mod census;
pub mod cli;
pub mod error;
pub mod expsum;
mod numeric;
mod sieve;

pub use error::{Error, Result};
