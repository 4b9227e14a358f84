//! Digit expansions in linearly recurrent numeration systems, and exact
//! desk-scale computation of the Gowers-type cube sums
//!
//! ```text
//! G_λ^{-(s+1)} Σ_{n_0,…,n_s < G_λ} Π_{ε ∈ {0,1}^s} C^{|ε|} e(θ s_{G,λ}(n_0 + Σ ε_i n_i))
//! ```
//!
//! together with probes of the carry behaviour and of the block-refinement
//! machinery that controls how fast these sums decay.
//!
//! - [`numsys`]: systems, greedy expansion, digit sums, dominant root.
//! - [`carrylab`]: empirical carry radii and the carry-separation identity.
//! - [`cubesum`]: cube sums (naive enumeration and a base-`b` carry DP), decay scans.
//! - [`proofkit`]: class sums, refinement, class counts, cancellation pairs.

pub mod carrylab;
pub mod cubesum;
pub mod exec;
pub mod numsys;
pub mod proofkit;
pub mod report;

pub use exec::Execution;
pub use report::{Num, Report};
pub use numsys::{Digit, DigitString, NumerationSystem, RootProfile, SystemError, SystemFile, Truncation};
