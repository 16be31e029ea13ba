//! Random subshifts of finite type.
//!
//! Edge shifts of 0/1 directed graphs, the random subshift obtained by
//! keeping each edge independently with probability `alpha`, and the limit
//! laws that random subshift follows along a sequence of presentations
//! (typically the higher block graphs of one shift).
//!
//! ```
//! use rsft::{graph::Graph, limits::zeta_inverse};
//!
//! let g = Graph::full(2);
//! assert!((zeta_inverse(&g, 0.3).unwrap() - 0.4).abs() < 1e-12);
//! ```

pub mod error;
pub mod exec;
pub mod graph;
pub mod harness;
pub mod invariants;
pub mod limits;
pub mod random;
pub mod spectral;

pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::Graph;
