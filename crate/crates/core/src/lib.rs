//! Max-distance sparsifiers of implicitly given solution domains, and exact
//! solvers for diversification and clustering built on them.

pub mod bruteforce;
pub mod cli;
pub mod domains;
pub mod error;
pub mod instance;
pub mod limited;
pub mod mask;
pub mod oracle;
pub mod report;
pub mod small;
pub mod solvers;

pub use error::{Error, Result};
pub use mask::{hamming, modified_hamming, GroundSet, SetFamily, SubsetMask, WeightVector};
pub use oracle::{DomainOracle, ExtensionOutcome, ExtensionQuery, SparsifyContext};
pub use report::{SparsifierMode, SparsifierReport};
