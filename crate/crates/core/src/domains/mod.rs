//! Concrete solution domains.

pub mod dagdp;
pub mod explicit;
mod flow;
pub mod graph;
pub mod matching;
pub mod matroid;
pub mod mincut;
pub mod union;
pub mod vertex_cover;

pub use dagdp::{dagdp_oracle, DagDpInstance, DagDpOracle};
pub use explicit::{explicit_oracle, ExplicitOracle};
pub use graph::GraphData;
pub use matching::{matching_oracle, MatchingOracle};
pub use matroid::{matroid_base_oracle, MatroidBaseOracle, MatroidSpec};
pub use mincut::{mincut_oracle, MinCutOracle, MinCutPoset};
pub use union::{is_trivial_sparsifier, union_oracle, UnionOracle};
pub use vertex_cover::{vertex_cover_oracle, VertexCoverOracle};
