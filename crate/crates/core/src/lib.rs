//! Causal discovery with latent variables and selection bias.
//!
//! The crate recovers a partially oriented inducing path graph (POIPG) from
//! conditional-independence answers, reads causal claims off it, and checks
//! those claims exhaustively against small DAG families.

pub mod ci;
pub mod error;
pub mod fci;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod query;
pub mod separation;
pub mod simulate;
pub mod verify;

pub use ci::{CiSet, CiStatement};
pub use error::{Error, Result};
pub use fci::{fci, fci_from_dag, ConflictPolicy, FciConfig, FciEvent, FciResult, FciTrace, SepsetTable};
pub use graph::{Dag, DagBuilder, EndpointMark, MixedGraph, Path, Poipg, Role, Variable, VertexSet};
pub use oracle::{
    caching_oracle, data_oracle, graphical_oracle, table_oracle, CachingOracle, CiOracle, DataOracle,
    Dataset, GraphicalOracle, Independence, InsufficientPolicy, TableOracle,
};
pub use query::{CausalClaim, ClaimKind};
pub use separation::{
    d_separated, exists_inducing_path, inducing_path_orientations, is_inducing_path, observable_ci_set,
    observable_independent, InducingPathOrientation,
};
pub use simulate::{random_dag, DiscreteNetwork};
pub use verify::{
    enumerate_dags, equiv_members, verify_poipg, EdgeConstraint, EnumBounds, VerificationReport,
};
