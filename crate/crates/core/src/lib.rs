//! Online orientation and bipartite b-matching with bounded recourse.
//!
//! The crate maintains edge orientations of growing graphs under an in-degree
//! constraint (shortest-path flipping for forests, all-flip cascades for
//! bounded arboricity), matches arriving left nodes by shortest augmenting
//! paths, and ships adaptive adversaries, brute-force oracles and trace
//! verification to check the recourse bounds of each algorithm.

pub mod adversary;
pub mod allflip;
pub mod bmatch;
pub mod bounds;
pub mod dot;
pub mod error;
pub mod format;
pub mod gen;
pub mod graph;
pub mod oracle;
pub mod orient_sp;
pub mod step;
pub mod union_find;

pub use adversary::{Adversary, IdAllocation, OrientationDriver, Recording};
pub use allflip::{AllFlipConfig, AllFlipOrienter, InitialOrientation};
pub use bmatch::{BMatchConfig, BMatchState, HeightReport, PickPolicy};
pub use error::{Error, ErrorClass, Result};
pub use format::{SequenceFile, TraceFile, TraceHeader, TraceSummary, Verdict};
pub use graph::{EdgeId, NodeId, OrientationState, OrientedEdge, PathToUnsaturated};
pub use oracle::{OracleMode, OracleReport, Witness};
pub use orient_sp::{
    FixingOrienter, GreedyOrienter, PathTiePolicy, ShortestPathOrienter, SpConfig,
    UnsaturatedTiePolicy,
};
pub use step::StepRecord;
