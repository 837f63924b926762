//! Streaming lossless graph summarization.
//!
//! A [`Summary`] holds a partition of the nodes into supernodes, a set of
//! superedges, and the edge corrections `C+`/`C-` from which the current
//! graph is recovered exactly. The [`summarizer`] module drives it from a
//! fully dynamic edge stream, relocating nodes between supernodes whenever
//! that does not grow the representation.

pub mod cluster;
pub mod error;
pub mod oracle;
pub mod sampling;
pub mod snapshot;
pub mod stream;
pub mod summarizer;
pub mod summary;
pub mod types;

pub use cluster::ClusterIndex;
pub use error::{SnapshotError, StreamError, SummaryError};
pub use oracle::ExactGraph;
pub use sampling::{get_random_neighbor, SamplerChain, SamplerStats};
pub use summarizer::{Algorithm, RunConfig, Summarizer, TrialOutcome};
pub use summary::{encode_pair, EncodingDecision, FxIndexSet, Summary};
pub use types::{Destination, EventKind, NodeId, StreamEvent, SupernodeId};
