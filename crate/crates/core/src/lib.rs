//! Random permutations, RSK shapes, descent processes and their limit laws.

pub mod coupling;
pub mod descent;
pub mod error;
pub mod harness;
pub mod limits;
pub mod linalg;
pub mod perm;
pub mod rng;
pub mod rsk;
pub mod samplers;

pub use error::{Error, Result};
pub use perm::{CycleDecomposition, DescentSet, Permutation};
pub use rng::RngStream;
pub use rsk::{rsk_shape, HeightFunction, YoungDiagram};
pub use samplers::{Distribution, GenEwensParams, PermutationSampler, Sampler, StickVector};
