//! Maximum-likelihood detection of a contagion source from a single
//! snapshot of infected nodes under the SI model with unit-rate
//! exponential edge delays.
//!
//! * [`graph`]: graphs, snapshots, rumor boundary and closure, rooted views.
//! * [`sim`]: event-driven SI spreading and a Monte-Carlo likelihood oracle.
//! * [`likelihood`]: leaf probabilities, message passing on trees, exact
//!   convolution-based likelihoods and closed forms.
//! * [`starlike`]: starlike-tree approximation for general graphs and the
//!   top-level [`starlike::detect_source`].
//! * [`baselines`]: rumor centrality, Jordan center, distance center.
//! * [`bench`]: graph generators and the experiment runner.

pub mod baselines;
pub mod bench;
pub mod error;
pub mod graph;
pub mod likelihood;
pub mod sim;
pub mod starlike;

pub use error::{Error, Result};
pub use graph::{Graph, RumorSnapshot};
pub use likelihood::{LogLikelihood, QuadratureConfig};
pub use starlike::{detect_source, DetectionResult, Method};
