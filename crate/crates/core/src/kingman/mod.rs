//! The discrete Kingman merge chain on `n` labelled vertices.
//!
//! At step `i` the forest holds `n + 1 - i` trees, indexed by increasing
//! smallest label. A uniform pair `{a, b}` of indices is merged and a fair
//! coin orients the new edge: coin 1 makes the root of tree `a` the parent
//! (it *favours* tree `a`), coin 0 makes the root of tree `b` the parent.

mod dsu;
mod events;
mod fast;
mod forest;
mod replay;
mod selection;

pub use dsu::SelectionCounter;
pub use events::{sample_events, sample_taus, tau_k, CoalescentEvents, EventStream, Step};
pub use fast::{fast_degree_sample, fast_selection_sample, FastCoalescent, SelectionSample};
pub use replay::{replay, LabelledOutcome};
pub use selection::{selection_records, SelectionRecord};
