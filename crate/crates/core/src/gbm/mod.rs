//! Gradient-boosted regression trees for binary classification with
//! feature-selection, interaction and monotonicity constraints.

mod model;
mod params;
mod tree;

pub use model::{fit, sigmoid, BoostedModel, GbmError};
pub use params::{HyperparamConfig, ParamSpec, SEARCH_SPACE};
pub use tree::TreeNode;
