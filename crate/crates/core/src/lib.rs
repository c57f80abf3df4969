//! Quantum convolutional neural networks for jet-image classification.
//!
//! The crate covers the full study pipeline: jet preprocessing into
//! energy-fraction images ([`jetprep`]), PCA compression ([`pca`]), an exact
//! statevector simulator ([`statevec`]), the four-qubit QCNN ([`circuits`]),
//! dimensional expressivity pruning ([`dea`]), a parameter-matched classical
//! CNN ([`cnn`]) and the shared training loop ([`learn`]).

pub mod circuits;
pub mod cnn;
pub mod data;
pub mod dea;
pub mod error;
pub mod formats;
pub mod jetprep;
pub mod learn;
pub mod pca;
pub mod statevec;

pub use error::{Error, Result};
