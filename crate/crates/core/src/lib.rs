pub mod chain;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod exponent;
pub mod lorentz;
pub mod matrix;
pub mod norms;
pub mod nuclear;
pub mod random;
pub mod schatten;
pub mod serde_ext;
pub mod spectral;
pub mod svd;
pub mod verdict;

pub use error::{Error, Result};
