pub mod classify;
pub mod connection;
pub mod context;
pub mod error;
pub mod hyperseries;
pub mod mat2;
pub mod specfun;
pub mod system;
pub mod verify;

pub use context::{Annulus, QContext};
pub use error::{Error, Result};
pub use mat2::Mat2;
