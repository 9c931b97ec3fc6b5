pub mod acceptance;
pub mod adversary;
pub mod connectivity;
pub mod error;
pub mod io;
pub mod sampling;
pub mod signal;
pub mod spectral;
mod twiddle;

pub use error::{Error, Result};
pub use signal::{ComplexTable, CyclicSignal, LineSignal, SpectrogramMeasurement, C64};
pub use twiddle::root_of_unity;
pub mod recovery;
pub mod window;
