pub mod blocks;
pub mod couette;
pub mod error;
pub mod harness;
pub mod integrate;
pub mod mat2;
pub mod operators;
pub mod profile;
pub mod rates;
pub mod shear;
pub mod spectral;
pub mod weights;
pub mod zeromode;

pub use error::{Error, Result};
pub use operators::OperatorMatrix;
pub use profile::{ProfileShape, ProfileSpectrum};
pub use spectral::{FlowState, FrequencyGrid, SobolevSpec, SpectralField, ThirdField, C64};
pub use rates::RateFit;
pub use shear::EnergyReport;
pub use weights::{WeightEval, WeightParams};
pub use zeromode::ZeroModeState;
