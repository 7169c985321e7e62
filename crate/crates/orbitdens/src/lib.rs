//! Density behavior of weighted backward shift orbits and translation
//! semigroups: exact rational densities of geometric index families,
//! log-domain orbit norms, regime classification, and the continuous-time
//! bridge for step data.

pub mod bitset;
pub mod density;
pub mod error;
pub mod ratio;

pub use bitset::BitSet;
pub use density::{
    complement_density, empirical_density, extract_density_one_subset, AffineForm,
    DensityEstimate, DensityKind, ExtractMode, GeomIntervalFamily, IndexSet, Schema,
};
pub use error::{Error, Result};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating scalar used by the log-domain norm layer. Exact computations use
/// rationals regardless of the instantiation.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + std::fmt::Debug
        + std::fmt::Display
        + Send
        + Sync
        + 'static
{
}
