//! Brute-force verification engines.
//!
//! [`grid`] evolves a gridded continuous meter exactly, [`tensor`]
//! exponentiates the coupling on a finite product space, and [`mc`] draws
//! individual measurement records.

pub mod grid;
pub mod mc;
pub mod tensor;

pub use grid::{
    grid_pointer_distribution, grid_pps_average, GridMeterState, Readout, DEFAULT_GRID_SIZE,
    DEFAULT_SPAN,
};
pub use mc::{
    mc_records, mc_sample, mc_sample_partitioned, McMeter, McStatistics, SampleRecord, MC_BLOCK,
};
pub use tensor::{tensor_pointer_distribution, tensor_pps_average, MAX_PRODUCT_DIM};

use crate::error::{Error, Result};
use crate::quantum_core::{DensityMatrix, Observable, PovmElement};

/// Preselected state, measured observable and post-selection element.
#[derive(Debug, Clone, PartialEq)]
pub struct PpsSystem {
    pub rho: DensityMatrix,
    pub a: Observable,
    pub e: PovmElement,
}

impl PpsSystem {
    pub fn new(rho: DensityMatrix, a: Observable, e: PovmElement) -> Result<Self> {
        let d = rho.dim();
        for found in [a.dim(), e.dim()] {
            if found != d {
                return Err(Error::DimensionMismatch { expected: d, found });
            }
        }
        Ok(Self { rho, a, e })
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }
}
