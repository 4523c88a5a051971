use crate::channel::{CapacityMatrix, NetworkDims};
use crate::error::{Error, Result};
use crate::sideinfo::SideInformation;

/// Everything a scheduler needs for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub dims: NetworkDims,
    pub capacities: CapacityMatrix,
    pub side_info: SideInformation,
    /// File size N in bits.
    pub file_size_bits: f64,
}

impl Instance {
    pub fn new(capacities: CapacityMatrix, side_info: SideInformation, file_size_bits: f64) -> Result<Self> {
        let dims = capacities.dims();
        if side_info.num_users() != dims.num_users || side_info.num_files() != dims.num_files {
            return Err(Error::MissingData(
                "side information does not match capacity dimensions".into(),
            ));
        }
        if !file_size_bits.is_finite() || file_size_bits <= 0.0 {
            return Err(Error::Domain(format!(
                "file size must be positive, got {file_size_bits}"
            )));
        }
        Ok(Self {
            dims,
            capacities,
            side_info,
            file_size_bits,
        })
    }

    pub fn with_file_size(&self, file_size_bits: f64) -> Result<Self> {
        Self::new(self.capacities.clone(), self.side_info.clone(), file_size_bits)
    }
}
