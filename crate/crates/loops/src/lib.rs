pub mod numeric;
pub mod cmatrix;
pub mod quad;
pub mod paths;
pub mod surfaces;
pub mod fock;
pub mod suquot;

pub use numeric::Real;

/// default scalar for the numerical layer
pub type DefaultReal = f64;
