pub mod calculus;
pub mod qalgebra;
pub mod report;
pub mod scalars;
pub mod spectral;
pub mod symmetries;
