pub mod engine;
pub mod reduce;
pub mod tree;
pub mod nest;
