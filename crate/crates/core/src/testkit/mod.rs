pub mod check;
pub mod gen;
pub mod engines;
