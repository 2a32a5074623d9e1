pub mod arcshape;
pub mod cascade;
pub mod envelope;
pub mod profile;
pub mod store;
