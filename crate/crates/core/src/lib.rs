pub mod lattice;
pub mod orbit_space;
pub mod classify;
pub mod biquotient;
pub mod census;
