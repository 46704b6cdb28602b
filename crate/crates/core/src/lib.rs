pub mod geometry;
pub mod mesh;
pub mod network;
pub mod space;
pub mod solver;
pub mod sparse;
pub mod assembly;
pub mod verification;
