pub mod error;
pub mod geometry;
pub mod jet;
pub mod oracles;
pub mod orthobasis;
pub mod kernel;
pub mod repcoord;
pub mod checks;
pub mod cli;
