pub mod algebra;
pub mod cli;
pub mod discs;
pub mod geometry;
pub mod images;
pub mod parser;
pub mod quadratic;
