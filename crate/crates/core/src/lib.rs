pub mod certify;
pub mod cli;
pub mod distinct;
pub mod expr;
pub mod interval;
