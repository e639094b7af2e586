pub mod bicomplex;
pub mod check;
pub mod cli;
pub mod definition;
pub mod expr;
pub mod flow;
pub mod lax;
pub mod matrix;
pub mod multifield;
pub mod nijenhuis;
pub mod random;
pub mod symcheck;
