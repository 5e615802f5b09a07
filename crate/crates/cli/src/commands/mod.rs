pub mod check;
pub mod erf;
pub mod flops;
pub mod forward;
pub mod info;
pub mod train;
