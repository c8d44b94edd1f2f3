pub mod bandlimited;
pub mod experiments;
pub mod forms;
pub mod gauss;
pub mod quad;
pub mod spec;
