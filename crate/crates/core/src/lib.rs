pub mod ball;
pub mod diagram;
pub mod filling;
pub mod flow;
pub mod format;
pub mod presets;
pub mod quarter;
pub mod rewrite;
pub mod suite;
pub mod tameness;
pub mod words;
