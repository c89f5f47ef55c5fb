pub use khr_core;
