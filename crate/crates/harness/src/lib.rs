//! Experiment drivers for the recursive DFT filter banks: error measurement
//! against a noise-free double-precision reference, a two-tone detection
//! run, and response dumps.

pub mod detection;
pub mod dumps;
pub mod scenario;
pub mod signal;
pub mod table1;

pub use detection::{run_detection, DetectionRow};
pub use dumps::{run_impulse_dump, run_response_dump};
pub use scenario::{output_name, parse_methods, Scenario, ScenarioKind, TABLE1_METHODS};
pub use signal::{add_noise, NoiseGen, NoiseKind, ToneSignal};
pub use table1::{run_table1, ErrorReport, MethodReport};
