//! Frequency- and impulse-response dumps.

use anyhow::Result;
use num_complex::Complex64;
use rayon::prelude::*;
use recursive_dft::response::{
    analytic_response, empirical_response, impulse_response, linear_grid, ResponseCurve,
};
use recursive_dft::Method;

use crate::scenario::{Scenario, ScenarioKind};

/// Fig. 2 parameters: `K = 8`, `B = 4`, bin 2.
pub fn response_scenario(methods: Vec<Method>) -> Scenario {
    Scenario {
        kind: ScenarioKind::ResponseDump,
        k: 8,
        b: 4,
        methods,
        segments: 1,
        segment_length: 17,
        probe_bin: 2,
        precision: recursive_dft::Precision::Double,
        ..Scenario::table1()
    }
}

/// Fig. 3 parameters: `K = 64`, `σ = -1/M`, bin 2.
pub fn impulse_scenario(methods: Vec<Method>) -> Scenario {
    Scenario {
        kind: ScenarioKind::ImpulseDump,
        k: 64,
        b: 32,
        sigma: Some(-1.0 / 129.0),
        methods,
        segments: 1,
        segment_length: 129,
        probe_bin: 2,
        precision: recursive_dft::Precision::Double,
        ..Scenario::table1()
    }
}

/// Analytic response for open-loop methods, measured response for observers.
pub fn run_response_dump(
    scenario: &Scenario,
    points: usize,
    settle: u64,
) -> Result<Vec<ResponseCurve>> {
    scenario.validate()?;
    let grid = linear_grid(-0.5, 0.5, points);
    scenario
        .methods
        .par_iter()
        .map(|&method| {
            let config = scenario.method_config(method)?;
            Ok(if method.is_observer() {
                empirical_response(&config, scenario.probe_bin, &grid, settle)?
            } else {
                analytic_response(&config, scenario.probe_bin, &grid)?
            })
        })
        .collect()
}

/// Impulse response of the probe bin for each method, `len` samples.
pub fn run_impulse_dump(scenario: &Scenario, len: usize) -> Result<Vec<(Method, Vec<Complex64>)>> {
    scenario.validate()?;
    scenario
        .methods
        .iter()
        .map(|&method| {
            let config = scenario.method_config(method)?;
            Ok((method, impulse_response(&config, scenario.probe_bin, len)?))
        })
        .collect()
}
