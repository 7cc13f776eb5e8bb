use std::fmt;

use anyhow::{bail, Result};
use recursive_dft::{Method, MethodConfig, Precision};

use crate::signal::NoiseKind;

/// Methods reported in the published error table.
pub const TABLE1_METHODS: [Method; 8] = [
    Method::DirectDft,
    Method::Sdft,
    Method::RecursiveModulatedSdft,
    Method::TableModulatedSdft,
    Method::NonDeadbeatObserver,
    Method::FadingSdft,
    Method::FadingModulatedSdft,
    Method::StabilizedSdft,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Table1,
    Detection,
    ResponseDump,
    ImpulseDump,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Table1 => "table1",
            ScenarioKind::Detection => "detection",
            ScenarioKind::ResponseDump => "freq_response",
            ScenarioKind::ImpulseDump => "impulse_response",
        })
    }
}

/// One experiment: bank parameters shared by every listed method plus the
/// stimulus description.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub k: usize,
    pub b: usize,
    /// Overrides the per-method default forgetting factor.
    pub sigma: Option<f64>,
    /// Overrides the observer horizon.
    pub l: Option<i64>,
    pub methods: Vec<Method>,
    pub precision: Precision,
    pub segments: usize,
    pub segment_length: u64,
    pub noise: NoiseKind,
    pub seed: u64,
    pub probe_bin: isize,
}

impl Scenario {
    /// Table 1 parameters: `K = 64`, `B = 32`, probe bin 16, ten segments of 10⁶.
    pub fn table1() -> Self {
        Self {
            kind: ScenarioKind::Table1,
            k: 64,
            b: 32,
            sigma: None,
            l: None,
            methods: TABLE1_METHODS.to_vec(),
            precision: Precision::Single,
            segments: 2,
            segment_length: 1_000_000,
            noise: NoiseKind::None,
            seed: 1,
            probe_bin: 16,
        }
    }

    /// CI-sized variant: segments of 10⁵.
    pub fn quick(mut self) -> Self {
        self.segment_length = 100_000;
        self.segments = 2;
        self
    }

    pub fn m(&self) -> usize {
        2 * self.k + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            bail!("no methods selected");
        }
        if self.segment_length < self.m() as u64 {
            bail!(
                "segment length {} is shorter than M = {}",
                self.segment_length,
                self.m()
            );
        }
        if self.segments == 0 {
            bail!("need at least one segment");
        }
        if self.b > self.k {
            bail!("B = {} must not exceed K = {}", self.b, self.k);
        }
        if self.probe_bin.unsigned_abs() > self.b {
            bail!("probe bin {} outside -B..=B", self.probe_bin);
        }
        for &m in &self.methods {
            self.method_config(m)?.validate()?;
        }
        Ok(())
    }

    /// Bank config for `method`. Method 7 always uses the full band `B = K`.
    pub fn method_config(&self, method: Method) -> Result<MethodConfig> {
        let b = if method == Method::DeadbeatObserver {
            self.k
        } else {
            self.b
        };
        let mut c = MethodConfig::new(method, self.k, b).with_precision(self.precision);
        if let (Some(s), true) = (self.sigma, method.is_fading()) {
            c = c.with_sigma(s);
        }
        if let (Some(l), true) = (self.l, method.is_observer()) {
            c = c.with_horizon(l);
        }
        if method == Method::NonDeadbeatObserver && b >= self.k {
            bail!("method 8 needs B < K");
        }
        Ok(c)
    }

    pub fn total_samples(&self) -> u64 {
        self.segments as u64 * self.segment_length
    }
}

/// Parses `1,3,5`, `m12`, `bandpass` or `all`.
pub fn parse_methods(s: &str) -> Result<Vec<Method>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(Method::ALL[..12].to_vec());
    }
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.parse::<Method>().map_err(anyhow::Error::from))
        .collect()
}

/// `<scenario>_<method>_<precision>.csv`
pub fn output_name(scenario: &str, method: &str, precision: Precision) -> String {
    format!("{scenario}_{method}_{precision}.csv")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn methods_parse() {
        assert_eq!(
            parse_methods("1, 3,m12").unwrap(),
            vec![Method::DirectDft, Method::Sdft, Method::StabilizedSdft]
        );
        assert_eq!(parse_methods("all").unwrap().len(), 12);
        assert!(parse_methods("13").is_err());
    }

    #[test]
    fn deadbeat_uses_full_band() {
        let s = Scenario::table1();
        assert_eq!(s.method_config(Method::DeadbeatObserver).unwrap().b, 64);
        assert_eq!(s.method_config(Method::NonDeadbeatObserver).unwrap().b, 32);
        s.validate().unwrap();
    }

    #[test]
    fn short_segments_rejected() {
        let mut s = Scenario::table1();
        s.segment_length = 10;
        assert!(s.validate().is_err());
        s.segment_length = 1000;
        s.methods.clear();
        assert!(s.validate().is_err());
    }

    #[test]
    fn names() {
        assert_eq!(
            output_name("table1", "3", Precision::Single),
            "table1_3_single.csv"
        );
    }
}
