use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::numerics::Precision;
use crate::windows::{DEFAULT_FREQ_SLEPIAN_BINS, DEFAULT_TIME_SLEPIAN_BINS};

/// The twelve bank structures plus the damped band-pass diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// 1: direct FIR DFT, rectangular window.
    DirectDft,
    /// 2: direct FIR DFT, Slepian time window.
    SlepianDft,
    /// 3: comb + resonators.
    Sdft,
    /// 4: comb + recursively generated modulator.
    RecursiveModulatedSdft,
    /// 5: comb + table modulator.
    TableModulatedSdft,
    /// 6: method 5 + frequency-domain Slepian window.
    SlepianModulatedSdft,
    /// 7: deadbeat observer, `B = K`.
    DeadbeatObserver,
    /// 8: band-limited observer, `B < K`.
    NonDeadbeatObserver,
    /// 9: fading comb + resonators.
    FadingSdft,
    /// 10: fading comb + table modulator.
    FadingModulatedSdft,
    /// 11: method 10 + Hann frequency window.
    HannFadingModulatedSdft,
    /// 12: damped resonators + mixing matrix.
    StabilizedSdft,
    /// Damped resonators with scalar gain, no mixing.
    BandPass,
}

impl Method {
    pub const ALL: [Method; 13] = [
        Method::DirectDft,
        Method::SlepianDft,
        Method::Sdft,
        Method::RecursiveModulatedSdft,
        Method::TableModulatedSdft,
        Method::SlepianModulatedSdft,
        Method::DeadbeatObserver,
        Method::NonDeadbeatObserver,
        Method::FadingSdft,
        Method::FadingModulatedSdft,
        Method::HannFadingModulatedSdft,
        Method::StabilizedSdft,
        Method::BandPass,
    ];

    /// Numeric label 1…12; the band-pass diagnostic is 0.
    pub fn id(self) -> u8 {
        match self {
            Method::BandPass => 0,
            other => Method::ALL.iter().position(|&m| m == other).unwrap() as u8 + 1,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            0 => Ok(Method::BandPass),
            1..=12 => Ok(Method::ALL[id as usize - 1]),
            _ => invalid(format!("method id must be 0..=12, got {id}")),
        }
    }

    pub fn is_observer(self) -> bool {
        matches!(self, Method::DeadbeatObserver | Method::NonDeadbeatObserver)
    }

    /// Uses the forgetting factor σ.
    pub fn is_fading(self) -> bool {
        matches!(
            self,
            Method::FadingSdft
                | Method::FadingModulatedSdft
                | Method::HannFadingModulatedSdft
                | Method::StabilizedSdft
                | Method::BandPass
        )
    }

    /// Finite impulse response for every bin.
    pub fn is_fir(self) -> bool {
        matches!(self.id(), 1..=7)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::BandPass => f.write_str("bandpass"),
            other => write!(f, "{}", other.id()),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "bandpass" | "bp" => Ok(Method::BandPass),
            _ => {
                let id: u8 = s
                    .strip_prefix('m')
                    .unwrap_or(&s)
                    .parse()
                    .map_err(|_| Error::Parse(format!("unknown method '{s}'")))?;
                if id == 0 {
                    return Err(Error::Parse("method ids start at 1".into()));
                }
                Method::from_id(id)
            }
        }
    }
}

/// Window choice carried by a [`MethodConfig`].
#[derive(Debug, Clone, PartialEq)]
pub enum WindowSpec {
    SlepianTime {
        f_delta: f64,
    },
    SlepianFreq {
        b_win: usize,
        f_delta: f64,
    },
    Hann,
    /// Raw `w̃(k)` for `k = -B_win…+B_win`.
    Custom(Vec<f64>),
}

impl WindowSpec {
    pub fn b_win(&self) -> usize {
        match self {
            WindowSpec::SlepianTime { .. } => 0,
            WindowSpec::SlepianFreq { b_win, .. } => *b_win,
            WindowSpec::Hann => 1,
            WindowSpec::Custom(c) => c.len() / 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WindowSpec::SlepianTime { .. } => "slepian_time",
            WindowSpec::SlepianFreq { .. } => "slepian_freq",
            WindowSpec::Hann => "hann",
            WindowSpec::Custom(_) => "custom",
        }
    }

    fn is_frequency_domain(&self) -> bool {
        !matches!(self, WindowSpec::SlepianTime { .. })
    }
}

/// Full description of one filter bank.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodConfig {
    pub method: Method,
    /// Largest measurable bin; `M = 2K + 1`.
    pub k: usize,
    /// Largest bin of interest.
    pub b: usize,
    /// Forgetting factor (per sample), fading methods only.
    pub sigma: Option<f64>,
    /// Prediction horizon; enables synthesis when set.
    pub l: Option<i64>,
    pub precision: Precision,
    pub window: Option<WindowSpec>,
    /// Condition bound used when designing the mixing matrix.
    pub condition_bound: f64,
}

impl MethodConfig {
    /// Config with the method's default window, horizon and forgetting factor.
    ///
    /// Fading methods default to `σ = -1/(2M)`, observers to `l = 1`.
    pub fn new(method: Method, k: usize, b: usize) -> Self {
        let m = (2 * k + 1) as f64;
        let window = match method {
            Method::SlepianDft => Some(WindowSpec::SlepianTime {
                f_delta: DEFAULT_TIME_SLEPIAN_BINS / m,
            }),
            Method::SlepianModulatedSdft => Some(WindowSpec::SlepianFreq {
                b_win: b.clamp(1, 2),
                f_delta: (DEFAULT_FREQ_SLEPIAN_BINS / m).min(0.5),
            }),
            Method::HannFadingModulatedSdft => Some(WindowSpec::Hann),
            _ => None,
        };
        Self {
            method,
            k,
            b,
            sigma: method.is_fading().then(|| -1.0 / (2.0 * m)),
            l: method.is_observer().then_some(1),
            precision: Precision::Double,
            window,
            condition_bound: crate::numerics::DEFAULT_CONDITION_BOUND,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn with_horizon(mut self, l: i64) -> Self {
        self.l = Some(l);
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn with_window(mut self, window: Option<WindowSpec>) -> Self {
        self.window = window;
        self
    }

    pub fn m(&self) -> usize {
        2 * self.k + 1
    }

    pub fn bins(&self) -> usize {
        2 * self.b + 1
    }

    pub fn b_win(&self) -> usize {
        self.window.as_ref().map_or(0, WindowSpec::b_win)
    }

    pub fn validate(&self) -> Result<()> {
        if self.b > self.k {
            return invalid(format!("B = {} must not exceed K = {}", self.b, self.k));
        }
        match self.method {
            Method::DeadbeatObserver if self.b != self.k => {
                return invalid("method 7 requires B = K (use method 8 for B < K)");
            }
            Method::NonDeadbeatObserver if self.b >= self.k => {
                return invalid("method 8 requires B < K (use method 7 for B = K)");
            }
            _ => {}
        }
        if self.method.is_observer() && !self.l.is_some_and(|l| l >= 1) {
            return invalid("observer methods need a prediction horizon l >= 1");
        }
        if self.method.is_fading() {
            match self.sigma {
                Some(s) if s < 0.0 && s.is_finite() => {}
                other => {
                    return invalid(format!(
                        "sigma must be negative for method {}, got {other:?}",
                        self.method
                    ))
                }
            }
        }
        if self.condition_bound.is_nan() || self.condition_bound <= 1.0 {
            return invalid("condition bound must exceed 1");
        }

        let expected = match self.method {
            Method::DirectDft => Some("none"),
            Method::SlepianDft => Some("slepian_time"),
            Method::SlepianModulatedSdft => Some("slepian_freq"),
            Method::HannFadingModulatedSdft => Some("hann"),
            _ => None,
        };
        match (expected, &self.window) {
            (Some("none"), Some(w)) => {
                return invalid(format!("method 1 takes no window, got {}", w.name()))
            }
            (Some("none"), None) => {}
            (Some(name), None) => {
                return invalid(format!("method {} needs a {name} window", self.method))
            }
            (Some(name), Some(w)) if w.name() != name => {
                return invalid(format!(
                    "method {} needs a {name} window, got {}",
                    self.method,
                    w.name()
                ));
            }
            (None, Some(w)) if !w.is_frequency_domain() => {
                return invalid(format!(
                    "method {} only accepts frequency-domain windows",
                    self.method
                ));
            }
            _ => {}
        }
        if let Some(w) = &self.window {
            if w.b_win() > self.b {
                return invalid(format!(
                    "B_win = {} must not exceed B = {}",
                    w.b_win(),
                    self.b
                ));
            }
            match w {
                WindowSpec::SlepianTime { f_delta } | WindowSpec::SlepianFreq { f_delta, .. }
                    if !(*f_delta > 0.0 && *f_delta <= 0.5) =>
                {
                    return invalid(format!("f_delta must lie in (0, 1/2], got {f_delta}"));
                }
                WindowSpec::SlepianFreq { b_win: 0, .. } => {
                    return invalid("B_win must be at least 1")
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Flat `key=value` lines.
    pub fn to_kv(&self) -> String {
        let mut out = format!("method={}\nK={}\nB={}\n", self.method, self.k, self.b);
        if let Some(s) = self.sigma {
            out += &format!("sigma={s:e}\n");
        }
        if let Some(l) = self.l {
            out += &format!("l={l}\n");
        }
        out += &format!("precision={}\n", self.precision);
        match &self.window {
            None => out += "window=none\n",
            Some(w) => {
                out += &format!("window={}\n", w.name());
                match w {
                    WindowSpec::SlepianTime { f_delta } => out += &format!("f_delta={f_delta:e}\n"),
                    WindowSpec::SlepianFreq { b_win, f_delta } => {
                        out += &format!("Bwin={b_win}\nf_delta={f_delta:e}\n")
                    }
                    WindowSpec::Hann => {}
                    WindowSpec::Custom(c) => {
                        let list: Vec<String> = c.iter().map(|v| format!("{v:e}")).collect();
                        out += &format!("custom={}\n", list.join(";"));
                    }
                }
            }
        }
        out += &format!("condition_bound={:e}\n", self.condition_bound);
        out
    }

    /// Parses the output of [`MethodConfig::to_kv`]; omitted keys take method defaults.
    pub fn from_kv(text: &str) -> Result<Self> {
        let pairs = parse_kv(text)?;
        let get = |key: &str| {
            pairs
                .iter()
                .rev()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
        };
        let num = |key: &str| -> Result<Option<f64>> {
            get(key)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("{key}: not a number '{v}'")))
                })
                .transpose()
        };
        let int = |key: &str| -> Result<Option<i64>> {
            get(key)
                .map(|v| {
                    v.parse::<i64>()
                        .map_err(|_| Error::Parse(format!("{key}: not an integer '{v}'")))
                })
                .transpose()
        };
        let method: Method = get("method")
            .ok_or_else(|| Error::Parse("missing 'method'".into()))?
            .parse()?;
        let k = int("K")?.ok_or_else(|| Error::Parse("missing 'K'".into()))?;
        let b = int("B")?.unwrap_or(k);
        if k < 0 || b < 0 {
            return Err(Error::Parse("K and B must be non-negative".into()));
        }
        let mut cfg = MethodConfig::new(method, k as usize, b as usize);
        if let Some(s) = num("sigma")? {
            cfg.sigma = Some(s);
        }
        if let Some(l) = int("l")? {
            cfg.l = Some(l);
        }
        if let Some(p) = get("precision") {
            cfg.precision = p.parse()?;
        }
        if let Some(c) = num("condition_bound")? {
            cfg.condition_bound = c;
        }
        let m = cfg.m() as f64;
        if let Some(w) = get("window") {
            cfg.window = match w {
                "none" => None,
                "hann" => Some(WindowSpec::Hann),
                "slepian_time" => Some(WindowSpec::SlepianTime {
                    f_delta: num("f_delta")?.unwrap_or(DEFAULT_TIME_SLEPIAN_BINS / m),
                }),
                "slepian_freq" => Some(WindowSpec::SlepianFreq {
                    b_win: int("Bwin")?.unwrap_or(cfg.b_win().max(1) as i64).max(0) as usize,
                    f_delta: num("f_delta")?.unwrap_or(DEFAULT_FREQ_SLEPIAN_BINS / m),
                }),
                "custom" => {
                    let list = get("custom")
                        .ok_or_else(|| Error::Parse("window=custom needs 'custom'".into()))?;
                    let coeffs = list
                        .split(';')
                        .map(|v| {
                            v.trim()
                                .parse::<f64>()
                                .map_err(|_| Error::Parse(format!("bad coefficient '{v}'")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Some(WindowSpec::Custom(coeffs))
                }
                other => return Err(Error::Parse(format!("unknown window '{other}'"))),
            };
        }
        Ok(cfg)
    }
}

/// Splits `key=value` lines, skipping blanks and `#` comments.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}
