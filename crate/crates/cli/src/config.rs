//! Flat `key = value` scenario configuration.
//!
//! Every physical key defaults to the shared plotting set (two-soliton,
//! ν0 = 3, Δ = 0, Ω0 = 1, λ0 = 2i, c = (1, 1, 1)). The manifest written by a
//! run parses back to the identical configuration.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use lambda_mb::analytic::{Constants, Scenario, ScenarioParams};
use lambda_mb::darboux::{map_constants, unmap_constants, DressConstants, SeedMedium, SolitonConstants};
use lambda_mb::mbsolver::GridSpec;
use lambda_mb::model::{LambdaParams, SpectralData};
use lambda_mb::verify::probe_lambdas;
use lambda_mb::algebra::C64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("ParseError at line {line}, column {column}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Analytic,
    Dressing,
    Numeric,
    All,
}

impl Engine {
    pub const NAMES: [&'static str; 4] = ["analytic", "dressing", "numeric", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Dressing => "dressing",
            Engine::Numeric => "numeric",
            Engine::All => "all",
        }
    }

    pub fn from_name(s: &str) -> Option<Engine> {
        match s {
            "analytic" => Some(Engine::Analytic),
            "dressing" => Some(Engine::Dressing),
            "numeric" => Some(Engine::Numeric),
            "all" => Some(Engine::All),
            _ => None,
        }
    }

    /// Does this selection run `single` (which must not be `All`)?
    pub fn runs(self, single: Engine) -> bool {
        self == Engine::All || self == single
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// dressing vs closed form, max abs
    pub oracle: f64,
    pub audit: f64,
    /// numeric vs closed form, sup-norm relative field error
    pub numeric: f64,
    /// allowed |order - 2| for residual convergence
    pub order_band: f64,
    /// residuals at or below this count as exact (order undefined)
    pub exact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            oracle: 1e-9,
            audit: 1e-8,
            numeric: 1e-3,
            order_band: 0.2,
            exact: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub params: LambdaParams,
    pub eps0: f64,
    pub constants: Constants,
    pub medium: SeedMedium,
    pub grid: GridSpec,
    pub engine: Engine,
    pub out: PathBuf,
    pub probes: Vec<C64>,
    pub tol: Tolerances,
    /// The numeric engine marches on a grid refined by these integer
    /// factors and reports the nodes of `grid`.
    pub substeps: (usize, usize),
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: Scenario::TwoSoliton,
            params: LambdaParams::default(),
            eps0: 2.0,
            constants: Constants::Dress(DressConstants { c1: 1.0, c2: 1.0, c3: 1.0 }),
            medium: SeedMedium::Positive,
            grid: GridSpec {
                tau_min: -20.0,
                tau_max: 20.0,
                n_tau: 201,
                zeta_min: 0.0,
                zeta_max: 8.0,
                n_zeta: 201,
            },
            engine: Engine::Analytic,
            out: PathBuf::from("out"),
            probes: probe_lambdas().to_vec(),
            tol: Tolerances::default(),
            substeps: (10, 4),
        }
    }
}

impl ScenarioConfig {
    pub fn spectral(&self) -> lambda_mb::Result<SpectralData> {
        SpectralData::new(self.eps0, self.params.omega0)
    }

    pub fn scenario_params(&self) -> lambda_mb::Result<ScenarioParams> {
        ScenarioParams::new(self.params, self.spectral()?, self.constants, self.scenario)
    }

    /// All inputs as `key = value` lines, with the constant conventions
    /// spelled out in comments.
    pub fn to_manifest(&self) -> String {
        let mut m = String::new();
        let p = &self.params;
        let g = &self.grid;
        let _ = writeln!(m, "# lambda-mb run manifest");
        let _ = writeln!(m, "scenario = {}", self.scenario.name());
        let _ = writeln!(m, "engine = {}", self.engine.name());
        let _ = writeln!(m, "nu0 = {}", p.nu0);
        let _ = writeln!(m, "delta = {}", p.delta);
        let _ = writeln!(m, "omega0 = {}", p.omega0);
        let _ = writeln!(m, "eta = {}", p.eta);
        let _ = writeln!(m, "k = {}", p.k);
        let _ = writeln!(m, "omega12_hz = {}", p.omega12_hz);
        let _ = writeln!(m, "lambda_nm = {}", p.lambda_nm);
        let _ = writeln!(m, "eps0 = {}", self.eps0);
        let _ = writeln!(m, "# lambda0 = {}i", self.eps0);
        match self.constants {
            Constants::Dress(c) => {
                let _ = writeln!(m, "c1 = {}\nc2 = {}\nc3 = {}", c.c1, c.c2, c.c3);
                if let Ok(a) = self
                    .spectral()
                    .and_then(|s| unmap_constants(&c, &s, p.omega0))
                {
                    let _ = writeln!(
                        m,
                        "# equivalent soliton constants: a1 = {}, a2 = {}, a3 = {}",
                        a.a1, a.a2, a.a3
                    );
                }
            }
            Constants::Soliton(a) => {
                let _ = writeln!(m, "a1 = {}\na3 = {}", a.a1, a.a3);
                if let Ok(c) = self.spectral().and_then(|s| map_constants(&a, &s, p.omega0)) {
                    let _ = writeln!(
                        m,
                        "# equivalent dressing constants: c1 = {}, c2 = {}, c3 = {}",
                        c.c1, c.c2, c.c3
                    );
                }
            }
        }
        let medium = match self.medium {
            SeedMedium::Positive => "positive",
            SeedMedium::Printed => "printed",
        };
        let _ = writeln!(m, "medium = {medium}");
        let _ = writeln!(m, "tau_min = {}\ntau_max = {}\nn_tau = {}", g.tau_min, g.tau_max, g.n_tau);
        let _ = writeln!(m, "zeta_min = {}\nzeta_max = {}\nn_zeta = {}", g.zeta_min, g.zeta_max, g.n_zeta);
        let probes: Vec<String> = self.probes.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(m, "substeps_tau = {}\nsubsteps_zeta = {}", self.substeps.0, self.substeps.1);
        let _ = writeln!(m, "probes = {}", probes.join(", "));
        let t = &self.tol;
        let _ = writeln!(m, "tol_oracle = {:e}\ntol_audit = {:e}\ntol_numeric = {:e}", t.oracle, t.audit, t.numeric);
        let _ = writeln!(m, "order_band = {}\ntol_exact = {:e}", t.order_band, t.exact);
        let _ = writeln!(m, "out = {}", self.out.display());
        m
    }
}

const KEYS: &[&str] = &[
    "scenario", "engine", "nu0", "delta", "omega0", "eta", "k", "omega12_hz", "lambda_nm",
    "eps0", "c1", "c2", "c3", "a1", "a3", "medium", "tau_min", "tau_max", "n_tau",
    "zeta_min", "zeta_max", "n_zeta", "substeps_tau", "substeps_zeta", "probes", "tol_oracle", "tol_audit", "tol_numeric",
    "order_band", "tol_exact", "out",
];

struct Entry<'a> {
    value: &'a str,
    line: usize,
    column: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line, column, message: message.into() }
}

fn real(e: &Entry) -> Result<f64, ConfigError> {
    let x: f64 = e
        .value
        .parse()
        .map_err(|_| err(e.line, e.column, format!("expected a number, found '{}'", e.value)))?;
    if !x.is_finite() {
        return Err(err(e.line, e.column, "value must be finite"));
    }
    Ok(x)
}

fn count(e: &Entry) -> Result<usize, ConfigError> {
    e.value
        .parse()
        .map_err(|_| err(e.line, e.column, format!("expected a count, found '{}'", e.value)))
}

fn guarded(e: &Entry, ok: impl Fn(f64) -> bool, what: &str) -> Result<f64, ConfigError> {
    let x = real(e)?;
    if ok(x) {
        Ok(x)
    } else {
        Err(err(e.line, e.column, format!("{} = {x}: {what}", e.value)))
    }
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut entries: HashMap<&str, Entry> = HashMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let key_col = body.len() - body.trim_start().len() + 1;
        let Some(eq) = body.find('=') else {
            return Err(err(line, key_col, "expected 'key = value'"));
        };
        let key = body[..eq].trim();
        let rest = &body[eq + 1..];
        let value = rest.trim();
        let value_col = eq + 2 + (rest.len() - rest.trim_start().len());
        if !KEYS.contains(&key) {
            return Err(err(line, key_col, format!("unknown key '{key}'")));
        }
        if value.is_empty() {
            return Err(err(line, value_col, format!("missing value for '{key}'")));
        }
        if let Some(prev) = entries.get(key) {
            return Err(err(line, key_col, format!("duplicate key '{key}' (first on line {})", prev.line)));
        }
        entries.insert(key, Entry { value, line, column: value_col });
    }

    let mut cfg = ScenarioConfig::default();
    let get = |k: &str| entries.get(k);

    if let Some(e) = get("scenario") {
        cfg.scenario = Scenario::from_name(e.value)
            .ok_or_else(|| err(e.line, e.column, format!("unknown scenario '{}'", e.value)))?;
    }
    if let Some(e) = get("engine") {
        cfg.engine = Engine::from_name(e.value).ok_or_else(|| {
            err(e.line, e.column, format!("engine must be one of {}", Engine::NAMES.join("|")))
        })?;
    }
    let p = &mut cfg.params;
    if let Some(e) = get("nu0") {
        p.nu0 = guarded(e, |x| x > 0.0, "nu0 must be > 0")?;
    }
    if let Some(e) = get("delta") {
        p.delta = real(e)?;
    }
    if let Some(e) = get("omega0") {
        p.omega0 = guarded(e, |x| x >= 0.0, "omega0 must be >= 0")?;
    }
    if let Some(e) = get("eta") {
        p.eta = guarded(e, |x| (0.0..=std::f64::consts::FRAC_PI_2).contains(&x), "eta must lie in [0, pi/2]")?;
    }
    if let Some(e) = get("k") {
        p.k = real(e)?;
    }
    if let Some(e) = get("omega12_hz") {
        p.omega12_hz = real(e)?;
    }
    if let Some(e) = get("lambda_nm") {
        p.lambda_nm = real(e)?;
    }
    if let Some(e) = get("eps0") {
        cfg.eps0 = guarded(e, |x| x > 0.0, "eps0 must be > 0")?;
    }

    let c_keys = ["c1", "c2", "c3"].map(&get);
    let a_keys = ["a1", "a3"].map(&get);
    if let (Some(c), Some(a)) = (
        c_keys.iter().flatten().next(),
        a_keys.iter().flatten().next(),
    ) {
        let later = if c.line > a.line { c } else { a };
        return Err(err(later.line, 1, "give either c1..c3 or a1/a3, not both"));
    }
    if a_keys.iter().any(Option::is_some) {
        let mut a = [1.0; 2];
        for (slot, e) in a.iter_mut().zip(a_keys) {
            if let Some(e) = e {
                *slot = guarded(e, |x| x >= 0.0, "soliton constants must be >= 0")?;
            }
        }
        cfg.constants = Constants::Soliton(SolitonConstants::new(a[0], a[1]));
    } else {
        let mut c = [1.0; 3];
        for (slot, e) in c.iter_mut().zip(c_keys) {
            if let Some(e) = e {
                *slot = real(e)?;
            }
        }
        let dc = DressConstants::new(c[0], c[1], c[2]).map_err(|x| {
            let line = c_keys.iter().flatten().map(|e| e.line).max().unwrap_or(1);
            err(line, 1, x.to_string())
        })?;
        cfg.constants = Constants::Dress(dc);
    }
    if let Some(e) = get("medium") {
        cfg.medium = match e.value {
            "positive" => SeedMedium::Positive,
            "printed" => SeedMedium::Printed,
            _ => return Err(err(e.line, e.column, "medium must be positive|printed")),
        };
    }

    let g = &mut cfg.grid;
    for (k, slot) in [
        ("tau_min", &mut g.tau_min),
        ("tau_max", &mut g.tau_max),
        ("zeta_min", &mut g.zeta_min),
        ("zeta_max", &mut g.zeta_max),
    ] {
        if let Some(e) = get(k) {
            *slot = real(e)?;
        }
    }
    if let Some(e) = get("n_tau") {
        g.n_tau = count(e)?;
    }
    if let Some(e) = get("n_zeta") {
        g.n_zeta = count(e)?;
    }
    if let Err(x) = cfg.grid.validate() {
        let line = ["tau_min", "tau_max", "n_tau", "zeta_min", "zeta_max", "n_zeta"]
            .iter()
            .filter_map(|k| get(k).map(|e| e.line))
            .max()
            .unwrap_or(1);
        return Err(err(line, 1, x.to_string()));
    }

    for (k, slot) in [("substeps_tau", &mut cfg.substeps.0), ("substeps_zeta", &mut cfg.substeps.1)] {
        if let Some(e) = get(k) {
            *slot = count(e)?;
            if *slot == 0 {
                return Err(err(e.line, e.column, "substeps must be >= 1"));
            }
        }
    }
    if let Some(e) = get("probes") {
        cfg.probes = e
            .value
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<C64>()
                    .map_err(|_| err(e.line, e.column, format!("bad complex number '{}'", s.trim())))
            })
            .collect::<Result<_, _>>()?;
    }
    let t = &mut cfg.tol;
    for (k, slot) in [
        ("tol_oracle", &mut t.oracle),
        ("tol_audit", &mut t.audit),
        ("tol_numeric", &mut t.numeric),
        ("order_band", &mut t.order_band),
        ("tol_exact", &mut t.exact),
    ] {
        if let Some(e) = get(k) {
            *slot = guarded(e, |x| x > 0.0, "tolerances must be > 0")?;
        }
    }
    if let Some(e) = get("out") {
        cfg.out = PathBuf::from(e.value);
    }

    // cross-field guards live in the library
    if let Err(x) = cfg.scenario_params() {
        let line = get("scenario").map(|e| e.line).unwrap_or(1);
        return Err(err(line, 1, x.to_string()));
    }
    Ok(cfg)
}
