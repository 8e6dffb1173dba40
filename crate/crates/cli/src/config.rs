//! Scenario configuration files.
//!
//! Sectioned `key = value unit` text. Dimensioned keys must carry a unit;
//! dimensionless keys must not. `#` starts a comment.
//!
//! ```text
//! [species]
//! preset = strontium88
//! eps_bar = 1e-4
//!
//! [dilaton]
//! omega_rho = 1 rad/s
//! phi_rho = averaged
//! rho_dm = 0.4 GeV/cm^3
//!
//! [geometry]
//! T = 1 s
//! p0 = 0 hbar_k
//!
//! [gradiometer]
//! L = 1000 m
//! ```

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use mzi_dm::units;
use mzi_dm::verify::{Scenario, Tolerances};
use mzi_dm::{
    perturbation_parameters, AtomSpecies, AverageGrid, BracePolicy, Diffraction, DilatonParams, GradiometerConfig,
    MziGeometry, PhiSMode, PhysicalConstants, SpeciesPreset,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, field: Option<String>, message: impl Into<String>) -> Self {
        Self { line: Some(line), field, message: message.into() }
    }

    fn field(field: &str, message: impl Into<String>) -> Self {
        Self { line: None, field: Some(field.to_string()), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.field) {
            (Some(l), Some(k)) => write!(f, "line {l}, {k}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "{k}: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Dilaton-phase policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiRho {
    Fixed(f64),
    Averaged,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub braces: BracePolicy,
    pub phi_s_mode: PhiSMode,
    pub grid: AverageGrid,
    pub tolerances: Tolerances,
    pub trials: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            braces: BracePolicy::Dropped,
            phi_s_mode: PhiSMode::Coherent,
            grid: AverageGrid::for_mode(PhiSMode::Coherent),
            tolerances: Tolerances::default(),
            trials: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub phi_rho: PhiRho,
    pub numerics: Numerics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    None,
    Time,
    Length,
    AngularFrequency,
    Mass,
    Density,
    WaveVector,
    Momentum,
    Acceleration,
    Angle,
}

impl Dim {
    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dim::None => &[],
            Dim::Time => &[("s", 1.0), ("ms", 1e-3), ("us", 1e-6)],
            Dim::Length => &[("m", 1.0), ("km", 1e3), ("cm", 1e-2), ("mm", 1e-3)],
            Dim::AngularFrequency => &[("rad/s", 1.0), ("Hz", TAU)],
            Dim::Mass => &[("kg", 1.0), ("u", units::ATOMIC_MASS_UNIT)],
            Dim::Density => &[("J/m^3", 1.0), ("GeV/cm^3", 1e15 * units::ELECTRON_VOLT)],
            Dim::WaveVector => &[("rad/m", 1.0), ("1/m", 1.0)],
            // hbar_k is resolved once k is known
            Dim::Momentum => &[("kg m/s", 1.0), ("hbar_k", f64::NAN)],
            Dim::Acceleration => &[("m/s^2", 1.0)],
            Dim::Angle => &[("rad", 1.0), ("deg", TAU / 360.0)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Number(Dim),
    Integer,
    Text,
    /// A number with a unit or one of the listed words.
    NumberOrWord(Dim, &'static str),
}

const KEYS: &[(&str, &[(&str, Kind)])] = &[
    (
        "species",
        &[
            ("preset", Kind::Text),
            ("mean_mass", Kind::Number(Dim::Mass)),
            ("mass_defect", Kind::Number(Dim::Mass)),
            ("transition_frequency", Kind::Number(Dim::AngularFrequency)),
            ("eps_g", Kind::Number(Dim::None)),
            ("eps_e", Kind::Number(Dim::None)),
            ("eps_bar", Kind::Number(Dim::None)),
            ("delta_eps", Kind::Number(Dim::None)),
        ],
    ),
    (
        "dilaton",
        &[
            ("omega_rho", Kind::Number(Dim::AngularFrequency)),
            ("phi_rho", Kind::NumberOrWord(Dim::Angle, "averaged")),
            ("rho_0", Kind::Number(Dim::None)),
            ("rho_dm", Kind::Number(Dim::Density)),
            ("eps_s", Kind::Number(Dim::None)),
            ("phi_s", Kind::Number(Dim::Angle)),
        ],
    ),
    (
        "geometry",
        &[
            ("k", Kind::Number(Dim::WaveVector)),
            ("T", Kind::Number(Dim::Time)),
            ("t0", Kind::Number(Dim::Time)),
            ("z0", Kind::Number(Dim::Length)),
            ("p0", Kind::Number(Dim::Momentum)),
            ("g0", Kind::Number(Dim::Acceleration)),
            ("diffraction", Kind::Text),
        ],
    ),
    ("gradiometer", &[("L", Kind::Number(Dim::Length)), ("p1", Kind::Number(Dim::Momentum))]),
    (
        "numerics",
        &[
            ("braces", Kind::Text),
            ("phi_s_mode", Kind::Text),
            ("phi_rho_nodes", Kind::Integer),
            ("phi_s_nodes", Kind::Integer),
            ("oracle_rel", Kind::Number(Dim::None)),
            ("oracle_abs", Kind::Number(Dim::None)),
            ("oracle_small", Kind::Number(Dim::None)),
            ("catalog_rel", Kind::Number(Dim::None)),
            ("trials", Kind::Integer),
        ],
    ),
];

#[derive(Debug, Clone, PartialEq)]
enum Value {
    /// Value in SI; `per_hbar_k` marks momenta given in units of ħk.
    Number {
        si: f64,
        per_hbar_k: bool,
    },
    Integer(usize),
    Text(String),
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: Value,
}

fn kind_of(section: &str, key: &str) -> Option<Kind> {
    KEYS.iter().find(|(s, _)| *s == section)?.1.iter().find(|(k, _)| *k == key).map(|(_, kind)| *kind)
}

fn parse_number(line: usize, path: &str, text: &str, dim: Dim) -> Result<Value, ConfigError> {
    let (num, unit) = match text.split_once(char::is_whitespace) {
        Some((n, u)) => (n, u.split_whitespace().collect::<Vec<_>>().join(" ")),
        None => (text, String::new()),
    };
    let x: f64 =
        num.parse().map_err(|_| ConfigError::at(line, Some(path.into()), format!("'{num}' is not a number")))?;
    if !x.is_finite() {
        return Err(ConfigError::at(line, Some(path.into()), "value must be finite"));
    }
    let allowed = dim.units();
    if dim == Dim::None {
        if !unit.is_empty() {
            return Err(ConfigError::at(
                line,
                Some(path.into()),
                format!("dimensionless value takes no unit, got '{unit}'"),
            ));
        }
        return Ok(Value::Number { si: x, per_hbar_k: false });
    }
    let names: Vec<_> = allowed.iter().map(|(n, _)| *n).collect();
    if unit.is_empty() {
        return Err(ConfigError::at(
            line,
            Some(path.into()),
            format!("missing unit (expected one of {})", names.join(", ")),
        ));
    }
    match allowed.iter().find(|(n, _)| *n == unit) {
        Some((_, f)) if f.is_nan() => Ok(Value::Number { si: x, per_hbar_k: true }),
        Some((_, f)) => Ok(Value::Number { si: x * f, per_hbar_k: false }),
        None => Err(ConfigError::at(
            line,
            Some(path.into()),
            format!("unknown unit '{unit}' (expected one of {})", names.join(", ")),
        )),
    }
}

fn parse_entries(text: &str) -> Result<BTreeMap<String, Entry>, ConfigError> {
    let mut section: Option<String> = None;
    let mut out: BTreeMap<String, Entry> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            let name = name.trim();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                let valid: Vec<_> = KEYS.iter().map(|(s, _)| *s).collect();
                return Err(ConfigError::at(
                    line,
                    None,
                    format!("unknown section [{name}] (valid: {})", valid.join(", ")),
                ));
            }
            section = Some(name.to_string());
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::at(line, None, format!("expected 'key = value', got '{body}'")));
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(sec) = section.as_deref() else {
            return Err(ConfigError::at(line, Some(key.into()), "key outside of any section"));
        };
        let path = format!("{sec}.{key}");
        let Some(kind) = kind_of(sec, key) else {
            let valid: Vec<_> = KEYS.iter().find(|(s, _)| *s == sec).unwrap().1.iter().map(|(k, _)| *k).collect();
            return Err(ConfigError::at(
                line,
                Some(path),
                format!("unknown key (valid in [{sec}]: {})", valid.join(", ")),
            ));
        };
        if value.is_empty() {
            return Err(ConfigError::at(line, Some(path), "missing value"));
        }
        let value = match kind {
            Kind::Number(dim) => parse_number(line, &path, value, dim)?,
            Kind::Integer => Value::Integer(value.parse().map_err(|_| {
                ConfigError::at(line, Some(path.clone()), format!("'{value}' is not a non-negative integer"))
            })?),
            Kind::Text => Value::Text(value.to_string()),
            Kind::NumberOrWord(_, word) if value == word => Value::Text(value.to_string()),
            Kind::NumberOrWord(dim, _) => parse_number(line, &path, value, dim)?,
        };
        if let Some(prev) = out.get(&path) {
            return Err(ConfigError::at(line, Some(path), format!("duplicate key, first set on line {}", prev.line)));
        }
        out.insert(path, Entry { line, value });
    }
    Ok(out)
}

struct Fields {
    entries: BTreeMap<String, Entry>,
}

impl Fields {
    fn line(&self, path: &str) -> Option<usize> {
        self.entries.get(path).map(|e| e.line)
    }

    fn has(&self, path: &str) -> bool {
        self.entries.contains_key(path)
    }

    fn err(&self, path: &str, msg: impl Into<String>) -> ConfigError {
        match self.line(path) {
            Some(l) => ConfigError::at(l, Some(path.into()), msg),
            None => ConfigError::field(path, msg),
        }
    }

    /// SI number, with ħk momenta converted using `hbar_k`.
    fn number(&self, path: &str, hbar_k: f64) -> Option<f64> {
        match &self.entries.get(path)?.value {
            Value::Number { si, per_hbar_k: true } => Some(si * hbar_k),
            Value::Number { si, .. } => Some(*si),
            _ => None,
        }
    }

    fn required(&self, path: &str) -> Result<f64, ConfigError> {
        self.number(path, 1.0).ok_or_else(|| ConfigError::field(path, "required field is missing"))
    }

    fn text(&self, path: &str) -> Option<&str> {
        match &self.entries.get(path)?.value {
            Value::Text(s) => Some(s.as_str()),
            _ => None,
        }
    }

    fn integer(&self, path: &str) -> Option<usize> {
        match &self.entries.get(path)?.value {
            Value::Integer(n) => Some(*n),
            _ => None,
        }
    }

    fn exclusive(&self, a: &str, b: &str) -> Result<(), ConfigError> {
        if self.has(a) && self.has(b) {
            return Err(self.err(b, format!("conflicts with {a}; give only one")));
        }
        Ok(())
    }
}

fn wrap<T>(fields: &Fields, path: &str, r: mzi_dm::Result<T>) -> Result<T, ConfigError> {
    r.map_err(|e| fields.err(path, e.to_string()))
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let f = Fields { entries: parse_entries(text)? };
        let consts = PhysicalConstants::CODATA_2018;

        let preset = match f.text("species.preset") {
            Some(name) => Some(SpeciesPreset::from_name(name).ok_or_else(|| {
                let valid: Vec<_> = SpeciesPreset::ALL.iter().map(|p| p.name()).collect();
                f.err("species.preset", format!("unknown preset '{name}' (valid: {})", valid.join(", ")))
            })?),
            None => None,
        };
        f.exclusive("species.mass_defect", "species.transition_frequency")?;
        let mean_mass = match (f.number("species.mean_mass", 1.0), preset) {
            (Some(m), _) => m,
            (None, Some(p)) => p.mass(),
            (None, None) => return Err(ConfigError::field("species.mean_mass", "required without a preset")),
        };
        let c2 = consts.c * consts.c;
        let mass_defect = if let Some(dm) = f.number("species.mass_defect", 1.0) {
            dm
        } else if let Some(om) = f.number("species.transition_frequency", 1.0) {
            om * consts.hbar / c2
        } else if let Some(p) = preset {
            units::PLANCK * p.transition_hz() / c2
        } else {
            return Err(ConfigError::field("species.mass_defect", "required without a preset"));
        };
        let per_state = f.has("species.eps_g") || f.has("species.eps_e");
        let mean_diff = f.has("species.eps_bar") || f.has("species.delta_eps");
        if per_state && mean_diff {
            let path = if f.has("species.eps_bar") { "species.eps_bar" } else { "species.delta_eps" };
            return Err(f.err(path, "give either eps_g/eps_e or eps_bar/delta_eps, not both"));
        }
        let get0 = |p: &str| f.number(p, 1.0).unwrap_or(0.0);
        let species = if per_state {
            AtomSpecies::new(consts, mean_mass, mass_defect, get0("species.eps_g"), get0("species.eps_e"))
        } else {
            AtomSpecies::with_mean_and_differential(
                consts,
                mean_mass,
                mass_defect,
                get0("species.eps_bar"),
                get0("species.delta_eps"),
            )
        };
        let species = wrap(&f, "species.mass_defect", species)?;

        let omega = f.required("dilaton.omega_rho")?;
        let phi_rho = match (f.text("dilaton.phi_rho"), f.number("dilaton.phi_rho", 1.0)) {
            (_, Some(v)) => PhiRho::Fixed(v),
            _ => PhiRho::Averaged,
        };
        f.exclusive("dilaton.rho_0", "dilaton.rho_dm")?;
        let eps_s = get0("dilaton.eps_s");
        let phi_s = get0("dilaton.phi_s");
        let phi0 = match phi_rho {
            PhiRho::Fixed(v) => v,
            PhiRho::Averaged => 0.0,
        };
        let dilaton = match f.number("dilaton.rho_0", 1.0) {
            Some(r) => DilatonParams::new(omega, phi0, r, eps_s, phi_s),
            None => {
                let rho = f
                    .number("dilaton.rho_dm", 1.0)
                    .unwrap_or(units::gev_per_cm3_to_si(units::LOCAL_DM_DENSITY_GEV_CM3));
                DilatonParams::from_density(&consts, omega, rho, phi0, eps_s, phi_s)
            }
        };
        let dilaton = wrap(&f, "dilaton.omega_rho", dilaton)?;

        let k = match (f.number("geometry.k", 1.0), preset) {
            (Some(k), _) => k,
            (None, Some(p)) => p.default_wavevector(),
            (None, None) => return Err(ConfigError::field("geometry.k", "required without a preset")),
        };
        let hk = consts.hbar * k;
        let diffraction = match f.text("geometry.diffraction") {
            Some(d) => d.parse::<Diffraction>().map_err(|e| f.err("geometry.diffraction", e.to_string()))?,
            None if preset == Some(SpeciesPreset::Rubidium87) => Diffraction::Raman,
            None => Diffraction::SinglePhoton,
        };
        let geom = MziGeometry::new(
            k,
            f.required("geometry.T")?,
            f.number("geometry.t0", 1.0).unwrap_or(0.0),
            f.number("geometry.z0", 1.0).unwrap_or(0.0),
            f.number("geometry.p0", hk).unwrap_or(0.0),
            f.number("geometry.g0", 1.0).unwrap_or(9.81),
            diffraction,
        );
        let geom = wrap(&f, "geometry.T", geom)?;
        let grad = GradiometerConfig::new(
            geom,
            f.required("gradiometer.L")?,
            f.number("gradiometer.p1", hk).unwrap_or(geom.p0),
        );
        let grad = wrap(&f, "gradiometer.L", grad)?;

        let mut numerics = Numerics::default();
        if let Some(b) = f.text("numerics.braces") {
            numerics.braces = match b {
                "dropped" => BracePolicy::Dropped,
                "included" => BracePolicy::Included,
                other => return Err(f.err("numerics.braces", format!("expected dropped or included, got '{other}'"))),
            };
        }
        if let Some(m) = f.text("numerics.phi_s_mode") {
            numerics.phi_s_mode = parse_phi_s_mode(m).map_err(|e| f.err("numerics.phi_s_mode", e))?;
        }
        numerics.grid = AverageGrid::for_mode(numerics.phi_s_mode);
        if let Some(n) = f.integer("numerics.phi_rho_nodes") {
            if n < 64 {
                return Err(f.err("numerics.phi_rho_nodes", "at least 64 nodes are required"));
            }
            numerics.grid.phi_rho_nodes = n;
        }
        if let Some(n) = f.integer("numerics.phi_s_nodes") {
            if n == 0 {
                return Err(f.err("numerics.phi_s_nodes", "at least one node is required"));
            }
            numerics.grid.phi_s_nodes = n;
        }
        let tol = &mut numerics.tolerances;
        for (path, slot) in [
            ("numerics.oracle_rel", &mut tol.oracle_rel),
            ("numerics.oracle_abs", &mut tol.oracle_abs),
            ("numerics.oracle_small", &mut tol.oracle_small),
            ("numerics.catalog_rel", &mut tol.catalog_rel),
        ] {
            if let Some(v) = f.number(path, 1.0) {
                if v < 0.0 {
                    return Err(f.err(path, "tolerance must be non-negative"));
                }
                *slot = v;
            }
        }
        if let Some(n) = f.integer("numerics.trials") {
            if n == 0 {
                return Err(f.err("numerics.trials", "at least one trial is required"));
            }
            numerics.trials = n;
        }

        let pert = perturbation_parameters(&species, &dilaton, numerics.braces);
        Ok(Self { scenario: Scenario { grad, species, dilaton, pert }, phi_rho, numerics })
    }
}

pub fn parse_phi_s_mode(s: &str) -> Result<PhiSMode, String> {
    match s {
        "coherent" => Ok(PhiSMode::Coherent),
        "independent" => Ok(PhiSMode::IndependentPhiS),
        other => Err(format!("expected coherent or independent, got '{other}'")),
    }
}
