use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use toml::{Table, Value};

use crate::averaging::QuadratureConfig;
use crate::potentials::{SlowProfile, TwoScaleFunction};
use crate::solver::{BoundStateQuery, Formulation, SolverConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    K2,
    Predict,
    Solve,
    Sweep,
    Scan,
    Lemma,
    GaugeCheck,
    KEps,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Self::K2,
        Self::Predict,
        Self::Solve,
        Self::Sweep,
        Self::Scan,
        Self::Lemma,
        Self::GaugeCheck,
        Self::KEps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::K2 => "k2",
            Self::Predict => "predict",
            Self::Solve => "solve",
            Self::Sweep => "sweep",
            Self::Scan => "scan",
            Self::Lemma => "lemma",
            Self::GaugeCheck => "gauge-check",
            Self::KEps => "keps",
        }
    }

    /// Commands whose mathematics assumes a zero-mean potential. `solve` and
    /// `scan` accept any compactly supported potential.
    pub fn theorem_mode(self) -> bool {
        !matches!(self, Self::Solve | Self::Scan)
    }

    /// Commands that need a nonempty mode list.
    pub fn spectral(self) -> bool {
        !matches!(self, Self::Lemma | Self::GaugeCheck)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

/// How a mode entry expands into Fourier coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeForm {
    /// `c_n = a`.
    Exp,
    /// `a·cos 2πnξ`, i.e. `c_{±n} = a/2`.
    Cos,
    /// `a·sin 2πnξ`, i.e. `c_{±n} = ±a/(2i)`.
    Sin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpec {
    pub n: i32,
    pub form: ModeForm,
    pub profile: SlowProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub support: (f64, f64),
    pub modes: Vec<ModeSpec>,
    pub potential: TwoScaleFunction,
    pub solver: SolverConfig,
    /// Explicit κ bracket for the real root search.
    pub bracket: Option<(f64, f64)>,
    pub quadrature: QuadratureConfig,
    /// Single-shot `ε` for `solve` and `scan`.
    pub epsilon: Option<f64>,
    pub epsilons: Vec<f64>,
    pub seed: u64,
    /// Relative tolerance for the two k₂ evaluations.
    pub k2_tolerance: f64,
    /// Random test functions added to the fixed catalog in `gauge-check`.
    pub random_test_functions: usize,
}

impl ExperimentConfig {
    pub fn is_real(&self) -> bool {
        self.potential.is_real()
    }

    /// `ε` for single-shot commands: `epsilon`, else the first sweep entry.
    pub fn single_epsilon(&self) -> Option<f64> {
        self.epsilon.or_else(|| self.epsilons.first().copied())
    }

    pub fn query(&self, k2: Option<Complex64>) -> BoundStateQuery {
        BoundStateQuery {
            k2_hint: k2,
            bracket: self.bracket,
        }
    }
}

const TOP_KEYS: &[&str] = &[
    "seed",
    "epsilon",
    "k2_tolerance",
    "random_test_functions",
    "potential",
    "solver",
    "sweep",
    "quadrature",
];
const POTENTIAL_KEYS: &[&str] = &["support", "modes"];
const MODE_KEYS: &[&str] = &["n", "form", "profile"];
const PROFILE_KEYS: &[&str] = &["kind", "power", "amplitude_re", "amplitude_im", "support"];
const SOLVER_KEYS: &[&str] = &[
    "points_per_fast_period",
    "root_tol",
    "kappa_floor",
    "scan_window",
    "scan_samples",
    "max_iter",
    "formulation",
    "bracket",
];
const SWEEP_KEYS: &[&str] = &["epsilons"];
const QUADRATURE_KEYS: &[&str] = &["panels_per_period", "nodes_per_panel", "max_panels"];

/// Accumulates violations instead of stopping at the first.
struct Checker {
    errors: Vec<String>,
}

impl Checker {
    fn unknown_keys(&mut self, table: &Table, allowed: &[&str], path: &str) {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                let at = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
                self.errors.push(format!("unknown key `{at}`"));
            }
        }
    }

    fn float(&mut self, table: &Table, key: &str, path: &str) -> Option<f64> {
        match table.get(key)? {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            other => {
                self.errors.push(format!("`{path}{key}` must be a number, got {}", other.type_str()));
                None
            }
        }
    }

    fn uint(&mut self, table: &Table, key: &str, path: &str) -> Option<u64> {
        match table.get(key)? {
            Value::Integer(i) if *i >= 0 => Some(*i as u64),
            other => {
                self.errors.push(format!("`{path}{key}` must be a non-negative integer, got {other}"));
                None
            }
        }
    }

    fn int(&mut self, table: &Table, key: &str, path: &str) -> Option<i64> {
        match table.get(key)? {
            Value::Integer(i) => Some(*i),
            other => {
                self.errors.push(format!("`{path}{key}` must be an integer, got {other}"));
                None
            }
        }
    }

    fn string<'a>(&mut self, table: &'a Table, key: &str, path: &str) -> Option<&'a str> {
        match table.get(key)? {
            Value::String(s) => Some(s),
            other => {
                self.errors.push(format!("`{path}{key}` must be a string, got {other}"));
                None
            }
        }
    }

    fn table<'a>(&mut self, table: &'a Table, key: &str, path: &str) -> Option<&'a Table> {
        match table.get(key)? {
            Value::Table(t) => Some(t),
            other => {
                self.errors.push(format!("`{path}{key}` must be a table, got {}", other.type_str()));
                None
            }
        }
    }

    fn floats(&mut self, table: &Table, key: &str, path: &str) -> Option<Vec<f64>> {
        let Value::Array(items) = table.get(key)? else {
            self.errors.push(format!("`{path}{key}` must be an array of numbers"));
            return None;
        };
        let mut out = Vec::with_capacity(items.len());
        for item in items {
            match item {
                Value::Float(x) => out.push(*x),
                Value::Integer(i) => out.push(*i as f64),
                _ => {
                    self.errors.push(format!("`{path}{key}` must contain only numbers"));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn interval(&mut self, table: &Table, key: &str, path: &str) -> Option<(f64, f64)> {
        let v = self.floats(table, key, path)?;
        if v.len() != 2 || !(v[0] < v[1]) || !v.iter().all(|x| x.is_finite()) {
            self.errors.push(format!("`{path}{key}` must be [lo, hi] with lo < hi, got {v:?}"));
            return None;
        }
        Some((v[0], v[1]))
    }
}

/// Parses and validates an experiment description for `command`.
///
/// Every violation found is reported together in [`Error::Config`].
pub fn parse_config(text: &str, command: Command) -> Result<ExperimentConfig> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(vec![format!("not valid TOML: {}", e.message())]))?;
    let mut ck = Checker { errors: Vec::new() };
    ck.unknown_keys(&root, TOP_KEYS, "");

    let seed = ck.uint(&root, "seed", "").unwrap_or(0);
    let epsilon = ck.float(&root, "epsilon", "");
    if let Some(e) = epsilon {
        if !(e > 0.0 && e.is_finite()) {
            ck.errors.push(format!("`epsilon` must be positive, got {e}"));
        }
    }
    let k2_tolerance = ck.float(&root, "k2_tolerance", "").unwrap_or(1e-10);
    let random_test_functions = ck.uint(&root, "random_test_functions", "").unwrap_or(5) as usize;

    let (support, modes) = parse_potential(&mut ck, &root);
    if command.spectral() && modes.is_empty() {
        ck.errors.push(format!("command `{command}` needs at least one potential mode"));
    }
    if command.theorem_mode() && modes.iter().any(|m| m.n == 0) {
        ck.errors.push(format!(
            "mode n = 0 is not allowed for `{command}`: the potential must have zero mean over the fast period, ⟨V(x,·)⟩ = 0"
        ));
    }

    let (solver, bracket) = parse_solver(&mut ck, &root);
    let quadrature = parse_quadrature(&mut ck, &root);

    let mut epsilons = Vec::new();
    if let Some(sweep) = ck.table(&root, "sweep", "") {
        ck.unknown_keys(sweep, SWEEP_KEYS, "sweep");
        if let Some(e) = ck.floats(sweep, "epsilons", "sweep.") {
            epsilons = e;
        }
    }
    if epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        ck.errors.push(format!("`sweep.epsilons` must all be positive, got {epsilons:?}"));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        ck.errors.push(format!(
            "`sweep.epsilons` must be strictly decreasing, got {epsilons:?}"
        ));
    }
    match command {
        Command::Sweep | Command::Predict | Command::Lemma | Command::GaugeCheck | Command::KEps
            if epsilons.is_empty() =>
        {
            ck.errors.push(format!("command `{command}` needs `sweep.epsilons`"));
        }
        Command::Solve | Command::Scan if epsilon.is_none() && epsilons.is_empty() => {
            ck.errors.push(format!("command `{command}` needs `epsilon` or `sweep.epsilons`"));
        }
        _ => {}
    }

    let potential = if ck.errors.is_empty() {
        match build_potential(&modes) {
            Ok(p) => Some(p),
            Err(e) => {
                ck.errors.push(e.to_string());
                None
            }
        }
    } else {
        None
    };

    if !ck.errors.is_empty() {
        return Err(Error::Config(ck.errors));
    }
    Ok(ExperimentConfig {
        support,
        modes,
        potential: potential.expect("built when there are no errors"),
        solver,
        bracket,
        quadrature,
        epsilon,
        epsilons,
        seed,
        k2_tolerance,
        random_test_functions,
    })
}

fn parse_potential(ck: &mut Checker, root: &Table) -> ((f64, f64), Vec<ModeSpec>) {
    let mut support = (0.0, 1.0);
    let mut modes = Vec::new();
    let Some(pot) = ck.table(root, "potential", "") else {
        return (support, modes);
    };
    ck.unknown_keys(pot, POTENTIAL_KEYS, "potential");
    if let Some(s) = ck.interval(pot, "support", "potential.") {
        support = s;
    }
    let entries = match pot.get("modes") {
        None => return (support, modes),
        Some(Value::Array(a)) => a,
        Some(_) => {
            ck.errors.push("`potential.modes` must be an array of tables".into());
            return (support, modes);
        }
    };
    for (i, entry) in entries.iter().enumerate() {
        let path = format!("potential.modes[{i}]");
        let Value::Table(t) = entry else {
            ck.errors.push(format!("`{path}` must be a table"));
            continue;
        };
        ck.unknown_keys(t, MODE_KEYS, &path);
        let dot = format!("{path}.");
        let n = match ck.int(t, "n", &dot) {
            Some(n) if i32::try_from(n).is_ok() => Some(n as i32),
            Some(n) => {
                ck.errors.push(format!("`{path}.n` = {n} out of range"));
                None
            }
            None => {
                if !t.contains_key("n") {
                    ck.errors.push(format!("`{path}.n` is required"));
                }
                None
            }
        };
        let form = match ck.string(t, "form", &dot).unwrap_or("exp") {
            "exp" => Some(ModeForm::Exp),
            "cos" => Some(ModeForm::Cos),
            "sin" => Some(ModeForm::Sin),
            other => {
                ck.errors.push(format!("`{path}.form` must be exp, cos or sin, got {other:?}"));
                None
            }
        };
        if let (Some(n), Some(ModeForm::Cos | ModeForm::Sin)) = (n, form) {
            if n <= 0 {
                ck.errors.push(format!("`{path}`: cos/sin modes need n > 0, got {n}"));
            }
        }
        let profile = match ck.table(t, "profile", &dot) {
            Some(p) => parse_profile(ck, p, &format!("{path}.profile"), support),
            None => {
                if !t.contains_key("profile") {
                    ck.errors.push(format!("`{path}.profile` is required"));
                }
                None
            }
        };
        if let (Some(n), Some(form), Some(profile)) = (n, form, profile) {
            modes.push(ModeSpec { n, form, profile });
        }
    }
    (support, modes)
}

fn parse_profile(ck: &mut Checker, t: &Table, path: &str, default_support: (f64, f64)) -> Option<SlowProfile> {
    ck.unknown_keys(t, PROFILE_KEYS, path);
    let dot = format!("{path}.");
    let before = ck.errors.len();
    let re = ck.float(t, "amplitude_re", &dot).unwrap_or(0.0);
    let im = ck.float(t, "amplitude_im", &dot).unwrap_or(0.0);
    let (a, b) = if t.contains_key("support") {
        ck.interval(t, "support", &dot).unwrap_or(default_support)
    } else {
        default_support
    };
    let amplitude = Complex64::new(re, im);
    let profile = match ck.string(t, "kind", &dot) {
        Some("polynomial_bump") => {
            let power = ck.uint(t, "power", &dot).unwrap_or(2);
            match u32::try_from(power) {
                Ok(p) => Some(SlowProfile::polynomial_bump(amplitude, p, a, b)),
                Err(_) => {
                    ck.errors.push(format!("`{path}.power` = {power} out of range"));
                    None
                }
            }
        }
        Some("smooth_bump") => {
            if t.contains_key("power") {
                ck.errors.push(format!("`{path}.power` does not apply to smooth_bump"));
            }
            Some(SlowProfile::smooth_bump(amplitude, a, b))
        }
        Some(other) => {
            ck.errors.push(format!(
                "`{path}.kind` must be polynomial_bump or smooth_bump, got {other:?}"
            ));
            None
        }
        None => {
            if !t.contains_key("kind") {
                ck.errors.push(format!("`{path}.kind` is required"));
            }
            None
        }
    };
    if ck.errors.len() > before {
        None
    } else {
        profile
    }
}

fn parse_solver(ck: &mut Checker, root: &Table) -> (SolverConfig, Option<(f64, f64)>) {
    let mut cfg = SolverConfig::default();
    let Some(t) = ck.table(root, "solver", "") else {
        return (cfg, None);
    };
    ck.unknown_keys(t, SOLVER_KEYS, "solver");
    let p = "solver.";
    if let Some(v) = ck.uint(t, "points_per_fast_period", p) {
        cfg.points_per_fast_period = v as usize;
        if let Err(e) = cfg.validate() {
            ck.errors.push(e.to_string());
        }
    }
    for (key, slot) in [("root_tol", &mut cfg.root_tol), ("kappa_floor", &mut cfg.kappa_floor)] {
        if let Some(v) = ck.float(t, key, p) {
            if v > 0.0 {
                *slot = v;
            } else {
                ck.errors.push(format!("`solver.{key}` must be positive, got {v}"));
            }
        }
    }
    if let Some(w) = ck.interval(t, "scan_window", p) {
        cfg.scan_window = w;
    }
    if let Some(v) = ck.uint(t, "scan_samples", p) {
        cfg.scan_samples = v as usize;
    }
    if let Some(v) = ck.uint(t, "max_iter", p) {
        cfg.max_iter = v as usize;
    }
    match ck.string(t, "formulation", p) {
        Some("direct") => cfg.formulation = Formulation::Direct,
        Some("gauged") => cfg.formulation = Formulation::Gauged,
        Some(other) => ck.errors.push(format!("`solver.formulation` must be direct or gauged, got {other:?}")),
        None => {}
    }
    let bracket = ck.interval(t, "bracket", p);
    if let Some((lo, _)) = bracket {
        if lo <= 0.0 {
            ck.errors.push(format!("`solver.bracket` must lie in κ > 0, got lower end {lo}"));
        }
    }
    (cfg, bracket)
}

fn parse_quadrature(ck: &mut Checker, root: &Table) -> QuadratureConfig {
    let mut cfg = QuadratureConfig::default();
    let Some(t) = ck.table(root, "quadrature", "") else {
        return cfg;
    };
    ck.unknown_keys(t, QUADRATURE_KEYS, "quadrature");
    let p = "quadrature.";
    for (key, slot) in [
        ("panels_per_period", &mut cfg.panels_per_period),
        ("nodes_per_panel", &mut cfg.nodes_per_panel),
        ("max_panels", &mut cfg.max_panels),
    ] {
        if let Some(v) = ck.uint(t, key, p) {
            if v == 0 {
                ck.errors.push(format!("`quadrature.{key}` must be positive"));
            } else {
                *slot = v as usize;
            }
        }
    }
    cfg
}

fn build_potential(modes: &[ModeSpec]) -> Result<TwoScaleFunction> {
    let mut v = TwoScaleFunction::zero();
    for m in modes {
        let term = match m.form {
            ModeForm::Exp => TwoScaleFunction::from_modes([(m.n, m.profile)])?,
            ModeForm::Cos => TwoScaleFunction::cosine(m.n, m.profile),
            ModeForm::Sin => TwoScaleFunction::sine(m.n, m.profile),
        };
        v = v.add(&term)?;
    }
    Ok(v)
}
