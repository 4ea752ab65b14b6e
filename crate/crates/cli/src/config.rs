//! Run configuration: a TOML document with dotted section names, overridden
//! by `--set key=value`, `--dimension` and `EUQOE_CACHE_DIR`, in that order.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use euqoe_core::algebra::{EntangledParity, InitialState};
use euqoe_core::engine::{CycleConfig, Dimension, NumericOptions};
use toml::{Spanned, Value};

use crate::error::CliError;

/// Every accepted key. `oracle.grid` scales the resolution of the oracle
/// used by `verify`.
pub const KEYS: [&str; 17] = [
    "engine.omega1",
    "engine.omega2",
    "engine.alpha_aH",
    "engine.aH2",
    "engine.tau_a",
    "engine.dimension",
    "state.p",
    "state.parity",
    "sweep.axis",
    "sweep.lo",
    "sweep.hi",
    "sweep.count",
    "sweep.spacing",
    "tol.rel",
    "tol.abs",
    "cache.dir",
    "oracle.grid",
];

pub const DEFAULT_CACHE_DIR: &str = ".euqoe-cache";
const DEFAULT_SWEEP_COUNT: usize = 11;

/// Parity of the initial state, or `Auto` to take the one with positive
/// heat intake.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityChoice {
    Auto,
    Fixed(EntangledParity),
}

impl ParityChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            ParityChoice::Auto => "auto",
            ParityChoice::Fixed(p) => p.as_str(),
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Some(ParityChoice::Auto),
            "symmetric" | "s" => Some(ParityChoice::Fixed(EntangledParity::Symmetric)),
            "antisymmetric" | "a" => Some(ParityChoice::Fixed(EntangledParity::Antisymmetric)),
            _ => None,
        }
    }
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxisKey {
    Omega1,
    Omega2,
    AlphaAH,
    AH2,
    TauA,
    P,
}

impl AxisKey {
    pub const ALL: [AxisKey; 6] = [
        AxisKey::Omega1,
        AxisKey::Omega2,
        AxisKey::AlphaAH,
        AxisKey::AH2,
        AxisKey::TauA,
        AxisKey::P,
    ];

    pub fn key(self) -> &'static str {
        match self {
            AxisKey::Omega1 => "engine.omega1",
            AxisKey::Omega2 => "engine.omega2",
            AxisKey::AlphaAH => "engine.alpha_aH",
            AxisKey::AH2 => "engine.aH2",
            AxisKey::TauA => "engine.tau_a",
            AxisKey::P => "state.p",
        }
    }

    /// CSV column holding this parameter.
    pub fn column(self) -> &'static str {
        self.key()
            .split_once('.')
            .map(|(_, c)| c)
            .unwrap_or_default()
    }

    fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        Self::ALL
            .into_iter()
            .find(|a| a.key() == s || a.column() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// One sweep axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: AxisKey,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match (self.count, self.spacing) {
            (0, _) => Vec::new(),
            (1, _) => vec![self.lo],
            (n, Spacing::Linear) => (0..n)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
                .collect(),
            (n, Spacing::Log) => euqoe_core::protocol::log_grid(self.lo, self.hi, n),
        }
    }
}

/// A fully specified evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub omega1: f64,
    pub omega2: f64,
    pub alpha_ah: f64,
    pub a_h2: f64,
    pub tau_a: f64,
    pub dimension: Dimension,
    pub p: f64,
    pub parity: ParityChoice,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for Point {
    fn default() -> Self {
        let n = NumericOptions::default();
        Self {
            omega1: 1.0,
            omega2: 2.0,
            alpha_ah: 0.8,
            a_h2: 1.0,
            tau_a: 1.0,
            dimension: Dimension::D1p1,
            p: 0.0,
            parity: ParityChoice::Auto,
            rel_tol: n.rel_tol,
            abs_tol: n.abs_tol,
        }
    }
}

impl Point {
    pub fn get(&self, key: AxisKey) -> f64 {
        match key {
            AxisKey::Omega1 => self.omega1,
            AxisKey::Omega2 => self.omega2,
            AxisKey::AlphaAH => self.alpha_ah,
            AxisKey::AH2 => self.a_h2,
            AxisKey::TauA => self.tau_a,
            AxisKey::P => self.p,
        }
    }

    pub fn set(&mut self, key: AxisKey, v: f64) {
        match key {
            AxisKey::Omega1 => self.omega1 = v,
            AxisKey::Omega2 => self.omega2 = v,
            AxisKey::AlphaAH => self.alpha_ah = v,
            AxisKey::AH2 => self.a_h2 = v,
            AxisKey::TauA => self.tau_a = v,
            AxisKey::P => self.p = v,
        }
    }

    pub fn numerics(&self) -> NumericOptions {
        NumericOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            ..NumericOptions::default()
        }
    }

    /// The cycle at this point with the given parity.
    pub fn cycle(&self, parity: EntangledParity) -> euqoe_core::Result<CycleConfig> {
        let mut c = CycleConfig::entangled(
            self.omega1,
            self.omega2,
            self.alpha_ah,
            self.a_h2,
            self.tau_a,
            parity,
            self.dimension,
        )?;
        c.initial = InitialState::entangled(self.p, parity)?;
        c.numerics = self.numerics();
        c.validate()?;
        Ok(c)
    }

    /// Checks every physical constraint; the error names the offending key.
    pub fn check(&self) -> Result<(), (&'static str, String)> {
        let finite = |k: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err((k, format!("must be finite, got {v}")))
            }
        };
        for k in AxisKey::ALL {
            finite(k.key(), self.get(k))?;
        }
        finite("tol.rel", self.rel_tol)?;
        finite("tol.abs", self.abs_tol)?;
        let positive = |k: &'static str, v: f64| {
            if v > 0.0 {
                Ok(())
            } else {
                Err((k, format!("must be positive, got {v}")))
            }
        };
        positive("engine.omega1", self.omega1)?;
        positive("engine.omega2", self.omega2)?;
        positive("engine.aH2", self.a_h2)?;
        positive("engine.tau_a", self.tau_a)?;
        positive("tol.rel", self.rel_tol)?;
        positive("tol.abs", self.abs_tol)?;
        if self.omega1 >= self.omega2 {
            return Err((
                "engine.omega2",
                format!(
                    "need omega1 < omega2, got {} and {}",
                    self.omega1, self.omega2
                ),
            ));
        }
        if self.alpha_ah < 0.0 {
            return Err((
                "engine.alpha_aH",
                format!("must be non-negative, got {}", self.alpha_ah),
            ));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(("state.p", format!("must lie in [0, 1], got {}", self.p)));
        }
        if self.dimension == Dimension::D1p3 {
            if !(self.alpha_ah > 0.0 && self.alpha_ah <= 1.0) {
                return Err((
                    "engine.alpha_aH",
                    format!("1p3 needs 0 < alpha_aH <= 1, got {}", self.alpha_ah),
                ));
            }
            if self.p != 0.0 {
                return Err(("state.p", "1p3 supports only p = 0".to_string()));
            }
        }
        self.cycle(EntangledParity::Symmetric)
            .map(|_| ())
            .map_err(|e| ("engine", e.to_string()))
    }
}

/// Where a setting came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Origin {
    File { line: usize },
    Set,
    Flag,
    Env,
}

#[derive(Debug, Clone, Default)]
struct SweepLists {
    axis: Vec<String>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    count: Vec<usize>,
    spacing: Vec<String>,
}

/// A loaded and validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub base: Point,
    pub axes: Vec<Axis>,
    pub cache_dir: PathBuf,
    pub oracle_grid: f64,
    source: Option<PathBuf>,
    origins: BTreeMap<&'static str, Origin>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            base: Point::default(),
            axes: Vec::new(),
            cache_dir: PathBuf::from(DEFAULT_CACHE_DIR),
            oracle_grid: 1.0,
            source: None,
            origins: BTreeMap::new(),
        }
    }
}

type SectionMap = BTreeMap<String, Spanned<BTreeMap<String, Spanned<Value>>>>;

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn canonical(key: &str) -> Option<&'static str> {
    KEYS.iter().copied().find(|k| *k == key)
}

impl RunConfig {
    /// Loads `path` (if any), then applies `sets`, `dimension` and
    /// `cache_env` on top.
    pub fn load(
        path: Option<&Path>,
        sets: &[String],
        dimension: Option<&str>,
        cache_env: Option<&str>,
    ) -> Result<Self, CliError> {
        let mut cfg = RunConfig {
            source: path.map(Path::to_path_buf),
            ..RunConfig::default()
        };
        let mut sweep = SweepLists::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(&path.display().to_string(), e))?;
            cfg.apply_text(&text, &mut sweep)?;
        }
        for s in sets {
            let (key, raw) = s
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("--set {s}: expected key=value")))?;
            let key = key.trim();
            let key = canonical(key)
                .ok_or_else(|| CliError::config(unknown_key_message("--set", key)))?;
            cfg.assign(key, &parse_override(raw), Origin::Set, &mut sweep)?;
        }
        if let Some(d) = dimension {
            cfg.assign(
                "engine.dimension",
                &Value::String(d.to_string()),
                Origin::Flag,
                &mut sweep,
            )?;
        }
        if let Some(dir) = cache_env.filter(|d| !d.is_empty()) {
            cfg.assign(
                "cache.dir",
                &Value::String(dir.to_string()),
                Origin::Env,
                &mut sweep,
            )?;
        }
        cfg.axes = cfg.build_axes(&sweep)?;
        cfg.check_point(&cfg.base)?;
        if !(cfg.oracle_grid > 0.0 && cfg.oracle_grid.is_finite()) {
            return Err(cfg.error_at(
                "oracle.grid",
                format!("must be positive, got {}", cfg.oracle_grid),
            ));
        }
        Ok(cfg)
    }

    fn apply_text(&mut self, text: &str, sweep: &mut SweepLists) -> Result<(), CliError> {
        let name = self.source_name();
        let doc: SectionMap = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(1);
            CliError::config(format!("{name}:{line}: {}", e.message().trim()))
        })?;
        for (section, table) in &doc {
            if table.get_ref().is_empty()
                && !KEYS.iter().any(|k| k.starts_with(&format!("{section}.")))
            {
                let line = line_of(text, table.span().start);
                return Err(CliError::config(format!(
                    "{name}:{line}: unknown section [{section}]"
                )));
            }
            for (key, value) in table.get_ref() {
                let full = format!("{section}.{key}");
                let line = line_of(text, value.span().start);
                let key = canonical(&full).ok_or_else(|| {
                    CliError::config(unknown_key_message(&format!("{name}:{line}"), &full))
                })?;
                self.assign(key, value.get_ref(), Origin::File { line }, sweep)?;
            }
        }
        Ok(())
    }

    fn source_name(&self) -> String {
        self.source
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "config".into())
    }

    fn location(&self, key: &str) -> String {
        match self.origins.get(key) {
            Some(Origin::File { line }) => format!("{}:{line}", self.source_name()),
            Some(Origin::Set) => "--set".into(),
            Some(Origin::Flag) => "--dimension".into(),
            Some(Origin::Env) => "EUQOE_CACHE_DIR".into(),
            None => "default".into(),
        }
    }

    fn error_at(&self, key: &str, msg: impl std::fmt::Display) -> CliError {
        CliError::config(format!("{}: {key}: {msg}", self.location(key)))
    }

    /// Validates a point, reporting the location of the offending key.
    pub fn check_point(&self, point: &Point) -> Result<(), CliError> {
        point.check().map_err(|(key, msg)| self.error_at(key, msg))
    }

    fn assign(
        &mut self,
        key: &'static str,
        v: &Value,
        origin: Origin,
        sweep: &mut SweepLists,
    ) -> Result<(), CliError> {
        self.origins.insert(key, origin);
        let loc = self.location(key);
        let bad = |what: &str| CliError::config(format!("{loc}: {key}: expected {what}, got {v}"));
        let num = |v: &Value| match v {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        };
        let text = |v: &Value| match v {
            Value::String(s) => Some(s.clone()),
            _ => None,
        };
        let count = |v: &Value| match v {
            Value::Integer(i) if *i >= 0 => Some(*i as usize),
            Value::Float(x) if *x >= 0.0 && x.fract() == 0.0 && *x < 1e15 => Some(*x as usize),
            _ => None,
        };
        fn list<T>(v: &Value, f: impl Fn(&Value) -> Option<T>) -> Option<Vec<T>> {
            match v {
                Value::Array(items) => items.iter().map(f).collect(),
                other => f(other).map(|x| vec![x]),
            }
        }
        let b = &mut self.base;
        match key {
            "engine.omega1" => b.omega1 = num(v).ok_or_else(|| bad("a number"))?,
            "engine.omega2" => b.omega2 = num(v).ok_or_else(|| bad("a number"))?,
            "engine.alpha_aH" => b.alpha_ah = num(v).ok_or_else(|| bad("a number"))?,
            "engine.aH2" => b.a_h2 = num(v).ok_or_else(|| bad("a number"))?,
            "engine.tau_a" => b.tau_a = num(v).ok_or_else(|| bad("a number"))?,
            "state.p" => b.p = num(v).ok_or_else(|| bad("a number"))?,
            "tol.rel" => b.rel_tol = num(v).ok_or_else(|| bad("a number"))?,
            "tol.abs" => b.abs_tol = num(v).ok_or_else(|| bad("a number"))?,
            "engine.dimension" => {
                let s = text(v).ok_or_else(|| bad("\"1p1\" or \"1p3\""))?;
                b.dimension = s
                    .parse::<Dimension>()
                    .map_err(|_| bad("\"1p1\" or \"1p3\""))?;
            }
            "state.parity" => {
                let s = text(v).ok_or_else(|| bad("auto, symmetric or antisymmetric"))?;
                b.parity = ParityChoice::parse(&s)
                    .ok_or_else(|| bad("auto, symmetric or antisymmetric"))?;
            }
            "sweep.axis" => {
                sweep.axis =
                    list(v, text).ok_or_else(|| bad("a parameter name or a list of them"))?
            }
            "sweep.lo" => {
                sweep.lo = list(v, num).ok_or_else(|| bad("a number or a list of numbers"))?
            }
            "sweep.hi" => {
                sweep.hi = list(v, num).ok_or_else(|| bad("a number or a list of numbers"))?
            }
            "sweep.count" => {
                sweep.count = list(v, count).ok_or_else(|| bad("a non-negative integer"))?
            }
            "sweep.spacing" => sweep.spacing = list(v, text).ok_or_else(|| bad("linear or log"))?,
            "cache.dir" => self.cache_dir = PathBuf::from(text(v).ok_or_else(|| bad("a path"))?),
            "oracle.grid" => self.oracle_grid = num(v).ok_or_else(|| bad("a number"))?,
            _ => unreachable!("key list and match arms disagree on {key}"),
        }
        Ok(())
    }

    fn build_axes(&self, s: &SweepLists) -> Result<Vec<Axis>, CliError> {
        let n = s.axis.len();
        if n == 0 {
            return Ok(Vec::new());
        }
        if n > 3 {
            return Err(self.error_at(
                "sweep.axis",
                format!("at most 3 axes are supported, got {n}"),
            ));
        }
        fn pick<T: Clone>(v: &[T], i: usize) -> Option<T> {
            if v.len() == 1 {
                v.first().cloned()
            } else {
                v.get(i).cloned()
            }
        }
        for (key, len) in [
            ("sweep.lo", s.lo.len()),
            ("sweep.hi", s.hi.len()),
            ("sweep.count", s.count.len()),
            ("sweep.spacing", s.spacing.len()),
        ] {
            if len > 1 && len != n {
                return Err(self.error_at(key, format!("has {len} entries for {n} axes")));
            }
        }
        let mut axes = Vec::with_capacity(n);
        for (i, name) in s.axis.iter().enumerate() {
            let key = AxisKey::parse(name).ok_or_else(|| {
                let names: Vec<_> = AxisKey::ALL.iter().map(|a| a.key()).collect();
                self.error_at(
                    "sweep.axis",
                    format!(
                        "cannot sweep '{name}', expected one of {}",
                        names.join(", ")
                    ),
                )
            })?;
            if axes.iter().any(|a: &Axis| a.key == key) {
                return Err(self.error_at("sweep.axis", format!("'{name}' appears twice")));
            }
            let lo = pick(&s.lo, i).ok_or_else(|| {
                self.error_at("sweep.axis", format!("axis '{name}' needs sweep.lo"))
            })?;
            let hi = pick(&s.hi, i).ok_or_else(|| {
                self.error_at("sweep.axis", format!("axis '{name}' needs sweep.hi"))
            })?;
            let count = pick(&s.count, i).unwrap_or(DEFAULT_SWEEP_COUNT);
            let spacing = match pick(&s.spacing, i).as_deref().map(str::trim) {
                None | Some("linear") | Some("lin") => Spacing::Linear,
                Some("log") => Spacing::Log,
                Some(other) => {
                    return Err(self.error_at(
                        "sweep.spacing",
                        format!("expected linear or log, got '{other}'"),
                    ))
                }
            };
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(self.error_at("sweep.lo", "bounds must be finite"));
            }
            if spacing == Spacing::Log && !(lo > 0.0 && hi > 0.0) {
                return Err(self.error_at("sweep.spacing", "log spacing needs positive bounds"));
            }
            axes.push(Axis {
                key,
                lo,
                hi,
                count,
                spacing,
            });
        }
        Ok(axes)
    }

    /// Grid points of the sweep in lexicographic order, first axis slowest.
    pub fn grid(&self) -> Vec<Point> {
        let mut points = vec![self.base];
        for axis in &self.axes {
            let values = axis.values();
            points = points
                .iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = *p;
                        q.set(axis.key, v);
                        q
                    })
                })
                .collect();
        }
        points
    }

    /// Validates every grid point, reporting the swept key on failure.
    pub fn check_grid(&self) -> Result<(), CliError> {
        for p in self.grid() {
            if let Err((key, msg)) = p.check() {
                let key = self
                    .axes
                    .iter()
                    .find(|a| a.key.key() == key)
                    .map(|a| a.key.key())
                    .unwrap_or("sweep.axis");
                let point: Vec<String> = self
                    .axes
                    .iter()
                    .map(|a| format!("{}={}", a.key.column(), p.get(a.key)))
                    .collect();
                return Err(self.error_at(key, format!("grid point {}: {msg}", point.join(" "))));
            }
        }
        Ok(())
    }
}

fn unknown_key_message(location: &str, key: &str) -> String {
    format!(
        "{location}: unknown key '{key}', expected one of {}",
        KEYS.join(", ")
    )
}

/// Parses the value part of `--set`: a TOML value if it is one, a
/// comma-separated list of them, or else a bare string.
fn parse_override(raw: &str) -> Value {
    fn scalar(raw: &str) -> Value {
        let raw = raw.trim();
        toml::from_str::<BTreeMap<String, Value>>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut m| m.remove("v"))
            .unwrap_or_else(|| Value::String(raw.to_string()))
    }
    match scalar(raw) {
        Value::String(_) if raw.contains(',') => Value::Array(raw.split(',').map(scalar).collect()),
        v => v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_values() {
        assert_eq!(parse_override("0.5"), Value::Float(0.5));
        assert_eq!(parse_override("3"), Value::Integer(3));
        assert_eq!(parse_override("log"), Value::String("log".into()));
        assert_eq!(parse_override(" /tmp/x "), Value::String("/tmp/x".into()));
        assert_eq!(
            parse_override("engine.alpha_aH,engine.tau_a"),
            Value::Array(vec![
                Value::String("engine.alpha_aH".into()),
                Value::String("engine.tau_a".into())
            ])
        );
        assert_eq!(
            parse_override("0.1,2"),
            Value::Array(vec![Value::Float(0.1), Value::Integer(2)])
        );
    }

    #[test]
    fn axis_values() {
        let a = Axis {
            key: AxisKey::AlphaAH,
            lo: 0.55,
            hi: 0.95,
            count: 9,
            spacing: Spacing::Linear,
        };
        let v = a.values();
        assert_eq!(v.len(), 9);
        assert_eq!(v[0], 0.55);
        assert!((v[8] - 0.95).abs() < 1e-15);
        assert!(Axis {
            count: 0,
            ..a.clone()
        }
        .values()
        .is_empty());
        assert_eq!(Axis { count: 1, ..a }.values(), vec![0.55]);
    }

    #[test]
    fn grid_is_lexicographic() {
        let sets = [
            "sweep.axis=engine.alpha_aH,engine.tau_a",
            "sweep.lo=0.6,1",
            "sweep.hi=0.9,2",
            "sweep.count=2",
        ]
        .map(String::from);
        let cfg = RunConfig::load(None, &sets, None, None).unwrap();
        let g: Vec<(f64, f64)> = cfg.grid().iter().map(|p| (p.alpha_ah, p.tau_a)).collect();
        assert_eq!(g, vec![(0.6, 1.0), (0.6, 2.0), (0.9, 1.0), (0.9, 2.0)]);
    }

    #[test]
    fn axis_names() {
        assert_eq!(AxisKey::parse("tau_a"), Some(AxisKey::TauA));
        assert_eq!(AxisKey::parse("engine.aH2"), Some(AxisKey::AH2));
        assert_eq!(AxisKey::parse("engine.dimension"), None);
        assert_eq!(AxisKey::AlphaAH.column(), "alpha_aH");
    }
}
