use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use geolen_core::hyperbolic::NormConvention;
use geolen_core::surface::{Word, DEFAULT_Y_MAX};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error{}: {message}", fmt_line(*line))]
    Parse {
        line: Option<usize>,
        message: String,
    },
    #[error("invalid `{key}`{}: {message}{}", fmt_line(*line), fmt_suggestion(suggestion))]
    Validation {
        key: String,
        message: String,
        line: Option<usize>,
        suggestion: Option<String>,
    },
}

fn fmt_line(line: Option<usize>) -> String {
    line.map(|l| format!(" at line {l}")).unwrap_or_default()
}

fn fmt_suggestion(s: &Option<String>) -> String {
    s.as_ref()
        .map(|s| format!(" (did you mean `{s}`?)"))
        .unwrap_or_default()
}

impl ConfigError {
    pub fn key(&self) -> Option<&str> {
        match self {
            Self::Validation { key, .. } => Some(key),
            _ => None,
        }
    }

    pub fn suggestion(&self) -> Option<&str> {
        match self {
            Self::Validation { suggestion, .. } => suggestion.as_deref(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    Preset,
    FenchelNielsen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceConfig {
    #[serde(rename = "type")]
    pub kind: SurfaceKind,
    pub preset: String,
    pub l_alpha: f64,
    pub tau: f64,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        Self {
            kind: SurfaceKind::Preset,
            preset: "modular".into(),
            l_alpha: 1.7,
            tau: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeodesicConfig {
    pub words: Vec<String>,
    /// Samples per geodesic; 0 picks a power of two from the length.
    pub samples: usize,
}

impl Default for GeodesicConfig {
    fn default() -> Self {
        Self {
            words: vec!["A".into(), "B".into(), "AB".into()],
            samples: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationConfig {
    pub max_word_len: usize,
    pub coset_radius: f64,
    pub kernel_cutoff: f64,
    pub y_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cache: Option<PathBuf>,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            max_word_len: 8,
            coset_radius: 10.0,
            kernel_cutoff: 5.0,
            y_max: DEFAULT_Y_MAX,
            cache: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    pub cells: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self { cells: 400 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub arclength: f64,
    pub area: f64,
    pub operator_identity: f64,
    pub operator_inequality: f64,
    pub constant_reproduction: f64,
    pub pde_mean: f64,
    pub wp_integral: f64,
    pub max_principle: f64,
    pub gardiner_rel: f64,
    pub gardiner_abs: f64,
    pub dual_route: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            arclength: 1e-9,
            area: 1e-3,
            operator_identity: 1e-12,
            operator_inequality: 1e-10,
            constant_reproduction: 1e-3,
            pde_mean: 1e-2,
            wp_integral: 5e-3,
            max_principle: 1e-3,
            gardiner_rel: 1e-3,
            gardiner_abs: 1e-6,
            dual_route: 1e-6,
        }
    }
}

/// Which groups of checks run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub geometry: bool,
    pub operators: bool,
    pub resolvent: bool,
    pub first_variation: bool,
    pub second_variation: bool,
    pub psh: bool,
    pub family: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self::all(true)
    }
}

impl SuiteConfig {
    pub fn all(on: bool) -> Self {
        Self {
            geometry: on,
            operators: on,
            resolvent: on,
            first_variation: on,
            second_variation: on,
            psh: on,
            family: on,
        }
    }

    pub fn intersect(&self, o: &Self) -> Self {
        Self {
            geometry: self.geometry && o.geometry,
            operators: self.operators && o.operators,
            resolvent: self.resolvent && o.resolvent,
            first_variation: self.first_variation && o.first_variation,
            second_variation: self.second_variation && o.second_variation,
            psh: self.psh && o.psh,
            family: self.family && o.family,
        }
    }

    pub fn needs_surface_resolvent(&self) -> bool {
        self.resolvent || self.second_variation || self.psh
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub convention: NormConvention,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub surface: SurfaceConfig,
    pub geodesics: GeodesicConfig,
    pub truncation: TruncationConfig,
    pub mesh: MeshConfig,
    pub tolerances: Tolerances,
    pub suite: SuiteConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 20240917,
            convention: NormConvention::Hermitian,
            out: None,
            surface: SurfaceConfig::default(),
            geodesics: GeodesicConfig::default(),
            truncation: TruncationConfig::default(),
            mesh: MeshConfig::default(),
            tolerances: Tolerances::default(),
            suite: SuiteConfig::default(),
        }
    }
}

/// Keys that are optional and absent from the serialized defaults.
const OPTIONAL_KEYS: &[&str] = &["out", "truncation.cache"];

/// Every dotted key the configuration accepts.
pub fn known_keys() -> BTreeSet<String> {
    let value = toml::Value::try_from(RunConfig::default()).expect("defaults serialize");
    let mut keys = BTreeSet::new();
    collect_keys(&value, "", &mut keys);
    keys.extend(OPTIONAL_KEYS.iter().map(|s| s.to_string()));
    keys
}

fn collect_keys(v: &toml::Value, prefix: &str, out: &mut BTreeSet<String>) {
    if let toml::Value::Table(t) = v {
        for (k, v) in t {
            let key = join(prefix, k);
            if v.is_table() {
                collect_keys(v, &key, out);
            } else {
                out.insert(key);
            }
        }
    }
}

fn join(prefix: &str, k: &str) -> String {
    if prefix.is_empty() {
        k.to_string()
    } else {
        format!("{prefix}.{k}")
    }
}

/// Closest known key, if any is reasonably close.
pub fn suggest(key: &str, known: &BTreeSet<String>) -> Option<String> {
    known
        .iter()
        .map(|k| (strsim::levenshtein(key, k), k))
        .filter(|(d, k)| *d <= 3.max(k.len() / 4))
        .min()
        .map(|(_, k)| k.clone())
}

fn find_unknown(
    v: &toml::Value,
    prefix: &str,
    known: &BTreeSet<String>,
    tables: &BTreeSet<String>,
) -> Option<String> {
    let toml::Value::Table(t) = v else {
        return None;
    };
    for (k, v) in t {
        let key = join(prefix, k);
        if v.is_table() && tables.contains(&key) {
            if let Some(u) = find_unknown(v, &key, known, tables) {
                return Some(u);
            }
        } else if !known.contains(&key) {
            return Some(key);
        }
    }
    None
}

/// Line (1-based) where a dotted key is set, found by tracking table
/// headers.
fn locate_key(text: &str, key: &str) -> Option<usize> {
    let (table, leaf) = key.rsplit_once('.').unwrap_or(("", key));
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(h) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = h.trim().to_string();
            continue;
        }
        if let Some((k, _)) = line.split_once('=') {
            let k = k.trim().trim_matches('"');
            if (current == table && k == leaf) || (current.is_empty() && k == key) {
                return Some(i + 1);
            }
        }
    }
    None
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let value: toml::Value = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let known = known_keys();
    let tables: BTreeSet<String> = known
        .iter()
        .flat_map(|k| {
            let parts: Vec<&str> = k.split('.').collect();
            (1..parts.len())
                .map(|n| parts[..n].join("."))
                .collect::<Vec<_>>()
        })
        .collect();
    if let Some(key) = find_unknown(&value, "", &known, &tables) {
        return Err(ConfigError::Validation {
            line: locate_key(text, &key),
            suggestion: suggest(&key, &known),
            message: "unknown key".into(),
            key,
        });
    }
    let config: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.span().map(|s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    config.validate().map_err(|e| match e {
        ConfigError::Validation {
            key,
            message,
            suggestion,
            ..
        } => ConfigError::Validation {
            line: locate_key(text, &key),
            key,
            message,
            suggestion,
        },
        other => other,
    })?;
    Ok(config)
}

fn invalid(key: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Validation {
        key: key.into(),
        message: message.to_string(),
        line: None,
        suggestion: None,
    }
}

fn check_range(key: &str, v: f64, lo: f64, hi: f64) -> Result<(), ConfigError> {
    if !(v >= lo && v <= hi) {
        return Err(invalid(key, format!("{v} is outside [{lo}, {hi}]")));
    }
    Ok(())
}

pub const PRESETS: &[&str] = &["modular"];

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.surface;
        if !(s.l_alpha > 0.0) || !s.l_alpha.is_finite() {
            return Err(invalid(
                "surface.l_alpha",
                format!("must be positive, got {}", s.l_alpha),
            ));
        }
        check_range("surface.l_alpha", s.l_alpha, 0.05, 20.0)?;
        if !s.tau.is_finite() {
            return Err(invalid("surface.tau", "must be finite"));
        }
        if !PRESETS.contains(&s.preset.as_str()) {
            return Err(ConfigError::Validation {
                key: "surface.preset".into(),
                message: format!("unknown preset {:?}", s.preset),
                line: None,
                suggestion: PRESETS.first().map(|p| p.to_string()),
            });
        }
        if self.geodesics.words.is_empty() {
            return Err(invalid("geodesics.words", "at least one word is required"));
        }
        for w in &self.geodesics.words {
            let parsed: Word = w
                .parse()
                .map_err(|e| invalid("geodesics.words", format!("{w:?}: {e}")))?;
            if parsed.is_empty() {
                return Err(invalid("geodesics.words", "the identity has no geodesic"));
            }
        }
        let n = self.geodesics.samples;
        if n != 0 && (n < 64 || !n.is_power_of_two() || n > 1 << 16) {
            return Err(invalid(
                "geodesics.samples",
                format!("{n} must be 0 or a power of two in [64, 65536]"),
            ));
        }
        let t = &self.truncation;
        if !(1..=16).contains(&t.max_word_len) {
            return Err(invalid(
                "truncation.max_word_len",
                format!("{} is outside [1, 16]", t.max_word_len),
            ));
        }
        check_range("truncation.coset_radius", t.coset_radius, 2.0, 14.0)?;
        check_range("truncation.kernel_cutoff", t.kernel_cutoff, 3.0, 12.0)?;
        check_range("truncation.y_max", t.y_max, 10.0, 1e8)?;
        if !(50..=100_000).contains(&self.mesh.cells) {
            return Err(invalid(
                "mesh.cells",
                format!("{} is outside [50, 100000]", self.mesh.cells),
            ));
        }
        let tol = &self.tolerances;
        for (k, v) in [
            ("arclength", tol.arclength),
            ("area", tol.area),
            ("operator_identity", tol.operator_identity),
            ("operator_inequality", tol.operator_inequality),
            ("constant_reproduction", tol.constant_reproduction),
            ("pde_mean", tol.pde_mean),
            ("wp_integral", tol.wp_integral),
            ("max_principle", tol.max_principle),
            ("gardiner_rel", tol.gardiner_rel),
            ("gardiner_abs", tol.gardiner_abs),
            ("dual_route", tol.dual_route),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(invalid(
                    &format!("tolerances.{k}"),
                    format!("{v} is outside (0, 1)"),
                ));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
