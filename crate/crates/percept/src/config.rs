//! Flat `key = value` study configuration.
//!
//! Settings resolve in three layers: built-in defaults, then the config
//! file, then command-line flags. Relative paths in a config file are
//! taken relative to the file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use percept_core::{AudioConfig, CvMethod, Window};

use crate::error::{PerceptError, Result};

/// How a setting is parsed and whether it names a file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyKind {
    /// Single path.
    Path,
    /// Comma-separated paths.
    PathList,
    /// Anything else.
    Value,
    /// Boolean switch; a bare command-line flag sets it.
    Switch,
}

/// One configuration key.
#[derive(Debug, Clone, Copy)]
pub struct Key {
    /// Name in config files; the flag is the same with `-` for `_`.
    pub name: &'static str,
    /// Parse class.
    pub kind: KeyKind,
    /// Built-in default, if any.
    pub default: Option<&'static str>,
    /// Help text.
    pub help: &'static str,
}

const fn key(name: &'static str, kind: KeyKind, default: Option<&'static str>, help: &'static str) -> Key {
    Key { name, kind, default, help }
}

/// Every recognised key.
pub const KEYS: &[Key] = &[
    key("midi_dir", KeyKind::Path, None, "directory of .mid/.midi files"),
    key("wav_dir", KeyKind::Path, None, "directory of .wav files"),
    key("annotations", KeyKind::Path, None, "song_id,track_id,category sidecar"),
    key("tempo", KeyKind::Path, None, "song_id,beats_per_second sidecar"),
    key("calibration", KeyKind::Path, None, "velocity,volume,dB calibration grid"),
    key("ratings", KeyKind::PathList, None, "ratings files, one per rated feature"),
    key("features", KeyKind::PathList, None, "feature tables joined on item id"),
    key("responses", KeyKind::Path, None, "table holding the response columns"),
    key("out_dir", KeyKind::Path, Some("."), "output directory"),
    key("merge_window", KeyKind::Value, Some("0.05"), "onset merge window in seconds"),
    key("frame_length", KeyKind::Value, Some("2048"), "STFT frame length in samples"),
    key("hop", KeyKind::Value, Some("1024"), "STFT hop in samples"),
    key("window", KeyKind::Value, Some("hann"), "analysis window: hann or rect"),
    key("brightness_cutoffs", KeyKind::Value, Some("1000,1500,3000"), "three brightness cutoffs in Hz"),
    key("rolloff_fractions", KeyKind::Value, Some("0.85,0.95"), "two rolloff energy fractions"),
    key("scale_min", KeyKind::Value, Some("1"), "lowest valid rating"),
    key("scale_max", KeyKind::Value, Some("9"), "highest valid rating"),
    key("trim", KeyKind::Value, Some("true"), "drop flagged raters from item means"),
    key("target", KeyKind::Value, None, "response column to model"),
    key("predictors", KeyKind::Value, None, "comma-separated predictor columns (default: all feature columns)"),
    key("method", KeyKind::Value, Some("ols"), "ols or pls"),
    key("components", KeyKind::Value, Some("2"), "PLS factor count"),
    key("folds", KeyKind::Value, Some("10"), "cross-validation folds"),
    key("repeats", KeyKind::Value, Some("50"), "cross-validation repeats"),
    key("seed", KeyKind::Value, Some("42"), "fold shuffle seed"),
    key("threads", KeyKind::Value, Some("0"), "worker threads, 0 for all cores"),
    key("sweep", KeyKind::Switch, Some("false"), "also report R2_cv for every PLS factor count"),
];

fn lookup(name: &str) -> Option<&'static Key> {
    KEYS.iter().find(|k| k.name == name)
}

/// Parses config file text into raw settings.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(PerceptError::Usage(format!("config line {}: expected key = value", i + 1)));
        };
        let k = k.trim();
        if lookup(k).is_none() {
            return Err(PerceptError::Usage(format!("config line {}: unknown key `{k}`", i + 1)));
        }
        out.insert(k.to_owned(), v.trim().to_owned());
    }
    Ok(out)
}

/// Rewrites relative path settings to sit under `base`.
fn rebase_paths(settings: &mut BTreeMap<String, String>, base: &Path) {
    for (k, v) in settings.iter_mut() {
        let rebase = |p: &str| {
            let p = Path::new(p);
            if p.is_relative() { base.join(p) } else { p.to_path_buf() }.display().to_string()
        };
        match lookup(k).map(|k| k.kind) {
            Some(KeyKind::Path) => *v = rebase(v),
            Some(KeyKind::PathList) => *v = split_list(v).iter().map(|p| rebase(p)).collect::<Vec<_>>().join(","),
            _ => {}
        }
    }
}

fn split_list(v: &str) -> Vec<String> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned).collect()
}

/// Method family chosen for `fit` and `cv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodName {
    /// Ordinary least squares.
    Ols,
    /// Partial least squares.
    Pls,
}

/// Resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    /// MIDI corpus directory.
    pub midi_dir: Option<PathBuf>,
    /// WAV corpus directory.
    pub wav_dir: Option<PathBuf>,
    /// Track category sidecar.
    pub annotations: Option<PathBuf>,
    /// Tempo sidecar.
    pub tempo: Option<PathBuf>,
    /// Calibration grid.
    pub calibration: Option<PathBuf>,
    /// Ratings files.
    pub ratings: Vec<PathBuf>,
    /// Feature tables.
    pub features: Vec<PathBuf>,
    /// Response table.
    pub responses: Option<PathBuf>,
    /// Output directory.
    pub out_dir: PathBuf,
    /// Onset merge window in seconds.
    pub merge_window: f64,
    /// Spectral analysis settings.
    pub audio: AudioConfig,
    /// Rating scale bounds.
    pub scale: (f64, f64),
    /// Whether item means leave out flagged raters.
    pub trim: bool,
    /// Response column.
    pub target: Option<String>,
    /// Predictor columns; empty means all feature columns.
    pub predictors: Vec<String>,
    /// Model family.
    pub method: MethodName,
    /// PLS factor count.
    pub components: usize,
    /// Cross-validation folds.
    pub folds: usize,
    /// Cross-validation repeats.
    pub repeats: usize,
    /// Fold shuffle seed.
    pub seed: u64,
    /// Worker threads, 0 for the default pool.
    pub threads: usize,
    /// Report R2_cv over every PLS factor count.
    pub sweep: bool,
    settings: BTreeMap<String, String>,
}

fn parse<T: std::str::FromStr>(settings: &BTreeMap<String, String>, name: &str) -> Result<T> {
    let v = &settings[name];
    v.parse()
        .map_err(|_| PerceptError::Usage(format!("invalid value `{v}` for {name}")))
}

fn parse_array<const N: usize>(settings: &BTreeMap<String, String>, name: &str) -> Result<[f64; N]> {
    let bad = || PerceptError::Usage(format!("{name} needs {N} comma-separated numbers"));
    let vals: Vec<f64> = split_list(&settings[name])
        .iter()
        .map(|s| s.parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    vals.try_into().map_err(|_| bad())
}

fn ensure(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(PerceptError::Usage(msg.to_owned()))
    }
}

impl StudyConfig {
    /// Merges defaults, an optional config file and flag overrides.
    pub fn resolve(config_file: Option<&Path>, overrides: &BTreeMap<String, String>) -> Result<Self> {
        let mut settings: BTreeMap<String, String> = KEYS
            .iter()
            .filter_map(|k| k.default.map(|d| (k.name.to_owned(), d.to_owned())))
            .collect();
        if let Some(path) = config_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| PerceptError::Usage(format!("{}: {e}", path.display())))?;
            let mut file = parse_config_text(&text)?;
            rebase_paths(&mut file, path.parent().unwrap_or(Path::new(".")));
            settings.extend(file);
        }
        for (k, v) in overrides {
            if lookup(k).is_none() {
                return Err(PerceptError::Usage(format!("unknown key `{k}`")));
            }
            settings.insert(k.clone(), v.clone());
        }
        Self::from_settings(settings)
    }

    fn from_settings(settings: BTreeMap<String, String>) -> Result<Self> {
        let path = |name: &str| settings.get(name).filter(|v| !v.is_empty()).map(PathBuf::from);
        let list = |name: &str| settings.get(name).map_or_else(Vec::new, |v| split_list(v));
        let window = match settings["window"].as_str() {
            "hann" => Window::Hann,
            "rect" => Window::Rect,
            other => return Err(PerceptError::Usage(format!("unknown window `{other}`"))),
        };
        let method = match settings["method"].as_str() {
            "ols" => MethodName::Ols,
            "pls" => MethodName::Pls,
            other => return Err(PerceptError::Usage(format!("unknown method `{other}`, expected ols or pls"))),
        };
        let audio = AudioConfig {
            frame_length: parse(&settings, "frame_length")?,
            hop: parse(&settings, "hop")?,
            window,
            brightness_cutoffs: parse_array(&settings, "brightness_cutoffs")?,
            rolloff_fractions: parse_array(&settings, "rolloff_fractions")?,
        };
        let cfg = Self {
            midi_dir: path("midi_dir"),
            wav_dir: path("wav_dir"),
            annotations: path("annotations"),
            tempo: path("tempo"),
            calibration: path("calibration"),
            ratings: list("ratings").into_iter().map(PathBuf::from).collect(),
            features: list("features").into_iter().map(PathBuf::from).collect(),
            responses: path("responses"),
            out_dir: path("out_dir").unwrap_or_else(|| PathBuf::from(".")),
            merge_window: parse(&settings, "merge_window")?,
            audio,
            scale: (parse(&settings, "scale_min")?, parse(&settings, "scale_max")?),
            trim: parse(&settings, "trim")?,
            target: settings.get("target").filter(|v| !v.is_empty()).cloned(),
            predictors: list("predictors"),
            method,
            components: parse(&settings, "components")?,
            folds: parse(&settings, "folds")?,
            repeats: parse(&settings, "repeats")?,
            seed: parse(&settings, "seed")?,
            threads: parse(&settings, "threads")?,
            sweep: parse(&settings, "sweep")?,
            settings,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        ensure(self.merge_window.is_finite() && self.merge_window >= 0.0, "merge_window must be >= 0")?;
        ensure(self.audio.frame_length >= 2, "frame_length must be at least 2")?;
        ensure(self.audio.hop >= 1, "hop must be at least 1")?;
        ensure(
            self.audio.brightness_cutoffs.iter().all(|c| c.is_finite() && *c > 0.0),
            "brightness_cutoffs must be positive",
        )?;
        ensure(
            self.audio.rolloff_fractions.iter().all(|f| *f > 0.0 && *f <= 1.0),
            "rolloff_fractions must lie in (0, 1]",
        )?;
        ensure(
            self.scale.0.is_finite() && self.scale.1.is_finite() && self.scale.0 < self.scale.1,
            "scale_min must be below scale_max",
        )?;
        ensure(self.folds >= 2, "folds must be at least 2")?;
        ensure(self.repeats >= 1, "repeats must be at least 1")?;
        Ok(())
    }

    /// CV method implied by `method` and `components`.
    pub fn cv_method(&self) -> CvMethod {
        match self.method {
            MethodName::Ols => CvMethod::Ols,
            MethodName::Pls => CvMethod::Pls(self.components),
        }
    }

    /// Run parameters that shape results, as sorted `(key, value)` pairs.
    /// The output directory and thread count are left out because they
    /// never change a result.
    pub fn echo(&self) -> Vec<(String, String)> {
        self.settings
            .iter()
            .filter(|(k, _)| !matches!(k.as_str(), "out_dir" | "threads"))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    /// A path setting that must name an existing file or directory.
    pub fn require_path<'a>(&self, name: &str, value: &'a Option<PathBuf>) -> Result<&'a Path> {
        let p = value
            .as_deref()
            .ok_or_else(|| PerceptError::Usage(format!("missing setting `{name}`")))?;
        check_exists(p)?;
        Ok(p)
    }

    /// Checks that every optional path setting that is set exists.
    pub fn check_inputs(&self) -> Result<()> {
        let singles = [&self.midi_dir, &self.wav_dir, &self.annotations, &self.tempo, &self.calibration, &self.responses];
        for p in singles.into_iter().flatten() {
            check_exists(p)?;
        }
        for p in self.ratings.iter().chain(&self.features) {
            check_exists(p)?;
        }
        Ok(())
    }
}

fn check_exists(p: &Path) -> Result<()> {
    if p.exists() {
        Ok(())
    } else {
        Err(PerceptError::Usage(format!("{} does not exist", p.display())))
    }
}
