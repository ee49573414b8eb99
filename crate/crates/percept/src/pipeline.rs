//! One function per pipeline stage. Each returns its output files in
//! memory; nothing is written until the whole stage has succeeded.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use percept_core::audio::{extract_audio_features, read_wav};
use percept_core::midi::{annotate_tracks, parse_smf};
use percept_core::midi_features::extract_midi_features;
use percept_core::regress::{adjusted_r2, ols_fit, pls_fit, Predictor};
use percept_core::stats::{cross_correlation_matrix, flag_outlier_raters, inter_rater_agreement, item_mean_ratings};
use percept_core::{
    AgreementReport, AudioFeatureVector, CalibrationCurve, CvMethod, Design, MidiFeatureConfig,
    MidiFeatureVector, RatingMatrix, RegressError,
};

use crate::config::{MethodName, StudyConfig};
use crate::error::{PerceptError, Result};
use crate::formats::{self, full_precision, FeatureTable};
use crate::parallel::{ordered_map, parallel_repeated_kfold_cv, with_threads};
use crate::report::{csv_text, fmt2, fmt_p, KeyValues, ReportTable};

/// Pipeline stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Symbolic features from a MIDI corpus.
    ExtractMidi,
    /// Spectral features from a WAV corpus.
    ExtractAudio,
    /// Rater agreement and item means.
    Agreement,
    /// Cross-correlation grid.
    Xcorr,
    /// Model fit with cross-validated R².
    Fit,
    /// Repeated k-fold cross-validation.
    Cv,
}

impl Command {
    /// Every stage.
    pub const ALL: [Self; 6] = [
        Self::ExtractMidi,
        Self::ExtractAudio,
        Self::Agreement,
        Self::Xcorr,
        Self::Fit,
        Self::Cv,
    ];

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            Self::ExtractMidi => "extract-midi",
            Self::ExtractAudio => "extract-audio",
            Self::Agreement => "agreement",
            Self::Xcorr => "xcorr",
            Self::Fit => "fit",
            Self::Cv => "cv",
        }
    }

    /// Short description for help output.
    pub fn about(self) -> &'static str {
        match self {
            Self::ExtractMidi => "Compute note density, sound level, pitch and articulation per song",
            Self::ExtractAudio => "Compute spectral descriptors per clip",
            Self::Agreement => "Rater agreement, flagged raters and item mean ratings",
            Self::Xcorr => "Pairwise correlations with significance stars",
            Self::Fit => "Fit an OLS or PLS model of one response",
            Self::Cv => "Repeated k-fold cross-validated R2",
        }
    }

    fn file_stem(self) -> String {
        self.name().replace('-', "_")
    }
}

/// One output file.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    /// File name inside the output directory.
    pub name: String,
    /// Full contents.
    pub contents: String,
}

/// Everything a stage produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outputs {
    /// Files in write order.
    pub files: Vec<OutputFile>,
    /// Human report, also written as a `.txt` file.
    pub report: String,
}

impl Outputs {
    fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push(OutputFile { name: name.into(), contents });
    }

    fn add_report(&mut self, name: impl Into<String>, table: &ReportTable) {
        let text = table.render();
        if !self.report.is_empty() {
            self.report.push('\n');
        }
        self.report.push_str(&text);
        self.add(name, text);
    }

    /// Contents of a file by name.
    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.contents.as_str())
    }

    /// Writes every file into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| PerceptError::io(dir, e))?;
        for f in &self.files {
            let path = dir.join(&f.name);
            std::fs::write(&path, &f.contents).map_err(|e| PerceptError::io(&path, e))?;
        }
        Ok(())
    }
}

/// Runs one stage on the configured thread pool.
pub fn run_pipeline(cfg: &StudyConfig, command: Command) -> Result<Outputs> {
    cfg.check_inputs()?;
    let mut out = with_threads(cfg.threads, || match command {
        Command::ExtractMidi => extract_midi(cfg),
        Command::ExtractAudio => extract_audio(cfg),
        Command::Agreement => agreement(cfg),
        Command::Xcorr => xcorr(cfg),
        Command::Fit => fit(cfg),
        Command::Cv => cv(cfg),
    })??;
    out.add(
        format!("{}_params.csv", command.file_stem()),
        csv_text(&["key", "value"], cfg.echo().into_iter().map(|(k, v)| [k, v])),
    );
    Ok(out)
}

fn list_files(dir: &Path, extensions: &[&str]) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| PerceptError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| PerceptError::io(dir, e))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if path.is_file() && ext.is_some_and(|e| extensions.contains(&e.as_str())) {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(PerceptError::Data(format!(
            "{}: no {} files",
            dir.display(),
            extensions.join("/")
        )));
    }
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| PerceptError::io(path, e))
}

fn opt_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), fmt2)
}

/// Per-song symbolic features, one row per MIDI file in name order.
pub fn midi_feature_table(cfg: &StudyConfig) -> Result<(FeatureTable, Vec<String>)> {
    let dir = cfg.require_path("midi_dir", &cfg.midi_dir)?;
    let files = list_files(dir, &["mid", "midi"])?;
    let annotations = cfg.annotations.as_deref().map(formats::read_annotations).transpose()?.unwrap_or_default();
    let tempo = cfg.tempo.as_deref().map(formats::read_tempo).transpose()?.unwrap_or_default();
    let calibration = match cfg.calibration.as_deref() {
        Some(p) => CalibrationCurve::Table(formats::read_calibration(p)?),
        None => CalibrationCurve::Logarithmic,
    };
    let fc = MidiFeatureConfig {
        merge_window: cfg.merge_window,
        calibration,
        ..MidiFeatureConfig::default()
    };
    let empty = BTreeMap::new();
    let vectors = ordered_map(&files, |path| {
        let id = stem(path);
        let midi_err = |source| PerceptError::Midi {
            context: path.display().to_string(),
            source,
        };
        let song = parse_smf(&read_bytes(path)?).map_err(midi_err)?.with_id(id.clone());
        let song = annotate_tracks(song, annotations.get(&id).unwrap_or(&empty)).map_err(midi_err)?;
        Ok::<_, PerceptError>((id.clone(), extract_midi_features(&song, &fc, tempo.get(&id).copied())))
    })?;
    let mut notes = Vec::new();
    let ids: Vec<&String> = vectors.iter().map(|(id, _)| id).collect();
    let orphans: Vec<&str> = annotations
        .keys()
        .chain(tempo.keys())
        .filter(|k| !ids.contains(k))
        .map(String::as_str)
        .collect();
    if !orphans.is_empty() {
        notes.push(format!("Sidecar entries without a MIDI file: {}", orphans.join(", ")));
    }
    let mut table = FeatureTable::new("song_id", MidiFeatureVector::NAMES.iter().map(|s| (*s).to_owned()).collect());
    for (id, v) in vectors {
        table.push(id, v.values().to_vec());
    }
    Ok((table, notes))
}

fn extract_midi(cfg: &StudyConfig) -> Result<Outputs> {
    let (table, notes) = midi_feature_table(cfg)?;
    let mut headers = vec!["song_id"];
    headers.extend(MidiFeatureVector::NAMES);
    let mut human = ReportTable::new("MIDI features per song", &headers);
    for (id, row) in table.ids.iter().zip(&table.rows) {
        human.row(std::iter::once(id.clone()).chain(row.iter().map(|v| opt_cell(*v))).collect());
    }
    human.note("- marks a category without qualifying notes");
    for n in notes {
        human.note(n);
    }
    human.echo_parameters(&cfg.echo());
    let mut out = Outputs::default();
    out.add("midi_features.csv", table.to_csv());
    out.add_report("midi_features.txt", &human);
    Ok(out)
}

/// Per-clip spectral features, one row per WAV file in name order.
pub fn audio_feature_table(cfg: &StudyConfig) -> Result<FeatureTable> {
    let dir = cfg.require_path("wav_dir", &cfg.wav_dir)?;
    let files = list_files(dir, &["wav"])?;
    let vectors = ordered_map(&files, |path| {
        let audio_err = |source| PerceptError::Audio {
            context: path.display().to_string(),
            source,
        };
        let clip = read_wav(&read_bytes(path)?).map_err(audio_err)?;
        let v = extract_audio_features(&clip, &cfg.audio).map_err(audio_err)?;
        Ok::<_, PerceptError>((stem(path), v))
    })?;
    let mut table = FeatureTable::new("song_id", AudioFeatureVector::NAMES.iter().map(|s| (*s).to_owned()).collect());
    for (id, v) in vectors {
        table.push(id, v.values().iter().map(|x| Some(*x)).collect());
    }
    Ok(table)
}

fn extract_audio(cfg: &StudyConfig) -> Result<Outputs> {
    let table = audio_feature_table(cfg)?;
    let mut headers = vec!["song_id"];
    headers.extend(AudioFeatureVector::NAMES);
    let mut human = ReportTable::new("Audio features per clip", &headers);
    for (id, row) in table.ids.iter().zip(&table.rows) {
        human.row(std::iter::once(id.clone()).chain(row.iter().map(|v| opt_cell(*v))).collect());
    }
    human.echo_parameters(&cfg.echo());
    let mut out = Outputs::default();
    out.add("audio_features.csv", table.to_csv());
    out.add_report("audio_features.txt", &human);
    Ok(out)
}

/// Agreement results for one rated feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureAgreement {
    /// Feature name, the ratings file stem.
    pub feature: String,
    /// Full panel.
    pub full: AgreementReport,
    /// Flagged raters and their mean correlation with the others.
    pub flagged: Vec<(String, f64)>,
    /// Panel without flagged raters, when any were flagged.
    pub trimmed: Option<AgreementReport>,
    /// Item ids in file order.
    pub item_ids: Vec<String>,
    /// Item means, trimmed when configured.
    pub item_means: Vec<Option<f64>>,
}

/// Agreement statistics for one ratings matrix.
pub fn feature_agreement(feature: &str, m: &RatingMatrix, trim: bool) -> Result<FeatureAgreement> {
    let stats_err = |source| PerceptError::Stats {
        context: feature.to_owned(),
        source,
    };
    let full = inter_rater_agreement(m).map_err(stats_err)?;
    let flagged = if m.n_raters() >= 3 {
        flag_outlier_raters(m).map_err(stats_err)?
    } else {
        Vec::new()
    };
    let drop: Vec<&str> = flagged.iter().map(|(id, _)| id.as_str()).collect();
    let trimmed = if drop.is_empty() {
        None
    } else {
        let kept = m.without_raters(&drop).map_err(stats_err)?;
        Some(inter_rater_agreement(&kept).map_err(stats_err)?)
    };
    let item_means = item_mean_ratings(m, if trim { &drop } else { &[] }).map_err(stats_err)?;
    Ok(FeatureAgreement {
        feature: feature.to_owned(),
        full,
        flagged,
        trimmed,
        item_ids: m.item_ids().to_vec(),
        item_means,
    })
}

fn agreement(cfg: &StudyConfig) -> Result<Outputs> {
    if cfg.ratings.is_empty() {
        return Err(PerceptError::Usage("missing setting `ratings`".into()));
    }
    let results = cfg
        .ratings
        .iter()
        .map(|path| {
            let m = formats::load_ratings(path, cfg.scale)?;
            feature_agreement(&stem(path), &m, cfg.trim)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut kv = Vec::new();
    let mut human = ReportTable::new("Agreement among raters", &["Feature", "Raters", "Items", "Corr", "Alpha"]);
    for a in &results {
        let f = &a.feature;
        let mut push = |s: &str, v: String| kv.push([f.clone(), s.to_owned(), v]);
        push("n_raters", a.full.n_raters.to_string());
        push("n_items", a.full.n_items.to_string());
        push("mean_r", full_precision(a.full.mean_pairwise_r));
        push("alpha", full_precision(a.full.cronbach_alpha));
        push("flagged_raters", a.flagged.iter().map(|(id, _)| id.as_str()).collect::<Vec<_>>().join(";"));
        for (id, r) in &a.flagged {
            push(&format!("flagged_mean_r[{id}]"), full_precision(*r));
        }
        if let Some(t) = &a.trimmed {
            push("n_raters_trimmed", t.n_raters.to_string());
            push("mean_r_trimmed", full_precision(t.mean_pairwise_r));
            push("alpha_trimmed", full_precision(t.cronbach_alpha));
        }
        let with_trim = |full: f64, trimmed: Option<f64>| match trimmed {
            Some(t) => format!("{} ({})", fmt2(full), fmt2(t)),
            None => fmt2(full),
        };
        human.row(vec![
            f.clone(),
            a.full.n_raters.to_string(),
            a.full.n_items.to_string(),
            with_trim(a.full.mean_pairwise_r, a.trimmed.as_ref().map(|t| t.mean_pairwise_r)),
            with_trim(a.full.cronbach_alpha, a.trimmed.as_ref().map(|t| t.cronbach_alpha)),
        ]);
        if !a.flagged.is_empty() {
            let list: Vec<String> = a.flagged.iter().map(|(id, r)| format!("{id} (mean r {})", fmt2(*r))).collect();
            human.note(format!("{f}: flagged {}", list.join(", ")));
        }
    }
    human.note("Values in parentheses leave out the flagged raters.");
    human.note(if cfg.trim {
        "Item means leave out flagged raters."
    } else {
        "Item means use every rater."
    });
    human.echo_parameters(&cfg.echo());

    let mut means = FeatureTable::new("item_id", results.iter().map(|a| a.feature.clone()).collect());
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for (j, a) in results.iter().enumerate() {
        for (id, v) in a.item_ids.iter().zip(&a.item_means) {
            let i = *index.entry(id.clone()).or_insert_with(|| {
                means.push(id.clone(), vec![None; results.len()]);
                means.ids.len() - 1
            });
            means.rows[i][j] = *v;
        }
    }

    let mut out = Outputs::default();
    out.add("agreement.csv", csv_text(&["feature", "statistic", "value"], kv));
    out.add("item_means.csv", means.to_csv());
    out.add_report("agreement.txt", &human);
    Ok(out)
}

fn read_tables(paths: &[PathBuf]) -> Result<Option<FeatureTable>> {
    let mut joined: Option<FeatureTable> = None;
    for p in paths {
        let t = FeatureTable::read(p)?;
        joined = Some(match joined {
            Some(j) => j.join(&t)?,
            None => t,
        });
    }
    Ok(joined)
}

fn xcorr(cfg: &StudyConfig) -> Result<Outputs> {
    let mut paths: Vec<PathBuf> = cfg.responses.iter().cloned().collect();
    paths.extend(cfg.features.iter().cloned());
    let table = read_tables(&paths)?.ok_or_else(|| PerceptError::Usage("xcorr needs `responses` or `features`".into()))?;
    let columns: Vec<(String, Vec<Option<f64>>)> = table
        .columns
        .iter()
        .map(|c| (c.clone(), table.column(c).expect("own column")))
        .collect();
    let grid = cross_correlation_matrix(&columns);
    let k = columns.len();

    let mut rows = Vec::new();
    for i in 1..k {
        for j in 0..i {
            let (a, b) = (grid.names[i].clone(), grid.names[j].clone());
            rows.push(match grid.cell(i, j) {
                Ok(c) => [a, b, full_precision(c.r), c.n.to_string(), full_precision(c.p), c.stars.into(), String::new()],
                Err(e) => [a, b, String::new(), String::new(), String::new(), String::new(), e.to_string()],
            });
        }
    }

    let mut headers = vec![""];
    headers.extend(grid.names[..k.saturating_sub(1)].iter().map(String::as_str));
    let mut human = ReportTable::new(format!("Cross-correlation of {} variables over {} items", k, table.ids.len()), &headers);
    for i in 1..k {
        let mut cells = vec![grid.names[i].clone()];
        for j in 0..i {
            cells.push(match grid.cell(i, j) {
                Ok(c) => format!("{}{}", fmt2(c.r), c.stars),
                Err(_) => "n/a".into(),
            });
        }
        human.row(cells);
    }
    human.note("* p < 0.05; ** p < 0.01; *** p < 0.001 (two-tailed, pairwise-complete n)");
    human.echo_parameters(&cfg.echo());

    let mut out = Outputs::default();
    out.add("xcorr.csv", csv_text(&["var_a", "var_b", "r", "n", "p", "stars", "note"], rows));
    out.add_report("xcorr.txt", &human);
    Ok(out)
}

/// Complete-case design for the configured target and predictors, plus
/// the number of joined rows before filtering.
pub fn model_design(cfg: &StudyConfig) -> Result<(Design, usize)> {
    let target = cfg.target.clone().ok_or_else(|| PerceptError::Usage("missing setting `target`".into()))?;
    let features = read_tables(&cfg.features)?;
    let predictors = if cfg.predictors.is_empty() {
        let cols = features.as_ref().map(|f| f.columns.clone()).unwrap_or_default();
        cols.into_iter().filter(|c| *c != target).collect()
    } else {
        cfg.predictors.clone()
    };
    if predictors.is_empty() {
        return Err(PerceptError::Usage("no predictors: set `features` or `predictors`".into()));
    }
    let responses = cfg.responses.as_deref().map(FeatureTable::read).transpose()?;
    let table = match (features, responses) {
        (Some(f), Some(r)) => f.join(&r)?,
        (Some(t), None) | (None, Some(t)) => t,
        (None, None) => return Err(PerceptError::Usage("fit needs `features` and/or `responses`".into())),
    };
    let rows = table.select(&predictors)?;
    let y: Vec<Option<f64>> = table.select(std::slice::from_ref(&target))?.into_iter().map(|r| r[0]).collect();
    let design = Design::new(predictors, &rows, &y).map_err(|source| PerceptError::Regress {
        context: format!("model of {target}"),
        source,
    })?;
    Ok((design, table.ids.len()))
}

fn regress_err(target: &str) -> impl Fn(RegressError) -> PerceptError + '_ {
    move |source| PerceptError::Regress {
        context: format!("model of {target}"),
        source,
    }
}

fn fit(cfg: &StudyConfig) -> Result<Outputs> {
    let (design, total) = model_design(cfg)?;
    let target = cfg.target.as_deref().unwrap_or_default();
    let err = regress_err(target);
    let (n, k) = (design.n(), design.k());

    let mut kv = KeyValues::default();
    kv.text("target", target);
    kv.text("method", cfg.cv_method().to_string());
    kv.text("n", n.to_string());
    kv.text("k", k.to_string());
    kv.text("rows_dropped", (total - n).to_string());

    let mut human = ReportTable::new("", &["Feature", "beta", "sr", "t", "p"]);
    let coefficients;
    let (r2, adj, m_used);
    match cfg.method {
        MethodName::Ols => {
            let f = ols_fit(&design).map_err(&err)?;
            (r2, adj, m_used) = (f.r2, f.adj_r2, None);
            let mut rows = vec![[
                "(intercept)".to_owned(),
                String::new(),
                full_precision(f.intercept),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]];
            for i in 0..k {
                let stars = percept_core::stats::stars(f.p[i]);
                rows.push([
                    f.names[i].clone(),
                    full_precision(f.beta_std[i]),
                    full_precision(f.b_raw[i]),
                    full_precision(f.sr[i]),
                    full_precision(f.t[i]),
                    full_precision(f.p[i]),
                    stars.to_owned(),
                ]);
                human.row(vec![f.names[i].clone(), fmt2(f.beta_std[i]), fmt2(f.sr[i]), fmt2(f.t[i]), fmt_p(f.p[i], stars)]);
            }
            coefficients = rows;
        }
        MethodName::Pls => {
            let model = pls_fit(&design, cfg.components).map_err(&err)?;
            let m = model.m();
            (r2, adj, m_used) = (model.r2, adjusted_r2(model.r2, n, m), Some(m));
            let beta = model.standardized_coefficients();
            coefficients = model
                .names()
                .iter()
                .zip(&beta)
                .map(|(name, b)| {
                    human.row(vec![name.clone(), fmt2(*b), String::new(), String::new(), String::new()]);
                    [name.clone(), full_precision(*b), String::new(), String::new(), String::new(), String::new(), String::new()]
                })
                .collect();
            if model.truncated() {
                human.note(format!("Deflation stopped after {m} of {} requested factors.", cfg.components));
            }
            kv.text("components_requested", cfg.components.to_string());
        }
    }
    if let Some(m) = m_used {
        kv.text("m", m.to_string());
    }
    kv.num("r2", r2);
    kv.num("adj_r2", adj);
    let cv = parallel_repeated_kfold_cv(&design, cfg.cv_method(), cfg.folds, cfg.repeats, cfg.seed);
    match &cv {
        Ok(report) => kv.num("r2_cv", report.r2_cv),
        Err(e) => {
            kv.text("r2_cv", "");
            human.note(format!("Cross-validation unavailable: {e}"));
        }
    }
    kv.text("folds", cfg.folds.to_string());
    kv.text("repeats", cfg.repeats.to_string());
    kv.text("seed", cfg.seed.to_string());

    let method = match m_used {
        Some(m) => format!("PLS, {m} factors"),
        None => "OLS".to_owned(),
    };
    human.title = format!("Prediction of {target} ({method})");
    let cv_text = cv.as_ref().map_or_else(|_| "n/a".to_owned(), |r| fmt2(r.r2_cv));
    let mut header_notes = vec![
        format!("Number of items  {n} ({} dropped for missing values)", total - n),
        format!("R2               {}", fmt2(r2)),
        format!("Adjusted R2      {}", fmt2(adj)),
        format!("R2 cross-val.    {cv_text}  ({}-fold, {} repeats, seed {})", cfg.folds, cfg.repeats, cfg.seed),
    ];
    if m_used.is_none() {
        header_notes.push("beta: standardised coefficient; sr: semipartial correlation".into());
        header_notes.push("* p < 0.05; ** p < 0.01; *** p < 0.001".into());
    } else {
        header_notes.push("beta: standardised coefficient implied by the factors".into());
    }
    human.notes.splice(0..0, header_notes);
    human.echo_parameters(&cfg.echo());

    let mut out = Outputs::default();
    out.add("fit_summary.csv", kv.to_csv());
    out.add(
        "fit_coefficients.csv",
        csv_text(&["variable", "beta_std", "b", "sr", "t", "p", "stars"], coefficients),
    );
    out.add_report("fit.txt", &human);
    Ok(out)
}

fn cv(cfg: &StudyConfig) -> Result<Outputs> {
    let (design, total) = model_design(cfg)?;
    let target = cfg.target.as_deref().unwrap_or_default();
    let err = regress_err(target);
    let method = cfg.cv_method();
    let report = parallel_repeated_kfold_cv(&design, method, cfg.folds, cfg.repeats, cfg.seed).map_err(&err)?;
    let var = {
        let y = design.y();
        let m = y.iter().sum::<f64>() / y.len() as f64;
        y.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / y.len() as f64
    };

    let mut kv = KeyValues::default();
    kv.text("target", target);
    kv.text("method", method.to_string());
    kv.text("n", design.n().to_string());
    kv.text("k", design.k().to_string());
    kv.text("rows_dropped", (total - design.n()).to_string());
    kv.text("folds", report.folds.to_string());
    kv.text("repeats", report.repeats.to_string());
    kv.text("seed", report.seed.to_string());
    kv.num("response_variance", var);
    kv.num("r2_cv", report.r2_cv);

    let repeats = report
        .pooled_mse
        .iter()
        .enumerate()
        .map(|(r, mse)| [r.to_string(), full_precision(*mse), full_precision(1.0 - mse / var)]);

    let mut human = ReportTable::new(format!("Cross-validated prediction of {target} ({method})"), &["Statistic", "Value"]);
    human.row(vec!["Items".into(), design.n().to_string()]);
    human.row(vec!["Predictors".into(), design.k().to_string()]);
    human.row(vec!["R2 cross-val.".into(), fmt2(report.r2_cv)]);
    human.note(format!(
        "{}-fold cross-validation, {} repeats, seed {}; R2 = 1 - pooled MSE / var(y) averaged over repeats",
        report.folds, report.repeats, report.seed
    ));

    let mut out = Outputs::default();
    if cfg.sweep {
        let mut sweep = Vec::new();
        let mut sweep_table = ReportTable::new("PLS factor sweep", &["Factors", "R2 cross-val."]);
        for m in 1..=design.k() {
            match parallel_repeated_kfold_cv(&design, CvMethod::Pls(m), cfg.folds, cfg.repeats, cfg.seed) {
                Ok(r) => {
                    sweep_table.row(vec![m.to_string(), fmt2(r.r2_cv)]);
                    sweep.push([m.to_string(), full_precision(r.r2_cv)]);
                }
                Err(RegressError::RankExceeded { .. }) => break,
                Err(e) => return Err(err(e)),
            }
        }
        sweep_table.note("Reported for inspection; the factor count is never chosen automatically.");
        human.echo_parameters(&cfg.echo());
        out.add_report("cv.txt", &human);
        out.add_report("cv_sweep.txt", &sweep_table);
        out.add("cv_sweep.csv", csv_text(&["components", "r2_cv"], sweep));
    } else {
        human.echo_parameters(&cfg.echo());
        out.add_report("cv.txt", &human);
    }
    out.add("cv_summary.csv", kv.to_csv());
    out.add("cv_repeats.csv", csv_text(&["repeat", "pooled_mse", "r2"], repeats));
    Ok(out)
}
