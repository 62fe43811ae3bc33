use serde::Serialize;

use super::config::{Format, RunConfig};
use super::output::{to_json, Table};
use super::CliError;
use crate::analysis::{
    classify_stripes, ep_scan, gamma_sweep, EpScanOptions, StripeClassification, StripeLevel,
};
use crate::exact_spectrum::exact_liouvillian_spectrum;
use crate::lindblad_model::ZenoSetup;
use crate::zeno_spectrum::{zeno_spectrum, StripeKey};

#[derive(Clone, Debug, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: Vec<u8>,
}

/// Files to write and the problems met on the way. Problems do not stop the
/// run; they turn the exit code into a numerical failure after writing.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CommandOutput {
    pub files: Vec<OutputFile>,
    pub problems: Vec<String>,
}

impl From<Vec<OutputFile>> for CommandOutput {
    fn from(files: Vec<OutputFile>) -> Self {
        Self { files, problems: Vec::new() }
    }
}

fn file(name: impl Into<String>, contents: Vec<u8>) -> OutputFile {
    OutputFile { name: name.into(), contents }
}

/// File-name friendly stripe label: `1&2` becomes `1-2`.
fn slug(label: &str) -> String {
    label.replace('&', "-")
}

#[derive(Serialize)]
struct ExactMeta<'a> {
    gamma: f64,
    eigenvalue_count: usize,
    stripe_labels: Vec<&'a str>,
    stripe_counts: &'a [usize],
    min_gap: f64,
    max_spread: f64,
    overlap_warning: &'a Option<String>,
}

#[derive(Serialize)]
struct ExactJson<'a> {
    meta: ExactMeta<'a>,
    eigenvalues: &'a Table,
}

fn exact_meta<'a>(gamma: f64, n: usize, levels: &'a [StripeLevel], cl: &'a StripeClassification) -> ExactMeta<'a> {
    ExactMeta {
        gamma,
        eigenvalue_count: n,
        stripe_labels: levels.iter().map(|l| l.label.as_str()).collect(),
        stripe_counts: &cl.counts,
        min_gap: cl.min_gap,
        max_spread: cl.max_spread,
        overlap_warning: &cl.overlap_warning,
    }
}

/// `re, im, stripe_label` in canonical order, plus classification metadata.
pub fn spectrum_exact_files(cfg: &RunConfig, format: Format, vectors: bool) -> Result<CommandOutput, CliError> {
    let m = &cfg.model;
    let spec = exact_liouvillian_spectrum(m, vectors)?;
    let setup = ZenoSetup::new(m)?;
    let levels = StripeLevel::from_setup(&setup);
    let cl = classify_stripes(&spec.eigenvalues, &levels, m.gamma);
    let mut t = Table::new(&["re", "im", "stripe_label"]);
    for (l, &k) in spec.eigenvalues.iter().zip(&cl.labels) {
        t.push(vec![l.re.into(), l.im.into(), levels[k].label.clone().into()]);
    }
    let meta = exact_meta(m.gamma, spec.eigenvalues.len(), &levels, &cl);
    let mut files = match format {
        Format::Csv => vec![file("spectrum_exact.csv", t.to_csv()), file("spectrum_exact_meta.json", to_json(&meta))],
        Format::Json => vec![file("spectrum_exact.json", to_json(&ExactJson { meta, eigenvalues: &t }))],
    };
    if let Some(v) = &spec.right_eigenvectors {
        let mut vt = Table::new(&["eigen_index", "component", "re", "im"]);
        for j in 0..v.ncols() {
            for i in 0..v.nrows() {
                vt.push(vec![j.into(), i.into(), v[(i, j)].re.into(), v[(i, j)].im.into()]);
            }
        }
        files.push(file(format!("eigenvectors_right.{}", format.ext()), vt.render(format)));
    }
    Ok(files.into())
}

/// One file per stripe with `stripe, alpha, beta, lambda0, corr, lambda`;
/// `stripe` is the dissipator label of the class member carrying the mode.
pub fn spectrum_zeno_files(cfg: &RunConfig, format: Format) -> Result<CommandOutput, CliError> {
    let setup = ZenoSetup::new(&cfg.model)?;
    let z = zeno_spectrum(&setup, &cfg.zeno_options())?;
    let mut files = Vec::new();
    for s in &z.stripes {
        let mut t = Table::new(&[
            "stripe", "alpha", "beta", "lambda0_re", "lambda0_im", "corr_re", "corr_im", "lambda_re", "lambda_im",
        ]);
        for r in &s.records {
            let l = r.lambda();
            t.push(vec![
                r.member.into(),
                r.alpha.into(),
                r.beta.into(),
                r.lambda0.re.into(),
                r.lambda0.im.into(),
                r.correction.re.into(),
                r.correction.im.into(),
                l.re.into(),
                l.im.into(),
            ]);
        }
        files.push(file(format!("zeno_stripe_{}.{}", slug(&s.key.label()), format.ext()), t.render(format)));
    }
    if cfg.run.emit_diagnostics {
        files.push(file("zeno_diagnostics.json", to_json(&zeno_diagnostics(&z))));
    }
    Ok(files.into())
}

#[derive(Serialize)]
struct StripeDiag {
    stripe: String,
    c: [f64; 2],
    records: usize,
    near_degenerate: usize,
    resolvers: Vec<ResolverDiag>,
}

#[derive(Serialize)]
struct ResolverDiag {
    kind: crate::zeno_spectrum::ResolverKind,
    size: usize,
    scale: f64,
}

fn zeno_diagnostics(z: &crate::zeno_spectrum::ZenoSpectrum) -> Vec<StripeDiag> {
    z.stripes
        .iter()
        .map(|s| StripeDiag {
            stripe: StripeKey::label(&s.key),
            c: [s.key.c.re, s.key.c.im],
            records: s.records.len(),
            near_degenerate: s.records.iter().filter(|r| r.near_degenerate).count(),
            resolvers: s.resolvers.iter().map(|r| ResolverDiag { kind: r.kind, size: r.modes.len(), scale: r.scale }).collect(),
        })
        .collect()
}

#[derive(Serialize)]
struct CompareStripe<'a> {
    stripe: &'a str,
    matched: usize,
    std_dev: f64,
    mean_abs: f64,
    max_abs: f64,
}

#[derive(Serialize)]
struct CompareReport<'a> {
    gamma: f64,
    complete: bool,
    matched: usize,
    global_fallback: bool,
    overlap_warning: &'a Option<String>,
    stripes: Vec<CompareStripe<'a>>,
}

/// Report (always JSON) and the matched residuals.
pub fn compare_files(cfg: &RunConfig, format: Format) -> Result<CommandOutput, CliError> {
    let cmp = crate::analysis::compare_config(&cfg.model, &cfg.zeno_options())?;
    let report = CompareReport {
        gamma: cmp.gamma,
        complete: cmp.is_complete(),
        matched: cmp.matched(),
        global_fallback: cmp.global_fallback,
        overlap_warning: &cmp.classification.overlap_warning,
        stripes: cmp
            .per_stripe
            .iter()
            .map(|s| CompareStripe {
                stripe: &s.label,
                matched: s.pairs.len(),
                std_dev: s.stats.std_dev,
                mean_abs: s.stats.mean_abs,
                max_abs: s.stats.max_abs,
            })
            .collect(),
    };
    let mut t = Table::new(&["stripe", "exact_re", "exact_im", "pert_re", "pert_im", "residual"]);
    for s in &cmp.per_stripe {
        for ((e, p), r) in s.pairs.iter().zip(&s.residuals) {
            t.push(vec![s.label.clone().into(), e.re.into(), e.im.into(), p.re.into(), p.im.into(), (*r).into()]);
        }
    }
    let mut problems = Vec::new();
    if !cmp.is_complete() {
        problems.push(format!(
            "{} exact and {} perturbative eigenvalues left unmatched",
            cmp.unmatched_exact.len(),
            cmp.unmatched_pert.len()
        ));
    }
    let files = vec![file("compare_report.json", to_json(&report)), file(format!("compare_residuals.{}", format.ext()), t.render(format))];
    Ok(CommandOutput { files, problems })
}

/// Per-Gamma errors and the per-stripe fit summary.
pub fn sweep_gamma_files(cfg: &RunConfig, format: Format) -> Result<CommandOutput, CliError> {
    let gammas = cfg.run.gammas.as_ref().ok_or_else(|| CliError::Config("config error at `run.gammas`: required by sweep-gamma".into()))?;
    let res = gamma_sweep(&cfg.model, gammas, &cfg.zeno_options())?;
    let mut errs = Table::new(&["gamma", "stripe", "std_dev", "mean_abs"]);
    for (i, g) in res.gammas.iter().enumerate() {
        for s in &res.stripes {
            errs.push(vec![(*g).into(), s.label.clone().into(), s.errors[i].into(), s.mean_abs[i].into()]);
        }
    }
    let mut fit = Table::new(&["stripe", "gamma_c", "free_slope", "fit_residual", "points", "note"]);
    for s in &res.stripes {
        match &s.fit {
            Some(f) => fit.push(vec![
                s.label.clone().into(),
                f.gamma_c.into(),
                f.free_slope.into(),
                f.fit_residual.into(),
                f.points.into(),
                "".into(),
            ]),
            None => fit.push(vec![
                s.label.clone().into(),
                f64::NAN.into(),
                f64::NAN.into(),
                f64::NAN.into(),
                0usize.into(),
                s.fit_error.clone().unwrap_or_default().into(),
            ]),
        }
    }
    let files = vec![
        file(format!("sweep_errors.{}", format.ext()), errs.render(format)),
        file(format!("sweep_fit.{}", format.ext()), fit.render(format)),
    ];
    Ok(CommandOutput { files, problems: res.problems() })
}

/// Tracked `Re(lambda)/Gamma` (and `Im`) per grid point, the branch list and
/// the cells too coarse to track.
pub fn scan_ep_files(cfg: &RunConfig, format: Format) -> Result<CommandOutput, CliError> {
    let grid = match (&cfg.run.ep_grid, &cfg.run.gammas) {
        (Some(g), _) => g.points().map_err(|e| CliError::Config(format!("config error at `run.ep_grid`: {e}")))?,
        (None, Some(g)) => g.clone(),
        (None, None) => return Err(CliError::Config("config error at `run.ep_grid`: required by scan-ep".into())),
    };
    let res = ep_scan(&cfg.model, &grid, &EpScanOptions::default())?;
    let mut tracks = Table::new(&["gamma", "trajectory", "re_over_gamma", "im"]);
    for (g, row) in res.gammas.iter().zip(&res.tracks) {
        for (t, l) in row.iter().enumerate() {
            tracks.push(vec![(*g).into(), t.into(), (l.re / g).into(), l.im.into()]);
        }
    }
    let mut bps = Table::new(&["gamma", "uncertainty", "trajectories"]);
    for b in &res.branch_points {
        let ids = b.trajectories.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        bps.push(vec![b.gamma.into(), b.uncertainty.into(), ids.into()]);
    }
    let mut coarse = Table::new(&["gamma_left", "gamma_right", "jump"]);
    let mut problems = Vec::new();
    for c in &res.coarse_cells {
        let right = res.gammas[c.cell + 1];
        coarse.push(vec![c.gamma.into(), right.into(), c.jump.into()]);
        problems.push(format!("grid too coarse between Gamma = {} and {}: step displacement {:.3e}", c.gamma, right, c.jump));
    }
    let files = vec![
        file(format!("scan_tracks.{}", format.ext()), tracks.render(format)),
        file(format!("scan_branch_points.{}", format.ext()), bps.render(format)),
        file(format!("scan_coarse_cells.{}", format.ext()), coarse.render(format)),
    ];
    Ok(CommandOutput { files, problems })
}
