use num_complex::Complex64;
use pattern_spectra::closedform::{closed_form_report, expansion_value, ClosedFormReport, ExpansionTerm, KnownCase};
use pattern_spectra::enumerate::{growth_estimates, pyramid_count, CountTable, GrowthEstimate};
use pattern_spectra::graphs::{build_de_bruijn, build_overlap_graph, classify, Verdict};
use pattern_spectra::spectral::{eigen_report, EigenReport};
use pattern_spectra::Error;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize") + "\n"
}

fn unsupported(cfg: &RunConfig, command: &str) -> CliError {
    CliError::Usage(format!("{command} does not support --format {:?}", cfg.format).to_lowercase())
}

pub fn count(cfg: &RunConfig) -> Result<String, CliError> {
    let table = pyramid_count(&cfg.input.set, cfg.n_max);
    match cfg.format {
        Format::Csv => Ok(table.to_csv()),
        Format::Json => Ok(json(&table)),
        Format::Dot => Err(unsupported(cfg, "count")),
    }
}

fn checked_spectrum(cfg: &RunConfig) -> Result<EigenReport, CliError> {
    let report = eigen_report(&cfg.input.set, cfg.grid_spec()?, cfg.top, cfg.krylov, cfg.seed)?;
    if let Some(e) = report.eigenvalues.iter().find(|e| e.residual > cfg.tol) {
        return Err(CliError::Residual {
            eigenvalue: Complex64::new(e.re, e.im).to_string(),
            residual: e.residual,
            tol: cfg.tol,
        });
    }
    Ok(report)
}

pub fn spectrum(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.format != Format::Json {
        return Err(unsupported(cfg, "spectrum"));
    }
    Ok(json(&checked_spectrum(cfg)?))
}

pub fn closed_form(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.format != Format::Json {
        return Err(unsupported(cfg, "closed-form"));
    }
    // `null` when no formula is known.
    Ok(json(&closed_form_report(&cfg.input.set, cfg.top)))
}

fn verdict(cfg: &RunConfig) -> Result<Verdict, CliError> {
    Ok(classify(&cfg.input.set, cfg.input.descent.as_ref())?)
}

pub fn classify_cmd(cfg: &RunConfig) -> Result<String, CliError> {
    match cfg.format {
        Format::Json => Ok(json(&verdict(cfg)?)),
        Format::Dot => match &cfg.input.descent {
            Some(u) => Ok(build_de_bruijn(u)?.to_dot()),
            None => Ok(build_overlap_graph(&cfg.input.set).to_dot()),
        },
        Format::Csv => Err(unsupported(cfg, "classify")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermSource {
    ClosedForm,
    Grid,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsRow {
    pub n: usize,
    /// `α_n / n!` from the exact count.
    pub exact: f64,
    pub expansion: f64,
    pub abs_error: f64,
    pub rel_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsTable {
    pub source: TermSource,
    pub terms: Vec<ExpansionTerm>,
    pub rows: Vec<AsymptoticsRow>,
}

impl AsymptoticsTable {
    fn to_csv(&self) -> String {
        let mut out = String::from("n,exact,expansion,abs_error,rel_error\n");
        for r in &self.rows {
            let rel = r.rel_error.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{},{rel}\n", r.n, r.exact, r.expansion, r.abs_error));
        }
        out
    }
}

fn grid_terms(report: &EigenReport) -> Vec<ExpansionTerm> {
    report
        .eigenvalues
        .iter()
        .map(|e| ExpansionTerm {
            lambda: Complex64::new(e.re, e.im),
            coefficient: Complex64::new(e.coefficient_re, e.coefficient_im),
            offset: -(report.m as i32),
        })
        .collect()
}

fn asymptotics_table(table: &CountTable, source: TermSource, terms: Vec<ExpansionTerm>) -> AsymptoticsTable {
    let m = table.pattern_set().m();
    let rows = (m.max(1)..=table.n_max())
        .map(|n| {
            let exact = table.probability(n).expect("n within table");
            let expansion = expansion_value(&terms, n);
            let abs_error = (expansion - exact).abs();
            AsymptoticsRow { n, exact, expansion, abs_error, rel_error: (exact != 0.0).then(|| abs_error / exact) }
        })
        .collect();
    AsymptoticsTable { source, terms, rows }
}

/// Closed-form terms when the set is a known case, grid eigenpairs otherwise.
fn asymptotics_for(
    cfg: &RunConfig,
    table: &CountTable,
    spectrum: Option<&EigenReport>,
) -> Result<AsymptoticsTable, CliError> {
    if KnownCase::detect(&cfg.input.set).is_some() {
        let terms = closed_form_report(&cfg.input.set, cfg.top).map(|r| r.terms).unwrap_or_default();
        return Ok(asymptotics_table(table, TermSource::ClosedForm, terms));
    }
    let terms = match spectrum {
        Some(r) => grid_terms(r),
        None => grid_terms(&checked_spectrum(cfg)?),
    };
    Ok(asymptotics_table(table, TermSource::Grid, terms))
}

pub fn asymptotics(cfg: &RunConfig) -> Result<String, CliError> {
    let table = pyramid_count(&cfg.input.set, cfg.n_max);
    let out = asymptotics_for(cfg, &table, None)?;
    match cfg.format {
        Format::Json => Ok(json(&out)),
        Format::Csv => Ok(out.to_csv()),
        Format::Dot => Err(unsupported(cfg, "asymptotics")),
    }
}

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub config: &'a RunConfig,
    pub counts: CountTable,
    pub growth: Vec<GrowthEstimate>,
    pub spectrum: Option<EigenReport>,
    pub closed_form: Option<ClosedFormReport>,
    pub verdict: Verdict,
    pub asymptotics: Option<AsymptoticsTable>,
    pub notes: Vec<String>,
}

pub fn report(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.format != Format::Json {
        return Err(unsupported(cfg, "report"));
    }
    let counts = pyramid_count(&cfg.input.set, cfg.n_max);
    let growth = growth_estimates(&counts)?;
    let mut notes = Vec::new();
    // Window orders beyond the grid limit still get every exact section.
    let spectrum = match checked_spectrum(cfg) {
        Ok(r) => Some(r),
        Err(CliError::Lib(e @ Error::InvalidGrid(_))) => {
            notes.push(format!("spectrum skipped: {e}"));
            None
        }
        Err(e) => return Err(e),
    };
    let closed_form = closed_form_report(&cfg.input.set, cfg.top);
    let asymptotics = if closed_form.is_some() || spectrum.is_some() {
        Some(asymptotics_for(cfg, &counts, spectrum.as_ref())?)
    } else {
        None
    };
    let doc = Report { config: cfg, verdict: verdict(cfg)?, counts, growth, spectrum, closed_form, asymptotics, notes };
    Ok(json(&doc))
}
