use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use parwalk::blockenc::{
    build_ancilla_efficient_q, extract_block_real, logical_ancilla_count, paper_ancilla_count, reflection_defect,
};
use parwalk::linalg::max_abs_diff;
use parwalk::markov::{spectral_gaps, STRUCT_TOL};
use parwalk::par::{acceptance_matrix, decompose_with_acceptance, DiscriminantDecomposition};
use parwalk::spectra::{phase_gap_check, walk_spectrum, WalkSpectrum, PHASE_TOL};
use parwalk::szegedy::{ancilla_comparison, par_walk, standard_walk};

use crate::model::{BuiltModel, ModelSizes, ModelSpec, DEFAULT_CAP};
use crate::report::{Ancillas, Deviation, Deviations, Gammas, ModelEcho, Report, SpectrumSummary};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Construction {
    Compressed,
    Szegedy,
    Both,
}

impl Construction {
    fn compressed(self) -> bool {
        matches!(self, Construction::Compressed | Construction::Both)
    }

    fn szegedy(self) -> bool {
        matches!(self, Construction::Szegedy | Construction::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub construction: Construction,
    /// Tolerance on the extracted block.
    pub tol: f64,
    pub cap: u32,
    /// Perturbs one acceptance probability before decomposing (test hook).
    pub inject_fault: bool,
    pub timings: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self { construction: Construction::Both, tol: 1e-9, cap: DEFAULT_CAP, inject_fault: false, timings: false }
    }
}

/// Number of random vectors for the reflection check.
const REFLECTION_PROBES: usize = 16;

struct Timer {
    enabled: bool,
    laps: BTreeMap<String, f64>,
}

impl Timer {
    fn new(enabled: bool) -> Self {
        Self { enabled, laps: BTreeMap::new() }
    }

    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            *self.laps.entry(name.to_string()).or_default() += start.elapsed().as_secs_f64() * 1e3;
        }
        out
    }

    fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.enabled.then_some(self.laps)
    }
}

fn check(e: parwalk::Error) -> CliError {
    CliError::Check { source: e }
}

fn echo(spec: &ModelSpec, sizes: ModelSizes) -> ModelEcho {
    ModelEcho { spec: spec.clone(), sizes }
}

fn ancillas(sizes: ModelSizes, logical: Option<u32>) -> Ancillas {
    let paper = paper_ancilla_count(sizes.kappa, sizes.levels);
    let logical = logical.unwrap_or_else(|| logical_ancilla_count(sizes.kappa, sizes.levels));
    Ancillas { szegedy: sizes.bits + 1, paper, logical, within_paper_bound: logical <= paper }
}

fn gammas(sizes: ModelSizes) -> Gammas {
    Gammas { szegedy: 1.0, efficient: 4.0 * sizes.levels as f64 }
}

fn decompose(built: &BuiltModel, inject_fault: bool) -> Result<DiscriminantDecomposition, CliError> {
    let mut a = acceptance_matrix(&built.model, &built.rule).map_err(check)?;
    if inject_fault {
        a[(1, 0)] *= 0.9;
    }
    decompose_with_acceptance(&built.model, &built.prop, a).map_err(check)
}

fn summarize(q: &nalgebra::DMatrix<f64>, spec: &WalkSpectrum) -> Result<SpectrumSummary, CliError> {
    let gaps = spectral_gaps(q).map_err(check)?;
    let gap = phase_gap_check(spec, gaps.delta_plus).map_err(check)?;
    Ok(SpectrumSummary {
        delta: gaps.delta,
        delta_plus: gaps.delta_plus,
        phase_gap: gap.phase_gap,
        sqrt_2_delta_plus: gap.lower_bound,
    })
}

/// Builds the requested constructions and reports their parameters.
pub fn cmd_build(spec: &ModelSpec, opts: &Options) -> Result<Report, CliError> {
    let sizes = spec.sizes()?;
    let built = spec.build(opts.cap)?;
    let mut timer = Timer::new(opts.timings);
    let mut logical = None;
    if opts.construction.compressed() {
        let q = timer.time("compressed", || build_ancilla_efficient_q(&built.model, &built.prop, &built.rule));
        logical = Some(q.map_err(check)?.encoding.anc_qubits);
    }
    if opts.construction.szegedy() {
        let a = acceptance_matrix(&built.model, &built.rule).map_err(check)?;
        timer.time("szegedy", || par_walk(&built.prop, &a)).map_err(check)?;
    }
    Ok(Report {
        model: echo(spec, sizes),
        ancillas: ancillas(sizes, logical),
        gamma: gammas(sizes),
        deviations: Deviations::default(),
        spectrum: None,
        pass: true,
        timings_ms: timer.finish(),
    })
}

/// Runs the decomposition, the requested encodings and the walk checks.
/// Library errors abort with [`CliError::Check`]; deviations above tolerance
/// leave `pass = false`.
pub fn cmd_verify(spec: &ModelSpec, opts: &Options) -> Result<Report, CliError> {
    let sizes = spec.sizes()?;
    let built = spec.build(opts.cap)?;
    let mut timer = Timer::new(opts.timings);
    let mut dev = Deviations::default();

    let d = timer.time("decomposition", || decompose(&built, opts.inject_fault))?;
    dev.decomposition = Some(Deviation { value: d.deviation, tol: STRUCT_TOL });

    let mut logical = None;
    if opts.construction.compressed() {
        let q = timer
            .time("compressed", || build_ancilla_efficient_q(&built.model, &built.prop, &built.rule))
            .map_err(check)?;
        let (ext, im) = timer.time("extraction", || extract_block_real(&q.encoding));
        dev.extraction = Some(Deviation { value: max_abs_diff(&ext, &d.q).max(im), tol: opts.tol });
        let refl = timer.time("reflection", || reflection_defect(q.encoding.op.as_ref(), REFLECTION_PROBES, 0x11));
        dev.reflection = Some(Deviation { value: refl, tol: STRUCT_TOL });
        logical = Some(q.encoding.anc_qubits);
    }

    if opts.construction.szegedy() {
        let w = timer.time("szegedy", || standard_walk(&d.p)).map_err(check)?;
        dev.tst = Some(Deviation { value: max_abs_diff(&w.q, &d.q), tol: STRUCT_TOL });
    }
    let pw = timer.time("szegedy", || par_walk(&built.prop, &d.a)).map_err(check)?;
    if opts.construction.szegedy() {
        dev.par_tst = Some(Deviation { value: max_abs_diff(&pw.q, &d.q), tol: STRUCT_TOL });
    }
    let sp = timer.time("spectrum", || walk_spectrum(&pw, &pw.q)).map_err(check)?;
    dev.phases = Some(Deviation { value: sp.max_phase_error(), tol: PHASE_TOL });
    let spectrum = summarize(&d.q, &sp)?;

    let pass = dev.failures().is_empty();
    Ok(Report {
        model: echo(spec, sizes),
        ancillas: ancillas(sizes, logical),
        gamma: gammas(sizes),
        deviations: dev,
        spectrum: Some(spectrum),
        pass,
        timings_ms: timer.finish(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub index: usize,
    pub lambda: f64,
    pub predicted_phase: f64,
    pub measured_phase: f64,
    pub abs_err: f64,
}

/// Walk phases of the PAR Szegedy walk against `+-arccos lambda_j`.
pub fn cmd_spectrum(spec: &ModelSpec, opts: &Options) -> Result<(Report, Vec<SpectrumRow>), CliError> {
    let sizes = spec.sizes()?;
    let built = spec.build(opts.cap)?;
    let mut timer = Timer::new(opts.timings);
    let d = timer.time("decomposition", || decompose(&built, opts.inject_fault))?;
    let pw = timer.time("szegedy", || par_walk(&built.prop, &d.a)).map_err(check)?;
    let sp = timer.time("spectrum", || walk_spectrum(&pw, &pw.q)).map_err(check)?;
    let summary = summarize(&d.q, &sp)?;

    let mut rows: Vec<SpectrumRow> = sp
        .matches
        .iter()
        .map(|m| SpectrumRow {
            index: m.index,
            lambda: m.lambda,
            predicted_phase: m.predicted,
            measured_phase: m.measured,
            abs_err: m.abs_err,
        })
        .collect();
    rows.sort_by(|a, b| a.index.cmp(&b.index).then(b.predicted_phase.total_cmp(&a.predicted_phase)));

    let dev = Deviations {
        decomposition: Some(Deviation { value: d.deviation, tol: STRUCT_TOL }),
        phases: Some(Deviation { value: sp.max_phase_error(), tol: PHASE_TOL }),
        ..Deviations::default()
    };
    let pass = dev.failures().is_empty();
    let report = Report {
        model: echo(spec, sizes),
        ancillas: ancillas(sizes, None),
        gamma: gammas(sizes),
        deviations: dev,
        spectrum: Some(summary),
        pass,
        timings_ms: timer.finish(),
    };
    Ok((report, rows))
}

/// Writes the spectrum rows followed by the gap footer.
pub fn write_spectrum_csv<W: Write>(out: W, rows: &[SpectrumRow], summary: &SpectrumSummary) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(e.to_string());
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(["index", "lambda", "predicted_phase", "measured_phase", "abs_err"]).map_err(io)?;
    for r in rows {
        w.write_record([
            r.index.to_string(),
            r.lambda.to_string(),
            r.predicted_phase.to_string(),
            r.measured_phase.to_string(),
            r.abs_err.to_string(),
        ])
        .map_err(io)?;
    }
    for (name, v) in [
        ("delta", summary.delta),
        ("delta_plus", summary.delta_plus),
        ("phase_gap", summary.phase_gap),
        ("sqrt_2_delta_plus", summary.sqrt_2_delta_plus),
    ] {
        w.write_record([name.to_string(), v.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_spectrum_file(path: &Path, rows: &[SpectrumRow], summary: &SpectrumSummary) -> Result<(), CliError> {
    let f = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    write_spectrum_csv(f, rows, summary)
}

/// Ancilla and scale table. With `counts_only` nothing is built and there is
/// no size cap; a CNF file is read up to its header.
pub fn cmd_compare(spec: &ModelSpec, counts_only: bool, opts: &Options) -> Result<Report, CliError> {
    let sizes = spec.sizes()?;
    let mut timer = Timer::new(opts.timings);
    let logical = if counts_only {
        None
    } else {
        let built = spec.build(opts.cap)?;
        let cmp = ancilla_comparison(&built.model, &built.prop, &built.rule).map_err(check)?;
        debug_assert_eq!(cmp.paper, paper_ancilla_count(sizes.kappa, sizes.levels));
        let q = timer
            .time("compressed", || build_ancilla_efficient_q(&built.model, &built.prop, &built.rule))
            .map_err(check)?;
        Some(q.encoding.anc_qubits)
    };
    Ok(Report {
        model: echo(spec, sizes),
        ancillas: ancillas(sizes, logical),
        gamma: gammas(sizes),
        deviations: Deviations::default(),
        spectrum: None,
        pass: true,
        timings_ms: timer.finish(),
    })
}
