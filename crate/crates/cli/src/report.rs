use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::model::{ModelSizes, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deviation {
    pub value: f64,
    pub tol: f64,
}

impl Deviation {
    pub fn ok(&self) -> bool {
        self.value <= self.tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelEcho {
    #[serde(flatten)]
    pub spec: ModelSpec,
    #[serde(flatten)]
    pub sizes: ModelSizes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ancillas {
    /// `ceil(log N) + 1` for the doubled-space PAR walk.
    pub szegedy: u32,
    /// `2 ceil(log kappa) + ceil(log B) + 2`.
    pub paper: u32,
    /// Qubits used by the implemented encoding.
    pub logical: u32,
    pub within_paper_bound: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gammas {
    pub szegedy: f64,
    pub efficient: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Deviations {
    pub decomposition: Option<Deviation>,
    pub extraction: Option<Deviation>,
    /// `||W^2 v - v||` for the encoding unitary.
    pub reflection: Option<Deviation>,
    pub tst: Option<Deviation>,
    pub par_tst: Option<Deviation>,
    /// Largest per-phase error of the walk spectrum against `+-arccos lambda`.
    pub phases: Option<Deviation>,
}

impl Deviations {
    /// Names of the checks that exceed their tolerance.
    pub fn failures(&self) -> Vec<&'static str> {
        [
            ("decomposition", self.decomposition),
            ("extraction", self.extraction),
            ("reflection", self.reflection),
            ("tst", self.tst),
            ("par_tst", self.par_tst),
            ("phases", self.phases),
        ]
        .into_iter()
        .filter_map(|(name, d)| d.filter(|d| !d.ok()).map(|_| name))
        .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub delta: f64,
    pub delta_plus: f64,
    pub phase_gap: f64,
    pub sqrt_2_delta_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub model: ModelEcho,
    pub ancillas: Ancillas,
    pub gamma: Gammas,
    pub deviations: Deviations,
    pub spectrum: Option<SpectrumSummary>,
    pub pass: bool,
    /// Only filled when timings are requested, so reports stay reproducible.
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let sz = &self.model.sizes;
        let _ = writeln!(s, "model      bits={} kappa={} B={}", sz.bits, sz.kappa, sz.levels);
        let _ = writeln!(s, "ancillas   szegedy={}  paper={}  logical={}", self.ancillas.szegedy, self.ancillas.paper, self.ancillas.logical);
        let _ = writeln!(s, "gamma      szegedy={}  efficient={}", self.gamma.szegedy, self.gamma.efficient);
        let d = &self.deviations;
        for (name, dev) in [
            ("decomposition", d.decomposition),
            ("extraction", d.extraction),
            ("reflection", d.reflection),
            ("tst", d.tst),
            ("par_tst", d.par_tst),
            ("phases", d.phases),
        ] {
            if let Some(dev) = dev {
                let mark = if dev.ok() { "ok" } else { "FAIL" };
                let _ = writeln!(s, "{name:<14} {:.3e} (tol {:.0e}) {mark}", dev.value, dev.tol);
            }
        }
        if let Some(sp) = &self.spectrum {
            let _ = writeln!(
                s,
                "spectrum   delta={:.6} delta+={:.6} phase_gap={:.6} sqrt(2 delta+)={:.6}",
                sp.delta, sp.delta_plus, sp.phase_gap, sp.sqrt_2_delta_plus
            );
        }
        let _ = writeln!(s, "{}", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}
