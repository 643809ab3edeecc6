//! Experiment configuration.
//!
//! Configurations are JSON documents with a `schema_version` field. Every
//! section is optional and falls back to the shipped defaults; unknown keys
//! anywhere in the document are rejected.

use crate::error::LabError;
use dunkl_core::commutator::{PanelLayout, TableLayout};
use dunkl_core::geometry::{build_root_system, RootSystem};
use dunkl_core::spectral::GridSpec;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

/// The configuration shipped with the crate.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub measure: MeasureSection,
    #[serde(default)]
    pub spectral: SpectralSection,
    #[serde(default)]
    pub kernel: KernelSection,
    #[serde(default)]
    pub bmo: BmoSection,
    #[serde(default)]
    pub commutator: CommutatorSection,
    #[serde(default)]
    pub tail: TailSection,
    #[serde(default)]
    pub compactness: CompactnessSection,
}

fn default_seed() -> u64 {
    20240917
}

/// A root system by name: `rank1`, `product` (Z2^N), `a2`, `b2`, or `custom`
/// with explicit roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub name: String,
    pub multiplicities: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Vec<Vec<f64>>>,
}

impl SystemSpec {
    pub fn rank1(k: f64) -> Self {
        Self { name: "rank1".into(), multiplicities: vec![k], roots: None }
    }

    pub fn product(ks: &[f64]) -> Self {
        Self { name: "product".into(), multiplicities: ks.to_vec(), roots: None }
    }

    pub fn named(name: &str, ks: &[f64]) -> Self {
        Self { name: name.into(), multiplicities: ks.to_vec(), roots: None }
    }

    pub fn label(&self) -> String {
        let ks: Vec<String> = self.multiplicities.iter().map(|k| format!("{k}")).collect();
        format!("{}[{}]", self.name, ks.join(","))
    }

    pub fn resolve(&self) -> Result<RootSystem, LabError> {
        let ks = &self.multiplicities;
        let one = |what: &str| -> Result<f64, LabError> {
            match ks.as_slice() {
                [k] => Ok(*k),
                _ => Err(LabError::Config(format!("{what} takes exactly one multiplicity"))),
            }
        };
        let rs = match self.name.as_str() {
            "rank1" => RootSystem::rank1(one("rank1")?),
            "product" => RootSystem::product(ks),
            "a2" => RootSystem::a2(one("a2")?),
            "b2" => match ks.as_slice() {
                [s, l] => RootSystem::b2(*s, *l),
                _ => return Err(LabError::Config("b2 takes two multiplicities (short, long)".into())),
            },
            "custom" => {
                let roots = self.roots.as_ref().ok_or_else(|| LabError::Config("custom system needs roots".into()))?;
                build_root_system(roots, ks)
            }
            other => return Err(LabError::UnknownName { kind: "root system", name: other.into() }),
        };
        rs.map_err(|e| LabError::Config(format!("root system {}: {e}", self.label())))
    }
}

/// Symmetric composite Gauss–Legendre grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub extent: f64,
    pub panel_width: f64,
    pub nodes_per_panel: usize,
}

impl GridDoc {
    pub fn spec(&self) -> GridSpec {
        GridSpec::new(self.extent, self.panel_width, self.nodes_per_panel)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub systems: Vec<SystemSpec>,
    pub pairs: usize,
    pub tolerance: f64,
    pub time_budget_s: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            systems: vec![SystemSpec::rank1(1.0), SystemSpec::product(&[1.0, 0.5]), SystemSpec::named("a2", &[1.0])],
            pairs: 1000,
            tolerance: 1e-12,
            time_budget_s: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasureSection {
    pub systems: Vec<SystemSpec>,
    pub resolution: usize,
    pub scaling_samples: usize,
    pub growth_samples: usize,
    pub scaling_tolerance: f64,
    pub closed_form_tolerance: f64,
    pub invariance_tolerance: f64,
    pub time_budget_s: f64,
}

impl Default for MeasureSection {
    fn default() -> Self {
        Self {
            systems: vec![SystemSpec::rank1(1.0), SystemSpec::rank1(0.5), SystemSpec::product(&[1.0, 1.0])],
            resolution: 64,
            scaling_samples: 20,
            growth_samples: 500,
            scaling_tolerance: 1e-6,
            closed_form_tolerance: 1e-8,
            invariance_tolerance: 1e-8,
            time_budget_s: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralSection {
    pub rank1_multiplicities: Vec<f64>,
    pub product_multiplicities: Vec<f64>,
    pub rank1_space: GridDoc,
    pub rank1_frequency: GridDoc,
    pub product_space: GridDoc,
    pub product_frequency: GridDoc,
    pub functions: usize,
    pub kernel_samples: usize,
    pub tolerance: f64,
    pub residual_tolerance: f64,
    pub support_tolerance: f64,
    pub time_budget_s: f64,
}

impl Default for SpectralSection {
    fn default() -> Self {
        Self {
            rank1_multiplicities: vec![0.0, 0.5, 1.0],
            product_multiplicities: vec![1.0, 1.0],
            rank1_space: GridDoc { extent: 8.0, panel_width: 0.5, nodes_per_panel: 20 },
            rank1_frequency: GridDoc { extent: 48.0, panel_width: 2.0, nodes_per_panel: 20 },
            product_space: GridDoc { extent: 4.0, panel_width: 0.5, nodes_per_panel: 16 },
            product_frequency: GridDoc { extent: 40.0, panel_width: 2.5, nodes_per_panel: 16 },
            functions: 10,
            kernel_samples: 10,
            tolerance: 1e-6,
            residual_tolerance: 1e-5,
            support_tolerance: 1e-6,
            time_budget_s: 120.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSection {
    pub kernel: String,
    pub control_kernel: String,
    pub systems: Vec<SystemSpec>,
    pub levels: (i32, i32),
    pub samples: usize,
    pub pair_samples: usize,
    /// Pair count for systems of dimension two and higher.
    pub planar_pair_samples: usize,
    pub resolution: usize,
    pub telescoping_tolerance: f64,
    pub stability_bound: f64,
    pub time_budget_s: f64,
}

impl Default for KernelSection {
    fn default() -> Self {
        Self {
            kernel: "riesz-0".into(),
            control_kernel: "radial-power".into(),
            systems: vec![SystemSpec::rank1(1.0), SystemSpec::rank1(0.5), SystemSpec::product(&[1.0, 1.0])],
            levels: (-8, 8),
            samples: 96,
            pair_samples: 200,
            planar_pair_samples: 40,
            resolution: 16,
            telescoping_tolerance: 1e-14,
            stability_bound: 10.0,
            time_budget_s: 180.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BmoSection {
    pub system: SystemSpec,
    pub witnesses: usize,
    pub rounds: usize,
    pub extent: f64,
    pub pitch: f64,
    pub r0: f64,
    pub radius_exponents: (i32, i32),
    pub resolution: usize,
    pub john_nirenberg_samples: usize,
}

impl Default for BmoSection {
    fn default() -> Self {
        Self {
            system: SystemSpec::rank1(1.0),
            witnesses: 6,
            rounds: 2,
            extent: 4.0,
            pitch: 0.25,
            r0: 0.125,
            radius_exponents: (-3, 4),
            resolution: 16,
            john_nirenberg_samples: 40,
        }
    }
}

/// Discretization of the rank-one commutator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CommutatorGrid {
    pub inner_radius: f64,
    pub inner_panel: f64,
    pub octaves: u32,
    pub panels_per_octave: usize,
    pub nodes_per_panel: usize,
    pub input_radius: f64,
    pub input_panel: f64,
    pub piece_nodes: usize,
    pub translation_step: f64,
    pub translation_nodes: usize,
}

impl Default for CommutatorGrid {
    fn default() -> Self {
        let t = TableLayout::default();
        let o = t.output;
        Self {
            inner_radius: o.inner_radius,
            inner_panel: o.inner_panel,
            octaves: o.octaves,
            panels_per_octave: o.panels_per_octave,
            nodes_per_panel: o.nodes_per_panel,
            input_radius: t.input_radius,
            input_panel: t.input_panel,
            piece_nodes: t.piece_nodes,
            translation_step: t.translation_step,
            translation_nodes: t.translation_nodes,
        }
    }
}

impl CommutatorGrid {
    pub fn layout(&self) -> TableLayout {
        TableLayout {
            output: PanelLayout {
                inner_radius: self.inner_radius,
                inner_panel: self.inner_panel,
                octaves: self.octaves,
                panels_per_octave: self.panels_per_octave,
                nodes_per_panel: self.nodes_per_panel,
            },
            input_radius: self.input_radius,
            input_panel: self.input_panel,
            piece_nodes: self.piece_nodes,
            translation_step: self.translation_step,
            translation_nodes: self.translation_nodes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CommutatorSection {
    pub multiplicities: Vec<f64>,
    pub kernel: String,
    pub b_family: String,
    pub f_family: String,
    pub pairs: usize,
    pub p: Vec<f64>,
    pub tolerance: f64,
    pub growth_bound: f64,
    pub constant_tolerance: f64,
    pub bmo_rounds: usize,
    pub grid: CommutatorGrid,
    pub sharp_samples: usize,
    pub sharp_level: u32,
    pub sharp_p: f64,
    pub sharp_time_budget_s: f64,
    pub time_budget_s: f64,
}

impl Default for CommutatorSection {
    fn default() -> Self {
        Self {
            multiplicities: vec![0.5, 1.0],
            kernel: "riesz-0".into(),
            b_family: "lipschitz".into(),
            f_family: "bumps".into(),
            pairs: 20,
            p: vec![1.5, 2.0, 3.0],
            tolerance: 1e-4,
            growth_bound: 0.2,
            constant_tolerance: 1e-10,
            bmo_rounds: 1,
            grid: CommutatorGrid::default(),
            sharp_samples: 50,
            sharp_level: 4,
            sharp_p: 2.0,
            sharp_time_budget_s: 300.0,
            time_budget_s: 600.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TailSection {
    pub multiplicity: f64,
    pub kernel: String,
    pub p: f64,
    pub m_range: (u32, u32),
    pub slope_factor: f64,
    pub reference_tolerance: f64,
    pub envelope_level: u32,
    pub samples: usize,
    pub grid: CommutatorGrid,
    pub time_budget_s: f64,
}

impl Default for TailSection {
    fn default() -> Self {
        Self {
            multiplicity: 1.0,
            kernel: "riesz-0".into(),
            p: 2.0,
            m_range: (3, 7),
            slope_factor: 0.8,
            reference_tolerance: 1e-6,
            envelope_level: 2,
            samples: 50,
            grid: CommutatorGrid::default(),
            time_budget_s: 300.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompactnessSection {
    pub multiplicity: f64,
    pub kernel: String,
    pub p: f64,
    pub m: u32,
    pub basis: usize,
    pub extended_basis: usize,
    pub delta_fractions: Vec<f64>,
    pub gate_delta_fraction: f64,
    pub leakage_tolerance: f64,
    pub holder_spread_bound: f64,
    pub holder_stride: usize,
    pub tail_levels: Vec<u32>,
    pub tail_reference: u32,
    pub grid: CommutatorGrid,
    pub time_budget_s: f64,
}

impl Default for CompactnessSection {
    fn default() -> Self {
        Self {
            multiplicity: 1.0,
            kernel: "riesz-0".into(),
            p: 2.0,
            m: 2,
            basis: 40,
            extended_basis: 60,
            delta_fractions: vec![0.02, 0.05, 0.1, 0.2, 0.5],
            gate_delta_fraction: 0.05,
            leakage_tolerance: 1e-8,
            holder_spread_bound: 10.0,
            holder_stride: 4,
            tail_levels: vec![3, 4, 5, 6, 7],
            tail_reference: 12,
            grid: CommutatorGrid::default(),
            time_budget_s: 600.0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| LabError::Malformed(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Unreadable { path: path.to_path_buf(), source: e })?;
        Self::from_json(&text)
    }

    pub fn shipped() -> Self {
        Self::from_json(DEFAULT_CONFIG).expect("shipped configuration is valid")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    /// Checks the schema version, positivity of tolerances and that every
    /// named object resolves.
    pub fn validate(&self) -> Result<(), LabError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(LabError::Schema { found: self.schema_version, expected: SCHEMA_VERSION });
        }
        let positive = [
            ("geometry.tolerance", self.geometry.tolerance),
            ("measure.scaling_tolerance", self.measure.scaling_tolerance),
            ("measure.closed_form_tolerance", self.measure.closed_form_tolerance),
            ("measure.invariance_tolerance", self.measure.invariance_tolerance),
            ("spectral.tolerance", self.spectral.tolerance),
            ("spectral.residual_tolerance", self.spectral.residual_tolerance),
            ("spectral.support_tolerance", self.spectral.support_tolerance),
            ("kernel.telescoping_tolerance", self.kernel.telescoping_tolerance),
            ("kernel.stability_bound", self.kernel.stability_bound),
            ("commutator.tolerance", self.commutator.tolerance),
            ("commutator.growth_bound", self.commutator.growth_bound),
            ("commutator.constant_tolerance", self.commutator.constant_tolerance),
            ("tail.slope_factor", self.tail.slope_factor),
            ("tail.reference_tolerance", self.tail.reference_tolerance),
            ("compactness.gate_delta_fraction", self.compactness.gate_delta_fraction),
            ("compactness.leakage_tolerance", self.compactness.leakage_tolerance),
            ("compactness.holder_spread_bound", self.compactness.holder_spread_bound),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let ps = self.commutator.p.iter().chain([&self.tail.p, &self.compactness.p, &self.commutator.sharp_p]);
        for &p in ps {
            if !(p > 1.0 && p.is_finite()) {
                return Err(LabError::Config(format!("exponent p = {p} must lie in (1, inf)")));
            }
        }
        if self.tail.m_range.0 >= self.tail.m_range.1 {
            return Err(LabError::Config("tail.m_range must be increasing".into()));
        }
        if self.compactness.extended_basis < self.compactness.basis || self.compactness.basis == 0 {
            return Err(LabError::Config("compactness.extended_basis must be at least compactness.basis > 0".into()));
        }
        if self.commutator.pairs == 0 {
            return Err(LabError::Config("commutator.pairs must be positive".into()));
        }
        for s in self.geometry.systems.iter().chain(&self.measure.systems).chain(&self.kernel.systems).chain([&self.bmo.system]) {
            s.resolve()?;
        }
        crate::families::check_symbol_family(&self.commutator.b_family)?;
        crate::families::check_input_family(&self.commutator.f_family)?;
        for name in [&self.kernel.kernel, &self.kernel.control_kernel, &self.commutator.kernel, &self.tail.kernel, &self.compactness.kernel] {
            crate::families::check_kernel_name(name)?;
        }
        Ok(())
    }
}
