//! Experiment configuration: one JSON file holding global settings plus the
//! section for the subcommand being run. A canonical-form hash of the file is
//! embedded in every output so artifacts can be traced back to their inputs.

use meanfield_core::ensemble::InitialLawSpec;
use meanfield_core::hierarchy::HierarchyParams;
use meanfield_core::marginal::MarginalGridSpec;
use meanfield_core::{KernelSpec, SimConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output_dir: String,
    /// 0 sizes the worker pool automatically.
    #[serde(default)]
    pub thread_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve_pde: Option<SolvePdeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyze: Option<AnalyzeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub sim: SimConfig,
    pub replicas: usize,
    pub initial_law: InitialLawSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolvePdeSection {
    /// Kinetic phase-space solve in one spatial dimension.
    KineticD1 {
        kernel: KernelSpec,
        sigma: f64,
        t_end: f64,
        dt: f64,
        nx: usize,
        nv: usize,
        v_max: f64,
        /// Cosine amplitude of the initial spatial perturbation.
        perturbation: f64,
        velocity_std: f64,
    },
    /// First-order (position-only) solve in one or two dimensions.
    FirstOrder {
        kernel: KernelSpec,
        sigma: f64,
        t_end: f64,
        dt: f64,
        n: usize,
        d: usize,
        perturbation: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeSection {
    /// Dataset directory produced by `simulate`, relative to the config file.
    pub dataset_dir: String,
    pub k: usize,
    pub time: f64,
    pub grid: MarginalGridSpec,
    pub q: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub params: HierarchyParams,
    pub t: f64,
    /// Largest marginal order tabulated.
    pub k_max: usize,
    /// Time steps of the brute-force recursion oracle.
    #[serde(default = "default_picard_steps")]
    pub picard_steps: usize,
}

fn default_picard_steps() -> usize {
    2000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    /// Template configuration; the particle count is overridden per run.
    pub sim: SimConfig,
    pub n_values: Vec<usize>,
    pub replicas: usize,
    pub initial_law: InitialLawSpec,
    pub grid: MarginalGridSpec,
    pub q: f64,
    pub lambda: f64,
    pub reference: CompareReference,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CompareReference {
    /// Compare empirical marginals against a kinetic solve on the same
    /// initial law (d = 1 only); checks both k = 1 and k = 2.
    KineticD1 { nx: usize, nv: usize, dt: f64 },
    /// Compare successive particle counts against each other on spatial
    /// k = 1 marginals.
    SelfConvergence,
}

impl ExperimentConfig {
    pub fn load(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = serde_json::from_str(&text)?;
        Ok(config)
    }

    /// Hash of the canonical serialization, invariant under reformatting of
    /// the input file.
    pub fn canonical_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let mut h = Sha256::new();
        h.update(&bytes);
        let digest = h.finalize();
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }
}
