//! Every threshold used by the acceptance suite and the lemma report, in one manifest.

use std::path::Path;

use serde::{Deserialize, Serialize};

use laguerre_edge::error::Result;

const EMBEDDED: &str = include_str!("../tolerances.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub oracle_grid: OracleGrid,
    pub geometry: GeometryCheck,
    pub clt: CltCheck,
    pub variance_lemma: VarianceLemma,
    pub a0_lemma: A0Lemma,
    pub r_bound: RBound,
    pub marchenko_pastur: MpCheck,
    pub subgamma: SubGammaCheck,
    pub determinism: Determinism,
    pub lemmas: LemmaTolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleGrid {
    pub seed: u64,
    pub replicas: usize,
    pub n: Vec<usize>,
    pub lambda: Vec<f64>,
    pub alpha: Vec<f64>,
    pub max_rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryCheck {
    pub n: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub max_vieta_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltCheck {
    pub seed: u64,
    pub n: usize,
    pub lambda: f64,
    pub alpha: Vec<f64>,
    pub replicas: usize,
    pub mean_abs_max: f64,
    pub var_min: f64,
    pub var_max: f64,
    pub ks_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceLemma {
    pub n_small: usize,
    pub n_large: usize,
    pub lambda: Vec<f64>,
    pub alpha: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A0Lemma {
    pub n_small: usize,
    pub n_large: usize,
    pub lambda: Vec<f64>,
    pub rel_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RBound {
    pub seed: u64,
    pub n_small: usize,
    pub n_large: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub replicas: usize,
    pub abs_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpCheck {
    pub seed: u64,
    pub n: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub ks_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubGammaCheck {
    pub seed: u64,
    pub n: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub t: Vec<f64>,
    pub draws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Determinism {
    pub seed: u64,
    pub n: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub replicas: usize,
    pub workers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaTolerances {
    pub variance_rel_tol: f64,
    pub a0_rel_tol: f64,
    pub b3_rel_tol: f64,
    pub shift_rel_tol: f64,
    pub clt_variance_rel_tol: f64,
}

impl Tolerances {
    pub fn embedded() -> Self {
        serde_json::from_str(EMBEDDED).expect("embedded tolerance manifest is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::embedded()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_manifest_parses() {
        let t = Tolerances::embedded();
        assert_eq!(t.oracle_grid.max_rel_diff, 1e-8);
        assert_eq!(t.clt.replicas, 2000);
        assert_eq!(t.determinism.workers, vec![1, 4, 8]);
    }

    #[test]
    fn manifest_round_trips_through_a_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tol.json");
        let mut t = Tolerances::embedded();
        t.clt.ks_max = 0.5;
        std::fs::write(&path, serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(Tolerances::from_path(&path).unwrap(), t);
        assert!(Tolerances::from_path(&dir.path().join("missing.json")).is_err());
    }
}
