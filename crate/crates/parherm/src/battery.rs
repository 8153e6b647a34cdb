//! Batch certification sweeps over generated instances.
//!
//! [`sweep`] draws seeded random structured instances via [`crate::genesis`],
//! runs the full certification battery of [`crate::verify`] on each generator
//! pencil, and aggregates pass/fail counts. Items are independent, so with the
//! `parallel` feature (on by default) they are processed with rayon;
//! [`sweep_sequential`] always runs on the current thread and serves as the
//! benchmark baseline. Both orders of execution produce the identical summary:
//! every item is determined by its index alone.

use num_complex::Complex64;
use serde::Serialize;

use crate::genesis::random_para_structured;
use crate::rmatrix::ParaKind;
use crate::verify::{certify, Certificate, VerifyOptions};

/// Work description for one sweep.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Number of instances to draw and certify.
    pub instances: usize,
    /// State dimensions cycle through 1..=max_state.
    pub max_state: usize,
    /// IO dimensions cycle through 1..=max_io.
    pub max_io: usize,
    /// Mixed into every per-item seed.
    pub base_seed: u64,
    /// Weight parameter passed to the generator and the verifier.
    pub alpha: Complex64,
    /// Structure kinds to alternate between; must be nonempty.
    pub kinds: Vec<ParaKind>,
    /// Tolerances for certification.
    pub options: VerifyOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            instances: 32,
            max_state: 8,
            max_io: 4,
            base_seed: 0x5eed,
            alpha: Complex64::new(1.0, 0.0),
            kinds: vec![ParaKind::Hermitian, ParaKind::Skew],
            options: VerifyOptions::default(),
        }
    }
}

/// One generated-and-certified instance.
#[derive(Debug, Clone, Serialize)]
pub struct SweepItem {
    pub index: usize,
    pub seed: u64,
    pub state_dim: usize,
    pub io_dim: usize,
    pub kind: ParaKind,
    /// Present when generation succeeded; the certificate may still fail.
    pub certificate: Option<Certificate>,
    /// Present when generation or certification errored out.
    pub error: Option<String>,
}

impl SweepItem {
    pub fn passed(&self) -> bool {
        self.certificate.as_ref().is_some_and(|c| c.passes()) && self.error.is_none()
    }
}

/// Aggregated sweep outcome, ordered by item index.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub items: Vec<SweepItem>,
    pub passed: usize,
    pub failed: usize,
}

impl SweepSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn item_params(cfg: &SweepConfig, idx: usize) -> (u64, usize, usize, ParaKind) {
    let kind = cfg.kinds[idx % cfg.kinds.len()];
    let j = idx / cfg.kinds.len();
    let n = 1 + j % cfg.max_state.max(1);
    let m = 1 + (j / cfg.max_state.max(1)) % cfg.max_io.max(1);
    // SplitMix-style spread keeps per-item streams decorrelated.
    let seed = cfg
        .base_seed
        .wrapping_add((idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (seed, n, m, kind)
}

fn run_item(cfg: &SweepConfig, idx: usize) -> SweepItem {
    let (seed, n, m, kind) = item_params(cfg, idx);
    let mut item = SweepItem {
        index: idx,
        seed,
        state_dim: n,
        io_dim: m,
        kind,
        certificate: None,
        error: None,
    };
    let opts = VerifyOptions {
        alpha: cfg.alpha,
        ..cfg.options
    };
    match random_para_structured(n, m, cfg.alpha, kind, seed) {
        Ok((r, l)) => match certify(&l, &r, kind, &opts) {
            Ok(cert) => item.certificate = Some(cert),
            Err(e) => item.error = Some(e.to_string()),
        },
        Err(e) => item.error = Some(e.to_string()),
    }
    item
}

fn summarize(items: Vec<SweepItem>) -> SweepSummary {
    let passed = items.iter().filter(|it| it.passed()).count();
    let failed = items.len() - passed;
    SweepSummary {
        items,
        passed,
        failed,
    }
}

/// Certify `cfg.instances` generated instances, in parallel when the
/// `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn sweep(cfg: &SweepConfig) -> SweepSummary {
    use rayon::prelude::*;
    let items: Vec<SweepItem> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| run_item(cfg, i))
        .collect();
    summarize(items)
}

/// Certify `cfg.instances` generated instances on the current thread.
#[cfg(not(feature = "parallel"))]
pub fn sweep(cfg: &SweepConfig) -> SweepSummary {
    sweep_sequential(cfg)
}

/// Single-threaded sweep, available regardless of the feature set.
pub fn sweep_sequential(cfg: &SweepConfig) -> SweepSummary {
    summarize((0..cfg.instances).map(|i| run_item(cfg, i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;

    fn small() -> SweepConfig {
        SweepConfig {
            instances: 8,
            max_state: 3,
            max_io: 2,
            base_seed: 17,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn small_sweep_passes_with_exact_structure() {
        let summary = sweep(&small());
        assert!(summary.all_passed(), "failed items: {:?}", summary.items);
        assert_eq!(summary.passed, 8);
        for item in &summary.items {
            let cert = item.certificate.as_ref().unwrap();
            assert_eq!(cert.structure.deviation, 0.0);
        }
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let cfg = small();
        let a = serde_json::to_string(&sweep(&cfg)).unwrap();
        let b = serde_json::to_string(&sweep_sequential(&cfg)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn skew_and_rotated_alpha_sweep() {
        let cfg = SweepConfig {
            instances: 6,
            max_state: 2,
            max_io: 2,
            base_seed: 99,
            alpha: c64(0.6, 0.8),
            kinds: vec![ParaKind::Skew],
            ..SweepConfig::default()
        };
        let summary = sweep(&cfg);
        assert!(summary.all_passed(), "failed items: {:?}", summary.items);
        assert!(summary
            .items
            .iter()
            .all(|it| it.kind == ParaKind::Skew && it.state_dim <= 2));
    }

    #[test]
    fn empty_sweep() {
        let cfg = SweepConfig {
            instances: 0,
            ..SweepConfig::default()
        };
        let summary = sweep(&cfg);
        assert!(summary.all_passed());
        assert!(summary.items.is_empty());
    }
}
