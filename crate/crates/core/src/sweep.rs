//! Randomized bulk verification of the bounds.
//!
//! A sweep draws shapes keyed to `(seed, sample_index)`, verifies every
//! applicable order against the requested bound family, and aggregates
//! slacks. Samples are processed in parallel, but each sample's generator
//! depends only on its index and results are aggregated in index order, so
//! a report is byte-identical however many workers ran it.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{verify_with, BoundKind, Verdict, VerifyOptions};
use crate::error::Result;
use crate::invariants::ThetaOptions;
use crate::io::ShapeDocument;
use crate::sample::{random_lagrangian, random_shape, sample_rng};
use crate::shape::AmbientForm;

/// What to sweep and how hard.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub kind: BoundKind,
    /// Tangent dimensions to draw from.
    pub dims: Vec<usize>,
    /// Codimensions to draw from (ignored for the Lagrangian family, where
    /// `p = n`).
    pub codims: Vec<usize>,
    pub count: usize,
    pub seed: u64,
    /// Half-width of the uniform interval operator entries are drawn from.
    pub amplitude: f64,
    /// Curvature constants are drawn uniformly from this interval.
    pub c_range: (f64, f64),
    pub holds_tol: f64,
    pub equality_tol: f64,
    pub theta: ThetaOptions,
}

impl SweepConfig {
    pub fn new(kind: BoundKind) -> Self {
        Self {
            kind,
            dims: vec![3, 4, 5],
            codims: vec![1, 2, 3],
            count: 100,
            seed: 42,
            amplitude: 1.0,
            c_range: (-2.0, 2.0),
            holds_tol: crate::bounds::DEFAULT_HOLDS_TOL,
            equality_tol: crate::bounds::DEFAULT_EQUALITY_TOL,
            theta: ThetaOptions::sweep(),
        }
    }

    fn validate(&self) -> Result<()> {
        use crate::error::Error;
        if self.dims.is_empty() {
            return Err(Error::InvalidParameter(
                "no tangent dimensions to sweep".into(),
            ));
        }
        if let Some(&bad) = self.dims.iter().find(|&&n| n < 3) {
            return Err(Error::DimensionTooSmall { min: 3, got: bad });
        }
        if self.kind != BoundKind::LagrangianOrderN {
            if self.codims.is_empty() {
                return Err(Error::InvalidParameter("no codimensions to sweep".into()));
            }
            if self.codims.contains(&0) {
                return Err(Error::NoNormalDirections);
            }
        }
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "amplitude must be positive and finite, got {}",
                self.amplitude
            )));
        }
        let (lo, hi) = self.c_range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidParameter(format!(
                "curvature range ({lo}, {hi}) is not a finite interval"
            )));
        }
        Ok(())
    }
}

/// Slack statistics for one order `k`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KStats {
    pub k: usize,
    pub checks: usize,
    pub min_slack: f64,
    pub max_slack: f64,
    pub mean_slack: f64,
}

/// A failed check, with everything needed to replay it.
#[derive(Clone, Debug, Serialize)]
pub struct SweepViolation {
    pub sample_index: u64,
    pub shape: ShapeDocument,
    pub verdict: Verdict,
}

/// The aggregate outcome of a sweep.
#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub kind: BoundKind,
    pub seed: u64,
    pub samples: usize,
    /// Total verdicts evaluated (one per applicable order per sample).
    pub checks: usize,
    /// Smallest slack seen anywhere; `null` when nothing ran.
    pub min_slack: Option<f64>,
    pub per_k: Vec<KStats>,
    pub violations: Vec<SweepViolation>,
    /// Wall time; excluded from serialization so reports stay
    /// byte-comparable across machines.
    #[serde(skip)]
    pub wall_time: Duration,
}

struct SampleOutcome {
    slacks: Vec<(usize, f64)>,
    violations: Vec<SweepViolation>,
}

fn run_sample(cfg: &SweepConfig, index: u64) -> Result<SampleOutcome> {
    let mut rng = sample_rng(cfg.seed, index);
    let n = cfg.dims[rng.random_range(0..cfg.dims.len())];
    let (lo, hi) = cfg.c_range;
    let c = if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    };
    let opts = VerifyOptions {
        holds_tol: cfg.holds_tol,
        equality_tol: cfg.equality_tol,
        theta: cfg.theta,
    };

    let (shape, ambient, orders) = match cfg.kind {
        BoundKind::Real => {
            let p = cfg.codims[rng.random_range(0..cfg.codims.len())];
            let shape = random_shape(n, p, cfg.amplitude, &mut rng)?;
            let ambient = AmbientForm::real(c, n + p)?;
            (shape, ambient, (3..=n).collect::<Vec<_>>())
        }
        BoundKind::TotallyReal => {
            let p = cfg.codims[rng.random_range(0..cfg.codims.len())];
            let shape = random_shape(n, p, cfg.amplitude, &mut rng)?;
            let ambient = AmbientForm::complex(c, 2 * (n + p))?;
            (shape, ambient, (3..=n).collect::<Vec<_>>())
        }
        BoundKind::LagrangianOrderN => {
            let shape = random_lagrangian(n, cfg.amplitude, &mut rng)?.into_shape();
            let ambient = AmbientForm::complex(c, 2 * n)?;
            (shape, ambient, vec![n])
        }
    };

    let mut slacks = Vec::with_capacity(orders.len());
    let mut violations = Vec::new();
    for k in orders {
        let verdict = verify_with(&shape, &ambient, k, cfg.kind, &opts)?;
        slacks.push((k, verdict.slack));
        if !verdict.holds {
            violations.push(SweepViolation {
                sample_index: index,
                shape: ShapeDocument::from_parts(&shape, &ambient),
                verdict,
            });
        }
    }
    Ok(SampleOutcome { slacks, violations })
}

/// Run a sweep. Deterministic for a given config, and parallel-safe: the
/// report does not depend on the number of worker threads.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let started = Instant::now();

    let outcomes: Vec<SampleOutcome> = (0..cfg.count as u64)
        .into_par_iter()
        .map(|index| run_sample(cfg, index))
        .collect::<Result<Vec<_>>>()?;

    let mut per_k: BTreeMap<usize, (usize, f64, f64, f64)> = BTreeMap::new();
    let mut min_slack: Option<f64> = None;
    let mut checks = 0usize;
    let mut violations = Vec::new();
    for outcome in outcomes {
        for (k, slack) in outcome.slacks {
            checks += 1;
            let entry = per_k
                .entry(k)
                .or_insert((0, f64::INFINITY, f64::NEG_INFINITY, 0.0));
            entry.0 += 1;
            entry.1 = entry.1.min(slack);
            entry.2 = entry.2.max(slack);
            entry.3 += slack;
            min_slack = Some(min_slack.map_or(slack, |m: f64| m.min(slack)));
        }
        violations.extend(outcome.violations);
    }

    let per_k = per_k
        .into_iter()
        .map(|(k, (count, min, max, sum))| KStats {
            k,
            checks: count,
            min_slack: min,
            max_slack: max,
            mean_slack: sum / count as f64,
        })
        .collect();

    Ok(SweepReport {
        kind: cfg.kind,
        seed: cfg.seed,
        samples: cfg.count,
        checks,
        min_slack,
        per_k,
        violations,
        wall_time: started.elapsed(),
    })
}
