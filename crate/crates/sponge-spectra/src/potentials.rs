//! Potential families, projected measures, cube values and cube measures,
//! and the discrete Legendre transform.
//!
//! A potential family assigns a real value to every surviving index at every
//! level of every admissible ordering. Summing a family over the blocks of an
//! approximate cube gives the cube's value; for the `L^q` family
//! `psi_q(i) = q log mu_n(i)` the exponential of the cube value is exactly
//! the q-th power of the cube's measure.

use crate::exact::Exact;
use crate::numerics::Kahan;
use crate::oracle::ApproximateCube;
use crate::projection::Permutation;
use crate::system::System;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("measure entries must be strictly positive")]
    NonPositiveMeasure,
    #[error("measure has {got} entries, system has {expected} maps")]
    MeasureLength { expected: usize, got: usize },
    #[error("cube ordering {0} is absent from the potential table")]
    UnknownOrdering(Permutation),
    #[error("need at least 2 spectrum samples for a Legendre transform")]
    TooFewSamples,
}

/// A fully supported probability vector on the maps of a system.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMeasure {
    weights: Vec<f64>,
    logs: Vec<f64>,
}

impl WeightedMeasure {
    /// Normalizes a strictly positive weight vector.
    pub fn new(weights: Vec<f64>) -> Result<Self, PotentialError> {
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(PotentialError::NonPositiveMeasure);
        }
        let sum: f64 = weights.iter().sum();
        let weights: Vec<f64> = weights.into_iter().map(|w| w / sum).collect();
        let logs = weights.iter().map(|w| w.ln()).collect();
        Ok(WeightedMeasure { weights, logs })
    }

    /// Exact-input variant: positivity is decided on the rationals.
    pub fn from_exact(weights: &[Exact]) -> Result<Self, PotentialError> {
        let zero = Exact::zero();
        if weights.iter().any(|w| w <= &zero) {
            return Err(PotentialError::NonPositiveMeasure);
        }
        let mut sum = Exact::zero();
        for w in weights {
            sum = &sum + w;
        }
        let weights: Vec<f64> = weights
            .iter()
            .map(|w| Exact(w.0.clone() / sum.0.clone()).to_f64())
            .collect();
        let logs = weights.iter().map(|w| w.ln()).collect();
        Ok(WeightedMeasure { weights, logs })
    }

    pub fn uniform(n: usize) -> Self {
        WeightedMeasure::new(vec![1.0; n]).unwrap()
    }

    pub fn two_point(u: f64) -> Self {
        WeightedMeasure::new(vec![u, 1.0 - u]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn log(&self, i: usize) -> f64 {
        self.logs[i]
    }
}

/// Projection of a measure to the surviving index set at level `n` of an
/// admissible ordering: each surviving index collects the mass of its
/// overlap class.
pub fn project_measure(
    sys: &System,
    mu: &WeightedMeasure,
    sigma: &Permutation,
    n: usize,
) -> Vec<f64> {
    assert_eq!(mu.len(), sys.ifs().len(), "measure length mismatch");
    let proj = sys.projections(sigma);
    let level = proj.level(n);
    let mut out = vec![0.0; level.indices.len()];
    for (j, &w) in mu.weights().iter().enumerate() {
        out[level.slot_of(level.proj[j])] += w;
    }
    out
}

/// Per-ordering, per-level projected measures with cached logarithms.
#[derive(Debug, Clone)]
pub struct MeasureTable {
    orderings: Vec<Permutation>,
    mu: Vec<Vec<Vec<f64>>>,
    log_mu: Vec<Vec<Vec<f64>>>,
}

impl MeasureTable {
    pub fn build(sys: &System, mu: &WeightedMeasure) -> Self {
        let mut orderings = Vec::new();
        let mut mu_table = Vec::new();
        let mut log_table = Vec::new();
        for sigma in sys.admissible() {
            let levels: Vec<Vec<f64>> = (1..=sys.dim())
                .map(|n| project_measure(sys, mu, sigma, n))
                .collect();
            log_table.push(
                levels
                    .iter()
                    .map(|v| v.iter().map(|&x| x.ln()).collect())
                    .collect(),
            );
            mu_table.push(levels);
            orderings.push(sigma.clone());
        }
        MeasureTable {
            orderings,
            mu: mu_table,
            log_mu: log_table,
        }
    }

    fn index_of(&self, sigma: &Permutation) -> Option<usize> {
        self.orderings.iter().position(|p| p == sigma)
    }

    /// Projected measure at level `n`, aligned with the surviving index set.
    pub fn mu(&self, sigma: &Permutation, n: usize) -> &[f64] {
        &self.mu[self.index_of(sigma).expect("ordering in table")][n - 1]
    }

    pub fn log_mu(&self, sigma: &Permutation, n: usize) -> &[f64] {
        &self.log_mu[self.index_of(sigma).expect("ordering in table")][n - 1]
    }
}

/// A real-valued function on every surviving index of every admissible
/// ordering and level.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialFamily {
    orderings: Vec<Permutation>,
    values: Vec<Vec<Vec<f64>>>,
}

impl PotentialFamily {
    /// The zero family.
    pub fn zero(sys: &System) -> Self {
        let orderings: Vec<Permutation> = sys.admissible().to_vec();
        let values = orderings
            .iter()
            .map(|sigma| {
                let proj = sys.projections(sigma);
                (1..=sys.dim())
                    .map(|n| vec![0.0; proj.indices(n).len()])
                    .collect()
            })
            .collect();
        PotentialFamily { orderings, values }
    }

    /// The `L^q` family `psi_q(i) = q log mu_n(i)`.
    pub fn lq(sys: &System, mu: &WeightedMeasure, q: f64) -> Self {
        let table = MeasureTable::build(sys, mu);
        let orderings: Vec<Permutation> = sys.admissible().to_vec();
        let values = orderings
            .iter()
            .map(|sigma| {
                (1..=sys.dim())
                    .map(|n| table.log_mu(sigma, n).iter().map(|&l| q * l).collect())
                    .collect()
            })
            .collect();
        PotentialFamily { orderings, values }
    }

    pub fn orderings(&self) -> &[Permutation] {
        &self.orderings
    }

    pub fn level(&self, sigma: &Permutation, n: usize) -> Option<&[f64]> {
        let idx = self.orderings.iter().position(|p| p == sigma)?;
        Some(&self.values[idx][n - 1])
    }

    /// `sum_i p(i) phi_n(i)` over a level vector.
    pub fn integral(&self, sigma: &Permutation, n: usize, p: &[f64]) -> f64 {
        let phi = self.level(sigma, n).expect("ordering in table");
        p.iter().zip(phi).map(|(a, b)| a * b).sum()
    }
}

/// Value of a potential family on an approximate cube: the sum of the level
/// potential over each block's symbols.
pub fn phi_value(phi: &PotentialFamily, cube: &ApproximateCube) -> Result<f64, PotentialError> {
    let sigma = &cube.ordering;
    if phi.level(sigma, 1).is_none() {
        return Err(PotentialError::UnknownOrdering(sigma.clone()));
    }
    let mut total = 0.0;
    for (k, slots) in cube.block_slots.iter().enumerate() {
        let values = phi.level(sigma, k + 1).unwrap();
        for &slot in slots {
            total += values[slot];
        }
    }
    Ok(total)
}

/// A cube's measure, carried both as a log and as a linear value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubeMeasure {
    pub log: f64,
    pub value: f64,
}

/// Product over blocks of the projected measure of each symbol.
pub fn cube_measure(table: &MeasureTable, cube: &ApproximateCube) -> CubeMeasure {
    let sigma = &cube.ordering;
    let mut log = Kahan::new();
    let mut value = 1.0f64;
    for (k, block) in cube.blocks.iter().enumerate() {
        let mu = table.mu(sigma, k + 1);
        let log_mu = table.log_mu(sigma, k + 1);
        for &slot in &cube.block_slots[k] {
            log.add(log_mu[slot]);
            value *= mu[slot];
        }
        let _ = block;
    }
    CubeMeasure {
        log: log.value(),
        value,
    }
}

/// Convenience wrapper building the projection table on the fly.
pub fn cube_measure_direct(
    sys: &System,
    mu: &WeightedMeasure,
    cube: &ApproximateCube,
) -> CubeMeasure {
    cube_measure(&MeasureTable::build(sys, mu), cube)
}

/// Discrete Legendre-Fenchel transform of a sampled spectrum:
/// `f(alpha) = inf_q (q alpha + T(q))`, evaluated at the slopes attained by
/// the sample. Returns `(alpha, f(alpha))` pairs sorted by `alpha`.
pub fn legendre_transform(q: &[f64], t: &[f64]) -> Result<Vec<(f64, f64)>, PotentialError> {
    assert_eq!(q.len(), t.len());
    if q.len() < 2 {
        return Err(PotentialError::TooFewSamples);
    }
    let mut alphas: Vec<f64> = q
        .windows(2)
        .zip(t.windows(2))
        .map(|(qw, tw)| -(tw[1] - tw[0]) / (qw[1] - qw[0]))
        .collect();
    alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    alphas.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let pairs = alphas
        .into_iter()
        .map(|alpha| {
            let f = q
                .iter()
                .zip(t)
                .map(|(&qi, &ti)| qi * alpha + ti)
                .fold(f64::INFINITY, f64::min);
            (alpha, f)
        })
        .collect();
    Ok(pairs)
}
