//! Exact finite-scale ground truth by direct enumeration of symbolic
//! approximate cubes.
//!
//! A cube is determined by its ordering, its stopping vector and its blocks
//! of projected symbols. The enumerator extends words symbol by symbol; while
//! `n` coordinates are still running it branches over the level-`n` overlap
//! classes (class members share every contraction ratio that still matters),
//! and whenever running products drop to the scale, the corresponding
//! coordinates stop and the alphabet shrinks. Every cube is produced exactly
//! once, stopping comparisons are exact rational arithmetic, and traversal is
//! sequential, so all accumulated quantities are bit-stable.

use crate::exact::Exact;
use crate::ifs::SpongeIfs;
use crate::numerics::{Kahan, LogSumExp};
use crate::orderings::{coefficients_of_levels, Coefficients};
use crate::potentials::{cube_measure, phi_value, MeasureTable, PotentialFamily, WeightedMeasure};
use crate::projection::{OverlapClasses, Permutation, Projections};
use crate::system::System;
use num_bigint::BigUint;
use num_traits::Signed;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

/// Default cap on the number of enumerated cubes.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("delta must lie strictly between 0 and 1")]
    InvalidDelta,
    #[error("cube budget exceeded: estimated {estimate:.3e} cubes, budget {budget} (saw {visited})")]
    BudgetExceeded {
        budget: u64,
        estimate: f64,
        visited: u64,
    },
    #[error("enumerated an ordering outside the admissible set: {0}")]
    UnknownOrdering(Permutation),
}

/// A symbolic approximate cube.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximateCube {
    pub ordering: Permutation,
    /// `stoppings[n-1]` is the stopping time of the coordinate at position `n`.
    pub stoppings: Vec<usize>,
    /// `blocks[n-1]`: level-`n` symbols as canonical map indices.
    pub blocks: Vec<Vec<usize>>,
    /// Same blocks, as slots into the level's surviving index set.
    pub block_slots: Vec<Vec<usize>>,
    /// `log_sides[n-1]`: log of the coordinate product at its stopping.
    pub log_sides: Vec<f64>,
}

impl ApproximateCube {
    /// Length of the defining symbol sequence.
    pub fn word_len(&self) -> usize {
        self.stoppings[0]
    }

    pub fn block_len(&self, n: usize) -> usize {
        self.blocks[n - 1].len()
    }
}

/// Empirical symbol counts of a cube, block by block.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TypeVector {
    pub ordering: Permutation,
    /// `counts[n-1][slot]` over the level-`n` surviving index set.
    pub counts: Vec<Vec<u32>>,
}

impl TypeVector {
    pub fn of_cube(cube: &ApproximateCube, proj: &Projections) -> Self {
        let counts = cube
            .block_slots
            .iter()
            .enumerate()
            .map(|(k, slots)| {
                let mut c = vec![0u32; proj.indices(k + 1).len()];
                for &s in slots {
                    c[s] += 1;
                }
                c
            })
            .collect();
        TypeVector {
            ordering: cube.ordering.clone(),
            counts,
        }
    }

    pub fn block_len(&self, n: usize) -> usize {
        self.counts[n - 1].iter().map(|&c| c as usize).sum()
    }

    /// Normalized frequencies; an empty block becomes the zero vector.
    pub fn frequencies(&self) -> Vec<Vec<f64>> {
        self.counts
            .iter()
            .map(|c| {
                let len: u32 = c.iter().sum();
                if len == 0 {
                    vec![0.0; c.len()]
                } else {
                    c.iter().map(|&k| k as f64 / len as f64).collect()
                }
            })
            .collect()
    }

    pub fn coefficients(&self, ifs: &SpongeIfs, proj: &Projections) -> Coefficients {
        coefficients_of_levels(ifs, proj, &self.frequencies())
    }

    /// Shannon entropy of the level-`n` frequency vector.
    pub fn entropy(&self, n: usize) -> f64 {
        let len: u32 = self.counts[n - 1].iter().sum();
        if len == 0 {
            return 0.0;
        }
        self.counts[n - 1]
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / len as f64;
                -p * p.ln()
            })
            .sum()
    }
}

/// Traversal statistics.
#[derive(Debug, Clone)]
pub struct EnumStats {
    pub cube_count: u64,
    pub orderings_seen: Vec<Permutation>,
    /// Per ordering, per level, the largest block length seen.
    pub max_block_len: BTreeMap<Permutation, Vec<usize>>,
}

/// Predicted cube count, used to refuse hopeless enumerations up front. The
/// growth exponent is the zero-potential closed-form upper bound.
pub fn count_estimate(sys: &System, delta: &Exact) -> f64 {
    let t0 = crate::pressure::box_counting_upper_exponent(sys);
    (-t0 * delta.to_f64().ln()).exp()
}

struct Enumerator<'a> {
    sys: &'a System,
    d: usize,
    lam: Vec<Vec<(BigUint, BigUint)>>,
    delta: (BigUint, BigUint),
    classes: HashMap<u32, OverlapClasses>,
    budget: u64,
    count: u64,
    // work state
    blocks: Vec<Vec<usize>>,
    block_slots: Vec<Vec<usize>>,
    batches: Vec<(usize, Vec<usize>)>,
    log_stop: Vec<f64>,
    orderings_seen: BTreeSet<Permutation>,
    max_block_len: BTreeMap<Permutation, Vec<usize>>,
}

fn exact_to_biguint_pair(x: &Exact) -> (BigUint, BigUint) {
    assert!(x.0.is_positive());
    (
        x.0.numer().magnitude().clone(),
        x.0.denom().magnitude().clone(),
    )
}

impl<'a> Enumerator<'a> {
    fn new(sys: &'a System, delta: &Exact, budget: u64) -> Self {
        let ifs = sys.ifs();
        let d = ifs.dim();
        let lam = (0..ifs.len())
            .map(|i| {
                (0..d)
                    .map(|c| exact_to_biguint_pair(&ifs.lambda(i, c)))
                    .collect()
            })
            .collect();
        Enumerator {
            sys,
            d,
            lam,
            delta: exact_to_biguint_pair(delta),
            classes: HashMap::new(),
            budget,
            count: 0,
            blocks: vec![Vec::new(); d],
            block_slots: vec![Vec::new(); d],
            batches: Vec::new(),
            log_stop: vec![0.0; d],
            orderings_seen: BTreeSet::new(),
            max_block_len: BTreeMap::new(),
        }
    }

    fn classes_for(&mut self, mask: u32) -> OverlapClasses {
        let sys = self.sys;
        self.classes
            .entry(mask)
            .or_insert_with(|| OverlapClasses::for_subset(sys.ifs(), mask))
            .clone()
    }

    /// `prod <= delta` in exact arithmetic.
    fn at_or_below_delta(&self, prod: &(BigUint, BigUint)) -> bool {
        &prod.0 * &self.delta.1 <= &self.delta.0 * &prod.1
    }

    fn emit(
        &mut self,
        visit: &mut dyn FnMut(&ApproximateCube) -> Result<(), OracleError>,
    ) -> Result<(), OracleError> {
        self.count += 1;
        if self.count > self.budget {
            return Err(OracleError::BudgetExceeded {
                budget: self.budget,
                estimate: self.count as f64,
                visited: self.count,
            });
        }
        // Assemble sigma from the stopping batches: earlier batches occupy
        // deeper positions; within a batch the larger coordinate goes deeper.
        let mut coords = vec![usize::MAX; self.d];
        let mut stoppings = vec![0usize; self.d];
        let mut pos = self.d;
        for (position, batch) in &self.batches {
            for &c in batch.iter().rev() {
                pos -= 1;
                coords[pos] = c;
                stoppings[pos] = *position;
            }
        }
        debug_assert_eq!(pos, 0);
        let ordering = Permutation::new(coords);
        let log_sides = (1..=self.d)
            .map(|n| self.log_stop[ordering.coord_at(n)])
            .collect();
        let cube = ApproximateCube {
            ordering: ordering.clone(),
            stoppings,
            blocks: self.blocks.clone(),
            block_slots: self.block_slots.clone(),
            log_sides,
        };
        self.orderings_seen.insert(ordering.clone());
        let entry = self
            .max_block_len
            .entry(ordering)
            .or_insert_with(|| vec![0; self.d]);
        for n in 1..=self.d {
            entry[n - 1] = entry[n - 1].max(cube.block_len(n));
        }
        visit(&cube)
    }

    fn dfs(
        &mut self,
        active: u32,
        products: &[(BigUint, BigUint)],
        log_products: &[f64],
        position: usize,
        visit: &mut dyn FnMut(&ApproximateCube) -> Result<(), OracleError>,
    ) -> Result<(), OracleError> {
        if active == 0 {
            return self.emit(visit);
        }
        let level = active.count_ones() as usize;
        let classes = self.classes_for(active);
        for (slot, &rep) in classes.indices.iter().enumerate() {
            let mut next_products = products.to_vec();
            let mut next_logs = log_products.to_vec();
            let mut stopped: Vec<usize> = Vec::new();
            for c in 0..self.d {
                if active & (1 << c) == 0 {
                    continue;
                }
                let (ln, ld) = &self.lam[rep][c];
                next_products[c] = (&next_products[c].0 * ln, &next_products[c].1 * ld);
                next_logs[c] += self.sys.ifs().log_lambda(rep, c);
                if self.at_or_below_delta(&next_products[c]) {
                    stopped.push(c);
                }
            }
            self.blocks[level - 1].push(rep);
            self.block_slots[level - 1].push(slot);
            let mut next_active = active;
            if !stopped.is_empty() {
                for &c in &stopped {
                    next_active &= !(1 << c);
                    self.log_stop[c] = next_logs[c];
                }
                self.batches.push((position + 1, stopped));
            }
            let result = self.dfs(next_active, &next_products, &next_logs, position + 1, visit);
            if next_active != active {
                self.batches.pop();
            }
            self.blocks[level - 1].pop();
            self.block_slots[level - 1].pop();
            result?;
        }
        Ok(())
    }
}

/// Enumerates every approximate cube at scale `delta`, feeding each to
/// `visit`. Refuses up front when the predicted count exceeds `budget`, and
/// aborts if the actual count does.
pub fn enumerate_cubes(
    sys: &System,
    delta: &Exact,
    budget: u64,
    visit: &mut dyn FnMut(&ApproximateCube) -> Result<(), OracleError>,
) -> Result<EnumStats, OracleError> {
    if delta <= &Exact::zero() || delta >= &Exact::one() {
        return Err(OracleError::InvalidDelta);
    }
    let estimate = count_estimate(sys, delta);
    if estimate > budget as f64 {
        return Err(OracleError::BudgetExceeded {
            budget,
            estimate,
            visited: 0,
        });
    }
    let mut en = Enumerator::new(sys, delta, budget);
    let products = vec![(BigUint::from(1u8), BigUint::from(1u8)); en.d];
    let logs = vec![0.0; en.d];
    let full = (1u32 << en.d) - 1;
    en.dfs(full, &products, &logs, 0, visit)?;
    Ok(EnumStats {
        cube_count: en.count,
        orderings_seen: en.orderings_seen.into_iter().collect(),
        max_block_len: en.max_block_len,
    })
}

/// Collects all cubes grouped by ordering; intended for small scales.
pub fn collect_cubes(
    sys: &System,
    delta: &Exact,
    budget: u64,
) -> Result<BTreeMap<Permutation, Vec<ApproximateCube>>, OracleError> {
    let mut grouped: BTreeMap<Permutation, Vec<ApproximateCube>> = BTreeMap::new();
    enumerate_cubes(sys, delta, budget, &mut |cube| {
        grouped
            .entry(cube.ordering.clone())
            .or_default()
            .push(cube.clone());
        Ok(())
    })?;
    Ok(grouped)
}

/// Finite-scale pressure estimate.
#[derive(Debug, Clone)]
pub struct FiniteScalePressure {
    /// `log(sum over cubes of exp Phi) / (-log delta)`.
    pub estimate: f64,
    /// Per-ordering log-sums `log Z`.
    pub per_ordering: Vec<(Permutation, f64)>,
    pub cube_count: u64,
}

pub fn finite_scale_pressure(
    sys: &System,
    phi: &PotentialFamily,
    delta: &Exact,
    budget: u64,
) -> Result<FiniteScalePressure, OracleError> {
    let mut acc: BTreeMap<Permutation, LogSumExp> = BTreeMap::new();
    let stats = enumerate_cubes(sys, delta, budget, &mut |cube| {
        let value = phi_value(phi, cube)
            .map_err(|_| OracleError::UnknownOrdering(cube.ordering.clone()))?;
        acc.entry(cube.ordering.clone()).or_default().add(value);
        Ok(())
    })?;
    let per_ordering: Vec<(Permutation, f64)> = acc
        .iter()
        .map(|(sigma, lse)| (sigma.clone(), lse.value()))
        .collect();
    let total = crate::numerics::log_sum_exp(
        &per_ordering.iter().map(|(_, z)| *z).collect::<Vec<_>>(),
    );
    Ok(FiniteScalePressure {
        estimate: total / -delta.to_f64().ln(),
        per_ordering,
        cube_count: stats.cube_count,
    })
}

/// `sum over all cubes of the cube measure` (equals 1 when the cubes
/// partition the symbolic space).
pub fn partition_total(
    sys: &System,
    mu: &WeightedMeasure,
    delta: &Exact,
    budget: u64,
) -> Result<f64, OracleError> {
    let table = MeasureTable::build(sys, mu);
    let mut total = Kahan::new();
    enumerate_cubes(sys, delta, budget, &mut |cube| {
        total.add(cube_measure(&table, cube).value);
        Ok(())
    })?;
    Ok(total.value())
}

/// Census of empirical types for one ordering at one scale.
#[derive(Debug, Clone)]
pub struct TypeCensus {
    pub ordering: Permutation,
    pub entries: Vec<(TypeVector, u64)>,
    /// Per level, the largest block length among this ordering's cubes.
    pub max_block_len: Vec<usize>,
    pub cube_count: u64,
}

pub fn type_census(
    sys: &System,
    delta: &Exact,
    sigma: &Permutation,
    budget: u64,
) -> Result<TypeCensus, OracleError> {
    let proj = sys.projections(sigma);
    let mut census: BTreeMap<TypeVector, u64> = BTreeMap::new();
    let mut max_block_len = vec![0usize; sys.dim()];
    let mut cube_count = 0u64;
    enumerate_cubes(sys, delta, budget, &mut |cube| {
        if cube.ordering != *sigma {
            return Ok(());
        }
        cube_count += 1;
        for n in 1..=sys.dim() {
            max_block_len[n - 1] = max_block_len[n - 1].max(cube.block_len(n));
        }
        *census.entry(TypeVector::of_cube(cube, proj)).or_insert(0) += 1;
        Ok(())
    })?;
    Ok(TypeCensus {
        ordering: sigma.clone(),
        entries: census.into_iter().collect(),
        max_block_len,
        cube_count,
    })
}

impl TypeCensus {
    /// Checks the two-sided class-size bound
    /// `exp(sum len_n H_n) prod (len_n+1)^{-#I_n} <= count <= exp(sum len_n H_n)`
    /// for every censused type; returns descriptions of violations.
    pub fn class_size_violations(&self, proj: &Projections) -> Vec<String> {
        let mut out = Vec::new();
        for (tv, count) in &self.entries {
            let log_count = (*count as f64).ln();
            let mut upper = 0.0;
            let mut slack = 0.0;
            for n in 1..=tv.counts.len() {
                let len = tv.block_len(n) as f64;
                upper += len * tv.entropy(n);
                slack += proj.indices(n).len() as f64 * (len + 1.0).ln();
            }
            let tol = 1e-9 * (1.0 + upper.abs());
            if log_count > upper + tol {
                out.push(format!(
                    "type {:?}: count {count} above exp({upper:.6})",
                    tv.counts
                ));
            }
            if log_count < upper - slack - tol {
                out.push(format!(
                    "type {:?}: count {count} below exp({:.6})",
                    tv.counts,
                    upper - slack
                ));
            }
        }
        out
    }

    /// Checks `#types <= prod (max_len_n + 1)^(#I_n + 1)`.
    pub fn type_count_bound_satisfied(&self, proj: &Projections) -> bool {
        let mut log_bound = 0.0;
        for n in 1..=self.max_block_len.len() {
            let exponent = proj.indices(n).len() as f64 + 1.0;
            log_bound += exponent * (self.max_block_len[n - 1] as f64 + 1.0).ln();
        }
        (self.entries.len() as f64).ln() <= log_bound + 1e-12
    }

    /// Checks the block-length sandwich
    /// `-C_n log delta <= len_n <= -(1 + log lambda_min / log delta) C_n log delta`
    /// with the coefficients of each type's own frequencies; returns
    /// descriptions of violations.
    pub fn stopping_sandwich_violations(
        &self,
        ifs: &SpongeIfs,
        proj: &Projections,
        delta: &Exact,
    ) -> Vec<String> {
        let ln_delta = delta.to_f64().ln();
        let kappa = ifs.lambda_min().ln() / ln_delta;
        let mut out = Vec::new();
        for (tv, _) in &self.entries {
            let coeff = tv.coefficients(ifs, proj);
            for n in 1..=tv.counts.len() {
                let len = tv.block_len(n) as f64;
                let lower = -coeff.values[n - 1] * ln_delta;
                let upper = -(1.0 + kappa) * coeff.values[n - 1] * ln_delta;
                let tol = 1e-9 * (1.0 + lower.abs());
                if len < lower - tol || len > upper + tol {
                    out.push(format!(
                        "type {:?} level {n}: len {len} outside [{lower:.6}, {upper:.6}]",
                        tv.counts
                    ));
                }
            }
        }
        out
    }

    /// The raw per-coordinate stopping inequality that every censused type
    /// must satisfy by construction:
    /// `-log delta <= sum_{m>=n} len_m chi_n(p_m) <= -log delta - log lambda_min`.
    pub fn raw_stopping_violations(
        &self,
        ifs: &SpongeIfs,
        proj: &Projections,
        delta: &Exact,
    ) -> Vec<String> {
        let minus_ln_delta = -delta.to_f64().ln();
        let bound = minus_ln_delta - ifs.lambda_min().ln();
        let mut out = Vec::new();
        for (tv, _) in &self.entries {
            let freqs = tv.frequencies();
            let d = tv.counts.len();
            for n in 1..=d {
                let coord = proj.ordering.coord_at(n);
                let mut total = 0.0;
                for m in n..=d {
                    let len = tv.block_len(m) as f64;
                    total += len
                        * crate::orderings::lyapunov(ifs, &freqs[m - 1], proj.indices(m), coord);
                }
                if total < minus_ln_delta - 1e-9 || total > bound + 1e-9 {
                    out.push(format!(
                        "type {:?} coordinate position {n}: {total:.6} outside [{minus_ln_delta:.6}, {bound:.6}]",
                        tv.counts
                    ));
                }
            }
        }
        out
    }
}

/// Extremes of cube-measure exponents `log nu(B) / log delta`.
#[derive(Debug, Clone)]
pub struct MeasureExtremes {
    /// Smallest exponent = largest cube measure.
    pub min_exponent: f64,
    /// Largest exponent = smallest cube measure.
    pub max_exponent: f64,
    pub per_ordering: Vec<(Permutation, f64, f64)>,
    pub cube_count: u64,
}

pub fn finite_scale_measure_extremes(
    sys: &System,
    mu: &WeightedMeasure,
    delta: &Exact,
    budget: u64,
) -> Result<MeasureExtremes, OracleError> {
    let table = MeasureTable::build(sys, mu);
    let ln_delta = delta.to_f64().ln();
    let mut per: BTreeMap<Permutation, (f64, f64)> = BTreeMap::new();
    let stats = enumerate_cubes(sys, delta, budget, &mut |cube| {
        let exponent = cube_measure(&table, cube).log / ln_delta;
        let entry = per
            .entry(cube.ordering.clone())
            .or_insert((f64::INFINITY, f64::NEG_INFINITY));
        entry.0 = entry.0.min(exponent);
        entry.1 = entry.1.max(exponent);
        Ok(())
    })?;
    let mut min_exponent = f64::INFINITY;
    let mut max_exponent = f64::NEG_INFINITY;
    let per_ordering: Vec<(Permutation, f64, f64)> = per
        .into_iter()
        .map(|(sigma, (lo, hi))| {
            min_exponent = min_exponent.min(lo);
            max_exponent = max_exponent.max(hi);
            (sigma, lo, hi)
        })
        .collect();
    Ok(MeasureExtremes {
        min_exponent,
        max_exponent,
        per_ordering,
        cube_count: stats.cube_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn self_similar_cubes_are_binary_words() {
        let sys = System::new(fixtures::self_similar());
        let grouped = collect_cubes(&sys, &Exact::pow2_neg(3), 1_000_000).unwrap();
        assert_eq!(grouped.len(), 1);
        let (sigma, cubes) = grouped.iter().next().unwrap();
        assert_eq!(*sigma, Permutation::identity(2));
        assert_eq!(cubes.len(), 8);
        for cube in cubes {
            assert_eq!(cube.stoppings, vec![3, 3]);
            assert_eq!(cube.block_len(2), 3);
            assert_eq!(cube.block_len(1), 0);
        }
    }

    #[test]
    fn delta_one_is_rejected() {
        let sys = System::new(fixtures::self_similar());
        let err = enumerate_cubes(&sys, &Exact::one(), 100, &mut |_| Ok(()))
            .err()
            .unwrap();
        assert_eq!(err, OracleError::InvalidDelta);
    }

    #[test]
    fn hopeless_budgets_are_refused_up_front() {
        let sys = System::new(fixtures::self_similar());
        let err = enumerate_cubes(&sys, &Exact::pow2_neg(40), 1_000, &mut |_| Ok(()))
            .err()
            .unwrap();
        assert!(matches!(
            err,
            OracleError::BudgetExceeded { visited: 0, .. }
        ));
    }

    #[test]
    fn carpet_cubes_partition_the_symbolic_space() {
        let sys = System::new(fixtures::baranski_planar());
        let mu = WeightedMeasure::two_point(0.35);
        let total = partition_total(&sys, &mu, &Exact::pow2_neg(6), 1_000_000).unwrap();
        assert!((total - 1.0).abs() < 1e-12, "total = {total}");
        // Both orderings occur among the cubes.
        let grouped = collect_cubes(&sys, &Exact::pow2_neg(6), 1_000_000).unwrap();
        assert_eq!(grouped.len(), 2);
    }

    #[test]
    fn block_lengths_match_stoppings() {
        let sys = System::new(fixtures::baranski_planar());
        enumerate_cubes(&sys, &Exact::pow2_neg(5), 1_000_000, &mut |cube| {
            let d = cube.stoppings.len();
            for n in 1..=d {
                let upper = cube.stoppings[n - 1];
                let lower = if n == d { 0 } else { cube.stoppings[n] };
                assert_eq!(cube.block_len(n), upper - lower);
            }
            assert!(cube.stoppings.windows(2).all(|w| w[0] >= w[1]));
            Ok(())
        })
        .unwrap();
    }

    #[test]
    fn self_similar_finite_scale_pressure_is_one() {
        let sys = System::new(fixtures::self_similar());
        let phi = PotentialFamily::zero(&sys);
        for k in [3u32, 6, 9] {
            let fs = finite_scale_pressure(&sys, &phi, &Exact::pow2_neg(k), 1_000_000).unwrap();
            assert!((fs.estimate - 1.0).abs() < 1e-12, "k={k}: {}", fs.estimate);
            assert_eq!(fs.cube_count, 1u64 << k);
        }
    }

    #[test]
    fn self_similar_type_class_sizes_are_multinomial() {
        let sys = System::new(fixtures::self_similar());
        let census = type_census(
            &sys,
            &Exact::pow2_neg(3),
            &Permutation::identity(2),
            1_000_000,
        )
        .unwrap();
        // Types are (k, 3-k) at level 2 with class size binomial(3, k).
        assert_eq!(census.entries.len(), 4);
        for (tv, count) in &census.entries {
            let k = tv.counts[1][0];
            let expected = [1u64, 3, 3, 1][k as usize];
            assert_eq!(*count, expected);
        }
        let proj = sys.projections(&Permutation::identity(2));
        assert!(census.class_size_violations(proj).is_empty());
        assert!(census.type_count_bound_satisfied(proj));
        assert!(census
            .raw_stopping_violations(sys.ifs(), proj, &Exact::pow2_neg(3))
            .is_empty());
    }

    #[test]
    fn degenerate_type_has_class_size_one() {
        let sys = System::new(fixtures::self_similar());
        let census = type_census(
            &sys,
            &Exact::pow2_neg(4),
            &Permutation::identity(2),
            1_000_000,
        )
        .unwrap();
        let degenerate: Vec<_> = census
            .entries
            .iter()
            .filter(|(tv, _)| tv.counts[1].iter().any(|&c| c == 4))
            .collect();
        assert_eq!(degenerate.len(), 2);
        for (tv, count) in degenerate {
            assert_eq!(*count, 1);
            assert_eq!(tv.entropy(2), 0.0);
        }
    }

    #[test]
    fn self_similar_measure_exponents_are_exactly_one() {
        let sys = System::new(fixtures::self_similar());
        let mu = WeightedMeasure::uniform(2);
        let ex =
            finite_scale_measure_extremes(&sys, &mu, &Exact::pow2_neg(8), 1_000_000).unwrap();
        assert!((ex.min_exponent - 1.0).abs() < 1e-12);
        assert!((ex.max_exponent - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orderings_seen_are_admissible() {
        let sys = System::new(fixtures::lalley_gatzouras());
        let stats = enumerate_cubes(&sys, &Exact::pow2_neg(8), 1_000_000, &mut |_| Ok(()))
            .unwrap();
        let adm = sys.admissible();
        for sigma in &stats.orderings_seen {
            assert!(adm.contains(sigma), "{sigma} not admissible");
        }
    }
}
