//! Stopping times, scale orderings, Lyapunov exponents, the coefficient
//! recursion, and the admissible ordering set.
//!
//! The stopping time of a word in coordinate `n` at scale `delta` is the
//! first position where the running product of coordinate-`n` contraction
//! ratios drops to `<= delta`. Sorting coordinates by stopping time (slowest
//! first, ties broken towards smaller coordinate index) yields the scale
//! ordering of the word. An ordering is admissible when it is realized at
//! some scale, equivalently when the coefficient cone below is non-empty.
//!
//! For a stack of probability vectors `P = (p_d, …, p_1)` the coefficients
//! `C_d = 1/chi_d(p_d)` and
//! `C_n = (1 - sum_{m>n} C_m chi_n(p_m)) / chi_n(p_n)`
//! measure block lengths per unit of `-log delta`; the feasible region
//! `Q = {P : C_n >= 0 for all n}` is where a stack can occur as the empirical
//! type of an actual word.

use crate::exact::Exact;
use crate::ifs::SpongeIfs;
use crate::optimize::{self, OptimizeConfig};
use crate::projection::{Permutation, Projections};
use crate::words::PeriodicWord;

/// Boundary tolerance for membership in the coefficient cone. Stacks with a
/// vanishing coefficient are legitimate extremizers, so the boundary itself
/// must test as feasible.
pub const TOL_Q: f64 = 1e-12;

/// First `L` with `prod_{l<=L} lambda_{word_l}^(coord) <= delta`, decided by
/// exact rational comparison (a product hitting `delta` exactly stops).
pub fn stopping(ifs: &SpongeIfs, word: &PeriodicWord, delta: &Exact, coord: usize) -> usize {
    assert!(
        delta > &Exact::zero() && delta < &Exact::one(),
        "delta must lie in (0,1)"
    );
    assert!(word.max_symbol() < ifs.len(), "word symbol out of range");
    let mut product = Exact::one();
    for (pos, symbol) in word.symbols().enumerate() {
        product = &product * &ifs.lambda(symbol, coord);
        if product <= *delta {
            return pos + 1;
        }
    }
    unreachable!("contractions force the product below any positive delta")
}

/// The ordering of a word at scale `delta`: coordinates sorted by decreasing
/// stopping time; on ties the smaller coordinate index comes first.
pub fn scale_ordering(ifs: &SpongeIfs, word: &PeriodicWord, delta: &Exact) -> Permutation {
    let d = ifs.dim();
    let stops: Vec<usize> = (0..d).map(|c| stopping(ifs, word, delta, c)).collect();
    let mut coords: Vec<usize> = (0..d).collect();
    coords.sort_by(|&a, &b| stops[b].cmp(&stops[a]).then(a.cmp(&b)));
    Permutation::new(coords)
}

/// Lyapunov exponent `-sum_i p(i) log lambda_i^(coord)` of a vector supported
/// on the given index set.
pub fn lyapunov(ifs: &SpongeIfs, p: &[f64], support: &[usize], coord: usize) -> f64 {
    assert_eq!(p.len(), support.len());
    let mut acc = 0.0;
    for (w, &i) in p.iter().zip(support) {
        acc -= w * ifs.log_lambda(i, coord);
    }
    acc
}

/// A stack of probability vectors, one per projection level: `level(n)` is
/// supported on the surviving index set `I_n` of its ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbStack {
    pub ordering: Permutation,
    levels: Vec<Vec<f64>>,
}

impl ProbStack {
    /// Normalizes each level; entries must be non-negative with positive sum.
    pub fn new(proj: &Projections, mut levels: Vec<Vec<f64>>) -> Self {
        assert_eq!(levels.len(), proj.dim());
        for (k, level) in levels.iter_mut().enumerate() {
            assert_eq!(
                level.len(),
                proj.indices(k + 1).len(),
                "level {} support size mismatch",
                k + 1
            );
            let sum: f64 = level.iter().sum();
            assert!(
                sum > 0.0 && level.iter().all(|&x| x >= 0.0),
                "level {} is not a non-negative vector with positive mass",
                k + 1
            );
            for x in level.iter_mut() {
                *x /= sum;
            }
        }
        ProbStack {
            ordering: proj.ordering.clone(),
            levels,
        }
    }

    pub fn uniform(proj: &Projections) -> Self {
        let levels = (1..=proj.dim())
            .map(|n| vec![1.0; proj.indices(n).len()])
            .collect();
        ProbStack::new(proj, levels)
    }

    /// All mass of level `n` on `picks[n-1]` (a slot into `I_n`).
    pub fn degenerate(proj: &Projections, picks: &[usize]) -> Self {
        let levels = (1..=proj.dim())
            .map(|n| {
                let mut v = vec![0.0; proj.indices(n).len()];
                v[picks[n - 1]] = 1.0;
                v
            })
            .collect();
        ProbStack::new(proj, levels)
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// Probability vector at level `n` (1-based).
    pub fn level(&self, n: usize) -> &[f64] {
        &self.levels[n - 1]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// Convex combination `(1-beta) self + beta other`, level by level.
    pub fn blend(&self, other: &ProbStack, beta: f64) -> ProbStack {
        assert_eq!(self.ordering, other.ordering);
        let levels = self
            .levels
            .iter()
            .zip(&other.levels)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (1.0 - beta) * x + beta * y)
                    .collect()
            })
            .collect();
        ProbStack {
            ordering: self.ordering.clone(),
            levels,
        }
    }
}

/// The coefficients of a stack, with their pre-division numerators.
///
/// `values[n-1]` is `C_n`; `numerators[n-1]` is `1 - sum_{m>n} C_m chi_n(p_m)`,
/// which has the same sign as `C_n` and stays well behaved near degenerate
/// levels.
#[derive(Debug, Clone)]
pub struct Coefficients {
    pub values: Vec<f64>,
    pub numerators: Vec<f64>,
}

impl Coefficients {
    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn is_feasible(&self) -> bool {
        self.values.iter().all(|&c| c >= -TOL_Q)
    }
}

/// Evaluates the top-down coefficient recursion for a stack.
pub fn coefficients(ifs: &SpongeIfs, proj: &Projections, stack: &ProbStack) -> Coefficients {
    assert_eq!(stack.ordering, proj.ordering);
    coefficients_of_levels(ifs, proj, stack.levels())
}

/// Coefficient recursion on raw level vectors. A level with zero total mass
/// (possible only for empirical types of words whose block at that level is
/// empty) gets `C_n = 0` and contributes nothing to lower levels.
pub fn coefficients_of_levels(
    ifs: &SpongeIfs,
    proj: &Projections,
    levels: &[Vec<f64>],
) -> Coefficients {
    let d = proj.dim();
    assert_eq!(levels.len(), d);
    let mut values = vec![0.0; d];
    let mut numerators = vec![0.0; d];
    for n in (1..=d).rev() {
        let coord = proj.ordering.coord_at(n);
        let p_n = &levels[n - 1];
        let mass: f64 = p_n.iter().sum();
        let mut num = 1.0;
        for m in n + 1..=d {
            num -= values[m - 1] * lyapunov(ifs, &levels[m - 1], proj.indices(m), coord);
        }
        numerators[n - 1] = num;
        if mass == 0.0 {
            values[n - 1] = 0.0;
        } else {
            let chi = lyapunov(ifs, p_n, proj.indices(n), coord);
            values[n - 1] = num / chi;
        }
    }
    Coefficients { values, numerators }
}

/// Membership in the feasible cone `Q`: every coefficient `>= -TOL_Q`.
pub fn in_q(ifs: &SpongeIfs, proj: &Projections, stack: &ProbStack) -> bool {
    coefficients(ifs, proj, stack).is_feasible()
}

/// How the status of an ordering was decided.
#[derive(Debug, Clone, PartialEq)]
pub enum OrderingStatus {
    /// Realized by a sampled word, or a feasible stack was found.
    CertifiedIn,
    /// Excluded exactly: on the plane by the vertex criterion, in higher
    /// dimensions by strict pointwise domination between coordinates.
    CertifiedOut,
    /// No feasible stack found; `best_min_coeff` is the best value of
    /// `min_n C_n` seen by the search.
    HeuristicOut { best_min_coeff: f64 },
}

/// Per-ordering statuses plus, for admissible orderings, a feasible anchor
/// stack used by the constrained optimizers.
#[derive(Debug, Clone)]
pub struct OrderingReport {
    pub statuses: Vec<(Permutation, OrderingStatus)>,
    anchors: Vec<(Permutation, ProbStack)>,
}

impl OrderingReport {
    pub fn admissible(&self) -> Vec<Permutation> {
        self.statuses
            .iter()
            .filter(|(_, s)| matches!(s, OrderingStatus::CertifiedIn))
            .map(|(p, _)| p.clone())
            .collect()
    }

    pub fn status(&self, sigma: &Permutation) -> Option<&OrderingStatus> {
        self.statuses
            .iter()
            .find(|(p, _)| p == sigma)
            .map(|(_, s)| s)
    }

    /// A stack in `Q` for an admissible ordering, found during certification.
    pub fn anchor(&self, sigma: &Permutation) -> Option<&ProbStack> {
        self.anchors
            .iter()
            .find(|(p, _)| p == sigma)
            .map(|(_, s)| s)
    }
}

fn representative_maps(ifs: &SpongeIfs, cap: usize) -> Vec<usize> {
    // One map per distinct contraction profile; profiles drive stoppings.
    let mut seen: std::collections::BTreeMap<Vec<Exact>, usize> = std::collections::BTreeMap::new();
    for i in 0..ifs.len() {
        let profile: Vec<Exact> = (0..ifs.dim()).map(|n| ifs.lambda(i, n)).collect();
        seen.entry(profile).or_insert(i);
    }
    let mut reps: Vec<usize> = seen.into_values().collect();
    reps.sort_unstable();
    reps.truncate(cap);
    reps
}

fn sample_words(ifs: &SpongeIfs) -> Vec<PeriodicWord> {
    let reps = representative_maps(ifs, 12);
    let mut words: Vec<PeriodicWord> = reps.iter().map(|&i| PeriodicWord::constant(i)).collect();
    for (k, &i) in reps.iter().enumerate() {
        for &j in &reps[k + 1..] {
            words.push(PeriodicWord::cycle(vec![i, j]));
            words.push(PeriodicWord::cycle(vec![i, i, j]));
            words.push(PeriodicWord::cycle(vec![i, j, j]));
        }
    }
    words
}

/// True iff `lambda_i^(u) > lambda_i^(v)` for every map `i`.
fn strictly_dominates(ifs: &SpongeIfs, u: usize, v: usize) -> bool {
    (0..ifs.len()).all(|i| ifs.lambda(i, u) > ifs.lambda(i, v))
}

/// Determines the status of every coordinate ordering.
///
/// Certification is layered: scale orderings of sampled words are realized,
/// hence admissible; a strictly dominated coordinate can never precede its
/// dominating coordinate, which excludes orderings exactly; on the plane
/// admissibility reduces to a per-map ratio comparison. Whatever remains in
/// dimension three and higher is settled by a seeded multi-start search for a
/// feasible stack, and reported as heuristic when the search fails.
pub fn admissible_orderings(ifs: &SpongeIfs, seed: u64) -> OrderingReport {
    let d = ifs.dim();
    let mut statuses: Vec<(Permutation, Option<OrderingStatus>)> = Permutation::all(d)
        .into_iter()
        .map(|p| (p, None))
        .collect();

    if d == 1 {
        let sigma = Permutation::identity(1);
        let proj = Projections::build(ifs, &sigma);
        let anchor = ProbStack::uniform(&proj);
        return OrderingReport {
            statuses: vec![(sigma.clone(), OrderingStatus::CertifiedIn)],
            anchors: vec![(sigma, anchor)],
        };
    }

    // Realizability sampling; exact stopping arithmetic makes this sound.
    let mut realized: std::collections::BTreeSet<Permutation> = Default::default();
    for word in sample_words(ifs) {
        for k in 1..=48u32 {
            realized.insert(scale_ordering(ifs, &word, &Exact::pow2_neg(k)));
        }
    }
    for (sigma, status) in statuses.iter_mut() {
        if realized.contains(sigma) {
            *status = Some(OrderingStatus::CertifiedIn);
        }
    }

    // Exact exclusion by strict pointwise domination: if u contracts strictly
    // slower than v on every map, no realized ordering puts u after v, and
    // the coefficient cone of such an ordering is empty.
    let dominates: Vec<Vec<bool>> = (0..d)
        .map(|u| (0..d).map(|v| u != v && strictly_dominates(ifs, u, v)).collect())
        .collect();
    for (sigma, status) in statuses.iter_mut() {
        if status.is_some() {
            continue;
        }
        let coords = sigma.coords();
        let out = (0..d).any(|earlier| {
            (earlier + 1..d).any(|later| dominates[coords[later]][coords[earlier]])
        });
        if out {
            *status = Some(OrderingStatus::CertifiedOut);
        }
    }

    if d == 2 {
        // Exact planar criterion: the cone is non-empty iff some map
        // contracts no faster in the leading coordinate.
        for (sigma, status) in statuses.iter_mut() {
            if status.is_some() {
                continue;
            }
            let (c1, c2) = (sigma.coord_at(1), sigma.coord_at(2));
            let feasible = (0..ifs.len()).any(|i| ifs.lambda(i, c1) >= ifs.lambda(i, c2));
            *status = Some(if feasible {
                OrderingStatus::CertifiedIn
            } else {
                OrderingStatus::CertifiedOut
            });
        }
    }

    // Remaining orderings: search for a feasible stack.
    for (sigma, status) in statuses.iter_mut() {
        if status.is_some() {
            continue;
        }
        let proj = Projections::build(ifs, sigma);
        let (best, _) = optimize::maximize_min_coefficient(
            ifs,
            &proj,
            &OptimizeConfig::feasibility(seed),
        );
        *status = Some(if best >= -TOL_Q {
            OrderingStatus::CertifiedIn
        } else {
            OrderingStatus::HeuristicOut { best_min_coeff: best }
        });
    }

    // Anchors: a comfortably feasible stack per admissible ordering.
    let mut anchors = Vec::new();
    for (sigma, status) in &statuses {
        if !matches!(status, Some(OrderingStatus::CertifiedIn)) {
            continue;
        }
        let proj = Projections::build(ifs, sigma);
        let uniform = ProbStack::uniform(&proj);
        let anchor = if in_q(ifs, &proj, &uniform) {
            uniform
        } else {
            let (_, stack) = optimize::maximize_min_coefficient(
                ifs,
                &proj,
                &OptimizeConfig::feasibility(seed),
            );
            stack
        };
        anchors.push((sigma.clone(), anchor));
    }

    OrderingReport {
        statuses: statuses
            .into_iter()
            .map(|(p, s)| (p, s.expect("status decided")))
            .collect(),
        anchors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn carpet_proj(sigma: Vec<usize>) -> (SpongeIfs, Projections) {
        let ifs = fixtures::baranski_planar();
        let sigma = Permutation::new(sigma);
        let proj = Projections::build(&ifs, &sigma);
        (ifs, proj)
    }

    #[test]
    fn stopping_counts_halvings() {
        let maps = vec![
            crate::ifs::DiagonalMap::from_ratios(&[(1, 2)], &[(0, 1)]),
            crate::ifs::DiagonalMap::from_ratios(&[(1, 2)], &[(1, 2)]),
        ];
        let ifs = SpongeIfs::new(1, maps).unwrap();
        let w = PeriodicWord::constant(0);
        // (1/2)^3 = 1/8 stops exactly at 3.
        assert_eq!(stopping(&ifs, &w, &Exact::ratio(1, 8), 0), 3);
        assert_eq!(stopping(&ifs, &w, &Exact::ratio(1, 7), 0), 3);
        assert_eq!(stopping(&ifs, &w, &Exact::ratio(1, 9), 0), 4);
    }

    #[test]
    fn stopping_is_coordinate_free_for_self_similar_maps() {
        let ifs = fixtures::self_similar();
        for word in [
            PeriodicWord::constant(0),
            PeriodicWord::cycle(vec![0, 1]),
            PeriodicWord::new(vec![1, 1], vec![0]),
        ] {
            for k in 1..=20 {
                let delta = Exact::pow2_neg(k);
                assert_eq!(
                    stopping(&ifs, &word, &delta, 0),
                    stopping(&ifs, &word, &delta, 1)
                );
            }
        }
    }

    #[test]
    fn stopping_on_carpet_word() {
        let ifs = fixtures::baranski_planar();
        let w = PeriodicWord::constant(0);
        let delta = Exact::pow2_neg(6);
        assert_eq!(stopping(&ifs, &w, &delta, 0), 6);
        assert_eq!(stopping(&ifs, &w, &delta, 1), 3);
    }

    #[test]
    fn scale_ordering_of_self_similar_words_is_identity() {
        let ifs = fixtures::self_similar();
        for word in [PeriodicWord::constant(1), PeriodicWord::cycle(vec![0, 1])] {
            for k in 1..=16 {
                assert_eq!(
                    scale_ordering(&ifs, &word, &Exact::pow2_neg(k)),
                    Permutation::identity(2)
                );
            }
        }
    }

    #[test]
    fn scale_ordering_puts_slow_coordinate_first() {
        let ifs = fixtures::baranski_planar();
        let w = PeriodicWord::constant(0);
        assert_eq!(
            scale_ordering(&ifs, &w, &Exact::pow2_neg(6)),
            Permutation::new(vec![0, 1])
        );
        let w2 = PeriodicWord::constant(1);
        assert_eq!(
            scale_ordering(&ifs, &w2, &Exact::pow2_neg(6)),
            Permutation::new(vec![1, 0])
        );
    }

    #[test]
    fn lyapunov_examples() {
        let (ifs, proj) = carpet_proj(vec![0, 1]);
        // Degenerate vector on map 1: -log lambda_1^(x) = log 2.
        assert!((lyapunov(&ifs, &[1.0, 0.0], proj.indices(1), 0) - 2f64.ln()).abs() < 1e-15);
        // (r, 1-r) in coordinate x: (2 - r) log 2.
        let r = 0.3;
        let chi = lyapunov(&ifs, &[r, 1.0 - r], proj.indices(1), 0);
        assert!((chi - (2.0 - r) * 2f64.ln()).abs() < 1e-14);
        // Mean of -log lambda over {1/2, 1/8}: 2 log 2.
        let maps = vec![
            crate::ifs::DiagonalMap::from_ratios(&[(1, 2)], &[(0, 1)]),
            crate::ifs::DiagonalMap::from_ratios(&[(1, 8)], &[(7, 8)]),
        ];
        let ifs1 = SpongeIfs::new(1, maps).unwrap();
        let chi = lyapunov(&ifs1, &[0.5, 0.5], &[0, 1], 0);
        assert!((chi - 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn carpet_coefficient_formula() {
        let (ifs, proj) = carpet_proj(vec![0, 1]);
        for r in [0.2, 0.5, 0.6, 0.9] {
            let stack = ProbStack::new(&proj, vec![vec![r, 1.0 - r], vec![r, 1.0 - r]]);
            let c = coefficients(&ifs, &proj, &stack);
            let expected = (1.0 / (2.0 - r) - 1.0 / (1.0 + r)) / 2f64.ln();
            assert!((c.values[0] - expected).abs() < 1e-13, "r={r}");
            assert!((c.values[1] - 1.0 / ((1.0 + r) * 2f64.ln())).abs() < 1e-13);
        }
        // Boundary at r = 1/2.
        let stack = ProbStack::new(&proj, vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        let c = coefficients(&ifs, &proj, &stack);
        assert!(c.values[0].abs() < 1e-15);
    }

    #[test]
    fn self_similar_coefficients_vanish_below_top() {
        let ifs = fixtures::self_similar();
        let proj = Projections::build(&ifs, &Permutation::identity(2));
        for p in [[0.5, 0.5], [0.9, 0.1]] {
            let stack = ProbStack::new(&proj, vec![p.to_vec(), p.to_vec()]);
            let c = coefficients(&ifs, &proj, &stack);
            assert!(c.values[0].abs() < 1e-15);
            assert!(c.values[1] > 0.0);
        }
    }

    #[test]
    fn q_membership_on_the_carpet() {
        let (ifs, proj) = carpet_proj(vec![0, 1]);
        let inside = ProbStack::new(&proj, vec![vec![0.6, 0.4], vec![0.6, 0.4]]);
        assert!(in_q(&ifs, &proj, &inside));
        let outside = ProbStack::new(&proj, vec![vec![0.4, 0.6], vec![0.4, 0.6]]);
        assert!(!in_q(&ifs, &proj, &outside));
    }

    #[test]
    fn one_dimensional_stacks_are_always_feasible() {
        let maps = vec![
            crate::ifs::DiagonalMap::from_ratios(&[(1, 3)], &[(0, 1)]),
            crate::ifs::DiagonalMap::from_ratios(&[(1, 4)], &[(3, 4)]),
        ];
        let ifs = SpongeIfs::new(1, maps).unwrap();
        let proj = Projections::build(&ifs, &Permutation::identity(1));
        let stack = ProbStack::new(&proj, vec![vec![0.2, 0.8]]);
        assert!(in_q(&ifs, &proj, &stack));
    }

    #[test]
    fn carpet_admits_both_orderings() {
        let ifs = fixtures::baranski_planar();
        let report = admissible_orderings(&ifs, 0);
        let adm = report.admissible();
        assert_eq!(adm.len(), 2);
        for (_, status) in &report.statuses {
            assert_eq!(*status, OrderingStatus::CertifiedIn);
        }
    }

    #[test]
    fn fraser_jurga_admits_exactly_two_orderings() {
        let ifs = fixtures::fraser_jurga(4, (45, 100), (40, 100), (35, 100));
        let report = admissible_orderings(&ifs, 0);
        let adm = report.admissible();
        assert_eq!(
            adm,
            vec![
                Permutation::new(vec![0, 1, 2]),
                Permutation::new(vec![1, 0, 2])
            ]
        );
        // The other four are excluded exactly, not heuristically.
        for (sigma, status) in &report.statuses {
            if !adm.contains(sigma) {
                assert_eq!(*status, OrderingStatus::CertifiedOut, "{sigma}");
            }
        }
    }

    #[test]
    fn lalley_gatzouras_has_a_single_ordering() {
        let ifs = fixtures::lalley_gatzouras();
        let report = admissible_orderings(&ifs, 0);
        assert_eq!(report.admissible(), vec![Permutation::new(vec![0, 1])]);
    }

    #[test]
    fn sampled_orderings_are_certified() {
        let ifs = fixtures::baranski_planar();
        let report = admissible_orderings(&ifs, 0);
        for word in [PeriodicWord::constant(0), PeriodicWord::cycle(vec![0, 1])] {
            for k in 2..=20 {
                let sigma = scale_ordering(&ifs, &word, &Exact::pow2_neg(k));
                assert_eq!(
                    report.status(&sigma),
                    Some(&OrderingStatus::CertifiedIn)
                );
            }
        }
    }

    #[test]
    fn coefficients_see_levels_only_through_lyapunov_exponents() {
        // Maps 0..3 share their contraction profile, so moving mass between
        // them fixes every Lyapunov exponent and therefore every coefficient.
        let ifs = fixtures::fraser_jurga(4, (45, 100), (40, 100), (35, 100));
        let sigma = Permutation::new(vec![0, 1, 2]);
        let proj = Projections::build(&ifs, &sigma);
        let base = ProbStack::new(
            &proj,
            vec![
                vec![0.7, 0.3],
                vec![0.55, 0.45],
                vec![0.4, 0.1, 0.2, 0.05, 0.25],
            ],
        );
        let moved = ProbStack::new(
            &proj,
            vec![
                vec![0.7, 0.3],
                vec![0.55, 0.45],
                vec![0.05, 0.2, 0.1, 0.4, 0.25],
            ],
        );
        let ca = coefficients(&ifs, &proj, &base);
        let cb = coefficients(&ifs, &proj, &moved);
        for (a, b) in ca.values.iter().zip(&cb.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
