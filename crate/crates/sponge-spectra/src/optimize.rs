//! Constrained extremization over stacks of probability vectors.
//!
//! Stacks are parametrized by softmax logits (one pinned logit per level), so
//! searches run unconstrained in Euclidean space. Feasibility with respect to
//! the coefficient cone is enforced by an exact penalty on the coefficient
//! numerators, followed by a quadratic polish on the active boundary: when an
//! extremum sits on `{C_n = 0}` the incumbent is re-optimized with the active
//! numerators pinned to zero. Multi-start seeds are fixed, and results are
//! reduced in start order, so outcomes do not depend on thread scheduling.

use crate::ifs::SpongeIfs;
use crate::orderings::{coefficients, ProbStack, TOL_Q};
use crate::projection::Projections;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct OptimizeConfig {
    pub seed: u64,
    pub starts: usize,
    pub nm_iters: usize,
}

impl OptimizeConfig {
    pub fn feasibility(seed: u64) -> Self {
        OptimizeConfig {
            seed,
            starts: 32,
            nm_iters: 400,
        }
    }

    pub fn extremize(seed: u64) -> Self {
        OptimizeConfig {
            seed,
            starts: 32,
            nm_iters: 600,
        }
    }
}

/// Softmax chart for a product of simplices; each level of size `k`
/// contributes `k - 1` free logits, the last logit is pinned to 0.
struct SimplexChart {
    sizes: Vec<usize>,
}

impl SimplexChart {
    fn new(proj: &Projections) -> Self {
        SimplexChart {
            sizes: (1..=proj.dim()).map(|n| proj.indices(n).len()).collect(),
        }
    }

    fn dim(&self) -> usize {
        self.sizes.iter().map(|s| s - 1).sum()
    }

    fn unpack(&self, x: &[f64], proj: &Projections) -> ProbStack {
        let mut levels = Vec::with_capacity(self.sizes.len());
        let mut off = 0;
        for &size in &self.sizes {
            let logits = &x[off..off + size - 1];
            off += size - 1;
            let max = logits.iter().cloned().fold(0.0f64, f64::max);
            let mut level: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
            level.push((-max).exp());
            levels.push(level);
        }
        ProbStack::new(proj, levels)
    }

    fn pack(&self, stack: &ProbStack) -> Vec<f64> {
        let floor = 1e-12;
        let mut x = Vec::with_capacity(self.dim());
        for (k, &size) in self.sizes.iter().enumerate() {
            let level = stack.level(k + 1);
            let last = level[size - 1].max(floor).ln();
            for &p in &level[..size - 1] {
                x.push(p.max(floor).ln() - last);
            }
        }
        x
    }
}

/// Nelder-Mead ascent. Returns the best point and its value.
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    if n == 0 {
        return (Vec::new(), f(x0));
    }
    let g = |x: &[f64]| -f(x); // minimize g
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| g(p)).collect();

    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];
        if (values[worst] - values[best]).abs() <= 1e-13 * (1.0 + values[best].abs()) {
            break;
        }
        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&simplex[i]) {
                *c += v / n as f64;
            }
        }
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[worst])
            .map(|(c, w)| c + (c - w))
            .collect();
        let fr = g(&reflect);
        if fr < values[best] {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&reflect)
                .map(|(c, r)| c + 2.0 * (r - c))
                .collect();
            let fe = g(&expand);
            if fe < fr {
                simplex[worst] = expand;
                values[worst] = fe;
            } else {
                simplex[worst] = reflect;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflect;
            values[worst] = fr;
        } else {
            let contract: Vec<f64> = if fr < values[worst] {
                centroid
                    .iter()
                    .zip(&reflect)
                    .map(|(c, r)| c + 0.5 * (r - c))
                    .collect()
            } else {
                centroid
                    .iter()
                    .zip(&simplex[worst])
                    .map(|(c, w)| c + 0.5 * (w - c))
                    .collect()
            };
            let fc = g(&contract);
            if fc < values[worst].min(fr) {
                simplex[worst] = contract;
                values[worst] = fc;
            } else {
                let best_point = simplex[best].clone();
                for (i, p) in simplex.iter_mut().enumerate() {
                    if i == best {
                        continue;
                    }
                    for (x, b) in p.iter_mut().zip(&best_point) {
                        *x = b + 0.5 * (*x - b);
                    }
                    values[i] = g(p);
                }
            }
        }
    }
    let (mut bi, mut bv) = (0, values[0]);
    for (i, &v) in values.iter().enumerate() {
        if v < bv {
            bi = i;
            bv = v;
        }
    }
    (simplex[bi].clone(), -bv)
}

fn random_starts(chart: &SimplexChart, cfg: &OptimizeConfig, fixed: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut starts = fixed;
    let dim = chart.dim();
    let normal = Normal::new(0.0, 2.0).unwrap();
    let mut idx = 0u64;
    while starts.len() < cfg.starts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(idx));
        starts.push((0..dim).map(|_| normal.sample(&mut rng)).collect());
        idx += 1;
    }
    starts
}

/// Runs the multi-start ascent of `score` and returns the best point in
/// start order (ties resolved towards the earlier start).
fn multistart(
    score: &(dyn Fn(&[f64]) -> f64 + Sync),
    starts: Vec<Vec<f64>>,
    nm_iters: usize,
) -> (Vec<f64>, f64) {
    let results: Vec<(Vec<f64>, f64)> = starts
        .par_iter()
        .map(|x0| nelder_mead(&score, x0, 0.7, nm_iters))
        .collect();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (x, v) in results {
        let better = match &best {
            None => true,
            Some((_, bv)) => v > *bv,
        };
        if better {
            best = Some((x, v));
        }
    }
    best.expect("at least one start")
}

/// Maximizes `min_n C_n` over stacks; used for feasibility certification.
pub fn maximize_min_coefficient(
    ifs: &SpongeIfs,
    proj: &Projections,
    cfg: &OptimizeConfig,
) -> (f64, ProbStack) {
    let chart = SimplexChart::new(proj);
    let score = |x: &[f64]| {
        let stack = chart.unpack(x, proj);
        coefficients(ifs, proj, &stack).min()
    };
    let fixed = vec![vec![0.0; chart.dim()]];
    let (x, v) = multistart(&score, random_starts(&chart, cfg, fixed), cfg.nm_iters);
    (v, chart.unpack(&x, proj))
}

/// Result of a constrained extremization over the feasible cone.
#[derive(Debug, Clone)]
pub struct QExtremum {
    pub value: f64,
    pub argopt: ProbStack,
}

/// Maximizes `objective` over the feasible cone of `proj`'s ordering.
///
/// `anchor` must be feasible; it serves as the fallback blend target. `hint`
/// is an optional unconstrained extremizer worth starting from (blended
/// towards the anchor until feasible).
pub fn maximize_over_q(
    ifs: &SpongeIfs,
    proj: &Projections,
    objective: &(dyn Fn(&ProbStack) -> f64 + Sync),
    anchor: &ProbStack,
    hints: &[&ProbStack],
    cfg: &OptimizeConfig,
) -> QExtremum {
    let chart = SimplexChart::new(proj);
    let d = proj.dim();
    let scale = objective(anchor).abs().max(1.0);
    let w = 1e4 * scale;

    let feasible_blend = |stack: &ProbStack| -> ProbStack {
        for beta in [
            0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0,
        ] {
            let cand = stack.blend(anchor, beta);
            if coefficients(ifs, proj, &cand).is_feasible() {
                return cand;
            }
        }
        anchor.clone()
    };

    let mut fixed = vec![chart.pack(anchor), vec![0.0; chart.dim()]];
    for hint in hints {
        fixed.push(chart.pack(&feasible_blend(hint)));
        fixed.push(chart.pack(hint));
    }

    let penalized = |x: &[f64]| {
        let stack = chart.unpack(x, proj);
        let coeff = coefficients(ifs, proj, &stack);
        let violation: f64 = coeff.numerators.iter().map(|&n| (-n).max(0.0)).sum();
        objective(&stack) - w * violation
    };
    let (mut best_x, _) = multistart(&penalized, random_starts(&chart, cfg, fixed), cfg.nm_iters);

    // Polish on the active boundary: pin near-zero numerators to zero.
    let coeff = coefficients(ifs, proj, &chart.unpack(&best_x, proj));
    let active: Vec<usize> = (0..d - 1)
        .filter(|&k| coeff.numerators[k] <= 1e-6)
        .collect();
    if !active.is_empty() {
        let rho = 1e8 * scale;
        let polish_score = |x: &[f64]| {
            let stack = chart.unpack(x, proj);
            let coeff = coefficients(ifs, proj, &stack);
            let mut s = objective(&stack);
            for (k, &n) in coeff.numerators.iter().enumerate() {
                if active.contains(&k) {
                    s -= rho * n * n;
                } else {
                    s -= w * (-n).max(0.0);
                }
            }
            s
        };
        let mut starts = vec![best_x.clone()];
        let normal = Normal::new(0.0, 0.3).unwrap();
        for j in 0..3u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1000 + j));
            starts.push(
                best_x
                    .iter()
                    .map(|&v| v + normal.sample(&mut rng))
                    .collect(),
            );
        }
        let (polished_x, _) = multistart(&polish_score, starts, cfg.nm_iters);
        let old = feasible_blend(&chart.unpack(&best_x, proj));
        let new = feasible_blend(&chart.unpack(&polished_x, proj));
        if objective(&new) > objective(&old) {
            best_x = chart.pack(&new);
        }
    }

    let argopt = feasible_blend(&chart.unpack(&best_x, proj));
    QExtremum {
        value: objective(&argopt),
        argopt,
    }
}

/// Minimizes `objective` over the feasible cone (negated maximization).
pub fn minimize_over_q(
    ifs: &SpongeIfs,
    proj: &Projections,
    objective: &(dyn Fn(&ProbStack) -> f64 + Sync),
    anchor: &ProbStack,
    hints: &[&ProbStack],
    cfg: &OptimizeConfig,
) -> QExtremum {
    let negated = |s: &ProbStack| -objective(s);
    let res = maximize_over_q(ifs, proj, &negated, anchor, hints, cfg);
    QExtremum {
        value: -res.value,
        argopt: res.argopt,
    }
}

/// Sanity guard used by callers returning feasible optima.
pub fn assert_feasible(ifs: &SpongeIfs, proj: &Projections, stack: &ProbStack) {
    debug_assert!(
        coefficients(ifs, proj, stack).values.iter().all(|&c| c >= -10.0 * TOL_Q),
        "optimizer returned an infeasible stack"
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::orderings::{in_q, ProbStack};
    use crate::projection::Permutation;

    #[test]
    fn feasibility_search_finds_the_carpet_cone() {
        let ifs = fixtures::baranski_planar();
        let proj = Projections::build(&ifs, &Permutation::new(vec![0, 1]));
        let (best, stack) = maximize_min_coefficient(&ifs, &proj, &OptimizeConfig::feasibility(0));
        assert!(best > 0.0, "interior stacks exist, got {best}");
        assert!(in_q(&ifs, &proj, &stack));
    }

    #[test]
    fn constrained_max_of_entropy_like_objective() {
        // Maximize sum of level entropies over Q for the sigma = (x, y)
        // ordering of the carpet; the unconstrained optimum (uniform levels)
        // is feasible there, so it should be found.
        let ifs = fixtures::baranski_planar();
        let proj = Projections::build(&ifs, &Permutation::new(vec![0, 1]));
        let anchor = ProbStack::new(&proj, vec![vec![0.6, 0.4], vec![0.6, 0.4]]);
        let objective = |s: &ProbStack| -> f64 {
            (1..=2)
                .map(|n| {
                    s.level(n)
                        .iter()
                        .filter(|&&p| p > 0.0)
                        .map(|&p| -p * p.ln())
                        .sum::<f64>()
                })
                .sum()
        };
        let res = maximize_over_q(
            &ifs,
            &proj,
            &objective,
            &anchor,
            &[],
            &OptimizeConfig::extremize(0),
        );
        assert!((res.value - 2.0 * 2f64.ln()).abs() < 1e-6, "{}", res.value);
        assert!(in_q(&ifs, &proj, &res.argopt));
    }

    #[test]
    fn boundary_constrained_max_lands_on_the_boundary() {
        // For the omega = (y, x) ordering the same objective is capped by the
        // boundary C_1 = 0, i.e. level-2 vector (1/2, 1/2).
        let ifs = fixtures::baranski_planar();
        let proj = Projections::build(&ifs, &Permutation::new(vec![1, 0]));
        let anchor = ProbStack::new(&proj, vec![vec![0.4, 0.6], vec![0.5, 0.5]]);
        // Push towards a level-2 vector with mass 0.9 on map 1 (infeasible).
        let hint = ProbStack::new(&proj, vec![vec![0.9, 0.1], vec![0.5, 0.5]]);
        let objective = |s: &ProbStack| -> f64 {
            // Entropy of level 2 plus a pull towards map 1.
            let p = s.level(2);
            let h: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum();
            h + 0.5 * p[0]
        };
        let res = maximize_over_q(
            &ifs,
            &proj,
            &objective,
            &anchor,
            &[&hint],
            &OptimizeConfig::extremize(0),
        );
        // Feasibility demands p_2(map1) <= 1/2 for omega; optimum at exactly 1/2.
        assert!(in_q(&ifs, &proj, &res.argopt));
        assert!((res.argopt.level(2)[0] - 0.5).abs() < 1e-5, "{:?}", res.argopt);
    }
}
