//! The pressure machinery: closed-form exponents and dominant stacks, the
//! variational pressure over the feasible cone, the `L^q` spectrum, the box
//! dimension of the attractor, and the Frostman/box dimensions of a
//! self-affine measure.
//!
//! For one ordering the closed form solves, level by level, the strictly
//! decreasing equations
//! `sum_{i in I_n} e^{phi_n(i)} prod_{l<=n} lambda_i^(sigma_l)^(T_l - T_{l-1}) = 1`,
//! whose bracketed terms at the root form the dominant stack `P*`. When `P*`
//! lies in the feasible cone the pressure of that ordering equals `T_d`;
//! otherwise the supremum is taken over the cone by constrained search, and
//! `T_d` remains an upper bound. The pressure of the system is the maximum
//! over admissible orderings.

use crate::numerics::{log_sum_exp, solve_decreasing};
use crate::optimize::{self, OptimizeConfig};
use crate::orderings::{coefficients, ProbStack};
use crate::potentials::{MeasureTable, PotentialFamily, WeightedMeasure};
use crate::projection::Permutation;
use crate::system::System;
use rayon::prelude::*;

/// Shannon entropy with the `0 log 0 = 0` convention.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum()
}

/// Closed-form exponents for one ordering, with the dominant stack.
#[derive(Debug, Clone)]
pub struct ClosedFormResult {
    pub ordering: Permutation,
    /// `exponents[n-1]` is `T_n`.
    pub exponents: Vec<f64>,
    pub dominant: ProbStack,
    /// Whether the dominant stack lies in the feasible cone.
    pub in_q_flag: bool,
    /// Largest residual `|sum - 1|` over the solved level equations.
    pub residual: f64,
}

/// Solves the level equations sequentially by bracketed bisection with
/// Newton polish on the log of the strictly decreasing level sum.
pub fn solve_closed_form(
    sys: &System,
    sigma: &Permutation,
    phi: &PotentialFamily,
) -> ClosedFormResult {
    let ifs = sys.ifs();
    let proj = sys.projections(sigma);
    let d = sys.dim();
    let mut exponents = vec![0.0; d];
    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut residual = 0.0f64;
    for n in 1..=d {
        let indices = proj.indices(n);
        let phi_n = phi.level(sigma, n).expect("admissible ordering");
        assert!(
            phi_n.iter().all(|v| v.is_finite()),
            "potential values must be finite"
        );
        let coord = sigma.coord_at(n);
        let t_prev = if n == 1 { 0.0 } else { exponents[n - 2] };
        // Base exponent of each term, excluding the level-n factor.
        let base: Vec<f64> = indices
            .iter()
            .enumerate()
            .map(|(slot, &i)| {
                let mut b = phi_n[slot];
                for l in 1..n {
                    let t_l = exponents[l - 1];
                    let t_lm1 = if l == 1 { 0.0 } else { exponents[l - 2] };
                    b += (t_l - t_lm1) * ifs.log_lambda(i, sigma.coord_at(l));
                }
                b
            })
            .collect();
        let log_lam: Vec<f64> = indices.iter().map(|&i| ifs.log_lambda(i, coord)).collect();
        let terms = |t: f64| -> Vec<f64> {
            base.iter()
                .zip(&log_lam)
                .map(|(b, ll)| b + (t - t_prev) * ll)
                .collect()
        };
        let f = |t: f64| log_sum_exp(&terms(t));
        let df = |t: f64| {
            let ts = terms(t);
            let total = log_sum_exp(&ts);
            ts.iter()
                .zip(&log_lam)
                .map(|(x, ll)| (x - total).exp() * ll)
                .sum()
        };
        let root = solve_decreasing(f, df, t_prev, 1e-14);
        residual = residual.max((f(root).exp() - 1.0).abs());
        exponents[n - 1] = root;
        let weights: Vec<f64> = terms(root).iter().map(|x| x.exp()).collect();
        levels.push(weights);
    }
    let dominant = ProbStack::new(proj, levels);
    let in_q_flag = coefficients(ifs, proj, &dominant).is_feasible();
    ClosedFormResult {
        ordering: sigma.clone(),
        exponents,
        dominant,
        in_q_flag,
        residual,
    }
}

/// The variational objective of a stack:
/// `sum_n C_n (H(p_n) + integral of phi_n against p_n)`.
pub fn t_value(sys: &System, sigma: &Permutation, stack: &ProbStack, phi: &PotentialFamily) -> f64 {
    let proj = sys.projections(sigma);
    let coeff = coefficients(sys.ifs(), proj, stack);
    (1..=sys.dim())
        .map(|n| {
            let p = stack.level(n);
            coeff.values[n - 1] * (entropy(p) + phi.integral(sigma, n, p))
        })
        .sum()
}

/// The measure-dimension objective of a stack:
/// `-sum_n C_n integral of log mu_n against p_n`.
pub fn s_value(
    sys: &System,
    sigma: &Permutation,
    stack: &ProbStack,
    table: &MeasureTable,
) -> f64 {
    let proj = sys.projections(sigma);
    let coeff = coefficients(sys.ifs(), proj, stack);
    -(1..=sys.dim())
        .map(|n| {
            let p = stack.level(n);
            let logs = table.log_mu(sigma, n);
            coeff.values[n - 1] * p.iter().zip(logs).map(|(a, b)| a * b).sum::<f64>()
        })
        .sum::<f64>()
}

/// The supremum of the variational objective over one ordering's cone.
#[derive(Debug, Clone)]
pub struct OrderingOptimum {
    pub ordering: Permutation,
    pub value: f64,
    pub argmax: ProbStack,
    /// True when the dominant stack is feasible, so `value` equals the
    /// closed-form exponent exactly.
    pub certified: bool,
    /// The closed-form exponent `T_d`, an upper bound for `value`.
    pub closed_exponent: f64,
}

pub fn sup_over_q(sys: &System, sigma: &Permutation, phi: &PotentialFamily) -> OrderingOptimum {
    assert!(
        sys.admissible().contains(sigma),
        "ordering {sigma} is not admissible"
    );
    let closed = solve_closed_form(sys, sigma, phi);
    let t_d = closed.exponents[sys.dim() - 1];
    if closed.in_q_flag {
        return OrderingOptimum {
            ordering: sigma.clone(),
            value: t_d,
            argmax: closed.dominant,
            certified: true,
            closed_exponent: t_d,
        };
    }
    let proj = sys.projections(sigma);
    let anchor = sys.anchor(sigma);
    let objective = |stack: &ProbStack| t_value(sys, sigma, stack, phi);
    let res = optimize::maximize_over_q(
        sys.ifs(),
        proj,
        &objective,
        &anchor,
        &[&closed.dominant],
        &OptimizeConfig::extremize(sys.seed()),
    );
    optimize::assert_feasible(sys.ifs(), proj, &res.argopt);
    OrderingOptimum {
        ordering: sigma.clone(),
        value: res.value.min(t_d),
        argmax: res.argopt,
        certified: false,
        closed_exponent: t_d,
    }
}

/// The pressure of a potential family: the maximum over admissible orderings
/// of the constrained suprema.
#[derive(Debug, Clone)]
pub struct PressureResult {
    pub value: f64,
    pub argmax_ordering: Permutation,
    pub per_ordering: Vec<OrderingOptimum>,
    /// `max over orderings of T_d`, an upper bound for `value`.
    pub upper_bound: f64,
}

impl PressureResult {
    /// True when the maximizing ordering took the certified path.
    pub fn certified(&self) -> bool {
        self.per_ordering
            .iter()
            .find(|o| o.ordering == self.argmax_ordering)
            .map(|o| o.certified)
            .unwrap_or(false)
    }
}

pub fn variational_pressure(sys: &System, phi: &PotentialFamily) -> PressureResult {
    let per_ordering: Vec<OrderingOptimum> = sys
        .admissible()
        .iter()
        .map(|sigma| sup_over_q(sys, sigma, phi))
        .collect();
    assert!(!per_ordering.is_empty(), "no admissible orderings");
    let mut best = 0usize;
    for (k, o) in per_ordering.iter().enumerate() {
        if o.value > per_ordering[best].value {
            best = k;
        }
    }
    let upper_bound = per_ordering
        .iter()
        .map(|o| o.closed_exponent)
        .fold(f64::NEG_INFINITY, f64::max);
    PressureResult {
        value: per_ordering[best].value,
        argmax_ordering: per_ordering[best].ordering.clone(),
        per_ordering,
        upper_bound,
    }
}

/// One evaluated point of the `L^q` spectrum.
#[derive(Debug, Clone)]
pub struct SpectrumRow {
    pub q: f64,
    pub value: f64,
    pub argmax_ordering: Permutation,
    pub certified: bool,
    /// `max_sigma T_d(q) - value >= 0`.
    pub gap_to_upper_bound: f64,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub rows: Vec<SpectrumRow>,
    /// Set when the separation check failed: values are then the symbolic
    /// spectrum only.
    pub symbolic_only: bool,
}

/// Evaluates the spectrum on a grid of `q` values (grid points in parallel,
/// results in grid order).
pub fn lq_spectrum(sys: &System, mu: &WeightedMeasure, q_grid: &[f64]) -> SpectrumResult {
    assert_eq!(mu.len(), sys.ifs().len(), "measure length mismatch");
    let rows: Vec<SpectrumRow> = q_grid
        .par_iter()
        .map(|&q| {
            let phi = PotentialFamily::lq(sys, mu, q);
            let pressure = variational_pressure(sys, &phi);
            SpectrumRow {
                q,
                value: pressure.value,
                argmax_ordering: pressure.argmax_ordering.clone(),
                certified: pressure.certified(),
                gap_to_upper_bound: pressure.upper_bound - pressure.value,
            }
        })
        .collect();
    SpectrumResult {
        rows,
        symbolic_only: !sys.sppc().satisfied,
    }
}

/// Box dimension of the attractor: the pressure of the zero family.
#[derive(Debug, Clone)]
pub struct BoxDimensionResult {
    pub value: f64,
    pub certified: bool,
    pub symbolic_only: bool,
}

pub fn box_dimension(sys: &System) -> BoxDimensionResult {
    let pressure = variational_pressure(sys, &PotentialFamily::zero(sys));
    BoxDimensionResult {
        value: pressure.value,
        certified: pressure.certified(),
        symbolic_only: !sys.sppc().satisfied,
    }
}

/// `max over orderings of the zero-potential closed exponent`; cheap upper
/// bound for box-counting growth, used for enumeration budgeting.
pub fn box_counting_upper_exponent(sys: &System) -> f64 {
    let zero = PotentialFamily::zero(sys);
    sys.admissible()
        .iter()
        .map(|sigma| {
            let closed = solve_closed_form(sys, sigma, &zero);
            closed.exponents[sys.dim() - 1]
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The closed two-sided dimension bounds for one ordering: greedy recursions
/// over the projected measure, with all extremizer ties reported.
#[derive(Debug, Clone)]
pub struct ClosedBounds {
    pub ordering: Permutation,
    /// `upper[n-1]` is the level-`n` upper sum (box side).
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    /// Map indices attaining each level's maximum (ties included).
    pub upper_argmax: Vec<Vec<usize>>,
    pub lower_argmin: Vec<Vec<usize>>,
}

pub fn closed_dimension_bounds(
    sys: &System,
    mu: &WeightedMeasure,
    sigma: &Permutation,
) -> ClosedBounds {
    let ifs = sys.ifs();
    let proj = sys.projections(sigma);
    let table = MeasureTable::build(sys, mu);
    let d = sys.dim();
    let mut upper = vec![0.0; d];
    let mut lower = vec![0.0; d];
    let mut upper_argmax = Vec::with_capacity(d);
    let mut lower_argmin = Vec::with_capacity(d);
    for n in 1..=d {
        let coord = sigma.coord_at(n);
        let log_mu = table.log_mu(sigma, n);
        let score = |series: &[f64], slot: usize, i: usize| -> f64 {
            let mut v = log_mu[slot];
            for m in 1..n {
                let prev = if m == 1 { 0.0 } else { series[m - 2] };
                v += (prev - series[m - 1]) * ifs.log_lambda(i, sigma.coord_at(m));
            }
            v / ifs.log_lambda(i, coord)
        };
        let scored_upper: Vec<f64> = proj
            .indices(n)
            .iter()
            .enumerate()
            .map(|(slot, &i)| score(&upper, slot, i))
            .collect();
        let scored_lower: Vec<f64> = proj
            .indices(n)
            .iter()
            .enumerate()
            .map(|(slot, &i)| score(&lower, slot, i))
            .collect();
        let max = scored_upper.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = scored_lower.iter().cloned().fold(f64::INFINITY, f64::min);
        upper[n - 1] = if n == 1 { max } else { upper[n - 2] + max };
        lower[n - 1] = if n == 1 { min } else { lower[n - 2] + min };
        upper_argmax.push(
            proj.indices(n)
                .iter()
                .enumerate()
                .filter(|(slot, _)| (scored_upper[*slot] - max).abs() < 1e-12)
                .map(|(_, &i)| i)
                .collect(),
        );
        lower_argmin.push(
            proj.indices(n)
                .iter()
                .enumerate()
                .filter(|(slot, _)| (scored_lower[*slot] - min).abs() < 1e-12)
                .map(|(_, &i)| i)
                .collect(),
        );
    }
    ClosedBounds {
        ordering: sigma.clone(),
        upper,
        lower,
        upper_argmax,
        lower_argmin,
    }
}

/// Extremes of the measure-dimension objective for one ordering.
#[derive(Debug, Clone)]
pub struct MeasureOrderingExtremes {
    pub ordering: Permutation,
    pub sup: f64,
    pub sup_certified: bool,
    pub sup_stack: ProbStack,
    pub inf: f64,
    pub inf_certified: bool,
    pub inf_stack: ProbStack,
    pub bounds: ClosedBounds,
}

/// Frostman and box dimension of the self-affine measure.
#[derive(Debug, Clone)]
pub struct DimensionResult {
    /// `max(0, frostman_raw)`.
    pub frostman: f64,
    pub frostman_raw: f64,
    pub box_of_measure: f64,
    /// `min over orderings` of the closed lower sum (a lower bound).
    pub closed_lower_frostman: f64,
    /// `max over orderings` of the closed upper sum (an upper bound).
    pub closed_upper_box: f64,
    pub per_ordering: Vec<MeasureOrderingExtremes>,
    pub sppc_satisfied: bool,
}

pub fn measure_dimensions(sys: &System, mu: &WeightedMeasure) -> DimensionResult {
    let ifs = sys.ifs();
    let table = MeasureTable::build(sys, mu);
    let cfg = OptimizeConfig::extremize(sys.seed());
    let per_ordering: Vec<MeasureOrderingExtremes> = sys
        .admissible()
        .iter()
        .map(|sigma| {
            let proj = sys.projections(sigma);
            let bounds = closed_dimension_bounds(sys, mu, sigma);
            let anchor = sys.anchor(sigma);
            let objective = |stack: &ProbStack| s_value(sys, sigma, stack, &table);
            let d = sys.dim();

            let pick_stack = |arglists: &[Vec<usize>]| -> ProbStack {
                let picks: Vec<usize> = (1..=d)
                    .map(|n| proj.level(n).slot_of(arglists[n - 1][0]))
                    .collect();
                ProbStack::degenerate(proj, &picks)
            };
            let upper_stack = pick_stack(&bounds.upper_argmax);
            let lower_stack = pick_stack(&bounds.lower_argmin);

            let s_upper = bounds.upper[d - 1];
            let s_lower = bounds.lower[d - 1];

            let (sup, sup_certified, sup_stack) =
                if coefficients(ifs, proj, &upper_stack).is_feasible() {
                    (s_upper, true, upper_stack)
                } else {
                    let res = optimize::maximize_over_q(
                        ifs,
                        proj,
                        &objective,
                        &anchor,
                        &[&upper_stack],
                        &cfg,
                    );
                    (res.value.min(s_upper), false, res.argopt)
                };
            let (inf, inf_certified, inf_stack) =
                if coefficients(ifs, proj, &lower_stack).is_feasible() {
                    (s_lower, true, lower_stack)
                } else {
                    let res = optimize::minimize_over_q(
                        ifs,
                        proj,
                        &objective,
                        &anchor,
                        &[&lower_stack],
                        &cfg,
                    );
                    (res.value.max(s_lower), false, res.argopt)
                };
            MeasureOrderingExtremes {
                ordering: sigma.clone(),
                sup,
                sup_certified,
                sup_stack,
                inf,
                inf_certified,
                inf_stack,
                bounds,
            }
        })
        .collect();

    let frostman_raw = per_ordering
        .iter()
        .map(|o| o.inf)
        .fold(f64::INFINITY, f64::min);
    let box_of_measure = per_ordering
        .iter()
        .map(|o| o.sup)
        .fold(f64::NEG_INFINITY, f64::max);
    let closed_lower_frostman = per_ordering
        .iter()
        .map(|o| *o.bounds.lower.last().unwrap())
        .fold(f64::INFINITY, f64::min);
    let closed_upper_box = per_ordering
        .iter()
        .map(|o| *o.bounds.upper.last().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    DimensionResult {
        frostman: frostman_raw.max(0.0),
        frostman_raw,
        box_of_measure,
        closed_lower_frostman,
        closed_upper_box,
        per_ordering,
        sppc_satisfied: sys.sppc().satisfied,
    }
}

/// Numerical `-T'(1)` (the entropy-dimension value when the spectrum is
/// differentiable at 1). Central difference with a tight step on the
/// certified closed form, a wider one when the optimizer is involved.
pub fn entropy_dimension_estimate(sys: &System, mu: &WeightedMeasure) -> f64 {
    let tight = 1e-5;
    let spectrum = lq_spectrum(sys, mu, &[1.0 - tight, 1.0 + tight]);
    if spectrum.rows.iter().all(|r| r.certified) {
        return -(spectrum.rows[1].value - spectrum.rows[0].value) / (2.0 * tight);
    }
    let wide = 1e-3;
    let spectrum = lq_spectrum(sys, mu, &[1.0 - wide, 1.0 + wide]);
    -(spectrum.rows[1].value - spectrum.rows[0].value) / (2.0 * wide)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn carpet_s() -> f64 {
        ((5f64.sqrt() - 1.0) / 2.0).ln() / 0.5f64.ln()
    }

    /// Explicit single-level exponent of the planar carpet.
    fn carpet_t_sigma(u: f64, q: f64) -> f64 {
        let base = (1.0 - u) / (u * u);
        (-1.0 / 2f64.ln())
            * (q * (u / (1.0 - u)).ln() + (0.5 * (1.0 + 4.0 * base.powf(q)).sqrt() - 0.5).ln())
    }

    #[test]
    fn self_similar_closed_form_gives_similarity_dimension() {
        let sys = System::new(fixtures::self_similar());
        let sigma = Permutation::identity(2);
        let closed = solve_closed_form(&sys, &sigma, &PotentialFamily::zero(&sys));
        assert!((closed.exponents[0] - 1.0).abs() < 1e-12);
        assert!((closed.exponents[1] - 1.0).abs() < 1e-12);
        assert!(closed.in_q_flag);
        assert!(closed.residual < 1e-12);
    }

    #[test]
    fn carpet_zero_potential_exponent_is_s() {
        let sys = System::new(fixtures::baranski_planar());
        for sigma in sys.admissible().to_vec() {
            let closed = solve_closed_form(&sys, &sigma, &PotentialFamily::zero(&sys));
            assert!((closed.exponents[1] - carpet_s()).abs() < 1e-12);
        }
    }

    #[test]
    fn carpet_closed_form_matches_explicit_formula() {
        let sys = System::new(fixtures::baranski_planar());
        let sigma = Permutation::new(vec![0, 1]);
        for (u, q) in [(0.5, 2.0), (0.5, -1.0), (0.6, 1.5), (0.7, 3.0), (0.55, 0.3)] {
            let mu = WeightedMeasure::two_point(u);
            let phi = PotentialFamily::lq(&sys, &mu, q);
            let closed = solve_closed_form(&sys, &sigma, &phi);
            let expected = carpet_t_sigma(u, q);
            assert!(
                (closed.exponents[1] - expected).abs() < 1e-11,
                "u={u} q={q}: {} vs {expected}",
                closed.exponents[1]
            );
            // Both levels coincide for this carpet.
            assert!((closed.exponents[0] - closed.exponents[1]).abs() < 1e-10);
        }
        // u = 1/2, q = 2: the exponent is -log2((sqrt(17)-1)/2).
        let mu = WeightedMeasure::two_point(0.5);
        let closed = solve_closed_form(&sys, &sigma, &PotentialFamily::lq(&sys, &mu, 2.0));
        let expected = -((17f64.sqrt() - 1.0) / 2.0).ln() / 2f64.ln();
        assert!((closed.exponents[1] - expected).abs() < 1e-12);
    }

    #[test]
    fn fraser_jurga_closed_forms() {
        let n = 4usize;
        let (a, b, c): (f64, f64, f64) = (0.45, 0.40, 0.35);
        let sys = System::new(fixtures::fraser_jurga(n, (45, 100), (40, 100), (35, 100)));
        let zero = PotentialFamily::zero(&sys);
        let nf = n as f64;

        let sigma = Permutation::new(vec![0, 1, 2]);
        let closed = solve_closed_form(&sys, &sigma, &zero);
        let t = solve_decreasing(
            |t| (a.powf(t) + c.powf(t)).ln(),
            |t| {
                let (x, y) = (a.powf(t), c.powf(t));
                (x * a.ln() + y * c.ln()) / (x + y)
            },
            1.0,
            1e-14,
        );
        assert!((closed.exponents[0] - t).abs() < 1e-11);
        assert!((closed.exponents[1] - t).abs() < 1e-10);
        let expected = t + (nf * a.powf(t) + c.powf(t)).ln() / nf.ln();
        assert!((closed.exponents[2] - expected).abs() < 1e-10);

        let omega = Permutation::new(vec![1, 0, 2]);
        let closed = solve_closed_form(&sys, &omega, &zero);
        assert!((closed.exponents[0] - 1.0).abs() < 1e-11);
        assert!((closed.exponents[1] - 1.0).abs() < 1e-10);
        let d = 1.0 - b;
        let expected = 1.0 + (nf * b + d).ln() / nf.ln();
        assert!((closed.exponents[2] - expected).abs() < 1e-10);
    }

    #[test]
    fn t_value_at_dominant_stack_equals_exponent() {
        let sys = System::new(fixtures::baranski_planar());
        let mu = WeightedMeasure::two_point(0.6);
        for q in [-2.0, 0.0, 0.5, 1.0, 2.5] {
            let phi = PotentialFamily::lq(&sys, &mu, q);
            for sigma in sys.admissible().to_vec() {
                let closed = solve_closed_form(&sys, &sigma, &phi);
                let t = t_value(&sys, &sigma, &closed.dominant, &phi);
                assert!(
                    (t - closed.exponents[1]).abs() < 1e-9,
                    "q={q} {sigma}: {t} vs {}",
                    closed.exponents[1]
                );
            }
        }
    }

    #[test]
    fn t_value_on_boundary_stack_matches_affine_formula() {
        let sys = System::new(fixtures::baranski_planar());
        let omega = Permutation::new(vec![1, 0]);
        let proj = sys.projections(&omega);
        let boundary = ProbStack::new(&proj, vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        for (u, q) in [(0.5, 2.0), (0.6, 3.0), (0.7, 1.5)] {
            let mu = WeightedMeasure::two_point(u);
            let phi = PotentialFamily::lq(&sys, &mu, q);
            let t = t_value(&sys, &omega, &boundary, &phi);
            let expected = 2.0 / 3.0 + q * (u * (1.0 - u)).ln() / (3.0 * 2f64.ln());
            assert!((t - expected).abs() < 1e-12, "u={u} q={q}");
        }
    }

    #[test]
    fn self_similar_t_value_is_entropy_over_lyapunov() {
        let sys = System::new(fixtures::self_similar());
        let sigma = Permutation::identity(2);
        let proj = sys.projections(&sigma);
        let mu = WeightedMeasure::two_point(0.3);
        let phi = PotentialFamily::lq(&sys, &mu, 1.7);
        let p = vec![0.25, 0.75];
        let stack = ProbStack::new(&proj, vec![p.clone(), p.clone()]);
        let t = t_value(&sys, &sigma, &stack, &phi);
        let integral = 1.7 * (0.25 * 0.3f64.ln() + 0.75 * 0.7f64.ln());
        let expected = (entropy(&p) + integral) / 2f64.ln();
        assert!((t - expected).abs() < 1e-12);
    }

    #[test]
    fn certified_supremum_on_lalley_gatzouras() {
        let sys = System::new(fixtures::lalley_gatzouras());
        let mu = WeightedMeasure::new(vec![0.2, 0.5, 0.3]).unwrap();
        for q in [-3.0, -1.0, 0.0, 1.0, 2.0, 5.0] {
            let phi = PotentialFamily::lq(&sys, &mu, q);
            let sigma = Permutation::new(vec![0, 1]);
            let opt = sup_over_q(&sys, &sigma, &phi);
            assert!(opt.certified, "single-ordering systems are closed form");
            assert!((opt.value - opt.closed_exponent).abs() < 1e-14);
        }
    }

    #[test]
    fn boundary_supremum_on_carpet_at_q_two() {
        // u = 1/2, q = 2: the dominant stack leaves the cone for the (y, x)
        // ordering and the constrained supremum lands on -2/3.
        let sys = System::new(fixtures::baranski_planar());
        let mu = WeightedMeasure::two_point(0.5);
        let phi = PotentialFamily::lq(&sys, &mu, 2.0);
        let omega = Permutation::new(vec![1, 0]);
        let opt = sup_over_q(&sys, &omega, &phi);
        assert!(!opt.certified);
        assert!(
            (opt.value - (-2.0 / 3.0)).abs() < 1e-6,
            "value = {}",
            opt.value
        );
    }

    #[test]
    fn certified_supremum_on_carpet_at_negative_q() {
        let sys = System::new(fixtures::baranski_planar());
        let mu = WeightedMeasure::two_point(0.5);
        let phi = PotentialFamily::lq(&sys, &mu, -1.0);
        let sigma = Permutation::new(vec![0, 1]);
        let opt = sup_over_q(&sys, &sigma, &phi);
        assert!(opt.certified);
        assert!((opt.value - carpet_t_sigma(0.5, -1.0)).abs() < 1e-11);
    }

    #[test]
    fn pressure_of_zero_potential() {
        let sys = System::new(fixtures::self_similar());
        let p = variational_pressure(&sys, &PotentialFamily::zero(&sys));
        assert!((p.value - 1.0).abs() < 1e-12);

        let sys = System::new(fixtures::baranski_planar());
        let p = variational_pressure(&sys, &PotentialFamily::zero(&sys));
        assert!((p.value - carpet_s()).abs() < 1e-12);
        assert!(p.certified());
        assert!(p.value <= p.upper_bound + 1e-12);
    }

    #[test]
    fn box_dimensions_of_fixtures() {
        let sys = System::new(fixtures::bedford_mcmullen());
        let expected = 1.0 + 1.5f64.ln() / 3f64.ln();
        assert!((box_dimension(&sys).value - expected).abs() < 1e-12);

        let sys = System::new(fixtures::cube_filling(2));
        assert!((box_dimension(&sys).value - 2.0).abs() < 1e-12);
        let sys = System::new(fixtures::cube_filling(3));
        assert!((box_dimension(&sys).value - 3.0).abs() < 1e-11);
    }

    #[test]
    fn self_similar_spectrum_is_affine() {
        let sys = System::new(fixtures::self_similar());
        let mu = WeightedMeasure::uniform(2);
        let grid: Vec<f64> = (-10..=10).map(|k| k as f64).collect();
        let spectrum = lq_spectrum(&sys, &mu, &grid);
        for row in &spectrum.rows {
            assert!(
                (row.value - (1.0 - row.q)).abs() < 1e-10,
                "q={} value={}",
                row.q,
                row.value
            );
        }
        assert!(!spectrum.symbolic_only);
    }

    #[test]
    fn spectrum_vanishes_at_q_one() {
        for sys in [
            System::new(fixtures::baranski_planar()),
            System::new(fixtures::lalley_gatzouras()),
            System::new(fixtures::bedford_mcmullen()),
        ] {
            let mu = WeightedMeasure::uniform(sys.ifs().len());
            let spectrum = lq_spectrum(&sys, &mu, &[1.0]);
            assert!(spectrum.rows[0].value.abs() < 1e-10);
        }
    }

    #[test]
    fn carpet_spectrum_follows_piecewise_formula_at_half() {
        let sys = System::new(fixtures::baranski_planar());
        let mu = WeightedMeasure::two_point(0.5);
        let grid = [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0, 3.0];
        let spectrum = lq_spectrum(&sys, &mu, &grid);
        for row in &spectrum.rows {
            let expected = if row.q <= 1.0 {
                carpet_t_sigma(0.5, row.q)
            } else {
                2.0 / 3.0 - 2.0 * row.q / 3.0
            };
            let tol = if row.q <= 1.0 { 1e-9 } else { 1e-5 };
            assert!(
                (row.value - expected).abs() < tol,
                "q={}: {} vs {expected}",
                row.q,
                row.value
            );
        }
    }

    #[test]
    fn closed_bounds_base_cases() {
        // One-dimensional system: the bounds are the extreme ratios.
        let maps = vec![
            crate::ifs::DiagonalMap::from_ratios(&[(1, 2)], &[(0, 1)]),
            crate::ifs::DiagonalMap::from_ratios(&[(1, 4)], &[(3, 4)]),
        ];
        let sys = System::new(crate::ifs::SpongeIfs::new(1, maps).unwrap());
        let mu = WeightedMeasure::two_point(0.3);
        let bounds = closed_dimension_bounds(&sys, &mu, &Permutation::identity(1));
        let r0 = 0.3f64.ln() / 0.5f64.ln();
        let r1 = 0.7f64.ln() / 0.25f64.ln();
        assert!((bounds.upper[0] - r0.max(r1)).abs() < 1e-14);
        assert!((bounds.lower[0] - r0.min(r1)).abs() < 1e-14);

        let sys = System::new(fixtures::self_similar());
        let mu = WeightedMeasure::uniform(2);
        let bounds = closed_dimension_bounds(&sys, &mu, &Permutation::identity(2));
        assert!((bounds.upper[1] - 1.0).abs() < 1e-13);
        assert!((bounds.lower[1] - 1.0).abs() < 1e-13);
        // All ratios tie.
        assert_eq!(bounds.upper_argmax[0].len(), 2);
    }

    #[test]
    fn s_value_examples() {
        let sys = System::new(fixtures::self_similar());
        let sigma = Permutation::identity(2);
        let proj = sys.projections(&sigma);
        let mu = WeightedMeasure::uniform(2);
        let table = MeasureTable::build(&sys, &mu);
        let degenerate = ProbStack::degenerate(proj, &[0, 0]);
        assert!((s_value(&sys, &sigma, &degenerate, &table) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn s_value_at_closed_extremizers() {
        let sys = System::new(fixtures::lalley_gatzouras());
        let mu = WeightedMeasure::new(vec![0.25, 0.45, 0.3]).unwrap();
        let sigma = Permutation::new(vec![0, 1]);
        let proj = sys.projections(&sigma);
        let table = MeasureTable::build(&sys, &mu);
        let bounds = closed_dimension_bounds(&sys, &mu, &sigma);
        let d = sys.dim();
        let upper_stack = ProbStack::degenerate(
            proj,
            &(1..=d)
                .map(|n| proj.level(n).slot_of(bounds.upper_argmax[n - 1][0]))
                .collect::<Vec<_>>(),
        );
        let lower_stack = ProbStack::degenerate(
            proj,
            &(1..=d)
                .map(|n| proj.level(n).slot_of(bounds.lower_argmin[n - 1][0]))
                .collect::<Vec<_>>(),
        );
        assert!((s_value(&sys, &sigma, &upper_stack, &table) - bounds.upper[d - 1]).abs() < 1e-12);
        assert!((s_value(&sys, &sigma, &lower_stack, &table) - bounds.lower[d - 1]).abs() < 1e-12);
    }

    #[test]
    fn measure_dimensions_of_self_similar_system() {
        let sys = System::new(fixtures::self_similar());
        let mu = WeightedMeasure::uniform(2);
        let dims = measure_dimensions(&sys, &mu);
        assert!((dims.frostman - 1.0).abs() < 1e-12);
        assert!((dims.box_of_measure - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measure_dimensions_certify_on_lalley_gatzouras() {
        let sys = System::new(fixtures::lalley_gatzouras());
        let mu = WeightedMeasure::new(vec![0.25, 0.45, 0.3]).unwrap();
        let dims = measure_dimensions(&sys, &mu);
        let o = &dims.per_ordering[0];
        // Single admissible ordering: the cone is the whole product, so the
        // closed extremizers are feasible and the bounds are attained.
        assert!(o.sup_certified && o.inf_certified);
        assert!((dims.box_of_measure - o.bounds.upper[1]).abs() < 1e-14);
        assert!((dims.frostman_raw - o.bounds.lower[1]).abs() < 1e-14);
        assert!(dims.frostman <= dims.box_of_measure);
    }

    #[test]
    fn measure_dimensions_of_symmetric_carpet() {
        // u = 1/2: the Frostman dimension is 2/3 (attained on the boundary)
        // and the box dimension of the measure is 1.
        let sys = System::new(fixtures::baranski_planar());
        let mu = WeightedMeasure::two_point(0.5);
        let dims = measure_dimensions(&sys, &mu);
        assert!(
            (dims.frostman - 2.0 / 3.0).abs() < 1e-6,
            "frostman = {}",
            dims.frostman
        );
        assert!(
            (dims.box_of_measure - 1.0).abs() < 1e-6,
            "box = {}",
            dims.box_of_measure
        );
        assert!(dims.frostman >= dims.closed_lower_frostman - 1e-9);
        assert!(dims.box_of_measure <= dims.closed_upper_box + 1e-9);
    }

    #[test]
    fn entropy_dimension_of_self_similar_uniform() {
        let sys = System::new(fixtures::self_similar());
        let mu = WeightedMeasure::uniform(2);
        // T(q) = 1 - q, so -T'(1) = 1.
        let est = entropy_dimension_estimate(&sys, &mu);
        assert!((est - 1.0).abs() < 1e-8);
    }
}
