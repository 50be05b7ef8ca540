//! Independently known closed forms for the built-in reference examples.
//!
//! Two families ship with the crate. The planar carpet behind
//! `baranski-planar` has a fully explicit spectrum with a phase transition in
//! the measure parameter, and the three-dimensional family behind
//! `fraser-jurga` has closed forms for both admissible orderings together
//! with analytically checkable feasibility of the dominant stacks. Everything
//! here is written directly from those formulas, independently of the root
//! solver and the optimizer, so it can serve as an oracle for them.

use crate::numerics::solve_decreasing;

/// `(sqrt(5) - 1) / 2`, the threshold measure parameter of the carpet family.
pub fn carpet_threshold() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Box dimension of the carpet: the root of `(1/2)^s + (1/4)^s = 1`.
pub fn carpet_s() -> f64 {
    carpet_threshold().ln() / 0.5f64.ln()
}

/// Single-ordering exponent of the carpet, measure `(u, 1-u)`:
/// the explicit solution of `u^q (1/2)^T + (1-u)^q (1/2)^(2T) = 1`.
pub fn carpet_t_sigma(u: f64, q: f64) -> f64 {
    let base = (1.0 - u) / (u * u);
    (-1.0 / 2f64.ln())
        * (q * (u / (1.0 - u)).ln() + (0.5 * (1.0 + 4.0 * base.powf(q)).sqrt() - 0.5).ln())
}

/// The opposite ordering swaps the roles of the two maps.
pub fn carpet_t_omega(u: f64, q: f64) -> f64 {
    carpet_t_sigma(1.0 - u, q)
}

/// The phase-transition location `log 2 / log((1-u)/u^2)`; negative for
/// `u` above the threshold, where the transition has escaped to infinity.
pub fn carpet_phase_q(u: f64) -> f64 {
    2f64.ln() / ((1.0 - u) / (u * u)).ln()
}

/// The affine tail of the spectrum past the phase transition.
pub fn carpet_affine_branch(u: f64, q: f64) -> f64 {
    2.0 / 3.0 + q * (u * (1.0 - u)).ln() / (3.0 * 2f64.ln())
}

/// The full reference spectrum of the carpet for `u in [1/2, 1)`, together
/// with whether the value comes from a closed-form (certified) branch or the
/// constrained-supremum branch.
pub fn carpet_reference_spectrum(u: f64, q: f64) -> (f64, bool) {
    assert!((0.0..1.0).contains(&u));
    let u = if u < 0.5 { 1.0 - u } else { u };
    if q <= 0.0 {
        return (carpet_t_omega(u, q), true);
    }
    if u < carpet_threshold() {
        let qstar = carpet_phase_q(u);
        if q <= qstar {
            (carpet_t_sigma(u, q), true)
        } else {
            (carpet_affine_branch(u, q), false)
        }
    } else {
        (carpet_t_sigma(u, q), true)
    }
}

/// Parameters of the three-dimensional family: `n` maps with ratios
/// `(a, b, 1/n)` stacked along z, plus one map with ratios `(c, 1-b, 1/n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FjParams {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl FjParams {
    pub fn d(&self) -> f64 {
        1.0 - self.b
    }

    /// The constraint chain `1/n < c < b < a < 1-b` with `a + c < 1`.
    pub fn admissible(&self) -> bool {
        let FjParams { n, a, b, c } = *self;
        1.0 / (n as f64) < c && c < b && b < a && a < 1.0 - b && a + c < 1.0
    }
}

/// Closed forms and dominant-stack feasibility for both orderings.
#[derive(Debug, Clone, Copy)]
pub struct FjClosedForms {
    /// Root of `a^t + c^t = 1`.
    pub t: f64,
    pub t3_sigma: f64,
    pub t3_omega: f64,
    /// `min(C_1, C_2)` at the dominant stack of the `(x, y, z)` ordering.
    pub sigma_min_coeff: f64,
    /// Same for the `(y, x, z)` ordering.
    pub omega_min_coeff: f64,
}

impl FjClosedForms {
    pub fn sigma_star_feasible(&self) -> bool {
        self.sigma_min_coeff >= -crate::orderings::TOL_Q
    }

    pub fn omega_star_feasible(&self) -> bool {
        self.omega_min_coeff >= -crate::orderings::TOL_Q
    }
}

pub fn fj_closed_forms(p: &FjParams) -> FjClosedForms {
    let FjParams { n, a, b, c } = *p;
    let nf = n as f64;
    let d = p.d();
    let ln_n = nf.ln();
    let t = solve_decreasing(
        |t| (a.powf(t) + c.powf(t)).ln(),
        |t| {
            let (x, y) = (a.powf(t), c.powf(t));
            (x * a.ln() + y * c.ln()) / (x + y)
        },
        1.0,
        1e-15,
    );
    let (at, ct) = (a.powf(t), c.powf(t));
    let s_sigma = nf * at + ct;
    let t3_sigma = t + s_sigma.ln() / ln_n;
    let s_omega = nf * b + d;
    let t3_omega = 1.0 + s_omega.ln() / ln_n;

    // sigma = (x, y, z): level vectors p1 = p2 = (a^t, c^t),
    // p3 = (a^t/S x n, c^t/S).
    let chi_y_p3 = -(nf * at * b.ln() + ct * d.ln()) / s_sigma;
    let chi_y_p2 = -(at * b.ln() + ct * d.ln());
    let chi_x_p3 = -(nf * at * a.ln() + ct * c.ln()) / s_sigma;
    let chi_x_p2 = -(at * a.ln() + ct * c.ln());
    let c2_sigma = (1.0 - chi_y_p3 / ln_n) / chi_y_p2;
    let c1_sigma = (1.0 - chi_x_p3 / ln_n - c2_sigma * chi_x_p2) / chi_x_p2;
    let sigma_min_coeff = c2_sigma.min(c1_sigma);

    // omega = (y, x, z): p1 = p2 = (b, d), p3 = (b/S' x n, d/S').
    let chi_x_q3 = -(nf * b * a.ln() + d * c.ln()) / s_omega;
    let chi_x_q2 = -(b * a.ln() + d * c.ln());
    let chi_y_q3 = -(nf * b * b.ln() + d * d.ln()) / s_omega;
    let chi_y_q2 = -(b * b.ln() + d * d.ln());
    let c2_omega = (1.0 - chi_x_q3 / ln_n) / chi_x_q2;
    let c1_omega = (1.0 - chi_y_q3 / ln_n - c2_omega * chi_y_q2) / chi_y_q2;
    let omega_min_coeff = c2_omega.min(c1_omega);

    FjClosedForms {
        t,
        t3_sigma,
        t3_omega,
        sigma_min_coeff,
        omega_min_coeff,
    }
}

/// Outcome of sweeping the parameter grid.
#[derive(Debug, Clone, Default)]
pub struct FjGridReport {
    pub points: usize,
    /// Points where both dominant stacks leave their cones.
    pub both_infeasible: Vec<FjParams>,
    /// Points where the infeasible ordering still wins the maximum.
    pub order_violations: Vec<FjParams>,
    pub sigma_infeasible: usize,
    pub omega_infeasible: usize,
}

impl FjGridReport {
    pub fn conditions_hold(&self) -> bool {
        self.both_infeasible.is_empty() && self.order_violations.is_empty()
    }
}

/// Sweeps `c` from 0.02, then `b > c`, then `a > b` (each advancing by
/// `step`) over the admissible region, for each alphabet size in `ns`.
pub fn fj_grid(ns: &[usize], step: f64) -> FjGridReport {
    let mut report = FjGridReport::default();
    let keep = 10;
    for &n in ns {
        let mut c: f64 = 0.02;
        while c <= 0.49 + 1e-12 {
            let mut b = c + 0.01;
            while b <= 0.5 + 1e-12 {
                let mut a = b + 0.01;
                let a_max = (1.0 - c).min(1.0 - b) - 0.01;
                while a <= a_max + 1e-12 {
                    let p = FjParams { n, a, b, c };
                    if p.admissible() {
                        report.points += 1;
                        let forms = fj_closed_forms(&p);
                        let sigma_ok = forms.sigma_star_feasible();
                        let omega_ok = forms.omega_star_feasible();
                        if !sigma_ok {
                            report.sigma_infeasible += 1;
                        }
                        if !omega_ok {
                            report.omega_infeasible += 1;
                        }
                        if !sigma_ok && !omega_ok {
                            if report.both_infeasible.len() < keep {
                                report.both_infeasible.push(p);
                            }
                        } else if !sigma_ok && forms.t3_omega < forms.t3_sigma - 1e-9 {
                            if report.order_violations.len() < keep {
                                report.order_violations.push(p);
                            }
                        } else if !omega_ok && forms.t3_sigma < forms.t3_omega - 1e-9 {
                            if report.order_violations.len() < keep {
                                report.order_violations.push(p);
                            }
                        }
                    }
                    a += step;
                }
                b += step;
            }
            c += step;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::orderings::coefficients;
    use crate::potentials::PotentialFamily;
    use crate::pressure::solve_closed_form;
    use crate::projection::Permutation;
    use crate::system::System;

    #[test]
    fn carpet_constants() {
        assert!((carpet_threshold() - 0.618033988749895).abs() < 1e-14);
        assert!((carpet_s() - 0.6942419136306174).abs() < 1e-12);
        // Phase transition at u = 1/2 sits at q = 1 and escapes as u grows.
        assert!((carpet_phase_q(0.5) - 1.0).abs() < 1e-14);
        assert!((carpet_phase_q(0.6) - 6.578813478617087).abs() < 1e-9);
        assert!(carpet_phase_q(0.7) < 0.0);
    }

    #[test]
    fn carpet_spectrum_is_continuous_at_the_transition() {
        for u in [0.5, 0.55, 0.6] {
            let qstar = carpet_phase_q(u);
            let (left, _) = carpet_reference_spectrum(u, qstar - 1e-9);
            let (right, _) = carpet_reference_spectrum(u, qstar + 1e-9);
            assert!((left - right).abs() < 1e-7, "u={u}");
        }
    }

    #[test]
    fn carpet_value_at_zero_is_s() {
        for u in [0.5, 0.6, 0.7, 0.9] {
            let (v, certified) = carpet_reference_spectrum(u, 0.0);
            assert!((v - carpet_s()).abs() < 1e-12);
            assert!(certified);
        }
    }

    #[test]
    fn fj_analytic_coefficients_match_generic_machinery() {
        let (n, a, b, c) = (4usize, 0.45, 0.40, 0.35);
        let params = FjParams { n, a, b, c };
        assert!(params.admissible());
        let forms = fj_closed_forms(&params);

        let sys = System::new(fixtures::fraser_jurga(n, (45, 100), (40, 100), (35, 100)));
        let zero = PotentialFamily::zero(&sys);
        for (perm, expected_t3, expected_min) in [
            (vec![0, 1, 2], forms.t3_sigma, forms.sigma_min_coeff),
            (vec![1, 0, 2], forms.t3_omega, forms.omega_min_coeff),
        ] {
            let sigma = Permutation::new(perm);
            let closed = solve_closed_form(&sys, &sigma, &zero);
            assert!((closed.exponents[2] - expected_t3).abs() < 1e-10);
            let coeff = coefficients(sys.ifs(), sys.projections(&sigma), &closed.dominant);
            let min_low = coeff.values[..2].iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(
                (min_low - expected_min).abs() < 1e-9,
                "{sigma}: generic {min_low} vs analytic {expected_min}"
            );
        }
    }

    #[test]
    fn small_grid_sweep_behaves() {
        let report = fj_grid(&[100], 0.1);
        assert!(report.points > 0);
        assert!(report.conditions_hold(), "{report:?}");
    }
}
