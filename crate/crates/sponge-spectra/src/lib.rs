//! Box-counting analysis of diagonal self-affine sets and measures.
//!
//! This crate computes the `L^q` spectrum, the box dimension, and the
//! Frostman and box dimensions of self-affine measures on sponges: attractors
//! of iterated function systems on `[0,1]^d` whose maps have diagonal linear
//! parts. Under the separation of principal projections condition the
//! symbolic quantities computed here coincide with the geometric ones.
//!
//! The computation proceeds in layers:
//!
//! * [`ifs`] models the system, validates it, and checks the separation of
//!   principal projections condition; [`projection`] builds the surviving
//!   index sets under coordinate projections.
//! * [`orderings`] computes stopping times, scale orderings, Lyapunov
//!   exponents and the coefficient recursion whose non-negativity cone
//!   characterizes admissible orderings.
//! * [`potentials`] builds potential families (notably `q log mu`) and
//!   evaluates them on approximate cubes.
//! * [`pressure`] solves the closed-form level equations, takes constrained
//!   suprema over the feasible cone, and derives spectra and dimensions.
//! * [`oracle`] enumerates every symbolic approximate cube at a fixed scale,
//!   giving exact finite-scale ground truth to test the limit formulas
//!   against.
//!
//! ```
//! use sponge_spectra::{builtin_scene, lq_spectrum, System};
//!
//! let scene = builtin_scene("baranski-planar").unwrap();
//! let (system, measure) = scene.build(0).unwrap();
//! let spectrum = lq_spectrum(&system, &measure, &[0.0, 1.0, 2.0]);
//! // q = 0 gives the box dimension of the attractor, about 0.6942;
//! // q = 1 always gives 0.
//! assert!((spectrum.rows[0].value - 0.694242).abs() < 1e-5);
//! assert!(spectrum.rows[1].value.abs() < 1e-9);
//! ```

pub mod exact;
pub mod fixtures;
pub mod ifs;
pub mod numerics;
pub mod optimize;
pub mod oracle;
pub mod orderings;
pub mod potentials;
pub mod pressure;
pub mod projection;
pub mod reference;
pub mod scene;
pub mod system;
pub mod words;

pub use exact::Exact;
pub use ifs::{check_sppc, exact_overlap, project_index_set, validate, DiagonalMap, SpongeIfs};
pub use oracle::{
    enumerate_cubes, finite_scale_measure_extremes, finite_scale_pressure, type_census,
    ApproximateCube, OracleError, TypeVector, DEFAULT_BUDGET,
};
pub use orderings::{
    admissible_orderings, coefficients, in_q, lyapunov, scale_ordering, stopping, Coefficients,
    OrderingReport, OrderingStatus, ProbStack,
};
pub use potentials::{
    cube_measure, legendre_transform, phi_value, project_measure, MeasureTable, PotentialFamily,
    WeightedMeasure,
};
pub use pressure::{
    box_dimension, closed_dimension_bounds, entropy_dimension_estimate, lq_spectrum,
    measure_dimensions, s_value, solve_closed_form, sup_over_q, t_value, variational_pressure,
    BoxDimensionResult, ClosedFormResult, DimensionResult, PressureResult, SpectrumResult,
};
pub use projection::{Permutation, ProjectedSystem, Projections};
pub use scene::{builtin_scene, Scene, SceneError, BUILTIN_SCENES};
pub use system::System;
pub use words::PeriodicWord;
