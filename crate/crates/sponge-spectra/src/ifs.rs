//! Diagonal self-affine iterated function systems on the unit cube.
//!
//! A sponge is the attractor of finitely many contractions `x -> A x + t`
//! where every `A` is diagonal. This module holds the map and system types,
//! their validation (contraction, containment, duplicates, and the face
//! condition that keeps the attractor genuinely `d`-dimensional), the
//! exact-overlap relation between maps under coordinate projections, and the
//! separation check for projected first-level cylinders.

use crate::exact::Exact;
use crate::projection::{Permutation, Projections};
use std::fmt;

/// One affine contraction with diagonal linear part.
///
/// `diag[n]` is the signed contraction factor in coordinate `n`, `trans[n]`
/// the translation. The image of the unit cube in coordinate `n` is the hull
/// of `trans[n]` and `trans[n] + diag[n]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiagonalMap {
    pub diag: Vec<Exact>,
    pub trans: Vec<Exact>,
}

impl DiagonalMap {
    pub fn new(diag: Vec<Exact>, trans: Vec<Exact>) -> Self {
        assert_eq!(diag.len(), trans.len(), "diag/trans length mismatch");
        DiagonalMap { diag, trans }
    }

    /// Convenience constructor from (numerator, denominator) pairs.
    pub fn from_ratios(diag: &[(i64, i64)], trans: &[(i64, i64)]) -> Self {
        Self::new(
            diag.iter().map(|&(n, d)| Exact::ratio(n, d)).collect(),
            trans.iter().map(|&(n, d)| Exact::ratio(n, d)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// |a^(n)|, the contraction ratio in coordinate `n`.
    pub fn lambda(&self, n: usize) -> Exact {
        self.diag[n].abs()
    }

    /// Image interval of [0,1] in coordinate `n`, as an ordered pair.
    pub fn interval(&self, n: usize) -> (Exact, Exact) {
        let a = &self.trans[n];
        let b = &self.trans[n] + &self.diag[n];
        if a <= &b {
            (a.clone(), b)
        } else {
            (b, a.clone())
        }
    }
}

impl fmt::Debug for DiagonalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "diag{:?} + {:?}", self.diag, self.trans)
    }
}

/// A violated construction requirement, reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Fewer than two maps.
    TooFewMaps { count: usize },
    /// Map has inconsistent dimension.
    DimensionMismatch { map: usize, expected: usize, got: usize },
    /// |a^(n)| is not in (0, 1).
    NotContracting { map: usize, coord: usize },
    /// The image of the unit cube leaves the unit cube.
    ImageExitsUnitCube { map: usize, coord: usize },
    /// Two maps are identical as affine maps.
    DuplicateMaps { first: usize, second: usize },
    /// No map keeps positive distance from the face `x_coord = face`.
    FaceCondition { coord: usize, face: u8 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewMaps { count } => write!(f, "need at least 2 maps, got {count}"),
            Violation::DimensionMismatch { map, expected, got } => {
                write!(f, "map {map}: expected dimension {expected}, got {got}")
            }
            Violation::NotContracting { map, coord } => {
                write!(f, "map {map}, coordinate {}: |a| must lie in (0,1)", coord + 1)
            }
            Violation::ImageExitsUnitCube { map, coord } => {
                write!(f, "map {map}, coordinate {}: image exits unit cube", coord + 1)
            }
            Violation::DuplicateMaps { first, second } => {
                write!(f, "maps {first} and {second} are identical (duplicate maps)")
            }
            Violation::FaceCondition { coord, face } => write!(
                f,
                "no map stays away from the face x_{} = {face}",
                coord + 1
            ),
        }
    }
}

/// Outcome of [`validate`]: an empty violation list means the system is usable.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Smallest contraction ratio over all maps and coordinates.
    pub lambda_min: Option<f64>,
    /// Largest margin r0 such that every face of the cube has a map whose
    /// image keeps distance >= r0 from it. Zero or negative r0 is a violation.
    pub face_margin: Option<f64>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every construction invariant and reports all violations at once.
pub fn validate(dim: usize, maps: &[DiagonalMap]) -> ValidationReport {
    let mut violations = Vec::new();
    if maps.len() < 2 {
        violations.push(Violation::TooFewMaps { count: maps.len() });
    }
    let zero = Exact::zero();
    let one = Exact::one();
    for (k, m) in maps.iter().enumerate() {
        if m.dim() != dim {
            violations.push(Violation::DimensionMismatch {
                map: k,
                expected: dim,
                got: m.dim(),
            });
            continue;
        }
        for n in 0..dim {
            let lam = m.lambda(n);
            if lam.is_zero() || lam >= one {
                violations.push(Violation::NotContracting { map: k, coord: n });
            }
            let (lo, hi) = m.interval(n);
            if lo < zero || hi > one {
                violations.push(Violation::ImageExitsUnitCube { map: k, coord: n });
            }
        }
    }
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            if maps[i] == maps[j] {
                violations.push(Violation::DuplicateMaps { first: i, second: j });
            }
        }
    }

    let consistent = maps.iter().all(|m| m.dim() == dim) && !maps.is_empty();
    let mut face_margin: Option<f64> = None;
    if consistent {
        // Face condition: for each coordinate and face, some image interval
        // keeps positive distance from the face; r0 is the min over faces of
        // the best margin.
        let mut margin: Option<Exact> = None;
        for n in 0..dim {
            for face in [0u8, 1u8] {
                let best = maps
                    .iter()
                    .map(|m| {
                        let (lo, hi) = m.interval(n);
                        if face == 0 {
                            lo
                        } else {
                            &one - &hi
                        }
                    })
                    .max();
                if let Some(b) = best {
                    if b <= zero {
                        violations.push(Violation::FaceCondition { coord: n, face });
                    }
                    margin = Some(match margin {
                        None => b,
                        Some(m) => m.min(b),
                    });
                }
            }
        }
        face_margin = margin.map(|m| m.to_f64());
    }

    let lambda_min = if consistent {
        maps.iter()
            .flat_map(|m| (0..dim).map(move |n| m.lambda(n).to_f64()))
            .fold(None, |acc: Option<f64>, x| {
                Some(acc.map_or(x, |a| a.min(x)))
            })
    } else {
        None
    };

    ValidationReport {
        violations,
        lambda_min,
        face_margin,
    }
}

/// A validated diagonal IFS on `[0,1]^dim`.
#[derive(Clone)]
pub struct SpongeIfs {
    dim: usize,
    maps: Vec<DiagonalMap>,
    lambda_min: f64,
    lambda_max: f64,
    face_margin: f64,
    /// log lambda_i^(n), indexed `[map][coord]`.
    log_lambda: Vec<Vec<f64>>,
}

impl SpongeIfs {
    /// Validates and wraps the system; on failure the full report is returned.
    pub fn new(dim: usize, maps: Vec<DiagonalMap>) -> Result<Self, ValidationReport> {
        let report = validate(dim, &maps);
        if !report.is_valid() {
            return Err(report);
        }
        let log_lambda: Vec<Vec<f64>> = maps
            .iter()
            .map(|m| (0..dim).map(|n| m.lambda(n).to_f64().ln()).collect())
            .collect();
        let lambda_min = report.lambda_min.unwrap();
        let lambda_max = maps
            .iter()
            .flat_map(|m| (0..dim).map(move |n| m.lambda(n).to_f64()))
            .fold(0.0f64, f64::max);
        Ok(SpongeIfs {
            dim,
            maps,
            lambda_min,
            lambda_max,
            face_margin: report.face_margin.unwrap(),
            log_lambda,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[DiagonalMap] {
        &self.maps
    }

    pub fn map(&self, i: usize) -> &DiagonalMap {
        &self.maps[i]
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn face_margin(&self) -> f64 {
        self.face_margin
    }

    /// log of the contraction ratio of map `i` in coordinate `coord`.
    pub fn log_lambda(&self, i: usize, coord: usize) -> f64 {
        self.log_lambda[i][coord]
    }

    pub fn lambda(&self, i: usize, coord: usize) -> Exact {
        self.maps[i].lambda(coord)
    }
}

impl fmt::Debug for SpongeIfs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpongeIfs(dim={}, maps={})", self.dim, self.maps.len())
    }
}

/// True iff maps `i` and `j` agree, as affine maps, in the first `level`
/// coordinates of `sigma` (they "overlap exactly" on that subspace).
///
/// Comparison is exact on the rational representation.
pub fn exact_overlap(
    ifs: &SpongeIfs,
    i: usize,
    j: usize,
    sigma: &Permutation,
    level: usize,
) -> bool {
    assert!(level >= 1 && level <= ifs.dim(), "level out of range");
    assert!(i < ifs.len() && j < ifs.len(), "map index out of range");
    let (a, b) = (ifs.map(i), ifs.map(j));
    sigma.coords()[..level]
        .iter()
        .all(|&c| a.diag[c] == b.diag[c] && a.trans[c] == b.trans[c])
}

/// One witness of a separation failure: for ordering `sigma`, at level `n`,
/// maps `i < j` neither overlap exactly nor have disjoint projected boxes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SppcWitness {
    pub sigma: Permutation,
    pub level: usize,
    pub i: usize,
    pub j: usize,
    /// True when only the closed-box (very strong) variant fails.
    pub closed_only: bool,
}

/// Result of the separation check over a family of orderings.
#[derive(Debug, Clone)]
pub struct SppcReport {
    pub satisfied: bool,
    pub very_strong: bool,
    pub witnesses: Vec<SppcWitness>,
}

/// Separation of principal projections: for every admissible ordering and
/// level, first-level cylinders either project to identical boxes or to boxes
/// with disjoint interiors. The very strong variant requires the closed boxes
/// to be disjoint.
pub fn check_sppc(ifs: &SpongeIfs, orderings: &[Permutation]) -> SppcReport {
    let mut witnesses = Vec::new();
    let mut satisfied = true;
    let mut very_strong = true;
    // The condition at level n depends only on the set {sigma_1..sigma_n};
    // deduplicate prefixes so each subset is checked once.
    let mut seen = std::collections::BTreeSet::new();
    for sigma in orderings {
        for level in 1..=ifs.dim() {
            let mut prefix: Vec<usize> = sigma.coords()[..level].to_vec();
            prefix.sort_unstable();
            if !seen.insert(prefix) {
                continue;
            }
            for i in 0..ifs.len() {
                for j in i + 1..ifs.len() {
                    if exact_overlap(ifs, i, j, sigma, level) {
                        continue;
                    }
                    let coords = &sigma.coords()[..level];
                    let open_disjoint = coords.iter().any(|&c| {
                        let (lo_i, hi_i) = ifs.map(i).interval(c);
                        let (lo_j, hi_j) = ifs.map(j).interval(c);
                        hi_i <= lo_j || hi_j <= lo_i
                    });
                    let closed_disjoint = coords.iter().any(|&c| {
                        let (lo_i, hi_i) = ifs.map(i).interval(c);
                        let (lo_j, hi_j) = ifs.map(j).interval(c);
                        hi_i < lo_j || hi_j < lo_i
                    });
                    if !open_disjoint {
                        satisfied = false;
                        very_strong = false;
                        witnesses.push(SppcWitness {
                            sigma: sigma.clone(),
                            level,
                            i,
                            j,
                            closed_only: false,
                        });
                    } else if !closed_disjoint {
                        very_strong = false;
                        witnesses.push(SppcWitness {
                            sigma: sigma.clone(),
                            level,
                            i,
                            j,
                            closed_only: true,
                        });
                    }
                }
            }
        }
    }
    SppcReport {
        satisfied,
        very_strong,
        witnesses,
    }
}

/// Builds the surviving index sets and projection maps for one ordering.
/// See [`crate::projection`] for the types.
pub fn project_index_set(ifs: &SpongeIfs, sigma: &Permutation) -> Projections {
    Projections::build(ifs, sigma)
}
