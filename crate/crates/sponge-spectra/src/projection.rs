//! Coordinate orderings and projected index sets.
//!
//! For an ordering `sigma` of the coordinates, maps that overlap exactly on
//! the span of the first `n` coordinates of `sigma` are indistinguishable
//! after projection. Scanning pairs `i < j` and removing `j` from every level
//! at or below the deepest overlap leaves the surviving sets
//! `I_d ⊇ I_{d-1} ⊇ … ⊇ I_1` together with the projection map that sends each
//! index to the smallest member of its overlap class. Overlap depends only on
//! the *set* of projected coordinates, so classes are computed per coordinate
//! subset and shared between orderings with a common prefix.

use crate::exact::Exact;
use crate::ifs::SpongeIfs;
use std::collections::BTreeMap;
use std::fmt;

/// A permutation of the coordinates `0..d`. `coords()[k]` is the coordinate
/// occupying position `k+1` (position 1 contracts slowest).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(coords: Vec<usize>) -> Self {
        let d = coords.len();
        let mut seen = vec![false; d];
        for &c in &coords {
            assert!(c < d && !seen[c], "not a permutation of 0..{d}");
            seen[c] = true;
        }
        Permutation(coords)
    }

    pub fn identity(d: usize) -> Self {
        Permutation((0..d).collect())
    }

    /// All d! permutations, in lexicographic order.
    pub fn all(d: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut coords: Vec<usize> = (0..d).collect();
        loop {
            out.push(Permutation(coords.clone()));
            // next_permutation
            let Some(i) = (0..d.saturating_sub(1)).rev().find(|&i| coords[i] < coords[i + 1])
            else {
                break;
            };
            let j = (i + 1..d).rev().find(|&j| coords[j] > coords[i]).unwrap();
            coords.swap(i, j);
            coords[i + 1..].reverse();
        }
        out
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    /// Coordinate at (1-based) position `n`.
    pub fn coord_at(&self, n: usize) -> usize {
        self.0[n - 1]
    }

    /// Bitmask of the coordinates in positions `1..=n`.
    pub fn prefix_mask(&self, n: usize) -> u32 {
        self.0[..n].iter().fold(0u32, |m, &c| m | (1 << c))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // 1-based, matching the usual labelling of coordinates.
        let parts: Vec<String> = self.0.iter().map(|c| (c + 1).to_string()).collect();
        write!(f, "{}", parts.join("-"))
    }
}

/// Exact-overlap classes for one coordinate subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapClasses {
    /// Surviving (smallest-in-class) indices, sorted.
    pub indices: Vec<usize>,
    /// `proj[j]` = smallest index overlapping exactly with `j` on the subset.
    pub proj: Vec<usize>,
    /// `slot[i]` = position of `i` in `indices` for surviving `i`, else None.
    pub slot: Vec<Option<usize>>,
}

impl OverlapClasses {
    /// Groups maps by their affine action restricted to the coordinates in
    /// `mask`; the smallest index of each class survives.
    pub fn for_subset(ifs: &SpongeIfs, mask: u32) -> Self {
        let coords: Vec<usize> = (0..ifs.dim()).filter(|&c| mask & (1 << c) != 0).collect();
        let mut groups: BTreeMap<Vec<(Exact, Exact)>, Vec<usize>> = BTreeMap::new();
        for (idx, m) in ifs.maps().iter().enumerate() {
            let key: Vec<(Exact, Exact)> = coords
                .iter()
                .map(|&c| (m.diag[c].clone(), m.trans[c].clone()))
                .collect();
            groups.entry(key).or_default().push(idx);
        }
        let mut proj = vec![0usize; ifs.len()];
        let mut indices = Vec::with_capacity(groups.len());
        for members in groups.values() {
            let rep = members[0]; // members ascend, smallest survives
            indices.push(rep);
            for &j in members {
                proj[j] = rep;
            }
        }
        indices.sort_unstable();
        let mut slot = vec![None; ifs.len()];
        for (k, &i) in indices.iter().enumerate() {
            slot[i] = Some(k);
        }
        OverlapClasses { indices, proj, slot }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Position of surviving index `i` within `indices`.
    pub fn slot_of(&self, i: usize) -> usize {
        self.slot[i].expect("index does not survive at this level")
    }
}

/// The surviving index set and projection for one `(sigma, level)` pair.
#[derive(Debug, Clone)]
pub struct ProjectedSystem {
    pub ordering: Permutation,
    pub level: usize,
    pub indices: Vec<usize>,
    pub proj: Vec<usize>,
}

/// All levels of projected index sets for one ordering.
#[derive(Debug, Clone)]
pub struct Projections {
    pub ordering: Permutation,
    levels: Vec<OverlapClasses>,
}

impl Projections {
    pub fn build(ifs: &SpongeIfs, sigma: &Permutation) -> Self {
        let d = ifs.dim();
        assert_eq!(sigma.len(), d);
        let levels = (1..=d)
            .map(|n| OverlapClasses::for_subset(ifs, sigma.prefix_mask(n)))
            .collect();
        Projections {
            ordering: sigma.clone(),
            levels,
        }
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// Classes at level `n` (1-based).
    pub fn level(&self, n: usize) -> &OverlapClasses {
        &self.levels[n - 1]
    }

    /// Surviving index set `I_n`.
    pub fn indices(&self, n: usize) -> &[usize] {
        &self.levels[n - 1].indices
    }

    /// Projection of index `j` at level `n`.
    pub fn project(&self, n: usize, j: usize) -> usize {
        self.levels[n - 1].proj[j]
    }

    pub fn to_projected_system(&self, n: usize) -> ProjectedSystem {
        ProjectedSystem {
            ordering: self.ordering.clone(),
            level: n,
            indices: self.levels[n - 1].indices.clone(),
            proj: self.levels[n - 1].proj.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ifs::exact_overlap;

    #[test]
    fn permutation_basics() {
        let p = Permutation::new(vec![1, 0, 2]);
        assert_eq!(p.coord_at(1), 1);
        assert_eq!(p.prefix_mask(2), 0b011);
        assert_eq!(p.to_string(), "2-1-3");
        assert_eq!(Permutation::all(3).len(), 6);
    }

    #[test]
    fn carpet_keeps_all_indices() {
        let ifs = fixtures::baranski_planar();
        for sigma in [Permutation::new(vec![0, 1]), Permutation::new(vec![1, 0])] {
            let proj = Projections::build(&ifs, &sigma);
            assert_eq!(proj.indices(1), &[0, 1]);
            assert_eq!(proj.indices(2), &[0, 1]);
        }
    }

    #[test]
    fn fraser_jurga_collapses_columns() {
        let n = 5;
        let ifs = fixtures::fraser_jurga(n, (45, 100), (40, 100), (35, 100));
        let sigma = Permutation::new(vec![0, 1, 2]);
        let proj = Projections::build(&ifs, &sigma);
        assert_eq!(proj.indices(1), &[0, n]);
        assert_eq!(proj.indices(2), &[0, n]);
        assert_eq!(proj.indices(3).len(), n + 1);
        for j in 0..n {
            assert_eq!(proj.project(2, j), 0);
        }
        assert_eq!(proj.project(2, n), n);
    }

    #[test]
    fn no_overlaps_means_identity_projection() {
        let ifs = fixtures::self_similar();
        let sigma = Permutation::identity(2);
        let proj = Projections::build(&ifs, &sigma);
        for n in 1..=2 {
            assert_eq!(proj.indices(n), &[0, 1]);
            for j in 0..2 {
                assert_eq!(proj.project(n, j), j);
            }
        }
    }

    #[test]
    fn projection_fixes_survivors_and_overlaps_inputs() {
        let ifs = fixtures::fraser_jurga(4, (45, 100), (40, 100), (35, 100));
        for sigma in Permutation::all(3) {
            let proj = Projections::build(&ifs, &sigma);
            for n in 1..=3 {
                for i in proj.indices(n) {
                    assert_eq!(proj.project(n, *i), *i);
                }
                for j in 0..ifs.len() {
                    assert!(exact_overlap(&ifs, j, proj.project(n, j), &sigma, n));
                }
            }
        }
    }

    #[test]
    fn nesting_of_index_sets() {
        let ifs = fixtures::fraser_jurga(4, (45, 100), (40, 100), (35, 100));
        for sigma in Permutation::all(3) {
            let proj = Projections::build(&ifs, &sigma);
            for n in 1..3 {
                let lower: std::collections::BTreeSet<_> =
                    proj.indices(n).iter().copied().collect();
                let upper: std::collections::BTreeSet<_> =
                    proj.indices(n + 1).iter().copied().collect();
                assert!(lower.is_subset(&upper));
            }
        }
    }
}
