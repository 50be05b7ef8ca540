//! A validated system bundled with everything the spectrum machinery needs:
//! the admissible orderings with their certification statuses, projected
//! index sets per admissible ordering, the separation report, and a feasible
//! anchor stack per ordering. Immutable after construction.

use crate::ifs::{check_sppc, SppcReport, SpongeIfs, ValidationReport};
use crate::orderings::{admissible_orderings, OrderingReport, ProbStack};
use crate::projection::{Permutation, Projections};

#[derive(Debug, Clone)]
pub struct System {
    ifs: SpongeIfs,
    report: OrderingReport,
    admissible: Vec<Permutation>,
    projections: Vec<(Permutation, Projections)>,
    sppc: SppcReport,
    seed: u64,
}

impl System {
    pub fn new(ifs: SpongeIfs) -> Self {
        Self::with_seed(ifs, 0)
    }

    /// `seed` drives every multi-start search derived from this system.
    pub fn with_seed(ifs: SpongeIfs, seed: u64) -> Self {
        let report = admissible_orderings(&ifs, seed);
        let admissible = report.admissible();
        let projections: Vec<(Permutation, Projections)> = admissible
            .iter()
            .map(|sigma| (sigma.clone(), Projections::build(&ifs, sigma)))
            .collect();
        let sppc = check_sppc(&ifs, &admissible);
        System {
            ifs,
            report,
            admissible,
            projections,
            sppc,
            seed,
        }
    }

    /// Validates raw parts and builds the system.
    pub fn from_parts(
        dim: usize,
        maps: Vec<crate::ifs::DiagonalMap>,
        seed: u64,
    ) -> Result<Self, ValidationReport> {
        Ok(Self::with_seed(SpongeIfs::new(dim, maps)?, seed))
    }

    pub fn ifs(&self) -> &SpongeIfs {
        &self.ifs
    }

    pub fn dim(&self) -> usize {
        self.ifs.dim()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn admissible(&self) -> &[Permutation] {
        &self.admissible
    }

    pub fn ordering_report(&self) -> &OrderingReport {
        &self.report
    }

    pub fn sppc(&self) -> &SppcReport {
        &self.sppc
    }

    /// Projections for an admissible ordering.
    pub fn projections(&self, sigma: &Permutation) -> &Projections {
        self.projections
            .iter()
            .find(|(p, _)| p == sigma)
            .map(|(_, proj)| proj)
            .unwrap_or_else(|| panic!("ordering {sigma} is not admissible"))
    }

    /// A feasible stack for an admissible ordering.
    pub fn anchor(&self, sigma: &Permutation) -> ProbStack {
        self.report
            .anchor(sigma)
            .cloned()
            .unwrap_or_else(|| ProbStack::uniform(self.projections(sigma)))
    }
}
