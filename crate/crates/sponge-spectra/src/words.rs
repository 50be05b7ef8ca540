//! Eventually periodic symbol sequences.
//!
//! Every computation in this crate needs only finitely many symbols of a
//! word, and eventual periodicity keeps stopping times computable for every
//! scale.

/// An infinite word `preperiod . period period period …` over the map
/// indices of a system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicWord {
    preperiod: Vec<usize>,
    period: Vec<usize>,
}

impl PeriodicWord {
    pub fn new(preperiod: Vec<usize>, period: Vec<usize>) -> Self {
        assert!(!period.is_empty(), "period must be non-empty");
        PeriodicWord { preperiod, period }
    }

    /// The constant word `i i i …`.
    pub fn constant(i: usize) -> Self {
        PeriodicWord::new(Vec::new(), vec![i])
    }

    /// Purely periodic word with the given block.
    pub fn cycle(block: Vec<usize>) -> Self {
        PeriodicWord::new(Vec::new(), block)
    }

    /// Symbol at (1-based) position `l`.
    pub fn symbol(&self, l: usize) -> usize {
        assert!(l >= 1);
        let k = l - 1;
        if k < self.preperiod.len() {
            self.preperiod[k]
        } else {
            self.period[(k - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn max_symbol(&self) -> usize {
        self.preperiod
            .iter()
            .chain(self.period.iter())
            .copied()
            .max()
            .unwrap()
    }

    pub fn symbols(&self) -> impl Iterator<Item = usize> + '_ {
        (1..).map(move |l| self.symbol(l))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_wraps_the_period() {
        let w = PeriodicWord::new(vec![7], vec![1, 2, 3]);
        let head: Vec<usize> = (1..=8).map(|l| w.symbol(l)).collect();
        assert_eq!(head, vec![7, 1, 2, 3, 1, 2, 3, 1]);
    }

    #[test]
    fn constant_word() {
        let w = PeriodicWord::constant(4);
        assert!(w.symbols().take(10).all(|s| s == 4));
    }
}
