//! Built-in systems used by the test suite, the documentation and the CLI's
//! reference examples.

use crate::exact::Exact;
use crate::ifs::{DiagonalMap, SpongeIfs};

/// Two maps, all ratios 1/2, at opposite corners of the unit square.
/// A self-similar set of dimension 1.
pub fn self_similar() -> SpongeIfs {
    let maps = vec![
        DiagonalMap::from_ratios(&[(1, 2), (1, 2)], &[(0, 1), (0, 1)]),
        DiagonalMap::from_ratios(&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]),
    ];
    SpongeIfs::new(2, maps).unwrap()
}

pub fn baranski_planar_maps() -> &'static [DiagonalMap] {
    use std::sync::OnceLock;
    static MAPS: OnceLock<Vec<DiagonalMap>> = OnceLock::new();
    MAPS.get_or_init(|| {
        vec![
            DiagonalMap::from_ratios(&[(1, 2), (1, 4)], &[(0, 1), (0, 1)]),
            DiagonalMap::from_ratios(&[(1, 4), (1, 2)], &[(3, 4), (1, 2)]),
        ]
    })
}

/// The planar carpet with ratio pairs (1/2, 1/4) and (1/4, 1/2): the two maps
/// swap their strong and weak directions, so both coordinate orderings occur.
pub fn baranski_planar() -> SpongeIfs {
    SpongeIfs::new(2, baranski_planar_maps().to_vec()).unwrap()
}

/// Three maps on a 2x3 grid (ratios 1/2, 1/3): cells (0,0), (0,2), (1,1).
/// Column 0 holds two maps, column 1 holds one.
pub fn bedford_mcmullen() -> SpongeIfs {
    let maps = vec![
        DiagonalMap::from_ratios(&[(1, 2), (1, 3)], &[(0, 1), (0, 1)]),
        DiagonalMap::from_ratios(&[(1, 2), (1, 3)], &[(0, 1), (2, 3)]),
        DiagonalMap::from_ratios(&[(1, 2), (1, 3)], &[(1, 2), (1, 3)]),
    ];
    SpongeIfs::new(2, maps).unwrap()
}

/// A planar carpet with a single admissible ordering (x always contracts
/// slowest) and non-equal ratios: two maps stacked in the left column plus
/// one free-standing map.
pub fn lalley_gatzouras() -> SpongeIfs {
    let maps = vec![
        DiagonalMap::from_ratios(&[(1, 2), (1, 4)], &[(0, 1), (0, 1)]),
        DiagonalMap::from_ratios(&[(1, 2), (1, 3)], &[(0, 1), (1, 2)]),
        DiagonalMap::from_ratios(&[(3, 10), (1, 5)], &[(3, 5), (7, 10)]),
    ];
    SpongeIfs::new(2, maps).unwrap()
}

/// Three-dimensional sponge with `n` maps stacked along z in the column
/// `[0,a] x [0,b]` plus one map with ratios `(c, 1-b)` in the opposite
/// corner. Requires `1/n < c < b < a < 1-b` and `a + c < 1`.
pub fn fraser_jurga(n: usize, a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> SpongeIfs {
    assert!(n >= 2);
    let (an, ad) = a;
    let (bn, bd) = b;
    let (cn, cd) = c;
    let mut maps = Vec::with_capacity(n + 1);
    for i in 0..n {
        maps.push(DiagonalMap::new(
            vec![
                Exact::ratio(an, ad),
                Exact::ratio(bn, bd),
                Exact::ratio(1, n as i64),
            ],
            vec![
                Exact::zero(),
                Exact::zero(),
                Exact::ratio(i as i64, n as i64),
            ],
        ));
    }
    maps.push(DiagonalMap::new(
        vec![
            Exact::ratio(cn, cd),
            Exact::ratio(bd - bn, bd),
            Exact::ratio(1, n as i64),
        ],
        vec![
            Exact::ratio(cd - cn, cd),
            Exact::ratio(bn, bd),
            Exact::zero(),
        ],
    ));
    SpongeIfs::new(3, maps).unwrap()
}

/// 2^d maps with all ratios 1/2 at the corners: the attractor is the cube.
pub fn cube_filling(d: usize) -> SpongeIfs {
    let mut maps = Vec::with_capacity(1 << d);
    for corner in 0..(1u32 << d) {
        let diag = vec![Exact::ratio(1, 2); d];
        let trans = (0..d)
            .map(|n| {
                if corner & (1 << n) != 0 {
                    Exact::ratio(1, 2)
                } else {
                    Exact::zero()
                }
            })
            .collect();
        maps.push(DiagonalMap::new(diag, trans));
    }
    SpongeIfs::new(d, maps).unwrap()
}
