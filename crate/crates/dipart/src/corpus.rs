//! Deterministic random problem generation for verification corpora.
//!
//! A small hand-rolled generator is used instead of an external RNG so that
//! seeded corpora are stable across toolchain and dependency upgrades.

use crate::matrix::{gcd, Column, GeneratorMatrix};

/// SplitMix64: tiny, seedable, and stable. Not for cryptography.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish value in `0..n`. Modulo bias is irrelevant at corpus scale.
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }

    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}

/// Any valid matrix: nonzero columns with entries in `0..=entry_max`.
pub fn random_matrix(rng: &mut SplitMix64, m_max: usize, entry_max: i64) -> GeneratorMatrix {
    let m = 1 + rng.below(m_max as u64) as usize;
    let mut cols = Vec::with_capacity(m);
    while cols.len() < m {
        let c = Column::new(rng.range_i64(0, entry_max), rng.range_i64(0, entry_max));
        if !c.is_zero() {
            cols.push(c);
        }
    }
    GeneratorMatrix::new(cols)
}

/// A matrix satisfying the classic structural conditions: strictly positive
/// entries, coprime columns, pairwise distinct directions.
pub fn random_classic_matrix(
    rng: &mut SplitMix64,
    m_max: usize,
    entry_max: i64,
) -> GeneratorMatrix {
    let m = 2 + rng.below((m_max - 1) as u64) as usize;
    let mut cols: Vec<Column> = Vec::with_capacity(m);
    while cols.len() < m {
        let c = Column::new(rng.range_i64(1, entry_max), rng.range_i64(1, entry_max));
        if c.gcd() != 1 {
            continue;
        }
        if cols.iter().any(|&other| crate::matrix::det2(other, c) == 0) {
            continue;
        }
        cols.push(c);
    }
    GeneratorMatrix::new(cols)
}

/// The structured special cases exercised by the verification corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialCase {
    /// At least one column whose entries share a factor.
    SharedFactorColumn,
    /// A `{0, beta > 1}` column.
    ZeroFirstRowColumn,
    /// A `{b > 0, 0}` column.
    ZeroSecondRowColumn,
    /// At least two collinear columns.
    CollinearColumns,
    /// At least two zeros in each row.
    DoubleZeroRows,
}

impl SpecialCase {
    pub const ALL: [SpecialCase; 5] = [
        SpecialCase::SharedFactorColumn,
        SpecialCase::ZeroFirstRowColumn,
        SpecialCase::ZeroSecondRowColumn,
        SpecialCase::CollinearColumns,
        SpecialCase::DoubleZeroRows,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SpecialCase::SharedFactorColumn => "shared-factor column",
            SpecialCase::ZeroFirstRowColumn => "zero first-row column",
            SpecialCase::ZeroSecondRowColumn => "zero second-row column",
            SpecialCase::CollinearColumns => "collinear columns",
            SpecialCase::DoubleZeroRows => "two zeros in each row",
        }
    }
}

/// A random matrix containing the requested structure, with entries bounded
/// by `entry_max`.
pub fn random_special_matrix(
    rng: &mut SplitMix64,
    case: SpecialCase,
    entry_max: i64,
) -> GeneratorMatrix {
    let mut cols: Vec<Column> = Vec::new();
    let base = 1 + rng.below(2) as usize;
    for _ in 0..base {
        loop {
            let c = Column::new(rng.range_i64(0, entry_max), rng.range_i64(0, entry_max));
            if !c.is_zero() {
                cols.push(c);
                break;
            }
        }
    }
    match case {
        SpecialCase::SharedFactorColumn => {
            let g = rng.range_i64(2, 3);
            let mut b = rng.range_i64(0, entry_max / g);
            let mut beta = rng.range_i64(0, entry_max / g);
            if b == 0 && beta == 0 {
                b = 1;
            }
            // keep the factor meaningful even after reduction
            if gcd(b, beta) > 1 {
                beta = 1;
            }
            cols.push(Column::new(g * b, g * beta));
        }
        SpecialCase::ZeroFirstRowColumn => {
            cols.push(Column::new(0, rng.range_i64(2, entry_max.max(2))));
        }
        SpecialCase::ZeroSecondRowColumn => {
            cols.push(Column::new(rng.range_i64(1, entry_max), 0));
        }
        SpecialCase::CollinearColumns => {
            let dir = loop {
                let c = Column::new(rng.range_i64(0, 2), rng.range_i64(0, 2));
                if !c.is_zero() {
                    break c;
                }
            };
            let u1 = rng.range_i64(1, 3);
            let u2 = rng.range_i64(1, 3);
            cols.push(Column::new(dir.b * u1, dir.beta * u1));
            cols.push(Column::new(dir.b * u2, dir.beta * u2));
        }
        SpecialCase::DoubleZeroRows => {
            cols.clear();
            cols.push(Column::new(rng.range_i64(1, entry_max), 0));
            cols.push(Column::new(rng.range_i64(1, entry_max), 0));
            cols.push(Column::new(0, rng.range_i64(1, entry_max)));
            cols.push(Column::new(0, rng.range_i64(1, entry_max)));
            if rng.below(2) == 1 {
                cols.push(Column::new(
                    rng.range_i64(1, entry_max),
                    rng.range_i64(1, entry_max),
                ));
            }
        }
    }
    // shuffle so the injected structure is not always trailing
    for i in (1..cols.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        cols.swap(i, j);
    }
    GeneratorMatrix::new(cols)
}
