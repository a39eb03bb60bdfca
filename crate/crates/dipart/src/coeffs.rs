//! Expansion coefficients `a[i, j_x, j_y]` of the generalized reduction.
//!
//! Eliminating one row against column `i` multiplies the remaining factors
//! into a finite product of geometric sums; expanding that product over all
//! exponent vectors `K'` with `0 <= k_j <= beta_i - 1` and splitting each
//! exponent into integer and fractional parts yields the coefficients
//!
//! `j_x = K'.b' - b_i * floor(K'.beta' / beta_i)`,
//! `j_y = (K'.beta') mod beta_i`.
//!
//! Two independent computations are provided:
//!
//! - [`coeff_table_direct`]: enumerate all `beta_i^(m-1)` exponent vectors
//!   and tally.
//! - [`coeff_table_recursive`]: the recursive matrix-reduction scheme, which
//!   counts each coefficient as an alternating sum of smaller two-row
//!   counting problems solved by a pluggable inner solver.
//!
//! The total coefficient mass is always `beta_i^(m-1)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::matrix::{validate, AugmentedMatrix, Column, Count, GeneratorMatrix, Target};

/// Default cap on the number of exponent vectors (and inner subproblems)
/// one table build may enumerate. Growth is exponential in the column
/// count, and the artifact is desk-scale.
pub const DEFAULT_KVECTOR_CAP: u64 = 10_000_000;

/// The expansion coefficients for one column, stored sparsely.
///
/// Keys satisfy `n_minus <= j_x <= n_plus` and `0 <= j_y < modulus`;
/// `j_x` may be negative when the column's first-row entry is positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTable {
    /// Column the table was built for (zero-based).
    pub column: usize,
    /// The column's second-row entry `beta_i`.
    pub modulus: i64,
    /// First-row entries of the other columns, in order.
    pub b_prime: Vec<i64>,
    /// Second-row entries of the other columns, in order.
    pub beta_prime: Vec<i64>,
    /// Least `j_x` with a nonzero coefficient (0 for an empty product).
    pub n_minus: i128,
    /// Upper bound `(modulus - 1) * sum(b_prime)`.
    pub n_plus: i128,
    // keyed (j_y, j_x) so one residue row is a contiguous range
    entries: BTreeMap<(i64, i128), u64>,
}

impl CoeffTable {
    pub fn get(&self, j_x: i128, j_y: i64) -> u64 {
        self.entries.get(&(j_y, j_x)).copied().unwrap_or(0)
    }

    /// Nonzero entries of one residue row, in increasing `j_x`.
    pub fn row(&self, j_y: i64) -> impl Iterator<Item = (i128, u64)> + '_ {
        self.entries
            .range((j_y, i128::MIN)..=(j_y, i128::MAX))
            .map(|(&(_, j_x), &a)| (j_x, a))
    }

    /// All nonzero entries as `((j_x, j_y), a)`.
    pub fn entries(&self) -> impl Iterator<Item = ((i128, i64), u64)> + '_ {
        self.entries.iter().map(|(&(j_y, j_x), &a)| ((j_x, j_y), a))
    }

    /// Sum of all coefficients; equals `modulus^(m-1)` for a correct table.
    pub fn total_mass(&self) -> u128 {
        self.entries.values().map(|&a| a as u128).sum()
    }

    /// Whether the table was built for column `i` of exactly this matrix.
    pub fn matches(&self, matrix: &GeneratorMatrix, i: usize) -> bool {
        if self.column != i || i >= matrix.len() || matrix.column(i).beta != self.modulus {
            return false;
        }
        let others: Vec<Column> = matrix
            .columns()
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &c)| c)
            .collect();
        others.len() == self.b_prime.len()
            && others
                .iter()
                .zip(self.b_prime.iter().zip(&self.beta_prime))
                .all(|(c, (&b, &beta))| c.b == b && c.beta == beta)
    }

    /// First cell where the two tables disagree, if any.
    pub fn first_disagreement(&self, other: &CoeffTable) -> Option<(i128, i64, u64, u64)> {
        let keys: std::collections::BTreeSet<(i64, i128)> = self
            .entries
            .keys()
            .chain(other.entries.keys())
            .copied()
            .collect();
        for (j_y, j_x) in keys {
            let a = self.get(j_x, j_y);
            let b = other.get(j_x, j_y);
            if a != b {
                return Some((j_x, j_y, a, b));
            }
        }
        None
    }
}

/// Bounds of the coefficient support for one column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub n_minus: i128,
    pub n_plus: i128,
    /// `(beta_i - 1) * sum(beta_prime)`, the largest reachable `K'.beta'`.
    pub b: i128,
}

/// The residue-row iteration bound: for row `j_y` the quotient
/// `t = (K'.beta' - j_y) / modulus` ranges over `0..=t_max(j_y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TBound {
    pub b: i128,
    pub modulus: i64,
}

impl TBound {
    /// Floor of `(b - j_y) / modulus`; negative when the row is empty.
    pub fn t_max(&self, j_y: i64) -> i128 {
        (self.b - j_y as i128).div_euclid(self.modulus as i128)
    }
}

/// Inner solver used by the recursive coefficient computation. The
/// subproblems are ordinary two-row counting problems over the remaining
/// columns; the classic route applies the per-target admissibility
/// override since subproblem targets are arbitrary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InnerSolver {
    #[default]
    Oracle,
    Classic,
    Dispatcher,
}

impl InnerSolver {
    pub fn name(&self) -> &'static str {
        match self {
            InnerSolver::Oracle => "oracle",
            InnerSolver::Classic => "classic",
            InnerSolver::Dispatcher => "dispatcher",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffError {
    /// The enumeration would exceed the configured cap.
    Budget {
        required: u128,
        cap: u64,
    },
    /// The chosen column has a zero second-row entry, so no residue
    /// expansion exists for it.
    BetaZero {
        column: usize,
    },
    ColumnOutOfRange {
        column: usize,
        len: usize,
    },
    /// The inner solver failed on one subproblem.
    InnerSolver {
        column: usize,
        target: (i128, i128),
        message: String,
    },
    /// The alternating sum produced a negative or oversized coefficient;
    /// this indicates an incorrect inner solver.
    BadCoefficient {
        j_x: i128,
        j_y: i64,
        value: String,
    },
}

impl fmt::Display for CoeffError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffError::Budget { required, cap } => {
                write!(f, "enumeration of {required} vectors exceeds cap {cap}")
            }
            CoeffError::BetaZero { column } => {
                write!(f, "column {} has zero second-row entry", column + 1)
            }
            CoeffError::ColumnOutOfRange { column, len } => {
                write!(f, "column {} out of range (matrix has {len})", column + 1)
            }
            CoeffError::InnerSolver {
                column,
                target,
                message,
            } => write!(
                f,
                "inner solver failed for column {} at subproblem target ({}, {}): {}",
                column + 1,
                target.0,
                target.1,
                message
            ),
            CoeffError::BadCoefficient { j_x, j_y, value } => {
                write!(f, "coefficient at ({j_x}, {j_y}) came out as {value}")
            }
        }
    }
}

impl std::error::Error for CoeffError {}

fn split_column(matrix: &GeneratorMatrix, i: usize) -> Result<(Column, Vec<Column>), CoeffError> {
    if i >= matrix.len() {
        return Err(CoeffError::ColumnOutOfRange {
            column: i,
            len: matrix.len(),
        });
    }
    let ci = matrix.column(i);
    if ci.beta < 1 {
        return Err(CoeffError::BetaZero { column: i });
    }
    let others = matrix
        .columns()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &c)| c)
        .collect();
    Ok((ci, others))
}

fn kvector_count(beta: i64, len: usize) -> u128 {
    (beta as u128).checked_pow(len as u32).unwrap_or(u128::MAX)
}

/// Build the coefficient table for column `i` by enumerating all
/// `beta_i^(m-1)` exponent vectors, with the default enumeration cap.
pub fn coeff_table_direct(matrix: &GeneratorMatrix, i: usize) -> Result<CoeffTable, CoeffError> {
    coeff_table_direct_capped(matrix, i, DEFAULT_KVECTOR_CAP)
}

pub fn coeff_table_direct_capped(
    matrix: &GeneratorMatrix,
    i: usize,
    cap: u64,
) -> Result<CoeffTable, CoeffError> {
    let (ci, others) = split_column(matrix, i)?;
    let beta = ci.beta;
    let total = kvector_count(beta, others.len());
    if total > cap as u128 {
        return Err(CoeffError::Budget {
            required: total,
            cap,
        });
    }

    let b_prime: Vec<i64> = others.iter().map(|c| c.b).collect();
    let beta_prime: Vec<i64> = others.iter().map(|c| c.beta).collect();
    let bi = ci.b as i128;
    let beta_w = beta as i128;

    let mut entries: BTreeMap<(i64, i128), u64> = BTreeMap::new();
    let mut n_minus = i128::MAX;
    // odometer over K' in [0, beta-1]^(m-1); the empty vector still
    // contributes the single constant term
    let mut k = vec![0i64; others.len()];
    loop {
        let dot_b: i128 = k
            .iter()
            .zip(&b_prime)
            .map(|(&kj, &bj)| kj as i128 * bj as i128)
            .sum();
        let dot_beta: i128 = k
            .iter()
            .zip(&beta_prime)
            .map(|(&kj, &bj)| kj as i128 * bj as i128)
            .sum();
        let j_x = dot_b - bi * (dot_beta / beta_w);
        let j_y = (dot_beta % beta_w) as i64;
        *entries.entry((j_y, j_x)).or_insert(0) += 1;
        n_minus = n_minus.min(j_x);

        let mut pos = 0;
        loop {
            if pos == k.len() {
                break;
            }
            k[pos] += 1;
            if k[pos] < beta {
                break;
            }
            k[pos] = 0;
            pos += 1;
        }
        if pos == k.len() {
            break;
        }
    }

    let n_plus = (beta_w - 1) * b_prime.iter().map(|&b| b as i128).sum::<i128>();
    let table = CoeffTable {
        column: i,
        modulus: beta,
        b_prime,
        beta_prime,
        n_minus: if n_minus == i128::MAX { 0 } else { n_minus },
        n_plus,
        entries,
    };
    debug_assert_eq!(table.total_mass(), total, "coefficient mass identity");
    Ok(table)
}

/// Support bounds for column `i`: the closed-form `n_plus` and `b`, and the
/// enumerated `n_minus` (0 whenever `b_i = 0`, since nothing is subtracted).
pub fn coeff_bounds(matrix: &GeneratorMatrix, i: usize) -> Result<Bounds, CoeffError> {
    let (ci, others) = split_column(matrix, i)?;
    let beta = ci.beta as i128;
    let n_plus = (beta - 1) * others.iter().map(|c| c.b as i128).sum::<i128>();
    let b = (beta - 1) * others.iter().map(|c| c.beta as i128).sum::<i128>();
    let n_minus = if ci.b == 0 {
        0
    } else {
        coeff_table_direct(matrix, i)?.n_minus
    };
    Ok(Bounds { n_minus, n_plus, b })
}

/// Per-subset target offsets of the recursive computation, indexed by the
/// binary vector read most-significant-bit first: entry `v` is
/// `beta_i * sum_k i_k * c_(m+1-k)` over the bits of `v`.
pub(crate) fn recursion_offsets(matrix: &GeneratorMatrix, i: usize) -> Vec<(i128, i128)> {
    let (ci, others) = split_column(matrix, i).expect("valid column");
    let beta = ci.beta as i128;
    let rev: Vec<Column> = others.iter().rev().copied().collect();
    let bits = rev.len();
    (0..(1u32 << bits))
        .map(|v| {
            let mut dx = 0i128;
            let mut dy = 0i128;
            for (k, c) in rev.iter().enumerate() {
                if (v >> (bits - 1 - k)) & 1 == 1 {
                    dx += beta * c.b as i128;
                    dy += beta * c.beta as i128;
                }
            }
            (dx, dy)
        })
        .collect()
}

/// Build the coefficient table for column `i` by the recursive
/// matrix-reduction scheme: each coefficient is
///
/// `sum_t sum_subsets (-1)^|subset| W(target(t) - offset(subset), D_rest)`
///
/// over `t = 0..=t_max(j_y)` with `target(t) = (j_x + b_i t, j_y + beta_i t)`.
/// Subproblems with a negative target component count zero. Results agree
/// with [`coeff_table_direct`] cell by cell.
pub fn coeff_table_recursive(
    matrix: &GeneratorMatrix,
    i: usize,
    solver: InnerSolver,
) -> Result<CoeffTable, CoeffError> {
    coeff_table_recursive_capped(matrix, i, solver, DEFAULT_KVECTOR_CAP)
}

pub fn coeff_table_recursive_capped(
    matrix: &GeneratorMatrix,
    i: usize,
    solver: InnerSolver,
    cap: u64,
) -> Result<CoeffTable, CoeffError> {
    let (ci, others) = split_column(matrix, i)?;
    let beta = ci.beta as i128;
    let bi = ci.b as i128;
    let b_prime: Vec<i64> = others.iter().map(|c| c.b).collect();
    let beta_prime: Vec<i64> = others.iter().map(|c| c.beta).collect();

    let n_plus = (beta - 1) * b_prime.iter().map(|&b| b as i128).sum::<i128>();
    let tb = TBound {
        b: (beta - 1) * beta_prime.iter().map(|&b| b as i128).sum::<i128>(),
        modulus: ci.beta,
    };
    // j_x = K'.b' - b_i * floor(K'.beta' / beta) >= -b_i * floor(B / beta)
    let lo = -bi * (tb.b / beta);

    let offsets = recursion_offsets(matrix, i);
    let span = (n_plus - lo + 1) as u128;
    let work = span
        .saturating_mul(beta as u128)
        .saturating_mul((tb.b / beta + 1) as u128)
        .saturating_mul(offsets.len() as u128);
    if work > cap as u128 {
        return Err(CoeffError::Budget {
            required: work,
            cap,
        });
    }

    let rest = GeneratorMatrix::new(others.clone());
    let mut memo: HashMap<(i128, i128), Result<Count, String>> = HashMap::new();
    let mut solve = |sx: i128, sy: i128| -> Result<BigInt, CoeffError> {
        if sx < 0 || sy < 0 {
            return Ok(BigInt::zero());
        }
        let outcome = memo
            .entry((sx, sy))
            .or_insert_with(|| inner_solve(solver, sx, sy, &rest))
            .clone();
        match outcome {
            Ok(count) => Ok(BigInt::from(count.into_biguint())),
            Err(message) => Err(CoeffError::InnerSolver {
                column: i,
                target: (sx, sy),
                message,
            }),
        }
    };

    let mut entries: BTreeMap<(i64, i128), u64> = BTreeMap::new();
    let mut n_minus = i128::MAX;
    for j_y in 0..ci.beta {
        let t_max = tb.t_max(j_y);
        for j_x in lo..=n_plus {
            let mut acc = BigInt::zero();
            for t in 0..=t_max {
                let sx = j_x + bi * t;
                let sy = j_y as i128 + beta * t;
                for (v, &(dx, dy)) in offsets.iter().enumerate() {
                    let w = solve(sx - dx, sy - dy)?;
                    if v.count_ones() % 2 == 0 {
                        acc += w;
                    } else {
                        acc -= w;
                    }
                }
            }
            if acc.is_zero() {
                continue;
            }
            let a = if acc.is_negative() {
                None
            } else {
                acc.to_u64()
            };
            let a = a.ok_or_else(|| CoeffError::BadCoefficient {
                j_x,
                j_y,
                value: acc.to_string(),
            })?;
            entries.insert((j_y, j_x), a);
            n_minus = n_minus.min(j_x);
        }
    }

    Ok(CoeffTable {
        column: i,
        modulus: ci.beta,
        b_prime,
        beta_prime,
        n_minus: if n_minus == i128::MAX { 0 } else { n_minus },
        n_plus,
        entries,
    })
}

fn inner_solve(
    solver: InnerSolver,
    sx: i128,
    sy: i128,
    rest: &GeneratorMatrix,
) -> Result<Count, String> {
    let (r, rho) = match (i64::try_from(sx), i64::try_from(sy)) {
        (Ok(r), Ok(rho)) => (r, rho),
        _ => return Err("subproblem target exceeds machine range".to_string()),
    };
    let aug = validate(AugmentedMatrix::new(Target::new(r, rho), rest.clone()))
        .map_err(|e| e.to_string())?;
    match solver {
        InnerSolver::Oracle => Ok(crate::oracle::vpf_bruteforce(&aug)),
        InnerSolver::Dispatcher => {
            crate::decomposer::count(&aug, &crate::decomposer::Strategy::default())
                .map_err(|e| e.to_string())
        }
        InnerSolver::Classic => {
            // base cases first: one or zero columns leave nothing to
            // eliminate against
            match rest.len() {
                0 => Ok(if r == 0 && rho == 0 {
                    Count::one()
                } else {
                    Count::zero()
                }),
                1 => {
                    let hit =
                        crate::decomposer::single_column_hit(Target::new(r, rho), rest.column(0));
                    Ok(if hit { Count::one() } else { Count::zero() })
                }
                _ => {
                    let red = crate::reduction::classic_reduction(
                        &aug,
                        crate::reduction::Row::Second,
                        true,
                    )
                    .map_err(|e| e.to_string())?;
                    let value = crate::reduction::evaluate(&red, &[]);
                    value
                        .to_count()
                        .ok_or_else(|| format!("classic reduction evaluated to {value}"))
                }
            }
        }
    }
}
