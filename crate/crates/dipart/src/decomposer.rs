//! Top-level counting strategy.
//!
//! [`count`] computes the exact number of nonnegative integer solutions of
//! `D x = s` by recursion:
//!
//! 1. no columns: 1 iff the target is zero;
//! 2. one column: 1 iff the target is an exact nonnegative multiple of it;
//! 3. any collinear class of two or more columns: convolve a scalar
//!    partition over the class multipliers with the count over the rest;
//! 4. otherwise one contribution per column under second-row elimination —
//!    columns with a zero second-row entry contribute nothing, columns
//!    meeting the classic conditions contribute a single term, everything
//!    else goes through the generalized weighted sum.

use std::fmt;

use crate::coeffs::{coeff_table_direct_capped, CoeffError, DEFAULT_KVECTOR_CAP};
use crate::matrix::{
    gcd, validate, AugmentedMatrix, Column, Count, GeneratorMatrix, SignedCount, Target,
    ValidatedMatrix,
};
use crate::oracle::BudgetError;
use crate::reduction::{bar_term_with, classic_term, BarError, ClassicError, Reduction};
use crate::spf::SpfCache;

/// A maximal set of mutually parallel columns: every member equals its
/// positive multiplier times the shared primitive direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollinearClass {
    pub direction: Column,
    /// `(column index, multiplier)` pairs in column order.
    pub members: Vec<(usize, i64)>,
}

impl CollinearClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StrategyMode {
    /// Route each column to the cheapest applicable method.
    #[default]
    Auto,
    /// Force the classic single-term reduction; errors where inapplicable.
    Classic,
    /// Force the generalized weighted sums for every column.
    General,
    /// Bypass reductions entirely and enumerate.
    Oracle,
}

impl StrategyMode {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyMode::Auto => "auto",
            StrategyMode::Classic => "classic",
            StrategyMode::General => "general",
            StrategyMode::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Strategy {
    pub mode: StrategyMode,
    /// Evaluate classic terms even when the eliminated-row entry fails the
    /// per-target condition (experimental; correctness not guaranteed).
    pub classic_override_rho_condition: bool,
}

/// Resource limits threaded through a counting run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Cap on exponent-vector enumeration per coefficient table.
    pub kvector_cap: u64,
    /// Node cap for the oracle strategy; `None` means unlimited.
    pub oracle_budget: Option<u64>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            kvector_cap: DEFAULT_KVECTOR_CAP,
            oracle_budget: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CountError {
    Classic(ClassicError),
    Bar(BarError),
    Coeff(CoeffError),
    OracleBudget(BudgetError),
    /// A full-matrix reduction summed to a negative value, which a count
    /// never is; this signals an algorithmic bug, not bad input.
    InternalNegative {
        target: Target,
        value: SignedCount,
    },
}

impl fmt::Display for CountError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountError::Classic(e) => write!(f, "classic reduction: {e}"),
            CountError::Bar(e) => write!(f, "generalized reduction: {e}"),
            CountError::Coeff(e) => write!(f, "coefficient table: {e}"),
            CountError::OracleBudget(e) => e.fmt(f),
            CountError::InternalNegative { target, value } => write!(
                f,
                "internal error: reduction at target {target} evaluated to {value}"
            ),
        }
    }
}

impl std::error::Error for CountError {}

impl From<ClassicError> for CountError {
    fn from(e: ClassicError) -> Self {
        CountError::Classic(e)
    }
}

impl From<BarError> for CountError {
    fn from(e: BarError) -> Self {
        CountError::Bar(e)
    }
}

impl From<CoeffError> for CountError {
    fn from(e: CoeffError) -> Self {
        CountError::Coeff(e)
    }
}

/// Partition the columns into collinear classes by primitive direction,
/// preserving first-appearance order. Singleton classes are allowed.
pub fn collinear_classes(matrix: &GeneratorMatrix) -> Vec<CollinearClass> {
    let mut classes: Vec<CollinearClass> = Vec::new();
    for (i, col) in matrix.columns().iter().enumerate() {
        let (dir, mult) = col.primitive();
        match classes.iter_mut().find(|c| c.direction == dir) {
            Some(class) => class.members.push((i, mult)),
            None => classes.push(CollinearClass {
                direction: dir,
                members: vec![(i, mult)],
            }),
        }
    }
    classes
}

pub(crate) fn single_column_hit(target: Target, col: Column) -> bool {
    let (r, rho) = (target.r, target.rho);
    if col.b == 0 {
        r == 0 && rho % col.beta == 0
    } else if col.beta == 0 {
        rho == 0 && r % col.b == 0
    } else {
        r % col.b == 0 && rho % col.beta == 0 && r / col.b == rho / col.beta
    }
}

/// Result of a detailed counting run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub count: Count,
    /// Number of scalar-partition evaluations performed.
    pub terms_evaluated: u64,
    pub method: &'static str,
}

/// Exact solution count under the given strategy with default limits.
pub fn count(aug: &ValidatedMatrix, strategy: &Strategy) -> Result<Count, CountError> {
    count_detailed(aug, strategy, Limits::default()).map(|r| r.count)
}

pub fn count_detailed(
    aug: &ValidatedMatrix,
    strategy: &Strategy,
    limits: Limits,
) -> Result<CountReport, CountError> {
    if strategy.mode == StrategyMode::Oracle {
        let count = match limits.oracle_budget {
            None => crate::oracle::vpf_bruteforce(aug),
            Some(budget) => crate::oracle::vpf_bruteforce_budgeted(aug, budget)
                .map_err(CountError::OracleBudget)?,
        };
        return Ok(CountReport {
            count,
            terms_evaluated: 0,
            method: "oracle",
        });
    }
    let mut cache = SpfCache::new();
    let mut terms = 0u64;
    let count = count_rec(
        aug.target(),
        aug.columns(),
        strategy,
        limits,
        &mut cache,
        &mut terms,
    )?;
    Ok(CountReport {
        count,
        terms_evaluated: terms,
        method: strategy.mode.name(),
    })
}

fn count_rec(
    target: Target,
    cols: &[Column],
    strategy: &Strategy,
    limits: Limits,
    cache: &mut SpfCache,
    terms: &mut u64,
) -> Result<Count, CountError> {
    debug_assert!(target.r >= 0 && target.rho >= 0);
    if cols.is_empty() {
        *terms += 1;
        return Ok(if target.r == 0 && target.rho == 0 {
            Count::one()
        } else {
            Count::zero()
        });
    }
    if cols.len() == 1 {
        *terms += 1;
        return Ok(if single_column_hit(target, cols[0]) {
            Count::one()
        } else {
            Count::zero()
        });
    }

    // prefer eliminating the row with fewer zero entries (mirror logic);
    // swapping rows leaves the solution set unchanged
    let zeros_second = cols.iter().filter(|c| c.beta == 0).count();
    let zeros_first = cols.iter().filter(|c| c.b == 0).count();
    if zeros_second >= 2 && zeros_first <= 1 {
        let swapped: Vec<Column> = cols.iter().map(|c| c.swapped()).collect();
        return count_rec(target.swapped(), &swapped, strategy, limits, cache, terms);
    }

    let matrix = GeneratorMatrix::new(cols.to_vec());
    let classes = collinear_classes(&matrix);
    if let Some(class) = classes.iter().find(|c| c.len() >= 2) {
        return convolution_rec(target, cols, class, strategy, limits, cache, terms);
    }

    let aug = validate(AugmentedMatrix::new(target, matrix.clone()))
        .expect("recursion preserves validity");
    let mut total = SignedCount::zero();
    for (i, col) in cols.iter().enumerate() {
        if col.beta == 0 {
            continue; // vanishing contribution under second-row elimination
        }
        let coprime = gcd(col.b, col.beta) == 1;
        let classic_shape = coprime && (col.b > 0 || col.beta == 1);
        let rho_ok = col.beta < target.rho + 2 || strategy.classic_override_rho_condition;
        let use_classic = match strategy.mode {
            StrategyMode::Classic => true,
            StrategyMode::General => false,
            _ => classic_shape && rho_ok,
        };
        if use_classic {
            let term = classic_term(&aug, i, strategy.classic_override_rho_condition)?;
            total += &term.evaluate_with(cache);
            *terms += 1;
        } else {
            let table = coeff_table_direct_capped(&matrix, i, limits.kvector_cap)?;
            total += &bar_term_with(&aug, i, &table, cache)?;
            *terms += table.row(target.rho % col.beta).count() as u64;
        }
    }
    match total.to_count() {
        Some(count) => Ok(count),
        None => Err(CountError::InternalNegative {
            target,
            value: total,
        }),
    }
}

fn convolution_rec(
    target: Target,
    cols: &[Column],
    class: &CollinearClass,
    strategy: &Strategy,
    limits: Limits,
    cache: &mut SpfCache,
    terms: &mut u64,
) -> Result<Count, CountError> {
    let dir = class.direction;
    let multipliers: Vec<i128> = class.members.iter().map(|&(_, u)| u as i128).collect();
    let member_set: Vec<usize> = class.members.iter().map(|&(i, _)| i).collect();
    let rest: Vec<Column> = cols
        .iter()
        .enumerate()
        .filter(|(i, _)| !member_set.contains(i))
        .map(|(_, &c)| c)
        .collect();

    // a zero component of the primitive direction imposes no bound;
    // both zero is impossible for a validated column
    let mut l_max = i64::MAX;
    if dir.b > 0 {
        l_max = l_max.min(target.r / dir.b);
    }
    if dir.beta > 0 {
        l_max = l_max.min(target.rho / dir.beta);
    }

    let mut total = Count::zero();
    for l in 0..=l_max {
        let ways = cache.eval(l as i128, &multipliers);
        *terms += 1;
        if ways.is_zero() {
            continue;
        }
        let shifted = Target::new(target.r - l * dir.b, target.rho - l * dir.beta);
        let inner = count_rec(shifted, &rest, strategy, limits, cache, terms)?;
        let contribution = Count::from(ways.into_biguint() * inner.into_biguint());
        total += &contribution;
    }
    Ok(total)
}

/// Convolution count for one collinear class: sum over `l` of the number
/// of ways the class absorbs `l` copies of its direction times the count
/// of the remaining matrix at the shifted target.
pub fn convolution_count(
    aug: &ValidatedMatrix,
    class: &CollinearClass,
    strategy: &Strategy,
) -> Result<Count, CountError> {
    for &(i, u) in &class.members {
        let col = aug.columns()[i];
        assert!(
            col.b == class.direction.b * u && col.beta == class.direction.beta * u,
            "class member {} does not match its matrix column",
            i + 1
        );
    }
    let mut cache = SpfCache::new();
    let mut terms = 0u64;
    convolution_rec(
        aug.target(),
        aug.columns(),
        class,
        strategy,
        Limits::default(),
        &mut cache,
        &mut terms,
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChamberLine {
    pub column: usize,
    /// Coefficients `(beta_i, -b_i)` of the boundary `r*beta_i - b_i*rho = 0`.
    pub line: (i64, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChambersError {
    Collinear { column: usize, other: usize },
}

impl fmt::Display for ChambersError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChambersError::Collinear { column, other } => write!(
                f,
                "columns {} and {} are collinear; chamber boundaries are defined per noncollinear column set",
                column + 1,
                other + 1
            ),
        }
    }
}

impl std::error::Error for ChambersError {}

/// The chamber boundary line of every column. Purely informational: each
/// per-column term contributes only on one side of its line `L_i = 0`.
pub fn chambers(matrix: &GeneratorMatrix) -> Result<Vec<ChamberLine>, ChambersError> {
    let cols = matrix.columns();
    for i in 0..cols.len() {
        for j in (i + 1)..cols.len() {
            if crate::matrix::det2(cols[i], cols[j]) == 0 {
                return Err(ChambersError::Collinear {
                    column: i,
                    other: j,
                });
            }
        }
    }
    Ok(cols
        .iter()
        .enumerate()
        .map(|(i, c)| ChamberLine {
            column: i,
            line: (c.beta, -c.b),
        })
        .collect())
}

/// Assemble the full per-column reduction a counting run would evaluate,
/// for inspection. Collinear inputs have no per-column form.
pub fn full_reduction(
    aug: &ValidatedMatrix,
    strategy: &Strategy,
) -> Result<(Reduction, Vec<usize>), CountError> {
    let cols = aug.columns();
    let mut reduction = Reduction::default();
    let mut bar_columns = Vec::new();
    for (i, col) in cols.iter().enumerate() {
        if col.beta == 0 {
            continue;
        }
        let coprime = gcd(col.b, col.beta) == 1;
        let classic_shape = coprime && (col.b > 0 || col.beta == 1);
        let rho_ok = col.beta < aug.target().rho + 2 || strategy.classic_override_rho_condition;
        let use_classic = match strategy.mode {
            StrategyMode::Classic => true,
            StrategyMode::General => false,
            _ => classic_shape && rho_ok,
        };
        if use_classic {
            reduction.terms.push(classic_term(
                aug,
                i,
                strategy.classic_override_rho_condition,
            )?);
        } else {
            bar_columns.push(i);
        }
    }
    Ok((reduction, bar_columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::problem;
    use crate::oracle::vpf_bruteforce;

    fn auto() -> Strategy {
        Strategy::default()
    }

    #[test]
    fn collinear_classes_examples() {
        let m = GeneratorMatrix::from_rows(&[0, 0, 1], &[4, 2, 1]);
        let classes = collinear_classes(&m);
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].direction, Column::new(0, 1));
        assert_eq!(classes[0].members, vec![(0, 4), (1, 2)]);
        assert_eq!(classes[1].direction, Column::new(1, 1));
        assert_eq!(classes[1].members, vec![(2, 1)]);

        let reference = GeneratorMatrix::from_rows(&[0, 1, 1, 3], &[4, 2, 3, 1]);
        assert!(collinear_classes(&reference).iter().all(|c| c.len() == 1));

        let m = GeneratorMatrix::from_rows(&[2, 1], &[4, 2]);
        let classes = collinear_classes(&m);
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].direction, Column::new(1, 2));
        assert_eq!(classes[0].members, vec![(0, 2), (1, 1)]);
    }

    #[test]
    fn base_cases() {
        let aug = problem((0, 0), &[]).unwrap();
        assert_eq!(count(&aug, &auto()).unwrap(), Count::one());
        let aug = problem((1, 0), &[]).unwrap();
        assert_eq!(count(&aug, &auto()).unwrap(), Count::zero());

        let aug = problem((3, 3), &[(1, 1)]).unwrap();
        assert_eq!(count(&aug, &auto()).unwrap(), Count::one());
        let aug = problem((3, 4), &[(1, 1)]).unwrap();
        assert_eq!(count(&aug, &auto()).unwrap(), Count::zero());
        let aug = problem((0, 8), &[(0, 4)]).unwrap();
        assert_eq!(count(&aug, &auto()).unwrap(), Count::one());
        let aug = problem((0, 6), &[(0, 4)]).unwrap();
        assert_eq!(count(&aug, &auto()).unwrap(), Count::zero());
    }

    #[test]
    fn identity_matrix_always_counts_one() {
        for r in 0..6 {
            for rho in 0..6 {
                let aug = problem((r, rho), &[(1, 0), (0, 1)]).unwrap();
                assert_eq!(count(&aug, &auto()).unwrap(), Count::one());
            }
        }
    }

    #[test]
    fn wedge_count() {
        let aug = problem((3, 2), &[(1, 1), (2, 1)]).unwrap();
        assert_eq!(count(&aug, &auto()).unwrap(), Count::one());
    }

    #[test]
    fn reference_matrix_matches_oracle() {
        let aug = problem((12, 8), &[(0, 4), (1, 2), (1, 3), (3, 1)]).unwrap();
        assert_eq!(count(&aug, &auto()).unwrap(), vpf_bruteforce(&aug));
    }

    #[test]
    fn convolution_matches_oracle() {
        let matrix = [(0, 4), (0, 2), (1, 1)];
        for r in 0..10 {
            for rho in 0..14 {
                let aug = problem((r, rho), &matrix).unwrap();
                assert_eq!(
                    count(&aug, &auto()).unwrap(),
                    vpf_bruteforce(&aug),
                    "target ({r},{rho})"
                );
            }
        }
    }

    #[test]
    fn convolution_count_direct_call() {
        let aug = problem((2, 6), &[(0, 4), (0, 2), (1, 1)]).unwrap();
        let classes = collinear_classes(aug.matrix());
        let got = convolution_count(&aug, &classes[0], &auto()).unwrap();
        assert_eq!(got, vpf_bruteforce(&aug));

        // single-member class degenerates to substitution
        let aug = problem((4, 8), &[(1, 2), (1, 1)]).unwrap();
        let class = CollinearClass {
            direction: Column::new(1, 2),
            members: vec![(0, 1)],
        };
        let got = convolution_count(&aug, &class, &auto()).unwrap();
        assert_eq!(got, vpf_bruteforce(&aug));

        let aug = problem((0, 0), &[(0, 4), (0, 2), (1, 1)]).unwrap();
        let classes = collinear_classes(aug.matrix());
        assert_eq!(
            convolution_count(&aug, &classes[0], &auto()).unwrap(),
            Count::one()
        );
    }

    #[test]
    fn class_processing_order_is_irrelevant() {
        // two nontrivial classes; convolving either first gives the count
        let matrix = [(1, 1), (2, 2), (0, 1), (0, 3)];
        for r in 0..8 {
            for rho in 0..8 {
                let aug = problem((r, rho), &matrix).unwrap();
                let classes = collinear_classes(aug.matrix());
                assert_eq!(classes.len(), 2);
                let a = convolution_count(&aug, &classes[0], &auto()).unwrap();
                let b = convolution_count(&aug, &classes[1], &auto()).unwrap();
                assert_eq!(a, b, "target ({r},{rho})");
                assert_eq!(a, vpf_bruteforce(&aug), "target ({r},{rho})");
            }
        }
    }

    #[test]
    fn strategies_agree_where_both_admissible() {
        let matrix = [(1, 2), (1, 3), (3, 1)];
        for r in 0..10 {
            for rho in 2..10 {
                let aug = problem((r, rho), &matrix).unwrap();
                let auto_count = count(&aug, &auto()).unwrap();
                let classic = count(
                    &aug,
                    &Strategy {
                        mode: StrategyMode::Classic,
                        ..Default::default()
                    },
                )
                .unwrap();
                let general = count(
                    &aug,
                    &Strategy {
                        mode: StrategyMode::General,
                        ..Default::default()
                    },
                )
                .unwrap();
                let oracle = count(
                    &aug,
                    &Strategy {
                        mode: StrategyMode::Oracle,
                        ..Default::default()
                    },
                )
                .unwrap();
                assert_eq!(auto_count, classic);
                assert_eq!(auto_count, general);
                assert_eq!(auto_count, oracle);
            }
        }
    }

    #[test]
    fn classic_mode_reports_inapplicability() {
        let aug = problem((5, 5), &[(2, 4), (1, 1)]).unwrap();
        let err = count(
            &aug,
            &Strategy {
                mode: StrategyMode::Classic,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(
            err,
            CountError::Classic(ClassicError::NotCoprime { .. })
        ));
    }

    #[test]
    fn adding_unit_columns_never_decreases_the_count() {
        let base = [(1, 2), (2, 1)];
        let extended = [(1, 2), (2, 1), (1, 0), (0, 1)];
        for r in 0..10 {
            for rho in 0..10 {
                let a = count(&problem((r, rho), &base).unwrap(), &auto()).unwrap();
                let b = count(&problem((r, rho), &extended).unwrap(), &auto()).unwrap();
                assert!(a <= b, "target ({r},{rho})");
            }
        }
    }

    #[test]
    fn chamber_boundaries() {
        let reference = GeneratorMatrix::from_rows(&[0, 1, 1, 3], &[4, 2, 3, 1]);
        let lines = chambers(&reference).unwrap();
        let got: Vec<(i64, i64)> = lines.iter().map(|l| l.line).collect();
        assert_eq!(got, vec![(4, 0), (2, -1), (3, -1), (1, -3)]);

        let m = GeneratorMatrix::from_rows(&[1, 0], &[0, 1]);
        let got: Vec<(i64, i64)> = chambers(&m).unwrap().iter().map(|l| l.line).collect();
        assert_eq!(got, vec![(0, -1), (1, 0)]);

        let m = GeneratorMatrix::from_rows(&[1], &[1]);
        let got: Vec<(i64, i64)> = chambers(&m).unwrap().iter().map(|l| l.line).collect();
        assert_eq!(got, vec![(1, -1)]);

        let m = GeneratorMatrix::from_rows(&[1, 2], &[2, 4]);
        assert_eq!(
            chambers(&m),
            Err(ChambersError::Collinear {
                column: 0,
                other: 1
            })
        );
    }

    #[test]
    fn double_zero_rows_route_through_convolutions() {
        // both rows contain two zeros: nothing but convolution applies
        let matrix = [(1, 0), (2, 0), (0, 1), (0, 3), (1, 1)];
        for r in 0..9 {
            for rho in 0..9 {
                let aug = problem((r, rho), &matrix).unwrap();
                assert_eq!(
                    count(&aug, &auto()).unwrap(),
                    vpf_bruteforce(&aug),
                    "target ({r},{rho})"
                );
            }
        }
    }

    #[test]
    fn report_counts_term_evaluations() {
        let aug = problem((10, 10), &[(1, 2), (1, 3), (3, 1)]).unwrap();
        let report = count_detailed(&aug, &auto(), Limits::default()).unwrap();
        assert_eq!(report.method, "auto");
        assert_eq!(report.terms_evaluated, 3);
        assert!(!report.count.is_zero());
    }
}
