//! Brute-force enumeration oracles. Everything here is deliberately plain
//! depth-first enumeration so it stays trivially auditable; the rest of the
//! crate is verified against these functions.

use std::fmt;

use crate::matrix::{Column, Count, GeneratorMatrix, SignedCount, Target, ValidatedMatrix};

/// Node-count cap for enumeration. The oracle is for desk-scale
/// verification; a budget turns pathological runs into an explicit error
/// instead of an open-ended computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetError {
    pub limit: u64,
}

impl fmt::Display for BudgetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "enumeration budget of {} nodes exceeded", self.limit)
    }
}

impl std::error::Error for BudgetError {}

struct Dfs {
    nodes_left: u64,
    limit: u64,
}

impl Dfs {
    fn tick(&mut self) -> Result<(), BudgetError> {
        if self.nodes_left == 0 {
            return Err(BudgetError { limit: self.limit });
        }
        self.nodes_left -= 1;
        Ok(())
    }
}

/// Direct nested enumeration of `sum x_i d_i = s`, `x >= 0`, `d_i >= 1`.
pub fn spf_bruteforce(s: i128, d: &[i128]) -> Count {
    assert!(d.iter().all(|&g| g >= 1), "generators must be positive");
    let mut dfs = Dfs {
        nodes_left: u64::MAX,
        limit: u64::MAX,
    };
    Count::from_u128(spf_rec(s, d, &mut dfs).expect("unlimited budget"))
}

fn spf_rec(s: i128, d: &[i128], dfs: &mut Dfs) -> Result<u128, BudgetError> {
    dfs.tick()?;
    if s < 0 {
        return Ok(0);
    }
    match d {
        [] => Ok(if s == 0 { 1 } else { 0 }),
        [g] => Ok(if s % g == 0 { 1 } else { 0 }),
        [g, rest @ ..] => {
            let mut total: u128 = 0;
            let mut remaining = s;
            loop {
                total += spf_rec(remaining, rest, dfs)?;
                remaining -= g;
                if remaining < 0 {
                    break;
                }
            }
            Ok(total)
        }
    }
}

/// Exact count of `x >= 0` with `D x = s` by depth-first enumeration.
///
/// Each variable is bounded by the minimum of `floor(s_k / c_ik)` over the
/// rows where its column is nonzero; columns are visited in order of
/// descending maximum entry so the tightest bounds come first. Termination
/// is guaranteed because every validated column has a positive entry.
pub fn vpf_bruteforce(aug: &ValidatedMatrix) -> Count {
    vpf_bruteforce_budgeted(aug, u64::MAX).expect("unlimited budget")
}

/// As [`vpf_bruteforce`] but giving up with [`BudgetError`] after visiting
/// `budget` enumeration nodes.
pub fn vpf_bruteforce_budgeted(aug: &ValidatedMatrix, budget: u64) -> Result<Count, BudgetError> {
    let mut cols: Vec<Column> = aug.columns().to_vec();
    cols.sort_by_key(|c| std::cmp::Reverse(c.b.max(c.beta)));
    let mut dfs = Dfs {
        nodes_left: budget,
        limit: budget,
    };
    let t = aug.target();
    let total = vpf_rec(t.r as i128, t.rho as i128, &cols, &mut dfs)?;
    Ok(Count::from_u128(total))
}

fn vpf_rec(r: i128, rho: i128, cols: &[Column], dfs: &mut Dfs) -> Result<u128, BudgetError> {
    dfs.tick()?;
    debug_assert!(r >= 0 && rho >= 0);
    match cols {
        [] => Ok(if r == 0 && rho == 0 { 1 } else { 0 }),
        [c] => {
            // single column: s must be an exact nonnegative multiple of c
            let (b, beta) = (c.b as i128, c.beta as i128);
            let hit = if b == 0 {
                r == 0 && rho % beta == 0
            } else if beta == 0 {
                rho == 0 && r % b == 0
            } else {
                r % b == 0 && rho % beta == 0 && r / b == rho / beta
            };
            Ok(if hit { 1 } else { 0 })
        }
        [c, rest @ ..] => {
            let (b, beta) = (c.b as i128, c.beta as i128);
            let mut bound = i128::MAX;
            if b > 0 {
                bound = bound.min(r / b);
            }
            if beta > 0 {
                bound = bound.min(rho / beta);
            }
            let mut total: u128 = 0;
            for x in 0..=bound {
                total += vpf_rec(r - x * b, rho - x * beta, rest, dfs)?;
            }
            Ok(total)
        }
    }
}

/// Outcome of one method evaluation inside a grid comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MethodResult {
    Value(SignedCount),
    Failed(String),
}

impl fmt::Display for MethodResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodResult::Value(v) => v.fmt(f),
            MethodResult::Failed(e) => write!(f, "error: {e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub target: Target,
    pub expected: Count,
    pub got: MethodResult,
    pub method: String,
}

#[derive(Clone, Debug, Default)]
pub struct GridReport {
    pub checked: u64,
    pub mismatches: Vec<Mismatch>,
}

impl GridReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compare `method` against the brute-force oracle for every target
/// `(r, rho)` in `[0, r_max] x [0, rho_max]`. Method errors become
/// per-target mismatches rather than aborting the sweep.
pub fn verify_grid(
    matrix: &GeneratorMatrix,
    r_max: i64,
    rho_max: i64,
    method_name: &str,
    mut method: impl FnMut(&ValidatedMatrix) -> Result<SignedCount, String>,
) -> GridReport {
    verify_grid_budgeted(matrix, r_max, rho_max, u64::MAX, method_name, &mut method)
        .expect("unlimited budget")
}

/// As [`verify_grid`] with a node budget shared by all oracle runs.
pub fn verify_grid_budgeted(
    matrix: &GeneratorMatrix,
    r_max: i64,
    rho_max: i64,
    budget: u64,
    method_name: &str,
    method: &mut dyn FnMut(&ValidatedMatrix) -> Result<SignedCount, String>,
) -> Result<GridReport, BudgetError> {
    let base = crate::matrix::validate(crate::matrix::AugmentedMatrix::new(
        Target::new(0, 0),
        matrix.clone(),
    ))
    .expect("verify_grid requires a valid generator matrix");
    let mut dfs = Dfs {
        nodes_left: budget,
        limit: budget,
    };
    let mut report = GridReport::default();
    let mut sorted: Vec<Column> = matrix.columns().to_vec();
    sorted.sort_by_key(|c| std::cmp::Reverse(c.b.max(c.beta)));

    for r in 0..=r_max {
        for rho in 0..=rho_max {
            let target = Target::new(r, rho);
            let aug = base
                .with_target(target)
                .expect("grid targets are nonnegative");
            let expected = Count::from_u128(vpf_rec(r as i128, rho as i128, &sorted, &mut dfs)?);
            report.checked += 1;
            match method(&aug) {
                Ok(got) if got == expected.to_signed() => {}
                Ok(got) => report.mismatches.push(Mismatch {
                    target,
                    expected,
                    got: MethodResult::Value(got),
                    method: method_name.to_string(),
                }),
                Err(e) => report.mismatches.push(Mismatch {
                    target,
                    expected,
                    got: MethodResult::Failed(e),
                    method: method_name.to_string(),
                }),
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::problem;

    #[test]
    fn nonsingular_system_has_unique_solution() {
        let aug = problem((3, 4), &[(1, 1), (1, 2)]).unwrap();
        assert_eq!(vpf_bruteforce(&aug), Count::one());
    }

    #[test]
    fn wedge_system() {
        // one solution iff rho <= r <= 2*rho
        let aug = problem((3, 2), &[(1, 1), (2, 1)]).unwrap();
        assert_eq!(vpf_bruteforce(&aug), Count::one());
        let aug = problem((5, 2), &[(1, 1), (2, 1)]).unwrap();
        assert_eq!(vpf_bruteforce(&aug), Count::zero());
    }

    #[test]
    fn spf_bruteforce_examples() {
        assert_eq!(spf_bruteforce(5, &[1, 2]), Count::from(3u64));
        assert_eq!(spf_bruteforce(0, &[]), Count::one());
        assert_eq!(spf_bruteforce(11, &[1, 4, 5]), Count::from(6u64));
    }

    #[test]
    fn column_permutation_invariance() {
        let a = problem((9, 7), &[(1, 2), (3, 1), (2, 2)]).unwrap();
        let b = problem((9, 7), &[(2, 2), (1, 2), (3, 1)]).unwrap();
        assert_eq!(vpf_bruteforce(&a), vpf_bruteforce(&b));
    }

    #[test]
    fn one_row_system_reduces_to_scalar_partition() {
        // second row identically zero with rho = 0
        let aug = problem((12, 0), &[(2, 0), (3, 0), (5, 0)]).unwrap();
        assert_eq!(vpf_bruteforce(&aug), spf_bruteforce(12, &[2, 3, 5]));
        // duplicated row with matching target
        let aug = problem((12, 12), &[(2, 2), (3, 3), (5, 5)]).unwrap();
        assert_eq!(vpf_bruteforce(&aug), spf_bruteforce(12, &[2, 3, 5]));
    }

    #[test]
    fn unit_columns_guarantee_solutions() {
        for r in 0..6 {
            for rho in 0..6 {
                let aug = problem((r, rho), &[(1, 0), (0, 1), (2, 3)]).unwrap();
                assert!(!vpf_bruteforce(&aug).is_zero());
            }
        }
    }

    #[test]
    fn budget_aborts_pathological_runs() {
        let aug = problem((1000, 1000), &[(1, 1), (1, 2), (2, 1), (1, 3)]).unwrap();
        assert_eq!(
            vpf_bruteforce_budgeted(&aug, 50),
            Err(BudgetError { limit: 50 })
        );
    }

    #[test]
    fn grid_report_on_empty_matrix() {
        let report = verify_grid(&GeneratorMatrix::default(), 3, 3, "unit", |aug| {
            let t = aug.target();
            Ok(SignedCount::from((t.r == 0 && t.rho == 0) as i64))
        });
        assert_eq!(report.checked, 16);
        assert!(report.is_clean());
    }

    #[test]
    fn grid_report_collects_mismatches_and_errors() {
        let matrix = GeneratorMatrix::from_rows(&[1], &[1]);
        let report = verify_grid(&matrix, 2, 2, "broken", |aug| {
            if aug.target().r == 2 {
                Err("simulated failure".to_string())
            } else {
                Ok(SignedCount::from(0))
            }
        });
        assert_eq!(report.checked, 9);
        // (0,0),(1,1) are genuine mismatches (count 1, method said 0);
        // all three r = 2 targets failed outright
        assert_eq!(report.mismatches.len(), 5);
        assert!(report
            .mismatches
            .iter()
            .any(|m| matches!(m.got, MethodResult::Failed(_))));
    }
}
