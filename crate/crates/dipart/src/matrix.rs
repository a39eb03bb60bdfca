//! Domain types for two-row counting problems: generator columns, targets,
//! matrices, exact counts, and the determinant / row-elimination primitives
//! shared by every reduction method.
//!
//! All entries are nonnegative machine integers; derived quantities
//! (determinants, shifted arguments) are widened to `i128` so that products
//! of any two valid entries cannot overflow. Counts are arbitrary precision.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};

use crate::spf::SignedSpfQuery;

/// One generator column `{b, beta}` of a two-row matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Column {
    /// First-row entry.
    pub b: i64,
    /// Second-row entry.
    pub beta: i64,
}

impl Column {
    pub fn new(b: i64, beta: i64) -> Self {
        Column { b, beta }
    }

    /// Both entries zero. Such a column makes the generating function
    /// divergent and is rejected by [`validate`].
    pub fn is_zero(&self) -> bool {
        self.b == 0 && self.beta == 0
    }

    /// gcd of the two entries, with `gcd(0, n) = n`.
    pub fn gcd(&self) -> i64 {
        gcd(self.b, self.beta)
    }

    /// The primitive direction `c / gcd(c)` together with the multiplier,
    /// so that `self = multiplier * direction`.
    pub fn primitive(&self) -> (Column, i64) {
        let g = self.gcd();
        debug_assert!(g > 0, "primitive() requires a nonzero column");
        (Column::new(self.b / g, self.beta / g), g)
    }

    /// Swap the two rows.
    pub(crate) fn swapped(&self) -> Column {
        Column::new(self.beta, self.b)
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.b, self.beta)
    }
}

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The target vector `s = {r, rho}` of a counting problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Target {
    pub r: i64,
    pub rho: i64,
}

impl Target {
    pub fn new(r: i64, rho: i64) -> Self {
        Target { r, rho }
    }

    /// View the target as a column, for determinant arithmetic.
    pub fn as_column(&self) -> Column {
        Column::new(self.r, self.rho)
    }

    pub(crate) fn swapped(&self) -> Target {
        Target::new(self.rho, self.r)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.rho)
    }
}

/// An ordered list of generator columns. Column order is preserved
/// everywhere; per-column results are always reported by original index.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GeneratorMatrix {
    columns: Vec<Column>,
}

impl GeneratorMatrix {
    pub fn new(columns: Vec<Column>) -> Self {
        GeneratorMatrix { columns }
    }

    /// Build from two parallel rows of entries.
    pub fn from_rows(first: &[i64], second: &[i64]) -> Self {
        assert_eq!(first.len(), second.len(), "rows must have equal length");
        GeneratorMatrix {
            columns: first
                .iter()
                .zip(second)
                .map(|(&b, &beta)| Column::new(b, beta))
                .collect(),
        }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, i: usize) -> Column {
        self.columns[i]
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// The matrix without column `i`, preserving the order of the rest.
    pub fn without_column(&self, i: usize) -> GeneratorMatrix {
        let mut columns = self.columns.clone();
        columns.remove(i);
        GeneratorMatrix { columns }
    }

    pub(crate) fn swapped_rows(&self) -> GeneratorMatrix {
        GeneratorMatrix {
            columns: self.columns.iter().map(Column::swapped).collect(),
        }
    }
}

/// Target vector plus generator matrix: the full problem statement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedMatrix {
    pub target: Target,
    pub matrix: GeneratorMatrix,
}

impl AugmentedMatrix {
    pub fn new(target: Target, matrix: GeneratorMatrix) -> Self {
        AugmentedMatrix { target, matrix }
    }
}

/// Where a validation failure was found. Indices are zero-based; the
/// `Display` rendering is one-based to match the command-line convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    TargetR,
    TargetRho,
    Matrix { row: usize, column: usize },
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::TargetR => write!(f, "target entry r"),
            Field::TargetRho => write!(f, "target entry rho"),
            Field::Matrix { row, column } => {
                write!(f, "matrix entry at row {}, column {}", row + 1, column + 1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationError {
    /// Some column is `{0,0}`.
    ZeroColumn { column: usize },
    /// Some entry is negative. Negative targets are rejected rather than
    /// mapped to a zero count: silent zeros hide caller bugs.
    NegativeEntry { field: Field, value: i64 },
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::ZeroColumn { column } => {
                write!(f, "zero column: column {} is {{0,0}}", column + 1)
            }
            ValidationError::NegativeEntry { field, value } => match field {
                Field::TargetR | Field::TargetRho => {
                    write!(f, "negative target entry: {} = {}", field, value)
                }
                _ => write!(f, "negative entry: {} = {}", field, value),
            },
        }
    }
}

impl std::error::Error for ValidationError {}

/// An [`AugmentedMatrix`] whose invariants have been checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidatedMatrix {
    aug: AugmentedMatrix,
}

impl ValidatedMatrix {
    pub fn target(&self) -> Target {
        self.aug.target
    }

    pub fn matrix(&self) -> &GeneratorMatrix {
        &self.aug.matrix
    }

    pub fn columns(&self) -> &[Column] {
        self.aug.matrix.columns()
    }

    pub fn aug(&self) -> &AugmentedMatrix {
        &self.aug
    }

    pub fn into_inner(self) -> AugmentedMatrix {
        self.aug
    }

    /// Same matrix, different target. The matrix part needs no re-check.
    pub fn with_target(&self, target: Target) -> Result<ValidatedMatrix, ValidationError> {
        check_target(&target)?;
        Ok(ValidatedMatrix {
            aug: AugmentedMatrix::new(target, self.aug.matrix.clone()),
        })
    }

    pub(crate) fn swapped_rows(&self) -> ValidatedMatrix {
        ValidatedMatrix {
            aug: AugmentedMatrix::new(self.aug.target.swapped(), self.aug.matrix.swapped_rows()),
        }
    }
}

fn check_target(target: &Target) -> Result<(), ValidationError> {
    if target.r < 0 {
        return Err(ValidationError::NegativeEntry {
            field: Field::TargetR,
            value: target.r,
        });
    }
    if target.rho < 0 {
        return Err(ValidationError::NegativeEntry {
            field: Field::TargetRho,
            value: target.rho,
        });
    }
    Ok(())
}

/// Check all invariants and return a [`ValidatedMatrix`], or identify the
/// first violation in column order. Validation is idempotent.
pub fn validate(aug: AugmentedMatrix) -> Result<ValidatedMatrix, ValidationError> {
    check_target(&aug.target)?;
    for (i, col) in aug.matrix.columns().iter().enumerate() {
        if col.b < 0 {
            return Err(ValidationError::NegativeEntry {
                field: Field::Matrix { row: 0, column: i },
                value: col.b,
            });
        }
        if col.beta < 0 {
            return Err(ValidationError::NegativeEntry {
                field: Field::Matrix { row: 1, column: i },
                value: col.beta,
            });
        }
        if col.is_zero() {
            return Err(ValidationError::ZeroColumn { column: i });
        }
    }
    Ok(ValidatedMatrix { aug })
}

/// Convenience constructor used throughout the tests and the CLI.
pub fn problem(
    target: (i64, i64),
    columns: &[(i64, i64)],
) -> Result<ValidatedMatrix, ValidationError> {
    validate(AugmentedMatrix::new(
        Target::new(target.0, target.1),
        GeneratorMatrix::new(
            columns
                .iter()
                .map(|&(b, beta)| Column::new(b, beta))
                .collect(),
        ),
    ))
}

/// Determinant of the 2x2 matrix with columns `(a, b)`:
/// `a.b * b.beta - b.b * a.beta`. Widened so it cannot overflow.
pub fn det2(a: Column, b: Column) -> i128 {
    a.b as i128 * b.beta as i128 - b.b as i128 * a.beta as i128
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EliminateError {
    /// Column `other` is parallel to column `column`, so its determinant
    /// generator vanishes and single-row elimination is inapplicable;
    /// collinear columns are handled by convolution instead.
    CollinearColumns { column: usize, other: usize },
}

impl fmt::Display for EliminateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EliminateError::CollinearColumns { column, other } => {
                write!(f, "columns {} and {} are collinear", column + 1, other + 1)
            }
        }
    }
}

impl std::error::Error for EliminateError {}

/// Eliminate the second row against column `i` (zero-based): the argument is
/// `det2(s, c_i) = r*beta_i - b_i*rho` and the generators are
/// `det2(c_j, c_i) = b_j*beta_i - b_i*beta_j` for every `j != i` in column
/// order. On success no generator is zero.
pub fn eliminate(aug: &ValidatedMatrix, i: usize) -> Result<SignedSpfQuery, EliminateError> {
    let cols = aug.columns();
    let ci = cols[i];
    let argument = det2(aug.target().as_column(), ci);
    let mut generators = Vec::with_capacity(cols.len().saturating_sub(1));
    for (j, &cj) in cols.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = det2(cj, ci);
        if d == 0 {
            return Err(EliminateError::CollinearColumns {
                column: i,
                other: j,
            });
        }
        generators.push(d);
    }
    Ok(SignedSpfQuery::new(argument, generators))
}

/// An exact nonnegative count. Arithmetic never overflows.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Count(BigUint);

impl Count {
    pub fn zero() -> Self {
        Count(BigUint::zero())
    }

    pub fn one() -> Self {
        Count(BigUint::one())
    }

    pub fn from_u128(v: u128) -> Self {
        Count(BigUint::from(v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn into_biguint(self) -> BigUint {
        self.0
    }

    pub fn to_signed(&self) -> SignedCount {
        SignedCount(BigInt::from_biguint(Sign::Plus, self.0.clone()))
    }
}

impl From<u64> for Count {
    fn from(v: u64) -> Self {
        Count(BigUint::from(v))
    }
}

impl From<BigUint> for Count {
    fn from(v: BigUint) -> Self {
        Count(v)
    }
}

impl std::ops::AddAssign<&Count> for Count {
    fn add_assign(&mut self, rhs: &Count) {
        self.0 += &rhs.0;
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A signed exact value: always `(+/-1) * (a nonnegative count)` by
/// construction, but representable as any integer while sums are in flight.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct SignedCount(BigInt);

impl SignedCount {
    pub fn zero() -> Self {
        SignedCount(BigInt::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn as_bigint(&self) -> &BigInt {
        &self.0
    }

    /// Reinterpret as a plain count; `None` if negative.
    pub fn to_count(&self) -> Option<Count> {
        self.0.to_biguint().map(Count)
    }

    pub fn scaled_u64(&self, k: u64) -> SignedCount {
        SignedCount(&self.0 * BigInt::from(k))
    }

    pub fn scaled_i64(&self, k: i64) -> SignedCount {
        SignedCount(&self.0 * BigInt::from(k))
    }
}

impl From<i64> for SignedCount {
    fn from(v: i64) -> Self {
        SignedCount(BigInt::from(v))
    }
}

impl From<Count> for SignedCount {
    fn from(v: Count) -> Self {
        v.to_signed()
    }
}

impl std::ops::AddAssign<&SignedCount> for SignedCount {
    fn add_assign(&mut self, rhs: &SignedCount) {
        self.0 += &rhs.0;
    }
}

impl std::ops::Add for SignedCount {
    type Output = SignedCount;
    fn add(self, rhs: SignedCount) -> SignedCount {
        SignedCount(self.0 + rhs.0)
    }
}

impl std::ops::Sub for SignedCount {
    type Output = SignedCount;
    fn sub(self, rhs: SignedCount) -> SignedCount {
        SignedCount(self.0 - rhs.0)
    }
}

impl std::ops::Neg for SignedCount {
    type Output = SignedCount;
    fn neg(self) -> SignedCount {
        SignedCount(-self.0)
    }
}

impl fmt::Display for SignedCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
