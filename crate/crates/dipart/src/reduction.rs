//! Per-column reduction terms and whole-reduction evaluation.
//!
//! Eliminating one row of the augmented matrix against a column `c_i`
//! produces one scalar-partition contribution per column. For a column
//! satisfying the classic conditions (pairwise noncollinear, relatively
//! prime entries, eliminated-row entry below the target condition) the
//! contribution is the single term `W(L_i, d_i)` with
//! `L_i = r*beta_i - b_i*rho` and `d_ij = b_j*beta_i - b_i*beta_j`.
//! Without those conditions the contribution is a weighted sum of shifted
//! scalar partitions (the "bar" term) driven by a [`CoeffTable`].

use std::fmt;

use crate::coeffs::CoeffTable;
use crate::matrix::{det2, Column, SignedCount, ValidatedMatrix};
use crate::spf::{SignedSpfQuery, SpfCache};

/// Which row of the augmented matrix a reduction eliminates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Row {
    First,
    #[default]
    Second,
}

impl Row {
    pub fn name(&self) -> &'static str {
        match self {
            Row::First => "first",
            Row::Second => "second",
        }
    }
}

/// Which method produced a term, kept for provenance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermMethod {
    Classic,
    Bar,
    ZeroColumn,
    Convolution,
}

impl TermMethod {
    pub fn name(&self) -> &'static str {
        match self {
            TermMethod::Classic => "classic",
            TermMethod::Bar => "bar",
            TermMethod::ZeroColumn => "zero_column",
            TermMethod::Convolution => "convolution",
        }
    }
}

/// One weighted scalar-partition term of a reduction. The term reads
/// `weight * W(argument / scale, generators)` with `scale | argument`
/// required (a non-divisible argument contributes zero), evaluated through
/// the signed-generator normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTerm {
    pub weight: i64,
    pub query: SignedSpfQuery,
    pub scale: i128,
    pub source_column: usize,
    pub method: TermMethod,
}

impl ReductionTerm {
    pub fn evaluate(&self) -> SignedCount {
        let mut cache = SpfCache::new();
        self.evaluate_with(&mut cache)
    }

    pub fn evaluate_with(&self, cache: &mut SpfCache) -> SignedCount {
        debug_assert!(self.weight != 0 && self.scale >= 1);
        if self.query.argument % self.scale != 0 {
            return SignedCount::zero();
        }
        let inner = SignedSpfQuery::new(
            self.query.argument / self.scale,
            self.query.generators.clone(),
        );
        cache.eval_signed(&inner).scaled_i64(self.weight)
    }
}

/// A weighted sum of scalar-partition terms for one target.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Reduction {
    pub terms: Vec<ReductionTerm>,
    pub eliminated_row: Row,
}

/// Target-independent rendering of a classic term after signed
/// normalization: `sign * W(coef_r * r + coef_rho * rho + shift, generators)`
/// with all generators positive, in column order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineTerm {
    pub sign: i64,
    pub coef_r: i128,
    pub coef_rho: i128,
    pub shift: i128,
    pub generators: Vec<i128>,
    pub source_column: usize,
}

impl fmt::Display for AffineTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign < 0 { '-' } else { '+' };
        write!(
            f,
            "{}W({}",
            sign,
            affine_string(self.coef_r, self.coef_rho, self.shift)
        )?;
        write!(f, ", {{")?;
        for (k, g) in self.generators.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}})")
    }
}

pub(crate) fn affine_string(coef_r: i128, coef_rho: i128, shift: i128) -> String {
    let mut out = String::new();
    for (coef, var) in [(coef_r, "s1"), (coef_rho, "s2")] {
        if coef == 0 {
            continue;
        }
        if !out.is_empty() && coef > 0 {
            out.push('+');
        }
        match coef {
            1 => {}
            -1 => out.push('-'),
            c => out.push_str(&format!("{c}*")),
        }
        out.push_str(var);
    }
    if shift != 0 || out.is_empty() {
        if shift >= 0 && !out.is_empty() {
            out.push('+');
        }
        out.push_str(&shift.to_string());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassicError {
    /// Columns `column` and `other` are parallel.
    Collinear { column: usize, other: usize },
    /// The column entries share a factor, so the contribution cannot be
    /// compacted into a single term; use the bar path.
    NotCoprime { column: usize, gcd: i64 },
    /// The eliminated-row entry fails `entry < other_target + 2`; the
    /// classic derivation does not cover this case, the bar path does.
    BetaTooLarge {
        column: usize,
        entry: i64,
        limit: i64,
    },
    /// The eliminated-row entry is zero: the column contributes nothing to
    /// this elimination and is skipped by whole-matrix reductions.
    BetaZero { column: usize },
    /// A single-column matrix leaves no generators to eliminate against.
    EmptyEliminationSet,
}

impl fmt::Display for ClassicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassicError::Collinear { column, other } => {
                write!(f, "columns {} and {} are collinear", column + 1, other + 1)
            }
            ClassicError::NotCoprime { column, gcd } => {
                write!(f, "column {} has gcd {} > 1", column + 1, gcd)
            }
            ClassicError::BetaTooLarge {
                column,
                entry,
                limit,
            } => write!(
                f,
                "column {}: eliminated-row entry {} is not below {}",
                column + 1,
                entry,
                limit
            ),
            ClassicError::BetaZero { column } => write!(
                f,
                "column {}: eliminated-row entry is zero, term vanishes",
                column + 1
            ),
            ClassicError::EmptyEliminationSet => {
                write!(f, "single-column matrix has no elimination partners")
            }
        }
    }
}

impl std::error::Error for ClassicError {}

fn check_classic_column(cols: &[Column], i: usize, rho: Option<i64>) -> Result<(), ClassicError> {
    let ci = cols[i];
    if ci.beta == 0 {
        return Err(ClassicError::BetaZero { column: i });
    }
    let g = ci.gcd();
    if g != 1 {
        return Err(ClassicError::NotCoprime { column: i, gcd: g });
    }
    for (j, &cj) in cols.iter().enumerate() {
        if j != i && det2(cj, ci) == 0 {
            return Err(ClassicError::Collinear {
                column: i,
                other: j,
            });
        }
    }
    if let Some(rho) = rho {
        if !(ci.beta < rho + 2) {
            return Err(ClassicError::BetaTooLarge {
                column: i,
                entry: ci.beta,
                limit: rho + 2,
            });
        }
    }
    if cols.len() == 1 {
        return Err(ClassicError::EmptyEliminationSet);
    }
    Ok(())
}

fn classic_term_row(
    aug: &ValidatedMatrix,
    i: usize,
    row: Row,
    override_rho: bool,
) -> Result<ReductionTerm, ClassicError> {
    // eliminating the first row is the second-row elimination of the
    // row-swapped problem, which lands exactly on the negated term
    let work: ValidatedMatrix;
    let aug = match row {
        Row::Second => aug,
        Row::First => {
            work = aug.swapped_rows();
            &work
        }
    };
    let rho_limit = if override_rho {
        None
    } else {
        Some(aug.target().rho)
    };
    check_classic_column(aug.columns(), i, rho_limit)?;
    let query = crate::matrix::eliminate(aug, i).expect("noncollinearity already checked");
    Ok(ReductionTerm {
        weight: 1,
        query,
        scale: 1,
        source_column: i,
        method: TermMethod::Classic,
    })
}

/// The classic single term for column `i` under second-row elimination:
/// weight +1, argument `r*beta_i - b_i*rho`, generators
/// `b_j*beta_i - b_i*beta_j`. Set `override_rho` to skip the
/// `beta_i < rho + 2` admissibility check (for experiments; the term is
/// only guaranteed exact when the check passes).
pub fn classic_term(
    aug: &ValidatedMatrix,
    i: usize,
    override_rho: bool,
) -> Result<ReductionTerm, ClassicError> {
    classic_term_row(aug, i, Row::Second, override_rho)
}

/// Target-independent classic term for column `i` in normalized affine
/// form. Only the structural conditions (noncollinearity, coprimality,
/// nonzero eliminated-row entry) are checked; the target condition is
/// inherently per-target.
pub fn classic_affine(
    aug: &ValidatedMatrix,
    i: usize,
    row: Row,
) -> Result<AffineTerm, ClassicError> {
    let work: ValidatedMatrix;
    let v = match row {
        Row::Second => aug,
        Row::First => {
            work = aug.swapped_rows();
            &work
        }
    };
    check_classic_column(v.columns(), i, None)?;
    let ci = v.columns()[i];
    let mut shift = 0i128;
    let mut sign = 1i64;
    let mut generators = Vec::new();
    for (j, &cj) in v.columns().iter().enumerate() {
        if j == i {
            continue;
        }
        let d = det2(cj, ci);
        if d < 0 {
            shift += d;
            sign = -sign;
        }
        generators.push(d.abs());
    }
    let (coef_r, coef_rho) = match row {
        Row::Second => (ci.beta as i128, -(ci.b as i128)),
        // swapped coordinates: L' = rho*b_i - beta_i*r
        Row::First => (-(ci.beta as i128), ci.b as i128),
    };
    Ok(AffineTerm {
        sign,
        coef_r,
        coef_rho,
        shift,
        generators,
        source_column: i,
    })
}

/// One classic term per admissible column. Columns whose eliminated-row
/// entry is zero contribute nothing and are skipped (they still appear in
/// the other columns' generator sets); any other violation is an error
/// naming the offending column.
pub fn classic_reduction(
    aug: &ValidatedMatrix,
    row: Row,
    override_rho: bool,
) -> Result<Reduction, ClassicError> {
    let mut terms = Vec::new();
    for i in 0..aug.columns().len() {
        match classic_term_row(aug, i, row, override_rho) {
            Ok(term) => terms.push(term),
            Err(ClassicError::BetaZero { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(Reduction {
        terms,
        eliminated_row: row,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BarError {
    /// The supplied table was built for a different column or matrix.
    TableMismatch {
        column: usize,
        table_column: usize,
    },
    Collinear {
        column: usize,
        other: usize,
    },
    BetaZero {
        column: usize,
    },
}

impl fmt::Display for BarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BarError::TableMismatch {
                column,
                table_column,
            } => write!(
                f,
                "coefficient table built for column {} used with column {}",
                table_column + 1,
                column + 1
            ),
            BarError::Collinear { column, other } => {
                write!(f, "columns {} and {} are collinear", column + 1, other + 1)
            }
            BarError::BetaZero { column } => {
                write!(f, "column {} has zero second-row entry", column + 1)
            }
        }
    }
}

impl std::error::Error for BarError {}

/// The generalized ("bar") contribution of column `i` under second-row
/// elimination, evaluated at the matrix target:
///
/// `sum_{j_x} a[j_x, j_y] * W(r - j_x - (rho - j_y) * b_i / beta_i, d_i)`
///
/// with `j_y = rho mod beta_i`. Applies to any column with
/// `beta_i >= 1` — in particular to columns with a shared entry factor or
/// with `beta_i >= rho + 2`, where the classic single term is unavailable.
/// For `b_i = 0` the generators collapse to `beta_i * {b_j}`, so only
/// `j_x = r (mod beta_i)` contributes, through the scaled partition
/// `W((r - j_x) / beta_i, {b_j})`.
pub fn bar_term(
    aug: &ValidatedMatrix,
    i: usize,
    table: &CoeffTable,
) -> Result<SignedCount, BarError> {
    let mut cache = SpfCache::new();
    bar_term_with(aug, i, table, &mut cache)
}

/// As [`bar_term`], reusing a partition cache across calls.
pub fn bar_term_with(
    aug: &ValidatedMatrix,
    i: usize,
    table: &CoeffTable,
    cache: &mut SpfCache,
) -> Result<SignedCount, BarError> {
    let cols = aug.columns();
    let ci = cols[i];
    if ci.beta == 0 {
        return Err(BarError::BetaZero { column: i });
    }
    if !table.matches(aug.matrix(), i) {
        return Err(BarError::TableMismatch {
            column: i,
            table_column: table.column,
        });
    }
    for (j, &cj) in cols.iter().enumerate() {
        if j != i && det2(cj, ci) == 0 {
            return Err(BarError::Collinear {
                column: i,
                other: j,
            });
        }
    }

    let r = aug.target().r as i128;
    let rho = aug.target().rho as i128;
    let beta = ci.beta as i128;
    let b = ci.b as i128;
    let j_y = (rho % beta) as i64;

    let mut total = SignedCount::zero();
    if b == 0 {
        // zero-column specialization: generators beta * {b_j}
        let gens: Vec<i128> = cols
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, c)| c.b as i128)
            .collect();
        for (j_x, a) in table.row(j_y) {
            let value = crate::spf::spf_scaled(r - j_x, beta, &gens);
            total += &value.to_signed().scaled_u64(a);
        }
    } else {
        let gens: Vec<i128> = cols
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &cj)| det2(cj, ci))
            .collect();
        // rho - j_y is a nonnegative multiple of beta by construction
        let row_shift = (rho - j_y as i128) / beta * b;
        for (j_x, a) in table.row(j_y) {
            let q = SignedSpfQuery::new(r - j_x - row_shift, gens.clone());
            total += &cache.eval_signed(&q).scaled_u64(a);
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AltZeroError {
    /// The matrix has no column with `b = 0, beta > 1`.
    NoZeroColumn,
    /// More than one such column; they are collinear and belong to the
    /// convolution path.
    MultipleZeroColumns { first: usize, second: usize },
    /// A remaining column fails the classic conditions for one of the two
    /// row eliminations.
    Classic(ClassicError),
}

impl fmt::Display for AltZeroError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AltZeroError::NoZeroColumn => write!(f, "no column with b = 0 and beta > 1"),
            AltZeroError::MultipleZeroColumns { first, second } => write!(
                f,
                "columns {} and {} both have b = 0",
                first + 1,
                second + 1
            ),
            AltZeroError::Classic(e) => write!(f, "precondition failed: {e}"),
        }
    }
}

impl std::error::Error for AltZeroError {}

/// Alternative expression for the contribution of the single column with
/// `b = 0, beta > 1`: subtracting the second-row reduction of the other
/// columns from the first-row one isolates the zero column's share,
///
/// `sum_{i != z} [ W(-L_i, -d_i) - W(L_i, d_i) ]`.
///
/// Requires every other column to be strictly positive, coprime, and
/// pairwise noncollinear. The per-target admissibility condition is not
/// enforced: both eliminations are combined as formal sums.
pub fn alt_zero_term(aug: &ValidatedMatrix) -> Result<SignedCount, AltZeroError> {
    let cols = aug.columns();
    let mut zero_col = None;
    for (j, c) in cols.iter().enumerate() {
        if c.b == 0 {
            match zero_col {
                None => zero_col = Some(j),
                Some(first) => return Err(AltZeroError::MultipleZeroColumns { first, second: j }),
            }
        }
    }
    let z = match zero_col {
        Some(z) if cols[z].beta > 1 => z,
        _ => return Err(AltZeroError::NoZeroColumn),
    };
    for (j, c) in cols.iter().enumerate() {
        if j == z {
            continue;
        }
        if c.b == 0 || c.beta == 0 {
            return Err(AltZeroError::Classic(ClassicError::BetaZero { column: j }));
        }
        check_classic_column(cols, j, None).map_err(AltZeroError::Classic)?;
    }

    let mut cache = SpfCache::new();
    let mut total = SignedCount::zero();
    for j in 0..cols.len() {
        if j == z {
            continue;
        }
        let q = crate::matrix::eliminate(aug, j).expect("noncollinearity already checked");
        let mirrored = SignedSpfQuery::new(-q.argument, q.generators.iter().map(|g| -g).collect());
        total += &cache.eval_signed(&mirrored);
        total += &(-cache.eval_signed(&q));
    }
    Ok(total)
}

/// Sum of all term evaluations plus any extra bar contributions.
pub fn evaluate(red: &Reduction, extra: &[SignedCount]) -> SignedCount {
    let mut cache = SpfCache::new();
    evaluate_with(red, extra, &mut cache)
}

pub fn evaluate_with(red: &Reduction, extra: &[SignedCount], cache: &mut SpfCache) -> SignedCount {
    let mut total = SignedCount::zero();
    for term in &red.terms {
        total += &term.evaluate_with(cache);
    }
    for e in extra {
        total += e;
    }
    total
}
