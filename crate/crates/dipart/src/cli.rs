//! Problem-file parsing and the command-line front end.
//!
//! Input is a JSON document
//!
//! ```json
//! {"matrix": [[0,1,1,3],[4,2,3,1]], "target": [10,10],
//!  "strategy": {"mode": "auto", "override_rho_condition": false}}
//! ```
//!
//! or a plain-text form: two whitespace-separated rows, then an optional
//! `target: r rho` line. Results go to stdout as JSON (counts are decimal
//! strings so consumers with 53-bit integers cannot truncate them);
//! diagnostics go to stderr. Exit codes: 0 success, 1 computational
//! failure or verification mismatch, 2 input error.

use std::fmt::Write as _;
use std::io::Read;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coeffs::{
    coeff_table_direct_capped, coeff_table_recursive_capped, CoeffTable, InnerSolver,
    DEFAULT_KVECTOR_CAP,
};
use crate::corpus::{random_matrix, random_special_matrix, SpecialCase, SplitMix64};
use crate::decomposer::{
    chambers, collinear_classes, count_detailed, full_reduction, Limits, Strategy, StrategyMode,
};
use crate::matrix::{validate, AugmentedMatrix, GeneratorMatrix, Target, ValidatedMatrix};
use crate::oracle::{verify_grid_budgeted, GridReport, MethodResult};
use crate::reduction::{affine_string, classic_affine, Row};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemDocument {
    /// Two rows of equal length.
    pub matrix: Vec<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<[i64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyDoc>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyDoc {
    pub mode: ModeDoc,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub override_rho_condition: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeDoc {
    Auto,
    Classic,
    General,
    Oracle,
}

impl From<StrategyDoc> for Strategy {
    fn from(doc: StrategyDoc) -> Strategy {
        Strategy {
            mode: match doc.mode {
                ModeDoc::Auto => StrategyMode::Auto,
                ModeDoc::Classic => StrategyMode::Classic,
                ModeDoc::General => StrategyMode::General,
                ModeDoc::Oracle => StrategyMode::Oracle,
            },
            classic_override_rho_condition: doc.override_rho_condition,
        }
    }
}

/// Parse either accepted input format, sniffing JSON by the leading brace.
pub fn parse_document(input: &str) -> Result<ProblemDocument, String> {
    if input.trim_start().starts_with('{') {
        serde_json::from_str(input).map_err(|e| format!("invalid JSON problem document: {e}"))
    } else {
        parse_text(input)
    }
}

fn parse_text(input: &str) -> Result<ProblemDocument, String> {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut target = None;
    for line in input.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("target:") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 2 {
                return Err("target line must read `target: r rho`".to_string());
            }
            let r = parts[0]
                .parse()
                .map_err(|_| "target r is not an integer".to_string())?;
            let rho = parts[1]
                .parse()
                .map_err(|_| "target rho is not an integer".to_string())?;
            target = Some([r, rho]);
            continue;
        }
        let row: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
        match row {
            Ok(row) => rows.push(row),
            Err(_) => return Err(format!("unrecognized line in problem file: {line:?}")),
        }
    }
    if rows.len() != 2 {
        return Err(format!("expected two matrix rows, found {}", rows.len()));
    }
    Ok(ProblemDocument {
        matrix: rows,
        target,
        strategy: None,
    })
}

/// Canonical serialization; `parse_document(print_document(d)) == d`.
pub fn print_document(doc: &ProblemDocument) -> String {
    serde_json::to_string(doc).expect("document serialization cannot fail")
}

enum CmdError {
    /// Exit 2: malformed or invalid input.
    Input(String),
    /// Exit 1: the computation itself failed or found a discrepancy.
    Failure(String),
}

impl CmdError {
    fn code(&self) -> i32 {
        match self {
            CmdError::Input(_) => 2,
            CmdError::Failure(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CmdError::Input(m) => m,
            CmdError::Failure(m) => m,
        }
    }
}

fn doc_matrix(doc: &ProblemDocument) -> Result<GeneratorMatrix, CmdError> {
    if doc.matrix.len() != 2 {
        return Err(CmdError::Input(format!(
            "matrix must have exactly 2 rows, found {}",
            doc.matrix.len()
        )));
    }
    if doc.matrix[0].len() != doc.matrix[1].len() {
        return Err(CmdError::Input(format!(
            "matrix rows differ in length: {} vs {}",
            doc.matrix[0].len(),
            doc.matrix[1].len()
        )));
    }
    Ok(GeneratorMatrix::from_rows(&doc.matrix[0], &doc.matrix[1]))
}

fn doc_validated(doc: &ProblemDocument) -> Result<ValidatedMatrix, CmdError> {
    let matrix = doc_matrix(doc)?;
    let target = doc
        .target
        .ok_or_else(|| CmdError::Input("this command requires a target".to_string()))?;
    validate(AugmentedMatrix::new(
        Target::new(target[0], target[1]),
        matrix,
    ))
    .map_err(|e| CmdError::Input(e.to_string()))
}

fn doc_validated_matrix_only(doc: &ProblemDocument) -> Result<ValidatedMatrix, CmdError> {
    let matrix = doc_matrix(doc)?;
    validate(AugmentedMatrix::new(Target::new(0, 0), matrix))
        .map_err(|e| CmdError::Input(e.to_string()))
}

fn doc_strategy(doc: &ProblemDocument) -> Strategy {
    doc.strategy.map(Strategy::from).unwrap_or_default()
}

#[derive(Clone, Copy, Debug)]
struct Options {
    human: bool,
    seed: u64,
    budget: Option<u64>,
    r_max: i64,
    rho_max: i64,
    column: Option<usize>,
    random: Option<u64>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            human: false,
            seed: 0,
            budget: None,
            r_max: 20,
            rho_max: 20,
            column: None,
            random: None,
        }
    }
}

impl Options {
    fn limits(&self) -> Limits {
        Limits {
            kvector_cap: self.budget.unwrap_or(DEFAULT_KVECTOR_CAP),
            oracle_budget: self.budget,
        }
    }
}

const USAGE: &str = "\
usage: dipart <command> [FILE] [options]

Reads a problem document from FILE ('-' or omitted: stdin).

commands:
  count      exact solution count (requires target)
  reduce     per-column reduction terms
  coeffs     expansion-coefficient table for one column
  verify     compare the configured strategy against the oracle on a grid
  chambers   chamber boundary lines, one per column
  bench      dispatcher vs oracle wall time over a grid

options:
  --human          plain-text output instead of JSON
  --seed <n>       seed for --random corpora (default 0)
  --budget <n>     enumeration cap (oracle nodes / coefficient vectors)
  --rmax <n>       grid bound on r (verify/bench; default 20)
  --rhomax <n>     grid bound on rho (verify/bench; default 20)
  --column <k>     one-based column index (coeffs)
  --method <m>     coeffs route: direct | recursive | both (default direct)
  --inner <m>      recursive inner solver: oracle | classic | dispatcher
  --random <n>     verify n seeded random matrices instead of FILE
";

/// Entry point for the binary. Returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    match run_inner(args) {
        Ok(output) => {
            println!("{output}");
            0
        }
        Err(e) => {
            eprintln!("dipart: {}", e.message());
            e.code()
        }
    }
}

fn run_inner(args: &[String]) -> Result<String, CmdError> {
    let mut command = None;
    let mut file = None;
    let mut opts = Options::default();
    let mut method = "direct".to_string();
    let mut inner = "oracle".to_string();

    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let mut flag_value = |name: &str| -> Result<String, CmdError> {
            it.next()
                .cloned()
                .ok_or_else(|| CmdError::Input(format!("{name} requires a value")))
        };
        match arg.as_str() {
            "--human" => opts.human = true,
            "--seed" => opts.seed = parse_flag(&flag_value("--seed")?, "--seed")?,
            "--budget" => opts.budget = Some(parse_flag(&flag_value("--budget")?, "--budget")?),
            "--rmax" => opts.r_max = parse_flag(&flag_value("--rmax")?, "--rmax")?,
            "--rhomax" => opts.rho_max = parse_flag(&flag_value("--rhomax")?, "--rhomax")?,
            "--column" => {
                opts.column = Some(parse_flag::<usize>(&flag_value("--column")?, "--column")?)
            }
            "--method" => method = flag_value("--method")?,
            "--inner" => inner = flag_value("--inner")?,
            "--random" => opts.random = Some(parse_flag(&flag_value("--random")?, "--random")?),
            "--help" | "-h" => return Ok(USAGE.trim_end().to_string()),
            _ if command.is_none() => command = Some(arg.clone()),
            _ if file.is_none() => file = Some(arg.clone()),
            _ => return Err(CmdError::Input(format!("unexpected argument {arg:?}"))),
        }
    }

    let command = match command {
        Some(c) => c,
        None => return Err(CmdError::Input(format!("missing command\n{USAGE}"))),
    };

    if command == "verify" && opts.random.is_some() {
        return cmd_verify_random(&opts);
    }

    let doc = read_document(file.as_deref())?;
    match command.as_str() {
        "count" => cmd_count(&doc, &opts),
        "reduce" => cmd_reduce(&doc, &opts),
        "coeffs" => cmd_coeffs(&doc, &opts, &method, &inner),
        "verify" => cmd_verify(&doc, &opts),
        "chambers" => cmd_chambers(&doc, &opts),
        "bench" => cmd_bench(&doc, &opts),
        other => Err(CmdError::Input(format!(
            "unknown command {other:?}\n{USAGE}"
        ))),
    }
}

fn parse_flag<T: std::str::FromStr>(value: &str, name: &str) -> Result<T, CmdError> {
    value
        .parse()
        .map_err(|_| CmdError::Input(format!("{name}: cannot parse {value:?}")))
}

fn read_document(file: Option<&str>) -> Result<ProblemDocument, CmdError> {
    let content = match file {
        Some("-") | None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CmdError::Input(format!("cannot read stdin: {e}")))?;
            buf
        }
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CmdError::Input(format!("cannot read {path}: {e}")))?,
    };
    parse_document(&content).map_err(CmdError::Input)
}

fn cmd_count(doc: &ProblemDocument, opts: &Options) -> Result<String, CmdError> {
    let aug = doc_validated(doc)?;
    let strategy = doc_strategy(doc);
    let report = count_detailed(&aug, &strategy, opts.limits())
        .map_err(|e| CmdError::Failure(e.to_string()))?;
    if opts.human {
        Ok(format!(
            "count = {} (method {}, {} terms evaluated)",
            report.count, report.method, report.terms_evaluated
        ))
    } else {
        Ok(json!({
            "count": report.count.to_string(),
            "method": report.method,
            "terms_evaluated": report.terms_evaluated,
        })
        .to_string())
    }
}

fn cmd_reduce(doc: &ProblemDocument, opts: &Options) -> Result<String, CmdError> {
    let matrix = doc_matrix(doc)?;
    let aug = match doc.target {
        Some(t) => validate(AugmentedMatrix::new(Target::new(t[0], t[1]), matrix))
            .map_err(|e| CmdError::Input(e.to_string()))?,
        None => doc_validated_matrix_only(doc)?,
    };
    let strategy = doc_strategy(doc);

    if aug.matrix().len() == 1 {
        let c = aug.columns()[0];
        let human = format!("W = 1 iff s = k*{c} for an integer k >= 0, else 0");
        if opts.human {
            return Ok(human);
        }
        return Ok(json!({
            "terms": [{"source_column": 1, "method": "divisibility",
                        "column": [c.b, c.beta], "rule": human}],
        })
        .to_string());
    }
    if let Some(class) = collinear_classes(aug.matrix())
        .iter()
        .find(|c| c.len() >= 2)
    {
        let (first, second) = (class.members[0].0, class.members[1].0);
        return Err(CmdError::Input(format!(
            "columns {} and {} are collinear; no per-column reduction exists (use `count`, which convolves them)",
            first + 1,
            second + 1
        )));
    }

    let for_terms = if doc.target.is_some() {
        strategy
    } else {
        // without a target the per-target condition cannot be checked;
        // classify columns structurally
        Strategy {
            classic_override_rho_condition: true,
            ..strategy
        }
    };
    let (reduction, bar_columns) =
        full_reduction(&aug, &for_terms).map_err(|e| CmdError::Failure(e.to_string()))?;

    let mut terms = Vec::new();
    let mut human = Vec::new();
    for term in &reduction.terms {
        let affine = classic_affine(&aug, term.source_column, Row::Second)
            .expect("classic term already built");
        let mut obj = json!({
            "source_column": term.source_column + 1,
            "method": "classic",
            "weight": affine.sign,
            "form": affine_string(affine.coef_r, affine.coef_rho, affine.shift),
            "generators": json_ints(&affine.generators)?,
            "scale": 1,
        });
        if doc.target.is_some() {
            let n = term.query.normalized();
            obj["argument"] = json!(json_int(n.argument)?);
        }
        terms.push(obj);
        human.push(affine.to_string());
    }
    for &i in &bar_columns {
        let table =
            coeff_table_direct_capped(aug.matrix(), i, opts.budget.unwrap_or(DEFAULT_KVECTOR_CAP))
                .map_err(|e| CmdError::Failure(e.to_string()))?;
        let col = aug.columns()[i];
        let gens: Vec<i64> = if col.b == 0 {
            aug.columns()
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, c)| c.b)
                .collect()
        } else {
            let dets: Vec<i128> = aug
                .columns()
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &c)| crate::matrix::det2(c, col))
                .collect();
            json_ints(&dets)?
        };
        let (scale, form) = if col.b == 0 {
            (col.beta, format!("(s1 - j_x)/{}", col.beta))
        } else {
            (1, format!("s1 - j_x - (s2 - j_y)*{}/{}", col.b, col.beta))
        };
        let mut obj = json!({
            "source_column": i + 1,
            "method": "bar",
            "modulus": col.beta,
            "scale": scale,
            "generators": gens,
            "n_minus": json_int(table.n_minus)?,
            "n_plus": json_int(table.n_plus)?,
            "coefficients": rows_json(&table),
            "argument_form": form,
        });
        let mass = table.total_mass();
        if let Some(t) = doc.target {
            obj["selected_row"] = json!(t[1] % col.beta);
        }
        terms.push(obj);
        human.push(format!(
            "+ sum over j_x of a[j_x, s2 mod {}] * W({}, {{{}}})  [{} coefficients]",
            col.beta,
            form,
            gens.iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(","),
            mass,
        ));
    }

    if opts.human {
        Ok(format!("W = {}", human.join("\n    ")))
    } else {
        Ok(json!({"eliminated_row": "second", "terms": terms}).to_string())
    }
}

fn json_int(v: i128) -> Result<i64, CmdError> {
    i64::try_from(v)
        .map_err(|_| CmdError::Failure(format!("value {v} exceeds the JSON-safe integer range")))
}

fn json_ints(values: &[i128]) -> Result<Vec<i64>, CmdError> {
    values.iter().map(|&v| json_int(v)).collect()
}

fn rows_json(table: &CoeffTable) -> Value {
    let mut rows = serde_json::Map::new();
    for j_y in 0..table.modulus {
        let mut row = Vec::new();
        for j_x in table.n_minus..=table.n_plus {
            row.push(json!(table.get(j_x, j_y)));
        }
        rows.insert(j_y.to_string(), Value::Array(row));
    }
    Value::Object(rows)
}

fn cmd_coeffs(
    doc: &ProblemDocument,
    opts: &Options,
    method: &str,
    inner: &str,
) -> Result<String, CmdError> {
    let aug = doc_validated_matrix_only(doc)?;
    let matrix = aug.matrix();
    let column = opts
        .column
        .ok_or_else(|| CmdError::Input("coeffs requires --column <k>".to_string()))?;
    if column < 1 || column > matrix.len() {
        return Err(CmdError::Input(format!(
            "--column must be between 1 and {}",
            matrix.len()
        )));
    }
    let i = column - 1;
    if matrix.column(i).beta < 1 {
        return Err(CmdError::Input(format!(
            "column {column} has zero second-row entry; its expansion table is undefined"
        )));
    }
    let cap = opts.budget.unwrap_or(DEFAULT_KVECTOR_CAP);
    let solver = match inner {
        "oracle" => InnerSolver::Oracle,
        "classic" => InnerSolver::Classic,
        "dispatcher" => InnerSolver::Dispatcher,
        other => {
            return Err(CmdError::Input(format!(
                "--inner: unknown solver {other:?}"
            )))
        }
    };

    let direct = || coeff_table_direct_capped(matrix, i, cap);
    let recursive = || coeff_table_recursive_capped(matrix, i, solver, cap);
    let (table, agree) = match method {
        "direct" => (
            direct().map_err(|e| CmdError::Failure(e.to_string()))?,
            None,
        ),
        "recursive" => (
            recursive().map_err(|e| CmdError::Failure(e.to_string()))?,
            None,
        ),
        "both" => {
            let a = direct().map_err(|e| CmdError::Failure(e.to_string()))?;
            let b = recursive().map_err(|e| CmdError::Failure(e.to_string()))?;
            match a.first_disagreement(&b) {
                None => (a, Some(true)),
                Some((j_x, j_y, va, vb)) => {
                    return Err(CmdError::Failure(format!(
                        "methods disagree at (j_x={j_x}, j_y={j_y}): direct {va}, recursive {vb}"
                    )))
                }
            }
        }
        other => {
            return Err(CmdError::Input(format!(
                "--method: unknown method {other:?}"
            )))
        }
    };

    if opts.human {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "column {column}: modulus {}, j_x in [{}, {}], total mass {}",
            table.modulus,
            table.n_minus,
            table.n_plus,
            table.total_mass()
        );
        for j_y in 0..table.modulus {
            let row: Vec<String> = (table.n_minus..=table.n_plus)
                .map(|j_x| table.get(j_x, j_y).to_string())
                .collect();
            let _ = writeln!(out, "j_y={j_y}: {}", row.join(" "));
        }
        if agree == Some(true) {
            let _ = writeln!(out, "direct and recursive methods agree");
        }
        Ok(out.trim_end().to_string())
    } else {
        let mut obj = json!({
            "column": column,
            "modulus": table.modulus,
            "n_minus": json_int(table.n_minus)?,
            "n_plus": json_int(table.n_plus)?,
            "rows": rows_json(&table),
            "total": table.total_mass().to_string(),
        });
        if let Some(agree) = agree {
            obj["agree"] = json!(agree);
        }
        Ok(obj.to_string())
    }
}

fn grid_json(report: &GridReport, method: &str) -> Value {
    let shown: Vec<Value> = report
        .mismatches
        .iter()
        .take(10)
        .map(|m| {
            let got = match &m.got {
                MethodResult::Value(v) => json!(v.to_string()),
                MethodResult::Failed(e) => json!({ "error": e }),
            };
            json!({
                "target": [m.target.r, m.target.rho],
                "expected": m.expected.to_string(),
                "got": got,
            })
        })
        .collect();
    json!({
        "method": method,
        "checked": report.checked,
        "mismatch_count": report.mismatches.len(),
        "mismatches": shown,
    })
}

fn run_verify(
    matrix: &GeneratorMatrix,
    strategy: Strategy,
    opts: &Options,
) -> Result<GridReport, CmdError> {
    let limits = opts.limits();
    verify_grid_budgeted(
        matrix,
        opts.r_max,
        opts.rho_max,
        opts.budget.unwrap_or(u64::MAX),
        strategy.mode.name(),
        &mut |aug| {
            count_detailed(aug, &strategy, limits)
                .map(|r| r.count.to_signed())
                .map_err(|e| e.to_string())
        },
    )
    .map_err(|e| CmdError::Failure(format!("oracle: {e}")))
}

fn cmd_verify(doc: &ProblemDocument, opts: &Options) -> Result<String, CmdError> {
    let aug = doc_validated_matrix_only(doc)?;
    let strategy = doc_strategy(doc);
    let report = run_verify(aug.matrix(), strategy, opts)?;
    let rendered = if opts.human {
        let mut out = format!(
            "checked {} targets, {} mismatches",
            report.checked,
            report.mismatches.len()
        );
        for m in report.mismatches.iter().take(10) {
            let _ = write!(
                out,
                "\n  at {}: expected {}, got {}",
                m.target, m.expected, m.got
            );
        }
        out
    } else {
        grid_json(&report, strategy.mode.name()).to_string()
    };
    if report.is_clean() {
        Ok(rendered)
    } else {
        println!("{rendered}");
        Err(CmdError::Failure(format!(
            "{} of {} grid targets disagree with the oracle",
            report.mismatches.len(),
            report.checked
        )))
    }
}

fn cmd_verify_random(opts: &Options) -> Result<String, CmdError> {
    let n = opts.random.unwrap_or(10);
    let mut rng = SplitMix64::new(opts.seed);
    let mut total_checked = 0u64;
    let mut dirty = Vec::new();
    for k in 0..n {
        let matrix = if k % 3 == 2 {
            let case = SpecialCase::ALL[(k as usize / 3) % SpecialCase::ALL.len()];
            random_special_matrix(&mut rng, case, 6)
        } else {
            random_matrix(&mut rng, 4, 6)
        };
        let report = run_verify(&matrix, Strategy::default(), opts)?;
        total_checked += report.checked;
        if !report.is_clean() {
            dirty.push((matrix, report));
        }
    }
    let rendered = if opts.human {
        format!(
            "{n} random matrices, {total_checked} targets checked, {} with mismatches",
            dirty.len()
        )
    } else {
        json!({
            "matrices": n,
            "checked": total_checked,
            "mismatched_matrices": dirty
                .iter()
                .map(|(m, rep)| json!({
                    "matrix": [
                        m.columns().iter().map(|c| c.b).collect::<Vec<i64>>(),
                        m.columns().iter().map(|c| c.beta).collect::<Vec<i64>>(),
                    ],
                    "report": grid_json(rep, "auto"),
                }))
                .collect::<Vec<Value>>(),
        })
        .to_string()
    };
    if dirty.is_empty() {
        Ok(rendered)
    } else {
        println!("{rendered}");
        Err(CmdError::Failure(format!(
            "{} of {n} random matrices disagree with the oracle",
            dirty.len()
        )))
    }
}

fn cmd_chambers(doc: &ProblemDocument, opts: &Options) -> Result<String, CmdError> {
    let aug = doc_validated_matrix_only(doc)?;
    let lines = chambers(aug.matrix()).map_err(|e| CmdError::Input(e.to_string()))?;
    if opts.human {
        let mut out = String::new();
        for l in &lines {
            let _ = writeln!(
                out,
                "column {}: boundary {} = 0",
                l.column + 1,
                affine_string(l.line.0 as i128, l.line.1 as i128, 0)
            );
        }
        Ok(out.trim_end().to_string())
    } else {
        Ok(json!({
            "chambers": lines
                .iter()
                .map(|l| json!({"column": l.column + 1, "line": [l.line.0, l.line.1]}))
                .collect::<Vec<Value>>(),
        })
        .to_string())
    }
}

fn cmd_bench(doc: &ProblemDocument, opts: &Options) -> Result<String, CmdError> {
    let aug = doc_validated_matrix_only(doc)?;
    let strategy = doc_strategy(doc);
    let limits = opts.limits();

    let started = Instant::now();
    let mut counts = Vec::new();
    for r in 0..=opts.r_max {
        for rho in 0..=opts.rho_max {
            let at = aug
                .with_target(Target::new(r, rho))
                .expect("grid targets are nonnegative");
            let report = count_detailed(&at, &strategy, limits)
                .map_err(|e| CmdError::Failure(e.to_string()))?;
            counts.push(report.count);
        }
    }
    let dispatcher_ms = started.elapsed().as_secs_f64() * 1e3;

    let started = Instant::now();
    let mut agree = true;
    let mut idx = 0;
    for r in 0..=opts.r_max {
        for rho in 0..=opts.rho_max {
            let at = aug
                .with_target(Target::new(r, rho))
                .expect("grid targets are nonnegative");
            let expected = match opts.budget {
                None => crate::oracle::vpf_bruteforce(&at),
                Some(b) => crate::oracle::vpf_bruteforce_budgeted(&at, b)
                    .map_err(|e| CmdError::Failure(e.to_string()))?,
            };
            agree &= expected == counts[idx];
            idx += 1;
        }
    }
    let oracle_ms = started.elapsed().as_secs_f64() * 1e3;

    if opts.human {
        Ok(format!(
            "{} targets: dispatcher {:.1} ms, oracle {:.1} ms, agree: {agree}",
            counts.len(),
            dispatcher_ms,
            oracle_ms
        ))
    } else {
        Ok(json!({
            "targets": counts.len(),
            "dispatcher_ms": dispatcher_ms,
            "oracle_ms": oracle_ms,
            "agree": agree,
        })
        .to_string())
    }
}
