//! Command-line front end over `diffops`.
//!
//! Exit codes: 0 success, 1 usage, 2 parse error, 3 failed domain precondition.

use std::fmt::Write as _;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use diffops::artinian::ArtinianAlgebra;
use diffops::expr::{self, op_to_json, parse_op, parse_poly, poly_to_json, SCHEMA};
use diffops::invariants::FiniteGroup;
use diffops::levelmat::to_matrix;
use diffops::linalg::Matrix;
use diffops::{AntiAutomorphism, DiffOp, Error, FieldSpec, PolyRing};

#[derive(Debug, Parser)]
#[command(
    name = "diffops",
    about = "Exact arithmetic in rings of differential operators"
)]
pub struct Cli {
    /// Characteristic of the coefficient field: 0 or a prime.
    #[arg(long = "char", global = true, default_value_t = 0)]
    pub characteristic: u64,
    /// Number of variables (named x1..xN) when --vars is not given.
    #[arg(long, global = true)]
    pub nvars: Option<usize>,
    /// Comma-separated variable names.
    #[arg(long, global = true, value_delimiter = ',')]
    pub vars: Option<Vec<String>>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the normal form of an expression.
    Normalize { expr: String },
    /// Apply an operator to a polynomial.
    Apply {
        expr: String,
        #[arg(long)]
        to: String,
    },
    /// Standard transposition, or the twisted one with --twist (characteristic 0).
    Transpose {
        expr: String,
        #[arg(long)]
        twist: Option<String>,
    },
    /// Order of an operator (−1 for zero).
    Order { expr: String },
    /// Level of an operator (characteristic p).
    Level { expr: String },
    /// Matrix over the p^e-th powers of an operator of level ≤ e.
    Matrix {
        expr: String,
        #[arg(long)]
        e: u32,
    },
    /// Commutator [A, B].
    Bracket { a: String, b: String },
    /// Order filtration and socle adjoint on k[x]/(x_1^a_1, …, x_n^a_n).
    Artinian {
        #[arg(long, value_delimiter = ',', required = true)]
        exponents: Vec<u32>,
        /// Operator to transpose; defaults to each truncated ∂_i.
        #[arg(long)]
        op: Option<String>,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Finite linear group actions, loaded from a JSON list of matrices.
    Group {
        #[arg(long)]
        group: std::path::PathBuf,
        #[command(subcommand)]
        action: GroupAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum GroupAction {
    Pseudoreflections,
    InvariantCheck { expr: String },
    Reynolds { expr: String },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => 2,
            _ => 3,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError {
        code: 1,
        message: msg.into(),
    }
}

fn ring_for(cli: &Cli, default_n: usize) -> Result<PolyRing, CliError> {
    let spec = FieldSpec::new(cli.characteristic).map_err(|e| usage(e.to_string()))?;
    let ring = match (&cli.vars, cli.nvars) {
        (Some(v), Some(n)) if v.len() != n => return Err(usage("--vars and --nvars disagree")),
        (Some(v), _) => PolyRing::new(spec, v.clone()),
        (None, Some(n)) => PolyRing::with_nvars(spec, n),
        (None, None) => PolyRing::with_nvars(spec, default_n),
    };
    ring.map_err(|e| usage(e.to_string()))
}

/// Fewest variables the expressions mention via `xN`, `dN` or `d[…]`, at least 1.
fn inferred_nvars(exprs: &[&str]) -> usize {
    let mut n = 1;
    for src in exprs {
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let boundary =
                i == 0 || !(bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'_');
            if boundary && (c == b'x' || c == b'd') {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j > start
                    && (j == bytes.len() || !(bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_'))
                {
                    n = n.max(src[start..j].parse().unwrap_or(1));
                }
                if c == b'd' && bytes.get(start) == Some(&b'[') {
                    if let Some(close) = src[start..].find(']') {
                        n = n.max(src[start + 1..start + close].split(',').count());
                    }
                }
            }
            i += 1;
        }
    }
    n
}

fn split_top_level(s: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if c == ',' && depth == 0 {
            out.push(String::new());
        } else {
            out.last_mut().unwrap().push(c);
        }
    }
    out
}

fn op_out(cli: &Cli, op: &DiffOp) -> String {
    if cli.json {
        pretty(&op_to_json(op))
    } else {
        op.to_string()
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn matrix_json(m: &Matrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|c| json!(c.to_string())).collect()))
            .collect(),
    )
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let mut out = match &cli.command {
        Command::Normalize { expr } => {
            let ring = ring_for(cli, inferred_nvars(&[expr]))?;
            op_out(cli, &parse_op(expr, &ring)?)
        }
        Command::Apply { expr, to } => {
            let ring = ring_for(cli, inferred_nvars(&[expr, to]))?;
            let op = parse_op(expr, &ring)?;
            let f = parse_poly(to, &ring)?;
            let v = op.apply(&f)?;
            if cli.json {
                pretty(&poly_to_json(&v))
            } else {
                v.to_string()
            }
        }
        Command::Transpose { expr, twist } => {
            let twist_srcs = twist.as_deref().map(split_top_level).unwrap_or_default();
            let mut all: Vec<&str> = vec![expr];
            all.extend(twist_srcs.iter().map(String::as_str));
            let ring = ring_for(cli, inferred_nvars(&all))?;
            let op = parse_op(expr, &ring)?;
            let phi = match twist {
                None => AntiAutomorphism::Standard,
                Some(_) => {
                    let polys = twist_srcs
                        .iter()
                        .map(|s| parse_poly(s, &ring))
                        .collect::<Result<Vec<_>, _>>()?;
                    AntiAutomorphism::twisted(&ring, polys)?
                }
            };
            op_out(cli, &phi.apply(&op)?)
        }
        Command::Order { expr } => {
            let ring = ring_for(cli, inferred_nvars(&[expr]))?;
            let n = parse_op(expr, &ring)?.order();
            if cli.json {
                pretty(&json!({ "schema": SCHEMA, "kind": "order", "order": n }))
            } else {
                n.to_string()
            }
        }
        Command::Level { expr } => {
            let ring = ring_for(cli, inferred_nvars(&[expr]))?;
            let e = parse_op(expr, &ring)?.level()?;
            if cli.json {
                pretty(&json!({ "schema": SCHEMA, "kind": "level", "level": e }))
            } else {
                e.to_string()
            }
        }
        Command::Matrix { expr, e } => {
            let ring = ring_for(cli, inferred_nvars(&[expr]))?;
            let m = to_matrix(&parse_op(expr, &ring)?, *e)?;
            if cli.json {
                let mut v = m.to_json();
                v["schema"] = json!(SCHEMA);
                v["kind"] = json!("level-matrix");
                v["characteristic"] = json!(ring.spec().characteristic());
                v["vars"] = json!(ring.var_names());
                pretty(&v)
            } else {
                m.to_string().trim_end().to_string()
            }
        }
        Command::Bracket { a, b } => {
            let ring = ring_for(cli, inferred_nvars(&[a, b]))?;
            op_out(cli, &parse_op(a, &ring)?.bracket(&parse_op(b, &ring)?)?)
        }
        Command::Artinian {
            exponents,
            op,
            n_max,
        } => artinian(cli, exponents, op.as_deref(), *n_max)?,
        Command::Group { group, action } => group_cmd(cli, group, action)?,
    };
    if !out.ends_with('\n') {
        out.push('\n');
    }
    Ok(out)
}

fn artinian(
    cli: &Cli,
    exponents: &[u32],
    op: Option<&str>,
    n_max: Option<usize>,
) -> Result<String, CliError> {
    let spec = FieldSpec::new(cli.characteristic).map_err(|e| usage(e.to_string()))?;
    let alg = ArtinianAlgebra::new(spec, exponents.to_vec())?;
    let ring = alg.poly_ring();
    let filt = alg.order_filtration(n_max);
    let ops: Vec<(String, DiffOp)> = match op {
        Some(src) => vec![(src.to_string(), parse_op(src, ring)?)],
        None => (0..ring.nvars())
            .map(|i| (format!("d{}", i + 1), DiffOp::partial_var(ring, i)))
            .collect(),
    };
    let mut rows = Vec::new();
    for (name, xi) in &ops {
        let m = alg.induced(xi)?;
        let phi = alg.socle_adjoint(&m)?;
        rows.push((
            name.clone(),
            m.clone(),
            phi.clone(),
            filt.order_of(&m),
            filt.order_of(&phi),
        ));
    }
    if cli.json {
        let ops_json: Vec<Value> = rows
            .iter()
            .map(|(name, m, phi, o, po)| {
                json!({
                    "op": name,
                    "matrix": matrix_json(m.matrix()),
                    "adjoint": matrix_json(phi.matrix()),
                    "order": o,
                    "adjoint_order": po,
                })
            })
            .collect();
        return Ok(pretty(&json!({
            "schema": SCHEMA,
            "kind": "artinian",
            "characteristic": spec.characteristic(),
            "exponents": exponents,
            "basis": alg.basis(),
            "filtration_dims": filt.dims(),
            "stabilized_at": filt.stabilized_at(),
            "pairing": matrix_json(&alg.pairing_matrix(None)?),
            "operators": ops_json,
        })));
    }
    let mut s = String::new();
    let basis: Vec<String> = alg
        .basis()
        .iter()
        .map(|m| diffops::Polynomial::render_monomial(ring, m))
        .map(|m| if m.is_empty() { "1".into() } else { m })
        .collect();
    writeln!(s, "basis: {}", basis.join(", ")).unwrap();
    writeln!(s, "order  dim D^n").unwrap();
    for (n, d) in filt.dims().iter().enumerate() {
        writeln!(s, "{n:>5}  {d:>7}").unwrap();
    }
    match filt.stabilized_at() {
        Some(n) => writeln!(s, "stabilizes at order {n}").unwrap(),
        None => writeln!(s, "not stabilized within the bound").unwrap(),
    }
    for (name, m, phi, o, po) in &rows {
        let show = |o: &Option<i64>| o.map_or("?".to_string(), |v| v.to_string());
        writeln!(s, "\nop {name} (order {}):\n{}", show(o), m.matrix()).unwrap();
        writeln!(s, "adjoint (order {}):\n{}", show(po), phi.matrix()).unwrap();
    }
    Ok(s.trim_end().to_string())
}

fn group_cmd(cli: &Cli, path: &std::path::Path, action: &GroupAction) -> Result<String, CliError> {
    let src =
        std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let first: Value =
        serde_json::from_str(&src).map_err(|e| CliError::from(Error::Invalid(e.to_string())))?;
    let dim = first.get(0).and_then(Value::as_array).map_or(1, Vec::len);
    let ring = ring_for(cli, dim)?;
    let group = FiniteGroup::from_json(&ring, &src)?;
    Ok(match action {
        GroupAction::Pseudoreflections => {
            let idx: Vec<usize> = group
                .elements()
                .iter()
                .enumerate()
                .filter(|(_, g)| g.is_pseudoreflection())
                .map(|(i, _)| i)
                .collect();
            if cli.json {
                pretty(
                    &json!({ "schema": SCHEMA, "kind": "pseudoreflections", "order": group.order(), "indices": idx }),
                )
            } else if idx.is_empty() {
                "none".to_string()
            } else {
                idx.iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            }
        }
        GroupAction::InvariantCheck { expr: src } => {
            let inv = group.is_invariant(&expr::parse_op(src, &ring)?)?;
            if cli.json {
                pretty(&json!({ "schema": SCHEMA, "kind": "invariant-check", "invariant": inv }))
            } else {
                inv.to_string()
            }
        }
        GroupAction::Reynolds { expr: src } => {
            op_out(cli, &group.reynolds(&expr::parse_op(src, &ring)?)?)
        }
    })
}

/// Parses arguments and runs, returning the exit code and what to print on stdout/stderr.
pub fn main_with_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return if code == 0 {
                (0, e.to_string(), String::new())
            } else {
                (1, String::new(), e.to_string())
            };
        }
    };
    match run(&cli) {
        Ok(s) => (0, s, String::new()),
        Err(e) => (e.code, String::new(), format!("error: {}\n", e.message)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        main_with_args(std::iter::once("diffops").chain(args.iter().copied()))
    }

    #[test]
    fn headline_examples() {
        assert_eq!(run_args(&["normalize", "d1*x1"]).1, "x1*d[1] + 1\n");
        assert_eq!(run_args(&["transpose", "d1"]).1, "-d[1]\n");
        assert_eq!(run_args(&["apply", "d[2]", "--to", "x1^4"]).1, "6*x1^2\n");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&["--char", "4", "normalize", "x1"]).0, 1);
        assert_eq!(run_args(&["normalize", "x1 +"]).0, 2);
        assert_eq!(run_args(&["level", "d1"]).0, 3);
        assert_eq!(
            run_args(&["--char", "2", "transpose", "d1", "--twist", "x1^2"]).0,
            3
        );
        assert_eq!(
            run_args(&["--char", "2", "matrix", "d[2]", "--e", "1"]).0,
            3
        );
    }

    #[test]
    fn nvars_inference() {
        assert_eq!(inferred_nvars(&["x3*d1"]), 3);
        assert_eq!(inferred_nvars(&["d[0,0,0,1]"]), 4);
        assert_eq!(inferred_nvars(&["1"]), 1);
        assert_eq!(inferred_nvars(&["x12"]), 12);
    }

    #[test]
    fn twist_splitting() {
        assert_eq!(split_top_level("x1^2,(x2 + 1)"), vec!["x1^2", "(x2 + 1)"]);
    }

    #[test]
    fn twisted_transpose_cli() {
        let (code, out, _) = run_args(&["transpose", "d1", "--twist", "x1^2"]);
        assert_eq!(code, 0);
        assert_eq!(out, "-d[1] + x1^2\n");
    }

    #[test]
    fn level_and_order() {
        assert_eq!(run_args(&["--char", "2", "level", "d[2]"]).1, "2\n");
        assert_eq!(run_args(&["order", "x1*d1 + d[3]"]).1, "3\n");
        assert_eq!(run_args(&["order", "0"]).1, "-1\n");
    }
}
