//! Text syntax for operators: parsing, evaluation to normal form, and the JSON schema.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (['*'] unary)*          juxtaposition multiplies; never commutes
//! unary   := '-' unary | power
//! power   := atom ['^' natural]
//! atom    := integer ['/' integer] | variable | d[a1,...,an] | d<i> | d_<var> | '(' sum ')'
//! ```
//!
//! `d[α]` is the divided power `∂^[α]`; `d<i>` (1-based) and `d_<var>` are `∂^[e_i]`.
//! The canonical rendering is the `Display` of [`DiffOp`], which this grammar parses back.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::coeffield::{FieldElem, FieldSpec, MultiExp};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::polyring::{PolyRing, Polynomial};

pub const SCHEMA: &str = "weyl-op/1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpExpression {
    Integer(BigInt),
    Ratio(BigInt, BigInt),
    Var(usize),
    Partial(MultiExp),
    Neg(Box<OpExpression>),
    Add(Box<OpExpression>, Box<OpExpression>),
    Sub(Box<OpExpression>, Box<OpExpression>),
    Mul(Box<OpExpression>, Box<OpExpression>),
    Pow(Box<OpExpression>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Divided(Vec<u32>),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        column,
        message: message.into(),
    })
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut advance = |i: &mut usize, n: usize| {
            *i += n;
            col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(&mut i, 1);
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' | '·' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            advance(&mut i, 1);
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, 1);
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Spanned {
                tok: Tok::Int(s.parse().unwrap()),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance(&mut i, 1);
            }
            let ident: String = chars[start..i].iter().collect();
            if ident == "d" && i < chars.len() && chars[i] == '[' {
                advance(&mut i, 1);
                let close = match chars[i..].iter().position(|&ch| ch == ']') {
                    Some(k) => i + k,
                    None => return err(l0, c0, "unterminated d[...]"),
                };
                let body: String = chars[i..close].iter().collect();
                let mut alpha = Vec::new();
                for part in body.split(',') {
                    let part = part.trim();
                    match part.parse::<u32>() {
                        Ok(a) => alpha.push(a),
                        Err(_) if part.starts_with('-') => {
                            return err(l0, c0, "negative exponent in d[...]")
                        }
                        Err(_) => return err(l0, c0, format!("bad exponent `{part}` in d[...]")),
                    }
                }
                let n = close + 1 - i;
                advance(&mut i, n);
                out.push(Spanned {
                    tok: Tok::Divided(alpha),
                    line: l0,
                    column: c0,
                });
            } else {
                out.push(Spanned {
                    tok: Tok::Ident(ident),
                    line: l0,
                    column: c0,
                });
            }
            continue;
        }
        return err(l0, c0, format!("unexpected character `{c}`"));
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    ring: &'a PolyRing,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn sum(&mut self) -> Result<OpExpression> {
        let mut lhs = self.product()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = OpExpression::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = OpExpression::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<OpExpression> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    lhs = OpExpression::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Int(_) | Tok::Ident(_) | Tok::Divided(_) | Tok::LParen => {
                    lhs = OpExpression::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<OpExpression> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(OpExpression::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<OpExpression> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let t = self.bump();
        match t.tok {
            Tok::Int(k) => {
                let k =
                    u32::try_from(&k).or_else(|_| err(t.line, t.column, "exponent too large"))?;
                Ok(OpExpression::Pow(Box::new(base), k))
            }
            Tok::Minus => err(t.line, t.column, "negative exponent"),
            _ => err(t.line, t.column, "expected a natural exponent after `^`"),
        }
    }

    fn atom(&mut self) -> Result<OpExpression> {
        let t = self.bump();
        match t.tok {
            Tok::Int(n) => {
                if self.peek().tok == Tok::Slash {
                    self.bump();
                    let d = self.bump();
                    match d.tok {
                        Tok::Int(den) => Ok(OpExpression::Ratio(n, den)),
                        _ => err(d.line, d.column, "expected an integer denominator"),
                    }
                } else {
                    Ok(OpExpression::Integer(n))
                }
            }
            Tok::Divided(alpha) => {
                if alpha.len() != self.ring.nvars() {
                    return err(
                        t.line,
                        t.column,
                        format!(
                            "d[...] needs {} entries, got {}",
                            self.ring.nvars(),
                            alpha.len()
                        ),
                    );
                }
                Ok(OpExpression::Partial(MultiExp::new(alpha)))
            }
            Tok::Ident(name) => self.identifier(&name, t.line, t.column),
            Tok::LParen => {
                let inner = self.sum()?;
                let close = self.bump();
                if close.tok != Tok::RParen {
                    return err(close.line, close.column, "expected `)`");
                }
                Ok(inner)
            }
            Tok::End => err(t.line, t.column, "unexpected end of input"),
            other => err(t.line, t.column, format!("unexpected token {other:?}")),
        }
    }

    fn identifier(&self, name: &str, line: usize, column: usize) -> Result<OpExpression> {
        let n = self.ring.nvars();
        if let Some(i) = self.ring.var_index(name) {
            return Ok(OpExpression::Var(i));
        }
        if let Some(var) = name.strip_prefix("d_") {
            if let Some(i) = self.ring.var_index(var) {
                return Ok(OpExpression::Partial(MultiExp::unit(n, i)));
            }
        }
        if let Some(idx) = name.strip_prefix('d') {
            if let Ok(i) = idx.parse::<usize>() {
                if (1..=n).contains(&i) {
                    return Ok(OpExpression::Partial(MultiExp::unit(n, i - 1)));
                }
                return err(
                    line,
                    column,
                    format!("`{name}`: derivative index out of range 1..={n}"),
                );
            }
        }
        err(line, column, format!("unknown identifier `{name}`"))
    }
}

pub fn parse(src: &str, ring: &PolyRing) -> Result<OpExpression> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        ring,
    };
    let e = p.sum()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return err(t.line, t.column, "trailing input");
    }
    Ok(e)
}

pub fn eval(expr: &OpExpression, ring: &PolyRing) -> Result<DiffOp> {
    Ok(match expr {
        OpExpression::Integer(n) => DiffOp::from_poly(&ring.constant(ring.spec().from_bigint(n))),
        OpExpression::Ratio(n, d) => {
            DiffOp::from_poly(&ring.constant(ring.spec().from_ratio(n, d)?))
        }
        OpExpression::Var(i) => DiffOp::from_poly(&ring.var(*i)),
        OpExpression::Partial(a) => DiffOp::partial(ring, a.clone())?,
        OpExpression::Neg(a) => -&eval(a, ring)?,
        OpExpression::Add(a, b) => eval(a, ring)?.checked_add(&eval(b, ring)?)?,
        OpExpression::Sub(a, b) => eval(a, ring)?.checked_sub(&eval(b, ring)?)?,
        OpExpression::Mul(a, b) => eval(a, ring)?.checked_mul(&eval(b, ring)?)?,
        OpExpression::Pow(a, k) => eval(a, ring)?.pow(*k),
    })
}

pub fn parse_op(src: &str, ring: &PolyRing) -> Result<DiffOp> {
    eval(&parse(src, ring)?, ring)
}

/// Parses an expression that must evaluate to a polynomial.
pub fn parse_poly(src: &str, ring: &PolyRing) -> Result<Polynomial> {
    parse_op(src, ring)?
        .as_poly()
        .ok_or_else(|| Error::Precondition(format!("`{src}` is not a polynomial")))
}

fn poly_terms_json(f: &Polynomial) -> Value {
    Value::Array(
        f.sorted_terms()
            .into_iter()
            .map(|(e, c)| json!({ "exponent": e, "coeff": c.to_string() }))
            .collect(),
    )
}

fn header(ring: &PolyRing, kind: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("kind".into(), json!(kind));
    m.insert("characteristic".into(), json!(ring.spec().characteristic()));
    m.insert("vars".into(), json!(ring.var_names()));
    m
}

pub fn op_to_json(xi: &DiffOp) -> Value {
    let mut m = header(xi.ring(), "operator");
    let terms: Vec<Value> = xi
        .sorted_terms()
        .into_iter()
        .map(|(a, f)| json!({ "exponent": a, "coefficient": poly_terms_json(f) }))
        .collect();
    m.insert("terms".into(), Value::Array(terms));
    Value::Object(m)
}

pub fn poly_to_json(f: &Polynomial) -> Value {
    let mut m = header(f.ring(), "polynomial");
    m.insert("terms".into(), poly_terms_json(f));
    Value::Object(m)
}

fn bad_json(msg: &str) -> Error {
    Error::Invalid(format!("operator JSON: {msg}"))
}

fn exp_from_json(v: &Value, n: usize) -> Result<MultiExp> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad_json("exponent must be a list"))?;
    let e = arr
        .iter()
        .map(|x| {
            x.as_u64()
                .and_then(|a| u32::try_from(a).ok())
                .ok_or_else(|| bad_json("bad exponent entry"))
        })
        .collect::<Result<Vec<_>>>()?;
    if e.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            found: e.len(),
        });
    }
    Ok(MultiExp::new(e))
}

fn coeff_from_str(spec: FieldSpec, s: &str) -> Result<FieldElem> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n.parse().map_err(|_| bad_json("bad coefficient"))?;
    let d: BigInt = d.parse().map_err(|_| bad_json("bad coefficient"))?;
    spec.from_ratio(&n, &d)
}

fn poly_from_terms_json(v: &Value, ring: &PolyRing) -> Result<Polynomial> {
    let arr = v.as_array().ok_or_else(|| bad_json("term list expected"))?;
    let terms = arr
        .iter()
        .map(|t| {
            let e = exp_from_json(&t["exponent"], ring.nvars())?;
            let c = coeff_from_str(
                ring.spec(),
                t["coeff"]
                    .as_str()
                    .ok_or_else(|| bad_json("coeff must be a string"))?,
            )?;
            Ok((e, c))
        })
        .collect::<Result<Vec<_>>>()?;
    ring.from_terms(terms)
}

/// Reads an operator document, rebuilding its ring from the header.
pub fn op_from_json(v: &Value) -> Result<DiffOp> {
    if v["schema"] != SCHEMA {
        return Err(bad_json("unknown schema"));
    }
    if v["kind"] != "operator" {
        return Err(bad_json("not an operator document"));
    }
    let spec = FieldSpec::new(
        v["characteristic"]
            .as_u64()
            .ok_or_else(|| bad_json("characteristic"))?,
    )?;
    let vars = v["vars"]
        .as_array()
        .ok_or_else(|| bad_json("vars"))?
        .iter()
        .map(|s| s.as_str().map(String::from).ok_or_else(|| bad_json("vars")))
        .collect::<Result<Vec<_>>>()?;
    let ring = PolyRing::new(spec, vars)?;
    let terms = v["terms"]
        .as_array()
        .ok_or_else(|| bad_json("terms"))?
        .iter()
        .map(|t| {
            Ok((
                exp_from_json(&t["exponent"], ring.nvars())?,
                poly_from_terms_json(&t["coefficient"], &ring)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    DiffOp::from_terms(&ring, terms)
}
