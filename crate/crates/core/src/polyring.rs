//! The commutative polynomial ring `S = k[x_1, …, x_n]`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::coeffield::{FieldElem, FieldSpec, MultiExp};
use crate::error::{Error, Result};

/// A polynomial ring over an exact field with named variables.
#[derive(Clone, Debug)]
pub struct PolyRing {
    spec: FieldSpec,
    names: Arc<[String]>,
}

impl PartialEq for PolyRing {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
            && (Arc::ptr_eq(&self.names, &other.names) || self.names == other.names)
    }
}

impl Eq for PolyRing {}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PolyRing {
    pub fn new(spec: FieldSpec, names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Invalid(
                "a polynomial ring needs at least one variable".into(),
            ));
        }
        for (i, n) in names.iter().enumerate() {
            if !valid_identifier(n) {
                return Err(Error::Invalid(format!(
                    "`{n}` is not a valid variable name"
                )));
            }
            if n.starts_with('d') && n.len() > 1 && n[1..].chars().all(|c| c.is_ascii_digit()) {
                return Err(Error::Invalid(format!(
                    "`{n}` collides with operator syntax"
                )));
            }
            if n == "d" || names[..i].contains(n) {
                return Err(Error::Invalid(format!(
                    "duplicate or reserved variable name `{n}`"
                )));
            }
        }
        Ok(PolyRing {
            spec,
            names: names.into(),
        })
    }

    /// `k[x1, …, xn]`.
    pub fn with_nvars(spec: FieldSpec, n: usize) -> Result<Self> {
        Self::new(spec, (1..=n).map(|i| format!("x{i}")).collect())
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.names
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn check(&self, other: &PolyRing) -> Result<()> {
        if self != other {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    pub fn check_exp(&self, e: &MultiExp) -> Result<()> {
        if e.arity() != self.nvars() {
            return Err(Error::ArityMismatch {
                expected: self.nvars(),
                found: e.arity(),
            });
        }
        Ok(())
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial {
            ring: self.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> Polynomial {
        self.constant(self.spec.one())
    }

    pub fn constant(&self, c: FieldElem) -> Polynomial {
        self.monomial(MultiExp::zeros(self.nvars()), c)
    }

    pub fn from_i64(&self, c: i64) -> Polynomial {
        self.constant(self.spec.from_i64(c))
    }

    pub fn var(&self, i: usize) -> Polynomial {
        self.monomial(MultiExp::unit(self.nvars(), i), self.spec.one())
    }

    /// `c · x^e`; panics on arity mismatch.
    pub fn monomial(&self, e: MultiExp, c: FieldElem) -> Polynomial {
        assert_eq!(e.arity(), self.nvars(), "monomial arity mismatch");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Polynomial {
            ring: self.clone(),
            terms,
        }
    }

    pub fn from_terms(
        &self,
        terms: impl IntoIterator<Item = (MultiExp, FieldElem)>,
    ) -> Result<Polynomial> {
        let mut p = self.zero();
        for (e, c) in terms {
            self.check_exp(&e)?;
            if !self.spec.owns(&c) {
                return Err(Error::Invalid("coefficient from a different field".into()));
            }
            p.add_term(e, &c);
        }
        Ok(p)
    }
}

/// An element of `S`: a finitely supported map from exponents to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    ring: PolyRing,
    terms: BTreeMap<MultiExp, FieldElem>,
}

impl std::hash::Hash for Polynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl Polynomial {
    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<MultiExp, FieldElem> {
        &self.terms
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &MultiExp) -> FieldElem {
        self.terms
            .get(e)
            .cloned()
            .unwrap_or_else(|| self.ring.spec.zero())
    }

    /// The value if this polynomial is a constant (including zero).
    pub fn as_constant(&self) -> Option<FieldElem> {
        match self.terms.len() {
            0 => Some(self.ring.spec.zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(e, _)| e.is_zero())
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().map(MultiExp::degree).max()
    }

    /// Indices of variables that occur with positive exponent.
    pub fn variables_used(&self) -> Vec<usize> {
        (0..self.ring.nvars())
            .filter(|&i| self.terms.keys().any(|e| e.entries()[i] > 0))
            .collect()
    }

    pub(crate) fn add_term(&mut self, e: MultiExp, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub(crate) fn add_scaled(&mut self, other: &Polynomial, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        for (e, d) in &other.terms {
            self.add_term(e.clone(), &(d * c));
        }
    }

    /// `self += c · x^shift · other`.
    pub(crate) fn add_shifted(&mut self, other: &Polynomial, shift: &MultiExp, c: &FieldElem) {
        if c.is_zero() {
            return;
        }
        for (e, d) in &other.terms {
            self.add_term(e.try_add(shift).expect("arity checked"), &(d * c));
        }
    }

    pub fn checked_add(&self, rhs: &Polynomial) -> Result<Polynomial> {
        self.ring.check(&rhs.ring)?;
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &Polynomial) -> Result<Polynomial> {
        self.checked_add(&-rhs)
    }

    pub fn checked_mul(&self, rhs: &Polynomial) -> Result<Polynomial> {
        self.ring.check(&rhs.ring)?;
        let mut out = self.ring.zero();
        for (e, c) in &self.terms {
            out.add_shifted(rhs, e, c);
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &FieldElem) -> Polynomial {
        let mut out = self.ring.zero();
        out.add_scaled(self, c);
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitutes `x_j ↦ m.images[j]`.
    pub fn apply_ring_map(&self, m: &RingMap) -> Result<Polynomial> {
        self.ring.check(&m.ring)?;
        let n = self.ring.nvars();
        // Cache powers of the images; exponents are small at desk scale.
        let mut powers: Vec<Vec<Polynomial>> = vec![vec![self.ring.one()]; n];
        let mut out = self.ring.zero();
        for (e, c) in &self.terms {
            let mut term = self.ring.constant(c.clone());
            for (j, &a) in e.entries().iter().enumerate() {
                while powers[j].len() <= a as usize {
                    let next = powers[j].last().unwrap() * &m.images[j];
                    powers[j].push(next);
                }
                if a > 0 {
                    term = &term * &powers[j][a as usize];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Writes `f = Σ_λ g_λ^{p^e} x^λ` with `0 ≤ λ_i < p^e`, returning the roots `g_λ`.
    ///
    /// Coefficients of `g_λ` are the coefficients of `f` themselves, since `c^p = c` in 𝔽_p.
    pub fn frobenius_decompose(&self, e: u32) -> Result<BTreeMap<MultiExp, Polynomial>> {
        let p = self.ring.spec.characteristic();
        if p == 0 {
            return Err(Error::Characteristic {
                required: "p > 0",
                found: 0,
            });
        }
        let q = frobenius_power(p, e)?;
        let mut out: BTreeMap<MultiExp, Polynomial> = BTreeMap::new();
        for (exp, c) in &self.terms {
            let digits = MultiExp::new(exp.entries().iter().map(|&a| a % q).collect());
            let quot = MultiExp::new(exp.entries().iter().map(|&a| a / q).collect());
            out.entry(digits)
                .or_insert_with(|| self.ring.zero())
                .add_term(quot, c);
        }
        Ok(out)
    }

    /// `g ↦ g^{p^e}`, the embedding of `S` onto its subring of `p^e`-th powers.
    pub fn frobenius_embed(&self, e: u32) -> Result<Polynomial> {
        let p = self.ring.spec.characteristic();
        if p == 0 {
            return Err(Error::Characteristic {
                required: "p > 0",
                found: 0,
            });
        }
        let q = frobenius_power(p, e)?;
        let mut out = self.ring.zero();
        for (exp, c) in &self.terms {
            out.add_term(exp.scale(q), c);
        }
        Ok(out)
    }

    /// Terms in printing order: descending graded order.
    pub fn sorted_terms(&self) -> Vec<(&MultiExp, &FieldElem)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.graded_cmp(a.0));
        v
    }

    /// Renders `x1^2*x2` for an exponent; empty string for `x^0`.
    pub fn render_monomial(ring: &PolyRing, e: &MultiExp) -> String {
        let mut parts = Vec::new();
        for (i, &a) in e.entries().iter().enumerate() {
            match a {
                0 => {}
                1 => parts.push(ring.names[i].clone()),
                _ => parts.push(format!("{}^{}", ring.names[i], a)),
            }
        }
        parts.join("*")
    }
}

pub(crate) fn frobenius_power(p: u64, e: u32) -> Result<u32> {
    u32::try_from(p)
        .ok()
        .and_then(|p| p.checked_pow(e))
        .ok_or_else(|| Error::Invalid(format!("p^e = {p}^{e} is too large")))
}

/// Renders a single signed term `c*m`; returns (is_negative, body).
pub(crate) fn render_term(c: &FieldElem, mono: &str) -> (bool, String) {
    let neg = c.is_negative();
    let abs = if neg { -c } else { c.clone() };
    let body = match (abs.is_one(), mono.is_empty()) {
        (_, true) => abs.to_string(),
        (true, false) => mono.to_string(),
        (false, false) => format!("{abs}*{mono}"),
    };
    (neg, body)
}

pub(crate) fn join_signed(parts: impl IntoIterator<Item = (bool, String)>) -> String {
    let mut s = String::new();
    for (i, (neg, body)) in parts.into_iter().enumerate() {
        match (i, neg) {
            (0, false) => s.push_str(&body),
            (0, true) => {
                s.push('-');
                s.push_str(&body);
            }
            (_, false) => {
                s.push_str(" + ");
                s.push_str(&body);
            }
            (_, true) => {
                s.push_str(" - ");
                s.push_str(&body);
            }
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self
            .sorted_terms()
            .into_iter()
            .map(|(e, c)| render_term(c, &Polynomial::render_monomial(&self.ring, e)));
        write!(f, "{}", join_signed(parts))
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs)
            .expect("polynomials from different rings")
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs)
            .expect("polynomials from different rings")
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs)
            .expect("polynomials from different rings")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

/// A `k`-algebra endomorphism of `S` given by the images of the variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingMap {
    ring: PolyRing,
    images: Vec<Polynomial>,
    inverse: Option<Vec<Polynomial>>,
}

impl RingMap {
    pub fn new(ring: &PolyRing, images: Vec<Polynomial>) -> Result<Self> {
        if images.len() != ring.nvars() {
            return Err(Error::ArityMismatch {
                expected: ring.nvars(),
                found: images.len(),
            });
        }
        for img in &images {
            ring.check(img.ring())?;
        }
        Ok(RingMap {
            ring: ring.clone(),
            images,
            inverse: None,
        })
    }

    pub fn identity(ring: &PolyRing) -> Self {
        let images: Vec<_> = (0..ring.nvars()).map(|i| ring.var(i)).collect();
        RingMap {
            ring: ring.clone(),
            images: images.clone(),
            inverse: Some(images),
        }
    }

    /// Attaches a candidate inverse, verified by composing both ways on every variable.
    pub fn with_inverse(self, inverse_images: Vec<Polynomial>) -> Result<Self> {
        let inv = RingMap::new(&self.ring, inverse_images)?;
        let there = self.compose(&inv)?;
        let back = inv.compose(&self)?;
        let id = RingMap::identity(&self.ring);
        if there.images != id.images || back.images != id.images {
            return Err(Error::Precondition(
                "supplied inverse does not invert the map".into(),
            ));
        }
        Ok(RingMap {
            inverse: Some(inv.images),
            ..self
        })
    }

    /// The linear substitution `x_j ↦ Σ_i g_{ij} x_i` for a square matrix `g`.
    pub fn linear(ring: &PolyRing, matrix: &[Vec<FieldElem>]) -> Result<Self> {
        let n = ring.nvars();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::ArityMismatch {
                expected: n,
                found: matrix.len(),
            });
        }
        let images = (0..n)
            .map(|j| {
                let mut img = ring.zero();
                for (i, row) in matrix.iter().enumerate() {
                    img.add_term(MultiExp::unit(n, i), &row[j]);
                }
                img
            })
            .collect();
        RingMap::new(ring, images)
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn inverse(&self) -> Option<RingMap> {
        self.inverse.as_ref().map(|inv| RingMap {
            ring: self.ring.clone(),
            images: inv.clone(),
            inverse: Some(self.images.clone()),
        })
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse.is_some()
    }

    /// Every image is homogeneous of degree one.
    pub fn is_linear(&self) -> bool {
        self.images
            .iter()
            .all(|p| !p.is_zero() && p.terms().keys().all(|e| e.degree() == 1))
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &RingMap) -> Result<RingMap> {
        self.ring.check(&other.ring)?;
        let images = other
            .images
            .iter()
            .map(|p| p.apply_ring_map(self))
            .collect::<Result<Vec<_>>>()?;
        let inverse = match (&self.inverse, &other.inverse) {
            (Some(_), Some(_)) => {
                let a = self.inverse().unwrap();
                let b = other.inverse().unwrap();
                Some(b.compose_plain(&a)?)
            }
            _ => None,
        };
        Ok(RingMap {
            ring: self.ring.clone(),
            images,
            inverse,
        })
    }

    fn compose_plain(&self, other: &RingMap) -> Result<Vec<Polynomial>> {
        other
            .images
            .iter()
            .map(|p| p.apply_ring_map(self))
            .collect()
    }

    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial> {
        f.apply_ring_map(self)
    }
}
