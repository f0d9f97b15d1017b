//! Differential operators on `S = k[x_1, …, x_n]` in normal form `Σ_α f_α ∂^[α]`.
//!
//! `D_{S|k}` is free as a left `S`-module on the divided powers `∂^[α]`, so an operator is
//! stored as the map `α ↦ f_α` with left coefficients, and two operators are equal exactly when
//! their maps are. Products are renormalized with
//! `∂^[α] f = Σ_{β+γ=α} ∂^[β](f) ∂^[γ]` and `∂^[α] ∂^[β] = C(α+β, α) ∂^[α+β]`.
//! In characteristic `p` the `∂^[α]` with some `α_i ≥ p` are independent generators, not
//! powers of first-order operators.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::coeffield::{multinomial_int, FieldElem, MultiExp};
use crate::error::{precondition, Error, Result};
use crate::polyring::{frobenius_power, join_signed, render_term, PolyRing, Polynomial};

/// `∂^[α](g)`, using `∂^[α](x^β) = C(β, α) x^{β−α}`.
pub fn partial_apply(alpha: &MultiExp, g: &Polynomial) -> Polynomial {
    let ring = g.ring();
    let spec = ring.spec();
    let mut out = ring.zero();
    for (beta, c) in g.terms() {
        if let Some(rest) = beta.checked_sub(alpha) {
            let binom = spec.from_biguint(&multinomial_int(beta, alpha));
            out.add_term(rest, &(c * &binom));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    ring: PolyRing,
    terms: BTreeMap<MultiExp, Polynomial>,
}

impl std::hash::Hash for DiffOp {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl DiffOp {
    pub fn zero(ring: &PolyRing) -> Self {
        DiffOp {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &PolyRing) -> Self {
        Self::from_poly(&ring.one())
    }

    /// The multiplication operator by `f`.
    pub fn from_poly(f: &Polynomial) -> Self {
        Self::term(f.clone(), MultiExp::zeros(f.ring().nvars()))
    }

    /// `∂^[α]`.
    pub fn partial(ring: &PolyRing, alpha: MultiExp) -> Result<Self> {
        ring.check_exp(&alpha)?;
        Ok(Self::term(ring.one(), alpha))
    }

    /// `∂_i = ∂^[e_i]`.
    pub fn partial_var(ring: &PolyRing, i: usize) -> Self {
        Self::term(ring.one(), MultiExp::unit(ring.nvars(), i))
    }

    /// `f ∂^[α]`; panics on arity mismatch.
    pub fn term(f: Polynomial, alpha: MultiExp) -> Self {
        assert_eq!(
            alpha.arity(),
            f.ring().nvars(),
            "operator exponent arity mismatch"
        );
        let mut terms = BTreeMap::new();
        let ring = f.ring().clone();
        if !f.is_zero() {
            terms.insert(alpha, f);
        }
        DiffOp { ring, terms }
    }

    pub fn from_terms(
        ring: &PolyRing,
        terms: impl IntoIterator<Item = (MultiExp, Polynomial)>,
    ) -> Result<Self> {
        let mut out = Self::zero(ring);
        for (alpha, f) in terms {
            ring.check_exp(&alpha)?;
            ring.check(f.ring())?;
            out.add_term(alpha, &f);
        }
        Ok(out)
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    /// The left coefficients `α ↦ f_α`.
    pub fn terms(&self) -> &BTreeMap<MultiExp, Polynomial> {
        &self.terms
    }

    pub fn coeff(&self, alpha: &MultiExp) -> Polynomial {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The polynomial if this operator lies in `S = D⁰`.
    pub fn as_poly(&self) -> Option<Polynomial> {
        let zero = MultiExp::zeros(self.ring.nvars());
        match self.terms.len() {
            0 => Some(self.ring.zero()),
            1 => self.terms.get(&zero).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, alpha: MultiExp, f: &Polynomial) {
        if f.is_zero() {
            return;
        }
        match self.terms.entry(alpha) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(f.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + f;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &FieldElem) -> DiffOp {
        let mut out = DiffOp::zero(&self.ring);
        for (a, f) in &self.terms {
            out.add_term(a.clone(), &f.scalar_mul(c));
        }
        out
    }

    /// Left multiplication by a polynomial.
    pub fn left_mul_poly(&self, g: &Polynomial) -> Result<DiffOp> {
        self.ring.check(g.ring())?;
        let mut out = DiffOp::zero(&self.ring);
        for (a, f) in &self.terms {
            out.add_term(a.clone(), &(g * f));
        }
        Ok(out)
    }

    pub fn checked_add(&self, rhs: &DiffOp) -> Result<DiffOp> {
        self.ring.check(&rhs.ring)?;
        let mut out = self.clone();
        for (a, f) in &rhs.terms {
            out.add_term(a.clone(), f);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &DiffOp) -> Result<DiffOp> {
        self.checked_add(&-rhs)
    }

    /// `ξ(f)`.
    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial> {
        self.ring.check(f.ring())?;
        let mut out = self.ring.zero();
        for (alpha, coeff) in &self.terms {
            let d = partial_apply(alpha, f);
            if !d.is_zero() {
                out = &out + &(coeff * &d);
            }
        }
        Ok(out)
    }

    /// `ξ(1)`, the coefficient of `∂^[0]`.
    pub fn value_at_one(&self) -> Polynomial {
        self.coeff(&MultiExp::zeros(self.ring.nvars()))
    }

    /// The normal-ordered product `ξ · η`.
    pub fn checked_mul(&self, rhs: &DiffOp) -> Result<DiffOp> {
        self.ring.check(&rhs.ring)?;
        let spec = self.ring.spec();
        // Collect per output exponent before touching polynomials to limit reallocations.
        let mut out = DiffOp::zero(&self.ring);
        for (alpha, f) in &self.terms {
            let splits = alpha.divisors();
            for (beta, g) in &rhs.terms {
                // f ∂^[α] g ∂^[β] = Σ_{γ+δ=α} f ∂^[γ](g) C(δ+β, δ) ∂^[δ+β]
                for gamma in &splits {
                    let dg = partial_apply(gamma, g);
                    if dg.is_zero() {
                        continue;
                    }
                    let delta = alpha.checked_sub(gamma).expect("divisor");
                    let target = delta.try_add(beta)?;
                    let c = spec.from_biguint(&multinomial_int(&target, &delta));
                    if c.is_zero() {
                        continue;
                    }
                    out.add_term(target, &(f * &dg).scalar_mul(&c));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> DiffOp {
        let mut acc = DiffOp::one(&self.ring);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `[ξ, η] = ξη − ηξ`.
    pub fn bracket(&self, rhs: &DiffOp) -> Result<DiffOp> {
        self.checked_mul(rhs)?.checked_sub(&rhs.checked_mul(self)?)
    }

    /// `max{|α| : f_α ≠ 0}`, or −1 for the zero operator.
    pub fn order(&self) -> i64 {
        self.terms
            .keys()
            .map(|a| a.degree() as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Highest total degree of a coefficient polynomial, −1 for zero.
    pub fn coeff_degree(&self) -> i64 {
        self.terms
            .values()
            .filter_map(|f| f.degree())
            .map(|d| d as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Order computed from the bracket definition alone: `ξ` has order ≤ `n` iff every
    /// bracket `[ξ, m]` has order ≤ `n − 1`, with only `0` in order −1.
    ///
    /// Brackets are taken against every non-constant monomial of degree ≤ `degree_bound`,
    /// level by level, until everything vanishes. This is a test device: bracketing against
    /// finitely many monomials is not claimed to characterize order in general.
    pub fn order_by_bracket_oracle(&self, degree_bound: u32) -> Result<i64> {
        if self.is_zero() {
            return precondition("bracket oracle needs a nonzero operator");
        }
        let probes: Vec<DiffOp> = MultiExp::all_up_to_degree(self.ring.nvars(), degree_bound)
            .into_iter()
            .filter(|e| !e.is_zero())
            .map(|e| DiffOp::from_poly(&self.ring.monomial(e, self.ring.spec().one())))
            .collect();
        let mut frontier: Vec<DiffOp> = vec![self.clone()];
        let mut depth = -1i64;
        while !frontier.is_empty() {
            depth += 1;
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for op in &frontier {
                for m in &probes {
                    let b = op.bracket(m)?;
                    if !b.is_zero() && seen.insert(b.clone()) {
                        next.push(b);
                    }
                }
            }
            frontier = next;
        }
        Ok(depth)
    }

    fn require_char_p(&self) -> Result<u64> {
        match self.ring.spec().characteristic() {
            0 => Err(Error::Characteristic {
                required: "p > 0",
                found: 0,
            }),
            p => Ok(p),
        }
    }

    /// Smallest `e` with every supported `α` satisfying `α_i < p^e`; 0 for the zero operator.
    pub fn level(&self) -> Result<u32> {
        let p = self.require_char_p()?;
        let top = self
            .terms
            .keys()
            .flat_map(|a| a.entries().iter().copied())
            .max()
            .unwrap_or(0);
        let mut e = 0u32;
        let mut q = 1u64;
        while q <= top as u64 {
            q *= p;
            e += 1;
        }
        Ok(e)
    }

    /// Whether `[ξ, m^{p^e}] = 0` for every monomial `m` of degree ≤ `degree_bound`.
    pub fn level_by_commutation_oracle(&self, e: u32, degree_bound: u32) -> Result<bool> {
        let p = self.require_char_p()?;
        let q = frobenius_power(p, e)?;
        for m in MultiExp::all_up_to_degree(self.ring.nvars(), degree_bound) {
            let f = self.ring.monomial(m.scale(q), self.ring.spec().one());
            if !self.bracket(&DiffOp::from_poly(&f))?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Order ≤ 1, kills constants, and satisfies the Leibniz rule on its normal form.
    pub fn is_derivation(&self) -> bool {
        self.order() <= 1 && self.value_at_one().is_zero()
    }

    /// Splits an operator of order ≤ 1 as `ξ(1) + (ξ − ξ(1))`.
    pub fn split_first_order(&self) -> Result<(Polynomial, DiffOp)> {
        if self.order() > 1 {
            return precondition("operator has order above one");
        }
        let c = self.value_at_one();
        let rest = self.checked_sub(&DiffOp::from_poly(&c))?;
        Ok((c, rest))
    }

    /// Rebuilds the normal form of an operator known only through its values on monomials.
    ///
    /// `support` must be closed under `≤`; the result is the unique operator supported on
    /// `support` agreeing with `values` there, found by solving the unitriangular system
    /// `ξ(x^β) = Σ_{α≤β} f_α C(β, α) x^{β−α}` in increasing degree.
    pub fn from_monomial_values(
        ring: &PolyRing,
        support: &[MultiExp],
        mut values: impl FnMut(&MultiExp) -> Result<Polynomial>,
    ) -> Result<DiffOp> {
        let mut order: Vec<&MultiExp> = support.iter().collect();
        order.sort_by(|a, b| a.graded_cmp(b));
        let mut solved: BTreeMap<MultiExp, Polynomial> = BTreeMap::new();
        for beta in order {
            ring.check_exp(beta)?;
            let mut f = values(beta)?;
            ring.check(f.ring())?;
            for (alpha, g) in &solved {
                if let Some(rest) = beta.checked_sub(alpha) {
                    let c = ring.spec().from_biguint(&multinomial_int(beta, alpha));
                    f.add_shifted(g, &rest, &-c);
                }
            }
            solved.insert(beta.clone(), f);
        }
        DiffOp::from_terms(ring, solved)
    }

    /// Terms in printing order: descending `|α|`, then descending lex.
    pub fn sorted_terms(&self) -> Vec<(&MultiExp, &Polynomial)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.graded_cmp(a.0));
        v
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (alpha, coeff) in self.sorted_terms() {
            if alpha.is_zero() {
                for (e, c) in coeff.sorted_terms() {
                    parts.push(render_term(c, &Polynomial::render_monomial(&self.ring, e)));
                }
                continue;
            }
            let d = format!("d{alpha}");
            if coeff.nterms() == 1 {
                let (e, c) = coeff.terms().iter().next().unwrap();
                let mono = Polynomial::render_monomial(&self.ring, e);
                let body = if mono.is_empty() {
                    d
                } else {
                    format!("{mono}*{d}")
                };
                parts.push(render_term(c, &body));
            } else {
                parts.push((false, format!("({coeff})*{d}")));
            }
        }
        write!(f, "{}", join_signed(parts))
    }
}

impl<'a> Add<&'a DiffOp> for &'a DiffOp {
    type Output = DiffOp;
    fn add(self, rhs: &DiffOp) -> DiffOp {
        self.checked_add(rhs)
            .expect("operators from different rings")
    }
}

impl<'a> Sub<&'a DiffOp> for &'a DiffOp {
    type Output = DiffOp;
    fn sub(self, rhs: &DiffOp) -> DiffOp {
        self.checked_sub(rhs)
            .expect("operators from different rings")
    }
}

impl<'a> Mul<&'a DiffOp> for &'a DiffOp {
    type Output = DiffOp;
    fn mul(self, rhs: &DiffOp) -> DiffOp {
        self.checked_mul(rhs)
            .expect("operators from different rings")
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        DiffOp {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(a, f)| (a.clone(), -f)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffield::FieldSpec;

    fn ring(p: u64, n: usize) -> PolyRing {
        PolyRing::with_nvars(FieldSpec::new(p).unwrap(), n).unwrap()
    }

    fn d(r: &PolyRing, a: &[u32]) -> DiffOp {
        DiffOp::partial(r, MultiExp::new(a.to_vec())).unwrap()
    }

    fn x(r: &PolyRing, i: usize) -> DiffOp {
        DiffOp::from_poly(&r.var(i))
    }

    #[test]
    fn apply_divided_power() {
        let q = ring(0, 1);
        let x4 = q.var(0).pow(4);
        assert_eq!(
            d(&q, &[2]).apply(&x4).unwrap(),
            q.var(0).pow(2).scalar_mul(&q.spec().from_i64(6))
        );
        let f2 = ring(2, 1);
        assert!(d(&f2, &[2]).apply(&f2.var(0).pow(4)).unwrap().is_zero());
        let f = &q.var(0).pow(3) + &q.from_i64(7);
        assert_eq!(d(&q, &[0]).apply(&f).unwrap(), f);
    }

    #[test]
    fn apply_is_left_linear_in_coefficients() {
        let q = ring(0, 2);
        let f = &q.var(0) + &q.var(1).pow(2);
        let xi = &d(&q, &[1, 1]) + &x(&q, 0);
        let g = &q.var(0).pow(3) * &q.var(1).pow(2);
        let lhs = xi.left_mul_poly(&f).unwrap().apply(&g).unwrap();
        assert_eq!(lhs, &f * &xi.apply(&g).unwrap());
    }

    #[test]
    fn weyl_relation_and_composition_rule() {
        let q = ring(0, 1);
        let prod = &d(&q, &[1]) * &x(&q, 0);
        assert_eq!(prod, &(&x(&q, 0) * &d(&q, &[1])) + &DiffOp::one(&q));
        assert_eq!(prod.to_string(), "x1*d[1] + 1");

        let sq = &d(&q, &[1]) * &d(&q, &[1]);
        assert_eq!(sq, d(&q, &[2]).scale(&q.spec().from_i64(2)));

        let p = &d(&q, &[2]) * &x(&q, 0);
        assert_eq!(p, &(&x(&q, 0) * &d(&q, &[2])) + &d(&q, &[1]));

        let f2 = ring(2, 1);
        assert!((&d(&f2, &[1]) * &d(&f2, &[1])).is_zero());
    }

    #[test]
    fn bracket_examples() {
        let q = ring(0, 1);
        assert_eq!(d(&q, &[1]).bracket(&x(&q, 0)).unwrap(), DiffOp::one(&q));
        let x2 = DiffOp::from_poly(&q.var(0).pow(2));
        assert!(x(&q, 0).bracket(&x2).unwrap().is_zero());
        let xd = &x(&q, 0) * &d(&q, &[1]);
        assert_eq!(xd.bracket(&x(&q, 0)).unwrap(), x(&q, 0));
    }

    #[test]
    fn order_examples() {
        let q = ring(0, 1);
        assert_eq!(DiffOp::from_poly(&q.var(0).pow(3)).order(), 0);
        assert_eq!((&(&x(&q, 0) * &d(&q, &[1])) + &d(&q, &[3])).order(), 3);
        assert_eq!(DiffOp::zero(&q).order(), -1);
    }

    #[test]
    fn bracket_oracle_examples() {
        let q = ring(0, 1);
        assert_eq!(d(&q, &[1]).order_by_bracket_oracle(2).unwrap(), 1);
        assert_eq!(x(&q, 0).order_by_bracket_oracle(2).unwrap(), 0);
        assert_eq!(d(&q, &[2]).order_by_bracket_oracle(2).unwrap(), 2);
        assert!(DiffOp::zero(&q).order_by_bracket_oracle(2).is_err());
    }

    #[test]
    fn level_examples() {
        let f2 = ring(2, 1);
        assert_eq!(DiffOp::from_poly(&f2.var(0).pow(5)).level().unwrap(), 0);
        assert_eq!(d(&f2, &[1]).level().unwrap(), 1);
        assert_eq!(d(&f2, &[2]).level().unwrap(), 2);
        assert_eq!(DiffOp::zero(&f2).level().unwrap(), 0);
        assert!(d(&ring(0, 1), &[1]).level().is_err());
    }

    #[test]
    fn commutation_oracle_examples() {
        let f2 = ring(2, 1);
        assert!(d(&f2, &[1]).level_by_commutation_oracle(1, 3).unwrap());
        assert!(!d(&f2, &[1]).level_by_commutation_oracle(0, 3).unwrap());
        assert!(x(&f2, 0).level_by_commutation_oracle(0, 3).unwrap());
        // [∂^[2], x²] = 2x∂ + 1 = 1 in char 2
        let b = d(&f2, &[2])
            .bracket(&DiffOp::from_poly(&f2.var(0).pow(2)))
            .unwrap();
        assert_eq!(b, DiffOp::one(&f2));
        assert!(!d(&f2, &[2]).level_by_commutation_oracle(1, 3).unwrap());
        assert!(d(&f2, &[2]).level_by_commutation_oracle(2, 3).unwrap());
    }

    #[test]
    fn reconstruct_from_values() {
        let q = ring(0, 2);
        let xi = &(&x(&q, 1) * &d(&q, &[2, 1])) + &(&d(&q, &[0, 1]) * &x(&q, 0));
        let support = MultiExp::all_up_to_degree(2, 3);
        let back = DiffOp::from_monomial_values(&q, &support, |b| {
            xi.apply(&q.monomial(b.clone(), q.spec().one()))
        })
        .unwrap();
        assert_eq!(back, xi);
    }

    #[test]
    fn first_order_split() {
        let q = ring(0, 2);
        let xi = &(&x(&q, 0) * &d(&q, &[1, 0])) + &DiffOp::from_poly(&q.var(1).pow(2));
        let (c, der) = xi.split_first_order().unwrap();
        assert_eq!(c, q.var(1).pow(2));
        assert!(der.is_derivation());
        assert!(d(&q, &[2, 0]).split_first_order().is_err());
    }

    #[test]
    fn display_forms() {
        let q = ring(0, 2);
        let xi =
            &(&d(&q, &[1, 0]) * &DiffOp::from_poly(&(&q.var(0) + &q.var(1)))) - &d(&q, &[0, 2]);
        assert_eq!(xi.to_string(), "-d[0,2] + (x1 + x2)*d[1,0] + 1");
        assert_eq!(DiffOp::zero(&q).to_string(), "0");
        let f3 = ring(3, 1);
        assert_eq!((-&d(&f3, &[1])).to_string(), "2*d[1]");
    }
}
