//! Finite linear groups acting on `S` and on `D_{S|k}`.
//!
//! `γ ∈ GL_n(k)` acts on variables by `γ·x_j = Σ_i γ_{ij} x_i` and on operators by
//! conjugation, `(γ·ξ)(f) = γ·ξ(γ⁻¹·f)`. Invariant operators are the ones computed here;
//! the invariant ring's own operator ring is only ever reached through them.

use serde_json::Value;

use crate::coeffield::{FieldElem, FieldSpec};
use crate::diffop::DiffOp;
use crate::error::{precondition, Error, Result};
use crate::linalg::Matrix;
use crate::polyring::{PolyRing, Polynomial, RingMap};
use crate::transpose::{standard_transpose, transport};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    matrix: Matrix,
}

impl GroupElement {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Invalid(
                "group element must be a square matrix".into(),
            ));
        }
        if matrix.rank() != matrix.nrows() {
            return Err(Error::Invalid("group element is not invertible".into()));
        }
        Ok(GroupElement { matrix })
    }

    pub fn from_rows(spec: FieldSpec, rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        Self::new(Matrix::from_rows(spec, rows)?)
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Self {
        GroupElement {
            matrix: Matrix::identity(spec, n),
        }
    }

    /// `diag(d_1, …, d_n)` from integers.
    pub fn diagonal(spec: FieldSpec, diag: &[i64]) -> Self {
        let mut m = Matrix::zeros(spec, diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = spec.from_i64(d);
        }
        Self::new(m).expect("diagonal entries must be nonzero in the field")
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == Matrix::identity(self.matrix.spec(), self.dim())
    }

    pub fn compose(&self, rhs: &GroupElement) -> GroupElement {
        GroupElement {
            matrix: &self.matrix * &rhs.matrix,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            matrix: self
                .matrix
                .inverse()
                .expect("group elements are invertible"),
        }
    }

    /// Nontrivial and fixing a hyperplane pointwise: `rank(γ − I) = 1`.
    pub fn is_pseudoreflection(&self) -> bool {
        let id = Matrix::identity(self.matrix.spec(), self.dim());
        self.matrix.sub(&id).rank() == 1
    }

    /// The linear substitution `x_j ↦ Σ_i γ_{ij} x_i`, with its inverse attached.
    pub fn ring_map(&self, ring: &PolyRing) -> Result<RingMap> {
        self.check_ring(ring)?;
        let inv = RingMap::linear(ring, &self.inverse().matrix.to_rows())?;
        RingMap::linear(ring, &self.matrix.to_rows())?.with_inverse(inv.images().to_vec())
    }

    fn check_ring(&self, ring: &PolyRing) -> Result<()> {
        if self.dim() != ring.nvars() {
            return Err(Error::ArityMismatch {
                expected: ring.nvars(),
                found: self.dim(),
            });
        }
        if self.matrix.spec() != ring.spec() {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }
}

pub fn is_pseudoreflection(g: &GroupElement) -> bool {
    g.is_pseudoreflection()
}

pub fn act_on_poly(g: &GroupElement, f: &Polynomial) -> Result<Polynomial> {
    f.apply_ring_map(&g.ring_map(f.ring())?)
}

pub fn act_on_op(g: &GroupElement, xi: &DiffOp) -> Result<DiffOp> {
    transport(&g.ring_map(xi.ring())?, xi)
}

/// A finite subgroup of `GL_n(k)` given by its complete element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    ring: PolyRing,
    elements: Vec<GroupElement>,
}

impl FiniteGroup {
    /// Verifies identity, closure under products, and inverses.
    pub fn new(ring: &PolyRing, elements: Vec<GroupElement>) -> Result<Self> {
        let mut uniq: Vec<GroupElement> = Vec::with_capacity(elements.len());
        for g in elements {
            g.check_ring(ring)?;
            if !uniq.contains(&g) {
                uniq.push(g);
            }
        }
        if !uniq.iter().any(GroupElement::is_identity) {
            return Err(Error::Invalid("group does not contain the identity".into()));
        }
        for g in &uniq {
            if !uniq.contains(&g.inverse()) {
                return Err(Error::Invalid("group is not closed under inverses".into()));
            }
            for h in &uniq {
                if !uniq.contains(&g.compose(h)) {
                    return Err(Error::Invalid("group is not closed under products".into()));
                }
            }
        }
        Ok(FiniteGroup {
            ring: ring.clone(),
            elements: uniq,
        })
    }

    /// The closure of `generators` under products; refuses to grow past `limit` elements.
    pub fn generated_by(
        ring: &PolyRing,
        generators: &[GroupElement],
        limit: usize,
    ) -> Result<Self> {
        let mut elements = vec![GroupElement::identity(ring.spec(), ring.nvars())];
        let mut frontier = elements.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for g in &frontier {
                for s in generators {
                    s.check_ring(ring)?;
                    let h = g.compose(s);
                    if !elements.contains(&h) {
                        elements.push(h.clone());
                        next.push(h);
                        if elements.len() > limit {
                            return Err(Error::Invalid(format!(
                                "group has more than {limit} elements"
                            )));
                        }
                    }
                }
            }
            frontier = next;
        }
        Self::new(ring, elements)
    }

    /// Loads a JSON list of row-major matrices; entries are integers or strings like `"-1/2"`.
    pub fn from_json(ring: &PolyRing, src: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(src).map_err(|e| Error::Invalid(format!("group file: {e}")))?;
        let list = value
            .as_array()
            .ok_or_else(|| Error::Invalid("group file must be a JSON list".into()))?;
        let spec = ring.spec();
        let elements = list
            .iter()
            .map(|m| {
                let rows = m
                    .as_array()
                    .ok_or_else(|| Error::Invalid("matrix must be a list of rows".into()))?;
                let rows = rows
                    .iter()
                    .map(|r| {
                        r.as_array()
                            .ok_or_else(|| Error::Invalid("row must be a list".into()))?
                            .iter()
                            .map(|x| parse_entry(spec, x))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                GroupElement::from_rows(spec, rows)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ring, elements)
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn pseudoreflections(&self) -> Vec<&GroupElement> {
        self.elements
            .iter()
            .filter(|g| g.is_pseudoreflection())
            .collect()
    }

    /// Whether `|G|` is invertible in `k`.
    pub fn order_invertible(&self) -> bool {
        !self.ring.spec().from_i64(self.order() as i64).is_zero()
    }

    pub fn reynolds(&self, xi: &DiffOp) -> Result<DiffOp> {
        self.ring.check(xi.ring())?;
        let inv = self
            .ring
            .spec()
            .from_i64(self.order() as i64)
            .inv()
            .ok_or_else(|| Error::Precondition("|G| vanishes in the coefficient field".into()))?;
        let mut acc = DiffOp::zero(&self.ring);
        for g in &self.elements {
            acc = &acc + &act_on_op(g, xi)?;
        }
        Ok(acc.scale(&inv))
    }

    pub fn reynolds_poly(&self, f: &Polynomial) -> Result<Polynomial> {
        let inv = self
            .ring
            .spec()
            .from_i64(self.order() as i64)
            .inv()
            .ok_or_else(|| Error::Precondition("|G| vanishes in the coefficient field".into()))?;
        let mut acc = self.ring.zero();
        for g in &self.elements {
            acc = &acc + &act_on_poly(g, f)?;
        }
        Ok(acc.scalar_mul(&inv))
    }

    pub fn is_invariant(&self, xi: &DiffOp) -> Result<bool> {
        for g in &self.elements {
            if &act_on_op(g, xi)? != xi {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `Φ(γ·ξ) = γ·Φ(ξ)` for every `γ`, with `Φ` the standard transposition.
    pub fn equivariance_check(&self, xi: &DiffOp) -> Result<bool> {
        if !self.ring.spec().is_zero_char() {
            return Err(Error::Characteristic {
                required: "0",
                found: self.ring.spec().characteristic(),
            });
        }
        self.equivariance_check_any_char(xi)
    }

    /// The same check without the characteristic guard, for experiments in characteristic `p`.
    pub fn equivariance_check_any_char(&self, xi: &DiffOp) -> Result<bool> {
        let phi = standard_transpose(xi);
        for g in &self.elements {
            if standard_transpose(&act_on_op(g, xi)?) != act_on_op(g, &phi)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Each `γ·∂_i` is a derivation with constant coefficients.
    pub fn dual_action_is_constant(&self) -> Result<bool> {
        for g in &self.elements {
            for i in 0..self.ring.nvars() {
                let image = act_on_op(g, &DiffOp::partial_var(&self.ring, i))?;
                if !image.is_derivation() || image.coeff_degree() > 0 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn parse_entry(spec: FieldSpec, x: &Value) -> Result<FieldElem> {
    let bad = || Error::Invalid(format!("bad matrix entry {x}"));
    match x {
        Value::Number(n) => Ok(spec.from_i64(n.as_i64().ok_or_else(bad)?)),
        Value::String(s) => {
            let (num, den) = match s.split_once('/') {
                Some((a, b)) => (a.trim(), b.trim()),
                None => (s.trim(), "1"),
            };
            let num: num_bigint::BigInt = num.parse().map_err(|_| bad())?;
            let den: num_bigint::BigInt = den.parse().map_err(|_| bad())?;
            spec.from_ratio(&num, &den)
        }
        _ => Err(bad()),
    }
}

/// The group `{±I}` acting on `k[s, t]`, whose invariants are `k[s², st, t²]`.
pub fn sign_group(ring: &PolyRing) -> Result<FiniteGroup> {
    let n = ring.nvars();
    let spec = ring.spec();
    if spec.characteristic() == 2 {
        return precondition("−I is the identity in characteristic 2");
    }
    FiniteGroup::new(
        ring,
        vec![
            GroupElement::identity(spec, n),
            GroupElement::diagonal(spec, &vec![-1; n]),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffield::MultiExp;

    fn st() -> PolyRing {
        PolyRing::new(FieldSpec::rationals(), vec!["s".into(), "t".into()]).unwrap()
    }

    fn d(r: &PolyRing, a: &[u32]) -> DiffOp {
        DiffOp::partial(r, MultiExp::new(a.to_vec())).unwrap()
    }

    #[test]
    fn pseudoreflection_examples() {
        let q = FieldSpec::rationals();
        assert!(GroupElement::diagonal(q, &[-1, 1]).is_pseudoreflection());
        assert!(!GroupElement::diagonal(q, &[-1, -1]).is_pseudoreflection());
        assert!(!GroupElement::identity(q, 2).is_pseudoreflection());
    }

    #[test]
    fn action_on_polynomials() {
        let r = st();
        let sigma = GroupElement::diagonal(r.spec(), &[-1, -1]);
        let (s, t) = (r.var(0), r.var(1));
        assert_eq!(act_on_poly(&sigma, &(&s * &t)).unwrap(), &s * &t);
        assert_eq!(act_on_poly(&sigma, &s).unwrap(), -&s);
        let f = &s.pow(3) + &t;
        assert_eq!(
            act_on_poly(&GroupElement::identity(r.spec(), 2), &f).unwrap(),
            f
        );
    }

    #[test]
    fn action_on_operators() {
        let r = st();
        let sigma = GroupElement::diagonal(r.spec(), &[-1, -1]);
        let s_ds = &DiffOp::from_poly(&r.var(0)) * &d(&r, &[1, 0]);
        assert_eq!(act_on_op(&sigma, &s_ds).unwrap(), s_ds);
        assert_eq!(
            act_on_op(&sigma, &d(&r, &[1, 0])).unwrap(),
            -&d(&r, &[1, 0])
        );
        let id = GroupElement::identity(r.spec(), 2);
        assert_eq!(act_on_op(&id, &s_ds).unwrap(), s_ds);
    }

    #[test]
    fn action_matches_function_oracle() {
        // (γ·ξ)(f) = γ·ξ(γ⁻¹·f), evaluated pointwise on monomials.
        let r = st();
        let q = r.spec();
        let g = GroupElement::from_rows(
            q,
            vec![
                vec![q.from_i64(1), q.from_i64(2)],
                vec![q.from_i64(0), q.from_i64(-1)],
            ],
        )
        .unwrap();
        let xi = &(&DiffOp::from_poly(&r.var(1).pow(2)) * &d(&r, &[1, 1])) + &d(&r, &[0, 1]);
        let moved = act_on_op(&g, &xi).unwrap();
        for m in MultiExp::all_up_to_degree(2, 4) {
            let f = r.monomial(m, q.one());
            let expect = act_on_poly(
                &g,
                &xi.apply(&act_on_poly(&g.inverse(), &f).unwrap()).unwrap(),
            )
            .unwrap();
            assert_eq!(moved.apply(&f).unwrap(), expect);
        }
    }

    #[test]
    fn reynolds_examples() {
        let r = st();
        let g = sign_group(&r).unwrap();
        let s_ds = &DiffOp::from_poly(&r.var(0)) * &d(&r, &[1, 0]);
        assert_eq!(g.reynolds(&s_ds).unwrap(), s_ds);
        assert!(g.reynolds(&DiffOp::from_poly(&r.var(0))).unwrap().is_zero());
        assert_eq!(g.reynolds(&DiffOp::one(&r)).unwrap(), DiffOp::one(&r));
    }

    #[test]
    fn invariance_examples() {
        let r = st();
        let g = sign_group(&r).unwrap();
        assert!(!g.is_invariant(&DiffOp::from_poly(&r.var(0))).unwrap());
        assert!(g.is_invariant(&DiffOp::zero(&r)).unwrap());
        assert!(g.pseudoreflections().is_empty());
    }

    #[test]
    fn equivariance_examples() {
        let r = st();
        let g = sign_group(&r).unwrap();
        assert!(g.equivariance_check(&d(&r, &[1, 0])).unwrap());
        let x = &DiffOp::from_poly(&r.var(0).pow(2)) * &d(&r, &[0, 1]);
        assert!(g.equivariance_check(&x).unwrap());
        assert!(g.equivariance_check(&DiffOp::one(&r)).unwrap());
    }

    #[test]
    fn closure_is_checked() {
        let r = st();
        let q = r.spec();
        let sigma = GroupElement::diagonal(q, &[-1, 1]);
        assert!(FiniteGroup::new(&r, vec![sigma.clone()]).is_err());
        let rot = GroupElement::from_rows(
            q,
            vec![vec![q.zero(), q.from_i64(-1)], vec![q.one(), q.zero()]],
        )
        .unwrap();
        assert!(FiniteGroup::new(&r, vec![GroupElement::identity(q, 2), rot.clone()]).is_err());
        let c4 = FiniteGroup::generated_by(&r, std::slice::from_ref(&rot), 100).unwrap();
        assert_eq!(c4.order(), 4);
        let d4 = FiniteGroup::generated_by(&r, &[rot, sigma], 100).unwrap();
        assert_eq!(d4.order(), 8);
        assert_eq!(d4.pseudoreflections().len(), 4);
    }

    #[test]
    fn group_from_json() {
        let r = st();
        let g = FiniteGroup::from_json(&r, r#"[[[1,0],[0,1]], [["-1","0"],[0,-1]]]"#).unwrap();
        assert_eq!(g.order(), 2);
        assert!(FiniteGroup::from_json(&r, r#"[[[1,0],[0,1]], [[2,0],[0,1]]]"#).is_err());
        assert!(FiniteGroup::from_json(&r, r#"{"a": 1}"#).is_err());
        assert!(FiniteGroup::from_json(&r, r#"[[[1,0,0],[0,1,0],[0,0,1]]]"#).is_err());
    }

    #[test]
    fn reynolds_needs_invertible_order() {
        let r = PolyRing::with_nvars(FieldSpec::prime(2).unwrap(), 2).unwrap();
        let q = r.spec();
        let swap =
            GroupElement::from_rows(q, vec![vec![q.zero(), q.one()], vec![q.one(), q.zero()]])
                .unwrap();
        let g = FiniteGroup::generated_by(&r, &[swap], 10).unwrap();
        assert!(!g.order_invertible());
        assert!(g.reynolds(&DiffOp::one(&r)).is_err());
        assert!(g.equivariance_check(&DiffOp::one(&r)).is_err());
        assert!(g
            .equivariance_check_any_char(&DiffOp::partial_var(&r, 0))
            .unwrap());
    }
}
