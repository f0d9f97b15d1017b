//! Anti-automorphisms of `D_{S|k}` fixing `S`.
//!
//! The standard transposition sends `f ∂^[α] ↦ (−1)^{|α|} ∂^[α] f` in every characteristic.
//! In characteristic zero, any `f_i` depending only on `x_i` gives another involutive
//! anti-automorphism `x_i ↦ x_i`, `∂_i ↦ −∂_i + f_i`; in characteristic `p` the standard one
//! is the only one, and the twisted construction is refused.

use crate::coeffield::MultiExp;
use crate::diffop::{partial_apply, DiffOp};
use crate::error::{precondition, Error, Result};
use crate::polyring::{PolyRing, Polynomial, RingMap};

/// `Φ(f ∂^[α]) = (−1)^{|α|} Σ_{β+γ=α} ∂^[β](f) ∂^[γ]`.
pub fn standard_transpose(xi: &DiffOp) -> DiffOp {
    let ring = xi.ring();
    let mut out = DiffOp::zero(ring);
    for (alpha, f) in xi.terms() {
        let sign = if alpha.degree() % 2 == 0 {
            ring.spec().one()
        } else {
            -ring.spec().one()
        };
        for beta in alpha.divisors() {
            let df = partial_apply(&beta, f);
            if df.is_zero() {
                continue;
            }
            let gamma = alpha.checked_sub(&beta).expect("divisor");
            let t = DiffOp::term(df.scalar_mul(&sign), gamma);
            out = &out + &t;
        }
    }
    out
}

/// The twisted transposition `∂_i ↦ −∂_i + f_i`, extended anti-multiplicatively.
pub fn twisted_transpose(twist: &[Polynomial], xi: &DiffOp) -> Result<DiffOp> {
    AntiAutomorphism::twisted(xi.ring(), twist.to_vec())?.apply(xi)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AntiAutomorphism {
    Standard,
    /// One polynomial per variable, `f_i ∈ k[x_i]`; characteristic zero only.
    Twisted(Vec<Polynomial>),
}

impl AntiAutomorphism {
    pub fn twisted(ring: &PolyRing, twist: Vec<Polynomial>) -> Result<Self> {
        if !ring.spec().is_zero_char() {
            return Err(Error::Characteristic {
                required: "0",
                found: ring.spec().characteristic(),
            });
        }
        if twist.len() != ring.nvars() {
            return Err(Error::ArityMismatch {
                expected: ring.nvars(),
                found: twist.len(),
            });
        }
        for (i, f) in twist.iter().enumerate() {
            ring.check(f.ring())?;
            if f.variables_used().iter().any(|&j| j != i) {
                return Err(Error::Precondition(format!(
                    "twist for {} involves other variables",
                    ring.var_names()[i]
                )));
            }
        }
        Ok(AntiAutomorphism::Twisted(twist))
    }

    pub fn apply(&self, xi: &DiffOp) -> Result<DiffOp> {
        match self {
            AntiAutomorphism::Standard => Ok(standard_transpose(xi)),
            AntiAutomorphism::Twisted(twist) => apply_twisted(twist, xi),
        }
    }

    /// Checks `Φ` on the Weyl relations `[∂_i, x_j] = δ_ij`, `[∂_i, ∂_j] = 0`, `[x_i, x_j] = 0`
    /// in the form `Φ(b)Φ(a) − Φ(a)Φ(b) = Φ([a, b])`.
    pub fn respects_weyl_relations(&self, ring: &PolyRing) -> Result<bool> {
        let n = ring.nvars();
        let mut gens = Vec::with_capacity(2 * n);
        for i in 0..n {
            gens.push(DiffOp::from_poly(&ring.var(i)));
            gens.push(DiffOp::partial_var(ring, i));
        }
        for a in &gens {
            for b in &gens {
                let lhs = self.apply(b)?.bracket(&self.apply(a)?)?;
                if lhs != self.apply(&a.bracket(b)?)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn apply_twisted(twist: &[Polynomial], xi: &DiffOp) -> Result<DiffOp> {
    let ring = xi.ring();
    let n = ring.nvars();
    if twist.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            found: twist.len(),
        });
    }
    // images[i][k] = (−∂_i + f_i)^k / k!
    let top: Vec<u32> = (0..n)
        .map(|i| xi.terms().keys().map(|a| a.entries()[i]).max().unwrap_or(0))
        .collect();
    let mut images: Vec<Vec<DiffOp>> = Vec::with_capacity(n);
    for i in 0..n {
        let gen = &DiffOp::from_poly(&twist[i]) - &DiffOp::partial_var(ring, i);
        let mut powers = vec![DiffOp::one(ring)];
        let mut raw = DiffOp::one(ring);
        let mut fact = ring.spec().one();
        for k in 1..=top[i] {
            raw = &raw * &gen;
            fact = &fact * &ring.spec().from_i64(k as i64);
            let inv = fact.inv().ok_or(Error::DivisionByZero)?;
            powers.push(raw.scale(&inv));
        }
        images.push(powers);
    }
    let mut out = DiffOp::zero(ring);
    for (alpha, f) in xi.terms() {
        // The images of the ∂_i commute, so the factor order is immaterial.
        let mut acc = DiffOp::one(ring);
        for (i, &a) in alpha.entries().iter().enumerate() {
            if a > 0 {
                acc = &acc * &images[i][a as usize];
            }
        }
        out = &out + &(&acc * &DiffOp::from_poly(f));
    }
    Ok(out)
}

/// `order(Φ(ξ) + (−1)^{n+1} ξ) ≤ n − 1` for `ξ` of order `n`.
pub fn check_graded_sign(xi: &DiffOp, phi: &AntiAutomorphism) -> Result<bool> {
    if xi.is_zero() {
        return precondition("graded sign check needs a nonzero operator");
    }
    let n = xi.order();
    let image = phi.apply(xi)?;
    let diff = if n % 2 == 0 { &image - xi } else { &image + xi };
    Ok(diff.order() < n)
}

/// For a derivation `θ`: `Φ(θ) + θ` equals multiplication by `Φ(θ)(1)`.
pub fn derivation_formula_check(theta: &DiffOp, phi: &AntiAutomorphism) -> Result<bool> {
    if !theta.is_derivation() {
        return precondition("operator is not a derivation");
    }
    let image = phi.apply(theta)?;
    let lhs = &image + theta;
    Ok(lhs == DiffOp::from_poly(&image.value_at_one()))
}

/// The conjugate `A ∘ ξ ∘ A⁻¹` by the automorphism `A` of `S` induced by a linear map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transported {
    pub op: DiffOp,
    /// Monomials of degree up to this bound were evaluated to rebuild the normal form.
    pub evaluation_degree: u32,
}

pub fn transport_via_coordinates(m: &RingMap, xi: &DiffOp) -> Result<Transported> {
    xi.ring().check(m.ring())?;
    if !m.is_linear() {
        return precondition("coordinate change must be linear");
    }
    let inv = m
        .inverse()
        .ok_or_else(|| Error::Precondition("coordinate change has no certified inverse".into()))?;
    let ring = xi.ring();
    // Linear changes of coordinates preserve order, so the conjugate is supported on |α| ≤ order(ξ).
    let bound = xi.order().max(0) as u32;
    let support = MultiExp::all_up_to_degree(ring.nvars(), bound);
    let op = DiffOp::from_monomial_values(ring, &support, |beta| {
        let mono = ring.monomial(beta.clone(), ring.spec().one());
        m.apply(&xi.apply(&inv.apply(&mono)?)?)
    })?;
    Ok(Transported {
        op,
        evaluation_degree: bound,
    })
}

pub fn transport(m: &RingMap, xi: &DiffOp) -> Result<DiffOp> {
    transport_via_coordinates(m, xi).map(|t| t.op)
}

/// Outcome of the level-one ansatz `Φ(∂) = a + b∂` over `𝔽₂[x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityReport {
    pub max_degree: usize,
    /// Values of `b ∈ 𝔽₂` compatible with `[∂, x] = 1`.
    pub admissible_b: Vec<u64>,
    /// Pairs `(i, j)` from equations `a_i² = a_j`, read off the coefficients of `Φ(∂)² = 0`.
    pub recursion: Vec<(usize, usize)>,
    /// Coefficients of `a` proven zero by elimination.
    pub forced_zero: Vec<usize>,
    /// Equations that did not have the shape `a_i² + a_j = 0` or `0 = 0`.
    pub unexpected: usize,
}

impl RigidityReport {
    pub fn no_twist(&self) -> bool {
        self.admissible_b == [1]
            && self.unexpected == 0
            && self.forced_zero.len() == self.max_degree + 1
    }
}

#[derive(Default)]
struct QuadraticEquation {
    squares: Vec<usize>,
    products: Vec<(usize, usize)>,
    linear: Vec<usize>,
    constant: bool,
}

/// Bounded-degree search for a level-one twist in characteristic 2, one variable.
///
/// Any anti-automorphism fixing `S` sends `∂` to `a + b∂` with `a ∈ S`. The relation
/// `[∂, x] = 1` fixes `b`, and `∂·∂ = 2∂^[2] = 0` forces `(a + ∂)² = 0`, whose coefficients
/// are expanded here with operator arithmetic for a generic `a = Σ_{i ≤ D} a_i x^i`. The
/// resulting equations `a_i² = a_{2i+1}` are then eliminated from the top degree down.
pub fn level_one_rigidity_search(max_degree: usize) -> Result<RigidityReport> {
    let ring = PolyRing::with_nvars(crate::FieldSpec::prime(2)?, 1)?;
    let x = DiffOp::from_poly(&ring.var(0));
    let dx = DiffOp::partial_var(&ring, 0);
    let one = DiffOp::one(&ring);

    let mut admissible_b = Vec::new();
    for b in 0..2u64 {
        let image = dx.scale(&ring.spec().from_i64(b as i64));
        // Φ([∂, x]) = Φ(x)Φ(∂) − Φ(∂)Φ(x) and Φ(1) = 1.
        if x.bracket(&image)? == one {
            admissible_b.push(b);
        }
    }

    let mono = |i: usize| DiffOp::from_poly(&ring.var(0).pow(i as u32));
    let coeff_key = |alpha: &MultiExp, e: &MultiExp| (alpha.entries()[0], e.entries()[0]);
    let mut equations: std::collections::BTreeMap<(u32, u32), QuadraticEquation> =
        Default::default();
    let mut record = |op: &DiffOp, push: &mut dyn FnMut(&mut QuadraticEquation)| {
        for (alpha, f) in op.terms() {
            for e in f.terms().keys() {
                push(equations.entry(coeff_key(alpha, e)).or_default());
            }
        }
    };
    // (a + ∂)² = Σ a_i² x^i x^i + Σ_{i<j} a_i a_j (x^i x^j + x^j x^i) + Σ a_i (x^i ∂ + ∂ x^i) + ∂².
    for i in 0..=max_degree {
        record(&(&mono(i) * &mono(i)), &mut |eq| eq.squares.push(i));
        for j in i + 1..=max_degree {
            record(
                &(&(&mono(i) * &mono(j)) + &(&mono(j) * &mono(i))),
                &mut |eq| eq.products.push((i, j)),
            );
        }
        record(&(&(&mono(i) * &dx) + &(&dx * &mono(i))), &mut |eq| {
            eq.linear.push(i)
        });
    }
    record(&(&dx * &dx), &mut |eq| eq.constant = true);

    let mut recursion = Vec::new();
    let mut unexpected = 0;
    for eq in equations.values() {
        match (
            eq.squares.as_slice(),
            eq.products.is_empty(),
            eq.linear.as_slice(),
            eq.constant,
        ) {
            ([i], true, [j], false) => recursion.push((*i, *j)),
            ([i], true, [], false) => recursion.push((*i, usize::MAX)),
            ([], true, [], false) => {}
            _ => unexpected += 1,
        }
    }
    recursion.sort();

    // a_j = 0 for j beyond the bound; a_i² = a_j with a_j = 0 gives a_i = 0 and conversely.
    let mut zero = vec![false; max_degree + 1];
    loop {
        let mut changed = false;
        for &(i, j) in &recursion {
            let j_zero = j > max_degree || zero[j];
            if j_zero && !zero[i] {
                zero[i] = true;
                changed = true;
            }
            if zero[i] && j <= max_degree && !zero[j] {
                zero[j] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let forced_zero = (0..=max_degree).filter(|&i| zero[i]).collect();
    Ok(RigidityReport {
        max_degree,
        admissible_b,
        recursion,
        forced_zero,
        unexpected,
    })
}

/// `Φ²(ξ)(1) = ξ(1)`, the value-at-one shadow of involutivity.
pub fn involutive_on_one(xi: &DiffOp, phi: &AntiAutomorphism) -> Result<bool> {
    let twice = phi.apply(&phi.apply(xi)?)?;
    Ok(twice.value_at_one() == xi.value_at_one())
}
