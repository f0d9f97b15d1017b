//! Differential operators on `R = k[x]/(x_1^{a_1}, …, x_n^{a_n})` by direct linear algebra.
//!
//! `End_k(R)` is finite-dimensional, so the order filtration can be computed straight from
//! its inductive definition: `D⁰ = R` and `ξ ∈ Dⁿ` iff `[ξ, x_i] ∈ Dⁿ⁻¹` for every generator
//! `x_i`. Bracketing against generators suffices because `f ↦ [ξ, f]` is a derivation.
//!
//! `R` is Gorenstein with socle `x^{a−1}`, and `⟨f, g⟩ = σ(u·f·g)` is nondegenerate for the
//! socle coefficient `σ` and any unit `u`. The adjoint under this pairing is an involutive
//! anti-automorphism of `End_k(R)` fixing `R`.

use std::collections::HashMap;

use crate::coeffield::{FieldElem, FieldSpec, MultiExp};
use crate::diffop::DiffOp;
use crate::error::{precondition, Error, Result};
use crate::linalg::{Matrix, Subspace};
use crate::polyring::{PolyRing, Polynomial};

#[derive(Clone, Debug)]
pub struct ArtinianAlgebra {
    ring: PolyRing,
    exponents: Vec<u32>,
    basis: Vec<MultiExp>,
    index: HashMap<MultiExp, usize>,
}

/// A `k`-linear map `R → R` as a matrix in the monomial basis (columns are images).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EndOperator {
    matrix: Matrix,
}

impl EndOperator {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Invalid("endomorphism matrix must be square".into()));
        }
        Ok(EndOperator { matrix })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn compose(&self, rhs: &EndOperator) -> EndOperator {
        EndOperator {
            matrix: &self.matrix * &rhs.matrix,
        }
    }

    pub fn add(&self, rhs: &EndOperator) -> EndOperator {
        EndOperator {
            matrix: self.matrix.add(&rhs.matrix),
        }
    }

    pub fn sub(&self, rhs: &EndOperator) -> EndOperator {
        EndOperator {
            matrix: self.matrix.sub(&rhs.matrix),
        }
    }

    pub fn scale(&self, c: &FieldElem) -> EndOperator {
        EndOperator {
            matrix: self.matrix.scale(c),
        }
    }

    pub fn bracket(&self, rhs: &EndOperator) -> EndOperator {
        EndOperator {
            matrix: self.matrix.commutator(&rhs.matrix),
        }
    }

    pub fn apply(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        self.matrix.apply(v)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    fn flat(&self) -> Vec<FieldElem> {
        self.matrix.to_vec()
    }
}

impl ArtinianAlgebra {
    pub fn new(spec: FieldSpec, exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() || exponents.contains(&0) {
            return Err(Error::Invalid(
                "exponents must be a nonempty list of positive integers".into(),
            ));
        }
        let ring = PolyRing::with_nvars(spec, exponents.len())?;
        let top = MultiExp::new(exponents.iter().map(|a| a - 1).collect());
        let basis = top.divisors();
        if basis.len() > 64 {
            return Err(Error::TooLarge(basis.len()));
        }
        let index = basis
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        Ok(ArtinianAlgebra {
            ring,
            exponents,
            basis,
            index,
        })
    }

    pub fn spec(&self) -> FieldSpec {
        self.ring.spec()
    }

    pub fn poly_ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[MultiExp] {
        &self.basis
    }

    pub fn socle(&self) -> MultiExp {
        MultiExp::new(self.exponents.iter().map(|a| a - 1).collect())
    }

    /// Coordinates of `f mod (x_i^{a_i})`.
    pub fn coords(&self, f: &Polynomial) -> Result<Vec<FieldElem>> {
        self.ring.check(f.ring())?;
        let mut v = vec![self.spec().zero(); self.dim()];
        for (e, c) in f.terms() {
            if let Some(&i) = self.index.get(e) {
                v[i] = c.clone();
            }
        }
        Ok(v)
    }

    pub fn element(&self, coords: &[FieldElem]) -> Polynomial {
        let mut f = self.ring.zero();
        for (m, c) in self.basis.iter().zip(coords) {
            f = &f + &self.ring.monomial(m.clone(), c.clone());
        }
        f
    }

    fn operator_from_columns(&self, cols: Vec<Vec<FieldElem>>) -> EndOperator {
        let n = self.dim();
        let mut m = Matrix::zeros(self.spec(), n, n);
        for (j, col) in cols.into_iter().enumerate() {
            for (i, c) in col.into_iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        EndOperator { matrix: m }
    }

    pub fn operator(&self, matrix: Matrix) -> Result<EndOperator> {
        if matrix.nrows() != self.dim() || matrix.ncols() != self.dim() {
            return Err(Error::ArityMismatch {
                expected: self.dim(),
                found: matrix.nrows(),
            });
        }
        EndOperator::new(matrix)
    }

    /// The `k`-linear map `x^μ ↦ ξ(x^μ) mod I` for a polynomial operator `ξ`.
    ///
    /// This is any linear map on the basis; it is only a differential operator of `R` in the
    /// intrinsic sense when `ξ` preserves the ideal, which the filtration decides.
    pub fn induced(&self, xi: &DiffOp) -> Result<EndOperator> {
        self.ring.check(xi.ring())?;
        let cols = self
            .basis
            .iter()
            .map(|m| self.coords(&xi.apply(&self.ring.monomial(m.clone(), self.spec().one()))?))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.operator_from_columns(cols))
    }

    pub fn mult(&self, f: &Polynomial) -> Result<EndOperator> {
        self.induced(&DiffOp::from_poly(f))
    }

    pub fn identity(&self) -> EndOperator {
        EndOperator {
            matrix: Matrix::identity(self.spec(), self.dim()),
        }
    }

    /// The elementary operator `x^{basis[s]} ↦ x^{basis[r]}`, all other basis vectors to 0.
    pub fn elementary(&self, r: usize, s: usize) -> EndOperator {
        let mut m = Matrix::zeros(self.spec(), self.dim(), self.dim());
        m[(r, s)] = self.spec().one();
        EndOperator { matrix: m }
    }

    /// `P[μ][ν] = σ(u · x^μ · x^ν)`, with `σ` the socle coefficient.
    pub fn pairing_matrix(&self, unit: Option<&Polynomial>) -> Result<Matrix> {
        let u = match unit {
            Some(u) => {
                self.ring.check(u.ring())?;
                if u.coeff(&MultiExp::zeros(self.ring.nvars())).is_zero() {
                    return precondition("pairing twist must be a unit of R");
                }
                u.clone()
            }
            None => self.ring.one(),
        };
        let socle = self.socle();
        let n = self.dim();
        let mut p = Matrix::zeros(self.spec(), n, n);
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let prod = &(&u * &self.ring.monomial(a.clone(), self.spec().one()))
                    * &self.ring.monomial(b.clone(), self.spec().one());
                p[(i, j)] = prod.coeff(&socle);
            }
        }
        Ok(p)
    }

    /// The untwisted pairing has exactly one nonzero entry per row and column.
    pub fn pairing_is_permutation_with_units(&self) -> bool {
        let p = self.pairing_matrix(None).expect("untwisted pairing");
        let n = self.dim();
        (0..n).all(|i| (0..n).filter(|&j| !p[(i, j)].is_zero()).count() == 1)
            && (0..n).all(|j| (0..n).filter(|&i| !p[(i, j)].is_zero()).count() == 1)
    }

    /// The adjoint `Φ(ξ)` with `σ(Φ(ξ)(f)·g) = σ(f·ξ(g))`, i.e. `P⁻¹ ξᵀ P`.
    pub fn socle_adjoint(&self, xi: &EndOperator) -> Result<EndOperator> {
        self.socle_adjoint_with_unit(xi, None)
    }

    pub fn socle_adjoint_with_unit(
        &self,
        xi: &EndOperator,
        unit: Option<&Polynomial>,
    ) -> Result<EndOperator> {
        if xi.matrix.nrows() != self.dim() {
            return Err(Error::ArityMismatch {
                expected: self.dim(),
                found: xi.matrix.nrows(),
            });
        }
        let p = self.pairing_matrix(unit)?;
        let p_inv = p
            .inverse()
            .map_err(|_| Error::Precondition("socle pairing is degenerate".into()))?;
        Ok(EndOperator {
            matrix: &(&p_inv * &xi.matrix.transpose()) * &p,
        })
    }

    /// The chain `D⁰ ⊆ D¹ ⊆ …` up to `n_max` (default `2·dim R`), stopping once it stabilizes.
    pub fn order_filtration(&self, n_max: Option<usize>) -> Filtration {
        let n_max = n_max.unwrap_or(2 * self.dim());
        let spec = self.spec();
        let n = self.dim();
        let ambient = n * n;
        let d0: Vec<Vec<FieldElem>> = self
            .basis
            .iter()
            .map(|m| {
                self.mult(&self.ring.monomial(m.clone(), spec.one()))
                    .unwrap()
                    .flat()
            })
            .collect();
        let mut levels = vec![Subspace::spanned_by(spec, ambient, &d0)];
        let gens: Vec<EndOperator> = (0..self.ring.nvars())
            .map(|i| self.mult(&self.ring.var(i)).unwrap())
            .collect();
        let mut stabilized_at = None;
        for step in 1..=n_max {
            let prev = levels.last().unwrap();
            // Column (r, s) of the map ξ ↦ ([ξ, x_i] mod Dⁿ⁻¹)_i evaluated on E_{rs}.
            let mut map = Matrix::zeros(spec, ambient * gens.len(), ambient);
            for r in 0..n {
                for s in 0..n {
                    let e = self.elementary(r, s);
                    for (g, x) in gens.iter().enumerate() {
                        let red = prev.reduce(&e.bracket(x).flat());
                        for (k, c) in red.into_iter().enumerate() {
                            map[(g * ambient + k, r * n + s)] = c;
                        }
                    }
                }
            }
            let next = Subspace::spanned_by(spec, ambient, &map.kernel());
            let stable = next.dim() == prev.dim();
            levels.push(next);
            if stable {
                stabilized_at = Some(step - 1);
                break;
            }
        }
        Filtration {
            spec,
            dim_r: n,
            levels,
            stabilized_at,
        }
    }

    /// Whether `Φ(ξ) ∈ Dⁿ`, after checking `ξ ∈ Dⁿ`.
    pub fn verify_order_preservation(
        &self,
        xi: &EndOperator,
        n: usize,
        filt: &Filtration,
    ) -> Result<bool> {
        if !filt.contains(xi, n)? {
            return precondition(format!("operator is not in D^{n}"));
        }
        filt.contains(&self.socle_adjoint(xi)?, n)
    }
}

/// The order filtration of `End_k(R)`, one subspace per order.
#[derive(Clone, Debug)]
pub struct Filtration {
    spec: FieldSpec,
    dim_r: usize,
    levels: Vec<Subspace>,
    stabilized_at: Option<usize>,
}

impl Filtration {
    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(Subspace::dim).collect()
    }

    /// First `n` with `Dⁿ = Dⁿ⁺¹`, if reached within the bound.
    pub fn stabilized_at(&self) -> Option<usize> {
        self.stabilized_at
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, n: usize) -> Result<&Subspace> {
        if let Some(s) = self.levels.get(n) {
            return Ok(s);
        }
        match self.stabilized_at {
            Some(_) => Ok(self.levels.last().unwrap()),
            None => precondition(format!("filtration was not computed up to order {n}")),
        }
    }

    pub fn contains(&self, xi: &EndOperator, n: usize) -> Result<bool> {
        if xi.matrix.nrows() != self.dim_r {
            return Err(Error::ArityMismatch {
                expected: self.dim_r,
                found: xi.matrix.nrows(),
            });
        }
        Ok(self.level(n)?.contains(&xi.flat()))
    }

    /// Smallest `n` with `ξ ∈ Dⁿ`; −1 for zero, `None` if outside every computed level.
    pub fn order_of(&self, xi: &EndOperator) -> Option<i64> {
        if xi.is_zero() {
            return Some(-1);
        }
        self.levels
            .iter()
            .position(|s| s.contains(&xi.flat()))
            .map(|n| n as i64)
    }

    /// Operators completing a basis of `Dⁿ⁻¹` to one of `Dⁿ` (a basis of `D⁰` for `n = 0`).
    pub fn graded_piece(&self, n: usize) -> Result<Vec<EndOperator>> {
        let top = self.level(n)?;
        let vecs = if n == 0 {
            top.basis().to_vec()
        } else {
            top.complement_of(self.level(n - 1)?)
        };
        let d = self.dim_r;
        Ok(vecs
            .into_iter()
            .map(|v| EndOperator {
                matrix: Matrix::from_vec(self.spec, d, d, v),
            })
            .collect())
    }
}
