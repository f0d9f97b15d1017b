//! Level-`e` operators as matrices over the subring of `p^e`-th powers.
//!
//! `S` is free over `S^{p^e}` on the monomials `x^λ` with `0 ≤ λ_i < p^e`, and an operator of
//! level ≤ `e` is exactly an `S^{p^e}`-linear endomorphism. Column `λ` of the matrix holds the
//! decomposition of `ξ(x^λ)` in that basis.
//!
//! Entry convention: an entry `g` stands for the element `g^{p^e}` of `S^{p^e}`. Since
//! `g ↦ g^{p^e}` is a ring isomorphism `S → S^{p^e}` over 𝔽_p, entries add and multiply as
//! ordinary polynomials.

use std::fmt;

use serde::Serialize;

use crate::coeffield::MultiExp;
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::polyring::{frobenius_power, PolyRing, Polynomial};
use crate::transpose::standard_transpose;

pub const MAX_SIZE: usize = 256;

/// The monomials `x^λ`, `0 ≤ λ_i < p^e`, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusBasis {
    e: u32,
    q: u32,
    monomials: Vec<MultiExp>,
}

impl FrobeniusBasis {
    pub fn new(ring: &PolyRing, e: u32) -> Result<Self> {
        let p = ring.spec().characteristic();
        if p == 0 {
            return Err(Error::Characteristic {
                required: "p > 0",
                found: 0,
            });
        }
        let q = frobenius_power(p, e)?;
        let size = (q as usize)
            .checked_pow(ring.nvars() as u32)
            .filter(|&s| s <= MAX_SIZE)
            .ok_or(Error::TooLarge(
                (q as usize).saturating_pow(ring.nvars() as u32),
            ))?;
        let monomials = MultiExp::box_below(ring.nvars(), q);
        debug_assert_eq!(monomials.len(), size);
        Ok(FrobeniusBasis { e, q, monomials })
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[MultiExp] {
        &self.monomials
    }

    fn index_of(&self, lambda: &MultiExp) -> usize {
        // Lex order on the box is mixed-radix numbering.
        lambda
            .entries()
            .iter()
            .fold(0usize, |acc, &l| acc * self.q as usize + l as usize)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelMatrix {
    ring: PolyRing,
    basis: FrobeniusBasis,
    /// Row-major; `entries[row][col]` is the `p^e`-th root of the actual entry.
    entries: Vec<Vec<Polynomial>>,
}

impl LevelMatrix {
    pub fn new(ring: &PolyRing, e: u32, entries: Vec<Vec<Polynomial>>) -> Result<Self> {
        let basis = FrobeniusBasis::new(ring, e)?;
        let n = basis.len();
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(format!("level-{e} matrix must be {n}×{n}")));
        }
        for row in &entries {
            for g in row {
                ring.check(g.ring())?;
            }
        }
        Ok(LevelMatrix {
            ring: ring.clone(),
            basis,
            entries,
        })
    }

    pub fn identity(ring: &PolyRing, e: u32) -> Result<Self> {
        let basis = FrobeniusBasis::new(ring, e)?;
        let n = basis.len();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { ring.one() } else { ring.zero() })
                    .collect()
            })
            .collect();
        Ok(LevelMatrix {
            ring: ring.clone(),
            basis,
            entries,
        })
    }

    pub fn e(&self) -> u32 {
        self.basis.e
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &FrobeniusBasis {
        &self.basis
    }

    pub fn entries(&self) -> &[Vec<Polynomial>] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> &Polynomial {
        &self.entries[row][col]
    }

    pub fn checked_mul(&self, rhs: &LevelMatrix) -> Result<LevelMatrix> {
        self.ring.check(&rhs.ring)?;
        if self.basis != rhs.basis {
            return Err(Error::Invalid("matrices of different levels".into()));
        }
        let n = self.size();
        let mut entries = vec![vec![self.ring.zero(); n]; n];
        for (i, row) in entries.iter_mut().enumerate() {
            for k in 0..n {
                let a = &self.entries[i][k];
                if a.is_zero() {
                    continue;
                }
                for (j, cell) in row.iter_mut().enumerate() {
                    let b = &rhs.entries[k][j];
                    if !b.is_zero() {
                        *cell = &*cell + &(a * b);
                    }
                }
            }
        }
        Ok(LevelMatrix {
            ring: self.ring.clone(),
            basis: self.basis.clone(),
            entries,
        })
    }

    pub fn checked_add(&self, rhs: &LevelMatrix) -> Result<LevelMatrix> {
        self.ring.check(&rhs.ring)?;
        if self.basis != rhs.basis {
            return Err(Error::Invalid("matrices of different levels".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a + b).collect())
            .collect();
        Ok(LevelMatrix {
            ring: self.ring.clone(),
            basis: self.basis.clone(),
            entries,
        })
    }

    /// Row-major JSON: each entry is a term list of its `p^e`-th root.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Term<'a> {
            exponent: &'a MultiExp,
            coeff: String,
        }
        let rows: Vec<Vec<Vec<Term>>> = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|g| {
                        g.sorted_terms()
                            .into_iter()
                            .map(|(e, c)| Term {
                                exponent: e,
                                coeff: c.to_string(),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        serde_json::json!({
            "e": self.e(),
            "size": self.size(),
            "basis": self.basis.monomials,
            "entry_convention": "root",
            "rows": rows,
        })
    }
}

impl fmt::Display for LevelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|g| g.to_string()).collect())
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in &cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[ {} ]", line.join("  "))?;
        }
        Ok(())
    }
}

pub fn to_matrix(xi: &DiffOp, e: u32) -> Result<LevelMatrix> {
    let ring = xi.ring();
    let level = xi.level()?;
    if level > e {
        return Err(Error::LevelOverflow { level, e });
    }
    let basis = FrobeniusBasis::new(ring, e)?;
    let n = basis.len();
    let mut entries = vec![vec![ring.zero(); n]; n];
    for (col, lambda) in basis.monomials.iter().enumerate() {
        let image = xi.apply(&ring.monomial(lambda.clone(), ring.spec().one()))?;
        for (mu, g) in image.frobenius_decompose(e)? {
            entries[basis.index_of(&mu)][col] = g;
        }
    }
    Ok(LevelMatrix {
        ring: ring.clone(),
        basis,
        entries,
    })
}

/// Rebuilds the operator: its values on the basis determine it, since it is `S^{p^e}`-linear
/// and supported on `α_i < p^e`.
pub fn to_operator(m: &LevelMatrix) -> Result<DiffOp> {
    let ring = &m.ring;
    let e = m.e();
    let mut images = Vec::with_capacity(m.size());
    for col in 0..m.size() {
        let mut img = ring.zero();
        for (row, mu) in m.basis.monomials.iter().enumerate() {
            let g = &m.entries[row][col];
            if g.is_zero() {
                continue;
            }
            let x_mu = ring.monomial(mu.clone(), ring.spec().one());
            img = &img + &(&g.frobenius_embed(e)? * &x_mu);
        }
        images.push(img);
    }
    DiffOp::from_monomial_values(ring, &m.basis.monomials, |beta| {
        Ok(images[m.basis.index_of(beta)].clone())
    })
}

/// `to_matrix(ξη) = to_matrix(ξ) · to_matrix(η)`.
pub fn matrix_mul_consistency(xi: &DiffOp, eta: &DiffOp, e: u32) -> Result<bool> {
    let lhs = to_matrix(&xi.checked_mul(eta)?, e)?;
    let rhs = to_matrix(xi, e)?.checked_mul(&to_matrix(eta, e)?)?;
    Ok(lhs == rhs)
}

/// The standard transposition transported to level-`e` matrices.
pub fn transpose_matrix(m: &LevelMatrix) -> Result<LevelMatrix> {
    to_matrix(&standard_transpose(&to_operator(m)?), m.e())
}
