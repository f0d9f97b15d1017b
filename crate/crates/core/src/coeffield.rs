//! Exact coefficient arithmetic over ℚ and 𝔽_p, plus the multi-exponent
//! combinatorics shared by the polynomial and operator layers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The coefficient field, identified by its characteristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct FieldSpec {
    characteristic: u64,
}

impl TryFrom<u64> for FieldSpec {
    type Error = Error;
    fn try_from(c: u64) -> Result<Self> {
        FieldSpec::new(c)
    }
}

impl From<FieldSpec> for u64 {
    fn from(s: FieldSpec) -> u64 {
        s.characteristic
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl FieldSpec {
    pub fn new(characteristic: u64) -> Result<Self> {
        if characteristic != 0 && !is_prime(characteristic) {
            return Err(Error::NotPrime(characteristic));
        }
        Ok(FieldSpec { characteristic })
    }

    pub fn rationals() -> Self {
        FieldSpec { characteristic: 0 }
    }

    pub fn prime(p: u64) -> Result<Self> {
        if p == 0 {
            return Err(Error::NotPrime(0));
        }
        Self::new(p)
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn is_zero_char(&self) -> bool {
        self.characteristic == 0
    }

    pub fn zero(&self) -> FieldElem {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> FieldElem {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> FieldElem {
        match self.characteristic {
            0 => FieldElem::Rational(BigRational::from_integer(v.clone())),
            p => {
                let r = v.mod_floor(&BigInt::from(p));
                FieldElem::Modular {
                    value: r.to_u64().expect("residue fits u64"),
                    p,
                }
            }
        }
    }

    pub fn from_biguint(&self, v: &BigUint) -> FieldElem {
        match self.characteristic {
            0 => FieldElem::Rational(BigRational::from_integer(BigInt::from(v.clone()))),
            p => FieldElem::Modular {
                value: (v % p).to_u64().expect("residue fits u64"),
                p,
            },
        }
    }

    /// The class of `num/den`; fails when `den` vanishes in the field.
    pub fn from_ratio(&self, num: &BigInt, den: &BigInt) -> Result<FieldElem> {
        let d = self.from_bigint(den);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        self.from_bigint(num).checked_div(&d)
    }

    /// Whether `e` lives in this field.
    pub fn owns(&self, e: &FieldElem) -> bool {
        e.characteristic() == self.characteristic
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.characteristic {
            0 => write!(f, "QQ"),
            p => write!(f, "GF({p})"),
        }
    }
}

/// An element of ℚ (lowest terms, positive denominator) or of 𝔽_p (residue in `0..p`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Rational(BigRational),
    Modular { value: u64, p: u64 },
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

impl FieldElem {
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldElem::Rational(_) => 0,
            FieldElem::Modular { p, .. } => *p,
        }
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            characteristic: self.characteristic(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rational(r) => r.is_zero(),
            FieldElem::Modular { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Rational(r) => r.is_one(),
            FieldElem::Modular { value, .. } => *value == 1,
        }
    }

    /// True when the canonical rendering starts with a minus sign.
    pub fn is_negative(&self) -> bool {
        match self {
            FieldElem::Rational(r) => r.is_negative(),
            FieldElem::Modular { .. } => false,
        }
    }

    pub fn inv(&self) -> Option<FieldElem> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            FieldElem::Rational(r) => FieldElem::Rational(r.recip()),
            FieldElem::Modular { value, p } => FieldElem::Modular {
                value: pow_mod(*value, p - 2, *p),
                p: *p,
            },
        })
    }

    pub fn checked_div(&self, rhs: &FieldElem) -> Result<FieldElem> {
        let inv = rhs.inv().ok_or(Error::DivisionByZero)?;
        Ok(self * &inv)
    }

    pub fn pow(&self, exp: u64) -> FieldElem {
        match self {
            FieldElem::Rational(r) => {
                let e = i32::try_from(exp).expect("exponent too large for rational power");
                FieldElem::Rational(num_traits::pow::Pow::pow(r, e))
            }
            FieldElem::Modular { value, p } => FieldElem::Modular {
                value: pow_mod(*value, exp, *p),
                p: *p,
            },
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElem::Rational(r) => Some(r),
            FieldElem::Modular { .. } => None,
        }
    }

    fn check_same(&self, rhs: &FieldElem) {
        assert_eq!(
            self.characteristic(),
            rhs.characteristic(),
            "field elements of different characteristic"
        );
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            FieldElem::Modular { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Serialize for FieldElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'a> Add<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        self.check_same(rhs);
        match (self, rhs) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a + b),
            (FieldElem::Modular { value: a, p }, FieldElem::Modular { value: b, .. }) => {
                FieldElem::Modular {
                    value: ((*a as u128 + *b as u128) % *p as u128) as u64,
                    p: *p,
                }
            }
            _ => unreachable!(),
        }
    }
}

impl<'a> Sub<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a FieldElem> for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        self.check_same(rhs);
        match (self, rhs) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a * b),
            (FieldElem::Modular { value: a, p }, FieldElem::Modular { value: b, .. }) => {
                FieldElem::Modular {
                    value: mul_mod(*a, *b, *p),
                    p: *p,
                }
            }
            _ => unreachable!(),
        }
    }
}

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        match self {
            FieldElem::Rational(a) => FieldElem::Rational(-a),
            FieldElem::Modular { value, p } => FieldElem::Modular {
                value: if *value == 0 { 0 } else { p - value },
                p: *p,
            },
        }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident, $tra:ident, $ma:ident) => {
        impl $tr<FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: FieldElem) -> FieldElem {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &FieldElem) -> FieldElem {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tra<&'a FieldElem> for FieldElem {
            fn $ma(&mut self, rhs: &FieldElem) {
                *self = (&*self).$m(rhs);
            }
        }
    };
}

forward_owned!(Add, add, AddAssign, add_assign);
forward_owned!(Sub, sub, SubAssign, sub_assign);
forward_owned!(Mul, mul, MulAssign, mul_assign);

/// A multi-index in ℕ₀ⁿ: exponent of a monomial `x^α` or of a divided power `∂^[α]`.
///
/// The derived `Ord` is lexicographic; [`MultiExp::graded_cmp`] gives the graded order used
/// for printing. The componentwise partial order is [`MultiExp::le`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiExp(Vec<u32>);

impl MultiExp {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiExp(entries)
    }

    pub fn zeros(n: usize) -> Self {
        MultiExp(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiExp(v)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Total degree `|α|`.
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&a| a as u64).sum()
    }

    pub fn check_arity(&self, other: &MultiExp) -> Result<()> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: other.arity(),
            });
        }
        Ok(())
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &MultiExp) -> bool {
        assert_eq!(self.arity(), other.arity(), "multi-exponent arity mismatch");
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn try_add(&self, other: &MultiExp) -> Result<MultiExp> {
        self.check_arity(other)?;
        Ok(MultiExp(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// `self − other` when `other ≤ self`.
    pub fn checked_sub(&self, other: &MultiExp) -> Option<MultiExp> {
        assert_eq!(self.arity(), other.arity(), "multi-exponent arity mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiExp)
    }

    pub fn scale(&self, k: u32) -> MultiExp {
        MultiExp(self.0.iter().map(|a| a * k).collect())
    }

    /// Graded order: total degree first, then lexicographic.
    pub fn graded_cmp(&self, other: &MultiExp) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }

    /// All `β` with `β ≤ self`, in lexicographic order.
    pub fn divisors(&self) -> Vec<MultiExp> {
        let mut out = vec![Vec::with_capacity(self.arity())];
        for &a in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
            for prefix in &out {
                for b in 0..=a {
                    let mut v = prefix.clone();
                    v.push(b);
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(MultiExp).collect()
    }

    /// All exponents in `n` variables with total degree at most `d`, graded order.
    pub fn all_up_to_degree(n: usize, d: u32) -> Vec<MultiExp> {
        let mut out = MultiExp(vec![d; n])
            .divisors()
            .into_iter()
            .filter(|e| e.degree() <= d as u64)
            .collect::<Vec<_>>();
        out.sort_by(|a, b| a.graded_cmp(b));
        out
    }

    /// All exponents with every entry strictly below `bound`, lexicographic order.
    pub fn box_below(n: usize, bound: u32) -> Vec<MultiExp> {
        assert!(bound >= 1);
        MultiExp(vec![bound - 1; n]).divisors()
    }
}

impl fmt::Display for MultiExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}

fn binomial_u64(n: u32, k: u32) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Integer binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> BigUint {
    if let Some(v) = binomial_u64(n, k) {
        return BigUint::from(v);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `α!/(β!(α−β)!) = Π C(α_i, β_i)` over ℤ, without the `β ≤ α` check.
pub(crate) fn multinomial_int(alpha: &MultiExp, beta: &MultiExp) -> BigUint {
    let mut small: u128 = 1;
    let mut big: Option<BigUint> = None;
    for (&a, &b) in alpha.0.iter().zip(&beta.0) {
        if b > a {
            return BigUint::zero();
        }
        match (binomial_u64(a, b), big.as_mut()) {
            (Some(c), None) => match small.checked_mul(c as u128) {
                Some(v) => small = v,
                None => big = Some(BigUint::from(small) * c),
            },
            (Some(c), Some(acc)) => *acc *= c,
            (None, _) => {
                let acc = big.take().unwrap_or_else(|| BigUint::from(small));
                big = Some(acc * binomial(a, b));
            }
        }
    }
    big.unwrap_or_else(|| BigUint::from(small))
}

/// The multinomial `α!/(β!(α−β)!)`, computed over ℤ and then reduced into the field.
pub fn multinomial(alpha: &MultiExp, beta: &MultiExp, spec: FieldSpec) -> Result<FieldElem> {
    alpha.check_arity(beta)?;
    if !beta.le(alpha) {
        return Err(Error::Precondition(format!("{beta} is not below {alpha}")));
    }
    Ok(spec.from_biguint(&multinomial_int(alpha, beta)))
}

/// `Σ_{β+δ=σ} (−1)^{|β|} σ!/(β!δ!)` as an exact integer.
pub fn alternating_multinomial_sum(sigma: &MultiExp) -> BigInt {
    sigma
        .divisors()
        .iter()
        .map(|beta| {
            let term = BigInt::from(multinomial_int(sigma, beta));
            if beta.degree() % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}
