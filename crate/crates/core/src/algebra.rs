//! Exact field scalars, finite-dimensional unital algebras, and
//! (A,A)-bimodules given by structure constants.
//!
//! Every coefficient in the engine is either an arbitrary-precision rational
//! or a residue modulo a prime; there is no floating point anywhere.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};

/// The coefficient field of a computation: `ℚ` or `GF(p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Rationals,
    Prime(u64),
}

/// A scalar belonging to some [`Field`]. Scalars do not carry their field;
/// all arithmetic goes through `Field` methods, which keeps residues and
/// rationals from ever mixing silently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Ratio(BigRational),
    Residue(u64),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Ratio(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Ratio(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Residue(v) => write!(f, "{v}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

impl Field {
    /// Parses a field name: `q` (rationals) or `gf<p>` with `p` prime.
    pub fn parse(s: &str) -> Result<Field> {
        let s = s.trim().to_ascii_lowercase();
        if s == "q" || s == "rational" || s == "rationals" {
            return Ok(Field::Rationals);
        }
        if let Some(rest) = s.strip_prefix("gf") {
            let rest = rest.strip_prefix(':').unwrap_or(rest);
            let p: u64 = rest
                .parse()
                .map_err(|_| Error::validation(format!("bad field name `{s}`")))?;
            return Field::prime(p);
        }
        Err(Error::validation(format!(
            "bad field name `{s}` (expected `q` or `gf<p>`)"
        )))
    }

    pub fn prime(p: u64) -> Result<Field> {
        if is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::validation(format!("{p} is not prime")))
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Ratio(BigRational::zero()),
            Field::Prime(_) => Scalar::Residue(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Ratio(BigRational::one()),
            Field::Prime(_) => Scalar::Residue(1),
        }
    }

    pub fn integer(&self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Ratio(BigRational::from(BigInt::from(n))),
            Field::Prime(p) => Scalar::Residue(n.rem_euclid(*p as i64) as u64),
        }
    }

    /// Builds `num/den` in this field. Fails over `GF(p)` when `p | den`.
    pub fn ratio(&self, num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::validation("zero denominator in scalar"));
        }
        match self {
            Field::Rationals => Ok(Scalar::Ratio(BigRational::new(
                BigInt::from(num),
                BigInt::from(den),
            ))),
            Field::Prime(_) => {
                let d = self.integer(den);
                if self.is_zero(&d) {
                    return Err(Error::validation(format!(
                        "denominator {den} is not invertible in {self:?}"
                    )));
                }
                Ok(self.mul(&self.integer(num), &self.inv(&d)?))
            }
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Rationals, Scalar::Ratio(x), Scalar::Ratio(y)) => Scalar::Ratio(x + y),
            (Field::Prime(p), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue((x + y) % p)
            }
            _ => panic!("scalar does not belong to {self:?}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Rationals, Scalar::Ratio(x), Scalar::Ratio(y)) => Scalar::Ratio(x * y),
            (Field::Prime(p), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue(mulmod(*x, *y, *p))
            }
            _ => panic!("scalar does not belong to {self:?}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Field::Rationals, Scalar::Ratio(x)) => Scalar::Ratio(-x),
            (Field::Prime(p), Scalar::Residue(x)) => Scalar::Residue((p - x % p) % p),
            _ => panic!("scalar does not belong to {self:?}"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Result<Scalar> {
        if self.is_zero(a) {
            return Err(Error::validation("division by zero"));
        }
        match (self, a) {
            (Field::Rationals, Scalar::Ratio(x)) => Scalar::Ratio(x.recip()).pipe_ok(),
            (Field::Prime(p), Scalar::Residue(x)) => {
                Scalar::Residue(powmod(*x, p - 2, *p)).pipe_ok()
            }
            _ => panic!("scalar does not belong to {self:?}"),
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Ratio(x) => x.is_zero(),
            Scalar::Residue(x) => *x == 0,
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Ratio(x) => x.is_one(),
            Scalar::Residue(x) => *x == 1,
        }
    }

    /// Reduced canonical form check used by tests: rationals from this module
    /// always carry a positive denominator and lowest terms.
    pub fn is_canonical(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Ratio(x) => {
                x.denom().is_positive()
                    && num::Integer::gcd(x.numer(), x.denom()).is_one()
            }
            Scalar::Residue(v) => match self {
                Field::Prime(p) => v < p,
                Field::Rationals => false,
            },
        }
    }
}

trait PipeOk: Sized {
    fn pipe_ok(self) -> Result<Self> {
        Ok(self)
    }
}
impl PipeOk for Scalar {}

/// Finite-dimensional unital algebra over a [`Field`], presented by
/// structure constants `e_i * e_j = Σ_k c[i][j][k] e_k` and a unit vector.
#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    pub field: Field,
    pub dim: usize,
    mult: Vec<Scalar>,
    pub unit: Vec<Scalar>,
}

/// A failed algebra or bimodule axiom, with the basis indices that broke it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub law: &'static str,
    pub indices: Vec<usize>,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at basis indices {:?}", self.law, self.indices)
    }
}

impl FiniteAlgebra {
    pub fn new(field: Field, dim: usize, mult: Vec<Scalar>, unit: Vec<Scalar>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("algebra dimension must be positive"));
        }
        if mult.len() != dim * dim * dim || unit.len() != dim {
            return Err(Error::validation("structure constant tables have wrong size"));
        }
        Ok(FiniteAlgebra { field, dim, mult, unit })
    }

    /// Structure constants of `e_i * e_j` as a dense coefficient row.
    pub fn mult_row(&self, i: usize, j: usize) -> &[Scalar] {
        let d = self.dim;
        &self.mult[(i * d + j) * d..(i * d + j + 1) * d]
    }

    /// Bilinear product of coefficient vectors.
    pub fn multiply(&self, u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let f = &self.field;
        let mut out = vec![f.zero(); self.dim];
        for (i, ui) in u.iter().enumerate() {
            if f.is_zero(ui) {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if f.is_zero(vj) {
                    continue;
                }
                let c = f.mul(ui, vj);
                for (k, w) in self.mult_row(i, j).iter().enumerate() {
                    if !f.is_zero(w) {
                        out[k] = f.add(&out[k], &f.mul(&c, w));
                    }
                }
            }
        }
        out
    }

    fn basis(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.dim];
        v[i] = self.field.one();
        v
    }

    /// Checks associativity and the unit laws on every basis triple/pair.
    pub fn verify(&self) -> Vec<AxiomViolation> {
        let f = &self.field;
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let lhs = self.multiply(&self.multiply(&self.basis(i), &self.basis(j)), &self.basis(k));
                    let rhs = self.multiply(&self.basis(i), &self.multiply(&self.basis(j), &self.basis(k)));
                    if lhs != rhs {
                        out.push(AxiomViolation { law: "associativity", indices: vec![i, j, k] });
                    }
                }
                let _ = f;
            }
        }
        for i in 0..self.dim {
            if self.multiply(&self.unit, &self.basis(i)) != self.basis(i) {
                out.push(AxiomViolation { law: "left unit", indices: vec![i] });
            }
            if self.multiply(&self.basis(i), &self.unit) != self.basis(i) {
                out.push(AxiomViolation { law: "right unit", indices: vec![i] });
            }
        }
        out
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| self.mult_row(i, j) == self.mult_row(j, i))
        })
    }
}

/// An (A,A)-bimodule given by action tensors: `left[(a,m,m')]` holds the
/// `e_{m'}` coefficient of `a_a · e_m`, and `right[(m,a,m')]` that of
/// `e_m · a_a`.
#[derive(Clone, Debug)]
pub struct Bimodule {
    pub field: Field,
    pub dim: usize,
    pub adim: usize,
    left: Vec<Scalar>,
    right: Vec<Scalar>,
}

impl Bimodule {
    pub fn new(
        field: Field,
        dim: usize,
        adim: usize,
        left: Vec<Scalar>,
        right: Vec<Scalar>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("bimodule dimension must be positive"));
        }
        if left.len() != adim * dim * dim || right.len() != dim * adim * dim {
            return Err(Error::validation("action tables have wrong size"));
        }
        Ok(Bimodule { field, dim, adim, left, right })
    }

    /// Coefficients of `a_a · e_m`.
    pub fn left_row(&self, a: usize, m: usize) -> &[Scalar] {
        let d = self.dim;
        &self.left[(a * d + m) * d..(a * d + m + 1) * d]
    }

    /// Coefficients of `e_m · a_a`.
    pub fn right_row(&self, m: usize, a: usize) -> &[Scalar] {
        let d = self.dim;
        &self.right[(m * self.adim + a) * d..(m * self.adim + a + 1) * d]
    }

    pub fn left_apply(&self, a: &[Scalar], m: &[Scalar]) -> Vec<Scalar> {
        self.apply(a, m, |i, j| self.left_row(i, j))
    }

    pub fn right_apply(&self, m: &[Scalar], a: &[Scalar]) -> Vec<Scalar> {
        self.apply(m, a, |i, j| self.right_row(i, j))
    }

    fn apply<'a>(
        &'a self,
        u: &[Scalar],
        v: &[Scalar],
        row: impl Fn(usize, usize) -> &'a [Scalar],
    ) -> Vec<Scalar> {
        let f = &self.field;
        let mut out = vec![f.zero(); self.dim];
        for (i, ui) in u.iter().enumerate() {
            if f.is_zero(ui) {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if f.is_zero(vj) {
                    continue;
                }
                let c = f.mul(ui, vj);
                for (k, w) in row(i, j).iter().enumerate() {
                    if !f.is_zero(w) {
                        out[k] = f.add(&out[k], &f.mul(&c, w));
                    }
                }
            }
        }
        out
    }

    /// Checks module axioms, the two-sided compatibility, and that the unit
    /// acts as the identity on both sides.
    pub fn verify(&self, algebra: &FiniteAlgebra) -> Vec<AxiomViolation> {
        let mut out = Vec::new();
        if algebra.dim != self.adim {
            out.push(AxiomViolation { law: "algebra dimension mismatch", indices: vec![] });
            return out;
        }
        let abasis = |i: usize| {
            let mut v = vec![self.field.zero(); self.adim];
            v[i] = self.field.one();
            v
        };
        let mbasis = |i: usize| {
            let mut v = vec![self.field.zero(); self.dim];
            v[i] = self.field.one();
            v
        };
        for i in 0..self.adim {
            for j in 0..self.adim {
                for m in 0..self.dim {
                    let ab = algebra.multiply(&abasis(i), &abasis(j));
                    if self.left_apply(&ab, &mbasis(m))
                        != self.left_apply(&abasis(i), &self.left_apply(&abasis(j), &mbasis(m)))
                    {
                        out.push(AxiomViolation { law: "left action", indices: vec![i, j, m] });
                    }
                    if self.right_apply(&self.right_apply(&mbasis(m), &abasis(i)), &abasis(j))
                        != self.right_apply(&mbasis(m), &ab)
                    {
                        out.push(AxiomViolation { law: "right action", indices: vec![i, j, m] });
                    }
                    if self.right_apply(&self.left_apply(&abasis(i), &mbasis(m)), &abasis(j))
                        != self.left_apply(&abasis(i), &self.right_apply(&mbasis(m), &abasis(j)))
                    {
                        out.push(AxiomViolation { law: "compatibility", indices: vec![i, j, m] });
                    }
                }
            }
        }
        for m in 0..self.dim {
            if self.left_apply(&algebra.unit, &mbasis(m)) != mbasis(m) {
                out.push(AxiomViolation { law: "left unit action", indices: vec![m] });
            }
            if self.right_apply(&mbasis(m), &algebra.unit) != mbasis(m) {
                out.push(AxiomViolation { law: "right unit action", indices: vec![m] });
            }
        }
        out
    }

    /// True when the two actions agree: `a·m = m·a` for all basis pairs.
    pub fn is_symmetric(&self) -> bool {
        (0..self.adim).all(|a| (0..self.dim).all(|m| self.left_row(a, m) == self.right_row(m, a)))
    }
}

/// The ground field as an algebra over itself, with itself as bimodule.
pub fn ground_field(field: Field) -> (FiniteAlgebra, Bimodule) {
    let a = FiniteAlgebra::new(field, 1, vec![field.one()], vec![field.one()])
        .expect("ground field is well-formed");
    let m = regular_bimodule(&a);
    (a, m)
}

/// The truncated polynomial algebra `K[x]/(x^n)` with basis `1, x, …, x^{n-1}`.
pub fn truncated_poly(n: usize, field: Field) -> Result<FiniteAlgebra> {
    if n == 0 {
        return Err(Error::validation("truncation exponent must be at least 1"));
    }
    let mut mult = vec![field.zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            if i + j < n {
                mult[(i * n + j) * n + (i + j)] = field.one();
            }
        }
    }
    let mut unit = vec![field.zero(); n];
    unit[0] = field.one();
    FiniteAlgebra::new(field, n, mult, unit)
}

/// `A` viewed as a bimodule over itself; both actions are the multiplication.
pub fn regular_bimodule(a: &FiniteAlgebra) -> Bimodule {
    let d = a.dim;
    let mut left = Vec::with_capacity(d * d * d);
    let mut right = Vec::with_capacity(d * d * d);
    for i in 0..d {
        for j in 0..d {
            left.extend(a.mult_row(i, j).iter().cloned());
            right.extend(a.mult_row(i, j).iter().cloned());
        }
    }
    Bimodule::new(a.field, d, d, left, right).expect("regular bimodule is well-formed")
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonCoeff {
    Int(i64),
    Ratio(i64, i64),
}

impl JsonCoeff {
    fn to_scalar(&self, field: &Field) -> Result<Scalar> {
        match self {
            JsonCoeff::Int(n) => Ok(field.integer(*n)),
            JsonCoeff::Ratio(n, d) => field.ratio(*n, *d),
        }
    }
}

#[derive(Deserialize)]
struct AlgebraDescriptor {
    dim: usize,
    mult: Vec<(usize, usize, usize, i64, i64)>,
    unit: Vec<JsonCoeff>,
}

#[derive(Deserialize)]
struct BimoduleDescriptor {
    dim: usize,
    left: Vec<(usize, usize, usize, i64, i64)>,
    right: Vec<(usize, usize, usize, i64, i64)>,
}

fn fill_tensor(
    field: &Field,
    shape: (usize, usize, usize),
    rows: &[(usize, usize, usize, i64, i64)],
) -> Result<Vec<Scalar>> {
    let (d0, d1, d2) = shape;
    let mut t = vec![field.zero(); d0 * d1 * d2];
    for &(i, j, k, num, den) in rows {
        if i >= d0 || j >= d1 || k >= d2 {
            return Err(Error::validation(format!(
                "structure constant index ({i},{j},{k}) out of range"
            )));
        }
        let idx = (i * d1 + j) * d2 + k;
        let c = field.ratio(num, den)?;
        t[idx] = field.add(&t[idx], &c);
    }
    Ok(t)
}

/// Parses the JSON algebra descriptor
/// `{ "dim": d, "mult": [[i,j,k,num,den],…], "unit": [..] }`; the unit vector
/// entries are integers or `[num,den]` pairs. Axioms are verified.
pub fn algebra_from_json(text: &str, field: Field) -> Result<FiniteAlgebra> {
    let desc: AlgebraDescriptor = serde_json::from_str(text)
        .map_err(|e| Error::validation(format!("bad algebra descriptor: {e}")))?;
    if desc.unit.len() != desc.dim {
        return Err(Error::validation("unit vector length differs from dim"));
    }
    let mult = fill_tensor(&field, (desc.dim, desc.dim, desc.dim), &desc.mult)?;
    let unit = desc
        .unit
        .iter()
        .map(|c| c.to_scalar(&field))
        .collect::<Result<Vec<_>>>()?;
    let a = FiniteAlgebra::new(field, desc.dim, mult, unit)?;
    let violations = a.verify();
    if !violations.is_empty() {
        return Err(Error::validation(format!(
            "algebra descriptor violates axioms: {}",
            violations[0]
        )));
    }
    Ok(a)
}

/// Parses a bimodule descriptor
/// `{ "dim": m, "left": [[a,m,m',num,den],…], "right": [[m,a,m',num,den],…] }`
/// over the given algebra. Axioms are verified.
pub fn bimodule_from_json(text: &str, algebra: &FiniteAlgebra) -> Result<Bimodule> {
    let field = algebra.field;
    let desc: BimoduleDescriptor = serde_json::from_str(text)
        .map_err(|e| Error::validation(format!("bad bimodule descriptor: {e}")))?;
    let left = fill_tensor(&field, (algebra.dim, desc.dim, desc.dim), &desc.left)?;
    let right = fill_tensor(&field, (desc.dim, algebra.dim, desc.dim), &desc.right)?;
    let m = Bimodule::new(field, desc.dim, algebra.dim, left, right)?;
    let violations = m.verify(algebra);
    if !violations.is_empty() {
        return Err(Error::validation(format!(
            "bimodule descriptor violates axioms: {}",
            violations[0]
        )));
    }
    Ok(m)
}
