//! Prime-field arithmetic, Vandermonde interpolation and error-correcting
//! decoding.
//!
//! Every element carries its modulus so that operands drawn from different
//! fields are caught. The operator impls (`+`, `*`, ...) assert on a modulus
//! mismatch; the `try_*` methods report it as an error instead.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted; keeps every product inside a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

/// A prime field `F_q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    q: u64,
}

impl FieldSpec {
    /// Builds `F_q`, rejecting composite or out-of-range moduli.
    pub fn new(q: u64) -> Result<Self> {
        if !(2..MAX_MODULUS).contains(&q) {
            return Err(Error::InvalidModulus(q));
        }
        if !is_prime(q) {
            return Err(Error::InvalidModulus(q));
        }
        Ok(Self { q })
    }

    /// The smallest prime field with `q > bound`.
    pub fn smallest_above(bound: u64) -> Result<Self> {
        Self::new(next_prime_above(bound))
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Reduces an arbitrary integer into the field.
    pub fn elem(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.q,
            modulus: self.q,
        }
    }

    pub fn from_i64(&self, value: i64) -> FieldElement {
        let q = self.q as i64;
        self.elem(value.rem_euclid(q) as u64)
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    /// All `q` elements in ascending order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |v| self.elem(v))
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q.is_multiple_of(2) {
        return q == 2;
    }
    let mut p = 3;
    while p * p <= q {
        if q.is_multiple_of(p) {
            return false;
        }
        p += 2;
    }
    true
}

pub fn next_prime_above(bound: u64) -> u64 {
    let mut q = bound + 1;
    while !is_prime(q) {
        q += 1;
    }
    q
}

/// An element of `F_q`, always held in canonical form `0 <= value < q`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { q: self.modulus }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::MixedFields {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }

    pub fn try_add(self, other: Self) -> Result<Self> {
        self.same_field(&other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(self, other: Self) -> Result<Self> {
        self.same_field(&other)?;
        Ok(self.add_unchecked(-other))
    }

    pub fn try_mul(self, other: Self) -> Result<Self> {
        self.same_field(&other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(self, other: Self) -> Self {
        let mut v = self.value + other.value;
        if v >= self.modulus {
            v -= self.modulus;
        }
        Self {
            value: v,
            modulus: self.modulus,
        }
    }

    fn mul_unchecked(self, other: Self) -> Self {
        Self {
            value: self.value * other.value % self.modulus,
            modulus: self.modulus,
        }
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = self.spec().one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_unchecked(base);
            }
            base = base.mul_unchecked(base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(self.modulus - 2))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.value)
    }
}

impl Add for FieldElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.modulus, rhs.modulus, "mixed-field addition");
        self.add_unchecked(rhs)
    }
}

impl Sub for FieldElement {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.modulus, rhs.modulus, "mixed-field subtraction");
        self.add_unchecked(-rhs)
    }
}

impl Mul for FieldElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.modulus, rhs.modulus, "mixed-field multiplication");
        self.mul_unchecked(rhs)
    }
}

impl Neg for FieldElement {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: if self.value == 0 {
                0
            } else {
                self.modulus - self.value
            },
            modulus: self.modulus,
        }
    }
}

impl AddAssign for FieldElement {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for FieldElement {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for FieldElement {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

/// Inner product of two equal-length vectors.
pub fn dot(a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    debug_assert_eq!(a.len(), b.len());
    let spec = a.first().or(b.first()).map(|e| e.spec());
    let mut acc = match spec {
        Some(s) => s.zero(),
        None => panic!("dot product of empty vectors has no field"),
    };
    for (x, y) in a.iter().zip(b) {
        acc += *x * *y;
    }
    acc
}

/// The row `[1, i, i^2, ..., i^(d-1)]` assigned to participant `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncodingVector {
    pub node_id: u64,
    pub entries: Vec<FieldElement>,
}

pub fn encoding_vector(node_id: u64, d: usize, spec: FieldSpec) -> Result<EncodingVector> {
    if node_id == 0 || node_id >= spec.modulus() {
        return Err(Error::NodeIdOutOfField {
            id: node_id,
            q: spec.modulus(),
        });
    }
    Ok(EncodingVector {
        node_id,
        entries: powers(spec.elem(node_id), d),
    })
}

/// `[1, x, x^2, ..., x^(len-1)]`.
pub fn powers(x: FieldElement, len: usize) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(len);
    let mut p = x.spec().one();
    for _ in 0..len {
        out.push(p);
        p *= x;
    }
    out
}

/// Evaluates `coeffs[0] + coeffs[1] x + ...` by Horner's rule.
pub fn eval_poly(coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
    let mut acc = x.spec().zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + *c;
    }
    acc
}

fn check_distinct(ids: &[u64], q: u64) -> Result<()> {
    for (i, a) in ids.iter().enumerate() {
        if *a >= q {
            return Err(Error::NodeIdOutOfField { id: *a, q });
        }
        if ids[..i].contains(a) {
            return Err(Error::DuplicateId(*a));
        }
    }
    Ok(())
}

/// Finds `v` with `<psi(ids[j]), v> = values[j]` for every `j`, i.e. the
/// coefficients of the unique polynomial of degree `< ids.len()` through the
/// points. Lagrange interpolation, `O(d^2)`.
pub fn solve_vandermonde(
    ids: &[u64],
    values: &[FieldElement],
    spec: FieldSpec,
) -> Result<Vec<FieldElement>> {
    if ids.len() != values.len() {
        return Err(Error::ArityMismatch {
            expected: ids.len(),
            got: values.len(),
        });
    }
    check_distinct(ids, spec.modulus())?;
    let d = ids.len();
    let xs: Vec<FieldElement> = ids.iter().map(|&i| spec.elem(i)).collect();

    // master(x) = prod (x - x_j), coefficients low to high
    let mut master = vec![spec.zero(); d + 1];
    master[0] = spec.one();
    for (deg, &xj) in xs.iter().enumerate() {
        for i in (0..=deg + 1).rev() {
            let lower = if i > 0 { master[i - 1] } else { spec.zero() };
            master[i] = lower - xj * master[i];
        }
    }

    let mut out = vec![spec.zero(); d];
    let mut basis = vec![spec.zero(); d];
    for (i, &xi) in xs.iter().enumerate() {
        // master / (x - x_i) by synthetic division
        let mut carry = spec.zero();
        for j in (0..d).rev() {
            carry = master[j + 1] + carry * xi;
            basis[j] = carry;
        }
        let mut denom = spec.one();
        for (j, &xj) in xs.iter().enumerate() {
            if j != i {
                denom *= xi - xj;
            }
        }
        let scale = values[i] * denom.inv()?;
        for j in 0..d {
            out[j] += scale * basis[j];
        }
    }
    Ok(out)
}

/// Solves `a x = b` by Gauss-Jordan elimination. Returns one solution (free
/// variables set to zero) or `None` when the system is inconsistent.
pub fn solve_linear(
    mut a: Vec<Vec<FieldElement>>,
    mut b: Vec<FieldElement>,
    cols: usize,
    spec: FieldSpec,
) -> Option<Vec<FieldElement>> {
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].inv().expect("pivot is nonzero");
        for x in a[r].iter_mut() {
            *x *= inv;
        }
        b[r] *= inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c];
                for j in 0..cols {
                    let sub = f * a[r][j];
                    a[i][j] -= sub;
                }
                let sub = f * b[r];
                b[i] -= sub;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if b[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![spec.zero(); cols];
    for (row, &c) in pivots.iter().enumerate() {
        x[c] = b[row];
    }
    Some(x)
}

/// Divides `num` by `den`, returning `(quotient, remainder)`.
fn poly_divmod(
    num: &[FieldElement],
    den: &[FieldElement],
    spec: FieldSpec,
) -> (Vec<FieldElement>, Vec<FieldElement>) {
    let mut den = den.to_vec();
    while den.last().is_some_and(|c| c.is_zero()) {
        den.pop();
    }
    let mut rem = num.to_vec();
    if rem.len() < den.len() {
        return (vec![spec.zero()], rem);
    }
    let lead_inv = den.last().expect("nonzero divisor").inv().expect("nonzero lead");
    let mut quot = vec![spec.zero(); rem.len() - den.len() + 1];
    for i in (0..quot.len()).rev() {
        let coef = rem[i + den.len() - 1] * lead_inv;
        quot[i] = coef;
        for (j, &dc) in den.iter().enumerate() {
            let sub = coef * dc;
            rem[i + j] -= sub;
        }
    }
    rem.truncate(den.len() - 1);
    (quot, rem)
}

/// Berlekamp-Welch decoding: recovers the `d` coefficients of the polynomial
/// that agrees with all but at most `t` of the given points.
pub fn decode_with_errors(
    ids: &[u64],
    values: &[FieldElement],
    d: usize,
    t: usize,
    spec: FieldSpec,
) -> Result<Vec<FieldElement>> {
    if ids.len() != values.len() || ids.len() < d + 2 * t {
        return Err(Error::ArityMismatch {
            expected: d + 2 * t,
            got: ids.len().min(values.len()),
        });
    }
    check_distinct(ids, spec.modulus())?;
    if t == 0 {
        let coeffs = solve_vandermonde(&ids[..d], &values[..d], spec)?;
        let consistent = ids[d..]
            .iter()
            .zip(&values[d..])
            .all(|(&i, &v)| eval_poly(&coeffs, spec.elem(i)) == v);
        return if consistent {
            Ok(coeffs)
        } else {
            Err(Error::DecodeFailure)
        };
    }

    // Unknowns: Q (d + t coefficients) then E (t low coefficients; E monic of degree t).
    // Q(x_i) - y_i * E_low(x_i) = y_i * x_i^t
    let qlen = d + t;
    let cols = qlen + t;
    let mut rows = Vec::with_capacity(ids.len());
    let mut rhs = Vec::with_capacity(ids.len());
    for (&id, &y) in ids.iter().zip(values) {
        let x = spec.elem(id);
        let pw = powers(x, qlen.max(t + 1));
        let mut row = Vec::with_capacity(cols);
        row.extend_from_slice(&pw[..qlen]);
        for p in pw.iter().take(t) {
            row.push(-(y * *p));
        }
        rows.push(row);
        rhs.push(y * pw[t]);
    }
    let sol = solve_linear(rows, rhs, cols, spec).ok_or(Error::DecodeFailure)?;
    let q_poly = &sol[..qlen];
    let mut e_poly = sol[qlen..].to_vec();
    e_poly.push(spec.one());
    let (quot, rem) = poly_divmod(q_poly, &e_poly, spec);
    if rem.iter().any(|c| !c.is_zero()) {
        return Err(Error::DecodeFailure);
    }
    let mut coeffs = quot;
    coeffs.resize(d.max(coeffs.len()), spec.zero());
    if coeffs[d..].iter().any(|c| !c.is_zero()) {
        return Err(Error::DecodeFailure);
    }
    coeffs.truncate(d);
    let agree = ids
        .iter()
        .zip(values)
        .filter(|(&i, &v)| eval_poly(&coeffs, spec.elem(i)) == v)
        .count();
    if agree + t < ids.len() {
        return Err(Error::DecodeFailure);
    }
    Ok(coeffs)
}
