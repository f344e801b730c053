//! Real Clifford algebra Cl(n) arithmetic on dense coefficient tables.
//!
//! Generators satisfy e_i e_j + e_j e_i = -2 delta_ij, so e_i^2 = -1. Blades
//! are indexed by bitmasks: bit k-1 set means generator e_k is present, and
//! the 2^n masks in ascending order form the canonical basis. On top of the
//! product, conjugation and grading, this module provides the even/odd split
//! a = a_0 + e_{i0} a_1 and the beta/alpha isomorphisms onto Cl(n-1) that
//! drive the dimensional reduction used by the solvers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Hard cap on the number of generators; 2^12 coefficients is already 32 KiB.
pub const MAX_DIM: usize = 12;

/// A basis blade of Cl(n), stored as a bitmask over generator indices 1..=n.
///
/// The empty mask is the scalar blade. Equality is mask equality.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BladeIndex(pub u16);

impl BladeIndex {
    pub const SCALAR: BladeIndex = BladeIndex(0);

    /// Build from 1-based generator indices; rejects duplicates and zeros.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u16;
        for &i in indices {
            if i == 0 || i > MAX_DIM {
                return Err(CoreError::input(format!(
                    "generator index {i} outside 1..={MAX_DIM}"
                )));
            }
            let bit = 1u16 << (i - 1);
            if mask & bit != 0 {
                return Err(CoreError::input(format!("repeated generator index {i}")));
            }
            mask |= bit;
        }
        Ok(BladeIndex(mask))
    }

    /// Grade of the blade (number of generators).
    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    /// 1-based generator indices in ascending order.
    pub fn indices(self) -> Vec<usize> {
        (0..MAX_DIM).filter(|b| self.0 >> b & 1 == 1).map(|b| b + 1).collect()
    }

    /// Canonical label: "" for the scalar, "1,3" for e_1 e_3.
    pub fn label(self) -> String {
        self.indices().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
    }

    /// Parse the canonical label format.
    pub fn parse_label(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Ok(BladeIndex::SCALAR);
        }
        let mut indices = Vec::new();
        for part in s.split(',') {
            let i: usize = part
                .trim()
                .parse()
                .map_err(|_| CoreError::input(format!("bad blade label {s:?}")))?;
            indices.push(i);
        }
        let blade = Self::from_indices(&indices)?;
        if blade.indices() != indices {
            return Err(CoreError::input(format!("blade label {s:?} not ascending")));
        }
        Ok(blade)
    }
}

impl fmt::Display for BladeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            write!(f, "1")
        } else {
            write!(f, "e{}", self.indices().iter().map(|i| i.to_string()).collect::<String>())
        }
    }
}

/// Sign from reordering e_A e_B into canonical order and contracting repeats.
///
/// Swap count is the number of pairs (i in A, j in B) with i > j; every shared
/// generator then contracts with e_i^2 = -1. Returns +1.0 or -1.0.
#[inline]
pub fn blade_product_sign(a: u16, b: u16) -> f64 {
    let mut swaps = 0u32;
    let mut sh = a >> 1;
    while sh != 0 {
        swaps += (sh & b).count_ones();
        sh >>= 1;
    }
    let contractions = (a & b).count_ones();
    if (swaps + contractions) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Dense multivector of Cl(n): 2^n real coefficients in canonical blade order.
#[derive(Clone, PartialEq)]
pub struct Multivector {
    dim: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "{c}*{}", BladeIndex(mask as u16))?;
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " [Cl({})]", self.dim)
    }
}

impl Multivector {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "Cl({dim}) exceeds supported dimension {MAX_DIM}");
        Multivector { dim, coeffs: vec![0.0; 1 << dim] }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        let mut mv = Self::zero(dim);
        mv.coeffs[0] = value;
        mv
    }

    /// Grade-1 element from coordinates (x^1, ..., x^n).
    pub fn vector(coords: &[f64]) -> Self {
        let mut mv = Self::zero(coords.len());
        for (i, &c) in coords.iter().enumerate() {
            mv.coeffs[1 << i] = c;
        }
        mv
    }

    /// Paravector x^0 + sum x^j e_j from coordinates (x^0, ..., x^n); lives in Cl(n).
    pub fn paravector(coords: &[f64]) -> Self {
        assert!(!coords.is_empty());
        let mut mv = Self::zero(coords.len() - 1);
        mv.coeffs[0] = coords[0];
        for (i, &c) in coords[1..].iter().enumerate() {
            mv.coeffs[1 << i] = c;
        }
        mv
    }

    pub fn basis_blade(dim: usize, blade: BladeIndex) -> Self {
        let mut mv = Self::zero(dim);
        mv.coeffs[blade.0 as usize] = 1.0;
        mv
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, blade: BladeIndex) -> f64 {
        self.coeffs.get(blade.0 as usize).copied().unwrap_or(0.0)
    }

    pub fn set_coeff(&mut self, blade: BladeIndex, value: f64) {
        self.coeffs[blade.0 as usize] = value;
    }

    pub fn from_coeffs(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != 1 << dim {
            return Err(CoreError::input(format!(
                "expected {} coefficients for Cl({dim}), got {}",
                1usize << dim,
                coeffs.len()
            )));
        }
        Ok(Multivector { dim, coeffs })
    }

    /// Euclidean coefficient norm.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn scalar_part(&self) -> f64 {
        self.coeffs[0]
    }

    /// Coordinates of the grade-1 part.
    pub fn vector_part(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.coeffs[1 << i]).collect()
    }

    /// Paravector coordinates (x^0, x^1, ..., x^n).
    pub fn paravector_part(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim + 1);
        out.push(self.coeffs[0]);
        out.extend((0..self.dim).map(|i| self.coeffs[1 << i]));
        out
    }

    /// Keep only blades of the given grade.
    pub fn grade_part(&self, grade: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if (mask.count_ones() as usize) == grade {
                out.coeffs[mask] = c;
            }
        }
        out
    }

    pub fn is_grade(&self, grade: usize) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(mask, &c)| c == 0.0 || mask.count_ones() as usize == grade)
    }

    pub fn is_even(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(mask, &c)| c == 0.0 || mask.count_ones() % 2 == 0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Multivector { dim: self.dim, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in add");
        Multivector {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in sub");
        Multivector {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * s;
        }
    }

    /// Geometric product. Both factors must share the Clifford dimension.
    pub fn geometric_product(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(CoreError::input(format!(
                "geometric product dimension mismatch: Cl({}) vs Cl({})",
                self.dim, other.dim
            )));
        }
        let size = 1usize << self.dim;
        let mut out = Self::zero(self.dim);
        for a in 0..size {
            let ca = self.coeffs[a];
            if ca == 0.0 {
                continue;
            }
            for b in 0..size {
                let cb = other.coeffs[b];
                if cb == 0.0 {
                    continue;
                }
                let sign = blade_product_sign(a as u16, b as u16);
                out.coeffs[a ^ b] += sign * ca * cb;
            }
        }
        Ok(out)
    }

    /// Clifford conjugation: linear anti-involution with
    /// conj(e_A) = (-1)^{k(k+1)/2} e_A for a grade-k blade.
    pub fn conjugate(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (mask, &c) in self.coeffs.iter().enumerate() {
            let k = mask.count_ones() as usize;
            let sign = if (k * (k + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            out.coeffs[mask] = sign * c;
        }
        out
    }

    /// JSON form { "n": dim, "coeffs": { "<label>": value, ... } } with only
    /// nonzero coefficients, keys in canonical order.
    pub fn to_json(&self) -> MultivectorJson {
        let mut coeffs = BTreeMap::new();
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                coeffs.insert(BladeIndex(mask as u16).label(), c);
            }
        }
        MultivectorJson { n: self.dim, coeffs }
    }

    pub fn from_json(json: &MultivectorJson) -> Result<Self> {
        if json.n > MAX_DIM {
            return Err(CoreError::input(format!("Cl({}) exceeds limit {MAX_DIM}", json.n)));
        }
        let mut mv = Self::zero(json.n);
        for (label, &value) in &json.coeffs {
            let blade = BladeIndex::parse_label(label)?;
            if blade.0 as usize >= 1 << json.n {
                return Err(CoreError::input(format!(
                    "blade {label:?} does not fit in Cl({})",
                    json.n
                )));
            }
            mv.coeffs[blade.0 as usize] = value;
        }
        Ok(mv)
    }
}

/// Serialized multivector; absent blades read as zero.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MultivectorJson {
    pub n: usize,
    pub coeffs: BTreeMap<String, f64>,
}

/// Result of the split a = even + e_{i0} * odd_cofactor, both parts even.
#[derive(Clone, Debug)]
pub struct GradedParts {
    pub even: Multivector,
    pub odd_cofactor: Multivector,
    pub pivot: usize,
}

impl GradedParts {
    /// Reassemble even + e_{i0} * odd_cofactor.
    pub fn recompose(&self) -> Multivector {
        let dim = self.even.dim();
        let e = Multivector::basis_blade(dim, BladeIndex(1 << (self.pivot - 1)));
        let rhs = e.geometric_product(&self.odd_cofactor).expect("same dimension");
        self.even.add(&rhs)
    }
}

/// Split a into (a_0, a_1) with a = a_0 + e_{i0} a_1; a_1 = -e_{i0} * odd(a).
pub fn split_even_odd(a: &Multivector, i0: usize) -> Result<GradedParts> {
    check_pivot(a.dim(), i0)?;
    let dim = a.dim();
    let mut even = Multivector::zero(dim);
    let mut odd = Multivector::zero(dim);
    for (mask, &c) in a.coeffs().iter().enumerate() {
        if mask.count_ones() % 2 == 0 {
            even.coeffs[mask] = c;
        } else {
            odd.coeffs[mask] = c;
        }
    }
    let e = Multivector::basis_blade(dim, BladeIndex(1 << (i0 - 1)));
    let odd_cofactor = e.geometric_product(&odd)?.scale(-1.0);
    Ok(GradedParts { even, odd_cofactor, pivot: i0 })
}

fn check_pivot(dim: usize, i0: usize) -> Result<()> {
    if i0 == 0 || i0 > dim {
        Err(CoreError::input(format!("pivot index {i0} outside 1..={dim}")))
    } else {
        Ok(())
    }
}

/// Reindex a generator of Cl(n) \ {i0} into Cl(n-1): i -> i for i < i0, i-1 otherwise.
#[inline]
fn reindex_down(i: usize, i0: usize) -> usize {
    if i < i0 {
        i
    } else {
        i - 1
    }
}

#[inline]
fn reindex_up(i: usize, i0: usize) -> usize {
    if i < i0 {
        i
    } else {
        i + 1
    }
}

/// Algebra isomorphism Cl(n)^+ -> Cl(n-1) determined by e_{i0} e_i -> e_i
/// (i < i0) or e_{i-1} (i > i0).
///
/// An even blade factors into such pairs: with i0 absent the image is the
/// reindexed blade; with i0 present, e_{i0} moves to the front picking up
/// (-1)^{#(indices below i0)} and the remaining indices reindex.
pub fn beta_iso(a: &Multivector, i0: usize) -> Result<Multivector> {
    let n = a.dim();
    if n < 2 {
        return Err(CoreError::input("beta_iso requires Cl(n) with n >= 2"));
    }
    check_pivot(n, i0)?;
    if !a.is_even() {
        return Err(CoreError::input("beta_iso input has odd-grade content"));
    }
    let pivot_bit = 1usize << (i0 - 1);
    let below_mask = pivot_bit - 1;
    let mut out = Multivector::zero(n - 1);
    for (mask, &c) in a.coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let (sign, residual) = if mask & pivot_bit != 0 {
            let below = (mask & below_mask).count_ones();
            (if below % 2 == 0 { 1.0 } else { -1.0 }, mask & !pivot_bit)
        } else {
            (1.0, mask)
        };
        let mut image = 0usize;
        for i in 1..=n {
            if residual & (1 << (i - 1)) != 0 {
                image |= 1 << (reindex_down(i, i0) - 1);
            }
        }
        out.coeffs[image] += sign * c;
    }
    Ok(out)
}

/// Inverse of [`beta_iso`]: Cl(n-1) -> Cl(n)^+ for the same pivot.
pub fn beta_iso_inv(b: &Multivector, i0: usize, n: usize) -> Result<Multivector> {
    if n < 2 || b.dim() != n - 1 {
        return Err(CoreError::input(format!(
            "beta_iso_inv expects Cl({}) input for target Cl({n})",
            n.saturating_sub(1)
        )));
    }
    check_pivot(n, i0)?;
    let pivot_bit = 1usize << (i0 - 1);
    let below_mask = pivot_bit - 1;
    let mut out = Multivector::zero(n);
    for (mask, &c) in b.coeffs().iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let mut lifted = 0usize;
        for j in 1..n {
            if mask & (1 << (j - 1)) != 0 {
                lifted |= 1 << (reindex_up(j, i0) - 1);
            }
        }
        if mask.count_ones() % 2 == 1 {
            let below = (lifted & below_mask).count_ones();
            let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
            out.coeffs[lifted | pivot_bit] += sign * c;
        } else {
            out.coeffs[lifted] += c;
        }
    }
    Ok(out)
}

/// Vector-space isomorphism Cl(n)^(1) -> Cl(n-1)^(0) + Cl(n-1)^(1): the e_{i0}
/// coordinate moves to the scalar slot, the rest reindex.
pub fn alpha_iso(x: &Multivector, i0: usize) -> Result<Multivector> {
    let n = x.dim();
    if n < 2 {
        return Err(CoreError::input("alpha_iso requires Cl(n) with n >= 2"));
    }
    check_pivot(n, i0)?;
    if !x.is_grade(1) {
        return Err(CoreError::input("alpha_iso input is not a vector"));
    }
    let coords = x.vector_part();
    let mut out = Multivector::zero(n - 1);
    out.coeffs[0] = coords[i0 - 1];
    for i in 1..=n {
        if i != i0 {
            out.coeffs[1 << (reindex_down(i, i0) - 1)] = coords[i - 1];
        }
    }
    Ok(out)
}

/// Inverse of [`alpha_iso`]: paravector of Cl(n-1) back to a vector of Cl(n).
pub fn alpha_iso_inv(y: &Multivector, i0: usize, n: usize) -> Result<Multivector> {
    if n < 2 || y.dim() != n - 1 {
        return Err(CoreError::input(format!(
            "alpha_iso_inv expects Cl({}) input for target Cl({n})",
            n.saturating_sub(1)
        )));
    }
    check_pivot(n, i0)?;
    for (mask, &c) in y.coeffs().iter().enumerate() {
        if c != 0.0 && mask != 0 && mask.count_ones() != 1 {
            return Err(CoreError::input("alpha_iso_inv input is not a paravector"));
        }
    }
    let mut coords = vec![0.0; n];
    coords[i0 - 1] = y.coeffs()[0];
    for j in 1..n {
        coords[reindex_up(j, i0) - 1] = y.coeffs()[1 << (j - 1)];
    }
    Ok(Multivector::vector(&coords))
}

/// Coordinate form of [`alpha_iso`]: (x^1..x^n) -> (y^0..y^{n-1}).
pub fn point_to_reduced(x: &[f64], i0: usize) -> Vec<f64> {
    let n = x.len();
    let mut y = Vec::with_capacity(n);
    y.push(x[i0 - 1]);
    for (i, &c) in x.iter().enumerate() {
        if i + 1 != i0 {
            y.push(c);
        }
    }
    y
}

/// Inverse coordinate form: (y^0..y^{n-1}) -> (x^1..x^n).
pub fn point_from_reduced(y: &[f64], i0: usize) -> Vec<f64> {
    let n = y.len();
    let mut x = vec![0.0; n];
    x[i0 - 1] = y[0];
    let mut k = 1;
    for (i, slot) in x.iter_mut().enumerate() {
        if i + 1 != i0 {
            *slot = y[k];
            k += 1;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn e(dim: usize, indices: &[usize]) -> Multivector {
        Multivector::basis_blade(dim, BladeIndex::from_indices(indices).unwrap())
    }

    fn gp(a: &Multivector, b: &Multivector) -> Multivector {
        a.geometric_product(b).unwrap()
    }

    #[test]
    fn generator_square_is_minus_one() {
        for n in 1..=6 {
            for i in 1..=n {
                let ei = e(n, &[i]);
                let sq = gp(&ei, &ei);
                assert_eq!(sq.scalar_part(), -1.0);
                assert_eq!(sq.norm(), 1.0);
            }
        }
    }

    #[test]
    fn generators_anticommute() {
        for n in 2..=6 {
            for i in 1..=n {
                for j in 1..=n {
                    if i == j {
                        continue;
                    }
                    let lhs = gp(&e(n, &[i]), &e(n, &[j])).add(&gp(&e(n, &[j]), &e(n, &[i])));
                    assert!(lhs.is_zero(), "e{i} e{j} + e{j} e{i} != 0 in Cl({n})");
                }
            }
        }
    }

    #[test]
    fn product_examples() {
        // e1 e2 = e12 and e2 e1 = -e12
        let p = gp(&e(2, &[1]), &e(2, &[2]));
        assert_eq!(p.coeff(BladeIndex::from_indices(&[1, 2]).unwrap()), 1.0);
        let q = gp(&e(2, &[2]), &e(2, &[1]));
        assert_eq!(q.coeff(BladeIndex::from_indices(&[1, 2]).unwrap()), -1.0);
        // (e1 e2)(e1 e2) = -e1^2 e2^2 = -1
        let b = e(2, &[1, 2]);
        assert_eq!(gp(&b, &b).scalar_part(), -1.0);
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(Multivector::scalar(2, 1.0).conjugate().scalar_part(), 1.0);
        // conj(e1) = -e1
        assert_eq!(e(2, &[1]).conjugate().coeff(BladeIndex(0b01)), -1.0);
        // conj(e12) = e2 e1 = -e12
        assert_eq!(e(2, &[1, 2]).conjugate().coeff(BladeIndex(0b11)), -1.0);
        // grade 3: conj(e123) = (-1)^{3*4/2} e123 = e123
        assert_eq!(e(3, &[1, 2, 3]).conjugate().coeff(BladeIndex(0b111)), 1.0);
    }

    #[test]
    fn split_examples() {
        // a = 1 splits as (1, 0) for any pivot
        let parts = split_even_odd(&Multivector::scalar(2, 1.0), 1).unwrap();
        assert_eq!(parts.even.scalar_part(), 1.0);
        assert!(parts.odd_cofactor.is_zero());

        // a = e1, pivot 1: e1 = e1 * 1
        let parts = split_even_odd(&e(2, &[1]), 1).unwrap();
        assert!(parts.even.is_zero());
        assert_eq!(parts.odd_cofactor.scalar_part(), 1.0);

        // a = x1 e1 - x2 e2, pivot 1: odd cofactor = -e1(x1 e1 - x2 e2) = x1 + x2 e12
        let (x1, x2) = (0.7, 1.3);
        let a = Multivector::vector(&[x1, -x2]);
        let parts = split_even_odd(&a, 1).unwrap();
        assert!(parts.even.is_zero());
        assert_eq!(parts.odd_cofactor.scalar_part(), x1);
        assert_eq!(parts.odd_cofactor.coeff(BladeIndex(0b11)), x2);
        assert_eq!(parts.recompose(), a);
    }

    #[test]
    fn split_rejects_bad_pivot() {
        assert!(split_even_odd(&Multivector::scalar(2, 1.0), 0).is_err());
        assert!(split_even_odd(&Multivector::scalar(2, 1.0), 3).is_err());
    }

    #[test]
    fn beta_examples() {
        // beta_1(1) = 1
        let one = Multivector::scalar(2, 1.0);
        assert_eq!(beta_iso(&one, 1).unwrap().scalar_part(), 1.0);
        // beta_1(e1 e2) = e1 in Cl(1)
        let img = beta_iso(&e(2, &[1, 2]), 1).unwrap();
        assert_eq!(img.dim(), 1);
        assert_eq!(img.coeff(BladeIndex(0b1)), 1.0);
        // homomorphism consistency: beta_1(-1) = (beta_1(e12))^2 = e1^2 = -1
        let sq = gp(&e(2, &[1, 2]), &e(2, &[1, 2]));
        assert_eq!(beta_iso(&sq, 1).unwrap().scalar_part(), -1.0);
        // pivot inside the blade, indices below it flip the sign:
        // beta_2(e1 e2) = -beta_2(e2 e1) = -e1
        let img = beta_iso(&e(2, &[1, 2]), 2).unwrap();
        assert_eq!(img.coeff(BladeIndex(0b1)), -1.0);
    }

    #[test]
    fn beta_rejects_odd_content() {
        assert!(beta_iso(&e(2, &[1]), 1).is_err());
    }

    #[test]
    fn alpha_examples() {
        // alpha_1(e1) = 1
        let img = alpha_iso(&e(2, &[1]), 1).unwrap();
        assert_eq!(img.scalar_part(), 1.0);
        assert_eq!(img.norm(), 1.0);
        // alpha_1(e2) = e1 in Cl(1)
        let img = alpha_iso(&e(2, &[2]), 1).unwrap();
        assert_eq!(img.coeff(BladeIndex(0b1)), 1.0);
        // alpha_2(3 e1 + 5 e2) = 5 + 3 e1
        let img = alpha_iso(&Multivector::vector(&[3.0, 5.0]), 2).unwrap();
        assert_eq!(img.scalar_part(), 5.0);
        assert_eq!(img.coeff(BladeIndex(0b1)), 3.0);
    }

    #[test]
    fn alpha_rejects_non_vector() {
        assert!(alpha_iso(&Multivector::scalar(2, 1.0), 1).is_err());
        assert!(alpha_iso(&e(2, &[1, 2]), 1).is_err());
    }

    #[test]
    fn point_maps_round_trip() {
        let x = [1.0, 2.0, 3.0];
        for i0 in 1..=3 {
            let y = point_to_reduced(&x, i0);
            assert_eq!(y[0], x[i0 - 1]);
            assert_eq!(point_from_reduced(&y, i0), x.to_vec());
        }
    }

    #[test]
    fn json_round_trip() {
        let mut a = Multivector::zero(3);
        a.set_coeff(BladeIndex::SCALAR, 1.5);
        a.set_coeff(BladeIndex::from_indices(&[1, 2]).unwrap(), -2.25);
        let json = a.to_json();
        assert_eq!(json.coeffs.get(""), Some(&1.5));
        assert_eq!(json.coeffs.get("1,2"), Some(&-2.25));
        let text = serde_json::to_string(&json).unwrap();
        let back: MultivectorJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Multivector::from_json(&back).unwrap(), a);
    }

    fn arb_multivector(dim: usize) -> impl Strategy<Value = Multivector> {
        proptest::collection::vec(-2.0f64..2.0, 1 << dim)
            .prop_map(move |coeffs| Multivector::from_coeffs(dim, coeffs).unwrap())
    }

    fn arb_even(dim: usize) -> impl Strategy<Value = Multivector> {
        arb_multivector(dim).prop_map(|mut mv| {
            let size = mv.coeffs().len();
            for mask in 0..size {
                if mask.count_ones() % 2 == 1 {
                    mv.set_coeff(BladeIndex(mask as u16), 0.0);
                }
            }
            mv
        })
    }

    fn rel_close(a: &Multivector, b: &Multivector, scale: f64) -> bool {
        a.sub(b).norm() <= 1e-12 * scale.max(1e-2)
    }

    proptest! {
        #[test]
        fn associativity(ab in arb_multivector(3), bb in arb_multivector(3), cb in arb_multivector(3)) {
            let lhs = gp(&gp(&ab, &bb), &cb);
            let rhs = gp(&ab, &gp(&bb, &cb));
            let scale = ab.norm() * bb.norm() * cb.norm();
            prop_assert!(rel_close(&lhs, &rhs, scale));
        }

        #[test]
        fn conjugation_anti_homomorphism(a in arb_multivector(3), b in arb_multivector(3)) {
            let lhs = gp(&a, &b).conjugate();
            let rhs = gp(&b.conjugate(), &a.conjugate());
            prop_assert!(rel_close(&lhs, &rhs, a.norm() * b.norm()));
        }

        #[test]
        fn conjugation_involution(a in arb_multivector(4)) {
            prop_assert_eq!(a.conjugate().conjugate(), a);
        }

        #[test]
        fn split_recompose_exact(a in arb_multivector(3), i0 in 1usize..=3) {
            let parts = split_even_odd(&a, i0).unwrap();
            prop_assert!(parts.even.is_even());
            prop_assert!(parts.odd_cofactor.is_even());
            // recompose is exact: the cofactor product only permutes signs/blades
            prop_assert_eq!(parts.recompose(), a);
        }

        #[test]
        fn beta_is_homomorphism(a in arb_even(3), b in arb_even(3), i0 in 1usize..=3) {
            let lhs = beta_iso(&gp(&a, &b), i0).unwrap();
            let rhs = gp(&beta_iso(&a, i0).unwrap(), &beta_iso(&b, i0).unwrap());
            prop_assert!(rel_close(&lhs, &rhs, a.norm() * b.norm()));
        }

        #[test]
        fn beta_round_trip(a in arb_even(3), i0 in 1usize..=3) {
            let img = beta_iso(&a, i0).unwrap();
            let back = beta_iso_inv(&img, i0, 3).unwrap();
            prop_assert_eq!(back, a);
        }

        #[test]
        fn alpha_round_trip(coords in proptest::collection::vec(-3.0f64..3.0, 3), i0 in 1usize..=3) {
            let x = Multivector::vector(&coords);
            let img = alpha_iso(&x, i0).unwrap();
            let back = alpha_iso_inv(&img, i0, 3).unwrap();
            prop_assert_eq!(back, x);
        }
    }

    #[test]
    fn norm_submultiplicative_smoke() {
        // |ab| <= 2^{n/2} |a||b| in Cl(n); spot-check the constant is respected.
        let mut rng_state = 12345u64;
        let mut next = move || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for _ in 0..100 {
            let a = Multivector::from_coeffs(3, (0..8).map(|_| next()).collect()).unwrap();
            let b = Multivector::from_coeffs(3, (0..8).map(|_| next()).collect()).unwrap();
            let bound = 2f64.powf(1.5) * a.norm() * b.norm();
            assert!(gp(&a, &b).norm() <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn blade_labels() {
        assert_eq!(BladeIndex::SCALAR.label(), "");
        assert_eq!(BladeIndex::from_indices(&[1, 3]).unwrap().label(), "1,3");
        assert_eq!(BladeIndex::parse_label("1,3").unwrap(), BladeIndex(0b101));
        assert!(BladeIndex::parse_label("3,1").is_err());
        assert_relative_eq!(blade_product_sign(0b11, 0b11), -1.0);
    }
}
