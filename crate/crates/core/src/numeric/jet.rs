use std::ops::{Add, Mul, Neg, Sub};

use super::{factorial, Scalar};
use crate::error::{Error, Result};

/// Truncated bivariate Taylor series `Σ c[p][q] x^p y^q`, with `x = α − α₀` and
/// `y = β − β₀` around an implicit expansion point, `p ≤ order_a`, `q ≤ order_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariateJet {
    order_a: usize,
    order_b: usize,
    coeffs: Vec<Scalar>,
}

impl BivariateJet {
    pub fn zero(order_a: usize, order_b: usize) -> Self {
        Self {
            order_a,
            order_b,
            coeffs: vec![Scalar::new(0.0, 0.0); (order_a + 1) * (order_b + 1)],
        }
    }

    pub fn constant(c: Scalar, order_a: usize, order_b: usize) -> Self {
        let mut j = Self::zero(order_a, order_b);
        j.coeffs[0] = c;
        j
    }

    /// The jet of `α` itself around `α₀`.
    pub fn variable_a(a0: Scalar, order_a: usize, order_b: usize) -> Self {
        let mut j = Self::constant(a0, order_a, order_b);
        if order_a >= 1 {
            j.set(1, 0, Scalar::new(1.0, 0.0));
        }
        j
    }

    /// The jet of `β` itself around `β₀`.
    pub fn variable_b(b0: Scalar, order_a: usize, order_b: usize) -> Self {
        let mut j = Self::constant(b0, order_a, order_b);
        if order_b >= 1 {
            j.set(0, 1, Scalar::new(1.0, 0.0));
        }
        j
    }

    pub fn from_fn(order_a: usize, order_b: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut j = Self::zero(order_a, order_b);
        for p in 0..=order_a {
            for q in 0..=order_b {
                j.set(p, q, f(p, q));
            }
        }
        j
    }

    pub fn order_a(&self) -> usize {
        self.order_a
    }

    pub fn order_b(&self) -> usize {
        self.order_b
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.order_a, self.order_b)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    #[inline]
    pub fn coeff(&self, p: usize, q: usize) -> Scalar {
        self.coeffs[p * (self.order_b + 1) + q]
    }

    #[inline]
    pub fn set(&mut self, p: usize, q: usize, c: Scalar) {
        self.coeffs[p * (self.order_b + 1) + q] = c;
    }

    pub fn value(&self) -> Scalar {
        self.coeffs[0]
    }

    /// `(∂/∂α)^p (∂/∂β)^q` of the expanded function at the expansion point.
    pub fn partial(&self, p: usize, q: usize) -> Scalar {
        self.coeff(p, q) * factorial(p) * factorial(q)
    }

    /// Jet of `(∂/∂α)^i (∂/∂β)^j f` truncated to `(order_a, order_b)`.
    pub fn derivative(&self, i: usize, j: usize, order_a: usize, order_b: usize) -> Result<Self> {
        if i + order_a > self.order_a || j + order_b > self.order_b {
            return Err(Error::Shape(format!(
                "derivative ({i},{j}) to order ({order_a},{order_b}) needs a jet of order at least ({},{}), have ({},{})",
                i + order_a,
                j + order_b,
                self.order_a,
                self.order_b
            )));
        }
        Ok(Self::from_fn(order_a, order_b, |p, q| {
            let falling_a = factorial(p + i) / factorial(p);
            let falling_b = factorial(q + j) / factorial(q);
            self.coeff(p + i, q + j) * falling_a * falling_b
        }))
    }

    pub fn scale(&self, s: Scalar) -> Self {
        Self {
            order_a: self.order_a,
            order_b: self.order_b,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    fn check_orders(&self, other: &Self) -> Result<()> {
        if self.orders() != other.orders() {
            Err(Error::Shape(format!(
                "jet orders {:?} and {:?} differ",
                self.orders(),
                other.orders()
            )))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_orders(other)?;
        Ok(Self {
            order_a: self.order_a,
            order_b: self.order_b,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_orders(other)?;
        Ok(Self {
            order_a: self.order_a,
            order_b: self.order_b,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    /// Truncated Cauchy product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_orders(other)?;
        let mut out = Self::zero(self.order_a, self.order_b);
        for p in 0..=self.order_a {
            for q in 0..=self.order_b {
                let a = self.coeff(p, q);
                if a == Scalar::new(0.0, 0.0) {
                    continue;
                }
                for r in 0..=self.order_a - p {
                    for s in 0..=self.order_b - q {
                        let idx = (p + r) * (self.order_b + 1) + q + s;
                        out.coeffs[idx] += a * other.coeff(r, s);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Multiplicative inverse; the constant term must be non-zero.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0 == Scalar::new(0.0, 0.0) || !super::is_finite(c0) {
            return Err(Error::Domain("jet with zero constant term has no reciprocal".into()));
        }
        // Normalise to a unit constant term, then solve u * r = 1 degree by degree.
        let u = self.scale(c0.inv());
        let mut r = Self::zero(self.order_a, self.order_b);
        for p in 0..=self.order_a {
            for q in 0..=self.order_b {
                if p == 0 && q == 0 {
                    r.set(0, 0, Scalar::new(1.0, 0.0));
                    continue;
                }
                let mut acc = Scalar::new(0.0, 0.0);
                for i in 0..=p {
                    for j in 0..=q {
                        if i == 0 && j == 0 {
                            continue;
                        }
                        acc += u.coeff(i, j) * r.coeff(p - i, q - j);
                    }
                }
                r.set(p, q, -acc);
            }
        }
        Ok(r.scale(c0.inv()))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.reciprocal()?)
    }

    /// Largest coefficient-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.orders(), other.orders());
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &BivariateJet {
    type Output = BivariateJet;

    fn add(self, rhs: &BivariateJet) -> BivariateJet {
        self.try_add(rhs).expect("jet order mismatch")
    }
}

impl Sub for &BivariateJet {
    type Output = BivariateJet;

    fn sub(self, rhs: &BivariateJet) -> BivariateJet {
        self.try_sub(rhs).expect("jet order mismatch")
    }
}

impl Mul for &BivariateJet {
    type Output = BivariateJet;

    fn mul(self, rhs: &BivariateJet) -> BivariateJet {
        self.try_mul(rhs).expect("jet order mismatch")
    }
}

impl Neg for &BivariateJet {
    type Output = BivariateJet;

    fn neg(self) -> BivariateJet {
        self.scale(Scalar::new(-1.0, 0.0))
    }
}

/// Jet of `(α − β)(1 − αβ)` around `(α₀, β₀)`; exact, since the polynomial has
/// bidegree (2, 2).
pub(crate) fn kernel_denominator_jet(a0: Scalar, b0: Scalar, order_a: usize, order_b: usize) -> BivariateJet {
    let one = BivariateJet::constant(Scalar::new(1.0, 0.0), order_a, order_b);
    let a = BivariateJet::variable_a(a0, order_a, order_b);
    let b = BivariateJet::variable_b(b0, order_a, order_b);
    &(&a - &b) * &(&one - &(&a * &b))
}

/// Taylor expansion of `1 / ((α − β)(1 − αβ))` around `(α₀, β₀)`.
pub fn jet_reciprocal_kernel(a0: Scalar, b0: Scalar, order_a: usize, order_b: usize) -> Result<BivariateJet> {
    let diff = a0 - b0;
    let one_minus = Scalar::new(1.0, 0.0) - a0 * b0;
    if diff.norm() == 0.0 || one_minus.norm() == 0.0 {
        return Err(Error::Domain(format!(
            "expansion point ({a0}, {b0}) lies on the kernel's singular locus"
        )));
    }
    kernel_denominator_jet(a0, b0, order_a, order_b).reciprocal()
}

/// Determinant of a square matrix of jets: cofactor expansion for size ≤ 4,
/// fraction-free elimination with pivoting above that.
pub fn jet_det(m: &[Vec<BivariateJet>]) -> Result<BivariateJet> {
    let n = m.len();
    if n == 0 {
        return Err(Error::Dimension("empty jet matrix".into()));
    }
    if m.iter().any(|row| row.len() != n) {
        return Err(Error::Dimension("jet matrix is not square".into()));
    }
    let orders = m[0][0].orders();
    if let Some(bad) = m.iter().flatten().find(|j| j.orders() != orders) {
        return Err(Error::Shape(format!(
            "jet orders {:?} and {:?} differ",
            orders,
            bad.orders()
        )));
    }
    if n <= 4 {
        let cols: Vec<usize> = (0..n).collect();
        Ok(cofactor(m, 0, &cols))
    } else {
        bareiss(m)
    }
}

fn cofactor(m: &[Vec<BivariateJet>], row: usize, cols: &[usize]) -> BivariateJet {
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    let (oa, ob) = m[0][0].orders();
    let mut acc = BivariateJet::zero(oa, ob);
    for (k, &c) in cols.iter().enumerate() {
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = &m[row][c] * &cofactor(m, row + 1, &rest);
        acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

fn bareiss(m: &[Vec<BivariateJet>]) -> Result<BivariateJet> {
    let n = m.len();
    let (oa, ob) = m[0][0].orders();
    let mut a: Vec<Vec<BivariateJet>> = m.to_vec();
    let mut prev = BivariateJet::constant(Scalar::new(1.0, 0.0), oa, ob);
    let mut negate = false;
    for k in 0..n - 1 {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].value().norm().total_cmp(&a[j][k].value().norm()))
            .unwrap_or(k);
        if a[p][k].value().norm() == 0.0 {
            // Column vanishes at the expansion point; the determinant's constant
            // term is zero and the higher coefficients need a different pivot order.
            return Err(Error::Degenerate(
                "zero pivot column in fraction-free jet elimination".into(),
            ));
        }
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        let inv_prev = prev.reciprocal()?;
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = &t * &inv_prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -&det } else { det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{re, Matrix};

    fn f(a: Scalar, b: Scalar) -> Scalar {
        Scalar::new(1.0, 0.0) / ((a - b) * (Scalar::new(1.0, 0.0) - a * b))
    }

    #[test]
    fn kernel_constant_term() {
        let j = jet_reciprocal_kernel(re(0.3), re(-0.4), 3, 3).unwrap();
        let expected = 1.0 / (0.7 * 1.12);
        assert!((j.value() - re(expected)).norm() < 1e-14);
    }

    #[test]
    fn kernel_first_derivative_matches_central_difference() {
        let (a0, b0) = (re(0.3), re(-0.4));
        let j = jet_reciprocal_kernel(a0, b0, 3, 3).unwrap();
        let h = 1e-5;
        let fd = (f(a0 + h, b0) - f(a0 - h, b0)) / (2.0 * h);
        assert!((j.coeff(1, 0) - fd).norm() / fd.norm() < 1e-6);
    }

    #[test]
    fn kernel_times_denominator_is_one() {
        let (a0, b0) = (Scalar::new(0.2, 0.1), Scalar::new(-0.35, 0.25));
        let j = jet_reciprocal_kernel(a0, b0, 4, 4).unwrap();
        let prod = &j * &kernel_denominator_jet(a0, b0, 4, 4);
        let one = BivariateJet::constant(re(1.0), 4, 4);
        assert!(prod.max_abs_diff(&one) < 1e-12);
    }

    #[test]
    fn kernel_singular_point_is_rejected() {
        assert!(matches!(
            jet_reciprocal_kernel(re(0.5), re(0.5), 2, 2),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            jet_reciprocal_kernel(re(0.5), re(2.0), 2, 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn jet_det_small_cases() {
        let j = jet_reciprocal_kernel(re(0.3), re(-0.4), 2, 2).unwrap();
        assert_eq!(jet_det(&[vec![j.clone()]]).unwrap(), j);

        let c = |x: f64| BivariateJet::constant(re(x), 2, 2);
        let d = jet_det(&[vec![c(1.0), c(2.0)], vec![c(3.0), c(4.0)]]).unwrap();
        assert!((d.value() - re(-2.0)).norm() < 1e-15);
        assert!(d.coeffs()[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn jet_det_matches_scalar_det_of_values() {
        let pts = [
            (re(0.3), re(-0.4)),
            (re(0.1), re(0.5)),
            (Scalar::new(-0.2, 0.3), re(0.6)),
        ];
        let jets: Vec<_> = pts
            .iter()
            .map(|&(a, b)| jet_reciprocal_kernel(a, b, 2, 2).unwrap())
            .collect();
        let m = vec![
            vec![jets[0].clone(), jets[1].clone()],
            vec![jets[2].clone(), jets[0].clone()],
        ];
        let d = jet_det(&m).unwrap();
        let scalar = Matrix::from_fn(2, 2, |i, j| m[i][j].value()).det().unwrap();
        assert!((d.value() - scalar).norm() / scalar.norm() < 1e-10);
    }

    #[test]
    fn bareiss_agrees_with_cofactor() {
        let n = 5;
        let m: Vec<Vec<BivariateJet>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| {
                        let a = Scalar::new(0.1 * i as f64 - 0.2, 0.05 * k as f64);
                        let b = Scalar::new(-0.6 + 0.13 * k as f64, 0.1);
                        jet_reciprocal_kernel(a, b, 2, 2).unwrap()
                    })
                    .collect()
            })
            .collect();
        let fast = bareiss(&m).unwrap();
        let cols: Vec<usize> = (0..n).collect();
        let slow = cofactor(&m, 0, &cols);
        let scale = slow.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(fast.max_abs_diff(&slow) / scale < 1e-10);
    }

    #[test]
    fn mismatched_orders_are_a_shape_error() {
        let a = BivariateJet::constant(re(1.0), 2, 2);
        let b = BivariateJet::constant(re(1.0), 2, 3);
        assert!(matches!(
            jet_det(&[vec![a.clone(), b.clone()], vec![a, b]]),
            Err(Error::Shape(_))
        ));
    }
}
