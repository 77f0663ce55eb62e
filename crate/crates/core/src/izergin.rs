//! Partition function at vanishing rapidities: determinant and product
//! forms, both corner recursions, the homogeneous limit and the 2-Toda check.

use crate::error::{check_size, Error, Result};
use crate::model::{field_root, restricted_weights_cached, ModelParams, RestrictedWeights};
use crate::numeric::{
    factorial, is_finite, jet_det, jet_reciprocal_kernel, rel_diff, BivariateJet, Matrix, Scalar, Sides,
};

const ONE: Scalar = Scalar::new(1.0, 0.0);

pub const MAX_HOMOGENEOUS_N: usize = 6;

/// External fields of a lattice whose rapidities all vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedParams {
    alpha: Vec<Scalar>,
    beta: Vec<Scalar>,
    gamma: Vec<Scalar>,
    delta: Vec<Scalar>,
}

impl RestrictedParams {
    /// Builds parameters without checking the determinant-form invariants;
    /// see [`RestrictedParams::validate`].
    pub fn new(alpha: Vec<Scalar>, beta: Vec<Scalar>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::Schema("lattice size must be at least 1".into()));
        }
        if alpha.len() != beta.len() {
            return Err(Error::Schema(format!(
                "alpha has {} entries but beta has {}",
                alpha.len(),
                beta.len()
            )));
        }
        let gamma = alpha.iter().copied().map(field_root).collect();
        let delta = beta.iter().copied().map(field_root).collect();
        Ok(Self {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    /// As [`RestrictedParams::new`], then [`RestrictedParams::validate`].
    pub fn checked(alpha: Vec<Scalar>, beta: Vec<Scalar>) -> Result<Self> {
        let p = Self::new(alpha, beta)?;
        p.validate()?;
        Ok(p)
    }

    /// Fields of `params`, sharing its cached roots. Rapidities must vanish.
    pub fn from_model(params: &ModelParams) -> Result<Self> {
        if !params.is_restricted() {
            return Err(Error::Domain("restricted routes need every rapidity to be zero".into()));
        }
        Ok(Self {
            alpha: params.alpha().to_vec(),
            beta: params.beta().to_vec(),
            gamma: params.gamma().to_vec(),
            delta: params.delta().to_vec(),
        })
    }

    pub fn to_model(&self) -> ModelParams {
        ModelParams::restricted(self.alpha.clone(), self.beta.clone())
            .expect("restricted params always have matching lengths")
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }
    pub fn alpha(&self) -> &[Scalar] {
        &self.alpha
    }
    pub fn beta(&self) -> &[Scalar] {
        &self.beta
    }
    pub fn gamma(&self) -> &[Scalar] {
        &self.gamma
    }
    pub fn delta(&self) -> &[Scalar] {
        &self.delta
    }

    pub fn weights(&self, i: usize, j: usize) -> RestrictedWeights {
        restricted_weights_cached(self.alpha[i], self.beta[j], self.gamma[i], self.delta[j])
    }

    /// Pairwise distinct fields within each family.
    pub fn validate_distinct(&self) -> Result<()> {
        let n = self.n();
        for (name, xs) in [("alpha", &self.alpha), ("beta", &self.beta)] {
            for i in 0..n {
                for j in i + 1..n {
                    if xs[i] == xs[j] {
                        return Err(Error::Domain(format!("{name}[{i}] = {name}[{j}] = {}", xs[i])));
                    }
                }
            }
        }
        Ok(())
    }

    /// Distinct fields and no kernel pole `α_i = β_j` or `α_i β_j = 1`.
    pub fn validate(&self) -> Result<()> {
        self.validate_distinct()?;
        for (i, a) in self.alpha.iter().enumerate() {
            for (j, b) in self.beta.iter().enumerate() {
                if a == b {
                    return Err(Error::Domain(format!("alpha[{i}] = beta[{j}] = {a}")));
                }
                if (ONE - a * b).norm() == 0.0 {
                    return Err(Error::Domain(format!("alpha[{i}] * beta[{j}] = 1")));
                }
            }
        }
        Ok(())
    }

    pub fn without(&self, row: usize, col: usize) -> Self {
        let drop = |xs: &[Scalar], k: usize| -> Vec<Scalar> {
            xs.iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, z)| *z)
                .collect()
        };
        Self {
            alpha: drop(&self.alpha, row),
            beta: drop(&self.beta, col),
            gamma: drop(&self.gamma, row),
            delta: drop(&self.delta, col),
        }
    }

    pub fn with_alpha(&self, i: usize, value: Scalar) -> Self {
        let mut p = self.clone();
        p.alpha[i] = value;
        p.gamma[i] = field_root(value);
        p
    }

    pub fn with_beta(&self, j: usize, value: Scalar) -> Self {
        let mut p = self.clone();
        p.beta[j] = value;
        p.delta[j] = field_root(value);
        p
    }

    /// Reorders the fields, carrying cached roots along.
    pub fn permuted(&self, perm_alpha: &[usize], perm_beta: &[usize]) -> Self {
        Self {
            alpha: perm_alpha.iter().map(|&k| self.alpha[k]).collect(),
            gamma: perm_alpha.iter().map(|&k| self.gamma[k]).collect(),
            beta: perm_beta.iter().map(|&k| self.beta[k]).collect(),
            delta: perm_beta.iter().map(|&k| self.delta[k]).collect(),
        }
    }

    fn vandermonde(&self) -> Scalar {
        let n = self.n();
        let mut v = ONE;
        for i in 0..n {
            for j in i + 1..n {
                v *= (self.alpha[i] - self.alpha[j]) * (self.beta[j] - self.beta[i]);
            }
        }
        v
    }

    fn roots(&self) -> Scalar {
        self.gamma.iter().zip(&self.delta).map(|(g, d)| g * d).product()
    }
}

/// `M_ij = 1 / ((1 − α_i β_j)(α_i − β_j))`.
pub fn kernel_matrix(p: &RestrictedParams) -> Matrix {
    Matrix::from_fn(p.n(), p.n(), |i, j| {
        let (a, b) = (p.alpha[i], p.beta[j]);
        ONE / ((ONE - a * b) * (a - b))
    })
}

/// Determinant form evaluated directly from the kernel matrix.
pub fn dwpf_restricted_det(p: &RestrictedParams) -> Result<Scalar> {
    p.validate()?;
    let n = p.n();
    let mut pre = ONE;
    for i in 0..n {
        for j in 0..n {
            let w = p.weights(i, j);
            pre *= w.a0 * w.b0;
        }
    }
    Ok(pre / p.vandermonde() * p.roots() * kernel_matrix(p).det()?)
}

/// The same determinant with each row's `Π_j a0 b0` multiplied into the row,
/// so it stays regular where `α_i = β_j` or `α_i β_j = 1`.
pub fn dwpf_restricted_det_regular(p: &RestrictedParams) -> Result<Scalar> {
    p.validate_distinct()?;
    let n = p.n();
    let m = Matrix::from_fn(n, n, |i, j| {
        let mut e = p.weights(i, j).c0;
        for k in (0..n).filter(|&k| k != j) {
            let w = p.weights(i, k);
            e *= w.a0 * w.b0;
        }
        e
    });
    Ok(m.det()? / p.vandermonde())
}

/// `Π_{i,j} √(1 − α_i α_j) √(1 − β_i β_j)`; diagonal factors reuse the cached roots.
pub fn dwpf_restricted_product(p: &RestrictedParams) -> Scalar {
    let n = p.n();
    let mut z = p.roots();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                z *= (ONE - p.alpha[i] * p.alpha[j]).sqrt() * (ONE - p.beta[i] * p.beta[j]).sqrt();
            }
        }
    }
    z
}

/// Relative gap between `det M` and its factorised Cauchy form.
pub fn cauchy_factorization_residual(p: &RestrictedParams) -> Result<f64> {
    p.validate()?;
    let n = p.n();
    let det = kernel_matrix(p).det()?;
    let mut rhs = p.vandermonde();
    for i in 0..n {
        for j in i + 1..n {
            rhs *= (ONE - p.alpha[i] * p.alpha[j]) * (ONE - p.beta[i] * p.beta[j]);
        }
    }
    for i in 0..n {
        for j in 0..n {
            rhs /= (ONE - p.alpha[i] * p.beta[j]) * (p.alpha[i] - p.beta[j]);
        }
    }
    Ok(rel_diff(det, rhs))
}

fn reduced_det(p: &RestrictedParams, row: usize, col: usize) -> Result<Scalar> {
    if p.n() == 1 {
        Ok(ONE)
    } else {
        dwpf_restricted_det(&p.without(row, col))
    }
}

/// Both sides of the frozen-corner recursion after setting `α_m := β_n`.
pub fn korepin_recursion_sides(p: &RestrictedParams, m: usize, n: usize) -> Result<Sides> {
    let size = p.n();
    for idx in [m, n] {
        if idx >= size {
            return Err(Error::Index { index: idx, n: size });
        }
    }
    let q = p.with_alpha(m, p.beta[n]);
    let lhs = dwpf_restricted_det_regular(&q)?;
    let mut rhs = q.weights(m, n).c0;
    for i in (0..size).filter(|&i| i != m) {
        rhs *= q.weights(i, n).a0;
    }
    for j in (0..size).filter(|&j| j != n) {
        rhs *= q.weights(m, j).a0;
    }
    rhs *= reduced_det(&q, m, n)?;
    Ok(Sides { lhs, rhs })
}

/// Residual of the recursion obtained by freezing a corner at `α_m = β_n`
/// (0-based `m`, `n`).
pub fn korepin_recursion_residual(p: &RestrictedParams, m: usize, n: usize) -> Result<f64> {
    Ok(korepin_recursion_sides(p, m, n)?.residual())
}

/// Offsets of `β₁` from `1/α₁` used for the removable-singularity limit.
pub const SECOND_RECURSION_STEPS: [f64; 2] = [1e-4, 1e-5];

/// Values behind the `α₁β₁ = 1` recursion check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondRecursion {
    /// Determinant values at `β₁ = (1 + ε)/α₁` for each step.
    pub samples: [Scalar; 2],
    /// Linear Richardson extrapolation to `ε = 0`.
    pub extrapolated: Scalar,
    /// The pole-free product form evaluated exactly at `β₁ = 1/α₁`.
    pub product_limit: Scalar,
    pub rhs: Scalar,
}

impl SecondRecursion {
    pub fn residual(&self) -> f64 {
        rel_diff(self.extrapolated, self.rhs)
    }
}

pub fn second_recursion(p: &RestrictedParams) -> Result<SecondRecursion> {
    let a1 = p.alpha[0];
    if a1.norm() == 0.0 {
        return Err(Error::Domain("alpha[0] = 0 has no partner with alpha*beta = 1".into()));
    }
    let target = ONE / a1;
    let [e1, e2] = SECOND_RECURSION_STEPS;
    let z1 = dwpf_restricted_det(&p.with_beta(0, target * (1.0 + e1)))?;
    let z2 = dwpf_restricted_det(&p.with_beta(0, target * (1.0 + e2)))?;
    let extrapolated = (z2 * e1 - z1 * e2) / (e1 - e2);
    // The sample nearer the limit must already agree to first order in ε.
    let drift = rel_diff(z2, extrapolated);
    if !is_finite(extrapolated) || drift > 1e3 * e2 {
        return Err(Error::NumericalLimit(format!(
            "samples {z1} and {z2} extrapolate to {extrapolated} (relative drift {drift:.3e})"
        )));
    }
    let q = p.with_beta(0, target);
    let size = p.n();
    let mut rhs = q.weights(0, 0).c0;
    for j in 1..size {
        rhs *= q.weights(0, j).b0 * -q.weights(j, 0).b0;
    }
    rhs *= reduced_det(&q, 0, 0)?;
    Ok(SecondRecursion {
        samples: [z1, z2],
        extrapolated,
        product_limit: dwpf_restricted_product(&q),
        rhs,
    })
}

/// Residual of the recursion obtained by freezing the upper-left corner at
/// `α₁β₁ = 1`.
pub fn second_recursion_residual(p: &RestrictedParams) -> Result<f64> {
    Ok(second_recursion(p)?.residual())
}

/// Right-hand side of the first-row expansion of the determinant form.
pub fn row_expansion(p: &RestrictedParams) -> Result<Scalar> {
    p.validate()?;
    let n = p.n();
    let (a, b) = (&p.alpha, &p.beta);
    let mut total = Scalar::new(0.0, 0.0);
    for i in 0..n {
        let mut num = p.weights(0, i).c0;
        for j in (0..n).filter(|&j| j != i) {
            let w = p.weights(0, j);
            num *= w.a0 * w.b0;
        }
        for j in 1..n {
            let w = p.weights(j, i);
            num *= w.a0 * w.b0;
        }
        let mut den = ONE;
        for j in 1..n {
            den *= a[0] - a[j];
        }
        for j in 0..i {
            den *= b[i] - b[j];
        }
        for j in i + 1..n {
            den *= b[j] - b[i];
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        total += num / den * sign * reduced_det(p, 0, i)?;
    }
    Ok(total)
}

pub fn row_expansion_residual(p: &RestrictedParams) -> Result<f64> {
    Ok(rel_diff(row_expansion(p)?, dwpf_restricted_det(p)?))
}

/// `|Z(σα, τβ) − Z(α, β)| / |Z(α, β)|` for index permutations `σ`, `τ`.
pub fn symmetry_residual(p: &RestrictedParams, perm_alpha: &[usize], perm_beta: &[usize]) -> Result<f64> {
    let base = dwpf_restricted_det(p)?;
    let moved = dwpf_restricted_det(&p.permuted(perm_alpha, perm_beta))?;
    Ok(rel_diff(moved, base))
}

/// Checks that `Z / √(1 − α₁²)` is a polynomial of degree `N − 1` in `α₁`:
/// interpolate through `samples` (which must number `N`) and compare at
/// `tests`. Returns the worst relative deviation.
pub fn degree_residual(p: &RestrictedParams, samples: &[Scalar], tests: &[Scalar]) -> Result<f64> {
    if samples.len() != p.n() {
        return Err(Error::Usage(format!(
            "degree check needs {} interpolation nodes, got {}",
            p.n(),
            samples.len()
        )));
    }
    let g = |x: Scalar| -> Result<Scalar> {
        let q = p.with_alpha(0, x);
        Ok(dwpf_restricted_det(&q)? / q.gamma[0])
    };
    let values: Vec<Scalar> = samples.iter().map(|&x| g(x)).collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for &t in tests {
        let mut interp = Scalar::new(0.0, 0.0);
        for (k, (&xk, &yk)) in samples.iter().zip(&values).enumerate() {
            let mut basis = ONE;
            for (l, &xl) in samples.iter().enumerate() {
                if l != k {
                    basis *= (t - xl) / (xk - xl);
                }
            }
            interp += yk * basis;
        }
        worst = worst.max(rel_diff(interp, g(t)?));
    }
    Ok(worst)
}

fn check_regular_point(alpha: Scalar, beta: Scalar) -> Result<()> {
    if (alpha - beta).norm() == 0.0 || (ONE - alpha * beta).norm() == 0.0 {
        return Err(Error::Domain(format!(
            "({alpha}, {beta}) lies on the kernel's singular locus"
        )));
    }
    Ok(())
}

/// Jet of the bi-Wronskian `τ_N = det[∂_α^i ∂_β^j f]_{0 ≤ i,j < N}` of
/// `f = 1/((α − β)(1 − αβ))`, truncated at `order` in each variable. `τ_0 = 1`.
pub fn bi_wronskian_tau(alpha: Scalar, beta: Scalar, n: usize, order: usize) -> Result<BivariateJet> {
    check_regular_point(alpha, beta)?;
    if n == 0 {
        return Ok(BivariateJet::constant(ONE, order, order));
    }
    let base = jet_reciprocal_kernel(alpha, beta, n - 1 + order, n - 1 + order)?;
    let m: Vec<Vec<BivariateJet>> = (0..n)
        .map(|i| (0..n).map(|j| base.derivative(i, j, order, order)).collect())
        .collect::<Result<_>>()?;
    jet_det(&m)
}

/// Partition function in the homogeneous limit `α_i → α`, `β_j → β`.
pub fn dwpf_homogeneous(alpha: Scalar, beta: Scalar, n: usize) -> Result<Scalar> {
    check_size("homogeneous limit", n, 1, MAX_HOMOGENEOUS_N)?;
    check_regular_point(alpha, beta)?;
    let tau = bi_wronskian_tau(alpha, beta, n, 0)?.value();
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let fact: f64 = (1..n).map(factorial).product();
    let kernel_den = (alpha - beta) * (ONE - alpha * beta);
    let roots = field_root(alpha) * field_root(beta);
    Ok(kernel_den.powu((n * n) as u32) * roots.powu(n as u32) * tau * (sign / (fact * fact)))
}

/// `τ_{N−1}, τ_N, τ_{N+1}` as order-2 jets at a common expansion point.
#[derive(Clone, Debug, PartialEq)]
pub struct TodaTau {
    pub n: usize,
    pub point: (Scalar, Scalar),
    pub prev: BivariateJet,
    pub current: BivariateJet,
    pub next: BivariateJet,
}

/// Jet order kept for each τ in the Toda check.
pub const TODA_JET_ORDER: usize = 2;

impl TodaTau {
    pub fn build(alpha: Scalar, beta: Scalar, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::Size {
                what: "Toda tau index",
                n,
                min: 1,
                max: usize::MAX,
            });
        }
        let tau = |k| bi_wronskian_tau(alpha, beta, k, TODA_JET_ORDER);
        Ok(Self {
            n,
            point: (alpha, beta),
            prev: tau(n - 1)?,
            current: tau(n)?,
            next: tau(n + 1)?,
        })
    }

    /// `∂²/∂α∂β log τ_N` at the expansion point.
    pub fn log_mixed_derivative(&self) -> Scalar {
        let t = &self.current;
        let c00 = t.coeff(0, 0);
        t.coeff(1, 1) / c00 - t.coeff(1, 0) * t.coeff(0, 1) / (c00 * c00)
    }

    /// `τ_{N+1} τ_{N−1} / τ_N²` at the expansion point.
    pub fn ratio(&self) -> Scalar {
        let c = self.current.value();
        self.next.value() * self.prev.value() / (c * c)
    }
}

/// Relative residual of the 2-Toda equation for the bi-Wronskian τ at `(α₀, β₀)`.
pub fn toda_residual(alpha: Scalar, beta: Scalar, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Size {
            what: "Toda residual",
            n,
            min: 2,
            max: usize::MAX,
        });
    }
    let tau = TodaTau::build(alpha, beta, n)?;
    if tau.current.value().norm() == 0.0 {
        return Err(Error::Degenerate(format!("tau_{n} vanishes at ({alpha}, {beta})")));
    }
    let ratio = tau.ratio();
    Ok((tau.log_mixed_derivative() - ratio).norm() / ratio.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::dwpf_brute;
    use crate::numeric::re;

    fn params(alpha: &[Scalar], beta: &[Scalar]) -> RestrictedParams {
        RestrictedParams::checked(alpha.to_vec(), beta.to_vec()).unwrap()
    }

    fn fixture(n: usize) -> RestrictedParams {
        let alpha = [
            Scalar::new(0.31, 0.12),
            Scalar::new(-0.42, 0.05),
            Scalar::new(0.05, -0.51),
            Scalar::new(0.55, 0.33),
            Scalar::new(-0.12, 0.48),
            Scalar::new(-0.6, -0.25),
        ];
        let beta = [
            Scalar::new(-0.22, -0.36),
            Scalar::new(0.47, 0.18),
            Scalar::new(0.11, 0.61),
            Scalar::new(-0.51, 0.29),
            Scalar::new(0.28, -0.55),
            Scalar::new(0.66, -0.1),
        ];
        params(&alpha[..n], &beta[..n])
    }

    #[test]
    fn single_site_initial_condition() {
        let p = params(&[re(0.3)], &[Scalar::new(-0.2, 0.4)]);
        let c0 = p.weights(0, 0).c0;
        assert!(rel_diff(dwpf_restricted_det(&p).unwrap(), c0) < 1e-15);
        assert!(rel_diff(dwpf_restricted_product(&p), c0) < 1e-15);
    }

    #[test]
    fn det_matches_enumeration() {
        for n in 2..=4 {
            let p = fixture(n);
            let brute = dwpf_brute(&p.to_model()).unwrap();
            assert!(rel_diff(dwpf_restricted_det(&p).unwrap(), brute) < 1e-10, "n={n}");
            assert!(
                rel_diff(dwpf_restricted_det_regular(&p).unwrap(), brute) < 1e-10,
                "n={n}"
            );
        }
    }

    #[test]
    fn det_matches_product() {
        for n in 1..=6 {
            let p = fixture(n);
            let d = dwpf_restricted_det(&p).unwrap();
            assert!(rel_diff(d, dwpf_restricted_product(&p)) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn product_trivial_cases() {
        let p = RestrictedParams::new(vec![re(0.0); 3], vec![re(0.0); 3]).unwrap();
        assert_eq!(dwpf_restricted_product(&p), re(1.0));
    }

    #[test]
    fn swapping_alphas_is_harmless() {
        let p = fixture(4);
        let r = symmetry_residual(&p, &[2, 0, 3, 1], &[0, 1, 2, 3]).unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn validation_names_the_collision() {
        let err = RestrictedParams::checked(vec![re(0.2), re(0.2)], vec![re(0.1), re(0.4)]).unwrap_err();
        assert!(matches!(&err, Error::Domain(m) if m.contains("alpha[0]") && m.contains("alpha[1]")));
        let err = RestrictedParams::checked(vec![re(0.2), re(0.3)], vec![re(0.1), re(0.2)]).unwrap_err();
        assert!(matches!(&err, Error::Domain(m) if m.contains("beta[1]")));
        let err = RestrictedParams::checked(vec![re(0.5)], vec![re(2.0)]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn cauchy_residuals() {
        assert!(cauchy_factorization_residual(&fixture(1)).unwrap() < 1e-14);
        assert!(cauchy_factorization_residual(&fixture(3)).unwrap() < 1e-10);
        assert!(cauchy_factorization_residual(&fixture(6)).unwrap() < 1e-8);
    }

    #[test]
    fn korepin_recursion_small() {
        assert_eq!(korepin_recursion_residual(&fixture(1), 0, 0).unwrap(), 0.0);
        assert!(korepin_recursion_residual(&fixture(2), 0, 1).unwrap() < 1e-10);
        for m in 0..4 {
            for n in 0..4 {
                let r = korepin_recursion_residual(&fixture(4), m, n).unwrap();
                assert!(r < 1e-9, "({m},{n}): {r}");
            }
        }
    }

    #[test]
    fn korepin_recursion_reports_collisions() {
        // α_0 := β_1 makes α_0 coincide with α_1.
        let p = params(&[re(0.1), re(0.4)], &[re(-0.3), re(0.4 + 1e-9)]).with_beta(1, re(0.4));
        assert!(matches!(korepin_recursion_residual(&p, 0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn second_recursion_small() {
        for n in 2..=3 {
            let s = second_recursion(&fixture(n)).unwrap();
            assert!(s.residual() < 1e-6, "n={n}: {}", s.residual());
            assert!(rel_diff(s.extrapolated, s.product_limit) < 1e-8, "n={n}");
        }
    }

    #[test]
    fn row_expansion_small() {
        // A single term; the sides agree up to rounding of a0·b0·M = 1.
        assert!(row_expansion_residual(&fixture(1)).unwrap() < 1e-15);
        assert!(row_expansion_residual(&fixture(2)).unwrap() < 1e-11);
        assert!(row_expansion_residual(&fixture(4)).unwrap() < 1e-9);
    }

    #[test]
    fn degree_in_first_alpha() {
        let p = fixture(4);
        let nodes = [re(0.05), Scalar::new(0.2, 0.2), re(-0.6), Scalar::new(0.0, -0.7)];
        let tests = [
            re(0.7),
            Scalar::new(-0.3, 0.3),
            Scalar::new(0.45, -0.2),
            re(-0.05),
            Scalar::new(0.1, 0.65),
        ];
        assert!(degree_residual(&p, &nodes, &tests).unwrap() < 1e-8);
        // One node short and the interpolant cannot be exact.
        let q = fixture(3);
        assert!(degree_residual(&q, &nodes[..3], &tests).unwrap() < 1e-8);
        assert!(degree_residual(&p, &nodes[..3], &tests).is_err());
    }

    fn closed_homogeneous(alpha: Scalar, beta: Scalar, n: usize) -> Scalar {
        (field_root(alpha) * field_root(beta)).powu((n * n) as u32)
    }

    #[test]
    fn homogeneous_closed_form() {
        let (a, b) = (re(0.3), re(-0.4));
        assert!(rel_diff(dwpf_homogeneous(a, b, 1).unwrap(), field_root(a) * field_root(b)) < 1e-15);
        for n in 2..=5 {
            let z = dwpf_homogeneous(a, b, n).unwrap();
            assert!(rel_diff(z, closed_homogeneous(a, b, n)) < 1e-8, "n={n}: {z}");
        }
    }

    #[test]
    fn homogeneous_matches_confluent_determinant() {
        // Symmetric offsets cancel the first-order term; extrapolate in δ².
        let (a, b) = (re(0.3), re(-0.4));
        let offsets = [-1.0, 0.0, 1.0];
        let at = |d: f64| {
            let p = RestrictedParams::checked(
                offsets.iter().map(|k| a * (1.0 + d * k)).collect(),
                offsets.iter().map(|k| b * (1.0 + d * k)).collect(),
            )
            .unwrap();
            dwpf_restricted_det(&p).unwrap()
        };
        let (z1, z2) = (at(4e-2), at(2e-2));
        let limit = (z2 * 4.0 - z1) / 3.0;
        assert!(rel_diff(limit, dwpf_homogeneous(a, b, 3).unwrap()) < 1e-4);
    }

    #[test]
    fn homogeneous_rejects_singular_points() {
        assert!(matches!(dwpf_homogeneous(re(0.2), re(0.2), 2), Err(Error::Domain(_))));
        assert!(matches!(dwpf_homogeneous(re(0.5), re(2.0), 2), Err(Error::Domain(_))));
        assert!(matches!(dwpf_homogeneous(re(0.5), re(0.2), 7), Err(Error::Size { .. })));
    }

    #[test]
    fn toda_equation() {
        assert!(toda_residual(re(0.3), re(-0.4), 2).unwrap() < 1e-8);
        assert!(toda_residual(re(0.2), re(0.5), 3).unwrap() < 1e-8);
        assert!(toda_residual(Scalar::new(-0.35, 0.2), Scalar::new(0.15, -0.45), 2).unwrap() < 1e-8);
        assert!(matches!(toda_residual(re(0.3), re(-0.4), 1), Err(Error::Size { .. })));
    }

    #[test]
    fn log_derivative_matches_finite_differences() {
        // Independent check of the jet read-off for N = 1: τ_1 = f.
        let (a, b) = (Scalar::new(0.25, 0.1), Scalar::new(-0.3, 0.2));
        let t = TodaTau::build(a, b, 1).unwrap();
        let logf = |x: Scalar, y: Scalar| (ONE / ((x - y) * (ONE - x * y))).ln();
        let h = 1e-4;
        let fd = (logf(a + h, b + h) - logf(a + h, b - h) - logf(a - h, b + h) + logf(a - h, b - h)) / (4.0 * h * h);
        assert!(rel_diff(t.log_mixed_derivative(), fd) < 1e-6);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn homogeneous_and_toda_at_random_points(
            ar in -0.6f64..0.6, ai in -0.3f64..0.3, br in -0.6f64..0.6, bi in -0.3f64..0.3, n in 2usize..=3,
        ) {
            let (a, b) = (Scalar::new(ar, ai), Scalar::new(br, bi));
            proptest::prop_assume!((a - b).norm() > 0.2);
            let z = dwpf_homogeneous(a, b, n).unwrap();
            proptest::prop_assert!(rel_diff(z, closed_homogeneous(a, b, n)) < 1e-8);
            proptest::prop_assert!(toda_residual(a, b, n).unwrap() < 1e-8);
        }
    }
}
