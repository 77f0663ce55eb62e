//! Operator construction: R-matrix, monodromy blocks, the partition function
//! as a string of creation operators, factorising F-matrices and the twisted
//! operators they produce.
//!
//! Site 1 is the most significant bit of a basis index. A local state of
//! `0` is spin-up (the first basis vector of ℂ²), so `|0⟩` (all up) has
//! index `0` and `⟨1|` (all down) has index `2^N − 1`. The auxiliary space of
//! a monodromy matrix sits in front of site 1.

use crate::error::{check_size, Error, Result};
use crate::model::{line_weights, Line, ModelParams, SixWeights};
use crate::numeric::{Matrix, Scalar, Sides};

const ZERO: Scalar = Scalar::new(0.0, 0.0);
const ONE: Scalar = Scalar::new(1.0, 0.0);

/// Largest `N` for dense monodromy blocks and for operator-string routes.
pub const MAX_BETHE_N: usize = 10;
/// Largest `N` for dense F-matrices and direct conjugation.
pub const MAX_F_N: usize = 8;
/// F-matrices with a larger 1-norm condition estimate are refused.
pub const MAX_F_CONDITION: f64 = 1e12;
/// A weight whose modulus falls below this fraction of its scale is treated
/// as zero when it appears in a denominator.
const ZERO_GUARD: f64 = 1e-12;

/// A single-site operator.
pub type Local = [[Scalar; 2]; 2];

pub fn local_diag(a: Scalar, b: Scalar) -> Local {
    [[a, ZERO], [ZERO, b]]
}

/// Lowers spin: maps up to down with amplitude `c`.
pub fn local_lower(c: Scalar) -> Local {
    [[ZERO, ZERO], [c, ZERO]]
}

/// Raises spin: maps down to up with amplitude `c`.
pub fn local_raise(c: Scalar) -> Local {
    [[ZERO, c], [ZERO, ZERO]]
}

fn local_matrix(m: &Local) -> Matrix {
    Matrix::from_fn(2, 2, |i, j| m[i][j])
}

fn bit_position(n_sites: usize, site: usize) -> usize {
    n_sites - 1 - site
}

fn apply_local(amps: &[Scalar], n_sites: usize, m: &Local, site: usize) -> Vec<Scalar> {
    let p = bit_position(n_sites, site);
    let mut out = vec![ZERO; amps.len()];
    for (idx, &x) in amps.iter().enumerate() {
        if x == ZERO {
            continue;
        }
        let b = (idx >> p) & 1;
        let base = idx & !(1 << p);
        for (o, row) in m.iter().enumerate() {
            if row[b] != ZERO {
                out[base | (o << p)] += row[b] * x;
            }
        }
    }
    out
}

fn apply_pair(amps: &[Scalar], n_sites: usize, r: &[[Scalar; 4]; 4], s1: usize, s2: usize) -> Vec<Scalar> {
    let (p1, p2) = (bit_position(n_sites, s1), bit_position(n_sites, s2));
    let mut out = vec![ZERO; amps.len()];
    for (idx, &x) in amps.iter().enumerate() {
        if x == ZERO {
            continue;
        }
        let col = (((idx >> p1) & 1) << 1) | ((idx >> p2) & 1);
        let base = idx & !(1 << p1) & !(1 << p2);
        for (row, entries) in r.iter().enumerate() {
            let val = entries[col];
            if val != ZERO {
                out[base | ((row >> 1) << p1) | ((row & 1) << p2)] += val * x;
            }
        }
    }
    out
}

/// A `2^N × 2^N` operator on `N` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    n_sites: usize,
    matrix: Matrix,
}

impl OperatorMatrix {
    pub fn new(n_sites: usize, matrix: Matrix) -> Result<Self> {
        let dim = 1usize << n_sites;
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(Error::Dimension(format!(
                "{} sites need a {dim}×{dim} matrix, got {}×{}",
                n_sites,
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { n_sites, matrix })
    }

    pub fn identity(n_sites: usize) -> Self {
        Self {
            n_sites,
            matrix: Matrix::identity(1 << n_sites),
        }
    }

    /// `m_1 ⊗ m_2 ⊗ ··· ⊗ m_N`.
    pub fn tensor(factors: &[Local]) -> Self {
        let matrix = factors
            .iter()
            .fold(Matrix::identity(1), |acc, m| acc.kron(&local_matrix(m)));
        Self {
            n_sites: factors.len(),
            matrix,
        }
    }

    /// A 4×4 operator acting on sites `s1` (first factor) and `s2`.
    pub fn pair(n_sites: usize, r: &Matrix, s1: usize, s2: usize) -> Result<Self> {
        if r.rows() != 4 || r.cols() != 4 {
            return Err(Error::Dimension("two-site operator must be 4×4".into()));
        }
        for s in [s1, s2] {
            if s >= n_sites {
                return Err(Error::Index { index: s, n: n_sites });
            }
        }
        if s1 == s2 {
            return Err(Error::Dimension(format!("two-site operator placed twice on site {s1}")));
        }
        let r4 = r4_from_matrix(r);
        let dim = 1usize << n_sites;
        let mut matrix = Matrix::zeros(dim, dim);
        for col in 0..dim {
            let mut e = vec![ZERO; dim];
            e[col] = ONE;
            for (row, z) in apply_pair(&e, n_sites, &r4, s1, s2).into_iter().enumerate() {
                matrix[(row, col)] = z;
            }
        }
        Ok(Self { n_sites, matrix })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.check_sites(v.n_sites)?;
        Ok(StateVector {
            n_sites: self.n_sites,
            amps: self.matrix.mul_vec(&v.amps),
        })
    }

    pub fn compose(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_sites(other.n_sites)?;
        Ok(Self {
            n_sites: self.n_sites,
            matrix: self.matrix.try_mul(&other.matrix)?,
        })
    }

    /// `self ⊗ other`, with `self` on the leading sites.
    pub fn kron(&self, other: &OperatorMatrix) -> OperatorMatrix {
        Self {
            n_sites: self.n_sites + other.n_sites,
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// Largest entrywise difference scaled by the largest entry of either side.
    pub fn rel_diff(&self, other: &OperatorMatrix) -> f64 {
        self.matrix.rel_diff(&other.matrix)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let dim = self.dim();
        (0..dim).all(|i| (0..dim).all(|j| i == j || self.matrix[(i, j)].norm() <= tol))
    }

    fn check_sites(&self, n: usize) -> Result<()> {
        if n != self.n_sites {
            return Err(Error::Dimension(format!(
                "operator on {} sites applied to {} sites",
                self.n_sites, n
            )));
        }
        Ok(())
    }
}

/// Amplitudes of a state on `N` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<Scalar>,
}

impl StateVector {
    pub fn new(n_sites: usize, amps: Vec<Scalar>) -> Result<Self> {
        if amps.len() != 1 << n_sites {
            return Err(Error::Dimension(format!(
                "{} sites need {} amplitudes, got {}",
                n_sites,
                1usize << n_sites,
                amps.len()
            )));
        }
        Ok(Self { n_sites, amps })
    }

    pub fn basis(n_sites: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_sites];
        amps[index] = ONE;
        Self { n_sites, amps }
    }

    /// `|0⟩`: every site up.
    pub fn all_up(n_sites: usize) -> Self {
        Self::basis(n_sites, 0)
    }

    /// `⟨1|` as a ket: every site down.
    pub fn all_down(n_sites: usize) -> Self {
        Self::basis(n_sites, (1 << n_sites) - 1)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amplitudes(&self) -> &[Scalar] {
        &self.amps
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Self {
            n_sites: self.n_sites + other.n_sites,
            amps,
        }
    }

    /// Number of amplitudes with modulus above `tol`.
    pub fn support(&self, tol: f64) -> usize {
        self.amps.iter().filter(|z| z.norm() > tol).count()
    }
}

fn r4(w: &SixWeights) -> [[Scalar; 4]; 4] {
    [
        [w.a1, ZERO, ZERO, ZERO],
        [ZERO, w.b1, w.c1, ZERO],
        [ZERO, w.c2, w.b2, ZERO],
        [ZERO, ZERO, ZERO, w.a2],
    ]
}

fn r4_from_matrix(m: &Matrix) -> [[Scalar; 4]; 4] {
    let mut r = [[ZERO; 4]; 4];
    for (i, row) in r.iter_mut().enumerate() {
        for (j, z) in row.iter_mut().enumerate() {
            *z = m[(i, j)];
        }
    }
    r
}

/// The R-matrix built from checked weights of two vertical lines.
pub fn r_matrix(beta_i: Scalar, beta_j: Scalar, v_i: Scalar, v_j: Scalar) -> Matrix {
    let w = line_weights(&Line::new(beta_i, v_i), &Line::new(beta_j, v_j));
    let r = r4(&w);
    Matrix::from_fn(4, 4, |i, j| r[i][j])
}

/// The four auxiliary-space blocks `[[A, B], [C, D]]` of a monodromy matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Monodromy {
    pub a: OperatorMatrix,
    pub b: OperatorMatrix,
    pub c: OperatorMatrix,
    pub d: OperatorMatrix,
}

impl Monodromy {
    pub fn blocks(&self) -> [&OperatorMatrix; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

fn apply_monodromy(verticals: &[Line], aux: &Line, full: &[Scalar]) -> Vec<Scalar> {
    let n_total = verticals.len() + 1;
    verticals.iter().enumerate().fold(full.to_vec(), |acc, (j, w)| {
        apply_pair(&acc, n_total, &r4(&line_weights(aux, w)), 0, j + 1)
    })
}

/// `T = R_{0N} ··· R_{01}` on the given vertical lines, split into blocks.
pub fn monodromy_on(verticals: &[Line], aux: &Line) -> Result<Monodromy> {
    let n = verticals.len();
    check_size("monodromy", n, 1, MAX_BETHE_N)?;
    let d = 1usize << n;
    let mut blocks = [(); 4].map(|_| Matrix::zeros(d, d));
    for col in 0..2 * d {
        let mut e = vec![ZERO; 2 * d];
        e[col] = ONE;
        let out = apply_monodromy(verticals, aux, &e);
        for (row, z) in out.into_iter().enumerate() {
            let block = 2 * (row / d) + col / d;
            blocks[block][(row % d, col % d)] = z;
        }
    }
    let [a, b, c, dd] = blocks.map(|matrix| OperatorMatrix { n_sites: n, matrix });
    Ok(Monodromy { a, b, c, d: dd })
}

/// Monodromy blocks for an auxiliary line `(α, u)` over the vertical lines of `params`.
pub fn monodromy(params: &ModelParams, alpha: Scalar, u: Scalar) -> Result<Monodromy> {
    monodromy_on(&params.verticals(), &Line::new(alpha, u))
}

/// Which monodromy block to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    A,
    B,
    C,
    D,
}

/// Applies one monodromy block to a vector without building the matrix.
pub fn apply_block(verticals: &[Line], aux: &Line, block: Block, v: &[Scalar]) -> Result<Vec<Scalar>> {
    let d = 1usize << verticals.len();
    if v.len() != d {
        return Err(Error::Dimension(format!("expected {d} amplitudes, got {}", v.len())));
    }
    let (from, to) = match block {
        Block::A => (0, 0),
        Block::B => (1, 0),
        Block::C => (0, 1),
        Block::D => (1, 1),
    };
    let mut full = vec![ZERO; 2 * d];
    full[from * d..(from + 1) * d].copy_from_slice(v);
    let out = apply_monodromy(verticals, aux, &full);
    Ok(out[to * d..(to + 1) * d].to_vec())
}

/// `⟨1| B(α_1, u_1) ··· B(α_N, u_N) |0⟩`, applying the rightmost operator first.
pub fn dwpf_bethe(params: &ModelParams) -> Result<Scalar> {
    let n = params.n();
    check_size("Bethe route", n, 1, MAX_BETHE_N)?;
    let verticals = params.verticals();
    let mut v = StateVector::all_up(n).amps;
    for k in (0..n).rev() {
        v = apply_block(&verticals, &params.horizontal(k), Block::B, &v)?;
    }
    Ok(v[(1 << n) - 1])
}

fn scale_of(w: &SixWeights) -> f64 {
    1.0 + w.a1.norm() + w.a2.norm() + w.b1.norm() + w.b2.norm()
}

fn guard(x: Scalar, scale: f64, what: impl FnOnce() -> String) -> Result<Scalar> {
    if x.norm() <= ZERO_GUARD * scale || !x.is_finite() {
        Err(Error::Domain(format!("{} = {x} vanishes", what())))
    } else {
        Ok(x)
    }
}

fn checked(verticals: &[Line], i: usize, j: usize) -> SixWeights {
    line_weights(&verticals[i], &verticals[j])
}

fn guarded_b2(verticals: &[Line], i: usize, j: usize) -> Result<Scalar> {
    let w = checked(verticals, i, j);
    guard(w.b2, scale_of(&w), || format!("b2(beta[{i}], beta[{j}])"))
}

fn guarded_a2(verticals: &[Line], i: usize, j: usize) -> Result<Scalar> {
    let w = checked(verticals, i, j);
    guard(w.a2, scale_of(&w), || format!("a2(beta[{i}], beta[{j}])"))
}

/// A full F-matrix and its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct FMatrix {
    pub f: OperatorMatrix,
    pub inverse: OperatorMatrix,
    /// 1-norm condition number `‖F‖₁ ‖F⁻¹‖₁`.
    pub condition: f64,
}

fn build_f(verticals: &[Line]) -> Result<Matrix> {
    let n = verticals.len();
    if n == 1 {
        return Ok(Matrix::identity(2));
    }
    let rest = &verticals[1..];
    let m = monodromy_on(rest, &verticals[0])?;
    let d = 1usize << (n - 1);
    let init = Matrix::from_fn(2 * d, 2 * d, |i, j| match (i < d, j < d) {
        (true, true) => {
            if i == j {
                ONE
            } else {
                ZERO
            }
        }
        (true, false) => ZERO,
        (false, true) => m.c.matrix[(i - d, j)],
        (false, false) => m.d.matrix[(i - d, j - d)],
    });
    Matrix::identity(2).kron(&build_f(rest)?).try_mul(&init)
}

fn invertibility(e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Invertibility(m),
        other => other,
    }
}

/// `F_{1…N} = F_{2…N} F_{1,2…N}` with `F_{1,2…N} = e^{(11)}_1 + e^{(22)}_1 T_{1,2…N}(β_1, v_1)`.
pub fn f_matrix_on(verticals: &[Line]) -> Result<FMatrix> {
    let n = verticals.len();
    check_size("F-matrix", n, 2, MAX_F_N)?;
    for i in 0..n {
        for j in i + 1..n {
            guarded_b2(verticals, i, j).map_err(invertibility)?;
            guarded_a2(verticals, i, j).map_err(invertibility)?;
        }
    }
    let f = build_f(verticals)?;
    let inverse = f.lu()?.inverse()?;
    let condition = f.norm_1() * inverse.norm_1();
    if condition.is_nan() || condition > MAX_F_CONDITION {
        return Err(Error::Invertibility(format!(
            "F-matrix condition estimate {condition:.3e} exceeds {MAX_F_CONDITION:.0e}"
        )));
    }
    Ok(FMatrix {
        f: OperatorMatrix { n_sites: n, matrix: f },
        inverse: OperatorMatrix {
            n_sites: n,
            matrix: inverse,
        },
        condition,
    })
}

pub fn f_matrix(params: &ModelParams) -> Result<FMatrix> {
    f_matrix_on(&params.verticals())
}

/// `X̃ = F X F⁻¹` for each monodromy block.
pub fn twist_conjugate_on(verticals: &[Line], aux: &Line) -> Result<Monodromy> {
    let f = f_matrix_on(verticals)?;
    let m = monodromy_on(verticals, aux)?;
    let conj = |x: &OperatorMatrix| -> Result<OperatorMatrix> { f.f.compose(x)?.compose(&f.inverse) };
    Ok(Monodromy {
        a: conj(&m.a)?,
        b: conj(&m.b)?,
        c: conj(&m.c)?,
        d: conj(&m.d)?,
    })
}

pub fn twist_conjugate(params: &ModelParams, alpha: Scalar, u: Scalar) -> Result<Monodromy> {
    twist_conjugate_on(&params.verticals(), &Line::new(alpha, u))
}

/// A sum of pure tensor products of single-site operators.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSum {
    n_sites: usize,
    terms: Vec<Vec<Local>>,
}

impl TensorSum {
    pub fn new(n_sites: usize, terms: Vec<Vec<Local>>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.len() != n_sites) {
            return Err(Error::Dimension(format!(
                "tensor term has {} factors on {} sites",
                t.len(),
                n_sites
            )));
        }
        Ok(Self { n_sites, terms })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[Vec<Local>] {
        &self.terms
    }

    pub fn to_dense(&self) -> OperatorMatrix {
        let dim = 1usize << self.n_sites;
        let matrix = self.terms.iter().fold(Matrix::zeros(dim, dim), |acc, t| {
            &acc + OperatorMatrix::tensor(t).matrix()
        });
        OperatorMatrix {
            n_sites: self.n_sites,
            matrix,
        }
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![ZERO; v.len()];
        for term in &self.terms {
            let w = term
                .iter()
                .enumerate()
                .fold(v.to_vec(), |acc, (site, m)| apply_local(&acc, self.n_sites, m, site));
            for (o, x) in out.iter_mut().zip(w) {
                *o += x;
            }
        }
        out
    }
}

/// Twisted operators assembled from their tensor-product closed forms.
/// `Ã` is stored as its diagonal tensor part; the full operator adds
/// `B̃ D̃⁻¹ C̃`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedOperators {
    pub a_diagonal: TensorSum,
    pub b: TensorSum,
    pub c: TensorSum,
    pub d: TensorSum,
    d_inverse: TensorSum,
}

impl TwistedOperators {
    pub fn apply_a(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut out = self.a_diagonal.apply(v);
        let extra = self.b.apply(&self.d_inverse.apply(&self.c.apply(v)));
        for (o, x) in out.iter_mut().zip(extra) {
            *o += x;
        }
        out
    }

    pub fn to_dense(&self) -> Result<Monodromy> {
        let bdc = self
            .b
            .to_dense()
            .compose(&self.d_inverse.to_dense())?
            .compose(&self.c.to_dense())?;
        let a = self.a_diagonal.to_dense();
        Ok(Monodromy {
            a: OperatorMatrix {
                n_sites: a.n_sites,
                matrix: a.matrix() + bdc.matrix(),
            },
            b: self.b.to_dense(),
            c: self.c.to_dense(),
            d: self.d.to_dense(),
        })
    }
}

/// The twisted creation operator `B̃(α, u)` in closed form.
pub fn twisted_b_on(verticals: &[Line], aux: &Line) -> Result<TensorSum> {
    let n = verticals.len();
    check_size("twisted operators", n, 1, MAX_BETHE_N)?;
    let w0: Vec<SixWeights> = verticals.iter().map(|w| line_weights(aux, w)).collect();
    let mut terms = Vec::with_capacity(n);
    for l in 0..n {
        let mut term = Vec::with_capacity(n);
        for j in 0..n {
            term.push(if j < l {
                let ratio = guarded_a2(verticals, j, l)? / guarded_b2(verticals, j, l)?;
                local_diag(w0[j].b2, w0[j].a2 * ratio)
            } else if j == l {
                local_lower(w0[l].c1)
            } else {
                let lj = checked(verticals, l, j);
                let ratio = guarded_a2(verticals, j, l)? / guarded_b2(verticals, j, l)?;
                local_diag(lj.a1 * w0[j].b2, guarded_a2(verticals, l, j)? * w0[j].a2 * ratio)
            });
        }
        terms.push(term);
    }
    TensorSum::new(n, terms)
}

/// All four twisted operators in closed form.
pub fn twisted_closed_forms_on(verticals: &[Line], aux: &Line) -> Result<TwistedOperators> {
    let n = verticals.len();
    let b = twisted_b_on(verticals, aux)?;
    let w0: Vec<SixWeights> = verticals.iter().map(|w| line_weights(aux, w)).collect();
    let wj0: Vec<SixWeights> = verticals.iter().map(|w| line_weights(w, aux)).collect();

    let mut c_terms = Vec::with_capacity(n);
    for l in 0..n {
        let mut term = Vec::with_capacity(n);
        for j in 0..n {
            term.push(if j < l {
                let lj = checked(verticals, l, j);
                local_diag(lj.a1 * w0[j].b2 / guarded_b2(verticals, l, j)?, w0[j].a2)
            } else if j == l {
                local_raise(w0[l].c2)
            } else {
                local_diag(
                    w0[j].b2 / guarded_b2(verticals, l, j)?,
                    w0[j].a2 / guarded_a2(verticals, l, j)?,
                )
            });
        }
        c_terms.push(term);
    }

    let mut d_diag = Vec::with_capacity(n);
    let mut d_inv = Vec::with_capacity(n);
    let mut a_diag = Vec::with_capacity(n);
    for j in 0..n {
        let s = scale_of(&w0[j]);
        let b2 = guard(w0[j].b2, s, || format!("b2(alpha, beta[{j}])"))?;
        let a2 = guard(w0[j].a2, s, || format!("a2(alpha, beta[{j}])"))?;
        let b2_rev = guard(wj0[j].b2, scale_of(&wj0[j]), || format!("b2(beta[{j}], alpha)"))?;
        d_diag.push(local_diag(b2, a2));
        d_inv.push(local_diag(ONE / b2, ONE / a2));
        a_diag.push(local_diag(w0[j].a1, wj0[j].a2 * a2 / b2_rev));
    }
    Ok(TwistedOperators {
        a_diagonal: TensorSum::new(n, vec![a_diag])?,
        b,
        c: TensorSum::new(n, c_terms)?,
        d: TensorSum::new(n, vec![d_diag])?,
        d_inverse: TensorSum::new(n, vec![d_inv])?,
    })
}

pub fn twisted_closed_forms(params: &ModelParams, alpha: Scalar, u: Scalar) -> Result<TwistedOperators> {
    twisted_closed_forms_on(&params.verticals(), &Line::new(alpha, u))
}

/// `⟨1| B̃(α_1, u_1) ··· B̃(α_N, u_N) |0⟩ / Π_{j<k} ǎ_{2,jk}`.
pub fn dwpf_twisted(params: &ModelParams) -> Result<Scalar> {
    let n = params.n();
    check_size("twisted route", n, 2, MAX_BETHE_N)?;
    let verticals = params.verticals();
    let mut norm = ONE;
    for j in 0..n {
        for k in j + 1..n {
            norm *= guarded_a2(&verticals, j, k)?;
        }
    }
    let mut v = StateVector::all_up(n).amps;
    for k in (0..n).rev() {
        v = twisted_b_on(&verticals, &params.horizontal(k))?.apply(&v);
    }
    Ok(v[(1 << n) - 1] / norm)
}

/// Both sides of the recursion that removes the last horizontal line.
pub fn bethe_recursion_sides(params: &ModelParams) -> Result<Sides> {
    let n = params.n();
    check_size("Bethe recursion", n, 2, MAX_BETHE_N)?;
    let verticals = params.verticals();
    let last = n - 1;
    let mut rhs = ZERO;
    for i in 0..n {
        let mut t = params.weights(last, i).c1;
        for j in 0..last {
            t *= params.weights(j, i).a2;
        }
        for k in (0..n).filter(|&k| k != i) {
            t *= params.weights(last, k).b2 / guarded_b2(&verticals, i, k)?;
            let ik = checked(&verticals, i, k);
            t *= if k < i { ik.a2 } else { ik.a1 };
        }
        rhs += t * dwpf_bethe(&params.without(last, i)?)?;
    }
    Ok(Sides {
        lhs: dwpf_bethe(params)?,
        rhs,
    })
}

pub fn bethe_recursion_residual(params: &ModelParams) -> Result<f64> {
    Ok(bethe_recursion_sides(params)?.residual())
}

/// `Π_k e^{k(u_k − v_k)} √(1 − α_k²) √(1 − β_k²) · Π_{j<k} (e^{u_j − u_k} − α_j α_k)(e^{v_k − v_j} − β_k β_j)`,
/// with `k` counted from 1.
pub fn dwpf_product_general(params: &ModelParams) -> Scalar {
    let (a, b, u, v) = (params.alpha(), params.beta(), params.u(), params.v());
    let n = params.n();
    let mut z = ONE;
    for k in 0..n {
        z *= ((u[k] - v[k]) * (k + 1) as f64).exp() * params.gamma()[k] * params.delta()[k];
    }
    for j in 0..n {
        for k in j + 1..n {
            z *= ((u[j] - u[k]).exp() - a[j] * a[k]) * ((v[k] - v[j]).exp() - b[k] * b[j]);
        }
    }
    z
}

fn horizontal_pair(params: &ModelParams, i: usize, j: usize) -> SixWeights {
    line_weights(&params.horizontal(i), &params.horizontal(j))
}

fn vertical_pair(params: &ModelParams, i: usize, j: usize) -> SixWeights {
    line_weights(&params.vertical(i), &params.vertical(j))
}

/// `|Σ_i Π_j a₂(α_j, β_i)/a₂(α_j, α_N) Π_{k≠i} b₂(β_k, α_N)/b₂(β_k, β_i) − 1|`.
pub fn partition_identity_residual(params: &ModelParams) -> Result<f64> {
    let n = params.n();
    let last = n - 1;
    let mut sum = ZERO;
    for i in 0..n {
        let mut t = ONE;
        for j in 0..last {
            let den = horizontal_pair(params, j, last);
            t *= params.weights(j, i).a2 / guard(den.a2, scale_of(&den), || format!("a2(alpha[{j}], alpha[{last}])"))?;
        }
        for k in (0..n).filter(|&k| k != i) {
            let num = line_weights(&params.vertical(k), &params.horizontal(last));
            let den = vertical_pair(params, k, i);
            t *= num.b2 / guard(den.b2, scale_of(&den), || format!("b2(beta[{k}], beta[{i}])"))?;
        }
        sum += t;
    }
    Ok((sum - ONE).norm())
}

/// The polynomial identity in `α_N` behind the partition of unity, with the
/// denominators cleared.
pub fn product_form_sides(params: &ModelParams) -> Sides {
    let n = params.n();
    let last = n - 1;
    let b2 = |j: usize, k: usize| vertical_pair(params, j, k).b2;
    let mut lhs = ZERO;
    for i in 0..n {
        let mut t = ONE;
        for j in 0..last {
            t *= params.weights(j, i).a2;
        }
        for k in (0..n).filter(|&k| k != i) {
            t *= line_weights(&params.vertical(k), &params.horizontal(last)).b2;
            for j in (0..n).filter(|&j| j != k) {
                t *= b2(j, k);
            }
        }
        lhs += t;
    }
    let mut rhs = ONE;
    for j in 0..last {
        rhs *= horizontal_pair(params, j, last).a2;
    }
    for j in 0..n {
        for k in (0..n).filter(|&k| k != j) {
            rhs *= b2(j, k);
        }
    }
    Sides { lhs, rhs }
}

fn lower_and_diag(w: &SixWeights) -> (Matrix, Matrix) {
    (local_matrix(&local_lower(w.c1)), local_matrix(&local_diag(w.b2, w.a2)))
}

/// Residual of `B_{1…N} = A_{2…N} ⊗ [[0,0],[c₁,0]]_1 + B_{2…N} ⊗ diag(b₂, a₂)_1`
/// for the untwisted creation operator.
pub fn b_recursion_residual(params: &ModelParams, alpha: Scalar, u: Scalar) -> Result<f64> {
    let verticals = params.verticals();
    check_size("B recursion", verticals.len(), 2, MAX_BETHE_N)?;
    let aux = Line::new(alpha, u);
    let full = monodromy_on(&verticals, &aux)?;
    let sub = monodromy_on(&verticals[1..], &aux)?;
    let (lower, diag) = lower_and_diag(&line_weights(&aux, &verticals[0]));
    let rhs = &lower.kron(sub.a.matrix()) + &diag.kron(sub.b.matrix());
    Ok(full.b.matrix().rel_diff(&rhs))
}

/// Residual of the matrix equation that determines `B̃_{1…N}` from twisted
/// operators on sites `2…N`, all taken in closed form.
pub fn matrix_equation_residual(params: &ModelParams, alpha: Scalar, u: Scalar) -> Result<f64> {
    let verticals = params.verticals();
    check_size("matrix equation", verticals.len(), 2, MAX_F_N)?;
    let aux = Line::new(alpha, u);
    let rest = &verticals[1..];
    let b_full = twisted_b_on(&verticals, &aux)?.to_dense();
    let inner_ops = twisted_closed_forms_on(rest, &aux)?.to_dense()?;
    let first = twisted_closed_forms_on(rest, &verticals[0])?.to_dense()?;
    let d = 1usize << rest.len();
    let m = Matrix::from_fn(2 * d, 2 * d, |i, j| match (i < d, j < d) {
        (true, true) => {
            if i == j {
                ONE
            } else {
                ZERO
            }
        }
        (true, false) => ZERO,
        (false, true) => first.c.matrix()[(i - d, j)],
        (false, false) => first.d.matrix()[(i - d, j - d)],
    });
    let (lower, diag) = lower_and_diag(&line_weights(&aux, &verticals[0]));
    let inner = &lower.kron(inner_ops.a.matrix()) + &diag.kron(inner_ops.b.matrix());
    let lhs = b_full.matrix().try_mul(&m)?;
    let rhs = m.try_mul(&inner)?;
    Ok(lhs.rel_diff(&rhs))
}
