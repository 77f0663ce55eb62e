//! Lattice parameters, vertex weights and the vertex-kind dictionary.
//!
//! Bond states are coded `1` when the arrow points along the line's
//! orientation (left to right on horizontal lines, bottom to top on vertical
//! lines) and `0` otherwise. Domain-wall boundaries then read: left edge 1,
//! right edge 0, top edge 1, bottom edge 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Scalar;

const ONE: Scalar = Scalar::new(1.0, 0.0);

/// Principal-branch `√(1 − x²)`.
#[inline]
pub fn field_root(x: Scalar) -> Scalar {
    (ONE - x * x).sqrt()
}

/// One lattice line: external field, rapidity and the cached `√(1 − field²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    pub field: Scalar,
    pub rapidity: Scalar,
    pub root: Scalar,
}

impl Line {
    pub fn new(field: Scalar, rapidity: Scalar) -> Self {
        Self {
            field,
            rapidity,
            root: field_root(field),
        }
    }
}

/// The four variable families of an `N × N` lattice.
///
/// `gamma[i] = √(1 − α_i²)` and `delta[j] = √(1 − β_j²)` are computed once at
/// construction and reused by every route.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    n: usize,
    alpha: Vec<Scalar>,
    beta: Vec<Scalar>,
    u: Vec<Scalar>,
    v: Vec<Scalar>,
    gamma: Vec<Scalar>,
    delta: Vec<Scalar>,
}

impl ModelParams {
    pub fn new(alpha: Vec<Scalar>, beta: Vec<Scalar>, u: Vec<Scalar>, v: Vec<Scalar>) -> Result<Self> {
        Self::with_regularity(alpha, beta, u, v, false)
    }

    /// As [`ModelParams::new`], additionally rejecting `α_i = ±1` and `β_j = ±1`
    /// when `strict` is set (those zero every c-weight on the line).
    pub fn with_regularity(
        alpha: Vec<Scalar>,
        beta: Vec<Scalar>,
        u: Vec<Scalar>,
        v: Vec<Scalar>,
        strict: bool,
    ) -> Result<Self> {
        let n = alpha.len();
        if n == 0 {
            return Err(Error::Schema("lattice size must be at least 1".into()));
        }
        for (name, len) in [("beta", beta.len()), ("u", u.len()), ("v", v.len())] {
            if len != n {
                return Err(Error::Schema(format!("field `{name}` has length {len}, expected {n}")));
            }
        }
        if let Some((name, k)) = [("alpha", &alpha), ("beta", &beta), ("u", &u), ("v", &v)]
            .iter()
            .find_map(|(name, xs)| {
                xs.iter()
                    .position(|z| !crate::numeric::is_finite(*z))
                    .map(|k| (*name, k))
            })
        {
            return Err(Error::Domain(format!("{name}[{k}] is not finite")));
        }
        if strict {
            for (name, xs) in [("alpha", &alpha), ("beta", &beta)] {
                if let Some(k) = xs.iter().position(|z| (ONE - z * z).norm() == 0.0) {
                    return Err(Error::Domain(format!(
                        "{name}[{k}] = ±1 makes every c-weight on that line vanish"
                    )));
                }
            }
        }
        let gamma = alpha.iter().copied().map(field_root).collect();
        let delta = beta.iter().copied().map(field_root).collect();
        Ok(Self {
            n,
            alpha,
            beta,
            u,
            v,
            gamma,
            delta,
        })
    }

    /// Parameters with every rapidity set to zero.
    pub fn restricted(alpha: Vec<Scalar>, beta: Vec<Scalar>) -> Result<Self> {
        let zeros = vec![Scalar::new(0.0, 0.0); alpha.len()];
        Self::new(alpha, beta, zeros.clone(), zeros)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn alpha(&self) -> &[Scalar] {
        &self.alpha
    }
    pub fn beta(&self) -> &[Scalar] {
        &self.beta
    }
    pub fn u(&self) -> &[Scalar] {
        &self.u
    }
    pub fn v(&self) -> &[Scalar] {
        &self.v
    }
    pub fn gamma(&self) -> &[Scalar] {
        &self.gamma
    }
    pub fn delta(&self) -> &[Scalar] {
        &self.delta
    }

    pub fn is_restricted(&self) -> bool {
        self.u.iter().chain(&self.v).all(|z| z.norm() == 0.0)
    }

    /// Horizontal line `i` (0-based).
    pub fn horizontal(&self, i: usize) -> Line {
        Line {
            field: self.alpha[i],
            rapidity: self.u[i],
            root: self.gamma[i],
        }
    }

    /// Vertical line `j` (0-based).
    pub fn vertical(&self, j: usize) -> Line {
        Line {
            field: self.beta[j],
            rapidity: self.v[j],
            root: self.delta[j],
        }
    }

    pub fn verticals(&self) -> Vec<Line> {
        (0..self.n).map(|j| self.vertical(j)).collect()
    }

    /// Weights at node `(i, j)` using the cached roots.
    pub fn weights(&self, i: usize, j: usize) -> SixWeights {
        line_weights(&self.horizontal(i), &self.vertical(j))
    }

    /// The `(N−1)`-size parameters with horizontal line `row` and vertical line
    /// `col` removed. Cached roots are carried over, not recomputed.
    pub fn without(&self, row: usize, col: usize) -> Result<Self> {
        if row >= self.n {
            return Err(Error::Index { index: row, n: self.n });
        }
        if col >= self.n {
            return Err(Error::Index { index: col, n: self.n });
        }
        if self.n == 1 {
            return Err(Error::Size {
                what: "reduced lattice",
                n: 0,
                min: 1,
                max: usize::MAX,
            });
        }
        let drop = |xs: &[Scalar], k: usize| -> Vec<Scalar> {
            xs.iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, z)| *z)
                .collect()
        };
        Ok(Self {
            n: self.n - 1,
            alpha: drop(&self.alpha, row),
            beta: drop(&self.beta, col),
            u: drop(&self.u, row),
            v: drop(&self.v, col),
            gamma: drop(&self.gamma, row),
            delta: drop(&self.delta, col),
        })
    }

    /// Replace horizontal line `i`, recomputing its cached root.
    pub fn with_horizontal(&self, i: usize, field: Scalar, rapidity: Scalar) -> Self {
        let mut p = self.clone();
        p.alpha[i] = field;
        p.u[i] = rapidity;
        p.gamma[i] = field_root(field);
        p
    }

    /// Replace vertical line `j`, recomputing its cached root.
    pub fn with_vertical(&self, j: usize, field: Scalar, rapidity: Scalar) -> Self {
        let mut p = self.clone();
        p.beta[j] = field;
        p.v[j] = rapidity;
        p.delta[j] = field_root(field);
        p
    }
}

/// The six non-zero vertex weights for one (horizontal, vertical) line pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SixWeights {
    pub a1: Scalar,
    pub a2: Scalar,
    pub b1: Scalar,
    pub b2: Scalar,
    pub c1: Scalar,
    pub c2: Scalar,
}

impl SixWeights {
    pub fn get(&self, kind: VertexKind) -> Scalar {
        match kind {
            VertexKind::A1 => self.a1,
            VertexKind::A2 => self.a2,
            VertexKind::B1 => self.b1,
            VertexKind::B2 => self.b2,
            VertexKind::C1 => self.c1,
            VertexKind::C2 => self.c2,
        }
    }

    /// `|a1·a2 + b1·b2 − c1·c2| / |c1·c2|`.
    pub fn free_fermion_residual(&self) -> f64 {
        crate::numeric::rel_diff(self.a1 * self.a2 + self.b1 * self.b2, self.c1 * self.c2)
    }
}

/// Weights for a horizontal and a vertical line, using their cached roots.
pub fn line_weights(h: &Line, w: &Line) -> SixWeights {
    let e = (h.rapidity - w.rapidity).exp();
    let ab = h.field * w.field;
    let c = h.root * w.root;
    SixWeights {
        a1: ONE - ab * e,
        a2: e - ab,
        b1: h.field - w.field * e,
        b2: w.field - h.field * e,
        c1: c * e,
        c2: c,
    }
}

/// The six weights at fields `(α, β)` and rapidities `(u, v)`.
pub fn general_weights(alpha: Scalar, beta: Scalar, u: Scalar, v: Scalar) -> SixWeights {
    line_weights(&Line::new(alpha, u), &Line::new(beta, v))
}

/// Weights built only from vertical-line variables; the same formulas as
/// [`general_weights`] with both slots filled from vertical lines.
pub fn checked_weights(beta_i: Scalar, beta_j: Scalar, v_i: Scalar, v_j: Scalar) -> SixWeights {
    general_weights(beta_i, beta_j, v_i, v_j)
}

/// Weights at vanishing rapidities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RestrictedWeights {
    pub a0: Scalar,
    pub b0: Scalar,
    pub c0: Scalar,
}

impl RestrictedWeights {
    /// Signed vertex weight: `A1, A2 ↦ a0`, `B1 ↦ b0`, `B2 ↦ −b0`, `C1, C2 ↦ c0`.
    pub fn signed(&self, kind: VertexKind) -> Scalar {
        match kind {
            VertexKind::A1 | VertexKind::A2 => self.a0,
            VertexKind::B1 => self.b0,
            VertexKind::B2 => -self.b0,
            VertexKind::C1 | VertexKind::C2 => self.c0,
        }
    }
}

pub fn restricted_weights(alpha: Scalar, beta: Scalar) -> RestrictedWeights {
    restricted_weights_cached(alpha, beta, field_root(alpha), field_root(beta))
}

pub(crate) fn restricted_weights_cached(alpha: Scalar, beta: Scalar, ga: Scalar, db: Scalar) -> RestrictedWeights {
    RestrictedWeights {
        a0: ONE - alpha * beta,
        b0: alpha - beta,
        c0: ga * db,
    }
}

/// Bond states around a vertex, read west, south, east, north.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bonds {
    pub w: u8,
    pub s: u8,
    pub e: u8,
    pub n: u8,
}

/// The six vertices with non-zero weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexKind {
    A1,
    A2,
    B1,
    B2,
    C1,
    C2,
}

impl VertexKind {
    pub const ALL: [VertexKind; 6] = [
        VertexKind::A1,
        VertexKind::A2,
        VertexKind::B1,
        VertexKind::B2,
        VertexKind::C1,
        VertexKind::C2,
    ];

    pub const fn signature(self) -> Bonds {
        let (w, s, e, n) = match self {
            VertexKind::A1 => (0, 0, 0, 0),
            VertexKind::A2 => (1, 1, 1, 1),
            VertexKind::B1 => (0, 1, 0, 1),
            VertexKind::B2 => (1, 0, 1, 0),
            VertexKind::C1 => (1, 0, 0, 1),
            VertexKind::C2 => (0, 1, 1, 0),
        };
        Bonds { w, s, e, n }
    }

    pub fn from_signature(b: Bonds) -> Option<VertexKind> {
        Self::ALL.into_iter().find(|k| k.signature() == b)
    }

    /// The kind with the given west and north bonds and south bond `s`, if any.
    #[inline]
    pub fn from_west_north_south(w: u8, n: u8, s: u8) -> Option<VertexKind> {
        // Conservation fixes the east bond.
        let e = (w + s).checked_sub(n)?;
        if e > 1 {
            return None;
        }
        Self::from_signature(Bonds { w, s, e, n })
    }

    pub fn is_c(self) -> bool {
        matches!(self, VertexKind::C1 | VertexKind::C2)
    }

    pub fn is_b(self) -> bool {
        matches!(self, VertexKind::B1 | VertexKind::B2)
    }

    pub fn name(self) -> &'static str {
        match self {
            VertexKind::A1 => "A1",
            VertexKind::A2 => "A2",
            VertexKind::B1 => "B1",
            VertexKind::B2 => "B2",
            VertexKind::C1 => "C1",
            VertexKind::C2 => "C2",
        }
    }
}

/// Weight of `kind` at node `(i, j)` (0-based row and column).
pub fn vertex_weight(kind: VertexKind, params: &ModelParams, i: usize, j: usize) -> Result<Scalar> {
    for idx in [i, j] {
        if idx >= params.n() {
            return Err(Error::Index {
                index: idx,
                n: params.n(),
            });
        }
    }
    Ok(params.weights(i, j).get(kind))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::re;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn zero() -> Scalar {
        re(0.0)
    }

    #[test]
    fn all_fields_off() {
        let w = general_weights(zero(), zero(), zero(), zero());
        assert_eq!((w.a1, w.a2, w.c1, w.c2), (re(1.0), re(1.0), re(1.0), re(1.0)));
        assert_eq!((w.b1, w.b2), (zero(), zero()));
    }

    #[test]
    fn equal_fields_at_equal_rapidity_kill_b() {
        let a = Scalar::new(0.37, -0.2);
        let t = Scalar::new(0.1, 0.4);
        let w = general_weights(a, a, t, t);
        assert!(w.b1.norm() < 1e-16 && w.b2.norm() < 1e-16);
    }

    #[test]
    fn free_fermion_at_sample_point() {
        let w = general_weights(re(0.3), re(0.5), re(0.2), re(0.0));
        assert!(w.free_fermion_residual() < 1e-12);
    }

    #[test]
    fn restricted_values() {
        let r = restricted_weights(re(0.4), re(0.4));
        assert_eq!(r.b0, zero());
        let r = restricted_weights(re(0.5), re(2.0));
        assert_eq!(r.a0, zero());
        let r = restricted_weights(re(0.3), re(-0.4));
        assert!((r.a0 - re(1.12)).norm() < 1e-15);
        assert!((r.b0 - re(0.7)).norm() < 1e-15);
        assert!((r.c0 - re(0.91f64.sqrt() * 0.84f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn restriction_consistency() {
        let (a, b) = (Scalar::new(0.3, 0.1), Scalar::new(-0.2, 0.45));
        let w = general_weights(a, b, zero(), zero());
        let r = restricted_weights(a, b);
        assert_eq!(w.a1, r.a0);
        assert_eq!(w.a2, r.a0);
        assert_eq!(w.b1, r.b0);
        assert_eq!(w.b2, -r.b0);
        assert_eq!(w.c1, r.c0);
        assert_eq!(w.c2, r.c0);
        for k in VertexKind::ALL {
            assert_eq!(w.get(k), r.signed(k));
        }
    }

    #[test]
    fn checked_weight_examples() {
        let (b, v) = (Scalar::new(0.3, 0.2), Scalar::new(0.1, -0.2));
        let w = checked_weights(b, b, v, v);
        assert_eq!(w.b1, zero());
        assert_eq!(w.b2, zero());
        assert_eq!(w.a1, ONE - b * b);
        assert_eq!(w.a2, ONE - b * b);

        let (vi, vj) = (re(0.3), Scalar::new(-0.1, 0.2));
        let w = checked_weights(zero(), zero(), vi, vj);
        let e = (vi - vj).exp();
        assert_eq!(w.a1, re(1.0));
        assert_eq!(w.a2, e);
        assert_eq!(w.c1, e);
        assert_eq!(w.c2, re(1.0));
    }

    #[test]
    fn signature_table_invariants() {
        let sigs: HashSet<Bonds> = VertexKind::ALL.iter().map(|k| k.signature()).collect();
        assert_eq!(sigs.len(), 6);
        for k in VertexKind::ALL {
            let b = k.signature();
            assert_eq!(b.w + b.s, b.e + b.n, "{k:?} violates conservation");
            assert_eq!(VertexKind::from_signature(b), Some(k));
        }
    }

    #[test]
    fn frozen_corner_facts() {
        // Upper-right corner: north = 1 (top boundary), east = 0 (right boundary).
        let ur: Vec<_> = VertexKind::ALL
            .into_iter()
            .filter(|k| k.signature().n == 1 && k.signature().e == 0)
            .collect();
        assert_eq!(ur, vec![VertexKind::B1, VertexKind::C1]);
        // Upper-left corner: north = 1, west = 1.
        let ul: Vec<_> = VertexKind::ALL
            .into_iter()
            .filter(|k| k.signature().n == 1 && k.signature().w == 1)
            .collect();
        assert_eq!(ul, vec![VertexKind::A2, VertexKind::C1]);
        // A 1x1 lattice has w=1, s=0, e=0, n=1.
        assert_eq!(
            VertexKind::from_signature(Bonds { w: 1, s: 0, e: 0, n: 1 }),
            Some(VertexKind::C1)
        );
    }

    #[test]
    fn vertex_weight_examples() {
        let p = ModelParams::new(vec![zero()], vec![zero()], vec![re(0.3)], vec![re(-0.2)]).unwrap();
        assert_eq!(vertex_weight(VertexKind::C2, &p, 0, 0).unwrap(), re(1.0));
        assert!(matches!(
            vertex_weight(VertexKind::C2, &p, 1, 0),
            Err(Error::Index { .. })
        ));

        // α = β e^{u−v} is the root of b1, α = β e^{v−u} the root of b2.
        let (b, u, v) = (Scalar::new(0.4, 0.1), re(0.2), Scalar::new(-0.1, 0.3));
        let p = ModelParams::new(vec![b * (u - v).exp()], vec![b], vec![u], vec![v]).unwrap();
        assert!(vertex_weight(VertexKind::B1, &p, 0, 0).unwrap().norm() < 1e-15);
        let p = ModelParams::new(vec![b * (v - u).exp()], vec![b], vec![u], vec![v]).unwrap();
        assert!(vertex_weight(VertexKind::B2, &p, 0, 0).unwrap().norm() < 1e-15);

        let (a, b) = (re(0.3), Scalar::new(-0.2, 0.5));
        let p = ModelParams::restricted(vec![a], vec![b]).unwrap();
        assert_eq!(vertex_weight(VertexKind::A2, &p, 0, 0).unwrap(), ONE - a * b);
    }

    #[test]
    fn params_schema_and_regularity() {
        assert!(matches!(
            ModelParams::new(vec![zero(); 2], vec![zero()], vec![zero(); 2], vec![zero(); 2]),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            ModelParams::with_regularity(
                vec![re(1.0), zero()],
                vec![zero(); 2],
                vec![zero(); 2],
                vec![zero(); 2],
                true
            ),
            Err(Error::Domain(_))
        ));
        assert!(ModelParams::new(vec![re(1.0)], vec![zero()], vec![zero()], vec![zero()]).is_ok());
    }

    #[test]
    fn without_keeps_cached_roots() {
        let p = ModelParams::restricted(vec![re(0.1), re(0.2), re(0.3)], vec![re(-0.1), re(-0.2), re(-0.3)]).unwrap();
        let q = p.without(1, 2).unwrap();
        assert_eq!(q.alpha(), &[re(0.1), re(0.3)]);
        assert_eq!(q.beta(), &[re(-0.1), re(-0.2)]);
        assert_eq!(q.gamma(), &[p.gamma()[0], p.gamma()[2]]);
    }

    fn scalar() -> impl Strategy<Value = Scalar> {
        (-0.9f64..0.9, -0.9f64..0.9).prop_map(|(a, b)| Scalar::new(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn free_fermion_identity(a in scalar(), b in scalar(), u in scalar(), v in scalar()) {
            let w = general_weights(a, b, u, v);
            let lhs = w.a1 * w.a2 + w.b1 * w.b2;
            let rhs = w.c1 * w.c2;
            let scale = (w.a1 * w.a2).norm().max((w.b1 * w.b2).norm()).max(rhs.norm());
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }
    }
}
