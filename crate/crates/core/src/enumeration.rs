//! Ground-truth partition functions by exhaustive enumeration of domain-wall
//! configurations and by transfer contraction over row states.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use serde::Serialize;

use crate::error::{check_size, Result};
use crate::model::{ModelParams, SixWeights, VertexKind};
use crate::numeric::Scalar;

pub const MAX_BRUTE_N: usize = 6;
pub const MAX_TRANSFER_N: usize = 12;
pub const MAX_COUNT_N: usize = 8;

/// A domain-wall-consistent assignment of vertex kinds, row-major, rows top
/// to bottom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Configuration {
    n: usize,
    kinds: Vec<VertexKind>,
}

impl Configuration {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self, i: usize, j: usize) -> VertexKind {
        self.kinds[i * self.n + j]
    }

    pub fn kinds(&self) -> &[VertexKind] {
        &self.kinds
    }

    pub fn rows(&self) -> impl Iterator<Item = &[VertexKind]> {
        self.kinds.chunks(self.n)
    }

    /// Product of vertex weights under `params`.
    pub fn weight(&self, params: &ModelParams) -> Scalar {
        let n = self.n;
        self.kinds
            .iter()
            .enumerate()
            .map(|(k, kind)| params.weights(k / n, k % n).get(*kind))
            .product()
    }

    pub fn count_where(&self, pred: impl Fn(VertexKind) -> bool) -> usize {
        self.kinds.iter().filter(|k| pred(**k)).count()
    }

    /// Checks bond agreement on every interior edge and the domain-wall
    /// boundary states.
    pub fn is_consistent(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let b = self.kind(i, j).signature();
                let west_ok = if j == 0 {
                    b.w == 1
                } else {
                    self.kind(i, j - 1).signature().e == b.w
                };
                let north_ok = if i == 0 {
                    b.n == 1
                } else {
                    self.kind(i - 1, j).signature().s == b.n
                };
                let east_ok = j + 1 < n || b.e == 0;
                let south_ok = i + 1 < n || b.s == 0;
                if !(west_ok && north_ok && east_ok && south_ok) {
                    return false;
                }
            }
        }
        true
    }
}

/// The `N` vertical bond states between two consecutive rows; bit `j` holds
/// column `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RowState {
    n: usize,
    bits: u32,
}

impl RowState {
    pub fn new(n: usize, bits: u32) -> Self {
        debug_assert!(n <= 31 && bits < (1 << n));
        Self { n, bits }
    }

    pub fn all_up(n: usize) -> Self {
        Self::new(n, (1u32 << n) - 1)
    }

    pub fn get(&self, j: usize) -> u8 {
        ((self.bits >> j) & 1) as u8
    }

    pub fn with(&self, j: usize, state: u8) -> Self {
        let bits = (self.bits & !(1 << j)) | ((state as u32) << j);
        Self { n: self.n, bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Vertex kinds admissible at column `j` of row `i` given the incoming west
/// and north bonds, ordered by south bond (0 first).
fn admissible(n: usize, i: usize, j: usize, w: u8, north: u8) -> impl Iterator<Item = VertexKind> {
    (0..=1u8).filter_map(move |s| {
        let kind = VertexKind::from_west_north_south(w, north, s)?;
        let last_col_ok = j + 1 < n || kind.signature().e == 0;
        let last_row_ok = i + 1 < n || s == 0;
        (last_col_ok && last_row_ok).then_some(kind)
    })
}

struct Frame {
    option: usize,
    prev_north: u8,
    prev_h: u8,
}

/// Depth-first stream over all domain-wall configurations, rows top to
/// bottom, columns left to right.
pub struct ConfigurationIter {
    n: usize,
    kinds: Vec<VertexKind>,
    frames: Vec<Frame>,
    vert: Vec<u8>,
    h: u8,
    backtracking: bool,
    done: bool,
}

impl ConfigurationIter {
    fn candidates(&self, pos: usize) -> Vec<VertexKind> {
        let (i, j) = (pos / self.n, pos % self.n);
        let w = if j == 0 { 1 } else { self.h };
        admissible(self.n, i, j, w, self.vert[j]).collect()
    }

    fn apply(&mut self, pos: usize, kind: VertexKind, option: usize) {
        let j = pos % self.n;
        let sig = kind.signature();
        self.frames.push(Frame {
            option,
            prev_north: self.vert[j],
            prev_h: self.h,
        });
        self.kinds.push(kind);
        self.vert[j] = sig.s;
        self.h = sig.e;
    }
}

impl Iterator for ConfigurationIter {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        let total = self.n * self.n;
        while !self.done {
            if self.backtracking {
                let Some(frame) = self.frames.pop() else {
                    self.done = true;
                    break;
                };
                self.kinds.pop();
                let pos = self.frames.len();
                self.vert[pos % self.n] = frame.prev_north;
                self.h = frame.prev_h;
                let cands = self.candidates(pos);
                if let Some(&kind) = cands.get(frame.option + 1) {
                    self.apply(pos, kind, frame.option + 1);
                    self.backtracking = false;
                }
            } else {
                let pos = self.frames.len();
                if pos == total {
                    self.backtracking = true;
                    return Some(Configuration {
                        n: self.n,
                        kinds: self.kinds.clone(),
                    });
                }
                match self.candidates(pos).first() {
                    Some(&kind) => self.apply(pos, kind, 0),
                    None => self.backtracking = true,
                }
            }
        }
        None
    }
}

/// Every domain-wall configuration of the `N × N` lattice, each exactly once.
pub fn enumerate_configurations(n: usize) -> Result<ConfigurationIter> {
    check_size("configuration enumeration", n, 1, MAX_BRUTE_N)?;
    Ok(ConfigurationIter {
        n,
        kinds: Vec::with_capacity(n * n),
        frames: Vec::with_capacity(n * n),
        vert: vec![1; n],
        h: 1,
        backtracking: false,
        done: false,
    })
}

fn weight_table(params: &ModelParams) -> Vec<SixWeights> {
    let n = params.n();
    (0..n * n).map(|k| params.weights(k / n, k % n)).collect()
}

/// Sum over configurations of the product of vertex weights.
pub fn dwpf_brute(params: &ModelParams) -> Result<Scalar> {
    let n = params.n();
    let table = weight_table(params);
    Ok(enumerate_configurations(n)?
        .map(|c| c.kinds().iter().zip(&table).map(|(k, w)| w.get(*k)).product::<Scalar>())
        .sum())
}

/// Vertex-by-vertex transfer contraction with an arbitrary weight semiring.
///
/// The state is the row of vertical bonds (bottom bonds for columns already
/// visited in the current row, top bonds for the rest) plus the horizontal
/// bond entering the current vertex.
pub fn contract<T, F>(n: usize, zero: T, one: T, weight: F) -> T
where
    T: Copy + Add<Output = T> + Mul<Output = T>,
    F: Fn(VertexKind, usize, usize) -> T,
{
    let states = 1usize << n;
    let mut cur = vec![zero; states];
    cur[states - 1] = one;
    let mut row = vec![zero; 2 * states];
    let mut next = vec![zero; 2 * states];
    for i in 0..n {
        row.fill(zero);
        for bits in 0..states {
            row[2 * bits + 1] = cur[bits];
        }
        for j in 0..n {
            next.fill(zero);
            for bits in 0..states {
                let north = ((bits >> j) & 1) as u8;
                for h in 0..=1u8 {
                    let amp = row[2 * bits + h as usize];
                    for s in 0..=1u8 {
                        let Some(kind) = VertexKind::from_west_north_south(h, north, s) else {
                            continue;
                        };
                        let e = kind.signature().e as usize;
                        let nb = (bits & !(1 << j)) | ((s as usize) << j);
                        next[2 * nb + e] = next[2 * nb + e] + amp * weight(kind, i, j);
                    }
                }
            }
            std::mem::swap(&mut row, &mut next);
        }
        for bits in 0..states {
            cur[bits] = row[2 * bits];
        }
    }
    cur[0]
}

/// Same value as [`dwpf_brute`], by row-state contraction in `O(N² 2^N)`.
pub fn dwpf_transfer(params: &ModelParams) -> Result<Scalar> {
    let n = params.n();
    check_size("transfer contraction", n, 1, MAX_TRANSFER_N)?;
    let table = weight_table(params);
    Ok(contract(n, Scalar::new(0.0, 0.0), Scalar::new(1.0, 0.0), |k, i, j| {
        table[i * n + j].get(k)
    }))
}

/// Number of domain-wall configurations (the alternating-sign-matrix count).
pub fn count_configurations(n: usize) -> Result<u64> {
    check_size("configuration count", n, 1, MAX_COUNT_N)?;
    Ok(contract(n, 0u64, 1u64, |_, _, _| 1))
}

/// Transfer-contracted weighted count with one weight per vertex class.
pub fn weighted_count(n: usize, a: f64, b: f64, c: f64) -> Result<f64> {
    check_size("weighted count", n, 1, MAX_COUNT_N)?;
    Ok(contract(n, 0.0, 1.0, |k, _, _| match k {
        VertexKind::A1 | VertexKind::A2 => a,
        VertexKind::B1 | VertexKind::B2 => b,
        VertexKind::C1 | VertexKind::C2 => c,
    }))
}

/// Histogram of the number of c-type vertices per configuration.
pub fn c_vertex_histogram(n: usize) -> Result<BTreeMap<usize, u64>> {
    let mut hist = BTreeMap::new();
    for c in enumerate_configurations(n)? {
        *hist.entry(c.count_where(VertexKind::is_c)).or_insert(0) += 1;
    }
    Ok(hist)
}

/// Restricted partition function at `α_i = iκ`, `β_j = −iκ`, `κ = √2 − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoEnumeration {
    pub n: usize,
    pub kappa: f64,
    /// `Z` at the specialization.
    pub raw: Scalar,
    /// `Z / (1 − κ²)^{N²}`, i.e. with `|a0| = |b0|` scaled to one.
    pub normalized: Scalar,
    /// Transfer count with `a = b = 1`, `c = √2` per vertex.
    pub weighted_count: f64,
}

pub fn two_enumeration_kappa() -> f64 {
    std::f64::consts::SQRT_2 - 1.0
}

/// The specialization used by [`two_enumeration`].
pub fn two_enumeration_params(n: usize) -> Result<ModelParams> {
    let k = two_enumeration_kappa();
    ModelParams::restricted(vec![Scalar::new(0.0, k); n], vec![Scalar::new(0.0, -k); n])
}

pub fn two_enumeration(n: usize) -> Result<TwoEnumeration> {
    check_size("two-enumeration", n, 1, MAX_COUNT_N)?;
    let kappa = two_enumeration_kappa();
    let raw = dwpf_transfer(&two_enumeration_params(n)?)?;
    let scale = (1.0 - kappa * kappa).powi((n * n) as i32);
    Ok(TwoEnumeration {
        n,
        kappa,
        raw,
        normalized: raw / scale,
        weighted_count: weighted_count(n, 1.0, 1.0, std::f64::consts::SQRT_2)?,
    })
}
