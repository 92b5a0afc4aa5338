//! Linear maps `H: End(V) -> End(W)` stored as blocks `B_{i jbar} = H(E_{i jbar})`,
//! positivity certificates, instance generators and operator scaling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::CurvatureTensor;
use crate::hermitian::{det, herm_eigvals, inv_sqrt, matmul, ComplexMatrix, C64, ONE, ZERO};
use crate::sphere::{block_rng, blocks, gaussian_matrix, normalize, SampleRng};
use rand::SeedableRng;

/// Tolerance for `B_{i jbar}^* = B_{j ibar}`.
pub const BLOCK_SYMMETRY_TOL: f64 = 1e-10;
/// Below this `|det|` a scaling matrix counts as singular.
pub const SCALE_DET_FLOOR: f64 = 1e-12;
/// Certificates at or below this minimum eigenvalue are treated as not strictly positive.
pub const POSITIVITY_FLOOR: f64 = 1e-10;
pub const CERTIFICATE_BLOCK_SIZE: usize = 4096;
pub const REFINE_ROUNDS: usize = 50;
/// Grid used by [`sinkhorn_normalize_checked`] for its positivity pre-check.
pub const PRECHECK_GRID: usize = 2000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlockMapRepr", into = "BlockMapRepr")]
pub struct BlockMap {
    r: usize,
    w: usize,
    // row-major r x r
    blocks: Vec<ComplexMatrix>,
}

impl BlockMap {
    /// Validates shape and Hermitian block symmetry.
    pub fn new(blocks: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        let r = blocks.len();
        if r == 0 {
            return Err(Error::Empty("block map"));
        }
        let w = blocks[0].first().map(ComplexMatrix::dim).unwrap_or(0);
        for row in &blocks {
            if row.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    found: row.len(),
                });
            }
            if let Some(b) = row.iter().find(|b| b.dim() != w) {
                return Err(Error::DimensionMismatch {
                    expected: w,
                    found: b.dim(),
                });
            }
        }
        let h = BlockMap {
            r,
            w,
            blocks: blocks.into_iter().flatten().collect(),
        };
        let drift = h.symmetry_drift();
        if drift > BLOCK_SYMMETRY_TOL || drift.is_nan() {
            return Err(Error::BlockAsymmetry { drift });
        }
        Ok(h)
    }

    fn from_fn(r: usize, w: usize, f: impl Fn(usize, usize) -> ComplexMatrix) -> Self {
        let blocks = (0..r * r).map(|k| f(k / r, k % r)).collect();
        BlockMap { r, w, blocks }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn block(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.blocks[i * self.r + j]
    }

    /// Block rows `[B_{i 0bar}, .., B_{i (r-1)bar}]`.
    pub fn block_rows(&self) -> Vec<Vec<ComplexMatrix>> {
        self.blocks.chunks(self.r).map(<[_]>::to_vec).collect()
    }

    pub fn symmetry_drift(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.r {
            for j in i..self.r {
                worst = worst.max(self.block(i, j).adjoint().max_abs_diff(self.block(j, i)));
            }
        }
        worst
    }

    pub fn require_square(&self) -> Result<()> {
        if self.r != self.w {
            return Err(Error::NotSquare {
                r: self.r,
                w: self.w,
            });
        }
        Ok(())
    }

    /// `H(I) = sum_i B_{i ibar}`.
    pub fn image_of_identity(&self) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.w);
        for i in 0..self.r {
            s.add_scaled(ONE, self.block(i, i));
        }
        s
    }

    /// `T_{ij} = tr B_{i jbar}`.
    pub fn trace_matrix(&self) -> ComplexMatrix {
        let data = self.blocks.iter().map(ComplexMatrix::trace).collect();
        ComplexMatrix::from_row_major(self.r, data).expect("r x r")
    }

    /// `||H(I) - rI||_F + ||T - rI||_F`; zero exactly when `(1/r) H` is doubly stochastic.
    pub fn normalization_residual(&self) -> f64 {
        let r = self.r as f64;
        let left = &self.image_of_identity() - &ComplexMatrix::identity(self.w).scale_real(r);
        let right = &self.trace_matrix() - &ComplexMatrix::identity(self.r).scale_real(r);
        left.frobenius_norm() + right.frobenius_norm()
    }

    /// `t * self + (1 - t) * other`.
    pub fn convex_mix(&self, other: &BlockMap, t: f64) -> Result<BlockMap> {
        if self.r != other.r || self.w != other.w {
            return Err(Error::DimensionMismatch {
                expected: self.r,
                found: other.r,
            });
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| {
                let mut m = a.scale_real(t);
                m.add_scaled(C64::new(1.0 - t, 0.0), b);
                m
            })
            .collect();
        Ok(BlockMap { blocks, ..*self })
    }

    /// `self + s * trace_map`.
    pub fn plus_trace_map(&self, s: f64) -> BlockMap {
        let mut out = self.clone();
        for i in 0..self.r {
            for k in 0..self.w {
                out.blocks[i * self.r + i][(k, k)] += s;
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct BlockMapRepr {
    r: usize,
    w: usize,
    blocks: Vec<Vec<ComplexMatrix>>,
}

impl TryFrom<BlockMapRepr> for BlockMap {
    type Error = Error;

    fn try_from(b: BlockMapRepr) -> Result<Self> {
        let h = BlockMap::new(b.blocks)?;
        if h.r != b.r || h.w != b.w {
            return Err(Error::DimensionMismatch {
                expected: b.r,
                found: h.r,
            });
        }
        Ok(h)
    }
}

impl From<BlockMap> for BlockMapRepr {
    fn from(h: BlockMap) -> Self {
        BlockMapRepr {
            r: h.r,
            w: h.w,
            blocks: h.block_rows(),
        }
    }
}

/// `H(X) = tr(X) I_w`.
pub fn trace_map(r: usize, w: usize) -> BlockMap {
    BlockMap::from_fn(r, w, |i, j| {
        if i == j {
            ComplexMatrix::identity(w)
        } else {
            ComplexMatrix::zeros(w)
        }
    })
}

/// `H(X) = X`.
pub fn identity_map(r: usize) -> BlockMap {
    BlockMap::from_fn(r, r, |i, j| ComplexMatrix::unit(r, i, j))
}

/// `H(X) = X^T`.
pub fn transpose_map(r: usize) -> BlockMap {
    BlockMap::from_fn(r, r, |i, j| ComplexMatrix::unit(r, j, i))
}

/// `sum_{ij} x_ij B_{i jbar}`.
pub fn apply(h: &BlockMap, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.dim() != h.r {
        return Err(Error::DimensionMismatch {
            expected: h.r,
            found: x.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(h.w);
    for i in 0..h.r {
        for j in 0..h.r {
            let c = x[(i, j)];
            if c != ZERO {
                out.add_scaled(c, h.block(i, j));
            }
        }
    }
    Ok(out)
}

/// `H(xi xi^*) = sum xi^i conj(xi^j) B_{i jbar}`.
pub fn apply_rank_one(h: &BlockMap, xi: &[C64]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(h.w);
    for i in 0..h.r {
        for j in 0..h.r {
            out.add_scaled(xi[i] * xi[j].conj(), h.block(i, j));
        }
    }
    out
}

fn min_eig_at(h: &BlockMap, xi: &[C64]) -> f64 {
    let m = apply_rank_one(h, xi).hermitian_part();
    herm_eigvals(&m).map(|v| v[0]).unwrap_or(f64::NAN)
}

/// Smallest `lambda_min(H(xi xi^*))` found and the unit `xi` attaining it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub min_eig: f64,
    pub witness: Vec<C64>,
}

/// Minimizes `lambda_min(H(xi xi^*))` over `grid` random unit vectors, then refines
/// the best one by coordinate descent on the sphere with step halving.
/// A positive result is evidence of positivity; a non-positive one comes with a witness.
pub fn positivity_certificate(h: &BlockMap, grid: usize, seed: u64) -> Certificate {
    let r = h.r;
    let per_block: Vec<(f64, Vec<C64>)> = blocks(grid.max(1), CERTIFICATE_BLOCK_SIZE)
        .into_par_iter()
        .map(|(block, count)| {
            let mut rng = block_rng(seed, block);
            let mut best = (f64::INFINITY, Vec::new());
            for _ in 0..count {
                let xi = crate::sphere::unit_vector(&mut rng, r);
                let m = min_eig_at(h, &xi);
                if m < best.0 || best.1.is_empty() {
                    best = (m, xi);
                }
            }
            best
        })
        .collect();
    let (mut best, mut xi) = per_block
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("grid >= 1");

    let mut step = 0.25;
    for _ in 0..REFINE_ROUNDS {
        let mut improved = false;
        for coord in 0..2 * r {
            for dir in [1.0, -1.0] {
                let mut trial = xi.clone();
                let delta = if coord < r {
                    C64::new(dir * step, 0.0)
                } else {
                    C64::new(0.0, dir * step)
                };
                trial[coord % r] += delta;
                normalize(&mut trial);
                let m = min_eig_at(h, &trial);
                if m < best {
                    best = m;
                    xi = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Certificate {
        min_eig: best,
        witness: xi,
    }
}

/// `B_{i jbar} = sum_k C_k E_{i jbar} C_k^* + eps delta_ij I` for square `C_k`.
pub fn from_kraus(cs: &[ComplexMatrix], eps: f64) -> Result<BlockMap> {
    let first = cs.first().ok_or(Error::Empty("Kraus operators"))?;
    let r = first.dim();
    if let Some(c) = cs.iter().find(|c| c.dim() != r) {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: c.dim(),
        });
    }
    if eps < 0.0 || eps.is_nan() {
        return Err(Error::NegativeArgument(eps));
    }
    let h = BlockMap::from_fn(r, r, |i, j| {
        let mut b = ComplexMatrix::zeros(r);
        for c in cs {
            // (C e_i)(C e_j)^*
            for p in 0..r {
                for q in 0..r {
                    b[(p, q)] += c[(p, i)] * c[(q, j)].conj();
                }
            }
        }
        b
    });
    Ok(if eps > 0.0 { h.plus_trace_map(eps) } else { h })
}

/// Kraus map with `terms` Gaussian operators on `C^r`, plus `eps` times the trace map.
pub fn random_kraus_map(r: usize, terms: usize, eps: f64, seed: u64) -> Result<BlockMap> {
    let mut rng = SampleRng::seed_from_u64(seed);
    let cs: Vec<ComplexMatrix> = (0..terms).map(|_| gaussian_matrix(&mut rng, r)).collect();
    from_kraus(&cs, eps)
}

/// Choi-type map on `3 x 3` matrices:
/// `B_{i ibar} = E_{ii} + E_{(i-1)(i-1)}` (indices mod 3), `B_{i jbar} = -E_{ij}` for `i != j`.
///
/// `H(xi xi^*)` is singular whenever the entries of `xi` have equal moduli, so
/// this map is positive but not strictly positive; see [`choi_fixture_with_margin`].
pub fn choi_fixture() -> BlockMap {
    BlockMap::from_fn(3, 3, |i, j| {
        if i == j {
            let mut b = ComplexMatrix::unit(3, i, i);
            b[((i + 2) % 3, (i + 2) % 3)] += ONE;
            b
        } else {
            ComplexMatrix::unit(3, i, j).scale_real(-1.0)
        }
    })
}

/// [`choi_fixture`] plus `delta` times the trace map; strictly positive for `delta > 0`.
pub fn choi_fixture_with_margin(delta: f64) -> BlockMap {
    choi_fixture().plus_trace_map(delta)
}

/// `(B_{i jbar})_{ab} = R_{i jbar a bbar}`; `r` = fiber rank, `w` = base dimension.
pub fn from_curvature(rt: &CurvatureTensor) -> BlockMap {
    BlockMap::from_fn(rt.rank(), rt.dim(), |i, j| {
        let data = (0..rt.dim() * rt.dim())
            .map(|k| rt.get(i, j, k / rt.dim(), k % rt.dim()))
            .collect();
        ComplexMatrix::from_row_major(rt.dim(), data).expect("dim x dim")
    })
}

/// `S_{C1,C2}(H)(X) = C1 H(C2^* X C2) C1^*`, blockwise
/// `B'_{i jbar} = sum_{kl} conj(c2_ik) c2_jl C1 B_{k lbar} C1^*`.
pub fn scale(h: &BlockMap, c1: &ComplexMatrix, c2: &ComplexMatrix) -> Result<BlockMap> {
    if c1.dim() != h.w {
        return Err(Error::DimensionMismatch {
            expected: h.w,
            found: c1.dim(),
        });
    }
    if c2.dim() != h.r {
        return Err(Error::DimensionMismatch {
            expected: h.r,
            found: c2.dim(),
        });
    }
    for (what, c) in [("c1", c1), ("c2", c2)] {
        let d = det(c).norm();
        if d <= SCALE_DET_FLOOR || d.is_nan() {
            return Err(Error::Singular { what, det_abs: d });
        }
    }
    let c1_adj = c1.adjoint();
    let congruent: Vec<ComplexMatrix> = h
        .blocks
        .iter()
        .map(|b| matmul(&matmul(c1, b)?, &c1_adj))
        .collect::<Result<_>>()?;
    let r = h.r;
    Ok(BlockMap::from_fn(r, h.w, |i, j| {
        let mut out = ComplexMatrix::zeros(h.w);
        for k in 0..r {
            let a = c2[(i, k)].conj();
            if a == ZERO {
                continue;
            }
            for l in 0..r {
                let s = a * c2[(j, l)];
                if s != ZERO {
                    out.add_scaled(s, &congruent[k * r + l]);
                }
            }
        }
        out
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingResult {
    pub scaled: BlockMap,
    pub c1: ComplexMatrix,
    pub c2: ComplexMatrix,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Alternating left/right normalization towards `H(I) = rI`, `tr B_{i jbar} = r delta_ij`.
///
/// Left step: `C1 <- (H(I)/r)^{-1/2}`. Right step: the trace matrix transforms as
/// `conj(C2) T C2^T`, so `C2 <- sqrt(r) conj(T^{-1/2})`. Running out of iterations is
/// not an error; check `converged`. Singular `H(I)` or `T` is.
pub fn sinkhorn_normalize(h: &BlockMap, tol: f64, max_iter: usize) -> Result<ScalingResult> {
    h.require_square()?;
    let r = h.r;
    let rf = r as f64;
    let id = ComplexMatrix::identity(r);
    let mut cur = h.clone();
    let mut c1 = id.clone();
    let mut c2 = id.clone();
    let mut iterations = 0;
    let mut residual = cur.normalization_residual();
    while residual >= tol && iterations < max_iter {
        let l = cur.image_of_identity().scale_real(1.0 / rf);
        let left = inv_sqrt(&l.checked_hermitian_part()?)?;
        cur = scale(&cur, &left, &id)?;
        c1 = matmul(&left, &c1)?;

        let t = cur.trace_matrix();
        let right = inv_sqrt(&t.checked_hermitian_part()?)?
            .conj()
            .scale_real(rf.sqrt());
        cur = scale(&cur, &id, &right)?;
        c2 = matmul(&right, &c2)?;

        iterations += 1;
        residual = cur.normalization_residual();
    }
    Ok(ScalingResult {
        scaled: cur,
        c1,
        c2,
        iterations,
        residual,
        converged: residual < tol,
    })
}

/// [`sinkhorn_normalize`] after a positivity certificate on `PRECHECK_GRID` points;
/// maps that are not strictly positive are rejected up front.
pub fn sinkhorn_normalize_checked(
    h: &BlockMap,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<ScalingResult> {
    h.require_square()?;
    let cert = positivity_certificate(h, PRECHECK_GRID, seed);
    if !(cert.min_eig > POSITIVITY_FLOOR) {
        return Err(Error::NotStrictlyPositive {
            min_eig: cert.min_eig,
        });
    }
    sinkhorn_normalize(h, tol, max_iter)
}
