//! Mixed discriminants and spherical trace moments.
//!
//! The mixed discriminant `D(A^1, .., A^r)` is the full polarization of the
//! determinant on `r x r` matrices. It is computed here by the permutation
//! sum over row-mixed determinants, and independently by extracting the
//! multilinear coefficient of `det(sum_k t_k A^k)`. For `r = 2, 3` the
//! classical trace expansions are provided as a third route.
//!
//! Spherical moments `int prod_i (xi* U_i xi) dmu(xi)` over the unit sphere
//! of `C^r` are evaluated exactly as `(1/(r)_n) sum_{pi in S_n} tr_pi(U)`,
//! with a seeded Monte Carlo estimator as cross-check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{det, ComplexMatrix, C64, ONE, ZERO};
use crate::perm::{self, cycles, factorial};
use crate::sphere::{self, block_rng};

pub const MAX_DISCRIMINANT_RANK: usize = 8;
pub const MAX_POLARIZED_RANK: usize = 6;
pub const MAX_MOMENT_WORD: usize = 6;

/// Samples per seed block in Monte Carlo estimators.
pub const MC_BLOCK_SIZE: usize = 16_384;

/// An `r`-tuple of `r x r` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    mats: Vec<ComplexMatrix>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<ComplexMatrix>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::Empty("matrix tuple"));
        }
        let r = mats.len();
        if let Some(bad) = mats.iter().find(|m| m.dim() != r) {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: bad.dim(),
            });
        }
        Ok(MatrixTuple { mats })
    }

    pub fn r(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[ComplexMatrix] {
        &self.mats
    }

    fn refs(&self) -> Vec<&ComplexMatrix> {
        self.mats.iter().collect()
    }
}

/// `(1/r!) sum_{sigma in S_r} det(M_sigma)` where row `i` of `M_sigma` is row
/// `i` of `A^{sigma(i)}`.
pub fn mixed_discriminant(t: &MatrixTuple) -> Result<C64> {
    if t.r() > MAX_DISCRIMINANT_RANK {
        return Err(Error::TooLarge {
            what: "mixed discriminant",
            size: t.r(),
            limit: MAX_DISCRIMINANT_RANK,
        });
    }
    Ok(mixed_discriminant_refs(&t.refs()))
}

/// Unchecked kernel: `mats.len() == r`, every matrix `r x r`, `r <= 8`.
pub(crate) fn mixed_discriminant_refs(mats: &[&ComplexMatrix]) -> C64 {
    let r = mats.len();
    let mut rows = Vec::with_capacity(r * r);
    let mut acc = ZERO;
    for p in perm::cached(r) {
        rows.clear();
        for (i, &k) in p.perm.iter().enumerate() {
            rows.extend_from_slice(mats[k].row(i));
        }
        let m = ComplexMatrix::from_row_major(r, rows.clone()).expect("square by construction");
        acc += det(&m);
    }
    acc / factorial(r) as f64
}

/// The `t_1 .. t_r` coefficient of `det(sum_k t_k A^k)` divided by `r!`,
/// extracted by inclusion-exclusion over the `2^r` corners `t in {0,1}^r`.
pub fn mixed_discriminant_polarized(t: &MatrixTuple) -> Result<C64> {
    let r = t.r();
    if r > MAX_POLARIZED_RANK {
        return Err(Error::TooLarge {
            what: "polarized mixed discriminant",
            size: r,
            limit: MAX_POLARIZED_RANK,
        });
    }
    let mut acc = ZERO;
    for mask in 0u32..(1 << r) {
        let mut s = ComplexMatrix::zeros(r);
        for (k, a) in t.mats().iter().enumerate() {
            if mask & (1 << k) != 0 {
                s.add_scaled(ONE, a);
            }
        }
        let missing = r - mask.count_ones() as usize;
        let sign = if missing % 2 == 0 { 1.0 } else { -1.0 };
        acc += det(&s) * sign;
    }
    Ok(acc / factorial(r) as f64)
}

fn require_dim(m: &ComplexMatrix, dim: usize) -> Result<()> {
    if m.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.dim(),
        });
    }
    Ok(())
}

/// `D(X, Y) = (tr X tr Y - tr XY) / 2` for `2 x 2` matrices.
pub fn trace_expansion_r2(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<C64> {
    require_dim(x, 2)?;
    require_dim(y, 2)?;
    Ok((x.trace() * y.trace() - (x * y).trace()) * 0.5)
}

/// Six-term trace formula for `D(U, V, W)` on `3 x 3` matrices.
pub fn trace_expansion_r3(u: &ComplexMatrix, v: &ComplexMatrix, w: &ComplexMatrix) -> Result<C64> {
    for m in [u, v, w] {
        require_dim(m, 3)?;
    }
    let (tu, tv, tw) = (u.trace(), v.trace(), w.trace());
    let uv = u * v;
    let uw = u * w;
    let vw = v * w;
    let six_d = tu * tv * tw - tu * vw.trace() - tv * uw.trace() - tw * uv.trace()
        + (&uv * w).trace()
        + (&uw * v).trace();
    Ok(six_d / 6.0)
}

/// The trace functional `tr_pi` for one permutation of a word of length `n`:
/// product over cycles of the trace of the matrices read along the cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleTracePlan {
    pub n: usize,
    pub permutation: Vec<usize>,
    pub cycles: Vec<Vec<usize>>,
}

impl CycleTracePlan {
    pub fn new(permutation: Vec<usize>) -> Self {
        let cycles = cycles(&permutation);
        CycleTracePlan {
            n: permutation.len(),
            permutation,
            cycles,
        }
    }

    pub fn evaluate(&self, us: &[&ComplexMatrix]) -> C64 {
        debug_assert_eq!(us.len(), self.n);
        let mut acc = ONE;
        for cycle in &self.cycles {
            let t = match cycle.as_slice() {
                [i] => us[*i].trace(),
                [i, j] => trace_of_product(us[*i], us[*j]),
                _ => {
                    let mut prod = us[cycle[0]].clone();
                    for &i in &cycle[1..cycle.len() - 1] {
                        prod = &prod * us[i];
                    }
                    trace_of_product(&prod, us[cycle[cycle.len() - 1]])
                }
            };
            acc *= t;
        }
        acc
    }
}

fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.dim();
    let mut t = ZERO;
    for i in 0..n {
        for k in 0..n {
            t += a[(i, k)] * b[(k, i)];
        }
    }
    t
}

fn cycle_plans(n: usize) -> &'static [CycleTracePlan] {
    use std::sync::OnceLock;
    static CACHE: [OnceLock<Vec<CycleTracePlan>>; MAX_MOMENT_WORD + 1] =
        [const { OnceLock::new() }; MAX_MOMENT_WORD + 1];
    CACHE[n].get_or_init(|| {
        perm::cached(n)
            .iter()
            .map(|p| CycleTracePlan::new(p.perm.clone()))
            .collect()
    })
}

/// Rising factorial `(r)_n = r (r+1) .. (r+n-1)`, exact.
pub fn rising_factorial(r: usize, n: usize) -> u64 {
    (0..n as u64).map(|k| r as u64 + k).product()
}

fn check_word(us: &[&ComplexMatrix]) -> Result<usize> {
    let first = us.first().ok_or(Error::Empty("moment word"))?;
    let r = first.dim();
    for u in us {
        require_dim(u, r)?;
    }
    Ok(r)
}

/// Exact spherical moment `int prod_i (xi* U_i xi) dmu(xi)` over `S^{2r-1}`.
pub fn moment_exact(us: &[ComplexMatrix]) -> Result<C64> {
    let refs: Vec<&ComplexMatrix> = us.iter().collect();
    moment_exact_refs(&refs)
}

pub(crate) fn moment_exact_refs(us: &[&ComplexMatrix]) -> Result<C64> {
    let r = check_word(us)?;
    let n = us.len();
    if n > MAX_MOMENT_WORD {
        return Err(Error::TooLarge {
            what: "moment word",
            size: n,
            limit: MAX_MOMENT_WORD,
        });
    }
    let sum: C64 = cycle_plans(n).iter().map(|p| p.evaluate(us)).sum();
    Ok(sum / rising_factorial(r, n) as f64)
}

/// A Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub estimate: C64,
    pub stderr: f64,
    pub samples: usize,
}

#[derive(Clone, Copy, Default)]
struct Moments {
    sum: C64,
    sum_sq: f64,
    count: usize,
}

impl Moments {
    fn push(&mut self, x: C64) {
        self.sum += x;
        self.sum_sq += x.norm_sqr();
        self.count += 1;
    }

    fn merge(self, other: Moments) -> Moments {
        Moments {
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
            count: self.count + other.count,
        }
    }

    fn finish(self) -> MonteCarloEstimate {
        let n = self.count as f64;
        let mean = self.sum / n;
        let stderr = if self.count < 2 {
            f64::INFINITY
        } else {
            let var = ((self.sum_sq - n * mean.norm_sqr()) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        };
        MonteCarloEstimate {
            estimate: mean,
            stderr,
            samples: self.count,
        }
    }
}

/// Monte Carlo estimate of the spherical moment. Samples are split into
/// blocks of [`MC_BLOCK_SIZE`], block `b` drawing from a generator seeded with
/// `seed + b`; block sums are merged in block order, so the result depends
/// only on `(seed, samples)`.
pub fn moment_mc(us: &[ComplexMatrix], samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    let refs: Vec<&ComplexMatrix> = us.iter().collect();
    let r = check_word(&refs)?;
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let partials: Vec<Moments> = sphere::blocks(samples, MC_BLOCK_SIZE)
        .into_par_iter()
        .map(|(block, count)| {
            let mut rng = block_rng(seed, block);
            let mut m = Moments::default();
            for _ in 0..count {
                let xi = sphere::unit_vector(&mut rng, r);
                let x = us.iter().fold(ONE, |acc, u| acc * u.quad_form(&xi));
                m.push(x);
            }
            m
        })
        .collect();
    let total = partials
        .into_iter()
        .fold(Moments::default(), Moments::merge);
    Ok(total.finish())
}

fn multi_index_digits(mut idx: usize, r: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for k in (0..n).rev() {
        d[k] = idx % r;
        idx /= r;
    }
    d
}

fn digits_to_index(d: &[usize], r: usize) -> usize {
    d.iter().fold(0, |acc, &x| acc * r + x)
}

/// Dimension of the `n`-th symmetric power of `C^r`.
pub fn symmetric_power_dim(r: usize, n: usize) -> u64 {
    rising_factorial(r, n) / factorial(n)
}

/// Orthogonal projector onto the symmetric subspace of `(C^r)^{(x) n}`,
/// built as the average of the `n!` tensor-factor permutation operators.
pub fn symmetric_projector(r: usize, n: usize) -> ComplexMatrix {
    let dim = r.pow(n as u32);
    let mut p = ComplexMatrix::zeros(dim);
    let w = 1.0 / factorial(n) as f64;
    for sigma in perm::permutations(n) {
        for col in 0..dim {
            let d = multi_index_digits(col, r, n);
            let permuted: Vec<usize> = sigma.perm.iter().map(|&k| d[k]).collect();
            let row = digits_to_index(&permuted, r);
            p[(row, col)] += C64::new(w, 0.0);
        }
    }
    p
}

/// Monte Carlo estimate of `dim(Sym^n) * int (xi xi*)^{(x) n} dmu(xi)`,
/// entry-wise, with per-entry standard errors (row-major).
#[derive(Clone, Debug)]
pub struct ProjectorEstimate {
    pub mean: ComplexMatrix,
    pub stderr: Vec<f64>,
}

pub fn symmetric_projector_mc(
    r: usize,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<ProjectorEstimate> {
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let dim = r.pow(n as u32);
    let scale = symmetric_power_dim(r, n) as f64;
    let partials: Vec<Vec<Moments>> = sphere::blocks(samples, MC_BLOCK_SIZE)
        .into_par_iter()
        .map(|(block, count)| {
            let mut rng = block_rng(seed, block);
            let mut acc = vec![Moments::default(); dim * dim];
            for _ in 0..count {
                let xi = sphere::unit_vector(&mut rng, r);
                // v = xi^{(x) n}, X = v v*
                let v: Vec<C64> = (0..dim)
                    .map(|i| {
                        multi_index_digits(i, r, n)
                            .iter()
                            .fold(ONE, |a, &k| a * xi[k])
                    })
                    .collect();
                for i in 0..dim {
                    for j in 0..dim {
                        acc[i * dim + j].push(v[i] * v[j].conj() * scale);
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![Moments::default(); dim * dim];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t = t.merge(p);
        }
    }
    let finished: Vec<MonteCarloEstimate> = total.into_iter().map(Moments::finish).collect();
    let mean = ComplexMatrix::from_row_major(dim, finished.iter().map(|e| e.estimate).collect())?;
    Ok(ProjectorEstimate {
        mean,
        stderr: finished.iter().map(|e| e.stderr).collect(),
    })
}
