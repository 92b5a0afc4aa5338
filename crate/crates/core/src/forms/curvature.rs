use serde::{Deserialize, Serialize};

use super::Form;
use crate::error::{Error, Result};
use crate::hermitian::{C64, ZERO};
use crate::sphere::{complex_gaussian, SampleRng};
use rand::SeedableRng;

/// Tolerance for `R[i][j][a][b] = conj(R[j][i][b][a])`.
pub const CURVATURE_SYMMETRY_TOL: f64 = 1e-12;

/// Pointwise Chern curvature `R_{i jbar a bbar}` in an orthonormal fiber frame:
/// fiber rank `rank`, base dimension `dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurvatureRepr", into = "CurvatureRepr")]
pub struct CurvatureTensor {
    rank: usize,
    dim: usize,
    entries: Vec<C64>,
}

impl CurvatureTensor {
    pub fn zeros(rank: usize, dim: usize) -> Self {
        CurvatureTensor {
            rank,
            dim,
            entries: vec![ZERO; rank * rank * dim * dim],
        }
    }

    /// Builds from `f(i, j, a, b)` and validates Hermitian symmetry.
    pub fn from_fn(
        rank: usize,
        dim: usize,
        f: impl Fn(usize, usize, usize, usize) -> C64,
    ) -> Result<Self> {
        let mut t = CurvatureTensor::zeros(rank, dim);
        for i in 0..rank {
            for j in 0..rank {
                for a in 0..dim {
                    for b in 0..dim {
                        let k = t.offset(i, j, a, b);
                        t.entries[k] = f(i, j, a, b);
                    }
                }
            }
        }
        t.validate()?;
        Ok(t)
    }

    fn offset(&self, i: usize, j: usize, a: usize, b: usize) -> usize {
        ((i * self.rank + j) * self.dim + a) * self.dim + b
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, a: usize, b: usize) -> C64 {
        self.entries[self.offset(i, j, a, b)]
    }

    pub fn symmetry_drift(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rank {
            for j in 0..self.rank {
                for a in 0..self.dim {
                    for b in 0..self.dim {
                        let d = self.get(i, j, a, b) - self.get(j, i, b, a).conj();
                        worst = worst.max(d.norm());
                    }
                }
            }
        }
        worst
    }

    fn validate(&self) -> Result<()> {
        let drift = self.symmetry_drift();
        if drift > CURVATURE_SYMMETRY_TOL || drift.is_nan() {
            return Err(Error::CurvatureAsymmetry { drift });
        }
        Ok(())
    }

    /// `R_{i jbar} = sum_{a,b} R[i][j][a][b] dz^a ^ dzbar^b`.
    pub fn entry_form(&self, i: usize, j: usize) -> Form {
        Form::from_matrix_11(self.dim, |a, b| self.get(i, j, a, b))
    }

    /// `sum R v^i conj(v^j) xi^a conj(xi^b)`; real for symmetric tensors.
    pub fn griffiths_pairing(&self, v: &[C64], xi: &[C64]) -> f64 {
        let mut s = ZERO;
        for i in 0..self.rank {
            for j in 0..self.rank {
                let vv = v[i] * v[j].conj();
                for a in 0..self.dim {
                    for b in 0..self.dim {
                        s += self.get(i, j, a, b) * vv * xi[a] * xi[b].conj();
                    }
                }
            }
        }
        s.re
    }

    /// `R + s * delta_ij * omega_ab`, for a `(1,1)`-form `omega` on the base.
    pub fn shift_by_form(&self, s: C64, omega: &Form) -> Result<CurvatureTensor> {
        if omega.bidegree() != (1, 1) || omega.n() != self.dim {
            return Err(Error::Bidegree(format!(
                "shift needs a (1,1)-form on C^{}",
                self.dim
            )));
        }
        let mut out = self.clone();
        for (ia, jb, v) in omega.terms() {
            let a = ia.entries()[0];
            let b = jb.entries()[0];
            for i in 0..self.rank {
                let k = out.offset(i, i, a, b);
                out.entries[k] += s * v;
            }
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct CurvatureRepr {
    rank: usize,
    dim: usize,
    #[serde(rename = "R")]
    r: Vec<Vec<Vec<Vec<C64>>>>,
}

impl TryFrom<CurvatureRepr> for CurvatureTensor {
    type Error = Error;

    fn try_from(c: CurvatureRepr) -> Result<Self> {
        let (rank, dim) = (c.rank, c.dim);
        let shape_ok = c.r.len() == rank
            && c.r.iter().all(|ri| {
                ri.len() == rank
                    && ri
                        .iter()
                        .all(|rij| rij.len() == dim && rij.iter().all(|ra| ra.len() == dim))
            });
        if !shape_ok {
            return Err(Error::Bidegree(format!(
                "curvature array is not {rank}x{rank}x{dim}x{dim}"
            )));
        }
        CurvatureTensor::from_fn(rank, dim, |i, j, a, b| c.r[i][j][a][b])
    }
}

impl From<CurvatureTensor> for CurvatureRepr {
    fn from(t: CurvatureTensor) -> Self {
        let r = (0..t.rank)
            .map(|i| {
                (0..t.rank)
                    .map(|j| {
                        (0..t.dim)
                            .map(|a| (0..t.dim).map(|b| t.get(i, j, a, b)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        CurvatureRepr {
            rank: t.rank,
            dim: t.dim,
            r,
        }
    }
}

/// `R = sum_s T^s_{ia} conj(T^s_{jb}) + eps delta_ij delta_ab` with Gaussian `T^s`.
/// Griffiths positive: the pairing is `sum_s |v^T T^s xi|^2 + eps |v|^2 |xi|^2`.
pub fn random_griffiths_curvature(
    r: usize,
    n: usize,
    m: usize,
    eps: f64,
    seed: u64,
) -> Result<CurvatureTensor> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::NonPositive {
            name: "eps",
            value: eps,
        });
    }
    let mut rng = SampleRng::seed_from_u64(seed);
    let ts: Vec<Vec<C64>> = (0..m)
        .map(|_| (0..r * n).map(|_| complex_gaussian(&mut rng)).collect())
        .collect();
    let mut out = CurvatureTensor::zeros(r, n);
    for i in 0..r {
        for j in 0..r {
            for a in 0..n {
                for b in 0..n {
                    let mut s = ZERO;
                    for t in &ts {
                        s += t[i * n + a] * t[j * n + b].conj();
                    }
                    if i == j && a == b {
                        s += eps;
                    }
                    let k = out.offset(i, j, a, b);
                    out.entries[k] = s;
                }
            }
        }
    }
    Ok(out)
}

/// Sub-tensor on the given 0-based fiber indices (kept in the given order).
pub fn restrict_fiber(rt: &CurvatureTensor, subset: &[usize]) -> Result<CurvatureTensor> {
    let mut seen = vec![false; rt.rank];
    for &s in subset {
        if s >= rt.rank || std::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidSubset(format!(
                "{subset:?} in a rank-{} tensor",
                rt.rank
            )));
        }
    }
    if subset.is_empty() {
        return Err(Error::InvalidSubset("empty subset".into()));
    }
    let mut out = CurvatureTensor::zeros(subset.len(), rt.dim);
    for (i, &si) in subset.iter().enumerate() {
        for (j, &sj) in subset.iter().enumerate() {
            for a in 0..rt.dim {
                for b in 0..rt.dim {
                    let k = out.offset(i, j, a, b);
                    out.entries[k] = rt.get(si, sj, a, b);
                }
            }
        }
    }
    Ok(out)
}
