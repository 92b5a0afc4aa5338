//! The double mixed discriminant
//! `Phi(H) = sum_sigma sgn(sigma) D(B_{1 sigma(1)bar}, .., B_{r sigma(r)bar})`
//! and its dual, spherical-integral and rank-four forms.

use serde::{Deserialize, Serialize};

use crate::discriminants::{mixed_discriminant_refs, moment_exact_refs, CycleTracePlan};
use crate::error::{Error, Result};
use crate::hermitian::{ComplexMatrix, C64, ZERO};
use crate::perm;
use crate::posmap::BlockMap;

pub const MAX_PHI_DIRECT_RANK: usize = 5;
pub const MAX_PHI_DUAL_RANK: usize = 4;
/// Integral forms require `normalization_residual` below this.
pub const NORMALIZATION_TOL: f64 = 1e-8;
pub const UNIT_TOL: f64 = 1e-12;
pub const OFF_DIAGONAL_TRACE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiMethod {
    Direct,
    Dual,
    IntegralR2,
    IntegralR3,
    R4Decomposition,
}

impl PhiMethod {
    pub fn name(self) -> &'static str {
        match self {
            PhiMethod::Direct => "direct",
            PhiMethod::Dual => "dual",
            PhiMethod::IntegralR2 => "integral_r2",
            PhiMethod::IntegralR3 => "integral_r3",
            PhiMethod::R4Decomposition => "r4_decomposition",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiReport {
    pub value: f64,
    #[serde(rename = "imag_residue")]
    pub imaginary_residue: f64,
    pub method: PhiMethod,
    /// `int det C(xi) dmu` for the rank-three integral form.
    pub lower_bound: Option<f64>,
}

impl PhiReport {
    fn new(z: C64, method: PhiMethod) -> Self {
        PhiReport {
            value: z.re,
            imaginary_residue: z.im.abs(),
            method,
            lower_bound: None,
        }
    }
}

fn require_rank(h: &BlockMap, r: usize) -> Result<()> {
    h.require_square()?;
    if h.r() != r {
        return Err(Error::WrongRank {
            expected: match r {
                2 => "r = 2",
                3 => "r = 3",
                _ => "r = 4",
            },
            found: h.r(),
        });
    }
    Ok(())
}

fn require_normalized(h: &BlockMap) -> Result<()> {
    let residual = h.normalization_residual();
    if !(residual < NORMALIZATION_TOL) {
        return Err(Error::NotNormalized {
            residual,
            tol: NORMALIZATION_TOL,
        });
    }
    Ok(())
}

fn signed_row_sum(r: usize, entry: impl Fn(usize, usize) -> ComplexMatrix) -> C64 {
    let table: Vec<ComplexMatrix> = (0..r * r).map(|k| entry(k / r, k % r)).collect();
    perm::cached(r)
        .iter()
        .map(|p| {
            let row: Vec<&ComplexMatrix> = p
                .perm
                .iter()
                .enumerate()
                .map(|(i, &j)| &table[i * r + j])
                .collect();
            mixed_discriminant_refs(&row) * p.sign_f64()
        })
        .sum()
}

pub fn phi_direct(h: &BlockMap) -> Result<PhiReport> {
    h.require_square()?;
    let r = h.r();
    if r > MAX_PHI_DIRECT_RANK {
        return Err(Error::TooLarge {
            what: "direct Phi rank",
            size: r,
            limit: MAX_PHI_DIRECT_RANK,
        });
    }
    let z = signed_row_sum(r, |i, j| h.block(i, j).clone());
    Ok(PhiReport::new(z, PhiMethod::Direct))
}

/// `(A_{p qbar})_{ij} = (B_{i jbar})_{pq}`.
pub fn dual_blocks(h: &BlockMap) -> Vec<Vec<ComplexMatrix>> {
    let (r, w) = (h.r(), h.w());
    (0..w)
        .map(|p| {
            (0..w)
                .map(|q| {
                    let data = (0..r * r).map(|k| h.block(k / r, k % r)[(p, q)]).collect();
                    ComplexMatrix::from_row_major(r, data).expect("r x r")
                })
                .collect()
        })
        .collect()
}

/// `(1/r!) sum_{gamma, pi} sgn(gamma) sgn(pi) D(A_{gamma(1) pi(1)bar}, ..)`.
pub fn phi_dual(h: &BlockMap) -> Result<PhiReport> {
    h.require_square()?;
    let r = h.r();
    if r > MAX_PHI_DUAL_RANK {
        return Err(Error::TooLarge {
            what: "dual Phi rank",
            size: r,
            limit: MAX_PHI_DUAL_RANK,
        });
    }
    let a = dual_blocks(h);
    let mut z = ZERO;
    for g in perm::cached(r) {
        // sum over pi of the rows permuted by gamma is a signed row sum again
        let inner = signed_row_sum(r, |i, j| a[g.perm[i]][j].clone());
        z += inner * g.sign_f64();
    }
    let z = z / perm::factorial(r) as f64;
    Ok(PhiReport::new(z, PhiMethod::Dual))
}

/// `C(xi)_{ij} = xi^* B_{i jbar} xi`.
pub fn c_matrix(h: &BlockMap, xi: &[C64]) -> Result<ComplexMatrix> {
    if xi.len() != h.w() {
        return Err(Error::DimensionMismatch {
            expected: h.w(),
            found: xi.len(),
        });
    }
    let norm = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= UNIT_TOL) {
        return Err(Error::NotUnit { norm });
    }
    let r = h.r();
    let data = (0..r * r)
        .map(|k| h.block(k / r, k % r).quad_form(xi))
        .collect();
    ComplexMatrix::from_row_major(r, data)
}

/// `int sigma_k(C(xi)) dmu(xi)`, exactly: every term of the principal-minor
/// expansion is a product of quadratic forms integrated by `moment_exact`.
pub fn integral_sigma(h: &BlockMap, k: usize) -> Result<C64> {
    h.require_square()?;
    let r = h.r();
    if k == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    if k > r {
        return Ok(ZERO);
    }
    let mut total = ZERO;
    for subset in perm::combinations(r, k) {
        for p in perm::cached(k) {
            let word: Vec<&ComplexMatrix> = (0..k)
                .map(|a| h.block(subset[a], subset[p.perm[a]]))
                .collect();
            total += moment_exact_refs(&word)? * p.sign_f64();
        }
    }
    Ok(total)
}

/// `int (4 - 3 det C(xi)) dmu` for normalized rank-two maps.
pub fn phi_integral_r2(h: &BlockMap) -> Result<PhiReport> {
    require_rank(h, 2)?;
    require_normalized(h)?;
    let z = 4.0 - integral_sigma(h, 2)? * 3.0;
    Ok(PhiReport::new(z, PhiMethod::IntegralR2))
}

/// `int (10 det C + 27 - 12 sigma_2(C)) dmu` for normalized rank-three maps;
/// `lower_bound` is `int det C dmu`.
pub fn phi_integral_r3(h: &BlockMap) -> Result<PhiReport> {
    require_rank(h, 3)?;
    require_normalized(h)?;
    let det_int = integral_sigma(h, 3)?;
    let z = det_int * 10.0 + 27.0 - integral_sigma(h, 2)? * 12.0;
    let mut rep = PhiReport::new(z, PhiMethod::IntegralR3);
    rep.lower_bound = Some(det_int.re);
    Ok(rep)
}

/// The rank-three integrand `10 det C + 27 - 12 sigma_2(C)` at one point.
pub fn r3_integrand(c: &ComplexMatrix) -> Result<f64> {
    if c.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: c.dim(),
        });
    }
    Ok(10.0 * crate::hermitian::det(c).re + 27.0 - 12.0 * sigma2(c))
}

fn sigma2(c: &ComplexMatrix) -> f64 {
    let n = c.dim();
    let mut s = ZERO;
    for i in 0..n {
        for j in i + 1..n {
            s += c[(i, i)] * c[(j, j)] - c[(i, j)] * c[(j, i)];
        }
    }
    s.re
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct R4Decomposition {
    pub integral_part: f64,
    pub q_part: f64,
    pub total: f64,
    pub imag_residue: f64,
}

/// `Q(U_1, .., U_4)`: sum over the six 4-cycles `tau` of `tr(U_1 U_tau(1) U_tau^2(1) U_tau^3(1))`.
pub fn q_functional(us: &[&ComplexMatrix]) -> C64 {
    four_cycle_plans().iter().map(|p| p.evaluate(us)).sum()
}

fn four_cycle_plans() -> &'static [CycleTracePlan] {
    use std::sync::OnceLock;
    static PLANS: OnceLock<Vec<CycleTracePlan>> = OnceLock::new();
    PLANS.get_or_init(|| {
        perm::cached(4)
            .iter()
            .map(|p| CycleTracePlan::new(p.perm.clone()))
            .filter(|plan| plan.cycles.len() == 1)
            .collect()
    })
}

/// `Phi = int (35 sigma_4(C) + 128 - (80/3) sigma_2(C)) dmu - (1/12) sum_sigma sgn(sigma) Q(B_{1 sigma(1)bar}, ..)`
/// for normalized rank-four maps.
pub fn phi_r4_decomposition(h: &BlockMap) -> Result<R4Decomposition> {
    require_rank(h, 4)?;
    require_normalized(h)?;
    let integral = integral_sigma(h, 4)? * 35.0 + 128.0 - integral_sigma(h, 2)? * (80.0 / 3.0);
    let mut q = ZERO;
    for p in perm::cached(4) {
        let row: Vec<&ComplexMatrix> = p
            .perm
            .iter()
            .enumerate()
            .map(|(i, &j)| h.block(i, j))
            .collect();
        q += q_functional(&row) * p.sign_f64();
    }
    let q = q * (-1.0 / 12.0);
    let total = integral + q;
    Ok(R4Decomposition {
        integral_part: integral.re,
        q_part: q.re,
        total: total.re,
        imag_residue: total.im.abs(),
    })
}

impl From<&R4Decomposition> for PhiReport {
    fn from(d: &R4Decomposition) -> Self {
        PhiReport {
            value: d.total,
            imaginary_residue: d.imag_residue,
            method: PhiMethod::R4Decomposition,
            lower_bound: None,
        }
    }
}

/// `(l1+l2+l3)^3 + 9 l1 l2 l3 - 4 (l1+l2+l3)(l1 l2 + l1 l3 + l2 l3)`, evaluated as
/// `(a-b)^2 (a+b-c) + c (a-c)(b-c)` with `a >= b >= c` so that rounding cannot push it below zero.
pub fn schur_delta(l1: f64, l2: f64, l3: f64) -> Result<f64> {
    for l in [l1, l2, l3] {
        if !(l >= 0.0) {
            return Err(Error::NegativeArgument(l));
        }
    }
    let mut v = [l1, l2, l3];
    v.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = v;
    Ok((a - b) * (a - b) * (a + b - c) + c * (a - c) * (b - c))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rank2Split {
    pub phi: f64,
    pub d_term: f64,
    pub norm_term: f64,
}

/// `Phi = D(B_{1 1bar}, B_{2 2bar}) + (1/2) ||B_{1 2bar}||^2` for rank two with `tr B_{1 2bar} = 0`.
pub fn rank2_norm_identity(h: &BlockMap) -> Result<Rank2Split> {
    require_rank(h, 2)?;
    let t = h.block(0, 1).trace();
    if t.norm() > OFF_DIAGONAL_TRACE_TOL {
        return Err(Error::OffDiagonalTrace(t.norm()));
    }
    let d_term = mixed_discriminant_refs(&[h.block(0, 0), h.block(1, 1)]).re;
    let f = h.block(0, 1).frobenius_norm();
    let norm_term = 0.5 * f * f;
    Ok(Rank2Split {
        phi: d_term + norm_term,
        d_term,
        norm_term,
    })
}
