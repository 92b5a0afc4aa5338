use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CurvatureTensor, EvenForm, Form};
use crate::error::{Error, Result};
use crate::hermitian::C64;
use crate::perm;

/// Largest fiber rank accepted by [`chern_forms`].
pub const MAX_CHERN_RANK: usize = 6;

/// `i / (2 pi)`.
fn chern_factor() -> C64 {
    C64::new(0.0, 1.0 / (2.0 * PI))
}

/// Chern forms `c_0 = 1, c_1, ..`, kept up to degree `min(rank, n)`;
/// higher `c_k` vanish on `C^n` or by rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernForms {
    rank: usize,
    forms: Vec<Form>,
}

impl ChernForms {
    pub fn new(rank: usize, forms: Vec<Form>) -> Result<Self> {
        let n = forms
            .first()
            .map(Form::n)
            .ok_or(Error::Empty("Chern forms"))?;
        if forms.len() != rank.min(n) + 1 {
            return Err(Error::Bidegree(format!(
                "rank {rank} on C^{n} needs {} Chern forms, got {}",
                rank.min(n) + 1,
                forms.len()
            )));
        }
        for (k, f) in forms.iter().enumerate() {
            if f.n() != n || f.bidegree() != (k, k) {
                return Err(Error::Bidegree(format!(
                    "c_{k} has bidegree {:?}",
                    f.bidegree()
                )));
            }
        }
        Ok(ChernForms { rank, forms })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n(&self) -> usize {
        self.forms[0].n()
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    /// `c_k`, or `None` when it vanishes identically (`k < 0` or beyond the stored range).
    pub fn get(&self, k: isize) -> Option<&Form> {
        usize::try_from(k).ok().and_then(|k| self.forms.get(k))
    }

    /// `c_k` as a form; zero of bidegree `(k, k)` past the stored range.
    pub fn component(&self, k: usize) -> Result<Form> {
        match self.forms.get(k) {
            Some(f) => Ok(f.clone()),
            None => Form::zero(self.n(), k, k),
        }
    }
}

/// `det(Id + (i/2pi) R)` over the commutative ring of even forms, by Leibniz over `S_r`.
pub fn chern_forms(rt: &CurvatureTensor) -> Result<ChernForms> {
    let (r, n) = (rt.rank(), rt.dim());
    if r > MAX_CHERN_RANK {
        return Err(Error::TooLarge {
            what: "Chern forms rank",
            size: r,
            limit: MAX_CHERN_RANK,
        });
    }
    if n > super::MAX_FORM_DIM {
        return Err(Error::TooLarge {
            what: "base dimension",
            size: n,
            limit: super::MAX_FORM_DIM,
        });
    }
    let drift = rt.symmetry_drift();
    if drift > super::curvature::CURVATURE_SYMMETRY_TOL {
        return Err(Error::CurvatureAsymmetry { drift });
    }

    let one = EvenForm::from_homogeneous(&Form::one(n));
    let entries: Vec<Vec<EvenForm>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let mut e =
                        EvenForm::from_homogeneous(&rt.entry_form(i, j).scale(chern_factor()));
                    if i == j {
                        e.add_scaled(1.0, &one);
                    }
                    e
                })
                .collect()
        })
        .collect();

    let mut total = EvenForm::zero(n);
    for p in perm::cached(r) {
        let mut prod = one.clone();
        for (i, &j) in p.perm.iter().enumerate() {
            prod = prod.mul(&entries[i][j]);
        }
        total.add_scaled(p.sign_f64(), &prod);
    }
    let forms = (0..=r.min(n))
        .map(|k| total.part(k).expect("k <= n").clone())
        .collect();
    ChernForms::new(r, forms)
}

/// A weakly decreasing tuple of nonnegative integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("empty".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} is not weakly decreasing"
            )));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Comma-separated parts, e.g. `2,1,0`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidPartition(format!("{s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// `P_lambda = det(c_{lambda_i - i + j})`, a determinant of size `len(lambda)`.
pub fn schur_form(cs: &ChernForms, lam: &Partition) -> Result<Form> {
    let n = cs.n();
    let k = lam.parts().len();
    let weight = lam.weight();
    if lam.parts()[0] > cs.rank() {
        return Err(Error::InvalidPartition(format!(
            "{lam}: largest part exceeds rank {}",
            cs.rank()
        )));
    }
    if weight > n {
        return Err(Error::InvalidPartition(format!(
            "{lam}: weight exceeds n = {n}"
        )));
    }
    if k > perm::MAX_CACHED {
        return Err(Error::TooLarge {
            what: "partition length",
            size: k,
            limit: perm::MAX_CACHED,
        });
    }
    // integer coefficient of each monomial c_{m_1} .. c_{m_k} (m sorted, zeros dropped)
    let mut monomials: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
    for p in perm::cached(k) {
        let mut idx = Vec::with_capacity(k);
        let mut vanishes = false;
        for (i, &j) in p.perm.iter().enumerate() {
            let m = lam.parts()[i] as isize - i as isize + j as isize;
            if cs.get(m).is_none() {
                vanishes = true;
                break;
            }
            if m > 0 {
                idx.push(m as usize);
            }
        }
        if !vanishes {
            idx.sort_unstable();
            *monomials.entry(idx).or_default() += i64::from(p.sign);
        }
    }
    let mut out = Form::zero(n, weight, weight)?;
    for (idx, coeff) in monomials {
        if coeff == 0 {
            continue;
        }
        let mut prod = Form::one(n);
        for m in idx {
            prod = prod.wedge(&cs.forms()[m])?;
        }
        out = out.add_scaled(C64::new(coeff as f64, 0.0), &prod)?;
    }
    Ok(out)
}

/// `(i/2pi)^3` times the sum of all 3x3 principal minors of the form-valued matrix
/// `(R)^i_j = R_{j ibar}`; equals `c_3` for an orthonormal frame.
pub fn c3_principal_minors(rt: &CurvatureTensor) -> Result<Form> {
    let (r, n) = (rt.rank(), rt.dim());
    if r < 3 {
        return Err(Error::WrongRank {
            expected: "rank >= 3",
            found: r,
        });
    }
    if n < 3 {
        return Form::zero(n, 3, 3);
    }
    let mut out = Form::zero(n, 3, 3)?;
    for subset in perm::combinations(r, 3) {
        // m[a][b] = R_{s_b sbar_a}
        let m: Vec<Vec<Form>> = (0..3)
            .map(|a| {
                (0..3)
                    .map(|b| rt.entry_form(subset[b], subset[a]))
                    .collect()
            })
            .collect();
        for p in perm::cached(3) {
            let term = m[0][p.perm[0]]
                .wedge(&m[1][p.perm[1]])?
                .wedge(&m[2][p.perm[2]])?;
            out = out.add_scaled(C64::new(p.sign_f64(), 0.0), &term)?;
        }
    }
    let f = chern_factor();
    Ok(out.scale(f * f * f))
}

/// `i sum_k dz^k ^ dzbar^k`.
pub fn standard_kahler_form(n: usize) -> Form {
    Form::from_matrix_11(n, |a, b| {
        if a == b {
            C64::new(0.0, 1.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Chern forms of `E (x) L` for rank-3 `E` and `c_1(L) = -eps omega`:
/// `c1 - 3 eps w`, `c2 - 2 eps w c1 + 3 eps^2 w^2`, `c3 - eps w c2 + eps^2 w^2 c1 - eps^3 w^3`.
pub fn twist_chern(cs: &ChernForms, eps: f64, omega: &Form) -> Result<ChernForms> {
    if cs.rank() != 3 {
        return Err(Error::WrongRank {
            expected: "rank 3",
            found: cs.rank(),
        });
    }
    let n = cs.n();
    if omega.bidegree() != (1, 1) || omega.n() != n {
        return Err(Error::Bidegree(format!(
            "twist needs a (1,1)-form on C^{n}, got {:?} on C^{}",
            omega.bidegree(),
            omega.n()
        )));
    }
    let top = cs.forms().len() - 1;
    // w^k, or None past the top degree
    let mut powers = vec![Some(Form::one(n))];
    for k in 1..=3 {
        let next = match &powers[k - 1] {
            Some(prev) if k <= top => Some(prev.wedge(omega)?),
            _ => None,
        };
        powers.push(next);
    }
    let coeff = |c: f64| C64::new(c, 0.0);
    // c_k(E (x) L) = sum_j binom(3 - j, k - j) c_j (-eps w)^(k - j)
    let binom = |a: usize, b: usize| -> f64 {
        match (a, b) {
            (_, 0) => 1.0,
            (3, 1) => 3.0,
            (3, 2) => 3.0,
            (2, 1) => 2.0,
            (a, b) if a == b => 1.0,
            _ => 0.0,
        }
    };
    let mut forms = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let mut acc = Form::zero(n, k, k)?;
        for j in 0..=k {
            let (Some(cj), Some(wp)) = (cs.get(j as isize), &powers[k - j]) else {
                continue;
            };
            let s = binom(3 - j, k - j) * (-eps).powi((k - j) as i32);
            acc = acc.add_scaled(coeff(s), &cj.wedge(wp)?)?;
        }
        forms.push(acc);
    }
    ChernForms::new(3, forms)
}
