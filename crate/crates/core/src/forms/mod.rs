//! Pointwise exterior algebra of `(p, q)`-forms on `C^n`.
//!
//! A form is stored in the frame `dz^I ^ dzbar^J`, holomorphic factors first,
//! with `I` and `J` strictly increasing. Multi-indices are bitmasks, so
//! Koszul signs reduce to popcounts. The canonical positive volume is
//! `i^n dz^1 ^ dzbar^1 ^ .. ^ dz^n ^ dzbar^n`; see [`Form::volume_coefficient`].

mod chern;
mod curvature;
mod positivity;

pub use chern::{
    c3_principal_minors, chern_forms, schur_form, standard_kahler_form, twist_chern, ChernForms,
    Partition,
};
pub use curvature::{random_griffiths_curvature, restrict_fiber, CurvatureTensor};
pub use positivity::{positivity_pairing, weak_positivity_min, WeakPositivity};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{C64, ONE, ZERO};

/// Largest ambient dimension supported by the bitmask encoding.
pub const MAX_FORM_DIM: usize = 16;

/// A strictly increasing set of 0-based indices, stored as a bitmask.
/// Serialized as the 1-based list of its entries.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(u32);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    pub fn from_mask(mask: u32) -> Self {
        MultiIndex(mask)
    }

    /// From 0-based entries; must be strictly increasing.
    pub fn new(entries: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        let mut prev: Option<usize> = None;
        for &e in entries {
            if e >= MAX_FORM_DIM || prev.is_some_and(|p| e <= p) {
                return Err(Error::InvalidMultiIndex(format!("{entries:?}")));
            }
            mask |= 1 << e;
            prev = Some(e);
        }
        Ok(MultiIndex(mask))
    }

    pub fn single(i: usize) -> Self {
        MultiIndex(1 << i)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn entries(self) -> Vec<usize> {
        (0..32).filter(|&i| self.0 & (1 << i) != 0).collect()
    }

    pub fn max_entry(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    pub fn complement(self, n: usize) -> Self {
        MultiIndex(!self.0 & ((1u32 << n) - 1))
    }

    pub fn is_disjoint(self, other: MultiIndex) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: MultiIndex) -> Self {
        MultiIndex(self.0 | other.0)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.entries())
    }
}

/// Sign of the permutation sorting the word `I` followed by `K` (disjoint).
pub(crate) fn merge_sign(i: MultiIndex, k: MultiIndex) -> f64 {
    let mut inversions = 0u32;
    let mut rest = k.0;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        rest &= rest - 1;
        // entries of I strictly greater than this entry of K
        inversions += (i.0 >> bit >> 1).count_ones();
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sign of `(dz^I ^ dzbar^J) ^ (dz^K ^ dzbar^L)` relative to
/// `dz^{I u K} ^ dzbar^{J u L}`, or `None` when the product vanishes.
pub(crate) fn wedge_sign(
    (i, j): (MultiIndex, MultiIndex),
    (k, l): (MultiIndex, MultiIndex),
) -> Option<f64> {
    if !i.is_disjoint(k) || !j.is_disjoint(l) {
        return None;
    }
    let cross = if (j.len() * k.len()) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    Some(cross * merge_sign(i, k) * merge_sign(j, l))
}

pub(crate) fn i_pow(k: usize) -> C64 {
    match k % 4 {
        0 => ONE,
        1 => C64::new(0.0, 1.0),
        2 => -ONE,
        _ => C64::new(0.0, -1.0),
    }
}

/// A `(p, q)`-form on `C^n` with complex coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormRepr", into = "FormRepr")]
pub struct Form {
    n: usize,
    p: usize,
    q: usize,
    coeffs: BTreeMap<(MultiIndex, MultiIndex), C64>,
}

impl Form {
    pub fn zero(n: usize, p: usize, q: usize) -> Result<Self> {
        if n > MAX_FORM_DIM || p > n || q > n {
            return Err(Error::DegreeOverflow { p, q, n });
        }
        Ok(Form {
            n,
            p,
            q,
            coeffs: BTreeMap::new(),
        })
    }

    /// The constant function 1 as a `(0, 0)`-form.
    pub fn one(n: usize) -> Self {
        let mut f = Form::zero(n, 0, 0).expect("(0,0) fits");
        f.coeffs.insert((MultiIndex::EMPTY, MultiIndex::EMPTY), ONE);
        f
    }

    /// Real `(1,1)`-form `sum_{a,b} h[a][b] dz^a ^ dzbar^b`.
    pub fn from_matrix_11(n: usize, h: impl Fn(usize, usize) -> C64) -> Self {
        let mut f = Form::zero(n, 1, 1).expect("(1,1) fits");
        for a in 0..n {
            for b in 0..n {
                let v = h(a, b);
                if v != ZERO {
                    f.coeffs
                        .insert((MultiIndex::single(a), MultiIndex::single(b)), v);
                }
            }
        }
        f
    }

    /// A `(1,0)`-form `sum_a c[a] dz^a`.
    pub fn covector(c: &[C64]) -> Self {
        let mut f = Form::zero(c.len(), 1, 0).expect("(1,0) fits");
        for (a, &v) in c.iter().enumerate() {
            if v != ZERO {
                f.coeffs
                    .insert((MultiIndex::single(a), MultiIndex::EMPTY), v);
            }
        }
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn coeff(&self, i: MultiIndex, j: MultiIndex) -> C64 {
        self.coeffs.get(&(i, j)).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, MultiIndex, C64)> + '_ {
        self.coeffs.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Adds `v` to the coefficient of `dz^I ^ dzbar^J`.
    pub fn add_term(&mut self, i: MultiIndex, j: MultiIndex, v: C64) -> Result<()> {
        if i.len() != self.p || j.len() != self.q {
            return Err(Error::Bidegree(format!(
                "term ({i:?}, {j:?}) in a ({}, {})-form",
                self.p, self.q
            )));
        }
        if i.max_entry().is_some_and(|m| m >= self.n) || j.max_entry().is_some_and(|m| m >= self.n)
        {
            return Err(Error::InvalidMultiIndex(format!(
                "({i:?}, {j:?}) on C^{}",
                self.n
            )));
        }
        self.accumulate(i, j, v);
        Ok(())
    }

    fn accumulate(&mut self, i: MultiIndex, j: MultiIndex, v: C64) {
        if v == ZERO {
            return;
        }
        let e = self.coeffs.entry((i, j)).or_insert(ZERO);
        *e += v;
        if *e == ZERO {
            self.coeffs.remove(&(i, j));
        }
    }

    fn check_same_shape(&self, other: &Form) -> Result<()> {
        if self.n != other.n || self.p != other.p || self.q != other.q {
            return Err(Error::Bidegree(format!(
                "({}, {}) on C^{} vs ({}, {}) on C^{}",
                self.p, self.q, self.n, other.p, other.q, other.n
            )));
        }
        Ok(())
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: C64, other: &Form) -> Result<Form> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (i, j, v) in other.terms() {
            out.accumulate(i, j, s * v);
        }
        Ok(out)
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.add_scaled(ONE, other)
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add_scaled(-ONE, other)
    }

    pub fn scale(&self, s: C64) -> Form {
        let mut out = Form {
            coeffs: BTreeMap::new(),
            ..*self
        };
        for (i, j, v) in self.terms() {
            out.accumulate(i, j, s * v);
        }
        out
    }

    pub fn scale_real(&self, s: f64) -> Form {
        self.scale(C64::new(s, 0.0))
    }

    /// Exterior product. Fails when the result would exceed bidegree `(n, n)`.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut out = Form::zero(self.n, self.p + other.p, self.q + other.q)?;
        let mut contributions: BTreeMap<(MultiIndex, MultiIndex), Vec<C64>> = BTreeMap::new();
        for (&(i, j), &a) in &self.coeffs {
            for (&(k, l), &b) in &other.coeffs {
                if let Some(sign) = wedge_sign((i, j), (k, l)) {
                    contributions
                        .entry((i.union(k), j.union(l)))
                        .or_default()
                        .push(a * b * sign);
                }
            }
        }
        // summing in value order makes u ^ v and v ^ u agree bit for bit on even forms
        for ((i, j), mut vals) in contributions {
            vals.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
            out.accumulate(i, j, vals.into_iter().sum());
        }
        Ok(out)
    }

    /// Complex conjugate, a `(q, p)`-form.
    pub fn conjugate(&self) -> Form {
        let sign = if (self.p * self.q) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        Form {
            n: self.n,
            p: self.q,
            q: self.p,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&(i, j), &v)| ((j, i), v.conj() * sign))
                .collect(),
        }
    }

    /// Largest violation of `c[J, I] = (-1)^p conj(c[I, J])`; zero for real forms.
    pub fn reality_defect(&self) -> f64 {
        if self.p != self.q {
            return f64::INFINITY;
        }
        let sign = if self.p % 2 == 0 { 1.0 } else { -1.0 };
        let mut worst: f64 = 0.0;
        for (&(i, j), &v) in &self.coeffs {
            worst = worst.max((self.coeff(j, i) - v.conj() * sign).norm());
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Form) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.sub(other)?.max_abs())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `tau` in `self = tau * i^n dz^1 ^ dzbar^1 ^ .. ^ dz^n ^ dzbar^n`, for a top form.
    pub fn volume_coefficient(&self) -> Result<C64> {
        if self.p != self.n || self.q != self.n {
            return Err(Error::Bidegree(format!(
                "volume coefficient of a ({}, {})-form on C^{}",
                self.p, self.q, self.n
            )));
        }
        let full = MultiIndex::EMPTY.complement(self.n);
        Ok(self.coeff(full, full) / canonical_volume_factor(self.n))
    }
}

/// Coefficient of `i^n dz^1 ^ dzbar^1 ^ .. ^ dz^n ^ dzbar^n` on `dz^{1..n} ^ dzbar^{1..n}`.
pub(crate) fn canonical_volume_factor(n: usize) -> C64 {
    // regrouping the interleaved word costs n(n-1)/2 transpositions
    let sign = if (n * (n.saturating_sub(1)) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    i_pow(n) * sign
}

#[derive(Serialize, Deserialize)]
struct FormEntry {
    #[serde(rename = "I")]
    i: Vec<usize>,
    #[serde(rename = "J")]
    j: Vec<usize>,
    val: C64,
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    n: usize,
    p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<usize>,
    entries: Vec<FormEntry>,
}

fn one_based(idx: MultiIndex) -> Vec<usize> {
    idx.entries().into_iter().map(|e| e + 1).collect()
}

fn from_one_based(entries: &[usize]) -> Result<MultiIndex> {
    if entries.contains(&0) {
        return Err(Error::InvalidMultiIndex(format!(
            "{entries:?} (indices are 1-based)"
        )));
    }
    let zero_based: Vec<usize> = entries.iter().map(|e| e - 1).collect();
    MultiIndex::new(&zero_based)
}

impl TryFrom<FormRepr> for Form {
    type Error = Error;

    fn try_from(r: FormRepr) -> Result<Self> {
        let mut f = Form::zero(r.n, r.p, r.q.unwrap_or(r.p))?;
        for e in r.entries {
            f.add_term(from_one_based(&e.i)?, from_one_based(&e.j)?, e.val)?;
        }
        Ok(f)
    }
}

impl From<Form> for FormRepr {
    fn from(f: Form) -> Self {
        FormRepr {
            n: f.n,
            p: f.p,
            q: (f.q != f.p).then_some(f.q),
            entries: f
                .terms()
                .map(|(i, j, val)| FormEntry {
                    i: one_based(i),
                    j: one_based(j),
                    val,
                })
                .collect(),
        }
    }
}

/// Inhomogeneous even form `sum_k u_k` with `u_k` of bidegree `(k, k)`,
/// multiplied in the commutative algebra of even forms (truncated above `n`).
#[derive(Clone, Debug)]
pub(crate) struct EvenForm {
    parts: Vec<Form>,
}

impl EvenForm {
    pub(crate) fn zero(n: usize) -> Self {
        EvenForm {
            parts: (0..=n)
                .map(|k| Form::zero(n, k, k).expect("k <= n"))
                .collect(),
        }
    }

    pub(crate) fn from_homogeneous(f: &Form) -> Self {
        let mut e = EvenForm::zero(f.n);
        let (p, q) = f.bidegree();
        debug_assert_eq!(p, q);
        e.parts[p] = f.clone();
        e
    }

    pub(crate) fn n(&self) -> usize {
        self.parts.len() - 1
    }

    pub(crate) fn part(&self, k: usize) -> Option<&Form> {
        self.parts.get(k)
    }

    pub(crate) fn add_scaled(&mut self, s: f64, other: &EvenForm) {
        for (a, b) in self.parts.iter_mut().zip(&other.parts) {
            *a = a.add_scaled(C64::new(s, 0.0), b).expect("same shape");
        }
    }

    pub(crate) fn mul(&self, other: &EvenForm) -> EvenForm {
        let n = self.n();
        let mut out = EvenForm::zero(n);
        for (a, fa) in self.parts.iter().enumerate() {
            if fa.num_terms() == 0 {
                continue;
            }
            for (b, fb) in other.parts.iter().enumerate().take(n + 1 - a) {
                if fb.num_terms() == 0 {
                    continue;
                }
                let w = fa.wedge(fb).expect("degree bounded by n");
                out.parts[a + b] = out.parts[a + b].add(&w).expect("same shape");
            }
        }
        out
    }
}
