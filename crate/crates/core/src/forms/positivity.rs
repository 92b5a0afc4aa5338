use rayon::prelude::*;
use serde::Serialize;

use super::{canonical_volume_factor, i_pow, wedge_sign, Form, MultiIndex};
use crate::error::{Error, Result};
use crate::hermitian::{det, ComplexMatrix, C64, ONE, ZERO};
use crate::perm;
use crate::sphere::{block_rng, blocks, unit_vector};

pub const POSITIVITY_BLOCK_SIZE: usize = 4096;

/// Smallest sampled volume coefficient and the covectors `beta_1, .., beta_q` attaining it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakPositivity {
    pub min_coeff: f64,
    pub witness: Vec<Vec<C64>>,
    pub samples: usize,
}

/// Precomputed pairing `beta -> tau(u ^ i^{q^2} beta ^ conj(beta))` for a `(p, p)`-form.
struct PairingPlan {
    n: usize,
    q: usize,
    subsets: Vec<Vec<usize>>,
    // (K, L, weight): tau = sum weight * b_K * conj(b_L)
    terms: Vec<(usize, usize, C64)>,
}

impl PairingPlan {
    fn new(u: &Form) -> Result<Self> {
        let (p, pq) = u.bidegree();
        let n = u.n();
        if p != pq || p > n {
            return Err(Error::Bidegree(format!(
                "weak positivity needs a (p, p)-form with p <= n, got ({p}, {pq}) on C^{n}"
            )));
        }
        let q = n - p;
        let subsets = perm::combinations(n, q);
        let masks: Vec<MultiIndex> = subsets
            .iter()
            .map(|s| MultiIndex::new(s).expect("increasing"))
            .collect();
        let scale = i_pow(q * q) / canonical_volume_factor(n);
        let mut terms = Vec::new();
        for (ki, &k) in masks.iter().enumerate() {
            for (li, &l) in masks.iter().enumerate() {
                let c = u.coeff(k.complement(n), l.complement(n));
                if c == ZERO {
                    continue;
                }
                let sign = wedge_sign((k.complement(n), l.complement(n)), (k, l))
                    .expect("complements are disjoint");
                terms.push((ki, li, c * scale * sign));
            }
        }
        Ok(PairingPlan {
            n,
            q,
            subsets,
            terms,
        })
    }

    fn evaluate(&self, covectors: &[Vec<C64>]) -> C64 {
        // b_K = q x q minor of the covector matrix on columns K
        let b: Vec<C64> = self
            .subsets
            .iter()
            .map(|k| {
                if self.q == 0 {
                    return ONE;
                }
                let data = covectors
                    .iter()
                    .flat_map(|beta| k.iter().map(|&c| beta[c]))
                    .collect();
                det(&ComplexMatrix::from_row_major(self.q, data).expect("q x q"))
            })
            .collect();
        self.terms
            .iter()
            .map(|&(k, l, w)| w * b[k] * b[l].conj())
            .sum()
    }
}

/// Volume coefficient of `u ^ i^{q^2} beta ^ conj(beta)` for `beta = beta_1 ^ .. ^ beta_q`.
pub fn positivity_pairing(u: &Form, covectors: &[Vec<C64>]) -> Result<C64> {
    let plan = PairingPlan::new(u)?;
    if covectors.len() != plan.q {
        return Err(Error::DimensionMismatch {
            expected: plan.q,
            found: covectors.len(),
        });
    }
    if let Some(bad) = covectors.iter().find(|c| c.len() != plan.n) {
        return Err(Error::DimensionMismatch {
            expected: plan.n,
            found: bad.len(),
        });
    }
    Ok(plan.evaluate(covectors))
}

/// Samples decomposable `beta` from unit Gaussian covectors and returns the
/// smallest `tau`. For `p = n` the answer is the volume coefficient of `u` itself.
pub fn weak_positivity_min(u: &Form, samples: usize, seed: u64) -> Result<WeakPositivity> {
    let plan = PairingPlan::new(u)?;
    if plan.q == 0 {
        return Ok(WeakPositivity {
            min_coeff: plan.evaluate(&[]).re,
            witness: Vec::new(),
            samples: 1,
        });
    }
    if samples == 0 {
        return Err(Error::NoSamples);
    }
    let per_block: Vec<(f64, Vec<Vec<C64>>)> = blocks(samples, POSITIVITY_BLOCK_SIZE)
        .into_par_iter()
        .map(|(block, count)| {
            let mut rng = block_rng(seed, block);
            let mut best = (f64::INFINITY, Vec::new());
            for _ in 0..count {
                let covectors: Vec<Vec<C64>> =
                    (0..plan.q).map(|_| unit_vector(&mut rng, plan.n)).collect();
                let tau = plan.evaluate(&covectors).re;
                if tau < best.0 {
                    best = (tau, covectors);
                }
            }
            best
        })
        .collect();
    let (min_coeff, witness) = per_block
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one block");
    Ok(WeakPositivity {
        min_coeff,
        witness,
        samples,
    })
}
