//! The acceptance suite: eleven numbered checks over seeded random instances.
//!
//! Trial `t` of criterion `k` draws from a ChaCha stream seeded with `seed + t`
//! on stream `k`, so any single trial can be replayed in isolation.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::discriminants::{moment_exact, moment_mc};
use crate::error::{Error, Result};
use crate::forms::{
    c3_principal_minors, chern_forms, random_griffiths_curvature, schur_form, standard_kahler_form,
    twist_chern, weak_positivity_min, CurvatureTensor, Partition,
};
use crate::hermitian::{det, herm_eigvals, ComplexMatrix, C64};
use crate::phi::{
    c_matrix, phi_direct, phi_dual, phi_integral_r2, phi_integral_r3, phi_r4_decomposition,
    r3_integrand, rank2_norm_identity, schur_delta,
};
use crate::posmap::{
    choi_fixture, positivity_certificate, random_kraus_map, scale, sinkhorn_normalize, trace_map,
    BlockMap, POSITIVITY_FLOOR,
};
use crate::sphere::{gaussian_matrix, unit_vector, SampleRng};

pub const DEFAULT_SEED: u64 = 7;
pub const SINKHORN_TOL: f64 = 1e-11;
pub const SINKHORN_MAX_ITER: usize = 5000;
pub const MOMENT_SAMPLES: usize = 1_000_000;
pub const POSITIVITY_SAMPLES: usize = 10_000;
pub const CRITERIA: usize = 11;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Caps the number of random instances per criterion (full counts when `None`).
    pub trials: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            trials: None,
        }
    }
}

impl VerifyConfig {
    fn count(&self, full: usize) -> usize {
        self.trials.map_or(full, |t| t.clamp(1, full))
    }

    fn rng(&self, criterion: usize, trial: usize) -> SampleRng {
        let mut rng = SampleRng::seed_from_u64(self.seed.wrapping_add(trial as u64));
        rng.set_stream(criterion as u64);
        rng
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub instances: usize,
    pub measured: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let measured: Vec<String> = self
            .measured
            .iter()
            .map(|(k, v)| format!("{k}={v:.3e}"))
            .collect();
        let mut s = format!(
            "[{status}] {:>2} {} (n={}) {}",
            self.id,
            self.name,
            self.instances,
            measured.join(" ")
        );
        if let Some(f) = &self.failure {
            s.push_str(&format!(" :: {f}"));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub trials: Option<usize>,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

impl VerifySummary {
    pub fn failing(&self) -> Vec<&CriterionReport> {
        self.criteria.iter().filter(|c| !c.passed).collect()
    }
}

/// Running extremes of named measurements plus the first violation seen.
#[derive(Default)]
struct Tally {
    max: BTreeMap<&'static str, f64>,
    min: BTreeMap<&'static str, f64>,
    failure: Option<String>,
}

impl Tally {
    fn max(&mut self, key: &'static str, v: f64) {
        let e = self.max.entry(key).or_insert(f64::NEG_INFINITY);
        *e = if v.is_nan() { v } else { e.max(v) };
    }

    fn min(&mut self, key: &'static str, v: f64) {
        let e = self.min.entry(key).or_insert(f64::INFINITY);
        *e = if v.is_nan() { v } else { e.min(v) };
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok && self.failure.is_none() {
            self.failure = Some(msg());
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (k, v) in other.max {
            self.max(k, v);
        }
        for (k, v) in other.min {
            self.min(k, v);
        }
        if self.failure.is_none() {
            self.failure = other.failure;
        }
        self
    }
}

fn report(id: usize, name: &str, instances: usize, outcome: Result<Tally>) -> CriterionReport {
    match outcome {
        Ok(t) => {
            let mut measured = BTreeMap::new();
            for (k, v) in t.max {
                measured.insert(k.to_string(), v);
            }
            for (k, v) in t.min {
                measured.insert(k.to_string(), v);
            }
            CriterionReport {
                id,
                name: name.to_string(),
                passed: t.failure.is_none(),
                instances,
                measured,
                failure: t.failure,
            }
        }
        Err(e) => CriterionReport {
            id,
            name: name.to_string(),
            passed: false,
            instances,
            measured: BTreeMap::new(),
            failure: Some(e.to_string()),
        },
    }
}

/// Runs `trial` for `0..count` in parallel and merges the tallies in trial order.
fn sweep(count: usize, trial: impl Fn(usize) -> Result<Tally> + Sync + Send) -> Result<Tally> {
    let tallies: Vec<Result<Tally>> = (0..count).into_par_iter().map(trial).collect();
    let mut acc = Tally::default();
    for (i, t) in tallies.into_iter().enumerate() {
        match t {
            Ok(t) => acc = acc.merge(t),
            Err(e) => {
                acc.check(false, || format!("trial {i}: {e}"));
            }
        }
    }
    Ok(acc)
}

fn random_kraus(rng: &mut SampleRng, r: usize) -> Result<BlockMap> {
    let terms = rng.random_range(1..=r);
    let eps = rng.random_range(0.05..=0.5);
    random_kraus_map(r, terms, eps, rng.next_u64())
}

fn normalize(h: &BlockMap) -> Result<BlockMap> {
    let res = sinkhorn_normalize(h, SINKHORN_TOL, SINKHORN_MAX_ITER)?;
    if !res.converged {
        return Err(Error::NoConvergence {
            iterations: res.iterations,
            residual: res.residual,
        });
    }
    Ok(res.scaled)
}

fn random_curvature(rng: &mut SampleRng, r: usize, n: usize) -> Result<CurvatureTensor> {
    let m = rng.random_range(1..=4);
    let eps = rng.random_range(0.05..=0.5);
    random_griffiths_curvature(r, n, m, eps, rng.next_u64())
}

fn random_hermitian(rng: &mut SampleRng, dim: usize) -> ComplexMatrix {
    gaussian_matrix(rng, dim).hermitian_part()
}

/// 1. `Phi(trace map) = 1` for `r = 2, 3, 4` by every applicable method.
pub fn criterion_exact_fixed_point(_cfg: &VerifyConfig) -> CriterionReport {
    let outcome = (|| {
        let mut t = Tally::default();
        for r in 2..=4 {
            let h = trace_map(r, r);
            let mut values = vec![
                ("direct", phi_direct(&h)?.value),
                ("dual", phi_dual(&h)?.value),
            ];
            match r {
                2 => values.push(("integral_r2", phi_integral_r2(&h)?.value)),
                3 => values.push(("integral_r3", phi_integral_r3(&h)?.value)),
                _ => values.push(("r4_decomposition", phi_r4_decomposition(&h)?.total)),
            }
            for (method, v) in values {
                let err = (v - 1.0).abs();
                t.max("max_abs_err", err);
                t.check(err < 1e-12, || format!("r={r} {method}: Phi = {v}"));
            }
        }
        Ok(t)
    })();
    report(1, "trace-map fixed point", 3, outcome)
}

/// 2. Method agreement on normalized random Kraus maps.
pub fn criterion_method_agreement(cfg: &VerifyConfig) -> CriterionReport {
    let n23 = cfg.count(100);
    let n4 = cfg.count(25);
    let outcome = (|| {
        let mut acc = Tally::default();
        for r in [2usize, 3] {
            let t = sweep(n23, |trial| {
                let mut rng = cfg.rng(2, trial * 8 + r);
                let h = normalize(&random_kraus(&mut rng, r)?)?;
                let mut t = Tally::default();
                t.max("max_residual", h.normalization_residual());
                let d = phi_direct(&h)?.value;
                let dual = phi_dual(&h)?.value;
                let int = if r == 2 {
                    phi_integral_r2(&h)?.value
                } else {
                    phi_integral_r3(&h)?.value
                };
                t.max("max_dual_diff", (d - dual).abs());
                t.max("max_integral_diff", (d - int).abs());
                t.check((d - dual).abs() < 1e-9, || {
                    format!("r={r} trial {trial}: direct {d} vs dual {dual}")
                });
                t.check((d - int).abs() < 1e-9, || {
                    format!("r={r} trial {trial}: direct {d} vs integral {int}")
                });
                Ok(t)
            })?;
            acc = acc.merge(t);
        }
        let t = sweep(n4, |trial| {
            let mut rng = cfg.rng(2, trial * 8 + 4);
            let h = normalize(&random_kraus(&mut rng, 4)?)?;
            let mut t = Tally::default();
            t.max("max_residual", h.normalization_residual());
            let d = phi_direct(&h)?.value;
            let dec = phi_r4_decomposition(&h)?;
            let diff = (d - (dec.integral_part + dec.q_part)).abs();
            t.max("max_r4_diff", diff);
            t.min("min_q_part_r4", dec.q_part);
            t.max("max_q_part_r4", dec.q_part);
            t.check(diff < 1e-8, || {
                format!(
                    "r=4 trial {trial}: direct {d} vs decomposition {}",
                    dec.total
                )
            });
            Ok(t)
        })?;
        Ok(acc.merge(t))
    })();
    report(2, "method agreement", 2 * n23 + n4, outcome)
}

/// 3. `Phi(S_{C1,C2} H) = |det C1|^2 |det C2|^2 Phi(H)` at `r = 3`.
pub fn criterion_scaling_covariance(cfg: &VerifyConfig) -> CriterionReport {
    let n = cfg.count(100);
    let outcome = sweep(n, |trial| {
        let mut rng = cfg.rng(3, trial);
        let h = random_kraus(&mut rng, 3)?;
        let c1 = gaussian_matrix(&mut rng, 3);
        let c2 = gaussian_matrix(&mut rng, 3);
        let factor = det(&c1).norm_sqr() * det(&c2).norm_sqr();
        let lhs = phi_direct(&scale(&h, &c1, &c2)?)?.value;
        let rhs = factor * phi_direct(&h)?.value;
        let rel = (lhs - rhs).abs() / rhs.abs();
        let mut t = Tally::default();
        t.max("max_rel_err", rel);
        t.check(rel < 1e-8, || format!("trial {trial}: {lhs} vs {rhs}"));
        Ok(t)
    });
    report(3, "scaling covariance", n, outcome)
}

/// 4. `Phi >= 1` and `Phi = D(B11, B22) + |B12|^2 / 2` for normalized rank-two maps.
pub fn criterion_rank_two_bound(cfg: &VerifyConfig) -> CriterionReport {
    let n = cfg.count(1000);
    let outcome = sweep(n, |trial| {
        let mut rng = cfg.rng(4, trial);
        let h = normalize(&random_kraus(&mut rng, 2)?)?;
        let phi = phi_direct(&h)?.value;
        let split = rank2_norm_identity(&h)?;
        let mut t = Tally::default();
        t.min("min_phi", phi);
        t.min("min_norm_term", split.norm_term);
        let err = (split.phi - phi).abs();
        t.max("max_split_err", err);
        t.check(phi >= 1.0 - 1e-9, || format!("trial {trial}: Phi = {phi}"));
        t.check(split.norm_term >= 0.0, || {
            format!("trial {trial}: norm term {}", split.norm_term)
        });
        t.check(err < 1e-10, || {
            format!("trial {trial}: split {} vs Phi {phi}", split.phi)
        });
        Ok(t)
    });
    report(4, "rank-two bound", n, outcome)
}

/// 5. `Phi >= int det C > 0` for normalized rank-three maps, one in ten a Choi mixture.
pub fn criterion_rank_three_theorem(cfg: &VerifyConfig) -> CriterionReport {
    let n = cfg.count(1000);
    let choi = choi_fixture();
    let outcome = sweep(n, |trial| {
        let mut rng = cfg.rng(5, trial);
        let kraus = random_kraus(&mut rng, 3)?;
        let h = if trial % 10 == 9 {
            let t = rng.random_range(0.1..=0.9);
            choi.convex_mix(&kraus, t)?
        } else {
            kraus
        };
        let h = normalize(&h)?;
        let rep = phi_integral_r3(&h)?;
        let lb = rep.lower_bound.expect("rank three");
        let direct = phi_direct(&h)?.value;
        let mut t = Tally::default();
        t.min("min_lower_bound", lb);
        t.min("min_phi", direct);
        t.min("min_gap", direct.min(rep.value) - lb);
        t.check(lb > 0.0, || format!("trial {trial}: lower bound {lb}"));
        t.check(rep.value - lb >= -1e-9 && direct - lb >= -1e-9, || {
            format!(
                "trial {trial}: Phi = {direct} (integral {}) < lower bound {lb}",
                rep.value
            )
        });
        Ok(t)
    });
    report(5, "rank-three theorem", n, outcome)
}

/// 6. Monte Carlo moments agree with the exact trace formula; the `n = 2, r = 3` closed form.
pub fn criterion_moment_identities(cfg: &VerifyConfig) -> CriterionReport {
    let per = cfg.count(50);
    let configs = [(2usize, 2usize), (3, 2), (3, 3), (4, 4)];
    let outcome = (|| {
        let mut acc = Tally::default();
        for (ci, &(r, nw)) in configs.iter().enumerate() {
            let t = sweep(per, |trial| {
                let mut rng = cfg.rng(6, trial * configs.len() + ci);
                let us: Vec<ComplexMatrix> =
                    (0..nw).map(|_| random_hermitian(&mut rng, r)).collect();
                let exact = moment_exact(&us)?;
                let mc = moment_mc(&us, MOMENT_SAMPLES, rng.next_u64())?;
                let z = (mc.estimate - exact).norm() / mc.stderr;
                let mut t = Tally::default();
                t.max("max_z_score", z);
                t.check(z <= 5.0, || {
                    format!(
                        "(r,n)=({r},{nw}) trial {trial}: MC {} vs exact {exact} ({z:.2} stderr)",
                        mc.estimate
                    )
                });
                if (r, nw) == (3, 2) {
                    let closed = (us[0].trace() * us[1].trace() + (&us[0] * &us[1]).trace()) / 12.0;
                    let d = (closed - exact).norm();
                    t.max("max_closed_form_err", d);
                    t.check(d < 1e-12, || {
                        format!("trial {trial}: closed form {closed} vs {exact}")
                    });
                }
                Ok(t)
            })?;
            acc = acc.merge(t);
        }
        Ok(acc)
    })();
    report(6, "moment identities", per * configs.len(), outcome)
}

fn schur_identity_diffs(rt: &CurvatureTensor) -> Result<[f64; 3]> {
    let cs = chern_forms(rt)?;
    let [c1, c2, c3] = [1, 2, 3].map(|k| cs.forms()[k].clone());
    let c1c2 = c1.wedge(&c2)?;
    let p111 = c1
        .wedge(&c1)?
        .wedge(&c1)?
        .sub(&c1c2.scale_real(2.0))?
        .add(&c3)?;
    let p210 = c1c2.sub(&c3)?;
    let s = |p: &str| -> Result<crate::forms::Form> { schur_form(&cs, &p.parse::<Partition>()?) };
    Ok([
        s("1,1,1")?.max_abs_diff(&p111)?,
        s("2,1,0")?.max_abs_diff(&p210)?,
        s("3,0,0")?.max_abs_diff(&c3)?,
    ])
}

/// 7. Rank-three Schur forms equal their Chern expansions coefficient for coefficient.
pub fn criterion_schur_identities(cfg: &VerifyConfig) -> CriterionReport {
    let n = cfg.count(50);
    let outcome = sweep(n, |trial| {
        let mut rng = cfg.rng(7, trial);
        let rt = random_curvature(&mut rng, 3, 3)?;
        let diffs = schur_identity_diffs(&rt)?;
        let mut t = Tally::default();
        for (name, d) in ["(1,1,1)", "(2,1,0)", "(3,0,0)"].iter().zip(diffs) {
            t.max("max_coeff_diff", d);
            t.check(d == 0.0, || {
                format!("trial {trial}: P{name} differs by {d:e}")
            });
        }
        Ok(t)
    });
    report(7, "Schur-form identities", n, outcome)
}

/// 8. `c_3` as a sum of principal minors equals the Chern-form `c_3`.
pub fn criterion_principal_minors(cfg: &VerifyConfig) -> CriterionReport {
    let n = cfg.count(50);
    let outcome = sweep(n, |trial| {
        let mut rng = cfg.rng(8, trial);
        let r = 3 + trial % 3;
        let rt = random_curvature(&mut rng, r, 3)?;
        let d = c3_principal_minors(&rt)?.max_abs_diff(&chern_forms(&rt)?.forms()[3])?;
        let mut t = Tally::default();
        t.max("max_abs_diff", d);
        t.check(d <= 1e-11, || format!("trial {trial} (r={r}): diff {d:e}"));
        Ok(t)
    });
    report(8, "principal-minor identity", n, outcome)
}

const SWEEP_SCHUR: [&str; 6] = ["1,0,0", "1,1,0", "1,1,1", "2,0,0", "2,1,0", "3,0,0"];

/// 9. Sampled weak positivity of `c_3`, and of all Schur forms for `r = n = 3`.
pub fn criterion_weak_positivity(cfg: &VerifyConfig) -> CriterionReport {
    let configs = [(3usize, 3usize), (4, 3), (5, 3), (3, 4)];
    let per = cfg.count(50);
    let outcome = (|| {
        let mut acc = Tally::default();
        for (ci, &(r, n)) in configs.iter().enumerate() {
            let t = sweep(per, |trial| {
                let mut rng = cfg.rng(9, trial * configs.len() + ci);
                let rt = random_curvature(&mut rng, r, n)?;
                let cs = chern_forms(&rt)?;
                let mut forms = vec![("c3".to_string(), cs.component(3)?)];
                if (r, n) == (3, 3) {
                    for p in SWEEP_SCHUR {
                        forms.push((format!("P({p})"), schur_form(&cs, &p.parse()?)?));
                    }
                }
                let mut t = Tally::default();
                let seed = rng.next_u64();
                for (name, u) in forms {
                    let res = weak_positivity_min(&u, POSITIVITY_SAMPLES, seed)?;
                    t.min("min_coeff", res.min_coeff);
                    t.check(res.min_coeff > 0.0, || {
                        format!(
                            "(r,n)=({r},{n}) trial {trial}: {name} has tau = {:e} at {:?}",
                            res.min_coeff, res.witness
                        )
                    });
                }
                Ok(t)
            })?;
            acc = acc.merge(t);
        }
        Ok(acc)
    })();
    report(9, "weak-positivity sweep", per * configs.len(), outcome)
}

/// 10. Schur's inequality on a grid, its equality cases, and the pointwise integrand gap.
pub fn criterion_schur_inequality(cfg: &VerifyConfig) -> CriterionReport {
    let maps = cfg.count(10);
    let outcome = (|| {
        let mut t = Tally::default();
        let grid: Vec<f64> = (0..50).map(|k| 3.0 * k as f64 / 49.0).collect();
        for &a in &grid {
            for &b in &grid {
                for &c in &grid {
                    let d = schur_delta(a, b, c)?;
                    t.min("min_delta_grid", d);
                    t.check(d >= -1e-12, || format!("delta({a}, {b}, {c}) = {d:e}"));
                }
            }
            for (x, y, z) in [(a, a, a), (a, a, 0.0), (a, 0.0, a), (0.0, a, a)] {
                let d = schur_delta(x, y, z)?.abs();
                t.max("max_delta_equality", d);
                t.check(d < 1e-12, || {
                    format!("equality case ({x}, {y}, {z}): {d:e}")
                });
            }
        }
        let gaps = sweep(maps, |trial| {
            let mut rng = cfg.rng(10, trial);
            let h = normalize(&random_kraus(&mut rng, 3)?)?;
            let mut t = Tally::default();
            for _ in 0..100 {
                let xi = unit_vector(&mut rng, 3);
                let c = c_matrix(&h, &xi)?;
                let lam = herm_eigvals(&c)?;
                let gap = r3_integrand(&c)? - det(&c).re;
                let delta = schur_delta(lam[0].max(0.0), lam[1].max(0.0), lam[2].max(0.0))?;
                t.max("max_integrand_err", (gap - delta).abs());
                t.check((gap - delta).abs() < 1e-9, || {
                    format!("trial {trial}: gap {gap} vs delta {delta}")
                });
            }
            Ok(t)
        })?;
        Ok(t.merge(gaps))
    })();
    report(10, "Schur inequality", maps * 100, outcome)
}

/// 11. The twisted Chern forms match the curvature shift `R - eps (2 pi / i) omega Id`.
pub fn criterion_twist_expansion(cfg: &VerifyConfig) -> CriterionReport {
    let n = cfg.count(50);
    let omega = standard_kahler_form(3);
    let outcome = sweep(n, |trial| {
        let mut rng = cfg.rng(11, trial);
        let rt = random_curvature(&mut rng, 3, 3)?;
        let eps = rng.random_range(0.05..=1.0);
        let cs = chern_forms(&rt)?;
        let mut t = Tally::default();
        t.check(twist_chern(&cs, 0.0, &omega)? == cs, || {
            format!("trial {trial}: eps = 0 changed the forms")
        });
        let twisted = twist_chern(&cs, eps, &omega)?;
        // -eps (2 pi / i) = 2 pi i eps
        let shifted = rt.shift_by_form(C64::new(0.0, 2.0 * PI * eps), &omega)?;
        let direct = chern_forms(&shifted)?;
        for (a, b) in twisted.forms().iter().zip(direct.forms()) {
            let d = a.max_abs_diff(b)?;
            t.max("max_abs_diff", d);
            t.check(d < 1e-10, || format!("trial {trial}: diff {d:e}"));
        }
        Ok(t)
    });
    report(11, "twist expansion", n, outcome)
}

pub fn run_criterion(id: usize, cfg: &VerifyConfig) -> Option<CriterionReport> {
    Some(match id {
        1 => criterion_exact_fixed_point(cfg),
        2 => criterion_method_agreement(cfg),
        3 => criterion_scaling_covariance(cfg),
        4 => criterion_rank_two_bound(cfg),
        5 => criterion_rank_three_theorem(cfg),
        6 => criterion_moment_identities(cfg),
        7 => criterion_schur_identities(cfg),
        8 => criterion_principal_minors(cfg),
        9 => criterion_weak_positivity(cfg),
        10 => criterion_schur_inequality(cfg),
        11 => criterion_twist_expansion(cfg),
        _ => return None,
    })
}

pub fn run_all(cfg: &VerifyConfig) -> VerifySummary {
    let criteria: Vec<CriterionReport> = (1..=CRITERIA)
        .map(|id| run_criterion(id, cfg).expect("known id"))
        .collect();
    VerifySummary {
        seed: cfg.seed,
        trials: cfg.trials,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

/// Checks a user-supplied square block map: strict positivity, scaling, method
/// agreement and, for `r = 3`, the lower bound.
pub fn check_fixture(h: &BlockMap, seed: u64) -> CriterionReport {
    let outcome = (|| {
        let mut t = Tally::default();
        h.require_square()?;
        let cert = positivity_certificate(h, 10_000, seed);
        t.min("certificate_min_eig", cert.min_eig);
        t.check(cert.min_eig > POSITIVITY_FLOOR, || {
            format!(
                "not strictly positive: min eigenvalue {:e} at {:?}",
                cert.min_eig, cert.witness
            )
        });
        if t.failure.is_some() {
            return Ok(t);
        }
        let n = normalize(h)?;
        let d = phi_direct(&n)?.value;
        t.min("phi", d);
        let mut others = Vec::new();
        if n.r() <= 4 {
            others.push(phi_dual(&n)?.value);
        }
        match n.r() {
            2 => others.push(phi_integral_r2(&n)?.value),
            3 => {
                let rep = phi_integral_r3(&n)?;
                let lb = rep.lower_bound.expect("rank three");
                t.min("lower_bound", lb);
                t.check(lb > 0.0 && d - lb >= -1e-9, || {
                    format!("Phi = {d} vs lower bound {lb}")
                });
                others.push(rep.value);
            }
            4 => others.push(phi_r4_decomposition(&n)?.total),
            _ => {}
        }
        for o in others {
            t.max("max_method_diff", (o - d).abs());
            t.check((o - d).abs() < 1e-8, || {
                format!("methods disagree: {d} vs {o}")
            });
        }
        Ok(t)
    })();
    report(0, "input fixture", 1, outcome)
}
