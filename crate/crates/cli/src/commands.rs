use anyhow::{bail, ensure, Context};
use serde::Serialize;

use mixdisc::discriminants::{moment_exact, moment_mc};
use mixdisc::forms::{
    chern_forms, random_griffiths_curvature, schur_form, weak_positivity_min, WeakPositivity,
};
use mixdisc::phi::{
    phi_direct, phi_dual, phi_integral_r2, phi_integral_r3, phi_r4_decomposition,
    MAX_PHI_DIRECT_RANK, MAX_PHI_DUAL_RANK, NORMALIZATION_TOL,
};
use mixdisc::posmap::{
    choi_fixture_with_margin, identity_map, random_kraus_map, sinkhorn_normalize_checked,
    trace_map, transpose_map,
};
use mixdisc::verify::{check_fixture, run_all, CriterionReport, VerifyConfig};
use mixdisc::{
    BlockMap, ComplexMatrix, CurvatureTensor, Form, MonteCarloEstimate, Partition, PhiReport, C64,
};

use crate::io::{emit, input_path, read_block_map, read_json};
use crate::{GenKind, MethodArg, RunConfig, Status};

/// Methods of `phi --method all` must agree this closely.
pub const AGREEMENT_TOL: f64 = 1e-8;

pub fn gen(
    cfg: &RunConfig,
    kind: GenKind,
    rank: usize,
    dim: Option<usize>,
    terms: usize,
    eps: Option<f64>,
) -> anyhow::Result<Status> {
    ensure!(rank >= 1, "--rank must be at least 1");
    let square = |what: &str| -> anyhow::Result<()> {
        if let Some(d) = dim {
            ensure!(d == rank, "{what} maps are square: --dim must equal --rank");
        }
        Ok(())
    };
    match kind {
        GenKind::Curvature => {
            let rt = random_griffiths_curvature(
                rank,
                dim.unwrap_or(rank),
                terms,
                eps.unwrap_or(0.1),
                cfg.seed,
            )?;
            emit(cfg, &rt)?;
            return Ok(Status::Ok);
        }
        GenKind::Kraus => square("kraus")?,
        GenKind::Choi => {
            ensure!(rank == 3, "the Choi fixture has rank 3");
            square("choi")?;
        }
        GenKind::Identity | GenKind::Transpose => square("identity and transpose")?,
        GenKind::Trace => {}
    }
    let h: BlockMap = match kind {
        GenKind::Kraus => random_kraus_map(rank, terms, eps.unwrap_or(0.1), cfg.seed)?,
        GenKind::Choi => choi_fixture_with_margin(eps.unwrap_or(0.0)),
        GenKind::Trace => trace_map(rank, dim.unwrap_or(rank)),
        GenKind::Identity => identity_map(rank),
        GenKind::Transpose => transpose_map(rank),
        GenKind::Curvature => unreachable!(),
    };
    emit(cfg, &h)?;
    Ok(Status::Ok)
}

pub fn scale(cfg: &RunConfig) -> anyhow::Result<Status> {
    let h = read_block_map(input_path(cfg)?)?;
    let res = sinkhorn_normalize_checked(&h, cfg.tol, cfg.max_iter, cfg.seed)?;
    emit(cfg, &res)?;
    if res.converged {
        Ok(Status::Ok)
    } else {
        eprintln!(
            "scaling did not converge in {} iterations (residual {:.3e}, target {:.1e})",
            res.iterations, res.residual, cfg.tol
        );
        Ok(Status::NotConverged)
    }
}

#[derive(Serialize)]
struct MethodReport {
    #[serde(flatten)]
    report: PhiReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    integral_part: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q_part: Option<f64>,
}

impl From<PhiReport> for MethodReport {
    fn from(report: PhiReport) -> Self {
        MethodReport {
            report,
            integral_part: None,
            q_part: None,
        }
    }
}

#[derive(Serialize)]
struct AllReport {
    r: usize,
    normalization_residual: f64,
    reports: Vec<MethodReport>,
    skipped: Vec<String>,
    max_diff: f64,
    agree: bool,
}

fn run_method(h: &BlockMap, method: MethodArg) -> anyhow::Result<MethodReport> {
    let name = match method {
        MethodArg::Direct => "direct",
        MethodArg::Dual => "dual",
        MethodArg::Integral => "integral",
        MethodArg::R4 => "r4",
        MethodArg::All => unreachable!(),
    };
    let out = match (method, h.r()) {
        (MethodArg::Direct, _) => phi_direct(h).map(MethodReport::from),
        (MethodArg::Dual, _) => phi_dual(h).map(MethodReport::from),
        (MethodArg::Integral, 2) => phi_integral_r2(h).map(MethodReport::from),
        (MethodArg::Integral, 3) => phi_integral_r3(h).map(MethodReport::from),
        (MethodArg::Integral, 4) | (MethodArg::R4, _) => {
            phi_r4_decomposition(h).map(|d| MethodReport {
                report: PhiReport::from(&d),
                integral_part: Some(d.integral_part),
                q_part: Some(d.q_part),
            })
        }
        (MethodArg::Integral, r) => bail!("method integral: no integral form for rank {r}"),
        (MethodArg::All, _) => unreachable!(),
    };
    out.with_context(|| format!("method {name}"))
}

pub fn phi(cfg: &RunConfig, method: MethodArg) -> anyhow::Result<Status> {
    let h = read_block_map(input_path(cfg)?)?;
    if method != MethodArg::All {
        emit(cfg, &run_method(&h, method)?)?;
        return Ok(Status::Ok);
    }
    h.require_square().context("method all")?;
    let r = h.r();
    let residual = h.normalization_residual();
    let normalized = residual < NORMALIZATION_TOL;
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    let mut consider = |m: MethodArg, applicable: bool, why: &str| -> anyhow::Result<()> {
        if applicable {
            reports.push(run_method(&h, m)?);
        } else {
            skipped.push(format!("{m:?}: {why}").to_lowercase());
        }
        Ok(())
    };
    consider(
        MethodArg::Direct,
        r <= MAX_PHI_DIRECT_RANK,
        "rank too large",
    )?;
    consider(MethodArg::Dual, r <= MAX_PHI_DUAL_RANK, "rank too large")?;
    let integral_why = if !(2..=4).contains(&r) {
        "no integral form at this rank"
    } else {
        "map is not normalized"
    };
    consider(
        MethodArg::Integral,
        (2..=4).contains(&r) && normalized,
        integral_why,
    )?;
    ensure!(
        !reports.is_empty(),
        "method all: no method applies to rank {r}"
    );
    let base = reports[0].report.value;
    let max_diff = reports
        .iter()
        .map(|m| (m.report.value - base).abs())
        .fold(0.0, f64::max);
    let agree = max_diff < AGREEMENT_TOL;
    emit(
        cfg,
        &AllReport {
            r,
            normalization_residual: residual,
            reports,
            skipped,
            max_diff,
            agree,
        },
    )?;
    if agree {
        Ok(Status::Ok)
    } else {
        eprintln!("methods disagree: max difference {max_diff:.3e} exceeds {AGREEMENT_TOL:.0e}");
        Ok(Status::VerificationFailed)
    }
}

#[derive(Serialize)]
struct SchurReport {
    partition: Partition,
    form: Form,
    weak_positivity: WeakPositivity,
}

pub fn schur(cfg: &RunConfig, partition: &str) -> anyhow::Result<Status> {
    let lam: Partition = partition.parse()?;
    let rt: CurvatureTensor = read_json(input_path(cfg)?)?;
    let cs = chern_forms(&rt)?;
    let form = schur_form(&cs, &lam)?;
    let weak_positivity = weak_positivity_min(&form, cfg.samples, cfg.seed)?;
    emit(
        cfg,
        &SchurReport {
            partition: lam,
            form,
            weak_positivity,
        },
    )?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct MomentReport {
    n: usize,
    r: usize,
    exact: C64,
    monte_carlo: MonteCarloEstimate,
    z_score: f64,
}

pub fn moment(cfg: &RunConfig) -> anyhow::Result<Status> {
    let us: Vec<ComplexMatrix> = read_json(input_path(cfg)?)?;
    ensure!(!us.is_empty(), "moment word is empty");
    let exact = moment_exact(&us)?;
    let mc = moment_mc(&us, cfg.samples, cfg.seed)?;
    let diff = (mc.estimate - exact).norm();
    let z_score = if diff == 0.0 { 0.0 } else { diff / mc.stderr };
    emit(
        cfg,
        &MomentReport {
            n: us.len(),
            r: us[0].dim(),
            exact,
            monte_carlo: mc,
            z_score,
        },
    )?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct VerifyReport {
    seed: u64,
    trials: Option<usize>,
    passed: bool,
    criteria: Vec<CriterionReport>,
}

pub fn verify(cfg: &RunConfig, trials: Option<usize>) -> anyhow::Result<Status> {
    let vc = VerifyConfig {
        seed: cfg.seed,
        trials,
    };
    let mut criteria = Vec::new();
    if let Some(path) = &cfg.input_path {
        let fixture = match read_block_map(path) {
            Ok(h) => check_fixture(&h, cfg.seed),
            Err(e) => CriterionReport {
                id: 0,
                name: "input fixture".into(),
                passed: false,
                instances: 0,
                measured: Default::default(),
                failure: Some(format!("{e:#}")),
            },
        };
        criteria.push(fixture);
    }
    criteria.extend(run_all(&vc).criteria);
    for c in &criteria {
        eprintln!("{}", c.line());
    }
    let failing: Vec<String> = criteria
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} {}", c.id, c.name))
        .collect();
    let passed = failing.is_empty();
    emit(
        cfg,
        &VerifyReport {
            seed: cfg.seed,
            trials,
            passed,
            criteria,
        },
    )?;
    if passed {
        Ok(Status::Ok)
    } else {
        eprintln!("verification failed: {}", failing.join(", "));
        Ok(Status::VerificationFailed)
    }
}
