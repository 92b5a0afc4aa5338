use mixdisc::discriminants::{
    mixed_discriminant, mixed_discriminant_polarized, moment_exact, trace_expansion_r2,
    trace_expansion_r3,
};
use mixdisc::forms::{
    c3_principal_minors, chern_forms, random_griffiths_curvature, restrict_fiber, schur_form,
    weak_positivity_min,
};
use mixdisc::hermitian::{det, herm_eigvals, matmul};
use mixdisc::perm::{combinations, permutations};
use mixdisc::phi::{phi_direct, phi_dual};
use mixdisc::posmap::{
    from_curvature, positivity_certificate, random_kraus_map, scale, sinkhorn_normalize,
};
use mixdisc::sphere::{gaussian_matrix, gaussian_vector, unit_vector, SampleRng};
use mixdisc::{ComplexMatrix, Form, MatrixTuple, MultiIndex, Partition, C64};
use proptest::prelude::*;
use rand::SeedableRng;

fn rng(seed: u64) -> SampleRng {
    SampleRng::seed_from_u64(seed)
}

fn hermitian(rng: &mut SampleRng, dim: usize) -> ComplexMatrix {
    gaussian_matrix(rng, dim).hermitian_part()
}

fn leibniz_det(a: &ComplexMatrix) -> C64 {
    let n = a.dim();
    permutations(n)
        .iter()
        .map(|p| {
            let prod: C64 = (0..n).map(|i| a.row(i)[p.perm[i]]).product();
            prod * p.sign_f64()
        })
        .sum()
}

fn naive_matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..n {
                s += a.row(i)[k] * b.row(k)[j];
            }
            data.push(s);
        }
    }
    ComplexMatrix::from_row_major(n, data).unwrap()
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matmul_matches_triple_loop(seed in any::<u64>(), dim in 1usize..=6) {
        let mut g = rng(seed);
        let (a, b) = (gaussian_matrix(&mut g, dim), gaussian_matrix(&mut g, dim));
        let fast = matmul(&a, &b).unwrap();
        prop_assert!(fast.max_abs_diff(&naive_matmul(&a, &b)) < 1e-12);
    }

    #[test]
    fn det_matches_leibniz(seed in any::<u64>(), dim in 1usize..=5) {
        let a = gaussian_matrix(&mut rng(seed), dim);
        prop_assert!(rel(det(&a), leibniz_det(&a)) < 1e-11);
    }

    #[test]
    fn det_is_multiplicative(seed in any::<u64>(), dim in 1usize..=6) {
        let mut g = rng(seed);
        let (a, b) = (gaussian_matrix(&mut g, dim), gaussian_matrix(&mut g, dim));
        let ab = det(&matmul(&a, &b).unwrap());
        let expected = det(&a) * det(&b);
        prop_assert!((ab - expected).norm() <= 1e-10 * expected.norm().max(1e-300));
    }

    #[test]
    fn eigenvalues_recover_trace_and_det(seed in any::<u64>(), dim in 1usize..=7) {
        let a = hermitian(&mut rng(seed), dim);
        let ev = herm_eigvals(&a).unwrap();
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = ev.iter().sum();
        prop_assert!((sum - a.trace().re).abs() < 1e-10 * a.max_abs().max(1.0) * dim as f64);
        let prod: f64 = ev.iter().product();
        prop_assert!(rel(C64::new(prod, 0.0), det(&a)) < 1e-9);
    }

    #[test]
    fn discriminant_routes_agree(seed in any::<u64>(), r in 1usize..=5) {
        let mut g = rng(seed);
        let t = MatrixTuple::new((0..r).map(|_| gaussian_matrix(&mut g, r)).collect()).unwrap();
        let a = mixed_discriminant(&t).unwrap();
        let b = mixed_discriminant_polarized(&t).unwrap();
        prop_assert!(rel(a, b) < 1e-10);
        let m = t.mats();
        if r == 2 {
            prop_assert!((trace_expansion_r2(&m[0], &m[1]).unwrap() - a).norm() < 1e-11);
        }
        if r == 3 {
            prop_assert!((trace_expansion_r3(&m[0], &m[1], &m[2]).unwrap() - a).norm() < 1e-11);
        }
    }

    #[test]
    fn discriminant_reduces_to_det(seed in any::<u64>(), r in 1usize..=6) {
        let a = gaussian_matrix(&mut rng(seed), r);
        let t = MatrixTuple::new(vec![a.clone(); r]).unwrap();
        prop_assert!((mixed_discriminant(&t).unwrap() - det(&a)).norm() < 1e-11 * det(&a).norm().max(1.0));
    }

    #[test]
    fn discriminant_is_symmetric_and_multilinear(
        seed in any::<u64>(),
        r in 2usize..=4,
        slot in 0usize..4,
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
    ) {
        let slot = slot % r;
        let mut g = rng(seed);
        let mats: Vec<ComplexMatrix> = (0..r).map(|_| hermitian(&mut g, r)).collect();
        let base = mixed_discriminant(&MatrixTuple::new(mats.clone()).unwrap()).unwrap();
        let mut rev = mats.clone();
        rev.reverse();
        let reversed = mixed_discriminant(&MatrixTuple::new(rev).unwrap()).unwrap();
        prop_assert!((base - reversed).norm() < 1e-12 * base.norm().max(1.0));

        let other = hermitian(&mut g, r);
        let mut mixed = mats[slot].scale_real(alpha);
        mixed.add_scaled(C64::new(beta, 0.0), &other);
        let with = |m: &ComplexMatrix| {
            let mut v = mats.clone();
            v[slot] = m.clone();
            mixed_discriminant(&MatrixTuple::new(v).unwrap()).unwrap()
        };
        let lhs = with(&mixed);
        let rhs = base * alpha + with(&other) * beta;
        prop_assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0) * 10.0);
    }

    #[test]
    fn discriminant_congruence_covariance(seed in any::<u64>(), r in 1usize..=4) {
        let mut g = rng(seed);
        let c = gaussian_matrix(&mut g, r);
        let mats: Vec<ComplexMatrix> = (0..r).map(|_| hermitian(&mut g, r)).collect();
        let conj: Vec<ComplexMatrix> = mats
            .iter()
            .map(|u| matmul(&matmul(&c, u).unwrap(), &c.adjoint()).unwrap())
            .collect();
        let lhs = mixed_discriminant(&MatrixTuple::new(conj).unwrap()).unwrap();
        let rhs = mixed_discriminant(&MatrixTuple::new(mats).unwrap()).unwrap() * det(&c).norm_sqr();
        prop_assert!(rel(lhs, rhs) < 1e-9);
    }

    #[test]
    fn hermitian_moments_are_real(seed in any::<u64>(), r in 1usize..=4, n in 1usize..=5) {
        let mut g = rng(seed);
        let us: Vec<ComplexMatrix> = (0..n).map(|_| hermitian(&mut g, r)).collect();
        prop_assert!(moment_exact(&us).unwrap().im.abs() < 1e-12 * 10f64.powi(n as i32));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn scaling_preserves_symmetry_and_positivity(seed in any::<u64>(), r in 2usize..=4) {
        let h = random_kraus_map(r, 3, 0.2, seed).unwrap();
        let mut g = rng(seed ^ 0x5eed);
        let c1 = gaussian_matrix(&mut g, r);
        let c2 = gaussian_matrix(&mut g, r);
        let s = scale(&h, &c1, &c2).unwrap();
        prop_assert!(s.symmetry_drift() < 1e-10);
        prop_assert!(positivity_certificate(&s, 500, seed).min_eig > 0.0);
    }

    #[test]
    fn scaling_composes(seed in any::<u64>(), r in 2usize..=4) {
        let h = random_kraus_map(r, 2, 0.1, seed).unwrap();
        let mut g = rng(seed.wrapping_add(1));
        let [c1, c2, d1, d2]: [ComplexMatrix; 4] =
            std::array::from_fn(|_| gaussian_matrix(&mut g, r));
        let twice = scale(&scale(&h, &d1, &d2).unwrap(), &c1, &c2).unwrap();
        let once = scale(&h, &matmul(&c1, &d1).unwrap(), &matmul(&c2, &d2).unwrap()).unwrap();
        let scale_ref = once.block_rows().iter().flatten().map(|b| b.max_abs()).fold(1.0, f64::max);
        for i in 0..r {
            for j in 0..r {
                prop_assert!(twice.block(i, j).max_abs_diff(once.block(i, j)) < 1e-11 * scale_ref);
            }
        }
    }

    #[test]
    fn normalized_maps_have_trace_r(seed in any::<u64>(), r in 2usize..=4) {
        let h = random_kraus_map(r, 3, 0.3, seed).unwrap();
        let res = sinkhorn_normalize(&h, 1e-11, 5000).unwrap();
        prop_assert!(res.converged);
        let mut g = rng(seed);
        for _ in 0..20 {
            let xi = unit_vector(&mut g, r);
            let c = mixdisc::phi::c_matrix(&res.scaled, &xi).unwrap();
            prop_assert!((c.trace().re - r as f64).abs() < 1e-9);
            prop_assert!(c.trace().im.abs() < 1e-9);
        }
        let phi = phi_direct(&res.scaled).unwrap();
        prop_assert!(phi.imaginary_residue < 1e-9);
        prop_assert!((phi.value - phi_dual(&res.scaled).unwrap().value).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn chern_forms_are_real(seed in any::<u64>(), r in 1usize..=4, n in 1usize..=3) {
        let rt = random_griffiths_curvature(r, n, 2, 0.1, seed).unwrap();
        let cs = chern_forms(&rt).unwrap();
        for f in cs.forms() {
            prop_assert!(f.reality_defect() < 1e-12 * f.max_abs().max(1.0));
        }
    }

    #[test]
    fn column_schur_forms_are_signed_segre(seed in any::<u64>(), r in 1usize..=3, n in 1usize..=3) {
        let rt = random_griffiths_curvature(r, n, 2, 0.1, seed).unwrap();
        let cs = chern_forms(&rt).unwrap();
        let c = |k: usize| if k <= r { cs.component(k).unwrap() } else { Form::zero(n, k, k).unwrap() };
        // s_k = -sum_{j=1..k} c_j s_{k-j}, s_0 = 1
        let mut segre = vec![Form::one(n)];
        for k in 1..=n {
            let mut s = Form::zero(n, k, k).unwrap();
            for j in 1..=k {
                s = s.sub(&c(j).wedge(&segre[k - j]).unwrap()).unwrap();
            }
            segre.push(s);
        }
        for k in 1..=n.min(r) {
            let lam = Partition::new(vec![1; k]).unwrap();
            let p = schur_form(&cs, &lam).unwrap();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let expected = segre[k].scale_real(sign);
            prop_assert!(p.max_abs_diff(&expected).unwrap() < 1e-10 * expected.max_abs().max(1.0));
        }
    }

    #[test]
    fn c3_minors_sum_over_subsets(seed in any::<u64>(), r in 3usize..=5) {
        let n = 3;
        let rt = random_griffiths_curvature(r, n, 2, 0.1, seed).unwrap();
        let whole = c3_principal_minors(&rt).unwrap();
        let mut sum = Form::zero(n, 3, 3).unwrap();
        for s in combinations(r, 3) {
            sum = sum.add(&c3_principal_minors(&restrict_fiber(&rt, &s).unwrap()).unwrap()).unwrap();
        }
        prop_assert!(whole.max_abs_diff(&sum).unwrap() < 1e-10 * whole.max_abs().max(1.0));
        let c3 = chern_forms(&rt).unwrap().component(3).unwrap();
        prop_assert!(c3.max_abs_diff(&whole).unwrap() < 1e-10 * whole.max_abs().max(1.0));
    }

    #[test]
    fn strongly_positive_forms_pass(seed in any::<u64>(), n in 2usize..=4, p in 1usize..=2) {
        prop_assume!(p < n);
        let mut g = rng(seed);
        let i = C64::new(0.0, 1.0);
        let ip = i.powu((p * p) as u32);
        let mut u = Form::zero(n, p, p).unwrap();
        for _ in 0..3 {
            let mut alpha = Form::one(n);
            for _ in 0..p {
                alpha = alpha.wedge(&Form::covector(&gaussian_vector(&mut g, n))).unwrap();
            }
            let term = alpha.wedge(&alpha.conjugate()).unwrap().scale(ip);
            u = u.add(&term).unwrap();
        }
        prop_assert!(u.reality_defect() < 1e-12);
        let res = weak_positivity_min(&u, 300, seed).unwrap();
        prop_assert!(res.min_coeff > -1e-12);
    }

    #[test]
    fn curvature_maps_are_positive(seed in any::<u64>(), r in 2usize..=4, eps in 0.05f64..1.0) {
        let rt = random_griffiths_curvature(r, r, 2, eps, seed).unwrap();
        let h = from_curvature(&rt);
        prop_assert!(positivity_certificate(&h, 500, seed).min_eig >= eps - 1e-10);
        let sub = restrict_fiber(&rt, &[0, r - 1]).unwrap();
        let hs = from_curvature(&restrict_fiber(&sub, &[0, 1]).unwrap());
        prop_assert!(hs.r() == 2);
        if r == 3 {
            let c3 = chern_forms(&rt).unwrap().component(3).unwrap();
            prop_assert!(c3.volume_coefficient().unwrap().re > 0.0);
            prop_assert!(phi_direct(&from_curvature(&rt)).unwrap().value > 0.0);
        }
    }
}

#[test]
fn multi_index_complement_round_trips() {
    for n in 0..=6 {
        for k in 0..=n {
            for s in combinations(n, k) {
                let m = MultiIndex::new(&s).unwrap();
                assert_eq!(m.entries(), s);
                assert_eq!(m.complement(n).complement(n), m);
                assert!(m.is_disjoint(m.complement(n)));
                assert_eq!(m.len() + m.complement(n).len(), n);
            }
        }
    }
}
