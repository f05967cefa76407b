//! Detector and analysis checks against independent computations.

use nalgebra::DMatrix;
use rcsm_core::analysis::{
    asymptotic_mmse_sinr, conditional_pep_bound, pep_components, pep_params_for_pair, tightest_conditional_bound,
};
use rcsm_core::detectors::{
    cavi_detect, covariance, exact_mixture_ml_detect, gauss_approx_metric, ml_ga_detect, CaviOptions,
};
use rcsm_core::model::{
    qam_constellation, sample_channel, simulate_received_slot, transmit_slot, IndexVector, NoiseModel, ReceivedSlot,
    SystemDims,
};
use rcsm_core::numerics::{inner, invert_and_logdet, ComplexMatrix, RngStream};
use rcsm_core::Complex64;

fn to_na(a: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(a.rows(), a.cols(), |r, c| a[(r, c)])
}

fn from_na(a: &DMatrix<Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)])
}

struct Instance {
    h: ComplexMatrix,
    x: IndexVector,
    y: ReceivedSlot,
    noise: NoiseModel,
    dims: SystemDims,
}

fn instance(seed: u64, dims: SystemDims, snr_db: f64) -> Instance {
    let mut rng = RngStream::new(seed, 0);
    let noise = NoiseModel::from_db(snr_db).unwrap();
    let h = sample_channel(&mut rng, dims.n, dims.l).unwrap();
    let mut support: Vec<usize> = (0..dims.l).collect();
    for i in 0..dims.k {
        let j = i + rng.index(dims.l - i);
        support.swap(i, j);
    }
    support.truncate(dims.k);
    let x = IndexVector::from_support(dims.l, support).unwrap();
    let s = transmit_slot(&x, &dims, &qam_constellation(4).unwrap(), &mut rng).unwrap();
    let y = simulate_received_slot(&h, &s, &noise, &mut rng).unwrap();
    Instance { h, x, y, noise, dims }
}

#[test]
fn gauss_metric_matches_eigendecomposition() {
    for seed in 0..20 {
        let t = instance(seed, SystemDims::new(8, 6, 3, 3).unwrap(), 5.0);
        let r = covariance(&t.h, t.x.support().iter().map(|&l| (l, 1.0)), &t.noise);
        let eig = to_na(&r).symmetric_eigen();
        let log_det: f64 = eig.eigenvalues.iter().map(|v| v.ln()).sum();
        let mut quad = 0.0;
        for y in t.y.observations() {
            for (i, &lam) in eig.eigenvalues.iter().enumerate() {
                let proj: Complex64 = eig
                    .eigenvectors
                    .column(i)
                    .iter()
                    .zip(y)
                    .map(|(u, y)| u.conj() * y)
                    .sum();
                quad += proj.norm_sqr() / lam;
            }
        }
        let got = gauss_approx_metric(&t.h, &t.y, &t.x, &t.noise).unwrap();
        assert!((got.log_det - log_det).abs() < 1e-9);
        assert!((got.quadratic - quad).abs() < 1e-9 * quad.max(1.0));
    }
}

#[test]
fn metric_is_invariant_under_receive_rotation() {
    for seed in 0..10 {
        let t = instance(seed, SystemDims::new(10, 6, 2, 2).unwrap(), 8.0);
        let mut rng = RngStream::new(seed, 9);
        let g = DMatrix::from_fn(6, 6, |_, _| rng.cscg(1.0));
        let u = from_na(&g.qr().q());
        let hu = u.matmul(&t.h);
        let yu = ReceivedSlot::from_observations(t.y.observations().iter().map(|y| u.mul_vec(y)).collect()).unwrap();
        for cand in [t.x.clone(), IndexVector::from_support(10, vec![0, 9]).unwrap()] {
            let a = gauss_approx_metric(&t.h, &t.y, &cand, &t.noise).unwrap().value;
            let b = gauss_approx_metric(&hu, &yu, &cand, &t.noise).unwrap().value;
            assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
        }
        assert_eq!(
            ml_ga_detect(&t.h, &t.y, &t.dims, &t.noise).unwrap().estimate,
            ml_ga_detect(&hu, &yu, &t.dims, &t.noise).unwrap().estimate
        );
    }
}

#[test]
fn ml_estimate_follows_column_permutation() {
    for seed in 0..20 {
        let t = instance(seed, SystemDims::new(9, 5, 3, 2).unwrap(), 6.0);
        // Column j of the permuted channel is column perm[j] of the original.
        let perm = [4, 7, 0, 2, 8, 1, 6, 3, 5];
        let cols = t.h.columns();
        let hp = ComplexMatrix::from_columns(&perm.iter().map(|&p| cols[p].clone()).collect::<Vec<_>>()).unwrap();
        let est = ml_ga_detect(&t.h, &t.y, &t.dims, &t.noise).unwrap().estimate;
        let est_p = ml_ga_detect(&hp, &t.y, &t.dims, &t.noise).unwrap().estimate;
        let mapped = IndexVector::from_support(9, est_p.support().iter().map(|&j| perm[j]).collect()).unwrap();
        assert_eq!(mapped, est);
    }
}

#[test]
fn ml_ga_matches_brute_force() {
    for seed in 0..30 {
        let t = instance(seed, SystemDims::new(7, 4, 3, 2).unwrap(), 3.0);
        let mut best = (f64::INFINITY, Vec::new());
        for a in 0..7 {
            for b in a + 1..7 {
                for c in b + 1..7 {
                    let x = IndexVector::from_support(7, vec![a, b, c]).unwrap();
                    let v = gauss_approx_metric(&t.h, &t.y, &x, &t.noise).unwrap().value;
                    if v < best.0 {
                        best = (v, vec![a, b, c]);
                    }
                }
            }
        }
        let got = ml_ga_detect(&t.h, &t.y, &t.dims, &t.noise).unwrap();
        assert_eq!(got.estimate.support(), best.1.as_slice());
        assert!((got.metric - best.0).abs() < 1e-9 * best.0.abs().max(1.0));
    }
}

#[test]
fn detectors_agree_on_easy_instances() {
    let dims = SystemDims::new(6, 8, 2, 3).unwrap();
    let c4 = qam_constellation(4).unwrap();
    for seed in 0..20 {
        let t = instance(seed, dims, 25.0);
        assert_eq!(ml_ga_detect(&t.h, &t.y, &dims, &t.noise).unwrap().estimate, t.x);
        assert_eq!(
            exact_mixture_ml_detect(&t.h, &t.y, &dims, &t.noise, &c4)
                .unwrap()
                .estimate,
            t.x
        );
        assert_eq!(
            cavi_detect(&t.h, &t.y, &dims, &t.noise, &CaviOptions::default())
                .unwrap()
                .estimate,
            t.x
        );
    }
}

/// Pair {0,1} vs {0,2}: antenna 0 is shared, `h₁` = column 1, `h₂` = column 2.
struct Pair {
    h: ComplexMatrix,
    d: ComplexMatrix,
    delta: ComplexMatrix,
    x: IndexVector,
    x_alt: IndexVector,
}

fn pair(seed: u64, n: usize, noise: &NoiseModel) -> Pair {
    let mut rng = RngStream::new(seed, 3);
    let h = sample_channel(&mut rng, n, 3).unwrap();
    let d = covariance(&h, [(0, 1.0)], noise);
    let v1 = invert_and_logdet(&covariance(&h, [(0, 1.0), (1, 1.0)], noise)).unwrap();
    let v2 = invert_and_logdet(&covariance(&h, [(0, 1.0), (2, 1.0)], noise)).unwrap();
    Pair {
        delta: v1.inverse().sub(v2.inverse()),
        d,
        x: IndexVector::from_support(3, vec![0, 1]).unwrap(),
        x_alt: IndexVector::from_support(3, vec![0, 2]).unwrap(),
        h,
    }
}

/// `R^{1/2}` for drawing from `CN(0, R)`.
fn sqrtm(r: &ComplexMatrix) -> ComplexMatrix {
    let eig = to_na(r).symmetric_eigen();
    let sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| Complex64::new(v.sqrt(), 0.0)));
    from_na(&(&eig.eigenvectors * sqrt * eig.eigenvectors.adjoint()))
}

/// One draw of `y^H Δ y` with `y = h₁ s + e`, `|s| = 1`, `e ~ CN(0, D)`.
fn statistic(p: &Pair, d_half: &ComplexMatrix, rng: &mut RngStream) -> f64 {
    let n = p.h.rows();
    let s = qam_constellation(4).unwrap().points()[rng.index(4)];
    let e = d_half.mul_vec(&rng.cscg_vec(n, 1.0));
    let y: Vec<Complex64> = p.h.column(1).iter().zip(&e).map(|(h, e)| h * s + e).collect();
    inner(&y, &p.delta.mul_vec(&y)).re
}

#[test]
fn mgf_matches_gaussian_integral() {
    // For y ~ CN(h, D): E[exp(λ y^H Δ y)] = exp(-h^H (D⁻¹ - D⁻¹ W⁻¹ D⁻¹) h) / (det D det W),
    // with W = D⁻¹ - λΔ.
    let noise = NoiseModel::from_db(5.0).unwrap();
    for seed in 0..10 {
        let p = pair(seed, 6, &noise);
        let d_inv = to_na(&p.d).try_inverse().unwrap();
        let h1 = DMatrix::from_column_slice(6, 1, &p.h.column(1));
        for lambda in [0.05, 0.3, 0.8, 1.2] {
            let params = pep_params_for_pair(&p.h, &p.x, &p.x_alt, &noise, 1, lambda).unwrap();
            if lambda >= params.lambda_max() {
                continue;
            }
            let w = &d_inv - to_na(&p.delta).scale(lambda);
            let w_inv = w.clone().try_inverse().unwrap();
            let q = (h1.adjoint() * (&d_inv - &d_inv * &w_inv * &d_inv) * &h1)[(0, 0)].re;
            let exact = (-q).exp() / (to_na(&p.d).determinant() * w.determinant()).re;
            let c = pep_components(&params).unwrap();
            let closed = c.kappa * (-c.gamma_pep).exp();
            assert!(
                (closed / exact - 1.0).abs() < 1e-9,
                "seed {seed} λ={lambda}: {closed} vs {exact}"
            );
        }
    }
}

#[test]
fn mgf_matches_monte_carlo() {
    let noise = NoiseModel::from_db(5.0).unwrap();
    let lambda = 0.3;
    for seed in 0..3 {
        let p = pair(seed, 6, &noise);
        let d_half = sqrtm(&p.d);
        let mut rng = RngStream::new(seed, 77);
        let draws = 200_000;
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for _ in 0..draws {
            let v = (lambda * statistic(&p, &d_half, &mut rng)).exp();
            acc += v;
            acc2 += v * v;
        }
        let mean = acc / draws as f64;
        let se = ((acc2 / draws as f64 - mean * mean) / draws as f64).sqrt();
        let params = pep_params_for_pair(&p.h, &p.x, &p.x_alt, &noise, 1, lambda).unwrap();
        let c = pep_components(&params).unwrap();
        let closed = c.kappa * (-c.gamma_pep).exp();
        assert!(
            (mean - closed).abs() < 5.0 * se,
            "seed {seed}: mc {mean} ± {se}, closed {closed}"
        );
    }
}

#[test]
fn chernoff_bound_holds() {
    let noise = NoiseModel::from_db(3.0).unwrap();
    for n in [10, 40] {
        for seed in 0..5 {
            let p = pair(seed, n, &noise);
            let d_half = sqrtm(&p.d);
            let m = 2;
            let params = pep_params_for_pair(&p.h, &p.x, &p.x_alt, &noise, m, 1.0).unwrap();
            let (_, bound) = tightest_conditional_bound(&params).unwrap();
            assert!(bound <= conditional_pep_bound(&params).unwrap() + 1e-15);
            let mut rng = RngStream::new(seed, 5);
            let draws = 20_000;
            let hits = (0..draws)
                .filter(|_| (0..m).map(|_| statistic(&p, &d_half, &mut rng)).sum::<f64>() > params.d)
                .count();
            let freq = hits as f64 / draws as f64;
            assert!(freq <= bound + 0.01, "N={n} seed {seed}: {freq} > {bound}");
        }
    }
}

#[test]
fn empirical_sinr_approaches_large_system_limit() {
    let (n, q, gamma) = (200, 40, 10.0);
    let noise = NoiseModel::from_linear(gamma).unwrap();
    let mut rng = RngStream::new(8, 0);
    let mut total = 0.0;
    let draws = 20;
    for _ in 0..draws {
        let h = sample_channel(&mut rng, n, q + 1).unwrap();
        let d = invert_and_logdet(&covariance(&h, (1..=q).map(|l| (l, 1.0)), &noise)).unwrap();
        let h0 = h.column(0);
        total += inner(&h0, &d.inverse().mul_vec(&h0)).re;
    }
    let empirical = total / draws as f64;
    let limit = asymptotic_mmse_sinr(gamma, q as f64 / n as f64).unwrap();
    assert!((empirical / limit - 1.0).abs() < 0.05, "{empirical} vs {limit}");
}
