//! Closed-form index-error analysis for ML-GA detection.
//!
//! Pairwise errors between index vectors at Hamming distance 2 are bounded
//! with a Chernoff argument; in the large-system limit the bound depends
//! only on the MMSE SINR `ᾱ`, which yields an approximate index-error
//! probability with an explicit slot-length exponent.
//!
//! Notation: `α_l = h_l^H D^{-1} h_l`, `β = h_1^H D^{-1} h_2`,
//! `θ_l(λ) = λ / (1 + α_l - α_l λ)`.

use crate::detectors::{covariance, pairwise_hamming};
use crate::error::{invalid, Error, Result};
use crate::model::{IndexVector, NoiseModel};
use crate::numerics::{inner, invert_and_logdet, ComplexMatrix};

/// Inputs of the conditional Chernoff bound for one pair `x → x'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PepParams {
    pub alpha1: f64,
    pub alpha2: f64,
    /// `|β|²`.
    pub beta_sq: f64,
    pub slot_length: usize,
    pub lambda: f64,
    /// Decision threshold `d(x, x') = M ln((1+α₂)/(1+α₁))`.
    pub d: f64,
}

impl PepParams {
    /// Upper end of the admissible `λ` range, `(1 + α₂)/α₂`.
    pub fn lambda_max(&self) -> f64 {
        pole(self.alpha2)
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }
}

fn pole(alpha: f64) -> f64 {
    if alpha > 0.0 {
        (1.0 + alpha) / alpha
    } else {
        f64::INFINITY
    }
}

/// `θ(λ) = λ / (1 + α - αλ)`; errors past the pole.
pub fn theta(alpha: f64, lambda: f64) -> Result<f64> {
    let den = 1.0 + alpha - alpha * lambda;
    if !(den > 0.0) {
        return Err(Error::Domain(format!(
            "λ = {lambda} is at or beyond the pole (1+α)/α for α = {alpha}"
        )));
    }
    Ok(lambda / den)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PepComponents {
    pub kappa: f64,
    /// The PEP-SNR `γ_pep(λ)`.
    pub gamma_pep: f64,
}

fn check_pep_params(p: &PepParams) -> Result<()> {
    if !(p.alpha1 >= 0.0 && p.alpha2 >= 0.0 && p.beta_sq >= 0.0) {
        return invalid("α₁, α₂ and |β|² must be non-negative");
    }
    if !(p.lambda > 0.0 && p.lambda.is_finite()) {
        return invalid(format!("λ must be positive and finite, got {}", p.lambda));
    }
    Ok(())
}

/// `κ(λ)` and `γ_pep(λ)` of the per-symbol moment generating function
/// `E[exp(λ y^H Δ y)] = κ(λ) exp(-γ_pep(λ))`.
pub fn pep_components(p: &PepParams) -> Result<PepComponents> {
    check_pep_params(p)?;
    let (a1, a2, lambda) = (p.alpha1, p.alpha2, p.lambda);
    let t2 = theta(a2, lambda)?;
    let s = a1 + t2 * p.beta_sq;
    let den = a1 + 1.0 + lambda * s;
    Ok(PepComponents {
        kappa: (a1 + 1.0) * (a2 + 1.0) * t2 / (lambda * den),
        gamma_pep: a1 - (a1 + 1.0) * s / den,
    })
}

/// `e^{-λd} (κ(λ) e^{-γ_pep(λ)})^M`, the Chernoff bound on the conditional PEP.
pub fn conditional_pep_bound(p: &PepParams) -> Result<f64> {
    let c = pep_components(p)?;
    let m = p.slot_length as f64;
    Ok((-p.lambda * p.d + m * (c.kappa.ln() - c.gamma_pep)).exp())
}

/// `d(x, x') = M ln((1 + α₂)/(1 + α₁))`.
pub fn logdet_distance(alpha1: f64, alpha2: f64, slot_length: usize) -> Result<f64> {
    if !(alpha1 >= 0.0 && alpha2 >= 0.0) {
        return invalid("α₁ and α₂ must be non-negative");
    }
    Ok(slot_length as f64 * ((1.0 + alpha2) / (1.0 + alpha1)).ln())
}

/// Chernoff parameters for a concrete channel and a pair at Hamming distance 2.
///
/// `D = H̄ H̄^H + γ^{-1} I` collects the shared active columns; `h₁` is the
/// antenna only `x` uses and `h₂` the one only `x_alt` uses.
pub fn pep_params_for_pair(
    h: &ComplexMatrix,
    x: &IndexVector,
    x_alt: &IndexVector,
    noise: &NoiseModel,
    slot_length: usize,
    lambda: f64,
) -> Result<PepParams> {
    if pairwise_hamming(x, x_alt)? != 2 || x.k() != x_alt.k() {
        return invalid("the pair must have equal weight and Hamming distance 2");
    }
    if x.l() != h.cols() {
        return invalid("index vectors do not match the channel");
    }
    let only = |a: &IndexVector, b: &IndexVector| *a.support().iter().find(|l| !b.is_active(**l)).expect("distance 2");
    let (l1, l2) = (only(x, x_alt), only(x_alt, x));
    let shared = x.support().iter().copied().filter(|l| x_alt.is_active(*l));
    let d_inv = invert_and_logdet(&covariance(h, shared.map(|l| (l, 1.0)), noise))?;
    let (h1, h2) = (h.column(l1), h.column(l2));
    let (u1, u2) = (d_inv.inverse().mul_vec(&h1), d_inv.inverse().mul_vec(&h2));
    let alpha1 = inner(&h1, &u1).re;
    let alpha2 = inner(&h2, &u2).re;
    let beta_sq = inner(&h1, &u2).norm_sqr();
    Ok(PepParams {
        alpha1,
        alpha2,
        beta_sq,
        slot_length,
        lambda,
        d: logdet_distance(alpha1, alpha2, slot_length)?,
    })
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
fn golden_section_max(mut f: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b)?;
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a)?;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x, f(x)?))
}

/// The `λ` minimizing the conditional bound, and the bound there.
pub fn tightest_conditional_bound(p: &PepParams) -> Result<(f64, f64)> {
    let top = p.lambda_max().min(1e6);
    let eps = 1e-6 * top;
    let log_bound = |lambda: f64| -> Result<f64> {
        let v = conditional_pep_bound(&p.with_lambda(lambda))?.ln();
        if v.is_finite() {
            Ok(-v)
        } else {
            Err(Error::Domain(format!("bound is not finite at λ = {lambda}")))
        }
    };
    let (lambda, neg_log) = golden_section_max(log_bound, eps, top - eps, 1e-10 * top)?;
    Ok((lambda, (-neg_log).exp()))
}

/// Large-system MMSE SINR: the positive root of `ᾱ = γ / (1 + ηγ/(1 + ᾱ))`.
pub fn asymptotic_mmse_sinr(gamma: f64, eta: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return invalid(format!("γ must be positive, got {gamma}"));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return invalid(format!("η must be non-negative, got {eta}"));
    }
    // ᾱ² + (1 + ηγ - γ)ᾱ - γ = 0.
    let b = gamma * (1.0 - eta) - 1.0;
    let disc = (b * b + 4.0 * gamma).sqrt();
    Ok(if b >= 0.0 {
        (b + disc) / 2.0
    } else {
        2.0 * gamma / (disc - b)
    })
}

/// Large-system quantities for receive dimension `N` and load `η = Q/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams {
    pub gamma: f64,
    pub eta: f64,
    pub n_rx: usize,
    pub alpha_bar: f64,
    pub omega_bar: f64,
}

impl AsymptoticParams {
    pub fn new(gamma: f64, eta: f64, n_rx: usize) -> Result<Self> {
        if n_rx == 0 {
            return invalid("N must be positive");
        }
        let alpha_bar = asymptotic_mmse_sinr(gamma, eta)?;
        let omega_bar = asymptotic_mmse_sinr(gamma * (2.0 + gamma), eta)? / (2.0 / gamma + 1.0);
        Ok(Self {
            gamma,
            eta,
            n_rx,
            alpha_bar,
            omega_bar,
        })
    }

    /// Parameters for an RCSM configuration with `Q` interfering streams.
    pub fn for_system(snr: f64, q: usize, n_rx: usize) -> Result<Self> {
        Self::new(snr, q as f64 / n_rx as f64, n_rx)
    }

    pub fn lambda_bar(&self) -> f64 {
        (self.alpha_bar + 1.0) / self.alpha_bar
    }

    pub fn theta_bar(&self, lambda: f64) -> Result<f64> {
        theta(self.alpha_bar, lambda)
    }

    /// Asymptotic `|β|²`, i.e. `ω̄ / N`.
    pub fn beta_sq(&self) -> f64 {
        self.omega_bar / self.n_rx as f64
    }

    fn pep_params(&self, lambda: f64, slot_length: usize) -> PepParams {
        PepParams {
            alpha1: self.alpha_bar,
            alpha2: self.alpha_bar,
            beta_sq: self.beta_sq(),
            slot_length,
            lambda,
            d: 0.0,
        }
    }
}

/// Asymptotic PEP-SNR `γ̃_pep(λ)`.
pub fn asymptotic_pep_snr(a: &AsymptoticParams, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return invalid("λ must be positive");
    }
    let ab = a.alpha_bar;
    let s = ab + a.omega_bar * a.theta_bar(lambda)? / a.n_rx as f64;
    Ok(ab - (ab + 1.0) * s / (ab + 1.0 + lambda * s))
}

/// Asymptotic `κ̃(λ)`: the finite-system `κ` at `(ᾱ, ᾱ, ω̄/N)`.
pub fn asymptotic_kappa(a: &AsymptoticParams, lambda: f64) -> Result<f64> {
    Ok(pep_components(&a.pep_params(lambda, 1))?.kappa)
}

/// Per-slot exponent `γ̃_pep(λ) - ln κ̃(λ)`; `P̃₂(λ) = exp(-M·exponent)`.
pub fn lambda_objective(a: &AsymptoticParams, lambda: f64) -> Result<f64> {
    let v = asymptotic_pep_snr(a, lambda)? - asymptotic_kappa(a, lambda)?.ln();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("λ objective is not finite at λ = {lambda}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaOptimum {
    pub lambda_star: f64,
    /// `γ̃_pep(λ*) - ln κ̃(λ*)`.
    pub exponent: f64,
    /// `P̃₂(λ*) = (κ̃ e^{-γ̃_pep})^M`.
    pub p2: f64,
}

/// Maximizes the per-slot exponent over `(0, λ̄)` by golden-section search.
pub fn optimize_lambda(a: &AsymptoticParams, slot_length: usize) -> Result<LambdaOptimum> {
    let top = a.lambda_bar();
    let eps = 1e-6 * top;
    let (lambda_star, exponent) = golden_section_max(|l| lambda_objective(a, l), eps, top - eps, 1e-8)?;
    Ok(LambdaOptimum {
        lambda_star,
        exponent,
        p2: (-(slot_length as f64) * exponent).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Large-system approximation; underestimates the error at high SNR for finite `N`.
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEstimate {
    /// Approximate PEP `P̃₂(λ*)`.
    pub pep: f64,
    /// Approximate index-error probability `(L - Q) P̃₂(λ*)`.
    pub p_ie: f64,
    pub lambda_star: f64,
    /// Per-slot exponent; `ln P_ie` falls by this much per unit of `M`.
    pub exponent: f64,
    pub multiplicity: usize,
    pub slot_length: usize,
    pub regime: Regime,
}

/// `P_ie ≈ (L - Q) κ̃(λ*)^M exp(-M γ̃_pep(λ*))`.
pub fn approx_index_error(l: usize, q: usize, a: &AsymptoticParams, slot_length: usize) -> Result<ErrorEstimate> {
    if q >= l {
        return invalid(format!("need Q < L, got Q={q}, L={l}"));
    }
    let opt = optimize_lambda(a, slot_length)?;
    let multiplicity = l - q;
    Ok(ErrorEstimate {
        pep: opt.p2,
        p_ie: multiplicity as f64 * opt.p2,
        lambda_star: opt.lambda_star,
        exponent: opt.exponent,
        multiplicity,
        slot_length,
        regime: Regime::Asymptotic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a1: f64, a2: f64, b: f64, lambda: f64, m: usize) -> PepParams {
        PepParams {
            alpha1: a1,
            alpha2: a2,
            beta_sq: b,
            slot_length: m,
            lambda,
            d: 0.0,
        }
    }

    #[test]
    fn small_lambda_cancels() {
        let c = pep_components(&params(3.0, 2.0, 0.4, 1e-9, 1)).unwrap();
        assert!(c.gamma_pep.abs() < 1e-8);
        assert!((c.kappa - 1.0).abs() < 1e-8);
    }

    #[test]
    fn symmetric_beta_zero_case() {
        let a: f64 = 2.5;
        let c = pep_components(&params(a, a, 0.0, 1.0, 1)).unwrap();
        assert!((c.gamma_pep - (a - (a + 1.0) * a / (2.0 * a + 1.0))).abs() < 1e-12);
    }

    #[test]
    fn pole_is_rejected() {
        // α₂ = 1 puts the pole at λ = 2.
        assert!(pep_components(&params(1.0, 1.0, 0.1, 2.0, 1)).is_err());
        assert!(pep_components(&params(1.0, 1.0, 0.1, 2.5, 1)).is_err());
        assert!(pep_components(&params(1.0, 1.0, 0.1, 1.99, 1)).is_ok());
        assert!(pep_components(&params(1.0, 1.0, 0.1, 0.0, 1)).is_err());
    }

    #[test]
    fn theta_increases_up_to_pole() {
        let alpha = 4.0;
        let top = pole(alpha);
        let mut prev = 0.0;
        for i in 1..100 {
            let t = theta(alpha, top * i as f64 / 100.0).unwrap();
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn empty_slot_leaves_threshold_term() {
        let mut p = params(2.0, 1.0, 0.3, 0.4, 0);
        p.d = 1.7;
        let b = conditional_pep_bound(&p).unwrap();
        assert!((b - (-0.4f64 * 1.7).exp()).abs() < 1e-15);
    }

    #[test]
    fn doubling_slot_squares_per_slot_factor() {
        let mut p = params(2.0, 1.5, 0.3, 0.4, 3);
        p.d = 0.8;
        let b1 = conditional_pep_bound(&p).unwrap() * (p.lambda * p.d).exp();
        p.slot_length = 6;
        let b2 = conditional_pep_bound(&p).unwrap() * (p.lambda * p.d).exp();
        assert!((b2 - b1 * b1).abs() < 1e-12 * b2);
    }

    #[test]
    fn distance_examples() {
        assert_eq!(logdet_distance(1.3, 1.3, 4).unwrap(), 0.0);
        assert!((logdet_distance(0.0, std::f64::consts::E - 1.0, 1).unwrap() - 1.0).abs() < 1e-15);
        let d = logdet_distance(0.5, 2.0, 3).unwrap();
        assert!((d + logdet_distance(2.0, 0.5, 3).unwrap()).abs() < 1e-15);
        assert!(logdet_distance(-1.0, 0.0, 1).is_err());
    }

    #[test]
    fn mmse_sinr_limits() {
        assert!((asymptotic_mmse_sinr(7.0, 0.0).unwrap() - 7.0).abs() < 1e-12);
        assert!(asymptotic_mmse_sinr(1e-12, 0.5).unwrap() < 1e-11);
        assert!(asymptotic_mmse_sinr(0.0, 0.5).is_err());
    }

    #[test]
    fn mmse_sinr_matches_fixed_point_iteration() {
        let (g, eta) = (10.0, 0.5);
        let mut a = g;
        for _ in 0..10_000 {
            a = g / (1.0 + eta * g / (1.0 + a));
        }
        let closed = ((g * (1.0 - eta) - 1.0) + ((g * (1.0 - eta) - 1.0f64).powi(2) + 4.0 * g).sqrt()) / 2.0;
        let got = asymptotic_mmse_sinr(g, eta).unwrap();
        assert!((got - a).abs() < 1e-12);
        assert!((got - closed).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_snr_small_lambda() {
        let a = AsymptoticParams::new(10.0, 0.5, 40).unwrap();
        assert!(asymptotic_pep_snr(&a, 1e-9).unwrap().abs() < 1e-8);
    }

    #[test]
    fn asymptotic_snr_infinite_n_limit() {
        let finite = AsymptoticParams::new(10.0, 0.5, 40).unwrap();
        let huge = AsymptoticParams {
            n_rx: usize::MAX,
            ..finite
        };
        let lambda = 0.5;
        let limit = pep_components(&params(finite.alpha_bar, finite.alpha_bar, 0.0, lambda, 1)).unwrap();
        assert!((asymptotic_pep_snr(&huge, lambda).unwrap() - limit.gamma_pep).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_snr_agrees_with_finite_formula() {
        let a = AsymptoticParams::new(10.0, 0.5, 40).unwrap();
        for lambda in [0.1, 0.5, 0.9, 1.05] {
            let via = pep_components(&a.pep_params(lambda, 1)).unwrap().gamma_pep;
            assert!((asymptotic_pep_snr(&a, lambda).unwrap() - via).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_star_beats_neighbours_and_grid() {
        let a = AsymptoticParams::new(10.0, 0.2, 40).unwrap();
        let opt = optimize_lambda(&a, 2).unwrap();
        for delta in [-1e-4, 1e-4] {
            assert!(opt.exponent >= lambda_objective(&a, opt.lambda_star + delta).unwrap());
        }
        let top = a.lambda_bar();
        let mut best = (0.0, f64::NEG_INFINITY);
        for i in 1..100_000 {
            let l = top * i as f64 / 100_000.0;
            let v = lambda_objective(&a, l).unwrap();
            if v > best.1 {
                best = (l, v);
            }
        }
        assert!((best.0 - opt.lambda_star).abs() < 1e-4);
    }

    #[test]
    fn pep_falls_with_slot_length() {
        let a = AsymptoticParams::new(10.0, 0.2, 40).unwrap();
        let ps: Vec<f64> = [1, 2, 4, 8]
            .iter()
            .map(|&m| optimize_lambda(&a, m).unwrap().p2)
            .collect();
        assert!(ps.windows(2).all(|w| w[1] < w[0]), "{ps:?}");
    }

    #[test]
    fn index_error_multiplicity_and_slope() {
        let a = AsymptoticParams::for_system(10.0, 4, 40).unwrap();
        let last = approx_index_error(20, 19, &a, 2).unwrap();
        assert_eq!(last.multiplicity, 1);
        assert!((last.p_ie - last.pep).abs() < 1e-18);
        let logs: Vec<f64> = (1..=5)
            .map(|m| approx_index_error(20, 4, &a, m).unwrap().p_ie.ln())
            .collect();
        for w in logs.windows(2) {
            assert!((w[0] - w[1] - last.exponent).abs() < 1e-9);
        }
        assert!(approx_index_error(4, 4, &a, 1).is_err());
    }
}
