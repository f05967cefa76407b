//! Index detectors: the correlator bank, exhaustive Gaussian-approximation
//! ML (ML-GA), coordinate-ascent variational inference (CAVI), and an
//! exact Gaussian-mixture ML oracle for tiny instances.
//!
//! All of them score index vectors `x` under the same covariance model
//!
//! ```text
//! R(x) = H diag(x) H^H + γ^{-1} I,    metric(x) = Σ_m y_m^H R(x)^{-1} y_m + M ln det R(x)
//! ```
//!
//! and break ties toward the smaller antenna index or lexicographic rank.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::{binomial, index_set_from_rank, Constellation, IndexVector, NoiseModel, ReceivedSlot, SystemDims};
use crate::numerics::{inner, invert_and_logdet, norm_sqr, ComplexMatrix, HermitianFactor, SINGULAR_GUARD};

/// Default cap on `C(L, K)` for the exhaustive ML-GA search.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;
/// Scale caps for the exact mixture oracle.
pub const MIXTURE_SYMBOL_CAP: u128 = 4096;
pub const MIXTURE_CANDIDATE_CAP: u128 = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostics {
    None,
    /// Correlator energies `ρ_l`.
    Energies(Vec<f64>),
    /// Metric of every candidate, indexed by lexicographic rank.
    CandidateMetrics(Vec<f64>),
    /// `q` after each CAVI sweep; entry 0 is the initial point.
    Trajectory(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub estimate: IndexVector,
    /// Detector-specific score of the estimate (lower is better for ML-GA,
    /// higher for the mixture log-likelihood and correlator energy sum).
    pub metric: f64,
    pub diagnostics: Diagnostics,
}

fn check_inputs(h: &ComplexMatrix, slot: &ReceivedSlot) -> Result<()> {
    if h.rows() != slot.n() {
        return invalid(format!(
            "channel has {} rows but observations have length {}",
            h.rows(),
            slot.n()
        ));
    }
    Ok(())
}

fn check_dims(h: &ComplexMatrix, slot: &ReceivedSlot, dims: &SystemDims) -> Result<()> {
    check_inputs(h, slot)?;
    if h.cols() != dims.l || h.rows() != dims.n || slot.slot_length() != dims.m {
        return invalid("channel or slot does not match the system dimensions");
    }
    Ok(())
}

/// Indices of the `k` largest values, ties toward the smaller index.
pub fn top_k(values: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    order
}

/// `ρ_l = Σ_m |h_l^H y_m|²`.
pub fn correlator_energies(h: &ComplexMatrix, slot: &ReceivedSlot) -> Result<Vec<f64>> {
    check_inputs(h, slot)?;
    let mut energies = vec![0.0; h.cols()];
    for y in slot.observations() {
        // Accumulate h_l^H y for every l in one pass over the rows of H.
        let mut corr = vec![Complex64::new(0.0, 0.0); h.cols()];
        for (r, yr) in y.iter().enumerate() {
            for (c, hrc) in corr.iter_mut().zip(h.row(r)) {
                *c += hrc.conj() * yr;
            }
        }
        for (e, c) in energies.iter_mut().zip(&corr) {
            *e += c.norm_sqr();
        }
    }
    Ok(energies)
}

pub fn correlator_detect(h: &ComplexMatrix, slot: &ReceivedSlot, k: usize) -> Result<DetectionResult> {
    let energies = correlator_energies(h, slot)?;
    if k == 0 || k > energies.len() {
        return invalid(format!("need 1 <= K <= L, got K={k}"));
    }
    let support = top_k(&energies, k);
    let metric = support.iter().map(|&i| energies[i]).sum();
    Ok(DetectionResult {
        estimate: IndexVector::from_support(h.cols(), support)?,
        metric,
        diagnostics: Diagnostics::Energies(energies),
    })
}

/// Value of the Gaussian-approximation ML metric for one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussApproxMetric {
    pub value: f64,
    /// `Σ_m y_m^H V(x) y_m`.
    pub quadratic: f64,
    /// `φ(x) = ln det R(x)`.
    pub log_det: f64,
}

/// Covariance `Σ_{l∈support} w_l h_l h_l^H + γ^{-1} I`.
pub fn covariance(
    h: &ComplexMatrix,
    weights: impl IntoIterator<Item = (usize, f64)>,
    noise: &NoiseModel,
) -> ComplexMatrix {
    let mut r = ComplexMatrix::scaled_identity(h.rows(), noise.noise_variance());
    for (l, w) in weights {
        if w != 0.0 {
            r.add_outer(&h.column(l), w);
        }
    }
    r
}

/// Metric for an arbitrary (possibly empty) active set.
pub fn metric_for_support(
    h: &ComplexMatrix,
    slot: &ReceivedSlot,
    support: &[usize],
    noise: &NoiseModel,
) -> Result<GaussApproxMetric> {
    check_inputs(h, slot)?;
    if support.iter().any(|&l| l >= h.cols()) {
        return invalid("active index out of range");
    }
    let r = covariance(h, support.iter().map(|&l| (l, 1.0)), noise);
    let f = invert_and_logdet(&r)?;
    let quadratic: f64 = slot
        .observations()
        .iter()
        .map(|y| inner(y, &f.inverse().mul_vec(y)).re)
        .sum();
    let m = slot.slot_length() as f64;
    Ok(GaussApproxMetric {
        value: quadratic + m * f.log_det(),
        quadratic,
        log_det: f.log_det(),
    })
}

pub fn gauss_approx_metric(
    h: &ComplexMatrix,
    slot: &ReceivedSlot,
    x: &IndexVector,
    noise: &NoiseModel,
) -> Result<GaussApproxMetric> {
    if x.l() != h.cols() {
        return invalid("index vector length does not match the channel");
    }
    metric_for_support(h, slot, x.support(), noise)
}

#[derive(Debug, Clone)]
pub struct MlGaOptions {
    pub enumeration_cap: u128,
    pub record_metrics: bool,
}

impl Default for MlGaOptions {
    fn default() -> Self {
        Self {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            record_metrics: false,
        }
    }
}

/// Exhaustive ML-GA search over all `C(L, K)` index vectors.
pub fn ml_ga_detect(
    h: &ComplexMatrix,
    slot: &ReceivedSlot,
    dims: &SystemDims,
    noise: &NoiseModel,
) -> Result<DetectionResult> {
    ml_ga_detect_with(h, slot, dims, noise, &MlGaOptions::default())
}

/// Search state at one node of the lexicographic enumeration tree, i.e. for
/// a prefix `P` of chosen antennas with `A = R(P)`.
///
/// Everything is kept in projected coordinates: `G = H^H A^{-1} H`,
/// `T = H^H A^{-1} Y` and `quad_m = y_m^H A^{-1} y_m`, restricted to the
/// antennas that may still be appended. Adding antenna `j` is the
/// Sherman-Morrison step `A^{-1} ← A^{-1} - u u^H / (1 + h_j^H u)` with
/// `u = A^{-1} h_j`, which in these coordinates costs O(L² + L·M) instead
/// of O(N²) per touched vector.
#[derive(Clone)]
struct PrefixNode {
    /// First antenna covered by `gram` / `proj`.
    offset: usize,
    /// Number of antennas covered, `L - offset`.
    width: usize,
    /// Row-major `(L - offset)²` block of G.
    gram: Vec<Complex64>,
    /// Row-major `(L - offset) x M` block of T.
    proj: Vec<Complex64>,
    quad: Vec<f64>,
    log_det: f64,
}

impl PrefixNode {
    fn root(h: &ComplexMatrix, slot: &ReceivedSlot, noise: &NoiseModel) -> Self {
        let (l, m) = (h.cols(), slot.slot_length());
        let snr = noise.snr();
        let cols = h.columns();
        let mut gram = vec![Complex64::new(0.0, 0.0); l * l];
        for a in 0..l {
            for b in a..l {
                let g = inner(&cols[a], &cols[b]) * snr;
                gram[a * l + b] = g;
                gram[b * l + a] = g.conj();
            }
            gram[a * l + a].im = 0.0;
        }
        let mut proj = vec![Complex64::new(0.0, 0.0); l * m];
        for a in 0..l {
            for (mi, y) in slot.observations().iter().enumerate() {
                proj[a * m + mi] = inner(&cols[a], y) * snr;
            }
        }
        let quad = slot.observations().iter().map(|y| norm_sqr(y) * snr).collect();
        Self {
            offset: 0,
            width: l,
            gram,
            proj,
            quad,
            log_det: -(h.rows() as f64) * snr.ln(),
        }
    }

    /// Metric of `prefix ∪ {j}` without materializing the child node.
    fn leaf_metric(&self, j: usize) -> f64 {
        let w = self.width;
        let m = self.quad.len();
        let a = j - self.offset;
        let den = 1.0 + self.gram[a * w + a].re;
        let t = &self.proj[a * m..(a + 1) * m];
        let quad: f64 = self.quad.iter().zip(t).map(|(q, tj)| q - tj.norm_sqr() / den).sum();
        quad + m as f64 * (self.log_det + den.ln())
    }

    /// Child node for `prefix ∪ {j}`, covering antennas `j+1..L`.
    fn child(&self, j: usize) -> Self {
        let w = self.width;
        let m = self.quad.len();
        let a = j - self.offset;
        let den = 1.0 + self.gram[a * w + a].re;
        let t_row = &self.proj[a * m..(a + 1) * m];
        let keep = w - a - 1;
        let mut gram = Vec::with_capacity(keep * keep);
        for r in a + 1..w {
            let gra = self.gram[r * w + a] / den;
            for c in a + 1..w {
                gram.push(self.gram[r * w + c] - gra * self.gram[a * w + c]);
            }
        }
        let mut proj = Vec::with_capacity(keep * m);
        for r in a + 1..w {
            let gra = self.gram[r * w + a] / den;
            for (mi, tm) in t_row.iter().enumerate() {
                proj.push(self.proj[r * m + mi] - gra * tm);
            }
        }
        let quad = self
            .quad
            .iter()
            .zip(t_row)
            .map(|(q, t)| q - t.norm_sqr() / den)
            .collect();
        Self {
            offset: j + 1,
            width: keep,
            gram,
            proj,
            quad,
            log_det: self.log_det + den.ln(),
        }
    }
}

struct Search<'a> {
    l: usize,
    prefix: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
    metrics: Option<&'a mut Vec<f64>>,
}

impl Search<'_> {
    fn explore(&mut self, node: &PrefixNode, remaining: usize) {
        let start = node.offset;
        if remaining == 1 {
            for j in start..self.l {
                let metric = node.leaf_metric(j);
                if let Some(table) = self.metrics.as_deref_mut() {
                    table.push(metric);
                }
                // Strict comparison keeps the smallest lexicographic rank on ties.
                if self.best.as_ref().is_none_or(|(b, _)| metric < *b) {
                    let mut support = self.prefix.clone();
                    support.push(j);
                    self.best = Some((metric, support));
                }
            }
            return;
        }
        for j in start..=self.l - remaining {
            let child = node.child(j);
            self.prefix.push(j);
            self.explore(&child, remaining - 1);
            self.prefix.pop();
        }
    }
}

pub fn ml_ga_detect_with(
    h: &ComplexMatrix,
    slot: &ReceivedSlot,
    dims: &SystemDims,
    noise: &NoiseModel,
    options: &MlGaOptions,
) -> Result<DetectionResult> {
    check_dims(h, slot, dims)?;
    let count = binomial(dims.l, dims.k).unwrap_or(u128::MAX);
    if count > options.enumeration_cap {
        return Err(Error::Capacity {
            what: "ML-GA enumeration (use the CAVI detector instead)",
            count,
            cap: options.enumeration_cap,
        });
    }
    let mut table = Vec::new();
    let mut search = Search {
        l: dims.l,
        prefix: Vec::with_capacity(dims.k),
        best: None,
        metrics: options.record_metrics.then_some(&mut table),
    };
    search.explore(&PrefixNode::root(h, slot, noise), dims.k);
    let (metric, support) = search.best.expect("at least one candidate");
    if !metric.is_finite() {
        return Err(Error::Domain("ML-GA metric is not finite".into()));
    }
    Ok(DetectionResult {
        estimate: IndexVector::from_support(dims.l, support)?,
        metric,
        diagnostics: if options.record_metrics {
            Diagnostics::CandidateMetrics(table)
        } else {
            Diagnostics::None
        },
    })
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Exact log-likelihood `ln Π_m Σ_{s ∈ S^K} Pr(s) f(y_m | s, x)` (Gaussian mixture).
pub fn exact_mixture_log_likelihood(
    h: &ComplexMatrix,
    slot: &ReceivedSlot,
    x: &IndexVector,
    noise: &NoiseModel,
    constellation: &Constellation,
) -> Result<f64> {
    check_inputs(h, slot)?;
    if x.l() != h.cols() {
        return invalid("index vector length does not match the channel");
    }
    let q = constellation.order() as u128;
    let combos = (0..x.k())
        .try_fold(1u128, |acc, _| acc.checked_mul(q))
        .unwrap_or(u128::MAX);
    if combos > MIXTURE_SYMBOL_CAP {
        return Err(Error::Capacity {
            what: "exact mixture symbol combinations",
            count: combos,
            cap: MIXTURE_SYMBOL_CAP,
        });
    }
    let n = h.rows();
    let n0 = noise.noise_variance();
    let cols: Vec<_> = x.support().iter().map(|&l| h.column(l)).collect();
    // Every noiseless mean H_x s, enumerated once.
    let means: Vec<Vec<Complex64>> = (0..combos as usize)
        .map(|mut code| {
            let mut mean = vec![Complex64::new(0.0, 0.0); n];
            for col in &cols {
                let s = constellation.points()[code % constellation.order()];
                code /= constellation.order();
                for (mv, hv) in mean.iter_mut().zip(col) {
                    *mv += hv * s;
                }
            }
            mean
        })
        .collect();
    let log_norm = -(n as f64) * (std::f64::consts::PI * n0).ln() - (combos as f64).ln();
    let mut total = 0.0;
    let mut terms = vec![0.0; means.len()];
    for y in slot.observations() {
        for (t, mean) in terms.iter_mut().zip(&means) {
            let dist: f64 = y.iter().zip(mean).map(|(a, b)| (a - b).norm_sqr()).sum();
            *t = log_norm - dist / n0;
        }
        total += log_sum_exp(&terms);
    }
    Ok(total)
}

/// ML detection under the exact Gaussian-mixture likelihood; oracle scale only.
pub fn exact_mixture_ml_detect(
    h: &ComplexMatrix,
    slot: &ReceivedSlot,
    dims: &SystemDims,
    noise: &NoiseModel,
    constellation: &Constellation,
) -> Result<DetectionResult> {
    check_dims(h, slot, dims)?;
    let count = binomial(dims.l, dims.k).unwrap_or(u128::MAX);
    if count > MIXTURE_CANDIDATE_CAP {
        return Err(Error::Capacity {
            what: "exact mixture candidates",
            count,
            cap: MIXTURE_CANDIDATE_CAP,
        });
    }
    let mut best: Option<(f64, IndexVector)> = None;
    let mut table = Vec::with_capacity(count as usize);
    for rank in 0..count {
        let x = index_set_from_rank(rank, dims.l, dims.k)?;
        let ll = exact_mixture_log_likelihood(h, slot, &x, noise, constellation)?;
        table.push(ll);
        if best.as_ref().is_none_or(|(b, _)| ll > *b) {
            best = Some((ll, x));
        }
    }
    let (metric, estimate) = best.expect("at least one candidate");
    Ok(DetectionResult {
        estimate,
        metric,
        diagnostics: Diagnostics::CandidateMetrics(table),
    })
}

/// CAVI settings. Defaults: `μ = 0.5`, 10 sweeps, `q⁰ = 1/L`.
#[derive(Debug, Clone)]
pub struct CaviOptions {
    pub step_size: f64,
    pub iterations: usize,
    pub initial_q: Option<Vec<f64>>,
    pub record_trajectory: bool,
}

impl Default for CaviOptions {
    fn default() -> Self {
        Self {
            step_size: 0.5,
            iterations: 10,
            initial_q: None,
            record_trajectory: false,
        }
    }
}

/// Iterate of the CAVI detector.
///
/// `factor` always tracks `R(q) = Σ_l q_l h_l h_l^H + γ^{-1} I` at the
/// current (partially updated) `q`; `quad[m]` tracks `y_m^H R(q)^{-1} y_m`.
#[derive(Debug, Clone)]
pub struct VariationalState {
    pub q: Vec<f64>,
    pub factor: HermitianFactor,
    pub iteration: usize,
    pub step_size: f64,
    pub trajectory: Option<Vec<Vec<f64>>>,
    quad: Vec<f64>,
}

/// CAVI problem data: the channel columns and the slot.
pub struct Cavi<'a> {
    columns: Vec<Vec<Complex64>>,
    h: &'a ComplexMatrix,
    slot: &'a ReceivedSlot,
    noise: NoiseModel,
}

/// Log-evidence of both hypotheses for one coordinate.
#[derive(Debug, Clone, Copy)]
pub struct CoordinateEvidence {
    /// `ln χ_l(0)`.
    pub inactive: f64,
    /// `ln χ_l(1)`.
    pub active: f64,
}

impl CoordinateEvidence {
    /// Normalized `χ̄_l = χ_l(1) / (χ_l(0) + χ_l(1))`, evaluated in the log domain.
    pub fn posterior(&self) -> f64 {
        logistic(self.active - self.inactive)
    }
}

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

impl<'a> Cavi<'a> {
    pub fn new(h: &'a ComplexMatrix, slot: &'a ReceivedSlot, noise: &NoiseModel) -> Result<Self> {
        check_inputs(h, slot)?;
        Ok(Self {
            columns: h.columns(),
            h,
            slot,
            noise: *noise,
        })
    }

    fn l(&self) -> usize {
        self.columns.len()
    }

    /// Fresh state at `q`, with the factor built by direct inversion.
    pub fn init(&self, q: Vec<f64>, step_size: f64, record_trajectory: bool) -> Result<VariationalState> {
        if q.len() != self.l() {
            return invalid(format!("initial q has length {}, expected L={}", q.len(), self.l()));
        }
        if q.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return invalid("initial q entries must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&step_size) {
            return invalid(format!("step size must lie in [0, 1], got {step_size}"));
        }
        let mut state = VariationalState {
            trajectory: record_trajectory.then(|| vec![q.clone()]),
            q,
            factor: HermitianFactor::scaled_identity(self.h.rows(), 1.0)?,
            iteration: 0,
            step_size,
            quad: Vec::new(),
        };
        self.refresh(&mut state)?;
        Ok(state)
    }

    /// The surrogate covariance at the state's current `q`.
    pub fn covariance_at(&self, q: &[f64]) -> ComplexMatrix {
        covariance(self.h, q.iter().copied().enumerate(), &self.noise)
    }

    /// Rebuilds the factor from scratch to drop accumulated rank-1 round-off.
    pub fn refresh(&self, state: &mut VariationalState) -> Result<()> {
        state.factor = invert_and_logdet(&self.covariance_at(&state.q))?;
        state.quad = self
            .slot
            .observations()
            .iter()
            .map(|y| inner(y, &state.factor.inverse().mul_vec(y)).re)
            .collect();
        Ok(())
    }

    fn cavi_error(l: usize, iteration: usize, err: impl std::fmt::Display) -> Error {
        Error::Cavi {
            antenna: l + 1,
            iteration,
            reason: err.to_string(),
        }
    }

    /// Evidence for `x_l ∈ {0, 1}` with every other coordinate held at `q`.
    ///
    /// Also returns the rank-1 terms of `h_l` and the projections
    /// `h_l^H R^{-1} y_m`, which the commit step reuses.
    fn evaluate(
        &self,
        state: &VariationalState,
        l: usize,
    ) -> Result<(CoordinateEvidence, crate::numerics::Rank1Terms, Vec<f64>)> {
        let terms = state.factor.rank1_terms(&self.columns[l])?;
        let p2: Vec<f64> = self
            .slot
            .observations()
            .iter()
            .map(|y| inner(&terms.projected, y).norm_sqr())
            .collect();
        let p2_sum: f64 = p2.iter().sum();
        let quad_sum: f64 = state.quad.iter().sum();
        let m = self.slot.slot_length() as f64;
        let mut log_chi = [0.0; 2];
        for (x, out) in log_chi.iter_mut().enumerate() {
            let c = x as f64 - state.q[l];
            let den = terms.denominator(c);
            if !(den > SINGULAR_GUARD) {
                return Err(Self::cavi_error(
                    l,
                    state.iteration,
                    Error::SingularUpdate { denominator: den },
                ));
            }
            let quad = quad_sum - c * p2_sum / den;
            let log_det = state.factor.log_det() + den.ln();
            *out = -quad - m * log_det;
        }
        Ok((
            CoordinateEvidence {
                inactive: log_chi[0],
                active: log_chi[1],
            },
            terms,
            p2,
        ))
    }

    /// `ln χ_l(0)`, `ln χ_l(1)` at the current state without changing it.
    pub fn coordinate_evidence(&self, state: &VariationalState, l: usize) -> Result<CoordinateEvidence> {
        if l >= self.l() {
            return invalid("antenna index out of range");
        }
        Ok(self.evaluate(state, l)?.0)
    }

    /// One ascending sweep `l = 1..L`; refreshes the factor first when
    /// this is not the first sweep.
    pub fn sweep(&self, state: &mut VariationalState) -> Result<()> {
        if state.iteration > 0 {
            self.refresh(state)?;
        }
        state.iteration += 1;
        let mu = state.step_size;
        for l in 0..self.l() {
            let (evidence, terms, p2) = self.evaluate(state, l)?;
            let old = state.q[l];
            let new = (1.0 - mu) * old + mu * evidence.posterior();
            if !new.is_finite() {
                return Err(Self::cavi_error(l, state.iteration, "q became NaN"));
            }
            let c = new - old;
            if c != 0.0 {
                let den = terms.denominator(c);
                state
                    .factor
                    .apply_rank1(&terms, c)
                    .map_err(|e| Self::cavi_error(l, state.iteration, e))?;
                for (q, p) in state.quad.iter_mut().zip(&p2) {
                    *q -= c * p / den;
                }
            }
            state.q[l] = new;
        }
        if let Some(t) = state.trajectory.as_mut() {
            t.push(state.q.clone());
        }
        Ok(())
    }
}

/// CAVI index detection: `iterations` sweeps, then the `K` largest `q_l`.
pub fn cavi_detect(
    h: &ComplexMatrix,
    slot: &ReceivedSlot,
    dims: &SystemDims,
    noise: &NoiseModel,
    options: &CaviOptions,
) -> Result<DetectionResult> {
    check_dims(h, slot, dims)?;
    if options.iterations == 0 {
        return invalid("CAVI needs at least one iteration");
    }
    let q0 = options
        .initial_q
        .clone()
        .unwrap_or_else(|| vec![1.0 / dims.l as f64; dims.l]);
    let cavi = Cavi::new(h, slot, noise)?;
    let mut state = cavi.init(q0, options.step_size, options.record_trajectory)?;
    for _ in 0..options.iterations {
        cavi.sweep(&mut state)?;
    }
    let support = top_k(&state.q, dims.k);
    let metric = support.iter().map(|&i| state.q[i]).sum();
    Ok(DetectionResult {
        estimate: IndexVector::from_support(dims.l, support)?,
        metric,
        diagnostics: match state.trajectory {
            Some(t) => Diagnostics::Trajectory(t),
            None => Diagnostics::None,
        },
    })
}

/// Number of antennas where the two activity patterns differ.
pub fn pairwise_hamming(x: &IndexVector, other: &IndexVector) -> Result<usize> {
    if x.l() != other.l() {
        return invalid(format!(
            "index vectors have different lengths {} and {}",
            x.l(),
            other.l()
        ));
    }
    Ok((0..x.l()).filter(|&i| x.is_active(i) != other.is_active(i)).count())
}
