//! RCSM signal model: system dimensions, QAM alphabets, the index-set
//! bit mapping and slot transmission over a flat MIMO channel.
//!
//! Antenna indices are 0-based in memory and 1-based whenever they are
//! displayed.

use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::numerics::{ComplexMatrix, RngStream};

/// `L` transmit antennas, `N` receive antennas, `K` active antennas, slot length `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemDims {
    pub l: usize,
    pub n: usize,
    pub k: usize,
    pub m: usize,
}

impl SystemDims {
    pub fn new(l: usize, n: usize, k: usize, m: usize) -> Result<Self> {
        if k == 0 || k > l {
            return invalid(format!("need 1 <= K <= L, got K={k}, L={l}"));
        }
        if n == 0 {
            return invalid("N must be at least 1");
        }
        if m == 0 {
            return invalid("M must be at least 1");
        }
        Ok(Self { l, n, k, m })
    }
}

/// SNR `γ` with unit symbol energy, so the noise variance is `1/γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    snr: f64,
}

impl NoiseModel {
    pub fn from_linear(snr: f64) -> Result<Self> {
        if !(snr > 0.0 && snr.is_finite()) {
            return invalid(format!("SNR must be positive and finite, got {snr}"));
        }
        Ok(Self { snr })
    }

    pub fn from_db(snr_db: f64) -> Result<Self> {
        Self::from_linear(db_to_linear(snr_db))
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn noise_variance(&self) -> f64 {
        1.0 / self.snr
    }

    pub fn symbol_variance(&self) -> f64 {
        1.0
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Unit-energy square QAM alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
}

impl Constellation {
    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.order().trailing_zeros()
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.order() as f64
    }
}

/// Square QAM with `order ∈ {4, 16, 64}`, scaled to unit mean energy.
///
/// Points are listed row by row on the `±1, ±3, ...` grid.
pub fn qam_constellation(order: usize) -> Result<Constellation> {
    let side = match order {
        4 => 2,
        16 => 4,
        64 => 8,
        _ => return invalid(format!("unsupported QAM order {order}; expected 4, 16 or 64")),
    };
    // Mean energy of the unscaled grid is 2(side² - 1)/3.
    let scale = (2.0 * (order as f64 - 1.0) / 3.0).sqrt().recip();
    let level = |i: usize| (2.0 * i as f64 - (side as f64 - 1.0)) * scale;
    let points = (0..side)
        .flat_map(|i| (0..side).map(move |j| (i, j)))
        .map(|(i, j)| Complex64::new(level(j), level(side - 1 - i)))
        .collect();
    Ok(Constellation { points })
}

/// `C(n, k)` in exact arithmetic, `None` on overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc·(n-i)/(i+1) stays integral at every step.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

fn checked_binomial(l: usize, k: usize) -> Result<u128> {
    match binomial(l, k) {
        Some(c) => Ok(c),
        None => invalid(format!("C({l}, {k}) overflows 128 bits")),
    }
}

/// `⌊log₂ C(L, K)⌋`.
pub fn im_bit_count(l: usize, k: usize) -> Result<u32> {
    if k == 0 || k > l {
        return invalid(format!("need 1 <= K <= L, got K={k}, L={l}"));
    }
    let c = checked_binomial(l, k)?;
    Ok(127 - c.leading_zeros())
}

/// Spectral efficiency `K·log₂|S| + ⌊log₂ C(L,K)⌋ / M` in bits per symbol vector.
pub fn bits_per_symbol(l: usize, k: usize, m: usize, order: usize) -> Result<f64> {
    if !order.is_power_of_two() || order < 2 {
        return invalid(format!("constellation order must be a power of 2, got {order}"));
    }
    if m == 0 {
        return invalid("M must be at least 1");
    }
    let im = im_bit_count(l, k)?;
    Ok(k as f64 * order.trailing_zeros() as f64 + im as f64 / m as f64)
}

/// Binary activity pattern with exactly `K ≥ 1` active antennas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexVector {
    l: usize,
    support: Vec<usize>,
}

impl IndexVector {
    /// From 0-based active indices in any order.
    pub fn from_support(l: usize, mut support: Vec<usize>) -> Result<Self> {
        if support.is_empty() {
            return invalid("an index vector needs at least one active antenna");
        }
        support.sort_unstable();
        if support.windows(2).any(|w| w[0] == w[1]) {
            return invalid("duplicate active index");
        }
        if support[support.len() - 1] >= l {
            return invalid(format!("active index out of range for L={l}"));
        }
        Ok(Self { l, support })
    }

    /// From 1-based active indices, as used in reports.
    pub fn from_one_based(l: usize, support: &[usize]) -> Result<Self> {
        if support.contains(&0) {
            return invalid("1-based indices start at 1");
        }
        Self::from_support(l, support.iter().map(|i| i - 1).collect())
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }

    /// Sorted 0-based active indices.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.support.iter().map(|i| i + 1).collect()
    }

    pub fn is_active(&self, l: usize) -> bool {
        self.support.binary_search(&l).is_ok()
    }

    pub fn flags(&self) -> Vec<bool> {
        (0..self.l).map(|i| self.is_active(i)).collect()
    }
}

impl fmt::Display for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, idx) in self.support.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", idx + 1)?;
        }
        write!(f, "}}")
    }
}

/// The `rank`-th K-subset of `{0..L}` in lexicographic order.
pub fn index_set_from_rank(rank: u128, l: usize, k: usize) -> Result<IndexVector> {
    if k == 0 || k > l {
        return invalid(format!("need 1 <= K <= L, got K={k}, L={l}"));
    }
    let total = checked_binomial(l, k)?;
    if rank >= total {
        return invalid(format!("rank {rank} out of range for C({l}, {k}) = {total}"));
    }
    let mut rest = rank;
    let mut support = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot - 1;
        let mut candidate = next;
        loop {
            // Subsets whose element at this slot is `candidate`.
            let count = binomial(l - candidate - 1, remaining).expect("bounded by total");
            if rest < count {
                break;
            }
            rest -= count;
            candidate += 1;
        }
        support.push(candidate);
        next = candidate + 1;
    }
    IndexVector::from_support(l, support)
}

/// Inverse of [`index_set_from_rank`].
pub fn rank_from_index_set(x: &IndexVector) -> u128 {
    let (l, k) = (x.l(), x.k());
    let mut rank = 0u128;
    let mut next = 0;
    for (slot, &chosen) in x.support().iter().enumerate() {
        let remaining = k - slot - 1;
        for skipped in next..chosen {
            rank += binomial(l - skipped - 1, remaining).expect("bounded by C(L, K)");
        }
        next = chosen + 1;
    }
    rank
}

/// The `M` transmitted symbol vectors of one slot; all share one support.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotSignal {
    l: usize,
    symbols: Vec<Vec<Complex64>>,
}

impl SlotSignal {
    /// Wraps explicit symbol vectors; rejects slots whose support changes with `m`.
    pub fn from_symbols(l: usize, symbols: Vec<Vec<Complex64>>) -> Result<Self> {
        if symbols.is_empty() {
            return invalid("a slot needs at least one symbol vector");
        }
        if symbols.iter().any(|s| s.len() != l) {
            return invalid(format!("every symbol vector must have length L={l}"));
        }
        let active = |s: &[Complex64]| -> Vec<bool> { s.iter().map(|z| z.norm_sqr() > 0.0).collect() };
        let first = active(&symbols[0]);
        if symbols.iter().any(|s| active(s) != first) {
            return invalid("support changes within the slot");
        }
        Ok(Self { l, symbols })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn slot_length(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[Vec<Complex64>] {
        &self.symbols
    }

    /// 0-based indices of the nonzero entries (shared by every `s_m`).
    pub fn support(&self) -> Vec<usize> {
        (0..self.l).filter(|&i| self.symbols[0][i].norm_sqr() > 0.0).collect()
    }
}

/// Draws `M` symbol vectors with i.i.d. uniform symbols on `supp(x)`.
pub fn transmit_slot(
    x: &IndexVector,
    dims: &SystemDims,
    constellation: &Constellation,
    rng: &mut RngStream,
) -> Result<SlotSignal> {
    if x.l() != dims.l || x.k() != dims.k {
        return invalid("index vector does not match system dimensions");
    }
    let zero = Complex64::new(0.0, 0.0);
    let symbols = (0..dims.m)
        .map(|_| {
            let mut s = vec![zero; dims.l];
            for &i in x.support() {
                s[i] = constellation.points()[rng.index(constellation.order())];
            }
            s
        })
        .collect();
    Ok(SlotSignal { l: dims.l, symbols })
}

/// The `M` received vectors `y_m` of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSlot {
    n: usize,
    observations: Vec<Vec<Complex64>>,
}

impl ReceivedSlot {
    pub fn from_observations(observations: Vec<Vec<Complex64>>) -> Result<Self> {
        let Some(first) = observations.first() else {
            return invalid("a slot needs at least one observation");
        };
        let n = first.len();
        if n == 0 || observations.iter().any(|y| y.len() != n) {
            return invalid("observations must share a positive length N");
        }
        if observations
            .iter()
            .flatten()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return invalid("observations must be finite");
        }
        Ok(Self { n, observations })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn slot_length(&self) -> usize {
        self.observations.len()
    }

    pub fn observations(&self) -> &[Vec<Complex64>] {
        &self.observations
    }
}

/// `y_m = H s_m + n_m` with `n_m ~ CN(0, γ^{-1} I)`.
pub fn simulate_received_slot(
    h: &ComplexMatrix,
    slot: &SlotSignal,
    noise: &NoiseModel,
    rng: &mut RngStream,
) -> Result<ReceivedSlot> {
    if h.cols() != slot.l() {
        return invalid(format!(
            "channel has {} columns but the slot has L={}",
            h.cols(),
            slot.l()
        ));
    }
    let n0 = noise.noise_variance();
    let observations = slot
        .symbols()
        .iter()
        .map(|s| {
            let mut y = h.mul_vec(s);
            for v in y.iter_mut() {
                *v += rng.cscg(n0);
            }
            y
        })
        .collect();
    ReceivedSlot::from_observations(observations)
}

/// Channel with i.i.d. `CN(0, 1/N)` entries, so each column has unit expected energy.
pub fn sample_channel(rng: &mut RngStream, n: usize, l: usize) -> Result<ComplexMatrix> {
    crate::numerics::sample_cscg(rng, n, l, 1.0 / n as f64)
}
