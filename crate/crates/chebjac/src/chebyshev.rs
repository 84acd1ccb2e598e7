//! Relaxation-weight schedules and their convergence predictions.
//!
//! A cycle of M weighted-Jacobi sweeps with weights
//!
//! ```text
//! w_n = 2 / [ k_max + k_min - (k_max - k_min) cos(pi (2n-1) / (2M)) ]
//! ```
//!
//! contracts every error mode kappa in [k_min, k_max] by the amplification
//! factor G_M(kappa) = prod (1 - w_n kappa), which equals a rescaled
//! Chebyshev polynomial and is bounded by 1/|T_M(kt0)| where kt0 is the
//! image of kappa = 0 under the affine map sending [k_min, k_max] to
//! [-1, 1]. That bound is computable before any sweep runs, which is what
//! makes cycle sizes predictable. All magnitude evaluations for arguments
//! beyond [-1, 1] run in the log domain, so nothing overflows even for
//! cycles of millions of sweeps.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::stencil::SpectralBounds;

/// Name of the permutation applied to a schedule's weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderingTag {
    /// Weights in the generated order, largest first.
    NaturalDescending,
    /// Power-of-two pairing recurrence.
    LebedevFinogenov,
    /// Greedy max-distance interleave for arbitrary M.
    Interleaved,
    /// Caller-supplied permutation.
    Explicit,
}

impl std::fmt::Display for OrderingTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            OrderingTag::NaturalDescending => "natural",
            OrderingTag::LebedevFinogenov => "lebedev-finogenov",
            OrderingTag::Interleaved => "interleaved",
            OrderingTag::Explicit => "explicit",
        };
        f.write_str(s)
    }
}

impl FromStr for OrderingTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(OrderingTag::NaturalDescending),
            "lebedev-finogenov" => Ok(OrderingTag::LebedevFinogenov),
            "interleaved" => Ok(OrderingTag::Interleaved),
            "explicit" => Ok(OrderingTag::Explicit),
            other => Err(Error::Parse(format!("unknown ordering name {other:?}"))),
        }
    }
}

/// A cycle's relaxation weights plus the spectral interval that produced
/// them and the permutation currently applied.
#[derive(Clone, Debug)]
pub struct WeightSchedule {
    weights: Vec<f64>,
    bounds: SpectralBounds,
    ordering: OrderingTag,
}

impl WeightSchedule {
    pub fn m(&self) -> u32 {
        self.weights.len() as u32
    }

    /// Weights in their current (possibly permuted) order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bounds(&self) -> SpectralBounds {
        self.bounds
    }

    pub fn ordering(&self) -> OrderingTag {
        self.ordering
    }

    pub(crate) fn with_parts(
        weights: Vec<f64>,
        bounds: SpectralBounds,
        ordering: OrderingTag,
    ) -> Self {
        WeightSchedule {
            weights,
            bounds,
            ordering,
        }
    }
}

/// Affine map of kappa sending [k_min, k_max] onto [-1, +1].
pub fn rescale_kappa(kappa: f64, bounds: &SpectralBounds) -> Result<f64> {
    let (lo, hi) = (bounds.kappa_min, bounds.kappa_max);
    if hi <= lo {
        return Err(Error::domain(format!(
            "degenerate spectral interval [{lo}, {hi}] cannot be rescaled"
        )));
    }
    Ok(2.0 * (kappa - lo) / (hi - lo) - 1.0)
}

/// arccosh(1 + eps) for eps >= 0, stable for small eps.
fn acosh_1p(eps: f64) -> f64 {
    (eps + (2.0 * eps + eps * eps).sqrt()).ln_1p()
}

/// |kt0| - 1 computed without cancellation: the rescaled kappa = 0 sits at
/// -(k_max + k_min)/(k_max - k_min), a distance 2 k_min/(k_max - k_min)
/// beyond -1.
fn kt0_eps(bounds: &SpectralBounds) -> Result<f64> {
    let (lo, hi) = (bounds.kappa_min, bounds.kappa_max);
    if hi <= lo {
        return Err(Error::domain(format!(
            "degenerate spectral interval [{lo}, {hi}]"
        )));
    }
    Ok(2.0 * lo / (hi - lo))
}

/// log|T_m(1 + eps)| evaluated as log cosh(t) = t + log((1 + e^{-2t})/2)
/// with t = m arccosh(1 + eps); never overflows.
fn log_abs_chebyshev_eps(m: u32, eps: f64) -> f64 {
    let t = m as f64 * acosh_1p(eps);
    t + ((-2.0 * t).exp().ln_1p() - std::f64::consts::LN_2)
}

/// log|T_m(x)| for |x| >= 1, computed in the log domain.
///
/// Callers that know x as 1 + eps should prefer keeping eps exact; forming
/// x first and subtracting 1 here costs up to ~1e-12 relative for the
/// near-degenerate intervals of large grids, which is harmless for bound
/// reporting but documented all the same.
pub fn log_abs_chebyshev(m: u32, x: f64) -> Result<f64> {
    let ax = x.abs();
    if ax < 1.0 {
        return Err(Error::domain(format!(
            "log_abs_chebyshev requires |x| >= 1, got {x}"
        )));
    }
    Ok(log_abs_chebyshev_eps(m, ax - 1.0))
}

/// Smallest cycle size M whose end-of-cycle bound 1/|T_M(kt0)| is <= sigma.
///
/// Seeds with the closed form ceil(arccosh(1/sigma)/arccosh|kt0|), then
/// walks by +-1 against the log-domain evaluation; a relative slack of
/// 1e-12 on the log comparison absorbs evaluation round-off so that exact
/// equality cases resolve to the smaller M.
pub fn min_cycle_size(sigma: f64, bounds: &SpectralBounds) -> Result<u32> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::domain(format!(
            "sigma must lie in (0, 1), got {sigma}"
        )));
    }
    let eps = kt0_eps(bounds)?;
    let ln_sigma = sigma.ln();
    // Satisfied iff log|T_M| >= -ln sigma.
    let ok = |m: u32| log_abs_chebyshev_eps(m, eps) + ln_sigma >= -1e-12 * ln_sigma.abs().max(1.0);
    let target = acosh_1p((1.0 - sigma) / sigma);
    let mut m = (target / acosh_1p(eps)).ceil().max(1.0).min(u32::MAX as f64) as u32;
    let mut steps = 0;
    while m > 1 && ok(m - 1) {
        m -= 1;
        steps += 1;
        if steps > 10_000 {
            return Err(Error::domain("min_cycle_size walk failed to settle"));
        }
    }
    while !ok(m) {
        m = m
            .checked_add(1)
            .ok_or_else(|| Error::domain("cycle size overflow"))?;
        steps += 1;
        if steps > 10_000 {
            return Err(Error::domain("min_cycle_size walk failed to settle"));
        }
    }
    Ok(m)
}

/// Optimal M-sweep schedule for modes in `bounds`, in descending-weight
/// order. The weights are the reciprocals of the Chebyshev roots mapped
/// onto [k_min, k_max].
pub fn make_weights(m: u32, bounds: &SpectralBounds) -> Result<WeightSchedule> {
    if m == 0 {
        return Err(Error::domain("cycle size M must be >= 1"));
    }
    let (lo, hi) = (bounds.kappa_min, bounds.kappa_max);
    let sum = hi + lo;
    let diff = hi - lo;
    let mut weights = Vec::with_capacity(m as usize);
    for n in 1..=m {
        let angle = std::f64::consts::PI * (2.0 * n as f64 - 1.0) / (2.0 * m as f64);
        weights.push(2.0 / (sum - diff * angle.cos()));
    }
    debug_assert!(weights.windows(2).all(|w| w[0] >= w[1]));
    Ok(WeightSchedule::with_parts(
        weights,
        *bounds,
        OrderingTag::NaturalDescending,
    ))
}

/// End-of-cycle amplification G_M(kappa) via the closed Chebyshev form.
///
/// Inside [k_min, k_max] this is cos(M arccos kt)/T_M(kt0), immune to the
/// round-off pile-up of the naive product; outside, both numerator and
/// denominator are evaluated in the log domain. Permutation-independent by
/// construction. For a degenerate interval (all weights equal) the product
/// form is used directly.
pub fn amplification(kappa: f64, schedule: &WeightSchedule) -> f64 {
    let bounds = schedule.bounds();
    let m = schedule.m();
    if bounds.kappa_max <= bounds.kappa_min {
        let w = 1.0 / bounds.kappa_min;
        return (1.0 - w * kappa).powi(m as i32);
    }
    let kt = rescale_kappa(kappa, &bounds).expect("non-degenerate checked above");
    let kt0 = rescale_kappa(0.0, &bounds).expect("non-degenerate checked above");
    // T_M on (-inf, -1]: sign (-1)^M, magnitude e^{log|T_M|}.
    let l0 = log_abs_chebyshev_eps(m, kt0.abs() - 1.0);
    let den_sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    if kt.abs() <= 1.0 {
        let num = (m as f64 * kt.acos()).cos();
        den_sign * num * (-l0).exp()
    } else {
        let l = log_abs_chebyshev_eps(m, kt.abs() - 1.0);
        let num_sign = if kt >= 1.0 {
            1.0
        } else if m % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        den_sign * num_sign * (l - l0).exp()
    }
}

/// Naive product form prod(1 - w_n kappa); kept as a cross-check oracle.
/// Accurate only for small cycles (round-off accumulates beyond M ~ 64).
pub fn amplification_product(kappa: f64, weights: &[f64]) -> f64 {
    weights.iter().fold(1.0, |g, w| g * (1.0 - w * kappa))
}

/// Per-iteration contraction factor |G_M(kappa)|^{1/M}.
pub fn per_iteration_factor(kappa: f64, schedule: &WeightSchedule) -> f64 {
    amplification(kappa, schedule)
        .abs()
        .powf(1.0 / schedule.m() as f64)
}

/// Cycle-level convergence prediction.
#[derive(Clone, Copy, Debug)]
pub struct AmplificationProfile {
    /// Worst-mode end-of-cycle contraction, 1/|T_M(kt0)|; strictly < 1.
    pub bound: f64,
    /// Average log-contraction per sweep, log|T_M(kt0)| / M.
    pub rate: f64,
    /// Image of kappa = 0 under the rescale; strictly < -1.
    pub kappa_tilde_zero: f64,
}

impl AmplificationProfile {
    /// Per-sweep contraction factor e^{-rate}.
    pub fn per_iteration_bound(&self) -> f64 {
        (-self.rate).exp()
    }
}

/// Predicts the end-of-cycle contraction for a cycle of size M on `bounds`.
pub fn amplification_bound(m: u32, bounds: &SpectralBounds) -> Result<AmplificationProfile> {
    if m == 0 {
        return Err(Error::domain("cycle size M must be >= 1"));
    }
    let eps = kt0_eps(bounds)?;
    let l0 = log_abs_chebyshev_eps(m, eps);
    Ok(AmplificationProfile {
        bound: (-l0).exp(),
        rate: l0 / m as f64,
        kappa_tilde_zero: rescale_kappa(0.0, bounds)?,
    })
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// (1/M) sum of 1/w_n. Equals (k_max + k_min)/2 identically; pairwise
/// summation keeps the identity observable to ~1e-15 even for M = 10^4.
pub fn harmonic_mean(schedule: &WeightSchedule) -> f64 {
    let inv: Vec<f64> = schedule.weights().iter().map(|w| 1.0 / w).collect();
    pairwise_sum(&inv) / schedule.m() as f64
}

/// Geometric mean of 1/w_n, via exp of the mean log. Decreases with M
/// toward ((sqrt k_max + sqrt k_min)/2)^2.
pub fn geometric_mean_inverse(schedule: &WeightSchedule) -> f64 {
    let logs: Vec<f64> = schedule.weights().iter().map(|w| -w.ln()).collect();
    (pairwise_sum(&logs) / schedule.m() as f64).exp()
}

/// Sign convention of the operator diagonal a caller works with. The SOR
/// estimate is invariant under it (the two sign flips cancel); the
/// parameter only documents which convention the caller's diagonal uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagonalSign {
    /// Diagonal entries negative (the Laplacian convention used here).
    NegativeDiagonal,
    /// Diagonal entries positive (the -Laplacian convention).
    PositiveDiagonal,
}

/// SOR relaxation-factor estimate: the geometric mean of the schedule's
/// weights, 1/geometric_mean_inverse. For consistently ordered problems it
/// reproduces the classical optimal factor to O(N^-2); see
/// [`sor_estimate_limit`] for its M -> infinity closed form.
pub fn estimate_sor_omega(schedule: &WeightSchedule, _sign: DiagonalSign) -> f64 {
    1.0 / geometric_mean_inverse(schedule)
}

/// M -> infinity limit of [`estimate_sor_omega`]:
/// 4/(sqrt k_max + sqrt k_min)^2.
pub fn sor_estimate_limit(bounds: &SpectralBounds) -> f64 {
    let s = bounds.kappa_max.sqrt() + bounds.kappa_min.sqrt();
    4.0 / (s * s)
}

/// Writes the schedule in its plain-text exchange format: header lines for
/// M, the spectral interval, and the ordering name, then one weight per
/// line in scheduled order.
pub fn write_schedule(schedule: &WeightSchedule) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "m = {}", schedule.m());
    let _ = writeln!(out, "kappa_min = {}", schedule.bounds().kappa_min);
    let _ = writeln!(out, "kappa_max = {}", schedule.bounds().kappa_max);
    let _ = writeln!(out, "ordering = {}", schedule.ordering());
    for w in schedule.weights() {
        let _ = writeln!(out, "{w}");
    }
    out
}

/// Parses the text produced by [`write_schedule`]. Blank lines and `#`
/// comments are ignored; all four headers are required and must precede
/// the weights.
pub fn parse_schedule(text: &str) -> Result<WeightSchedule> {
    let mut m: Option<u32> = None;
    let mut kappa_min: Option<f64> = None;
    let mut kappa_max: Option<f64> = None;
    let mut ordering: Option<OrderingTag> = None;
    let mut weights: Vec<f64> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            if !weights.is_empty() {
                return Err(Error::Parse(format!(
                    "line {}: header {key:?} after weight lines",
                    lineno + 1
                )));
            }
            let (key, value) = (key.trim(), value.trim());
            let parse_f64 = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number {v:?}", lineno + 1)))
            };
            match key {
                "m" => {
                    m = Some(value.parse::<u32>().map_err(|_| {
                        Error::Parse(format!("line {}: bad cycle size {value:?}", lineno + 1))
                    })?)
                }
                "kappa_min" => kappa_min = Some(parse_f64(value)?),
                "kappa_max" => kappa_max = Some(parse_f64(value)?),
                "ordering" => ordering = Some(value.parse()?),
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown schedule header {other:?}",
                        lineno + 1
                    )))
                }
            }
        } else {
            let w = line
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {}: bad weight {line:?}", lineno + 1)))?;
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Parse(format!(
                    "line {}: weight must be finite and positive",
                    lineno + 1
                )));
            }
            weights.push(w);
        }
    }
    let m = m.ok_or_else(|| Error::Parse("schedule missing 'm' header".into()))?;
    let kappa_min = kappa_min.ok_or_else(|| Error::Parse("schedule missing 'kappa_min'".into()))?;
    let kappa_max = kappa_max.ok_or_else(|| Error::Parse("schedule missing 'kappa_max'".into()))?;
    let ordering = ordering.ok_or_else(|| Error::Parse("schedule missing 'ordering'".into()))?;
    if weights.len() != m as usize {
        return Err(Error::Parse(format!(
            "schedule declares m = {m} but lists {} weights",
            weights.len()
        )));
    }
    let bounds = SpectralBounds::new(kappa_min, kappa_max)?;
    Ok(WeightSchedule::with_parts(weights, bounds, ordering))
}
