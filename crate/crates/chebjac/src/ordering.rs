//! Weight orderings.
//!
//! In exact arithmetic the end-of-cycle amplification is independent of the
//! order in which a cycle's weights are applied. In floating point it is
//! not: runs of consecutive large weights can inflate intermediate iterates
//! until precision (or range) is gone. The permutations here interleave
//! large and small weights so intermediate growth stays bounded.

use crate::chebyshev::{OrderingTag, WeightSchedule};
use crate::error::{Error, Result};

/// A permutation of 1..=M applied to a weight schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingPlan {
    name: OrderingTag,
    perm: Vec<u32>,
}

impl OrderingPlan {
    pub fn name(&self) -> OrderingTag {
        self.name
    }

    /// 1-based indices into the descending-weight order.
    pub fn perm(&self) -> &[u32] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    fn checked(name: OrderingTag, perm: Vec<u32>) -> Result<Self> {
        let m = perm.len();
        let mut seen = vec![false; m];
        for &p in &perm {
            let idx = p
                .checked_sub(1)
                .map(|i| i as usize)
                .filter(|&i| i < m)
                .ok_or_else(|| {
                    Error::Ordering(format!("index {p} outside 1..={m}"))
                })?;
            if seen[idx] {
                return Err(Error::Ordering(format!("index {p} repeated")));
            }
            seen[idx] = true;
        }
        Ok(OrderingPlan { name, perm })
    }
}

impl std::fmt::Display for OrderingPlan {
    /// Whitespace-separated 1-based index list.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, p) in self.perm.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Parses a whitespace-separated index list as an explicit plan.
pub fn parse_plan(text: &str) -> Result<OrderingPlan> {
    let perm = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<u32>()
                .map_err(|_| Error::Ordering(format!("bad index {tok:?}")))
        })
        .collect::<Result<Vec<u32>>>()?;
    if perm.is_empty() {
        return Err(Error::Ordering("empty permutation".into()));
    }
    OrderingPlan::checked(OrderingTag::Explicit, perm)
}

/// Identity ordering: weights stay in descending order.
pub fn natural(m: u32) -> OrderingPlan {
    OrderingPlan {
        name: OrderingTag::NaturalDescending,
        perm: (1..=m).collect(),
    }
}

/// Pairing recurrence for M = 2^r: each step interleaves the previous
/// permutation j with its reflection 2^r + 1 - j, so adjacent positions
/// always hold an index and its mirror.
pub fn lebedev_finogenov(r: u32) -> Result<OrderingPlan> {
    if r > 30 {
        return Err(Error::Ordering(format!("2^{r} exceeds the supported cycle size")));
    }
    let mut perm: Vec<u32> = vec![1];
    for level in 1..=r {
        let m = 1u32 << level;
        let mut next = Vec::with_capacity(m as usize);
        for &j in &perm {
            next.push(j);
            next.push(m + 1 - j);
        }
        perm = next;
    }
    OrderingPlan::checked(OrderingTag::LebedevFinogenov, perm)
}

/// Max/min interleave for arbitrary M, usable when M is not a power of two.
///
/// Greedy Leja-style construction on the underlying Chebyshev root nodes
/// z_n = -cos(pi (2n-1)/(2M)): start from index 1 (largest weight) and
/// repeatedly append the index maximizing the sum of log-distances to the
/// nodes already placed, ties to the smaller index. Successive picks
/// alternate between the far ends and midpoints of the remaining range,
/// which keeps runs of large weights apart. The log-potential greedy is
/// used instead of naive index bisection because the latter is numerically
/// catastrophic for large M (intermediate iterates overflow).
pub fn interleaved(m: u32) -> Result<OrderingPlan> {
    if m == 0 {
        return Err(Error::Ordering("cycle size must be >= 1".into()));
    }
    let n = m as usize;
    let nodes: Vec<f64> = (1..=n)
        .map(|k| -(std::f64::consts::PI * (2.0 * k as f64 - 1.0) / (2.0 * m as f64)).cos())
        .collect();
    let mut perm: Vec<u32> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut log_pot = vec![0.0f64; n];
    let mut last = 0usize;
    perm.push(1);
    used[0] = true;
    for _ in 1..n {
        for j in 0..n {
            if !used[j] {
                log_pot[j] += (nodes[j] - nodes[last]).abs().ln();
            }
        }
        let mut best = usize::MAX;
        let mut best_pot = f64::NEG_INFINITY;
        for j in 0..n {
            if !used[j] && log_pot[j] > best_pot {
                best = j;
                best_pot = log_pot[j];
            }
        }
        used[best] = true;
        perm.push(best as u32 + 1);
        last = best;
    }
    OrderingPlan::checked(OrderingTag::Interleaved, perm)
}

/// Caller-supplied permutation, validated as a bijection on 1..=len.
pub fn explicit(perm: Vec<u32>) -> Result<OrderingPlan> {
    if perm.is_empty() {
        return Err(Error::Ordering("empty permutation".into()));
    }
    OrderingPlan::checked(OrderingTag::Explicit, perm)
}

/// Pairing recurrence when M is a power of two, max/min interleave
/// otherwise.
pub fn default_plan(m: u32) -> Result<OrderingPlan> {
    if m == 0 {
        return Err(Error::Ordering("cycle size must be >= 1".into()));
    }
    if m.is_power_of_two() {
        lebedev_finogenov(m.trailing_zeros())
    } else {
        interleaved(m)
    }
}

/// Permutes the schedule's weights: output position i receives the weight
/// at (1-based) index perm[i] of the current order. The weight multiset is
/// unchanged. Plans are normally applied to freshly generated
/// (descending-order) schedules; applying a second plan composes with
/// whatever permutation is already in place, and the tag records only the
/// last plan applied.
pub fn apply_ordering(schedule: &WeightSchedule, plan: &OrderingPlan) -> Result<WeightSchedule> {
    if plan.len() != schedule.m() as usize {
        return Err(Error::Ordering(format!(
            "plan length {} does not match cycle size {}",
            plan.len(),
            schedule.m()
        )));
    }
    let src = schedule.weights();
    let weights: Vec<f64> = plan.perm().iter().map(|&p| src[p as usize - 1]).collect();
    Ok(WeightSchedule::with_parts(
        weights,
        schedule.bounds(),
        plan.name(),
    ))
}
