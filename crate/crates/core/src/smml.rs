//! Exact Strict MML for binomial data under a uniform prior on the success
//! probability.
//!
//! Every datum y ∈ {0..n} is equally likely a priori (marginal r(y) =
//! 1/(n+1)), and a code maps contiguous segments of the data space to shared
//! point estimates. The expected two-part codelength of a partition is
//!
//!   I_S = -Σ_j q_j log q_j - Σ_j Σ_{y ∈ t_j} r(y) log p(y | θ*_j),
//!
//! with q_j = |t_j|/(n+1) and θ*_j the mean of y/n over the segment. The
//! optimal partition is a shortest path over segment boundaries.

use crate::codelength::Codelength;
use crate::error::{Error, Result};
use crate::numeric::{log_binomial, xlogy};

/// Largest n accepted by the partition solver; the cubic-time search is
/// comfortable well past this, but expected codelengths stop being
/// interesting long before.
pub const SOLVER_CAP: u32 = 2048;

/// y successes out of n trials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinomialObservation {
    pub n: u32,
    pub y: u32,
}

impl BinomialObservation {
    pub fn new(n: u32, y: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("need at least one trial".into()));
        }
        if y > n {
            return Err(Error::Domain(format!("y = {y} exceeds n = {n}")));
        }
        Ok(BinomialObservation { n, y })
    }
}

/// A contiguous run {lo..hi} of the data space, endpoints inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub lo: u32,
    pub hi: u32,
}

impl Segment {
    pub fn new(lo: u32, hi: u32) -> Self {
        debug_assert!(lo <= hi);
        Segment { lo, hi }
    }

    pub fn len(self) -> u32 {
        self.hi - self.lo + 1
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn contains(self, y: u32) -> bool {
        self.lo <= y && y <= self.hi
    }
}

/// An optimal (or candidate) quantization of the data space.
#[derive(Clone, Debug)]
pub struct SmmlPartition {
    pub segments: Vec<Segment>,
    /// θ*_j per segment, strictly increasing.
    pub estimates: Vec<f64>,
    /// Coding probabilities q_j = |t_j|/(n+1).
    pub masses: Vec<f64>,
    /// Expected two-part codelength I_S.
    pub expected_codelength: Codelength,
}

impl SmmlPartition {
    /// Render the segments as "{0..0, 1..4, 5..9, 10..10}".
    pub fn format_segments(&self) -> String {
        format_segments(&self.segments)
    }
}

pub fn format_segments(segments: &[Segment]) -> String {
    let body: Vec<String> = segments.iter().map(|s| format!("{}..{}", s.lo, s.hi)).collect();
    format!("{{{}}}", body.join(", "))
}

/// Marginal probability r(y) = 1/(n+1) of each datum under the uniform prior.
pub fn marginal(n: u32) -> f64 {
    1.0 / (f64::from(n) + 1.0)
}

/// The estimate a segment codes for: the mean of y/n over the segment,
/// which for a contiguous run is the midpoint over n.
pub fn segment_estimate(n: u32, segment: Segment) -> f64 {
    f64::from(segment.lo + segment.hi) / (2.0 * f64::from(n))
}

/// Additive contribution of one segment to I_S, in nats: its share of the
/// assertion entropy plus the detail lengths of the data it covers.
/// θ* ∈ {0, 1} is fine; the boundary observation is then coded with
/// probability one (0·log 0 = 0).
fn segment_cost(n: u32, segment: Segment) -> f64 {
    let r = marginal(n);
    let q = f64::from(segment.len()) * r;
    let theta = segment_estimate(n, segment);
    let mut detail = 0.0;
    for y in segment.lo..=segment.hi {
        let log_p = log_binomial(u64::from(n), u64::from(y))
            + xlogy(f64::from(y), theta)
            + xlogy(f64::from(n - y), 1.0 - theta);
        detail -= r * log_p;
    }
    -q * q.ln() + detail
}

fn check_cover(segments: &[Segment], n: u32) -> Result<()> {
    if segments.is_empty() {
        return Err(Error::InvalidPartition("no segments".into()));
    }
    let mut expect = 0u32;
    for s in segments {
        if s.lo != expect || s.hi < s.lo {
            return Err(Error::InvalidPartition(format!(
                "segment {}..{} does not continue the cover at {expect}",
                s.lo, s.hi
            )));
        }
        expect = s.hi + 1;
    }
    if expect != n + 1 {
        return Err(Error::InvalidPartition(format!(
            "segments cover 0..{} but the data space is 0..{n}",
            expect - 1
        )));
    }
    Ok(())
}

/// Expected codelength of an arbitrary valid partition of {0..n}.
pub fn partition_codelength(segments: &[Segment], n: u32) -> Result<Codelength> {
    check_cover(segments, n)?;
    let nats = segments.iter().map(|&s| segment_cost(n, s)).sum();
    Ok(Codelength::from_nats(nats))
}

/// Find the partition minimizing the expected codelength.
///
/// Shortest path over boundary nodes 0..=n+1 where edge (a, b) is the
/// segment {a..b-1}; each segment cost is recomputed exactly, giving a
/// cubic-time search that is plenty fast for any interesting n. Ties are
/// broken deterministically: predecessors are scanned in ascending order
/// and only a strictly better cost replaces the incumbent.
pub fn solve_smml(n: u32) -> Result<SmmlPartition> {
    if n == 0 || n > SOLVER_CAP {
        return Err(Error::Domain(format!("n must be in 1..={SOLVER_CAP}, got {n}")));
    }
    let nodes = (n + 2) as usize;
    let mut best = vec![f64::INFINITY; nodes];
    let mut back = vec![0usize; nodes];
    best[0] = 0.0;
    for b in 1..nodes {
        for a in 0..b {
            let cost = best[a] + segment_cost(n, Segment::new(a as u32, (b - 1) as u32));
            if cost < best[b] {
                best[b] = cost;
                back[b] = a;
            }
        }
    }
    let mut segments = Vec::new();
    let mut b = nodes - 1;
    while b > 0 {
        let a = back[b];
        segments.push(Segment::new(a as u32, (b - 1) as u32));
        b = a;
    }
    segments.reverse();
    Ok(build_partition(segments, n, best[nodes - 1]))
}

fn build_partition(segments: Vec<Segment>, n: u32, total_nats: f64) -> SmmlPartition {
    let estimates = segments.iter().map(|&s| segment_estimate(n, s)).collect();
    let masses = segments.iter().map(|&s| f64::from(s.len()) * marginal(n)).collect();
    SmmlPartition {
        segments,
        estimates,
        masses,
        expected_codelength: Codelength::from_nats(total_nats),
    }
}

/// All partitions whose expected codelength is within `tol_nats` of the
/// optimum. The optimal partition is frequently not unique: mirror-image
/// partitions of a symmetric data space tie exactly, so golden comparisons
/// should accept any member of this set.
pub fn co_optimal_partitions(n: u32, tol_nats: f64) -> Result<Vec<SmmlPartition>> {
    if n == 0 || n > SOLVER_CAP {
        return Err(Error::Domain(format!("n must be in 1..={SOLVER_CAP}, got {n}")));
    }
    if !(tol_nats >= 0.0) {
        return Err(Error::Domain("tolerance must be nonnegative".into()));
    }
    let nodes = (n + 2) as usize;
    // Prefix and suffix shortest-path costs over the same edge set.
    let mut pre = vec![f64::INFINITY; nodes];
    let mut suf = vec![f64::INFINITY; nodes];
    pre[0] = 0.0;
    suf[nodes - 1] = 0.0;
    let mut cost = vec![vec![0.0; nodes]; nodes];
    for b in 1..nodes {
        for a in 0..b {
            cost[a][b] = segment_cost(n, Segment::new(a as u32, (b - 1) as u32));
        }
    }
    for b in 1..nodes {
        for a in 0..b {
            pre[b] = pre[b].min(pre[a] + cost[a][b]);
        }
    }
    for a in (0..nodes - 1).rev() {
        for b in a + 1..nodes {
            suf[a] = suf[a].min(cost[a][b] + suf[b]);
        }
    }
    let limit = pre[nodes - 1] + tol_nats;
    let mut found = Vec::new();
    let mut path: Vec<Segment> = Vec::new();
    // Depth-first over edges that keep the completed path within the bound.
    fn descend(
        a: usize,
        spent: f64,
        nodes: usize,
        limit: f64,
        cost: &[Vec<f64>],
        suf: &[f64],
        path: &mut Vec<Segment>,
        found: &mut Vec<(Vec<Segment>, f64)>,
    ) -> Result<()> {
        if a == nodes - 1 {
            found.push((path.clone(), spent));
            if found.len() > 10_000 {
                return Err(Error::Domain(
                    "tolerance admits too many partitions to enumerate".into(),
                ));
            }
            return Ok(());
        }
        for b in a + 1..nodes {
            let here = spent + cost[a][b];
            if here + suf[b] <= limit {
                path.push(Segment::new(a as u32, (b - 1) as u32));
                descend(b, here, nodes, limit, cost, suf, path, found)?;
                path.pop();
            }
        }
        Ok(())
    }
    descend(0, 0.0, nodes, limit, &cost, &suf, &mut path, &mut found)?;
    Ok(found
        .into_iter()
        .map(|(segments, nats)| build_partition(segments, n, nats))
        .collect())
}

/// The SMML point estimate for an observation: θ* of the segment the
/// observation falls in.
pub fn smml_estimate(obs: BinomialObservation, partition: &SmmlPartition) -> Result<f64> {
    let covered = partition.segments.last().map(|s| s.hi);
    if covered != Some(obs.n) {
        return Err(Error::Domain(format!(
            "partition covers 0..{:?} but the observation has n = {}",
            covered, obs.n
        )));
    }
    let idx = partition
        .segments
        .iter()
        .position(|s| s.contains(obs.y))
        .ok_or_else(|| Error::Domain(format!("no segment contains y = {}", obs.y)))?;
    Ok(partition.estimates[idx])
}
