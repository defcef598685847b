//! Fixed-ratio matching of protected and unprotected points inside clusters.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::clustering::Clustering;
use crate::metrics;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FairgroupError {
    #[error("ratio parts must be positive, got {0}:{1}")]
    ZeroPart(u64, u64),
    #[error("cannot parse ratio `{0}`; expected a:b with positive integers")]
    BadRatio(String),
    #[error("{flags} protected flags for {points} points")]
    LengthMismatch { flags: usize, points: usize },
    #[error("plan has no matched points")]
    EmptyPlan,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Co-prime `p` protected to `q` unprotected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BalanceRatio {
    p: u64,
    q: u64,
}

impl BalanceRatio {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn as_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// Protected share of a full group, in percent.
    pub fn protected_percent(&self) -> f64 {
        100.0 * self.p as f64 / (self.p + self.q) as f64
    }
}

impl fmt::Display for BalanceRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.p, self.q)
    }
}

impl FromStr for BalanceRatio {
    type Err = FairgroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FairgroupError::BadRatio(s.into());
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let a = a.trim().parse::<u64>().map_err(|_| bad())?;
        let b = b.trim().parse::<u64>().map_err(|_| bad())?;
        reduce_ratio(a, b)
    }
}

/// `(a/g, b/g)` with `g = gcd(a, b)`.
pub fn reduce_ratio(a: u64, b: u64) -> Result<BalanceRatio, FairgroupError> {
    if a == 0 || b == 0 {
        return Err(FairgroupError::ZeroPart(a, b));
    }
    let g = gcd(a, b);
    Ok(BalanceRatio { p: a / g, q: b / g })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fairgroup {
    /// Protected members first, each side in selection order.
    pub members: Vec<usize>,
    pub protected: usize,
    pub unprotected: usize,
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairgroupPlan {
    pub ratio: BalanceRatio,
    pub groups: Vec<Fairgroup>,
    /// Ascending point indices.
    pub unmatched: Vec<usize>,
    pub n: usize,
}

impl FairgroupPlan {
    pub fn matched_count(&self) -> usize {
        self.groups.iter().map(|g| g.members.len()).sum()
    }

    /// Group id of each point, `None` when unmatched.
    pub fn group_of(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n];
        for (g, group) in self.groups.iter().enumerate() {
            for &j in &group.members {
                out[j] = Some(g);
            }
        }
        out
    }

    /// True when groups and unmatched together cover `0..n` exactly once.
    pub fn is_partition(&self) -> bool {
        let mut seen = vec![false; self.n];
        let all = self
            .groups
            .iter()
            .flat_map(|g| g.members.iter())
            .chain(&self.unmatched);
        for &j in all {
            if j >= self.n || seen[j] {
                return false;
            }
            seen[j] = true;
        }
        seen.into_iter().all(|s| s)
    }
}

/// Forms `min(P/p, U/q)` fairgroups per cluster, taking members nearest to
/// the cluster center first (ties by index). Matching stays inside clusters.
pub fn build_fairgroups(
    clustering: &Clustering,
    protected: &[bool],
    ratio: BalanceRatio,
) -> Result<FairgroupPlan, FairgroupError> {
    let n = clustering.assignment.len();
    if protected.len() != n {
        return Err(FairgroupError::LengthMismatch {
            flags: protected.len(),
            points: n,
        });
    }
    let (p, q) = (ratio.p as usize, ratio.q as usize);
    let mut groups = Vec::new();
    let mut unmatched = Vec::new();
    for cluster in 0..clustering.k {
        let by_distance = |want: bool| {
            let mut v: Vec<usize> = (0..n)
                .filter(|&j| clustering.assignment[j] == cluster && protected[j] == want)
                .collect();
            v.sort_by(|&a, &b| {
                clustering.point_costs[a]
                    .total_cmp(&clustering.point_costs[b])
                    .then(a.cmp(&b))
            });
            v
        };
        let prot = by_distance(true);
        let unprot = by_distance(false);
        let count = (prot.len() / p).min(unprot.len() / q);
        for g in 0..count {
            let mut members = prot[g * p..(g + 1) * p].to_vec();
            members.extend_from_slice(&unprot[g * q..(g + 1) * q]);
            groups.push(Fairgroup {
                members,
                protected: p,
                unprotected: q,
                cluster,
            });
        }
        unmatched.extend_from_slice(&prot[count * p..]);
        unmatched.extend_from_slice(&unprot[count * q..]);
    }
    unmatched.sort_unstable();
    Ok(FairgroupPlan {
        ratio,
        groups,
        unmatched,
        n,
    })
}

/// Balance of the protected flag over all matched points.
pub fn plan_balance(plan: &FairgroupPlan, protected: &[bool]) -> Result<f64, FairgroupError> {
    if protected.len() != plan.n {
        return Err(FairgroupError::LengthMismatch {
            flags: protected.len(),
            points: plan.n,
        });
    }
    if plan.matched_count() == 0 {
        return Err(FairgroupError::EmptyPlan);
    }
    Ok(metrics::balance_of(
        plan.groups
            .iter()
            .flat_map(|g| g.members.iter())
            .map(|&j| protected[j]),
    ))
}

impl fmt::Display for Fairgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.members.iter().map(|m| format!("{m}")).collect();
        write!(f, "cluster {} [{}]", self.cluster, ids.join(" "))
    }
}
