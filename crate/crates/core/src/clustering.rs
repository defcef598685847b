//! k-medians under the L1 distance, Lloyd style, with k-means++ seeding
//! and seeded restarts.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::importance::ImportanceMatrix;

pub const DEFAULT_MAX_ITERS: usize = 100;
pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusteringError {
    #[error("k must lie in 1..={n}, got {k}")]
    BadK { k: usize, n: usize },
    #[error("vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("max_iters must be at least 1")]
    BadMaxIters,
    #[error("restarts must be at least 1")]
    BadRestarts,
    #[error("row buffer of length {len} is not a multiple of dimension {dim}")]
    RaggedRows { len: usize, dim: usize },
}

/// `sum |p_i - q_i|`.
pub fn l1_distance(p: &[f64], q: &[f64]) -> Result<f64, ClusteringError> {
    if p.len() != q.len() {
        return Err(ClusteringError::LengthMismatch(p.len(), q.len()));
    }
    Ok(l1(p, q))
}

/// `sum w_i |r_p,i - r_q,i|` over rank vectors; equals [`l1_distance`] of the
/// importance vectors `w * r`.
pub fn weighted_l1(w: &[u64], rp: &[u64], rq: &[u64]) -> Result<u64, ClusteringError> {
    if rp.len() != rq.len() {
        return Err(ClusteringError::LengthMismatch(rp.len(), rq.len()));
    }
    if w.len() != rp.len() {
        return Err(ClusteringError::LengthMismatch(w.len(), rp.len()));
    }
    Ok(w.iter()
        .zip(rp.iter().zip(rq))
        .map(|(w, (a, b))| w * a.abs_diff(*b))
        .sum())
}

fn l1(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| libm::fabs(a - b)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    /// Distance of each point to its assigned center.
    pub point_costs: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
    /// Total cost after each iteration of the kept run.
    pub cost_history: Vec<f64>,
}

impl Clustering {
    /// Nearest center of `point`, ties to the lowest id.
    pub fn nearest(&self, point: &[f64]) -> usize {
        nearest(&self.centers, point).0
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }
}

fn nearest(centers: &[Vec<f64>], point: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = l1(center, point);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// k-medians over the importance vectors of `m`.
pub fn kmedians(
    m: &ImportanceMatrix,
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Result<Clustering, ClusteringError> {
    kmedians_rows(&m.importance_f64(), m.dim(), k, seed, max_iters)
}

fn seed_centers(rows: &[&[f64]], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centers = vec![rows[first].to_vec()];
    let mut dist: Vec<f64> = rows.iter().map(|r| l1(r, rows[first])).collect();
    while centers.len() < k {
        let total: f64 = dist.iter().map(|d| d * d).sum();
        let pick = if total > 0.0 {
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (j, d) in dist.iter().enumerate() {
                if *d == 0.0 {
                    continue;
                }
                acc += d * d;
                pick = Some(j);
                if acc > u {
                    break;
                }
            }
            pick.expect("positive total has a positive entry")
        } else {
            // only duplicates of chosen centers remain
            (0..n).find(|&j| !chosen[j]).expect("k <= n")
        };
        chosen[pick] = true;
        centers.push(rows[pick].to_vec());
        for (d, r) in dist.iter_mut().zip(rows) {
            *d = d.min(l1(r, rows[pick]));
        }
    }
    centers
}

/// Lower middle of the sorted values.
fn lower_median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

/// k-medians over `n = rows.len() / dim` row-major points with the default
/// number of restarts.
pub fn kmedians_rows(
    flat: &[f64],
    dim: usize,
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Result<Clustering, ClusteringError> {
    kmedians_rows_with(flat, dim, k, seed, max_iters, DEFAULT_RESTARTS)
}

/// Runs `restarts` seeded Lloyd passes and keeps the cheapest (the earliest
/// on ties).
///
/// Each pass alternates nearest-center assignment (ties to the lowest id)
/// with coordinate-wise lower medians. A cluster left empty by the
/// assignment step takes the point farthest from its own center among
/// clusters that have at least two members. A pass stops when the
/// assignment repeats or after `max_iters` iterations.
pub fn kmedians_rows_with(
    flat: &[f64],
    dim: usize,
    k: usize,
    seed: u64,
    max_iters: usize,
    restarts: usize,
) -> Result<Clustering, ClusteringError> {
    if dim == 0 || !flat.len().is_multiple_of(dim) {
        return Err(ClusteringError::RaggedRows {
            len: flat.len(),
            dim,
        });
    }
    let n = flat.len() / dim;
    if k < 1 || k > n {
        return Err(ClusteringError::BadK { k, n });
    }
    if max_iters == 0 {
        return Err(ClusteringError::BadMaxIters);
    }
    if restarts == 0 {
        return Err(ClusteringError::BadRestarts);
    }
    let rows: Vec<&[f64]> = flat.chunks_exact(dim).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Clustering> = None;
    for _ in 0..restarts {
        let centers = seed_centers(&rows, k, &mut rng);
        let run = lloyd(&rows, k, centers, max_iters);
        if best.as_ref().is_none_or(|b| run.cost < b.cost) {
            best = Some(run);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

fn lloyd(rows: &[&[f64]], k: usize, mut centers: Vec<Vec<f64>>, max_iters: usize) -> Clustering {
    let n = rows.len();
    let mut assignment = vec![usize::MAX; n];
    let mut point_costs = vec![0.0; n];
    let mut cost_history = Vec::new();
    let mut iterations = 0;
    let mut scratch = Vec::with_capacity(n);

    while iterations < max_iters {
        iterations += 1;
        let mut next = Vec::with_capacity(n);
        for (j, r) in rows.iter().enumerate() {
            let (c, d) = nearest(&centers, r);
            next.push(c);
            point_costs[j] = d;
        }

        let mut sizes = vec![0usize; k];
        for &c in &next {
            sizes[c] += 1;
        }
        for empty in 0..k {
            if sizes[empty] > 0 {
                continue;
            }
            let donor = (0..n)
                .filter(|&j| sizes[next[j]] >= 2)
                .max_by(|&a, &b| {
                    point_costs[a]
                        .total_cmp(&point_costs[b])
                        .then(b.cmp(&a))
                })
                .expect("k <= n leaves a cluster with two members");
            sizes[next[donor]] -= 1;
            next[donor] = empty;
            sizes[empty] = 1;
            point_costs[donor] = 0.0;
            centers[empty] = rows[donor].to_vec();
        }

        for (c, center) in centers.iter_mut().enumerate() {
            for (i, coord) in center.iter_mut().enumerate() {
                scratch.clear();
                scratch.extend((0..n).filter(|&j| next[j] == c).map(|j| rows[j][i]));
                *coord = lower_median(&mut scratch);
            }
        }
        for (j, r) in rows.iter().enumerate() {
            point_costs[j] = l1(&centers[next[j]], r);
        }
        cost_history.push(point_costs.iter().sum());

        let done = next == assignment;
        assignment = next;
        if done {
            break;
        }
    }

    let cost = *cost_history.last().expect("at least one iteration");
    Clustering {
        k,
        assignment,
        centers,
        point_costs,
        cost,
        iterations,
        cost_history,
    }
}

/// Total L1 cost of the best split of sorted 1-D values into two contiguous
/// runs, each at its median. Used as a brute-force reference.
pub fn optimal_two_medians_1d(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let cost = |s: &[f64]| {
        let mut s = s.to_vec();
        let m = lower_median(&mut s);
        s.iter().map(|x| libm::fabs(x - m)).sum::<f64>()
    };
    (1..v.len())
        .map(|cut| cost(&v[..cut]) + cost(&v[cut..]))
        .min_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
        .unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        assert_eq!(weighted_l1(&[1, 2], &[1, 2], &[3, 1]).unwrap(), 4);
        assert_eq!(l1_distance(&[2.0, 4.0], &[3.0, 2.0]).unwrap(), 3.0);
        assert_eq!(l1_distance(&[1.0], &[1.0]).unwrap(), 0.0);
        assert!(l1_distance(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn single_center_is_median() {
        let c = kmedians_rows(&[1.0, 2.0, 9.0], 1, 1, 0, 100).unwrap();
        assert_eq!(c.centers, vec![vec![2.0]]);
        assert_eq!(c.cost, 8.0);
    }

    #[test]
    fn lower_median_of_even_set() {
        let c = kmedians_rows(&[1.0, 2.0, 9.0, 10.0], 1, 1, 3, 100).unwrap();
        assert_eq!(c.centers, vec![vec![2.0]]);
    }

    #[test]
    fn k_equals_n() {
        let c = kmedians_rows(&[3.0, 1.0, 7.0, 5.0], 1, 4, 11, 100).unwrap();
        assert_eq!(c.cost, 0.0);
        let mut seen = c.assignment.clone();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 3]);
    }

    #[test]
    fn k_equals_n_with_duplicates() {
        let c = kmedians_rows(&[2.0, 2.0, 2.0], 1, 3, 5, 100).unwrap();
        assert_eq!(c.cluster_sizes(), vec![1, 1, 1]);
        assert_eq!(c.cost, 0.0);
    }

    #[test]
    fn two_clusters() {
        let c = kmedians_rows(&[1.0, 2.0, 10.0, 11.0], 1, 2, 0, 100).unwrap();
        assert_eq!(c.cost, 2.0);
        assert_eq!(c.assignment[0], c.assignment[1]);
        assert_eq!(c.assignment[2], c.assignment[3]);
        assert_ne!(c.assignment[0], c.assignment[2]);
        assert_eq!(optimal_two_medians_1d(&[11.0, 1.0, 10.0, 2.0]), 2.0);
    }

    #[test]
    fn bad_k() {
        assert_eq!(
            kmedians_rows(&[1.0, 2.0], 1, 0, 0, 10),
            Err(ClusteringError::BadK { k: 0, n: 2 })
        );
        assert_eq!(
            kmedians_rows(&[1.0, 2.0], 1, 3, 0, 10),
            Err(ClusteringError::BadK { k: 3, n: 2 })
        );
    }
}
