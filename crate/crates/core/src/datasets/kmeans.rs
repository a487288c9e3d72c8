use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mnist::ImageSample;
use crate::rng::{derive, Stream};
use crate::{Error, Result};

/// Centroid seeding for each restart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KMeansInit {
    /// Distinct points drawn uniformly.
    Random,
    /// D²-weighted seeding.
    #[default]
    PlusPlus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub clusters: usize,
    pub restarts: usize,
    pub max_iter: usize,
    #[serde(default)]
    pub init: KMeansInit,
}

impl KMeansConfig {
    pub fn new(clusters: usize, restarts: usize) -> Self {
        Self { clusters, restarts, max_iter: 300, init: KMeansInit::PlusPlus }
    }
}

/// Outcome of one Lloyd run.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansRun {
    /// Row-major `clusters × dim`.
    pub centroids: Vec<f32>,
    pub assignments: Vec<usize>,
    pub inertia: f64,
    /// Inertia after every assignment step.
    pub inertia_trace: Vec<f64>,
}

/// Dense point cloud, row-major `len × dim`.
#[derive(Debug, Clone)]
pub struct Points {
    pub dim: usize,
    pub data: Vec<f32>,
    norms: Vec<f32>,
}

impl Points {
    pub fn new(dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(Error::domain("point buffer is not a multiple of the dimension"));
        }
        let norms = data.chunks_exact(dim).map(|p| dot(p, p)).collect();
        Ok(Self { dim, data, norms })
    }

    pub fn from_images(images: &[&ImageSample]) -> Self {
        let dim = images.first().map_or(1, |s| s.pixels.len());
        let data = images.iter().flat_map(|s| s.pixels.iter().map(|&p| f32::from(p))).collect();
        Self::new(dim, data).expect("images share a shape")
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

fn dot(a: &[f32], b: &[f32]) -> f32 {
    // Eight independent lanes so the compiler can vectorize.
    let mut acc = [0f32; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f32 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    acc.iter().sum::<f32>() + tail
}

fn sq_dist(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(x, y)| f64::from(x - y).powi(2)).sum()
}

/// Nearest centroid of every point, with the exact squared distance.
fn assign(points: &Points, centroids: &[f32]) -> Vec<(usize, f64)> {
    let dim = points.dim;
    let c_norms: Vec<f32> = centroids.chunks_exact(dim).map(|c| dot(c, c)).collect();
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            let p = points.row(i);
            let mut best = (0, f32::INFINITY);
            for (k, c) in centroids.chunks_exact(dim).enumerate() {
                let d = points.norms[i] - 2.0 * dot(p, c) + c_norms[k];
                if d < best.1 {
                    best = (k, d);
                }
            }
            (best.0, sq_dist(p, &centroids[best.0 * dim..(best.0 + 1) * dim]))
        })
        .collect()
}

fn seed_centroids<R: Rng>(points: &Points, k: usize, init: KMeansInit, rng: &mut R) -> Vec<f32> {
    let n = points.len();
    let chosen: Vec<usize> = match init {
        KMeansInit::Random => rand::seq::index::sample(rng, n, k).into_vec(),
        KMeansInit::PlusPlus => {
            let mut chosen = vec![rng.random_range(0..n)];
            let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), points.row(chosen[0]))).collect();
            while chosen.len() < k {
                let total: f64 = d2.iter().sum();
                let next = if total > 0.0 {
                    let mut r = rng.random::<f64>() * total;
                    let mut pick = n - 1;
                    for (i, &d) in d2.iter().enumerate() {
                        if d > 0.0 && r < d {
                            pick = i;
                            break;
                        }
                        r -= d;
                    }
                    pick
                } else {
                    // Every remaining point coincides with a seed.
                    (0..n).find(|i| !chosen.contains(i)).expect("k ≤ n")
                };
                chosen.push(next);
                let c = points.row(next);
                d2.par_iter_mut().enumerate().for_each(|(i, d)| *d = d.min(sq_dist(points.row(i), c)));
            }
            chosen
        }
    };
    chosen.iter().flat_map(|&i| points.row(i).iter().copied()).collect()
}

/// One Lloyd run from a seeded initialization. Stops when assignments no
/// longer change or after `max_iter` assignment steps.
pub fn lloyd<R: Rng>(points: &Points, k: usize, max_iter: usize, init: KMeansInit, rng: &mut R) -> Result<KMeansRun> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::domain(format!("cannot form {k} clusters from {n} points")));
    }
    let dim = points.dim;
    let mut centroids = seed_centroids(points, k, init, rng);
    let mut assignments: Vec<usize> = Vec::new();
    let mut trace = Vec::new();
    for _ in 0..max_iter.max(1) {
        let assigned = assign(points, &centroids);
        let mut next: Vec<usize> = assigned.iter().map(|a| a.0).collect();
        let mut dists: Vec<f64> = assigned.iter().map(|a| a.1).collect();

        // An empty cluster takes over the point farthest from its centroid.
        let mut counts = vec![0usize; k];
        next.iter().for_each(|&c| counts[c] += 1);
        let empties: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
        for empty in empties {
            let far = (0..n)
                .filter(|&i| counts[next[i]] > 1)
                .max_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(b.cmp(&a)))
                .expect("k ≤ n leaves a shared cluster");
            counts[next[far]] -= 1;
            counts[empty] = 1;
            next[far] = empty;
            dists[far] = 0.0;
            centroids[empty * dim..(empty + 1) * dim].copy_from_slice(points.row(far));
        }
        trace.push(dists.iter().sum());
        let converged = next == assignments;
        assignments = next;
        if converged {
            break;
        }

        let mut sums = vec![0f64; k * dim];
        for (i, &c) in assignments.iter().enumerate() {
            for (s, &x) in sums[c * dim..(c + 1) * dim].iter_mut().zip(points.row(i)) {
                *s += f64::from(x);
            }
        }
        for (c, chunk) in sums.chunks_exact(dim).enumerate() {
            let inv = 1.0 / counts[c] as f64;
            for (dst, s) in centroids[c * dim..(c + 1) * dim].iter_mut().zip(chunk) {
                *dst = (s * inv) as f32;
            }
        }
    }
    let inertia =
        assignments.iter().enumerate().map(|(i, &c)| sq_dist(points.row(i), &centroids[c * dim..(c + 1) * dim])).sum();
    Ok(KMeansRun { centroids, assignments, inertia, inertia_trace: trace })
}

/// Best-inertia run over `restarts` independent seeds.
pub fn kmeans(points: &Points, config: &KMeansConfig, seed: u64) -> Result<KMeansRun> {
    let mut best: Option<KMeansRun> = None;
    for r in 0..config.restarts.max(1) {
        let mut rng = derive(seed, Stream::KMeans, r as u64);
        let run = lloyd(points, config.clusters, config.max_iter, config.init, &mut rng)?;
        log::trace!("k-means restart {r}: inertia {:.6e}", run.inertia);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Index of the member nearest each centroid, ties to the lowest index.
pub fn representatives(points: &Points, run: &KMeansRun) -> Vec<usize> {
    let k = run.centroids.len() / points.dim;
    let mut best = vec![(usize::MAX, f64::INFINITY); k];
    for (i, &c) in run.assignments.iter().enumerate() {
        let d = sq_dist(points.row(i), &run.centroids[c * points.dim..(c + 1) * points.dim]);
        if d < best[c].1 {
            best[c] = (i, d);
        }
    }
    best.into_iter().map(|b| b.0).collect()
}

/// Cluster each digit separately and keep one representative per cluster.
/// Returns indices into `images`, grouped by digit and ascending within a
/// digit.
pub fn kmeans_select(images: &[ImageSample], config: &KMeansConfig, seed: u64) -> Result<Vec<usize>> {
    let mut selected = Vec::with_capacity(10 * config.clusters);
    for digit in 0..10u8 {
        let members: Vec<usize> = (0..images.len()).filter(|&i| images[i].label == digit).collect();
        if members.len() < config.clusters {
            return Err(Error::domain(format!(
                "digit {digit} has {} images, fewer than {} clusters",
                members.len(),
                config.clusters
            )));
        }
        let refs: Vec<&ImageSample> = members.iter().map(|&i| &images[i]).collect();
        let points = Points::from_images(&refs);
        let run = kmeans(&points, config, crate::rng::child_seed(seed, u64::from(digit)))?;
        log::info!("digit {digit}: {} images, inertia {:.6e}", members.len(), run.inertia);
        let mut reps: Vec<usize> = representatives(&points, &run).into_iter().map(|r| members[r]).collect();
        reps.sort_unstable();
        selected.extend(reps);
    }
    Ok(selected)
}
