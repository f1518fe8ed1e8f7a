use chrono::Datelike;
use serde::Serialize;

use crate::data::DailySeries;
use crate::error::{Error, Result};
use crate::numeric::stats::{mean, variance};
use crate::numeric::Rng;

pub const MAX_ITER: usize = 300;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KMeans {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// within-cluster sum of squares after each assignment step
    pub inertia: Vec<f64>,
    pub iterations: usize,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

fn nearest(p: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    centroids
        .iter()
        .enumerate()
        .map(|(j, c)| (j, dist2(p, c)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// k-means++ seeding: first centre uniform, then proportional to D².
fn seed_centroids(points: &[Vec<f64>], k: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.below(points.len())].clone()];
    while centroids.len() < k {
        let d: Vec<f64> = points.iter().map(|p| nearest(p, &centroids).1).collect();
        let total: f64 = d.iter().sum();
        if total == 0.0 {
            centroids.push(points[rng.below(points.len())].clone());
            continue;
        }
        let mut u = rng.uniform01() * total;
        let mut pick = points.len() - 1;
        for (i, di) in d.iter().enumerate() {
            if u < *di {
                pick = i;
                break;
            }
            u -= di;
        }
        centroids.push(points[pick].clone());
    }
    centroids
}

/// Lloyd's algorithm from k-means++ seeds on stream `"kmeans"`. Stops at an
/// assignment fixpoint or after [`MAX_ITER`] iterations. An empty cluster is
/// moved to the point farthest from its current centre.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeans> {
    if k < 1 {
        return Err(Error::config("diagnostics.k", "must be >= 1"));
    }
    if points.len() < k {
        return Err(Error::Data(format!("k-means with k = {k} needs at least {k} points, got {}", points.len())));
    }
    let dim = points[0].len();
    let mut rng = Rng::new(seed, "kmeans");
    let mut centroids = seed_centroids(points, k, &mut rng);
    let mut assignments = vec![usize::MAX; points.len()];
    let mut inertia = Vec::new();
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        let mut changed = false;
        let mut sse = 0.0;
        for (i, p) in points.iter().enumerate() {
            let (j, d) = nearest(p, &centroids);
            sse += d;
            if assignments[i] != j {
                assignments[i] = j;
                changed = true;
            }
        }
        inertia.push(sse);
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &j) in points.iter().zip(&assignments) {
            counts[j] += 1;
            sums[j].iter_mut().zip(p).for_each(|(s, v)| *s += v);
        }
        for j in 0..k {
            if counts[j] > 0 {
                centroids[j] = sums[j].iter().map(|s| s / counts[j] as f64).collect();
            } else {
                let far = (0..points.len())
                    .max_by(|&a, &b| {
                        dist2(&points[a], &centroids[assignments[a]]).total_cmp(&dist2(&points[b], &centroids[assignments[b]]))
                    })
                    .expect("non-empty");
                centroids[j] = points[far].clone();
            }
        }
    }
    Ok(KMeans {
        assignments,
        centroids,
        inertia,
        iterations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Regimes {
    pub features: Vec<String>,
    pub assignments: Vec<usize>,
    /// centroids in original units (year, month, tempmax)
    pub centroids: Vec<Vec<f64>>,
    pub iterations: usize,
}

/// Cluster days on z-scored (year, month, tempmax).
pub fn kmeans_regimes(daily: &DailySeries, k: usize, seed: u64) -> Result<Regimes> {
    if k < 2 {
        return Err(Error::config("diagnostics.k", "regime clustering needs k >= 2"));
    }
    let cols: Vec<Vec<f64>> = vec![
        daily.dates.iter().map(|d| d.year() as f64).collect(),
        daily.dates.iter().map(|d| d.month() as f64).collect(),
        daily.tempmax.clone(),
    ];
    let stats: Vec<(f64, f64)> = cols
        .iter()
        .map(|c| {
            let s = variance(c).sqrt();
            (mean(c), if s > 0.0 { s } else { 1.0 })
        })
        .collect();
    let points: Vec<Vec<f64>> = (0..daily.dates.len())
        .map(|i| cols.iter().zip(&stats).map(|(c, (m, s))| (c[i] - m) / s).collect())
        .collect();
    let km = kmeans(&points, k, seed)?;
    let centroids = km
        .centroids
        .iter()
        .map(|c| c.iter().zip(&stats).map(|(z, (m, s))| z * s + m).collect())
        .collect();
    Ok(Regimes {
        features: vec!["year".into(), "month".into(), "tempmax".into()],
        assignments: km.assignments,
        centroids,
        iterations: km.iterations,
    })
}
