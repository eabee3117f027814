//! Lloyd's k-means over RGB triples with greedy k-means++ seeding.
//!
//! Pixels are collapsed to distinct colors with multiplicities first, so the
//! cost of an iteration scales with the palette size rather than the pixel
//! count. Everything downstream of the seed is deterministic.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LabelMap;
use crate::error::{Error, Result};
use crate::image::ColorImage;
use crate::num::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Independent seedings; the lowest-SSE run wins (earliest on ties).
    pub n_init: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            k: 8,
            seed: 0,
            max_iters: 100,
            n_init: 4,
        }
    }
}

/// Clusters pixel colors into at most `k` groups.
///
/// The returned labels identify clusters, not connected regions; they are
/// renumbered densely in raster order of first appearance.
pub fn kmeans_colors<T: Scalar>(
    img: &ColorImage,
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Result<LabelMap> {
    kmeans_colors_with::<T>(
        img,
        &KMeansConfig {
            k,
            seed,
            max_iters,
            ..KMeansConfig::default()
        },
    )
}

pub fn kmeans_colors_with<T: Scalar>(img: &ColorImage, config: &KMeansConfig) -> Result<LabelMap> {
    if config.k == 0 {
        return Err(Error::KMeans("k must be at least 1".into()));
    }
    if config.max_iters == 0 {
        return Err(Error::KMeans("max_iters must be at least 1".into()));
    }
    if config.n_init == 0 {
        return Err(Error::KMeans("n_init must be at least 1".into()));
    }
    if img.is_empty() {
        return Err(Error::KMeans("image has no pixels".into()));
    }

    let mut palette: BTreeMap<[u8; 3], usize> = BTreeMap::new();
    for px in img.pixels() {
        *palette.entry(px).or_default() += 1;
    }
    let colors: Vec<[u8; 3]> = palette.keys().copied().collect();
    let points: Vec<[T; 3]> = colors
        .iter()
        .map(|c| c.map(|v| T::from_u8(v).unwrap()))
        .collect();
    let weights: Vec<T> = palette.values().map(|&n| T::from_usize_lossy(n)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(T, Vec<usize>)> = None;
    for _ in 0..config.n_init {
        let centers = seed_centers(&points, &weights, config.k, &mut rng);
        let (assignment, sse) = lloyd(&points, &weights, centers, config.max_iters);
        if best.as_ref().is_none_or(|(b, _)| sse < *b) {
            best = Some((sse, assignment));
        }
    }
    let (_, assignment) = best.expect("at least one initialization ran");

    let labels = img
        .pixels()
        .map(|px| {
            let idx = colors.binary_search(&px).expect("color is in palette");
            assignment[idx] as u32
        })
        .collect();
    Ok(LabelMap::canonical(img.width(), img.height(), labels))
}

#[inline]
fn dist2<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    d0 * d0 + d1 * d1 + d2 * d2
}

/// Index drawn with probability proportional to `mass`; `total` must be positive.
fn sample_index<T: Scalar>(mass: &[T], total: T, rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let target = T::lit(u) * total;
    let mut acc = T::zero();
    for (i, &m) in mass.iter().enumerate() {
        acc = acc + m;
        if target < acc {
            return i;
        }
    }
    // rounding pushed target past the running sum: take the last non-empty slot
    mass.iter().rposition(|&m| m > T::zero()).unwrap_or(0)
}

/// Greedy k-means++: each new center is the best of `2 + ln k` D²-weighted draws.
fn seed_centers<T: Scalar>(
    points: &[[T; 3]],
    weights: &[T],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<[T; 3]> {
    let total_weight: T = weights.iter().copied().sum();
    let first = sample_index(weights, total_weight, rng);
    let mut centers = vec![points[first]];
    let mut closest: Vec<T> = points.iter().map(|p| dist2(p, &points[first])).collect();
    let trials = 2 + (k as f64).ln().floor() as usize;

    while centers.len() < k {
        let mass: Vec<T> = closest.iter().zip(weights).map(|(&d, &w)| d * w).collect();
        let potential: T = mass.iter().copied().sum();
        if potential <= T::zero() {
            // fewer distinct colors than clusters; the duplicate center ends up empty
            centers.push(points[first]);
            continue;
        }
        let mut chosen: Option<(T, usize)> = None;
        for _ in 0..trials {
            let cand = sample_index(&mass, potential, rng);
            let cost: T = points
                .iter()
                .zip(weights)
                .zip(&closest)
                .map(|((p, &w), &d)| w * d.min(dist2(p, &points[cand])))
                .sum();
            if chosen.is_none_or(|(c, _)| cost < c) {
                chosen = Some((cost, cand));
            }
        }
        let (_, cand) = chosen.expect("at least two trials");
        for (d, p) in closest.iter_mut().zip(points) {
            *d = d.min(dist2(p, &points[cand]));
        }
        centers.push(points[cand]);
    }
    centers
}

fn nearest<T: Scalar>(p: &[T; 3], centers: &[[T; 3]]) -> usize {
    let mut best = 0;
    let mut best_d = dist2(p, &centers[0]);
    for (i, c) in centers.iter().enumerate().skip(1) {
        let d = dist2(p, c);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Runs Lloyd iterations and returns the assignment with its weighted SSE.
fn lloyd<T: Scalar>(
    points: &[[T; 3]],
    weights: &[T],
    mut centers: Vec<[T; 3]>,
    max_iters: usize,
) -> (Vec<usize>, T) {
    let k = centers.len();
    let mut assignment = vec![usize::MAX; points.len()];

    for _ in 0..max_iters {
        let mut changed = false;
        for (a, p) in assignment.iter_mut().zip(points) {
            let c = nearest(p, &centers);
            if *a != c {
                *a = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }

        let mut sums = vec![[T::zero(); 3]; k];
        let mut mass = vec![T::zero(); k];
        for ((&a, p), &w) in assignment.iter().zip(points).zip(weights) {
            for ch in 0..3 {
                sums[a][ch] = sums[a][ch] + p[ch] * w;
            }
            mass[a] = mass[a] + w;
        }
        for c in 0..k {
            if mass[c] > T::zero() {
                centers[c] = sums[c].map(|s| s / mass[c]);
            }
        }

        // Re-seed empty clusters from the point farthest from its own center.
        for c in 0..k {
            if mass[c] > T::zero() {
                continue;
            }
            let mut far: Option<(T, usize)> = None;
            for (i, p) in points.iter().enumerate() {
                let d = dist2(p, &centers[assignment[i]]);
                if d > T::zero() && far.is_none_or(|(fd, _)| d > fd) {
                    far = Some((d, i));
                }
            }
            if let Some((_, i)) = far {
                centers[c] = points[i];
                mass[c] = weights[i];
                assignment[i] = c;
            }
        }
    }

    let mut sums = vec![[T::zero(); 3]; k];
    let mut mass = vec![T::zero(); k];
    for ((&a, p), &w) in assignment.iter().zip(points).zip(weights) {
        for ch in 0..3 {
            sums[a][ch] = sums[a][ch] + p[ch] * w;
        }
        mass[a] = mass[a] + w;
    }
    let means: Vec<[T; 3]> = (0..k)
        .map(|c| {
            if mass[c] > T::zero() {
                sums[c].map(|s| s / mass[c])
            } else {
                centers[c]
            }
        })
        .collect();
    let sse = assignment
        .iter()
        .zip(points)
        .zip(weights)
        .map(|((&a, p), &w)| w * dist2(p, &means[a]))
        .sum();
    (assignment, sse)
}
