use rayon::prelude::*;

use super::LabelMap;
use crate::error::{dims_match, Result};
use crate::image::{ColorImage, IntensityMap};
use crate::num::Scalar;

/// Rough-manga statistics for one region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionStats<T> {
    pub region_id: u32,
    pub pixel_count: usize,
    /// Population standard deviation of the rough map over the region.
    pub sigma: T,
    pub min_ir: T,
    pub max_ir: T,
    /// RGB centroid of the region, when a source image was supplied.
    pub mean_color: Option<[T; 3]>,
}

/// Computes per-region statistics of `rough`, indexed by region label.
pub fn region_stats<T: Scalar>(
    regions: &LabelMap,
    rough: &IntensityMap<T>,
    source: Option<&ColorImage>,
) -> Result<Vec<RegionStats<T>>> {
    dims_match("rough map", regions.dimensions(), rough.dimensions())?;
    if let Some(img) = source {
        dims_match("source image", regions.dimensions(), img.dimensions())?;
    }

    let n = regions.region_count();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &l) in regions.labels().iter().enumerate() {
        members[l as usize].push(i);
    }

    let values = rough.as_slice();
    let stats = members
        .par_iter()
        .enumerate()
        .map(|(id, pixels)| {
            let count = T::from_usize_lossy(pixels.len());
            let (min_ir, max_ir) = pixels.iter().fold((T::one(), T::zero()), |(lo, hi), &i| {
                (lo.min(values[i]), hi.max(values[i]))
            });
            // a flat region has sigma exactly 0; the rounded mean would leave residue
            let var = if min_ir == max_ir {
                T::zero()
            } else {
                let mean = pixels.iter().map(|&i| values[i]).sum::<T>() / count;
                pixels
                    .iter()
                    .map(|&i| {
                        let d = values[i] - mean;
                        d * d
                    })
                    .sum::<T>()
                    / count
            };
            let mean_color = source.map(|img| {
                let mut acc = [T::zero(); 3];
                for &i in pixels {
                    let px = img.pixel_at(i);
                    for c in 0..3 {
                        acc[c] = acc[c] + T::from_u8(px[c]).unwrap();
                    }
                }
                acc.map(|a| a / count)
            });
            RegionStats {
                region_id: id as u32,
                pixel_count: pixels.len(),
                sigma: var.sqrt().min(T::lit(0.5)),
                min_ir,
                max_ir,
                mean_color,
            }
        })
        .collect();
    Ok(stats)
}
