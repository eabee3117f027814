//! Color-coherent region extraction and per-region rough-manga statistics.

mod components;
mod kmeans;
mod stats;

pub use components::split_connected;
pub use kmeans::{kmeans_colors, kmeans_colors_with, KMeansConfig};
pub use stats::{region_stats, RegionStats};

use crate::error::{Error, Result};
use crate::image::ColorImage;

/// Row-major pixel labels, dense in `0..region_count`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: usize,
}

impl LabelMap {
    /// Wraps raw labels, renumbering them densely in order of first appearance.
    pub fn from_labels(width: usize, height: usize, labels: Vec<u32>) -> Result<Self> {
        if width == 0 || height == 0 || labels.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} labels do not fit {width}x{height}",
                labels.len()
            )));
        }
        Ok(Self::canonical(width, height, labels))
    }

    pub(crate) fn canonical(width: usize, height: usize, mut labels: Vec<u32>) -> Self {
        let mut remap = std::collections::HashMap::new();
        for label in labels.iter_mut() {
            let next = remap.len() as u32;
            *label = *remap.entry(*label).or_insert(next);
        }
        Self {
            width,
            height,
            count: remap.len(),
            labels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn region_count(&self) -> usize {
        self.count
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Pixel count per label.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.count];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    /// False-color rendering for inspection; colors derive from the label id only.
    pub fn render(&self) -> ColorImage {
        let data = self.labels.iter().flat_map(|&l| label_color(l)).collect();
        ColorImage::new(self.width, self.height, data).expect("label map dimensions are valid")
    }
}

fn label_color(label: u32) -> [u8; 3] {
    let mut h = label.wrapping_add(1).wrapping_mul(0x9E37_79B9);
    h ^= h >> 15;
    h = h.wrapping_mul(0x85EB_CA6B);
    h ^= h >> 13;
    let b = h.to_le_bytes();
    [b[0] | 0x20, b[1] | 0x20, b[2] | 0x20]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_labels_are_dense_in_first_appearance_order() {
        let map = LabelMap::from_labels(3, 2, vec![7, 7, 2, 9, 2, 7]).unwrap();
        assert_eq!(map.labels(), &[0, 0, 1, 2, 1, 0]);
        assert_eq!(map.region_count(), 3);
        assert_eq!(map.sizes(), vec![3, 2, 1]);
    }

    #[test]
    fn render_is_deterministic() {
        let map = LabelMap::from_labels(2, 1, vec![0, 1]).unwrap();
        let img = map.render();
        assert_ne!(img.pixel(0, 0), img.pixel(1, 0));
        assert_eq!(img, map.render());
    }
}
