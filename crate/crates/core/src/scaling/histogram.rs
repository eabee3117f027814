use crate::image::IntensityMap;
use crate::num::{quantize_unit, Scalar};

const BINS: usize = 256;

/// Monotone histogram specification over 256 quantized bins.
///
/// Each source bin `i` maps to the smallest reference bin `j` whose
/// cumulative frequency reaches that of `i`; the output value is the smallest
/// actual reference value falling in bin `j`, so every output value occurs
/// in `reference`.
pub fn match_histogram<T: Scalar>(
    src: &IntensityMap<T>,
    reference: &IntensityMap<T>,
) -> IntensityMap<T> {
    let src_hist = histogram(src);
    let ref_hist = histogram(reference);

    let mut representative = [None::<T>; BINS];
    for &v in reference.as_slice() {
        let slot = &mut representative[quantize_unit(v) as usize];
        *slot = Some(slot.map_or(v, |r: T| r.min(v)));
    }

    let src_total = src.len() as u128;
    let ref_total = reference.len() as u128;
    let src_cdf = cumulative(&src_hist);
    let ref_cdf = cumulative(&ref_hist);

    let mut lut = [T::zero(); BINS];
    let mut j = 0;
    for i in 0..BINS {
        // compare src_cdf[i] / src_total <= ref_cdf[j] / ref_total without rounding
        while j + 1 < BINS && (ref_cdf[j] as u128) * src_total < (src_cdf[i] as u128) * ref_total {
            j += 1;
        }
        // the first bin meeting the CDF is always populated, except when src bin i
        // is itself empty and precedes all reference mass
        lut[i] = representative[j]
            .or_else(|| representative[j..].iter().flatten().next().copied())
            .unwrap_or(T::zero());
    }

    let data = src
        .as_slice()
        .iter()
        .map(|&v| lut[quantize_unit(v) as usize])
        .collect();
    IntensityMap::from_raw_unchecked(src.width(), src.height(), data)
}

fn histogram<T: Scalar>(map: &IntensityMap<T>) -> [u64; BINS] {
    let mut hist = [0u64; BINS];
    for &v in map.as_slice() {
        hist[quantize_unit(v) as usize] += 1;
    }
    hist
}

fn cumulative(hist: &[u64; BINS]) -> [u64; BINS] {
    let mut cdf = [0u64; BINS];
    let mut acc = 0;
    for (c, &h) in cdf.iter_mut().zip(hist) {
        acc += h;
        *c = acc;
    }
    cdf
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn map(values: &[f64]) -> IntensityMap<f64> {
        IntensityMap::new(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn self_matching_is_near_identity() {
        let src = IntensityMap::from_fn(16, 16, |x, y| ((x * 7 + y * 13) % 97) as f64 / 96.0);
        let out = match_histogram(&src, &src);
        for (a, b) in src.as_slice().iter().zip(out.as_slice()) {
            assert!((a - b).abs() <= 1.0 / 255.0);
        }
    }

    #[test]
    fn constant_to_constant() {
        let out = match_histogram(&map(&[0.5; 9]), &map(&[0.2; 4]));
        assert!(out.as_slice().iter().all(|&v| v == 0.2));
    }

    #[test]
    fn two_levels_to_two_levels() {
        let out = match_histogram(&map(&[0.0, 1.0, 1.0, 0.0]), &map(&[0.25, 0.75, 0.75, 0.25]));
        assert_eq!(out.as_slice(), &[0.25, 0.75, 0.75, 0.25]);
    }

    #[test]
    fn uniform_source_onto_two_levels() {
        // 16 distinct levels onto 8 blacks and 8 whites
        let src: Vec<f64> = (0..16).map(|i| i as f64 / 15.0).collect();
        let reference: Vec<f64> = (0..16)
            .map(|i| if i % 2 == 0 { 0.0 } else { 1.0 })
            .collect();
        let out = match_histogram(&map(&src), &map(&reference));
        assert_eq!(out.as_slice()[..8], [0.0; 8]);
        assert_eq!(out.as_slice()[8..], [1.0; 8]);
    }

    fn cdf_of(values: &[f64]) -> Vec<f64> {
        let mut hist = [0usize; BINS];
        for &v in values {
            hist[quantize_unit(v) as usize] += 1;
        }
        let mut acc = 0;
        hist.iter()
            .map(|&h| {
                acc += h;
                acc as f64 / values.len() as f64
            })
            .collect()
    }

    proptest! {
        #[test]
        fn output_drawn_from_reference_and_monotone(src in proptest::collection::vec(0.0f64..=1.0, 1..200),
                                                    reference in proptest::collection::vec(0.0f64..=1.0, 1..200)) {
            let out = match_histogram(&map(&src), &map(&reference));
            for &v in out.as_slice() {
                prop_assert!(reference.contains(&v));
            }
            for i in 0..src.len() {
                for j in 0..src.len() {
                    if src[i] < src[j] {
                        prop_assert!(out.as_slice()[i] <= out.as_slice()[j]);
                    }
                }
            }
        }

        // With no two source pixels sharing a bin, the matched CDF tracks the
        // reference CDF to within one source pixel.
        #[test]
        fn cdf_sup_norm(bins in proptest::sample::subsequence((0u8..=255).collect::<Vec<_>>(), 1..256),
                        reference in proptest::collection::vec(0u8..=255, 1..400)) {
            let src: Vec<f64> = bins.iter().map(|&b| f64::from(b) / 255.0).collect();
            let reference: Vec<f64> = reference.iter().map(|&b| f64::from(b) / 255.0).collect();
            let out = match_histogram(&map(&src), &map(&reference));
            let got = cdf_of(out.as_slice());
            let want = cdf_of(&reference);
            let bound = 1.0 / src.len().min(reference.len()) as f64 + 1e-12;
            let sup = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            prop_assert!(sup <= bound, "sup {sup} > {bound}");
        }
    }
}
