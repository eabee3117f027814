//! Procedural test illustration: a flat-shaded character bust on a sky
//! gradient, with ink outlines. Used as the bundled sample and in tests.

use crate::image::ColorImage;

fn mix(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    let t = t.clamp(0.0, 1.0);
    [
        a[0] + (b[0] - a[0]) * t,
        a[1] + (b[1] - a[1]) * t,
        a[2] + (b[2] - a[2]) * t,
    ]
}

fn to_rgb(c: [f64; 3]) -> [u8; 3] {
    c.map(|v| v.round().clamp(0.0, 255.0) as u8)
}

/// Renders the sample at `size`×`size` pixels. Output depends only on `size`.
pub fn sample_illustration(size: usize) -> ColorImage {
    assert!(size > 0, "sample size must be positive");
    let n = size as f64;
    ColorImage::from_fn(size, size, |x, y| {
        let u = (x as f64 + 0.5) / n;
        let v = (y as f64 + 0.5) / n;
        let ink = 1.5 / n;

        let face = ((u - 0.5).powi(2) + (v - 0.5).powi(2)).sqrt();
        let hair = ((u - 0.5).powi(2) + (v - 0.42).powi(2)).sqrt();
        let body = ((u - 0.5) / 0.34).powi(2) + ((v - 1.0) / 0.26).powi(2);
        let eye = [(0.43, 0.52), (0.57, 0.52)]
            .iter()
            .map(|&(ex, ey)| ((u - ex).powi(2) + (v - ey).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);

        if eye < 0.03 {
            return [25, 30, 60];
        }
        if (face - 0.2).abs() < ink && v > 0.45 {
            return [20, 20, 20];
        }
        if hair < 0.23 && v < 0.47 {
            if (hair - 0.23).abs() < ink {
                return [20, 20, 20];
            }
            let shade = (u - 0.35) / 0.4;
            return to_rgb(mix(
                [120, 70, 40].map(f64::from),
                [70, 38, 22].map(f64::from),
                shade,
            ));
        }
        if face < 0.2 {
            let shade = ((u - 0.42).powi(2) + (v - 0.45).powi(2)).sqrt() / 0.25;
            return to_rgb(mix([252.0, 222.0, 196.0], [226.0, 168.0, 140.0], shade));
        }
        if body < 1.0 {
            if (body - 1.0).abs() < 2.0 * ink / 0.26 {
                return [20, 20, 20];
            }
            let shade = (u - 0.3) / 0.5;
            return to_rgb(mix([215.0, 50.0, 60.0], [140.0, 25.0, 40.0], shade));
        }
        if v > 0.82 {
            return to_rgb(mix(
                [90.0, 170.0, 80.0],
                [50.0, 110.0, 50.0],
                (v - 0.82) / 0.18,
            ));
        }
        to_rgb(mix([120.0, 170.0, 235.0], [215.0, 232.0, 250.0], v / 0.82))
    })
}
