use std::collections::VecDeque;

use super::LabelMap;

const UNVISITED: u32 = u32::MAX;

/// Splits each cluster into maximal 4-connected regions.
///
/// Regions are numbered in raster order of their first pixel.
pub fn split_connected(clusters: &LabelMap) -> LabelMap {
    let (w, h) = clusters.dimensions();
    let src = clusters.labels();
    let mut out = vec![UNVISITED; src.len()];
    let mut queue = VecDeque::new();
    let mut next = 0u32;

    for start in 0..src.len() {
        if out[start] != UNVISITED {
            continue;
        }
        let cluster = src[start];
        out[start] = next;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if out[j] == UNVISITED && src[j] == cluster {
                    out[j] = next;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        next += 1;
    }

    LabelMap {
        width: w,
        height: h,
        labels: out,
        count: next as usize,
    }
}
