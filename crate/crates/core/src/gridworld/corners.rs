use super::{CornerSet, GridMap};

/// Free cells with exactly one occupied cell among their eight neighbours.
///
/// Neighbours outside the grid count as free. Counts are accumulated by
/// scattering from every occupied cell, which visits each obstacle once.
pub fn extract_convex_corners(map: &GridMap) -> CornerSet {
    let (w, h) = (map.width, map.height);
    let mut counts = vec![0u8; w * h];
    for r in 0..h {
        for c in 0..w {
            if !map.is_occupied(r, c) {
                continue;
            }
            for dr in -1isize..=1 {
                for dc in -1isize..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (rr, cc) = (r as isize + dr, c as isize + dc);
                    if map.in_bounds(rr, cc) {
                        counts[rr as usize * w + cc as usize] += 1;
                    }
                }
            }
        }
    }
    let cells = (0..h)
        .flat_map(|r| (0..w).map(move |c| (r, c)))
        .filter(|&(r, c)| !map.is_occupied(r, c) && counts[r * w + c] == 1)
        .collect();
    // already row-major and unique
    CornerSet::from_cells(cells)
}
