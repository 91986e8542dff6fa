use super::GridMap;

/// Dilates the occupied set by `radius` cells.
///
/// A cell becomes occupied when its centre lies within Euclidean distance
/// `radius` of an occupied cell centre. Only obstacle cells with a free
/// 4-neighbour can contribute cells the interior does not already cover, so
/// the stencil is stamped from boundary cells only.
pub fn inflate(map: &GridMap, radius: f64) -> GridMap {
    assert!(radius >= 0.0, "inflation radius must be non-negative");
    let mut out = map.clone();
    if radius == 0.0 {
        return out;
    }
    let reach = radius.floor() as isize;
    let stencil: Vec<(isize, isize)> = (-reach..=reach)
        .flat_map(|dr| (-reach..=reach).map(move |dc| (dr, dc)))
        .filter(|&(dr, dc)| (((dr * dr + dc * dc) as f64).sqrt()) <= radius)
        .collect();

    let (h, w) = (map.height as isize, map.width as isize);
    for r in 0..h {
        for c in 0..w {
            if !map.is_occupied(r as usize, c as usize) || !is_boundary(map, r, c) {
                continue;
            }
            for &(dr, dc) in &stencil {
                let (rr, cc) = (r + dr, c + dc);
                if map.in_bounds(rr, cc) {
                    out.set_occupied(rr as usize, cc as usize, true);
                }
            }
        }
    }
    out
}

/// Occupied cell with at least one free (or out-of-grid) 4-neighbour.
fn is_boundary(map: &GridMap, r: isize, c: isize) -> bool {
    [(-1, 0), (1, 0), (0, -1), (0, 1)].iter().any(|&(dr, dc)| {
        let (rr, cc) = (r + dr, c + dc);
        !map.in_bounds(rr, cc) || !map.is_occupied(rr as usize, cc as usize)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force Euclidean distance transform: every cell against every
    /// occupied cell.
    fn inflate_oracle(map: &GridMap, radius: f64) -> Vec<bool> {
        let occupied: Vec<(usize, usize)> = (0..map.height)
            .flat_map(|r| (0..map.width).map(move |c| (r, c)))
            .filter(|&(r, c)| map.is_occupied(r, c))
            .collect();
        (0..map.height)
            .flat_map(|r| (0..map.width).map(move |c| (r, c)))
            .map(|(r, c)| {
                occupied.iter().any(|&(orow, ocol)| {
                    let dr = r as f64 - orow as f64;
                    let dc = c as f64 - ocol as f64;
                    (dr * dr + dc * dc).sqrt() <= radius
                })
            })
            .collect()
    }

    fn occupied_cells(map: &GridMap) -> Vec<(usize, usize)> {
        (0..map.height)
            .flat_map(|r| (0..map.width).map(move |c| (r, c)))
            .filter(|&(r, c)| map.is_occupied(r, c))
            .collect()
    }

    #[test]
    fn zero_radius_is_identity() {
        let mut m = GridMap::new(8, 6);
        m.set_occupied(2, 3, true);
        m.set_occupied(5, 7, true);
        assert_eq!(inflate(&m, 0.0), m);
    }

    #[test]
    fn unit_radius_gives_plus_shape() {
        let mut m = GridMap::new(11, 11);
        m.set_occupied(5, 5, true);
        let got = occupied_cells(&inflate(&m, 1.0));
        assert_eq!(got, vec![(4, 5), (5, 4), (5, 5), (5, 6), (6, 5)]);
        assert_eq!(inflate(&m, 1.0).occupancy, inflate_oracle(&m, 1.0));
    }

    #[test]
    fn radius_one_and_a_half_gives_full_block() {
        let mut m = GridMap::new(11, 11);
        m.set_occupied(5, 5, true);
        let got = occupied_cells(&inflate(&m, 1.5));
        let want: Vec<_> = (4..=6).flat_map(|r| (4..=6).map(move |c| (r, c))).collect();
        assert_eq!(got, want);
    }

    fn arb_map() -> impl Strategy<Value = GridMap> {
        (1usize..20, 1usize..20, 0.0..0.5f64, any::<u64>()).prop_map(|(w, h, density, seed)| {
            use rand::Rng;
            let mut rng = crate::rng::seeded(seed);
            let mut m = GridMap::new(w, h);
            for o in m.occupancy.iter_mut() {
                *o = rng.random::<f64>() < density;
            }
            m
        })
    }

    proptest! {
        #[test]
        fn matches_distance_transform(m in arb_map(), radius in prop::sample::select(vec![0.0, 1.0, 1.5, 2.0, 2.5, 3.2])) {
            prop_assert_eq!(inflate(&m, radius).occupancy, inflate_oracle(&m, radius));
        }

        #[test]
        fn monotone_in_radius(m in arb_map(), r1 in 0.0..4.0f64, extra in 0.0..3.0f64) {
            let small = inflate(&m, r1);
            let large = inflate(&m, r1 + extra);
            for (a, b) in small.occupancy.iter().zip(&large.occupancy) {
                prop_assert!(!a || *b);
            }
            for (a, b) in m.occupancy.iter().zip(&small.occupancy) {
                prop_assert!(!a || *b);
            }
        }
    }
}
