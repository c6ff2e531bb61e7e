use num_complex::Complex64;

use super::model::FuchsianSurface;
use super::word::{Letter, Word};
use crate::Mobius;

/// Translate `g F` of the fundamental quadrilateral.
#[derive(Debug, Clone)]
pub struct Tile {
    pub element: Mobius,
    /// Index of the parent tile in the walk and the letter leading here.
    pub parent: Option<(usize, Letter)>,
    pub depth: usize,
    /// Lower bound for the distance from the query point to the tile.
    pub lower_bound: f64,
}

/// Standardizer sending `0 ↦ e1`, `∞ ↦ e2` (`None` = ∞).
pub(crate) fn geodesic_frame(e1: Option<f64>, e2: Option<f64>) -> Mobius {
    match (e1, e2) {
        (Some(u), Some(v)) => {
            let (m, det) = if v > u {
                (Mobius::new_unchecked(v, u, 1.0, 1.0), v - u)
            } else {
                (Mobius::new_unchecked(v, -u, 1.0, -1.0), u - v)
            };
            let s = det.sqrt().recip();
            Mobius::new_unchecked(m.a * s, m.b * s, m.c * s, m.d * s)
        }
        (Some(u), None) => Mobius::new_unchecked(1.0, u, 0.0, 1.0),
        (None, Some(v)) => Mobius::new_unchecked(v, -1.0, 1.0, 0.0),
        (None, None) => Mobius::identity(),
    }
}

/// `sinh` of the signed distance from `z` to the geodesic `(e1, e2)`.
pub(crate) fn signed_sinh_distance(e1: Option<f64>, e2: Option<f64>, z: Complex64) -> f64 {
    let w = geodesic_frame(e1, e2).inverse().apply_complex(z);
    w.re / w.im
}

/// Distance from `z` to the geodesic with the given endpoints.
pub fn distance_to_geodesic(e1: Option<f64>, e2: Option<f64>, z: Complex64) -> f64 {
    signed_sinh_distance(e1, e2, z).abs().asinh()
}

impl FuchsianSurface {
    /// Tiles `g F` that may meet the ball of the given radius about `z`,
    /// found by walking the Cayley tree and pruning every subtree that lies
    /// beyond a side geodesic farther than `radius` from `z`. Order is
    /// deterministic (depth-first, letters in `A, a, B, b` order).
    pub fn tiles_near(&self, z: Complex64, radius: f64) -> Vec<Tile> {
        let inner = self.frame.from_frame(self.frame.interior_point());
        let sides: Vec<(Letter, (Option<f64>, Option<f64>))> =
            Letter::ALL.iter().map(|&l| (l, self.side(l))).collect();
        let mut out: Vec<Tile> = Vec::new();
        let mut stack: Vec<(Mobius, Option<(usize, Letter)>, usize, f64)> =
            vec![(Mobius::identity(), None, 0, 0.0)];
        while let Some((g, parent, depth, bound)) = stack.pop() {
            let index = out.len();
            out.push(Tile {
                element: g,
                parent,
                depth,
                lower_bound: bound,
            });
            let reference = g.apply_complex(inner);
            let last = parent.map(|p| p.1);
            for &(h, (e1, e2)) in sides.iter().rev() {
                if Some(h.inverse()) == last {
                    continue;
                }
                let (f1, f2) = (g.apply_boundary(e1), g.apply_boundary(e2));
                let sz = signed_sinh_distance(f1, f2, z);
                let sr = signed_sinh_distance(f1, f2, reference);
                // The subtree behind this side lies on the side opposite to gF.
                let d = if sz * sr > 0.0 { sz.abs().asinh() } else { 0.0 };
                let d = d.max(bound);
                if d > radius {
                    continue;
                }
                stack.push((
                    g.compose(&h.matrix(&self.a, &self.b)),
                    Some((index, h)),
                    depth + 1,
                    d,
                ));
            }
        }
        out
    }
}

/// The word of tile `i` of a walk returned by `tiles_near`.
pub fn tile_word(tiles: &[Tile], mut i: usize) -> Word {
    let mut letters = Vec::with_capacity(tiles[i].depth);
    while let Some((p, l)) = tiles[i].parent {
        letters.push(l);
        i = p;
    }
    letters.reverse();
    Word::new(letters)
}
