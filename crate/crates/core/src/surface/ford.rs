use num_complex::Complex64;

use super::enumerate::GroupTable;
use super::word::Word;
use crate::{Error, Mobius, Result};

const REDUCE_CAP: usize = 100_000;

/// Arc of the Ford domain's floor: part of the isometric circle of `element`
/// (cusp frame) between `x_lo` and `x_hi`.
#[derive(Debug, Clone)]
pub struct FordArc {
    pub x_lo: f64,
    pub x_hi: f64,
    pub center: f64,
    pub radius: f64,
    pub element: Mobius,
    pub word: Word,
}

impl FordArc {
    pub fn height(&self, x: f64) -> f64 {
        (self.radius * self.radius - (x - self.center).powi(2))
            .max(0.0)
            .sqrt()
    }

    /// `∫ dx / h(x)` over the arc: area above it in `dx dy / y²`.
    pub fn area(&self) -> f64 {
        let s = |x: f64| ((x - self.center) / self.radius).clamp(-1.0, 1.0).asin();
        s(self.x_hi) - s(self.x_lo)
    }
}

/// Ford fundamental domain for the cusp at ∞ of the cusp frame: the strip
/// `x0 ≤ x ≤ x0 + width` above all isometric circles.
#[derive(Debug, Clone)]
pub struct FordDomain {
    pub x0: f64,
    pub width: f64,
    pub arcs: Vec<FordArc>,
    /// Word bound that produced a complete floor.
    pub word_len: usize,
    /// Word of the cusp translation `ζ ↦ ζ + width`.
    pub translation: Word,
    circles: Vec<(f64, f64, Mobius, Word)>,
}

impl FordDomain {
    /// Builds the floor from isometric circles of words up to increasing
    /// length until the area equals 2π, which certifies completeness.
    pub fn new(a: &Mobius, b: &Mobius, conj: &Mobius, x0: f64, width: f64) -> Result<Self> {
        let ci = conj.inverse();
        let (ac, bc) = (conj.compose(a).compose(&ci), conj.compose(b).compose(&ci));
        let k: Word = "ABab".parse().expect("valid word");
        let kc = k.eval(&ac, &bc);
        let translation = if kc.b / kc.d > 0.0 { k } else { k.inverse() };
        let mut last_err = f64::NAN;
        for len in 4..=10 {
            let table = GroupTable::build(&ac, &bc, len, usize::MAX)?;
            let dom = Self::from_table(&table, x0, width, len, &translation);
            let err = dom.area() - 2.0 * std::f64::consts::PI;
            if err.abs() < 1e-9 {
                return Ok(dom);
            }
            last_err = err;
        }
        Err(Error::NonConvergence(last_err.abs().recip() as usize))
    }

    fn from_table(table: &GroupTable, x0: f64, width: f64, len: usize, translation: &Word) -> Self {
        let mut circles: Vec<(f64, f64, Mobius, Word)> = Vec::new();
        for (w, g) in table.iter() {
            if g.c.abs() < 1e-12 {
                continue;
            }
            let (c, r) = (-g.d / g.c, g.c.abs().recip());
            // Translates meeting the window [x0 − w, x0 + 2w].
            let n_lo = ((x0 - width - r - c) / width).ceil() as i64;
            let n_hi = ((x0 + 2.0 * width + r - c) / width).floor() as i64;
            for n in n_lo..=n_hi {
                let shift = n as f64 * width;
                let t = Mobius::new_unchecked(1.0, -shift, 0.0, 1.0);
                // g ∘ T_{−shift} has isometric circle centred at c + shift.
                circles.push((
                    c + shift,
                    r,
                    g.compose(&t),
                    w.concat(&power(translation, -n)),
                ));
            }
        }
        circles.sort_by(|p, q| q.1.total_cmp(&p.1).then(p.0.total_cmp(&q.0)));
        circles.dedup_by(|p, q| (p.0 - q.0).abs() < 1e-10 && (p.1 - q.1).abs() < 1e-10);
        // The largest circles bound the floor from below; smaller circles
        // can never reach it.
        let lead = &circles[..circles.len().min(64)];
        let floor_lb = (0..=512)
            .map(|k| {
                let x = x0 + width * k as f64 / 512.0;
                lead.iter()
                    .map(|&(c, r, _, _)| (r * r - (x - c) * (x - c)).max(0.0).sqrt())
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        circles.retain(|&(_, r, _, _)| r > floor_lb * (1.0 - 1e-9));
        let height = |i: usize, x: f64| {
            let (c, r, _, _) = &circles[i];
            let (c, r) = (*c, *r);
            r * r - (x - c) * (x - c)
        };
        let top = |x: f64| {
            (0..circles.len())
                .max_by(|&i, &j| height(i, x).total_cmp(&height(j, x)))
                .expect("circles exist")
        };
        // Walk the upper envelope from x0 to x0 + width.
        let mut arcs = Vec::new();
        let mut x = x0;
        let end = x0 + width;
        let mut cur = top(x0 + 1e-12 * width);
        let mut start = x0;
        while x < end {
            let (c1, r1, g1) = (circles[cur].0, circles[cur].1, circles[cur].2);
            // Circle j overtakes the current one moving right iff its centre
            // is further right; the crossing is where the heights agree.
            let next_x = circles
                .iter()
                .filter(|c| c.0 > c1 + 1e-14)
                .map(|&(c2, r2, _, _)| (r1 * r1 - r2 * r2 + c2 * c2 - c1 * c1) / (2.0 * (c2 - c1)))
                .filter(|&xb| xb > x + 1e-13 && xb < end)
                .fold(end, f64::min);
            if next_x >= end {
                arcs.push(FordArc {
                    x_lo: start,
                    x_hi: end,
                    center: c1,
                    radius: r1,
                    element: g1,
                    word: circles[cur].3.clone(),
                });
                break;
            }
            let after = top(next_x + 1e-9 * width);
            if after != cur {
                arcs.push(FordArc {
                    x_lo: start,
                    x_hi: next_x,
                    center: c1,
                    radius: r1,
                    element: g1,
                    word: circles[cur].3.clone(),
                });
                start = next_x;
                cur = after;
            }
            // Otherwise the crossing lies below the envelope.
            x = next_x;
        }
        Self {
            x0,
            width,
            arcs,
            word_len: len,
            translation: translation.clone(),
            circles,
        }
    }

    pub fn area(&self) -> f64 {
        self.arcs.iter().map(FordArc::area).sum()
    }

    /// Lowest point of the floor.
    pub fn min_height(&self) -> f64 {
        self.arcs
            .iter()
            .flat_map(|a| [a.height(a.x_lo), a.height(a.x_hi)])
            .fold(f64::INFINITY, f64::min)
    }

    /// Ford reduction: translate into the strip and jump out of isometric
    /// circles until the point lies in the domain. Returns `(g ζ, g)`; the
    /// height `Im(g ζ)` is the largest over the orbit.
    pub fn reduce(&self, zeta: Complex64) -> (Complex64, Mobius) {
        let mut z = zeta;
        let mut g = Mobius::identity();
        for _ in 0..REDUCE_CAP {
            let n = ((z.re - self.x0) / self.width).floor();
            if n != 0.0 {
                let t = Mobius::new_unchecked(1.0, -n * self.width, 0.0, 1.0);
                z = t.apply_complex(z);
                g = t.compose(&g);
            }
            match self.best_arc(z).map(|a| a.element) {
                Some(h) => {
                    z = h.apply_complex(z);
                    g = h.compose(&g);
                }
                None => break,
            }
        }
        (z, g)
    }

    /// [`Self::reduce`] that also returns the word of `g` and the number of
    /// moves (a strip translation counts as one).
    pub fn reduce_traced(&self, zeta: Complex64) -> (Complex64, Mobius, Word, usize) {
        let mut z = zeta;
        let mut g = Mobius::identity();
        let mut word = Word::identity();
        let mut steps = 0;
        for _ in 0..REDUCE_CAP {
            let n = ((z.re - self.x0) / self.width).floor();
            if n != 0.0 {
                let t = Mobius::new_unchecked(1.0, -n * self.width, 0.0, 1.0);
                z = t.apply_complex(z);
                g = t.compose(&g);
                word = power(&self.translation, -(n as i64)).concat(&word);
                steps += 1;
            }
            match self.best_arc(z) {
                Some(arc) => {
                    z = arc.element.apply_complex(z);
                    g = arc.element.compose(&g);
                    word = arc.word.concat(&word);
                    steps += 1;
                }
                None => break,
            }
        }
        (z, g, word, steps)
    }

    fn best_arc(&self, z: Complex64) -> Option<&FordArc> {
        let mut best: Option<(f64, &FordArc)> = None;
        for arc in &self.arcs {
            let inside =
                (z.re - arc.center).powi(2) + z.im * z.im < arc.radius * arc.radius * (1.0 - 1e-14);
            if inside {
                let e = &arc.element;
                let y = z.im / ((e.c * z.re + e.d).powi(2) + (e.c * z.im).powi(2));
                if best.is_none_or(|(yb, _)| y > yb) {
                    best = Some((y, arc));
                }
            }
        }
        best.map(|(_, a)| a)
    }

    /// Number of isometric circles considered.
    pub fn circle_count(&self) -> usize {
        self.circles.len()
    }
}

fn power(w: &Word, n: i64) -> Word {
    let base = if n < 0 { w.inverse() } else { w.clone() };
    (0..n.unsigned_abs()).fold(Word::identity(), |acc, _| acc.concat(&base))
}
