use num_complex::Complex64;

use super::enumerate::GroupTable;
use super::ford::FordDomain;
use super::model::FuchsianSurface;
use super::word::Word;
use crate::{Error, Mobius, Point, Result};

/// Word bound for the candidate side pairings.
const SIDE_WORD_LEN: usize = 6;
const ITERATION_CAP: usize = 10_000;
/// Klein-model radius beyond which a vertex is treated as ideal.
const IDEAL_RADIUS: f64 = 1.0 - 1e-6;

/// Side of a Dirichlet polygon, in Klein coordinates centred at the centre.
#[derive(Debug, Clone)]
pub struct DirichletSide {
    pub start: [f64; 2],
    pub end: [f64; 2],
    /// Pairing element `g` whose bisector carries the side; it maps the side
    /// to the side labelled `g⁻¹`.
    pub pairing: Mobius,
    pub word: Word,
}

impl DirichletSide {
    /// Hyperbolic length, infinite when an endpoint is ideal.
    pub fn length(&self) -> f64 {
        let n = |p: [f64; 2]| p[0] * p[0] + p[1] * p[1];
        if n(self.start).sqrt() >= IDEAL_RADIUS || n(self.end).sqrt() >= IDEAL_RADIUS {
            return f64::INFINITY;
        }
        let dot = self.start[0] * self.end[0] + self.start[1] * self.end[1];
        let c = (1.0 - dot) / ((1.0 - n(self.start)) * (1.0 - n(self.end))).sqrt();
        c.max(1.0).acosh()
    }
}

#[derive(Debug, Clone)]
pub struct DirichletDomain {
    pub center: Point,
    pub sides: Vec<DirichletSide>,
    ford: FordDomain,
    conj: Mobius,
}

/// Result of [`DirichletDomain::reduce_point`]: `z = word(point)`.
#[derive(Debug, Clone)]
pub struct ReducedPoint {
    pub point: Point,
    pub word: Word,
    pub element: Mobius,
    pub steps: usize,
}

fn klein(center: &Point, z: Complex64) -> [f64; 2] {
    let c = center.to_complex();
    let w = (z - c) / (z - c.conj());
    let k = w * 2.0 / (1.0 + w.norm_sqr());
    [k.re, k.im]
}

impl DirichletDomain {
    pub fn new(surface: &FuchsianSurface, center: Point) -> Result<Self> {
        let len = SIDE_WORD_LEN.min(surface.max_word_len()).max(1);
        let table = GroupTable::build(&surface.a, &surface.b, len, usize::MAX)?;
        let mut cands: Vec<(f64, &Word, Mobius)> = Vec::with_capacity(table.len());
        for (w, g) in table.iter() {
            let d = center.distance(&g.apply(&center));
            if d < 1e-3 {
                return Err(Error::InvalidArgument(format!(
                    "Dirichlet centre is (nearly) fixed by {w}"
                )));
            }
            cands.push((d, w, *g));
        }
        cands.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(y.1)));

        // Convex polygon as (vertex, label of the edge leaving the vertex).
        let mut poly: Vec<([f64; 2], Option<usize>)> = vec![
            ([-1.5, -1.5], None),
            ([1.5, -1.5], None),
            ([1.5, 1.5], None),
            ([-1.5, 1.5], None),
        ];
        for (idx, (d, _, g)) in cands.iter().enumerate() {
            let k = klein(&center, g.apply(&center).to_complex());
            let norm = (k[0] * k[0] + k[1] * k[1]).sqrt();
            let u = [k[0] / norm, k[1] / norm];
            let t = (d / 2.0).tanh();
            let f = |p: [f64; 2]| p[0] * u[0] + p[1] * u[1] - t;
            if poly.iter().all(|(p, _)| f(*p) <= 0.0) {
                continue;
            }
            let n = poly.len();
            let mut next = Vec::with_capacity(n + 1);
            for i in 0..n {
                let (p, lab) = poly[i];
                let q = poly[(i + 1) % n].0;
                let (fp, fq) = (f(p), f(q));
                if fp <= 0.0 {
                    next.push((p, lab));
                }
                if (fp <= 0.0) != (fq <= 0.0) {
                    let s = fp / (fp - fq);
                    let x = [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])];
                    // Entering the kept region continues the old edge;
                    // leaving it starts the new bisector edge.
                    next.push((x, if fp <= 0.0 { Some(idx) } else { lab }));
                }
            }
            poly = next;
        }
        let n = poly.len();
        let sides = (0..n)
            .filter_map(|i| {
                poly[i].1.map(|idx| DirichletSide {
                    start: poly[i].0,
                    end: poly[(i + 1) % n].0,
                    pairing: cands[idx].2,
                    word: cands[idx].1.clone(),
                })
            })
            .collect();
        Ok(Self {
            center,
            sides,
            ford: surface.ford.clone(),
            conj: surface.frame.conj,
        })
    }

    /// Pairs of sides `(i, j)` with `word_j = word_i⁻¹`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, s) in self.sides.iter().enumerate() {
            let inv = s.word.inverse();
            if let Some(j) = self.sides.iter().position(|t| t.word == inv) {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Reduction towards the centre: a Ford-domain pass (which crosses
    /// cusp neighbourhoods in one translation) followed by greedy side
    /// pairings. `steps` counts the moves of both passes.
    pub fn reduce_point(&self, z: Point) -> Result<ReducedPoint> {
        let (zeta, gc, mut word, mut pre) = self
            .ford
            .reduce_traced(self.conj.apply_complex(z.to_complex()));
        let ci = self.conj.inverse();
        let mut p = Point::from_complex(ci.apply_complex(zeta))?;
        let mut acc = ci.compose(&gc).compose(&self.conj);
        if p.cosh_distance(&self.center) >= z.cosh_distance(&self.center) {
            (p, acc, word, pre) = (z, Mobius::identity(), Word::identity(), 0);
        }
        for steps in pre..ITERATION_CAP {
            let here = p.cosh_distance(&self.center);
            let best = self
                .sides
                .iter()
                .map(|s| (s.pairing.apply(&p).cosh_distance(&self.center), s))
                .min_by(|a, b| a.0.total_cmp(&b.0));
            match best {
                Some((d, s)) if d < here * (1.0 - 1e-13) => {
                    p = s.pairing.apply(&p);
                    acc = s.pairing.compose(&acc);
                    word = s.word.concat(&word);
                }
                _ => {
                    return Ok(ReducedPoint {
                        point: p,
                        word: word.inverse(),
                        element: acc.inverse(),
                        steps,
                    })
                }
            }
        }
        Err(Error::NonConvergence(ITERATION_CAP))
    }
}
