//! Fixed quadrature rules.

use gauss_quad::GaussLegendre;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut v = GaussLegendre::new(n.max(2))
        .expect("degree at least 2")
        .into_node_weight_pairs();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let (m, h) = ((a + b) / 2.0, (b - a) / 2.0);
    gauss_legendre(n)
        .into_iter()
        .map(move |(x, w)| (m + h * x, h * w))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let s: f64 = gauss_legendre_on(5, 0.0, 2.0)
            .map(|(x, w)| w * x.powi(9))
            .sum();
        assert!((s - 2f64.powi(10) / 10.0).abs() < 1e-10);
    }
}
