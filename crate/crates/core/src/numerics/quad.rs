use gauss_quad::legendre::GaussLegendre;
use std::num::NonZeroUsize;

/// Gauss-Legendre rule stored on the reference interval `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
        let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        GaussRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn points(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.points(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        let g = GaussRule::new(5);
        let v = g.integrate(0.0, 2.0, |x| x.powi(9));
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-12);
    }

    #[test]
    fn nodes_sorted_inside_interval() {
        let g = GaussRule::new(16);
        let pts: Vec<_> = g.points(1.0, 3.0).collect();
        assert!(pts.windows(2).all(|p| p[0].0 < p[1].0));
        assert!(pts.iter().all(|p| p.0 > 1.0 && p.0 < 3.0));
        let total: f64 = pts.iter().map(|p| p.1).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }
}
