//! Radial quadrature rules for `∫₀¹ g(r) r dr`.

use crate::error::{FmrError, Result};
use crate::scalar::Scalar;

/// Nodes `r_u` with weights `w_u` such that `Σ w_u g(r_u) ≈ ∫₀¹ g(r) r dr`.
///
/// The `r` measure factor is folded into the weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialQuadrature<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> RadialQuadrature<T> {
    /// Midpoint rule on `G` uniform cells.
    pub fn midpoint(g: usize) -> Result<Self> {
        if g == 0 {
            return Err(FmrError::DegenerateGrid("quadrature needs at least one node".into()));
        }
        let gt = T::from_usize_lossy(g);
        let nodes: Vec<T> = (0..g).map(|u| (T::from_usize_lossy(u) + T::lit(0.5)) / gt).collect();
        let weights = nodes.iter().map(|&r| r / gt).collect();
        Ok(Self { nodes, weights })
    }

    /// Midpoint rule in `γ = r^α`, so `r dr = γ^{2/α-1} dγ / α`.
    ///
    /// Harmonic radial products become pure complex exponentials in `γ`,
    /// which this rule integrates exactly.
    pub fn warped(alpha: T, g: usize) -> Result<Self> {
        if g == 0 {
            return Err(FmrError::DegenerateGrid("quadrature needs at least one node".into()));
        }
        if !(alpha > T::zero()) {
            return Err(FmrError::ParamError(format!("alpha must be positive, got {alpha}")));
        }
        let gt = T::from_usize_lossy(g);
        let expo = T::lit(2.0) / alpha - T::one();
        let mut nodes = Vec::with_capacity(g);
        let mut weights = Vec::with_capacity(g);
        for u in 0..g {
            let gamma = (T::from_usize_lossy(u) + T::lit(0.5)) / gt;
            nodes.push(gamma.powf(T::one() / alpha));
            weights.push(gamma.powf(expo) / (alpha * gt));
        }
        Ok(Self { nodes, weights })
    }

    /// Cell-boundary rule on arbitrary increasing nodes in `[0, 1]`.
    ///
    /// Cell edges sit at midpoints between nodes, closed by `0` and `1`.
    pub fn from_nodes(nodes: &[T]) -> Result<Self> {
        if nodes.is_empty() {
            return Err(FmrError::DegenerateGrid("no radial nodes".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes[0] < T::zero() || nodes[nodes.len() - 1] > T::one() {
            return Err(FmrError::DegenerateGrid("radial nodes must increase within [0, 1]".into()));
        }
        let half = T::lit(0.5);
        let u = nodes.len();
        let weights = (0..u)
            .map(|i| {
                let lo = if i == 0 { T::zero() } else { (nodes[i - 1] + nodes[i]) * half };
                let hi = if i + 1 == u { T::one() } else { (nodes[i] + nodes[i + 1]) * half };
                nodes[i] * (hi - lo)
            })
            .collect();
        Ok(Self { nodes: nodes.to_vec(), weights })
    }

    /// Gauss-Legendre rule with `G` nodes in `γ = r^α`.
    ///
    /// Exact for polynomials in `γ` of degree below `2G`, which covers the
    /// polynomial family's products for any practical order.
    pub fn gauss_warped(alpha: T, g: usize) -> Result<Self> {
        if g == 0 {
            return Err(FmrError::DegenerateGrid("quadrature needs at least one node".into()));
        }
        if !(alpha > T::zero()) {
            return Err(FmrError::ParamError(format!("alpha must be positive, got {alpha}")));
        }
        let expo = T::lit(2.0) / alpha - T::one();
        let (xs, ws) = gauss_legendre(g);
        // ascending γ: Legendre roots come out descending
        let mut nodes = Vec::with_capacity(g);
        let mut weights = Vec::with_capacity(g);
        for (x, w) in xs.into_iter().zip(ws).rev() {
            let gamma = T::lit(0.5 * (x + 1.0));
            nodes.push(gamma.powf(T::one() / alpha));
            weights.push(T::lit(0.5 * w) * gamma.powf(expo) / alpha);
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Nodes (descending) and weights of the `g`-point rule on `[-1, 1]`,
/// by Newton iteration on the three-term Legendre recursion.
fn gauss_legendre(g: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; g];
    let mut ws = vec![0.0; g];
    let gf = g as f64;
    for i in 0..g.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (gf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=g {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if g == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = gf * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = x;
        ws[i] = w;
        xs[g - 1 - i] = -x;
        ws[g - 1 - i] = w;
    }
    (xs, ws)
}
