//! Quadrature primitives: adaptive Gauss-Kronrod, Gauss-Legendre panels with
//! a spectral integration matrix, and composite Simpson rules on uniform grids.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{LabError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol {
            abs: 1e-14,
            rel: 1e-12,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let sum = f(center - dx) + f(center + dx);
        kronrod += w * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// error falls below `max(tol.abs, tol.rel * |value|)`.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: QuadTol) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= tol.max_intervals {
            return QuadResult {
                value: total,
                error: total_err,
                converged: false,
            };
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval collapsed to adjacent floats
            heap.push(worst);
            return QuadResult {
                value: total,
                error: total_err,
                converged: false,
            };
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        // guard against drift in the running sums
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    QuadResult {
        value,
        error,
        converged: true,
    }
}

/// [`adaptive`] with default tolerances, failing if they are not met.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    integrate_tol(f, a, b, QuadTol::default())
}

pub fn integrate_tol<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: QuadTol) -> Result<f64> {
    let r = adaptive(f, a, b, tol);
    if r.converged {
        Ok(r.value)
    } else {
        Err(LabError::Quadrature {
            a,
            b,
            error: r.error,
        })
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre rule on `[-1, 1]` together with its spectral integration
/// matrix `S[i][j] = ∫_{-1}^{x_i} ℓ_j(x) dx`, where `ℓ_j` is the Lagrange basis
/// on the nodes. `S · f(nodes)` integrates the node interpolant from `-1` up to
/// every node.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub integration: Vec<Vec<f64>>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Gauss-Legendre rule needs at least two nodes");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }

        // P_k at nodes for k = 0..=n
        let table: Vec<Vec<f64>> = (0..=n)
            .map(|k| nodes.iter().map(|&x| legendre(k, x).0).collect())
            .collect();
        let mut integration = vec![vec![0.0; n]; n];
        for (i, row) in integration.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let mut acc = 0.5 * (nodes[i] + 1.0);
                for k in 1..n {
                    acc += 0.5 * table[k][j] * (table[k + 1][i] - table[k - 1][i]);
                }
                *entry = weights[j] * acc;
            }
        }
        GaussLegendre {
            nodes,
            weights,
            integration,
        }
    }

    /// Fixed-order rule mapped onto `[a, b]`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// Composite Simpson rule for samples on a uniform grid with spacing `h`.
/// An odd number of intervals is closed with the 3/8 rule on the last three.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => 0.5 * h * (values[0] + values[1]),
        2 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        3 => 3.0 * h / 8.0 * (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3]),
        _ => {
            let even_end = if n.is_multiple_of(2) { n } else { n - 3 };
            let mut acc = values[0] + values[even_end];
            for (k, v) in values.iter().enumerate().take(even_end).skip(1) {
                acc += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            let mut total = acc * h / 3.0;
            if even_end < n {
                let v = &values[even_end..];
                total += 3.0 * h / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
            }
            total
        }
    }
}

/// Running integral `∫_{t_0}^{t_k}` at every node of a uniform grid.
pub fn cumulative_simpson(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (values[0] + values[1]);
        return out;
    }
    out[1] = h / 12.0 * (5.0 * values[0] + 8.0 * values[1] - values[2]);
    for k in 2..n {
        out[k] = if k % 2 == 0 {
            out[k - 2] + h / 3.0 * (values[k - 2] + 4.0 * values[k - 1] + values[k])
        } else {
            out[k - 3]
                + 3.0 * h / 8.0
                    * (values[k - 3] + 3.0 * values[k - 2] + 3.0 * values[k - 1] + values[k])
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_kronrod_handles_smooth_and_kinked_integrands() {
        let r = adaptive(|x: f64| x.sin(), 0.0, std::f64::consts::PI, QuadTol::default());
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-13);

        let r = adaptive(|x: f64| (x - 0.3).abs(), -1.0, 1.0, QuadTol::default());
        assert!(r.converged);
        assert!((r.value - (0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7)).abs() < 1e-12);
    }

    #[test]
    fn empty_range_is_zero() {
        assert_eq!(integrate(|x| x, 2.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        let v = gl.apply(|x| x.powi(15) + 3.0 * x.powi(4), -1.0, 1.0);
        assert!((v - 6.0 / 5.0).abs() < 1e-14);
        assert!((gl.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_matrix_matches_antiderivative() {
        let gl = GaussLegendre::new(12);
        let f: Vec<f64> = gl.nodes.iter().map(|x| x.exp()).collect();
        for (i, row) in gl.integration.iter().enumerate() {
            let approx: f64 = row.iter().zip(&f).map(|(s, v)| s * v).sum();
            let exact = gl.nodes[i].exp() - (-1f64).exp();
            assert!((approx - exact).abs() < 1e-13, "node {i}: {approx} vs {exact}");
        }
    }

    #[test]
    fn simpson_variants() {
        for n in [2usize, 3, 4, 7, 100, 101] {
            let h = 1.0 / n as f64;
            let v: Vec<f64> = (0..=n).map(|k| (k as f64 * h).powi(3)).collect();
            assert!((simpson(&v, h) - 0.25).abs() < 1e-14, "n = {n}");
            let c = cumulative_simpson(&v, h);
            for (k, ck) in c.iter().enumerate() {
                let t = k as f64 * h;
                assert!((ck - t.powi(4) / 4.0).abs() < h.powi(4), "n={n} k={k}");
            }
        }
    }
}
