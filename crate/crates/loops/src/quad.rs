//! Quadrature rules: composite trapezoid on periodic grids (spectrally
//! accurate there) and Gauss–Legendre nodes in non-periodic directions,
//! plus spectral differentiation on uniform periodic samples.

use crate::numeric::{pairwise_sum, Real};

/// Gauss–Legendre nodes and weights on [a, b].
pub fn gauss_legendre<R: Real>(n: usize, a: R, b: R) -> (Vec<R>, Vec<R>) {
    assert!(n >= 1);
    let mut nodes = vec![R::zero(); n];
    let mut weights = vec![R::zero(); n];
    let nf = R::from_f(n as f64);
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n
        let theta = R::from_f(std::f64::consts::PI) * (R::from_f(i as f64) + R::from_f(0.75))
            / (nf + R::from_f(0.5));
        let mut x = theta.cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x = x - dx;
            if dx.abs() < R::epsilon() * R::from_f(4.0) {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[i] = x;
        weights[i] = R::from_f(2.0) / ((R::one() - x * x) * dp * dp);
    }
    nodes.reverse();
    weights.reverse();
    // map [−1, 1] → [a, b]
    let half = (b - a) * R::from_f(0.5);
    let mid = (b + a) * R::from_f(0.5);
    for i in 0..n {
        nodes[i] = mid + half * nodes[i];
        weights[i] = weights[i] * half;
    }
    (nodes, weights)
}

fn legendre_and_derivative<R: Real>(n: usize, x: R) -> (R, R) {
    let mut p0 = R::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = R::from_f(k as f64);
        let p2 = ((R::from_f(2.0) * kf - R::one()) * x * p1 - (kf - R::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (R::one(), R::zero());
    }
    let dp = R::from_f(n as f64) * (x * p1 - p0) / (x * x - R::one());
    (p1, dp)
}

/// Uniform periodic nodes t_k = 2πk/K with equal trapezoid weights.
pub fn periodic_nodes<R: Real>(k: usize) -> (Vec<R>, Vec<R>) {
    let two_pi = R::from_f(2.0 * std::f64::consts::PI);
    let h = two_pi / R::from_f(k as f64);
    let nodes = (0..k).map(|j| h * R::from_f(j as f64)).collect();
    let weights = vec![h; k];
    (nodes, weights)
}

/// Spectral differentiation matrix row action on periodic samples (K even):
/// f'(t_j) ≈ Σ_k d_{j−k} f(t_k) with d_m = (−1)^m / (2 tan(m h / 2)).
pub fn spectral_derivative<R: Real, T, F, G>(samples: &[T], add_scaled: F, zero: G) -> Vec<T>
where
    F: Fn(&mut T, &T, R),
    G: Fn() -> T,
{
    let k = samples.len();
    assert!(k % 2 == 0, "spectral differentiation needs an even sample count");
    let h = R::from_f(2.0 * std::f64::consts::PI) / R::from_f(k as f64);
    // f'(t_j) = Σ_{m=1}^{K/2−1} d_m (f(t_{j−m}) − f(t_{j+m})),
    // d_m = (−1)^m / (2 tan(m h / 2)); the m = K/2 kernel vanishes
    let mut kernel = vec![R::zero(); k / 2];
    for (m, item) in kernel.iter_mut().enumerate().skip(1) {
        let sign = if m % 2 == 0 { R::one() } else { -R::one() };
        let half = R::from_f(0.5);
        *item = sign * half / (R::from_f(m as f64) * h * half).tan();
    }
    (0..k)
        .map(|j| {
            let mut acc = zero();
            for (m, ker) in kernel.iter().enumerate().skip(1) {
                let prev = &samples[(j + k - m) % k];
                let next = &samples[(j + m) % k];
                add_scaled(&mut acc, prev, *ker);
                add_scaled(&mut acc, next, -*ker);
            }
            acc
        })
        .collect()
}

/// Weighted dot of sample products, deterministic order.
pub fn integrate<R: Real>(weights: &[R], values: &[R]) -> R {
    let terms: Vec<R> = weights.iter().zip(values).map(|(&w, &v)| w * v).collect();
    pairwise_sum(&terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre::<f64>(8, 0.0, 1.0);
        // ∫₀¹ x⁷ dx = 1/8 must be exact with 8 nodes
        let vals: Vec<f64> = x.iter().map(|&t| t.powi(7)).collect();
        assert!((integrate(&w, &vals) - 0.125).abs() < 1e-14);
        // total weight = length
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_is_spectral_on_trig() {
        let (t, w) = periodic_nodes::<f64>(16);
        let vals: Vec<f64> = t.iter().map(|&x| (3.0 * x).cos().powi(2)).collect();
        // ∫₀^{2π} cos²(3t) dt = π
        assert!((integrate(&w, &vals) - std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn spectral_derivative_exact_on_band_limited() {
        let k = 32;
        let (t, _) = periodic_nodes::<f64>(k);
        let vals: Vec<f64> = t.iter().map(|&x| (5.0 * x).sin()).collect();
        let d = spectral_derivative::<f64, f64, _, _>(
            &vals,
            |acc, v, s| *acc += v * s,
            || 0.0,
        );
        for (j, &x) in t.iter().enumerate() {
            assert!((d[j] - 5.0 * (5.0 * x).cos()).abs() < 1e-11, "at {x}");
        }
    }
}
