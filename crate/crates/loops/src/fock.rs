//! Hilbert–Schmidt norms of the off-diagonal blocks of multiplication
//! operators on the circle, in the Fourier mode basis, for loops twisted by
//! a central element: the truncated operator norm against the mode sum
//! Σ |ν| ‖a_ν‖².

use crate::cmatrix::CMat;
use crate::numeric::Real;
use crate::quad::periodic_nodes;
use num_complex::Complex;

/// A loop sampled on the uniform grid with the boundary twist
/// f(2π) = e^{2πi·twist}·f(0); twist is a rational phase in [0, 1).
pub struct TwistedLoop<R: Real> {
    pub n: usize,
    pub samples: Vec<CMat<R>>,
    pub twist_num: i64,
    pub twist_den: i64,
}

impl<R: Real> TwistedLoop<R> {
    pub fn twist<S: Real>(&self) -> S {
        S::from_f(self.twist_num as f64 / self.twist_den as f64)
    }

    /// worst unitarity defect across samples
    pub fn unitarity_defect(&self) -> R {
        self.samples
            .iter()
            .map(|v| v.unitarity_defect())
            .fold(R::zero(), |a, b| a.max(b))
    }

    /// twisted Fourier coefficients a_ν at frequencies ν = j + twist for
    /// j ∈ [−K/2, K/2): detwist pointwise, then a direct transform
    pub fn coefficients(&self) -> Vec<(R, CMat<R>)> {
        let k = self.samples.len();
        let (nodes, _) = periodic_nodes::<R>(k);
        let twist = self.twist::<R>();
        let detwisted: Vec<CMat<R>> = self
            .samples
            .iter()
            .zip(&nodes)
            .map(|(s, &t)| {
                let phase = Complex::new(R::zero(), -twist * t).exp();
                s.scale_c(phase)
            })
            .collect();
        let half = (k / 2) as i64;
        let mut out = Vec::with_capacity(k);
        for j in -half..half {
            let mut acc = CMat::zeros(self.n);
            for (s, &t) in detwisted.iter().zip(&nodes) {
                let phase = Complex::new(R::zero(), -R::from_f(j as f64) * t).exp();
                acc = &acc + &s.scale_c(phase);
            }
            acc = acc.scale(R::one() / R::from_f(k as f64));
            out.push((R::from_f(j as f64) + twist, acc));
        }
        // flush transform roundoff to exact zeros so that band-limited
        // inputs produce exactly banded coefficient lists
        let peak = out
            .iter()
            .map(|(_, a)| a.frobenius_norm())
            .fold(R::zero(), |a, b| a.max(b));
        let floor = R::from_f(1e-12) * (peak + R::one());
        for (_, a) in out.iter_mut() {
            if a.frobenius_norm() < floor {
                *a = CMat::zeros(self.n);
            }
        }
        out
    }
}

/// Mode-sum Σ |ν| ‖a_ν‖² over the resolved frequencies.
pub fn mode_sum<R: Real>(coeffs: &[(R, CMat<R>)]) -> R {
    coeffs
        .iter()
        .map(|(nu, a)| nu.abs() * a.frobenius_norm().powi(2))
        .fold(R::zero(), |x, y| x + y)
}

/// Squared Hilbert–Schmidt norm of the off-diagonal blocks of the
/// multiplication operator truncated to modes in [−M, M): the incoming
/// mode lattice sits at Z, the outgoing one at Z + twist, and the matrix
/// element between outgoing l + twist and incoming k is a_{l − k + twist}.
pub fn offdiag_norm_sq<R: Real>(coeffs: &[(R, CMat<R>)], twist: R, m: usize) -> R {
    let mi = m as i64;
    let mut acc = R::zero();
    for l in -mi..mi {
        let out_mode = R::from_f(l as f64) + twist;
        for k in -mi..mi {
            let in_mode = R::from_f(k as f64);
            let negative_to_nonneg = out_mode < R::zero() && in_mode >= R::zero();
            let nonneg_to_negative = out_mode >= R::zero() && in_mode < R::zero();
            if !(negative_to_nonneg || nonneg_to_negative) {
                continue;
            }
            let nu = out_mode - in_mode;
            // locate the coefficient at this frequency
            if let Some((_, a)) = coeffs
                .iter()
                .find(|(f, _)| (*f - nu).abs() < R::from_f(1e-9))
            {
                acc += a.frobenius_norm().powi(2);
            }
        }
    }
    acc
}

/// (norm², mode_sum) at cutoff M; their ratio stabilizes as M grows.
pub fn hs_offdiag_norm<R: Real>(
    f: &TwistedLoop<R>,
    cutoff: usize,
) -> Result<(R, R), String> {
    let k = f.samples.len();
    if cutoff > k / 2 {
        return Err(format!("cutoff {cutoff} too large for {k} samples"));
    }
    let coeffs = f.coefficients();
    let norm2 = offdiag_norm_sq(&coeffs, f.twist::<R>(), cutoff);
    Ok((norm2, mode_sum(&coeffs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::SpecSampler;

    #[test]
    fn constant_loop_gives_zero() {
        let id = CMat::<f64>::identity(2);
        let f = TwistedLoop { n: 2, samples: vec![id; 64], twist_num: 0, twist_den: 1 };
        let (norm2, msum) = hs_offdiag_norm(&f, 16).unwrap();
        assert_eq!(norm2, 0.0);
        assert!(msum < 1e-24);
    }

    #[test]
    fn single_mode_matches_one_term_sum() {
        // f(t) = diag(e^{it}, e^{−it}): coefficients at ν = ±1 only, each a
        // rank-one diagonal block; norm² at any cutoff ≥ 1 equals Σ|ν|‖a‖²
        let k = 64;
        let (nodes, _) = periodic_nodes::<f64>(k);
        let samples: Vec<CMat<f64>> = nodes
            .iter()
            .map(|&t| {
                let mut m = CMat::zeros(2);
                m[(0, 0)] = Complex::new(t.cos(), t.sin());
                m[(1, 1)] = Complex::new(t.cos(), -t.sin());
                m
            })
            .collect();
        let f = TwistedLoop { n: 2, samples, twist_num: 0, twist_den: 1 };
        let (norm2, msum) = hs_offdiag_norm(&f, 16).unwrap();
        assert!((msum - 2.0).abs() < 1e-10, "mode sum {msum}");
        assert!((norm2 - msum).abs() < 1e-10);
    }

    #[test]
    fn ratio_stabilizes_for_smooth_loops() {
        let mut s = SpecSampler::new(2, 67);
        let spec = s.loop_spec::<f64>(4, 0.6);
        let (nodes, _) = periodic_nodes::<f64>(256);
        let samples: Vec<CMat<f64>> = nodes.iter().map(|&t| spec.eval(t).exp()).collect();
        let f = TwistedLoop { n: 2, samples, twist_num: 0, twist_den: 1 };
        let (n32, m32) = hs_offdiag_norm(&f, 32).unwrap();
        let (n64, m64) = hs_offdiag_norm(&f, 64).unwrap();
        let r32 = n32 / m32;
        let r64 = n64 / m64;
        assert!((r32 - r64).abs() <= 0.02, "ratios {r32} vs {r64}");
    }

    #[test]
    fn twisted_loop_coefficients_sit_on_shifted_lattice() {
        // f(t) = e^{it/2}·1: a single coefficient at ν = 1/2, which maps
        // in-mode k to out-mode k + 1/2 and so never crosses the
        // polarization: the off-diagonal block vanishes identically
        let k = 64;
        let (nodes, _) = periodic_nodes::<f64>(k);
        let samples: Vec<CMat<f64>> = nodes
            .iter()
            .map(|&t| CMat::identity(2).scale_c(Complex::new((t / 2.0).cos(), (t / 2.0).sin())))
            .collect();
        let f = TwistedLoop { n: 2, samples, twist_num: 1, twist_den: 2 };
        let coeffs = f.coefficients();
        let heavy: Vec<f64> = coeffs
            .iter()
            .filter(|(_, a)| a.frobenius_norm() > 1e-8)
            .map(|(nu, _)| *nu)
            .collect();
        assert_eq!(heavy, vec![0.5]);
        let (norm2, msum) = hs_offdiag_norm(&f, 16).unwrap();
        assert!((msum - 1.0).abs() < 1e-10, "mode sum {msum}");
        assert_eq!(norm2, 0.0);
    }

    #[test]
    fn crossing_twisted_frequency_contributes() {
        // f(t) = e^{3it/2}·1 at twist 1/2: ν = 3/2 sends in-mode −1 to
        // out-mode 1/2, one crossing pair of full weight ‖1‖² = 2
        let k = 64;
        let (nodes, _) = periodic_nodes::<f64>(k);
        let samples: Vec<CMat<f64>> = nodes
            .iter()
            .map(|&t| {
                CMat::identity(2)
                    .scale_c(Complex::new((1.5 * t).cos(), (1.5 * t).sin()))
            })
            .collect();
        let f = TwistedLoop { n: 2, samples, twist_num: 1, twist_den: 2 };
        let (norm2, msum) = hs_offdiag_norm(&f, 16).unwrap();
        assert!((msum - 3.0).abs() < 1e-10, "mode sum {msum}");
        assert!((norm2 - 2.0).abs() < 1e-10, "norm² {norm2}");
    }
}
