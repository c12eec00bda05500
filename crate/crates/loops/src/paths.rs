//! Lie-algebra-valued loops and based paths with exact derivatives, the
//! central 2-cocycle ω(ζ, η) = ∫⟨ζ, η'⟩, the 1-form λ measuring its
//! conjugation defect, and the Jacobi boundary term on based paths.

use crate::cmatrix::{pairing, CMat};
use crate::numeric::{pairwise_sum, Real};
use crate::quad::{gauss_legendre, periodic_nodes, spectral_derivative};
use num_complex::Complex;

/// One analytic term of a generator: coefficient matrix times a scalar
/// profile in t.
#[derive(Debug, Clone)]
pub enum Profile {
    Const,
    Linear,
    Cos(u32),
    Sin(u32),
    /// 1 − cos(k t): vanishes at t = 0, generally nonzero at t = 2π only
    /// for fractional k；kept integral here so it is loop-compatible
    OneMinusCos(u32),
}

impl Profile {
    fn eval<R: Real>(&self, t: R) -> (R, R) {
        match self {
            Profile::Const => (R::one(), R::zero()),
            Profile::Linear => (t, R::one()),
            Profile::Cos(m) => {
                let mf = R::from_f(*m as f64);
                ((mf * t).cos(), -mf * (mf * t).sin())
            }
            Profile::Sin(m) => {
                let mf = R::from_f(*m as f64);
                ((mf * t).sin(), mf * (mf * t).cos())
            }
            Profile::OneMinusCos(m) => {
                let mf = R::from_f(*m as f64);
                (R::one() - (mf * t).cos(), mf * (mf * t).sin())
            }
        }
    }

    fn periodic(&self) -> bool {
        !matches!(self, Profile::Linear)
    }
}

/// Analytic su(n)-valued path specification.
#[derive(Debug, Clone)]
pub struct PathSpec<R: Real> {
    pub n: usize,
    pub terms: Vec<(CMat<R>, Profile)>,
}

impl<R: Real> PathSpec<R> {
    pub fn eval(&self, t: R) -> CMat<R> {
        let mut acc = CMat::zeros(self.n);
        for (m, p) in &self.terms {
            let (v, _) = p.eval(t);
            acc = &acc + &m.scale(v);
        }
        acc
    }

    pub fn eval_deriv(&self, t: R) -> CMat<R> {
        let mut acc = CMat::zeros(self.n);
        for (m, p) in &self.terms {
            let (_, dv) = p.eval(t);
            acc = &acc + &m.scale(dv);
        }
        acc
    }

    pub fn is_periodic(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.periodic())
    }
}

/// A sampled algebra path: values and derivatives on a quadrature grid.
#[derive(Debug, Clone)]
pub struct AlgebraPath<R: Real> {
    pub n: usize,
    pub nodes: Vec<R>,
    pub weights: Vec<R>,
    pub values: Vec<CMat<R>>,
    pub derivs: Vec<CMat<R>>,
    pub periodic: bool,
    /// value at t = 2π (meaningful for based paths)
    pub endpoint: CMat<R>,
}

impl<R: Real> AlgebraPath<R> {
    /// Periodic loop on the uniform grid, derivatives analytic.
    pub fn loop_from_spec(spec: &PathSpec<R>, k: usize) -> Self {
        assert!(spec.is_periodic(), "loop specs must be periodic");
        let (nodes, weights) = periodic_nodes::<R>(k);
        let values = nodes.iter().map(|&t| spec.eval(t)).collect();
        let derivs = nodes.iter().map(|&t| spec.eval_deriv(t)).collect();
        let endpoint = spec.eval(R::from_f(2.0 * std::f64::consts::PI));
        AlgebraPath { n: spec.n, nodes, weights, values, derivs, periodic: true, endpoint }
    }

    /// Periodic loop from raw samples; derivatives by spectral
    /// differentiation (exact for band-limited data).
    pub fn loop_from_samples(n: usize, samples: Vec<CMat<R>>) -> Self {
        let k = samples.len();
        let (nodes, weights) = periodic_nodes::<R>(k);
        let derivs = spectral_derivative::<R, CMat<R>, _, _>(
            &samples,
            |acc, v, s| *acc = &*acc + &v.scale(s),
            || CMat::zeros(n),
        );
        let endpoint = samples[0].clone();
        AlgebraPath { n, nodes, weights, values: samples, derivs, periodic: true, endpoint }
    }

    /// Based path (value 0 at t = 0) on Gauss–Legendre nodes over [0, 2π].
    pub fn based_from_spec(spec: &PathSpec<R>, k: usize) -> Self {
        let start = spec.eval(R::zero());
        assert!(
            start.frobenius_norm() < R::from_f(1e-9),
            "based paths must vanish at t = 0"
        );
        let two_pi = R::from_f(2.0 * std::f64::consts::PI);
        let (nodes, weights) = gauss_legendre::<R>(k, R::zero(), two_pi);
        let values = nodes.iter().map(|&t| spec.eval(t)).collect();
        let derivs = nodes.iter().map(|&t| spec.eval_deriv(t)).collect();
        let endpoint = spec.eval(two_pi);
        AlgebraPath { n: spec.n, nodes, weights, values, derivs, periodic: false, endpoint }
    }

    /// pointwise commutator path [ζ, η]
    pub fn bracket(&self, other: &AlgebraPath<R>) -> AlgebraPath<R> {
        assert_eq!(self.nodes.len(), other.nodes.len(), "sample counts must match");
        let values: Vec<CMat<R>> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.commutator(b))
            .collect();
        let derivs: Vec<CMat<R>> = (0..self.values.len())
            .map(|i| {
                &self.derivs[i].commutator(&other.values[i])
                    + &self.values[i].commutator(&other.derivs[i])
            })
            .collect();
        AlgebraPath {
            n: self.n,
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            values,
            derivs,
            periodic: self.periodic && other.periodic,
            endpoint: self.endpoint.commutator(&other.endpoint),
        }
    }

    pub fn scale(&self, s: R) -> AlgebraPath<R> {
        AlgebraPath {
            n: self.n,
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            values: self.values.iter().map(|v| v.scale(s)).collect(),
            derivs: self.derivs.iter().map(|v| v.scale(s)).collect(),
            periodic: self.periodic,
            endpoint: self.endpoint.scale(s),
        }
    }

    /// worst anti-Hermitian defect across samples
    pub fn skew_defect(&self) -> R {
        self.values
            .iter()
            .map(|v| v.skew_defect())
            .fold(R::zero(), |a, b| a.max(b))
    }
}

/// ω(ζ, η) = ∫₀^{2π} ⟨ζ(t), η'(t)⟩ dt.
pub fn lie_cocycle_omega<R: Real>(zeta: &AlgebraPath<R>, eta: &AlgebraPath<R>) -> R {
    assert_eq!(zeta.nodes.len(), eta.nodes.len(), "sample counts must match");
    let terms: Vec<R> = (0..zeta.nodes.len())
        .map(|i| zeta.weights[i] * pairing(&zeta.values[i], &eta.derivs[i]))
        .collect();
    pairwise_sum(&terms)
}

/// A group-valued path g with its left logarithmic derivative g⁻¹g'.
#[derive(Debug, Clone)]
pub struct GroupPath<R: Real> {
    pub n: usize,
    pub nodes: Vec<R>,
    pub weights: Vec<R>,
    pub values: Vec<CMat<R>>,
    pub log_deriv: Vec<CMat<R>>,
}

impl<R: Real> GroupPath<R> {
    /// g(t) = exp(X(t)) on the uniform periodic grid.
    pub fn from_spec(spec: &PathSpec<R>, k: usize) -> Self {
        let (nodes, weights) = periodic_nodes::<R>(k);
        let mut values = Vec::with_capacity(k);
        let mut log_deriv = Vec::with_capacity(k);
        for &t in &nodes {
            let x = spec.eval(t);
            let dx = spec.eval_deriv(t);
            values.push(x.exp());
            log_deriv.push(CMat::dexp_left(&x, &dx));
        }
        GroupPath { n: spec.n, nodes, weights, values, log_deriv }
    }

    pub fn unitarity_defect(&self) -> R {
        self.values
            .iter()
            .map(|v| v.unitarity_defect())
            .fold(R::zero(), |a, b| a.max(b))
    }
}

/// The pointwise conjugation action g.ζ = g ζ g⁻¹, with exact derivative
/// (gζg⁻¹)' = g(ζ' + [g⁻¹g', ζ])g⁻¹.
pub fn transport<R: Real>(g: &GroupPath<R>, zeta: &AlgebraPath<R>) -> AlgebraPath<R> {
    assert_eq!(g.nodes.len(), zeta.nodes.len(), "sample counts must match");
    let mut values = Vec::with_capacity(zeta.values.len());
    let mut derivs = Vec::with_capacity(zeta.values.len());
    for i in 0..zeta.values.len() {
        let gi = &g.values[i];
        let gdag = gi.dagger();
        values.push(&(gi * &zeta.values[i]) * &gdag);
        let inner = &zeta.derivs[i] + &g.log_deriv[i].commutator(&zeta.values[i]);
        derivs.push(&(gi * &inner) * &gdag);
    }
    AlgebraPath {
        n: zeta.n,
        nodes: zeta.nodes.clone(),
        weights: zeta.weights.clone(),
        values,
        derivs,
        periodic: zeta.periodic,
        endpoint: zeta.endpoint.clone(),
    }
}

/// λ(g)(ζ) = ∫⟨g⁻¹g', ζ⟩.
pub fn lambda<R: Real>(g: &GroupPath<R>, zeta: &AlgebraPath<R>) -> R {
    assert_eq!(g.nodes.len(), zeta.nodes.len(), "sample counts must match");
    let terms: Vec<R> = (0..zeta.nodes.len())
        .map(|i| zeta.weights[i] * pairing(&g.log_deriv[i], &zeta.values[i]))
        .collect();
    pairwise_sum(&terms)
}

/// Residual of the conjugation-defect identity: with the conjugation
/// action and the invariant form ⟨X, Y⟩ = −tr XY, the change of ω is
/// measured by λ on the commutator,
/// ω(g.ζ, g.η) − ω(ζ, η) = λ(g)([η, ζ]).
pub fn lambda_check<R: Real>(
    g: &GroupPath<R>,
    zeta: &AlgebraPath<R>,
    eta: &AlgebraPath<R>,
) -> R {
    let gz = transport(g, zeta);
    let ge = transport(g, eta);
    let lhs = lie_cocycle_omega(&gz, &ge) - lie_cocycle_omega(zeta, eta);
    let rhs = lambda(g, &eta.bracket(zeta));
    (lhs - rhs).abs()
}

/// Coefficient of the boundary term for the Jacobi defect of ω on based
/// paths, frozen after a one-time least-squares calibration (see the
/// calibration test): the defect equals exactly ⟨ζ(2π), [η(2π), ξ(2π)]⟩.
pub const JACOBI_BOUNDARY_COEFF: f64 = 1.0;

/// Jacobi defect of ω_c on based paths and the boundary term that must
/// account for it: returns (defect, boundary_term, |defect − boundary|).
pub fn jacobi_defect<R: Real>(
    zeta: &AlgebraPath<R>,
    eta: &AlgebraPath<R>,
    xi: &AlgebraPath<R>,
    c: R,
) -> (R, R, R) {
    let defect = c
        * (lie_cocycle_omega(&zeta.bracket(eta), xi)
            + lie_cocycle_omega(&eta.bracket(xi), zeta)
            + lie_cocycle_omega(&xi.bracket(zeta), eta));
    let boundary = c
        * R::from_f(JACOBI_BOUNDARY_COEFF)
        * pairing(&zeta.endpoint, &eta.endpoint.commutator(&xi.endpoint));
    let residual = (defect - boundary).abs();
    (defect, boundary, residual)
}

/// One-parameter least-squares fit of the boundary coefficient over a set
/// of instances: Σ defect·raw / Σ raw², where raw is the uncalibrated
/// boundary pairing.
pub fn calibrate_jacobi_coeff<R: Real>(
    instances: &[(AlgebraPath<R>, AlgebraPath<R>, AlgebraPath<R>)],
) -> R {
    let mut num = R::zero();
    let mut den = R::zero();
    for (zeta, eta, xi) in instances {
        let defect = lie_cocycle_omega(&zeta.bracket(eta), xi)
            + lie_cocycle_omega(&eta.bracket(xi), zeta)
            + lie_cocycle_omega(&xi.bracket(zeta), eta);
        let raw = pairing(&zeta.endpoint, &eta.endpoint.commutator(&xi.endpoint));
        num += defect * raw;
        den += raw * raw;
    }
    num / den
}

/// Deterministic pseudo-random su(n) path specs for tests and the CLI.
pub struct SpecSampler {
    rng: rand_chacha::ChaCha8Rng,
    pub n: usize,
}

impl SpecSampler {
    pub fn new(n: usize, seed: u64) -> Self {
        use rand::SeedableRng;
        SpecSampler { rng: rand_chacha::ChaCha8Rng::seed_from_u64(seed), n }
    }

    fn su_matrix<R: Real>(&mut self, scale: f64) -> CMat<R> {
        use rand::Rng;
        let count = self.n * (self.n + 1) / 2;
        let entries: Vec<(f64, f64)> = (0..count)
            .map(|_| {
                (
                    self.rng.gen_range(-scale..scale),
                    self.rng.gen_range(-scale..scale),
                )
            })
            .collect();
        crate::cmatrix::su_element_from(self.n, &entries)
    }

    /// trig-polynomial loop spec with harmonics up to `max_harmonic`
    pub fn loop_spec<R: Real>(&mut self, max_harmonic: u32, scale: f64) -> PathSpec<R> {
        let mut terms = vec![(self.su_matrix::<R>(scale), Profile::Const)];
        for m in 1..=max_harmonic {
            terms.push((self.su_matrix::<R>(scale), Profile::Cos(m)));
            terms.push((self.su_matrix::<R>(scale), Profile::Sin(m)));
        }
        PathSpec { n: self.n, terms }
    }

    /// based path spec (vanishing at t = 0) with a linear drift
    pub fn based_spec<R: Real>(&mut self, max_harmonic: u32, scale: f64) -> PathSpec<R> {
        let mut terms = vec![(self.su_matrix::<R>(scale), Profile::Linear)];
        for m in 1..=max_harmonic {
            terms.push((self.su_matrix::<R>(scale), Profile::Sin(m)));
            terms.push((self.su_matrix::<R>(scale), Profile::OneMinusCos(m)));
        }
        PathSpec { n: self.n, terms }
    }
}

/// Determinant of a small complex matrix by Gaussian elimination.
pub fn determinant<R: Real>(m: &CMat<R>) -> Complex<R> {
    let n = m.n;
    let mut a = m.clone();
    let mut det = Complex::new(R::one(), R::zero());
    for k in 0..n {
        // partial pivot
        let mut piv = k;
        for i in (k + 1)..n {
            if a.get(i, k).norm() > a.get(piv, k).norm() {
                piv = i;
            }
        }
        if a.get(piv, k).norm() == R::zero() {
            return Complex::new(R::zero(), R::zero());
        }
        if piv != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(piv, j)];
                a[(piv, j)] = tmp;
            }
            det = -det;
        }
        det = det * a.get(k, k);
        for i in (k + 1)..n {
            let f = a.get(i, k) / a.get(k, k);
            for j in k..n {
                a[(i, j)] = a[(i, j)] - f * a.get(k, j);
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_antisymmetric_on_loops() {
        let mut s = SpecSampler::new(2, 7);
        let z = AlgebraPath::<f64>::loop_from_spec(&s.loop_spec(3, 0.8), 64);
        let e = AlgebraPath::<f64>::loop_from_spec(&s.loop_spec(3, 0.8), 64);
        assert!(lie_cocycle_omega(&z, &z).abs() < 1e-12);
        assert!((lie_cocycle_omega(&z, &e) + lie_cocycle_omega(&e, &z)).abs() < 1e-11);
    }

    #[test]
    fn omega_closed_form_sin_cos() {
        // ζ = X sin t, η = Y cos t: ω = ∫⟨X,Y⟩ sin t · (−sin t) = −π⟨X,Y⟩
        let x = crate::cmatrix::su_element_from::<f64>(2, &[(0.4, 0.0), (0.3, -0.2), (-0.4, 0.0)]);
        let y = crate::cmatrix::su_element_from::<f64>(2, &[(-0.1, 0.0), (0.7, 0.5), (0.1, 0.0)]);
        let zs = PathSpec { n: 2, terms: vec![(x.clone(), Profile::Sin(1))] };
        let es = PathSpec { n: 2, terms: vec![(y.clone(), Profile::Cos(1))] };
        let z = AlgebraPath::loop_from_spec(&zs, 64);
        let e = AlgebraPath::loop_from_spec(&es, 64);
        let want = -std::f64::consts::PI * pairing(&x, &y);
        assert!((lie_cocycle_omega(&z, &e) - want).abs() < 1e-11);
    }

    #[test]
    fn omega_constant_eta_vanishes() {
        let mut s = SpecSampler::new(2, 9);
        let z = AlgebraPath::<f64>::loop_from_spec(&s.loop_spec(2, 0.5), 32);
        let c = PathSpec { n: 2, terms: vec![(s.su_matrix::<f64>(0.7), Profile::Const)] };
        let e = AlgebraPath::loop_from_spec(&c, 32);
        assert!(lie_cocycle_omega(&z, &e).abs() < 1e-13);
    }

    #[test]
    fn spectral_samples_match_analytic() {
        let mut s = SpecSampler::new(2, 11);
        let spec = s.loop_spec::<f64>(4, 0.6);
        let exact = AlgebraPath::loop_from_spec(&spec, 64);
        let sampled = AlgebraPath::loop_from_samples(2, exact.values.clone());
        for i in 0..64 {
            assert!((&exact.derivs[i] - &sampled.derivs[i]).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn lambda_identity_trivial_for_identity_path() {
        let mut s = SpecSampler::new(2, 13);
        let z = AlgebraPath::<f64>::loop_from_spec(&s.loop_spec(2, 0.5), 64);
        let e = AlgebraPath::<f64>::loop_from_spec(&s.loop_spec(2, 0.5), 64);
        let id_spec = PathSpec { n: 2, terms: vec![] };
        let g = GroupPath::from_spec(&id_spec, 64);
        assert!(lambda_check(&g, &z, &e) < 1e-13);
    }

    #[test]
    fn lambda_identity_random_data() {
        let mut s = SpecSampler::new(2, 17);
        let gspec = s.loop_spec::<f64>(2, 0.4);
        let g = GroupPath::from_spec(&gspec, 256);
        let z = AlgebraPath::loop_from_spec(&s.loop_spec(3, 0.7), 256);
        let e = AlgebraPath::loop_from_spec(&s.loop_spec(3, 0.7), 256);
        assert!(lambda_check(&g, &z, &e) < 1e-8, "residual {}", lambda_check(&g, &z, &e));
    }

    #[test]
    fn lambda_identity_su3() {
        let mut s = SpecSampler::new(3, 19);
        let g = GroupPath::from_spec(&s.loop_spec::<f64>(2, 0.3), 128);
        let z = AlgebraPath::loop_from_spec(&s.loop_spec(2, 0.5), 128);
        let e = AlgebraPath::loop_from_spec(&s.loop_spec(2, 0.5), 128);
        assert!(lambda_check(&g, &z, &e) < 1e-9);
    }

    #[test]
    fn jacobi_vanishes_on_loops() {
        let mut s = SpecSampler::new(2, 23);
        let z = AlgebraPath::<f64>::loop_from_spec(&s.loop_spec(2, 0.6), 64);
        let e = AlgebraPath::<f64>::loop_from_spec(&s.loop_spec(2, 0.6), 64);
        let x = AlgebraPath::<f64>::loop_from_spec(&s.loop_spec(2, 0.6), 64);
        let defect = lie_cocycle_omega(&z.bracket(&e), &x)
            + lie_cocycle_omega(&e.bracket(&x), &z)
            + lie_cocycle_omega(&x.bracket(&z), &e);
        assert!(defect.abs() < 1e-10);
    }

    #[test]
    fn jacobi_boundary_term_linear_paths() {
        // ζ, η, ξ = tX, tY, tZ: defect = 8π³⟨X,[Y,Z]⟩ = boundary term
        let x = crate::cmatrix::su_element_from::<f64>(2, &[(0.5, 0.0), (0.0, 0.0), (-0.5, 0.0)]);
        let y = crate::cmatrix::su_element_from::<f64>(2, &[(0.0, 0.0), (0.5, 0.0), (0.0, 0.0)]);
        let zm = crate::cmatrix::su_element_from::<f64>(2, &[(0.0, 0.0), (0.0, 0.5), (0.0, 0.0)]);
        let mk = |m: &CMat<f64>| {
            AlgebraPath::based_from_spec(
                &PathSpec { n: 2, terms: vec![(m.clone(), Profile::Linear)] },
                48,
            )
        };
        let (zeta, eta, xi) = (mk(&x), mk(&y), mk(&zm));
        let (defect, boundary, residual) = jacobi_defect(&zeta, &eta, &xi, 1.0);
        let two_pi = 2.0 * std::f64::consts::PI;
        let want = two_pi.powi(3) * pairing(&x, &y.commutator(&zm));
        assert!((defect - want).abs() < 1e-8, "defect {defect} want {want}");
        assert!((boundary - want).abs() < 1e-10);
        assert!(residual < 1e-8);
    }

    #[test]
    fn jacobi_scaling_linearity() {
        let mut s = SpecSampler::new(2, 29);
        let zeta = AlgebraPath::<f64>::based_from_spec(&s.based_spec(2, 0.4), 64);
        let eta = AlgebraPath::<f64>::based_from_spec(&s.based_spec(2, 0.4), 64);
        let xi = AlgebraPath::<f64>::based_from_spec(&s.based_spec(2, 0.4), 64);
        let (d1, b1, _) = jacobi_defect(&zeta, &eta, &xi, 1.0);
        let (d2, b2, _) = jacobi_defect(&zeta.scale(2.0), &eta, &xi, 1.0);
        assert!((d2 - 2.0 * d1).abs() < 1e-9);
        assert!((b2 - 2.0 * b1).abs() < 1e-9);
    }

    #[test]
    fn calibrated_coefficient_is_one() {
        let mut s = SpecSampler::new(2, 31);
        let mut instances = Vec::new();
        for _ in 0..8 {
            instances.push((
                AlgebraPath::<f64>::based_from_spec(&s.based_spec(3, 0.5), 64),
                AlgebraPath::<f64>::based_from_spec(&s.based_spec(3, 0.5), 64),
                AlgebraPath::<f64>::based_from_spec(&s.based_spec(3, 0.5), 64),
            ));
        }
        let fitted = calibrate_jacobi_coeff(&instances);
        assert!(
            (fitted - JACOBI_BOUNDARY_COEFF).abs() < 1e-9,
            "fit {fitted} must match the frozen coefficient"
        );
    }

    #[test]
    fn determinant_of_su_is_one() {
        let mut s = SpecSampler::new(3, 37);
        let g = s.su_matrix::<f64>(0.8).exp();
        let d = determinant(&g);
        assert!((d.re - 1.0).abs() < 1e-12 && d.im.abs() < 1e-12);
    }
}
