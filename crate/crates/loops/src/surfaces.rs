//! Disc and ball maps into SU(n) in exponential form with exact pointwise
//! logarithmic derivatives, the disc 2-cocycle γ, the ball 3-form term C(g)
//! with its winding-number normalization, and the homomorphism identity
//! relating them modulo Z.

use crate::cmatrix::{pairing, CMat};
use crate::numeric::{pairwise_sum, Real};
use crate::quad::{gauss_legendre, periodic_nodes};

/// length² of the longest root in the ⟨X,Y⟩ = −tr XY normalization
pub const LONGEST_ROOT_SQ: f64 = 2.0;

/// γ prefactor θ²/(16π²)
pub fn gamma_norm<R: Real>() -> R {
    R::from_f(LONGEST_ROOT_SQ / (16.0 * std::f64::consts::PI * std::f64::consts::PI))
}

/// C(g) prefactor θ²/(48π²), with the orientation of the (ρ, θ, φ) box
/// fixed so that the standard degree-one ball map has winding +1 and
/// C(g₁g₂) = C(g₁) + C(g₂) + γ(g₁,g₂) mod Z (see the calibration tests).
pub fn wzw_norm<R: Real>() -> R {
    -R::from_f(LONGEST_ROOT_SQ / (48.0 * std::f64::consts::PI * std::f64::consts::PI))
}

/// Monomial term of a disc generator in Cartesian coordinates
/// x = r cos φ, y = r sin φ, always multiplied by the boundary cutoff
/// (1 − r²)² so the map is the identity on ∂D with flat radial derivative.
#[derive(Debug, Clone)]
pub struct DiscGenerator<R: Real> {
    pub n: usize,
    /// (coefficient, a, b) for the monomial xᵃ yᵇ
    pub terms: Vec<(CMat<R>, u32, u32)>,
}

impl<R: Real> DiscGenerator<R> {
    /// X, ∂X/∂r, ∂X/∂φ at (r, φ)
    pub fn eval(&self, r: R, phi: R) -> (CMat<R>, CMat<R>, CMat<R>) {
        let (c, s) = (phi.cos(), phi.sin());
        let cut = (R::one() - r * r).powi(2);
        let dcut = -R::from_f(4.0) * r * (R::one() - r * r);
        let mut x = CMat::zeros(self.n);
        let mut dr = CMat::zeros(self.n);
        let mut dphi = CMat::zeros(self.n);
        for (m, a, b) in &self.terms {
            let (a, b) = (*a, *b);
            let mono = r.powi((a + b) as i32) * c.powi(a as i32) * s.powi(b as i32);
            let dmono_dr = if a + b == 0 {
                R::zero()
            } else {
                R::from_f((a + b) as f64) * r.powi((a + b) as i32 - 1) * c.powi(a as i32) * s.powi(b as i32)
            };
            // ∂φ(xᵃyᵇ) = −a xᵃ⁻¹ yᵇ⁺¹ + b xᵃ⁺¹ yᵇ⁻¹, expressed in (r, φ)
            let mut dmono_dphi = R::zero();
            if a > 0 {
                dmono_dphi -= R::from_f(a as f64)
                    * r.powi((a + b) as i32)
                    * c.powi(a as i32 - 1)
                    * s.powi(b as i32 + 1);
            }
            if b > 0 {
                dmono_dphi += R::from_f(b as f64)
                    * r.powi((a + b) as i32)
                    * c.powi(a as i32 + 1)
                    * s.powi(b as i32 - 1);
            }
            x = &x + &m.scale(cut * mono);
            dr = &dr + &m.scale(dcut * mono + cut * dmono_dr);
            dphi = &dphi + &m.scale(cut * dmono_dphi);
        }
        (x, dr, dphi)
    }
}

/// A sampled boundary-trivial disc map with left logarithmic derivatives.
#[derive(Debug, Clone)]
pub struct DiscMap<R: Real> {
    pub n: usize,
    pub r_nodes: Vec<R>,
    pub r_weights: Vec<R>,
    pub phi_nodes: Vec<R>,
    pub phi_weights: Vec<R>,
    pub values: Vec<CMat<R>>,
    pub a_r: Vec<CMat<R>>,
    pub a_phi: Vec<CMat<R>>,
}

impl<R: Real> DiscMap<R> {
    pub fn from_generator(gen: &DiscGenerator<R>, nr: usize, nphi: usize) -> Self {
        let (r_nodes, r_weights) = gauss_legendre::<R>(nr, R::zero(), R::one());
        let (phi_nodes, phi_weights) = periodic_nodes::<R>(nphi);
        let mut values = Vec::with_capacity(nr * nphi);
        let mut a_r = Vec::with_capacity(nr * nphi);
        let mut a_phi = Vec::with_capacity(nr * nphi);
        for &r in &r_nodes {
            for &phi in &phi_nodes {
                let (x, dxr, dxphi) = gen.eval(r, phi);
                values.push(x.exp());
                a_r.push(CMat::dexp_left(&x, &dxr));
                a_phi.push(CMat::dexp_left(&x, &dxphi));
            }
        }
        DiscMap { n: gen.n, r_nodes, r_weights, phi_nodes, phi_weights, values, a_r, a_phi }
    }

    fn same_grid(&self, other: &DiscMap<R>) -> bool {
        self.r_nodes.len() == other.r_nodes.len()
            && self.phi_nodes.len() == other.phi_nodes.len()
    }

    /// pointwise product: A(fg) = g⁻¹ A(f) g + A(g)
    pub fn product(&self, other: &DiscMap<R>) -> DiscMap<R> {
        assert!(self.same_grid(other), "grid mismatch");
        let mut values = Vec::with_capacity(self.values.len());
        let mut a_r = Vec::with_capacity(self.values.len());
        let mut a_phi = Vec::with_capacity(self.values.len());
        for i in 0..self.values.len() {
            let g = &other.values[i];
            let gd = g.dagger();
            values.push(&self.values[i] * g);
            a_r.push(&(&(&gd * &self.a_r[i]) * g) + &other.a_r[i]);
            a_phi.push(&(&(&gd * &self.a_phi[i]) * g) + &other.a_phi[i]);
        }
        DiscMap {
            n: self.n,
            r_nodes: self.r_nodes.clone(),
            r_weights: self.r_weights.clone(),
            phi_nodes: self.phi_nodes.clone(),
            phi_weights: self.phi_weights.clone(),
            values,
            a_r,
            a_phi,
        }
    }

    /// pointwise inverse: A(f⁻¹) = −f A(f) f⁻¹
    pub fn inverse(&self) -> DiscMap<R> {
        let mut values = Vec::with_capacity(self.values.len());
        let mut a_r = Vec::with_capacity(self.values.len());
        let mut a_phi = Vec::with_capacity(self.values.len());
        for i in 0..self.values.len() {
            let f = &self.values[i];
            let fd = f.dagger();
            values.push(fd.clone());
            a_r.push(-&(&(f * &self.a_r[i]) * &fd));
            a_phi.push(-&(&(f * &self.a_phi[i]) * &fd));
        }
        DiscMap {
            n: self.n,
            r_nodes: self.r_nodes.clone(),
            r_weights: self.r_weights.clone(),
            phi_nodes: self.phi_nodes.clone(),
            phi_weights: self.phi_weights.clone(),
            values,
            a_r,
            a_phi,
        }
    }

    pub fn unitarity_defect(&self) -> R {
        self.values
            .iter()
            .map(|v| v.unitarity_defect())
            .fold(R::zero(), |a, b| a.max(b))
    }
}

/// γ(f₁, f₂) = θ²/(16π²) ∫_D ⟨f₁⁻¹∂_a f₁, ∂_b f₂ f₂⁻¹⟩ ε^{ab}.
pub fn gamma_disc<R: Real>(f1: &DiscMap<R>, f2: &DiscMap<R>) -> R {
    assert!(f1.same_grid(f2), "grid mismatch");
    let nphi = f1.phi_nodes.len();
    let mut terms = Vec::with_capacity(f1.values.len());
    for (ri, rw) in f1.r_weights.iter().enumerate() {
        for (pi, pw) in f1.phi_weights.iter().enumerate() {
            let idx = ri * nphi + pi;
            let g = &f2.values[idx];
            let gd = g.dagger();
            // right derivatives of f₂: B_a = g A_a g⁻¹
            let b_r = &(g * &f2.a_r[idx]) * &gd;
            let b_phi = &(g * &f2.a_phi[idx]) * &gd;
            let integrand = pairing(&f1.a_r[idx], &b_phi) - pairing(&f1.a_phi[idx], &b_r);
            terms.push(*rw * *pw * integrand);
        }
    }
    gamma_norm::<R>() * pairwise_sum(&terms)
}

/// Residual of the cocycle identity
/// γ(f₁,f₂) + γ(f₁f₂,f₃) − γ(f₂,f₃) − γ(f₁,f₂f₃).
pub fn gamma_cocycle_residual<R: Real>(
    f1: &DiscMap<R>,
    f2: &DiscMap<R>,
    f3: &DiscMap<R>,
) -> R {
    let lhs = gamma_disc(f1, f2) + gamma_disc(&f1.product(f2), f3);
    let rhs = gamma_disc(f2, f3) + gamma_disc(f1, &f2.product(f3));
    (lhs - rhs).abs()
}

/// Ball generator in Cartesian coordinates on the unit ball of R³.
#[derive(Debug, Clone)]
pub struct BallGenerator<R: Real> {
    pub n: usize,
    /// (coefficient, a, b, c) for xᵃ yᵇ zᶜ
    pub terms: Vec<(CMat<R>, u32, u32, u32)>,
}

impl<R: Real> BallGenerator<R> {
    /// X and its partials w.r.t. (ρ, θ, φ) at a spherical node
    pub fn eval(&self, rho: R, theta: R, phi: R) -> (CMat<R>, CMat<R>, CMat<R>, CMat<R>) {
        let (st, ct) = (theta.sin(), theta.cos());
        let (sp, cp) = (phi.sin(), phi.cos());
        let x = rho * st * cp;
        let y = rho * st * sp;
        let z = rho * ct;
        // partials of (x, y, z) w.r.t. (ρ, θ, φ)
        let dx = [st * cp, rho * ct * cp, -rho * st * sp];
        let dy = [st * sp, rho * ct * sp, rho * st * cp];
        let dz = [ct, -rho * st, R::zero()];
        let mut val = CMat::zeros(self.n);
        let mut d = [CMat::zeros(self.n), CMat::zeros(self.n), CMat::zeros(self.n)];
        for (m, a, b, c) in &self.terms {
            let (a, b, c) = (*a as i32, *b as i32, *c as i32);
            let mono = x.powi(a) * y.powi(b) * z.powi(c);
            val = &val + &m.scale(mono);
            let gx = if a == 0 { R::zero() } else { R::from_f(a as f64) * x.powi(a - 1) * y.powi(b) * z.powi(c) };
            let gy = if b == 0 { R::zero() } else { R::from_f(b as f64) * x.powi(a) * y.powi(b - 1) * z.powi(c) };
            let gz = if c == 0 { R::zero() } else { R::from_f(c as f64) * x.powi(a) * y.powi(b) * z.powi(c - 1) };
            for k in 0..3 {
                let chain = gx * dx[k] + gy * dy[k] + gz * dz[k];
                d[k] = &d[k] + &m.scale(chain);
            }
        }
        let [d0, d1, d2] = d;
        (val, d0, d1, d2)
    }
}

/// A sampled ball map with left logarithmic derivatives along (u₁, u₂, u₃).
pub struct BallMap<R: Real> {
    pub n: usize,
    pub w1: Vec<R>,
    pub w2: Vec<R>,
    pub w3: Vec<R>,
    pub values: Vec<CMat<R>>,
    pub a1: Vec<CMat<R>>,
    pub a2: Vec<CMat<R>>,
    pub a3: Vec<CMat<R>>,
    /// true when the boundary value is a single central element, so the map
    /// closes up to a sphere map
    pub closed_boundary: bool,
}

/// Grid resolution for ball integrals.
#[derive(Debug, Clone, Copy)]
pub struct BallGrid {
    pub nr: usize,
    pub ntheta: usize,
    pub nphi: usize,
}

impl Default for BallGrid {
    fn default() -> Self {
        BallGrid { nr: 32, ntheta: 32, nphi: 32 }
    }
}

impl<R: Real> BallMap<R> {
    /// ball map in spherical coordinates from a Cartesian generator
    pub fn from_generator(gen: &BallGenerator<R>, grid: BallGrid, closed: bool) -> Self {
        let (rn, rw) = gauss_legendre::<R>(grid.nr, R::zero(), R::one());
        let (tn, tw) = gauss_legendre::<R>(grid.ntheta, R::zero(), R::from_f(std::f64::consts::PI));
        let (pn, pw) = periodic_nodes::<R>(grid.nphi);
        let mut values = Vec::new();
        let mut a1 = Vec::new();
        let mut a2 = Vec::new();
        let mut a3 = Vec::new();
        for &rho in &rn {
            for &theta in &tn {
                for &phi in &pn {
                    let (x, d1, d2, d3) = gen.eval(rho, theta, phi);
                    values.push(x.exp());
                    a1.push(CMat::dexp_left(&x, &d1));
                    a2.push(CMat::dexp_left(&x, &d2));
                    a3.push(CMat::dexp_left(&x, &d3));
                }
            }
        }
        BallMap { n: gen.n, w1: rw, w2: tw, w3: pw, values, a1, a2, a3, closed_boundary: closed }
    }

    /// radial extension exp(u(s)·X_disc(r, φ)) of a boundary-trivial disc
    /// generator, with the smooth-step profile u(s) = s²(3 − 2s)
    pub fn extend_disc(gen: &DiscGenerator<R>, grid: BallGrid) -> Self {
        let (sn, sw) = gauss_legendre::<R>(grid.nr, R::zero(), R::one());
        let (rn, rw) = gauss_legendre::<R>(grid.ntheta, R::zero(), R::one());
        let (pn, pw) = periodic_nodes::<R>(grid.nphi);
        let mut values = Vec::new();
        let mut a1 = Vec::new();
        let mut a2 = Vec::new();
        let mut a3 = Vec::new();
        for &s in &sn {
            let u = s * s * (R::from_f(3.0) - R::from_f(2.0) * s);
            let du = R::from_f(6.0) * s * (R::one() - s);
            for &r in &rn {
                for &phi in &pn {
                    let (x, dxr, dxphi) = gen.eval(r, phi);
                    let xs = x.scale(u);
                    values.push(xs.exp());
                    a1.push(CMat::dexp_left(&xs, &x.scale(du)));
                    a2.push(CMat::dexp_left(&xs, &dxr.scale(u)));
                    a3.push(CMat::dexp_left(&xs, &dxphi.scale(u)));
                }
            }
        }
        BallMap { n: gen.n, w1: sw, w2: rw, w3: pw, values, a1, a2, a3, closed_boundary: false }
    }

    pub fn product(&self, other: &BallMap<R>) -> BallMap<R> {
        assert_eq!(self.values.len(), other.values.len(), "grid mismatch");
        let mut values = Vec::with_capacity(self.values.len());
        let mut a1 = Vec::with_capacity(self.values.len());
        let mut a2 = Vec::with_capacity(self.values.len());
        let mut a3 = Vec::with_capacity(self.values.len());
        for i in 0..self.values.len() {
            let g = &other.values[i];
            let gd = g.dagger();
            values.push(&self.values[i] * g);
            a1.push(&(&(&gd * &self.a1[i]) * g) + &other.a1[i]);
            a2.push(&(&(&gd * &self.a2[i]) * g) + &other.a2[i]);
            a3.push(&(&(&gd * &self.a3[i]) * g) + &other.a3[i]);
        }
        BallMap {
            n: self.n,
            w1: self.w1.clone(),
            w2: self.w2.clone(),
            w3: self.w3.clone(),
            values,
            a1,
            a2,
            a3,
            closed_boundary: self.closed_boundary && other.closed_boundary,
        }
    }

    pub fn inverse(&self) -> BallMap<R> {
        let flip = |a: &Vec<CMat<R>>, vals: &Vec<CMat<R>>| -> Vec<CMat<R>> {
            (0..a.len())
                .map(|i| {
                    let f = &vals[i];
                    -&(&(f * &a[i]) * &f.dagger())
                })
                .collect()
        };
        BallMap {
            n: self.n,
            w1: self.w1.clone(),
            w2: self.w2.clone(),
            w3: self.w3.clone(),
            a1: flip(&self.a1, &self.values),
            a2: flip(&self.a2, &self.values),
            a3: flip(&self.a3, &self.values),
            values: self.values.iter().map(|v| v.dagger()).collect(),
            closed_boundary: self.closed_boundary,
        }
    }
}

/// C(g) = θ²/(48π²) ∫_B ε^{ijk} ⟨A_i, ½[A_j, A_k]⟩, evaluated on the
/// spherical box with the (ρ, θ, φ) orientation.
pub fn wzw_term<R: Real>(g: &BallMap<R>) -> R {
    let n2 = g.w2.len();
    let n3 = g.w3.len();
    let mut terms = Vec::with_capacity(g.values.len());
    for (i1, w1) in g.w1.iter().enumerate() {
        for (i2, w2) in g.w2.iter().enumerate() {
            for (i3, w3) in g.w3.iter().enumerate() {
                let idx = (i1 * n2 + i2) * n3 + i3;
                let integrand = R::from_f(3.0)
                    * pairing(&g.a1[idx], &g.a2[idx].commutator(&g.a3[idx]));
                terms.push(*w1 * *w2 * *w3 * integrand);
            }
        }
    }
    wzw_norm::<R>() * pairwise_sum(&terms)
}

/// Winding number of a sphere map presented as a ball map with central
/// constant boundary: the full 3-form integral, an integer up to quadrature
/// error.
pub fn winding_s3<R: Real>(g: &BallMap<R>) -> R {
    assert!(g.closed_boundary, "winding needs a closed (constant-boundary) map");
    wzw_term(g)
}

/// The standard degree-one map B → SU(2) ⊂ SU(n),
/// exp(iπρ n̂(θ,φ)·σ) on the upper-left block: boundary value −1 ⊕ 1.
pub fn degree_one_generator<R: Real>(n: usize) -> BallGenerator<R> {
    use num_complex::Complex;
    assert!(n >= 2);
    let pi = R::from_f(std::f64::consts::PI);
    let mut sx = CMat::<R>::zeros(n);
    sx[(0, 1)] = Complex::new(R::zero(), pi);
    sx[(1, 0)] = Complex::new(R::zero(), pi);
    let mut sy = CMat::<R>::zeros(n);
    sy[(0, 1)] = Complex::new(pi, R::zero());
    sy[(1, 0)] = Complex::new(-pi, R::zero());
    let mut sz = CMat::<R>::zeros(n);
    sz[(0, 0)] = Complex::new(R::zero(), pi);
    sz[(1, 1)] = Complex::new(R::zero(), -pi);
    BallGenerator { n, terms: vec![(sx, 1, 0, 0), (sy, 0, 1, 0), (sz, 0, 0, 1)] }
}

/// |C(g₁g₂) − C(g₁) − C(g₂) − γ(g₁, g₂)| reduced mod Z, for boundary-trivial
/// disc maps with their radial extensions.
pub fn phi_homomorphism_residual<R: Real>(
    g1: &DiscGenerator<R>,
    g2: &DiscGenerator<R>,
    grid: BallGrid,
) -> R {
    let b1 = BallMap::extend_disc(g1, grid);
    let b2 = BallMap::extend_disc(g2, grid);
    let b12 = b1.product(&b2);
    let d1 = DiscMap::from_generator(g1, grid.ntheta, grid.nphi);
    let d2 = DiscMap::from_generator(g2, grid.ntheta, grid.nphi);
    let value = wzw_term(&b12) - wzw_term(&b1) - wzw_term(&b2) - gamma_disc(&d1, &d2);
    distance_to_integer(value)
}

pub fn distance_to_integer<R: Real>(x: R) -> R {
    (x - x.round()).abs()
}

/// Deterministic random disc generators for tests and the CLI.
pub struct DiscSampler {
    rng: rand_chacha::ChaCha8Rng,
    pub n: usize,
}

impl DiscSampler {
    pub fn new(n: usize, seed: u64) -> Self {
        use rand::SeedableRng;
        DiscSampler { rng: rand_chacha::ChaCha8Rng::seed_from_u64(seed), n }
    }

    pub fn generator<R: Real>(&mut self, max_degree: u32, scale: f64) -> DiscGenerator<R> {
        use rand::Rng;
        let mut terms = Vec::new();
        for a in 0..=max_degree {
            for b in 0..=(max_degree - a) {
                let count = self.n * (self.n + 1) / 2;
                let entries: Vec<(f64, f64)> = (0..count)
                    .map(|_| {
                        (
                            self.rng.gen_range(-scale..scale),
                            self.rng.gen_range(-scale..scale),
                        )
                    })
                    .collect();
                terms.push((crate::cmatrix::su_element_from(self.n, &entries), a, b));
            }
        }
        DiscGenerator { n: self.n, terms }
    }
}
