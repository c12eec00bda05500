//! Lifting automorphisms of the building blocks of an abelian extension
//! Â = A ×_{(S,f)} N to the extension itself: the kernel embedding Ψ from
//! degree-1 cocycles, the projection Φ onto pairs (φ_A, φ_N), invariance
//! witnesses θ with d_N θ(g) = g.f − f, the lifted maps ψ̂_θ, their defect
//! 2-cochain, and the obstruction class in H²(G, Z¹(N, A)).

use crate::abelian::{AbelianGroup, Elt};
use crate::action::GAction;
use crate::cochain::{free_tuples, Cochain};
use crate::error::CoreError;
use crate::extension::{abelian_extension, AbelianExtension};
use crate::group::FiniteGroup;
use crate::intlin::{self, IntMat};
use crate::Limits;
use std::collections::HashMap;
use std::sync::Arc;

/// A normal subgroup N ⊴ G with its reindexed group structure.
#[derive(Debug, Clone)]
pub struct NormalData {
    pub ambient: Arc<FiniteGroup>,
    /// N as ambient indices, sorted, elements[0] = identity
    pub elements: Vec<usize>,
    pub pos: HashMap<usize, usize>,
    pub sub: Arc<FiniteGroup>,
}

impl NormalData {
    pub fn new(ambient: &Arc<FiniteGroup>, elements: &[usize]) -> Result<Self, CoreError> {
        let mut elements = elements.to_vec();
        elements.sort_unstable();
        elements.dedup();
        if !ambient.is_subgroup(&elements) {
            return Err(CoreError::NotSubgroup);
        }
        if !ambient.is_normal(&elements) {
            return Err(CoreError::NotNormal);
        }
        let pos: HashMap<usize, usize> =
            elements.iter().copied().enumerate().map(|(i, x)| (x, i)).collect();
        let k = elements.len();
        let mut table = vec![vec![0usize; k]; k];
        for (i, &a) in elements.iter().enumerate() {
            for (j, &b) in elements.iter().enumerate() {
                table[i][j] = pos[&ambient.mul(a, b)];
            }
        }
        let sub = Arc::new(FiniteGroup::from_table(table)?);
        Ok(NormalData { ambient: Arc::clone(ambient), elements, pos, sub })
    }

    /// conjugation by the ambient element g as a permutation of N-indices
    pub fn conj_perm(&self, g: usize) -> Vec<usize> {
        self.elements
            .iter()
            .map(|&n| self.pos[&self.ambient.conj(g, n)])
            .collect()
    }
}

/// The standing data of the lifting problem: G acting on A through `action`,
/// N ⊴ G, and a degree-2 cocycle f on N over the restricted action.
#[derive(Debug, Clone)]
pub struct LiftingInstance {
    pub action: Arc<GAction>,
    pub normal: NormalData,
    pub sub_action: Arc<GAction>,
    pub f: Cochain,
    pub ahat: AbelianExtension,
}

impl LiftingInstance {
    pub fn new(
        action: Arc<GAction>,
        normal_elements: &[usize],
        f_over_n: &Cochain,
    ) -> Result<Self, CoreError> {
        let normal = NormalData::new(&action.group, normal_elements)?;
        let sub_action = Arc::new(restrict_action(&action, &normal)?);
        if !Arc::ptr_eq(&f_over_n.action, &sub_action)
            && f_over_n.action.group.mul_table() != sub_action.group.mul_table()
        {
            return Err(CoreError::DimensionMismatch(
                "cocycle must live over the restricted action".into(),
            ));
        }
        let f = Cochain {
            degree: 2,
            action: Arc::clone(&sub_action),
            table: f_over_n.table.clone(),
        };
        if !f.is_cocycle() {
            return Err(CoreError::NotCocycle("df ≠ 0 over N".into()));
        }
        let ahat = abelian_extension(&f)?;
        Ok(LiftingInstance { action, normal, sub_action, f, ahat })
    }

    /// ψ(g) = (S(g), c_g), the pair to be realized inside Aut(Â, A).
    pub fn psi(&self, g: usize) -> (IntMat, Vec<usize>) {
        (self.action.matrix(g).clone(), self.normal.conj_perm(g))
    }

    /// g.f for the natural G-action on 2-cochains over N.
    pub fn translate_f(&self, g: usize) -> Cochain {
        let n = self.normal.sub.order();
        let ginv = self.action.group.inv(g);
        let cg_inv = self.normal.conj_perm(ginv);
        let mut out = Cochain::zero(&self.sub_action, 2);
        for a in 1..n {
            for b in 1..n {
                let v = self.f.value(&[cg_inv[a], cg_inv[b]]);
                out.set(&[a, b], self.action.apply(g, &v));
            }
        }
        out
    }

    /// g.λ for λ ∈ C¹(N, A): (g.λ)(n) = S(g)(λ(c_{g⁻¹}(n))).
    pub fn translate_1(&self, g: usize, lambda: &Cochain) -> Cochain {
        let n = self.normal.sub.order();
        let ginv = self.action.group.inv(g);
        let cg_inv = self.normal.conj_perm(ginv);
        let mut out = Cochain::zero(&self.sub_action, 1);
        for a in 1..n {
            out.set(&[a], self.action.apply(g, &lambda.value(&[cg_inv[a]])));
        }
        out
    }
}

fn restrict_action(action: &Arc<GAction>, normal: &NormalData) -> Result<GAction, CoreError> {
    let matrices = normal
        .elements
        .iter()
        .map(|&g| action.matrix(g).clone())
        .collect();
    GAction::new(Arc::clone(&normal.sub), action.module.clone(), matrices)
}

/// An automorphism of Â preserving the fiber, with its two projections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberedAutomorphism {
    pub perm: Vec<usize>,
    pub phi_a: IntMat,
    pub phi_n: Vec<usize>,
}

impl FiberedAutomorphism {
    pub fn from_perm(ahat: &AbelianExtension, perm: Vec<usize>) -> Result<Self, CoreError> {
        let grp = &ahat.ext.group;
        let total = grp.order();
        if perm.len() != total {
            return Err(CoreError::DimensionMismatch("permutation has the wrong size".into()));
        }
        let mut seen = vec![false; total];
        for &img in &perm {
            if img >= total || seen[img] {
                return Err(CoreError::Invalid("not a bijection of the extension".into()));
            }
            seen[img] = true;
        }
        for x in 0..total {
            for y in 0..total {
                if perm[grp.mul(x, y)] != grp.mul(perm[x], perm[y]) {
                    return Err(CoreError::Invalid(format!(
                        "not a homomorphism at pair ({x},{y})"
                    )));
                }
            }
        }
        for x in ahat.ext.kernel() {
            if ahat.ext.q(perm[x]) != 0 {
                return Err(CoreError::Invalid("fiber A is not preserved".into()));
            }
        }
        // φ_A as a matrix, from images of the coordinate generators
        let module = &ahat.action.module;
        let d = module.dim();
        let mut phi_a = IntMat::zeros(d, d);
        for c in 0..d {
            let mut e = module.zero();
            e[c] = 1;
            let e = module.canon(e);
            let img = perm[ahat.ext.embed_fiber(ahat.index_of(&e))];
            let coords = ahat.coords_of(ahat.ext.fiber_part(img)).clone();
            for r in 0..d {
                phi_a[(r, c)] = coords[r];
            }
        }
        // φ_N through the projection: φ_N ∘ q̂ = q̂ ∘ φ must be well-defined
        let n_order = ahat.f.action.group.order();
        let mut phi_n = vec![usize::MAX; n_order];
        for x in 0..total {
            let n = ahat.ext.q(x);
            let img_n = ahat.ext.q(perm[x]);
            if phi_n[n] == usize::MAX {
                phi_n[n] = img_n;
            } else if phi_n[n] != img_n {
                return Err(CoreError::Invalid(
                    "image does not descend to an automorphism of N".into(),
                ));
            }
        }
        Ok(FiberedAutomorphism { perm, phi_a, phi_n })
    }

    pub fn identity(ahat: &AbelianExtension) -> Self {
        let total = ahat.ext.order();
        FiberedAutomorphism::from_perm(ahat, (0..total).collect())
            .expect("identity is an automorphism")
    }

    pub fn compose(&self, other: &FiberedAutomorphism, ahat: &AbelianExtension) -> FiberedAutomorphism {
        let perm: Vec<usize> = (0..self.perm.len()).map(|x| self.perm[other.perm[x]]).collect();
        FiberedAutomorphism::from_perm(ahat, perm).expect("composition of automorphisms")
    }

    pub fn inverse(&self, ahat: &AbelianExtension) -> FiberedAutomorphism {
        let mut perm = vec![0usize; self.perm.len()];
        for (x, &img) in self.perm.iter().enumerate() {
            perm[img] = x;
        }
        FiberedAutomorphism::from_perm(ahat, perm).expect("inverse of an automorphism")
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &x)| i == x)
    }
}

/// Ψ(f₁) = (f₁ ∘ q̂)·id: the automorphism (a, n) ↦ (a + f₁(n), n).
pub fn psi_embed(f1: &Cochain, ahat: &AbelianExtension) -> Result<FiberedAutomorphism, CoreError> {
    if f1.degree != 1 {
        return Err(CoreError::DimensionMismatch(
            "kernel embedding takes degree-1 cochains".into(),
        ));
    }
    if !f1.is_cocycle() {
        return Err(CoreError::NotCocycle("df₁ ≠ 0".into()));
    }
    let module = &ahat.action.module;
    let total = ahat.ext.order();
    let perm: Vec<usize> = (0..total)
        .map(|x| {
            let n = ahat.ext.q(x);
            let a = ahat.coords_of(ahat.ext.fiber_part(x)).clone();
            let shifted = module.add(&a, &f1.value(&[n]));
            ahat.pair_coords(&shifted, n)
        })
        .collect();
    FiberedAutomorphism::from_perm(ahat, perm)
}

/// Read off the degree-1 cocycle of an element of ker Φ.
pub fn psi_extract(phi: &FiberedAutomorphism, ahat: &AbelianExtension) -> Cochain {
    let n_order = ahat.f.action.group.order();
    let mut z = Cochain::zero(&ahat.f.action, 1);
    for n in 1..n_order {
        let x = ahat.ext.sigma(n);
        let img = phi.perm[x];
        z.set(&[n], ahat.coords_of(ahat.ext.fiber_part(img)).clone());
    }
    z
}

/// Invert an automorphism matrix of the module, exactly modulo torsion.
pub fn invert_module_matrix(module: &AbelianGroup, m: &IntMat) -> Result<IntMat, CoreError> {
    let d = module.dim();
    let moduli = module.moduli();
    let mut inv = IntMat::zeros(d, d);
    for c in 0..d {
        let mut e = vec![0i128; d];
        e[c] = 1;
        let x = intlin::solve_mod(m, &e, &moduli).ok_or_else(|| {
            CoreError::InvalidAction("matrix is not invertible on the module".into())
        })?;
        for r in 0..d {
            inv[(r, c)] = x[r];
        }
    }
    Ok(inv)
}

/// The natural action (φ_A, φ_N).(S, f) on action-cocycle pairs over N:
/// S' = c_{φ_A} ∘ S ∘ φ_N⁻¹ and f' = φ_A ∘ f ∘ (φ_N⁻¹ × φ_N⁻¹).
pub fn pair_action(
    phi_a: &IntMat,
    phi_n: &[usize],
    sub_action: &Arc<GAction>,
    f: &Cochain,
) -> Result<(Arc<GAction>, Cochain), CoreError> {
    let module = &sub_action.module;
    let n_grp = &sub_action.group;
    let n = n_grp.order();
    if phi_n.len() != n {
        return Err(CoreError::DimensionMismatch("φ_N has the wrong size".into()));
    }
    for a in 0..n {
        for b in 0..n {
            if phi_n[n_grp.mul(a, b)] != n_grp.mul(phi_n[a], phi_n[b]) {
                return Err(CoreError::Invalid("φ_N is not an automorphism".into()));
            }
        }
    }
    let phi_a_inv = invert_module_matrix(module, phi_a)?;
    let mut phi_n_inv = vec![0usize; n];
    for (x, &img) in phi_n.iter().enumerate() {
        phi_n_inv[img] = x;
    }
    let matrices: Vec<IntMat> = (0..n)
        .map(|m| phi_a.matmul(sub_action.matrix(phi_n_inv[m])).matmul(&phi_a_inv))
        .collect();
    let s_prime = Arc::new(GAction::new(Arc::clone(n_grp), module.clone(), matrices)?);
    let mut f_prime = Cochain::zero(&s_prime, 2);
    for a in 1..n {
        for b in 1..n {
            let v = f.value(&[phi_n_inv[a], phi_n_inv[b]]);
            f_prime.set(&[a, b], module.canon(phi_a.mul_vec(&v)));
        }
    }
    if !f_prime.is_cocycle() {
        return Err(CoreError::NotCocycle(
            "transported cochain is not a cocycle over the transported action".into(),
        ));
    }
    Ok((s_prime, f_prime))
}

/// Outcome of asking whether (φ_A, φ_N) lies in the image of Φ.
pub enum LiftOutcome {
    Lift(FiberedAutomorphism),
    NoCochain,
    ActionMismatch,
}

/// Membership test for im Φ: the transported pair must be (S, f + d_N h);
/// on success the explicit lift (a,n) ↦ (φ_A(a) + h(φ_N(n)), φ_N(n)) is
/// returned.
pub fn in_image_phi(
    phi_a: &IntMat,
    phi_n: &[usize],
    inst: &LiftingInstance,
) -> Result<LiftOutcome, CoreError> {
    let (s_prime, f_prime) = pair_action(phi_a, phi_n, &inst.sub_action, &inst.f)?;
    if !actions_equal(&s_prime, &inst.sub_action) {
        return Ok(LiftOutcome::ActionMismatch);
    }
    let f_prime = Cochain {
        degree: 2,
        action: Arc::clone(&inst.sub_action),
        table: f_prime.table.clone(),
    };
    let Some(h) = f_prime.sub(&inst.f).coboundary_witness() else {
        return Ok(LiftOutcome::NoCochain);
    };
    let module = &inst.action.module;
    let total = inst.ahat.ext.order();
    let perm: Vec<usize> = (0..total)
        .map(|x| {
            let n = inst.ahat.ext.q(x);
            let a = inst.ahat.coords_of(inst.ahat.ext.fiber_part(x)).clone();
            let fa = module.canon(phi_a.mul_vec(&a));
            let img_n = phi_n[n];
            let shifted = module.add(&fa, &h.value(&[img_n]));
            inst.ahat.pair_coords(&shifted, img_n)
        })
        .collect();
    let phi = FiberedAutomorphism::from_perm(&inst.ahat, perm)?;
    Ok(LiftOutcome::Lift(phi))
}

pub fn actions_equal(a: &GAction, b: &GAction) -> bool {
    if a.module != b.module || a.group.mul_table() != b.group.mul_table() {
        return false;
    }
    let d = a.module.dim();
    (0..a.group.order()).all(|g| {
        (0..d).all(|c| {
            let mut e = a.module.zero();
            e[c] = 1;
            a.apply(g, &e) == b.apply(g, &e)
        })
    })
}

/// θ: G → C¹(N, A) with d_N θ(g) = g.f − f and θ(1) = 0.
#[derive(Debug, Clone)]
pub struct InvarianceWitness {
    pub per_g: Vec<Cochain>,
}

/// Per-g linear solve for the invariance witness; None when some g has no
/// solution, i.e. f is not cohomologically invariant.
pub fn invariance_witness(inst: &LiftingInstance) -> Result<Option<InvarianceWitness>, CoreError> {
    let order = inst.action.group.order();
    let mut per_g = Vec::with_capacity(order);
    for g in 0..order {
        if g == 0 {
            per_g.push(Cochain::zero(&inst.sub_action, 1));
            continue;
        }
        let rhs = inst.translate_f(g).sub(&inst.f);
        match rhs.coboundary_witness() {
            Some(h) => per_g.push(h),
            None => return Ok(None),
        }
    }
    Ok(Some(InvarianceWitness { per_g }))
}

/// ψ̂_θ(g): (a, n) ↦ (S(g)(a) + θ(g)(c_g(n)), c_g(n)).
pub fn lifted_automorphism(
    inst: &LiftingInstance,
    theta: &InvarianceWitness,
    g: usize,
) -> Result<FiberedAutomorphism, CoreError> {
    let module = &inst.action.module;
    let cg = inst.normal.conj_perm(g);
    let total = inst.ahat.ext.order();
    let perm: Vec<usize> = (0..total)
        .map(|x| {
            let n = inst.ahat.ext.q(x);
            let a = inst.ahat.coords_of(inst.ahat.ext.fiber_part(x)).clone();
            let cn = cg[n];
            let val = module.add(&inst.action.apply(g, &a), &theta.per_g[g].value(&[cn]));
            inst.ahat.pair_coords(&val, cn)
        })
        .collect();
    FiberedAutomorphism::from_perm(&inst.ahat, perm)
}

/// The inverse formula (a, n) ↦ (S(g⁻¹)(a) − (g⁻¹.θ(g))(c_{g⁻¹}(n)), c_{g⁻¹}(n)).
pub fn lifted_automorphism_inverse(
    inst: &LiftingInstance,
    theta: &InvarianceWitness,
    g: usize,
) -> Result<FiberedAutomorphism, CoreError> {
    let module = &inst.action.module;
    let ginv = inst.action.group.inv(g);
    let cginv = inst.normal.conj_perm(ginv);
    let pulled = inst.translate_1(ginv, &theta.per_g[g]);
    let total = inst.ahat.ext.order();
    let perm: Vec<usize> = (0..total)
        .map(|x| {
            let n = inst.ahat.ext.q(x);
            let a = inst.ahat.coords_of(inst.ahat.ext.fiber_part(x)).clone();
            let cn = cginv[n];
            let val = module.sub(&inst.action.apply(ginv, &a), &pulled.value(&[cn]));
            inst.ahat.pair_coords(&val, cn)
        })
        .collect();
    FiberedAutomorphism::from_perm(&inst.ahat, perm)
}

/// d_{S_ψ}θ(g, g') = g.θ(g') − θ(gg') + θ(g), valued in C¹(N, A).
pub fn theta_defect(
    inst: &LiftingInstance,
    theta: &InvarianceWitness,
    g: usize,
    h: usize,
) -> Cochain {
    let gh = inst.action.group.mul(g, h);
    inst.translate_1(g, &theta.per_g[h])
        .sub(&theta.per_g[gh])
        .add(&theta.per_g[g])
}

/// Per-g automorphisms plus the defect table measuring the failure of
/// g ↦ ψ̂_θ(g) to be a homomorphism.
pub struct LiftFamily {
    pub maps: Vec<FiberedAutomorphism>,
    /// defect(g, g') as degree-1 cochains over N, indexed g·|G| + g'
    pub defect: Vec<Cochain>,
}

pub fn lift_homomorphism(
    inst: &LiftingInstance,
    theta: &InvarianceWitness,
) -> Result<LiftFamily, CoreError> {
    let order = inst.action.group.order();
    let mut maps = Vec::with_capacity(order);
    for g in 0..order {
        maps.push(lifted_automorphism(inst, theta, g)?);
    }
    let mut defect = Vec::with_capacity(order * order);
    for g in 0..order {
        for h in 0..order {
            let gh = inst.action.group.mul(g, h);
            let composed = maps[g]
                .compose(&maps[h], &inst.ahat)
                .compose(&maps[gh].inverse(&inst.ahat), &inst.ahat);
            let z = psi_extract(&composed, &inst.ahat);
            if !z.is_cocycle() {
                return Err(CoreError::Invalid(
                    "defect failed to land in the degree-1 cocycles".into(),
                ));
            }
            defect.push(z);
        }
    }
    Ok(LiftFamily { maps, defect })
}

impl LiftFamily {
    pub fn is_homomorphism(&self) -> bool {
        self.defect.iter().all(|z| z.is_zero())
    }
}

/// Z¹(N, A) packaged as a coefficient module for cochains over G, with the
/// action g.λ = S(g) ∘ λ ∘ c_{g⁻¹} expressed on invariant-factor coordinates.
pub struct Z1Module {
    /// generators of the cocycle group in ambient C¹ coordinates
    pub generators: Vec<Vec<i128>>,
    /// per-coordinate moduli of the ambient C¹ space
    pub ambient_moduli: Vec<i128>,
    pub action: Arc<GAction>,
}

impl Z1Module {
    /// ambient C¹ coordinate vector → shape coordinates
    pub fn to_coords(&self, ambient: &[i128]) -> Option<Elt> {
        if self.generators.is_empty() {
            return if ambient
                .iter()
                .zip(&self.ambient_moduli)
                .all(|(&x, &m)| x.rem_euclid(m) == 0)
            {
                Some(vec![])
            } else {
                None
            };
        }
        let gm = IntMat::from_cols(&self.generators, self.ambient_moduli.len());
        let x = intlin::solve_bounded(&gm, &ambient.to_vec(), &self.ambient_moduli)?;
        Some(self.action.module.canon(x))
    }

    /// shape coordinates → an ambient representative
    pub fn to_ambient(&self, coords: &Elt, dim: usize) -> Vec<i128> {
        let mut out = vec![0i128; dim];
        for (i, gen) in self.generators.iter().enumerate() {
            for (j, &v) in gen.iter().enumerate() {
                out[j] += coords[i] * v;
            }
        }
        for (j, &m) in self.ambient_moduli.iter().enumerate() {
            out[j] = out[j].rem_euclid(m);
        }
        out
    }
}

/// Build Z¹(N, A) as a G-module (finite coefficient modules only).
pub fn z1_module(inst: &LiftingInstance) -> Result<Z1Module, CoreError> {
    if !inst.action.module.is_finite() {
        return Err(CoreError::ResourceLimit(
            "the lifted-automorphism module needs a finite coefficient module".into(),
        ));
    }
    let st = crate::cochain::DifferentialStencil::new(&inst.sub_action, 1);
    let ambient_moduli = st.in_moduli();
    let z_gens =
        intlin::solution_group_generators(&st.matrix(), &st.out_moduli(), &ambient_moduli);
    let pres = intlin::finite_subquotient_presentation(&z_gens, &[], &ambient_moduli)
        .expect("empty relation set is always expressible");
    let shape = AbelianGroup { rank: 0, torsion: pres.factors.clone() };

    let module = &inst.action.module;
    let d = module.dim();
    let n = inst.normal.sub.order();
    let dim = free_tuples(n, 1) * d;
    let ambient_matrix = |g: usize| -> IntMat {
        let ginv = inst.action.group.inv(g);
        let cg_inv = inst.normal.conj_perm(ginv);
        let mut m = IntMat::zeros(dim, dim);
        let sg = inst.action.matrix(g);
        for out_t in 1..n {
            let in_t = cg_inv[out_t];
            if in_t == 0 {
                continue;
            }
            for r in 0..d {
                for c in 0..d {
                    m[((out_t - 1) * d + r, (in_t - 1) * d + c)] = sg[(r, c)];
                }
            }
        }
        m
    };
    let order = inst.action.group.order();
    let dshape = pres.generators.len();
    let gen_mat = if dshape > 0 {
        Some(IntMat::from_cols(&pres.generators, dim))
    } else {
        None
    };
    let mut matrices = Vec::with_capacity(order);
    for g in 0..order {
        let am = ambient_matrix(g);
        let mut mat = IntMat::zeros(dshape, dshape);
        if let Some(gm) = &gen_mat {
            for (col, gen) in pres.generators.iter().enumerate() {
                let img: Vec<i128> = am
                    .mul_vec(gen)
                    .iter()
                    .zip(&ambient_moduli)
                    .map(|(&v, &m)| v.rem_euclid(m))
                    .collect();
                let coords = intlin::solve_bounded(gm, &img, &ambient_moduli)
                    .ok_or_else(|| CoreError::Invalid("action does not preserve Z¹".into()))?;
                for row in 0..dshape {
                    mat[(row, col)] = coords[row];
                }
            }
        }
        matrices.push(mat);
    }
    let action = Arc::new(GAction::new(Arc::clone(&inst.action.group), shape, matrices)?);
    Ok(Z1Module { generators: pres.generators, ambient_moduli, action })
}

/// The lifting obstruction: "not invariant", or the class of the defect in
/// H²(G, Z¹(N, A)) together with a corrected homomorphic lift when zero.
pub enum Obstruction {
    NotInvariant,
    Class(Box<ObstructionClass>),
}

pub struct ObstructionClass {
    pub theta: InvarianceWitness,
    pub defect_cochain: Cochain,
    pub h2_factors: Vec<i128>,
    pub class_zero: bool,
    pub corrected: Option<InvarianceWitness>,
    pub lift: Option<LiftFamily>,
}

pub fn lifting_obstruction(
    inst: &LiftingInstance,
    limits: &Limits,
) -> Result<Obstruction, CoreError> {
    let Some(theta) = invariance_witness(inst)? else {
        return Ok(Obstruction::NotInvariant);
    };
    let z1 = z1_module(inst)?;
    let order = inst.action.group.order();
    let mut omega_bar = Cochain::zero(&z1.action, 2);
    for g in 1..order {
        for h in 1..order {
            let z = theta_defect(inst, &theta, g, h);
            let coords = z1
                .to_coords(&z.flatten())
                .ok_or_else(|| CoreError::Invalid("defect is not a degree-1 cocycle".into()))?;
            omega_bar.set(&[g, h], coords);
        }
    }
    if !omega_bar.is_cocycle() {
        return Err(CoreError::Invalid("defect cochain is not a 2-cocycle".into()));
    }
    let h2 = crate::cochain::cohomology(&z1.action, 2, limits)?;
    let witness = omega_bar.coboundary_witness();
    let class_zero = witness.is_some();
    let (corrected, lift) = if let Some(w) = witness {
        let module = &inst.action.module;
        let d = module.dim();
        let n = inst.normal.sub.order();
        let dim = free_tuples(n, 1) * d;
        let mut per_g = Vec::with_capacity(order);
        for g in 0..order {
            let coords = w.value(&[g]);
            let ambient = z1.to_ambient(&coords, dim);
            let correction = Cochain::from_flat(&inst.sub_action, 1, &ambient);
            per_g.push(theta.per_g[g].sub(&correction));
        }
        let corrected = InvarianceWitness { per_g };
        let data = lift_homomorphism(inst, &corrected)?;
        if !data.is_homomorphism() {
            return Err(CoreError::Invalid(
                "corrected witness failed to produce a homomorphic lift".into(),
            ));
        }
        (Some(corrected), Some(data))
    } else {
        (None, None)
    };
    Ok(Obstruction::Class(Box::new(ObstructionClass {
        theta,
        defect_cochain: omega_bar,
        h2_factors: h2.factors,
        class_zero,
        corrected,
        lift,
    })))
}

/// Enumerate Aut(Â, A) by backtracking over generator images.
pub fn enumerate_fibered_automorphisms(
    ahat: &AbelianExtension,
    limits: &Limits,
) -> Result<Vec<FiberedAutomorphism>, CoreError> {
    let grp = &ahat.ext.group;
    let total = grp.order();
    let mut gens: Vec<usize> = Vec::new();
    let mut span = vec![0usize];
    while span.len() < total {
        let next = (1..total).find(|x| !span.contains(x)).unwrap();
        gens.push(next);
        span = grp.generated_subgroup(&gens);
    }
    // express every element as parent·gen once via BFS
    let mut word: Vec<Option<(usize, usize)>> = vec![None; total];
    let mut discovery = vec![0usize];
    let mut seen = vec![false; total];
    seen[0] = true;
    let mut qi = 0;
    while qi < discovery.len() {
        let x = discovery[qi];
        qi += 1;
        for (gi, &g) in gens.iter().enumerate() {
            let y = grp.mul(x, g);
            if !seen[y] {
                seen[y] = true;
                word[y] = Some((x, gi));
                discovery.push(y);
            }
        }
    }
    let mut out = Vec::new();
    let mut images = vec![0usize; gens.len()];
    let mut budget: u128 = 0;
    search_images(ahat, &gens, &word, &discovery, 0, &mut images, &mut out, &mut budget, limits.search_bound)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search_images(
    ahat: &AbelianExtension,
    gens: &[usize],
    word: &[Option<(usize, usize)>],
    discovery: &[usize],
    depth: usize,
    images: &mut Vec<usize>,
    out: &mut Vec<FiberedAutomorphism>,
    budget: &mut u128,
    bound: u128,
) -> Result<(), CoreError> {
    let grp = &ahat.ext.group;
    let total = grp.order();
    if depth == gens.len() {
        let mut perm = vec![usize::MAX; total];
        perm[0] = 0;
        for &x in discovery.iter().skip(1) {
            let (parent, gi) = word[x].unwrap();
            perm[x] = grp.mul(perm[parent], images[gi]);
        }
        if let Ok(phi) = FiberedAutomorphism::from_perm(ahat, perm) {
            out.push(phi);
        }
        return Ok(());
    }
    let g = gens[depth];
    let order_g = grp.element_order(g);
    for cand in 0..total {
        *budget += 1;
        if *budget > bound {
            return Err(CoreError::EnumerationBound(format!(
                "automorphism search exceeded {bound} nodes"
            )));
        }
        if grp.element_order(cand) != order_g {
            continue;
        }
        images[depth] = cand;
        search_images(ahat, gens, word, discovery, depth + 1, images, out, budget, bound)?;
    }
    Ok(())
}

/// Exhaustive search for a homomorphic lift L: G → Aut(Â, A) with
/// Φ(L(g)) = (S(g), c_g) for all g, over a precomputed automorphism list.
pub fn exhaustive_lift_search(
    inst: &LiftingInstance,
    auts: &[FiberedAutomorphism],
    limits: &Limits,
) -> Result<Option<Vec<FiberedAutomorphism>>, CoreError> {
    let grp = &inst.action.group;
    let order = grp.order();
    let module = &inst.action.module;
    let d = module.dim();
    let mut fibers: Vec<Vec<usize>> = Vec::with_capacity(order);
    for g in 0..order {
        let (sg, cg) = inst.psi(g);
        let cands: Vec<usize> = auts
            .iter()
            .enumerate()
            .filter(|(_, phi)| {
                phi.phi_n == cg
                    && (0..d).all(|c| {
                        let mut e = module.zero();
                        e[c] = 1;
                        module.canon(phi.phi_a.mul_vec(&e)) == module.canon(sg.mul_vec(&e))
                    })
            })
            .map(|(i, _)| i)
            .collect();
        if cands.is_empty() {
            return Ok(None);
        }
        fibers.push(cands);
    }
    let mut chosen = vec![usize::MAX; order];
    chosen[0] = fibers[0]
        .iter()
        .copied()
        .find(|&i| auts[i].is_identity())
        .ok_or_else(|| CoreError::Invalid("identity automorphism missing".into()))?;
    let mut budget: u128 = 0;

    #[allow(clippy::too_many_arguments)]
    fn backtrack(
        inst: &LiftingInstance,
        auts: &[FiberedAutomorphism],
        fibers: &[Vec<usize>],
        chosen: &mut Vec<usize>,
        g: usize,
        budget: &mut u128,
        bound: u128,
    ) -> Result<bool, CoreError> {
        let grp = &inst.action.group;
        let order = grp.order();
        if g == order {
            return Ok(true);
        }
        if chosen[g] != usize::MAX {
            return backtrack(inst, auts, fibers, chosen, g + 1, budget, bound);
        }
        for &cand in &fibers[g] {
            *budget += 1;
            if *budget > bound {
                return Err(CoreError::EnumerationBound(format!(
                    "lift search exceeded {bound} nodes"
                )));
            }
            chosen[g] = cand;
            let consistent = (0..order).filter(|&h| chosen[h] != usize::MAX).all(|h| {
                let gh = grp.mul(g, h);
                let hg = grp.mul(h, g);
                let ok_gh = chosen[gh] == usize::MAX
                    || auts[chosen[g]].compose(&auts[chosen[h]], &inst.ahat) == auts[chosen[gh]];
                let ok_hg = chosen[hg] == usize::MAX
                    || auts[chosen[h]].compose(&auts[chosen[g]], &inst.ahat) == auts[chosen[hg]];
                ok_gh && ok_hg
            });
            if consistent && backtrack(inst, auts, fibers, chosen, g + 1, budget, bound)? {
                return Ok(true);
            }
            chosen[g] = usize::MAX;
        }
        Ok(false)
    }

    let found = backtrack(inst, auts, &fibers, &mut chosen, 1, &mut budget, limits.search_bound)?;
    if !found {
        return Ok(None);
    }
    for g in 0..order {
        for h in 0..order {
            let gh = grp.mul(g, h);
            if auts[chosen[g]].compose(&auts[chosen[h]], &inst.ahat) != auts[chosen[gh]] {
                return Err(CoreError::Invalid("search returned a non-homomorphism".into()));
            }
        }
    }
    Ok(Some(chosen.into_iter().map(|i| auts[i].clone()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// G = Z_4 ⊇ N = {0, 2}, A = Z_2 trivial, f(n,n) = 1 (Â ≅ Z_4).
    fn z4_instance() -> LiftingInstance {
        let g = Arc::new(FiniteGroup::cyclic(4));
        let action = Arc::new(GAction::trivial(g, AbelianGroup::cyclic(2)));
        let normal = NormalData::new(&action.group, &[0, 2]).unwrap();
        let sub_action = Arc::new(restrict_action(&action, &normal).unwrap());
        let mut f = Cochain::zero(&sub_action, 2);
        f.set(&[1, 1], vec![1]);
        LiftingInstance::new(action, &[0, 2], &f).unwrap()
    }

    #[test]
    fn psi_embed_zero_is_identity() {
        let inst = z4_instance();
        let z = Cochain::zero(&inst.sub_action, 1);
        let phi = psi_embed(&z, &inst.ahat).unwrap();
        assert!(phi.is_identity());
    }

    #[test]
    fn psi_embed_central_homomorphism() {
        // N = Z_2, A = Z_4 trivial action: f₁ any homomorphism N → A
        let g = Arc::new(FiniteGroup::cyclic(2));
        let action = Arc::new(GAction::trivial(g, AbelianGroup::cyclic(4)));
        let normal = NormalData::new(&action.group, &[0, 1]).unwrap();
        let sub_action = Arc::new(restrict_action(&action, &normal).unwrap());
        let f = Cochain::zero(&sub_action, 2);
        let inst = LiftingInstance::new(action, &[0, 1], &f).unwrap();
        let mut f1 = Cochain::zero(&inst.sub_action, 1);
        f1.set(&[1], vec![2]); // 1 ↦ 2 is the homomorphism Z_2 → Z_4
        let phi = psi_embed(&f1, &inst.ahat).unwrap();
        assert!(!phi.is_identity());
        assert_eq!(psi_extract(&phi, &inst.ahat), f1);
    }

    #[test]
    fn psi_embed_rejects_non_cocycle() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let action = Arc::new(GAction::trivial(g, AbelianGroup::cyclic(4)));
        let f = Cochain::zero(
            &Arc::new(GAction::trivial(Arc::new(FiniteGroup::cyclic(2)), AbelianGroup::cyclic(4))),
            2,
        );
        let inst = LiftingInstance::new(action, &[0, 1], &f).unwrap();
        let mut f1 = Cochain::zero(&inst.sub_action, 1);
        f1.set(&[1], vec![1]); // 1 ↦ 1 is not a homomorphism Z_2 → Z_4
        assert!(matches!(psi_embed(&f1, &inst.ahat), Err(CoreError::NotCocycle(_))));
    }

    #[test]
    fn pair_action_identity_fixes_data() {
        let inst = z4_instance();
        let d = inst.action.module.dim();
        let id = IntMat::identity(d);
        let idn: Vec<usize> = (0..inst.normal.sub.order()).collect();
        let (s2, f2) = pair_action(&id, &idn, &inst.sub_action, &inst.f).unwrap();
        assert!(actions_equal(&s2, &inst.sub_action));
        assert_eq!(f2.table, inst.f.table);
    }

    #[test]
    fn pair_action_negation_negates_cocycle() {
        // A = Z_4, trivial φ_N: f' = −f is again a cocycle
        let g = Arc::new(FiniteGroup::cyclic(2));
        let action = Arc::new(GAction::trivial(g, AbelianGroup::cyclic(4)));
        let normal = NormalData::new(&action.group, &[0, 1]).unwrap();
        let sub_action = Arc::new(restrict_action(&action, &normal).unwrap());
        let mut f = Cochain::zero(&sub_action, 2);
        f.set(&[1, 1], vec![1]);
        let inst = LiftingInstance::new(action, &[0, 1], &f).unwrap();
        let mut neg = IntMat::identity(1);
        neg[(0, 0)] = -1;
        let idn: Vec<usize> = (0..2).collect();
        let (_, f2) = pair_action(&neg, &idn, &inst.sub_action, &inst.f).unwrap();
        assert_eq!(f2.value(&[1, 1]), vec![3]);
        assert!(f2.is_cocycle());
    }

    #[test]
    fn pair_action_then_inverse_returns() {
        let inst = z4_instance();
        let mut neg = IntMat::identity(1);
        neg[(0, 0)] = -1;
        let idn: Vec<usize> = (0..inst.normal.sub.order()).collect();
        let (s2, f2) = pair_action(&neg, &idn, &inst.sub_action, &inst.f).unwrap();
        let f2_re = Cochain { degree: 2, action: Arc::clone(&s2), table: f2.table.clone() };
        let (s3, f3) = pair_action(&neg, &idn, &s2, &f2_re).unwrap();
        assert!(actions_equal(&s3, &inst.sub_action));
        assert_eq!(f3.table, inst.f.table);
    }

    #[test]
    fn in_image_identity_lifts() {
        let inst = z4_instance();
        let id = IntMat::identity(1);
        let idn: Vec<usize> = (0..2).collect();
        match in_image_phi(&id, &idn, &inst).unwrap() {
            LiftOutcome::Lift(phi) => assert!(phi.is_identity()),
            _ => panic!("identity must lift"),
        }
    }

    #[test]
    fn in_image_detects_non_coboundary_difference() {
        // N = Z_4, A = Z_4, f = carry cocycle (Â ≅ Z_16); φ_A = −1 transports
        // f to −f and 2[f] ≠ 0, so no h exists
        let g = Arc::new(FiniteGroup::cyclic(4));
        let action = Arc::new(GAction::trivial(g, AbelianGroup::cyclic(4)));
        let normal = NormalData::new(&action.group, &[0, 1, 2, 3]).unwrap();
        let sub_action = Arc::new(restrict_action(&action, &normal).unwrap());
        let mut f = Cochain::zero(&sub_action, 2);
        for a in 1..4usize {
            for b in 1..4usize {
                if a + b >= 4 {
                    f.set(&[a, b], vec![1]);
                }
            }
        }
        let inst = LiftingInstance::new(action, &[0, 1, 2, 3], &f).unwrap();
        assert_eq!(inst.ahat.ext.group.element_order(inst.ahat.ext.pair(0, 1)), 16);
        let mut neg = IntMat::identity(1);
        neg[(0, 0)] = -1;
        let idn: Vec<usize> = (0..4).collect();
        match in_image_phi(&neg, &idn, &inst).unwrap() {
            LiftOutcome::NoCochain => {}
            _ => panic!("−1 on the fiber of Z_16 over Z_4 must not lift with φ_N = id"),
        }
    }

    #[test]
    fn invariance_witness_zero_for_zero() {
        let g = Arc::new(FiniteGroup::cyclic(4));
        let action = Arc::new(GAction::trivial(g, AbelianGroup::cyclic(2)));
        let normal = NormalData::new(&action.group, &[0, 2]).unwrap();
        let sub_action = Arc::new(restrict_action(&action, &normal).unwrap());
        let f = Cochain::zero(&sub_action, 2);
        let inst = LiftingInstance::new(action, &[0, 2], &f).unwrap();
        let theta = invariance_witness(&inst).unwrap().unwrap();
        assert!(theta.per_g.iter().all(|t| t.is_zero()));
    }

    #[test]
    fn coboundary_choice_matches_translate() {
        // f = d_N h: θ(g) = g.h − h is a valid witness
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = Arc::new(FiniteGroup::dihedral(3));
        let action = Arc::new(GAction::trivial(g, AbelianGroup::cyclic(3)));
        let normal_elts = vec![0usize, 1, 2];
        let normal = NormalData::new(&action.group, &normal_elts).unwrap();
        let sub_action = Arc::new(restrict_action(&action, &normal).unwrap());
        let h = Cochain::random(&sub_action, 1, &mut rng);
        let f = h.differential();
        let inst = LiftingInstance::new(action, &normal_elts, &f).unwrap();
        for g in 0..6 {
            let candidate = inst.translate_1(g, &h).sub(&h);
            // d_N(candidate) must equal g.f − f
            let rhs = inst.translate_f(g).sub(&inst.f);
            assert_eq!(candidate.differential(), rhs, "g = {g}");
        }
        assert!(invariance_witness(&inst).unwrap().is_some());
    }

    #[test]
    fn defect_identity_lemma() {
        // the permutation-level defect equals d_{S_ψ}θ composed with q̂
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = Arc::new(FiniteGroup::dihedral(3));
        let action = Arc::new(GAction::trivial(g, AbelianGroup::cyclic(3)));
        let normal_elts = vec![0usize, 1, 2];
        let normal = NormalData::new(&action.group, &normal_elts).unwrap();
        let sub_action = Arc::new(restrict_action(&action, &normal).unwrap());
        let h = Cochain::random(&sub_action, 1, &mut rng);
        let f = h.differential();
        let inst = LiftingInstance::new(action, &normal_elts, &f).unwrap();
        let theta = invariance_witness(&inst).unwrap().unwrap();
        let data = lift_homomorphism(&inst, &theta).unwrap();
        let order = inst.action.group.order();
        for g1 in 0..order {
            for g2 in 0..order {
                let direct = &data.defect[g1 * order + g2];
                let formula = theta_defect(&inst, &theta, g1, g2);
                assert_eq!(direct.table, formula.table, "defect mismatch at ({g1},{g2})");
            }
        }
    }

    #[test]
    fn lifted_inverse_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let g = Arc::new(FiniteGroup::dihedral(3));
        let action = Arc::new(GAction::trivial(g, AbelianGroup::cyclic(3)));
        let normal_elts = vec![0usize, 1, 2];
        let normal = NormalData::new(&action.group, &normal_elts).unwrap();
        let sub_action = Arc::new(restrict_action(&action, &normal).unwrap());
        let h = Cochain::random(&sub_action, 1, &mut rng);
        let f = h.differential();
        let inst = LiftingInstance::new(action, &normal_elts, &f).unwrap();
        let theta = invariance_witness(&inst).unwrap().unwrap();
        for g in 0..6 {
            let fwd = lifted_automorphism(&inst, &theta, g).unwrap();
            let bwd = lifted_automorphism_inverse(&inst, &theta, g).unwrap();
            assert!(fwd.compose(&bwd, &inst.ahat).is_identity());
            assert!(bwd.compose(&fwd, &inst.ahat).is_identity());
        }
    }

    #[test]
    fn kernel_phi_equals_image_psi_z8() {
        // Â = Z_8 as extension of N = Z_4 by A = Z_2
        let g = Arc::new(FiniteGroup::cyclic(4));
        let action = Arc::new(GAction::trivial(g, AbelianGroup::cyclic(2)));
        let normal_elts = vec![0usize, 1, 2, 3];
        let normal = NormalData::new(&action.group, &normal_elts).unwrap();
        let sub_action = Arc::new(restrict_action(&action, &normal).unwrap());
        let mut f = Cochain::zero(&sub_action, 2);
        for a in 1..4usize {
            for b in 1..4usize {
                if a + b >= 4 {
                    f.set(&[a, b], vec![1]);
                }
            }
        }
        let inst = LiftingInstance::new(action, &normal_elts, &f).unwrap();
        let auts = enumerate_fibered_automorphisms(&inst.ahat, &Limits::default()).unwrap();
        // ker Φ: trivial φ_A and φ_N
        let kernel: Vec<&FiberedAutomorphism> = auts
            .iter()
            .filter(|phi| {
                phi.phi_n.iter().enumerate().all(|(i, &x)| i == x)
                    && (0..1).all(|c| {
                        let mut e = inst.action.module.zero();
                        e[c] = 1;
                        inst.action.module.canon(phi.phi_a.mul_vec(&e)) == e
                    })
            })
            .collect();
        // im Ψ: all degree-1 cocycles
        let st = crate::cochain::DifferentialStencil::new(&inst.sub_action, 1);
        let z_basis = st.cocycle_lattice();
        let _ = z_basis;
        let mut images: Vec<Vec<usize>> = Vec::new();
        for z in crate::oracle::cocycle_scan(&inst.sub_action, 1, &Limits::default()).unwrap() {
            let zc = Cochain::from_flat(&inst.sub_action, 1, &z);
            images.push(psi_embed(&zc, &inst.ahat).unwrap().perm);
        }
        let mut kernel_perms: Vec<Vec<usize>> = kernel.iter().map(|p| p.perm.clone()).collect();
        kernel_perms.sort();
        images.sort();
        images.dedup();
        assert_eq!(kernel_perms, images);
    }
}
