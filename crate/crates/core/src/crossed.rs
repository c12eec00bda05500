//! Crossed modules (α, Ŝ): axiom validation with derived data, the
//! degree-3 characteristic cocycle Ω from section-and-lift choices, the
//! classification of extensions by structural cocycles and the simply
//! transitive H² action, and the phase-level obstruction table for lifts
//! of quotient cocycles by powers of a central element.

use crate::abelian::{decompose_finite_abelian, AbelianGroup, Elt, FiniteAbelianChart};
use crate::action::GAction;
use crate::cochain::Cochain;
use crate::error::CoreError;
use crate::extension::{build_extension, ExtensionGroup, FactorSystem};
use crate::group::{quotient, FiniteGroup, Quotient};
use crate::intlin::IntMat;
use crate::Limits;
use rand::Rng;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct CrossedModule {
    pub nhat: Arc<FiniteGroup>,
    pub g: Arc<FiniteGroup>,
    /// α: N̂ → G
    pub alpha: Vec<usize>,
    /// Ŝ(g) as permutations of N̂, one per element of G
    pub shat: Vec<Vec<usize>>,
}

/// A crossed module whose axioms have been checked, with the derived data
/// cached: N = im α, Z = ker α, H = G/N with canonical section, the abelian
/// chart of Z, and the induced H-action T on Z.
#[derive(Debug)]
pub struct ValidatedCrossedModule {
    pub cm: CrossedModule,
    pub image: Vec<usize>,
    pub kernel: Vec<usize>,
    pub quotient: Quotient,
    pub z_chart: FiniteAbelianChart,
    pub t_action: Arc<GAction>,
}

impl CrossedModule {
    /// The conjugation crossed module of a normal subgroup: α the inclusion,
    /// Ŝ the conjugation action.
    pub fn conjugation(g: &Arc<FiniteGroup>, normal: &[usize]) -> Result<Self, CoreError> {
        let nd = crate::lifting::NormalData::new(g, normal)?;
        let alpha = nd.elements.clone();
        let shat = (0..g.order()).map(|x| nd.conj_perm(x)).collect();
        Ok(CrossedModule { nhat: Arc::clone(&nd.sub), g: Arc::clone(g), alpha, shat })
    }

    pub fn validate(&self) -> Result<ValidatedCrossedModule, CoreError> {
        let nh = self.nhat.order();
        let go = self.g.order();
        if self.alpha.len() != nh || self.shat.len() != go {
            return Err(CoreError::CrossedModule("table sizes do not match".into()));
        }
        for a in 0..nh {
            for b in 0..nh {
                if self.alpha[self.nhat.mul(a, b)] != self.g.mul(self.alpha[a], self.alpha[b]) {
                    return Err(CoreError::CrossedModule(format!(
                        "α is not a homomorphism at ({a},{b})"
                    )));
                }
            }
        }
        for (x, perm) in self.shat.iter().enumerate() {
            if perm.len() != nh {
                return Err(CoreError::CrossedModule(format!("Ŝ({x}) has the wrong size")));
            }
            let mut seen = vec![false; nh];
            for &i in perm {
                if i >= nh || seen[i] {
                    return Err(CoreError::CrossedModule(format!("Ŝ({x}) is not a bijection")));
                }
                seen[i] = true;
            }
            for a in 0..nh {
                for b in 0..nh {
                    if perm[self.nhat.mul(a, b)] != self.nhat.mul(perm[a], perm[b]) {
                        return Err(CoreError::CrossedModule(format!(
                            "Ŝ({x}) is not an automorphism at ({a},{b})"
                        )));
                    }
                }
            }
        }
        for x in 0..go {
            for y in 0..go {
                let xy = self.g.mul(x, y);
                for n in 0..nh {
                    if self.shat[x][self.shat[y][n]] != self.shat[xy][n] {
                        return Err(CoreError::CrossedModule(format!(
                            "Ŝ is not a homomorphism at ({x},{y})"
                        )));
                    }
                }
            }
        }
        // CM1: α ∘ Ŝ(g) = c_g ∘ α
        for x in 0..go {
            for n in 0..nh {
                if self.alpha[self.shat[x][n]] != self.g.conj(x, self.alpha[n]) {
                    return Err(CoreError::CrossedModule(format!(
                        "CM1 fails at g = {x}, n = {n}"
                    )));
                }
            }
        }
        // CM2: Ŝ ∘ α = conjugation of N̂
        for n in 0..nh {
            for m in 0..nh {
                if self.shat[self.alpha[n]][m] != self.nhat.conj(n, m) {
                    return Err(CoreError::CrossedModule(format!(
                        "CM2 fails at n = {n}, m = {m}"
                    )));
                }
            }
        }
        // derived data
        let mut image: Vec<usize> = self.alpha.clone();
        image.sort_unstable();
        image.dedup();
        if !self.g.is_normal(&image) {
            return Err(CoreError::CrossedModule("im α is not normal".into()));
        }
        let kernel: Vec<usize> = (0..nh).filter(|&n| self.alpha[n] == 0).collect();
        for &z in &kernel {
            for m in 0..nh {
                if self.nhat.mul(z, m) != self.nhat.mul(m, z) {
                    return Err(CoreError::CrossedModule("ker α is not central in N̂".into()));
                }
            }
        }
        for x in 0..go {
            for &z in &kernel {
                if !kernel.contains(&self.shat[x][z]) {
                    return Err(CoreError::CrossedModule("ker α is not G-invariant".into()));
                }
            }
        }
        let q = quotient(&self.g, &image)?;
        // T(x) = Ŝ(rep)|_Z must not depend on the representative
        for h in 0..q.quotient.order() {
            let rep = q.section[h];
            for g in 0..go {
                if q.proj[g] != h {
                    continue;
                }
                for &z in &kernel {
                    if self.shat[g][z] != self.shat[rep][z] {
                        return Err(CoreError::CrossedModule(
                            "induced action on ker α depends on the coset representative".into(),
                        ));
                    }
                }
            }
        }
        let z_chart = decompose_finite_abelian(&self.nhat, &kernel)?;
        let d = z_chart.shape.dim();
        let h_grp = Arc::new(q.quotient.clone());
        let mut matrices = Vec::with_capacity(q.quotient.order());
        for h in 0..q.quotient.order() {
            let rep = q.section[h];
            let mut m = IntMat::zeros(d, d);
            for (col, &gen) in z_chart.generators.iter().enumerate() {
                let img = self.shat[rep][gen];
                let coords = &z_chart.coords[&img];
                for row in 0..d {
                    m[(row, col)] = coords[row];
                }
            }
            matrices.push(m);
        }
        let t_action = Arc::new(GAction::new(h_grp, z_chart.shape.clone(), matrices)?);
        Ok(ValidatedCrossedModule {
            cm: self.clone(),
            image,
            kernel,
            quotient: q,
            z_chart,
            t_action,
        })
    }
}

impl ValidatedCrossedModule {
    /// chart coordinates of a kernel element
    pub fn z_coords(&self, nhat_idx: usize) -> &Elt {
        &self.z_chart.coords[&nhat_idx]
    }

    pub fn z_element(&self, coords: &Elt) -> usize {
        self.z_chart.element[&self.z_chart.shape.canon(coords.clone())]
    }

    /// canonical normalized lift choice: identity over the identity target,
    /// least preimage index otherwise
    pub fn canonical_lift(&self, target: usize) -> usize {
        if target == 0 {
            return 0;
        }
        (0..self.cm.nhat.order())
            .find(|&n| self.cm.alpha[n] == target)
            .expect("target must lie in im α")
    }
}

/// The degree-3 characteristic cocycle of a crossed module and its class.
pub struct CharacteristicClass {
    pub omega: Cochain,
    pub class_zero: bool,
    pub witness: Option<Cochain>,
    pub h3_factors: Vec<i128>,
}

/// Ω from the canonical section and canonical lifts.
pub fn characteristic_class(
    vcm: &ValidatedCrossedModule,
    limits: &Limits,
) -> Result<CharacteristicClass, CoreError> {
    let section = vcm.quotient.section.clone();
    let lifts = default_lifts(vcm, &section);
    characteristic_class_with(vcm, &section, &lifts, limits)
}

/// Canonical lift table ĉ(x, y) for a given section.
pub fn default_lifts(vcm: &ValidatedCrossedModule, section: &[usize]) -> Vec<usize> {
    let h = vcm.quotient.quotient.order();
    let mut lifts = vec![0usize; h * h];
    for x in 0..h {
        for y in 0..h {
            if x == 0 || y == 0 {
                lifts[x * h + y] = 0;
                continue;
            }
            let c = coset_cocycle(vcm, section, x, y);
            lifts[x * h + y] = vcm.canonical_lift(c);
        }
    }
    lifts
}

/// c(x,y) = ψ(x)ψ(y)ψ(xy)⁻¹ ∈ N ⊆ G.
fn coset_cocycle(vcm: &ValidatedCrossedModule, section: &[usize], x: usize, y: usize) -> usize {
    let g = &vcm.cm.g;
    let hq = &vcm.quotient.quotient;
    let prod = g.mul(section[x], section[y]);
    g.mul(prod, g.inv(section[hq.mul(x, y)]))
}

/// Ω from explicit section and lift choices:
/// Ŝ(ψ(x))(ĉ(y,z)) · ĉ(x,yz) = ĉ(x,y) · ĉ(xy,z) · Ω(x,y,z).
pub fn characteristic_class_with(
    vcm: &ValidatedCrossedModule,
    section: &[usize],
    lifts: &[usize],
    limits: &Limits,
) -> Result<CharacteristicClass, CoreError> {
    let h = vcm.quotient.quotient.order();
    let hq = &vcm.quotient.quotient;
    let nhat = &vcm.cm.nhat;
    if section[0] != 0 {
        return Err(CoreError::NotSection);
    }
    for x in 0..h {
        if vcm.quotient.proj[section[x]] != x {
            return Err(CoreError::NotSection);
        }
        for y in 0..h {
            let expect = coset_cocycle(vcm, section, x, y);
            if vcm.cm.alpha[lifts[x * h + y]] != expect {
                return Err(CoreError::Invalid(format!(
                    "lift at ({x},{y}) does not project onto ψ(x)ψ(y)ψ(xy)⁻¹"
                )));
            }
        }
    }
    let chat = |x: usize, y: usize| lifts[x * h + y];
    let mut omega = Cochain::zero(&vcm.t_action, 3);
    for x in 1..h {
        for y in 1..h {
            for z in 1..h {
                let xy = hq.mul(x, y);
                let yz = hq.mul(y, z);
                let lhs = nhat.mul(vcm.cm.shat[section[x]][chat(y, z)], chat(x, yz));
                let rhs = nhat.mul(chat(x, y), chat(xy, z));
                let w = nhat.mul(nhat.inv(rhs), lhs);
                if !vcm.kernel.contains(&w) {
                    return Err(CoreError::Invalid(
                        "characteristic cochain left the kernel".into(),
                    ));
                }
                omega.set(&[x, y, z], vcm.z_coords(w).clone());
            }
        }
    }
    if !omega.is_cocycle() {
        return Err(CoreError::Invalid("characteristic cochain is not closed".into()));
    }
    let witness = omega.coboundary_witness();
    let h3 = crate::cochain::cohomology(&vcm.t_action, 3, limits)?;
    Ok(CharacteristicClass {
        class_zero: witness.is_some(),
        omega,
        witness,
        h3_factors: h3.factors,
    })
}

/// Random admissible section and lift choices, for independence checks.
pub fn random_choices<R: Rng>(
    vcm: &ValidatedCrossedModule,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    let h = vcm.quotient.quotient.order();
    let go = vcm.cm.g.order();
    let mut section = vec![0usize; h];
    for x in 1..h {
        let coset: Vec<usize> = (0..go).filter(|&g| vcm.quotient.proj[g] == x).collect();
        section[x] = coset[rng.gen_range(0..coset.len())];
    }
    let mut lifts = vec![0usize; h * h];
    for x in 1..h {
        for y in 1..h {
            let c = coset_cocycle(vcm, &section, x, y);
            let pre: Vec<usize> = (0..vcm.cm.nhat.order())
                .filter(|&n| vcm.cm.alpha[n] == c)
                .collect();
            lifts[x * h + y] = pre[rng.gen_range(0..pre.len())];
        }
    }
    (section, lifts)
}

/// A structural cocycle (f, σ): α ∘ f = δ_σ and d_{Ŝ∘σ} f = 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StructuralCocycle {
    /// σ: H → G, normalized section
    pub sigma: Vec<usize>,
    /// f: H² → N̂, normalized, row-major
    pub f: Vec<usize>,
}

/// All structural cocycles of the crossed module (raw, before orbits).
pub fn all_structural_cocycles(
    vcm: &ValidatedCrossedModule,
    limits: &Limits,
) -> Result<Vec<StructuralCocycle>, CoreError> {
    let h = vcm.quotient.quotient.order();
    let go = vcm.cm.g.order();
    let zn = vcm.kernel.len();
    let free_slots = (h - 1) * (h - 1);
    let sections_count = (vcm.image.len() as u128).pow(h.saturating_sub(1) as u32);
    let lift_count = (zn as u128).checked_pow(free_slots as u32).unwrap_or(u128::MAX);
    let total = sections_count.checked_mul(lift_count).unwrap_or(u128::MAX);
    if total > limits.search_bound {
        return Err(CoreError::EnumerationBound(format!(
            "structural cocycle enumeration needs {total} candidates"
        )));
    }
    let cosets: Vec<Vec<usize>> = (0..h)
        .map(|x| (0..go).filter(|&g| vcm.quotient.proj[g] == x).collect())
        .collect();
    let mut out = Vec::new();
    let mut section = vec![0usize; h];
    enumerate_sections(vcm, &cosets, 1, &mut section, &mut out);
    Ok(out)
}

fn enumerate_sections(
    vcm: &ValidatedCrossedModule,
    cosets: &[Vec<usize>],
    x: usize,
    section: &mut Vec<usize>,
    out: &mut Vec<StructuralCocycle>,
) {
    let h = vcm.quotient.quotient.order();
    if x >= h {
        collect_lifts(vcm, section, out);
        return;
    }
    for i in 0..cosets[x].len() {
        section[x] = cosets[x][i];
        enumerate_sections(vcm, cosets, x + 1, section, out);
    }
}

fn collect_lifts(vcm: &ValidatedCrossedModule, section: &[usize], out: &mut Vec<StructuralCocycle>) {
    let h = vcm.quotient.quotient.order();
    let nhat = &vcm.cm.nhat;
    let mut slots: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for x in 1..h {
        for y in 1..h {
            let c = coset_cocycle(vcm, section, x, y);
            let pre: Vec<usize> = (0..nhat.order())
                .filter(|&n| vcm.cm.alpha[n] == c)
                .collect();
            slots.push((x, y, pre));
        }
    }
    fn rec(
        vcm: &ValidatedCrossedModule,
        section: &[usize],
        slots: &[(usize, usize, Vec<usize>)],
        idx: usize,
        f: &mut Vec<usize>,
        out: &mut Vec<StructuralCocycle>,
    ) {
        let h = vcm.quotient.quotient.order();
        if idx == slots.len() {
            if structural_identity_holds(vcm, section, f) {
                out.push(StructuralCocycle { sigma: section.to_vec(), f: f.clone() });
            }
            return;
        }
        let (x, y, ref pre) = slots[idx];
        for &cand in pre {
            f[x * h + y] = cand;
            rec(vcm, section, slots, idx + 1, f, out);
        }
        f[x * h + y] = 0;
    }
    let mut f = vec![0usize; h * h];
    rec(vcm, section, &slots, 0, &mut f, out);
}

/// d_{Ŝ∘σ} f = 1: Ŝ(σ(x))(f(y,z)) f(x,yz) = f(x,y) f(xy,z).
pub fn structural_identity_holds(
    vcm: &ValidatedCrossedModule,
    section: &[usize],
    f: &[usize],
) -> bool {
    let h = vcm.quotient.quotient.order();
    let hq = &vcm.quotient.quotient;
    let nhat = &vcm.cm.nhat;
    for x in 0..h {
        for y in 0..h {
            for z in 0..h {
                let lhs = nhat.mul(
                    vcm.cm.shat[section[x]][f[y * h + z]],
                    f[x * h + hq.mul(y, z)],
                );
                let rhs = nhat.mul(f[x * h + y], f[hq.mul(x, y) * h + z]);
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// c.(f, σ) = (c ∗_{Ŝ∘σ} f, (α∘c)·σ) for c ∈ C¹(H, N̂), the orbit move of
/// the equivalence of extensions.
pub fn act_by_cochain(
    vcm: &ValidatedCrossedModule,
    c: &[usize],
    sc: &StructuralCocycle,
) -> StructuralCocycle {
    let h = vcm.quotient.quotient.order();
    let hq = &vcm.quotient.quotient;
    let nhat = &vcm.cm.nhat;
    let g = &vcm.cm.g;
    let mut sigma = vec![0usize; h];
    for x in 0..h {
        sigma[x] = g.mul(vcm.cm.alpha[c[x]], sc.sigma[x]);
    }
    let mut f = vec![0usize; h * h];
    for x in 0..h {
        for y in 0..h {
            let xy = hq.mul(x, y);
            // c(x) · Ŝ(σ(x))(c(y)) · f(x,y) · c(xy)⁻¹
            let mut v = nhat.mul(c[x], vcm.cm.shat[sc.sigma[x]][c[y]]);
            v = nhat.mul(v, sc.f[x * h + y]);
            v = nhat.mul(v, nhat.inv(c[xy]));
            f[x * h + y] = v;
        }
    }
    StructuralCocycle { sigma, f }
}

/// Orbit representatives of the structural cocycles under C¹(H, N̂); empty
/// exactly when the crossed module is not extendable.
pub fn structural_orbits(
    vcm: &ValidatedCrossedModule,
    limits: &Limits,
) -> Result<Vec<StructuralCocycle>, CoreError> {
    let all = all_structural_cocycles(vcm, limits)?;
    let h = vcm.quotient.quotient.order();
    let nh = vcm.cm.nhat.order();
    let cochain_count = (nh as u128)
        .checked_pow(h.saturating_sub(1) as u32)
        .unwrap_or(u128::MAX);
    if cochain_count > limits.search_bound {
        return Err(CoreError::EnumerationBound(format!(
            "orbit enumeration needs {cochain_count} cochains"
        )));
    }
    let mut reps: Vec<StructuralCocycle> = Vec::new();
    let mut seen: HashMap<StructuralCocycle, ()> = HashMap::new();
    for sc in &all {
        if seen.contains_key(sc) {
            continue;
        }
        let mut orbit = vec![sc.clone()];
        let mut c = vec![0usize; h];
        loop {
            let mut k = 1;
            while k < h {
                c[k] += 1;
                if c[k] < nh {
                    break;
                }
                c[k] = 0;
                k += 1;
            }
            if k >= h {
                break;
            }
            orbit.push(act_by_cochain(vcm, &c, sc));
        }
        let rep = orbit.iter().min().unwrap().clone();
        for member in orbit {
            seen.insert(member, ());
        }
        reps.push(rep);
    }
    reps.sort();
    reps.dedup();
    Ok(reps)
}

/// Are two structural cocycles in the same C¹(H, N̂) orbit?
pub fn structurally_equivalent(
    vcm: &ValidatedCrossedModule,
    a: &StructuralCocycle,
    b: &StructuralCocycle,
    limits: &Limits,
) -> Result<bool, CoreError> {
    let h = vcm.quotient.quotient.order();
    let nh = vcm.cm.nhat.order();
    let count = (nh as u128)
        .checked_pow(h.saturating_sub(1) as u32)
        .unwrap_or(u128::MAX);
    if count > limits.search_bound {
        return Err(CoreError::EnumerationBound("orbit search too large".into()));
    }
    let mut c = vec![0usize; h];
    loop {
        if &act_by_cochain(vcm, &c, a) == b {
            return Ok(true);
        }
        let mut k = 1;
        while k < h {
            c[k] += 1;
            if c[k] < nh {
                break;
            }
            c[k] = 0;
            k += 1;
        }
        if k >= h {
            return Ok(false);
        }
    }
}

/// The extension Ĝ = N̂ ×_{(f,σ)} H with α̂(n, x) = α(n)σ(x), verified.
pub struct CrossedExtension {
    pub ext: ExtensionGroup,
    /// α̂ by Ĝ element index
    pub alpha_hat: Vec<usize>,
}

pub fn extension_from_structural(
    vcm: &ValidatedCrossedModule,
    sc: &StructuralCocycle,
) -> Result<CrossedExtension, CoreError> {
    let h = vcm.quotient.quotient.order();
    let act: Vec<Vec<usize>> = (0..h).map(|x| vcm.cm.shat[sc.sigma[x]].clone()).collect();
    let fs = FactorSystem::new(
        Arc::new(vcm.quotient.quotient.clone()),
        Arc::clone(&vcm.cm.nhat),
        act,
        sc.f.clone(),
    )?;
    let ext = build_extension(fs)?;
    let g = &vcm.cm.g;
    let alpha_hat: Vec<usize> = (0..ext.order())
        .map(|idx| {
            let n = ext.fiber_part(idx);
            let x = ext.q(idx);
            g.mul(vcm.cm.alpha[n], sc.sigma[x])
        })
        .collect();
    for a in 0..ext.order() {
        for b in 0..ext.order() {
            let ab = ext.group.mul(a, b);
            if alpha_hat[ab] != g.mul(alpha_hat[a], alpha_hat[b]) {
                return Err(CoreError::CrossedModule(
                    "induced map on the extension is not a homomorphism".into(),
                ));
            }
        }
    }
    let mut image: Vec<usize> = alpha_hat.clone();
    image.sort_unstable();
    image.dedup();
    if image.len() != g.order() {
        return Err(CoreError::CrossedModule("induced map is not surjective".into()));
    }
    let ker: Vec<usize> = (0..ext.order()).filter(|&i| alpha_hat[i] == 0).collect();
    if ker.len() != vcm.kernel.len() {
        return Err(CoreError::CrossedModule("kernel has the wrong order".into()));
    }
    // Ŝ ∘ α̂ must be conjugation on the copy of N̂ inside Ĝ
    for idx in 0..ext.order() {
        let target = alpha_hat[idx];
        for n in 0..vcm.cm.nhat.order() {
            let lhs = ext.embed_fiber(vcm.cm.shat[target][n]);
            let rhs = ext.group.conj(idx, ext.embed_fiber(n));
            if lhs != rhs {
                return Err(CoreError::CrossedModule(
                    "Ŝ ∘ α̂ is not the conjugation action".into(),
                ));
            }
        }
    }
    Ok(CrossedExtension { ext, alpha_hat })
}

/// [β].(f, σ) = (f·β, σ) for a T-twisted 2-cocycle β with values in Z.
pub fn h2_action(
    vcm: &ValidatedCrossedModule,
    beta: &Cochain,
    sc: &StructuralCocycle,
) -> Result<StructuralCocycle, CoreError> {
    if beta.degree != 2 {
        return Err(CoreError::DimensionMismatch("β must have degree 2".into()));
    }
    if !crate::lifting::actions_equal(&beta.action, &vcm.t_action) {
        return Err(CoreError::DimensionMismatch(
            "β must live over the T-action on ker α".into(),
        ));
    }
    if !beta.is_cocycle() {
        return Err(CoreError::NotCocycle("β is not a T-twisted cocycle".into()));
    }
    let h = vcm.quotient.quotient.order();
    let nhat = &vcm.cm.nhat;
    let mut f = sc.f.clone();
    for x in 0..h {
        for y in 0..h {
            let b = vcm.z_element(&beta.value(&[x, y]));
            f[x * h + y] = nhat.mul(f[x * h + y], b);
        }
    }
    Ok(StructuralCocycle { sigma: sc.sigma.clone(), f })
}

/// Phase-level lift data on a quotient group X: labels of the coset cocycle
/// as powers of one central base element, chosen lift phases, and the phase
/// produced by the section action on each lift.
#[derive(Debug, Clone)]
pub struct PhaseLiftData {
    pub x: Arc<FiniteGroup>,
    pub coeff: AbelianGroup,
    /// c: X² → exponents of the base element, row-major
    pub c_label: Vec<i128>,
    /// phases of the chosen lifts ĉ(x, y)
    pub chat_phase: Vec<Elt>,
    /// phase produced by Aut_{ψ(x)} on ĉ(y, z), indexed x·|X|² + y·|X| + z
    pub act_phase: Vec<Elt>,
}

impl PhaseLiftData {
    pub fn validate(&self) -> Result<(), CoreError> {
        let n = self.x.order();
        if self.c_label.len() != n * n
            || self.chat_phase.len() != n * n
            || self.act_phase.len() != n * n * n
        {
            return Err(CoreError::DimensionMismatch(
                "lift data tables have wrong sizes".into(),
            ));
        }
        for i in 0..n {
            if self.c_label[i] != 0 || self.c_label[i * n] != 0 {
                return Err(CoreError::Invalid("labels must be normalized".into()));
            }
        }
        // label-level form of the nonabelian cocycle property (the section
        // action fixes labels, shifting only phases)
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let lhs = self.c_label[y * n + z] + self.c_label[x * n + self.x.mul(y, z)];
                    let rhs = self.c_label[x * n + y] + self.c_label[self.x.mul(x, y) * n + z];
                    if lhs != rhs {
                        return Err(CoreError::NotCocycle(format!(
                            "labels break the nonabelian cocycle property at ({x},{y},{z})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The obstruction table Ω(x,y,z) = act(x; y,z) + ĉ-phase coboundary, with
/// closedness asserted and triviality decided by a coboundary solve over
/// the coefficient truncation.
pub struct ObstructionReport {
    pub omega: Cochain,
    pub class_zero: bool,
    pub witness: Option<Cochain>,
}

pub fn obstruction_from_liftdata(ld: &PhaseLiftData) -> Result<ObstructionReport, CoreError> {
    ld.validate()?;
    let n = ld.x.order();
    let module = ld.coeff.clone();
    let action = Arc::new(GAction::trivial(Arc::clone(&ld.x), module.clone()));
    let mut omega = Cochain::zero(&action, 3);
    for x in 1..n {
        for y in 1..n {
            for z in 1..n {
                let xy = ld.x.mul(x, y);
                let yz = ld.x.mul(y, z);
                let mut v = ld.act_phase[x * n * n + y * n + z].clone();
                v = module.add(&v, &ld.chat_phase[y * n + z]);
                v = module.add(&v, &ld.chat_phase[x * n + yz]);
                v = module.sub(&v, &ld.chat_phase[x * n + y]);
                v = module.sub(&v, &ld.chat_phase[xy * n + z]);
                omega.set(&[x, y, z], v);
            }
        }
    }
    if !omega.is_cocycle() {
        return Err(CoreError::NotCocycle("obstruction table is not closed".into()));
    }
    let witness = omega.coboundary_witness();
    Ok(ObstructionReport { class_zero: witness.is_some(), omega, witness })
}

/// The carry 2-cocycle on Z_p: β(x, y) = 1 exactly when x + y overflows.
pub fn carry_cocycle(p: usize) -> Vec<i128> {
    let mut beta = vec![0i128; p * p];
    for x in 0..p {
        for y in 0..p {
            beta[x * p + y] = if x + y >= p { 1 } else { 0 };
        }
    }
    beta
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// N̂ = Z_4 → G = Z_4 by doubling, Ŝ trivial.
    fn doubling() -> CrossedModule {
        let z4 = Arc::new(FiniteGroup::cyclic(4));
        let alpha = vec![0usize, 2, 0, 2];
        let shat = vec![(0..4).collect::<Vec<_>>(); 4];
        CrossedModule { nhat: Arc::clone(&z4), g: z4, alpha, shat }
    }

    #[test]
    fn conjugation_module_is_valid() {
        let g = Arc::new(FiniteGroup::cyclic(4));
        let cm = CrossedModule::conjugation(&g, &[0, 2]).unwrap();
        let v = cm.validate().unwrap();
        assert_eq!(v.kernel, vec![0]);
        assert_eq!(v.quotient.quotient.order(), 2);
    }

    #[test]
    fn doubling_module_derived_data() {
        let v = doubling().validate().unwrap();
        assert_eq!(v.image, vec![0, 2]);
        assert_eq!(v.kernel, vec![0, 2]);
        assert_eq!(v.quotient.quotient.order(), 2);
        assert_eq!(v.z_chart.shape.torsion, vec![2]);
        assert!(v.t_action.is_trivial());
    }

    #[test]
    fn violation_is_named() {
        let mut cm = doubling();
        cm.shat[1] = vec![0, 3, 2, 1];
        let err = cm.validate().unwrap_err();
        assert!(err.to_string().contains("Ŝ") || err.to_string().contains("CM"), "{err}");
    }

    #[test]
    fn doubling_characteristic_class_vanishes() {
        let v = doubling().validate().unwrap();
        let c = characteristic_class(&v, &Limits::default()).unwrap();
        assert!(c.class_zero);
    }

    #[test]
    fn trivial_quotient_trivial_class() {
        let g = Arc::new(FiniteGroup::cyclic(3));
        let cm = CrossedModule::conjugation(&g, &[0, 1, 2]).unwrap();
        let v = cm.validate().unwrap();
        let c = characteristic_class(&v, &Limits::default()).unwrap();
        assert!(c.class_zero);
        assert!(c.omega.is_zero());
    }

    #[test]
    fn class_independent_of_choices() {
        let v = doubling().validate().unwrap();
        let base = characteristic_class(&v, &Limits::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let (section, lifts) = random_choices(&v, &mut rng);
            let alt =
                characteristic_class_with(&v, &section, &lifts, &Limits::default()).unwrap();
            assert_eq!(alt.class_zero, base.class_zero);
            let diff = alt.omega.sub(&base.omega);
            assert!(diff.coboundary_witness().is_some());
        }
    }

    #[test]
    fn doubling_structural_orbits_match_h2() {
        let v = doubling().validate().unwrap();
        let orbits = structural_orbits(&v, &Limits::default()).unwrap();
        assert_eq!(orbits.len(), 2);
        let h2 = crate::cochain::cohomology(&v.t_action, 2, &Limits::default()).unwrap();
        assert_eq!(h2.order(), Some(2));
    }

    #[test]
    fn conjugation_has_single_orbit() {
        let g = Arc::new(FiniteGroup::cyclic(4));
        let cm = CrossedModule::conjugation(&g, &[0, 2]).unwrap();
        let v = cm.validate().unwrap();
        let orbits = structural_orbits(&v, &Limits::default()).unwrap();
        assert_eq!(orbits.len(), 1);
    }

    #[test]
    fn doubling_extensions_have_kernel_z() {
        let v = doubling().validate().unwrap();
        let orbits = structural_orbits(&v, &Limits::default()).unwrap();
        for sc in &orbits {
            let ce = extension_from_structural(&v, sc).unwrap();
            assert_eq!(ce.ext.order(), 8);
            let ker: Vec<usize> = (0..8).filter(|&i| ce.alpha_hat[i] == 0).collect();
            assert_eq!(ker.len(), 2);
        }
    }

    #[test]
    fn corrupted_structural_rejected() {
        let v = doubling().validate().unwrap();
        let orbits = structural_orbits(&v, &Limits::default()).unwrap();
        let mut sc = orbits[0].clone();
        sc.f[3] = v.cm.nhat.mul(sc.f[3], 1);
        assert!(extension_from_structural(&v, &sc).is_err());
    }

    #[test]
    fn h2_action_free_and_transitive_on_doubling() {
        let v = doubling().validate().unwrap();
        let orbits = structural_orbits(&v, &Limits::default()).unwrap();
        let h2 = crate::cochain::cohomology(&v.t_action, 2, &Limits::default()).unwrap();
        let zero = Cochain::zero(&v.t_action, 2);
        let gen = h2.generators[0].clone();
        let base = &orbits[0];
        let moved = h2_action(&v, &gen, base).unwrap();
        let same = h2_action(&v, &zero, base).unwrap();
        assert!(structurally_equivalent(&v, base, &same, &Limits::default()).unwrap());
        assert!(!structurally_equivalent(&v, base, &moved, &Limits::default()).unwrap());
        let back = h2_action(&v, &gen, &moved).unwrap();
        assert!(structurally_equivalent(&v, base, &back, &Limits::default()).unwrap());
    }

    #[test]
    fn liftdata_trivial_action_gives_zero() {
        let x = Arc::new(FiniteGroup::cyclic(3));
        let coeff = AbelianGroup::cyclic(3);
        let n = 3;
        let beta = carry_cocycle(3);
        let ld = PhaseLiftData {
            x,
            coeff: coeff.clone(),
            c_label: beta,
            chat_phase: vec![coeff.zero(); n * n],
            act_phase: vec![coeff.zero(); n * n * n],
        };
        let rep = obstruction_from_liftdata(&ld).unwrap();
        assert!(rep.omega.is_zero());
        assert!(rep.class_zero);
    }

    #[test]
    fn liftdata_z2_half_phase_is_nontrivial() {
        let x = Arc::new(FiniteGroup::cyclic(2));
        let coeff = AbelianGroup::cyclic(2);
        let n = 2;
        let beta = carry_cocycle(2);
        let mut act_phase = vec![coeff.zero(); n * n * n];
        for xx in 0..n {
            for y in 0..n {
                for z in 0..n {
                    act_phase[xx * n * n + y * n + z] =
                        coeff.canon(vec![xx as i128 * beta[y * n + z]]);
                }
            }
        }
        let ld = PhaseLiftData {
            x,
            coeff,
            c_label: beta,
            chat_phase: vec![vec![0]; n * n],
            act_phase,
        };
        let rep = obstruction_from_liftdata(&ld).unwrap();
        assert_eq!(rep.omega.value(&[1, 1, 1]), vec![1]);
        assert!(!rep.class_zero);
    }

    #[test]
    fn liftdata_class_survives_phase_rechoice() {
        let x = Arc::new(FiniteGroup::cyclic(2));
        let coeff = AbelianGroup::cyclic(2);
        let n = 2;
        let beta = carry_cocycle(2);
        let mut act_phase = vec![coeff.zero(); n * n * n];
        for xx in 0..n {
            for y in 0..n {
                for z in 0..n {
                    act_phase[xx * n * n + y * n + z] =
                        coeff.canon(vec![xx as i128 * beta[y * n + z]]);
                }
            }
        }
        let mut chat = vec![vec![0i128]; n * n];
        chat[3] = vec![1];
        let ld = PhaseLiftData { x, coeff, c_label: beta, chat_phase: chat, act_phase };
        let rep = obstruction_from_liftdata(&ld).unwrap();
        assert!(!rep.class_zero);
    }

    #[test]
    fn liftdata_rejects_bad_labels() {
        let x = Arc::new(FiniteGroup::cyclic(3));
        let coeff = AbelianGroup::cyclic(3);
        let mut labels = carry_cocycle(3);
        labels[4] = 1; // β(1,1) = 1 breaks the identity at (1,1,2)
        let ld = PhaseLiftData {
            x,
            coeff: coeff.clone(),
            c_label: labels,
            chat_phase: vec![coeff.zero(); 9],
            act_phase: vec![coeff.zero(); 27],
        };
        assert!(matches!(obstruction_from_liftdata(&ld), Err(CoreError::NotCocycle(_))));
    }
}
