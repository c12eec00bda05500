//! The degree-2 to degree-3 transgression: from an invariant cocycle f on
//! N ⊴ G with H¹(N, A) = 0, build the group Γ of lifted automorphisms as an
//! extension of G by Z¹(N, A), form the crossed module α: Â → Γ, and read
//! off its characteristic class in H³(G/N, A^N). The class vanishes exactly
//! when the extension Â of N prolongs to an extension of G, and the
//! prolongations are counted by H²(G/N, A^N).

use crate::action::GAction;
use crate::cochain::{cohomology, free_tuples, tuple_index, Cochain, DifferentialStencil};
use crate::crossed::{characteristic_class, CrossedModule};
use crate::error::CoreError;
use crate::extension::abelian_extension;
use crate::group::FiniteGroup;
use crate::intlin::{self, IntMat};
use crate::lifting::{
    invariance_witness, lifted_automorphism, psi_embed, psi_extract, theta_defect, z1_module,
    FiberedAutomorphism, LiftingInstance,
};
use crate::Limits;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Result of the transgression pipeline.
pub enum TransgressOutcome {
    /// the hypothesis H¹(N, A) = 0 fails
    H1Nonzero,
    /// f admits no invariance witness
    NotInvariant,
    Class(TauClass),
}

pub struct TauClass {
    /// representative cocycle over the induced action on ker α ≅ A^N
    pub omega: Cochain,
    pub class_zero: bool,
    pub h3_factors: Vec<i128>,
}

/// Run the whole pipeline on a lifting instance.
pub fn transgress(inst: &LiftingInstance, limits: &Limits) -> Result<TransgressOutcome, CoreError> {
    let h1 = cohomology(&inst.sub_action, 1, limits)?;
    if !h1.is_trivial() {
        return Ok(TransgressOutcome::H1Nonzero);
    }
    let Some(theta) = invariance_witness(inst)? else {
        return Ok(TransgressOutcome::NotInvariant);
    };
    let z1 = z1_module(inst)?;
    if !z1.action.module.is_finite() {
        return Err(CoreError::ResourceLimit(
            "transgression needs a finite coefficient module".into(),
        ));
    }
    let order = inst.action.group.order();

    // the extension Γ = Z¹(N,A) ×_{(S_ψ, d_{S_ψ}θ)} G
    let mut omega_bar = Cochain::zero(&z1.action, 2);
    for g in 1..order {
        for h in 1..order {
            let z = theta_defect(inst, &theta, g, h);
            let coords = z1
                .to_coords(&z.flatten())
                .ok_or_else(|| CoreError::Invalid("defect left the cocycle lattice".into()))?;
            omega_bar.set(&[g, h], coords);
        }
    }
    let gamma = abelian_extension(&omega_bar)?;

    // ψ̂_θ(g) for every g
    let mut psi_hat = Vec::with_capacity(order);
    for g in 0..order {
        psi_hat.push(lifted_automorphism(inst, &theta, g)?);
    }

    // α(a, n) = (c_{(a,n)} ψ̂_θ(i(n))⁻¹ read as a Z¹ element, i(n))
    let ahat_group = &inst.ahat.ext.group;
    let total = ahat_group.order();
    let mut alpha = Vec::with_capacity(total);
    for idx in 0..total {
        let n = inst.ahat.ext.q(idx);
        let g_n = inst.normal.elements[n];
        // conjugation by (a, n) as a permutation of Â
        let conj_perm: Vec<usize> = (0..total).map(|x| ahat_group.conj(idx, x)).collect();
        let conj = FiberedAutomorphism::from_perm(&inst.ahat, conj_perm)?;
        let residual = conj.compose(&psi_hat[g_n].inverse(&inst.ahat), &inst.ahat);
        let z = psi_extract(&residual, &inst.ahat);
        let coords = z1
            .to_coords(&z.flatten())
            .ok_or_else(|| CoreError::Invalid("conjugation residual is not in Z¹".into()))?;
        alpha.push(gamma.pair_coords(&coords, g_n));
    }

    // Ŝ(z, g) = Ψ(z) ∘ ψ̂_θ(g) acting on Â
    let gamma_total = gamma.ext.order();
    let mut shat = Vec::with_capacity(gamma_total);
    for idx in 0..gamma_total {
        let g = gamma.ext.q(idx);
        let z_coords = gamma.coords_of(gamma.ext.fiber_part(idx)).clone();
        let ambient = z1.to_ambient(&z_coords, free_tuples(inst.normal.sub.order(), 1) * inst.action.module.dim());
        let z_cochain = Cochain::from_flat(&inst.sub_action, 1, &ambient);
        let psi_z = psi_embed(&z_cochain, &inst.ahat)?;
        let combined = psi_z.compose(&psi_hat[g], &inst.ahat);
        shat.push(combined.perm);
    }

    let cm = CrossedModule {
        nhat: Arc::clone(ahat_group),
        g: Arc::clone(&gamma.ext.group),
        alpha,
        shat,
    };
    let vcm = cm.validate()?;

    // ker α must be exactly A^N sitting inside the fiber of Â
    let fix = inst.sub_action.fixed_submodule();
    let expected: Vec<usize> = (0..inst.ahat.fiber_elems.len())
        .filter(|&ai| {
            let coords = inst.ahat.coords_of(ai);
            intlin::express_in_basis(&fix.basis, &fix.relations, coords).is_some()
        })
        .map(|ai| inst.ahat.ext.embed_fiber(ai))
        .collect();
    let mut got = vcm.kernel.clone();
    got.sort_unstable();
    let mut want = expected;
    want.sort_unstable();
    if got != want {
        return Err(CoreError::Invalid(
            "kernel of the crossed module differs from the invariant submodule".into(),
        ));
    }
    // Γ / α(Â) has the order of G/N
    let h_order = inst.action.group.order() / inst.normal.elements.len();
    if vcm.quotient.quotient.order() != h_order {
        return Err(CoreError::Invalid(
            "quotient of the lifted-automorphism group has the wrong order".into(),
        ));
    }

    let class = characteristic_class(&vcm, limits)?;
    Ok(TransgressOutcome::Class(TauClass {
        omega: class.omega,
        class_zero: class.class_zero,
        h3_factors: class.h3_factors,
    }))
}

/// The constraint system for prolongations: dF ≡ 0 and F restricted to
/// N × N equal to f (on the nose). Returns (matrix, row moduli, rhs).
fn prolongation_system(inst: &LiftingInstance) -> (IntMat, Vec<i128>, Vec<i128>) {
    let action = &inst.action;
    let n_amb = action.group.order();
    let d = action.module.dim();
    let moduli = action.module.moduli();
    let st2 = DifferentialStencil::new(action, 2);
    let dmat = st2.matrix();
    let dmoduli = st2.out_moduli();
    let unknowns = free_tuples(n_amb, 2) * d;

    let mut rows: Vec<Vec<i128>> = Vec::new();
    let mut row_moduli: Vec<i128> = Vec::new();
    let mut rhs: Vec<i128> = Vec::new();
    for r in 0..dmat.rows {
        rows.push((0..dmat.cols).map(|c| dmat[(r, c)]).collect());
        row_moduli.push(dmoduli[r]);
        rhs.push(0);
    }
    let k = inst.normal.sub.order();
    for n1 in 1..k {
        for n2 in 1..k {
            let g1 = inst.normal.elements[n1];
            let g2 = inst.normal.elements[n2];
            let t = tuple_index(&[g1, g2], n_amb);
            let val = inst.f.value(&[n1, n2]);
            for c in 0..d {
                let mut row = vec![0i128; unknowns];
                row[t * d + c] = 1;
                rows.push(row);
                row_moduli.push(moduli[c]);
                rhs.push(val[c]);
            }
        }
    }
    (IntMat::from_rows(&rows), row_moduli, rhs)
}

/// Search for F ∈ Z²(G, A) with F|_{N×N} = f; the found extension is
/// verified to contain Â through (a, n) ↦ (a, i(n)).
pub fn prolongation_search(inst: &LiftingInstance) -> Result<Option<Cochain>, CoreError> {
    if !inst.action.module.is_finite() {
        return Err(CoreError::ResourceLimit("prolongation search needs a finite module".into()));
    }
    let (mat, row_moduli, rhs) = prolongation_system(inst);
    let Some(x) = intlin::solve_bounded(&mat, &rhs, &row_moduli) else {
        return Ok(None);
    };
    let big_f = Cochain::from_flat(&inst.action, 2, &x);
    debug_assert!(big_f.is_cocycle());
    // verify the restriction and the subgroup embedding
    let k = inst.normal.sub.order();
    for n1 in 1..k {
        for n2 in 1..k {
            let g1 = inst.normal.elements[n1];
            let g2 = inst.normal.elements[n2];
            if big_f.value(&[g1, g2]) != inst.f.value(&[n1, n2]) {
                return Err(CoreError::Invalid("prolongation restriction mismatch".into()));
            }
        }
    }
    let ghat = abelian_extension(&big_f)?;
    let ahat = &inst.ahat;
    for x1 in 0..ahat.ext.order() {
        for x2 in 0..ahat.ext.order() {
            let prod = ahat.ext.group.mul(x1, x2);
            let embed = |x: usize| {
                let n = ahat.ext.q(x);
                let a = ahat.coords_of(ahat.ext.fiber_part(x));
                ghat.pair_coords(a, inst.normal.elements[n])
            };
            if ghat.ext.group.mul(embed(x1), embed(x2)) != embed(prod) {
                return Err(CoreError::Invalid(
                    "extension does not contain the fiber extension".into(),
                ));
            }
        }
    }
    Ok(Some(big_f))
}

/// The relaxed reading: F restricted to N × N equal to f only up to an
/// exact coboundary d_N h. Returns feasibility only.
pub fn prolongation_search_up_to_equiv(inst: &LiftingInstance) -> Result<bool, CoreError> {
    let action = &inst.action;
    let n_amb = action.group.order();
    let d = action.module.dim();
    let moduli = action.module.moduli();
    let st2 = DifferentialStencil::new(action, 2);
    let dmat = st2.matrix();
    let dmoduli = st2.out_moduli();
    let f_unknowns = free_tuples(n_amb, 2) * d;
    let sub_st = DifferentialStencil::new(&inst.sub_action, 1);
    let bmat = sub_st.matrix();
    let h_unknowns = bmat.cols;
    let k = inst.normal.sub.order();

    let mut rows: Vec<Vec<i128>> = Vec::new();
    let mut row_moduli: Vec<i128> = Vec::new();
    let mut rhs: Vec<i128> = Vec::new();
    for r in 0..dmat.rows {
        let mut row = vec![0i128; f_unknowns + h_unknowns];
        for c in 0..dmat.cols {
            row[c] = dmat[(r, c)];
        }
        rows.push(row);
        row_moduli.push(dmoduli[r]);
        rhs.push(0);
    }
    for n1 in 1..k {
        for n2 in 1..k {
            let g1 = inst.normal.elements[n1];
            let g2 = inst.normal.elements[n2];
            let t_amb = tuple_index(&[g1, g2], n_amb);
            let t_sub = tuple_index(&[n1, n2], k);
            let val = inst.f.value(&[n1, n2]);
            for c in 0..d {
                let mut row = vec![0i128; f_unknowns + h_unknowns];
                row[t_amb * d + c] = 1;
                for hc in 0..h_unknowns {
                    row[f_unknowns + hc] = -bmat[(t_sub * d + c, hc)];
                }
                rows.push(row);
                row_moduli.push(moduli[c]);
                rhs.push(val[c]);
            }
        }
    }
    Ok(intlin::solve_bounded(&IntMat::from_rows(&rows), &rhs, &row_moduli).is_some())
}

/// Number of prolongations up to equivalences fixing Â pointwise: the order
/// of the homogeneous solution group divided by the order of the group of
/// coboundaries dc with c vanishing on N.
pub fn count_prolongations(inst: &LiftingInstance) -> Result<u128, CoreError> {
    if !inst.action.module.is_finite() {
        return Err(CoreError::ResourceLimit("counting needs a finite module".into()));
    }
    let (mat, row_moduli, _) = prolongation_system(inst);
    let action = &inst.action;
    let n_amb = action.group.order();
    let d = action.module.dim();
    let moduli = action.module.moduli();
    let col_moduli: Vec<i128> = (0..free_tuples(n_amb, 2))
        .flat_map(|_| moduli.iter().copied())
        .collect();
    let k_order = intlin::solution_group_order(&mat, &row_moduli, &col_moduli);

    // the group of coboundaries dc over c ∈ C¹(G, A) with c|_N = 0: its
    // order is |domain| / |kernel of d on that domain|
    let st1 = DifferentialStencil::new(action, 1);
    let bmat = st1.matrix();
    let allowed: Vec<usize> = (1..n_amb)
        .filter(|g| !inst.normal.elements.contains(g))
        .collect();
    if allowed.is_empty() {
        return Ok(k_order); // N = G: no equivalences beyond the identity
    }
    let mut restricted = IntMat::zeros(bmat.rows, allowed.len() * d);
    let mut dom_moduli = Vec::with_capacity(allowed.len() * d);
    for (ai, &g) in allowed.iter().enumerate() {
        let t = tuple_index(&[g], n_amb);
        for c in 0..d {
            for r in 0..bmat.rows {
                restricted[(r, ai * d + c)] = bmat[(r, t * d + c)];
            }
            dom_moduli.push(moduli[c]);
        }
    }
    let domain: u128 = dom_moduli.iter().map(|&m| m as u128).product();
    let kernel = intlin::solution_group_order(&restricted, &col_moduli, &dom_moduli);
    let d_order = domain / kernel;
    Ok(k_order / d_order)
}

/// |H²(G/N, A^N)| with the induced action of the quotient on the invariant
/// submodule.
pub fn h2_quotient_invariants(inst: &LiftingInstance, limits: &Limits) -> Result<u128, CoreError> {
    let (t_action, _) = quotient_action_on_invariants(inst)?;
    let h2 = cohomology(&t_action, 2, limits)?;
    h2.order()
        .ok_or_else(|| CoreError::Invalid("H² of the quotient is infinite".into()))
}

/// The quotient H = G/N acting on A^N, expressed on the invariant factors
/// of the fixed submodule. Also returns the chart (basis) used.
pub fn quotient_action_on_invariants(
    inst: &LiftingInstance,
) -> Result<(Arc<GAction>, crate::action::FixedSubmodule), CoreError> {
    let fix = inst.sub_action.fixed_submodule();
    let q = crate::group::quotient(&inst.action.group, &inst.normal.elements)?;
    let shape = AbelianShape::from_presentation(&fix.presentation);
    let d = shape.module.dim();
    let h_grp = Arc::new(q.quotient.clone());
    let mut matrices = Vec::with_capacity(q.quotient.order());
    for h in 0..q.quotient.order() {
        let rep = q.section[h];
        let mut m = IntMat::zeros(d, d);
        for (col, gen) in shape.generators.iter().enumerate() {
            let img = inst.action.apply(rep, gen);
            let coords =
                intlin::express_in_basis(&shape.generators, &fix.relations, &img).ok_or_else(
                    || CoreError::Invalid("quotient action does not preserve the invariants".into()),
                )?;
            for row in 0..d {
                m[(row, col)] = coords[row];
            }
        }
        matrices.push(m);
    }
    let action = Arc::new(GAction::new(h_grp, shape.module, matrices)?);
    Ok((action, fix))
}

struct AbelianShape {
    module: crate::abelian::AbelianGroup,
    generators: Vec<Vec<i128>>,
}

impl AbelianShape {
    fn from_presentation(pres: &intlin::Presentation) -> Self {
        let mut gens_free = Vec::new();
        let mut gens_tor = Vec::new();
        let mut torsion = Vec::new();
        for (f, g) in pres.factors.iter().zip(&pres.generators) {
            if *f == 0 {
                gens_free.push(g.clone());
            } else {
                torsion.push(*f);
                gens_tor.push(g.clone());
            }
        }
        let module = crate::abelian::AbelianGroup { rank: gens_free.len(), torsion };
        let generators = gens_free.into_iter().chain(gens_tor).collect();
        AbelianShape { module, generators }
    }
}

/// Catalog of ambient groups used by the randomized instance generator.
pub fn group_catalog() -> Vec<(String, Arc<FiniteGroup>)> {
    let z = |m: usize| Arc::new(FiniteGroup::cyclic(m));
    vec![
        ("Z2".into(), z(2)),
        ("Z3".into(), z(3)),
        ("Z4".into(), z(4)),
        ("Z6".into(), z(6)),
        ("Z8".into(), z(8)),
        ("V4".into(), Arc::new(FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)))),
        ("Z2xZ4".into(), Arc::new(FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(4)))),
        ("S3".into(), Arc::new(FiniteGroup::dihedral(3))),
        ("D4".into(), Arc::new(FiniteGroup::dihedral(4))),
        ("Q8".into(), Arc::new(FiniteGroup::quaternion())),
    ]
}

pub fn module_catalog() -> Vec<(String, crate::abelian::AbelianGroup)> {
    use crate::abelian::AbelianGroup;
    vec![
        ("Z2".into(), AbelianGroup::cyclic(2)),
        ("Z3".into(), AbelianGroup::cyclic(3)),
        ("Z4".into(), AbelianGroup::cyclic(4)),
        ("Z6".into(), AbelianGroup::cyclic(6)),
        ("Z9".into(), AbelianGroup::cyclic(9)),
        ("Z2xZ2".into(), AbelianGroup::new(0, vec![2, 2]).unwrap()),
    ]
}

/// Every action of `group` on the finite module (all homomorphisms into its
/// automorphism group), found by enumerating automorphism matrices and
/// backtracking over generator images.
pub fn all_actions(
    group: &Arc<FiniteGroup>,
    module: &crate::abelian::AbelianGroup,
    limit: usize,
) -> Vec<Arc<GAction>> {
    let d = module.dim();
    let moduli = module.moduli();
    // candidate automorphism matrices: entries bounded by the row modulus
    let mut entry_ranges: Vec<i128> = Vec::new();
    for r in 0..d {
        for _ in 0..d {
            entry_ranges.push(moduli[r].max(1));
        }
    }
    let total: u128 = entry_ranges.iter().map(|&m| m as u128).product();
    if total > 1_000_000 {
        return vec![Arc::new(GAction::trivial(Arc::clone(group), module.clone()))];
    }
    let mut auto_mats: Vec<IntMat> = Vec::new();
    let mut idx = vec![0i128; d * d];
    loop {
        let mut m = IntMat::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] = idx[r * d + c];
            }
        }
        // must respect congruences and be invertible
        if matrix_respects_module(module, &m)
            && crate::lifting::invert_module_matrix(module, &m).is_ok()
        {
            auto_mats.push(m);
        }
        // odometer
        let mut k = 0;
        while k < d * d {
            idx[k] += 1;
            if idx[k] < entry_ranges[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == d * d {
            break;
        }
        if auto_mats.len() > limit * 64 {
            break;
        }
    }
    // homomorphisms G → Aut(A) via images of a generating set
    let mut gens: Vec<usize> = Vec::new();
    let mut span = vec![0usize];
    while span.len() < group.order() {
        let next = (1..group.order()).find(|x| !span.contains(x)).unwrap();
        gens.push(next);
        span = group.generated_subgroup(&gens);
    }
    let mut out: Vec<Arc<GAction>> = Vec::new();
    let mut images: Vec<usize> = vec![0; gens.len()];
    loop {
        // build candidate action by closing over products
        let mut mats: Vec<Option<IntMat>> = vec![None; group.order()];
        mats[0] = Some(IntMat::identity(d));
        let mut ok = true;
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for (gi, &g) in gens.iter().enumerate() {
                let y = group.mul(x, g);
                let candidate = mats[x].as_ref().unwrap().matmul(&auto_mats[images[gi]]);
                match &mats[y] {
                    None => {
                        mats[y] = Some(candidate);
                        frontier.push(y);
                    }
                    Some(existing) => {
                        if !same_matrix_on_module(module, existing, &candidate) {
                            ok = false;
                        }
                    }
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            let mats: Vec<IntMat> = mats.into_iter().map(|m| m.unwrap()).collect();
            if let Ok(act) = GAction::new(Arc::clone(group), module.clone(), mats) {
                if !out.iter().any(|a| crate::lifting::actions_equal(a, &act)) {
                    out.push(Arc::new(act));
                }
            }
        }
        if out.len() >= limit {
            break;
        }
        let mut k = 0;
        while k < gens.len() {
            images[k] += 1;
            if images[k] < auto_mats.len() {
                break;
            }
            images[k] = 0;
            k += 1;
        }
        if k == gens.len() || gens.is_empty() {
            break;
        }
    }
    if out.is_empty() {
        out.push(Arc::new(GAction::trivial(Arc::clone(group), module.clone())));
    }
    out
}

fn matrix_respects_module(module: &crate::abelian::AbelianGroup, m: &IntMat) -> bool {
    let d = module.dim();
    let moduli = module.moduli();
    for c in 0..d {
        if moduli[c] == 0 {
            continue;
        }
        for r in 0..d {
            let v = m[(r, c)] * moduli[c];
            let ok = if moduli[r] == 0 { v == 0 } else { v % moduli[r] == 0 };
            if !ok {
                return false;
            }
        }
    }
    true
}

fn same_matrix_on_module(module: &crate::abelian::AbelianGroup, a: &IntMat, b: &IntMat) -> bool {
    let d = module.dim();
    (0..d).all(|c| {
        let mut e = module.zero();
        e[c] = 1;
        module.canon(a.mul_vec(&e)) == module.canon(b.mul_vec(&e))
    })
}

/// Randomized instances (G, N, A, S, f) with H¹(N, A) = 0, for the
/// transgression property suite.
pub fn generate_instances(seed: u64, want: usize, limits: &Limits) -> Vec<LiftingInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = group_catalog();
    let modules = module_catalog();
    let mut out: Vec<LiftingInstance> = Vec::new();
    let mut attempts = 0u32;
    while out.len() < want && attempts < 4000 {
        attempts += 1;
        let (_, g) = &groups[rng.gen_range(0..groups.len())];
        let subs = g.all_subgroups();
        let normals: Vec<&Vec<usize>> = subs
            .iter()
            .filter(|s| s.len() > 1 && s.len() < g.order() && g.is_normal(s))
            .collect();
        if normals.is_empty() {
            continue;
        }
        let normal = normals[rng.gen_range(0..normals.len())].clone();
        let (_, module) = &modules[rng.gen_range(0..modules.len())];
        let actions = all_actions(g, module, 8);
        let action = Arc::clone(&actions[rng.gen_range(0..actions.len())]);
        // need H¹(N, A|N) = 0 before bothering with f
        let Ok(nd) = crate::lifting::NormalData::new(&action.group, &normal) else {
            continue;
        };
        let sub_mats = nd.elements.iter().map(|&x| action.matrix(x).clone()).collect();
        let Ok(sub_action) = GAction::new(Arc::clone(&nd.sub), module.clone(), sub_mats) else {
            continue;
        };
        let sub_action = Arc::new(sub_action);
        let Ok(h1) = cohomology(&sub_action, 1, limits) else {
            continue;
        };
        if !h1.is_trivial() {
            continue;
        }
        let f = if rng.gen_bool(0.3) {
            Cochain::zero(&sub_action, 2)
        } else {
            Cochain::random_cocycle(&sub_action, 2, &mut rng)
        };
        if let Ok(inst) = LiftingInstance::new(Arc::clone(&action), &normal, &f) {
            out.push(inst);
        }
    }
    out.shuffle(&mut rng);
    out
}
