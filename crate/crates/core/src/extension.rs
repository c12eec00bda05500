//! Factor systems (S, ω) for a pair (G, N), the twisted-product extension
//! N ×_{(S,ω)} G, section-induced 2-cocycles, and equivalence testing for
//! abelian fibers.

use crate::abelian::Elt;
use crate::action::GAction;
use crate::cochain::Cochain;
use crate::error::CoreError;
use crate::group::FiniteGroup;
use std::collections::HashMap;
use std::sync::Arc;

/// Action-plus-cocycle data (S, ω) with S(g) automorphisms of the fiber and
/// ω a normalized fiber-valued 2-cochain on the base.
#[derive(Debug, Clone)]
pub struct FactorSystem {
    pub base: Arc<FiniteGroup>,
    pub fiber: Arc<FiniteGroup>,
    /// S(g) as a permutation of fiber indices, one per base element
    pub act: Vec<Vec<usize>>,
    /// ω(g, g') as fiber indices, row-major over base pairs
    pub omega: Vec<usize>,
}

impl FactorSystem {
    pub fn new(
        base: Arc<FiniteGroup>,
        fiber: Arc<FiniteGroup>,
        act: Vec<Vec<usize>>,
        omega: Vec<usize>,
    ) -> Result<Self, CoreError> {
        let fs = FactorSystem { base, fiber, act, omega };
        fs.validate()?;
        Ok(fs)
    }

    /// Trivial data: S ≡ id, ω ≡ 1, giving the direct product.
    pub fn trivial(base: Arc<FiniteGroup>, fiber: Arc<FiniteGroup>) -> Self {
        let id: Vec<usize> = (0..fiber.order()).collect();
        let act = vec![id; base.order()];
        let omega = vec![0usize; base.order() * base.order()];
        FactorSystem { base, fiber, act, omega }
    }

    #[inline]
    pub fn s(&self, g: usize, n: usize) -> usize {
        self.act[g][n]
    }

    #[inline]
    pub fn w(&self, g: usize, h: usize) -> usize {
        self.omega[g * self.base.order() + h]
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        let bn = self.base.order();
        let fo = self.fiber.order();
        if self.act.len() != bn || self.omega.len() != bn * bn {
            return Err(CoreError::FactorSystem("table sizes do not match the base".into()));
        }
        for (g, perm) in self.act.iter().enumerate() {
            if perm.len() != fo {
                return Err(CoreError::FactorSystem(format!("S({g}) has the wrong size")));
            }
            let mut seen = vec![false; fo];
            for &img in perm {
                if img >= fo || seen[img] {
                    return Err(CoreError::FactorSystem(format!("S({g}) is not a bijection")));
                }
                seen[img] = true;
            }
            for a in 0..fo {
                for b in 0..fo {
                    if perm[self.fiber.mul(a, b)] != self.fiber.mul(perm[a], perm[b]) {
                        return Err(CoreError::FactorSystem(format!(
                            "S({g}) is not an automorphism at pair ({a},{b})"
                        )));
                    }
                }
            }
        }
        if self.act[0] != (0..fo).collect::<Vec<_>>() {
            return Err(CoreError::FactorSystem("S(1) must be the identity".into()));
        }
        for g in 0..bn {
            if self.w(g, 0) != 0 || self.w(0, g) != 0 {
                return Err(CoreError::FactorSystem(format!(
                    "ω is not normalized at ({g},1)/(1,{g})"
                )));
            }
        }
        self.check_compatibility()?;
        self.check_cocycle()
    }

    /// δ_S(g,g') = S(g)S(g')S(gg')⁻¹ must equal conjugation by ω(g,g').
    fn check_compatibility(&self) -> Result<(), CoreError> {
        let bn = self.base.order();
        let fo = self.fiber.order();
        for g in 0..bn {
            for h in 0..bn {
                let gh = self.base.mul(g, h);
                let w = self.w(g, h);
                for n in 0..fo {
                    // S(g)(S(h)(n)) must equal ω · S(gh)(n) · ω⁻¹
                    let lhs = self.s(g, self.s(h, n));
                    let rhs = self.fiber.conj(w, self.s(gh, n));
                    if lhs != rhs {
                        return Err(CoreError::FactorSystem(format!(
                            "δ_S ≠ C∘ω at (g,g') = ({g},{h}), fiber element {n}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// d_Sω = 1: S(g)(ω(g',g'')) ω(g, g'g'') = ω(g,g') ω(gg', g'').
    fn check_cocycle(&self) -> Result<(), CoreError> {
        let bn = self.base.order();
        for g in 0..bn {
            for h in 0..bn {
                for k in 0..bn {
                    let lhs = self
                        .fiber
                        .mul(self.s(g, self.w(h, k)), self.w(g, self.base.mul(h, k)));
                    let rhs = self.fiber.mul(self.w(g, h), self.w(self.base.mul(g, h), k));
                    if lhs != rhs {
                        return Err(CoreError::FactorSystem(format!(
                            "d_Sω ≠ 1 at triple ({g},{h},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn invariants_hold(&self) -> bool {
        self.check_compatibility().is_ok() && self.check_cocycle().is_ok()
    }

    /// Raw multiplication table of N ×_{(S,ω)} G without any validation.
    pub fn raw_table(&self) -> Vec<Vec<usize>> {
        let bn = self.base.order();
        let fo = self.fiber.order();
        let total = bn * fo;
        let mut table = vec![vec![0usize; total]; total];
        for n1 in 0..fo {
            for g1 in 0..bn {
                let x = n1 * bn + g1;
                for n2 in 0..fo {
                    for g2 in 0..bn {
                        let y = n2 * bn + g2;
                        let n = self
                            .fiber
                            .mul(self.fiber.mul(n1, self.s(g1, n2)), self.w(g1, g2));
                        table[x][y] = n * bn + self.base.mul(g1, g2);
                    }
                }
            }
        }
        table
    }
}

/// The group N ×_{(S,ω)} G on index pairs (n, g) ↦ n·|G| + g, with the
/// fiber embedding n ↦ (n, 1), projection q, and canonical section g ↦ (1, g).
#[derive(Debug, Clone)]
pub struct ExtensionGroup {
    pub group: Arc<FiniteGroup>,
    pub fs: FactorSystem,
}

impl ExtensionGroup {
    #[inline]
    pub fn order(&self) -> usize {
        self.group.order()
    }

    #[inline]
    pub fn q(&self, x: usize) -> usize {
        x % self.fs.base.order()
    }

    #[inline]
    pub fn fiber_part(&self, x: usize) -> usize {
        x / self.fs.base.order()
    }

    #[inline]
    pub fn pair(&self, n: usize, g: usize) -> usize {
        n * self.fs.base.order() + g
    }

    /// canonical section σ(g) = (1_N, g)
    #[inline]
    pub fn sigma(&self, g: usize) -> usize {
        g
    }

    #[inline]
    pub fn embed_fiber(&self, n: usize) -> usize {
        self.pair(n, 0)
    }

    /// kernel of q as element indices
    pub fn kernel(&self) -> Vec<usize> {
        (0..self.fs.fiber.order()).map(|n| self.embed_fiber(n)).collect()
    }
}

/// Validate the factor system and build the verified extension group.
pub fn build_extension(fs: FactorSystem) -> Result<ExtensionGroup, CoreError> {
    fs.validate()?;
    let table = fs.raw_table();
    let group = Arc::new(FiniteGroup::from_table(table)?);
    let ext = ExtensionGroup { group, fs };
    debug_assert!({
        let g = &ext.group;
        (0..ext.order()).all(|x| (0..ext.order()).all(|y| ext.q(g.mul(x, y)) == ext.fs.base.mul(ext.q(x), ext.q(y))))
    });
    Ok(ext)
}

/// δ_σ(g,g') = σ(g)σ(g')σ(gg')⁻¹ for a normalized section; values are
/// returned as fiber indices.
pub fn section_cocycle(ext: &ExtensionGroup, sigma: &[usize]) -> Result<Vec<usize>, CoreError> {
    let bn = ext.fs.base.order();
    if sigma.len() != bn {
        return Err(CoreError::NotSection);
    }
    for (g, &s) in sigma.iter().enumerate() {
        if ext.q(s) != g {
            return Err(CoreError::NotSection);
        }
    }
    if sigma[0] != 0 {
        return Err(CoreError::NotSection);
    }
    let grp = &ext.group;
    let mut table = vec![0usize; bn * bn];
    for g in 0..bn {
        for h in 0..bn {
            let prod = grp.mul(sigma[g], sigma[h]);
            let d = grp.mul(prod, grp.inv(sigma[ext.fs.base.mul(g, h)]));
            debug_assert_eq!(ext.q(d), 0);
            table[g * bn + h] = ext.fiber_part(d);
        }
    }
    Ok(table)
}

/// An abelian extension A ×_{(S,f)} N together with the dictionary between
/// fiber indices and module coordinates.
#[derive(Debug, Clone)]
pub struct AbelianExtension {
    pub ext: ExtensionGroup,
    pub action: Arc<GAction>,
    pub f: Cochain,
    /// fiber index → canonical module coordinates
    pub fiber_elems: Vec<Elt>,
    /// canonical module coordinates → fiber index
    pub fiber_index: HashMap<Elt, usize>,
}

impl AbelianExtension {
    pub fn coords_of(&self, fiber_idx: usize) -> &Elt {
        &self.fiber_elems[fiber_idx]
    }

    pub fn index_of(&self, coords: &Elt) -> usize {
        self.fiber_index[&self.action.module.canon(coords.clone())]
    }

    /// pair (a, n) with module coordinates a
    pub fn pair_coords(&self, a: &Elt, n: usize) -> usize {
        self.ext.pair(self.index_of(a), n)
    }

    /// section-induced cocycle as a genuine module-valued cochain
    pub fn section_cochain(&self, sigma: &[usize]) -> Result<Cochain, CoreError> {
        let table = section_cocycle(&self.ext, sigma)?;
        let n = self.action.group.order();
        let mut c = Cochain::zero(&self.action, 2);
        for g in 1..n {
            for h in 1..n {
                c.set(&[g, h], self.coords_of(table[g * n + h]).clone());
            }
        }
        Ok(c)
    }
}

/// Build A ×_{(S|_N, f)} N from a degree-2 cochain over the action's group.
pub fn abelian_extension(f: &Cochain) -> Result<AbelianExtension, CoreError> {
    if f.degree != 2 {
        return Err(CoreError::DimensionMismatch("extension cocycle must have degree 2".into()));
    }
    if !f.is_cocycle() {
        return Err(CoreError::NotCocycle("df ≠ 0".into()));
    }
    let action = Arc::clone(&f.action);
    let module = &action.module;
    let (fiber_group, fiber_elems) = module
        .as_finite_group()
        .ok_or_else(|| CoreError::EnumerationBound("fiber module must be finite".into()))?;
    let fiber_index: HashMap<Elt, usize> = fiber_elems
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    let base = Arc::clone(&action.group);
    let bn = base.order();
    let act: Vec<Vec<usize>> = (0..bn)
        .map(|g| {
            fiber_elems
                .iter()
                .map(|e| fiber_index[&action.apply(g, e)])
                .collect()
        })
        .collect();
    let mut omega = vec![0usize; bn * bn];
    for g in 0..bn {
        for h in 0..bn {
            omega[g * bn + h] = fiber_index[&module.canon(f.value(&[g, h]))];
        }
    }
    let fs = FactorSystem::new(base, Arc::new(fiber_group), act, omega)?;
    let ext = build_extension(fs)?;
    Ok(AbelianExtension { ext, action, f: f.clone(), fiber_elems, fiber_index })
}

/// Conjugation factor system of a group E with chosen normal subgroup N:
/// S is conjugation by the canonical quotient section and ω its section
/// cocycle, so that E ≅ N ×_{(S,ω)} E/N.
pub fn factor_system_from_quotient(
    e: &Arc<FiniteGroup>,
    nsub: &[usize],
) -> Result<FactorSystem, CoreError> {
    let q = crate::group::quotient(e, nsub)?;
    let h = Arc::new(q.quotient.clone());
    let fo = nsub.len();
    let pos: HashMap<usize, usize> =
        nsub.iter().copied().enumerate().map(|(i, x)| (x, i)).collect();
    let mut table = vec![vec![0usize; fo]; fo];
    for (i, &a) in nsub.iter().enumerate() {
        for (j, &b) in nsub.iter().enumerate() {
            table[i][j] = pos[&e.mul(a, b)];
        }
    }
    let fiber = Arc::new(FiniteGroup::from_table(table)?);
    let act: Vec<Vec<usize>> = (0..h.order())
        .map(|x| {
            let rep = q.section[x];
            nsub.iter().map(|&n| pos[&e.conj(rep, n)]).collect()
        })
        .collect();
    let mut omega = vec![0usize; h.order() * h.order()];
    for x in 0..h.order() {
        for y in 0..h.order() {
            let prod = e.mul(q.section[x], q.section[y]);
            let rep = q.section[h.mul(x, y)];
            omega[x * h.order() + y] = pos[&e.mul(prod, e.inv(rep))];
        }
    }
    FactorSystem::new(h, fiber, act, omega)
}

/// Equivalence test for two abelian extensions over the same action: solves
/// f2 − f1 = dc and returns the witness 1-cochain.
pub fn equivalence_test(f1: &Cochain, f2: &Cochain) -> Result<Option<Cochain>, CoreError> {
    if !Arc::ptr_eq(&f1.action, &f2.action)
        && (f1.action.module != f2.action.module
            || f1.action.group.mul_table() != f2.action.group.mul_table())
    {
        return Err(CoreError::DimensionMismatch(
            "extensions must share base, fiber and action".into(),
        ));
    }
    Ok(f2.sub(f1).coboundary_witness())
}
