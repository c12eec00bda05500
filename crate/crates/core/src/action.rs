//! Homomorphic actions of a finite group on an abelian coefficient group,
//! given by one integer matrix per group element.

use crate::abelian::{AbelianGroup, Elt};
use crate::error::CoreError;
use crate::group::FiniteGroup;
use crate::intlin::{self, IntMat};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GAction {
    pub group: Arc<FiniteGroup>,
    pub module: AbelianGroup,
    /// one dim×dim matrix per group element, acting on coordinate vectors
    matrices: Vec<IntMat>,
}

impl GAction {
    /// Validate and build. Each matrix must respect the torsion congruences
    /// (so it descends to the module) and the family must be a homomorphism
    /// with S(1) acting as the identity.
    pub fn new(
        group: Arc<FiniteGroup>,
        module: AbelianGroup,
        matrices: Vec<IntMat>,
    ) -> Result<Self, CoreError> {
        let n = group.order();
        let d = module.dim();
        if matrices.len() != n {
            return Err(CoreError::InvalidAction(format!(
                "expected {n} matrices, got {}",
                matrices.len()
            )));
        }
        for (g, m) in matrices.iter().enumerate() {
            if m.rows != d || m.cols != d {
                return Err(CoreError::InvalidAction(format!(
                    "matrix for element {g} is {}×{}, module dimension is {d}",
                    m.rows, m.cols
                )));
            }
            // torsion column c: m_c · (column c) must vanish in the module
            for c in 0..d {
                let mc = module.moduli()[c];
                for r in 0..d {
                    let mr = module.moduli()[r];
                    let v = m[(r, c)];
                    let ok = if mc == 0 {
                        true // free source coordinate: no congruence induced
                    } else if mr == 0 {
                        v * mc == 0
                    } else {
                        (v * mc) % mr == 0
                    };
                    if !ok {
                        return Err(CoreError::InvalidAction(format!(
                            "matrix for element {g} breaks torsion congruence at ({r},{c})"
                        )));
                    }
                }
            }
        }
        let act = GAction { group, module, matrices };
        // S(1) = id and S(gh) = S(g)S(h) on every basis vector, mod torsion
        let d = act.module.dim();
        for c in 0..d {
            let mut e = act.module.zero();
            e[c] = 1;
            let e = act.module.canon(e);
            if act.apply(0, &e) != e {
                return Err(CoreError::InvalidAction("S(1) is not the identity".into()));
            }
        }
        let n = act.group.order();
        for g in 0..n {
            for h in 0..n {
                let gh = act.group.mul(g, h);
                for c in 0..d {
                    let mut e = act.module.zero();
                    e[c] = 1;
                    let lhs = act.apply(gh, &e);
                    let rhs = act.apply(g, &act.apply(h, &e));
                    if lhs != rhs {
                        return Err(CoreError::InvalidAction(format!(
                            "S({g}·{h}) ≠ S({g})S({h}) on basis vector {c}"
                        )));
                    }
                }
            }
        }
        Ok(act)
    }

    /// Trivial action of `group` on `module`.
    pub fn trivial(group: Arc<FiniteGroup>, module: AbelianGroup) -> Self {
        let d = module.dim();
        let matrices = vec![IntMat::identity(d); group.order()];
        GAction { group, module, matrices }
    }

    /// Action of a cyclic-quotient character g ↦ (-1)^{χ(g)} by negation.
    /// `chi` gives the exponent per group element; must be a homomorphism to Z_2.
    pub fn by_signs(
        group: Arc<FiniteGroup>,
        module: AbelianGroup,
        chi: &[u8],
    ) -> Result<Self, CoreError> {
        let d = module.dim();
        let matrices = chi
            .iter()
            .map(|&s| {
                let mut m = IntMat::identity(d);
                if s % 2 == 1 {
                    for i in 0..d {
                        m[(i, i)] = -1;
                    }
                }
                m
            })
            .collect();
        GAction::new(group, module, matrices)
    }

    #[inline]
    pub fn apply(&self, g: usize, a: &Elt) -> Elt {
        self.module.canon(self.matrices[g].mul_vec(a))
    }

    pub fn matrix(&self, g: usize) -> &IntMat {
        &self.matrices[g]
    }

    pub fn is_trivial(&self) -> bool {
        let d = self.module.dim();
        let id = IntMat::identity(d);
        self.matrices.iter().all(|m| {
            (0..d).all(|c| {
                let mut e = self.module.zero();
                e[c] = 1;
                self.module.canon(m.mul_vec(&e)) == self.module.canon(id.mul_vec(&e))
            })
        })
    }

    /// Restrict the action to a subgroup, reindexing elements 0..k along
    /// `subset` (subset[0] must be the identity).
    pub fn restrict(&self, subset: &[usize]) -> Result<GAction, CoreError> {
        if subset.first() != Some(&0) || !self.group.is_subgroup(subset) {
            return Err(CoreError::NotSubgroup);
        }
        let k = subset.len();
        let mut table = vec![vec![0usize; k]; k];
        let pos = |x: usize| subset.iter().position(|&s| s == x);
        for (i, &a) in subset.iter().enumerate() {
            for (j, &b) in subset.iter().enumerate() {
                table[i][j] = pos(self.group.mul(a, b))
                    .ok_or(CoreError::NotSubgroup)?;
            }
        }
        let sub = Arc::new(FiniteGroup::from_table(table)?);
        let matrices = subset.iter().map(|&g| self.matrices[g].clone()).collect();
        GAction::new(sub, self.module.clone(), matrices)
    }

    /// The fixed submodule A^G as a sublattice basis of coordinate space,
    /// together with its abstract shape.
    pub fn fixed_submodule(&self) -> FixedSubmodule {
        let d = self.module.dim();
        let moduli = self.module.moduli();
        // stack (S(g) - I) for all g; solve ≡ 0 (mod torsion) rowwise
        let n = self.group.order();
        let mut rows: Vec<Vec<i128>> = Vec::new();
        let mut row_moduli: Vec<i128> = Vec::new();
        for g in 1..n {
            for r in 0..d {
                let mut row = vec![0i128; d];
                for c in 0..d {
                    row[c] = self.matrices[g][(r, c)] - if r == c { 1 } else { 0 };
                }
                rows.push(row);
                row_moduli.push(moduli[r]);
            }
        }
        if rows.is_empty() {
            rows.push(vec![0; d]);
            row_moduli.push(0);
        }
        let a = IntMat::from_rows(&rows);
        let basis = intlin::kernel_mod(&a, &row_moduli);
        // relations inside the fixed lattice: the torsion relations m_c e_c
        // (each lies in the fixed lattice because it is 0 in the module)
        let mut rel: Vec<Vec<i128>> = Vec::new();
        for c in 0..d {
            if moduli[c] != 0 {
                let mut e = vec![0i128; d];
                e[c] = moduli[c];
                rel.push(e);
            }
        }
        let pres = intlin::subquotient_presentation(&basis, &rel, d);
        FixedSubmodule { basis, relations: rel, presentation: pres }
    }
}

/// The fixed submodule A^G: lattice data plus abstract invariant factors.
#[derive(Debug, Clone)]
pub struct FixedSubmodule {
    /// basis of the lattice {x : S(g)x ≡ x ∀g} in ambient coordinates
    pub basis: Vec<Vec<i128>>,
    /// ambient torsion relations contained in that lattice
    pub relations: Vec<Vec<i128>>,
    pub presentation: intlin::Presentation,
}

impl FixedSubmodule {
    /// Does the ambient element lie in the fixed submodule?
    pub fn contains(&self, module: &AbelianGroup, a: &Elt) -> bool {
        let a = module.canon(a.clone());
        intlin::express_in_basis(&self.basis, &[], &a).is_some()
            || intlin::express_in_basis(
                &self.basis,
                &self.relations,
                &a,
            )
            .is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn negation_on_z4() -> GAction {
        let g = Arc::new(FiniteGroup::cyclic(2));
        GAction::by_signs(g, AbelianGroup::cyclic(4), &[0, 1]).unwrap()
    }

    #[test]
    fn homomorphism_property_checked() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        // S(1) of order 3 cannot define a Z_2 action unless it squares to id
        let mut m = IntMat::identity(1);
        m[(0, 0)] = 2; // ×2 on Z_5: order 4, not an involution
        let bad = GAction::new(
            g,
            AbelianGroup::cyclic(5),
            vec![IntMat::identity(1), m],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn negation_action_applies() {
        let act = negation_on_z4();
        assert_eq!(act.apply(1, &vec![3]), vec![1]);
        assert_eq!(act.apply(0, &vec![3]), vec![3]);
    }

    #[test]
    fn fixed_submodule_of_negation() {
        let act = negation_on_z4();
        // A^G = {0, 2} ≅ Z_2
        let fix = act.fixed_submodule();
        assert_eq!(fix.presentation.factors, vec![2]);
    }

    #[test]
    fn fixed_submodule_trivial_action_is_everything() {
        let g = Arc::new(FiniteGroup::cyclic(3));
        let act = GAction::trivial(g, AbelianGroup::new(0, vec![2, 4]).unwrap());
        let fix = act.fixed_submodule();
        assert_eq!(fix.presentation.factors, vec![2, 4]);
    }

    #[test]
    fn fixing_twice_is_idempotent() {
        let act = negation_on_z4();
        let fix = act.fixed_submodule();
        // restrict the (trivialized) action to the fixed part: fixing again
        // reproduces the same abstract group
        let sub = fix.presentation.clone();
        let trivial = GAction::trivial(
            Arc::new(FiniteGroup::cyclic(2)),
            AbelianGroup { rank: 0, torsion: sub.factors.iter().map(|&f| f).collect() },
        );
        let fix2 = trivial.fixed_submodule();
        assert_eq!(fix2.presentation.factors, sub.factors);
    }

    #[test]
    fn torsion_congruence_enforced() {
        // map Z_2 → Z (free) cannot send the torsion generator to 1
        let g = Arc::new(FiniteGroup::cyclic(1));
        let module = AbelianGroup::new(1, vec![2]).unwrap();
        let mut m = IntMat::identity(2);
        m[(0, 1)] = 1; // free row gets torsion column entry
        assert!(GAction::new(g, module, vec![m]).is_err());
    }
}
