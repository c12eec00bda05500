//! Base-pointed cochains c(g; g_1, ..., g_n) with coefficients read as
//! functions of the base point, their coboundary operator, and the global
//! triviality witness d(g; g_1, ..., g_{n-1}) = c(1; g, g_1, ..., g_{n-1}).

use crate::abelian::{AbelianGroup, Elt};
use crate::error::CoreError;
use crate::group::FiniteGroup;
use rand::Rng;
use std::sync::Arc;

/// A total table over G^{n+1}; the first slot is the base point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasepointedCochain {
    pub degree: usize,
    pub group: Arc<FiniteGroup>,
    pub module: AbelianGroup,
    table: Vec<Elt>,
}

impl BasepointedCochain {
    pub fn zero(group: &Arc<FiniteGroup>, module: &AbelianGroup, degree: usize) -> Self {
        let n = group.order();
        let count = n.pow(degree as u32 + 1);
        BasepointedCochain {
            degree,
            group: Arc::clone(group),
            module: module.clone(),
            table: vec![module.zero(); count],
        }
    }

    fn idx(&self, base: usize, args: &[usize]) -> usize {
        let n = self.group.order();
        args.iter().fold(base, |acc, &g| acc * n + g)
    }

    pub fn value(&self, base: usize, args: &[usize]) -> Elt {
        assert_eq!(args.len(), self.degree);
        self.table[self.idx(base, args)].clone()
    }

    pub fn set(&mut self, base: usize, args: &[usize], v: Elt) {
        assert_eq!(args.len(), self.degree);
        let i = self.idx(base, args);
        self.table[i] = self.module.canon(v);
    }

    pub fn random<R: Rng>(
        group: &Arc<FiniteGroup>,
        module: &AbelianGroup,
        degree: usize,
        rng: &mut R,
    ) -> Self {
        let mut c = BasepointedCochain::zero(group, module, degree);
        for t in 0..c.table.len() {
            let v: Elt = module
                .moduli()
                .iter()
                .map(|&m| if m == 0 { rng.gen_range(-3i128..=3) } else { rng.gen_range(0..m) })
                .collect();
            c.table[t] = module.canon(v);
        }
        c
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|v| v.iter().all(|&c| c == 0))
    }

    /// Base-pointed coboundary, degree n → n+1:
    /// (δd)(g; g_1..g_{n+1}) = d(gg_1; g_2..g_{n+1})
    ///   + Σ_{k=1}^{n} (−1)^k d(g; ..., g_k g_{k+1}, ...)
    ///   + (−1)^{n+1} d(g; g_1..g_n).
    pub fn delta(&self) -> BasepointedCochain {
        let n = self.degree;
        let grp = &self.group;
        let module = &self.module;
        let mut out = BasepointedCochain::zero(grp, module, n + 1);
        let order = grp.order();
        let mut args = vec![0usize; n + 1];
        for flat in 0..order.pow(n as u32 + 2) {
            let mut rem = flat;
            for i in (0..n + 1).rev() {
                args[i] = rem % order;
                rem /= order;
            }
            let base = rem;
            let mut acc = self.value(grp.mul(base, args[0]), &args[1..]);
            for k in 0..n {
                let mut merged = Vec::with_capacity(n);
                merged.extend_from_slice(&args[..k]);
                merged.push(grp.mul(args[k], args[k + 1]));
                merged.extend_from_slice(&args[k + 2..]);
                let term = self.value(base, &merged);
                acc = if (k + 1) % 2 == 0 {
                    module.add(&acc, &term)
                } else {
                    module.sub(&acc, &term)
                };
            }
            let term = self.value(base, &args[..n]);
            acc = if (n + 1) % 2 == 0 {
                module.add(&acc, &term)
            } else {
                module.sub(&acc, &term)
            };
            let i = out.idx(base, &args);
            out.table[i] = acc;
        }
        out
    }

    pub fn is_cocycle(&self) -> bool {
        self.delta().is_zero()
    }
}

/// For a base-pointed cocycle c of degree n, the (n−1)-cochain
/// d(g; g_1..g_{n-1}) := c(1; g, g_1, ..., g_{n-1}) satisfies δd = c.
/// Returns the witness, verified exactly.
pub fn triviality_witness(c: &BasepointedCochain) -> Result<BasepointedCochain, CoreError> {
    if c.degree == 0 {
        return Err(CoreError::Invalid(
            "triviality witness needs degree ≥ 1".into(),
        ));
    }
    if !c.is_cocycle() {
        return Err(CoreError::NotCocycle("base-pointed input has δc ≠ 0".into()));
    }
    let n = c.degree;
    let grp = &c.group;
    let mut w = BasepointedCochain::zero(grp, &c.module, n - 1);
    let order = grp.order();
    let mut args = vec![0usize; n - 1];
    for flat in 0..order.pow(n as u32) {
        let mut rem = flat;
        for i in (0..n - 1).rev() {
            args[i] = rem % order;
            rem /= order;
        }
        let base = rem;
        let mut shifted = Vec::with_capacity(n);
        shifted.push(base);
        shifted.extend_from_slice(&args);
        let v = c.value(0, &shifted);
        w.set(base, &args, v);
    }
    let check = w.delta();
    if &check != c {
        return Err(CoreError::Invalid(
            "triviality witness failed verification".into(),
        ));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_maps_to_zero() {
        let g = Arc::new(FiniteGroup::cyclic(3));
        let c = BasepointedCochain::zero(&g, &AbelianGroup::cyclic(3), 1);
        assert!(c.delta().is_zero());
    }

    #[test]
    fn delta_squared_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for order in [2usize, 3] {
            let g = Arc::new(FiniteGroup::cyclic(order));
            for m in [2i128, 4] {
                let module = AbelianGroup::cyclic(m);
                for degree in 0..=2 {
                    for _ in 0..10 {
                        let c = BasepointedCochain::random(&g, &module, degree, &mut rng);
                        assert!(c.delta().delta().is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn hand_expanded_degree_one() {
        // n = 1 over Z_2: (δd)(g; g1) = d(g g1) − d(g) with d a 0-cochain
        let g = Arc::new(FiniteGroup::cyclic(2));
        let module = AbelianGroup::cyclic(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = BasepointedCochain::random(&g, &module, 0, &mut rng);
        let dd = d.delta();
        for base in 0..2 {
            for g1 in 0..2 {
                let expect = module.sub(&d.value(g.mul(base, g1), &[]), &d.value(base, &[]));
                assert_eq!(dd.value(base, &[g1]), expect);
            }
        }
    }

    #[test]
    fn witness_recovers_cocycle_z3() {
        let g = Arc::new(FiniteGroup::cyclic(3));
        let module = AbelianGroup::cyclic(3);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..25 {
            let raw = BasepointedCochain::random(&g, &module, 1, &mut rng);
            let c = raw.delta(); // degree-2 cocycle by construction
            let w = triviality_witness(&c).unwrap();
            assert_eq!(w.delta(), c);
        }
    }

    #[test]
    fn witness_recovers_cocycle_z2_degree_three() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let module = AbelianGroup::cyclic(4);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..25 {
            let raw = BasepointedCochain::random(&g, &module, 2, &mut rng);
            let c = raw.delta();
            let w = triviality_witness(&c).unwrap();
            assert_eq!(w.delta(), c);
        }
    }

    #[test]
    fn non_cocycle_rejected() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        let module = AbelianGroup::cyclic(2);
        let mut c = BasepointedCochain::zero(&g, &module, 1);
        c.set(0, &[1], vec![1]);
        // (δc)(0; 1, 1) = c(1; 1) − c(0; 0) + c(0; 1) = 1 ≠ 0
        assert!(!c.is_cocycle());
        assert!(matches!(triviality_witness(&c), Err(CoreError::NotCocycle(_))));
    }
}
