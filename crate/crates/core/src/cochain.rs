//! Normalized cochain complexes C^p(G, A) with the twisted bar differential,
//! cocycle/coboundary tests by exact linear algebra, and cohomology via
//! Smith normal form of the stacked coboundary and torsion relations.

use crate::abelian::Elt;
use crate::action::GAction;
use crate::error::CoreError;
use crate::intlin::{self, IntMat};
use crate::Limits;
use rand::Rng;
use std::sync::Arc;

/// A normalized p-cochain: a total table over tuples of non-identity
/// arguments; any tuple containing the identity evaluates to 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub action: Arc<GAction>,
    /// values on free tuples, indexed lexicographically
    pub table: Vec<Elt>,
}

/// Number of free p-tuples for a group of order n.
pub fn free_tuples(n: usize, p: usize) -> usize {
    if p == 0 {
        1
    } else {
        (n - 1).pow(p as u32)
    }
}

/// Lexicographic index of a free tuple (all entries ≥ 1).
pub fn tuple_index(args: &[usize], n: usize) -> usize {
    args.iter().fold(0, |acc, &g| acc * (n - 1) + (g - 1))
}

/// Inverse of `tuple_index`.
pub fn index_tuple(mut idx: usize, n: usize, p: usize) -> Vec<usize> {
    let mut out = vec![0usize; p];
    for i in (0..p).rev() {
        out[i] = idx % (n - 1) + 1;
        idx /= n - 1;
    }
    out
}

impl Cochain {
    pub fn zero(action: &Arc<GAction>, degree: usize) -> Self {
        let n = action.group.order();
        let count = free_tuples(n, degree);
        Cochain {
            degree,
            action: Arc::clone(action),
            table: vec![action.module.zero(); count],
        }
    }

    /// Value at an argument tuple; identity arguments force 0.
    pub fn value(&self, args: &[usize]) -> Elt {
        assert_eq!(args.len(), self.degree);
        if args.iter().any(|&g| g == 0) {
            return self.action.module.zero();
        }
        let n = self.action.group.order();
        self.table[tuple_index(args, n)].clone()
    }

    pub fn set(&mut self, args: &[usize], v: Elt) {
        assert_eq!(args.len(), self.degree);
        assert!(args.iter().all(|&g| g != 0), "normalized cochains vanish on identity slots");
        let n = self.action.group.order();
        let v = self.action.module.canon(v);
        self.table[tuple_index(args, n)] = v;
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        assert_eq!(self.degree, other.degree);
        let module = &self.action.module;
        Cochain {
            degree: self.degree,
            action: Arc::clone(&self.action),
            table: self
                .table
                .iter()
                .zip(&other.table)
                .map(|(a, b)| module.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        assert_eq!(self.degree, other.degree);
        let module = &self.action.module;
        Cochain {
            degree: self.degree,
            action: Arc::clone(&self.action),
            table: self
                .table
                .iter()
                .zip(&other.table)
                .map(|(a, b)| module.sub(a, b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Cochain {
        let module = &self.action.module;
        Cochain {
            degree: self.degree,
            action: Arc::clone(&self.action),
            table: self.table.iter().map(|a| module.neg(a)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|v| v.iter().all(|&c| c == 0))
    }

    /// Flatten to one coordinate vector (tuple-major).
    pub fn flatten(&self) -> Vec<i128> {
        self.table.iter().flat_map(|v| v.iter().copied()).collect()
    }

    pub fn from_flat(action: &Arc<GAction>, degree: usize, flat: &[i128]) -> Self {
        let d = action.module.dim();
        let n = action.group.order();
        let count = free_tuples(n, degree);
        assert_eq!(flat.len(), count * d);
        let table = (0..count)
            .map(|t| action.module.canon(flat[t * d..(t + 1) * d].to_vec()))
            .collect();
        Cochain { degree, action: Arc::clone(action), table }
    }

    /// Twisted bar differential, degree p → p+1.
    pub fn differential(&self) -> Cochain {
        let st = DifferentialStencil::new(&self.action, self.degree);
        st.apply(self)
    }

    pub fn is_cocycle(&self) -> bool {
        self.differential().is_zero()
    }

    /// Solve f = dh over normalized (p−1)-cochains; returns a witness.
    pub fn coboundary_witness(&self) -> Option<Cochain> {
        if self.degree == 0 {
            return if self.is_zero() { Some(Cochain::zero(&self.action, 0)) } else { None };
        }
        let st = DifferentialStencil::new(&self.action, self.degree - 1);
        let mat = st.matrix();
        let moduli = st.out_moduli();
        let x = if self.action.module.is_finite() && mat.rows > 0 {
            intlin::solve_bounded(&mat, &self.flatten(), &moduli)?
        } else {
            intlin::solve_mod(&mat, &self.flatten(), &moduli)?
        };
        Some(Cochain::from_flat(&self.action, self.degree - 1, &x))
    }

    /// Uniformly random table (free coordinates in a small window).
    pub fn random<R: Rng>(action: &Arc<GAction>, degree: usize, rng: &mut R) -> Self {
        let mut c = Cochain::zero(action, degree);
        let moduli = action.module.moduli();
        for t in 0..c.table.len() {
            let v: Elt = moduli
                .iter()
                .map(|&m| if m == 0 { rng.gen_range(-3i128..=3) } else { rng.gen_range(0..m) })
                .collect();
            c.table[t] = action.module.canon(v);
        }
        c
    }

    /// Random cocycle, sampled as a small integer combination of a
    /// generating set of the cocycle group.
    pub fn random_cocycle<R: Rng>(action: &Arc<GAction>, degree: usize, rng: &mut R) -> Self {
        let st = DifferentialStencil::new(action, degree);
        let d = action.module.dim();
        let n = action.group.order();
        let len = free_tuples(n, degree) * d;
        let basis = if action.module.is_finite() {
            intlin::solution_group_generators(&st.matrix(), &st.out_moduli(), &st.in_moduli())
        } else {
            st.cocycle_lattice()
        };
        let mut flat = vec![0i128; len];
        for b in &basis {
            let k: i128 = rng.gen_range(-2..=2);
            for (i, &v) in b.iter().enumerate() {
                flat[i] += k * v;
            }
        }
        Cochain::from_flat(action, degree, &flat)
    }
}

/// Coefficient of one differential term: either an action matrix or ±1.
#[derive(Debug, Clone, Copy)]
pub enum Coef {
    Action(usize),
    Plus,
    Minus,
}

/// Sparse structure of the bar differential C^p → C^{p+1}: for every free
/// output tuple, the list of (input tuple, coefficient) pairs.
pub struct DifferentialStencil {
    pub action: Arc<GAction>,
    pub degree: usize,
    pub terms: Vec<Vec<(usize, Coef)>>,
}

impl DifferentialStencil {
    pub fn new(action: &Arc<GAction>, p: usize) -> Self {
        let group = &action.group;
        let n = group.order();
        let out_count = free_tuples(n, p + 1);
        let mut terms = Vec::with_capacity(out_count);
        for out_idx in 0..out_count {
            let args = index_tuple(out_idx, n, p + 1);
            let mut row: Vec<(usize, Coef)> = Vec::new();
            // g1 · f(g2, ..., g_{p+1})
            let head = &args[1..];
            if head.iter().all(|&g| g != 0) {
                row.push((tuple_index(head, n), Coef::Action(args[0])));
            }
            // Σ (−1)^i f(..., g_i g_{i+1}, ...)
            for i in 0..p {
                let mut merged = Vec::with_capacity(p);
                merged.extend_from_slice(&args[..i]);
                merged.push(group.mul(args[i], args[i + 1]));
                merged.extend_from_slice(&args[i + 2..]);
                if merged.iter().all(|&g| g != 0) {
                    let sign = if (i + 1) % 2 == 0 { Coef::Plus } else { Coef::Minus };
                    row.push((tuple_index(&merged, n), sign));
                }
            }
            // (−1)^{p+1} f(g1, ..., gp)
            let tail = &args[..p];
            if tail.iter().all(|&g| g != 0) {
                let sign = if (p + 1) % 2 == 0 { Coef::Plus } else { Coef::Minus };
                row.push((tuple_index(tail, n), sign));
            }
            terms.push(row);
        }
        DifferentialStencil { action: Arc::clone(action), degree: p, terms }
    }

    pub fn apply(&self, f: &Cochain) -> Cochain {
        assert_eq!(f.degree, self.degree);
        let module = &self.action.module;
        let mut out = Cochain::zero(&self.action, self.degree + 1);
        for (out_idx, row) in self.terms.iter().enumerate() {
            let mut acc = module.zero();
            for &(in_idx, coef) in row {
                let v = &f.table[in_idx];
                let term = match coef {
                    Coef::Action(g) => self.action.apply(g, v),
                    Coef::Plus => v.clone(),
                    Coef::Minus => module.neg(v),
                };
                acc = module.add(&acc, &term);
            }
            out.table[out_idx] = acc;
        }
        out
    }

    /// Dense integer matrix of the differential on flattened coordinates.
    pub fn matrix(&self) -> IntMat {
        let d = self.action.module.dim();
        let n = self.action.group.order();
        let in_len = free_tuples(n, self.degree) * d;
        let out_len = self.terms.len() * d;
        let mut m = IntMat::zeros(out_len, in_len);
        for (out_idx, row) in self.terms.iter().enumerate() {
            for &(in_idx, coef) in row {
                for r in 0..d {
                    match coef {
                        Coef::Action(g) => {
                            let mg = self.action.matrix(g);
                            for c in 0..d {
                                m[(out_idx * d + r, in_idx * d + c)] += mg[(r, c)];
                            }
                        }
                        Coef::Plus => m[(out_idx * d + r, in_idx * d + r)] += 1,
                        Coef::Minus => m[(out_idx * d + r, in_idx * d + r)] -= 1,
                    }
                }
            }
        }
        m
    }

    /// Row moduli of the output coordinates.
    pub fn out_moduli(&self) -> Vec<i128> {
        let moduli = self.action.module.moduli();
        self.terms.iter().flat_map(|_| moduli.iter().copied()).collect()
    }

    /// Per-coordinate moduli of the input space.
    pub fn in_moduli(&self) -> Vec<i128> {
        let moduli = self.action.module.moduli();
        let n = self.action.group.order();
        (0..free_tuples(n, self.degree))
            .flat_map(|_| moduli.iter().copied())
            .collect()
    }

    /// Basis of the lattice of integer cochain vectors whose differential
    /// vanishes in the module.
    pub fn cocycle_lattice(&self) -> Vec<Vec<i128>> {
        intlin::kernel_mod(&self.matrix(), &self.out_moduli())
    }
}

/// Invariant factors of H^p together with representative cocycles.
#[derive(Debug, Clone)]
pub struct CohomologyResult {
    pub degree: usize,
    /// ascending divisibility chain, 0 marking a free factor
    pub factors: Vec<i128>,
    pub generators: Vec<Cochain>,
}

impl CohomologyResult {
    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn order(&self) -> Option<u128> {
        let mut o: u128 = 1;
        for &f in &self.factors {
            if f == 0 {
                return None;
            }
            o *= f as u128;
        }
        Some(o)
    }
}

/// H^p(G, A) for the action's group and module, by Smith normal form.
pub fn cohomology(action: &Arc<GAction>, p: usize, limits: &Limits) -> Result<CohomologyResult, CoreError> {
    if p > limits.max_degree {
        return Err(CoreError::ResourceLimit(format!(
            "degree {p} exceeds configured maximum {}",
            limits.max_degree
        )));
    }
    let n = action.group.order();
    let d = action.module.dim();
    let cells = free_tuples(n, p + 1) * d;
    if cells > limits.max_cells {
        return Err(CoreError::ResourceLimit(format!(
            "cochain table of {cells} cells exceeds limit {}",
            limits.max_cells
        )));
    }
    let dim_p = free_tuples(n, p) * d;

    let st = DifferentialStencil::new(action, p);
    let pres = if action.module.is_finite() {
        // everything happens inside the finite cochain module, entries
        // bounded by its exponent throughout
        let in_moduli = st.in_moduli();
        let z_gens =
            intlin::solution_group_generators(&st.matrix(), &st.out_moduli(), &in_moduli);
        let mut b_gens: Vec<Vec<i128>> = Vec::new();
        if p > 0 {
            let prev = DifferentialStencil::new(action, p - 1);
            let m = prev.matrix();
            for j in 0..m.cols {
                let col: Vec<i128> = m
                    .col(j)
                    .iter()
                    .zip(in_moduli.iter())
                    .map(|(&v, &md)| v.rem_euclid(md))
                    .collect();
                b_gens.push(col);
            }
        }
        intlin::finite_subquotient_presentation(&z_gens, &b_gens, &in_moduli)
            .ok_or_else(|| CoreError::Invalid("coboundary left the cocycle group".into()))?
    } else {
        // mixed free/torsion path: integer lattices with congruence rows
        let z_basis = st.cocycle_lattice();
        let mut b_gens: Vec<Vec<i128>> = Vec::new();
        if p > 0 {
            let prev = DifferentialStencil::new(action, p - 1);
            let m = prev.matrix();
            for j in 0..m.cols {
                b_gens.push(m.col(j));
            }
        }
        let moduli = action.module.moduli();
        for t in 0..free_tuples(n, p) {
            for (c, &m) in moduli.iter().enumerate() {
                if m != 0 {
                    let mut e = vec![0i128; dim_p];
                    e[t * d + c] = m;
                    b_gens.push(e);
                }
            }
        }
        intlin::subquotient_presentation(&z_basis, &b_gens, dim_p)
    };
    let generators = pres
        .generators
        .iter()
        .map(|g| Cochain::from_flat(action, p, g))
        .collect();
    Ok(CohomologyResult { degree: p, factors: pres.factors, generators })
}
