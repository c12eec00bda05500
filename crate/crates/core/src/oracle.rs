//! Brute-force cohomology oracle, independent of the Smith-normal-form
//! pipeline: coboundaries are enumerated outright, cocycles by a
//! backtracking scan with early constraint pruning, and the quotient
//! structure is read off by counting elements killed by each prime power.

use crate::abelian::Elt;
use crate::action::GAction;
use crate::cochain::{free_tuples, Coef, CohomologyResult, DifferentialStencil};
use crate::error::CoreError;
use crate::Limits;
use std::collections::HashSet;
use std::sync::Arc;

/// Flattened canonical table of one cochain.
type Flat = Vec<i128>;

fn pow_u128(base: u128, exp: u32) -> Option<u128> {
    base.checked_pow(exp)
}

/// Enumerate every normalized p-cochain table (finite module only).
fn enumerate_all(action: &Arc<GAction>, p: usize) -> Vec<Vec<Elt>> {
    let elems = action
        .module
        .elements()
        .expect("oracle requires a finite coefficient module");
    let slots = free_tuples(action.group.order(), p);
    let mut out: Vec<Vec<Elt>> = vec![vec![]];
    for _ in 0..slots {
        let mut next = Vec::with_capacity(out.len() * elems.len());
        for t in &out {
            for e in &elems {
                let mut t2 = t.clone();
                t2.push(e.clone());
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

fn flatten(table: &[Elt]) -> Flat {
    table.iter().flat_map(|e| e.iter().copied()).collect()
}

/// All coboundaries dh for h ranging over C^{p−1}, as a set of flat tables.
fn coboundary_set(action: &Arc<GAction>, p: usize, limits: &Limits) -> Result<HashSet<Flat>, CoreError> {
    if p == 0 {
        let zero = vec![0i128; action.module.dim()];
        return Ok(HashSet::from([zero]));
    }
    let q = action.module.order().ok_or_else(|| {
        CoreError::EnumerationBound("oracle requires a finite module".into())
    })?;
    let slots = free_tuples(action.group.order(), p - 1) as u32;
    let total = pow_u128(q, slots)
        .filter(|&t| t <= limits.oracle_bound)
        .ok_or_else(|| {
            CoreError::EnumerationBound(format!(
                "coboundary enumeration |A|^{slots} exceeds bound {}",
                limits.oracle_bound
            ))
        })?;
    let _ = total;
    let st = DifferentialStencil::new(action, p - 1);
    let mut set = HashSet::new();
    for table in enumerate_all(action, p - 1) {
        let h = crate::cochain::Cochain {
            degree: p - 1,
            action: Arc::clone(action),
            table,
        };
        set.insert(flatten(&st.apply(&h).table));
    }
    Ok(set)
}

/// Invariant factors of the finite quotient Z/B by prime-power counting.
fn factors_from_counts(
    z: &[Flat],
    b: &HashSet<Flat>,
    module_exponent: u128,
    add: impl Fn(&Flat, i128) -> Flat,
) -> Vec<i128> {
    let order = (z.len() / b.len()) as u128;
    if order == 1 {
        return vec![];
    }
    // primes dividing the exponent of the ambient cochain module
    let mut primes = Vec::new();
    let mut e = module_exponent;
    let mut p = 2u128;
    while p * p <= e {
        if e % p == 0 {
            primes.push(p);
            while e % p == 0 {
                e /= p;
            }
        }
        p += 1;
    }
    if e > 1 {
        primes.push(e);
    }

    // per prime: exponents of the cyclic p-factors
    let mut per_prime: Vec<Vec<u32>> = Vec::new();
    for &p in &primes {
        let mut counts: Vec<u128> = vec![1]; // d_0 = |{x : x = 0}| = 1 class
        let mut j = 1u32;
        loop {
            let k = match pow_u128(p, j) {
                Some(k) => k,
                None => break,
            };
            let d: usize = z
                .iter()
                .filter(|zz| b.contains(&add(zz, k as i128)))
                .count();
            let classes = (d / b.len()) as u128;
            counts.push(classes);
            if classes as u128 * 1 == order_p_part(order, p) {
                break;
            }
            j += 1;
            if j > 64 {
                break;
            }
        }
        // number of factors with exponent ≥ j is log_p(d_j / d_{j-1})
        let mut exps: Vec<u32> = Vec::new();
        for j in 1..counts.len() {
            let ratio = counts[j] / counts[j - 1];
            let mut n_ge_j = 0u32;
            let mut r = ratio;
            while r > 1 {
                assert_eq!(r % p, 0, "count ratio must be a power of {p}");
                r /= p;
                n_ge_j += 1;
            }
            exps.push(n_ge_j);
        }
        // convert "count with exponent ≥ j" into a multiset of exponents
        let mut factors_p: Vec<u32> = Vec::new();
        for j in (1..=exps.len()).rev() {
            let ge_j = exps[j - 1];
            let ge_j1 = if j < exps.len() { exps[j] } else { 0 };
            for _ in 0..(ge_j - ge_j1) {
                factors_p.push(j as u32);
            }
        }
        factors_p.sort_unstable_by(|a, b| b.cmp(a)); // descending
        per_prime.push(factors_p);
    }

    // combine across primes into invariant factors (descending), then flip
    let max_len = per_prime.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut invariant: Vec<i128> = Vec::new();
    for i in 0..max_len {
        let mut f: i128 = 1;
        for (pi, exps) in per_prime.iter().enumerate() {
            if let Some(&e) = exps.get(i) {
                f *= (primes[pi] as i128).pow(e);
            }
        }
        invariant.push(f);
    }
    invariant.reverse();
    invariant
}

fn order_p_part(mut order: u128, p: u128) -> u128 {
    let mut part = 1u128;
    while order % p == 0 {
        part *= p;
        order /= p;
    }
    part
}

/// Brute-force H^p: full coboundary enumeration, pruned cocycle scan, and
/// structure by order counting. Generators are not produced on this path.
pub fn brute_force_cohomology(
    action: &Arc<GAction>,
    p: usize,
    limits: &Limits,
) -> Result<CohomologyResult, CoreError> {
    let module = &action.module;
    let exponent: u128 = module
        .torsion
        .iter()
        .fold(1u128, |acc, &m| num_lcm(acc, m as u128));
    if !module.is_finite() {
        return Err(CoreError::EnumerationBound(
            "oracle requires a finite coefficient module".into(),
        ));
    }
    let b = coboundary_set(action, p, limits)?;
    let z = cocycle_scan(action, p, limits)?;
    debug_assert!(z.len() % b.len() == 0, "coboundaries must tile the cocycles");
    let dims = module.moduli();
    let slots = free_tuples(action.group.order(), p);
    let add = move |flat: &Flat, k: i128| -> Flat {
        let d = dims.len();
        let mut out = flat.clone();
        for t in 0..slots {
            for c in 0..d {
                let m = dims[c];
                let v = k * flat[t * d + c];
                out[t * d + c] = if m == 0 { v } else { v.rem_euclid(m) };
            }
        }
        out
    };
    let factors = factors_from_counts(&z, &b, exponent, add);
    Ok(CohomologyResult { degree: p, factors, generators: vec![] })
}

fn num_lcm(a: u128, b: u128) -> u128 {
    let g = {
        let (mut x, mut y) = (a, b);
        while y != 0 {
            (x, y) = (y, x % y);
        }
        x.max(1)
    };
    a / g * b
}

/// Backtracking cocycle enumeration (standalone; the helper above is split
/// out so tests can reuse it).
pub fn cocycle_scan(action: &Arc<GAction>, p: usize, limits: &Limits) -> Result<Vec<Flat>, CoreError> {
    let module = action.module.clone();
    let elems = module
        .elements()
        .ok_or_else(|| CoreError::EnumerationBound("oracle requires a finite module".into()))?;
    let slots = free_tuples(action.group.order(), p);
    let st = DifferentialStencil::new(action, p);

    let mut ready_at: Vec<Vec<usize>> = vec![Vec::new(); slots];
    let mut always: Vec<usize> = Vec::new();
    for (cid, row) in st.terms.iter().enumerate() {
        match row.iter().map(|(idx, _)| *idx).max() {
            Some(last) => ready_at[last].push(cid),
            None => always.push(cid),
        }
    }
    // constraints with no terms are identically zero; nothing to check
    let _ = always;

    let mut solutions: Vec<Flat> = Vec::new();
    let mut assignment: Vec<Elt> = vec![module.zero(); slots];
    let mut nodes: u128 = 0;
    let limit = limits.oracle_nodes;

    fn check(
        action: &Arc<GAction>,
        st: &DifferentialStencil,
        assignment: &[Elt],
        cid: usize,
    ) -> bool {
        let module = &action.module;
        let mut acc = module.zero();
        for &(idx, coef) in &st.terms[cid] {
            let v = &assignment[idx];
            let term = match coef {
                Coef::Action(g) => action.apply(g, v),
                Coef::Plus => v.clone(),
                Coef::Minus => module.neg(v),
            };
            acc = module.add(&acc, &term);
        }
        module.is_zero(&acc)
    }

    fn recurse(
        action: &Arc<GAction>,
        st: &DifferentialStencil,
        elems: &[Elt],
        ready_at: &[Vec<usize>],
        assignment: &mut Vec<Elt>,
        depth: usize,
        nodes: &mut u128,
        limit: u128,
        out: &mut Vec<Flat>,
    ) -> Result<(), CoreError> {
        if depth == assignment.len() {
            out.push(flatten(assignment));
            return Ok(());
        }
        for e in elems {
            *nodes += 1;
            if *nodes > limit {
                return Err(CoreError::EnumerationBound(format!(
                    "cocycle scan exceeded {limit} nodes"
                )));
            }
            assignment[depth] = e.clone();
            if ready_at[depth]
                .iter()
                .all(|&cid| check(action, st, assignment, cid))
            {
                recurse(action, st, elems, ready_at, assignment, depth + 1, nodes, limit, out)?;
            }
        }
        assignment[depth] = elems[0].clone();
        Ok(())
    }

    recurse(
        action,
        &st,
        &elems,
        &ready_at,
        &mut assignment,
        0,
        &mut nodes,
        limit,
        &mut solutions,
    )?;
    Ok(solutions)
}
