//! Finitely generated abelian coefficient groups Z^rank ⊕ Z_{m_1} ⊕ ... ⊕ Z_{m_k}.
//!
//! Elements are integer coordinate vectors, free coordinates first, torsion
//! coordinates reduced to canonical range 0 ≤ c < m.

use crate::error::CoreError;
use crate::group::FiniteGroup;

pub type Elt = Vec<i128>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<i128>,
}

impl AbelianGroup {
    pub fn new(rank: usize, torsion: Vec<i128>) -> Result<Self, CoreError> {
        if torsion.iter().any(|&m| m < 2) {
            return Err(CoreError::InvalidModule("torsion entries must be ≥ 2".into()));
        }
        Ok(AbelianGroup { rank, torsion })
    }

    pub fn cyclic(m: i128) -> Self {
        AbelianGroup::new(0, vec![m]).expect("modulus ≥ 2")
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { rank, torsion: vec![] }
    }

    pub fn trivial() -> Self {
        AbelianGroup { rank: 0, torsion: vec![] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rank + self.torsion.len()
    }

    /// Per-coordinate modulus, 0 on the free part.
    pub fn moduli(&self) -> Vec<i128> {
        let mut m = vec![0i128; self.rank];
        m.extend_from_slice(&self.torsion);
        m
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    pub fn order(&self) -> Option<u128> {
        if self.rank > 0 {
            return None;
        }
        Some(self.torsion.iter().map(|&m| m as u128).product())
    }

    pub fn zero(&self) -> Elt {
        vec![0; self.dim()]
    }

    pub fn canon(&self, mut x: Elt) -> Elt {
        assert_eq!(x.len(), self.dim(), "coordinate dimension mismatch");
        for (i, &m) in self.torsion.iter().enumerate() {
            let j = self.rank + i;
            x[j] = x[j].rem_euclid(m);
        }
        x
    }

    pub fn add(&self, a: &Elt, b: &Elt) -> Elt {
        self.canon(a.iter().zip(b).map(|(x, y)| x + y).collect())
    }

    pub fn neg(&self, a: &Elt) -> Elt {
        self.canon(a.iter().map(|x| -x).collect())
    }

    pub fn sub(&self, a: &Elt, b: &Elt) -> Elt {
        self.canon(a.iter().zip(b).map(|(x, y)| x - y).collect())
    }

    pub fn scale(&self, k: i128, a: &Elt) -> Elt {
        self.canon(a.iter().map(|x| k * x).collect())
    }

    pub fn is_zero(&self, a: &Elt) -> bool {
        self.canon(a.clone()).iter().all(|&v| v == 0)
    }

    /// All elements in canonical coordinates; None when the group is infinite.
    pub fn elements(&self) -> Option<Vec<Elt>> {
        if !self.is_finite() {
            return None;
        }
        let mut out = vec![vec![]];
        for &m in &self.torsion {
            let mut next = Vec::with_capacity(out.len() * m as usize);
            for e in &out {
                for v in 0..m {
                    let mut e2 = e.clone();
                    e2.push(v);
                    next.push(e2);
                }
            }
            out = next;
        }
        Some(out)
    }

    /// Order of an element.
    pub fn element_order(&self, a: &Elt) -> Option<u128> {
        let a = self.canon(a.clone());
        if a[..self.rank].iter().any(|&v| v != 0) {
            return None;
        }
        let mut ord: u128 = 1;
        for (i, &m) in self.torsion.iter().enumerate() {
            let v = a[self.rank + i];
            let o = (m / gcd(m, v.max(1))) as u128;
            let o = if v == 0 { 1 } else { o };
            ord = lcm_u128(ord, o);
        }
        Some(ord)
    }

    /// View the group as a FiniteGroup with a fixed element ordering, along
    /// with maps between indices and coordinate vectors.
    pub fn as_finite_group(&self) -> Option<(FiniteGroup, Vec<Elt>)> {
        let elems = self.elements()?;
        let index: std::collections::HashMap<Elt, usize> =
            elems.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let n = elems.len();
        let mut table = vec![vec![0usize; n]; n];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                table[i][j] = index[&self.add(a, b)];
            }
        }
        let g = FiniteGroup::from_table(table).expect("abelian group table is a group");
        Some((g, elems))
    }
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm_u128(a: u128, b: u128) -> u128 {
    let g = {
        let (mut x, mut y) = (a, b);
        while y != 0 {
            (x, y) = (y, x % y);
        }
        x.max(1)
    };
    a / g * b
}

/// Decompose a finite abelian group (given as a multiplication table plus a
/// subset of element indices forming a subgroup) into invariant factors with
/// explicit generators.
///
/// Returns the abstract group, the chosen generators (element indices), and
/// the full index ↔ coordinate dictionary for the subgroup.
#[derive(Debug)]
pub struct FiniteAbelianChart {
    pub shape: AbelianGroup,
    pub generators: Vec<usize>,
    /// canonical coordinates for each subgroup element, keyed by element index
    pub coords: std::collections::HashMap<usize, Elt>,
    /// element index for canonical coordinates
    pub element: std::collections::HashMap<Elt, usize>,
}

pub fn decompose_finite_abelian(
    g: &FiniteGroup,
    subgroup: &[usize],
) -> Result<FiniteAbelianChart, CoreError> {
    let set: Vec<usize> = subgroup.to_vec();
    for &a in &set {
        for &b in &set {
            if g.mul(a, b) != g.mul(b, a) {
                return Err(CoreError::InvalidModule("subgroup is not abelian".into()));
            }
        }
    }
    // Peel off cyclic factors of maximal order; |subgroup| is desk-scale so a
    // greedy search with verification is enough.
    let mut gens: Vec<usize> = Vec::new();
    let mut orders: Vec<i128> = Vec::new();
    let mut span: Vec<usize> = vec![0];
    while span.len() < set.len() {
        // element whose coset modulo current span has maximal order
        let mut best: Option<(usize, usize)> = None; // (element, coset order)
        for &x in &set {
            if span.contains(&x) {
                continue;
            }
            let mut k = 1usize;
            let mut p = x;
            while !span.contains(&p) {
                p = g.mul(p, x);
                k += 1;
            }
            if best.map_or(true, |(_, bk)| k > bk) {
                best = Some((x, k));
            }
        }
        let (x, k) = best.expect("proper subgroup must contain a new element");
        // adjust x by a span element so that x^k = 1 exactly
        let xk = g.pow(x, k);
        let adjusted = span
            .iter()
            .map(|&s| g.mul(x, s))
            .find(|&y| {
                let yk = g.pow(y, k);
                yk == 0 && {
                    // coset order must stay k
                    let mut t = 1usize;
                    let mut p = y;
                    while !span.contains(&p) {
                        p = g.mul(p, y);
                        t += 1;
                    }
                    t == k
                }
            });
        let x = match adjusted {
            Some(y) => y,
            None => {
                if xk != 0 {
                    return Err(CoreError::InvalidModule(
                        "abelian decomposition failed to split a cyclic factor".into(),
                    ));
                }
                x
            }
        };
        gens.push(x);
        orders.push(k as i128);
        // regenerate span
        let mut new_span = vec![0usize];
        for &gen in &gens {
            let mut next = Vec::new();
            let o = g.element_order(gen);
            for &s in &new_span {
                let mut p = s;
                for _ in 0..o {
                    next.push(p);
                    p = g.mul(p, gen);
                }
            }
            next.sort_unstable();
            next.dedup();
            new_span = next;
        }
        span = new_span;
    }
    // orders are non-increasing by construction; invariant factors want the
    // divisibility chain, which greedy maximal-order peeling guarantees for
    // abelian groups (each successive order divides the previous).
    let mut torsion: Vec<i128> = orders.iter().copied().filter(|&o| o > 1).collect();
    torsion.reverse(); // ascending divisibility chain
    let shape = AbelianGroup { rank: 0, torsion };
    let kept: Vec<usize> = gens
        .iter()
        .zip(&orders)
        .filter(|(_, &o)| o > 1)
        .map(|(&g, _)| g)
        .collect();
    let kept: Vec<usize> = kept.into_iter().rev().collect();
    // build the dictionary
    let mut coords = std::collections::HashMap::new();
    let mut element = std::collections::HashMap::new();
    let mut stack: Vec<(usize, Elt)> = vec![(0usize, shape.zero())];
    for (ci, &gen) in kept.iter().enumerate() {
        let m = shape.torsion[ci];
        let mut next = Vec::new();
        for (e, v) in stack {
            let mut p = e;
            for j in 0..m {
                let mut v2 = v.clone();
                v2[ci] = j;
                next.push((p, v2));
                p = g.mul(p, gen);
            }
        }
        stack = next;
    }
    for (e, v) in stack {
        coords.insert(e, v.clone());
        element.insert(v, e);
    }
    if coords.len() != set.len() {
        return Err(CoreError::InvalidModule(
            "abelian decomposition produced the wrong order".into(),
        ));
    }
    Ok(FiniteAbelianChart { shape, generators: kept, coords, element })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_reduction() {
        let a = AbelianGroup::new(1, vec![4]).unwrap();
        assert_eq!(a.canon(vec![-3, 7]), vec![-3, 3]);
        assert_eq!(a.add(&vec![1, 3], &vec![1, 2]), vec![2, 1]);
    }

    #[test]
    fn torsion_below_two_rejected() {
        assert!(AbelianGroup::new(0, vec![1]).is_err());
    }

    #[test]
    fn element_enumeration() {
        let a = AbelianGroup::new(0, vec![2, 3]).unwrap();
        assert_eq!(a.elements().unwrap().len(), 6);
        assert!(AbelianGroup::free(1).elements().is_none());
    }

    #[test]
    fn decompose_z6_table() {
        let g = FiniteGroup::cyclic(6);
        let all: Vec<usize> = (0..6).collect();
        let chart = decompose_finite_abelian(&g, &all).unwrap();
        assert_eq!(chart.shape.torsion, vec![6]);
        assert_eq!(chart.coords.len(), 6);
    }

    #[test]
    fn decompose_v4_subgroup() {
        let g = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(4));
        // subgroup {(0,0),(1,0),(0,2),(1,2)} ≅ Z2 × Z2: indices 0, 4, 2, 6
        let chart = decompose_finite_abelian(&g, &[0, 2, 4, 6]).unwrap();
        assert_eq!(chart.shape.torsion, vec![2, 2]);
    }

    #[test]
    fn decompose_z2_x_z4() {
        let g = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(4));
        let all: Vec<usize> = (0..8).collect();
        let chart = decompose_finite_abelian(&g, &all).unwrap();
        assert_eq!(chart.shape.torsion, vec![2, 4]);
        // round trip through the dictionary
        for (&e, v) in &chart.coords {
            assert_eq!(chart.element[v], e);
        }
    }
}
