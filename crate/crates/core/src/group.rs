//! Finite groups as explicit multiplication tables, with subgroup,
//! normality and quotient machinery. The identity is always index 0.

use crate::error::CoreError;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    mul: Vec<usize>,
    inv: Vec<usize>,
    order: usize,
    pub labels: Option<Vec<String>>,
}

impl FiniteGroup {
    /// Validate a multiplication table and build the group, locating the
    /// first axiom failure otherwise.
    pub fn from_table(mul: Vec<Vec<usize>>) -> Result<Self, CoreError> {
        let n = mul.len();
        if n == 0 {
            return Err(CoreError::InvalidGroup("order must be ≥ 1".into()));
        }
        for (i, row) in mul.iter().enumerate() {
            if row.len() != n {
                return Err(CoreError::InvalidGroup(format!("row {i} has length {} ≠ {n}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(CoreError::InvalidGroup(format!("entry mul({i},{j}) = {v} out of range")));
                }
            }
        }
        // identity at index 0
        for i in 0..n {
            if mul[0][i] != i || mul[i][0] != i {
                return Err(CoreError::InvalidGroup(format!("index 0 is not an identity at element {i}")));
            }
        }
        // associativity
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(CoreError::InvalidGroup(format!(
                            "associativity fails at triple ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        // inverses
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| mul[a][b] == 0 && mul[b][a] == 0) {
                Some(b) => inv[a] = b,
                None => return Err(CoreError::InvalidGroup(format!("element {a} has no inverse"))),
            }
        }
        let flat: Vec<usize> = mul.into_iter().flatten().collect();
        Ok(FiniteGroup { mul: flat, inv, order: n, labels: None })
    }

    /// Cyclic group Z_m with addition mod m.
    pub fn cyclic(m: usize) -> Self {
        assert!(m >= 1, "order must be ≥ 1");
        let mut mul = vec![0usize; m * m];
        let mut inv = vec![0usize; m];
        for i in 0..m {
            for j in 0..m {
                mul[i * m + j] = (i + j) % m;
            }
            inv[i] = (m - i) % m;
        }
        FiniteGroup { mul, inv, order: m, labels: None }
    }

    /// Direct product with lexicographic indexing: (a, b) ↦ a·|G2| + b.
    pub fn product(g1: &FiniteGroup, g2: &FiniteGroup) -> Self {
        let (n1, n2) = (g1.order, g2.order);
        let n = n1 * n2;
        let mut mul = vec![0usize; n * n];
        let mut inv = vec![0usize; n];
        for a1 in 0..n1 {
            for b1 in 0..n2 {
                let x = a1 * n2 + b1;
                inv[x] = g1.inv(a1) * n2 + g2.inv(b1);
                for a2 in 0..n1 {
                    for b2 in 0..n2 {
                        let y = a2 * n2 + b2;
                        mul[x * n + y] = g1.mul(a1, a2) * n2 + g2.mul(b1, b2);
                    }
                }
            }
        }
        FiniteGroup { mul, inv, order: n, labels: None }
    }

    /// Dihedral group of order 2m: elements r^i (0..m) then r^i s (m..2m).
    pub fn dihedral(m: usize) -> Self {
        assert!(m >= 1);
        let n = 2 * m;
        let mut mul = vec![0usize; n * n];
        let enc = |rot: usize, flip: bool| if flip { m + rot } else { rot };
        for i in 0..n {
            let (r1, f1) = (i % m, i >= m);
            for j in 0..n {
                let (r2, f2) = (j % m, j >= m);
                // (r^a s^e)(r^b s^f) = r^{a + b·(-1)^e} s^{e+f}
                let rot = if f1 { (r1 + m - r2 % m) % m } else { (r1 + r2) % m };
                mul[i * n + j] = enc(rot, f1 ^ f2);
            }
        }
        let table: Vec<Vec<usize>> = (0..n).map(|i| mul[i * n..(i + 1) * n].to_vec()).collect();
        FiniteGroup::from_table(table).expect("dihedral table is a group")
    }

    /// Quaternion group Q8: 1, i, -1, -i, j, k, -j, -k encoding via pairs.
    pub fn quaternion() -> Self {
        // indices: 0:1, 1:-1, 2:i, 3:-i, 4:j, 5:-j, 6:k, 7:-k
        let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];
        let signed = |s: i32, base: usize| -> usize {
            if s > 0 { base } else { base + 1 }
        };
        // quaternion units as (sign, axis): axis 0 = scalar, 1 = i, 2 = j, 3 = k
        let dec = |x: usize| -> (i32, usize) {
            let sign = if x % 2 == 0 { 1 } else { -1 };
            (sign, x / 2)
        };
        let axis_mul = |a: usize, b: usize| -> (i32, usize) {
            match (a, b) {
                (0, x) => (1, x),
                (x, 0) => (1, x),
                (x, y) if x == y => (-1, 0),
                (1, 2) => (1, 3),
                (2, 1) => (-1, 3),
                (2, 3) => (1, 1),
                (3, 2) => (-1, 1),
                (3, 1) => (1, 2),
                (1, 3) => (-1, 2),
                _ => unreachable!(),
            }
        };
        let n = 8;
        let mut mul = vec![0usize; n * n];
        for x in 0..n {
            for y in 0..n {
                let (sx, ax) = dec(x);
                let (sy, ay) = dec(y);
                let (s, a) = axis_mul(ax, ay);
                mul[x * n + y] = signed(sx * sy * s, 2 * a);
            }
        }
        let table: Vec<Vec<usize>> = (0..n).map(|i| mul[i * n..(i + 1) * n].to_vec()).collect();
        let mut g = FiniteGroup::from_table(table).expect("quaternion table is a group");
        g.labels = Some(names.iter().map(|s| s.to_string()).collect());
        g
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    #[inline]
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn pow(&self, a: usize, e: usize) -> usize {
        let mut x = 0;
        for _ in 0..e {
            x = self.mul(x, a);
        }
        x
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn mul_table(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|i| self.mul[i * self.order..(i + 1) * self.order].to_vec())
            .collect()
    }

    pub fn is_subgroup(&self, subset: &[usize]) -> bool {
        if !subset.contains(&0) {
            return false;
        }
        let set: std::collections::HashSet<usize> = subset.iter().copied().collect();
        set.iter().all(|&a| set.contains(&self.inv(a)))
            && set
                .iter()
                .all(|&a| set.iter().all(|&b| set.contains(&self.mul(a, b))))
    }

    pub fn is_normal(&self, subset: &[usize]) -> bool {
        let set: std::collections::HashSet<usize> = subset.iter().copied().collect();
        (0..self.order).all(|g| set.iter().all(|&n| set.contains(&self.conj(g, n))))
    }

    /// Subgroup generated by a set of elements.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    frontier.push(y);
                }
            }
        }
        (0..self.order).filter(|&i| seen[i]).collect()
    }

    /// All subgroups, as sorted element lists.
    pub fn all_subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: Vec<Vec<usize>> = vec![vec![0]];
        let mut frontier = vec![vec![0usize]];
        while let Some(h) = frontier.pop() {
            for g in 1..self.order {
                if h.contains(&g) {
                    continue;
                }
                let mut gens: Vec<usize> = h.clone();
                gens.push(g);
                let sub = self.generated_subgroup(&gens);
                if !found.contains(&sub) {
                    found.push(sub.clone());
                    frontier.push(sub);
                }
            }
        }
        found.sort_by_key(|s| (s.len(), s.clone()));
        found
    }
}

/// A quotient G/N with its canonical section: each coset is represented by
/// its least element index, and the section sends the identity coset to 1_G.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub group: Arc<FiniteGroup>,
    pub quotient: FiniteGroup,
    pub normal: Vec<usize>,
    /// projection G → H by element index
    pub proj: Vec<usize>,
    /// canonical section H → G (least representative)
    pub section: Vec<usize>,
}

pub fn quotient(g: &Arc<FiniteGroup>, normal: &[usize]) -> Result<Quotient, CoreError> {
    if !g.is_subgroup(normal) {
        return Err(CoreError::NotSubgroup);
    }
    if !g.is_normal(normal) {
        return Err(CoreError::NotNormal);
    }
    let n = g.order();
    let mut coset_of = vec![usize::MAX; n];
    let mut reps: Vec<usize> = Vec::new();
    for x in 0..n {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let idx = reps.len();
        for &m in normal {
            coset_of[g.mul(x, m)] = idx;
        }
        reps.push(x);
    }
    // rep list is in increasing order of least element; identity coset is 0
    let h = reps.len();
    let mut mul = vec![0usize; h * h];
    for (i, &ri) in reps.iter().enumerate() {
        for (j, &rj) in reps.iter().enumerate() {
            mul[i * h + j] = coset_of[g.mul(ri, rj)];
        }
    }
    let table: Vec<Vec<usize>> = (0..h).map(|i| mul[i * h..(i + 1) * h].to_vec()).collect();
    let quotient = FiniteGroup::from_table(table)
        .map_err(|e| CoreError::InvalidGroup(format!("quotient table invalid: {e}")))?;
    Ok(Quotient {
        group: Arc::clone(g),
        quotient,
        normal: normal.to_vec(),
        proj: coset_of,
        section: reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_one_is_trivial() {
        let g = FiniteGroup::cyclic(1);
        assert_eq!(g.order(), 1);
        assert_eq!(g.mul(0, 0), 0);
    }

    #[test]
    fn cyclic_four_arithmetic() {
        let g = FiniteGroup::cyclic(4);
        assert_eq!(g.mul(1, 3), 0);
        assert_eq!(g.inv(3), 1);
    }

    #[test]
    fn klein_four_orders() {
        let v4 = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        let orders: Vec<usize> = (0..4).map(|i| v4.element_order(i)).collect();
        assert_eq!(orders, vec![1, 2, 2, 2]);
    }

    #[test]
    fn z2_x_z3_is_z6() {
        let g = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(3));
        // (1,1) has index 1·3 + 1 = 4 and order 6
        assert_eq!(g.element_order(4), 6);
    }

    #[test]
    fn z2_x_z1_is_z2() {
        let g = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(1));
        assert_eq!(g.mul_table(), FiniteGroup::cyclic(2).mul_table());
    }

    #[test]
    fn corrupted_table_names_triple() {
        let mut t = FiniteGroup::cyclic(4).mul_table();
        t[1][1] = 3;
        let err = FiniteGroup::from_table(t).unwrap_err();
        assert!(err.to_string().contains("associativity"), "{err}");
    }

    #[test]
    fn empty_table_rejected() {
        let err = FiniteGroup::from_table(vec![]).unwrap_err();
        assert!(err.to_string().contains("order must be ≥ 1"));
    }

    #[test]
    fn quotient_z4_by_z2() {
        let g = Arc::new(FiniteGroup::cyclic(4));
        let q = quotient(&g, &[0, 2]).unwrap();
        assert_eq!(q.quotient.order(), 2);
        assert_eq!(q.section[1], 1);
        assert_eq!(q.section[0], 0);
        for h in 0..2 {
            assert_eq!(q.proj[q.section[h]], h);
        }
    }

    #[test]
    fn quotient_v4_by_factor() {
        let g = Arc::new(FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2)));
        // {(0,0),(1,0)} = indices {0, 2}
        let q = quotient(&g, &[0, 2]).unwrap();
        assert_eq!(q.quotient.order(), 2);
    }

    #[test]
    fn quotient_rejects_non_subgroup() {
        let g = Arc::new(FiniteGroup::cyclic(4));
        assert!(matches!(quotient(&g, &[0, 1]), Err(CoreError::NotSubgroup)));
    }

    #[test]
    fn dihedral_and_quaternion_are_groups() {
        let d4 = FiniteGroup::dihedral(4);
        assert_eq!(d4.order(), 8);
        assert!(!d4.is_abelian());
        let q8 = FiniteGroup::quaternion();
        assert_eq!(q8.order(), 8);
        assert!(!q8.is_abelian());
        // Q8 has a unique element of order 2
        let twos = (0..8).filter(|&i| q8.element_order(i) == 2).count();
        assert_eq!(twos, 1);
    }

    #[test]
    fn s3_as_dihedral_three() {
        let s3 = FiniteGroup::dihedral(3);
        assert_eq!(s3.order(), 6);
        let n = s3.generated_subgroup(&[1]);
        assert_eq!(n, vec![0, 1, 2]);
        assert!(s3.is_normal(&n));
    }
}
