//! Exact integer linear algebra: Smith normal form, linear solves over Z and
//! Z with per-row moduli, kernels, and presentations of finitely generated
//! abelian groups as invariant factors.
//!
//! All arithmetic is `i128` with checked operations; desk-scale inputs stay
//! far below the overflow threshold, and an overflow aborts loudly rather
//! than corrupting a result.

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i128>,
}

#[inline]
fn mul(a: i128, b: i128) -> i128 {
    a.checked_mul(b).expect("integer overflow in exact linear algebra")
}

#[inline]
fn add(a: i128, b: i128) -> i128 {
    a.checked_add(b).expect("integer overflow in exact linear algebra")
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = IntMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_cols(cols: &[Vec<i128>], rows: usize) -> Self {
        let mut m = IntMat::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged columns");
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul_vec(&self, x: &[i128]) -> Vec<i128> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).fold(0i128, |acc, j| add(acc, mul(self[(i, j)], x[j]))))
            .collect()
    }

    pub fn matmul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = add(out[(i, j)], mul(a, other[(k, j)]));
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let (x, y) = (self[(a, j)], self[(b, j)]);
            self[(a, j)] = y;
            self[(b, j)] = x;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let (x, y) = (self[(i, a)], self[(i, b)]);
            self[(i, a)] = y;
            self[(i, b)] = x;
        }
    }

    /// row[a] += c * row[b]
    fn add_row(&mut self, a: usize, b: usize, c: i128) {
        if c == 0 {
            return;
        }
        for j in 0..self.cols {
            self[(a, j)] = add(self[(a, j)], mul(c, self[(b, j)]));
        }
    }

    /// col[a] += c * col[b]
    fn add_col(&mut self, a: usize, b: usize, c: i128) {
        if c == 0 {
            return;
        }
        for i in 0..self.rows {
            self[(i, a)] = add(self[(i, a)], mul(c, self[(i, b)]));
        }
    }


    fn negate_col(&mut self, a: usize) {
        for i in 0..self.rows {
            self[(i, a)] = -self[(i, a)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = i128;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith decomposition `u * a * v = d` with `u`, `v` unimodular and `d`
/// diagonal with d_1 | d_2 | ... . `uinv` is the inverse of `u`.
pub struct SmithForm {
    pub d: IntMat,
    pub u: IntMat,
    pub uinv: IntMat,
    pub v: IntMat,
    pub rank: usize,
}

impl SmithForm {
    /// Diagonal entries up to min(rows, cols).
    pub fn diag(&self) -> Vec<i128> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)]).collect()
    }
}

pub fn smith(a: &IntMat) -> SmithForm {
    let mut d = a.clone();
    let (m, n) = (d.rows, d.cols);
    let mut u = IntMat::identity(m);
    let mut uinv = IntMat::identity(m);
    let mut v = IntMat::identity(n);

    let k_max = m.min(n);
    let mut k = 0;
    while k < k_max {
        // locate the nonzero entry of least magnitude in the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..m {
            for j in k..n {
                let val = d[(i, j)].abs();
                if val != 0 && pivot.map_or(true, |(pi, pj)| val < d[(pi, pj)].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(k, pi);
        u.swap_rows(k, pi);
        uinv.swap_cols(k, pi);
        d.swap_cols(k, pj);
        v.swap_cols(k, pj);

        // clear row k and column k; repeat while division leaves remainders
        loop {
            let mut dirty = false;
            for i in (k + 1)..m {
                let q = d[(i, k)].div_euclid(d[(k, k)]);
                d.add_row(i, k, -q);
                u.add_row(i, k, -q);
                uinv.add_col(k, i, q);
                if d[(i, k)] != 0 {
                    // remainder smaller than pivot: swap up and restart
                    d.swap_rows(k, i);
                    u.swap_rows(k, i);
                    uinv.swap_cols(k, i);
                    dirty = true;
                }
            }
            for j in (k + 1)..n {
                let q = d[(k, j)].div_euclid(d[(k, k)]);
                d.add_col(j, k, -q);
                v.add_col(j, k, -q);
                if d[(k, j)] != 0 {
                    d.swap_cols(k, j);
                    v.swap_cols(k, j);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }

        // enforce divisibility of the trailing block by the pivot
        let p = d[(k, k)];
        let mut fixed = true;
        'scan: for i in (k + 1)..m {
            for j in (k + 1)..n {
                if d[(i, j)] % p != 0 {
                    d.add_row(k, i, 1);
                    u.add_row(k, i, 1);
                    uinv.add_col(i, k, -1);
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if fixed {
            if d[(k, k)] < 0 {
                d.negate_col(k);
                v.negate_col(k);
            }
            k += 1;
        }
    }

    let rank = (0..k_max).take_while(|&i| d[(i, i)] != 0).count();
    SmithForm { d, u, uinv, v, rank }
}

/// Solve `a x = b` over the integers.
pub fn solve(a: &IntMat, b: &[i128]) -> Option<Vec<i128>> {
    assert_eq!(b.len(), a.rows);
    let s = smith(a);
    let ub = s.u.mul_vec(b);
    let mut y = vec![0i128; a.cols];
    for i in 0..a.rows {
        let di = if i < a.rows.min(a.cols) { s.d[(i, i)] } else { 0 };
        if di == 0 {
            if ub[i] != 0 {
                return None;
            }
        } else {
            if ub[i] % di != 0 {
                return None;
            }
            y[i] = ub[i] / di;
        }
    }
    Some(s.v.mul_vec(&y))
}

/// Basis of the integer kernel of `a`.
pub fn kernel(a: &IntMat) -> Vec<Vec<i128>> {
    let s = smith(a);
    (s.rank..a.cols).map(|j| s.v.col(j)).collect()
}

/// Augment `a` with one column `m_r * e_r` per row with modulus > 0, turning
/// congruences into exact equations over extra variables.
fn augment_with_moduli(a: &IntMat, moduli: &[i128]) -> (IntMat, usize) {
    assert_eq!(moduli.len(), a.rows);
    let extra: Vec<usize> = (0..a.rows).filter(|&r| moduli[r] != 0).collect();
    let mut m = IntMat::zeros(a.rows, a.cols + extra.len());
    for i in 0..a.rows {
        for j in 0..a.cols {
            m[(i, j)] = a[(i, j)];
        }
    }
    for (idx, &r) in extra.iter().enumerate() {
        m[(r, a.cols + idx)] = moduli[r];
    }
    (m, extra.len())
}

/// Solve `a x ≡ b (mod moduli)` rowwise; modulus 0 means an exact equation.
pub fn solve_mod(a: &IntMat, b: &[i128], moduli: &[i128]) -> Option<Vec<i128>> {
    let (m, _) = augment_with_moduli(a, moduli);
    solve(&m, b).map(|x| x[..a.cols].to_vec())
}

/// Generators of the lattice `{x : a x ≡ 0 (mod moduli)}`.
pub fn kernel_mod(a: &IntMat, moduli: &[i128]) -> Vec<Vec<i128>> {
    let (m, _) = augment_with_moduli(a, moduli);
    let gens: Vec<Vec<i128>> = kernel(&m)
        .into_iter()
        .map(|x| x[..a.cols].to_vec())
        .collect();
    lattice_basis(&gens, a.cols)
}

/// Reduce a generating set of a sublattice of Z^n to an independent basis
/// (column-style Hermite reduction).
pub fn lattice_basis(gens: &[Vec<i128>], n: usize) -> Vec<Vec<i128>> {
    if gens.is_empty() {
        return Vec::new();
    }
    let mut m = IntMat::from_cols(gens, n);
    let mut pivot_col = 0;
    for row in 0..n {
        if pivot_col >= m.cols {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for j in pivot_col..m.cols {
                let v = m[(row, j)].abs();
                if v != 0 && best.map_or(true, |bj| v < m[(row, bj)].abs()) {
                    best = Some(j);
                }
            }
            let Some(bj) = best else { break };
            m.swap_cols(pivot_col, bj);
            let mut clean = true;
            for j in (pivot_col + 1)..m.cols {
                let q = m[(row, j)].div_euclid(m[(row, pivot_col)]);
                m.add_col(j, pivot_col, -q);
                if m[(row, j)] != 0 {
                    clean = false;
                }
            }
            if clean {
                pivot_col += 1;
                break;
            }
        }
    }
    (0..pivot_col).map(|j| m.col(j)).filter(|c| c.iter().any(|&v| v != 0)).collect()
}

/// A finitely generated abelian group presented as invariant factors with
/// explicit generators in ambient coordinates. Factor 0 denotes a free Z
/// summand; factors > 1 are torsion orders in a divisibility chain.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub factors: Vec<i128>,
    pub generators: Vec<Vec<i128>>,
}

impl Presentation {
    pub fn order(&self) -> Option<u128> {
        let mut o: u128 = 1;
        for &f in &self.factors {
            if f == 0 {
                return None;
            }
            o = o.checked_mul(f as u128).expect("group order overflow");
        }
        Some(o)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Structure of the quotient Z^n / lattice(relations).
///
/// Relation columns are given in ambient coordinates. Returned generators
/// are ambient vectors projecting onto the invariant-factor decomposition;
/// factor-1 summands are dropped.
pub fn quotient_presentation(n: usize, relations: &[Vec<i128>]) -> Presentation {
    if relations.is_empty() {
        return Presentation {
            factors: vec![0; n],
            generators: (0..n)
                .map(|i| {
                    let mut e = vec![0; n];
                    e[i] = 1;
                    e
                })
                .collect(),
        };
    }
    let r = IntMat::from_cols(relations, n);
    let s = smith(&r);
    // Z^n / im(R) with U R V = D: generators are columns of U^{-1}, the i-th
    // of order D_ii (0 past the rank).
    let mut factors = Vec::new();
    let mut generators = Vec::new();
    for i in 0..n {
        let d = if i < s.rank { s.d[(i, i)] } else { 0 };
        if d == 1 {
            continue;
        }
        factors.push(d);
        generators.push(s.uinv.col(i));
    }
    // canonical ordering: torsion in divisibility order first, then free
    let mut paired: Vec<(i128, Vec<i128>)> = factors.into_iter().zip(generators).collect();
    paired.sort_by_key(|(f, _)| if *f == 0 { i128::MAX } else { *f });
    let (factors, generators) = paired.into_iter().unzip();
    Presentation { factors, generators }
}

/// Structure of M / L for lattices L ⊆ M ⊆ Z^n.
///
/// `m_basis` must be an independent basis of M; `l_gens` generate L. The
/// returned generators are in ambient Z^n coordinates.
pub fn subquotient_presentation(
    m_basis: &[Vec<i128>],
    l_gens: &[Vec<i128>],
    n: usize,
) -> Presentation {
    let k = m_basis.len();
    if k == 0 {
        return Presentation { factors: vec![], generators: vec![] };
    }
    let w = IntMat::from_cols(m_basis, n);
    let rel_in_basis: Vec<Vec<i128>> = l_gens
        .iter()
        .map(|l| solve(&w, l).expect("sublattice generator not inside ambient lattice"))
        .collect();
    let pres = quotient_presentation(k, &rel_in_basis);
    let generators = pres.generators.iter().map(|g| w.mul_vec(g)).collect();
    Presentation { factors: pres.factors, generators }
}

/// Express `target` in terms of an independent basis `basis` modulo the
/// lattice spanned by `rel`: solves `basis·x + rel·y = target`.
pub fn express_in_basis(
    basis: &[Vec<i128>],
    rel: &[Vec<i128>],
    target: &[i128],
) -> Option<Vec<i128>> {
    let n = target.len();
    let all: Vec<Vec<i128>> = basis.iter().chain(rel.iter()).cloned().collect();
    if all.is_empty() {
        return if target.iter().all(|&v| v == 0) { Some(vec![]) } else { None };
    }
    let m = IntMat::from_cols(&all, n);
    solve(&m, target).map(|x| x[..basis.len()].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_known_form() {
        let a = IntMat::from_rows(&[
            vec![-6, 111, -36, 6],
            vec![5, -672, 210, 74],
            vec![0, -255, 81, 24],
            vec![-7, 255, -81, -10],
        ]);
        let s = smith(&a);
        assert_eq!(s.diag(), vec![1, 3, 21, 0]);
        assert_eq!(s.u.matmul(&a).matmul(&s.v), s.d);
        assert_eq!(s.u.matmul(&s.uinv), IntMat::identity(4));
    }

    #[test]
    fn smith_divisibility_chain() {
        let a = IntMat::from_rows(&[vec![2, 0], vec![0, 3]]);
        let s = smith(&a);
        assert_eq!(s.diag(), vec![1, 6]);
    }

    #[test]
    fn solve_exact_and_infeasible() {
        let a = IntMat::from_rows(&[vec![2, 4], vec![0, 3]]);
        let x = solve(&a, &[6, 3]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![6, 3]);
        assert!(solve(&a, &[1, 0]).is_none());
    }

    #[test]
    fn solve_mod_congruence() {
        // x ≡ 1 (mod 2) and 3x ≡ 0 (mod 9) → x = 3 works
        let a = IntMat::from_rows(&[vec![1], vec![3]]);
        let x = solve_mod(&a, &[1, 0], &[2, 9]).unwrap();
        assert_eq!(x[0].rem_euclid(2), 1);
        assert_eq!((3 * x[0]).rem_euclid(9), 0);
    }

    #[test]
    fn kernel_of_projection() {
        let a = IntMat::from_rows(&[vec![1, 2, 3]]);
        let k = kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(a.mul_vec(v), vec![0]);
        }
    }

    #[test]
    fn kernel_mod_multiples() {
        // x ≡ 0 mod 4 in Z^1
        let a = IntMat::from_rows(&[vec![1]]);
        let k = kernel_mod(&a, &[4]);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][0].abs(), 4);
    }

    #[test]
    fn quotient_structure_z6() {
        // Z^2 / <(2,0),(0,3)> = Z_2 + Z_3 = Z_6
        let p = quotient_presentation(2, &[vec![2, 0], vec![0, 3]]);
        assert_eq!(p.factors, vec![6]);
        assert_eq!(p.order(), Some(6));
    }

    #[test]
    fn quotient_with_free_part() {
        let p = quotient_presentation(2, &[vec![2, 0]]);
        assert_eq!(p.factors, vec![2, 0]);
        assert_eq!(p.order(), None);
    }

    #[test]
    fn subquotient_index_two() {
        // M = 2Z ⊆ Z, L = 6Z: M/L = Z_3
        let p = subquotient_presentation(&[vec![2]], &[vec![6]], 1);
        assert_eq!(p.factors, vec![3]);
    }
}

// ---------------------------------------------------------------------------
// Modular path for finite coefficient modules. Congruence systems whose row
// moduli are all positive are solved prime by prime with every intermediate
// entry reduced mod p^e, so entries never grow. Used for the large cochain
// solves where dense Z-side reduction would blow up.

fn modinv(a: i128, m: i128) -> i128 {
    // extended Euclid; a must be a unit mod m
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    assert_eq!(old_r, 1, "element is not a unit");
    old_s.rem_euclid(m)
}

fn valuation(mut x: i128, p: i128, e: u32) -> u32 {
    x = x.rem_euclid(p.pow(e));
    if x == 0 {
        return e;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

fn primes_of(mut n: i128) -> Vec<(i128, u32)> {
    let mut out = Vec::new();
    let mut p = 2i128;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn lcm_i128(a: i128, b: i128) -> i128 {
    a / super_gcd(a, b) * b
}

fn super_gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Solve `a x ≡ b (mod row moduli)` when every row modulus is positive, by
/// CRT over the primes of their lcm, with every intermediate reduced mod
/// p^e. The returned solution is verified against the original congruences.
pub fn solve_bounded(a: &IntMat, b: &[i128], row_moduli: &[i128]) -> Option<Vec<i128>> {
    assert_eq!(b.len(), a.rows);
    assert!(row_moduli.iter().all(|&m| m > 0), "bounded solve needs positive moduli");
    let l = row_moduli.iter().fold(1i128, |acc, &m| lcm_i128(acc, m));
    let mut solution = vec![0i128; a.cols];
    let mut modulus = 1i128;
    for (p, e) in primes_of(l) {
        let pe = p.pow(e);
        // scale each row so its congruence becomes one mod p^e
        let mut scaled = IntMat::zeros(a.rows, a.cols);
        let mut rhs = vec![0i128; a.rows];
        for r in 0..a.rows {
            let mut mr = row_moduli[r];
            let mut vr = 0u32;
            while mr % p == 0 {
                mr /= p;
                vr += 1;
            }
            let scale = p.pow(e - vr.min(e));
            for c in 0..a.cols {
                scaled[(r, c)] = (a[(r, c)].rem_euclid(pe) * scale).rem_euclid(pe);
            }
            rhs[r] = (b[r].rem_euclid(pe) * scale).rem_euclid(pe);
        }
        let (diag, rhs2, v) = local_diagonalize_with_diag(&scaled, &rhs, p, e);
        let mut y = vec![0i128; a.cols];
        for (k, &(dv, dunit)) in diag.iter().enumerate() {
            let divisor = p.pow(dv);
            if rhs2[k].rem_euclid(divisor) != 0 {
                return None;
            }
            let uinv = modinv(dunit, pe);
            y[k] = ((rhs2[k] / divisor) * uinv).rem_euclid(pe);
        }
        for r in diag.len()..a.rows {
            if rhs2[r].rem_euclid(pe) != 0 {
                return None;
            }
        }
        let xp: Vec<i128> = (0..a.cols)
            .map(|i| {
                let mut acc = 0i128;
                for j in 0..a.cols {
                    acc = (acc + v[(i, j)] * y[j]).rem_euclid(pe);
                }
                acc
            })
            .collect();
        // CRT combine into `solution`
        let new_mod = modulus * pe;
        let minv = modinv(modulus.rem_euclid(pe), pe);
        for i in 0..a.cols {
            let diff = (xp[i] - solution[i]).rem_euclid(pe);
            solution[i] = (solution[i] + modulus * ((diff * minv).rem_euclid(pe)))
                .rem_euclid(new_mod);
        }
        modulus = new_mod;
    }
    for r in 0..a.rows {
        let mut acc: i128 = 0;
        for c in 0..a.cols {
            acc += a[(r, c)] * solution[c];
        }
        if (acc - b[r]).rem_euclid(row_moduli[r]) != 0 {
            return None;
        }
    }
    Some(solution)
}

/// Variant of the local diagonalization that also returns the diagonal
/// (valuation, unit) pairs needed for back substitution.
fn local_diagonalize_with_diag(
    a: &IntMat,
    b: &[i128],
    p: i128,
    e: u32,
) -> (Vec<(u32, i128)>, Vec<i128>, IntMat) {
    let m = p.pow(e);
    let (rows, cols) = (a.rows, a.cols);
    let mut w = IntMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            w[(i, j)] = a[(i, j)].rem_euclid(m);
        }
    }
    let mut rhs: Vec<i128> = b.iter().map(|x| x.rem_euclid(m)).collect();
    let mut v = IntMat::identity(cols);
    let mut diag: Vec<(u32, i128)> = Vec::new();
    let mut k = 0usize;
    while k < rows.min(cols) {
        let mut best: Option<(usize, usize, u32)> = None;
        for i in k..rows {
            for j in k..cols {
                if w[(i, j)] == 0 {
                    continue;
                }
                let val = valuation(w[(i, j)], p, e);
                if best.map_or(true, |(_, _, bv)| val < bv) {
                    best = Some((i, j, val));
                }
            }
        }
        let Some((pi, pj, pv)) = best else { break };
        w.swap_rows(k, pi);
        rhs.swap(k, pi);
        w.swap_cols(k, pj);
        v.swap_cols(k, pj);
        let unit = (w[(k, k)] / p.pow(pv)).rem_euclid(m);
        let uinv = modinv(unit, m);
        for i in 0..rows {
            if i == k || w[(i, k)] == 0 {
                continue;
            }
            let factor = ((w[(i, k)] / p.pow(pv)) * uinv).rem_euclid(m);
            for j in k..cols {
                w[(i, j)] = (w[(i, j)] - factor * w[(k, j)]).rem_euclid(m);
            }
            rhs[i] = (rhs[i] - factor * rhs[k]).rem_euclid(m);
        }
        for j in 0..cols {
            if j == k || w[(k, j)] == 0 {
                continue;
            }
            let factor = ((w[(k, j)] / p.pow(pv)) * uinv).rem_euclid(m);
            for i in 0..rows {
                w[(i, j)] = (w[(i, j)] - factor * w[(i, k)]).rem_euclid(m);
            }
            for i in 0..cols {
                v[(i, j)] = (v[(i, j)] - factor * v[(i, k)]).rem_euclid(m);
            }
        }
        diag.push((pv, unit));
        k += 1;
    }
    (diag, rhs, v)
}

/// Order of the solution group {x ∈ Π Z_{col_moduli} : a x ≡ 0 (mod row
/// moduli)}; all moduli must be positive and the matrix must respect the
/// column-to-row congruences.
pub fn solution_group_order(
    a: &IntMat,
    row_moduli: &[i128],
    col_moduli: &[i128],
) -> u128 {
    assert!(row_moduli.iter().all(|&m| m > 0));
    assert!(col_moduli.iter().all(|&m| m > 0));
    let l = row_moduli
        .iter()
        .chain(col_moduli.iter())
        .fold(1i128, |acc, &m| lcm_i128(acc, m));
    let mut total: u128 = 1;
    for (p, e) in primes_of(l) {
        let pe = p.pow(e);
        let mut scaled = IntMat::zeros(a.rows, a.cols);
        for r in 0..a.rows {
            let mut mr = row_moduli[r];
            let mut vr = 0u32;
            while mr % p == 0 {
                mr /= p;
                vr += 1;
            }
            let vr = vr.min(e);
            let scale = p.pow(e - vr);
            for c in 0..a.cols {
                scaled[(r, c)] = (a[(r, c)].rem_euclid(pe) * scale).rem_euclid(pe);
            }
        }
        let zero = vec![0i128; a.rows];
        let (diag, _, _) = local_diagonalize_with_diag(&scaled, &zero, p, e);
        // solutions over uniform Z_{p^e}: each pivot of valuation v allows
        // p^v choices; free columns allow p^e
        let mut log_count: u64 = 0;
        for &(v, _) in &diag {
            log_count += v as u64;
        }
        log_count += (a.cols - diag.len()) as u64 * e as u64;
        // divide out the fiber over the true coordinate moduli
        let mut log_fiber: u64 = 0;
        for &mc in col_moduli {
            let mut m = mc;
            let mut vc = 0u32;
            while m % p == 0 {
                m /= p;
                vc += 1;
            }
            log_fiber += (e - vc.min(e)) as u64;
        }
        assert!(log_count >= log_fiber, "fiber exceeds solution count");
        let exp = (log_count - log_fiber) as u32;
        total = total
            .checked_mul((p as u128).checked_pow(exp).expect("solution count overflow"))
            .expect("solution count overflow");
    }
    total
}

#[cfg(test)]
mod modular_tests {
    use super::*;

    #[test]
    fn bounded_solve_matches_z_solve() {
        let a = IntMat::from_rows(&[vec![2, 1, 0], vec![0, 3, 1], vec![1, 1, 1]]);
        let moduli = vec![4, 6, 12];
        let b = vec![3, 5, 7];
        match (solve_bounded(&a, &b, &moduli), solve_mod(&a, &b, &moduli)) {
            (Some(x), Some(_)) => {
                for r in 0..3 {
                    let acc: i128 = (0..3).map(|c| a[(r, c)] * x[c]).sum();
                    assert_eq!((acc - b[r]).rem_euclid(moduli[r]), 0);
                }
            }
            (None, None) => {}
            (x, y) => panic!("paths disagree: {:?} vs {:?}", x.is_some(), y.is_some()),
        }
    }

    #[test]
    fn bounded_solve_infeasible_detected() {
        // 2x ≡ 1 (mod 4) has no solution
        let a = IntMat::from_rows(&[vec![2]]);
        assert!(solve_bounded(&a, &[1], &[4]).is_none());
        assert!(solve_mod(&a, &[1], &[4]).is_none());
    }

    #[test]
    fn bounded_randomized_agreement() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let rows = rng.gen_range(1..5);
            let cols = rng.gen_range(1..5);
            let mut a = IntMat::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a[(i, j)] = rng.gen_range(-4i128..=4);
                }
            }
            let moduli: Vec<i128> =
                (0..rows).map(|_| [2i128, 3, 4, 6, 8, 9][rng.gen_range(0..6)]).collect();
            let b: Vec<i128> = (0..rows).map(|_| rng.gen_range(-5i128..=5)).collect();
            let fast = solve_bounded(&a, &b, &moduli);
            let slow = solve_mod(&a, &b, &moduli);
            assert_eq!(fast.is_some(), slow.is_some(), "a={a:?} b={b:?} m={moduli:?}");
        }
    }

    #[test]
    fn solution_count_diagonal() {
        // x ≡ 0 mod 2 with x ∈ Z_4: solutions {0, 2}
        let a = IntMat::from_rows(&[vec![1]]);
        assert_eq!(solution_group_order(&a, &[2], &[4]), 2);
        // no constraints: full box
        let z = IntMat::from_rows(&[vec![0, 0]]);
        assert_eq!(solution_group_order(&z, &[2], &[4, 6]), 24);
    }

    #[test]
    fn solution_count_matches_enumeration() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let rows = rng.gen_range(1..4);
            let cols = rng.gen_range(1..4);
            let col_moduli: Vec<i128> =
                (0..cols).map(|_| [2i128, 3, 4, 6][rng.gen_range(0..4)]).collect();
            let row_moduli: Vec<i128> =
                (0..rows).map(|_| [2i128, 3, 4, 6][rng.gen_range(0..4)]).collect();
            let mut a = IntMat::zeros(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    // entries must respect the congruences: scale so that
                    // a_ij · m_j ≡ 0 (mod m_i)
                    let need = row_moduli[i] / super_gcd(row_moduli[i], col_moduli[j]);
                    a[(i, j)] = need * rng.gen_range(0..3);
                }
            }
            let fast = solution_group_order(&a, &row_moduli, &col_moduli);
            // brute force
            let mut count = 0u128;
            let mut x = vec![0i128; cols];
            loop {
                let ok = (0..rows).all(|r| {
                    let acc: i128 = (0..cols).map(|c| a[(r, c)] * x[c]).sum();
                    acc.rem_euclid(row_moduli[r]) == 0
                });
                if ok {
                    count += 1;
                }
                let mut k = 0;
                while k < cols {
                    x[k] += 1;
                    if x[k] < col_moduli[k] {
                        break;
                    }
                    x[k] = 0;
                    k += 1;
                }
                if k == cols {
                    break;
                }
            }
            assert_eq!(fast, count, "a={a:?} rm={row_moduli:?} cm={col_moduli:?}");
        }
    }
}

// ---------------------------------------------------------------------------
// Bounded presentations for finite modules: kernels, quotients and
// subquotients computed prime by prime with all entries reduced mod p^e.

/// Local cokernel data: row valuations of the diagonalized relation matrix
/// (v_i = e when the row never received a pivot) plus the inverse row
/// transform mod p^e, whose columns generate the cokernel summands.
fn local_cokernel(a: &IntMat, p: i128, e: u32) -> (Vec<u32>, IntMat) {
    let m = p.pow(e);
    let (rows, cols) = (a.rows, a.cols);
    let mut w = IntMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            w[(i, j)] = a[(i, j)].rem_euclid(m);
        }
    }
    let mut uinv = IntMat::identity(rows);
    let mut vals = vec![e; rows];
    let mut k = 0usize;
    while k < rows.min(cols) {
        let mut best: Option<(usize, usize, u32)> = None;
        for i in k..rows {
            for j in k..cols {
                if w[(i, j)] == 0 {
                    continue;
                }
                let val = valuation(w[(i, j)], p, e);
                if best.map_or(true, |(_, _, bv)| val < bv) {
                    best = Some((i, j, val));
                }
            }
        }
        let Some((pi, pj, pv)) = best else { break };
        w.swap_rows(k, pi);
        uinv.swap_cols(k, pi);
        w.swap_cols(k, pj);
        let unit = (w[(k, k)] / p.pow(pv)).rem_euclid(m);
        let uivt = modinv(unit, m);
        for i in 0..rows {
            if i == k || w[(i, k)] == 0 {
                continue;
            }
            let factor = ((w[(i, k)] / p.pow(pv)) * uivt).rem_euclid(m);
            for j in k..cols {
                w[(i, j)] = (w[(i, j)] - factor * w[(k, j)]).rem_euclid(m);
            }
            // row_i -= factor · row_k on W means col_k += factor · col_i on U⁻¹
            for r in 0..rows {
                uinv[(r, k)] = (uinv[(r, k)] + factor * uinv[(r, i)]).rem_euclid(m);
            }
        }
        for j in 0..cols {
            if j == k || w[(k, j)] == 0 {
                continue;
            }
            let factor = ((w[(k, j)] / p.pow(pv)) * uivt).rem_euclid(m);
            for i in 0..rows {
                w[(i, j)] = (w[(i, j)] - factor * w[(i, k)]).rem_euclid(m);
            }
        }
        vals[k] = pv;
        k += 1;
    }
    (vals, uinv)
}

/// Generators (entries reduced below the moduli) of the finite solution
/// group {x ∈ Π Z_{col_moduli} : a x ≡ 0 (mod row_moduli)}.
pub fn solution_group_generators(
    a: &IntMat,
    row_moduli: &[i128],
    col_moduli: &[i128],
) -> Vec<Vec<i128>> {
    assert!(row_moduli.iter().all(|&m| m > 0));
    assert!(col_moduli.iter().all(|&m| m > 0));
    let l = row_moduli
        .iter()
        .chain(col_moduli.iter())
        .fold(1i128, |acc, &m| lcm_i128(acc, m));
    let mut gens: Vec<Vec<i128>> = Vec::new();
    for (p, e) in primes_of(l) {
        let pe = p.pow(e);
        let mut scaled = IntMat::zeros(a.rows, a.cols);
        for r in 0..a.rows {
            let mut mr = row_moduli[r];
            let mut vr = 0u32;
            while mr % p == 0 {
                mr /= p;
                vr += 1;
            }
            let scale = p.pow(e - vr.min(e));
            for c in 0..a.cols {
                scaled[(r, c)] = (a[(r, c)].rem_euclid(pe) * scale).rem_euclid(pe);
            }
        }
        let zero = vec![0i128; a.rows];
        let (diag, _, v) = local_diagonalize_with_diag(&scaled, &zero, p, e);
        // kernel generators mod p^e: p^{e-v_k} · V e_k for pivots, V e_j free
        let mut local: Vec<Vec<i128>> = Vec::new();
        for (k, &(val, _)) in diag.iter().enumerate() {
            if val == 0 {
                continue; // unit pivot: only the zero solution
            }
            let scale = p.pow(e - val);
            local.push((0..a.cols).map(|i| (v[(i, k)] * scale).rem_euclid(pe)).collect());
        }
        for j in diag.len()..a.cols {
            local.push((0..a.cols).map(|i| v[(i, j)].rem_euclid(pe)).collect());
        }
        // embed the p-part into the mixed-modulus coordinates via the CRT
        // idempotent of each coordinate
        for x in local {
            let mut y = vec![0i128; a.cols];
            let mut nonzero = false;
            for c in 0..a.cols {
                let mc = col_moduli[c];
                let mut pc = 1i128;
                let mut rest = mc;
                while rest % p == 0 {
                    rest /= p;
                    pc *= p;
                }
                if pc == 1 {
                    continue; // coordinate has no p-part
                }
                // idempotent ≡ 1 mod pc, ≡ 0 mod rest
                let idem = if rest == 1 {
                    1
                } else {
                    (rest * modinv(rest.rem_euclid(pc), pc)).rem_euclid(mc)
                };
                y[c] = (x[c].rem_euclid(pc) * idem).rem_euclid(mc);
                if y[c] != 0 {
                    nonzero = true;
                }
            }
            if nonzero {
                gens.push(y);
            }
        }
    }
    gens
}

/// Z^k modulo (relations ∪ L·Z^k): invariant factors dividing L and
/// generator coefficient vectors mod L. Sound whenever the quotient is
/// known to be killed by L.
pub fn bounded_quotient_presentation(
    k: usize,
    relations: &[Vec<i128>],
    l: i128,
) -> Presentation {
    let rel = if relations.is_empty() {
        IntMat::zeros(k, 1)
    } else {
        IntMat::from_cols(relations, k)
    };
    // per-prime cokernel factors and generators, then CRT-combine
    struct PrimePart {
        p: i128,
        factors: Vec<i128>,       // descending prime powers > 1
        gens: Vec<Vec<i128>>,     // matching coefficient vectors
    }
    let mut parts: Vec<PrimePart> = Vec::new();
    for (p, e) in primes_of(l) {
        let pe = p.pow(e);
        let (vals, uinv) = local_cokernel(&rel, p, e);
        let mut pairs: Vec<(i128, Vec<i128>)> = Vec::new();
        for (i, &v) in vals.iter().enumerate() {
            let order = p.pow(v.min(e));
            if order > 1 {
                pairs.push((order, (0..k).map(|r| uinv[(r, i)].rem_euclid(pe)).collect()));
            }
        }
        pairs.sort_by(|a, b| b.0.cmp(&a.0));
        if !pairs.is_empty() {
            parts.push(PrimePart {
                p,
                factors: pairs.iter().map(|(o, _)| *o).collect(),
                gens: pairs.into_iter().map(|(_, g)| g).collect(),
            });
        }
    }
    let width = parts.iter().map(|pp| pp.factors.len()).max().unwrap_or(0);
    let mut factors: Vec<i128> = Vec::new();
    let mut generators: Vec<Vec<i128>> = Vec::new();
    for i in 0..width {
        let mut f = 1i128;
        let mut g = vec![0i128; k];
        for pp in &parts {
            if let Some(&o) = pp.factors.get(i) {
                f *= o;
                for r in 0..k {
                    g[r] += pp.gens[i][r];
                }
            }
        }
        let _ = &parts;
        factors.push(f);
        generators.push(g);
    }
    // descending by construction; emit ascending divisibility chain
    factors.reverse();
    generators.reverse();
    Presentation { factors, generators }
}

/// Invariant factors and ambient generators of Z/B, where Z is given by
/// generators inside the finite module Π Z_{col_moduli} and B by elements
/// of Z. Returns None if some B-generator lies outside Z.
pub fn finite_subquotient_presentation(
    z_gens: &[Vec<i128>],
    b_gens: &[Vec<i128>],
    col_moduli: &[i128],
) -> Option<Presentation> {
    let n = col_moduli.len();
    if z_gens.is_empty() {
        return if b_gens
            .iter()
            .all(|b| b.iter().zip(col_moduli).all(|(&x, &m)| x.rem_euclid(m) == 0))
        {
            Some(Presentation { factors: vec![], generators: vec![] })
        } else {
            None
        };
    }
    let l = col_moduli.iter().fold(1i128, |acc, &m| lcm_i128(acc, m));
    let zm = IntMat::from_cols(z_gens, n);
    let k = z_gens.len();
    let mut relations: Vec<Vec<i128>> = Vec::new();
    for b in b_gens {
        relations.push(solve_bounded(&zm, b, col_moduli)?);
    }
    // syzygies: coefficient vectors x (mod L) with Σ x_i z_i ≡ 0
    let syz = solution_group_generators(&zm, col_moduli, &vec![l; k]);
    relations.extend(syz);
    let pres = bounded_quotient_presentation(k, &relations, l);
    let generators = pres
        .generators
        .iter()
        .map(|coeff| {
            let mut v = zm.mul_vec(coeff);
            for (c, &m) in col_moduli.iter().enumerate() {
                v[c] = v[c].rem_euclid(m);
            }
            v
        })
        .collect();
    Some(Presentation { factors: pres.factors, generators })
}

#[cfg(test)]
mod bounded_tests {
    use super::*;

    #[test]
    fn bounded_quotient_cyclic() {
        // Z² / <(2,0),(0,3)> with exponent 6
        let pres = bounded_quotient_presentation(2, &[vec![2, 0], vec![0, 3]], 6);
        assert_eq!(pres.factors, vec![6]);
    }

    #[test]
    fn bounded_quotient_direct_sum() {
        // Z² / <(2,0),(0,4)> = Z_2 + Z_4
        let pres = bounded_quotient_presentation(2, &[vec![2, 0], vec![0, 4]], 4);
        assert_eq!(pres.factors, vec![2, 4]);
    }

    #[test]
    fn bounded_matches_z_side_randomized() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..120 {
            let k = rng.gen_range(1..4);
            let r = rng.gen_range(1..5);
            let l: i128 = [2, 4, 6, 8, 9, 12][rng.gen_range(0..6)];
            let rels: Vec<Vec<i128>> = (0..r)
                .map(|_| (0..k).map(|_| rng.gen_range(0..l)).collect())
                .collect();
            // Z-side reference: quotient of Z^k by rels ∪ L·e_i
            let mut full = rels.clone();
            for i in 0..k {
                let mut e = vec![0i128; k];
                e[i] = l;
                full.push(e);
            }
            let want = quotient_presentation(k, &full);
            let got = bounded_quotient_presentation(k, &rels, l);
            assert_eq!(got.factors, want.factors, "k={k} l={l} rels={rels:?}");
        }
    }

    #[test]
    fn generators_have_stated_orders() {
        let pres = bounded_quotient_presentation(2, &[vec![2, 2], vec![0, 8]], 8);
        let full: Vec<Vec<i128>> = vec![vec![2, 2], vec![0, 8], vec![8, 0], vec![0, 8]];
        let want = quotient_presentation(2, &full);
        assert_eq!(pres.factors, want.factors);
    }

    #[test]
    fn subquotient_in_box() {
        // inside Z_4 × Z_4: Z = <(1,0),(0,2)>, B = <(2,0)> → Z_2 + Z_2... no:
        // Z ≅ Z_4 + Z_2, B = <(2,0)> of order 2 → quotient Z_2 + Z_2
        let pres = finite_subquotient_presentation(
            &[vec![1, 0], vec![0, 2]],
            &[vec![2, 0]],
            &[4, 4],
        )
        .unwrap();
        assert_eq!(pres.factors, vec![2, 2]);
    }

    #[test]
    fn subquotient_detects_outside_elements() {
        let out = finite_subquotient_presentation(&[vec![2]], &[vec![1]], &[4]);
        assert!(out.is_none());
    }

    #[test]
    fn solution_generators_span() {
        // kernel of (x, y) ↦ 2x + 2y inside Z_4 × Z_4 has order 8
        let a = IntMat::from_rows(&[vec![2, 2]]);
        let gens = solution_group_generators(&a, &[4], &[4, 4]);
        // close over addition and count
        let mut set = std::collections::HashSet::new();
        set.insert(vec![0i128, 0]);
        let mut frontier = vec![vec![0i128, 0]];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y: Vec<i128> =
                    x.iter().zip(g).map(|(a, b)| (a + b).rem_euclid(4)).collect();
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        assert_eq!(set.len() as u128, solution_group_order(&a, &[4], &[4, 4]));
    }
}
