//! Exact integer linear algebra: Smith and Hermite normal forms, saturated
//! kernels, cokernels with coordinates, and finitely generated abelian groups.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major matrix of big integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend(row.iter().cloned().map(Into::into));
        }
        IntMatrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn diagonal(entries: &[BigInt]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, d) in entries.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows, "hcat row mismatch");
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Rows `range` of the matrix.
    pub fn row_block(&self, range: std::ops::Range<usize>) -> IntMatrix {
        let mut out = Self::zeros(range.len(), self.cols);
        for (r, i) in range.enumerate() {
            for j in 0..self.cols {
                out[(r, j)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination. Panics unless square.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * &a[(n - 1, n - 1)]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += q · row[src]`.
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * q;
            self[(dst, j)] += v;
        }
    }

    /// `col[dst] += q · col[src]`.
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * q;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// `D = U·M·V` with `U`, `V` unimodular and `D` diagonal, `d₁ | d₂ | … ≥ 0`.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    /// inverse of `u`, tracked during elimination
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries `d₁, …, d_{min(rows,cols)}`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

fn smallest_nonzero<'a>(cands: impl Iterator<Item = ((usize, usize), &'a BigInt)>) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for (pos, x) in cands {
        if x.is_zero() {
            continue;
        }
        let a = x.abs();
        if best.as_ref().is_none_or(|(_, b)| a < *b) {
            best = Some((pos, a));
        }
    }
    best.map(|(p, _)| p)
}

/// Smith normal form. Pivot: smallest nonzero absolute value in the
/// remaining block, ties broken by row then column.
pub fn smith(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    // row op on a is mirrored on u and, inverted, on u_inv's columns
    let row_add = |a: &mut IntMatrix, u: &mut IntMatrix, ui: &mut IntMatrix, dst: usize, src: usize, q: &BigInt| {
        a.add_row(dst, src, q);
        u.add_row(dst, src, q);
        ui.add_col(src, dst, &-q);
    };
    let row_swap = |a: &mut IntMatrix, u: &mut IntMatrix, ui: &mut IntMatrix, x: usize, y: usize| {
        a.swap_rows(x, y);
        u.swap_rows(x, y);
        ui.swap_cols(x, y);
    };

    for t in 0..rows.min(cols) {
        let block = (t..rows).flat_map(|i| (t..cols).map(move |j| (i, j)));
        let Some((pi, pj)) = smallest_nonzero(block.map(|p| (p, &a[p]))) else {
            break;
        };
        row_swap(&mut a, &mut u, &mut u_inv, t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !a[(i, t)].is_zero() {
                    let q = -a[(i, t)].div_floor(&a[(t, t)]);
                    row_add(&mut a, &mut u, &mut u_inv, i, t, &q);
                    dirty |= !a[(i, t)].is_zero();
                }
            }
            for j in t + 1..cols {
                if !a[(t, j)].is_zero() {
                    let q = -a[(t, j)].div_floor(&a[(t, t)]);
                    a.add_col(j, t, &q);
                    v.add_col(j, t, &q);
                    dirty |= !a[(t, j)].is_zero();
                }
            }
            if dirty {
                let col = (t..rows).map(|i| ((i, t), &a[(i, t)]));
                let row = (t + 1..cols).map(|j| ((t, j), &a[(t, j)]));
                let (pi, pj) = smallest_nonzero(col.chain(row)).expect("pivot line is nonzero");
                row_swap(&mut a, &mut u, &mut u_inv, t, pi);
                a.swap_cols(t, pj);
                v.swap_cols(t, pj);
                continue;
            }
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&a[(t, t)])));
            match offender {
                Some(i) => row_add(&mut a, &mut u, &mut u_inv, t, i, &BigInt::one()),
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }
    SmithDecomposition { u, u_inv, v, d: a }
}

/// Row-style Hermite normal form `H = U·M`: echelon, positive pivots,
/// entries above each pivot reduced into `[0, pivot)`.
pub fn hermite(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let cands = (r..rows).map(|i| ((i, c), &h[(i, c)]));
            let Some((p, _)) = smallest_nonzero(cands) else {
                break;
            };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..rows {
                if !h[(i, c)].is_zero() {
                    let q = -h[(i, c)].div_floor(&h[(r, c)]);
                    h.add_row(i, r, &q);
                    u.add_row(i, r, &q);
                    done &= h[(i, c)].is_zero();
                }
            }
            if done {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -h[(i, c)].div_floor(&h[(r, c)]);
            if !q.is_zero() {
                h.add_row(i, r, &q);
                u.add_row(i, r, &q);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Basis of the column span of `m`, as columns.
pub fn column_span_basis(m: &IntMatrix) -> IntMatrix {
    let (h, _) = hermite(&m.transpose());
    let nonzero = (0..h.rows()).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
    h.row_block(0..nonzero).transpose()
}

/// Columns form a basis of the saturated lattice `{v : M v = 0}`.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let s = smith(m);
    let r = s.rank();
    let cols: Vec<Vec<BigInt>> = (r..m.cols()).map(|j| s.v.column(j)).collect();
    IntMatrix::from_columns(m.cols(), &cols)
}

/// Exact solution `X` of `B·X = Y` when `B` has full column rank.
pub fn solve(b: &IntMatrix, y: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(b.rows(), y.rows(), "solve: row mismatch");
    let s = smith(b);
    let r = s.rank();
    assert_eq!(r, b.cols(), "solve needs full column rank");
    let uy = s.u.mul(y);
    let mut z = IntMatrix::zeros(b.cols(), y.cols());
    for i in 0..uy.rows() {
        for j in 0..y.cols() {
            let x = &uy[(i, j)];
            if i < r {
                let (q, rem) = x.div_rem(&s.d[(i, i)]);
                if !rem.is_zero() {
                    return None;
                }
                z[(i, j)] = q;
            } else if !x.is_zero() {
                return None;
            }
        }
    }
    Some(s.v.mul(&z))
}

/// Matrix of `A` in the basis `K` (columns), i.e. `X` with `K·X = A·K`.
pub fn restrict_to_kernel(a: &IntMatrix, k: &IntMatrix) -> Result<IntMatrix> {
    let ak = a.mul(k);
    solve(k, &ak).ok_or_else(|| Error::NotInvariant("A·K is not in the span of K".into()))
}

/// A finitely generated abelian group `Z^rank ⊕ Z/d₁ ⊕ … ⊕ Z/d_s`,
/// `2 ≤ d₁ | d₂ | … | d_s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FGAbelianGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl FGAbelianGroup {
    pub fn trivial() -> Self {
        FGAbelianGroup {
            rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FGAbelianGroup {
            rank,
            torsion: Vec::new(),
        }
    }

    /// `Z^rank ⊕ ⊕ Z/|f|` for arbitrary factors; `0` counts as a free summand
    /// and units are dropped. The result is in canonical form.
    pub fn from_factors(rank: usize, factors: &[BigInt]) -> Self {
        let mut rank = rank;
        let mut nontrivial = Vec::new();
        for f in factors {
            let f = f.abs();
            if f.is_zero() {
                rank += 1;
            } else if !f.is_one() {
                nontrivial.push(f);
            }
        }
        let diag = smith(&IntMatrix::diagonal(&nontrivial)).diagonal();
        FGAbelianGroup {
            rank,
            torsion: diag.into_iter().filter(|d| !d.is_one()).collect(),
        }
    }

    pub fn direct_sum(&self, other: &FGAbelianGroup) -> FGAbelianGroup {
        let factors: Vec<BigInt> = self.torsion.iter().chain(&other.torsion).cloned().collect();
        FGAbelianGroup::from_factors(self.rank + other.rank, &factors)
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Moduli of the coordinates: `0` for each free summand, then the torsion.
    pub fn moduli(&self) -> Vec<BigInt> {
        std::iter::repeat_n(BigInt::zero(), self.rank).chain(self.torsion.iter().cloned()).collect()
    }

    /// Parses the `Display` form, e.g. `"Z^2 + Z/2"`, `"Z"`, `"0"`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s == "0" {
            return Some(Self::trivial());
        }
        let mut rank = 0;
        let mut torsion = Vec::new();
        for part in s.split('+').map(str::trim) {
            if part == "Z" {
                rank += 1;
            } else if let Some(r) = part.strip_prefix("Z^") {
                rank += r.parse::<usize>().ok()?;
            } else {
                let d = part.strip_prefix("Z/")?;
                torsion.push(d.parse::<BigInt>().ok()?);
            }
        }
        Some(Self::from_factors(rank, &torsion))
    }
}

impl fmt::Display for FGAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// `Z^rows / im(M)` with canonical coordinates: free coordinates first, then
/// one residue per torsion factor.
#[derive(Clone, Debug)]
pub struct Cokernel {
    pub group: FGAbelianGroup,
    u: IntMatrix,
    u_inv: IntMatrix,
    /// (row of `U·v`, modulus) per output coordinate
    slots: Vec<(usize, BigInt)>,
}

impl Cokernel {
    pub fn new(m: &IntMatrix) -> Self {
        let s = smith(m);
        let diag = s.diagonal();
        let modulus = |i: usize| diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        let free = (0..m.rows()).filter(|&i| modulus(i).is_zero()).map(|i| (i, BigInt::zero()));
        let tors: Vec<(usize, BigInt)> = (0..m.rows())
            .map(|i| (i, modulus(i)))
            .filter(|(_, d)| !d.is_zero() && !d.is_one())
            .collect();
        let slots: Vec<(usize, BigInt)> = free.chain(tors).collect();
        let rank = slots.iter().filter(|(_, d)| d.is_zero()).count();
        let torsion = slots.iter().filter(|(_, d)| !d.is_zero()).map(|(_, d)| d.clone()).collect();
        Cokernel {
            group: FGAbelianGroup { rank, torsion },
            u: s.u,
            u_inv: s.u_inv,
            slots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.u.rows()
    }

    /// Coordinates of the class of `v`; torsion residues lie in `[0, d)`.
    pub fn coordinates(&self, v: &[BigInt]) -> Vec<BigInt> {
        let w = self.u.mul_vec(v);
        self.slots
            .iter()
            .map(|(i, d)| if d.is_zero() { w[*i].clone() } else { w[*i].mod_floor(d) })
            .collect()
    }

    /// A representative vector of the class with the given coordinates.
    pub fn lift(&self, coords: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coords.len(), self.slots.len(), "coordinate length mismatch");
        let mut w = vec![BigInt::zero(); self.u.rows()];
        for ((i, _), c) in self.slots.iter().zip(coords) {
            w[*i] = c.clone();
        }
        self.u_inv.mul_vec(&w)
    }
}

pub fn cokernel(m: &IntMatrix) -> Cokernel {
    Cokernel::new(m)
}

/// Matrix of the endomorphism induced by `B` on `coker(M)`, in the
/// coordinates of [`Cokernel`]: column `j` is the image of generator `j`.
pub fn induce_on_cokernel(b: &IntMatrix, m: &IntMatrix) -> Result<(Cokernel, IntMatrix)> {
    assert_eq!(b.rows(), m.rows(), "induce_on_cokernel: B must act on the rows of M");
    assert_eq!(b.rows(), b.cols(), "induce_on_cokernel: B must be square");
    let bm = b.mul(m);
    if m.cols() > 0 && !bm.is_zero() {
        let span = column_span_basis(m);
        if span.cols() == 0 || solve(&span, &bm).is_none() {
            return Err(Error::NotInvariant("B does not preserve im(M)".into()));
        }
    }
    let coker = Cokernel::new(m);
    let g = coker.slots.len();
    let mut out = IntMatrix::zeros(g, g);
    for j in 0..g {
        let mut e = vec![BigInt::zero(); g];
        e[j] = BigInt::one();
        let image = coker.coordinates(&b.mul_vec(&coker.lift(&e)));
        for (i, x) in image.into_iter().enumerate() {
            out[(i, j)] = x;
        }
    }
    Ok((coker, out))
}

/// `L / R` for a saturated lattice `L ⊆ Zⁿ` (basis columns) and a
/// sublattice `R ⊆ L` (spanning columns).
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub ambient: usize,
    pub lattice: IntMatrix,
    pub relations: IntMatrix,
    /// `R` in `L`-coordinates
    relations_in_lattice: IntMatrix,
}

impl Subquotient {
    pub fn new(lattice: IntMatrix, relations: IntMatrix) -> Result<Self> {
        let n = lattice.rows();
        assert_eq!(relations.rows(), n, "relations live in a different ambient space");
        let s = smith(&lattice);
        if s.rank() != lattice.cols() || s.diagonal().iter().any(|d| !d.is_one()) {
            return Err(Error::NotInvariant("lattice basis is not a saturated basis".into()));
        }
        let relations_in_lattice = if relations.cols() == 0 {
            IntMatrix::zeros(lattice.cols(), 0)
        } else {
            solve(&lattice, &relations).ok_or_else(|| Error::NotInvariant("relations are not inside the lattice".into()))?
        };
        Ok(Subquotient {
            ambient: n,
            lattice,
            relations,
            relations_in_lattice,
        })
    }

    /// The full lattice `Zⁿ` modulo nothing.
    pub fn whole(n: usize) -> Self {
        Subquotient {
            ambient: n,
            lattice: IntMatrix::identity(n),
            relations: IntMatrix::zeros(n, 0),
            relations_in_lattice: IntMatrix::zeros(n, 0),
        }
    }

    pub fn group(&self) -> FGAbelianGroup {
        Cokernel::new(&self.relations_in_lattice).group
    }
}

/// Kernel and cokernel of an endomorphism of a [`Subquotient`].
#[derive(Clone, Debug)]
pub struct GroupAndUnit {
    pub kernel: FGAbelianGroup,
    pub cokernel: FGAbelianGroup,
    /// coordinates of the given element in `cokernel`
    pub element: Vec<BigInt>,
    /// the endomorphism in lattice coordinates
    pub matrix_in_lattice: IntMatrix,
    coker: Cokernel,
    lattice: IntMatrix,
}

impl GroupAndUnit {
    /// Coordinates in the cokernel of any ambient vector of the lattice.
    pub fn cokernel_coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let col = IntMatrix::from_columns(v.len(), &[v.to_vec()]);
        let c = solve(&self.lattice, &col)?;
        Some(self.coker.coordinates(&c.column(0)))
    }

    /// An ambient representative of the cokernel class with these coordinates.
    pub fn cokernel_lift(&self, coords: &[BigInt]) -> Vec<BigInt> {
        self.lattice.mul_vec(&self.coker.lift(coords))
    }
}

/// Kernel and cokernel of `E` acting on `L/R` (`E` given as an ambient
/// `n×n` matrix preserving `L` and `R`), and the cokernel coordinates of
/// `element ∈ L`.
pub fn group_and_unit(sq: &Subquotient, e: &IntMatrix, element: &[BigInt]) -> Result<GroupAndUnit> {
    let lb = &sq.lattice;
    let r = lb.cols();
    let e_l = if r == 0 {
        IntMatrix::zeros(0, 0)
    } else {
        solve(lb, &e.mul(lb)).ok_or_else(|| Error::NotInvariant("endomorphism does not preserve the lattice".into()))?
    };
    let rel = &sq.relations_in_lattice;
    if rel.cols() > 0 {
        let er = e_l.mul(rel);
        if !er.is_zero() {
            let span = column_span_basis(rel);
            if span.cols() == 0 || solve(&span, &er).is_none() {
                return Err(Error::NotInvariant("endomorphism does not preserve the relations".into()));
            }
        }
    }

    let coker = Cokernel::new(&rel.hcat(&e_l));

    // P = {c : E_L c ∈ im R_L}, as the c-part of ker [E_L | R_L]
    let joint = kernel_basis(&e_l.hcat(rel));
    let preimage = column_span_basis(&joint.row_block(0..r));
    let kernel = if preimage.cols() == 0 {
        FGAbelianGroup::trivial()
    } else if rel.cols() == 0 {
        FGAbelianGroup::free(preimage.cols())
    } else {
        let rel_p = solve(&preimage, rel).ok_or_else(|| Error::NotInvariant("relations escape the kernel lattice".into()))?;
        Cokernel::new(&rel_p).group
    };

    let col = IntMatrix::from_columns(element.len(), &[element.to_vec()]);
    let elem_l = solve(lb, &col).ok_or_else(|| Error::NotInvariant("element is not in the lattice".into()))?;
    let coords = coker.coordinates(&elem_l.column(0));

    Ok(GroupAndUnit {
        kernel,
        cokernel: coker.group.clone(),
        element: coords,
        matrix_in_lattice: e_l,
        coker,
        lattice: lb.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn big(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check_smith(a: &IntMatrix) -> SmithDecomposition {
        let s = smith(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(a.rows()));
        assert!(s.u.determinant().abs().is_one());
        assert!(s.v.determinant().abs().is_one());
        s
    }

    #[test]
    fn smith_small_cases() {
        let s = check_smith(&m(&[&[2, 1], &[1, 2]]));
        assert_eq!(s.diagonal(), big(&[1, 3]));
        let s = check_smith(&IntMatrix::zeros(2, 3));
        assert_eq!(s.diagonal(), big(&[0, 0]));
        assert_eq!(s.u, IntMatrix::identity(2));
        let s = check_smith(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        let s = check_smith(&m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        assert_eq!(s.diagonal(), big(&[2, 6, 12]));
    }

    #[test]
    fn hermite_is_echelon() {
        let a = m(&[&[3, 6, 1], &[2, 4, 5], &[1, 2, 0]]);
        let (h, u) = hermite(&a);
        assert_eq!(u.mul(&a), h);
        assert!(u.determinant().abs().is_one());
        assert_eq!(h, m(&[&[1, 2, 0], &[0, 0, 1], &[0, 0, 0]]));
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&m(&[&[1, 0], &[0, 3]]));
        assert_eq!(k.cols(), 0);
        let k = kernel_basis(&IntMatrix::zeros(2, 3));
        assert_eq!(k.cols(), 3);
        assert_eq!(k.determinant().abs(), BigInt::one());
        let a = m(&[&[2, 4, 6]]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
        assert!(smith(&k).diagonal().iter().all(|d| d.is_one()));
    }

    #[test]
    fn cokernel_examples() {
        let c = cokernel(&m(&[&[2]]));
        assert_eq!(c.group.to_string(), "Z/2");
        let c = cokernel(&m(&[&[1, 0], &[0, 6], &[0, 0]]));
        assert_eq!(c.group, FGAbelianGroup::from_factors(1, &big(&[6])));
        let v = big(&[5, 7, -2]);
        let coords = c.coordinates(&v);
        assert_eq!(c.coordinates(&c.lift(&coords)), coords);
    }

    #[test]
    fn induced_map_hand_case() {
        // coker [[2],[0]] = Z/2 ⊕ Z, B = [[1,1],[0,1]]
        let (coker, b) = induce_on_cokernel(&m(&[&[1, 1], &[0, 1]]), &m(&[&[2], &[0]])).unwrap();
        assert_eq!(coker.group.to_string(), "Z + Z/2");
        // free generator e₂ ↦ e₁ + e₂, torsion generator e₁ ↦ e₁
        assert_eq!(b, m(&[&[1, 0], &[1, 1]]));
        let (_, z) = induce_on_cokernel(&IntMatrix::zeros(2, 2), &m(&[&[2], &[0]])).unwrap();
        assert!(z.is_zero());
        assert!(induce_on_cokernel(&m(&[&[0, 1], &[1, 0]]), &m(&[&[2], &[0]])).is_err());
    }

    #[test]
    fn restrict_examples() {
        let k = m(&[&[1, 0], &[1, 0], &[0, 1]]);
        let two = IntMatrix::identity(3).add(&IntMatrix::identity(3));
        assert_eq!(restrict_to_kernel(&two, &k).unwrap(), IntMatrix::identity(2).add(&IntMatrix::identity(2)));
        let swap = m(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        assert!(restrict_to_kernel(&swap, &k).is_err());
    }

    #[test]
    fn group_and_unit_trivial_cases() {
        let sq = Subquotient::whole(3);
        let g = group_and_unit(&sq, &IntMatrix::zeros(3, 3), &big(&[1, 2, 3])).unwrap();
        assert_eq!(g.kernel, FGAbelianGroup::free(3));
        assert_eq!(g.cokernel, FGAbelianGroup::free(3));
        let sq = Subquotient::whole(2);
        let g = group_and_unit(&sq, &IntMatrix::identity(2), &big(&[1, 0])).unwrap();
        assert!(g.kernel.is_trivial() && g.cokernel.is_trivial());
    }

    #[test]
    fn group_and_unit_on_quotient() {
        // (Z²)/(2Z ⊕ 0) = Z/2 ⊕ Z with E = diag(1, 0)
        let sq = Subquotient::new(IntMatrix::identity(2), m(&[&[2], &[0]])).unwrap();
        let g = group_and_unit(&sq, &m(&[&[1, 0], &[0, 0]]), &big(&[1, 1])).unwrap();
        assert_eq!(g.kernel, FGAbelianGroup::free(1));
        assert_eq!(g.cokernel, FGAbelianGroup::free(1));
        assert_eq!(g.element.len(), 1);
        assert!(g.element[0].abs().is_one());
        // E = 2 on Z/4: kernel Z/2, cokernel Z/2
        let sq = Subquotient::new(IntMatrix::identity(1), m(&[&[4]])).unwrap();
        let g = group_and_unit(&sq, &m(&[&[2]]), &big(&[3])).unwrap();
        assert_eq!(g.kernel.to_string(), "Z/2");
        assert_eq!(g.cokernel.to_string(), "Z/2");
        assert_eq!(g.element, big(&[1]));
    }

    #[test]
    fn group_display_and_parse() {
        let g = FGAbelianGroup::from_factors(2, &big(&[2, 1, 0]));
        assert_eq!(g.to_string(), "Z^3 + Z/2");
        assert_eq!(FGAbelianGroup::parse("Z^3 + Z/2"), Some(g));
        assert_eq!(FGAbelianGroup::from_factors(0, &big(&[2, 3])).to_string(), "Z/6");
        assert_eq!(FGAbelianGroup::trivial().to_string(), "0");
        assert_eq!(FGAbelianGroup::parse("0"), Some(FGAbelianGroup::trivial()));
        let a = FGAbelianGroup::from_factors(1, &big(&[4]));
        let b = FGAbelianGroup::from_factors(0, &big(&[6]));
        assert_eq!(a.direct_sum(&b).to_string(), "Z + Z/2 + Z/12");
    }
}
