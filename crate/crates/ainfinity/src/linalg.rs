//! Deterministic exact linear algebra: row reduction with lexicographic
//! pivoting, solving, nullspaces, and subquotients (cohomology of a two-step
//! complex). Same input ⇒ same output, bit for bit — every report built on
//! top of this module is reproducible.

use crate::field::{FieldSpec, K};
use crate::graded::Sv;

/// A dense matrix over one exact field, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub field: FieldSpec,
    data: Vec<K>,
}

impl Mat {
    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> Mat {
        Mat {
            rows,
            cols,
            field,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Mat {
        let mut m = Mat::zero(field, n, n);
        for i in 0..n {
            *m.at_mut(i, i) = field.one();
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> &K {
        &self.data[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut K {
        &mut self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: K) {
        self.data[r * self.cols + c] = v;
    }

    /// Column `c` as a sparse vector.
    pub fn col(&self, c: usize) -> Sv {
        (0..self.rows)
            .filter(|&r| !self.at(r, c).is_zero())
            .map(|r| (r, self.at(r, c).clone()))
            .collect()
    }

    pub fn set_col(&mut self, c: usize, v: &Sv) {
        for r in 0..self.rows {
            self.set(r, c, self.field.zero());
        }
        for (r, x) in v {
            self.set(*r, c, x.clone());
        }
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Mat::zero(self.field, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(r, c).add(&a.mul(b));
                    out.set(r, c, cur);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &Sv) -> Sv {
        let mut out: Vec<(usize, K)> = Vec::new();
        for (c, x) in v {
            for r in 0..self.rows {
                let a = self.at(r, *c);
                if !a.is_zero() {
                    out.push((r, a.mul(x)));
                }
            }
        }
        crate::graded::sv_normalize(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

/// Result of row reduction: the reduced matrix, pivot positions
/// `(row, col)` in order, and the rank.
#[derive(Debug, Clone)]
pub struct Rref {
    pub mat: Mat,
    pub pivots: Vec<(usize, usize)>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        self.pivots.iter().map(|(_, c)| *c).collect()
    }
}

/// Reduced row echelon form with deterministic (lexicographic) pivoting:
/// columns are scanned left to right and the first row with a nonzero entry
/// at or below the current pivot row is chosen.
pub fn rref(m: &Mat) -> Rref {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut pr = 0usize;
    for pc in 0..a.cols {
        if pr >= a.rows {
            break;
        }
        let Some(row) = (pr..a.rows).find(|&r| !a.at(r, pc).is_zero()) else {
            continue;
        };
        // Swap into place.
        if row != pr {
            for c in 0..a.cols {
                let tmp = a.at(pr, c).clone();
                let v = a.at(row, c).clone();
                a.set(pr, c, v);
                a.set(row, c, tmp);
            }
        }
        // Normalize the pivot row.
        let inv = a.at(pr, pc).inv();
        for c in 0..a.cols {
            let v = a.at(pr, c).mul(&inv);
            a.set(pr, c, v);
        }
        // Clear the column above and below.
        for r in 0..a.rows {
            if r == pr || a.at(r, pc).is_zero() {
                continue;
            }
            let factor = a.at(r, pc).clone();
            for c in 0..a.cols {
                let v = a.at(r, c).sub(&factor.mul(a.at(pr, c)));
                a.set(r, c, v);
            }
        }
        pivots.push((pr, pc));
        pr += 1;
    }
    Rref { mat: a, pivots }
}

pub fn rank(m: &Mat) -> usize {
    rref(m).rank()
}

/// Solves `m · x = b` exactly. Returns the canonical solution with all free
/// variables set to zero, or `None` when inconsistent.
pub fn solve(m: &Mat, b: &Sv) -> Option<Sv> {
    let mut aug = Mat::zero(m.field, m.rows, m.cols + 1);
    for r in 0..m.rows {
        for c in 0..m.cols {
            aug.set(r, c, m.at(r, c).clone());
        }
    }
    for (r, x) in b {
        aug.set(*r, m.cols, x.clone());
    }
    let red = rref(&aug);
    // Inconsistent iff some pivot lands in the augmented column.
    if red.pivots.iter().any(|(_, c)| *c == m.cols) {
        return None;
    }
    let mut x: Vec<(usize, K)> = Vec::new();
    for (r, c) in &red.pivots {
        let v = red.mat.at(*r, m.cols);
        if !v.is_zero() {
            x.push((*c, v.clone()));
        }
    }
    x.sort_by_key(|(i, _)| *i);
    Some(x)
}

/// A canonical basis of the nullspace (one vector per free column, with the
/// free variable set to one), as columns of a matrix.
pub fn nullspace(m: &Mat) -> Mat {
    let red = rref(m);
    let pivot_cols = red.pivot_cols();
    let free_cols: Vec<usize> = (0..m.cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut out = Mat::zero(m.field, m.cols, free_cols.len());
    for (k, &fc) in free_cols.iter().enumerate() {
        out.set(fc, k, m.field.one());
        for (r, c) in &red.pivots {
            let v = red.mat.at(*r, fc);
            if !v.is_zero() {
                out.set(*c, k, v.neg());
            }
        }
    }
    out
}

/// Is the square matrix invertible?
pub fn invertible(m: &Mat) -> bool {
    m.rows == m.cols && rank(m) == m.rows
}

/// Inverse of a square invertible matrix (panics otherwise; callers check).
pub fn inverse(m: &Mat) -> Mat {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut aug = Mat::zero(m.field, n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            aug.set(r, c, m.at(r, c).clone());
        }
        aug.set(r, n + r, m.field.one());
    }
    let red = rref(&aug);
    assert!(
        red.pivots.len() == n && red.pivots.iter().all(|(_, c)| *c < n),
        "matrix not invertible"
    );
    let mut out = Mat::zero(m.field, n, n);
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, red.mat.at(r, n + c).clone());
        }
    }
    out
}

/// The subquotient `ker(out_map) / im(in_map)` of the middle term of a
/// two-step complex `X --in--> Y --out--> Z` (with `out ∘ in = 0`), together
/// with everything needed to work with it: canonical representatives and a
/// reduction map from cycles to quotient coordinates.
#[derive(Debug, Clone)]
pub struct Subquotient {
    pub field: FieldSpec,
    /// dim Y.
    pub ambient_dim: usize,
    /// Columns: a canonical basis of ker(out_map) in Y-coordinates.
    kernel: Mat,
    /// Row-reduced coordinates of im(in_map) inside the kernel basis.
    boundaries: Rref,
    /// Kernel-coordinate indices that descend to a basis of the quotient
    /// (the non-pivot coordinates of `boundaries`).
    rep_coords: Vec<usize>,
}

impl Subquotient {
    /// `in_map`: dim-Y × dim-X matrix; `out_map`: dim-Z × dim-Y matrix.
    pub fn new(in_map: &Mat, out_map: &Mat) -> Subquotient {
        assert_eq!(in_map.rows, out_map.cols);
        let field = in_map.field;
        let kernel = nullspace(out_map);
        // Express each boundary (column of in_map) in kernel coordinates.
        let mut coords = Mat::zero(field, kernel.cols, in_map.cols);
        for j in 0..in_map.cols {
            let b = in_map.col(j);
            if b.is_empty() {
                continue;
            }
            let c = solve(&kernel, &b)
                .expect("boundary not a cycle: out ∘ in != 0");
            coords.set_col(j, &c);
        }
        // Row space of the boundary coordinates, reduced: its pivots mark
        // kernel coordinates that die in the quotient.
        let mut t = Mat::zero(field, coords.cols, coords.rows);
        for r in 0..coords.rows {
            for c in 0..coords.cols {
                t.set(c, r, coords.at(r, c).clone());
            }
        }
        let boundaries = rref(&t);
        let pivot_cols = boundaries.pivot_cols();
        let rep_coords = (0..kernel.cols)
            .filter(|c| !pivot_cols.contains(c))
            .collect();
        Subquotient {
            field,
            ambient_dim: in_map.rows,
            kernel,
            boundaries,
            rep_coords,
        }
    }

    pub fn dim(&self) -> usize {
        self.rep_coords.len()
    }

    /// The canonical representative (in Y-coordinates) of the k-th quotient
    /// basis vector.
    pub fn representative(&self, k: usize) -> Sv {
        self.kernel
            .col_from_kernel_coords(&vec![(self.rep_coords[k], self.field.one())])
    }

    /// Reduces a cycle (in Y-coordinates) to quotient coordinates.
    /// Returns `None` if the vector is not in the kernel.
    pub fn reduce(&self, v: &Sv) -> Option<Sv> {
        if v.is_empty() {
            return Some(Vec::new());
        }
        let mut coords = solve(&self.kernel, v)?;
        // Subtract boundary rows to eliminate pivot coordinates.
        for (r, c) in &self.boundaries.pivots {
            let cur = coords
                .iter()
                .find(|(i, _)| i == c)
                .map(|(_, x)| x.clone())
                .unwrap_or_else(|| self.field.zero());
            if cur.is_zero() {
                continue;
            }
            let mut delta: Vec<(usize, K)> = Vec::new();
            for cc in 0..self.boundaries.mat.cols {
                let x = self.boundaries.mat.at(*r, cc);
                if !x.is_zero() {
                    delta.push((cc, x.mul(&cur).neg()));
                }
            }
            coords = crate::graded::sv_add(&coords, &delta);
        }
        // Read off the representative coordinates.
        let mut out: Vec<(usize, K)> = Vec::new();
        for (k, &rc) in self.rep_coords.iter().enumerate() {
            if let Some((_, x)) = coords.iter().find(|(i, _)| *i == rc) {
                out.push((k, x.clone()));
            }
        }
        // All pivot coordinates must now be zero; anything left over would
        // mean the reduction failed, which cannot happen for a cycle.
        debug_assert!(coords
            .iter()
            .all(|(i, x)| self.rep_coords.contains(i) || x.is_zero()));
        Some(out)
    }
}

impl Mat {
    /// Linear combination of this matrix's columns given by sparse
    /// coefficients (used for kernel-coordinate → ambient conversion).
    fn col_from_kernel_coords(&self, coords: &Sv) -> Sv {
        let mut out: Vec<(usize, K)> = Vec::new();
        for (j, c) in coords {
            for r in 0..self.rows {
                let a = self.at(r, *j);
                if !a.is_zero() {
                    out.push((r, a.mul(c)));
                }
            }
        }
        crate::graded::sv_normalize(out)
    }
}
