//! Dense matrices over [`Scalar`]: rank, null space and consistent solves.
//!
//! Rational matrices are reduced exactly. As soon as one entry is complex the
//! whole matrix is promoted and reduced with complete pivoting; a pivot counts
//! as zero when it falls below `zero_threshold` times the largest entry.

use crate::scalar::{Scalar, TolerancePolicy};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Build from columns.
    pub fn from_cols(cols: Vec<Vec<Scalar>>) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(r, c);
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), r, "ragged matrix");
            for (i, x) in col.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(Scalar::is_exact)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (j, xj) in x.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_exact_zero() && !xj.is_exact_zero() {
                        acc += &(a * xj);
                    }
                }
                acc
            })
            .collect()
    }

    fn promoted(&self, policy: &TolerancePolicy) -> Matrix {
        if self.is_exact() {
            return self.clone();
        }
        let p = policy.precision_bits;
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|x| Scalar::Complex(x.to_complex(p)))
                .collect(),
        }
    }
}

/// Reduced row echelon form of `[A | B]` where pivots are chosen in the
/// first `a_cols` columns only.
struct Reduced {
    m: Matrix,
    rank: usize,
    /// pivot column of each of the first `rank` rows
    pivots: Vec<usize>,
}

fn reduce(m: &Matrix, a_cols: usize, policy: &TolerancePolicy) -> Reduced {
    let mut m = m.promoted(policy);
    let exact = m.is_exact();
    let rows = m.rows;
    let cols = m.cols;
    let scale = {
        let mut s = 0.0f64;
        for i in 0..rows {
            for j in 0..a_cols {
                s = s.max(m.get(i, j).magnitude());
            }
        }
        s
    };
    let mut pivots = Vec::new();
    let mut used = vec![false; a_cols];
    let mut rank = 0;
    let mut next_col = 0;
    while rank < rows {
        // choose pivot
        let choice = if exact {
            let mut found = None;
            while next_col < a_cols && found.is_none() {
                if let Some(r) = (rank..rows).find(|&r| !m.get(r, next_col).is_exact_zero()) {
                    found = Some((r, next_col));
                }
                next_col += 1;
            }
            found
        } else {
            let mut best: Option<(usize, usize, f64)> = None;
            for r in rank..rows {
                for c in 0..a_cols {
                    if used[c] {
                        continue;
                    }
                    let v = m.get(r, c).magnitude();
                    if best.is_none_or(|b| v > b.2) {
                        best = Some((r, c, v));
                    }
                }
            }
            match best {
                Some((r, c, v)) if v > 0.0 && !policy.negligible(v, scale) => Some((r, c)),
                _ => None,
            }
        };
        let Some((r, c)) = choice else { break };
        if r != rank {
            for j in 0..cols {
                m.data.swap(r * cols + j, rank * cols + j);
            }
        }
        let inv = m.get(rank, c).recip();
        for j in 0..cols {
            let v = m.get(rank, j);
            if !v.is_exact_zero() {
                let nv = v * &inv;
                m.set(rank, j, nv);
            }
        }
        m.set(rank, c, Scalar::one());
        for i in 0..rows {
            if i == rank {
                continue;
            }
            let f = m.get(i, c).clone();
            if f.is_exact_zero() {
                continue;
            }
            for j in 0..cols {
                let pj = m.get(rank, j);
                if pj.is_exact_zero() {
                    continue;
                }
                let nv = m.get(i, j) - &(&f * pj);
                m.set(i, j, nv);
            }
            m.set(i, c, Scalar::zero());
        }
        used[c] = true;
        pivots.push(c);
        rank += 1;
    }
    Reduced { m, rank, pivots }
}

pub fn rank(a: &Matrix, policy: &TolerancePolicy) -> usize {
    reduce(a, a.cols, policy).rank
}

fn kernel_from(red: &Reduced, a_cols: usize) -> Vec<Vec<Scalar>> {
    let mut is_pivot = vec![false; a_cols];
    for &c in &red.pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in 0..a_cols {
        if is_pivot[free] {
            continue;
        }
        let mut v = vec![Scalar::zero(); a_cols];
        v[free] = Scalar::one();
        for (i, &pc) in red.pivots.iter().enumerate() {
            v[pc] = -red.m.get(i, free);
        }
        basis.push(v);
    }
    basis
}

/// Basis of the null space of `a`, one vector per non-pivot column.
pub fn kernel(a: &Matrix, policy: &TolerancePolicy) -> Vec<Vec<Scalar>> {
    let red = reduce(a, a.cols, policy);
    kernel_from(&red, a.cols)
}

#[derive(Clone, Debug)]
pub struct Solution {
    /// particular solution with all free variables set to zero
    pub particular: Vec<Scalar>,
    pub kernel: Vec<Vec<Scalar>>,
}

/// Solve `a x = b`; `None` when the system is inconsistent (exactly, or
/// beyond the relative tolerance for complex systems).
pub fn solve(a: &Matrix, b: &[Scalar], policy: &TolerancePolicy) -> Option<Solution> {
    assert_eq!(a.rows, b.len());
    let mut aug = Matrix::zeros(a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, a.cols, b[i].clone());
    }
    let red = reduce(&aug, a.cols, policy);
    let mut x = vec![Scalar::zero(); a.cols];
    for (i, &pc) in red.pivots.iter().enumerate() {
        x[pc] = red.m.get(i, a.cols).clone();
    }
    if red.m.is_exact() {
        if (red.rank..a.rows).any(|i| !red.m.get(i, a.cols).is_exact_zero()) {
            return None;
        }
    } else {
        let r = a.mul_vec(&x);
        let xs = x.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        let bs = b.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        let scale = (a.max_magnitude() * xs * a.cols as f64).max(bs);
        let res = r
            .iter()
            .zip(b)
            .map(|(ri, bi)| (ri - bi).magnitude())
            .fold(0.0, f64::max);
        if !policy.negligible(res, scale) {
            return None;
        }
    }
    Some(Solution {
        particular: x,
        kernel: kernel_from(&red, a.cols),
    })
}

/// Least-squares solution through the normal equations `A^H A x = A^H b`.
pub fn least_squares(a: &Matrix, b: &[Scalar], policy: &TolerancePolicy) -> Option<Vec<Scalar>> {
    let ah = {
        let mut t = a.transpose();
        for x in t.data.iter_mut() {
            *x = x.conj();
        }
        t
    };
    let mut n = Matrix::zeros(a.cols, a.cols);
    for i in 0..a.cols {
        for j in 0..a.cols {
            let mut acc = Scalar::zero();
            for k in 0..a.rows {
                acc += &(ah.get(i, k) * a.get(k, j));
            }
            n.set(i, j, acc);
        }
    }
    let rhs = ah.mul_vec(b);
    solve(&n, &rhs, policy).map(|s| s.particular)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn exact_rank_and_kernel() {
        let p = TolerancePolicy::default();
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a, &p), 2);
        let k = kernel(&a, &p);
        assert_eq!(k.len(), 1);
        assert!(a.mul_vec(&k[0]).iter().all(Scalar::is_exact_zero));
    }

    #[test]
    fn complex_rank_uses_threshold() {
        let p = TolerancePolicy::default();
        let a = m(&[&[1, 2], &[2, 4]]);
        let c = Matrix::from_rows(
            (0..2)
                .map(|i| (0..2).map(|j| Scalar::Complex(a.get(i, j).to_complex(256))).collect())
                .collect(),
        );
        assert_eq!(rank(&c, &p), 1);
        assert_eq!(kernel(&c, &p).len(), 1);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let p = TolerancePolicy::default();
        let a = m(&[&[1, 1], &[1, -1], &[2, 0]]);
        let b: Vec<Scalar> = [3, 1, 4].iter().map(|&x| Scalar::from_int(x)).collect();
        let s = solve(&a, &b, &p).unwrap();
        assert_eq!(s.particular, vec![Scalar::from_int(2), Scalar::from_int(1)]);
        let bad: Vec<Scalar> = [3, 1, 5].iter().map(|&x| Scalar::from_int(x)).collect();
        assert!(solve(&a, &bad, &p).is_none());
    }

    #[test]
    fn least_squares_recovers_consistent_solution() {
        let p = TolerancePolicy::default();
        let a = m(&[&[1, 1], &[1, -1], &[2, 0]]);
        let b: Vec<Scalar> = [3, 1, 4].iter().map(|&x| Scalar::from_int(x)).collect();
        let x = least_squares(&a, &b, &p).unwrap();
        assert_eq!(x, vec![Scalar::from_int(2), Scalar::from_int(1)]);
    }
}
