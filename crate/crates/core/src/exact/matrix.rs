use num_traits::{One, Zero};

use super::poly::Poly;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Dense matrix of polynomial entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixQ {
    rows: usize,
    cols: usize,
    data: Vec<Poly>,
}

/// Result of [`row_reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowReduced {
    pub reduced: MatrixQ,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl MatrixQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixQ {
            rows,
            cols,
            data: vec![Poly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = MatrixQ::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Poly::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(MatrixQ {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_rational_rows(rows: &[Vec<Rational>], cols: usize) -> Self {
        let mut m = MatrixQ::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, Poly::constant(v.clone()));
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

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Poly) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Poly] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Poly> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_constant(&self) -> bool {
        self.data.iter().all(Poly::is_constant)
    }

    pub fn to_rational(&self) -> Result<Vec<Vec<Rational>>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|p| p.constant_value().ok_or(Error::ParametricRank))
                    .collect()
            })
            .collect()
    }

    pub fn mul(&self, other: &MatrixQ) -> Result<MatrixQ> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = MatrixQ::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + &(a * b);
                        out.set(i, j, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Poly]) -> Result<Vec<Poly>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Poly::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn subst(&self, binding: &std::collections::BTreeMap<super::Symbol, Poly>) -> MatrixQ {
        MatrixQ {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|p| p.subst_unchecked(binding)).collect(),
        }
    }
}

/// Reduced row echelon form of a parameter-free matrix.
pub fn row_reduce(m: &MatrixQ) -> Result<RowReduced> {
    let mut rows = m.to_rational()?;
    let pivots = rref(&mut rows, m.cols());
    Ok(RowReduced {
        reduced: MatrixQ::from_rational_rows(&rows, m.cols()),
        rank: pivots.len(),
        pivots,
    })
}

/// In-place reduced row echelon form; returns pivot columns.
pub fn rref(rows: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / rows[r][c].clone();
        if !inv.is_one() {
            for v in rows[r].iter_mut() {
                *v *= &inv;
            }
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..cols {
                    if !rows[r][j].is_zero() {
                        let t = &f * &rows[r][j];
                        rows[i][j] -= t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>], cols: usize) -> usize {
    let mut work = rows.to_vec();
    rref(&mut work, cols).len()
}

/// Basis of the null space `{x : A x = 0}`.
pub fn nullspace(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut work = rows.to_vec();
    let pivots = rref(&mut work, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -work[r][f].clone();
            }
            v
        })
        .collect()
}

/// Inverse of a square rational matrix, `None` when singular.
pub fn inverse(rows: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = rows.len();
    let mut aug: Vec<Vec<Rational>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    let pivots = rref(&mut aug, 2 * n);
    if (0..n).any(|i| pivots.get(i) != Some(&i)) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `A x = b`, returning one solution when consistent.
pub fn solve(rows: &[Vec<Rational>], cols: usize, b: &[Rational]) -> Option<Vec<Rational>> {
    let mut aug: Vec<Vec<Rational>> = rows
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut row = r.clone();
            row.push(v.clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug, cols + 1);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][cols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    fn q(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect()
    }

    #[test]
    fn rank_and_pivots() {
        let m = MatrixQ::from_rational_rows(&q(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]), 3);
        let r = row_reduce(&m).unwrap();
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.reduced.get(0, 2), &Poly::int(1));
    }

    #[test]
    fn parametric_rank_is_an_error() {
        let m = MatrixQ::from_rows(vec![vec![Poly::var("a"), Poly::one()]]).unwrap();
        assert_eq!(row_reduce(&m), Err(Error::ParametricRank));
    }

    #[test]
    fn inverse_and_solve() {
        let a = q(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, q(&[&[1, -1], &[-1, 2]]));
        assert!(inverse(&q(&[&[1, 2], &[2, 4]])).is_none());
        let x = solve(&a, 2, &[rat(3), rat(2)]).unwrap();
        assert_eq!(x, vec![rat(1), rat(1)]);
        assert!(solve(&q(&[&[1, 1], &[1, 1]]), 2, &[rat(1), rat(2)]).is_none());
    }

    #[test]
    fn nullspace_basis() {
        let ns = nullspace(&q(&[&[1, 1, 0]]), 3);
        assert_eq!(ns.len(), 2);
        assert_eq!(ns[0], vec![rat(-1), rat(1), rat(0)]);
    }
}
