use num_traits::{One, Zero};
use serde::Serialize;

use super::{koszul, Parity, SparseVec, SuperAlgebra};
use crate::error::{Error, Result};
use crate::exact::{nullspace, rank, rref, Rational};

/// Graded subspace given by reduced row echelon bases of its even and odd parts,
/// in the coordinates of the parent's even and odd basis respectively.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Subspace {
    pub n_even: usize,
    pub n_odd: usize,
    #[serde(skip)]
    pub even: Vec<Vec<Rational>>,
    #[serde(skip)]
    pub odd: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn zero(n_even: usize, n_odd: usize) -> Self {
        Subspace {
            n_even,
            n_odd,
            even: Vec::new(),
            odd: Vec::new(),
        }
    }

    pub fn whole(n_even: usize, n_odd: usize) -> Self {
        let id = |n: usize| {
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
                .collect()
        };
        Subspace {
            n_even,
            n_odd,
            even: id(n_even),
            odd: id(n_odd),
        }
    }

    /// Span of full-coordinate vectors; mixed vectors contribute both
    /// homogeneous components.
    pub fn span(n_even: usize, n_odd: usize, vectors: &[Vec<Rational>]) -> Self {
        let mut even: Vec<Vec<Rational>> = Vec::new();
        let mut odd: Vec<Vec<Rational>> = Vec::new();
        for v in vectors {
            let e = v[..n_even].to_vec();
            let o = v[n_even..].to_vec();
            if e.iter().any(|x| !x.is_zero()) {
                even.push(e);
            }
            if o.iter().any(|x| !x.is_zero()) {
                odd.push(o);
            }
        }
        Subspace::from_parts(n_even, n_odd, even, odd)
    }

    pub fn from_parts(n_even: usize, n_odd: usize, mut even: Vec<Vec<Rational>>, mut odd: Vec<Vec<Rational>>) -> Self {
        let pe = rref(&mut even, n_even).len();
        even.truncate(pe);
        let po = rref(&mut odd, n_odd).len();
        odd.truncate(po);
        Subspace { n_even, n_odd, even, odd }
    }

    pub fn dim(&self) -> usize {
        self.even.len() + self.odd.len()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.even.len(), self.odd.len())
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn part(&self, p: Parity) -> &Vec<Vec<Rational>> {
        match p {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    /// Basis vectors in full coordinates, even part first.
    pub fn basis(&self) -> Vec<Vec<Rational>> {
        let n = self.n_even + self.n_odd;
        let mut out = Vec::new();
        for r in &self.even {
            let mut v = vec![Rational::zero(); n];
            v[..self.n_even].clone_from_slice(r);
            out.push(v);
        }
        for r in &self.odd {
            let mut v = vec![Rational::zero(); n];
            v[self.n_even..].clone_from_slice(r);
            out.push(v);
        }
        out
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let in_part = |rows: &Vec<Vec<Rational>>, part: &[Rational], n: usize| {
            if part.iter().all(Zero::is_zero) {
                return true;
            }
            let mut m = rows.clone();
            m.push(part.to_vec());
            rank(&m, n) == rows.len()
        };
        in_part(&self.even, &v[..self.n_even], self.n_even) && in_part(&self.odd, &v[self.n_even..], self.n_odd)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis().iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut even = self.even.clone();
        even.extend(other.even.iter().cloned());
        let mut odd = self.odd.clone();
        odd.extend(other.odd.iter().cloned());
        Subspace::from_parts(self.n_even, self.n_odd, even, odd)
    }
}

pub(crate) fn to_dense(v: &SparseVec, n: usize) -> Result<Vec<Rational>> {
    let mut out = vec![Rational::zero(); n];
    for (k, c) in v {
        out[*k] = c.constant_value().ok_or(Error::Parametric)?;
    }
    Ok(out)
}

pub(crate) fn to_sparse(v: &[Rational]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, crate::exact::Poly::constant(c.clone())))
        .collect()
}

fn require_constant(alg: &SuperAlgebra) -> Result<()> {
    if alg.is_parametric() {
        Err(Error::Parametric)
    } else {
        Ok(())
    }
}

/// `{x : [b, x] = 0 for every b}`.
pub fn right_annihilator(alg: &SuperAlgebra) -> Result<Subspace> {
    require_constant(alg)?;
    let n = alg.dim();
    let (ne, no) = (alg.n_even(), alg.n_odd());
    let solve_part = |cols: std::ops::Range<usize>| -> Result<Vec<Vec<Rational>>> {
        let width = cols.len();
        let mut rows = Vec::new();
        for b in 0..n {
            let mut block = vec![vec![Rational::zero(); width]; n];
            for (c, x) in cols.clone().enumerate() {
                for (k, v) in alg.bracket(b, x) {
                    block[*k][c] = v.constant_value().ok_or(Error::Parametric)?;
                }
            }
            rows.extend(block.into_iter().filter(|r| r.iter().any(|v| !v.is_zero())));
        }
        Ok(nullspace(&rows, width))
    };
    let even = solve_part(0..ne)?;
    let odd = solve_part(ne..n)?;
    Ok(Subspace::from_parts(ne, no, even, odd))
}

/// Smallest two-sided ideal containing a subspace.
pub fn ideal_closure(alg: &SuperAlgebra, start: Subspace) -> Result<Subspace> {
    let n = alg.dim();
    let mut cur = start;
    loop {
        let mut gens = cur.basis();
        for v in cur.basis() {
            let sv = to_sparse(&v);
            for b in 0..n {
                gens.push(to_dense(&alg.mul_basis_left(b, &sv), n)?);
                gens.push(to_dense(&alg.mul_basis_right(&sv, b), n)?);
            }
        }
        let next = Subspace::span(alg.n_even(), alg.n_odd(), &gens);
        if next.dim() == cur.dim() {
            return Ok(next);
        }
        cur = next;
    }
}

/// Ideal generated by `[x,y] + (-1)^{|x||y|}[y,x]`.
pub fn skew_ideal(alg: &SuperAlgebra) -> Result<Subspace> {
    require_constant(alg)?;
    let n = alg.dim();
    let mut gens = Vec::new();
    for a in 0..n {
        for b in a..n {
            let mut r = alg.bracket(a, b).clone();
            super::add_scaled(&mut r, alg.bracket(b, a), &crate::exact::Poly::int(koszul(alg.parity(a), alg.parity(b))));
            if !r.is_empty() {
                gens.push(to_dense(&r, n)?);
            }
        }
    }
    ideal_closure(alg, Subspace::span(alg.n_even(), alg.n_odd(), &gens))
}

pub fn is_two_sided_ideal(alg: &SuperAlgebra, sub: &Subspace) -> Result<bool> {
    require_constant(alg)?;
    let n = alg.dim();
    for v in sub.basis() {
        let sv = to_sparse(&v);
        for b in 0..n {
            if !sub.contains(&to_dense(&alg.mul_basis_left(b, &sv), n)?)
                || !sub.contains(&to_dense(&alg.mul_basis_right(&sv, b), n)?)
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

type Mat = Vec<Vec<Rational>>;

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    let t = &a[i][k] * &b[k][j];
                    out[i][j] += t;
                }
            }
        }
    }
    out
}

fn mat_comb(a: &Mat, b: &Mat, sb: i64) -> Mat {
    let s = Rational::from_integer(sb.into());
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + &(y * &s)).collect())
        .collect()
}

fn is_zero_mat(m: &Mat) -> bool {
    m.iter().all(|r| r.iter().all(Zero::is_zero))
}

/// Failures of the right-multiplication operator algebra.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RightMultReport {
    /// Pairs where `R_[a,b] != R_b R_a - (-1)^{|a||b|} R_a R_b`.
    pub closure_failures: Vec<(String, String)>,
    /// Triples where the super commutator of right operators breaks super Jacobi.
    pub jacobi_failures: Vec<(String, String, String)>,
}

impl RightMultReport {
    pub fn is_empty(&self) -> bool {
        self.closure_failures.is_empty() && self.jacobi_failures.is_empty()
    }
}

/// Checks that right multiplications `R_x(y) = [y, x]` span a Lie
/// superalgebra under the super commutator.
pub fn right_mult_closure(alg: &SuperAlgebra) -> Result<RightMultReport> {
    require_constant(alg)?;
    let leib = alg.retag(super::Kind::Leibniz)?;
    if !super::check_super_leibniz(&leib)?.is_empty() {
        return Err(Error::Precondition("the super Leibniz identity fails".into()));
    }
    let n = alg.dim();
    // r[x][row][col]: column y holds [y, x]
    let mut r: Vec<Mat> = vec![vec![vec![Rational::zero(); n]; n]; n];
    for x in 0..n {
        for y in 0..n {
            for (k, c) in alg.bracket(y, x) {
                r[x][*k][y] = c.constant_value().ok_or(Error::Parametric)?;
            }
        }
    }
    let op_of = |v: &SparseVec| -> Result<Mat> {
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (k, c) in v {
            let c = c.constant_value().ok_or(Error::Parametric)?;
            for i in 0..n {
                for j in 0..n {
                    if !r[*k][i][j].is_zero() {
                        m[i][j] += &r[*k][i][j] * &c;
                    }
                }
            }
        }
        Ok(m)
    };
    let bracket_ops = |a: &Mat, pa: Parity, b: &Mat, pb: Parity| -> Mat {
        mat_comb(&mat_mul(a, b), &mat_mul(b, a), -koszul(pa, pb))
    };

    let mut report = RightMultReport::default();
    for a in 0..n {
        for b in 0..n {
            let lhs = op_of(alg.bracket(a, b))?;
            let rhs = mat_comb(&mat_mul(&r[b], &r[a]), &mat_mul(&r[a], &r[b]), -koszul(alg.parity(a), alg.parity(b)));
            if lhs != rhs {
                report
                    .closure_failures
                    .push((alg.basis_name(a).to_string(), alg.basis_name(b).to_string()));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (pa, pb, pc) = (alg.parity(a), alg.parity(b), alg.parity(c));
                let bc = bracket_ops(&r[b], pb, &r[c], pc);
                let ca = bracket_ops(&r[c], pc, &r[a], pa);
                let ab = bracket_ops(&r[a], pa, &r[b], pb);
                let t1 = bracket_ops(&r[a], pa, &bc, pb.add(pc));
                let t2 = bracket_ops(&r[b], pb, &ca, pc.add(pa));
                let t3 = bracket_ops(&r[c], pc, &ab, pa.add(pb));
                let sum = mat_comb(
                    &mat_comb(&scale(&t1, koszul(pa, pc)), &t2, koszul(pb, pa)),
                    &t3,
                    koszul(pc, pb),
                );
                if !is_zero_mat(&sum) {
                    report.jacobi_failures.push((
                        alg.basis_name(a).to_string(),
                        alg.basis_name(b).to_string(),
                        alg.basis_name(c).to_string(),
                    ));
                }
            }
        }
    }
    Ok(report)
}

fn scale(m: &Mat, s: i64) -> Mat {
    let s = Rational::from_integer(s.into());
    m.iter().map(|r| r.iter().map(|x| x * &s).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::superalg::{basis_names, Builder, Kind};

    fn nf(n: usize) -> SuperAlgebra {
        let mut b = Builder::new("NF", Kind::Leibniz, basis_names("X", 1, n), vec![]);
        for i in 0..n - 1 {
            b.add_int(i, 0, i + 1, 1);
        }
        b.build().unwrap()
    }

    #[test]
    fn annihilator_of_null_filiform() {
        let ann = right_annihilator(&nf(4)).unwrap();
        assert_eq!(ann.dims(), (3, 0));
        assert!(!ann.contains(&[rat(1), rat(0), rat(0), rat(0)]));
        assert!(is_two_sided_ideal(&nf(4), &ann).unwrap());
    }

    #[test]
    fn skew_ideal_inside_annihilator() {
        let g = nf(5);
        let i = skew_ideal(&g).unwrap();
        assert!(i.is_subspace_of(&right_annihilator(&g).unwrap()));
    }

    #[test]
    fn right_operators_close() {
        assert!(right_mult_closure(&nf(4)).unwrap().is_empty());
    }

    #[test]
    fn span_and_sum() {
        let s = Subspace::span(2, 1, &[vec![rat(1), rat(1), rat(0)], vec![rat(2), rat(2), rat(0)]]);
        assert_eq!(s.dims(), (1, 0));
        let t = s.sum(&Subspace::whole(2, 1));
        assert_eq!(t.dim(), 3);
    }
}
