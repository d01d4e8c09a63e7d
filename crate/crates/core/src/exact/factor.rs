//! Extraction of linear factors from multivariate polynomials.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{Poly, Symbol};
use super::rational::{rat, Rational};

/// `p = constant * prod(factor^mult) * residual` with every factor linear and
/// monic, and `residual` monic with no further linear factor found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub constant: Rational,
    pub factors: Vec<(Poly, u32)>,
    pub residual: Poly,
}

impl Factorization {
    pub fn expand(&self) -> Poly {
        let mut acc = Poly::constant(self.constant.clone());
        for (f, e) in &self.factors {
            acc = &acc * &f.pow(*e);
        }
        &acc * &self.residual
    }
}

const MAX_CANDIDATES: usize = 64;
const DIVISOR_LIMIT: u64 = 1_000_000_000_000;

pub fn linear_factors(p: &Poly) -> Factorization {
    if p.is_zero() {
        return Factorization {
            constant: Rational::zero(),
            factors: Vec::new(),
            residual: Poly::one(),
        };
    }
    let constant = p.leading_coefficient();
    let mut q = p.monic();
    let mut found: BTreeMap<Poly, u32> = BTreeMap::new();

    let content = q.monomial_content();
    for (s, e) in content.factors() {
        *found.entry(Poly::symbol(s.clone())).or_default() += e;
    }
    q = q.div_monomial(&content).expect("content divides");

    'outer: loop {
        if q.is_constant() {
            break;
        }
        if q.degree() == 1 {
            *found.entry(q.monic()).or_default() += 1;
            q = Poly::one();
            break;
        }
        for x in q.variables() {
            if let Some((factor, quotient)) = find_factor_in(&q, &x) {
                *found.entry(factor.monic()).or_default() += 1;
                q = quotient.monic();
                continue 'outer;
            }
        }
        break;
    }

    let mut factors: Vec<(Poly, u32)> = found.into_iter().collect();
    factors.sort_by_cached_key(|(f, _)| f.to_string());
    let residual = q.monic();
    Factorization {
        constant,
        factors,
        residual,
    }
}

/// Finds `x - r` dividing `q` with `r` affine in the other variables.
fn find_factor_in(q: &Poly, x: &Symbol) -> Option<(Poly, Poly)> {
    let d = q.degree_in(x);
    if d == 0 {
        return None;
    }
    let coeffs: Vec<Poly> = (0..=d).map(|k| q.coeff_of(x, k)).collect();
    let others: Vec<Symbol> = q.variables().into_iter().filter(|s| s != x).collect();

    let roots_at = |pt: &BTreeMap<Symbol, Rational>| -> Option<Vec<Rational>> {
        let vals: Vec<Rational> = coeffs.iter().map(|c| c.eval(pt).expect("point covers")).collect();
        if vals[d as usize].is_zero() {
            return None;
        }
        Some(rational_roots(&vals))
    };

    for attempt in 0..6 {
        let base = point(&others, attempt, None);
        let Some(r0) = roots_at(&base) else {
            continue;
        };
        let mut shifted = Vec::new();
        let mut ok = true;
        for (j, _) in others.iter().enumerate() {
            let p1 = point(&others, attempt, Some((j, 1)));
            let p2 = point(&others, attempt, Some((j, 2)));
            match (roots_at(&p1), roots_at(&p2)) {
                (Some(a), Some(b)) => shifted.push((a, b)),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        for rho in &r0 {
            let mut slopes: Vec<Vec<Rational>> = Vec::new();
            for (a, b) in &shifted {
                let ks: Vec<Rational> = a
                    .iter()
                    .map(|s| s - rho)
                    .filter(|k| b.contains(&(rho + k * rat(2))))
                    .collect();
                slopes.push(ks);
            }
            if slopes.iter().any(Vec::is_empty) {
                continue;
            }
            for combo in combinations(&slopes, MAX_CANDIDATES) {
                let mut r = Poly::constant(rho.clone());
                for (j, k) in combo.iter().enumerate() {
                    if k.is_zero() {
                        continue;
                    }
                    let shift = &Poly::symbol(others[j].clone()) - &Poly::constant(base[&others[j]].clone());
                    r += &shift.scale(k);
                }
                if let Some(quot) = divide_linear(&coeffs, &r) {
                    let factor = &Poly::symbol(x.clone()) - &r;
                    let quotient = rebuild(&quot, x);
                    return Some((factor, quotient));
                }
            }
        }
        return None;
    }
    None
}

fn point(vars: &[Symbol], attempt: usize, bump: Option<(usize, i64)>) -> BTreeMap<Symbol, Rational> {
    const PRIMES: [i64; 12] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    vars.iter()
        .enumerate()
        .map(|(j, s)| {
            let mut v = PRIMES[j % PRIMES.len()] + 7 * attempt as i64 + (j / PRIMES.len()) as i64 * 43;
            if let Some((k, by)) = bump {
                if k == j {
                    v += by;
                }
            }
            (s.clone(), rat(v))
        })
        .collect()
}

fn combinations(lists: &[Vec<Rational>], cap: usize) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::new();
        for prefix in &out {
            for v in l {
                let mut p = prefix.clone();
                p.push(v.clone());
                next.push(p);
                if next.len() >= cap {
                    break;
                }
            }
        }
        out = next;
    }
    out
}

/// Synthetic division of `sum coeffs[k] x^k` by `x - r`; `None` when the
/// remainder is nonzero.
fn divide_linear(coeffs: &[Poly], r: &Poly) -> Option<Vec<Poly>> {
    let d = coeffs.len() - 1;
    let mut b = vec![Poly::zero(); d];
    b[d - 1] = coeffs[d].clone();
    for k in (1..d).rev() {
        b[k - 1] = &coeffs[k] + &(r * &b[k]);
    }
    let rem = &coeffs[0] + &(r * &b[0]);
    rem.is_zero().then_some(b)
}

fn rebuild(coeffs: &[Poly], x: &Symbol) -> Poly {
    let xp = Poly::symbol(x.clone());
    let mut acc = Poly::zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * &xp) + c;
    }
    acc
}

/// Rational roots of `sum vals[k] t^k` (no multiplicities).
pub fn rational_roots(vals: &[Rational]) -> Vec<Rational> {
    let lcm = vals
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut ints: Vec<BigInt> = vals
        .iter()
        .map(|v| (v * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    while ints.last().is_some_and(Zero::is_zero) {
        ints.pop();
    }
    let mut roots = Vec::new();
    let lead = ints.iter().position(|v| !v.is_zero());
    let Some(lead) = lead else {
        return roots;
    };
    if lead > 0 {
        roots.push(Rational::zero());
        ints.drain(..lead);
    }
    if ints.len() < 2 {
        return roots;
    }
    let a0 = ints[0].abs();
    let an = ints[ints.len() - 1].abs();
    let (Some(num_divs), Some(den_divs)) = (divisors(&a0), divisors(&an)) else {
        return roots;
    };
    for p in &num_divs {
        for q in &den_divs {
            for sgn in [1, -1] {
                let cand = Rational::new(BigInt::from(sgn) * p, q.clone());
                if roots.contains(&cand) {
                    continue;
                }
                let mut acc = Rational::zero();
                for c in ints.iter().rev() {
                    acc = acc * &cand + Rational::from_integer(c.clone());
                }
                if acc.is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let v = n.to_u64()?;
    if v > DIVISOR_LIMIT {
        return None;
    }
    let mut out = Vec::new();
    let mut i = 1u64;
    while i * i <= v {
        if v % i == 0 {
            out.push(BigInt::from(i));
            if i * i != v {
                out.push(BigInt::from(v / i));
            }
        }
        i += 1;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    #[test]
    fn monomial_factors() {
        let f = linear_factors(&p("a2*c"));
        assert_eq!(f.factors, vec![(p("a2"), 1), (p("c"), 1)]);
        assert_eq!(f.residual, Poly::one());

        let f = linear_factors(&p("2*b^2"));
        assert_eq!(f.constant, rat(2));
        assert_eq!(f.factors, vec![(p("b"), 2)]);
    }

    #[test]
    fn affine_factors() {
        let target = p("a1*c - 4*a1*d");
        let f = linear_factors(&target);
        assert_eq!(f.expand(), target);
        assert!(f.factors.iter().any(|(g, _)| g.proportional(&p("c - 4*d"))));

        let target = p("(x + y - 1)*(x - 2*y)*(x^2 + y^2 + 1)");
        let f = linear_factors(&target);
        assert_eq!(f.expand(), target);
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.residual, p("x^2 + y^2 + 1"));
    }

    #[test]
    fn irreducible_stays_residual() {
        let f = linear_factors(&p("x^2 + 1"));
        assert!(f.factors.is_empty());
        assert_eq!(f.residual, p("x^2 + 1"));
    }

    #[test]
    fn roots() {
        assert_eq!(rational_roots(&[rat(-1), rat(0), rat(4)]), vec![Rational::new((-1).into(), 2.into()), Rational::new(1.into(), 2.into())]);
    }
}
