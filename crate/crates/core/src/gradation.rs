//! Descending central sequences, the natural filtration and its associated
//! graded superalgebra.
//!
//! Sequences are taken part-wise: `C^{k+1}(g_a)` is spanned by products of
//! `g_0` with `C^k(g_a)`. Leibniz algebras use products on both sides.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::classify::solver::{self, ConstraintSystem, NonzeroGroup, SolverOptions};
use crate::error::{Error, Result};
use crate::exact::{inverse, rank, rat, MatrixQ, Poly, Rational, Symbol};
use crate::superalg::Subspace;
use crate::superalg::{
    add_scaled, basis_names, is_canonical, transport, verify_homomorphism, Builder, Kind, LinearMap, Parity,
    SparseVec, SuperAlgebra,
};

/// Dense rational view of a parameter-free product table.
struct Table {
    n: usize,
    n_even: usize,
    n_odd: usize,
    kind: Kind,
    prods: Vec<Vec<Vec<(usize, Rational)>>>,
}

impl Table {
    fn new(alg: &SuperAlgebra) -> Result<Self> {
        Ok(Table {
            n: alg.dim(),
            n_even: alg.n_even(),
            n_odd: alg.n_odd(),
            kind: alg.kind(),
            prods: alg.rational_table()?,
        })
    }

    fn mul(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.n];
        for (i, x) in u.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in v.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                for (k, c) in &self.prods[i][j] {
                    out[*k] += x * y * c;
                }
            }
        }
        out
    }

    fn unit(&self, k: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.n];
        v[k] = Rational::one();
        v
    }

    fn span_of_products(&self, lefts: &[Vec<Rational>], rights: &[Vec<Rational>]) -> Subspace {
        let mut vecs = Vec::new();
        for x in lefts {
            for v in rights {
                vecs.push(self.mul(x, v));
                if self.kind == Kind::Leibniz {
                    vecs.push(self.mul(v, x));
                }
            }
        }
        Subspace::span(self.n_even, self.n_odd, &vecs)
    }
}

/// A descending chain `C^0 ⊇ C^1 ⊇ ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub terms: Vec<Subspace>,
    /// False when the chain stabilized at a nonzero subspace.
    pub reaches_zero: bool,
}

impl Chain {
    /// `C^k`, continuing past the stored terms.
    pub fn at(&self, k: usize) -> Subspace {
        match self.terms.get(k) {
            Some(s) => s.clone(),
            None => {
                let last = self.terms.last().expect("chain has C^0");
                if self.reaches_zero {
                    Subspace::zero(last.n_even, last.n_odd)
                } else {
                    last.clone()
                }
            }
        }
    }

    /// Number of nonzero terms.
    pub fn length(&self) -> usize {
        self.terms.iter().take_while(|s| !s.is_zero()).count()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(Subspace::dim).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CentralSequences {
    pub whole: Chain,
    pub even_part: Chain,
    pub odd_part: Chain,
}

impl CentralSequences {
    pub fn is_nilpotent(&self) -> bool {
        self.whole.reaches_zero && self.even_part.reaches_zero && self.odd_part.reaches_zero
    }
}

fn descend(table: &Table, start: Subspace, multipliers: &[Vec<Rational>]) -> Chain {
    let mut terms = vec![start];
    loop {
        let cur = terms.last().expect("nonempty");
        if cur.is_zero() {
            return Chain {
                terms,
                reaches_zero: true,
            };
        }
        let next = table.span_of_products(multipliers, &cur.basis());
        if next.dim() == cur.dim() {
            return Chain {
                terms,
                reaches_zero: false,
            };
        }
        terms.push(next);
    }
}

pub fn central_sequences(alg: &SuperAlgebra) -> Result<CentralSequences> {
    let t = Table::new(alg)?;
    let (ne, no) = (t.n_even, t.n_odd);
    let units: Vec<Vec<Rational>> = (0..t.n).map(|k| t.unit(k)).collect();
    let even_units = &units[..ne];
    let whole = descend(&t, Subspace::whole(ne, no), &units);
    let even_start = Subspace::from_parts(ne, no, Subspace::whole(ne, 0).even, Vec::new());
    let odd_start = Subspace::from_parts(ne, no, Vec::new(), Subspace::whole(0, no).odd);
    Ok(CentralSequences {
        whole,
        even_part: descend(&t, even_start, even_units),
        odd_part: descend(&t, odd_start, even_units),
    })
}

/// The super-nilindex `(p, q)`: `C^{p-1}(g_0) != 0 = C^p(g_0)` and likewise for `g_1`.
pub fn s_nilindex(alg: &SuperAlgebra) -> Result<(usize, usize)> {
    let cs = central_sequences(alg)?;
    nilindex_of(&cs)
}

fn nilindex_of(cs: &CentralSequences) -> Result<(usize, usize)> {
    if !cs.is_nilpotent() {
        let which = if !cs.whole.reaches_zero {
            "descending central sequence"
        } else if !cs.even_part.reaches_zero {
            "even sequence"
        } else {
            "odd sequence"
        };
        return Err(Error::NotNilpotent(format!("{which} stabilizes at a nonzero subspace")));
    }
    Ok((cs.even_part.length(), cs.odd_part.length()))
}

/// Maximal super-nilindex for the algebra's kind: `(dim g_0 - 1, dim g_1)`
/// for Lie, `(dim L_0, dim L_1)` for Leibniz. Non-nilpotent input is not filiform.
pub fn is_filiform(alg: &SuperAlgebra) -> Result<bool> {
    let cs = central_sequences(alg)?;
    let Ok(pq) = nilindex_of(&cs) else {
        return Ok(false);
    };
    Ok(pq == max_nilindex(alg))
}

fn max_nilindex(alg: &SuperAlgebra) -> (usize, usize) {
    match alg.kind() {
        Kind::Lie => (alg.n_even().saturating_sub(1), alg.n_odd()),
        Kind::Leibniz => (alg.n_even(), alg.n_odd()),
    }
}

/// Complements realizing `g^i = C^{i-1}/C^i`, in full coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub even: Vec<Vec<Rational>>,
    pub odd: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalGradationLayers {
    pub even_chain: Chain,
    pub odd_chain: Chain,
    /// `layers[i - 1]` is `g^i`.
    pub layers: Vec<Layer>,
}

impl NaturalGradationLayers {
    pub fn dims(&self) -> Vec<(usize, usize)> {
        self.layers.iter().map(|l| (l.even.len(), l.odd.len())).collect()
    }

    /// Layer vectors in gr basis order: even parts by layer, then odd parts.
    fn flat(&self) -> Vec<(usize, Parity, Vec<Rational>)> {
        let mut out = Vec::new();
        for (i, l) in self.layers.iter().enumerate() {
            out.extend(l.even.iter().map(|v| (i + 1, Parity::Even, v.clone())));
        }
        for (i, l) in self.layers.iter().enumerate() {
            out.extend(l.odd.iter().map(|v| (i + 1, Parity::Odd, v.clone())));
        }
        out
    }

    fn chain(&self, p: Parity) -> &Chain {
        match p {
            Parity::Even => &self.even_chain,
            Parity::Odd => &self.odd_chain,
        }
    }

    /// Largest `l` with `v` in `C^{l-1}` of its parity; `None` for zero.
    fn level(&self, v: &[Rational], p: Parity) -> Option<usize> {
        if v.iter().all(Zero::is_zero) {
            return None;
        }
        let chain = self.chain(p);
        let mut l = 0;
        while l < chain.terms.len() && chain.terms[l].contains(v) {
            l += 1;
        }
        Some(l)
    }
}

fn is_unit(v: &[Rational]) -> Option<usize> {
    let nz: Vec<usize> = (0..v.len()).filter(|&k| !v[k].is_zero()).collect();
    (nz.len() == 1 && v[nz[0]].is_one()).then(|| nz[0])
}

fn vector_name(alg: &SuperAlgebra, v: &[Rational]) -> String {
    match is_unit(v) {
        Some(k) => alg.basis_name(k).to_string(),
        None => format!("({})", alg.format_vec(&to_sparse(v))),
    }
}

fn to_sparse(v: &[Rational]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, Poly::constant(c.clone())))
        .collect()
}

fn complement(upper: &Subspace, lower: &Subspace, p: Parity, n: usize, offset: usize) -> Vec<Vec<Rational>> {
    let want = upper.part(p).len() - lower.part(p).len();
    let local = |v: &Vec<Rational>| v[offset..offset + upper.part(p).first().map_or(0, Vec::len)].to_vec();
    let mut acc: Vec<Vec<Rational>> = lower.part(p).clone();
    let width = upper.part(p).first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut candidates: Vec<Vec<Rational>> = (0..width)
        .map(|k| {
            let mut v = vec![Rational::zero(); n];
            v[offset + k] = Rational::one();
            v
        })
        .filter(|v| upper.contains(v))
        .collect();
    for row in upper.part(p) {
        let mut v = vec![Rational::zero(); n];
        v[offset..offset + width].clone_from_slice(row);
        candidates.push(v);
    }
    for v in candidates {
        if out.len() == want {
            break;
        }
        let mut m = acc.clone();
        m.push(local(&v));
        if rank(&m, width) > acc.len() {
            acc.push(local(&v));
            out.push(v);
        }
    }
    out
}

/// Layers `g^i` for `1 <= i <= max(p, q)`. Complements are spanned by the
/// earliest basis vectors completing `C^i` inside `C^{i-1}`, falling back to
/// reduced rows of `C^{i-1}`.
pub fn natural_layers(alg: &SuperAlgebra) -> Result<NaturalGradationLayers> {
    let cs = central_sequences(alg)?;
    let (ne, n) = (alg.n_even(), alg.dim());
    let count = cs.even_part.length().max(cs.odd_part.length());
    let layers = (1..=count)
        .map(|i| Layer {
            even: complement(&cs.even_part.at(i - 1), &cs.even_part.at(i), Parity::Even, n, 0),
            odd: complement(&cs.odd_part.at(i - 1), &cs.odd_part.at(i), Parity::Odd, n, ne),
        })
        .collect();
    Ok(NaturalGradationLayers {
        even_chain: cs.even_part,
        odd_chain: cs.odd_part,
        layers,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// The product leaves the filtration level `C^{i+j-1}`.
    Filtration,
    /// The product stays in the filtration but leaves the layer `g^{i+j}`.
    Layer,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradingViolation {
    pub kind: ViolationKind,
    pub left: String,
    pub right: String,
    pub layers: (usize, usize),
    pub parities: (Parity, Parity),
    pub product: String,
    /// Deepest layer whose filtration level contains the product.
    pub lands_in: usize,
}

impl GradingViolation {
    pub fn message(&self) -> String {
        let target = self.layers.0 + self.layers.1;
        match self.kind {
            ViolationKind::Filtration => format!(
                "({},{}) lands in layer {}, above layer {target}",
                self.left, self.right, self.lands_in
            ),
            ViolationKind::Layer if self.lands_in > target => {
                format!("({},{}) lands in layer {}", self.left, self.right, self.lands_in)
            }
            ViolationKind::Layer => format!("({},{}) has components beyond layer {target}", self.left, self.right),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradedReport {
    pub graded: bool,
    pub filtration_compatible: bool,
    pub violations: Vec<GradingViolation>,
}

/// Checks `[C^{i-1}_a, C^{j-1}_b] ⊆ C^{i+j-1}_{a+b}` and that products of
/// layer complements satisfy `[g^i, g^j] ⊆ g^{i+j}`. The second condition
/// depends on the chosen complements, so callers wanting a basis-free answer
/// should pass an adapted basis (see [`is_naturally_graded`]).
pub fn is_graded(alg: &SuperAlgebra, layers: &NaturalGradationLayers) -> Result<GradedReport> {
    let t = Table::new(alg)?;
    let flat = layers.flat();
    let mut violations = Vec::new();
    for (i, pa, u) in &flat {
        for (j, pb, v) in &flat {
            let w = t.mul(u, v);
            let pc = pa.add(*pb);
            let Some(level) = layers.level(&w, pc) else {
                continue;
            };
            let target = i + j;
            let kind = if level < target {
                Some(ViolationKind::Filtration)
            } else {
                let layer = layers.layers.get(target - 1);
                let span: Vec<Vec<Rational>> = match (layer, pc) {
                    (Some(l), Parity::Even) => l.even.clone(),
                    (Some(l), Parity::Odd) => l.odd.clone(),
                    (None, _) => Vec::new(),
                };
                let mut m = span.clone();
                m.push(w.clone());
                (rank(&m, t.n) > rank(&span, t.n)).then_some(ViolationKind::Layer)
            };
            if let Some(kind) = kind {
                violations.push(GradingViolation {
                    kind,
                    left: vector_name(alg, u),
                    right: vector_name(alg, v),
                    layers: (*i, *j),
                    parities: (*pa, *pb),
                    product: alg.format_vec(&to_sparse(&w)),
                    lands_in: level,
                });
            }
        }
    }
    Ok(GradedReport {
        graded: violations.is_empty(),
        filtration_compatible: violations.iter().all(|v| v.kind != ViolationKind::Filtration),
        violations,
    })
}

/// Matrix whose columns are the layer vectors in gr basis order.
pub fn layer_basis(alg: &SuperAlgebra, layers: &NaturalGradationLayers) -> MatrixQ {
    let flat = layers.flat();
    let mut m = MatrixQ::zeros(alg.dim(), flat.len());
    for (j, (_, _, v)) in flat.iter().enumerate() {
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                m.set(i, j, Poly::constant(c.clone()));
            }
        }
    }
    m
}

/// Quotient construction of `gr(g)`; requires only filtration compatibility.
pub fn graded_quotient(alg: &SuperAlgebra, layers: &NaturalGradationLayers) -> Result<SuperAlgebra> {
    let report = is_graded(alg, layers)?;
    if let Some(v) = report.violations.iter().find(|v| v.kind == ViolationKind::Filtration) {
        return Err(Error::NotGraded(format!(
            "layers ({}, {}) with parities ({:?}, {:?}): {}",
            v.layers.0,
            v.layers.1,
            v.parities.0,
            v.parities.1,
            v.message()
        )));
    }
    let t = Table::new(alg)?;
    let flat = layers.flat();
    if flat.len() != alg.dim() {
        return Err(Error::NotNilpotent("layers do not span the algebra".into()));
    }
    let b = layer_basis(alg, layers).to_rational()?;
    let b_inv = inverse(&b).ok_or_else(|| Error::Precondition("layer vectors are dependent".into()))?;
    let mut even_names = Vec::new();
    let mut odd_names = Vec::new();
    let mut seen = BTreeSet::new();
    for (k, (i, p, v)) in flat.iter().enumerate() {
        let name = match is_unit(v) {
            Some(u) => alg.basis_name(u).to_string(),
            None => format!("{}{}_{}", if *p == Parity::Even { "U" } else { "V" }, i, k),
        };
        seen.insert(name.clone());
        match p {
            Parity::Even => even_names.push(name),
            Parity::Odd => odd_names.push(name),
        }
    }
    let mut builder = Builder::new(format!("gr({})", alg.name()), alg.kind(), even_names, odd_names);
    for (a, (i, pa, u)) in flat.iter().enumerate() {
        for (c, (j, pb, v)) in flat.iter().enumerate() {
            if alg.kind() == Kind::Lie && !is_canonical(a, c, *pa, *pb) {
                continue;
            }
            let w = t.mul(u, v);
            if w.iter().all(Zero::is_zero) {
                continue;
            }
            for (k, (l, _, _)) in flat.iter().enumerate() {
                if *l != i + j {
                    continue;
                }
                let coeff: Rational = (0..t.n).map(|r| &b_inv[k][r] * &w[r]).sum();
                if !coeff.is_zero() {
                    builder.add(a, c, k, Poly::constant(coeff));
                }
            }
        }
    }
    builder.build()
}

/// `gr(g)` realized on the layer complements; fails unless [`is_graded`] holds.
pub fn associated_graded(alg: &SuperAlgebra, layers: &NaturalGradationLayers) -> Result<SuperAlgebra> {
    let report = is_graded(alg, layers)?;
    if let Some(v) = report.violations.first() {
        return Err(Error::NotGraded(format!(
            "layers ({}, {}) with parities ({:?}, {:?}): {}",
            v.layers.0,
            v.layers.1,
            v.parities.0,
            v.parities.1,
            v.message()
        )));
    }
    graded_quotient(alg, layers)
}

/// An adapted basis and the algebra transported to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedBasis {
    pub algebra: SuperAlgebra,
    /// Sends each adapted basis vector to its old coordinates.
    pub map: LinearMap,
}

const COMBOS: [(i64, i64); 10] = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1), (1, 3), (3, 1)];

fn combo(a: &[Rational], b: Option<&Vec<Rational>>, (x, y): (i64, i64)) -> Vec<Rational> {
    a.iter()
        .enumerate()
        .map(|(k, v)| v * rat(x) + b.map_or_else(Rational::zero, |b| &b[k] * rat(y)))
        .collect()
}

/// Finds an adapted basis: `[X0,Xi] = X(i+1)`, `[X0,Yj] = Y(j+1)` for Lie
/// and `[Xi,X1] = X(i+1)`, `[Yj,X1] = Y(j+1)` for Leibniz. Generators are
/// tried among small combinations of the first layer.
pub fn adapted_basis(alg: &SuperAlgebra) -> Result<AdaptedBasis> {
    if !is_filiform(alg)? {
        return Err(Error::Precondition("adapted bases exist only at maximal super-nilindex".into()));
    }
    let t = Table::new(alg)?;
    let layers = natural_layers(alg)?;
    let (ne, no) = (alg.n_even(), alg.n_odd());
    let first = &layers.layers[0];
    let ev = &first.even;
    let y1s: Vec<Vec<Rational>> = match first.odd.len() {
        0 => vec![Vec::new()],
        1 => vec![first.odd[0].clone()],
        _ => COMBOS.iter().map(|&c| combo(&first.odd[0], first.odd.get(1), c)).collect(),
    };
    let independent = |vs: &[Vec<Rational>]| rank(vs, t.n) == vs.len();
    let try_basis = |gens: &[Vec<Rational>], y1: &Vec<Rational>| -> Option<Vec<Vec<Rational>>> {
        let mut even: Vec<Vec<Rational>> = gens.to_vec();
        let mut odd: Vec<Vec<Rational>> = Vec::new();
        match alg.kind() {
            Kind::Lie => {
                while even.len() < ne {
                    let next = t.mul(&gens[0], even.last()?);
                    even.push(next);
                }
                if no > 0 {
                    odd.push(y1.clone());
                    while odd.len() < no {
                        odd.push(t.mul(&gens[0], odd.last()?));
                    }
                }
            }
            Kind::Leibniz => {
                while even.len() < ne {
                    even.push(t.mul(even.last()?, &gens[0]));
                }
                if no > 0 {
                    odd.push(y1.clone());
                    while odd.len() < no {
                        odd.push(t.mul(odd.last()?, &gens[0]));
                    }
                }
            }
        }
        let all: Vec<Vec<Rational>> = even.into_iter().chain(odd).collect();
        independent(&all).then_some(all)
    };
    let mut found = None;
    'outer: for y1 in &y1s {
        match alg.kind() {
            Kind::Lie => {
                if ev.len() < 2 {
                    break;
                }
                for &c0 in &COMBOS {
                    let x0 = combo(&ev[0], ev.get(1), c0);
                    for &c1 in &COMBOS {
                        let x1 = combo(&ev[0], ev.get(1), c1);
                        if !independent(&[x0.clone(), x1.clone()]) {
                            continue;
                        }
                        if let Some(b) = try_basis(&[x0.clone(), x1], y1) {
                            found = Some(b);
                            break 'outer;
                        }
                    }
                }
            }
            Kind::Leibniz => {
                for &c0 in &COMBOS {
                    if ev.is_empty() {
                        break;
                    }
                    let x1 = combo(&ev[0], ev.get(1), c0);
                    if x1.iter().all(Zero::is_zero) {
                        continue;
                    }
                    if let Some(b) = try_basis(&[x1], y1) {
                        found = Some(b);
                        break 'outer;
                    }
                }
            }
        }
    }
    let cols = found.ok_or_else(|| Error::Precondition("no adapted basis among small generator combinations".into()))?;
    let mut p = MatrixQ::zeros(t.n, t.n);
    for (j, v) in cols.iter().enumerate() {
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                p.set(i, j, Poly::constant(c.clone()));
            }
        }
    }
    let p_rows = p.to_rational()?;
    let inv = inverse(&p_rows).ok_or_else(|| Error::Precondition("adapted vectors are dependent".into()))?;
    let inv = MatrixQ::from_rational_rows(&inv, t.n);
    let (even, odd) = match alg.kind() {
        Kind::Lie => (basis_names("X", 0, ne), basis_names("Y", 1, no)),
        Kind::Leibniz => (basis_names("X", 1, ne), basis_names("Y", 1, no)),
    };
    let adapted = transport(alg, &p, &inv, alg.name().to_string(), even, odd)?;
    let map = LinearMap::new(&adapted, alg, p)?;
    Ok(AdaptedBasis { algebra: adapted, map })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// The layer complements fail `[g^i, g^j] ⊆ g^{i+j}`.
    Gradedness,
    /// gr exists but no isomorphism was found.
    Isomorphism,
    Accepted,
}

#[derive(Clone, Debug)]
pub struct NaturalGradedness {
    pub naturally_graded: bool,
    pub stage: Stage,
    pub reason: Option<String>,
    /// Whether the analysis ran in an adapted basis rather than the input basis.
    pub used_adapted_basis: bool,
    pub layers: Vec<(usize, usize)>,
    pub graded: GradedReport,
    pub gr: Option<SuperAlgebra>,
    /// Isomorphism from the input algebra onto `gr`.
    pub witness: Option<LinearMap>,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub guess_values: Vec<Rational>,
    pub max_nodes: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            guess_values: [1, 0, -1, 2, -2].into_iter().map(rat).collect(),
            max_nodes: 20_000,
        }
    }
}

pub const SEARCH_EXHAUSTED: &str = "no isomorphism within search class (generator-determined maps)";

pub fn is_naturally_graded(alg: &SuperAlgebra) -> Result<NaturalGradedness> {
    is_naturally_graded_with(alg, &SearchOptions::default())
}

/// Decides natural gradedness. Filiform input is first moved to an adapted
/// basis; gradedness is then checked on its layer complements, `gr` is built
/// and an isomorphism is searched among maps determined by the images of the
/// first-layer generators.
pub fn is_naturally_graded_with(alg: &SuperAlgebra, opts: &SearchOptions) -> Result<NaturalGradedness> {
    if alg.is_parametric() {
        return Err(Error::Parametric);
    }
    s_nilindex(alg)?;
    let filiform = is_filiform(alg)?;
    let (work, to_input) = if filiform {
        let ab = adapted_basis(alg)?;
        (ab.algebra, Some(ab.map))
    } else {
        (alg.clone(), None)
    };
    let layers = natural_layers(&work)?;
    let graded = is_graded(&work, &layers)?;
    let dims = layers.dims();
    if !graded.graded {
        let reason = format!(
            "gr not graded: {}",
            graded.violations.first().map(GradingViolation::message).unwrap_or_default()
        );
        return Ok(NaturalGradedness {
            naturally_graded: false,
            stage: Stage::Gradedness,
            reason: Some(reason),
            used_adapted_basis: filiform,
            layers: dims,
            graded,
            gr: None,
            witness: None,
        });
    }
    let gr = graded_quotient(&work, &layers)?;
    let map = if filiform {
        generator_search(&work, &gr, &layers, opts)?
    } else {
        let b = layer_basis(&work, &layers).to_rational()?;
        let inv = inverse(&b).ok_or_else(|| Error::Precondition("layer vectors are dependent".into()))?;
        let f = LinearMap::new(&work, &gr, MatrixQ::from_rational_rows(&inv, work.dim()))?;
        verify_homomorphism(&f, &work, &gr).is_empty().then_some(f)
    };
    let witness = match (map, &to_input) {
        (Some(f), Some(a)) => {
            let a_inv = inverse(&a.matrix.to_rational()?).ok_or_else(|| Error::Precondition("singular basis".into()))?;
            let m = f.matrix.mul(&MatrixQ::from_rational_rows(&a_inv, alg.dim()))?;
            Some(LinearMap::new(alg, &gr, m)?)
        }
        (f, _) => f,
    };
    let witness = witness.filter(|w| verify_homomorphism(w, alg, &gr).is_empty() && w.is_invertible().unwrap_or(false));
    let ok = witness.is_some();
    Ok(NaturalGradedness {
        naturally_graded: ok,
        stage: if ok { Stage::Accepted } else { Stage::Isomorphism },
        reason: (!ok).then(|| SEARCH_EXHAUSTED.to_string()),
        used_adapted_basis: filiform,
        layers: dims,
        graded,
        gr: Some(gr),
        witness,
    })
}

/// Searches homomorphisms `src -> gr` fixed by the images of the generators
/// (`X0, X1, Y1` for Lie, `X1, Y1` for Leibniz) taken in the first layer of
/// `gr`. `src` must be in an adapted basis.
fn generator_search(
    src: &SuperAlgebra,
    gr: &SuperAlgebra,
    layers: &NaturalGradationLayers,
    opts: &SearchOptions,
) -> Result<Option<LinearMap>> {
    let (d0, d1) = layers.dims()[0];
    let ne = src.n_even();
    let gens: Vec<(usize, Parity)> = match src.kind() {
        Kind::Lie => vec![(0, Parity::Even), (1, Parity::Even), (ne, Parity::Odd)],
        Kind::Leibniz => vec![(0, Parity::Even), (ne, Parity::Odd)],
    };
    if (src.kind() == Kind::Lie && d0 != 2) || (src.n_odd() > 0 && d1 == 0) {
        return Ok(None);
    }
    let mut images: BTreeMap<usize, SparseVec> = BTreeMap::new();
    let mut unknowns: Vec<Vec<Symbol>> = Vec::new();
    for (g, (idx, p)) in gens.iter().enumerate() {
        if *idx >= src.dim() {
            unknowns.push(Vec::new());
            continue;
        }
        let targets: Vec<usize> = match p {
            Parity::Even => (0..d0).collect(),
            Parity::Odd => (gr.n_even()..gr.n_even() + d1).collect(),
        };
        let syms: Vec<Symbol> = (0..targets.len()).map(|k| Symbol::new(&format!("f{g}_{k}"))).collect();
        images.insert(*idx, targets.iter().zip(&syms).map(|(t, s)| (*t, Poly::symbol(s.clone()))).collect());
        unknowns.push(syms);
    }
    let act = |u: &SparseVec, v: &SparseVec| gr.mul(u, v);
    match src.kind() {
        Kind::Lie => {
            for i in 2..ne {
                let next = act(&images[&0], &images[&(i - 1)]);
                images.insert(i, next);
            }
            for j in ne + 1..src.dim() {
                let next = act(&images[&0], &images[&(j - 1)]);
                images.insert(j, next);
            }
        }
        Kind::Leibniz => {
            for i in 1..ne {
                let next = act(&images[&(i - 1)], &images[&0]);
                images.insert(i, next);
            }
            for j in ne + 1..src.dim() {
                let next = act(&images[&(j - 1)], &images[&0]);
                images.insert(j, next);
            }
        }
    }
    let apply = |v: &SparseVec| {
        let mut out = SparseVec::new();
        for (k, c) in v {
            add_scaled(&mut out, &images[k], c);
        }
        out
    };
    let mut sys = ConstraintSystem::default();
    for a in 0..src.dim() {
        for b in 0..src.dim() {
            let mut r = apply(src.bracket(a, b));
            add_scaled(&mut r, &act(&images[&a], &images[&b]), &Poly::int(-1));
            for c in r.values() {
                sys.push(c.clone(), format!("({},{})", src.basis_name(a), src.basis_name(b)));
            }
        }
    }
    match src.kind() {
        Kind::Lie => {
            let u = &unknowns[0];
            let v = &unknowns[1];
            let det = &(&Poly::symbol(u[0].clone()) * &Poly::symbol(v[1].clone()))
                - &(&Poly::symbol(u[1].clone()) * &Poly::symbol(v[0].clone()));
            sys.nonzero.push(NonzeroGroup::single(det));
        }
        Kind::Leibniz => {
            sys.nonzero.push(NonzeroGroup {
                polys: unknowns[0].iter().cloned().map(Poly::symbol).collect(),
                label: None,
            });
        }
    }
    if let Some(w) = unknowns.last().filter(|w| !w.is_empty() && src.n_odd() > 0) {
        sys.nonzero.push(NonzeroGroup {
            polys: w.iter().cloned().map(Poly::symbol).collect(),
            label: None,
        });
    }
    let sys = sys.deduplicated();
    let all: BTreeSet<Symbol> = unknowns.iter().flatten().cloned().collect();
    let solver_opts = SolverOptions {
        guess_values: opts.guess_values.clone(),
        guess_order: unknowns.iter().flatten().cloned().collect(),
        max_nodes: opts.max_nodes,
        ..SolverOptions::default()
    };
    let out = solver::solve(&sys, &solver_opts);
    for branch in out.branches.iter().filter(|b| b.is_solved()) {
        let free: Vec<Symbol> = branch.free_variables(&all).into_iter().collect();
        let Some(point) = solver::instantiate_free(branch, &free, &opts.guess_values) else {
            continue;
        };
        let binding: BTreeMap<Symbol, Poly> = all
            .iter()
            .map(|s| (s.clone(), Poly::constant(point.get(s).cloned().unwrap_or_else(Rational::zero))))
            .collect();
        let cols: Vec<SparseVec> = (0..src.dim())
            .map(|k| {
                images[&k]
                    .iter()
                    .map(|(i, c)| (*i, c.subst_unchecked(&binding)))
                    .filter(|(_, c)| !c.is_zero())
                    .collect()
            })
            .collect();
        let f = LinearMap::from_images(src, gr, &cols)?;
        if f.is_invertible()? && verify_homomorphism(&f, src, gr).is_empty() {
            return Ok(Some(f));
        }
    }
    Ok(None)
}
