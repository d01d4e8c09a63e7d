//! Even 2-cochains on a base superalgebra, their weights, the first-order
//! (cocycle) condition, the quadratic obstruction `Ψ∘Ψ` and deformed laws.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::catalog;
use crate::classify::solver::{self, ConstraintSystem, SolverOptions};
use crate::error::{Error, Result};
use crate::exact::{binomial, ratio, sign, Poly, Rational, Symbol};
use crate::gradation::natural_layers;
use crate::par::{map_range, Exec};
use crate::superalg::io::{AlgebraFile, ProductFile};
use crate::superalg::{
    add_scaled, check_identity, jacobi_residual, leibniz_residual, Builder, Kind, SparseVec, SuperAlgebra,
    Violation,
};

/// Layer-degree shift of a cochain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Weight {
    Value(i64),
    Inhomogeneous,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Value(w) => write!(f, "{w}"),
            Weight::Inhomogeneous => f.write_str("inhomogeneous"),
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Weight::Value(w) => s.serialize_i64(*w),
            Weight::Inhomogeneous => s.serialize_str("inhomogeneous"),
        }
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(w) => Ok(Weight::Value(w)),
            Raw::Text(t) if t == "inhomogeneous" => Ok(Weight::Inhomogeneous),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("invalid weight `{t}`"))),
        }
    }
}

/// An even bilinear map on the base algebra. Lie cochains are stored on
/// canonical pairs and extended by super skew-symmetry; Leibniz cochains are
/// general bilinear maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain2 {
    base: SuperAlgebra,
    law: SuperAlgebra,
    declared_weight: Option<Weight>,
}

impl Cochain2 {
    pub fn new(
        name: impl Into<String>,
        base: &SuperAlgebra,
        components: BTreeMap<(usize, usize), SparseVec>,
        declared_weight: Option<Weight>,
    ) -> Result<Self> {
        let law = SuperAlgebra::new(
            name,
            base.kind(),
            base.even_basis().to_vec(),
            base.odd_basis().to_vec(),
            components,
        )?;
        Ok(Cochain2 {
            base: base.clone(),
            law,
            declared_weight,
        })
    }

    pub fn zero(base: &SuperAlgebra) -> Self {
        Cochain2::new("0", base, BTreeMap::new(), None).expect("empty cochain is valid")
    }

    /// Linear combination `sum c_i * psi_i` over a common base.
    pub fn combine(name: impl Into<String>, base: &SuperAlgebra, terms: &[(Poly, &Cochain2)]) -> Result<Self> {
        let mut b = Builder::new(name, base.kind(), base.even_basis().to_vec(), base.odd_basis().to_vec());
        for (c, psi) in terms {
            if psi.base.dim() != base.dim() || psi.base.n_even() != base.n_even() || psi.base.kind() != base.kind() {
                return Err(Error::DimensionMismatch(format!("cochain {} lives on another base", psi.name())));
            }
            for ((a, bb), v) in psi.components() {
                for (k, x) in v {
                    b.add(*a, *bb, *k, c * x);
                }
            }
        }
        let law = b.build()?;
        Ok(Cochain2 {
            base: base.clone(),
            law,
            declared_weight: None,
        })
    }

    pub fn name(&self) -> &str {
        self.law.name()
    }

    pub fn base(&self) -> &SuperAlgebra {
        &self.base
    }

    /// The cochain viewed as a product table on the base's basis.
    pub fn law(&self) -> &SuperAlgebra {
        &self.law
    }

    pub fn components(&self) -> &BTreeMap<(usize, usize), SparseVec> {
        self.law.stored_products()
    }

    /// Value on a basis pair, after skew or symmetric extension.
    pub fn value(&self, a: usize, b: usize) -> &SparseVec {
        self.law.bracket(a, b)
    }

    pub fn is_zero(&self) -> bool {
        self.components().values().all(|v| v.is_empty())
    }

    pub fn declared_weight(&self) -> Option<Weight> {
        self.declared_weight
    }

    pub fn with_declared_weight(mut self, w: Option<Weight>) -> Self {
        self.declared_weight = w;
        self
    }

    pub fn parameters(&self) -> &BTreeSet<Symbol> {
        self.law.parameters()
    }

    pub fn subst(&self, binding: &BTreeMap<Symbol, Poly>) -> Cochain2 {
        Cochain2 {
            base: self.base.clone(),
            law: self.law.subst(binding),
            declared_weight: self.declared_weight,
        }
    }
}

/// Cochain interchange format: the base algebra plus products in the algebra schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainFile {
    pub name: String,
    pub base: AlgebraFile,
    #[serde(default)]
    pub parameters: Vec<String>,
    #[serde(default)]
    pub declared_weight: Option<Weight>,
    pub products: Vec<ProductFile>,
}

impl CochainFile {
    pub fn from_cochain(c: &Cochain2) -> Self {
        let law = AlgebraFile::from_algebra(c.law());
        CochainFile {
            name: c.name().to_string(),
            base: AlgebraFile::from_algebra(c.base()),
            parameters: law.parameters,
            declared_weight: c.declared_weight,
            products: law.products,
        }
    }

    pub fn to_cochain(&self) -> Result<Cochain2> {
        let base = self.base.to_algebra()?;
        let law = AlgebraFile {
            name: self.name.clone(),
            kind: base.kind(),
            even_basis: base.even_basis().to_vec(),
            odd_basis: base.odd_basis().to_vec(),
            parameters: self.parameters.clone(),
            products: self.products.clone(),
        }
        .to_algebra()?;
        Ok(Cochain2 {
            base,
            law,
            declared_weight: self.declared_weight,
        })
    }
}

pub fn cochain_to_json(c: &Cochain2) -> String {
    serde_json::to_string_pretty(&CochainFile::from_cochain(c)).expect("serializable") + "\n"
}

pub fn cochain_from_json(text: &str) -> Result<Cochain2> {
    let file: CochainFile = serde_json::from_str(text)?;
    file.to_cochain()
}

/// Layer degree of each basis vector of a parameter-free base whose basis
/// already realizes the natural layers.
pub fn layer_degrees(base: &SuperAlgebra) -> Result<Vec<usize>> {
    let layers = natural_layers(base)?;
    let mut deg = vec![0; base.dim()];
    for (i, l) in layers.layers.iter().enumerate() {
        for v in l.even.iter().chain(&l.odd) {
            let nz: Vec<usize> = (0..v.len()).filter(|&k| v[k] != Rational::from_integer(0.into())).collect();
            if nz.len() != 1 {
                return Err(Error::Precondition("base basis does not realize the natural layers".into()));
            }
            deg[nz[0]] = i + 1;
        }
    }
    if deg.contains(&0) {
        return Err(Error::Precondition("base is not nilpotent".into()));
    }
    Ok(deg)
}

/// The common layer shift of all components, `None` for the zero cochain.
pub fn weight(c: &Cochain2) -> Result<Option<Weight>> {
    let deg = layer_degrees(c.base())?;
    let mut found: Option<i64> = None;
    let n = c.base().dim();
    for a in 0..n {
        for b in 0..n {
            for k in c.value(a, b).keys() {
                let w = deg[*k] as i64 - deg[a] as i64 - deg[b] as i64;
                match found {
                    None => found = Some(w),
                    Some(v) if v != w => return Ok(Some(Weight::Inhomogeneous)),
                    _ => {}
                }
            }
        }
    }
    Ok(found.map(Weight::Value))
}

/// Base plus cochain, componentwise.
pub fn deform(base: &SuperAlgebra, c: &Cochain2) -> Result<SuperAlgebra> {
    if base.kind() != c.base().kind() || base.n_even() != c.base().n_even() || base.n_odd() != c.base().n_odd() {
        return Err(Error::DimensionMismatch("cochain does not match the base".into()));
    }
    let mut b = Builder::new(
        format!("{}+{}", base.name(), c.name()),
        base.kind(),
        base.even_basis().to_vec(),
        base.odd_basis().to_vec(),
    );
    for src in [base.stored_products(), c.components()] {
        for ((x, y), v) in src {
            for (k, coeff) in v {
                b.add(*x, *y, *k, coeff.clone());
            }
        }
    }
    b.build()
}

fn residual_fn(kind: Kind) -> fn(&SuperAlgebra, usize, usize, usize) -> SparseVec {
    match kind {
        Kind::Lie => jacobi_residual,
        Kind::Leibniz => leibniz_residual,
    }
}

/// Nonzero first-order terms of the identity for `base + t*c`, i.e.
/// `J(base + c) - J(base) - J(c)` on every basis triple.
pub fn cocycle_violations(c: &Cochain2, exec: Exec) -> Result<Vec<Violation>> {
    let base = c.base();
    let deformed = deform(base, c)?;
    let f = residual_fn(base.kind());
    let n = base.dim();
    let law = c.law();
    Ok(map_range(exec, n, |x| {
        let mut out = Vec::new();
        for y in 0..n {
            for z in 0..n {
                let mut r = f(&deformed, x, y, z);
                add_scaled(&mut r, &f(base, x, y, z), &Poly::int(-1));
                add_scaled(&mut r, &f(law, x, y, z), &Poly::int(-1));
                if !r.is_empty() {
                    out.push(Violation::new(base, (x, y, z), r));
                }
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect())
}

/// Whether the first-order term vanishes identically. The base must satisfy
/// its own identity.
pub fn is_infinitesimal_deformation(c: &Cochain2) -> Result<bool> {
    if !check_identity(c.base()).is_empty() {
        return Err(Error::Precondition("base law fails its identity".into()));
    }
    Ok(cocycle_violations(c, Exec::Auto)?.is_empty())
}

/// `Ψ(Ψ(x,y),z) + Ψ(Ψ(z,x),y) + Ψ(Ψ(y,z),x)` with no graded signs; the
/// inner arguments use the cochain's skew or symmetric extension.
pub fn psi_compose_psi(c: &Cochain2, x: usize, y: usize, z: usize) -> SparseVec {
    let law = c.law();
    let mut out = law.mul_basis_right(law.bracket(x, y), z);
    add_scaled(&mut out, &law.mul_basis_right(law.bracket(z, x), y), &Poly::one());
    add_scaled(&mut out, &law.mul_basis_right(law.bracket(y, z), x), &Poly::one());
    out
}

/// Triples where `Ψ∘Ψ` does not vanish.
pub fn psi_compose_psi_violations(c: &Cochain2, exec: Exec) -> Vec<Violation> {
    let n = c.base().dim();
    map_range(exec, n, |x| {
        let mut out = Vec::new();
        for y in 0..n {
            for z in 0..n {
                let r = psi_compose_psi(c, x, y, z);
                if !r.is_empty() {
                    out.push(Violation::new(c.base(), (x, y, z), r));
                }
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

fn lie_x(i: usize) -> usize {
    i
}

fn lie_y(n: usize, j: usize) -> usize {
    n + j
}

/// Coefficients `c_ij` (`i <= j`) of `φ_{k,2k}`: `c_kk = 1` and, moving up one
/// level at a time, `c_{i,j+1} = c_ij - c_{i+1,j}` (`c_ij / 2` when `i = j`).
pub fn phi_coefficients(k: usize, max_level: usize) -> BTreeMap<(usize, usize), Rational> {
    let mut c: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    c.insert((k, k), Rational::from_integer(1.into()));
    let get = |c: &BTreeMap<(usize, usize), Rational>, i: usize, j: usize| {
        c.get(&(i.min(j), i.max(j))).cloned().unwrap_or_default()
    };
    for s in 2..=max_level {
        for i in (1..=(s - 1) / 2).rev() {
            let j = s - 1 - i;
            if i > j {
                continue;
            }
            let v = if i == j {
                get(&c, i, j) * ratio(1, 2)
            } else {
                get(&c, i, j) - get(&c, i + 1, j)
            };
            c.insert((i, j + 1), v);
        }
    }
    c.retain(|_, v| *v != Rational::default());
    c
}

/// `φ_{k,2k}` on `L^{n,m}`: `(Y_i, Y_j) = c_ij X_{i+j}`.
pub fn phi(n: usize, m: usize, k: usize) -> Result<Cochain2> {
    if k == 0 || k > m || 2 * k > n {
        return Err(Error::OutOfRange(format!("phi_{{{k},{}}} needs 1 <= k <= m and 2k <= n", 2 * k)));
    }
    let base = catalog::lie_model(n, m)?;
    let mut comps: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
    for ((i, j), v) in phi_coefficients(k, n.max(2 * m) + 2) {
        if j <= m && i + j <= n {
            comps.insert((lie_y(n, i), lie_y(n, j)), [(lie_x(i + j), Poly::constant(v))].into());
        }
    }
    Ok(Cochain2::new(format!("phi{k}{}", 2 * k), &base, comps, Some(Weight::Value(0)))?)
}

/// `Ψ^s_{k,1}` on `L^{n,m}`: `[X_r, Y_i] = (-1)^{k-r} C(i-1, k-r) Y_{i+r+s-k-1}`
/// for `1 <= r <= k`.
pub fn psi(n: usize, m: usize, s: usize, k: usize) -> Result<Cochain2> {
    if k == 0 || s <= k {
        return Err(Error::OutOfRange(format!("Psi^{s}_{{{k},1}} needs 1 <= k < s")));
    }
    let base = catalog::lie_model(n, m)?;
    let w = s - k - 1;
    let mut comps: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
    for r in 1..=k.min(n) {
        for i in 1..=m {
            let t = i + r + w;
            if t > m || i < 1 + (k - r) {
                continue;
            }
            let c = sign(k - r) * binomial(i - 1, k - r);
            comps.insert((lie_x(r), lie_y(n, i)), [(lie_y(n, t), Poly::constant(c))].into());
        }
    }
    Ok(Cochain2::new(format!("psi{s}{k}"), &base, comps, Some(Weight::Value(w as i64)))?)
}

/// The cocycle in `span{φ_{j,2j} : j <= k}` whose `φ_{k,2k}` coefficient is 1.
/// Coefficients the cocycle condition leaves free are set to zero.
pub fn phibar(n: usize, m: usize, k: usize) -> Result<Cochain2> {
    let base = catalog::lie_model(n, m)?;
    let phis: Vec<Cochain2> = (1..=k).map(|j| phi(n, m, j)).collect::<Result<_>>()?;
    let vars: Vec<Poly> = (1..k).map(|j| Poly::var(&format!("x{j}"))).chain([Poly::one()]).collect();
    let terms: Vec<(Poly, &Cochain2)> = vars.iter().cloned().zip(phis.iter()).collect();
    let generic = Cochain2::combine("phibar", &base, &terms)?;
    let mut sys = ConstraintSystem::default();
    for v in cocycle_violations(&generic, Exec::Auto)? {
        for c in v.residual.values() {
            sys.push(c.clone(), "cocycle");
        }
    }
    let out = solver::solve(&sys.deduplicated(), &SolverOptions::exact());
    let branch = out
        .branches
        .iter()
        .find(|b| b.is_solved())
        .ok_or_else(|| Error::Precondition(format!("no cocycle with leading term phi_{{{k},{}}}", 2 * k)))?;
    let zero: BTreeMap<Symbol, Poly> = (1..k).map(|j| (Symbol::new(&format!("x{j}")), Poly::zero())).collect();
    let coeffs: Vec<Poly> = vars
        .iter()
        .map(|v| branch.apply(v).subst_unchecked(&zero))
        .collect();
    let terms: Vec<(Poly, &Cochain2)> = coeffs.into_iter().zip(phis.iter()).collect();
    Ok(Cochain2::combine(format!("phibar{k}{}", 2 * k), &base, &terms)?.with_declared_weight(Some(Weight::Value(0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn names(c: &Cochain2) -> BTreeMap<(String, String), String> {
        c.components()
            .iter()
            .map(|((a, b), v)| {
                (
                    (c.base().basis_name(*a).to_string(), c.base().basis_name(*b).to_string()),
                    c.base().format_vec(v),
                )
            })
            .collect()
    }

    #[test]
    fn phi12_small() {
        let c = phi(3, 4, 1).unwrap();
        let got = names(&c);
        assert_eq!(got[&("Y1".into(), "Y1".into())], "X2");
        assert_eq!(got[&("Y1".into(), "Y2".into())], "1/2*X3");
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn phi24_at_43() {
        let got = names(&phi(4, 3, 2).unwrap());
        assert_eq!(got[&("Y1".into(), "Y3".into())], "-X4");
        assert_eq!(got[&("Y2".into(), "Y2".into())], "X4");
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn psi_tables() {
        let got = names(&psi(3, 4, 4, 3).unwrap());
        assert_eq!(got[&("X1".into(), "Y3".into())], "Y4");
        assert_eq!(got[&("X2".into(), "Y2".into())], "-Y4");
        assert_eq!(got[&("X3".into(), "Y1".into())], "Y4");
        assert_eq!(got.len(), 3);
        let got = names(&psi(2, 5, 3, 2).unwrap());
        assert_eq!(got[&("X1".into(), "Y3".into())], "-2*Y4");
        assert_eq!(got[&("X2".into(), "Y1".into())], "Y3");
        assert!(!got.contains_key(&("X1".into(), "Y1".into())));
    }

    #[test]
    fn weights() {
        assert_eq!(weight(&psi(2, 4, 2, 1).unwrap()).unwrap(), Some(Weight::Value(0)));
        assert_eq!(weight(&psi(3, 4, 4, 3).unwrap()).unwrap(), Some(Weight::Value(0)));
        let base = catalog::lie_model(3, 1).unwrap();
        let c = Cochain2::new("y", &base, [((4, 4), [(3, Poly::one())].into())].into(), None).unwrap();
        assert_eq!(weight(&c).unwrap(), Some(Weight::Value(1)));
    }

    #[test]
    fn phibar_matches_known_combinations() {
        let expect = |n, m, k, want: &[(usize, i64)]| {
            let got = phibar(n, m, k).unwrap();
            let phis: Vec<Cochain2> = (1..=k).map(|j| phi(n, m, j).unwrap()).collect();
            let terms: Vec<(Poly, &Cochain2)> = want.iter().map(|(j, c)| (Poly::int(*c), &phis[j - 1])).collect();
            let reference = Cochain2::combine("ref", &got.base().clone(), &terms).unwrap();
            assert_eq!(got.components(), reference.components(), "phibar at ({n},{m})");
        };
        expect(4, 2, 2, &[(1, 2), (2, 1)]);
        expect(5, 3, 2, &[(1, 3), (2, 1)]);
        expect(6, 3, 3, &[(1, 6), (2, 2), (3, 1)]);
    }

    #[test]
    fn cocycles_and_obstruction() {
        assert!(is_infinitesimal_deformation(&phi(3, 4, 1).unwrap()).unwrap());
        assert!(is_infinitesimal_deformation(&psi(3, 5, 3, 2).unwrap()).unwrap());
        let base = catalog::lie_model(3, 3).unwrap();
        let bad = Cochain2::new("bad", &base, [((4, 4), [(2, Poly::one())].into())].into(), None).unwrap();
        assert!(!is_infinitesimal_deformation(&bad).unwrap());
    }

    #[test]
    fn obstruction_values() {
        // φ12 + aΨ²₁₁ + bΨ³₂₁ on L^{2,5}
        let (n, m) = (2, 5);
        let p = phi(n, m, 1).unwrap();
        let a = psi(n, m, 2, 1).unwrap();
        let b = psi(n, m, 3, 2).unwrap();
        let base = p.base().clone();
        let c = Cochain2::combine("c", &base, &[(Poly::one(), &p), (Poly::var("a"), &a), (Poly::var("b"), &b)]).unwrap();
        let r = psi_compose_psi(&c, 1, 2, 3);
        assert_eq!(base.format_vec(&r), "2*b^2*Y4");
        let _ = rat(0);
    }

    #[test]
    fn json_round_trip() {
        let c = psi(3, 4, 4, 3).unwrap();
        let text = cochain_to_json(&c);
        let back = cochain_from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(cochain_to_json(&back), text);
    }
}
