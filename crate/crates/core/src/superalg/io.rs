//! JSON interchange format for algebras.
//!
//! ```json
//! {"name": "...", "kind": "lie", "even_basis": ["X0"], "odd_basis": ["Y1"],
//!  "parameters": ["a"], "products": [{"left": "Y1", "right": "Y1",
//!  "result": [{"basis": "X0", "coeff": "a"}]}]}
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Kind, SparseVec, SuperAlgebra};
use crate::error::{Error, Result};
use crate::exact::{Poly, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub basis: String,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductFile {
    pub left: String,
    pub right: String,
    pub result: Vec<TermFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub name: String,
    pub kind: Kind,
    pub even_basis: Vec<String>,
    pub odd_basis: Vec<String>,
    #[serde(default)]
    pub parameters: Vec<String>,
    pub products: Vec<ProductFile>,
}

impl AlgebraFile {
    pub fn from_algebra(alg: &SuperAlgebra) -> Self {
        let products = alg
            .stored_products()
            .iter()
            .map(|((a, b), v)| ProductFile {
                left: alg.basis_name(*a).to_string(),
                right: alg.basis_name(*b).to_string(),
                result: v
                    .iter()
                    .map(|(k, c)| TermFile {
                        basis: alg.basis_name(*k).to_string(),
                        coeff: c.to_string(),
                    })
                    .collect(),
            })
            .collect();
        AlgebraFile {
            name: alg.name().to_string(),
            kind: alg.kind(),
            even_basis: alg.even_basis().to_vec(),
            odd_basis: alg.odd_basis().to_vec(),
            parameters: alg.parameters().iter().map(|s| s.to_string()).collect(),
            products,
        }
    }

    pub fn to_algebra(&self) -> Result<SuperAlgebra> {
        let names: Vec<&String> = self.even_basis.iter().chain(&self.odd_basis).collect();
        let index = |s: &str| {
            names
                .iter()
                .position(|b| b.as_str() == s)
                .ok_or_else(|| Error::UnknownBasis(s.to_string()))
        };
        let declared: BTreeSet<Symbol> = self.parameters.iter().map(|s| Symbol::new(s)).collect();
        let mut products: BTreeMap<(usize, usize), SparseVec> = BTreeMap::new();
        for p in &self.products {
            let key = (index(&p.left)?, index(&p.right)?);
            if products.contains_key(&key) {
                return Err(Error::InvalidAlgebra(format!("product [{}, {}] listed twice", p.left, p.right)));
            }
            let mut v = SparseVec::new();
            for t in &p.result {
                let k = index(&t.basis)?;
                let c = Poly::parse(&t.coeff).map_err(|e| match e {
                    Error::Parse { column, message } => Error::Parse {
                        column,
                        message: format!("in coefficient of {} in [{}, {}]: {message}", t.basis, p.left, p.right),
                    },
                    other => other,
                })?;
                if let Some(s) = c.variables().into_iter().find(|s| !declared.contains(s)) {
                    return Err(Error::InvalidAlgebra(format!("undeclared parameter `{s}`")));
                }
                super::add_entry(&mut v, k, &c);
            }
            products.insert(key, v);
        }
        SuperAlgebra::new(
            self.name.clone(),
            self.kind,
            self.even_basis.clone(),
            self.odd_basis.clone(),
            products,
        )
    }
}

pub fn to_json(alg: &SuperAlgebra) -> String {
    serde_json::to_string_pretty(&AlgebraFile::from_algebra(alg)).expect("serializable") + "\n"
}

pub fn from_json(text: &str) -> Result<SuperAlgebra> {
    let file: AlgebraFile = serde_json::from_str(text)?;
    file.to_algebra()
}
