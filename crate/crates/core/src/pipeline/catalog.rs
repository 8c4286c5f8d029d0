//! The group catalog: named presentations with optional expected invariants.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coset_enum::{todd_coxeter, DEFAULT_MAX_COSETS};
use crate::error::{Error, Result};
use crate::presentations::{direct_product, free_central_extension, tietze_eliminate, FinitePresentation, DEFAULT_LENGTH_BUDGET};
use crate::schreier::schreier_data;
use crate::zlinalg::AbelianGroupInvariants;

pub const SHIPPED_CATALOG: &str = include_str!("../../catalog/groups.json");

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h1: Option<String>,
    /// Value of `H₃` taken from the literature, not computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h3_claim: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GroupCatalogEntry {
    pub name: String,
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    #[serde(default)]
    pub expected: Expected,
}

impl GroupCatalogEntry {
    pub fn presentation(&self) -> Result<FinitePresentation> {
        let wrap = |field: String, e: Error| Error::Catalog { entry: self.name.clone(), field, message: e.to_string() };
        // Validate relators one at a time so the error names the offending one.
        for (i, r) in self.relators.iter().enumerate() {
            FinitePresentation::parse(&self.generators, &[r]).map_err(|e| wrap(format!("relators[{i}]"), e))?;
        }
        FinitePresentation::parse(&self.generators, &self.relators).map_err(|e| wrap("generators".into(), e))
    }

    pub fn expected_h1(&self) -> Result<Option<AbelianGroupInvariants>> {
        self.expected
            .h1
            .as_deref()
            .map(|s| {
                s.parse().map_err(|e: Error| Error::Catalog {
                    entry: self.name.clone(),
                    field: "expected.h1".into(),
                    message: e.to_string(),
                })
            })
            .transpose()
    }
}

#[derive(Clone, Debug)]
pub struct Catalog {
    entries: Vec<GroupCatalogEntry>,
}

impl Catalog {
    /// Parses and validates a JSON array of entries.
    pub fn parse(text: &str) -> Result<Self> {
        let entries: Vec<GroupCatalogEntry> = serde_json::from_str(text)?;
        let mut seen = HashSet::new();
        for e in &entries {
            if e.name.is_empty() {
                return Err(Error::Catalog { entry: e.name.clone(), field: "name".into(), message: "empty name".into() });
            }
            if !seen.insert(e.name.as_str()) {
                return Err(Error::Catalog { entry: e.name.clone(), field: "name".into(), message: "duplicate entry name".into() });
            }
            e.presentation()?;
            e.expected_h1()?;
            if let Some(c) = &e.expected.h3_claim {
                c.parse::<AbelianGroupInvariants>().map_err(|err| Error::Catalog {
                    entry: e.name.clone(),
                    field: "expected.h3_claim".into(),
                    message: err.to_string(),
                })?;
            }
        }
        Ok(Catalog { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn shipped() -> Self {
        Self::parse(SHIPPED_CATALOG).expect("shipped catalog is valid")
    }

    pub fn entries(&self) -> &[GroupCatalogEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Result<&GroupCatalogEntry> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::Invalid(format!("no catalog entry named {name:?}")))
    }

    /// A catalog name, or one of the derived forms `fiber(name)`,
    /// `fiber-tietze(name)`, `central(name)`, `direct(a,b)`, nested freely.
    pub fn resolve(&self, expr: &str) -> Result<FinitePresentation> {
        let expr = expr.trim();
        let Some(open) = expr.find('(') else {
            return self.get(expr)?.presentation();
        };
        if !expr.ends_with(')') {
            return Err(Error::Invalid(format!("unbalanced parentheses in {expr:?}")));
        }
        let head = &expr[..open];
        let inner = &expr[open + 1..expr.len() - 1];
        match head {
            "fiber" | "fiber-tietze" => {
                let base = self.resolve(inner)?;
                let sd = schreier_data(&todd_coxeter(&base, DEFAULT_MAX_COSETS)?)?;
                let fp = crate::presentations::FiberProduct::build(&sd, 2)?.presentation;
                Ok(if head == "fiber" { fp } else { tietze_eliminate(&fp, DEFAULT_LENGTH_BUDGET).presentation })
            }
            "central" => Ok(free_central_extension(&self.resolve(inner)?)),
            "direct" => {
                let comma = top_level_comma(inner).ok_or_else(|| Error::Invalid(format!("direct needs two arguments: {expr:?}")))?;
                Ok(direct_product(&self.resolve(&inner[..comma])?, &self.resolve(&inner[comma + 1..])?))
            }
            _ => Err(Error::Invalid(format!("unknown constructor {head:?}"))),
        }
    }
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}
