//! Rank-condition census over a directory of degree-8 field bundles.

use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::NFElement;
use crate::io::{parse_bundle, validate_bundle};
use crate::reduce::NormFormProblem;
use crate::solver::matching::match_pairs;
use crate::solver::pipelines::power_basis_rank_check;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub file: String,
    pub label: String,
    pub degree: usize,
    pub galois: bool,
    pub cm: bool,
    /// Every n−4 columns of A for the power basis (1, θ, θ², θ³) have full rank.
    pub rank_condition: bool,
    /// A failing column subset, when there is one.
    pub witness: Option<Vec<usize>>,
    pub applicable: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub rows: Vec<CensusRow>,
    pub applicable: usize,
    pub total: usize,
}

pub fn census_row(file: &str, doc: &str, precision: u32) -> CensusRow {
    let mut row = CensusRow {
        file: file.to_string(),
        label: String::new(),
        degree: 0,
        galois: false,
        cm: false,
        rank_condition: false,
        witness: None,
        applicable: false,
        error: None,
    };
    let b = match parse_bundle(doc) {
        Ok(b) => b,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.label = b.label.clone();
    row.degree = b.degree();
    let loaded = match validate_bundle(&b, precision) {
        Ok(l) => l,
        Err(errs) => {
            row.error = Some(errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "));
            return row;
        }
    };
    let Some(units) = &loaded.units else {
        row.error = Some(Error::MissingNormalClosure.to_string());
        return row;
    };
    row.galois = true;
    row.cm = units.ctx.is_cm() && match_pairs(units).is_ok();
    let f = &loaded.field;
    let alphas: Vec<NFElement> = (0..4).map(|j| NFElement::theta_pow(f, j)).collect();
    let p = match NormFormProblem::new(units.ctx.clone(), alphas, BigInt::from(1)) {
        Ok(p) => p,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    match power_basis_rank_check(&p) {
        Ok(c) => row.rank_condition = c.passed,
        Err(Error::RankConditionFailed { witness }) => row.witness = Some(witness),
        Err(e) => row.error = Some(e.to_string()),
    }
    row.applicable = row.galois && row.cm && row.rank_condition && row.degree >= 8;
    row
}

/// Runs the check on every *.json file of `dir`, in file-name order.
pub fn run_census(dir: &Path, precision: u32) -> Result<Census> {
    let mut files: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
        .collect();
    files.sort();
    let rows: Vec<CensusRow> = files
        .iter()
        .map(|p| {
            let name = p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            match std::fs::read_to_string(p) {
                Ok(doc) => census_row(&name, &doc, precision),
                Err(e) => census_row(&name, &format!("<{}>", e), precision),
            }
        })
        .collect();
    let applicable = rows.iter().filter(|r| r.applicable).count();
    Ok(Census { total: rows.len(), applicable, rows })
}
