//! Field bundles and problem specifications on the wire.
//!
//! Bundles are JSON objects; rationals travel as "p/q" strings in lowest
//! terms, polynomial coefficients as integers. The canonical form has sorted
//! keys and no whitespace.

use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::context::FieldContext;
use crate::error::{Error, Result};
use crate::field::{NFElement, NumberField};
use crate::poly::{format_rational, parse_rational, Q};
use crate::reduce::{NormFormProblem, NormSearchData, SubfieldLift};
use crate::solver::{solve, Completeness, Pipeline, SolveOptions, SolverReport};
use crate::units::{validate_unit_group, UnitGroupData, UnitIssue, UnitSystem};

#[derive(Clone, Debug, PartialEq)]
pub struct FieldBundle {
    pub label: String,
    /// Constant term first.
    pub min_poly: Vec<BigInt>,
    pub torsion_order: u64,
    pub torsion_gen: Vec<Q>,
    pub fund_units: Vec<Vec<Q>>,
    pub regulator: String,
    pub normal_closure: Option<Box<NormalClosure>>,
}

/// A Galois field L containing K, with the images of K's generator under the
/// n embeddings K → L (power-basis coordinates in L).
#[derive(Clone, Debug, PartialEq)]
pub struct NormalClosure {
    pub bundle: FieldBundle,
    pub images: Vec<Vec<Q>>,
}

fn perr(path: &str, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_string(), msg: msg.into() }
}

fn field<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| perr(&format!("{}.{}", path, key), "missing key"))
}

fn parse_int(v: &Value, path: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| perr(path, "expected an integer")),
        Value::String(s) => BigInt::from_str(s.trim()).map_err(|_| perr(path, format!("bad integer {:?}", s))),
        _ => Err(perr(path, "expected an integer")),
    }
}

fn parse_rat(v: &Value, path: &str) -> Result<Q> {
    match v {
        Value::Number(_) => parse_int(v, path).map(Q::from_integer),
        Value::String(s) => {
            parse_rational(s.trim()).ok_or_else(|| perr(path, format!("bad rational {:?}", s)))
        }
        _ => Err(perr(path, "expected a rational string")),
    }
}

fn parse_list<T>(v: &Value, path: &str, item: impl Fn(&Value, &str) -> Result<T>) -> Result<Vec<T>> {
    let arr = v.as_array().ok_or_else(|| perr(path, "expected a list"))?;
    arr.iter().enumerate().map(|(i, x)| item(x, &format!("{}[{}]", path, i))).collect()
}

fn parse_bundle_value(v: &Value, path: &str) -> Result<FieldBundle> {
    let obj = v.as_object().ok_or_else(|| perr(path, "expected an object"))?;
    let label = field(obj, path, "label")?.as_str().ok_or_else(|| perr(&format!("{}.label", path), "expected a string"))?.to_string();
    let min_poly = parse_list(field(obj, path, "min_poly")?, &format!("{}.min_poly", path), parse_int)?;
    let w = parse_int(field(obj, path, "torsion_order")?, &format!("{}.torsion_order", path))?;
    let torsion_order = u64::try_from(w).map_err(|_| perr(&format!("{}.torsion_order", path), "out of range"))?;
    let torsion_gen = parse_list(field(obj, path, "torsion_gen")?, &format!("{}.torsion_gen", path), parse_rat)?;
    let fund_units = parse_list(field(obj, path, "fund_units")?, &format!("{}.fund_units", path), |x, p| parse_list(x, p, parse_rat))?;
    let regulator = match field(obj, path, "regulator")? {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(perr(&format!("{}.regulator", path), "expected a decimal string")),
    };
    let normal_closure = match obj.get("normal_closure") {
        None | Some(Value::Null) => None,
        Some(nc) => {
            let np = format!("{}.normal_closure", path);
            let o = nc.as_object().ok_or_else(|| perr(&np, "expected an object"))?;
            let bundle = parse_bundle_value(field(o, &np, "bundle")?, &format!("{}.bundle", np))?;
            let images = parse_list(field(o, &np, "images")?, &format!("{}.images", np), |x, p| parse_list(x, p, parse_rat))?;
            Some(Box::new(NormalClosure { bundle, images }))
        }
    };
    Ok(FieldBundle { label, min_poly, torsion_order, torsion_gen, fund_units, regulator, normal_closure })
}

/// Parses a bundle document without any mathematical validation.
pub fn parse_bundle(doc: &str) -> Result<FieldBundle> {
    let v: Value = serde_json::from_str(doc).map_err(|e| perr("$", e.to_string()))?;
    parse_bundle_value(&v, "$")
}

fn int_value(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(x.to_string()),
    }
}

fn rat_value(x: &Q) -> Value {
    Value::String(format_rational(x))
}

fn coords_value(xs: &[Q]) -> Value {
    Value::Array(xs.iter().map(rat_value).collect())
}

impl FieldBundle {
    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("label".into(), Value::String(self.label.clone()));
        m.insert("min_poly".into(), Value::Array(self.min_poly.iter().map(int_value).collect()));
        m.insert("torsion_order".into(), Value::from(self.torsion_order));
        m.insert("torsion_gen".into(), coords_value(&self.torsion_gen));
        m.insert("fund_units".into(), Value::Array(self.fund_units.iter().map(|u| coords_value(u)).collect()));
        m.insert("regulator".into(), Value::String(self.regulator.clone()));
        if let Some(nc) = &self.normal_closure {
            let mut o = Map::new();
            o.insert("bundle".into(), nc.bundle.to_value());
            o.insert("images".into(), Value::Array(nc.images.iter().map(|u| coords_value(u)).collect()));
            m.insert("normal_closure".into(), Value::Object(o));
        }
        Value::Object(m)
    }

    /// Canonical form: sorted keys, lowest-terms rationals, no whitespace.
    pub fn emit(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("bundle serializes")
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len().saturating_sub(1)
    }

    pub fn number_field(&self) -> Result<Arc<NumberField>> {
        NumberField::new(&self.label, self.min_poly.clone())
    }

    /// Shape checks that need no field arithmetic.
    pub fn shape_issues(&self) -> Vec<Error> {
        let mut out = Vec::new();
        let n = self.degree();
        let bad = |check: &str, witness: String| Error::Validation { check: check.into(), witness };
        if n < 2 {
            out.push(bad("degree", format!("min_poly has degree {}", n)));
            return out;
        }
        if !self.min_poly[n].is_one() {
            out.push(bad("monic", format!("leading coefficient {}", self.min_poly[n])));
        }
        if self.torsion_gen.len() != n {
            out.push(bad("coordinate_length", format!("torsion_gen has length {} (expected {})", self.torsion_gen.len(), n)));
        }
        for (i, u) in self.fund_units.iter().enumerate() {
            if u.len() != n {
                out.push(bad("coordinate_length", format!("fund_units[{}] has length {} (expected {})", i, u.len(), n)));
            }
        }
        if self.torsion_order < 2 {
            out.push(bad("torsion_order", format!("w = {} < 2", self.torsion_order)));
        }
        if n % 2 == 0 && self.fund_units.len() != n / 2 - 1 {
            out.push(bad("unit_rank", format!("{} fundamental units (expected {})", self.fund_units.len(), n / 2 - 1)));
        }
        if self.regulator.trim().parse::<f64>().map(|x| !(x > 0.0)).unwrap_or(true) {
            out.push(bad("regulator", format!("{:?} is not a positive decimal", self.regulator)));
        }
        if let Some(nc) = &self.normal_closure {
            if nc.images.len() != n {
                out.push(bad("normal_closure", format!("{} embedding images (expected {})", nc.images.len(), n)));
            }
            let nl = nc.bundle.degree();
            for (i, im) in nc.images.iter().enumerate() {
                if im.len() != nl {
                    out.push(bad("coordinate_length", format!("normal_closure.images[{}] has length {} (expected {})", i, im.len(), nl)));
                }
            }
            out.extend(nc.bundle.shape_issues());
        }
        out
    }

    pub fn unit_group_data(&self, k: &Arc<NumberField>) -> UnitGroupData {
        UnitGroupData {
            zeta: NFElement::from_coords(k, &self.torsion_gen),
            w: self.torsion_order,
            fund_units: self.fund_units.iter().map(|u| NFElement::from_coords(k, u)).collect(),
            declared_regulator: Some(self.regulator.clone()),
        }
    }
}

/// A validated bundle, ready for the solvers. For a non-Galois K the solver
/// field is the normal closure L and `embedding` maps K's generator into L.
#[derive(Clone, Debug)]
pub struct LoadedField {
    pub bundle: FieldBundle,
    pub field: Arc<NumberField>,
    pub units: Option<UnitSystem>,
    pub closure: Option<ClosureData>,
    /// Regulator agreement; a mismatch leaves fundamentality unverified.
    pub regulator_verified: bool,
}

#[derive(Clone, Debug)]
pub struct ClosureData {
    pub units: UnitSystem,
    /// Image of K's generator under the first embedding K → L.
    pub generator_image: NFElement,
    pub relative_degree: usize,
    /// Archimedean data of K for the μ search.
    pub search: NormSearchData,
    pub integral_units: bool,
}

impl LoadedField {
    /// The unit system the pipelines run on: K's own when K is Galois,
    /// otherwise L's.
    pub fn solver_units(&self) -> Result<&UnitSystem> {
        if let Some(u) = &self.units {
            return Ok(u);
        }
        self.closure.as_ref().map(|c| &c.units).ok_or(Error::MissingNormalClosure)
    }

    pub fn is_galois(&self) -> bool {
        self.units.is_some()
    }

    /// Pushes a K-element into the solver field.
    pub fn to_solver_field(&self, a: &NFElement) -> Result<NFElement> {
        if self.units.is_some() {
            return Ok(a.clone());
        }
        let c = self.closure.as_ref().ok_or(Error::MissingNormalClosure)?;
        Ok(a.compose(&c.generator_image))
    }
}

fn load_units(b: &FieldBundle, k: &Arc<NumberField>, precision: u32, errs: &mut Vec<Error>) -> Option<(UnitSystem, bool)> {
    let ctx = match FieldContext::new(k, precision) {
        Ok(c) => Arc::new(c),
        Err(e) => {
            errs.push(e);
            return None;
        }
    };
    let data = b.unit_group_data(k);
    let issues = validate_unit_group(&data, &ctx);
    let reg_ok = !issues.iter().any(|i| matches!(i, UnitIssue::RegulatorMismatch { .. }));
    for i in issues.iter().filter(|i| !matches!(i, UnitIssue::RegulatorMismatch { .. })) {
        errs.push(Error::Validation { check: "unit_group".into(), witness: i.to_string() });
    }
    if !errs.is_empty() {
        return None;
    }
    match UnitSystem::new(data, ctx) {
        Ok(u) => Some((u, reg_ok)),
        Err(e) => {
            errs.push(e);
            None
        }
    }
}

/// Checks K's units for a non-Galois K: each has norm ±1 and maps to a unit
/// of L, the torsion generator has exact order w, and the rank is s_K − 1 with
/// a nonzero regulator. Returns the μ-search data and whether the declared
/// regulator matches (relative error below 1e-8).
fn subfield_units(
    b: &FieldBundle,
    k: &Arc<NumberField>,
    data: &UnitGroupData,
    lunits: &UnitSystem,
    gen: &NFElement,
    precision: u32,
) -> Result<(NormSearchData, bool)> {
    let bad = |w: String| Error::Validation { check: "unit_group".into(), witness: w };
    let search = NormSearchData::of_field(k, &data.fund_units, precision)?;
    let r = data.fund_units.len();
    if r + 1 != search.s() {
        return Err(bad(format!("{} fundamental units for {} places", r, search.s())));
    }
    for (i, u) in data.fund_units.iter().enumerate() {
        if lunits.discrete_log(&u.compose(gen)).is_err() {
            return Err(bad(format!("fund_units[{}] is not a unit of the normal closure", i)));
        }
    }
    let w = data.w;
    let zpow = |e: u64| (0..e).fold(NFElement::one(k), |acc, _| acc.mul(&data.zeta));
    let proper = (2..=w).filter(|p| w % p == 0 && (2..*p).all(|q| p % q != 0)).any(|p| zpow(w / p).is_one());
    if !zpow(w).is_one() || proper {
        return Err(bad(format!("torsion_gen does not have order {}", w)));
    }
    let rows: Vec<Vec<f64>> = search.log_rows[..r].to_vec();
    let reg = det_f64(rows).abs();
    if reg < 1e-9 {
        return Err(bad("fundamental units are dependent".into()));
    }
    let declared: f64 = b.regulator.parse().unwrap_or(f64::NAN);
    Ok((search, ((reg - declared) / declared).abs() < 1e-8))
}

fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for rr in c + 1..n {
            let f = a[rr][c] / a[c][c];
            for cc in c..n {
                a[rr][cc] -= f * a[c][cc];
            }
        }
    }
    det
}

/// Runs every structural, field, Galois and unit-group check. On failure all
/// problems found are returned.
pub fn validate_bundle(b: &FieldBundle, precision: u32) -> std::result::Result<LoadedField, Vec<Error>> {
    let mut errs = b.shape_issues();
    if !errs.is_empty() {
        return Err(errs);
    }
    let k = b.number_field().map_err(|e| vec![e])?;
    // K Galois: validate K's own units. Otherwise everything runs in L.
    let galois = FieldContext::new(&k, precision);
    match galois {
        Ok(_) => {
            let (units, reg) = load_units(b, &k, precision, &mut errs).ok_or_else(|| errs.clone())?;
            Ok(LoadedField { bundle: b.clone(), field: k, units: Some(units), closure: None, regulator_verified: reg })
        }
        Err(Error::NotGalois(_)) => {
            let Some(nc) = &b.normal_closure else {
                return Ok(LoadedField { bundle: b.clone(), field: k, units: None, closure: None, regulator_verified: false });
            };
            let l = nc.bundle.number_field().map_err(|e| vec![e])?;
            let (lunits, reg) = load_units(&nc.bundle, &l, precision, &mut errs).ok_or_else(|| errs.clone())?;
            let f = k.defining_poly();
            let mut images: Vec<NFElement> = Vec::new();
            for (i, im) in nc.images.iter().enumerate() {
                let x = NFElement::from_coords(&l, im);
                let val = f.0.iter().rev().fold(NFElement::zero(&l), |acc, c| acc.mul(&x).add(&NFElement::from_q(&l, c)));
                if !val.is_zero() {
                    errs.push(Error::Validation { check: "normal_closure".into(), witness: format!("images[{}] is not a root of min_poly", i) });
                }
                if images.contains(&x) {
                    errs.push(Error::Validation { check: "normal_closure".into(), witness: format!("images[{}] repeats an earlier image", i) });
                }
                images.push(x);
            }
            if lunits.ctx.n() % k.degree() != 0 {
                errs.push(Error::Validation { check: "normal_closure".into(), witness: "deg L is not a multiple of deg K".into() });
            }
            if !errs.is_empty() {
                return Err(errs);
            }
            let relative_degree = lunits.ctx.n() / k.degree();
            let gen = images[0].clone();
            let data = b.unit_group_data(&k);
            let (search, k_reg) = subfield_units(b, &k, &data, &lunits, &gen, precision).map_err(|e| vec![e])?;
            let integral_units = data.fund_units.iter().all(|e| e.is_integral_coords());
            Ok(LoadedField {
                bundle: b.clone(),
                field: k,
                units: None,
                closure: Some(ClosureData { units: lunits, generator_image: gen, relative_degree, search, integral_units }),
                regulator_verified: reg && k_reg,
            })
        }
        Err(e) => Err(vec![e]),
    }
}

pub fn parse_and_validate_bundle(doc: &str, precision: u32) -> std::result::Result<LoadedField, Vec<Error>> {
    let b = parse_bundle(doc).map_err(|e| vec![e])?;
    validate_bundle(&b, precision)
}

pub fn read_bundle(path: &Path) -> Result<FieldBundle> {
    let s = std::fs::read_to_string(path)?;
    parse_bundle(&s)
}

/// Parses α shorthand: comma-separated sums of terms c·z^e such as
/// "1,z,z2", "1+z,2z3-z", or a JSON list of coordinate lists.
pub fn parse_alphas(s: &str, k: &Arc<NumberField>) -> Result<Vec<NFElement>> {
    let t = s.trim();
    if t.starts_with('[') {
        let v: Value = serde_json::from_str(t).map_err(|e| perr("alphas", e.to_string()))?;
        let lists = parse_list(&v, "alphas", |x, p| parse_list(x, p, parse_rat))?;
        let n = k.degree();
        return lists
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.len() != n {
                    Err(Error::Validation { check: "coordinate_length".into(), witness: format!("alphas[{}] has length {} (expected {})", i, c.len(), n) })
                } else {
                    Ok(NFElement::from_coords(k, c))
                }
            })
            .collect();
    }
    t.split(',').enumerate().map(|(i, tok)| parse_shorthand(tok.trim(), k).map_err(|m| perr(&format!("alphas[{}]", i), m))).collect()
}

fn parse_shorthand(tok: &str, k: &Arc<NumberField>) -> std::result::Result<NFElement, String> {
    if tok.is_empty() {
        return Err("empty term".into());
    }
    let mut acc = NFElement::zero(k);
    let mut rest = tok.replace(' ', "");
    if !rest.starts_with('+') && !rest.starts_with('-') {
        rest.insert(0, '+');
    }
    let bytes: Vec<char> = rest.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let neg = bytes[i] == '-';
        i += 1;
        let start = i;
        while i < bytes.len() && bytes[i] != '+' && bytes[i] != '-' {
            i += 1;
        }
        let term: String = bytes[start..i].iter().collect();
        let (coef, power) = match term.find('z') {
            Some(p) => {
                let c = &term[..p];
                let c = c.strip_suffix('*').unwrap_or(c);
                let coef = if c.is_empty() { BigInt::one() } else { BigInt::from_str(c).map_err(|_| format!("bad coefficient in {:?}", tok))? };
                let e = term[p + 1..].strip_prefix('^').unwrap_or(&term[p + 1..]);
                let power = if e.is_empty() { 1 } else { e.parse::<usize>().map_err(|_| format!("bad exponent in {:?}", tok))? };
                (coef, power)
            }
            None => (BigInt::from_str(&term).map_err(|_| format!("bad term {:?}", term))?, 0),
        };
        let coef = if neg { -coef } else { coef };
        acc = acc.add(&NFElement::theta_pow(k, power).scale_int(&coef));
    }
    Ok(acc)
}

/// Which pipeline a problem asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    Auto,
    Threevar,
    Sextic,
    PowerBasis,
}

impl FromStr for SolverChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SolverChoice::Auto),
            "threevar" => Ok(SolverChoice::Threevar),
            "sextic" => Ok(SolverChoice::Sextic),
            "power_basis" | "power-basis" => Ok(SolverChoice::PowerBasis),
            _ => Err(Error::InvalidInput(format!("unknown solver {:?}", s))),
        }
    }
}

impl SolverChoice {
    pub fn pipeline(self) -> Option<Pipeline> {
        match self {
            SolverChoice::Auto => None,
            SolverChoice::Threevar => Some(Pipeline::Threevar),
            SolverChoice::Sextic => Some(Pipeline::Sextic),
            SolverChoice::PowerBasis => Some(Pipeline::PowerBasis),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub alphas: Vec<NFElement>,
    pub m: BigInt,
    pub solver: SolverChoice,
    pub options: SolveOptions,
}

impl ProblemSpec {
    pub fn new(field: &LoadedField, alphas: &str, m: BigInt, solver: SolverChoice, options: SolveOptions) -> Result<ProblemSpec> {
        let alphas = parse_alphas(alphas, &field.field)?;
        if !(3..=5).contains(&alphas.len()) {
            return Err(Error::InvalidInput(format!("{} alphas given (expected 3, 4 or 5)", alphas.len())));
        }
        if m.is_zero() {
            return Err(Error::InvalidInput("m must be nonzero".into()));
        }
        Ok(ProblemSpec { alphas, m, solver, options })
    }

    /// The problem in the solver field. For a non-Galois K the right-hand
    /// side becomes m^[L:K], since N_L(x) = N_K(x)^[L:K] on K.
    pub fn problem(&self, field: &LoadedField) -> Result<NormFormProblem> {
        let units = field.solver_units()?;
        match &field.closure {
            Some(c) => NormFormProblem::lifted(
                units.ctx.clone(),
                SubfieldLift {
                    search: c.search.clone(),
                    embedding: c.generator_image.clone(),
                    alphas: self.alphas.clone(),
                    m: self.m.clone(),
                    integral_units: c.integral_units,
                },
            ),
            None => NormFormProblem::new(units.ctx.clone(), self.alphas.clone(), self.m.clone()),
        }
    }

    /// N_{K/Q}(Σ x_i α_i) = m, evaluated in K.
    pub fn holds_over_k(&self, x: &[BigInt]) -> bool {
        let k = self.alphas[0].field();
        let beta = self.alphas.iter().zip(x).fold(NFElement::zero(k), |acc, (a, xi)| acc.add(&a.scale_int(xi)));
        beta.norm() == Q::from_integer(self.m.clone())
    }
}

/// Runs the requested pipeline. Over a non-Galois K the search runs in the
/// normal closure L and each sporadic solution is rechecked with the exact
/// norm of K (N_L = N_K^[L:K] cannot tell m from −m when [L:K] is even).
pub fn solve_spec(field: &LoadedField, spec: &ProblemSpec) -> Result<SolverReport> {
    let units = field.solver_units()?;
    let p = spec.problem(field)?;
    let mut report = solve(&p, units, spec.solver.pipeline(), &spec.options)?;
    if let Some(c) = &field.closure {
        let before = report.sporadic.len();
        report.sporadic.retain(|x| {
            let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
            spec.holds_over_k(&xb)
        });
        report.notes.push(format!(
            "solved in the normal closure {} (degree {} over K) with m^{}; {} of {} sporadic solutions keep N_K = m",
            c.units.ctx.field.label,
            c.relative_degree,
            c.relative_degree,
            report.sporadic.len(),
            before
        ));
        if !report.families.is_empty() {
            report.notes.push("family members satisfy N_K = ±m; the sign is checked per member".into());
        }
        report.problem.field = format!("{} (via {})", field.bundle.label, c.units.ctx.field.label);
    }
    if !field.regulator_verified {
        report.completeness = report.completeness.max(Completeness::ConditionalOnUnitGroup);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z7: &str = include_str!("../fixtures/q_zeta7.json");

    #[test]
    fn roundtrip_is_byte_identical() {
        let b = parse_bundle(Z7).unwrap();
        assert_eq!(b.emit(), Z7.trim());
        assert_eq!(parse_bundle(&b.emit()).unwrap(), b);
    }

    #[test]
    fn missing_key_names_path() {
        let mut v: Value = serde_json::from_str(Z7).unwrap();
        v.as_object_mut().unwrap().remove("fund_units");
        match parse_bundle(&v.to_string()) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "$.fund_units"),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn wrong_length_is_reported_with_index() {
        let mut b = parse_bundle(Z7).unwrap();
        b.fund_units[1].pop();
        let errs = validate_bundle(&b, 128).unwrap_err();
        assert!(errs.iter().any(|e| matches!(e, Error::Validation { witness, .. } if witness.contains("fund_units[1]"))));
    }

    #[test]
    fn shorthand_terms() {
        let k = NumberField::from_i64("Q(zeta7)", &[1, 1, 1, 1, 1, 1, 1]).unwrap();
        let a = parse_alphas("1,z,z2,1+z,2z3-z", &k).unwrap();
        assert_eq!(a[2], NFElement::theta_pow(&k, 2));
        assert_eq!(a[3], NFElement::from_i64_coords(&k, &[1, 1]));
        assert_eq!(a[4], NFElement::from_i64_coords(&k, &[0, -1, 0, 2]));
        let raw = parse_alphas("[[\"1\",\"0\",\"0\",\"0\",\"0\",\"0\"],[\"0\",\"1/2\",\"0\",\"0\",\"0\",\"0\"]]", &k).unwrap();
        assert_eq!(raw[1], NFElement::theta(&k).scale(&Q::new(1.into(), 2.into())));
    }

    const D4: &str = include_str!("../fixtures/quartic_d4.json");

    fn d4_spec(field: &LoadedField, alphas: &str, m: i64) -> ProblemSpec {
        ProblemSpec::new(field, alphas, m.into(), SolverChoice::Auto, SolveOptions::default()).unwrap()
    }

    #[test]
    fn non_galois_without_closure_is_refused() {
        let mut b = parse_bundle(D4).unwrap();
        b.normal_closure = None;
        let field = validate_bundle(&b, 128).unwrap();
        let spec = d4_spec(&field, "1,z,z2", 7);
        assert!(matches!(solve_spec(&field, &spec), Err(Error::MissingNormalClosure)));
    }

    #[test]
    fn non_galois_solved_in_closure() {
        let field = parse_and_validate_bundle(D4, 192).unwrap();
        assert!(field.regulator_verified);
        let spec = d4_spec(&field, "1,z,z2", 14);
        let report = solve_spec(&field, &spec).unwrap();
        assert_eq!(report.completeness, Completeness::Proven);
        let expect: Vec<Vec<i64>> = vec![vec![-1, -1, 0], vec![-1, 1, 0], vec![1, -1, 0], vec![1, 1, 0]];
        assert_eq!(report.sporadic, expect);
        for x in &report.sporadic {
            assert!(spec.holds_over_k(&x.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>()));
        }
    }

    #[test]
    fn closure_image_must_be_a_root() {
        let mut b = parse_bundle(D4).unwrap();
        let nc = b.normal_closure.as_mut().unwrap();
        nc.images[2] = nc.images[0].clone();
        nc.images[3][1] = Q::from_integer(5.into());
        let errs = validate_bundle(&b, 128).unwrap_err();
        assert!(errs.iter().any(|e| e.to_string().contains("images[2] repeats")));
        assert!(errs.iter().any(|e| e.to_string().contains("images[3] is not a root")));
    }
}
