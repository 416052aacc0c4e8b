//! Three-term unit equations αx + βy + γ = 0: Matveev bound, lattice
//! reduction, then enumeration of x with a modular prefilter on y.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baker::{
    box_size, reduce_bound_lattice, three_term_height_bound, three_term_setup, BoundCertificate, BoundStatus, ExceptionalCandidate,
    SmallSide, UnitLogData,
};
use crate::error::Result;
use crate::field::NFElement;
use crate::modular::{mulmod, split_primes, SplitPrime};
use crate::poly::modp;
use crate::units::{ExponentVector, UnitSystem};

/// Default cap on enumerated x-candidates per equation.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ThreeTermSolution {
    pub x: ExponentVector,
    pub y: ExponentVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeTermResult {
    pub solutions: Vec<ThreeTermSolution>,
    pub certificate: BoundCertificate,
}

struct PrimeTables {
    sp: SplitPrime,
    alpha: Vec<u64>,
    neg_gamma: Vec<u64>,
    /// ±N(β) mod p
    targets: [u64; 2],
    zeta_pows: Vec<Vec<u64>>,
    /// unit_pows[i][e + A][j]: ε_i^e at root j
    unit_pows: Vec<Vec<Vec<u64>>>,
}

fn build_tables(sp: SplitPrime, alpha: &NFElement, beta: &NFElement, gamma: &NFElement, units: &UnitSystem, a: i64) -> Option<PrimeTables> {
    let p = sp.p;
    let al = sp.eval(alpha)?;
    let ng: Vec<u64> = sp.eval(gamma)?.iter().map(|&v| (p - v) % p).collect();
    let nb = sp.norm(&sp.eval(beta)?);
    if nb == 0 {
        return None;
    }
    let z = sp.eval(&units.data.zeta)?;
    let mut zeta_pows = vec![vec![1u64; sp.roots.len()]];
    for k in 1..units.w() as usize {
        let prev = &zeta_pows[k - 1];
        zeta_pows.push(prev.iter().zip(&z).map(|(x, y)| mulmod(*x, *y, p)).collect());
    }
    let mut unit_pows = Vec::new();
    for e in &units.data.fund_units {
        let img = sp.eval(e)?;
        let inv: Vec<u64> = img.iter().map(|&v| modp::inv(v, p)).collect();
        let mut pos = vec![vec![1u64; img.len()]];
        let mut neg = vec![vec![1u64; img.len()]];
        for _ in 0..a {
            let l = pos.last().unwrap();
            pos.push(l.iter().zip(&img).map(|(x, y)| mulmod(*x, *y, p)).collect());
            let l = neg.last().unwrap();
            neg.push(l.iter().zip(&inv).map(|(x, y)| mulmod(*x, *y, p)).collect());
        }
        let mut table: Vec<Vec<u64>> = neg.into_iter().skip(1).rev().collect();
        table.extend(pos);
        unit_pows.push(table);
    }
    Some(PrimeTables { targets: [nb, (p - nb) % p], sp, alpha: al, neg_gamma: ng, zeta_pows, unit_pows })
}

impl PrimeTables {
    fn passes(&self, k: u64, a: &[i64], bound: i64) -> bool {
        let p = self.sp.p;
        let mut norm = 1u64;
        for j in 0..self.sp.roots.len() {
            let mut x = self.zeta_pows[k as usize][j];
            for (i, &e) in a.iter().enumerate() {
                x = mulmod(x, self.unit_pows[i][(e + bound) as usize][j], p);
            }
            let v = (self.neg_gamma[j] + p - mulmod(self.alpha[j], x, p)) % p;
            norm = mulmod(norm, v, p);
        }
        norm == self.targets[0] || norm == self.targets[1]
    }
}

/// Whether the cube point with index idx has max_ν |log|ι_ν x|| ≤ w_log.
fn in_log_box(units: &UnitSystem, idx: u64, side: u64, bound: i64, w_log: Option<f64>) -> bool {
    let Some(wl) = w_log else { return true };
    let lim = 2.0 * (wl * (1.0 + 1e-9) + 1e-6);
    units.log_rows.iter().all(|row| {
        let mut rest = idx;
        let mut l = 0.0;
        for c in row {
            l += c * ((rest % side) as i64 - bound) as f64;
            rest /= side;
        }
        l.abs() <= lim
    })
}

/// Cube walks longer than this are not attempted.
pub const CUBE_CAP: u64 = 2_000_000_000;

/// Candidates (torsion included) the search with these bounds would test,
/// or None when the cube walk itself is over CUBE_CAP.
pub fn search_size(units: &UnitSystem, bound: i64, w_log: Option<f64>) -> Option<u128> {
    let side = (2 * bound + 1) as u64;
    let count = side.checked_pow(units.rank() as u32)?;
    if count > CUBE_CAP {
        return None;
    }
    let inside = match w_log {
        None => count,
        Some(_) => (0..count).into_par_iter().filter(|&idx| in_log_box(units, idx, side, bound, w_log)).count() as u64,
    };
    Some(inside as u128 * units.w() as u128)
}

/// Exhaustive search over x with |a_i| ≤ bound (and max_ν |log|x|_ν| ≤ w_log
/// when given): every (x, y) with y = (−γ − αx)/β a unit.
pub fn enumerate_three_term(
    alpha: &NFElement,
    beta: &NFElement,
    gamma: &NFElement,
    units: &UnitSystem,
    bound: i64,
    w_log: Option<f64>,
) -> Vec<ThreeTermSolution> {
    let r = units.rank();
    let w = units.w();
    let primes = split_primes(&units.ctx.field, 3, 1 << 16);
    let tables: Vec<PrimeTables> = primes
        .into_iter()
        .filter_map(|sp| build_tables(sp, alpha, beta, gamma, units, bound))
        .collect();
    let side = (2 * bound + 1) as u64;
    let count = side.pow(r as u32);
    let mut out: Vec<ThreeTermSolution> = (0..count)
        .into_par_iter()
        .flat_map_iter(|idx| {
            let mut found = Vec::new();
            if in_log_box(units, idx, side, bound, w_log) {
                let mut rest = idx;
                let a: Vec<i64> = (0..r)
                    .map(|_| {
                        let v = (rest % side) as i64 - bound;
                        rest /= side;
                        v
                    })
                    .collect();
                for k in 0..w {
                    if tables.iter().all(|t| t.passes(k, &a, bound)) {
                        let xe = ExponentVector { k, a: a.clone() };
                        let x = units.from_exponents(&xe);
                        let num = gamma.add(&alpha.mul(&x)).neg();
                        if num.is_zero() {
                            continue;
                        }
                        if let Ok(y) = num.div(beta) {
                            if let Ok(ye) = units.discrete_log(&y) {
                                found.push(ThreeTermSolution { x: xe, y: ye });
                            }
                        }
                    }
                }
            }
            found
        })
        .collect();
    out.sort();
    out
}

/// Each candidate fixes one unknown up to torsion; the other follows from the
/// equation and is kept when it is a unit.
fn check_exceptional(
    alpha: &NFElement,
    beta: &NFElement,
    gamma: &NFElement,
    units: &UnitSystem,
    cands: &[ExceptionalCandidate],
) -> Result<Vec<ThreeTermSolution>> {
    let mut out = Vec::new();
    for c in cands {
        for k in 0..units.w() {
            let known = ExponentVector { k, a: c.exponents.clone() };
            let u = units.from_exponents(&known);
            // x small: y is known; y small: x is known
            let (num, den) = match c.small {
                SmallSide::X => (beta.mul(&u).add(gamma), alpha),
                SmallSide::Y => (alpha.mul(&u).add(gamma), beta),
            };
            if num.is_zero() {
                continue;
            }
            let other = num.neg().div(den)?;
            // a unit has log-norm 0; rejects most candidates without a resultant
            let log_norm: f64 = (0..units.ctx.n())
                .map(|j| units.ctx.table.embed_at(&other, j).log_abs().map(|b| b.mid_f64()).unwrap_or(f64::NEG_INFINITY))
                .sum();
            if !(log_norm.abs() < 1e-6) {
                continue;
            }
            let Ok(oe) = units.discrete_log(&other) else { continue };
            if units.from_exponents(&oe) != other {
                continue;
            }
            out.push(match c.small {
                SmallSide::X => ThreeTermSolution { x: oe, y: known },
                SmallSide::Y => ThreeTermSolution { x: known, y: oe },
            });
        }
    }
    Ok(out)
}

/// Solves αx + βy + γ = 0 in units x, y (a dehomogenized three-term unit
/// equation). `growth` is the coefficient height budget (c, d).
pub fn solve_three_term(
    alpha: &NFElement,
    beta: &NFElement,
    gamma: &NFElement,
    units: &UnitSystem,
    logdata: &UnitLogData,
    growth: Option<(f64, f64)>,
    budget: u128,
) -> Result<ThreeTermResult> {
    let setup = three_term_setup(alpha, beta, gamma, units, logdata)?;
    let growth = growth.unwrap_or_else(|| {
        let h = setup.forms.iter().map(|f| f.h0).fold(0.0, f64::max);
        (h, 0.0)
    });
    let cert0 = three_term_height_bound(&setup, growth)?;
    let mut cert = reduce_bound_lattice(&cert0, &setup)?;
    let r = units.rank();
    let w = units.w();
    let mut bound = cert.reduced_bound;
    let mut w_log = Some(cert.reduced_log_bound);
    let fits = bound <= i64::MAX as u64 && search_size(units, bound as i64, w_log).map(|n| n <= budget).unwrap_or(false);
    if !fits {
        while bound > 0 && box_size(bound, r, w) > budget {
            bound = bound * 9 / 10;
        }
        cert.status = BoundStatus::Conditional { searched_up_to: bound };
        w_log = None;
    }
    let mut solutions = enumerate_three_term(alpha, beta, gamma, units, bound as i64, w_log);
    solutions.extend(check_exceptional(alpha, beta, gamma, units, &cert.exceptional)?);
    solutions.sort();
    solutions.dedup();
    Ok(ThreeTermResult { solutions, certificate: cert })
}
