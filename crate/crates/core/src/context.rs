//! A validated totally complex Galois field together with its certified
//! embeddings, automorphism table and places.

use std::sync::Arc;

use crate::embed::EmbeddingTable;
use crate::error::{Error, Result};
use crate::field::{NFElement, NumberField};
use crate::galois::{act_on_place, infinite_places, GaloisGroupTable, PlacePairing};
use crate::poly::has_rational_root;

/// Default working precision in bits; NORMFORM_PRECISION_BITS overrides it.
pub const DEFAULT_PRECISION: u32 = 256;

pub fn precision_from_env() -> u32 {
    std::env::var("NORMFORM_PRECISION_BITS")
        .ok()
        .and_then(|s| s.trim().parse::<u32>().ok())
        .filter(|&p| p >= 64)
        .unwrap_or(DEFAULT_PRECISION)
}

#[derive(Clone, Debug)]
pub struct FieldContext {
    pub field: Arc<NumberField>,
    pub table: EmbeddingTable,
    pub gal: GaloisGroupTable,
    pub places: PlacePairing,
}

impl FieldContext {
    /// Validates f (squarefree, no rational root, mod-p screen), computes
    /// the root table, the automorphisms and the places.
    pub fn new(field: &Arc<NumberField>, precision: u32) -> Result<FieldContext> {
        screen_polynomial(field)?;
        let table = EmbeddingTable::compute(field, precision)?;
        let gal = GaloisGroupTable::compute(field, &table)?;
        let places = infinite_places(&table, &gal)?;
        Ok(FieldContext { field: field.clone(), table, gal, places })
    }

    pub fn n(&self) -> usize {
        self.field.n
    }

    pub fn s(&self) -> usize {
        self.places.s
    }

    pub fn precision(&self) -> u32 {
        self.table.precision
    }

    pub fn is_cm(&self) -> bool {
        self.places.is_cm()
    }

    /// Complex conjugation when it is central (CM case).
    pub fn central_conjugation(&self) -> Option<usize> {
        self.is_cm().then(|| self.places.conj_involutions[0])
    }

    /// Embedding index used for place ν (the upper half-plane root).
    pub fn place_embedding(&self, place: usize) -> usize {
        self.places.pairs[place].0
    }

    pub fn act_on_place(&self, s: usize, place: usize) -> usize {
        act_on_place(&self.gal, &self.places, s, place)
    }

    pub fn apply(&self, s: usize, a: &NFElement) -> NFElement {
        self.gal.apply(s, a)
    }

    /// Index of the automorphism τ with τ fixing every element of `xs`,
    /// other than the identity. None when only the identity fixes them.
    pub fn nontrivial_stabilizer(&self, xs: &[NFElement]) -> Option<usize> {
        (1..self.gal.order()).find(|&s| xs.iter().all(|x| &self.apply(s, x) == x))
    }
}

/// The cheap irreducibility screen: squarefree and no rational roots. The
/// mod-p degree screen runs inside the automorphism search, which rejects
/// unequal splitting patterns. Irreducibility itself is trusted.
pub fn screen_polynomial(field: &NumberField) -> Result<()> {
    if !field.is_squarefree() {
        return Err(Error::Validation { check: "squarefree".into(), witness: "gcd(f, f') != 1".into() });
    }
    if field.n > 1 && has_rational_root(&field.poly) {
        return Err(Error::Validation { check: "irreducible".into(), witness: "f has a rational root".into() });
    }
    Ok(())
}
