#![allow(dead_code)]

use racgdiv_core::coxeter::{build_family, FamilyKind, PresentationGraph, Word};
use racgdiv_oracle::Relations;

pub fn gamma(d: u32) -> PresentationGraph {
    build_family(FamilyKind::Gamma, d).unwrap()
}

pub fn omega(d: u32) -> PresentationGraph {
    build_family(FamilyKind::Omega, d).unwrap()
}

/// The same group seen only through its commutation relations.
pub fn relations(g: &PresentationGraph) -> Relations {
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(a, b)| (a as usize, b as usize))
        .collect();
    Relations::new(g.num_generators(), &edges)
}

pub fn to_word(w: &[usize]) -> Word {
    Word(w.iter().map(|&s| s as u16).collect())
}

pub fn to_usize(w: &[u16]) -> Vec<usize> {
    w.iter().map(|&s| s as usize).collect()
}
