//! Operator words as written on the command line and in documents.
//!
//! A word acts on a cube of a stated dimension and is read left to right in the order the
//! operators act on it: `x·s(1)·d(1,0)` is written `s(1),d(1,0)` on a 1-cube. As a map of
//! cubes this is the composite `s(1) ∘ d(1,0)` landing in that dimension.

use cubical::opcalc::{Flavor, Generator, NormalForm, OperatorWord};
use cubical::{Error, Result};

/// The dimension of `x·g` for `x` of dimension `n`.
fn acted_dim(g: &Generator, n: usize) -> Result<usize> {
    match *g {
        Generator::Face { i, .. } if i >= 1 && i <= n => Ok(n - 1),
        Generator::Degen { i } if i >= 1 && i <= n + 1 => Ok(n + 1),
        Generator::Conn { i, .. } if i >= 1 && i <= n => Ok(n + 1),
        _ => Err(Error::InvalidWord(format!("{g} does not act on a {n}-cube"))),
    }
}

/// The map named by a word acting on an `n`-cube.
pub fn parse(n: usize, text: &str, flavor: Flavor) -> Result<NormalForm> {
    let w = OperatorWord::parse(0, text)?;
    let mut m = n;
    for g in &w.gens {
        m = acted_dim(g, m)?;
    }
    let gens = w.gens.into_iter().rev().collect();
    NormalForm::normalize(&OperatorWord::new(m, gens), flavor)
}

/// The canonical word of a map, in action order: faces, then connections, then degeneracies.
pub fn print(phi: &NormalForm) -> String {
    let w = phi.to_word();
    if w.gens.is_empty() {
        return "id".into();
    }
    w.gens.iter().rev().map(|g| g.to_string()).collect::<Vec<_>>().join(",")
}
