//! Functors between the marking regimes, and the truncations `τ_n`.

use std::sync::Arc;

use crate::complex::catalog::{marker, Cube};
use crate::complex::{pushout, CellId, MCMap, MCSet, Map, Regime};
use crate::error::{bail, Result};

fn up(regime: Regime) -> Result<Regime> {
    match regime {
        Regime::Unmarked => Ok(Regime::Edge),
        Regime::Edge => Ok(Regime::Full),
        Regime::Full => bail!(Precondition, "no marking regime above the full one"),
    }
}

fn down(regime: Regime) -> Result<Regime> {
    match regime {
        Regime::Full => Ok(Regime::Edge),
        Regime::Edge => Ok(Regime::Unmarked),
        Regime::Unmarked => bail!(Precondition, "no marking regime below the unmarked one"),
    }
}

/// Dimensions whose markings a regime adds over the one below it.
fn new_level(regime: Regime) -> impl Fn(usize) -> bool {
    move |d| match regime {
        Regime::Edge => d == 1,
        Regime::Full => d > 1,
        Regime::Unmarked => false,
    }
}

/// `♭`: moves one regime up, marking nothing new.
pub fn flat(x: &MCSet) -> Result<Arc<MCSet>> {
    let to = up(x.regime)?;
    Ok(Arc::new(x.with_markings(to, |_, c| c.marked)))
}

/// `♯`: moves one regime up, marking everything new.
pub fn sharp(x: &MCSet) -> Result<Arc<MCSet>> {
    let to = up(x.regime)?;
    let fresh = new_level(to);
    Ok(Arc::new(x.with_markings(to, |_, c| c.marked || fresh(c.dim))))
}

/// `|−|`: forgets the markings of the top regime level.
pub fn forget_markings(x: &MCSet) -> Result<Arc<MCSet>> {
    let to = down(x.regime)?;
    Ok(Arc::new(x.with_markings(to, |_, c| c.marked)))
}

/// `|f|` on the same cells.
pub fn forget_markings_map(f: &MCMap, dom: &Arc<MCSet>, cod: &Arc<MCSet>) -> MCMap {
    Map { domain: dom.clone(), codomain: cod.clone(), assign: f.assign.clone() }
}

/// The core: the largest regular subcomplex all of whose top-level cubes are marked,
/// with those markings then forgotten. Returns the inclusion into `|X|`.
pub fn core(x: &Arc<MCSet>) -> Result<(Arc<MCSet>, MCMap)> {
    let level = new_level(x.regime);
    // a cell survives when it and every face at the top level are marked
    let mut keep = vec![false; x.len()];
    for c in 0..x.len() {
        let cell = x.cell(c);
        keep[c] = (!level(cell.dim) || cell.marked) && cell.faces.iter().all(|f| keep[f.base]);
    }
    let cells: Vec<CellId> = (0..x.len()).filter(|&c| keep[c]).collect();
    let forgotten = forget_markings(x)?;
    Ok(forgotten.subcomplex(&cells))
}

/// `τ_n`: marks every cube of dimension above `n`.
pub fn trivialize(x: &MCSet, n: usize) -> Arc<MCSet> {
    let regime = x.regime;
    Arc::new(x.with_markings(regime, |_, c| c.marked || (c.dim > n && regime.allows(c.dim))))
}

/// `τ_n` computed as iterated pushouts of markers `□^d → □̃^d`, one per unmarked cell of
/// dimension above `n`. Agrees with [`trivialize`] up to isomorphism.
pub fn trivialize_by_pushouts(x: &Arc<MCSet>, n: usize) -> Result<Arc<MCSet>> {
    let mut cur = x.clone();
    // pushouts along monos keep the cell ids of the left leg
    let targets: Vec<CellId> = (0..x.len())
        .filter(|&c| x.dim(c) > n && !x.cell(c).marked && x.regime.allows(x.dim(c)))
        .collect();
    for c in targets {
        let d = x.dim(c);
        let mk = marker(d, x.shape)?;
        let cube = Cube::standard(d, x.shape);
        let classify = cube.classify(&mk.domain, &cur, &cur.id_ref(c));
        let po = pushout(&classify, &mk)?;
        if po.in_x.assign.iter().enumerate().any(|(k, r)| r.base != k || !r.epi.is_identity()) {
            bail!(Invalid, "pushout along a marker relabeled cells");
        }
        cur = po.object;
    }
    Ok(cur)
}
