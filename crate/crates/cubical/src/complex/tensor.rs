//! The geometric product (lax Gray tensor) of marked cubical sets.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{bail, Result};

use super::{Cell, CellId, Complex, CubeRef, MCMap, MCSet, Ref};

/// `X ⊗ Y` together with the pairing of non-degenerate cells.
#[derive(Clone, Debug)]
pub struct Tensor {
    pub object: Arc<MCSet>,
    pub pairs: Vec<(CellId, CellId)>,
    lookup: HashMap<(CellId, CellId), CellId>,
}

impl Tensor {
    pub fn cell(&self, x: CellId, y: CellId) -> CellId {
        self.lookup[&(x, y)]
    }

    /// `(x·e) ⊗ (y·e') = (x ⊗ y)·(e ⊗ e')`.
    pub fn pair_ref(&self, rx: &CubeRef, ry: &CubeRef) -> CubeRef {
        Ref { epi: rx.epi.tensor(&ry.epi), base: self.cell(rx.base, ry.base) }
    }
}

pub fn tensor(x: &MCSet, y: &MCSet) -> Result<Tensor> {
    if x.shape != y.shape {
        bail!(Flavor, "tensor of {} and {} complexes", x.shape, y.shape);
    }
    if x.regime != y.regime {
        bail!(Precondition, "tensor of {} and {} regimes", x.regime, y.regime);
    }
    let mut order: Vec<(usize, CellId, CellId)> = Vec::new();
    for a in 0..x.len() {
        for b in 0..y.len() {
            order.push((x.dim(a) + y.dim(b), a, b));
        }
    }
    order.sort();
    let mut out: MCSet = Complex::new(x.shape, x.regime);
    let mut t = Tensor { object: Arc::new(Complex::new(x.shape, x.regime)), pairs: vec![], lookup: HashMap::new() };
    for (_, a, b) in order {
        let (k, l) = (x.dim(a), y.dim(b));
        let mut faces = Vec::with_capacity(2 * (k + l));
        for slot in 0..2 * k {
            faces.push(t.pair_ref(&x.cell(a).faces[slot], &y.id_ref(b)));
        }
        for slot in 0..2 * l {
            faces.push(t.pair_ref(&x.id_ref(a), &y.cell(b).faces[slot]));
        }
        let marked = (x.cell(a).marked || y.cell(b).marked) && x.regime.allows(k + l);
        let id = out.push_cell(Cell { dim: k + l, faces, marked });
        t.pairs.push((a, b));
        t.lookup.insert((a, b), id);
    }
    t.object = Arc::new(out);
    Ok(t)
}

/// `f ⊗ g` between the tensors of domains and of codomains.
pub fn tensor_maps(f: &MCMap, g: &MCMap) -> Result<(Tensor, Tensor, MCMap)> {
    let dom = tensor(&f.domain, &g.domain)?;
    let cod = tensor(&f.codomain, &g.codomain)?;
    let assign = dom
        .pairs
        .iter()
        .map(|&(a, b)| cod.pair_ref(&f.assign[a], &g.assign[b]))
        .collect();
    let m = MCMap { domain: dom.object.clone(), codomain: cod.object.clone(), assign };
    Ok((dom, cod, m))
}

/// `f ⊗ g` into a prescribed codomain tensor.
pub fn tensor_maps_into(f: &MCMap, g: &MCMap, dom: &Tensor, cod: &Tensor) -> MCMap {
    let assign = dom
        .pairs
        .iter()
        .map(|&(a, b)| cod.pair_ref(&f.assign[a], &g.assign[b]))
        .collect();
    MCMap { domain: dom.object.clone(), codomain: cod.object.clone(), assign }
}
