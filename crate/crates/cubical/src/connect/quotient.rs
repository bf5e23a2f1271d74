use std::collections::BTreeMap;
use std::sync::Arc;

use crate::complex::catalog::{marked_cube, standard_cube};
use crate::complex::tensor::Tensor;
use crate::complex::{pushout, tensor_maps, CellId, CubeRef, MCMap, MCSet, Map};
use crate::error::{bail, Result};
use crate::homotopy::terminal_map;
use crate::opcalc::{Flavor, NormalForm};

/// `X/x`: the square `x: □^1 ⊗ □̃^1 → X` collapsed onto an edge along its marked direction.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub object: Arc<MCSet>,
    pub map: MCMap,
    /// `x∂_{2,0}` and `x∂_{2,1}`, now equal.
    pub collapsed: (CubeRef, CubeRef),
}

impl Quotient {
    /// Cells of `X` grouped by their image, for the groups with more than one member.
    pub fn identified(&self) -> Vec<Vec<CellId>> {
        let mut groups: BTreeMap<&CubeRef, Vec<CellId>> = BTreeMap::new();
        for (c, r) in self.map.assign.iter().enumerate() {
            groups.entry(r).or_default().push(c);
        }
        groups.into_values().filter(|g| g.len() > 1).collect()
    }
}

/// `□^1 ⊗ □̃^1 → □^1 ⊗ □^0`, collapsing the marked direction.
pub fn collapse_projection(flavor: Flavor) -> Result<(Tensor, MCMap)> {
    let id = Map::identity(&standard_cube(1, flavor));
    let bang = terminal_map(&marked_cube(1, flavor)?);
    let (dom, _, pi) = tensor_maps(&id, &bang)?;
    Ok((dom, pi))
}

/// The pushout of `x` along the collapse, checked to identify exactly what it should.
pub fn not_surj_quotient(x: &MCMap) -> Result<Quotient> {
    let host = &x.codomain;
    let (dom, pi) = collapse_projection(host.shape)?;
    if *x.domain != *dom.object {
        bail!(Precondition, "the map does not start at □^1 ⊗ □̃^1");
    }
    if !x.is_mono() {
        bail!(Precondition, "the square must be embedded");
    }
    let po = pushout(x, &pi)?;
    let q = po.in_x;
    let top = dom.object.len() - 1;
    let square = dom.object.id_ref(top);
    let face = |k: usize, e| {
        let slot = 2 * (k - 1) + e;
        x.apply(&dom.object.face(&square, slot))
    };
    let collapsed = (face(2, 0), face(2, 1));
    if q.apply(&collapsed.0) != q.apply(&collapsed.1) {
        bail!(Invalid, "x∂(2,0) and x∂(2,1) were not identified");
    }
    let image: Vec<CellId> = x.image_cells();
    let object = po.object.clone();
    let mut seen: BTreeMap<CubeRef, CellId> = BTreeMap::new();
    for c in 0..host.len() {
        let r = &q.assign[c];
        if !image.contains(&c) {
            if r.epi != NormalForm::identity(host.dim(c)) {
                bail!(Invalid, "cell {c} outside the square became degenerate");
            }
            if object.cell(r.base).marked != host.cell(c).marked {
                bail!(Invalid, "cell {c} outside the square changed its marking");
            }
        }
        if let Some(&d) = seen.get(r) {
            if !image.contains(&c) || !image.contains(&d) {
                bail!(Invalid, "cells {d} and {c} were identified outside the square");
            }
        } else {
            seen.insert(r.clone(), c);
        }
    }
    Ok(Quotient { object, map: q, collapsed })
}
