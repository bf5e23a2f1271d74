//! Pushouts of finite presheaves and pushout products.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{bail, Result};

use super::search::CubeIndex;
use super::tensor::{tensor, tensor_maps_into};
use super::{Cell, CellId, Complex, Map, MCMap, Ref, Shape};

/// Which leg a cell of the pushout comes from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    X,
    B,
}

/// The pushout of `X ← A → B`, with both coprojections.
#[derive(Clone, Debug)]
pub struct Pushout<S: Shape> {
    pub object: Arc<Complex<S>>,
    pub in_x: Map<S>,
    pub in_b: Map<S>,
    /// For each cell of the pushout, a leg cell mapping onto it identically.
    pub origin: Vec<(Side, CellId)>,
}

impl<S: Shape> Pushout<S> {
    /// The map out of the pushout induced by a cocone `hx: X → Z`, `hb: B → Z`.
    pub fn induced(&self, hx: &Map<S>, hb: &Map<S>) -> Result<Map<S>> {
        if *hx.codomain != *hb.codomain {
            bail!(Precondition, "cocone legs have different codomains");
        }
        let assign = self
            .origin
            .iter()
            .map(|&(side, c)| match side {
                Side::X => hx.assign[c].clone(),
                Side::B => hb.assign[c].clone(),
            })
            .collect();
        Ok(Map { domain: self.object.clone(), codomain: hx.codomain.clone(), assign })
    }
}

/// Pushout of `f: A → X` and `g: A → B`.
pub fn pushout<S: Shape>(f: &Map<S>, g: &Map<S>) -> Result<Pushout<S>> {
    check_span(f, g)?;
    if g.is_mono() {
        Ok(attach(f, g))
    } else if f.is_mono() {
        let p = attach(g, f);
        let origin = p
            .origin
            .iter()
            .map(|&(s, c)| (if s == Side::X { Side::B } else { Side::X }, c))
            .collect();
        Ok(Pushout { object: p.object, in_x: p.in_b, in_b: p.in_x, origin })
    } else {
        pushout_general(f, g)
    }
}

fn check_span<S: Shape>(f: &Map<S>, g: &Map<S>) -> Result<()> {
    if *f.domain != *g.domain {
        bail!(Precondition, "pushout legs have different domains");
    }
    if f.codomain.shape != g.codomain.shape || f.codomain.regime != g.codomain.regime {
        bail!(Flavor, "pushout legs land in complexes of different kinds");
    }
    Ok(())
}

/// Attaching `B` to `X` along the mono `g`: the new cells are those of `B` outside `g(A)`.
fn attach<S: Shape>(f: &Map<S>, g: &Map<S>) -> Pushout<S> {
    let x = &f.codomain;
    let b = &g.codomain;
    let mut p: Complex<S> = (**x).clone();
    let pre = g.preimages();
    let mut hb: Vec<Ref<S::Op>> = Vec::with_capacity(b.len());
    let mut origin: Vec<(Side, CellId)> = (0..x.len()).map(|c| (Side::X, c)).collect();
    for c in 0..b.len() {
        if let Some(&a) = pre.get(&c) {
            hb.push(f.assign[a].clone());
            continue;
        }
        let cell = b.cell(c);
        let faces = cell
            .faces
            .iter()
            .map(|fr| {
                let img = &hb[fr.base];
                p.act_cell(img.base, &S::compose(&img.epi, &fr.epi))
            })
            .collect();
        let id = p.push_cell(Cell { dim: cell.dim, faces, marked: cell.marked && p.regime.allows(cell.dim) });
        origin.push((Side::B, c));
        hb.push(p.id_ref(id));
    }
    for (a, r) in g.assign.iter().enumerate() {
        let fa = &f.assign[a];
        if b.cell(r.base).marked && S::is_identity(&fa.epi) {
            p.set_marked(fa.base, true);
        }
    }
    let p = Arc::new(p);
    let in_x = Map { domain: x.clone(), codomain: p.clone(), assign: (0..x.len()).map(|c| x.id_ref(c)).collect() };
    let in_b = Map { domain: b.clone(), codomain: p.clone(), assign: hb };
    Pushout { object: p, in_x, in_b, origin }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, mut k: usize) -> usize {
        while self.parent[k] != k {
            self.parent[k] = self.parent[self.parent[k]];
            k = self.parent[k];
        }
        k
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Pushout by congruence closure over all cubes of `X ⊔ B` up to the top dimension.
pub fn pushout_general<S: Shape>(f: &Map<S>, g: &Map<S>) -> Result<Pushout<S>> {
    check_span(f, g)?;
    let x = &f.codomain;
    let b = &g.codomain;
    let shift = x.len();
    let u = x.disjoint_union(b)?;
    let top = [x.max_dim(), b.max_dim(), f.domain.max_dim()].into_iter().flatten().max().unwrap_or(0);
    let idx = CubeIndex::new(&u, top);
    let mut uf = UnionFind { parent: (0..idx.len()).collect() };
    let mut work: Vec<(usize, usize)> = Vec::new();
    for a in 0..f.domain.len() {
        let rx = &f.assign[a];
        let rb = &g.assign[a];
        let kx = idx.by_ref[rx];
        let kb = idx.by_ref[&Ref { epi: rb.epi.clone(), base: rb.base + shift }];
        if uf.union(kx, kb) {
            work.push((kx, kb));
        }
    }
    let mut gens: HashMap<usize, Vec<S::Op>> = HashMap::new();
    while let Some((k1, k2)) = work.pop() {
        let d = idx.dims[k1];
        for slot in 0..S::face_count(d) {
            let (a, c) = (idx.faces[k1][slot], idx.faces[k2][slot]);
            if uf.union(a, c) {
                work.push((a, c));
            }
        }
        if d < top {
            let gs = gens
                .entry(d)
                .or_insert_with(|| u.shape.epi_generators(d).into_iter().map(|(e, _)| e).collect())
                .clone();
            for e in gs {
                let r1 = u.act_cell(idx.refs[k1].base, &S::compose(&idx.refs[k1].epi, &e));
                let r2 = u.act_cell(idx.refs[k2].base, &S::compose(&idx.refs[k2].epi, &e));
                let (a, c) = (idx.by_ref[&r1], idx.by_ref[&r2]);
                if uf.union(a, c) {
                    work.push((a, c));
                }
            }
        }
    }

    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    for k in 0..idx.len() {
        let r = uf.find(k);
        members.entry(r).or_default().push(k);
    }
    let mut p: Complex<S> = u.empty_like();
    let mut origin = Vec::new();
    let mut class_ref: HashMap<usize, Ref<S::Op>> = HashMap::new();
    for d in 0..=top {
        for &k in &idx.by_dim[d] {
            let root = uf.find(k);
            if class_ref.contains_key(&root) {
                continue;
            }
            let ms = &members[&root];
            if let Some(&m) = ms.iter().find(|&&m| !S::is_identity(&idx.refs[m].epi)) {
                let r = &idx.refs[m];
                let base_root = uf.find(idx.by_ref[&u.id_ref(r.base)]);
                let br = class_ref[&base_root].clone();
                let img = p.act_cell(br.base, &S::compose(&br.epi, &r.epi));
                class_ref.insert(root, img);
            } else {
                let m = ms[0];
                let faces = (0..S::face_count(d))
                    .map(|slot| class_ref[&uf.find(idx.faces[m][slot])].clone())
                    .collect();
                let marked = ms.iter().any(|&m| idx.marked[m]) && u.regime.allows(d);
                let id = p.push_cell(Cell { dim: d, faces, marked });
                let c = idx.refs[m].base;
                origin.push(if c < shift { (Side::X, c) } else { (Side::B, c - shift) });
                class_ref.insert(root, p.id_ref(id));
            }
        }
    }
    let p = Arc::new(p);
    let mut leg = |cells: std::ops::Range<usize>, dom: &Arc<Complex<S>>| {
        let assign = cells.map(|c| class_ref[&uf.find(idx.by_ref[&u.id_ref(c)])].clone()).collect();
        Map { domain: dom.clone(), codomain: p.clone(), assign }
    };
    let in_x = leg(0..shift, x);
    let in_b = leg(shift..u.len(), b);
    Ok(Pushout { object: p, in_x, in_b, origin })
}

/// `f ⊗̂ g`: the induced map `X⊗B ⊔_{A⊗B} A⊗Y → X⊗Y` for monos `f: A → X`, `g: B → Y`.
pub fn pushout_product(f: &MCMap, g: &MCMap) -> Result<MCMap> {
    if !f.is_mono() || !g.is_mono() {
        bail!(Precondition, "pushout product needs monomorphisms");
    }
    let id_a = Map::identity(&f.domain);
    let id_b = Map::identity(&g.domain);
    let id_x = Map::identity(&f.codomain);
    let id_y = Map::identity(&g.codomain);
    let ab = tensor(&f.domain, &g.domain)?;
    let xb = tensor(&f.codomain, &g.domain)?;
    let ay = tensor(&f.domain, &g.codomain)?;
    let xy = tensor(&f.codomain, &g.codomain)?;
    let f_b = tensor_maps_into(f, &id_b, &ab, &xb);
    let a_g = tensor_maps_into(&id_a, g, &ab, &ay);
    let po = pushout(&f_b, &a_g)?;
    let x_g = tensor_maps_into(&id_x, g, &xb, &xy);
    let f_y = tensor_maps_into(f, &id_y, &ay, &xy);
    po.induced(&x_g, &f_y)
}
