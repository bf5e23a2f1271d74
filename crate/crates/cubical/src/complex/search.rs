//! Exhaustive hom-set search at desk scale.

use std::collections::HashMap;
use std::sync::Arc;

use super::{CellId, Complex, Map, Ref, Shape};

/// Every cube (degenerate ones included) of a complex up to a dimension cap,
/// indexed, with face lookups.
#[derive(Clone, Debug)]
pub struct CubeIndex<S: Shape> {
    pub cap: usize,
    pub refs: Vec<Ref<S::Op>>,
    pub dims: Vec<usize>,
    pub marked: Vec<bool>,
    pub faces: Vec<Vec<usize>>,
    pub by_ref: HashMap<Ref<S::Op>, usize>,
    pub by_dim: Vec<Vec<usize>>,
    by_faces: HashMap<Vec<usize>, Vec<usize>>,
}

impl<S: Shape> CubeIndex<S> {
    pub fn new(x: &Complex<S>, cap: usize) -> CubeIndex<S> {
        let mut entries: Vec<(usize, CellId, S::Op)> = Vec::new();
        for c in 0..x.len() {
            let d = x.dim(c);
            for m in d..=cap {
                for e in x.shape.epis(m, d) {
                    entries.push((m, c, e));
                }
            }
        }
        entries.sort();
        let mut idx = CubeIndex {
            cap,
            refs: Vec::with_capacity(entries.len()),
            dims: Vec::with_capacity(entries.len()),
            marked: Vec::with_capacity(entries.len()),
            faces: Vec::with_capacity(entries.len()),
            by_ref: HashMap::new(),
            by_dim: vec![Vec::new(); cap + 1],
            by_faces: HashMap::new(),
        };
        for (m, c, e) in entries {
            let r = Ref { epi: e, base: c };
            let k = idx.refs.len();
            idx.by_ref.insert(r.clone(), k);
            idx.marked.push(x.is_marked(&r));
            idx.refs.push(r);
            idx.dims.push(m);
            idx.by_dim[m].push(k);
        }
        for k in 0..idx.refs.len() {
            let m = idx.dims[k];
            let fs: Vec<usize> = (0..S::face_count(m))
                .map(|slot| idx.by_ref[&x.face(&idx.refs[k], slot)])
                .collect();
            if m > 0 {
                idx.by_faces.entry(fs.clone()).or_default().push(k);
            }
            idx.faces.push(fs);
        }
        idx
    }

    pub fn len(&self) -> usize {
        self.refs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.refs.is_empty()
    }

    pub fn lookup(&self, r: &Ref<S::Op>) -> Option<usize> {
        self.by_ref.get(r).copied()
    }

    /// Cubes of dimension `dim` with exactly these faces.
    pub fn with_faces(&self, dim: usize, faces: &[usize]) -> &[usize] {
        if dim == 0 {
            return &self.by_dim[0];
        }
        self.by_faces.get(faces).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

/// Marker for cells not yet assigned in a partial assignment.
pub const UNSET: usize = usize::MAX;

type Filter<'a, O> = dyn Fn(CellId, &Ref<O>, &[usize]) -> bool + 'a;

/// Backtracking enumeration of maps `src → tgt`.
///
/// Cells are visited in a face-first depth-first order from the top cells, so that
/// vertices are constrained by the edges between them as early as possible.
pub struct MapSearch<'a, S: Shape> {
    pub src: &'a Complex<S>,
    pub tgt: &'a Complex<S>,
    pub index: CubeIndex<S>,
    order: Vec<CellId>,
}

fn visit_order<S: Shape>(x: &Complex<S>) -> Vec<CellId> {
    let mut seen = vec![false; x.len()];
    let mut order = Vec::with_capacity(x.len());
    let mut tops: Vec<CellId> = (0..x.len()).collect();
    tops.sort_by_key(|&c| std::cmp::Reverse(x.dim(c)));
    fn go<S: Shape>(x: &Complex<S>, c: CellId, seen: &mut [bool], order: &mut Vec<CellId>) {
        if seen[c] {
            return;
        }
        seen[c] = true;
        for f in &x.cell(c).faces {
            go(x, f.base, seen, order);
        }
        order.push(c);
    }
    for c in tops {
        go(x, c, &mut seen, &mut order);
    }
    order
}

impl<'a, S: Shape> MapSearch<'a, S> {
    pub fn new(src: &'a Complex<S>, tgt: &'a Complex<S>) -> MapSearch<'a, S> {
        let cap = src.max_dim().unwrap_or(0);
        MapSearch::with_index(src, tgt, CubeIndex::new(tgt, cap))
    }

    pub fn with_index(src: &'a Complex<S>, tgt: &'a Complex<S>, index: CubeIndex<S>) -> MapSearch<'a, S> {
        MapSearch { src, tgt, index, order: visit_order(src) }
    }

    /// All marking-preserving assignments accepted by `filter`, as index vectors
    /// (canonical order). `filter(cell, candidate, partial)` sees the cells assigned so
    /// far; unassigned entries are [`UNSET`].
    pub fn run(&self, filter: &Filter<'_, S::Op>, limit: Option<usize>) -> Vec<Vec<usize>> {
        self.run_from(vec![UNSET; self.src.len()], filter, limit)
    }

    /// Like [`run`](Self::run), extending a partial assignment.
    pub fn run_from(&self, mut cur: Vec<usize>, filter: &Filter<'_, S::Op>, limit: Option<usize>) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.go(0, &mut cur, filter, limit, &mut out);
        out
    }

    fn image_of(&self, cur: &[usize], r: &Ref<S::Op>) -> usize {
        let img = &self.index.refs[cur[r.base]];
        let cube = self.tgt.act_cell(img.base, &S::compose(&img.epi, &r.epi));
        self.index.by_ref[&cube]
    }

    fn go(&self, pos: usize, cur: &mut Vec<usize>, filter: &Filter<'_, S::Op>, limit: Option<usize>, out: &mut Vec<Vec<usize>>) {
        if limit.is_some_and(|l| out.len() >= l) {
            return;
        }
        if pos == self.order.len() {
            out.push(cur.clone());
            return;
        }
        let s = self.order[pos];
        let cell = self.src.cell(s);
        if cell.dim > self.index.cap {
            return;
        }
        let faces: Vec<usize> = cell.faces.iter().map(|f| self.image_of(cur, f)).collect();
        let fixed = cur[s];
        let cands: Vec<usize> = if fixed != UNSET {
            vec![fixed]
        } else {
            self.index.with_faces(cell.dim, &faces).to_vec()
        };
        for k in cands {
            if self.index.dims[k] != cell.dim || (cell.dim > 0 && self.index.faces[k] != faces) {
                continue;
            }
            if cell.marked && !self.index.marked[k] {
                continue;
            }
            if !filter(s, &self.index.refs[k], cur) {
                continue;
            }
            cur[s] = k;
            self.go(pos + 1, cur, filter, limit, out);
            cur[s] = fixed;
            if limit.is_some_and(|l| out.len() >= l) {
                return;
            }
        }
    }

    pub fn to_map(&self, assignment: &[usize], src: &Arc<Complex<S>>, tgt: &Arc<Complex<S>>) -> Map<S> {
        Map {
            domain: src.clone(),
            codomain: tgt.clone(),
            assign: assignment.iter().map(|&k| self.index.refs[k].clone()).collect(),
        }
    }
}

fn injective_nondegenerate<S: Shape>(
    idx: &CubeIndex<S>,
    x: &Complex<S>,
    y: &Complex<S>,
    s: CellId,
    r: &Ref<S::Op>,
    partial: &[usize],
) -> bool {
    S::is_identity(&r.epi)
        && x.cell(s).marked == y.cell(r.base).marked
        && partial.iter().all(|&k| k == UNSET || idx.refs[k].base != r.base)
}

/// All marking-preserving maps `s → x` in canonical order.
pub fn enumerate_maps<S: Shape>(s: &Arc<Complex<S>>, x: &Arc<Complex<S>>) -> Vec<Map<S>> {
    let search = MapSearch::new(s, x);
    search
        .run(&|_, _, _| true, None)
        .iter()
        .map(|a| search.to_map(a, s, x))
        .collect()
}

pub fn count_maps<S: Shape>(s: &Complex<S>, x: &Complex<S>) -> usize {
    MapSearch::new(s, x).run(&|_, _, _| true, None).len()
}

/// An isomorphism `x ≅ y` (relabeling of non-degenerate cells, markings included).
pub fn find_isomorphism<S: Shape>(x: &Arc<Complex<S>>, y: &Arc<Complex<S>>) -> Option<Map<S>> {
    if x.shape != y.shape || x.counts() != y.counts() || x.marked_counts() != y.marked_counts() {
        return None;
    }
    let search = MapSearch::new(x, y);
    let idx = &search.index;
    let filter = |s: CellId, r: &Ref<S::Op>, partial: &[usize]| injective_nondegenerate(idx, x, y, s, r, partial);
    let found = search.run(&filter, Some(1));
    found.first().map(|a| search.to_map(a, x, y))
}

pub fn is_isomorphic<S: Shape>(x: &Arc<Complex<S>>, y: &Arc<Complex<S>>) -> bool {
    find_isomorphism(x, y).is_some()
}

/// Whether two maps are isomorphic as arrows: isos on both ends commuting with them.
pub fn maps_isomorphic<S: Shape>(f: &Map<S>, g: &Map<S>) -> bool {
    if f.domain.counts() != g.domain.counts() || f.codomain.counts() != g.codomain.counts() {
        return false;
    }
    let (fc, gc, fd, gd) = (&f.codomain, &g.codomain, &f.domain, &g.domain);
    let search = MapSearch::new(fc, gc);
    let idx = &search.index;
    let filter = |s: CellId, r: &Ref<S::Op>, partial: &[usize]| injective_nondegenerate(idx, fc, gc, s, r, partial);
    let dsearch = MapSearch::new(fd, gd);
    let didx = &dsearch.index;
    for a in search.run(&filter, None) {
        let beta = search.to_map(&a, fc, gc);
        let dfilter = |s: CellId, r: &Ref<S::Op>, partial: &[usize]| {
            injective_nondegenerate(didx, fd, gd, s, r, partial) && g.apply(r) == beta.apply(&f.assign[s])
        };
        if !dsearch.run(&dfilter, Some(1)).is_empty() {
            return true;
        }
    }
    false
}
