//! Finite marked presheaves in Eilenberg–Zilber form.
//!
//! A complex stores only its non-degenerate cells. Every face of a cell is a
//! [`Ref`] `(epi, base)` meaning `base · epi`; acting by an arbitrary operator
//! normalizes through the stored faces. The same machinery serves cubical sets
//! (shape [`Flavor`]) and simplicial sets (shape [`Simplicial`]).

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use crate::error::{bail, Error, Result};
use crate::opcalc::{self, Flavor, NormalForm};
use crate::simplex::SimplexOp;

pub mod catalog;
pub mod colimit;
pub mod random;
pub mod search;
pub mod tensor;

pub use catalog::Cube;
pub use colimit::{pushout, pushout_product, Pushout};
pub use search::{enumerate_maps, find_isomorphism, is_isomorphic, CubeIndex, MapSearch};
pub use tensor::{tensor, tensor_maps};

/// The indexing category of a presheaf, with its operator calculus.
pub trait Shape: Clone + PartialEq + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    type Op: Clone + Eq + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync;

    fn identity(n: usize) -> Self::Op;
    fn source(op: &Self::Op) -> usize;
    fn target(op: &Self::Op) -> usize;
    /// `g ∘ f`.
    fn compose(g: &Self::Op, f: &Self::Op) -> Self::Op;
    /// `(epi, mono)` with `mono ∘ epi = op`.
    fn epi_mono(op: &Self::Op) -> (Self::Op, Self::Op);
    fn is_identity(op: &Self::Op) -> bool;
    fn is_epi(op: &Self::Op) -> bool;
    /// `mono = face(slot) ∘ rest`.
    fn split_first_face(mono: &Self::Op) -> Option<(usize, Self::Op)>;
    fn face_count(n: usize) -> usize;
    /// The `slot`-th face map into dimension `n`.
    fn face_op(n: usize, slot: usize) -> Self::Op;
    fn face_label(n: usize, slot: usize) -> String;

    fn admits(&self, op: &Self::Op) -> bool;
    fn epis(&self, n: usize, m: usize) -> Vec<Self::Op>;
    /// Elementary epis `[n+1] → [n]`, each paired with a section.
    fn epi_generators(&self, n: usize) -> Vec<(Self::Op, Self::Op)>;
}

impl Shape for Flavor {
    type Op = NormalForm;

    fn identity(n: usize) -> NormalForm {
        NormalForm::identity(n)
    }
    fn source(op: &NormalForm) -> usize {
        op.source()
    }
    fn target(op: &NormalForm) -> usize {
        op.target()
    }
    fn compose(g: &NormalForm, f: &NormalForm) -> NormalForm {
        g.after(f)
    }
    fn epi_mono(op: &NormalForm) -> (NormalForm, NormalForm) {
        op.epi_mono()
    }
    fn is_identity(op: &NormalForm) -> bool {
        op.is_identity()
    }
    fn is_epi(op: &NormalForm) -> bool {
        op.is_epi()
    }
    fn split_first_face(mono: &NormalForm) -> Option<(usize, NormalForm)> {
        mono.split_first_face().map(|((i, e), rest)| (2 * (i - 1) + e as usize, rest))
    }
    fn face_count(n: usize) -> usize {
        2 * n
    }
    fn face_op(n: usize, slot: usize) -> NormalForm {
        NormalForm::face(n, slot / 2 + 1, (slot % 2) as u8)
    }
    fn face_label(_n: usize, slot: usize) -> String {
        format!("({},{})", slot / 2 + 1, slot % 2)
    }
    fn admits(&self, op: &NormalForm) -> bool {
        self.includes(op.flavor())
    }
    fn epis(&self, n: usize, m: usize) -> Vec<NormalForm> {
        opcalc::epis(n, m, *self)
    }
    fn epi_generators(&self, n: usize) -> Vec<(NormalForm, NormalForm)> {
        opcalc::epi_generators(n, *self)
    }
}

/// The simplex category.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Simplicial;

impl fmt::Display for Simplicial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "simplicial")
    }
}

impl Shape for Simplicial {
    type Op = SimplexOp;

    fn identity(n: usize) -> SimplexOp {
        SimplexOp::identity(n)
    }
    fn source(op: &SimplexOp) -> usize {
        op.source()
    }
    fn target(op: &SimplexOp) -> usize {
        op.target()
    }
    fn compose(g: &SimplexOp, f: &SimplexOp) -> SimplexOp {
        g.after(f)
    }
    fn epi_mono(op: &SimplexOp) -> (SimplexOp, SimplexOp) {
        op.epi_mono()
    }
    fn is_identity(op: &SimplexOp) -> bool {
        op.is_identity()
    }
    fn is_epi(op: &SimplexOp) -> bool {
        op.is_epi()
    }
    fn split_first_face(mono: &SimplexOp) -> Option<(usize, SimplexOp)> {
        mono.split_first_face()
    }
    fn face_count(n: usize) -> usize {
        if n == 0 {
            0
        } else {
            n + 1
        }
    }
    fn face_op(n: usize, slot: usize) -> SimplexOp {
        SimplexOp::face(n, slot)
    }
    fn face_label(_n: usize, slot: usize) -> String {
        format!("({slot})")
    }
    fn admits(&self, _op: &SimplexOp) -> bool {
        true
    }
    fn epis(&self, n: usize, m: usize) -> Vec<SimplexOp> {
        SimplexOp::epis(n, m)
    }
    fn epi_generators(&self, n: usize) -> Vec<(SimplexOp, SimplexOp)> {
        (0..=n).map(|i| (SimplexOp::degen(n, i), SimplexOp::face(n + 1, i))).collect()
    }
}

/// Which cubes may carry markings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub enum Regime {
    #[default]
    Full,
    Edge,
    Unmarked,
}

impl Regime {
    pub fn allows(self, dim: usize) -> bool {
        match self {
            Regime::Full => dim >= 1,
            Regime::Edge => dim == 1,
            Regime::Unmarked => false,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Full => write!(f, "full"),
            Regime::Edge => write!(f, "edge"),
            Regime::Unmarked => write!(f, "unmarked"),
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Regime> {
        match s {
            "full" => Ok(Regime::Full),
            "edge" => Ok(Regime::Edge),
            "unmarked" => Ok(Regime::Unmarked),
            _ => bail!(Precondition, "unknown regime {s:?}"),
        }
    }
}

pub type CellId = usize;

/// `base · epi`: a possibly degenerate cube.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Ref<O> {
    pub epi: O,
    pub base: CellId,
}

pub type CubeRef = Ref<NormalForm>;
pub type SimplexRef = Ref<SimplexOp>;

impl<O: fmt::Display> fmt::Display for Ref<O> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}·[{}]", self.base, self.epi)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cell<O> {
    pub dim: usize,
    pub faces: Vec<Ref<O>>,
    pub marked: bool,
}

/// A finite marked presheaf. Cells are stored so that faces refer to earlier cells.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Complex<S: Shape> {
    pub shape: S,
    pub regime: Regime,
    cells: Vec<Cell<S::Op>>,
}

pub type MCSet = Complex<Flavor>;
pub type MSSet = Complex<Simplicial>;

impl<S: Shape> Complex<S> {
    pub fn new(shape: S, regime: Regime) -> Complex<S> {
        Complex { shape, regime, cells: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell<S::Op>] {
        &self.cells
    }

    pub fn cell(&self, id: CellId) -> &Cell<S::Op> {
        &self.cells[id]
    }

    pub fn dim(&self, id: CellId) -> usize {
        self.cells[id].dim
    }

    /// `-1` is represented as `None`.
    pub fn max_dim(&self) -> Option<usize> {
        self.cells.iter().map(|c| c.dim).max()
    }

    pub fn cells_of_dim(&self, d: usize) -> Vec<CellId> {
        (0..self.len()).filter(|&c| self.cells[c].dim == d).collect()
    }

    /// Non-degenerate cell counts per dimension.
    pub fn counts(&self) -> Vec<usize> {
        let top = self.max_dim().map(|d| d + 1).unwrap_or(0);
        let mut out = vec![0; top];
        for c in &self.cells {
            out[c.dim] += 1;
        }
        out
    }

    pub fn marked_counts(&self) -> Vec<usize> {
        let top = self.max_dim().map(|d| d + 1).unwrap_or(0);
        let mut out = vec![0; top];
        for c in &self.cells {
            if c.marked {
                out[c.dim] += 1;
            }
        }
        out
    }

    pub fn id_ref(&self, c: CellId) -> Ref<S::Op> {
        Ref { epi: S::identity(self.cells[c].dim), base: c }
    }

    pub fn ref_dim(&self, r: &Ref<S::Op>) -> usize {
        S::source(&r.epi)
    }

    /// Adds a cell; faces must refer to existing cells with matching dimensions.
    pub fn add_cell(&mut self, dim: usize, faces: Vec<Ref<S::Op>>, marked: bool) -> Result<CellId> {
        if faces.len() != S::face_count(dim) {
            bail!(Invalid, "a {dim}-cell needs {} faces, got {}", S::face_count(dim), faces.len());
        }
        for (slot, f) in faces.iter().enumerate() {
            if f.base >= self.cells.len() {
                bail!(Invalid, "face {} refers to missing cell {}", S::face_label(dim, slot), f.base);
            }
            if !S::is_epi(&f.epi)
                || S::source(&f.epi) + 1 != dim
                || S::target(&f.epi) != self.cells[f.base].dim
            {
                bail!(Invalid, "face {} = {f} is not an epi onto a cell of the right dimension", S::face_label(dim, slot));
            }
            if !self.shape.admits(&f.epi) {
                bail!(Flavor, "face {} = {f} lies outside {}", S::face_label(dim, slot), self.shape);
            }
        }
        self.cells.push(Cell { dim, faces, marked });
        Ok(self.cells.len() - 1)
    }

    /// Adds a cell without checks; used by constructions that are valid by design.
    pub(crate) fn push_cell(&mut self, cell: Cell<S::Op>) -> CellId {
        self.cells.push(cell);
        self.cells.len() - 1
    }

    pub fn set_marked(&mut self, c: CellId, marked: bool) {
        self.cells[c].marked = marked;
    }

    /// Overwrites a stored face; only used to build negative test fixtures.
    pub fn set_face_unchecked(&mut self, c: CellId, slot: usize, r: Ref<S::Op>) {
        self.cells[c].faces[slot] = r;
    }

    /// Degenerate cubes count as marked.
    pub fn is_marked(&self, r: &Ref<S::Op>) -> bool {
        !S::is_identity(&r.epi) || self.cells[r.base].marked
    }

    /// `base · φ` for an arbitrary operator `φ` into the base's dimension.
    pub fn act_cell(&self, base: CellId, phi: &S::Op) -> Ref<S::Op> {
        let (epi, mono) = S::epi_mono(phi);
        match S::split_first_face(&mono) {
            None => Ref { epi, base },
            Some((slot, rest)) => {
                let f = &self.cells[base].faces[slot];
                let next = S::compose(&f.epi, &S::compose(&rest, &epi));
                self.act_cell(f.base, &next)
            }
        }
    }

    /// Right action `r · φ`.
    pub fn act(&self, r: &Ref<S::Op>, phi: &S::Op) -> Result<Ref<S::Op>> {
        if S::target(phi) != S::source(&r.epi) {
            bail!(Dimension, "operator {phi} does not act on a {}-cube", S::source(&r.epi));
        }
        if !self.shape.admits(phi) {
            bail!(Flavor, "operator {phi} lies outside {}", self.shape);
        }
        Ok(self.act_cell(r.base, &S::compose(&r.epi, phi)))
    }

    pub fn face(&self, r: &Ref<S::Op>, slot: usize) -> Ref<S::Op> {
        let n = S::source(&r.epi);
        self.act_cell(r.base, &S::compose(&r.epi, &S::face_op(n, slot)))
    }

    pub fn check_ref(&self, r: &Ref<S::Op>) -> Result<()> {
        if r.base >= self.len() {
            bail!(Invalid, "reference to missing cell {}", r.base);
        }
        if !S::is_epi(&r.epi) || S::target(&r.epi) != self.cells[r.base].dim || !self.shape.admits(&r.epi) {
            bail!(Invalid, "{r} is not a valid cube reference");
        }
        Ok(())
    }

    /// Located list of violated invariants; empty iff valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (id, cell) in self.cells.iter().enumerate() {
            if cell.faces.len() != S::face_count(cell.dim) {
                out.push(format!("cell {id}: wrong number of faces"));
                continue;
            }
            for (slot, f) in cell.faces.iter().enumerate() {
                let lbl = S::face_label(cell.dim, slot);
                if f.base >= id {
                    out.push(format!("cell {id} face {lbl}: refers to a later cell {}", f.base));
                } else if !S::is_epi(&f.epi)
                    || S::source(&f.epi) + 1 != cell.dim
                    || S::target(&f.epi) != self.cells[f.base].dim
                {
                    out.push(format!("cell {id} face {lbl}: {f} is not a face-shaped reference"));
                } else if !self.shape.admits(&f.epi) {
                    out.push(format!("cell {id} face {lbl}: {f} outside {}", self.shape));
                }
            }
            if cell.marked && !self.regime.allows(cell.dim) {
                out.push(format!("cell {id}: marking in dimension {} not allowed in {} regime", cell.dim, self.regime));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (id, cell) in self.cells.iter().enumerate() {
            let n = cell.dim;
            if n < 2 {
                continue;
            }
            for k1 in 0..S::face_count(n) {
                let f1 = &cell.faces[k1];
                for k2 in 0..S::face_count(n - 1) {
                    let lhs = self.face(f1, k2);
                    let op = S::compose(&S::face_op(n, k1), &S::face_op(n - 1, k2));
                    let rhs = self.act_cell(id, &op);
                    if lhs != rhs {
                        out.push(format!(
                            "cell {id}: face {} of face {} is {lhs}, expected {rhs}",
                            S::face_label(n - 1, k2),
                            S::face_label(n, k1)
                        ));
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn empty_like(&self) -> Complex<S> {
        Complex::new(self.shape.clone(), self.regime)
    }

    /// Same cells and faces, different marking.
    pub fn with_markings(&self, regime: Regime, mark: impl Fn(CellId, &Cell<S::Op>) -> bool) -> Complex<S> {
        let mut out = self.clone();
        out.regime = regime;
        for id in 0..out.len() {
            let m = mark(id, &self.cells[id]) && regime.allows(self.cells[id].dim);
            out.cells[id].marked = m;
        }
        out
    }

    /// Re-tags the shape (e.g. when freely adding connections); faces are unchanged.
    pub fn with_shape(&self, shape: S) -> Result<Complex<S>> {
        let out = Complex { shape, regime: self.regime, cells: self.cells.clone() };
        for (id, c) in out.cells.iter().enumerate() {
            for f in &c.faces {
                if !out.shape.admits(&f.epi) {
                    bail!(Flavor, "cell {id} has face {f} outside {}", out.shape);
                }
            }
        }
        Ok(out)
    }

    /// The subcomplex generated by `cells`, with its inclusion. Markings are inherited.
    pub fn subcomplex(self: &Arc<Self>, cells: &[CellId]) -> (Arc<Complex<S>>, Map<S>) {
        let mut keep = vec![false; self.len()];
        let mut stack: Vec<CellId> = cells.to_vec();
        while let Some(c) = stack.pop() {
            if keep[c] {
                continue;
            }
            keep[c] = true;
            for f in &self.cells[c].faces {
                stack.push(f.base);
            }
        }
        let mut sub = self.empty_like();
        let mut renum = vec![usize::MAX; self.len()];
        let mut assign = Vec::new();
        for c in 0..self.len() {
            if !keep[c] {
                continue;
            }
            let cell = &self.cells[c];
            let faces = cell
                .faces
                .iter()
                .map(|f| Ref { epi: f.epi.clone(), base: renum[f.base] })
                .collect();
            renum[c] = sub.push_cell(Cell { dim: cell.dim, faces, marked: cell.marked });
            assign.push(self.id_ref(c));
        }
        let sub = Arc::new(sub);
        let inc = Map { domain: sub.clone(), codomain: self.clone(), assign };
        (sub, inc)
    }

    /// `sk_n`; `n = None` is the empty skeleton.
    pub fn skeleton(self: &Arc<Self>, n: Option<usize>) -> (Arc<Complex<S>>, Map<S>) {
        let cells: Vec<CellId> = (0..self.len())
            .filter(|&c| n.map_or(false, |n| self.cells[c].dim <= n))
            .collect();
        self.subcomplex(&cells)
    }

    /// Disjoint union; the second summand's cells are shifted by `self.len()`.
    pub fn disjoint_union(&self, other: &Complex<S>) -> Result<Complex<S>> {
        if self.shape != other.shape || self.regime != other.regime {
            bail!(Precondition, "disjoint union of complexes of different kinds");
        }
        let mut out = self.clone();
        let shift = self.len();
        for c in &other.cells {
            let faces = c.faces.iter().map(|f| Ref { epi: f.epi.clone(), base: f.base + shift }).collect();
            out.cells.push(Cell { dim: c.dim, faces, marked: c.marked });
        }
        Ok(out)
    }
}

/// A structure- and marking-preserving map, stored on non-degenerate cells.
#[derive(Clone, Debug)]
pub struct Map<S: Shape> {
    pub domain: Arc<Complex<S>>,
    pub codomain: Arc<Complex<S>>,
    pub assign: Vec<Ref<S::Op>>,
}

pub type MCMap = Map<Flavor>;
pub type MSMap = Map<Simplicial>;

impl<S: Shape> PartialEq for Map<S> {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.codomain == other.codomain && self.assign == other.assign
    }
}

impl<S: Shape> Map<S> {
    pub fn new(domain: Arc<Complex<S>>, codomain: Arc<Complex<S>>, assign: Vec<Ref<S::Op>>) -> Result<Map<S>> {
        let m = Map { domain, codomain, assign };
        let diags = m.validate();
        if !diags.is_empty() {
            bail!(Invalid, "{}", diags.join("; "));
        }
        Ok(m)
    }

    pub fn identity(x: &Arc<Complex<S>>) -> Map<S> {
        let assign = (0..x.len()).map(|c| x.id_ref(c)).collect();
        Map { domain: x.clone(), codomain: x.clone(), assign }
    }

    /// The map out of the empty complex.
    pub fn from_empty(x: &Arc<Complex<S>>) -> Map<S> {
        Map { domain: Arc::new(x.empty_like()), codomain: x.clone(), assign: vec![] }
    }

    pub fn apply(&self, r: &Ref<S::Op>) -> Ref<S::Op> {
        let img = &self.assign[r.base];
        self.codomain.act_cell(img.base, &S::compose(&img.epi, &r.epi))
    }

    pub fn at(&self, c: CellId) -> &Ref<S::Op> {
        &self.assign[c]
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Map<S>) -> Result<Map<S>> {
        if *self.codomain != *g.domain {
            bail!(Precondition, "maps are not composable");
        }
        let assign = self.assign.iter().map(|r| g.apply(r)).collect();
        Ok(Map { domain: self.domain.clone(), codomain: g.codomain.clone(), assign })
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.domain.shape != self.codomain.shape {
            out.push(format!("shape mismatch {} vs {}", self.domain.shape, self.codomain.shape));
            return out;
        }
        if self.assign.len() != self.domain.len() {
            out.push(format!("assignment covers {} of {} cells", self.assign.len(), self.domain.len()));
            return out;
        }
        for (c, r) in self.assign.iter().enumerate() {
            if let Err(e) = self.codomain.check_ref(r) {
                out.push(format!("cell {c}: {e}"));
            } else if self.codomain.ref_dim(r) != self.domain.dim(c) {
                out.push(format!("cell {c}: image {r} has the wrong dimension"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (c, cell) in self.domain.cells.iter().enumerate() {
            for (slot, f) in cell.faces.iter().enumerate() {
                let lhs = self.codomain.face(&self.assign[c], slot);
                let rhs = self.apply(f);
                if lhs != rhs {
                    out.push(format!(
                        "cell {c} face {}: image face {lhs} ≠ image of face {rhs}",
                        S::face_label(cell.dim, slot)
                    ));
                }
            }
            if cell.marked && !self.codomain.is_marked(&self.assign[c]) {
                out.push(format!("cell {c}: marked but sent to unmarked {}", self.assign[c]));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Injective on cubes: non-degenerate cells go injectively to non-degenerate cells.
    pub fn is_mono(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.assign.iter().all(|r| S::is_identity(&r.epi) && seen.insert(r.base))
    }

    /// Creates markings: a domain cell is marked iff its image is.
    pub fn is_regular(&self) -> bool {
        self.assign
            .iter()
            .enumerate()
            .all(|(c, r)| self.domain.cells[c].marked == self.codomain.is_marked(r))
    }

    /// Underlying map is an isomorphism.
    pub fn is_entire(&self) -> bool {
        self.is_mono() && self.assign.len() == self.codomain.len()
    }

    /// Cells of the codomain hit by non-degenerate images.
    pub fn image_cells(&self) -> Vec<CellId> {
        let mut v: Vec<CellId> = self.assign.iter().map(|r| r.base).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Inverse of a mono on its image, as a lookup.
    pub fn preimages(&self) -> BTreeMap<CellId, CellId> {
        self.assign
            .iter()
            .enumerate()
            .filter(|(_, r)| S::is_identity(&r.epi))
            .map(|(c, r)| (r.base, c))
            .collect()
    }
}
