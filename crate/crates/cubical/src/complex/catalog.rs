//! Standard complexes and generating maps.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{bail, Result};
use crate::opcalc::{self, Flavor, NormalForm, Sign};

use super::{Cell, CellId, Complex, CubeRef, MCMap, MCSet, Map, Ref, Regime};

/// The representable `□^n`, with its cells indexed by monos `[1]^m → [1]^n`.
#[derive(Clone, Debug)]
pub struct Cube {
    pub n: usize,
    pub complex: Arc<MCSet>,
    pub monos: Vec<NormalForm>,
    lookup: HashMap<NormalForm, CellId>,
}

impl Cube {
    pub fn standard(n: usize, flavor: Flavor) -> Cube {
        Cube::in_regime(n, flavor, Regime::Full)
    }

    pub fn in_regime(n: usize, flavor: Flavor, regime: Regime) -> Cube {
        let mut monos = Vec::new();
        for m in 0..=n {
            monos.extend(opcalc::monos(m, n));
        }
        let lookup: HashMap<NormalForm, CellId> = monos.iter().cloned().enumerate().map(|(k, d)| (d, k)).collect();
        let mut x = Complex::new(flavor, regime);
        for d in &monos {
            let m = d.source();
            let faces = (0..2 * m)
                .map(|slot| {
                    let fd = d.after(&NormalForm::face(m, slot / 2 + 1, (slot % 2) as Sign));
                    Ref { epi: NormalForm::identity(m - 1), base: lookup[&fd] }
                })
                .collect();
            x.push_cell(Cell { dim: m, faces, marked: false });
        }
        Cube { n, complex: Arc::new(x), monos, lookup }
    }

    pub fn top(&self) -> CellId {
        self.monos.len() - 1
    }

    pub fn cell_of(&self, mono: &NormalForm) -> CellId {
        self.lookup[mono]
    }

    /// The same cube with exactly the faces satisfying `mark` marked.
    pub fn marked_by(&self, regime: Regime, mark: impl Fn(&NormalForm) -> bool) -> Arc<MCSet> {
        Arc::new(self.complex.with_markings(regime, |c, _| mark(&self.monos[c])))
    }

    /// The map `□^n → X` classifying an `n`-cube `r` of `X`; `dom` must have this cube's cells.
    pub fn classify(&self, dom: &Arc<MCSet>, x: &Arc<MCSet>, r: &CubeRef) -> MCMap {
        let assign = self
            .monos
            .iter()
            .map(|d| x.act_cell(r.base, &r.epi.after(d)))
            .collect();
        Map { domain: dom.clone(), codomain: x.clone(), assign }
    }

    /// Label of a face as a string over `{0,1,*}`.
    pub fn label(&self, c: CellId) -> String {
        subcube_label(&self.monos[c], self.n)
    }
}

/// Coordinates fixed by a mono into `[1]^n`, as a string over `{0,1,*}`.
pub fn subcube_label(d: &NormalForm, n: usize) -> String {
    let lo = d.eval(0);
    let hi = d.eval((1u32 << d.source()) - 1);
    (0..n)
        .map(|k| match ((lo >> k) & 1, (hi >> k) & 1) {
            (0, 0) => '0',
            (1, 1) => '1',
            _ => '*',
        })
        .collect()
}

pub fn empty(flavor: Flavor, regime: Regime) -> Arc<MCSet> {
    Arc::new(Complex::new(flavor, regime))
}

pub fn point(flavor: Flavor, regime: Regime) -> Arc<MCSet> {
    Cube::in_regime(0, flavor, regime).complex
}

pub fn standard_cube(n: usize, flavor: Flavor) -> Arc<MCSet> {
    Cube::standard(n, flavor).complex
}

/// `□̃^n`: the top cube marked.
pub fn marked_cube(n: usize, flavor: Flavor) -> Result<Arc<MCSet>> {
    if n == 0 {
        bail!(Precondition, "the marked cube needs n ≥ 1");
    }
    let c = Cube::standard(n, flavor);
    Ok(c.marked_by(Regime::Full, |d| d.source() == n))
}

fn check_face(n: usize, i: usize, e: Sign) -> Result<()> {
    if n == 0 || i == 0 || i > n || e > 1 {
        bail!(Precondition, "face ({i},{e}) of an {n}-cube is out of range");
    }
    Ok(())
}

/// Regular inclusion of the subcomplex generated by the top cube's faces other than `skip`.
fn box_in(x: &Arc<MCSet>, c: &Cube, skip: Option<(usize, Sign)>) -> MCMap {
    let n = c.n;
    let mut gens = Vec::new();
    for i in 1..=n {
        for e in 0..2 {
            if skip != Some((i, e)) {
                gens.push(c.cell_of(&NormalForm::face(n, i, e)));
            }
        }
    }
    x.subcomplex(&gens).1
}

pub fn boundary_inclusion(n: usize, flavor: Flavor) -> MCMap {
    let c = Cube::standard(n, flavor);
    box_in(&c.complex, &c, None)
}

pub fn boundary(n: usize, flavor: Flavor) -> Arc<MCSet> {
    boundary_inclusion(n, flavor).domain
}

/// Unmarked open box `⊓^n_{i,ε} ↪ □^n`.
pub fn open_box_inclusion(n: usize, i: usize, e: Sign, flavor: Flavor) -> Result<MCMap> {
    check_face(n, i, e)?;
    let c = Cube::standard(n, flavor);
    Ok(box_in(&c.complex, &c, Some((i, e))))
}

/// `□^n_{i,ε}`: all critical faces with respect to `∂_{i,ε}` marked.
pub fn comical_cube(n: usize, i: usize, e: Sign, flavor: Flavor) -> Result<Arc<MCSet>> {
    check_face(n, i, e)?;
    let c = Cube::standard(n, flavor);
    Ok(c.marked_by(Regime::Full, |d| {
        d.source() >= 1 && opcalc::is_critical_face(d, n, i, e).expect("mono")
    }))
}

pub fn comical_open_box_inclusion(n: usize, i: usize, e: Sign, flavor: Flavor) -> Result<MCMap> {
    let x = comical_cube(n, i, e, flavor)?;
    let c = Cube::standard(n, flavor);
    Ok(box_in(&x, &c, Some((i, e))))
}

/// `(□^n_{i,ε})' → τ_{n-2} □^n_{i,ε}`, marking the remaining codimension-one face.
pub fn comical_marking_extension(n: usize, i: usize, e: Sign, flavor: Flavor) -> Result<MCMap> {
    check_face(n, i, e)?;
    if n < 2 {
        bail!(Precondition, "marking extensions need n ≥ 2");
    }
    let c = Cube::standard(n, flavor);
    let skip = NormalForm::face(n, i, e);
    let crit = |d: &NormalForm| d.source() >= 1 && opcalc::is_critical_face(d, n, i, e).expect("mono");
    let dom = c.marked_by(Regime::Full, |d| crit(d) || (d.source() == n - 1 && *d != skip));
    let cod = c.marked_by(Regime::Full, |d| crit(d) || d.source() + 1 >= n);
    Ok(entire(&dom, &cod))
}

/// Identity on underlying sets between two markings of the same complex.
pub fn entire(dom: &Arc<MCSet>, cod: &Arc<MCSet>) -> MCMap {
    let assign = (0..dom.len()).map(|c| dom.id_ref(c)).collect();
    Map { domain: dom.clone(), codomain: cod.clone(), assign }
}

/// The `n`-marker `□^n → □̃^n`.
pub fn marker(n: usize, flavor: Flavor) -> Result<MCMap> {
    let cod = marked_cube(n, flavor)?;
    Ok(entire(&standard_cube(n, flavor), &cod))
}

fn edge(x: &mut MCSet, from: CellId, to: CellId, marked: bool) -> CellId {
    x.add_cell(1, vec![x.id_ref(from), x.id_ref(to)], marked).expect("edge")
}

fn square(x: &mut MCSet, faces: [CubeRef; 4], marked: bool) -> CellId {
    x.add_cell(2, faces.to_vec(), marked).expect("square")
}

fn degenerate_edge(v: CellId) -> CubeRef {
    Ref { epi: NormalForm::degen(1, 1), base: v }
}

/// Two squares side by side, `a b c / d e f`, with the edges `a→d, b→c, c→f, d→e`
/// and both squares marked.
pub fn l_complex(flavor: Flavor) -> Arc<MCSet> {
    let mut x = Complex::new(flavor, Regime::Full);
    let [a, b, c, d, e, f] = [(); 6].map(|_| x.add_cell(0, vec![], false).unwrap());
    let ab = edge(&mut x, a, b, false);
    let bc = edge(&mut x, b, c, true);
    let de = edge(&mut x, d, e, true);
    let ef = edge(&mut x, e, f, false);
    let ad = edge(&mut x, a, d, true);
    let be = edge(&mut x, b, e, false);
    let cf = edge(&mut x, c, f, true);
    let r = |c: CellId| Ref { epi: NormalForm::identity(1), base: c };
    square(&mut x, [r(ad), r(be), r(ab), r(de)], true);
    square(&mut x, [r(be), r(cf), r(bc), r(ef)], true);
    Arc::new(x)
}

/// `L → τ_0 L`.
pub fn rezk_elementary(flavor: Flavor) -> MCMap {
    let l = l_complex(flavor);
    let cod = Arc::new(l.with_markings(Regime::Full, |_, c| c.dim >= 1));
    entire(&l, &cod)
}

/// `(∂□^m ↪ □^m) ⊗̂ (L → τ_0 L) ⊗̂ (∂□^n ↪ □^n)`.
pub fn rezk_map(m: usize, n: usize, flavor: Flavor) -> Result<MCMap> {
    let left = super::pushout_product(&boundary_inclusion(m, flavor), &rezk_elementary(flavor))?;
    super::pushout_product(&left, &boundary_inclusion(n, flavor))
}

/// `□^n` with the critical edge for `∂_{i,ε}` collapsed, built directly.
pub fn inner_cube(n: usize, i: usize, e: Sign, flavor: Flavor) -> Result<Arc<MCSet>> {
    Ok(inner_cube_with_map(n, i, e, flavor)?.1.codomain)
}

/// The inner cube together with the quotient map from `□^n` (unmarked regime).
pub fn inner_cube_with_map(n: usize, i: usize, e: Sign, flavor: Flavor) -> Result<(Cube, MCMap)> {
    check_face(n, i, e)?;
    if n < 2 {
        bail!(Precondition, "inner cubes need n ≥ 2");
    }
    let c = Cube::in_regime(n, flavor, Regime::Unmarked);
    let edge_cell = c.cell_of(&opcalc::critical_edge(n, i, e)?);
    let faces = &c.complex.cell(edge_cell).faces;
    let (u, v) = (faces[0].base, faces[1].base);
    let mut x = Complex::new(flavor, Regime::Unmarked);
    let mut img: Vec<CubeRef> = Vec::with_capacity(c.complex.len());
    for (id, cell) in c.complex.cells().iter().enumerate() {
        if id == v {
            img.push(img[u].clone());
            continue;
        }
        if id == edge_cell {
            img.push(Ref { epi: NormalForm::degen(1, 1), base: img[u].base });
            continue;
        }
        let fs = cell
            .faces
            .iter()
            .map(|f| {
                let t = &img[f.base];
                x.act_cell(t.base, &t.epi.after(&f.epi))
            })
            .collect();
        let nid = x.push_cell(Cell { dim: cell.dim, faces: fs, marked: false });
        img.push(x.id_ref(nid));
    }
    let x = Arc::new(x);
    let q = Map { domain: c.complex.clone(), codomain: x, assign: img };
    Ok((c, q))
}

pub fn inner_open_box_inclusion(n: usize, i: usize, e: Sign, flavor: Flavor) -> Result<MCMap> {
    let (c, q) = inner_cube_with_map(n, i, e, flavor)?;
    let mut gens = Vec::new();
    for k in 1..=n {
        for s in 0..2 {
            if (k, s) != (i, e) {
                gens.push(q.assign[c.cell_of(&NormalForm::face(n, k, s))].base);
            }
        }
    }
    Ok(q.codomain.subcomplex(&gens).1)
}

/// The invertible interval `K` (edge-marked regime, no markings).
pub fn k_interval(flavor: Flavor) -> Arc<MCSet> {
    let mut x = Complex::new(flavor, Regime::Edge);
    let v1 = x.add_cell(0, vec![], false).unwrap();
    let v2 = x.add_cell(0, vec![], false).unwrap();
    let f = edge(&mut x, v1, v2, false);
    let h = edge(&mut x, v2, v1, false);
    let g = edge(&mut x, v1, v2, false);
    let r = |c: CellId| Ref { epi: NormalForm::identity(1), base: c };
    let d1 = degenerate_edge(v1);
    let d2 = degenerate_edge(v2);
    square(&mut x, [d1.clone(), r(h), r(f), d1], false);
    square(&mut x, [r(h), d2.clone(), d2, r(g)], false);
    Arc::new(x)
}

/// `K → K'`, marking the middle edge.
pub fn saturation_map(flavor: Flavor) -> MCMap {
    let k = k_interval(flavor);
    let cod = Arc::new(k.with_markings(Regime::Edge, |id, _| id == 3));
    entire(&k, &cod)
}

/// The square with all edges but the `(i,ε)` one marked, into the square with all edges marked.
pub fn three_out_of_four(i: usize, e: Sign, flavor: Flavor) -> Result<MCMap> {
    check_face(2, i, e)?;
    let c = Cube::in_regime(2, flavor, Regime::Edge);
    let skip = NormalForm::face(2, i, e);
    let dom = c.marked_by(Regime::Edge, |d| d.source() == 1 && *d != skip);
    let cod = c.marked_by(Regime::Edge, |d| d.source() == 1);
    Ok(entire(&dom, &cod))
}

/// `□̄^n_{i,ε}`: the critical edge marked (edge-marked regime).
pub fn edge_marked_cube(n: usize, i: usize, e: Sign, flavor: Flavor) -> Result<Arc<MCSet>> {
    check_face(n, i, e)?;
    let crit = opcalc::critical_edge(n, i, e)?;
    let c = Cube::in_regime(n, flavor, Regime::Edge);
    Ok(c.marked_by(Regime::Edge, |d| *d == crit))
}

pub fn marked_open_box_inclusion(n: usize, i: usize, e: Sign, flavor: Flavor) -> Result<MCMap> {
    let x = edge_marked_cube(n, i, e, flavor)?;
    let c = Cube::in_regime(n, flavor, Regime::Edge);
    Ok(box_in(&x, &c, Some((i, e))))
}

/// Dispatch by family name, for the command line and the test corpus.
pub fn family(name: &str, n: usize, m: usize, face: (usize, Sign), flavor: Flavor) -> Result<CatalogItem> {
    use CatalogItem::{Map as M, Object as O};
    let (i, e) = face;
    Ok(match name {
        "standard-cube" => O(standard_cube(n, flavor)),
        "marked-cube" => O(marked_cube(n, flavor)?),
        "boundary" => O(boundary(n, flavor)),
        "boundary-inclusion" => M(boundary_inclusion(n, flavor)),
        "open-box" => M(open_box_inclusion(n, i, e, flavor)?),
        "comical-cube" => O(comical_cube(n, i, e, flavor)?),
        "comical-box" => M(comical_open_box_inclusion(n, i, e, flavor)?),
        "marking-extension" => M(comical_marking_extension(n, i, e, flavor)?),
        "marker" => M(marker(n, flavor)?),
        "L" => O(l_complex(flavor)),
        "rezk-elementary" => M(rezk_elementary(flavor)),
        "rezk" => M(rezk_map(m, n, flavor)?),
        "inner-cube" => O(inner_cube(n, i, e, flavor)?),
        "inner-box" => M(inner_open_box_inclusion(n, i, e, flavor)?),
        "K" => O(k_interval(flavor)),
        "saturation" => M(saturation_map(flavor)),
        "three-out-of-four" => M(three_out_of_four(i, e, flavor)?),
        "marked-box" => M(marked_open_box_inclusion(n, i, e, flavor)?),
        _ => bail!(Precondition, "unknown catalog family {name:?}"),
    })
}

pub const FAMILIES: &[&str] = &[
    "standard-cube",
    "marked-cube",
    "boundary",
    "boundary-inclusion",
    "open-box",
    "comical-cube",
    "comical-box",
    "marking-extension",
    "marker",
    "L",
    "rezk-elementary",
    "rezk",
    "inner-cube",
    "inner-box",
    "K",
    "saturation",
    "three-out-of-four",
    "marked-box",
];

#[derive(Clone, Debug)]
pub enum CatalogItem {
    Object(Arc<MCSet>),
    Map(MCMap),
}
