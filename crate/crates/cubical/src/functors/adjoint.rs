//! The adjoint triple `i_! ⊣ i* ⊣ i_*` along an inclusion of flavors.

use std::collections::HashMap;
use std::sync::Arc;

use crate::complex::catalog::Cube;
use crate::complex::{CellId, Cell, Complex, CubeRef, MCMap, MCSet, Map, Ref};
use crate::error::{bail, Error, Result};
use crate::opcalc::{self, Flavor, NormalForm};

use super::nerve::{build_nerve, Nerve};

fn check_inclusion(a: Flavor, b: Flavor) -> Result<()> {
    if !b.includes(a) {
        bail!(Flavor, "{a} is not contained in {b}");
    }
    Ok(())
}

/// `i_!`: the same cells, read in the larger flavor.
pub fn free_connections(x: &Arc<MCSet>, b: Flavor) -> Result<Arc<MCSet>> {
    check_inclusion(x.shape, b)?;
    Ok(Arc::new(x.with_shape(b)?))
}

/// `i_! f` between prescribed images of the domain and codomain.
pub fn free_connections_map(f: &MCMap, dom: &Arc<MCSet>, cod: &Arc<MCSet>) -> MCMap {
    Map { domain: dom.clone(), codomain: cod.clone(), assign: f.assign.clone() }
}

/// The default materialization cap for `i*X`.
pub fn default_cap(x: &MCSet) -> usize {
    x.max_dim().unwrap_or(0) + 2
}

/// `i*X` materialized up to a cap. Its cells are the pairs `(x, φ)` with `x` a cell of
/// `X` and `φ` a `B`-epi that is not degenerate in `A`.
#[derive(Clone, Debug)]
pub struct Forgotten {
    pub source: Arc<MCSet>,
    pub object: Arc<MCSet>,
    pub cells: Vec<(CellId, NormalForm)>,
    pub cap: usize,
    lookup: HashMap<(CellId, NormalForm), CellId>,
}

impl Forgotten {
    pub fn cell_of(&self, x: CellId, phi: &NormalForm) -> Option<CellId> {
        self.lookup.get(&(x, phi.clone())).copied()
    }

    /// The `A`-normalized reference of a cube `x·e` of the source.
    pub fn to_ref(&self, r: &CubeRef) -> Result<CubeRef> {
        if r.epi.source() > self.cap {
            return Err(Error::Cap { dim: r.epi.source(), cap: self.cap });
        }
        let (chi, alpha) = opcalc::split_degenerate_part(&r.epi, self.object.shape);
        let base = self.lookup[&(r.base, chi)];
        Ok(Ref { epi: alpha, base })
    }

    /// The `B`-cube of the source named by a cube of `i*X`.
    pub fn to_source(&self, r: &CubeRef) -> CubeRef {
        let (x, phi) = &self.cells[r.base];
        Ref { epi: phi.after(&r.epi), base: *x }
    }
}

/// Non-degenerate-in-`a` epis `[1]^m → [1]^k` of `b`.
pub fn free_epis(m: usize, k: usize, a: Flavor, b: Flavor) -> Vec<NormalForm> {
    opcalc::epis(m, k, b)
        .into_iter()
        .filter(|e| !opcalc::is_degenerate_in(e, a))
        .collect()
}

/// `i*X` for `X` over `B`, restricted to the flavor `a`, up to dimension `cap`.
pub fn forget_connections(x: &Arc<MCSet>, a: Flavor, cap: usize) -> Result<Forgotten> {
    check_inclusion(a, x.shape)?;
    let b = x.shape;
    let mut order: Vec<(usize, CellId, NormalForm)> = Vec::new();
    for c in 0..x.len() {
        let k = x.dim(c);
        for m in k..=cap.max(k) {
            for phi in free_epis(m, k, a, b) {
                order.push((m, c, phi));
            }
        }
    }
    order.sort();
    let mut out = Forgotten {
        source: x.clone(),
        object: Arc::new(Complex::new(a, x.regime)),
        cells: Vec::new(),
        cap: cap.max(x.max_dim().unwrap_or(0)),
        lookup: HashMap::new(),
    };
    let mut obj: MCSet = Complex::new(a, x.regime);
    for (m, c, phi) in order {
        let mut faces = Vec::with_capacity(2 * m);
        for slot in 0..2 * m {
            let face = x.act_cell(c, &phi.after(&NormalForm::face(m, slot / 2 + 1, (slot % 2) as u8)));
            let (chi, alpha) = opcalc::split_degenerate_part(&face.epi, a);
            faces.push(Ref { epi: alpha, base: out.lookup[&(face.base, chi)] });
        }
        let marked = (!phi.is_identity() || x.cell(c).marked) && x.regime.allows(m);
        let id = obj.push_cell(Cell { dim: m, faces, marked });
        out.lookup.insert((c, phi.clone()), id);
        out.cells.push((c, phi));
    }
    out.object = Arc::new(obj);
    Ok(out)
}

/// `i*f` between materializations of its domain and codomain.
pub fn forget_map(f: &MCMap, dom: &Forgotten, cod: &Forgotten) -> Result<MCMap> {
    let mut assign = Vec::with_capacity(dom.cells.len());
    for (x, phi) in &dom.cells {
        let img = &f.assign[*x];
        let cube = f.codomain.act_cell(img.base, &img.epi.after(phi));
        assign.push(cod.to_ref(&cube)?);
    }
    Ok(Map { domain: dom.object.clone(), codomain: cod.object.clone(), assign })
}

/// `η_X: X → i*i_!X`, with the materialized codomain.
pub fn unit_map(x: &Arc<MCSet>, b: Flavor, cap: usize) -> Result<(Forgotten, MCMap)> {
    let ix = free_connections(x, b)?;
    let fg = forget_connections(&ix, x.shape, cap)?;
    let assign = (0..x.len())
        .map(|c| fg.object.id_ref(fg.cell_of(c, &NormalForm::identity(x.dim(c))).unwrap()))
        .collect();
    let m = Map { domain: x.clone(), codomain: fg.object.clone(), assign };
    Ok((fg, m))
}

/// `ε_X: i_!i*X → X`, sending `(x, φ)` to `x·φ`.
pub fn counit_map(x: &Arc<MCSet>, a: Flavor, cap: usize) -> Result<(Forgotten, MCMap)> {
    let fg = forget_connections(x, a, cap)?;
    let dom = free_connections(&fg.object, x.shape)?;
    let assign = fg.cells.iter().map(|(c, phi)| Ref { epi: phi.clone(), base: *c }).collect();
    let m = Map { domain: dom, codomain: x.clone(), assign };
    Ok((fg, m))
}

/// `i*` of the representable `□^n_B`, with maps `i*φ` between them.
pub struct ForgottenCubes {
    pub a: Flavor,
    pub b: Flavor,
    pub cap: usize,
    pub cubes: Vec<Cube>,
    pub forgotten: Vec<Forgotten>,
}

impl ForgottenCubes {
    pub fn new(a: Flavor, b: Flavor, top: usize, cap: usize) -> Result<ForgottenCubes> {
        check_inclusion(a, b)?;
        let cubes: Vec<Cube> = (0..=top).map(|n| Cube::standard(n, b)).collect();
        let forgotten = cubes
            .iter()
            .map(|c| forget_connections(&c.complex, a, cap))
            .collect::<Result<Vec<_>>>()?;
        Ok(ForgottenCubes { a, b, cap, cubes, forgotten })
    }

    /// `i*φ: i*□^m → i*□^n`.
    pub fn map(&self, phi: &NormalForm) -> Result<MCMap> {
        let (m, n) = (phi.source(), phi.target());
        let cod = &self.cubes[n];
        let r = cod.complex.act_cell(cod.top(), phi);
        let f = self.cubes[m].classify(&self.cubes[m].complex, &cod.complex, &r);
        forget_map(&f, &self.forgotten[m], &self.forgotten[n])
    }
}

/// `i_*X` up to dimension `top`, each `n`-cube a map `i*□^n_B → X` with `i*□^n_B`
/// materialized up to `cap`.
pub struct Cofree {
    pub nerve: Nerve<Flavor>,
    pub reps: ForgottenCubes,
}

impl Cofree {
    pub fn object(&self) -> &Arc<MCSet> {
        &self.nerve.object
    }
}

pub fn cofree(x: &Arc<MCSet>, b: Flavor, top: usize, cap: usize) -> Result<Cofree> {
    if cap < top {
        bail!(Precondition, "cap {cap} below requested dimension {top}");
    }
    let reps = ForgottenCubes::new(x.shape, b, top, cap)?;
    let objects: Vec<Arc<MCSet>> = reps.forgotten.iter().map(|f| f.object.clone()).collect();
    let tops: Vec<CellId> = (0..=top)
        .map(|n| reps.forgotten[n].cell_of(reps.cubes[n].top(), &NormalForm::identity(n)).unwrap())
        .collect();
    let nerve = build_nerve(
        b,
        x.regime,
        top,
        &objects,
        &|phi| reps.map(phi).expect("cube map"),
        x,
        &|n, u| n >= 1 && x.is_marked(&u[tops[n]]),
    )?;
    Ok(Cofree { nerve, reps })
}
