//! Weak and strong connection structures: chosen connection-shaped cubes on a map of
//! marked cubical sets, their validation and normal forms, promotion of strong
//! structures to genuine connections, lifting along fibrations, and the collapse
//! quotient that no compatible choice of connections survives.

mod quotient;
mod synth;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::complex::catalog::{standard_cube, Cube};
use crate::complex::{CellId, Complex, CubeRef, MCMap, MCSet, Map, Ref, Shape};
use crate::error::{bail, Error, Result};
use crate::functors::{forget_connections, free_connections, Forgotten};
use crate::opcalc::{self, Flavor, NormalForm};

pub use quotient::{collapse_projection, not_surj_quotient, Quotient};
pub use synth::{
    extend_wcs, synthesize_on_cube, synthesize_scs, validate_approximation, ApproximationTable, BoxStep, Extension,
    LiftingBackend, OracleBackend, ScsSynthesis, StageReport, Synthesis, SynthesisReport,
};

/// A weak connection structure `Γ_f: i*i_!X → Y` on `f: X → Y`, materialized up to a cap.
///
/// The value `x(φ)` on a cell `x` of `X` and a map `φ` of the larger flavor is
/// `Γ_f` applied to the cube `x·φ` of `i_!X`.
#[derive(Clone, Debug)]
pub struct WcsTable {
    pub subject: MCMap,
    pub b: Flavor,
    /// `i*i_!X` up to the cap; its cells are the pairs `(x, φ)`.
    pub free: Forgotten,
    pub gamma: MCMap,
}

impl WcsTable {
    /// Builds `Γ` from its values on the cells `(x, φ)` of `i*i_!X`. No validation.
    pub fn from_values(
        subject: &MCMap,
        b: Flavor,
        cap: usize,
        mut value: impl FnMut(CellId, &NormalForm) -> Result<CubeRef>,
    ) -> Result<WcsTable> {
        let ix = free_connections(&subject.domain, b)?;
        let free = forget_connections(&ix, subject.domain.shape, cap)?;
        let assign = free.cells.iter().map(|(c, phi)| value(*c, phi)).collect::<Result<Vec<_>>>()?;
        let gamma = Map { domain: free.object.clone(), codomain: subject.codomain.clone(), assign };
        Ok(WcsTable { subject: subject.clone(), b, free, gamma })
    }

    pub fn a(&self) -> Flavor {
        self.subject.domain.shape
    }

    pub fn cap(&self) -> usize {
        self.free.cap
    }

    pub fn source(&self) -> &Arc<MCSet> {
        &self.subject.domain
    }

    pub fn target(&self) -> &Arc<MCSet> {
        &self.subject.codomain
    }

    /// `x(φ)` for a cell `x` and any map `φ` of `B` into its dimension.
    pub fn value(&self, x: CellId, phi: &NormalForm) -> Result<CubeRef> {
        let ix = &self.free.source;
        let r = ix.act(&ix.id_ref(x), phi)?;
        let fr = self.free.to_ref(&r)?;
        Ok(self.gamma.apply(&fr))
    }

    /// `x(φ)` for a possibly degenerate cube `x` of `X`.
    pub fn value_ref(&self, x: &CubeRef, phi: &NormalForm) -> Result<CubeRef> {
        self.value(x.base, &x.epi.after(phi))
    }

    /// `(x, φ, x(φ))` over the cells of `i*i_!X`.
    pub fn entries(&self) -> impl Iterator<Item = (CellId, &NormalForm, &CubeRef)> + '_ {
        self.free.cells.iter().zip(&self.gamma.assign).map(|((c, phi), r)| (*c, phi, r))
    }

    /// The same values, re-targeted at a complex that contains the old one cell for cell
    /// (as produced by a growing filler).
    pub fn retarget(&self, y: &Arc<MCSet>) -> WcsTable {
        let mut t = self.clone();
        t.subject.codomain = y.clone();
        t.gamma.codomain = y.clone();
        t
    }
}

fn wcs_label(c: CellId, phi: &NormalForm) -> String {
    format!("x{c}({phi})")
}

/// Located violations of the structure's invariants; empty iff it is a weak connection
/// structure up to its cap.
pub fn validate_wcs(t: &WcsTable) -> Vec<String> {
    let mut out = Vec::new();
    if !t.b.includes(t.a()) {
        out.push(format!("{} does not contain {}", t.b, t.a()));
        return out;
    }
    let y = t.target();
    let free = &t.free.object;
    if *t.gamma.domain != **free || t.gamma.assign.len() != free.len() {
        out.push("Γ is not defined on the materialized i*i_!X".into());
        return out;
    }
    for (k, (c, phi, r)) in t.entries().enumerate() {
        let lbl = wcs_label(c, phi);
        if let Err(e) = y.check_ref(r) {
            out.push(format!("{lbl}: {e}"));
        } else if y.ref_dim(r) != free.dim(k) {
            out.push(format!("{lbl} = {r} has the wrong dimension"));
        } else if free.cell(k).marked && !y.is_marked(r) {
            out.push(format!("{lbl} = {r} must be marked"));
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (k, (c, phi, r)) in t.entries().enumerate() {
        let cell = free.cell(k);
        for (slot, f) in cell.faces.iter().enumerate() {
            let lhs = y.face(r, slot);
            let rhs = t.gamma.apply(f);
            if lhs != rhs {
                out.push(format!(
                    "{}: face {} is {lhs}, expected {rhs}",
                    wcs_label(c, phi),
                    Flavor::face_label(cell.dim, slot)
                ));
            }
        }
    }
    for c in 0..t.source().len() {
        let id = NormalForm::identity(t.source().dim(c));
        match t.free.cell_of(c, &id) {
            Some(k) if t.gamma.assign[k] == t.subject.assign[c] => {}
            Some(k) => out.push(format!("x{c}(id) = {}, but f(x{c}) = {}", t.gamma.assign[k], t.subject.assign[c])),
            None => out.push(format!("x{c} is missing from i*i_!X")),
        }
    }
    out
}

/// `f ∘ i*ε`: the structure on `f: i*X̄ → Y` induced by the connections of `X̄`.
pub fn wcs_from_counit(f: &MCMap, inc: &Forgotten) -> Result<WcsTable> {
    if *f.domain != *inc.object {
        bail!(Precondition, "the map's domain is not the given i*X̄");
    }
    let b = inc.source.shape;
    WcsTable::from_values(f, b, inc.cap, |c, phi| {
        let (xb, psi) = &inc.cells[c];
        let cube = inc.source.act_cell(*xb, &psi.after(phi));
        Ok(f.apply(&inc.to_ref(&cube)?))
    })
}

/// `Γ ∘ i*i_!h`: the structure induced on `f∘h`.
pub fn precompose_wcs(t: &WcsTable, h: &MCMap) -> Result<WcsTable> {
    let fh = h.then(&t.subject)?;
    WcsTable::from_values(&fh, t.b, t.cap(), |c, chi| t.value_ref(&h.assign[c], chi))
}

/// `g ∘ Γ`: the structure induced on `g∘f`.
pub fn postcompose_wcs(t: &WcsTable, g: &MCMap) -> Result<WcsTable> {
    let gf = t.subject.then(g)?;
    let gamma = t.gamma.then(g)?;
    Ok(WcsTable { subject: gf, b: t.b, free: t.free.clone(), gamma })
}

/// The dimension of the cube a table lives on, if its source is a standard cube.
fn cube_dim(t: &WcsTable) -> Result<usize> {
    let n = t.source().max_dim().unwrap_or(0);
    if **t.source() != *standard_cube(n, t.a()) {
        bail!(Precondition, "the table does not live on a standard cube");
    }
    Ok(n)
}

/// `φ*Γ_x = Γ_x ∘ i*φ`, a structure on the cube `x(φ)`.
pub fn restrict_wcs(t: &WcsTable, phi: &NormalForm) -> Result<WcsTable> {
    let n = cube_dim(t)?;
    if phi.target() != n {
        bail!(Dimension, "{phi} does not land in dimension {n}");
    }
    if phi.source() > t.cap() {
        return Err(Error::Cap { dim: phi.source(), cap: t.cap() });
    }
    let top = t.source().len() - 1;
    let m = phi.source();
    let cm = Cube::standard(m, t.a());
    let subject = cm.classify(&cm.complex, t.target(), &t.value(top, phi)?);
    WcsTable::from_values(&subject, t.b, t.cap(), |c, chi| t.value(top, &phi.after(&cm.monos[c].after(chi))))
}

/// `y = x′(φ_1)…(φ_p)` with `x′` non-degenerate with respect to the structure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EzDecomposition {
    pub base: CellId,
    /// `φ = φ_1 ∘ … ∘ φ_p`.
    pub epi: NormalForm,
    pub factors: Vec<NormalForm>,
}

/// Decomposition against an abstract structure: `cells` with their dimensions, their
/// images in the target, and the values `x(φ)`.
pub(crate) fn decompose(
    y: &CubeRef,
    dim: usize,
    cells: &[(CellId, usize)],
    image: &dyn Fn(CellId) -> CubeRef,
    value: &dyn Fn(CellId, &NormalForm) -> Result<CubeRef>,
    b: Flavor,
) -> Result<Option<EzDecomposition>> {
    for &(c, d) in cells.iter().filter(|(_, d)| *d < dim) {
        for e in opcalc::epis(dim, d, b) {
            if value(c, &e)? == *y {
                let Some(mut rec) = decompose(&image(c), d, cells, image, value, b)? else {
                    bail!(Precondition, "cell {c} is not in the image of its own structure");
                };
                rec.epi = rec.epi.after(&e);
                rec.factors.push(e);
                return Ok(Some(rec));
            }
        }
    }
    for &(c, _) in cells.iter().filter(|(_, d)| *d == dim) {
        if image(c) == *y {
            return Ok(Some(EzDecomposition { base: c, epi: NormalForm::identity(dim), factors: vec![] }));
        }
    }
    Ok(None)
}

fn check_subcomplex(t: &WcsTable) -> Result<()> {
    if !t.subject.is_mono() {
        bail!(Precondition, "the structure does not live on a subcomplex");
    }
    Ok(())
}

fn cells_with_dims(x: &MCSet) -> Vec<(CellId, usize)> {
    (0..x.len()).map(|c| (c, x.dim(c))).collect()
}

/// The unique `(x′, φ)` with `x′` non-degenerate with respect to `Γ` and
/// `y = x′(φ_1)…(φ_p)`; the factorization returned is the one found on the way down.
pub fn ez_decompose_wrt(t: &WcsTable, y: &CubeRef) -> Result<EzDecomposition> {
    check_subcomplex(t)?;
    let dim = t.target().ref_dim(y);
    if dim > t.cap() {
        return Err(Error::Cap { dim, cap: t.cap() });
    }
    let cells = cells_with_dims(t.source());
    decompose(y, dim, &cells, &|c| t.subject.assign[c].clone(), &|c, e| t.value(c, e), t.b)?
        .ok_or_else(|| Error::Precondition(format!("{y} is not in the image of Γ")))
}

/// Whether the cell `x` is non-degenerate with respect to `Γ`.
pub fn is_nondegenerate_wrt(t: &WcsTable, x: CellId) -> Result<bool> {
    let d = ez_decompose_wrt(t, &t.subject.assign[x])?;
    Ok(d.base == x && d.epi.is_identity())
}

/// Every `(x′, φ)` with `x′` non-degenerate with respect to `Γ` and some factorization
/// `φ = φ_1…φ_p` into non-identity epis with `x′(φ_1)…(φ_p) = y`, found by exhaustive
/// search over factorizations.
pub fn ez_candidates(t: &WcsTable, y: &CubeRef) -> Result<Vec<(CellId, NormalForm)>> {
    check_subcomplex(t)?;
    let yx = t.target();
    let dim = yx.ref_dim(y);
    if dim > t.cap() {
        return Err(Error::Cap { dim, cap: t.cap() });
    }
    let pre = t.subject.preimages();
    let in_x = |z: &CubeRef| pre.get(&z.base).map(|&c| Ref { epi: z.epi.clone(), base: c });
    let mut out = Vec::new();
    for c in 0..t.source().len() {
        let d = t.source().dim(c);
        if d > dim || !is_nondegenerate_wrt(t, c)? {
            continue;
        }
        let mut seen: HashSet<(CubeRef, NormalForm)> = HashSet::new();
        let mut stack = vec![(t.subject.assign[c].clone(), NormalForm::identity(d))];
        while let Some((z, phi)) = stack.pop() {
            if !seen.insert((z.clone(), phi.clone())) {
                continue;
            }
            let dz = yx.ref_dim(&z);
            if dz == dim {
                if z == *y {
                    out.push((c, phi));
                }
                continue;
            }
            let zx = in_x(&z);
            for m in dz + 1..=dim {
                for e in opcalc::epis(m, dz, t.b) {
                    let next = match &zx {
                        Some(r) => t.value_ref(r, &e)?,
                        None if t.a().includes(e.flavor()) => yx.act(&z, &e)?,
                        None => continue,
                    };
                    stack.push((next, phi.after(&e)));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// A failure of `x(φ)(ψ) = x(φψ)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScsViolation {
    pub x: CellId,
    pub phi: NormalForm,
    pub psi: NormalForm,
    pub lhs: CubeRef,
    pub rhs: CubeRef,
}

impl fmt::Display for ScsViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}({})({}) = {} but x{}({}∘{}) = {}", self.x, self.phi, self.psi, self.lhs, self.x, self.phi, self.psi, self.rhs)
    }
}

#[derive(Clone, Debug)]
pub struct ScsVerdict {
    pub cap: usize,
    pub violation: Option<ScsViolation>,
}

impl ScsVerdict {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `x(φ)(ψ) = x(φψ)` for all cells `x` and epis `φ, ψ` of `B` with every
/// dimension at most `cap`, whenever `x(φ)` lies in `X`.
///
/// Epis suffice: a general map is an epi followed by a mono, monos lie in every flavor,
/// and a weak connection structure already commutes with maps of `A`.
pub fn check_scs(t: &WcsTable, cap: usize) -> Result<ScsVerdict> {
    check_subcomplex(t)?;
    let cap = cap.min(t.cap());
    let pre = t.subject.preimages();
    let y = t.target();
    for x in 0..t.source().len() {
        let n = t.source().dim(x);
        for m in n..=cap {
            for phi in opcalc::epis(m, n, t.b) {
                let v = t.value(x, &phi)?;
                let vx = pre.get(&v.base).map(|&c| Ref { epi: v.epi.clone(), base: c });
                for k in m..=cap {
                    for psi in opcalc::epis(k, m, t.b) {
                        let lhs = match &vx {
                            Some(r) => t.value_ref(r, &psi)?,
                            None if t.a().includes(psi.flavor()) => y.act(&v, &psi)?,
                            None => continue,
                        };
                        let rhs = t.value(x, &phi.after(&psi))?;
                        if lhs != rhs {
                            let violation = ScsViolation { x, phi, psi, lhs, rhs };
                            return Ok(ScsVerdict { cap, violation: Some(violation) });
                        }
                    }
                }
            }
        }
    }
    Ok(ScsVerdict { cap, violation: None })
}

/// `X̄` over `B` with `X̄_n = X_n` and `xφ = x(φ)`, together with `X ≅ i*X̄`.
#[derive(Clone, Debug)]
pub struct Promotion {
    pub object: Arc<MCSet>,
    /// The cell of `X` behind each cell of `X̄`.
    pub cells: Vec<CellId>,
    pub index: BTreeMap<CellId, CellId>,
    /// `i*X̄` up to the dimension of `X`.
    pub forgotten: Forgotten,
    pub iso: MCMap,
}

impl Promotion {
    /// The cube of `X̄` named by a decomposition.
    fn cube(&self, d: &EzDecomposition) -> CubeRef {
        Ref { epi: d.epi.clone(), base: self.index[&d.base] }
    }
}

fn check_identity_subject(t: &WcsTable) -> Result<()> {
    let f = &t.subject;
    if *f.domain != *f.codomain || f.assign.iter().enumerate().any(|(c, r)| r.base != c || !r.epi.is_identity()) {
        bail!(Precondition, "promotion needs a structure on X itself");
    }
    Ok(())
}

/// Upgrades `X` to a complex over `B` using a strong connection structure on `X`.
pub fn promote_scs(t: &WcsTable) -> Result<Promotion> {
    check_identity_subject(t)?;
    let x = t.source();
    let top = x.max_dim().unwrap_or(0);
    if t.cap() < top {
        return Err(Error::Cap { dim: top, cap: t.cap() });
    }
    if let Some(v) = check_scs(t, t.cap())?.violation {
        bail!(Precondition, "not a strong connection structure: {v}");
    }
    let mut order: Vec<(usize, CellId)> = Vec::new();
    for c in 0..x.len() {
        if is_nondegenerate_wrt(t, c)? {
            order.push((x.dim(c), c));
        }
    }
    order.sort();
    let mut obj: MCSet = Complex::new(t.b, x.regime);
    let mut index = BTreeMap::new();
    let mut cells = Vec::new();
    for &(d, c) in &order {
        let mut faces = Vec::with_capacity(2 * d);
        for slot in 0..2 * d {
            let e = ez_decompose_wrt(t, &x.face(&x.id_ref(c), slot))?;
            faces.push(Ref { epi: e.epi, base: index[&e.base] });
        }
        let id = obj.add_cell(d, faces, x.cell(c).marked)?;
        index.insert(c, id);
        cells.push(c);
    }
    let problems = obj.validate();
    if !problems.is_empty() {
        bail!(Invalid, "promoted complex: {}", problems.join("; "));
    }
    let object = Arc::new(obj);
    let forgotten = forget_connections(&object, t.a(), top)?;
    let mut p = Promotion { object, cells, index, forgotten, iso: Map::identity(x) };
    let mut assign = Vec::with_capacity(x.len());
    for c in 0..x.len() {
        let e = ez_decompose_wrt(t, &x.id_ref(c))?;
        assign.push(p.forgotten.to_ref(&p.cube(&e))?);
    }
    let iso = Map::new(x.clone(), p.forgotten.object.clone(), assign)?;
    if !iso.is_entire() || !iso.is_regular() {
        bail!(Precondition, "X is not isomorphic to i*X̄ below the cap");
    }
    p.iso = iso;
    Ok(p)
}

/// `f̄: X̄ → Ȳ` acting as `f`, given structures on both ends with `f∘Γ_X = Γ_Y∘i*i_!f`.
pub fn promote_scs_map(f: &MCMap, tx: &WcsTable, ty: &WcsTable, px: &Promotion, py: &Promotion) -> Result<MCMap> {
    if *f.domain != **tx.source() || *f.codomain != **ty.source() {
        bail!(Precondition, "the structures do not live on the ends of the map");
    }
    for (c, chi, v) in tx.entries() {
        let lhs = f.apply(v);
        let rhs = ty.value_ref(&f.assign[c], chi)?;
        if lhs != rhs {
            bail!(Precondition, "f(x{c}({chi})) = {lhs} but f(x{c})({chi}) = {rhs}");
        }
    }
    let mut assign = Vec::with_capacity(px.cells.len());
    for &c in &px.cells {
        assign.push(py.cube(&ez_decompose_wrt(ty, &f.assign[c])?));
    }
    Map::new(px.object.clone(), py.object.clone(), assign)
}
