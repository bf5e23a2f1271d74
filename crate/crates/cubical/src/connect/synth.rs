//! Lifting connection structures along fibrations, one cube at a time.
//!
//! Everything here lives over the minimal flavor: the structures built are on complexes
//! without connections, lifted against a map that has the lifting property against the
//! comical boxes and marking extensions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use crate::complex::catalog::{boundary_inclusion, comical_marking_extension, comical_open_box_inclusion, Cube};
use crate::complex::{CellId, CubeRef, MCMap, MCSet, Map, Ref};
use crate::error::{bail, Error, Result};
use crate::homotopy::{Family, FillerOracle, FreeFillingComplex, Generator, LiftProblem};
use crate::opcalc::{self, Flavor, NormalForm, Sign, TailForm};

use super::{check_scs, decompose, validate_wcs, WcsTable};

/// Something that solves lifting problems against a map `p: E → B`.
///
/// A backend may enlarge `E` by appending cells or marking existing ones, but cell ids
/// of `E` stay valid across calls.
pub trait LiftingBackend {
    fn projection(&self) -> &MCMap;
    /// A diagonal for the square `(u, v)` against the current projection.
    fn lift(&mut self, gen: &Generator, u: &MCMap, v: &MCMap) -> Result<MCMap>;
}

/// A fixed map whose lifting problems are answered by an oracle.
pub struct OracleBackend<O> {
    pub p: MCMap,
    pub oracle: O,
}

impl<O: FillerOracle> LiftingBackend for OracleBackend<O> {
    fn projection(&self) -> &MCMap {
        &self.p
    }

    fn lift(&mut self, gen: &Generator, u: &MCMap, v: &MCMap) -> Result<MCMap> {
        let problem = LiftProblem::new(gen.map.clone(), u.clone(), v.clone(), self.p.clone())?;
        self.oracle.lift(&problem).ok_or_else(|| Error::Lift(format!("no filler for {}", gen.label)))
    }
}

/// Existing fillers are used when there are any; otherwise one is adjoined freely.
impl LiftingBackend for FreeFillingComplex {
    fn projection(&self) -> &MCMap {
        &self.projection
    }

    fn lift(&mut self, gen: &Generator, u: &MCMap, v: &MCMap) -> Result<MCMap> {
        let problem = LiftProblem::new(gen.map.clone(), u.clone(), v.clone(), self.projection.clone())?;
        if let Some(h) = problem.solve() {
            return Ok(h);
        }
        self.free_fill(gen, u, v)?;
        Ok(self.log.last().expect("just filled").lift.clone())
    }
}

/// One filled box.
#[derive(Clone, Debug)]
pub struct BoxStep {
    pub tail: TailForm,
    pub dim: usize,
    pub face: (usize, Sign),
    /// Critical faces checked to be marked before filling.
    pub critical: usize,
    pub reused: bool,
}

#[derive(Clone, Debug, Default)]
pub struct SynthesisReport {
    pub boxes: Vec<BoxStep>,
    /// Marking extensions that were needed.
    pub markings: usize,
}

/// The cubes `x(ψγ̃_{j:q,μ})` built along the way, keyed by tail form.
#[derive(Clone, Debug)]
pub struct ApproximationTable {
    pub n: usize,
    pub b: Flavor,
    pub cubes: BTreeMap<TailForm, CubeRef>,
}

/// A structure on one cube together with its approximations.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub table: WcsTable,
    pub approximations: ApproximationTable,
    pub report: SynthesisReport,
}

/// Face `(k, ε)` of the approximation cube for `t`: the previous approximation along the
/// tail, the structure elsewhere.
fn approx_face<'a>(
    t: &TailForm,
    k: usize,
    e: Sign,
    approx: &'a BTreeMap<TailForm, CubeRef>,
) -> std::result::Result<Option<&'a CubeRef>, TailForm> {
    if t.q >= 1 && t.j < k && k <= t.j + t.q && e == t.mu {
        let prev = t.with_q(t.q - 1);
        approx.get(&prev).map(Some).ok_or(prev)
    } else {
        Ok(None)
    }
}

/// Located violations of the approximation invariants against the final structure `t`
/// on the cube. In strict mode the trivial approximations must be marked as well.
pub fn validate_approximation(a: &ApproximationTable, t: &WcsTable, strict: bool) -> Vec<String> {
    let mut out = Vec::new();
    let x = t.target();
    let top = t.source().len() - 1;
    for (tf, r) in &a.cubes {
        let s = tf.source();
        if let Err(e) = x.check_ref(r) {
            out.push(format!("{tf}: {e}"));
            continue;
        }
        if x.ref_dim(r) != s {
            out.push(format!("{tf} = {r} has the wrong dimension"));
            continue;
        }
        if (tf.q >= 1 || strict) && !x.is_marked(r) {
            out.push(format!("{tf} = {r} must be marked"));
        }
        if tf.q == 0 {
            continue;
        }
        let nf = tf.to_normal_form();
        for slot in 0..2 * s {
            let (k, e) = (slot / 2 + 1, (slot % 2) as Sign);
            let expected = match approx_face(tf, k, e, &a.cubes) {
                Ok(Some(c)) => Ok(c.clone()),
                Ok(None) => t.value(top, &nf.after(&NormalForm::face(s, k, e))),
                Err(prev) => Err(Error::Synthesis(format!("{prev} is missing"))),
            };
            match expected {
                Ok(want) if x.face(r, slot) != want => {
                    out.push(format!("{tf}: face ({k},{e}) is {}, expected {want}", x.face(r, slot)))
                }
                Ok(_) => {}
                Err(err) => out.push(format!("{tf}: face ({k},{e}): {err}")),
            }
        }
    }
    out
}

type CacheKey = (String, Vec<CubeRef>, Vec<CubeRef>);

/// The triple induction on one cube `x` of `E`.
struct Core<'a> {
    backend: &'a mut dyn LiftingBackend,
    b: Flavor,
    n: usize,
    cap: usize,
    /// `x(δχ)` with `δ` a mono and `χ` a connection word.
    vals: HashMap<NormalForm, CubeRef>,
    approx: BTreeMap<TailForm, CubeRef>,
    over: &'a dyn Fn(&NormalForm) -> Result<CubeRef>,
    cubes: Arc<Vec<Cube>>,
    gens: HashMap<(Family, usize, usize, Sign), Generator>,
    cache: HashMap<CacheKey, MCMap>,
    report: SynthesisReport,
}

fn not_yet(what: impl std::fmt::Display) -> Error {
    Error::Synthesis(format!("{what} is needed before it is constructed"))
}

impl Core<'_> {
    fn e(&self) -> Arc<MCSet> {
        self.backend.projection().domain.clone()
    }

    fn xval(&self, phi: &NormalForm) -> Result<CubeRef> {
        let (e, d) = phi.epi_mono();
        let (chi, alpha) = opcalc::split_degenerate_part(&e, Flavor::NONE);
        let key = d.after(&chi);
        let v = self.vals.get(&key).ok_or_else(|| not_yet(format!("x({key})")))?;
        Ok(self.e().act_cell(v.base, &v.epi.after(&alpha)))
    }

    fn generator(&mut self, family: Family, d: usize, face: (usize, Sign)) -> Result<Generator> {
        let key = (family, d, face.0, face.1);
        if let Some(g) = self.gens.get(&key) {
            return Ok(g.clone());
        }
        let map = match family {
            Family::OpenBox => comical_open_box_inclusion(d, face.0, face.1, Flavor::NONE)?,
            _ => comical_marking_extension(d, face.0, face.1, Flavor::NONE)?,
        };
        let g = Generator { family, dim: d, label: format!("{family}({d};{},{})", face.0, face.1), map };
        self.gens.insert(key, g.clone());
        Ok(g)
    }

    fn lift(&mut self, gen: &Generator, u: &MCMap, v: &MCMap) -> Result<(MCMap, bool)> {
        let key = (gen.label.clone(), u.assign.clone(), v.assign.clone());
        if let Some(h) = self.cache.get(&key) {
            let mut h = h.clone();
            h.codomain = self.e();
            return Ok((h, true));
        }
        let h = self.backend.lift(gen, u, v)?;
        let g = &gen.map;
        let p = self.backend.projection();
        let restricts = (0..g.domain.len()).all(|s| h.assign[g.assign[s].base] == u.assign[s]);
        let lies_over = h.assign.iter().zip(&v.assign).all(|(a, b)| p.apply(a) == *b);
        if !restricts || !lies_over {
            bail!(Synthesis, "the backend's answer to {} is not a filler", gen.label);
        }
        self.cache.insert(key, h.clone());
        Ok((h, false))
    }

    /// Fills the box for the approximation `t` missing `face`; returns the filler map.
    fn fill(&mut self, t: &TailForm, face: (usize, Sign)) -> Result<MCMap> {
        let d = t.source();
        let nf = t.to_normal_form();
        let mut faces = Vec::with_capacity(2 * d);
        for slot in 0..2 * d {
            let (k, e) = (slot / 2 + 1, (slot % 2) as Sign);
            if (k, e) == face {
                faces.push(None);
                continue;
            }
            let v = match approx_face(t, k, e, &self.approx).map_err(not_yet)? {
                Some(c) => c.clone(),
                None => self.xval(&nf.after(&NormalForm::face(d, k, e)))?,
            };
            faces.push(Some(v));
        }
        let e_now = self.e();
        let cubes = self.cubes.clone();
        let cube = &cubes[d];
        let value = |delta: &NormalForm| -> Result<CubeRef> {
            for (slot, f) in faces.iter().enumerate() {
                let Some(f) = f else { continue };
                let (k, e) = (slot / 2 + 1, (slot % 2) as Sign);
                let rest = NormalForm::degen(d, k).after(delta);
                if NormalForm::face(d, k, e).after(&rest) == *delta {
                    return Ok(e_now.act_cell(f.base, &f.epi.after(&rest)));
                }
            }
            bail!(Synthesis, "no face of the box for {t} contains {delta}")
        };
        let mut critical = 0;
        for delta in opcalc::critical_faces(d, face.0, face.1)? {
            if delta.source() == 0 || delta.is_identity() {
                continue;
            }
            if !e_now.is_marked(&value(&delta)?) {
                bail!(Synthesis, "box for {t} over {face:?}: critical face {delta} is unmarked");
            }
            critical += 1;
        }
        let gen = self.generator(Family::OpenBox, d, face)?;
        let g = &gen.map;
        let assign = (0..g.domain.len()).map(|s| value(&cube.monos[g.assign[s].base])).collect::<Result<Vec<_>>>()?;
        let u = Map::new(g.domain.clone(), e_now.clone(), assign)
            .map_err(|err| Error::Synthesis(format!("box for {t} over {face:?}: {err}")))?;
        let y = self.backend.projection().codomain.clone();
        let v = cube.classify(&g.codomain, &y, &(self.over)(&nf)?);
        let (h, reused) = self.lift(&gen, &u, &v)?;
        self.report.boxes.push(BoxStep { tail: t.clone(), dim: d, face, critical, reused });
        Ok(h)
    }

    /// The face `face` of the filler `h`, marked by a marking extension if it is not yet.
    fn mark(&mut self, t: &TailForm, face: (usize, Sign), h: &MCMap) -> Result<CubeRef> {
        let d = t.source();
        let cubes = self.cubes.clone();
        let cell = cubes[d].cell_of(&NormalForm::face(d, face.0, face.1));
        let r = h.assign[cell].clone();
        if self.e().is_marked(&r) {
            return Ok(r);
        }
        let gen = self.generator(Family::MarkingExtension, d, face)?;
        let u = Map::new(gen.map.domain.clone(), self.e(), h.assign.clone())
            .map_err(|err| Error::Synthesis(format!("marking x({t}) over {face:?}: {err}")))?;
        let p = self.backend.projection().clone();
        let v = Map { domain: gen.map.codomain.clone(), codomain: p.codomain.clone(), assign: h.assign.iter().map(|a| p.apply(a)).collect() };
        let (h2, _) = self.lift(&gen, &u, &v)?;
        self.report.markings += 1;
        if h2.assign[cell] != r || !self.e().is_marked(&r) {
            bail!(Synthesis, "marking x({t}) did not mark it");
        }
        Ok(r)
    }

    fn run(&mut self) -> Result<()> {
        let (n, b) = (self.n, self.b);
        for k in 1..=self.cap.saturating_sub(n) {
            for t in TailForm::enumerate(n, k - 1, 1, b) {
                let face = (t.j + 1, t.mu);
                let h = self.fill(&t, face)?;
                let d = t.source();
                let cubes = self.cubes.clone();
                let top = h.assign[cubes[d].top()].clone();
                let missing = h.assign[cubes[d].cell_of(&NormalForm::face(d, face.0, face.1))].clone();
                self.approx.insert(t.clone(), top);
                self.approx.insert(t.with_q(0), missing);
            }
            for m in (1..=n + k).rev() {
                for q in (1..=k).rev() {
                    for t in TailForm::enumerate(n, k - q, q, b) {
                        if t.maximal_index() != m {
                            continue;
                        }
                        let t1 = t.with_q(q + 1);
                        let face = (t.j, t.mu);
                        let h = self.fill(&t1, face)?;
                        let cubes = self.cubes.clone();
                        self.approx.insert(t1.clone(), h.assign[cubes[t1.source()].top()].clone());
                        let r = self.mark(&t1, face, &h)?;
                        self.vals.insert(t.to_normal_form(), r);
                    }
                }
            }
        }
        Ok(())
    }
}

fn connection_words(s: usize, m: usize, b: Flavor) -> impl Iterator<Item = NormalForm> {
    opcalc::epis(s, m, b).into_iter().filter(|e| e.is_connection_only())
}

/// Runs the induction on the cube `x`, given its boundary values `boundary(δ, χ)` and the
/// values `over(φ)` it must lie over. Returns `x(χ)` for every connection word `χ`.
fn synthesize_cell(
    backend: &mut dyn LiftingBackend,
    b: Flavor,
    x: &CubeRef,
    boundary: &dyn Fn(&NormalForm, &NormalForm) -> Result<CubeRef>,
    over: &dyn Fn(&NormalForm) -> Result<CubeRef>,
    cap: usize,
) -> Result<(HashMap<NormalForm, CubeRef>, ApproximationTable, SynthesisReport)> {
    let n = backend.projection().domain.ref_dim(x);
    let mut vals = HashMap::new();
    for m in 0..n {
        for d in opcalc::monos(m, n) {
            for s in m..=cap {
                for chi in connection_words(s, m, b) {
                    vals.insert(d.after(&chi), boundary(&d, &chi)?);
                }
            }
        }
    }
    vals.insert(NormalForm::identity(n), x.clone());
    let cubes = Arc::new((0..=cap + 1).map(|d| Cube::standard(d, Flavor::NONE)).collect());
    let mut core = Core {
        backend,
        b,
        n,
        cap,
        vals,
        approx: BTreeMap::new(),
        over,
        cubes,
        gens: HashMap::new(),
        cache: HashMap::new(),
        report: SynthesisReport::default(),
    };
    core.run()?;
    let top: HashMap<NormalForm, CubeRef> = core.vals.into_iter().filter(|(k, _)| k.is_epi()).collect();
    let approx = ApproximationTable { n, b, cubes: core.approx };
    Ok((top, approx, core.report))
}

fn check_minimal(e: &MCSet) -> Result<()> {
    if e.shape != Flavor::NONE {
        bail!(Flavor, "synthesis works over complexes without connections, not {}", e.shape);
    }
    Ok(())
}

/// Extends a structure on `∂x` to the cube `x` of `E`, lying over a structure on `p(x)`.
///
/// `boundary` lives on `∂□^n → E`, `over` on `□^n → B` and must be defined one dimension
/// above `cap`, where the approximation cubes live.
pub fn synthesize_on_cube(
    backend: &mut dyn LiftingBackend,
    x: &CubeRef,
    boundary: &WcsTable,
    over: &WcsTable,
    cap: usize,
) -> Result<Synthesis> {
    let e0 = backend.projection().domain.clone();
    check_minimal(&e0)?;
    let b = over.b;
    let n = e0.ref_dim(x);
    if boundary.b != b {
        bail!(Precondition, "boundary and base structures have different flavors");
    }
    if boundary.cap() < cap {
        return Err(Error::Cap { dim: cap, cap: boundary.cap() });
    }
    if over.cap() < cap + 1 {
        return Err(Error::Cap { dim: cap + 1, cap: over.cap() });
    }
    let cube = Cube::standard(n, Flavor::NONE);
    let bd = boundary_inclusion(n, Flavor::NONE);
    if **boundary.source() != *bd.domain {
        bail!(Precondition, "the boundary structure does not live on ∂□^{n}");
    }
    let top = cube.top();
    let p = backend.projection().clone();
    let pre = bd.preimages();
    for (c, d) in cube.monos.iter().enumerate() {
        let xd = e0.act_cell(x.base, &x.epi.after(d));
        if over.subject.assign[c] != p.apply(&xd) {
            bail!(Precondition, "the base structure does not live on p(x)");
        }
        if let Some(&s) = pre.get(&c) {
            if boundary.subject.assign[s] != xd {
                bail!(Precondition, "the boundary structure does not live on ∂x");
            }
        }
    }
    let bval = |d: &NormalForm, chi: &NormalForm| -> Result<CubeRef> {
        let s = pre[&cube.cell_of(d)];
        boundary.value(s, chi)
    };
    for (s, chi, v) in boundary.entries() {
        let d = &cube.monos[bd.assign[s].base];
        if p.apply(v) != over.value(top, &d.after(chi))? {
            bail!(Precondition, "the boundary structure does not lie over the base at x{s}({chi})");
        }
    }
    let oval = |phi: &NormalForm| over.value(top, phi);
    let (vals, approximations, report) = synthesize_cell(backend, b, x, &bval, &oval, cap)?;
    let e = backend.projection().domain.clone();
    let subject = cube.classify(&cube.complex, &e, x);
    let table = WcsTable::from_values(&subject, b, cap, |c, chi| {
        let (key_epi, alpha) = opcalc::split_degenerate_part(chi, Flavor::NONE);
        let d = &cube.monos[c];
        let v = if c == top {
            vals.get(&key_epi).cloned().ok_or_else(|| not_yet(format!("x({key_epi})")))?
        } else {
            bval(d, &key_epi)?
        };
        Ok(e.act_cell(v.base, &v.epi.after(&alpha)))
    })?;
    let problems = validate_wcs(&table);
    if !problems.is_empty() {
        bail!(Synthesis, "result is not a structure on x: {}", problems.join("; "));
    }
    let p = backend.projection();
    for m in 0..=cap {
        for phi in opcalc::all_maps(m, n, b) {
            if p.apply(&table.value(top, &phi)?) != over.value(top, &phi)? {
                bail!(Synthesis, "x({phi}) does not lie over p(x)({phi})");
            }
        }
    }
    for (tf, r) in &approximations.cubes {
        if p.apply(r) != over.value(top, &tf.to_normal_form())? {
            bail!(Synthesis, "approximation {tf} does not lie over p(x)");
        }
    }
    let problems = validate_approximation(&approximations, &table, false);
    if !problems.is_empty() {
        bail!(Synthesis, "invalid approximations: {}", problems.join("; "));
    }
    Ok(Synthesis { table, approximations, report })
}

type Values = HashMap<(CellId, NormalForm), CubeRef>;

/// `c(φ)` from stored values `c(χ)` on connection words, for any `B`-map `φ`.
fn lookup(src: &MCSet, tgt: &MCSet, vals: &Values, c: CellId, phi: &NormalForm) -> Result<CubeRef> {
    let (e, d) = phi.epi_mono();
    let r = src.act_cell(c, &d);
    let (chi, alpha) = opcalc::split_degenerate_part(&r.epi.after(&e), Flavor::NONE);
    let v = vals.get(&(r.base, chi.clone())).ok_or_else(|| not_yet(format!("x{}({chi})", r.base)))?;
    Ok(tgt.act_cell(v.base, &v.epi.after(&alpha)))
}

/// Runs the induction on each of `cells` of `src`, in order, storing the results in `vals`.
#[allow(clippy::too_many_arguments)]
fn extend_cells(
    backend: &mut dyn LiftingBackend,
    b: Flavor,
    src: &MCSet,
    cells: &[CellId],
    image: &dyn Fn(CellId) -> CubeRef,
    vals: &mut Values,
    base: &WcsTable,
    cap: usize,
    reports: &mut Vec<(CellId, SynthesisReport)>,
) -> Result<()> {
    for &c in cells {
        let x = image(c);
        let px = backend.projection().apply(&x);
        let tgt = backend.projection().domain.clone();
        let bval = |d: &NormalForm, chi: &NormalForm| lookup(src, &tgt, vals, c, &d.after(chi));
        let oval = |phi: &NormalForm| base.value_ref(&px, phi);
        let (top, _, report) = synthesize_cell(backend, b, &x, &bval, &oval, cap)
            .map_err(|e| Error::Synthesis(format!("cell {c}: {e}")))?;
        for (chi, v) in top {
            vals.insert((c, chi), v);
        }
        reports.push((c, report));
    }
    Ok(())
}

fn check_identity_on(t: &WcsTable, what: &str) -> Result<()> {
    let f = &t.subject;
    if *f.domain != *f.codomain || f.assign.iter().enumerate().any(|(c, r)| r.base != c || !r.epi.is_identity()) {
        bail!(Precondition, "{what} must be a structure on the complex itself");
    }
    Ok(())
}

/// The structure on `f: X → E` extended from `f∘j` along a cofibration `j: W → X`.
#[derive(Clone, Debug)]
pub struct Extension {
    pub table: WcsTable,
    pub reports: Vec<(CellId, SynthesisReport)>,
}

/// Extends a structure on `f∘j` to one on `f`, lying over the structure on the base of
/// the backend's projection.
pub fn extend_wcs(
    j: &MCMap,
    f: &MCMap,
    backend: &mut dyn LiftingBackend,
    gamma_fj: &WcsTable,
    gamma_base: &WcsTable,
    cap: usize,
) -> Result<Extension> {
    let g = backend.projection().clone();
    check_minimal(&f.domain)?;
    check_minimal(&g.domain)?;
    let b = gamma_base.b;
    if *j.codomain != *f.domain || *f.codomain != *g.domain {
        bail!(Precondition, "j, f and the backend's projection are not composable");
    }
    if !j.is_mono() {
        bail!(Precondition, "j must be a cofibration");
    }
    check_identity_on(gamma_base, "the base structure")?;
    if gamma_fj.b != b || gamma_fj.subject.assign != j.then(f)?.assign {
        bail!(Precondition, "the given structure does not live on f∘j");
    }
    if gamma_fj.cap() < cap {
        return Err(Error::Cap { dim: cap, cap: gamma_fj.cap() });
    }
    if gamma_base.cap() < cap + 1 {
        return Err(Error::Cap { dim: cap + 1, cap: gamma_base.cap() });
    }
    for (w, chi, v) in gamma_fj.entries() {
        let lhs = g.apply(v);
        let rhs = gamma_base.value_ref(&g.apply(&gamma_fj.subject.assign[w]), chi)?;
        if lhs != rhs {
            bail!(Precondition, "p(x{w}({chi})) = {lhs} but p(x{w})({chi}) = {rhs}");
        }
    }
    let x = &f.domain;
    let mut vals: Values = HashMap::new();
    for (w, chi, v) in gamma_fj.entries() {
        vals.insert((j.assign[w].base, chi.clone()), v.clone());
    }
    let image: BTreeSet<CellId> = j.image_cells().into_iter().collect();
    let mut todo: Vec<(usize, CellId)> = (0..x.len()).filter(|c| !image.contains(c)).map(|c| (x.dim(c), c)).collect();
    todo.sort();
    let todo: Vec<CellId> = todo.into_iter().map(|(_, c)| c).collect();
    let mut reports = Vec::new();
    extend_cells(backend, b, x, &todo, &|c| f.assign[c].clone(), &mut vals, gamma_base, cap, &mut reports)?;
    let e = backend.projection().domain.clone();
    let f_now = Map { domain: x.clone(), codomain: e.clone(), assign: f.assign.clone() };
    let table = WcsTable::from_values(&f_now, b, cap, |c, chi| lookup(x, &e, &vals, c, chi))?;
    let problems = validate_wcs(&table);
    if !problems.is_empty() {
        bail!(Synthesis, "extension is not a structure: {}", problems.join("; "));
    }
    for (w, chi, v) in gamma_fj.entries() {
        if table.value_ref(&j.assign[w], chi)? != *v {
            bail!(Synthesis, "extension does not restrict along j at x{w}({chi})");
        }
    }
    let p = backend.projection();
    for (c, chi, v) in table.entries() {
        if p.apply(v) != gamma_base.value_ref(&p.apply(&f.assign[c]), chi)? {
            bail!(Synthesis, "x{c}({chi}) does not lie over the base structure");
        }
    }
    Ok(Extension { table, reports })
}

#[derive(Clone, Debug)]
pub struct StageReport {
    pub stage: usize,
    /// Cells of dimension `stage` whose structure was synthesized.
    pub synthesized: Vec<CellId>,
    /// Cells adjoined to the support through the image of the structure.
    pub closure: Vec<CellId>,
    pub support: usize,
    pub reports: Vec<(CellId, SynthesisReport)>,
}

/// A strong structure on a subcomplex `Y′ ⊆ E` containing the original cells of `E`.
#[derive(Clone, Debug)]
pub struct ScsSynthesis {
    /// On the inclusion `Y′ → E`.
    pub table: WcsTable,
    /// The cells of `E` making up `Y′`.
    pub support: Vec<CellId>,
    pub stages: Vec<StageReport>,
}

impl ScsSynthesis {
    /// The same structure as one on `Y′` itself.
    pub fn on_support(&self) -> Result<WcsTable> {
        let sub = self.table.source().clone();
        let pre = self.table.subject.preimages();
        WcsTable::from_values(&Map::identity(&sub), self.table.b, self.table.cap(), |c, chi| {
            let v = self.table.value(c, chi)?;
            let base = *pre.get(&v.base).ok_or_else(|| Error::Synthesis(format!("x{c}({chi}) leaves the support")))?;
            Ok(Ref { epi: v.epi, base })
        })
    }
}

/// Extends a strong structure on a subcomplex `X ⊆ E` to one on a subcomplex of `E`
/// containing every cell `E` had on entry, lying over a strong structure on the base.
///
/// Works dimension by dimension over the original cells; cubes the backend adjoins along
/// the way enter the support only as values of the structure.
pub fn synthesize_scs(
    incl: &MCMap,
    backend: &mut dyn LiftingBackend,
    gamma_x: &WcsTable,
    gamma_base: &WcsTable,
    cap: usize,
) -> Result<ScsSynthesis> {
    let p0 = backend.projection().clone();
    let e0 = p0.domain.clone();
    check_minimal(&e0)?;
    let b = gamma_base.b;
    if *incl.codomain != *e0 || !incl.is_mono() {
        bail!(Precondition, "X must be a subcomplex of the backend's total complex");
    }
    check_identity_on(gamma_x, "the structure on X")?;
    check_identity_on(gamma_base, "the base structure")?;
    if **gamma_x.source() != *incl.domain || gamma_x.b != b {
        bail!(Precondition, "the structure on X does not match the inclusion");
    }
    if gamma_x.cap() < cap {
        return Err(Error::Cap { dim: cap, cap: gamma_x.cap() });
    }
    if gamma_base.cap() < cap + 1 {
        return Err(Error::Cap { dim: cap + 1, cap: gamma_base.cap() });
    }
    for (t, what) in [(gamma_x, "X"), (gamma_base, "the base")] {
        if let Some(v) = check_scs(t, cap)?.violation {
            bail!(Precondition, "the structure on {what} is not strong: {v}");
        }
    }
    for (x, chi, v) in gamma_x.entries() {
        let lhs = p0.apply(&incl.apply(v));
        let rhs = gamma_base.value_ref(&p0.apply(&incl.assign[x]), chi)?;
        if lhs != rhs {
            bail!(Precondition, "p(x{x}({chi})) = {lhs} but p(x{x})({chi}) = {rhs}");
        }
    }
    let mut vals: Values = HashMap::new();
    for (x, chi, v) in gamma_x.entries() {
        vals.insert((incl.assign[x].base, chi.clone()), incl.apply(v));
    }
    let mut support: BTreeSet<CellId> = incl.image_cells().into_iter().collect();
    let original = e0.len();
    let top = (0..original).map(|c| e0.dim(c)).max().unwrap_or(0);
    if top > cap {
        bail!(Synthesis, "stage {top}: cells of dimension {top} exceed the cap {cap}");
    }
    let mut stages = Vec::new();
    for n in 0..=top {
        let fresh: Vec<CellId> = (0..original).filter(|&c| e0.dim(c) == n && !support.contains(&c)).collect();
        let mut reports = Vec::new();
        let e_now = backend.projection().domain.clone();
        extend_cells(backend, b, &e_now, &fresh, &|c| e_now.id_ref(c), &mut vals, gamma_base, cap, &mut reports)
            .map_err(|e| Error::Synthesis(format!("stage {n}: {e}")))?;
        let e = backend.projection().domain.clone();
        let mut w: BTreeSet<CellId> = support.clone();
        w.extend(fresh.iter().copied());
        // the image of the structure on W, closed under faces
        let mut closure: BTreeSet<CellId> = BTreeSet::new();
        let mut stack: Vec<CellId> = fresh
            .iter()
            .flat_map(|&c| vals.iter().filter(move |((d, _), _)| *d == c).map(|(_, v)| v.base))
            .collect();
        while let Some(c) = stack.pop() {
            if w.contains(&c) || !closure.insert(c) {
                continue;
            }
            stack.extend(e.cell(c).faces.iter().map(|r| r.base));
        }
        let wcells: Vec<(CellId, usize)> = w.iter().map(|&c| (c, e.dim(c))).collect();
        let mut added: Vec<(usize, CellId)> = closure.iter().map(|&c| (e.dim(c), c)).collect();
        added.sort();
        for &(d, y) in &added {
            let value = |c: CellId, phi: &NormalForm| lookup(&e, &e, &vals, c, phi);
            let dec = decompose(&e.id_ref(y), d, &wcells, &|c| e.id_ref(c), &value, b)?
                .ok_or_else(|| Error::Synthesis(format!("stage {n}: cell {y} is not a value of the structure")))?;
            let mut new = Vec::new();
            for s in d..=cap {
                for chi in connection_words(s, d, b) {
                    new.push((chi.clone(), value(dec.base, &dec.epi.after(&chi))?));
                }
            }
            for (chi, v) in new {
                vals.insert((y, chi), v);
            }
        }
        support = w;
        support.extend(closure.iter().copied());
        if let Some(c) = (0..original).find(|&c| e0.dim(c) <= n && !support.contains(&c)) {
            bail!(Synthesis, "stage {n}: cell {c} was not reached");
        }
        stages.push(StageReport {
            stage: n,
            synthesized: fresh,
            closure: added.into_iter().map(|(_, c)| c).collect(),
            support: support.len(),
            reports,
        });
    }
    let e = backend.projection().domain.clone();
    let cells: Vec<CellId> = support.iter().copied().collect();
    let (_, inc) = e.subcomplex(&cells);
    let table = WcsTable::from_values(&inc, b, cap, |c, chi| lookup(&e, &e, &vals, inc.assign[c].base, chi))?;
    let problems = validate_wcs(&table);
    if !problems.is_empty() {
        bail!(Synthesis, "stage {top}: result is not a structure: {}", problems.join("; "));
    }
    if let Some(v) = check_scs(&table, cap)?.violation {
        bail!(Synthesis, "stage {top}: result is not strong: {v}");
    }
    let p = backend.projection();
    for (c, chi, v) in table.entries() {
        if p.apply(v) != gamma_base.value_ref(&p.apply(&inc.assign[c]), chi)? {
            bail!(Synthesis, "x{c}({chi}) does not lie over the base structure");
        }
    }
    Ok(ScsSynthesis { table, support: cells, stages })
}
