//! Lifting problems against the comical generating families, decided by exhaustive
//! search, and a free-filling harness that adjoins missing fillers by pushout.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::complex::catalog::{self, point};
use crate::complex::search::{MapSearch, UNSET};
use crate::complex::{enumerate_maps, pushout, CellId, CubeRef, MCMap, MCSet, Map, Ref};
use crate::error::{bail, Result};
use crate::opcalc::{Flavor, NormalForm, Sign};

/// A commutative square `p∘u = v∘g` awaiting a diagonal `h: T → E`.
#[derive(Clone, Debug)]
pub struct LiftProblem {
    pub g: MCMap,
    pub u: MCMap,
    pub v: MCMap,
    pub p: MCMap,
}

impl LiftProblem {
    pub fn new(g: MCMap, u: MCMap, v: MCMap, p: MCMap) -> Result<LiftProblem> {
        let lhs = g.then(&v)?;
        let rhs = u.then(&p)?;
        if lhs.assign != rhs.assign {
            bail!(Precondition, "the square does not commute");
        }
        Ok(LiftProblem { g, u, v, p })
    }

    /// Whether `h` is a diagonal filler: `h∘g = u` and `p∘h = v`.
    pub fn is_solution(&self, h: &MCMap) -> bool {
        h.is_valid()
            && self.g.then(h).is_ok_and(|m| m.assign == self.u.assign)
            && h.then(&self.p).is_ok_and(|m| m.assign == self.v.assign)
    }

    /// The first filler in canonical order, if any.
    pub fn solve(&self) -> Option<MCMap> {
        let p = &self.p;
        let v = &self.v;
        extensions(&self.g, &self.u.assign, &self.u.codomain, &|t, r| p.apply(r) == v.assign[t], Some(1))
            .into_iter()
            .next()
    }
}

/// Maps `h: T → Z` with `h∘g = along` (an assignment on the cells of `S`) accepted by
/// `extra`, in canonical order.
pub fn extensions(
    g: &MCMap,
    along: &[CubeRef],
    z: &Arc<MCSet>,
    extra: &dyn Fn(CellId, &CubeRef) -> bool,
    limit: Option<usize>,
) -> Vec<MCMap> {
    let t = &g.codomain;
    let search = MapSearch::new(t, z);
    let mut partial = vec![UNSET; t.len()];
    // constraints on cells hit degenerately
    let mut through: HashMap<CellId, Vec<(NormalForm, CubeRef)>> = HashMap::new();
    for (s, r) in g.assign.iter().enumerate() {
        if r.epi.is_identity() {
            let Some(k) = search.index.lookup(&along[s]) else {
                return Vec::new();
            };
            if partial[r.base] != UNSET && partial[r.base] != k {
                return Vec::new();
            }
            partial[r.base] = k;
        } else {
            through.entry(r.base).or_default().push((r.epi.clone(), along[s].clone()));
        }
    }
    let filter = |c: CellId, r: &CubeRef, _: &[usize]| {
        extra(c, r)
            && through
                .get(&c)
                .is_none_or(|cs| cs.iter().all(|(e, want)| z.act_cell(r.base, &r.epi.after(e)) == *want))
    };
    search
        .run_from(partial, &filter, limit)
        .iter()
        .map(|a| search.to_map(a, t, z))
        .collect()
}

/// Outcome of a right-lifting-property check.
#[derive(Clone, Debug)]
pub enum Verdict {
    Holds,
    /// A square with no diagonal filler.
    Fails(Box<LiftProblem>),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

/// Every commutative square from `g` to `p`, in canonical order.
pub fn squares(g: &MCMap, p: &MCMap) -> Vec<(MCMap, MCMap)> {
    let mut out = Vec::new();
    for u in enumerate_maps(&g.domain, &p.domain) {
        let along: Vec<CubeRef> = u.assign.iter().map(|r| p.apply(r)).collect();
        for v in extensions(g, &along, &p.codomain, &|_, _| true, None) {
            out.push((u.clone(), v));
        }
    }
    out
}

/// Whether `p` has the right lifting property against `g`, with a failing square otherwise.
pub fn has_rlp(p: &MCMap, g: &MCMap) -> Verdict {
    for u in enumerate_maps(&g.domain, &p.domain) {
        let along: Vec<CubeRef> = u.assign.iter().map(|r| p.apply(r)).collect();
        for v in extensions(g, &along, &p.codomain, &|_, _| true, None) {
            let problem = LiftProblem { g: g.clone(), u: u.clone(), v, p: p.clone() };
            if problem.solve().is_none() {
                return Verdict::Fails(Box::new(problem));
            }
        }
    }
    Verdict::Holds
}

/// Something that can answer lifting problems.
pub trait FillerOracle {
    fn lift(&self, problem: &LiftProblem) -> Option<MCMap>;
}

/// Answers by exhaustive search against a fixed map.
pub struct BruteLiftOracle {
    pub p: MCMap,
}

pub fn brute_lift_oracle(p: &MCMap) -> BruteLiftOracle {
    BruteLiftOracle { p: p.clone() }
}

impl FillerOracle for BruteLiftOracle {
    fn lift(&self, problem: &LiftProblem) -> Option<MCMap> {
        if *problem.p.domain != *self.p.domain || problem.p.assign != self.p.assign {
            return None;
        }
        problem.solve()
    }
}

/// The unique map to the terminal complex.
pub fn terminal_map(x: &Arc<MCSet>) -> MCMap {
    let pt = point(x.shape, x.regime);
    let assign = (0..x.len())
        .map(|c| {
            let d = x.dim(c);
            let epi = NormalForm::from_parts(d, vec![], vec![], (1..=d).collect()).expect("collapse");
            Ref { epi, base: 0 }
        })
        .collect();
    Map { domain: x.clone(), codomain: pt, assign }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Family {
    OpenBox,
    MarkingExtension,
    Rezk,
    Marker,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::OpenBox => "comical-box",
            Family::MarkingExtension => "marking-extension",
            Family::Rezk => "rezk",
            Family::Marker => "marker",
        })
    }
}

/// A member of a generating family.
#[derive(Clone, Debug)]
pub struct Generator {
    pub family: Family,
    pub dim: usize,
    pub label: String,
    pub map: MCMap,
}

#[derive(Clone, Copy, Debug)]
pub struct FamilyOptions {
    pub dim_cap: usize,
    pub saturated: bool,
    pub n_trivial: Option<usize>,
}

impl FamilyOptions {
    pub fn comical(dim_cap: usize) -> FamilyOptions {
        FamilyOptions { dim_cap, saturated: false, n_trivial: None }
    }
}

/// The requested generating maps up to the dimension cap, ordered by (dimension, family).
pub fn generators(flavor: Flavor, opts: &FamilyOptions) -> Result<Vec<Generator>> {
    let mut out = Vec::new();
    for n in 1..=opts.dim_cap {
        for i in 1..=n {
            for e in [0 as Sign, 1] {
                out.push(Generator {
                    family: Family::OpenBox,
                    dim: n,
                    label: format!("comical-box n={n} i={i} e={e}"),
                    map: catalog::comical_open_box_inclusion(n, i, e, flavor)?,
                });
                if n >= 2 {
                    out.push(Generator {
                        family: Family::MarkingExtension,
                        dim: n,
                        label: format!("marking-extension n={n} i={i} e={e}"),
                        map: catalog::comical_marking_extension(n, i, e, flavor)?,
                    });
                }
            }
        }
        if opts.saturated && n >= 2 {
            for m in 0..=n - 2 {
                let k = n - 2 - m;
                out.push(Generator {
                    family: Family::Rezk,
                    dim: n,
                    label: format!("rezk m={m} n={k}"),
                    map: catalog::rezk_map(m, k, flavor)?,
                });
            }
        }
        if opts.n_trivial.is_some_and(|t| n > t) {
            out.push(Generator { family: Family::Marker, dim: n, label: format!("marker n={n}"), map: catalog::marker(n, flavor)? });
        }
    }
    out.sort_by_key(|g| (g.dim, g.family));
    Ok(out)
}

/// A dimension-capped comicality verdict.
#[derive(Clone, Debug)]
pub struct ComicalVerdict {
    pub dim_cap: usize,
    pub failure: Option<(String, Box<LiftProblem>)>,
}

impl ComicalVerdict {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks `X → □^0` against the requested families up to the cap.
pub fn is_comical_set(x: &Arc<MCSet>, opts: &FamilyOptions) -> Result<ComicalVerdict> {
    if opts.dim_cap == 0 {
        bail!(Precondition, "dimension cap must be at least 1");
    }
    let p = terminal_map(x);
    for g in generators(x.shape, opts)? {
        if let Verdict::Fails(problem) = has_rlp(&p, &g.map) {
            return Ok(ComicalVerdict { dim_cap: opts.dim_cap, failure: Some((g.label, problem)) });
        }
    }
    Ok(ComicalVerdict { dim_cap: opts.dim_cap, failure: None })
}

#[derive(Clone, Debug)]
pub struct FillRecord {
    pub label: String,
    pub filler: CubeRef,
    /// The inclusion of the previous stage into the new one.
    pub step: MCMap,
    /// The diagonal `T → new stage` solving the square.
    pub lift: MCMap,
}

/// A complex over a fixed base, grown by pushouts of generators.
#[derive(Clone, Debug)]
pub struct FreeFillingComplex {
    pub source: Arc<MCSet>,
    pub complex: Arc<MCSet>,
    pub projection: MCMap,
    /// `source → complex`.
    pub inclusion: MCMap,
    pub log: Vec<FillRecord>,
}

impl FreeFillingComplex {
    pub fn new(p: &MCMap) -> FreeFillingComplex {
        FreeFillingComplex {
            source: p.domain.clone(),
            complex: p.domain.clone(),
            projection: p.clone(),
            inclusion: Map::identity(&p.domain),
            log: Vec::new(),
        }
    }

    pub fn over_point(x: &Arc<MCSet>) -> FreeFillingComplex {
        FreeFillingComplex::new(&terminal_map(x))
    }

    pub fn base(&self) -> &Arc<MCSet> {
        &self.projection.codomain
    }

    /// Adjoins a filler for the square `(u, v)` from `gen`, returning the image of the
    /// generator's new interior (or of its newly marked cube, for entire generators).
    pub fn free_fill(&mut self, gen: &Generator, u: &MCMap, v: &MCMap) -> Result<CubeRef> {
        if *u.codomain != *self.complex || *v.codomain != **self.base() {
            bail!(Precondition, "square does not land in the current stage");
        }
        let g = &gen.map;
        let problem = LiftProblem::new(g.clone(), u.clone(), v.clone(), self.projection.clone())?;
        let po = pushout(&problem.u, g)?;
        let projection = po.induced(&self.projection, v)?;
        let t = &g.codomain;
        let image = g.image_cells();
        let fresh = (0..t.len()).rev().find(|c| !image.contains(c));
        let newly_marked = || {
            let pre = g.preimages();
            (0..t.len()).rev().find(|&c| t.cell(c).marked && pre.get(&c).is_none_or(|&s| !g.domain.cell(s).marked))
        };
        let Some(top) = fresh.or_else(newly_marked) else {
            bail!(Precondition, "{} adds nothing", gen.label);
        };
        let filler = po.in_b.assign[top].clone();
        self.inclusion = self.inclusion.then(&po.in_x)?;
        self.complex = po.object.clone();
        self.projection = projection;
        self.log.push(FillRecord { label: gen.label.clone(), filler: filler.clone(), step: po.in_x, lift: po.in_b });
        Ok(filler)
    }
}

#[derive(Clone, Debug)]
pub struct ApproxReport {
    pub rounds: usize,
    pub fillers: usize,
    /// Whether the last round found nothing to fill.
    pub saturated: bool,
}

/// Runs up to `rounds` rounds of filling every unsolvable generator square, searching for
/// an existing filler first. Stops early once a round adjoins nothing.
pub fn approximate(h: &mut FreeFillingComplex, opts: &FamilyOptions, rounds: usize) -> Result<ApproxReport> {
    let gens = generators(h.complex.shape, opts)?;
    let mut report = ApproxReport { rounds: 0, fillers: 0, saturated: false };
    for _ in 0..rounds {
        report.rounds += 1;
        let mut added = 0;
        for g in &gens {
            let snapshot = h.log.len();
            let problems = squares(&g.map, &h.projection);
            for (u, v) in problems {
                let mut u = u;
                for rec in &h.log[snapshot..] {
                    u = u.then(&rec.step)?;
                }
                let problem = LiftProblem { g: g.map.clone(), u: u.clone(), v: v.clone(), p: h.projection.clone() };
                if problem.solve().is_some() {
                    continue;
                }
                h.free_fill(g, &u, &v)?;
                added += 1;
            }
        }
        report.fillers += added;
        if added == 0 {
            report.saturated = true;
            break;
        }
    }
    Ok(report)
}

/// Free filling of `X` over the point: a bounded piece of the small object argument.
pub fn bounded_fibrant_approx(x: &Arc<MCSet>, opts: &FamilyOptions, rounds: usize) -> Result<(FreeFillingComplex, ApproxReport)> {
    let mut h = FreeFillingComplex::over_point(x);
    let report = approximate(&mut h, opts, rounds)?;
    Ok((h, report))
}
