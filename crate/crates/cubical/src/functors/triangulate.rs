//! Triangulation `T: cSet → sSet` and its right adjoint, the cubical nerve `U`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::complex::catalog::Cube;
use crate::complex::{Cell, CellId, Complex, CubeRef, MCMap, MCSet, MSMap, MSSet, Map, Ref, Regime, Simplicial, SimplexRef};
use crate::error::{bail, Result};
use crate::opcalc::{Flavor, NormalForm};
use crate::simplex::SimplexOp;

use super::nerve::{build_nerve, Nerve};

/// `TX`. Each simplex is a pair `(x, φ)` with `x` an `n`-cell and `φ: {1..n} → {1..r}`
/// surjective, standing for the chain `v_p = {i : φ(i) ≤ p}` through the interior of `x`.
#[derive(Clone, Debug)]
pub struct Triangulation {
    pub source: Arc<MCSet>,
    pub object: Arc<MSSet>,
    pub cells: Vec<(CellId, Vec<usize>)>,
    lookup: HashMap<(CellId, Vec<usize>), CellId>,
}

fn surjections(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![1; n];
    if n == 0 {
        if r == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    if r == 0 {
        return out;
    }
    loop {
        let mut hit = vec![false; r + 1];
        cur.iter().for_each(|&v| hit[v] = true);
        if hit[1..].iter().all(|&h| h) {
            out.push(cur.clone());
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < r {
                cur[k] += 1;
                break;
            }
            cur[k] = 1;
        }
    }
}

fn chain(phi: &[usize], r: usize) -> Vec<u32> {
    (0..=r)
        .map(|p| phi.iter().enumerate().filter(|(_, &v)| v <= p).map(|(i, _)| 1u32 << i).sum())
        .collect()
}

/// Whether `φ` admits `i_1 < … < i_r` with `φ(i_p) = p`.
fn has_increasing_section(phi: &[usize], r: usize) -> bool {
    let mut p = 1;
    for &v in phi {
        if p <= r && v == p {
            p += 1;
        }
    }
    p > r
}

fn bit(x: u32, i: usize) -> u32 {
    (x >> (i - 1)) & 1
}

impl Triangulation {
    pub fn cell_of(&self, x: CellId, phi: &[usize]) -> Option<CellId> {
        self.lookup.get(&(x, phi.to_vec())).copied()
    }

    /// The simplex spanned by a chain of vertices `p_0 ≤ … ≤ p_k` of the cube `cube`.
    pub fn simplex_of_chain(&self, cube: &CubeRef, points: &[u32]) -> SimplexRef {
        let pts: Vec<u32> = points.iter().map(|&p| cube.epi.eval(p)).collect();
        self.resolve(cube.base, pts)
    }

    fn resolve(&self, c: CellId, pts: Vec<u32>) -> SimplexRef {
        let x = &self.source;
        let n = x.dim(c);
        let (lo, hi) = (pts[0], *pts.last().unwrap());
        let fixed: Vec<usize> = (1..=n).filter(|&i| bit(lo, i) == bit(hi, i)).collect();
        if !fixed.is_empty() {
            let faces: Vec<(usize, u8)> = fixed.iter().rev().map(|&i| (i, bit(lo, i) as u8)).collect();
            let delta = NormalForm::from_parts(n - fixed.len(), faces, vec![], vec![]).expect("face of a cube");
            let r = x.act_cell(c, &delta);
            let free: Vec<usize> = (1..=n).filter(|i| !fixed.contains(i)).collect();
            let projected = pts
                .iter()
                .map(|&p| {
                    let q = free.iter().enumerate().map(|(k, &i)| bit(p, i) << k).sum();
                    r.epi.eval(q)
                })
                .collect();
            return self.resolve(r.base, projected);
        }
        let mut distinct = pts.clone();
        distinct.dedup();
        let phi: Vec<usize> = (1..=n)
            .map(|i| distinct.iter().position(|&p| bit(p, i) == 1).unwrap())
            .collect();
        let values = pts.iter().map(|p| distinct.iter().position(|q| q == p).unwrap()).collect();
        let epi = SimplexOp::new(distinct.len() - 1, values).expect("monotone chain");
        Ref { epi, base: self.lookup[&(c, phi)] }
    }
}

fn simplex_marked(x: &MCSet, c: CellId, phi: &[usize], r: usize) -> bool {
    let n = phi.len();
    match x.regime {
        Regime::Unmarked => false,
        Regime::Edge => r == 1 && n == 1 && x.cell(c).marked,
        Regime::Full => {
            r >= 1 && (!has_increasing_section(phi, r) || (n == r && x.cell(c).marked && phi.iter().enumerate().all(|(k, &v)| v == k + 1)))
        }
    }
}

pub fn triangulate(x: &Arc<MCSet>) -> Result<Triangulation> {
    let mut order: Vec<(usize, CellId, Vec<usize>)> = Vec::new();
    for c in 0..x.len() {
        let n = x.dim(c);
        if n >= 32 {
            bail!(Dimension, "cell of dimension {n} is too large to triangulate");
        }
        for r in 0..=n {
            for phi in surjections(n, r) {
                order.push((r, c, phi));
            }
        }
    }
    order.sort();
    let mut out = Triangulation {
        source: x.clone(),
        object: Arc::new(Complex::new(Simplicial, x.regime)),
        cells: Vec::new(),
        lookup: HashMap::new(),
    };
    let mut obj: MSSet = Complex::new(Simplicial, x.regime);
    for (r, c, phi) in order {
        let ch = chain(&phi, r);
        let faces = if r == 0 {
            Vec::new()
        } else {
            (0..=r)
                .map(|j| {
                    let mut sub = ch.clone();
                    sub.remove(j);
                    out.simplex_of_chain(&x.id_ref(c), &sub)
                })
                .collect()
        };
        let marked = simplex_marked(x, c, &phi, r);
        let id = obj.push_cell(Cell { dim: r, faces, marked });
        out.lookup.insert((c, phi.clone()), id);
        out.cells.push((c, phi));
    }
    out.object = Arc::new(obj);
    Ok(out)
}

/// `Tf` between the triangulations of its domain and codomain.
pub fn triangulate_map(f: &MCMap, dom: &Triangulation, cod: &Triangulation) -> MSMap {
    let assign = dom
        .cells
        .iter()
        .map(|(c, phi)| cod.simplex_of_chain(&f.assign[*c], &chain(phi, phi.iter().copied().max().unwrap_or(0))))
        .collect();
    Map { domain: dom.object.clone(), codomain: cod.object.clone(), assign }
}

/// Triangulated cubes `T□^n` for `n ≤ top`, with the maps `Tφ`.
pub struct TriangulatedCubes {
    pub cubes: Vec<Cube>,
    pub triangulations: Vec<Triangulation>,
}

impl TriangulatedCubes {
    pub fn new(flavor: Flavor, regime: Regime, top: usize) -> Result<TriangulatedCubes> {
        let cubes: Vec<Cube> = (0..=top).map(|n| Cube::in_regime(n, flavor, regime)).collect();
        let triangulations = cubes.iter().map(|c| triangulate(&c.complex)).collect::<Result<Vec<_>>>()?;
        Ok(TriangulatedCubes { cubes, triangulations })
    }

    pub fn map(&self, phi: &NormalForm) -> MSMap {
        let (m, n) = (phi.source(), phi.target());
        let cod = &self.cubes[n];
        let r = cod.complex.act_cell(cod.top(), phi);
        let f = self.cubes[m].classify(&self.cubes[m].complex, &cod.complex, &r);
        triangulate_map(&f, &self.triangulations[m], &self.triangulations[n])
    }

    /// The interior simplex `ι_n` of `T□^n`.
    pub fn interior(&self, n: usize) -> CellId {
        let phi: Vec<usize> = (1..=n).collect();
        self.triangulations[n].cell_of(self.cubes[n].top(), &phi).unwrap()
    }
}

/// `US` up to dimension `top`: cubes are maps `T□^n → S`.
pub struct Cubified {
    pub nerve: Nerve<Simplicial>,
    pub reps: TriangulatedCubes,
}

impl Cubified {
    pub fn object(&self) -> &Arc<MCSet> {
        &self.nerve.object
    }
}

pub fn cubify(s: &Arc<MSSet>, flavor: Flavor, top: usize) -> Result<Cubified> {
    let reps = TriangulatedCubes::new(flavor, s.regime, top)?;
    let objects: Vec<Arc<MSSet>> = reps.triangulations.iter().map(|t| t.object.clone()).collect();
    let interiors: Vec<CellId> = (0..=top).map(|n| reps.interior(n)).collect();
    let nerve = build_nerve(
        flavor,
        s.regime,
        top,
        &objects,
        &|phi| reps.map(phi),
        s,
        &|n, u| n >= 1 && s.is_marked(&u[interiors[n]]),
    )?;
    Ok(Cubified { nerve, reps })
}
