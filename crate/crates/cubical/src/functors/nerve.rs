//! Nerves along a cocubical object `R: □ → C`: the cubical set whose `n`-cubes are the
//! maps `R_n → Y`. Used for both `i_*` and the cubification of simplicial sets.

use std::collections::HashMap;
use std::sync::Arc;

use crate::complex::search::MapSearch;
use crate::complex::{Cell, CellId, Complex, CubeRef, MCSet, Map, Ref, Regime, Shape};
use crate::error::{bail, Result};
use crate::opcalc::{self, Flavor, NormalForm};

pub struct Nerve<T: Shape> {
    pub object: Arc<MCSet>,
    /// The map `R_n → Y` of each non-degenerate cube, as an assignment.
    pub cubes: Vec<Vec<Ref<T::Op>>>,
    /// Every cube (degenerate or not) by assignment, with its normal form.
    pub all: Vec<HashMap<Vec<Ref<T::Op>>, CubeRef>>,
}

impl<T: Shape> Nerve<T> {
    /// The cube named by a map `R_n → Y`, if `n` is within range.
    pub fn cube_of(&self, u: &[Ref<T::Op>], n: usize) -> Option<CubeRef> {
        self.all.get(n)?.get(u).cloned()
    }
}

/// `u ∘ h` for `u: R_n → Y` given as an assignment and `h: R_m → R_n`.
pub(crate) fn precompose<T: Shape>(u: &[Ref<T::Op>], h: &Map<T>, y: &Complex<T>) -> Vec<Ref<T::Op>> {
    h.assign
        .iter()
        .map(|r| {
            let img = &u[r.base];
            y.act_cell(img.base, &T::compose(&img.epi, &r.epi))
        })
        .collect()
}

/// The nerve of `y` along `reps[n] = R_n` and `rep_map(φ) = R(φ)`, up to dimension `top`.
/// `marked(n, u)` decides the marking of a non-degenerate cube.
pub(crate) fn build_nerve<T: Shape>(
    flavor: Flavor,
    regime: Regime,
    top: usize,
    reps: &[Arc<Complex<T>>],
    rep_map: &dyn Fn(&NormalForm) -> Map<T>,
    y: &Arc<Complex<T>>,
    marked: &dyn Fn(usize, &[Ref<T::Op>]) -> bool,
) -> Result<Nerve<T>> {
    if reps.len() <= top {
        bail!(Precondition, "need representing objects up to dimension {top}");
    }
    let mut obj: MCSet = Complex::new(flavor, regime);
    let mut cubes = Vec::new();
    let mut all: Vec<HashMap<Vec<Ref<T::Op>>, CubeRef>> = Vec::new();
    for n in 0..=top {
        let search = MapSearch::new(&reps[n], y);
        let maps: Vec<Vec<Ref<T::Op>>> = search
            .run(&|_, _, _| true, None)
            .into_iter()
            .map(|a| a.iter().map(|&k| search.index.refs[k].clone()).collect())
            .collect();
        let gens: Vec<(NormalForm, Map<T>, Map<T>)> = if n == 0 {
            Vec::new()
        } else {
            opcalc::epi_generators(n - 1, flavor)
                .into_iter()
                .map(|(e, s)| {
                    let (re, rs) = (rep_map(&e), rep_map(&s));
                    (e, re, rs)
                })
                .collect()
        };
        let faces: Vec<Map<T>> = (0..2 * n).map(|slot| rep_map(&<Flavor as Shape>::face_op(n, slot))).collect();
        let mut level = HashMap::new();
        for u in maps {
            let mut degenerate = None;
            for (e, re, rs) in &gens {
                let v = precompose(&u, rs, y);
                if precompose(&v, re, y) == u {
                    let r = &all[n - 1][&v];
                    degenerate = Some(Ref { epi: r.epi.after(e), base: r.base });
                    break;
                }
            }
            let r = match degenerate {
                Some(r) => r,
                None => {
                    let fs = faces.iter().map(|d| all[n - 1][&precompose(&u, d, y)].clone()).collect();
                    let m = regime.allows(n) && marked(n, &u);
                    let id: CellId = obj.push_cell(Cell { dim: n, faces: fs, marked: m });
                    cubes.push(u.clone());
                    obj.id_ref(id)
                }
            };
            level.insert(u, r);
        }
        all.push(level);
    }
    Ok(Nerve { object: Arc::new(obj), cubes, all })
}
