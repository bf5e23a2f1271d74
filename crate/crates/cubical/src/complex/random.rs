//! Random finite complexes for property suites, built by attaching cells along
//! random boundary maps.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::opcalc::{Flavor, NormalForm};

use super::catalog::{boundary_inclusion, Cube};
use super::search::MapSearch;
use super::{Complex, MCSet, Ref, Regime};

#[derive(Clone, Copy, Debug)]
pub struct RandomSpec {
    pub flavor: Flavor,
    pub regime: Regime,
    pub max_dim: usize,
    /// Attachment attempts after the first vertex.
    pub steps: usize,
    pub mark_prob: f64,
}

impl RandomSpec {
    pub fn new(flavor: Flavor, max_dim: usize, steps: usize) -> RandomSpec {
        RandomSpec { flavor, regime: Regime::Full, max_dim, steps, mark_prob: 0.3 }
    }
}

pub fn random_complex<R: Rng>(rng: &mut R, spec: &RandomSpec) -> Arc<MCSet> {
    let mut x: MCSet = Complex::new(spec.flavor, spec.regime);
    x.add_cell(0, vec![], false).unwrap();
    for _ in 0..spec.steps {
        let d = rng.gen_range(0..=spec.max_dim);
        if d == 0 {
            x.add_cell(0, vec![], false).unwrap();
            continue;
        }
        attach_random(rng, &mut x, d, spec.mark_prob);
    }
    Arc::new(x)
}

/// Attaches one `d`-cell along a random map `∂□^d → X`; returns false if none exists.
pub fn attach_random<R: Rng>(rng: &mut R, x: &mut MCSet, d: usize, mark_prob: f64) -> bool {
    let inc = boundary_inclusion(d, x.shape);
    let bd = &inc.domain;
    let search = MapSearch::new(bd, x);
    let found = search.run(&|_, _, _| true, Some(400));
    // Prefer boundaries that are not entirely degenerate.
    let lively: Vec<&Vec<usize>> = found
        .iter()
        .filter(|a| a.iter().any(|&k| NormalForm::is_identity(&search.index.refs[k].epi) && search.index.dims[k] > 0))
        .collect();
    let pool: Vec<&Vec<usize>> = if lively.is_empty() || d == 1 { found.iter().collect() } else { lively };
    let Some(choice) = pool.choose(rng) else {
        return false;
    };
    let cube = Cube::standard(d, x.shape);
    let pre = inc.preimages();
    let faces: Vec<Ref<NormalForm>> = (1..=d)
        .flat_map(|i| [(i, 0u8), (i, 1u8)])
        .map(|(i, e)| {
            let cell = cube.cell_of(&NormalForm::face(d, i, e));
            search.index.refs[choice[pre[&cell]]].clone()
        })
        .collect();
    let marked = x.regime.allows(d) && rng.gen_bool(mark_prob);
    x.add_cell(d, faces, marked).is_ok()
}
