//! Simplicial operators: order-preserving maps `[q] → [r]`.

use std::fmt;

use crate::error::{bail, Result};

/// An order-preserving map `[source] → [target]`, stored as its values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SimplexOp {
    target: usize,
    values: Vec<usize>,
}

impl SimplexOp {
    pub fn new(target: usize, values: Vec<usize>) -> Result<SimplexOp> {
        if values.is_empty() {
            bail!(InvalidWord, "simplicial operator with empty domain");
        }
        if values.windows(2).any(|w| w[0] > w[1]) || values.iter().any(|&v| v > target) {
            bail!(InvalidWord, "{values:?} is not an order-preserving map into [{target}]");
        }
        Ok(SimplexOp { target, values })
    }

    pub fn identity(n: usize) -> SimplexOp {
        SimplexOp { target: n, values: (0..=n).collect() }
    }

    /// `d_i: [n-1] → [n]`, skipping `i`.
    pub fn face(n: usize, i: usize) -> SimplexOp {
        assert!(n >= 1 && i <= n);
        SimplexOp { target: n, values: (0..=n).filter(|&v| v != i).collect() }
    }

    /// `s_i: [n+1] → [n]`, hitting `i` twice.
    pub fn degen(n: usize, i: usize) -> SimplexOp {
        assert!(i <= n);
        let values = (0..=n + 1).map(|v| if v <= i { v } else { v - 1 }).collect();
        SimplexOp { target: n, values }
    }

    pub fn source(&self) -> usize {
        self.values.len() - 1
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn at(&self, k: usize) -> usize {
        self.values[k]
    }

    pub fn is_identity(&self) -> bool {
        self.source() == self.target && self.values.iter().enumerate().all(|(k, &v)| k == v)
    }

    pub fn is_epi(&self) -> bool {
        self.values[0] == 0
            && *self.values.last().unwrap() == self.target
            && self.values.windows(2).all(|w| w[1] <= w[0] + 1)
    }

    pub fn is_mono(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &SimplexOp) -> Result<SimplexOp> {
        if f.target != self.source() {
            bail!(Dimension, "cannot compose {self} after {f}");
        }
        Ok(SimplexOp { target: self.target, values: f.values.iter().map(|&v| self.values[v]).collect() })
    }

    pub fn after(&self, f: &SimplexOp) -> SimplexOp {
        self.compose(f).expect("composable")
    }

    /// `(epi, mono)` with `mono ∘ epi = self`.
    pub fn epi_mono(&self) -> (SimplexOp, SimplexOp) {
        let mut image: Vec<usize> = self.values.clone();
        image.dedup();
        let epi_values = self
            .values
            .iter()
            .map(|v| image.iter().position(|w| w == v).unwrap())
            .collect();
        let epi = SimplexOp { target: image.len() - 1, values: epi_values };
        let mono = SimplexOp { target: self.target, values: image };
        (epi, mono)
    }

    /// Splits a mono as `d_i ∘ rest` with `i` the largest missing value.
    pub fn split_first_face(&self) -> Option<(usize, SimplexOp)> {
        debug_assert!(self.is_mono());
        let i = (0..=self.target).rev().find(|v| !self.values.contains(v))?;
        let values = self.values.iter().map(|&v| if v > i { v - 1 } else { v }).collect();
        Some((i, SimplexOp { target: self.target - 1, values }))
    }

    /// All surjections `[n] → [m]`, sorted.
    pub fn epis(n: usize, m: usize) -> Vec<SimplexOp> {
        let mut out = Vec::new();
        if m > n {
            return out;
        }
        // choose which of the n steps are flat
        for mask in 0u32..1 << n {
            if mask.count_ones() as usize != n - m {
                continue;
            }
            let mut values = vec![0];
            for k in 0..n {
                let last = *values.last().unwrap();
                values.push(if mask & (1 << k) != 0 { last } else { last + 1 });
            }
            out.push(SimplexOp { target: m, values });
        }
        out.sort();
        out
    }

    /// All injections `[m] → [n]`, sorted.
    pub fn monos(m: usize, n: usize) -> Vec<SimplexOp> {
        let mut out = Vec::new();
        for mask in 0u32..1 << (n + 1) {
            if mask.count_ones() as usize == m + 1 {
                let values = (0..=n).filter(|k| mask & (1 << k) != 0).collect();
                out.push(SimplexOp { target: n, values });
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for SimplexOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]->[{}]", vals.join(","), self.target)
    }
}
