//! Morphisms of the cube categories `Box_A`, `A ⊆ {0,1}`.
//!
//! A morphism `[1]^m → [1]^n` is a poset map built from faces, degeneracies and
//! connections. Words store generators first-applied-first; [`NormalForm`] stores
//! the unique factorization `faces ∘ connections ∘ degeneracies` in the usual
//! right-to-left notation (`∂_{c_1}…∂_{c_r} γ_{b_1}…γ_{b_q} σ_{a_1}…σ_{a_p}`).

use std::fmt;
use std::str::FromStr;

use crate::error::{bail, Error, Result};

/// A sign ε ∈ {0, 1}.
pub type Sign = u8;

/// Which connections a cube category has.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Flavor {
    bits: u8,
}

impl Flavor {
    pub const NONE: Flavor = Flavor { bits: 0 };
    pub const NEG: Flavor = Flavor { bits: 1 };
    pub const POS: Flavor = Flavor { bits: 2 };
    pub const BOTH: Flavor = Flavor { bits: 3 };

    pub fn all() -> [Flavor; 4] {
        [Flavor::NONE, Flavor::NEG, Flavor::POS, Flavor::BOTH]
    }

    pub fn from_signs(signs: &[Sign]) -> Flavor {
        let mut bits = 0;
        for &s in signs {
            bits |= 1 << s;
        }
        Flavor { bits }
    }

    pub fn has(self, e: Sign) -> bool {
        e <= 1 && self.bits & (1 << e) != 0
    }

    /// `other ⊆ self`.
    pub fn includes(self, other: Flavor) -> bool {
        self.bits & other.bits == other.bits
    }

    pub fn union(self, other: Flavor) -> Flavor {
        Flavor { bits: self.bits | other.bits }
    }

    pub fn signs(self) -> Vec<Sign> {
        (0..2).filter(|&e| self.has(e)).collect()
    }

    /// All (proper and improper) inclusions `A ⊆ B` between flavors.
    pub fn inclusions() -> Vec<(Flavor, Flavor)> {
        let mut out = Vec::new();
        for a in Flavor::all() {
            for b in Flavor::all() {
                if b.includes(a) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bits {
            0 => write!(f, "none"),
            1 => write!(f, "0"),
            2 => write!(f, "1"),
            _ => write!(f, "01"),
        }
    }
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Flavor> {
        match s.trim() {
            "none" | "" | "{}" | "empty" => Ok(Flavor::NONE),
            "0" | "{0}" | "neg" => Ok(Flavor::NEG),
            "1" | "{1}" | "pos" => Ok(Flavor::POS),
            "01" | "{0,1}" | "both" => Ok(Flavor::BOTH),
            other => bail!(Flavor, "unknown flavor {other:?}"),
        }
    }
}

// ---- points of [1]^n as bitmasks: bit k-1 holds coordinate k ----

fn bit(x: u32, i: usize) -> u32 {
    (x >> (i - 1)) & 1
}

fn insert_bit(x: u32, i: usize, e: u32) -> u32 {
    let low = x & ((1u32 << (i - 1)) - 1);
    let high = x >> (i - 1);
    low | (e << (i - 1)) | (high << i)
}

fn delete_bit(x: u32, i: usize) -> u32 {
    let low = x & ((1u32 << (i - 1)) - 1);
    let high = x >> i;
    low | (high << (i - 1))
}

/// `max` for ε = 0, `min` for ε = 1.
pub fn conn_op(e: Sign, a: Sign, b: Sign) -> Sign {
    if e == 0 {
        a.max(b)
    } else {
        a.min(b)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Generator {
    Face { i: usize, e: Sign },
    Degen { i: usize },
    Conn { i: usize, e: Sign },
}

impl Generator {
    /// Target dimension when applied to `[1]^n`, checking validity.
    pub fn target_dim(&self, n: usize, flavor: Flavor) -> Result<usize> {
        match *self {
            Generator::Face { i, e } => {
                if e > 1 || i == 0 || i > n + 1 {
                    bail!(InvalidWord, "{self} not valid from dimension {n}");
                }
                Ok(n + 1)
            }
            Generator::Degen { i } => {
                if i == 0 || i > n {
                    bail!(InvalidWord, "{self} not valid from dimension {n}");
                }
                Ok(n - 1)
            }
            Generator::Conn { i, e } => {
                if e > 1 || i == 0 || i + 1 > n {
                    bail!(InvalidWord, "{self} not valid from dimension {n}");
                }
                if !flavor.has(e) {
                    bail!(Flavor, "{self} not in flavor {flavor}");
                }
                Ok(n - 1)
            }
        }
    }

    pub fn apply(&self, x: u32) -> u32 {
        match *self {
            Generator::Face { i, e } => insert_bit(x, i, e as u32),
            Generator::Degen { i } => delete_bit(x, i),
            Generator::Conn { i, e } => {
                let v = conn_op(e, bit(x, i) as Sign, bit(x, i + 1) as Sign) as u32;
                let y = delete_bit(x, i + 1);
                (y & !(1 << (i - 1))) | (v << (i - 1))
            }
        }
    }

    /// Every generator valid from source dimension `n` in `flavor`, canonically ordered.
    pub fn all_from(n: usize, flavor: Flavor) -> Vec<Generator> {
        let mut out = Vec::new();
        for i in 1..=n + 1 {
            for e in 0..2 {
                out.push(Generator::Face { i, e });
            }
        }
        for i in 1..=n {
            out.push(Generator::Degen { i });
        }
        for i in 1..n {
            for e in flavor.signs() {
                out.push(Generator::Conn { i, e });
            }
        }
        out
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Face { i, e } => write!(f, "d({i},{e})"),
            Generator::Degen { i } => write!(f, "s({i})"),
            Generator::Conn { i, e } => write!(f, "g({i},{e})"),
        }
    }
}

/// A composable word, first generator applied first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OperatorWord {
    pub source: usize,
    pub gens: Vec<Generator>,
}

impl OperatorWord {
    pub fn new(source: usize, gens: Vec<Generator>) -> OperatorWord {
        OperatorWord { source, gens }
    }

    /// Checks the dimension chain and returns the target dimension.
    pub fn target_dim(&self, flavor: Flavor) -> Result<usize> {
        let mut n = self.source;
        for g in &self.gens {
            n = g.target_dim(n, flavor)?;
        }
        Ok(n)
    }

    /// Parse `"d(2,1),g(1,0),s(3)"`; `"id"` or the empty string is the identity.
    pub fn parse(source: usize, text: &str) -> Result<OperatorWord> {
        let text = text.trim();
        if text.is_empty() || text == "id" {
            return Ok(OperatorWord::new(source, vec![]));
        }
        let mut gens = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| Error::InvalidWord(format!("expected '(' in {rest:?}")))?;
            let close = rest
                .find(')')
                .ok_or_else(|| Error::InvalidWord(format!("expected ')' in {rest:?}")))?;
            if close < open {
                bail!(InvalidWord, "malformed generator in {rest:?}");
            }
            let name = rest[..open].trim();
            let args: Vec<&str> = rest[open + 1..close].split(',').map(str::trim).collect();
            let num = |s: &str| -> Result<usize> {
                s.parse::<usize>()
                    .map_err(|_| Error::InvalidWord(format!("bad number {s:?}")))
            };
            let sign = |s: &str| -> Result<Sign> {
                match s {
                    "0" => Ok(0),
                    "1" => Ok(1),
                    _ => Err(Error::InvalidWord(format!("bad sign {s:?}"))),
                }
            };
            let g = match (name, args.len()) {
                ("d", 2) => Generator::Face { i: num(args[0])?, e: sign(args[1])? },
                ("s", 1) => Generator::Degen { i: num(args[0])? },
                ("g", 2) => Generator::Conn { i: num(args[0])?, e: sign(args[1])? },
                _ => bail!(InvalidWord, "unknown generator {:?}", &rest[..=close]),
            };
            gens.push(g);
            rest = rest[close + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
                if rest.is_empty() {
                    bail!(InvalidWord, "trailing comma");
                }
            } else if !rest.is_empty() {
                bail!(InvalidWord, "expected ',' before {rest:?}");
            }
        }
        Ok(OperatorWord::new(source, gens))
    }

    pub fn eval(&self, point: u32) -> u32 {
        self.gens.iter().fold(point, |x, g| g.apply(x))
    }

    /// Pointwise semantics, checked against `flavor`.
    pub fn eval_poset(&self, flavor: Flavor, point: &[Sign]) -> Result<Vec<Sign>> {
        if point.len() != self.source {
            bail!(Dimension, "point of length {} for source {}", point.len(), self.source);
        }
        let target = self.target_dim(flavor)?;
        let x = point
            .iter()
            .enumerate()
            .fold(0u32, |acc, (k, &b)| acc | ((b as u32 & 1) << k));
        let y = self.eval(x);
        Ok((0..target).map(|k| ((y >> k) & 1) as Sign).collect())
    }
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gens.is_empty() {
            return write!(f, "id");
        }
        for (k, g) in self.gens.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// The standard form `∂_{c_1}…∂_{c_r} γ_{b_1}…γ_{b_q} σ_{a_1}…σ_{a_p}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NormalForm {
    source: usize,
    /// `c_1 > … > c_r`, each with its sign.
    faces: Vec<(usize, Sign)>,
    /// `b_1 ≤ … ≤ b_q`, strictly increasing across equal signs.
    conns: Vec<(usize, Sign)>,
    /// `a_1 < … < a_p`.
    degens: Vec<usize>,
}

impl NormalForm {
    pub fn identity(n: usize) -> NormalForm {
        NormalForm { source: n, faces: vec![], conns: vec![], degens: vec![] }
    }

    /// Builds a normal form from its blocks, checking the standard-form shape.
    pub fn from_parts(
        source: usize,
        faces: Vec<(usize, Sign)>,
        conns: Vec<(usize, Sign)>,
        degens: Vec<usize>,
    ) -> Result<NormalForm> {
        let p = degens.len();
        if p > source {
            bail!(InvalidWord, "too many degeneracies");
        }
        for w in degens.windows(2) {
            if w[0] >= w[1] {
                bail!(InvalidWord, "degeneracies must increase strictly");
            }
        }
        if degens.iter().any(|&a| a == 0 || a > source) {
            bail!(InvalidWord, "degeneracy index out of range");
        }
        let d0 = source - p;
        let q = conns.len();
        if q > d0 || (q > 0 && d0 - q == 0) {
            bail!(InvalidWord, "too many connections");
        }
        let m = d0 - q;
        for (k, &(b, e)) in conns.iter().enumerate() {
            if e > 1 || b == 0 || b > m + k {
                bail!(InvalidWord, "connection index out of range");
            }
        }
        for w in conns.windows(2) {
            if w[0].0 > w[1].0 || (w[0].0 == w[1].0 && w[0].1 == w[1].1) {
                bail!(InvalidWord, "connections not in standard order");
            }
        }
        let r = faces.len();
        for (k, &(c, e)) in faces.iter().enumerate() {
            if e > 1 || c == 0 || c > m + r - k {
                bail!(InvalidWord, "face index out of range");
            }
        }
        for w in faces.windows(2) {
            if w[0].0 <= w[1].0 {
                bail!(InvalidWord, "faces must decrease strictly");
            }
        }
        Ok(NormalForm { source, faces, conns, degens })
    }

    pub fn generator(source: usize, g: Generator) -> Result<NormalForm> {
        g.target_dim(source, Flavor::BOTH)?;
        let mut nf = NormalForm::identity(source);
        nf.post(g);
        Ok(nf)
    }

    /// `∂_{i,e}: [1]^{n-1} → [1]^n`.
    pub fn face(n: usize, i: usize, e: Sign) -> NormalForm {
        assert!(n >= 1 && i >= 1 && i <= n && e <= 1, "face ∂_({i},{e}) into dim {n}");
        NormalForm { source: n - 1, faces: vec![(i, e)], conns: vec![], degens: vec![] }
    }

    /// `σ_i: [1]^n → [1]^{n-1}`.
    pub fn degen(n: usize, i: usize) -> NormalForm {
        assert!(i >= 1 && i <= n, "degeneracy σ_{i} from dim {n}");
        NormalForm { source: n, faces: vec![], conns: vec![], degens: vec![i] }
    }

    /// `γ_{i,e}: [1]^n → [1]^{n-1}`.
    pub fn conn(n: usize, i: usize, e: Sign) -> NormalForm {
        assert!(i >= 1 && i < n && e <= 1, "connection γ_({i},{e}) from dim {n}");
        NormalForm { source: n, faces: vec![], conns: vec![(i, e)], degens: vec![] }
    }

    /// `γ_{j:q,μ} = γ_{j,μ}γ_{j+1,μ}…γ_{j+q-1,μ}: [1]^{n+q} → [1]^n`.
    pub fn gamma_run(n: usize, j: usize, q: usize, mu: Sign) -> Result<NormalForm> {
        if q > 0 && (j == 0 || j > n) {
            bail!(Dimension, "γ_({j}:{q},{mu}) into dimension {n}");
        }
        let conns = (0..q).map(|k| (j + k, mu)).collect();
        NormalForm::from_parts(n + q, vec![], conns, vec![])
    }

    pub fn normalize(word: &OperatorWord, flavor: Flavor) -> Result<NormalForm> {
        word.target_dim(flavor)?;
        let mut nf = NormalForm::identity(word.source);
        for &g in &word.gens {
            nf.post(g);
        }
        Ok(nf)
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.source + self.faces.len() - self.degens.len() - self.conns.len()
    }

    pub fn faces(&self) -> &[(usize, Sign)] {
        &self.faces
    }

    pub fn conns(&self) -> &[(usize, Sign)] {
        &self.conns
    }

    pub fn degens(&self) -> &[usize] {
        &self.degens
    }

    pub fn is_identity(&self) -> bool {
        self.faces.is_empty() && self.conns.is_empty() && self.degens.is_empty()
    }

    pub fn is_epi(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn is_mono(&self) -> bool {
        self.conns.is_empty() && self.degens.is_empty()
    }

    pub fn is_connection_only(&self) -> bool {
        self.faces.is_empty() && self.degens.is_empty()
    }

    /// The smallest flavor containing this map.
    pub fn flavor(&self) -> Flavor {
        let signs: Vec<Sign> = self.conns.iter().map(|c| c.1).collect();
        Flavor::from_signs(&signs)
    }

    /// Generators in application order.
    pub fn to_word(&self) -> OperatorWord {
        let mut gens = Vec::new();
        for &i in self.degens.iter().rev() {
            gens.push(Generator::Degen { i });
        }
        for &(i, e) in self.conns.iter().rev() {
            gens.push(Generator::Conn { i, e });
        }
        for &(i, e) in self.faces.iter().rev() {
            gens.push(Generator::Face { i, e });
        }
        OperatorWord::new(self.source, gens)
    }

    pub fn eval(&self, x: u32) -> u32 {
        self.to_word().eval(x)
    }

    /// Images of all `2^source` points.
    pub fn truth_table(&self) -> Vec<u32> {
        let w = self.to_word();
        (0..1u32 << self.source).map(|x| w.eval(x)).collect()
    }

    /// `self ∘ f` (f applied first).
    pub fn compose(&self, f: &NormalForm) -> Result<NormalForm> {
        if f.target() != self.source {
            bail!(
                Dimension,
                "cannot compose {self} after {f}: {} ≠ {}",
                f.target(),
                self.source
            );
        }
        let mut out = f.clone();
        for g in self.to_word().gens {
            out.post(g);
        }
        Ok(out)
    }

    /// `self ∘ f`, panicking on a dimension mismatch.
    pub fn after(&self, f: &NormalForm) -> NormalForm {
        self.compose(f).expect("composable")
    }

    /// `(epi, mono)` with `mono ∘ epi = self`.
    pub fn epi_mono(&self) -> (NormalForm, NormalForm) {
        let epi = NormalForm {
            source: self.source,
            faces: vec![],
            conns: self.conns.clone(),
            degens: self.degens.clone(),
        };
        let mono = NormalForm {
            source: epi.target(),
            faces: self.faces.clone(),
            conns: vec![],
            degens: vec![],
        };
        (epi, mono)
    }

    /// Splits a mono as `∂_{c_1} ∘ rest`; `None` for the identity.
    pub fn split_first_face(&self) -> Option<((usize, Sign), NormalForm)> {
        if !self.is_mono() || self.faces.is_empty() {
            return None;
        }
        let first = self.faces[0];
        let rest = NormalForm {
            source: self.source,
            faces: self.faces[1..].to_vec(),
            conns: vec![],
            degens: vec![],
        };
        Some((first, rest))
    }

    /// Tensor (juxtaposition) of two maps: `self` on the first block, `other` on the second.
    pub fn tensor(&self, other: &NormalForm) -> NormalForm {
        let mut out = self.clone();
        out.source = self.source + other.source;
        let shift = self.target();
        for g in other.to_word().gens {
            let g = match g {
                Generator::Face { i, e } => Generator::Face { i: i + shift, e },
                Generator::Degen { i } => Generator::Degen { i: i + shift },
                Generator::Conn { i, e } => Generator::Conn { i: i + shift, e },
            };
            out.post(g);
        }
        out
    }

    // ---- the rewrite engine: post-compose one generator ----

    fn post(&mut self, g: Generator) {
        match g {
            Generator::Face { i, e } => self.post_face(i, e),
            Generator::Degen { i } => self.post_degen(i),
            Generator::Conn { i, e } => self.post_conn(i, e),
        }
    }

    fn face_at(&self, pos: usize) -> Option<Sign> {
        self.faces.iter().find(|f| f.0 == pos).map(|f| f.1)
    }

    fn faces_below(&self, pos: usize) -> usize {
        self.faces.iter().filter(|f| f.0 < pos).count()
    }

    fn remove_face(&mut self, pos: usize) {
        self.faces.retain(|f| f.0 != pos);
    }

    fn shift_faces_down(&mut self, above: usize) {
        for f in &mut self.faces {
            if f.0 > above {
                f.0 -= 1;
            }
        }
    }

    fn sort_faces(&mut self) {
        self.faces.sort_by(|a, b| b.0.cmp(&a.0));
    }

    fn post_face(&mut self, i: usize, e: Sign) {
        for f in &mut self.faces {
            if f.0 >= i {
                f.0 += 1;
            }
        }
        self.faces.push((i, e));
        self.sort_faces();
    }

    fn post_degen(&mut self, j: usize) {
        if self.face_at(j).is_some() {
            self.remove_face(j);
            self.shift_faces_down(j);
            return;
        }
        let below = self.faces_below(j);
        self.shift_faces_down(j);
        self.epi_post_degen(j - below);
    }

    fn post_conn(&mut self, j: usize, e: Sign) {
        let below = self.faces_below(j);
        match (self.face_at(j), self.face_at(j + 1)) {
            (Some(a), Some(b)) => {
                self.remove_face(j);
                self.remove_face(j + 1);
                self.shift_faces_down(j + 1);
                self.faces.push((j, conn_op(e, a, b)));
                self.sort_faces();
            }
            (Some(a), None) => {
                if a == e {
                    self.remove_face(j);
                    self.shift_faces_down(j);
                } else {
                    self.shift_faces_down(j + 1);
                    self.epi_post_degen(j - below);
                }
            }
            (None, Some(b)) => {
                self.remove_face(j + 1);
                self.shift_faces_down(j + 1);
                if b != e {
                    self.faces.push((j, b));
                    self.sort_faces();
                    self.epi_post_degen(j - below);
                }
            }
            (None, None) => {
                self.shift_faces_down(j + 1);
                self.epi_post_conn(j - below, e);
            }
        }
    }

    /// Bubbles `γ_{j,e}` into the connection block from the left.
    fn epi_post_conn(&mut self, j: usize, e: Sign) {
        let mut out = Vec::with_capacity(self.conns.len() + 1);
        let mut cj = j;
        let mut k = 0;
        while k < self.conns.len() {
            let (i, s) = self.conns[k];
            if cj > i {
                out.push((i, s));
                cj += 1;
            } else if cj == i && s == e {
                out.push((i, s));
                cj = i + 1;
            } else {
                break;
            }
            k += 1;
        }
        out.push((cj, e));
        out.extend_from_slice(&self.conns[k..]);
        self.conns = out;
    }

    fn epi_post_degen(&mut self, j: usize) {
        let (conns, ds) = push_degen(j, &self.conns);
        self.conns = conns;
        for &k in ds.iter().rev() {
            let mut seen = 0;
            let mut hit = 0;
            for c in 1..=self.source {
                if !self.degens.contains(&c) {
                    seen += 1;
                    if seen == k {
                        hit = c;
                        break;
                    }
                }
            }
            debug_assert!(hit > 0);
            self.degens.push(hit);
        }
        self.degens.sort_unstable();
    }

    // ---- sections, tail forms ----

    /// All monos `m` with `self ∘ m = id`, canonically ordered.
    pub fn sections(&self) -> Result<Vec<NormalForm>> {
        if !self.is_epi() {
            bail!(Precondition, "sections of non-epi {self}");
        }
        let id = NormalForm::identity(self.target());
        Ok(monos(self.target(), self.source)
            .into_iter()
            .filter(|m| self.after(m) == id)
            .collect())
    }

    /// Largest connection index.
    pub fn maximal_index(&self) -> Result<usize> {
        if !self.is_connection_only() || self.conns.is_empty() {
            bail!(Precondition, "maximal index of {self}: need nonempty connection word");
        }
        Ok(self.conns.iter().map(|c| c.0).max().unwrap())
    }
}

/// Pushes `σ_j` rightward through a connection block. Returns the new block and the
/// degeneracies (composite order) left over to the right.
fn push_degen(j: usize, conns: &[(usize, Sign)]) -> (Vec<(usize, Sign)>, Vec<usize>) {
    let Some(&(i, e)) = conns.first() else {
        return (vec![], vec![j]);
    };
    let rest = &conns[1..];
    if j < i {
        let (mut r, ds) = push_degen(j, rest);
        r.insert(0, (i - 1, e));
        (r, ds)
    } else if j > i {
        let (mut r, ds) = push_degen(j + 1, rest);
        r.insert(0, (i, e));
        (r, ds)
    } else {
        let (r1, ds1) = push_degen(i, rest);
        let (r2, mut ds2) = push_degen(i, &r1);
        ds2.extend(ds1);
        (r2, ds2)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_word())
    }
}

// ---- enumeration ----

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            if n - x + 1 < k - cur.len() {
                break;
            }
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Connection blocks `[1]^{m+q} → [1]^m` in standard form.
fn conn_blocks(m: usize, q: usize, flavor: Flavor) -> Vec<Vec<(usize, Sign)>> {
    fn go(
        m: usize,
        q: usize,
        signs: &[Sign],
        cur: &mut Vec<(usize, Sign)>,
        out: &mut Vec<Vec<(usize, Sign)>>,
    ) {
        let k = cur.len();
        if k == q {
            out.push(cur.clone());
            return;
        }
        let hi = m + k;
        let lo = cur.last().map(|c| c.0).unwrap_or(1);
        for b in lo.max(1)..=hi {
            for &e in signs {
                if let Some(&(pb, pe)) = cur.last() {
                    if pb == b && pe == e {
                        continue;
                    }
                }
                cur.push((b, e));
                go(m, q, signs, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if q == 0 {
        out.push(vec![]);
        return out;
    }
    if m == 0 {
        return out;
    }
    go(m, q, &flavor.signs(), &mut Vec::new(), &mut out);
    out
}

/// All epimorphisms `[1]^n → [1]^m` in `flavor`, sorted.
pub fn epis(n: usize, m: usize, flavor: Flavor) -> Vec<NormalForm> {
    let mut out = Vec::new();
    if m > n {
        return out;
    }
    let k = n - m;
    for p in 0..=k {
        let q = k - p;
        let blocks = conn_blocks(m, q, flavor);
        if blocks.is_empty() {
            continue;
        }
        for degens in subsets(n, p) {
            for conns in &blocks {
                out.push(NormalForm { source: n, faces: vec![], conns: conns.clone(), degens: degens.clone() });
            }
        }
    }
    out.sort();
    out
}

/// All monomorphisms `[1]^m → [1]^n`, sorted.
pub fn monos(m: usize, n: usize) -> Vec<NormalForm> {
    let mut out = Vec::new();
    if m > n {
        return out;
    }
    let r = n - m;
    for pos in subsets(n, r) {
        for signs in 0..1u32 << r {
            let mut faces: Vec<(usize, Sign)> = pos
                .iter()
                .enumerate()
                .map(|(k, &c)| (c, ((signs >> k) & 1) as Sign))
                .collect();
            faces.sort_by(|a, b| b.0.cmp(&a.0));
            out.push(NormalForm { source: m, faces, conns: vec![], degens: vec![] });
        }
    }
    out.sort();
    out
}

/// All maps `[1]^m → [1]^n` in `flavor`, sorted.
pub fn all_maps(m: usize, n: usize, flavor: Flavor) -> Vec<NormalForm> {
    let mut out = Vec::new();
    for t in 0..=m.min(n) {
        let es = epis(m, t, flavor);
        let ms = monos(t, n);
        for e in &es {
            for d in &ms {
                out.push(d.after(e));
            }
        }
    }
    out.sort();
    out
}

/// The elementary epi generators `[1]^{n+1} → [1]^n` of a flavor, each with a section.
pub fn epi_generators(n: usize, flavor: Flavor) -> Vec<(NormalForm, NormalForm)> {
    let mut out = Vec::new();
    let m = n + 1;
    for i in 1..=m {
        out.push((NormalForm::degen(m, i), NormalForm::face(m, i, 0)));
    }
    for i in 1..m {
        for e in flavor.signs() {
            out.push((NormalForm::conn(m, i, e), NormalForm::face(m, i + 1, e)));
        }
    }
    out
}

/// Splits an epi `φ` as `χ ∘ α` with `α` an epi of `a` and `χ` not factoring through
/// any elementary degeneracy of `a`.
pub fn split_degenerate_part(phi: &NormalForm, a: Flavor) -> (NormalForm, NormalForm) {
    debug_assert!(phi.is_epi());
    let n = phi.source();
    if n == 0 {
        return (phi.clone(), NormalForm::identity(0));
    }
    for (e, s) in epi_generators(n - 1, a) {
        let rest = phi.after(&s);
        if rest.after(&e) == *phi {
            let (chi, alpha) = split_degenerate_part(&rest, a);
            return (chi, alpha.after(&e));
        }
    }
    (phi.clone(), NormalForm::identity(n))
}

/// Whether `φ` factors through an elementary degeneracy of `a`.
pub fn is_degenerate_in(phi: &NormalForm, a: Flavor) -> bool {
    let n = phi.source();
    n > 0
        && epi_generators(n - 1, a)
            .iter()
            .any(|(e, s)| phi.after(s).after(e) == *phi)
}

// ---- tail forms ----

/// `ψ · γ_{j:q,μ}` with `ψ` connection-only.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct TailForm {
    pub head: NormalForm,
    pub j: usize,
    pub q: usize,
    pub mu: Sign,
}

impl TailForm {
    pub fn new(head: NormalForm, j: usize, q: usize, mu: Sign) -> Result<TailForm> {
        if !head.is_connection_only() {
            bail!(Precondition, "tail head {head} is not connection-only");
        }
        if j == 0 || j > head.source() || mu > 1 {
            bail!(Precondition, "tail γ_({j}:{q},{mu}) out of range for head {head}");
        }
        if let Some(&(ip, ep)) = head.conns().last() {
            if j < ip || (ep == mu && j < ip + 2) {
                bail!(Precondition, "tail γ_({j}:{q},{mu}) violates ordering after {head}");
            }
        }
        Ok(TailForm { head, j, q, mu })
    }

    pub fn is_trivial(&self) -> bool {
        self.q == 0
    }

    /// `[1]^{source} → [1]^{target}` of the composite.
    pub fn source(&self) -> usize {
        self.head.source() + self.q
    }

    pub fn target(&self) -> usize {
        self.head.target()
    }

    pub fn maximal_index(&self) -> usize {
        self.j + self.q - 1
    }

    pub fn tail(&self) -> NormalForm {
        NormalForm::gamma_run(self.head.source(), self.j, self.q, self.mu).expect("valid tail")
    }

    pub fn to_normal_form(&self) -> NormalForm {
        self.head.after(&self.tail())
    }

    pub fn with_q(&self, q: usize) -> TailForm {
        TailForm { head: self.head.clone(), j: self.j, q, mu: self.mu }
    }

    /// Every tail form (trivial or not) with head of length `p` and tail length `q`
    /// landing in dimension `n`.
    pub fn enumerate(n: usize, p: usize, q: usize, flavor: Flavor) -> Vec<TailForm> {
        let mut out = Vec::new();
        for head in epis(n + p, n, flavor) {
            if !head.degens().is_empty() {
                continue;
            }
            for j in 1..=n + p {
                for mu in flavor.signs() {
                    if let Ok(t) = TailForm::new(head.clone(), j, q, mu) {
                        out.push(t);
                    }
                }
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for TailForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]·γ({}:{},{})", self.head, self.j, self.q, self.mu)
    }
}

/// The unique non-trivial tail form of a nonempty connection word.
pub fn tail_form(w: &NormalForm) -> Result<TailForm> {
    if !w.is_connection_only() || w.conns().is_empty() {
        bail!(Precondition, "tail form of {w}: need nonempty connection word");
    }
    let c = w.conns();
    let mut k = c.len() - 1;
    while k > 0 && c[k - 1].1 == c[k].1 && c[k - 1].0 + 1 == c[k].0 {
        k -= 1;
    }
    let head = NormalForm::from_parts(w.target() + k, vec![], c[..k].to_vec(), vec![])?;
    TailForm::new(head, c[k].0, c.len() - k, c[k].1)
}

/// Closed form of `γ_{j:q,μ} ∘ ∂_{k,ν}` where `γ_{j:q,μ}: [1]^{n+q} → [1]^n`.
pub fn ext_conn_face(j: usize, q: usize, mu: Sign, k: usize, nu: Sign, n: usize) -> Result<NormalForm> {
    if q == 0 || j == 0 || j > n {
        bail!(Dimension, "γ_({j}:{q},{mu}) into dimension {n}");
    }
    if k == 0 || k > n + q || nu > 1 {
        bail!(Dimension, "face ∂_({k},{nu}) into dimension {}", n + q);
    }
    let run = |start: usize, len: usize| (0..len).map(|t| (start + t, mu)).collect::<Vec<_>>();
    if k < j {
        NormalForm::from_parts(n + q - 1, vec![(k, nu)], run(j - 1, q), vec![])
    } else if k <= j + q {
        if nu == mu {
            NormalForm::from_parts(n + q - 1, vec![], run(j, q - 1), vec![])
        } else {
            NormalForm::from_parts(n + q - 1, vec![(j, 1 - mu)], vec![], (j..j + q).collect())
        }
    } else {
        NormalForm::from_parts(n + q - 1, vec![(k - q, nu)], run(j, q), vec![])
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TailFaceCase {
    ShrinksTail(TailForm),
    HigherMaxIndex,
    LongerTailSameMax,
    HasFace,
    HasDegeneracy,
}

/// Classifies `ψγ_{j:q,μ} ∘ ∂_{k,ν}`; returns the case and the composite.
pub fn classify_tail_face(t: &TailForm, k: usize, nu: Sign) -> Result<(TailFaceCase, NormalForm)> {
    if t.is_trivial() {
        bail!(Precondition, "classification needs a non-trivial tail form");
    }
    let n = t.source();
    if k == 0 || k > n || nu > 1 {
        bail!(Dimension, "face ∂_({k},{nu}) into dimension {n}");
    }
    let comp = t.to_normal_form().after(&NormalForm::face(n, k, nu));
    if t.j <= k && k <= t.j + t.q && nu == t.mu {
        return Ok((TailFaceCase::ShrinksTail(t.with_q(t.q - 1)), comp));
    }
    if !comp.faces().is_empty() {
        return Ok((TailFaceCase::HasFace, comp));
    }
    if !comp.degens().is_empty() {
        return Ok((TailFaceCase::HasDegeneracy, comp));
    }
    if comp.conns().is_empty() {
        bail!(Precondition, "face of {t} collapsed to the identity");
    }
    let m = comp.maximal_index()?;
    if m >= t.maximal_index() {
        return Ok((TailFaceCase::HigherMaxIndex, comp));
    }
    let tf = tail_form(&comp)?;
    if m + 2 == t.j + t.q && tf.q >= t.q {
        return Ok((TailFaceCase::LongerTailSameMax, comp));
    }
    bail!(Precondition, "face ∂_({k},{nu}) of {t} falls outside every case: {comp}")
}

// ---- critical faces ----

/// Whether the mono `δ` into `[1]^n` is a critical face with respect to `∂_{i,ε}`.
pub fn is_critical_face(delta: &NormalForm, n: usize, i: usize, e: Sign) -> Result<bool> {
    if !delta.is_mono() || delta.target() != n {
        bail!(Precondition, "{delta} is not a mono into dimension {n}");
    }
    if i == 0 || i > n || e > 1 {
        bail!(Precondition, "face ({i},{e}) out of range for dimension {n}");
    }
    let has = |c: usize, s: Sign| delta.faces().contains(&(c, s));
    if has(i, e) || has(i, 1 - e) {
        return Ok(false);
    }
    for j in i + 1..=n {
        if has(j, e) && (i + 1..j).all(|k| has(k, 1 - e)) {
            return Ok(false);
        }
    }
    for j in 1..i {
        if has(j, e) && (j + 1..i).all(|k| has(k, 1 - e)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All critical faces of `□^n` with respect to `∂_{i,ε}`, sorted.
pub fn critical_faces(n: usize, i: usize, e: Sign) -> Result<Vec<NormalForm>> {
    let mut out = Vec::new();
    for m in 0..=n {
        for d in monos(m, n) {
            if is_critical_face(&d, n, i, e)? {
                out.push(d);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `∂_{n,1-ε}…∂_{i+1,1-ε}∂_{i-1,1-ε}…∂_{1,1-ε}`.
pub fn critical_edge(n: usize, i: usize, e: Sign) -> Result<NormalForm> {
    if n == 0 || i == 0 || i > n || e > 1 {
        bail!(Precondition, "critical edge ({i},{e}) of □^{n}");
    }
    let faces = (1..=n).rev().filter(|&c| c != i).map(|c| (c, 1 - e)).collect();
    NormalForm::from_parts(1, faces, vec![], vec![])
}
