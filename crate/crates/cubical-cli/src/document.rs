//! The on-disk format: versioned JSON documents for complexes, maps and connection
//! structures. Printing is canonical (ids in order, canonical words), so a parsed and
//! re-printed document is byte-identical to its canonical form.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use cubical::complex::{CellId, Complex, CubeRef, MCMap, MCSet, MSSet, Map, Ref, Regime};
use cubical::connect::WcsTable;
use cubical::opcalc::{Flavor, NormalForm};
use serde::{Deserialize, Serialize};

use crate::words;

pub const VERSION: u32 = 1;

/// `[word, base]`: the cube `base·word`.
pub type CubeEntryRef = (String, CellId);

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CubeEntry {
    pub id: CellId,
    pub dim: usize,
    /// `"(i,ε)"` to the face `∂_{i,ε}` of this cube.
    pub faces: BTreeMap<String, CubeEntryRef>,
    pub marked: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum Endpoint {
    /// `"self"`: the complex of the enclosing document.
    Own(String),
    Inline(Box<ComplexDocument>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MapEntry {
    pub name: String,
    pub domain: Endpoint,
    pub codomain: Endpoint,
    /// The image of each domain cube, in id order.
    pub assignment: Vec<CubeEntryRef>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ComplexDocument {
    pub version: u32,
    pub flavor: String,
    pub regime: String,
    pub cubes: Vec<CubeEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<MapEntry>,
}

pub type DocResult<T> = std::result::Result<T, String>;

fn face_key(slot: usize) -> String {
    format!("({},{})", slot / 2 + 1, slot % 2)
}

fn ref_entry(r: &CubeRef) -> CubeEntryRef {
    (words::print(&r.epi), r.base)
}

/// Reads `[word, base]` as a cube of dimension `dim` in `x`.
fn read_ref(x: &MCSet, e: &CubeEntryRef, dim: usize, what: &str) -> DocResult<CubeRef> {
    let (word, base) = e;
    if *base >= x.len() {
        return Err(format!("{what}: no cube {base}"));
    }
    let epi = words::parse(x.dim(*base), word, x.shape).map_err(|err| format!("{what}: {err}"))?;
    if epi.source() != dim || !epi.is_epi() {
        return Err(format!("{what}: {word} on cube {base} is not an epi from dimension {dim}"));
    }
    Ok(Ref { epi, base: *base })
}

impl ComplexDocument {
    pub fn from_complex(x: &MCSet) -> ComplexDocument {
        let cubes = (0..x.len())
            .map(|c| {
                let cell = x.cell(c);
                let faces = cell.faces.iter().enumerate().map(|(slot, f)| (face_key(slot), ref_entry(f))).collect();
                CubeEntry { id: c, dim: cell.dim, faces, marked: cell.marked }
            })
            .collect();
        ComplexDocument {
            version: VERSION,
            flavor: x.shape.to_string(),
            regime: x.regime.to_string(),
            cubes,
            maps: vec![],
        }
    }

    pub fn to_complex(&self) -> DocResult<Arc<MCSet>> {
        if self.version != VERSION {
            return Err(format!("unsupported format version {}", self.version));
        }
        let flavor: Flavor = self.flavor.parse().map_err(|e: cubical::Error| e.to_string())?;
        let regime: Regime = self.regime.parse().map_err(|e: cubical::Error| e.to_string())?;
        let mut order: Vec<&CubeEntry> = self.cubes.iter().collect();
        order.sort_by_key(|c| c.id);
        let mut x: MCSet = Complex::new(flavor, regime);
        for (k, c) in order.iter().enumerate() {
            if c.id != k {
                return Err(format!("cube ids must be 0..{}, found {}", self.cubes.len(), c.id));
            }
            let mut faces = Vec::with_capacity(2 * c.dim);
            for slot in 0..2 * c.dim {
                let key = face_key(slot);
                let e = c.faces.get(&key).ok_or_else(|| format!("cube {k}: missing face {key}"))?;
                if e.1 >= k {
                    return Err(format!("cube {k}: face {key} refers to a later cube {}", e.1));
                }
                faces.push(read_ref(&x, e, c.dim - 1, &format!("cube {k} face {key}"))?);
            }
            if c.faces.len() != 2 * c.dim {
                return Err(format!("cube {k}: expected {} faces, found {}", 2 * c.dim, c.faces.len()));
            }
            x.add_cell(c.dim, faces, c.marked).map_err(|e| format!("cube {k}: {e}"))?;
        }
        let problems = x.validate();
        if !problems.is_empty() {
            return Err(format!("invalid complex: {}", problems.join("; ")));
        }
        Ok(Arc::new(x))
    }

    pub fn with_map(mut self, name: &str, f: &MCMap, own: &MCSet) -> ComplexDocument {
        let end = |x: &Arc<MCSet>| {
            if **x == *own {
                Endpoint::Own("self".into())
            } else {
                Endpoint::Inline(Box::new(ComplexDocument::from_complex(x)))
            }
        };
        let assignment = f.assign.iter().map(|r| ref_entry(r)).collect();
        self.maps.push(MapEntry { name: name.into(), domain: end(&f.domain), codomain: end(&f.codomain), assignment });
        self
    }

    fn endpoint(&self, e: &Endpoint, own: &Arc<MCSet>) -> DocResult<Arc<MCSet>> {
        match e {
            Endpoint::Own(s) if s == "self" => Ok(own.clone()),
            Endpoint::Own(s) => Err(format!("unknown endpoint {s:?}")),
            Endpoint::Inline(d) => d.to_complex(),
        }
    }

    /// The map named `name`, or the only map if `name` is `None`.
    pub fn map(&self, name: Option<&str>) -> DocResult<MCMap> {
        let own = self.to_complex()?;
        let entry = match name {
            Some(n) => self.maps.iter().find(|m| m.name == n).ok_or_else(|| format!("no map named {n:?}"))?,
            None if self.maps.len() == 1 => &self.maps[0],
            None => return Err(format!("expected exactly one map, found {}", self.maps.len())),
        };
        let dom = self.endpoint(&entry.domain, &own)?;
        let cod = self.endpoint(&entry.codomain, &own)?;
        if entry.assignment.len() != dom.len() {
            return Err(format!("map {}: {} images for {} cubes", entry.name, entry.assignment.len(), dom.len()));
        }
        let assign = entry
            .assignment
            .iter()
            .enumerate()
            .map(|(c, e)| read_ref(&cod, e, dom.dim(c), &format!("map {} at cube {c}", entry.name)))
            .collect::<DocResult<Vec<_>>>()?;
        Map::new(dom, cod, assign).map_err(|e| format!("map {}: {e}", entry.name))
    }

    /// A document holding a map: its codomain as the complex, the map named `name`.
    pub fn of_map(name: &str, f: &MCMap) -> ComplexDocument {
        ComplexDocument::from_complex(&f.codomain).with_map(name, f, &f.codomain)
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> DocResult<T> {
    serde_json::from_str(text).map_err(|e| format!("{what}: parse error at line {}, column {}: {e}", e.line(), e.column()))
}

/// A marked simplicial set, as produced by triangulation. Faces are listed in order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SimplicialDocument {
    pub version: u32,
    pub kind: String,
    pub simplices: Vec<SimplexEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SimplexEntry {
    pub id: CellId,
    pub dim: usize,
    /// `[operator, base]`, the operator as its values `[a_0,…,a_k]->[n]`.
    pub faces: Vec<(String, CellId)>,
    pub marked: bool,
}

impl SimplicialDocument {
    pub fn from_sset(s: &MSSet) -> SimplicialDocument {
        let simplices = (0..s.len())
            .map(|c| {
                let cell = s.cell(c);
                SimplexEntry {
                    id: c,
                    dim: cell.dim,
                    faces: cell.faces.iter().map(|f| (f.epi.to_string(), f.base)).collect(),
                    marked: cell.marked,
                }
            })
            .collect();
        SimplicialDocument { version: VERSION, kind: "marked-simplicial-set".into(), simplices }
    }
}

/// A connection structure `Γ: i*i_!X → Y` on `f: X → Y`, listed by its values `x(φ)`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct WcsDocument {
    pub version: u32,
    pub kind: String,
    /// The flavor of the connections.
    pub connections: String,
    pub cap: usize,
    pub source: ComplexDocument,
    pub target: ComplexDocument,
    /// `f` on the cubes of the source.
    pub subject: Vec<CubeEntryRef>,
    pub values: Vec<WcsValue>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct WcsValue {
    pub cube: CellId,
    /// `φ` acting on the cube.
    pub word: String,
    pub value: CubeEntryRef,
}

impl WcsDocument {
    pub fn from_table(t: &WcsTable) -> WcsDocument {
        let y = t.target();
        let values = t
            .entries()
            .map(|(c, phi, v)| WcsValue { cube: c, word: words::print(phi), value: ref_entry(v) })
            .collect();
        WcsDocument {
            version: VERSION,
            kind: "connection-structure".into(),
            connections: t.b.to_string(),
            cap: t.cap(),
            source: ComplexDocument::from_complex(t.source()),
            target: ComplexDocument::from_complex(y),
            subject: t.subject.assign.iter().map(|r| ref_entry(r)).collect(),
            values,
        }
    }

    pub fn to_table(&self) -> DocResult<WcsTable> {
        if self.version != VERSION {
            return Err(format!("unsupported format version {}", self.version));
        }
        let b: Flavor = self.connections.parse().map_err(|e: cubical::Error| e.to_string())?;
        let x = self.source.to_complex()?;
        let y = if self.target == self.source { x.clone() } else { self.target.to_complex()? };
        if self.subject.len() != x.len() {
            return Err(format!("subject: {} images for {} cubes", self.subject.len(), x.len()));
        }
        let assign = self
            .subject
            .iter()
            .enumerate()
            .map(|(c, e)| read_ref(&y, e, x.dim(c), &format!("subject at cube {c}")))
            .collect::<DocResult<Vec<_>>>()?;
        let subject = Map { domain: x.clone(), codomain: y.clone(), assign };
        let mut values: HashMap<(CellId, NormalForm), CubeRef> = HashMap::new();
        for (k, v) in self.values.iter().enumerate() {
            if v.cube >= x.len() {
                return Err(format!("value {k}: no cube {}", v.cube));
            }
            let phi = words::parse(x.dim(v.cube), &v.word, b.union(x.shape)).map_err(|e| format!("value {k}: {e}"))?;
            let r = read_ref(&y, &v.value, phi.source(), &format!("value {k}"))?;
            values.insert((v.cube, phi), r);
        }
        WcsTable::from_values(&subject, b, self.cap, |c, phi| {
            values
                .get(&(c, phi.clone()))
                .cloned()
                .ok_or_else(|| cubical::Error::Precondition(format!("no value for x{c}({})", words::print(phi))))
        })
        .map_err(|e| e.to_string())
    }
}
