mod document;
mod words;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use cubical::complex::catalog::{self, CatalogItem};
use cubical::complex::random::{random_complex, RandomSpec};
use cubical::complex::{pushout, tensor, MCMap, MCSet, Map, Regime};
use cubical::connect::{self, WcsTable};
use cubical::functors;
use cubical::homotopy::{self, FamilyOptions, FreeFillingComplex, LiftProblem, Verdict};
use cubical::opcalc::{self, Flavor, Sign};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value};

use document::{parse_json, to_json, ComplexDocument, DocResult, SimplicialDocument, WcsDocument};

#[derive(Parser)]
#[command(name = "cubical", version, about = "Finite marked cubical sets: build, transform, check, synthesize")]
struct Cli {
    /// Flavor of connections: none, 0, 1 or 01.
    #[arg(long, global = true, value_parser = parse_flavor)]
    flavor: Option<Flavor>,
    /// Which cubes may be marked: full, edge or unmarked.
    #[arg(long, global = true, value_parser = parse_regime)]
    regime: Option<Regime>,
    /// Dimension up to which infinite objects are materialized.
    #[arg(long, global = true, default_value_t = 3)]
    cap: usize,
    /// Include the saturation (Rezk) generators.
    #[arg(long, global = true)]
    saturated: bool,
    /// Include the markers above this dimension.
    #[arg(long, global = true)]
    n_trivial: Option<usize>,
    /// Seed for randomized constructions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Marking {
    Flat,
    Sharp,
    Core,
    Forget,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical form of a word acting on a cube of dimension --dim.
    Normalize {
        #[arg(long)]
        dim: usize,
        word: String,
    },
    /// The word `first` followed by `second`, in canonical form.
    Compose {
        #[arg(long)]
        dim: usize,
        first: String,
        second: String,
    },
    /// Tail form of a connection word.
    Tailform {
        #[arg(long)]
        dim: usize,
        word: String,
    },
    /// A catalog object or map, or `random` for a random complex.
    Catalog {
        name: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        /// `i,ε` for families indexed by a face.
        #[arg(long, value_parser = parse_face, default_value = "1,0")]
        face: (usize, Sign),
        /// Attachment steps for `random`.
        #[arg(long, default_value_t = 6)]
        steps: usize,
    },
    /// Geometric product of two complexes.
    Tensor {
        left: PathBuf,
        right: PathBuf,
    },
    /// Pushout of a span `X ← A → B`, given as two maps out of the same complex.
    Pushout {
        f: PathBuf,
        g: PathBuf,
    },
    /// The marked simplicial set of a complex.
    Triangulate {
        input: PathBuf,
    },
    /// Freely adjoin connections of the given --flavor.
    Ifree {
        input: PathBuf,
    },
    /// Forget connections down to the given --flavor, up to --cap.
    Iforget {
        input: PathBuf,
    },
    /// Cofree extension to the given --flavor, up to dimension --top.
    Icofree {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        top: usize,
    },
    /// Mark every cube above dimension --n.
    Trivialize {
        input: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Change the marking regime: flat, sharp, core or forget.
    Mark {
        #[arg(value_enum)]
        how: Marking,
        input: PathBuf,
    },
    /// Right lifting property of a map against a catalog generator.
    Rlp {
        #[arg(long)]
        map: PathBuf,
        #[arg(long = "map-name")]
        map_name: Option<String>,
        #[arg(long)]
        gen: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, value_parser = parse_face, default_value = "1,0")]
        face: (usize, Sign),
    },
    /// Lifting against the generating families up to --cap.
    ComicalCheck {
        input: PathBuf,
    },
    /// Fill generator squares for a bounded number of rounds.
    FibrantApprox {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
    },
    /// Check a connection structure; with --strong also strength up to --cap.
    WcsValidate {
        input: PathBuf,
        #[arg(long)]
        strong: bool,
    },
    /// Connections of the given --flavor on a complex without connections, by free filling.
    WcsSynthesize {
        input: PathBuf,
    },
    /// A strong structure on a complex without connections, over the point.
    ScsExtend {
        input: PathBuf,
    },
    /// The complex with connections presented by a strong structure.
    Promote {
        input: PathBuf,
    },
    /// Collapse a square `□^1 ⊗ □̃^1 → X` along its marked direction.
    QuotientCollapse {
        input: PathBuf,
        #[arg(long = "map-name")]
        map_name: Option<String>,
    },
}

fn parse_flavor(s: &str) -> Result<Flavor, String> {
    s.parse().map_err(|e: cubical::Error| e.to_string())
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    s.parse().map_err(|e: cubical::Error| e.to_string())
}

fn parse_face(s: &str) -> Result<(usize, Sign), String> {
    let (i, e) = s.split_once(',').ok_or_else(|| format!("expected i,ε, got {s:?}"))?;
    let i = i.trim().parse().map_err(|_| format!("bad face index {i:?}"))?;
    let e: Sign = e.trim().parse().map_err(|_| format!("bad face sign {e:?}"))?;
    if e > 1 {
        return Err(format!("face sign must be 0 or 1, got {e}"));
    }
    Ok((i, e))
}

/// What a command produced: text to print and whether the verdict held.
struct Outcome {
    text: String,
    holds: bool,
}

impl Outcome {
    fn doc<T: serde::Serialize>(v: &T) -> Outcome {
        Outcome { text: to_json(v), holds: true }
    }

    fn verdict(v: Value, holds: bool) -> Outcome {
        Outcome { text: to_json(&v), holds }
    }
}

fn lib<T>(r: cubical::Result<T>) -> DocResult<T> {
    r.map_err(|e| e.to_string())
}

fn read_text(path: &Path) -> DocResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| format!("stdin: {e}"))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_doc(path: &Path) -> DocResult<ComplexDocument> {
    parse_json(&read_text(path)?, &path.display().to_string())
}

fn read_complex(path: &Path) -> DocResult<Arc<MCSet>> {
    read_doc(path)?.to_complex().map_err(|e| format!("{}: {e}", path.display()))
}

fn read_map(path: &Path, name: Option<&str>) -> DocResult<MCMap> {
    read_doc(path)?.map(name).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_wcs(path: &Path) -> DocResult<WcsTable> {
    let d: WcsDocument = parse_json(&read_text(path)?, &path.display().to_string())?;
    d.to_table().map_err(|e| format!("{}: {e}", path.display()))
}

fn complex_out(x: &MCSet) -> Outcome {
    Outcome::doc(&ComplexDocument::from_complex(x))
}

fn map_out(name: &str, f: &MCMap) -> Outcome {
    Outcome::doc(&ComplexDocument::of_map(name, f))
}

fn flavor_or(cli: &Cli, default: Flavor) -> Flavor {
    cli.flavor.unwrap_or(default)
}

fn connections(cli: &Cli) -> DocResult<Flavor> {
    match cli.flavor {
        Some(b) if b != Flavor::NONE => Ok(b),
        _ => Err("--flavor must name the connections to add: 0, 1 or 01".into()),
    }
}

fn family_options(cli: &Cli) -> FamilyOptions {
    FamilyOptions { dim_cap: cli.cap, saturated: cli.saturated, n_trivial: cli.n_trivial }
}

fn square_json(p: &LiftProblem) -> Value {
    let assignment = |f: &MCMap| -> Vec<(String, usize)> { f.assign.iter().map(|r| (words::print(&r.epi), r.base)).collect() };
    json!({ "top": assignment(&p.u), "bottom": assignment(&p.v) })
}

fn run(cli: &Cli) -> DocResult<Outcome> {
    let text = |s: String| Outcome { text: s + "\n", holds: true };
    Ok(match &cli.command {
        Command::Normalize { dim, word } => {
            text(words::print(&lib(words::parse(*dim, word, flavor_or(cli, Flavor::BOTH)))?))
        }
        Command::Compose { dim, first, second } => {
            let fl = flavor_or(cli, Flavor::BOTH);
            let a = lib(words::parse(*dim, first, fl))?;
            let b = lib(words::parse(a.source(), second, fl))?;
            text(words::print(&lib(a.compose(&b))?))
        }
        Command::Tailform { dim, word } => {
            let w = lib(words::parse(*dim, word, flavor_or(cli, Flavor::BOTH)))?;
            let t = lib(opcalc::tail_form(&w))?;
            Outcome::doc(&json!({
                "head": words::print(&t.head),
                "j": t.j,
                "q": t.q,
                "mu": t.mu,
                "tail": words::print(&t.tail()),
            }))
        }
        Command::Catalog { name, n, m, face, steps } => {
            let fl = flavor_or(cli, Flavor::NONE);
            let regime = cli.regime.unwrap_or_default();
            if name == "random" {
                let mut rng = StdRng::seed_from_u64(cli.seed);
                let spec = RandomSpec { regime, ..RandomSpec::new(fl, *n, *steps) };
                return Ok(complex_out(&random_complex(&mut rng, &spec)));
            }
            let restrict = |x: &MCSet| x.with_markings(regime, |_, c| c.marked);
            match lib(catalog::family(name, *n, *m, *face, fl))? {
                CatalogItem::Object(x) => complex_out(&restrict(&x)),
                CatalogItem::Map(f) => {
                    let f = Map {
                        domain: Arc::new(restrict(&f.domain)),
                        codomain: Arc::new(restrict(&f.codomain)),
                        assign: f.assign,
                    };
                    map_out(name, &f)
                }
            }
        }
        Command::Tensor { left, right } => {
            let (x, y) = (read_complex(left)?, read_complex(right)?);
            complex_out(&lib(tensor(&x, &y))?.object)
        }
        Command::Pushout { f, g } => {
            let (f, g) = (read_map(f, None)?, read_map(g, None)?);
            let po = lib(pushout(&f, &g))?;
            let doc = ComplexDocument::from_complex(&po.object)
                .with_map("left", &po.in_x, &po.object)
                .with_map("right", &po.in_b, &po.object);
            Outcome::doc(&doc)
        }
        Command::Triangulate { input } => {
            let t = lib(functors::triangulate(&read_complex(input)?))?;
            Outcome::doc(&SimplicialDocument::from_sset(&t.object))
        }
        Command::Ifree { input } => {
            let x = read_complex(input)?;
            let y: Arc<MCSet> = lib(functors::free_connections(&x, connections(cli)?))?;
            complex_out(&y)
        }
        Command::Iforget { input } => {
            let x = read_complex(input)?;
            complex_out(&lib(functors::forget_connections(&x, flavor_or(cli, Flavor::NONE), cli.cap))?.object)
        }
        Command::Icofree { input, top } => {
            let c = lib(functors::cofree(&read_complex(input)?, connections(cli)?, *top, cli.cap))?;
            complex_out(c.object())
        }
        Command::Trivialize { input, n } => {
            let x = read_complex(input)?;
            complex_out(&functors::trivialize(&x, *n))
        }
        Command::Mark { how, input } => {
            let x = read_complex(input)?;
            match how {
                Marking::Flat => complex_out(&*lib(functors::flat(&x))?),
                Marking::Sharp => complex_out(&*lib(functors::sharp(&x))?),
                Marking::Forget => complex_out(&*lib(functors::forget_markings(&x))?),
                Marking::Core => map_out("core", &lib(functors::core(&x))?.1),
            }
        }
        Command::Rlp { map, map_name, gen, n, m, face } => {
            let p = read_map(map, map_name.as_deref())?;
            let g = match lib(catalog::family(gen, *n, *m, *face, p.domain.shape))? {
                CatalogItem::Map(g) => g,
                CatalogItem::Object(_) => return Err(format!("{gen} is an object, not a map")),
            };
            match homotopy::has_rlp(&p, &g) {
                Verdict::Holds => Outcome::verdict(json!({ "verdict": true, "generator": gen }), true),
                Verdict::Fails(sq) => {
                    Outcome::verdict(json!({ "verdict": false, "generator": gen, "square": square_json(&sq) }), false)
                }
            }
        }
        Command::ComicalCheck { input } => {
            let v = lib(homotopy::is_comical_set(&read_complex(input)?, &family_options(cli)))?;
            match &v.failure {
                None => Outcome::verdict(json!({ "verdict": true, "cap": v.dim_cap }), true),
                Some((label, sq)) => Outcome::verdict(
                    json!({ "verdict": false, "cap": v.dim_cap, "generator": label, "square": square_json(sq) }),
                    false,
                ),
            }
        }
        Command::FibrantApprox { input, rounds } => {
            let (h, report) = lib(homotopy::bounded_fibrant_approx(&read_complex(input)?, &family_options(cli), *rounds))?;
            eprintln!(
                "{}",
                json!({ "rounds": report.rounds, "fillers": report.fillers, "saturated": report.saturated })
            );
            map_out("inclusion", &h.inclusion)
        }
        Command::WcsValidate { input, strong } => {
            let t = read_wcs(input)?;
            let problems = connect::validate_wcs(&t);
            let mut out = json!({ "verdict": problems.is_empty(), "problems": problems });
            let mut holds = problems.is_empty();
            if *strong && holds {
                let v = lib(connect::check_scs(&t, cli.cap.min(t.cap())))?;
                holds = v.holds();
                out["verdict"] = json!(holds);
                out["strong"] = json!(holds);
                if let Some(bad) = &v.violation {
                    out["problems"] = json!([bad.to_string()]);
                }
            }
            Outcome::verdict(out, holds)
        }
        Command::WcsSynthesize { input } => {
            let k = read_complex(input)?;
            let b = connections(cli)?;
            let (fy, eta) = lib(functors::unit_map(&k, b, cli.cap + 1))?;
            let gamma_y = lib(connect::wcs_from_counit(&Map::identity(&fy.object), &fy))?;
            let mut backend = FreeFillingComplex::new(&eta);
            let j = Map::from_empty(&k);
            let id = Map::identity(&k);
            let empty = lib(WcsTable::from_values(&j, b, cli.cap, |_, _| unreachable!("the empty complex has no cubes")))?;
            let ext = lib(connect::extend_wcs(&j, &id, &mut backend, &empty, &gamma_y, cli.cap))?;
            Outcome::doc(&WcsDocument::from_table(&ext.table))
        }
        Command::ScsExtend { input } => {
            let y = read_complex(input)?;
            let b = connections(cli)?;
            let mut backend = FreeFillingComplex::over_point(&y);
            let j = Map::from_empty(&y);
            let t0 = lib(WcsTable::from_values(&Map::identity(&j.domain), b, cli.cap, |_, _| {
                unreachable!("the empty complex has no cubes")
            }))?;
            let pt = catalog::point(b, Regime::Full);
            let base = lib(functors::forget_connections(&pt, Flavor::NONE, cli.cap + 1))?;
            let gamma_pt = lib(connect::wcs_from_counit(&Map::identity(&base.object), &base))?;
            let res = lib(connect::synthesize_scs(&j, &mut backend, &t0, &gamma_pt, cli.cap))?;
            Outcome::doc(&WcsDocument::from_table(&lib(res.on_support())?))
        }
        Command::Promote { input } => {
            let p = lib(connect::promote_scs(&read_wcs(input)?))?;
            complex_out(&p.object)
        }
        Command::QuotientCollapse { input, map_name } => {
            let x = read_map(input, map_name.as_deref())?;
            let q = lib(connect::not_surj_quotient(&x))?;
            map_out("quotient", &q.map)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display())),
                None => match io::stdout().lock().write_all(out.text.as_bytes()) {
                    Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.to_string()),
                    _ => Ok(()),
                },
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
