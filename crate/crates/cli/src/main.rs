use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::{json, Value};

use ordfree::adfam::{intersection_size, Branch};
use ordfree::cameron::{agreement_blocks, build_block_family, cameron_word_witness, BlockFreeFamily};
use ordfree::catalog;
use ordfree::dirprod::{pigeonhole_probe, relation_search, shared_coordinate_instance, sym4_corpus, FinSupportElement};
use ordfree::freegroup::{
    eval_word, nontriviality_witness_with, rank2_interval_basis, rank_omega_basis, sample_reduced_word,
    witness_corpus, Action, Budget, GeneratorId, Word,
};
use ordfree::order::{Frame, Interval, Rational};
use ordfree::par::Exec;
use ordfree::pingpong::{certify, PingPongTable};
use ordfree::plmap::MapDescriptor;
use ordfree::transitivity::{extend_to_n, OrderedTuple, TransitiveFreeFamily, TupleIndexRegistry};

#[derive(Parser)]
#[command(name = "ordfree", version, about = "Free subgroups of order-automorphism groups, with exact witnesses")]
struct Cli {
    #[command(flatten)]
    session: SessionConfig,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand and recorded in each report.
#[derive(Args, Clone, Debug, Serialize)]
struct SessionConfig {
    /// Seed for all sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search windows (or refinement rounds) per witness search.
    #[arg(long, global = true, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    budget_windows: u64,
    /// Largest grid denominator per window.
    #[arg(long, global = true, default_value_t = 48, value_parser = clap::value_parser!(u64).range(1..))]
    grid_density: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

impl SessionConfig {
    fn budget(&self) -> Budget {
        Budget {
            max_windows: self.budget_windows as usize,
            grid_density: self.grid_density as usize,
            ..Budget::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a word at a rational point.
    Eval {
        /// Action JSON; the built-in example when omitted.
        #[arg(long)]
        action: Option<PathBuf>,
        #[arg(long)]
        word: String,
        #[arg(long)]
        at: String,
    },
    /// Find a point moved by a word, or by a sample of random words.
    Witness {
        #[arg(long)]
        action: Option<PathBuf>,
        #[arg(long, conflicts_with = "random")]
        word: Option<String>,
        /// Number of random reduced words to test.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 16)]
        max_len: usize,
    },
    /// Certify a ping-pong table.
    Pingpong {
        /// Table JSON; the built-in example when omitted.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// The rank-2 pair of a frame and its first conjugate words.
    Basis {
        /// Frame JSON; the unit frame when omitted.
        #[arg(long)]
        frame: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        words: u64,
    },
    #[command(subcommand)]
    Cameron(CameronCmd),
    #[command(subcommand)]
    Transitive(TransitiveCmd),
    #[command(subcommand)]
    Dirprod(DirprodCmd),
    /// Emit a built-in artifact as JSON.
    Export {
        what: Builtin,
        #[arg(long, value_delimiter = ',')]
        branches: Vec<String>,
    },
    /// Parse an artifact and re-emit it canonically.
    Import {
        #[arg(long)]
        kind: Kind,
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum CameronCmd {
    /// Descriptor of the generator of one branch.
    Gen {
        #[arg(long)]
        branch: String,
        /// Family JSON; the unit frame over the whole line when omitted.
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Blocks below `blocks` where two generators agree.
    Agree {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 10)]
        blocks: u64,
    },
    /// Moved point of a word in generators `name#branch`.
    Witness {
        #[arg(long)]
        word: String,
        #[arg(long)]
        family: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TransitiveCmd {
    /// Generator carrying one tuple onto another.
    Map {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Registry JSON, read if present and rewritten with the new entry.
        #[arg(long)]
        registry: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        max_len: usize,
    },
}

#[derive(Subcommand)]
enum DirprodCmd {
    /// Shortest relation among a set of elements.
    Relation {
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = 5_000_000)]
        node_budget: usize,
    },
    /// Triple with `[f, [g1, g2]] = e` by support refinement.
    Probe {
        #[arg(long)]
        set: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    ExampleAction,
    ExampleTable,
    MutatedTable,
    Sym4Corpus,
    SharedInstance,
    Family,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Action,
    Table,
    Descriptor,
    Frame,
    Family,
    Registry,
    Elements,
    Word,
}

/// Exit status alongside the report.
struct Outcome {
    report: Value,
    ok: bool,
    /// Print as a bare string rather than JSON.
    plain: bool,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Outcome {
            report,
            ok: true,
            plain: false,
        }
    }

    fn with_status(report: Value, ok: bool) -> Self {
        Outcome {
            report,
            ok,
            plain: false,
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

fn load_action(path: Option<&Path>) -> Result<Action> {
    let a: Action = match path {
        Some(p) => read_json(p)?,
        None => catalog::example_action(),
    };
    a.validate()?;
    Ok(a)
}

fn load_family(path: Option<&Path>) -> Result<BlockFreeFamily> {
    match path {
        Some(p) => {
            let f: BlockFreeFamily = read_json(p)?;
            Ok(build_block_family(f.lambda, f.frame, f.blocks)?)
        }
        None => Ok(build_block_family(Interval::all(), Frame::unit(), None)?),
    }
}

/// Writes through a temporary file so readers never see a partial report.
fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

fn report(session: &SessionConfig, result: impl Serialize) -> Result<Value> {
    Ok(json!({ "config": session, "result": serde_json::to_value(result)? }))
}

fn run(cli: &Cli) -> Result<Outcome> {
    let s = &cli.session;
    let exec = Exec::default();
    match &cli.command {
        Command::Eval { action, word, at } => {
            let a = load_action(action.as_deref())?;
            let w: Word = word.parse()?;
            let x: Rational = at.parse()?;
            Ok(Outcome {
                report: Value::String(eval_word(&a, &w, &x)?.to_string()),
                ok: true,
                plain: true,
            })
        }
        Command::Witness {
            action,
            word,
            random,
            max_len,
        } => {
            let a = load_action(action.as_deref())?;
            let budget = s.budget();
            if let Some(word) = word {
                let w: Word = word.parse()?;
                return match nontriviality_witness_with(&a, &w, &budget, exec) {
                    Ok(found) => {
                        let verified = found.verify(&a, &w)?;
                        Ok(Outcome::with_status(
                            report(s, json!({ "word": w.to_string(), "witness": found, "verified": verified }))?,
                            verified,
                        ))
                    }
                    Err(ordfree::Error::Exhausted(n)) => Ok(Outcome::with_status(
                        report(s, json!({ "word": w.to_string(), "exhausted_after": n }))?,
                        false,
                    )),
                    Err(e) => Err(e.into()),
                };
            }
            let Some(count) = random else {
                bail!(ordfree::Error::Parse("give --word or --random".into()));
            };
            if *max_len == 0 {
                bail!(ordfree::Error::Parse("--max-len must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            let gens = a.generators();
            let words: Vec<Word> = (0..*count)
                .map(|_| sample_reduced_word(&mut rng, &gens, *max_len))
                .collect();
            let results = witness_corpus(&a, &words, &budget, exec);
            let mut entries = Vec::with_capacity(words.len());
            let mut verified = 0usize;
            for (w, r) in words.iter().zip(results) {
                match r {
                    Ok(found) => {
                        let v = found.verify(&a, w)?;
                        verified += usize::from(v);
                        entries.push(json!({ "word": w.to_string(), "point": found.point, "image": found.image, "verified": v }));
                    }
                    Err(ordfree::Error::Exhausted(n)) => {
                        entries.push(json!({ "word": w.to_string(), "exhausted_after": n }))
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(Outcome::with_status(
                report(s, json!({ "words": count, "verified": verified, "entries": entries }))?,
                verified == *count,
            ))
        }
        Command::Pingpong { table } => {
            let t: PingPongTable = match table {
                Some(p) => read_json(p)?,
                None => catalog::example_table(),
            };
            let cert = certify(&t)?;
            let ok = cert.is_certified();
            Ok(Outcome::with_status(report(s, cert)?, ok))
        }
        Command::Basis { frame, words } => {
            let frame: Frame = match frame {
                Some(p) => read_json(p)?,
                None => Frame::unit(),
            };
            let (f, g) = rank2_interval_basis(&frame.hull(), &frame)?;
            let b = rank_omega_basis(GeneratorId::named("f"), GeneratorId::named("g"));
            let ws: Vec<String> = (0..*words).map(|j| b.word(j).to_string()).collect();
            Ok(Outcome::ok(report(s, json!({ "f": f, "g": g, "words": ws }))?))
        }
        Command::Cameron(cmd) => run_cameron(s, cmd, exec),
        Command::Transitive(TransitiveCmd::Map {
            from,
            to,
            registry,
            max_len,
        }) => {
            let from: OrderedTuple = from.parse()?;
            let to: OrderedTuple = to.parse()?;
            let mut fam = extend_to_n(TransitiveFreeFamily::new(), *max_len)?;
            if let Some(p) = registry.as_deref().filter(|p| p.exists()) {
                fam.registry = read_json::<TupleIndexRegistry>(p)?;
            }
            let (index, descriptor) = fam.transitive_generator(&from, &to)?;
            if let Some(p) = registry {
                write_atomic(p, &serde_json::to_string_pretty(&fam.registry)?)?;
            }
            Ok(Outcome::ok(report(
                s,
                json!({ "index": index, "from": from, "to": to, "descriptor": descriptor }),
            )?))
        }
        Command::Dirprod(DirprodCmd::Relation {
            set,
            max_len,
            node_budget,
        }) => {
            let set: Vec<FinSupportElement> = read_json(set)?;
            match relation_search(&set, *max_len, *node_budget, exec) {
                Ok(r) => Ok(Outcome::ok(report(
                    s,
                    json!({ "word": r.word.to_string(), "length": r.length, "explored": r.explored }),
                )?)),
                Err(ordfree::Error::Exhausted(n)) => Ok(Outcome::with_status(
                    report(s, json!({ "word": null, "explored": n }))?,
                    false,
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::Dirprod(DirprodCmd::Probe { set }) => {
            let set: Vec<FinSupportElement> = read_json(set)?;
            match pigeonhole_probe(&set) {
                Ok(t) => Ok(Outcome::ok(report(s, t)?)),
                Err(ordfree::Error::Exhausted(n)) => Ok(Outcome::with_status(
                    report(s, json!({ "triple": null, "elements": n }))?,
                    false,
                )),
                Err(e) => Err(e.into()),
            }
        }
        Command::Export { what, branches } => {
            let value = match what {
                Builtin::ExampleAction => serde_json::to_value(catalog::example_action())?,
                Builtin::ExampleTable => serde_json::to_value(catalog::example_table())?,
                Builtin::MutatedTable => serde_json::to_value(catalog::mutated_table())?,
                Builtin::Sym4Corpus => serde_json::to_value(sym4_corpus())?,
                Builtin::SharedInstance => serde_json::to_value(shared_coordinate_instance())?,
                Builtin::Family => {
                    let bs = branches
                        .iter()
                        .map(|b| b.parse())
                        .collect::<ordfree::Result<Vec<Branch>>>()?;
                    serde_json::to_value(load_family(None)?.export(&bs))?
                }
            };
            Ok(Outcome::ok(value))
        }
        Command::Import { kind, file } => {
            fn canon<T: DeserializeOwned + Serialize>(p: &Path) -> Result<Value> {
                Ok(serde_json::to_value(read_json::<T>(p)?)?)
            }
            let value = match kind {
                Kind::Action => canon::<Action>(file)?,
                Kind::Table => canon::<PingPongTable>(file)?,
                Kind::Descriptor => {
                    let d: MapDescriptor = read_json(file)?;
                    d.validate()?;
                    serde_json::to_value(d)?
                }
                Kind::Frame => canon::<Frame>(file)?,
                Kind::Family => canon::<BlockFreeFamily>(file)?,
                Kind::Registry => canon::<TupleIndexRegistry>(file)?,
                Kind::Elements => canon::<Vec<FinSupportElement>>(file)?,
                Kind::Word => canon::<Word>(file)?,
            };
            Ok(Outcome::ok(value))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct AgreeReport {
    a: Branch,
    b: Branch,
    common_prefix: usize,
    blocks: Vec<u64>,
}

fn run_cameron(s: &SessionConfig, cmd: &CameronCmd, exec: Exec) -> Result<Outcome> {
    match cmd {
        CameronCmd::Gen { branch, family } => {
            let fam = load_family(family.as_deref())?;
            let g = fam.cameron_generator(branch.parse()?);
            Ok(Outcome::ok(report(s, g)?))
        }
        CameronCmd::Agree { a, b, blocks } => {
            let fam = load_family(None)?;
            let (a, b): (Branch, Branch) = (a.parse()?, b.parse()?);
            let found = agreement_blocks(&fam.cameron_generator(a.clone()), &fam.cameron_generator(b.clone()), *blocks)?;
            let r = AgreeReport {
                common_prefix: intersection_size(&a, &b)?,
                a,
                b,
                blocks: found,
            };
            Ok(Outcome::ok(report(s, r)?))
        }
        CameronCmd::Witness { word, family } => {
            let fam = load_family(family.as_deref())?;
            let w: Word = word.parse()?;
            match cameron_word_witness(&fam, &w, &s.budget(), exec) {
                Ok(found) => Ok(Outcome::ok(report(s, found)?)),
                Err(ordfree::Error::Exhausted(n)) => Ok(Outcome::with_status(
                    report(s, json!({ "word": w.to_string(), "exhausted_after": n }))?,
                    false,
                )),
                Err(e) => Err(e.into()),
            }
        }
    }
}

/// 2 for malformed input, 3 for well-formed input the library rejects.
fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(err) = e.downcast_ref::<ordfree::Error>() {
        return match err {
            ordfree::Error::Parse(_) => 2,
            ordfree::Error::Exhausted(_) => 1,
            _ => 3,
        };
    }
    if e.downcast_ref::<serde_json::Error>().is_some() || e.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    3
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|o| {
        let text = match &o.report {
            Value::String(t) if o.plain => t.clone(),
            v => serde_json::to_string_pretty(v)?,
        };
        match &cli.session.out {
            Some(p) => write_atomic(p, &format!("{text}\n"))?,
            None => {
                let mut out = io::stdout().lock();
                match writeln!(out, "{text}") {
                    Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {}
                    r => r?,
                }
            }
        }
        Ok(o.ok)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
