//! `dendro`: batch front-end for the enumerations and verifications.
//!
//! Every command prints one JSON report on stdout. Exit status: 0 when all
//! checks pass, 1 on a failed check, 2 on a usage error, 3 when an
//! enumeration was truncated and `--allow-truncated` was not given.

use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dendro::free::{hom_free, GradedSet};
use dendro::group_actions::bousfield::{check_bousfield, hall_extract, hall_search, FiniteMonoid, PointedMagma, SimplicialSetData};
use dendro::group_actions::category::{CatAction, CatActionJson};
use dendro::group_actions::operad::GroupActionOnOperad;
use dendro::group_actions::FiniteGroup;
use dendro::kan::{verify_lke, verify_lknerve, verify_pullback_hom, verify_splitsc};
use dendro::presheaf::{check_strict_segal, Nerve, PresheafJson, Tabulated};
use dendro::skeleton::Skeleton;
use dendro::tree::{enumerate_codes, Tree, TreeJson};
use dendro::filtration::verify_filtration;
use dendro::omega::hom_omega;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

const DEFAULT_TREE_BOUND: usize = 3;
const DEFAULT_ELT_BOUND: usize = 2;

#[derive(Parser)]
#[command(name = "dendro", version, about = "Trees, free operads and dendroidal sets: bounded enumeration and verification")]
struct Cli {
    /// Worker threads for enumerations (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Wrap the report with run metadata (timestamp, elapsed time).
    #[arg(long, global = true)]
    meta: bool,
    /// Exit 0 on passing checks even when an enumeration was truncated.
    #[arg(long, global = true)]
    allow_truncated: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate, canonicalize and inspect trees.
    #[command(subcommand)]
    Trees(TreesCmd),
    /// List a hom-set of trees or of free operads.
    #[command(subcommand)]
    Hom(HomCmd),
    /// Tabulate the nerve of a free operad as presheaf JSON.
    Nerve(NerveArgs),
    /// Check the strict Segal condition on presheaf JSON.
    SegalCheck(InputArgs),
    /// Verify a left Kan extension along J.
    KanVerify(KanArgs),
    /// Verify the primitive-dendrex filtration of a free nerve.
    FiltrationVerify(FiltrationArgs),
    /// Validate group or category actions on operads.
    #[command(subcommand)]
    Action(ActionCmd),
    /// Hall's bracket characterization of groups and Bousfield–Segal maps.
    #[command(subcommand)]
    Bousfield(BousfieldCmd),
    /// Run a named check.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum TreesCmd {
    /// All canonical trees up to a vertex and valence bound.
    Enumerate {
        #[arg(long, default_value_t = DEFAULT_TREE_BOUND)]
        max_vertices: usize,
        #[arg(long, default_value_t = 2)]
        max_valence: usize,
    },
    /// The canonical code of a tree, optionally compared with another.
    Canonical {
        #[arg(long)]
        input: String,
        #[arg(long)]
        other: Option<String>,
    },
    /// The automorphism group of a tree.
    Aut(InputArgs),
    /// Graphviz rendering of a tree.
    Dot(InputArgs),
}

#[derive(Subcommand)]
enum HomCmd {
    /// `Hom_Ω(source, target)` as edge maps.
    Omega {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
    },
    /// `Hom(T_source, T_target)` between free operads.
    Free {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        /// Vertex bound on generator images; required unless the target is finitary.
        #[arg(long)]
        bound: Option<usize>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// A file path, or inline JSON.
    #[arg(long)]
    input: String,
}

#[derive(Args)]
struct NerveArgs {
    #[arg(long)]
    gens: String,
    #[arg(long, default_value_t = DEFAULT_TREE_BOUND)]
    max_vertices: usize,
    /// Defaults to the largest generator valence, at least 2.
    #[arg(long)]
    max_valence: Option<usize>,
    /// Total label vertices per dendrex; defaults to what the skeleton needs.
    #[arg(long)]
    elt_bound: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Proposition {
    Lke,
    Lknerve,
    Pullback,
    Splitsc,
}

#[derive(Args)]
struct KanArgs {
    #[arg(long, value_enum)]
    proposition: Proposition,
    /// The tree S (lke, splitsc).
    #[arg(long)]
    tree: Option<String>,
    /// The generators N of the source free operad (for pullback: M).
    #[arg(long)]
    gens: String,
    /// The generators M whose nerve is extended (lknerve).
    #[arg(long)]
    operad_gens: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TREE_BOUND)]
    tree_bound: usize,
    #[arg(long, default_value_t = DEFAULT_ELT_BOUND)]
    elt_bound: usize,
}

#[derive(Args)]
struct FiltrationArgs {
    #[arg(long)]
    gens: String,
    #[arg(long, default_value_t = DEFAULT_TREE_BOUND)]
    bound: usize,
    #[arg(long)]
    max_valence: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ActionKind {
    Group,
    Category,
}

#[derive(Subcommand)]
enum ActionCmd {
    /// Check the action axioms exhaustively.
    Validate {
        #[arg(long, value_enum)]
        kind: ActionKind,
        #[arg(long)]
        input: String,
    },
}

#[derive(Subcommand)]
enum BousfieldCmd {
    /// Test Hall's relations on a pointed bracket table and extract the group.
    Extract {
        #[arg(long)]
        magma: String,
    },
    /// Enumerate every bracket table of a given order.
    Search {
        #[arg(long)]
        order: usize,
    },
    /// The maps ψ_n on the nerve of a group or monoid.
    Maps {
        /// `{"table": [[...]]}`.
        #[arg(long, conflicts_with = "monoid")]
        group: Option<String>,
        /// `{"table": [[...]], "unit": u}`.
        #[arg(long)]
        monoid: Option<String>,
        #[arg(long, default_value_t = 2)]
        level: usize,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: pullback, segal, hall, lke, lknerve, splitsc, filtration.
    #[arg(long)]
    prop: String,
    #[arg(long)]
    gens: Option<String>,
    #[arg(long)]
    operad_gens: Option<String>,
    #[arg(long)]
    tree: Option<String>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    order: Option<usize>,
    /// Tree bound.
    #[arg(long, default_value_t = DEFAULT_TREE_BOUND)]
    bound: usize,
    #[arg(long)]
    elt_bound: Option<usize>,
}

const PROPOSITIONS: &str = "pullback, segal, hall, lke, lknerve, splitsc, filtration";

/// A usage error: bad flags or unreadable input.
struct Usage(String);

type Run = Result<Report, Usage>;

struct Report {
    command: &'static str,
    inputs: Value,
    truncated: bool,
    pass: bool,
    results: Value,
    witnesses: Vec<Value>,
}

impl Report {
    fn new(command: &'static str, inputs: Value, results: Value) -> Report {
        Report { command, inputs, truncated: false, pass: true, results, witnesses: Vec::new() }
    }

    fn check(mut self, pass: bool, truncated: bool, witnesses: Vec<Value>) -> Report {
        self.pass = pass;
        self.truncated = truncated;
        self.witnesses = witnesses;
        if !pass && self.witnesses.is_empty() {
            self.witnesses.push(json!("see results"));
        }
        self
    }

    fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "truncated": self.truncated,
            "pass": self.pass,
            "results": self.results,
            "witnesses": self.witnesses,
        })
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Usage> {
    Err(Usage(msg.into()))
}

/// Inline JSON when the argument starts with `{` or `[`, a file otherwise.
fn read_text(arg: &str) -> Result<String, Usage> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| Usage(format!("{arg}: {e}")))
    }
}

fn parse<T: DeserializeOwned>(arg: &str, what: &str) -> Result<T, Usage> {
    let text = read_text(arg)?;
    serde_json::from_str(&text).map_err(|e| Usage(format!("malformed {what} JSON: {e}")))
}

fn load_tree(arg: &str) -> Result<Tree, Usage> {
    let j: TreeJson = parse(arg, "tree")?;
    Tree::from_json(&j).map_err(|e| Usage(e.to_string()))
}

fn load_gens(arg: &str) -> Result<GradedSet, Usage> {
    let g: GradedSet = parse(arg, "generator")?;
    g.validate().map_err(|e| Usage(e.to_string()))?;
    Ok(g)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn strings(v: &[String]) -> Vec<Value> {
    v.iter().map(|s| json!(s)).collect()
}

/// An edge map written with edge names.
fn named_map(r: &Tree, s: &Tree, map: &[usize]) -> Value {
    let m: serde_json::Map<String, Value> = map.iter().enumerate().map(|(e, &f)| (r.edge_name(e).to_string(), json!(s.edge_name(f)))).collect();
    Value::Object(m)
}

fn cmd_trees(cmd: &TreesCmd) -> Run {
    match cmd {
        TreesCmd::Enumerate { max_vertices, max_valence } => {
            let codes = enumerate_codes(*max_vertices, *max_valence);
            let mut by_vertices = vec![0usize; max_vertices + 1];
            let trees: Vec<Value> = codes
                .iter()
                .map(|c| {
                    let t = Tree::from_code(&c.0).expect("enumerated codes decode");
                    by_vertices[t.vertex_count()] += 1;
                    json!({"code": c.0, "vertices": t.vertex_count(), "valences": t.valences(), "edges": t.edge_count()})
                })
                .collect();
            Ok(Report::new(
                "trees enumerate",
                json!({"max_vertices": max_vertices, "max_valence": max_valence}),
                json!({"count": codes.len(), "by_vertices": by_vertices, "trees": trees}),
            ))
        }
        TreesCmd::Canonical { input, other } => {
            let t = load_tree(input)?;
            let code = t.canonical_form();
            let mut results = json!({"code": code.0, "vertices": t.vertex_count(), "edges": t.edge_count()});
            if let Some(o) = other {
                let u = load_tree(o)?;
                let other_code = u.canonical_form();
                results["other_code"] = json!(other_code.0);
                results["isomorphic"] = json!(other_code == code);
            }
            Ok(Report::new("trees canonical", json!({"input": input, "other": other}), results))
        }
        TreesCmd::Aut(InputArgs { input }) => {
            let t = load_tree(input)?;
            let auts: Vec<Value> = t.automorphisms().iter().map(|a| named_map(&t, &t, a)).collect();
            Ok(Report::new("trees aut", json!({"input": input}), json!({"order": auts.len(), "automorphisms": auts})))
        }
        TreesCmd::Dot(InputArgs { input }) => {
            let t = load_tree(input)?;
            Ok(Report::new("trees dot", json!({"input": input}), json!({"dot": t.to_dot()})))
        }
    }
}

fn cmd_hom(cmd: &HomCmd) -> Run {
    match cmd {
        HomCmd::Omega { source, target } => {
            let (r, s) = (load_tree(source)?, load_tree(target)?);
            let maps: Vec<Value> = hom_omega(&r, &s).iter().map(|f| named_map(&r, &s, &f.edge_map)).collect();
            Ok(Report::new("hom omega", json!({"source": source, "target": target}), json!({"count": maps.len(), "morphisms": maps})))
        }
        HomCmd::Free { source, target, bound } => {
            let (n, m) = (load_gens(source)?, load_gens(target)?);
            let needed: Option<usize> = n.valences().iter().map(|&k| m.max_vertices(k)).try_fold(0, |acc, b| b.map(|b| acc.max(b)));
            let bound = match (bound, needed) {
                (Some(b), _) => *b,
                (None, Some(b)) => b,
                (None, None) => {
                    return usage(
                        "--bound is required: the target has a unary generator, or both nullary and higher generators, \
                         so some T_M(n) is infinite",
                    )
                }
            };
            let hom = hom_free(&n, &m, bound);
            let maps: Vec<Value> = hom.items.iter().map(|f| f.to_json(&n, &m)).collect();
            let r = Report::new(
                "hom free",
                json!({"source": source, "target": target, "bound": bound}),
                json!({"count": maps.len(), "complete": hom.complete, "morphisms": maps}),
            );
            Ok(r.check(true, !hom.complete, Vec::new()))
        }
    }
}

fn default_valence(gens: &[&GradedSet], trees: &[&Tree]) -> usize {
    let g = gens.iter().map(|m| m.max_valence()).max().unwrap_or(0);
    let t = trees.iter().flat_map(|t| t.valences()).max().unwrap_or(0);
    g.max(t).max(2)
}

fn cmd_nerve(a: &NerveArgs) -> Run {
    let m = load_gens(&a.gens)?;
    let valence = a.max_valence.unwrap_or_else(|| default_valence(&[&m], &[]));
    let sk = Arc::new(Skeleton::new(a.max_vertices, valence));
    let nerve = Nerve::free(&sk, &m, a.elt_bound);
    let tab = Tabulated::from_presheaf(&nerve);
    let r = Report::new(
        "nerve",
        json!({"gens": a.gens, "max_vertices": a.max_vertices, "max_valence": valence, "elt_bound": a.elt_bound}),
        to_value(&tab.to_json()),
    );
    Ok(r.check(true, dendro::presheaf::Presheaf::truncated(&nerve), Vec::new()))
}

/// Presheaf JSON, either bare or as the results of a `nerve` report.
fn load_presheaf(arg: &str) -> Result<Tabulated, Usage> {
    let v: Value = parse(arg, "presheaf")?;
    let inner = match v.get("results") {
        Some(r) if v.get("command").is_some() => r.clone(),
        _ => v,
    };
    let pj: PresheafJson = serde_json::from_value(inner).map_err(|e| Usage(format!("malformed presheaf JSON: {e}")))?;
    Tabulated::from_json(&pj).map_err(|e| Usage(e.to_string()))
}

fn segal(command: &'static str, input: &str) -> Run {
    let tab = load_presheaf(input)?;
    let r = check_strict_segal(&tab);
    let witnesses = r
        .levels
        .iter()
        .filter(|l| !l.empty_core && !(l.injective && l.surjective))
        .map(|l| json!({"tree": l.tree, "witness": l.witness}))
        .collect();
    Ok(Report::new(command, json!({"input": input}), to_value(&r)).check(r.pass, r.truncated, witnesses))
}

struct KanInputs<'a> {
    proposition: Proposition,
    tree: Option<&'a str>,
    gens: &'a str,
    operad_gens: Option<&'a str>,
    tree_bound: usize,
    elt_bound: usize,
    pullback_elt_bound: Option<usize>,
}

fn kan(command: &'static str, k: &KanInputs) -> Run {
    let n = load_gens(k.gens)?;
    let tree = k.tree.map(load_tree).transpose()?;
    let operad = k.operad_gens.map(load_gens).transpose()?;
    let trees: Vec<&Tree> = tree.iter().collect();
    let mut gens = vec![&n];
    gens.extend(operad.iter());
    let sk = Arc::new(Skeleton::new(k.tree_bound, default_valence(&gens, &trees)));
    let locate = |name: &str| -> Result<usize, Usage> {
        let t = tree.as_ref().ok_or_else(|| Usage(format!("--tree is required for {name}")))?;
        sk.locate(t)
            .map(|(s, _)| s)
            .ok_or_else(|| Usage(format!("the tree has {} vertices, above --tree-bound {}", t.vertex_count(), k.tree_bound)))
    };
    let inputs = json!({
        "tree": k.tree, "gens": k.gens, "operad_gens": k.operad_gens,
        "tree_bound": k.tree_bound, "elt_bound": k.elt_bound,
    });
    let (results, pass, truncated, witnesses) = match k.proposition {
        Proposition::Lke => {
            let r = verify_lke(&sk, locate("lke")?, &n, k.elt_bound);
            (to_value(&r), r.bijective, r.truncated, r.witnesses.clone())
        }
        Proposition::Lknerve => {
            let m = operad.as_ref().ok_or_else(|| Usage("--operad-gens is required for lknerve".into()))?;
            let r = verify_lknerve(&sk, m, &n, k.elt_bound);
            (to_value(&r), r.bijective, r.truncated, r.witnesses.clone())
        }
        Proposition::Pullback => {
            let r = verify_pullback_hom(&sk, &n, k.pullback_elt_bound);
            (to_value(&r), r.pass, r.truncated, r.witnesses.clone())
        }
        Proposition::Splitsc => {
            let r = verify_splitsc(&sk, locate("splitsc")?, &n, k.elt_bound);
            (to_value(&r), r.pass, r.truncated, r.witnesses.clone())
        }
    };
    Ok(Report::new(command, inputs, results).check(pass, truncated, strings(&witnesses)))
}

fn filtration(command: &'static str, gens: &str, bound: usize, max_valence: Option<usize>) -> Run {
    let m = load_gens(gens)?;
    let r = verify_filtration(&m, bound, max_valence);
    let inputs = json!({"gens": gens, "bound": bound, "max_valence": max_valence});
    Ok(Report::new(command, inputs, to_value(&r)).check(r.pass(), r.truncated, strings(&r.witnesses)))
}

fn cmd_action(cmd: &ActionCmd) -> Run {
    let ActionCmd::Validate { kind, input } = cmd;
    let text = read_text(input)?;
    let (kind_name, report) = match kind {
        ActionKind::Group => {
            let a = GroupActionOnOperad::from_json(&text).map_err(|e| Usage(format!("malformed group action: {e}")))?;
            ("group", a.validate())
        }
        ActionKind::Category => {
            let j: CatActionJson = serde_json::from_str(&text).map_err(|e| Usage(format!("malformed category action JSON: {e}")))?;
            let a = CatAction::from_json(&j).map_err(|e| Usage(format!("malformed category action: {e}")))?;
            ("category", a.validate())
        }
    };
    let witnesses = report.violations.iter().map(to_value).collect();
    Ok(Report::new("action validate", json!({"kind": kind_name, "input": input}), to_value(&report)).check(report.pass, false, witnesses))
}

fn hall(command: &'static str, order: usize) -> Run {
    if !(1..=4).contains(&order) {
        return usage(format!("--order must be between 1 and 4, got {order}"));
    }
    let r = hall_search(order).map_err(|e| Usage(e.to_string()))?;
    Ok(Report::new(command, json!({"order": order}), to_value(&r)).check(r.pass, false, Vec::new()))
}

fn cmd_bousfield(cmd: &BousfieldCmd) -> Run {
    match cmd {
        BousfieldCmd::Extract { magma } => {
            let m = PointedMagma::from_json(&read_text(magma)?).map_err(|e| Usage(format!("malformed magma: {e}")))?;
            let r = hall_extract(&m);
            let pass = r.relations_hold && r.group.is_some() && r.round_trip;
            let mut witnesses = Vec::new();
            if let Some(rel) = &r.failed_relation {
                witnesses.push(json!({"relation": rel, "elements": r.witness}));
            }
            if let Some(e) = &r.group_error {
                witnesses.push(json!({"group": e}));
            }
            Ok(Report::new("bousfield extract", json!({"magma": magma}), to_value(&r)).check(pass, false, witnesses))
        }
        BousfieldCmd::Search { order } => hall("bousfield search", *order),
        BousfieldCmd::Maps { group, monoid, level } => {
            let m = match (group, monoid) {
                (Some(g), None) => FiniteMonoid::of_group(&FiniteGroup::from_json(&read_text(g)?).map_err(|e| Usage(format!("malformed group: {e}")))?),
                (None, Some(m)) => {
                    let raw: FiniteMonoid = parse(m, "monoid")?;
                    FiniteMonoid::new(raw.table, raw.unit).map_err(|e| Usage(format!("malformed monoid: {e}")))?
                }
                _ => return usage("exactly one of --group and --monoid is required"),
            };
            if *level < 1 {
                return usage("--level must be at least 1");
            }
            let x = SimplicialSetData::nerve(&m, *level);
            let r = check_bousfield(&x, *level).map_err(|e| Usage(e.to_string()))?;
            let witnesses = r.collision.iter().map(to_value).collect();
            let inputs = json!({"group": group, "monoid": monoid, "level": level});
            Ok(Report::new("bousfield maps", inputs, to_value(&r)).check(r.bijective, false, witnesses))
        }
    }
}

fn cmd_verify(a: &VerifyArgs) -> Run {
    let need = |v: &Option<String>, flag: &str| -> Result<String, Usage> {
        v.clone().ok_or_else(|| Usage(format!("--{flag} is required for --prop {}", a.prop)))
    };
    let kan_with = |p: Proposition, gens: String| {
        kan(
            "verify",
            &KanInputs {
                proposition: p,
                tree: a.tree.as_deref(),
                gens: &gens,
                operad_gens: a.operad_gens.as_deref(),
                tree_bound: a.bound,
                elt_bound: a.elt_bound.unwrap_or(DEFAULT_ELT_BOUND),
                pullback_elt_bound: a.elt_bound,
            },
        )
    };
    let mut r = match a.prop.as_str() {
        "pullback" => kan_with(Proposition::Pullback, need(&a.gens, "gens")?),
        "lke" => kan_with(Proposition::Lke, need(&a.gens, "gens")?),
        "lknerve" => kan_with(Proposition::Lknerve, need(&a.gens, "gens")?),
        "splitsc" => kan_with(Proposition::Splitsc, need(&a.gens, "gens")?),
        "segal" => segal("verify", &need(&a.input, "input")?),
        "hall" => hall("verify", a.order.ok_or_else(|| Usage("--order is required for --prop hall".into()))?),
        "filtration" => filtration("verify", &need(&a.gens, "gens")?, a.bound, None),
        other => usage(format!("unknown proposition `{other}`; available: {PROPOSITIONS}")),
    }?;
    r.inputs["prop"] = json!(a.prop);
    Ok(r)
}

fn run(cli: &Cli) -> Run {
    match &cli.command {
        Command::Trees(c) => cmd_trees(c),
        Command::Hom(c) => cmd_hom(c),
        Command::Nerve(a) => cmd_nerve(a),
        Command::SegalCheck(a) => segal("segal-check", &a.input),
        Command::KanVerify(a) => kan(
            "kan-verify",
            &KanInputs {
                proposition: a.proposition,
                tree: a.tree.as_deref(),
                gens: &a.gens,
                operad_gens: a.operad_gens.as_deref(),
                tree_bound: a.tree_bound,
                elt_bound: a.elt_bound,
                pullback_elt_bound: Some(a.elt_bound),
            },
        ),
        Command::FiltrationVerify(a) => filtration("filtration-verify", &a.gens, a.bound, a.max_valence),
        Command::Action(c) => cmd_action(c),
        Command::Bousfield(c) => cmd_bousfield(c),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let payload = report.to_json();
    let out = if cli.meta {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        json!({
            "meta": {"unix_time": secs, "elapsed_ms": start.elapsed().as_millis() as u64, "version": env!("CARGO_PKG_VERSION")},
            "report": payload,
        })
    } else {
        payload
    };
    // a closed pipe is not an error worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&out).expect("reports serialize"));
    if !report.pass {
        ExitCode::from(1)
    } else if report.truncated && !cli.allow_truncated {
        eprintln!("note: the enumeration was truncated; pass --allow-truncated to accept");
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}
