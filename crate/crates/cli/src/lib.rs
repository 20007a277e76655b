//! Batch front end. Results go to standard output as JSON (or DOT where
//! supported), diagnostics to standard error. Exit codes: 0 success,
//! 1 contract or input failure, 2 capacity exceeded.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use oimso_compose::{lift_modelcheck, lift_otxx, ComposeError, LiftOptions, OrderChoice};
use oimso_core::{
    decomposition_to_dot, gaifman, metrics, parse_edge_list, validate_decomposition, CoreError, DecompositionJson,
    Elem, Structure,
};
use oimso_decomp::{
    atom_decomposition, classify_torso, has_minor, improve, segment, separability_check, three_connected_decomposition,
    treewidth_exact, DecompError, Role, SeparabilityMode,
};
use oimso_logic::{check_order_invariance, evaluate, parse_formula, Assignment, Formula, LogicError, DEFAULT_ORDER_CAP};
use oimso_otxx::{compatible_orders, BagOrderProvider, OrderMode, OtxxError, OtxxJson};
use oimso_types::{cmso_type, separating_sentence, Caps, Realization, TypeError, TypeRegistry};
use serde::Serialize;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Compose(#[from] ComposeError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compose(e) if e.is_capacity() => 2,
            _ => 1,
        }
    }
}

macro_rules! via_compose {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Compose(e.into())
            }
        }
    )*};
}
via_compose!(CoreError, DecompError, LogicError, OtxxError, TypeError);

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "oimso", version, about = "Clique-separator decompositions, MSO types and lifted model checking")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct Format {
    /// JSON output (the default).
    #[arg(long, conflicts_with = "dot")]
    json: bool,
    /// DOT output.
    #[arg(long)]
    dot: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Provider {
    InputId,
    Bfs,
    Coloring,
}

impl Provider {
    fn resolve(self, k: usize) -> BagOrderProvider {
        match self {
            Provider::InputId => BagOrderProvider::InputId,
            Provider::Bfs => BagOrderProvider::Bfs,
            Provider::Coloring => BagOrderProvider::Coloring { k },
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose the Gaifman graph along clique separators (or into
    /// 3-connected pieces).
    Decompose {
        #[arg(short)]
        k: Option<usize>,
        /// Atoms of the improved-graph construction (the default).
        #[arg(long, conflicts_with = "three_connected")]
        atoms: bool,
        /// Adhesion-2 decomposition with classified torsos.
        #[arg(long)]
        three_connected: bool,
        #[command(flatten)]
        format: Format,
        input: PathBuf,
    },
    /// Add the edges of the improved graph.
    Improve {
        #[arg(short)]
        k: usize,
        #[command(flatten)]
        format: Format,
        input: PathBuf,
    },
    /// Segment a decomposition (by default the atom decomposition).
    Segment {
        #[arg(short)]
        k: Option<usize>,
        /// Decomposition JSON to segment instead.
        #[arg(long)]
        from: Option<PathBuf>,
        #[command(flatten)]
        format: Format,
        input: PathBuf,
    },
    /// Build the ordered extension used by the model checker.
    Otxx {
        #[arg(short)]
        k: usize,
        #[arg(long, value_enum, default_value = "input-id")]
        provider: Provider,
        /// Also list compatible orders, failing beyond this many.
        #[arg(long)]
        orders: Option<usize>,
        #[command(flatten)]
        format: Format,
        input: PathBuf,
    },
    /// Compute a rank-q type.
    Typecheck {
        #[command(flatten)]
        ty: TypeArgs,
        /// Write the type registry as JSON.
        #[arg(long)]
        registry: Option<PathBuf>,
        #[command(flatten)]
        format: Format,
        input: PathBuf,
    },
    /// Compare rank-q types and extract a separating sentence.
    Equiv {
        #[command(flatten)]
        ty: TypeArgs,
        #[command(flatten)]
        format: Format,
        first: PathBuf,
        second: PathBuf,
    },
    /// Check order invariance of a sentence on one structure.
    Invariance {
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
        cap: usize,
        #[arg(long)]
        formula: PathBuf,
        #[command(flatten)]
        format: Format,
        input: PathBuf,
    },
    /// Decide an order-invariant sentence by type composition.
    Modelcheck {
        #[arg(short)]
        k: usize,
        /// Composition rank; defaults to the rank of the formula.
        #[arg(short)]
        q: Option<usize>,
        #[arg(long)]
        formula: PathBuf,
        #[arg(long, value_enum, default_value = "input-id")]
        provider: Provider,
        /// Follow a random compatible order from this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_ORDER_CAP)]
        invariance_cap: usize,
        /// Skip the invariance check above the cap.
        #[arg(long)]
        trust: bool,
        /// Write the per-node trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        format: Format,
        input: PathBuf,
    },
    /// Direct reference computations.
    #[command(subcommand)]
    Oracle(Oracle),
}

#[derive(Args, Debug)]
struct TypeArgs {
    #[arg(short)]
    q: usize,
    /// Largest counting modulus.
    #[arg(long, default_value_t = 1)]
    modulus: u32,
    /// Include the order by increasing element id.
    #[arg(long, conflicts_with = "order")]
    ordered: bool,
    /// Include this order (comma-separated elements).
    #[arg(long)]
    order: Option<String>,
    /// Universe cap for every rank.
    #[arg(long)]
    universe_cap: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Oracle {
    /// Exact treewidth of the Gaifman graph.
    Treewidth { input: PathBuf },
    /// Whether the pattern graph is a minor.
    Minor { input: PathBuf, pattern: PathBuf },
    /// Evaluate a formula directly.
    Evaluate {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        order: Option<String>,
        input: PathBuf,
    },
    /// Count the components left by deleting a vertex set.
    Separability {
        /// Comma-separated vertices.
        #[arg(long)]
        set: String,
        #[arg(long, conflicts_with = "minor")]
        tw: Option<usize>,
        #[arg(long)]
        minor: Option<usize>,
        input: PathBuf,
    },
    /// Classify the graph as a torso.
    Classify { input: PathBuf },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            return match e.kind() {
                DisplayHelp | DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    match execute(cli.cmd) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: Command) -> Result<String> {
    match cmd {
        Command::Decompose {
            k,
            three_connected,
            format,
            input,
            ..
        } => {
            if !three_connected && k.is_none() {
                return Err(CliError::Input("atom decomposition needs -k".into()));
            }
            let a = load(&input)?;
            let g = gaifman(&a);
            let (td, labels) = if three_connected {
                let d = three_connected_decomposition(&g)?;
                let labels = d.class.iter().map(|(&t, c)| (t, label(c))).collect::<BTreeMap<_, _>>();
                (d.td, labels)
            } else {
                let d = atom_decomposition(&g, k.unwrap_or_default())?;
                let labels = d
                    .role
                    .iter()
                    .map(|(&t, r)| (t, match r { Role::Atom => "atom", Role::Separator => "separator" }.to_string()))
                    .collect();
                (d.td, labels)
            };
            if format.dot {
                return Ok(decomposition_to_dot(&td, None, Some(&labels)));
            }
            emit(&json!({
                "decomposition": DecompositionJson::from(&td).with_labels(labels),
                "metrics": metrics(&td),
                "validation": validate_decomposition(&a, &td),
            }))
        }
        Command::Improve { k, format, input } => {
            let g = gaifman(&load(&input)?);
            let h = improve(&g, k);
            let added: Vec<(Elem, Elem)> = h.edges().filter(|&(u, v)| !g.has_edge(u, v)).collect();
            if format.dot {
                let mut s = String::from("graph improved {\n");
                for v in h.vertices() {
                    let _ = writeln!(s, "  {v};");
                }
                for (u, v) in h.edges() {
                    let style = if g.has_edge(u, v) { "" } else { " [style=dashed]" };
                    let _ = writeln!(s, "  {u} -- {v}{style};");
                }
                s.push_str("}\n");
                return Ok(s);
            }
            emit(&json!({
                "vertices": h.vertices().collect::<Vec<_>>(),
                "edges": h.edges().collect::<Vec<_>>(),
                "added": added,
            }))
        }
        Command::Segment { k, from, format, input } => {
            let a = load(&input)?;
            let td = match (&from, k) {
                (Some(path), _) => serde_json::from_str::<DecompositionJson>(&read(path)?)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
                    .to_tree()?,
                (None, Some(k)) => atom_decomposition(&gaifman(&a), k)?.td,
                (None, None) => return Err(CliError::Input("segment needs -k or --from".into())),
            };
            let d = segment(&td);
            if format.dot {
                return Ok(decomposition_to_dot(&d.td, Some(&d.kind), None));
            }
            emit(&json!({
                "decomposition": DecompositionJson::from(&d),
                "violations": d.segmentation_violations(),
                "validation": validate_decomposition(&a, &d.td),
            }))
        }
        Command::Otxx {
            k,
            provider,
            orders,
            format,
            input,
        } => {
            let a = load(&input)?;
            let x = lift_otxx(&a, k, &provider.resolve(k))?;
            if format.dot {
                let labels = x
                    .bag_orders()
                    .iter()
                    .map(|(&t, o)| (t, format!("order {}", join(o))))
                    .collect();
                return Ok(decomposition_to_dot(&x.tree().td, Some(&x.tree().kind), Some(&labels)));
            }
            let mut v = serde_json::to_value(OtxxJson::from(&x)).expect("otxx serializes");
            if let Some(cap) = orders {
                v["orders"] = json!(compatible_orders(&x, OrderMode::Enumerate { cap })?);
            }
            emit(&v)
        }
        Command::Typecheck {
            ty,
            registry,
            format,
            input,
        } => {
            no_dot(format)?;
            let a = load(&input)?;
            let order = ty.order_for(&a)?;
            let reg = TypeRegistry::with_caps(ty.caps());
            let t = cmso_type(&reg, &a, &[], ty.q, ty.modulus, order.as_deref())?;
            if let Some(path) = registry {
                write(&path, &serde_json::to_string_pretty(&reg.to_json()).expect("json"))?;
            }
            emit(&json!({
                "type": t.0,
                "rank": ty.q,
                "modulus": ty.modulus,
                "ordered": order.is_some(),
                "elements": a.len(),
            }))
        }
        Command::Equiv {
            ty,
            format,
            first,
            second,
        } => {
            no_dot(format)?;
            let reg = TypeRegistry::with_caps(ty.caps());
            let mut real = Vec::new();
            for path in [&first, &second] {
                let a = load(path)?;
                let order = ty.order_for(&a)?;
                real.push(Realization {
                    structure: a,
                    sets: Vec::new(),
                    order,
                });
            }
            let types = real
                .iter()
                .map(|r| cmso_type(&reg, &r.structure, &[], ty.q, ty.modulus, r.order.as_deref()))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let sep = separating_sentence(&reg, &real[0], &real[1], ty.q, ty.modulus)?;
            emit(&json!({
                "equivalent": types[0] == types[1],
                "types": [types[0].0, types[1].0],
                "separating": sep.map(|f| f.to_string()),
            }))
        }
        Command::Invariance {
            cap,
            formula,
            format,
            input,
        } => {
            no_dot(format)?;
            let a = load(&input)?;
            let phi = load_formula(&formula, &a)?;
            let r = check_order_invariance(&phi, &a, cap)?;
            emit(&json!({
                "invariant": r.invariant,
                "witness": r.witness.map(|(o1, o2)| json!({"first": o1, "second": o2})),
            }))
        }
        Command::Modelcheck {
            k,
            q,
            formula,
            provider,
            seed,
            invariance_cap,
            trust,
            trace,
            jobs,
            format,
            input,
        } => {
            no_dot(format)?;
            if jobs == 0 {
                return Err(CliError::Input("--jobs must be positive".into()));
            }
            let a = load(&input)?;
            let phi = load_formula(&formula, &a)?;
            let opts = LiftOptions {
                provider: provider.resolve(k),
                order: seed.map_or(OrderChoice::First, OrderChoice::Seeded),
                invariance_cap,
                trust_invariance: trust,
                jobs,
                trace: trace.is_some(),
            };
            let outcome = lift_modelcheck(&a, &phi, k, q.unwrap_or_else(|| phi.rank()), &opts)?;
            if let (Some(path), Some(t)) = (&trace, &outcome.trace) {
                write(path, &serde_json::to_string_pretty(t).expect("json"))?;
            }
            Ok(format!("{}\n", outcome.verdict))
        }
        Command::Oracle(o) => oracle(o),
    }
}

fn oracle(o: Oracle) -> Result<String> {
    match o {
        Oracle::Treewidth { input } => emit(&json!({ "treewidth": treewidth_exact(&gaifman(&load(&input)?))? })),
        Oracle::Minor { input, pattern } => {
            let g = gaifman(&load(&input)?);
            let h = gaifman(&load(&pattern)?);
            emit(&json!({ "minor": has_minor(&g, &h)? }))
        }
        Oracle::Evaluate { formula, order, input } => {
            let a = load(&input)?;
            let phi = load_formula(&formula, &a)?;
            let order = order.map(|s| parse_list(&s)).transpose()?;
            Ok(format!("{}\n", evaluate(&a, &Assignment::new(), &phi, order.as_deref())?))
        }
        Oracle::Separability { set, tw, minor, input } => {
            let g = gaifman(&load(&input)?);
            let s: BTreeSet<Elem> = parse_list(&set)?.into_iter().collect();
            let mode = match (tw, minor) {
                (Some(k), None) => SeparabilityMode::Tw { k },
                (None, Some(ell)) => SeparabilityMode::Minor { ell },
                _ => return Err(CliError::Input("pass one of --tw or --minor".into())),
            };
            emit(&separability_check(&g, &s, mode)?)
        }
        Oracle::Classify { input } => {
            let g = gaifman(&load(&input)?);
            emit(&json!({ "class": classify_torso(&g).map(|c| label(&c)) }))
        }
    }
}

impl TypeArgs {
    fn caps(&self) -> Caps {
        match self.universe_cap {
            Some(n) => Caps {
                max_rank: Caps::permissive().max_rank,
                universe: vec![n],
            },
            None => Caps::default(),
        }
    }

    fn order_for(&self, a: &Structure) -> Result<Option<Vec<Elem>>> {
        if self.ordered {
            return Ok(Some(a.universe().iter().copied().collect()));
        }
        self.order.as_deref().map(parse_list).transpose()
    }
}

fn label(c: &impl Serialize) -> String {
    serde_json::to_value(c)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn no_dot(format: Format) -> Result<()> {
    if format.dot {
        return Err(CliError::Input("this command has no DOT output".into()));
    }
    Ok(())
}

fn emit(v: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Input(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn join(items: &[Elem]) -> String {
    items.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

fn parse_list(s: &str) -> Result<Vec<Elem>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::Input(format!("not an element: {t:?}"))))
        .collect()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Structure JSON, or an edge list (`n m` then `m` lines `u v`).
pub fn load(path: &Path) -> Result<Structure> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    } else {
        Ok(parse_edge_list(&text)?.to_structure())
    }
}

fn load_formula(path: &Path, a: &Structure) -> Result<Formula> {
    Ok(parse_formula(read(path)?.trim(), a.vocabulary())?)
}
