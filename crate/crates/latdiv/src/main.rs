//! Command-line driver for the lattice diversity library.
//!
//! Exit codes: 0 on success, 1 on validation or computation failure, 2 on
//! usage errors. Diagnostics go to stderr, data to stdout; output depends
//! only on file content and flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num::rational::BigRational;

use latdiv::birkhoff::{self, DEFAULT_JIRR_LIMIT};
use latdiv::constructions::{
    self, divisor_lattice, multiset_diversity, multiset_lattice, powerset_lattice,
};
use latdiv::diversity::{triangle_scan, DiversityFn, FiniteMetric, Validity, DEFAULT_TUPLE_LIMIT};
use latdiv::document::{
    self, function_to_point, parse_metric, parse_point, point_to_function, LoadedDocument,
};
use latdiv::lattice::{FiniteLattice, DEFAULT_ELEMENT_LIMIT};
use latdiv::rational::{format_rational, parse_rational};
use latdiv::render::render_hasse;
use latdiv::tightspan::{
    self, constraint_system, enumerate_tight_span, kappa, TlMembership,
    DEFAULT_CONSTRAINT_ELEMENTS, DEFAULT_ENUMERATION_ELEMENTS,
};

#[derive(Parser)]
#[command(
    name = "latdiv",
    version,
    about = "Diversities on finite lattices: validation, generators, Birkhoff representation, exact tight spans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a document: lattice structure, diversity axioms, triangle
    /// scan, modularity, distributivity
    Check { file: PathBuf },
    /// Generate a lattice/diversity document
    Gen(GenArgs),
    /// Print the induced metric on the atoms
    Metric { file: PathBuf },
    /// Print n-way distances over the atoms
    Nway {
        file: PathBuf,
        /// Tuple size
        #[arg(long)]
        n: usize,
        /// Also verify the n-way distance axioms
        #[arg(long)]
        check: bool,
    },
    /// Birkhoff representation summary and extension-theorem report
    Birkhoff { file: PathBuf },
    /// Tight-span operations on a diversity document
    Tightspan(TightspanArgs),
    /// Render the Hasse diagram as a DOT digraph
    Render {
        file: PathBuf,
        /// Output DOT file
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
#[command(group(
    ArgGroup::new("generator")
        .required(true)
        .args(["m3", "n5", "powerset", "divisors", "multiset"])
))]
struct GenArgs {
    /// The five-element modular non-distributive lattice; needs --alpha
    #[arg(long, requires = "alpha")]
    m3: bool,
    /// The pentagon; needs --alpha and --beta
    #[arg(long, requires = "alpha", requires = "beta")]
    n5: bool,
    /// Power set of {1, ..., N}
    #[arg(long, value_name = "N")]
    powerset: Option<usize>,
    /// Divisor lattice of N
    #[arg(long, value_name = "N")]
    divisors: Option<u64>,
    /// Capped multiset lattice: `x:cap[:f0,f1,...],y:cap[...]`
    #[arg(long, value_name = "SPEC")]
    multiset: Option<String>,
    /// Diversity value at the top of M3 / at a3 in N5
    #[arg(long, value_name = "Q", conflicts_with_all = ["powerset", "divisors", "multiset"])]
    alpha: Option<String>,
    /// Diversity value at the top of N5
    #[arg(long, value_name = "Q", conflicts_with_all = ["m3", "powerset", "divisors", "multiset"])]
    beta: Option<String>,
    /// Metric table file for --multiset (defaults to the unit metric)
    #[arg(long, value_name = "FILE", requires = "multiset")]
    metric: Option<PathBuf>,
    /// Diversity to attach to --powerset or --divisors lattices
    #[arg(long, value_enum, conflicts_with_all = ["m3", "n5", "multiset"])]
    diversity: Option<DiversityKind>,
    /// Document name (defaults to a name derived from the generator)
    #[arg(long)]
    name: Option<String>,
    /// Output file
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DiversityKind {
    Trivial,
    Height,
    Cardinality,
    Omega,
}

#[derive(Args)]
#[command(group(
    ArgGroup::new("action")
        .required(true)
        .args(["enumerate", "member", "minimize", "kappa", "counterexamples"])
))]
struct TightspanArgs {
    file: PathBuf,
    /// Enumerate the tight span as vertices plus bounded faces
    #[arg(long)]
    enumerate: bool,
    /// Test a point file for membership in P_L and T_L
    #[arg(long, value_name = "POINTFILE")]
    member: Option<PathBuf>,
    /// Lower a feasible point file to a member of T_L
    #[arg(long, value_name = "POINTFILE")]
    minimize: Option<PathBuf>,
    /// Print kappa of a lattice element
    #[arg(long, value_name = "ELEMENT")]
    kappa: Option<String>,
    /// List triples where kappa fails to commute with joins
    #[arg(long)]
    counterexamples: bool,
    /// Element-count limit override for enumeration
    #[arg(long, value_name = "N")]
    limit: Option<usize>,
}

#[derive(Debug)]
struct AppError(String);

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for AppError {
    fn from(e: E) -> Self {
        AppError(e.to_string())
    }
}

fn fail(message: impl Into<String>) -> AppError {
    AppError(message.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Check { file } => check(&file),
        Command::Gen(args) => gen(args),
        Command::Metric { file } => metric(&file),
        Command::Nway { file, n, check } => nway(&file, n, check),
        Command::Birkhoff { file } => birkhoff_summary(&file),
        Command::Tightspan(args) => tightspan_run(args),
        Command::Render { file, output } => render(&file, &output),
    }
}

fn load_file(path: &Path) -> Result<LoadedDocument, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(format!("{}: {e}", path.display())))?;
    Ok(document::load(&text)?)
}

fn require_valid_diversity(loaded: &LoadedDocument) -> Result<&DiversityFn, AppError> {
    let diversity = loaded
        .diversity
        .as_ref()
        .ok_or_else(|| fail("document has no diversity"))?;
    match diversity.validity() {
        Validity::Valid => Ok(diversity),
        Validity::Invalid(report) => Err(fail(format!("diversity is invalid: {report}"))),
        Validity::Unchecked => Err(fail("diversity has not been validated")),
    }
}

fn check(path: &Path) -> Result<(), AppError> {
    let loaded = load_file(path)?;
    let l = &loaded.lattice;
    println!("lattice: {}", loaded.name);
    println!("elements: {}", l.len());
    println!("bottom: {}", l.element(l.bottom()));
    println!("top: {}", l.element(l.top()));
    let atoms: Vec<&str> = l.atoms().iter().map(|&a| l.element(a)).collect();
    println!("atoms ({}): {}", atoms.len(), atoms.join(" "));
    match l.modularity_witness() {
        None => println!("modular: yes"),
        Some([a, b, c]) => println!(
            "modular: no (witness: {}, {}, {})",
            l.element(a),
            l.element(b),
            l.element(c)
        ),
    }
    match l.distributivity_witness() {
        None => println!("distributive: yes"),
        Some([a, b, c]) => println!(
            "distributive: no (witness: {}, {}, {})",
            l.element(a),
            l.element(b),
            l.element(c)
        ),
    }
    let Some(diversity) = &loaded.diversity else {
        println!("diversity: none");
        return Ok(());
    };
    match triangle_scan(l, diversity.values()) {
        None => println!("triangle scan: pass"),
        Some(w) => println!("triangle scan: fail (witness: {}, {}, {})", w.a, w.b, w.c),
    }
    match diversity.validity() {
        Validity::Valid => {
            println!("diversity: valid");
            Ok(())
        }
        Validity::Invalid(report) => {
            println!("diversity: invalid");
            for violation in &report.violations {
                println!("  - {violation}");
            }
            Err(fail("diversity is invalid"))
        }
        Validity::Unchecked => Err(fail("diversity has not been validated")),
    }
}

/// One point of a multiset SPEC: name, cap, chain-function table.
struct MultisetPoint {
    name: String,
    cap: u32,
    table: Option<Vec<BigRational>>,
}

/// Parses `x:cap[:f0,f1,...],y:cap[...]`. Chain-function values contain
/// no colon, so a token with one starts a new point.
fn parse_multiset_spec(spec: &str) -> Result<Vec<MultisetPoint>, String> {
    let mut points: Vec<MultisetPoint> = Vec::new();
    for token in spec.split(',') {
        if token.contains(':') {
            let mut parts = token.split(':');
            let name = parts.next().unwrap_or_default().to_string();
            if name.is_empty() {
                return Err(format!("empty point name in `{token}`"));
            }
            let cap: u32 = parts
                .next()
                .ok_or_else(|| format!("missing cap in `{token}`"))?
                .parse()
                .map_err(|_| format!("bad cap in `{token}`"))?;
            let table = match parts.next() {
                None => None,
                Some(first) => Some(vec![parse_rational(first).map_err(|e| e.to_string())?]),
            };
            if parts.next().is_some() {
                return Err(format!("too many `:` in `{token}`"));
            }
            points.push(MultisetPoint { name, cap, table });
        } else {
            let current = points
                .last_mut()
                .ok_or_else(|| format!("value `{token}` before any point spec"))?;
            let value = parse_rational(token).map_err(|e| e.to_string())?;
            match &mut current.table {
                Some(table) => table.push(value),
                None => return Err(format!("point `{}` has no table start", current.name)),
            }
        }
    }
    Ok(points)
}

/// Default chain function on `0..=cap`: 0 below two copies, `k - 1` after.
fn default_chain_table(cap: u32) -> Vec<BigRational> {
    (0..=cap)
        .map(|k| BigRational::from_integer(i64::from(k.saturating_sub(1)).into()))
        .collect()
}

fn gen(args: GenArgs) -> Result<(), AppError> {
    let parse_q = |flag: &str, text: &Option<String>| -> Result<BigRational, AppError> {
        parse_rational(text.as_ref().expect("clap enforces presence"))
            .map_err(|e| fail(format!("--{flag}: {e}")))
    };
    let (default_name, lattice, values): (String, Arc<FiniteLattice>, Option<Vec<BigRational>>) =
        if args.m3 {
            let alpha = parse_q("alpha", &args.alpha)?;
            let lattice = Arc::new(FiniteLattice::from_covers(
                &["0", "a1", "a2", "a3", "a4"],
                &[
                    ("0", "a1"),
                    ("0", "a2"),
                    ("0", "a3"),
                    ("a1", "a4"),
                    ("a2", "a4"),
                    ("a3", "a4"),
                ],
            )?);
            let zero = BigRational::from_integer(0.into());
            let values = vec![zero.clone(), zero.clone(), zero.clone(), zero, alpha];
            ("m3".to_string(), lattice, Some(values))
        } else if args.n5 {
            let alpha = parse_q("alpha", &args.alpha)?;
            let beta = parse_q("beta", &args.beta)?;
            let lattice = Arc::new(FiniteLattice::from_covers(
                &["0", "a1", "a2", "a3", "a4"],
                &[
                    ("0", "a1"),
                    ("0", "a2"),
                    ("a1", "a3"),
                    ("a3", "a4"),
                    ("a2", "a4"),
                ],
            )?);
            let zero = BigRational::from_integer(0.into());
            let values = vec![zero.clone(), zero.clone(), zero, alpha, beta];
            ("n5".to_string(), lattice, Some(values))
        } else if let Some(n) = args.powerset {
            let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
            let lattice = Arc::new(powerset_lattice(&names, DEFAULT_ELEMENT_LIMIT)?);
            (format!("powerset-{n}"), lattice, None)
        } else if let Some(n) = args.divisors {
            let lattice = Arc::new(divisor_lattice(n, DEFAULT_ELEMENT_LIMIT)?);
            (format!("divisors-{n}"), lattice, None)
        } else {
            let spec = args.multiset.as_ref().expect("clap enforces one generator");
            let points = parse_multiset_spec(spec).map_err(fail)?;
            let with_caps: Vec<(String, u32)> =
                points.iter().map(|p| (p.name.clone(), p.cap)).collect();
            let multisets = multiset_lattice(&with_caps, DEFAULT_ELEMENT_LIMIT)?;
            let metric = match &args.metric {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| fail(format!("{}: {e}", path.display())))?;
                    parse_metric(&text)?
                }
                None => FiniteMetric::unit(multisets.points().to_vec())?,
            };
            let chains: BTreeMap<String, Vec<BigRational>> = points
                .into_iter()
                .map(|p| {
                    let table = p.table.unwrap_or_else(|| default_chain_table(p.cap));
                    (p.name, table)
                })
                .collect();
            let d = multiset_diversity(&multisets, &metric, &chains)?;
            (
                "multiset".to_string(),
                multisets.lattice.clone(),
                Some(d.values().to_vec()),
            )
        };

    let values = match (values, args.diversity) {
        (Some(v), None) => Some(v),
        (None, Some(kind)) => {
            let d = match kind {
                DiversityKind::Trivial => constructions::trivial_diversity(&lattice),
                DiversityKind::Height => constructions::height_diversity(&lattice)?,
                DiversityKind::Cardinality => constructions::cardinality_diversity(&lattice)?,
                DiversityKind::Omega => constructions::omega_diversity(&lattice)?,
            };
            Some(d.values().to_vec())
        }
        (None, None) => None,
        (Some(_), Some(_)) => unreachable!("clap conflicts prevent this"),
    };

    if let Some(v) = &values {
        // Every generated document must pass its own validation.
        DiversityFn::new(lattice.clone(), v.clone())?;
    }
    let name = args.name.unwrap_or(default_name);
    let doc = document::document_for(&name, &lattice, values.as_deref(), &BTreeMap::new());
    std::fs::write(&args.output, document::serialize(&doc))
        .map_err(|e| fail(format!("{}: {e}", args.output.display())))?;
    Ok(())
}

fn metric(path: &Path) -> Result<(), AppError> {
    let loaded = load_file(path)?;
    let diversity = require_valid_diversity(&loaded)?;
    let metric = diversity.induced_metric()?;
    let names: Vec<&str> = metric.points().iter().map(String::as_str).collect();
    println!("atoms ({}): {}", names.len(), names.join(" "));
    for i in 0..metric.len() {
        for j in i + 1..metric.len() {
            println!(
                "d({}, {}) = {}",
                names[i],
                names[j],
                format_rational(metric.distance(i, j))
            );
        }
    }
    Ok(())
}

fn nway(path: &Path, n: usize, check: bool) -> Result<(), AppError> {
    if n < 2 {
        return Err(fail("--n must be at least 2"));
    }
    let loaded = load_file(path)?;
    let diversity = require_valid_diversity(&loaded)?;
    let l = &loaded.lattice;
    let atoms: Vec<usize> = l.atoms().to_vec();
    println!("n-way distances (n = {n}) over {} atoms", atoms.len());
    let mut tuple: Vec<usize> = Vec::new();
    print_nway_tuples(&mut tuple, 0, n, &atoms, diversity, l)?;
    if check {
        match diversity.check_nway_axioms(n, DEFAULT_TUPLE_LIMIT)? {
            None => println!("axioms: pass"),
            Some(witness) => {
                println!("axioms: fail ({witness:?})");
                return Err(fail("n-way axioms failed"));
            }
        }
    }
    Ok(())
}

fn print_nway_tuples(
    tuple: &mut Vec<usize>,
    start: usize,
    n: usize,
    atoms: &[usize],
    diversity: &DiversityFn,
    l: &Arc<FiniteLattice>,
) -> Result<(), AppError> {
    if tuple.len() == n {
        let value = diversity.nway_distance(tuple)?;
        let names: Vec<&str> = tuple.iter().map(|&a| l.element(a)).collect();
        println!("d({}) = {}", names.join(", "), format_rational(&value));
        return Ok(());
    }
    for (pos, &a) in atoms.iter().enumerate().skip(start) {
        tuple.push(a);
        print_nway_tuples(tuple, pos, n, atoms, diversity, l)?;
        tuple.pop();
    }
    Ok(())
}

fn birkhoff_summary(path: &Path) -> Result<(), AppError> {
    let loaded = load_file(path)?;
    let rep = birkhoff::representation(&loaded.lattice, DEFAULT_ELEMENT_LIMIT)?;
    let l = &loaded.lattice;
    let jirr_names: Vec<&str> = rep.jirr().iter().map(|&j| l.element(j)).collect();
    println!(
        "join-irreducibles ({}): {}",
        jirr_names.len(),
        jirr_names.join(" ")
    );
    let poset = rep.jirr_poset();
    let mut relations = Vec::new();
    for i in 0..poset.len() {
        for j in 0..poset.len() {
            if i != j && poset.leq(i, j) {
                relations.push(format!("{} < {}", poset.element(i), poset.element(j)));
            }
        }
    }
    if relations.is_empty() {
        println!("relations: none (antichain)");
    } else {
        println!("relations: {}", relations.join(", "));
    }
    println!("downset lattice: {} elements", rep.target().len());
    for a in 0..l.len() {
        let members: Vec<&str> = rep.eta_members(a).iter().map(|&m| l.element(m)).collect();
        println!("eta({}) = {{{}}}", l.element(a), members.join(","));
    }
    match &loaded.diversity {
        None => println!("extension theorem: skipped (no diversity)"),
        Some(d) if !d.is_valid() => {
            return Err(fail(
                "diversity is invalid; the extension theorem needs a valid diversity",
            ))
        }
        Some(d) => {
            let report = birkhoff::verify_extension_theorem(d, DEFAULT_JIRR_LIMIT)?;
            if report.passed() {
                println!(
                    "extension theorem ({} subsets): pass",
                    report.subsets_checked
                );
            } else {
                println!("extension theorem: FAIL");
                for v in &report.violations {
                    println!("  - {}: {}", v.check, v.detail);
                }
                return Err(fail("extension theorem failed"));
            }
        }
    }
    Ok(())
}

fn tightspan_run(args: TightspanArgs) -> Result<(), AppError> {
    let loaded = load_file(&args.file)?;
    let diversity = require_valid_diversity(&loaded)?;
    let l = &loaded.lattice;

    if args.enumerate {
        let limit = args.limit.unwrap_or(DEFAULT_ENUMERATION_ELEMENTS);
        let complex = enumerate_tight_span(diversity, limit)?;
        let names: Vec<&str> = l.elements().iter().map(String::as_str).collect();
        println!("elements: {}", names.join(" "));
        println!("constraints ({}):", complex.system.constraints().len());
        for i in 0..complex.system.constraints().len() {
            println!("  C{i}: {}", complex.system.describe(i));
        }
        println!("vertices ({}):", complex.vertices.len());
        for (i, v) in complex.vertices.iter().enumerate() {
            println!("  V{i} = {}", v.tuple_string());
        }
        println!("faces ({}):", complex.faces.len());
        for (i, face) in complex.faces.iter().enumerate() {
            let vs: Vec<String> = face.vertices.iter().map(|v| format!("V{v}")).collect();
            let mut tight: Vec<String> = face
                .zero_coordinates
                .iter()
                .map(|&a| format!("f({}) = 0", l.element(a)))
                .collect();
            tight.extend(face.tight_constraints.iter().map(|c| format!("C{c}")));
            println!(
                "  F{i}: dim {}, vertices [{}], tight [{}]",
                face.dimension,
                vs.join(", "),
                tight.join(", ")
            );
        }
        return Ok(());
    }

    if let Some(point_path) = &args.member {
        let limit = args.limit.unwrap_or(DEFAULT_CONSTRAINT_ELEMENTS);
        let system = constraint_system(diversity, limit)?;
        let text = std::fs::read_to_string(point_path)
            .map_err(|e| fail(format!("{}: {e}", point_path.display())))?;
        let f = point_to_function(&parse_point(&text)?, l)?;
        match system.in_tl(&f)? {
            TlMembership::NotInPl(violated) => {
                println!("in P_L: no (violates {})", system.describe(violated));
                println!("in T_L: no");
            }
            TlMembership::NotMinimal(a) => {
                println!("in P_L: yes");
                println!("in T_L: no (coordinate {} can be lowered)", l.element(a));
            }
            TlMembership::Member(certificates) => {
                println!("in P_L: yes");
                println!("in T_L: yes");
                for (a, cert) in certificates.iter().enumerate() {
                    match cert {
                        tightspan::CoordinateCertificate::Zero => {
                            println!("  {}: zero", l.element(a))
                        }
                        tightspan::CoordinateCertificate::Tight(i) => {
                            println!("  {}: tight {}", l.element(a), system.describe(*i))
                        }
                    }
                }
            }
        }
        return Ok(());
    }

    if let Some(point_path) = &args.minimize {
        let limit = args.limit.unwrap_or(DEFAULT_CONSTRAINT_ELEMENTS);
        let system = constraint_system(diversity, limit)?;
        let text = std::fs::read_to_string(point_path)
            .map_err(|e| fail(format!("{}: {e}", point_path.display())))?;
        let f = point_to_function(&parse_point(&text)?, l)?;
        let minimized = system.minimize(&f)?;
        let doc = function_to_point(&minimized);
        let mut out = serde_json::to_string_pretty(&doc).expect("points always serialize");
        out.push('\n');
        print!("{out}");
        return Ok(());
    }

    if let Some(element) = &args.kappa {
        let x = l.require(element)?;
        let k = kappa(diversity, x)?;
        println!("kappa({element}) = {}", k.tuple_string());
        return Ok(());
    }

    let gaps = tightspan::kappa_homomorphism_counterexamples(diversity)?;
    if gaps.is_empty() {
        println!("join-compatibility counterexamples: none");
    } else {
        println!("join-compatibility counterexamples ({}):", gaps.len());
        for g in &gaps {
            println!(
                "  a = {}, b = {}, witness = {}: joint = {}, max = {}, gap = {}",
                g.a,
                g.b,
                g.witness,
                format_rational(&g.joint),
                format_rational(&g.separate),
                format_rational(&g.gap)
            );
        }
    }
    Ok(())
}

fn render(path: &Path, output: &Path) -> Result<(), AppError> {
    let loaded = load_file(path)?;
    let annotations: Option<BTreeMap<String, String>> = loaded.diversity.as_ref().map(|d| {
        d.values()
            .iter()
            .enumerate()
            .map(|(i, v)| (loaded.lattice.element(i).to_string(), format_rational(v)))
            .collect()
    });
    let dot = render_hasse(&loaded.lattice, annotations.as_ref());
    std::fs::write(output, dot).map_err(|e| fail(format!("{}: {e}", output.display())))?;
    Ok(())
}
