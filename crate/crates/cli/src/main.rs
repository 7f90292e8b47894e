//! `autostruct`: build gadget automata, evaluate formulas, check structure
//! classes and compare presentations from the command line.
//!
//! Exit codes: 0 success, 1 non-isomorphic verdict, 2 usage or validation
//! error, 3 resource cap hit.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use autostruct::equiv::{build_e_good, e_good_reduction, iso_check_equiv, EquivPresentation};
use autostruct::fo::{
    validate_dag, validate_equivalence, validate_forest, validate_linear_order, validate_tree, Engine, Formula,
    Presentation,
};
use autostruct::io::{nfa_from_json, nfa_to_json, to_dot};
use autostruct::linorder::{
    block_profile, build_base_a1, extract_fiber_order, lo_tower_step, LevelAutomaton, OrderPresentation,
};
use autostruct::nfa::run_automaton;
use autostruct::poly::{poly_automaton_conv, poly_automaton_sharp};
use autostruct::symbol::parse_word;
use autostruct::trees::{
    build_d2, extract_component, iso_bounded, roots_of, tower_step, unfold_dag, IsoCaps, TreePresentation,
};
use autostruct::{Error, IsoVerdict, Nfa, Polynomial};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "autostruct", version, about = "Automatic structures from finite automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Automaton whose run counts are the values of a polynomial.
    BuildPoly {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        vars: usize,
        #[arg(long, value_enum, default_value = "sharp")]
        style: Style,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Number of accepting runs on a word (`#` for ♯, `_` pad, `|` between tracks).
    CountRuns { automaton: PathBuf, word: String },
    /// The automaton of accepting runs, one letter per transition.
    RunAutomaton {
        automaton: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a formula over a presentation: a sentence prints true or
    /// false, otherwise the automaton for the free variables is written.
    Eval {
        presentation: PathBuf,
        formula: PathBuf,
        /// Comma-separated free variables, in track order.
        #[arg(long, value_delimiter = ',')]
        free: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check that a presentation belongs to a class:
    /// equivalence, order, tree:N, forest:N or dag:N.
    Validate {
        presentation: PathBuf,
        #[arg(long)]
        class: String,
    },
    /// Build one of the gadget structures.
    #[command(subcommand)]
    Gadget(Gadget),
    /// Compare two equivalence presentations by class-size counts.
    IsoEquiv {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 30)]
        bound: u64,
    },
    /// Compare two trees of bounded height.
    IsoTree {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        height: usize,
        /// `K,L,M`: count cap, multiplicity cap, representative cap.
        #[arg(long, default_value = "8,8,64")]
        caps: String,
        /// Root word in the left forest; defaults to its unique root.
        #[arg(long)]
        left_root: Option<String>,
        #[arg(long)]
        right_root: Option<String>,
    },
    /// Block sizes of an order presentation, or of the fiber of a level
    /// automaton over `--prefix`.
    BlockProfile {
        input: PathBuf,
        #[arg(long)]
        prefix: Option<String>,
        #[arg(long, default_value_t = 10)]
        bound: usize,
        #[arg(long, default_value_t = 40)]
        cap: u64,
    },
    /// Graphviz rendering of an automaton, or of one part of a presentation.
    Export {
        input: PathBuf,
        #[arg(long)]
        dot: bool,
        /// Relation to draw from a presentation; the domain when absent.
        #[arg(long)]
        relation: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Conv,
    Sharp,
}

#[derive(Args)]
struct PolyPair {
    #[arg(long)]
    p1: String,
    #[arg(long)]
    p2: String,
}

#[derive(Subcommand)]
enum Gadget {
    /// The equivalence structure with infinitely many classes of each
    /// size `C(y, z)`, `y ≠ z`.
    EGood {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Equivalence structure isomorphic to E_Good iff `p1 ≠ p2` everywhere.
    EReduction {
        #[command(flatten)]
        polys: PolyPair,
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The height-2 dag for a pair of polynomials.
    D2 {
        #[command(flatten)]
        polys: PolyPair,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Dag of height `height` from the height-2 gadget; with `--unfold`,
    /// the forest of its root-anchored paths.
    TreeTower {
        #[command(flatten)]
        polys: PolyPair,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 3)]
        height: usize,
        #[arg(long)]
        unfold: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The level-1 automaton of the linear-order tower.
    LoBase {
        #[command(flatten)]
        polys: PolyPair,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The automaton after `steps` tower steps from the level-1 automaton.
    LoTower {
        #[command(flatten)]
        polys: PolyPair,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_resource_cap() => 3,
            _ => 2,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            let mut body = text.to_string();
            if !body.ends_with('\n') {
                body.push('\n');
            }
            fs::write(p, body).map_err(|source| CliError::Io { path: p.display().to_string(), source })
        }
        None => {
            say(text);
            Ok(())
        }
    }
}

/// Prints a line; a closed stdout (e.g. `| head`) is not an error.
fn say(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn poly(text: &str) -> Result<Polynomial> {
    Ok(text.parse::<Polynomial>()?)
}

fn load_nfa(path: &Path) -> Result<Nfa> {
    Ok(nfa_from_json(&read(path)?)?)
}

fn load_presentation(path: &Path) -> Result<Presentation> {
    Ok(Presentation::from_json(&read(path)?)?)
}

/// Splits a root word against the domain alphabet of `p`.
fn domain_word(p: &Presentation, text: &str) -> Result<Vec<String>> {
    let w = parse_word(text, p.domain().alphabet())?;
    Ok(w.iter().map(|s| s.to_string()).collect())
}

/// The component of a forest presentation below `root`, or below its
/// only root.
fn tree(path: &Path, height: usize, root: Option<&str>) -> Result<TreePresentation> {
    let p = load_presentation(path)?;
    let root = match root {
        Some(r) => domain_word(&p, r)?,
        None => {
            let mut words = roots_of(&p)?.enumerate(2)?;
            if words.len() != 1 {
                return Err(CliError::Usage(format!("{}: no unique root; pass one", path.display())));
            }
            words.remove(0).iter().map(|s| s.to_string()).collect()
        }
    };
    let forest = TreePresentation { pres: p, height, root: None };
    Ok(extract_component(&forest, &root)?)
}

fn parse_caps(text: &str) -> Result<IsoCaps> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("--caps expects K,L,M, got `{text}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let k = parts[0].parse().map_err(|_| bad())?;
    let l = parts[1].parse().map_err(|_| bad())?;
    let m = parts[2].parse().map_err(|_| bad())?;
    Ok(IsoCaps::new(k, l, m))
}

fn report(v: &IsoVerdict) -> Result<u8> {
    say(&serde_json::to_string_pretty(v).expect("serializable"));
    Ok(if v.is_non_isomorphic() { 1 } else { 0 })
}

fn level_automaton(p: &PolyPair, n: usize, l: usize, steps: usize) -> Result<LevelAutomaton> {
    let mut a = build_base_a1(&poly(&p.p1)?, &poly(&p.p2)?, n, l)?;
    for _ in 0..steps {
        a = lo_tower_step(&a)?;
    }
    Ok(a)
}

fn validate(path: &Path, class: &str) -> Result<u8> {
    let p = load_presentation(path)?;
    let height = |rest: &str| {
        rest.parse::<usize>().map_err(|_| CliError::Usage(format!("bad height in --class {class}")))
    };
    let ok = match class.split_once(':') {
        None if class == "equivalence" => validate_equivalence(&p)?,
        None if class == "order" => validate_linear_order(&p)?,
        Some(("tree", n)) => validate_tree(&p, height(n)?)?,
        Some(("forest", n)) => validate_forest(&p, height(n)?)?,
        Some(("dag", n)) => validate_dag(&p, height(n)?)?,
        _ => return Err(CliError::Usage(format!("unknown class `{class}`"))),
    };
    if ok {
        say(&format!("valid {class}"));
        Ok(0)
    } else {
        say(&format!("not a valid {class}"));
        Ok(2)
    }
}

fn gadget(g: Gadget) -> Result<u8> {
    match g {
        Gadget::EGood { output } => emit(output.as_deref(), &build_e_good()?.presentation().to_json())?,
        Gadget::EReduction { polys, k, output } => {
            let e = e_good_reduction(&poly(&polys.p1)?, &poly(&polys.p2)?, k)?;
            emit(output.as_deref(), &e.presentation().to_json())?
        }
        Gadget::D2 { polys, k, l, output } => {
            let d = build_d2(&poly(&polys.p1)?, &poly(&polys.p2)?, k, l)?;
            emit(output.as_deref(), &d.pres.to_json())?
        }
        Gadget::TreeTower { polys, k, l, height, unfold, output } => {
            if height < 2 {
                return Err(CliError::Usage("--height must be at least 2".into()));
            }
            let mut d = build_d2(&poly(&polys.p1)?, &poly(&polys.p2)?, k, l)?;
            for i in 2..height {
                d = tower_step(&d, i)?;
            }
            let pres = if unfold { unfold_dag(&d, false)?.pres } else { d.pres };
            emit(output.as_deref(), &pres.to_json())?
        }
        Gadget::LoBase { polys, n, l, output } => {
            emit(output.as_deref(), &nfa_to_json(&level_automaton(&polys, n, l, 0)?.nfa))?
        }
        Gadget::LoTower { polys, n, l, steps, output } => {
            emit(output.as_deref(), &nfa_to_json(&level_automaton(&polys, n, l, steps)?.nfa))?
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::BuildPoly { poly: text, vars, style, output } => {
            let p = poly(&text)?;
            let a = match style {
                Style::Conv => poly_automaton_conv(&p, vars)?,
                Style::Sharp => poly_automaton_sharp(&p, vars)?,
            };
            emit(output.as_deref(), &nfa_to_json(&a))?;
        }
        Command::CountRuns { automaton, word } => {
            let a = load_nfa(&automaton)?;
            let w = parse_word(&word, a.alphabet())?;
            say(&a.count_accepting_runs(&w)?.to_string());
        }
        Command::RunAutomaton { automaton, output } => {
            let r = run_automaton(&load_nfa(&automaton)?);
            emit(output.as_deref(), &nfa_to_json(&r.nfa))?;
        }
        Command::Eval { presentation, formula, free, output } => {
            let p = load_presentation(&presentation)?;
            let f: Formula = read(&formula)?.trim().parse()?;
            let engine = Engine::new(&p)?;
            if free.is_empty() {
                say(&engine.decide(&f)?.to_string());
            } else {
                let vars: Vec<&str> = free.iter().map(String::as_str).collect();
                emit(output.as_deref(), &nfa_to_json(&engine.eval(&f, &vars)?))?;
            }
        }
        Command::Validate { presentation, class } => return validate(&presentation, &class),
        Command::Gadget(g) => return gadget(g),
        Command::IsoEquiv { left, right, bound } => {
            let a = EquivPresentation::new(load_presentation(&left)?)?;
            let b = EquivPresentation::new(load_presentation(&right)?)?;
            return report(&iso_check_equiv(&a, &b, bound)?);
        }
        Command::IsoTree { left, right, height, caps, left_root, right_root } => {
            let caps = parse_caps(&caps)?;
            let t1 = tree(&left, height, left_root.as_deref())?;
            let t2 = tree(&right, height, right_root.as_deref())?;
            return report(&iso_bounded(&t1, &t2, height, caps)?);
        }
        Command::BlockProfile { input, prefix, bound, cap } => {
            let order = match prefix {
                Some(u) => {
                    let a = load_nfa(&input)?;
                    let u: Vec<String> = parse_word(&u, a.alphabet())?.iter().map(|s| s.to_string()).collect();
                    extract_fiber_order(&a, &u)?
                }
                None => OrderPresentation::new(load_presentation(&input)?)?,
            };
            let profile = block_profile(&order, bound, cap)?;
            say(&serde_json::to_string(&profile).expect("serializable"));
        }
        Command::Export { input, dot, relation, output } => {
            if !dot {
                return Err(CliError::Usage("export needs a format flag (--dot)".into()));
            }
            let text = read(&input)?;
            let name = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let a = match nfa_from_json(&text) {
                Ok(a) if relation.is_none() => a,
                _ => {
                    let p = Presentation::from_json(&text)?;
                    match &relation {
                        Some(r) => p.relation(r)?.automaton.clone(),
                        None => p.domain().clone(),
                    }
                }
            };
            emit(output.as_deref(), to_dot(&a, &name).trim_end())?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
