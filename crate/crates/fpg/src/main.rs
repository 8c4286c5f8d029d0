use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use fpg_core::coset_enum::{todd_coxeter, todd_coxeter_with, Strategy, DEFAULT_MAX_COSETS};
use fpg_core::homology::{
    coinvariants_tensor_square, default_tensor_square_budget, five_term_check, h1, h2_fiber_product,
    induced_h2_kernel,
};
use fpg_core::nilpotent::{
    dwyer_filtration, nilpotent_quotient_with, stallings_compare, Identities, NqOptions, DEFAULT_CLASS,
};
use fpg_core::pipeline::{
    run_main_construction, Catalog, MainOptions, PresentationVariant, ReportFormat, DEFAULT_CLASS_BOUND,
    MAX_CLASS_BOUND,
};
use fpg_core::presentations::{FinitePresentation, PresentationMorphism};
use fpg_core::schreier::schreier_data;
use fpg_core::budget::Budget;
use fpg_core::zlinalg::write_grids;

/// Writes to stdout; a closed pipe (as with `| head`) ends the process quietly.
fn emit(text: &str) {
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

macro_rules! out {
    ($($t:tt)*) => { emit(&format!("{}\n", format_args!($($t)*))) };
}

macro_rules! out_raw {
    ($($t:tt)*) => { emit(&format!($($t)*)) };
}

/// Cosets tried when deciding whether a group is finite for `fpg dwyer`.
const FINITENESS_PROBE_COSETS: usize = 100_000;

#[derive(Parser)]
#[command(name = "fpg", version, about = "Computations with finitely presented groups")]
struct Cli {
    /// Catalog file to read entries from instead of the built-in one.
    #[arg(long, global = true, value_name = "PATH")]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Order of a finite group by coset enumeration.
    Order {
        entry: String,
        #[arg(long, default_value_t = DEFAULT_MAX_COSETS)]
        max_cosets: usize,
        #[arg(long, default_value = "hlt")]
        strategy: Strategy,
    },
    /// Schreier basis of the relation subgroup and the action on its abelianization.
    Schreier {
        entry: String,
        /// Write the action matrices and the inclusion into F_ab as integer grids.
        #[arg(long, value_name = "PATH")]
        dump_matrices: Option<PathBuf>,
    },
    /// H₁ of the presented group.
    H1 { entry: String },
    /// H₂ of F ×_Q F for a finite group Q.
    H2Fiber {
        entry: String,
        /// Also compute H₀(Q; R_ab ⊗ R_ab), limited to ten minutes and about 2 GiB.
        #[arg(long)]
        tensor_square: bool,
    },
    /// Exactness of the five-term sequence for F ×_Q F → F × F.
    FiveTerm { entry: String },
    /// Kernel of H₂(F ×_Q F) → H₂(F × F).
    Kernel { entry: String },
    /// Lower central quotient as a power-commutator presentation.
    Nq {
        entry: String,
        #[arg(long, default_value_t = DEFAULT_CLASS)]
        class: usize,
        /// Check every associativity test word, not only the ones needed.
        #[arg(long)]
        full_consistency: bool,
        /// Print the pc relations.
        #[arg(long)]
        relations: bool,
    },
    /// Dwyer filtration φ_2 ⊇ ... ⊇ φ_{K+1} of H₂.
    Dwyer {
        entry: String,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
    },
    /// Compare lower central quotients along a map A → B.
    Stallings {
        source: String,
        target: String,
        /// One target word per source generator.
        #[arg(long, value_name = "FILE")]
        map: PathBuf,
        #[arg(long, default_value_t = 3)]
        class: usize,
    },
    /// Fiber product of a perfect group, its free central extension, and the checks around them.
    MainConstruction {
        entry: String,
        #[arg(long, default_value_t = DEFAULT_CLASS_BOUND)]
        class: usize,
        #[arg(long, default_value = "big")]
        presentation: PresentationVariant,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
    },
    /// Catalog maintenance.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List entries.
    List,
    /// Parse and check a catalog file.
    Validate { path: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load_catalog(path: Option<&Path>) -> Result<Catalog> {
    Ok(match path {
        Some(p) => Catalog::load(p).with_context(|| format!("reading catalog {}", p.display()))?,
        None => Catalog::shipped(),
    })
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    out!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    let catalog = load_catalog(cli.catalog.as_deref())?;
    let resolve = |expr: &str| -> Result<FinitePresentation> {
        catalog.resolve(expr).with_context(|| format!("resolving {expr:?}"))
    };
    let finite = |expr: &str| -> Result<_> {
        let p = resolve(expr)?;
        let sd = schreier_data(&todd_coxeter(&p, DEFAULT_MAX_COSETS)?)?;
        Ok((p, sd))
    };
    match cli.command {
        Command::Order { entry, max_cosets, strategy } => {
            let p = resolve(&entry)?;
            let t = todd_coxeter_with(&p, max_cosets, strategy)?;
            out!("{}", t.group_order()?);
        }
        Command::Schreier { entry, dump_matrices } => {
            let (_, sd) = finite(&entry)?;
            let action = sd.action_on_rab();
            let incl = sd.inclusion_to_fab();
            out!("index {}", sd.index());
            out!("basis-count {}", sd.basis_count());
            for (i, a) in action.iter().enumerate() {
                out!("action[{i}] {}x{} checksum {:016x}", a.nrows(), a.ncols(), a.checksum());
            }
            out!("inclusion {}x{} checksum {:016x}", incl.nrows(), incl.ncols(), incl.checksum());
            if let Some(path) = dump_matrices {
                let mut all = action;
                all.push(incl);
                std::fs::write(&path, write_grids(&all)).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::H1 { entry } => {
            let p = resolve(&entry)?;
            print_json(&json!({ "entry": entry, "h1": h1(&p) }))?;
        }
        Command::H2Fiber { entry, tensor_square } => {
            let (_, sd) = finite(&entry)?;
            let h = h2_fiber_product(&sd)?;
            let mut out = json!({ "entry": entry, "relation_rank": sd.basis_count(), "h2_fiber_product": h.invariants });
            if tensor_square {
                let t = coinvariants_tensor_square(&sd, &default_tensor_square_budget())?;
                out["tensor_square_coinvariants"] = serde_json::to_value(t)?;
            }
            print_json(&out)?;
        }
        Command::FiveTerm { entry } => {
            let (_, sd) = finite(&entry)?;
            let r = five_term_check(&sd)?;
            print_json(&json!({ "entry": entry, "exact": r.is_exact(), "report": r }))?;
        }
        Command::Kernel { entry } => {
            let (_, sd) = finite(&entry)?;
            let k = induced_h2_kernel(&sd)?;
            print_json(&json!({
                "entry": entry,
                "h2_fiber_product": k.h2,
                "image": k.image,
                "surjective": k.surjective,
                "kernel": k.kernel,
            }))?;
        }
        Command::Nq { entry, class, full_consistency, relations } => {
            let p = resolve(&entry)?;
            let opts = NqOptions { full_consistency, budget: Budget::from_env() };
            let q = nilpotent_quotient_with(&p, class, &opts)?;
            for (k, s) in q.sections().iter().enumerate() {
                out!("γ_{}/γ_{}: {}", k + 1, k + 2, s);
            }
            out!("pc generators: {}", q.ngens());
            if relations {
                out_raw!("{}", q.render());
            }
        }
        Command::Dwyer { entry, k, format } => {
            let p = resolve(&entry)?;
            let probe = todd_coxeter(&p, FINITENESS_PROBE_COSETS).ok().and_then(|t| schreier_data(&t).ok());
            let identities = match &probe {
                Some(sd) => Identities::from_schreier(&p, sd)?,
                None => {
                    log::warn!("{entry}: no finite coset table found; identities among relators taken to be zero");
                    Identities::Aspherical
                }
            };
            let opts = NqOptions { budget: Budget::from_env(), ..Default::default() };
            let f = dwyer_filtration(&p, k, &identities, &opts)?;
            match format {
                ReportFormat::Csv => {
                    out!("k,phi,free_rank,torsion");
                    for l in &f.layers {
                        let torsion: Vec<String> = l.phi.torsion.iter().map(|t| t.to_string()).collect();
                        out!("{},{},{},{}", l.k, l.phi, l.phi.free_rank, torsion.join(" "));
                    }
                }
                ReportFormat::Json => print_json(&json!({
                    "entry": entry,
                    "identities_assumed_zero": f.identities_assumed,
                    "layers": f.layers,
                }))?,
                ReportFormat::Text => {
                    if f.identities_assumed {
                        out!("(identities among relators taken to be zero)");
                    }
                    for l in &f.layers {
                        out!("φ_{} = {}", l.k + 1, l.phi);
                    }
                }
            }
        }
        Command::Stallings { source, target, map, class } => {
            let a = resolve(&source)?;
            let b = resolve(&target)?;
            let text = std::fs::read_to_string(&map).with_context(|| format!("reading {}", map.display()))?;
            let f = PresentationMorphism::parse_map(a, b, &text)?;
            let r = stallings_compare(&f, class)?;
            for l in &r.layers {
                out!(
                    "k = {}: {} → {}  injective {}  surjective {}",
                    l.weight, l.source, l.target, l.injective, l.surjective
                );
            }
            out!("isomorphism through class {}: {}", r.class, r.is_isomorphism());
            if !r.is_isomorphism() {
                return Ok(3);
            }
        }
        Command::MainConstruction { entry, class, presentation, out, format } => {
            if class > MAX_CLASS_BOUND {
                bail!("--class {class} exceeds the maximum of {MAX_CLASS_BOUND}");
            }
            let e = catalog.get(&entry)?;
            let opts = MainOptions { class_bound: class, variant: presentation, budget: Budget::from_env() };
            let report = run_main_construction(e, &opts)?;
            let rendered = report.render(format)?;
            match out {
                Some(path) => std::fs::write(&path, &rendered).with_context(|| format!("writing {}", path.display()))?,
                None => emit(&rendered),
            }
            let code = report.exit_code();
            if code == 3 {
                eprintln!("{}", report.to_text());
            }
            return Ok(code as u8);
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                for e in catalog.entries() {
                    let p = e.presentation()?;
                    out!("{}\t{} generators, {} relators", e.name, p.rank(), p.relator_count());
                }
            }
            CatalogAction::Validate { path } => {
                let c = Catalog::load(&path).with_context(|| format!("validating {}", path.display()))?;
                out!("{}: {} entries, all valid", path.display(), c.entries().len());
            }
        },
    }
    Ok(0)
}
