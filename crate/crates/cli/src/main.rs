use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use locc_lab::{
    auto_family, build, build_thm4_tree, build_thm5_tree, build_thm6_tree, certify_party, diagram,
    run_with_resource, verify_orthogonality, CertifyError, Family, FamilyParams, Party, Resource,
    StateSet,
};

mod manifest;
mod sweep;

use manifest::RunManifest;

/// Exit codes.
const PASS: u8 = 0;
const VERDICT_FAIL: u8 = 1;
const PARAM_ERROR: u8 = 2;
const PRECONDITION: u8 = 3;

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

fn param(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: PARAM_ERROR,
        message: message.to_string(),
    }
}

fn precondition(message: impl std::fmt::Display) -> Failure {
    Failure {
        code: PRECONDITION,
        message: message.to_string(),
    }
}

type CmdResult = Result<u8, Failure>;

#[derive(Parser)]
#[command(
    name = "locc-lab",
    version,
    about = "Locally indistinguishable product state families and entanglement-assisted discrimination"
)]
struct Cli {
    /// Reserved. Nothing in this tool is random, so the flag is rejected.
    #[arg(long, global = true, hide = true)]
    seedless: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Auto,
    Thm1,
    #[value(name = "thm1_n4")]
    Thm1N4,
    Thm2,
    Thm3,
}

impl FamilyArg {
    fn resolve(self, p: FamilyParams) -> Family {
        match self {
            FamilyArg::Auto => auto_family(p),
            FamilyArg::Thm1 => Family::Thm1,
            FamilyArg::Thm1N4 => Family::Thm1N4,
            FamilyArg::Thm2 => Family::Thm2,
            FamilyArg::Thm3 => Family::Thm3,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PartyArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Ascii,
    Svg,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ResourceArg {
    Mes,
    Product,
}

#[derive(clap::Args)]
struct ParamArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    family: FamilyArg,
}

impl ParamArgs {
    fn params(&self) -> Result<FamilyParams, Failure> {
        match (self.n, self.m) {
            (Some(n), Some(m)) => Ok(FamilyParams::new(n, m)),
            _ => Err(param("both --n and --m are required")),
        }
    }

    fn build(&self) -> Result<(FamilyParams, StateSet), Failure> {
        let p = self.params()?;
        let s = build(p, self.family.resolve(p)).map_err(param)?;
        Ok((p, s))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a family and write its state-set JSON.
    Construct {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the orthogonality-preservation system for one or both parties.
    Certify {
        #[command(flatten)]
        params: ParamArgs,
        /// State-set JSON to read instead of building from --n/--m.
        #[arg(long = "in", value_name = "PATH")]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "both")]
        party: PartyArg,
        /// Remove the state with this label before certifying (repeatable).
        #[arg(long, value_name = "LABEL")]
        drop: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a protocol tree and run every family state through it.
    Simulate {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Protocol to build; defaults to the one matching --m.
        #[arg(long, value_parser = clap::value_parser!(u8).range(4..=6))]
        theorem: Option<u8>,
        #[arg(long, value_enum, default_value = "mes")]
        resource: ResourceArg,
        /// Also write the protocol tree JSON here.
        #[arg(long, value_name = "PATH")]
        tree: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the tile diagram of a family.
    Diagram {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "ascii")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run construct, verify, certify and simulate over a grid.
    Sweep {
        /// Range of n, e.g. `4..10` (inclusive) or `7`.
        #[arg(long, default_value = "4..10")]
        n: String,
        /// Range of m, e.g. `4..10` (inclusive) or `5`.
        #[arg(long, default_value = "4..10")]
        m: String,
        #[arg(long, value_enum, default_value = "auto")]
        family: FamilyArg,
        /// Skip protocol simulation.
        #[arg(long)]
        no_simulate: bool,
        #[arg(long, value_enum, default_value = "ascii")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.seedless {
        eprintln!("error: --seedless is reserved; no command uses randomness");
        return ExitCode::from(PARAM_ERROR);
    }
    let started = Instant::now();
    let result = match cli.command {
        Command::Construct { params, out } => construct(&params, out.as_deref(), started),
        Command::Certify {
            params,
            input,
            party,
            drop,
            out,
        } => certify(
            &params,
            input.as_deref(),
            party,
            &drop,
            out.as_deref(),
            started,
        ),
        Command::Simulate {
            n,
            m,
            theorem,
            resource,
            tree,
            out,
        } => simulate(
            n,
            m,
            theorem,
            resource,
            tree.as_deref(),
            out.as_deref(),
            started,
        ),
        Command::Diagram {
            params,
            format,
            out,
        } => draw(&params, format, out.as_deref()),
        Command::Sweep {
            n,
            m,
            family,
            no_simulate,
            format,
            out,
        } => sweep::cmd(
            &n,
            &m,
            family,
            !no_simulate,
            format,
            out.as_deref(),
            started,
        ),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Writes `text` to `out`, or stdout when absent.
fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| param(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("value serializes") + "\n"
}

fn construct(args: &ParamArgs, out: Option<&Path>, started: Instant) -> CmdResult {
    let (p, s) = args.build()?;
    let orthogonal = verify_orthogonality(&s).is_orthogonal();
    emit(&(s.to_json() + "\n"), out)?;
    if let Some(out) = out {
        RunManifest::new("construct", started)
            .params(p.n, p.m, s.family())
            .output(out)
            .verdict("count", json!(s.len()))
            .verdict("orthogonal", json!(orthogonal))
            .write_beside(out)?;
    }
    Ok(if orthogonal { PASS } else { VERDICT_FAIL })
}

fn certify(
    args: &ParamArgs,
    input: Option<&Path>,
    party: PartyArg,
    drop: &[String],
    out: Option<&Path>,
    started: Instant,
) -> CmdResult {
    let mut s = match input {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| param(format!("cannot read {}: {e}", path.display())))?;
            StateSet::from_json(&text)
                .map_err(|e| precondition(format!("{}: {e}", path.display())))?
        }
        None => args.build()?.1,
    };
    for label in drop {
        s = s.without(label).map_err(param)?;
    }
    let parties = match party {
        PartyArg::A => vec![Party::A],
        PartyArg::B => vec![Party::B],
        PartyArg::Both => vec![Party::A, Party::B],
    };
    let mut certs = Vec::new();
    for party in parties {
        let c = certify_party(&s, party).map_err(|e| match e {
            CertifyError::NotOrthogonal { .. } => precondition(e),
        })?;
        certs.push(c.to_json());
    }
    let all_scalar = certs.iter().all(|c| c.scalar_only);
    emit(&pretty(&certs), out)?;
    if let Some(out) = out {
        let mut m = RunManifest::new("certify", started)
            .params(s.n(), s.m(), s.family())
            .output(out)
            .verdict("scalar_only", json!(all_scalar))
            .verdict(
                "solution_dims",
                json!(certs
                    .iter()
                    .map(|c| (c.party.to_string(), c.solution_dim))
                    .collect::<std::collections::BTreeMap<_, _>>()),
            );
        if let Some(i) = input {
            m = m.input(i);
        }
        if !drop.is_empty() {
            m = m.verdict("dropped", json!(drop));
        }
        m.write_beside(out)?;
    }
    Ok(if all_scalar { PASS } else { VERDICT_FAIL })
}

/// Protocol matching the family of `m`.
fn default_theorem(m: usize) -> u8 {
    match m {
        4 => 4,
        m if m % 2 == 0 => 5,
        _ => 6,
    }
}

fn simulate(
    n: Option<usize>,
    m: Option<usize>,
    theorem: Option<u8>,
    resource: ResourceArg,
    tree_out: Option<&Path>,
    out: Option<&Path>,
    started: Instant,
) -> CmdResult {
    let (Some(n), Some(m)) = (n, m) else {
        return Err(param("both --n and --m are required"));
    };
    let p = FamilyParams::new(n, m);
    let theorem = theorem.unwrap_or_else(|| default_theorem(m));
    let (family, tree) = match theorem {
        4 => (Family::Thm1, build_thm4_tree(p)),
        5 => (Family::Thm2, build_thm5_tree(p)),
        _ => (Family::Thm3, build_thm6_tree(p)),
    };
    let s = build(p, family).map_err(param)?;
    let tree = tree.map_err(|e| match e {
        locc_lab::BuildError::Param(e) => param(e),
        e => precondition(e),
    })?;
    let resource = match resource {
        ResourceArg::Mes => Resource::MaximallyEntangled,
        ResourceArg::Product => Resource::Product,
    };
    let report = run_with_resource(&tree, &s, resource).map_err(precondition)?;
    emit(&(report.to_json() + "\n"), out)?;
    if let Some(path) = tree_out {
        fs::write(path, tree.to_json() + "\n")
            .map_err(|e| param(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(out) = out {
        let mut m = RunManifest::new("simulate", started)
            .params(n, m, s.family())
            .output(out)
            .verdict("theorem", json!(theorem))
            .verdict("resource", json!(resource))
            .verdict("perfect", json!(report.perfect))
            .verdict("states", json!(s.len()))
            .verdict("fallbacks", json!(tree.fallbacks));
        if let Some(t) = tree_out {
            m = m.artifact("tree", t);
        }
        m.write_beside(out)?;
    }
    Ok(if report.perfect { PASS } else { VERDICT_FAIL })
}

fn draw(args: &ParamArgs, format: FormatArg, out: Option<&Path>) -> CmdResult {
    let (_, s) = args.build()?;
    let d = diagram::layout(&s);
    let text = match format {
        FormatArg::Ascii => diagram::render(&d, diagram::Format::Ascii),
        FormatArg::Svg => diagram::render(&d, diagram::Format::Svg),
        FormatArg::Json => pretty(&d),
    };
    emit(&text, out)?;
    Ok(PASS)
}
