//! Command-line front end. Every subcommand prints one JSON document on
//! stdout; `--verbose` adds a short summary on stderr. Exit status is 0 on
//! success, 1 for domain errors (bad numbers, unreadable files, missing
//! objects) and 2 for parse or usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::census::rank_census;
use crate::channels::{dynamical_rank, is_completely_positive, kraus_rank, Channel, Isometry};
use crate::duality::{invert_ket, schmidt, BipartiteKet};
use crate::dsl::{self, DiagramSource, ParseError, Statement};
use crate::error::Error;
use crate::linalg::{self, CMatrix};
use crate::protocols::{
    build_bob_corrects, build_povm_alice_concentrates, build_split_concentration, run_teleport, run_unambiguous,
    ProtocolOutcome, TeleportSetup,
};
use crate::tensor::{Leg, Polarity, Space, Tensor, DEFAULT_RANK_TOL};

#[derive(Debug, Parser)]
#[command(name = "atemporal", version, about = "Atemporal diagrams for quantum circuits")]
pub struct Cli {
    /// Print a human-readable summary on stderr.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PlanKind {
    Greedy,
    Decl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Variant {
    Alice,
    Bob,
    Split,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a diagram file and list its contents.
    Parse { file: PathBuf },
    /// Contract every edge of a diagram.
    Contract {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "greedy")]
        plan: PlanKind,
    },
    /// Schmidt coefficients of a two-leg ket.
    Schmidt {
        file: PathBuf,
        #[arg(long)]
        obj: String,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
    /// Inverse of an entangled ket.
    Invert {
        file: PathBuf,
        #[arg(long)]
        obj: String,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
    /// Kraus rank of an isometry; `--f-legs` names the environment legs by
    /// 1-based index or space label.
    KrausRank {
        file: PathBuf,
        #[arg(long)]
        obj: String,
        #[arg(long, num_args = 1.., required = true)]
        f_legs: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
    /// Complete positivity of a transition operator with legs (a-, a+, b+, b-).
    CpCheck {
        file: PathBuf,
        #[arg(long)]
        obj: String,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
    /// Standard teleportation with the generalized Bell measurement.
    Teleport {
        #[arg(long)]
        resource: PathBuf,
        #[arg(long)]
        input: PathBuf,
    },
    /// Unambiguous teleportation through a partially entangled resource.
    Unambiguous {
        #[arg(long)]
        resource: PathBuf,
        #[arg(long, value_enum)]
        variant: Variant,
        #[arg(long)]
        input: PathBuf,
    },
    /// Histogram of cross-operator ranks of random unitaries.
    Census {
        #[arg(long, default_value_t = 2)]
        da: usize,
        #[arg(long, default_value_t = 2)]
        de: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Add the deterministic structured family to the Haar samples.
        #[arg(long)]
        structured: bool,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
}

#[derive(Debug)]
enum Failure {
    Parse(ParseError),
    Domain(Error),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Parse(_) => 2,
            _ => 1,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Parse(e) => json!({"error": {
                "kind": "parse",
                "category": e.kind.as_str(),
                "line": e.line,
                "column": e.column,
                "message": e.message,
            }}),
            Failure::Domain(e) => json!({"error": {"kind": "domain", "message": e.to_string()}}),
            Failure::Input(m) => json!({"error": {"kind": "input", "message": m}}),
        }
    }
}

type Out = std::result::Result<(Value, String), Failure>;

fn load(path: &Path) -> std::result::Result<DiagramSource, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(dsl::parse(&text)?)
}

fn named(src: &DiagramSource, name: &str) -> std::result::Result<Tensor, Failure> {
    src.object(name)?.ok_or_else(|| Failure::Input(format!("no object named '{name}'")))
}

/// First object whose legs are `n` open legs.
fn first_ket(src: &DiagramSource, n: usize, what: &str) -> std::result::Result<Tensor, Failure> {
    src.objects()?
        .into_iter()
        .find(|t| t.legs().len() == n && t.legs().iter().all(|l| l.polarity == Polarity::Open))
        .ok_or_else(|| Failure::Input(format!("no {what} ({n} open legs) in file")))
}

pub fn tensor_json(t: &Tensor) -> Value {
    json!({
        "name": t.name(),
        "legs": t.legs().iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "dims": t.dims(),
        "data": t.data().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
    })
}

fn cmd_parse(file: &Path) -> Out {
    let src = load(file)?;
    let mut spaces = Vec::new();
    let mut objects = Vec::new();
    let mut edges = Vec::new();
    for s in src.statements() {
        match s {
            Statement::Space { label, dim } => spaces.push(json!({"label": label, "dim": dim})),
            Statement::Object { name, legs, .. } => {
                let legs: Vec<String> = legs
                    .iter()
                    .map(|(l, p)| format!("{l}{}", if *p == Polarity::Open { '+' } else { '-' }))
                    .collect();
                objects.push(json!({"name": name, "legs": legs}));
            }
            Statement::Edge { first, second } => edges.push(json!([
                format!("{}.{}", first.object, first.leg),
                format!("{}.{}", second.object, second.leg)
            ])),
        }
    }
    let summary = format!("{} spaces, {} objects, {} edges", spaces.len(), objects.len(), edges.len());
    Ok((json!({"spaces": spaces, "objects": objects, "edges": edges}), summary))
}

fn cmd_contract(file: &Path, kind: PlanKind) -> Out {
    let diagram = load(file)?.to_diagram()?;
    let decl = dsl::declaration_plan(&diagram);
    let (name, plan) = match kind {
        PlanKind::Greedy => ("greedy", dsl::plan(&diagram)),
        PlanKind::Decl => ("decl", decl.clone()),
    };
    let result = plan.execute(&diagram)?;
    let summary = format!("{name} plan, cost {} (declaration order {}), result [{}]", plan.cost, decl.cost, result.leg_summary());
    Ok((
        json!({
            "plan": name,
            "order": plan.order,
            "cost": plan.cost as u64,
            "declaration_cost": decl.cost as u64,
            "result": tensor_json(&result),
        }),
        summary,
    ))
}

fn cmd_schmidt(file: &Path, obj: &str, tol: f64) -> Out {
    let psi = BipartiteKet::new(named(&load(file)?, obj)?)?;
    let sd = schmidt(&psi, tol)?;
    let summary = format!("Schmidt rank {} of {}", sd.rank, sd.coefficients.len());
    Ok((json!({"object": obj, "coefficients": sd.coefficients, "rank": sd.rank}), summary))
}

fn cmd_invert(file: &Path, obj: &str, tol: f64) -> Out {
    let psi = named(&load(file)?, obj)?;
    let inv = invert_ket(&psi, tol)?;
    let d = psi.legs()[0].dim();
    let id = CMatrix::identity(d, d);
    // both ways of closing Psi^-1 against Psi
    let over_second = inv.contract(&psi, &[(1, 1)])?.matricize(&[0], &[1])?;
    let over_first = inv.contract(&psi, &[(0, 0)])?.matricize(&[0], &[1])?;
    let residual = linalg::max_abs_diff(&over_second, &id).max(linalg::max_abs_diff(&over_first, &id));
    let summary = format!("inverse of {obj}, identity residual {residual:.3e}");
    Ok((json!({"object": obj, "inverse": tensor_json(&inv), "residual": residual}), summary))
}

fn leg_selection(t: &Tensor, specs: &[String]) -> std::result::Result<Vec<usize>, Failure> {
    let mut out = Vec::new();
    for s in specs {
        let picked: Vec<usize> = match s.parse::<usize>() {
            Ok(k) if k >= 1 && k <= t.legs().len() => vec![k - 1],
            Ok(k) => return Err(Failure::Input(format!("leg {k} out of range 1..={}", t.legs().len()))),
            Err(_) => (0..t.legs().len()).filter(|&k| t.legs()[k].space.label() == s && t.legs()[k].polarity == Polarity::Open).collect(),
        };
        if picked.is_empty() {
            return Err(Failure::Input(format!("no open leg on space '{s}'")));
        }
        out.extend(picked);
    }
    out.sort_unstable();
    out.dedup();
    if out.iter().any(|&k| t.legs()[k].polarity != Polarity::Open) {
        return Err(Failure::Input("environment legs must be open".into()));
    }
    Ok(out)
}

fn cmd_kraus_rank(file: &Path, obj: &str, f_legs: &[String], tol: f64) -> Out {
    let v = named(&load(file)?, obj)?;
    let f = leg_selection(&v, f_legs)?;
    let (open, closed) = v.polarity_split();
    let b: Vec<usize> = open.into_iter().filter(|k| !f.contains(k)).collect();
    if b.is_empty() || closed.is_empty() {
        return Err(Failure::Input("need at least one output leg and one input leg besides the environment".into()));
    }
    let dim = |ks: &[usize]| ks.iter().map(|&k| v.legs()[k].dim()).product::<usize>();
    let m = v.matricize(&[b.clone(), f.clone()].concat(), &closed)?;
    let iso = Isometry::from_matrix(
        &Space::new("b", dim(&b))?,
        &Space::new("f", dim(&f))?,
        &Space::new("a", dim(&closed))?,
        &m,
    )?;
    let channel = Channel::new(iso)?;
    let (k, r) = (kraus_rank(&channel, tol)?, dynamical_rank(&channel, tol)?);
    Ok((json!({"object": obj, "kraus_rank": k, "dynamical_rank": r}), format!("Kraus rank {k}, rank of R {r}")))
}

fn cmd_cp_check(file: &Path, obj: &str, tol: f64) -> Out {
    let q = named(&load(file)?, obj)?;
    let pos = is_completely_positive(&q, tol)?;
    let verdict = if pos.positive { "completely positive" } else { "not completely positive" };
    Ok((
        json!({"object": obj, "completely_positive": pos.positive, "min_eigenvalue": pos.min_eigenvalue}),
        format!("{verdict}, smallest eigenvalue of R {:.6}", pos.min_eigenvalue),
    ))
}

/// Resource on `(a, b)` and input on `c`, relabelled to those names.
fn protocol_inputs(resource: &Path, input: &Path) -> std::result::Result<(BipartiteKet, Tensor), Failure> {
    let psi = first_ket(&load(resource)?, 2, "resource ket")?;
    let c_ket = first_ket(&load(input)?, 1, "input ket")?;
    let (da, db, dc) = (psi.legs()[0].dim(), psi.legs()[1].dim(), c_ket.legs()[0].dim());
    let (a, b, c) = (Space::new("a", da)?, Space::new("b", db)?, Space::new("c", dc)?);
    let psi = BipartiteKet::new(psi.relabel(vec![Leg::open(&a), Leg::open(&b)])?)?;
    let c_ket = c_ket.relabel(vec![Leg::open(&c)])?;
    let n = c_ket.norm();
    if n == 0.0 {
        return Err(Failure::Domain(Error::ZeroOperator));
    }
    Ok((psi, c_ket.scale(linalg::c(1.0 / n, 0.0))))
}

fn outcome_json(out: &ProtocolOutcome) -> Value {
    let mut v = serde_json::to_value(out).expect("plain data");
    v["min_fidelity"] = json!(out.min_fidelity());
    v
}

fn cmd_teleport(resource: &Path, input: &Path) -> Out {
    let (psi, c_ket) = protocol_inputs(resource, input)?;
    let setup = TeleportSetup::standard(psi, c_ket.legs()[0].space.clone())?;
    let out = run_teleport(&setup, &c_ket)?;
    let summary = format!("{} outcomes, success {:.12}, min fidelity {:.12}", out.q.len(), out.p_s, out.min_fidelity());
    Ok((outcome_json(&out), summary))
}

fn cmd_unambiguous(resource: &Path, variant: Variant, input: &Path) -> Out {
    let (psi, c_ket) = protocol_inputs(resource, input)?;
    let cs = c_ket.legs()[0].space.clone();
    let (name, proto) = match variant {
        Variant::Alice => ("alice", build_povm_alice_concentrates(&psi, &crate::protocols::bell_basis(&cs, psi.space_a())?)?),
        Variant::Bob => ("bob", build_bob_corrects(&psi, &crate::protocols::bell_basis(&cs, psi.space_a())?)?),
        Variant::Split => ("split", build_split_concentration(&psi)?),
    };
    let out = run_unambiguous(&proto, &c_ket)?;
    let lm = schmidt(&psi.normalized()?, DEFAULT_RANK_TOL)?.min_coefficient();
    let bound = cs.dim() as f64 * lm * lm;
    let mut v = outcome_json(&out);
    v["variant"] = json!(name);
    v["bound"] = json!(bound);
    let summary = format!("{name}: success {:.12} against bound {:.12}", out.p_s, bound);
    Ok((v, summary))
}

fn cmd_census(da: usize, de: usize, samples: usize, seed: u64, structured: bool, tol: f64) -> Out {
    let h = rank_census(da, de, samples, seed, tol, structured)?;
    let counts: Vec<String> = h.counts.iter().map(|(r, n)| format!("rank {r}: {n}")).collect();
    let summary = format!("{}; gap violations {}", counts.join(", "), h.gap_violations);
    Ok((serde_json::to_value(&h).expect("plain data"), summary))
}

fn dispatch(cli: &Cli) -> Out {
    match &cli.command {
        Command::Parse { file } => cmd_parse(file),
        Command::Contract { file, plan } => cmd_contract(file, *plan),
        Command::Schmidt { file, obj, tol } => cmd_schmidt(file, obj, *tol),
        Command::Invert { file, obj, tol } => cmd_invert(file, obj, *tol),
        Command::KrausRank { file, obj, f_legs, tol } => cmd_kraus_rank(file, obj, f_legs, *tol),
        Command::CpCheck { file, obj, tol } => cmd_cp_check(file, obj, *tol),
        Command::Teleport { resource, input } => cmd_teleport(resource, input),
        Command::Unambiguous { resource, variant, input } => cmd_unambiguous(resource, *variant, input),
        Command::Census { da, de, samples, seed, structured, tol } => cmd_census(*da, *de, *samples, *seed, *structured, *tol),
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    let (doc, code) = match dispatch(&cli) {
        Ok((doc, summary)) => {
            if cli.verbose {
                let _ = writeln!(stderr, "{summary}");
            }
            (doc, 0)
        }
        Err(f) => {
            let message = match &f {
                Failure::Parse(e) => e.to_string(),
                Failure::Domain(e) => e.to_string(),
                Failure::Input(m) => m.clone(),
            };
            let _ = writeln!(stderr, "error: {message}");
            (f.to_json(), f.exit_code())
        }
    };
    let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).expect("plain data"));
    code
}
