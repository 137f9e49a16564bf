use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use nilamalgam_core::abelian::{abelianize_amalgam, abelianize_pc, AbelianReport};
use nilamalgam_core::certificate::{self, Certificate, Codomain, Kind, CHECKS};
use nilamalgam_core::error::Error;
use nilamalgam_core::residual::Orientation;
use nilamalgam_core::workspace::{Resolved, Workspace, BUILTINS};
use nilamalgam_core::CONVENTION;

#[derive(Parser)]
#[command(name = "nilamalgam", version, about = "Nilpotent groups, amalgams and residual-solvability witnesses")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Print machine-readable JSON
    #[arg(long, global = true)]
    json: bool,

    /// Try strategies one at a time in a fixed order
    #[arg(long, global = true)]
    deterministic: bool,

    /// Largest derived length accepted for a separating quotient
    #[arg(long, global = true, default_value_t = 4, value_name = "N")]
    max_derived_length: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Normal form of a word in a group or amalgam
    Nf {
        /// Workspace JSON file or builtin:NAME
        file: String,
        target: String,
        word: String,
    },
    /// Invariant factors and free rank of the abelianization
    Abelianize { file: String, target: Option<String> },
    /// Run a named check and emit a certificate
    Verify {
        /// One of the checks listed by `nilamalgam list`
        check: String,
        file: String,
        target: Option<String>,
    },
    /// Search for a solvable quotient in which the word survives
    Separate { file: String, target: String, word: String },
    /// Re-run the checks recorded in a certificate
    Recheck {
        certificate: PathBuf,
        /// Workspace to check against; defaults to the one recorded
        workspace: Option<String>,
    },
    /// Built-in workspaces and available checks
    List,
}

/// Exit status: 0 verified, 1 failed or unknown, 2 bad input.
#[derive(Clone, Copy)]
enum Status {
    Verified,
    Failed,
}

impl From<bool> for Status {
    fn from(ok: bool) -> Self {
        if ok {
            Status::Verified
        } else {
            Status::Failed
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Verified) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Status, Error> {
    match &cli.command {
        Command::Nf { file, target, word } => nf(cli, file, target, word),
        Command::Abelianize { file, target } => abelianize(cli, file, target.as_deref()),
        Command::Verify { check, file, target } => {
            let ws = Workspace::load(file)?;
            let cert = certificate::verify(&ws, check, target.as_deref())?;
            emit(cli, &cert);
            Ok(cert.verified.into())
        }
        Command::Separate { file, target, word } => {
            let ws = Workspace::load(file)?;
            let cert = certificate::separate_certificate(&ws, target, word, cli.max_derived_length, cli.deterministic)?;
            emit(cli, &cert);
            Ok(cert.verified.into())
        }
        Command::Recheck { certificate, workspace } => recheck(cli, certificate, workspace.as_deref()),
        Command::List => {
            if cli.json {
                println!("{}", json!({ "builtins": BUILTINS, "checks": CHECKS, "convention": CONVENTION }));
            } else {
                println!("builtins: {}", BUILTINS.map(|b| format!("builtin:{b}")).join(", "));
                println!("checks: {}", CHECKS.join(", "));
                println!("convention: {CONVENTION}");
            }
            Ok(Status::Verified)
        }
    }
}

fn nf(cli: &Cli, file: &str, target: &str, word: &str) -> Result<Status, Error> {
    let ws = Workspace::load(file)?;
    let w = ws.parse_in(target, word)?;
    match ws.resolve(target)? {
        Resolved::Group(g) => {
            let x = g.collect(&w);
            if cli.json {
                let exps: Vec<String> = x.exponents().iter().map(ToString::to_string).collect();
                println!("{}", json!({ "target": target, "normal_form": g.fmt_elem(&x), "exponents": exps }));
            } else {
                println!("{}", g.fmt_elem(&x));
            }
        }
        Resolved::Amalgam(a) => {
            let x = a.normal_form(&w);
            if cli.json {
                let head = a.factor(0).fmt_elem(&a.embedding(0).apply(&x.head));
                let tail: Vec<_> = x
                    .tail
                    .iter()
                    .map(|(f, r)| json!({ "factor": a.factor(*f).name(), "rep": a.factor(*f).fmt_elem(r) }))
                    .collect();
                let out = json!({
                    "target": target,
                    "normal_form": a.fmt_elem(&x),
                    "head": head,
                    "syllables": tail,
                    "syllable_length": x.syllable_length(),
                });
                println!("{out}");
            } else {
                println!("{}", a.fmt_elem(&x));
            }
        }
    }
    Ok(Status::Verified)
}

fn abelianize(cli: &Cli, file: &str, target: Option<&str>) -> Result<Status, Error> {
    let ws = Workspace::load(file)?;
    let name = match target {
        Some(t) => t.to_string(),
        None if ws.amalgams.is_empty() && ws.groups.len() == 1 => ws.groups.keys().next().cloned().unwrap_or_default(),
        None => ws.default_amalgam()?.name().to_string(),
    };
    let ab = match ws.resolve(&name)? {
        Resolved::Group(g) => abelianize_pc(&g),
        Resolved::Amalgam(a) => abelianize_amalgam(&a),
    };
    if cli.json {
        let mut v = serde_json::to_value(AbelianReport::from(&ab)).expect("serializable");
        v["target"] = json!(name);
        println!("{v}");
    } else {
        println!("{}", ab.group);
    }
    Ok(Status::Verified)
}

fn recheck(cli: &Cli, path: &PathBuf, workspace: Option<&str>) -> Result<Status, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    let cert = Certificate::from_json(&text)?;
    let ws = Workspace::load(workspace.unwrap_or(&cert.workspace))?;
    match certificate::recheck(&cert, &ws) {
        Ok(()) => {
            let verdict = if cert.verified { "verified" } else { "failed" };
            if cli.json {
                println!("{}", json!({ "recheck": "ok", "check": cert.check, "target": cert.target, "verdict": verdict }));
            } else {
                println!("recheck ok: {} {} {verdict}", cert.check, cert.target);
            }
            Ok(cert.verified.into())
        }
        Err(e @ (Error::Unresolved(_) | Error::Parse { .. })) => Err(e),
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "recheck": "rejected", "reason": e.to_string() }));
            } else {
                println!("certificate rejected: {e}");
            }
            Ok(Status::Failed)
        }
    }
}

fn emit(cli: &Cli, cert: &Certificate) {
    if cli.json {
        println!("{}", cert.to_json());
        return;
    }
    let verdict = match (cert.verified, cert.conclusion.as_str()) {
        (true, _) => "verified",
        (false, "unknown") => "unknown",
        (false, _) => "failed",
    };
    println!("{} {}: {verdict}", cert.check, cert.target);
    if let Some(s) = cert.strategy {
        println!("strategy: {s}");
    }
    if let (Some(e), Some(i)) = (&cert.element, &cert.image) {
        println!("image of {e}: {i}");
    }
    for (k, step) in cert.chain.iter().enumerate() {
        let to = match &step.codomain {
            Codomain::Pc { presentation } => presentation.clone(),
            Codomain::Amalgam { name, factors, .. } => format!("{name} = {}", factors.join(" * ")),
            Codomain::Completion { lattice } => format!("completion of {lattice}"),
        };
        println!("step {}: {} -> {to}", k + 1, step.domain);
        for c in &step.checks {
            println!("    {c}");
        }
    }
    for f in &cert.kernel_facts {
        println!("kernel: {}", f.statement);
    }
    if let Some(t) = &cert.trap {
        let orientation = match t.orientation {
            Orientation::AsStated => "as stated",
            Orientation::Inverted => "with inverted conjugation",
        };
        println!("identity: {} = {} ({orientation})", t.lhs, t.rhs);
        for d in &t.deductions {
            println!("  => {d}");
        }
    }
    if cert.kind == Kind::Report {
        for (k, v) in &cert.report {
            println!("{k}: {v}");
        }
    }
    if let Some(d) = cert.derived_length {
        println!("derived length: {d}");
    }
    println!("{}", cert.conclusion);
}
