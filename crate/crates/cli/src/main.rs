//! `fcw`: command-line front end for the free-construction workbench.
//!
//! Exit codes: 0 success, 1 parse/validation/usage error, 2 an Unknown
//! verdict (or unknowns in a verification run), 3 verification failures.

use clap::{Parser, Subcommand, ValueEnum};
use fcw_core::dsl::{emit_example54, emit_theta, emit_xi, Document};
use fcw_core::verify::{run_suite, suite_ids, SuiteParams};
use fcw_core::{rewrite, subgroup, Verdict};
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fcw", version, about = "workbench for free groups and nested free constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Dsl,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate workspace files (use `-` for stdin).
    Check {
        /// Input files.
        files: Vec<String>,
    },
    /// Print the normal form of a word in a group.
    Reduce {
        #[arg(short = 'g', long = "group")]
        group: String,
        /// The word, in the group's alphabet.
        word: String,
        #[arg(short = 'f', long = "file")]
        files: Vec<String>,
    },
    /// Decide membership of a word in a declared subgroup.
    Member {
        #[arg(short = 'g', long = "group")]
        group: String,
        #[arg(short = 's', long = "subgroup")]
        subgroup: String,
        word: String,
        /// Print a witness when one is available.
        #[arg(long)]
        witness: bool,
        #[arg(short = 'f', long = "file")]
        files: Vec<String>,
    },
    /// Intersect two subgroups of a free group and print a basis.
    Intersect {
        #[arg(short = 's', long = "subgroup", num_args = 1)]
        subgroups: Vec<String>,
        #[arg(short = 'f', long = "file")]
        files: Vec<String>,
    },
    /// Run a verification suite and print its JSON report.
    Verify {
        /// Suite identifier; `list` prints the available ones.
        suite: String,
        #[arg(long, default_value_t = 0)]
        m: i64,
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 300)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Mutation-testing hook: corrupt the construction on purpose.
        #[arg(long)]
        corrupt: bool,
        /// Zero the wall-time field so reports are byte-comparable.
        #[arg(long)]
        stable_output: bool,
    },
    /// Export a subgroup automaton as DOT.
    Dot {
        #[arg(short = 's', long = "subgroup")]
        subgroup: String,
        #[arg(short = 'f', long = "file")]
        files: Vec<String>,
    },
    /// Emit a built-in construction as DSL text.
    Gadget {
        /// One of: xi, theta, example54.
        name: String,
        #[arg(long, default_value_t = 0)]
        m: i64,
        #[arg(long, value_enum, default_value = "dsl")]
        emit: Emit,
    },
}

fn read_sources(files: &[String]) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for f in files {
        if f == "-" {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| format!("stdin: {e}"))?;
            out.push(("<stdin>".to_string(), text));
        } else {
            let text = std::fs::read_to_string(f).map_err(|e| format!("{f}: {e}"))?;
            out.push((f.clone(), text));
        }
    }
    Ok(out)
}

fn load(files: &[String]) -> Result<Document, String> {
    if files.is_empty() {
        return Err("no workspace files given (use -f FILE or `-` for stdin)".into());
    }
    let sources = read_sources(files)?;
    let refs: Vec<(&str, &str)> = sources.iter().map(|(n, t)| (n.as_str(), t.as_str())).collect();
    let doc = Document::parse(&refs).map_err(|e| format!("{e}"))?;
    let diags = doc.validate();
    if !diags.is_empty() {
        let mut msg = String::new();
        for (name, d) in diags {
            msg.push_str(&format!("{name}: {d}\n"));
        }
        return Err(msg);
    }
    Ok(doc)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Check { files } => {
            let files = if files.is_empty() { vec!["-".to_string()] } else { files };
            load(&files)?;
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce { group, word, files } => {
            let doc = load(&files)?;
            let id = doc.group(&group).map_err(|e| format!("{e}"))?;
            let w = doc.ws.parse(id, &word).map_err(|e| format!("{e}"))?;
            match rewrite::normal_form(&doc.ws, id, &w) {
                Ok(nf) => {
                    println!("{}", doc.ws.show(&nf));
                    Ok(ExitCode::SUCCESS)
                }
                Err(fcw_core::Error::UnsupportedMembership(r)) => {
                    eprintln!("unknown: {r}");
                    Ok(ExitCode::from(2))
                }
                Err(e) => Err(format!("{e}")),
            }
        }
        Command::Member { group, subgroup: sub, word, witness, files } => {
            let doc = load(&files)?;
            let id = doc.group(&group).map_err(|e| format!("{e}"))?;
            let handle = doc.subgroup(&sub).map_err(|e| format!("{e}"))?;
            if handle.ambient() != id {
                return Err(format!("subgroup `{sub}` does not live in group `{group}`"));
            }
            let w = doc.ws.parse(id, &word).map_err(|e| format!("{e}"))?;
            match subgroup::member(&doc.ws, handle, &w).map_err(|e| format!("{e}"))? {
                Verdict::Yes(found) => {
                    println!("Yes");
                    if witness {
                        match found {
                            Some(wit) => {
                                for (factor, exp) in &wit.factors {
                                    if *exp == 1 {
                                        println!("  ({})", doc.ws.show(factor));
                                    } else {
                                        println!("  ({})^{}", doc.ws.show(factor), exp);
                                    }
                                }
                            }
                            None => println!("  (no explicit witness for this strategy)"),
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Verdict::No => {
                    println!("No");
                    Ok(ExitCode::SUCCESS)
                }
                Verdict::Unknown(r) => {
                    println!("Unknown ({r})");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Intersect { subgroups, files } => {
            if subgroups.len() != 2 {
                return Err("intersect needs exactly two -s/--subgroup names".into());
            }
            let doc = load(&files)?;
            let a = doc.subgroup(&subgroups[0]).map_err(|e| format!("{e}"))?;
            let b = doc.subgroup(&subgroups[1]).map_err(|e| format!("{e}"))?;
            let (Some(x), Some(y)) = (a.automaton(), b.automaton()) else {
                return Err("intersection needs subgroups of a free group".into());
            };
            let i = x.intersect(y).map_err(|e| format!("{e}"))?;
            if i.rank() == 0 {
                println!("1");
            } else {
                for w in i.basis() {
                    println!("{}", doc.ws.show(w));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, m, r, samples, seed, jobs, corrupt, stable_output } => {
            if suite == "list" {
                for id in suite_ids() {
                    println!("{id}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            let params = SuiteParams { m, r, jobs, corrupt };
            let report = run_suite(&suite, &params, samples, seed).map_err(|e| format!("{e}"))?;
            let printable = if stable_output { report.without_timing() } else { report.clone() };
            println!("{}", printable.to_json());
            if report.fail > 0 {
                Ok(ExitCode::from(3))
            } else if report.unknown > 0 {
                Ok(ExitCode::from(2))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::Dot { subgroup: sub, files } => {
            let doc = load(&files)?;
            let handle = doc.subgroup(&sub).map_err(|e| format!("{e}"))?;
            let Some(aut) = handle.automaton() else {
                return Err("DOT export needs a subgroup of a free group".into());
            };
            print!("{}", aut.to_dot(doc.ws.symbols()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Gadget { name, m, emit } => {
            if emit != Emit::Dsl {
                return Err("gadgets are emitted as DSL text".into());
            }
            let text = match name.as_str() {
                "xi" => emit_xi(m),
                "theta" => emit_theta(m),
                "example54" => {
                    if m < 0 {
                        return Err("example54 requires m >= 0".into());
                    }
                    emit_example54(m)
                }
                other => return Err(format!("unknown gadget `{other}` (xi, theta, example54)")),
            };
            print!("{text}");
            Ok(ExitCode::SUCCESS)
        }
    }
}
