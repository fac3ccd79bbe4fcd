// SPDX-License-Identifier: Apache-2.0
//! Command-line driver. Exit codes: 0 success, 1 negative verdict, 2 bad input.

use std::collections::BTreeSet;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pgr::io::{export_dot, parse_document, serialize_document, serialize_graph, Document};
use pgr::matching::find_redexes;
use pgr::rewrite::{apply_at_with, normalize, ApplyOptions, NormalizeError, RuleSet, Strategy, DEFAULT_MAX_STEPS};
use pgr::rule::default_map_cap;
use pgr::systems::{detect_deadlock, ds_initial_network, explore_ds, DsLimits, Verdict, WaitForNet};
use pgr::{Graph, QuasiRule, VertexId};

#[derive(Parser)]
#[command(name = "pgr", version, about = "Patch graph rewriting")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    First,
    Random,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a file and report what it defines.
    Validate { file: PathBuf },
    /// Print every rule of a file with its shorthand expanded.
    Expand { file: PathBuf },
    /// List the redexes of a rule in a graph.
    Match {
        graphs: PathBuf,
        /// Rule file; defaults to the graph file.
        rules: Option<PathBuf>,
        #[arg(long)]
        rule: String,
        #[arg(long)]
        graph: Option<String>,
    },
    /// Apply one redex and print the result.
    Apply {
        graphs: PathBuf,
        rules: Option<PathBuf>,
        #[arg(long)]
        rule: String,
        #[arg(long)]
        graph: Option<String>,
        #[arg(long, default_value_t = 0)]
        redex_index: usize,
        #[arg(long)]
        fresh_base: Option<u64>,
    },
    /// Rewrite until no rule applies.
    Normalize {
        graphs: PathBuf,
        rules: Option<PathBuf>,
        #[arg(long)]
        graph: Option<String>,
        /// Use this system of the rule file instead of all its rules.
        #[arg(long)]
        system: Option<String>,
        #[arg(long, value_enum, default_value = "first")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Print the rewrite trace to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Decide whether a wait-for graph is deadlocked. Exits 1 if it is.
    Deadlock {
        file: PathBuf,
        #[arg(long)]
        graph: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
    },
    /// Explore Dijkstra-Scholten runs on a topology (a graph whose edges are
    /// the links). Exits 1 if announce is enabled in a non-quiescent state.
    DsExplore {
        topology: PathBuf,
        #[arg(long)]
        graph: Option<String>,
        /// Defaults to the smallest vertex.
        #[arg(long)]
        initiator: Option<u64>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long, default_value_t = 2)]
        max_sends: u32,
        #[arg(long, default_value_t = 200_000)]
        max_states: usize,
    },
    /// Print a graph in Graphviz format, optionally highlighting a redex.
    Dot {
        file: PathBuf,
        #[arg(long)]
        graph: Option<String>,
        /// Rule whose redex is highlighted.
        #[arg(long)]
        highlight: Option<String>,
        /// Rule file for `--highlight`; defaults to the graph file.
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        redex_index: usize,
    },
}

enum Failure {
    Negative(String),
    Input(String),
}

type CliResult = Result<(), Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn read(path: &Path) -> Result<Document, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| input(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?
    };
    parse_document(&text).map_err(|e| input(format!("{}:{e}", path.display())))
}

fn pick_graph(doc: &Document, name: Option<&str>) -> Result<(String, Graph), Failure> {
    match name {
        Some(n) => doc.graph(n).map(|g| (n.to_string(), g.clone())).ok_or_else(|| input(format!("no graph named {n}"))),
        None => match doc.graphs.as_slice() {
            [(n, g)] => Ok((n.clone(), g.clone())),
            [] => Err(input("the file defines no graph")),
            _ => Err(input("the file defines several graphs; pick one with --graph")),
        },
    }
}

fn rule_doc(rules: Option<&PathBuf>, gdoc: &Document) -> Result<Document, Failure> {
    match rules {
        Some(p) => read(p),
        None => Ok(gdoc.clone()),
    }
}

fn pick_rule<'d>(doc: &'d Document, name: &str) -> Result<&'d QuasiRule, Failure> {
    doc.rule(name).ok_or_else(|| input(format!("no rule named {name}")))
}

fn run(cli: Cli) -> CliResult {
    match cli.cmd {
        Cmd::Validate { file } => {
            let doc = read(&file)?;
            println!("{} graphs, {} rules, {} systems", doc.graphs.len(), doc.rules.len(), doc.systems.len());
            for (n, g) in &doc.graphs {
                println!("graph {n}: {} vertices, {} edges", g.vertex_count(), g.edge_count());
            }
            for r in &doc.rules {
                let kind = if r.deterministic { "deterministic" } else { "quasi" };
                println!("rule {}: {kind}, {} lhs type edges, {} rhs type edges", r.name, r.lhs.ptype.len(), r.rhs.ptype.len());
            }
            for w in &doc.warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        Cmd::Expand { file } => {
            let doc = read(&file)?;
            let rules_only = Document {
                rules: doc.rules.clone(),
                ..Document::default()
            };
            print!("{}", serialize_document(&rules_only));
            Ok(())
        }
        Cmd::Match { graphs, rules, rule, graph } => {
            let gdoc = read(&graphs)?;
            let rdoc = rule_doc(rules.as_ref(), &gdoc)?;
            let (_, g) = pick_graph(&gdoc, graph.as_deref())?;
            let r = pick_rule(&rdoc, &rule)?;
            let found = find_redexes(&g, r, default_map_cap());
            for (i, x) in found.redexes.iter().enumerate() {
                let h: Vec<String> = x.h_l.iter().map(|(e, t)| format!("{e}->{t}")).collect();
                println!("{i}: {} h{{{}}}", x.summary(), h.join(","));
            }
            if found.truncated {
                eprintln!("warning: adherence maps truncated at {}", default_map_cap());
            }
            println!("{} redexes", found.redexes.len());
            Ok(())
        }
        Cmd::Apply {
            graphs,
            rules,
            rule,
            graph,
            redex_index,
            fresh_base,
        } => {
            let gdoc = read(&graphs)?;
            let rdoc = rule_doc(rules.as_ref(), &gdoc)?;
            let (name, g) = pick_graph(&gdoc, graph.as_deref())?;
            let r = pick_rule(&rdoc, &rule)?;
            let found = find_redexes(&g, r, default_map_cap());
            let redex = found
                .redexes
                .get(redex_index)
                .ok_or_else(|| input(format!("rule {rule} has {} redexes, index {redex_index} is out of range", found.redexes.len())))?;
            let opts = ApplyOptions {
                fresh_base,
                shuffle_seed: None,
            };
            let (h, _) = apply_at_with(&g, redex, opts).map_err(|e| input(e.to_string()))?;
            print!("{}", serialize_graph(&name, &h));
            Ok(())
        }
        Cmd::Normalize {
            graphs,
            rules,
            graph,
            system,
            strategy,
            seed,
            max_steps,
            trace,
        } => {
            let gdoc = read(&graphs)?;
            let rdoc = rule_doc(rules.as_ref(), &gdoc)?;
            let (name, g) = pick_graph(&gdoc, graph.as_deref())?;
            let sys: RuleSet = match system {
                Some(s) => rdoc.system(&s).ok_or_else(|| input(format!("no system named {s}")))?,
                None => rdoc.all_rules(),
            };
            let strategy = match strategy {
                StrategyArg::First => Strategy::First,
                StrategyArg::Random => Strategy::Random(seed),
            };
            match normalize(&g, &sys, strategy, max_steps) {
                Ok(nf) => {
                    if trace {
                        for s in &nf.trace {
                            eprintln!("{}", s.redex);
                        }
                    }
                    print!("{}", serialize_graph(&name, &nf.graph));
                    Ok(())
                }
                Err(NormalizeError::StepLimitReached { partial }) => {
                    print!("{}", serialize_graph(&name, &partial.graph));
                    Err(Failure::Negative(format!("no normal form within {max_steps} steps")))
                }
                Err(e) => Err(input(e.to_string())),
            }
        }
        Cmd::Deadlock { file, graph, max_steps } => {
            let doc = read(&file)?;
            let (_, g) = pick_graph(&doc, graph.as_deref())?;
            let net = WaitForNet::new(g).map_err(|e| input(e.to_string()))?;
            let rep = detect_deadlock(&net, max_steps).map_err(|e| input(e.to_string()))?;
            match rep.verdict {
                Verdict::DeadlockFree => {
                    println!("deadlock-free ({} steps)", rep.trace.len());
                    Ok(())
                }
                Verdict::Deadlocked => {
                    print!("{}", serialize_graph("normal_form", &rep.normal_form));
                    Err(Failure::Negative("deadlocked".into()))
                }
            }
        }
        Cmd::DsExplore {
            topology,
            graph,
            initiator,
            max_depth,
            max_sends,
            max_states,
        } => {
            let doc = read(&topology)?;
            let (_, g) = pick_graph(&doc, graph.as_deref())?;
            let links: BTreeSet<(u64, u64)> = g.edges().map(|(_, e)| (e.src.0, e.tgt.0)).collect();
            let links: Vec<(u64, u64)> = links.into_iter().collect();
            let init = match initiator {
                Some(i) => i,
                None => g.vertices().next().map(|v: VertexId| v.0).ok_or_else(|| input("empty topology"))?,
            };
            if !g.contains_vertex(VertexId(init)) {
                return Err(input(format!("initiator {init} is not in the topology")));
            }
            let start = ds_initial_network(&links, init).map_err(|e| input(e.to_string()))?;
            let limits = DsLimits {
                max_sends_per_process: Some(max_sends),
                max_total_sends: None,
                max_depth,
                max_states,
            };
            let ex = explore_ds(&start, limits).map_err(|e| input(e.to_string()))?;
            println!(
                "{} states, {} transitions, announce enabled in {} states, {} violations{}",
                ex.states,
                ex.transitions,
                ex.announce_states,
                ex.violations.len(),
                if ex.complete { "" } else { " (search cut short)" }
            );
            if ex.violations.is_empty() {
                Ok(())
            } else {
                print!("{}", serialize_graph("violation", &ex.violations[0]));
                Err(Failure::Negative("announce enabled before quiescence".into()))
            }
        }
        Cmd::Dot {
            file,
            graph,
            highlight,
            rules,
            redex_index,
        } => {
            let gdoc = read(&file)?;
            let (_, g) = pick_graph(&gdoc, graph.as_deref())?;
            match highlight {
                None => print!("{}", export_dot(&g, None)),
                Some(rule) => {
                    let rdoc = rule_doc(rules.as_ref(), &gdoc)?;
                    let r = pick_rule(&rdoc, &rule)?;
                    let found = find_redexes(&g, r, default_map_cap());
                    let redex = found
                        .redexes
                        .get(redex_index)
                        .ok_or_else(|| input(format!("rule {rule} has no redex {redex_index}")))?;
                    print!("{}", export_dot(&g, Some(redex)));
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

