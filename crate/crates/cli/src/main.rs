use clap::{Args, Parser, Subcommand, ValueEnum};
use ptgraph::hardness::{
    check_certificate, d_representation_from_certificate, find_certificate, gadget_graph,
    interval_orders_from_representation, is_proper_d_graph, HeightOnePoset, IntervalOrder,
};
use ptgraph::host::all_trees;
use ptgraph::io::{parse_graph, parse_host, parse_poset, write_edge_list};
use ptgraph::oracle::{
    connected_chordal_graphs, gen_chordal, gen_planted, oracle_recognize_with, OracleError, DEFAULT_BUDGET,
};
use ptgraph::representation::{verify_compact, verify_proper, verify_represents};
use ptgraph::solver::{proper_leafage, recognize_detailed, SolverError};
use ptgraph::structure::chains;
use ptgraph::{Graph, HostTree, Representation};
use rayon::prelude::*;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
}

enum Answer {
    Yes,
    No,
}

#[derive(Parser)]
#[command(
    name = "ptgraph",
    version,
    about = "Proper T-graph recognition, oracles and hardness gadgets"
)]
struct Cli {
    /// Worker threads for parallel enumeration.
    #[arg(long, global = true, env = "PTGRAPH_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Machine-readable output on stdout.
    #[arg(long, conflicts_with = "dot")]
    json: bool,
    /// Graphviz output of the representation.
    #[arg(long)]
    dot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a graph is a proper T-graph.
    Recognize {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Brute-force decision over clique trees.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Check a representation file against a graph.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, value_enum, default_value_t = VerifyMode::Proper)]
        mode: VerifyMode,
    },
    /// Print maximal cliques, guards and chains.
    Chains {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Minimum number of leaves of a host tree.
    Leafage {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Hardness gadget for height-one posets.
    Gadget {
        #[command(subcommand)]
        action: GadgetAction,
    },
    /// Random instances.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        /// Host tree for planted instances.
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Where to write the planted representation.
        #[arg(long)]
        rep_out: Option<PathBuf>,
    },
    /// Compare the solver with the oracle on all small connected chordal graphs and trees.
    Corpus {
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, default_value_t = 5)]
        max_t: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum GadgetAction {
    /// Emit the gadget graph of a poset as an edge list.
    Build {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Search for three interval orders realizing the poset and a representation on the gadget host.
    Certify {
        #[arg(long)]
        poset: PathBuf,
        /// Also decide the gadget graph with the SAT encoding.
        #[arg(long)]
        sat: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Read interval orders off a representation of the gadget graph and check them.
    Extract {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Represents,
    Proper,
    Compact,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Chordal,
    Planted,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })
}

fn input(path: &Path, message: impl ToString) -> CliError {
    CliError::Input {
        path: path.to_owned(),
        message: message.to_string(),
    }
}

fn load_graph(path: &Path) -> Result<Graph, CliError> {
    parse_graph(&read(path)?).map_err(|e| input(path, e))
}

fn load_tree(path: &Path) -> Result<HostTree, CliError> {
    let host = parse_host(&read(path)?).map_err(|e| input(path, e))?;
    HostTree::from_host(host).map_err(|e| input(path, e))
}

fn load_rep(path: &Path) -> Result<Representation, CliError> {
    Representation::from_json(&read(path)?).map_err(|e| input(path, e))
}

fn load_poset(path: &Path) -> Result<HeightOnePoset, CliError> {
    parse_poset(&read(path)?).map_err(|e| input(path, e))
}

fn emit_rep(g: &Graph, r: &Representation, out: &Output) {
    if out.json {
        println!("{}", r.to_json());
    } else if out.dot {
        print!("{}", r.to_dot(g));
    } else {
        println!("host: {} nodes, {} edges", r.host.node_count(), r.host.edge_count());
        for (v, m) in r.models.iter().enumerate() {
            println!("{}: {:?}", g.label(v), m);
        }
    }
}

fn verdict(yes: bool) -> Answer {
    if yes {
        Answer::Yes
    } else {
        Answer::No
    }
}

fn orders_json(p: &HeightOnePoset, orders: &[IntervalOrder]) -> serde_json::Value {
    let names: Vec<&str> = (0..p.len()).map(|x| p.name(x)).collect();
    json!(orders
        .iter()
        .map(|o| names
            .iter()
            .zip(&o.intervals)
            .map(|(n, iv)| json!({ "element": n, "interval": [iv.0, iv.1] }))
            .collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn print_orders(p: &HeightOnePoset, orders: &[IntervalOrder]) {
    for (k, o) in orders.iter().enumerate() {
        let parts: Vec<String> = o
            .intervals
            .iter()
            .enumerate()
            .map(|(x, (l, r))| format!("{}=[{l},{r}]", p.name(x)))
            .collect();
        println!("order {k}: {}", parts.join(" "));
    }
}

fn run(cli: Cli) -> Result<Answer, CliError> {
    match cli.command {
        Command::Recognize { graph, tree, out } => {
            let g = load_graph(&graph)?;
            let t = load_tree(&tree)?;
            let res = recognize_detailed(&g, &t);
            match &res.witness {
                Some(r) => emit_rep(&g, r, &out),
                None => {
                    if let Some(cycle) = &res.cycle {
                        eprintln!("not chordal: induced cycle {cycle:?}");
                    }
                    if out.json {
                        let failure = res.failure.map(|f| json!({ "node": f.node, "blocked": f.blocked }));
                        println!(
                            "{}",
                            json!({ "answer": false, "templates_tried": res.templates_tried, "cycle": res.cycle, "failure": failure })
                        );
                    } else {
                        println!("no");
                    }
                }
            }
            eprintln!("templates tried: {}", res.templates_tried);
            Ok(verdict(res.witness.is_some()))
        }
        Command::Oracle {
            graph,
            tree,
            budget,
            out,
        } => {
            let g = load_graph(&graph)?;
            let t = load_tree(&tree)?;
            match oracle_recognize_with(&g, &t, budget) {
                Ok(Some(r)) => {
                    emit_rep(&g, &r, &out);
                    Ok(Answer::Yes)
                }
                Ok(None) => {
                    println!("{}", if out.json { "{\"answer\":false}" } else { "no" });
                    Ok(Answer::No)
                }
                Err(e @ OracleError::BadInput) => Err(input(&graph, e)),
                Err(e) => Err(CliError::Usage(e.to_string())),
            }
        }
        Command::Verify { graph, rep, mode } => {
            let g = load_graph(&graph)?;
            let r = load_rep(&rep)?;
            let result = match mode {
                VerifyMode::Represents => verify_represents(&g, &r),
                VerifyMode::Proper => verify_proper(&g, &r),
                VerifyMode::Compact => verify_compact(&g, &r),
            };
            match result {
                Ok(()) => {
                    println!("ok");
                    Ok(Answer::Yes)
                }
                Err(v) => {
                    println!("violation: {v}");
                    Ok(Answer::No)
                }
            }
        }
        Command::Chains { graph, json } => {
            let g = load_graph(&graph)?;
            let cs = match chains(&g) {
                Ok(cs) => cs,
                Err(e) => {
                    println!(
                        "{}",
                        if json {
                            json!({ "chordal": false, "error": e.to_string() }).to_string()
                        } else {
                            e.to_string()
                        }
                    );
                    return Ok(Answer::No);
                }
            };
            if json {
                let doc = json!({
                    "chordal": true,
                    "cliques": cs.context.cliques,
                    "guards": cs.guards,
                    "not_surrounded": cs.not_surrounded,
                    "chains": cs.chains,
                    "consistent": cs.consistent,
                });
                println!("{doc}");
            } else {
                for (c, q) in cs.context.cliques.iter().enumerate() {
                    let gd = &cs.guards[c];
                    println!("clique {c}: {q:?} left {:?} right {:?}", gd.left, gd.right);
                }
                println!("not surrounded: {:?}", cs.not_surrounded);
                for (i, ch) in cs.chains.iter().enumerate() {
                    println!("chain {i}: {:?} | {:?} | {:?}", ch.start, ch.inner, ch.end);
                }
                if !cs.consistent {
                    println!("inconsistent guards: no compact representation");
                }
            }
            Ok(verdict(cs.consistent))
        }
        Command::Leafage { graph, json } => {
            let g = load_graph(&graph)?;
            match proper_leafage(&g) {
                Ok(l) => {
                    println!(
                        "{}",
                        if json {
                            json!({ "leafage": l }).to_string()
                        } else {
                            l.to_string()
                        }
                    );
                    Ok(Answer::Yes)
                }
                Err(SolverError::NotChordal(cycle)) => {
                    eprintln!("not chordal: induced cycle {cycle:?}");
                    println!(
                        "{}",
                        if json {
                            json!({ "leafage": null, "cycle": cycle }).to_string()
                        } else {
                            "none".into()
                        }
                    );
                    Ok(Answer::No)
                }
                Err(e) => Err(CliError::Usage(e.to_string())),
            }
        }
        Command::Gadget { action } => gadget(action),
        Command::Gen {
            kind,
            n,
            seed,
            density,
            tree,
            rep_out,
        } => {
            let g = match kind {
                GenKind::Chordal => gen_chordal(n, density, seed),
                GenKind::Planted => {
                    let path =
                        tree.ok_or_else(|| CliError::Usage("--tree is required for planted instances".into()))?;
                    let t = load_tree(&path)?;
                    let (g, r) = gen_planted(&t, n, seed).map_err(|e| CliError::Usage(e.to_string()))?;
                    if let Some(out) = rep_out {
                        std::fs::write(&out, r.to_json() + "\n")
                            .map_err(|source| CliError::Read { path: out, source })?;
                    }
                    g
                }
            };
            print!("{}", write_edge_list(g.n(), &g.edges()));
            Ok(Answer::Yes)
        }
        Command::Corpus {
            max_n,
            max_t,
            budget,
            json,
        } => corpus(max_n, max_t, budget, json),
    }
}

fn gadget(action: GadgetAction) -> Result<Answer, CliError> {
    match action {
        GadgetAction::Build { poset, json } => {
            let p = load_poset(&poset)?;
            let g = gadget_graph(&p);
            if json {
                let labels: Vec<String> = (0..g.n()).map(|v| g.label(v)).collect();
                println!("{}", json!({ "n": g.n(), "edges": g.edges(), "labels": labels }));
            } else {
                print!("{}", write_edge_list(g.n(), &g.edges()));
            }
            Ok(Answer::Yes)
        }
        GadgetAction::Certify { poset, sat, out } => {
            let p = load_poset(&poset)?;
            if p.len() > 6 {
                return Err(input(&poset, "certificate search handles at most six elements"));
            }
            let g = gadget_graph(&p);
            let cert = find_certificate(&p);
            if sat {
                let found = is_proper_d_graph(&g).map_err(|e| CliError::Usage(e.to_string()))?;
                eprintln!(
                    "sat: gadget graph is {}a proper D-graph",
                    if found.is_some() { "" } else { "not " }
                );
            }
            let Some(orders) = cert else {
                println!(
                    "{}",
                    if out.json {
                        "{\"certificate\":null}"
                    } else {
                        "no certificate"
                    }
                );
                return Ok(Answer::No);
            };
            let r = d_representation_from_certificate(&p, &orders).map_err(|e| CliError::Usage(e.to_string()))?;
            if out.json {
                let rep: serde_json::Value = serde_json::from_str(&r.to_json()).expect("valid json");
                println!(
                    "{}",
                    json!({ "certificate": orders_json(&p, &orders), "representation": rep })
                );
            } else if out.dot {
                print!("{}", r.to_dot(&g));
            } else {
                print_orders(&p, &orders);
            }
            Ok(Answer::Yes)
        }
        GadgetAction::Extract { poset, rep, json } => {
            let p = load_poset(&poset)?;
            let r = load_rep(&rep)?;
            let g = gadget_graph(&p);
            let orders = match interval_orders_from_representation(&g, &r) {
                Ok(o) => o,
                Err(e) => {
                    println!(
                        "{}",
                        if json {
                            json!({ "certificate": null, "error": e.to_string() }).to_string()
                        } else {
                            e.to_string()
                        }
                    );
                    return Ok(Answer::No);
                }
            };
            let valid = check_certificate(&p, &orders).map_err(|e| input(&poset, e))?;
            if json {
                println!("{}", json!({ "certificate": orders_json(&p, &orders), "valid": valid }));
            } else {
                print_orders(&p, &orders);
                println!("{}", if valid { "valid" } else { "invalid" });
            }
            Ok(verdict(valid))
        }
    }
}

fn corpus(max_n: usize, max_t: usize, budget: usize, json: bool) -> Result<Answer, CliError> {
    if max_n > 8 || max_t > 7 {
        return Err(CliError::Usage("corpus is limited to --max-n 8 and --max-t 7".into()));
    }
    let graphs: Vec<Graph> = (1..=max_n).flat_map(connected_chordal_graphs).collect();
    let trees: Vec<HostTree> = (1..=max_t).flat_map(all_trees).collect();
    let pairs: Vec<(usize, usize)> = (0..graphs.len())
        .flat_map(|g| (0..trees.len()).map(move |t| (g, t)))
        .collect();
    let outcomes: Vec<Result<(bool, bool), String>> = pairs
        .par_iter()
        .map(|&(gi, ti)| {
            let (g, t) = (&graphs[gi], &trees[ti]);
            let ours = recognize_detailed(g, t)
                .witness
                .is_some_and(|r| verify_proper(g, &r).is_ok());
            let theirs = oracle_recognize_with(g, t, budget)
                .map_err(|e| e.to_string())?
                .is_some();
            Ok((ours, theirs))
        })
        .collect();
    let mut yes = 0;
    let mut disagreements = Vec::new();
    for (&(gi, ti), o) in pairs.iter().zip(&outcomes) {
        match o {
            Ok((ours, theirs)) => {
                yes += usize::from(*theirs);
                if ours != theirs {
                    disagreements.push(json!({ "graph": graphs[gi].edges(), "n": graphs[gi].n(), "tree": trees[ti].edges(), "solver": ours, "oracle": theirs }));
                }
            }
            Err(e) => return Err(CliError::Usage(e.clone())),
        }
    }
    if json {
        println!(
            "{}",
            json!({ "graphs": graphs.len(), "trees": trees.len(), "yes": yes, "disagreements": disagreements })
        );
    } else {
        println!(
            "{} graphs x {} trees, {yes} yes, {} disagreements",
            graphs.len(),
            trees.len(),
            disagreements.len()
        );
        for d in &disagreements {
            println!("{d}");
        }
    }
    Ok(verdict(disagreements.is_empty()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(Answer::Yes) => ExitCode::SUCCESS,
        Ok(Answer::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
