mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use modcheck::grammar::{eval_mod_with, parse_mod_string, MOD_CAP};
use modcheck::logic::{evaluate_with, parse_formula_with, Assignment, EvalOptions, SET_QUANTIFIER_CAP};
use modcheck::theta::{
    bridge_depth, elimination_distance, g_treewidth, model_check_theta_with, parametric_measure, parse_theta,
    Parameter, Target, MEASURE_CAP, THETA_CAP,
};
use modcheck::walls::{
    bidimensionality, canonical_partition, privileged_components, pseudogrid_from_wall, subdivide_wall,
    w_privileged_sequence, Scenario,
};
use modcheck::width::{max_bramble_order, treedepth_exact, treewidth_exact_with_limit, TREEWIDTH_LIMIT};
use modcheck::{elementary_wall, Error, Graph, Structure, VertexSet, Wall};

use report::Report;

/// Model checking, modification strings, modulator measures, walls and widths
/// on small graphs and structures.
#[derive(Parser)]
#[command(name = "modcheck", version)]
struct Cli {
    /// Search cap overriding the per-command default (sentences 14, formulas
    /// 16, modification strings 10, measures 12, treewidth 20).
    #[arg(long, global = true, env = "MODCHECK_CAP")]
    cap: Option<usize>,
    /// Print line-delimited `key=value` records.
    #[arg(long, global = true)]
    record: bool,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a formula or a compound sentence on a structure or graph.
    Check {
        structure: PathBuf,
        /// Sentence file, or the sentence itself with `-e`.
        sentence: String,
        #[arg(short = 'e', long = "expr")]
        inline: bool,
    },
    /// Evaluate a modification string on a graph.
    ModEval { graph: PathBuf, string: String },
    /// Modulator measures towards a target class.
    Measure {
        graph: PathBuf,
        measure: MeasureKind,
        /// `all`, `edgeless`, `forests`, `planar`, `excl{…}` or a sentence.
        #[arg(long, default_value = "edgeless")]
        target: String,
        /// Torso parameter for `pdist`.
        #[arg(long, value_enum, default_value = "size")]
        param: ParamKind,
    },
    /// Walls, canonical partitions, pseudogrids and privileged sets.
    Wall {
        #[command(subcommand)]
        command: WallCommand,
    },
    /// Treewidth with a decomposition, optionally treedepth and bramble order.
    Width {
        graph: PathBuf,
        #[arg(long)]
        decomposition: bool,
        #[arg(long)]
        treedepth: bool,
        #[arg(long)]
        bramble: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureKind {
    /// Elimination distance.
    Ed,
    /// Bridge depth.
    Bd,
    /// Treewidth of the best modulator's torso.
    Gtw,
    /// Parametric distance with `--param`.
    Pdist,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParamKind {
    Size,
    Td,
    Tw,
    Rtd,
}

#[derive(Subcommand)]
enum WallCommand {
    /// Print an elementary wall of height `r`, optionally subdivided.
    Gen {
        r: usize,
        /// Subdivide every elementary edge this many times.
        #[arg(long, default_value_t = 0)]
        subdivide: usize,
    },
    /// Canonical partition of a wall.
    Partition { wall: PathBuf },
    /// Paths of the central `q`-subwall.
    Pseudogrid { wall: PathBuf, q: usize },
    /// Privileged component for `X`, or the privileged sequence with
    /// `--scenario` and one `--x` per symbol.
    Privileged {
        wall: PathBuf,
        #[arg(long)]
        q: usize,
        /// Comma-separated vertex indices of the host.
        #[arg(long = "x")]
        xs: Vec<String>,
        #[arg(long)]
        scenario: Option<String>,
        /// Host graph containing the wall (matched by labels).
        #[arg(long)]
        host: Option<PathBuf>,
    },
    /// Number of internal bags of the canonical partition met by `X`.
    Bid {
        wall: PathBuf,
        #[arg(long = "x")]
        x: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::LimitExceeded { .. } => 3,
            Error::DeclaredTreewidthViolated { .. }
            | Error::Precondition(_)
            | Error::NotApplicable(_)
            | Error::ConstantsPresent => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn malformed(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(Output::Report(mut r)) => {
            if cli.timing {
                r.field("elapsed_ms", start.elapsed().as_millis());
            }
            print!("{}", r.render(cli.record));
            ExitCode::SUCCESS
        }
        Ok(Output::Raw(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

enum Output {
    Report(Report),
    Raw(String),
}

fn run(cli: &Cli) -> Outcome<Output> {
    match &cli.command {
        Command::Check {
            structure,
            sentence,
            inline,
        } => check(cli, structure, sentence, *inline).map(Output::Report),
        Command::ModEval { graph, string } => mod_eval(cli, graph, string).map(Output::Report),
        Command::Measure {
            graph,
            measure,
            target,
            param,
        } => measure_cmd(cli, graph, *measure, target, *param).map(Output::Report),
        Command::Wall { command } => wall(command),
        Command::Width {
            graph,
            decomposition,
            treedepth,
            bramble,
        } => width(cli, graph, *decomposition, *treedepth, *bramble).map(Output::Report),
    }
}

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))
}

fn is_structure_text(text: &str) -> bool {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .is_some_and(|l| l.starts_with("vocab"))
}

/// A structure file, or an edge list read as a graph.
fn read_structure(path: &Path, report: &mut Report) -> Outcome<Structure> {
    let text = read(path)?;
    report.input(&path.display().to_string(), &text);
    if is_structure_text(&text) {
        Ok(Structure::parse(&text)?)
    } else {
        Ok(Graph::parse_edge_list(&text)?.to_structure())
    }
}

fn read_graph(path: &Path, report: &mut Report) -> Outcome<Graph> {
    let text = read(path)?;
    report.input(&path.display().to_string(), &text);
    if is_structure_text(&text) {
        Ok(Graph::from_structure(&Structure::parse(&text)?)?)
    } else {
        Ok(Graph::parse_edge_list(&text)?)
    }
}

fn read_wall(path: &Path, report: &mut Report) -> Outcome<Wall> {
    let text = read(path)?;
    report.input(&path.display().to_string(), &text);
    Ok(Wall::parse(&text)?)
}

fn starts_with_word(text: &str, w: &str) -> bool {
    text.strip_prefix(w)
        .is_some_and(|r| !r.starts_with(|c: char| c.is_alphanumeric() || c == '_'))
}

fn check(cli: &Cli, path: &Path, sentence: &str, inline: bool) -> Outcome<Report> {
    let mut report = Report::new("check");
    let a = read_structure(path, &mut report)?;
    let text = if inline {
        report.input("<expr>", sentence);
        sentence.to_string()
    } else {
        let t = read(Path::new(sentence))?;
        report.input(sentence, &t);
        t
    };
    let text = text.trim();
    if starts_with_word(text, "base") || starts_with_word(text, "mod") {
        let theta = parse_theta(text)?;
        let cap = cli.cap.unwrap_or(THETA_CAP);
        let m = theta.metadata();
        report.field("kind", "theta");
        report.field("cap", cap);
        report.field("height", m.height);
        report.field("tw", m.tw);
        report.field("hw", m.hw);
        let w = model_check_theta_with(&a, &theta, cap)?;
        report.field("result", w.is_some());
        if let Some(w) = w {
            report.witness(w);
        }
    } else {
        let phi = parse_formula_with(text, a.vocabulary())?;
        let cap = cli.cap.unwrap_or(SET_QUANTIFIER_CAP);
        report.field("kind", "formula");
        report.field("cap", cap);
        let r = evaluate_with(&a, &phi, &Assignment::new(), EvalOptions { set_cap: cap })?;
        report.field("result", r);
    }
    Ok(report)
}

fn mod_eval(cli: &Cli, path: &Path, string: &str) -> Outcome<Report> {
    let mut report = Report::new("mod-eval");
    let g = read_graph(path, &mut report)?;
    report.input("<string>", string);
    let w = parse_mod_string(string)?;
    let cap = cli.cap.unwrap_or(MOD_CAP);
    report.field("string", &w);
    report.field("cap", cap);
    let r = eval_mod_with(&g, &w, cap)?;
    report.field("result", r.is_some());
    if let Some(script) = r {
        report.witness(script);
    }
    Ok(report)
}

fn parse_target(text: &str) -> Outcome<Target> {
    let text = text.trim();
    Ok(match text {
        "all" => Target::all(),
        "edgeless" => Target::edgeless(),
        "forests" => Target::forests(),
        "planar" => Target::excluding(modcheck::ObstructionSet::planar()),
        s if s.starts_with("excl") => match parse_theta(&format!("base(true ; {s})"))? {
            modcheck::ThetaSentence::Base(b) => Target::Class {
                sigma: b.sigma,
                obstructions: b.obstructions,
            },
            _ => unreachable!("parsed a base"),
        },
        s => Target::Sentence(parse_theta(s)?),
    })
}

fn measure_cmd(cli: &Cli, path: &Path, kind: MeasureKind, target: &str, param: ParamKind) -> Outcome<Report> {
    let mut report = Report::new("measure");
    let g = read_graph(path, &mut report)?;
    let t = parse_target(target)?;
    let cap = cli.cap.unwrap_or(MEASURE_CAP);
    report.field("target", target);
    report.field("cap", cap);
    let infinite = "infinite (no feasible modulator)";
    let put = |name: &str, value: Option<usize>, report: &mut Report| {
        report.field("measure", name);
        match value {
            Some(v) => report.field("value", v),
            None => report.field("value", infinite),
        }
    };
    match kind {
        MeasureKind::Ed => put("ed", elimination_distance(&g, &t, cap)?, &mut report),
        MeasureKind::Bd => put("bd", bridge_depth(&g, &t, cap)?, &mut report),
        MeasureKind::Gtw | MeasureKind::Pdist => {
            let (name, m) = match kind {
                MeasureKind::Gtw => ("gtw", g_treewidth(&g, &t, cap)?),
                _ => {
                    let p = match param {
                        ParamKind::Size => Parameter::Size,
                        ParamKind::Td => Parameter::Treedepth,
                        ParamKind::Tw => Parameter::Treewidth,
                        ParamKind::Rtd => Parameter::RecursiveTreedepth,
                    };
                    ("pdist", parametric_measure(&g, p, &t, cap)?)
                }
            };
            put(name, m.as_ref().map(|m| m.value), &mut report);
            if let Some(m) = m {
                report.field("modulator", vertex_list(&m.modulator));
            }
        }
    }
    Ok(report)
}

fn vertex_list(s: &VertexSet) -> String {
    let items: Vec<String> = s.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn parse_vertices(text: &str) -> Outcome<VertexSet> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| malformed(format!("`{s}` is not a vertex index"))))
        .collect()
}

fn wall(command: &WallCommand) -> Outcome<Output> {
    match command {
        WallCommand::Gen { r, subdivide } => {
            let w = elementary_wall(*r)?;
            let w = if *subdivide > 0 {
                let plan: BTreeMap<_, _> = w.elementary_edges().into_iter().map(|e| (e, *subdivide)).collect();
                subdivide_wall(&w, &plan)?
            } else {
                w
            };
            Ok(Output::Raw(w.to_text()))
        }
        WallCommand::Partition { wall } => {
            let mut report = Report::new("wall partition");
            let w = read_wall(wall, &mut report)?;
            let p = canonical_partition(&w);
            report.field("internal_bags", p.internal_count());
            let mut lines = String::new();
            for ((i, j), bag) in &p.internal {
                lines.push_str(&format!("Q({i},{j}) = {}\n", vertex_list(bag)));
            }
            lines.push_str(&format!("external = {}\n", vertex_list(&p.external)));
            report.witness(lines);
            Ok(Output::Report(report))
        }
        WallCommand::Pseudogrid { wall, q } => {
            let mut report = Report::new("wall pseudogrid");
            let w = read_wall(wall, &mut report)?;
            let pg = pseudogrid_from_wall(&w, *q)?;
            report.field("size", pg.size());
            let mut lines = String::new();
            for (i, p) in pg.horizontal.iter().enumerate() {
                lines.push_str(&format!("P{} = {:?}\n", i + 1, p));
            }
            for (i, p) in pg.vertical.iter().enumerate() {
                lines.push_str(&format!("Q{} = {:?}\n", i + 1, p));
            }
            report.witness(lines);
            Ok(Output::Report(report))
        }
        WallCommand::Privileged {
            wall,
            q,
            xs,
            scenario,
            host,
        } => {
            let mut report = Report::new("wall privileged");
            let w = read_wall(wall, &mut report)?;
            let g = match host {
                Some(h) => read_graph(h, &mut report)?,
                None => w.graph().clone(),
            };
            let map = w.embedding_in(&g)?;
            let pg = pseudogrid_from_wall(&w, *q)?.mapped(&map);
            let sets = xs.iter().map(|x| parse_vertices(x)).collect::<Outcome<Vec<_>>>()?;
            match scenario {
                None => {
                    let x = sets.into_iter().fold(VertexSet::new(), |mut acc, s| {
                        acc.extend(s);
                        acc
                    });
                    let comps = privileged_components(&g, &pg, &x);
                    report.field("privileged_count", comps.len());
                    let set = comps.first().cloned().unwrap_or_default();
                    report.field("privileged_size", set.len());
                    report.field("privileged", vertex_list(&set));
                }
                Some(s) => {
                    let w: Scenario = s.parse()?;
                    let seq = w_privileged_sequence(&g, &pg, &sets, &w)?;
                    report.field("scenario", &w);
                    report.field("privileged", vertex_list(seq.privileged_set()));
                    report.field("modulators_inside", seq.modulators_inside);
                    let lines: String = seq
                        .sets
                        .iter()
                        .enumerate()
                        .map(|(i, c)| format!("C{} = {}\n", i + 1, vertex_list(c)))
                        .collect();
                    report.witness(lines);
                }
            }
            Ok(Output::Report(report))
        }
        WallCommand::Bid { wall, x } => {
            let mut report = Report::new("wall bid");
            let w = read_wall(wall, &mut report)?;
            let x = parse_vertices(x)?;
            if let Some(&v) = x.iter().find(|&&v| v >= w.graph().n()) {
                return Err(Error::NoSuchVertex(v).into());
            }
            report.field("bidimensionality", bidimensionality(&x, &canonical_partition(&w)));
            Ok(Output::Report(report))
        }
    }
}

fn width(cli: &Cli, path: &Path, decomposition: bool, treedepth: bool, bramble: bool) -> Outcome<Report> {
    let mut report = Report::new("width");
    let g = read_graph(path, &mut report)?;
    let limit = cli.cap.unwrap_or(TREEWIDTH_LIMIT);
    report.field("cap", limit);
    let (tw, td) = treewidth_exact_with_limit(&g, limit)?;
    report.field("treewidth", tw);
    if treedepth {
        report.field("treedepth", treedepth_exact(&g)?);
    }
    if bramble {
        report.field("max_bramble_order", max_bramble_order(&g)?);
    }
    if decomposition {
        report.witness(td.to_td_string(g.n()));
    }
    Ok(report)
}
