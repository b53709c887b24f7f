//! `nicequad`: sample labeled trees and quadrangulations, check the
//! bijection, and run the scaling statistics.

mod manifest;

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use nicequad::experiments::{ladder_exponent, par_streams, sample_trees, scaling_ladder, two_point_samples};
use nicequad::schaeffer::{check_distance_bound, phi, verify_distance_property};
use nicequad::snake::{d_star_grid, reroot, sample_snake, SnakePath};
use nicequad::stats::{ks_statistic, StatReport};
use nicequad::tree::{decode, TreeJson};
use nicequad::{enumerate, ContourCoding, LabeledTree, Model, TreePredicate};

use manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(name = "nicequad", version, about = "Random nice quadrangulations via labeled trees")]
struct Cli {
    /// Base seed; sample i uses stream i.
    #[arg(long, env = "SEED", default_value_t = 0, global = true)]
    seed: u64,

    /// Worker threads for sampler streams.
    #[arg(long, default_value_t = 1, global = true)]
    threads: usize,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Nice,
    Plain,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Nice => Model::Nice,
            ModelArg::Plain => Model::Plain,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum PredicateArg {
    All,
    Wplus,
    Wcirc,
    H,
    Nice,
}

impl From<PredicateArg> for TreePredicate {
    fn from(p: PredicateArg) -> Self {
        match p {
            PredicateArg::All => TreePredicate::All,
            PredicateArg::Wplus => TreePredicate::WPlus,
            PredicateArg::Wcirc => TreePredicate::WCirc,
            PredicateArg::H => TreePredicate::H,
            PredicateArg::Nice => TreePredicate::Nice,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample labeled trees uniformly from the model's tree class.
    SampleTree {
        #[arg(long, value_enum, default_value_t = ModelArg::Nice)]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Sample quadrangulations as edge lists.
    SampleQuad {
        #[arg(long, value_enum, default_value_t = ModelArg::Nice)]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// List every labeled tree with n edges satisfying a predicate.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = PredicateArg::All)]
        predicate: PredicateArg,
    },
    /// Check the bijection invariants, exhaustively or on samples.
    Verify {
        #[arg(long)]
        n: usize,
        /// Check every tree with nonnegative labels instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, value_enum, default_value_t = ModelArg::Nice)]
        model: ModelArg,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Mean distance from the root vertex across a ladder of sizes.
    StatsScaling {
        #[arg(long, value_enum, default_value_t = ModelArg::Nice)]
        model: ModelArg,
        #[arg(long, value_delimiter = ',', default_values_t = [250, 500, 1000, 2000, 4000])]
        ladder: Vec<usize>,
        #[arg(long, default_value_t = 500)]
        count: usize,
    },
    /// KS distance between one-point and two-point distance samples.
    StatsTwoPoint {
        #[arg(long, value_enum, default_value_t = ModelArg::Nice)]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        count: usize,
    },
    /// Sample discrete snake paths, optionally re-rooted, with D°/D* grids.
    SnakeSample {
        /// Grid resolution (even).
        #[arg(long, default_value_t = 1024)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        rerooted: bool,
        /// Number of equally spaced grid intervals for the distance matrices.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Tree JSON to contour and label functions.
    Encode {
        /// Input file; standard input when absent.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Contour and label CSV to tree JSON.
    Decode {
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(clap::error::ErrorKind::ValueValidation, msg).exit()
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    let mut text = String::new();
    match path {
        Some(p) => {
            File::open(p)
                .with_context(|| format!("opening {}", p.display()))?
                .read_to_string(&mut text)?;
        }
        None => {
            io::stdin().read_to_string(&mut text)?;
        }
    }
    Ok(text)
}

struct Output {
    out: Box<dyn Write>,
    manifest: RunManifest,
    format: Format,
}

impl Output {
    /// Writes a JSON document `{ "manifest": ..., <body> }`.
    fn json(&mut self, body: serde_json::Value) -> Result<()> {
        let mut doc = serde_json::Map::new();
        doc.insert("manifest".into(), serde_json::to_value(&self.manifest)?);
        if let serde_json::Value::Object(fields) = body {
            doc.extend(fields);
        }
        serde_json::to_writer_pretty(&mut self.out, &doc)?;
        writeln!(self.out)?;
        Ok(())
    }

    /// Writes the manifest as a `#` comment line ahead of CSV data.
    fn csv_header(&mut self) -> Result<()> {
        writeln!(self.out, "# {}", serde_json::to_string(&self.manifest)?)?;
        Ok(())
    }

    fn csv_rows<R: Serialize>(&mut self, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<()> {
        self.csv_header()?;
        let mut w = csv::Writer::from_writer(&mut self.out);
        w.write_record(header)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn require_model_size(model: ModelArg, n: usize) {
    match model {
        ModelArg::Nice if n < 2 => usage_error("model nice needs --n >= 2"),
        ModelArg::Plain if n < 1 => usage_error("model plain needs --n >= 1"),
        _ => {}
    }
}

fn contour_rows(sample: usize, lt: &LabeledTree) -> Vec<(usize, usize, usize, i32)> {
    let c = lt.encode();
    c.contour()
        .iter()
        .zip(c.labels())
        .enumerate()
        .map(|(i, (&h, &v))| (sample, i, h, v))
        .collect()
}

fn write_trees(o: &mut Output, trees: &[LabeledTree]) -> Result<()> {
    match o.format {
        Format::Json => {
            let trees: Vec<TreeJson> = trees.iter().map(LabeledTree::to_json).collect();
            o.json(json!({ "count": trees.len(), "trees": trees }))
        }
        Format::Csv => {
            let rows: Vec<_> = trees.iter().enumerate().flat_map(|(s, t)| contour_rows(s, t)).collect();
            o.csv_rows(&["sample", "i", "contour", "label"], rows)
        }
    }
}

/// Outcome of the invariant suite on one tree: the first failing check.
fn check_tree(lt: &LabeledTree) -> Option<&'static str> {
    let n = lt.size();
    let q = match phi(lt) {
        Ok(q) => q,
        Err(_) => return Some("bijection validity"),
    };
    let m = q.map();
    let valid = q.face_count() == n
        && m.faces().iter().all(|&d| d == 4)
        && m.edge_count() == 2 * n
        && m.vertex_count() == n + 2
        && m.genus().ok() == Some(0);
    if !valid {
        return Some("bijection validity");
    }
    if !verify_distance_property(lt, &q) {
        return Some("distance property");
    }
    let class = lt.classify();
    if (q.min_degree() >= 2) != class.nice_eq || class.nice_prop1 != class.nice_eq {
        return Some("niceness equivalence");
    }
    if check_distance_bound(lt, &q).is_some() {
        return Some("distance bound");
    }
    None
}

fn run(cli: Cli) -> Result<ExitCode> {
    let (name, n, count, model) = match &cli.command {
        Command::SampleTree { model, n, count } | Command::SampleQuad { model, n, count } => {
            (cli.command.name(), Some(*n), Some(*count), Some(Model::from(*model)))
        }
        Command::Enumerate { n, .. } => (cli.command.name(), Some(*n), None, None),
        Command::Verify { n, exhaustive, model, count } => (
            cli.command.name(),
            Some(*n),
            (!exhaustive).then_some(*count),
            (!exhaustive).then_some(Model::from(*model)),
        ),
        Command::StatsScaling { model, count, .. } => (cli.command.name(), None, Some(*count), Some(Model::from(*model))),
        Command::StatsTwoPoint { model, n, count } => {
            (cli.command.name(), Some(*n), Some(*count), Some(Model::from(*model)))
        }
        Command::SnakeSample { m, count, .. } => (cli.command.name(), Some(*m), Some(*count), None),
        Command::Encode { .. } | Command::Decode { .. } => (cli.command.name(), None, None, None),
    };
    let manifest = RunManifest {
        command: name.to_string(),
        n,
        count,
        seed: cli.seed,
        model: model.map(|m| m.name().to_string()),
        format: match cli.format {
            Format::Json => "json".into(),
            Format::Csv => "csv".into(),
        },
        threads: cli.threads,
        output: cli.output.as_ref().map(|p| p.display().to_string()),
    };
    let out: Box<dyn Write> = match &cli.output {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut o = Output {
        out,
        manifest,
        format: cli.format,
    };
    let seed = cli.seed;

    let code = match cli.command {
        Command::SampleTree { model, n, count } => {
            require_model_size(model, n);
            let trees = sample_trees(model.into(), n, count, seed)?;
            write_trees(&mut o, &trees)?;
            ExitCode::SUCCESS
        }
        Command::SampleQuad { model, n, count } => {
            require_model_size(model, n);
            let trees = sample_trees(model.into(), n, count, seed)?;
            let maps = trees.iter().map(phi).collect::<nicequad::Result<Vec<_>>>()?;
            match o.format {
                Format::Json => {
                    let maps: Vec<_> = maps
                        .iter()
                        .map(|q| json!({ "header": q.header(), "edges": q.map().edge_list() }))
                        .collect();
                    o.json(json!({ "count": maps.len(), "maps": maps }))?;
                }
                Format::Csv => {
                    let rows: Vec<_> = maps
                        .iter()
                        .enumerate()
                        .flat_map(|(s, q)| q.map().edge_list().into_iter().map(move |(a, b)| (s, a, b)))
                        .collect();
                    o.csv_rows(&["sample", "vertex_a", "vertex_b"], rows)?;
                }
            }
            ExitCode::SUCCESS
        }
        Command::Enumerate { n, predicate } => {
            let pred = TreePredicate::from(predicate);
            let trees = match enumerate(n, |t| pred.holds(t)) {
                Ok(t) => t,
                Err(e) => usage_error(e),
            };
            write_trees(&mut o, &trees)?;
            ExitCode::SUCCESS
        }
        Command::Verify {
            n,
            exhaustive,
            model,
            count,
        } => {
            let trees = if exhaustive {
                if n < 1 {
                    usage_error("verify needs --n >= 1");
                }
                match enumerate(n, |t| TreePredicate::WPlus.holds(t)) {
                    Ok(t) => t,
                    Err(e) => usage_error(e),
                }
            } else {
                require_model_size(model, n);
                sample_trees(model.into(), n, count, seed)?
            };
            let failure = trees.iter().find_map(|t| check_tree(t).map(|check| (check, t)));
            match failure {
                None => {
                    o.json(json!({ "checked": trees.len(), "failures": 0 }))?;
                    ExitCode::SUCCESS
                }
                Some((check, t)) => {
                    o.json(json!({
                        "checked": trees.len(),
                        "failed_check": check,
                        "counterexample": t.to_json(),
                    }))?;
                    ExitCode::from(1)
                }
            }
        }
        Command::StatsScaling { model, ladder, count } => {
            if ladder.len() < 2 {
                usage_error("--ladder needs at least two sizes");
            }
            for &n in &ladder {
                require_model_size(model, n);
            }
            let points = scaling_ladder(model.into(), &ladder, count, seed)?;
            let exponent = ladder_exponent(&points)?;
            match o.format {
                Format::Json => o.json(json!({ "points": points, "exponent": exponent }))?,
                Format::Csv => {
                    let rows: Vec<_> = points.iter().map(|p| (p.n, p.samples, p.mean, p.std_err)).collect();
                    o.csv_rows(&["n", "samples", "mean", "std_err"], rows)?;
                }
            }
            ExitCode::SUCCESS
        }
        Command::StatsTwoPoint { model, n, count } => {
            require_model_size(model, n);
            let s = two_point_samples(model.into(), n, count, seed)?;
            let report = StatReport {
                statistic: "ks_one_point_vs_two_point".into(),
                value: ks_statistic(&s.one_point, &s.two_point)?,
                n,
                samples: count,
                seed,
            };
            match o.format {
                Format::Json => o.json(serde_json::to_value(report)?)?,
                Format::Csv => {
                    let rows: Vec<_> = s
                        .one_point
                        .iter()
                        .zip(&s.two_point)
                        .enumerate()
                        .map(|(i, (a, b))| (i, a, b))
                        .collect();
                    o.csv_rows(&["sample", "one_point", "two_point"], rows)?;
                }
            }
            ExitCode::SUCCESS
        }
        Command::SnakeSample {
            m,
            count,
            rerooted,
            grid,
        } => {
            if m < 2 || m % 2 != 0 {
                usage_error("--m must be even and at least 2");
            }
            if let Some(g) = grid {
                if g == 0 || g > m {
                    usage_error("--grid must lie in 1..=m");
                }
                if !rerooted {
                    usage_error("--grid needs --rerooted");
                }
            }
            let paths: Vec<SnakePath<f64>> = par_streams(seed, count, |_, rng| {
                let p = sample_snake(m, rng)?;
                Ok(if rerooted { reroot(&p) } else { p })
            })?;
            let grid_indices: Option<Vec<usize>> = grid.map(|g| (0..=g).map(|k| k * m / g).collect());
            match o.format {
                Format::Json => {
                    let mut docs = Vec::new();
                    for p in &paths {
                        let mut doc = json!({ "e": p.excursion(), "z": p.label() });
                        if let Some(idx) = &grid_indices {
                            let d = d_star_grid(p, idx)?;
                            doc["grid"] = json!({ "times": d.times, "d_circ": d.d_circ, "d_star": d.d_star });
                        }
                        docs.push(doc);
                    }
                    o.json(json!({ "m": m, "paths": docs }))?;
                }
                Format::Csv => {
                    let rows: Vec<_> = paths
                        .iter()
                        .enumerate()
                        .flat_map(|(s, p)| {
                            (0..=m).map(move |i| (s, i as f64 / m as f64, p.excursion()[i], p.label()[i]))
                        })
                        .collect();
                    o.csv_rows(&["sample", "t", "e", "z"], rows)?;
                }
            }
            ExitCode::SUCCESS
        }
        Command::Encode { input } => {
            let doc: serde_json::Value = serde_json::from_str(&read_input(&input)?).context("parsing tree JSON")?;
            // Accept a bare tree or the output of `sample-tree`, `enumerate` and `decode`.
            let tree = match (doc.get("trees"), doc.get("tree")) {
                (Some(serde_json::Value::Array(ts)), _) if !ts.is_empty() => ts[0].clone(),
                (_, Some(t)) => t.clone(),
                _ => doc,
            };
            let json: TreeJson = serde_json::from_value(tree).context("parsing tree JSON")?;
            let lt = LabeledTree::from_json(&json)?;
            let c = lt.encode();
            match o.format {
                Format::Json => o.json(json!({ "contour": c.contour(), "labels": c.labels() }))?,
                Format::Csv => {
                    let rows: Vec<_> = c
                        .contour()
                        .iter()
                        .zip(c.labels())
                        .enumerate()
                        .map(|(i, (h, v))| (i, *h, *v))
                        .collect();
                    o.csv_rows(&["i", "contour", "label"], rows)?;
                }
            }
            ExitCode::SUCCESS
        }
        Command::Decode { input } => {
            let text = read_input(&input)?;
            let coding = ContourCoding::read_csv(text.as_bytes())?;
            let lt = decode(&coding)?;
            match o.format {
                Format::Json => o.json(json!({ "tree": lt.to_json() }))?,
                Format::Csv => o.csv_rows(&["sample", "i", "contour", "label"], contour_rows(0, &lt))?,
            }
            ExitCode::SUCCESS
        }
    };
    o.out.flush()?;
    Ok(code)
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SampleTree { .. } => "sample-tree",
            Command::SampleQuad { .. } => "sample-quad",
            Command::Enumerate { .. } => "enumerate",
            Command::Verify { .. } => "verify",
            Command::StatsScaling { .. } => "stats-scaling",
            Command::StatsTwoPoint { .. } => "stats-two-point",
            Command::SnakeSample { .. } => "snake-sample",
            Command::Encode { .. } => "encode",
            Command::Decode { .. } => "decode",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == 0 {
        usage_error("--threads must be at least 1");
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
