use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use cleaved::algebra::{half, Algebra, Bigrading};
use cleaved::checks;
use cleaved::deltagen::Complex;
use cleaved::tangle::Tangle;
use cleaved::typed::TypeD;

#[derive(Parser)]
#[command(name = "cleaved", version, about = "Type D structures of tangles over cleaved-link algebras")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for the parallel checks.
    #[arg(long, global = true, value_name = "K", default_value_t = 1)]
    threads: usize,

    /// Refuse to decide products longer than two edges.
    #[arg(long, global = true)]
    max_len_guard: bool,

    /// Verify the witnesses of every cancellation.
    #[arg(long, global = true)]
    certify: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vertex and edge census of the quiver on 2n points.
    Algebra {
        n: usize,
        /// List every vertex and edge.
        #[arg(long)]
        edges: bool,
    },
    /// Check homogeneity, ι-decrease, d² = 0 and Leibniz on every relation row.
    VerifyAlgebra { n: usize },
    /// Print the structure map of a tangle.
    Delta { file: PathBuf },
    /// Check the type D identity for a tangle.
    Verify { file: PathBuf },
    /// Cancel unit entries and print the reduced structure.
    Reduce { file: PathBuf },
    /// Compare reduced graded counts of two tangles or serialized structures.
    Compare { first: PathBuf, second: PathBuf },
    /// Run the built-in fixture suite.
    Selftest,
}

/// What a command reports: text or JSON, and whether its checks passed.
struct Report {
    text: String,
    json: Value,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads.max(1)).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(r) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&r.json).expect("json"));
            } else {
                print!("{}", r.text);
            }
            if r.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    match &cli.command {
        Command::Algebra { n, edges } => algebra_census(&*algebra(cli, *n)?, *edges),
        Command::VerifyAlgebra { n } => verify_algebra(&*algebra(cli, *n)?),
        Command::Delta { file } => {
            let d = structure(cli, file)?;
            Ok(Report { text: d.serialize(), json: structure_json(&d), ok: true })
        }
        Command::Verify { file } => verify(&structure(cli, file)?),
        Command::Reduce { file } => reduce(cli, &structure(cli, file)?),
        Command::Compare { first, second } => compare(cli, first, second),
        Command::Selftest => Ok(selftest()),
    }
}

fn algebra(cli: &Cli, n: usize) -> anyhow::Result<Arc<Algebra>> {
    if cli.max_len_guard {
        Ok(Arc::new(Algebra::new(n)?.with_length_guard(2)))
    } else {
        Ok(cleaved::typed::algebra(n)?)
    }
}

fn read(file: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))
}

/// The structure of a tangle file, or a serialized structure as is.
fn structure(cli: &Cli, file: &Path) -> anyhow::Result<TypeD> {
    let text = read(file)?;
    let serialized = text.lines().map(str::trim).any(|l| l.starts_with("gen ") || l.starts_with("delta "));
    if serialized {
        let d = TypeD::parse(&text).with_context(|| format!("{}", file.display()))?;
        if cli.max_len_guard {
            let alg = algebra(cli, d.alg.n())?;
            return Ok(d.rebase(alg));
        }
        return Ok(d);
    }
    let t = Tangle::parse(&text).with_context(|| format!("{}", file.display()))?;
    let c = Complex::build_with(&t, algebra(cli, t.n())?).with_context(|| format!("{}", file.display()))?;
    Ok(c.structure)
}

fn grading_json(g: Bigrading) -> Value {
    json!({ "h": g.h, "q": half(g.q2) })
}

fn structure_json(d: &TypeD) -> Value {
    let q = &d.alg.quiver;
    let gens: Vec<Value> = d
        .gens
        .iter()
        .enumerate()
        .map(|(i, g)| json!({ "id": i, "vertex": q.vertex_label(g.idem), "grading": grading_json(g.grading), "label": g.label }))
        .collect();
    let delta: Vec<Value> = d
        .entries()
        .map(|(i, j, x)| {
            let terms: Vec<Value> =
                x.terms.iter().map(|(p, c)| json!({ "coeff": c, "path": q.path_label(x.source, p) })).collect();
            json!({ "source": i, "target": j, "terms": terms })
        })
        .collect();
    json!({ "generators": gens, "delta": delta })
}

fn algebra_census(alg: &Algebra, list: bool) -> anyhow::Result<Report> {
    let q = &alg.quiver;
    let dec = q.edges.iter().filter(|e| e.is_dec()).count();
    let rows = alg.all_rows().count();
    let mut text = format!(
        "n {}\nmatchings {}\nvertices {}\nedges {} ({} sign changes, {} bridges)\nrelation rows {}\n",
        q.n,
        q.matchings.len(),
        q.vertices.len(),
        q.edges.len(),
        dec,
        q.edges.len() - dec,
        rows
    );
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    if list {
        for v in 0..q.vertices.len() {
            text += &format!("vertex {v} {} iota {}\n", q.vertex_label(v), half(2 * q.iota(v)));
            vertices.push(json!({ "id": v, "label": q.vertex_label(v) }));
        }
        for (e, edge) in q.edges.iter().enumerate() {
            let (s, t) = (q.vertex_label(edge.source), q.vertex_label(edge.target));
            text += &format!("edge {e} {} : {s} -> {t} {}\n", q.edge_label(e), edge.grading());
            edges.push(json!({ "id": e, "label": q.edge_label(e), "source": s, "target": t, "grading": grading_json(edge.grading()) }));
        }
    }
    let mut json = json!({
        "n": q.n,
        "matchings": q.matchings.len(),
        "vertices": q.vertices.len(),
        "edges": q.edges.len(),
        "sign_change_edges": dec,
        "bridge_edges": q.edges.len() - dec,
        "relation_rows": rows,
    });
    if list {
        json["vertex_list"] = Value::from(vertices);
        json["edge_list"] = Value::from(edges);
    }
    Ok(Report { text, json, ok: true })
}

fn verify_algebra(alg: &Algebra) -> anyhow::Result<Report> {
    let (pairs, rows, bad) = checks::algebra_suite(alg)?;
    let mut text = format!("n {}\nvertex pairs {pairs}\nrelation rows {rows}\nviolations {}\n", alg.n(), bad.len());
    for v in &bad {
        text += &format!("violation {v}\n");
    }
    let json = json!({ "n": alg.n(), "pairs": pairs, "rows": rows, "violations": bad });
    Ok(Report { text, json, ok: bad.is_empty() })
}

fn verify(d: &TypeD) -> anyhow::Result<Report> {
    let bad = d.verify()?;
    let mut text = format!("generators {}\nentries {}\nfailing pairs {}\n", d.dim(), d.entry_count(), bad.len());
    for (i, k) in &bad {
        let c = d.identity_coefficient(*i, *k);
        text += &format!("fail {i} -> {k}: {}\n", c.display(&d.alg.quiver));
    }
    let json = json!({ "generators": d.dim(), "entries": d.entry_count(), "failing_pairs": bad });
    Ok(Report { text, json, ok: bad.is_empty() })
}

fn reduce(cli: &Cli, d: &TypeD) -> anyhow::Result<Report> {
    let red = d.reduce(cli.certify)?;
    let mut text = String::new();
    let mut certs = Vec::new();
    let mut ok = true;
    if cli.certify {
        for (k, step) in red.steps.iter().enumerate() {
            let (Some(c), Some(before)) = (&step.cancellation, &step.before) else {
                return Err(anyhow!("cancellation steps were not recorded"));
            };
            let cert = c.certify(before)?;
            ok &= cert.ok();
            text += &format!(
                "step {k} cancel {} {}: {}\n",
                step.cancelled.0,
                step.cancelled.1,
                if cert.ok() { "certified" } else { "FAILED" }
            );
            certs.push(json!({ "step": k, "cancelled": [step.cancelled.0, step.cancelled.1], "certificate": cert }));
        }
    }
    text += &format!("# {} generators, {} after {} cancellations\n", d.dim(), red.reduced.dim(), red.steps.len());
    text += &red.reduced.serialize();
    let mut json = structure_json(&red.reduced);
    json["cancellations"] = Value::from(red.steps.len());
    json["origin"] = Value::from(red.origin.clone());
    if cli.certify {
        json["certificates"] = Value::from(certs);
    }
    Ok(Report { text, json, ok })
}

/// Entry count per gcd of coefficients, for gcd above 1.
fn divisibility(d: &TypeD) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for (_, _, x) in d.entries() {
        let g = x.terms.values().fold(0i64, |a, &b| gcd(a, b.abs()));
        if g > 1 {
            *out.entry(g).or_insert(0) += 1;
        }
    }
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn compare(cli: &Cli, first: &Path, second: &Path) -> anyhow::Result<Report> {
    let a = structure(cli, first)?.reduce(false)?.reduced;
    let b = structure(cli, second)?.reduce(false)?.reduced;
    let n = a.alg.n();
    if b.alg.n() != n {
        return Err(anyhow!("boundaries differ: {} and {} points", 2 * n, 2 * b.alg.n()));
    }
    let q = &a.alg.quiver;
    let (ca, cb) = (a.graded_counts(), b.graded_counts());
    let keys: BTreeSet<_> = ca.keys().chain(cb.keys()).copied().collect();
    let mut text = String::new();
    let mut diff = Vec::new();
    for k in keys {
        let (x, y) = (ca.get(&k).copied().unwrap_or(0), cb.get(&k).copied().unwrap_or(0));
        if x != y {
            let (v, h, q2) = k;
            text += &format!("{} {} {x} {y}\n", q.vertex_label(v), Bigrading::new(h, q2));
            diff.push(json!({ "vertex": q.vertex_label(v), "grading": grading_json(Bigrading::new(h, q2)), "first": x, "second": y }));
        }
    }
    let (fa, fb) = (divisibility(&a), divisibility(&b));
    if fa != fb {
        text += &format!("divisibility {fa:?} {fb:?}\n");
    }
    text += &format!(
        "# {} and {} reduced generators, {} graded count differences\n",
        a.dim(),
        b.dim(),
        diff.len()
    );
    let ok = diff.is_empty() && fa == fb;
    let json = json!({
        "generators": [a.dim(), b.dim()],
        "differences": diff,
        "divisibility": [format!("{fa:?}"), format!("{fb:?}")],
        "equal": ok,
    });
    Ok(Report { text, json, ok })
}

fn selftest() -> Report {
    let seed = checks::seed();
    let results = checks::all(seed);
    let mut text = format!("selftest (seed {seed})\n");
    for c in &results {
        text += &c.line();
        text.push('\n');
    }
    let ok = results.iter().all(|c| !c.blocking());
    let passed = results.iter().filter(|c| c.passed()).count();
    text += &format!("{passed}/{} criteria pass\n", results.len());
    Report { json: json!({ "seed": seed, "checks": results, "ok": ok }), text, ok }
}
