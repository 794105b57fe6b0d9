//! `markex`: evaluate extractors on documents and decide table problems.
//!
//! Exit codes: 0 verdict true, 1 verdict false, 2 unknown (a work budget ran
//! out), 3 usage or parse error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{Read, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use markex::oracle::{oracle_eval, OracleExtractor};
use markex::reductions::{pcp_to_disjointness, sat_to_containment, CnfFormula, PcpInstance};
use markex::{
    table_contains, table_disjoint, table_empty, table_equiv, Attr, Error, Expression, Extractor,
    GammaTable, GammaTuple, Limits, ProblemAnswer,
};
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "markex", version, about = "Extractors as marker languages")]
struct Cli {
    #[command(flatten)]
    budget: Budget,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Budget {
    /// Maximum subset states built by determinization.
    #[arg(long, global = true, default_value_t = Limits::default().max_states)]
    max_states: usize,
    /// Maximum rows materialized by any enumeration.
    #[arg(long, global = true, default_value_t = Limits::default().max_rows)]
    max_rows: usize,
}

impl Budget {
    fn limits(self) -> Limits {
        Limits {
            max_states: self.max_states,
            max_rows: self.max_rows,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Rows,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Print E(w) for each document.
    Eval {
        extractor: String,
        #[arg(required = true)]
        documents: Vec<String>,
        #[arg(long, value_enum, default_value = "rows")]
        format: Format,
        /// Print at most this many rows per document.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Decide whether a tuple, given as a JSON row, is in E(w).
    Member {
        extractor: String,
        document: String,
        tuple: String,
    },
    /// Decide whether E(w) is empty.
    Empty { extractor: String, document: String },
    /// Decide whether E1(w) and E2(w) share no row.
    Disjoint {
        first: String,
        second: String,
        document: String,
    },
    /// Decide whether E1(w) ⊆ E2(w).
    Contains {
        first: String,
        second: String,
        document: String,
    },
    /// Decide whether E1(w) = E2(w).
    Equiv {
        first: String,
        second: String,
        document: String,
    },
    /// Compile an expression to an automaton.
    Compile {
        expression: String,
        #[arg(long)]
        determinize: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cross-check the engine against brute-force evaluation.
    Verify {
        extractor: String,
        #[arg(required = true)]
        documents: Vec<String>,
        /// Also check the table problems against this extractor.
        #[arg(long)]
        against: Option<String>,
    },
    /// Write the extractors and document of a hardness reduction.
    Reduce {
        #[command(subcommand)]
        kind: Reduction,
    },
}

#[derive(Subcommand)]
enum Reduction {
    /// 3-CNF in DIMACS form to regular table containment.
    Sat {
        instance: String,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Bounded PCP to context-free table disjointness.
    Pcp {
        instance: String,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Unknown(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_resource() {
            Failure::Unknown(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type Run = Result<(String, u8), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok((out, code)) => {
            print!("{out}");
            let _ = std::io::stdout().flush();
            ExitCode::from(code)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("markex: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Unknown(m)) => {
            eprintln!("markex: unknown: {m}");
            ExitCode::from(2)
        }
    }
}

const EXTENSIONS: [&str; 6] = ["aut", "cfg", "expr", "txt", "cnf", "pcp"];

/// A path that exists is read; `-` reads stdin; anything else is the text.
fn source(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    let p = Path::new(arg);
    let named_like_a_file = p
        .extension()
        .is_some_and(|x| EXTENSIONS.iter().any(|e| x == *e));
    if p.is_file() || named_like_a_file {
        std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

/// Documents are given inline, or as `@path` (one trailing newline dropped).
fn document(arg: &str) -> Result<String, Failure> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let s = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
            let s = s.strip_suffix('\n').unwrap_or(&s);
            Ok(s.strip_suffix('\r').unwrap_or(s).to_string())
        }
        None => Ok(arg.to_string()),
    }
}

fn extractor(arg: &str, limits: &Limits) -> Result<Extractor, Failure> {
    let text = source(arg)?;
    Extractor::parse(&text, limits).map_err(|e| Failure::Usage(format!("{arg}: {e}")))
}

fn run(cli: Cli) -> Run {
    let limits = cli.budget.limits();
    match cli.command {
        Command::Eval {
            extractor: e,
            documents,
            format,
            limit,
        } => eval(&extractor(&e, &limits)?, &documents, format, limit, &limits),
        Command::Member {
            extractor: e,
            document: w,
            tuple,
        } => {
            let e = extractor(&e, &limits)?;
            let w = document(&w)?;
            let t = parse_row(&tuple, w.chars().count(), &e)?;
            let ok = e.tuple_member(&w, &t)?;
            Ok((format!("{ok}\n"), verdict_code(ok)))
        }
        Command::Empty {
            extractor: e,
            document: w,
        } => {
            let e = extractor(&e, &limits)?;
            answer(table_empty(&e, &document(&w)?))
        }
        Command::Disjoint {
            first,
            second,
            document: w,
        } => {
            let (a, b) = (extractor(&first, &limits)?, extractor(&second, &limits)?);
            answer(table_disjoint(&a, &b, &document(&w)?, &limits))
        }
        Command::Contains {
            first,
            second,
            document: w,
        } => {
            let (a, b) = (extractor(&first, &limits)?, extractor(&second, &limits)?);
            answer(table_contains(&a, &b, &document(&w)?, &limits))
        }
        Command::Equiv {
            first,
            second,
            document: w,
        } => {
            let (a, b) = (extractor(&first, &limits)?, extractor(&second, &limits)?);
            answer(table_equiv(&a, &b, &document(&w)?, &limits))
        }
        Command::Compile {
            expression,
            determinize,
            output,
        } => {
            let text = source(&expression)?;
            let expr: Expression = text
                .parse()
                .map_err(|e: Error| Failure::Usage(format!("{expression}: {e}")))?;
            let mut m = expr.compile(&limits)?;
            if determinize {
                m = m.determinize(&limits)?;
            }
            emit(output.as_deref(), m.to_string())
        }
        Command::Verify {
            extractor: e,
            documents,
            against,
        } => {
            let e = extractor(&e, &limits)?;
            let other = against.map(|a| extractor(&a, &limits)).transpose()?;
            verify(&e, other.as_ref(), &documents, &limits)
        }
        Command::Reduce { kind } => reduce(kind),
    }
}

fn verdict_code(v: bool) -> u8 {
    if v {
        0
    } else {
        1
    }
}

fn eval(
    e: &Extractor,
    documents: &[String],
    format: Format,
    limit: Option<usize>,
    limits: &Limits,
) -> Run {
    let docs = documents
        .iter()
        .map(|d| document(d))
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<Result<GammaTable, Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = docs
            .iter()
            .map(|w| s.spawn(move || e.evaluate_limited(w, limit, limits)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("evaluation thread panicked"))
            .collect()
    });
    let mut out = String::new();
    for (w, r) in docs.iter().zip(results) {
        let table = r?;
        if docs.len() > 1 {
            let _ = writeln!(out, "== {w}");
        }
        match format {
            Format::Rows => {
                let _ = writeln!(out, "{}", rows_json(&table));
            }
            Format::Csv => out.push_str(&csv_table(&table)?),
        }
    }
    Ok((out, 0))
}

fn row_value(t: &GammaTuple) -> Value {
    let m: Map<String, Value> = t
        .entries()
        .iter()
        .map(|(a, s)| (a.to_string(), json!(s)))
        .collect();
    Value::Object(m)
}

fn rows_json(t: &GammaTable) -> String {
    Value::Array(t.rows().map(row_value).collect()).to_string()
}

fn csv_table(t: &GammaTable) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = t.gamma().iter().map(Attr::as_str).collect();
    let io = |e: csv::Error| Failure::Usage(e.to_string());
    w.write_record(&header).map_err(io)?;
    for r in t.rows() {
        let cells: Vec<String> = t
            .gamma()
            .iter()
            .map(|a| {
                let set = r.get(a.as_str()).cloned().unwrap_or_default();
                let inner: Vec<String> = set.iter().map(usize::to_string).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        w.write_record(&cells).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// A JSON row such as `{"x":[2,8]}`; attributes left out are empty.
fn parse_row(text: &str, len: usize, e: &Extractor) -> Result<GammaTuple, Failure> {
    let bad = |m: String| Failure::Usage(format!("tuple: {m}"));
    let parsed: BTreeMap<String, BTreeSet<usize>> =
        serde_json::from_str(text).map_err(|err| bad(err.to_string()))?;
    let mut entries: BTreeMap<Attr, BTreeSet<usize>> = e
        .alphabets()
        .gamma
        .iter()
        .map(|a| (a.clone(), BTreeSet::new()))
        .collect();
    for (k, v) in parsed {
        let a = Attr::new(&k);
        if !entries.contains_key(&a) {
            return Err(bad(format!("attribute '{k}' is not in the extractor's Γ")));
        }
        entries.insert(a, v);
    }
    GammaTuple::new(len, entries).map_err(|err| bad(err.to_string()))
}

fn answer_json(a: &ProblemAnswer) -> Value {
    let mut m = Map::new();
    m.insert("problem".into(), json!(a.problem.name()));
    m.insert("verdict".into(), json!(a.verdict));
    if let Some(w) = &a.witness {
        m.insert("witness".into(), json!(w.to_string()));
        if let Some(t) = a.witness_tuple() {
            m.insert("witness_row".into(), row_value(&t));
        }
    }
    m.insert(
        "cost".into(),
        json!({"nodes": a.cost.nodes, "arcs": a.cost.arcs, "steps": a.cost.steps}),
    );
    Value::Object(m)
}

fn answer(r: markex::Result<ProblemAnswer>) -> Run {
    match r {
        Ok(a) => Ok((format!("{}\n", answer_json(&a)), verdict_code(a.verdict))),
        Err(e) if e.is_resource() => Ok((
            format!(
                "{}\n",
                json!({"verdict": "unknown", "reason": e.to_string()})
            ),
            2,
        )),
        Err(e) => Err(e.into()),
    }
}

fn verify(e: &Extractor, other: Option<&Extractor>, documents: &[String], limits: &Limits) -> Run {
    let mut out = String::new();
    let mut code = 0u8;
    let mut report = |ok: bool, what: &str, w: &str| {
        let _ = writeln!(
            out,
            "{} {what} {w:?}",
            if ok { "agree" } else { "DISAGREE" }
        );
        if !ok {
            code = 1;
        }
    };
    for d in documents {
        let w = document(d)?;
        let t1 = oracle_eval(&OracleExtractor::from(e), &w)?;
        report(e.evaluate(&w, limits)? == t1, "eval", &w);
        report(table_empty(e, &w)?.verdict == t1.is_empty(), "empty", &w);
        let Some(o) = other else { continue };
        let g = e
            .alphabets()
            .gamma
            .union(&o.alphabets().gamma)
            .cloned()
            .collect();
        let t1 = t1.pad(&g)?;
        let t2 = oracle_eval(&OracleExtractor::from(o), &w)?.pad(&g)?;
        let disjoint = t1.rows().all(|r| !t2.contains(r));
        let contained = t1.rows().all(|r| t2.contains(r));
        report(
            table_disjoint(e, o, &w, limits)?.verdict == disjoint,
            "disjoint",
            &w,
        );
        report(
            table_contains(e, o, &w, limits)?.verdict == contained,
            "contains",
            &w,
        );
        report(
            table_equiv(e, o, &w, limits)?.verdict == (t1 == t2),
            "equiv",
            &w,
        );
    }
    Ok((out, code))
}

fn emit(path: Option<&Path>, text: String) -> Run {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            Ok((String::new(), 0))
        }
        None => Ok((text, 0)),
    }
}

/// Writes each file under `dir`, or prints them as `==> name <==` sections.
fn emit_files(dir: Option<&Path>, files: &[(&str, String)]) -> Run {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d)
                .map_err(|e| Failure::Usage(format!("{}: {e}", d.display())))?;
            for (name, text) in files {
                emit(Some(&d.join(name)), text.clone())?;
            }
            Ok((String::new(), 0))
        }
        None => {
            let mut out = String::new();
            for (name, text) in files {
                let _ = write!(out, "==> {name} <==\n{text}");
                if !text.ends_with('\n') {
                    out.push('\n');
                }
            }
            Ok((out, 0))
        }
    }
}

fn reduce(kind: Reduction) -> Run {
    let parse_err = |arg: &str, e: Error| Failure::Usage(format!("{arg}: {e}"));
    match kind {
        Reduction::Sat { instance, out_dir } => {
            let f: CnfFormula = source(&instance)?
                .parse()
                .map_err(|e| parse_err(&instance, e))?;
            let r = sat_to_containment(&f);
            emit_files(
                out_dir.as_deref(),
                &[
                    ("m1.aut", r.m1.to_string()),
                    ("m2.aut", r.m2.to_string()),
                    ("document.txt", format!("{}\n", r.document)),
                ],
            )
        }
        Reduction::Pcp { instance, out_dir } => {
            let p: PcpInstance = source(&instance)?
                .parse()
                .map_err(|e| parse_err(&instance, e))?;
            let r = pcp_to_disjointness(&p);
            emit_files(
                out_dir.as_deref(),
                &[
                    ("g1.cfg", r.g1.to_string()),
                    ("g2.cfg", r.g2.to_string()),
                    ("document.txt", format!("{}\n", r.document)),
                ],
            )
        }
    }
}
