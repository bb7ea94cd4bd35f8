use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use formal_rings::catalog::{self, entries, entry, make_log};
use formal_rings::fglaw::verify_group_axioms;
use formal_rings::fring::{sigma, verify_all, verify_homomorphism};
use formal_rings::json::{ghosts_from_json, group_from_json, ring_from_json, tuple_from_json, tuple_to_json, TupleJson};
use formal_rings::mvps::block_names;
use formal_rings::witt::{
    ghost_map, ghosts_p_typical, ghosts_universal, gw_add, gw_mul, gw_neg, witt_laws, witt_laws_exact, GhostFamily,
    WittLaws, WittVector,
};
use formal_rings::{Assignment, CoefficientRing, Error, FormalGroup, FormalRing, Rational, SeriesTuple};

#[derive(Parser)]
#[command(name = "formal-rings", version, about = "Exact formal group laws and formal rings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Print the laws of a ring.
    Expand {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = LawChoice::Both)]
        law: LawChoice,
        #[command(flatten)]
        out: Output,
    },
    /// Check the group and ring identities.
    Verify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Compositional inverse of a logarithm (or any tuple given with --log).
    Invert {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Witt vector arithmetic.
    Witt {
        #[command(flatten)]
        ghosts: Ghosts,
        #[arg(value_enum)]
        op: WittOp,
        /// Comma-separated components, e.g. 1,0,-3/2.
        a: String,
        b: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Solve for the Witt addition and multiplication laws.
    WittLaws {
        #[command(flatten)]
        ghosts: Ghosts,
        #[arg(long)]
        degree: Option<u32>,
        #[command(flatten)]
        out: Output,
    },
    /// The map exp_to(scale * log_from(x)) between two catalog rings.
    Iso {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value = "1")]
        scale: String,
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        #[arg(long, default_value_t = 8)]
        degree: u32,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Source {
    /// Catalog entry name.
    #[arg(long, conflicts_with = "log", required_unless_present = "log")]
    ring: Option<String>,
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// JSON file (or - for stdin) holding a logarithm, a group or a ring.
    #[arg(long)]
    log: Option<String>,
    /// Truncation degree; defaults to 8 for catalog rings and to the stored precision for files.
    #[arg(long)]
    degree: Option<u32>,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    json: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<String>,
}

#[derive(Args)]
struct Ghosts {
    /// p-typical, universal, or a JSON file.
    #[arg(long, default_value = "p-typical")]
    ghosts: String,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LawChoice {
    Phi,
    Psi,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WittOp {
    Add,
    Mul,
    Neg,
    Ghost,
}

/// What a command hands back: text for stdout and whether a check failed.
struct Outcome {
    text: String,
    failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, failed: false }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, out) = run(cli.command);
    match result {
        Ok(o) => {
            let mut text = o.text;
            if !text.ends_with('\n') {
                text.push('\n');
            }
            let written = match out.and_then(|o| o.out) {
                Some(path) => fs::write(&path, text).map_err(|e| format!("cannot write {path}: {e}")),
                None => io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if o.failed { 1 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

struct OutTarget {
    out: Option<String>,
}

fn run(cmd: Command) -> (Result<Outcome, String>, Option<OutTarget>) {
    let target = |o: &Output| Some(OutTarget { out: o.out.clone() });
    match cmd {
        Command::List { json } => (list(json), None),
        Command::Expand { source, law, out } => (expand(&source, law, out.json).map(Outcome::ok), target(&out)),
        Command::Verify { source, out } => (verify(&source, out.json), target(&out)),
        Command::Invert { source, out } => (invert(&source, out.json).map(Outcome::ok), target(&out)),
        Command::Witt { ghosts, op, a, b, out } => {
            (witt(&ghosts, op, &a, b.as_deref(), out.json).map(Outcome::ok), target(&out))
        }
        Command::WittLaws { ghosts, degree, out } => (laws(&ghosts, degree, out.json).map(Outcome::ok), target(&out)),
        Command::Iso { from, to, scale, params, degree, out } => {
            (iso(&from, &to, &scale, &params, degree, out.json), target(&out))
        }
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn parse_params(raw: &[String]) -> Result<Assignment, String> {
    let mut a = Assignment::new();
    for kv in raw {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("--param expects k=v, got `{kv}`"))?;
        let v: Rational = v.trim().parse().map_err(err)?;
        if a.insert(k.trim().to_string(), v).is_some() {
            return Err(format!("parameter `{k}` given twice"));
        }
    }
    Ok(a)
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| format!("cannot read stdin: {e}"))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))
    }
}

/// A file may hold a ring, a group law, or a bare logarithm tuple.
enum Loaded {
    Ring(FormalRing),
    Group(FormalGroup),
    Log(SeriesTuple),
}

fn load_file(path: &str) -> Result<Loaded, String> {
    let text = read_input(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| format!("json: {e}"))?;
    if v.get("phi").is_some() {
        ring_from_json(&text).map(Loaded::Ring).map_err(err)
    } else if v.get("law").is_some() {
        group_from_json(&text).map(Loaded::Group).map_err(err)
    } else {
        tuple_from_json(&text).map(Loaded::Log).map_err(err)
    }
}

fn clamp(available: u32, requested: Option<u32>) -> Result<u32, String> {
    match requested {
        Some(d) if d > available => Err(err(Error::PrecisionExceeded { requested: d, available })),
        Some(d) => Ok(d),
        None => Ok(available),
    }
}

fn load_ring(source: &Source) -> Result<Loaded, String> {
    match (&source.ring, &source.log) {
        (Some(name), None) => {
            let params = parse_params(&source.params)?;
            let log = make_log(name, &params, source.degree.unwrap_or(8)).map_err(err)?;
            FormalRing::from_log(&log).map(Loaded::Ring).map_err(err)
        }
        (None, Some(path)) => {
            if !source.params.is_empty() {
                return Err("--param applies to catalog rings only".into());
            }
            match load_file(path)? {
                Loaded::Ring(r) => {
                    let d = clamp(r.trunc_degree(), source.degree)?;
                    Ok(Loaded::Ring(r.truncate(d).map_err(err)?))
                }
                Loaded::Group(g) => {
                    let d = clamp(g.trunc_degree(), source.degree)?;
                    let g = match g.log() {
                        Some(log) => FormalGroup::from_log(&log.truncate(d).map_err(err)?),
                        None => FormalGroup::from_law(g.law().truncate(d).map_err(err)?),
                    };
                    g.map(Loaded::Group).map_err(err)
                }
                Loaded::Log(log) => {
                    let d = clamp(log.trunc_degree(), source.degree)?;
                    let log = log.truncate(d).map_err(err)?;
                    FormalRing::from_log(&log).map(Loaded::Ring).map_err(err)
                }
            }
        }
        _ => Err("give exactly one of --ring and --log".into()),
    }
}

fn list(as_json: bool) -> Result<Outcome, String> {
    if as_json {
        let v: Vec<Value> = entries()
            .iter()
            .map(|e| {
                json!({
                    "name": e.name,
                    "dim": e.dim,
                    "parameters": e.params,
                    "fixtures": catalog::fixtures(e.name).map(|f| f.len()).unwrap_or(0),
                    "description": e.description,
                })
            })
            .collect();
        return Ok(Outcome::ok(serde_json::to_string_pretty(&v).expect("serializable")));
    }
    let mut s = format!("{:<16} {:>3}  {:<12} {:>8}  {}\n", "name", "dim", "parameters", "fixtures", "description");
    for e in entries() {
        let n = catalog::fixtures(e.name).map(|f| f.len()).unwrap_or(0);
        s += &format!("{:<16} {:>3}  {:<12} {:>8}  {}\n", e.name, e.dim, e.params.join(","), n, e.description);
    }
    Ok(Outcome::ok(s))
}

fn print_tuple(s: &mut String, label: &str, t: &SeriesTuple, names: &[String]) {
    for (i, c) in t.components().iter().enumerate() {
        let idx = if t.len() == 1 { String::new() } else { format!("_{}", i + 1) };
        *s += &format!("{label}{idx} = {}\n", c.display_with(names));
    }
}

fn header(t: &SeriesTuple) -> String {
    format!("# dim {} over {}, truncated above total degree {}\n", t.len(), t.ring(), t.trunc_degree())
}

fn expand(source: &Source, law: LawChoice, as_json: bool) -> Result<String, String> {
    let ring = match load_ring(source)? {
        Loaded::Ring(r) => r,
        Loaded::Group(_) => return Err("expand needs a ring or a logarithm, not a bare group law".into()),
        Loaded::Log(_) => unreachable!("logs are loaded as rings"),
    };
    if as_json {
        // The full ring, so that the output feeds straight back into `verify --log`.
        return Ok(formal_rings::json::ring_to_json(&ring));
    }
    let dim = ring.dim();
    let two = block_names(dim, 2);
    let one = block_names(dim, 1);
    let mut s = header(ring.phi());
    if let Some(log) = ring.log() {
        print_tuple(&mut s, "log", log, &one);
    }
    if law != LawChoice::Psi {
        print_tuple(&mut s, "phi", ring.phi(), &two);
    }
    if law != LawChoice::Phi {
        print_tuple(&mut s, "psi", ring.psi(), &two);
    }
    Ok(s)
}

fn verify(source: &Source, as_json: bool) -> Result<Outcome, String> {
    let (report, summary_ok) = match load_ring(source)? {
        Loaded::Ring(r) => {
            let d = r.trunc_degree();
            (verify_all(&r, d).map_err(err)?, "4 group identities + 5 ring identities OK")
        }
        Loaded::Group(g) => {
            let d = g.trunc_degree();
            (verify_group_axioms(&g, d).map_err(err)?, "4 group identities OK")
        }
        Loaded::Log(_) => unreachable!("logs are loaded as rings"),
    };
    let failed = !report.is_ok();
    let text = if as_json {
        let failures: Vec<Value> = report
            .failed_identities()
            .iter()
            .map(|id| {
                let f = report.first_failure(id).expect("listed as failed");
                json!({
                    "identity": id,
                    "component": f.component + 1,
                    "exponents": f.exponents,
                    "lhs": f.lhs.to_string(),
                    "rhs": f.rhs.to_string(),
                    "count": report.failures.iter().filter(|x| &x.identity == id).count(),
                })
            })
            .collect();
        serde_json::to_string_pretty(&json!({
            "ok": !failed,
            "degree": report.max_degree,
            "checked": report.checked,
            "failures": failures,
        }))
        .expect("serializable")
    } else if failed {
        format!("verification FAILED at degree <= {}\n{report}", report.max_degree)
    } else {
        format!("{summary_ok} (degree <= {})", report.max_degree)
    };
    Ok(Outcome { text, failed })
}

fn invert(source: &Source, as_json: bool) -> Result<String, String> {
    let t = match (&source.ring, &source.log) {
        (Some(_), None) => match load_ring(source)? {
            Loaded::Ring(r) => r.log().expect("catalog rings carry a log").clone(),
            _ => unreachable!("catalog entries are rings"),
        },
        (None, Some(path)) => {
            let t = tuple_from_json(&read_input(path)?).map_err(err)?;
            let d = clamp(t.trunc_degree(), source.degree)?;
            t.truncate(d).map_err(err)?
        }
        _ => return Err("give exactly one of --ring and --log".into()),
    };
    let inv = t.invert().map_err(err)?;
    if as_json {
        return Ok(tuple_to_json(&inv));
    }
    let mut s = header(&inv);
    print_tuple(&mut s, "inverse", &inv, &block_names(inv.num_vars(), 1));
    Ok(s)
}

fn ghost_family(g: &Ghosts) -> Result<GhostFamily, String> {
    let n = || g.n.ok_or_else(|| "--n is required".to_string());
    match g.ghosts.as_str() {
        "p-typical" => ghosts_p_typical(g.p.ok_or("--p is required for p-typical ghosts")?, n()?).map_err(err),
        "universal" => {
            if g.p.is_some() {
                return Err("--p applies to p-typical ghosts only".into());
            }
            ghosts_universal(n()?).map_err(err)
        }
        path => {
            let fam = ghosts_from_json(&read_input(path)?).map_err(err)?;
            if g.n.is_some_and(|n| n != fam.n()) {
                return Err(format!("--n disagrees with the {} ghosts in {path}", fam.n()));
            }
            Ok(fam)
        }
    }
}

fn exact_laws(g: &GhostFamily) -> Result<WittLaws, String> {
    witt_laws_exact(g).map_err(err)
}

fn witt(g: &Ghosts, op: WittOp, a: &str, b: Option<&str>, as_json: bool) -> Result<String, String> {
    let fam = ghost_family(g)?;
    let a: WittVector = a.parse().map_err(err)?;
    let needs_b = matches!(op, WittOp::Add | WittOp::Mul);
    let b: Option<WittVector> = match (needs_b, b) {
        (true, Some(b)) => Some(b.parse().map_err(err)?),
        (true, None) => return Err("this operation takes two Witt vectors".into()),
        (false, Some(_)) => return Err("this operation takes one Witt vector".into()),
        (false, None) => None,
    };
    for v in std::iter::once(&a).chain(&b) {
        if v.len() != fam.n() {
            return Err(format!("Witt vector of length {} for n = {}", v.len(), fam.n()));
        }
    }
    let result: Vec<String> = match op {
        WittOp::Ghost => ghost_map(&fam, &a).map_err(err)?.iter().map(ToString::to_string).collect(),
        _ => {
            let laws = exact_laws(&fam)?;
            let v = match op {
                WittOp::Add => gw_add(&laws, &a, b.as_ref().expect("checked")),
                WittOp::Mul => gw_mul(&laws, &a, b.as_ref().expect("checked")),
                WittOp::Neg => gw_neg(&laws, &a),
                WittOp::Ghost => unreachable!(),
            }
            .map_err(err)?;
            v.0.iter().map(ToString::to_string).collect()
        }
    };
    Ok(if as_json {
        serde_json::to_string_pretty(&json!({ "result": result })).expect("serializable")
    } else {
        result.join(",")
    })
}

fn laws(g: &Ghosts, degree: Option<u32>, as_json: bool) -> Result<String, String> {
    let fam = ghost_family(g)?;
    let laws = if fam.has_linear_diagonal() && degree.is_none() {
        exact_laws(&fam)?
    } else {
        witt_laws(&fam, degree.unwrap_or(8)).map_err(err)?
    };
    if as_json {
        let v = json!({
            "n": laws.n,
            "kind": fam.kind().to_string(),
            "exact": laws.exact,
            "integral": laws.is_integral(),
            "add": TupleJson::from_tuple(&laws.add_laws),
            "mul": TupleJson::from_tuple(&laws.mul_laws),
        });
        return Ok(serde_json::to_string_pretty(&v).expect("serializable"));
    }
    let names = block_names(laws.n, 2);
    let mut s = format!(
        "# {} ghosts, n = {}, {}, {}\n",
        fam.kind(),
        laws.n,
        if laws.exact { "exact polynomials".to_string() } else { format!("series truncated above degree {}", laws.trunc_degree()) },
        if laws.is_integral() { "integral" } else { "not integral" }
    );
    print_tuple(&mut s, "add", &laws.add_laws, &names);
    print_tuple(&mut s, "mul", &laws.mul_laws, &names);
    Ok(s)
}

/// Parameters that catalog entry `name` declares.
fn accepts(name: &str, param: &str) -> bool {
    match name {
        "lazard" => param.strip_prefix('a').is_some_and(|k| !k.is_empty() && k.bytes().all(|b| b.is_ascii_digit())),
        _ => entry(name).map(|e| e.params.contains(&param)).unwrap_or(false),
    }
}

fn iso(from: &str, to: &str, scale: &str, raw: &[String], degree: u32, as_json: bool) -> Result<Outcome, String> {
    let params = parse_params(raw)?;
    for k in params.keys() {
        if !accepts(from, k) && !accepts(to, k) {
            return Err(err(Error::UnknownParameter(k.clone())));
        }
    }
    let pick = |name: &str| -> Assignment {
        params.iter().filter(|(k, _)| accepts(name, k)).map(|(k, v)| (k.clone(), v.clone())).collect()
    };
    let log1 = make_log(from, &pick(from), degree).map_err(err)?;
    let log2 = make_log(to, &pick(to), degree).map_err(err)?;
    // Both logs and the scale must live in one coefficient ring.
    let mut names: Vec<String> = log1.ring().params().to_vec();
    for p in log2.ring().params() {
        if !names.contains(p) {
            names.push(p.clone());
        }
    }
    let scale_ring = CoefficientRing::polynomial(&names);
    let a = scale_ring.parse(scale).map_err(err)?;
    let mut all = names.clone();
    if let formal_rings::Coefficient::Poly(p) = &a {
        for (m, _) in p.terms() {
            for (i, n) in p.params().iter().enumerate() {
                if m.get(i) > 0 && !all.contains(n) {
                    all.push(n.clone());
                }
            }
        }
    }
    let ring = CoefficientRing::polynomial(&all);
    let lift = |t: &SeriesTuple| {
        t.map(|s| s.map_coefficients(&ring, |c| c.substitute(&Assignment::new(), &ring))).map_err(err)
    };
    let (log1, log2) = (lift(&log1)?, lift(&log2)?);
    let a = a.substitute(&Assignment::new(), &ring).map_err(err)?;
    if a.is_zero() {
        return Err("--scale must be nonzero".into());
    }
    let hom = sigma(&log1, &log2, &a).map_err(err)?;
    let report = verify_homomorphism(&hom, degree).map_err(err)?;
    let failed = !report.is_ok();
    let text = if as_json {
        serde_json::to_string_pretty(&json!({
            "map": TupleJson::from_tuple(&hom.map),
            "strict": hom.is_strict(),
            "ok": !failed,
            "checked": report.checked,
        }))
        .expect("serializable")
    } else {
        let mut s = header(&hom.map);
        print_tuple(&mut s, "map", &hom.map, &block_names(hom.map.num_vars(), 1));
        if failed {
            s += &format!("homomorphism check FAILED\n{report}");
        } else {
            s += &format!("2 homomorphism identities OK (degree <= {})\n", report.max_degree);
        }
        s
    };
    Ok(Outcome { text, failed })
}
