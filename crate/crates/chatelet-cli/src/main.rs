//! `chatelet`: exact local-global analysis of Chatelet surfaces from the command line.
//!
//! Exit codes: 0 success, 1 a check failed, 2 input error, 3 unsupported
//! request, 4 partial result, 5 internal cap exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use chatelet::chatelet::{
    analyze_over_extension, global_analysis, search_rational_point, AnalysisOptions, SurfaceAnalysis,
};
use chatelet::construct::{construct, verify_trace, Recipe};
use chatelet::fibration::{builtin_bundles, check_bundle, BundleSpec};
use chatelet::hilbert::{hilbert_symbol, Place};
use chatelet::numfield::NumberField;
use chatelet::ratpoly::{fmt_rational, parse_rational};
use chatelet::Error;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use chatelet_cli::input::{read_json, BundleFile, SurfaceFile};
use chatelet_cli::manifest;
use chatelet_cli::report::{self, Report};

#[derive(Parser)]
#[command(name = "chatelet", version, about = "Exact local-global analysis of Chatelet surfaces y^2 - a z^2 = P(x)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hilbert symbol (a, b)_p over Q; prints +1 or -1.
    Hilbert {
        #[arg(short, allow_hyphen_values = true)]
        a: String,
        #[arg(short, allow_hyphen_values = true)]
        b: String,
        /// A prime or `inf`.
        #[arg(short)]
        p: String,
        #[arg(long)]
        json: bool,
    },
    /// Local solvability, invariant sets and verdict for a surface file.
    Analyze {
        file: PathBuf,
        /// Also analyze over the field defined by these coefficients, lowest degree first.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        extension: Option<Vec<i64>>,
        #[arg(long)]
        json: bool,
        /// Unit digits used when embedding coefficients locally.
        #[arg(long, default_value_t = AnalysisOptions::default().precision)]
        precision: u32,
        /// Height bound for the rational point search over Q.
        #[arg(long, default_value_t = 12)]
        point_height: i64,
        /// Record wall-clock time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Build a V1, V2 or V3 surface for a field and a place set.
    Construct {
        #[arg(long)]
        recipe: Recipe,
        /// Defining polynomial of the field, lowest degree first.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        field: Vec<i64>,
        /// Comma-separated places, e.g. `inf,23`; empty for no places.
        #[arg(long, default_value = "")]
        places: String,
        /// Write surface.json and trace.json here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Smallest primes above a bound that split completely in a field.
    SplitPrimes {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        field: Vec<i64>,
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        lower: u64,
        #[arg(long, value_delimiter = ',')]
        avoid: Vec<u64>,
    },
    /// Checks a pencil of quartics: resultant, branch loci, curve points.
    FibrationCheck {
        /// A builtin id (see `--list`) or a JSON file.
        target: Option<String>,
        #[arg(long)]
        list: bool,
        #[arg(long)]
        json: bool,
    },
    /// Runs the bundled worked examples.
    #[command(name = "verify-examples", visible_alias = "verify-paper")]
    VerifyExamples {
        /// An example id, or `all`.
        #[arg(default_value = "all")]
        id: String,
        #[arg(long)]
        list: bool,
        #[arg(long)]
        json: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::Degenerate(_) | Error::MissingFactorization => 2,
        Error::Unsupported(_) | Error::Unsatisfiable(_) => 3,
        Error::UnsupportedPlace(_) => 4,
        Error::InsufficientPrecision { .. }
        | Error::PrecisionCapExceeded(_)
        | Error::EffortExhausted(_)
        | Error::SearchExhausted(_) => 5,
        Error::CriterionFailed => 1,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(&e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Hilbert { a, b, p, json } => return hilbert(&a, &b, &p, json),
        Command::Analyze { file, extension, json, precision, point_height, timing } => {
            analyze(&file, extension, json, precision, point_height, timing)
        }
        Command::Construct { recipe, field, places, out_dir, json } => {
            run_construct(recipe, &field, &places, out_dir.as_deref(), json)
        }
        Command::SplitPrimes { field, count, lower, avoid } => split_primes(&field, count, lower, &avoid),
        Command::FibrationCheck { target, list, json } => fibration(target.as_deref(), list, json),
        Command::VerifyExamples { id, list, json } => verify(&id, list, json),
    };
    result.unwrap_or_else(fail)
}

fn hilbert(a: &str, b: &str, p: &str, json: bool) -> ExitCode {
    let (a, b) = match (parse_rational(a), parse_rational(b)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return fail(e),
    };
    let place: Place = match p.parse() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    match hilbert_symbol(&a, &b, place) {
        Ok(s) if json => {
            let input = json!({ "a": fmt_rational(&a), "b": fmt_rational(&b), "place": place.to_string() });
            println!("{}", Report::new("hilbert", input, json!({ "symbol": s.to_string() })).to_json());
            ExitCode::SUCCESS
        }
        Ok(s) => {
            println!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

/// The exit code for an analysis whose places may carry errors.
fn partial_code(sections: &[&SurfaceAnalysis]) -> u8 {
    let errors: Vec<&Error> = sections.iter().flat_map(|g| report::place_errors(g)).collect();
    if errors.iter().any(|e| exit_code(e) == 5) {
        5
    } else if errors.is_empty() {
        0
    } else {
        4
    }
}

fn print_section(title: &str, s: &report::AnalysisSection) {
    println!("{title}");
    println!("  bad places: {}", s.bad_places.join(", "));
    for r in &s.places {
        match &r.error {
            Some(e) => println!("  {:<14} error: {e}", r.place),
            None => {
                let inv =
                    r.invariant_set.as_ref().map(|s| format!("{{{}}}", s.join(", "))).unwrap_or_else(|| "-".into());
                let solv = if r.solvable == Some(true) { "solvable" } else { "insolvable" };
                println!("  {:<14} {solv:<11} {inv:<10} {}", r.place, r.certificate.as_deref().unwrap_or(""));
            }
        }
    }
    match &s.verdict {
        Some(v) => {
            let places = if v.places.is_empty() { String::new() } else { format!(" ({})", v.places.join(", ")) };
            println!("  verdict: {}{places}", v.classification);
            if let Some(sum) = &v.forced_sum {
                println!("  forced invariant sum: {sum}");
            }
        }
        None => println!("  verdict: undecided"),
    }
}

fn analyze(
    file: &Path,
    extension: Option<Vec<i64>>,
    json: bool,
    precision: u32,
    point_height: i64,
    timing: bool,
) -> Result<ExitCode, Error> {
    let start = Instant::now();
    let spec: SurfaceFile = read_json(file)?;
    let v = spec.surface()?;
    let ext = match extension {
        Some(c) => Some(NumberField::from_ints(&c)?),
        None => spec.extension_field()?,
    };
    let opts = AnalysisOptions { precision, ..AnalysisOptions::default() };
    let base = global_analysis(&v, &opts)?;
    let over = ext.as_ref().map(|l| analyze_over_extension(&v, l, &opts)).transpose()?;
    let point = if v.field.is_rationals() { search_rational_point(&v, point_height) } else { None };

    let base_section = report::analysis_section(&v.field, &base);
    let ext_section = ext.as_ref().zip(over.as_ref()).map(|(l, g)| report::analysis_section(l, g));
    let mut input = serde_json::to_value(report::surface_echo(&v)).expect("echo serializes");
    if let Some(l) = &ext {
        input["extension"] = report::field(l);
    }
    let point_value = point.as_ref().map(|(x, y, z)| json!([fmt_rational(x), fmt_rational(y), fmt_rational(z)]));
    let body = json!({
        "base": base_section,
        "extension": ext_section,
        "rational_point": point_value,
    });
    let mut rep = Report::new("analyze", input, body);
    if [&base]
        .into_iter()
        .chain(over.as_ref())
        .any(|g| g.verdict.as_ref().is_some_and(|v| v.assumes_bm_only_obstruction))
    {
        rep.notes.push(
            "classification assumes the Brauer-Manin obstruction is the only obstruction for Chatelet surfaces \
             (Colliot-Thelene, Sansuc, Swinnerton-Dyer 1987)"
                .into(),
        );
    }
    if !v.field.is_rationals() {
        rep.notes.push("rational point search runs over Q only".into());
    }
    if timing {
        rep.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }

    if json {
        println!("{}", rep.to_json());
    } else {
        println!("surface: {v}");
        print_section(&format!("over {}", v.field), &base_section);
        if let (Some(l), Some(s)) = (&ext, &ext_section) {
            print_section(&format!("over {l}"), s);
        }
        if let Some((x, y, z)) = &point {
            println!("rational point: (x, y, z) = ({x}, {y}, {z})");
        }
        for n in &rep.notes {
            println!("note: {n}");
        }
        if let Some(ms) = rep.elapsed_ms {
            println!("elapsed: {ms} ms");
        }
    }
    let sections: Vec<&SurfaceAnalysis> = [&base].into_iter().chain(over.as_ref()).collect();
    Ok(ExitCode::from(partial_code(&sections)))
}

fn parse_places(s: &str) -> Result<Vec<Place>, Error> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect()
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), Error> {
    let path = dir.join(name);
    std::fs::create_dir_all(dir)
        .and_then(|_| std::fs::write(&path, format!("{text}\n")))
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn run_construct(
    recipe: Recipe,
    field: &[i64],
    places: &str,
    out_dir: Option<&Path>,
    json: bool,
) -> Result<ExitCode, Error> {
    let l = NumberField::from_ints(field)?;
    let s = parse_places(places)?;
    let c = construct(recipe, &l, &s)?;
    let issues = verify_trace(&c.trace, &l)?;
    let row = report::construction_row(&c, &issues);
    let input = json!({ "recipe": recipe.to_string(), "field": report::field(&l), "places": places });
    let rep = Report::new("construct", input, serde_json::to_value(&row).expect("row serializes"));
    if let Some(dir) = out_dir {
        let surface = serde_json::to_string_pretty(&report::surface_file(&c.surface, Some(&l))).expect("serializes");
        write_file(dir, "surface.json", &surface)?;
        write_file(dir, "trace.json", &rep.to_json())?;
    }
    if json {
        println!("{}", rep.to_json());
    } else {
        println!("{recipe} over {l}, S = {{{}}}", row.s.join(", "));
        println!("  S' = {{{}}}, S'' = {{{}}}", row.s_prime.join(", "), row.s_doubleprime.join(", "));
        if let (Some(v1), Some(v2)) = (row.v1, row.v2) {
            println!("  auxiliary split primes: {v1}, {v2}");
        }
        println!("  a = {}, b = {}, c = {}", row.a, row.b.as_deref().unwrap_or("-"), row.c.as_deref().unwrap_or("-"));
        println!("  surface: {}", c.surface);
        if let Some(p) = &row.rational_point {
            println!("  rational point: ({})", p.join(", "));
        }
        for i in &row.issues {
            println!("  issue: {i}");
        }
    }
    Ok(if issues.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn split_primes(field: &[i64], count: usize, lower: u64, avoid: &[u64]) -> Result<ExitCode, Error> {
    let l = NumberField::from_ints(field)?;
    let ps = l.find_split_primes(count, lower, avoid)?;
    println!("{}", ps.iter().map(u64::to_string).collect::<Vec<_>>().join(" "));
    Ok(ExitCode::SUCCESS)
}

fn fibration(target: Option<&str>, list: bool, json: bool) -> Result<ExitCode, Error> {
    let builtins = builtin_bundles();
    if list {
        for (id, _) in &builtins {
            println!("{id}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let Some(target) = target else {
        return Err(Error::InvalidInput("give a builtin id or a file".into()));
    };
    let spec: BundleSpec = match builtins.into_iter().find(|(id, _)| *id == target) {
        Some((_, spec)) => spec,
        None => read_json::<BundleFile>(Path::new(target))?.spec()?,
    };
    let r = check_bundle(&spec)?;
    let row = report::bundle_row(&r);
    if json {
        let rep = Report::new(
            "fibration-check",
            json!({ "target": target }),
            serde_json::to_value(&row).expect("serializes"),
        );
        println!("{}", rep.to_json());
    } else {
        let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
        println!("{} resultant = {}", mark(!num_traits::Zero::is_zero(&r.resultant)), row.resultant);
        println!("     branch locus = {}", r.branch_locus);
        for (f, ok) in &r.expected_factors {
            println!("{} divides branch locus: {f}", mark(*ok));
        }
        println!("{} branch loci disjoint", mark(r.disjoint));
        for (i, ok) in r.points_on_curve.iter().enumerate() {
            println!("{} curve point {}", mark(*ok), i + 1);
        }
    }
    Ok(if r.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn verify(id: &str, list: bool, json: bool) -> Result<ExitCode, Error> {
    if list {
        for e in manifest::entries() {
            println!("{:<24} {}", e.id, e.summary);
        }
        return Ok(ExitCode::SUCCESS);
    }
    let entries = if id == "all" {
        manifest::entries()
    } else {
        vec![manifest::find(id).ok_or_else(|| Error::InvalidInput(format!("unknown example id {id:?}")))?]
    };
    let mut all_pass = true;
    let mut rows = Vec::new();
    for e in entries {
        let checks = match (e.run)() {
            Ok(c) => c,
            Err(err) => vec![manifest::Check { name: "run".into(), pass: false, detail: err.to_string() }],
        };
        let pass = checks.iter().all(|c| c.pass);
        all_pass &= pass;
        if !json {
            println!("{} {:<24} {}", if pass { "PASS" } else { "FAIL" }, e.id, e.summary);
            for c in &checks {
                let detail = if c.detail.is_empty() { String::new() } else { format!(" [{}]", c.detail) };
                println!("    {} {}{detail}", if c.pass { "ok  " } else { "FAIL" }, c.name);
            }
        }
        let checks: Vec<Value> =
            checks.iter().map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail })).collect();
        rows.push(json!({ "id": e.id, "summary": e.summary, "pass": pass, "checks": checks }));
    }
    if json {
        let rep = Report::new("verify-examples", json!({ "id": id }), json!({ "pass": all_pass, "entries": rows }));
        println!("{}", rep.to_json());
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
