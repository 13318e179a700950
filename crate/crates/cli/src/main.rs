use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcomm_core::engine::{acceptance_matrix, rank_bound_audit, simulate, Protocol};
use qcomm_core::format::sig12;
use qcomm_core::linalg::ceil_log2;
use qcomm_core::rank::{
    build_comm_matrix, disj_triangular_audit, eq_fullrank_audit, integer_monomial_rank, monomial_rank_audit,
    random_and_dependent, FunctionName,
};
use qcomm_core::rng::{split_rng, split_seed};
use qcomm_core::zoo::{
    bcw_config, corpus, cost_model, ndet_report, ndet_svd_protocol, noisy_exact_protocol, parse_bits,
    recursive_intersection, trivial_exact_protocol, RecursionConfig,
};
use rand::Rng;
use serde_json::json;

/// Largest input size simulated by `intersect`.
const MAX_SIMULATED_BITS: usize = 64;
/// Largest `n` for commands that tabulate a full acceptance matrix.
const MAX_TABLE_BITS: usize = 8;

#[derive(Parser)]
#[command(name = "qcomm", version, about = "Two-party quantum communication protocols: matrices, protocols and audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the communication matrix of a named function.
    Matrix(MatrixArgs),
    /// Build the SVD protocol from a function's canonical witness and compare its cost with log2(rank)+1.
    Ndet(NdetArgs),
    /// Run the recursive intersection protocol, or print its cost model.
    Intersect(IntersectArgs),
    /// Run one of the rank or polynomial audits.
    Audit {
        #[command(subcommand)]
        audit: AuditCommand,
    },
    /// Simulate a protocol on one input pair or tabulate its acceptance matrix.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// Output format; matrices default to CSV.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long = "fn", value_parser = parse_function)]
    function: FunctionName,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct NdetArgs {
    #[arg(long = "fn", value_parser = parse_function)]
    function: FunctionName,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct IntersectArgs {
    #[arg(long)]
    n: usize,
    /// Alice's input as a bit string, most significant first.
    #[arg(long)]
    x: Option<String>,
    /// Bob's input as a bit string.
    #[arg(long)]
    y: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Print the cost model prediction and skip simulation.
    #[arg(long)]
    cost_only: bool,
    /// Inputs of at most this many bits use the base protocol directly.
    #[arg(long, default_value_t = 64)]
    threshold: usize,
    #[arg(long, default_value_t = 2.0)]
    kappa: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum AuditCommand {
    /// Acceptance-matrix rank against 2^(2l-2) over the protocol corpus.
    RankBound(AuditArgs),
    /// Random matrices with the EQ zero-pattern have full rank.
    EqFullrank(AuditArgs),
    /// Random matrices with the DISJ zero-pattern are triangular and full rank.
    DisjTriangular(AuditArgs),
    /// Monomial count of the folded polynomial equals rank on AND-dependent matrices.
    MonomialRank(AuditArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolKind {
    Trivial,
    Svd,
    Noisy,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long = "fn", value_parser = parse_function)]
    function: FunctionName,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = ProtocolKind::Svd)]
    protocol: ProtocolKind,
    /// Error probability of the noisy protocol.
    #[arg(long, default_value_t = 0.2)]
    error: f64,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    #[command(flatten)]
    output: Output,
}

fn parse_function(s: &str) -> Result<FunctionName, String> {
    s.parse().map_err(|e: qcomm_core::Error| e.to_string())
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

/// Rendered output and whether every check passed.
struct Report {
    text: String,
    ok: bool,
}

fn require_seed(seed: Option<u64>) -> Result<u64, UsageError> {
    seed.ok_or_else(|| UsageError("this command is randomized; pass --seed".into()))
}

fn check_n(n: usize, max: usize) -> Result<(), UsageError> {
    if n == 0 || n > max {
        return Err(UsageError(format!("--n must be in 1..={max}")));
    }
    Ok(())
}

fn input_bits(s: &str, n: usize) -> Result<u64, UsageError> {
    let bits = parse_bits(s)?;
    if bits.len() != n {
        return Err(UsageError(format!("input {s:?} must have {n} bits")));
    }
    Ok(bits.iter().fold(0, |acc, &b| acc << 1 | b as u64))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

fn cmd_matrix(a: &MatrixArgs) -> Result<Report, UsageError> {
    check_n(a.n, qcomm_core::rank::MAX_COMM_BITS)?;
    let m = build_comm_matrix(a.function, a.n)?;
    let text = match a.output.format {
        Format::Json => m.to_json() + "\n",
        Format::Csv | Format::Text => m.to_csv(),
    };
    Ok(Report { text, ok: true })
}

fn cmd_ndet(a: &NdetArgs) -> Result<Report, UsageError> {
    check_n(a.n, MAX_TABLE_BITS)?;
    let r = ndet_report(a.function, a.n)?;
    let predicted = ceil_log2(r.rank) + 1;
    let ok = r.pattern_ok && r.cost == predicted;
    let text = match a.output.format {
        Format::Json => {
            let mut v = serde_json::to_value(&r)?;
            v["log2_rank_plus_one"] = json!(predicted);
            v["agree"] = json!(ok);
            pretty(&v)
        }
        Format::Csv => format!(
            "function,n,rank,cost,log2_rank_plus_one,pattern_ok,agree\n{},{},{},{},{},{},{}\n",
            r.function, r.n, r.rank, r.cost, predicted, r.pattern_ok, ok
        ),
        Format::Text => {
            let mut s = format!(
                "function: {}_{}\nrank: {}\ncost: {}\nlog2(rank)+1: {}\npattern: {}\n",
                r.function,
                r.n,
                r.rank,
                r.cost,
                predicted,
                if r.pattern_ok { "exact" } else { "mismatch" }
            );
            if ok {
                s.push_str("agree\n");
            } else {
                if r.cost != predicted {
                    s.push_str(&format!("diff: cost {} != {predicted}", r.cost));
                    if r.dead_flag {
                        s.push_str(" (one flag qubit rejects all-zero rows)");
                    }
                    s.push('\n');
                }
                if !r.pattern_ok {
                    s.push_str(&format!("diff: pattern differs at {:?}\n", r.counterexamples));
                }
            }
            s
        }
    };
    Ok(Report { text, ok })
}

struct PairStats {
    x: Vec<bool>,
    y: Vec<bool>,
    intersects: bool,
    successes: usize,
    false_positives: usize,
    max_cost: usize,
    mean_cost: f64,
}

fn cmd_intersect(a: &IntersectArgs) -> Result<Report, UsageError> {
    if a.n == 0 {
        return Err(UsageError("--n must be positive".into()));
    }
    let rcfg = RecursionConfig { base_threshold: a.threshold, kappa: a.kappa, ..RecursionConfig::default() };
    rcfg.validate()?;
    let model = cost_model(a.n as f64, &rcfg, 1.0, 1.0);
    if a.cost_only {
        return Ok(Report { text: sig12(model) + "\n", ok: true });
    }
    check_n(a.n, MAX_SIMULATED_BITS)?;
    if a.trials == 0 {
        return Err(UsageError("--trials must be positive".into()));
    }
    let to_bits = |v: u64| (0..a.n).map(|i| v >> (a.n - 1 - i) & 1 == 1).collect::<Vec<bool>>();
    let pairs: Vec<(Vec<bool>, Vec<bool>)> = match (&a.x, &a.y) {
        (Some(x), Some(y)) => vec![(to_bits(input_bits(x, a.n)?), to_bits(input_bits(y, a.n)?))],
        (None, None) if a.n <= 2 => {
            let d = 1u64 << a.n;
            (0..d).flat_map(|x| (0..d).map(move |y| (x, y))).map(|(x, y)| (to_bits(x), to_bits(y))).collect()
        }
        (None, None) => {
            let mut rng = split_rng(require_seed(a.seed)?, u64::MAX);
            vec![((0..a.n).map(|_| rng.random_bool(0.5)).collect(), (0..a.n).map(|_| rng.random_bool(0.5)).collect())]
        }
        _ => return Err(UsageError("pass both --x and --y, or neither".into())),
    };
    // One bit leaves nothing to randomize.
    let seed = if a.n == 1 { a.seed.unwrap_or(0) } else { require_seed(a.seed)? };

    let mut stats = Vec::new();
    for (x, y) in pairs {
        let intersects = x.iter().zip(&y).any(|(p, q)| p & q);
        let (mut successes, mut false_positives, mut max_cost, mut total) = (0, 0, 0, 0usize);
        for t in 0..a.trials {
            let out = recursive_intersection(&x, &y, &rcfg, &bcw_config(a.n, split_seed(seed, t as u64)))?;
            match out.found {
                Some(i) if x[i] && y[i] => successes += 1,
                Some(_) => false_positives += 1,
                None => {}
            }
            max_cost = max_cost.max(out.cost);
            total += out.cost;
        }
        if !intersects {
            false_positives += successes;
            successes = 0;
        }
        stats.push(PairStats {
            x,
            y,
            intersects,
            successes,
            false_positives,
            max_cost,
            mean_cost: total as f64 / a.trials as f64,
        });
    }
    let ok = stats.iter().all(|s| s.false_positives == 0);
    let show = |b: &[bool]| b.iter().map(|&v| if v { '1' } else { '0' }).collect::<String>();
    let rate = |s: &PairStats| s.successes as f64 / a.trials as f64;
    let text = match a.output.format {
        Format::Json => {
            let rows: Vec<_> = stats
                .iter()
                .map(|s| {
                    json!({
                        "x": show(&s.x), "y": show(&s.y), "intersects": s.intersects,
                        "success_rate": rate(s), "false_positives": s.false_positives,
                        "max_cost": s.max_cost, "mean_cost": s.mean_cost,
                    })
                })
                .collect();
            pretty(&json!({"n": a.n, "trials": a.trials, "seed": seed, "cost_model": model, "inputs": rows}))
        }
        Format::Csv => {
            let mut s = String::from("x,y,intersects,success_rate,false_positives,max_cost,mean_cost,cost_model\n");
            for p in &stats {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    show(&p.x),
                    show(&p.y),
                    p.intersects,
                    sig12(rate(p)),
                    p.false_positives,
                    p.max_cost,
                    sig12(p.mean_cost),
                    sig12(model)
                ));
            }
            s
        }
        Format::Text => {
            let mut s = format!("n: {}\ntrials: {}\ncost model: {}\n", a.n, a.trials, sig12(model));
            for p in &stats {
                s.push_str(&format!(
                    "x={} y={} intersects={} success={} false_positives={} cost max={} mean={}\n",
                    show(&p.x),
                    show(&p.y),
                    p.intersects,
                    sig12(rate(p)),
                    p.false_positives,
                    p.max_cost,
                    sig12(p.mean_cost)
                ));
            }
            s
        }
    };
    Ok(Report { text, ok })
}

fn audit_output<T: serde::Serialize>(name: &str, rows: &[T], ok: bool, summary: String, format: Format) -> Report {
    let text = match format {
        Format::Text => format!("{name}: {summary}\n{}\n", if ok { "ok" } else { "FAILED" }),
        // Failure detail is always JSON; CSV gives the one-line summary.
        Format::Csv if ok => format!("audit,ok,summary\n{name},{ok},{summary}\n"),
        _ => pretty(&json!({"audit": name, "ok": ok, "summary": summary, "reports": rows})),
    };
    Report { text, ok }
}

fn cmd_audit(a: &AuditCommand) -> Result<Report, UsageError> {
    match a {
        AuditCommand::RankBound(args) => {
            check_n(args.n, 6)?;
            if args.tol.is_nan() || args.tol <= 0.0 {
                return Err(UsageError("--tol must be positive".into()));
            }
            let reports =
                corpus(args.n)?.iter().map(|p| rank_bound_audit(p, args.tol)).collect::<Result<Vec<_>, _>>()?;
            let good = reports.iter().filter(|r| r.ok).count();
            let ok = good == reports.len();
            let summary = format!("{good}/{} protocols within 2^(2l-2)", reports.len());
            Ok(audit_output("rank-bound", &reports, ok, summary, args.output.format))
        }
        AuditCommand::EqFullrank(args) | AuditCommand::DisjTriangular(args) => {
            let seed = require_seed(args.seed)?;
            check_n(args.n, qcomm_core::rank::MAX_AUDIT_BITS)?;
            let (name, r) = if matches!(a, AuditCommand::EqFullrank(_)) {
                ("eq-fullrank", eq_fullrank_audit(args.n, args.trials, seed)?)
            } else {
                ("disj-triangular", disj_triangular_audit(args.n, args.trials, seed)?)
            };
            let summary = format!("{}/{} rank {}", r.full_rank, r.trials, 1usize << r.n);
            Ok(audit_output(name, std::slice::from_ref(&r), r.ok, summary, args.output.format))
        }
        AuditCommand::MonomialRank(args) => {
            let seed = require_seed(args.seed)?;
            check_n(args.n, 6)?;
            let mut reports = Vec::new();
            let mut equal = 0;
            for t in 0..args.trials {
                let mut rng = split_rng(seed, t as u64);
                let (g, p) = random_and_dependent(args.n, &mut rng)?;
                let (monomials, exact) = integer_monomial_rank(args.n, &g);
                let r = monomial_rank_audit(&p, args.tol)?;
                let ok = r.ok && monomials == exact && r.monomials == monomials;
                equal += ok as usize;
                reports.push(json!({"trial": t, "monomials": monomials, "exact_rank": exact, "numeric": r, "ok": ok}));
            }
            let ok = equal == args.trials;
            let summary = format!("{equal}/{} equality", args.trials);
            Ok(audit_output("monomial-rank", &reports, ok, summary, args.output.format))
        }
    }
}

fn cmd_simulate(a: &SimulateArgs) -> Result<Report, UsageError> {
    check_n(a.n, MAX_TABLE_BITS)?;
    let target = build_comm_matrix(a.function, a.n)?;
    let p: Protocol = match a.protocol {
        ProtocolKind::Trivial => trivial_exact_protocol(&target)?,
        ProtocolKind::Noisy => noisy_exact_protocol(&target, a.error)?,
        ProtocolKind::Svd => ndet_svd_protocol(&qcomm_core::rank::canonical::for_function(a.function, a.n)?)?.protocol,
    };
    let text = match (&a.x, &a.y) {
        (Some(x), Some(y)) => {
            let (xv, yv) = (input_bits(x, a.n)?, input_bits(y, a.n)?);
            let r = simulate(&p, xv, yv)?;
            let v = json!({"protocol": p.name, "x": x, "y": y, "accept_prob": r.accept_prob, "cost": r.cost});
            match a.output.format {
                Format::Json => pretty(&v),
                Format::Csv => {
                    format!("protocol,x,y,accept_prob,cost\n{},{x},{y},{},{}\n", p.name, sig12(r.accept_prob), r.cost)
                }
                Format::Text => format!("protocol: {}\naccept: {}\ncost: {}\n", p.name, sig12(r.accept_prob), r.cost),
            }
        }
        (None, None) => {
            let m = acceptance_matrix(&p)?;
            match a.output.format {
                Format::Json => m.to_json() + "\n",
                _ => m.to_csv(),
            }
        }
        _ => return Err(UsageError("pass both --x and --y, or neither".into())),
    };
    Ok(Report { text, ok: true })
}

fn run(cli: &Cli) -> Result<(Report, Option<&PathBuf>), UsageError> {
    Ok(match &cli.command {
        Command::Matrix(a) => (cmd_matrix(a)?, a.output.out.as_ref()),
        Command::Ndet(a) => (cmd_ndet(a)?, a.output.out.as_ref()),
        Command::Intersect(a) => (cmd_intersect(a)?, a.output.out.as_ref()),
        Command::Audit { audit } => {
            let out = match audit {
                AuditCommand::RankBound(x)
                | AuditCommand::EqFullrank(x)
                | AuditCommand::DisjTriangular(x)
                | AuditCommand::MonomialRank(x) => x.output.out.as_ref(),
            };
            (cmd_audit(audit)?, out)
        }
        Command::Simulate(a) => (cmd_simulate(a)?, a.output.out.as_ref()),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, out) = match run(&cli) {
        Ok(r) => r,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &report.text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", report.text),
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
