//! `classpoly`: class groups, Hilbert class polynomials and their
//! factorizations mod p, as JSON.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use classpoly::fppoly::{self, Fp2Element, FpPoly};
use classpoly::hcp::ClassPolyStore;
use classpoly::{genus, harness, predictor, quadforms, Discriminant, Error};

#[derive(Parser)]
#[command(name = "classpoly", version, about = "Hilbert class polynomials and their reductions mod p")]
struct Cli {
    /// H_D cache file; defaults to $HF_CACHE, memory only when unset.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DArg {
    /// Discriminant, negative and 0 or 1 mod 4.
    #[arg(short = 'D', allow_hyphen_values = true)]
    d: i64,
}

#[derive(Args)]
struct PairArgs {
    #[arg(short = 'D', allow_hyphen_values = true)]
    d: i64,
    #[arg(short = 'p')]
    p: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced forms of discriminant D.
    Forms(DArg),
    /// Class group structure and 2-rank.
    Classgroup(DArg),
    /// Radicands of the real genus field.
    Genus(DArg),
    /// The Hilbert class polynomial H_D.
    Hcp(DArg),
    /// Factorization of H_D mod p.
    Factor {
        #[command(flatten)]
        pair: PairArgs,
        /// Seed for equal-degree splitting.
        #[arg(long, default_value_t = fppoly::DEFAULT_SEED)]
        seed: u64,
    },
    /// Predicted factorization pattern.
    Predict(PairArgs),
    /// Prediction against the computed factorization.
    Verify(PairArgs),
    /// `verify` over a range of D and all primes up to --pmax, as JSON lines.
    Sweep {
        /// Inclusive range `a..b` of discriminants, e.g. -200..-3.
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        #[arg(long)]
        pmax: u64,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Supersingularity of j = u + v t in F_{p^2}, or of every root of H_D mod p.
    Supersingular {
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'j', long, allow_hyphen_values = true, conflicts_with = "d")]
        j: Option<i64>,
        /// Coefficient of t in j.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        jt: i64,
        #[arg(short = 'D', allow_hyphen_values = true)]
        d: Option<i64>,
    },
    /// OSIDH key space for the order of conductor ell^level in the order of discriminant D.
    Osidh {
        #[arg(short = 'D', allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        level: u32,
        #[arg(short = 'p')]
        p: u64,
        /// Also factor H_{D_n} mod p and count its roots.
        #[arg(long)]
        observe: bool,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Out = Result<Vec<Value>, Failure>;

fn disc(d: i64) -> Result<Discriminant, Failure> {
    Ok(Discriminant::new(d)?)
}

fn prime(p: u64) -> Result<u64, Failure> {
    if classpoly::ntcore::is_prime(p) {
        Ok(p)
    } else {
        Err(Error::NotPrime(p).into())
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn parse_range(s: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::Usage(format!("--range expects a..b, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    Ok((a.min(b), a.max(b)))
}

fn factor_json(f: &FpPoly, m: u32) -> Value {
    json!({ "coeffs": f.coeffs(), "degree": f.degree(), "multiplicity": m })
}

fn roots_json(reduced: &FpPoly) -> Vec<Value> {
    let p = reduced.modulus();
    fppoly::roots_in_fp2(reduced)
        .into_iter()
        .map(|(r, m)| json!({ "root": r, "multiplicity": m, "tag": predictor::RootTag::of(r, p) }))
        .collect()
}

fn run(cli: Cli) -> (Out, bool) {
    let store = match &cli.cache {
        Some(path) => ClassPolyStore::open(path),
        None => ClassPolyStore::from_env(),
    };
    let store = match store {
        Ok(s) => s,
        Err(e) => return (Err(e.into()), false),
    };
    let mut mismatch = false;
    let out = dispatch(cli.command, &store, &mut mismatch);
    (out, mismatch)
}

fn dispatch(command: Command, store: &ClassPolyStore, mismatch: &mut bool) -> Out {
    match command {
        Command::Forms(a) => {
            let d = disc(a.d)?;
            let forms = quadforms::reduced_forms(d);
            Ok(vec![json!({ "D": a.d, "h": forms.len(), "forms": forms })])
        }
        Command::Classgroup(a) => {
            let d = disc(a.d)?;
            let mut v = to_value(&quadforms::group_structure(d));
            v["D"] = json!(a.d);
            v["ambiguous_classes"] = json!(quadforms::ambiguous_classes(d));
            Ok(vec![v])
        }
        Command::Genus(a) => {
            let d = disc(a.d)?;
            let g = genus::genus_generators(d);
            let mut v = to_value(&g);
            v["D"] = v["d"].take();
            v.as_object_mut().expect("object").remove("d");
            v["fplus_degree"] = json!(g.fplus_degree());
            Ok(vec![v])
        }
        Command::Hcp(a) => {
            let d = disc(a.d)?;
            let entry = store.get(d)?;
            let coeffs: Vec<String> = entry.poly.coeffs().iter().map(|c| c.to_string()).collect();
            Ok(vec![json!({ "D": a.d, "h": entry.poly.degree(), "coeffs": coeffs })])
        }
        Command::Factor { pair, seed } => {
            let d = disc(pair.d)?;
            let p = prime(pair.p)?;
            let reduced = fppoly::reduce_mod(&store.get(d)?.poly, p);
            let factors = fppoly::factor_seeded(&reduced, seed);
            Ok(vec![json!({
                "D": pair.d,
                "p": p,
                "factors": factors.iter().map(|(f, m)| factor_json(f, *m)).collect::<Vec<_>>(),
                "signature": fppoly::signature(&factors),
                "roots": roots_json(&reduced),
            })])
        }
        Command::Predict(pair) => {
            let d = disc(pair.d)?;
            let p = prime(pair.p)?;
            Ok(vec![to_value(&predictor::predict(store, d, p)?)])
        }
        Command::Verify(pair) => {
            let d = disc(pair.d)?;
            let p = prime(pair.p)?;
            Ok(vec![to_value(&harness::verify_pair(store, d, p)?)])
        }
        Command::Sweep { range, pmax, jobs } => {
            let (a, b) = parse_range(&range)?;
            let report = harness::sweep(store, a, b, pmax, jobs)?;
            *mismatch = report.mismatches > 0;
            let mut lines: Vec<Value> = report.reports.iter().map(to_value).collect();
            let counts: serde_json::Map<String, Value> =
                report.counts.iter().map(|(k, v)| (k.to_string(), to_value(v))).collect();
            lines.push(json!({ "summary": {
                "d_min": a, "d_max": b, "p_max": pmax,
                "pairs": report.reports.len(),
                "mismatches": report.mismatches,
                "skipped": report.skipped,
                "counts": counts,
            }}));
            Ok(lines)
        }
        Command::Supersingular { p, j, jt, d } => {
            let p = prime(p)?;
            let k = fppoly::Fp2::new(p);
            if let Some(d) = d {
                let reduced = fppoly::reduce_mod(&store.get(disc(d)?)?.poly, p);
                let roots: Vec<Value> = fppoly::roots_in_fp2(&reduced)
                    .into_iter()
                    .map(|(r, m)| json!({ "root": r, "multiplicity": m, "supersingular": harness::is_supersingular_j(r, p) }))
                    .collect();
                let all = roots.iter().all(|r| r["supersingular"] == true);
                return Ok(vec![json!({ "D": d, "p": p, "roots": roots, "all_supersingular": all })]);
            }
            let j = j.ok_or_else(|| Failure::Usage("supersingular needs -j or -D".into()))?;
            let j: Fp2Element = k.element(j, jt);
            Ok(vec![json!({ "p": p, "j": j, "supersingular": harness::is_supersingular_j(j, p) })])
        }
        Command::Osidh { d, ell, level, p, observe } => {
            let report = harness::osidh_keyspace(d, ell, level, p)?;
            let mut v = to_value(&report);
            if observe {
                v["observed"] = to_value(&harness::osidh_observe(store, &report)?);
            }
            Ok(vec![v])
        }
    }
}

fn error_json(f: &Failure) -> Value {
    match f {
        Failure::Usage(msg) => json!({ "error": { "kind": "usage", "message": msg } }),
        Failure::Lib(e) => json!({ "error": { "kind": e.kind(), "message": e.to_string() } }),
    }
}

fn emit(values: &[Value]) -> io::Result<()> {
    let mut out = io::stdout().lock();
    for v in values {
        serde_json::to_writer(&mut out, v)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            let _ = emit(&[error_json(&Failure::Usage(msg.trim().to_string()))]);
            return ExitCode::from(1);
        }
    };
    let (out, mismatch) = run(cli);
    match out {
        Ok(values) => {
            if emit(&values).is_err() {
                return ExitCode::from(1);
            }
            if mismatch {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(f) => {
            let _ = emit(&[error_json(&f)]);
            ExitCode::from(1)
        }
    }
}
