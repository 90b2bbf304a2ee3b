//! Command-line front end: distance, local enumeration, path and loop tools,
//! stabilizer membership, and amalgam factorization, with text or JSON
//! output.
//!
//! Exit codes: 0 success, 1 property or verification failure, 2 bad input.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use sl3_building::homotopy::{moves_from_json, moves_to_json, move_to_record};
use sl3_building::{
    adapted_bases, contract_loop, factor_in_amalgam, faces_at_vertex, in_stabilizer,
    multiply_word, neighbors, tight_fit, verify_moves, DVRContext, EdgePath, Error, GroupElement,
    LatticeClass, Mat3,
};

#[derive(Parser)]
#[command(
    name = "sl3b",
    about = "Exact computations in the rank-3 lattice-class complex over the integers localized at a prime"
)]
struct Cli {
    /// The prime p of the valuation ring
    #[arg(long, global = true, default_value_t = 2)]
    prime: u64,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized subcommands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print extra detail where available
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Distance between the classes of two basis matrices
    Distance { m1: String, m2: String },
    /// All classes adjacent to the class of a matrix
    Neighbors { m: String },
    /// All faces at the class of a matrix
    Faces { m: String },
    /// Contract a closed path to its basepoint, or verify a certificate
    Contract {
        /// JSON path file: a list of 3x3 matrices of scalar strings
        loop_file: String,
        /// Verify this certificate against the loop instead of contracting
        #[arg(long)]
        check: Option<String>,
    },
    /// Factor a determinant-1 matrix as a word in the three standard
    /// vertex stabilizers
    Factor {
        g: String,
        /// Re-multiply the word and re-test every letter's membership
        #[arg(long)]
        check: bool,
    },
    /// Generate a seeded random closed loop as a JSON path
    Randloop {
        /// Number of random-walk steps before closing the loop
        #[arg(long, default_value_t = 8)]
        len: usize,
    },
    /// Run the bounded property suite at p = 2 and p = 3
    Selftest,
}

fn read_input(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::Parse(e.to_string()))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))
    }
}

fn parse_matrix(raw: &str) -> Result<Mat3, Error> {
    let trimmed = raw.trim_start();
    if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))
    } else {
        Mat3::parse_text(raw)
    }
}

fn load_class(ctx: &DVRContext, path: &str) -> Result<LatticeClass, Error> {
    LatticeClass::from_mat(ctx, parse_matrix(&read_input(path)?)?)
}

/// 0 success, 1 verification failure, 2 bad input.
fn run(cli: &Cli) -> u8 {
    let ctx = match DVRContext::new(cli.prime) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match dispatch(cli, &ctx) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: &Cli, ctx: &DVRContext) -> Result<u8, Error> {
    let json_out = cli.format == Format::Json;
    match &cli.cmd {
        Cmd::Distance { m1, m2 } => {
            let c1 = load_class(ctx, m1)?;
            let c2 = load_class(ctx, m2)?;
            let d = c1.distance(&c2);
            let (n, tight) = tight_fit(ctx, c1.canon(), c2.canon());
            let (_, divisors) = adapted_bases(ctx, c1.canon(), &tight)?;
            if json_out {
                let mut obj = json!({ "distance": d });
                if cli.verbose {
                    obj["a"] = json!(divisors.a);
                    obj["b"] = json!(divisors.b);
                    obj["n"] = json!(n);
                }
                println!("{obj}");
            } else {
                println!("{d}");
                if cli.verbose {
                    println!("a: {}", divisors.a);
                    println!("b: {}", divisors.b);
                    println!("n: {n}");
                }
            }
            Ok(0)
        }
        Cmd::Neighbors { m } => {
            let c = load_class(ctx, m)?;
            let nbs = neighbors(&c);
            if json_out {
                let mats: Vec<Mat3> = nbs.iter().map(|n| n.canon().mat().clone()).collect();
                println!("{}", json!({ "neighbors": mats, "count": mats.len() }));
            } else {
                for n in &nbs {
                    println!("{}", n.canon().mat().to_line());
                }
                println!("count: {}", nbs.len());
            }
            Ok(0)
        }
        Cmd::Faces { m } => {
            let c = load_class(ctx, m)?;
            let faces = faces_at_vertex(&c);
            if json_out {
                let arr: Vec<Vec<Mat3>> = faces
                    .iter()
                    .map(|f| f.verts().iter().map(|v| v.canon().mat().clone()).collect())
                    .collect();
                println!("{}", json!({ "faces": arr, "count": arr.len() }));
            } else {
                for f in &faces {
                    let line: Vec<String> =
                        f.verts().iter().map(|v| v.canon().mat().to_line()).collect();
                    println!("{}", line.join(" | "));
                }
                println!("count: {}", faces.len());
            }
            Ok(0)
        }
        Cmd::Contract { loop_file, check } => {
            let path = EdgePath::from_json(ctx, &read_input(loop_file)?)?;
            if !path.is_closed() {
                eprintln!("error: path is not closed");
                return Ok(2);
            }
            if let Some(cert_file) = check {
                let moves = moves_from_json(ctx, &read_input(cert_file)?)?;
                if verify_moves(&path, &moves) {
                    println!("VERIFIED {} moves", moves.len());
                    Ok(0)
                } else {
                    println!("INVALID CERTIFICATE");
                    Ok(1)
                }
            } else {
                let moves = contract_loop(&path)?;
                let ok = verify_moves(&path, &moves);
                if json_out {
                    let recs: Vec<_> = moves.iter().map(move_to_record).collect();
                    println!(
                        "{}",
                        json!({ "moves": recs, "count": moves.len(), "verified": ok })
                    );
                } else {
                    for m in &moves {
                        println!("{m}");
                    }
                    if cli.verbose {
                        println!("{}", moves_to_json(&moves));
                    }
                    println!("CONTRACTED in {} moves", moves.len());
                }
                Ok(if ok { 0 } else { 1 })
            }
        }
        Cmd::Factor { g, check } => {
            let mat = parse_matrix(&read_input(g)?)?;
            let g = GroupElement::new(mat)?;
            if !g.is_unimodular() {
                eprintln!("error: not in SL3(K): determinant is {}", g.det());
                return Ok(2);
            }
            let word = factor_in_amalgam(ctx, &g)?;
            let check_ok = if *check {
                let product_ok = multiply_word(&word) == g;
                let members_ok = word
                    .letters()
                    .iter()
                    .all(|l| in_stabilizer(ctx, &l.element, l.tag).unwrap_or(false));
                product_ok && members_ok
            } else {
                true
            };
            if json_out {
                let letters: Vec<_> = word
                    .letters()
                    .iter()
                    .map(|l| json!({ "tag": l.tag.to_string(), "matrix": l.element.mat() }))
                    .collect();
                let mut obj = json!({ "letters": letters, "count": word.len() });
                if *check {
                    obj["check"] = json!(check_ok);
                }
                println!("{obj}");
            } else {
                for l in word.letters() {
                    println!("{} {}", l.tag, l.element.mat().to_line());
                }
                println!("letters: {}", word.len());
                if *check {
                    println!("{}", if check_ok { "CHECK OK" } else { "CHECK FAILED" });
                }
            }
            Ok(if check_ok { 0 } else { 1 })
        }
        Cmd::Randloop { len } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let path = sl3_building::sampling::random_loop(ctx, &mut rng, *len);
            println!("{}", path.to_json());
            Ok(0)
        }
        Cmd::Selftest => {
            let mut out = String::new();
            let result = sl3_building::selftest::run(cli.seed, &mut out);
            print!("{out}");
            match result {
                Ok(()) => {
                    println!("selftest: all properties hold");
                    Ok(0)
                }
                Err(name) => {
                    println!("selftest: FAILED at {name}");
                    Ok(1)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(&cli))
}
