//! Command-line front end: bracket computation, certificate generation and
//! verification, flow integration, nilpotency checking, and a staged
//! construction trace.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage or parse error,
//! 3 internal limit exceeded.

use crate::algebra::{Monomial, Polynomial, Rational};
use crate::certificate::Certificate;
use crate::flow::{
    check_locally_nilpotent, integrate, write_trajectory_csv, FlowError, FlowRequest, FlowStatus,
    NilpotencyVerdict,
};
use crate::generator::CertStore;
use crate::parse::parse_field;
use crate::vectorfield::{standard_generators, VectorField};
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::One;
use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Parser)]
#[command(
    name = "liegen",
    about = "Exact Lie-algebra computations for polynomial vector fields",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Lie bracket of two fields in canonical text form.
    Bracket {
        /// Ambient dimension.
        #[arg(short)]
        n: usize,
        /// Left field, e.g. "z1^3 d2".
        left: String,
        /// Right field, e.g. "z2 d1".
        right: String,
    },
    /// Emit a certificate expressing a target field over the generators.
    Generate {
        #[arg(short)]
        n: usize,
        /// Target field in the text grammar.
        #[arg(long)]
        target: String,
        /// Write certificate JSON here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Re-evaluate a certificate and compare it exactly against a target.
    Verify {
        #[arg(short)]
        n: usize,
        /// Certificate JSON file.
        #[arg(long)]
        cert: PathBuf,
        /// Target field in the text grammar.
        #[arg(long)]
        target: String,
    },
    /// Integrate the flow of a field numerically.
    Flow {
        #[arg(short)]
        n: usize,
        /// Field in the text grammar (alternative to --builtin).
        #[arg(long)]
        field: Option<String>,
        /// One of the built-in generators.
        #[arg(long, value_enum)]
        builtin: Option<Builtin>,
        /// Comma-separated real start coordinates, e.g. "1,1".
        #[arg(long)]
        start: String,
        /// Integration horizon (real ray length).
        #[arg(long = "t-max")]
        t_max: f64,
        /// Direction of the complex time ray, in radians.
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// Write the trajectory as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Classify finite-time escape as blow-up.
        #[arg(long = "detect-blowup")]
        detect_blowup: bool,
    },
    /// Check whether a field is a locally nilpotent derivation.
    Nilpotent {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        field: String,
        /// Iteration budget per coordinate.
        #[arg(long = "max-iter", default_value_t = 25)]
        max_iter: usize,
    },
    /// Print the staged construction trace with exact intermediate fields.
    Demo {
        #[arg(short)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    #[value(name = "U", alias = "u")]
    U,
    #[value(name = "V", alias = "v")]
    V,
}

/// Runs the CLI on the given arguments and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = err.print();
            return code;
        }
    };
    match cli.command {
        Command::Bracket { n, left, right } => cmd_bracket(n, &left, &right),
        Command::Generate { n, target, output } => cmd_generate(n, &target, output.as_deref()),
        Command::Verify { n, cert, target } => cmd_verify(n, &cert, &target),
        Command::Flow {
            n,
            field,
            builtin,
            start,
            t_max,
            theta,
            csv,
            detect_blowup,
        } => cmd_flow(
            n,
            field.as_deref(),
            builtin,
            &start,
            t_max,
            theta,
            csv.as_deref(),
            detect_blowup,
        ),
        Command::Nilpotent { n, field, max_iter } => cmd_nilpotent(n, &field, max_iter),
        Command::Demo { n } => cmd_demo(n),
    }
}

fn check_dim(n: usize) -> Result<(), i32> {
    if n == 0 {
        eprintln!("error: dimension must be at least 1");
        return Err(EXIT_USAGE);
    }
    Ok(())
}

fn parse_or_usage(text: &str, n: usize) -> Result<VectorField, i32> {
    parse_field(text, n).map_err(|e| {
        eprintln!("error: cannot parse field {text:?}: {e}");
        EXIT_USAGE
    })
}

fn cmd_bracket(n: usize, left: &str, right: &str) -> i32 {
    if let Err(code) = check_dim(n) {
        return code;
    }
    let x = match parse_or_usage(left, n) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let y = match parse_or_usage(right, n) {
        Ok(y) => y,
        Err(code) => return code,
    };
    println!("{}", x.bracket(&y));
    EXIT_OK
}

fn cmd_generate(n: usize, target: &str, output: Option<&std::path::Path>) -> i32 {
    if let Err(code) = check_dim(n) {
        return code;
    }
    let target = match parse_or_usage(target, n) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let mut store = CertStore::new(n);
    let cert = store.field_certificate(&target);
    let metrics = cert.metrics();
    let json = cert.to_json();
    match output {
        Some(path) => {
            if let Err(e) = fs::write(path, &json) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
            println!(
                "nodes={} depth={} max_scalar_bits={}",
                metrics.node_count, metrics.depth, metrics.max_scalar_bits
            );
        }
        None => {
            println!("{}", String::from_utf8(json).expect("certificate JSON is UTF-8"));
            eprintln!(
                "nodes={} depth={} max_scalar_bits={}",
                metrics.node_count, metrics.depth, metrics.max_scalar_bits
            );
        }
    }
    EXIT_OK
}

fn cmd_verify(n: usize, cert_path: &std::path::Path, target: &str) -> i32 {
    if let Err(code) = check_dim(n) {
        return code;
    }
    let target = match parse_or_usage(target, n) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let bytes = match fs::read(cert_path) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cert_path.display());
            return EXIT_USAGE;
        }
    };
    let cert = match Certificate::from_json(&bytes) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if cert.n() != n {
        eprintln!(
            "verification failed: certificate dimension {} does not match -n {n}",
            cert.n()
        );
        return EXIT_MISMATCH;
    }
    let value = cert.eval();
    if value == target {
        println!("verified: certificate evaluates to the target exactly");
        EXIT_OK
    } else {
        eprintln!("verification failed: certificate evaluates to {value}");
        EXIT_MISMATCH
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_flow(
    n: usize,
    field: Option<&str>,
    builtin: Option<Builtin>,
    start: &str,
    t_max: f64,
    theta: f64,
    csv: Option<&std::path::Path>,
    detect_blowup: bool,
) -> i32 {
    if let Err(code) = check_dim(n) {
        return code;
    }
    let field = match (field, builtin) {
        (Some(text), None) => match parse_or_usage(text, n) {
            Ok(f) => f,
            Err(code) => return code,
        },
        (None, Some(Builtin::U)) => standard_generators(n).0,
        (None, Some(Builtin::V)) => standard_generators(n).1,
        _ => {
            eprintln!("error: provide exactly one of --field or --builtin");
            return EXIT_USAGE;
        }
    };
    let start: Result<Vec<f64>, _> = start.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let start = match start {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: cannot parse --start: {e}");
            return EXIT_USAGE;
        }
    };
    let mut req = FlowRequest::from_real_start(field, &start, t_max);
    req.theta = theta;
    if !detect_blowup {
        req.blowup_norm = f64::INFINITY;
    }
    let result = match integrate(&req) {
        Ok(r) => r,
        Err(FlowError::StepLimit { t }) => {
            eprintln!("error: step limit exceeded at t = {t}");
            return EXIT_LIMIT;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match result.status {
        FlowStatus::Reached { t } => println!("reached horizon t = {t}"),
        FlowStatus::BlowUp { t } => println!("blow-up detected near t = {t}"),
        FlowStatus::StepUnderflow { t } => {
            println!("step size underflow at t = {t} (no blow-up signature)")
        }
    }
    let (t, z) = result.final_state();
    let state: Vec<String> = z.iter().map(|c| format!("{}+{}i", c.re, c.im)).collect();
    println!("final state at t = {t}: [{}]", state.join(", "));
    println!("accepted samples: {}", result.samples.len());
    if let Some(path) = csv {
        let mut buf = Vec::new();
        write_trajectory_csv(&result, &mut buf).expect("writing to a Vec cannot fail");
        if let Err(e) = fs::write(path, buf) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    EXIT_OK
}

fn cmd_nilpotent(n: usize, field: &str, max_iter: usize) -> i32 {
    if let Err(code) = check_dim(n) {
        return code;
    }
    if max_iter == 0 {
        eprintln!("error: --max-iter must be at least 1");
        return EXIT_USAGE;
    }
    let field = match parse_or_usage(field, n) {
        Ok(f) => f,
        Err(code) => return code,
    };
    match check_locally_nilpotent(&field, max_iter) {
        NilpotencyVerdict::Nilpotent { bound } => {
            println!("nilpotent: every coordinate dies after at most {bound} applications")
        }
        NilpotencyVerdict::NotNilpotent { witness } => {
            println!("not nilpotent: iterates of z{witness} cycle without reaching zero")
        }
        NilpotencyVerdict::Inconclusive => {
            println!("inconclusive after {max_iter} iterations per coordinate")
        }
    }
    EXIT_OK
}

fn cmd_demo(n: usize) -> i32 {
    if let Err(code) = check_dim(n) {
        return code;
    }
    let (u, v) = standard_generators(n);
    println!("dimension n = {n}");
    println!("generators:");
    println!("  U = {u}");
    println!("  V = {v}");
    println!();

    let mut store = CertStore::new(n);

    // Stages: repeated brackets of V with a coordinate direction collapse V
    // to a single monomial field, then single brackets walk exponents down.
    for k in (1..=n).rev() {
        let target_dir = if k >= 2 { k - 1 } else { n };
        let dk = VectorField::unit_direction(n, k);
        println!("step 1-2, source d{k}: bracketing V with d{k}, {} times", 4 * k - 3);
        let mut cur = v.clone();
        for m in 1..=(4 * k - 3) {
            cur = dk.bracket(&cur);
            println!("  ad^{m}: {cur}");
        }
        println!("  family obtained for direction d{target_dir} (all exponents <= 3), e.g.:");
        let mut exps = vec![0u32; n];
        exps[k - 1] = 3;
        for sample in [Monomial::from_exponents(exps), Monomial::constant(n)] {
            let cert = store.monomial_certificate(&sample, target_dir);
            println!(
                "    {} (certificate: {} nodes)",
                cert.eval(),
                cert.metrics().node_count
            );
        }
        println!();
    }

    for k in 1..n {
        let zk3_dn = VectorField::single(
            n,
            n,
            Polynomial::monomial(Monomial::constant(n).with_exponent(k, 3), Rational::one()),
        );
        let zn_dk = VectorField::single(n, k, Polynomial::variable(n, n));
        let br = zk3_dn.bracket(&zn_dk);
        println!("step 3 (k = {k}): [{zk3_dn}, {zn_dk}] = {br}");
        let m = Monomial::constant(n).with_exponent(k, 3);
        let cert = store.monomial_certificate(&m, k);
        println!("  with the correction term: {}", cert.eval());
    }
    if n >= 2 {
        println!();
        println!("step 4: linear fields zi dj for all i != j, e.g.:");
        for (i, j) in [(1usize, 2usize), (2, 1)] {
            let m = Monomial::variable(n, i);
            let cert = store.monomial_certificate(&m, j);
            println!("  {}", cert.eval());
        }
    }

    println!();
    println!("steps 5-7 on demand:");
    let m = Monomial::constant(n).with_exponent(1, 4);
    let cert = store.monomial_certificate(&m, 1);
    println!("  diagonal power ladder: {}", cert.eval());
    if n >= 2 {
        let m = Monomial::constant(n).with_exponent(1, 4);
        let cert = store.monomial_certificate(&m, 2);
        println!("  off-diagonal transport: {}", cert.eval());
        let m = Monomial::from_exponents({
            let mut e = vec![0u32; n];
            e[0] = 1;
            e[1] = 1;
            e
        });
        let cert = store.monomial_certificate(&m, 1);
        let metrics = cert.metrics();
        println!(
            "  monomial peel: {} (certificate: {} nodes, depth {})",
            cert.eval(),
            metrics.node_count,
            metrics.depth
        );
    }

    println!();
    let target = demo_target(n);
    let cert = store.field_certificate(&target);
    let metrics = cert.metrics();
    let ok = cert.eval() == target;
    println!("target: {target}");
    println!(
        "certificate: nodes={} depth={} max_scalar_bits={}",
        metrics.node_count, metrics.depth, metrics.max_scalar_bits
    );
    println!("verified: {ok}");
    if ok {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

fn demo_target(n: usize) -> VectorField {
    use crate::algebra::rat;
    // product of all variables in direction 1, plus a scaled power in
    // direction n
    let all_vars = Monomial::from_exponents(vec![1; n]);
    let t1 = VectorField::single(n, 1, Polynomial::monomial(all_vars, Rational::one()));
    let t2 = VectorField::single(
        n,
        n,
        Polynomial::monomial(Monomial::constant(n).with_exponent(1, 4), rat(-1, 2)),
    );
    t1.add(&t2)
}
