use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use tracealg::generic_eval::{eval_numeric, identity_verdict, is_psd, term_budget, GenericContext};
use tracealg::identities::{capelli, fm_identity_verdict, fm_symplectic_witness, newton_fm_with, NewtonExponent};
use tracealg::positivity::{central_reduce_example61, central_reduce_sigma, sample_refute, verify_ks, ConstraintSet, KsCertificate};
use tracealg::ps3;
use tracealg::reynolds::{reflect, reynolds_matrix, reynolds_so_report};
use tracealg::scalar_poly::{Family, Matrix, NumMatrix, PolyMatrix, Rational};
use tracealg::syntax::{parse_poly, parse_poly_matrix, parse_trace_polynomial};
use tracealg::trace_ring::TracePolynomial;

#[derive(Parser)]
#[command(name = "tracealg", version, about = "Exact computation with trace polynomials")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the canonical form of a trace polynomial.
    Canon {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Evaluate at a tuple of rational matrices.
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        matrices: PathBuf,
    },
    /// Decide whether EXPR vanishes on all n×n matrices.
    Identity {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        n: usize,
    },
    /// Exact positive-semidefiniteness test of a symmetric rational matrix.
    Psd {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// O(n)-Reynolds operator of a polynomial in xi(j,a,b) (or, with
    /// --matrix, the concomitant lift of a polynomial matrix).
    Reynolds {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        matrix: bool,
    },
    /// The trace polynomial f_m, its identity check, or its symplectic witness.
    Fm {
        #[arg(long)]
        m: usize,
        /// Check that f_m(x, x^*-skew) vanishes on 2m×2m matrices.
        #[arg(long, alias = "check-identity", conflicts_with = "witness")]
        check: bool,
        /// Evaluate at the block witness of size 2N, repeated D times.
        #[arg(long, num_args = 2, value_names = ["N", "D"])]
        witness: Option<Vec<usize>>,
        /// Use the level k instead of the summation index as the power in the recursion.
        #[arg(long)]
        level_exponent: bool,
    },
    /// The Capelli polynomial c_m.
    Capelli {
        #[arg(long)]
        m: usize,
        /// Also decide whether c_m is an identity on n×n matrices.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Elementary symmetric functions of a symmetric s as pure trace polynomials.
    CentralReduce {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        n: usize,
        /// Check the four central constraints replacing s ⪰ 0 at n = 3.
        #[arg(long)]
        example61: bool,
    },
    /// Verify a Krivine–Stengle certificate for A on the constraint set.
    VerifyCert {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Search for a point of K_S where EXPR is not positive semidefinite.
    Refute {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        constraints: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sampling box half-width (rational).
        #[arg(long, default_value = "1")]
        radius: Rational,
        /// Write the witness tuple here (matrix-tuple JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact checks of the 3×3 counterexample data.
    Ps3 {
        #[command(subcommand)]
        action: Ps3Action,
    },
}

#[derive(Subcommand)]
enum Ps3Action {
    Verify {
        /// idempotents, betas, jacobian or witness
        #[arg(long)]
        only: Option<ps3::Part>,
    },
}

/// Result of one command: exit status plus both renderings.
struct Outcome {
    ok: bool,
    text: String,
    json: Value,
}

impl Outcome {
    fn new(ok: bool, text: impl Into<String>, json: Value) -> Self {
        Outcome { ok, text: text.into(), json }
    }
}

#[derive(Deserialize)]
struct TupleFile {
    n: usize,
    g: usize,
    matrices: Vec<Vec<Vec<Rational>>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Rows(Vec<Vec<Rational>>),
    Wrapped { matrix: Vec<Vec<Rational>> },
    Tuple(TupleFile),
}

#[derive(Deserialize)]
struct ConstraintFile {
    #[serde(default)]
    generators: Vec<TracePolynomial>,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    g: usize,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn square(rows: Vec<Vec<Rational>>, n: usize) -> Result<NumMatrix> {
    ensure!(rows.len() == n && rows.iter().all(|r| r.len() == n), "expected a {n}x{n} matrix");
    Ok(Matrix::from_rows(rows))
}

fn read_tuple(path: &Path) -> Result<(usize, Vec<NumMatrix>)> {
    let f: TupleFile = read_json(path)?;
    ensure!(f.matrices.len() == f.g, "file declares g = {} but holds {} matrices", f.g, f.matrices.len());
    let ms = f.matrices.into_iter().map(|m| square(m, f.n)).collect::<Result<_>>()?;
    Ok((f.n, ms))
}

fn read_matrix(path: &Path) -> Result<NumMatrix> {
    let rows = match read_json::<MatrixFile>(path)? {
        MatrixFile::Rows(r) | MatrixFile::Wrapped { matrix: r } => r,
        MatrixFile::Tuple(t) => {
            ensure!(t.matrices.len() == 1, "expected exactly one matrix, found {}", t.matrices.len());
            t.matrices.into_iter().next().unwrap()
        }
    };
    let n = rows.len();
    square(rows, n)
}

fn read_constraints(path: Option<&Path>, n: usize) -> Result<ConstraintSet> {
    let Some(path) = path else { return Ok(ConstraintSet::empty(n, 0)) };
    let f: ConstraintFile = read_json(path)?;
    if let Some(fn_) = f.n {
        ensure!(fn_ == n, "constraint file is for n = {fn_}, but --n {n} was given");
    }
    Ok(ConstraintSet::new(f.generators, n, f.g)?)
}

fn matrix_json(m: &NumMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| m.row(i).iter().map(|x| Value::String(x.to_string())).collect()).collect())
}

fn poly_matrix_json(m: &PolyMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| m.row(i).iter().map(|x| Value::String(x.to_string())).collect()).collect())
}

fn tuple_json(xs: &[NumMatrix]) -> Value {
    json!({
        "n": xs.first().map_or(0, |m| m.rows()),
        "g": xs.len(),
        "matrices": xs.iter().map(matrix_json).collect::<Vec<_>>(),
    })
}

fn run(cmd: Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Canon { expr } => {
            let f = parse_trace_polynomial(&expr)?;
            Ok(Outcome::new(true, f.to_string(), json!({ "canonical": f })))
        }
        Cmd::Eval { expr, matrices } => {
            let f = parse_trace_polynomial(&expr)?;
            let (n, xs) = read_tuple(&matrices)?;
            let v = eval_numeric(&f, &xs)?;
            Ok(Outcome::new(true, v.to_string(), json!({ "n": n, "value": matrix_json(&v) })))
        }
        Cmd::Identity { expr, n } => {
            ensure!(n > 0, "--n must be positive");
            let f = parse_trace_polynomial(&expr)?;
            let v = identity_verdict(&f, n, term_budget());
            let mode = serde_json::to_value(v.mode)?;
            let text = format!("{} ({})", if v.holds { "identity" } else { "not an identity" }, mode.as_str().unwrap());
            Ok(Outcome::new(v.holds, text, json!({ "n": n, "holds": v.holds, "mode": mode })))
        }
        Cmd::Psd { matrix } => {
            let m = read_matrix(&matrix)?;
            let ok = is_psd(&m)?;
            Ok(Outcome::new(ok, if ok { "psd" } else { "not psd" }, json!({ "psd": ok })))
        }
        Cmd::Reynolds { expr, n, matrix } => reynolds_cmd(&expr, n, matrix),
        Cmd::Fm { m, check, witness, level_exponent } => {
            ensure!(m > 0, "--m must be positive");
            let exponent = if level_exponent { NewtonExponent::Level } else { NewtonExponent::Index };
            if check {
                let v = fm_identity_verdict(m, 2 * m, exponent);
                let mode = serde_json::to_value(v.mode)?;
                let text = format!(
                    "f_{m}(x, x skew) {} on {}x{} matrices ({})",
                    if v.holds { "vanishes" } else { "does not vanish" },
                    2 * m,
                    2 * m,
                    mode.as_str().unwrap()
                );
                Ok(Outcome::new(v.holds, text, json!({ "m": m, "n": 2 * m, "holds": v.holds, "mode": mode })))
            } else if let Some(w) = witness {
                let (n, d) = (w[0], w[1]);
                ensure!(n > 0 && d > 0, "witness sizes must be positive");
                let (prod, value) = fm_symplectic_witness(n, m, d)?;
                let nonzero = !value.is_zero();
                let text = format!("x1*x2 = {prod}\nf_{m} = {value}\n{}", if nonzero { "nonzero" } else { "zero" });
                Ok(Outcome::new(
                    nonzero,
                    text,
                    json!({ "m": m, "n": n, "d": d, "product": matrix_json(&prod), "value": matrix_json(&value), "nonzero": nonzero }),
                ))
            } else {
                let f = newton_fm_with(m, exponent);
                Ok(Outcome::new(true, f.value.to_string(), json!({ "m": m, "fm": f.value, "primes": f.primes })))
            }
        }
        Cmd::Capelli { m, n } => {
            let c = capelli(m)?.to_trace_polynomial();
            let mut out = json!({ "m": m, "capelli": c });
            let mut text = c.to_string();
            let mut ok = true;
            if let Some(n) = n {
                ensure!(n > 0, "--n must be positive");
                let v = identity_verdict(&c, n, term_budget());
                ok = v.holds;
                out["n"] = json!(n);
                out["holds"] = json!(v.holds);
                out["mode"] = serde_json::to_value(v.mode)?;
                text.push_str(&format!("\n{} on {n}x{n} matrices", if ok { "identity" } else { "not an identity" }));
            }
            Ok(Outcome::new(ok, text, out))
        }
        Cmd::CentralReduce { expr, n, example61 } => {
            let s = parse_trace_polynomial(&expr)?;
            ensure!(s.is_symmetric(), "the constraint must be symmetric");
            if example61 {
                let e = central_reduce_example61(&s, n)?;
                let ok = e.holds.iter().all(|&h| h);
                let mut text = String::new();
                for (i, ((c, x), h)) in e.c.iter().zip(&e.expressions).zip(&e.holds).enumerate() {
                    text.push_str(&format!("c{} = {c}\n   = {x}  [{}]\n", i + 1, if *h { "ok" } else { "FAILS" }));
                }
                let items: Vec<Value> = e
                    .c
                    .iter()
                    .zip(&e.expressions)
                    .zip(&e.holds)
                    .map(|((c, x), h)| json!({ "c": c, "expression": x, "holds": h }))
                    .collect();
                Ok(Outcome::new(ok, text.trim_end(), json!({ "sigma": e.sigma, "constraints": items, "holds": ok })))
            } else {
                let sigma = central_reduce_sigma(&s, n);
                let text = sigma.iter().enumerate().map(|(i, p)| format!("sigma{} = {p}", i + 1)).collect::<Vec<_>>();
                Ok(Outcome::new(true, text.join("\n"), json!({ "n": n, "sigma": sigma })))
            }
        }
        Cmd::VerifyCert { a, cert, constraints, n } => {
            let a = parse_trace_polynomial(&a)?;
            let cert: KsCertificate = read_json(&cert)?;
            let set = read_constraints(Some(&constraints), n)?;
            let ok = verify_ks(&a, &cert, &set)?;
            Ok(Outcome::new(ok, if ok { "certificate verified" } else { "certificate rejected" }, json!({ "verified": ok })))
        }
        Cmd::Refute { expr, constraints, n, trials, seed, radius, out } => {
            ensure!(n > 0, "--n must be positive");
            ensure!(radius.is_positive(), "--radius must be positive");
            let f = parse_trace_polynomial(&expr)?;
            ensure!(f.is_symmetric(), "only symmetric trace polynomials can be tested for positivity");
            let set = read_constraints(constraints.as_deref(), n)?;
            match sample_refute(&f, &set, trials, &radius, seed) {
                None => Ok(Outcome::new(
                    true,
                    format!("no witness in {trials} trials"),
                    json!({ "refuted": false, "trials": trials, "seed": seed }),
                )),
                Some(xs) => {
                    let value = eval_numeric(&f, &xs)?;
                    let witness = tuple_json(&xs);
                    if let Some(path) = &out {
                        fs::write(path, serde_json::to_string_pretty(&witness)? + "\n")
                            .with_context(|| format!("writing {}", path.display()))?;
                    }
                    let pts = xs.iter().enumerate().map(|(j, x)| format!("x{} = {x}", j + 1)).collect::<Vec<_>>();
                    let text = format!("refuted at\n{}\nvalue = {value}", pts.join("\n"));
                    Ok(Outcome::new(
                        false,
                        text,
                        json!({ "refuted": true, "trials": trials, "seed": seed, "witness": witness, "value": matrix_json(&value) }),
                    ))
                }
            }
        }
        Cmd::Ps3 { action: Ps3Action::Verify { only } } => {
            let ctx = ps3::build_context();
            let report = ps3::verify_all(&ctx, only);
            let mut text = String::new();
            for c in &report.checks {
                text.push_str(&format!("{} [{}] {}", if c.passed { "PASS" } else { "FAIL" }, c.part, c.name));
                if let Some(d) = &c.detail {
                    text.push_str(&format!(" — {d}"));
                }
                text.push('\n');
            }
            let ok = report.all_passed();
            Ok(Outcome::new(ok, text.trim_end(), json!({ "passed": ok, "checks": report.checks })))
        }
    }
}

fn reynolds_cmd(expr: &str, n: usize, matrix: bool) -> Result<Outcome> {
    ensure!(n > 0, "--n must be positive");
    if matrix {
        let m = parse_poly_matrix(expr)?;
        ensure!(m.rows() == n && m.cols() == n, "expected a {n}x{n} matrix");
        let g = m
            .entries()
            .iter()
            .flat_map(|p| p.vars())
            .filter(|v| v.family() == Family::Xi)
            .map(|v| v.j())
            .max()
            .unwrap_or(1);
        for p in m.entries() {
            if let Some(v) = p.vars().into_iter().find(|v| v.family() != Family::Xi) {
                bail!("only xi variables may appear, found {v}");
            }
        }
        let out = reynolds_matrix(&m, &GenericContext::new(n, g))?;
        Ok(Outcome::new(true, out.to_string(), json!({ "n": n, "input": poly_matrix_json(&m), "output": poly_matrix_json(&out) })))
    } else {
        let f = parse_poly(expr)?;
        if let Some(v) = f.vars().into_iter().find(|v| v.family() != Family::Xi) {
            bail!("only xi variables may appear, found {v}");
        }
        let report = reynolds_so_report(&f, n)?;
        let output = report.output.add_ref(&reflect(&report.output)).scale(&Rational::new(1, 2));
        let min_poly: Vec<String> = report.min_poly.iter().map(|c| c.to_string()).collect();
        let text = format!(
            "R(f) = {output}\nminimal polynomial (constant first): [{}]\niterates: {}",
            min_poly.join(", "),
            report.iterates
        );
        Ok(Outcome::new(true, text, json!({ "n": n, "output": output, "so": report })))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli.cmd) {
        Ok(out) => {
            let body = if json { serde_json::to_string_pretty(&out.json).expect("values serialize") } else { out.text };
            // A closed pipe downstream is not our error.
            let _ = writeln!(io::stdout().lock(), "{body}");
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if json {
                println!("{}", json!({ "error": format!("{e:#}") }));
            }
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
