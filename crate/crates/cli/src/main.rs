use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ncsphere::coefficients::{clebsch_gordan, wigner_6j};
use ncsphere::matrep::{make_rep, norm_closed_form_k, CMatrix, ExactRep};
use ncsphere::surd::Surd;
use ncsphere::symalg::{hahn_pmn, Algebra, NormalForm};
use ncsphere::verify::{self, Suite, SuiteConfig};
use ncsphere::{Error, HalfInt};
use num_rational::BigRational;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ncsphere", version, about = "Fuzzy sphere basis, coefficients and verification suites")]
struct Cli {
    /// Write the JSON document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Clebsch–Gordan coefficient ⟨j1 m1; j2 m2 | j m⟩.
    Cg {
        #[arg(long)]
        j1: HalfInt,
        #[arg(long)]
        j2: HalfInt,
        #[arg(long)]
        j: HalfInt,
        #[arg(long, allow_hyphen_values = true)]
        m1: HalfInt,
        #[arg(long, allow_hyphen_values = true)]
        m2: HalfInt,
        #[arg(long, allow_hyphen_values = true)]
        m: HalfInt,
    },
    /// Wigner 6-j symbol {j1 j2 j3; j4 j5 j6}.
    Sixj {
        #[arg(long)]
        j1: HalfInt,
        #[arg(long)]
        j2: HalfInt,
        #[arg(long)]
        j3: HalfInt,
        #[arg(long)]
        j4: HalfInt,
        #[arg(long)]
        j5: HalfInt,
        #[arg(long)]
        j6: HalfInt,
    },
    /// Basis element P^m_n as a normal form or a spin-k matrix.
    Basis {
        #[arg(long)]
        k: Option<HalfInt>,
        #[arg(long)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, value_enum, default_value_t = BasisFormat::Hahn)]
        format: BasisFormat,
        /// Deformation parameter for matrices; a rational "p/q" in exact mode.
        #[arg(long, default_value = "1")]
        eps: String,
        #[arg(long)]
        exact: bool,
    },
    /// Expansion of P^{m1}_{n1} P^{m2}_{n2} in the spin-k representation.
    Product {
        #[arg(long)]
        k: HalfInt,
        #[arg(long)]
        n1: i64,
        #[arg(long, allow_hyphen_values = true)]
        m1: i64,
        #[arg(long)]
        n2: i64,
        #[arg(long, allow_hyphen_values = true)]
        m2: i64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
    },
    /// Run a named verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value = "5")]
        k_max: HalfInt,
        #[arg(long, default_value_t = 4)]
        n_max: i64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisFormat {
    /// Closed form from Hahn polynomials.
    Hahn,
    /// Lowering construction in normal form.
    Normal,
    /// Spin-k matrix.
    Matrix,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    /// Compact JSON on one line.
    Compact,
}

enum Failure {
    Usage(String),
    Checks(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn surd_json(s: &Surd) -> Value {
    json!({ "exact": s, "display": s.to_string(), "value": s.to_f64() })
}

fn matrix_json(a: &CMatrix) -> Value {
    let rows: Vec<Value> = (0..a.nrows())
        .map(|i| Value::Array((0..a.ncols()).map(|j| json!([a[(i, j)].re, a[(i, j)].im])).collect()))
        .collect();
    Value::Array(rows)
}

fn normal_form_json(f: &NormalForm) -> Value {
    json!({ "display": f.render(), "normal_form": f })
}

fn parse_eps(s: &str, exact: bool) -> Result<(f64, Option<BigRational>), Failure> {
    let bad = || Failure::Usage(format!("invalid ε {s:?}"));
    if let Ok(q) = s.parse::<BigRational>() {
        if q == BigRational::from_integer(0.into()) {
            return Err(bad());
        }
        return Ok((ncsphere::surd::rat_to_f64(&q), Some(q)));
    }
    if exact {
        return Err(Failure::Usage(format!("exact mode needs a rational ε, got {s:?}")));
    }
    let v: f64 = s.parse().map_err(|_| bad())?;
    if v == 0.0 || !v.is_finite() {
        return Err(bad());
    }
    Ok((v, None))
}

fn basis(k: Option<HalfInt>, n: i64, m: i64, format: BasisFormat, eps: &str, exact: bool) -> Result<Value, Failure> {
    if n < 0 || m.abs() > n {
        return Err(Error::InvalidLabel { n, m }.into());
    }
    let head = json!({ "n": n, "m": m });
    let mut out = match format {
        BasisFormat::Hahn => normal_form_json(&hahn_pmn(n, m)?),
        BasisFormat::Normal => normal_form_json(&Algebra::sphere().build_pmn(n, m)?),
        BasisFormat::Matrix => {
            let k = k.ok_or_else(|| Failure::Usage("--format matrix needs --k".into()))?;
            let (e, q) = parse_eps(eps, exact)?;
            let mut v = if exact {
                let rep = ExactRep::new(k, q.expect("rational ε"))?;
                let p = rep.pmn_matrix(n, m)?;
                let rows: Vec<Value> = (0..k.dim())
                    .map(|i| Value::Array((0..k.dim()).map(|j| serde_json::to_value(p.get(i, j)).unwrap()).collect()))
                    .collect();
                json!({ "k": k, "epsilon": eps, "exact": true, "matrix": rows, "float": matrix_json(&p.to_float()) })
            } else {
                let rep = make_rep(k, e)?;
                json!({ "k": k, "epsilon": e, "exact": false, "matrix": matrix_json(&rep.pmn_matrix(n, m)?) })
            };
            if n > k.twice() {
                v["warning"] = json!(format!("n = {n} exceeds 2k = {}; the element lies in the quotient", k.twice()));
                v["zero_norm"] = json!(norm_closed_form_k(n, k, e) == 0.0);
            }
            v
        }
    };
    if let (Value::Object(o), Value::Object(h)) = (&mut out, head) {
        for (key, val) in h {
            o.insert(key, val);
        }
    }
    Ok(out)
}

fn run(cmd: Cmd) -> Result<Value, Failure> {
    match cmd {
        Cmd::Cg { j1, j2, j, m1, m2, m } => {
            let v = clebsch_gordan(j1, j2, j, m1, m2, m);
            let mut out = surd_json(&v);
            out["args"] = json!({ "j1": j1, "j2": j2, "j": j, "m1": m1, "m2": m2, "m": m });
            Ok(out)
        }
        Cmd::Sixj { j1, j2, j3, j4, j5, j6 } => {
            let v = wigner_6j(j1, j2, j3, j4, j5, j6);
            let mut out = surd_json(&v);
            out["args"] = json!([[j1, j2, j3], [j4, j5, j6]]);
            Ok(out)
        }
        Cmd::Basis { k, n, m, format, eps, exact } => basis(k, n, m, format, &eps, exact),
        Cmd::Product { k, n1, m1, n2, m2, eps } => {
            let rep = make_rep(k, eps)?;
            let rpt = rep.decompose_product(n1, m1, n2, m2)?;
            let mut v = serde_json::to_value(&rpt).expect("report serialises");
            v["k"] = json!(k);
            v["epsilon"] = json!(eps);
            Ok(v)
        }
        Cmd::Verify { suite, k_max, n_max, tol, seed, exact, format: _ } => {
            let suite: Suite = suite.parse()?;
            let cfg = SuiteConfig { suite, k_max, n_max, tol, seed, exact };
            let rpt = verify::run(&cfg)?;
            let v = serde_json::to_value(&rpt).expect("report serialises");
            if rpt.pass {
                Ok(v)
            } else {
                Err(Failure::Checks(v))
            }
        }
    }
}

fn emit(v: &Value, out: &Option<PathBuf>, compact: bool) -> std::io::Result<()> {
    let text = if compact { v.to_string() } else { serde_json::to_string_pretty(v).expect("json") };
    match out {
        Some(path) => std::fs::write(path, text + "\n"),
        None => writeln!(std::io::stdout().lock(), "{text}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let compact = matches!(cli.cmd, Cmd::Verify { format: ReportFormat::Compact, .. });
    let (value, code) = match run(cli.cmd) {
        Ok(v) => (v, 0),
        Err(Failure::Checks(v)) => (v, 1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&value, &cli.out, compact) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
