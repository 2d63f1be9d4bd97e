use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sonda::catalog::{find_op, fun_real_pair, real_pair, Oracle, CATALOG};
use sonda::cfun::{apply, Domain};
use sonda::complexity::{builtin_function, builtin_predicate, exist2, power2, qbf2, sat2, table_predicate, Caps, BUILTIN_PREDICATES};
use sonda::encoding::unary;
use sonda::ivp::lip_ivp;
use sonda::names::{strip_padding, Name};
use sonda::sets::{convex_hull, parse_exact_set, set_from_exact, set_query, HullOptions};
use sonda::sopoly::MeteredOutcome;
use sonda::{decode_dyadic, parse_expr, Dyadic, Expr, PredName, RealName, SecondOrderPolynomial, SizeFn, SondaError};

const EXPR_HELP: &str = "Expressions: numbers (3, 0.25, 3/4, or a dyadic string like +11/100), \
t, y (x is an alias for t), + - *, unary -, sin(e), exp01(e) (exp on [0,1], argument clamped). \
A fraction a/b needs b to be a power of two.";

const FORMULA_HELP: &str = "Formulas: variables a1, a2, ..., constants 0 1, ! & | (or ¬ ∧ ∨), \
p(e1, ..., ek) queries the predicate on the concatenated argument bits, \
quantifiers A a1. / E a1. (or ∀a1. / ∃a1.). Free variables are read existentially.";

#[derive(Parser)]
#[command(name = "sonda", version, about = "Exact real computation over regular string functions")]
struct Cli {
    /// Also print a lossy decimal rendering of dyadic results.
    #[arg(long, global = true)]
    decimal: bool,
    /// Print `n cost bound` lines for metered operations.
    #[arg(long, global = true)]
    meter: bool,
    /// Worker threads for the hull scan (1 disables parallelism).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Overrides the precision caps of the hull and the exhaustive searches.
    #[arg(long, global = true, env = "SONDA_MAX_PREC")]
    max_prec: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Real numbers.
    #[command(subcommand)]
    Real(RealCmd),
    /// Continuous functions on [0,1] or [0,1]x[-1,1].
    #[command(subcommand)]
    Cfun(CfunCmd),
    /// The initial value problem h' = g(t, h), h(0) = 0 on [0,1].
    #[command(subcommand)]
    Ivp(IvpCmd),
    /// Closed subsets of the unit square.
    #[command(subcommand)]
    Set(SetCmd),
    /// Second-order polynomials.
    #[command(subcommand)]
    Sopoly(SopolyCmd),
    /// Complete problems, decided by exhaustive search.
    #[command(subcommand)]
    Cx(CxCmd),
    /// Run a catalog operator under the cost meter for a range of precisions.
    Meter(MeterArgs),
    /// Run the acceptance suite.
    Selftest {
        /// Criterion numbers to run (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(Subcommand)]
enum RealCmd {
    /// Approximate a closed expression to within 2^-prec.
    #[command(after_help = EXPR_HELP)]
    Eval {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        prec: u64,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum DomainArg {
    Unit,
    Rect,
}

#[derive(Subcommand)]
enum CfunCmd {
    /// Approximate f(t) or f(t, y) to within 2^-prec.
    #[command(after_help = EXPR_HELP)]
    Eval {
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value = "unit")]
        domain: DomainArg,
        #[arg(long)]
        prec: u64,
        /// The point, as `t` or `t,y` dyadic strings or numbers.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Print the modulus of continuity mu(prec).
    #[command(after_help = EXPR_HELP)]
    Modulus {
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value = "unit")]
        domain: DomainArg,
        #[arg(long)]
        prec: u64,
    },
    /// Approximate f(x) for a closed real expression x.
    #[command(after_help = EXPR_HELP)]
    Apply {
        #[arg(long)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        prec: u64,
    },
}

#[derive(Subcommand)]
enum IvpCmd {
    /// Approximate h(at) to within 2^-prec with the Euler scheme.
    #[command(after_help = EXPR_HELP)]
    Solve {
        /// Right-hand side g(t, y).
        #[arg(long)]
        rhs: String,
        /// Lipschitz constant in y (default: derived from the expression).
        #[arg(long)]
        lipschitz: Option<u32>,
        #[arg(long)]
        prec: u64,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
}

#[derive(Args)]
struct SetArgs {
    /// Point file: one point per line as two dyadic strings; `#` comments;
    /// a `polygon` line makes it a filled polygon.
    #[arg(long)]
    set: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    u: String,
    #[arg(long, allow_hyphen_values = true)]
    v: String,
    #[arg(long)]
    prec: u64,
}

#[derive(Subcommand)]
enum SetCmd {
    /// Answer the gap query of the set at (u, v).
    Query(SetArgs),
    /// Answer the gap query of the convex hull at (u, v).
    Hull(SetArgs),
}

#[derive(Subcommand)]
enum SopolyCmd {
    /// Evaluate P(L, n).
    Eval {
        #[arg(long)]
        poly: String,
        /// id, square, const:k, or table:FILE (whitespace-separated values L(0), L(1), ...).
        #[arg(long)]
        size: String,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Subcommand)]
#[command(after_help = FORMULA_HELP)]
enum CxCmd {
    /// Is there v with |v| = n and p(<u, v>)?
    Exist {
        #[arg(long)]
        pred: String,
        #[arg(long, default_value = "")]
        u: String,
        #[arg(long)]
        n: usize,
    },
    /// Satisfiability of a formula over p.
    #[command(after_help = FORMULA_HELP)]
    Sat {
        #[arg(long)]
        pred: String,
        #[arg(long)]
        formula: String,
    },
    /// Truth of a quantified formula over p.
    #[command(after_help = FORMULA_HELP)]
    Qbf {
        #[arg(long)]
        pred: String,
        #[arg(long)]
        formula: String,
    },
    /// Does f iterated 2^|u| times send u to 0^|u|?
    Power {
        /// builtin:id|zero|inc|dec
        #[arg(long)]
        fun: String,
        #[arg(long, default_value = "")]
        u: String,
    },
}

#[derive(Args)]
struct MeterArgs {
    /// Operator name (see --list).
    #[arg(long, required_unless_present = "list")]
    op: Option<String>,
    /// List the operators and their declared bounds.
    #[arg(long)]
    list: bool,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    x: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    y: String,
    /// Function for `apply`.
    #[arg(long, default_value = "t")]
    fun: String,
    /// Integer-part bits of the input names.
    #[arg(long)]
    bound: Option<u32>,
    /// Extra fractional bits in the input names' answers.
    #[arg(long, default_value_t = 2)]
    slack: u64,
    #[arg(long, default_value_t = 0)]
    from: u64,
    #[arg(long, default_value_t = 16)]
    to: u64,
}

enum Failure {
    Usage(String),
    Fault(SondaError),
    Failed(String),
}

impl From<SondaError> for Failure {
    fn from(e: SondaError) -> Self {
        match e {
            SondaError::Parse { .. } | SondaError::OutOfDomain(_) | SondaError::EmptySet | SondaError::MalformedDyadic(_) => {
                Failure::Usage(e.to_string())
            }
            e => Failure::Fault(e),
        }
    }
}

type Out = Result<Vec<String>, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// A point coordinate: a dyadic string, or a number in expression syntax.
fn coordinate(s: &str) -> Result<Dyadic, Failure> {
    let s = s.trim();
    if s.contains('/') && (s.starts_with('+') || s.starts_with('-')) && s.bytes().skip(1).all(|b| matches!(b, b'0' | b'1' | b'/')) {
        return Ok(decode_dyadic(s)?);
    }
    parse_expr(s)?
        .eval_exact(&[])
        .ok_or_else(|| usage(format!("{s:?} is not a dyadic number")))
}

fn render(d: &Dyadic, prec: u64, decimal: bool, out: &mut Vec<String>) {
    out.push(d.encode());
    if decimal {
        let digits = (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
        out.push(format!("~ {} (decimal, lossy)", d.to_decimal(digits)));
    }
}

fn meter_line(n: u64, m: &MeteredOutcome) -> String {
    match m.bound {
        Some(b) => format!("{n} {} {b}", m.cost),
        None => format!("{n} {} -", m.cost),
    }
}

/// The catalog operator and oracle for the top node of a real expression.
fn metered_top(e: &Expr) -> Result<Option<(&'static str, Name)>, Failure> {
    let r = |e: &Expr| e.real_name().map_err(Failure::from);
    Ok(match e {
        Expr::Add(a, b) => Some(("real_add", real_pair(&r(a)?, &r(b)?))),
        Expr::Mul(a, b) => Some(("real_mul", real_pair(&r(a)?, &r(b)?))),
        Expr::Neg(a) => Some(("real_neg", r(a)?.name().clone())),
        Expr::Exp01(a) => Some(("exp01", r(a)?.name().clone())),
        Expr::Sin(a) => Some(("sin", r(a)?.name().clone())),
        _ => None,
    })
}

fn domain(d: DomainArg) -> Domain {
    match d {
        DomainArg::Unit => Domain::Unit,
        DomainArg::Rect => Domain::Rect,
    }
}

fn predicate(arg: &str) -> Result<PredName, Failure> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        builtin_predicate(name).ok_or_else(|| usage(format!("unknown predicate {name:?}; builtins: {}", BUILTIN_PREDICATES.join(", "))))
    } else if let Some(path) = arg.strip_prefix("table:") {
        Ok(table_predicate(&read_file(&PathBuf::from(path))?)?)
    } else {
        Err(usage(format!("--pred must be builtin:NAME or table:FILE, got {arg:?}")))
    }
}

fn bits(u: &str) -> Result<&str, Failure> {
    if u.bytes().all(|b| b == b'0' || b == b'1') {
        Ok(u)
    } else {
        Err(usage(format!("{u:?} is not a bit string")))
    }
}

fn size_fn(arg: &str) -> Result<SizeFn, Failure> {
    Ok(match arg {
        "id" => SizeFn::identity(),
        "square" => SizeFn::square(),
        _ => {
            if let Some(k) = arg.strip_prefix("const:") {
                SizeFn::constant(k.parse().map_err(|_| usage(format!("bad constant in {arg:?}")))?)
            } else if let Some(path) = arg.strip_prefix("table:") {
                let values = read_file(&PathBuf::from(path))?
                    .split_whitespace()
                    .map(|w| w.parse::<usize>().map_err(|_| usage(format!("bad table entry {w:?}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if values.is_empty() {
                    return Err(usage("empty size table"));
                }
                SizeFn::from_table(values)
            } else {
                return Err(usage(format!("--size must be id, square, const:k or table:FILE, got {arg:?}")));
            }
        }
    })
}

fn real_input(v: &Dyadic, bound: Option<u32>, slack: u64) -> RealName {
    let need = (v.magnitude_bits() + 1).max(1) as u32;
    let v = v.clone();
    RealName::from_approx(bound.unwrap_or(need).max(need), slack, move |i| Ok(v.round_to(i + slack)))
}

fn run(cli: Cli) -> Out {
    let mut out = Vec::new();
    let caps = match cli.max_prec {
        Some(c) => Caps {
            exist_len: c as usize,
            power_len: c as usize,
            ..Caps::default()
        },
        None => Caps::default(),
    };
    match cli.cmd {
        Cmd::Real(RealCmd::Eval { expr, prec }) => {
            let e = parse_expr(&expr)?;
            if e.uses_t() || e.uses_y() {
                return Err(usage("a real expression cannot mention t or y"));
            }
            let x = e.real_name()?;
            let a = x.name().query(&unary(prec as usize))?;
            render(&decode_dyadic(strip_padding(&a))?, prec, cli.decimal, &mut out);
            if cli.meter {
                if let Some((op, oracle)) = metered_top(&e)? {
                    let op = find_op(op).expect("catalog operator");
                    out.push(meter_line(prec, &op.run(&oracle, prec)?));
                }
            }
        }
        Cmd::Cfun(CfunCmd::Eval { expr, domain: d, prec, at }) => {
            let f = parse_expr(&expr)?.to_cfun(domain(d))?;
            let pts = at.split(',').map(coordinate).collect::<Result<Vec<_>, _>>()?;
            if pts.len() != f.domain().dim() {
                return Err(usage(format!("--at needs {} coordinates", f.domain().dim())));
            }
            let inside = f.domain().clamp(&pts) == pts;
            if !inside {
                return Err(usage(format!("{at} is outside the domain")));
            }
            render(&f.approx(prec, &pts)?, prec, cli.decimal, &mut out);
        }
        Cmd::Cfun(CfunCmd::Modulus { expr, domain: d, prec }) => {
            let f = parse_expr(&expr)?.to_cfun(domain(d))?;
            out.push(f.modulus(prec as usize)?.to_string());
        }
        Cmd::Cfun(CfunCmd::Apply { expr, x, prec }) => {
            let f = parse_expr(&expr)?.to_cfun(Domain::Unit)?;
            let xe = parse_expr(&x)?;
            if xe.uses_t() || xe.uses_y() {
                return Err(usage("--x must be a closed expression"));
            }
            let xr = xe.real_name()?;
            let y = apply(&f, &xr)?;
            render(&y.approx(prec)?, prec, cli.decimal, &mut out);
            if cli.meter {
                let op = find_op("apply").expect("catalog operator");
                out.push(meter_line(prec, &op.run(&fun_real_pair(&f, &xr), prec)?));
            }
        }
        Cmd::Ivp(IvpCmd::Solve { rhs, lipschitz, prec, at }) => {
            let g = parse_expr(&rhs)?.to_lip(lipschitz)?;
            let ivp = lip_ivp(&g)?;
            let t = coordinate(&at)?;
            if t.is_negative() || t > Dyadic::one() {
                return Err(usage(format!("--at {at} is outside [0,1]")));
            }
            let run = ivp.solve(prec, &t)?;
            render(&run.value, prec, cli.decimal, &mut out);
            out.push(format!("error_bound 2^-{prec} steps 2^{}", ivp.schedule(prec)?.p));
        }
        Cmd::Set(cmd) => {
            let (a, hull) = match cmd {
                SetCmd::Query(a) => (a, false),
                SetCmd::Hull(a) => (a, true),
            };
            let s = set_from_exact(&parse_exact_set(&read_file(&a.set)?)?)?;
            let (u, v) = (coordinate(&a.u)?, coordinate(&a.v)?);
            let name = if hull {
                let opts = HullOptions {
                    max_prec: cli.max_prec.unwrap_or(HullOptions::default().max_prec),
                    parallel: cli.jobs > 1,
                };
                convex_hull(&s, opts)
            } else {
                s
            };
            out.push(if set_query(&name, &u, &v, a.prec)? { "1" } else { "0" }.into());
        }
        Cmd::Sopoly(SopolyCmd::Eval { poly, size, n }) => {
            let p = SecondOrderPolynomial::parse(&poly)?;
            out.push(p.eval(&size_fn(&size)?, n).to_string());
        }
        Cmd::Cx(cmd) => {
            let answer = match cmd {
                CxCmd::Exist { pred, u, n } => exist2(&predicate(&pred)?, bits(&u)?, n, &caps)?,
                CxCmd::Sat { pred, formula } => sat2(&predicate(&pred)?, &formula, &caps)?,
                CxCmd::Qbf { pred, formula } => qbf2(&predicate(&pred)?, &formula, &caps)?,
                CxCmd::Power { fun, u } => {
                    let name = fun
                        .strip_prefix("builtin:")
                        .and_then(builtin_function)
                        .ok_or_else(|| usage(format!("--fun must be builtin:id|zero|inc|dec, got {fun:?}")))?;
                    power2(&name, bits(&u)?, &caps)?
                }
            };
            out.push(if answer { "1" } else { "0" }.into());
        }
        Cmd::Meter(m) => {
            if m.list {
                for op in CATALOG {
                    out.push(format!("{} {}", op.name, op.bound));
                }
                return Ok(out);
            }
            let name = m.op.expect("required by clap");
            let op = find_op(&name).ok_or_else(|| {
                let all: Vec<&str> = CATALOG.iter().map(|o| o.name).collect();
                usage(format!("unknown operator {name:?}; one of {}", all.join(", ")))
            })?;
            let x = real_input(&coordinate(&m.x)?, m.bound, m.slack);
            let oracle = match op.oracle {
                Oracle::Real => x.name().clone(),
                Oracle::RealPair => real_pair(&x, &real_input(&coordinate(&m.y)?, m.bound, m.slack)),
                Oracle::FunReal => fun_real_pair(&parse_expr(&m.fun)?.to_cfun(Domain::Unit)?, &x),
            };
            for n in m.from..=m.to {
                out.push(meter_line(n, &op.run(&oracle, n)?));
            }
        }
        Cmd::Selftest { only } => {
            let mut stdout = std::io::stdout().lock();
            let outcomes = sonda_acceptance::run_criteria(&only, |o| {
                let _ = writeln!(stdout, "{o}");
                let _ = stdout.flush();
            });
            if outcomes.iter().any(|o| !o.pass) {
                return Err(Failure::Failed("acceptance criteria failed".into()));
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 1 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match run(cli) {
        Ok(lines) => {
            let mut stdout = std::io::stdout().lock();
            for l in lines {
                let _ = writeln!(stdout, "{l}");
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("sonda: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Fault(e)) => {
            eprintln!("sonda: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("sonda: {msg}");
            ExitCode::from(1)
        }
    }
}
