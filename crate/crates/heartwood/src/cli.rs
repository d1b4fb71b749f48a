//! The `heartwood` command line.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heartwood_core::approx::{self, Cell};
use heartwood_core::heart::{self, Check, QkStatus};
use heartwood_core::lamination::{self, DualMembership};
use heartwood_core::suspension::{self, BallTree, IsometryKind};
use heartwood_core::system::ProbeVerdict;
use heartwood_core::{catalog, Field, InfiniteWord, IsometrySystem, Scalar, Subtree, TreePoint, Word};
use serde_json::{json, Value};

use crate::format::{self, point_json, scalar_json, subtree_json, FormatError};

pub const SCHEMA: &str = "heartwood/1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] heartwood_core::Error),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 for bad input, 3 for an exhausted budget, 4 for a broken invariant.
    pub fn exit_code(&self) -> i32 {
        let core = match self {
            CliError::Core(e) => e,
            CliError::Format(FormatError::Model { source, .. }) => source,
            _ => return 2,
        };
        match core {
            heartwood_core::Error::Resource { .. } => 3,
            heartwood_core::Error::Invariant(_) => 4,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "heartwood", version, about = "Systems of partial isometries on finite trees")]
pub struct Cli {
    /// Scalar field for command-line numbers: `rational` or `quad:d`.
    #[arg(long, global = true)]
    pub scalar: Option<String>,
    /// Largest number of tree copies (or enumerated words) a command may build.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SystemArg {
    /// A bundled name (SYS-GOLD, ...), a system JSON file, or `-` for stdin.
    pub system: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a system from interval data.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Check a system and report its regime.
    Validate {
        #[command(flatten)]
        sys: SystemArg,
        /// Also write the system back as DOT.
        #[arg(long)]
        dot: bool,
    },
    /// Domain of a word.
    Dom {
        #[command(flatten)]
        sys: SystemArg,
        word: String,
    },
    /// Number of admissible words of each length.
    AdmCount {
        #[command(flatten)]
        sys: SystemArg,
        n: usize,
        #[arg(long)]
        positive: bool,
    },
    /// Words of length at most `n` surviving `k` rounds of chopping.
    Laminary {
        #[command(flatten)]
        sys: SystemArg,
        n: usize,
        k: usize,
        #[arg(long)]
        positive: bool,
    },
    /// Search for a short cyclic extension of a word.
    DualMember {
        #[command(flatten)]
        sys: SystemArg,
        word: String,
        /// Threshold for the translation length (defaults to half the smallest bridge gap).
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, default_value_t = 10)]
        search_len: usize,
    },
    /// Unit-cylinder leaves of depth `n`.
    Leaves {
        #[command(flatten)]
        sys: SystemArg,
        n: usize,
        /// Also check closure under diagonals with this lookahead.
        #[arg(long)]
        diagonals: Option<usize>,
    },
    /// A ball of the suspension tree.
    Ball {
        #[command(flatten)]
        sys: SystemArg,
        #[arg(long)]
        radius: Option<usize>,
        /// Build the prefix closure of these words instead of a radius ball.
        #[arg(long = "word")]
        words: Vec<String>,
        #[arg(long, value_enum, default_value_t = BallFormat::Json)]
        format: BallFormat,
    },
    /// Translation length of a word with its witness.
    Translen {
        #[command(flatten)]
        sys: SystemArg,
        word: String,
    },
    /// Evaluate `Q_K` on an infinite word at finite depth.
    Qk {
        #[command(flatten)]
        sys: SystemArg,
        #[command(flatten)]
        x: InfiniteArg,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Pieces of the depth-`n` limit set.
    LimitSet {
        #[command(flatten)]
        sys: SystemArg,
        n: usize,
    },
    /// Convex hull of the depth-`n` limit set.
    Heart {
        #[command(flatten)]
        sys: SystemArg,
        n: usize,
    },
    /// Compare the system on K with a subtree K′.
    Audit {
        #[command(flatten)]
        sys: SystemArg,
        #[command(flatten)]
        kprime: SubtreeArg,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        search_len: usize,
    },
    /// Extremal and branch point counts of the heart at each depth.
    GeomProbe {
        #[command(flatten)]
        sys: SystemArg,
        n: usize,
    },
    /// Look for an admissible word fixing a nondegenerate domain.
    IndepProbe {
        #[command(flatten)]
        sys: SystemArg,
        depth: usize,
        #[arg(long, default_value_t = 100_000)]
        width: usize,
    },
    /// Translation lengths over nested subtrees.
    Approx {
        #[command(flatten)]
        sys: SystemArg,
        /// A stage `lo,hi` on a segment system; repeat in increasing order.
        #[arg(long = "stage")]
        stages: Vec<String>,
        /// A stage as a JSON array of points; repeat in increasing order.
        #[arg(long = "stage-points")]
        stage_points: Vec<String>,
        /// Stages as hulls of the first m orbit points of vertex 0, e.g. `3,5,8`.
        #[arg(long)]
        orbit: Option<String>,
        /// Comma-separated words for the table.
        #[arg(long)]
        words: Option<String>,
        /// Use every rotation class up to this length instead of `--words`.
        #[arg(long, default_value_t = 4)]
        word_len: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Interval exchange on `[0, L]`.
    Iet {
        /// Comma-separated subinterval lengths.
        #[arg(long)]
        lengths: String,
        /// Comma-separated 1-based positions after the exchange.
        #[arg(long)]
        perm: String,
        /// Total length (defaults to the sum).
        #[arg(long)]
        total: Option<String>,
        #[arg(long)]
        names: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Interval translation mapping on `[0, L]`.
    Itm {
        #[arg(long)]
        length: String,
        /// `name,lo,hi,shift`; repeat for each piece.
        #[arg(long = "piece")]
        pieces: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct InfiniteArg {
    /// `X = W W W ...`
    #[arg(long)]
    pub periodic: Option<String>,
    /// `X` is the Fibonacci word in the first two generators.
    #[arg(long)]
    pub fib: bool,
    /// Letters placed in front of `X`.
    #[arg(long)]
    pub prefix: Option<String>,
}

#[derive(Debug, Args)]
pub struct SubtreeArg {
    /// `lo,hi` on a segment system.
    #[arg(long)]
    pub interval: Option<String>,
    /// JSON array of points whose hull is the subtree.
    #[arg(long)]
    pub points: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BallFormat {
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
    Json,
}

struct Ctx {
    field: Option<Field>,
    budget: Option<u64>,
    json: bool,
}

fn parse_field_flag(s: &str) -> Result<Field> {
    if s == "rational" {
        return Ok(Field::Rational);
    }
    match s.strip_prefix("quad:").map(str::parse::<u32>) {
        Some(Ok(d)) => Ok(Field::quadratic(d)?),
        _ => Err(usage(format!("--scalar must be 'rational' or 'quad:d', got '{s}'"))),
    }
}

impl Ctx {
    fn field(&self) -> Field {
        self.field.unwrap_or(Field::Rational)
    }

    fn scalar(&self, s: &str) -> Result<Scalar> {
        Ok(Scalar::parse_in(s, self.field())?)
    }

    fn scalars(&self, s: &str) -> Result<Vec<Scalar>> {
        s.split(',').map(|x| self.scalar(x.trim())).collect()
    }

    fn system(&self, arg: &SystemArg) -> Result<IsometrySystem> {
        let sys = match catalog::by_name(&arg.system) {
            Some(s) => s,
            None => {
                let text = if arg.system == "-" {
                    std::io::read_to_string(std::io::stdin()).map_err(|e| CliError::Io {
                        path: "stdin".into(),
                        source: e,
                    })?
                } else {
                    std::fs::read_to_string(&arg.system).map_err(|e| CliError::Io {
                        path: arg.system.clone(),
                        source: e,
                    })?
                };
                format::parse_system(&text)?
            }
        };
        if let Some(f) = self.field {
            let have = sys.tree().field();
            if have != Field::Rational && have != f {
                return Err(usage(format!("--scalar {f} does not match the system's field {have}")));
            }
        }
        Ok(sys)
    }

    /// The system's field for parsing scalars, unless `--scalar` names one.
    fn for_system(&self, sys: &IsometrySystem) -> Ctx {
        Ctx {
            field: Some(self.field.unwrap_or(sys.tree().field())),
            budget: self.budget,
            json: self.json,
        }
    }
}

fn word(sys: &IsometrySystem, s: &str) -> Result<Word> {
    Ok(sys.alphabet().parse_word(s)?)
}

fn fmt_word(sys: &IsometrySystem, w: &Word) -> String {
    sys.alphabet().format(w)
}

fn fmt_subtree(s: &Subtree) -> String {
    if s.is_empty() {
        return "∅".into();
    }
    let pts: Vec<String> = s.extremals().iter().map(|p| p.to_string()).collect();
    format!("[{}]", pts.join(", "))
}

fn subtree_report(sys: &IsometrySystem, s: &Subtree) -> Value {
    json!({
        "empty": s.is_empty(),
        "extremals": subtree_json(s),
        "diameter": scalar_json(&sys.tree().diameter(s)),
    })
}

fn report(kind: &str, body: Value) -> Value {
    let mut v = json!({"schema": SCHEMA, "report": kind});
    if let Value::Object(m) = body {
        for (k, x) in m {
            v[k] = x;
        }
    }
    v
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn subtree_from(ctx: &Ctx, sys: &IsometrySystem, arg: &SubtreeArg) -> Result<Subtree> {
    let t = sys.tree();
    match (&arg.interval, &arg.points) {
        (Some(_), Some(_)) => Err(usage("give either --interval or --points")),
        (Some(iv), None) => interval_subtree(ctx, sys, iv),
        (None, Some(p)) => points_subtree(sys, p),
        (None, None) => Ok(t.whole()),
    }
}

fn interval_subtree(ctx: &Ctx, sys: &IsometrySystem, iv: &str) -> Result<Subtree> {
    let t = sys.tree();
    if t.vertex_count() != 2 {
        return Err(usage("interval coordinates need a segment system; use points"));
    }
    let xs = ctx.scalars(iv)?;
    if xs.len() != 2 {
        return Err(usage(format!("an interval is 'lo,hi', got '{iv}'")));
    }
    let pts = xs
        .iter()
        .map(|x| catalog::interval_point(t, x))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(t.convex_hull(&pts)?)
}

fn points_subtree(sys: &IsometrySystem, text: &str) -> Result<Subtree> {
    let t = sys.tree();
    let v = format::parse_json(text)?;
    let arr = v
        .as_array()
        .ok_or_else(|| usage("points must be a JSON array"))?;
    let pts = arr
        .iter()
        .enumerate()
        .map(|(i, p)| format::parse_point(p, t, &format!("$[{i}]")))
        .collect::<std::result::Result<Vec<TreePoint>, _>>()?;
    Ok(t.convex_hull(&pts)?)
}

fn write_out(output: &Option<PathBuf>, text: String) -> Result<String> {
    match output {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io {
                path: p.display().to_string(),
                source: e,
            })?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Runs one command and returns what it prints.
pub fn run(cli: Cli) -> Result<String> {
    let ctx = Ctx {
        field: cli.scalar.as_deref().map(parse_field_flag).transpose()?,
        budget: cli.budget,
        json: cli.json,
    };
    match &cli.command {
        Command::Gen(g) => gen(&ctx, g),
        Command::Validate { sys, dot } => validate(&ctx, &ctx.system(sys)?, *dot),
        Command::Dom { sys, word: w } => {
            let s = ctx.system(sys)?;
            let w = word(&s, w)?;
            let d = s.dom(&w);
            if ctx.json {
                let mut body = subtree_report(&s, &d);
                body["word"] = json!(fmt_word(&s, &w));
                body["admissible"] = json!(!d.is_empty());
                return Ok(pretty(&report("dom", body)));
            }
            Ok(format!(
                "dom({}) = {}\ndiameter {}\n",
                fmt_word(&s, &w),
                fmt_subtree(&d),
                s.tree().diameter(&d)
            ))
        }
        Command::AdmCount { sys, n, positive } => {
            let s = ctx.system(sys)?;
            let counts = lamination::admissible_counts(&s, *n, *positive);
            if ctx.json {
                return Ok(pretty(&report(
                    "adm-count",
                    json!({"n": n, "positive_only": positive, "counts": counts}),
                )));
            }
            Ok(counts
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| format!("{i}\t{c}\n"))
                .collect())
        }
        Command::Laminary { sys, n, k, positive } => {
            let s = ctx.system(sys)?;
            let slice = lamination::laminary_closure(&s, *n, *k, *positive, ctx.budget)?;
            let words: Vec<String> = slice.words().iter().map(|w| fmt_word(&s, w)).collect();
            if ctx.json {
                return Ok(pretty(&report(
                    "laminary",
                    json!({
                        "n": n,
                        "k": k,
                        "positive_only": positive,
                        "words": words,
                        "counts_by_k": slice.counts_by_k,
                        "stable_from": slice.stable_from,
                        "flags": {"finite_depth": true, "stable": slice.is_stable()},
                    }),
                )));
            }
            Ok(words.iter().map(|w| format!("{w}\n")).collect())
        }
        Command::DualMember { sys, word: w, eps, search_len } => {
            let s = ctx.system(sys)?;
            let c = ctx.for_system(&s);
            let v = word(&s, w)?;
            let eps = match eps {
                Some(e) => c.scalar(e)?,
                None => heart::default_epsilon(&s)?,
            };
            let ans = lamination::dual_membership(&s, &v, &eps, *search_len)?;
            let body = match &ans {
                DualMembership::Yes { u, w, length } => json!({
                    "answer": "YES",
                    "u": fmt_word(&s, u),
                    "w": fmt_word(&s, w),
                    "length": scalar_json(length),
                }),
                DualMembership::NoWitness { candidates } => json!({
                    "answer": "NO_WITNESS",
                    "candidates": candidates,
                }),
            };
            if ctx.json {
                let mut body = body;
                body["word"] = json!(fmt_word(&s, &v));
                body["epsilon"] = scalar_json(&eps);
                body["search_len"] = json!(search_len);
                return Ok(pretty(&report("dual-member", body)));
            }
            Ok(match ans {
                DualMembership::Yes { u, w, length } => format!(
                    "YES u={} w={} length={length} (eps {eps})\n",
                    fmt_word(&s, &u),
                    fmt_word(&s, &w)
                ),
                DualMembership::NoWitness { candidates } => {
                    format!("NO_WITNESS after {candidates} candidates up to length {search_len}\n")
                }
            })
        }
        Command::Leaves { sys, n, diagonals } => {
            let s = ctx.system(sys)?;
            let leaves = lamination::unit_cylinder_leaves(&s, *n)?;
            let diag = diagonals
                .map(|la| lamination::diagonal_closure_check(&s, &leaves, la))
                .transpose()?;
            if ctx.json {
                let ls: Vec<Value> = leaves
                    .iter()
                    .map(|l| json!({"x": fmt_word(&s, &l.x), "y": fmt_word(&s, &l.y), "domain": subtree_json(&l.domain)}))
                    .collect();
                let mut body = json!({"n": n, "leaves": ls});
                if let Some(d) = &diag {
                    body["diagonals"] = json!({
                        "lookahead": d.lookahead,
                        "chains_checked": d.chains_checked,
                        "violations": d.violations.iter().map(|v| [fmt_word(&s, &v.p), fmt_word(&s, &v.s), fmt_word(&s, &v.r)]).collect::<Vec<_>>(),
                    });
                }
                return Ok(pretty(&report("leaves", body)));
            }
            let mut out: String = leaves
                .iter()
                .map(|l| format!("{}\t{}\t{}\n", fmt_word(&s, &l.x), fmt_word(&s, &l.y), fmt_subtree(&l.domain)))
                .collect();
            if let Some(d) = diag {
                out.push_str(&format!(
                    "diagonals: {} chains, {} violations (lookahead {})\n",
                    d.chains_checked,
                    d.violations.len(),
                    d.lookahead
                ));
            }
            Ok(out)
        }
        Command::Ball { sys, radius, words, format: f } => {
            let s = ctx.system(sys)?;
            let ball = match (radius, words.is_empty()) {
                (Some(r), true) => BallTree::build(&s, *r, ctx.budget)?,
                (None, false) => {
                    let ws = words.iter().map(|w| word(&s, w)).collect::<Result<Vec<_>>>()?;
                    BallTree::build_words(&s, &ws, ctx.budget)?
                }
                _ => return Err(usage("give exactly one of --radius or --word")),
            };
            Ok(match f {
                BallFormat::Dot => format::ball_dot(&ball),
                BallFormat::Json => pretty(&format::ball_json(&ball)),
            })
        }
        Command::Translen { sys, word: w } => {
            let s = ctx.system(sys)?;
            let w = word(&s, w)?;
            translen(&ctx, &s, &w)
        }
        Command::Qk { sys, x, depth } => {
            let s = ctx.system(sys)?;
            let xw = infinite(&s, x)?;
            qk(&ctx, &s, &xw, *depth)
        }
        Command::LimitSet { sys, n } => {
            let s = ctx.system(sys)?;
            let ls = heart::limit_set_approx(&s, *n)?;
            if ctx.json {
                let pieces: Vec<Value> = ls.pieces.iter().map(|p| subtree_report(&s, p)).collect();
                return Ok(pretty(&report(
                    "limit-set",
                    json!({"depth": n, "leaves": ls.leaves, "pieces": pieces}),
                )));
            }
            let mut out = format!("depth {n}: {} leaves, {} pieces\n", ls.leaves, ls.pieces.len());
            for p in &ls.pieces {
                out.push_str(&format!("{}\n", fmt_subtree(p)));
            }
            Ok(out)
        }
        Command::Heart { sys, n } => {
            let s = ctx.system(sys)?;
            let h = heart::heart_approx(&s, *n)?;
            if ctx.json {
                let mut body = subtree_report(&s, &h.hull);
                body["depth"] = json!(n);
                return Ok(pretty(&report("heart", body)));
            }
            Ok(format!(
                "heart at depth {n}: {}\ndiameter {}\n",
                fmt_subtree(&h.hull),
                s.tree().diameter(&h.hull)
            ))
        }
        Command::Audit { sys, kprime, n, k, search_len } => {
            let s = ctx.system(sys)?;
            let c = ctx.for_system(&s);
            let kp = subtree_from(&c, &s, kprime)?;
            audit(&ctx, &s, &kp, *n, *k, *search_len)
        }
        Command::GeomProbe { sys, n } => {
            let s = ctx.system(sys)?;
            let p = heart::geometric_probe(&s, *n)?;
            if ctx.json {
                let rows: Vec<Value> = p
                    .rows
                    .iter()
                    .map(|r| json!({"depth": r.depth, "extremal_points": r.extremal_points, "branch_points": r.branch_points, "empty": r.empty}))
                    .collect();
                return Ok(pretty(&report(
                    "geom-probe",
                    json!({"rows": rows, "stable_from": p.stable_from, "stabilizes": p.stabilizes()}),
                )));
            }
            let mut out = String::from("depth\textremal\tbranch\n");
            for r in &p.rows {
                out.push_str(&format!("{}\t{}\t{}\n", r.depth, r.extremal_points, r.branch_points));
            }
            out.push_str(&format!(
                "{} from depth {}\n",
                if p.stabilizes() { "stable" } else { "not yet stable" },
                p.stable_from
            ));
            Ok(out)
        }
        Command::IndepProbe { sys, depth, width } => {
            let s = ctx.system(sys)?;
            let r = s.independent_generators_probe(*depth, *width)?;
            let (verdict, detail) = match &r.verdict {
                ProbeVerdict::Fails { word, domain, diameter } => (
                    "FAILS",
                    json!({"word": fmt_word(&s, word), "domain": subtree_json(domain), "diameter": scalar_json(diameter)}),
                ),
                ProbeVerdict::Undecided { max_diameter } => {
                    ("UNDECIDED", json!({"max_diameter": scalar_json(max_diameter)}))
                }
            };
            if ctx.json {
                return Ok(pretty(&report(
                    "indep-probe",
                    json!({
                        "depth": depth,
                        "verdict": verdict,
                        "certificate": detail,
                        "max_diameter": scalar_json(&r.max_diameter),
                        "widest": r.widest.as_ref().map(|w| fmt_word(&s, w)),
                        "survivors": r.survivors,
                        "truncated": r.truncated,
                    }),
                )));
            }
            Ok(match &r.verdict {
                ProbeVerdict::Fails { word, domain, .. } => format!(
                    "FAILS: {} fixes {} pointwise\n",
                    fmt_word(&s, word),
                    fmt_subtree(domain)
                ),
                ProbeVerdict::Undecided { max_diameter } => format!(
                    "UNDECIDED: widest domain at depth {depth} has diameter {max_diameter}{}\n",
                    if r.truncated { " (levels truncated)" } else { "" }
                ),
            })
        }
        Command::Approx {
            sys,
            stages,
            stage_points,
            orbit,
            words,
            word_len,
            format: f,
        } => {
            let s = ctx.system(sys)?;
            let c = ctx.for_system(&s);
            let subtrees = approx_stages(&c, &s, stages, stage_points, orbit.as_deref())?;
            let seq = approx::build_sequence(&s, &subtrees)?;
            let ws = match words {
                Some(ws) => ws.split(',').map(|w| word(&s, w.trim())).collect::<Result<Vec<_>>>()?,
                None => heart::cyclic_classes(s.rank(), *word_len),
            };
            approx_out(&ctx, &seq, &ws, *word_len, *f)
        }
    }
}

fn gen(ctx: &Ctx, g: &GenCommand) -> Result<String> {
    match g {
        GenCommand::Iet {
            lengths,
            perm,
            total,
            names,
            output,
        } => {
            let lengths = ctx.scalars(lengths)?;
            let perm = perm
                .split(',')
                .map(|p| p.trim().parse::<usize>().map_err(|_| usage(format!("bad permutation entry '{p}'"))))
                .collect::<Result<Vec<_>>>()?;
            let length = match total {
                Some(t) => ctx.scalar(t)?,
                None => lengths.iter().fold(Scalar::zero(), |a, b| &a + b),
            };
            let spec = catalog::IetSpec {
                length,
                lengths,
                perm,
                names: names.as_ref().map(|n| n.split(',').map(|x| x.trim().to_string()).collect()),
            };
            let sys = catalog::gen_iet(&spec)?;
            write_out(output, format::serialize_system(&sys) + "\n")
        }
        GenCommand::Itm { length, pieces, output } => {
            let length = ctx.scalar(length)?;
            let pieces = pieces
                .iter()
                .map(|p| {
                    let parts: Vec<&str> = p.split(',').map(str::trim).collect();
                    if parts.len() != 4 {
                        return Err(usage(format!("a piece is 'name,lo,hi,shift', got '{p}'")));
                    }
                    Ok(catalog::Translation {
                        name: parts[0].to_string(),
                        lo: ctx.scalar(parts[1])?,
                        hi: ctx.scalar(parts[2])?,
                        shift: ctx.scalar(parts[3])?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let sys = catalog::gen_itm(&length, &pieces)?;
            write_out(output, format::serialize_system(&sys) + "\n")
        }
    }
}

fn validate(ctx: &Ctx, s: &IsometrySystem, dot: bool) -> Result<String> {
    if dot {
        return Ok(format::system_dot(s));
    }
    let t = s.tree();
    let r = catalog::regime(s);
    let regime = match r.regime {
        catalog::Regime::Surface => "surface",
        catalog::Regime::Thin => "thin",
    };
    let gens: Vec<Value> = s
        .generators()
        .iter()
        .map(|g| {
            json!({
                "name": g.name,
                "domain": subtree_report(s, g.domain()),
                "image": subtree_report(s, g.image()),
            })
        })
        .collect();
    if ctx.json {
        return Ok(pretty(&report(
            "validate",
            json!({
                "valid": true,
                "field": format::field_json(t.field()),
                "vertices": t.vertex_count(),
                "diameter": scalar_json(&t.diameter(s.whole())),
                "generators": gens,
                "regime": regime,
                "domains_cover": r.domains_cover,
                "images_cover": r.images_cover,
                "domains_disjoint": r.domains_disjoint,
                "images_disjoint": r.images_disjoint,
            }),
        )));
    }
    let mut out = format!(
        "valid: {} vertices, field {}, diameter {}\n",
        t.vertex_count(),
        t.field(),
        t.diameter(s.whole())
    );
    for g in s.generators() {
        out.push_str(&format!(
            "{}: {} -> {}\n",
            g.name,
            fmt_subtree(g.domain()),
            fmt_subtree(g.image())
        ));
    }
    out.push_str(&format!(
        "regime: {regime} (domains cover {}, images cover {}, domains disjoint {}, images disjoint {})\n",
        r.domains_cover, r.images_cover, r.domains_disjoint, r.images_disjoint
    ));
    Ok(out)
}

fn translen(ctx: &Ctx, s: &IsometrySystem, w: &Word) -> Result<String> {
    let tl = suspension::translation_length(s, w)?;
    let (kind, witness, power) = match &tl.kind {
        IsometryKind::Hyperbolic { witness, power } => ("hyperbolic", witness, Some(*power)),
        IsometryKind::Elliptic { witness } => ("elliptic", witness, None),
    };
    if ctx.json {
        return Ok(pretty(&report(
            "translen",
            json!({
                "word": fmt_word(s, w),
                "length": scalar_json(&tl.length),
                "kind": kind,
                "witness": point_json(witness),
                "power": power,
            }),
        )));
    }
    Ok(format!(
        "||{}|| = {}\n{kind}, witness {witness}\n",
        fmt_word(s, w),
        tl.length
    ))
}

fn infinite(s: &IsometrySystem, x: &InfiniteArg) -> Result<InfiniteWord> {
    let mut xw = match (&x.periodic, x.fib) {
        (Some(p), false) => InfiniteWord::periodic(&word(s, p)?)?,
        (None, true) => {
            if s.rank() < 2 {
                return Err(usage("--fib needs two generators"));
            }
            heartwood_core::words::fib_gen(
                heartwood_core::Letter::positive(0),
                heartwood_core::Letter::positive(1),
            )
        }
        _ => return Err(usage("give exactly one of --periodic or --fib")),
    };
    if let Some(p) = &x.prefix {
        for &l in word(s, p)?.letters().iter().rev() {
            xw = xw.prepend(l)?;
        }
    }
    Ok(xw)
}

fn qk(ctx: &Ctx, s: &IsometrySystem, x: &InfiniteWord, n: usize) -> Result<String> {
    let st = heart::qk_eval(s, x, n, ctx.budget)?;
    let body = match &st {
        QkStatus::Admissible { depth, domain, .. } => {
            let mut b = subtree_report(s, domain);
            b["depth"] = json!(depth);
            b
        }
        QkStatus::EventuallyAdmissible {
            split,
            prefix,
            tail_depth,
            tail_domain,
            ..
        } => json!({
            "split": split,
            "prefix": fmt_word(s, prefix),
            "tail_depth": tail_depth,
            "tail_domain": subtree_report(s, tail_domain),
        }),
        QkStatus::Ray(r) => json!({
            "depth": r.depth,
            "dead_at": r.dead_at,
            "q": point_json(&r.q),
            "gap": scalar_json(&r.gap),
            "convergents": r.convergents.iter().map(|c| json!({
                "index": c.index,
                "copy": fmt_word(s, &c.copy.0),
                "point": point_json(&c.copy.1),
                "distance": scalar_json(&c.distance),
            })).collect::<Vec<_>>(),
            "certificates": r.certificates,
            "nested": r.nested,
            "monotone": r.is_monotone(),
        }),
    };
    if ctx.json {
        let mut body = body;
        body["status"] = json!(st.label());
        return Ok(pretty(&report("qk", body)));
    }
    let mut out = format!("{}\n", st.label());
    match &st {
        QkStatus::Admissible { domain, diameter, .. } => {
            out.push_str(&format!("domain {} diameter {diameter}\n", fmt_subtree(domain)));
        }
        QkStatus::EventuallyAdmissible {
            split,
            prefix,
            tail_domain,
            ..
        } => {
            out.push_str(&format!(
                "split at {split}: prefix {}, tail domain {}\n",
                fmt_word(s, prefix),
                fmt_subtree(tail_domain)
            ));
        }
        QkStatus::Ray(r) => {
            out.push_str(&format!("first dead prefix {}, gap {}\n", r.dead_at, r.gap));
            for c in &r.convergents {
                out.push_str(&format!(
                    "Q_{}\t{}:{}\td {}\n",
                    c.index,
                    fmt_word(s, &c.copy.0),
                    c.copy.1,
                    c.distance
                ));
            }
            let certs: Vec<String> = r.certificates.iter().map(|(i, j)| format!("({i},{j})")).collect();
            out.push_str(&format!("certificates {}\n", certs.join(" ")));
        }
    }
    Ok(out)
}

fn check_json<W>(c: &Check<W>, witness: impl Fn(&W) -> Value) -> Value {
    match c {
        Check::Holds => json!({"status": "holds"}),
        Check::Fails(w) => json!({"status": "fails", "witness": witness(w)}),
        Check::NotApplicable(why) => json!({"status": "n/a", "reason": why}),
    }
}

fn audit(ctx: &Ctx, s: &IsometrySystem, kp: &Subtree, n: usize, k: usize, search_len: usize) -> Result<String> {
    let r = heart::theorem_audit(s, kp, n, k, search_len)?;
    if ctx.json {
        let lengths = r.lengths.as_ref().map(|rows| {
            rows.iter()
                .map(|l| json!({"word": fmt_word(s, &l.word), "host": scalar_json(&l.host), "sub": scalar_json(&l.sub)}))
                .collect::<Vec<_>>()
        });
        return Ok(pretty(&report(
            "audit",
            json!({
                "kprime": subtree_report(s, kp),
                "n": r.n,
                "k": r.k,
                "search_len": r.search_len,
                "epsilon": scalar_json(&r.epsilon),
                "empty_generators": r.empty_generators,
                "cond3": check_json(&r.cond3, subtree_json),
                "cond2": check_json(&r.cond2, |w| json!(fmt_word(s, w))),
                "lengths": lengths,
                "lengths_equal": r.lengths_equal(),
                "violations": r.violations,
            }),
        )));
    }
    let mut out = format!("K' = {}\n", fmt_subtree(kp));
    if !r.empty_generators.is_empty() {
        out.push_str(&format!("empty on K': {}\n", r.empty_generators.join(", ")));
    }
    out.push_str(&match &r.cond3 {
        Check::Fails(p) => format!("limit set in K': fails, piece {}\n", fmt_subtree(p)),
        c => format!("limit set in K': {}\n", c.label()),
    });
    out.push_str(&match &r.cond2 {
        Check::Fails(w) => format!("dual words in K' closure: fails, {}\n", fmt_word(s, w)),
        c => format!("dual words in K' closure: {}\n", c.label()),
    });
    out.push_str(&match r.lengths_equal() {
        Some(eq) => format!("translation lengths equal: {eq}\n"),
        None => "translation lengths equal: n/a\n".into(),
    });
    out.push_str(&format!("violations: {}\n", r.violations.len()));
    for v in &r.violations {
        out.push_str(&format!("  {v}\n"));
    }
    Ok(out)
}

fn approx_stages(
    ctx: &Ctx,
    s: &IsometrySystem,
    stages: &[String],
    stage_points: &[String],
    orbit: Option<&str>,
) -> Result<Vec<Subtree>> {
    let given = [!stages.is_empty(), !stage_points.is_empty(), orbit.is_some()];
    if given.iter().filter(|g| **g).count() != 1 {
        return Err(usage("give stages with exactly one of --stage, --stage-points or --orbit"));
    }
    if let Some(o) = orbit {
        let counts = o
            .split(',')
            .map(|c| c.trim().parse::<usize>().map_err(|_| usage(format!("bad orbit count '{c}'"))))
            .collect::<Result<Vec<_>>>()?;
        let most = counts.iter().copied().max().unwrap_or(0);
        let pts = approx::orbit_points(s, &TreePoint::Vertex(0), most, 4 * most + 4)?;
        return counts
            .iter()
            .map(|&m| {
                if m > pts.len() {
                    return Err(usage(format!("the orbit of vertex 0 has only {} points", pts.len())));
                }
                Ok(s.tree().convex_hull(&pts[..m])?)
            })
            .collect();
    }
    if !stages.is_empty() {
        return stages.iter().map(|iv| interval_subtree(ctx, s, iv)).collect();
    }
    stage_points.iter().map(|p| points_subtree(s, p)).collect()
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Length(x) => x.to_string(),
        Cell::OverBudget { needed } => format!("over budget ({needed})"),
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Length(x) => scalar_json(x),
        Cell::OverBudget { needed } => json!({"over_budget": needed}),
    }
}

fn approx_out(
    ctx: &Ctx,
    seq: &approx::ApproxSequence,
    words: &[Word],
    word_len: usize,
    f: TableFormat,
) -> Result<String> {
    let s = &seq.host;
    let table = approx::length_table(seq, words, ctx.budget)?;
    let conv = approx::convergence_report(seq, word_len)?;
    let f = if ctx.json { TableFormat::Json } else { f };
    match f {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["word".to_string()];
            header.extend((1..=seq.stage_count()).map(|j| format!("stage{j}")));
            header.push("host".into());
            w.write_record(&header).map_err(|e| usage(e.to_string()))?;
            for (i, row) in table.rows.iter().enumerate() {
                let mut rec = vec![fmt_word(s, &table.words[i])];
                rec.extend(row.iter().map(cell_text));
                rec.push(cell_text(&table.host[i]));
                w.write_record(&rec).map_err(|e| usage(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| usage(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        TableFormat::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    json!({
                        "word": fmt_word(s, &table.words[i]),
                        "stages": row.iter().map(cell_json).collect::<Vec<_>>(),
                        "host": cell_json(&table.host[i]),
                        "monotone": table.row_monotone(i),
                        "ends_at_host": table.row_ends_at_host(i),
                    })
                })
                .collect();
            Ok(pretty(&report(
                "approx",
                json!({
                    "stages": seq.stages.iter().map(|st| subtree_report(s, &st.subtree)).collect::<Vec<_>>(),
                    "skipped": seq.skipped.iter().map(|(i, g)| json!({"stage": i + 1, "empty": g})).collect::<Vec<_>>(),
                    "rows": rows,
                    "convergence": {
                        "word_len": conv.word_len,
                        "words": conv.words,
                        "gaps": conv.gaps.iter().map(scalar_json).collect::<Vec<_>>(),
                        "non_increasing": conv.non_increasing,
                        "final_gap": scalar_json(&conv.final_gap),
                        "empty_laminations": conv.empty_laminations,
                    },
                }),
            )))
        }
        TableFormat::Text => {
            let mut out = String::new();
            for (i, (j, g)) in seq.skipped.iter().enumerate() {
                if i == 0 {
                    out.push_str("skipped:\n");
                }
                out.push_str(&format!("  stage {} (empty: {})\n", j + 1, g.join(", ")));
            }
            for (j, st) in seq.stages.iter().enumerate() {
                out.push_str(&format!("stage {}: {}\n", j + 1, fmt_subtree(&st.subtree)));
            }
            for (i, row) in table.rows.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(cell_text).collect();
                out.push_str(&format!(
                    "{}\t{}\t| {}\n",
                    fmt_word(s, &table.words[i]),
                    cells.join("\t"),
                    cell_text(&table.host[i])
                ));
            }
            let gaps: Vec<String> = conv.gaps.iter().map(Scalar::to_string).collect();
            out.push_str(&format!(
                "gaps (|w| <= {}): {}\nnon-increasing: {}\n",
                conv.word_len,
                gaps.join(", "),
                conv.non_increasing
            ));
            Ok(out)
        }
    }
}

/// Parses `args`, runs the command, prints, and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

