use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use fsw_core::adgraph::{
    codim, enumerate_admissible, find_intermediate, negative_set, partial_gg, partial_gg_or_equal,
    partial_gt, partial_sqsupset, partial_sqsupseteq, special_condition, AdmissibleGraph,
    PairingContext,
};
use fsw_core::afsw::{
    afsw_pure, decompose_ksteps, dimension_gap_by_expansion, ksteps_virtual_rank, prop_zero_gap,
    verify_cal_chain, FamilyData, KuranishiModel,
};
use fsw_core::dsl::{eval, parse, Environment, Value as DslValue};
use fsw_core::hirzebruch::{self, choose_b, FnDivisor};
use fsw_core::sweep::Execution;
use fsw_core::switch::{analyze, decompose_sym, BaseData, SwitchProblem};
use fsw_core::{BundleSymbol, Error, Ring};

/// Exact calculator for family switching formulas.
#[derive(Parser, Debug)]
#[command(name = "fsw", version)]
struct Cli {
    /// Print the versioned JSON envelope instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Step-by-step switch of a -n curve with C·C-pairing m across k steps.
    #[command(allow_negative_numbers = true)]
    Switch {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n: i64,
        #[arg(long)]
        k: u32,
        /// Attach a formal rank-2 U (classes c1, c2) and √L0 (class l).
        #[arg(long)]
        with_base: bool,
        /// Truncation degree of the base ring.
        #[arg(long, default_value_t = 4)]
        truncation: u32,
    },
    /// Line-bundle cohomology on the Hirzebruch surface F_n.
    #[command(subcommand)]
    Hirzebruch(HirzebruchCmd),
    /// Family invariants of Kuranishi models.
    #[command(subcommand)]
    Afsw(AfswCmd),
    /// Admissible graphs and their orders.
    #[command(subcommand)]
    Graphs(GraphsCmd),
    /// Evaluate an expression, e.g. `grade(c(V)*s(V), 1)`.
    ///
    /// Bindings: `--bind name=rank<k>[:roots a,b,...]`. Roots name degree-1
    /// generators; without roots the bundle gets formal Chern classes
    /// `name_c1..name_c<k>`.
    Eval {
        expr: String,
        #[arg(long = "bind", num_args = 1.., action = clap::ArgAction::Append)]
        binds: Vec<String>,
        #[arg(long, default_value_t = 4)]
        truncation: u32,
    },
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct DivisorArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    a: i64,
    #[arg(long)]
    b: i64,
}

#[derive(Subcommand, Debug)]
enum HirzebruchCmd {
    H0(DivisorArgs),
    H1(DivisorArgs),
    H2(DivisorArgs),
    Chi(DivisorArgs),
    /// Even twist killing h0 and h2 of ((a-n+bn)/2-1)F + (b/2-1)C₋.
    #[command(allow_negative_numbers = true)]
    Chooseb {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        n: u32,
    },
}

#[derive(Subcommand, Debug)]
enum AfswCmd {
    /// c_{dimB+q}(W - V) for formal V, W with the pushforward check.
    #[command(allow_negative_numbers = true)]
    Pure {
        #[arg(long)]
        dimb: u32,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        rankv: u32,
        #[arg(long)]
        rankw: u32,
        #[arg(long, default_value_t = 0)]
        pg: u32,
        #[arg(long, default_value_t = 0)]
        febd: u32,
        /// C·K; C·C is then fixed by the rank relation.
        #[arg(long, default_value_t = 0)]
        kpair: i64,
    },
    /// Classify step pushforwards by fiber degree.
    Ksteps {
        /// Comma-separated degrees, e.g. `2,0,-1,-3`.
        #[arg(long, allow_hyphen_values = true)]
        degs: String,
    },
    /// Dimension gap forcing a local contribution to vanish.
    #[command(allow_negative_numbers = true)]
    Zero {
        #[arg(long)]
        esq: i64,
        #[arg(long)]
        edotk: i64,
        #[arg(long)]
        edotc: i64,
        /// C·C and C·K for the expansion cross-check.
        #[arg(long, default_value_t = 0)]
        csq: i64,
        #[arg(long, default_value_t = 0)]
        cdotk: i64,
    },
}

#[derive(Args, Debug)]
struct PairArgs {
    /// Graph JSON `{"n":N,"edges":[[p,c],...]}`.
    #[arg(long)]
    g: String,
    #[arg(long)]
    g2: String,
    /// Comma-separated multiplicities.
    #[arg(long)]
    m: String,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    c_selfint: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    c_kpair: i64,
}

#[derive(Subcommand, Debug)]
enum GraphsCmd {
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    Compare(PairArgs),
    Interpolate(PairArgs),
}

struct Output {
    command: String,
    inputs: Value,
    result: Value,
    warnings: Vec<String>,
}

impl Output {
    fn new(command: &str, inputs: Value, result: Value) -> Self {
        Self {
            command: command.into(),
            inputs,
            result,
            warnings: Vec::new(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli.command) {
        Ok(out) => {
            if cli.json {
                let env = json!({
                    "schema": 1,
                    "command": out.command,
                    "inputs": out.inputs,
                    "result": out.result,
                    "warnings": out.warnings,
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&env).expect("serializable")
                );
            } else {
                print_table(&out);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn print_table(out: &Output) {
    match &out.result {
        Value::Object(map) => {
            let width = map.keys().map(String::len).max().unwrap_or(0);
            for (k, v) in map {
                println!("{k:<width$}  {}", scalar(v));
            }
        }
        other => println!("{}", scalar(other)),
    }
    for w in &out.warnings {
        println!("warning: {w}");
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn run(cmd: &Command) -> Result<Output, Error> {
    match cmd {
        Command::Switch {
            m,
            n,
            k,
            with_base,
            truncation,
        } => run_switch(*m, *n, *k, *with_base, *truncation),
        Command::Hirzebruch(h) => run_hirzebruch(h),
        Command::Afsw(a) => run_afsw(a),
        Command::Graphs(g) => run_graphs(g),
        Command::Eval {
            expr,
            binds,
            truncation,
        } => run_eval(expr, binds, *truncation),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn run_switch(m: i64, n: i64, k: u32, with_base: bool, truncation: u32) -> Result<Output, Error> {
    let mut problem = SwitchProblem::new(m, n, k)?;
    if with_base {
        problem = problem.with_base(BaseData::standard(truncation)?);
    }
    let report = analyze(&problem)?;
    let sym: Vec<String> = decompose_sym(&problem)?
        .iter()
        .map(ToString::to_string)
        .collect();
    let mut result = Map::new();
    result.insert("steps".into(), to_json(&report.steps));
    result.insert("virtual_rank".into(), json!(report.virtual_rank));
    result.insert("v_class".into(), json!(report.v_class.to_string()));
    result.insert("sym_decomposition".into(), json!(sym));
    if let (Some(c), Some(s)) = (&report.chern_of_v, &report.segre_of_v) {
        result.insert("chern_of_v".into(), json!(c.to_string()));
        result.insert("segre_of_v".into(), json!(s.to_string()));
    }
    Ok(Output::new(
        "switch",
        json!({"m": m, "n": n, "k": k, "with_base": with_base, "truncation": truncation}),
        Value::Object(result),
    ))
}

fn run_hirzebruch(cmd: &HirzebruchCmd) -> Result<Output, Error> {
    let divisor = |a: &DivisorArgs| FnDivisor::new(a.n, a.a, a.b);
    let inputs = |a: &DivisorArgs| json!({"n": a.n, "a": a.a, "b": a.b});
    let (name, args, value) = match cmd {
        HirzebruchCmd::H0(a) => ("h0", a, json!(hirzebruch::h0(&divisor(a)?))),
        HirzebruchCmd::H1(a) => ("h1", a, json!(hirzebruch::h1(&divisor(a)?)?)),
        HirzebruchCmd::H2(a) => ("h2", a, json!(hirzebruch::h2(&divisor(a)?))),
        HirzebruchCmd::Chi(a) => ("chi", a, json!(hirzebruch::chi(&divisor(a)?)?)),
        HirzebruchCmd::Chooseb { a, n } => {
            let c = choose_b(*a, *n)?;
            let d = c.divisor;
            let result = json!({
                "b": c.b,
                "divisor": to_json(&d),
                "recipe_b": c.recipe_b,
                "recipe_verified": c.recipe_verified,
                "h0": hirzebruch::h0(&d),
                "h2": hirzebruch::h2(&d),
            });
            let mut out = Output::new("hirzebruch chooseb", json!({"a": a, "n": n}), result);
            out.warnings = c.warnings;
            return Ok(out);
        }
    };
    Ok(Output::new(
        &format!("hirzebruch {name}"),
        inputs(args),
        json!({ name: value }),
    ))
}

fn parse_list(s: &str, what: &str) -> Result<Vec<i64>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Precondition(format!("{what}: `{t}` is not an integer")))
        })
        .collect()
}

fn run_afsw(cmd: &AfswCmd) -> Result<Output, Error> {
    match cmd {
        AfswCmd::Pure {
            dimb,
            q,
            rankv,
            rankw,
            pg,
            febd,
            kpair,
        } => {
            let excess = if *pg > 0 { i64::from(*febd) } else { 0 };
            let half = i64::from(*rankv) - i64::from(*rankw) + i64::from(*q) - 1 - excess;
            let fam = FamilyData::new(*dimb, *q, *pg, *febd, 2 * half + kpair, *kpair)?;
            let gens: Vec<(String, u32)> = (1..=*rankv)
                .map(|i| (format!("v{i}"), i))
                .chain((1..=*rankw).map(|i| (format!("w{i}"), i)))
                .collect();
            let gens: Vec<(&str, u32)> = gens.iter().map(|(s, d)| (s.as_str(), *d)).collect();
            let ring = Ring::with_generators(&gens, (dimb + q).max(1))?;
            let model = KuranishiModel::new(
                BundleSymbol::formal_from_generators("V", &ring, "v", *rankv)?,
                BundleSymbol::formal_from_generators("W", &ring, "w", *rankw)?,
            );
            let value = afsw_pure(&model, &fam)?;
            let chain = verify_cal_chain(&model, &fam)?;
            Ok(Output::new(
                "afsw pure",
                json!({"dimb": dimb, "q": q, "rankv": rankv, "rankw": rankw, "pg": pg, "febd": febd, "kpair": kpair}),
                json!({
                    "selfint": fam.selfint,
                    "invariant": value.to_string(),
                    "pushforward_chain_agrees": chain,
                }),
            ))
        }
        AfswCmd::Ksteps { degs } => {
            let list = parse_list(degs, "--degs")?;
            let steps = decompose_ksteps(&list);
            Ok(Output::new(
                "afsw ksteps",
                json!({ "degs": list }),
                json!({"steps": to_json(&steps), "virtual_rank": ksteps_virtual_rank(&steps)}),
            ))
        }
        AfswCmd::Zero {
            esq,
            edotk,
            edotc,
            csq,
            cdotk,
        } => {
            let gap = prop_zero_gap(*esq, *edotk, *edotc)?;
            let expansion = dimension_gap_by_expansion(*csq, *cdotk, *esq, *edotk, *edotc);
            Ok(Output::new(
                "afsw zero",
                json!({"esq": esq, "edotk": edotk, "edotc": edotc, "csq": csq, "cdotk": cdotk}),
                json!({"gap": gap, "gap_by_expansion": expansion}),
            ))
        }
    }
}

fn parse_graph(s: &str, flag: &str) -> Result<AdmissibleGraph, Error> {
    serde_json::from_str(s).map_err(|e| Error::InvalidGraph(format!("{flag}: {e}")))
}

fn pair_inputs(
    p: &PairArgs,
) -> Result<(AdmissibleGraph, AdmissibleGraph, PairingContext, Value), Error> {
    let g = parse_graph(&p.g, "--g")?;
    let g2 = parse_graph(&p.g2, "--g2")?;
    let m = parse_list(&p.m, "--m")?;
    if m.len() != g.n() || g.n() != g2.n() {
        return Err(Error::Precondition(format!(
            "graphs have {} and {} vertices but {} multiplicities were given",
            g.n(),
            g2.n(),
            m.len()
        )));
    }
    let inputs = json!({"g": to_json(&g), "g2": to_json(&g2), "m": m, "c_selfint": p.c_selfint, "c_kpair": p.c_kpair});
    let ctx = PairingContext::new(m, p.c_selfint, p.c_kpair)?;
    Ok((g, g2, ctx, inputs))
}

fn run_graphs(cmd: &GraphsCmd) -> Result<Output, Error> {
    match cmd {
        GraphsCmd::Enumerate { n } => {
            let graphs = enumerate_admissible(*n)?;
            let codims = Execution::default().map(&graphs, codim);
            let rows = graphs
                .iter()
                .zip(codims)
                .map(|(g, c)| Ok(json!({"graph": to_json(g), "codim": c?})))
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(Output::new(
                "graphs enumerate",
                json!({ "n": n }),
                json!({"count": graphs.len(), "graphs": rows}),
            ))
        }
        GraphsCmd::Compare(p) => {
            let (g, g2, ctx, inputs) = pair_inputs(p)?;
            Ok(Output::new(
                "graphs compare",
                inputs,
                json!({
                    "gt": partial_gt(&g, &g2),
                    "sqsupset": partial_sqsupset(&g, &g2, &ctx),
                    "sqsupseteq": partial_sqsupseteq(&g, &g2, &ctx),
                    "gg": partial_gg(&g, &g2, &ctx),
                    "gg_or_equal": partial_gg_or_equal(&g, &g2, &ctx),
                    "special_condition_g": special_condition(&g, &ctx),
                    "negative_set_g": to_json(&negative_set(&g, &ctx)),
                    "negative_set_g2": to_json(&negative_set(&g2, &ctx)),
                }),
            ))
        }
        GraphsCmd::Interpolate(p) => {
            let (g, g2, ctx, inputs) = pair_inputs(p)?;
            let r = find_intermediate(&g, &g2, &ctx)?;
            Ok(Output::new("graphs interpolate", inputs, to_json(&r)))
        }
    }
}

/// Joins `--bind` tokens so that `V=rank2:roots a,b` works quoted or not.
fn group_binds(tokens: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for t in tokens {
        match out.last_mut() {
            Some(last) if !t.contains('=') => {
                last.push(' ');
                last.push_str(t);
            }
            _ => out.push(t.clone()),
        }
    }
    out
}

struct Binding {
    name: String,
    rank: u32,
    roots: Option<Vec<String>>,
}

fn parse_binding(spec: &str) -> Result<Binding, Error> {
    let bad = |why: &str| Error::Precondition(format!("--bind `{spec}`: {why}"));
    let (name, rest) = spec
        .split_once('=')
        .ok_or_else(|| bad("expected name=rank<k>"))?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(bad("invalid name"));
    }
    let (rank_part, roots_part) = match rest.split_once(':') {
        Some((r, s)) => (r.trim(), Some(s.trim())),
        None => (rest.trim(), None),
    };
    let rank: u32 = rank_part
        .strip_prefix("rank")
        .and_then(|r| r.parse().ok())
        .ok_or_else(|| bad("expected rank<k>"))?;
    let roots = match roots_part {
        None => None,
        Some(s) => {
            let list = s
                .strip_prefix("roots")
                .ok_or_else(|| bad("expected `roots a,b,...`"))?;
            let list = list.trim_start_matches(['=', ' ']);
            let roots: Vec<String> = list
                .split(',')
                .map(|r| r.trim().to_string())
                .filter(|r| !r.is_empty())
                .collect();
            if roots.len() != rank as usize {
                return Err(bad(&format!(
                    "rank {rank} needs {rank} roots, got {}",
                    roots.len()
                )));
            }
            Some(roots)
        }
    };
    Ok(Binding {
        name: name.to_string(),
        rank,
        roots,
    })
}

fn run_eval(expr: &str, binds: &[String], truncation: u32) -> Result<Output, Error> {
    let bindings = group_binds(binds)
        .iter()
        .map(|b| parse_binding(b))
        .collect::<Result<Vec<_>, _>>()?;
    let mut gens: Vec<(String, u32)> = Vec::new();
    for b in &bindings {
        match &b.roots {
            Some(roots) => {
                for r in roots {
                    if !gens.iter().any(|(g, _)| g == r) {
                        gens.push((r.clone(), 1));
                    }
                }
            }
            None => gens.extend((1..=b.rank).map(|i| (format!("{}_c{i}", b.name), i))),
        }
    }
    let gen_refs: Vec<(&str, u32)> = gens.iter().map(|(s, d)| (s.as_str(), *d)).collect();
    let ring = Ring::with_generators(&gen_refs, truncation)?;
    let mut env = Environment::new(ring.clone())?;
    for b in &bindings {
        let sym = match &b.roots {
            Some(roots) => BundleSymbol::with_roots(
                b.name.clone(),
                roots
                    .iter()
                    .map(|r| ring.gen(r))
                    .collect::<Result<Vec<_>, _>>()?,
            )?,
            None => BundleSymbol::formal_from_generators(
                b.name.clone(),
                &ring,
                &format!("{}_c", b.name),
                b.rank,
            )?,
        };
        env.bind_bundle(b.name.clone(), sym)?;
    }
    let ast = parse(expr)?;
    let value = eval(&ast, &env)?;
    let kind = match value {
        DslValue::K(_) => "kclass",
        DslValue::Graded(_) => "graded",
        DslValue::Integer(_) => "integer",
    };
    Ok(Output::new(
        "eval",
        json!({"expr": expr, "bind": group_binds(binds), "truncation": truncation}),
        json!({"parsed": ast.to_string(), "kind": kind, "value": value.to_string()}),
    ))
}
