//! `beauville` command-line front end.
//!
//! Every run prints one document `{command, config, result, exit_code}`
//! (plus `elapsed_ms` unless `--no-timing`). Exit codes: 0 success, 1 false /
//! not found / nonexistence, 2 usage error, 3 cap exceeded.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use beauville::beauville::{
    classify_triangle, find_generating_triple_exhaustive, find_generating_triple_perm, find_generating_triple_psl2, hurwitz_psl2, search_exhaustive,
    search_macbeath, search_random, verify, BeauvilleError, BeauvilleQuadruple, GeneratingTriple, SearchConfig, SearchOutcome, Strategy,
};
use beauville::counting::{
    cached_character_table, frobenius_count_brute, witten_zeta, CharacterTable, ClassPartition, CountingError, DEFAULT_ENUMERATION_LIMIT,
    DEFAULT_TABLE_LIMIT,
};
use beauville::probability::{estimate_beauville_probability, estimate_component_stats, ElementStats, EstimationConfig};
use beauville::psl2::TraceTriple;
use beauville::{AbelianGroup, Group, GroupError, GroupKind, PermGroup, Psl2Group};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "beauville", version, about = "Unmixed Beauville structures in PSL(2,q), alternating and symmetric groups, and Z/n x Z/n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Append a one-line JSON record of this run to a log file.
    #[arg(long, global = true)]
    log: Option<PathBuf>,
    /// Omit wall-clock timings so identical runs give identical output.
    #[arg(long, global = true)]
    no_timing: bool,
    /// Worker threads (0 = all cores, 1 = sequential).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[arg(long, global = true, default_value_t = beauville::DEFAULT_SEED)]
    seed: u64,
    /// Largest group the tool will enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    cap_enumeration: u128,
    /// Largest number of pairs an exhaustive search may examine.
    #[arg(long, global = true, default_value_t = beauville::beauville::DEFAULT_SEARCH_CAP)]
    cap_search: u64,
    /// Largest group for which a character table is computed.
    #[arg(long, global = true, default_value_t = DEFAULT_TABLE_LIMIT)]
    cap_table: u128,
    /// Random attempts for randomized searches.
    #[arg(long, global = true, default_value_t = 100_000)]
    cap_attempts: u64,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Tsv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Macbeath,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Character,
}

#[derive(Subcommand)]
enum Command {
    /// Check conditions i-iii for a quadruple "x1;y1;x2;y2".
    Verify {
        #[arg(long)]
        group: String,
        #[arg(long)]
        quad: String,
    },
    /// Look for an unmixed Beauville structure.
    Search {
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
        strategy: StrategyArg,
        /// Type of the first pair, "r,s,t".
        #[arg(long, requires = "type2")]
        type1: Option<String>,
        #[arg(long, requires = "type1")]
        type2: Option<String>,
    },
    /// Find a generating triple of type (r, s, t).
    Triple {
        #[arg(long)]
        group: String,
        #[arg(long)]
        r: u64,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        t: u64,
    },
    /// Identify the subgroup generated by a pair "x;y", or realise a PSL(2,q)
    /// trace triple "a,b,c".
    Classify {
        #[arg(long)]
        group: String,
        #[arg(long, conflicts_with = "traces", required_unless_present = "traces")]
        pair: Option<String>,
        #[arg(long)]
        traces: Option<String>,
    },
    /// Monte Carlo estimate of the probability of a Beauville quadruple.
    Estimate {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 20_000)]
        samples: u64,
    },
    /// Split / non-split / generation statistics of random pairs.
    Stats {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 20_000)]
        samples: u64,
    },
    /// Conjugacy classes with sizes, orders and representatives.
    Classes {
        #[arg(long)]
        group: String,
    },
    /// Count solutions of xyz = 1 with x, y, z in given classes.
    Frobenius {
        #[arg(long)]
        group: String,
        /// Class indices "i,j,k" as listed by `classes`; all triples if omitted.
        #[arg(long)]
        classes: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Character)]
        method: Method,
    },
    /// Compute (or load from BEAUVILLE_CACHE_DIR) a character table.
    Chartable {
        #[arg(long)]
        group: String,
        /// Also write the table document to this path.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Witten zeta function sum of chi(1)^-s.
    Zeta {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 2.0)]
        exponent: f64,
    },
    /// Whether PSL(2,p^e) is a quotient of the (2,3,7) triangle group.
    Hurwitz {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        e: u32,
        /// Also produce a (2,3,7) generating triple.
        #[arg(long)]
        witness: bool,
    },
    /// Spherical, euclidean or hyperbolic type.
    Triangle {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        t: u64,
    },
}

/// What a subcommand produces besides the echoed config.
struct Outcome {
    config: Value,
    result: Value,
    success: bool,
}

fn outcome(config: Value, result: Value, success: bool) -> Result<Outcome> {
    Ok(Outcome { config, result, success })
}

macro_rules! with_group {
    ($kind:expr, |$g:ident| $body:expr) => {
        match $kind {
            GroupKind::Psl2 { p, e } => {
                let $g = Psl2Group::new(p, e)?;
                $body
            }
            GroupKind::Alternating { n } => {
                let $g = PermGroup::alternating(n)?;
                $body
            }
            GroupKind::Symmetric { n } => {
                let $g = PermGroup::symmetric(n)?;
                $body
            }
            GroupKind::Abelian { n } => {
                let $g = AbelianGroup::new(n)?;
                $body
            }
        }
    };
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',').map(|x| x.trim().parse::<T>().map_err(|_| anyhow!(Usage(format!("bad {what} {s:?}: expected comma-separated integers"))))).collect()
}

fn parse_type(s: &str) -> Result<[u64; 3]> {
    let v: Vec<u64> = parse_list(s, "type")?;
    let mut t: [u64; 3] = v.try_into().map_err(|_| anyhow!(Usage(format!("type {s:?} needs three entries"))))?;
    t.sort_unstable();
    Ok(t)
}

fn parse_elements<G: Group>(g: &G, s: &str, count: usize) -> Result<Vec<G::Elem>> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != count {
        bail!(Usage(format!("expected {count} elements separated by ';', got {}", parts.len())));
    }
    Ok(parts.into_iter().map(|p| g.parse_element(p.trim())).collect::<Result<_, _>>()?)
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn quad_json<G: Group>(g: &G, q: &BeauvilleQuadruple<G::Elem>) -> Value {
    let f = |e| g.format_element(e);
    json!({
        "text": format!("{};{};{};{}", f(&q.x1), f(&q.y1), f(&q.x2), f(&q.y2)),
        "x1": f(&q.x1), "y1": f(&q.y1), "x2": f(&q.x2), "y2": f(&q.y2),
    })
}

fn triple_json<G: Group>(g: &G, t: &GeneratingTriple<G::Elem>) -> Value {
    json!({
        "x": g.format_element(&t.x),
        "y": g.format_element(&t.y),
        "z": g.format_element(&t.z),
        "orders": t.orders,
        "pair": format!("{};{}", g.format_element(&t.x), g.format_element(&t.y)),
    })
}

fn search_config(c: &Common, strategy: Strategy, types: Option<([u64; 3], [u64; 3])>) -> SearchConfig {
    SearchConfig { strategy, types, cap: c.cap_search, enumeration_limit: c.cap_enumeration, seed: c.seed, attempts: c.cap_attempts }
}

fn search_outcome_json<G: Group>(g: &G, out: SearchOutcome<G::Elem>) -> (Value, bool) {
    match out {
        SearchOutcome::Found { quad, report } => (json!({"status": "found", "quadruple": quad_json(g, &quad), "report": report}), true),
        SearchOutcome::Nonexistence { pairs_examined, generating_signatures } => (
            json!({"status": "nonexistence", "pairs_examined": pairs_examined, "generating_signatures": generating_signatures}),
            false,
        ),
        SearchOutcome::Inconclusive { attempts } => (json!({"status": "inconclusive", "attempts": attempts}), false),
    }
}

fn run_search<G: Group>(g: &G, cfg: &SearchConfig) -> Result<(Value, bool)> {
    let out = match cfg.strategy {
        Strategy::Exhaustive => search_exhaustive(g, cfg)?,
        Strategy::Random => search_random(g, cfg)?,
        Strategy::Macbeath => return Err(BeauvilleError::StrategyUnsupported("macbeath").into()),
    };
    Ok(search_outcome_json(g, out))
}

fn run_triple<G: Group>(g: &G, r: u64, s: u64, t: u64, limit: u128) -> Result<(Value, bool)> {
    triple_result(g, find_generating_triple_exhaustive(g, r, s, t, limit))
}

fn triple_result<G: Group>(g: &G, found: Result<GeneratingTriple<G::Elem>, BeauvilleError>) -> Result<(Value, bool)> {
    match found {
        Ok(t) => Ok((json!({"status": "found", "triple": triple_json(g, &t)}), true)),
        Err(e @ (BeauvilleError::NoTriple(..) | BeauvilleError::Inconclusive(..))) => {
            let status = if matches!(e, BeauvilleError::NoTriple(..)) { "none" } else { "inconclusive" };
            Ok((json!({"status": status, "message": e.to_string()}), false))
        }
        Err(e) => Err(e.into()),
    }
}

fn classify_pair<G: Group>(g: &G, pair: &str) -> Result<(Value, bool)> {
    let v = parse_elements(g, pair, 2)?;
    let t = GeneratingTriple::new(g, &v[0], &v[1]);
    let generates = g.generates(&v[0], &v[1]);
    Ok((json!({"generates": generates, "subgroup": g.subgroup_label(&v[0], &v[1]), "orders": t.orders, "z": g.format_element(&t.z)}), generates))
}

fn classify_traces(g: &Psl2Group, traces: &str) -> Result<(Value, bool)> {
    let f = g.field();
    let parts: Vec<&str> = traces.split(',').collect();
    if parts.len() != 3 {
        bail!(Usage(format!("trace triple {traces:?} needs three field elements a,b,c")));
    }
    let v: Vec<_> = parts.iter().map(|p| f.parse_element(p.trim())).collect::<Result<_, _>>().map_err(GroupError::from)?;
    let t = TraceTriple { alpha: v[0], beta: v[1], gamma: v[2] };
    let (a, b, c) = g.macbeath_solve(&t)?;
    let (x, y) = (g.project(&a), g.project(&b));
    let generates = g.generates(&x, &y);
    let class = g.classify_subgroup(&x, &y);
    Ok((
        json!({
            "singular": g.is_singular_triple(&t),
            "matrices": [g.format_element(&x), g.format_element(&y), g.format_element(&g.project(&c))],
            "pair": format!("{};{}", g.format_element(&x), g.format_element(&y)),
            "generates": generates,
            "subgroup": class.to_string(),
        }),
        generates,
    ))
}

fn classes_json<G: Group>(g: &G, limit: u128) -> Result<Value> {
    let part = ClassPartition::new(g, limit)?;
    let rows: Vec<Value> = part
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| json!({"index": i, "label": c.label, "size": c.size.to_string(), "order": c.element_order, "representative": g.format_element(&c.representative)}))
        .collect();
    Ok(json!({"count": rows.len(), "classes": rows}))
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os("BEAUVILLE_CACHE_DIR").filter(|s| !s.is_empty()).map(PathBuf::from)
}

fn table_for<G: Group>(g: &G, limit: u128) -> Result<CharacterTable, CountingError> {
    cached_character_table(g, limit, cache_dir().as_deref())
}

fn frobenius_json<G: Group>(g: &G, triple: Option<[usize; 3]>, method: Method, c: &Common) -> Result<Value> {
    let r = match method {
        Method::Brute => ClassPartition::new(g, c.cap_enumeration)?.len(),
        Method::Character => table_for(g, c.cap_table)?.class_sizes.len(),
    };
    let triples: Vec<[usize; 3]> = match triple {
        Some(t) => vec![t],
        None => (0..r).flat_map(|i| (0..r).flat_map(move |j| (0..r).map(move |k| [i, j, k]))).collect(),
    };
    let counts: Vec<Value> = match method {
        Method::Brute => {
            let part = ClassPartition::new(g, c.cap_enumeration)?;
            triples.iter().map(|&[i, j, k]| frobenius_count_brute(g, &part, i, j, k).map(|n| json!({"classes": [i, j, k], "count": n.to_string()}))).collect::<Result<_, _>>()?
        }
        Method::Character => {
            let table = table_for(g, c.cap_table)?;
            triples.iter().map(|&[i, j, k]| table.frobenius_count(i, j, k).map(|n| json!({"classes": [i, j, k], "count": n.to_string()}))).collect::<Result<_, _>>()?
        }
    };
    Ok(json!({"class_count": r, "counts": counts}))
}

fn estimation_config(c: &Common, samples: u64) -> EstimationConfig {
    EstimationConfig { samples, seed: c.seed, workers: c.workers, component_stats: true }
}

fn run_estimate<G: ElementStats>(g: &G, cfg: &EstimationConfig, timing: bool) -> Value {
    let mut r = estimate_beauville_probability(g, cfg);
    if !timing {
        r.elapsed_ms = None;
    }
    serde_json::to_value(r).expect("serializable")
}

fn group_kind(s: &str) -> Result<GroupKind> {
    Ok(s.parse::<GroupKind>()?)
}

fn base_config(c: &Common, group: Option<&GroupKind>) -> Value {
    json!({
        "group": group.map(|g| g.to_string()),
        "seed": c.seed,
        "workers": c.workers,
        "format": match c.format { Format::Json => "json", Format::Tsv => "tsv", Format::Text => "text" },
        "cap_enumeration": c.cap_enumeration.to_string(),
        "cap_search": c.cap_search,
        "cap_table": c.cap_table.to_string(),
        "cap_attempts": c.cap_attempts,
        "cache_dir": cache_dir().map(|p| p.display().to_string()),
    })
}

fn extend(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn dispatch(cmd: &Command, c: &Common) -> Result<Outcome> {
    match cmd {
        Command::Verify { group, quad } => {
            let kind = group_kind(group)?;
            let config = extend(base_config(c, Some(&kind)), json!({"quad": quad}));
            with_group!(kind, |g| {
                let v = parse_elements(&g, quad, 4)?;
                let q = BeauvilleQuadruple { x1: v[0].clone(), y1: v[1].clone(), x2: v[2].clone(), y2: v[3].clone() };
                let report = verify(&g, &q)?;
                let ok = report.verdict;
                outcome(config, serde_json::to_value(report)?, ok)
            })
        }
        Command::Search { group, strategy, type1, type2 } => {
            let kind = group_kind(group)?;
            let types = match (type1, type2) {
                (Some(a), Some(b)) => Some((parse_type(a)?, parse_type(b)?)),
                _ => None,
            };
            let strategy = match strategy {
                StrategyArg::Exhaustive => Strategy::Exhaustive,
                StrategyArg::Macbeath => Strategy::Macbeath,
                StrategyArg::Random => Strategy::Random,
            };
            let cfg = search_config(c, strategy, types);
            let mut config = extend(base_config(c, Some(&kind)), json!({"strategy": strategy, "type1": types.map(|t| t.0), "type2": types.map(|t| t.1)}));
            let (result, ok) = match (kind, strategy) {
                (GroupKind::Psl2 { p, e }, Strategy::Macbeath) => {
                    let g = Psl2Group::new(p, e)?;
                    let types = types.unwrap_or_else(|| beauville::beauville::default_psl2_types(&g));
                    config["type1"] = json!(types.0);
                    config["type2"] = json!(types.1);
                    let cfg = SearchConfig { types: Some(types), ..cfg };
                    search_outcome_json(&g, search_macbeath(&g, &cfg)?)
                }
                _ => with_group!(kind, |g| run_search(&g, &cfg)?),
            };
            outcome(config, result, ok)
        }
        Command::Triple { group, r, s, t } => {
            let kind = group_kind(group)?;
            let config = extend(base_config(c, Some(&kind)), json!({"r": r, "s": s, "t": t}));
            let (result, ok) = match kind {
                GroupKind::Psl2 { p, e } => {
                    let g = Psl2Group::new(p, e)?;
                    triple_result(&g, find_generating_triple_psl2(&g, *r, *s, *t))?
                }
                GroupKind::Alternating { n } | GroupKind::Symmetric { n } if n > 8 => {
                    let g = if matches!(kind, GroupKind::Alternating { .. }) { PermGroup::alternating(n)? } else { PermGroup::symmetric(n)? };
                    triple_result(&g, find_generating_triple_perm(&g, *r, *s, *t, c.seed, c.cap_attempts))?
                }
                _ => with_group!(kind, |g| run_triple(&g, *r, *s, *t, c.cap_enumeration)?),
            };
            outcome(config, result, ok)
        }
        Command::Classify { group, pair, traces } => {
            let kind = group_kind(group)?;
            let config = extend(base_config(c, Some(&kind)), json!({"pair": pair, "traces": traces}));
            let (result, ok) = match (pair, traces) {
                (Some(pair), _) => with_group!(kind, |g| classify_pair(&g, pair)?),
                (None, Some(traces)) => {
                    let GroupKind::Psl2 { p, e } = kind else {
                        bail!(Usage("--traces needs a psl2 group".into()));
                    };
                    classify_traces(&Psl2Group::new(p, e)?, traces)?
                }
                (None, None) => bail!(Usage("give --pair or --traces".into())),
            };
            outcome(config, result, ok)
        }
        Command::Estimate { group, samples } => {
            let kind = group_kind(group)?;
            let cfg = estimation_config(c, *samples);
            let config = extend(base_config(c, Some(&kind)), json!({"samples": samples}));
            let result = with_group!(kind, |g| run_estimate(&g, &cfg, !c.no_timing));
            outcome(config, result, true)
        }
        Command::Stats { group, samples } => {
            let kind = group_kind(group)?;
            let cfg = estimation_config(c, *samples);
            let config = extend(base_config(c, Some(&kind)), json!({"samples": samples}));
            let result = with_group!(kind, |g| serde_json::to_value(estimate_component_stats(&g, &cfg))?);
            outcome(config, result, true)
        }
        Command::Classes { group } => {
            let kind = group_kind(group)?;
            let result = with_group!(kind, |g| classes_json(&g, c.cap_enumeration)?);
            outcome(base_config(c, Some(&kind)), result, true)
        }
        Command::Frobenius { group, classes, method } => {
            let kind = group_kind(group)?;
            let triple = match classes {
                Some(s) => {
                    let v: Vec<usize> = parse_list(s, "class triple")?;
                    Some(<[usize; 3]>::try_from(v).map_err(|_| anyhow!(Usage("--classes needs three indices".into())))?)
                }
                None => None,
            };
            let method_name = match method {
                Method::Brute => "brute",
                Method::Character => "character",
            };
            let config = extend(base_config(c, Some(&kind)), json!({"classes": triple, "method": method_name}));
            let result = with_group!(kind, |g| frobenius_json(&g, triple, *method, c)?);
            outcome(config, result, true)
        }
        Command::Chartable { group, export } => {
            let kind = group_kind(group)?;
            let config = extend(base_config(c, Some(&kind)), json!({"export": export.as_ref().map(|p| p.display().to_string())}));
            let table = with_group!(kind, |g| table_for(&g, c.cap_table)?);
            if let Some(path) = export {
                table.save(path)?;
            }
            let doc: Value = serde_json::from_str(&table.to_json())?;
            outcome(config, json!({"degrees": table.degrees(), "table": doc}), true)
        }
        Command::Zeta { group, exponent } => {
            let kind = group_kind(group)?;
            let config = extend(base_config(c, Some(&kind)), json!({"exponent": exponent}));
            let table = with_group!(kind, |g| table_for(&g, c.cap_table)?);
            let degrees = table.degrees();
            outcome(config, json!({"zeta": witten_zeta(&degrees, *exponent), "degrees": degrees}), true)
        }
        Command::Hurwitz { p, e, witness } => {
            let config = extend(base_config(c, None), json!({"p": p, "e": e, "witness": witness}));
            let (p, e) = (*p, *e);
            if !beauville::arith::is_prime(p) || e == 0 {
                bail!(Usage(format!("{p}^{e} is not a prime power")));
            }
            let hurwitz = hurwitz_psl2(p, e);
            let mut result = json!({"hurwitz": hurwitz, "residue_mod_7": p % 7});
            if hurwitz && *witness {
                let g = Psl2Group::new(p, e)?;
                let t = find_generating_triple_psl2(&g, 2, 3, 7)?;
                result["triple"] = triple_json(&g, &t);
            }
            outcome(config, result, hurwitz)
        }
        Command::Triangle { r, s, t } => {
            let config = extend(base_config(c, None), json!({"r": r, "s": s, "t": t}));
            let tt = classify_triangle(*r, *s, *t)?;
            let mut result = serde_json::to_value(tt)?;
            result["measure"] = json!(tt.measure());
            outcome(config, result, true)
        }
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Verify { .. } => "verify",
        Command::Search { .. } => "search",
        Command::Triple { .. } => "triple",
        Command::Classify { .. } => "classify",
        Command::Estimate { .. } => "estimate",
        Command::Stats { .. } => "stats",
        Command::Classes { .. } => "classes",
        Command::Frobenius { .. } => "frobenius",
        Command::Chartable { .. } => "chartable",
        Command::Zeta { .. } => "zeta",
        Command::Hurwitz { .. } => "hurwitz",
        Command::Triangle { .. } => "triangle",
    }
}

fn is_cap_error(err: &anyhow::Error) -> bool {
    let too_large = |e: &GroupError| matches!(e, GroupError::TooLarge { .. });
    if let Some(e) = err.downcast_ref::<GroupError>() {
        return too_large(e);
    }
    if let Some(e) = err.downcast_ref::<BeauvilleError>() {
        return matches!(e, BeauvilleError::CapExceeded { .. }) || matches!(e, BeauvilleError::Group(g) if too_large(g));
    }
    if let Some(e) = err.downcast_ref::<CountingError>() {
        return matches!(e, CountingError::TooManyClasses { .. }) || matches!(e, CountingError::Group(g) if too_large(g));
    }
    false
}

/// Flatten a JSON value into `path<TAB>value` lines.
fn tsv_lines(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                tsv_lines(&if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") }, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                tsv_lines(&format!("{prefix}.{i}"), x, out);
            }
        }
        _ => out.push(format!("{prefix}\t{}", scalar_text(v))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(scalar_text).collect::<Vec<_>>().join(","),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(doc).expect("serializable") + "\n",
        Format::Tsv | Format::Text => {
            let mut lines = Vec::new();
            tsv_lines("", doc, &mut lines);
            if format == Format::Text {
                lines = lines.into_iter().map(|l| l.replacen('\t', ": ", 1)).collect();
            }
            lines.join("\n") + "\n"
        }
    }
}

fn emit(doc: &Value, c: &Common) -> Result<()> {
    let text = render(doc, c.format);
    match &c.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    if let Some(path) = &c.log {
        let mut f = OpenOptions::new().create(true).append(true).open(path).with_context(|| format!("cannot open log {}", path.display()))?;
        writeln!(f, "{}", serde_json::to_string(doc)?)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let c = &cli.common;
    let result = beauville::par::with_workers(c.workers, || dispatch(&cli.command, c));
    match result {
        Ok(out) => {
            let code: u8 = if out.success { 0 } else { 1 };
            let mut doc = json!({"command": command_name(&cli.command), "config": out.config, "result": out.result, "exit_code": code});
            if !c.no_timing {
                doc["elapsed_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
            }
            if let Err(e) = emit(&doc, c) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_cap_error(&e) { 3 } else { 2 })
        }
    }
}
