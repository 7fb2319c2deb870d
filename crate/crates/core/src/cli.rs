//! Command-line front end.
//!
//! Exit codes: 0 when the requested property holds, 1 for a negative
//! mathematical verdict, 2 for usage and input errors. Reports go to the
//! output stream, diagnostics to the error stream.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::catalog::{
    load_catalog, reproduce_paper, scan_3_connected, table1, table1_entry, CatalogError,
    ReproduceError, ReproduceOptions, CHAINS,
};
use crate::groebner::BuchbergerOptions;
use crate::matroid::{Basis, Matroid, MatroidError, RawMatroid};
use crate::toric::{
    elimination_chain, fiber_graph_connected, order_search, parse_x_order, sorting_gb,
    toric_gb_with, verify_white, SearchStrategy, ToricError, Verdict,
};

#[derive(Debug, Parser)]
#[command(
    name = "mtoric",
    version,
    about = "Toric ideals of matroids: Gröbner bases and symmetric exchanges"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for batch commands.
    #[arg(long, global = true, env = "MTORIC_JOBS")]
    jobs: Option<usize>,
    /// Report wall-clock times (otherwise `elapsed_ms` is 0).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Matroid in the text format.
    #[arg(long, value_name = "FILE", conflicts_with = "table1")]
    matroid: Option<PathBuf>,
    /// Built-in table entry, e.g. `M_6`, `m14` or `F_7`.
    #[arg(long, value_name = "ID")]
    table1: Option<String>,
}

#[derive(Debug, Args)]
struct OrderArg {
    /// Term-order file: one variable per line, greatest first.
    #[arg(long, value_name = "FILE")]
    order: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Random,
    HillClimb,
}

impl From<StrategyArg> for SearchStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Random => SearchStrategy::Random,
            StrategyArg::HillClimb => SearchStrategy::HillClimb,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the basis exchange axiom.
    Validate(Input),
    /// Reduced Gröbner basis of the toric ideal.
    Gb {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderArg,
        /// Skip S-pairs whose lcm has x-degree above this bound.
        #[arg(long, value_name = "D")]
        degree_cap: Option<u32>,
    },
    /// Classify the Gröbner basis: quadratic and made of symmetric exchanges?
    VerifyWhite {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Fibers of a degree and their exchange-graph connectivity.
    Fibers {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 2)]
        degree: usize,
    },
    /// Base-sortability and the certified sorting Gröbner basis.
    Sortable {
        #[command(flatten)]
        input: Input,
        /// Also search relabellings of the ground set.
        #[arg(long)]
        all_orderings: bool,
    },
    /// Eliminate the greatest variables of an order, one child per step.
    EliminateChain {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderArg,
        /// Basis to remove (repeatable, in order), e.g. `357`.
        #[arg(long, value_name = "BASIS")]
        remove: Vec<String>,
    },
    /// Search x-orders for a quadratic symmetric-exchange Gröbner basis.
    SearchOrder {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        order: OrderArg,
        #[arg(long, value_enum, default_value = "hill-climb")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 16)]
        budget: usize,
        #[arg(long, default_value_t = 2011)]
        seed: u64,
    },
    /// Run the full pipeline over the built-in table.
    ReproducePaper {
        #[arg(long, value_enum, default_value = "hill-climb")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 16)]
        budget: usize,
        #[arg(long, default_value_t = 2011)]
        seed: u64,
        /// Skip the independent certification pass.
        #[arg(long)]
        no_certify: bool,
    },
    /// Split a catalog into 3-connected matroids and the rest.
    Scan {
        /// Catalog file (`---` between matroids); defaults to the built-in table.
        #[arg(long, value_name = "FILE")]
        catalog: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Reproduce(#[from] ReproduceError),
    #[error("cannot write output: {0}")]
    Output(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Toric(ToricError::Certification(_)) => 1,
            CliError::Reproduce(e) if matches!(e.source, ToricError::Certification(_)) => 1,
            _ => 2,
        }
    }
}

struct Ctx<'a> {
    json: bool,
    timing: bool,
    out: &'a mut Vec<u8>,
    err: &'a mut Vec<u8>,
}

impl Ctx<'_> {
    fn line(&mut self, s: impl AsRef<str>) -> Result<(), CliError> {
        writeln!(self.out, "{}", s.as_ref()).map_err(CliError::Output)
    }

    fn emit<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).expect("report serializes");
        self.line(text)
    }

    fn note(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.err, "{}", s.as_ref());
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn label_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// The selected matroid, its label, and its embedded order if any.
struct Selected {
    label: String,
    matroid: Matroid,
    embedded_order: Option<Vec<Basis>>,
}

fn select(input: &Input) -> Result<Selected, CliError> {
    match (&input.matroid, &input.table1) {
        (Some(path), None) => Ok(Selected {
            label: label_of(path),
            matroid: read(path)?.parse()?,
            embedded_order: None,
        }),
        (None, Some(id)) => {
            let e = table1_entry(id)
                .ok_or_else(|| CliError::Usage(format!("unknown table entry `{id}`")))?;
            Ok(Selected {
                label: e.id,
                matroid: e.matroid,
                embedded_order: e.embedded_order,
            })
        }
        _ => Err(CliError::Usage(
            "exactly one of --matroid FILE or --table1 ID is required".into(),
        )),
    }
}

/// Order from `--order`, else the embedded order, else the basis order.
fn x_order(sel: &Selected, order: &OrderArg) -> Result<Vec<Basis>, CliError> {
    match &order.order {
        Some(path) => Ok(parse_x_order(&read(path)?, &sel.matroid)?),
        None => Ok(sel
            .embedded_order
            .clone()
            .unwrap_or_else(|| sel.matroid.bases().to_vec())),
    }
}

fn code(ok: bool) -> i32 {
    if ok {
        0
    } else {
        1
    }
}

fn cmd_validate(ctx: &mut Ctx, input: &Input) -> Result<i32, CliError> {
    let (label, raw_result) = match (&input.matroid, &input.table1) {
        (Some(path), None) => {
            let raw = RawMatroid::parse(&read(path)?, 0)?;
            (label_of(path), raw.into_matroid())
        }
        _ => {
            let sel = select(input)?;
            (sel.label, Ok(sel.matroid))
        }
    };
    match raw_result {
        Ok(m) => {
            let three = m.is_3_connected();
            if ctx.json {
                ctx.emit(&json!({
                    "matroid": label,
                    "valid": true,
                    "n": m.ground_set_size(),
                    "rank": m.rank(),
                    "bases": m.num_bases(),
                    "three_connected": three,
                }))?;
            } else {
                ctx.line(format!(
                    "{label}: VALID n={} rank={} bases={} 3-connected={three}",
                    m.ground_set_size(),
                    m.rank(),
                    m.num_bases()
                ))?;
            }
            Ok(0)
        }
        Err(MatroidError::ExchangeFailure(v)) => {
            if ctx.json {
                ctx.emit(&json!({
                    "matroid": label,
                    "valid": false,
                    "witness": {
                        "b1": v.b1.elements().collect::<Vec<_>>(),
                        "b2": v.b2.elements().collect::<Vec<_>>(),
                        "alpha": v.alpha,
                    },
                }))?;
            } else {
                ctx.line(format!(
                    "{label}: INVALID exchange fails for B={} B'={} alpha={}",
                    v.b1, v.b2, v.alpha
                ))?;
            }
            Ok(1)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_gb(
    ctx: &mut Ctx,
    input: &Input,
    order: &OrderArg,
    degree_cap: Option<u32>,
) -> Result<i32, CliError> {
    let sel = select(input)?;
    let xs = x_order(&sel, order)?;
    let m = &sel.matroid;
    let opts = BuchbergerOptions {
        // J_M is graded with deg x = rank
        degree_cap: degree_cap.map(|d| d * m.rank().max(1) as u32),
        ..BuchbergerOptions::default()
    };
    let t = toric_gb_with(m, &xs, &opts)?;
    let truncated = t.stats.pairs_over_cap > 0;
    let elements = t.gb.format_elements();
    if ctx.json {
        ctx.emit(&json!({
            "matroid": sel.label,
            "order": t.gb.order.describe(&t.gb.universe),
            "gb_size": t.gb.len(),
            "truncated": truncated,
            "elements": elements,
        }))?;
    } else {
        for e in &elements {
            ctx.line(e)?;
        }
        if truncated {
            ctx.note(format!(
                "degree cap reached: {} S-pairs skipped, basis may be incomplete",
                t.stats.pairs_over_cap
            ));
        }
    }
    Ok(0)
}

fn cmd_verify_white(ctx: &mut Ctx, input: &Input, order: &OrderArg) -> Result<i32, CliError> {
    let sel = select(input)?;
    let xs = x_order(&sel, order)?;
    let mut report = verify_white(&sel.matroid, &xs)?.report;
    report.matroid = sel.label.clone();
    if ctx.json {
        ctx.emit(&report.record(ctx.timing))?;
    } else {
        ctx.line(format!(
            "{}: {} (gb_size={}, degrees {:?})",
            sel.label, report.verdict, report.gb_size, report.degree_histogram
        ))?;
        for q in report.quadrics.iter().filter(|q| q.witness.is_none()) {
            ctx.line(format!("  no exchange: {}", q.binomial))?;
        }
    }
    Ok(code(report.verdict == Verdict::WhiteGbOk))
}

fn cmd_fibers(ctx: &mut Ctx, input: &Input, degree: usize) -> Result<i32, CliError> {
    let sel = select(input)?;
    let fc = fiber_graph_connected(&sel.matroid, degree)?;
    let bases = sel.matroid.bases();
    let show = |members: &[Vec<usize>]| -> Vec<String> {
        members
            .iter()
            .map(|mem| {
                mem.iter()
                    .map(|&i| format!("x{}", bases[i].label()))
                    .collect::<Vec<_>>()
                    .join("*")
            })
            .collect()
    };
    if ctx.json {
        ctx.emit(&json!({
            "matroid": sel.label,
            "degree": degree,
            "fibers": fc.fibers,
            "nontrivial": fc.nontrivial,
            "connected": fc.connected(),
            "first_disconnected": fc.first_disconnected.as_ref().map(|f| json!({
                "image": f.image,
                "members": show(&f.members),
            })),
        }))?;
    } else {
        ctx.line(format!(
            "{}: degree {degree}: {} fibers, {} with several members, {}",
            sel.label,
            fc.fibers,
            fc.nontrivial,
            if fc.connected() {
                "all connected"
            } else {
                "DISCONNECTED"
            }
        ))?;
        if let Some(f) = &fc.first_disconnected {
            ctx.line(format!(
                "  image {:?}: {}",
                f.image,
                show(&f.members).join(", ")
            ))?;
        }
    }
    Ok(code(fc.connected()))
}

fn cmd_sortable(ctx: &mut Ctx, input: &Input, all_orderings: bool) -> Result<i32, CliError> {
    let sel = select(input)?;
    let m = &sel.matroid;
    let (m, relabelling) = match m.base_sortability() {
        Ok(()) => (m.clone(), None),
        Err(_) if all_orderings => match m.find_sorting_labelling() {
            Some(perm) => (m.relabel(&perm), Some(perm)),
            None => (m.clone(), None),
        },
        Err(_) => (m.clone(), None),
    };
    match m.base_sortability() {
        Ok(()) => {
            let s = sorting_gb(&m)?;
            if ctx.json {
                let mut record = s.report.record(ctx.timing);
                record.matroid = sel.label.clone();
                ctx.emit(&json!({
                    "matroid": sel.label,
                    "sortable": true,
                    "relabelling": relabelling,
                    "report": record,
                    "spairs_checked": s.pairs_checked,
                    "normal_forms_checked": s.monomials_checked,
                }))?;
            } else {
                let via = relabelling
                    .map(|p| format!(" after relabelling {p:?}"))
                    .unwrap_or_default();
                ctx.line(format!(
                    "{}: SORTABLE{via}; sorting basis of {} quadrics, {}",
                    sel.label,
                    s.gb.len(),
                    s.report.verdict
                ))?;
            }
            Ok(code(s.report.verdict == Verdict::WhiteGbOk))
        }
        Err((b1, b2)) => {
            if ctx.json {
                ctx.emit(&json!({
                    "matroid": sel.label,
                    "sortable": false,
                    "witness": [b1.elements().collect::<Vec<_>>(), b2.elements().collect::<Vec<_>>()],
                }))?;
            } else {
                ctx.line(format!(
                    "{}: NOT_SORTABLE: sorting {b1} and {b2} leaves the basis set",
                    sel.label
                ))?;
            }
            Ok(1)
        }
    }
}

fn cmd_eliminate_chain(
    ctx: &mut Ctx,
    input: &Input,
    order: &OrderArg,
    remove: &[String],
) -> Result<i32, CliError> {
    let sel = select(input)?;
    let xs = x_order(&sel, order)?;
    let removed: Vec<Basis> = if remove.is_empty() {
        let chain = CHAINS
            .iter()
            .find(|(p, _)| *p == sel.label)
            .ok_or_else(|| CliError::Usage("--remove is required for this matroid".into()))?;
        let parent = table1_entry(chain.0).expect("built-in id");
        let mut have = parent.removed.clone();
        let mut out = Vec::new();
        for c in chain.1 {
            for b in table1_entry(c).expect("built-in id").removed {
                if !have.contains(&b) {
                    have.push(b);
                    out.push(b);
                }
            }
        }
        out
    } else {
        remove
            .iter()
            .map(|s| {
                Basis::parse_label(s).ok_or_else(|| CliError::Usage(format!("bad basis `{s}`")))
            })
            .collect::<Result<_, _>>()?
    };
    let links = elimination_chain(&sel.matroid, &xs, &removed)?;
    let known = table1();
    let mut all_ok = true;
    let mut records = Vec::new();
    for link in &links {
        let name = known
            .iter()
            .find(|e| e.matroid == link.child)
            .map(|e| e.id.clone())
            .unwrap_or_else(|| format!("{} - x{}", sel.label, link.removed.label()));
        all_ok &= link.report.verdict == Verdict::WhiteGbOk;
        let mut record = link.report.record(ctx.timing);
        record.matroid = name.clone();
        if !ctx.json {
            ctx.line(format!(
                "removed x{} -> {name}: {} (gb_size={})",
                link.removed.label(),
                link.report.verdict,
                link.report.gb_size
            ))?;
        }
        records.push(record);
    }
    if ctx.json {
        ctx.emit(&records)?;
    }
    Ok(code(all_ok))
}

fn cmd_search_order(
    ctx: &mut Ctx,
    input: &Input,
    order: &OrderArg,
    strategy: StrategyArg,
    budget: usize,
    seed: u64,
) -> Result<i32, CliError> {
    let sel = select(input)?;
    let initial = order
        .order
        .as_ref()
        .map(|_| x_order(&sel, order))
        .transpose()?;
    let out = order_search(
        &sel.matroid,
        initial.as_deref().or(sel.embedded_order.as_deref()),
        strategy.into(),
        budget,
        seed,
    )?;
    let mut report = out.best;
    report.matroid = sel.label.clone();
    let order_labels: Vec<String> = out
        .best_order
        .iter()
        .map(|b| format!("x{}", b.label()))
        .collect();
    if ctx.json {
        ctx.emit(&json!({
            "report": report.record(ctx.timing),
            "best_order": order_labels,
            "evaluations": out.evaluations,
        }))?;
    } else {
        let (deg, nonex, size) = report.objective();
        ctx.line(format!(
            "{}: best {} after {} evaluations (max degree {deg}, {nonex} non-exchange quadrics, gb_size {size})",
            sel.label, report.verdict, out.evaluations
        ))?;
        ctx.line(format!("order: {}", order_labels.join(" > ")))?;
    }
    Ok(code(report.verdict == Verdict::WhiteGbOk))
}

fn cmd_reproduce(ctx: &mut Ctx, opts: ReproduceOptions) -> Result<i32, CliError> {
    let start = Instant::now();
    let summary = reproduce_paper(&opts)?;
    if ctx.json {
        ctx.emit(&summary)?;
    } else {
        for e in &summary.entries {
            let alias = e
                .alias
                .as_deref()
                .map(|a| format!(" ({a})"))
                .unwrap_or_default();
            ctx.line(format!("{}{alias}: {} via {}", e.id, e.status, e.method))?;
            if let Some(d) = &e.dual {
                ctx.line(format!(
                    "{}: {} (degree-2 fibers transported: {})",
                    d.id,
                    d.status,
                    d.fibers_match && d.exchanges_match
                ))?;
            }
        }
        ctx.line(format!(
            "processed {}, white_ok {}, open {}, skipped {}",
            summary.processed, summary.white_ok, summary.open, summary.skipped
        ))?;
    }
    if ctx.timing {
        ctx.note(format!("finished in {:.1?}", start.elapsed()));
    }
    Ok(code(summary.consistent()))
}

fn cmd_scan(ctx: &mut Ctx, catalog: Option<&Path>) -> Result<i32, CliError> {
    let (labels, ms): (Vec<String>, Vec<Matroid>) = match catalog {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(|source| CliError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let ms = load_catalog(file)?;
            ((1..=ms.len()).map(|i| format!("#{i}")).collect(), ms)
        }
        None => table1().into_iter().map(|e| (e.id, e.matroid)).unzip(),
    };
    let scan = scan_3_connected(&ms);
    let (yes, no) = scan.counts();
    if ctx.json {
        ctx.emit(&json!({
            "total": ms.len(),
            "three_connected": yes,
            "other": no,
            "connected": scan.connected.iter().map(|&i| &labels[i]).collect::<Vec<_>>(),
            "separations": scan.separated.iter()
                .map(|(i, x)| json!({"matroid": labels[*i], "set": x.elements().collect::<Vec<_>>()}))
                .collect::<Vec<_>>(),
        }))?;
    } else {
        for (i, x) in &scan.separated {
            ctx.line(format!("{}: separated by {x}", labels[*i]))?;
        }
        ctx.line(format!(
            "{} matroids: {yes} 3-connected, {no} other",
            ms.len()
        ))?;
    }
    Ok(0)
}

fn dispatch(ctx: &mut Ctx, command: &Command) -> Result<i32, CliError> {
    match command {
        Command::Validate(input) => cmd_validate(ctx, input),
        Command::Gb {
            input,
            order,
            degree_cap,
        } => cmd_gb(ctx, input, order, *degree_cap),
        Command::VerifyWhite { input, order } => cmd_verify_white(ctx, input, order),
        Command::Fibers { input, degree } => cmd_fibers(ctx, input, *degree),
        Command::Sortable {
            input,
            all_orderings,
        } => cmd_sortable(ctx, input, *all_orderings),
        Command::EliminateChain {
            input,
            order,
            remove,
        } => cmd_eliminate_chain(ctx, input, order, remove),
        Command::SearchOrder {
            input,
            order,
            strategy,
            budget,
            seed,
        } => cmd_search_order(ctx, input, order, *strategy, *budget, *seed),
        Command::ReproducePaper {
            strategy,
            budget,
            seed,
            no_certify,
        } => cmd_reproduce(
            ctx,
            ReproduceOptions {
                search_strategy: (*strategy).into(),
                search_budget: *budget,
                seed: *seed,
                certify_samples: if *no_certify { None } else { Some(100) },
                timing: ctx.timing,
            },
        ),
        Command::Scan { catalog } => cmd_scan(ctx, catalog.as_deref()),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let is_info = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            if is_info {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{}", e.render());
            return 2;
        }
    };
    // commands write into buffers so they can run inside a worker pool
    let (mut out_buf, mut err_buf) = (Vec::new(), Vec::new());
    let mut ctx = Ctx {
        json: cli.json,
        timing: cli.timing,
        out: &mut out_buf,
        err: &mut err_buf,
    };
    let result = match cli.jobs {
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| dispatch(&mut ctx, &cli.command)),
            Err(e) => Err(CliError::Usage(format!("cannot start {k} workers: {e}"))),
        },
        None => dispatch(&mut ctx, &cli.command),
    };
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            ctx.note(format!("error: {e}"));
            e.exit_code()
        }
    };
    let _ = out.write_all(&out_buf);
    let _ = err.write_all(&err_buf);
    code
}
