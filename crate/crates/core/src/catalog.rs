//! The rank-3 matroids on seven elements used throughout, their embedded
//! term orders, catalog ingestion and batch scans.

use std::io::Read;

use serde::Serialize;
use thiserror::Error;

use crate::groebner::GroebnerBasis;

use crate::matroid::{k_subsets, Basis, Matroid, MatroidError, RawMatroid};
use crate::toric::{
    certify_toric, duality_transport, elimination_chain, order_search, sorting_gb, verify_white,
    GbReport, GbReportRecord, SearchStrategy, ToricError, Verdict,
};

/// One row of the built-in table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: String,
    pub alias: Option<String>,
    pub matroid: Matroid,
    /// Triples of `{1..7}` that are not bases.
    pub removed: Vec<Basis>,
    /// x-variables of the embedded lexicographic order, greatest first.
    pub embedded_order: Option<Vec<Basis>>,
}

const ROWS: [(&str, Option<&str>, &[&str]); 18] = [
    ("M_1", Some("U_{3,7}"), &[]),
    ("M_2", None, &["123"]),
    ("M_3", None, &["123", "456"]),
    ("M_4", None, &["123", "345"]),
    ("M_5", None, &["123", "167", "345"]),
    ("M_6", None, &["123", "145", "167"]),
    ("M_7", None, &["123", "145", "246"]),
    ("M_8", None, &["123", "145", "246", "357"]),
    ("M_9", None, &["123", "145", "246", "347"]),
    ("M_10", Some("P_7"), &["123", "145", "246", "347", "567"]),
    ("M_11", None, &["123", "145", "246", "356"]),
    ("M_12", None, &["123", "145", "246", "356", "347"]),
    (
        "M_13",
        Some("F_7^-"),
        &["123", "145", "246", "356", "347", "257"],
    ),
    (
        "M_14",
        Some("F_7"),
        &["123", "145", "246", "356", "347", "257", "167"],
    ),
    ("M_15", None, &["123", "124", "134", "234"]),
    ("M_16", None, &["123", "124", "134", "234", "456"]),
    ("M_17", None, &["123", "124", "134", "167", "234", "456"]),
    (
        "M_18",
        Some("O_7"),
        &["123", "124", "134", "234", "156", "257", "367"],
    ),
];

const ORDERS: [(&str, &str); 5] = [
    (
        "M_6",
        "236 126 245 136 457 257 156 125 127 345 146 267 456 124 357 347 356 247 147 157 467 235 237 246 367 567 346 256 137 134 234 135",
    ),
    (
        "M_7",
        "357 356 247 267 467 567 256 134 156 137 234 456 367 135 167 157 257 237 347 146 124 147 126 457 245 345 346 125 127 236 235 136",
    ),
    (
        "M_9",
        "567 127 237 137 235 367 234 247 357 356 256 124 134 135 147 257 456 146 267 126 346 467 167 125 245 136 457 236 156 345 157",
    ),
    (
        "M_11",
        "347 257 127 237 137 367 247 234 357 567 256 124 147 157 134 235 456 146 236 126 467 346 136 125 245 167 345 267 156 457 135",
    ),
    (
        "M_18",
        "146 137 167 126 136 246 236 247 245 135 456 357 237 457 145 267 256 345 125 157 346 347 127 235 356 567 467 147",
    ),
];

/// Ids whose bases are sorted by the identity labelling.
pub const SORTABLE_IDS: [&str; 8] = ["M_1", "M_2", "M_3", "M_4", "M_5", "M_15", "M_16", "M_17"];
/// Ids with an embedded term order.
pub const ORDERED_IDS: [&str; 5] = ["M_6", "M_7", "M_9", "M_11", "M_18"];

/// Elimination chains: parent id, then the children obtained by dropping
/// the leading variables of the parent's embedded order one by one.
pub const CHAINS: [(&str, &[&str]); 3] = [
    ("M_7", &["M_8"]),
    ("M_9", &["M_10"]),
    ("M_11", &["M_12", "M_13"]),
];

fn triple(label: &str) -> Basis {
    Basis::parse_label(label).expect("static triple")
}

/// All 35 three-element subsets of `{1..7}`.
pub fn p3_of_7() -> Vec<Basis> {
    k_subsets(7, 3)
}

/// The 18 three-connected rank-3 matroids on `{1..7}`.
pub fn table1() -> Vec<CatalogEntry> {
    ROWS.iter()
        .map(|&(id, alias, removed)| {
            let removed: Vec<Basis> = removed.iter().map(|s| triple(s)).collect();
            let bases = p3_of_7()
                .into_iter()
                .filter(|b| !removed.contains(b))
                .collect();
            let matroid = Matroid::new(7, bases)
                .unwrap_or_else(|e| panic!("built-in matroid {id} is invalid: {e}"));
            let embedded_order = ORDERS
                .iter()
                .find(|(oid, _)| *oid == id)
                .map(|(_, list)| list.split_whitespace().map(triple).collect());
            CatalogEntry {
                id: id.to_string(),
                alias: alias.map(str::to_string),
                matroid,
                removed,
                embedded_order,
            }
        })
        .collect()
}

/// Looks up a built-in entry by id (`M_14`, `m14` and `14` are accepted) or alias.
pub fn table1_entry(id: &str) -> Option<CatalogEntry> {
    let wanted = normalize_id(id);
    table1()
        .into_iter()
        .find(|e| normalize_id(&e.id) == wanted || e.alias.as_deref() == Some(id))
}

fn normalize_id(id: &str) -> String {
    let digits: String = id.chars().filter(|c| c.is_ascii_digit()).collect();
    let stripped = id.trim_start_matches(['M', 'm']).trim_start_matches('_');
    if !digits.is_empty() && digits == stripped {
        format!("M_{digits}")
    } else {
        id.to_string()
    }
}

/// The Fano plane built from its point-line incidence: points `1..7`, lines
/// `{i, i+1, i+3} mod 7`, relabelled so that it can be compared with `M_14`.
pub fn fano_from_lines() -> Matroid {
    let lines: Vec<Basis> = (0..7)
        .map(|i| Basis::from_elements([i % 7 + 1, (i + 1) % 7 + 1, (i + 3) % 7 + 1]))
        .collect();
    let bases = p3_of_7()
        .into_iter()
        .filter(|b| !lines.contains(b))
        .collect();
    Matroid::new(7, bases).expect("Fano plane is a matroid")
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: MatroidError,
    },
    #[error(transparent)]
    Parse(MatroidError),
}

/// Reads a stream of matroids in the text format. Matroids are separated by
/// lines consisting of `---`; a single matroid needs no separator.
pub fn load_catalog<R: Read>(mut source: R) -> Result<Vec<Matroid>, CatalogError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    parse_catalog(&text)
}

pub fn parse_catalog(text: &str) -> Result<Vec<Matroid>, CatalogError> {
    let mut out = Vec::new();
    let mut block = String::new();
    let mut block_start = 0usize;
    let lines: Vec<&str> = text.lines().collect();
    for (i, line) in lines.iter().enumerate() {
        if line.trim() == "---" {
            flush_block(&block, block_start, &mut out)?;
            block.clear();
            block_start = i + 1;
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    flush_block(&block, block_start, &mut out)?;
    Ok(out)
}

fn flush_block(block: &str, offset: usize, out: &mut Vec<Matroid>) -> Result<(), CatalogError> {
    let content = block
        .lines()
        .any(|l| !l.split('#').next().unwrap_or("").trim().is_empty());
    if !content {
        return Ok(());
    }
    let raw = RawMatroid::parse(block, offset).map_err(CatalogError::Parse)?;
    let header_line = raw.header_line;
    let lines = raw.lines.clone();
    let bases = raw.bases.clone();
    match raw.into_matroid() {
        Ok(m) => {
            out.push(m);
            Ok(())
        }
        Err(source) => {
            // point at the offending basis when there is one
            let line = match &source {
                MatroidError::UnequalCardinality { basis, .. }
                | MatroidError::DuplicateBasis(basis) => bases
                    .iter()
                    .rposition(|b| b == basis)
                    .map(|i| lines[i])
                    .unwrap_or(header_line),
                MatroidError::ExchangeFailure(v) => bases
                    .iter()
                    .position(|b| *b == v.b1)
                    .map(|i| lines[i])
                    .unwrap_or(header_line),
                _ => header_line,
            };
            Err(CatalogError::Invalid { line, source })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityScan {
    /// Indices (into the input) of the 3-connected matroids.
    pub connected: Vec<usize>,
    /// Indices of the rest, with a separating set each.
    pub separated: Vec<(usize, Basis)>,
}

impl ConnectivityScan {
    pub fn counts(&self) -> (usize, usize) {
        (self.connected.len(), self.separated.len())
    }
}

pub fn scan_3_connected(ms: &[Matroid]) -> ConnectivityScan {
    use rayon::prelude::*;
    let results: Vec<Result<(), Basis>> = ms.par_iter().map(|m| m.three_connectivity()).collect();
    let mut scan = ConnectivityScan {
        connected: Vec::new(),
        separated: Vec::new(),
    };
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(()) => scan.connected.push(i),
            Err(x) => scan.separated.push((i, x)),
        }
    }
    scan
}

/// Knobs for [`reproduce_paper`]; the defaults are what the CLI uses.
#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub search_strategy: SearchStrategy,
    pub search_budget: usize,
    pub seed: u64,
    /// Sampled normal forms checked against fiber minima per reported basis;
    /// `None` skips certification.
    pub certify_samples: Option<usize>,
    pub timing: bool,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            search_strategy: SearchStrategy::HillClimb,
            search_budget: 16,
            seed: 2011,
            certify_samples: Some(100),
            timing: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateRecord {
    pub spairs_checked: usize,
    pub normal_forms_checked: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualRecord {
    pub id: String,
    pub status: String,
    pub degree2_fibers: usize,
    pub fibers_match: bool,
    pub exchanges_match: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryReport {
    pub id: String,
    pub alias: Option<String>,
    pub method: String,
    pub status: String,
    pub report: GbReportRecord,
    pub certificate: Option<CertificateRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual: Option<DualRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_evaluations: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproductionSummary {
    pub processed: usize,
    pub white_ok: usize,
    pub open: usize,
    pub skipped: usize,
    pub entries: Vec<EntryReport>,
    pub notes: Vec<String>,
}

impl ReproductionSummary {
    /// True when every entry is either verified or honestly left open.
    pub fn consistent(&self) -> bool {
        self.white_ok + self.open + self.skipped == self.processed
    }
}

#[derive(Debug, Error)]
#[error("{id}: {source}")]
pub struct ReproduceError {
    pub id: String,
    #[source]
    pub source: ToricError,
}

/// The matroid whose status stays open unless a search certifies an order.
pub const OPEN_ID: &str = "M_14";

const M18_NOTE: &str = "M_18 is verified directly with its embedded order; it is not \
obtainable by deleting greatest variables from any embedded parent order, so it is not \
also listed as an elimination result";

fn entry_status(report: &GbReport) -> String {
    report.verdict.to_string()
}

fn certificate(
    m: &Matroid,
    gb: &GroebnerBasis,
    opts: &ReproduceOptions,
    id: &str,
) -> Result<Option<CertificateRecord>, ReproduceError> {
    let Some(samples) = opts.certify_samples else {
        return Ok(None);
    };
    let wrap = |source| ReproduceError {
        id: id.to_string(),
        source,
    };
    let spairs_checked = certify_toric(m, gb, samples, opts.seed).map_err(wrap)?;
    Ok(Some(CertificateRecord {
        spairs_checked,
        normal_forms_checked: samples,
    }))
}

fn entry(
    e: &CatalogEntry,
    method: &str,
    report: &GbReport,
    certificate: Option<CertificateRecord>,
    timing: bool,
) -> EntryReport {
    let mut record = report.record(timing);
    record.matroid = e.id.clone();
    EntryReport {
        id: e.id.clone(),
        alias: e.alias.clone(),
        method: method.to_string(),
        status: entry_status(report),
        report: record,
        certificate,
        dual: None,
        search_evaluations: None,
    }
}

enum Task {
    Sorting(&'static str),
    Ordered(&'static str),
    Chain(&'static str, &'static [&'static str]),
    Open,
}

fn run_task(task: &Task, opts: &ReproduceOptions) -> Result<Vec<EntryReport>, ReproduceError> {
    let get = |id: &str| table1_entry(id).expect("built-in id");
    let fail = |id: &str| {
        let id = id.to_string();
        move |source| ReproduceError { id, source }
    };
    match *task {
        Task::Sorting(id) => {
            let e = get(id);
            let s = sorting_gb(&e.matroid).map_err(fail(id))?;
            let cert = Some(CertificateRecord {
                spairs_checked: s.pairs_checked,
                normal_forms_checked: s.monomials_checked,
            });
            Ok(vec![entry(&e, "sorting", &s.report, cert, opts.timing)])
        }
        Task::Ordered(id) => {
            let e = get(id);
            let order = e.embedded_order.as_deref().expect("ordered id");
            let w = verify_white(&e.matroid, order).map_err(fail(id))?;
            let cert = certificate(&e.matroid, &w.gb, opts, id)?;
            Ok(vec![entry(
                &e,
                "embedded order",
                &w.report,
                cert,
                opts.timing,
            )])
        }
        Task::Chain(parent, children) => {
            let p = get(parent);
            let order = p.embedded_order.as_deref().expect("ordered parent");
            let kids: Vec<CatalogEntry> = children.iter().map(|c| get(c)).collect();
            let mut removed = Vec::new();
            let mut have = p.removed.clone();
            for k in &kids {
                let extra: Vec<Basis> = k
                    .removed
                    .iter()
                    .copied()
                    .filter(|b| !have.contains(b))
                    .collect();
                removed.extend(extra.iter().copied());
                have.extend(extra);
            }
            let links = elimination_chain(&p.matroid, order, &removed).map_err(fail(parent))?;
            let mut out = Vec::new();
            for (k, link) in kids.iter().zip(&links) {
                if link.child != k.matroid {
                    return Err(ReproduceError {
                        id: k.id.clone(),
                        source: ToricError::OrderMismatch(format!(
                            "elimination from {parent} does not produce {}",
                            k.id
                        )),
                    });
                }
                let cert = certificate(&k.matroid, &link.gb, opts, &k.id)?;
                let method = format!("elimination from {parent}");
                out.push(entry(k, &method, &link.report, cert, opts.timing));
            }
            Ok(out)
        }
        Task::Open => {
            let e = get(OPEN_ID);
            let found = order_search(
                &e.matroid,
                None,
                opts.search_strategy,
                opts.search_budget,
                opts.seed,
            )
            .map_err(fail(OPEN_ID))?;
            let transport = duality_transport(&e.matroid).map_err(fail(OPEN_ID))?;
            let mut out = entry(&e, "order search", &found.best, None, opts.timing);
            out.search_evaluations = Some(found.evaluations);
            let mut settled = false;
            if found.best.verdict == Verdict::WhiteGbOk {
                // only a certified basis may close the case
                let w = verify_white(&e.matroid, &found.best_order).map_err(fail(OPEN_ID))?;
                let samples = opts.certify_samples.unwrap_or(100);
                let spairs =
                    certify_toric(&e.matroid, &w.gb, samples, opts.seed).map_err(fail(OPEN_ID))?;
                out.certificate = Some(CertificateRecord {
                    spairs_checked: spairs,
                    normal_forms_checked: samples,
                });
                settled = true;
            }
            out.status = if settled {
                Verdict::WhiteGbOk.to_string()
            } else {
                "OPEN".into()
            };
            out.dual = Some(DualRecord {
                id: format!("{OPEN_ID}*"),
                status: if settled && transport.holds() {
                    "TRANSPORTED".into()
                } else {
                    "OPEN".into()
                },
                degree2_fibers: transport.fibers,
                fibers_match: transport.fibers_match,
                exchanges_match: transport.exchanges_match,
            });
            Ok(vec![out])
        }
    }
}

fn id_number(id: &str) -> usize {
    id.trim_start_matches("M_").parse().unwrap_or(usize::MAX)
}

/// Runs the whole pipeline over the built-in table. Work is spread over the
/// current rayon pool; the result does not depend on scheduling.
pub fn reproduce_paper(opts: &ReproduceOptions) -> Result<ReproductionSummary, ReproduceError> {
    use rayon::prelude::*;
    let mut tasks: Vec<Task> = vec![Task::Open];
    tasks.extend(ORDERED_IDS.iter().map(|&id| Task::Ordered(id)));
    tasks.extend(CHAINS.iter().map(|&(p, c)| Task::Chain(p, c)));
    tasks.extend(SORTABLE_IDS.iter().map(|&id| Task::Sorting(id)));
    let results: Vec<Result<Vec<EntryReport>, ReproduceError>> =
        tasks.par_iter().map(|t| run_task(t, opts)).collect();
    let mut entries = Vec::new();
    for r in results {
        entries.extend(r?);
    }
    entries.sort_by_key(|e| id_number(&e.id));
    let white = Verdict::WhiteGbOk.to_string();
    let white_ok = entries.iter().filter(|e| e.status == white).count();
    let open = entries.iter().filter(|e| e.status == "OPEN").count();
    Ok(ReproductionSummary {
        processed: entries.len(),
        white_ok,
        open,
        skipped: 0,
        entries,
        notes: vec![M18_NOTE.to_string()],
    })
}
