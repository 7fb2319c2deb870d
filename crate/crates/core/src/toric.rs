//! Toric ideals of matroids.
//!
//! `I_M` is the kernel of `x_B -> prod_{l in B} t_l`. Gröbner bases of `I_M`
//! are obtained by elimination: a lexicographic Gröbner basis of the graph
//! ideal `J_M = <x_B - prod t_l>` with every `t` above every `x`, with the
//! `t`-block then discarded. The fiber enumeration in this module is an
//! independent description of the same kernel, degree by degree.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::groebner::{
    self, buchberger, certify, eliminate, reduce_gb, Binomial, BuchbergerOptions, BuchbergerStats,
    GbError, GroebnerBasis, Monomial, TermOrder, Variable, VariableUniverse,
};
use crate::matroid::{Basis, ExchangeWitness, Matroid, MatroidError};

#[derive(Debug, Error)]
pub enum ToricError {
    #[error(transparent)]
    Matroid(#[from] MatroidError),
    #[error(transparent)]
    Gb(#[from] GbError),
    #[error("term order does not match the bases: {0}")]
    OrderMismatch(String),
    #[error("matroid is not base-sortable: pair {0} {1} fails")]
    NotSortable(Basis, Basis),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("fiber enumeration needs {monomials} monomials, limit is {limit}")]
    FiberGuard { monomials: u64, limit: u64 },
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("removed bases must lead the parent order: position {position} holds {found}, expected {expected}")]
    ChainPrefix {
        position: usize,
        expected: Basis,
        found: Basis,
    },
    #[error("child after removing {removed} is not a matroid: {source}")]
    ChildInvalid {
        removed: Basis,
        #[source]
        source: MatroidError,
    },
}

/// `J_M` with its ring.
#[derive(Debug, Clone)]
pub struct GraphIdeal {
    pub universe: VariableUniverse,
    /// `prod t_l - x_B`, one per basis, marked for `t > x`.
    pub generators: Vec<Binomial>,
    /// `deg t_i = 1`, `deg x_B = rank`; makes every generator homogeneous.
    pub grading: Vec<u32>,
}

pub fn build_graph_ideal(m: &Matroid) -> GraphIdeal {
    let n = m.ground_set_size();
    let universe = VariableUniverse::for_graph_ideal(n, m.bases());
    let nvars = universe.len();
    let generators = m
        .bases()
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let mut t = Monomial::unit(nvars);
            let exps: Vec<u8> = (0..nvars)
                .map(|v| u8::from(v < n && b.contains(v + 1)))
                .collect();
            if !exps.is_empty() {
                t = Monomial::from_exponents(&exps);
            }
            Binomial {
                lead: t,
                trail: Monomial::variable(nvars, n + k),
            }
        })
        .collect();
    let grading = (0..nvars)
        .map(|v| if v < n { 1 } else { m.rank() as u32 })
        .collect();
    GraphIdeal {
        universe,
        generators,
        grading,
    }
}

/// Positions of `x_order` inside `m.bases()`; `x_order` must be a permutation.
fn x_ranking(m: &Matroid, x_order: &[Basis]) -> Result<Vec<usize>, ToricError> {
    if x_order.len() != m.num_bases() {
        return Err(ToricError::OrderMismatch(format!(
            "order lists {} variables, the matroid has {} bases",
            x_order.len(),
            m.num_bases()
        )));
    }
    let mut seen = vec![false; m.num_bases()];
    let mut ranking = Vec::with_capacity(x_order.len());
    for &b in x_order {
        let idx = m
            .basis_index(b)
            .ok_or_else(|| ToricError::OrderMismatch(format!("x{} is not a basis", b.label())))?;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(ToricError::OrderMismatch(format!(
                "x{} listed twice",
                b.label()
            )));
        }
        ranking.push(idx);
    }
    Ok(ranking)
}

/// `t_1 > ... > t_n > x_order` on the ring of `J_M`.
pub fn elimination_order(m: &Matroid, x_order: &[Basis]) -> Result<TermOrder, ToricError> {
    let n = m.ground_set_size();
    let ranking = (0..n)
        .chain(x_ranking(m, x_order)?.into_iter().map(|i| n + i))
        .collect();
    Ok(TermOrder::lex(ranking)?)
}

/// Reduced Gröbner basis of `I_M` together with engine statistics.
#[derive(Debug, Clone)]
pub struct ToricGb {
    pub gb: GroebnerBasis,
    /// Size of the reduced Gröbner basis of `J_M`.
    pub graph_gb_size: usize,
    pub stats: BuchbergerStats,
}

/// Reduced Gröbner basis of `I_M` under lex on `x_order` (greatest first).
pub fn toric_gb(m: &Matroid, x_order: &[Basis]) -> Result<ToricGb, ToricError> {
    toric_gb_with(m, x_order, &BuchbergerOptions::default())
}

pub fn toric_gb_with(
    m: &Matroid,
    x_order: &[Basis],
    opts: &BuchbergerOptions,
) -> Result<ToricGb, ToricError> {
    let order = elimination_order(m, x_order)?;
    let j = build_graph_ideal(m);
    let opts = BuchbergerOptions {
        grading: Some(j.grading.clone()),
        ..opts.clone()
    };
    let (gb, stats) = buchberger(&j.generators, &j.universe, &order, &opts)?;
    let gb = reduce_gb(&gb)?;
    let graph_gb_size = gb.len();
    let t_block: Vec<usize> = (0..m.ground_set_size()).collect();
    let gb = eliminate(&gb, &t_block)?;
    Ok(ToricGb {
        gb,
        graph_gb_size,
        stats,
    })
}

/// Exponent vector of `pi_M(m)` over the ground set.
pub fn image(m: &Monomial, universe: &VariableUniverse, n: usize) -> Vec<u32> {
    let mut img = vec![0u32; n];
    for (v, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        match universe.variable(v) {
            Variable::T(i) => img[i - 1] += u32::from(e),
            Variable::X(b) => {
                for l in b.elements() {
                    img[l - 1] += u32::from(e);
                }
            }
        }
    }
    img
}

/// Whether both sides of `b` have the same image under `pi_M`.
pub fn in_kernel(b: &Binomial, universe: &VariableUniverse, n: usize) -> bool {
    image(&b.lead, universe, n) == image(&b.trail, universe, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    WhiteGbOk,
    NonQuadratic,
    QuadraticNotExchange,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::WhiteGbOk => "WHITE_GB_OK",
            Verdict::NonQuadratic => "NON_QUADRATIC",
            Verdict::QuadraticNotExchange => "QUADRATIC_NOT_EXCHANGE",
        })
    }
}

/// A quadric `x_{B1} x_{B2} - x_{B3} x_{B4}` and the exchange explaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadricCheck {
    pub binomial: String,
    pub lead: (Basis, Basis),
    pub trail: (Basis, Basis),
    pub witness: Option<ExchangeWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GbReport {
    pub matroid: String,
    pub order: String,
    pub gb_size: usize,
    pub degree_histogram: BTreeMap<u32, usize>,
    pub quadrics: Vec<QuadricCheck>,
    pub verdict: Verdict,
    pub elapsed_ms: u64,
}

/// Serialized form of a [`GbReport`]; field order is part of the format.
#[derive(Debug, Clone, Serialize)]
pub struct GbReportRecord {
    pub matroid: String,
    pub order: String,
    pub gb_size: usize,
    pub degree_histogram: BTreeMap<u32, usize>,
    pub verdict: Verdict,
    pub non_exchange_quadrics: Vec<String>,
    pub elapsed_ms: u64,
}

impl GbReport {
    pub fn max_degree(&self) -> u32 {
        self.degree_histogram
            .keys()
            .next_back()
            .copied()
            .unwrap_or(0)
    }

    pub fn non_exchange_count(&self) -> usize {
        self.quadrics.iter().filter(|q| q.witness.is_none()).count()
    }

    /// Search objective: smaller is better.
    pub fn objective(&self) -> (u32, usize, usize) {
        (self.max_degree(), self.non_exchange_count(), self.gb_size)
    }

    /// `elapsed_ms` is reported as 0 unless `timing` is set, so that output
    /// is reproducible byte for byte.
    pub fn record(&self, timing: bool) -> GbReportRecord {
        GbReportRecord {
            matroid: self.matroid.clone(),
            order: self.order.clone(),
            gb_size: self.gb_size,
            degree_histogram: self.degree_histogram.clone(),
            verdict: self.verdict,
            non_exchange_quadrics: self
                .quadrics
                .iter()
                .filter(|q| q.witness.is_none())
                .map(|q| q.binomial.clone())
                .collect(),
            elapsed_ms: if timing { self.elapsed_ms } else { 0 },
        }
    }
}

/// Factors of a degree-2 monomial in x-variables.
fn quadric_factors(m: &Monomial, universe: &VariableUniverse) -> Option<(Basis, Basis)> {
    let mut factors = Vec::with_capacity(2);
    for (v, &e) in m.exponents().iter().enumerate() {
        let Variable::X(b) = universe.variable(v) else {
            if e > 0 {
                return None;
            }
            continue;
        };
        for _ in 0..e {
            factors.push(b);
        }
    }
    (factors.len() == 2).then(|| (factors[0], factors[1]))
}

/// A single symmetric exchange turning `{b1, b2}` into `{b3, b4}`.
pub fn exchange_between(
    (b1, b2): (Basis, Basis),
    (b3, b4): (Basis, Basis),
) -> Option<ExchangeWitness> {
    for alpha in b1.difference(b2).elements() {
        for beta in b2.difference(b1).elements() {
            let c3 = b1.remove(alpha).insert(beta);
            let c4 = b2.remove(beta).insert(alpha);
            if (c3, c4) == (b3, b4) || (c3, c4) == (b4, b3) {
                return Some(ExchangeWitness {
                    b1,
                    b2,
                    alpha,
                    beta,
                    b3: c3,
                    b4: c4,
                });
            }
        }
    }
    None
}

/// Degree histogram, exchange witnesses for the quadrics, and the verdict.
pub fn classify_gb(gb: &GroebnerBasis, m: &Matroid) -> Result<GbReport, ToricError> {
    if !gb.reduced {
        return Err(GbError::NotReduced.into());
    }
    let mut degree_histogram = BTreeMap::new();
    let mut quadrics = Vec::new();
    for b in &gb.elements {
        *degree_histogram.entry(b.degree()).or_insert(0) += 1;
        if b.degree() != 2 {
            continue;
        }
        let (Some(lead), Some(trail)) = (
            quadric_factors(&b.lead, &gb.universe),
            quadric_factors(&b.trail, &gb.universe),
        ) else {
            return Err(ToricError::OrderMismatch(
                "Gröbner basis involves non-basis variables".into(),
            ));
        };
        for x in [lead.0, lead.1, trail.0, trail.1] {
            if !m.is_basis(x) {
                return Err(MatroidError::NotABasis(x).into());
            }
        }
        let witness = exchange_between(lead, trail).or_else(|| exchange_between(trail, lead));
        quadrics.push(QuadricCheck {
            binomial: gb.universe.format_binomial(b),
            lead,
            trail,
            witness,
        });
    }
    let verdict = if degree_histogram.keys().any(|&d| d != 2) {
        Verdict::NonQuadratic
    } else if quadrics.iter().any(|q| q.witness.is_none()) {
        Verdict::QuadraticNotExchange
    } else {
        Verdict::WhiteGbOk
    };
    Ok(GbReport {
        matroid: String::new(),
        order: gb.order.describe(&gb.universe),
        gb_size: gb.len(),
        degree_histogram,
        quadrics,
        verdict,
        elapsed_ms: 0,
    })
}

/// Outcome of [`verify_white`]: the Gröbner basis and its classification.
#[derive(Debug, Clone)]
pub struct WhiteCheck {
    pub gb: GroebnerBasis,
    pub report: GbReport,
}

pub fn verify_white(m: &Matroid, x_order: &[Basis]) -> Result<WhiteCheck, ToricError> {
    let start = Instant::now();
    let t = toric_gb(m, x_order)?;
    let mut report = classify_gb(&t.gb, m)?;
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(WhiteCheck { gb: t.gb, report })
}

/// Degree-`d` monomials in the x-variables sharing one image under `pi_M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fiber {
    pub degree: usize,
    /// Exponent vector over the ground set.
    pub image: Vec<u8>,
    /// Multisets of basis indices (into `m.bases()`), each non-decreasing.
    pub members: Vec<Vec<usize>>,
}

/// Upper bound on the number of monomials a fiber enumeration may visit.
pub const MAX_FIBER_MONOMIALS: u64 = 100_000;

fn multichoose(n: u64, k: u64) -> u64 {
    // C(n + k - 1, k), saturating
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n + i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Calls `f` on every non-decreasing index sequence of length `d` below `n`.
pub fn for_each_multiset<F: FnMut(&[usize])>(n: usize, d: usize, mut f: F) {
    if d == 0 {
        f(&[]);
        return;
    }
    if n == 0 {
        return;
    }
    let mut idx = vec![0usize; d];
    loop {
        f(&idx);
        let Some(pos) = (0..d).rev().find(|&p| idx[p] + 1 < n) else {
            return;
        };
        let v = idx[pos] + 1;
        for slot in &mut idx[pos..] {
            *slot = v;
        }
    }
}

fn multiset_image(m: &Matroid, members: &[usize]) -> Vec<u8> {
    let mut img = vec![0u8; m.ground_set_size()];
    for &i in members {
        for l in m.bases()[i].elements() {
            img[l - 1] += 1;
        }
    }
    img
}

/// Groups all degree-`d` monomials by image, ordered by image.
pub fn enumerate_fibers(m: &Matroid, d: usize) -> Result<Vec<Fiber>, ToricError> {
    if d == 0 {
        return Err(ToricError::ZeroDegree);
    }
    let monomials = multichoose(m.num_bases() as u64, d as u64);
    if monomials > MAX_FIBER_MONOMIALS || d > 255 {
        return Err(ToricError::FiberGuard {
            monomials,
            limit: MAX_FIBER_MONOMIALS,
        });
    }
    let mut groups: BTreeMap<Vec<u8>, Vec<Vec<usize>>> = BTreeMap::new();
    for_each_multiset(m.num_bases(), d, |idx| {
        groups
            .entry(multiset_image(m, idx))
            .or_default()
            .push(idx.to_vec());
    });
    Ok(groups
        .into_iter()
        .map(|(image, members)| Fiber {
            degree: d,
            image,
            members,
        })
        .collect())
}

/// The monomial `prod x_{B_i}` for a multiset of basis indices.
pub fn monomial_of(members: &[usize], nvars: usize) -> Monomial {
    let mut exps = vec![0u8; nvars];
    for &i in members {
        exps[i] += 1;
    }
    Monomial::from_exponents(&exps)
}

/// Basis-index multiset of an x-monomial of `I_M`'s ring.
pub fn members_of(m: &Monomial) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        for _ in 0..e {
            out.push(i);
        }
    }
    out
}

/// Connected components of a fiber under single symmetric exchanges applied
/// to one pair of factors. Returns a component label per member.
pub fn fiber_components(m: &Matroid, fiber: &Fiber) -> Vec<usize> {
    let lookup: HashMap<&[usize], usize> = fiber
        .members
        .iter()
        .enumerate()
        .map(|(i, mem)| (mem.as_slice(), i))
        .collect();
    let mut parent: Vec<usize> = (0..fiber.members.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let bases = m.bases();
    for (i, mem) in fiber.members.iter().enumerate() {
        for p in 0..mem.len() {
            for q in p + 1..mem.len() {
                let (b1, b2) = (bases[mem[p]], bases[mem[q]]);
                for alpha in b1.difference(b2).elements() {
                    for beta in b2.difference(b1).elements() {
                        let (Some(i3), Some(i4)) = (
                            m.basis_index(b1.remove(alpha).insert(beta)),
                            m.basis_index(b2.remove(beta).insert(alpha)),
                        ) else {
                            continue;
                        };
                        let mut next = mem.clone();
                        next[p] = i3;
                        next[q] = i4;
                        next.sort_unstable();
                        let j = lookup[next.as_slice()];
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        if ri != rj {
                            parent[ri.max(rj)] = ri.min(rj);
                        }
                    }
                }
            }
        }
    }
    (0..parent.len()).map(|i| find(&mut parent, i)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberConnectivity {
    pub fibers: usize,
    pub nontrivial: usize,
    /// First fiber (by image) whose exchange graph is disconnected.
    pub first_disconnected: Option<Fiber>,
}

impl FiberConnectivity {
    pub fn connected(&self) -> bool {
        self.first_disconnected.is_none()
    }
}

pub fn fiber_graph_connected(m: &Matroid, d: usize) -> Result<FiberConnectivity, ToricError> {
    use rayon::prelude::*;
    let fibers = enumerate_fibers(m, d)?;
    let nontrivial = fibers.iter().filter(|f| f.members.len() > 1).count();
    let first_disconnected = fibers
        .par_iter()
        .filter(|f| f.members.len() > 1)
        .find_first(|f| {
            let comps = fiber_components(m, f);
            comps.iter().any(|&c| c != comps[0])
        })
        .cloned();
    Ok(FiberConnectivity {
        fibers: fibers.len(),
        nontrivial,
        first_disconnected,
    })
}

/// Two bases forming one side of a quadric.
pub type BasisPair = (Basis, Basis);

/// Checks that any two members of a degree-2 fiber are related by a single
/// symmetric exchange (in either direction). Returns the number of member
/// pairs checked, or the first pair that is not.
pub fn degree2_exchange_complete(
    m: &Matroid,
) -> Result<Result<usize, (BasisPair, BasisPair)>, ToricError> {
    let bases = m.bases();
    let mut checked = 0;
    for fiber in enumerate_fibers(m, 2)? {
        for (k, a) in fiber.members.iter().enumerate() {
            for b in &fiber.members[k + 1..] {
                let pa = (bases[a[0]], bases[a[1]]);
                let pb = (bases[b[0]], bases[b[1]]);
                if exchange_between(pa, pb).is_none() && exchange_between(pb, pa).is_none() {
                    return Ok(Err((pa, pb)));
                }
                checked += 1;
            }
        }
    }
    Ok(Ok(checked))
}

/// Sorted form of a multiset of bases: with the elements of all factors
/// listed in increasing order, factor `k` takes positions `k, k+d, k+2d, ...`.
pub fn sort_multiset(factors: &[Basis]) -> Vec<Basis> {
    let d = factors.len();
    let mut all: Vec<usize> = factors.iter().flat_map(|b| b.elements()).collect();
    all.sort_unstable();
    let mut out = vec![Basis::EMPTY; d];
    for (pos, e) in all.into_iter().enumerate() {
        out[pos % d] = out[pos % d].insert(e);
    }
    out
}

/// Finds positive integer weights `w` with `w . (lead - trail) > 0` for every
/// binomial (perceptron); `None` if the marking is not realized within the
/// iteration budget.
pub fn marking_weights(binomials: &[Binomial], nvars: usize) -> Option<Vec<u64>> {
    let diffs: Vec<Vec<i64>> = binomials
        .iter()
        .map(|b| {
            (0..nvars)
                .map(|v| i64::from(b.lead.exponent(v)) - i64::from(b.trail.exponent(v)))
                .collect()
        })
        .collect();
    let mut w = vec![0i64; nvars];
    for _ in 0..100_000 {
        let mut changed = false;
        for d in &diffs {
            let dot: i64 = d.iter().zip(&w).map(|(a, b)| a * b).sum();
            if dot <= 0 {
                for (wi, di) in w.iter_mut().zip(d) {
                    *wi += di;
                }
                changed = true;
            }
        }
        if !changed {
            // same-degree binomials: a constant shift keeps every comparison
            let shift = 1 - w.iter().copied().min().unwrap_or(0);
            return Some(w.into_iter().map(|x| (x + shift) as u64).collect());
        }
    }
    None
}

/// Quadratic Gröbner basis of a base-sortable matroid from the sorting
/// relations, with its certificate.
#[derive(Debug, Clone)]
pub struct SortingGb {
    pub gb: GroebnerBasis,
    pub report: GbReport,
    /// S-pairs checked by the independent certification pass.
    pub pairs_checked: usize,
    /// Monomials whose normal form was compared with the sorted fiber member.
    pub monomials_checked: usize,
}

pub fn sorting_gb(m: &Matroid) -> Result<SortingGb, ToricError> {
    let start = Instant::now();
    if let Err((b1, b2)) = m.base_sortability() {
        return Err(ToricError::NotSortable(b1, b2));
    }
    let bases = m.bases();
    let universe = VariableUniverse::for_toric_ideal(bases);
    let nvars = universe.len();
    let mut candidates = Vec::new();
    for i in 0..bases.len() {
        for j in i..bases.len() {
            let sorted = sort_multiset(&[bases[i], bases[j]]);
            let (s1, s2) = (sorted[0], sorted[1]);
            if (s1, s2) == (bases[i], bases[j]) || (s1, s2) == (bases[j], bases[i]) {
                continue;
            }
            let (k1, k2) = (
                m.basis_index(s1).expect("sortable"),
                m.basis_index(s2).expect("sortable"),
            );
            candidates.push(Binomial {
                lead: monomial_of(&[i, j], nvars),
                trail: monomial_of(&[k1, k2], nvars),
            });
        }
    }
    let weights = marking_weights(&candidates, nvars).ok_or_else(|| {
        ToricError::Certification("no weight vector realizes the sorting marking".into())
    })?;
    let order = TermOrder::weighted(weights, (0..nvars).collect())?;
    let gb = reduce_gb(&GroebnerBasis {
        universe,
        order,
        elements: candidates,
        reduced: false,
    })?;

    let cert = certify(&gb).map_err(|e| ToricError::Certification(e.to_string()))?;
    let reducer = gb.reducer();
    let mut monomials_checked = 0;
    for d in [2, 3] {
        for fiber in enumerate_fibers(m, d)? {
            let factors: Vec<Basis> = fiber.members[0].iter().map(|&i| bases[i]).collect();
            let sorted = sort_multiset(&factors);
            let mut sorted_idx = Vec::with_capacity(d);
            for s in &sorted {
                sorted_idx.push(m.basis_index(*s).ok_or_else(|| {
                    ToricError::Certification(format!("sorted factor {s} is not a basis"))
                })?);
            }
            sorted_idx.sort_unstable();
            let target = monomial_of(&sorted_idx, nvars);
            for mem in &fiber.members {
                monomials_checked += 1;
                if reducer.normal_form(&monomial_of(mem, nvars))? != target {
                    return Err(ToricError::Certification(format!(
                        "normal form of {mem:?} is not the sorted monomial"
                    )));
                }
            }
        }
    }
    let mut report = classify_gb(&gb, m)?;
    report.order = "sorting".to_string();
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(SortingGb {
        gb,
        report,
        pairs_checked: cert.pairs_checked,
        monomials_checked,
    })
}

/// One step of an elimination chain.
#[derive(Debug, Clone)]
pub struct ChainLink {
    pub removed: Basis,
    pub child: Matroid,
    pub gb: GroebnerBasis,
    pub report: GbReport,
}

/// Removes the greatest variables of `parent_order` one at a time, reading
/// off each child's Gröbner basis by elimination.
pub fn elimination_chain(
    parent: &Matroid,
    parent_order: &[Basis],
    removed: &[Basis],
) -> Result<Vec<ChainLink>, ToricError> {
    for (position, &r) in removed.iter().enumerate() {
        let found = parent_order.get(position).copied().unwrap_or(Basis::EMPTY);
        if found != r {
            return Err(ToricError::ChainPrefix {
                position,
                expected: r,
                found,
            });
        }
    }
    let mut gb = toric_gb(parent, parent_order)?.gb;
    let mut current = parent.clone();
    let mut links = Vec::with_capacity(removed.len());
    for &r in removed {
        let start = Instant::now();
        let bases: Vec<Basis> = current
            .bases()
            .iter()
            .copied()
            .filter(|&b| b != r)
            .collect();
        let child = Matroid::new(current.ground_set_size(), bases)
            .map_err(|source| ToricError::ChildInvalid { removed: r, source })?;
        let var = gb
            .universe
            .index_of(Variable::X(r))
            .ok_or_else(|| ToricError::OrderMismatch(format!("x{} missing", r.label())))?;
        gb = eliminate(&gb, &[var])?;
        let mut report = classify_gb(&gb, &child)?;
        report.elapsed_ms = start.elapsed().as_millis() as u64;
        links.push(ChainLink {
            removed: r,
            child: child.clone(),
            gb: gb.clone(),
            report,
        });
        current = child;
    }
    Ok(links)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    Random,
    HillClimb,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best_order: Vec<Basis>,
    pub best: GbReport,
    pub evaluations: usize,
    /// Objective of every evaluated order, in evaluation order.
    pub trace: Vec<(u32, usize, usize)>,
}

/// Looks for an x-order whose reduced Gröbner basis is quadratic and made of
/// symmetric exchanges. The first candidate is `initial` (or the natural
/// basis order); the run is deterministic for a given seed.
pub fn order_search(
    m: &Matroid,
    initial: Option<&[Basis]>,
    strategy: SearchStrategy,
    budget: usize,
    seed: u64,
) -> Result<SearchOutcome, ToricError> {
    use rayon::prelude::*;
    let budget = budget.max(1);
    let start_order: Vec<Basis> = initial
        .map(<[Basis]>::to_vec)
        .unwrap_or_else(|| m.bases().to_vec());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let evaluate =
        |order: &[Basis]| -> Result<GbReport, ToricError> { Ok(verify_white(m, order)?.report) };

    match strategy {
        SearchStrategy::Random => {
            let mut candidates = vec![start_order];
            while candidates.len() < budget {
                let mut o = m.bases().to_vec();
                o.shuffle(&mut rng);
                candidates.push(o);
            }
            let reports: Vec<GbReport> = candidates
                .par_iter()
                .map(|o| evaluate(o))
                .collect::<Result<_, _>>()?;
            let trace: Vec<_> = reports.iter().map(GbReport::objective).collect();
            let best_idx = (0..reports.len())
                .min_by_key(|&i| (trace[i], i))
                .expect("budget >= 1");
            Ok(SearchOutcome {
                best_order: candidates[best_idx].clone(),
                best: reports[best_idx].clone(),
                evaluations: reports.len(),
                trace,
            })
        }
        SearchStrategy::HillClimb => {
            let mut current = start_order;
            let mut current_report = evaluate(&current)?;
            let mut trace = vec![current_report.objective()];
            let mut best = (current.clone(), current_report.clone());
            while trace.len() < budget && best.1.verdict != Verdict::WhiteGbOk {
                if current.len() < 2 {
                    break;
                }
                let i = rng.gen_range(0..current.len() - 1);
                let mut next = current.clone();
                next.swap(i, i + 1);
                let report = evaluate(&next)?;
                trace.push(report.objective());
                if report.objective() <= current_report.objective() {
                    current = next;
                    current_report = report;
                    if current_report.objective() < best.1.objective() {
                        best = (current.clone(), current_report.clone());
                    }
                }
            }
            Ok(SearchOutcome {
                best_order: best.0,
                best: best.1,
                evaluations: trace.len(),
                trace,
            })
        }
    }
}

/// Degree-2 fibers of `M` against those of `M*` under `B -> E \ B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityTransport {
    pub fibers: usize,
    /// Complementation maps the fiber partition of `M` onto that of `M*`.
    pub fibers_match: bool,
    /// Every exchange-related pair of members maps to an exchange-related pair.
    pub exchanges_match: bool,
}

impl DualityTransport {
    pub fn holds(&self) -> bool {
        self.fibers_match && self.exchanges_match
    }
}

pub fn duality_transport(m: &Matroid) -> Result<DualityTransport, ToricError> {
    let dual = m.dual();
    let n = m.ground_set_size();
    let fibers = enumerate_fibers(m, 2)?;
    let dual_fibers = enumerate_fibers(&dual, 2)?;
    let to_dual = |i: usize| {
        dual.basis_index(m.bases()[i].complement(n))
            .expect("dual basis")
    };
    let mut mapped: Vec<Vec<Vec<usize>>> = fibers
        .iter()
        .map(|f| {
            let mut ms: Vec<Vec<usize>> = f
                .members
                .iter()
                .map(|mem| {
                    let mut x: Vec<usize> = mem.iter().map(|&i| to_dual(i)).collect();
                    x.sort_unstable();
                    x
                })
                .collect();
            ms.sort();
            ms
        })
        .collect();
    mapped.sort();
    let mut target: Vec<Vec<Vec<usize>>> = dual_fibers
        .iter()
        .map(|f| {
            let mut ms = f.members.clone();
            ms.sort();
            ms
        })
        .collect();
    target.sort();
    let fibers_match = mapped == target;

    let mut exchanges_match = true;
    let bases = m.bases();
    let dbases = dual.bases();
    'outer: for f in &fibers {
        for a in &f.members {
            for b in &f.members {
                if a >= b {
                    continue;
                }
                let pa = (bases[a[0]], bases[a[1]]);
                let pb = (bases[b[0]], bases[b[1]]);
                let here = exchange_between(pa, pb).is_some();
                let da = (dbases[to_dual(a[0])], dbases[to_dual(a[1])]);
                let db = (dbases[to_dual(b[0])], dbases[to_dual(b[1])]);
                let there = exchange_between(da, db).is_some();
                if here != there {
                    exchanges_match = false;
                    break 'outer;
                }
            }
        }
    }
    Ok(DualityTransport {
        fibers: fibers.len(),
        fibers_match,
        exchanges_match,
    })
}

/// The `<`-minimal member of the fiber of `mono` (independent of any
/// Gröbner basis), by brute force over the degree's fiber.
pub fn fiber_minimum(
    m: &Matroid,
    mono: &Monomial,
    order: &TermOrder,
) -> Result<Monomial, ToricError> {
    let members = members_of(mono);
    let d = members.len();
    let img = multiset_image(m, &members);
    let nvars = m.num_bases();
    let mut best: Option<Monomial> = None;
    let mut err = None;
    for_each_multiset(nvars, d, |idx| {
        if err.is_some() || multiset_image(m, idx) != img {
            return;
        }
        let cand = monomial_of(idx, nvars);
        match &best {
            None => best = Some(cand),
            Some(b) => match order.compare(&cand, b) {
                Ok(std::cmp::Ordering::Less) => best = Some(cand),
                Ok(_) => {}
                Err(e) => err = Some(e),
            },
        }
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(best.unwrap_or_else(|| mono.clone()))
}

/// Normal forms of sampled degree-2/3 monomials against the `<`-minimal
/// members of their fibers. Returns the number of samples checked.
pub fn check_normal_forms(
    m: &Matroid,
    gb: &GroebnerBasis,
    samples: usize,
    seed: u64,
) -> Result<usize, ToricError> {
    let nvars = m.num_bases();
    if nvars == 0 || samples == 0 {
        return Ok(0);
    }
    let mut minima: HashMap<Vec<u8>, Monomial> = HashMap::new();
    for d in [2, 3] {
        for fiber in enumerate_fibers(m, d)? {
            let mut best = monomial_of(&fiber.members[0], nvars);
            for mem in &fiber.members[1..] {
                let cand = monomial_of(mem, nvars);
                if gb.order.compare(&cand, &best)? == std::cmp::Ordering::Less {
                    best = cand;
                }
            }
            minima.insert(fiber.image, best);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reducer = gb.reducer();
    for k in 0..samples {
        let d = if rng.gen_bool(0.5) { 2 } else { 3 };
        let idx: Vec<usize> = (0..d).map(|_| rng.gen_range(0..nvars)).collect();
        let mono = monomial_of(&idx, nvars);
        let nf = reducer.normal_form(&mono)?;
        let min = &minima[&multiset_image(m, &idx)];
        if &nf != min {
            return Err(ToricError::Certification(format!(
                "sample {k}: normal form {} differs from fiber minimum {}",
                gb.universe.format_monomial(&nf),
                gb.universe.format_monomial(min)
            )));
        }
    }
    Ok(samples)
}

/// Checks that the normal form is constant on every fiber of degree
/// `1..=max_degree` and separates distinct fibers, i.e. that the kernel
/// found by enumeration and the ideal of `gb` agree up to that degree.
pub fn oracle_agreement(
    m: &Matroid,
    gb: &GroebnerBasis,
    max_degree: usize,
) -> Result<(), ToricError> {
    let reducer = gb.reducer();
    let nvars = m.num_bases();
    for d in 1..=max_degree {
        let mut seen: HashMap<Monomial, usize> = HashMap::new();
        for (fi, fiber) in enumerate_fibers(m, d)?.iter().enumerate() {
            let nf0 = reducer.normal_form(&monomial_of(&fiber.members[0], nvars))?;
            for mem in &fiber.members[1..] {
                if reducer.normal_form(&monomial_of(mem, nvars))? != nf0 {
                    return Err(ToricError::Certification(format!(
                        "degree {d}: kernel binomial {:?} - {:?} is not in the ideal",
                        fiber.members[0], mem
                    )));
                }
            }
            if let Some(other) = seen.insert(nf0, fi) {
                return Err(ToricError::Certification(format!(
                    "degree {d}: fibers {other} and {fi} share a normal form"
                )));
            }
        }
    }
    Ok(())
}

/// Reduced Gröbner basis of the ideal generated by every degree-`<= max_degree`
/// kernel binomial found by fiber enumeration (no elimination involved).
pub fn fiber_kernel_gb(
    m: &Matroid,
    x_order: &[Basis],
    max_degree: usize,
) -> Result<GroebnerBasis, ToricError> {
    let nvars = m.num_bases();
    let universe = VariableUniverse::for_toric_ideal(m.bases());
    let order = TermOrder::lex(x_ranking(m, x_order)?)?;
    let mut generators = Vec::new();
    for d in 2..=max_degree {
        for fiber in enumerate_fibers(m, d)? {
            let first = monomial_of(&fiber.members[0], nvars);
            for mem in &fiber.members[1..] {
                if let Some(b) = Binomial::marked(first.clone(), monomial_of(mem, nvars), &order)? {
                    generators.push(b);
                }
            }
        }
    }
    let (gb, _) = buchberger(
        &generators,
        &universe,
        &order,
        &BuchbergerOptions::default(),
    )?;
    Ok(reduce_gb(&gb)?)
}

/// Certifies a reported Gröbner basis: independent S-pair pass, kernel
/// membership of every element, and sampled normal forms against fiber minima.
pub fn certify_toric(
    m: &Matroid,
    gb: &GroebnerBasis,
    samples: usize,
    seed: u64,
) -> Result<usize, ToricError> {
    let cert = groebner::certify(gb).map_err(|e| ToricError::Certification(e.to_string()))?;
    for b in &gb.elements {
        if !in_kernel(b, &gb.universe, m.ground_set_size()) {
            return Err(ToricError::Certification(format!(
                "{} is not in the kernel",
                gb.universe.format_binomial(b)
            )));
        }
    }
    check_normal_forms(m, gb, samples, seed)?;
    Ok(cert.pairs_checked)
}

/// Reads an order file: one variable per line, greatest first. Either only
/// the x-variables of `m`, or `t1..tn` (in that order) followed by them.
pub fn parse_x_order(text: &str, m: &Matroid) -> Result<Vec<Basis>, ToricError> {
    let names: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .collect();
    let n = m.ground_set_size();
    let mut xs = Vec::new();
    let mut ts = Vec::new();
    for name in &names {
        match Variable::parse(name) {
            Some(Variable::T(i)) => {
                if !xs.is_empty() {
                    return Err(ToricError::OrderMismatch(format!(
                        "{name} follows an x-variable; t-variables must come first"
                    )));
                }
                ts.push(i);
            }
            Some(Variable::X(b)) => xs.push(b),
            None => return Err(GbError::UnknownVariable(name.to_string()).into()),
        }
    }
    if !ts.is_empty() && ts != (1..=n).collect::<Vec<_>>() {
        return Err(ToricError::OrderMismatch(format!(
            "t-variables must be listed as t1..t{n}"
        )));
    }
    x_ranking(m, &xs)?;
    Ok(xs)
}
