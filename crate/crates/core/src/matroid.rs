//! Matroids given by their bases.
//!
//! Ground sets are `1..=n` with `n <= 64`; a [`Basis`] is a bit-vector over
//! the ground set (bit `i - 1` stands for element `i`).

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported ground set.
pub const MAX_GROUND_SET: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatroidError {
    #[error("the collection of bases is empty")]
    NoBases,
    #[error("ground set size {0} exceeds the supported maximum of {MAX_GROUND_SET}")]
    GroundSetTooLarge(usize),
    #[error("basis {basis} has {found} elements, expected {expected}")]
    UnequalCardinality {
        basis: Basis,
        expected: usize,
        found: usize,
    },
    #[error("element {element} is outside the ground set 1..={n}")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("basis {0} is listed more than once")]
    DuplicateBasis(Basis),
    #[error("symmetric exchange fails: {0}")]
    ExchangeFailure(ExchangeViolation),
    #[error("{0} is not a basis of the matroid")]
    NotABasis(Basis),
    #[error("2-sum precondition: element {element} is a {kind} of the {side} summand")]
    TwoSumPrecondition {
        side: Side,
        element: usize,
        kind: &'static str,
    },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::First => f.write_str("first"),
            Side::Second => f.write_str("second"),
        }
    }
}

/// A subset of the ground set `1..=64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Basis(u64);

impl Basis {
    pub const EMPTY: Basis = Basis(0);

    pub fn from_bits(bits: u64) -> Self {
        Basis(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// Builds a set from 1-based elements. Panics on elements outside `1..=64`.
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        let mut bits = 0u64;
        for e in elements {
            assert!(
                (1..=MAX_GROUND_SET).contains(&e),
                "element {e} out of range"
            );
            bits |= 1 << (e - 1);
        }
        Basis(bits)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: usize) -> bool {
        (1..=MAX_GROUND_SET).contains(&e) && self.0 >> (e - 1) & 1 == 1
    }

    pub fn insert(self, e: usize) -> Self {
        Basis(self.0 | 1 << (e - 1))
    }

    pub fn remove(self, e: usize) -> Self {
        Basis(self.0 & !(1 << (e - 1)))
    }

    pub fn union(self, other: Basis) -> Self {
        Basis(self.0 | other.0)
    }

    pub fn intersection(self, other: Basis) -> Self {
        Basis(self.0 & other.0)
    }

    pub fn difference(self, other: Basis) -> Self {
        Basis(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Basis) -> bool {
        self.0 & !other.0 == 0
    }

    /// Largest element, 0 for the empty set.
    pub fn max_element(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Elements in increasing order.
    pub fn elements(self) -> Elements {
        Elements(self.0)
    }

    /// Complement inside `1..=n`.
    pub fn complement(self, n: usize) -> Self {
        Basis(!self.0 & full_mask(n))
    }

    /// Variable-style label: concatenated digits when every element is a
    /// single digit (`236`), underscore separated otherwise (`1_10_12`);
    /// the empty set is `{}`.
    pub fn label(self) -> String {
        if self.is_empty() {
            "{}".to_string()
        } else if self.max_element() <= 9 {
            self.elements()
                .map(|e| char::from(b'0' + e as u8))
                .collect()
        } else {
            let parts: Vec<String> = self.elements().map(|e| e.to_string()).collect();
            parts.join("_")
        }
    }

    /// Inverse of [`Basis::label`].
    pub fn parse_label(s: &str) -> Option<Basis> {
        if s == "{}" {
            return Some(Basis::EMPTY);
        }
        if s.is_empty() {
            return None;
        }
        let elements: Option<Vec<usize>> = if s.contains('_') {
            s.split('_').map(|p| p.parse().ok()).collect()
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect()
        };
        let elements = elements?;
        if elements.iter().any(|&e| e == 0 || e > MAX_GROUND_SET)
            || elements.windows(2).any(|w| w[0] >= w[1])
        {
            return None;
        }
        Some(Basis::from_elements(elements))
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub struct Elements(u64);

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let tz = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(tz + 1)
    }
}

/// Lexicographic order on the increasing element lists.
impl Ord for Basis {
    fn cmp(&self, other: &Self) -> Ordering {
        self.elements().cmp(other.elements())
    }
}

impl PartialOrd for Basis {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// `(b1, b2, alpha)` such that no `beta` in `b2 \ b1` completes a symmetric exchange.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeViolation {
    pub b1: Basis,
    pub b2: Basis,
    pub alpha: usize,
}

impl fmt::Display for ExchangeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B={} B'={} alpha={}", self.b1, self.b2, self.alpha)
    }
}

/// One symmetric exchange between two bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeWitness {
    pub b1: Basis,
    pub b2: Basis,
    pub alpha: usize,
    pub beta: usize,
    /// `(b1 \ alpha) + beta`
    pub b3: Basis,
    /// `(b2 \ beta) + alpha`
    pub b4: Basis,
}

impl fmt::Display for ExchangeWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}) --[{}<->{}]--> ({}, {})",
            self.b1, self.b2, self.alpha, self.beta, self.b3, self.b4
        )
    }
}

/// Checks the structural preconditions of a basis collection, then the
/// symmetric exchange axiom.
///
/// Pairs are scanned in lexicographic order of `(b1, b2)` and `alpha`
/// increasing; the first violation is returned.
pub fn validate_basis_axiom(
    bases: &[Basis],
    n: usize,
) -> Result<Option<ExchangeViolation>, MatroidError> {
    let sorted = check_collection(bases, n)?;
    Ok(first_exchange_violation(&sorted))
}

fn check_collection(bases: &[Basis], n: usize) -> Result<Vec<Basis>, MatroidError> {
    if n > MAX_GROUND_SET {
        return Err(MatroidError::GroundSetTooLarge(n));
    }
    let first = *bases.first().ok_or(MatroidError::NoBases)?;
    let rank = first.len();
    let outside = !full_mask(n);
    for &b in bases {
        if b.bits() & outside != 0 {
            let element = Basis(b.bits() & outside).elements().next().unwrap();
            return Err(MatroidError::ElementOutOfRange { element, n });
        }
        if b.len() != rank {
            return Err(MatroidError::UnequalCardinality {
                basis: b,
                expected: rank,
                found: b.len(),
            });
        }
    }
    let mut sorted = bases.to_vec();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(MatroidError::DuplicateBasis(w[0]));
    }
    Ok(sorted)
}

fn first_exchange_violation(sorted: &[Basis]) -> Option<ExchangeViolation> {
    let members: HashSet<u64> = sorted.iter().map(|b| b.bits()).collect();
    for &b1 in sorted {
        for &b2 in sorted {
            for alpha in b1.difference(b2).elements() {
                let ok = b2.difference(b1).elements().any(|beta| {
                    members.contains(&b1.remove(alpha).insert(beta).bits())
                        && members.contains(&b2.remove(beta).insert(alpha).bits())
                });
                if !ok {
                    return Some(ExchangeViolation { b1, b2, alpha });
                }
            }
        }
    }
    None
}

/// A matroid on `1..=n`, stored by its bases in lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matroid {
    n: usize,
    rank: usize,
    bases: Vec<Basis>,
}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Matroid(n={}, r={}, {:?})",
            self.n, self.rank, self.bases
        )
    }
}

impl Matroid {
    /// Validates the collection (including the exchange axiom) and sorts it.
    pub fn new(n: usize, bases: Vec<Basis>) -> Result<Self, MatroidError> {
        let sorted = check_collection(&bases, n)?;
        if let Some(v) = first_exchange_violation(&sorted) {
            return Err(MatroidError::ExchangeFailure(v));
        }
        Ok(Matroid {
            n,
            rank: sorted[0].len(),
            bases: sorted,
        })
    }

    pub fn from_element_lists(n: usize, lists: &[&[usize]]) -> Result<Self, MatroidError> {
        let mut bases = Vec::with_capacity(lists.len());
        for list in lists {
            if let Some(&e) = list.iter().find(|&&e| e == 0 || e > n.min(MAX_GROUND_SET)) {
                return Err(MatroidError::ElementOutOfRange { element: e, n });
            }
            bases.push(Basis::from_elements(list.iter().copied()));
        }
        Matroid::new(n, bases)
    }

    /// The uniform matroid `U_{rank,n}`.
    pub fn uniform(rank: usize, n: usize) -> Self {
        assert!(rank <= n && n <= MAX_GROUND_SET);
        let bases = k_subsets(n, rank);
        Matroid { n, rank, bases }
    }

    pub fn ground_set_size(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn num_bases(&self) -> usize {
        self.bases.len()
    }

    pub fn is_basis(&self, b: Basis) -> bool {
        self.bases.binary_search(&b).is_ok()
    }

    /// Position of `b` in [`Matroid::bases`].
    pub fn basis_index(&self, b: Basis) -> Option<usize> {
        self.bases.binary_search(&b).ok()
    }

    pub fn ground_set(&self) -> Basis {
        Basis(full_mask(self.n))
    }

    pub fn rank_of_subset(&self, x: Basis) -> Result<usize, MatroidError> {
        if x.bits() & !full_mask(self.n) != 0 {
            let element = x.difference(self.ground_set()).elements().next().unwrap();
            return Err(MatroidError::ElementOutOfRange { element, n: self.n });
        }
        Ok(self.rank_unchecked(x))
    }

    fn rank_unchecked(&self, x: Basis) -> usize {
        self.bases
            .iter()
            .map(|b| b.intersection(x).len())
            .max()
            .unwrap_or(0)
    }

    pub fn dual(&self) -> Matroid {
        let mut bases: Vec<Basis> = self.bases.iter().map(|b| b.complement(self.n)).collect();
        bases.sort();
        Matroid {
            n: self.n,
            rank: self.n - self.rank,
            bases,
        }
    }

    /// Elements contained in no basis.
    pub fn loops(&self) -> Basis {
        let union = self.bases.iter().fold(Basis::EMPTY, |acc, &b| acc.union(b));
        union.complement(self.n)
    }

    /// Elements contained in every basis.
    pub fn coloops(&self) -> Basis {
        self.bases
            .iter()
            .fold(self.ground_set(), |acc, &b| acc.intersection(b))
    }

    /// `self ⊕ other`, with `other`'s elements shifted to `n1+1..=n1+n2`.
    pub fn direct_sum(&self, other: &Matroid) -> Result<Matroid, MatroidError> {
        let n = self.n + other.n;
        if n > MAX_GROUND_SET {
            return Err(MatroidError::GroundSetTooLarge(n));
        }
        let mut bases = Vec::with_capacity(self.bases.len() * other.bases.len());
        for &b in &self.bases {
            for &d in &other.bases {
                bases.push(Basis(b.bits() | d.bits() << self.n));
            }
        }
        bases.sort();
        Ok(Matroid {
            n,
            rank: self.rank + other.rank,
            bases,
        })
    }

    /// 2-sum identifying `p1` of `self` with `p2` of `other`.
    ///
    /// The remaining elements of `self` are relabelled `1..n1-1` in
    /// increasing order, those of `other` `n1..n1+n2-2`.
    pub fn two_sum(&self, p1: usize, other: &Matroid, p2: usize) -> Result<Matroid, MatroidError> {
        for (side, m, p) in [(Side::First, self, p1), (Side::Second, other, p2)] {
            if p == 0 || p > m.n {
                return Err(MatroidError::ElementOutOfRange { element: p, n: m.n });
            }
            if m.loops().contains(p) {
                return Err(MatroidError::TwoSumPrecondition {
                    side,
                    element: p,
                    kind: "loop",
                });
            }
            if m.coloops().contains(p) {
                return Err(MatroidError::TwoSumPrecondition {
                    side,
                    element: p,
                    kind: "coloop",
                });
            }
        }
        let n = self.n + other.n - 2;
        if n > MAX_GROUND_SET {
            return Err(MatroidError::GroundSetTooLarge(n));
        }
        let shift = self.n - 1;
        let mut bases = Vec::new();
        for &b in &self.bases {
            for &d in &other.bases {
                if b.contains(p1) == d.contains(p2) {
                    continue;
                }
                let left = squeeze_out(b, p1);
                let right = squeeze_out(d, p2);
                bases.push(Basis(left.bits() | right.bits() << shift));
            }
        }
        bases.sort();
        bases.dedup();
        Matroid::new(n, bases)
    }

    /// Looks for a 1-separation or an exact 2-separation; `Err(X)` carries
    /// the first separating set found (by size, then lexicographically).
    pub fn three_connectivity(&self) -> Result<(), Basis> {
        let ground = self.ground_set();
        for size in 1..=self.n / 2 {
            for x in k_subsets(self.n, size) {
                let rest = ground.difference(x);
                let lambda = self.rank_unchecked(x) + self.rank_unchecked(rest) - self.rank;
                if lambda == 0 || (lambda == 1 && size >= 2 && rest.len() >= 2) {
                    return Err(x);
                }
            }
        }
        Ok(())
    }

    pub fn is_3_connected(&self) -> bool {
        self.three_connectivity().is_ok()
    }

    /// All symmetric exchanges between two bases.
    pub fn symmetric_exchanges(
        &self,
        b1: Basis,
        b2: Basis,
    ) -> Result<Vec<ExchangeWitness>, MatroidError> {
        for b in [b1, b2] {
            if !self.is_basis(b) {
                return Err(MatroidError::NotABasis(b));
            }
        }
        let mut out = Vec::new();
        for alpha in b1.difference(b2).elements() {
            for beta in b2.difference(b1).elements() {
                let b3 = b1.remove(alpha).insert(beta);
                let b4 = b2.remove(beta).insert(alpha);
                if self.is_basis(b3) && self.is_basis(b4) {
                    out.push(ExchangeWitness {
                        b1,
                        b2,
                        alpha,
                        beta,
                        b3,
                        b4,
                    });
                }
            }
        }
        Ok(out)
    }

    /// Base-sortability with respect to the identity labelling; `Err` holds
    /// the first failing pair.
    pub fn base_sortability(&self) -> Result<(), (Basis, Basis)> {
        let identity: Vec<usize> = (1..=self.n).collect();
        self.base_sortability_under(&identity)
    }

    pub fn is_base_sortable(&self) -> bool {
        self.base_sortability().is_ok()
    }

    /// Base-sortability when the ground set is ordered by `rank_of`:
    /// `rank_of[e - 1]` is the sort key of element `e` (a permutation of `1..=n`).
    pub fn base_sortability_under(&self, rank_of: &[usize]) -> Result<(), (Basis, Basis)> {
        for (i, &b1) in self.bases.iter().enumerate() {
            for &b2 in &self.bases[i + 1..] {
                let (s1, s2) = sort_pair_under(b1, b2, rank_of);
                if !self.is_basis(s1) || !self.is_basis(s2) {
                    return Err((b1, b2));
                }
            }
        }
        Ok(())
    }

    /// Searches all `n!` orderings of the ground set for one under which the
    /// matroid is base-sortable.
    pub fn find_sorting_labelling(&self) -> Option<Vec<usize>> {
        let mut found = None;
        for_each_permutation(self.n, |perm| {
            if self.base_sortability_under(perm).is_ok() {
                found = Some(perm.to_vec());
                true
            } else {
                false
            }
        });
        found
    }

    /// Relabels element `e` as `perm[e - 1]`.
    pub fn relabel(&self, perm: &[usize]) -> Matroid {
        assert_eq!(perm.len(), self.n);
        let mut bases: Vec<Basis> = self.bases.iter().map(|&b| map_set(b, perm)).collect();
        bases.sort();
        Matroid {
            n: self.n,
            rank: self.rank,
            bases,
        }
    }

    /// Brute-force isomorphism test. The witness maps element `e` of `self`
    /// to `perm[e - 1]` of `other`.
    pub fn isomorphism(&self, other: &Matroid) -> Option<Vec<usize>> {
        if self.n != other.n || self.rank != other.rank || self.bases.len() != other.bases.len() {
            return None;
        }
        let deg_a = self.element_degrees();
        let deg_b = other.element_degrees();
        let mut sa = deg_a.clone();
        let mut sb = deg_b.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return None;
        }
        let targets: HashSet<u64> = other.bases.iter().map(|b| b.bits()).collect();
        let mut perm = vec![0usize; self.n];
        let mut used = vec![false; self.n + 1];
        if self.extend_isomorphism(0, &deg_a, &deg_b, &targets, &mut perm, &mut used) {
            Some(perm)
        } else {
            None
        }
    }

    pub fn is_isomorphic(&self, other: &Matroid) -> bool {
        self.isomorphism(other).is_some()
    }

    fn extend_isomorphism(
        &self,
        depth: usize,
        deg_a: &[usize],
        deg_b: &[usize],
        targets: &HashSet<u64>,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if depth == self.n {
            return self
                .bases
                .iter()
                .all(|&b| targets.contains(&map_set(b, perm).bits()));
        }
        for image in 1..=self.n {
            if used[image] || deg_a[depth] != deg_b[image - 1] {
                continue;
            }
            perm[depth] = image;
            used[image] = true;
            if self.extend_isomorphism(depth + 1, deg_a, deg_b, targets, perm, used) {
                return true;
            }
            used[image] = false;
        }
        false
    }

    /// Number of bases containing each element.
    fn element_degrees(&self) -> Vec<usize> {
        (1..=self.n)
            .map(|e| self.bases.iter().filter(|b| b.contains(e)).count())
            .collect()
    }

    /// Serializes in the matroid text format.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.rank);
        for b in &self.bases {
            s.push_str(&basis_token(*b));
            s.push('\n');
        }
        s
    }

    /// Parses one matroid in the text format, validating it.
    pub fn parse(text: &str) -> Result<Matroid, MatroidError> {
        let raw = RawMatroid::parse(text, 0)?;
        raw.into_matroid()
    }
}

impl FromStr for Matroid {
    type Err = MatroidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Matroid::parse(s)
    }
}

fn basis_token(b: Basis) -> String {
    if b.is_empty() {
        return "{}".to_string();
    }
    let parts: Vec<String> = b.elements().map(|e| e.to_string()).collect();
    parts.join(",")
}

/// A parsed but not yet validated basis collection, with source line numbers.
#[derive(Debug, Clone)]
pub struct RawMatroid {
    pub n: usize,
    pub rank: usize,
    pub bases: Vec<Basis>,
    pub lines: Vec<usize>,
    pub header_line: usize,
}

impl RawMatroid {
    /// Parses the text format. `line_offset` is added to reported line numbers.
    pub fn parse(text: &str, line_offset: usize) -> Result<RawMatroid, MatroidError> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut bases = Vec::new();
        let mut lines = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1 + line_offset;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| MatroidError::Parse {
                line: line_no,
                message,
            };
            match header {
                None => {
                    let nums: Vec<&str> = line.split_whitespace().collect();
                    if nums.len() != 2 {
                        return Err(err(format!("expected `<n> <rank>`, found `{line}`")));
                    }
                    let n: usize = nums[0]
                        .parse()
                        .map_err(|_| err(format!("bad ground set size `{}`", nums[0])))?;
                    let rank: usize = nums[1]
                        .parse()
                        .map_err(|_| err(format!("bad rank `{}`", nums[1])))?;
                    if n > MAX_GROUND_SET {
                        return Err(err(format!("ground set size {n} exceeds {MAX_GROUND_SET}")));
                    }
                    if rank > n {
                        return Err(err(format!("rank {rank} exceeds ground set size {n}")));
                    }
                    header = Some((n, rank, line_no));
                }
                Some((n, rank, _)) => {
                    for token in line.split_whitespace() {
                        let b = parse_basis_token(token, n, rank).map_err(err)?;
                        bases.push(b);
                        lines.push(line_no);
                    }
                }
            }
        }
        let (n, rank, header_line) = header.ok_or(MatroidError::Parse {
            line: line_offset + 1,
            message: "missing `<n> <rank>` header".into(),
        })?;
        Ok(RawMatroid {
            n,
            rank,
            bases,
            lines,
            header_line,
        })
    }

    pub fn into_matroid(self) -> Result<Matroid, MatroidError> {
        Matroid::new(self.n, self.bases)
    }
}

fn parse_basis_token(token: &str, n: usize, rank: usize) -> Result<Basis, String> {
    if token == "{}" {
        return Ok(Basis::EMPTY);
    }
    let elements: Vec<usize> = if token.contains(',') || rank == 1 {
        token
            .split(',')
            .map(|p| {
                p.parse::<usize>()
                    .map_err(|_| format!("bad element `{p}` in basis `{token}`"))
            })
            .collect::<Result<_, _>>()?
    } else {
        token
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| format!("bad element `{c}` in basis `{token}`"))
            })
            .collect::<Result<_, _>>()?
    };
    if let Some(&e) = elements.iter().find(|&&e| e == 0 || e > n) {
        return Err(format!("element {e} of basis `{token}` is outside 1..={n}"));
    }
    if elements.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("basis `{token}` is not strictly increasing"));
    }
    if elements.len() != rank {
        return Err(format!(
            "basis `{token}` has {} elements, expected {rank}",
            elements.len()
        ));
    }
    Ok(Basis::from_elements(elements))
}

/// Removes element `p` and shifts everything above it down by one.
fn squeeze_out(b: Basis, p: usize) -> Basis {
    let low = b.bits() & ((1u64 << (p - 1)) - 1);
    let high = if p >= 64 { 0 } else { b.bits() >> p };
    Basis(low | high << (p - 1))
}

fn map_set(b: Basis, perm: &[usize]) -> Basis {
    Basis::from_elements(b.elements().map(|e| perm[e - 1]))
}

/// Odd and even positions of the sorted multiset `b1 ⊎ b2`, where
/// `rank_of[e - 1]` is the sort key of element `e`.
pub fn sort_pair_under(b1: Basis, b2: Basis, rank_of: &[usize]) -> (Basis, Basis) {
    let mut merged: Vec<usize> = b1.elements().chain(b2.elements()).collect();
    merged.sort_by_key(|&e| rank_of[e - 1]);
    let mut odd = Basis::EMPTY;
    let mut even = Basis::EMPTY;
    for (i, e) in merged.into_iter().enumerate() {
        if i % 2 == 0 {
            odd = odd.insert(e);
        } else {
            even = even.insert(e);
        }
    }
    (odd, even)
}

/// Sorting of a pair with respect to the natural order of labels.
pub fn sort_pair(b1: Basis, b2: Basis) -> (Basis, Basis) {
    let mut odd = Basis::EMPTY;
    let mut even = Basis::EMPTY;
    let mut pos = 0usize;
    for e in b1.union(b2).elements() {
        let copies = usize::from(b1.contains(e)) + usize::from(b2.contains(e));
        for _ in 0..copies {
            if pos.is_multiple_of(2) {
                odd = odd.insert(e);
            } else {
                even = even.insert(e);
            }
            pos += 1;
        }
    }
    (odd, even)
}

/// All `k`-subsets of `1..=n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Basis> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Basis>) {
        if current.len() == k {
            out.push(Basis::from_elements(current.iter().copied()));
            return;
        }
        let need = k - current.len();
        for e in start..=n {
            if n - e + 1 < need {
                break;
            }
            current.push(e);
            rec(e + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(1, n, k, &mut current, &mut out);
    out
}

/// Calls `f` on each permutation of `1..=n` (lexicographic order) until it returns `true`.
pub fn for_each_permutation<F: FnMut(&[usize]) -> bool>(n: usize, mut f: F) {
    let mut perm: Vec<usize> = (1..=n).collect();
    loop {
        if f(&perm) {
            return;
        }
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return;
        };
        let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}
