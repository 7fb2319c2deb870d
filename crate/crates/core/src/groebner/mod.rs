//! Binomial Gröbner bases over exponent-vector monomials.
//!
//! Every ideal handled here is generated by pure differences `u - v` of
//! monomials, and S-pairs and reductions of such differences stay pure
//! differences (or vanish). Coefficients are therefore never stored: a
//! [`Binomial`] is a pair of monomials, marked so that the lead is the
//! greater one under the ambient [`TermOrder`].

mod certify;
mod engine;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

use crate::matroid::Basis;

pub use certify::{certify, Certificate, CertificationError};
pub use engine::{buchberger, BuchbergerOptions, BuchbergerStats, Reducer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GbError {
    #[error("monomial has {found} variables, the universe has {expected}")]
    UniverseMismatch { expected: usize, found: usize },
    #[error("generator has equal sides and is not a binomial")]
    EqualSides,
    #[error("generator {0} is not homogeneous under the grading")]
    Inhomogeneous(usize),
    #[error("invalid term order: {0}")]
    InvalidOrder(String),
    #[error(
        "cannot eliminate: dropped variable {dropped} is smaller than retained variable {retained}"
    )]
    PrefixViolation { dropped: String, retained: String },
    #[error("elimination requires a pure lexicographic order")]
    NotLexicographic,
    #[error("operation requires a reduced Gröbner basis")]
    NotReduced,
    #[error("exponent overflow (exponents are limited to 255)")]
    ExponentOverflow,
    #[error("duplicate variable {0} in universe")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

/// A variable of `K[x_B, t_i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variable {
    /// Ground-set variable `t_i` (1-based).
    T(usize),
    /// Basis variable `x_B`.
    X(Basis),
}

impl Variable {
    pub fn name(&self) -> String {
        match self {
            Variable::T(i) => format!("t{i}"),
            Variable::X(b) => format!("x{}", b.label()),
        }
    }

    pub fn parse(name: &str) -> Option<Variable> {
        if let Some(rest) = name.strip_prefix('t') {
            let i: usize = rest.parse().ok()?;
            (i >= 1).then_some(Variable::T(i))
        } else if let Some(rest) = name.strip_prefix('x') {
            if rest.is_empty() {
                return None;
            }
            Basis::parse_label(rest).map(Variable::X)
        } else {
            None
        }
    }

    pub fn is_t(&self) -> bool {
        matches!(self, Variable::T(_))
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// The variables of a polynomial ring, densely indexed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableUniverse {
    vars: Vec<Variable>,
    index: HashMap<Variable, usize>,
}

impl VariableUniverse {
    pub fn new(vars: Vec<Variable>) -> Result<Self, GbError> {
        let mut index = HashMap::with_capacity(vars.len());
        for (i, v) in vars.iter().enumerate() {
            if index.insert(*v, i).is_some() {
                return Err(GbError::DuplicateVariable(v.name()));
            }
        }
        Ok(VariableUniverse { vars, index })
    }

    /// `t_1..t_n` followed by one `x_B` per basis, in the given order.
    pub fn for_graph_ideal(n: usize, bases: &[Basis]) -> Self {
        let vars = (1..=n)
            .map(Variable::T)
            .chain(bases.iter().map(|&b| Variable::X(b)))
            .collect();
        VariableUniverse::new(vars).expect("bases are distinct")
    }

    /// One `x_B` per basis.
    pub fn for_toric_ideal(bases: &[Basis]) -> Self {
        VariableUniverse::new(bases.iter().map(|&b| Variable::X(b)).collect())
            .expect("bases are distinct")
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn variable(&self, i: usize) -> Variable {
        self.vars[i]
    }

    pub fn index_of(&self, v: Variable) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn index_of_name(&self, name: &str) -> Result<usize, GbError> {
        Variable::parse(name)
            .and_then(|v| self.index_of(v))
            .ok_or_else(|| GbError::UnknownVariable(name.to_string()))
    }

    pub fn t_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.vars[i].is_t()).collect()
    }

    pub fn x_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.vars[i].is_t()).collect()
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        if m.is_unit() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (i, &e) in m.exponents().iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.vars[i].name()),
                _ => parts.push(format!("{}^{}", self.vars[i].name(), e)),
            }
        }
        parts.join("*")
    }

    pub fn format_binomial(&self, b: &Binomial) -> String {
        format!(
            "{} - {}",
            self.format_monomial(&b.lead),
            self.format_monomial(&b.trail)
        )
    }
}

pub(crate) type Exponents = SmallVec<[u8; 48]>;

/// Exponent vector indexed by universe variable.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: Exponents,
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps.as_slice())
    }
}

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial {
            exps: SmallVec::from_elem(0, nvars),
        }
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut m = Monomial::unit(nvars);
        m.exps[i] = 1;
        m
    }

    pub fn from_exponents(exps: &[u8]) -> Self {
        Monomial {
            exps: SmallVec::from_slice(exps),
        }
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exps
    }

    pub fn exponent(&self, i: usize) -> u8 {
        self.exps[i]
    }

    pub fn num_vars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        self.exps
            .iter()
            .zip(weights)
            .map(|(&e, &w)| u32::from(e) * w)
            .sum()
    }

    pub fn is_unit(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps
            .iter()
            .zip(&other.exps)
            .all(|(&a, &b)| a == 0 || b == 0)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(&a, &b)| a.max(b))
                .collect(),
        }
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(&a, &b)| a.min(b))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial, GbError> {
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(&a, &b)| a.checked_add(b).ok_or(GbError::ExponentOverflow))
            .collect::<Result<_, _>>()?;
        Ok(Monomial { exps })
    }

    /// `self / other`, or `None` when `other` does not divide `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<_>>()?;
        Some(Monomial { exps })
    }

    fn check_len(&self, nvars: usize) -> Result<(), GbError> {
        if self.exps.len() == nvars {
            Ok(())
        } else {
            Err(GbError::UniverseMismatch {
                expected: nvars,
                found: self.exps.len(),
            })
        }
    }
}

/// `lead - trail` with `lead > trail` under the ambient order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binomial {
    pub lead: Monomial,
    pub trail: Monomial,
}

impl Binomial {
    /// Marks `a - b` under `order`; `None` when `a == b`.
    pub fn marked(
        a: Monomial,
        b: Monomial,
        order: &TermOrder,
    ) -> Result<Option<Binomial>, GbError> {
        Ok(match order.compare(&a, &b)? {
            Ordering::Equal => None,
            Ordering::Greater => Some(Binomial { lead: a, trail: b }),
            Ordering::Less => Some(Binomial { lead: b, trail: a }),
        })
    }

    /// Total degree of the lead.
    pub fn degree(&self) -> u32 {
        self.lead.degree()
    }

    pub fn is_homogeneous(&self, grading: &[u32]) -> bool {
        self.lead.weighted_degree(grading) == self.trail.weighted_degree(grading)
    }
}

/// A lexicographic term order given by an explicit ranking of the variables,
/// optionally refined from a positive weight vector (weight first, lex to
/// break ties).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermOrder {
    ranking: Vec<usize>,
    position: Vec<usize>,
    weights: Option<Vec<u64>>,
}

impl TermOrder {
    /// `ranking` lists universe indices, greatest variable first.
    pub fn lex(ranking: Vec<usize>) -> Result<Self, GbError> {
        let n = ranking.len();
        let mut position = vec![usize::MAX; n];
        for (pos, &v) in ranking.iter().enumerate() {
            if v >= n {
                return Err(GbError::InvalidOrder(format!(
                    "variable index {v} out of range"
                )));
            }
            if position[v] != usize::MAX {
                return Err(GbError::InvalidOrder(format!(
                    "variable index {v} listed twice"
                )));
            }
            position[v] = pos;
        }
        Ok(TermOrder {
            ranking,
            position,
            weights: None,
        })
    }

    /// Weight order on positive `weights` (indexed by universe variable),
    /// ties broken by `ranking`.
    pub fn weighted(weights: Vec<u64>, ranking: Vec<usize>) -> Result<Self, GbError> {
        if weights.len() != ranking.len() {
            return Err(GbError::InvalidOrder(
                "weight vector has wrong length".into(),
            ));
        }
        if weights.contains(&0) {
            return Err(GbError::InvalidOrder("weights must be positive".into()));
        }
        let mut order = TermOrder::lex(ranking)?;
        order.weights = Some(weights);
        Ok(order)
    }

    /// Lex order with the variables ranked by universe index.
    pub fn natural(nvars: usize) -> Self {
        TermOrder::lex((0..nvars).collect()).unwrap()
    }

    pub fn num_vars(&self) -> usize {
        self.ranking.len()
    }

    /// Universe indices, greatest first.
    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    /// Rank of variable `v` (0 = greatest).
    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn weights(&self) -> Option<&[u64]> {
        self.weights.as_deref()
    }

    pub fn is_lex(&self) -> bool {
        self.weights.is_none()
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Result<Ordering, GbError> {
        a.check_len(self.num_vars())?;
        b.check_len(self.num_vars())?;
        if let Some(w) = &self.weights {
            let wa: u64 = a.exps.iter().zip(w).map(|(&e, &x)| u64::from(e) * x).sum();
            let wb: u64 = b.exps.iter().zip(w).map(|(&e, &x)| u64::from(e) * x).sum();
            if wa != wb {
                return Ok(wa.cmp(&wb));
            }
        }
        for &v in &self.ranking {
            match a.exps[v].cmp(&b.exps[v]) {
                Ordering::Equal => continue,
                other => return Ok(other),
            }
        }
        Ok(Ordering::Equal)
    }

    pub fn describe(&self, universe: &VariableUniverse) -> String {
        let names: Vec<String> = self
            .ranking
            .iter()
            .map(|&v| universe.variable(v).name())
            .collect();
        let lex = names.join(">");
        match &self.weights {
            None => lex,
            Some(w) => {
                let ws: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                format!("weight({}) then {}", ws.join(","), lex)
            }
        }
    }
}

/// A set of marked binomials together with the order that marks them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    pub universe: VariableUniverse,
    pub order: TermOrder,
    pub elements: Vec<Binomial>,
    pub reduced: bool,
}

impl GroebnerBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn reducer(&self) -> Reducer {
        Reducer::new(&self.order, &self.elements)
    }

    pub fn format_elements(&self) -> Vec<String> {
        self.elements
            .iter()
            .map(|b| self.universe.format_binomial(b))
            .collect()
    }
}

/// `(L / lead f) * trail f - (L / lead g) * trail g` with `L` the lcm of the
/// leads, marked; `None` when the two monomials coincide.
pub fn s_pair(f: &Binomial, g: &Binomial, order: &TermOrder) -> Result<Option<Binomial>, GbError> {
    let l = f.lead.lcm(&g.lead);
    let a = l.div(&f.lead).unwrap().mul(&f.trail)?;
    let b = l.div(&g.lead).unwrap().mul(&g.trail)?;
    Binomial::marked(a, b, order)
}

/// Normal form of a binomial modulo `basis`; `None` when it reduces to zero.
pub fn reduce(
    b: &Binomial,
    basis: &[Binomial],
    order: &TermOrder,
) -> Result<Option<Binomial>, GbError> {
    let reducer = Reducer::new(order, basis);
    let lead = reducer.normal_form(&b.lead)?;
    let trail = reducer.normal_form(&b.trail)?;
    Binomial::marked(lead, trail, order)
}

/// Normal form of a monomial modulo a Gröbner basis.
pub fn normal_form(m: &Monomial, gb: &GroebnerBasis) -> Result<Monomial, GbError> {
    gb.reducer().normal_form(m)
}

/// Minimalizes and inter-reduces; the result is unique for the ideal and order.
pub fn reduce_gb(gb: &GroebnerBasis) -> Result<GroebnerBasis, GbError> {
    let mut leads: Vec<Binomial> = Vec::new();
    let mut sorted = gb.elements.clone();
    // smallest leads first so that duplicates keep a deterministic representative
    sorted.sort_by(|a, b| {
        gb.order
            .compare(&a.lead, &b.lead)
            .unwrap()
            .then_with(|| gb.order.compare(&a.trail, &b.trail).unwrap())
    });
    for b in sorted {
        if !leads.iter().any(|g| g.lead.divides(&b.lead)) {
            leads.push(b);
        }
    }
    let reducer = Reducer::new(&gb.order, &leads);
    let mut elements = Vec::with_capacity(leads.len());
    for b in &leads {
        let trail = reducer.normal_form(&b.trail)?;
        elements.push(Binomial {
            lead: b.lead.clone(),
            trail,
        });
    }
    // greatest lead first
    elements.sort_by(|a, b| gb.order.compare(&b.lead, &a.lead).unwrap());
    Ok(GroebnerBasis {
        universe: gb.universe.clone(),
        order: gb.order.clone(),
        elements,
        reduced: true,
    })
}

/// Keeps the elements free of the dropped variables, re-indexed over the
/// retained universe. The dropped variables must be the greatest ones of a
/// lexicographic order.
pub fn eliminate(gb: &GroebnerBasis, drop: &[usize]) -> Result<GroebnerBasis, GbError> {
    if !gb.order.is_lex() {
        return Err(GbError::NotLexicographic);
    }
    if !gb.reduced {
        return Err(GbError::NotReduced);
    }
    let nvars = gb.universe.len();
    let mut dropped = vec![false; nvars];
    for &v in drop {
        if v >= nvars {
            return Err(GbError::InvalidOrder(format!(
                "variable index {v} out of range"
            )));
        }
        dropped[v] = true;
    }
    let k = dropped.iter().filter(|&&d| d).count();
    // the first k ranks must all be dropped
    if let Some(&retained) = gb.order.ranking()[..k].iter().find(|&&v| !dropped[v]) {
        let smallest_dropped = *gb.order.ranking()[k..]
            .iter()
            .find(|&&v| dropped[v])
            .expect("a dropped variable sits below the prefix");
        return Err(GbError::PrefixViolation {
            dropped: gb.universe.variable(smallest_dropped).name(),
            retained: gb.universe.variable(retained).name(),
        });
    }
    let retained: Vec<usize> = (0..nvars).filter(|&v| !dropped[v]).collect();
    let mut new_index = vec![usize::MAX; nvars];
    for (i, &v) in retained.iter().enumerate() {
        new_index[v] = i;
    }
    let universe =
        VariableUniverse::new(retained.iter().map(|&v| gb.universe.variable(v)).collect())?;
    let ranking: Vec<usize> = gb.order.ranking()[k..]
        .iter()
        .map(|&v| new_index[v])
        .collect();
    let order = TermOrder::lex(ranking)?;
    let project = |m: &Monomial| {
        Monomial::from_exponents(&retained.iter().map(|&v| m.exps[v]).collect::<Vec<u8>>())
    };
    let elements = gb
        .elements
        .iter()
        .filter(|b| {
            drop.iter()
                .all(|&v| b.lead.exps[v] == 0 && b.trail.exps[v] == 0)
        })
        .map(|b| Binomial {
            lead: project(&b.lead),
            trail: project(&b.trail),
        })
        .collect();
    Ok(GroebnerBasis {
        universe,
        order,
        elements,
        reduced: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{k_subsets, Basis};

    fn b(e: &[usize]) -> Basis {
        Basis::from_elements(e.iter().copied())
    }

    /// x-universe of U_{2,4} in the order x12, x13, x14, x23, x24, x34.
    fn u24_universe() -> VariableUniverse {
        VariableUniverse::for_toric_ideal(&k_subsets(4, 2))
    }

    fn mono(u: &VariableUniverse, names: &[&str]) -> Monomial {
        let mut m = Monomial::unit(u.len());
        for n in names {
            m.exps[u.index_of_name(n).unwrap()] += 1;
        }
        m
    }

    #[test]
    fn variable_names() {
        assert_eq!(Variable::T(3).name(), "t3");
        assert_eq!(Variable::X(b(&[2, 3, 6])).name(), "x236");
        assert_eq!(Variable::parse("x236"), Some(Variable::X(b(&[2, 3, 6]))));
        assert_eq!(Variable::parse("t7"), Some(Variable::T(7)));
        assert_eq!(Variable::parse("t0"), None);
        assert_eq!(Variable::parse("y1"), None);
    }

    #[test]
    fn lex_compare() {
        let u = u24_universe();
        let order = TermOrder::natural(u.len());
        let a = mono(&u, &["x12", "x34"]);
        let c = mono(&u, &["x13", "x24"]);
        assert_eq!(order.compare(&a, &c), Ok(Ordering::Greater));
        assert_eq!(order.compare(&a, &a), Ok(Ordering::Equal));
        assert!(order.compare(&a, &Monomial::unit(3)).is_err());
        // reversed ranking flips the outcome
        let rev = TermOrder::lex((0..u.len()).rev().collect()).unwrap();
        assert_eq!(rev.compare(&a, &c), Ok(Ordering::Greater));
        let d = mono(&u, &["x14", "x23"]);
        assert_eq!(rev.compare(&c, &d), Ok(Ordering::Greater));
    }

    #[test]
    fn invalid_orders() {
        assert!(TermOrder::lex(vec![0, 0]).is_err());
        assert!(TermOrder::lex(vec![0, 2]).is_err());
        assert!(TermOrder::weighted(vec![1, 0], vec![0, 1]).is_err());
    }

    #[test]
    fn s_pair_of_u24_quadrics() {
        let u = u24_universe();
        let order = TermOrder::natural(u.len());
        let f = Binomial {
            lead: mono(&u, &["x12", "x34"]),
            trail: mono(&u, &["x14", "x23"]),
        };
        let g = Binomial {
            lead: mono(&u, &["x13", "x24"]),
            trail: mono(&u, &["x14", "x23"]),
        };
        assert_eq!(s_pair(&f, &f, &order), Ok(None));
        // coprime leads: trail f * lead g - trail g * lead f
        let s = s_pair(&f, &g, &order).unwrap().unwrap();
        assert_eq!(s.lead, mono(&u, &["x12", "x34", "x14", "x23"]));
        assert_eq!(s.trail, mono(&u, &["x13", "x24", "x14", "x23"]));
        assert_eq!(reduce(&s, &[f.clone(), g.clone()], &order), Ok(None));
        assert_eq!(reduce(&f, &[f.clone(), g.clone()], &order), Ok(None));
        let lone = Binomial {
            lead: mono(&u, &["x12", "x12"]),
            trail: mono(&u, &["x13", "x13"]),
        };
        assert_eq!(reduce(&lone, &[f, g], &order), Ok(Some(lone)));
    }

    #[test]
    fn reduce_gb_drops_redundant_elements() {
        let u = u24_universe();
        let order = TermOrder::natural(u.len());
        let f = Binomial {
            lead: mono(&u, &["x12", "x34"]),
            trail: mono(&u, &["x14", "x23"]),
        };
        let g = Binomial {
            lead: mono(&u, &["x13", "x24"]),
            trail: mono(&u, &["x14", "x23"]),
        };
        let redundant = Binomial {
            lead: mono(&u, &["x12", "x34", "x34"]),
            trail: mono(&u, &["x14", "x23", "x34"]),
        };
        let gb = GroebnerBasis {
            universe: u.clone(),
            order: order.clone(),
            elements: vec![redundant, g.clone(), f.clone()],
            reduced: false,
        };
        let r = reduce_gb(&gb).unwrap();
        assert_eq!(r.elements, vec![f, g]);
        assert!(r.reduced);
        assert_eq!(reduce_gb(&r).unwrap(), r);
    }

    #[test]
    fn eliminate_checks_prefix() {
        let u = VariableUniverse::for_graph_ideal(2, &[b(&[1]), b(&[2])]);
        // t1 > x1 > t2 > x2: t2 is not in the prefix
        let order = TermOrder::lex(vec![0, 2, 1, 3]).unwrap();
        let gb = GroebnerBasis {
            universe: u.clone(),
            order,
            elements: vec![],
            reduced: true,
        };
        assert_eq!(
            eliminate(&gb, &[0, 1]),
            Err(GbError::PrefixViolation {
                dropped: "t2".into(),
                retained: "x1".into()
            })
        );
        let same = eliminate(&gb, &[]).unwrap();
        assert_eq!(same.universe, gb.universe);
        assert_eq!(same.order, gb.order);
    }
}
