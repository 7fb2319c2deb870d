//! Buchberger's algorithm specialised to pure-difference binomials.
//!
//! Internally monomials are stored with their exponents permuted into rank
//! order (greatest variable first), so that the lexicographic comparison is
//! a plain slice comparison.

use std::collections::BTreeSet;

use smallvec::SmallVec;

use super::{Binomial, Exponents, GbError, GroebnerBasis, Monomial, TermOrder, VariableUniverse};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
struct Packed {
    weight: u64,
    exps: Exponents,
    mask: u128,
}

fn mask_of(exps: &[u8]) -> u128 {
    let mut mask = 0u128;
    for (i, &e) in exps.iter().enumerate() {
        if e != 0 {
            mask |= 1 << (i % 128);
        }
    }
    mask
}

impl Packed {
    #[inline]
    fn divides(&self, other: &Packed) -> bool {
        self.mask & !other.mask == 0 && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    fn is_coprime(&self, other: &Packed) -> bool {
        self.mask & other.mask == 0
            && self
                .exps
                .iter()
                .zip(&other.exps)
                .all(|(&a, &b)| a == 0 || b == 0)
    }

    fn first_var(&self) -> Option<usize> {
        self.exps.iter().position(|&e| e != 0)
    }
}

#[derive(Clone, Debug)]
struct PackedBinomial {
    lead: Packed,
    trail: Packed,
}

/// Rank-ordered coordinates for one term order and grading.
#[derive(Clone, Debug)]
struct Ring {
    /// Order weights in rank coordinates, if the order is weighted.
    weights: Option<Vec<u64>>,
    /// Grading in rank coordinates.
    grading: Vec<u32>,
    order: TermOrder,
}

impl Ring {
    fn new(order: &TermOrder, grading: Option<&[u32]>) -> Ring {
        let weights = order
            .weights()
            .map(|w| order.ranking().iter().map(|&v| w[v]).collect());
        let grading = match grading {
            Some(g) => order.ranking().iter().map(|&v| g[v]).collect(),
            None => vec![1; order.num_vars()],
        };
        Ring {
            weights,
            grading,
            order: order.clone(),
        }
    }

    fn weight_of(&self, exps: &[u8]) -> u64 {
        match &self.weights {
            None => 0,
            Some(w) => exps.iter().zip(w).map(|(&e, &x)| u64::from(e) * x).sum(),
        }
    }

    fn make(&self, exps: Exponents) -> Packed {
        Packed {
            weight: self.weight_of(&exps),
            mask: mask_of(&exps),
            exps,
        }
    }

    fn pack(&self, m: &Monomial) -> Result<Packed, GbError> {
        m.check_len(self.order.num_vars())?;
        let exps = self.order.ranking().iter().map(|&v| m.exps[v]).collect();
        Ok(self.make(exps))
    }

    fn unpack(&self, p: &Packed) -> Monomial {
        let mut exps: Exponents = SmallVec::from_elem(0, p.exps.len());
        for (pos, &v) in self.order.ranking().iter().enumerate() {
            exps[v] = p.exps[pos];
        }
        Monomial { exps }
    }

    fn degree(&self, p: &Packed) -> u32 {
        p.exps
            .iter()
            .zip(&self.grading)
            .map(|(&e, &g)| u32::from(e) * g)
            .sum()
    }

    fn lcm(&self, a: &Packed, b: &Packed) -> Packed {
        let exps = a
            .exps
            .iter()
            .zip(&b.exps)
            .map(|(&x, &y)| x.max(y))
            .collect();
        self.make(exps)
    }

    fn gcd(&self, a: &Packed, b: &Packed) -> Packed {
        let exps = a
            .exps
            .iter()
            .zip(&b.exps)
            .map(|(&x, &y)| x.min(y))
            .collect();
        self.make(exps)
    }

    /// `m / d * q`, where `d` divides `m`.
    fn replace(&self, m: &Packed, d: &Packed, q: &Packed) -> Result<Packed, GbError> {
        let mut exps = m.exps.clone();
        for i in 0..exps.len() {
            exps[i] = (exps[i] - d.exps[i])
                .checked_add(q.exps[i])
                .ok_or(GbError::ExponentOverflow)?;
        }
        Ok(Packed {
            weight: m.weight - d.weight + q.weight,
            mask: mask_of(&exps),
            exps,
        })
    }

    fn div(&self, m: &Packed, d: &Packed) -> Packed {
        let exps = m.exps.iter().zip(&d.exps).map(|(&x, &y)| x - y).collect();
        Packed {
            weight: m.weight - d.weight,
            mask: 0,
            exps,
        }
        .remask()
    }

    fn mark(&self, a: Packed, b: Packed) -> Option<PackedBinomial> {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(PackedBinomial { lead: a, trail: b }),
            std::cmp::Ordering::Less => Some(PackedBinomial { lead: b, trail: a }),
        }
    }

    fn s_pair(
        &self,
        f: &PackedBinomial,
        g: &PackedBinomial,
    ) -> Result<Option<PackedBinomial>, GbError> {
        let l = self.lcm(&f.lead, &g.lead);
        let a = self.replace(&l, &f.lead, &f.trail)?;
        let b = self.replace(&l, &g.lead, &g.trail)?;
        Ok(self.mark(a, b))
    }
}

impl Packed {
    fn remask(mut self) -> Packed {
        self.mask = mask_of(&self.exps);
        self
    }
}

/// Leads bucketed by their greatest variable.
#[derive(Clone, Debug, Default)]
struct LeadIndex {
    by_first: Vec<Vec<usize>>,
}

impl LeadIndex {
    fn new(nvars: usize) -> Self {
        LeadIndex {
            by_first: vec![Vec::new(); nvars],
        }
    }

    fn insert(&mut self, idx: usize, lead: &Packed) {
        if let Some(v) = lead.first_var() {
            self.by_first[v].push(idx);
        }
    }

    #[inline]
    fn find(&self, m: &Packed, elements: &[PackedBinomial], active: &[bool]) -> Option<usize> {
        for (v, &e) in m.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            for &i in &self.by_first[v] {
                if active[i] && elements[i].lead.divides(m) {
                    return Some(i);
                }
            }
        }
        None
    }
}

/// Reduction state shared by the Buchberger loop and [`Reducer`].
#[derive(Clone, Debug)]
struct Basis {
    ring: Ring,
    elements: Vec<PackedBinomial>,
    active: Vec<bool>,
    index: LeadIndex,
    /// Set when some lead is the unit monomial (the ideal is the whole ring).
    has_unit: bool,
}

impl Basis {
    fn new(ring: Ring) -> Self {
        let nvars = ring.order.num_vars();
        Basis {
            ring,
            elements: Vec::new(),
            active: Vec::new(),
            index: LeadIndex::new(nvars),
            has_unit: false,
        }
    }

    fn push(&mut self, b: PackedBinomial) -> usize {
        let idx = self.elements.len();
        if b.lead.first_var().is_none() {
            self.has_unit = true;
        }
        self.index.insert(idx, &b.lead);
        self.elements.push(b);
        self.active.push(true);
        idx
    }

    fn normal_form(&self, m: &Packed) -> Result<Packed, GbError> {
        let mut m = m.clone();
        while let Some(i) = self.index.find(&m, &self.elements, &self.active) {
            let g = &self.elements[i];
            m = self.ring.replace(&m, &g.lead, &g.trail)?;
        }
        Ok(m)
    }

    fn reduce(&self, b: &PackedBinomial) -> Result<Option<PackedBinomial>, GbError> {
        let lead = self.normal_form(&b.lead)?;
        let trail = self.normal_form(&b.trail)?;
        Ok(self.ring.mark(lead, trail))
    }
}

/// Normal forms modulo a fixed set of marked binomials.
#[derive(Clone, Debug)]
pub struct Reducer {
    basis: Basis,
}

impl Reducer {
    /// The elements must be marked by `order`.
    pub fn new(order: &TermOrder, elements: &[Binomial]) -> Reducer {
        let ring = Ring::new(order, None);
        let mut basis = Basis::new(ring);
        for b in elements {
            let lead = basis
                .ring
                .pack(&b.lead)
                .expect("element outside the universe");
            let trail = basis
                .ring
                .pack(&b.trail)
                .expect("element outside the universe");
            basis.push(PackedBinomial { lead, trail });
        }
        Reducer { basis }
    }

    pub fn normal_form(&self, m: &Monomial) -> Result<Monomial, GbError> {
        let p = self.basis.ring.pack(m)?;
        let nf = self.basis.normal_form(&p)?;
        Ok(self.basis.ring.unpack(&nf))
    }

    /// Whether `a - b` lies in the ideal, assuming the elements form a Gröbner basis.
    pub fn congruent(&self, a: &Monomial, b: &Monomial) -> Result<bool, GbError> {
        Ok(self.normal_form(a)? == self.normal_form(b)?)
    }
}

#[derive(Debug, Clone)]
pub struct BuchbergerOptions {
    /// Product and chain criteria (Gebauer–Möller).
    pub criteria: bool,
    /// Skip pairs whose lcm has degree above the cap (truncated computation).
    pub degree_cap: Option<u32>,
    /// Grading used for pair selection and the degree cap, indexed by
    /// universe variable. Defaults to total degree.
    pub grading: Option<Vec<u32>>,
    /// Divide out the common factor of both sides of new elements.
    pub content_removal: bool,
}

impl Default for BuchbergerOptions {
    fn default() -> Self {
        BuchbergerOptions {
            criteria: true,
            degree_cap: None,
            grading: None,
            content_removal: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuchbergerStats {
    pub pairs_created: usize,
    pub pairs_pruned: usize,
    pub pairs_reduced: usize,
    pub zero_reductions: usize,
    pub pairs_over_cap: usize,
    pub max_elements: usize,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct Pair {
    degree: u32,
    lcm: Packed,
    i: u32,
    j: u32,
}

struct Engine {
    basis: Basis,
    pairs: BTreeSet<Pair>,
    opts: BuchbergerOptions,
    stats: BuchbergerStats,
}

impl Engine {
    fn make_pair(&self, i: usize, j: usize) -> Pair {
        let (i, j) = (i.min(j), i.max(j));
        let lcm = self
            .basis
            .ring
            .lcm(&self.basis.elements[i].lead, &self.basis.elements[j].lead);
        Pair {
            degree: self.basis.ring.degree(&lcm),
            lcm,
            i: i as u32,
            j: j as u32,
        }
    }

    fn add(&mut self, h: PackedBinomial) {
        let h_idx = self.basis.push(h);
        if !self.opts.criteria {
            for g in 0..h_idx {
                let p = self.make_pair(g, h_idx);
                self.pairs.insert(p);
                self.stats.pairs_created += 1;
            }
        } else {
            self.update(h_idx);
        }
        let active = self.basis.active.iter().filter(|&&a| a).count();
        self.stats.max_elements = self.stats.max_elements.max(active);
    }

    /// Gebauer–Möller installation of the new element `h`.
    fn update(&mut self, h: usize) {
        let elements = &self.basis.elements;
        let lh = elements[h].lead.clone();

        struct Cand {
            g: usize,
            lcm: Packed,
            coprime: bool,
        }
        let mut cands: Vec<Cand> = (0..h)
            .filter(|&g| self.basis.active[g])
            .map(|g| Cand {
                g,
                lcm: self.basis.ring.lcm(&lh, &elements[g].lead),
                coprime: lh.is_coprime(&elements[g].lead),
            })
            .collect();
        self.stats.pairs_created += cands.len();

        // criterion M / F: drop (h, g1) if some other (h, g2) has lcm dividing
        // lcm(h, g1); among equal lcms only the last survives
        let mut keep = vec![false; cands.len()];
        for a in 0..cands.len() {
            if cands[a].coprime {
                keep[a] = true;
                continue;
            }
            let la = &cands[a].lcm;
            let later = cands[a + 1..].iter().any(|c| c.lcm.divides(la));
            let earlier = !later
                && cands[..a]
                    .iter()
                    .zip(&keep)
                    .any(|(c, &k)| k && c.lcm.divides(la));
            keep[a] = !later && !earlier;
        }
        // product criterion
        let mut new_pairs = Vec::new();
        for (c, k) in cands.drain(..).zip(keep) {
            if k && !c.coprime {
                new_pairs.push(c);
            } else {
                self.stats.pairs_pruned += 1;
            }
        }

        // criterion B on the old pairs
        let ring = &self.basis.ring;
        let before = self.pairs.len();
        self.pairs.retain(|p| {
            if !lh.divides(&p.lcm) {
                return true;
            }
            let li = ring.lcm(&elements[p.i as usize].lead, &lh);
            let lj = ring.lcm(&elements[p.j as usize].lead, &lh);
            li == p.lcm || lj == p.lcm
        });
        self.stats.pairs_pruned += before - self.pairs.len();

        for c in new_pairs {
            let p = Pair {
                degree: self.basis.ring.degree(&c.lcm),
                lcm: c.lcm,
                i: c.g as u32,
                j: h as u32,
            };
            self.pairs.insert(p);
        }

        for g in 0..h {
            if self.basis.active[g] && lh.divides(&self.basis.elements[g].lead) {
                self.basis.active[g] = false;
            }
        }
    }

    fn finish(&self, h: Option<PackedBinomial>) -> Option<PackedBinomial> {
        let h = h?;
        if !self.opts.content_removal {
            return Some(h);
        }
        let ring = &self.basis.ring;
        let g = ring.gcd(&h.lead, &h.trail);
        if g.first_var().is_none() {
            return Some(h);
        }
        Some(PackedBinomial {
            lead: ring.div(&h.lead, &g),
            trail: ring.div(&h.trail, &g),
        })
    }

    fn run(&mut self) -> Result<(), GbError> {
        while let Some(pair) = self.pairs.pop_first() {
            if self.basis.has_unit {
                break;
            }
            if let Some(cap) = self.opts.degree_cap {
                if pair.degree > cap {
                    self.stats.pairs_over_cap += 1;
                    continue;
                }
            }
            self.stats.pairs_reduced += 1;
            let (i, j) = (pair.i as usize, pair.j as usize);
            let s = self
                .basis
                .ring
                .s_pair(&self.basis.elements[i], &self.basis.elements[j])?;
            let Some(s) = s else {
                self.stats.zero_reductions += 1;
                continue;
            };
            let h = self.basis.reduce(&s)?;
            match self.finish(h) {
                None => self.stats.zero_reductions += 1,
                Some(h) => {
                    debug_assert!(h.lead > h.trail);
                    self.add(h);
                }
            }
        }
        Ok(())
    }
}

/// Computes a Gröbner basis of the ideal generated by `generators`.
///
/// The result is a minimal (not yet inter-reduced) basis; pass it through
/// [`super::reduce_gb`] for the reduced one. Generators are re-marked under
/// `order`.
pub fn buchberger(
    generators: &[Binomial],
    universe: &VariableUniverse,
    order: &TermOrder,
    opts: &BuchbergerOptions,
) -> Result<(GroebnerBasis, BuchbergerStats), GbError> {
    let nvars = universe.len();
    if order.num_vars() != nvars {
        return Err(GbError::UniverseMismatch {
            expected: nvars,
            found: order.num_vars(),
        });
    }
    if let Some(g) = &opts.grading {
        if g.len() != nvars {
            return Err(GbError::UniverseMismatch {
                expected: nvars,
                found: g.len(),
            });
        }
    }
    let grading: Vec<u32> = opts.grading.clone().unwrap_or_else(|| vec![1; nvars]);
    for (k, b) in generators.iter().enumerate() {
        b.lead.check_len(nvars)?;
        b.trail.check_len(nvars)?;
        if b.lead == b.trail {
            return Err(GbError::EqualSides);
        }
        if opts.degree_cap.is_some() && !b.is_homogeneous(&grading) {
            return Err(GbError::Inhomogeneous(k));
        }
    }

    let ring = Ring::new(order, Some(&grading));
    let mut engine = Engine {
        basis: Basis::new(ring),
        pairs: BTreeSet::new(),
        opts: opts.clone(),
        stats: BuchbergerStats::default(),
    };

    // sorted input gives a result independent of the generator order
    let mut packed: Vec<PackedBinomial> = generators
        .iter()
        .map(|b| {
            let a = engine.basis.ring.pack(&b.lead)?;
            let c = engine.basis.ring.pack(&b.trail)?;
            Ok(engine.basis.ring.mark(a, c).expect("sides differ"))
        })
        .collect::<Result<_, GbError>>()?;
    packed.sort_by(|x, y| (&x.lead, &x.trail).cmp(&(&y.lead, &y.trail)));
    packed.dedup_by(|x, y| x.lead == y.lead && x.trail == y.trail);

    for g in packed {
        if engine.basis.has_unit {
            break;
        }
        let h = engine.basis.reduce(&g)?;
        if let Some(h) = engine.finish(h) {
            engine.add(h);
        }
    }
    engine.run()?;

    let ring = &engine.basis.ring;
    let elements = engine
        .basis
        .elements
        .iter()
        .zip(&engine.basis.active)
        .filter(|(_, &a)| a)
        .map(|(b, _)| Binomial {
            lead: ring.unpack(&b.lead),
            trail: ring.unpack(&b.trail),
        })
        .collect();
    Ok((
        GroebnerBasis {
            universe: universe.clone(),
            order: order.clone(),
            elements,
            reduced: false,
        },
        engine.stats,
    ))
}
