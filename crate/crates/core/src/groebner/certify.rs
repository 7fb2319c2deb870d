//! Buchberger's criterion checked from scratch: every S-pair of every pair
//! of elements, no pair pruning, plain linear-scan division in universe
//! coordinates. Shares no code with the engine.

use std::cmp::Ordering;

use super::{Binomial, GroebnerBasis, Monomial, TermOrder};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub elements: usize,
    pub pairs_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertificationError {
    #[error("element {0} is not marked: its lead is not the greater monomial")]
    BadMarking(usize),
    #[error("S-pair of elements {0} and {1} does not reduce to zero")]
    NonZeroSPair(usize, usize),
    #[error("exponent overflow while checking S-pair ({0}, {1})")]
    Overflow(usize, usize),
}

fn remainder(m: &Monomial, elements: &[Binomial]) -> Option<Monomial> {
    let mut m = m.clone();
    'outer: loop {
        for e in elements {
            if let Some(q) = m.div(&e.lead) {
                m = q.mul(&e.trail).ok()?;
                continue 'outer;
            }
        }
        return Some(m);
    }
}

fn check_marking(order: &TermOrder, elements: &[Binomial]) -> Result<(), CertificationError> {
    for (k, e) in elements.iter().enumerate() {
        if order.compare(&e.lead, &e.trail) != Ok(Ordering::Greater) {
            return Err(CertificationError::BadMarking(k));
        }
    }
    Ok(())
}

/// Verifies that `gb.elements` is a Gröbner basis of the ideal it generates.
pub fn certify(gb: &GroebnerBasis) -> Result<Certificate, CertificationError> {
    let elements = &gb.elements;
    check_marking(&gb.order, elements)?;
    let mut pairs_checked = 0;
    for i in 0..elements.len() {
        for j in i + 1..elements.len() {
            pairs_checked += 1;
            let (f, g) = (&elements[i], &elements[j]);
            let l = f.lead.lcm(&g.lead);
            let a = l.div(&f.lead).unwrap().mul(&f.trail);
            let b = l.div(&g.lead).unwrap().mul(&g.trail);
            let (Ok(a), Ok(b)) = (a, b) else {
                return Err(CertificationError::Overflow(i, j));
            };
            let ra = remainder(&a, elements).ok_or(CertificationError::Overflow(i, j))?;
            let rb = remainder(&b, elements).ok_or(CertificationError::Overflow(i, j))?;
            if ra != rb {
                return Err(CertificationError::NonZeroSPair(i, j));
            }
        }
    }
    Ok(Certificate {
        elements: elements.len(),
        pairs_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::VariableUniverse;
    use crate::matroid::Basis;

    fn four_vars() -> VariableUniverse {
        VariableUniverse::for_toric_ideal(
            &(1..=4)
                .map(|i| Basis::from_elements([i]))
                .collect::<Vec<_>>(),
        )
    }

    fn bin(lead: [u8; 4], trail: [u8; 4]) -> Binomial {
        Binomial {
            lead: Monomial::from_exponents(&lead),
            trail: Monomial::from_exponents(&trail),
        }
    }

    #[test]
    fn coprime_leads_pass() {
        let gb = GroebnerBasis {
            universe: four_vars(),
            order: TermOrder::natural(4),
            elements: vec![
                bin([1, 0, 1, 0], [0, 2, 0, 0]),
                bin([0, 1, 0, 1], [0, 0, 2, 0]),
            ],
            reduced: false,
        };
        assert_eq!(
            certify(&gb),
            Ok(Certificate {
                elements: 2,
                pairs_checked: 1
            })
        );
    }

    #[test]
    fn detects_missing_element() {
        // S(x0x2 - x1^2, x0x3 - x1x2) = x1^2x3 - x1x2^2 is irreducible
        let gb = GroebnerBasis {
            universe: four_vars(),
            order: TermOrder::natural(4),
            elements: vec![
                bin([1, 0, 1, 0], [0, 2, 0, 0]),
                bin([1, 0, 0, 1], [0, 1, 1, 0]),
            ],
            reduced: false,
        };
        assert_eq!(certify(&gb), Err(CertificationError::NonZeroSPair(0, 1)));
        let mut bad = gb.clone();
        bad.elements[0] = bin([0, 2, 0, 0], [1, 0, 1, 0]);
        assert_eq!(certify(&bad), Err(CertificationError::BadMarking(0)));
    }
}
