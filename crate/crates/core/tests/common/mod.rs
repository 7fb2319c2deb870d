#![allow(dead_code)]

use mtoric::Matroid;

/// Uniform matroids on at most `max_n` elements closed under duals, direct
/// sums and 2-sums, one representative per isomorphism class.
pub fn small_matroid_closure(max_n: usize) -> Vec<Matroid> {
    let mut classes: Vec<Matroid> = Vec::new();
    let mut frontier: Vec<Matroid> = Vec::new();
    let add = |m: Matroid, classes: &mut Vec<Matroid>, frontier: &mut Vec<Matroid>| {
        if m.ground_set_size() == 0 || m.ground_set_size() > max_n {
            return;
        }
        if classes.iter().any(|c| c.is_isomorphic(&m)) {
            return;
        }
        classes.push(m.clone());
        frontier.push(m);
    };
    for n in 1..=max_n {
        for r in 0..=n {
            add(Matroid::uniform(r, n), &mut classes, &mut frontier);
        }
    }
    while !frontier.is_empty() {
        let batch = std::mem::take(&mut frontier);
        let known = classes.clone();
        for m in &batch {
            add(m.dual(), &mut classes, &mut frontier);
            for other in &known {
                if m.ground_set_size() + other.ground_set_size() <= max_n {
                    if let Ok(s) = m.direct_sum(other) {
                        add(s, &mut classes, &mut frontier);
                    }
                }
                if m.ground_set_size() + other.ground_set_size() <= max_n + 2 {
                    for p1 in 1..=m.ground_set_size() {
                        for p2 in 1..=other.ground_set_size() {
                            if let Ok(s) = m.two_sum(p1, other, p2) {
                                add(s, &mut classes, &mut frontier);
                            }
                        }
                    }
                }
            }
        }
    }
    classes.sort_by_key(|m| (m.ground_set_size(), m.rank(), m.num_bases()));
    classes
}
