//! The projection monoid `𝒫(C*(G))`, represented by vectors in `ℕ[V]`.
//!
//! Two representatives are equal in the monoid iff they have the same
//! hereditary saturated support `W` and the same class in `K0(W)` (stable
//! weak cancellation). The rewriting oracle explores the congruence
//! generated by `δ_v ~ Σ_{e ∈ E^v} δ_{s(e)}` directly and serves as a check.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;

use crate::cone::{cone_member, positive_zero_combination, ConeAnswer};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ktheory::{k_groups, KData};
use crate::lattice::{hs_closure, IdealLattice};
use crate::limits::Limits;
use crate::vset::VertexSet;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonoidElement {
    pub coeffs: Vec<u64>,
}

impl MonoidElement {
    pub fn zero(n: usize) -> Self {
        MonoidElement { coeffs: vec![0; n] }
    }

    pub fn delta(n: usize, v: usize) -> Self {
        let mut c = Self::zero(n);
        c.coeffs[v] = 1;
        c
    }

    pub fn support(&self) -> VertexSet {
        VertexSet::from_iter(self.coeffs.iter().enumerate().filter(|(_, &x)| x != 0).map(|(v, _)| v))
    }

    pub fn add(&self, other: &Self) -> Self {
        MonoidElement {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, k: u64) -> Self {
        MonoidElement {
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }

    pub fn to_bigs(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&x| x == 0)
    }
}

/// Hereditary saturated closure of the support.
pub fn supp_ideal(g: &Graph, c: &MonoidElement) -> VertexSet {
    hs_closure(g, c.support())
}

fn class_in(kd: &KData, c: &MonoidElement) -> Vec<BigInt> {
    kd.restrict(&c.to_bigs()).expect("support lies in its own closure")
}

pub fn equal_in_p(g: &Graph, c1: &MonoidElement, c2: &MonoidElement) -> bool {
    let w = supp_ideal(g, c1);
    if w != supp_ideal(g, c2) {
        return false;
    }
    let kd = k_groups(g, w).expect("closures are hereditary and saturated");
    kd.k0.equal(&class_in(&kd, c1), &class_in(&kd, c2))
}

/// `c1 ≺ c2`: the support of `c1` lies in that of `c2`.
pub fn prec(g: &Graph, c1: &MonoidElement, c2: &MonoidElement) -> bool {
    supp_ideal(g, c1).is_subset(supp_ideal(g, c2))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeqAnswer {
    /// `c'` with `c1 + c' = c2` in the monoid.
    Yes(MonoidElement),
    No,
    Unknown(usize),
}

/// Decides `c1 ≤ c2`, i.e. whether some `c'` has `c1 + c' = c2` in `𝒫`.
pub fn leq_in_p(g: &Graph, c1: &MonoidElement, c2: &MonoidElement, limits: &Limits) -> LeqAnswer {
    if !prec(g, c1, c2) {
        return LeqAnswer::No;
    }
    let n = g.vertex_count();
    let w = supp_ideal(g, c2);
    let kd = k_groups(g, w).expect("closures are hereditary and saturated");
    let x: Vec<BigInt> = class_in(&kd, c2)
        .iter()
        .zip(class_in(&kd, c1))
        .map(|(a, b)| a - b)
        .collect();
    let lift = |local: &[BigInt]| -> Option<MonoidElement> {
        let mut coeffs = vec![0u64; n];
        for (&v, x) in kd.verts.iter().zip(local) {
            coeffs[v] = u64::try_from(x).ok()?;
        }
        Some(MonoidElement { coeffs })
    };
    let ok = |cp: &MonoidElement| equal_in_p(g, &c1.add(cp), c2);
    match cone_member(&kd.k0, &x, limits.cone_bound, limits.cone_search_cap) {
        ConeAnswer::No(_) => return LeqAnswer::No,
        ConeAnswer::Yes(c) => {
            if let Some(cp) = lift(&c) {
                if ok(&cp) {
                    return LeqAnswer::Yes(cp);
                }
                // pad the support with a zero class of full support
                if let Some(p) = positive_zero_combination(&kd.k0) {
                    let padded: Vec<BigInt> = c.iter().zip(&p).map(|(a, b)| a + b).collect();
                    if let Some(cp) = lift(&padded) {
                        if ok(&cp) {
                            return LeqAnswer::Yes(cp);
                        }
                    }
                }
            }
        }
        ConeAnswer::Unknown(_) => {}
    }
    // bounded search over witnesses supported in W
    let verts = kd.verts.clone();
    let bound = limits.cone_bound as u64;
    let mut examined = 0usize;
    for total in 0..=(bound as usize) * verts.len() {
        let mut c = vec![0u64; verts.len()];
        if let Some(found) = search_l1(
            total as u64,
            bound,
            0,
            &mut c,
            &mut examined,
            limits.cone_search_cap,
            &mut |c| {
                let mut coeffs = vec![0u64; n];
                for (&v, &x) in verts.iter().zip(c) {
                    coeffs[v] = x;
                }
                let cp = MonoidElement { coeffs };
                ok(&cp).then_some(cp)
            },
        ) {
            return LeqAnswer::Yes(found);
        }
        if examined > limits.cone_search_cap {
            break;
        }
    }
    LeqAnswer::Unknown(limits.cone_bound)
}

fn search_l1(
    total: u64,
    bound: u64,
    i: usize,
    c: &mut Vec<u64>,
    examined: &mut usize,
    cap: usize,
    visit: &mut dyn FnMut(&[u64]) -> Option<MonoidElement>,
) -> Option<MonoidElement> {
    if i == c.len() {
        if total != 0 {
            return None;
        }
        *examined += 1;
        if *examined > cap {
            return None;
        }
        return visit(c);
    }
    let rest = bound * (c.len() - i - 1) as u64;
    for k in total.saturating_sub(rest)..=total.min(bound) {
        c[i] = k;
        if let Some(f) = search_l1(total - k, bound, i + 1, c, examined, cap, visit) {
            return Some(f);
        }
        if *examined > cap {
            return None;
        }
    }
    c[i] = 0;
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleAnswer {
    /// The two orbits met; carries the length of the connecting chain.
    Equal(usize),
    /// One orbit was explored completely without meeting the other element.
    Distinct,
    Inconclusive,
}

/// Bidirectional breadth-first search over the congruence generated by
/// `δ_v ↔ Σ_{e ∈ E^v} δ_{s(e)}` for regular `v`.
pub fn congruence_oracle(
    g: &Graph,
    c1: &MonoidElement,
    c2: &MonoidElement,
    depth: usize,
    state_cap: usize,
) -> OracleAnswer {
    if c1 == c2 {
        return OracleAnswer::Equal(0);
    }
    let n = g.vertex_count();
    let moves: Vec<(usize, Vec<u64>)> = (0..n)
        .filter(|&v| g.is_regular(v))
        .map(|v| {
            let mut m = vec![0u64; n];
            for &e in g.incoming(v) {
                m[g.src(e)] += 1;
            }
            (v, m)
        })
        .collect();
    let neighbours = |c: &Vec<u64>| -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        for (v, m) in &moves {
            if c[*v] > 0 {
                let mut d = c.clone();
                d[*v] -= 1;
                for (x, y) in d.iter_mut().zip(m) {
                    *x += y;
                }
                out.push(d);
            }
            if c.iter().zip(m).all(|(x, y)| x >= y) {
                let mut d = c.clone();
                for (x, y) in d.iter_mut().zip(m) {
                    *x -= y;
                }
                d[*v] += 1;
                out.push(d);
            }
        }
        out
    };
    let mut seen: [HashMap<Vec<u64>, usize>; 2] = [HashMap::new(), HashMap::new()];
    let mut frontier: [VecDeque<Vec<u64>>; 2] = [VecDeque::new(), VecDeque::new()];
    seen[0].insert(c1.coeffs.clone(), 0);
    seen[1].insert(c2.coeffs.clone(), 0);
    frontier[0].push_back(c1.coeffs.clone());
    frontier[1].push_back(c2.coeffs.clone());
    let mut levels = [0usize; 2];
    while levels[0] + levels[1] < depth {
        // expand the smaller frontier by one level
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        let other = 1 - side;
        let mut next = VecDeque::new();
        while let Some(c) = frontier[side].pop_front() {
            for d in neighbours(&c) {
                if seen[side].contains_key(&d) {
                    continue;
                }
                if let Some(&k) = seen[other].get(&d) {
                    return OracleAnswer::Equal(levels[side] + 1 + k);
                }
                seen[side].insert(d.clone(), levels[side] + 1);
                next.push_back(d);
            }
            if seen[0].len() + seen[1].len() > state_cap {
                return OracleAnswer::Inconclusive;
            }
        }
        levels[side] += 1;
        if next.is_empty() {
            return OracleAnswer::Distinct;
        }
        frontier[side] = next;
    }
    OracleAnswer::Inconclusive
}

#[derive(Debug, Clone)]
pub struct MonoidHom {
    pub images: Vec<MonoidElement>,
    pub verified: bool,
    /// Regular vertices where the relation fails.
    pub failures: Vec<usize>,
    /// `ψ(W) = supp(Σ_{v ∈ W} φ(δ_v))` for each element of the domain lattice.
    pub psi: Vec<VertexSet>,
}

/// Checks that `δ_v ↦ images[v]` respects every relation
/// `δ_v = Σ_{e ∈ E^v} δ_{s(e)}`, and reports the induced map of lattices.
pub fn verify_monoid_hom(
    g: &Graph,
    g2: &Graph,
    images: &[Option<MonoidElement>],
    lattice: &IdealLattice,
) -> Result<MonoidHom> {
    let n2 = g2.vertex_count();
    let mut imgs = Vec::with_capacity(g.vertex_count());
    for v in 0..g.vertex_count() {
        match images.get(v).cloned().flatten() {
            Some(c) if c.coeffs.len() == n2 => imgs.push(c),
            Some(_) => {
                return Err(Error::IndexMismatch(format!(
                    "image of `{}` has the wrong length",
                    g.vertex_id(v)
                )))
            }
            None => return Err(Error::MissingImage(g.vertex_id(v).to_string())),
        }
    }
    let mut failures = Vec::new();
    for v in 0..g.vertex_count() {
        if !g.is_regular(v) {
            continue;
        }
        let sum = g
            .incoming(v)
            .iter()
            .fold(MonoidElement::zero(n2), |acc, &e| acc.add(&imgs[g.src(e)]));
        if !equal_in_p(g2, &imgs[v], &sum) {
            failures.push(v);
        }
    }
    let psi = lattice
        .elements()
        .iter()
        .map(|w| {
            let sum = w.iter().fold(MonoidElement::zero(n2), |acc, v| acc.add(&imgs[v]));
            supp_ideal(g2, &sum)
        })
        .collect();
    Ok(MonoidHom {
        images: imgs,
        verified: failures.is_empty(),
        failures,
        psi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::enumerate_lattice;

    fn el(c: &[u64]) -> MonoidElement {
        MonoidElement { coeffs: c.to_vec() }
    }

    fn remark() -> Graph {
        Graph::from_edges(
            &["1", "2", "3"],
            &[("a", "1", "1"), ("b", "2", "2"), ("c", "1", "3"), ("d", "2", "3")],
        )
        .unwrap()
    }

    fn loops(n: usize) -> Graph {
        let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        let edges: Vec<(&str, &str, &str)> = names.iter().map(|e| (e.as_str(), "v", "v")).collect();
        Graph::from_edges(&["v"], &edges).unwrap()
    }

    #[test]
    fn supports() {
        let g = remark();
        assert_eq!(supp_ideal(&g, &el(&[0, 0, 1])), g.all_vertices());
        assert_eq!(supp_ideal(&g, &el(&[0, 0, 0])), VertexSet::EMPTY);
        assert_eq!(supp_ideal(&g, &el(&[1, 1, 0])), g.all_vertices());
    }

    #[test]
    fn equality_examples() {
        assert!(equal_in_p(&loops(2), &el(&[1]), &el(&[5])));
        assert!(!equal_in_p(&loops(1), &el(&[1]), &el(&[2])));
        assert!(equal_in_p(&loops(1), &el(&[0]), &el(&[0])));
    }

    #[test]
    fn prec_examples() {
        let g = remark();
        assert!(prec(&g, &el(&[1, 0, 0]), &el(&[0, 0, 1])));
        assert!(!prec(&g, &el(&[0, 0, 1]), &el(&[1, 0, 0])));
        assert!(prec(&g, &el(&[0, 0, 0]), &el(&[1, 0, 0])));
    }

    #[test]
    fn leq_examples() {
        let g = loops(1);
        let lim = Limits::default();
        assert_eq!(leq_in_p(&g, &el(&[1]), &el(&[3]), &lim), LeqAnswer::Yes(el(&[2])));
        assert_eq!(leq_in_p(&g, &el(&[3]), &el(&[1]), &lim), LeqAnswer::No);
        let r = remark();
        assert_eq!(
            leq_in_p(&r, &el(&[1, 0, 2]), &el(&[1, 0, 2]), &lim),
            LeqAnswer::Yes(el(&[0, 0, 0]))
        );
    }

    #[test]
    fn oracle_examples() {
        let g = Graph::from_edges(&["a", "b"], &[("e", "b", "a")]).unwrap();
        assert_eq!(
            congruence_oracle(&g, &el(&[1, 0]), &el(&[0, 1]), 10, 1000),
            OracleAnswer::Equal(1)
        );
        assert_eq!(
            congruence_oracle(&loops(1), &el(&[1]), &el(&[2]), 10, 1000),
            OracleAnswer::Distinct
        );
        assert_eq!(
            congruence_oracle(&loops(1), &el(&[3]), &el(&[3]), 10, 1000),
            OracleAnswer::Equal(0)
        );
        assert!(matches!(
            congruence_oracle(&loops(2), &el(&[1]), &el(&[5]), 10, 1000),
            OracleAnswer::Equal(_)
        ));
    }

    #[test]
    fn monoid_hom_examples() {
        let lim = Limits::default();
        let c = loops(1);
        let o2 = loops(2);
        let lc = enumerate_lattice(&c, &lim).unwrap();
        let lo = enumerate_lattice(&o2, &lim).unwrap();
        let id = verify_monoid_hom(&c, &c, &[Some(el(&[1]))], &lc).unwrap();
        assert!(id.verified);
        assert_eq!(id.psi, lc.elements().to_vec());
        assert!(verify_monoid_hom(&c, &o2, &[Some(el(&[1]))], &lc).unwrap().verified);
        let bad = verify_monoid_hom(&o2, &c, &[Some(el(&[1]))], &lo).unwrap();
        assert!(!bad.verified);
        assert_eq!(bad.failures, vec![0]);
        assert_eq!(
            verify_monoid_hom(&c, &c, &[None], &lc).unwrap_err(),
            Error::MissingImage("v".into())
        );
    }
}
