use std::collections::HashSet;

use rayon::prelude::*;

use super::group::CayleyTable;
use super::{FiniteGroup, Permutation};
use crate::error::{Error, Result};

/// Default largest group order for which [`subgroups_of_order`] searches.
pub const DEFAULT_SUBGROUP_SEARCH_CAP: usize = 400;

/// Fixed-width bitset over element indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct ElementSet(Vec<u64>);

impl ElementSet {
    fn empty(n: usize) -> Self {
        ElementSet(vec![0; n.div_ceil(64)])
    }

    #[inline]
    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    fn insert(&mut self, i: usize) -> bool {
        let fresh = !self.contains(i);
        self.0[i / 64] |= 1 << (i % 64);
        fresh
    }

    fn indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.0.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push(w * 64 + b);
                bits &= bits - 1;
            }
        }
        out
    }
}

#[derive(Clone)]
struct Candidate {
    members: ElementSet,
    size: usize,
    generators: Vec<usize>,
}

/// Closure of `base ∪ {x}` under the table, or `None` once it grows past
/// `limit` or swallows `forbidden`.
fn extend(
    table: &CayleyTable,
    n: usize,
    base: Option<&Candidate>,
    x: usize,
    limit: usize,
    forbidden: Option<usize>,
) -> Option<Candidate> {
    let mut generators = base.map(|b| b.generators.clone()).unwrap_or_default();
    generators.push(x);
    let mut members = base.map(|b| b.members.clone()).unwrap_or_else(|| {
        let mut s = ElementSet::empty(n);
        s.insert(0);
        s
    });
    let mut size = base.map_or(1, |b| b.size);
    let mut frontier: Vec<usize> = members.indices();
    while let Some(y) = frontier.pop() {
        for &s in &generators {
            let z = table.mul(y, s);
            if members.insert(z) {
                if Some(z) == forbidden {
                    return None;
                }
                size += 1;
                if size > limit {
                    return None;
                }
                frontier.push(z);
            }
        }
    }
    Some(Candidate {
        members,
        size,
        generators,
    })
}

fn into_group(g: &FiniteGroup, c: &Candidate) -> FiniteGroup {
    let generators = c
        .generators
        .iter()
        .filter(|&&i| i != 0)
        .map(|&i| g.element(i).clone())
        .collect();
    g.subgroup_from_indices(generators, c.members.indices())
}

/// All subgroups of `g` of order `m` that do not contain `exclude`.
///
/// Bottom-up search: every cyclic subgroup whose order divides `m` seeds the
/// frontier, and each frontier member is extended by one outside element as
/// long as the closure order still divides `m` and avoids `exclude`. Every
/// admissible subgroup is reached through a chain of such extensions, so the
/// search is complete. Results are sorted by their element lists.
pub fn subgroups_of_order(
    g: &FiniteGroup,
    m: usize,
    exclude: &Permutation,
    search_cap: usize,
) -> Result<Vec<FiniteGroup>> {
    let forbidden = g.require_member(exclude, "excluded element")?;
    if m == 0 || !g.order().is_multiple_of(m) {
        return Err(Error::invalid(format!(
            "subgroup order {m} does not divide the group order {}",
            g.order()
        )));
    }
    if g.order() > search_cap {
        return Err(Error::capacity(
            format!("subgroup search on a group of order {}", g.order()),
            search_cap,
            "supply the subgroup explicitly (--delta) or raise --subgroup-cap",
        ));
    }
    if forbidden == 0 {
        return Ok(Vec::new());
    }
    let n = g.order();
    let table = g.cayley_table();

    let mut seen: HashSet<ElementSet> = HashSet::new();
    let mut frontier: Vec<Candidate> = Vec::new();
    for x in 0..n {
        if let Some(c) = extend(table, n, None, x, m, Some(forbidden)) {
            if m.is_multiple_of(c.size) && seen.insert(c.members.clone()) {
                frontier.push(c);
            }
        }
    }
    let mut found: Vec<Candidate> = frontier.iter().filter(|c| c.size == m).cloned().collect();

    while !frontier.is_empty() {
        let mut grown: Vec<Candidate> = frontier
            .par_iter()
            .filter(|c| c.size < m)
            .flat_map_iter(|c| {
                (0..n)
                    .filter(move |&x| !c.members.contains(x))
                    .filter_map(move |x| extend(table, n, Some(c), x, m, Some(forbidden)))
                    .filter(|e| m.is_multiple_of(e.size))
            })
            .collect();
        grown.sort_by(|a, b| a.members.cmp(&b.members).then(a.generators.cmp(&b.generators)));
        frontier = grown
            .into_iter()
            .filter(|c| seen.insert(c.members.clone()))
            .collect();
        found.extend(frontier.iter().filter(|c| c.size == m).cloned());
    }

    let mut groups: Vec<FiniteGroup> = found.iter().map(|c| into_group(g, c)).collect();
    groups.sort_by(|a, b| a.elements().cmp(b.elements()));
    Ok(groups)
}

/// Smallest subgroup of `g` containing `a` and `h`.
pub fn join_subgroup(g: &FiniteGroup, a: &Permutation, h: &FiniteGroup) -> Result<FiniteGroup> {
    g.require_member(a, "joined element")?;
    g.require_subgroup(h, "joined subgroup")?;
    if h.contains(a) {
        return Ok(h.clone());
    }
    let mut gens = h.generators().to_vec();
    gens.push(a.clone());
    FiniteGroup::generate(g.degree(), &gens, g.order())
}

/// Every subgroup `k` with `h ≤ k ≤ g`, including `h` and `g`, sorted by
/// element list.
pub fn overgroups(g: &FiniteGroup, h: &FiniteGroup) -> Result<Vec<FiniteGroup>> {
    g.require_subgroup(h, "base subgroup")?;
    let n = g.order();
    let table = g.cayley_table();
    let mut base_members = ElementSet::empty(n);
    for p in h.elements() {
        base_members.insert(g.index_of(p).expect("subgroup member"));
    }
    let base = Candidate {
        members: base_members,
        size: h.order(),
        generators: h
            .generators()
            .iter()
            .map(|p| g.index_of(p).expect("subgroup member"))
            .collect(),
    };
    let mut seen: HashSet<ElementSet> = HashSet::from([base.members.clone()]);
    let mut all = vec![base.clone()];
    let mut frontier = vec![base];
    while !frontier.is_empty() {
        let mut grown: Vec<Candidate> = frontier
            .par_iter()
            .flat_map_iter(|c| {
                (0..n)
                    .filter(move |&x| !c.members.contains(x))
                    .filter_map(move |x| extend(table, n, Some(c), x, n, None))
            })
            .collect();
        grown.sort_by(|a, b| a.members.cmp(&b.members).then(a.generators.cmp(&b.generators)));
        frontier = grown
            .into_iter()
            .filter(|c| seen.insert(c.members.clone()))
            .collect();
        all.extend(frontier.iter().cloned());
    }
    let mut groups: Vec<FiniteGroup> = all.iter().map(|c| into_group(g, c)).collect();
    groups.sort_by(|a, b| a.elements().cmp(b.elements()));
    Ok(groups)
}
