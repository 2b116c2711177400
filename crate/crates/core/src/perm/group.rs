use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::Permutation;
use crate::error::{Error, Result};

/// Default bound on the closure size in [`FiniteGroup::generate`].
pub const DEFAULT_ORDER_CAP: usize = 10_000;

/// A permutation group stored fully enumerated.
///
/// Elements are kept sorted by image sequence, so the identity is always
/// element 0 and subgroups list their elements in parent order. Cloning is
/// cheap: the data sits behind an `Arc`.
#[derive(Clone)]
pub struct FiniteGroup {
    inner: Arc<GroupData>,
}

struct GroupData {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    lookup: HashMap<Permutation, usize>,
    table: OnceLock<CayleyTable>,
}

impl FiniteGroup {
    /// Closure of `generators` inside `Sym(degree)`.
    pub fn generate(degree: usize, generators: &[Permutation], order_cap: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::invalid("group degree must be positive"));
        }
        for g in generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
        }
        let id = Permutation::identity(degree);
        let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
        let mut frontier = vec![id];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for x in &frontier {
                for g in generators {
                    let y = x.compose_unchecked(g);
                    if !seen.contains(&y) {
                        if seen.len() >= order_cap {
                            return Err(Error::capacity(
                                "group closure exceeds the order cap",
                                order_cap,
                                "",
                            ));
                        }
                        seen.insert(y.clone());
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        let mut elements: Vec<Permutation> = seen.into_iter().collect();
        elements.sort_unstable();
        Ok(Self::from_sorted(degree, generators.to_vec(), elements))
    }

    pub(crate) fn from_sorted(
        degree: usize,
        generators: Vec<Permutation>,
        elements: Vec<Permutation>,
    ) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        let lookup = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        FiniteGroup {
            inner: Arc::new(GroupData {
                degree,
                generators,
                elements,
                lookup,
                table: OnceLock::new(),
            }),
        }
    }

    /// The subgroup formed by the given element indices of `self`.
    /// The caller guarantees closure.
    pub(crate) fn subgroup_from_indices(
        &self,
        generators: Vec<Permutation>,
        mut indices: Vec<usize>,
    ) -> FiniteGroup {
        indices.sort_unstable();
        let elements = indices.iter().map(|&i| self.element(i).clone()).collect();
        FiniteGroup::from_sorted(self.degree(), generators, elements)
    }

    pub fn trivial(degree: usize) -> Self {
        Self::from_sorted(degree, Vec::new(), vec![Permutation::identity(degree)])
    }

    pub fn degree(&self) -> usize {
        self.inner.degree
    }

    pub fn order(&self) -> usize {
        self.inner.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.inner.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.inner.elements
    }

    pub fn element(&self, index: usize) -> &Permutation {
        &self.inner.elements[index]
    }

    pub fn identity(&self) -> &Permutation {
        &self.inner.elements[0]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.inner.lookup.get(p).copied()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.inner.lookup.contains_key(p)
    }

    pub fn is_subgroup_of(&self, other: &FiniteGroup) -> bool {
        self.degree() == other.degree()
            && other.order().is_multiple_of(self.order())
            && self.elements().iter().all(|p| other.contains(p))
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        gens.iter()
            .enumerate()
            .all(|(i, a)| gens[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    /// Index of `elements[a] ∘ elements[b]`.
    #[inline]
    pub fn mul_index(&self, a: usize, b: usize) -> usize {
        let p = self.element(a).compose_unchecked(self.element(b));
        self.inner.lookup[&p]
    }

    pub(crate) fn require_member(&self, p: &Permutation, what: &str) -> Result<usize> {
        if p.degree() != self.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: p.degree(),
            });
        }
        self.index_of(p)
            .ok_or_else(|| Error::invalid(format!("{what} {p} is not an element of the group")))
    }

    pub(crate) fn require_subgroup(&self, h: &FiniteGroup, what: &str) -> Result<()> {
        if h.degree() != self.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: h.degree(),
            });
        }
        if !h.is_subgroup_of(self) {
            return Err(Error::invalid(format!("{what} is not a subgroup of the group")));
        }
        Ok(())
    }

    /// Multiplication table, built on first use.
    pub(crate) fn cayley_table(&self) -> &CayleyTable {
        self.inner.table.get_or_init(|| CayleyTable::new(self))
    }

    /// Same element set (generators may differ).
    pub fn same_elements(&self, other: &FiniteGroup) -> bool {
        self.elements() == other.elements()
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.same_elements(other)
    }
}

impl Eq for FiniteGroup {}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup(order {}, gens [", self.order())?;
        for (i, g) in self.generators().iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str("])")
    }
}

/// Dense multiplication table in element-index space.
pub(crate) struct CayleyTable {
    n: usize,
    products: Vec<u32>,
}

impl CayleyTable {
    fn new(g: &FiniteGroup) -> Self {
        let n = g.order();
        let mut products = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                products.push(g.mul_index(a, b) as u32);
            }
        }
        CayleyTable { n, products }
    }

    #[inline]
    pub(crate) fn mul(&self, a: usize, b: usize) -> usize {
        self.products[a * self.n + b] as usize
    }
}

/// Center of `g`: elements commuting with every generator.
pub fn center(g: &FiniteGroup) -> FiniteGroup {
    let indices: Vec<usize> = (0..g.order())
        .filter(|&i| g.generators().iter().all(|s| g.element(i).commutes_with(s)))
        .collect();
    let generators = minimal_generators(g, &indices);
    g.subgroup_from_indices(generators, indices)
}

/// Central elements of order exactly two, in element order.
pub fn central_involutions(g: &FiniteGroup) -> Vec<Permutation> {
    center(g)
        .elements()
        .iter()
        .filter(|p| p.order() == 2)
        .cloned()
        .collect()
}

/// Greedy generating set for the closed subset `indices` of `g`.
fn minimal_generators(g: &FiniteGroup, indices: &[usize]) -> Vec<Permutation> {
    let mut generators = Vec::new();
    let mut span: HashSet<usize> = HashSet::from([0]);
    for &i in indices {
        if span.contains(&i) {
            continue;
        }
        generators.push(g.element(i).clone());
        // re-close under all generators so far
        let mut frontier: Vec<usize> = span.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for s in &generators {
                let y = g.index_of(&g.element(x).compose_unchecked(s)).expect("closed subset");
                if span.insert(y) {
                    frontier.push(y);
                }
            }
        }
    }
    generators
}
