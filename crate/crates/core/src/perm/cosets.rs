use super::{FiniteGroup, Permutation};
use crate::error::{Error, Result};

/// One left coset `rep · H`, members given as parent element indices.
#[derive(Clone, Debug)]
pub struct Coset {
    pub representative: Permutation,
    pub members: Vec<usize>,
}

/// Left cosets `gH` of a subgroup, in order of their least element.
///
/// Coset 0 is always `H` itself.
#[derive(Clone, Debug)]
pub struct CosetSpace {
    parent: FiniteGroup,
    subgroup: FiniteGroup,
    cosets: Vec<Coset>,
    coset_of: Vec<usize>,
}

/// How a permutation acts on a coset space.
#[derive(Clone, Copy, Debug)]
pub enum CosetAction<'a> {
    /// `gH ↦ σgH`, always well defined.
    LeftMul(&'a Permutation),
    /// `gH ↦ gτH`, well defined when `τ` normalizes `H`.
    RightMul(&'a Permutation),
}

pub fn left_cosets(g: &FiniteGroup, h: &FiniteGroup) -> Result<CosetSpace> {
    g.require_subgroup(h, "coset subgroup")?;
    let n = g.order();
    let mut coset_of = vec![usize::MAX; n];
    let mut cosets = Vec::with_capacity(n / h.order());
    for i in 0..n {
        if coset_of[i] != usize::MAX {
            continue;
        }
        let rep = g.element(i);
        let id = cosets.len();
        let mut members: Vec<usize> = h
            .elements()
            .iter()
            .map(|d| g.index_of(&rep.compose_unchecked(d)).expect("closed under product"))
            .collect();
        members.sort_unstable();
        for &m in &members {
            coset_of[m] = id;
        }
        cosets.push(Coset {
            representative: rep.clone(),
            members,
        });
    }
    Ok(CosetSpace {
        parent: g.clone(),
        subgroup: h.clone(),
        cosets,
        coset_of,
    })
}

impl CosetSpace {
    pub fn parent(&self) -> &FiniteGroup {
        &self.parent
    }

    pub fn subgroup(&self) -> &FiniteGroup {
        &self.subgroup
    }

    pub fn cosets(&self) -> &[Coset] {
        &self.cosets
    }

    pub fn index(&self) -> usize {
        self.cosets.len()
    }

    /// Coset id of a parent element given by index.
    pub fn coset_of_index(&self, element: usize) -> usize {
        self.coset_of[element]
    }

    pub fn coset_of(&self, p: &Permutation) -> Option<usize> {
        self.parent.index_of(p).map(|i| self.coset_of[i])
    }

    /// The permutation of coset ids induced by `action`.
    pub fn coset_permutation(&self, action: CosetAction<'_>) -> Result<Vec<usize>> {
        match action {
            CosetAction::LeftMul(sigma) => {
                self.parent.require_member(sigma, "acting element")?;
                Ok(self
                    .cosets
                    .iter()
                    .map(|c| self.lookup(&sigma.compose_unchecked(&c.representative)))
                    .collect())
            }
            CosetAction::RightMul(tau) => {
                self.parent.require_member(tau, "acting element")?;
                let tau_inv = tau.inverse();
                for d in self.subgroup.generators() {
                    let conj = tau_inv.compose_unchecked(&d.compose_unchecked(tau));
                    if !self.subgroup.contains(&conj) {
                        return Err(Error::invalid(format!(
                            "right multiplication by {tau} is not well defined on cosets: \
                             it does not normalize the subgroup ({d} conjugates to {conj})"
                        )));
                    }
                }
                Ok(self
                    .cosets
                    .iter()
                    .map(|c| self.lookup(&c.representative.compose_unchecked(tau)))
                    .collect())
            }
        }
    }

    fn lookup(&self, p: &Permutation) -> usize {
        self.coset_of[self.parent.index_of(p).expect("parent is closed")]
    }
}

/// Cycles of a permutation of `0..n`, each from its least point, ordered by
/// that point. Fixed points are 1-cycles.
pub fn permutation_cycles(map: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; map.len()];
    let mut out = Vec::new();
    for start in 0..map.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut x = map[start];
        while x != start {
            seen[x] = true;
            cycle.push(x);
            x = map[x];
        }
        out.push(cycle);
    }
    out
}

/// Number of orbits of `⟨actor⟩` on the coset space; for the left action
/// this is the number of double cosets `⟨σ⟩ g H`.
pub fn orbit_count(space: &CosetSpace, action: CosetAction<'_>) -> Result<usize> {
    Ok(permutation_cycles(&space.coset_permutation(action)?).len())
}

/// Number of double cosets `⟨left⟩ x H`, by partitioning the elements of
/// `g` directly rather than acting on a coset space.
pub fn double_coset_count(g: &FiniteGroup, left: &[Permutation], h: &FiniteGroup) -> Result<usize> {
    let left: Vec<usize> = left
        .iter()
        .map(|p| g.require_member(p, "double coset generator"))
        .collect::<Result<_>>()?;
    let right: Vec<usize> = h
        .generators()
        .iter()
        .map(|p| g.require_member(p, "subgroup generator"))
        .collect::<Result<_>>()?;
    let n = g.order();
    let table = g.cayley_table();
    let mut seen = vec![false; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(x) = stack.pop() {
            let next = left
                .iter()
                .map(|&l| table.mul(l, x))
                .chain(right.iter().map(|&r| table.mul(x, r)));
            for y in next {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    Ok(count)
}

/// Conjugacy class representatives (least element of each class).
pub fn conjugacy_class_representatives(g: &FiniteGroup) -> Vec<Permutation> {
    let n = g.order();
    let mut seen = vec![false; n];
    let mut reps = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        reps.push(g.element(i).clone());
        for h in g.elements() {
            let c = h
                .compose_unchecked(g.element(i))
                .compose_unchecked(&h.inverse());
            seen[g.index_of(&c).expect("closed")] = true;
        }
    }
    reps
}
