//! CM types on a coset space `G/Δ`, primitivity, Frobenius orbits and the
//! words they carry.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{
    overgroups, permutation_cycles, CosetAction, CosetSpace, FiniteGroup, Permutation,
};
use crate::words::{CircularWordClass, Letter, WordMultiset};

/// A subset `S¹` of the cosets containing exactly one coset from each
/// conjugate pair `{x, xι}`.
#[derive(Clone, Debug)]
pub struct CmType {
    space: CosetSpace,
    members: Vec<bool>,
    conjugation: Vec<usize>,
}

impl CmType {
    pub fn space(&self) -> &CosetSpace {
        &self.space
    }

    /// Sorted coset ids of `S¹`.
    pub fn members(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&i| self.members[i]).collect()
    }

    pub fn contains(&self, coset: usize) -> bool {
        self.members[coset]
    }

    /// Coset permutation induced by right multiplication with `ι`.
    pub fn conjugation(&self) -> &[usize] {
        &self.conjugation
    }

    pub fn dimension(&self) -> usize {
        self.members.len() / 2
    }

    /// The complementary type `S⁰ = S¹ι`.
    pub fn conjugate(&self) -> CmType {
        CmType {
            space: self.space.clone(),
            members: self.members.iter().map(|b| !b).collect(),
            conjugation: self.conjugation.clone(),
        }
    }

    /// The type with members given explicitly; checks the pairing.
    pub fn from_members(space: &CosetSpace, iota: &Permutation, members: &[usize]) -> Result<CmType> {
        let conjugation = conjugation_map(space, iota)?;
        let mut mask = vec![false; space.index()];
        for &m in members {
            if m >= mask.len() {
                return Err(Error::invalid(format!("coset id {m} out of range")));
            }
            mask[m] = true;
        }
        if (0..mask.len()).any(|i| mask[i] == mask[conjugation[i]]) {
            return Err(Error::invalid(
                "members do not pick exactly one coset from each conjugate pair",
            ));
        }
        Ok(CmType {
            space: space.clone(),
            members: mask,
            conjugation,
        })
    }
}

fn conjugation_map(space: &CosetSpace, iota: &Permutation) -> Result<Vec<usize>> {
    let map = space.coset_permutation(CosetAction::RightMul(iota))?;
    if !space.index().is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "coset space of odd index {} carries no CM type",
            space.index()
        )));
    }
    if (0..map.len()).any(|i| map[i] == i || map[map[i]] != i) {
        return Err(Error::invalid(format!(
            "{iota} does not pair the cosets freely (it must be an involution outside the subgroup)"
        )));
    }
    Ok(map)
}

/// All CM types for the conjugation `ι`, in a fixed order: conjugate pairs
/// are listed by their smaller coset id and bit `j` of the enumeration
/// counter picks the larger coset of pair `j`. With `collapse_conjugates`
/// only types containing coset 0 are kept, one per pair `{S¹, S⁰}`.
pub fn enumerate_cm_types(
    space: &CosetSpace,
    iota: &Permutation,
    collapse_conjugates: bool,
) -> Result<Vec<CmType>> {
    let conjugation = conjugation_map(space, iota)?;
    let pairs: Vec<(usize, usize)> = (0..space.index())
        .filter(|&i| i < conjugation[i])
        .map(|i| (i, conjugation[i]))
        .collect();
    let g = pairs.len();
    if g >= usize::BITS as usize - 1 {
        return Err(Error::capacity("CM type enumeration", usize::BITS as usize - 2, ""));
    }
    let mut out = Vec::new();
    for mask in 0usize..(1 << g) {
        if collapse_conjugates && mask & 1 == 1 {
            continue;
        }
        let mut members = vec![false; space.index()];
        for (j, &(lo, hi)) in pairs.iter().enumerate() {
            members[if mask >> j & 1 == 1 { hi } else { lo }] = true;
        }
        out.push(CmType {
            space: space.clone(),
            members,
            conjugation: conjugation.clone(),
        });
    }
    Ok(out)
}

/// `H = {h ∈ G : S̃h = S̃}` where `S̃` is the union of the member cosets.
/// Always contains `Δ`.
pub fn stabilizer(t: &CmType) -> FiniteGroup {
    let space = &t.space;
    let g = space.parent();
    let lifted: Vec<usize> = t
        .members()
        .iter()
        .flat_map(|&c| space.cosets()[c].members.iter().copied())
        .collect();
    // H ⊇ Δ is a union of Δ-cosets, so testing one representative per coset suffices.
    let stabilizing: Vec<bool> = space
        .cosets()
        .iter()
        .map(|c| {
            let h = &c.representative;
            lifted.iter().all(|&x| {
                let y = g.index_of(&g.element(x).compose_unchecked(h)).expect("closed");
                t.members[space.coset_of_index(y)]
            })
        })
        .collect();
    let indices: Vec<usize> = (0..space.index())
        .filter(|&c| stabilizing[c])
        .flat_map(|c| space.cosets()[c].members.iter().copied())
        .collect();
    let mut generators = space.subgroup().generators().to_vec();
    generators.extend(
        (1..space.index())
            .filter(|&c| stabilizing[c])
            .map(|c| space.cosets()[c].representative.clone()),
    );
    g.subgroup_from_indices(generators, indices)
}

/// Primitive iff the stabilizer of `S̃` is exactly `Δ`.
pub fn is_primitive(t: &CmType) -> bool {
    stabilizer(t).order() == t.space.subgroup().order()
}

/// Independent primitivity route: a proper overgroup `Δ′ ⊋ Δ` such that
/// `S¹` is a union of full fibres of `G/Δ → G/Δ′`, if one exists.
pub fn imprimitivity_witness(t: &CmType) -> Result<Option<FiniteGroup>> {
    let candidates = overgroups(t.space.parent(), t.space.subgroup())?;
    Ok(imprimitivity_witness_among(t, &candidates))
}

/// As [`imprimitivity_witness`], with the overgroups of `Δ` precomputed.
pub fn imprimitivity_witness_among(t: &CmType, overgroups: &[FiniteGroup]) -> Option<FiniteGroup> {
    let space = &t.space;
    let delta = space.subgroup();
    overgroups
        .iter()
        .filter(|k| k.order() != delta.order())
        .find(|k| {
            t.members().iter().all(|&c| {
                let rep = &space.cosets()[c].representative;
                k.elements().iter().all(|x| {
                    let y = rep.compose_unchecked(x);
                    t.members[space.coset_of(&y).expect("closed")]
                })
            })
        })
        .cloned()
}

pub fn is_primitive_by_fibres(t: &CmType) -> Result<bool> {
    Ok(imprimitivity_witness(t)?.is_none())
}

/// Cycles of `σ` acting on the cosets by left multiplication, each
/// starting at its least coset id and following `x, σx, σ²x, …`.
pub fn sigma_orbits(space: &CosetSpace, sigma: &Permutation) -> Result<Vec<Vec<usize>>> {
    Ok(permutation_cycles(&space.coset_permutation(CosetAction::LeftMul(sigma))?))
}

/// Reading direction of orbit words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Along `x → σx`.
    Forward,
    /// Along `σx → x`.
    Reverse,
}

impl Orientation {
    /// The orientation checked against the G40_12 golden table.
    pub const CALIBRATED: Orientation = Orientation::Forward;

    pub fn name(self) -> &'static str {
        match self {
            Orientation::Forward => "forward",
            Orientation::Reverse => "reverse",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One raw word per cycle: letter `i` is `V` when the `i`-th coset of the
/// cycle lies in `S¹`, else `F`. Raw words may be decomposable.
pub fn words_from_orbits(cycles: &[Vec<usize>], t: &CmType, orientation: Orientation) -> WordMultiset {
    cycles
        .iter()
        .map(|cycle| {
            let mut letters: Vec<Letter> = cycle
                .iter()
                .map(|&c| if t.members[c] { Letter::V } else { Letter::F })
                .collect();
            if orientation == Orientation::Reverse {
                letters.reverse();
            }
            CircularWordClass::canonicalize(&letters).expect("cycles are nonempty")
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrimeKind {
    /// Two σ-orbits swapped by `ι`: a prime and its conjugate.
    ConjugatePair,
    /// A σ-orbit mapped to itself by `ι`.
    SelfConjugate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeOrbit {
    pub degree: usize,
    pub kind: PrimeKind,
}

/// Decomposition type `(α, β)` with the orbit profile behind it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecompositionSignature {
    pub alpha: usize,
    pub beta: usize,
    /// Conjugate pairs first, then self-conjugate orbits, each by
    /// descending degree.
    pub profile: Vec<PrimeOrbit>,
}

/// `α` = number of σ-cycles, `β` = number of `{cycle, ι·cycle}` classes.
pub fn signature(cycles: &[Vec<usize>], conjugation: &[usize]) -> DecompositionSignature {
    let mut cycle_of = vec![0usize; conjugation.len()];
    for (k, cycle) in cycles.iter().enumerate() {
        for &c in cycle {
            cycle_of[c] = k;
        }
    }
    let mut profile = Vec::new();
    for (k, cycle) in cycles.iter().enumerate() {
        let image = cycle_of[conjugation[cycle[0]]];
        let kind = match image.cmp(&k) {
            std::cmp::Ordering::Equal => PrimeKind::SelfConjugate,
            std::cmp::Ordering::Greater => PrimeKind::ConjugatePair,
            std::cmp::Ordering::Less => continue,
        };
        profile.push(PrimeOrbit {
            degree: cycle.len(),
            kind,
        });
    }
    profile.sort_by(|a, b| a.kind.cmp(&b.kind).then(b.degree.cmp(&a.degree)));
    DecompositionSignature {
        alpha: cycles.len(),
        beta: profile.len(),
        profile,
    }
}

impl DecompositionSignature {
    pub fn pair_count(&self) -> usize {
        self.alpha - self.beta
    }

    pub fn self_conjugate_count(&self) -> usize {
        2 * self.beta - self.alpha
    }

    /// Ideal-decomposition label such as `𝒫₁𝒫₁ᶜ𝒫₂`.
    pub fn label(&self) -> String {
        signature_label(self.alpha, self.beta)
    }
}

/// Label for `(α, β)`: conjugate pairs first, then self-conjugate primes;
/// a lone prime carries no subscript.
pub fn signature_label(alpha: usize, beta: usize) -> String {
    let pairs = alpha - beta;
    let selfs = 2 * beta - alpha;
    if pairs + selfs == 1 {
        return if pairs == 1 { "𝒫𝒫ᶜ".into() } else { "𝒫".into() };
    }
    let mut s = String::new();
    for i in 1..=pairs {
        s.push_str(&format!("𝒫{0}𝒫{0}ᶜ", subscript(i)));
    }
    for i in pairs + 1..=pairs + selfs {
        s.push_str(&format!("𝒫{}", subscript(i)));
    }
    s
}

fn subscript(n: usize) -> String {
    n.to_string()
        .chars()
        .map(|c| char::from_u32('₀' as u32 + c.to_digit(10).unwrap()).unwrap())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::parse_cycles;
    use crate::perm::{left_cosets, DEFAULT_ORDER_CAP};

    fn group(text: &str) -> FiniteGroup {
        let (degree, gens) = parse_cycles(text).unwrap();
        FiniteGroup::generate(degree, &gens, DEFAULT_ORDER_CAP).unwrap()
    }

    fn perm(text: &str, degree: usize) -> Permutation {
        parse_cycles(&format!("deg={degree};{text}")).unwrap().1.remove(0)
    }

    fn worked_example() -> (CosetSpace, Permutation) {
        let g = group("deg=10;(2,7)(3,4,8,9);(1,4,3,8)");
        let delta = FiniteGroup::generate(10, &[perm("(3,4,8,9)", 10)], 10).unwrap();
        (left_cosets(&g, &delta).unwrap(), perm("(2,7)", 10))
    }

    #[test]
    fn worked_example_type_counts() {
        let (space, iota) = worked_example();
        assert_eq!(enumerate_cm_types(&space, &iota, false).unwrap().len(), 32);
        assert_eq!(enumerate_cm_types(&space, &iota, true).unwrap().len(), 16);
    }

    #[test]
    fn dimension_one_types() {
        let g = group("(1,2)");
        let space = left_cosets(&g, &FiniteGroup::trivial(2)).unwrap();
        let iota = perm("(1,2)", 2);
        let types = enumerate_cm_types(&space, &iota, false).unwrap();
        assert_eq!(types.len(), 2);
        assert_eq!(enumerate_cm_types(&space, &iota, true).unwrap().len(), 1);
        assert!(types.iter().all(is_primitive));
    }

    #[test]
    fn iota_inside_delta_is_rejected() {
        let g = group("(1,2,3,4)");
        let delta = FiniteGroup::generate(4, &[perm("(1,3)(2,4)", 4)], 10).unwrap();
        let space = left_cosets(&g, &delta).unwrap();
        assert!(enumerate_cm_types(&space, &perm("(1,3)(2,4)", 4), false).is_err());
    }

    #[test]
    fn types_partition_with_their_conjugates() {
        let (space, iota) = worked_example();
        for t in enumerate_cm_types(&space, &iota, false).unwrap() {
            assert_eq!(t.members().len(), 5);
            let c = t.conjugate();
            for i in 0..10 {
                assert_ne!(t.contains(i), c.contains(i));
                assert_eq!(t.contains(i), c.contains(t.conjugation()[i]));
            }
        }
    }

    #[test]
    fn stabilizer_witnesses_imprimitivity() {
        let (space, iota) = worked_example();
        let mut imprimitive = 0;
        for t in enumerate_cm_types(&space, &iota, false).unwrap() {
            let h = stabilizer(&t);
            assert!(space.subgroup().is_subgroup_of(&h));
            if !is_primitive(&t) {
                imprimitive += 1;
                // H itself is a fibre witness
                let members = t.members();
                for &c in &members {
                    let rep = &space.cosets()[c].representative;
                    for x in h.elements() {
                        assert!(t.contains(space.coset_of(&(rep * x)).unwrap()));
                    }
                }
                assert!(imprimitivity_witness(&t).unwrap().is_some());
            } else {
                assert!(imprimitivity_witness(&t).unwrap().is_none());
            }
        }
        assert_eq!(imprimitive, 2);
    }

    #[test]
    fn identity_gives_singleton_orbits() {
        let (space, iota) = worked_example();
        let id = space.parent().identity().clone();
        let cycles = sigma_orbits(&space, &id).unwrap();
        assert_eq!(cycles.len(), 10);
        let t = &enumerate_cm_types(&space, &iota, false).unwrap()[0];
        let words = words_from_orbits(&cycles, t, Orientation::Forward);
        assert_eq!(words.to_string(), "[F], [F], [F], [F], [F], [V], [V], [V], [V], [V]");
        let sig = signature(&cycles, t.conjugation());
        assert_eq!((sig.alpha, sig.beta), (10, 5));
        assert_eq!(
            sig.profile,
            vec![PrimeOrbit { degree: 1, kind: PrimeKind::ConjugatePair }; 5]
        );
    }

    #[test]
    fn some_sigma_acts_as_one_ten_cycle() {
        let (space, iota) = worked_example();
        let t = &enumerate_cm_types(&space, &iota, false).unwrap()[0];
        let sigma = space
            .parent()
            .elements()
            .iter()
            .find(|s| sigma_orbits(&space, s).unwrap().len() == 1)
            .expect("an inert σ exists");
        let cycles = sigma_orbits(&space, sigma).unwrap();
        assert_eq!(cycles[0].len(), 10);
        let sig = signature(&cycles, t.conjugation());
        assert_eq!((sig.alpha, sig.beta), (1, 1));
        assert_eq!(sig.profile, vec![PrimeOrbit { degree: 10, kind: PrimeKind::SelfConjugate }]);
        assert_eq!(sig.label(), "𝒫");
    }

    #[test]
    fn labels() {
        assert_eq!(signature_label(2, 1), "𝒫𝒫ᶜ");
        assert_eq!(signature_label(3, 2), "𝒫₁𝒫₁ᶜ𝒫₂");
        assert_eq!(signature_label(5, 5), "𝒫₁𝒫₂𝒫₃𝒫₄𝒫₅");
        assert_eq!(signature_label(10, 5), "𝒫₁𝒫₁ᶜ𝒫₂𝒫₂ᶜ𝒫₃𝒫₃ᶜ𝒫₄𝒫₄ᶜ𝒫₅𝒫₅ᶜ");
        assert_eq!(subscript(12), "₁₂");
    }

    #[test]
    fn profile_pairs_before_self_conjugate() {
        // coset ids 0..10, ι = +5; cycles {0..3} ↔ {5..8}, {4,9} self-conjugate
        let conjugation: Vec<usize> = (0..10).map(|i| (i + 5) % 10).collect();
        let cycles = vec![vec![0, 1, 2, 3], vec![4, 9], vec![5, 6, 7, 8]];
        let sig = signature(&cycles, &conjugation);
        assert_eq!((sig.alpha, sig.beta), (3, 2));
        assert_eq!(
            sig.profile,
            vec![
                PrimeOrbit { degree: 4, kind: PrimeKind::ConjugatePair },
                PrimeOrbit { degree: 2, kind: PrimeKind::SelfConjugate },
            ]
        );
        assert_eq!(sig.label(), "𝒫₁𝒫₁ᶜ𝒫₂");
    }
}
