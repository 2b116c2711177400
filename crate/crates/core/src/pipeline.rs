//! The reduction driver: loops over conjugations `ι`, subgroups `Δ`, CM
//! types `S¹` and Frobenius elements `σ`, and turns each orbit decomposition
//! into a correspondence record. Also scheme naming, the classification
//! table and the `((f, a), (α, β))` reference table.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::cm::{
    enumerate_cm_types, is_primitive, sigma_orbits, signature, words_from_orbits, CmType,
    DecompositionSignature, Orientation,
};
use crate::error::{Error, Result};
use crate::perm::{
    central_involutions, double_coset_count, left_cosets, orbit_count, subgroups_of_order,
    CosetAction, CosetSpace, FiniteGroup, Permutation, DEFAULT_SUBGROUP_SEARCH_CAP,
};
use crate::words::{
    enumerate_indecomposable_classes, multiset_invariants, pair_quasi_polarized,
    CircularWordClass, Piece, WordMultiset,
};

/// Name of an indecomposable quasi-polarized group scheme.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    /// `μ_p × Z/pZ`, the piece `{[F], [V]}`.
    MuPair,
    /// `I_{h,a}`: half-order `h`, a-number `a`.
    I { h: usize, a: usize },
    /// The second scheme with the same `(h, a)` as an `I`.
    J { h: usize, a: usize },
    /// Outside the dictionary; carries the piece's words.
    Raw(Vec<String>),
}

impl SchemeKind {
    pub fn a_number(&self) -> Option<usize> {
        match self {
            SchemeKind::MuPair => Some(0),
            SchemeKind::I { a, .. } | SchemeKind::J { a, .. } => Some(*a),
            SchemeKind::Raw(_) => None,
        }
    }

    fn sort_key(&self) -> (u8, usize, usize, u8, &[String]) {
        match self {
            SchemeKind::MuPair => (0, 0, 0, 0, &[]),
            SchemeKind::I { h, a } => (1, *h, *a, 0, &[]),
            SchemeKind::J { h, a } => (1, *h, *a, 1, &[]),
            SchemeKind::Raw(words) => (2, 0, 0, 0, words),
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeKind::MuPair => f.write_str("μ_p × Z/pZ"),
            SchemeKind::I { h, a } => write!(f, "I_{{{h},{a}}}"),
            SchemeKind::J { h, a } => write!(f, "J_{{{h},{a}}}"),
            SchemeKind::Raw(words) => write!(f, "BT1{{{}}}", words.join(", ")),
        }
    }
}

/// A scheme name with its multiplicity in a decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SchemeName {
    pub kind: SchemeKind,
    pub multiplicity: usize,
}

const DICTIONARY: &[(&[&str], SchemeKind)] = &[
    (&["F", "V"], SchemeKind::MuPair),
    (&["FV"], SchemeKind::I { h: 1, a: 1 }),
    (&["FFVV"], SchemeKind::I { h: 2, a: 1 }),
    (&["FFFVVV"], SchemeKind::I { h: 3, a: 1 }),
    (&["FFV", "FVV"], SchemeKind::I { h: 3, a: 2 }),
    (&["FFFFVVVV"], SchemeKind::I { h: 4, a: 1 }),
    (&["FFFV", "FVVV"], SchemeKind::I { h: 4, a: 2 }),
    (&["FFVFVVFV"], SchemeKind::I { h: 4, a: 3 }),
    (&["FFFFFVVVVV"], SchemeKind::I { h: 5, a: 1 }),
    (&["FFFFV", "FVVVV"], SchemeKind::I { h: 5, a: 2 }),
    (&["FFFVV", "FFVVV"], SchemeKind::J { h: 5, a: 2 }),
    (&["FFFVFVVVFV"], SchemeKind::I { h: 5, a: 3 }),
    (&["FFVFFVVFVV"], SchemeKind::J { h: 5, a: 3 }),
    (&["FFVFV", "FVFVV"], SchemeKind::I { h: 5, a: 4 }),
];

fn piece_of(words: &[&str]) -> Piece {
    let classes: Vec<CircularWordClass> = words.iter().map(|w| w.parse().expect("dictionary word")).collect();
    match classes.as_slice() {
        [w] => Piece::SelfDual(w.clone()),
        [u, v] if u < v => Piece::DualPair(u.clone(), v.clone()),
        [u, v] => Piece::DualPair(v.clone(), u.clone()),
        _ => unreachable!("dictionary pieces have one or two words"),
    }
}

fn dictionary() -> &'static HashMap<Piece, SchemeKind> {
    static MAP: OnceLock<HashMap<Piece, SchemeKind>> = OnceLock::new();
    MAP.get_or_init(|| {
        DICTIONARY
            .iter()
            .map(|(words, kind)| (piece_of(words), kind.clone()))
            .collect()
    })
}

pub fn name_piece(piece: &Piece) -> SchemeKind {
    dictionary()
        .get(piece)
        .cloned()
        .unwrap_or_else(|| SchemeKind::Raw(piece.words().iter().map(|w| w.to_string()).collect()))
}

/// Names with multiplicities: `μ` first, then by `(h, a)` with `I` before
/// `J`, then unnamed pieces.
pub fn name_pieces(pieces: &[Piece]) -> Vec<SchemeName> {
    let mut counts: BTreeMap<(u8, usize, usize, u8, Vec<String>), (SchemeKind, usize)> = BTreeMap::new();
    for piece in pieces {
        let kind = name_piece(piece);
        let (t, h, a, j, w) = kind.sort_key();
        let key = (t, h, a, j, w.to_vec());
        counts.entry(key).or_insert((kind, 0)).1 += 1;
    }
    counts
        .into_values()
        .map(|(kind, multiplicity)| SchemeName { kind, multiplicity })
        .collect()
}

/// Product notation such as `(μ_p × Z/pZ)^2 × I_{1,1}`.
pub fn scheme_text(names: &[SchemeName]) -> String {
    let alone = names.len() == 1;
    names
        .iter()
        .map(|n| {
            let base = match &n.kind {
                SchemeKind::MuPair if !(alone && n.multiplicity == 1) => format!("({})", n.kind),
                kind => kind.to_string(),
            };
            if n.multiplicity == 1 {
                base
            } else {
                format!("{base}^{}", n.multiplicity)
            }
        })
        .collect::<Vec<_>>()
        .join(" × ")
}

/// One row of the classification of quasi-polarized indecomposable pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationEntry {
    pub piece: Piece,
    pub a: usize,
    pub name: SchemeKind,
}

/// All pieces of half-order `g`: self-dual aperiodic classes of length
/// `2g` and dual pairs of aperiodic classes of length `g`, sorted by
/// `(a, text)`.
pub fn classification_table(g: usize) -> Vec<ClassificationEntry> {
    if g == 0 {
        return Vec::new();
    }
    let mut pieces: Vec<Piece> = enumerate_indecomposable_classes(2 * g)
        .into_iter()
        .filter(CircularWordClass::is_self_dual)
        .map(Piece::SelfDual)
        .collect();
    for u in enumerate_indecomposable_classes(g) {
        let v = u.dual();
        if u < v {
            pieces.push(Piece::DualPair(u, v));
        }
    }
    let mut entries: Vec<ClassificationEntry> = pieces
        .into_iter()
        .map(|piece| ClassificationEntry {
            a: piece.a_number(),
            name: name_piece(&piece),
            piece,
        })
        .collect();
    entries.sort_by_cached_key(|e| (e.a, e.piece.to_string()));
    entries
}

/// Where a record came from: one `(ι, Δ, S¹, σ)` witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub iota: Permutation,
    pub delta_generators: Vec<Permutation>,
    /// Coset ids of `S¹`; coset 0 is `Δ` itself.
    pub cm_type: Vec<usize>,
    pub sigma: Permutation,
}

/// One row of a correspondence table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrespondenceRecord {
    pub group_label: String,
    pub g: usize,
    pub signature: DecompositionSignature,
    /// Factored through primitive roots; every entry indecomposable.
    pub words: WordMultiset,
    pub pieces: Vec<Piece>,
    pub names: Vec<SchemeName>,
    pub f: usize,
    pub a: usize,
    pub provenance: Option<Provenance>,
}

impl CorrespondenceRecord {
    pub fn scheme(&self) -> String {
        scheme_text(&self.names)
    }

    fn key(&self) -> (usize, usize, String) {
        (self.signature.alpha, self.signature.beta, self.words.canonical_text())
    }
}

/// How `Δ` is chosen.
#[derive(Clone, Debug)]
pub enum DeltaChoice {
    /// Every subgroup of order `|G|/2g` avoiding `ι`.
    Dimension(usize),
    /// The subgroup generated by these permutations.
    Explicit(Vec<Permutation>),
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub include_imprimitive: bool,
    pub dedup: bool,
    pub provenance: bool,
    pub subgroup_cap: usize,
    pub orientation: Orientation,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            include_imprimitive: false,
            dedup: true,
            provenance: false,
            subgroup_cap: DEFAULT_SUBGROUP_SEARCH_CAP,
            orientation: Orientation::CALIBRATED,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub records: Vec<CorrespondenceRecord>,
    pub warnings: Vec<String>,
}

/// Reads `CMRED_THREADS`; unset means no limit.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("CMRED_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::invalid(format!(
                "CMRED_THREADS must be a positive integer, got {v:?}"
            ))),
        },
    }
}

struct Frame {
    iota: Permutation,
    space: CosetSpace,
    /// Per σ (group element order): its cycles on the cosets and signature.
    orbits: Vec<(Vec<Vec<usize>>, DecompositionSignature)>,
}

/// Runs the reduction for one group.
pub fn run(group: &FiniteGroup, label: &str, choice: &DeltaChoice, options: &RunOptions) -> Result<RunOutput> {
    match options.threads {
        None => run_inner(group, label, choice, options),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?
            .install(|| run_inner(group, label, choice, options)),
    }
}

fn run_inner(group: &FiniteGroup, label: &str, choice: &DeltaChoice, options: &RunOptions) -> Result<RunOutput> {
    let iotas = central_involutions(group);
    if iotas.is_empty() {
        return Err(Error::NotCmDatum(format!(
            "{label} has no central involution, so it is not the Galois group of a CM closure"
        )));
    }
    let mut out = RunOutput::default();

    let mut pairs: Vec<(Permutation, FiniteGroup)> = Vec::new();
    match choice {
        DeltaChoice::Dimension(g) => {
            if *g == 0 {
                return Err(Error::invalid("dimension g must be positive"));
            }
            if !group.order().is_multiple_of(2 * g) {
                out.warnings.push(format!(
                    "no admissible subgroup: 2g = {} does not divide |G| = {}",
                    2 * g,
                    group.order()
                ));
                return Ok(out);
            }
            let m = group.order() / (2 * g);
            for iota in &iotas {
                for delta in subgroups_of_order(group, m, iota, options.subgroup_cap)? {
                    pairs.push((iota.clone(), delta));
                }
            }
        }
        DeltaChoice::Explicit(gens) => {
            let delta = FiniteGroup::generate(group.degree(), gens, group.order())?;
            group.require_subgroup(&delta, "the subgroup given by --delta")?;
            let index = group.order() / delta.order();
            if !index.is_multiple_of(2) {
                return Err(Error::invalid(format!(
                    "the subgroup given by --delta has odd index {index}; CM types need an even index"
                )));
            }
            for iota in &iotas {
                if !delta.contains(iota) {
                    pairs.push((iota.clone(), delta.clone()));
                }
            }
        }
    }
    if pairs.is_empty() {
        out.warnings.push(format!(
            "no admissible subgroup of {label}: every candidate contains all central involutions"
        ));
        return Ok(out);
    }

    let frames: Vec<Frame> = pairs
        .par_iter()
        .map(|(iota, delta)| build_frame(group, iota, delta))
        .collect::<Result<_>>()?;

    let mut items: Vec<(usize, CmType)> = Vec::new();
    for (k, frame) in frames.iter().enumerate() {
        for t in enumerate_cm_types(&frame.space, &frame.iota, false)? {
            items.push((k, t));
        }
    }
    let results: Vec<Vec<((usize, usize), CorrespondenceRecord)>> = items
        .par_iter()
        .enumerate()
        .map(|(item, (k, t))| {
            if !options.include_imprimitive && !is_primitive(t) {
                return Ok(Vec::new());
            }
            let frame = &frames[*k];
            let mut rows = Vec::with_capacity(group.order());
            for (s, (cycles, sig)) in frame.orbits.iter().enumerate() {
                let record = make_record(group, label, frame, t, s, cycles, sig, options)?;
                rows.push(((item, s), record));
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;

    let flat = results.into_iter().flatten();
    out.records = if options.dedup {
        let mut best: BTreeMap<(usize, usize, String), ((usize, usize), CorrespondenceRecord)> = BTreeMap::new();
        for (order, record) in flat {
            match best.entry(record.key()) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert((order, record));
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let current = o.get();
                    if (&record.signature.profile, order) < (&current.1.signature.profile, current.0) {
                        o.insert((order, record));
                    }
                }
            }
        }
        best.into_values().map(|(_, r)| r).collect()
    } else {
        let mut all: Vec<_> = flat.collect();
        all.sort_by(|a, b| a.1.key().cmp(&b.1.key()).then(a.0.cmp(&b.0)));
        all.into_iter().map(|(_, r)| r).collect()
    };

    for record in &out.records {
        if let Some(violation) = reference_violation(record.f, record.a, record.signature.alpha, record.signature.beta) {
            out.warnings.push(violation);
        }
    }
    out.warnings.sort();
    out.warnings.dedup();
    Ok(out)
}

fn build_frame(group: &FiniteGroup, iota: &Permutation, delta: &FiniteGroup) -> Result<Frame> {
    let space = left_cosets(group, delta)?;
    let conjugation = space.coset_permutation(CosetAction::RightMul(iota))?;
    let orbits = group
        .elements()
        .iter()
        .map(|sigma| {
            let cycles = sigma_orbits(&space, sigma)?;
            let sig = signature(&cycles, &conjugation);
            let alpha = orbit_count(&space, CosetAction::LeftMul(sigma))?;
            let beta = double_coset_count(group, &[sigma.clone(), iota.clone()], delta)?;
            if sig.alpha != alpha || sig.beta != beta {
                return Err(Error::Internal(format!(
                    "signature ({}, {}) disagrees with orbit counts ({alpha}, {beta}) for σ = {sigma}",
                    sig.alpha, sig.beta
                )));
            }
            if !(sig.beta <= sig.alpha && sig.alpha <= 2 * sig.beta) {
                return Err(Error::Internal(format!("β ≤ α ≤ 2β fails for σ = {sigma}")));
            }
            Ok((cycles, sig))
        })
        .collect::<Result<_>>()?;
    Ok(Frame {
        iota: iota.clone(),
        space,
        orbits,
    })
}

#[allow(clippy::too_many_arguments)]
fn make_record(
    group: &FiniteGroup,
    label: &str,
    frame: &Frame,
    t: &CmType,
    sigma_index: usize,
    cycles: &[Vec<usize>],
    sig: &DecompositionSignature,
    options: &RunOptions,
) -> Result<CorrespondenceRecord> {
    let g = t.dimension();
    let raw = words_from_orbits(cycles, t, options.orientation);
    let internal = |what: String| Error::Internal(format!("{what} (σ = {})", group.element(sigma_index)));
    if raw.count() != sig.alpha {
        return Err(internal(format!("{} raw words for α = {}", raw.count(), sig.alpha)));
    }
    if raw.total_length() != 2 * g {
        return Err(internal(format!("word lengths sum to {}, expected {}", raw.total_length(), 2 * g)));
    }
    let words = raw.factored();
    if !words.is_self_dual() {
        return Err(internal(format!("word multiset {{{words}}} is not closed under duality")));
    }
    let (f, a) = multiset_invariants(&words)?;
    let pieces = pair_quasi_polarized(&words)?;
    let names = name_pieces(&pieces);
    let (mut f_named, mut a_named) = (0, 0);
    for (piece, name) in pieces.iter().map(|p| (p, name_piece(p))) {
        match name {
            SchemeKind::MuPair => f_named += 1,
            ref kind => a_named += kind.a_number().unwrap_or_else(|| piece.a_number()),
        }
    }
    if (f_named, a_named) != (f, a) || f > g || a > g {
        return Err(internal(format!(
            "invariants (f, a) = ({f}, {a}) disagree with the named pieces ({f_named}, {a_named}) or exceed g = {g}"
        )));
    }
    let provenance = options.provenance.then(|| Provenance {
        iota: frame.iota.clone(),
        delta_generators: frame.space.subgroup().generators().to_vec(),
        cm_type: t.members(),
        sigma: group.element(sigma_index).clone(),
    });
    Ok(CorrespondenceRecord {
        group_label: label.to_string(),
        g,
        signature: sig.clone(),
        words,
        pieces,
        names,
        f,
        a,
        provenance,
    })
}

/// Union of several runs, deduplicated on `(α, β, words)`. Labels of the
/// groups producing a row are joined with `; ` in input order.
pub fn merge(runs: Vec<Vec<CorrespondenceRecord>>) -> Vec<CorrespondenceRecord> {
    let mut merged: BTreeMap<(usize, usize, String), CorrespondenceRecord> = BTreeMap::new();
    for record in runs.into_iter().flatten() {
        match merged.entry(record.key()) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(record);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let existing = o.get_mut();
                if !existing.group_label.split("; ").any(|l| l == record.group_label) {
                    existing.group_label = format!("{}; {}", existing.group_label, record.group_label);
                }
                if record.signature.profile < existing.signature.profile {
                    existing.signature = record.signature;
                }
            }
        }
    }
    merged.into_values().collect()
}

/// `((f, a), (α, β))` pairs in a set of records.
pub fn aggregate_pairs(records: &[CorrespondenceRecord]) -> BTreeSet<((usize, usize), (usize, usize))> {
    records
        .iter()
        .map(|r| ((r.f, r.a), (r.signature.alpha, r.signature.beta)))
        .collect()
}

/// Reference table of decomposition types by `(f, a)` for dimensions up to
/// five: each entry is `(f, a, admissible (α, β) pairs)`.
pub const REFERENCE_TABLE: &[(usize, usize, &[(usize, usize)])] = &[
    (0, 1, &[(1, 1)]),
    (0, 2, &[(2, 1), (2, 2)]),
    (0, 3, &[(1, 1), (3, 2), (3, 3)]),
    (0, 4, &[(2, 1), (2, 2), (4, 2), (4, 3), (4, 4)]),
    (0, 5, &[(1, 1), (3, 2), (3, 3), (5, 3), (5, 4), (5, 5)]),
    (1, 0, &[(2, 1)]),
    (1, 1, &[(3, 2)]),
    (1, 2, &[(4, 2), (4, 3)]),
    (1, 3, &[(3, 2), (5, 3), (5, 4)]),
    (1, 4, &[(4, 2), (4, 3), (6, 3), (6, 4), (6, 5)]),
    (2, 0, &[(2, 1), (4, 2)]),
    (2, 1, &[(3, 2), (5, 3)]),
    (2, 2, &[(4, 2), (4, 3), (6, 3), (6, 4)]),
    (2, 3, &[(5, 3), (5, 4), (7, 4), (7, 5)]),
    (3, 0, &[(2, 1), (4, 2), (6, 3)]),
    (3, 1, &[(3, 2), (5, 3), (7, 4)]),
    (3, 2, &[(4, 2), (4, 3), (6, 3), (6, 4), (8, 4), (8, 5)]),
    (4, 0, &[(2, 1), (4, 2), (6, 3), (8, 4)]),
    (4, 1, &[(3, 2), (5, 3), (7, 4), (9, 5)]),
    (5, 0, &[(2, 1), (4, 2), (6, 3), (8, 4), (10, 5)]),
];

/// Largest dimension the reference table covers.
pub const REFERENCE_MAX_G: usize = 5;

pub fn reference_cell(f: usize, a: usize) -> Option<&'static [(usize, usize)]> {
    REFERENCE_TABLE
        .iter()
        .find(|(cf, ca, _)| (*cf, *ca) == (f, a))
        .map(|(_, _, cell)| *cell)
}

/// A message when `((f, a), (α, β))` lies outside the reference table;
/// `None` inside it or when `f + a` exceeds the table's range.
pub fn reference_violation(f: usize, a: usize, alpha: usize, beta: usize) -> Option<String> {
    if f + a > REFERENCE_MAX_G {
        return None;
    }
    match reference_cell(f, a) {
        Some(cell) if cell.contains(&(alpha, beta)) => None,
        _ => Some(format!(
            "decomposition type ({alpha}, {beta}) with (f, a) = ({f}, {a}) is outside the reference table"
        )),
    }
}
