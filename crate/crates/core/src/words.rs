//! Circular words over `{F, V}`.
//!
//! A [`CircularWordClass`] is stored as its lexicographically least rotation
//! (with `F < V`), so class equality is sequence equality. Multisets of
//! classes describe a BT₁ group scheme: each indecomposable (aperiodic) class
//! is one indecomposable summand.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    F,
    V,
}

impl Letter {
    pub fn swapped(self) -> Letter {
        match self {
            Letter::F => Letter::V,
            Letter::V => Letter::F,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::F => 'F',
            Letter::V => 'V',
        }
    }
}

/// Start index of the lexicographically least rotation, in linear time.
pub fn least_rotation(s: &[Letter]) -> usize {
    let n = s.len();
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// Rotation-equivalence class of a nonempty word over `{F, V}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CircularWordClass {
    letters: Vec<Letter>,
}

impl CircularWordClass {
    pub fn canonicalize(raw: &[Letter]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::invalid("empty circular word"));
        }
        let r = least_rotation(raw);
        let mut letters = Vec::with_capacity(raw.len());
        letters.extend_from_slice(&raw[r..]);
        letters.extend_from_slice(&raw[..r]);
        Ok(CircularWordClass { letters })
    }

    pub(crate) fn from_canonical(letters: Vec<Letter>) -> Self {
        debug_assert_eq!(least_rotation(&letters), 0);
        CircularWordClass { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letters as plain text, without brackets.
    pub fn text(&self) -> String {
        self.letters.iter().map(|l| l.as_char()).collect()
    }

    /// Swap `F` and `V`.
    pub fn dual(&self) -> Self {
        let swapped: Vec<Letter> = self.letters.iter().map(|l| l.swapped()).collect();
        Self::canonicalize(&swapped).expect("nonempty")
    }

    pub fn is_self_dual(&self) -> bool {
        self.dual() == *self
    }

    /// Reading direction reversed. Not the same class in general.
    pub fn reversed(&self) -> Self {
        let rev: Vec<Letter> = self.letters.iter().rev().copied().collect();
        Self::canonicalize(&rev).expect("nonempty")
    }

    /// `(root, μ)` with `self = [root^μ]` and `root` aperiodic.
    pub fn primitive_root(&self) -> (Self, usize) {
        let t = self.len();
        for period in 1..=t {
            if t.is_multiple_of(period) && (period..t).all(|i| self.letters[i] == self.letters[i - period]) {
                // a prefix of a least rotation is itself least among its rotations
                let root = CircularWordClass::from_canonical(self.letters[..period].to_vec());
                return (root, t / period);
            }
        }
        unreachable!("the full length is always a period")
    }

    pub fn is_indecomposable(&self) -> bool {
        self.primitive_root().1 == 1
    }

    /// Number of cyclic positions where `F` is followed by `V`.
    pub fn c_number(&self) -> usize {
        let t = self.len();
        (0..t)
            .filter(|&i| self.letters[i] == Letter::F && self.letters[(i + 1) % t] == Letter::V)
            .count()
    }
}

impl fmt::Display for CircularWordClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.text())
    }
}

impl fmt::Debug for CircularWordClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `FFVV` or `[FFVV]`, canonicalizing the rotation.
pub fn parse_letters(text: &str) -> Result<Vec<Letter>> {
    let trimmed = text.trim();
    let base = text.len() - text.trim_start().len();
    let (body, offset) = match trimmed.strip_prefix('[') {
        Some(rest) => match rest.strip_suffix(']') {
            Some(inner) => (inner, base + 1),
            None => return Err(Error::parse(base + trimmed.len(), "missing closing ']'")),
        },
        None => (trimmed, base),
    };
    if body.is_empty() {
        return Err(Error::parse(offset, "empty circular word"));
    }
    body.char_indices()
        .map(|(i, c)| match c {
            'F' => Ok(Letter::F),
            'V' => Ok(Letter::V),
            other => Err(Error::parse(offset + i, format!("unexpected symbol {other:?}"))),
        })
        .collect()
}

impl FromStr for CircularWordClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::canonicalize(&parse_letters(s)?)
    }
}

/// A multiset of circular word classes.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordMultiset {
    entries: BTreeMap<CircularWordClass, usize>,
}

impl WordMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, class: CircularWordClass, multiplicity: usize) {
        if multiplicity > 0 {
            *self.entries.entry(class).or_insert(0) += multiplicity;
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&CircularWordClass, usize)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    pub fn multiplicity(&self, class: &CircularWordClass) -> usize {
        self.entries.get(class).copied().unwrap_or(0)
    }

    /// Entries expanded by multiplicity, in class order.
    pub fn expanded(&self) -> impl Iterator<Item = &CircularWordClass> {
        self.entries
            .iter()
            .flat_map(|(k, &v)| std::iter::repeat_n(k, v))
    }

    /// Number of words counted with multiplicity.
    pub fn count(&self) -> usize {
        self.entries.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_length(&self) -> usize {
        self.entries.iter().map(|(k, v)| k.len() * v).sum()
    }

    pub fn dual(&self) -> Self {
        self.entries.iter().map(|(k, &v)| (k.dual(), v)).collect()
    }

    pub fn reversed(&self) -> Self {
        self.entries.iter().map(|(k, &v)| (k.reversed(), v)).collect()
    }

    pub fn is_self_dual(&self) -> bool {
        self.dual() == *self
    }

    /// Every entry replaced by `μ` copies of its primitive root.
    pub fn factored(&self) -> Self {
        self.entries
            .iter()
            .map(|(k, &v)| {
                let (root, mu) = k.primitive_root();
                (root, v * mu)
            })
            .collect()
    }

    pub fn all_indecomposable(&self) -> bool {
        self.entries.keys().all(CircularWordClass::is_indecomposable)
    }

    /// Canonical text: expanded entries in class order, comma separated.
    pub fn canonical_text(&self) -> String {
        self.to_string()
    }
}

impl FromIterator<(CircularWordClass, usize)> for WordMultiset {
    fn from_iter<I: IntoIterator<Item = (CircularWordClass, usize)>>(iter: I) -> Self {
        let mut m = WordMultiset::new();
        for (k, v) in iter {
            m.insert(k, v);
        }
        m
    }
}

impl FromIterator<CircularWordClass> for WordMultiset {
    fn from_iter<I: IntoIterator<Item = CircularWordClass>>(iter: I) -> Self {
        iter.into_iter().map(|k| (k, 1)).collect()
    }
}

impl fmt::Display for WordMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.expanded().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for WordMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// p-rank and a-number of a multiset of indecomposable classes.
pub fn multiset_invariants(m: &WordMultiset) -> Result<(usize, usize)> {
    if let Some((w, _)) = m.entries().find(|(w, _)| !w.is_indecomposable()) {
        return Err(Error::invalid(format!(
            "decomposable class {w} in multiset; factor through primitive roots first"
        )));
    }
    let single_f = CircularWordClass::from_canonical(vec![Letter::F]);
    let f = m.multiplicity(&single_f);
    let a = m.entries().map(|(w, k)| k * w.c_number()).sum();
    Ok((f, a))
}

/// All aperiodic classes of length `n`, sorted.
///
/// Duval's generation of Lyndon words: Lyndon words are exactly the least
/// rotations of aperiodic necklaces and come out in lexicographic order.
pub fn enumerate_indecomposable_classes(n: usize) -> Vec<CircularWordClass> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    // letters as 0 = F, 1 = V; -1 marks "before F"
    let mut w: Vec<i8> = vec![-1];
    while !w.is_empty() {
        *w.last_mut().unwrap() += 1;
        let m = w.len();
        if m == n {
            out.push(CircularWordClass::from_canonical(
                w.iter()
                    .map(|&x| if x == 0 { Letter::F } else { Letter::V })
                    .collect(),
            ));
        }
        while w.len() < n {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&1) {
            w.pop();
        }
    }
    out
}

/// A quasi-polarized indecomposable summand: one self-dual class or a
/// pair of distinct mutually dual classes (stored smaller first).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Piece {
    SelfDual(CircularWordClass),
    DualPair(CircularWordClass, CircularWordClass),
}

impl Piece {
    pub fn words(&self) -> Vec<&CircularWordClass> {
        match self {
            Piece::SelfDual(w) => vec![w],
            Piece::DualPair(u, v) => vec![u, v],
        }
    }

    pub fn total_length(&self) -> usize {
        self.words().iter().map(|w| w.len()).sum()
    }

    /// Half of the total length: `g` for a piece of order `p^{2g}`.
    pub fn half_order(&self) -> usize {
        self.total_length() / 2
    }

    pub fn a_number(&self) -> usize {
        self.words().iter().map(|w| w.c_number()).sum()
    }

    pub fn p_rank(&self) -> usize {
        self.words().iter().filter(|w| w.text() == "F").count()
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Piece::SelfDual(w) => write!(f, "{w}"),
            Piece::DualPair(u, v) => write!(f, "{u}, {v}"),
        }
    }
}

/// Splits a self-dual multiset of indecomposable classes into
/// quasi-polarized pieces, in class order.
pub fn pair_quasi_polarized(m: &WordMultiset) -> Result<Vec<Piece>> {
    if let Some((w, _)) = m.entries().find(|(w, _)| !w.is_indecomposable()) {
        return Err(Error::invalid(format!("decomposable class {w} cannot be paired")));
    }
    let mut pieces = Vec::new();
    for (w, k) in m.entries() {
        let d = w.dual();
        if d == *w {
            pieces.extend(std::iter::repeat_n(Piece::SelfDual(w.clone()), k));
            continue;
        }
        let other = m.multiplicity(&d);
        if other != k {
            return Err(Error::invalid(format!(
                "multiset is not self-dual: {w} occurs {k} times but its dual {d} occurs {other} times"
            )));
        }
        if *w < d {
            pieces.extend(std::iter::repeat_n(Piece::DualPair(w.clone(), d), k));
        }
    }
    Ok(pieces)
}
