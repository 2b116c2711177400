//! Group construction: cycle notation, named constructors, the built-in
//! worked-example group and the JSON group file.
//!
//! Spec grammar (one spec per group):
//!
//! ```text
//! generators:<perms>      perms as in `parse_cycles`, e.g. generators:(1,2);(1,2,3)
//! cyclic:n | dihedral:n | symmetric:n | alternating:n
//! product:A,B[,C...]      direct product on disjoint supports
//! wreath-c2:H             C₂ ≀ H on 2k points for H ≤ S_k
//! builtin:NAME            see `BUILTINS`
//! file:PATH               JSON group file
//! ```
//!
//! A product factor containing a top-level comma is wrapped in `[...]`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{central_involutions, FiniteGroup, Permutation, DEFAULT_ORDER_CAP};

/// Built-in groups: name and verbatim generators.
pub const BUILTINS: &[(&str, &str)] = &[("G40_12", "deg=10;(2,7)(3,4,8,9);(1,4,3,8)")];

struct CycleParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> CycleParser<'a> {
    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn number(&mut self) -> Result<(usize, usize)> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some(b'-') {
            return Err(Error::parse(start, "negative point"));
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(start, "expected a point number"));
        }
        let value: usize = self.src[start..self.pos]
            .parse()
            .map_err(|_| Error::parse(start, "point number too large"))?;
        Ok((value, start))
    }

    /// One permutation: `()` or a sequence of cycles (1-based points).
    fn permutation(&mut self) -> Result<Vec<Vec<usize>>> {
        self.skip_ws();
        let mut cycles = Vec::new();
        loop {
            self.skip_ws();
            if self.peek() != Some(b'(') {
                break;
            }
            let open = self.pos;
            self.pos += 1;
            self.skip_ws();
            if self.peek() == Some(b')') {
                self.pos += 1;
                if !cycles.is_empty() {
                    return Err(Error::parse(open, "'()' must stand alone"));
                }
                self.skip_ws();
                if self.peek() == Some(b'(') {
                    return Err(Error::parse(self.pos, "'()' must stand alone"));
                }
                return Ok(Vec::new());
            }
            let mut cycle: Vec<usize> = Vec::new();
            loop {
                let (p, at) = self.number()?;
                if p == 0 {
                    return Err(Error::parse(at, "points are 1-based; found 0"));
                }
                if cycle.contains(&p) {
                    return Err(Error::parse(at, format!("point {p} repeated within one cycle")));
                }
                cycle.push(p);
                self.skip_ws();
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => {
                        return Err(Error::parse(self.pos, format!("unexpected '{}' in cycle", c as char)))
                    }
                    None => return Err(Error::parse(self.pos, "unbalanced parenthesis")),
                }
            }
            if cycle.len() < 2 {
                return Err(Error::parse(open, "a cycle needs at least two points"));
            }
            cycles.push(cycle);
        }
        if cycles.is_empty() {
            return Err(match self.peek() {
                Some(b')') => Error::parse(self.pos, "unbalanced parenthesis"),
                Some(c) => Error::parse(self.pos, format!("unexpected '{}'", c as char)),
                None => Error::parse(self.pos, "expected a permutation"),
            });
        }
        Ok(cycles)
    }
}

/// Parses `;`-separated permutations in 1-based cycle notation, with an
/// optional leading `deg=N;` header. The degree is the largest point
/// mentioned (at least 1) unless the header raises it.
pub fn parse_cycles(text: &str) -> Result<(usize, Vec<Permutation>)> {
    parse_cycles_impl(text, None)
}

/// Like [`parse_cycles`] with the degree fixed by the caller.
pub fn parse_cycles_in(text: &str, degree: usize) -> Result<Vec<Permutation>> {
    parse_cycles_impl(text, Some(degree)).map(|(_, p)| p)
}

fn parse_cycles_impl(text: &str, fixed: Option<usize>) -> Result<(usize, Vec<Permutation>)> {
    let mut parser = CycleParser { src: text, pos: 0 };
    parser.skip_ws();
    let mut header: Option<(usize, usize)> = None;
    if text[parser.pos..].starts_with("deg=") {
        parser.pos += 4;
        header = Some(parser.number()?);
        parser.skip_ws();
        match parser.peek() {
            Some(b';') => parser.pos += 1,
            None => {}
            Some(c) => return Err(Error::parse(parser.pos, format!("unexpected '{}' after header", c as char))),
        }
    }
    let mut raw: Vec<Vec<Vec<usize>>> = Vec::new();
    parser.skip_ws();
    if parser.peek().is_some() || header.is_none() {
        loop {
            raw.push(parser.permutation()?);
            parser.skip_ws();
            match parser.peek() {
                Some(b';') => parser.pos += 1,
                None => break,
                Some(b')') => return Err(Error::parse(parser.pos, "unbalanced parenthesis")),
                Some(c) => return Err(Error::parse(parser.pos, format!("unexpected '{}'", c as char))),
            }
        }
    }
    let max_point = raw.iter().flatten().flatten().copied().max().unwrap_or(1);
    let degree = match (fixed, header) {
        (Some(d), Some((h, at))) if h != d => {
            return Err(Error::parse(at, format!("header degree {h} differs from expected {d}")))
        }
        (Some(d), _) => d,
        (None, Some((h, _))) => h,
        (None, None) => max_point,
    };
    if degree == 0 {
        return Err(Error::parse(0, "degree must be positive"));
    }
    if max_point > degree {
        return Err(Error::parse(
            header.map_or(0, |(_, at)| at),
            format!("point {max_point} exceeds degree {degree}"),
        ));
    }
    let perms = raw
        .into_iter()
        .map(|cycles| {
            let zero_based: Vec<Vec<usize>> = cycles
                .into_iter()
                .map(|c| c.into_iter().map(|p| p - 1).collect())
                .collect();
            Permutation::from_cycles(degree, &zero_based)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((degree, perms))
}

/// Inverse of [`parse_cycles`]; emits a `deg=` header only when the degree
/// cannot be inferred from the points.
pub fn format_cycles(degree: usize, perms: &[Permutation]) -> String {
    let inferred = perms
        .iter()
        .filter_map(Permutation::largest_moved_point)
        .max()
        .map_or(1, |p| p + 1);
    let body: Vec<String> = perms.iter().map(ToString::to_string).collect();
    if degree != inferred || perms.is_empty() {
        if body.is_empty() {
            format!("deg={degree}")
        } else {
            format!("deg={degree};{}", body.join(";"))
        }
    } else {
        body.join(";")
    }
}

/// A textual group construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Generators(String),
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Alternating(usize),
    Product(Vec<GroupSpec>),
    WreathC2(Box<GroupSpec>),
    Builtin(String),
    File(PathBuf),
}

/// Splits on commas outside `()` and `[]`, reporting each part's offset.
fn split_top_level(s: &str, sep: u8) -> Result<Vec<(usize, &str)>> {
    let mut depth = 0i32;
    let mut start = 0;
    let mut parts = Vec::new();
    for (i, b) in s.bytes().enumerate() {
        match b {
            b'(' | b'[' => depth += 1,
            b')' | b']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::parse(i, "unbalanced bracket"));
                }
            }
            _ if b == sep && depth == 0 => {
                parts.push((start, &s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::parse(s.len(), "unbalanced bracket"));
    }
    parts.push((start, &s[start..]));
    Ok(parts)
}

/// Splits a list of specs on top-level `;` (commas belong to `product:`).
pub fn split_spec_list(s: &str) -> Result<Vec<GroupSpec>> {
    split_top_level(s, b';')?
        .into_iter()
        .filter(|(_, p)| !p.trim().is_empty())
        .map(|(at, p)| parse_spec_at(p.trim(), at))
        .collect()
}

fn parse_spec_at(s: &str, base: usize) -> Result<GroupSpec> {
    let shift = |e: Error| match e {
        Error::Parse { offset, message } => Error::Parse {
            offset: offset + base,
            message,
        },
        other => other,
    };
    parse_spec(s).map_err(shift)
}

fn parse_spec(s: &str) -> Result<GroupSpec> {
    if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        return parse_spec_at(inner, 1);
    }
    let Some((kind, rest)) = s.split_once(':') else {
        return Err(Error::parse(0, format!("group spec {s:?} lacks a 'kind:' prefix")));
    };
    let arg_at = kind.len() + 1;
    let number = |r: &str| -> Result<usize> {
        r.trim()
            .parse::<usize>()
            .map_err(|_| Error::parse(arg_at, format!("expected a positive integer after '{kind}:'")))
            .and_then(|n| {
                if n == 0 {
                    Err(Error::parse(arg_at, "size must be positive"))
                } else {
                    Ok(n)
                }
            })
    };
    Ok(match kind {
        "generators" => GroupSpec::Generators(rest.to_string()),
        "cyclic" => GroupSpec::Cyclic(number(rest)?),
        "dihedral" => {
            let n = number(rest)?;
            if n % 2 != 0 {
                return Err(Error::parse(arg_at, "dihedral order must be even"));
            }
            GroupSpec::Dihedral(n)
        }
        "symmetric" => GroupSpec::Symmetric(number(rest)?),
        "alternating" => GroupSpec::Alternating(number(rest)?),
        "product" => {
            let parts = split_top_level(rest, b',')?;
            if parts.len() < 2 {
                return Err(Error::parse(arg_at, "product needs at least two factors"));
            }
            GroupSpec::Product(
                parts
                    .into_iter()
                    .map(|(at, p)| parse_spec_at(p, arg_at + at))
                    .collect::<Result<_>>()?,
            )
        }
        "wreath-c2" => GroupSpec::WreathC2(Box::new(parse_spec_at(rest, arg_at)?)),
        "builtin" => {
            if !BUILTINS.iter().any(|(name, _)| *name == rest) {
                let known: Vec<&str> = BUILTINS.iter().map(|(n, _)| *n).collect();
                return Err(Error::parse(arg_at, format!("unknown builtin {rest:?}; known: {}", known.join(", "))));
            }
            GroupSpec::Builtin(rest.to_string())
        }
        "file" => {
            if rest.is_empty() {
                return Err(Error::parse(arg_at, "empty file path"));
            }
            GroupSpec::File(PathBuf::from(rest))
        }
        other => return Err(Error::parse(0, format!("unknown group kind {other:?}"))),
    })
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_spec(s)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Generators(text) => write!(f, "generators:{text}"),
            GroupSpec::Cyclic(n) => write!(f, "cyclic:{n}"),
            GroupSpec::Dihedral(n) => write!(f, "dihedral:{n}"),
            GroupSpec::Symmetric(n) => write!(f, "symmetric:{n}"),
            GroupSpec::Alternating(n) => write!(f, "alternating:{n}"),
            GroupSpec::Product(factors) => {
                f.write_str("product:")?;
                for (i, factor) in factors.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    let text = factor.to_string();
                    let needs_brackets = split_top_level(&text, b',').map_or(true, |p| p.len() > 1)
                        || (text.starts_with('[') && text.ends_with(']'));
                    if needs_brackets {
                        write!(f, "[{text}]")?;
                    } else {
                        f.write_str(&text)?;
                    }
                }
                Ok(())
            }
            GroupSpec::WreathC2(h) => write!(f, "wreath-c2:{h}"),
            GroupSpec::Builtin(name) => write!(f, "builtin:{name}"),
            GroupSpec::File(path) => write!(f, "file:{}", path.display()),
        }
    }
}

/// JSON group file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub degree: usize,
    pub generators: Vec<String>,
    #[serde(default)]
    pub label: String,
}

impl GroupFile {
    pub fn load(path: &Path) -> Result<GroupFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| {
            Error::parse(0, format!("{}: malformed group file: {e}", path.display()))
        })
    }

    pub fn permutations(&self) -> Result<Vec<Permutation>> {
        self.generators
            .iter()
            .map(|g| {
                let perms = parse_cycles_in(g, self.degree)?;
                match perms.len() {
                    1 => Ok(perms.into_iter().next().unwrap()),
                    _ => Err(Error::invalid(format!("group file generator {g:?} is not a single permutation"))),
                }
            })
            .collect()
    }
}

/// A constructed group with the label echoed into outputs.
#[derive(Clone, Debug)]
pub struct CatalogGroup {
    pub group: FiniteGroup,
    pub label: String,
}

fn cycle_text(points: impl IntoIterator<Item = usize>) -> String {
    let inner: Vec<String> = points.into_iter().map(|p| p.to_string()).collect();
    format!("({})", inner.join(","))
}

fn from_text(text: &str, degree: Option<usize>) -> Result<FiniteGroup> {
    let (degree, gens) = match degree {
        Some(d) => (d, parse_cycles_in(text, d)?),
        None => parse_cycles(text)?,
    };
    FiniteGroup::generate(degree, &gens, DEFAULT_ORDER_CAP)
}

/// Builds the group a spec describes, with the default order cap.
pub fn build_group(spec: &GroupSpec) -> Result<FiniteGroup> {
    build(spec).map(|c| c.group)
}

pub fn build(spec: &GroupSpec) -> Result<CatalogGroup> {
    let label = spec.to_string();
    let group = match spec {
        GroupSpec::Generators(text) => from_text(text, None)?,
        GroupSpec::Cyclic(1) => FiniteGroup::trivial(1),
        GroupSpec::Cyclic(n) => from_text(&cycle_text(1..=*n), Some(*n))?,
        GroupSpec::Dihedral(2) => from_text("(1,2)", Some(2))?,
        GroupSpec::Dihedral(4) => from_text("(1,2)(3,4);(1,3)(2,4)", Some(4))?,
        GroupSpec::Dihedral(n) => {
            let k = n / 2;
            let reflection: String = (1..=k / 2).map(|i| cycle_text([i, k + 1 - i])).collect();
            from_text(&format!("{};{reflection}", cycle_text(1..=k)), Some(k))?
        }
        GroupSpec::Symmetric(n) if *n <= 2 => {
            from_text(if *n == 2 { "(1,2)" } else { "()" }, Some(*n))?
        }
        GroupSpec::Symmetric(n) => from_text(&format!("(1,2);{}", cycle_text(1..=*n)), Some(*n))?,
        GroupSpec::Alternating(n) if *n <= 2 => FiniteGroup::trivial(*n),
        GroupSpec::Alternating(n) => {
            let gens: Vec<String> = (3..=*n).map(|i| cycle_text([1, 2, i])).collect();
            from_text(&gens.join(";"), Some(*n))?
        }
        GroupSpec::Product(factors) => {
            let built = factors.iter().map(build_group).collect::<Result<Vec<_>>>()?;
            let degree: usize = built.iter().map(FiniteGroup::degree).sum();
            let mut gens = Vec::new();
            let mut offset = 0;
            for g in &built {
                for s in g.generators() {
                    let mut images: Vec<u32> = (0..degree as u32).collect();
                    for (i, &x) in s.images().iter().enumerate() {
                        images[offset + i] = x + offset as u32;
                    }
                    gens.push(Permutation::from_images(images)?);
                }
                offset += g.degree();
            }
            FiniteGroup::generate(degree, &gens, DEFAULT_ORDER_CAP)?
        }
        GroupSpec::WreathC2(inner) => {
            let h = build_group(inner)?;
            let k = h.degree();
            let mut gens = Vec::new();
            for i in 0..k {
                let mut images: Vec<u32> = (0..2 * k as u32).collect();
                images.swap(2 * i, 2 * i + 1);
                gens.push(Permutation::from_images(images)?);
            }
            for s in h.generators() {
                let mut images = vec![0u32; 2 * k];
                for i in 0..k {
                    images[2 * i] = 2 * s.apply(i) as u32;
                    images[2 * i + 1] = 2 * s.apply(i) as u32 + 1;
                }
                gens.push(Permutation::from_images(images)?);
            }
            FiniteGroup::generate(2 * k, &gens, DEFAULT_ORDER_CAP)?
        }
        GroupSpec::Builtin(name) => {
            let (_, text) = BUILTINS
                .iter()
                .find(|(n, _)| n == name)
                .ok_or_else(|| Error::invalid(format!("unknown builtin {name:?}")))?;
            from_text(text, None)?
        }
        GroupSpec::File(path) => {
            let file = GroupFile::load(path)?;
            let gens = file.permutations()?;
            let group = FiniteGroup::generate(file.degree, &gens, DEFAULT_ORDER_CAP)?;
            let label = if file.label.is_empty() { label } else { file.label };
            return Ok(CatalogGroup { group, label });
        }
    };
    Ok(CatalogGroup { group, label })
}

/// Galois groups of CM closures by dimension, with a construction where
/// this crate has one. Labels are GAP small-group ids; isomorphism of a
/// construction to its id is not verified.
pub struct KnownGroup {
    pub g: usize,
    pub gap_label: &'static str,
    pub construction: Option<&'static str>,
    pub note: &'static str,
}

pub const KNOWN_GROUPS: &[KnownGroup] = &[
    KnownGroup { g: 1, gap_label: "G2_1", construction: Some("cyclic:2"), note: "" },
    KnownGroup { g: 2, gap_label: "G4_1", construction: Some("cyclic:4"), note: "" },
    KnownGroup { g: 2, gap_label: "G8_3", construction: Some("dihedral:8"), note: "" },
    KnownGroup { g: 3, gap_label: "G6_2", construction: Some("cyclic:6"), note: "" },
    KnownGroup { g: 3, gap_label: "G12_4", construction: Some("dihedral:12"), note: "" },
    KnownGroup { g: 3, gap_label: "G24_13", construction: Some("product:alternating:4,cyclic:2"), note: "" },
    KnownGroup { g: 3, gap_label: "G48_48", construction: Some("wreath-c2:symmetric:3"), note: "" },
    KnownGroup { g: 4, gap_label: "G8_1", construction: Some("cyclic:8"), note: "" },
    KnownGroup { g: 4, gap_label: "G8_2", construction: Some("product:cyclic:4,cyclic:2"), note: "" },
    KnownGroup { g: 4, gap_label: "G8_3", construction: Some("dihedral:8"), note: "no primitive CM types in degree 8; use --include-imprimitive" },
    KnownGroup { g: 4, gap_label: "G8_4", construction: Some("generators:(1,2,3,4)(5,6,7,8);(1,5,3,7)(2,8,4,6)"), note: "quaternion group, regular representation" },
    KnownGroup { g: 4, gap_label: "G8_5", construction: Some("product:cyclic:2,cyclic:2,cyclic:2"), note: "" },
    KnownGroup { g: 4, gap_label: "G16_*, G24_3, G24_13, G32_*, G48_29, G48_48, G64_*, G96_204, G128_928, G192_*", construction: None, note: "no construction; supply generators via file: or generators:" },
    KnownGroup { g: 4, gap_label: "G384_5602", construction: Some("wreath-c2:symmetric:4"), note: "identification assumed; needs --subgroup-cap >= 384" },
    KnownGroup { g: 5, gap_label: "G10_2", construction: Some("cyclic:10"), note: "" },
    KnownGroup { g: 5, gap_label: "G20_4", construction: Some("dihedral:20"), note: "" },
    KnownGroup { g: 5, gap_label: "G40_12", construction: Some("builtin:G40_12"), note: "worked-example generators" },
    KnownGroup { g: 5, gap_label: "G120_35, G160_235, G240_189, G320_1636, G640_21536, G1920_240997", construction: None, note: "no construction; supply generators via file: or generators:" },
    KnownGroup { g: 5, gap_label: "G2_1 x G1920_240996", construction: Some("wreath-c2:symmetric:5"), note: "best-effort identification; order 3840 requires --delta" },
];

/// Checks that a group can serve as a CM Galois group at all.
pub fn has_central_involution(g: &FiniteGroup) -> bool {
    !central_involutions(g).is_empty()
}
