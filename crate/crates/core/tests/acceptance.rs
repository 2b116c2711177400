//! Acceptance suite: one PASS/FAIL line per criterion. Expected tables are
//! transcribed by hand; word comparisons go through a naive rotation oracle
//! rather than the library's canonicalization.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

use cmred::catalog::{build_group, parse_cycles_in, KNOWN_GROUPS};
use cmred::cm::{enumerate_cm_types, imprimitivity_witness_among, is_primitive, sigma_orbits, signature};
use cmred::perm::{
    central_involutions, double_coset_count, left_cosets, overgroups, subgroups_of_order, CosetAction,
    FiniteGroup, Permutation,
};
use cmred::pipeline::{run, CorrespondenceRecord, DeltaChoice, RunOptions};
use cmred::words::{enumerate_indecomposable_classes, CircularWordClass, Letter};

// ---------------------------------------------------------------- oracles

fn canon(w: &str) -> String {
    (0..w.len()).map(|i| format!("{}{}", &w[i..], &w[..i])).min().unwrap()
}

fn dual(w: &str) -> String {
    canon(&w.chars().map(|c| if c == 'F' { 'V' } else { 'F' }).collect::<String>())
}

/// Smallest period `d` with `w` equal to its rotation by `d`.
fn period(w: &str) -> usize {
    (1..=w.len())
        .find(|&d| w.len().is_multiple_of(d) && format!("{}{}", &w[d..], &w[..d]) == w)
        .unwrap()
}

/// Raw word to its primitive root (canonical) and multiplicity.
fn factor(w: &str) -> (String, usize) {
    let d = period(w);
    (canon(&w[..d]), w.len() / d)
}

/// Words (bracketed or not) factored into primitive roots, sorted.
fn factored_sorted(words: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = words
        .iter()
        .flat_map(|w| {
            let (root, k) = factor(&strip(w));
            std::iter::repeat_n(root, k)
        })
        .collect();
    v.sort();
    v
}

/// Number of cyclic positions with `F` followed by `V`.
fn c_count(w: &str) -> usize {
    let b = w.as_bytes();
    (0..b.len()).filter(|&i| b[i] == b'F' && b[(i + 1) % b.len()] == b'V').count()
}

fn strip(w: &str) -> String {
    w.trim_matches(|c| c == '[' || c == ']').to_string()
}

fn sorted_canon(words: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = words.iter().map(|w| canon(&strip(w))).collect();
    v.sort();
    v
}

/// `(α, β)` from a label such as `𝒫₁𝒫₁ᶜ𝒫₂`.
fn label_pair(label: &str) -> (usize, usize) {
    let alpha = label.matches('𝒫').count();
    (alpha, alpha - label.matches('ᶜ').count())
}

// ------------------------------------------------------------- invocation

struct Output {
    stdout: String,
    stderr: String,
    code: i32,
    elapsed: Duration,
}

fn cmred(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cmred"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("CMRED_THREADS", t),
        None => cmd.env_remove("CMRED_THREADS"),
    };
    let start = Instant::now();
    let out = cmd.output().expect("spawn cmred");
    Output {
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        code: out.status.code().unwrap_or(-1),
        elapsed: start.elapsed(),
    }
}

fn cmred_json(args: &[&str], threads: Option<&str>) -> Result<(Value, Duration), String> {
    let out = cmred(args, threads);
    if out.code != 0 {
        return Err(format!("cmred {args:?} exited {}: {}", out.code, out.stderr));
    }
    let v = serde_json::from_str(&out.stdout).map_err(|e| format!("bad json from {args:?}: {e}"))?;
    Ok((v, out.elapsed))
}

fn strings(v: &Value) -> Vec<&str> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect()
}

fn num(v: &Value) -> usize {
    v.as_u64().unwrap() as usize
}

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ------------------------------------------------------- expected tables

/// Pieces of half-order g: (words, name, a-number).
const CLASSIFICATION: &[(usize, &[(&[&str], &str, usize)])] = &[
    (1, &[(&["F", "V"], "μ_p × Z/pZ", 0), (&["FV"], "I_{1,1}", 1)]),
    (2, &[(&["FFVV"], "I_{2,1}", 1)]),
    (3, &[(&["FFFVVV"], "I_{3,1}", 1), (&["FFV", "VVF"], "I_{3,2}", 2)]),
    (
        4,
        &[
            (&["FFFFVVVV"], "I_{4,1}", 1),
            (&["FFFV", "VVVF"], "I_{4,2}", 2),
            (&["FFVFVVFV"], "I_{4,3}", 3),
        ],
    ),
    (
        5,
        &[
            (&["FFFFFVVVVV"], "I_{5,1}", 1),
            (&["FFFFV", "VVVVF"], "I_{5,2}", 2),
            (&["FFFVV", "VVVFF"], "J_{5,2}", 2),
            (&["FFFVFVVVFV"], "I_{5,3}", 3),
            (&["FFVFFVVFVV"], "J_{5,3}", 3),
            (&["FFVFV", "VVFVF"], "I_{5,4}", 4),
        ],
    ),
];

/// The worked example: signature label and word lists as printed.
const WORKED_EXAMPLE: &[(&str, &[&[&str]])] = &[
    ("𝒫", &[&["FFFFFVVVVV"], &["FFVVFVVFFV"], &["FFFVFVVVFV"]]),
    ("𝒫𝒫ᶜ", &[&["FFFFV", "VVVVF"], &["FFFVV", "VVVFF"], &["FFVFV", "VVFVF"]]),
    (
        "𝒫₁𝒫₁ᶜ𝒫₂",
        &[
            &["FV", "F", "V", "F", "V", "F", "V", "F", "V"],
            &["FFFV", "VVVF", "FV"],
            &["FFVV", "FFVV", "FV"],
            &["FV", "FV", "FV", "FV", "FV"],
        ],
    ),
    (
        "𝒫₁𝒫₁ᶜ𝒫₂𝒫₂ᶜ",
        &[
            &["F", "V", "F", "V", "F", "V", "F", "V", "F", "V"],
            &["FFFV", "VVVF", "F", "V"],
            &["FFVV", "FFVV", "F", "V"],
            &["FV", "FV", "FV", "FV", "F", "V"],
        ],
    ),
    (
        "𝒫₁𝒫₁ᶜ𝒫₂𝒫₂ᶜ𝒫₃",
        &[
            &["FV", "F", "V", "F", "V", "F", "V", "F", "V"],
            &["FV", "FV", "FV", "F", "V", "F", "V"],
            &["FV", "FV", "FV", "FV", "FV"],
        ],
    ),
    ("𝒫₁𝒫₂𝒫₃𝒫₄𝒫₅", &[&["FV", "FV", "FV", "FV", "FV"]]),
    (
        "𝒫₁𝒫₁ᶜ𝒫₂𝒫₂ᶜ𝒫₃𝒫₃ᶜ",
        &[
            &["F", "V", "F", "V", "F", "V", "F", "V", "F", "V"],
            &["FV", "FV", "F", "V", "F", "V", "F", "V"],
            &["FV", "FV", "FV", "FV", "F", "V"],
        ],
    ),
    (
        "𝒫₁𝒫₁ᶜ𝒫₂𝒫₂ᶜ𝒫₃𝒫₃ᶜ𝒫₄𝒫₄ᶜ𝒫₅𝒫₅ᶜ",
        &[&["F", "V", "F", "V", "F", "V", "F", "V", "F", "V"]],
    ),
];

const MU: &str = "μ_p × Z/pZ";

/// Low-dimension tables: (g, groups, rows of (label, scheme, p-rank, a-number)).
fn low_dimension_tables() -> Vec<(usize, Vec<&'static str>, Vec<(String, String, usize, usize)>)> {
    let row = |l: &str, s: &str, f: usize, a: usize| (l.to_string(), s.replace("MU", MU), f, a);
    vec![
        (1, vec!["cyclic:2"], vec![row("𝒫", "I_{1,1}", 0, 1), row("𝒫𝒫ᶜ", "MU", 1, 0)]),
        (
            2,
            vec!["cyclic:4", "dihedral:8"],
            vec![
                row("𝒫", "I_{2,1}", 0, 1),
                row("𝒫𝒫ᶜ", "(MU)^2", 2, 0),
                row("𝒫𝒫ᶜ", "I_{1,1}^2", 0, 2),
                row("𝒫₁𝒫₂", "I_{1,1}^2", 0, 2),
                row("𝒫₁𝒫₁ᶜ𝒫₂", "(MU) × I_{1,1}", 1, 1),
                row("𝒫₁𝒫₁ᶜ𝒫₂𝒫₂ᶜ", "(MU)^2", 2, 0),
            ],
        ),
        (
            3,
            vec!["cyclic:6", "dihedral:12", "product:alternating:4,cyclic:2", "wreath-c2:symmetric:3"],
            vec![
                row("𝒫", "I_{3,1}", 0, 1),
                row("𝒫", "I_{1,1}^3", 0, 3),
                row("𝒫𝒫ᶜ", "(MU)^3", 3, 0),
                row("𝒫𝒫ᶜ", "I_{3,2}", 0, 2),
                row("𝒫₁𝒫₂", "I_{1,1} × I_{2,1}", 0, 2),
                row("𝒫₁𝒫₁ᶜ𝒫₂", "(MU)^2 × I_{1,1}", 2, 1),
                row("𝒫₁𝒫₁ᶜ𝒫₂", "(MU) × I_{2,1}", 1, 1),
                row("𝒫₁𝒫₁ᶜ𝒫₂", "I_{1,1}^3", 0, 3),
                row("𝒫₁𝒫₂𝒫₃", "I_{1,1}^3", 0, 3),
                row("𝒫₁𝒫₁ᶜ𝒫₂𝒫₂ᶜ", "(MU)^3", 3, 0),
                row("𝒫₁𝒫₁ᶜ𝒫₂𝒫₂ᶜ", "(MU) × I_{1,1}^2", 1, 2),
                row("𝒫₁𝒫₁ᶜ𝒫₂𝒫₃", "(MU) × I_{1,1}^2", 1, 2),
                row("𝒫₁𝒫₁ᶜ𝒫₂𝒫₂ᶜ𝒫₃", "(MU)^2 × I_{1,1}", 2, 1),
                row("𝒫₁𝒫₁ᶜ𝒫₂𝒫₂ᶜ𝒫₃𝒫₃ᶜ", "(MU)^3", 3, 0),
            ],
        ),
    ]
}

/// Reference table, one line per (f, a) cell.
const REFERENCE: &str = "
0 1: (1,1)
0 2: (2,1) (2,2)
0 3: (1,1) (3,2) (3,3)
0 4: (2,1) (2,2) (4,2) (4,3) (4,4)
0 5: (1,1) (3,2) (3,3) (5,3) (5,4) (5,5)
1 0: (2,1)
1 1: (3,2)
1 2: (4,2) (4,3)
1 3: (3,2) (5,3) (5,4)
1 4: (4,2) (4,3) (6,3) (6,4) (6,5)
2 0: (2,1) (4,2)
2 1: (3,2) (5,3)
2 2: (4,2) (4,3) (6,3) (6,4)
2 3: (5,3) (5,4) (7,4) (7,5)
3 0: (2,1) (4,2) (6,3)
3 1: (3,2) (5,3) (7,4)
3 2: (4,2) (4,3) (6,3) (6,4) (8,4) (8,5)
4 0: (2,1) (4,2) (6,3) (8,4)
4 1: (3,2) (5,3) (7,4) (9,5)
5 0: (2,1) (4,2) (6,3) (8,4) (10,5)
";

type Pair = ((usize, usize), (usize, usize));

fn reference_pairs() -> BTreeSet<Pair> {
    let mut out = BTreeSet::new();
    for line in REFERENCE.lines().filter(|l| !l.trim().is_empty()) {
        let (head, cell) = line.split_once(':').unwrap();
        let fa: Vec<usize> = head.split_whitespace().map(|x| x.parse().unwrap()).collect();
        for pair in cell.split_whitespace() {
            let (a, b) = pair.trim_matches(|c| c == '(' || c == ')').split_once(',').unwrap();
            out.insert(((fa[0], fa[1]), (a.parse().unwrap(), b.parse().unwrap())));
        }
    }
    out
}

fn record_pairs(doc: &Value) -> BTreeSet<Pair> {
    doc["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| ((num(&r["f"]), num(&r["a"])), (num(&r["alpha"]), num(&r["beta"]))))
        .collect()
}

// --------------------------------------------------------------- criteria

fn criterion_1() -> Verdict {
    let mut total = Duration::ZERO;
    let mut counts = Vec::new();
    for &(g, expected) in CLASSIFICATION {
        let (doc, elapsed) = cmred_json(&["classify", "--g", &g.to_string(), "--format", "json"], None)?;
        total += elapsed;
        let got: BTreeSet<(Vec<String>, String, usize)> = doc["pieces"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| (sorted_canon(&strings(&p["words"])), p["name"].as_str().unwrap().to_string(), num(&p["a"])))
            .collect();
        let want: BTreeSet<(Vec<String>, String, usize)> = expected
            .iter()
            .map(|(w, n, a)| (sorted_canon(w), n.to_string(), *a))
            .collect();
        ensure(doc["pieces"].as_array().unwrap().len() == expected.len() && got == want, || {
            format!("g = {g}: got {got:?}, expected {want:?}")
        })?;
        counts.push(expected.len());
    }
    ensure(total < Duration::from_secs(1), || format!("took {total:?}"))?;
    Ok(format!("piece counts {counts:?}, {total:.2?} total"))
}

fn criterion_2() -> Verdict {
    let (doc, elapsed) = cmred_json(&["reduce", "--group", "builtin:G40_12", "--g", "5", "--format", "json"], Some("1"))?;
    let records = doc["records"].as_array().unwrap();
    let mut got: BTreeMap<String, BTreeSet<Vec<String>>> = BTreeMap::new();
    for r in records {
        got.entry(r["signature"].as_str().unwrap().to_string())
            .or_default()
            .insert(factored_sorted(&strings(&r["words"])));
    }
    let mut want: BTreeMap<String, BTreeSet<Vec<String>>> = BTreeMap::new();
    let mut rows = 0;
    for &(label, lists) in WORKED_EXAMPLE {
        for list in lists {
            rows += 1;
            want.entry(label.to_string()).or_default().insert(factored_sorted(list));
        }
    }
    ensure(got == want, || format!("table differs:\n got {got:?}\nwant {want:?}"))?;
    ensure(records.len() == rows, || format!("{} rows, expected {rows}", records.len()))?;
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("{} signatures, {rows} rows, {elapsed:.2?} single-threaded", want.len()))
}

fn low_dimension_runs() -> Result<(Vec<(usize, BTreeSet<(String, String, usize, usize)>, BTreeSet<Pair>)>, Duration), String> {
    let mut out = Vec::new();
    let mut total = Duration::ZERO;
    for (g, groups, _) in low_dimension_tables() {
        let mut rows = BTreeSet::new();
        let mut pairs = BTreeSet::new();
        for spec in groups {
            let (doc, elapsed) = cmred_json(&["reduce", "--group", spec, "--g", &g.to_string(), "--format", "json"], None)?;
            total += elapsed;
            for r in doc["records"].as_array().unwrap() {
                rows.insert((
                    r["signature"].as_str().unwrap().to_string(),
                    r["scheme"].as_str().unwrap().to_string(),
                    num(&r["f"]),
                    num(&r["a"]),
                ));
            }
            pairs.extend(record_pairs(&doc));
        }
        out.push((g, rows, pairs));
    }
    Ok((out, total))
}

fn criterion_3() -> Verdict {
    let (runs, total) = low_dimension_runs()?;
    let mut sizes = Vec::new();
    for ((g, got, _), (_, _, expected)) in runs.iter().zip(low_dimension_tables()) {
        let want: BTreeSet<_> = expected.iter().cloned().collect();
        ensure(*got == want, || {
            format!(
                "dimension {g}: missing {:?}, unexpected {:?}",
                want.difference(got).collect::<Vec<_>>(),
                got.difference(&want).collect::<Vec<_>>()
            )
        })?;
        sizes.push(want.len());
    }
    ensure(total < Duration::from_secs(120), || format!("took {total:?}"))?;
    Ok(format!("rows per dimension {sizes:?}, {total:.2?}"))
}

fn criterion_4() -> Verdict {
    let reference = reference_pairs();
    let mut pairs = BTreeSet::new();
    let (doc, _) = cmred_json(&["reduce", "--group", "builtin:G40_12", "--g", "5", "--format", "json"], None)?;
    pairs.extend(record_pairs(&doc));
    let (runs, _) = low_dimension_runs()?;
    let mut low = BTreeSet::new();
    for (_, _, p) in &runs {
        low.extend(p.iter().copied());
    }
    pairs.extend(low.iter().copied());

    let (agg, elapsed) = cmred_json(
        &["aggregate", "--g", "4", "--groups", "wreath-c2:symmetric:4", "--subgroup-cap", "500", "--format", "json"],
        None,
    )?;
    let g4: BTreeSet<Pair> = agg["pairs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| ((num(&p["f"]), num(&p["a"])), (num(&p["alpha"]), num(&p["beta"]))))
        .collect();
    pairs.extend(g4.iter().copied());
    ensure(elapsed < Duration::from_secs(30 * 60), || format!("g = 4 run took {elapsed:?}"))?;

    let outside: Vec<_> = pairs.difference(&reference).collect();
    ensure(outside.is_empty(), || format!("pairs outside the reference table: {outside:?}"))?;

    // every pair of the low-dimension tables is realized by the listed groups
    let table_pairs: BTreeSet<Pair> = low_dimension_tables()
        .into_iter()
        .flat_map(|(_, _, rows)| rows.into_iter().map(|(l, _, f, a)| ((f, a), label_pair(&l))))
        .collect();
    let uncovered: Vec<_> = table_pairs.difference(&low).collect();
    ensure(uncovered.is_empty(), || format!("table pairs not realized: {uncovered:?}"))?;
    ensure(agg["reference_check"] == "PASS", || "aggregate reported FAIL".into())?;
    Ok(format!(
        "{} distinct pairs inside the table ({} from g = 4 in {elapsed:.2?}); {} low-dimension pairs covered",
        pairs.len(),
        g4.len(),
        table_pairs.len()
    ))
}

fn small_groups() -> Vec<(String, FiniteGroup)> {
    let mut specs: Vec<String> = [
        "cyclic:2", "cyclic:4", "cyclic:6", "cyclic:8", "cyclic:10", "cyclic:12", "cyclic:16", "cyclic:18",
        "dihedral:4", "dihedral:8", "dihedral:12", "dihedral:16", "dihedral:20", "dihedral:24",
        "product:cyclic:2,cyclic:2,cyclic:2", "product:cyclic:4,cyclic:2", "product:symmetric:3,cyclic:2",
        "product:dihedral:8,cyclic:2", "product:alternating:4,cyclic:2", "product:symmetric:4,cyclic:2",
        "product:cyclic:4,cyclic:4", "product:dihedral:8,cyclic:3", "wreath-c2:symmetric:3", "wreath-c2:cyclic:3",
        "wreath-c2:symmetric:2", "builtin:G40_12",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for k in KNOWN_GROUPS {
        if let Some(c) = k.construction {
            specs.push(c.to_string());
        }
    }
    specs.sort();
    specs.dedup();
    specs
        .into_iter()
        .filter_map(|s| {
            let spec = s.parse().ok()?;
            // skip without building anything large
            if s.contains("symmetric:5") || s.contains("wreath-c2:symmetric:4") {
                return None;
            }
            let g = build_group(&spec).ok()?;
            (g.order() <= 48).then_some((s, g))
        })
        .collect()
}

/// Largest dimension for which every CM type is enumerated in the
/// primitivity comparison.
const PRIMITIVITY_MAX_G: usize = 16;

fn criterion_5() -> Verdict {
    // (a) least rotation against all rotations
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=20);
        let text: String = (0..n).map(|_| if rng.random_bool(0.5) { 'F' } else { 'V' }).collect();
        let letters: Vec<Letter> = text.chars().map(|c| if c == 'F' { Letter::F } else { Letter::V }).collect();
        if CircularWordClass::canonicalize(&letters).unwrap().text() != canon(&text) {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, || format!("(a) {mismatches} canonicalization mismatches"))?;

    // (b) Lyndon enumeration against a scan of all 2^n words
    for n in 1..=12 {
        let lyndon: BTreeSet<String> = enumerate_indecomposable_classes(n).iter().map(|w| w.text()).collect();
        let scan: BTreeSet<String> = (0u32..1 << n)
            .map(|bits| (0..n).map(|i| if bits >> i & 1 == 1 { 'V' } else { 'F' }).collect::<String>())
            .filter(|w| period(w) == n)
            .map(|w| canon(&w))
            .collect();
        ensure(lyndon == scan, || format!("(b) length {n}: enumeration differs from scan"))?;
    }

    // (c) and (d) over every (ι, Δ) of the small groups
    let (mut types, mut skipped, mut frames, mut sigmas) = (0usize, 0usize, 0usize, 0usize);
    let groups = small_groups();
    for (spec, g) in &groups {
        for iota in central_involutions(g) {
            let n = g.order();
            for m in (1..=n).filter(|m| n % m == 0 && (n / m) % 2 == 0) {
                for delta in subgroups_of_order(g, m, &iota, n).map_err(|e| format!("{spec}: {e}"))? {
                    frames += 1;
                    let space = left_cosets(g, &delta).unwrap();
                    let conj = space.coset_permutation(CosetAction::RightMul(&iota)).unwrap();
                    for sigma in g.elements() {
                        let cycles = sigma_orbits(&space, sigma).unwrap();
                        let sig = signature(&cycles, &conj);
                        let alpha = double_coset_count(g, std::slice::from_ref(sigma), &delta).unwrap();
                        let beta = double_coset_count(g, &[sigma.clone(), iota.clone()], &delta).unwrap();
                        ensure(sig.alpha == alpha && sig.beta == beta, || {
                            format!("(d) {spec}: σ = {sigma}: ({}, {}) vs partition ({alpha}, {beta})", sig.alpha, sig.beta)
                        })?;
                        sigmas += 1;
                    }
                    if n / m / 2 > PRIMITIVITY_MAX_G {
                        skipped += 1;
                        continue;
                    }
                    let lattice = overgroups(g, &delta).unwrap();
                    for t in enumerate_cm_types(&space, &iota, false).unwrap() {
                        let by_fibres = imprimitivity_witness_among(&t, &lattice).is_none();
                        ensure(is_primitive(&t) == by_fibres, || {
                            format!("(c) {spec}: verdicts differ on CM type {:?}", t.members())
                        })?;
                        types += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "(a) 10000 words, (b) n ≤ 12, (c) {types} CM types, (d) {sigmas} (Δ, σ) pairs over {frames} (ι, Δ) of {} groups; {skipped} (ι, Δ) with g > {PRIMITIVITY_MAX_G} left out of (c)",
        groups.len()
    ))
}

struct Context {
    group: FiniteGroup,
    spaces: HashMap<String, (FiniteGroup, cmred::perm::CosetSpace)>,
}

impl Context {
    fn frame(&mut self, gens: &[Permutation]) -> &(FiniteGroup, cmred::perm::CosetSpace) {
        let key: Vec<String> = gens.iter().map(ToString::to_string).collect();
        let group = &self.group;
        self.spaces.entry(key.join(";")).or_insert_with(|| {
            let delta = FiniteGroup::generate(group.degree(), gens, group.order()).unwrap();
            let space = left_cosets(group, &delta).unwrap();
            (delta, space)
        })
    }
}

fn check_record(ctx: &mut Context, r: &CorrespondenceRecord) -> Result<bool, String> {
    let g = r.g;
    let (alpha, beta) = (r.signature.alpha, r.signature.beta);
    let words: Vec<String> = r.words.expanded().map(|w| w.text()).collect();
    let total: usize = words.iter().map(String::len).sum();
    ensure(total == 2 * g, || format!("word lengths sum to {total}, not {}", 2 * g))?;
    ensure(beta <= alpha && alpha <= 2 * beta, || format!("β ≤ α ≤ 2β fails for ({alpha}, {beta})"))?;
    let mut duals: Vec<String> = words.iter().map(|w| dual(w)).collect();
    duals.sort();
    let mut sorted = words.iter().map(|w| canon(w)).collect::<Vec<_>>();
    sorted.sort();
    ensure(duals == sorted, || format!("words {words:?} not closed under duality"))?;
    ensure(r.f == words.iter().filter(|w| *w == "F").count(), || "p-rank differs from [F] count".into())?;
    ensure(r.a == words.iter().map(|w| c_count(w)).sum::<usize>(), || "a-number differs from FV count".into())?;

    let p = r.provenance.as_ref().ok_or("record without provenance")?;
    let group = ctx.group.clone();
    let (delta, space) = ctx.frame(&p.delta_generators);
    // raw words straight from the σ-cycles on the cosets
    let mut raw = Vec::new();
    let mut seen = vec![false; space.index()];
    for start in 0..space.index() {
        if seen[start] {
            continue;
        }
        let mut word = String::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            word.push(if p.cm_type.contains(&x) { 'V' } else { 'F' });
            let rep = &space.cosets()[x].representative;
            x = space.coset_of(&p.sigma.compose(rep).unwrap()).unwrap();
        }
        raw.push(word);
    }
    ensure(raw.len() == alpha, || format!("{} raw words for α = {alpha}", raw.len()))?;
    let mut factored: Vec<String> = raw
        .iter()
        .flat_map(|w| {
            let (root, k) = factor(w);
            std::iter::repeat_n(root, k)
        })
        .collect();
    factored.sort();
    ensure(factored == sorted, || format!("raw words {raw:?} do not factor to {words:?}"))?;
    let beta_partition = double_coset_count(&group, &[p.sigma.clone(), p.iota.clone()], delta).unwrap();
    ensure(beta == beta_partition, || format!("β = {beta} but the double-coset partition has {beta_partition}"))?;

    Ok(p.sigma.is_identity())
}

fn criterion_6() -> Verdict {
    let mut cases: Vec<(String, usize, DeltaChoice)> = KNOWN_GROUPS
        .iter()
        .filter_map(|k| Some((k.construction?.to_string(), k.g, DeltaChoice::Dimension(k.g))))
        .filter(|(s, _, _)| s != "wreath-c2:symmetric:5")
        .collect();
    let c2_wreath_s4 = parse_cycles_in("(1,2);(3,4);(5,6);(7,8);(1,3)(2,4);(1,3,5,7)(2,4,6,8)", 10).unwrap();
    cases.push(("wreath-c2:symmetric:5".into(), 5, DeltaChoice::Explicit(c2_wreath_s4)));
    cases.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    cases.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);

    let mut checked = 0;
    let mut without_primitive = Vec::new();
    for (spec, g, choice) in &cases {
        let group = build_group(&spec.parse().unwrap()).unwrap();
        // primitive types; every CM type when there are none
        for include_imprimitive in [false, true] {
            if include_imprimitive && without_primitive.last() != Some(&format!("{spec} (g = {g})")) {
                break;
            }
            let options = RunOptions {
                dedup: false,
                provenance: true,
                subgroup_cap: 500,
                include_imprimitive,
                ..RunOptions::default()
            };
            let out = run(&group, spec, choice, &options).map_err(|e| format!("{spec}: {e}"))?;
            if out.records.is_empty() && !include_imprimitive {
                without_primitive.push(format!("{spec} (g = {g})"));
                continue;
            }
            let mut ctx = Context {
                group: group.clone(),
                spaces: HashMap::new(),
            };
            let mut identity_rows = 0;
            for r in &out.records {
                let is_identity = check_record(&mut ctx, r).map_err(|e| format!("{spec} (g = {g}): {e}"))?;
                if is_identity {
                    identity_rows += 1;
                    let words: Vec<String> = r.words.expanded().map(|w| w.text()).collect();
                    let expected: Vec<String> = std::iter::repeat_n("F".to_string(), *g)
                        .chain(std::iter::repeat_n("V".to_string(), *g))
                        .collect();
                    ensure(
                        (r.signature.alpha, r.signature.beta, r.f, r.a) == (2 * g, *g, *g, 0) && words == expected,
                        || format!("{spec}: σ = id gives ({}, {}) {words:?}", r.signature.alpha, r.signature.beta),
                    )?;
                }
                checked += 1;
            }
            ensure(identity_rows > 0, || format!("{spec} (g = {g}): no σ = id record"))?;
        }
    }
    let note = if without_primitive.is_empty() {
        String::new()
    } else {
        format!("; no primitive CM types: {}", without_primitive.join(", "))
    };
    Ok(format!("{checked} records from {} catalog groups re-derived{note}", cases.len()))
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden").join(name)
}

fn criterion_7() -> Verdict {
    let cases: [(&str, &[&str]); 3] = [
        ("reduce_G40_12_g5.md", &["reduce", "--group", "builtin:G40_12", "--g", "5"]),
        ("reduce_wreath_s3_g3.json", &["reduce", "--group", "wreath-c2:symmetric:3", "--g", "3", "--format", "json"]),
        ("aggregate_g3.csv", &["aggregate", "--g", "3", "--groups", "cyclic:6;dihedral:12;product:alternating:4,cyclic:2;wreath-c2:symmetric:3", "--format", "csv"]),
    ];
    let mut runs = 0;
    for (golden, args) in cases {
        let outputs: Vec<String> = [Some("1"), Some("1"), Some("8"), Some("8"), None]
            .into_iter()
            .map(|t| cmred(args, t).stdout)
            .collect();
        runs += outputs.len();
        ensure(outputs.iter().all(|o| *o == outputs[0]), || format!("{args:?}: outputs differ between invocations"))?;
        let path = golden_path(golden);
        if std::env::var_os("CMRED_BLESS").is_some() {
            std::fs::write(&path, &outputs[0]).unwrap();
        }
        let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        ensure(expected == outputs[0], || format!("{args:?}: output differs from {}", path.display()))?;
    }
    Ok(format!("{runs} invocations byte-identical across CMRED_THREADS ∈ {{1, 8, unset}} and equal to golden files"))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 7] = [
        ("classification reproduction", criterion_1),
        ("worked-example reproduction", criterion_2),
        ("low-dimension tables", criterion_3),
        ("reference-table consistency", criterion_4),
        ("oracle equivalences", criterion_5),
        ("property suites", criterion_6),
        ("determinism", criterion_7),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let took = start.elapsed();
        match verdict {
            Ok(detail) => println!("criterion {} ({name}): PASS [{took:.1?}] {detail}", i + 1),
            Err(reason) => {
                failures += 1;
                println!("criterion {} ({name}): FAIL [{took:.1?}] {reason}", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
