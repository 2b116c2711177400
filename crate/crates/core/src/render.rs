//! Output documents: markdown tables, CSV and JSON, plus a JSON reader.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::catalog::{format_cycles, KNOWN_GROUPS};
use crate::error::{Error, Result};
use crate::pipeline::{reference_violation, ClassificationEntry, CorrespondenceRecord, REFERENCE_MAX_G};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[value(name = "md")]
    Markdown,
    Csv,
    Json,
}

/// Run metadata echoed into every document.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub orientation: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub group: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl Meta {
    pub fn new(command: &str, orientation: &str) -> Meta {
        Meta {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            orientation: orientation.into(),
            ..Meta::default()
        }
    }

    fn comment(&self) -> String {
        let mut parts = vec![format!("{} {} {}", self.tool, self.version, self.command)];
        if let Some(group) = &self.group {
            parts.push(format!("group {group}"));
        }
        if let Some(g) = self.g {
            parts.push(format!("g {g}"));
        }
        if let Some(delta) = &self.delta {
            parts.push(format!("delta {delta}"));
        }
        parts.push(format!("orientation {}", self.orientation));
        parts.extend(self.flags.iter().cloned());
        parts.extend(self.notes.iter().cloned());
        format!("<!-- {} -->\n", parts.join(" | "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonPiece {
    pub words: Vec<String>,
    pub name: String,
    pub a: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonProvenance {
    pub iota: String,
    pub delta: String,
    pub cm_type: Vec<usize>,
    pub sigma: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonRecord {
    pub group: String,
    pub alpha: usize,
    pub beta: usize,
    pub signature: String,
    /// Residue degrees: conjugate pairs first, then self-conjugate primes.
    pub degrees: Vec<usize>,
    pub words: Vec<String>,
    pub pieces: Vec<JsonPiece>,
    pub scheme: String,
    pub f: usize,
    pub a: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub provenance: Option<JsonProvenance>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordDocument {
    pub meta: Meta,
    pub records: Vec<JsonRecord>,
}

fn perm_text(p: &crate::perm::Permutation) -> String {
    p.to_string()
}

pub fn json_record(r: &CorrespondenceRecord) -> JsonRecord {
    JsonRecord {
        group: r.group_label.clone(),
        alpha: r.signature.alpha,
        beta: r.signature.beta,
        signature: r.signature.label(),
        degrees: r.signature.profile.iter().map(|p| p.degree).collect(),
        words: r.words.expanded().map(ToString::to_string).collect(),
        pieces: r
            .pieces
            .iter()
            .map(|p| JsonPiece {
                words: p.words().iter().map(ToString::to_string).collect(),
                name: crate::pipeline::name_piece(p).to_string(),
                a: p.a_number(),
            })
            .collect(),
        scheme: r.scheme(),
        f: r.f,
        a: r.a,
        provenance: r.provenance.as_ref().map(|p| JsonProvenance {
            iota: perm_text(&p.iota),
            delta: format_cycles(p.iota.degree(), &p.delta_generators),
            cm_type: p.cm_type.clone(),
            sigma: perm_text(&p.sigma),
        }),
    }
}

fn json_text<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Internal(format!("csv: {e}")))
}

fn md_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = format!("| {} |\n", header.join(" | "));
    s.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.replace('|', "\\|")).collect();
        s.push_str(&format!("| {} |\n", cells.join(" | ")));
    }
    s
}

const RECORD_HEADER: &[&str] = &[
    "ideal decomposition",
    "circular words",
    "group scheme decomposition",
    "p-rank",
    "a-number",
];

/// Correspondence records as a document.
pub fn render_records(meta: &Meta, records: &[CorrespondenceRecord], format: Format) -> Result<String> {
    let json: Vec<JsonRecord> = records.iter().map(json_record).collect();
    let provenance = json.iter().any(|r| r.provenance.is_some());
    match format {
        Format::Json => json_text(&RecordDocument {
            meta: meta.clone(),
            records: json,
        }),
        Format::Markdown => {
            let mut header = RECORD_HEADER.to_vec();
            if provenance {
                header.push("provenance");
            }
            let rows = json.iter().map(|r| {
                let mut row = vec![
                    r.signature.clone(),
                    r.words.join(", "),
                    r.scheme.clone(),
                    r.f.to_string(),
                    r.a.to_string(),
                ];
                if let Some(p) = &r.provenance {
                    row.push(format!("ι={} Δ=⟨{}⟩ S¹={:?} σ={}", p.iota, p.delta, p.cm_type, p.sigma));
                }
                row
            });
            Ok(format!("{}{}", meta.comment(), md_table(&header, rows)))
        }
        Format::Csv => {
            let mut header = vec!["group", "alpha", "beta", "signature", "degrees", "words", "scheme", "f", "a"];
            if provenance {
                header.extend(["iota", "delta", "cm_type", "sigma"]);
            }
            let rows = json.iter().map(|r| {
                let mut row = vec![
                    r.group.clone(),
                    r.alpha.to_string(),
                    r.beta.to_string(),
                    r.signature.clone(),
                    join(&r.degrees, " "),
                    r.words.join(" "),
                    r.scheme.clone(),
                    r.f.to_string(),
                    r.a.to_string(),
                ];
                if let Some(p) = &r.provenance {
                    row.extend([p.iota.clone(), p.delta.clone(), join(&p.cm_type, " "), p.sigma.clone()]);
                }
                row
            });
            csv_text(&header, rows)
        }
    }
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

/// Reads a JSON record document back.
pub fn read_record_document(text: &str) -> Result<RecordDocument> {
    serde_json::from_str(text).map_err(|e| Error::parse(0, format!("malformed record document: {e}")))
}

/// Comparable content of a record row: signature, words, scheme, f, a.
pub type RowKey = (usize, usize, String, String, usize, usize);

pub fn row_keys_from_json(doc: &RecordDocument) -> Vec<RowKey> {
    doc.records
        .iter()
        .map(|r| (r.alpha, r.beta, r.words.join(" "), r.scheme.clone(), r.f, r.a))
        .collect()
}

/// Reads the CSV rendering back into row keys.
pub fn row_keys_from_csv(text: &str) -> Result<Vec<RowKey>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let bad = |e: String| Error::parse(0, format!("malformed record csv: {e}"));
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| bad(format!("missing column {name}")));
    let (alpha, beta, words, scheme, f, a) = (col("alpha")?, col("beta")?, col("words")?, col("scheme")?, col("f")?, col("a")?);
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| row[i].parse::<usize>().map_err(|e| bad(e.to_string()));
        out.push((num(alpha)?, num(beta)?, row[words].to_string(), row[scheme].to_string(), num(f)?, num(a)?));
    }
    Ok(out)
}

/// Reads the markdown rendering back into `(signature label, words,
/// scheme, f, a)` rows.
pub fn rows_from_markdown(text: &str) -> Vec<(String, String, String, usize, usize)> {
    text.lines()
        .filter(|l| l.starts_with("| ") && !l.starts_with("| ideal decomposition"))
        .filter_map(|l| {
            let cells: Vec<&str> = l.trim_matches('|').split(" | ").map(str::trim).collect();
            Some((
                cells.first()?.to_string(),
                cells.get(1)?.replace(", ", " "),
                cells.get(2)?.to_string(),
                cells.get(3)?.parse().ok()?,
                cells.get(4)?.parse().ok()?,
            ))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonClassificationEntry {
    pub words: Vec<String>,
    pub a: usize,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationDocument {
    pub meta: Meta,
    pub pieces: Vec<JsonClassificationEntry>,
}

pub fn render_classification(meta: &Meta, entries: &[ClassificationEntry], format: Format) -> Result<String> {
    let json: Vec<JsonClassificationEntry> = entries
        .iter()
        .map(|e| JsonClassificationEntry {
            words: e.piece.words().iter().map(ToString::to_string).collect(),
            a: e.a,
            name: e.name.to_string(),
        })
        .collect();
    let rows = json.iter().map(|e| vec![e.words.join(", "), e.name.clone(), e.a.to_string()]);
    match format {
        Format::Json => json_text(&ClassificationDocument {
            meta: meta.clone(),
            pieces: json.clone(),
        }),
        Format::Markdown => Ok(format!(
            "{}{}",
            meta.comment(),
            md_table(&["circular words", "group scheme", "a-number"], rows)
        )),
        Format::Csv => csv_text(&["words", "name", "a"], json.iter().map(|e| vec![e.words.join(" "), e.name.clone(), e.a.to_string()])),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonPair {
    pub f: usize,
    pub a: usize,
    pub alpha: usize,
    pub beta: usize,
    pub in_reference: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateDocument {
    pub meta: Meta,
    pub pairs: Vec<JsonPair>,
    /// `PASS`, `FAIL`, or `N/A` above the reference table's range.
    pub reference_check: String,
}

/// Verdict of the subset check against the reference table.
pub fn reference_verdict(g: usize, pairs: &BTreeSet<((usize, usize), (usize, usize))>) -> &'static str {
    if g > REFERENCE_MAX_G {
        "N/A"
    } else if pairs
        .iter()
        .all(|&((f, a), (alpha, beta))| reference_violation(f, a, alpha, beta).is_none())
    {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn render_aggregate(
    meta: &Meta,
    g: usize,
    pairs: &BTreeSet<((usize, usize), (usize, usize))>,
    format: Format,
) -> Result<String> {
    let json: Vec<JsonPair> = pairs
        .iter()
        .map(|&((f, a), (alpha, beta))| JsonPair {
            f,
            a,
            alpha,
            beta,
            in_reference: reference_violation(f, a, alpha, beta).is_none(),
        })
        .collect();
    let verdict = reference_verdict(g, pairs);
    match format {
        Format::Json => json_text(&AggregateDocument {
            meta: meta.clone(),
            pairs: json,
            reference_check: verdict.into(),
        }),
        Format::Markdown => {
            let rows = json.iter().map(|p| {
                vec![
                    p.f.to_string(),
                    p.a.to_string(),
                    format!("({}, {})", p.alpha, p.beta),
                    if p.in_reference { "yes" } else { "no" }.to_string(),
                ]
            });
            Ok(format!(
                "{}{}\nreference check: {verdict}\n",
                meta.comment(),
                md_table(&["p-rank", "a-number", "decomposition type", "in reference table"], rows)
            ))
        }
        Format::Csv => {
            let rows = json.iter().map(|p| {
                vec![
                    p.f.to_string(),
                    p.a.to_string(),
                    p.alpha.to_string(),
                    p.beta.to_string(),
                    p.in_reference.to_string(),
                ]
            });
            csv_text(&["f", "a", "alpha", "beta", "in_reference"], rows)
        }
    }
}

pub fn render_group_list(meta: &Meta, format: Format) -> Result<String> {
    #[derive(Serialize)]
    struct Entry {
        g: usize,
        label: &'static str,
        construction: Option<&'static str>,
        note: &'static str,
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        meta: &'a Meta,
        groups: Vec<Entry>,
    }
    let entries: Vec<Entry> = KNOWN_GROUPS
        .iter()
        .map(|k| Entry {
            g: k.g,
            label: k.gap_label,
            construction: k.construction,
            note: k.note,
        })
        .collect();
    let rows = || {
        entries.iter().map(|e| {
            vec![
                e.g.to_string(),
                e.label.to_string(),
                e.construction.unwrap_or("-").to_string(),
                e.note.to_string(),
            ]
        })
    };
    match format {
        Format::Json => json_text(&Doc { meta, groups: entries }),
        Format::Markdown => Ok(format!(
            "{}{}",
            meta.comment(),
            md_table(&["g", "label", "construction", "note"], rows())
        )),
        Format::Csv => csv_text(&["g", "label", "construction", "note"], rows()),
    }
}
