use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::algebra::{CMatrix, GaussRat, Poly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Text(String),
    List(Vec<String>),
    Table(Vec<Vec<String>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evidence {
    pub label: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    /// `sha256:<hex>` of the input file, or `none`.
    pub input: String,
    pub seed: Option<u64>,
    pub version: String,
}

/// Outcome of one CLI task. Text and JSON renderings carry the same fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub task: String,
    pub verdict: String,
    pub evidence: Vec<Evidence>,
    pub notes: Vec<String>,
    pub provenance: Provenance,
}

pub fn hash_input(bytes: Option<&[u8]>) -> String {
    match bytes {
        None => "none".into(),
        Some(b) => {
            let digest = Sha256::digest(b);
            let mut s = String::from("sha256:");
            for byte in digest {
                let _ = write!(s, "{byte:02x}");
            }
            s
        }
    }
}

impl Report {
    pub fn new(task: &str) -> Self {
        Report {
            task: task.into(),
            verdict: String::new(),
            evidence: Vec::new(),
            notes: Vec::new(),
            provenance: Provenance {
                input: "none".into(),
                seed: None,
                version: env!("CARGO_PKG_VERSION").into(),
            },
        }
    }

    pub fn text(&mut self, label: &str, v: impl ToString) -> &mut Self {
        self.evidence.push(Evidence {
            label: label.into(),
            value: Value::Text(v.to_string()),
        });
        self
    }

    pub fn list<T: ToString>(
        &mut self,
        label: &str,
        items: impl IntoIterator<Item = T>,
    ) -> &mut Self {
        let v = items.into_iter().map(|x| x.to_string()).collect();
        self.evidence.push(Evidence {
            label: label.into(),
            value: Value::List(v),
        });
        self
    }

    pub fn polys<'a>(&mut self, label: &str, ps: impl IntoIterator<Item = &'a Poly>) -> &mut Self {
        self.list(label, ps)
    }

    pub fn table(&mut self, label: &str, rows: Vec<Vec<String>>) -> &mut Self {
        self.evidence.push(Evidence {
            label: label.into(),
            value: Value::Table(rows),
        });
        self
    }

    pub fn matrix(&mut self, label: &str, m: &CMatrix) -> &mut Self {
        let rows = (0..m.rows())
            .map(|i| m.row(i).iter().map(GaussRat::to_string).collect())
            .collect();
        self.table(label, rows)
    }

    pub fn note(&mut self, n: impl Into<String>) -> &mut Self {
        self.notes.push(n.into());
        self
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "task: {}", self.task);
        let _ = writeln!(s, "verdict: {}", self.verdict);
        if !self.evidence.is_empty() {
            s.push_str("evidence:\n");
        }
        for e in &self.evidence {
            match &e.value {
                Value::Text(t) => {
                    let _ = writeln!(s, "  {}: {}", e.label, t);
                }
                Value::List(items) => {
                    let _ = writeln!(s, "  {}:", e.label);
                    if items.is_empty() {
                        s.push_str("    (none)\n");
                    }
                    for it in items {
                        let _ = writeln!(s, "    - {it}");
                    }
                }
                Value::Table(rows) => {
                    let _ = writeln!(s, "  {}:", e.label);
                    for r in rows {
                        let _ = writeln!(s, "    [{}]", r.join(", "));
                    }
                }
            }
        }
        if !self.notes.is_empty() {
            s.push_str("notes:\n");
            for n in &self.notes {
                let _ = writeln!(s, "  - {n}");
            }
        }
        s.push_str("provenance:\n");
        let _ = writeln!(s, "  input: {}", self.provenance.input);
        let seed = self
            .provenance
            .seed
            .map_or("-".to_string(), |x| x.to_string());
        let _ = writeln!(s, "  seed: {seed}");
        let _ = writeln!(s, "  version: {}", self.provenance.version);
        s
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_agree() {
        let mut r = Report::new("classify");
        r.verdict = "Type5".into();
        r.text("n", 2)
            .list("minors", ["z1", "0"])
            .table("A", vec![vec!["1".into(), "0".into()]]);
        r.note("quadratic part vanishes");
        let t = r.render_text();
        assert!(t.contains("verdict: Type5\n"));
        assert!(t.contains("    - z1\n"));
        let v: serde_json::Value = serde_json::from_str(&r.render_json()).unwrap();
        assert_eq!(v["evidence"][1]["value"][0], "z1");
        assert_eq!(v["provenance"]["input"], "none");
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            hash_input(Some(b"abc")),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
