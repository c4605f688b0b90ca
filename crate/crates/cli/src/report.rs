//! Machine-readable report (`schema = "qgalois/1"`) and its text rendering.

use std::fmt::Write as _;

use num_complex::Complex64;
use qgalois::classify::{Classification, ScalarGroup, Witness};
use qgalois::verify::{Check, Outcome};
use qgalois::Mat2;
use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "qgalois/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub q: Complex64,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    /// Whether every parameter was given in exact spiral form.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<ScalarGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<Mat2>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub paper_anchor: String,
    /// Absent for skipped checks.
    pub residual: Option<f64>,
    pub threshold: f64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub sample_size: usize,
}

impl From<&Check> for CheckRow {
    fn from(c: &Check) -> Self {
        let (status, reason) = match &c.outcome {
            Outcome::Pass => (Status::Pass, None),
            Outcome::Fail => (Status::Fail, None),
            Outcome::Skipped(r) => (Status::Skipped, Some(r.clone())),
        };
        Self {
            name: c.name.clone(),
            paper_anchor: c.anchor.clone(),
            residual: c.residual.is_finite().then_some(c.residual),
            threshold: c.threshold,
            status,
            reason,
            sample_size: c.sample_size,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub params: Params,
    pub case_tag: String,
    pub group: Group,
    pub witnesses_checked: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<Witness>>,
    pub checks: Vec<CheckRow>,
    pub symmetry_derived: bool,
    pub seed: Option<u64>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str, params: Params, cl: &Classification) -> Self {
        let family = &cl.descriptor.family;
        Self {
            schema: SCHEMA.into(),
            command: command.into(),
            params,
            case_tag: cl.tag.to_string(),
            group: Group {
                family: family.name(),
                scalar: family.scalar(),
                conjugator: family.conjugator(),
            },
            witnesses_checked: cl.descriptor.witnesses.items.len(),
            witnesses: None,
            checks: Vec::new(),
            symmetry_derived: cl.symmetry_derived(),
            seed: None,
            warnings: cl.warnings.clone(),
        }
    }

    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let p = &self.params;
        let _ = writeln!(s, "q = {}  a = {}  b = {}  c = {}", p.q, p.a, p.b, p.c);
        let _ = writeln!(s, "case:   {}", self.case_tag);
        let mut group = self.group.family.clone();
        if let Some(sc) = &self.group.scalar {
            let _ = write!(group, " (scalars {sc})");
        }
        let _ = writeln!(s, "group:  {group}");
        if let Some(r) = &self.group.conjugator {
            let _ = writeln!(s, "R:      {r}");
        }
        if self.symmetry_derived {
            let _ = writeln!(s, "note:   obtained through a parameter symmetry");
        }
        let _ = writeln!(s, "witnesses checked: {}", self.witnesses_checked);
        if let Some(ws) = &self.witnesses {
            for w in ws {
                let _ = writeln!(s, "  {:<22} {}", w.label, w.matrix);
            }
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "seed:   {seed}");
        }
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            let residual = c
                .residual
                .map_or_else(|| "-".to_string(), |r| format!("{r:.2e}"));
            let _ = write!(
                s,
                "[{status}] {:<32} {residual:>10} < {:.0e}  (n={})  {}",
                c.name, c.threshold, c.sample_size, c.paper_anchor
            );
            if let Some(r) = &c.reason {
                let _ = write!(s, "  [{r}]");
            }
            s.push('\n');
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            schema: SCHEMA.into(),
            command: "verify".into(),
            params: Params {
                q: Complex64::new(0.3, 0.0),
                a: Complex64::new(0.7, 0.1),
                b: Complex64::new(0.2, -0.5),
                c: Complex64::new(0.3, 0.0),
                exact: false,
            },
            case_tag: "C1".into(),
            group: Group {
                family: "SL2_times_scalars".into(),
                scalar: Some(ScalarGroup::FiniteCyclic(4)),
                conjugator: Some(Mat2::real(1.0, 1.0, 0.5, -0.5)),
            },
            witnesses_checked: 12,
            witnesses: Some(vec![Witness {
                label: "local0:gamma1".into(),
                matrix: Mat2::identity(),
            }]),
            checks: vec![
                CheckRow {
                    name: "system.residual".into(),
                    paper_anchor: "Y(qz) = A(z) Y(z)".into(),
                    residual: Some(1.25e-14),
                    threshold: 1e-9,
                    status: Status::Pass,
                    reason: None,
                    sample_size: 30,
                },
                CheckRow {
                    name: "connection.closed_form".into(),
                    paper_anchor: "closed form".into(),
                    residual: None,
                    threshold: 1e-8,
                    status: Status::Skipped,
                    reason: Some("empty annulus".into()),
                    sample_size: 0,
                },
            ],
            symmetry_derived: true,
            seed: Some(7),
            warnings: vec!["w".into()],
        }
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn scalar_layout() {
        let v: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v["group"]["scalar"]["kind"], "FiniteCyclic");
        assert_eq!(v["group"]["scalar"]["n"], 4);
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["checks"][1]["status"], "skipped");
        assert!(v["checks"][1]["residual"].is_null());
    }

    #[test]
    fn text_mentions_every_check() {
        let t = sample().to_text();
        assert!(t.contains("system.residual"));
        assert!(t.contains("[skip]"));
        assert!(t.contains("mu_4"));
    }
}
