//! Per-bias report: one row per ablation with its F1 drop and a heuristic
//! reading of the gap.
//!
//! A small drop means the questions stay solvable without the ablated
//! information, so the model likely leans on the bias instead. A large drop
//! means a notable share of solved questions needs that information. The
//! cutoffs are configurable heuristics, not ground truth.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ablations::{AblationId, BiasCategory, HalfSide, PerturbationRecord};
use crate::evaluation::{DeltaResult, EvalResult};

pub const KEYWORD_INSERTION: &str = "prepended with one space before a random non-answer sentence";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub small: f64,
    pub large: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { small: 10.0, large: 25.0 }
    }
}

impl Thresholds {
    /// `small < large`; false when either is NaN.
    pub fn is_ordered(&self) -> bool {
        self.small < self.large
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpretation {
    BiasLikelyExploited,
    Inconclusive,
    InformationRequired,
}

impl Interpretation {
    pub fn classify(f1_drop: f64, t: Thresholds) -> Self {
        if f1_drop < t.small {
            Interpretation::BiasLikelyExploited
        } else if f1_drop > t.large {
            Interpretation::InformationRequired
        } else {
            Interpretation::Inconclusive
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Interpretation::BiasLikelyExploited => "BiasLikelyExploited",
            Interpretation::Inconclusive => "Inconclusive",
            Interpretation::InformationRequired => "InformationRequired",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub em: f64,
    pub f1: f64,
    pub n: usize,
}

impl From<&EvalResult> for BaselineSummary {
    fn from(r: &EvalResult) -> Self {
        Self { em: r.em, f1: r.f1, n: r.question_count }
    }
}

/// Baselines per regime: the full dataset (e3, e4, e5) and the truncated
/// one (e1, e2, e6, e7, e8).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    pub full: Option<BaselineSummary>,
    pub truncated: Option<BaselineSummary>,
}

impl Baselines {
    pub fn for_ablation(&self, id: AblationId) -> Option<BaselineSummary> {
        if id.spec().requires_truncated {
            self.truncated
        } else {
            self.full
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportSettings {
    pub half: HalfSide,
    pub keyword_insertion: String,
}

impl Default for ReportSettings {
    fn default() -> Self {
        Self { half: HalfSide::First, keyword_insertion: KEYWORD_INSERTION.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub ablation: AblationId,
    pub name: String,
    pub category: BiasCategory,
    pub em: f64,
    pub f1: f64,
    pub f1_drop: f64,
    pub n: usize,
    pub skipped_count: usize,
    pub interpretation: Interpretation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub toolkit_version: String,
    pub global_seed: u64,
    pub settings: ReportSettings,
    pub thresholds: Thresholds,
    pub baselines: Baselines,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("thresholds must satisfy small < large (got small={small}, large={large})")]
    ThresholdOrder { small: f64, large: f64 },
    #[error("{0} appears more than once")]
    DuplicateAblation(AblationId),
    #[error("{ablation} needs the {regime} baseline, which was not provided")]
    MissingBaseline { ablation: AblationId, regime: &'static str },
    #[error("{ablation} was paired with baseline f1 {got}, but its {regime} baseline is {expected}")]
    RegimeMismatch { ablation: AblationId, regime: &'static str, expected: f64, got: f64 },
    #[error("no perturbation records for {0}")]
    MissingRecords(AblationId),
}

fn regime(id: AblationId) -> &'static str {
    if id.spec().requires_truncated {
        "truncated"
    } else {
        "full"
    }
}

pub struct ReportInputs<'a> {
    pub deltas: &'a [DeltaResult],
    pub records: &'a BTreeMap<AblationId, Vec<PerturbationRecord>>,
    pub baselines: Baselines,
    pub thresholds: Thresholds,
    pub global_seed: u64,
    pub settings: ReportSettings,
}

pub fn build_report(inputs: ReportInputs<'_>) -> Result<BiasReport, ReportError> {
    let t = inputs.thresholds;
    if !t.is_ordered() {
        return Err(ReportError::ThresholdOrder { small: t.small, large: t.large });
    }
    let mut deltas: Vec<DeltaResult> = inputs.deltas.to_vec();
    deltas.sort_by_key(|d| d.ablation);
    if let Some(w) = deltas.windows(2).find(|w| w[0].ablation == w[1].ablation) {
        return Err(ReportError::DuplicateAblation(w[0].ablation));
    }
    let mut rows = Vec::with_capacity(deltas.len());
    for d in deltas {
        let id = d.ablation;
        let baseline = inputs
            .baselines
            .for_ablation(id)
            .ok_or(ReportError::MissingBaseline { ablation: id, regime: regime(id) })?;
        if (baseline.f1 - d.baseline_f1).abs() > 1e-9 {
            return Err(ReportError::RegimeMismatch {
                ablation: id,
                regime: regime(id),
                expected: baseline.f1,
                got: d.baseline_f1,
            });
        }
        let records = inputs.records.get(&id).ok_or(ReportError::MissingRecords(id))?;
        let spec = id.spec();
        rows.push(ReportRow {
            ablation: id,
            name: spec.name.to_string(),
            category: spec.category,
            em: d.em,
            f1: d.f1,
            f1_drop: d.f1_drop,
            n: records.len(),
            skipped_count: records.iter().filter(|r| !r.applied).count(),
            interpretation: Interpretation::classify(d.f1_drop, t),
        });
    }
    Ok(BiasReport {
        toolkit_version: crate::TOOLKIT_VERSION.to_string(),
        global_seed: inputs.global_seed,
        settings: inputs.settings,
        thresholds: t,
        baselines: inputs.baselines,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Json,
}

pub fn render(report: &BiasReport, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serialization cannot fail");
            out.push(b'\n');
            out
        }
        Format::Markdown => render_markdown(report).into_bytes(),
    }
}

fn render_markdown(r: &BiasReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Dataset bias report\n");
    let _ = writeln!(s, "- toolkit version: {}", r.toolkit_version);
    let _ = writeln!(s, "- seed: {}", r.global_seed);
    let _ = writeln!(s, "- half question (e2): {}", r.settings.half);
    let _ = writeln!(s, "- keyword insertion (e6-e8): {}", r.settings.keyword_insertion);
    let _ = writeln!(
        s,
        "- thresholds (f1 drop, points): small < {:.2}, large > {:.2}",
        r.thresholds.small, r.thresholds.large
    );
    for (label, b) in [("full", r.baselines.full), ("truncated", r.baselines.truncated)] {
        match b {
            Some(b) => {
                let _ = writeln!(s, "- baseline ({label}): em {:.2}, f1 {:.2}, n {}", b.em, b.f1, b.n);
            }
            None => {
                let _ = writeln!(s, "- baseline ({label}): not computed");
            }
        }
    }
    for category in BiasCategory::ALL {
        let _ = writeln!(s, "\n## {}\n", category.label());
        let _ = writeln!(s, "| ablation | em | f1 | f1 drop | n | skipped | interpretation |");
        let _ = writeln!(s, "|---|---|---|---|---|---|---|");
        for row in r.rows.iter().filter(|row| row.category == category) {
            let _ = writeln!(
                s,
                "| {} {} | {:.2} | {:.2} | {:.2} | {} | {} | {} |",
                row.ablation,
                row.name,
                row.em,
                row.f1,
                row.f1_drop,
                row.n,
                row.skipped_count,
                row.interpretation.as_str()
            );
        }
    }
    let _ = writeln!(s, "\nBiasLikelyExploited: small gap, questions stay solvable without the ablated information.");
    let _ = writeln!(s, "InformationRequired: large gap, many solved questions need the ablated information.");
    s
}

pub fn report_from_json(bytes: &[u8]) -> Result<BiasReport, serde_json::Error> {
    serde_json::from_slice(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::drop_from_scores;

    fn records(n: usize, skipped: usize) -> Vec<PerturbationRecord> {
        (0..n)
            .map(|i| PerturbationRecord {
                question_id: format!("q{i}"),
                applied: i >= skipped,
                target_sentence_index: None,
                inserted_text: None,
                skip_reason: (i < skipped).then_some(crate::ablations::SkipReason::NoEligibleSentence),
                seed: 0,
            })
            .collect()
    }

    fn sample_report() -> BiasReport {
        let full = BaselineSummary { em: 72.0, f1: 80.61, n: 10570 };
        let truncated = BaselineSummary { em: 71.0, f1: 79.75, n: 1943 };
        let deltas = vec![
            drop_from_scores(79.75, 39.72, 48.82, AblationId::E1),
            drop_from_scores(79.75, 53.36, 64.13, AblationId::E2),
            drop_from_scores(80.61, 66.19, 74.48, AblationId::E3),
        ];
        let mut recs = BTreeMap::new();
        recs.insert(AblationId::E1, records(1943, 3));
        recs.insert(AblationId::E2, records(1943, 3));
        recs.insert(AblationId::E3, records(10570, 0));
        build_report(ReportInputs {
            deltas: &deltas,
            records: &recs,
            baselines: Baselines { full: Some(full), truncated: Some(truncated) },
            thresholds: Thresholds::default(),
            global_seed: 42,
            settings: ReportSettings::default(),
        })
        .unwrap()
    }

    #[test]
    fn interpretation_buckets() {
        let t = Thresholds::default();
        assert_eq!(Interpretation::classify(6.13, t), Interpretation::BiasLikelyExploited);
        assert_eq!(Interpretation::classify(30.93, t), Interpretation::InformationRequired);
        assert_eq!(Interpretation::classify(15.62, t), Interpretation::Inconclusive);
        assert_eq!(Interpretation::classify(10.0, t), Interpretation::Inconclusive);
        assert_eq!(Interpretation::classify(25.0, t), Interpretation::Inconclusive);
    }

    #[test]
    fn rows_from_sample_values() {
        let r = sample_report();
        let labels: Vec<Interpretation> = r.rows.iter().map(|row| row.interpretation).collect();
        assert_eq!(
            labels,
            [Interpretation::InformationRequired, Interpretation::Inconclusive, Interpretation::BiasLikelyExploited]
        );
        assert_eq!(r.rows[0].n, 1943);
        assert_eq!(r.rows[0].skipped_count, 3);
        let md = String::from_utf8(render(&r, Format::Markdown)).unwrap();
        assert!(md.contains("insert full question | 39.72 | 48.82 | 30.93"), "{md}");
    }

    #[test]
    fn empty_report_has_header_only_tables() {
        let r = build_report(ReportInputs {
            deltas: &[],
            records: &BTreeMap::new(),
            baselines: Baselines::default(),
            thresholds: Thresholds::default(),
            global_seed: 1,
            settings: ReportSettings::default(),
        })
        .unwrap();
        let md = String::from_utf8(render(&r, Format::Markdown)).unwrap();
        assert_eq!(md.matches("| ablation | em | f1 | f1 drop |").count(), 3);
        assert_eq!(md.matches("\n| e").count(), 0);
    }

    #[test]
    fn json_round_trip() {
        let r = sample_report();
        assert_eq!(report_from_json(&render(&r, Format::Json)).unwrap(), r);
    }

    #[test]
    fn rejects_bad_inputs() {
        let recs: BTreeMap<_, _> = [(AblationId::E1, records(2, 0))].into_iter().collect();
        let base = Baselines {
            full: Some(BaselineSummary { em: 0.0, f1: 80.61, n: 2 }),
            truncated: Some(BaselineSummary { em: 0.0, f1: 79.75, n: 2 }),
        };
        let inputs = |deltas, thresholds| ReportInputs {
            deltas,
            records: &recs,
            baselines: base,
            thresholds,
            global_seed: 0,
            settings: ReportSettings::default(),
        };
        let wrong_regime = [drop_from_scores(80.61, 1.0, 2.0, AblationId::E1)];
        assert!(matches!(
            build_report(inputs(&wrong_regime, Thresholds::default())),
            Err(ReportError::RegimeMismatch { regime: "truncated", .. })
        ));
        let ok = [drop_from_scores(79.75, 1.0, 2.0, AblationId::E1)];
        assert!(matches!(
            build_report(inputs(&ok, Thresholds { small: 5.0, large: 5.0 })),
            Err(ReportError::ThresholdOrder { .. })
        ));
        let dup = [ok[0], ok[0]];
        assert_eq!(
            build_report(inputs(&dup, Thresholds::default())),
            Err(ReportError::DuplicateAblation(AblationId::E1))
        );
        let no_records = [drop_from_scores(80.61, 1.0, 2.0, AblationId::E3)];
        assert_eq!(
            build_report(inputs(&no_records, Thresholds::default())),
            Err(ReportError::MissingRecords(AblationId::E3))
        );
    }
}
