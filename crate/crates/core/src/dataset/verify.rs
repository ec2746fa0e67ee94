//! Post-hoc re-checking of a dataset directory against the oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{io_err, read_manifest_file, read_scenes, sha256_hex, DatasetError, Split, SPLITS};
use crate::program::{brute_force_answer, check_degenerate_brute_force, Outcome};
use crate::scene::Scene;
use crate::template::{builtin_catalog, QuestionRecord, Template};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    MalformedRecord,
    UnknownScene,
    WrongSplit,
    DuplicateQuestionId,
    MalformedProgram,
    IllPosed,
    WrongAnswer,
    AnswerOutsideType,
    Degenerate,
    TemplateMismatch,
    SceneInvariant,
    SplitOverlap,
    SplitCoverage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub question_id: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scene_id: Option<u64>,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n_scenes: usize,
    pub n_questions: usize,
    pub violations: Vec<Violation>,
    /// Digest mismatches and other non-semantic findings.
    pub warnings: Vec<String>,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// First failing check for one record, if any.
fn check_record(
    r: &QuestionRecord,
    split: Split,
    scenes: &BTreeMap<u64, &Scene>,
    split_of: &BTreeMap<u64, Vec<Split>>,
    catalog: &BTreeMap<&str, &Template>,
) -> Option<(ViolationKind, String)> {
    let Some(scene) = scenes.get(&r.scene_id) else {
        return Some((
            ViolationKind::UnknownScene,
            format!("scene {} not in scenes.json", r.scene_id),
        ));
    };
    if !split_of
        .get(&r.scene_id)
        .is_some_and(|s| s.contains(&split))
    {
        return Some((
            ViolationKind::WrongSplit,
            format!(
                "scene {} is not in the {} split",
                r.scene_id,
                split.as_str()
            ),
        ));
    }
    let outcome = match brute_force_answer(&r.program, scene) {
        Ok(o) => o,
        Err(e) => return Some((ViolationKind::MalformedProgram, e.to_string())),
    };
    match outcome {
        Outcome::IllPosed => {
            return Some((ViolationKind::IllPosed, "a unique node is ambiguous".into()))
        }
        Outcome::Answer(a) if a != r.answer => {
            return Some((
                ViolationKind::WrongAnswer,
                format!("stored '{}', oracle '{a}'", r.answer),
            ))
        }
        Outcome::Answer(_) => {}
    }
    if !r.question_type.admits(&r.answer) {
        return Some((
            ViolationKind::AnswerOutsideType,
            format!("'{}' is not a {} answer", r.answer, r.question_type),
        ));
    }
    match check_degenerate_brute_force(&r.program, scene) {
        Ok(false) => {}
        Ok(true) => {
            return Some((
                ViolationKind::Degenerate,
                "answerable without its relation".into(),
            ))
        }
        Err(e) => return Some((ViolationKind::MalformedProgram, e.to_string())),
    }
    let Some(template) = catalog.get(r.template_id.as_str()) else {
        return Some((
            ViolationKind::TemplateMismatch,
            format!("unknown template '{}'", r.template_id),
        ));
    };
    match template.instantiate(&r.bindings) {
        Ok((text, program))
            if text == r.text
                && program == r.program
                && template.question_type == r.question_type =>
        {
            None
        }
        Ok(_) => Some((
            ViolationKind::TemplateMismatch,
            "text, program or type differ from the template instantiation".into(),
        )),
        Err(e) => Some((ViolationKind::TemplateMismatch, e.to_string())),
    }
}

/// Re-checks every stored question with the brute-force oracle, plus split
/// disjointness and coverage. Each bad record yields one violation.
pub fn verify_dataset(dir: &Path) -> Result<VerificationReport, DatasetError> {
    let manifest = read_manifest_file(dir)?;
    let scenes = read_scenes(dir)?;
    let mut report = VerificationReport {
        n_scenes: scenes.len(),
        ..Default::default()
    };

    for (rel, expected) in &manifest.digests {
        let path = dir.join(rel);
        match fs::read(&path) {
            Ok(bytes) if sha256_hex(&bytes) == *expected => {}
            Ok(_) => report
                .warnings
                .push(format!("{rel}: content digest differs from the manifest")),
            Err(e) => report.warnings.push(format!("{rel}: {e}")),
        }
    }

    let by_id: BTreeMap<u64, &Scene> = scenes.iter().map(|s| (s.scene_id, s)).collect();
    for s in &scenes {
        if let Err(e) = s.validate() {
            report.violations.push(Violation {
                kind: ViolationKind::SceneInvariant,
                question_id: None,
                scene_id: Some(s.scene_id),
                detail: e.to_string(),
            });
        }
    }

    let mut split_of: BTreeMap<u64, Vec<Split>> = BTreeMap::new();
    for (split, ids) in &manifest.splits {
        for &id in ids {
            split_of.entry(id).or_default().push(*split);
        }
    }
    for (id, splits) in &split_of {
        if splits.len() > 1 {
            let names: Vec<&str> = splits.iter().map(|s| s.as_str()).collect();
            report.violations.push(Violation {
                kind: ViolationKind::SplitOverlap,
                question_id: None,
                scene_id: Some(*id),
                detail: format!("scene {id} appears in {}", names.join(", ")),
            });
        }
    }
    let listed: BTreeSet<u64> = split_of.keys().copied().collect();
    let all: BTreeSet<u64> = by_id.keys().copied().collect();
    for id in all.symmetric_difference(&listed) {
        report.violations.push(Violation {
            kind: ViolationKind::SplitCoverage,
            question_id: None,
            scene_id: Some(*id),
            detail: if all.contains(id) {
                format!("scene {id} is in no split")
            } else {
                format!("split lists unknown scene {id}")
            },
        });
    }

    let templates = builtin_catalog();
    let catalog: BTreeMap<&str, &Template> = templates
        .iter()
        .map(|t| (t.template_id.as_str(), t))
        .collect();
    let mut seen_ids = BTreeSet::new();
    for split in SPLITS {
        let path = dir.join(split.questions_file());
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        for (line_no, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            report.n_questions += 1;
            let record: QuestionRecord = match serde_json::from_str(line) {
                Ok(r) => r,
                Err(e) => {
                    let question_id = serde_json::from_str::<serde_json::Value>(line)
                        .ok()
                        .and_then(|v| v.get("question_id").and_then(|q| q.as_u64()));
                    report.violations.push(Violation {
                        kind: ViolationKind::MalformedRecord,
                        question_id,
                        scene_id: None,
                        detail: format!("{}:{}: {e}", split.questions_file(), line_no + 1),
                    });
                    continue;
                }
            };
            let found = if !seen_ids.insert(record.question_id) {
                Some((
                    ViolationKind::DuplicateQuestionId,
                    "question_id appears more than once".into(),
                ))
            } else {
                check_record(&record, split, &by_id, &split_of, &catalog)
            };
            if let Some((kind, detail)) = found {
                report.violations.push(Violation {
                    kind,
                    question_id: Some(record.question_id),
                    scene_id: Some(record.scene_id),
                    detail,
                });
            }
        }
    }
    Ok(report)
}
