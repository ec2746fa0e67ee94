//! Scoring of external predictions and reference baselines.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};

use crate::program::{Answer, QuestionType};
use crate::rng::rng_from;
use crate::template::QuestionRecord;

/// Confusion-matrix column for gold questions without a prediction.
pub const MISSING: &str = "<missing>";

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("question_id {0} is predicted more than once")]
    DuplicateQuestionId(u64),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {detail}")]
    Parse { path: String, detail: String },
}

/// Predicted answer strings keyed by question id.
pub type PredictionSet = BTreeMap<u64, String>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionLine {
    pub question_id: u64,
    pub answer: String,
}

/// Reads JSON-lines predictions; a repeated question id is an error.
pub fn read_predictions(path: &Path) -> Result<PredictionSet, EvalError> {
    let text = fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str::<PredictionLine>(l).map_err(|e| EvalError::Parse {
                path: format!("{}:{}", path.display(), i + 1),
                detail: e.to_string(),
            })
        });
    predictions_from(lines.collect::<Result<Vec<_>, _>>()?)
}

pub fn predictions_from(
    lines: impl IntoIterator<Item = PredictionLine>,
) -> Result<PredictionSet, EvalError> {
    let mut out = PredictionSet::new();
    for p in lines {
        if out.insert(p.question_id, p.answer).is_some() {
            return Err(EvalError::DuplicateQuestionId(p.question_id));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeCounts {
    pub correct: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub overall_accuracy: f64,
    pub per_type_accuracy: BTreeMap<QuestionType, f64>,
    pub per_type_counts: BTreeMap<QuestionType, TypeCounts>,
    /// Gold questions scored; missing predictions are scored as wrong.
    pub n_scored: usize,
    pub n_correct: usize,
    pub n_missing: usize,
    pub n_out_of_vocabulary: usize,
    /// Predictions whose question id is not in the gold set.
    pub n_unmatched: usize,
    /// gold answer -> predicted answer -> count.
    pub answer_confusion: BTreeMap<String, BTreeMap<String, usize>>,
}

impl EvalReport {
    /// Fixed-width table of per-type and overall accuracy.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<20} {:>8} {:>8} {:>9}",
            "question type", "correct", "total", "accuracy"
        );
        for (qt, c) in &self.per_type_counts {
            let _ = writeln!(
                s,
                "{:<20} {:>8} {:>8} {:>8.2}%",
                qt.as_str(),
                c.correct,
                c.total,
                100.0 * self.per_type_accuracy[qt]
            );
        }
        let _ = writeln!(
            s,
            "{:<20} {:>8} {:>8} {:>8.2}%",
            "overall",
            self.n_correct,
            self.n_scored,
            100.0 * self.overall_accuracy
        );
        let _ = writeln!(
            s,
            "missing: {}  out of vocabulary: {}  unmatched: {}",
            self.n_missing, self.n_out_of_vocabulary, self.n_unmatched
        );
        s
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores predictions against gold records by canonicalized exact match.
pub fn score(predictions: &PredictionSet, gold: &[QuestionRecord]) -> EvalReport {
    let mut per_type: BTreeMap<QuestionType, TypeCounts> = BTreeMap::new();
    let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let (mut missing, mut oov) = (0, 0);
    for g in gold {
        let counts = per_type.entry(g.question_type).or_default();
        counts.total += 1;
        let column = match predictions.get(&g.question_id) {
            None => {
                missing += 1;
                MISSING.to_string()
            }
            Some(raw) => match Answer::parse_canonical(raw) {
                Some(a) => {
                    if a == g.answer {
                        counts.correct += 1;
                    }
                    a.to_string()
                }
                None => {
                    oov += 1;
                    raw.trim().to_string()
                }
            },
        };
        *confusion
            .entry(g.answer.to_string())
            .or_default()
            .entry(column)
            .or_default() += 1;
    }
    let gold_ids: std::collections::BTreeSet<u64> = gold.iter().map(|g| g.question_id).collect();
    let n_correct = per_type.values().map(|c| c.correct).sum();
    EvalReport {
        overall_accuracy: ratio(n_correct, gold.len()),
        per_type_accuracy: per_type
            .iter()
            .map(|(t, c)| (*t, ratio(c.correct, c.total)))
            .collect(),
        per_type_counts: per_type,
        n_scored: gold.len(),
        n_correct,
        n_missing: missing,
        n_out_of_vocabulary: oov,
        n_unmatched: predictions
            .keys()
            .filter(|id| !gold_ids.contains(id))
            .count(),
        answer_confusion: confusion,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomBaseline {
    pub mean_accuracy: f64,
    pub trial_accuracies: Vec<f64>,
}

/// Accuracy of uniform guessing over the full answer vocabulary.
pub fn baseline_random(
    gold: &[QuestionRecord],
    seed: u64,
    n_trials: usize,
) -> Result<RandomBaseline, EvalError> {
    baseline_random_over(gold, seed, n_trials, &Answer::vocabulary())
}

/// Accuracy of uniform guessing over `vocabulary`.
pub fn baseline_random_over(
    gold: &[QuestionRecord],
    seed: u64,
    n_trials: usize,
    vocabulary: &[Answer],
) -> Result<RandomBaseline, EvalError> {
    if n_trials == 0 {
        return Err(EvalError::InvalidArgument(
            "n_trials must be positive".into(),
        ));
    }
    if vocabulary.is_empty() {
        return Err(EvalError::InvalidArgument("vocabulary is empty".into()));
    }
    let mut rng = rng_from(seed);
    let trial_accuracies: Vec<f64> = (0..n_trials)
        .map(|_| {
            let correct = gold
                .iter()
                .filter(|g| *vocabulary.choose(&mut rng).expect("non-empty") == g.answer)
                .count();
            ratio(correct, gold.len())
        })
        .collect();
    Ok(RandomBaseline {
        mean_accuracy: trial_accuracies.iter().sum::<f64>() / n_trials as f64,
        trial_accuracies,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorityBaseline {
    /// Most frequent training answer.
    pub answer: Answer,
    pub report: EvalReport,
    /// Most frequent training answer of each question type.
    pub per_type_answers: BTreeMap<QuestionType, Answer>,
    pub per_type_report: EvalReport,
}

/// Mode of `answers`, ties broken by the lexicographically smallest spelling.
fn mode<'a>(answers: impl Iterator<Item = &'a Answer>) -> Option<Answer> {
    let mut counts: BTreeMap<String, (usize, Answer)> = BTreeMap::new();
    for a in answers {
        counts.entry(a.to_string()).or_insert((0, *a)).0 += 1;
    }
    // BTreeMap iterates in spelling order; keep the first maximum.
    let mut best: Option<(usize, Answer)> = None;
    for (count, a) in counts.values() {
        if best.is_none_or(|(c, _)| *count > c) {
            best = Some((*count, *a));
        }
    }
    best.map(|(_, a)| a)
}

/// Always predicts the most frequent training answer; also reports the
/// variant predicting each type's own most frequent answer.
pub fn baseline_majority(
    train: &[QuestionRecord],
    gold: &[QuestionRecord],
) -> Result<MajorityBaseline, EvalError> {
    let answer = mode(train.iter().map(|r| &r.answer))
        .ok_or_else(|| EvalError::InvalidArgument("training set is empty".into()))?;
    let per_type_answers: BTreeMap<QuestionType, Answer> = QuestionType::ALL
        .iter()
        .filter_map(|&qt| {
            mode(
                train
                    .iter()
                    .filter(|r| r.question_type == qt)
                    .map(|r| &r.answer),
            )
            .map(|a| (qt, a))
        })
        .collect();
    let overall: PredictionSet = gold
        .iter()
        .map(|g| (g.question_id, answer.to_string()))
        .collect();
    let typed: PredictionSet = gold
        .iter()
        .map(|g| {
            let a = per_type_answers
                .get(&g.question_type)
                .copied()
                .unwrap_or(answer);
            (g.question_id, a.to_string())
        })
        .collect();
    Ok(MajorityBaseline {
        answer,
        report: score(&overall, gold),
        per_type_answers,
        per_type_report: score(&typed, gold),
    })
}
