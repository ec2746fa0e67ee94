//! Rejection-sampling question generation for one scene.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Bindings, SkeletonArg, SkeletonKind, SlotDomain, Template};
use crate::program::{check_degenerate, execute, Answer, NodeKind, Outcome, Program, QuestionType};
use crate::rng::rng_from;
use crate::scene::{Scene, SceneSound};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionRecord {
    pub question_id: u64,
    pub scene_id: u64,
    pub question_type: QuestionType,
    pub text: String,
    pub program: Program,
    pub answer: Answer,
    pub template_id: String,
    pub bindings: Bindings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BalanceConfig {
    /// Largest share one answer may take within a scene's questions of one type.
    pub cap_fraction: f64,
    /// Attempts allowed per requested question.
    pub max_attempts_factor: usize,
}

impl Default for BalanceConfig {
    fn default() -> Self {
        Self {
            cap_fraction: 0.5,
            max_attempts_factor: 200,
        }
    }
}

/// Why a scene got fewer questions than requested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialResult {
    pub requested: usize,
    pub accepted: usize,
    pub attempts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub records: Vec<QuestionRecord>,
    pub partial: Option<PartialResult>,
}

/// Per-type answer counts used by the balancing cap.
///
/// The cap alone cannot balance a type that gets a single question in a
/// scene, so the first answer of each type must come from a random subset of
/// the type's answer row holding a `cap_fraction` share of it.
struct Balance {
    cap: f64,
    counts: BTreeMap<QuestionType, BTreeMap<Answer, usize>>,
    openers: BTreeMap<QuestionType, Vec<Answer>>,
}

impl Balance {
    fn new<R: Rng>(cap: f64, rng: &mut R) -> Self {
        let openers = QuestionType::ALL
            .iter()
            .map(|&qt| {
                let row = qt.answer_row();
                let k = ((cap * row.len() as f64).ceil() as usize).clamp(1, row.len());
                (qt, row.choose_multiple(rng, k).copied().collect())
            })
            .collect();
        Self {
            cap,
            counts: BTreeMap::new(),
            openers,
        }
    }

    fn admits(&self, qt: QuestionType, answer: Answer) -> bool {
        let Some(row) = self.counts.get(&qt) else {
            return self.openers[&qt].contains(&answer);
        };
        let total = row.values().sum::<usize>() + 1;
        let this = row.get(&answer).copied().unwrap_or(0) + 1;
        let other_max = row
            .iter()
            .filter(|(a, _)| **a != answer)
            .map(|(_, c)| *c)
            .max()
            .unwrap_or(0);
        let limit = ((self.cap * total as f64).ceil() as usize).max(1);
        this.max(other_max) <= limit
    }

    fn add(&mut self, qt: QuestionType, answer: Answer) {
        *self
            .counts
            .entry(qt)
            .or_default()
            .entry(answer)
            .or_default() += 1;
    }
}

/// Value of a slot read off one scene sound.
fn value_from_sound(template: &Template, slot: &str, domain: SlotDomain, s: &SceneSound) -> String {
    use crate::program::AttrDomain as D;
    match domain {
        SlotDomain::Relation => unreachable!("relations are not scene attributes"),
        SlotDomain::Attr(D::Instrument) => s.instrument.to_string(),
        SlotDomain::Attr(D::Note) => s.note.to_string(),
        SlotDomain::Attr(D::Brightness) => s.brightness.to_string(),
        SlotDomain::Attr(D::Loudness) => s.loudness.to_string(),
        SlotDomain::Attr(D::GlobalPosition) => s.global_position.to_string(),
        SlotDomain::Attr(D::Ordinal) => {
            let absolute = template.skeleton.iter().any(|n| {
                n.kind == SkeletonKind::Fixed(NodeKind::FilterAbsolutePosition)
                    && n.arg == SkeletonArg::Slot(slot.to_string())
            });
            let rank = if absolute {
                s.absolute_position
            } else {
                s.relative_position
            };
            crate::soundbank::Ordinal::new(rank).map_or_else(|| "first".into(), |o| o.to_string())
        }
    }
}

/// Draws bindings: each attribute slot copies the attribute of a random scene
/// sound half of the time and is uniform over its domain otherwise.
fn sample_bindings<R: Rng>(template: &Template, scene: &Scene, rng: &mut R) -> Bindings {
    template
        .slots
        .iter()
        .map(|(name, domain)| {
            let from_scene =
                *domain != SlotDomain::Relation && !scene.sounds.is_empty() && rng.random_bool(0.5);
            let value = if from_scene {
                let s = scene.sounds.choose(rng).expect("non-empty");
                value_from_sound(template, name, *domain, s)
            } else {
                domain
                    .values()
                    .choose(rng)
                    .expect("non-empty domain")
                    .clone()
            };
            (name.clone(), value)
        })
        .collect()
}

/// Samples up to `n_questions` distinct, valid, non-degenerate, balanced
/// questions.
/// Each question type gets an equal share of `n_questions`; attempts pick a
/// type that still has room, then one of its templates uniformly.
///
/// Records are numbered `0..n` in acceptance order; callers assign global ids.
pub fn generate_questions(
    scene: &Scene,
    catalog: &[Template],
    n_questions: usize,
    seed: u64,
    balance: BalanceConfig,
) -> Generated {
    let mut rng = rng_from(seed);
    let mut records = Vec::with_capacity(n_questions);
    let mut counts = Balance::new(balance.cap_fraction, &mut rng);
    let max_attempts = balance.max_attempts_factor.saturating_mul(n_questions);
    let mut attempts = 0;
    let mut by_type: BTreeMap<QuestionType, Vec<&Template>> = BTreeMap::new();
    for t in catalog {
        by_type.entry(t.question_type).or_default().push(t);
    }
    let groups: Vec<(QuestionType, Vec<&Template>)> = by_type.into_iter().collect();
    let mut quota = vec![0usize; groups.len()];
    if !groups.is_empty() {
        let mut order: Vec<usize> = (0..groups.len()).collect();
        order.shuffle(&mut rng);
        for k in 0..n_questions {
            quota[order[k % groups.len()]] += 1;
        }
    }
    let mut filled = vec![0usize; groups.len()];
    let mut asked = std::collections::BTreeSet::new();
    while records.len() < n_questions && attempts < max_attempts && !groups.is_empty() {
        attempts += 1;
        // Quotas keep types evenly represented; they are dropped for the
        // second half of the budget so a scene that cannot support some type
        // still fills up with others.
        let open: Vec<usize> = (0..groups.len())
            .filter(|&g| filled[g] < quota[g] || attempts > max_attempts / 2)
            .collect();
        let g = *open.choose(&mut rng).expect("quotas sum to n_questions");
        let template = *groups[g].1.choose(&mut rng).expect("non-empty");
        let bindings = sample_bindings(template, scene, &mut rng);
        if !template.bindings_distinct(&bindings) {
            continue;
        }
        let Ok((text, program)) = template.instantiate(&bindings) else {
            continue;
        };
        if asked.contains(&text) {
            continue;
        }
        let answer = match execute(&program, scene) {
            Ok(Outcome::Answer(a)) => a,
            _ => continue,
        };
        if check_degenerate(&program, scene).unwrap_or(true) {
            continue;
        }
        if !counts.admits(template.question_type, answer) {
            continue;
        }
        counts.add(template.question_type, answer);
        filled[g] += 1;
        asked.insert(text.clone());
        records.push(QuestionRecord {
            question_id: records.len() as u64,
            scene_id: scene.scene_id,
            question_type: template.question_type,
            text,
            program,
            answer,
            template_id: template.template_id.clone(),
            bindings,
        });
    }
    let partial = (records.len() < n_questions).then_some(PartialResult {
        requested: n_questions,
        accepted: records.len(),
        attempts,
    });
    if let Some(p) = &partial {
        log::warn!(
            "scene {}: accepted {} of {} questions after {} attempts",
            scene.scene_id,
            p.accepted,
            p.requested,
            p.attempts
        );
    }
    Generated { records, partial }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_blocks_runs_after_the_opener() {
        let mut b = Balance::new(0.5, &mut rng_from(3));
        let qt = QuestionType::YesNo;
        let opener = b.openers[&qt][0];
        let other = if opener == Answer::Yes {
            Answer::No
        } else {
            Answer::Yes
        };
        assert!(!b.admits(qt, other));
        assert!(b.admits(qt, opener));
        b.add(qt, opener);
        assert!(!b.admits(qt, opener));
        assert!(b.admits(qt, other));
        b.add(qt, other);
        assert!(b.admits(qt, opener));
        assert!(b.admits(qt, other));
        assert_eq!(b.openers[&QuestionType::Note].len(), 6);
        assert_eq!(b.openers[&QuestionType::Instrument].len(), 3);
    }
}
