//! Bottom-up executor.

use super::{Answer, NodeKind, Outcome, Program, ProgramError};
use crate::program::AttrValue;
use crate::scene::{Scene, SceneSound};
use crate::soundbank::Ordinal;

#[derive(Debug, Clone)]
enum Value {
    /// Sound indices in onset order.
    Set(Vec<usize>),
    Sound(usize),
    Integer(u8),
    Answer(Answer),
}

/// Evaluates `program` on `scene`.
pub fn execute(program: &Program, scene: &Scene) -> Result<Outcome, ProgramError> {
    execute_relaxed(program, scene, None)
}

/// Like [`execute`], but node `relax` (a relate or same node) returns every
/// sound except its referent.
pub(crate) fn execute_relaxed(
    program: &Program,
    scene: &Scene,
    relax: Option<usize>,
) -> Result<Outcome, ProgramError> {
    program.validate()?;
    let sounds = &scene.sounds;
    if sounds.len() > usize::from(Ordinal::MAX) {
        return Err(ProgramError::SceneTooLarge(sounds.len()));
    }
    let mut values: Vec<Value> = Vec::with_capacity(program.nodes.len());
    for (i, node) in program.nodes.iter().enumerate() {
        let set = |k: usize| match &values[node.inputs[k]] {
            Value::Set(s) => s.as_slice(),
            _ => unreachable!("validated"),
        };
        let sound = |k: usize| match values[node.inputs[k]] {
            Value::Sound(s) => s,
            _ => unreachable!("validated"),
        };
        let int = |k: usize| match values[node.inputs[k]] {
            Value::Integer(n) => n,
            _ => unreachable!("validated"),
        };
        let keep = |pred: &dyn Fn(&SceneSound) -> bool| -> Value {
            Value::Set(
                set(0)
                    .iter()
                    .copied()
                    .filter(|&j| pred(&sounds[j]))
                    .collect(),
            )
        };
        let others = |referent: usize, pred: &dyn Fn(&SceneSound) -> bool| -> Value {
            Value::Set(
                (0..sounds.len())
                    .filter(|&j| j != referent && (relax == Some(i) || pred(&sounds[j])))
                    .collect(),
            )
        };
        let value = match node.kind {
            NodeKind::Scene => Value::Set((0..sounds.len()).collect()),
            NodeKind::FilterInstrument
            | NodeKind::FilterNote
            | NodeKind::FilterBrightness
            | NodeKind::FilterLoudness
            | NodeKind::FilterGlobalPosition
            | NodeKind::FilterAbsolutePosition
            | NodeKind::FilterRelativePosition => {
                let arg = node.value_arg.expect("validated");
                match (node.kind, arg) {
                    (NodeKind::FilterInstrument, AttrValue::Instrument(v)) => {
                        keep(&|s| s.instrument == v)
                    }
                    (NodeKind::FilterNote, AttrValue::Note(v)) => keep(&|s| s.note == v),
                    (NodeKind::FilterBrightness, AttrValue::Brightness(v)) => {
                        keep(&|s| s.brightness == v)
                    }
                    (NodeKind::FilterLoudness, AttrValue::Loudness(v)) => {
                        keep(&|s| s.loudness == v)
                    }
                    (NodeKind::FilterGlobalPosition, AttrValue::GlobalPosition(v)) => {
                        keep(&|s| s.global_position == v)
                    }
                    (NodeKind::FilterAbsolutePosition, AttrValue::Ordinal(v)) => {
                        keep(&|s| s.absolute_position == v.rank())
                    }
                    (NodeKind::FilterRelativePosition, AttrValue::Ordinal(v)) => {
                        keep(&|s| s.relative_position == v.rank())
                    }
                    _ => unreachable!("validated"),
                }
            }
            NodeKind::Unique => match set(0) {
                [only] => Value::Sound(*only),
                _ => return Ok(Outcome::IllPosed),
            },
            NodeKind::RelateBefore => {
                let r = sound(0);
                others(r, &|s| s.onset_s < sounds[r].onset_s)
            }
            NodeKind::RelateAfter => {
                let r = sound(0);
                others(r, &|s| s.onset_s > sounds[r].onset_s)
            }
            NodeKind::SameBrightness => {
                let r = sound(0);
                others(r, &|s| s.brightness == sounds[r].brightness)
            }
            NodeKind::SameLoudness => {
                let r = sound(0);
                others(r, &|s| s.loudness == sounds[r].loudness)
            }
            NodeKind::SameInstrument => {
                let r = sound(0);
                others(r, &|s| s.instrument == sounds[r].instrument)
            }
            NodeKind::SameNote => {
                let r = sound(0);
                others(r, &|s| s.note == sounds[r].note)
            }
            NodeKind::Count => Value::Integer(set(0).len() as u8),
            NodeKind::Exist => Value::Answer(Answer::from_bool(!set(0).is_empty())),
            NodeKind::EqualInteger => Value::Answer(Answer::from_bool(int(0) == int(1))),
            NodeKind::LessThan => Value::Answer(Answer::from_bool(int(0) < int(1))),
            NodeKind::GreaterThan => Value::Answer(Answer::from_bool(int(0) > int(1))),
            NodeKind::EqualInstrument => Value::Answer(Answer::from_bool(
                sounds[sound(0)].instrument == sounds[sound(1)].instrument,
            )),
            NodeKind::EqualNote => Value::Answer(Answer::from_bool(
                sounds[sound(0)].note == sounds[sound(1)].note,
            )),
            NodeKind::EqualBrightness => Value::Answer(Answer::from_bool(
                sounds[sound(0)].brightness == sounds[sound(1)].brightness,
            )),
            NodeKind::EqualLoudness => Value::Answer(Answer::from_bool(
                sounds[sound(0)].loudness == sounds[sound(1)].loudness,
            )),
            NodeKind::QueryInstrument => {
                Value::Answer(Answer::Instrument(sounds[sound(0)].instrument))
            }
            NodeKind::QueryNote => Value::Answer(Answer::Note(sounds[sound(0)].note)),
            NodeKind::QueryBrightness => {
                Value::Answer(Answer::Brightness(sounds[sound(0)].brightness))
            }
            NodeKind::QueryLoudness => Value::Answer(Answer::Loudness(sounds[sound(0)].loudness)),
            NodeKind::QueryAbsolutePosition => {
                let j = sound(0);
                let o = sounds[j]
                    .absolute_ordinal()
                    .ok_or(ProgramError::BadPosition(j))?;
                Value::Answer(Answer::Position(o))
            }
            NodeKind::QueryRelativePosition => {
                let j = sound(0);
                let o = sounds[j]
                    .relative_ordinal()
                    .ok_or(ProgramError::BadPosition(j))?;
                Value::Answer(Answer::Position(o))
            }
            NodeKind::QueryGlobalPosition => {
                Value::Answer(Answer::Global(sounds[sound(0)].global_position))
            }
        };
        values.push(value);
    }
    match values.pop() {
        Some(Value::Answer(a)) => Ok(Outcome::Answer(a)),
        Some(Value::Integer(n)) => Ok(Outcome::Answer(Answer::Count(n))),
        _ => unreachable!("validated root type"),
    }
}
