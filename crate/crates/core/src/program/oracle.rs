//! Reference evaluator used to cross-check [`super::execute`].
//!
//! Evaluates top-down from the root with sound sets as bit masks, and
//! recomputes every positional attribute from onset times instead of reading
//! the stored fields.

use super::{Answer, AttrValue, NodeKind, Outcome, Program, ProgramError};
use crate::scene::Scene;
use crate::soundbank::{GlobalPosition, Ordinal};

#[derive(Clone, Copy)]
enum Val {
    Mask(u16),
    One(usize),
    Num(u32),
    Ans(Answer),
}

struct Oracle<'a> {
    program: &'a Program,
    scene: &'a Scene,
    relax: Option<usize>,
}

/// Sentinel raised when a `unique` node sees anything but one sound.
struct Ill;

impl Oracle<'_> {
    fn n(&self) -> usize {
        self.scene.sounds.len()
    }

    fn onset(&self, j: usize) -> f64 {
        self.scene.sounds[j].onset_s
    }

    fn absolute_rank(&self, j: usize) -> usize {
        1 + (0..self.n())
            .filter(|&k| self.onset(k) < self.onset(j))
            .count()
    }

    fn relative_rank(&self, j: usize) -> usize {
        let inst = self.scene.sounds[j].instrument;
        1 + (0..self.n())
            .filter(|&k| self.scene.sounds[k].instrument == inst && self.onset(k) < self.onset(j))
            .count()
    }

    fn global(&self, j: usize) -> GlobalPosition {
        let third = self.scene.duration_s / 3.0;
        let t = self.onset(j);
        if t < third {
            GlobalPosition::Beginning
        } else if t < 2.0 * third {
            GlobalPosition::Middle
        } else {
            GlobalPosition::End
        }
    }

    fn mask_where(&self, pred: impl Fn(usize) -> bool) -> u16 {
        let mut m = 0u16;
        for j in 0..self.n() {
            if pred(j) {
                m |= 1 << j;
            }
        }
        m
    }

    fn eval(&self, i: usize) -> Result<Val, Ill> {
        let node = &self.program.nodes[i];
        let sounds = &self.scene.sounds;
        let input = |k: usize| self.eval(node.inputs[k]);
        let mask = |k: usize| -> Result<u16, Ill> {
            match input(k)? {
                Val::Mask(m) => Ok(m),
                _ => unreachable!("validated"),
            }
        };
        let one = |k: usize| -> Result<usize, Ill> {
            match input(k)? {
                Val::One(j) => Ok(j),
                _ => unreachable!("validated"),
            }
        };
        let num = |k: usize| -> Result<u32, Ill> {
            match input(k)? {
                Val::Num(x) => Ok(x),
                _ => unreachable!("validated"),
            }
        };
        let yes_no = |b: bool| Ok(Val::Ans(if b { Answer::Yes } else { Answer::No }));
        let relaxed = self.relax == Some(i);
        Ok(match node.kind {
            NodeKind::Scene => Val::Mask(self.mask_where(|_| true)),
            NodeKind::Unique => {
                let m = mask(0)?;
                if m.count_ones() != 1 {
                    return Err(Ill);
                }
                Val::One(m.trailing_zeros() as usize)
            }
            NodeKind::Count => Val::Num(mask(0)?.count_ones()),
            NodeKind::Exist => return yes_no(mask(0)? != 0),
            NodeKind::EqualInteger => return yes_no(num(0)? == num(1)?),
            NodeKind::LessThan => return yes_no(num(0)? < num(1)?),
            NodeKind::GreaterThan => return yes_no(num(0)? > num(1)?),
            NodeKind::EqualInstrument => {
                let (a, b) = (one(0)?, one(1)?);
                return yes_no(sounds[a].instrument == sounds[b].instrument);
            }
            NodeKind::EqualNote => {
                let (a, b) = (one(0)?, one(1)?);
                return yes_no(sounds[a].note == sounds[b].note);
            }
            NodeKind::EqualBrightness => {
                let (a, b) = (one(0)?, one(1)?);
                return yes_no(sounds[a].brightness == sounds[b].brightness);
            }
            NodeKind::EqualLoudness => {
                let (a, b) = (one(0)?, one(1)?);
                return yes_no(sounds[a].loudness == sounds[b].loudness);
            }
            NodeKind::RelateBefore
            | NodeKind::RelateAfter
            | NodeKind::SameBrightness
            | NodeKind::SameLoudness
            | NodeKind::SameInstrument
            | NodeKind::SameNote => {
                let r = one(0)?;
                let s = &sounds[r];
                Val::Mask(self.mask_where(|j| {
                    let t = &sounds[j];
                    j != r
                        && (relaxed
                            || match node.kind {
                                NodeKind::RelateBefore => t.onset_s < s.onset_s,
                                NodeKind::RelateAfter => t.onset_s > s.onset_s,
                                NodeKind::SameBrightness => t.brightness == s.brightness,
                                NodeKind::SameLoudness => t.loudness == s.loudness,
                                NodeKind::SameInstrument => t.instrument == s.instrument,
                                _ => t.note == s.note,
                            })
                }))
            }
            NodeKind::QueryInstrument => Val::Ans(Answer::Instrument(sounds[one(0)?].instrument)),
            NodeKind::QueryNote => Val::Ans(Answer::Note(sounds[one(0)?].note)),
            NodeKind::QueryBrightness => Val::Ans(Answer::Brightness(sounds[one(0)?].brightness)),
            NodeKind::QueryLoudness => Val::Ans(Answer::Loudness(sounds[one(0)?].loudness)),
            NodeKind::QueryGlobalPosition => Val::Ans(Answer::Global(self.global(one(0)?))),
            NodeKind::QueryAbsolutePosition => {
                let rank = self.absolute_rank(one(0)?);
                Val::Ans(Answer::Position(
                    Ordinal::new(rank as u8).expect("at most ten sounds"),
                ))
            }
            NodeKind::QueryRelativePosition => {
                let rank = self.relative_rank(one(0)?);
                Val::Ans(Answer::Position(
                    Ordinal::new(rank as u8).expect("at most ten sounds"),
                ))
            }
            _ => {
                let m = mask(0)?;
                let arg = node.value_arg.expect("validated");
                Val::Mask(
                    m & self.mask_where(|j| {
                        let s = &sounds[j];
                        match arg {
                            AttrValue::Instrument(v) => s.instrument == v,
                            AttrValue::Note(v) => s.note == v,
                            AttrValue::Brightness(v) => s.brightness == v,
                            AttrValue::Loudness(v) => s.loudness == v,
                            AttrValue::GlobalPosition(v) => self.global(j) == v,
                            AttrValue::Ordinal(v)
                                if node.kind == NodeKind::FilterAbsolutePosition =>
                            {
                                self.absolute_rank(j) == usize::from(v.rank())
                            }
                            AttrValue::Ordinal(v) => self.relative_rank(j) == usize::from(v.rank()),
                        }
                    }),
                )
            }
        })
    }
}

/// Answers `program` on `scene` by exhaustive scanning, independently of
/// [`super::execute`].
pub fn brute_force_answer(program: &Program, scene: &Scene) -> Result<Outcome, ProgramError> {
    brute_force_relaxed(program, scene, None)
}

pub(crate) fn brute_force_relaxed(
    program: &Program,
    scene: &Scene,
    relax: Option<usize>,
) -> Result<Outcome, ProgramError> {
    program.validate()?;
    if scene.sounds.len() > usize::from(Ordinal::MAX) {
        return Err(ProgramError::SceneTooLarge(scene.sounds.len()));
    }
    let oracle = Oracle {
        program,
        scene,
        relax,
    };
    match oracle.eval(program.root()) {
        Err(Ill) => Ok(Outcome::IllPosed),
        Ok(Val::Ans(a)) => Ok(Outcome::Answer(a)),
        Ok(Val::Num(n)) => Ok(Outcome::Answer(Answer::Count(n as u8))),
        Ok(_) => unreachable!("validated root type"),
    }
}
