//! Random well-typed programs and low-diversity scenes for differential
//! testing.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::{AttrDomain, NodeKind, Program, ProgramBuilder};
use crate::scene::{Scene, SCENE_DURATION_S, SOUNDS_PER_SCENE};
use crate::soundbank::{Brightness, InstrumentFamily, Loudness, Note, SoundAttributes};

const FILTERS: [(NodeKind, AttrDomain); 7] = [
    (NodeKind::FilterInstrument, AttrDomain::Instrument),
    (NodeKind::FilterNote, AttrDomain::Note),
    (NodeKind::FilterBrightness, AttrDomain::Brightness),
    (NodeKind::FilterLoudness, AttrDomain::Loudness),
    (NodeKind::FilterGlobalPosition, AttrDomain::GlobalPosition),
    (NodeKind::FilterAbsolutePosition, AttrDomain::Ordinal),
    (NodeKind::FilterRelativePosition, AttrDomain::Ordinal),
];

const RELATIONS: [NodeKind; 6] = [
    NodeKind::RelateBefore,
    NodeKind::RelateAfter,
    NodeKind::SameBrightness,
    NodeKind::SameLoudness,
    NodeKind::SameInstrument,
    NodeKind::SameNote,
];

const QUERIES: [NodeKind; 7] = [
    NodeKind::QueryInstrument,
    NodeKind::QueryNote,
    NodeKind::QueryBrightness,
    NodeKind::QueryLoudness,
    NodeKind::QueryAbsolutePosition,
    NodeKind::QueryRelativePosition,
    NodeKind::QueryGlobalPosition,
];

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    b: ProgramBuilder,
}

impl<R: Rng> Gen<'_, R> {
    fn set(&mut self, depth: u32) -> usize {
        if depth == 0 {
            return self.b.scene();
        }
        let roll = self.rng.random_range(0..10);
        if roll < 2 {
            self.b.scene()
        } else if roll < 8 {
            let (kind, domain) = *FILTERS.choose(self.rng).expect("non-empty");
            let value = *domain.values().choose(self.rng).expect("non-empty");
            let input = self.set(depth - 1);
            self.b.filter(kind, value, input)
        } else {
            let kind = *RELATIONS.choose(self.rng).expect("non-empty");
            let referent = self.sound(depth - 1);
            self.b.unary(kind, referent)
        }
    }

    fn sound(&mut self, depth: u32) -> usize {
        let input = self.set(depth);
        self.b.unary(NodeKind::Unique, input)
    }

    fn root(&mut self, depth: u32) {
        match self.rng.random_range(0..6) {
            0 => {
                let s = self.set(depth);
                self.b.unary(NodeKind::Count, s);
            }
            1 => {
                let s = self.set(depth);
                self.b.unary(NodeKind::Exist, s);
            }
            2 => {
                let kind = *[
                    NodeKind::EqualInteger,
                    NodeKind::LessThan,
                    NodeKind::GreaterThan,
                ]
                .choose(self.rng)
                .expect("non-empty");
                let a = self.set(depth);
                let a = self.b.unary(NodeKind::Count, a);
                let c = self.set(depth);
                let c = self.b.unary(NodeKind::Count, c);
                self.b.binary(kind, a, c);
            }
            3 => {
                let kind = *[
                    NodeKind::EqualInstrument,
                    NodeKind::EqualNote,
                    NodeKind::EqualBrightness,
                    NodeKind::EqualLoudness,
                ]
                .choose(self.rng)
                .expect("non-empty");
                let a = self.sound(depth);
                let c = self.sound(depth);
                self.b.binary(kind, a, c);
            }
            _ => {
                let kind = *QUERIES.choose(self.rng).expect("non-empty");
                let s = self.sound(depth);
                self.b.unary(kind, s);
            }
        }
    }
}

/// A random well-typed program whose set-valued chains are at most `depth`
/// nodes deep.
pub fn random_program<R: Rng>(rng: &mut R, depth: u32) -> Program {
    let mut g = Gen {
        rng,
        b: ProgramBuilder::new(),
    };
    g.root(depth);
    g.b.build()
}

/// A ten-sound scene drawing attributes from small random subsets of each
/// domain, so that filters often isolate exactly one sound.
pub fn random_scene<R: Rng>(rng: &mut R, scene_id: u64) -> Scene {
    fn subset<T: Copy, R: Rng>(rng: &mut R, all: &[T]) -> Vec<T> {
        let k = rng.random_range(1..=all.len().min(3));
        all.choose_multiple(rng, k).copied().collect()
    }
    let instruments = subset(rng, InstrumentFamily::ALL);
    let notes = subset(rng, Note::ALL);
    let slot = SCENE_DURATION_S / SOUNDS_PER_SCENE as f64;
    let layout: Vec<(SoundAttributes, f64, f64)> = (0..SOUNDS_PER_SCENE)
        .map(|i| {
            let attrs = SoundAttributes {
                instrument: *instruments.choose(rng).expect("non-empty"),
                note: *notes.choose(rng).expect("non-empty"),
                brightness: *Brightness::ALL.choose(rng).expect("non-empty"),
                loudness: *Loudness::ALL.choose(rng).expect("non-empty"),
            };
            let duration = rng.random_range(2.0..3.0);
            let onset = i as f64 * slot + rng.random_range(0.0..slot - duration);
            (attrs, onset, duration)
        })
        .collect();
    let reverb = rng.random_range(50.0..=400.0);
    Scene::from_layout(scene_id, rng.random(), reverb, &layout).expect("valid layout")
}
