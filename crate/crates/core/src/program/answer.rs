//! The 47-way answer vocabulary and the nine question types.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::soundbank::{Brightness, GlobalPosition, InstrumentFamily, Loudness, Note, Ordinal};

pub const MAX_COUNT: u8 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Answer {
    Yes,
    No,
    Note(Note),
    Instrument(InstrumentFamily),
    Brightness(Brightness),
    Loudness(Loudness),
    Count(u8),
    Position(Ordinal),
    Global(GlobalPosition),
}

impl Answer {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Answer::Yes
        } else {
            Answer::No
        }
    }

    /// Every answer, grouped by answer row.
    pub fn vocabulary() -> Vec<Answer> {
        let mut v = vec![Answer::Yes, Answer::No];
        v.extend(Note::ALL.iter().map(|n| Answer::Note(*n)));
        v.extend(InstrumentFamily::ALL.iter().map(|i| Answer::Instrument(*i)));
        v.extend(Brightness::ALL.iter().map(|b| Answer::Brightness(*b)));
        v.extend(Loudness::ALL.iter().map(|l| Answer::Loudness(*l)));
        v.extend((0..=MAX_COUNT).map(Answer::Count));
        v.extend(Ordinal::all().map(Answer::Position));
        v.extend(GlobalPosition::ALL.iter().map(|g| Answer::Global(*g)));
        v
    }

    pub fn is_in_vocabulary(&self) -> bool {
        match self {
            Answer::Count(n) => *n <= MAX_COUNT,
            _ => true,
        }
    }

    /// Lenient parse for external predictions: trims, ignores case, accepts
    /// `♯` for `#`, and accepts number words for counts and `3rd`-style
    /// ordinals.
    pub fn parse_canonical(raw: &str) -> Option<Answer> {
        let lower = raw.trim().to_lowercase().replace('♯', "#");
        if lower.is_empty() {
            return None;
        }
        if let Ok(a) = lower.parse::<Answer>() {
            return Some(a);
        }
        // Notes are upper-case in the vocabulary.
        let mut chars = lower.chars();
        let first = chars.next()?.to_ascii_uppercase();
        let note_form: String = std::iter::once(first).chain(chars).collect();
        if let Ok(n) = note_form.parse::<Note>() {
            return Some(Answer::Note(n));
        }
        const NUMBER_WORDS: [&str; 11] = [
            "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
        ];
        if let Some(i) = NUMBER_WORDS.iter().position(|w| *w == lower) {
            return Some(Answer::Count(i as u8));
        }
        const SUFFIXED: [&str; 10] = [
            "1st", "2nd", "3rd", "4th", "5th", "6th", "7th", "8th", "9th", "10th",
        ];
        if let Some(i) = SUFFIXED.iter().position(|w| *w == lower) {
            return Ordinal::new(i as u8 + 1).map(Answer::Position);
        }
        None
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Yes => f.write_str("yes"),
            Answer::No => f.write_str("no"),
            Answer::Note(n) => n.fmt(f),
            Answer::Instrument(i) => i.fmt(f),
            Answer::Brightness(b) => b.fmt(f),
            Answer::Loudness(l) => l.fmt(f),
            Answer::Count(c) => c.fmt(f),
            Answer::Position(o) => o.fmt(f),
            Answer::Global(g) => g.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("'{0}' is not in the answer vocabulary")]
pub struct NotAnAnswer(pub String);

impl FromStr for Answer {
    type Err = NotAnAnswer;

    /// Exact parse of the canonical spelling.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "yes" => return Ok(Answer::Yes),
            "no" => return Ok(Answer::No),
            _ => {}
        }
        if let Ok(n) = s.parse() {
            return Ok(Answer::Note(n));
        }
        if let Ok(i) = s.parse() {
            return Ok(Answer::Instrument(i));
        }
        if let Ok(b) = s.parse() {
            return Ok(Answer::Brightness(b));
        }
        if let Ok(l) = s.parse() {
            return Ok(Answer::Loudness(l));
        }
        if let Ok(o) = s.parse() {
            return Ok(Answer::Position(o));
        }
        if let Ok(g) = s.parse() {
            return Ok(Answer::Global(g));
        }
        match s.parse::<u8>() {
            Ok(n) if n <= MAX_COUNT && n.to_string() == s => Ok(Answer::Count(n)),
            _ => Err(NotAnAnswer(s.to_string())),
        }
    }
}

impl Serialize for Answer {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Answer {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionType {
    YesNo,
    Note,
    Instrument,
    Brightness,
    Loudness,
    Counting,
    AbsolutePosition,
    RelativePosition,
    GlobalPosition,
}

impl QuestionType {
    pub const ALL: [QuestionType; 9] = [
        QuestionType::YesNo,
        QuestionType::Note,
        QuestionType::Instrument,
        QuestionType::Brightness,
        QuestionType::Loudness,
        QuestionType::Counting,
        QuestionType::AbsolutePosition,
        QuestionType::RelativePosition,
        QuestionType::GlobalPosition,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QuestionType::YesNo => "yes_no",
            QuestionType::Note => "note",
            QuestionType::Instrument => "instrument",
            QuestionType::Brightness => "brightness",
            QuestionType::Loudness => "loudness",
            QuestionType::Counting => "counting",
            QuestionType::AbsolutePosition => "absolute_position",
            QuestionType::RelativePosition => "relative_position",
            QuestionType::GlobalPosition => "global_position",
        }
    }

    /// Whether `answer` belongs to this type's answer row.
    pub fn admits(self, answer: &Answer) -> bool {
        matches!(
            (self, answer),
            (QuestionType::YesNo, Answer::Yes | Answer::No)
                | (QuestionType::Note, Answer::Note(_))
                | (QuestionType::Instrument, Answer::Instrument(_))
                | (QuestionType::Brightness, Answer::Brightness(_))
                | (QuestionType::Loudness, Answer::Loudness(_))
                | (QuestionType::AbsolutePosition, Answer::Position(_))
                | (QuestionType::RelativePosition, Answer::Position(_))
                | (QuestionType::GlobalPosition, Answer::Global(_))
        ) || matches!((self, answer), (QuestionType::Counting, Answer::Count(n)) if *n <= MAX_COUNT)
    }

    pub fn answer_row(self) -> Vec<Answer> {
        Answer::vocabulary()
            .into_iter()
            .filter(|a| self.admits(a))
            .collect()
    }
}

impl fmt::Display for QuestionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QuestionType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QuestionType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown question type '{s}'"))
    }
}
