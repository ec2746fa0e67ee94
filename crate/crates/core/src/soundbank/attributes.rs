//! Attribute taxonomy shared by sounds, scenes, programs and answers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Error returned when a label does not belong to an attribute domain.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {domain} label '{label}'")]
pub struct UnknownLabel {
    pub domain: &'static str,
    pub label: String,
}

impl UnknownLabel {
    fn new(domain: &'static str, label: &str) -> Self {
        Self {
            domain,
            label: label.to_string(),
        }
    }
}

/// Implements `Display`, `FromStr` and string-based serde for a fieldless enum
/// with a fixed label table.
macro_rules! labelled_enum {
    ($ty:ident, $domain:literal, [$($variant:ident => $label:literal),+ $(,)?]) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($ty::$variant => $label),+
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = UnknownLabel;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($label => Ok($ty::$variant),)+
                    _ => Err(UnknownLabel::new($domain, s)),
                }
            }
        }

        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InstrumentFamily {
    Cello,
    Clarinet,
    Flute,
    Trumpet,
    Violin,
}

labelled_enum!(InstrumentFamily, "instrument", [
    Cello => "cello",
    Clarinet => "clarinet",
    Flute => "flute",
    Trumpet => "trumpet",
    Violin => "violin",
]);

/// Chromatic pitch class. Octave is a synthesis parameter, not an attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Note {
    A,
    ASharp,
    B,
    C,
    CSharp,
    D,
    DSharp,
    E,
    F,
    FSharp,
    G,
    GSharp,
}

labelled_enum!(Note, "note", [
    A => "A",
    ASharp => "A#",
    B => "B",
    C => "C",
    CSharp => "C#",
    D => "D",
    DSharp => "D#",
    E => "E",
    F => "F",
    FSharp => "F#",
    G => "G",
    GSharp => "G#",
]);

impl Note {
    /// Semitones above C within the same octave.
    pub fn semitone_from_c(self) -> i32 {
        match self {
            Note::C => 0,
            Note::CSharp => 1,
            Note::D => 2,
            Note::DSharp => 3,
            Note::E => 4,
            Note::F => 5,
            Note::FSharp => 6,
            Note::G => 7,
            Note::GSharp => 8,
            Note::A => 9,
            Note::ASharp => 10,
            Note::B => 11,
        }
    }

    /// Notes in ascending pitch order starting from C.
    pub fn chromatic_from_c() -> [Note; 12] {
        [
            Note::C,
            Note::CSharp,
            Note::D,
            Note::DSharp,
            Note::E,
            Note::F,
            Note::FSharp,
            Note::G,
            Note::GSharp,
            Note::A,
            Note::ASharp,
            Note::B,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Brightness {
    Bright,
    Dark,
}

labelled_enum!(Brightness, "brightness", [Bright => "bright", Dark => "dark"]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Loudness {
    Quiet,
    Loud,
}

labelled_enum!(Loudness, "loudness", [Quiet => "quiet", Loud => "loud"]);

/// Which third of the scene a sound starts in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GlobalPosition {
    Beginning,
    Middle,
    End,
}

labelled_enum!(GlobalPosition, "global position", [
    Beginning => "beginning",
    Middle => "middle",
    End => "end",
]);

/// Ordinal position 1..=10, rendered as "first".."tenth".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordinal(u8);

const ORDINAL_WORDS: [&str; 10] = [
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth",
];

impl Ordinal {
    pub const MAX: u8 = 10;

    pub fn new(rank: u8) -> Option<Self> {
        (1..=Self::MAX).contains(&rank).then_some(Ordinal(rank))
    }

    pub fn rank(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Ordinal> {
        (1..=Self::MAX).map(Ordinal)
    }

    pub fn as_str(self) -> &'static str {
        ORDINAL_WORDS[usize::from(self.0 - 1)]
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Ordinal {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ORDINAL_WORDS
            .iter()
            .position(|w| *w == s)
            .map(|i| Ordinal(i as u8 + 1))
            .ok_or_else(|| UnknownLabel::new("ordinal", s))
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Attribute key used to index a bank: every combination a scene can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SoundAttributes {
    pub instrument: InstrumentFamily,
    pub note: Note,
    pub brightness: Brightness,
    pub loudness: Loudness,
}

impl SoundAttributes {
    /// The full 5 x 12 x 2 x 2 grid in a fixed order.
    pub fn grid() -> Vec<SoundAttributes> {
        let mut out = Vec::with_capacity(240);
        for &instrument in InstrumentFamily::ALL {
            for &note in Note::ALL {
                for &brightness in Brightness::ALL {
                    for &loudness in Loudness::ALL {
                        out.push(SoundAttributes {
                            instrument,
                            note,
                            brightness,
                            loudness,
                        });
                    }
                }
            }
        }
        out
    }
}
