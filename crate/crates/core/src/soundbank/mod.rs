//! Elementary sounds: attribute taxonomy, synthesis, annotation and banks.

pub mod annotate;
pub mod attributes;
pub mod bank;
pub mod synth;

pub use annotate::{annotate_brightness, annotate_loudness, AnnotationConfig};
pub use attributes::{
    Brightness, GlobalPosition, InstrumentFamily, Loudness, Note, Ordinal, SoundAttributes,
    UnknownLabel,
};
pub use bank::{load_bank, read_manifest, BankEntryError, BankLoad, ManifestEntry, SoundBank};
pub use synth::{note_frequency, synthesize_sound, DEFAULT_OCTAVE};

use crate::audio_io::AudioIoError;

pub const SAMPLE_RATE: u32 = 48_000;

/// One attributed mono sound at 48 kHz.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementarySound {
    pub id: String,
    pub attributes: SoundAttributes,
    pub duration_s: f64,
    pub waveform: Vec<f32>,
}

#[derive(Debug, thiserror::Error)]
pub enum SoundError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0} is undefined for a silent or empty waveform")]
    UndefinedAttribute(&'static str),
    #[error("cannot realize {attributes:?}: {detail}")]
    LabelNotRealizable {
        attributes: SoundAttributes,
        detail: String,
    },
    #[error("bank manifest {path}: {detail}")]
    Manifest { path: String, detail: String },
    #[error("bank is empty ({} entries rejected)", rejected.len())]
    EmptyBank { rejected: Vec<BankEntryError> },
    #[error(transparent)]
    Audio(#[from] AudioIoError),
}
