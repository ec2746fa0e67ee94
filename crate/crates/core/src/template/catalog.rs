//! Built-in template inventory.

use super::Template;
use crate::program::QuestionType::{self, *};

/// (id, type, text, skeleton)
const ENTRIES: &[(&str, QuestionType, &str, &str)] = &[
    // yes/no
    (
        "yes_no_equal_number",
        YesNo,
        "Is there an equal number of <L1> <I1> sounds and <L2> <I2> sounds?",
        "scene; filter_instrument:<I1>; filter_loudness:<L1>; count; \
         scene; filter_instrument:<I2>; filter_loudness:<L2>; count; equal_integer@3,7",
    ),
    (
        "yes_no_more",
        YesNo,
        "Are there more <I1> sounds than <I2> sounds?",
        "scene; filter_instrument:<I1>; count; scene; filter_instrument:<I2>; count; greater_than@2,5",
    ),
    (
        "yes_no_fewer",
        YesNo,
        "Are there fewer <B1> sounds than <L1> sounds?",
        "scene; filter_brightness:<B1>; count; scene; filter_loudness:<L1>; count; less_than@2,5",
    ),
    (
        "yes_no_exist",
        YesNo,
        "Is there a <L1> <I1> playing a <N1> note?",
        "scene; filter_instrument:<I1>; filter_loudness:<L1>; filter_note:<N1>; exist",
    ),
    (
        "yes_no_as_loud",
        YesNo,
        "Is the <I1> as loud as the <I2>?",
        "scene; filter_instrument:<I1>; unique; scene; filter_instrument:<I2>; unique; equal_loudness@2,5",
    ),
    (
        "yes_no_same_note",
        YesNo,
        "Does the <ORD1> <I1> play the same note as the <ORD2> <I2>?",
        "scene; filter_instrument:<I1>; filter_relative_position:<ORD1>; unique; \
         scene; filter_instrument:<I2>; filter_relative_position:<ORD2>; unique; equal_note@3,7",
    ),
    (
        "yes_no_exist_relate",
        YesNo,
        "Is there a <I1> sound <REL1> the <ORD1> <I2>?",
        "scene; filter_instrument:<I2>; filter_relative_position:<ORD1>; unique; <REL1>; \
         filter_instrument:<I1>; exist",
    ),
    // note
    (
        "note_relate",
        Note,
        "What is the note played by the <I1> that is <REL1> the <L1> <B1> <N1> note?",
        "scene; filter_note:<N1>; filter_brightness:<B1>; filter_loudness:<L1>; unique; <REL1>; \
         filter_instrument:<I1>; unique; query_note",
    ),
    (
        "note_ordinal",
        Note,
        "What note is played by the <ORD1> <I1>?",
        "scene; filter_instrument:<I1>; filter_relative_position:<ORD1>; unique; query_note",
    ),
    (
        "note_global",
        Note,
        "What note does the <B1> <I1> play in the <GP1> of the scene?",
        "scene; filter_instrument:<I1>; filter_brightness:<B1>; filter_global_position:<GP1>; unique; query_note",
    ),
    // instrument
    (
        "instrument_global",
        Instrument,
        "What instrument plays a <B1> <L1> sound in the <GP1> of the scene?",
        "scene; filter_global_position:<GP1>; filter_brightness:<B1>; filter_loudness:<L1>; unique; \
         query_instrument",
    ),
    (
        "instrument_absolute",
        Instrument,
        "What instrument plays the <ORD1> sound?",
        "scene; filter_absolute_position:<ORD1>; unique; query_instrument",
    ),
    (
        "instrument_relate",
        Instrument,
        "What instrument plays the <N1> note <REL1> the <ORD1> <I1>?",
        "scene; filter_instrument:<I1>; filter_relative_position:<ORD1>; unique; <REL1>; \
         filter_note:<N1>; unique; query_instrument",
    ),
    // brightness
    (
        "brightness_ordinal",
        Brightness,
        "What is the brightness of the <ORD1> <I1> sound?",
        "scene; filter_instrument:<I1>; filter_relative_position:<ORD1>; unique; query_brightness",
    ),
    (
        "brightness_note",
        Brightness,
        "What is the brightness of the <L1> <N1> note?",
        "scene; filter_note:<N1>; filter_loudness:<L1>; unique; query_brightness",
    ),
    (
        "brightness_relate",
        Brightness,
        "What is the brightness of the <N1> note playing <REL1> the <ORD1> <I1>?",
        "scene; filter_instrument:<I1>; filter_relative_position:<ORD1>; unique; <REL1>; \
         filter_note:<N1>; unique; query_brightness",
    ),
    // loudness
    (
        "loudness_relate",
        Loudness,
        "What is the loudness of the <I1> playing <REL1> the <ORD1> <I2>?",
        "scene; filter_instrument:<I2>; filter_relative_position:<ORD1>; unique; <REL1>; \
         filter_instrument:<I1>; unique; query_loudness",
    ),
    (
        "loudness_note",
        Loudness,
        "What is the loudness of the <B1> <I1> playing a <N1> note?",
        "scene; filter_instrument:<I1>; filter_brightness:<B1>; filter_note:<N1>; unique; query_loudness",
    ),
    (
        "loudness_absolute",
        Loudness,
        "How loud is the <ORD1> sound of the scene?",
        "scene; filter_absolute_position:<ORD1>; unique; query_loudness",
    ),
    // counting
    (
        "counting_same_brightness",
        Counting,
        "How many other sounds have the same brightness as the <ORD1> <I1>?",
        "scene; filter_instrument:<I1>; filter_relative_position:<ORD1>; unique; same_brightness; count",
    ),
    (
        "counting_same_loudness",
        Counting,
        "How many other sounds have the same loudness as the <ORD1> <I1>?",
        "scene; filter_instrument:<I1>; filter_relative_position:<ORD1>; unique; same_loudness; count",
    ),
    (
        "counting_same_note",
        Counting,
        "How many other sounds play the same note as the <B1> <I1> in the <GP1> of the scene?",
        "scene; filter_instrument:<I1>; filter_brightness:<B1>; filter_global_position:<GP1>; unique; \
         same_note; count",
    ),
    (
        "counting_same_instrument",
        Counting,
        "How many other sounds are played by the same instrument as the <L1> <N1> note?",
        "scene; filter_note:<N1>; filter_loudness:<L1>; unique; same_instrument; count",
    ),
    (
        "counting_filter",
        Counting,
        "How many <L1> <I1> sounds are there?",
        "scene; filter_instrument:<I1>; filter_loudness:<L1>; count",
    ),
    (
        "counting_relate",
        Counting,
        "How many <B1> sounds are playing <REL1> the <ORD1> <I1>?",
        "scene; filter_instrument:<I1>; filter_relative_position:<ORD1>; unique; <REL1>; \
         filter_brightness:<B1>; count",
    ),
    // absolute position
    (
        "absolute_position_relate",
        AbsolutePosition,
        "What is the position of the <N1> note playing <REL1> the <B1> <N2> note?",
        "scene; filter_note:<N2>; filter_brightness:<B1>; unique; <REL1>; filter_note:<N1>; unique; \
         query_absolute_position",
    ),
    (
        "absolute_position_attributes",
        AbsolutePosition,
        "What is the position of the <L1> <I1> playing a <N1> note?",
        "scene; filter_instrument:<I1>; filter_loudness:<L1>; filter_note:<N1>; unique; \
         query_absolute_position",
    ),
    (
        "absolute_position_global",
        AbsolutePosition,
        "What is the position of the <B1> <I1> in the <GP1> of the scene?",
        "scene; filter_instrument:<I1>; filter_brightness:<B1>; filter_global_position:<GP1>; unique; \
         query_absolute_position",
    ),
    // relative position
    (
        "relative_position_note",
        RelativePosition,
        "Among the <I1> sounds which one is a <N1>?",
        "scene; filter_instrument:<I1>; filter_note:<N1>; unique; query_relative_position",
    ),
    (
        "relative_position_attributes",
        RelativePosition,
        "Among the <I1> sounds which one is <L1> and <B1>?",
        "scene; filter_instrument:<I1>; filter_loudness:<L1>; filter_brightness:<B1>; unique; \
         query_relative_position",
    ),
    (
        "relative_position_relate",
        RelativePosition,
        "Among the <I1> sounds which one plays <REL1> the <ORD1> sound?",
        "scene; filter_absolute_position:<ORD1>; unique; <REL1>; filter_instrument:<I1>; unique; \
         query_relative_position",
    ),
    // global position
    (
        "global_position_relate",
        GlobalPosition,
        "In what part of the scene is the <I1> playing a <N1> note that is <REL1> the <ORD1> <I2> sound?",
        "scene; filter_instrument:<I2>; filter_relative_position:<ORD1>; unique; <REL1>; \
         filter_instrument:<I1>; filter_note:<N1>; unique; query_global_position",
    ),
    (
        "global_position_ordinal",
        GlobalPosition,
        "In what part of the scene is the <ORD1> <I1>?",
        "scene; filter_instrument:<I1>; filter_relative_position:<ORD1>; unique; query_global_position",
    ),
    (
        "global_position_attributes",
        GlobalPosition,
        "In what part of the scene is the <L1> <B1> <N1> note played?",
        "scene; filter_note:<N1>; filter_brightness:<B1>; filter_loudness:<L1>; unique; query_global_position",
    ),
];

/// The built-in template catalog.
pub fn builtin_catalog() -> Vec<Template> {
    ENTRIES
        .iter()
        .map(|(id, qt, text, skeleton)| {
            let t = Template::parse(id, *qt, text, skeleton)
                .unwrap_or_else(|e| panic!("built-in template is malformed: {e}"));
            match *id {
                "yes_no_equal_number" => t.with_distinct(&["L1", "I1"], &["L2", "I2"]),
                "yes_no_more" | "yes_no_as_loud" => t.with_distinct(&["I1"], &["I2"]),
                "yes_no_same_note" => t.with_distinct(&["ORD1", "I1"], &["ORD2", "I2"]),
                _ => t,
            }
        })
        .collect()
}
