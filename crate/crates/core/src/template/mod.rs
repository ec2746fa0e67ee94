//! Question templates: text with placeholders plus a program skeleton.

mod catalog;
mod generate;

use std::collections::BTreeMap;
use std::fmt;

pub use catalog::builtin_catalog;
pub use generate::{generate_questions, BalanceConfig, Generated, PartialResult, QuestionRecord};

use crate::program::{
    AttrDomain, AttrValue, NodeKind, Program, ProgramError, ProgramNode, QuestionType,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemplateError {
    #[error("template {template}: no binding for slot {slot}")]
    MissingBinding { template: String, slot: String },
    #[error("template {template}: '{value}' is not a valid value for slot {slot}")]
    InvalidBinding {
        template: String,
        slot: String,
        value: String,
    },
    #[error("template {template}: binding for unknown slot {slot}")]
    UnknownSlot { template: String, slot: String },
    #[error("template {template}: malformed skeleton: {detail}")]
    Skeleton { template: String, detail: String },
    #[error("template {template}: {source}")]
    Program {
        template: String,
        #[source]
        source: ProgramError,
    },
}

/// What a placeholder ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotDomain {
    Attr(AttrDomain),
    /// `before` / `after`, choosing between the two relate kinds.
    Relation,
}

impl SlotDomain {
    fn from_prefix(prefix: &str) -> Option<SlotDomain> {
        Some(match prefix {
            "I" => SlotDomain::Attr(AttrDomain::Instrument),
            "N" => SlotDomain::Attr(AttrDomain::Note),
            "B" => SlotDomain::Attr(AttrDomain::Brightness),
            "L" => SlotDomain::Attr(AttrDomain::Loudness),
            "GP" => SlotDomain::Attr(AttrDomain::GlobalPosition),
            "ORD" => SlotDomain::Attr(AttrDomain::Ordinal),
            "REL" => SlotDomain::Relation,
            _ => return None,
        })
    }

    /// Every admissible spelling, in a fixed order.
    pub fn values(self) -> Vec<String> {
        match self {
            SlotDomain::Attr(d) => d.values().iter().map(ToString::to_string).collect(),
            SlotDomain::Relation => vec!["before".into(), "after".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkeletonKind {
    Fixed(NodeKind),
    /// Relate node whose direction is bound by a `<REL>` slot.
    Relation(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkeletonArg {
    None,
    Literal(AttrValue),
    Slot(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonNode {
    pub kind: SkeletonKind,
    pub arg: SkeletonArg,
    pub inputs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub template_id: String,
    pub question_type: QuestionType,
    pub text: String,
    pub skeleton: Vec<SkeletonNode>,
    /// Placeholders in order of first appearance in `text`.
    pub slots: Vec<(String, SlotDomain)>,
    /// Slot tuples whose bound values must not all coincide.
    pub distinct: Vec<(Vec<String>, Vec<String>)>,
}

/// Placeholder names (`I1`, `REL2`, ...) in order of first appearance.
fn placeholders(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find('<') {
        let Some(len) = rest[start..].find('>') else {
            break;
        };
        let name = &rest[start + 1..start + len];
        if !out.iter().any(|n| n == name) {
            out.push(name.to_string());
        }
        rest = &rest[start + len + 1..];
    }
    out
}

fn slot_domain(name: &str) -> Option<SlotDomain> {
    let split = name.find(|c: char| c.is_ascii_digit())?;
    let (prefix, digits) = name.split_at(split);
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    SlotDomain::from_prefix(prefix)
}

impl Template {
    /// Builds a template from its text and a skeleton written one node per
    /// `;`-separated step: `kind`, `kind:<SLOT>`, `kind:literal` or `<RELn>`,
    /// optionally followed by `@i,j` inputs. Unary steps without `@` consume
    /// the previous step.
    pub fn parse(
        template_id: &str,
        question_type: QuestionType,
        text: &str,
        skeleton: &str,
    ) -> Result<Template, TemplateError> {
        let err = |detail: String| TemplateError::Skeleton {
            template: template_id.to_string(),
            detail,
        };
        let mut slots = Vec::new();
        for name in placeholders(text) {
            let domain =
                slot_domain(&name).ok_or_else(|| err(format!("unknown placeholder <{name}>")))?;
            slots.push((name, domain));
        }
        let slot_of = |raw: &str| -> Result<Option<String>, TemplateError> {
            match raw.strip_prefix('<').and_then(|r| r.strip_suffix('>')) {
                Some(name) if slots.iter().any(|(n, _)| n == name) => Ok(Some(name.to_string())),
                Some(name) => Err(err(format!("<{name}> does not appear in the text"))),
                None => Ok(None),
            }
        };

        let mut nodes: Vec<SkeletonNode> = Vec::new();
        for (i, step) in skeleton.split(';').map(str::trim).enumerate() {
            let (head, explicit) = match step.split_once('@') {
                Some((h, ins)) => {
                    let parsed: Result<Vec<usize>, _> =
                        ins.split(',').map(|x| x.trim().parse()).collect();
                    (
                        h.trim(),
                        Some(parsed.map_err(|e| err(format!("step {i}: {e}")))?),
                    )
                }
                None => (step, None),
            };
            let (kind_raw, arg_raw) = match head.split_once(':') {
                Some((k, a)) => (k, Some(a)),
                None => (head, None),
            };
            let kind = match slot_of(kind_raw)? {
                Some(name) => SkeletonKind::Relation(name),
                None => SkeletonKind::Fixed(
                    kind_raw
                        .parse()
                        .map_err(|e: ProgramError| err(e.to_string()))?,
                ),
            };
            let arity = match &kind {
                SkeletonKind::Fixed(k) => k.signature().inputs.len(),
                SkeletonKind::Relation(_) => 1,
            };
            let arg = match arg_raw {
                None => SkeletonArg::None,
                Some(raw) => match slot_of(raw)? {
                    Some(name) => SkeletonArg::Slot(name),
                    None => {
                        let SkeletonKind::Fixed(k) = &kind else {
                            return Err(err(format!("step {i}: relation takes no argument")));
                        };
                        let domain = k
                            .signature()
                            .arg
                            .ok_or_else(|| err(format!("step {i}: {k} takes no argument")))?;
                        SkeletonArg::Literal(
                            AttrValue::parse_in(domain, raw)
                                .ok_or_else(|| err(format!("step {i}: bad literal '{raw}'")))?,
                        )
                    }
                },
            };
            let inputs = match explicit {
                Some(v) => v,
                None if arity == 0 => vec![],
                None if arity == 1 && i > 0 => vec![i - 1],
                None => return Err(err(format!("step {i}: inputs required"))),
            };
            nodes.push(SkeletonNode { kind, arg, inputs });
        }

        let template = Template {
            template_id: template_id.to_string(),
            question_type,
            text: text.to_string(),
            skeleton: nodes,
            slots,
            distinct: Vec::new(),
        };
        template.check()?;
        Ok(template)
    }

    pub fn with_distinct(mut self, a: &[&str], b: &[&str]) -> Self {
        self.distinct.push((
            a.iter().map(ToString::to_string).collect(),
            b.iter().map(ToString::to_string).collect(),
        ));
        self
    }

    /// Each slot feeds exactly one skeleton position, and the skeleton
    /// type-checks with an answer matching the question type.
    fn check(&self) -> Result<(), TemplateError> {
        let err = |detail: String| TemplateError::Skeleton {
            template: self.template_id.clone(),
            detail,
        };
        for (name, domain) in &self.slots {
            let uses: Vec<&SkeletonNode> = self
                .skeleton
                .iter()
                .filter(|n| match (&n.kind, &n.arg) {
                    (SkeletonKind::Relation(s), _) => s == name,
                    (_, SkeletonArg::Slot(s)) => s == name,
                    _ => false,
                })
                .collect();
            if uses.len() != 1 {
                return Err(err(format!(
                    "<{name}> is used {} times in the skeleton",
                    uses.len()
                )));
            }
            let fits = match (&uses[0].kind, domain) {
                (SkeletonKind::Fixed(k), SlotDomain::Attr(d)) => k.signature().arg == Some(*d),
                (SkeletonKind::Relation(_), SlotDomain::Relation) => true,
                _ => false,
            };
            if !fits {
                return Err(err(format!("<{name}> does not fit its skeleton position")));
            }
        }
        let bindings: BTreeMap<String, String> = self
            .slots
            .iter()
            .map(|(n, d)| (n.clone(), d.values()[0].clone()))
            .collect();
        let (_, program) = self.instantiate(&bindings)?;
        let root = program
            .validate()
            .map_err(|source| TemplateError::Program {
                template: self.template_id.clone(),
                source,
            })?;
        use crate::program::ValueType as T;
        let expected = match self.question_type {
            QuestionType::YesNo => T::Boolean,
            QuestionType::Note => T::Note,
            QuestionType::Instrument => T::Instrument,
            QuestionType::Brightness => T::Brightness,
            QuestionType::Loudness => T::Loudness,
            QuestionType::Counting => T::Integer,
            QuestionType::AbsolutePosition | QuestionType::RelativePosition => T::Position,
            QuestionType::GlobalPosition => T::GlobalPosition,
        };
        if root != expected {
            return Err(err(format!(
                "root is {root:?}, {} needs {expected:?}",
                self.question_type
            )));
        }
        let query_matches = match self.question_type {
            QuestionType::AbsolutePosition => {
                self.skeleton.last().map(|n| &n.kind)
                    == Some(&SkeletonKind::Fixed(NodeKind::QueryAbsolutePosition))
            }
            QuestionType::RelativePosition => {
                self.skeleton.last().map(|n| &n.kind)
                    == Some(&SkeletonKind::Fixed(NodeKind::QueryRelativePosition))
            }
            _ => true,
        };
        if !query_matches {
            return Err(err("position query does not match the question type".into()));
        }
        Ok(())
    }

    /// True iff the skeleton has a relate or same node.
    pub fn is_relational(&self) -> bool {
        self.skeleton.iter().any(|n| match &n.kind {
            SkeletonKind::Relation(_) => true,
            SkeletonKind::Fixed(k) => k.is_relational(),
        })
    }

    /// Substitutes `bindings` into the text and the skeleton.
    pub fn instantiate(
        &self,
        bindings: &BTreeMap<String, String>,
    ) -> Result<(String, Program), TemplateError> {
        for slot in bindings.keys() {
            if !self.slots.iter().any(|(n, _)| n == slot) {
                return Err(TemplateError::UnknownSlot {
                    template: self.template_id.clone(),
                    slot: slot.clone(),
                });
            }
        }
        let mut values: BTreeMap<&str, (SlotDomain, &str)> = BTreeMap::new();
        for (name, domain) in &self.slots {
            let value = bindings
                .get(name)
                .ok_or_else(|| TemplateError::MissingBinding {
                    template: self.template_id.clone(),
                    slot: name.clone(),
                })?;
            if !domain.values().iter().any(|v| v == value) {
                return Err(TemplateError::InvalidBinding {
                    template: self.template_id.clone(),
                    slot: name.clone(),
                    value: value.clone(),
                });
            }
            values.insert(name, (*domain, value));
        }

        let mut text = self.text.clone();
        for (name, (_, value)) in &values {
            text = text.replace(&format!("<{name}>"), value);
        }

        let nodes = self
            .skeleton
            .iter()
            .map(|n| {
                let kind = match &n.kind {
                    SkeletonKind::Fixed(k) => *k,
                    SkeletonKind::Relation(slot) => {
                        if values[slot.as_str()].1 == "before" {
                            NodeKind::RelateBefore
                        } else {
                            NodeKind::RelateAfter
                        }
                    }
                };
                let value_arg = match &n.arg {
                    SkeletonArg::None => None,
                    SkeletonArg::Literal(v) => Some(*v),
                    SkeletonArg::Slot(slot) => match values[slot.as_str()] {
                        (SlotDomain::Attr(d), v) => AttrValue::parse_in(d, v),
                        (SlotDomain::Relation, _) => None,
                    },
                };
                ProgramNode {
                    kind,
                    value_arg,
                    inputs: n.inputs.clone(),
                }
            })
            .collect();
        Ok((text, Program::new(nodes)))
    }

    /// Whether `bindings` satisfies the template's distinctness constraints.
    pub fn bindings_distinct(&self, bindings: &BTreeMap<String, String>) -> bool {
        self.distinct.iter().all(|(a, b)| {
            let pick = |slots: &Vec<String>| -> Vec<Option<&String>> {
                slots.iter().map(|s| bindings.get(s)).collect()
            };
            pick(a) != pick(b)
        })
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}): {}",
            self.template_id, self.question_type, self.text
        )
    }
}

/// Attribute bindings recorded with each question.
pub type Bindings = BTreeMap<String, String>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soundbank::InstrumentFamily;

    fn as_loud() -> Template {
        Template::parse(
            "t",
            QuestionType::YesNo,
            "Is the <I1> as loud as the <I2>?",
            "scene; filter_instrument:<I1>; unique; scene; filter_instrument:<I2>; unique; equal_loudness@2,5",
        )
        .unwrap()
    }

    fn bind(pairs: &[(&str, &str)]) -> Bindings {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn instantiates_text_and_program() {
        let (text, program) = as_loud()
            .instantiate(&bind(&[("I1", "cello"), ("I2", "flute")]))
            .unwrap();
        assert_eq!(text, "Is the cello as loud as the flute?");
        assert_eq!(program.nodes.len(), 7);
        assert_eq!(
            program.nodes[1].value_arg,
            Some(AttrValue::Instrument(InstrumentFamily::Cello))
        );
        assert_eq!(
            program.nodes[4].value_arg,
            Some(AttrValue::Instrument(InstrumentFamily::Flute))
        );
        assert_eq!(program.nodes[6].inputs, vec![2, 5]);
        assert_eq!(program.nodes[6].kind, NodeKind::EqualLoudness);
    }

    #[test]
    fn rejects_bad_bindings() {
        let t = as_loud();
        assert!(matches!(
            t.instantiate(&bind(&[("I1", "piano"), ("I2", "flute")])),
            Err(TemplateError::InvalidBinding { .. })
        ));
        assert!(matches!(
            t.instantiate(&bind(&[("I1", "cello")])),
            Err(TemplateError::MissingBinding { .. })
        ));
        assert!(matches!(
            t.instantiate(&bind(&[("I1", "cello"), ("I2", "flute"), ("N1", "A")])),
            Err(TemplateError::UnknownSlot { .. })
        ));
    }

    #[test]
    fn relation_slot_selects_relate_kind() {
        let t = Template::parse(
            "r",
            QuestionType::Loudness,
            "What is the loudness of the <I1> playing <REL1> the <ORD1> <I2>?",
            "scene; filter_instrument:<I2>; filter_relative_position:<ORD1>; unique; <REL1>; filter_instrument:<I1>; unique; query_loudness",
        )
        .unwrap();
        assert!(t.is_relational());
        let b = bind(&[
            ("I1", "violin"),
            ("REL1", "before"),
            ("ORD1", "third"),
            ("I2", "trumpet"),
        ]);
        let (text, p) = t.instantiate(&b).unwrap();
        assert_eq!(
            text,
            "What is the loudness of the violin playing before the third trumpet?"
        );
        assert_eq!(p.nodes[4].kind, NodeKind::RelateBefore);
        let mut b = b;
        b.insert("REL1".into(), "after".into());
        assert_eq!(
            t.instantiate(&b).unwrap().1.nodes[4].kind,
            NodeKind::RelateAfter
        );
    }

    #[test]
    fn malformed_skeletons_are_rejected() {
        let bad =
            |text: &str, skeleton: &str, qt| Template::parse("x", qt, text, skeleton).is_err();
        // Slot never consumed.
        assert!(bad(
            "How many <I1> sounds?",
            "scene; count",
            QuestionType::Counting
        ));
        // Slot consumed twice.
        assert!(bad(
            "How many <I1> sounds?",
            "scene; filter_instrument:<I1>; filter_instrument:<I1>; count",
            QuestionType::Counting
        ));
        // Wrong domain.
        assert!(bad(
            "How many <N1> sounds?",
            "scene; filter_instrument:<N1>; count",
            QuestionType::Counting
        ));
        // Root does not match the type.
        assert!(bad(
            "How many <I1> sounds?",
            "scene; filter_instrument:<I1>; count",
            QuestionType::YesNo
        ));
        // Unknown placeholder.
        assert!(bad(
            "How many <X1> sounds?",
            "scene; count",
            QuestionType::Counting
        ));
    }

    #[test]
    fn distinctness() {
        let t = as_loud().with_distinct(&["I1"], &["I2"]);
        assert!(t.bindings_distinct(&bind(&[("I1", "cello"), ("I2", "flute")])));
        assert!(!t.bindings_distinct(&bind(&[("I1", "cello"), ("I2", "cello")])));
    }
}
