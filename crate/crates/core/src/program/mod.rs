//! Functional programs over symbolic scenes.
//!
//! A program is a list of nodes in which every node's inputs precede it and
//! the last node is the root. Evaluation yields an [`Answer`] or
//! [`Outcome::IllPosed`] when some `unique` node does not see exactly one
//! sound.

pub mod answer;
mod degenerate;
mod exec;
mod oracle;
pub mod random;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use answer::{Answer, NotAnAnswer, QuestionType};
pub use degenerate::{check_degenerate, check_degenerate_brute_force};
pub use exec::execute;
pub use oracle::brute_force_answer;

use crate::soundbank::{Brightness, GlobalPosition, InstrumentFamily, Loudness, Note, Ordinal};

/// Result of evaluating a well-formed program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Answer(Answer),
    IllPosed,
}

impl Outcome {
    pub fn answer(self) -> Option<Answer> {
        match self {
            Outcome::Answer(a) => Some(a),
            Outcome::IllPosed => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProgramError {
    #[error("program has no nodes")]
    Empty,
    #[error("unknown node kind '{0}'")]
    UnknownKind(String),
    #[error("node {node}: input {input} does not precede it")]
    ForwardReference { node: usize, input: usize },
    #[error("node {node} ({kind}): expected {expected} inputs, found {found}")]
    Arity {
        node: usize,
        kind: NodeKind,
        expected: usize,
        found: usize,
    },
    #[error("node {node} ({kind}): missing value argument")]
    MissingValueArg { node: usize, kind: NodeKind },
    #[error("node {node} ({kind}): takes no value argument")]
    UnexpectedValueArg { node: usize, kind: NodeKind },
    #[error("node {node} ({kind}): value argument '{value}' is not a {expected:?}")]
    WrongValueDomain {
        node: usize,
        kind: NodeKind,
        value: String,
        expected: AttrDomain,
    },
    #[error("node {node} ({kind}): input {slot} has type {found:?}, expected {expected:?}")]
    TypeMismatch {
        node: usize,
        kind: NodeKind,
        slot: usize,
        expected: ValueType,
        found: ValueType,
    },
    #[error("root produces {0:?}, which is not an answer")]
    RootNotAnswer(ValueType),
    #[error("node {0} does not contribute to the root")]
    Unreachable(usize),
    #[error("scene has {0} sounds; programs support at most 10")]
    SceneTooLarge(usize),
    #[error("scene sound {0} has no valid position")]
    BadPosition(usize),
}

/// Static type of a node's output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueType {
    Set,
    Sound,
    Integer,
    Boolean,
    Instrument,
    Note,
    Brightness,
    Loudness,
    Position,
    GlobalPosition,
}

impl ValueType {
    pub fn is_answer(self) -> bool {
        !matches!(self, ValueType::Set | ValueType::Sound)
    }
}

/// Attribute domain of a filter's value argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttrDomain {
    Instrument,
    Note,
    Brightness,
    Loudness,
    GlobalPosition,
    Ordinal,
}

/// Literal carried by filter nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttrValue {
    Instrument(InstrumentFamily),
    Note(Note),
    Brightness(Brightness),
    Loudness(Loudness),
    GlobalPosition(GlobalPosition),
    Ordinal(Ordinal),
}

impl AttrValue {
    pub fn domain(&self) -> AttrDomain {
        match self {
            AttrValue::Instrument(_) => AttrDomain::Instrument,
            AttrValue::Note(_) => AttrDomain::Note,
            AttrValue::Brightness(_) => AttrDomain::Brightness,
            AttrValue::Loudness(_) => AttrDomain::Loudness,
            AttrValue::GlobalPosition(_) => AttrDomain::GlobalPosition,
            AttrValue::Ordinal(_) => AttrDomain::Ordinal,
        }
    }

    pub fn parse_in(domain: AttrDomain, s: &str) -> Option<AttrValue> {
        match domain {
            AttrDomain::Instrument => s.parse().ok().map(AttrValue::Instrument),
            AttrDomain::Note => s.parse().ok().map(AttrValue::Note),
            AttrDomain::Brightness => s.parse().ok().map(AttrValue::Brightness),
            AttrDomain::Loudness => s.parse().ok().map(AttrValue::Loudness),
            AttrDomain::GlobalPosition => s.parse().ok().map(AttrValue::GlobalPosition),
            AttrDomain::Ordinal => s.parse().ok().map(AttrValue::Ordinal),
        }
    }
}

impl AttrDomain {
    /// Every value of the domain in a fixed order.
    pub fn values(self) -> Vec<AttrValue> {
        match self {
            AttrDomain::Instrument => InstrumentFamily::ALL
                .iter()
                .map(|v| AttrValue::Instrument(*v))
                .collect(),
            AttrDomain::Note => Note::ALL.iter().map(|v| AttrValue::Note(*v)).collect(),
            AttrDomain::Brightness => Brightness::ALL
                .iter()
                .map(|v| AttrValue::Brightness(*v))
                .collect(),
            AttrDomain::Loudness => Loudness::ALL
                .iter()
                .map(|v| AttrValue::Loudness(*v))
                .collect(),
            AttrDomain::GlobalPosition => GlobalPosition::ALL
                .iter()
                .map(|v| AttrValue::GlobalPosition(*v))
                .collect(),
            AttrDomain::Ordinal => Ordinal::all().map(AttrValue::Ordinal).collect(),
        }
    }
}

impl fmt::Display for AttrValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrValue::Instrument(v) => v.fmt(f),
            AttrValue::Note(v) => v.fmt(f),
            AttrValue::Brightness(v) => v.fmt(f),
            AttrValue::Loudness(v) => v.fmt(f),
            AttrValue::GlobalPosition(v) => v.fmt(f),
            AttrValue::Ordinal(v) => v.fmt(f),
        }
    }
}

macro_rules! node_kinds {
    ($($variant:ident => $label:literal),+ $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum NodeKind {
            $($variant),+
        }

        impl NodeKind {
            pub const ALL: &'static [NodeKind] = &[$(NodeKind::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(NodeKind::$variant => $label),+
                }
            }
        }

        impl FromStr for NodeKind {
            type Err = ProgramError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($label => Ok(NodeKind::$variant),)+
                    _ => Err(ProgramError::UnknownKind(s.to_string())),
                }
            }
        }
    };
}

node_kinds! {
    Scene => "scene",
    FilterInstrument => "filter_instrument",
    FilterNote => "filter_note",
    FilterBrightness => "filter_brightness",
    FilterLoudness => "filter_loudness",
    FilterGlobalPosition => "filter_global_position",
    FilterAbsolutePosition => "filter_absolute_position",
    FilterRelativePosition => "filter_relative_position",
    Unique => "unique",
    RelateBefore => "relate_before",
    RelateAfter => "relate_after",
    SameBrightness => "same_brightness",
    SameLoudness => "same_loudness",
    SameInstrument => "same_instrument",
    SameNote => "same_note",
    Count => "count",
    Exist => "exist",
    EqualInteger => "equal_integer",
    LessThan => "less_than",
    GreaterThan => "greater_than",
    EqualInstrument => "equal_instrument",
    EqualNote => "equal_note",
    EqualBrightness => "equal_brightness",
    EqualLoudness => "equal_loudness",
    QueryInstrument => "query_instrument",
    QueryNote => "query_note",
    QueryBrightness => "query_brightness",
    QueryLoudness => "query_loudness",
    QueryAbsolutePosition => "query_absolute_position",
    QueryRelativePosition => "query_relative_position",
    QueryGlobalPosition => "query_global_position",
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Input types, output type and value-argument domain of a node kind.
pub struct Signature {
    pub inputs: &'static [ValueType],
    pub output: ValueType,
    pub arg: Option<AttrDomain>,
}

impl NodeKind {
    pub fn signature(self) -> Signature {
        use NodeKind::*;
        use ValueType as T;
        let sig = |inputs, output, arg| Signature {
            inputs,
            output,
            arg,
        };
        match self {
            Scene => sig(&[], T::Set, None),
            FilterInstrument => sig(&[T::Set], T::Set, Some(AttrDomain::Instrument)),
            FilterNote => sig(&[T::Set], T::Set, Some(AttrDomain::Note)),
            FilterBrightness => sig(&[T::Set], T::Set, Some(AttrDomain::Brightness)),
            FilterLoudness => sig(&[T::Set], T::Set, Some(AttrDomain::Loudness)),
            FilterGlobalPosition => sig(&[T::Set], T::Set, Some(AttrDomain::GlobalPosition)),
            FilterAbsolutePosition | FilterRelativePosition => {
                sig(&[T::Set], T::Set, Some(AttrDomain::Ordinal))
            }
            Unique => sig(&[T::Set], T::Sound, None),
            RelateBefore | RelateAfter | SameBrightness | SameLoudness | SameInstrument
            | SameNote => sig(&[T::Sound], T::Set, None),
            Count => sig(&[T::Set], T::Integer, None),
            Exist => sig(&[T::Set], T::Boolean, None),
            EqualInteger | LessThan | GreaterThan => {
                sig(&[T::Integer, T::Integer], T::Boolean, None)
            }
            EqualInstrument | EqualNote | EqualBrightness | EqualLoudness => {
                sig(&[T::Sound, T::Sound], T::Boolean, None)
            }
            QueryInstrument => sig(&[T::Sound], T::Instrument, None),
            QueryNote => sig(&[T::Sound], T::Note, None),
            QueryBrightness => sig(&[T::Sound], T::Brightness, None),
            QueryLoudness => sig(&[T::Sound], T::Loudness, None),
            QueryAbsolutePosition | QueryRelativePosition => sig(&[T::Sound], T::Position, None),
            QueryGlobalPosition => sig(&[T::Sound], T::GlobalPosition, None),
        }
    }

    /// Nodes whose constraint is dropped by the degeneracy check.
    pub fn is_relational(self) -> bool {
        matches!(
            self,
            NodeKind::RelateBefore
                | NodeKind::RelateAfter
                | NodeKind::SameBrightness
                | NodeKind::SameLoudness
                | NodeKind::SameInstrument
                | NodeKind::SameNote
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProgramNode {
    pub kind: NodeKind,
    pub value_arg: Option<AttrValue>,
    pub inputs: Vec<usize>,
}

impl ProgramNode {
    pub fn new(kind: NodeKind, inputs: Vec<usize>) -> Self {
        Self {
            kind,
            value_arg: None,
            inputs,
        }
    }

    pub fn with_arg(kind: NodeKind, value: AttrValue, inputs: Vec<usize>) -> Self {
        Self {
            kind,
            value_arg: Some(value),
            inputs,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawNode {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value_arg: Option<String>,
    inputs: Vec<usize>,
}

impl Serialize for ProgramNode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawNode {
            kind: self.kind.as_str().to_string(),
            value_arg: self.value_arg.map(|v| v.to_string()),
            inputs: self.inputs.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProgramNode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RawNode::deserialize(deserializer)?;
        let kind: NodeKind = raw.kind.parse().map_err(D::Error::custom)?;
        let value_arg = match (raw.value_arg, kind.signature().arg) {
            (None, _) => None,
            (Some(v), Some(domain)) => Some(
                AttrValue::parse_in(domain, &v)
                    .ok_or_else(|| D::Error::custom(format!("'{v}' is not a valid {domain:?}")))?,
            ),
            (Some(v), None) => {
                return Err(D::Error::custom(format!(
                    "{kind} takes no value argument, got '{v}'"
                )))
            }
        };
        Ok(ProgramNode {
            kind,
            value_arg,
            inputs: raw.inputs,
        })
    }
}

/// Nodes in dependency order; the root is the last node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Program {
    pub nodes: Vec<ProgramNode>,
}

impl Program {
    pub fn new(nodes: Vec<ProgramNode>) -> Self {
        Self { nodes }
    }

    pub fn root(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    /// Type-checks the program and returns the root's output type.
    pub fn validate(&self) -> Result<ValueType, ProgramError> {
        if self.nodes.is_empty() {
            return Err(ProgramError::Empty);
        }
        let mut types = Vec::with_capacity(self.nodes.len());
        for (i, node) in self.nodes.iter().enumerate() {
            let sig = node.kind.signature();
            if node.inputs.len() != sig.inputs.len() {
                return Err(ProgramError::Arity {
                    node: i,
                    kind: node.kind,
                    expected: sig.inputs.len(),
                    found: node.inputs.len(),
                });
            }
            match (sig.arg, node.value_arg) {
                (Some(_), None) => {
                    return Err(ProgramError::MissingValueArg {
                        node: i,
                        kind: node.kind,
                    })
                }
                (None, Some(_)) => {
                    return Err(ProgramError::UnexpectedValueArg {
                        node: i,
                        kind: node.kind,
                    })
                }
                (Some(domain), Some(v)) if v.domain() != domain => {
                    return Err(ProgramError::WrongValueDomain {
                        node: i,
                        kind: node.kind,
                        value: v.to_string(),
                        expected: domain,
                    })
                }
                _ => {}
            }
            for (slot, (&input, &expected)) in node.inputs.iter().zip(sig.inputs).enumerate() {
                if input >= i {
                    return Err(ProgramError::ForwardReference { node: i, input });
                }
                let found: ValueType = types[input];
                if found != expected {
                    return Err(ProgramError::TypeMismatch {
                        node: i,
                        kind: node.kind,
                        slot,
                        expected,
                        found,
                    });
                }
            }
            types.push(sig.output);
        }
        let root_type = *types.last().expect("non-empty");
        if !root_type.is_answer() {
            return Err(ProgramError::RootNotAnswer(root_type));
        }
        let mut reachable = vec![false; self.nodes.len()];
        reachable[self.root()] = true;
        for i in (0..self.nodes.len()).rev() {
            if reachable[i] {
                for &input in &self.nodes[i].inputs {
                    reachable[input] = true;
                }
            }
        }
        if let Some(i) = reachable.iter().position(|r| !r) {
            return Err(ProgramError::Unreachable(i));
        }
        Ok(root_type)
    }
}

/// Appends nodes and returns their indices, keeping inputs before parents.
#[derive(Debug, Default, Clone)]
pub struct ProgramBuilder {
    nodes: Vec<ProgramNode>,
}

impl ProgramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, node: ProgramNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn scene(&mut self) -> usize {
        self.push(ProgramNode::new(NodeKind::Scene, vec![]))
    }

    pub fn unary(&mut self, kind: NodeKind, input: usize) -> usize {
        self.push(ProgramNode::new(kind, vec![input]))
    }

    pub fn binary(&mut self, kind: NodeKind, a: usize, b: usize) -> usize {
        self.push(ProgramNode::new(kind, vec![a, b]))
    }

    pub fn filter(&mut self, kind: NodeKind, value: AttrValue, input: usize) -> usize {
        self.push(ProgramNode::with_arg(kind, value, vec![input]))
    }

    pub fn build(self) -> Program {
        Program { nodes: self.nodes }
    }
}

/// Filter kind matching an attribute value's domain (ordinals map to
/// absolute position).
pub fn filter_kind_for(domain: AttrDomain) -> NodeKind {
    match domain {
        AttrDomain::Instrument => NodeKind::FilterInstrument,
        AttrDomain::Note => NodeKind::FilterNote,
        AttrDomain::Brightness => NodeKind::FilterBrightness,
        AttrDomain::Loudness => NodeKind::FilterLoudness,
        AttrDomain::GlobalPosition => NodeKind::FilterGlobalPosition,
        AttrDomain::Ordinal => NodeKind::FilterAbsolutePosition,
    }
}
