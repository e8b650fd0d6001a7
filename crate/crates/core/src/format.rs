//! JSON documents for elements, closure descriptors and witnesses.
//!
//! Rationals are written as strings (`"-3/4"`), residues as numbers; both
//! forms are accepted on input. The field is given by `"field": "Q"` or
//! `"field": "Fp", "p": 7`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldElement, FieldError, FieldSpec};
use crate::lattice::{ClosureWitness, NormalSubgroupDescriptor};
use crate::matrices::{BandRule, DenseMatrix, Element, FinitaryMatrix, Generator, GroupWord, MatrixError, Presentation, ScaledFinitary, StringMatrix, Tail, UpperTriangularOracle};
use crate::procedures::{TransvectionWitness, WitnessLetter};
use crate::unit_groups::{PairSubgroup, UnitGroupError, UnitSubgroup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    /// Malformed JSON; the message carries line and column.
    #[error("parse error: {0}")]
    Json(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    UnitGroup(#[from] UnitGroupError),
    #[error("invalid document: {0}")]
    Invalid(String),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "field")]
pub enum FieldDoc {
    Q,
    Fp { p: u64 },
}

impl FieldDoc {
    pub fn of(spec: FieldSpec) -> Self {
        match spec.modulus() {
            Some(p) => FieldDoc::Fp { p },
            None => FieldDoc::Q,
        }
    }

    pub fn spec(&self) -> Result<FieldSpec, FormatError> {
        Ok(match self {
            FieldDoc::Q => FieldSpec::rationals(),
            FieldDoc::Fp { p } => FieldSpec::prime(*p)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueDoc {
    Int(i64),
    Str(String),
}

impl ValueDoc {
    pub fn of(x: &FieldElement) -> Self {
        match x.residue() {
            Some(r) => ValueDoc::Int(r as i64),
            None => ValueDoc::Str(x.to_string()),
        }
    }

    pub fn parse(&self, spec: FieldSpec) -> Result<FieldElement, FormatError> {
        Ok(match self {
            ValueDoc::Int(v) => FieldElement::from_int(spec, *v),
            ValueDoc::Str(s) => FieldElement::parse(spec, s)?,
        })
    }
}

type Rows = Vec<Vec<ValueDoc>>;

fn rows_of(m: &DenseMatrix) -> Rows {
    m.to_rows().iter().map(|r| r.iter().map(ValueDoc::of).collect()).collect()
}

fn parse_rows(spec: FieldSpec, rows: &Rows) -> Result<DenseMatrix, FormatError> {
    let rows = rows.iter().map(|r| r.iter().map(|v| v.parse(spec)).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
    Ok(DenseMatrix::from_rows(spec, rows)?)
}

/// Entries `(i, j, v)` of `g − E`.
pub type DeltaDoc = Vec<(usize, usize, ValueDoc)>;

fn delta_of(g: &FinitaryMatrix) -> DeltaDoc {
    g.delta().iter().map(|(&(i, j), v)| (i, j, ValueDoc::of(v))).collect()
}

fn parse_delta(spec: FieldSpec, delta: &DeltaDoc) -> Result<FinitaryMatrix, FormatError> {
    let entries = delta.iter().map(|(i, j, v)| Ok((*i, *j, v.parse(spec)?))).collect::<Result<Vec<_>, FormatError>>()?;
    Ok(FinitaryMatrix::from_delta(spec, entries)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TailDoc {
    Identity,
    Periodic { block: Rows },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangularDoc {
    Prefix(Rows),
    Toeplitz { diagonal: ValueDoc, superdiagonals: Vec<ValueDoc> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterDoc {
    #[serde(default)]
    pub inverted: bool,
    pub element: BodyDoc,
}

/// The kind-tagged payload of an element or word letter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BodyDoc {
    Finitary { delta: DeltaDoc },
    Scaled { scalar: ValueDoc, delta: DeltaDoc },
    String { blocks: Vec<Rows>, tail: TailDoc },
    Triangular { presentation: TriangularDoc },
    Word { letters: Vec<LetterDoc> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDocument {
    #[serde(flatten)]
    pub field: FieldDoc,
    #[serde(flatten)]
    pub body: BodyDoc,
}

fn string_doc(s: &StringMatrix) -> BodyDoc {
    BodyDoc::String {
        blocks: s.blocks().iter().map(rows_of).collect(),
        tail: match s.tail() {
            Tail::Identity => TailDoc::Identity,
            Tail::Periodic(b) => TailDoc::Periodic { block: rows_of(b) },
        },
    }
}

fn generator_doc(g: &Generator) -> Result<BodyDoc, FormatError> {
    Ok(match g {
        Generator::Finitary(m) => BodyDoc::Finitary { delta: delta_of(m) },
        Generator::Scaled(m) => BodyDoc::Scaled { scalar: ValueDoc::of(m.scalar()), delta: delta_of(m.body()) },
        Generator::String(s) => string_doc(s),
        Generator::Triangular(u) => BodyDoc::Triangular {
            presentation: match u.presentation() {
                Presentation::ExplicitPrefix(p) => TriangularDoc::Prefix(rows_of(p)),
                Presentation::Banded { rule: BandRule::Toeplitz { diagonal, superdiagonals }, .. } => TriangularDoc::Toeplitz {
                    diagonal: ValueDoc::of(diagonal),
                    superdiagonals: superdiagonals.iter().map(ValueDoc::of).collect(),
                },
                Presentation::Banded { rule: BandRule::Custom(_), .. } => {
                    return Err(FormatError::Invalid("custom triangular rules cannot be serialized".into()))
                }
            },
        },
    })
}

fn body_of(e: &Element) -> Result<BodyDoc, FormatError> {
    Ok(match e {
        Element::Finitary(m) => BodyDoc::Finitary { delta: delta_of(m) },
        Element::Scaled(m) => BodyDoc::Scaled { scalar: ValueDoc::of(m.scalar()), delta: delta_of(m.body()) },
        Element::String(s) => string_doc(s),
        Element::Word(w) => BodyDoc::Word {
            letters: w
                .letters()
                .iter()
                .map(|l| Ok(LetterDoc { inverted: l.inverted(), element: generator_doc(l.generator())? }))
                .collect::<Result<_, FormatError>>()?,
        },
    })
}

fn parse_generator(spec: FieldSpec, body: &BodyDoc) -> Result<Generator, FormatError> {
    Ok(match body {
        BodyDoc::Triangular { presentation } => Generator::Triangular(match presentation {
            TriangularDoc::Prefix(rows) => UpperTriangularOracle::explicit(parse_rows(spec, rows)?)?,
            TriangularDoc::Toeplitz { diagonal, superdiagonals } => UpperTriangularOracle::toeplitz(
                diagonal.parse(spec)?,
                superdiagonals.iter().map(|v| v.parse(spec)).collect::<Result<_, _>>()?,
            )?,
        }),
        BodyDoc::Word { .. } => return Err(FormatError::Invalid("word letters cannot be words".into())),
        other => match parse_body(spec, other)? {
            Element::Finitary(m) => Generator::Finitary(m),
            Element::Scaled(m) => Generator::Scaled(m),
            Element::String(s) => Generator::String(s),
            Element::Word(_) => unreachable!("handled above"),
        },
    })
}

fn parse_body(spec: FieldSpec, body: &BodyDoc) -> Result<Element, FormatError> {
    Ok(match body {
        BodyDoc::Finitary { delta } => Element::Finitary(parse_delta(spec, delta)?),
        BodyDoc::Scaled { scalar, delta } => Element::Scaled(ScaledFinitary::new(scalar.parse(spec)?, parse_delta(spec, delta)?)?),
        BodyDoc::String { blocks, tail } => {
            let blocks = blocks.iter().map(|b| parse_rows(spec, b)).collect::<Result<_, _>>()?;
            let tail = match tail {
                TailDoc::Identity => Tail::Identity,
                TailDoc::Periodic { block } => Tail::Periodic(parse_rows(spec, block)?),
            };
            Element::String(StringMatrix::new(spec, blocks, tail)?)
        }
        BodyDoc::Triangular { .. } => {
            // a lone triangular oracle is a one-letter word
            Element::Word(GroupWord::from_letters(spec, vec![(parse_generator(spec, body)?, false)])?)
        }
        BodyDoc::Word { letters } => {
            let mut w = GroupWord::new(spec);
            for l in letters {
                w.push(parse_generator(spec, &l.element)?, l.inverted)?;
            }
            Element::Word(w)
        }
    })
}

impl ElementDocument {
    pub fn of(e: &Element) -> Result<Self, FormatError> {
        Ok(ElementDocument { field: FieldDoc::of(e.spec()), body: body_of(e)? })
    }

    pub fn to_element(&self) -> Result<Element, FormatError> {
        parse_body(self.field.spec()?, &self.body)
    }
}

pub fn element_to_json(e: &Element) -> Result<String, FormatError> {
    Ok(serde_json::to_string_pretty(&ElementDocument::of(e)?)?)
}

pub fn element_from_json(s: &str) -> Result<Element, FormatError> {
    serde_json::from_str::<ElementDocument>(s)?.to_element()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum DescriptorBody {
    Central {
        gens: Vec<ValueDoc>,
        #[serde(default)]
        full: bool,
    },
    Sandwich {
        gens: Vec<(ValueDoc, ValueDoc)>,
        #[serde(default)]
        full: [bool; 2],
    },
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorDocument {
    #[serde(flatten)]
    pub field: FieldDoc,
    #[serde(flatten)]
    pub body: DescriptorBody,
}

impl DescriptorDocument {
    /// Canonical generators; `Full` carries the field it was computed over.
    pub fn of(spec: FieldSpec, d: &NormalSubgroupDescriptor) -> Self {
        let body = match d.canonical() {
            NormalSubgroupDescriptor::Central(h) => DescriptorBody::Central {
                gens: h.canonical_generators().iter().map(ValueDoc::of).collect(),
                full: spec.is_rationals() && h.is_full(),
            },
            NormalSubgroupDescriptor::Sandwich(s) => DescriptorBody::Sandwich {
                gens: s.canonical_generators().iter().map(|(a, b)| (ValueDoc::of(a), ValueDoc::of(b))).collect(),
                full: s.full_flags(),
            },
            NormalSubgroupDescriptor::Full => DescriptorBody::Full,
        };
        DescriptorDocument { field: FieldDoc::of(spec), body }
    }

    pub fn to_descriptor(&self) -> Result<NormalSubgroupDescriptor, FormatError> {
        let spec = self.field.spec()?;
        let d = match &self.body {
            DescriptorBody::Central { gens, full: true } if gens.is_empty() => NormalSubgroupDescriptor::Central(UnitSubgroup::full(spec)),
            DescriptorBody::Central { gens, full } => {
                let gens = gens.iter().map(|g| g.parse(spec)).collect::<Result<_, _>>()?;
                let h = UnitSubgroup::new(spec, gens)?;
                NormalSubgroupDescriptor::Central(if *full { h.join(&UnitSubgroup::full(spec))? } else { h })
            }
            DescriptorBody::Sandwich { gens, full } => {
                let gens = gens.iter().map(|(a, b)| Ok((a.parse(spec)?, b.parse(spec)?))).collect::<Result<_, FormatError>>()?;
                NormalSubgroupDescriptor::Sandwich(PairSubgroup::with_full(spec, *full, gens)?)
            }
            DescriptorBody::Full => NormalSubgroupDescriptor::Full,
        };
        Ok(d.canonical())
    }
}

/// Certificate that the normal closure of `source` (times `scalar`) contains
/// the elementary transvection `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDocument {
    #[serde(flatten)]
    pub field: FieldDoc,
    pub source: DeltaDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<ValueDoc>,
    pub target: DeltaDoc,
    pub letters: Vec<WitnessLetterDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessLetterDoc {
    pub conjugator: DeltaDoc,
    pub exponent: i8,
}

impl WitnessDocument {
    pub fn of_transvection(source: &FinitaryMatrix, w: &TransvectionWitness) -> Self {
        WitnessDocument {
            field: FieldDoc::of(source.spec()),
            source: delta_of(source),
            scalar: None,
            target: delta_of(&w.target),
            letters: w.word.iter().map(|l| WitnessLetterDoc { conjugator: delta_of(&l.conjugator), exponent: l.exponent }).collect(),
        }
    }

    pub fn of_closure(w: &ClosureWitness) -> Self {
        let mut doc = Self::of_transvection(&w.source, &w.transvection);
        if !w.scalar.is_one() {
            doc.scalar = Some(ValueDoc::of(&w.scalar));
        }
        doc
    }

    /// `(source, scalar, witness)`.
    pub fn parse(&self) -> Result<(FinitaryMatrix, FieldElement, TransvectionWitness), FormatError> {
        let spec = self.field.spec()?;
        let source = parse_delta(spec, &self.source)?;
        let scalar = match &self.scalar {
            Some(v) => v.parse(spec)?,
            None => FieldElement::one(spec),
        };
        let word = self
            .letters
            .iter()
            .map(|l| Ok(WitnessLetter { conjugator: parse_delta(spec, &l.conjugator)?, exponent: l.exponent }))
            .collect::<Result<_, FormatError>>()?;
        Ok((source, scalar, TransvectionWitness { target: parse_delta(spec, &self.target)?, word }))
    }
}
