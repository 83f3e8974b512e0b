//! Stream instances and their schema.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::float::Float;

/// One attribute value: a finite real or a nominal category index.
///
/// Cardinality of nominal attributes lives in the [`StreamSchema`];
/// [`StreamSchema::validate`] enforces `index < cardinality`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureValue<F: Float> {
    Numeric(F),
    Nominal(u32),
}

impl<F: Float> FeatureValue<F> {
    pub fn as_numeric(&self) -> Option<F> {
        match self {
            FeatureValue::Numeric(v) => Some(*v),
            FeatureValue::Nominal(_) => None,
        }
    }

    pub fn as_nominal(&self) -> Option<u32> {
        match self {
            FeatureValue::Numeric(_) => None,
            FeatureValue::Nominal(v) => Some(*v),
        }
    }
}

/// Kind of an attribute, with the nominal value domain in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttributeKind {
    Numeric,
    Nominal { values: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttributeKind,
}

impl Attribute {
    pub fn numeric(name: impl Into<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Numeric,
        }
    }

    pub fn nominal(name: impl Into<String>, values: Vec<String>) -> Self {
        Attribute {
            name: name.into(),
            kind: AttributeKind::Nominal { values },
        }
    }

    /// Nominal attribute with `card` synthetic value names `v0..v{card-1}`.
    pub fn nominal_with_cardinality(name: impl Into<String>, card: usize) -> Self {
        Self::nominal(name, (0..card).map(|i| format!("v{i}")).collect())
    }

    pub fn cardinality(&self) -> Option<usize> {
        match &self.kind {
            AttributeKind::Numeric => None,
            AttributeKind::Nominal { values } => Some(values.len()),
        }
    }
}

/// Attribute layout and class labels of a stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamSchema {
    attributes: Vec<Attribute>,
    classes: Vec<String>,
}

impl StreamSchema {
    pub fn new(attributes: Vec<Attribute>, classes: Vec<String>) -> Result<Self> {
        if attributes.is_empty() {
            return Err(Error::Schema("schema needs at least one attribute".into()));
        }
        if classes.len() < 2 {
            return Err(Error::Schema(format!(
                "schema needs at least two classes, got {}",
                classes.len()
            )));
        }
        Ok(StreamSchema {
            attributes,
            classes,
        })
    }

    /// Schema with `attrs` numeric attributes and `classes` synthetic labels.
    pub fn numeric(attrs: usize, classes: usize) -> Result<Self> {
        Self::new(
            (0..attrs)
                .map(|i| Attribute::numeric(format!("att{}", i + 1)))
                .collect(),
            (0..classes).map(|c| format!("class{c}")).collect(),
        )
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    /// Number of class labels `p`.
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == name)
    }

    /// Check an instance against the schema: attribute count, value kinds,
    /// nominal ranges, finiteness and label range.
    pub fn validate<F: Float>(&self, inst: &Instance<F>) -> Result<()> {
        if inst.features.len() != self.attributes.len() {
            return Err(Error::Schema(format!(
                "expected {} attributes, got {}",
                self.attributes.len(),
                inst.features.len()
            )));
        }
        for (i, (value, attr)) in inst.features.iter().zip(&self.attributes).enumerate() {
            match (value, &attr.kind) {
                (FeatureValue::Numeric(v), AttributeKind::Numeric) => {
                    if !v.is_finite() {
                        return Err(Error::Schema(format!(
                            "attribute {i} ({}) is not finite",
                            attr.name
                        )));
                    }
                }
                (FeatureValue::Nominal(v), AttributeKind::Nominal { values }) => {
                    if *v as usize >= values.len() {
                        return Err(Error::Schema(format!(
                            "attribute {i} ({}) index {v} out of range 0..{}",
                            attr.name,
                            values.len()
                        )));
                    }
                }
                _ => {
                    return Err(Error::Schema(format!(
                        "attribute {i} ({}) has the wrong kind",
                        attr.name
                    )));
                }
            }
        }
        if inst.label >= self.class_count() {
            return Err(Error::Schema(format!(
                "label {} out of range 0..{}",
                inst.label,
                self.class_count()
            )));
        }
        if inst.weight.is_nan() || inst.weight < F::zero() {
            return Err(Error::Schema("instance weight must be non-negative".into()));
        }
        Ok(())
    }
}

/// One labelled stream record.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance<F: Float> {
    pub features: Vec<FeatureValue<F>>,
    /// True class index in `0..p`.
    pub label: usize,
    /// Training weight, 1 unless a caller says otherwise.
    pub weight: F,
}

impl<F: Float> Instance<F> {
    pub fn new(features: Vec<FeatureValue<F>>, label: usize) -> Self {
        Instance {
            features,
            label,
            weight: F::one(),
        }
    }

    pub fn with_weight(features: Vec<FeatureValue<F>>, label: usize, weight: F) -> Self {
        Instance {
            features,
            label,
            weight,
        }
    }

    /// All-numeric constructor, the common case for synthetic generators.
    pub fn from_numeric(values: &[F], label: usize) -> Self {
        Instance::new(
            values.iter().map(|&v| FeatureValue::Numeric(v)).collect(),
            label,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> StreamSchema {
        StreamSchema::new(
            vec![
                Attribute::numeric("x"),
                Attribute::nominal("color", vec!["r".into(), "g".into(), "b".into()]),
            ],
            vec!["no".into(), "yes".into()],
        )
        .unwrap()
    }

    #[test]
    fn schema_rejects_degenerate_shapes() {
        assert!(StreamSchema::new(vec![], vec!["a".into(), "b".into()]).is_err());
        assert!(StreamSchema::new(vec![Attribute::numeric("x")], vec!["a".into()]).is_err());
    }

    #[test]
    fn validate_accepts_well_formed_instance() {
        let s = schema();
        let inst = Instance::new(
            vec![FeatureValue::Numeric(1.5f64), FeatureValue::Nominal(2)],
            1,
        );
        assert!(s.validate(&inst).is_ok());
    }

    #[test]
    fn validate_rejects_nominal_out_of_range() {
        let s = schema();
        let inst = Instance::new(
            vec![FeatureValue::Numeric(1.5f64), FeatureValue::Nominal(3)],
            0,
        );
        assert!(matches!(s.validate(&inst), Err(Error::Schema(_))));
    }

    #[test]
    fn validate_rejects_non_finite_numeric() {
        let s = schema();
        let inst = Instance::new(
            vec![FeatureValue::Numeric(f64::NAN), FeatureValue::Nominal(0)],
            0,
        );
        assert!(s.validate(&inst).is_err());
        let inst = Instance::new(
            vec![
                FeatureValue::Numeric(f64::INFINITY),
                FeatureValue::Nominal(0),
            ],
            0,
        );
        assert!(s.validate(&inst).is_err());
    }

    #[test]
    fn validate_rejects_bad_label_and_length() {
        let s = schema();
        let inst = Instance::new(
            vec![FeatureValue::Numeric(0.0f64), FeatureValue::Nominal(0)],
            2,
        );
        assert!(s.validate(&inst).is_err());
        let inst = Instance::new(vec![FeatureValue::Numeric(0.0f64)], 0);
        assert!(s.validate(&inst).is_err());
    }

    #[test]
    fn default_weight_is_one() {
        let inst = Instance::<f64>::from_numeric(&[1.0, 2.0], 0);
        assert_eq!(inst.weight, 1.0);
    }
}
