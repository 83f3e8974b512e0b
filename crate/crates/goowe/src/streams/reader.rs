//! File-backed streams: headerless CSV with a supplied schema, and a
//! practical ARFF subset (`@relation`, `@attribute` numeric / nominal,
//! `@data`).

use std::fs::File;
use std::io::{BufRead, BufReader, Lines};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::float::Float;
use crate::instance::{Attribute, AttributeKind, FeatureValue, Instance, StreamSchema};
use crate::streams::StreamSource;

/// Streams a headerless CSV file row by row against a known schema.
///
/// The class is the last column unless overridden; nominal values and class
/// labels are matched by name against the schema's declarations.
pub struct CsvStream<F: Float> {
    schema: Arc<StreamSchema>,
    lines: Lines<BufReader<File>>,
    line_no: usize,
    label_column: usize,
    _marker: std::marker::PhantomData<F>,
}

impl<F: Float> CsvStream<F> {
    pub fn open(path: impl AsRef<Path>, schema: Arc<StreamSchema>) -> Result<Self> {
        let label_column = schema.attribute_count();
        Self::open_with_label_column(path, schema, label_column)
    }

    /// `label_column` is the zero-based index of the class column.
    pub fn open_with_label_column(
        path: impl AsRef<Path>,
        schema: Arc<StreamSchema>,
        label_column: usize,
    ) -> Result<Self> {
        let file = File::open(path)?;
        Ok(CsvStream {
            schema,
            lines: BufReader::new(file).lines(),
            line_no: 0,
            label_column,
            _marker: std::marker::PhantomData,
        })
    }
}

impl<F: Float> StreamSource<F> for CsvStream<F> {
    fn schema(&self) -> &Arc<StreamSchema> {
        &self.schema
    }

    fn next_instance(&mut self) -> Result<Option<Instance<F>>> {
        loop {
            let Some(line) = self.lines.next() else {
                return Ok(None);
            };
            self.line_no += 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            return parse_row(&self.schema, &fields, self.label_column, self.line_no).map(Some);
        }
    }
}

/// Streams an ARFF file; the schema comes from the header and the last
/// attribute (which must be nominal) is the class.
pub struct ArffStream<F: Float> {
    schema: Arc<StreamSchema>,
    lines: Lines<BufReader<File>>,
    line_no: usize,
    _marker: std::marker::PhantomData<F>,
}

impl<F: Float> ArffStream<F> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        let mut lines = BufReader::new(file).lines();
        let mut line_no = 0;
        let mut attributes: Vec<Attribute> = Vec::new();
        loop {
            let Some(line) = lines.next() else {
                return Err(Error::Parse {
                    line: line_no,
                    message: "missing @data section".into(),
                });
            };
            line_no += 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('%') {
                continue;
            }
            let lower = trimmed.to_ascii_lowercase();
            if lower.starts_with("@relation") {
                continue;
            }
            if lower.starts_with("@data") {
                break;
            }
            if lower.starts_with("@attribute") {
                attributes.push(parse_arff_attribute(trimmed, line_no)?);
                continue;
            }
            return Err(Error::Parse {
                line: line_no,
                message: format!("unexpected header line: {trimmed}"),
            });
        }
        if attributes.len() < 2 {
            return Err(Error::Parse {
                line: line_no,
                message: "need at least one attribute and a class".into(),
            });
        }
        let class_attr = attributes.pop().unwrap();
        let AttributeKind::Nominal { values } = class_attr.kind else {
            return Err(Error::Parse {
                line: line_no,
                message: "class attribute must be nominal".into(),
            });
        };
        let schema = Arc::new(StreamSchema::new(attributes, values)?);
        Ok(ArffStream {
            schema,
            lines,
            line_no,
            _marker: std::marker::PhantomData,
        })
    }
}

impl<F: Float> StreamSource<F> for ArffStream<F> {
    fn schema(&self) -> &Arc<StreamSchema> {
        &self.schema
    }

    fn next_instance(&mut self) -> Result<Option<Instance<F>>> {
        loop {
            let Some(line) = self.lines.next() else {
                return Ok(None);
            };
            self.line_no += 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('%') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            let label_column = self.schema.attribute_count();
            return parse_row(&self.schema, &fields, label_column, self.line_no).map(Some);
        }
    }
}

fn parse_arff_attribute(line: &str, line_no: usize) -> Result<Attribute> {
    // "@attribute name numeric" or "@attribute name {a, b, c}"
    let rest = line["@attribute".len()..].trim();
    let (name, spec) = match rest.split_once(char::is_whitespace) {
        Some(parts) => parts,
        None => {
            return Err(Error::Parse {
                line: line_no,
                message: "attribute needs a name and a type".into(),
            })
        }
    };
    let name = name.trim_matches('\'').trim_matches('"');
    let spec = spec.trim();
    let lower = spec.to_ascii_lowercase();
    if lower == "numeric" || lower == "real" || lower == "integer" {
        return Ok(Attribute::numeric(name));
    }
    if spec.starts_with('{') && spec.ends_with('}') {
        let values: Vec<String> = spec[1..spec.len() - 1]
            .split(',')
            .map(|v| v.trim().trim_matches('\'').trim_matches('"').to_string())
            .collect();
        if values.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                message: "empty nominal domain".into(),
            });
        }
        return Ok(Attribute::nominal(name, values));
    }
    Err(Error::Parse {
        line: line_no,
        message: format!("unsupported attribute type: {spec}"),
    })
}

fn parse_row<F: Float>(
    schema: &StreamSchema,
    fields: &[&str],
    label_column: usize,
    line_no: usize,
) -> Result<Instance<F>> {
    let expected = schema.attribute_count() + 1;
    if fields.len() != expected {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected {expected} columns, found {}", fields.len()),
        });
    }
    let mut features = Vec::with_capacity(schema.attribute_count());
    let mut attr_iter = schema.attributes().iter();
    for (col, field) in fields.iter().enumerate() {
        if col == label_column {
            continue;
        }
        let attr = attr_iter.next().ok_or_else(|| Error::Parse {
            line: line_no,
            message: "more value columns than attributes".into(),
        })?;
        match &attr.kind {
            AttributeKind::Numeric => {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("'{field}' is not numeric for attribute {}", attr.name),
                })?;
                features.push(FeatureValue::Numeric(F::of(v)));
            }
            AttributeKind::Nominal { values } => {
                let idx = values
                    .iter()
                    .position(|v| v == field)
                    .ok_or_else(|| Error::Parse {
                        line: line_no,
                        message: format!(
                            "unknown value '{field}' for nominal attribute {}",
                            attr.name
                        ),
                    })?;
                features.push(FeatureValue::Nominal(idx as u32));
            }
        }
    }
    let label_field = fields[label_column];
    let label = schema
        .class_index(label_field)
        .ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("unknown class label '{label_field}'"),
        })?;
    let inst = Instance::new(features, label);
    schema.validate(&inst).map_err(|e| Error::Parse {
        line: line_no,
        message: e.to_string(),
    })?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(format!("goowe-reader-{name}-{}", std::process::id()));
        let mut f = File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn csv_reads_rows_in_order() {
        let schema = Arc::new(StreamSchema::numeric(2, 2).unwrap());
        let path = write_temp(
            "basic.csv",
            "1.0,2.0,class0\n3.5,-1.0,class1\n0.0,0.0,class0\n",
        );
        let mut stream = CsvStream::<f64>::open(&path, schema).unwrap();
        let mut labels = Vec::new();
        while let Some(inst) = stream.next_instance().unwrap() {
            labels.push(inst.label);
        }
        assert_eq!(labels, vec![0, 1, 0]);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn csv_wrong_column_count_names_the_line() {
        let schema = Arc::new(StreamSchema::numeric(2, 2).unwrap());
        let path = write_temp("bad.csv", "1.0,2.0,class0\n3.5,class1\n");
        let mut stream = CsvStream::<f64>::open(&path, schema).unwrap();
        stream.next_instance().unwrap();
        match stream.next_instance() {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn arff_header_declaration_order_maps_labels() {
        let arff = "\
% comment
@relation demo
@attribute x numeric
@attribute color {red, green}
@attribute class {a, b}
@data
1.5,red,a
2.5,green,b
";
        let path = write_temp("demo.arff", arff);
        let mut stream = ArffStream::<f64>::open(&path).unwrap();
        assert_eq!(stream.schema().class_count(), 2);
        assert_eq!(
            stream.schema().classes(),
            &["a".to_string(), "b".to_string()]
        );
        let first = stream.next_instance().unwrap().unwrap();
        assert_eq!(first.label, 0);
        assert_eq!(first.features[1].as_nominal(), Some(0));
        let second = stream.next_instance().unwrap().unwrap();
        assert_eq!(second.label, 1);
        assert_eq!(second.features[1].as_nominal(), Some(1));
        assert!(stream.next_instance().unwrap().is_none());
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn arff_unknown_nominal_value_is_an_error() {
        let arff = "@relation t\n@attribute c {x,y}\n@attribute class {a,b}\n@data\nz,a\n";
        let path = write_temp("unk.arff", arff);
        let mut stream = ArffStream::<f64>::open(&path).unwrap();
        assert!(matches!(stream.next_instance(), Err(Error::Parse { .. })));
        std::fs::remove_file(path).ok();
    }
}
