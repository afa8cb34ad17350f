//! Instance text format: one JSON object per file.
//!
//! ```text
//! {"type":"cut","n":3,"edges":[[0,1,1.0],[0,2,1.0],[1,2,1.0]]}
//! {"type":"coverage","n":2,"weights":[1.0,2.0],"sets":[[0],[0,1]]}
//! {"type":"modular","n":2,"weights":[1.0,-2.0]}
//! {"type":"entropy","n":2,"cardinalities":[2,2],"probabilities":[0.25,0.25,0.25,0.25]}
//! {"type":"difference","f":{...},"h":{...}}
//! ```
//!
//! Every document may carry a free-form `meta` object. Floats are written in
//! the shortest form that parses back to the same bits.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::instances::{CoverageInstance, CutInstance, EntropyInstance, Family, ModularInstance};

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Wire {
    Cut {
        n: usize,
        edges: Vec<(usize, usize, f64)>,
    },
    Coverage {
        n: usize,
        weights: Vec<f64>,
        sets: Vec<Vec<usize>>,
    },
    Modular {
        n: usize,
        weights: Vec<f64>,
    },
    Entropy {
        n: usize,
        cardinalities: Vec<usize>,
        probabilities: Vec<f64>,
    },
    Difference {
        f: Box<Wire>,
        h: Box<Wire>,
    },
}

#[derive(Serialize, Deserialize)]
struct WireFile {
    #[serde(flatten)]
    body: Wire,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

/// A parsed instance file.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceDocument {
    pub family: Family,
    pub meta: Option<Value>,
}

fn parse_error(field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        field: field.to_string(),
        message: message.into(),
    }
}

fn check_n(declared: usize, actual: usize, what: &str) -> Result<()> {
    if declared != actual {
        return Err(parse_error(
            "n",
            format!("declared n={declared} but {what} imply n={actual}"),
        ));
    }
    Ok(())
}

fn in_field(field: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Domain(message) => parse_error(field, message),
        other => other,
    }
}

fn to_family(wire: Wire, path: &str) -> Result<Family> {
    Ok(match wire {
        Wire::Cut { n, edges } => {
            Family::Cut(CutInstance::new(n, edges).map_err(in_field("edges"))?)
        }
        Wire::Coverage { n, weights, sets } => {
            check_n(n, sets.len(), "the sets")?;
            Family::Coverage(CoverageInstance::new(weights, sets).map_err(in_field("sets"))?)
        }
        Wire::Modular { n, weights } => {
            check_n(n, weights.len(), "the weights")?;
            Family::Modular(ModularInstance::new(weights))
        }
        Wire::Entropy {
            n,
            cardinalities,
            probabilities,
        } => {
            check_n(n, cardinalities.len(), "the cardinalities")?;
            Family::Entropy(
                EntropyInstance::new(cardinalities, probabilities)
                    .map_err(in_field("probabilities"))?,
            )
        }
        Wire::Difference { f, h } => {
            let f = to_family(*f, &format!("{path}.f"))?;
            let h = to_family(*h, &format!("{path}.h"))?;
            if f.n() != h.n() {
                return Err(parse_error(
                    &format!("{path}.h"),
                    format!("size {} differs from f's size {}", h.n(), f.n()),
                ));
            }
            Family::Difference(Box::new(f), Box::new(h))
        }
    })
}

fn to_wire(family: &Family) -> Wire {
    match family {
        Family::Cut(c) => Wire::Cut {
            n: c.n(),
            edges: c.edges().to_vec(),
        },
        Family::Coverage(c) => Wire::Coverage {
            n: c.n(),
            weights: c.weights().to_vec(),
            sets: c.sets().to_vec(),
        },
        Family::Modular(m) => Wire::Modular {
            n: m.n(),
            weights: m.weights().to_vec(),
        },
        Family::Entropy(e) => Wire::Entropy {
            n: e.n(),
            cardinalities: e.cardinalities().to_vec(),
            probabilities: e.probabilities().to_vec(),
        },
        Family::Difference(f, h) => Wire::Difference {
            f: Box::new(to_wire(f)),
            h: Box::new(to_wire(h)),
        },
    }
}

/// Parses an instance document. Syntax errors report line and column.
pub fn parse_instance(text: &str) -> Result<InstanceDocument> {
    let wire: WireFile = serde_json::from_str(text).map_err(|e| {
        parse_error(
            &format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    if let Some(meta) = &wire.meta {
        if !meta.is_object() {
            return Err(parse_error("meta", "must be an object"));
        }
    }
    Ok(InstanceDocument {
        family: to_family(wire.body, "$")?,
        meta: wire.meta,
    })
}

/// Serializes an instance document on one line.
pub fn write_instance(doc: &InstanceDocument) -> String {
    let wire = WireFile {
        body: to_wire(&doc.family),
        meta: doc.meta.clone(),
    };
    serde_json::to_string(&wire).expect("instance documents are always serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_cut_example() {
        let doc = parse_instance(r#"{"type":"cut","n":3,"edges":[[0,1,1.0],[0,2,1.0],[1,2,1.0]]}"#)
            .unwrap();
        assert_eq!(doc.family.n(), 3);
        assert_eq!(doc.meta, None);
        assert_eq!(
            write_instance(&doc),
            r#"{"type":"cut","n":3,"edges":[[0,1,1.0],[0,2,1.0],[1,2,1.0]]}"#
        );
    }

    #[test]
    fn round_trips_every_family() {
        let texts = [
            r#"{"type":"coverage","n":2,"weights":[1.0,2.5],"sets":[[0],[0,1]]}"#,
            r#"{"type":"modular","n":2,"weights":[1.0,-2.0]}"#,
            r#"{"type":"entropy","n":2,"cardinalities":[2,2],"probabilities":[0.25,0.25,0.25,0.25]}"#,
            r#"{"type":"difference","f":{"type":"modular","n":1,"weights":[2.0]},"h":{"type":"modular","n":1,"weights":[1.0]},"meta":{"seed":4}}"#,
        ];
        for t in texts {
            let doc = parse_instance(t).unwrap();
            assert_eq!(write_instance(&doc), t);
        }
    }

    #[test]
    fn floats_round_trip_bit_exactly() {
        let w = [
            0.1 + 0.2,
            1.0 / 3.0,
            5e-324,
            0.999_999_999_999_999_9,
            123_456.789e10,
        ];
        let doc = InstanceDocument {
            family: Family::Modular(ModularInstance::new(w.to_vec())),
            meta: None,
        };
        let back = parse_instance(&write_instance(&doc)).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn reports_fields_and_positions() {
        let cases = [
            (r#"{"type":"cut","n":3,"edges":[[0,1,1.0],]}"#, "line 1"),
            (r#"{"type":"modular","n":3,"weights":[1.0]}"#, "n"),
            (r#"{"type":"cut","n":2,"edges":[[0,0,1.0]]}"#, "edges"),
            (r#"{"type":"cut","n":2,"edges":[],"meta":3}"#, "meta"),
            (
                r#"{"type":"difference","f":{"type":"modular","n":1,"weights":[2.0]},"h":{"type":"modular","n":2,"weights":[1.0,1.0]}}"#,
                "$.h",
            ),
        ];
        for (text, field) in cases {
            match parse_instance(text) {
                Err(Error::Parse { field: f, .. }) => {
                    assert!(f.starts_with(field), "{f} vs {field}")
                }
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_instance(r#"{"type":"bogus","n":1}"#),
            Err(Error::Parse { .. })
        ));
    }
}
