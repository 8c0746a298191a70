//! JSON form of circuits.
//!
//! ```json
//! {"version":1, "d":2, "bucket_sizes":[2,2],
//!  "gates":[{"id":0,"op":"input","var":[1,1]}, {"id":1,"op":"input","var":[2,2]},
//!           {"id":2,"op":"mul","args":[0,1]}],
//!  "output":2}
//! ```
//!
//! Constants are decimal strings. Unknown fields are rejected; an optional
//! `meta` object is carried through untouched.

use serde::{Deserialize, Serialize};

use super::{Circuit, Gate};
use crate::algebra::field::Scalar;
use crate::algebra::poly::{Var, VariablePartition};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CircuitJson {
    pub version: u32,
    pub d: u32,
    pub bucket_sizes: Vec<u32>,
    pub gates: Vec<GateJson>,
    pub output: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GateJson {
    pub id: usize,
    pub op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub var: Option<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub args: Option<Vec<usize>>,
}

pub(crate) fn check_header(version: u32, d: u32, sizes: &[u32]) -> Result<VariablePartition> {
    if version != FORMAT_VERSION {
        return Err(Error::Schema(format!("unsupported version {version}")));
    }
    if d as usize != sizes.len() {
        return Err(Error::Schema(format!(
            "d = {d} but {} bucket sizes given",
            sizes.len()
        )));
    }
    VariablePartition::new(sizes.to_vec())
}

fn field<T>(v: Option<T>, id: usize, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::Schema(format!("gate {id}: missing field `{name}`")))
}

fn unexpected(id: usize, present: bool, name: &str) -> Result<()> {
    if present {
        Err(Error::Schema(format!(
            "gate {id}: unexpected field `{name}`"
        )))
    } else {
        Ok(())
    }
}

impl<F: Scalar> Circuit<F> {
    pub fn to_json(&self) -> CircuitJson {
        let gates = self
            .gates
            .iter()
            .enumerate()
            .map(|(id, g)| {
                let mut j = GateJson {
                    id,
                    op: String::new(),
                    var: None,
                    value: None,
                    args: None,
                };
                match g {
                    Gate::Input(v) => {
                        j.op = "input".into();
                        j.var = Some([v.bucket, v.col]);
                    }
                    Gate::Const(c) => {
                        j.op = "const".into();
                        j.value = Some(c.to_string());
                    }
                    Gate::Add(args) => {
                        j.op = "add".into();
                        j.args = Some(args.clone());
                    }
                    Gate::Mul(args) => {
                        j.op = "mul".into();
                        j.args = Some(args.to_vec());
                    }
                }
                j
            })
            .collect();
        CircuitJson {
            version: FORMAT_VERSION,
            d: self.partition.degree(),
            bucket_sizes: self.partition.bucket_sizes().to_vec(),
            gates,
            output: self.output,
            meta: None,
        }
    }

    pub fn from_json(j: &CircuitJson) -> Result<Self> {
        let partition = check_header(j.version, j.d, &j.bucket_sizes)?;
        let mut records = Vec::with_capacity(j.gates.len());
        for g in &j.gates {
            let id = g.id;
            let gate = match g.op.as_str() {
                "input" => {
                    unexpected(id, g.value.is_some(), "value")?;
                    unexpected(id, g.args.is_some(), "args")?;
                    let [b, c] = field(g.var, id, "var")?;
                    Gate::Input(Var::new(b, c))
                }
                "const" => {
                    unexpected(id, g.var.is_some(), "var")?;
                    unexpected(id, g.args.is_some(), "args")?;
                    let s = field(g.value.as_ref(), id, "value")?;
                    let c = F::parse_literal(s)
                        .ok_or_else(|| Error::Schema(format!("gate {id}: bad constant {s:?}")))?;
                    Gate::Const(c)
                }
                "add" => {
                    unexpected(id, g.var.is_some(), "var")?;
                    unexpected(id, g.value.is_some(), "value")?;
                    let args = field(g.args.clone(), id, "args")?;
                    if args.is_empty() {
                        return Err(Error::EmptyAdd { gate: id });
                    }
                    Gate::Add(args)
                }
                "mul" => {
                    unexpected(id, g.var.is_some(), "var")?;
                    unexpected(id, g.value.is_some(), "value")?;
                    let args = field(g.args.clone(), id, "args")?;
                    match args[..] {
                        [a, b] => Gate::Mul([a, b]),
                        _ => return Err(Error::NotFanin2 { gate: id }),
                    }
                }
                other => return Err(Error::Schema(format!("gate {id}: unknown op {other:?}"))),
            };
            records.push((id, gate));
        }
        Circuit::from_records(partition, records, j.output)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: CircuitJson = serde_json::from_str(s)?;
        Self::from_json(&j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Fp31;

    #[test]
    fn round_trip() {
        let s = r#"{"version":1,"d":2,"bucket_sizes":[2,2],"gates":[
            {"id":0,"op":"input","var":[1,1]},{"id":1,"op":"input","var":[2,2]},
            {"id":5,"op":"const","value":"-1"},
            {"id":2,"op":"mul","args":[0,1]},{"id":3,"op":"mul","args":[5,2]}],"output":3}"#;
        let c = Circuit::<Fp31>::from_json_str(s).unwrap();
        let back = Circuit::<Fp31>::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_documents() {
        let unknown = r#"{"version":1,"d":1,"bucket_sizes":[1],"gates":[],"output":0,"extra":1}"#;
        assert!(matches!(
            Circuit::<Fp31>::from_json_str(unknown),
            Err(Error::Schema(_))
        ));
        let fanin = r#"{"version":1,"d":1,"bucket_sizes":[1],"gates":[
            {"id":0,"op":"input","var":[1,1]},{"id":1,"op":"mul","args":[0]}],"output":1}"#;
        assert_eq!(
            Circuit::<Fp31>::from_json_str(fanin),
            Err(Error::NotFanin2 { gate: 1 })
        );
        let version = r#"{"version":2,"d":1,"bucket_sizes":[1],"gates":[],"output":0}"#;
        assert!(matches!(
            Circuit::<Fp31>::from_json_str(version),
            Err(Error::Schema(_))
        ));
    }
}
