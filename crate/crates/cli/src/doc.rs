use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use smcirc::abp::json::AbpJson;
use smcirc::algebra::poly::{assignment_from_json, AssignmentEntry, PolynomialJson};
use smcirc::circuit::json::CircuitJson;
use smcirc::{Abp, Circuit, Error, Limits, Polynomial, Result, Scalar, Var, VariablePartition};

/// Any of the three document kinds accepted on input.
pub enum Doc<F> {
    Circuit(Circuit<F>),
    Abp(Abp<F>),
    Poly(Polynomial<F>),
}

impl<F: Scalar> Doc<F> {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Schema("expected a JSON object".into()))?;
        if obj.contains_key("gates") {
            let j: CircuitJson = serde_json::from_value(v)?;
            Ok(Doc::Circuit(Circuit::from_json(&j)?))
        } else if obj.contains_key("edges") {
            let j: AbpJson = serde_json::from_value(v)?;
            Ok(Doc::Abp(Abp::from_json(&j)?))
        } else if obj.contains_key("terms") {
            let j: PolynomialJson = serde_json::from_value(v)?;
            Ok(Doc::Poly(Polynomial::from_json(&j)?))
        } else {
            Err(Error::Schema(
                "input is neither a circuit, a program nor a polynomial".into(),
            ))
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Doc::Circuit(_) => "circuit",
            Doc::Abp(_) => "abp",
            Doc::Poly(_) => "polynomial",
        }
    }

    pub fn expand(&self, limits: &Limits) -> Result<Polynomial<F>> {
        match self {
            Doc::Circuit(c) => c.expand(limits),
            Doc::Abp(a) => a.expand(limits),
            Doc::Poly(p) => Ok(p.clone()),
        }
    }

    pub fn evaluate(&self, x: &BTreeMap<Var, F>) -> Result<F> {
        match self {
            Doc::Circuit(c) => c.evaluate(x),
            Doc::Abp(a) => a.evaluate(x),
            Doc::Poly(p) => p.eval(x),
        }
    }

    /// Variables the document may read.
    pub fn variables(&self) -> BTreeSet<Var> {
        let from_partition = |p: &VariablePartition| {
            p.bucket_sizes()
                .iter()
                .enumerate()
                .flat_map(|(k, &n)| (1..=n).map(move |j| Var::new(k as u32 + 1, j)))
                .collect()
        };
        match self {
            Doc::Circuit(c) => from_partition(c.partition()),
            Doc::Abp(a) => from_partition(a.partition()),
            Doc::Poly(p) => p.terms().flat_map(|(m, _)| m.vars().to_vec()).collect(),
        }
    }

    pub fn partition(&self) -> Option<&VariablePartition> {
        match self {
            Doc::Circuit(c) => Some(c.partition()),
            Doc::Abp(a) => Some(a.partition()),
            Doc::Poly(_) => None,
        }
    }

    pub fn into_circuit(self) -> Result<Circuit<F>> {
        match self {
            Doc::Circuit(c) => Ok(c),
            other => Err(Error::Schema(format!(
                "expected a circuit, got a {}",
                other.kind()
            ))),
        }
    }

    pub fn into_abp(self) -> Result<Abp<F>> {
        match self {
            Doc::Abp(a) => Ok(a),
            other => Err(Error::Schema(format!(
                "expected a branching program, got a {}",
                other.kind()
            ))),
        }
    }
}

/// An input file (or standard input) with its digest.
pub struct Input {
    pub name: String,
    pub text: String,
    pub sha256: String,
}

impl Input {
    pub fn read(path: Option<&Path>) -> Result<Self> {
        let (name, text) = match path {
            Some(p) => (
                p.display().to_string(),
                fs::read_to_string(p).map_err(|e| io_error(p, e))?,
            ),
            None => {
                let mut s = String::new();
                std::io::stdin()
                    .read_to_string(&mut s)
                    .map_err(|e| Error::Io(format!("stdin: {e}")))?;
                ("-".to_string(), s)
            }
        };
        let sha256 = hex::encode(Sha256::digest(text.as_bytes()));
        Ok(Input { name, text, sha256 })
    }

    pub fn digest(&self) -> Value {
        json!({"name": self.name, "sha256": self.sha256})
    }
}

fn io_error(p: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", p.display()))
}

/// Reads an assignment: either a list of `{"var":[i,j],"value":"c"}` entries
/// or an object holding such a list under `assignment`.
pub fn parse_assignment<F: Scalar>(text: &str) -> Result<BTreeMap<Var, F>> {
    let v: Value = serde_json::from_str(text)?;
    let list = match v {
        Value::Object(mut m) => m
            .remove("assignment")
            .ok_or_else(|| Error::Schema("missing `assignment`".into()))?,
        other => other,
    };
    let entries: Vec<AssignmentEntry> = serde_json::from_value(list)?;
    assignment_from_json(&entries)
}

/// Provenance embedded in every output.
#[derive(Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub prime: u64,
    pub seed: Option<u64>,
    pub inputs: Vec<Value>,
    pub params: Value,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl Meta {
    pub fn new(command: &str, prime: u64, seed: Option<u64>) -> Self {
        Meta {
            tool: "smcirc",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            prime,
            seed,
            inputs: Vec::new(),
            params: Value::Null,
            extra: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.extra.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable"),
        );
        self
    }
}

/// An output document: an artifact that carries `meta` inside its schema,
/// or a report object.
pub enum Output {
    Circuit(CircuitJson),
    Abp(AbpJson),
    Poly(PolynomialJson),
    Report(Value),
}

impl Output {
    pub fn circuit<F: Scalar>(c: &Circuit<F>) -> Self {
        Output::Circuit(c.to_json())
    }

    pub fn abp<F: Scalar>(a: &Abp<F>) -> Self {
        Output::Abp(a.to_json())
    }

    pub fn poly<F: Scalar>(p: &Polynomial<F>) -> Self {
        Output::Poly(p.to_json())
    }

    pub fn report(r: impl Serialize) -> Self {
        Output::Report(serde_json::to_value(r).expect("serializable"))
    }

    pub fn render(self, meta: Meta) -> String {
        let meta = serde_json::to_value(meta).expect("serializable");
        let mut s = match self {
            Output::Circuit(mut j) => {
                j.meta = Some(meta);
                serde_json::to_string(&j)
            }
            Output::Abp(mut j) => {
                j.meta = Some(meta);
                serde_json::to_string(&j)
            }
            Output::Poly(mut j) => {
                j.meta = Some(meta);
                serde_json::to_string(&j)
            }
            Output::Report(v) => {
                let mut obj = Map::new();
                obj.insert("meta".into(), meta);
                match v {
                    Value::Object(m) => obj.extend(m),
                    other => {
                        obj.insert("result".into(), other);
                    }
                }
                serde_json::to_string(&Value::Object(obj))
            }
        }
        .expect("serializable");
        s.push('\n');
        s
    }
}

pub fn write_output(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_error(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| Error::Io(format!("stdout: {e}")))
        }
    }
}
