//! JSON form of branching programs.
//!
//! ```json
//! {"version":1, "d":1, "bucket_sizes":[2], "layers":[[0],[1]],
//!  "nodes":[{"id":0,"layer":0,"index_set":[]}, {"id":1,"layer":1,"index_set":[1]}],
//!  "edges":[{"from":0,"to":1,"bucket":1,"form":{"1":"1","2":"2"}}]}
//! ```

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Abp, Edge, Node};
use crate::algebra::field::Scalar;
use crate::algebra::index_set::IndexSet;
use crate::circuit::json::{check_header, FORMAT_VERSION};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AbpJson {
    pub version: u32,
    pub d: u32,
    pub bucket_sizes: Vec<u32>,
    pub layers: Vec<Vec<usize>>,
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<EdgeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct NodeJson {
    pub id: usize,
    pub layer: usize,
    pub index_set: IndexSet,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub from: usize,
    pub to: usize,
    pub bucket: u32,
    pub form: BTreeMap<String, String>,
}

impl<F: Scalar> Abp<F> {
    pub fn to_json(&self) -> AbpJson {
        AbpJson {
            version: FORMAT_VERSION,
            d: self.partition.degree(),
            bucket_sizes: self.partition.bucket_sizes().to_vec(),
            layers: self.layers.clone(),
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(id, n)| NodeJson {
                    id,
                    layer: n.layer,
                    index_set: n.index_set,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    from: e.from,
                    to: e.to,
                    bucket: e.bucket,
                    form: e
                        .form
                        .iter()
                        .map(|(j, c)| (j.to_string(), c.to_string()))
                        .collect(),
                })
                .collect(),
            meta: None,
        }
    }

    pub fn from_json(j: &AbpJson) -> Result<Self> {
        let partition = check_header(j.version, j.d, &j.bucket_sizes)?;
        let mut pos = HashMap::new();
        let mut nodes = Vec::with_capacity(j.nodes.len());
        for n in &j.nodes {
            if pos.insert(n.id, nodes.len()).is_some() {
                return Err(Error::Schema(format!("node id {} is used twice", n.id)));
            }
            nodes.push(Node {
                layer: n.layer,
                index_set: n.index_set,
            });
        }
        let mut listed = 0;
        for (k, layer) in j.layers.iter().enumerate() {
            for id in layer {
                let &v = pos
                    .get(id)
                    .ok_or_else(|| Error::Schema(format!("layer {k} lists unknown node {id}")))?;
                if nodes[v].layer != k {
                    return Err(Error::Schema(format!("node {id} is listed on layer {k}")));
                }
                listed += 1;
            }
        }
        if listed != nodes.len() {
            return Err(Error::Schema(
                "layers do not list every node exactly once".into(),
            ));
        }
        let mut edges = Vec::with_capacity(j.edges.len());
        for (k, e) in j.edges.iter().enumerate() {
            let node = |id: usize| {
                pos.get(&id)
                    .copied()
                    .ok_or_else(|| Error::Schema(format!("edge {k} refers to unknown node {id}")))
            };
            let mut form = BTreeMap::new();
            for (col, val) in &e.form {
                let col: u32 = col
                    .parse()
                    .map_err(|_| Error::Schema(format!("edge {k}: bad column {col:?}")))?;
                let c = F::parse_literal(val)
                    .ok_or_else(|| Error::Schema(format!("edge {k}: bad coefficient {val:?}")))?;
                form.insert(col, c);
            }
            edges.push(Edge::new(node(e.from)?, node(e.to)?, e.bucket, form));
        }
        Abp::new(partition, nodes, edges)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: AbpJson = serde_json::from_str(s)?;
        Self::from_json(&j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Fp31;

    #[test]
    fn round_trip_and_zero_coefficients() {
        let s = r#"{"version":1,"d":1,"bucket_sizes":[2],"layers":[[4],[9]],
            "nodes":[{"id":4,"layer":0,"index_set":[]},{"id":9,"layer":1,"index_set":[1]}],
            "edges":[{"from":4,"to":9,"bucket":1,"form":{"1":"1","2":"0"}}]}"#;
        let a = Abp::<Fp31>::from_json_str(s).unwrap();
        assert_eq!(a.edges()[0].form.len(), 1);
        assert_eq!(Abp::<Fp31>::from_json(&a.to_json()).unwrap(), a);
    }
}
