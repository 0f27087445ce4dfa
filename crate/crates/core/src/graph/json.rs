//! JSON wire format shared by every graph type.
//!
//! ```json
//! {
//!   "type": "wcg" | "ecg" | "scg" | "pcpo-wcg" | "pcpo-ecg",
//!   "gamma": 2,
//!   "vars": ["X", "Y"],
//!   "edges": [{"src": "X", "dst": "Y", "lag": 1, "oriented": true}],
//!   "self_loops": []
//! }
//! ```
//!
//! `lag` is `null` where the representation carries no lag value (past
//! blocks of an ECG, summary edges); unoriented pairs are stored once with
//! endpoints in name order and `oriented: false`. Edges are sorted by
//! `(src, dst, lag)` so serialization is deterministic.

use super::{
    ExtendedGraph, PartialExtendedGraph, PartialWindowGraph, SummaryGraph, VarId, WindowGraph,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EdgeJson {
    pub src: String,
    pub dst: String,
    pub lag: Option<usize>,
    pub oriented: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphJson {
    #[serde(rename = "type")]
    pub kind: String,
    pub gamma: Option<usize>,
    pub vars: Vec<String>,
    pub edges: Vec<EdgeJson>,
    pub self_loops: Vec<String>,
}

impl GraphJson {
    fn sorted(mut self) -> Self {
        self.edges
            .sort_by(|a, b| (&a.src, &a.dst, a.lag).cmp(&(&b.src, &b.dst, b.lag)));
        self
    }
}

/// Any graph parsed from the wire format.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphDocument {
    Window(WindowGraph),
    Extended(ExtendedGraph),
    Summary(SummaryGraph),
    PartialWindow(PartialWindowGraph),
    PartialExtended(PartialExtendedGraph),
}

impl GraphDocument {
    pub fn from_json(s: &str) -> Result<Self> {
        let j: GraphJson = serde_json::from_str(s)?;
        let doc = match j.kind.as_str() {
            "wcg" => Self::Window(window_from_json(&j, false)?.into_window_graph()?),
            "pcpo-wcg" => Self::PartialWindow(window_from_json(&j, true)?),
            "ecg" => Self::Extended(extended_from_json(&j, false)?.into_extended_graph()?),
            "pcpo-ecg" => Self::PartialExtended(extended_from_json(&j, true)?),
            "scg" => Self::Summary(summary_from_json(&j)?),
            other => {
                return Err(Error::GraphDocument(format!(
                    "unknown graph type `{other}`"
                )));
            }
        };
        Ok(doc)
    }

    pub fn to_json(&self) -> GraphJson {
        match self {
            Self::Window(g) => g.to_json(),
            Self::Extended(g) => g.to_json(),
            Self::Summary(g) => g.to_json(),
            Self::PartialWindow(g) => g.to_json(),
            Self::PartialExtended(g) => g.to_json(),
        }
    }

    pub fn into_summary(self) -> Result<SummaryGraph> {
        match self {
            Self::Summary(g) => Ok(g),
            Self::Window(g) => Ok(g.to_summary_graph()),
            Self::Extended(g) => Ok(g.to_summary_graph()),
            Self::PartialWindow(g) => Ok(g.to_summary_graph()),
            Self::PartialExtended(g) => Ok(g.to_summary_graph()),
        }
    }
}

fn require_gamma(j: &GraphJson) -> Result<usize> {
    j.gamma
        .ok_or_else(|| Error::GraphDocument("window graphs need a gamma field".into()))
}

fn window_from_json(j: &GraphJson, allow_unoriented: bool) -> Result<PartialWindowGraph> {
    let mut g = PartialWindowGraph::new(j.vars.clone(), require_gamma(j)?)?;
    let id = |name: &str| -> Result<VarId> {
        j.vars
            .iter()
            .position(|v| v == name)
            .map(VarId)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    };
    for e in &j.edges {
        let (src, dst) = (id(&e.src)?, id(&e.dst)?);
        match (e.lag, e.oriented) {
            (Some(0) | None, true) => g.add_inst(src, dst)?,
            (Some(0) | None, false) if allow_unoriented => g.add_unoriented(src, dst)?,
            (Some(lag), true) => g.add_lagged(src, lag, dst)?,
            _ => {
                return Err(Error::GraphDocument(format!(
                    "edge {} -> {}: unoriented edges must be instantaneous",
                    e.src, e.dst
                )));
            }
        }
    }
    if !j.self_loops.is_empty() {
        return Err(Error::GraphDocument(
            "window graphs encode self causes as lagged self edges, not self_loops".into(),
        ));
    }
    Ok(g)
}

fn extended_from_json(j: &GraphJson, allow_unoriented: bool) -> Result<PartialExtendedGraph> {
    let mut g = PartialExtendedGraph::new(j.vars.clone())?;
    let id = |name: &str| -> Result<VarId> {
        j.vars
            .iter()
            .position(|v| v == name)
            .map(VarId)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    };
    for e in &j.edges {
        let (src, dst) = (id(&e.src)?, id(&e.dst)?);
        match (e.lag, e.oriented) {
            (Some(0), true) => g.add_inst(src, dst)?,
            (Some(0), false) if allow_unoriented => g.add_unoriented(src, dst)?,
            (None, true) => g.add_lagged(src, dst),
            _ => {
                return Err(Error::GraphDocument(format!(
                    "edge {} -> {}: extended graphs take lag 0 or null",
                    e.src, e.dst
                )));
            }
        }
    }
    if !j.self_loops.is_empty() {
        return Err(Error::GraphDocument(
            "extended graphs encode self causes as lagged self edges, not self_loops".into(),
        ));
    }
    Ok(g)
}

fn summary_from_json(j: &GraphJson) -> Result<SummaryGraph> {
    let mut g = SummaryGraph::new(j.vars.clone())?;
    for e in &j.edges {
        let src = g.var_id(&e.src)?;
        let dst = g.var_id(&e.dst)?;
        if e.lag.is_some() || !e.oriented {
            return Err(Error::GraphDocument(
                "summary edges are oriented and carry no lag".into(),
            ));
        }
        g.add_edge(src, dst)?;
    }
    for name in &j.self_loops {
        let v = g.var_id(name)?;
        g.add_self_loop(v);
    }
    Ok(g)
}

impl WindowGraph {
    pub fn to_json(&self) -> GraphJson {
        let name = |v: VarId| self.var_name(v).to_string();
        let mut edges: Vec<EdgeJson> = self
            .lagged_edges()
            .iter()
            .map(|&(s, l, d)| EdgeJson {
                src: name(s),
                dst: name(d),
                lag: Some(l),
                oriented: true,
            })
            .collect();
        edges.extend(self.inst_edges().iter().map(|&(s, d)| EdgeJson {
            src: name(s),
            dst: name(d),
            lag: Some(0),
            oriented: true,
        }));
        GraphJson {
            kind: "wcg".into(),
            gamma: Some(self.gamma()),
            vars: self.var_names().to_vec(),
            edges,
            self_loops: Vec::new(),
        }
        .sorted()
    }
}

impl PartialWindowGraph {
    pub fn to_json(&self) -> GraphJson {
        let name = |v: VarId| self.var_name(v).to_string();
        let mut edges: Vec<EdgeJson> = self
            .lagged_edges()
            .iter()
            .map(|&(s, l, d)| EdgeJson {
                src: name(s),
                dst: name(d),
                lag: Some(l),
                oriented: true,
            })
            .collect();
        edges.extend(self.inst_edges().iter().map(|&(s, d)| EdgeJson {
            src: name(s),
            dst: name(d),
            lag: Some(0),
            oriented: true,
        }));
        edges.extend(self.unoriented_edges().iter().map(|&(a, b)| EdgeJson {
            src: name(a),
            dst: name(b),
            lag: Some(0),
            oriented: false,
        }));
        GraphJson {
            kind: "pcpo-wcg".into(),
            gamma: Some(self.gamma()),
            vars: self.var_names().to_vec(),
            edges,
            self_loops: Vec::new(),
        }
        .sorted()
    }
}

impl ExtendedGraph {
    pub fn to_json(&self) -> GraphJson {
        let name = |v: VarId| self.var_name(v).to_string();
        let mut edges: Vec<EdgeJson> = self
            .lagged_edges()
            .iter()
            .map(|&(s, d)| EdgeJson {
                src: name(s),
                dst: name(d),
                lag: None,
                oriented: true,
            })
            .collect();
        edges.extend(self.inst_edges().iter().map(|&(s, d)| EdgeJson {
            src: name(s),
            dst: name(d),
            lag: Some(0),
            oriented: true,
        }));
        GraphJson {
            kind: "ecg".into(),
            gamma: None,
            vars: self.var_names().to_vec(),
            edges,
            self_loops: Vec::new(),
        }
        .sorted()
    }
}

impl PartialExtendedGraph {
    pub fn to_json(&self) -> GraphJson {
        let name = |v: VarId| self.var_name(v).to_string();
        let mut edges: Vec<EdgeJson> = self
            .lagged_edges()
            .iter()
            .map(|&(s, d)| EdgeJson {
                src: name(s),
                dst: name(d),
                lag: None,
                oriented: true,
            })
            .collect();
        edges.extend(self.inst_edges().iter().map(|&(s, d)| EdgeJson {
            src: name(s),
            dst: name(d),
            lag: Some(0),
            oriented: true,
        }));
        edges.extend(self.unoriented_edges().iter().map(|&(a, b)| EdgeJson {
            src: name(a),
            dst: name(b),
            lag: Some(0),
            oriented: false,
        }));
        GraphJson {
            kind: "pcpo-ecg".into(),
            gamma: None,
            vars: self.var_names().to_vec(),
            edges,
            self_loops: Vec::new(),
        }
        .sorted()
    }
}

impl SummaryGraph {
    pub fn to_json(&self) -> GraphJson {
        let name = |v: VarId| self.var_name(v).to_string();
        let edges: Vec<EdgeJson> = self
            .edges()
            .iter()
            .map(|&(s, d)| EdgeJson {
                src: name(s),
                dst: name(d),
                lag: None,
                oriented: true,
            })
            .collect();
        GraphJson {
            kind: "scg".into(),
            gamma: None,
            vars: self.var_names().to_vec(),
            edges,
            self_loops: self.self_loops().iter().map(|&v| name(v)).collect(),
        }
        .sorted()
    }
}
