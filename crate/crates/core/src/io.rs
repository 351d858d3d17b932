//! Edge-list CSV ingestion, the graph JSON document and float formatting.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, EdgeRecord, GraphBuilder, NodeLabel};

/// Column names used when reading an edge-list CSV.
#[derive(Debug, Clone)]
pub struct CsvColumns {
    pub src: String,
    pub dst: String,
    pub tunnel: Option<String>,
}

impl Default for CsvColumns {
    fn default() -> Self {
        CsvColumns {
            src: "Src IP".to_owned(),
            dst: "Dst IP".to_owned(),
            tunnel: None,
        }
    }
}

/// Reads raw edge records from a headed UTF-8 CSV. Empty cells become
/// missing endpoints; nothing is dropped here.
pub fn read_edge_records<R: Read>(reader: R, columns: &CsvColumns) -> Result<Vec<EdgeRecord>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = csv.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    };
    let src = find(&columns.src)?;
    let dst = find(&columns.dst)?;
    let tunnel = columns.tunnel.as_deref().map(find).transpose()?;

    let cell = |row: &csv::StringRecord, i: usize| {
        row.get(i)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_owned)
    };
    let mut records = Vec::new();
    for row in csv.records() {
        let row = row?;
        records.push(EdgeRecord {
            src: cell(&row, src),
            dst: cell(&row, dst),
            tunnel_id: tunnel.and_then(|t| cell(&row, t)),
        });
    }
    Ok(records)
}

#[derive(Serialize, Deserialize)]
struct GraphDocument {
    nodes: Vec<NodeLabel>,
    edges: Vec<(NodeLabel, NodeLabel)>,
}

/// Serializes a graph as `{"nodes":[...],"edges":[[src,dst],...]}` with
/// nodes and edges in lexicographic order, so output is byte-stable.
pub fn graph_to_json(graph: &DirectedGraph) -> String {
    let doc = GraphDocument {
        nodes: graph.labels().to_vec(),
        edges: graph
            .edges()
            .map(|(u, v)| (graph.label(u).clone(), graph.label(v).clone()))
            .collect(),
    };
    let mut text = serde_json::to_string(&doc).expect("graph document serializes");
    text.push('\n');
    text
}

/// Parses a graph document. Edges must reference listed nodes and the
/// graph must be simple and loop-free.
pub fn graph_from_json(text: &str) -> Result<DirectedGraph> {
    let doc: GraphDocument = serde_json::from_str(text)?;
    read_document(doc)
}

pub fn read_graph<R: Read>(reader: R) -> Result<DirectedGraph> {
    let doc: GraphDocument = serde_json::from_reader(BufReader::new(reader))?;
    read_document(doc)
}

fn read_document(doc: GraphDocument) -> Result<DirectedGraph> {
    let mut builder = GraphBuilder::default();
    let node_count = doc.nodes.len();
    for node in doc.nodes {
        builder.add_node(node);
    }
    let edge_count = doc.edges.len();
    for (src, dst) in doc.edges {
        builder.add_edge(src, dst);
    }
    let report = builder.report();
    if report.self_loops_dropped > 0 {
        return Err(Error::InvalidGraph("self-loop edge".into()));
    }
    if report.duplicate_edges_collapsed > 0 {
        return Err(Error::InvalidGraph("duplicate edge".into()));
    }
    let graph = builder.build();
    if graph.node_count() != node_count {
        return Err(Error::InvalidGraph(
            "node list has duplicates or edges reference unlisted nodes".into(),
        ));
    }
    debug_assert_eq!(graph.edge_count(), edge_count);
    Ok(graph)
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<DirectedGraph> {
    read_graph(File::open(path)?)
}

pub fn save_graph(graph: &DirectedGraph, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(graph_to_json(graph).as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Rounds to 9 significant digits. Applying it twice is a no-op, which
/// keeps parse/re-emit cycles byte-identical.
pub fn round_sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// Shortest decimal text of the 9-significant-digit rounding.
pub fn format_sig9(x: f64) -> String {
    round_sig9(x).to_string()
}

pub(crate) fn ser_sig9<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig9(*x))
}

pub(crate) fn ser_opt_sig9<S: Serializer>(
    x: &Option<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round_sig9(*v)),
        None => s.serialize_none(),
    }
}
