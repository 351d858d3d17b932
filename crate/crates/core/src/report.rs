//! Report emitters behind the command-line tool.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::centrality::{self, Measure};
use crate::community::{self, CommunityReport};
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeLabel};
use crate::io::{format_sig9, load_graph, ser_sig9};
use crate::metrics::{self, DegreeMode, MetricSet, MetricsSnapshot};
use crate::percolation::{self, AttackStrategy, PercolationTrace, TraceComparison};

pub const UNKNOWN_COUNTRY: &str = "UNKNOWN";

/// Node label to country code, read from a `label,country` CSV.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountryMapping {
    map: HashMap<NodeLabel, String>,
}

impl CountryMapping {
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = csv.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| Error::MalformedMapping(format!("missing `{name}` column")))
        };
        let (label_col, country_col) = (col("label")?, col("country")?);
        let mut map = HashMap::new();
        for (line, row) in csv.records().enumerate() {
            let row = row.map_err(|e| Error::MalformedMapping(e.to_string()))?;
            let field = |i: usize| row.get(i).map(str::trim).unwrap_or("");
            let label = NodeLabel::new(field(label_col))
                .map_err(|_| Error::MalformedMapping(format!("row {}: empty label", line + 1)))?;
            let country = field(country_col);
            if country.is_empty() {
                return Err(Error::MalformedMapping(format!("row {}: empty country", line + 1)));
            }
            if map.insert(label.clone(), country.to_owned()).is_some() {
                return Err(Error::MalformedMapping(format!("duplicate label `{label}`")));
            }
        }
        Ok(CountryMapping { map })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    pub fn insert(&mut self, label: NodeLabel, country: &str) {
        self.map.insert(label, country.to_owned());
    }

    pub fn country(&self, label: &NodeLabel) -> &str {
        self.map.get(label).map_or(UNKNOWN_COUNTRY, String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountryDegree {
    pub country: String,
    pub total_degree: usize,
    pub nodes: usize,
}

/// Sums the total degree of the global top-`k` nodes per country,
/// largest first.
pub fn degree_by_country(
    graph: &DirectedGraph,
    mapping: &CountryMapping,
    k: usize,
) -> Result<Vec<CountryDegree>> {
    let scores = centrality::centrality_scores(graph, Measure::TotalDegree)?;
    let mut groups: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let top = scores.top_k(k)?;
    for (label, score) in &top {
        let entry = groups.entry(mapping.country(label)).or_default();
        entry.0 += *score as usize;
        entry.1 += 1;
    }
    let mut rows: Vec<CountryDegree> = groups
        .into_iter()
        .map(|(country, (total_degree, nodes))| CountryDegree {
            country: country.to_owned(),
            total_degree,
            nodes,
        })
        .collect();
    rows.sort_by(|a, b| b.total_degree.cmp(&a.total_degree).then(a.country.cmp(&b.country)));
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesFormat {
    Csv,
    Json,
}

impl SeriesFormat {
    /// `.csv` selects CSV; anything else is JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => SeriesFormat::Csv,
            _ => SeriesFormat::Json,
        }
    }
}

pub const TRACE_CSV_HEADER: [&str; 7] = ["step", "removed", "removed_degree", "n", "m", "density", "apl"];

/// Renders a trace as one row per step. Floats use 9 significant digits
/// and absent values are empty (CSV) or omitted (JSON).
pub fn emit_trace_series(trace: &PercolationTrace, format: SeriesFormat) -> String {
    match format {
        SeriesFormat::Json => {
            let mut text = serde_json::to_string_pretty(trace).expect("trace serializes");
            text.push('\n');
            text
        }
        SeriesFormat::Csv => {
            let mut out = csv::Writer::from_writer(Vec::new());
            out.write_record(TRACE_CSV_HEADER).expect("in-memory write");
            let opt = |x: Option<f64>| x.map(format_sig9).unwrap_or_default();
            for step in &trace.steps {
                out.write_record([
                    step.step.to_string(),
                    step.removed.as_ref().map(|l| l.to_string()).unwrap_or_default(),
                    step.removed_degree.to_string(),
                    step.snapshot.n.to_string(),
                    step.snapshot.m.to_string(),
                    opt(step.snapshot.density),
                    opt(step.snapshot.apl),
                ])
                .expect("in-memory write");
            }
            String::from_utf8(out.into_inner().expect("flush")).expect("utf-8")
        }
    }
}

pub fn parse_trace_json(text: &str) -> Result<PercolationTrace> {
    Ok(serde_json::from_str(text)?)
}

/// Full metrics snapshot of a graph file.
pub fn stats_command(path: impl AsRef<Path>) -> Result<MetricsSnapshot> {
    Ok(metrics::snapshot(&load_graph(path)?, &MetricSet::ALL))
}

pub fn snapshot_json(snapshot: &MetricsSnapshot) -> String {
    let mut text = serde_json::to_string_pretty(snapshot).expect("snapshot serializes");
    text.push('\n');
    text
}

/// Ranking CSV. Degree measures print all three degree columns; other
/// measures print a single score column named after the measure.
pub fn centrality_csv(graph: &DirectedGraph, measure: Measure, k: usize) -> Result<String> {
    let scores = centrality::centrality_scores(graph, measure)?;
    let top = scores.top_k(k)?;
    let mut out = csv::Writer::from_writer(Vec::new());
    let write = |out: &mut csv::Writer<Vec<u8>>, row: Vec<String>| -> Result<()> {
        out.write_record(row)?;
        Ok(())
    };
    if measure.degree_mode().is_some() {
        write(&mut out, ["label", "in_degree", "out_degree", "total_degree"].map(String::from).to_vec())?;
        for (label, _) in &top {
            let v = graph.index_of(label.as_str()).expect("ranked node is in graph");
            write(
                &mut out,
                vec![
                    label.to_string(),
                    graph.in_degree(v).to_string(),
                    graph.out_degree(v).to_string(),
                    graph.total_degree(v).to_string(),
                ],
            )?;
        }
    } else {
        let column = measure.name().replace('-', "_");
        write(&mut out, vec!["label".into(), column])?;
        for (label, score) in &top {
            write(&mut out, vec![label.to_string(), format_sig9(*score)])?;
        }
    }
    Ok(String::from_utf8(out.into_inner().map_err(|e| e.into_error())?).expect("utf-8"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedNode {
    pub label: NodeLabel,
    pub score: usize,
}

/// Separate top-`k` rankings by in-, out- and total degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeTable {
    pub in_degree: Vec<RankedNode>,
    pub out_degree: Vec<RankedNode>,
    pub total_degree: Vec<RankedNode>,
}

pub fn degree_table(graph: &DirectedGraph, k: usize) -> Result<DegreeTable> {
    let rank = |measure| -> Result<Vec<RankedNode>> {
        Ok(centrality::centrality_scores(graph, measure)?
            .top_k(k)?
            .into_iter()
            .map(|(label, score)| RankedNode {
                label,
                score: score as usize,
            })
            .collect())
    };
    Ok(DegreeTable {
        in_degree: rank(Measure::InDegree)?,
        out_degree: rank(Measure::OutDegree)?,
        total_degree: rank(Measure::TotalDegree)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Centralization {
    #[serde(rename = "in", serialize_with = "ser_sig9")]
    pub in_degree: f64,
    #[serde(rename = "out", serialize_with = "ser_sig9")]
    pub out_degree: f64,
    #[serde(serialize_with = "ser_sig9")]
    pub total: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackComparison {
    pub adaptive: PercolationTrace,
    #[serde(rename = "static")]
    pub fixed: PercolationTrace,
    pub delta: TraceComparison,
}

/// Everything the `report` command prints.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub stats: MetricsSnapshot,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centralization: Option<Centralization>,
    pub top_nodes: DegreeTable,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_by_country: Option<Vec<CountryDegree>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub communities: Option<CommunityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub percolation: Option<AttackComparison>,
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub top: usize,
    pub steps: usize,
    pub seed: u64,
    pub min_community_size: usize,
    pub countries: Option<CountryMapping>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            top: 10,
            steps: 3,
            seed: 0,
            min_community_size: 5,
            countries: None,
        }
    }
}

/// Runs the whole pipeline: stats, top-node tables, country grouping,
/// communities and an adaptive vs. static total-degree attack.
pub fn analysis_report(graph: &DirectedGraph, options: &ReportOptions) -> Result<AnalysisReport> {
    let stats = metrics::snapshot(graph, &MetricSet::ALL);
    let centralization = if graph.node_count() >= 3 {
        Some(Centralization {
            in_degree: metrics::degree_centralization(graph, DegreeMode::In)?,
            out_degree: metrics::degree_centralization(graph, DegreeMode::Out)?,
            total: metrics::degree_centralization(graph, DegreeMode::Total)?,
        })
    } else {
        None
    };
    let top_nodes = degree_table(graph, options.top)?;
    let degree_by_country = options
        .countries
        .as_ref()
        .map(|m| degree_by_country(graph, m, options.top))
        .transpose()?;
    let communities = if graph.edge_count() > 0 {
        let partition = community::louvain(graph, options.seed, 1.0)?;
        Some(CommunityReport::new(&partition, options.min_community_size))
    } else {
        None
    };
    let steps = options.steps.min(graph.node_count().saturating_sub(1));
    let percolation = if graph.node_count() > 0 {
        let metrics = MetricSet::default();
        let adaptive = percolation::run_attack(graph, &AttackStrategy::adaptive(Measure::TotalDegree), steps, &metrics)?;
        let fixed = percolation::run_attack(graph, &AttackStrategy::fixed_ranking(Measure::TotalDegree), steps, &metrics)?;
        let delta = percolation::compare_traces(&adaptive, &fixed)?;
        Some(AttackComparison { adaptive, fixed, delta })
    } else {
        None
    };
    Ok(AnalysisReport {
        stats,
        centralization,
        top_nodes,
        degree_by_country,
        communities,
        percolation,
    })
}
