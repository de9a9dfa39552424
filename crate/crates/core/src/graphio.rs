//! JSON and GraphML persistence for tripartite networks and bipartite
//! projections.
//!
//! # JSON
//!
//! Tripartite: `{"kind": "tripartite", "students": [..], "locations": [..],
//! "codes": [..], "triads": [{"student", "location", "code", "weight"}],
//! "edges": [{"source", "target", "layer", "weight"}]}`. The `edges` list holds
//! the three pairwise layers and is derived from `triads`; import checks it
//! when present.
//!
//! Bipartite: `{"kind": "bipartite", "left_type", "right_type", "left": [..],
//! "right": [..], "edges": [{"left", "right", "weight"}]}`.
//!
//! # GraphML
//!
//! Every node carries `nodetype` (`student`, `code`, `location` or `pair`)
//! and `label`. Pairwise edges carry an integer `weight`. A tripartite
//! graph also stores each triad as a `<hyperedge>` with three endpoints,
//! which is what import reads back.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;
use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::{Reader, Writer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hetnet::{BipartiteGraph, NodeType, TripartiteNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    Json,
    Graphml,
}

impl GraphFormat {
    pub fn extension(self) -> &'static str {
        match self {
            GraphFormat::Json => "json",
            GraphFormat::Graphml => "graphml",
        }
    }

    /// Format implied by a file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        ext.parse()
    }
}

impl fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(GraphFormat::Json),
            "graphml" | "xml" => Ok(GraphFormat::Graphml),
            _ => Err(Error::UnsupportedFormat(s.to_string())),
        }
    }
}

/// Either kind of exportable graph.
#[derive(Debug, Clone, PartialEq)]
pub enum Graph {
    Tripartite(TripartiteNetwork),
    Bipartite(BipartiteGraph),
}

impl From<TripartiteNetwork> for Graph {
    fn from(n: TripartiteNetwork) -> Self {
        Graph::Tripartite(n)
    }
}

impl From<BipartiteGraph> for Graph {
    fn from(g: BipartiteGraph) -> Self {
        Graph::Bipartite(g)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum JsonGraph {
    Tripartite {
        students: Vec<String>,
        locations: Vec<String>,
        codes: Vec<String>,
        triads: Vec<JsonTriad>,
        #[serde(default)]
        edges: Option<Vec<JsonLayerEdge>>,
    },
    Bipartite {
        left_type: NodeType,
        right_type: NodeType,
        left: Vec<String>,
        right: Vec<String>,
        edges: Vec<JsonEdge>,
    },
}

#[derive(Serialize, Deserialize)]
struct JsonTriad {
    student: String,
    location: String,
    code: String,
    weight: u64,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
struct JsonLayerEdge {
    source: String,
    target: String,
    layer: String,
    weight: u64,
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    left: String,
    right: String,
    weight: u64,
}

const LAYER_SC: &str = "student-code";
const LAYER_SL: &str = "student-location";
const LAYER_CL: &str = "code-location";

fn layer_edges(net: &TripartiteNetwork) -> Vec<JsonLayerEdge> {
    let mk = |layer: &str| {
        let layer = layer.to_string();
        move |(s, t, w): (&str, &str, u64)| JsonLayerEdge {
            source: s.to_string(),
            target: t.to_string(),
            layer: layer.clone(),
            weight: w,
        }
    };
    net.student_code_edges()
        .map(mk(LAYER_SC))
        .chain(net.student_location_edges().map(mk(LAYER_SL)))
        .chain(net.code_location_edges().map(mk(LAYER_CL)))
        .collect()
}

fn to_json(graph: &Graph) -> JsonGraph {
    match graph {
        Graph::Tripartite(net) => JsonGraph::Tripartite {
            students: net.students().map(str::to_string).collect(),
            locations: net.locations().map(str::to_string).collect(),
            codes: net.codes().map(str::to_string).collect(),
            triads: net
                .triads()
                .map(|(s, l, c, w)| JsonTriad {
                    student: s.into(),
                    location: l.into(),
                    code: c.into(),
                    weight: w,
                })
                .collect(),
            edges: Some(layer_edges(net)),
        },
        Graph::Bipartite(g) => JsonGraph::Bipartite {
            left_type: g.left_type(),
            right_type: g.right_type(),
            left: g.left_nodes().map(str::to_string).collect(),
            right: g.right_nodes().map(str::to_string).collect(),
            edges: g
                .edges()
                .map(|(l, r, w)| JsonEdge {
                    left: l.into(),
                    right: r.into(),
                    weight: w,
                })
                .collect(),
        },
    }
}

fn from_json(j: JsonGraph) -> Result<Graph> {
    match j {
        JsonGraph::Tripartite {
            students,
            locations,
            codes,
            triads,
            edges,
        } => {
            let net = TripartiteNetwork::from_parts(
                students,
                locations,
                codes,
                triads.into_iter().map(|t| (t.student, t.location, t.code, t.weight)),
            )
            .map_err(|e| Error::schema("triads", e.to_string()))?;
            if let Some(edges) = edges {
                if edges != layer_edges(&net) {
                    return Err(Error::schema("edges", "pairwise layers disagree with triads"));
                }
            }
            Ok(Graph::Tripartite(net))
        }
        JsonGraph::Bipartite {
            left_type,
            right_type,
            left,
            right,
            edges,
        } => {
            let mut g = BipartiteGraph::new(left_type, right_type);
            for n in &left {
                g.add_left(n.clone());
            }
            for n in &right {
                g.add_right(n.clone());
            }
            if g.left_len() != left.len() || g.right_len() != right.len() {
                return Err(Error::schema("left/right", "duplicate node label"));
            }
            for (i, e) in edges.iter().enumerate() {
                let loc = || format!("edges[{i}]");
                let l = g
                    .left_index(&e.left)
                    .ok_or_else(|| Error::schema(loc(), format!("unknown node `{}`", e.left)))?;
                let r = g
                    .right_index(&e.right)
                    .ok_or_else(|| Error::schema(loc(), format!("unknown node `{}`", e.right)))?;
                if e.weight == 0 || g.weight(&e.left, &e.right) != 0 {
                    return Err(Error::schema(loc(), "zero weight or repeated edge"));
                }
                g.add_weight_at(l, r, e.weight);
            }
            Ok(Graph::Bipartite(g))
        }
    }
}

/// Serializes `graph` in `format`.
pub fn export_to_string(graph: &Graph, format: GraphFormat) -> Result<String> {
    match format {
        GraphFormat::Json => {
            let mut s = serde_json::to_string_pretty(&to_json(graph))?;
            s.push('\n');
            Ok(s)
        }
        GraphFormat::Graphml => write_graphml(graph),
    }
}

/// Parses a graph; the format is detected from the content.
pub fn import_from_str(text: &str) -> Result<Graph> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('<') {
        read_graphml(text)
    } else {
        let j: JsonGraph = serde_json::from_str(text)
            .map_err(|e| Error::schema(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        from_json(j)
    }
}

pub fn export_graph(graph: &Graph, format: GraphFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = export_to_string(graph, format)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn import_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    import_from_str(&text)
}

const GRAPHML_NS: &str = "http://graphml.graphdrawing.org/xmlns";

fn xml_err(e: impl fmt::Display) -> Error {
    Error::InvalidInput(format!("xml write failed: {e}"))
}

fn write_graphml(graph: &Graph) -> Result<String> {
    let mut w = Writer::new_with_indent(Vec::new(), b' ', 2);
    w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
        .map_err(xml_err)?;
    w.write_event(Event::Start(
        BytesStart::new("graphml").with_attributes([("xmlns", GRAPHML_NS)]),
    ))
    .map_err(xml_err)?;
    for (id, target, name, ty) in [
        ("kind", "graph", "kind", "string"),
        ("left_type", "graph", "left_type", "string"),
        ("right_type", "graph", "right_type", "string"),
        ("nodetype", "node", "nodetype", "string"),
        ("label", "node", "label", "string"),
        ("side", "node", "side", "string"),
        ("weight", "edge", "weight", "long"),
        ("layer", "edge", "layer", "string"),
        ("hweight", "hyperedge", "weight", "long"),
    ] {
        w.write_event(Event::Empty(BytesStart::new("key").with_attributes([
            ("id", id),
            ("for", target),
            ("attr.name", name),
            ("attr.type", ty),
        ])))
        .map_err(xml_err)?;
    }
    w.write_event(Event::Start(
        BytesStart::new("graph").with_attributes([("id", "G"), ("edgedefault", "undirected")]),
    ))
    .map_err(xml_err)?;

    let data = |w: &mut Writer<Vec<u8>>, key: &str, value: &str| -> Result<()> {
        w.create_element("data")
            .with_attribute(("key", key))
            .write_text_content(BytesText::new(value))
            .map_err(xml_err)?;
        Ok(())
    };
    let node = |w: &mut Writer<Vec<u8>>, id: &str, ty: NodeType, label: &str, side: Option<&str>| -> Result<()> {
        w.write_event(Event::Start(BytesStart::new("node").with_attributes([("id", id)])))
            .map_err(xml_err)?;
        data(w, "nodetype", ty.as_str())?;
        data(w, "label", label)?;
        if let Some(side) = side {
            data(w, "side", side)?;
        }
        w.write_event(Event::End(BytesEnd::new("node"))).map_err(xml_err)?;
        Ok(())
    };
    let edge = |w: &mut Writer<Vec<u8>>, s: &str, t: &str, weight: u64, layer: Option<&str>| -> Result<()> {
        w.write_event(Event::Start(
            BytesStart::new("edge").with_attributes([("source", s), ("target", t)]),
        ))
        .map_err(xml_err)?;
        data(w, "weight", &weight.to_string())?;
        if let Some(layer) = layer {
            data(w, "layer", layer)?;
        }
        w.write_event(Event::End(BytesEnd::new("edge"))).map_err(xml_err)?;
        Ok(())
    };

    match graph {
        Graph::Tripartite(net) => {
            data(&mut w, "kind", "tripartite")?;
            let groups = [
                ("s", NodeType::Student, net.students().collect::<Vec<_>>()),
                ("l", NodeType::Location, net.locations().collect()),
                ("c", NodeType::Code, net.codes().collect()),
            ];
            for (prefix, ty, labels) in &groups {
                for (i, label) in labels.iter().enumerate() {
                    node(&mut w, &format!("{prefix}{i}"), *ty, label, None)?;
                }
            }
            let sid = |l: &str| format!("s{}", net.student_index(l).expect("own node"));
            let lid = |l: &str| format!("l{}", net.location_index(l).expect("own node"));
            let cid = |l: &str| format!("c{}", net.code_index(l).expect("own node"));
            for (s, c, wt) in net.student_code_edges() {
                edge(&mut w, &sid(s), &cid(c), wt, Some(LAYER_SC))?;
            }
            for (s, l, wt) in net.student_location_edges() {
                edge(&mut w, &sid(s), &lid(l), wt, Some(LAYER_SL))?;
            }
            for (c, l, wt) in net.code_location_edges() {
                edge(&mut w, &cid(c), &lid(l), wt, Some(LAYER_CL))?;
            }
            for (s, l, c, wt) in net.triads() {
                w.write_event(Event::Start(BytesStart::new("hyperedge")))
                    .map_err(xml_err)?;
                for id in [sid(s), lid(l), cid(c)] {
                    w.write_event(Event::Empty(
                        BytesStart::new("endpoint").with_attributes([("node", id.as_str())]),
                    ))
                    .map_err(xml_err)?;
                }
                data(&mut w, "hweight", &wt.to_string())?;
                w.write_event(Event::End(BytesEnd::new("hyperedge"))).map_err(xml_err)?;
            }
        }
        Graph::Bipartite(g) => {
            data(&mut w, "kind", "bipartite")?;
            data(&mut w, "left_type", g.left_type().as_str())?;
            data(&mut w, "right_type", g.right_type().as_str())?;
            for (i, label) in g.left_nodes().enumerate() {
                node(&mut w, &format!("a{i}"), g.left_type(), label, Some("left"))?;
            }
            for (i, label) in g.right_nodes().enumerate() {
                node(&mut w, &format!("b{i}"), g.right_type(), label, Some("right"))?;
            }
            for (l, r, wt) in g.edges_indexed() {
                edge(&mut w, &format!("a{l}"), &format!("b{r}"), wt, None)?;
            }
        }
    }
    w.write_event(Event::End(BytesEnd::new("graph"))).map_err(xml_err)?;
    w.write_event(Event::End(BytesEnd::new("graphml"))).map_err(xml_err)?;
    let mut text = String::from_utf8(w.into_inner()).expect("writer emits UTF-8");
    text.push('\n');
    Ok(text)
}

#[derive(Default)]
struct XmlNode {
    data: BTreeMap<String, String>,
}

#[derive(Default)]
struct XmlHyperedge {
    endpoints: Vec<String>,
    data: BTreeMap<String, String>,
}

#[derive(Default)]
struct XmlEdge {
    source: String,
    target: String,
    data: BTreeMap<String, String>,
}

enum Open {
    Node(String),
    Edge,
    Hyperedge,
    Graph,
}

/// Parsed GraphML document, keyed by attribute name rather than key id.
#[derive(Default)]
struct XmlDoc {
    graph_data: BTreeMap<String, String>,
    nodes: IndexMap<String, XmlNode>,
    edges: Vec<XmlEdge>,
    hyperedges: Vec<XmlHyperedge>,
}

fn parse_graphml(text: &str) -> Result<XmlDoc> {
    let mut reader = Reader::from_str(text);
    let mut doc = XmlDoc::default();
    let mut key_names: BTreeMap<String, String> = BTreeMap::new();
    let mut stack: Vec<Open> = Vec::new();
    let mut depth = 0usize;
    // Open <data> element: attribute name and the text read so far.
    let mut pending: Option<(String, String)> = None;
    let mut seen_root = false;
    let at = |reader: &Reader<&[u8]>| format!("byte {}", reader.buffer_position());
    loop {
        let event = reader
            .read_event()
            .map_err(|e| Error::schema(format!("byte {}", reader.error_position()), e.to_string()))?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                let attr = |key: &str| -> Result<Option<String>> {
                    match e.try_get_attribute(key) {
                        Ok(Some(a)) => a
                            .unescape_value()
                            .map(|v| Some(v.into_owned()))
                            .map_err(|err| Error::schema(at(&reader), err.to_string())),
                        Ok(None) => Ok(None),
                        Err(err) => Err(Error::schema(at(&reader), err.to_string())),
                    }
                };
                let required = |key: &str| -> Result<String> {
                    attr(key)?.ok_or_else(|| Error::schema(at(&reader), format!("<{name}> lacks `{key}`")))
                };
                match name.as_str() {
                    "graphml" => seen_root = true,
                    "key" => {
                        key_names.insert(required("id")?, required("attr.name")?);
                    }
                    "graph" => stack.push(Open::Graph),
                    "node" => {
                        let id = required("id")?;
                        if doc.nodes.insert(id.clone(), XmlNode::default()).is_some() {
                            return Err(Error::schema(at(&reader), format!("duplicate node id `{id}`")));
                        }
                        stack.push(Open::Node(id));
                    }
                    "edge" => {
                        doc.edges.push(XmlEdge {
                            source: required("source")?,
                            target: required("target")?,
                            ..Default::default()
                        });
                        stack.push(Open::Edge);
                    }
                    "hyperedge" => {
                        doc.hyperedges.push(XmlHyperedge::default());
                        stack.push(Open::Hyperedge);
                    }
                    "endpoint" => match (stack.last(), doc.hyperedges.last_mut()) {
                        (Some(Open::Hyperedge), Some(h)) => h.endpoints.push(required("node")?),
                        _ => return Err(Error::schema(at(&reader), "<endpoint> outside <hyperedge>")),
                    },
                    "data" => {
                        let key = required("key")?;
                        let attr_name = key_names.get(&key).cloned().unwrap_or(key);
                        if is_empty {
                            store_data(&mut doc, &stack, attr_name, String::new());
                        } else {
                            pending = Some((attr_name, String::new()));
                        }
                    }
                    _ => {}
                }
                if is_empty {
                    if matches!(name.as_str(), "graph" | "node" | "edge" | "hyperedge") {
                        stack.pop();
                    }
                } else {
                    depth += 1;
                }
            }
            Event::Text(t) => {
                if let Some((_, buf)) = pending.as_mut() {
                    buf.push_str(&t.unescape().map_err(|e| Error::schema(at(&reader), e.to_string()))?);
                }
            }
            Event::CData(t) => {
                if let Some((_, buf)) = pending.as_mut() {
                    buf.push_str(&String::from_utf8_lossy(&t));
                }
            }
            Event::End(e) => {
                depth = depth.saturating_sub(1);
                match e.name().as_ref() {
                    b"data" => {
                        if let Some((key, value)) = pending.take() {
                            store_data(&mut doc, &stack, key, value);
                        }
                    }
                    b"graph" | b"node" | b"edge" | b"hyperedge" => {
                        stack.pop();
                    }
                    _ => {}
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !seen_root || depth != 0 {
        return Err(Error::schema(
            format!("byte {}", text.len()),
            "unexpected end of document",
        ));
    }
    Ok(doc)
}

/// Records a `<data>` value on the innermost open element; an empty value
/// never overwrites one already read.
fn store_data(doc: &mut XmlDoc, stack: &[Open], key: String, value: String) {
    let target = match stack.last() {
        Some(Open::Node(id)) => doc.nodes.get_mut(id).map(|n| &mut n.data),
        Some(Open::Edge) => doc.edges.last_mut().map(|e| &mut e.data),
        Some(Open::Hyperedge) => doc.hyperedges.last_mut().map(|h| &mut h.data),
        Some(Open::Graph) => Some(&mut doc.graph_data),
        None => None,
    };
    if let Some(map) = target {
        map.insert(key, value);
    }
}

fn field<'a>(data: &'a BTreeMap<String, String>, key: &str, locator: &str) -> Result<&'a str> {
    data.get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::schema(locator, format!("missing `{key}`")))
}

fn weight_of(data: &BTreeMap<String, String>, locator: &str) -> Result<u64> {
    let raw = field(data, "weight", locator)?;
    match raw.parse::<u64>() {
        Ok(w) if w > 0 => Ok(w),
        _ => Err(Error::schema(
            locator,
            format!("weight `{raw}` is not a positive integer"),
        )),
    }
}

fn node_type(n: &XmlNode, locator: &str) -> Result<NodeType> {
    let raw = field(&n.data, "nodetype", locator)?;
    NodeType::parse(raw).ok_or_else(|| Error::schema(locator, format!("unknown nodetype `{raw}`")))
}

fn read_graphml(text: &str) -> Result<Graph> {
    let doc = parse_graphml(text)?;
    let kind = field(&doc.graph_data, "kind", "graph")?;
    let label = |id: &str, locator: &str| -> Result<String> {
        let n = doc
            .nodes
            .get(id)
            .ok_or_else(|| Error::schema(locator, format!("unknown node id `{id}`")))?;
        Ok(field(&n.data, "label", &format!("node {id}"))?.to_string())
    };
    match kind {
        "tripartite" => {
            let (mut students, mut locations, mut codes) = (Vec::new(), Vec::new(), Vec::new());
            for (id, n) in &doc.nodes {
                let loc = format!("node {id}");
                let l = field(&n.data, "label", &loc)?.to_string();
                match node_type(n, &loc)? {
                    NodeType::Student => students.push(l),
                    NodeType::Location => locations.push(l),
                    NodeType::Code => codes.push(l),
                    NodeType::Pair => return Err(Error::schema(loc, "pair node in a tripartite graph")),
                }
            }
            let mut triads = Vec::with_capacity(doc.hyperedges.len());
            for (i, h) in doc.hyperedges.iter().enumerate() {
                let loc = format!("hyperedge[{i}]");
                let mut by_type: BTreeMap<&'static str, String> = BTreeMap::new();
                for ep in &h.endpoints {
                    let n = doc
                        .nodes
                        .get(ep)
                        .ok_or_else(|| Error::schema(&loc, format!("unknown node id `{ep}`")))?;
                    by_type.insert(node_type(n, &loc)?.as_str(), label(ep, &loc)?);
                }
                if h.endpoints.len() != 3 || by_type.len() != 3 {
                    return Err(Error::schema(
                        loc,
                        "a triad needs one student, one location and one code",
                    ));
                }
                let w = weight_of(&h.data, &loc)?;
                let mut take = |k: &str| {
                    by_type
                        .remove(k)
                        .ok_or_else(|| Error::schema(&loc, format!("no {k} endpoint")))
                };
                triads.push((take("student")?, take("location")?, take("code")?, w));
            }
            let net = TripartiteNetwork::from_parts(students, locations, codes, triads)
                .map_err(|e| Error::schema("hyperedges", e.to_string()))?;
            let expected = layer_edges(&net);
            let mut found = Vec::with_capacity(doc.edges.len());
            for (i, e) in doc.edges.iter().enumerate() {
                let loc = format!("edge[{i}]");
                found.push(JsonLayerEdge {
                    source: label(&e.source, &loc)?,
                    target: label(&e.target, &loc)?,
                    layer: field(&e.data, "layer", &loc)?.to_string(),
                    weight: weight_of(&e.data, &loc)?,
                });
            }
            if found != expected {
                return Err(Error::schema("edges", "pairwise layers disagree with triads"));
            }
            Ok(Graph::Tripartite(net))
        }
        "bipartite" => {
            let parse_type = |key: &str| -> Result<NodeType> {
                let raw = field(&doc.graph_data, key, "graph")?;
                NodeType::parse(raw).ok_or_else(|| Error::schema("graph", format!("unknown {key} `{raw}`")))
            };
            let mut g = BipartiteGraph::new(parse_type("left_type")?, parse_type("right_type")?);
            let mut side_of = BTreeMap::new();
            for (id, n) in &doc.nodes {
                let loc = format!("node {id}");
                let l = field(&n.data, "label", &loc)?.to_string();
                let (before, after) = match field(&n.data, "side", &loc)? {
                    "left" => (g.left_len(), g.add_left(l) + 1),
                    "right" => (g.right_len(), g.add_right(l) + 1),
                    other => return Err(Error::schema(loc, format!("unknown side `{other}`"))),
                };
                if after == before {
                    return Err(Error::schema(loc, "duplicate node label"));
                }
                side_of.insert(id.as_str(), after - 1);
            }
            for (i, e) in doc.edges.iter().enumerate() {
                let loc = format!("edge[{i}]");
                let side = |id: &str| -> Result<&str> {
                    let n = doc
                        .nodes
                        .get(id)
                        .ok_or_else(|| Error::schema(&loc, format!("unknown node id `{id}`")))?;
                    field(&n.data, "side", &loc)
                };
                let (s_side, t_side) = (side(&e.source)?, side(&e.target)?);
                if s_side != "left" || t_side != "right" {
                    return Err(Error::schema(loc, "edges must run left to right"));
                }
                let (l, r) = (side_of[e.source.as_str()], side_of[e.target.as_str()]);
                if g.weight(g.left_label(l), g.right_label(r)) != 0 {
                    return Err(Error::schema(loc, "repeated edge"));
                }
                g.add_weight_at(l, r, weight_of(&e.data, &loc)?);
            }
            Ok(Graph::Bipartite(g))
        }
        other => Err(Error::schema("graph", format!("unknown graph kind `{other}`"))),
    }
}
