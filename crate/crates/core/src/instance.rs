//! Line-oriented instance files.
//!
//! ```text
//! # comment
//! domain matching size=2
//! graph undirected 4 4
//! 0 1
//! 1 2
//! 2 3
//! 3 0
//! ```
//!
//! Elements are numbered by file order: edge `i` is the `i`-th edge line and
//! vertices keep their written ids.

use std::collections::HashMap;

use crate::domains::{
    dagdp_oracle, explicit_oracle, matching_oracle, matroid_base_oracle, mincut_oracle, vertex_cover_oracle,
    DagDpInstance, GraphData, MatroidSpec,
};
use crate::error::{Error, Result};
use crate::mask::{SetFamily, SubsetMask};
use crate::oracle::DomainOracle;

/// A parsed instance; owns everything needed to build its oracle.
#[derive(Clone, Debug)]
pub enum DomainInstance {
    Explicit(SetFamily),
    VertexCover { graph: GraphData, ell: usize },
    SpanningTree(GraphData),
    UniformMatroid { universe: usize, rank: usize },
    PartitionMatroid { universe: usize, blocks: Vec<(usize, Vec<usize>)> },
    Matching { graph: GraphData, size: usize },
    StMincut { graph: GraphData, s: usize, t: usize },
    DagDp(DagDpInstance),
}

impl DomainInstance {
    pub fn kind(&self) -> &'static str {
        match self {
            DomainInstance::Explicit(_) => "explicit",
            DomainInstance::VertexCover { .. } => "vertex_cover",
            DomainInstance::SpanningTree(_) => "spanning_tree",
            DomainInstance::UniformMatroid { .. } => "uniform_matroid",
            DomainInstance::PartitionMatroid { .. } => "partition_matroid",
            DomainInstance::Matching { .. } => "matching",
            DomainInstance::StMincut { .. } => "st_mincut",
            DomainInstance::DagDp(_) => "dag_dp",
        }
    }

    pub fn oracle(&self) -> Result<Box<dyn DomainOracle>> {
        Ok(match self {
            DomainInstance::Explicit(f) => Box::new(explicit_oracle(f.clone())),
            DomainInstance::VertexCover { graph, ell } => Box::new(vertex_cover_oracle(graph.clone(), *ell)?),
            DomainInstance::SpanningTree(g) => Box::new(matroid_base_oracle(MatroidSpec::Graphic(g.clone()))?),
            DomainInstance::UniformMatroid { universe, rank } => Box::new(matroid_base_oracle(MatroidSpec::Uniform {
                universe: *universe,
                rank: *rank,
            })?),
            DomainInstance::PartitionMatroid { universe, blocks } => {
                Box::new(matroid_base_oracle(MatroidSpec::Partition {
                    universe: *universe,
                    blocks: blocks.clone(),
                })?)
            }
            DomainInstance::Matching { graph, size } => Box::new(matching_oracle(graph.clone(), *size)?),
            DomainInstance::StMincut { graph, s, t } => Box::new(mincut_oracle(graph.clone(), *s, *t)?),
            DomainInstance::DagDp(inst) => Box::new(dagdp_oracle(inst.clone())?),
        })
    }
}

struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items: Vec<(usize, Vec<&str>)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .map(|(i, l)| (i, l.split_whitespace().collect()))
            .collect();
        let last_line = text.lines().count().max(1);
        Lines {
            items,
            pos: 0,
            last_line,
        }
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let item = self.items.get(self.pos).cloned();
        self.pos += 1;
        item
    }

    fn peek_word(&self) -> Option<&'a str> {
        self.items.get(self.pos).map(|(_, w)| w[0])
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        self.next()
            .ok_or_else(|| Error::parse(self.last_line, format!("unexpected end of file, expected {what}")))
    }
}

fn number(line: usize, word: &str, what: &str) -> Result<usize> {
    word.parse()
        .map_err(|_| Error::parse(line, format!("expected {what}, found '{word}'")))
}

fn key_values(line: usize, words: &[&str]) -> Result<HashMap<String, usize>> {
    let mut out = HashMap::new();
    for w in words {
        let Some((k, v)) = w.split_once('=') else {
            return Err(Error::parse(line, format!("expected key=value, found '{w}'")));
        };
        if out.insert(k.to_string(), number(line, v, &format!("a number for '{k}'"))?).is_some() {
            return Err(Error::parse(line, format!("parameter '{k}' given twice")));
        }
    }
    Ok(out)
}

fn take_param(line: usize, params: &mut HashMap<String, usize>, key: &str, kind: &str) -> Result<usize> {
    params
        .remove(key)
        .ok_or_else(|| Error::parse(line, format!("domain {kind} needs parameter {key}=<value>")))
}

fn element_list(line: usize, words: &[&str], n: usize) -> Result<Vec<usize>> {
    words
        .iter()
        .map(|w| {
            let e = number(line, w, "an element index")?;
            if e >= n {
                return Err(Error::parse(line, format!("element {e} outside universe 0..{n}")));
            }
            Ok(e)
        })
        .collect()
}

fn universe_line(lines: &mut Lines<'_>) -> Result<usize> {
    let (line, words) = lines.expect("'universe <n>'")?;
    if words[0] != "universe" || words.len() != 2 {
        return Err(Error::parse(line, "expected 'universe <n>'"));
    }
    number(line, words[1], "a universe size")
}

fn graph_block(lines: &mut Lines<'_>, need: Option<bool>) -> Result<GraphData> {
    let (line, words) = lines.expect("a graph block")?;
    if words[0] != "graph" || words.len() != 4 {
        return Err(Error::parse(line, "expected 'graph <directed|undirected> <nV> <m>'"));
    }
    let directed = match words[1] {
        "directed" => true,
        "undirected" => false,
        other => return Err(Error::parse(line, format!("unknown graph orientation '{other}'"))),
    };
    if need.is_some_and(|d| d != directed) {
        return Err(Error::parse(
            line,
            format!("this domain needs a {} graph", if directed { "undirected" } else { "directed" }),
        ));
    }
    let nv = number(line, words[2], "a vertex count")?;
    let m = number(line, words[3], "an edge count")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (el, ew) = lines.expect("an edge line '<u> <v>'")?;
        if ew.len() != 2 {
            return Err(Error::parse(el, "expected an edge line '<u> <v>'"));
        }
        let u = number(el, ew[0], "a vertex id")?;
        let v = number(el, ew[1], "a vertex id")?;
        if u >= nv || v >= nv {
            return Err(Error::parse(el, format!("edge ({u}, {v}) has an endpoint outside 0..{nv}")));
        }
        if u == v {
            return Err(Error::parse(el, format!("self-loop on vertex {u}")));
        }
        edges.push((u, v));
    }
    GraphData::new(directed, nv, edges).map_err(|e| match e {
        Error::Usage(msg) => Error::parse(line, msg),
        other => other,
    })
}

/// Parses an instance and checks that its oracle can be built.
pub fn parse_instance(text: &str) -> Result<DomainInstance> {
    let mut lines = Lines::new(text);
    let (head, words) = lines.expect("'domain <kind>'")?;
    if words[0] != "domain" || words.len() < 2 {
        return Err(Error::parse(head, "expected 'domain <kind> [key=value ...]'"));
    }
    let kind = words[1];
    let mut params = key_values(head, &words[2..])?;
    let inst = match kind {
        "explicit" => {
            let n = universe_line(&mut lines)?;
            crate::mask::check_universe(n)?;
            let mut family = SetFamily::new(n);
            while lines.peek_word() == Some("set") {
                let (line, w) = lines.next().expect("peeked");
                let set = SubsetMask::from_indices(n, element_list(line, &w[1..], n)?)?;
                if !family.insert(set) {
                    return Err(Error::parse(line, format!("duplicate set '{set}'")));
                }
            }
            DomainInstance::Explicit(family)
        }
        "vertex_cover" => {
            let ell = take_param(head, &mut params, "ell", kind)?;
            DomainInstance::VertexCover {
                graph: graph_block(&mut lines, Some(false))?,
                ell,
            }
        }
        "spanning_tree" => DomainInstance::SpanningTree(graph_block(&mut lines, Some(false))?),
        "uniform_matroid" => {
            let rank = take_param(head, &mut params, "rank", kind)?;
            let universe = universe_line(&mut lines)?;
            if rank > universe {
                return Err(Error::parse(head, format!("rank {rank} exceeds universe size {universe}")));
            }
            DomainInstance::UniformMatroid { universe, rank }
        }
        "partition_matroid" => {
            let universe = universe_line(&mut lines)?;
            let mut blocks = Vec::new();
            let mut used = vec![false; universe];
            while lines.peek_word() == Some("block") {
                let (line, w) = lines.next().expect("peeked");
                if w.len() < 2 {
                    return Err(Error::parse(line, "expected 'block <cap> <i> ...'"));
                }
                let cap = number(line, w[1], "a block capacity")?;
                let elems = element_list(line, &w[2..], universe)?;
                for &e in &elems {
                    if std::mem::replace(&mut used[e], true) {
                        return Err(Error::parse(line, format!("element {e} is already in another block")));
                    }
                }
                blocks.push((cap, elems));
            }
            DomainInstance::PartitionMatroid { universe, blocks }
        }
        "matching" => {
            let size = take_param(head, &mut params, "size", kind)?;
            DomainInstance::Matching {
                graph: graph_block(&mut lines, Some(false))?,
                size,
            }
        }
        "st_mincut" => {
            let s = take_param(head, &mut params, "s", kind)?;
            let t = take_param(head, &mut params, "t", kind)?;
            let graph = graph_block(&mut lines, None)?;
            if s >= graph.n_vertices || t >= graph.n_vertices || s == t {
                return Err(Error::parse(head, format!("terminals s={s}, t={t} must be distinct vertices")));
            }
            DomainInstance::StMincut { graph, s, t }
        }
        "dag_dp" => {
            let universe = take_param(head, &mut params, "universe", kind)?;
            let dag = graph_block(&mut lines, Some(true))?;
            let (line, w) = lines.expect("'labels q0 q1 ...'")?;
            if w[0] != "labels" {
                return Err(Error::parse(line, "expected 'labels q0 q1 ...'"));
            }
            let labels = element_list(line, &w[1..], universe)?;
            if labels.len() != dag.n_vertices {
                return Err(Error::parse(
                    line,
                    format!("{} labels for {} vertices", labels.len(), dag.n_vertices),
                ));
            }
            DomainInstance::DagDp(DagDpInstance { dag, labels, universe })
        }
        other => return Err(Error::parse(head, format!("unknown domain kind '{other}'"))),
    };
    if let Some(k) = params.keys().next() {
        return Err(Error::parse(head, format!("unexpected parameter '{k}' for domain {kind}")));
    }
    if let Some((line, w)) = lines.next() {
        return Err(Error::parse(line, format!("unexpected '{}' for domain {kind}", w[0])));
    }
    match inst.oracle() {
        Ok(_) => Ok(inst),
        Err(Error::Usage(msg)) => Err(Error::parse(head, msg)),
        Err(e) => Err(e),
    }
}
