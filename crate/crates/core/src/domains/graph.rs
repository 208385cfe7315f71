use crate::error::{Error, Result};

/// A graph on vertices `0..n_vertices`; edge `i` is the `i`-th pair in `edges`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphData {
    pub directed: bool,
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphData {
    pub fn new(directed: bool, n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= n_vertices || v >= n_vertices {
                return Err(Error::usage(format!(
                    "edge {i} ({u}, {v}) has an endpoint outside 0..{n_vertices}"
                )));
            }
            if u == v {
                return Err(Error::usage(format!("edge {i} is a self-loop on vertex {u}")));
            }
        }
        Ok(GraphData {
            directed,
            n_vertices,
            edges,
        })
    }

    pub fn undirected(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        GraphData::new(false, n_vertices, edges.to_vec())
    }

    pub fn directed(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        GraphData::new(true, n_vertices, edges.to_vec())
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }
}
