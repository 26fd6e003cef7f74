//! Text edge-list format for regular bipartite graphs.
//!
//! ```text
//! # comment lines start with '#'
//! bipartite <d> <nX> <nY>
//! <x> <y>        (exactly d * nX lines, 0 <= x < nX <= y < nX + nY)
//! ```
//!
//! Blank lines are ignored. Duplicate edges are rejected.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{RegularBipartiteGraph, Side, MAX_VERTICES};
use crate::vertex_set::Vertex;

/// Reads and validates a graph file.
pub fn load_graph(path: impl AsRef<Path>) -> Result<RegularBipartiteGraph> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_graph(&text)
}

pub fn parse_graph(text: &str) -> Result<RegularBipartiteGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "bipartite" {
        return Err(Error::Parse {
            line: header_line,
            message: format!("expected `bipartite <d> <nX> <nY>`, got {header:?}"),
        });
    }
    let num = |s: &str, what: &str| -> Result<usize> {
        s.parse::<usize>().map_err(|_| Error::Parse {
            line: header_line,
            message: format!("invalid {what} {s:?}"),
        })
    };
    let d = num(fields[1], "degree")?;
    let n_x = num(fields[2], "nX")?;
    let n_y = num(fields[3], "nY")?;
    if d == 0 {
        return Err(Error::Parse {
            line: header_line,
            message: "degree must be at least 1".into(),
        });
    }
    let n = n_x
        .checked_add(n_y)
        .filter(|&n| n <= MAX_VERTICES)
        .ok_or_else(|| Error::SizeLimit(format!("more than {MAX_VERTICES} vertices")))?;
    if n_x != n_y || d > n_y {
        return Err(Error::Regularity {
            line: header_line,
            message: format!("no {d}-regular bipartite graph has classes of sizes {n_x} and {n_y}"),
        });
    }

    let mut degrees = vec![0usize; n];
    let mut seen = HashSet::with_capacity(d * n_x);
    let mut edges = Vec::with_capacity(d * n_x);
    let mut last_line = header_line;
    for (line, content) in lines {
        last_line = line;
        let mut parts = content.split_whitespace();
        let (Some(xs), Some(ys), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse {
                line,
                message: format!("expected `<x> <y>`, got {content:?}"),
            });
        };
        let parse = |s: &str| -> Result<usize> {
            s.parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("invalid vertex {s:?}"),
            })
        };
        let (x, y) = (parse(xs)?, parse(ys)?);
        if x >= n || y >= n {
            return Err(Error::Parse {
                line,
                message: format!("vertex out of range 0..{n}"),
            });
        }
        match (x < n_x, y < n_x) {
            (true, true) => {
                return Err(Error::Bipartiteness {
                    line,
                    message: format!("edge {x}-{y} joins two X vertices"),
                })
            }
            (false, false) => {
                return Err(Error::Bipartiteness {
                    line,
                    message: format!("edge {x}-{y} joins two Y vertices"),
                })
            }
            (false, true) => {
                return Err(Error::Parse {
                    line,
                    message: format!("edge {x}-{y} must list its X end first"),
                })
            }
            (true, false) => {}
        }
        if !seen.insert((x, y)) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate edge {x}-{y}"),
            });
        }
        for v in [x, y] {
            degrees[v] += 1;
            if degrees[v] > d {
                return Err(Error::Regularity {
                    line,
                    message: format!("vertex {v} exceeds degree {d}"),
                });
            }
        }
        edges.push((x as u32, y as u32));
    }
    if let Some(v) = degrees.iter().position(|&k| k != d) {
        return Err(Error::Regularity {
            line: last_line,
            message: format!("vertex {v} has degree {} instead of {d}", degrees[v]),
        });
    }
    RegularBipartiteGraph::from_edges(d, n_x, n_y, &edges)
}

/// Serializes a graph in the edge-list format.
///
/// Vertices are relabelled so `X` comes first, each class in ascending id order;
/// for graphs already in that layout the labels are unchanged.
pub fn write_graph(g: &RegularBipartiteGraph) -> String {
    let mut label = vec![0u32; g.vertex_count()];
    let xs = g.class(Side::X).to_vec();
    let ys = g.class(Side::Y).to_vec();
    for (i, &v) in xs.iter().chain(&ys).enumerate() {
        label[v as usize] = i as u32;
    }
    let mut out = String::new();
    let _ = writeln!(out, "bipartite {} {} {}", g.degree(), xs.len(), ys.len());
    for &x in &xs {
        for y in g.neighbors(Vertex(x)) {
            let _ = writeln!(out, "{} {}", label[x as usize], label[y.index()]);
        }
    }
    out
}
