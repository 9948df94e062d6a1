//! Plain-text edge lists.
//!
//! One edge per line as two whitespace-separated 0-based node ids. Lines
//! starting with `#` are comments, except a `# nodes N` header which fixes
//! the node count; without it the count is one more than the largest id.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::graph::{CanonicalEdge, EdgeList, NodeId};
use crate::{Error, Result};

/// How to treat input that is not a simple undirected graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LoadMode {
    /// Loops and repeated edges are errors.
    #[default]
    Strict,
    /// Loops are dropped and repeated edges, in either direction, kept once.
    Sanitize,
}

fn parse_id(token: &str, line: usize) -> Result<u32> {
    let id: u64 = token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{token}` is not a node id"),
    })?;
    Ok(NodeId::new(id)?.get())
}

fn parse_header(comment: &str) -> Option<&str> {
    let mut words = comment.trim_start_matches('#').split_whitespace();
    match (words.next(), words.next(), words.next()) {
        (Some("nodes"), Some(n), None) => Some(n),
        _ => None,
    }
}

pub fn read_edge_list<R: Read>(reader: R, mode: LoadMode) -> Result<EdgeList> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen = HashSet::new();
    let mut max_id: Option<u32> = None;

    for (at, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let number = at + 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if text.starts_with('#') {
            if let Some(n) = parse_header(text) {
                let n = n.parse().map_err(|_| Error::Parse {
                    line: number,
                    message: format!("bad node count `{n}`"),
                })?;
                declared = Some(n);
            }
            continue;
        }
        let mut tokens = text.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse { line: number, message: "expected two node ids".into() });
        };
        let e = CanonicalEdge::new(parse_id(a, number)?, parse_id(b, number)?);
        max_id = max_id.max(Some(e.v()));
        if e.is_loop() {
            match mode {
                LoadMode::Strict => return Err(Error::NotSimple(format!("loop {e} on line {number}"))),
                LoadMode::Sanitize => continue,
            }
        }
        if !seen.insert(e) {
            match mode {
                LoadMode::Strict => {
                    return Err(Error::NotSimple(format!("duplicate edge {e} on line {number}")))
                }
                LoadMode::Sanitize => continue,
            }
        }
        edges.push(e);
    }

    let implied = max_id.map_or(0, |m| m as usize + 1);
    let nodes = match declared {
        Some(n) if n < implied => {
            return Err(Error::InvalidParameter(format!(
                "header declares {n} nodes but id {} occurs",
                implied - 1
            )))
        }
        Some(n) => n,
        None => implied,
    };
    EdgeList::new(nodes, edges)
}

pub fn read_edge_list_file(path: impl AsRef<Path>, mode: LoadMode) -> Result<EdgeList> {
    read_edge_list(File::open(path)?, mode)
}

/// Writes the `# nodes N` header and the edges in array order, or sorted.
pub fn write_edge_list<W: Write>(writer: W, graph: &EdgeList, sorted: bool) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "# nodes {}", graph.node_count())?;
    let sorted_edges;
    let edges = if sorted {
        sorted_edges = graph.sorted_edges();
        &sorted_edges[..]
    } else {
        graph.edges()
    };
    for e in edges {
        writeln!(w, "{} {}", e.u(), e.v())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_edge_list_file(path: impl AsRef<Path>, graph: &EdgeList, sorted: bool) -> Result<()> {
    write_edge_list(File::create(path)?, graph, sorted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let g = EdgeList::from_pairs(6, &[(3, 1), (0, 2)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &g, false).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "# nodes 6\n1 3\n0 2\n");
        assert_eq!(read_edge_list(&buf[..], LoadMode::Strict).unwrap(), g);
    }

    #[test]
    fn implied_node_count_and_comments() {
        let g = read_edge_list("# a comment\n\n0 4\n 2\t1 \n".as_bytes(), LoadMode::Strict).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn strict_and_sanitize() {
        let text = "0 1\n1 0\n2 2\n1 2\n";
        assert!(matches!(read_edge_list(text.as_bytes(), LoadMode::Strict), Err(Error::NotSimple(_))));
        let g = read_edge_list(text.as_bytes(), LoadMode::Sanitize).unwrap();
        assert_eq!(g.edges(), &[CanonicalEdge::new(0, 1), CanonicalEdge::new(1, 2)]);
        assert_eq!(g.node_count(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(read_edge_list("0 1 2\n".as_bytes(), LoadMode::Strict), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_edge_list("0 x\n".as_bytes(), LoadMode::Strict), Err(Error::Parse { .. })));
        let big = format!("0 {}\n", 1u64 << 28);
        assert!(matches!(read_edge_list(big.as_bytes(), LoadMode::Strict), Err(Error::NodeIdOutOfRange(_))));
        assert!(read_edge_list("# nodes 2\n0 5\n".as_bytes(), LoadMode::Strict).is_err());
    }
}
