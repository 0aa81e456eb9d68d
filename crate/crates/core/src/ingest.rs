//! Graph file parsing and canonicalization.
//!
//! Two formats are read: whitespace-separated edge lists (0-based unless a
//! `% base=1` comment says otherwise) and MatrixMarket coordinate files (1-based).

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{StaticGraph, Vertex};

/// Edges as read from a file, before self-loops and duplicates are dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawEdgeList {
    pub num_vertices_declared: Option<usize>,
    pub edges: Vec<(Vertex, Vertex)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Auto,
    EdgeList,
    MatrixMarket,
}

fn parse_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_id(tok: &str, line: usize) -> Result<u64> {
    tok.parse::<u64>().map_err(|_| parse_error(line, format!("expected a vertex id, found {tok:?}")))
}

fn to_vertex(id: u64, line: usize) -> Result<Vertex> {
    Vertex::try_from(id)
        .ok()
        .filter(|&v| v != Vertex::MAX)
        .ok_or_else(|| parse_error(line, format!("vertex id {id} exceeds the 32-bit id space")))
}

/// Parses a plain edge list: integer pairs, `#` or `%` comments.
///
/// The vertex count is one more than the largest id seen, or the count given by a
/// `# vertices N` header comment if that is larger.
pub fn parse_edge_list(reader: impl BufRead) -> Result<RawEdgeList> {
    let mut one_based = false;
    let mut header_count: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_id: Option<Vertex> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('%').or_else(|| trimmed.strip_prefix('#')) {
            let words: Vec<&str> = comment.split_whitespace().collect();
            if words.contains(&"base=1") {
                one_based = true;
            }
            if let Some(pos) = words.iter().position(|&w| w == "vertices") {
                header_count = words.get(pos + 1).and_then(|w| w.parse().ok());
            }
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() % 2 != 0 {
            return Err(parse_error(lineno, format!("expected vertex pairs, found {} tokens", tokens.len())));
        }
        for pair in tokens.chunks(2) {
            let mut ends = [0 as Vertex; 2];
            for (end, tok) in ends.iter_mut().zip(pair) {
                let id = parse_id(tok, lineno)?;
                let id = if one_based {
                    id.checked_sub(1).ok_or_else(|| parse_error(lineno, "vertex id 0 in a 1-based edge list"))?
                } else {
                    id
                };
                *end = to_vertex(id, lineno)?;
            }
            max_id = max_id.max(Some(ends[0].max(ends[1])));
            edges.push((ends[0], ends[1]));
        }
    }
    let from_ids = max_id.map(|m| m as usize + 1);
    Ok(RawEdgeList { num_vertices_declared: from_ids.max(header_count), edges })
}

/// Parses a MatrixMarket coordinate file as an undirected graph.
///
/// Numeric values are ignored; both triangles of a `general` matrix are accepted and
/// merged later by [`canonicalize`].
pub fn parse_matrix_market(reader: impl BufRead) -> Result<RawEdgeList> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(parse_error(1, "empty file, expected a %%MatrixMarket header")),
    };
    let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(parse_error(1, "missing %%MatrixMarket header"));
    }
    match fields.get(1..5) {
        Some([object, format, field, symmetry])
            if object == "matrix"
                && format == "coordinate"
                && matches!(field.as_str(), "pattern" | "integer" | "real")
                && matches!(symmetry.as_str(), "general" | "symmetric") => {}
        _ => return Err(parse_error(1, format!("unsupported MatrixMarket header {header:?}"))),
    }

    let mut dims: Option<(u64, u64, u64)> = None;
    let mut edges = Vec::new();
    for (i, line) in lines {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        let Some((rows, cols, nnz)) = dims else {
            if tokens.len() != 3 {
                return Err(parse_error(lineno, "expected a dimension line `rows cols entries`"));
            }
            let rows = parse_id(tokens[0], lineno)?;
            let cols = parse_id(tokens[1], lineno)?;
            let nnz = parse_id(tokens[2], lineno)?;
            if rows != cols {
                return Err(parse_error(lineno, format!("adjacency matrix must be square, got {rows}x{cols}")));
            }
            to_vertex(rows, lineno)?;
            dims = Some((rows, cols, nnz));
            edges.reserve(nnz.min(1 << 24) as usize);
            continue;
        };
        if tokens.len() < 2 {
            return Err(parse_error(lineno, "expected an entry `row col [value]`"));
        }
        let r = parse_id(tokens[0], lineno)?;
        let c = parse_id(tokens[1], lineno)?;
        for (idx, bound) in [(r, rows), (c, cols)] {
            if idx == 0 || idx > bound {
                return Err(Error::VertexOutOfRange { vertex: idx, num_vertices: bound as usize });
            }
        }
        if edges.len() as u64 == nnz {
            return Err(parse_error(lineno, format!("more entries than the {nnz} declared")));
        }
        edges.push(((r - 1) as Vertex, (c - 1) as Vertex));
    }
    let Some((rows, _, nnz)) = dims else {
        return Err(parse_error(1, "missing dimension line"));
    };
    if edges.len() as u64 != nnz {
        return Err(parse_error(0, format!("declared {nnz} entries but found {}", edges.len())));
    }
    Ok(RawEdgeList { num_vertices_declared: Some(rows as usize), edges })
}

/// Drops self-loops, orients each edge as `(min, max)`, sorts and deduplicates.
pub fn canonicalize(raw: &RawEdgeList) -> (Vec<(Vertex, Vertex)>, usize) {
    let mut edges: Vec<(Vertex, Vertex)> =
        raw.edges.iter().filter(|(u, v)| u != v).map(|&(u, v)| (u.min(v), u.max(v))).collect();
    edges.sort_unstable();
    edges.dedup();
    let needed = edges.iter().map(|&(_, v)| v as usize + 1).max().unwrap_or(0);
    let n = raw.num_vertices_declared.unwrap_or(0).max(needed);
    (edges, n)
}

/// Parses `text` in the given format (sniffing the MatrixMarket magic for [`Format::Auto`]).
pub fn parse_graph(text: &[u8], format: Format) -> Result<StaticGraph> {
    let format = match format {
        Format::Auto if text.starts_with(b"%%MatrixMarket") => Format::MatrixMarket,
        Format::Auto => Format::EdgeList,
        f => f,
    };
    let raw = match format {
        Format::MatrixMarket => parse_matrix_market(text)?,
        _ => parse_edge_list(text)?,
    };
    let (edges, n) = canonicalize(&raw);
    StaticGraph::from_edges(n, &edges)
}

pub fn read_graph(path: impl AsRef<Path>, format: Format) -> Result<StaticGraph> {
    let mut text = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut text)?;
    parse_graph(&text, format)
}

/// Writes `g` as a 0-based edge list with a `# vertices N` header, one edge per line.
pub fn write_edge_list(g: &StaticGraph, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "# vertices {} edges {}", g.num_vertices(), g.num_edges())?;
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_basic() {
        let raw = parse_edge_list(&b"0 1\n1 2\n"[..]).unwrap();
        assert_eq!(raw.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(raw.num_vertices_declared, Some(3));
    }

    #[test]
    fn edge_list_comment() {
        let raw = parse_edge_list(&b"# c\n2 3\n"[..]).unwrap();
        assert_eq!(raw.edges, vec![(2, 3)]);
        assert_eq!(raw.num_vertices_declared, Some(4));
    }

    #[test]
    fn edge_list_bad_token() {
        match parse_edge_list(&b"1 two\n"[..]) {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn edge_list_odd_tokens() {
        assert!(matches!(parse_edge_list(&b"0 1\n3\n"[..]), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn edge_list_one_based() {
        let raw = parse_edge_list(&b"% base=1\n1 2\n2 3\n"[..]).unwrap();
        assert_eq!(raw.edges, vec![(0, 1), (1, 2)]);
    }

    const MTX: &str = "%%MatrixMarket matrix coordinate pattern symmetric\n% comment\n3 3 2\n1 2\n2 3\n";

    #[test]
    fn mtx_basic() {
        let raw = parse_matrix_market(MTX.as_bytes()).unwrap();
        assert_eq!(raw.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(raw.num_vertices_declared, Some(3));
    }

    #[test]
    fn mtx_diagonal_survives_parse_only() {
        let text = "%%MatrixMarket matrix coordinate real general\n3 3 2\n2 2 1.5\n1 3 -2\n";
        let raw = parse_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(raw.edges, vec![(1, 1), (0, 2)]);
        assert_eq!(canonicalize(&raw), (vec![(0, 2)], 3));
    }

    #[test]
    fn mtx_range_error() {
        let text = "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 1\n5 1\n";
        assert!(matches!(parse_matrix_market(text.as_bytes()), Err(Error::VertexOutOfRange { vertex: 5, .. })));
    }

    #[test]
    fn mtx_header_and_dimension_errors() {
        assert!(parse_matrix_market(&b"3 3 1\n1 2\n"[..]).is_err());
        let text = "%%MatrixMarket matrix coordinate pattern symmetric\n3 4 1\n1 2\n";
        assert!(parse_matrix_market(text.as_bytes()).is_err());
        let text = "%%MatrixMarket matrix coordinate pattern symmetric\n3 3 2\n1 2\n";
        assert!(parse_matrix_market(text.as_bytes()).is_err());
        let text = "%%MatrixMarket matrix array real general\n3 3\n";
        assert!(parse_matrix_market(text.as_bytes()).is_err());
    }

    #[test]
    fn canonicalize_examples() {
        let raw = RawEdgeList { num_vertices_declared: Some(3), edges: vec![(1, 0), (0, 1), (2, 2)] };
        assert_eq!(canonicalize(&raw), (vec![(0, 1)], 3));
        let raw = RawEdgeList { num_vertices_declared: Some(7), edges: vec![] };
        assert_eq!(canonicalize(&raw), (vec![], 7));
        let raw = RawEdgeList { num_vertices_declared: None, edges: vec![(3, 3), (3, 4), (4, 3)] };
        assert_eq!(canonicalize(&raw), (vec![(3, 4)], 5));
    }

    #[test]
    fn writer_round_trip_keeps_isolated_vertices() {
        let g = StaticGraph::from_edges(6, &[(0, 3), (1, 2), (2, 3)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(parse_graph(&buf, Format::EdgeList).unwrap(), g);
    }

    #[test]
    fn sniffs_format() {
        let g = parse_graph(MTX.as_bytes(), Format::Auto).unwrap();
        assert_eq!(g.num_edges(), 2);
        let g = parse_graph(b"0 1\n1 0\n0 0\n", Format::Auto).unwrap();
        assert_eq!(g.num_edges(), 1);
    }
}
