//! DIMACS-style graph file parser.
//!
//! Format: a header `p graph <n> <m> <directed|undirected>`, then exactly `m`
//! edge lines `e <u> <v>` with `1 <= u,v <= n`. Lines starting with `c` are
//! comments anywhere; a `c id <identifier>` comment names the graph. Files
//! without one get a content-hash id.

use super::{ParseError, SourceSpan};
use crate::theorybase::Graph;

fn span_of(line_no: usize, line: &str) -> SourceSpan {
    SourceSpan::new(line_no, 1, line.len())
}

/// Parses a graph file. Undirected edges are normalized to `u < v`;
/// self-loops and duplicate edges are rejected.
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut header: Option<(usize, usize, bool)> = None;
    let mut id: Option<String> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        let span = span_of(line_no, line);
        if !line.is_ascii() {
            return Err(ParseError::new(span, "non-ASCII input".to_string()));
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        match tokens[0] {
            "c" => {
                if tokens.len() >= 3 && tokens[1] == "id" && id.is_none() {
                    id = Some(tokens[2..].join(" "));
                }
            }
            "p" => {
                if header.is_some() {
                    return Err(ParseError::new(span, "duplicate 'p' header line".to_string()));
                }
                if tokens.len() != 5 || tokens[1] != "graph" {
                    return Err(ParseError::new(
                        span,
                        "header must be 'p graph <n> <m> <directed|undirected>'".to_string(),
                    ));
                }
                let n: usize = tokens[2]
                    .parse()
                    .map_err(|_| ParseError::new(span, format!("bad vertex count '{}'", tokens[2])))?;
                let m: usize = tokens[3]
                    .parse()
                    .map_err(|_| ParseError::new(span, format!("bad edge count '{}'", tokens[3])))?;
                let directed = match tokens[4] {
                    "directed" => true,
                    "undirected" => false,
                    other => {
                        return Err(ParseError::new(
                            span,
                            format!("expected 'directed' or 'undirected', found '{other}'"),
                        ))
                    }
                };
                header = Some((n, m, directed));
            }
            "e" => {
                let (n, m, directed) = header.ok_or_else(|| {
                    ParseError::new(span, "edge line before 'p' header".to_string())
                })?;
                if tokens.len() != 3 {
                    return Err(ParseError::new(span, "edge line must be 'e <u> <v>'".to_string()));
                }
                let u: usize = tokens[1]
                    .parse()
                    .map_err(|_| ParseError::new(span, format!("bad vertex '{}'", tokens[1])))?;
                let v: usize = tokens[2]
                    .parse()
                    .map_err(|_| ParseError::new(span, format!("bad vertex '{}'", tokens[2])))?;
                if u < 1 || u > n || v < 1 || v > n {
                    return Err(ParseError::new(
                        span,
                        format!("vertex out of range: graph has {n} vertices"),
                    ));
                }
                if u == v {
                    return Err(ParseError::new(span, format!("self-loop at vertex {u}")));
                }
                let e = if directed || u < v { (u, v) } else { (v, u) };
                if edges.contains(&e) {
                    return Err(ParseError::new(span, format!("duplicate edge {} {}", e.0, e.1)));
                }
                if edges.len() == m {
                    return Err(ParseError::new(
                        span,
                        format!("more than the declared {m} edges"),
                    ));
                }
                edges.push(e);
            }
            other => {
                return Err(ParseError::new(
                    span,
                    format!("unrecognized line kind '{other}'"),
                ));
            }
        }
    }

    let last = SourceSpan::new(text.lines().count().max(1), 1, 1);
    let (n, m, directed) =
        header.ok_or_else(|| ParseError::new(last, "missing 'p graph' header".to_string()))?;
    if edges.len() != m {
        return Err(ParseError::new(
            last,
            format!("expected {m} edges, found {}", edges.len()),
        ));
    }
    let id = id.unwrap_or_else(|| Graph::content_id(n, directed, &edges));
    Graph::new(id, n, directed, edges)
        .map_err(|e| ParseError::new(last, e.to_string()))
}
