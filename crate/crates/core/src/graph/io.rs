use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

/// Reads a tab- or whitespace-separated edge list. Blank lines and lines
/// starting with `#` or `%` are skipped; self-loops and repeated edges are
/// dropped. Labels are numbered in order of first appearance.
pub fn load_edgelist(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_edgelist(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::Io {
            path: path.to_owned(),
            source,
        },
        other => other,
    })
}

pub fn parse_edgelist<R: BufRead>(reader: R) -> Result<Graph> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut intern = |label: &str, labels: &mut Vec<String>| -> usize {
        if let Some(&id) = index.get(label) {
            return id;
        }
        let id = labels.len();
        labels.push(label.to_owned());
        index.insert(label.to_owned(), id);
        id
    };

    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: Default::default(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected 2 node labels, found {}", tokens.len()),
            });
        }
        let u = intern(tokens[0], &mut labels);
        let v = intern(tokens[1], &mut labels);
        edges.push((u, v));
    }
    Graph::from_labelled_edges(labels, edges)
}

/// Writes every edge once as `label_u<TAB>label_v`, in internal id order.
pub fn write_edgelist<W: Write>(graph: &Graph, mut out: W) -> std::io::Result<()> {
    for (u, v) in graph.edges() {
        writeln!(out, "{}\t{}", graph.label(u), graph.label(v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedup_and_self_loop_removal() {
        let g = parse_edgelist("1\t2\n2\t3\n2\t3\n3\t3\n".as_bytes()).unwrap();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.num_edges(), 2);
        let a = g.node_id("1").unwrap();
        let b = g.node_id("2").unwrap();
        let c = g.node_id("3").unwrap();
        assert!(g.has_edge(a, b));
        assert!(g.has_edge(b, c));
        assert!(!g.has_edge(a, c));
    }

    #[test]
    fn empty_input_gives_empty_graph() {
        let g = parse_edgelist("".as_bytes()).unwrap();
        assert_eq!(g.num_nodes(), 0);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn triangle_on_string_labels() {
        let g = parse_edgelist("a\tb\nb c\n# comment\n\nc\ta\n".as_bytes()).unwrap();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.num_edges(), 3);
        assert!((0..3).all(|v| g.degree(v) == 2));
        assert_eq!(g.labels(), &["a", "b", "c"]);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_edgelist("1\t2\n3\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_edgelist("1 2 3\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_edgelist("/nonexistent/definitely/missing.tsv"),
            Err(Error::Io { .. })
        ));
    }
}
