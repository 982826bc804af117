//! Tab-separated edge lists: one `user<TAB>object` pair per line.
//!
//! Lines starting with `#` are comments. Blank lines are skipped. A repeated
//! pair is dropped (the first occurrence wins) and counted in the report.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use massdiff_core::{BipartiteGraph, EdgeRecord, IsolatedPolicy};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub lines: usize,
    pub comments: usize,
    pub dups: usize,
}

#[derive(Debug)]
pub enum ParseError {
    Io(io::Error),
    /// Line `line` (1-based) is not valid UTF-8.
    Encoding {
        line: usize,
    },
    /// Line `line` has `fields` tab-separated fields instead of 2.
    FieldCount {
        line: usize,
        fields: usize,
    },
    EmptyToken {
        line: usize,
    },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Io(e) => write!(f, "read error: {e}"),
            ParseError::Encoding { line } => write!(f, "line {line}: not valid UTF-8"),
            ParseError::FieldCount { line, fields } => write!(
                f,
                "line {line}: expected `user<TAB>object`, found {fields} field{}",
                if *fields == 1 { "" } else { "s" }
            ),
            ParseError::EmptyToken { line } => write!(f, "line {line}: empty user or object token"),
        }
    }
}

impl std::error::Error for ParseError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ParseError::Io(e) => Some(e),
            _ => None,
        }
    }
}

/// Reads every record in file order, without duplicates.
pub fn parse_edge_list<R: BufRead>(
    mut reader: R,
) -> Result<(Vec<EdgeRecord>, IngestReport), ParseError> {
    let mut report = IngestReport::default();
    let mut records = Vec::new();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf).map_err(ParseError::Io)? == 0 {
            break;
        }
        report.lines += 1;
        let line_no = report.lines;
        let text = std::str::from_utf8(&buf).map_err(|_| ParseError::Encoding { line: line_no })?;
        let text = text.strip_suffix('\n').unwrap_or(text);
        let text = text.strip_suffix('\r').unwrap_or(text);
        if text.starts_with('#') {
            report.comments += 1;
            continue;
        }
        if text.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 2 {
            return Err(ParseError::FieldCount {
                line: line_no,
                fields: fields.len(),
            });
        }
        let record = EdgeRecord::new(fields[0], fields[1])
            .map_err(|_| ParseError::EmptyToken { line: line_no })?;
        if seen.insert((record.user.clone(), record.object.clone())) {
            records.push(record);
        } else {
            report.dups += 1;
        }
    }
    Ok((records, report))
}

pub fn read_edge_list(path: &Path) -> Result<(Vec<EdgeRecord>, IngestReport), ParseError> {
    let file = File::open(path).map_err(ParseError::Io)?;
    parse_edge_list(BufReader::new(file))
}

/// A parsed file together with the graph built from it.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub records: Vec<EdgeRecord>,
    pub report: IngestReport,
    pub graph: BipartiteGraph,
}

#[derive(Debug)]
pub enum LoadError {
    Parse(ParseError),
    Graph(massdiff_core::Error),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Parse(e) => e.fmt(f),
            LoadError::Graph(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for LoadError {}

pub fn load_graph(path: &Path, policy: IsolatedPolicy) -> Result<LoadedGraph, LoadError> {
    let (records, report) = read_edge_list(path).map_err(LoadError::Parse)?;
    let graph = massdiff_core::graph::build_graph(&records, policy).map_err(LoadError::Graph)?;
    Ok(LoadedGraph {
        records,
        report,
        graph,
    })
}
