//! Line-oriented text format for metagraphs.
//!
//! ```text
//! cogkernel-graph v1
//! # comment
//! N <id> <typeLabel> [tv=<w+>,<w->] [sti=<f>] [lti=<f>]
//! E <id> <typeLabel> (<target-id> ...) [tv=...] [sti=...] [lti=...]
//! ```
//!
//! Ids are unsigned integers assigned by the writer; readers remap them to
//! fresh atom ids and report the mapping. The writer emits atoms in creation
//! order, so every target id precedes its referencing edge.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Atom, AtomId, AtomKind, GraphError, Metagraph};
use crate::logic::EvidenceTv;

const HEADER: &str = "cogkernel-graph v1";

/// Serializes the graph; `deserialize(serialize(g))` reproduces every atom's
/// label, targets, tv and importance values.
pub fn write_graph(g: &Metagraph) -> String {
    let mut ids: BTreeMap<AtomId, u64> = BTreeMap::new();
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for atom in g.atoms() {
        let fid = ids.len() as u64;
        ids.insert(atom.id, fid);
        match atom.kind {
            AtomKind::Node => {
                write!(out, "N {} {}", fid, atom.type_label).unwrap();
            }
            AtomKind::Edge => {
                let targets: Vec<String> = atom
                    .targets
                    .iter()
                    .map(|t| ids[t].to_string())
                    .collect();
                write!(out, "E {} {} ({})", fid, atom.type_label, targets.join(" ")).unwrap();
            }
        }
        if let Some(tv) = &atom.tv {
            write!(out, " tv={},{}", tv.w_plus(), tv.w_minus()).unwrap();
        }
        if atom.sti != 0.0 {
            write!(out, " sti={}", atom.sti).unwrap();
        }
        if atom.lti != 0.0 {
            write!(out, " lti={}", atom.lti).unwrap();
        }
        out.push('\n');
    }
    out
}

/// A deserialized graph plus the mapping from file ids to fresh atom ids.
#[derive(Debug)]
pub struct LoadedGraph {
    pub graph: Metagraph,
    pub id_map: BTreeMap<u64, AtomId>,
}

impl LoadedGraph {
    /// Resolves a file id, as used by CLI flags that name atoms.
    pub fn resolve(&self, file_id: u64) -> Option<AtomId> {
        self.id_map.get(&file_id).copied()
    }
}

/// Parses the text format; errors carry the 1-based offending line.
pub fn read_graph(text: &str) -> Result<LoadedGraph, GraphError> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((i, line)) => {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                break (i, line);
            }
            None => {
                return Err(err(1, "missing header"));
            }
        }
    };
    if header.1 != HEADER {
        return Err(err(header.0 + 1, &format!("expected {HEADER:?}")));
    }

    let mut graph = Metagraph::new();
    let mut id_map: BTreeMap<u64, AtomId> = BTreeMap::new();
    for (i, raw) in lines {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = Tokens::new(line, lineno);
        let kind = match tokens.next()? {
            "N" => AtomKind::Node,
            "E" => AtomKind::Edge,
            other => return Err(err(lineno, &format!("unknown record {other:?}"))),
        };
        let fid: u64 = tokens
            .next()?
            .parse()
            .map_err(|_| err(lineno, "id must be an unsigned integer"))?;
        if id_map.contains_key(&fid) {
            return Err(err(lineno, &format!("duplicate id {fid}")));
        }
        let label = tokens.next()?.to_string();
        let mut targets = Vec::new();
        if kind == AtomKind::Edge {
            for tok in tokens.target_list()? {
                let tid: u64 = tok
                    .parse()
                    .map_err(|_| err(lineno, &format!("malformed target {tok:?}")))?;
                let atom_id = id_map
                    .get(&tid)
                    .copied()
                    .ok_or_else(|| err(lineno, &format!("target {tid} not yet declared")))?;
                targets.push(atom_id);
            }
        }
        let mut tv = None;
        let mut sti = 0.0;
        let mut lti = 0.0;
        while let Some(tok) = tokens.next_opt() {
            if let Some(rest) = tok.strip_prefix("tv=") {
                let (wp, wm) = rest
                    .split_once(',')
                    .ok_or_else(|| err(lineno, "tv must be <w+>,<w->"))?;
                let wp: f64 = wp.parse().map_err(|_| err(lineno, "bad tv component"))?;
                let wm: f64 = wm.parse().map_err(|_| err(lineno, "bad tv component"))?;
                tv = Some(
                    EvidenceTv::new(wp, wm)
                        .map_err(|e| err(lineno, &e.to_string()))?,
                );
            } else if let Some(rest) = tok.strip_prefix("sti=") {
                sti = rest.parse().map_err(|_| err(lineno, "bad sti value"))?;
            } else if let Some(rest) = tok.strip_prefix("lti=") {
                lti = rest.parse().map_err(|_| err(lineno, "bad lti value"))?;
            } else {
                return Err(err(lineno, &format!("unknown annotation {tok:?}")));
            }
        }
        let id = graph
            .add_atom(kind, &label, &targets, tv)
            .map_err(|e| err(lineno, &e.to_string()))?;
        graph.set_importance(id, sti, lti).expect("just added");
        id_map.insert(fid, id);
    }
    Ok(LoadedGraph { graph, id_map })
}

fn err(line: usize, message: &str) -> GraphError {
    GraphError::ParseError { line, message: message.to_string() }
}

struct Tokens<'a> {
    rest: &'a str,
    lineno: usize,
}

impl<'a> Tokens<'a> {
    fn new(line: &'a str, lineno: usize) -> Self {
        Self { rest: line, lineno }
    }

    fn next_opt(&mut self) -> Option<&'a str> {
        self.rest = self.rest.trim_start();
        if self.rest.is_empty() {
            return None;
        }
        let end = self
            .rest
            .find(char::is_whitespace)
            .unwrap_or(self.rest.len());
        let tok = &self.rest[..end];
        self.rest = &self.rest[end..];
        Some(tok)
    }

    fn next(&mut self) -> Result<&'a str, GraphError> {
        self.next_opt()
            .ok_or_else(|| err(self.lineno, "unexpected end of line"))
    }

    /// Consumes a parenthesized, whitespace-separated target list.
    fn target_list(&mut self) -> Result<Vec<&'a str>, GraphError> {
        self.rest = self.rest.trim_start();
        if !self.rest.starts_with('(') {
            return Err(err(self.lineno, "expected ( to open target list"));
        }
        let close = self
            .rest
            .find(')')
            .ok_or_else(|| err(self.lineno, "unclosed target list"))?;
        let inner = &self.rest[1..close];
        self.rest = &self.rest[close + 1..];
        Ok(inner.split_whitespace().collect())
    }
}

/// Compares two graphs structurally under the writer's id remapping: same
/// atom count and, in creation order, identical kind/label/targets/tv/sti/lti.
pub fn structurally_equal(a: &Metagraph, b: &Metagraph) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let index_of = |g: &Metagraph| -> BTreeMap<AtomId, usize> {
        g.atoms().enumerate().map(|(i, atom)| (atom.id, i)).collect()
    };
    let ia = index_of(a);
    let ib = index_of(b);
    a.atoms().zip(b.atoms()).all(|(x, y): (&Atom, &Atom)| {
        x.kind == y.kind
            && x.type_label == y.type_label
            && x.tv == y.tv
            && x.sti == y.sti
            && x.lti == y.lti
            && x.targets.len() == y.targets.len()
            && x.targets
                .iter()
                .zip(y.targets.iter())
                .all(|(tx, ty)| ia[tx] == ib[ty])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metagraph::labels;

    #[test]
    fn empty_graph_round_trips() {
        let g = Metagraph::new();
        let text = write_graph(&g);
        assert_eq!(text.trim(), HEADER);
        let loaded = read_graph(&text).unwrap();
        assert!(loaded.graph.is_empty());
    }

    #[test]
    fn execution_edge_round_trips() {
        let mut g = Metagraph::new();
        let n = g.add_node(labels::CONCEPT).unwrap();
        let e = g
            .add_edge(labels::EXECUTION, &[n], Some(EvidenceTv::new(0.25, 0.5).unwrap()))
            .unwrap();
        g.set_importance(e, 1.5, -0.25).unwrap();
        let text = write_graph(&g);
        let loaded = read_graph(&text).unwrap();
        assert!(structurally_equal(&g, &loaded.graph));
    }

    #[test]
    fn malformed_target_list_is_a_parse_error() {
        let text = format!("{HEADER}\nN 0 Concept\nE 1 Member (0 x)\n");
        match read_graph(&text) {
            Err(GraphError::ParseError { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let text = format!("{HEADER}\nE 0 Member (7)\n");
        assert!(matches!(read_graph(&text), Err(GraphError::ParseError { line: 2, .. })));
    }

    #[test]
    fn header_required() {
        assert!(matches!(
            read_graph("N 0 Concept\n"),
            Err(GraphError::ParseError { line: 1, .. })
        ));
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = format!("# leading comment\n\n{HEADER}\n# mid\nN 0 Concept\n");
        let loaded = read_graph(&text).unwrap();
        assert_eq!(loaded.graph.len(), 1);
        assert_eq!(loaded.resolve(0).is_some(), true);
    }
}
