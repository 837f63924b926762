//! Line-oriented text snapshots of a [`Summary`].
//!
//! ```text
//! MOSSO-SNAPSHOT v1
//! S
//! <supernode_id> <node_id> <node_id> ...
//! P
//! <a> <b>
//! C+
//! <u> <v>
//! C-
//! <u> <v>
//! ```
//!
//! Ids are decimal, fields are separated by whitespace and `#` starts a
//! comment. Output is sorted so identical states give identical bytes.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::SnapshotError;
use crate::summary::Summary;
use crate::types::{NodeId, SupernodeId};

pub const SNAPSHOT_HEADER: &str = "MOSSO-SNAPSHOT v1";

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    Partition,
    Superedges,
    Plus,
    Minus,
}

impl Section {
    fn from_tag(tag: &str) -> Option<Section> {
        match tag {
            "S" => Some(Section::Partition),
            "P" => Some(Section::Superedges),
            "C+" => Some(Section::Plus),
            "C-" => Some(Section::Minus),
            _ => None,
        }
    }
}

impl Summary {
    pub fn save_snapshot<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let (partition, superedges, cplus, cminus) = self.canonical();
        writeln!(out, "{SNAPSHOT_HEADER}")?;
        writeln!(out, "S")?;
        for (s, members) in &partition {
            write!(out, "{s}")?;
            for u in members {
                write!(out, " {u}")?;
            }
            writeln!(out)?;
        }
        writeln!(out, "P")?;
        for (a, b) in &superedges {
            writeln!(out, "{a} {b}")?;
        }
        writeln!(out, "C+")?;
        for (u, v) in &cplus {
            writeln!(out, "{u} {v}")?;
        }
        writeln!(out, "C-")?;
        for (u, v) in &cminus {
            writeln!(out, "{u} {v}")?;
        }
        out.flush()
    }

    pub fn to_snapshot_string(&self) -> String {
        let mut buf = Vec::new();
        self.save_snapshot(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("snapshot is ascii")
    }

    pub fn load_snapshot<R: Read>(input: R) -> Result<Summary, SnapshotError> {
        let reader = BufReader::new(input);
        let mut header_seen = false;
        let mut section: Option<Section> = None;
        let mut visited: Vec<Section> = Vec::new();
        let mut partition: Vec<(SupernodeId, Vec<NodeId>)> = Vec::new();
        let mut superedges = Vec::new();
        let mut cplus = Vec::new();
        let mut cminus = Vec::new();
        let mut last_line = 0;

        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = line?;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| SnapshotError::Parse {
                line: line_no,
                message,
            };
            if !header_seen {
                if content != SNAPSHOT_HEADER {
                    return Err(err(format!("expected header `{SNAPSHOT_HEADER}`")));
                }
                header_seen = true;
                continue;
            }
            if let Some(next) = Section::from_tag(content) {
                let expected = match section {
                    None => Section::Partition,
                    Some(Section::Partition) => Section::Superedges,
                    Some(Section::Superedges) => Section::Plus,
                    Some(Section::Plus) => Section::Minus,
                    Some(Section::Minus) => {
                        return Err(err(format!("unexpected section `{content}` after C-")))
                    }
                };
                if next != expected {
                    return Err(err(format!("section `{content}` out of order")));
                }
                section = Some(next);
                visited.push(next);
                continue;
            }
            let Some(current) = section else {
                return Err(err("data before the first section".into()));
            };
            let mut ids = Vec::new();
            for field in content.split_whitespace() {
                let id: u32 = field
                    .parse()
                    .map_err(|_| err(format!("invalid id `{field}`")))?;
                if id == u32::MAX {
                    return Err(err(format!("id `{field}` out of range")));
                }
                ids.push(id);
            }
            match current {
                Section::Partition => {
                    if ids.len() < 2 {
                        return Err(err("supernode line needs an id and at least one member".into()));
                    }
                    partition.push((
                        SupernodeId(ids[0]),
                        ids[1..].iter().map(|&u| NodeId(u)).collect(),
                    ));
                }
                Section::Superedges | Section::Plus | Section::Minus => {
                    if ids.len() != 2 {
                        return Err(err(format!("expected 2 ids, found {}", ids.len())));
                    }
                    match current {
                        Section::Superedges => {
                            superedges.push((SupernodeId(ids[0]), SupernodeId(ids[1])))
                        }
                        Section::Plus => cplus.push((NodeId(ids[0]), NodeId(ids[1]))),
                        _ => cminus.push((NodeId(ids[0]), NodeId(ids[1]))),
                    }
                }
            }
        }
        if !header_seen {
            return Err(SnapshotError::Parse {
                line: last_line.max(1),
                message: "missing header".into(),
            });
        }
        if visited.len() != 4 {
            return Err(SnapshotError::Parse {
                line: last_line,
                message: "snapshot ends before all sections (S, P, C+, C-) were read".into(),
            });
        }
        Summary::from_parts(&partition, &superedges, &cplus, &cminus)
            .map_err(SnapshotError::Inconsistent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Destination, StreamEvent};

    fn sample() -> Summary {
        let mut s = Summary::new();
        for (a, b) in [(0, 2), (0, 3), (1, 2), (1, 3), (4, 5), (2, 6)] {
            s.process_edge_change(&StreamEvent::insert(a, b)).unwrap();
        }
        let a = s.supernode_of(NodeId(0)).unwrap();
        s.move_node(NodeId(1), Destination::Supernode(a)).unwrap();
        let c = s.supernode_of(NodeId(2)).unwrap();
        s.move_node(NodeId(3), Destination::Supernode(c)).unwrap();
        s.process_edge_change(&StreamEvent::delete(1, 3)).unwrap();
        s
    }

    #[test]
    fn empty_round_trip() {
        let s = Summary::new();
        let text = s.to_snapshot_string();
        assert_eq!(text, "MOSSO-SNAPSHOT v1\nS\nP\nC+\nC-\n");
        assert_eq!(Summary::load_snapshot(text.as_bytes()).unwrap(), s);
    }

    #[test]
    fn round_trip_preserves_structure() {
        let s = sample();
        let text = s.to_snapshot_string();
        let loaded = Summary::load_snapshot(text.as_bytes()).unwrap();
        assert_eq!(loaded, s);
        assert_eq!(loaded.phi(), s.phi());
        assert_eq!(loaded.to_snapshot_string(), text);
        loaded.check_invariants().unwrap();
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# saved\nMOSSO-SNAPSHOT v1\n\nS\n0 0 # node zero\n1 1\nP\nC+\n0 1\nC-\n";
        let s = Summary::load_snapshot(text.as_bytes()).unwrap();
        assert_eq!(s.edge_count(), 1);
        assert_eq!(s.phi(), 1);
    }

    #[test]
    fn malformed_inputs_report_line() {
        let bad_header = "MOSSO v0\n";
        match Summary::load_snapshot(bad_header.as_bytes()) {
            Err(SnapshotError::Parse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let bad_id = "MOSSO-SNAPSHOT v1\nS\n0 x\n";
        match Summary::load_snapshot(bad_id.as_bytes()) {
            Err(SnapshotError::Parse { line: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let bad_arity = "MOSSO-SNAPSHOT v1\nS\n0 0\n1 1\nP\nC+\n0 1 2\nC-\n";
        match Summary::load_snapshot(bad_arity.as_bytes()) {
            Err(SnapshotError::Parse { line: 7, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn suboptimal_encoding_rejected() {
        // superedge over a single missing edge is never optimal
        let text = "MOSSO-SNAPSHOT v1\nS\n0 0\n1 1\nP\n0 1\nC+\nC-\n0 1\n";
        assert!(matches!(
            Summary::load_snapshot(text.as_bytes()),
            Err(SnapshotError::Inconsistent(_))
        ));
    }

    #[test]
    fn truncation_never_panics() {
        let text = sample().to_snapshot_string();
        let mut errors = 0;
        for cut in 0..text.len() {
            if Summary::load_snapshot(&text.as_bytes()[..cut]).is_err() {
                errors += 1;
            }
        }
        // everything short of the final section header is rejected
        let last_section = text.find("C-").unwrap();
        assert!(errors >= last_section);
        assert!(Summary::load_snapshot(&text.as_bytes()[..text.len() / 2]).is_err());
    }
}
