//! Edge-list loading, stream synthesis and the `+ u v` stream format.

use std::collections::hash_map::Entry;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::StreamError;
use crate::types::{ordered, EventKind, NodeId, StreamEvent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRecord {
    pub u: NodeId,
    pub v: NodeId,
    pub timestamp: Option<i64>,
}

/// A loaded graph: canonical edges over dense ids, plus the original label
/// of every dense id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeList {
    pub edges: Vec<EdgeRecord>,
    pub original_ids: Vec<String>,
}

impl EdgeList {
    /// Writes `dense original` lines.
    pub fn write_id_map<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, label) in self.original_ids.iter().enumerate() {
            writeln!(out, "{i} {label}")?;
        }
        out.flush()
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> StreamError {
    StreamError::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Reads whitespace-separated `u v [timestamp]` lines. Directions, self
/// loops and repeated edges are dropped; the first occurrence of an edge
/// keeps its timestamp. Node labels are re-indexed densely in order of
/// first appearance.
pub fn load_edge_list(path: &Path) -> Result<EdgeList, StreamError> {
    read_edge_list(File::open(path)?, path)
}

pub fn read_edge_list<R: Read>(input: R, path: &Path) -> Result<EdgeList, StreamError> {
    let mut ids: FxHashMap<String, NodeId> = FxHashMap::default();
    let mut list = EdgeList::default();
    let mut seen = FxHashSet::default();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(path, i + 1, "expected `u v [timestamp]`"));
        }
        let timestamp = match fields.get(2) {
            Some(t) => Some(
                t.parse::<i64>()
                    .map_err(|_| parse_err(path, i + 1, format!("bad timestamp `{t}`")))?,
            ),
            None => None,
        };
        let mut dense = |label: &str| -> Result<NodeId, StreamError> {
            let next = list.original_ids.len();
            match ids.entry(label.to_string()) {
                Entry::Occupied(e) => Ok(*e.get()),
                Entry::Vacant(e) => {
                    let id = u32::try_from(next)
                        .map_err(|_| parse_err(path, i + 1, "too many nodes"))?;
                    list.original_ids.push(label.to_string());
                    Ok(*e.insert(NodeId(id)))
                }
            }
        };
        let (a, b) = (dense(fields[0])?, dense(fields[1])?);
        if a == b {
            continue;
        }
        let (u, v) = ordered(a, b);
        if seen.insert((u, v)) {
            list.edges.push(EdgeRecord { u, v, timestamp });
        }
    }
    Ok(list)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ordering {
    Timestamp,
    Random,
}

/// One insertion per edge, by timestamp when every edge has one (ties keep
/// file order), otherwise in a seeded random order.
pub fn make_insertion_stream(edges: &[EdgeRecord], ordering: Ordering, seed: u64) -> Vec<StreamEvent> {
    let mut order: Vec<EdgeRecord> = edges.to_vec();
    if ordering == Ordering::Timestamp && edges.iter().all(|e| e.timestamp.is_some()) {
        order.sort_by_key(|e| e.timestamp);
    } else {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    order.into_iter().map(insertion).collect()
}

fn insertion(e: EdgeRecord) -> StreamEvent {
    let ev = StreamEvent::new(EventKind::Insert, e.u, e.v);
    match e.timestamp {
        Some(t) => ev.with_timestamp(t),
        None => ev,
    }
}

/// Random insertion order; each edge is then deleted with probability
/// `deletion_prob` at a uniformly random point strictly after its insertion.
pub fn make_fully_dynamic_stream(
    edges: &[EdgeRecord],
    deletion_prob: f64,
    seed: u64,
) -> Result<Vec<StreamEvent>, StreamError> {
    if !(0.0..=1.0).contains(&deletion_prob) {
        return Err(StreamError::InvalidArgument(format!(
            "deletion probability {deletion_prob} not in [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<EdgeRecord> = edges.to_vec();
    order.shuffle(&mut rng);
    let n = order.len() as f64;
    // insertion i sits at key i; a deletion lands in (i, n]
    let mut keyed: Vec<(f64, StreamEvent)> = Vec::with_capacity(order.len() * 2);
    for (i, e) in order.into_iter().enumerate() {
        keyed.push((i as f64, insertion(e)));
        if rng.gen::<f64>() < deletion_prob {
            let at = i as f64 + (1.0 - rng.gen::<f64>()) * (n - i as f64);
            keyed.push((at, StreamEvent::new(EventKind::Delete, e.u, e.v)));
        }
    }
    keyed.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| (a.1.kind == EventKind::Delete).cmp(&(b.1.kind == EventKind::Delete)))
    });
    Ok(keyed.into_iter().map(|(_, e)| e).collect())
}

/// Copying-model graph on `n_nodes` nodes with at most `n_edges` edges.
/// Node `t` picks a uniform prototype among `0..t` and adds
/// `ceil(n_edges / n_nodes)` links; each link copies a uniform out-link of
/// the prototype with probability `copy_prob` (when it has one) and
/// otherwise points to a uniform node in `0..t`. Output is undirected,
/// without self-loops or duplicates, in creation order; each edge is
/// timestamped with the step `t` that created it.
pub fn generate_copying_model(
    n_nodes: usize,
    n_edges: usize,
    copy_prob: f64,
    seed: u64,
) -> Result<Vec<EdgeRecord>, StreamError> {
    if n_nodes < 2 {
        return Err(StreamError::InvalidArgument(format!(
            "copying model needs at least 2 nodes, got {n_nodes}"
        )));
    }
    if !(0.0..=1.0).contains(&copy_prob) {
        return Err(StreamError::InvalidArgument(format!(
            "copy probability {copy_prob} not in [0, 1]"
        )));
    }
    let out_degree = n_edges.div_ceil(n_nodes);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out_links: Vec<Vec<u32>> = vec![Vec::new(); n_nodes];
    let mut seen = FxHashSet::default();
    let mut edges = Vec::with_capacity(n_edges);
    'grow: for t in 1..n_nodes {
        let proto = rng.gen_range(0..t);
        for _ in 0..out_degree {
            if edges.len() >= n_edges {
                break 'grow;
            }
            let links = &out_links[proto];
            let copy = rng.gen::<f64>() < copy_prob;
            let target = if copy && !links.is_empty() {
                links[rng.gen_range(0..links.len())]
            } else {
                rng.gen_range(0..t) as u32
            };
            let (u, v) = ordered(NodeId(target), NodeId(t as u32));
            if seen.insert((u, v)) {
                out_links[t].push(target);
                edges.push(EdgeRecord {
                    u,
                    v,
                    timestamp: Some(t as i64),
                });
            }
        }
    }
    Ok(edges)
}

/// First event that inserts a live edge, deletes a dead one, or is a
/// self-loop.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unsound stream at event {index} ({event}): {reason}")]
pub struct SoundnessViolation {
    pub index: usize,
    pub event: StreamEvent,
    pub reason: &'static str,
}

pub fn validate_soundness(events: &[StreamEvent]) -> Result<(), SoundnessViolation> {
    let mut live = FxHashSet::default();
    for (index, &event) in events.iter().enumerate() {
        let fail = |reason| SoundnessViolation { index, event, reason };
        if event.u == event.v {
            return Err(fail("self-loop"));
        }
        let ok = match event.kind {
            EventKind::Insert => live.insert(event.edge()),
            EventKind::Delete => live.remove(&event.edge()),
        };
        if !ok {
            return Err(fail(match event.kind {
                EventKind::Insert => "edge already present",
                EventKind::Delete => "edge not present",
            }));
        }
    }
    Ok(())
}

/// Writes one `+ u v [timestamp]` / `- u v` line per event.
pub fn write_stream<W: Write>(events: &[StreamEvent], mut out: W) -> std::io::Result<()> {
    for e in events {
        match e.timestamp {
            Some(t) => writeln!(out, "{e} {t}")?,
            None => writeln!(out, "{e}")?,
        }
    }
    out.flush()
}

pub fn load_stream(path: &Path) -> Result<Vec<StreamEvent>, StreamError> {
    read_stream(File::open(path)?, path)
}

pub fn read_stream<R: Read>(input: R, path: &Path) -> Result<Vec<StreamEvent>, StreamError> {
    let mut events = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(parse_err(path, i + 1, "expected `+|- u v [timestamp]`"));
        }
        let kind = match fields[0] {
            "+" => EventKind::Insert,
            "-" => EventKind::Delete,
            s => return Err(parse_err(path, i + 1, format!("bad sign `{s}`"))),
        };
        let node = |s: &str| {
            s.parse::<u32>()
                .map(NodeId)
                .map_err(|_| parse_err(path, i + 1, format!("bad node id `{s}`")))
        };
        let (a, b) = (node(fields[1])?, node(fields[2])?);
        if a == b {
            return Err(parse_err(path, i + 1, "self-loop"));
        }
        let mut ev = StreamEvent::new(kind, a, b);
        if let Some(t) = fields.get(3) {
            let t = t
                .parse::<i64>()
                .map_err(|_| parse_err(path, i + 1, format!("bad timestamp `{t}`")))?;
            ev = ev.with_timestamp(t);
        }
        events.push(ev);
    }
    Ok(events)
}

#[derive(Clone, Debug, PartialEq)]
pub enum StreamSource {
    EdgeList(PathBuf),
    StreamFile(PathBuf),
    CopyingModel {
        n_nodes: usize,
        n_edges: usize,
        copy_prob: f64,
    },
}

/// Where a stream comes from and how it is turned into events.
#[derive(Clone, Debug, PartialEq)]
pub struct StreamSpec {
    pub source: StreamSource,
    pub ordering: Ordering,
    /// 0 gives an insertion-only stream.
    pub deletion_prob: f64,
    pub seed: u64,
}

impl StreamSpec {
    pub fn new(source: StreamSource) -> Self {
        StreamSpec {
            source,
            ordering: Ordering::Random,
            deletion_prob: 0.1,
            seed: 0,
        }
    }

    pub fn build(&self) -> Result<Vec<StreamEvent>, StreamError> {
        let edges = match &self.source {
            StreamSource::StreamFile(path) => {
                let events = load_stream(path)?;
                validate_soundness(&events)
                    .map_err(|v| parse_err(path, 0, v.to_string()))?;
                return Ok(events);
            }
            StreamSource::EdgeList(path) => load_edge_list(path)?.edges,
            &StreamSource::CopyingModel {
                n_nodes,
                n_edges,
                copy_prob,
            } => generate_copying_model(n_nodes, n_edges, copy_prob, self.seed)?,
        };
        if self.deletion_prob == 0.0 {
            Ok(make_insertion_stream(&edges, self.ordering, self.seed))
        } else {
            make_fully_dynamic_stream(&edges, self.deletion_prob, self.seed)
        }
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ordering::Timestamp => "timestamp",
            Ordering::Random => "random",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<EdgeList, StreamError> {
        read_edge_list(text.as_bytes(), Path::new("mem"))
    }

    #[test]
    fn directions_loops_and_duplicates_dropped() {
        let list = parse("1 2\n2 1\n3 3\n").unwrap();
        assert_eq!(list.edges.len(), 1);
        assert_eq!(list.original_ids, vec!["1", "2", "3"]);
        assert_eq!((list.edges[0].u, list.edges[0].v), (NodeId(0), NodeId(1)));
    }

    #[test]
    fn empty_and_comment_only_files() {
        assert!(parse("").unwrap().edges.is_empty());
        assert!(parse("# nothing\n\n").unwrap().edges.is_empty());
    }

    #[test]
    fn timestamps_kept() {
        let list = parse("a b 30\nb c 10 # late\n").unwrap();
        assert_eq!(list.edges[0].timestamp, Some(30));
        assert_eq!(list.edges[1].timestamp, Some(10));
        let s = make_insertion_stream(&list.edges, Ordering::Timestamp, 0);
        assert_eq!(s[0].timestamp, Some(10));
    }

    #[test]
    fn bad_line_reports_number() {
        match parse("1 2\n1 2 x\n") {
            Err(StreamError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("1\n"), Err(StreamError::Parse { line: 1, .. })));
    }

    #[test]
    fn id_map_lines() {
        let list = parse("x y\n").unwrap();
        let mut buf = Vec::new();
        list.write_id_map(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 x\n1 y\n");
    }

    #[test]
    fn soundness_rules() {
        let ins = StreamEvent::insert(0, 1);
        let del = StreamEvent::delete(0, 1);
        assert_eq!(validate_soundness(&[ins, ins]).unwrap_err().index, 1);
        validate_soundness(&[ins, del, ins]).unwrap();
        assert_eq!(validate_soundness(&[del]).unwrap_err().index, 0);
    }

    #[test]
    fn stream_format_round_trip() {
        let events = vec![
            StreamEvent::insert(3, 1).with_timestamp(-4),
            StreamEvent::delete(1, 3),
        ];
        let mut buf = Vec::new();
        write_stream(&events, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "+ 1 3 -4\n- 1 3\n");
        assert_eq!(read_stream(buf.as_slice(), Path::new("mem")).unwrap(), events);
        assert!(read_stream("* 1 2\n".as_bytes(), Path::new("mem")).is_err());
        assert!(read_stream("+ 2 2\n".as_bytes(), Path::new("mem")).is_err());
    }

    #[test]
    fn copying_model_needs_two_nodes() {
        assert!(generate_copying_model(1, 5, 0.5, 0).is_err());
        let g = generate_copying_model(2, 5, 0.5, 0).unwrap();
        assert_eq!(g.len(), 1);
    }
}
