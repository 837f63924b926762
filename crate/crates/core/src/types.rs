use std::fmt;

/// A vertex of the input graph. Ids are dense small integers; the node set
/// only grows over a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identifier of a live supernode. Ids of deleted supernodes are recycled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SupernodeId(pub u32);

impl SupernodeId {
    pub(crate) const NONE: SupernodeId = SupernodeId(u32::MAX);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SupernodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Target of a node relocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Destination {
    Supernode(SupernodeId),
    /// A fresh singleton supernode holding only the moved node.
    NewSingleton,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    Insert,
    Delete,
}

/// One change of a fully dynamic graph stream. Endpoints are stored
/// canonically with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamEvent {
    pub kind: EventKind,
    pub u: NodeId,
    pub v: NodeId,
    pub timestamp: Option<i64>,
}

impl StreamEvent {
    pub fn insert(a: u32, b: u32) -> Self {
        Self::new(EventKind::Insert, NodeId(a), NodeId(b))
    }

    pub fn delete(a: u32, b: u32) -> Self {
        Self::new(EventKind::Delete, NodeId(a), NodeId(b))
    }

    /// Builds an event with canonical endpoint order. Self-loops are a
    /// caller bug; they are rejected when the event is applied.
    pub fn new(kind: EventKind, a: NodeId, b: NodeId) -> Self {
        let (u, v) = if a <= b { (a, b) } else { (b, a) };
        StreamEvent {
            kind,
            u,
            v,
            timestamp: None,
        }
    }

    pub fn with_timestamp(mut self, ts: i64) -> Self {
        self.timestamp = Some(ts);
        self
    }

    pub fn edge(&self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }
}

impl fmt::Display for StreamEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.kind {
            EventKind::Insert => '+',
            EventKind::Delete => '-',
        };
        write!(f, "{} {} {}", sign, self.u, self.v)
    }
}

/// Canonical unordered pair key `(min, max)`.
#[inline]
pub fn ordered<T: Ord>(a: T, b: T) -> (T, T) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
