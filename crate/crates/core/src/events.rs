//! Events, hyper-events, and event sequences.
//!
//! An event is a timestamped interaction between nodes. Dyadic directed
//! events are stored as one source and one target; undirected events keep
//! all participants in the source set and leave the target set empty, with
//! directedness recorded once on the sequence.

use std::borrow::Cow;
use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Dense node identifier, interned from arbitrary string labels at ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// One timestamped interaction: a set of source nodes, a set of target
/// nodes (empty for undirected events), a start time, and a duration.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperEvent {
    sources: Vec<NodeId>,
    targets: Vec<NodeId>,
    time: f64,
    duration: f64,
}

impl HyperEvent {
    pub fn new(
        mut sources: Vec<NodeId>,
        mut targets: Vec<NodeId>,
        time: f64,
        duration: f64,
    ) -> Result<Self> {
        sources.sort_unstable();
        sources.dedup();
        targets.sort_unstable();
        targets.dedup();
        if sources.is_empty() {
            return Err(Error::InvalidParameter("event has no source nodes".into()));
        }
        if !time.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite time {time}")));
        }
        if !(duration >= 0.0) || !duration.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "negative or non-finite duration {duration}"
            )));
        }
        Ok(Self { sources, targets, time, duration })
    }

    /// Directed dyadic event u -> v at time `t` with zero duration.
    pub fn dyadic(u: u32, v: u32, t: f64) -> Self {
        Self {
            sources: vec![NodeId(u)],
            targets: vec![NodeId(v)],
            time: t,
            duration: 0.0,
        }
    }

    /// Undirected dyadic contact {a, b} at time `t` with zero duration.
    pub fn contact(a: u32, b: u32, t: f64) -> Self {
        let mut sources = vec![NodeId(a), NodeId(b)];
        sources.sort_unstable();
        sources.dedup();
        Self { sources, targets: Vec::new(), time: t, duration: 0.0 }
    }

    pub fn sources(&self) -> &[NodeId] {
        &self.sources
    }

    pub fn targets(&self) -> &[NodeId] {
        &self.targets
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// End of the active interval [t, t + duration].
    pub fn end_time(&self) -> f64 {
        self.time + self.duration
    }

    pub fn is_dyadic_directed(&self) -> bool {
        self.sources.len() == 1 && self.targets.len() == 1
    }

    /// All participating nodes (sources and targets) in ascending order.
    pub fn participants(&self) -> impl Iterator<Item = NodeId> + '_ {
        MergeSorted { a: &self.sources, b: &self.targets, ia: 0, ib: 0 }
    }

    pub fn participant_count(&self) -> usize {
        self.participants().count()
    }
}

/// Merge two sorted, deduplicated slices without duplicates.
struct MergeSorted<'a> {
    a: &'a [NodeId],
    b: &'a [NodeId],
    ia: usize,
    ib: usize,
}

impl Iterator for MergeSorted<'_> {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        match (self.a.get(self.ia), self.b.get(self.ib)) {
            (Some(&x), Some(&y)) => {
                if x < y {
                    self.ia += 1;
                    Some(x)
                } else if y < x {
                    self.ib += 1;
                    Some(y)
                } else {
                    self.ia += 1;
                    self.ib += 1;
                    Some(x)
                }
            }
            (Some(&x), None) => {
                self.ia += 1;
                Some(x)
            }
            (None, Some(&y)) => {
                self.ib += 1;
                Some(y)
            }
            (None, None) => None,
        }
    }
}

/// Inter-event time: the gap from the end of `a`'s active interval to the
/// start of `b`. Zero whenever `b` does not start strictly after `a` ends;
/// a zero value never produces an event graph edge.
pub fn inter_event_time(a: &HyperEvent, b: &HyperEvent) -> f64 {
    let end = a.time + a.duration;
    if b.time > end {
        b.time - end
    } else {
        0.0
    }
}

/// How to treat a node appearing in two events whose active intervals overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapPolicy {
    Error,
    #[default]
    Warn,
    Ignore,
}

/// A raw event record as parsed from an input file, before interning.
#[derive(Debug, Clone)]
pub struct RawRecord {
    pub sources: Vec<String>,
    pub targets: Vec<String>,
    pub time: f64,
    pub duration: f64,
    /// 1-based input line, for error reporting.
    pub line: usize,
}

/// Time-ordered, index-addressed sequence of hyper-events.
///
/// Immutable after construction; ties in time preserve input order, which
/// fixes the event index. Safe to share across threads.
#[derive(Debug)]
pub struct EventSequence {
    events: Vec<HyperEvent>,
    directed: bool,
    node_count: usize,
    labels: Option<Vec<String>>,
    /// True when ingestion enforced the one-event-at-a-time assumption.
    strict_overlap_check: bool,
    /// Number of overlap violations found (None when the check was skipped).
    overlap_violations: Option<usize>,
}

impl EventSequence {
    /// Ingest raw records: intern labels, sort stably by time, and apply the
    /// overlap policy.
    pub fn ingest(records: Vec<RawRecord>, directed: bool, policy: OverlapPolicy) -> Result<Self> {
        let mut interner = Interner::default();
        let mut events = Vec::with_capacity(records.len());
        for rec in &records {
            if rec.sources.is_empty() {
                return Err(Error::Parse {
                    line: rec.line,
                    msg: "record has no source node".into(),
                });
            }
            if !rec.time.is_finite() {
                return Err(Error::Parse {
                    line: rec.line,
                    msg: format!("non-finite time {}", rec.time),
                });
            }
            if rec.duration < 0.0 || !rec.duration.is_finite() {
                return Err(Error::Parse {
                    line: rec.line,
                    msg: format!("invalid duration {}", rec.duration),
                });
            }
            let mut sources: Vec<NodeId> = rec.sources.iter().map(|s| interner.intern(s)).collect();
            let mut targets: Vec<NodeId> = rec.targets.iter().map(|s| interner.intern(s)).collect();
            if !directed {
                // undirected storage keeps every participant in the source set
                sources.append(&mut targets);
            }
            sources.sort_unstable();
            sources.dedup();
            targets.sort_unstable();
            targets.dedup();
            if directed && intersects(&sources, &targets) {
                return Err(Error::Parse {
                    line: rec.line,
                    msg: "directed event has a node in both source and target sets".into(),
                });
            }
            events.push(HyperEvent { sources, targets, time: rec.time, duration: rec.duration });
        }
        events.sort_by(|a, b| a.time.partial_cmp(&b.time).expect("finite times"));
        let node_count = interner.labels.len();
        let mut seq = Self {
            events,
            directed,
            node_count,
            labels: Some(interner.labels),
            strict_overlap_check: false,
            overlap_violations: None,
        };
        seq.apply_overlap_policy(policy)?;
        Ok(seq)
    }

    /// Assemble a sequence from already-interned events (generators, tests).
    /// Events are sorted stably by time; `node_count` is taken from the
    /// largest participant id.
    pub fn from_events(mut events: Vec<HyperEvent>, directed: bool) -> Result<Self> {
        for e in &events {
            if directed && intersects(&e.sources, &e.targets) {
                return Err(Error::InvalidParameter(
                    "directed event has a node in both source and target sets".into(),
                ));
            }
        }
        events.sort_by(|a, b| a.time.partial_cmp(&b.time).expect("finite times"));
        let node_count = events
            .iter()
            .flat_map(|e| e.participants())
            .map(|n| n.index() + 1)
            .max()
            .unwrap_or(0);
        Ok(Self {
            events,
            directed,
            node_count,
            labels: None,
            strict_overlap_check: false,
            overlap_violations: None,
        })
    }

    pub(crate) fn from_sorted_events(
        events: Vec<HyperEvent>,
        directed: bool,
        labels: Option<Vec<String>>,
    ) -> Self {
        let node_count = match &labels {
            Some(l) => l.len(),
            None => events
                .iter()
                .flat_map(|e| e.participants())
                .map(|n| n.index() + 1)
                .max()
                .unwrap_or(0),
        };
        Self {
            events,
            directed,
            node_count,
            labels,
            strict_overlap_check: false,
            overlap_violations: None,
        }
    }

    fn apply_overlap_policy(&mut self, policy: OverlapPolicy) -> Result<()> {
        if policy == OverlapPolicy::Ignore {
            self.strict_overlap_check = false;
            self.overlap_violations = None;
            return Ok(());
        }
        // last interval end per node; events arrive sorted by start time
        let mut last_end: HashMap<NodeId, f64> = HashMap::new();
        let mut violations = 0usize;
        for e in &self.events {
            for node in e.participants() {
                match last_end.get_mut(&node) {
                    Some(end) => {
                        if e.time <= *end {
                            if policy == OverlapPolicy::Error {
                                return Err(Error::OverlapViolation {
                                    node: self.label(node).into_owned(),
                                    first: *end,
                                    second: e.time,
                                });
                            }
                            violations += 1;
                            log::warn!(
                                "node {} active in overlapping events (t={} within an interval ending {})",
                                self.label(node),
                                e.time,
                                end
                            );
                        }
                        if e.end_time() > *end {
                            *end = e.end_time();
                        }
                    }
                    None => {
                        last_end.insert(node, e.end_time());
                    }
                }
            }
        }
        self.strict_overlap_check = policy == OverlapPolicy::Error;
        self.overlap_violations = Some(violations);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn events(&self) -> &[HyperEvent] {
        &self.events
    }

    pub fn get(&self, index: usize) -> &HyperEvent {
        &self.events[index]
    }

    pub fn strict_overlap_check(&self) -> bool {
        self.strict_overlap_check
    }

    pub fn overlap_violations(&self) -> Option<usize> {
        self.overlap_violations
    }

    /// Node label; synthetic sequences fall back to the numeric id.
    pub fn label(&self, node: NodeId) -> Cow<'_, str> {
        match &self.labels {
            Some(labels) => Cow::Borrowed(labels[node.index()].as_str()),
            None => Cow::Owned(node.0.to_string()),
        }
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        match &self.labels {
            Some(labels) => labels
                .iter()
                .position(|l| l == label)
                .map(|i| NodeId(i as u32)),
            None => label.parse::<u32>().ok().filter(|&i| (i as usize) < self.node_count).map(NodeId),
        }
    }

    /// Span of the observation window: max start time minus min start time.
    pub fn time_span(&self) -> f64 {
        match (self.events.first(), self.events.last()) {
            (Some(a), Some(b)) => b.time - a.time,
            _ => 0.0,
        }
    }

    /// Per-node timelines: for each node, the ascending event indices it
    /// participates in.
    pub fn node_timelines(&self) -> Vec<Vec<usize>> {
        let mut timelines = vec![Vec::new(); self.node_count];
        for (idx, e) in self.events.iter().enumerate() {
            for node in e.participants() {
                timelines[node.index()].push(idx);
            }
        }
        timelines
    }
}

pub(crate) fn intersects(a: &[NodeId], b: &[NodeId]) -> bool {
    let (mut ia, mut ib) = (0, 0);
    while ia < a.len() && ib < b.len() {
        match a[ia].cmp(&b[ib]) {
            std::cmp::Ordering::Less => ia += 1,
            std::cmp::Ordering::Greater => ib += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

#[derive(Default)]
struct Interner {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl Interner {
    fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = NodeId(self.labels.len() as u32);
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }
}

/// Aggregate an undirected sequence of snapshot contacts into hyper-events.
///
/// At each timestamp the connected (not necessarily pairwise-connected) node
/// groups become one hyper-event; a group persisting over consecutive
/// snapshots (`step` apart) becomes a single event with a duration. A new
/// event starts whenever a node enters or leaves the group.
pub fn dyadic_to_hyper(seq: &EventSequence, step: f64) -> Result<EventSequence> {
    if seq.directed() {
        return Err(Error::UnsupportedInput(
            "snapshot aggregation is defined for undirected contact sequences".into(),
        ));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter(format!("snapshot step must be positive, got {step}")));
    }
    if seq.events().iter().any(|e| e.duration != 0.0) {
        return Err(Error::UnsupportedInput(
            "snapshot aggregation expects instantaneous contacts".into(),
        ));
    }

    // groups currently open: node set -> (start time, last snapshot seen)
    let mut open: HashMap<Vec<NodeId>, (f64, f64)> = HashMap::new();
    let mut done: Vec<(Vec<NodeId>, f64, f64)> = Vec::new();

    let mut idx = 0;
    let events = seq.events();
    while idx < events.len() {
        let t = events[idx].time;
        let mut snapshot_nodes: Vec<NodeId> = Vec::new();
        let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
        while idx < events.len() && events[idx].time == t {
            let parts: Vec<NodeId> = events[idx].participants().collect();
            snapshot_nodes.extend_from_slice(&parts);
            for w in parts.windows(2) {
                pairs.push((w[0], w[1]));
            }
            idx += 1;
        }
        snapshot_nodes.sort_unstable();
        snapshot_nodes.dedup();

        // connected groups at this snapshot
        let pos: HashMap<NodeId, usize> =
            snapshot_nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut dsu: Vec<usize> = (0..snapshot_nodes.len()).collect();
        fn find(dsu: &mut [usize], mut x: usize) -> usize {
            while dsu[x] != x {
                dsu[x] = dsu[dsu[x]];
                x = dsu[x];
            }
            x
        }
        for (a, b) in &pairs {
            let (ra, rb) = (find(&mut dsu, pos[a]), find(&mut dsu, pos[b]));
            if ra != rb {
                dsu[ra] = rb;
            }
        }
        let mut groups: HashMap<usize, Vec<NodeId>> = HashMap::new();
        for (i, &n) in snapshot_nodes.iter().enumerate() {
            groups.entry(find(&mut dsu, i)).or_default().push(n);
        }

        let tol = 1e-9 * t.abs().max(1.0);
        for (_, mut members) in groups {
            members.sort_unstable();
            match open.get_mut(&members) {
                Some((_, last)) if (t - *last - step).abs() <= tol => *last = t,
                Some(entry) => {
                    // gap in persistence: close the old run, start a new one
                    done.push((members.clone(), entry.0, entry.1));
                    *entry = (t, t);
                }
                None => {
                    open.insert(members, (t, t));
                }
            }
        }
        // close groups that did not reappear at this snapshot
        let stale: Vec<Vec<NodeId>> = open
            .iter()
            .filter(|(_, (_, last))| *last < t)
            .map(|(k, _)| k.clone())
            .collect();
        for key in stale {
            let (start, last) = open.remove(&key).unwrap();
            done.push((key, start, last));
        }
    }
    for (key, (start, last)) in open {
        done.push((key, start, last));
    }

    done.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    let hyper_events: Vec<HyperEvent> = done
        .into_iter()
        .map(|(members, start, last)| HyperEvent {
            sources: members,
            targets: Vec::new(),
            time: start,
            duration: last - start,
        })
        .collect();
    Ok(EventSequence::from_sorted_events(
        hyper_events,
        false,
        seq.labels.clone(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(sources: &[&str], targets: &[&str], time: f64, line: usize) -> RawRecord {
        RawRecord {
            sources: sources.iter().map(|s| s.to_string()).collect(),
            targets: targets.iter().map(|s| s.to_string()).collect(),
            time,
            duration: 0.0,
            line,
        }
    }

    #[test]
    fn ingest_paper_example() {
        let records = vec![
            rec(&["A"], &["B"], 1.0, 1),
            rec(&["A"], &["D"], 11.0, 2),
            rec(&["E"], &["D"], 21.0, 3),
        ];
        let seq = EventSequence::ingest(records, true, OverlapPolicy::Warn).unwrap();
        assert_eq!(seq.len(), 3);
        assert_eq!(seq.node_count(), 4);
        assert_eq!(seq.label(NodeId(0)), "A");
        assert_eq!(seq.overlap_violations(), Some(0));
    }

    #[test]
    fn ingest_empty() {
        let seq = EventSequence::ingest(Vec::new(), true, OverlapPolicy::Warn).unwrap();
        assert_eq!(seq.len(), 0);
        assert_eq!(seq.node_count(), 0);
    }

    #[test]
    fn ingest_sorts_stably() {
        let records = vec![rec(&["X"], &["Y"], 5.0, 1), rec(&["X"], &["Z"], 2.0, 2)];
        let seq = EventSequence::ingest(records, true, OverlapPolicy::Warn).unwrap();
        assert_eq!(seq.get(0).time(), 2.0);
        assert_eq!(seq.label(seq.get(0).targets()[0]), "Z");
        assert_eq!(seq.get(1).time(), 5.0);
        assert_eq!(seq.label(seq.get(1).targets()[0]), "Y");
    }

    #[test]
    fn ingest_missing_source_fails() {
        let err = EventSequence::ingest(vec![rec(&[], &["B"], 1.0, 7)], true, OverlapPolicy::Warn)
            .unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 7),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn overlap_policy_error_and_warn() {
        // node B appears in two simultaneous contacts
        let records = vec![rec(&["A"], &["B"], 1.0, 1), rec(&["B"], &["C"], 1.0, 2)];
        let err =
            EventSequence::ingest(records.clone(), true, OverlapPolicy::Error).unwrap_err();
        assert!(matches!(err, Error::OverlapViolation { .. }));
        let seq = EventSequence::ingest(records.clone(), true, OverlapPolicy::Warn).unwrap();
        assert_eq!(seq.overlap_violations(), Some(1));
        let seq = EventSequence::ingest(records, true, OverlapPolicy::Ignore).unwrap();
        assert_eq!(seq.overlap_violations(), None);
    }

    #[test]
    fn inter_event_time_cases() {
        let e = |t, d| HyperEvent::new(vec![NodeId(0)], vec![], t, d).unwrap();
        // paper §4.2 gap
        assert_eq!(inter_event_time(&e(1.0, 0.0), &e(11.0, 0.0)), 10.0);
        // simultaneous events
        assert_eq!(inter_event_time(&e(7.0, 0.0), &e(7.0, 0.0)), 0.0);
        // duration branch
        assert_eq!(inter_event_time(&e(0.0, 2.0), &e(5.0, 0.0)), 3.0);
        // second event starts during the first one's duration
        assert_eq!(inter_event_time(&e(0.0, 6.0), &e(5.0, 0.0)), 0.0);
    }

    #[test]
    fn inter_event_time_antisymmetric() {
        let a = HyperEvent::dyadic(0, 1, 3.0);
        let b = HyperEvent::dyadic(1, 2, 9.0);
        assert!(inter_event_time(&a, &b) > 0.0);
        assert_eq!(inter_event_time(&b, &a), 0.0);
    }

    fn contact_seq(contacts: &[(&str, &str, f64)]) -> EventSequence {
        let records = contacts
            .iter()
            .enumerate()
            .map(|(i, (a, b, t))| rec(&[a, b], &[], *t, i + 1))
            .collect();
        EventSequence::ingest(records, false, OverlapPolicy::Ignore).unwrap()
    }

    #[test]
    fn hyper_aggregation_transitive_group() {
        let seq = contact_seq(&[("a", "b", 1.0), ("b", "c", 1.0)]);
        let hyper = dyadic_to_hyper(&seq, 1.0).unwrap();
        assert_eq!(hyper.len(), 1);
        let e = hyper.get(0);
        assert_eq!(e.sources().len(), 3);
        assert_eq!(e.time(), 1.0);
        assert_eq!(e.duration(), 0.0);
    }

    #[test]
    fn hyper_aggregation_persistence() {
        let seq = contact_seq(&[("a", "b", 1.0), ("a", "b", 2.0), ("a", "b", 3.0)]);
        let hyper = dyadic_to_hyper(&seq, 1.0).unwrap();
        assert_eq!(hyper.len(), 1);
        let e = hyper.get(0);
        assert_eq!((e.time(), e.duration()), (1.0, 2.0));
    }

    #[test]
    fn hyper_aggregation_entry_creates_new_event() {
        let seq = contact_seq(&[("a", "b", 1.0), ("a", "b", 2.0), ("b", "c", 2.0)]);
        let hyper = dyadic_to_hyper(&seq, 1.0).unwrap();
        assert_eq!(hyper.len(), 2);
        let first = hyper.get(0);
        assert_eq!((first.time(), first.duration()), (1.0, 0.0));
        assert_eq!(first.sources().len(), 2);
        let second = hyper.get(1);
        assert_eq!((second.time(), second.duration()), (2.0, 0.0));
        assert_eq!(second.sources().len(), 3);
    }

    #[test]
    fn hyper_aggregation_rejects_directed() {
        let records = vec![rec(&["a"], &["b"], 1.0, 1)];
        let seq = EventSequence::ingest(records, true, OverlapPolicy::Ignore).unwrap();
        assert!(matches!(
            dyadic_to_hyper(&seq, 1.0),
            Err(Error::UnsupportedInput(_))
        ));
    }
}
