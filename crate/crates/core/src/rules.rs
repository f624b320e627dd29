//! Joining rules: binary predicates over ordered event pairs that prescribe
//! the edges of the event graph.
//!
//! Three context-free rule kinds ship, each usable for dyadic and
//! hyper-events:
//!
//! - adjacency: the events share at least one node and 0 < τ ≤ Δt;
//! - walk-forming: a target of the first event is a source of the second
//!   (for undirected events this coincides with adjacency);
//! - minimum-gap non-backtracking: Δt₁ < τ ≤ Δt₂, walk-forming, and no
//!   source of the first event is a target of the second. For hyper-events
//!   the backtracking exclusion is the natural set analogue; it cannot see
//!   events that enable backtracking and non-backtracking walks at once.
//!
//! Adjacency additionally supports *subsequent* restrictions (link only the
//! earliest later event, overall or per participating node). Those need the
//! event set and are resolved by the graph builder; [`JoiningRule::joins`]
//! evaluates the context-free predicate only.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::events::{inter_event_time, intersects, HyperEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Adjacency,
    WalkForming,
    MinGapNonBacktracking,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubsequentMode {
    #[default]
    None,
    PerEvent,
    PerNode,
}

/// A named joining rule with its parameters. Immutable value object; the
/// predicate methods are pure and safe to call concurrently.
#[derive(Debug, Clone, PartialEq)]
pub struct JoiningRule {
    kind: RuleKind,
    /// Upper IET bound Δt (Δt₂ for the minimum-gap rule); may be infinite.
    dt: f64,
    /// Lower IET bound Δt₁; only meaningful for the minimum-gap rule.
    dt_min: f64,
    subsequent: SubsequentMode,
}

impl JoiningRule {
    pub fn adjacency(dt: f64) -> Result<Self> {
        Self::validated(RuleKind::Adjacency, dt, 0.0, SubsequentMode::None)
    }

    pub fn adjacency_subsequent(dt: f64, mode: SubsequentMode) -> Result<Self> {
        Self::validated(RuleKind::Adjacency, dt, 0.0, mode)
    }

    pub fn walk_forming(dt: f64) -> Result<Self> {
        Self::validated(RuleKind::WalkForming, dt, 0.0, SubsequentMode::None)
    }

    pub fn min_gap_non_backtracking(dt_min: f64, dt: f64) -> Result<Self> {
        Self::validated(RuleKind::MinGapNonBacktracking, dt, dt_min, SubsequentMode::None)
    }

    fn validated(kind: RuleKind, dt: f64, dt_min: f64, subsequent: SubsequentMode) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidRule(format!("dt must be positive, got {dt}")));
        }
        if kind == RuleKind::MinGapNonBacktracking {
            if !(dt_min >= 0.0) || !dt_min.is_finite() {
                return Err(Error::InvalidRule(format!("dt1 must be non-negative, got {dt_min}")));
            }
            if !(dt_min < dt) {
                return Err(Error::InvalidRule(format!("dt1 ({dt_min}) must be below dt2 ({dt})")));
            }
        }
        if subsequent != SubsequentMode::None && kind != RuleKind::Adjacency {
            return Err(Error::InvalidRule(
                "subsequent restrictions only apply to the adjacency rule".into(),
            ));
        }
        Ok(Self { kind, dt, dt_min, subsequent })
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dt_min(&self) -> f64 {
        self.dt_min
    }

    pub fn subsequent(&self) -> SubsequentMode {
        self.subsequent
    }

    /// Context-free joining predicate for an ordered event pair.
    ///
    /// Subsequent restrictions are not evaluated here; for a rule carrying
    /// one this is the predicate of the underlying adjacency rule.
    pub fn joins(&self, a: &HyperEvent, b: &HyperEvent, directed: bool) -> bool {
        let tau = inter_event_time(a, b);
        if !(tau > self.lower_bound() && tau <= self.dt) {
            return false;
        }
        self.node_condition(a, b, directed)
    }

    /// IET-weighted joining function: τ when the pair joins, else zero.
    pub fn weight(&self, a: &HyperEvent, b: &HyperEvent, directed: bool) -> f64 {
        if self.joins(a, b, directed) {
            inter_event_time(a, b)
        } else {
            0.0
        }
    }

    fn lower_bound(&self) -> f64 {
        if self.kind == RuleKind::MinGapNonBacktracking {
            self.dt_min
        } else {
            0.0
        }
    }

    fn node_condition(&self, a: &HyperEvent, b: &HyperEvent, directed: bool) -> bool {
        if !directed {
            // undirected events keep all participants in the source set and
            // every adjacent pair is walk-forming
            let shared = intersects(a.sources(), b.sources());
            return match self.kind {
                RuleKind::Adjacency | RuleKind::WalkForming => shared,
                // the backtracking exclusion has no direction to act on
                RuleKind::MinGapNonBacktracking => shared,
            };
        }
        match self.kind {
            RuleKind::Adjacency => {
                intersects(a.sources(), b.sources())
                    || intersects(a.sources(), b.targets())
                    || intersects(a.targets(), b.sources())
                    || intersects(a.targets(), b.targets())
            }
            RuleKind::WalkForming => intersects(a.targets(), b.sources()),
            RuleKind::MinGapNonBacktracking => {
                intersects(a.targets(), b.sources()) && !intersects(a.sources(), b.targets())
            }
        }
    }
}

impl fmt::Display for JoiningRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn num(v: f64) -> String {
            if v.is_infinite() {
                "inf".to_string()
            } else {
                format!("{v}")
            }
        }
        match self.kind {
            RuleKind::Adjacency => {
                write!(f, "adjacency dt={}", num(self.dt))?;
                match self.subsequent {
                    SubsequentMode::None => Ok(()),
                    SubsequentMode::PerEvent => write!(f, " subsequent=event"),
                    SubsequentMode::PerNode => write!(f, " subsequent=node"),
                }
            }
            RuleKind::WalkForming => write!(f, "walk dt={}", num(self.dt)),
            RuleKind::MinGapNonBacktracking => {
                write!(f, "mingap dt1={} dt2={}", num(self.dt_min), num(self.dt))
            }
        }
    }
}

impl FromStr for JoiningRule {
    type Err = Error;

    /// Parse rule specs like `adjacency dt=20 subsequent=node`,
    /// `walk dt=inf`, or `mingap dt1=5 dt2=15`.
    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace();
        let name = tokens
            .next()
            .ok_or_else(|| Error::InvalidRule("empty rule spec".into()))?;
        let mut dt: Option<f64> = None;
        let mut dt1: Option<f64> = None;
        let mut dt2: Option<f64> = None;
        let mut subsequent = SubsequentMode::None;
        for tok in tokens {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| Error::InvalidRule(format!("expected key=value, got `{tok}`")))?;
            match key {
                "dt" => dt = Some(parse_bound(value)?),
                "dt1" => dt1 = Some(parse_bound(value)?),
                "dt2" => dt2 = Some(parse_bound(value)?),
                "subsequent" => {
                    subsequent = match value {
                        "none" => SubsequentMode::None,
                        "event" => SubsequentMode::PerEvent,
                        "node" => SubsequentMode::PerNode,
                        other => {
                            return Err(Error::InvalidRule(format!(
                                "unknown subsequent mode `{other}` (expected event or node)"
                            )))
                        }
                    }
                }
                other => return Err(Error::InvalidRule(format!("unknown rule parameter `{other}`"))),
            }
        }
        match name {
            "adjacency" => Self::validated(
                RuleKind::Adjacency,
                dt.unwrap_or(f64::INFINITY),
                0.0,
                subsequent,
            ),
            "walk" | "walk-forming" => {
                if subsequent != SubsequentMode::None {
                    return Err(Error::InvalidRule(
                        "subsequent restrictions only apply to the adjacency rule".into(),
                    ));
                }
                Self::validated(RuleKind::WalkForming, dt.unwrap_or(f64::INFINITY), 0.0, subsequent)
            }
            "mingap" => {
                if subsequent != SubsequentMode::None {
                    return Err(Error::InvalidRule(
                        "subsequent restrictions only apply to the adjacency rule".into(),
                    ));
                }
                let dt1 = dt1.ok_or_else(|| Error::InvalidRule("mingap requires dt1".into()))?;
                let dt2 = dt2
                    .or(dt)
                    .ok_or_else(|| Error::InvalidRule("mingap requires dt2".into()))?;
                Self::validated(RuleKind::MinGapNonBacktracking, dt2, dt1, subsequent)
            }
            other => Err(Error::InvalidRule(format!(
                "unknown rule `{other}` (expected adjacency, walk, or mingap)"
            ))),
        }
    }
}

fn parse_bound(value: &str) -> Result<f64> {
    if value.eq_ignore_ascii_case("inf") || value.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    value
        .parse::<f64>()
        .map_err(|_| Error::InvalidRule(format!("cannot parse bound `{value}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyadic(u: u32, v: u32, t: f64) -> HyperEvent {
        HyperEvent::dyadic(u, v, t)
    }

    #[test]
    fn adjacency_examples() {
        let rule = JoiningRule::adjacency(10.0).unwrap();
        // (A,B,1) and (A,D,11): shared node, tau exactly at the bound
        let a = dyadic(0, 1, 1.0);
        let b = dyadic(0, 3, 11.0);
        assert!(rule.joins(&a, &b, true));
        assert_eq!(rule.weight(&a, &b, true), 10.0);
        // disjoint node sets never join
        let c = dyadic(2, 3, 5.0);
        let d = dyadic(4, 5, 6.0);
        assert!(!rule.joins(&c, &d, true));
        assert_eq!(rule.weight(&c, &d, true), 0.0);
    }

    #[test]
    fn min_gap_clauses() {
        let rule = JoiningRule::min_gap_non_backtracking(5.0, 15.0).unwrap();
        let ab = dyadic(0, 1, 0.0);
        // backtracking pair
        assert!(!rule.joins(&ab, &dyadic(1, 0, 10.0), true));
        // walk-forming, inside the gap window
        assert!(rule.joins(&ab, &dyadic(1, 2, 10.0), true));
        // below the minimum gap
        assert!(!rule.joins(&ab, &dyadic(1, 2, 3.0), true));
    }

    #[test]
    fn infinite_dt_weight() {
        let rule = JoiningRule::adjacency(f64::INFINITY).unwrap();
        let a = dyadic(0, 1, 0.0);
        let b = dyadic(1, 2, 42.0);
        assert_eq!(rule.weight(&a, &b, true), 42.0);
    }

    #[test]
    fn joins_implies_positive_tau() {
        let rule = JoiningRule::adjacency(10.0).unwrap();
        let a = dyadic(0, 1, 5.0);
        let b = dyadic(1, 2, 5.0);
        assert!(!rule.joins(&a, &b, true));
        assert!(!rule.joins(&b, &a, true));
    }

    #[test]
    fn walk_forming_requires_target_source_link() {
        let rule = JoiningRule::walk_forming(f64::INFINITY).unwrap();
        let ab = dyadic(0, 1, 0.0);
        assert!(rule.joins(&ab, &dyadic(1, 2, 1.0), true));
        // shares a node but not target-to-source
        assert!(!rule.joins(&ab, &dyadic(0, 2, 1.0), true));
        assert!(!rule.joins(&ab, &dyadic(2, 1, 1.0), true));
    }

    #[test]
    fn undirected_walk_forming_equals_adjacency() {
        let walk = JoiningRule::walk_forming(f64::INFINITY).unwrap();
        let adj = JoiningRule::adjacency(f64::INFINITY).unwrap();
        let a = HyperEvent::contact(0, 1, 0.0);
        let b = HyperEvent::contact(1, 2, 4.0);
        let c = HyperEvent::contact(2, 3, 5.0);
        assert_eq!(walk.joins(&a, &b, false), adj.joins(&a, &b, false));
        assert_eq!(walk.joins(&a, &c, false), adj.joins(&a, &c, false));
    }

    #[test]
    fn invalid_rules_rejected() {
        assert!(JoiningRule::adjacency(0.0).is_err());
        assert!(JoiningRule::min_gap_non_backtracking(15.0, 5.0).is_err());
        assert!(JoiningRule::min_gap_non_backtracking(5.0, 5.0).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for spec in [
            "adjacency dt=20 subsequent=node",
            "adjacency dt=inf",
            "adjacency dt=10 subsequent=event",
            "walk dt=inf",
            "mingap dt1=5 dt2=15",
        ] {
            let rule: JoiningRule = spec.parse().unwrap();
            let printed = rule.to_string();
            let reparsed: JoiningRule = printed.parse().unwrap();
            assert_eq!(rule, reparsed, "spec `{spec}` printed as `{printed}`");
        }
    }

    #[test]
    fn parse_rejects_subsequent_on_walk() {
        assert!("walk dt=10 subsequent=node".parse::<JoiningRule>().is_err());
    }

    #[test]
    fn hyper_event_predicates() {
        let rule = JoiningRule::adjacency(f64::INFINITY).unwrap();
        let a = HyperEvent::new(
            vec![crate::NodeId(0), crate::NodeId(1)],
            vec![crate::NodeId(2)],
            0.0,
            0.0,
        )
        .unwrap();
        let b = HyperEvent::new(vec![crate::NodeId(2)], vec![crate::NodeId(3)], 5.0, 0.0).unwrap();
        assert!(rule.joins(&a, &b, true));
        let walk = JoiningRule::walk_forming(f64::INFINITY).unwrap();
        assert!(walk.joins(&a, &b, true));
        // walk-forming needs a target of `a` among sources of `b`
        let c = HyperEvent::new(vec![crate::NodeId(0)], vec![crate::NodeId(4)], 5.0, 0.0).unwrap();
        assert!(rule.joins(&a, &c, true));
        assert!(!walk.joins(&a, &c, true));
    }
}
