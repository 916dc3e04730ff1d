//! Fixed points, quantum histories, the universal stack and the network of
//! branch lines connecting fixed points at adjacent times.

use crate::contour::Branch;
use crate::error::{Error, Result};
use crate::statespace::{tensor, Basis, StateVector};
use crate::tolerance::Tolerances;

/// A state pinned on both branches at time `t`: its `f` and `b` parts are equal.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub t: f64,
    pub state: StateVector,
}

impl FixedPoint {
    pub fn new(t: f64, state: StateVector) -> Self {
        Self { t, state }
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if !self.t.is_finite() {
            return Err(Error::NonFinite("fixed point time"));
        }
        self.state.require_normalized(tol.normalization)
    }
}

/// An ordered sequence of at least two fixed points with strictly increasing
/// times and a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumHistory {
    points: Vec<FixedPoint>,
}

impl QuantumHistory {
    pub fn points(&self) -> &[FixedPoint] {
        &self.points
    }

    /// Number of fixed points `N_t`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.points[0].state.dim()
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn first(&self) -> &FixedPoint {
        &self.points[0]
    }

    pub fn last(&self) -> &FixedPoint {
        &self.points[self.points.len() - 1]
    }
}

pub fn make_history(points: Vec<FixedPoint>, tol: &Tolerances) -> Result<QuantumHistory> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let dim = points[0].state.dim();
    for (i, p) in points.iter().enumerate() {
        if p.state.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: p.state.dim() });
        }
        if i > 0 && !(points[i - 1].t < p.t) {
            return Err(Error::NonMonotoneTimes { index: i });
        }
        p.validate(tol)?;
    }
    Ok(QuantumHistory { points })
}

/// One temporal part of the universal stack.
#[derive(Debug, Clone, PartialEq)]
pub struct StackPart {
    pub branch: Branch,
    pub t: f64,
    /// Position of `t` in the history, earliest = 0.
    pub time_index: usize,
    pub state: StateVector,
}

/// The `2·N_t` tagged temporal parts, ordered `(b,t_N),(f,t_N),…,(b,t_1),(f,t_1)`.
///
/// Parts are kept separate; [`UniversalStack::tensor`] builds the full
/// `dim^(2N_t)` vector on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct UniversalStack {
    parts: Vec<StackPart>,
}

impl UniversalStack {
    pub fn parts(&self) -> &[StackPart] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, branch: Branch, time_index: usize) -> Option<&StackPart> {
        self.parts
            .iter()
            .find(|p| p.branch == branch && p.time_index == time_index)
    }

    /// States on one branch, earliest time first.
    pub fn branch_states(&self, branch: Branch) -> Vec<&StateVector> {
        let mut parts: Vec<_> = self.parts.iter().filter(|p| p.branch == branch).collect();
        parts.sort_by_key(|p| p.time_index);
        parts.into_iter().map(|p| &p.state).collect()
    }

    pub fn tensor(&self) -> Result<StateVector> {
        let states: Vec<StateVector> = self.parts.iter().map(|p| p.state.clone()).collect();
        tensor(&states)
    }
}

pub fn stack_state(history: &QuantumHistory) -> UniversalStack {
    let parts = history
        .points
        .iter()
        .enumerate()
        .rev()
        .flat_map(|(i, p)| {
            [Branch::Backward, Branch::Forward].map(|branch| StackPart {
                branch,
                t: p.t,
                time_index: i,
                state: p.state.clone(),
            })
        })
        .collect();
    UniversalStack { parts }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub layer: usize,
    pub index: usize,
}

/// A directed branch line. Forward lines run from the earlier layer to the
/// later one, backward lines the other way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub branch: Branch,
    pub from: NodeId,
    pub to: NodeId,
}

impl Edge {
    pub fn channel(&self) -> Channel {
        let (earlier, later) = if self.from.layer < self.to.layer {
            (self.from, self.to)
        } else {
            (self.to, self.from)
        };
        Channel { earlier, later }
    }
}

/// The two-way channel between a pair of nodes at adjacent times; it is
/// carried by exactly one forward and one backward line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Channel {
    pub earlier: NodeId,
    pub later: NodeId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub t: f64,
    pub nodes: Basis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointNetwork {
    layers: Vec<Layer>,
    edges: Vec<Edge>,
}

pub fn build_network(times: &[f64], bases: Vec<Basis>) -> Result<FixedPointNetwork> {
    if times.len() != bases.len() {
        return Err(Error::LengthMismatch { left: times.len(), right: bases.len() });
    }
    if times.is_empty() {
        return Err(Error::Empty("network layers"));
    }
    if let Some(i) = times.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(Error::NonMonotoneTimes { index: i + 1 });
    }
    let layers: Vec<Layer> = times
        .iter()
        .zip(bases)
        .map(|(&t, nodes)| Layer { t, nodes })
        .collect();
    let mut edges = Vec::new();
    for l in 0..layers.len().saturating_sub(1) {
        for i in 0..layers[l].nodes.len() {
            for j in 0..layers[l + 1].nodes.len() {
                let lower = NodeId { layer: l, index: i };
                let upper = NodeId { layer: l + 1, index: j };
                edges.push(Edge { branch: Branch::Forward, from: lower, to: upper });
                edges.push(Edge { branch: Branch::Backward, from: upper, to: lower });
            }
        }
    }
    Ok(FixedPointNetwork { layers, edges })
}

impl FixedPointNetwork {
    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_state(&self, node: NodeId) -> &StateVector {
        &self.layers[node.layer].nodes[node.index]
    }

    /// Lines connecting layer `layer` to layer `layer + 1`.
    pub fn edges_between(&self, layer: usize) -> impl Iterator<Item = &Edge> {
        self.edges
            .iter()
            .filter(move |e| e.from.layer.min(e.to.layer) == layer)
    }

    pub fn channels_between(&self, layer: usize) -> Vec<Channel> {
        let mut channels: Vec<Channel> = self.edges_between(layer).map(Edge::channel).collect();
        channels.sort();
        channels.dedup();
        channels
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        self.edges.iter().filter(|e| e.from == node).count()
    }

    pub fn in_degree(&self, node: NodeId) -> usize {
        self.edges.iter().filter(|e| e.to == node).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(dim: usize, i: usize) -> StateVector {
        StateVector::basis_vector(dim, i)
    }

    fn fp(t: f64, s: StateVector) -> FixedPoint {
        FixedPoint::new(t, s)
    }

    #[test]
    fn make_history_examples() {
        let tol = Tolerances::default();
        let h = make_history(vec![fp(0.0, e(2, 0)), fp(1.0, e(2, 1))], &tol).unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(make_history(vec![fp(0.0, e(2, 0))], &tol), Err(Error::TooFewPoints(1)));
        assert_eq!(
            make_history(vec![fp(1.0, e(2, 0)), fp(0.0, e(2, 1))], &tol),
            Err(Error::NonMonotoneTimes { index: 1 })
        );
    }

    #[test]
    fn make_history_rejects_bad_states() {
        let tol = Tolerances::default();
        assert!(matches!(
            make_history(vec![fp(0.0, e(2, 0)), fp(1.0, e(3, 1))], &tol),
            Err(Error::DimensionMismatch { .. })
        ));
        let long = e(2, 0).scaled(2.0.into());
        assert!(matches!(
            make_history(vec![fp(0.0, e(2, 0)), fp(1.0, long)], &tol),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn stack_ordering_for_two_points() {
        let tol = Tolerances::default();
        let h = make_history(vec![fp(0.0, e(2, 0)), fp(1.0, e(2, 1))], &tol).unwrap();
        let stack = stack_state(&h);
        let tags: Vec<_> = stack.parts().iter().map(|p| (p.branch, p.t)).collect();
        assert_eq!(
            tags,
            vec![
                (Branch::Backward, 1.0),
                (Branch::Forward, 1.0),
                (Branch::Backward, 0.0),
                (Branch::Forward, 0.0),
            ]
        );
        for p in stack.parts() {
            assert_eq!(p.state, h.points()[p.time_index].state);
        }
        assert!((stack.tensor().unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn network_examples() {
        let net = build_network(&[0.0, 1.0], vec![Basis::standard(2), Basis::standard(3)]).unwrap();
        assert_eq!(net.edges().len(), 12);
        assert_eq!(net.channels_between(0).len(), 6);

        let net = build_network(
            &[0.0, 1.0, 2.0],
            vec![Basis::standard(2), Basis::standard(4), Basis::standard(3)],
        )
        .unwrap();
        let interior = NodeId { layer: 1, index: 0 };
        assert_eq!(net.out_degree(interior), 5);
        assert_eq!(net.in_degree(interior), 5);

        let net = build_network(&[0.0, 1.0], vec![Basis::standard(1), Basis::standard(1)]).unwrap();
        let branches: Vec<_> = net.edges().iter().map(|e| e.branch).collect();
        assert_eq!(branches, vec![Branch::Forward, Branch::Backward]);
    }

    #[test]
    fn network_errors() {
        assert!(matches!(
            build_network(&[0.0, 1.0], vec![Basis::standard(2)]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            build_network(&[1.0, 0.0], vec![Basis::standard(2), Basis::standard(2)]),
            Err(Error::NonMonotoneTimes { .. })
        ));
    }

    proptest! {
        #[test]
        fn stack_round_trips(n in 2usize..6, dim in 1usize..5) {
            let tol = Tolerances::default();
            let pts: Vec<_> = (0..n).map(|i| fp(i as f64, e(dim, i % dim))).collect();
            let h = make_history(pts, &tol).unwrap();
            let stack = stack_state(&h);
            prop_assert_eq!(stack.len(), 2 * n);
            let fwd = stack.branch_states(Branch::Forward);
            for (s, p) in fwd.iter().zip(h.points()) {
                prop_assert_eq!(*s, &p.state);
            }
        }

        #[test]
        fn every_edge_in_exactly_one_channel(sizes in prop::collection::vec(1usize..5, 2..5)) {
            let times: Vec<f64> = (0..sizes.len()).map(|i| i as f64).collect();
            let bases = sizes.iter().map(|&d| Basis::standard(d)).collect();
            let net = build_network(&times, bases).unwrap();
            for l in 0..sizes.len() - 1 {
                let edges: Vec<_> = net.edges_between(l).collect();
                prop_assert_eq!(edges.len(), 2 * sizes[l] * sizes[l + 1]);
                let channels = net.channels_between(l);
                prop_assert_eq!(channels.len(), sizes[l] * sizes[l + 1]);
                for c in &channels {
                    let carriers: Vec<_> = edges.iter().filter(|e| e.channel() == *c).collect();
                    prop_assert_eq!(carriers.len(), 2);
                    prop_assert_ne!(carriers[0].branch, carriers[1].branch);
                }
            }
        }
    }
}
