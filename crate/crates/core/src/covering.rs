//! Selecting pairwise disjoint closed segments that keep at least half of
//! the measure of their union.
//!
//! While the intersection graph has a cycle, a segment covered by others is
//! dropped, which leaves the union unchanged. Once the graph is a forest, a
//! 2-colouring splits the segments into two disjoint families whose lengths
//! add up to at least the union, and the heavier family is returned.
//!
//! Intersection graphs of intervals are chordal, so a cycle exists exactly
//! when some triangle does, and by the Helly property a triangle is three
//! segments sharing a point. One endpoint sweep finds them all.

use std::collections::VecDeque;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// Closed segment `[left, right]`; touching segments intersect.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    left: Rational,
    right: Rational,
}

impl Segment {
    pub fn new(left: Rational, right: Rational) -> Result<Self> {
        if left > right {
            return Err(Error::InvalidArgument(format!(
                "segment [{}, {}] is reversed",
                format_rational(&left),
                format_rational(&right)
            )));
        }
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &Rational {
        &self.left
    }

    pub fn right(&self) -> &Rational {
        &self.right
    }

    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    pub fn intersects(&self, other: &Segment) -> bool {
        self.left.clone().max(other.left.clone()) <= self.right.clone().min(other.right.clone())
    }

    /// Parses `["p/q", "p/q"]` pairs.
    pub fn parse_list(json: &str) -> Result<Vec<Segment>> {
        let raw: Vec<[String; 2]> =
            serde_json::from_str(json).map_err(|e| Error::Malformed(format!("segment list: {e}")))?;
        raw.iter()
            .map(|[l, r]| Segment::new(parse_rational(l)?, parse_rational(r)?))
            .collect()
    }
}

impl Serialize for Segment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_rational(&self.left), format_rational(&self.right)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Segment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let [l, r] = <[String; 2]>::deserialize(d)?;
        let l = parse_rational(&l).map_err(D::Error::custom)?;
        let r = parse_rational(&r).map_err(D::Error::custom)?;
        Segment::new(l, r).map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl IntersectionGraph {
    pub fn new(segments: &[Segment]) -> Self {
        let n = segments.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if segments[i].intersects(&segments[j]) {
                    edges.push((i, j));
                }
            }
        }
        Self { n, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_forest(&self) -> bool {
        // Union-find: an edge inside one component closes a cycle.
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }
}

/// Measure of the union by sort and merge.
pub fn union_measure(segments: &[Segment]) -> Rational {
    let mut sorted: Vec<&Segment> = segments.iter().collect();
    sorted.sort_by(|a, b| a.left.cmp(&b.left));
    let mut total = Rational::zero();
    let mut current: Option<(Rational, Rational)> = None;
    for s in sorted {
        current = match current {
            Some((l, r)) if s.left <= r => Some((l, r.max(s.right.clone()))),
            Some((l, r)) => {
                total += r - l;
                Some((s.left.clone(), s.right.clone()))
            }
            None => Some((s.left.clone(), s.right.clone())),
        };
    }
    if let Some((l, r)) = current {
        total += r - l;
    }
    total
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Selection {
    /// Selected input positions, ascending.
    pub indices: Vec<usize>,
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub selected_length: Rational,
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub union_measure: Rational,
    /// Positions dropped as covered before colouring, in removal order.
    pub removed: Vec<usize>,
}

/// Indices of the segments left after dropping covered ones until no point
/// lies in three of them, plus the removal order.
fn prune_to_forest(segments: &[Segment]) -> (Vec<usize>, Vec<usize>) {
    // Opening events sort before closing ones at the same position.
    let mut events: Vec<(&Rational, u8, usize)> = Vec::with_capacity(2 * segments.len());
    for (i, s) in segments.iter().enumerate() {
        events.push((&s.left, 0, i));
        events.push((&s.right, 1, i));
    }
    events.sort();
    let mut alive = vec![true; segments.len()];
    let mut active: Vec<usize> = Vec::new();
    let mut removed = Vec::new();
    for (_, kind, i) in events {
        if !alive[i] {
            continue;
        }
        if kind == 1 {
            active.retain(|&j| j != i);
            continue;
        }
        active.push(i);
        if active.len() < 3 {
            continue;
        }
        // Three segments through this point: order by right end, then drop
        // the middle one if it starts after the first, else the first.
        let mut tri = [active[0], active[1], active[2]];
        tri.sort_by(|&a, &b| segments[a].right.cmp(&segments[b].right).then(a.cmp(&b)));
        let [s1, s2, _] = tri;
        let drop = if segments[s2].left >= segments[s1].left { s2 } else { s1 };
        alive[drop] = false;
        active.retain(|&j| j != drop);
        removed.push(drop);
    }
    let kept = (0..segments.len()).filter(|&i| alive[i]).collect();
    (kept, removed)
}

/// Pairwise disjoint subfamily with total length at least half the union.
pub fn select_disjoint(segments: &[Segment]) -> Result<Selection> {
    if segments.is_empty() {
        return Err(Error::Empty("segment list"));
    }
    let (kept, removed) = prune_to_forest(segments);

    // 2-colour the forest, each tree rooted at its smallest index.
    let mut colour: Vec<Option<u8>> = vec![None; segments.len()];
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); segments.len()];
    for (x, &i) in kept.iter().enumerate() {
        for &j in &kept[x + 1..] {
            if segments[i].intersects(&segments[j]) {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    for &root in &kept {
        if colour[root].is_some() {
            continue;
        }
        colour[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let c = colour[v].expect("queued vertices are coloured");
            for &w in &adjacency[v] {
                match colour[w] {
                    None => {
                        colour[w] = Some(1 - c);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == c => {
                        return Err(Error::SelectionViolation(format!(
                            "segments {v} and {w} intersect but share a colour"
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
    }

    let class = |c: u8| -> Vec<usize> { kept.iter().copied().filter(|&i| colour[i] == Some(c)).collect() };
    let length = |idx: &[usize]| idx.iter().fold(Rational::zero(), |acc, &i| acc + segments[i].length());
    let (a, b) = (class(0), class(1));
    let (la, lb) = (length(&a), length(&b));
    // Ties go to the class holding the smallest index, which is always `a`.
    let (indices, selected_length) = if lb > la { (b, lb) } else { (a, la) };

    let union = union_measure(segments);
    check_disjoint(segments, &indices)?;
    if &selected_length * Rational::from_integer(2.into()) < union {
        return Err(Error::SelectionViolation(format!(
            "selected length {} is below half the union {}",
            format_rational(&selected_length),
            format_rational(&union)
        )));
    }
    Ok(Selection { indices, selected_length, union_measure: union, removed })
}

fn check_disjoint(segments: &[Segment], indices: &[usize]) -> Result<()> {
    let mut sorted: Vec<usize> = indices.to_vec();
    sorted.sort_by(|&a, &b| segments[a].left.cmp(&segments[b].left));
    for w in sorted.windows(2) {
        if segments[w[0]].right >= segments[w[1]].left {
            return Err(Error::SelectionViolation(format!("selected segments {} and {} intersect", w[0], w[1])));
        }
    }
    Ok(())
}

/// Largest total length of a pairwise disjoint subfamily, by enumerating
/// every disjoint subfamily. Exponential; refuses more than 24 segments.
pub fn exhaustive_best_disjoint(segments: &[Segment]) -> Result<Rational> {
    const CAP: usize = 24;
    if segments.len() > CAP {
        return Err(Error::EnumerationCap { points: segments.len(), cap: CAP });
    }
    let mut order: Vec<usize> = (0..segments.len()).collect();
    order.sort_by(|&a, &b| segments[a].left.cmp(&segments[b].left));
    let sorted: Vec<&Segment> = order.iter().map(|&i| &segments[i]).collect();

    // Extend a family whose last member ends at `end` with any later
    // segment starting strictly after it.
    fn walk(sorted: &[&Segment], from: usize, end: Option<&Rational>, acc: Rational, best: &mut Rational) {
        if acc > *best {
            *best = acc.clone();
        }
        for k in from..sorted.len() {
            if end.is_none_or(|e| sorted[k].left > *e) {
                walk(sorted, k + 1, Some(&sorted[k].right), &acc + sorted[k].length(), best);
            }
        }
    }
    let mut best = Rational::zero();
    walk(&sorted, 0, None, Rational::zero(), &mut best);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn seg(l: Rational, r: Rational) -> Segment {
        Segment::new(l, r).unwrap()
    }

    #[test]
    fn union_examples() {
        assert_eq!(union_measure(&[seg(int(0), int(1)), seg(rat(1, 2), rat(3, 2))]), rat(3, 2));
        assert_eq!(union_measure(&[]), int(0));
        assert_eq!(union_measure(&[seg(int(0), int(1)), seg(int(0), int(1))]), int(1));
    }

    #[test]
    fn selection_examples() {
        let s = select_disjoint(&[seg(int(0), int(1))]).unwrap();
        assert_eq!(s.indices, vec![0]);
        assert_eq!(s.selected_length, int(1));

        let s = select_disjoint(&[seg(int(0), int(1)), seg(int(2), int(3))]).unwrap();
        assert_eq!(s.indices, vec![0, 1]);
        assert_eq!(s.selected_length, int(2));
        assert_eq!(s.union_measure, int(2));

        let three = [seg(int(0), int(1)), seg(rat(1, 2), rat(3, 2)), seg(int(1), int(2))];
        let s = select_disjoint(&three).unwrap();
        assert_eq!(s.indices.len(), 1);
        assert_eq!(s.selected_length, int(1));
        assert_eq!(s.union_measure, int(2));
        assert_eq!(exhaustive_best_disjoint(&three).unwrap(), int(1));
    }

    #[test]
    fn degenerate_and_empty() {
        assert!(matches!(select_disjoint(&[]), Err(Error::Empty(_))));
        let s = select_disjoint(&[seg(int(1), int(1)), seg(int(1), int(1))]).unwrap();
        assert_eq!(s.selected_length, int(0));
        assert!(Segment::new(int(1), int(0)).is_err());
    }

    #[test]
    fn graph_edges_follow_closed_semantics() {
        let g = IntersectionGraph::new(&[seg(int(0), int(1)), seg(int(1), int(2)), seg(int(3), int(4))]);
        assert_eq!(g.edges(), &[(0, 1)]);
        assert!(g.is_forest());
        let tri = IntersectionGraph::new(&[seg(int(0), int(2)), seg(int(1), int(3)), seg(int(1), int(2))]);
        assert!(!tri.is_forest());
    }

    #[test]
    fn pruned_family_is_a_forest_with_the_same_union() {
        let segs = [
            seg(int(0), int(4)),
            seg(int(1), int(2)),
            seg(int(1), int(5)),
            seg(int(3), int(6)),
            seg(int(5), int(7)),
        ];
        let (kept, removed) = prune_to_forest(&segs);
        assert!(!removed.is_empty());
        let kept_segs: Vec<Segment> = kept.iter().map(|&i| segs[i].clone()).collect();
        assert!(IntersectionGraph::new(&kept_segs).is_forest());
        assert_eq!(union_measure(&kept_segs), union_measure(&segs));
    }

    #[test]
    fn json_round_trip() {
        let segs = Segment::parse_list(r#"[["0","1"],["1/2","3/2"]]"#).unwrap();
        assert_eq!(segs[1], seg(rat(1, 2), rat(3, 2)));
        let back = serde_json::to_string(&segs).unwrap();
        assert_eq!(back, r#"[["0","1"],["1/2","3/2"]]"#);
        assert!(Segment::parse_list(r#"[["1","0"]]"#).is_err());
    }
}
