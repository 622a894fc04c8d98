//! Two-variable planar refinement of the state sum.
//!
//! In the plane — a genus-0 map with a designated outer region — smoothing
//! every crossing the oriented way turns the diagram into disjoint circles
//! plus one open segment per long component. Each circle then has a rotation
//! sense: counterclockwise when its enclosed side (the side not containing
//! the outer region) stays on the walk's left. The signed circle count is
//! the degree that normalizes the (W, D) state sum into a move invariant.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::diagram::{DiagramMap, EndpointKind, Slot};
use crate::poly::{LaurentPoly, Var};
use crate::stars::StarredDiagram;
use crate::statesum::{planar_table, state_sum};
use crate::{Error, Result};

fn err(msg: impl std::fmt::Display) -> Error {
    Error::Diagram(msg.to_string())
}

/// One circle of the all-crossing oriented smoothing.
#[derive(Debug, Clone, Serialize)]
pub struct SeifertCircle {
    /// Edge indices in walk order, starting from the smallest.
    pub edges: Vec<usize>,
    /// The walk keeps its enclosed side on the left.
    pub counterclockwise: bool,
}

/// Census of the oriented smoothing relative to a designated outer face.
#[derive(Debug, Clone, Serialize)]
pub struct SeifertData {
    pub circles: Vec<SeifertCircle>,
    /// Open tail-to-head segments; these never count toward the degree.
    pub segments: usize,
    /// Counterclockwise circles.
    pub p: usize,
    /// Clockwise circles.
    pub n_neg: usize,
    /// p − n_neg.
    pub deg: i64,
}

#[derive(Clone)]
struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Dsu {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let root = self.find(self.0[x]);
            self.0[x] = root;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// Out-slot the smoothed strand leaves through after entering `v` at `s_in`.
fn splice_out(map: &DiagramMap, v: u32, s_in: Slot) -> Slot {
    let positive = map.sign(v) == Some(1);
    let splices = DiagramMap::smoothing_splices(positive);
    splices.iter().find(|(i, _)| *i == s_in).map(|(_, o)| *o).expect("in-slot of a crossing")
}

/// Smooths every crossing and orients the resulting circles relative to
/// `outer_face`. Needs a connected genus-0 map without crossing-free loops
/// (a bare loop carries no rotation sense).
pub fn seifert_data(map: &DiagramMap, outer_face: usize) -> Result<SeifertData> {
    let census = map.census();
    if census.genus != 0 {
        return Err(err("oriented smoothing needs a planar (genus-0) map"));
    }
    if census.k != 1 {
        return Err(err("oriented smoothing needs a connected map"));
    }
    if map.free_loops() > 0 {
        return Err(err("crossing-free closed components carry no rotation sense"));
    }
    if outer_face >= map.num_faces() {
        return Err(err(format!("no face {}", DiagramMap::face_name(outer_face))));
    }

    let edge_ends: Vec<((u32, Slot), (u32, Slot))> = map
        .edge_refs()
        .iter()
        .map(|((fv, fs), (tv, ts))| {
            let f = map.vertex_index(fv).expect("edge endpoint");
            let t = map.vertex_index(tv).expect("edge endpoint");
            ((f, *fs), (t, *ts))
        })
        .collect();
    let out_edge: BTreeMap<(u32, Slot), usize> =
        edge_ends.iter().enumerate().map(|(i, (from, _))| (*from, i)).collect();
    let corner_face =
        |v: u32, s: Slot| map.face_of_corner(map.vertex_name(v), s).expect("corner face");

    // The smoothing opens a channel between two opposite corner faces at
    // each crossing; the channelled faces merge.
    let mut classes = Dsu::new(map.num_faces());
    for v in map.crossing_indices() {
        if map.sign(v) == Some(1) {
            classes.union(corner_face(v, 0), corner_face(v, 2));
        } else {
            classes.union(corner_face(v, 1), corner_face(v, 3));
        }
    }

    // Tail-to-head walks first: their edges belong to open segments.
    let ne = edge_ends.len();
    let mut on_segment = vec![false; ne];
    let mut segments = 0usize;
    for (name, kind) in map.endpoint_names() {
        if kind != EndpointKind::Tail {
            continue;
        }
        segments += 1;
        let tail = map.vertex_index(name).unwrap();
        let mut e = out_edge[&(tail, 0)];
        loop {
            on_segment[e] = true;
            let (v, s) = edge_ends[e].1;
            if map.sign(v).is_none() {
                break; // reached the head
            }
            e = out_edge[&(v, splice_out(map, v, s))];
        }
    }

    // Territories: an open segment does not separate the plane (its sides
    // connect around the endpoints), so faces across segment edges merge.
    let mut territory = classes.clone();
    for (i, seg) in on_segment.iter().enumerate() {
        if *seg {
            let (a, b) = map.edge_sides(i);
            territory.union(a, b);
        }
    }

    // Circles, each annotated with the face class on either side of the walk.
    // An edge into port (v, s) has the face of corner s on one fixed side
    // ("left" here) and corner s+1 on the other; the smoothing keeps each
    // side constant along the whole walk.
    let mut seen = on_segment.clone();
    let mut walks: Vec<(Vec<usize>, usize, usize)> = Vec::new();
    for e0 in 0..ne {
        if seen[e0] {
            continue;
        }
        let mut edges = Vec::new();
        let (mut left, mut right) = (None, None);
        let mut e = e0;
        loop {
            seen[e] = true;
            edges.push(e);
            let (v, s) = edge_ends[e].1;
            let l = classes.find(corner_face(v, s));
            let r = classes.find(corner_face(v, (s + 1) % 4));
            debug_assert!(left.map_or(true, |x| x == l) && right.map_or(true, |x| x == r));
            left = Some(l);
            right = Some(r);
            e = out_edge[&(v, splice_out(map, v, s))];
            if e == e0 {
                break;
            }
        }
        walks.push((edges, left.unwrap(), right.unwrap()));
    }

    // Disjoint circles cut the sphere into a tree of territories. Root it
    // at the outer region: a circle runs counterclockwise exactly when its
    // rootward side is its right side.
    let root = territory.find(outer_face);
    let mut adjacency: BTreeMap<usize, Vec<(usize, usize, bool)>> = BTreeMap::new();
    for (k, (_, l, r)) in walks.iter().enumerate() {
        let tl = territory.find(*l);
        let tr = territory.find(*r);
        assert_ne!(tl, tr, "a smoothed circle must separate the plane");
        adjacency.entry(tl).or_default().push((k, tr, true));
        adjacency.entry(tr).or_default().push((k, tl, false));
    }
    let mut ccw = vec![None::<bool>; walks.len()];
    let mut visited = BTreeSet::from([root]);
    let mut queue = VecDeque::from([root]);
    while let Some(t) = queue.pop_front() {
        for &(k, other, left_is_rootward) in adjacency.get(&t).into_iter().flatten() {
            if visited.insert(other) {
                ccw[k] = Some(!left_is_rootward);
                queue.push_back(other);
            }
        }
    }
    assert!(ccw.iter().all(Option::is_some), "territory tree must be connected");

    let circles: Vec<SeifertCircle> = walks
        .into_iter()
        .zip(ccw)
        .map(|((edges, _, _), c)| SeifertCircle { edges, counterclockwise: c.unwrap() })
        .collect();
    let p = circles.iter().filter(|c| c.counterclockwise).count();
    let n_neg = circles.len() - p;
    Ok(SeifertData { circles, segments, p, n_neg, deg: p as i64 - n_neg as i64 })
}

/// The two-variable state sum ∇(W, D) of a planar starred diagram.
pub fn planar_potential(sd: &StarredDiagram, outer_face: usize) -> Result<LaurentPoly> {
    seifert_data(sd.map(), outer_face)?; // validates planarity and the face id
    Ok(state_sum(sd, &planar_table()))
}

/// D^{−deg} · ∇(W, D): unchanged by moves performed in the plane.
pub fn normalized_planar(sd: &StarredDiagram, outer_face: usize) -> Result<LaurentPoly> {
    let data = seifert_data(sd.map(), outer_face)?;
    let deg = i32::try_from(data.deg).expect("degree fits");
    Ok(state_sum(sd, &planar_table()) * LaurentPoly::monomial(Var::D, -deg))
}
