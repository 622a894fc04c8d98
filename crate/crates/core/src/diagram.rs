//! Oriented combinatorial maps of link/linkoid diagrams.
//!
//! A diagram is a 4-valent map: crossings carry a counterclockwise rotation
//! of four ports, endpoints are monovalent. Slot roles at a crossing are
//! fixed: slot 0 is the incoming under-strand, slot 2 the outgoing
//! under-strand, and the over-strand enters at slot 1 or 3 (sign +1 iff it
//! enters at 3). Faces are traced combinatorially; regions may additionally
//! be merged to model handle attachments.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub type Slot = u8;

/// Internal port reference: vertex index + slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Port {
    pub v: u32,
    pub s: Slot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EndpointKind {
    #[serde(rename = "tail")]
    Tail,
    #[serde(rename = "head")]
    Head,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum VertKind {
    Crossing { over_in_slot: Slot },
    End { kind: EndpointKind },
}

#[derive(Debug, Clone)]
struct Vert {
    name: String,
    kind: VertKind,
}

/// Raw building blocks of a diagram, used by generators and move rewriting.
#[derive(Debug, Clone, Default)]
pub struct Parts {
    pub crossings: Vec<(String, Slot)>,
    pub endpoints: Vec<(String, EndpointKind)>,
    pub edges: Vec<((String, Slot), (String, Slot))>,
    pub free_loops: u32,
}

/// Star decorations as they appear in diagram documents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StarsSpec {
    #[serde(rename = "regions")]
    Regions(Vec<String>),
    #[serde(rename = "crossings")]
    Crossings(Vec<String>),
}

/// A parsed diagram document.
#[derive(Debug, Clone)]
pub struct Document {
    pub map: DiagramMap,
    pub stars: Option<StarsSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Census {
    pub n: usize,
    pub f: usize,
    pub f_effective: usize,
    pub e: usize,
    pub k: usize,
    pub m: usize,
    pub genus: usize,
    pub admissible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Separation {
    pub separating: bool,
    pub nugatory: bool,
}

/// An immutable diagram map with traced faces.
///
/// Faces are canonical: each face's corner list starts at its smallest
/// (vertex name, slot) corner, and faces are sorted by that corner. The
/// external name of face `i` is `f{i}`. Closed curves with no crossings
/// cannot be drawn as a map and are tracked by count in `free_loops`.
#[derive(Debug, Clone)]
pub struct DiagramMap {
    verts: Vec<Vert>,
    pair: Vec<[Option<Port>; 4]>,
    is_out: Vec<[bool; 4]>,
    edges: Vec<(Port, Port)>,
    free_loops: u32,
    faces: Vec<Vec<Port>>,
    corner_face: Vec<[u32; 4]>,
    merges: Vec<Vec<u32>>,
}

fn err(msg: impl fmt::Display) -> Error {
    Error::Diagram(msg.to_string())
}

impl DiagramMap {
    pub fn build(parts: Parts) -> Result<DiagramMap> {
        let Parts { crossings, endpoints, edges, free_loops } = parts;
        let mut verts: Vec<Vert> = Vec::new();
        for (id, over_in_slot) in crossings {
            if over_in_slot != 1 && over_in_slot != 3 {
                return Err(err(format!(
                    "crossing {id}: over_in_slot must be 1 or 3, got {over_in_slot}"
                )));
            }
            verts.push(Vert { name: id, kind: VertKind::Crossing { over_in_slot } });
        }
        for (id, kind) in endpoints {
            verts.push(Vert { name: id, kind: VertKind::End { kind } });
        }
        if verts.is_empty() && free_loops == 0 {
            return Err(err("empty diagram"));
        }
        verts.sort_by(|a, b| a.name.cmp(&b.name));
        for w in verts.windows(2) {
            if w[0].name == w[1].name {
                return Err(err(format!("duplicate vertex id {:?}", w[0].name)));
            }
        }
        let index: BTreeMap<&str, u32> = verts
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), i as u32))
            .collect();
        let deg = |v: u32| -> Slot {
            match verts[v as usize].kind {
                VertKind::Crossing { .. } => 4,
                VertKind::End { .. } => 1,
            }
        };
        let mut pair: Vec<[Option<Port>; 4]> = vec![[None; 4]; verts.len()];
        let mut is_out: Vec<[bool; 4]> = vec![[false; 4]; verts.len()];
        let mut edge_list: Vec<(Port, Port)> = Vec::new();
        for ((fv, fs), (tv, ts)) in &edges {
            let resolve = |name: &str, s: Slot| -> Result<Port> {
                let v = *index
                    .get(name)
                    .ok_or_else(|| err(format!("edge references unknown vertex {name:?}")))?;
                if s >= deg(v) {
                    return Err(err(format!("port {name}.{s}: slot out of range")));
                }
                Ok(Port { v, s })
            };
            let f = resolve(fv, *fs)?;
            let t = resolve(tv, *ts)?;
            for (p, name, s) in [(f, fv, fs), (t, tv, ts)] {
                if pair[p.v as usize][p.s as usize].is_some() {
                    return Err(err(format!("port {name}.{s} used by more than one edge")));
                }
                pair[p.v as usize][p.s as usize] = Some(Port { v: u32::MAX, s: 0 });
            }
            pair[f.v as usize][f.s as usize] = Some(t);
            pair[t.v as usize][t.s as usize] = Some(f);
            is_out[f.v as usize][f.s as usize] = true;
            edge_list.push((f, t));
        }
        // every port of every vertex must be paired, with the right direction
        for (vi, vert) in verts.iter().enumerate() {
            let v = vi as u32;
            for s in 0..deg(v) {
                if pair[vi][s as usize].is_none() {
                    return Err(err(format!("port {}.{s} is not attached to any edge", vert.name)));
                }
            }
            match &vert.kind {
                VertKind::Crossing { over_in_slot } => {
                    let over_out = over_in_slot ^ 2; // 1<->3
                    for (s, want_out, role) in [
                        (0u8, false, "incoming under-strand"),
                        (2u8, true, "outgoing under-strand"),
                        (*over_in_slot, false, "incoming over-strand"),
                        (over_out, true, "outgoing over-strand"),
                    ] {
                        if is_out[vi][s as usize] != want_out {
                            return Err(err(format!(
                                "crossing {} slot {s} must be the {role}",
                                vert.name
                            )));
                        }
                    }
                }
                VertKind::End { kind } => {
                    let out = is_out[vi][0];
                    match kind {
                        EndpointKind::Tail if !out => {
                            return Err(err(format!(
                                "endpoint {} is a tail but its edge points in",
                                vert.name
                            )))
                        }
                        EndpointKind::Head if out => {
                            return Err(err(format!(
                                "endpoint {} is a head but its edge points out",
                                vert.name
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        // tails and heads must pair up along strands
        let tails = verts
            .iter()
            .filter(|v| v.kind == VertKind::End { kind: EndpointKind::Tail })
            .count();
        let heads = verts
            .iter()
            .filter(|v| v.kind == VertKind::End { kind: EndpointKind::Head })
            .count();
        if tails != heads {
            return Err(err(format!("{tails} tails but {heads} heads")));
        }
        edge_list.sort();
        let mut map = DiagramMap {
            verts,
            pair,
            is_out,
            edges: edge_list,
            free_loops,
            faces: Vec::new(),
            corner_face: Vec::new(),
            merges: Vec::new(),
        };
        map.trace_faces();
        map.census(); // asserts the Euler identities internally
        Ok(map)
    }

    /// Corner-walk face tracing. Corners are identified with outward
    /// half-edges: the walk leaving port (v,s) crosses its edge to (w,t)
    /// and departs through the rotation-next slot, sweeping that corner.
    fn trace_faces(&mut self) {
        let nv = self.verts.len();
        let mut visited = vec![[false; 4]; nv];
        let mut faces: Vec<Vec<Port>> = Vec::new();
        for v in 0..nv as u32 {
            for s in 0..self.deg(v) {
                if visited[v as usize][s as usize] {
                    continue;
                }
                let start = Port { v, s };
                let mut cycle = Vec::new();
                let mut cur = start;
                loop {
                    visited[cur.v as usize][cur.s as usize] = true;
                    cycle.push(cur);
                    let q = self.pair(cur);
                    cur = Port { v: q.v, s: self.rot_next(q) };
                    if cur == start {
                        break;
                    }
                }
                // canonical rotation: smallest corner first
                let min_at = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap();
                cycle.rotate_left(min_at);
                faces.push(cycle);
            }
        }
        faces.sort_by_key(|c| c[0]);
        let mut corner_face = vec![[u32::MAX; 4]; nv];
        for (fi, face) in faces.iter().enumerate() {
            for p in face {
                corner_face[p.v as usize][p.s as usize] = fi as u32;
            }
        }
        self.faces = faces;
        self.corner_face = corner_face;
    }

    pub(crate) fn pair(&self, p: Port) -> Port {
        self.pair[p.v as usize][p.s as usize].expect("unpaired port")
    }

    pub(crate) fn deg(&self, v: u32) -> Slot {
        match self.verts[v as usize].kind {
            VertKind::Crossing { .. } => 4,
            VertKind::End { .. } => 1,
        }
    }

    pub(crate) fn is_port_out(&self, p: Port) -> bool {
        self.is_out[p.v as usize][p.s as usize]
    }

    fn rot_next(&self, p: Port) -> Slot {
        match self.verts[p.v as usize].kind {
            VertKind::Crossing { .. } => (p.s + 1) % 4,
            VertKind::End { .. } => 0,
        }
    }

    pub(crate) fn vert_kind(&self, v: u32) -> &VertKind {
        &self.verts[v as usize].kind
    }

    pub fn vertex_name(&self, v: u32) -> &str {
        &self.verts[v as usize].name
    }

    pub fn vertex_index(&self, name: &str) -> Option<u32> {
        self.verts
            .binary_search_by(|vert| vert.name.as_str().cmp(name))
            .ok()
            .map(|i| i as u32)
    }

    pub fn crossing_indices(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.verts.len() as u32)
            .filter(|&v| matches!(self.verts[v as usize].kind, VertKind::Crossing { .. }))
    }

    pub fn crossing_names(&self) -> Vec<&str> {
        self.crossing_indices().map(|v| self.vertex_name(v)).collect()
    }

    pub fn endpoint_names(&self) -> Vec<(&str, EndpointKind)> {
        self.verts
            .iter()
            .filter_map(|v| match v.kind {
                VertKind::End { kind } => Some((v.name.as_str(), kind)),
                _ => None,
            })
            .collect()
    }

    pub fn num_crossings(&self) -> usize {
        self.crossing_indices().count()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn free_loops(&self) -> u32 {
        self.free_loops
    }

    /// +1 / −1, or None for endpoints.
    pub fn sign(&self, v: u32) -> Option<i8> {
        match self.verts[v as usize].kind {
            VertKind::Crossing { over_in_slot } => Some(if over_in_slot == 3 { 1 } else { -1 }),
            VertKind::End { .. } => None,
        }
    }

    pub fn over_in_slot(&self, v: u32) -> Option<Slot> {
        match self.verts[v as usize].kind {
            VertKind::Crossing { over_in_slot } => Some(over_in_slot),
            VertKind::End { .. } => None,
        }
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// Corners of face `i` as (vertex name, slot), in cyclic order.
    pub fn face_corners(&self, i: usize) -> Vec<(&str, Slot)> {
        self.faces[i].iter().map(|p| (self.vertex_name(p.v), p.s)).collect()
    }

    pub(crate) fn face_ports(&self, i: usize) -> &[Port] {
        &self.faces[i]
    }

    pub fn face_of_corner(&self, vertex: &str, slot: Slot) -> Option<usize> {
        let v = self.vertex_index(vertex)?;
        if slot >= self.deg(v) {
            return None;
        }
        Some(self.corner_face[v as usize][slot as usize] as usize)
    }

    pub(crate) fn face_of_port(&self, p: Port) -> usize {
        self.corner_face[p.v as usize][p.s as usize] as usize
    }

    pub fn face_name(i: usize) -> String {
        format!("f{i}")
    }

    pub fn parse_face_name(&self, name: &str) -> Result<usize> {
        let idx: usize = name
            .strip_prefix('f')
            .and_then(|rest| rest.parse().ok())
            .ok_or_else(|| err(format!("bad face id {name:?} (expected f0, f1, ...)")))?;
        if idx >= self.faces.len() {
            return Err(err(format!("face {name} does not exist (f0..f{})", self.faces.len() - 1)));
        }
        Ok(idx)
    }

    pub fn merges(&self) -> &[Vec<u32>] {
        &self.merges
    }

    /// Effective regions: merge groups plus singleton faces, each a sorted
    /// list of face indices, ordered by smallest member.
    pub fn effective_regions(&self) -> Vec<Vec<u32>> {
        let mut merged: BTreeSet<u32> = BTreeSet::new();
        for g in &self.merges {
            merged.extend(g.iter().copied());
        }
        let mut regions: Vec<Vec<u32>> = self.merges.clone();
        for f in 0..self.faces.len() as u32 {
            if !merged.contains(&f) {
                regions.push(vec![f]);
            }
        }
        regions.sort_by_key(|g| g[0]);
        regions
    }

    /// Undirected edges as ((name, slot), (name, slot)), canonical order.
    pub fn edge_refs(&self) -> Vec<((String, Slot), (String, Slot))> {
        self.edges
            .iter()
            .map(|(f, t)| {
                (
                    (self.vertex_name(f.v).to_string(), f.s),
                    (self.vertex_name(t.v).to_string(), t.s),
                )
            })
            .collect()
    }

    /// The two faces bordering edge `i` (sides of its from-port and to-port).
    pub fn edge_sides(&self, i: usize) -> (usize, usize) {
        let (f, t) = self.edges[i];
        (self.face_of_port(f), self.face_of_port(t))
    }

    // --- census ------------------------------------------------------------

    pub(crate) fn vertex_components(&self) -> Vec<u32> {
        let nv = self.verts.len();
        let mut comp = vec![u32::MAX; nv];
        let mut next = 0u32;
        for start in 0..nv {
            if comp[start] != u32::MAX {
                continue;
            }
            let mut stack = vec![start as u32];
            comp[start] = next;
            while let Some(v) = stack.pop() {
                for s in 0..self.deg(v) {
                    let q = self.pair(Port { v, s });
                    if comp[q.v as usize] == u32::MAX {
                        comp[q.v as usize] = next;
                        stack.push(q.v);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn num_components(&self) -> usize {
        let comps = if self.verts.is_empty() {
            0
        } else {
            *self.vertex_components().iter().max().unwrap() as usize + 1
        };
        comps + self.free_loops as usize
    }

    pub fn num_long_components(&self) -> usize {
        self.verts
            .iter()
            .filter(|v| v.kind == VertKind::End { kind: EndpointKind::Tail })
            .count()
    }

    /// Number of closed strand components (excluding free loops).
    pub fn num_circular_components(&self) -> usize {
        // strand-follow: entering a crossing at slot s leaves at s+2
        let mut seen: BTreeSet<Port> = BTreeSet::new();
        // long strands first
        for v in 0..self.verts.len() as u32 {
            if self.verts[v as usize].kind != (VertKind::End { kind: EndpointKind::Tail }) {
                continue;
            }
            let mut p = Port { v, s: 0 };
            loop {
                seen.insert(p);
                let q = self.pair(p);
                if matches!(self.verts[q.v as usize].kind, VertKind::End { .. }) {
                    break;
                }
                p = Port { v: q.v, s: (q.s + 2) % 4 };
            }
        }
        let mut circles = 0;
        for v in self.crossing_indices().collect::<Vec<_>>() {
            for s in [2u8, 1, 3] {
                let start = Port { v, s };
                if !self.is_out[v as usize][s as usize] || seen.contains(&start) {
                    continue;
                }
                circles += 1;
                let mut p = start;
                loop {
                    seen.insert(p);
                    let q = self.pair(p);
                    p = Port { v: q.v, s: (q.s + 2) % 4 };
                    if p == start {
                        break;
                    }
                }
            }
        }
        circles
    }

    /// Diagram statistics. Faces use the side-by-side convention for split
    /// diagrams (outer faces of the components coalesce), so
    /// f − n = k − m + 1 holds whenever every component is planar.
    pub fn census(&self) -> Census {
        let n = self.num_crossings();
        let e = self.edges.len();
        let m = self.num_long_components();
        let comp = self.vertex_components();
        let graph_k = if comp.is_empty() { 0 } else { *comp.iter().max().unwrap() as usize + 1 };
        let k = graph_k + self.free_loops as usize;
        // per-component Euler characteristic gives the embedding genus
        let mut v_of = vec![0usize; graph_k];
        let mut e_of = vec![0usize; graph_k];
        let mut f_of = vec![0usize; graph_k];
        for (vi, _) in self.verts.iter().enumerate() {
            v_of[comp[vi] as usize] += 1;
        }
        for (f, _) in &self.edges {
            e_of[comp[f.v as usize] as usize] += 1;
        }
        for face in &self.faces {
            f_of[comp[face[0].v as usize] as usize] += 1;
        }
        let mut genus = 0usize;
        for c in 0..graph_k {
            let chi = v_of[c] as i64 - e_of[c] as i64 + f_of[c] as i64;
            let two_g = 2 - chi;
            assert!(two_g >= 0 && two_g % 2 == 0, "bad Euler characteristic {chi}");
            genus += (two_g / 2) as usize;
        }
        for g in &self.merges {
            genus += g.len() - 1;
        }
        let traced: usize = self.faces.len() + 2 * self.free_loops as usize;
        let f = if k == 0 { 1 } else { traced - (k - 1) };
        let f_effective = f - self.merges.iter().map(|g| g.len() - 1).sum::<usize>();
        let census = Census {
            n,
            f,
            f_effective,
            e,
            k,
            m,
            genus,
            admissible: f_effective == n,
        };
        // Euler identity for planar split diagrams
        let all_planar = (0..graph_k)
            .all(|c| v_of[c] as i64 - e_of[c] as i64 + f_of[c] as i64 == 2);
        if all_planar && self.merges.is_empty() && k > 0 {
            assert_eq!(
                census.f as i64 - n as i64,
                k as i64 - m as i64 + 1,
                "face/crossing census identity violated"
            );
        }
        census
    }

    // --- surgery ------------------------------------------------------------

    pub fn merge_regions(&self, groups: &[Vec<String>]) -> Result<DiagramMap> {
        let mut new_merges = self.merges.clone();
        for g in groups {
            if g.len() < 2 {
                return Err(err("merge set must contain at least two faces"));
            }
            let mut idxs: Vec<u32> = Vec::new();
            for name in g {
                idxs.push(self.parse_face_name(name)? as u32);
            }
            idxs.sort();
            idxs.dedup();
            if idxs.len() != g.len() {
                return Err(err("merge set contains a repeated face"));
            }
            new_merges.push(idxs);
        }
        let mut seen = BTreeSet::new();
        for g in &new_merges {
            for f in g {
                if !seen.insert(*f) {
                    return Err(err(format!("face f{f} appears in two merge sets")));
                }
            }
        }
        new_merges.sort();
        let mut out = self.clone();
        out.merges = new_merges;
        Ok(out)
    }

    fn require_unmerged(&self, op: &str) -> Result<()> {
        if self.merges.is_empty() {
            Ok(())
        } else {
            Err(err(format!("{op} is not defined on diagrams with merged regions")))
        }
    }

    fn crossing_index(&self, name: &str) -> Result<u32> {
        let v = self
            .vertex_index(name)
            .ok_or_else(|| err(format!("unknown crossing {name:?}")))?;
        match self.verts[v as usize].kind {
            VertKind::Crossing { .. } => Ok(v),
            VertKind::End { .. } => Err(err(format!("{name:?} is an endpoint, not a crossing"))),
        }
    }

    pub fn to_parts(&self) -> Parts {
        let mut parts = Parts { free_loops: self.free_loops, ..Default::default() };
        for v in &self.verts {
            match &v.kind {
                VertKind::Crossing { over_in_slot } => {
                    parts.crossings.push((v.name.clone(), *over_in_slot))
                }
                VertKind::End { kind } => parts.endpoints.push((v.name.clone(), *kind)),
            }
        }
        for (f, t) in &self.edges {
            parts.edges.push((
                (self.vertex_name(f.v).to_string(), f.s),
                (self.vertex_name(t.v).to_string(), t.s),
            ));
        }
        parts
    }

    /// Slot renaming used when a crossing's over/under roles are swapped:
    /// the old over-in becomes the new under-in (slot 0), rotation preserved.
    pub fn switch_slot_map(positive: bool, s: Slot) -> Slot {
        if positive {
            (s + 1) % 4
        } else {
            (s + 3) % 4
        }
    }

    /// Slot renaming under strand reversal (under-out becomes under-in).
    pub fn reverse_slot_map(s: Slot) -> Slot {
        (s + 2) % 4
    }

    /// Slot renaming under reflection combined with a crossing switch
    /// (the composite preserves signs).
    pub fn reflect_mirror_slot_map(positive: bool, s: Slot) -> Slot {
        if positive {
            (7 - s) % 4 // 0↔3, 1↔2
        } else {
            (5 - s) % 4 // 0↔1, 2↔3
        }
    }

    /// Corner renaming matching `reflect_mirror_slot_map`. A reflection acts
    /// on the sectors between ports, not on the ports themselves, so the two
    /// maps differ: corner s sits between ports s-1 and s.
    pub fn reflect_mirror_corner_map(positive: bool, s: Slot) -> Slot {
        if positive {
            (4 - s) % 4 // 1↔3
        } else {
            (6 - s) % 4 // 0↔2
        }
    }

    fn rename_ports(&self, rename: impl Fn(u32, Slot) -> Slot, flip_edges: bool) -> Parts {
        let mut parts = self.to_parts();
        let lookup: BTreeMap<String, u32> = self
            .verts
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.clone(), i as u32))
            .collect();
        for ((fv, fs), (tv, ts)) in parts.edges.iter_mut() {
            *fs = rename(lookup[fv.as_str()], *fs);
            *ts = rename(lookup[tv.as_str()], *ts);
            if flip_edges {
                std::mem::swap(fv, tv);
                std::mem::swap(fs, ts);
            }
        }
        parts
    }

    /// Swaps the over/under roles at one crossing; sign flips.
    pub fn switch_crossing(&self, name: &str) -> Result<DiagramMap> {
        self.require_unmerged("switch_crossing")?;
        let c = self.crossing_index(name)?;
        let positive = self.sign(c) == Some(1);
        let mut parts = self.rename_ports(
            |v, s| if v == c { Self::switch_slot_map(positive, s) } else { s },
            false,
        );
        for (id, over) in parts.crossings.iter_mut() {
            if id == name {
                *over = *over ^ 2;
            }
        }
        DiagramMap::build(parts)
    }

    /// Switches every crossing (the mirror image).
    pub fn mirror(&self) -> Result<DiagramMap> {
        self.require_unmerged("mirror")?;
        let mut parts = self.rename_ports(
            |v, s| match self.sign(v) {
                Some(sg) => Self::switch_slot_map(sg == 1, s),
                None => s,
            },
            false,
        );
        for (_, over) in parts.crossings.iter_mut() {
            *over ^= 2;
        }
        DiagramMap::build(parts)
    }

    /// Reverses the orientation of every strand; signs are preserved.
    pub fn reverse(&self) -> Result<DiagramMap> {
        self.require_unmerged("reverse")?;
        let mut parts = self.rename_ports(
            |v, s| match self.verts[v as usize].kind {
                VertKind::Crossing { .. } => Self::reverse_slot_map(s),
                VertKind::End { .. } => s,
            },
            true,
        );
        for (_, kind) in parts.endpoints.iter_mut() {
            *kind = match kind {
                EndpointKind::Tail => EndpointKind::Head,
                EndpointKind::Head => EndpointKind::Tail,
            };
        }
        DiagramMap::build(parts)
    }

    /// Reflection through a line followed by switching every crossing:
    /// rotation order reverses at each vertex, signs are preserved.
    pub fn reflect_mirror(&self) -> Result<DiagramMap> {
        self.require_unmerged("reflect_mirror")?;
        let parts = self.rename_ports(
            |v, s| match self.sign(v) {
                Some(sg) => Self::reflect_mirror_slot_map(sg == 1, s),
                None => s,
            },
            false,
        );
        DiagramMap::build(parts)
    }

    /// Oriented-smoothing splices, as (incoming slot → outgoing slot) pairs.
    pub fn smoothing_splices(positive: bool) -> [(Slot, Slot); 2] {
        if positive {
            [(0, 1), (3, 2)]
        } else {
            [(0, 3), (1, 2)]
        }
    }

    /// Removes a crossing by the oriented smoothing, reconnecting strands.
    /// A resulting component with no vertices becomes a free loop.
    pub fn smooth_crossing(&self, name: &str) -> Result<DiagramMap> {
        self.require_unmerged("smooth_crossing")?;
        let c = self.crossing_index(name)?;
        let positive = self.sign(c) == Some(1);
        let splice = Self::smoothing_splices(positive);
        let out_of = |in_slot: Slot| -> Slot {
            splice.iter().find(|(a, _)| *a == in_slot).unwrap().1
        };
        let mut parts = Parts { free_loops: self.free_loops, ..Default::default() };
        for v in &self.verts {
            if v.name != self.verts[c as usize].name {
                match &v.kind {
                    VertKind::Crossing { over_in_slot } => {
                        parts.crossings.push((v.name.clone(), *over_in_slot))
                    }
                    VertKind::End { kind } => parts.endpoints.push((v.name.clone(), *kind)),
                }
            }
        }
        // edges not touching c survive; strands through c are chased across
        // the splices until they reattach (or close up into a free loop)
        for (f, t) in &self.edges {
            if f.v != c && t.v != c {
                parts.edges.push((
                    (self.vertex_name(f.v).to_string(), f.s),
                    (self.vertex_name(t.v).to_string(), t.s),
                ));
            }
        }
        let in_slots: [Slot; 2] = [splice[0].0, splice[1].0];
        let mut visited_in: BTreeSet<Slot> = BTreeSet::new();
        for a in in_slots {
            let feeder = self.pair(Port { v: c, s: a });
            if feeder.v == c {
                continue; // fed internally; handled in the loop-count pass
            }
            let mut slot_in = a;
            let target = loop {
                visited_in.insert(slot_in);
                let q = self.pair(Port { v: c, s: out_of(slot_in) });
                if q.v != c {
                    break q;
                }
                slot_in = q.s;
            };
            parts.edges.push((
                (self.vertex_name(feeder.v).to_string(), feeder.s),
                (self.vertex_name(target.v).to_string(), target.s),
            ));
        }
        for a in in_slots {
            if visited_in.contains(&a) || self.pair(Port { v: c, s: a }).v != c {
                continue;
            }
            // internal cycle: a strand entirely through c closes up
            let mut slot_in = a;
            loop {
                visited_in.insert(slot_in);
                let q = self.pair(Port { v: c, s: out_of(slot_in) });
                debug_assert_eq!(q.v, c);
                slot_in = q.s;
                if slot_in == a {
                    break;
                }
            }
            parts.free_loops += 1;
        }
        DiagramMap::build(parts)
    }

    /// Like [`detect_separating`](Self::detect_separating), but for the
    /// oriented smoothing only. Returns (disconnects, some part endpoint-free).
    pub fn oriented_smoothing_separates(&self, name: &str) -> Result<(bool, bool)> {
        let c = self.crossing_index(name)?;
        let pairs = if self.sign(c) == Some(1) { [(0u8, 1u8), (2, 3)] } else { [(0, 3), (1, 2)] };
        let (num_parts, endpoint_free) = self.resolution_parts(c, pairs);
        Ok((num_parts >= 2, num_parts >= 2 && endpoint_free))
    }

    /// Tests whether either resolution of the crossing disconnects the
    /// universe; `nugatory` additionally requires a disconnected part with
    /// no endpoints (a sublink pinched off at the crossing).
    pub fn detect_separating(&self, name: &str) -> Result<Separation> {
        let c = self.crossing_index(name)?;
        let mut separating = false;
        let mut nugatory = false;
        for pairs in [[(0u8, 1u8), (2, 3)], [(0, 3), (1, 2)]] {
            let (num_parts, endpoint_free_part) = self.resolution_parts(c, pairs);
            if num_parts >= 2 {
                separating = true;
                if endpoint_free_part {
                    nugatory = true;
                }
            }
        }
        Ok(Separation { separating, nugatory })
    }

    // Connectivity of the universe after replacing crossing c with two
    // corridors joining the given undirected slot pairs. The corridors are
    // modeled as graph nodes, so a circle made only of corridors and
    // self-edges still counts as a part.
    fn resolution_parts(&self, c: u32, pairs: [(Slot, Slot); 2]) -> (usize, bool) {
        let nv = self.verts.len();
        let mut dsu: Vec<u32> = (0..nv as u32 + 2).collect();
        fn find(dsu: &mut [u32], x: u32) -> u32 {
            let mut r = x;
            while dsu[r as usize] != r {
                r = dsu[r as usize];
            }
            let mut cur = x;
            while dsu[cur as usize] != r {
                let next = dsu[cur as usize];
                dsu[cur as usize] = r;
                cur = next;
            }
            r
        }
        let corridor = |s: Slot| -> u32 {
            if pairs[0].0 == s || pairs[0].1 == s {
                nv as u32
            } else {
                nv as u32 + 1
            }
        };
        for (f, t) in &self.edges {
            let a = if f.v == c { corridor(f.s) } else { f.v };
            let b = if t.v == c { corridor(t.s) } else { t.v };
            let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
            dsu[ra as usize] = rb;
        }
        let mut roots: BTreeSet<u32> = BTreeSet::new();
        let mut endpoint_roots: BTreeSet<u32> = BTreeSet::new();
        for v in 0..nv as u32 + 2 {
            if v == c {
                continue;
            }
            let r = find(&mut dsu, v);
            roots.insert(r);
            if v < nv as u32 && matches!(self.verts[v as usize].kind, VertKind::End { .. }) {
                endpoint_roots.insert(r);
            }
        }
        let num_parts = roots.len() + self.free_loops as usize;
        let endpoint_free = self.free_loops > 0 || roots.len() != endpoint_roots.len();
        (num_parts, num_parts >= 2 && endpoint_free)
    }

    // --- serialization -------------------------------------------------------

    pub fn parse_str(doc: &str) -> Result<Document> {
        let raw: DocRaw = serde_json::from_str(doc).map_err(|e| err(format!("bad document: {e}")))?;
        let mut parts = Parts { free_loops: raw.free_loops, ..Default::default() };
        for cr in raw.crossings {
            parts.crossings.push((cr.id, cr.over_in_slot));
        }
        for ep in raw.endpoints {
            parts.endpoints.push((ep.id, ep.kind));
        }
        for e in raw.edges {
            parts.edges.push(((e.from.0, e.from.1), (e.to.0, e.to.1)));
        }
        let mut map = DiagramMap::build(parts)?;
        if !raw.merges.is_empty() {
            map = map.merge_regions(&raw.merges)?;
        }
        Ok(Document { map, stars: raw.stars })
    }

    pub fn to_json(&self, stars: Option<&StarsSpec>) -> serde_json::Value {
        let mut doc = serde_json::Map::new();
        let crossings: Vec<_> = self
            .verts
            .iter()
            .filter_map(|v| match v.kind {
                VertKind::Crossing { over_in_slot } => {
                    Some(json!({"id": v.name, "over_in_slot": over_in_slot}))
                }
                _ => None,
            })
            .collect();
        let endpoints: Vec<_> = self
            .verts
            .iter()
            .filter_map(|v| match v.kind {
                VertKind::End { kind } => Some(json!({"id": v.name, "kind": kind})),
                _ => None,
            })
            .collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|(f, t)| {
                json!({"from": [self.vertex_name(f.v), f.s], "to": [self.vertex_name(t.v), t.s]})
            })
            .collect();
        doc.insert("crossings".into(), crossings.into());
        doc.insert("endpoints".into(), endpoints.into());
        doc.insert("edges".into(), edges.into());
        if !self.merges.is_empty() {
            let merges: Vec<Vec<String>> = self
                .merges
                .iter()
                .map(|g| g.iter().map(|f| Self::face_name(*f as usize)).collect())
                .collect();
            doc.insert("merges".into(), json!(merges));
        }
        if self.free_loops > 0 {
            doc.insert("free_loops".into(), json!(self.free_loops));
        }
        if let Some(stars) = stars {
            doc.insert("stars".into(), serde_json::to_value(stars).unwrap());
        }
        serde_json::Value::Object(doc)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DocRaw {
    #[serde(default)]
    crossings: Vec<CrossRaw>,
    #[serde(default)]
    endpoints: Vec<EndRaw>,
    #[serde(default)]
    edges: Vec<EdgeRaw>,
    #[serde(default)]
    merges: Vec<Vec<String>>,
    #[serde(default)]
    free_loops: u32,
    #[serde(default)]
    stars: Option<StarsSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CrossRaw {
    id: String,
    over_in_slot: u8,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EndRaw {
    id: String,
    kind: EndpointKind,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRaw {
    from: (String, u8),
    to: (String, u8),
}
