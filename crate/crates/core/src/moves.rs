//! Reidemeister rewriting that respects star decorations.
//!
//! Site legality is decided by the local pattern plus three global guards:
//! a rewrite must keep the embedding surface, must not close off a
//! crossing-free loop, and the star transport must be unambiguous. A site
//! that would tear a starred region apart, fuse two starred regions, or
//! erase a star is rejected rather than resolved heuristically.

use crate::diagram::{DiagramMap, Parts, Port, Slot};
use crate::stars::StarredDiagram;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

fn err(msg: impl std::fmt::Display) -> Error {
    Error::Move(msg.to_string())
}

/// One rewrite site. Edge and face numbers refer to the canonical order of
/// the diagram the site was enumerated on, so a serialized trace replays
/// exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", deny_unknown_fields)]
pub enum MoveSite {
    /// Curl a kink into an edge. `lobe_slot` is the corner of the new
    /// crossing that becomes a one-sided face: slots 1/3 make the crossing
    /// positive, 0/2 negative; the two slots of a sign curl to opposite
    /// sides of the edge.
    #[serde(rename = "r1+")]
    R1Plus { edge: usize, lobe_slot: Slot },
    /// Remove the kink at a crossing with a one-sided face.
    #[serde(rename = "r1-")]
    R1Minus { crossing: String },
    /// Push one edge over another through a shared region (or between split
    /// components). `first_over_in` fixes the sign of the crossing met first
    /// along the over-edge; `under_meets_first` says the under-edge reaches
    /// that same crossing first.
    #[serde(rename = "r2+")]
    R2Plus { over_edge: usize, under_edge: usize, first_over_in: Slot, under_meets_first: bool },
    /// Pull apart a two-sided face whose strands are layered (one passes
    /// over at both of its crossings).
    #[serde(rename = "r2-")]
    R2Minus { face: usize },
    /// Slide a strand across the opposite crossing of a three-sided face;
    /// legal when one strand passes over both others.
    #[serde(rename = "r3")]
    R3 { face: usize },
}

/// Applies a rewrite to a bare map; stars are not consulted (see
/// [`apply_move`] for the decorated version).
pub fn map_apply(map: &DiagramMap, site: &MoveSite) -> Result<DiagramMap> {
    if !map.merges().is_empty() {
        return Err(err("rewrites are not defined on diagrams with merged regions"));
    }
    let before = map.census();
    let new_map = match site {
        MoveSite::R1Plus { edge, lobe_slot } => r1_plus(map, *edge, *lobe_slot)?,
        MoveSite::R1Minus { crossing } => r1_minus(map, crossing)?,
        MoveSite::R2Plus { over_edge, under_edge, first_over_in, under_meets_first } => {
            r2_plus(map, *over_edge, *under_edge, *first_over_in, *under_meets_first)?
        }
        MoveSite::R2Minus { face } => r2_minus(map, *face)?,
        MoveSite::R3 { face } => r3(map, *face)?,
    };
    let after = new_map.census();
    if after.genus != before.genus {
        return Err(err("rewrite does not preserve the embedding surface"));
    }
    debug_assert_eq!(after.m, before.m);
    debug_assert_eq!(new_map.free_loops(), map.free_loops());
    Ok(new_map)
}

/// Applies a rewrite to a starred diagram, transporting the stars. The site
/// must not touch a starred crossing, and every starred region must come
/// through the surgery unambiguously.
pub fn apply_move(sd: &StarredDiagram, site: &MoveSite) -> Result<StarredDiagram> {
    let map = sd.map();
    let removed: BTreeSet<String> = match site {
        MoveSite::R1Minus { crossing } => BTreeSet::from([crossing.clone()]),
        MoveSite::R2Minus { face } if *face < map.num_faces() => map
            .face_ports(*face)
            .iter()
            .map(|p| map.vertex_name(p.v).to_string())
            .collect(),
        _ => BTreeSet::new(),
    };
    for name in &removed {
        if let Some(v) = map.vertex_index(name) {
            if sd.starred_crossings().any(|c| c == v) {
                return Err(err(format!("move site touches the starred crossing {name}")));
            }
        }
    }
    let new_map = map_apply(map, site)?;
    let out = sd
        .transported(new_map, |v, s| {
            if removed.contains(v) {
                None
            } else {
                Some((v.to_string(), s))
            }
        })
        .map_err(|e| err(format!("stars block this site: {e}")))?;
    debug_assert_eq!(out.starred_regions().count(), sd.starred_regions().count());
    debug_assert_eq!(out.starred_crossings().count(), sd.starred_crossings().count());
    Ok(out)
}

/// Every site that legally rewrites this starred diagram, in a stable order.
pub fn legal_sites(sd: &StarredDiagram) -> Vec<MoveSite> {
    pattern_sites(sd.map())
        .into_iter()
        .filter(|site| apply_move(sd, site).is_ok())
        .collect()
}

/// Local-pattern candidates: shrink and slide sites from the face census,
/// then kinks on every edge, then pokes across shared regions.
fn pattern_sites(map: &DiagramMap) -> Vec<MoveSite> {
    let mut sites = Vec::new();
    for f in 0..map.num_faces() {
        let ps = map.face_ports(f);
        match ps.len() {
            1 => {
                if map.sign(ps[0].v).is_some() {
                    sites.push(MoveSite::R1Minus {
                        crossing: map.vertex_name(ps[0].v).to_string(),
                    });
                }
            }
            2 => {
                let (u, w) = (ps[0], ps[1]);
                if u.v != w.v
                    && map.sign(u.v).is_some()
                    && map.sign(w.v).is_some()
                    && (u.s + w.s) % 2 == 1
                {
                    sites.push(MoveSite::R2Minus { face: f });
                }
            }
            3 => {
                let distinct: BTreeSet<u32> = ps.iter().map(|p| p.v).collect();
                if distinct.len() == 3
                    && ps.iter().all(|p| map.sign(p.v).is_some())
                    && over_over_sides(map, ps) == 1
                {
                    sites.push(MoveSite::R3 { face: f });
                }
            }
            _ => {}
        }
    }
    for e in 0..map.num_edges() {
        for lobe_slot in 0..4u8 {
            sites.push(MoveSite::R1Plus { edge: e, lobe_slot });
        }
    }
    let comp = edge_components(map);
    let coface = coface_pairs(map);
    for i in 0..map.num_edges() {
        for j in 0..map.num_edges() {
            if i == j {
                continue;
            }
            let shared = coface.contains(&(i.min(j), i.max(j))) || comp[i] != comp[j];
            if !shared {
                continue;
            }
            for first_over_in in [3u8, 1] {
                for under_meets_first in [true, false] {
                    sites.push(MoveSite::R2Plus {
                        over_edge: i,
                        under_edge: j,
                        first_over_in,
                        under_meets_first,
                    });
                }
            }
        }
    }
    sites
}

// Sides of a three-sided face whose two ports both lie on over-strands
// (odd slots). Exactly one such side means one strand crosses over both
// others, the movable pattern.
fn over_over_sides(map: &DiagramMap, ps: &[Port]) -> usize {
    (0..ps.len())
        .filter(|&i| {
            let q = map.pair(ps[i]);
            ps[i].s % 2 == 1 && q.s % 2 == 1
        })
        .count()
}

fn edge_components(map: &DiagramMap) -> Vec<u32> {
    let comp = map.vertex_components();
    map.edge_refs()
        .iter()
        .map(|((fv, _), _)| comp[map.vertex_index(fv).unwrap() as usize])
        .collect()
}

// Unordered edge pairs bordering a common face.
fn coface_pairs(map: &DiagramMap) -> BTreeSet<(usize, usize)> {
    let mut port_edge: BTreeMap<Port, usize> = BTreeMap::new();
    for (i, ((fv, fs), (tv, ts))) in map.edge_refs().into_iter().enumerate() {
        port_edge.insert(Port { v: map.vertex_index(&fv).unwrap(), s: fs }, i);
        port_edge.insert(Port { v: map.vertex_index(&tv).unwrap(), s: ts }, i);
    }
    let mut pairs = BTreeSet::new();
    for f in 0..map.num_faces() {
        let es: BTreeSet<usize> = map.face_ports(f).iter().map(|p| port_edge[p]).collect();
        for &i in &es {
            for &j in &es {
                if i < j {
                    pairs.insert((i, j));
                }
            }
        }
    }
    pairs
}

fn fresh_names(map: &DiagramMap, base: &str, k: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 1usize;
    while out.len() < k {
        let cand = format!("{base}{i}");
        if map.vertex_index(&cand).is_none() {
            out.push(cand);
        }
        i += 1;
    }
    out
}

// Kink wiring per lobe slot: the new crossing's over-in slot, the petal
// edge (out slot → in slot), and the slots where the split edge reattaches.
fn r1_table(lobe_slot: Slot) -> Result<(Slot, (Slot, Slot), Slot, Slot)> {
    Ok(match lobe_slot {
        1 => (3, (1, 0), 3, 2),
        3 => (3, (2, 3), 0, 1),
        0 => (1, (3, 0), 1, 2),
        2 => (1, (2, 1), 0, 3),
        _ => return Err(err(format!("lobe slot {lobe_slot} out of range"))),
    })
}

fn r1_plus(map: &DiagramMap, edge: usize, lobe_slot: Slot) -> Result<DiagramMap> {
    let edges = map.edge_refs();
    let (src, tgt) = edges
        .get(edge)
        .cloned()
        .ok_or_else(|| err(format!("edge {edge} out of range")))?;
    let (over_in, petal, in_main, out_main) = r1_table(lobe_slot)?;
    let c = fresh_names(map, "k", 1).remove(0);
    let mut parts = map.to_parts();
    parts.edges.remove(edge);
    parts.crossings.push((c.clone(), over_in));
    parts.edges.push((src, (c.clone(), in_main)));
    parts.edges.push(((c.clone(), petal.0), (c.clone(), petal.1)));
    parts.edges.push(((c, out_main), tgt));
    DiagramMap::build(parts)
}

fn r1_minus(map: &DiagramMap, crossing: &str) -> Result<DiagramMap> {
    let v = map
        .vertex_index(crossing)
        .filter(|v| map.sign(*v).is_some())
        .ok_or_else(|| err(format!("unknown crossing {crossing:?}")))?;
    let has_lobe = (0..map.num_faces()).any(|f| {
        let ps = map.face_ports(f);
        ps.len() == 1 && ps[0].v == v
    });
    if !has_lobe {
        return Err(err(format!("crossing {crossing} carries no kink")));
    }
    let parts = excise(map, &BTreeSet::from([v]))?;
    DiagramMap::build(parts)
}

fn r2_plus(
    map: &DiagramMap,
    over_edge: usize,
    under_edge: usize,
    first_over_in: Slot,
    under_meets_first: bool,
) -> Result<DiagramMap> {
    if over_edge == under_edge {
        return Err(err("poked edges must be distinct"));
    }
    if first_over_in != 1 && first_over_in != 3 {
        return Err(err("first_over_in must be 1 or 3"));
    }
    let edges = map.edge_refs();
    let get = |i: usize| {
        edges.get(i).cloned().ok_or_else(|| err(format!("edge {i} out of range")))
    };
    let (a_src, a_tgt) = get(over_edge)?;
    let (b_src, b_tgt) = get(under_edge)?;
    let mut names = fresh_names(map, "p", 2);
    let d = names.pop().unwrap();
    let c = names.pop().unwrap();
    let (oc, od) = (first_over_in, first_over_in ^ 2);
    let mut parts = map.to_parts();
    parts.edges.remove(over_edge.max(under_edge));
    parts.edges.remove(over_edge.min(under_edge));
    parts.crossings.push((c.clone(), oc));
    parts.crossings.push((d.clone(), od));
    parts.edges.push((a_src, (c.clone(), oc)));
    parts.edges.push(((c.clone(), oc ^ 2), (d.clone(), od)));
    parts.edges.push(((d.clone(), od ^ 2), a_tgt));
    let (u1, u2) = if under_meets_first { (c, d) } else { (d, c) };
    parts.edges.push((b_src, (u1.clone(), 0)));
    parts.edges.push(((u1, 2), (u2.clone(), 0)));
    parts.edges.push(((u2, 2), b_tgt));
    DiagramMap::build(parts)
}

fn r2_minus(map: &DiagramMap, face: usize) -> Result<DiagramMap> {
    if face >= map.num_faces() {
        return Err(err(format!("face f{face} does not exist")));
    }
    let ps = map.face_ports(face);
    if ps.len() != 2 {
        return Err(err(format!("face f{face} is not two-sided")));
    }
    let (u, w) = (ps[0], ps[1]);
    if u.v == w.v || map.sign(u.v).is_none() || map.sign(w.v).is_none() {
        return Err(err("two-sided face must join two distinct crossings"));
    }
    if (u.s + w.s) % 2 == 0 {
        return Err(err("strands through the two-sided face are clasped, not layered"));
    }
    debug_assert_ne!(map.sign(u.v), map.sign(w.v));
    let parts = excise(map, &BTreeSet::from([u.v, w.v]))?;
    DiagramMap::build(parts)
}

fn r3(map: &DiagramMap, face: usize) -> Result<DiagramMap> {
    if face >= map.num_faces() {
        return Err(err(format!("face f{face} does not exist")));
    }
    let ps = map.face_ports(face).to_vec();
    if ps.len() != 3 {
        return Err(err(format!("face f{face} is not three-sided")));
    }
    let distinct: BTreeSet<u32> = ps.iter().map(|p| p.v).collect();
    if distinct.len() != 3 || ps.iter().any(|p| map.sign(p.v).is_none()) {
        return Err(err("three-sided face must visit three distinct crossings"));
    }
    if over_over_sides(map, &ps) != 1 {
        return Err(err("no strand passes over both others at this face"));
    }
    // Each side is a segment of one strand between two of the crossings.
    // Sliding the triangle across swaps, for every strand, which crossing
    // hosts its entry and which its exit; slots are preserved because each
    // crossing keeps its local picture.
    let mut swap: BTreeMap<(String, Slot), (String, Slot)> = BTreeMap::new();
    for i in 0..3 {
        let p = ps[i];
        let q = map.pair(p);
        debug_assert_eq!(Port { v: q.v, s: (q.s + 1) % 4 }, ps[(i + 1) % 3]);
        let (pv, qv) = (map.vertex_name(p.v).to_string(), map.vertex_name(q.v).to_string());
        for (x, y) in [(p.s, (q.s + 2) % 4), ((p.s + 2) % 4, q.s)] {
            swap.insert((pv.clone(), x), (qv.clone(), y));
            swap.insert((qv.clone(), y), (pv.clone(), x));
        }
    }
    let mut parts = map.to_parts();
    for (f, t) in parts.edges.iter_mut() {
        for end in [&mut *f, &mut *t] {
            if let Some(new_end) = swap.get(&(end.0.clone(), end.1)) {
                *end = new_end.clone();
            }
        }
    }
    DiagramMap::build(parts)
}

// Removes a set of crossings, splicing each strand straight through (a
// strand entering slot s leaves at s+2). A strand that closes up entirely
// inside the removed set would become a crossing-free loop; that is an
// error here because no rewrite may create one.
fn excise(map: &DiagramMap, removed: &BTreeSet<u32>) -> Result<Parts> {
    let mut parts = Parts { free_loops: map.free_loops(), ..Default::default() };
    for v in map.crossing_indices() {
        if !removed.contains(&v) {
            parts
                .crossings
                .push((map.vertex_name(v).to_string(), map.over_in_slot(v).unwrap()));
        }
    }
    for (name, kind) in map.endpoint_names() {
        parts.endpoints.push((name.to_string(), kind));
    }
    for ((fv, fs), (tv, ts)) in map.edge_refs() {
        let fi = map.vertex_index(&fv).unwrap();
        let ti = map.vertex_index(&tv).unwrap();
        if !removed.contains(&fi) && !removed.contains(&ti) {
            parts.edges.push(((fv, fs), (tv, ts)));
        }
    }
    let mut visited: BTreeSet<Port> = BTreeSet::new();
    for &r in removed {
        for s in 0..4u8 {
            let p = Port { v: r, s };
            if map.is_port_out(p) {
                continue;
            }
            let feeder = map.pair(p);
            if removed.contains(&feeder.v) {
                continue;
            }
            let mut cur = p;
            let target = loop {
                visited.insert(cur);
                let q = map.pair(Port { v: cur.v, s: (cur.s + 2) % 4 });
                if !removed.contains(&q.v) {
                    break q;
                }
                cur = q;
            };
            parts.edges.push((
                (map.vertex_name(feeder.v).to_string(), feeder.s),
                (map.vertex_name(target.v).to_string(), target.s),
            ));
        }
    }
    for &r in removed {
        for s in 0..4u8 {
            let p = Port { v: r, s };
            if !map.is_port_out(p) && !visited.contains(&p) {
                return Err(err("removal closes off a crossing-free loop"));
            }
        }
    }
    Ok(parts)
}

/// Pokes that join a split pair of open pieces into one connected diagram,
/// in a stable order (over-edge, under-edge, sign, side).
pub fn connect_sites(map: &DiagramMap) -> Result<Vec<MoveSite>> {
    if map.free_loops() > 0
        || map.num_circular_components() > 0
        || map.num_long_components() != 2
        || map.num_components() != 2
    {
        return Err(err("connecting poke requires exactly two split open pieces"));
    }
    let comp = edge_components(map);
    let mut sites = Vec::new();
    for i in 0..map.num_edges() {
        for j in 0..map.num_edges() {
            if comp[i] == comp[j] {
                continue;
            }
            for first_over_in in [3u8, 1] {
                for under_meets_first in [true, false] {
                    let site = MoveSite::R2Plus {
                        over_edge: i,
                        under_edge: j,
                        first_over_in,
                        under_meets_first,
                    };
                    if map_apply(map, &site).is_ok() {
                        sites.push(site);
                    }
                }
            }
        }
    }
    Ok(sites)
}

/// Joins a split two-piece linkoid at the first legal poke site. Any choice
/// yields the same invariants, so the first site is the canonical one.
pub fn connect_r2(map: &DiagramMap) -> Result<(DiagramMap, MoveSite)> {
    let sites = connect_sites(map)?;
    let site = sites.into_iter().next().ok_or_else(|| err("no legal connecting poke"))?;
    let out = map_apply(map, &site)?;
    Ok((out, site))
}

/// Walks `steps` uniformly sampled legal rewrites. A step with no legal
/// site is recorded as `None` and skipped. Equal seeds replay equal traces.
pub fn random_equivalent(
    sd: &StarredDiagram,
    steps: usize,
    seed: u64,
) -> (StarredDiagram, Vec<Option<MoveSite>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = sd.clone();
    let mut trace = Vec::with_capacity(steps);
    for _ in 0..steps {
        let sites = legal_sites(&cur);
        if sites.is_empty() {
            trace.push(None);
            continue;
        }
        let site = sites[rng.gen_range(0..sites.len())].clone();
        cur = apply_move(&cur, &site).expect("enumerated site must apply");
        trace.push(Some(site));
    }
    (cur, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::StarsSpec;

    fn simple_knotoid() -> DiagramMap {
        DiagramMap::parse_str(
            r#"{
            "crossings":[{"id":"a","over_in_slot":3},{"id":"b","over_in_slot":3}],
            "endpoints":[{"id":"t","kind":"tail"},{"id":"h","kind":"head"}],
            "edges":[{"from":["t",0],"to":["a",0]},{"from":["a",2],"to":["b",3]},
                     {"from":["b",1],"to":["a",3]},{"from":["a",1],"to":["b",0]},
                     {"from":["b",2],"to":["h",0]}]}"#,
        )
        .unwrap()
        .map
    }

    fn trefoil() -> DiagramMap {
        let mut parts = Parts::default();
        for i in 1..=3 {
            parts.crossings.push((format!("t{i}"), 3));
        }
        for i in 1..=3u32 {
            let j = i % 3 + 1;
            parts.edges.push(((format!("t{i}"), 2), (format!("t{j}"), 3)));
            parts.edges.push(((format!("t{i}"), 1), (format!("t{j}"), 0)));
        }
        DiagramMap::build(parts).unwrap()
    }

    fn closed_kink() -> DiagramMap {
        DiagramMap::parse_str(
            r#"{"crossings":[{"id":"c","over_in_slot":3}],
                "edges":[{"from":["c",2],"to":["c",3]},{"from":["c",1],"to":["c",0]}]}"#,
        )
        .unwrap()
        .map
    }

    #[test]
    fn kink_curl_round_trips_on_every_variant() {
        let d = simple_knotoid();
        for lobe_slot in 0..4u8 {
            let site = MoveSite::R1Plus { edge: 0, lobe_slot };
            let kinked = map_apply(&d, &site).unwrap();
            assert_eq!(kinked.num_crossings(), 3);
            assert_eq!(kinked.census().genus, 0);
            let k = kinked.vertex_index("k1").unwrap();
            let want_sign = if lobe_slot % 2 == 1 { 1 } else { -1 };
            assert_eq!(kinked.sign(k), Some(want_sign));
            // the lobe is a one-sided face at the promised corner
            let lobe = (0..kinked.num_faces())
                .find(|&f| kinked.face_corners(f) == vec![("k1", lobe_slot)]);
            assert!(lobe.is_some(), "no lobe for slot {lobe_slot}");
            let back = map_apply(&kinked, &MoveSite::R1Minus { crossing: "k1".into() }).unwrap();
            assert_eq!(d.to_json(None), back.to_json(None));
        }
    }

    #[test]
    fn kink_round_trip_carries_the_star() {
        let sd = StarredDiagram::tail_starred(simple_knotoid()).unwrap();
        let site = MoveSite::R1Plus { edge: 0, lobe_slot: 1 };
        let kinked = apply_move(&sd, &site).unwrap();
        assert_eq!(kinked.starred_regions().count(), 1);
        let back = apply_move(&kinked, &MoveSite::R1Minus { crossing: "k1".into() }).unwrap();
        assert_eq!(sd.to_json(), back.to_json());
    }

    #[test]
    fn kink_removal_needs_the_pattern() {
        let msg = map_apply(&simple_knotoid(), &MoveSite::R1Minus { crossing: "a".into() })
            .err()
            .unwrap()
            .to_string();
        assert!(msg.contains("no kink"), "{msg}");
        // unkinking the closed figure-eight would leave a bare loop
        let msg = map_apply(&closed_kink(), &MoveSite::R1Minus { crossing: "c".into() })
            .err()
            .unwrap()
            .to_string();
        assert!(msg.contains("loop"), "{msg}");
    }

    #[test]
    fn poke_round_trips() {
        let sd = StarredDiagram::tail_starred(simple_knotoid()).unwrap();
        let sites = legal_sites(&sd);
        let poke = sites
            .iter()
            .find(|s| matches!(s, MoveSite::R2Plus { .. }))
            .expect("a legal poke exists");
        let poked = apply_move(&sd, poke).unwrap();
        assert_eq!(poked.map().num_crossings(), 4);
        assert_eq!(poked.map().census().genus, 0);
        let lens = (0..poked.map().num_faces())
            .find(|&f| {
                let cs = poked.map().face_corners(f);
                cs.len() == 2 && cs.iter().all(|(v, _)| *v == "p1" || *v == "p2")
            })
            .expect("poke leaves a two-sided face");
        let back = apply_move(&poked, &MoveSite::R2Minus { face: lens }).unwrap();
        assert_eq!(sd.to_json(), back.to_json());
    }

    #[test]
    fn clasps_do_not_pull_apart() {
        let clasp = DiagramMap::parse_str(
            r#"{
            "crossings":[{"id":"c","over_in_slot":3},{"id":"d","over_in_slot":3}],
            "endpoints":[{"id":"t1","kind":"tail"},{"id":"h1","kind":"head"},
                         {"id":"t2","kind":"tail"},{"id":"h2","kind":"head"}],
            "edges":[{"from":["t1",0],"to":["c",0]},{"from":["c",2],"to":["d",3]},
                     {"from":["d",1],"to":["h1",0]},{"from":["t2",0],"to":["d",0]},
                     {"from":["d",2],"to":["c",3]},{"from":["c",1],"to":["h2",0]}]}"#,
        )
        .unwrap()
        .map;
        let lens = (0..clasp.num_faces())
            .find(|&f| clasp.face_ports(f).len() == 2)
            .expect("the clasp has a two-sided face");
        assert_eq!(clasp.face_corners(lens), vec![("c", 3), ("d", 3)]);
        let msg = map_apply(&clasp, &MoveSite::R2Minus { face: lens }).err().unwrap().to_string();
        assert!(msg.contains("clasped"), "{msg}");
        assert!(!pattern_sites(&clasp).iter().any(|s| matches!(s, MoveSite::R2Minus { .. })));
    }

    #[test]
    fn plain_trefoil_has_no_slide() {
        assert!(!pattern_sites(&trefoil()).iter().any(|s| matches!(s, MoveSite::R3 { .. })));
    }

    #[test]
    fn slide_is_an_involution_on_a_poked_trefoil() {
        // a poke through a three-sided face leaves a movable triangle
        let d = trefoil();
        let poked = pattern_sites(&d)
            .into_iter()
            .filter(|s| matches!(s, MoveSite::R2Plus { .. }))
            .filter_map(|site| map_apply(&d, &site).ok())
            .find(|m| {
                pattern_sites(m).iter().any(|s| matches!(s, MoveSite::R3 { .. }))
            })
            .expect("some poke of the trefoil offers a slide");
        let slides: Vec<MoveSite> = pattern_sites(&poked)
            .into_iter()
            .filter(|s| matches!(s, MoveSite::R3 { .. }))
            .collect();
        let MoveSite::R3 { face } = slides[0] else { unreachable!() };
        let tri: BTreeSet<String> =
            poked.face_corners(face).iter().map(|(v, _)| v.to_string()).collect();
        let slid = map_apply(&poked, &slides[0]).unwrap();
        let c0 = poked.census();
        let c1 = slid.census();
        assert_eq!(c0, c1);
        // the flipped three-sided face joins the same crossings; sliding
        // back restores the diagram
        let back_face = (0..slid.num_faces())
            .find(|&f| {
                let cs = slid.face_corners(f);
                cs.len() == 3
                    && cs.iter().map(|(v, _)| v.to_string()).collect::<BTreeSet<_>>() == tri
                    && map_apply(&slid, &MoveSite::R3 { face: f }).is_ok()
            })
            .expect("the slid triangle is movable again");
        let back = map_apply(&slid, &MoveSite::R3 { face: back_face }).unwrap();
        assert_eq!(poked.to_json(None), back.to_json(None));
    }

    #[test]
    fn connecting_poke_makes_split_arcs_admissible() {
        let split = DiagramMap::parse_str(
            r#"{"endpoints":[{"id":"t1","kind":"tail"},{"id":"h1","kind":"head"},
                             {"id":"t2","kind":"tail"},{"id":"h2","kind":"head"}],
                "edges":[{"from":["t1",0],"to":["h1",0]},{"from":["t2",0],"to":["h2",0]}]}"#,
        )
        .unwrap()
        .map;
        assert!(!split.census().admissible);
        let (joined, _site) = connect_r2(&split).unwrap();
        let c = joined.census();
        assert_eq!((c.n, c.k, c.m, c.genus), (2, 1, 2, 0));
        assert!(c.admissible);
        // deterministic choice
        let (again, site2) = connect_r2(&split).unwrap();
        assert_eq!(joined.to_json(None), again.to_json(None));
        assert_eq!(_site, site2);
        // a connected input is rejected
        assert!(connect_r2(&simple_knotoid()).is_err());
    }

    #[test]
    fn stars_block_sites_that_would_move_them() {
        // poking edge 0 over edge 4 can only happen through the tail region
        let sd = StarredDiagram::tail_starred(simple_knotoid()).unwrap();
        let mut pattern_ok = false;
        for first_over_in in [3u8, 1] {
            for under_meets_first in [true, false] {
                let site = MoveSite::R2Plus {
                    over_edge: 0,
                    under_edge: 4,
                    first_over_in,
                    under_meets_first,
                };
                if map_apply(sd.map(), &site).is_ok() {
                    pattern_ok = true;
                    assert!(apply_move(&sd, &site).is_err());
                }
            }
        }
        assert!(pattern_ok, "some poke through the tail region is planar");
        assert!(!legal_sites(&sd).iter().any(|s| {
            matches!(s, MoveSite::R2Plus { over_edge: 0, under_edge: 4, .. })
        }));
    }

    #[test]
    fn starred_crossing_blocks_kink_removal() {
        // curl a kink into the trefoil, then star it as a crossing by
        // merging enough regions to balance the counts
        let kinked = map_apply(&trefoil(), &MoveSite::R1Plus { edge: 0, lobe_slot: 1 }).unwrap();
        assert_eq!(kinked.num_faces(), 6);
        let merged = kinked
            .merge_regions(&[vec!["f0".into(), "f1".into(), "f2".into(), "f3".into()]])
            .unwrap();
        let sd = StarredDiagram::make_starred(
            merged,
            Some(&StarsSpec::Crossings(vec!["k1".into()])),
        )
        .unwrap();
        let msg = apply_move(&sd, &MoveSite::R1Minus { crossing: "k1".into() })
            .err()
            .unwrap()
            .to_string();
        assert!(msg.contains("starred crossing"), "{msg}");
        // other rewrites are off the table entirely while regions are merged
        let msg = apply_move(&sd, &MoveSite::R1Plus { edge: 0, lobe_slot: 1 })
            .err()
            .unwrap()
            .to_string();
        assert!(msg.contains("merged"), "{msg}");
    }

    // The two-variable state sum itself moves by unit factors (WB)^k under
    // same-direction pokes; the B = 1/W specialization is the invariant.
    fn mock(sd: &StarredDiagram) -> crate::poly::LaurentPoly {
        use crate::poly::{Subst, Var};
        crate::statesum::potential(sd).substitute(&[(Var::B, Subst::inv(Var::W))])
    }

    #[test]
    fn walks_preserve_the_mock_polynomial() {
        let open = StarredDiagram::tail_starred(simple_knotoid()).unwrap();
        let closed = StarredDiagram::adjacent_pair_starred(trefoil(), None).unwrap();
        for sd in [open, closed] {
            let want = mock(&sd);
            for seed in [1u64, 2, 3] {
                let (walked, trace) = random_equivalent(&sd, 8, seed);
                assert_eq!(
                    want,
                    mock(&walked),
                    "trace {}",
                    serde_json::to_string(&trace).unwrap()
                );
            }
        }
    }

    #[test]
    fn walks_replay_deterministically() {
        let sd = StarredDiagram::tail_starred(simple_knotoid()).unwrap();
        let (zero, trace) = random_equivalent(&sd, 0, 5);
        assert_eq!(sd.to_json(), zero.to_json());
        assert!(trace.is_empty());
        let (d1, t1) = random_equivalent(&sd, 12, 7);
        let (d2, t2) = random_equivalent(&sd, 12, 7);
        assert_eq!(d1.to_json(), d2.to_json());
        assert_eq!(t1, t2);
        assert!(t1.iter().all(|s| s.is_some()));
        assert_eq!(d1.starred_regions().count(), 1);
        assert_eq!(d1.map().num_long_components(), 1);
        assert_eq!(d1.map().census().genus, 0);
        // traces serialize for replay
        let json = serde_json::to_string(&t1).unwrap();
        let back: Vec<Option<MoveSite>> = serde_json::from_str(&json).unwrap();
        assert_eq!(t1, back);
    }
}
