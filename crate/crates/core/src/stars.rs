//! Star decorations on diagram regions and crossings.
//!
//! A starred diagram carries stars on effective regions or on crossings
//! (never both), balanced so that unstarred regions and unstarred crossings
//! are equinumerous: (f_eff − r) = (n − c). Stars mark what the state sum
//! must not occupy.

use crate::diagram::{DiagramMap, EndpointKind, Slot, StarsSpec};
use crate::{Error, Result};
use std::collections::BTreeSet;

fn err(msg: impl std::fmt::Display) -> Error {
    Error::Stars(msg.to_string())
}

#[derive(Debug, Clone)]
pub struct StarredDiagram {
    map: DiagramMap,
    regions: Vec<Vec<u32>>,
    region_stars: BTreeSet<usize>,
    crossing_stars: BTreeSet<u32>,
}

impl StarredDiagram {
    pub fn make_starred(map: DiagramMap, stars: Option<&StarsSpec>) -> Result<StarredDiagram> {
        let regions = map.effective_regions();
        let mut region_stars = BTreeSet::new();
        let mut crossing_stars = BTreeSet::new();
        match stars {
            None => {}
            Some(StarsSpec::Regions(names)) => {
                for name in names {
                    let face = map.parse_face_name(name).map_err(|e| err(e))? as u32;
                    let region = regions
                        .iter()
                        .position(|g| g.contains(&face))
                        .expect("face not in any region");
                    if !region_stars.insert(region) {
                        return Err(err(format!(
                            "region of {name} is starred twice (one star per region)"
                        )));
                    }
                }
            }
            Some(StarsSpec::Crossings(names)) => {
                for name in names {
                    let v = map
                        .vertex_index(name)
                        .filter(|v| map.sign(*v).is_some())
                        .ok_or_else(|| err(format!("unknown crossing {name:?}")))?;
                    if !crossing_stars.insert(v) {
                        return Err(err(format!("crossing {name} is starred twice")));
                    }
                }
            }
        }
        if !region_stars.is_empty() && !crossing_stars.is_empty() {
            return Err(err("stars must lie on regions or on crossings, not both"));
        }
        let f_eff = regions.len();
        let n = map.num_crossings();
        let (r, c) = (region_stars.len(), crossing_stars.len());
        if r > f_eff || c > n || f_eff - r != n - c {
            return Err(err(format!(
                "unbalanced stars: {f_eff} regions minus {r} stars must equal \
                 {n} crossings minus {c} stars"
            )));
        }
        if map.free_loops() > 0 {
            return Err(err("diagram has closed components with no crossings"));
        }
        Ok(StarredDiagram { map, regions, region_stars, crossing_stars })
    }

    /// Stars the region containing the leg of the unique open component.
    pub fn tail_starred(map: DiagramMap) -> Result<StarredDiagram> {
        if map.num_long_components() != 1 || map.num_circular_components() > 0 {
            return Err(err("tail star requires exactly one open strand and no closed ones"));
        }
        let tail = map
            .endpoint_names()
            .iter()
            .find(|(_, k)| *k == EndpointKind::Tail)
            .map(|(n, _)| n.to_string())
            .unwrap();
        let face = map.face_of_corner(&tail, 0).unwrap();
        let spec = StarsSpec::Regions(vec![DiagramMap::face_name(face)]);
        Self::make_starred(map, Some(&spec))
    }

    /// Stars the two regions on either side of an edge (the classical
    /// Alexander normalization for closed diagrams). With no edge given,
    /// the first edge bordered by two distinct regions is used.
    pub fn adjacent_pair_starred(map: DiagramMap, edge: Option<usize>) -> Result<StarredDiagram> {
        if map.num_long_components() != 0 {
            return Err(err("adjacent-pair stars apply to closed diagrams only"));
        }
        let pick = |i: usize| -> Result<(usize, usize)> {
            let (a, b) = map.edge_sides(i);
            if a == b {
                return Err(err(format!("edge {i} has the same region on both sides")));
            }
            Ok((a, b))
        };
        let (a, b) = match edge {
            Some(i) => {
                if i >= map.num_edges() {
                    return Err(err(format!("edge {i} out of range")));
                }
                pick(i)?
            }
            None => (0..map.num_edges())
                .find_map(|i| pick(i).ok())
                .ok_or_else(|| err("no edge with two distinct regions"))?,
        };
        let spec = StarsSpec::Regions(vec![DiagramMap::face_name(a), DiagramMap::face_name(b)]);
        Self::make_starred(map, Some(&spec))
    }

    pub fn map(&self) -> &DiagramMap {
        &self.map
    }

    /// Effective regions (face-index groups), shared index space with
    /// `starred_regions` and `unstarred_regions`.
    pub fn regions(&self) -> &[Vec<u32>] {
        &self.regions
    }

    pub fn region_of_face(&self, face: u32) -> usize {
        self.regions.iter().position(|g| g.contains(&face)).expect("face not in any region")
    }

    pub fn starred_regions(&self) -> impl Iterator<Item = usize> + '_ {
        self.region_stars.iter().copied()
    }

    pub fn is_region_starred(&self, region: usize) -> bool {
        self.region_stars.contains(&region)
    }

    pub fn unstarred_regions(&self) -> Vec<usize> {
        (0..self.regions.len()).filter(|r| !self.region_stars.contains(r)).collect()
    }

    pub fn starred_crossings(&self) -> impl Iterator<Item = u32> + '_ {
        self.crossing_stars.iter().copied()
    }

    pub fn unstarred_crossings(&self) -> Vec<u32> {
        self.map
            .crossing_indices()
            .filter(|v| !self.crossing_stars.contains(v))
            .collect()
    }

    pub fn region_name(&self, region: usize) -> String {
        DiagramMap::face_name(self.regions[region][0] as usize)
    }

    pub fn stars_spec(&self) -> StarsSpec {
        if !self.crossing_stars.is_empty() {
            StarsSpec::Crossings(
                self.crossing_stars
                    .iter()
                    .map(|v| self.map.vertex_name(*v).to_string())
                    .collect(),
            )
        } else {
            StarsSpec::Regions(
                self.region_stars.iter().map(|r| self.region_name(*r)).collect(),
            )
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        self.map.to_json(Some(&self.stars_spec()))
    }

    /// Rebuilds the decoration on a surgered copy of the map. `relabel`
    /// sends old corners to new ones (None for corners that vanish); every
    /// starred region must keep at least one corner, and all survivors must
    /// land in a single new region.
    pub fn transported(
        &self,
        new_map: DiagramMap,
        relabel: impl Fn(&str, Slot) -> Option<(String, Slot)>,
    ) -> Result<StarredDiagram> {
        let new_regions = new_map.effective_regions();
        // Where each old region's surviving corners land. A star may ride a
        // region that fuses with whole neighbours, but not one a strand has
        // swept through — and a region with a single corner cannot witness
        // the sweep by its own corners, so the neighbours must: a target is
        // trusted only if every old region touching it landed there whole.
        let landing: Vec<BTreeSet<usize>> = self
            .regions
            .iter()
            .map(|faces| {
                let mut out = BTreeSet::new();
                for &face in faces {
                    for (v, s) in self.map.face_corners(face as usize) {
                        let Some((nv, ns)) = relabel(v, s) else { continue };
                        let Some(nf) = new_map.face_of_corner(&nv, ns) else { continue };
                        let nr = new_regions
                            .iter()
                            .position(|g| g.contains(&(nf as u32)))
                            .expect("face not in any region");
                        out.insert(nr);
                    }
                }
                out
            })
            .collect();
        let mut region_stars = BTreeSet::new();
        for &r in &self.region_stars {
            let mut target: Option<usize> = None;
            for &face in &self.regions[r] {
                for (v, s) in self.map.face_corners(face as usize) {
                    let Some((nv, ns)) = relabel(v, s) else { continue };
                    let nf = new_map.face_of_corner(&nv, ns).ok_or_else(|| {
                        err(format!("corner {nv}.{ns} does not exist after surgery"))
                    })? as u32;
                    let nr = new_regions
                        .iter()
                        .position(|g| g.contains(&nf))
                        .expect("face not in any region");
                    match target {
                        None => target = Some(nr),
                        Some(t) if t == nr => {}
                        Some(_) => {
                            return Err(err("starred region torn apart by surgery"));
                        }
                    }
                }
            }
            let t = target.ok_or_else(|| err("starred region vanished under surgery"))?;
            if landing.iter().any(|lands| lands.contains(&t) && lands.len() != 1) {
                return Err(err("surgery swept a strand across the starred region"));
            }
            if !region_stars.insert(t) {
                return Err(err("two starred regions fused by surgery"));
            }
        }
        let mut crossing_stars = BTreeSet::new();
        for &v in &self.crossing_stars {
            let name = self.map.vertex_name(v);
            let nv = new_map
                .vertex_index(name)
                .filter(|nv| new_map.sign(*nv).is_some())
                .ok_or_else(|| err(format!("starred crossing {name} vanished under surgery")))?;
            crossing_stars.insert(nv);
        }
        let sd = StarredDiagram {
            regions: new_regions,
            map: new_map,
            region_stars,
            crossing_stars,
        };
        let f_eff = sd.regions.len();
        let n = sd.map.num_crossings();
        if f_eff - sd.region_stars.len() != n - sd.crossing_stars.len() {
            return Err(err("surgery left the stars unbalanced"));
        }
        Ok(sd)
    }

    /// Switch one crossing, carrying the stars along.
    pub fn switch_crossing(&self, name: &str) -> Result<StarredDiagram> {
        let v = self.map.vertex_index(name).ok_or_else(|| err("unknown crossing"))?;
        let positive = self.map.sign(v) == Some(1);
        let new_map = self.map.switch_crossing(name)?;
        self.transported(new_map, |cv, cs| {
            let ns = if cv == name { DiagramMap::switch_slot_map(positive, cs) } else { cs };
            Some((cv.to_string(), ns))
        })
    }

    /// Oriented smoothing at one crossing, carrying the stars along.
    pub fn smooth_crossing(&self, name: &str) -> Result<StarredDiagram> {
        let new_map = self.map.smooth_crossing(name)?;
        if new_map.free_loops() > self.map.free_loops() {
            return Err(err("smoothing closed off a crossing-free loop"));
        }
        self.transported(new_map, |cv, cs| {
            if cv == name {
                None
            } else {
                Some((cv.to_string(), cs))
            }
        })
    }

    pub fn reverse(&self) -> Result<StarredDiagram> {
        let new_map = self.map.reverse()?;
        let signs: std::collections::BTreeMap<String, bool> = self
            .map
            .crossing_indices()
            .map(|v| (self.map.vertex_name(v).to_string(), true))
            .collect();
        self.transported(new_map, |cv, cs| {
            let ns = if signs.contains_key(cv) { DiagramMap::reverse_slot_map(cs) } else { cs };
            Some((cv.to_string(), ns))
        })
    }

    pub fn mirror(&self) -> Result<StarredDiagram> {
        let new_map = self.map.mirror()?;
        let signs: std::collections::BTreeMap<String, bool> = self
            .map
            .crossing_indices()
            .map(|v| (self.map.vertex_name(v).to_string(), self.map.sign(v) == Some(1)))
            .collect();
        self.transported(new_map, |cv, cs| {
            let ns = match signs.get(cv) {
                Some(&pos) => DiagramMap::switch_slot_map(pos, cs),
                None => cs,
            };
            Some((cv.to_string(), ns))
        })
    }

    pub fn reflect_mirror(&self) -> Result<StarredDiagram> {
        let new_map = self.map.reflect_mirror()?;
        let signs: std::collections::BTreeMap<String, bool> = self
            .map
            .crossing_indices()
            .map(|v| (self.map.vertex_name(v).to_string(), self.map.sign(v) == Some(1)))
            .collect();
        self.transported(new_map, |cv, cs| {
            let ns = match signs.get(cv) {
                Some(&pos) => DiagramMap::reflect_mirror_corner_map(pos, cs),
                None => cs,
            };
            Some((cv.to_string(), ns))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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
        let mut parts = crate::diagram::Parts::default();
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

    #[test]
    fn tail_star_lands_on_the_leg_region() {
        let sd = StarredDiagram::tail_starred(simple_knotoid()).unwrap();
        assert_eq!(sd.starred_regions().collect::<Vec<_>>(), vec![0]);
        assert_eq!(sd.unstarred_regions(), vec![1, 2]);
        assert_eq!(sd.unstarred_crossings().len(), 2);
        assert_eq!(
            sd.stars_spec(),
            StarsSpec::Regions(vec!["f0".into()])
        );
    }

    #[test]
    fn balance_is_enforced() {
        // trefoil has 5 regions and 3 crossings: one region star is short
        let spec = StarsSpec::Regions(vec!["f0".into()]);
        assert!(StarredDiagram::make_starred(trefoil(), Some(&spec)).is_err());
        let spec = StarsSpec::Regions(vec!["f0".into(), "f1".into()]);
        assert!(StarredDiagram::make_starred(trefoil(), Some(&spec)).is_ok());
        // crossing stars must leave matching counts too: 5 - 0 != 3 - c
        let spec = StarsSpec::Crossings(vec!["t1".into()]);
        assert!(StarredDiagram::make_starred(trefoil(), Some(&spec)).is_err());
    }

    #[test]
    fn adjacent_pair_takes_both_sides_of_an_edge() {
        let sd = StarredDiagram::adjacent_pair_starred(trefoil(), None).unwrap();
        assert_eq!(sd.starred_regions().count(), 2);
        // an open diagram is rejected
        assert!(StarredDiagram::adjacent_pair_starred(simple_knotoid(), None).is_err());
    }

    #[test]
    fn switch_transports_the_star() {
        let sd = StarredDiagram::tail_starred(simple_knotoid()).unwrap();
        let sw = sd.switch_crossing("a").unwrap();
        // the tail corner must still live in the starred region
        let tail_face = sw.map().face_of_corner("t", 0).unwrap() as u32;
        let r = sw.region_of_face(tail_face);
        assert!(sw.is_region_starred(r));
        let back = sw.switch_crossing("a").unwrap();
        assert_eq!(sd.to_json(), back.to_json());
    }

    #[test]
    fn reverse_transports_the_star() {
        let sd = StarredDiagram::tail_starred(simple_knotoid()).unwrap();
        let rev = sd.reverse().unwrap();
        // old tail region = new head region: star no longer on the new tail
        let head_face = rev.map().face_of_corner("t", 0).unwrap() as u32;
        assert!(rev.is_region_starred(rev.region_of_face(head_face)));
        let back = rev.reverse().unwrap();
        assert_eq!(sd.to_json(), back.to_json());
    }

    #[test]
    fn smoothing_a_kink_with_starred_lens_fails() {
        let kink = DiagramMap::parse_str(
            r#"{"crossings":[{"id":"c","over_in_slot":3}],
                "edges":[{"from":["c",2],"to":["c",3]},{"from":["c",1],"to":["c",0]}]}"#,
        )
        .unwrap()
        .map;
        let spec = StarsSpec::Regions(vec!["f1".into(), "f2".into()]);
        let sd = StarredDiagram::make_starred(kink, Some(&spec)).unwrap();
        assert!(sd.smooth_crossing("c").is_err());
    }

    #[test]
    fn merged_regions_star_as_one() {
        let m = trefoil()
            .merge_regions(&[vec!["f0".into(), "f2".into(), "f4".into()]])
            .unwrap();
        // admissible: zero stars
        let sd = StarredDiagram::make_starred(m, Some(&StarsSpec::Regions(vec![]))).unwrap();
        assert_eq!(sd.regions().len(), 3);
        assert_eq!(sd.unstarred_regions().len(), 3);
    }
}
