//! States and the potential state sum.
//!
//! A state places one marker in each unstarred region, at a corner of an
//! unstarred crossing, no crossing used twice. Corners are weighted by the
//! table below; the potential is the sum over states of the weight product.
//!
//! Corner weights, indexed by the departing slot of the face walk:
//!
//! ```text
//!   sign +:  corner0 = −B   corner1 = 1    corner2 = W   corner3 = 1
//!   sign −:  corner0 = 1    corner1 = −W   corner2 = 1   corner3 = B
//! ```
//!
//! The two 1-weighted corners are the ones the over- and under-strands both
//! bound (up/down); the remaining pair (left/right) carries −B and W for a
//! positive crossing, −W and B for a negative one.

use crate::diagram::Slot;
use crate::poly::{LaurentPoly, Var};
use crate::stars::StarredDiagram;
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// ±(var0^e0 · var1^e1), the only weight shape a corner table needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Mono {
    pub coef: i32,
    pub e: [i32; 2],
}

impl Mono {
    const fn new(coef: i32, e0: i32, e1: i32) -> Mono {
        Mono { coef, e: [e0, e1] }
    }
}

/// Corner weights for one choice of variable pair.
#[derive(Debug, Clone)]
pub(crate) struct CornerTable {
    pub vars: [Var; 2],
    pub pos: [Mono; 4],
    pub neg: [Mono; 4],
}

impl CornerTable {
    pub fn label(&self, sign: i8, corner: Slot) -> Mono {
        let row = if sign > 0 { &self.pos } else { &self.neg };
        row[corner as usize]
    }

    pub fn label_poly(&self, sign: i8, corner: Slot) -> LaurentPoly {
        let m = self.label(sign, corner);
        LaurentPoly::from_terms(
            &self.vars,
            [(vec![m.e[0], m.e[1]], BigInt::from(m.coef))],
        )
    }
}

/// Weights producing the two-variable potential in (W, B).
pub(crate) fn potential_table() -> CornerTable {
    CornerTable {
        vars: [Var::W, Var::B],
        pos: [
            Mono::new(-1, 0, 1), // −B
            Mono::new(1, 0, 0),
            Mono::new(1, 1, 0), // W
            Mono::new(1, 0, 0),
        ],
        neg: [
            Mono::new(1, 0, 0),
            Mono::new(-1, 1, 0), // −W
            Mono::new(1, 0, 0),
            Mono::new(1, 0, 1), // B
        ],
    }
}

/// Weights producing the planar refinement in (W, D); setting D = 1
/// recovers the one-variable specialization B = W^{-1}.
pub(crate) fn planar_table() -> CornerTable {
    CornerTable {
        vars: [Var::W, Var::D],
        pos: [
            Mono::new(-1, -1, 0), // −W^{-1}
            Mono::new(1, 0, -1),  // D^{-1}
            Mono::new(1, 1, 0),   // W
            Mono::new(1, 0, 1),   // D
        ],
        neg: [
            Mono::new(1, 0, 1),  // D
            Mono::new(-1, 1, 0), // −W
            Mono::new(1, 0, -1), // D^{-1}
            Mono::new(1, -1, 0), // W^{-1}
        ],
    }
}

/// The potential weight of one corner.
pub fn corner_label(sign: i8, corner: Slot) -> LaurentPoly {
    potential_table().label_poly(sign, corner)
}

/// One marker per unstarred region: `state[i]` is the (vertex, slot) chosen
/// for the i-th unstarred region (in canonical region order).
pub type State = Vec<(u32, Slot)>;

/// Corner candidates of each unstarred region: corners lying at unstarred
/// crossings, canonical order. Indexed like `sd.unstarred_regions()`.
pub(crate) fn region_candidates(sd: &StarredDiagram) -> Vec<Vec<(u32, Slot)>> {
    let unstarred: std::collections::BTreeSet<u32> =
        sd.unstarred_crossings().into_iter().collect();
    sd.unstarred_regions()
        .iter()
        .map(|&r| {
            let mut corners: Vec<(u32, Slot)> = Vec::new();
            for &face in &sd.regions()[r] {
                for p in sd.map().face_ports(face as usize) {
                    if unstarred.contains(&p.v) {
                        corners.push((p.v, p.s));
                    }
                }
            }
            corners.sort();
            corners
        })
        .collect()
}

/// All states, in lexicographic order of marker choices.
pub fn enumerate_states(sd: &StarredDiagram) -> Vec<State> {
    let candidates = region_candidates(sd);
    let mut states = Vec::new();
    let mut used: BTreeMap<u32, ()> = BTreeMap::new();
    let mut current: State = Vec::new();
    fn feasible(
        candidates: &[Vec<(u32, Slot)>],
        depth: usize,
        used: &BTreeMap<u32, ()>,
    ) -> bool {
        // Hall-style union bound on the remaining regions
        let mut union: std::collections::BTreeSet<u32> = Default::default();
        for (i, cands) in candidates.iter().enumerate().skip(depth) {
            union.extend(cands.iter().map(|c| c.0).filter(|v| !used.contains_key(v)));
            if union.len() < i - depth + 1 {
                return false;
            }
        }
        true
    }
    fn rec(
        candidates: &[Vec<(u32, Slot)>],
        used: &mut BTreeMap<u32, ()>,
        current: &mut State,
        states: &mut Vec<State>,
    ) {
        let depth = current.len();
        if depth == candidates.len() {
            states.push(current.clone());
            return;
        }
        if !feasible(candidates, depth, used) {
            return;
        }
        for &(v, s) in &candidates[depth] {
            if used.contains_key(&v) {
                continue;
            }
            used.insert(v, ());
            current.push((v, s));
            rec(candidates, used, current, states);
            current.pop();
            used.remove(&v);
        }
    }
    rec(&candidates, &mut used, &mut current, &mut states);
    states
}

/// State sum against an arbitrary corner table.
pub(crate) fn state_sum(sd: &StarredDiagram, table: &CornerTable) -> LaurentPoly {
    let mut acc: BTreeMap<[i32; 2], BigInt> = BTreeMap::new();
    for state in enumerate_states(sd) {
        let mut coef = 1i64;
        let mut e = [0i32; 2];
        for &(v, s) in &state {
            let sign = sd.map().sign(v).expect("marker on a non-crossing");
            let m = table.label(sign, s);
            coef *= m.coef as i64;
            e[0] += m.e[0];
            e[1] += m.e[1];
        }
        *acc.entry(e).or_default() += coef;
    }
    if acc.is_empty() && sd.unstarred_regions().is_empty() {
        return LaurentPoly::one();
    }
    LaurentPoly::from_terms(
        &table.vars,
        acc.into_iter().map(|(e, c)| (vec![e[0], e[1]], c)),
    )
}

/// The potential of a starred diagram: the full two-variable state sum.
pub fn potential(sd: &StarredDiagram) -> LaurentPoly {
    state_sum(sd, &potential_table())
}
