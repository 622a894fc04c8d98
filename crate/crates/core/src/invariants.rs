//! The one-variable polynomial and everything derived from it: symmetry
//! identities, skein analysis at a crossing, surface closures, parametric
//! diagram families, and the randomized verification suites behind the
//! `verify` command.
//!
//! Every identity check lands in a [`Check`] record so the CLI can print a
//! stable report; nothing in this module asserts a conjecture, it only
//! reports whether both sides agree.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::diagram::{DiagramMap, EndpointKind, Parts, Slot, StarsSpec};
use crate::moves::{self, MoveSite};
use crate::par::{self, Parallelism};
use crate::planar;
use crate::poly::{LaurentPoly, Subst, Var};
use crate::stars::StarredDiagram;
use crate::statesum;
use crate::{Error, Result};

fn err(msg: impl fmt::Display) -> Error {
    Error::Other(msg.to_string())
}

/// The potential with the two corner weights tied together by `B = W^{-1}`.
/// Invariant under the legal rewrites that preserve stars.
pub fn mock_alexander(sd: &StarredDiagram) -> LaurentPoly {
    statesum::potential(sd).substitute(&[(Var::B, Subst::inv(Var::W))])
}

/// The open-diagram invariant: star the region at the tail and evaluate
/// [`mock_alexander`]. Requires a single open strand.
pub fn nabla_sharp(map: &DiagramMap) -> Result<LaurentPoly> {
    Ok(mock_alexander(&StarredDiagram::tail_starred(map.clone())?))
}

pub(crate) fn conway_z() -> LaurentPoly {
    LaurentPoly::monomial(Var::W, 1) - LaurentPoly::monomial(Var::W, -1)
}

// --- reports -----------------------------------------------------------------

/// One verified identity: the two sides as printed polynomials and whether
/// they agreed. Failures carry the full diagram document so a report is
/// reproducible on its own.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub identity: String,
    pub site: String,
    pub lhs: String,
    pub rhs: String,
    pub verdict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<serde_json::Value>,
}

impl Check {
    fn compare(
        identity: &str,
        site: &str,
        lhs: &LaurentPoly,
        rhs: &LaurentPoly,
        witness: impl FnOnce() -> serde_json::Value,
    ) -> Check {
        let verdict = lhs == rhs;
        Check {
            identity: identity.to_string(),
            site: site.to_string(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            verdict,
            counterexample: if verdict { None } else { Some(witness()) },
        }
    }

    fn named(
        identity: &str,
        site: &str,
        lhs: String,
        rhs: String,
        verdict: bool,
        witness: impl FnOnce() -> serde_json::Value,
    ) -> Check {
        Check {
            identity: identity.to_string(),
            site: site.to_string(),
            lhs,
            rhs,
            verdict,
            counterexample: if verdict { None } else { Some(witness()) },
        }
    }
}

/// Outcome of one verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub iters: usize,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn tally(suite: &str, seed: u64, iters: usize, checks: Vec<Check>) -> SuiteReport {
        let passed = checks.iter().filter(|c| c.verdict).count();
        SuiteReport {
            suite: suite.to_string(),
            seed,
            iters,
            passed,
            failed: checks.len() - passed,
            checks,
        }
    }
}

// --- skein analysis ----------------------------------------------------------

/// What the switch/smooth analysis at a crossing established. The first
/// three cases need all four incident sectors to lie in distinct regions;
/// the rest arise from stars at the crossing itself or from a site whose
/// oriented smoothing disconnects the diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SkeinClass {
    /// Four distinct incident regions, none starred.
    #[serde(rename = "i")]
    NoIncidentStars,
    /// Four distinct incident regions, two consecutive ones starred.
    #[serde(rename = "ii")]
    AdjacentIncidentStars,
    /// Four distinct incident regions, the two unit-weight sectors starred.
    #[serde(rename = "iii")]
    UpDownStars,
    /// Both signed-weight sectors starred (they may be one region); the
    /// switch cannot change the polynomial.
    #[serde(rename = "signed-sectors-starred")]
    SignedSectorsStarred,
    /// The smoothing pinches off a sublink and the two stars share an edge.
    #[serde(rename = "pinch-adjacent-stars")]
    PinchAdjacentStars,
    /// Unique pinch crossing, stars non-adjacent but confined to one side
    /// (or one of them on the region both sides touch).
    #[serde(rename = "pinch-same-side")]
    PinchSameSide,
    /// Unique pinch crossing, one star strictly inside each side; the
    /// smoothing splits and must be re-joined before it can be evaluated.
    #[serde(rename = "pinch-split-stars")]
    PinchSplitStars,
    /// Open diagram, smoothing stays connected.
    #[serde(rename = "open-nonseparating")]
    OpenNonSeparating,
    /// Open diagram whose smoothing splits into two open pieces; evaluated
    /// after the canonical re-joining poke.
    #[serde(rename = "open-joined")]
    OpenJoined,
    /// No identity is claimed at this site; values are recorded only.
    #[serde(rename = "unclassified")]
    Unclassified,
}

impl fmt::Display for SkeinClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SkeinClass::NoIncidentStars => "i",
            SkeinClass::AdjacentIncidentStars => "ii",
            SkeinClass::UpDownStars => "iii",
            SkeinClass::SignedSectorsStarred => "signed-sectors-starred",
            SkeinClass::PinchAdjacentStars => "pinch-adjacent-stars",
            SkeinClass::PinchSameSide => "pinch-same-side",
            SkeinClass::PinchSplitStars => "pinch-split-stars",
            SkeinClass::OpenNonSeparating => "open-nonseparating",
            SkeinClass::OpenJoined => "open-joined",
            SkeinClass::Unclassified => "unclassified",
        };
        f.write_str(s)
    }
}

/// The three diagrams that differ only at one crossing, sign-normalized so
/// `l_plus` carries the positive crossing. `l_zero` is the oriented
/// smoothing when it is admissible as-is; `l_zero_joined` is the smoothing
/// after the canonical connecting poke when the smoothing splits.
#[derive(Debug, Clone)]
pub struct SkeinTriple {
    pub site: String,
    pub classification: SkeinClass,
    pub l_plus: StarredDiagram,
    pub l_minus: StarredDiagram,
    pub l_zero: Option<StarredDiagram>,
    pub l_zero_joined: Option<StarredDiagram>,
}

/// Builds the switch/smooth triple at `crossing` and classifies which
/// identity applies there.
pub fn skein_triple(sd: &StarredDiagram, crossing: &str) -> Result<SkeinTriple> {
    let map = sd.map();
    let v = map
        .vertex_index(crossing)
        .filter(|&v| map.sign(v).is_some())
        .ok_or_else(|| Error::Diagram(format!("unknown crossing `{crossing}`")))?;
    if sd.starred_crossings().any(|c| c == v) {
        return Err(Error::Stars(format!("crossing `{crossing}` is starred")));
    }
    let positive = map.sign(v) == Some(1);
    let switched = sd.switch_crossing(crossing)?;
    let (l_plus, l_minus) = if positive {
        (sd.clone(), switched)
    } else {
        (switched, sd.clone())
    };
    let l_zero = sd.smooth_crossing(crossing).ok();
    let mut classification = classify(sd, crossing, positive)?;
    let l_zero_joined = match classification {
        SkeinClass::OpenJoined | SkeinClass::PinchSplitStars => {
            match tangent_join(&l_plus, crossing) {
                Some(j) => Some(j),
                None => {
                    classification = SkeinClass::Unclassified;
                    None
                }
            }
        }
        _ => None,
    };
    Ok(SkeinTriple {
        site: crossing.to_string(),
        classification,
        l_plus,
        l_minus,
        l_zero,
        l_zero_joined,
    })
}

fn classify(sd: &StarredDiagram, crossing: &str, positive: bool) -> Result<SkeinClass> {
    let map = sd.map();
    // The identities below are stated for honest diagrams in the plane.
    if !map.merges().is_empty()
        || map.free_loops() > 0
        || map.census().k != 1
        || sd.starred_crossings().next().is_some()
    {
        return Ok(SkeinClass::Unclassified);
    }
    let (splits, _) = map.oriented_smoothing_separates(crossing)?;
    if map.num_long_components() > 0 {
        if !splits {
            return Ok(SkeinClass::OpenNonSeparating);
        }
        let Ok(smoothed) = map.smooth_crossing(crossing) else {
            return Ok(SkeinClass::Unclassified);
        };
        let two_open_pieces = smoothed.free_loops() == 0
            && smoothed.num_circular_components() == 0
            && smoothed.num_long_components() == 2
            && smoothed.num_components() == 2
            && sd.starred_regions().next().is_none();
        return Ok(if two_open_pieces {
            SkeinClass::OpenJoined
        } else {
            SkeinClass::Unclassified
        });
    }

    // Closed diagram: admissibility forces exactly two region stars.
    let stars: Vec<usize> = sd.starred_regions().collect();
    debug_assert_eq!(stars.len(), 2);
    let reg = |s: Slot| {
        sd.region_of_face(map.face_of_corner(crossing, s).expect("corner of a crossing") as u32)
    };
    let r = [reg(0), reg(1), reg(2), reg(3)];
    // Signed-weight sectors sit on one diagonal, unit-weight on the other.
    let (signed, unit) = if positive {
        ((r[0], r[2]), (r[1], r[3]))
    } else {
        ((r[1], r[3]), (r[0], r[2]))
    };
    let starred = |x: usize| sd.is_region_starred(x);
    if starred(signed.0) && starred(signed.1) {
        return Ok(SkeinClass::SignedSectorsStarred);
    }
    let distinct = {
        let mut s = r.to_vec();
        s.sort_unstable();
        s.dedup();
        s.len() == 4
    };
    if distinct {
        if r.iter().all(|&x| !starred(x)) {
            return Ok(SkeinClass::NoIncidentStars);
        }
        if (0..4).any(|s| starred(r[s]) && starred(r[(s + 1) % 4])) {
            return Ok(SkeinClass::AdjacentIncidentStars);
        }
        if starred(unit.0) && starred(unit.1) {
            return Ok(SkeinClass::UpDownStars);
        }
    }
    if !splits {
        return Ok(SkeinClass::Unclassified);
    }
    let stars_adjacent = (0..map.num_edges()).any(|i| {
        let (fl, fr) = map.edge_sides(i);
        let (ra, rb) = (sd.region_of_face(fl as u32), sd.region_of_face(fr as u32));
        (ra == stars[0] && rb == stars[1]) || (ra == stars[1] && rb == stars[0])
    });
    if stars_adjacent {
        return Ok(SkeinClass::PinchAdjacentStars);
    }
    let unique = map.crossing_names().iter().all(|&w| {
        w == crossing || !map.oriented_smoothing_separates(w).map(|x| x.0).unwrap_or(true)
    });
    if !unique {
        return Ok(SkeinClass::Unclassified);
    }
    let Ok(smoothed) = map.smooth_crossing(crossing) else {
        return Ok(SkeinClass::Unclassified);
    };
    if smoothed.num_components() != 2 || smoothed.free_loops() > 0 {
        return Ok(SkeinClass::Unclassified);
    }
    let pa = region_parts(sd, &smoothed, stars[0], crossing);
    let pb = region_parts(sd, &smoothed, stars[1], crossing);
    Ok(match (pa.len(), pb.len()) {
        (1, 1) if pa != pb => SkeinClass::PinchSplitStars,
        (1, 1) => SkeinClass::PinchSameSide,
        // A region touching both sides is the one the pinch point opens into.
        (1, 2) | (2, 1) => SkeinClass::PinchSameSide,
        _ => SkeinClass::Unclassified,
    })
}

// Which connected parts of the smoothed map the region's corners touch.
fn region_parts(
    sd: &StarredDiagram,
    smoothed: &DiagramMap,
    region: usize,
    skip: &str,
) -> BTreeSet<u32> {
    let comp = smoothed.vertex_components();
    let mut parts = BTreeSet::new();
    for &f in &sd.regions()[region] {
        for (name, _) in sd.map().face_corners(f as usize) {
            if name == skip {
                continue;
            }
            if let Some(v) = smoothed.vertex_index(name) {
                parts.insert(comp[v as usize]);
            }
        }
    }
    parts
}

// Re-joins the split smoothing of a closed diagram with the first poke
// (over-edge, under-edge, sign, side order) that crosses the two parts,
// keeps every starred region in one piece, and stays clear of the starred
// regions' sides so the poke itself cannot interact with a star.
/// Rejoins the two pieces that smoothing a separating crossing leaves, by a
/// trivial tangency where the crossing sat: the two smoothing corridors are
/// re-crossed twice, the corridor on the old under-strand's inflow passing
/// over both times. Rebuilding from the surrounding wiring keeps the pieces
/// arranged exactly as the original diagram had them; a poke elsewhere can
/// nest one piece inside a different region of the other and change the
/// polynomial. Stars ride along on their surviving corners.
fn tangent_join(plus: &StarredDiagram, crossing: &str) -> Option<StarredDiagram> {
    let map = plus.map();
    let v = map.vertex_index(crossing)?;
    if map.sign(v) != Some(1) {
        return None;
    }
    let mut feed_under = None; // wired into slot 0
    let mut out_over = None; // wired from slot 1
    let mut out_under = None; // wired from slot 2
    let mut feed_over = None; // wired into slot 3
    for (from, to) in map.edge_refs() {
        if to.0 == crossing {
            match to.1 {
                0 => feed_under = Some(from.clone()),
                3 => feed_over = Some(from.clone()),
                _ => {}
            }
        }
        if from.0 == crossing {
            match from.1 {
                1 => out_over = Some(to.clone()),
                2 => out_under = Some(to.clone()),
                _ => {}
            }
        }
    }
    let (a, d, b, c) = (feed_under?, out_over?, out_under?, feed_over?);
    if [&a, &d, &b, &c].iter().any(|p| p.0 == crossing) {
        return None; // a lobe at the crossing: no two corridors to rejoin
    }
    let fresh = |suffix: &str| {
        let mut name = format!("{crossing}{suffix}");
        while map.vertex_index(&name).is_some() {
            name.push('j');
        }
        name
    };
    let (p, q) = (fresh("j1"), fresh("j2"));
    let mut parts = map.to_parts();
    parts.crossings.retain(|(n, _)| n != crossing);
    parts.edges.retain(|(f, t)| f.0 != crossing && t.0 != crossing);
    parts.crossings.push((p.clone(), 1));
    parts.crossings.push((q.clone(), 3));
    parts.edges.push((a, (p.clone(), 1)));
    parts.edges.push(((p.clone(), 3), (q.clone(), 3)));
    parts.edges.push(((q.clone(), 1), d));
    parts.edges.push((c, (p.clone(), 0)));
    parts.edges.push(((p, 2), (q.clone(), 0)));
    parts.edges.push(((q, 2), b));
    let joined = DiagramMap::build(parts).ok()?;
    let after = joined.census();
    if after.genus != 0 || after.k != 1 {
        return None;
    }
    plus.transported(joined, |cv, cs| {
        if cv == crossing {
            None
        } else {
            Some((cv.to_string(), cs))
        }
    })
    .ok()
}

/// Evaluates the identity the classification promised and reports both
/// sides. Unclassified sites record their values without claiming anything.
pub fn verify_skein(t: &SkeinTriple) -> Check {
    let plus = mock_alexander(&t.l_plus);
    let minus = mock_alexander(&t.l_minus);
    let diff = plus.clone() - minus.clone();
    let witness = || {
        json!({
            "diagram": t.l_plus.to_json(),
            "crossing": t.site,
            "classification": t.classification.to_string(),
        })
    };
    let skein_against = |zero: Option<&StarredDiagram>, identity: &str| -> Check {
        match zero {
            Some(zero) => {
                let rhs = conway_z() * mock_alexander(zero);
                Check::compare(identity, &t.site, &diff, &rhs, witness)
            }
            None => Check::named(
                identity,
                &t.site,
                diff.to_string(),
                "(smoothing not admissible)".to_string(),
                false,
                witness,
            ),
        }
    };
    match t.classification {
        SkeinClass::NoIncidentStars => {
            skein_against(t.l_zero.as_ref(), "skein: no incident stars")
        }
        SkeinClass::AdjacentIncidentStars => {
            skein_against(t.l_zero.as_ref(), "skein: adjacent incident stars")
        }
        SkeinClass::UpDownStars => {
            skein_against(t.l_zero.as_ref(), "skein: unit-weight sectors starred")
        }
        SkeinClass::OpenNonSeparating => {
            skein_against(t.l_zero.as_ref(), "skein: open diagram, connected smoothing")
        }
        SkeinClass::OpenJoined => {
            skein_against(t.l_zero_joined.as_ref(), "skein: open diagram, joined smoothing")
        }
        SkeinClass::PinchSplitStars => {
            skein_against(t.l_zero_joined.as_ref(), "skein: pinch with split stars, joined smoothing")
        }
        SkeinClass::SignedSectorsStarred => Check::compare(
            "switch equality: signed sectors starred",
            &t.site,
            &plus,
            &minus,
            witness,
        ),
        SkeinClass::PinchAdjacentStars => Check::compare(
            "switch equality: pinch with adjacent stars",
            &t.site,
            &plus,
            &minus,
            witness,
        ),
        SkeinClass::PinchSameSide => Check::compare(
            "switch equality: pinch with stars on one side",
            &t.site,
            &plus,
            &minus,
            witness,
        ),
        SkeinClass::Unclassified => {
            let zero = t
                .l_zero
                .as_ref()
                .map(|z| mock_alexander(z).to_string())
                .unwrap_or_else(|| "-".to_string());
            Check::named(
                "unclassified: values recorded, nothing claimed",
                &t.site,
                diff.to_string(),
                zero,
                true,
                witness,
            )
        }
    }
}

// --- closures ----------------------------------------------------------------

/// A single-strand diagram closed through an added handle joining the two
/// endpoint regions, plus the two starred evaluations that sum to it.
#[derive(Debug, Clone)]
pub struct VirtualClosure {
    pub diagram: StarredDiagram,
    pub nabla_v: LaurentPoly,
    pub nabla_ext: LaurentPoly,
    pub nabla_int: LaurentPoly,
}

fn closure_pieces(map: &DiagramMap) -> Result<VirtualClosure> {
    if map.num_long_components() != 1
        || map.num_circular_components() > 0
        || map.free_loops() > 0
        || !map.merges().is_empty()
    {
        return Err(Error::Diagram("closure needs a single open strand".to_string()));
    }
    let mut tail = None;
    let mut head = None;
    for (name, kind) in map.endpoint_names() {
        match kind {
            EndpointKind::Tail => tail = Some(name.to_string()),
            EndpointKind::Head => head = Some(name.to_string()),
        }
    }
    let (tail, head) = tail
        .zip(head)
        .ok_or_else(|| Error::Diagram("strand endpoints missing".to_string()))?;
    let tf = map.face_of_corner(&tail, 0).expect("tail region");
    let hf = map.face_of_corner(&head, 0).expect("head region");
    if tf == hf {
        return Err(Error::Diagram("head and tail share a region".to_string()));
    }
    let star = |face: usize| -> Result<StarredDiagram> {
        StarredDiagram::make_starred(
            map.clone(),
            Some(&StarsSpec::Regions(vec![DiagramMap::face_name(face)])),
        )
    };
    let merged = map.merge_regions(&[vec![DiagramMap::face_name(tf), DiagramMap::face_name(hf)]])?;
    let diagram = StarredDiagram::make_starred(merged, None)?;
    let nabla_v = mock_alexander(&diagram);
    let nabla_ext = mock_alexander(&star(tf)?);
    let nabla_int = mock_alexander(&star(hf)?);
    Ok(VirtualClosure { diagram, nabla_v, nabla_ext, nabla_int })
}

/// Closes an open strand through a handle between the two endpoint regions
/// and evaluates it on the resulting genus-one surface. The value always
/// splits as the sum of the tail-starred and head-starred evaluations of
/// the open diagram; that equality is asserted.
pub fn virtual_closure(map: &DiagramMap) -> Result<VirtualClosure> {
    let vc = closure_pieces(map)?;
    assert_eq!(
        vc.nabla_v,
        vc.nabla_ext.clone() + vc.nabla_int.clone(),
        "closure value must split over the two endpoint starrings"
    );
    Ok(vc)
}

/// Joins three mutually distinct regions of a connected closed diagram with
/// one handle and evaluates the polynomial there. Order does not matter.
pub fn trident_polynomial(map: &DiagramMap, faces: &[String]) -> Result<LaurentPoly> {
    if faces.len() != 3 {
        return Err(err("exactly three regions are required"));
    }
    merged_polynomial(map, &[faces.to_vec()])
}

/// Joins two disjoint pairs of regions of a connected closed diagram with
/// two handles and evaluates the polynomial there.
pub fn handle_polynomial(map: &DiagramMap, pairs: &[(String, String)]) -> Result<LaurentPoly> {
    if pairs.len() != 2 {
        return Err(err("exactly two region pairs are required"));
    }
    let groups: Vec<Vec<String>> = pairs
        .iter()
        .map(|(a, b)| vec![a.clone(), b.clone()])
        .collect();
    merged_polynomial(map, &groups)
}

fn merged_polynomial(map: &DiagramMap, groups: &[Vec<String>]) -> Result<LaurentPoly> {
    let mut seen = BTreeSet::new();
    for name in groups.iter().flatten() {
        map.parse_face_name(name)?;
        if !seen.insert(name.clone()) {
            return Err(err(format!("region `{name}` repeated")));
        }
    }
    if map.num_long_components() > 0 || map.census().k != 1 || map.free_loops() > 0 {
        return Err(Error::Diagram("need a connected closed diagram".to_string()));
    }
    let merged = map.merge_regions(groups)?;
    Ok(mock_alexander(&StarredDiagram::make_starred(merged, None)?))
}

// --- families ----------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Twist,
    Spiral,
}

impl FamilyKind {
    pub fn parse(s: &str) -> Option<FamilyKind> {
        match s {
            "twist" => Some(FamilyKind::Twist),
            "spiral" => Some(FamilyKind::Spiral),
            _ => None,
        }
    }
}

/// Builds the n-th member of a parametric family, stars placed.
pub fn family(kind: FamilyKind, n: usize) -> Result<StarredDiagram> {
    match kind {
        FamilyKind::Twist => twist(n),
        FamilyKind::Spiral => spiral(n),
    }
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    let width = n.to_string().len();
    (1..=n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

/// Closed chain of `n` positive half-twists between two strands, starred on
/// the two sectors beside the first crossing. Polynomial: `W^n + (-1)^n W^-n`.
pub fn twist(n: usize) -> Result<StarredDiagram> {
    if n < 1 {
        return Err(err("twist family starts at n = 1"));
    }
    let names = numbered("t", n);
    let mut parts = Parts::default();
    for name in &names {
        parts.crossings.push((name.clone(), 3));
    }
    for i in 0..n {
        let j = (i + 1) % n;
        parts.edges.push(((names[i].clone(), 2), (names[j].clone(), 3)));
        parts.edges.push(((names[i].clone(), 1), (names[j].clone(), 0)));
    }
    let map = DiagramMap::build(parts)?;
    let stars = StarsSpec::Regions(vec![
        DiagramMap::face_name(map.face_of_corner(&names[0], 1).expect("twist corner")),
        DiagramMap::face_name(map.face_of_corner(&names[0], 3).expect("twist corner")),
    ]);
    StarredDiagram::make_starred(map, Some(&stars))
}

/// Closed coil of `n` positive crossings whose polynomials obey the
/// recursion `p[n+1] = (W - W^-1) p[n] + p[n-1]` with seeds `1, W - W^-1`.
pub fn spiral(n: usize) -> Result<StarredDiagram> {
    if n < 2 {
        return Err(err("spiral family starts at n = 2"));
    }
    let names = numbered("s", n);
    let mut parts = Parts::default();
    for name in &names {
        parts.crossings.push((name.clone(), 3));
    }
    for i in 0..n {
        if i + 1 < n {
            parts.edges.push(((names[i].clone(), 2), (names[i + 1].clone(), 0)));
        } else {
            parts.edges.push(((names[i].clone(), 2), (names[i].clone(), 3)));
        }
        if i > 0 {
            parts.edges.push(((names[i].clone(), 1), (names[i - 1].clone(), 3)));
        } else {
            parts.edges.push(((names[i].clone(), 1), (names[i].clone(), 0)));
        }
    }
    let map = DiagramMap::build(parts)?;
    let stars = StarsSpec::Regions(vec![
        DiagramMap::face_name(map.face_of_corner(&names[0], 1).expect("spiral corner")),
        DiagramMap::face_name(map.face_of_corner(&names[n - 1], 3).expect("spiral corner")),
    ]);
    StarredDiagram::make_starred(map, Some(&stars))
}

// --- random diagrams ----------------------------------------------------------

fn kink_base() -> DiagramMap {
    // the plane figure-eight: each loop closes across rotationally adjacent
    // ports, so the two chords do not cross inside the vertex disk
    let parts = Parts {
        crossings: vec![("c1".to_string(), 3)],
        edges: vec![
            (("c1".to_string(), 1), ("c1".to_string(), 0)),
            (("c1".to_string(), 2), ("c1".to_string(), 3)),
        ],
        ..Default::default()
    };
    DiagramMap::build(parts).expect("one-crossing closed base")
}

fn arc_base() -> DiagramMap {
    let parts = Parts {
        endpoints: vec![
            ("t".to_string(), EndpointKind::Tail),
            ("h".to_string(), EndpointKind::Head),
        ],
        edges: vec![(("t".to_string(), 0), ("h".to_string(), 0))],
        ..Default::default()
    };
    DiagramMap::build(parts).expect("bare strand base")
}

/// Grows a connected diagram to the requested crossing count by sampled
/// curl and poke insertions, flips each crossing with probability 1/2, and
/// stars uniformly chosen regions. Deterministic in the generator state.
pub fn random_diagram(rng: &mut ChaCha8Rng, crossings: usize, closed: bool) -> StarredDiagram {
    let mut map = if closed { kink_base() } else { arc_base() };
    while map.num_crossings() < crossings {
        let want_poke = crossings - map.num_crossings() >= 2 && rng.gen_bool(0.5);
        let mut grown = None;
        for _ in 0..40 {
            let ne = map.num_edges();
            let site = if want_poke {
                MoveSite::R2Plus {
                    over_edge: rng.gen_range(0..ne),
                    under_edge: rng.gen_range(0..ne),
                    first_over_in: if rng.gen_bool(0.5) { 3 } else { 1 },
                    under_meets_first: rng.gen_bool(0.5),
                }
            } else {
                MoveSite::R1Plus { edge: rng.gen_range(0..ne), lobe_slot: rng.gen_range(0..4) }
            };
            if let Ok(next) = moves::map_apply(&map, &site) {
                grown = Some(next);
                break;
            }
        }
        map = grown.unwrap_or_else(|| {
            moves::map_apply(&map, &MoveSite::R1Plus { edge: 0, lobe_slot: 0 })
                .expect("a curl on edge 0 is always legal")
        });
    }
    let names: Vec<String> = map.crossing_names().iter().map(|s| s.to_string()).collect();
    for name in names {
        if rng.gen_bool(0.5) {
            map = map.switch_crossing(&name).expect("switch preserves the map");
        }
    }
    let nf = map.num_faces();
    let spec = if closed {
        let a = rng.gen_range(0..nf);
        let b = loop {
            let b = rng.gen_range(0..nf);
            if b != a {
                break b;
            }
        };
        StarsSpec::Regions(vec![DiagramMap::face_name(a), DiagramMap::face_name(b)])
    } else {
        StarsSpec::Regions(vec![DiagramMap::face_name(rng.gen_range(0..nf))])
    };
    StarredDiagram::make_starred(map, Some(&spec)).expect("grown diagram is admissible")
}

fn item_rng(seed: u64, salt: u64, item: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed ^ salt.wrapping_mul(0xA076_1D64_78BD_642F)
            ^ (item + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    )
}

// --- verification suites --------------------------------------------------------

fn batched(
    par: Parallelism,
    iters: usize,
    item: impl Fn(u64) -> Vec<Check> + Sync + Send,
) -> Vec<Check> {
    par::map_reduce(par, (0..iters as u64).collect(), item, Vec::new, |mut a, mut b| {
        a.append(&mut b);
        a
    })
}

// Values of the two-variable refinement over each starred region, as a
// sorted profile so region renumbering cannot matter.
fn planar_profile(sd: &StarredDiagram) -> Vec<String> {
    let mut vals: Vec<String> = sd
        .starred_regions()
        .map(|r| {
            let outer = sd.regions()[r][0] as usize;
            planar::normalized_planar(sd, outer).expect("plane diagram").to_string()
        })
        .collect();
    vals.sort();
    vals
}

// A site-uniform walk drifts upward (insertion sites outnumber removals),
// which would push the state sums out of reach; once at the cap, prefer the
// legal sites that do not add crossings. Every step is still a legal rewrite.
fn bounded_walk(sd: &StarredDiagram, steps: usize, cap: usize, seed: u64) -> StarredDiagram {
    walk_filtered(sd, steps, cap, seed, |_| true)
}

// Same walk, with curl moves excluded: only strand-over-strand rewrites.
fn regular_walk(sd: &StarredDiagram, steps: usize, cap: usize, seed: u64) -> StarredDiagram {
    walk_filtered(sd, steps, cap, seed, |s| {
        !matches!(s, MoveSite::R1Plus { .. } | MoveSite::R1Minus { .. })
    })
}

fn walk_filtered(
    sd: &StarredDiagram,
    steps: usize,
    cap: usize,
    seed: u64,
    allow: impl Fn(&MoveSite) -> bool,
) -> StarredDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = sd.clone();
    for _ in 0..steps {
        let mut sites: Vec<MoveSite> =
            moves::legal_sites(&cur).into_iter().filter(|s| allow(s)).collect();
        if cur.map().num_crossings() >= cap {
            let lean: Vec<MoveSite> = sites
                .iter()
                .filter(|s| !matches!(s, MoveSite::R1Plus { .. } | MoveSite::R2Plus { .. }))
                .cloned()
                .collect();
            if !lean.is_empty() {
                sites = lean;
            }
        }
        if sites.is_empty() {
            continue;
        }
        let site = sites[rng.gen_range(0..sites.len())].clone();
        cur = moves::apply_move(&cur, &site).expect("enumerated site must apply");
    }
    cur
}

fn suite_invariance(iters: usize, seed: u64, par: Parallelism) -> Vec<Check> {
    batched(par, iters, |i| {
        let mut rng = item_rng(seed, 0xA1, i);
        let n = rng.gen_range(3..=6);
        let closed = rng.gen_bool(0.5);
        let sd = random_diagram(&mut rng, n, closed);
        let walk_seed: u64 = rng.gen();
        let moved = bounded_walk(&sd, 20, n + 3, walk_seed);
        let site = format!("item {i}: {n} crossings, walk seed {walk_seed}");
        let mut checks = vec![Check::compare(
            "rewrite invariance: one-variable value",
            &site,
            &mock_alexander(&sd),
            &mock_alexander(&moved),
            || json!({"before": sd.to_json(), "after": moved.to_json()}),
        )];
        // The plane-degree gauge cancels curls only when every smoothing
        // component is a counted circle. An open diagram's long segment is
        // uncounted, and a poke that absorbs a circle into it moves turning
        // off the books; the unnormalized sum is still safe under the
        // curl-free rewrites, so that is what open diagrams get checked on.
        if closed {
            let (pa, pb) = (planar_profile(&sd), planar_profile(&moved));
            checks.push(Check::named(
                "rewrite invariance: two-variable profile over stars",
                &site,
                pa.join(" | "),
                pb.join(" | "),
                pa == pb,
                || json!({"before": sd.to_json(), "after": moved.to_json()}),
            ));
        } else {
            let rmoved = regular_walk(&sd, 20, n + 3, walk_seed);
            checks.push(Check::compare(
                "curl-free rewrite invariance: two-variable state sum",
                &site,
                &statesum::state_sum(&sd, &statesum::planar_table()),
                &statesum::state_sum(&rmoved, &statesum::planar_table()),
                || json!({"before": sd.to_json(), "after": rmoved.to_json()}),
            ));
        }
        if !closed {
            if let Ok(vc) = closure_pieces(sd.map()) {
                checks.push(Check::compare(
                    "closure splits over endpoint starrings",
                    &site,
                    &vc.nabla_v,
                    &(vc.nabla_ext.clone() + vc.nabla_int.clone()),
                    || json!({"diagram": sd.map().to_json(None)}),
                ));
            }
        }
        checks
    })
}

fn suite_skein(iters: usize, seed: u64, par: Parallelism) -> Vec<Check> {
    batched(par, iters, |i| {
        let mut rng = item_rng(seed, 0xA2, i);
        let n = rng.gen_range(3..=6);
        let closed = rng.gen_bool(0.5);
        let sd = random_diagram(&mut rng, n, closed);
        let names: Vec<String> = sd.map().crossing_names().iter().map(|s| s.to_string()).collect();
        names
            .iter()
            .map(|name| {
                let t = skein_triple(&sd, name).expect("crossings are unstarred");
                let mut check = verify_skein(&t);
                check.site = format!("item {i}, crossing {}", check.site);
                check
            })
            .collect()
    })
}

fn suite_symmetry(iters: usize, seed: u64, par: Parallelism) -> Vec<Check> {
    batched(par, iters, |i| {
        let mut rng = item_rng(seed, 0xA3, i);
        let n = rng.gen_range(3..=6);
        let closed = rng.gen_bool(0.5);
        let sd = random_diagram(&mut rng, n, closed);
        let site = format!("item {i}: {n} crossings");
        let value = mock_alexander(&sd);
        let mut checks = Vec::new();
        let reversed = sd.reverse().expect("reverse is total");
        checks.push(Check::compare(
            "reversal: value at -W^-1",
            &site,
            &mock_alexander(&reversed),
            &value.substitute(&[(Var::W, Subst::neg_inv(Var::W))]),
            || json!({"diagram": sd.to_json()}),
        ));
        let mirrored = sd.mirror().expect("mirror is total");
        checks.push(Check::compare(
            "mirror: value at W^-1",
            &site,
            &mock_alexander(&mirrored),
            &value.substitute(&[(Var::W, Subst::inv(Var::W))]),
            || json!({"diagram": sd.to_json()}),
        ));
        let twice = reversed.reverse().expect("reverse is total");
        checks.push(Check::named(
            "reversal twice: identity document",
            &site,
            "reverse twice".to_string(),
            "original".to_string(),
            twice.to_json() == sd.to_json(),
            || json!({"original": sd.to_json(), "twice": twice.to_json()}),
        ));
        if !closed {
            let tailed = StarredDiagram::tail_starred(sd.map().clone()).expect("open strand");
            let reflected = tailed.reflect_mirror().expect("reflection is total");
            let outer = |d: &StarredDiagram| {
                let r = d.starred_regions().next().expect("one star");
                d.regions()[r][0] as usize
            };
            let lhs = planar::normalized_planar(&reflected, outer(&reflected))
                .expect("plane diagram");
            let rhs = planar::normalized_planar(&tailed, outer(&tailed))
                .expect("plane diagram")
                .substitute(&[(Var::D, Subst::inv(Var::D))]);
            checks.push(Check::compare(
                "reflection: two-variable value at D^-1",
                &site,
                &lhs,
                &rhs,
                || json!({"diagram": tailed.to_json()}),
            ));
        }
        checks
    })
}

fn suite_perm(iters: usize, seed: u64, par: Parallelism) -> Vec<Check> {
    batched(par, iters, |i| {
        let mut rng = item_rng(seed, 0xA4, i);
        let n = rng.gen_range(2..=8);
        let closed = rng.gen_bool(0.5);
        let sd = random_diagram(&mut rng, n, closed);
        let site = format!("item {i}: {n} crossings");
        let check = match crate::matrix::crosscheck(&sd, Parallelism::Sequential) {
            Ok(value) => Check::named(
                "permanent engines agree with the state sum",
                &site,
                value.to_string(),
                value.to_string(),
                true,
                || json!({}),
            ),
            Err(e) => Check::named(
                "permanent engines agree with the state sum",
                &site,
                e.to_string(),
                "agreement".to_string(),
                false,
                || json!({"diagram": sd.to_json()}),
            ),
        };
        vec![check]
    })
}

/// Compares both sides of the two open-diagram symmetry statements (the
/// two-variable endpoint swap and its one-variable specialization) plus the
/// tail-starred reversal equality, on random open diagrams. Failures are
/// reported with the offending diagram, never asserted.
pub fn conjecture_harness(
    count: usize,
    seed: u64,
    size_bound: usize,
    par: Parallelism,
) -> SuiteReport {
    let bound = size_bound.max(2);
    let checks = batched(par, count, |i| {
        let mut rng = item_rng(seed, 0xA5, i);
        let n = rng.gen_range(2..=bound);
        let sd = random_diagram(&mut rng, n, false);
        let map = sd.map();
        let tf = map.face_of_corner("t", 0).expect("tail region");
        let hf = map.face_of_corner("h", 0).expect("head region");
        if tf == hf {
            return Vec::new();
        }
        let site = format!("item {i}: {n} crossings");
        let star = |face: usize| {
            StarredDiagram::make_starred(
                map.clone(),
                Some(&StarsSpec::Regions(vec![DiagramMap::face_name(face)])),
            )
            .expect("single star balances an open diagram")
        };
        let (k1, k2) = (star(tf), star(hf));
        let witness = || json!({"diagram": map.to_json(None)});
        let mut checks = vec![
            Check::compare(
                "endpoint swap: two-variable negation",
                &site,
                &statesum::potential(&k1),
                &statesum::potential(&k2).substitute(&[
                    (Var::W, Subst::neg(Var::B)),
                    (Var::B, Subst::neg(Var::W)),
                ]),
                witness,
            ),
            Check::compare(
                "endpoint swap: one-variable value at -W^-1",
                &site,
                &mock_alexander(&k1),
                &mock_alexander(&k2).substitute(&[(Var::W, Subst::neg_inv(Var::W))]),
                witness,
            ),
        ];
        let sharp = mock_alexander(&k1);
        let back = nabla_sharp(&map.reverse().expect("reverse is total"))
            .expect("reverse keeps the strand open");
        checks.push(Check::compare(
            "tail-starred value survives reversal",
            &site,
            &sharp,
            &back,
            witness,
        ));
        checks
    });
    SuiteReport::tally("conjectures", seed, count, checks)
}

/// Runs one named verification suite. Suites are deterministic for a fixed
/// `(iters, seed)` pair regardless of the execution mode.
pub fn run_suite(suite: &str, iters: usize, seed: u64, par: Parallelism) -> Result<SuiteReport> {
    let checks = match suite {
        "invariance" => suite_invariance(iters, seed, par),
        "skein" => suite_skein(iters, seed, par),
        "symmetry" => suite_symmetry(iters, seed, par),
        "perm" => suite_perm(iters, seed, par),
        "conjectures" => return Ok(conjecture_harness(iters, seed, 7, par)),
        other => {
            return Err(err(format!(
                "unknown suite `{other}` (expected invariance, skein, symmetry, perm, or conjectures)"
            )))
        }
    };
    Ok(SuiteReport::tally(suite, seed, iters, checks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPoly {
        LaurentPoly::parse(s).unwrap()
    }

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
        DiagramMap::parse_str(
            r#"{
            "crossings":[{"id":"t1","over_in_slot":3},{"id":"t2","over_in_slot":3},
                         {"id":"t3","over_in_slot":3}],
            "edges":[{"from":["t1",2],"to":["t2",3]},{"from":["t2",2],"to":["t3",3]},
                     {"from":["t3",2],"to":["t1",3]},{"from":["t1",1],"to":["t2",0]},
                     {"from":["t2",1],"to":["t3",0]},{"from":["t3",1],"to":["t1",0]}]}"#,
        )
        .unwrap()
        .map
    }

    #[test]
    fn twist_closed_form() {
        for n in 1..=6 {
            let value = mock_alexander(&twist(n).unwrap());
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let expected = LaurentPoly::monomial(Var::W, n as i32)
                + LaurentPoly::constant(sign) * LaurentPoly::monomial(Var::W, -(n as i32));
            assert_eq!(value, expected, "twist {n}");
        }
        assert!(twist(0).is_err());
    }

    #[test]
    fn twist_recursion() {
        let z = conway_z();
        for n in 1..=8usize {
            let p2 = mock_alexander(&twist(n + 2).unwrap());
            let p1 = mock_alexander(&twist(n + 1).unwrap());
            let p0 = mock_alexander(&twist(n).unwrap());
            assert_eq!(p2, z.clone() * p1 + p0);
        }
    }

    #[test]
    fn spiral_recursion_and_values() {
        let z = conway_z();
        assert!(spiral(1).is_err());
        assert_eq!(
            mock_alexander(&spiral(2).unwrap()),
            LaurentPoly::one() + z.clone() * z.clone()
        );
        let mut prev = z.clone(); // one-crossing seed
        let mut cur = LaurentPoly::one() + z.clone() * z.clone();
        for n in 3..=7usize {
            let next = z.clone() * cur.clone() + prev.clone();
            assert_eq!(mock_alexander(&spiral(n).unwrap()), next, "spiral {n}");
            prev = cur;
            cur = next;
        }
    }

    #[test]
    fn sharp_value_of_the_two_crossing_knotoid() {
        assert_eq!(nabla_sharp(&simple_knotoid()).unwrap(), p("W^2 + W - W^-1"));
        assert!(nabla_sharp(&trefoil()).is_err());
    }

    #[test]
    fn closure_value_and_decomposition() {
        let map = simple_knotoid();
        let vc = virtual_closure(&map).unwrap();
        assert_eq!(vc.nabla_v, p("W^2 + W^-2 + 2*W - 2*W^-1"));
        assert_eq!(vc.nabla_v, vc.nabla_ext.clone() + vc.nabla_int.clone());
        assert_eq!(vc.diagram.map().census().genus, 1);
        // the tail-starred value is a witness for the symmetric split
        let sharp = nabla_sharp(&map).unwrap();
        let mirror_sum =
            sharp.clone() + sharp.substitute(&[(Var::W, Subst::neg_inv(Var::W))]);
        assert_eq!(vc.nabla_v, mirror_sum);
        let q = vc.nabla_v.decompose_symmetric(vc.nabla_v.default_decompose_window()).unwrap();
        let back = q.clone() + q.substitute(&[(Var::W, Subst::neg_inv(Var::W))]);
        assert_eq!(back, vc.nabla_v);
    }

    #[test]
    fn closure_rejects_shared_endpoint_region() {
        // one kink on an open strand: both endpoints sit in the outer region
        let doc = DiagramMap::parse_str(
            r#"{
            "crossings":[{"id":"a","over_in_slot":3}],
            "endpoints":[{"id":"t","kind":"tail"},{"id":"h","kind":"head"}],
            "edges":[{"from":["t",0],"to":["a",0]},{"from":["a",2],"to":["a",3]},
                     {"from":["a",1],"to":["h",0]}]}"#,
        )
        .unwrap();
        assert!(virtual_closure(&doc.map).is_err());
        assert!(virtual_closure(&trefoil()).is_err());
    }

    #[test]
    fn merged_evaluations_are_order_free() {
        let map = trefoil();
        let faces = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let a = trident_polynomial(&map, &faces(&["f0", "f1", "f2"])).unwrap();
        let b = trident_polynomial(&map, &faces(&["f2", "f0", "f1"])).unwrap();
        assert_eq!(a, b);
        assert!(trident_polynomial(&map, &faces(&["f0", "f1", "f1"])).is_err());
        assert!(trident_polynomial(&map, &faces(&["f0", "f1"])).is_err());
        let h = handle_polynomial(
            &map,
            &[("f0".to_string(), "f1".to_string()), ("f2".to_string(), "f3".to_string())],
        )
        .unwrap();
        let h2 = handle_polynomial(
            &map,
            &[("f3".to_string(), "f2".to_string()), ("f1".to_string(), "f0".to_string())],
        )
        .unwrap();
        assert_eq!(h, h2);
        assert!(handle_polynomial(
            &map,
            &[("f0".to_string(), "f1".to_string()), ("f1".to_string(), "f2".to_string())]
        )
        .is_err());
    }

    #[test]
    fn skein_triple_classes_on_the_twist_pair() {
        // stars beside the first crossing occupy its two unit-weight sectors
        let sd = twist(2).unwrap();
        let t = skein_triple(&sd, sd.map().crossing_names()[0]).unwrap();
        assert_eq!(t.classification, SkeinClass::UpDownStars);
        assert!(verify_skein(&t).verdict);
        // the other diagonal: both signed sectors starred forces equality
        let map = twist(2).unwrap().map().clone();
        let spec = StarsSpec::Regions(vec![
            DiagramMap::face_name(map.face_of_corner("t1", 0).unwrap()),
            DiagramMap::face_name(map.face_of_corner("t1", 2).unwrap()),
        ]);
        let other = StarredDiagram::make_starred(map, Some(&spec)).unwrap();
        let t = skein_triple(&other, "t1").unwrap();
        assert_eq!(t.classification, SkeinClass::SignedSectorsStarred);
        assert!(verify_skein(&t).verdict);
    }

    #[test]
    fn skein_brute_force_on_the_three_crossing_diagram() {
        // adjacent stars: the subtraction matches the smoothing at every
        // crossing, whether or not a named case applies
        let sd = StarredDiagram::adjacent_pair_starred(trefoil(), None).unwrap();
        let z = conway_z();
        for name in ["t1", "t2", "t3"] {
            let t = skein_triple(&sd, name).unwrap();
            let diff = mock_alexander(&t.l_plus) - mock_alexander(&t.l_minus);
            let zero = t.l_zero.as_ref().expect("smoothing stays admissible");
            assert_eq!(diff, z.clone() * mock_alexander(zero), "crossing {name}");
            assert!(verify_skein(&t).verdict, "crossing {name}");
        }
    }

    #[test]
    fn skein_on_the_two_segment_example() {
        let doc = DiagramMap::parse_str(
            r#"{
            "crossings":[{"id":"a","over_in_slot":3}],
            "endpoints":[{"id":"t1","kind":"tail"},{"id":"h1","kind":"head"},
                         {"id":"t2","kind":"tail"},{"id":"h2","kind":"head"}],
            "edges":[{"from":["t1",0],"to":["a",0]},{"from":["a",2],"to":["h1",0]},
                     {"from":["t2",0],"to":["a",3]},{"from":["a",1],"to":["h2",0]}]}"#,
        )
        .unwrap();
        let sd = StarredDiagram::make_starred(doc.map, None).unwrap();
        let t = skein_triple(&sd, "a").unwrap();
        assert_eq!(t.classification, SkeinClass::OpenJoined);
        assert_eq!(mock_alexander(&t.l_plus), p("W + 2 - W^-1"));
        assert_eq!(mock_alexander(&t.l_minus), p("-W + 2 + W^-1"));
        let joined = t.l_zero_joined.as_ref().unwrap();
        assert_eq!(mock_alexander(joined), p("2"));
        assert!(t.l_zero.is_none(), "split smoothing is not admissible directly");
        let check = verify_skein(&t);
        assert!(check.verdict);
        assert_eq!(check.lhs, check.rhs);
    }

    #[test]
    fn skein_at_a_fresh_kink_with_adjacent_stars() {
        let map = moves::map_apply(&trefoil(), &MoveSite::R1Plus { edge: 0, lobe_slot: 0 })
            .unwrap();
        let kink = map
            .crossing_names()
            .iter()
            .find(|n| !n.starts_with('t'))
            .expect("the curl adds a crossing")
            .to_string();
        // star an edge whose side regions stay clear of the curl, so the
        // switch falls to the pinch analysis rather than the weight diagonal
        let at_kink: Vec<usize> =
            (0..4).map(|s| map.face_of_corner(&kink, s).unwrap()).collect();
        let edge = (0..map.num_edges())
            .find(|&i| {
                let (a, b) = map.edge_sides(i);
                !at_kink.contains(&a) && !at_kink.contains(&b)
            })
            .expect("an edge away from the curl");
        let sd = StarredDiagram::adjacent_pair_starred(map, Some(edge)).unwrap();
        let t = skein_triple(&sd, &kink).unwrap();
        assert_eq!(t.classification, SkeinClass::PinchAdjacentStars);
        let check = verify_skein(&t);
        assert!(check.verdict, "{}: {} vs {}", check.identity, check.lhs, check.rhs);
    }

    // Two interlocking two-crossing loops joined through a fifth crossing:
    // the middle crossing pinches the diagram into the two loops.
    fn pinched_sum() -> DiagramMap {
        DiagramMap::parse_str(
            r#"{
            "crossings":[{"id":"h1","over_in_slot":3},{"id":"h2","over_in_slot":3},
                         {"id":"k1","over_in_slot":3},{"id":"k2","over_in_slot":3},
                         {"id":"v","over_in_slot":3}],
            "edges":[{"from":["h1",2],"to":["h2",3]},{"from":["h2",2],"to":["h1",3]},
                     {"from":["h1",1],"to":["h2",0]},{"from":["h2",1],"to":["v",0]},
                     {"from":["v",1],"to":["h1",0]},
                     {"from":["k1",2],"to":["k2",3]},{"from":["k2",2],"to":["k1",3]},
                     {"from":["k1",1],"to":["k2",0]},{"from":["k2",1],"to":["v",3]},
                     {"from":["v",2],"to":["k1",0]}]}"#,
        )
        .unwrap()
        .map
    }

    #[test]
    fn skein_across_every_starring_of_the_pinched_sum() {
        let map = pinched_sum();
        let census = map.census();
        assert_eq!((census.n, census.f, census.genus, census.k), (5, 7, 0, 1));
        let (splits, _) = map.oriented_smoothing_separates("v").unwrap();
        assert!(splits);
        for w in ["h1", "h2", "k1", "k2"] {
            assert!(!map.oriented_smoothing_separates(w).unwrap().0, "{w} must not pinch");
        }
        let mut seen_split = 0;
        let mut seen_same_side = 0;
        for a in 0..census.f {
            for b in (a + 1)..census.f {
                let spec = StarsSpec::Regions(vec![
                    DiagramMap::face_name(a),
                    DiagramMap::face_name(b),
                ]);
                let sd = StarredDiagram::make_starred(map.clone(), Some(&spec)).unwrap();
                for name in ["h1", "h2", "k1", "k2", "v"] {
                    let t = skein_triple(&sd, name).unwrap();
                    match t.classification {
                        SkeinClass::PinchSplitStars => seen_split += 1,
                        SkeinClass::PinchSameSide => seen_same_side += 1,
                        _ => {}
                    }
                    let check = verify_skein(&t);
                    assert!(
                        check.verdict,
                        "stars f{a},f{b} at {name} [{}]: {} vs {}",
                        t.classification, check.lhs, check.rhs
                    );
                }
            }
        }
        assert!(seen_split > 0, "some starring must split across the pinch");
        assert!(seen_same_side > 0, "some starring must stay on one side");
    }

    #[test]
    fn skein_rejects_bad_sites() {
        let sd = twist(2).unwrap();
        assert!(skein_triple(&sd, "nope").is_err());
    }

    #[test]
    fn split_diagram_joined_by_a_poke_vanishes() {
        // two disjoint one-crossing loops
        let parts = Parts {
            crossings: vec![("c1".to_string(), 3), ("c2".to_string(), 3)],
            edges: vec![
                (("c1".to_string(), 1), ("c1".to_string(), 0)),
                (("c1".to_string(), 2), ("c1".to_string(), 3)),
                (("c2".to_string(), 1), ("c2".to_string(), 0)),
                (("c2".to_string(), 2), ("c2".to_string(), 3)),
            ],
            ..Default::default()
        };
        let split = DiagramMap::build(parts).unwrap();
        assert_eq!(split.num_components(), 2);
        let comp = split.vertex_components();
        let edge_part: Vec<u32> = split
            .edge_refs()
            .iter()
            .map(|((from, _), _)| comp[split.vertex_index(from).unwrap() as usize])
            .collect();
        let mut joined = None;
        'outer: for over_edge in 0..split.num_edges() {
            for under_edge in 0..split.num_edges() {
                if edge_part[over_edge] == edge_part[under_edge] {
                    continue;
                }
                for first_over_in in [3u8, 1] {
                    for under_meets_first in [true, false] {
                        let site = MoveSite::R2Plus {
                            over_edge,
                            under_edge,
                            first_over_in,
                            under_meets_first,
                        };
                        if let Ok(m) = moves::map_apply(&split, &site) {
                            joined = Some(m);
                            break 'outer;
                        }
                    }
                }
            }
        }
        let joined = joined.expect("a cross-part poke must exist");
        assert_eq!(joined.census().k, 1);
        let sd = StarredDiagram::adjacent_pair_starred(joined, None).unwrap();
        assert_eq!(mock_alexander(&sd), LaurentPoly::zero());
    }

    #[test]
    fn conjecture_pair_on_the_three_crossing_example() {
        let doc = DiagramMap::parse_str(
            r#"{
            "crossings":[{"id":"a","over_in_slot":3},{"id":"b","over_in_slot":3},
                         {"id":"c","over_in_slot":3}],
            "endpoints":[{"id":"t","kind":"tail"},{"id":"h","kind":"head"}],
            "edges":[{"from":["t",0],"to":["a",0]},{"from":["a",1],"to":["c",0]},
                     {"from":["a",2],"to":["b",0]},{"from":["b",1],"to":["h",0]},
                     {"from":["b",2],"to":["c",3]},{"from":["c",1],"to":["a",3]},
                     {"from":["c",2],"to":["b",3]}]}"#,
        )
        .unwrap();
        let map = doc.map;
        let tf = map.face_of_corner("t", 0).unwrap();
        let hf = map.face_of_corner("h", 0).unwrap();
        assert_ne!(tf, hf);
        let star = |f: usize| {
            StarredDiagram::make_starred(
                map.clone(),
                Some(&StarsSpec::Regions(vec![DiagramMap::face_name(f)])),
            )
            .unwrap()
        };
        let (k1, k2) = (star(tf), star(hf));
        let p1 = statesum::potential(&k1);
        let p2 = statesum::potential(&k2);
        assert_eq!(p1, p("W^2 - W*B + W - B + 1"));
        assert_eq!(p2, p("B^2 - W*B + W - B + 1"));
        assert_eq!(
            p1,
            p2.substitute(&[(Var::W, Subst::neg(Var::B)), (Var::B, Subst::neg(Var::W))])
        );
        assert_eq!(
            mock_alexander(&k1),
            mock_alexander(&k2).substitute(&[(Var::W, Subst::neg_inv(Var::W))])
        );
    }

    #[test]
    fn random_diagrams_hit_the_requested_size() {
        for i in 0..12u64 {
            let mut rng = item_rng(11, 0xEE, i);
            let n = 2 + (i % 5) as usize;
            let closed = i % 2 == 0;
            let sd = random_diagram(&mut rng, n, closed);
            let census = sd.map().census();
            assert_eq!(census.n, n);
            assert_eq!(census.genus, 0);
            assert_eq!(census.k, 1);
            let stars = sd.starred_regions().count();
            assert_eq!(stars, if closed { 2 } else { 1 });
            assert_eq!(census.f_effective - stars, census.n, "stars balance the regions");
            let mut rng2 = item_rng(11, 0xEE, i);
            let again = random_diagram(&mut rng2, n, closed);
            assert_eq!(sd.to_json(), again.to_json(), "generation must be repeatable");
        }
    }

    #[test]
    fn suites_run_clean_on_a_small_budget() {
        for suite in ["invariance", "skein", "symmetry", "perm", "conjectures"] {
            let report = run_suite(suite, 6, 23, Parallelism::Sequential).unwrap();
            assert_eq!(report.failed, 0, "suite {suite}: {:?}", report.checks.iter().filter(|c| !c.verdict).collect::<Vec<_>>());
            assert!(report.passed > 0);
        }
        assert!(run_suite("bogus", 1, 1, Parallelism::Sequential).is_err());
    }

    #[test]
    fn suites_are_deterministic_across_execution_modes() {
        let a = run_suite("skein", 5, 41, Parallelism::Sequential).unwrap();
        let b = run_suite("skein", 5, 41, Parallelism::Rayon).unwrap();
        assert_eq!(serde_json::to_string(&a.checks).unwrap(), serde_json::to_string(&b.checks).unwrap());
    }
}
