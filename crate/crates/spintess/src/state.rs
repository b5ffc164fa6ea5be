//! States of the flip engine: the ambient tesselation with finitely many
//! edges flipped, a distinguished oriented edge, and a marking, together
//! with the three generator moves acting on them.
//!
//! The tesselation is stored as the set of non-unimodular edges plus a cache
//! of flanking triangles for edges that a flip has touched; an edge absent
//! from the cache is flanked by its two unimodular neighbor triangles.

use crate::error::{Error, Result};
use crate::farey::{
    base_doe, edges_cross, farey_neighbors, is_farey_edge, IdealEdge, OrientedEdge, Triangle,
};
use crate::marking::{self, FareyAmbient, Marking, Tesselation};
use crate::rational::{ccw, Rational};
use crate::words::{Letter, Word};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// Direction given to the new diagonal after a flip, stated relative to the
/// old distinguished edge: `LeftToRight` points it from the left flanking
/// vertex to the right one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DoeOrientation {
    LeftToRight,
    RightToLeft,
}

/// Names for the five edge positions a move's rewrite pattern may toggle,
/// in bit order.
///
/// With the distinguished edge running tail→head, left flanking vertex `c`
/// and right flanking vertex `d`, positions 0–3 are the quadrilateral sides
/// `{tail,c}`, `{c,head}`, `{head,d}`, `{d,tail}`. Position 4 is the
/// diagonal: for a flip the new edge `{c,d}`, for the other moves the
/// distinguished edge itself.
pub const QUAD_POSITIONS: [&str; 5] =
    ["tail-left", "left-head", "head-right", "right-tail", "diagonal"];

/// Number of edges a flip's rewrite pattern can see.
pub const QUAD_SIZE: usize = QUAD_POSITIONS.len();

/// Mask covering the valid bits of a rewrite pattern.
pub const QUAD_MASK: u8 = (1 << QUAD_SIZE as u8) - 1;

/// The positions named by a rewrite pattern, for display.
pub fn pattern_positions(pattern: u8) -> Vec<&'static str> {
    (0..QUAD_SIZE)
        .filter(|i| pattern >> i & 1 == 1)
        .map(|i| QUAD_POSITIONS[i])
        .collect()
}

fn pattern_label(pattern: u8) -> String {
    if pattern & QUAD_MASK == 0 {
        return "none".to_string();
    }
    pattern_positions(pattern).join("+")
}

/// How the moves rewrite markings.
///
/// Each move splits into two cases keyed by whether the distinguished edge
/// carries a mark, and in each case toggles one fixed set of quadrilateral
/// positions. For a flip the old diagonal disappears, taking any mark on it
/// along, and the flip's pattern lands with the new diagonal in the
/// `diagonal` slot; its direction comes from `orientation`. The rotation
/// and the toggle deposit their patterns around the unchanged
/// quadrilateral before the doe moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SpinRule {
    pub orientation: DoeOrientation,
    /// Flip pattern when the flipped edge was unmarked.
    pub flip_plain: u8,
    /// Flip pattern when the flipped edge was marked.
    pub flip_marked: u8,
    /// Rotation pattern when the doe is unmarked.
    pub rotate_plain: u8,
    /// Rotation pattern when the doe is marked.
    pub rotate_marked: u8,
    /// Toggle pattern when the doe is unmarked.
    pub toggle_plain: u8,
    /// Toggle pattern when the doe is marked.
    pub toggle_marked: u8,
}

impl SpinRule {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        orientation: DoeOrientation,
        flip_plain: u8,
        flip_marked: u8,
        rotate_plain: u8,
        rotate_marked: u8,
        toggle_plain: u8,
        toggle_marked: u8,
    ) -> SpinRule {
        let rule = SpinRule {
            orientation,
            flip_plain,
            flip_marked,
            rotate_plain,
            rotate_marked,
            toggle_plain,
            toggle_marked,
        };
        debug_assert!(rule.patterns().iter().all(|p| *p <= QUAD_MASK));
        rule
    }

    pub fn patterns(&self) -> [u8; 6] {
        [
            self.flip_plain,
            self.flip_marked,
            self.rotate_plain,
            self.rotate_marked,
            self.toggle_plain,
            self.toggle_marked,
        ]
    }

    /// The rule used throughout the crate: the one surviving the synthesis
    /// filter. The synthesis tests re-derive it from scratch and assert it
    /// still comes out on top.
    pub fn canonical() -> SpinRule {
        SpinRule::new(DoeOrientation::LeftToRight, 0, 0, 0, 0, 0x10, 0x10)
    }

    /// Rule for computations that ignore markings entirely: all patterns
    /// zero, the new diagonal pointing left to right.
    pub fn unmarked_model() -> SpinRule {
        SpinRule::new(DoeOrientation::LeftToRight, 0, 0, 0, 0, 0, 0)
    }
}

impl fmt::Display for SpinRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.orientation {
            DoeOrientation::LeftToRight => "left-to-right",
            DoeOrientation::RightToLeft => "right-to-left",
        };
        write!(
            f,
            "doe {dir}; flip {} / {}; rotation {} / {}; toggle {} / {} (plain / marked)",
            pattern_label(self.flip_plain),
            pattern_label(self.flip_marked),
            pattern_label(self.rotate_plain),
            pattern_label(self.rotate_marked),
            pattern_label(self.toggle_plain),
            pattern_label(self.toggle_marked)
        )
    }
}

/// A marked tesselation with a distinguished oriented edge.
#[derive(Debug, Clone)]
pub struct TessState {
    doe: OrientedEdge,
    non_farey: BTreeSet<IdealEdge>,
    by_edge: HashMap<IdealEdge, (Triangle, Triangle)>,
    marking: Marking,
    rule: SpinRule,
}

impl TessState {
    /// The base state: the unimodular tesselation, the edge 0→∞, no marks.
    pub fn new(rule: SpinRule) -> Self {
        TessState {
            doe: base_doe(),
            non_farey: BTreeSet::new(),
            by_edge: HashMap::new(),
            marking: Marking::empty(),
            rule,
        }
    }

    /// Reset to the base state, keeping allocated capacity.
    pub fn reset(&mut self) {
        self.doe = base_doe();
        self.non_farey.clear();
        self.by_edge.clear();
        self.marking.clear();
    }

    pub fn doe(&self) -> OrientedEdge {
        self.doe
    }

    pub fn marking(&self) -> &Marking {
        &self.marking
    }

    pub fn rule(&self) -> SpinRule {
        self.rule
    }

    /// Edges of the current tesselation that are not unimodular, sorted.
    pub fn non_farey_edges(&self) -> Vec<IdealEdge> {
        self.non_farey.iter().copied().collect()
    }

    /// Toggle a mark directly; the edge must belong to the tesselation.
    pub fn toggle_mark(&mut self, e: IdealEdge) -> Result<()> {
        if !self.has_edge(&e) {
            let (x, y) = e.endpoints();
            return Err(Error::EdgeNotPresent(x.to_string(), y.to_string()));
        }
        self.marking.toggle(e);
        Ok(())
    }

    /// Toggle the three sides of a triangle of the current tesselation.
    pub fn apply_triangle_move(&mut self, t: &Triangle) -> Result<()> {
        for side in t.sides() {
            if !self.has_edge(&side) {
                let (x, y) = side.endpoints();
                return Err(Error::EdgeNotPresent(x.to_string(), y.to_string()));
            }
        }
        self.marking.apply_triangle_move(t);
        Ok(())
    }

    /// The two triangles flanking an edge of the tesselation. Does not
    /// check membership; callers pass edges known to be present.
    fn triangles_at(&self, e: &IdealEdge) -> Result<(Triangle, Triangle)> {
        if let Some(pair) = self.by_edge.get(e) {
            return Ok(*pair);
        }
        let (a, b) = e.endpoints();
        let (m, d) = farey_neighbors(e)?;
        Ok((Triangle::new(a, b, m)?, Triangle::new(a, b, d)?))
    }

    /// Third vertices of the triangles flanking the distinguished edge,
    /// as (left, right) seen along its orientation.
    pub fn doe_flanks(&self) -> Result<(Rational, Rational)> {
        let e = self.doe.underlying();
        let (t1, t2) = self.triangles_at(&e)?;
        let v1 = t1.opposite_vertex(&e).expect("flank contains its edge");
        let v2 = t2.opposite_vertex(&e).expect("flank contains its edge");
        if ccw(self.doe.tail, self.doe.head, v1) {
            Ok((v2, v1))
        } else {
            Ok((v1, v2))
        }
    }

    /// Toggle `pattern` over the quadrilateral around the distinguished
    /// edge, with that edge itself in the `diagonal` slot.
    fn toggle_doe_quad(&mut self, pattern: u8) -> Result<()> {
        if pattern == 0 {
            return Ok(());
        }
        let (a, b) = (self.doe.tail, self.doe.head);
        let (c, d) = self.doe_flanks()?;
        let quad = [
            IdealEdge::new(a, c)?,
            IdealEdge::new(c, b)?,
            IdealEdge::new(b, d)?,
            IdealEdge::new(d, a)?,
            IdealEdge::new(a, b)?,
        ];
        for (i, e) in quad.iter().enumerate() {
            if pattern >> i & 1 == 1 {
                self.marking.toggle(*e);
            }
        }
        Ok(())
    }

    /// Rotate the distinguished edge one step counterclockwise around its
    /// left triangle, toggling the rotation pattern for the doe's case
    /// first.
    pub fn apply_rotate(&mut self) -> Result<()> {
        let pattern = if self.marking.is_marked(&self.doe.underlying()) {
            self.rule.rotate_marked
        } else {
            self.rule.rotate_plain
        };
        self.toggle_doe_quad(pattern)?;
        let (c, _) = self.doe_flanks()?;
        self.doe = OrientedEdge::new(c, self.doe.tail)?;
        Ok(())
    }

    /// Toggle the pattern for the doe's case around the distinguished edge;
    /// the `diagonal` bit of the pattern is the doe's own mark.
    pub fn apply_toggle(&mut self) -> Result<()> {
        let pattern = if self.marking.is_marked(&self.doe.underlying()) {
            self.rule.toggle_marked
        } else {
            self.rule.toggle_plain
        };
        self.toggle_doe_quad(pattern)
    }

    /// Rewrite the quadrilateral around the edge `{a, b}`: remove that
    /// diagonal, insert `{c, d}`, and refresh the flank cache for the four
    /// sides. Labels follow the toggle positions: sides come back in the
    /// order `{a,c}`, `{c,b}`, `{b,d}`, `{d,a}`, `{c,d}`.
    fn flip_quadrilateral(
        &mut self,
        a: Rational,
        b: Rational,
        c: Rational,
        d: Rational,
    ) -> Result<[IdealEdge; 5]> {
        let e = IdealEdge::new(a, b)?;
        let sides = [
            IdealEdge::new(a, c)?,
            IdealEdge::new(c, b)?,
            IdealEdge::new(b, d)?,
            IdealEdge::new(d, a)?,
            IdealEdge::new(c, d)?,
        ];
        let inner_c = Triangle::new(a, b, c)?;
        let inner_d = Triangle::new(a, b, d)?;
        let mut outer = [inner_c; 4];
        for i in 0..4 {
            let (t1, t2) = self.triangles_at(&sides[i])?;
            let old_inner = if i < 2 { inner_c } else { inner_d };
            outer[i] = if t1 == old_inner {
                t2
            } else if t2 == old_inner {
                t1
            } else {
                panic!("flank cache out of step at {}", sides[i]);
            };
        }
        self.by_edge.remove(&e);
        self.non_farey.remove(&e);
        let new_a = Triangle::new(c, d, a)?;
        let new_b = Triangle::new(c, d, b)?;
        self.by_edge.insert(sides[4], (new_a, new_b));
        let (x, y) = sides[4].endpoints();
        if !is_farey_edge(x, y) {
            self.non_farey.insert(sides[4]);
        }
        for i in 0..4 {
            let inner = if i == 0 || i == 3 { new_a } else { new_b };
            self.by_edge.insert(sides[i], (outer[i], inner));
        }
        Ok(sides)
    }

    /// Flip the distinguished edge: replace it by the other diagonal of the
    /// surrounding quadrilateral, reorient, and rewrite marks per the rule.
    /// A mark on the old diagonal disappears with its edge; the rule's
    /// pattern for the case at hand is then toggled over the quadrilateral.
    pub fn apply_flip(&mut self) -> Result<()> {
        let (a, b) = (self.doe.tail, self.doe.head);
        let (c, d) = self.doe_flanks()?;
        let old = self.doe.underlying();
        let marked_diagonal = self.marking.is_marked(&old);
        if marked_diagonal {
            self.marking.toggle(old);
        }
        let sides = self.flip_quadrilateral(a, b, c, d)?;
        let pattern = if marked_diagonal { self.rule.flip_marked } else { self.rule.flip_plain };
        for (i, e) in sides.iter().enumerate() {
            if pattern >> i & 1 == 1 {
                self.marking.toggle(*e);
            }
        }
        self.doe = match self.rule.orientation {
            DoeOrientation::LeftToRight => OrientedEdge::new(c, d)?,
            DoeOrientation::RightToLeft => OrientedEdge::new(d, c)?,
        };
        Ok(())
    }

    /// Flip an arbitrary edge of the tesselation, ignoring marks. If the
    /// distinguished edge sits on the flipped edge it is transported to the
    /// new diagonal along this state's orientation rule. Returns the new
    /// diagonal.
    pub fn flip_edge_structural(&mut self, e: &IdealEdge) -> Result<IdealEdge> {
        if !self.has_edge(e) {
            let (x, y) = e.endpoints();
            return Err(Error::EdgeNotPresent(x.to_string(), y.to_string()));
        }
        if self.doe.underlying() == *e {
            let (a, b) = (self.doe.tail, self.doe.head);
            let (c, d) = self.doe_flanks()?;
            let sides = self.flip_quadrilateral(a, b, c, d)?;
            self.doe = match self.rule.orientation {
                DoeOrientation::LeftToRight => OrientedEdge::new(c, d)?,
                DoeOrientation::RightToLeft => OrientedEdge::new(d, c)?,
            };
            return Ok(sides[4]);
        }
        let (a, b) = e.endpoints();
        let (t1, t2) = self.triangles_at(e)?;
        let c = t1.opposite_vertex(e).expect("flank contains its edge");
        let d = t2.opposite_vertex(e).expect("flank contains its edge");
        let sides = self.flip_quadrilateral(a, b, c, d)?;
        Ok(sides[4])
    }

    pub fn apply_letter(&mut self, l: Letter) -> Result<()> {
        match l {
            Letter::Flip => self.apply_flip(),
            Letter::Rotate => self.apply_rotate(),
            Letter::Toggle => self.apply_toggle(),
        }
    }

    /// Apply a word, rightmost letter first.
    pub fn apply_word(&mut self, w: &Word) -> Result<()> {
        for l in w.letters().iter().rev() {
            self.apply_letter(*l)?;
        }
        Ok(())
    }

    /// Whether this state is the base state up to marking equivalence.
    pub fn is_identity(&self) -> Result<bool> {
        if !self.non_farey.is_empty() || self.doe != base_doe() {
            return Ok(false);
        }
        marking::is_trivial(&FareyAmbient, &self.marking)
    }

    /// Whether two states agree: same tesselation, same distinguished edge,
    /// equivalent markings.
    pub fn equivalent(&self, other: &TessState) -> Result<bool> {
        if self.non_farey != other.non_farey || self.doe != other.doe {
            return Ok(false);
        }
        marking::equivalent(self, &self.marking, &other.marking)
    }

    /// Agreement of tesselation and distinguished edge only.
    pub fn equal_unmarked(&self, other: &TessState) -> bool {
        self.non_farey == other.non_farey && self.doe == other.doe
    }
}

impl Tesselation for TessState {
    fn has_edge(&self, e: &IdealEdge) -> bool {
        if self.non_farey.contains(e) {
            return true;
        }
        let (a, b) = e.endpoints();
        is_farey_edge(a, b) && !self.non_farey.iter().any(|n| edges_cross(n, e))
    }

    fn triangle_pair(&self, e: &IdealEdge) -> Result<(Triangle, Triangle)> {
        if !self.has_edge(e) {
            let (x, y) = e.endpoints();
            return Err(Error::EdgeNotPresent(x.to_string(), y.to_string()));
        }
        self.triangles_at(e)
    }

    fn root_triangle(&self) -> Triangle {
        let (left, _) = self.doe_flanks().expect("distinguished edge has flanks");
        Triangle::new(self.doe.tail, self.doe.head, left)
            .expect("distinguished edge plus flank vertex")
    }
}

/// Run a word from the base state.
pub fn run_word(w: &Word, rule: SpinRule) -> Result<TessState> {
    let mut s = TessState::new(rule);
    s.apply_word(w)?;
    Ok(s)
}

/// Every state reachable from the base state by a word of length at most
/// three, without duplicates. Two maps of the engine that agree on all of
/// these are treated as equal.
pub fn probe_states(rule: SpinRule) -> Result<Vec<TessState>> {
    let letters = [Letter::Flip, Letter::Rotate, Letter::Toggle];
    let mut words = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..3 {
        let mut next = Vec::new();
        for w in &frontier {
            for l in letters {
                next.push(w.then(&Word::single(l)));
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    let mut out: Vec<TessState> = Vec::new();
    for w in &words {
        let s = run_word(w, rule)?;
        let mut fresh = true;
        for seen in &out {
            if seen.equivalent(&s)? {
                fresh = false;
                break;
            }
        }
        if fresh {
            out.push(s);
        }
    }
    Ok(out)
}

/// Whether two words act identically on every probe state, markings
/// included.
pub fn words_act_equally(u: &Word, v: &Word, rule: SpinRule) -> Result<bool> {
    for p in probe_states(rule)? {
        let mut s1 = p.clone();
        let mut s2 = p;
        s1.apply_word(u)?;
        s2.apply_word(v)?;
        if !s1.equivalent(&s2)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether two words act identically on every probe state, comparing the
/// tesselation and distinguished edge only.
pub fn words_act_equally_unmarked(u: &Word, v: &Word, rule: SpinRule) -> Result<bool> {
    for p in probe_states(rule)? {
        let mut s1 = p.clone();
        let mut s2 = p;
        s1.apply_word(u)?;
        s2.apply_word(v)?;
        if !s1.equal_unmarked(&s2) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn q(p: i64, qq: i64) -> Rational {
        Rational::new(p, qq).unwrap()
    }

    fn run(s: &str) -> TessState {
        run_word(&s.parse().unwrap(), SpinRule::unmarked_model()).unwrap()
    }

    fn run_marked(s: &str) -> TessState {
        run_word(&s.parse().unwrap(), SpinRule::canonical()).unwrap()
    }

    #[test]
    fn rotation_has_order_three() {
        let s = run("b");
        assert_eq!(s.doe(), OrientedEdge::new(q(1, 1), q(0, 1)).unwrap());
        assert!(run("bbb").is_identity().unwrap());
        assert!(!run("b").is_identity().unwrap());
        assert!(!run("bb").is_identity().unwrap());
    }

    #[test]
    fn flip_squared_reverses_the_distinguished_edge() {
        let s = run("a");
        assert_eq!(s.doe(), OrientedEdge::new(q(1, 1), q(-1, 1)).unwrap());
        assert_eq!(s.non_farey_edges(), vec![IdealEdge::new(q(-1, 1), q(1, 1)).unwrap()]);
        let s2 = run("aa");
        assert_eq!(s2.doe(), base_doe().reversed());
        assert!(s2.non_farey_edges().is_empty());
        assert!(run("aaaa").is_identity().unwrap());
        assert!(!run("aa").is_identity().unwrap());
    }

    #[test]
    fn five_alternations_restore_the_base_state() {
        assert!(run("ababababab").is_identity().unwrap());
        for k in 1..5 {
            let w: String = "ab".repeat(k);
            assert!(!run(&w).is_identity().unwrap(), "(ab)^{k} should move the base state");
        }
    }

    #[test]
    fn toggle_marks_the_distinguished_edge() {
        let s = run_marked("t");
        assert!(s.marking().is_marked(&base_doe().underlying()));
        assert!(!s.is_identity().unwrap());
        assert!(run_marked("tt").is_identity().unwrap());
    }

    #[test]
    fn triangle_move_changes_nothing_up_to_equivalence() {
        let mut s1 = run_marked("tba");
        let s2 = run_marked("tba");
        let root = s1.root_triangle();
        s1.apply_triangle_move(&root).unwrap();
        assert!(s1.equivalent(&s2).unwrap());
        assert!(!s1.marking().is_empty());
    }

    #[test]
    fn structural_flip_agrees_with_the_distinguished_flip() {
        let mut s1 = run("bab");
        let mut s2 = run("bab");
        let e = s1.doe().underlying();
        s1.apply_flip().unwrap();
        s2.flip_edge_structural(&e).unwrap();
        assert!(s1.equal_unmarked(&s2));
        let back = s2.flip_edge_structural(&s2.doe().underlying()).unwrap();
        assert!(s2.has_edge(&back));
    }

    #[test]
    fn base_flanks_are_plus_and_minus_one() {
        let s = run("");
        let (c, d) = s.doe_flanks().unwrap();
        assert_eq!((c, d), (q(1, 1), q(-1, 1)));
    }

    #[test]
    fn probe_states_are_distinct() {
        let probes = probe_states(SpinRule::canonical()).unwrap();
        assert!(probes.len() > 10, "expected a spread of probe states, got {}", probes.len());
        for (i, p1) in probes.iter().enumerate() {
            for p2 in &probes[i + 1..] {
                assert!(!p1.equivalent(p2).unwrap());
            }
        }
    }
}
