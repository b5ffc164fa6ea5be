//! Markings: parity decorations on the edges of a tesselation, considered up
//! to the move that toggles the three sides of one triangle.

use crate::error::{Error, Result};
use crate::farey::{
    base_triangle, farey_neighbors, is_farey_edge, same_side, IdealEdge, Triangle,
};
use crate::gf2::{span_solve, BitRow};
use std::collections::{BTreeMap, BTreeSet};

/// Access to the triangles of an ideal tesselation of the disk. The dual
/// graph of any such tesselation is an infinite trivalent tree.
pub trait Tesselation {
    fn has_edge(&self, e: &IdealEdge) -> bool;

    /// The two triangles meeting along an edge of the tesselation.
    fn triangle_pair(&self, e: &IdealEdge) -> Result<(Triangle, Triangle)>;

    /// A fixed triangle used as the starting point for walks.
    fn root_triangle(&self) -> Triangle;
}

/// The base tesselation by all unimodular chords.
#[derive(Debug, Clone, Copy, Default)]
pub struct FareyAmbient;

impl Tesselation for FareyAmbient {
    fn has_edge(&self, e: &IdealEdge) -> bool {
        let (a, b) = e.endpoints();
        is_farey_edge(a, b)
    }

    fn triangle_pair(&self, e: &IdealEdge) -> Result<(Triangle, Triangle)> {
        let (a, b) = e.endpoints();
        let (m, d) = farey_neighbors(e)?;
        Ok((Triangle::new(a, b, m)?, Triangle::new(a, b, d)?))
    }

    fn root_triangle(&self) -> Triangle {
        base_triangle()
    }
}

/// A finitely supported parity function on edges.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Marking {
    odd: BTreeSet<IdealEdge>,
}

impl Marking {
    pub fn empty() -> Self {
        Marking::default()
    }

    pub fn from_edges<I: IntoIterator<Item = IdealEdge>>(edges: I) -> Self {
        // duplicate edges cancel in pairs
        let mut m = Marking::empty();
        for e in edges {
            m.toggle(e);
        }
        m
    }

    pub fn is_marked(&self, e: &IdealEdge) -> bool {
        self.odd.contains(e)
    }

    pub fn toggle(&mut self, e: IdealEdge) {
        if !self.odd.remove(&e) {
            self.odd.insert(e);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = &IdealEdge> {
        self.odd.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.odd.is_empty()
    }

    pub fn len(&self) -> usize {
        self.odd.len()
    }

    pub fn clear(&mut self) {
        self.odd.clear();
    }

    /// Toggle the three sides of a triangle.
    pub fn apply_triangle_move(&mut self, t: &Triangle) {
        for side in t.sides() {
            self.toggle(side);
        }
    }

    /// The pointwise sum of two markings.
    pub fn symmetric_difference(&self, other: &Marking) -> Marking {
        let mut m = self.clone();
        for e in &other.odd {
            m.toggle(*e);
        }
        m
    }
}

/// The triangle on the other side of one of `cur`'s sides.
pub fn other_triangle<T: Tesselation>(tess: &T, cur: &Triangle, side: &IdealEdge) -> Result<Triangle> {
    let (t1, t2) = tess.triangle_pair(side)?;
    if t1 == *cur {
        Ok(t2)
    } else if t2 == *cur {
        Ok(t1)
    } else {
        Err(Error::Unsupported(format!("{cur} is not adjacent to {side}")))
    }
}

/// From a triangle not having `goal` as a side, the unique side to cross to
/// get nearer to `goal`, together with the triangle beyond it.
pub fn step_toward<T: Tesselation>(
    tess: &T,
    cur: &Triangle,
    goal: &IdealEdge,
) -> Result<(IdealEdge, Triangle)> {
    debug_assert!(!cur.has_side(goal));
    let (u, v) = goal.endpoints();
    for (side, opp) in cur.sides_with_opposite() {
        let (x, y) = side.endpoints();
        let beyond = [u, v]
            .into_iter()
            .filter(|w| !side.contains(*w))
            .all(|w| !same_side(opp, w, x, y));
        if beyond {
            return Ok((side, other_triangle(tess, cur, &side)?));
        }
    }
    Err(Error::Unsupported(format!("no side of {cur} separates it from {goal}")))
}

/// The triangles visited on the walk from `from` to a triangle having `goal`
/// as a side, endpoints included, with the edges crossed along the way.
pub fn walk_toward<T: Tesselation>(
    tess: &T,
    from: Triangle,
    goal: &IdealEdge,
) -> Result<(Vec<Triangle>, Vec<IdealEdge>)> {
    let mut tris = vec![from];
    let mut crossed = Vec::new();
    let mut cur = from;
    while !cur.has_side(goal) {
        let (side, next) = step_toward(tess, &cur, goal)?;
        crossed.push(side);
        tris.push(next);
        cur = next;
    }
    Ok((tris, crossed))
}

/// The finite subtree of the dual tree spanned by the root and every triangle
/// touching the marking, with the dual edges connecting it.
fn marked_core<T: Tesselation>(
    tess: &T,
    marking: &Marking,
) -> Result<(BTreeSet<Triangle>, BTreeSet<IdealEdge>)> {
    let root = tess.root_triangle();
    let mut tris = BTreeSet::from([root]);
    let mut edges = BTreeSet::new();
    for e in marking.support() {
        if !tess.has_edge(e) {
            let (a, b) = e.endpoints();
            return Err(Error::EdgeNotPresent(a.to_string(), b.to_string()));
        }
        let (walk_tris, crossed) = walk_toward(tess, root, e)?;
        tris.extend(walk_tris);
        edges.extend(crossed);
        // include both triangles flanking the marked edge itself
        let near = *tris
            .iter()
            .find(|t| t.has_side(e))
            .expect("walk ends on a triangle flanking the goal");
        tris.insert(other_triangle(tess, &near, e)?);
        edges.insert(*e);
    }
    Ok((tris, edges))
}

/// Two-color the core subtree: crossing a marked edge flips the color,
/// crossing an unmarked one keeps it.
fn color_core<T: Tesselation>(
    tess: &T,
    marking: &Marking,
    core_edges: &BTreeSet<IdealEdge>,
) -> Result<BTreeMap<Triangle, bool>> {
    let root = tess.root_triangle();
    let mut color = BTreeMap::from([(root, false)]);
    let mut queue = vec![root];
    while let Some(t) = queue.pop() {
        let here = color[&t];
        for side in t.sides() {
            if !core_edges.contains(&side) {
                continue;
            }
            let nb = other_triangle(tess, &t, &side)?;
            let c = here ^ marking.is_marked(&side);
            if let Some(prev) = color.get(&nb) {
                debug_assert_eq!(*prev, c, "coloring in a tree cannot conflict");
            } else {
                color.insert(nb, c);
                queue.push(nb);
            }
        }
    }
    Ok(color)
}

/// Whether the marking is a sum of triangle moves.
///
/// Across each marked edge the two flanking triangles disagree in the
/// two-coloring; a sum of finitely many triangle moves exists exactly when
/// one color class of the dual tree is finite, i.e. when every direction
/// escaping the core subtree carries the same color.
pub fn is_trivial<T: Tesselation>(tess: &T, marking: &Marking) -> Result<bool> {
    if marking.is_empty() {
        return Ok(true);
    }
    let (tris, core_edges) = marked_core(tess, marking)?;
    let color = color_core(tess, marking, &core_edges)?;
    debug_assert_eq!(color.len(), tris.len());
    let mut escape_color = None;
    for t in &tris {
        let degree = t.sides().iter().filter(|s| core_edges.contains(s)).count();
        if degree == 3 {
            continue;
        }
        let c = color[t];
        match escape_color {
            None => escape_color = Some(c),
            Some(f) if f != c => return Ok(false),
            _ => {}
        }
    }
    Ok(true)
}

/// Whether two markings differ by a sum of triangle moves.
pub fn equivalent<T: Tesselation>(tess: &T, a: &Marking, b: &Marking) -> Result<bool> {
    is_trivial(tess, &a.symmetric_difference(b))
}

/// Independent check of [`is_trivial`] by linear algebra: collect a finite
/// set of candidate triangles large enough to contain any witness, and ask
/// whether the marking lies in the span of their side triples. Returns the
/// witness triangles when it does.
pub fn oracle_is_trivial<T: Tesselation>(
    tess: &T,
    marking: &Marking,
) -> Result<Option<Vec<Triangle>>> {
    if marking.is_empty() {
        return Ok(Some(Vec::new()));
    }
    let (core_tris, _) = marked_core(tess, marking)?;
    // pad the candidate set with one extra ring around the core
    let mut candidates = core_tris.clone();
    for t in &core_tris {
        for side in t.sides() {
            candidates.insert(other_triangle(tess, t, &side)?);
        }
    }
    let candidates: Vec<Triangle> = candidates.into_iter().collect();

    let mut edge_index = BTreeMap::new();
    for t in &candidates {
        for side in t.sides() {
            let next = edge_index.len();
            edge_index.entry(side).or_insert(next);
        }
    }
    for e in marking.support() {
        let next = edge_index.len();
        edge_index.entry(*e).or_insert(next);
    }

    let width = edge_index.len();
    let vectors: Vec<BitRow> = candidates
        .iter()
        .map(|t| {
            let mut row = BitRow::zeros(width);
            for side in t.sides() {
                row.set(edge_index[&side]);
            }
            row
        })
        .collect();
    let mut target = BitRow::zeros(width);
    for e in marking.support() {
        target.set(edge_index[e]);
    }

    Ok(span_solve(&vectors, &target).map(|combo| combo.into_iter().map(|i| candidates[i]).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    fn e(a: Rational, b: Rational) -> IdealEdge {
        IdealEdge::new(a, b).unwrap()
    }

    fn checked_trivial(m: &Marking) -> bool {
        let tess = FareyAmbient;
        let fast = is_trivial(&tess, m).unwrap();
        let witness = oracle_is_trivial(&tess, m).unwrap();
        assert_eq!(fast, witness.is_some(), "decision procedures disagree on {m:?}");
        if let Some(tris) = witness {
            let mut undo = m.clone();
            for t in &tris {
                undo.apply_triangle_move(t);
            }
            assert!(undo.is_empty(), "witness does not cancel the marking");
        }
        fast
    }

    #[test]
    fn empty_and_single_triangle() {
        assert!(checked_trivial(&Marking::empty()));
        let mut m = Marking::empty();
        m.apply_triangle_move(&base_triangle());
        assert_eq!(m.len(), 3);
        assert!(checked_trivial(&m));
    }

    #[test]
    fn single_edge_is_not_trivial() {
        let m = Marking::from_edges([e(Rational::zero(), Rational::infinity())]);
        assert!(!checked_trivial(&m));
        let deep = Marking::from_edges([e(r(1, 3), r(2, 5))]);
        assert!(!checked_trivial(&deep));
    }

    #[test]
    fn two_sides_of_a_triangle_are_not_trivial() {
        let m = Marking::from_edges([
            e(Rational::zero(), r(1, 1)),
            e(r(1, 1), Rational::infinity()),
        ]);
        assert!(!checked_trivial(&m));
    }

    #[test]
    fn adjacent_triangle_moves_leave_four_edges() {
        let mut m = Marking::empty();
        m.apply_triangle_move(&base_triangle());
        m.apply_triangle_move(&Triangle::new(Rational::zero(), r(1, 2), r(1, 1)).unwrap());
        assert_eq!(m.len(), 4, "the shared side cancels");
        assert!(checked_trivial(&m));
    }

    #[test]
    fn distant_triangle_move_is_trivial() {
        let mut m = Marking::empty();
        m.apply_triangle_move(&Triangle::new(r(1, 3), r(2, 5), r(1, 2)).unwrap());
        assert!(checked_trivial(&m));
        m.toggle(e(Rational::zero(), Rational::infinity()));
        assert!(!checked_trivial(&m));
    }

    #[test]
    fn equivalence_is_translation_by_moves() {
        let tess = FareyAmbient;
        let m1 = Marking::from_edges([e(Rational::zero(), r(1, 1))]);
        let mut m2 = m1.clone();
        m2.apply_triangle_move(&base_triangle());
        m2.apply_triangle_move(&Triangle::new(r(1, 1), r(3, 2), r(2, 1)).unwrap());
        assert!(equivalent(&tess, &m1, &m2).unwrap());
        assert!(!equivalent(&tess, &m1, &Marking::empty()).unwrap());
    }

    #[test]
    fn walks_terminate_on_goal_triangles() {
        let tess = FareyAmbient;
        let goal = e(r(3, 5), r(5, 8));
        let (tris, crossed) = walk_toward(&tess, base_triangle(), &goal).unwrap();
        assert!(tris.last().unwrap().has_side(&goal));
        assert_eq!(tris.len(), crossed.len() + 1);
        // every consecutive pair shares the crossed edge
        for (i, side) in crossed.iter().enumerate() {
            assert!(tris[i].has_side(side) && tris[i + 1].has_side(side));
        }
    }
}
