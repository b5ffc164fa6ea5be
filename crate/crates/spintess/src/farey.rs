//! The base tesselation of the disk by ideal triangles with rational
//! vertices, and the word addressing scheme for its oriented edges.

use crate::error::{Error, Result};
use crate::rational::{ccw, Rational};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Unordered pair of distinct boundary points, stored sorted by value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IdealEdge {
    lo: Rational,
    hi: Rational,
}

impl IdealEdge {
    pub fn new(x: Rational, y: Rational) -> Result<Self> {
        if x == y {
            return Err(Error::NotAnEdge(x.to_string(), y.to_string()));
        }
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        Ok(IdealEdge { lo, hi })
    }

    pub fn endpoints(&self) -> (Rational, Rational) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, v: Rational) -> bool {
        self.lo == v || self.hi == v
    }
}

impl fmt::Display for IdealEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.lo, self.hi)
    }
}

/// Ordered pair of distinct boundary points: an edge with a direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrientedEdge {
    pub tail: Rational,
    pub head: Rational,
}

impl OrientedEdge {
    pub fn new(tail: Rational, head: Rational) -> Result<Self> {
        if tail == head {
            return Err(Error::NotAnEdge(tail.to_string(), head.to_string()));
        }
        Ok(OrientedEdge { tail, head })
    }

    pub fn reversed(&self) -> Self {
        OrientedEdge { tail: self.head, head: self.tail }
    }

    pub fn underlying(&self) -> IdealEdge {
        IdealEdge::new(self.tail, self.head).expect("oriented edge has distinct endpoints")
    }
}

impl fmt::Display for OrientedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.tail, self.head)
    }
}

/// Ideal triangle, stored as its three distinct vertices sorted by value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Triangle {
    v: [Rational; 3],
}

impl Triangle {
    pub fn new(x: Rational, y: Rational, z: Rational) -> Result<Self> {
        if x == y || y == z || x == z {
            return Err(Error::NotAnEdge(x.to_string(), z.to_string()));
        }
        let mut v = [x, y, z];
        v.sort();
        Ok(Triangle { v })
    }

    pub fn vertices(&self) -> [Rational; 3] {
        self.v
    }

    pub fn contains_vertex(&self, p: Rational) -> bool {
        self.v.contains(&p)
    }

    /// The three sides, each paired with the opposite vertex.
    pub fn sides_with_opposite(&self) -> [(IdealEdge, Rational); 3] {
        let [a, b, c] = self.v;
        [
            (IdealEdge::new(a, b).unwrap(), c),
            (IdealEdge::new(a, c).unwrap(), b),
            (IdealEdge::new(b, c).unwrap(), a),
        ]
    }

    pub fn sides(&self) -> [IdealEdge; 3] {
        self.sides_with_opposite().map(|(s, _)| s)
    }

    pub fn has_side(&self, e: &IdealEdge) -> bool {
        let (x, y) = e.endpoints();
        self.contains_vertex(x) && self.contains_vertex(y)
    }

    /// Vertex opposite to the given side, if the side belongs to the triangle.
    pub fn opposite_vertex(&self, e: &IdealEdge) -> Option<Rational> {
        if !self.has_side(e) {
            return None;
        }
        self.v.iter().copied().find(|p| !e.contains(*p))
    }
}

impl fmt::Display for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}, {}}}", self.v[0], self.v[1], self.v[2])
    }
}

/// True iff the chords from `a` to `x` and from `a` to `v` leave `b` on the
/// same side; used to test whether `x` and `v` lie on the same side of the
/// chord `{a, b}`. Assumes `x` and `v` are distinct from `a` and `b`.
pub fn same_side(x: Rational, v: Rational, a: Rational, b: Rational) -> bool {
    ccw(a, x, b) == ccw(a, v, b)
}

/// True iff the two chords cross in the open disk. Chords sharing an
/// endpoint do not cross.
pub fn edges_cross(e1: &IdealEdge, e2: &IdealEdge) -> bool {
    let (a, b) = e1.endpoints();
    let (x, y) = e2.endpoints();
    if a == x || a == y || b == x || b == y {
        return false;
    }
    !same_side(x, y, a, b)
}

/// Two points span an edge of the base tesselation iff they are unimodular.
pub fn is_farey_edge(x: Rational, y: Rational) -> bool {
    x.det(&y).abs() == 1
}

/// The third vertices of the two base-tesselation triangles adjacent to a
/// base edge: the mediant and the difference-mediant of the endpoints.
pub fn farey_neighbors(e: &IdealEdge) -> Result<(Rational, Rational)> {
    let (a, b) = e.endpoints();
    if !is_farey_edge(a, b) {
        return Err(Error::NotAnEdge(a.to_string(), b.to_string()));
    }
    let sum_p = a.numer().checked_add(b.numer()).ok_or(Error::Overflow("mediant numerator"))?;
    let sum_q = a.denom().checked_add(b.denom()).ok_or(Error::Overflow("mediant denominator"))?;
    let dif_p = a.numer().checked_sub(b.numer()).ok_or(Error::Overflow("difference numerator"))?;
    let dif_q = a.denom().checked_sub(b.denom()).ok_or(Error::Overflow("difference denominator"))?;
    Ok((Rational::new(sum_p, sum_q)?, Rational::new(dif_p, dif_q)?))
}

/// The distinguished starting edge: `0 -> infinity`.
pub fn base_doe() -> OrientedEdge {
    OrientedEdge { tail: Rational::zero(), head: Rational::infinity() }
}

/// The triangle `{0, 1, infinity}`, the one to the left of the base edge.
pub fn base_triangle() -> Triangle {
    Triangle::new(Rational::zero(), Rational::integer(1), Rational::infinity()).unwrap()
}

/// Of the two base-tesselation vertices adjacent to a base edge, the one to
/// the left of the direction of travel.
pub fn left_vertex(e: &OrientedEdge) -> Result<Rational> {
    let (m, d) = farey_neighbors(&e.underlying())?;
    if !ccw(e.tail, e.head, m) {
        Ok(m)
    } else {
        Ok(d)
    }
}

/// Mirror image of [`left_vertex`].
pub fn right_vertex(e: &OrientedEdge) -> Result<Rational> {
    let (m, d) = farey_neighbors(&e.underlying())?;
    if ccw(e.tail, e.head, m) {
        Ok(m)
    } else {
        Ok(d)
    }
}

/// One counterclockwise rotation of a directed base edge around the triangle
/// on its left: the left vertex becomes the new tail, the old tail the head.
pub fn rotate_edge(e: &OrientedEdge) -> Result<OrientedEdge> {
    Ok(OrientedEdge { tail: left_vertex(e)?, head: e.tail })
}

/// Triangle of the base tesselation lying to the left of a directed edge.
pub fn left_triangle(e: &OrientedEdge) -> Result<Triangle> {
    Triangle::new(e.tail, e.head, left_vertex(e)?)
}

/// A syllable of an edge address: one rotation, a double rotation, or a
/// direction reversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Syllable {
    Rot,
    RotRot,
    Rev,
}

impl Syllable {
    fn is_rotation(self) -> bool {
        matches!(self, Syllable::Rot | Syllable::RotRot)
    }

    fn inverse(self) -> Syllable {
        match self {
            Syllable::Rot => Syllable::RotRot,
            Syllable::RotRot => Syllable::Rot,
            Syllable::Rev => Syllable::Rev,
        }
    }

    fn token(self) -> &'static str {
        match self {
            Syllable::Rot => "B",
            Syllable::RotRot => "BB",
            Syllable::Rev => "A2",
        }
    }
}

/// Address of an oriented edge of the base tesselation: a reduced word whose
/// syllables strictly alternate between rotations and reversals. Applied to
/// the base edge (rightmost syllable first) it produces the addressed edge;
/// distinct reduced words address distinct edges and every edge is reached.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeWord {
    syllables: Vec<Syllable>,
}

impl EdgeWord {
    pub fn new(syllables: Vec<Syllable>) -> Result<Self> {
        for pair in syllables.windows(2) {
            if pair[0].is_rotation() == pair[1].is_rotation() {
                return Err(Error::BadEdgeWord(format!(
                    "adjacent syllables {} {} do not alternate",
                    pair[0].token(),
                    pair[1].token()
                )));
            }
        }
        Ok(EdgeWord { syllables })
    }

    pub fn empty() -> Self {
        EdgeWord { syllables: Vec::new() }
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Every reduced address with at most `max_syllables` syllables.
    pub fn enumerate(max_syllables: usize) -> Vec<EdgeWord> {
        let mut out = vec![EdgeWord::empty()];
        let mut frontier = vec![Vec::<Syllable>::new()];
        for _ in 0..max_syllables {
            let mut next = Vec::new();
            for w in &frontier {
                for s in [Syllable::Rot, Syllable::RotRot, Syllable::Rev] {
                    if let Some(last) = w.last() {
                        if last.is_rotation() == s.is_rotation() {
                            continue;
                        }
                    }
                    let mut v = w.clone();
                    v.push(s);
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned().map(|syllables| EdgeWord { syllables }));
            frontier = next;
        }
        out
    }

    /// Uniformly random reduced address with at most `max_syllables` syllables.
    pub fn random<R: rand::Rng>(rng: &mut R, max_syllables: usize) -> EdgeWord {
        let len = rng.gen_range(0..=max_syllables);
        let mut syllables: Vec<Syllable> = Vec::with_capacity(len);
        for _ in 0..len {
            let rotation_next = match syllables.last() {
                Some(s) => !s.is_rotation(),
                None => rng.gen_bool(0.5),
            };
            if rotation_next {
                syllables.push(if rng.gen_bool(0.5) { Syllable::Rot } else { Syllable::RotRot });
            } else {
                syllables.push(Syllable::Rev);
            }
        }
        EdgeWord { syllables }
    }
}

impl fmt::Display for EdgeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return write!(f, "e");
        }
        let toks: Vec<&str> = self.syllables.iter().map(|s| s.token()).collect();
        write!(f, "{}", toks.join(" "))
    }
}

impl FromStr for EdgeWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "e" {
            return Ok(EdgeWord::empty());
        }
        let mut syllables = Vec::new();
        for tok in s.split_whitespace() {
            let syl = match tok.to_ascii_uppercase().as_str() {
                "B" => Syllable::Rot,
                "BB" => Syllable::RotRot,
                "A2" => Syllable::Rev,
                other => {
                    return Err(Error::BadEdgeWord(format!("unknown token `{other}`")));
                }
            };
            syllables.push(syl);
        }
        EdgeWord::new(syllables)
    }
}

/// Resolve an address to the directed edge it names, starting from the base
/// edge and applying syllables from the right end of the word.
pub fn edge_from_word(word: &EdgeWord) -> Result<OrientedEdge> {
    let mut cur = base_doe();
    for syl in word.syllables.iter().rev() {
        cur = match syl {
            Syllable::Rot => rotate_edge(&cur)?,
            Syllable::RotRot => rotate_edge(&rotate_edge(&cur)?)?,
            Syllable::Rev => cur.reversed(),
        };
    }
    Ok(cur)
}

/// Of the three sides of `tri`, the one separating it from the base triangle.
/// Undefined (returns an error) when `tri` is the base triangle itself.
fn separating_side(tri: &Triangle) -> Result<IdealEdge> {
    let home = base_triangle();
    for (side, opp) in tri.sides_with_opposite() {
        let (x, y) = side.endpoints();
        let beyond = home
            .vertices()
            .into_iter()
            .filter(|v| !side.contains(*v))
            .all(|v| !same_side(opp, v, x, y));
        if beyond {
            return Ok(side);
        }
    }
    Err(Error::BadEdgeWord(format!("no side of {tri} separates it from the base triangle")))
}

/// Inverse of [`edge_from_word`]: the unique reduced address of a directed
/// base edge, found by walking the triangle on its left back to the base
/// triangle and recording the moves.
pub fn word_from_edge(target: &OrientedEdge) -> Result<EdgeWord> {
    if !is_farey_edge(target.tail, target.head) {
        return Err(Error::NotAnEdge(target.tail.to_string(), target.head.to_string()));
    }
    let base = base_doe();
    let home = base_triangle();
    let mut cur = *target;
    let mut temporal: Vec<Syllable> = Vec::new();
    loop {
        if cur == base {
            break;
        }
        let tri = left_triangle(&cur)?;
        if tri == home {
            let mut k = 0;
            while cur != base {
                cur = rotate_edge(&cur)?;
                k += 1;
                debug_assert!(k <= 2, "rotation in the base triangle must close up");
            }
            temporal.push(if k == 1 { Syllable::Rot } else { Syllable::RotRot });
            break;
        }
        let sep = separating_side(&tri)?;
        let mut k = 0;
        while cur.underlying() != sep {
            cur = rotate_edge(&cur)?;
            k += 1;
            debug_assert!(k <= 2, "some rotation must land on the separating side");
        }
        match k {
            0 => {}
            1 => temporal.push(Syllable::Rot),
            _ => temporal.push(Syllable::RotRot),
        }
        cur = cur.reversed();
        temporal.push(Syllable::Rev);
    }
    // The first undo move cancels the leftmost syllable of the address, so
    // the address is the temporal sequence inverted syllable by syllable,
    // in the same order.
    let syllables: Vec<Syllable> = temporal.into_iter().map(Syllable::inverse).collect();
    EdgeWord::new(syllables)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q).unwrap()
    }

    fn edge(a: Rational, b: Rational) -> IdealEdge {
        IdealEdge::new(a, b).unwrap()
    }

    #[test]
    fn unimodularity_detects_base_edges() {
        assert!(is_farey_edge(Rational::zero(), Rational::infinity()));
        assert!(is_farey_edge(r(1, 2), r(1, 3)));
        assert!(is_farey_edge(r(2, 5), r(1, 2)));
        assert!(!is_farey_edge(r(1, 3), r(1, 1)));
        assert!(!is_farey_edge(Rational::zero(), r(2, 1)));
    }

    #[test]
    fn neighbor_vertices_of_base_edges() {
        let (m, d) = farey_neighbors(&edge(Rational::zero(), r(1, 1))).unwrap();
        assert_eq!((m, d), (r(1, 2), Rational::infinity()));

        let (m, d) = farey_neighbors(&edge(r(1, 2), r(1, 3))).unwrap();
        assert_eq!((m, d), (r(2, 5), Rational::zero()));

        let (m, d) = farey_neighbors(&edge(Rational::zero(), Rational::infinity())).unwrap();
        assert_eq!((m, d), (r(1, 1), r(-1, 1)));

        assert!(farey_neighbors(&edge(r(1, 3), r(1, 1))).is_err());
    }

    #[test]
    fn left_and_right_of_the_base_edge() {
        let doe = base_doe();
        assert_eq!(left_vertex(&doe).unwrap(), r(1, 1));
        assert_eq!(right_vertex(&doe).unwrap(), r(-1, 1));
        assert_eq!(left_vertex(&doe.reversed()).unwrap(), r(-1, 1));
        assert_eq!(left_triangle(&doe).unwrap(), base_triangle());
    }

    #[test]
    fn rotation_cycles_the_left_triangle() {
        let doe = base_doe();
        let once = rotate_edge(&doe).unwrap();
        assert_eq!(once, OrientedEdge::new(r(1, 1), Rational::zero()).unwrap());
        let twice = rotate_edge(&once).unwrap();
        assert_eq!(twice, OrientedEdge::new(Rational::infinity(), r(1, 1)).unwrap());
        let thrice = rotate_edge(&twice).unwrap();
        assert_eq!(thrice, doe);
        for e in [doe, once, twice] {
            assert_eq!(left_triangle(&e).unwrap(), base_triangle());
        }
    }

    #[test]
    fn word_alternation_is_enforced() {
        use Syllable::*;
        assert!(EdgeWord::new(vec![Rot, Rot]).is_err());
        assert!(EdgeWord::new(vec![Rot, RotRot]).is_err());
        assert!(EdgeWord::new(vec![Rev, Rev]).is_err());
        assert!(EdgeWord::new(vec![Rot, Rev, RotRot, Rev]).is_ok());
    }

    #[test]
    fn specific_addresses() {
        let resolve = |s: &str| edge_from_word(&s.parse().unwrap()).unwrap();
        assert_eq!(resolve("e"), base_doe());
        assert_eq!(resolve("B"), OrientedEdge::new(r(1, 1), Rational::zero()).unwrap());
        assert_eq!(resolve("BB"), OrientedEdge::new(Rational::infinity(), r(1, 1)).unwrap());
        assert_eq!(resolve("A2"), base_doe().reversed());
        assert_eq!(resolve("B A2"), OrientedEdge::new(r(-1, 1), Rational::infinity()).unwrap());
    }

    #[test]
    fn reversal_address_is_recovered() {
        let w = word_from_edge(&base_doe().reversed()).unwrap();
        assert_eq!(w.to_string(), "A2");
    }

    #[test]
    fn addresses_round_trip_and_separate_edges() {
        let words = EdgeWord::enumerate(6);
        let mut seen = std::collections::HashSet::new();
        for w in &words {
            let e = edge_from_word(w).expect("resolving a short address");
            assert!(seen.insert(e), "address {w} collides with an earlier word at {e}");
            let back = word_from_edge(&e).expect("addressing a resolved edge");
            assert_eq!(&back, w, "round trip failed for {w}: got {back} via {e}");
        }
    }

    #[test]
    fn display_parse_round_trip() {
        for s in ["e", "B", "BB", "A2", "B A2 BB", "A2 B A2 BB A2"] {
            let w: EdgeWord = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
        assert!("B X".parse::<EdgeWord>().is_err());
        assert!("B BB".parse::<EdgeWord>().is_err());
    }
}
