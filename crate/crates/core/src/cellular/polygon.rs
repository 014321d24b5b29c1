//! The identification polygon `prod [a_i, b_i] * prod x_j e_j x_j^-1`.
//!
//! Sides `x_j` are glued in pairs like `a_i`, `b_i`; sides `e_j` stay free
//! and become the boundary circles. Corners are lifts either of the base
//! vertex (deck word = the group element read along the polygon boundary
//! from corner 0) or of the vertex on boundary circle `j`.

use crate::surface::{SurfacePresentation, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SideKind {
    A(usize),
    B(usize),
    X(usize),
    E(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Side {
    pub kind: SideKind,
    pub inverse: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CornerVertex {
    Base,
    /// Vertex on boundary circle `j` (0-based).
    Puncture(usize),
}

#[derive(Debug, Clone)]
pub struct PolygonScheme {
    pub presentation: SurfacePresentation,
    pub sides: Vec<Side>,
    /// Corner `k` is the start of side `k`.
    pub corners: Vec<(CornerVertex, Word)>,
    /// For the second occurrence of a glued side: the first occurrence and
    /// the deck element carrying the first onto the second.
    pub pairing: Vec<Option<(usize, Word)>>,
}

impl PolygonScheme {
    pub fn new(presentation: SurfacePresentation) -> Self {
        let p = presentation;
        let mut sides = Vec::new();
        let mut corners = Vec::new();
        let mut w = Word::empty();
        for i in 1..=p.genus() {
            let letters = [
                (SideKind::A(i), false, p.generator_word(p.a(i))),
                (SideKind::B(i), false, p.generator_word(p.b(i))),
                (SideKind::A(i), true, p.generator_word(p.a(i)).inverse()),
                (SideKind::B(i), true, p.generator_word(p.b(i)).inverse()),
            ];
            for (kind, inverse, letter) in letters {
                corners.push((CornerVertex::Base, w.clone()));
                sides.push(Side { kind, inverse });
                w = w.concat(&letter);
            }
        }
        for j in 1..=p.punctures() {
            let c = p.boundary_word(j).expect("index in range");
            let gamma = w.concat(&c).concat(&w.inverse());
            corners.push((CornerVertex::Base, w.clone()));
            sides.push(Side { kind: SideKind::X(j), inverse: false });
            corners.push((CornerVertex::Puncture(j - 1), Word::empty()));
            sides.push(Side { kind: SideKind::E(j), inverse: false });
            corners.push((CornerVertex::Puncture(j - 1), gamma));
            sides.push(Side { kind: SideKind::X(j), inverse: true });
            w = w.concat(&c);
        }
        debug_assert!(w.is_empty(), "polygon boundary must read the trivial word");

        let n = sides.len();
        let mut pairing = vec![None; n];
        for q in 0..n {
            if !sides[q].inverse {
                continue;
            }
            let first = (0..q)
                .find(|&p| sides[p].kind == sides[q].kind && !sides[p].inverse)
                .expect("inverse side follows its forward side");
            // The deck element maps corner `first` onto corner `q + 1`.
            let w_p = &corners[first].1;
            let w_q1 = &corners[(q + 1) % n].1;
            pairing[q] = Some((first, w_q1.concat(&w_p.inverse())));
        }
        Self { presentation, sides, corners, pairing }
    }

    pub fn side_count(&self) -> usize {
        self.sides.len()
    }

    /// Boundary circle index (0-based) if side `k` is a free side.
    pub fn free_side_circle(&self, k: usize) -> Option<usize> {
        match self.sides[k].kind {
            SideKind::E(j) => Some(j - 1),
            _ => None,
        }
    }
}
