//! Triangulated surface with boundary built from the identification polygon.
//!
//! The polygon is coned to its centre and barycentrically subdivided; the
//! quotient by the side pairings is an honest simplicial complex after two
//! subdivisions. Every cell remembers its lifts to the polygon together with
//! their deck words, which is all the local system needs.

use super::polygon::{CornerVertex, PolygonScheme};
use crate::surface::{SurfacePresentation, Word};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Boundary parameter units per polygon side.
const SIDE_UNITS: u64 = 1 << 20;

pub const MESH_SCHEMA: &str = "charpoisson-mesh-v1";

/// Which polygon lift of each vertex serves as its base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftChoice {
    #[default]
    First,
    Last,
}

#[derive(Debug, Clone)]
struct Disc {
    pos: Vec<[f64; 2]>,
    /// Position along the polygon boundary, for boundary vertices.
    bpos: Vec<Option<u64>>,
    grade: Vec<u8>,
    triangles: Vec<[usize; 3]>,
}

impl Disc {
    fn cone(sides: usize) -> Self {
        let mut pos = Vec::with_capacity(sides + 1);
        for k in 0..sides {
            let t = std::f64::consts::TAU * k as f64 / sides as f64;
            pos.push([t.cos(), t.sin()]);
        }
        pos.push([0.0, 0.0]);
        let mut bpos: Vec<Option<u64>> = (0..sides as u64).map(|k| Some(k * SIDE_UNITS)).collect();
        bpos.push(None);
        let triangles = (0..sides).map(|k| [sides, k, (k + 1) % sides]).collect();
        Self { pos, bpos, grade: vec![0; sides + 1], triangles }
    }

    fn subdivide(&self, sides: usize) -> Self {
        let total = sides as u64 * SIDE_UNITS;
        let nv = self.pos.len();
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut incidence: Vec<usize> = Vec::new();
        let mut tri_edges = Vec::with_capacity(self.triangles.len());
        for t in &self.triangles {
            let mut ids = [0; 3];
            for (k, (a, b)) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])].into_iter().enumerate() {
                let key = (a.min(b), a.max(b));
                let id = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    incidence.push(0);
                    edges.len() - 1
                });
                incidence[id] += 1;
                ids[k] = id;
            }
            tri_edges.push(ids);
        }

        let mut pos = self.pos.clone();
        let mut bpos = self.bpos.clone();
        let mut grade = vec![0u8; nv];
        for (id, &(a, b)) in edges.iter().enumerate() {
            let (pa, pb) = (self.pos[a], self.pos[b]);
            pos.push([(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0]);
            grade.push(1);
            let mid = match (incidence[id], self.bpos[a], self.bpos[b]) {
                (1, Some(x), Some(y)) => {
                    let (lo, hi) = (x.min(y), x.max(y));
                    if hi - lo > total / 2 {
                        Some(((lo + total + hi) / 2) % total)
                    } else {
                        Some((lo + hi) / 2)
                    }
                }
                _ => None,
            };
            bpos.push(mid);
        }
        let edge_base = nv;
        let tri_base = nv + edges.len();
        let mut triangles = Vec::with_capacity(6 * self.triangles.len());
        for (ti, t) in self.triangles.iter().enumerate() {
            let p: Vec<[f64; 2]> = t.iter().map(|&v| self.pos[v]).collect();
            pos.push([
                (p[0][0] + p[1][0] + p[2][0]) / 3.0,
                (p[0][1] + p[1][1] + p[2][1]) / 3.0,
            ]);
            bpos.push(None);
            grade.push(2);
            let te = tri_edges[ti];
            for &v in t {
                for &e in &te {
                    let (a, b) = edges[e];
                    if a == v || b == v {
                        triangles.push([v, edge_base + e, tri_base + ti]);
                    }
                }
            }
        }
        Self { pos, bpos, grade, triangles }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum CellKey {
    Corner(CornerVertex),
    Side(usize, u64),
    Interior(usize),
}

/// A lift of a vertex to the polygon: a subdivided-polygon vertex and the
/// deck word relative to the canonical lift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexLift {
    pub disc_vertex: usize,
    pub deck: Word,
}

#[derive(Debug, Clone)]
pub struct SurfaceComplex {
    scheme: PolygonScheme,
    disc: Disc,
    level: usize,
    lift_choice: LiftChoice,
    vertex_lifts: Vec<Vec<VertexLift>>,
    distinguished: Vec<usize>,
    vertex_grade: Vec<u8>,
    vertex_circle: Vec<Option<usize>>,
    edges: Vec<[usize; 2]>,
    edge_deck: Vec<Word>,
    edge_triangles: Vec<Vec<usize>>,
    triangles: Vec<[usize; 3]>,
    triangle_edges: Vec<[usize; 3]>,
    triangle_sign: Vec<i8>,
    boundary_edges: Vec<usize>,
    deck_conflicts: usize,
}

impl SurfaceComplex {
    /// Polygon coned and subdivided twice.
    pub fn build(presentation: SurfacePresentation) -> Self {
        Self::build_at_level(presentation, 2)
    }

    pub fn build_at_level(presentation: SurfacePresentation, level: usize) -> Self {
        let scheme = PolygonScheme::new(presentation);
        let mut disc = Disc::cone(scheme.side_count());
        for _ in 0..level {
            disc = disc.subdivide(scheme.side_count());
        }
        Self::from_disc(scheme, disc, level, LiftChoice::First)
    }

    pub fn subdivide(&self) -> Self {
        let disc = self.disc.subdivide(self.scheme.side_count());
        Self::from_disc(self.scheme.clone(), disc, self.level + 1, self.lift_choice)
    }

    pub fn with_lift_choice(&self, choice: LiftChoice) -> Self {
        Self::from_disc(self.scheme.clone(), self.disc.clone(), self.level, choice)
    }

    fn classify(scheme: &PolygonScheme, bpos: Option<u64>, index: usize) -> (CellKey, Word) {
        let Some(b) = bpos else {
            return (CellKey::Interior(index), Word::empty());
        };
        let side = (b / SIDE_UNITS) as usize;
        let t = b % SIDE_UNITS;
        if t == 0 {
            let (v, deck) = &scheme.corners[side];
            return (CellKey::Corner(*v), deck.clone());
        }
        match &scheme.pairing[side] {
            Some((first, gamma)) => (CellKey::Side(*first, SIDE_UNITS - t), gamma.clone()),
            None => (CellKey::Side(side, t), Word::empty()),
        }
    }

    fn from_disc(scheme: PolygonScheme, disc: Disc, level: usize, lift_choice: LiftChoice) -> Self {
        let nd = disc.pos.len();
        let mut class_of_key: HashMap<CellKey, usize> = HashMap::new();
        let mut classes: Vec<(CellKey, Vec<VertexLift>)> = Vec::new();
        for q in 0..nd {
            let (key, deck) = Self::classify(&scheme, disc.bpos[q], q);
            let c = *class_of_key.entry(key).or_insert_with(|| {
                classes.push((key, Vec::new()));
                classes.len() - 1
            });
            classes[c].1.push(VertexLift { disc_vertex: q, deck });
        }
        // Vertex order: (grade, first lift index).
        let mut order: Vec<usize> = (0..classes.len()).collect();
        order.sort_by_key(|&c| (disc.grade[classes[c].1[0].disc_vertex], classes[c].1[0].disc_vertex));
        let mut xv_of_disc = vec![0usize; nd];
        let mut vertex_lifts = Vec::with_capacity(classes.len());
        let mut vertex_grade = Vec::with_capacity(classes.len());
        let mut vertex_circle = Vec::with_capacity(classes.len());
        let mut lift_slot = vec![0usize; nd];
        for (x, &c) in order.iter().enumerate() {
            let (key, lifts) = &classes[c];
            for (s, l) in lifts.iter().enumerate() {
                xv_of_disc[l.disc_vertex] = x;
                lift_slot[l.disc_vertex] = s;
            }
            vertex_grade.push(disc.grade[lifts[0].disc_vertex]);
            vertex_circle.push(match key {
                CellKey::Corner(CornerVertex::Puncture(j)) => Some(*j),
                CellKey::Side(s, _) => scheme.free_side_circle(*s),
                _ => None,
            });
            vertex_lifts.push(lifts.clone());
        }
        let distinguished: Vec<usize> = vertex_lifts
            .iter()
            .map(|l| match lift_choice {
                LiftChoice::First => 0,
                LiftChoice::Last => l.len() - 1,
            })
            .collect();
        // Deck of a polygon vertex relative to the distinguished lift.
        let relative_deck = |q: usize| -> Word {
            let x = xv_of_disc[q];
            let sigma = &vertex_lifts[x][distinguished[x]].deck;
            vertex_lifts[x][lift_slot[q]].deck.concat(&sigma.inverse())
        };

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_deck: Vec<Word> = Vec::new();
        let mut edge_triangles: Vec<Vec<usize>> = Vec::new();
        let mut triangles = Vec::with_capacity(disc.triangles.len());
        let mut triangle_edges = Vec::with_capacity(disc.triangles.len());
        let mut triangle_sign = Vec::with_capacity(disc.triangles.len());
        let mut deck_conflicts = 0;
        for (ti, t) in disc.triangles.iter().enumerate() {
            let mut lifts = *t;
            lifts.sort_by_key(|&q| xv_of_disc[q]);
            let xs = lifts.map(|q| xv_of_disc[q]);
            let p = lifts.map(|q| disc.pos[q]);
            let cross = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[1][1] - p[0][1]) * (p[2][0] - p[0][0]);
            triangle_sign.push(if cross > 0.0 { 1 } else { -1 });
            let mut ids = [0usize; 3];
            for (k, (i, j)) in [(0, 1), (1, 2), (0, 2)].into_iter().enumerate() {
                let key = [xs[i], xs[j]];
                let deck = relative_deck(lifts[i]).inverse().concat(&relative_deck(lifts[j]));
                let id = match edge_index.get(&key) {
                    Some(&id) => {
                        if edge_deck[id] != deck {
                            deck_conflicts += 1;
                        }
                        id
                    }
                    None => {
                        edges.push(key);
                        edge_deck.push(deck);
                        edge_triangles.push(Vec::new());
                        edge_index.insert(key, edges.len() - 1);
                        edges.len() - 1
                    }
                };
                edge_triangles[id].push(ti);
                ids[k] = id;
            }
            triangles.push(xs);
            triangle_edges.push(ids);
        }
        let boundary_edges = (0..edges.len()).filter(|&e| edge_triangles[e].len() == 1).collect();
        Self {
            scheme,
            disc,
            level,
            lift_choice,
            vertex_lifts,
            distinguished,
            vertex_grade,
            vertex_circle,
            edges,
            edge_deck,
            edge_triangles,
            triangles,
            triangle_edges,
            triangle_sign,
            boundary_edges,
            deck_conflicts,
        }
    }

    pub fn presentation(&self) -> &SurfacePresentation {
        &self.scheme.presentation
    }

    pub fn scheme(&self) -> &PolygonScheme {
        &self.scheme
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn lift_choice(&self) -> LiftChoice {
        self.lift_choice
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_lifts.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.triangle_count() as i64
    }

    pub fn vertex_lifts(&self, v: usize) -> &[VertexLift] {
        &self.vertex_lifts[v]
    }

    /// Deck word of the distinguished lift relative to the canonical one.
    pub fn frame_offset(&self, v: usize) -> &Word {
        &self.vertex_lifts[v][self.distinguished[v]].deck
    }

    pub fn vertex_grade(&self, v: usize) -> u8 {
        self.vertex_grade[v]
    }

    /// Boundary circle (0-based) containing `v`.
    pub fn vertex_circle(&self, v: usize) -> Option<usize> {
        self.vertex_circle[v]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.vertex_circle[v].is_some()
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// `gamma_e` with `tilde(v1) = gamma_e . tilde(v1)_distinguished` along the lift of `e`
    /// starting at the distinguished lift of `v0`.
    pub fn edge_deck(&self, e: usize) -> &Word {
        &self.edge_deck[e]
    }

    pub fn edge_triangles(&self, e: usize) -> &[usize] {
        &self.edge_triangles[e]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_triangles[e].len() == 1
    }

    pub fn boundary_edges(&self) -> &[usize] {
        &self.boundary_edges
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Edge ids `(e01, e12, e02)` of a triangle with sorted vertices.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    /// `+1` when the sorted vertex order agrees with the surface orientation.
    pub fn orientation(&self, t: usize) -> i8 {
        self.triangle_sign[t]
    }

    /// Number of edge lifts whose deck disagreed with the first lift seen;
    /// zero for a consistent quotient.
    pub fn deck_conflicts(&self) -> usize {
        self.deck_conflicts
    }

    /// Whether every simplex has distinct vertices and no two triangles
    /// share the same vertex set.
    pub fn is_simplicial(&self) -> bool {
        if self.edges.iter().any(|e| e[0] == e[1]) {
            return false;
        }
        if self.triangles.iter().any(|t| t[0] == t[1] || t[1] == t[2]) {
            return false;
        }
        let mut seen = std::collections::HashSet::new();
        self.triangles.iter().all(|t| seen.insert(*t))
    }

    /// Boundary circles as connected components of boundary edges.
    pub fn boundary_component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut on_boundary = vec![false; n];
        for &e in &self.boundary_edges {
            let [a, b] = self.edges[e];
            on_boundary[a] = true;
            on_boundary[b] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        (0..n).filter(|&v| on_boundary[v] && find(&mut parent, v) == v).count()
    }

    pub fn to_mesh_document(&self) -> MeshDocument {
        MeshDocument {
            schema: MESH_SCHEMA.to_string(),
            genus: self.presentation().genus(),
            punctures: self.presentation().punctures(),
            vertices: self.vertex_count(),
            edges: self.edges.clone(),
            triangles: self.triangles.clone(),
            boundary: self.boundary_edges.clone(),
        }
    }

    pub fn to_mesh_json(&self) -> String {
        serde_json::to_string(&self.to_mesh_document()).expect("mesh serializes")
    }

    /// Rebuilds the complex named by a mesh dump and checks it matches.
    pub fn from_mesh_document(doc: &MeshDocument, level: usize) -> Result<Self> {
        if doc.schema != MESH_SCHEMA {
            return Err(Error::InvalidDocument(format!("unknown schema {:?}", doc.schema)));
        }
        let c = Self::build_at_level(SurfacePresentation::new(doc.genus, doc.punctures)?, level);
        if c.to_mesh_document() != *doc {
            return Err(Error::InvalidDocument("mesh does not match the rebuilt complex".into()));
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshDocument {
    pub schema: String,
    pub genus: usize,
    pub punctures: usize,
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<usize>,
}

pub fn build_surface_complex(genus: usize, punctures: usize) -> Result<SurfaceComplex> {
    Ok(SurfaceComplex::build(SurfacePresentation::new(genus, punctures)?))
}
