//! Interface matching, vertex/edge/face classes and per-patch dof classification.

mod classify;
mod matching;

use thiserror::Error;

use crate::geometry::{GeometryError, Side};

pub use classify::{classify_dofs, DofClass, DofClassification, PatchDofs};
pub use matching::{build_topology, MATCH_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("non-matching interface: side {side} of patch {patch} partially overlaps patch {other}")]
    NonMatching { patch: usize, side: Side, other: usize },
    #[error("unassigned boundary: side {side} of patch {patch} is neither an interface nor Dirichlet")]
    UnassignedBoundary { patch: usize, side: Side },
    #[error("fully matching violated at interface {interface} (patches {patch_a}, {patch_b}): {reason}")]
    NotFullyMatching {
        interface: usize,
        patch_a: usize,
        patch_b: usize,
        reason: String,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Position of a local entity along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxisPos {
    Free,
    Lower,
    Upper,
}

/// A face, edge or vertex of the parameter box, one [`AxisPos`] per axis.
///
/// Encoded base 3 (`Free = 0`, `Lower = 1`, `Upper = 2`, axis 0 least significant);
/// code 0 is the box interior.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalEntity(pub usize);

impl LocalEntity {
    pub fn from_positions(pos: &[AxisPos]) -> Self {
        let mut code = 0;
        for p in pos.iter().rev() {
            code = code * 3
                + match p {
                    AxisPos::Free => 0,
                    AxisPos::Lower => 1,
                    AxisPos::Upper => 2,
                };
        }
        LocalEntity(code)
    }

    pub fn positions(&self, d: usize) -> Vec<AxisPos> {
        let mut c = self.0;
        (0..d)
            .map(|_| {
                let p = match c % 3 {
                    0 => AxisPos::Free,
                    1 => AxisPos::Lower,
                    _ => AxisPos::Upper,
                };
                c /= 3;
                p
            })
            .collect()
    }

    /// Number of fixed axes.
    pub fn codim(&self, d: usize) -> usize {
        self.positions(d).iter().filter(|&&p| p != AxisPos::Free).count()
    }

    /// True if `self` lies in the closure of `other`.
    pub fn is_in_closure_of(&self, other: LocalEntity, d: usize) -> bool {
        self.positions(d)
            .iter()
            .zip(other.positions(d))
            .all(|(&a, b)| b == AxisPos::Free || a == b)
    }

    /// All boundary entities of a `d`-dimensional box.
    pub fn all(d: usize) -> impl Iterator<Item = LocalEntity> {
        (1..3usize.pow(d as u32)).map(LocalEntity)
    }
}

/// Kind of a global entity class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityKind {
    /// codimension 1 (an interface curve in 2D)
    Face,
    /// codimension 2 in 3D
    Edge,
    /// codimension d
    Vertex,
}

impl EntityKind {
    pub fn from_codim(codim: usize, d: usize) -> Self {
        if codim == d {
            EntityKind::Vertex
        } else if codim == 1 {
            EntityKind::Face
        } else {
            EntityKind::Edge
        }
    }
}

/// Orientation map between the tangential parameters of two matched sides.
///
/// Tangential axis `j` of side a (axes other than the normal, increasing)
/// corresponds to tangential axis `perm[j]` of side b, reversed if `flip[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub perm: Vec<usize>,
    pub flip: Vec<bool>,
}

impl Orientation {
    /// Side-b parameters of the side-a parameters `s`.
    pub fn map(&self, s: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; s.len()];
        for (j, &v) in s.iter().enumerate() {
            out[self.perm[j]] = if self.flip[j] { 1.0 - v } else { v };
        }
        out
    }

    pub fn inverse(&self) -> Orientation {
        let n = self.perm.len();
        let mut perm = vec![0; n];
        let mut flip = vec![false; n];
        for j in 0..n {
            perm[self.perm[j]] = j;
            flip[self.perm[j]] = self.flip[j];
        }
        Orientation { perm, flip }
    }
}

/// Axes of `[0,1]^d` tangential to sides normal to `axis`.
pub fn tangential_axes(d: usize, axis: usize) -> Vec<usize> {
    (0..d).filter(|&a| a != axis).collect()
}

/// Two patch sides sharing their full image.
#[derive(Clone, Debug, PartialEq)]
pub struct Interface {
    pub patch_a: usize,
    pub side_a: Side,
    pub patch_b: usize,
    pub side_b: Side,
    pub orientation: Orientation,
}

/// Equivalence class of local entities glued by interfaces.
#[derive(Clone, Debug, PartialEq)]
pub struct EntityClass {
    pub kind: EntityKind,
    /// `(patch, local entity)`, sorted
    pub members: Vec<(usize, LocalEntity)>,
    /// lies in the closure of a Dirichlet side
    pub dirichlet: bool,
}

impl EntityClass {
    pub fn patches(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.members.iter().map(|m| m.0).collect();
        p.dedup();
        p
    }

    pub fn is_shared(&self) -> bool {
        self.patches().len() > 1
    }
}

/// Interfaces and entity classes of a multipatch.
#[derive(Clone, Debug)]
pub struct Topology {
    pub(crate) dim: usize,
    pub(crate) interfaces: Vec<Interface>,
    /// per patch, per side (`2 * axis + upper`): interface index
    pub(crate) side_interface: Vec<Vec<Option<usize>>>,
    /// per patch, per entity code: class index (`None` for the interior code 0)
    pub(crate) entity_class: Vec<Vec<Option<usize>>>,
    pub(crate) classes: Vec<EntityClass>,
}

impl Topology {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_patches(&self) -> usize {
        self.entity_class.len()
    }

    pub fn interfaces(&self) -> &[Interface] {
        &self.interfaces
    }

    pub fn interface_at(&self, patch: usize, side: Side) -> Option<usize> {
        self.side_interface[patch][2 * side.axis + usize::from(side.upper)]
    }

    pub fn classes(&self) -> &[EntityClass] {
        &self.classes
    }

    pub fn class_of(&self, patch: usize, entity: LocalEntity) -> Option<usize> {
        self.entity_class[patch][entity.0]
    }

    /// Classes of the given kind shared by at least two patches.
    pub fn shared(&self, kind: EntityKind) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&c| self.classes[c].kind == kind && self.classes[c].is_shared())
            .collect()
    }

    /// Shared classes of the given kind not touching the Dirichlet boundary.
    pub fn interior(&self, kind: EntityKind) -> Vec<usize> {
        self.shared(kind)
            .into_iter()
            .filter(|&c| !self.classes[c].dirichlet)
            .collect()
    }

    pub fn faces(&self) -> Vec<usize> {
        self.shared(EntityKind::Face)
    }

    /// Always empty in 2D.
    pub fn edges(&self) -> Vec<usize> {
        self.shared(EntityKind::Edge)
    }

    pub fn vertices(&self) -> Vec<usize> {
        self.shared(EntityKind::Vertex)
    }
}

/// Minimal union-find with path halving.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, keeps class numbering stable
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}
