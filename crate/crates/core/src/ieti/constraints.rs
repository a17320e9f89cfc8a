use super::{Discretization, EdgeAverageSupport, IetiError, PrimalChoice};
use crate::linalg::SparseMatrix;
use crate::topology::{EntityKind, LocalEntity};

/// One global primal dof: the value or average associated with an entity class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimalDof {
    /// index into the topology's entity classes
    pub class: usize,
    pub kind: EntityKind,
}

/// Primal constraints of one patch.
#[derive(Clone, Debug)]
pub struct PatchConstraints {
    /// `C^(k)`, one row per incident primal dof, columns are free dofs
    pub matrix: SparseMatrix,
    /// `R_c^(k)`: global primal index of each row
    pub primal_index: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct PrimalConstraints {
    pub primal: Vec<PrimalDof>,
    pub patches: Vec<PatchConstraints>,
}

impl PrimalConstraints {
    pub fn n_primal(&self) -> usize {
        self.primal.len()
    }
}

/// Builds `C^(k)` and `R_c^(k)` for every patch.
///
/// Vertex rows select the corner coefficient. Average rows weight the chosen
/// free coefficients equally: face averages use every dof with nonzero trace
/// on the open face, edge averages (faces of 2D domains included) use the
/// edge interior plus, depending on `support`, the endpoint dofs.
/// Classes without free dofs are skipped.
pub fn build_primal_constraints(
    disc: &Discretization,
    choice: PrimalChoice,
    support: EdgeAverageSupport,
) -> Result<PrimalConstraints, IetiError> {
    let d = disc.dim();
    choice.validate(d)?;
    let topo = disc.topology();
    let cls = disc.classification();
    let n = disc.n_patches();

    // per patch: tensor dofs grouped by entity code
    let groups: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|k| {
            let mut g = vec![Vec::new(); 3usize.pow(d as u32)];
            for (t, e) in cls.patch(k).entity.iter().enumerate() {
                if !cls.patch(k).eliminated[t] {
                    g[e.0].push(t);
                }
            }
            g
        })
        .collect();
    let support_of = |k: usize, e: LocalEntity, closure: bool| -> Vec<usize> {
        let mut out: Vec<usize> = if closure {
            LocalEntity::all(d)
                .filter(|f| f.is_in_closure_of(e, d))
                .flat_map(|f| groups[k][f.0].iter().copied())
                .collect()
        } else {
            groups[k][e.0].clone()
        };
        out.sort_unstable();
        out
    };

    // edges in the sense of the primal choice: 3D edges, 2D interface curves
    let edge_kind = if d == 3 { EntityKind::Edge } else { EntityKind::Face };
    let edge_closure = support.includes_endpoints(choice);
    let mut wanted: Vec<(EntityKind, bool)> = Vec::new();
    if choice.vertices {
        wanted.push((EntityKind::Vertex, false));
    }
    if choice.edges {
        wanted.push((edge_kind, edge_closure));
    }
    if choice.faces {
        wanted.push((EntityKind::Face, true));
    }

    let mut primal = Vec::new();
    let mut rows: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); n];
    for &(kind, closure) in &wanted {
        for c in topo.interior(kind) {
            let class = &topo.classes()[c];
            let members: Vec<(usize, Vec<usize>)> = class
                .members
                .iter()
                .map(|&(k, e)| (k, support_of(k, e, closure)))
                .collect();
            if members.iter().any(|(_, s)| s.is_empty()) {
                continue;
            }
            let idx = primal.len();
            primal.push(PrimalDof { class: c, kind });
            for (k, s) in members {
                rows[k].push((idx, s));
            }
        }
    }

    let mut patches = Vec::with_capacity(n);
    for (k, patch_rows) in rows.into_iter().enumerate() {
        let sys = disc.system(k);
        let mut triplets = Vec::new();
        let mut primal_index = Vec::with_capacity(patch_rows.len());
        for (r, (idx, dofs)) in patch_rows.iter().enumerate() {
            let w = 1.0 / dofs.len() as f64;
            for &t in dofs {
                triplets.push((r, sys.local_index(t).expect("support dofs are free"), w));
            }
            primal_index.push(*idx);
        }
        let matrix = SparseMatrix::from_triplets(patch_rows.len(), sys.n_free(), triplets)?;
        if primal_index.is_empty() && !cls.patch(k).eliminated.iter().any(|&e| e) {
            return Err(IetiError::FloatingPatch { patch: k });
        }
        patches.push(PatchConstraints {
            matrix,
            primal_index,
        });
    }
    Ok(PrimalConstraints { primal, patches })
}
