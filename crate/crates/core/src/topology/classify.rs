use std::collections::BTreeMap;

use super::{tangential_axes, AxisPos, LocalEntity, Topology, TopologyError, UnionFind};
use crate::geometry::{MultiPatch, Side};
use crate::spline::TensorBasis;

/// Dof sets of one patch, all as tensor indices of its basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchDofs {
    /// homogeneous Dirichlet dofs
    pub eliminated: Vec<bool>,
    /// free dofs without trace on any interface
    pub interior: Vec<usize>,
    /// free dofs with trace on an interface
    pub gamma: Vec<usize>,
    /// local entity whose interior carries each dof (code 0 for interior dofs)
    pub entity: Vec<LocalEntity>,
}

/// Class of patch dofs identified across interfaces.
#[derive(Clone, Debug, PartialEq)]
pub struct DofClass {
    /// `(patch, tensor index)`, sorted
    pub members: Vec<(usize, usize)>,
    pub dirichlet: bool,
}

impl DofClass {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

/// Per-patch dof sets plus the global identification of coupled dofs.
#[derive(Clone, Debug)]
pub struct DofClassification {
    patches: Vec<PatchDofs>,
    /// per patch, per tensor index: dof class
    class_of: Vec<Vec<usize>>,
    classes: Vec<DofClass>,
    /// per class: index in the conforming space, `None` if Dirichlet
    global: Vec<Option<usize>>,
    n_global: usize,
}

impl DofClassification {
    pub fn patch(&self, k: usize) -> &PatchDofs {
        &self.patches[k]
    }

    pub fn patches(&self) -> &[PatchDofs] {
        &self.patches
    }

    pub fn n_patches(&self) -> usize {
        self.patches.len()
    }

    pub fn classes(&self) -> &[DofClass] {
        &self.classes
    }

    pub fn class_of(&self, patch: usize, dof: usize) -> usize {
        self.class_of[patch][dof]
    }

    pub fn multiplicity(&self, patch: usize, dof: usize) -> usize {
        self.classes[self.class_of[patch][dof]].multiplicity()
    }

    /// Dimension of the conforming global space.
    pub fn n_global(&self) -> usize {
        self.n_global
    }

    /// Index of a patch dof in the conforming global space.
    pub fn global_index(&self, patch: usize, dof: usize) -> Option<usize> {
        self.global[self.class_of[patch][dof]]
    }

    /// Free dofs of a patch in increasing tensor order.
    pub fn free_dofs(&self, patch: usize) -> Vec<usize> {
        let e = &self.patches[patch].eliminated;
        (0..e.len()).filter(|&i| !e[i]).collect()
    }

    /// `Σ_k n_free(k) − Σ_classes (multiplicity − 1)` over free classes.
    pub fn counting_identity(&self) -> usize {
        let local: usize = (0..self.patches.len()).map(|k| self.free_dofs(k).len()).sum();
        let coupling: usize = self
            .classes
            .iter()
            .filter(|c| !c.dirichlet)
            .map(|c| c.multiplicity() - 1)
            .sum();
        local - coupling
    }
}

fn entity_of(multi: &[usize], sizes: &[usize]) -> LocalEntity {
    let pos: Vec<AxisPos> = multi
        .iter()
        .zip(sizes)
        .map(|(&m, &n)| {
            if m == 0 {
                AxisPos::Lower
            } else if m + 1 == n {
                AxisPos::Upper
            } else {
                AxisPos::Free
            }
        })
        .collect();
    LocalEntity::from_positions(&pos)
}

/// Checks that both sides of each interface carry the same univariate bases.
fn check_fully_matching(topo: &Topology, bases: &[TensorBasis]) -> Result<(), TopologyError> {
    let d = topo.dim();
    for (i, itf) in topo.interfaces().iter().enumerate() {
        let ta = tangential_axes(d, itf.side_a.axis);
        let tb = tangential_axes(d, itf.side_b.axis);
        let err = |reason: String| TopologyError::NotFullyMatching {
            interface: i,
            patch_a: itf.patch_a,
            patch_b: itf.patch_b,
            reason,
        };
        for (j, &a) in ta.iter().enumerate() {
            let b = tb[itf.orientation.perm[j]];
            let ka = bases[itf.patch_a].knot_vector(a);
            let mut kb = bases[itf.patch_b].knot_vector(b).clone();
            if itf.orientation.flip[j] {
                kb = kb.reversed();
            }
            if ka.degree() != kb.degree() {
                return Err(err(format!(
                    "direction {a} of patch {}: degree {} vs {}",
                    itf.patch_a,
                    ka.degree(),
                    kb.degree()
                )));
            }
            if ka.knots().len() != kb.knots().len() {
                return Err(err(format!(
                    "direction {a} of patch {}: {} vs {} knots",
                    itf.patch_a,
                    ka.knots().len(),
                    kb.knots().len()
                )));
            }
            if let Some(m) = (0..ka.knots().len()).find(|&m| (ka.knots()[m] - kb.knots()[m]).abs() > 1e-12) {
                return Err(err(format!(
                    "direction {a} of patch {}: knot {m} is {} vs {}",
                    itf.patch_a,
                    ka.knots()[m],
                    kb.knots()[m]
                )));
            }
        }
    }
    Ok(())
}

/// Identifies matched interface dofs, eliminates Dirichlet dofs and splits
/// every patch into interior and interface dofs.
///
/// A dof is eliminated if any dof of its class lies on a Dirichlet side.
pub fn classify_dofs(
    mp: &MultiPatch,
    bases: &[TensorBasis],
    topo: &Topology,
) -> Result<DofClassification, TopologyError> {
    let d = mp.dim();
    let n = mp.len();
    if bases.len() != n || bases.iter().any(|b| b.dim() != d) {
        return Err(TopologyError::Invalid(
            "one basis of the multipatch dimension is needed per patch".into(),
        ));
    }
    check_fully_matching(topo, bases)?;

    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    for b in bases {
        offsets.push(offsets.last().unwrap() + b.size());
    }
    let mut uf = UnionFind::new(offsets[n]);
    for itf in topo.interfaces() {
        let (ba, bb) = (&bases[itf.patch_a], &bases[itf.patch_b]);
        let ta = tangential_axes(d, itf.side_a.axis);
        let tb = tangential_axes(d, itf.side_b.axis);
        let (sa, sb) = (ba.sizes(), bb.sizes());
        let mut mb = vec![0usize; d];
        mb[itf.side_b.axis] = if itf.side_b.upper { sb[itf.side_b.axis] - 1 } else { 0 };
        for i in ba.side_indices(itf.side_a.axis, itf.side_a.upper) {
            let ma = ba.multi_index(i);
            for (j, &a) in ta.iter().enumerate() {
                let b = tb[itf.orientation.perm[j]];
                mb[b] = if itf.orientation.flip[j] {
                    sa[a] - 1 - ma[a]
                } else {
                    ma[a]
                };
            }
            uf.union(offsets[itf.patch_a] + i, offsets[itf.patch_b] + bb.index(&mb));
        }
    }

    let mut root_class = BTreeMap::new();
    let mut classes: Vec<DofClass> = Vec::new();
    let mut class_of = Vec::with_capacity(n);
    for (k, basis) in bases.iter().enumerate() {
        let on_dirichlet = {
            let mut mask = vec![false; basis.size()];
            for side in Side::all(d) {
                if mp.is_dirichlet(k, side) {
                    for i in basis.side_indices(side.axis, side.upper) {
                        mask[i] = true;
                    }
                }
            }
            mask
        };
        let mut cls = Vec::with_capacity(basis.size());
        for i in 0..basis.size() {
            let root = uf.find(offsets[k] + i);
            let c = *root_class.entry(root).or_insert_with(|| {
                classes.push(DofClass {
                    members: Vec::new(),
                    dirichlet: false,
                });
                classes.len() - 1
            });
            classes[c].members.push((k, i));
            classes[c].dirichlet |= on_dirichlet[i];
            cls.push(c);
        }
        class_of.push(cls);
    }

    let mut global = vec![None; classes.len()];
    let mut n_global = 0;
    for (c, class) in classes.iter().enumerate() {
        if !class.dirichlet {
            global[c] = Some(n_global);
            n_global += 1;
        }
    }

    let mut patches = Vec::with_capacity(n);
    for (k, basis) in bases.iter().enumerate() {
        let sizes = basis.sizes();
        let mut on_interface = vec![false; basis.size()];
        for side in Side::all(d) {
            if topo.interface_at(k, side).is_some() {
                for i in basis.side_indices(side.axis, side.upper) {
                    on_interface[i] = true;
                }
            }
        }
        let eliminated: Vec<bool> = (0..basis.size()).map(|i| classes[class_of[k][i]].dirichlet).collect();
        let mut interior = Vec::new();
        let mut gamma = Vec::new();
        for i in 0..basis.size() {
            if eliminated[i] {
                continue;
            }
            if on_interface[i] {
                gamma.push(i);
            } else {
                interior.push(i);
            }
        }
        let entity = (0..basis.size())
            .map(|i| entity_of(&basis.multi_index(i), &sizes))
            .collect();
        patches.push(PatchDofs {
            eliminated,
            interior,
            gamma,
            entity,
        });
    }
    Ok(DofClassification {
        patches,
        class_of,
        classes,
        global,
        n_global,
    })
}
