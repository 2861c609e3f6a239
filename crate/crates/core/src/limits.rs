//! Search caps and enumeration bounds. Each can be overridden by an
//! environment variable of the form `GINV_<NAME>`.

use std::env;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Largest vertex count for which the lattice is enumerated.
    pub lattice_vertices: usize,
    pub cycle_cap: usize,
    pub cone_bound: usize,
    pub cone_search_cap: usize,
    pub bfs_states: usize,
    pub lattice_isos: usize,
    pub diagram_candidates: usize,
    pub search_nodes: usize,
    /// Coefficient bound when searching for diagram isomorphisms.
    pub iso_coeff: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            lattice_vertices: 20,
            cycle_cap: 1_000_000,
            cone_bound: 12,
            cone_search_cap: 100_000,
            bfs_states: 100_000,
            lattice_isos: 10_000,
            diagram_candidates: 10_000,
            search_nodes: 100_000,
            iso_coeff: 2,
        }
    }
}

impl Limits {
    /// Defaults overridden by any `GINV_*` variables that parse as integers.
    pub fn from_env() -> Self {
        let mut l = Limits::default();
        let fields: [(&str, &mut usize); 9] = [
            ("GINV_LATTICE_VERTICES", &mut l.lattice_vertices),
            ("GINV_CYCLE_CAP", &mut l.cycle_cap),
            ("GINV_CONE_BOUND", &mut l.cone_bound),
            ("GINV_CONE_SEARCH_CAP", &mut l.cone_search_cap),
            ("GINV_BFS_STATES", &mut l.bfs_states),
            ("GINV_LATTICE_ISOS", &mut l.lattice_isos),
            ("GINV_DIAGRAM_CANDIDATES", &mut l.diagram_candidates),
            ("GINV_SEARCH_NODES", &mut l.search_nodes),
            ("GINV_ISO_COEFF", &mut l.iso_coeff),
        ];
        for (name, slot) in fields {
            if let Some(v) = env::var(name).ok().and_then(|s| s.trim().parse().ok()) {
                *slot = v;
            }
        }
        l
    }
}
