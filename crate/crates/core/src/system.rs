// SPDX-License-Identifier: MIT
//! Ground-truth causal systems: a DAG whose vertices are partitioned into
//! observed, latent, selection and missingness-indicator variables.
//!
//! Each observed vertex `O` is measured in a sample iff every member of its
//! indicator set `S_O` equals one. `S_O` always contains the selection
//! vertices `S`; the remaining members are missingness indicators. Deleting
//! rows on a variable set `V` therefore conditions on
//! `S_V = S ∪ (indicators of every member of V)`, and list-wise deletion
//! conditions on the union over all observables, `S_l`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::Dag;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Observed,
    Latent,
    Selection,
    MissingnessIndicator,
}

impl Role {
    pub fn code(self) -> char {
        match self {
            Role::Observed => 'O',
            Role::Latent => 'L',
            Role::Selection => 'S',
            Role::MissingnessIndicator => 'M',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        match c {
            'O' => Some(Role::Observed),
            'L' => Some(Role::Latent),
            'S' => Some(Role::Selection),
            'M' => Some(Role::MissingnessIndicator),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalSystem {
    dag: Dag,
    roles: Vec<Role>,
    // Per vertex: the missingness indicators governing it. Empty unless observed.
    indicators: Vec<Vec<usize>>,
    observed: Vec<usize>,
    selection: Vec<usize>,
}

impl CausalSystem {
    /// `indicators[v]` lists the missingness indicators governing observed
    /// vertex `v`; selection vertices are implicit members of every set.
    pub fn new(dag: Dag, roles: Vec<Role>, mut indicators: Vec<Vec<usize>>) -> Result<Self> {
        let n = dag.vertex_count();
        if roles.len() != n || indicators.len() != n {
            return Err(Error::InvalidArgument(format!(
                "expected {n} roles and indicator lists, got {} and {}",
                roles.len(),
                indicators.len()
            )));
        }
        let mut used = vec![false; n];
        for (v, list) in indicators.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if !list.is_empty() && roles[v] != Role::Observed {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v} has indicators but is not observed"
                )));
            }
            for &m in list.iter() {
                if m >= n || roles[m] != Role::MissingnessIndicator {
                    return Err(Error::InvalidArgument(format!(
                        "vertex {m} governs vertex {v} but is not a missingness indicator"
                    )));
                }
                used[m] = true;
            }
        }
        if let Some(m) = (0..n).find(|&m| roles[m] == Role::MissingnessIndicator && !used[m]) {
            return Err(Error::InvalidArgument(format!(
                "missingness indicator {m} governs no observed vertex"
            )));
        }
        let observed = (0..n).filter(|&v| roles[v] == Role::Observed).collect();
        let selection = (0..n).filter(|&v| roles[v] == Role::Selection).collect();
        Ok(CausalSystem { dag, roles, indicators, observed, selection })
    }

    /// Every vertex observed, no selection and no missingness.
    pub fn fully_observed(dag: Dag) -> Self {
        let n = dag.vertex_count();
        CausalSystem::new(dag, vec![Role::Observed; n], vec![Vec::new(); n])
            .expect("fully observed system is always valid")
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn vertex_count(&self) -> usize {
        self.dag.vertex_count()
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    pub fn role(&self, v: usize) -> Role {
        self.roles[v]
    }

    /// Observed vertices in ascending order; position `k` is data column `k`.
    pub fn observed(&self) -> &[usize] {
        &self.observed
    }

    /// `S`, the selection vertices shared by every observable.
    pub fn selection(&self) -> &[usize] {
        &self.selection
    }

    pub fn indicator_vertices(&self) -> Vec<usize> {
        self.vertices_with(Role::MissingnessIndicator)
    }

    pub fn vertices_with(&self, role: Role) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.roles[v] == role).collect()
    }

    pub fn observed_position(&self, v: usize) -> Option<usize> {
        self.observed.binary_search(&v).ok()
    }

    /// `S_O \ S` for observed vertex `o`.
    pub fn missingness_indicators(&self, o: usize) -> &[usize] {
        &self.indicators[o]
    }

    /// `S_O`.
    pub fn selection_set_of(&self, o: usize) -> Vec<usize> {
        self.selection_for(&[o])
    }

    /// `S_V`: the selection induced by deleting rows that miss any member of `vars`.
    pub fn selection_for(&self, vars: &[usize]) -> Vec<usize> {
        let mut out: BTreeSet<usize> = self.selection.iter().copied().collect();
        for &v in vars {
            out.extend(self.indicators[v].iter().copied());
        }
        out.into_iter().collect()
    }

    /// `S_l`, the selection induced by list-wise deletion.
    pub fn list_wise_selection(&self) -> Vec<usize> {
        self.selection_for(&self.observed)
    }

    /// Observables governed by indicator `m`.
    pub fn governed_by(&self, m: usize) -> Vec<usize> {
        self.observed
            .iter()
            .copied()
            .filter(|&o| self.indicators[o].binary_search(&m).is_ok())
            .collect()
    }

    /// The distinct non-empty indicator sets `S_O \ S` (the missingness mechanisms).
    pub fn mechanisms(&self) -> Vec<Vec<usize>> {
        let set: BTreeSet<&Vec<usize>> =
            self.observed.iter().map(|&o| &self.indicators[o]).filter(|l| !l.is_empty()).collect();
        set.into_iter().cloned().collect()
    }

    /// True iff no missingness indicator has a directed path to an observed
    /// or selection vertex, or to an indicator governing a different set of
    /// observables.
    pub fn check_assumption1(&self) -> bool {
        let n = self.vertex_count();
        for m in self.indicator_vertices() {
            let governed = self.governed_by(m);
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = self.dag.children(m).to_vec();
            while let Some(v) = stack.pop() {
                if core::mem::replace(&mut seen[v], true) {
                    continue;
                }
                match self.roles[v] {
                    Role::Observed | Role::Selection => return false,
                    Role::MissingnessIndicator if self.governed_by(v) != governed => return false,
                    _ => {}
                }
                stack.extend_from_slice(self.dag.children(v));
            }
        }
        true
    }
}
