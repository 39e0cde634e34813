use serde::{Deserialize, Serialize};

use crate::error::{PyramidError, Result};

/// The portion of the full solution string a sub-population works on.
///
/// Members are global gene indices, kept sorted and unique. An individual of
/// the owning population stores one allele per member, in member order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneMask {
    members: Vec<usize>,
}

impl GeneMask {
    pub fn new(mut members: Vec<usize>, full_length: usize) -> Result<Self> {
        members.sort_unstable();
        let before = members.len();
        members.dedup();
        if members.len() != before {
            return Err(PyramidError::Config("gene mask contains duplicate indices".into()));
        }
        if let Some(&last) = members.last() {
            if last >= full_length {
                return Err(PyramidError::Config(format!(
                    "gene index {last} outside solution length {full_length}"
                )));
            }
        }
        Ok(Self { members })
    }

    pub fn full(length: usize) -> Self {
        Self { members: (0..length).collect() }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, gene: usize) -> bool {
        self.members.binary_search(&gene).is_ok()
    }

    pub fn is_full(&self, full_length: usize) -> bool {
        self.members.len() == full_length
    }

    pub fn is_subset_of(&self, other: &GeneMask) -> bool {
        self.members.len() <= other.members.len() && self.members.iter().all(|g| other.contains(*g))
    }

    pub fn is_disjoint(&self, other: &GeneMask) -> bool {
        self.members.iter().all(|g| !other.contains(*g))
    }

    /// Position of each of `self`'s members inside `outer`, or `None` if some
    /// member is missing from `outer`.
    pub fn positions_in(&self, outer: &GeneMask) -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(self.members.len());
        let mut j = 0;
        for &g in &self.members {
            while j < outer.members.len() && outer.members[j] < g {
                j += 1;
            }
            if j == outer.members.len() || outer.members[j] != g {
                return None;
            }
            out.push(j);
        }
        Some(out)
    }
}
