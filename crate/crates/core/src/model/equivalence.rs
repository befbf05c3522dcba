//! Independence and transition-sequence equivalence of diagrams.

use super::CausalDiagram;
use crate::error::{Error, Result};

/// Same skeleton and same v-structures.
pub fn independence_equivalent(g1: &CausalDiagram, g2: &CausalDiagram) -> Result<bool> {
    if !g1.same_variables(g2) {
        return Err(Error::VariableMismatch);
    }
    Ok(g1.skeleton() == g2.skeleton() && g1.v_structures() == g2.v_structures())
}

/// Independence equivalence plus identical parent sets for every focal
/// variable. A single focal variable gives transition-pair equivalence;
/// an empty list degenerates to [`independence_equivalent`].
pub fn transition_equivalent(g1: &CausalDiagram, g2: &CausalDiagram, focal: &[usize]) -> Result<bool> {
    if let Some(&bad) = focal.iter().find(|&&f| f >= g1.len()) {
        return Err(Error::VariableOutOfRange(bad));
    }
    if !independence_equivalent(g1, g2)? {
        return Ok(false);
    }
    Ok(focal.iter().all(|&f| g1.parent_set(f) == g2.parent_set(f)))
}
