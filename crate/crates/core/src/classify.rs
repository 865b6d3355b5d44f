//! Exhaustive membership testing of a single matrix.

use serde::Serialize;

use crate::algebra::{disassemble, is_real_matrix, numeric_rank, scale_of};
use crate::families::{membership, FamilyTag, Membership};
use crate::rank3::{variant_membership, VariantId};
use crate::types::Mat4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub rank: usize,
    pub real_matrix: bool,
    /// Norm all residuals are relative to.
    pub residual_scale: f64,
    /// Sorted by residual, then by tag order.
    pub families: Vec<Membership>,
    pub variants: Vec<VariantId>,
}

impl ClassReport {
    pub fn contains_family(&self, tag: FamilyTag) -> bool {
        self.family(tag).is_some()
    }

    pub fn family(&self, tag: FamilyTag) -> Option<&Membership> {
        self.families.iter().find(|m| m.tag == tag)
    }
}

/// Rank, reality and every family and variant `g` belongs to at `tol`.
pub fn classify(g: &Mat4, tol: f64) -> ClassReport {
    let p = disassemble(g);
    let mut families: Vec<Membership> = FamilyTag::ALL
        .into_iter()
        .filter_map(|tag| membership(tag, &p, tol))
        .collect();
    families.sort_by(|a, b| a.residual.total_cmp(&b.residual).then(a.tag.cmp(&b.tag)));
    ClassReport {
        rank: numeric_rank(g, tol),
        real_matrix: is_real_matrix(g, tol),
        residual_scale: scale_of(g.norm()),
        families,
        variants: variant_membership(g, tol),
    }
}
