//! The tagged union over every codec output, shared by the planner, the
//! block store, and the query path.

use crate::hier::HierEncoded;
use crate::multiref::MultiRefEncoded;
use crate::nonhier::NonHierEncoded;
use crate::vertical::{DictEncoded, ForEncoded, VerticalEncoded};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncodedColumn {
    For(ForEncoded),
    Dict(DictEncoded),
    NonHier(NonHierEncoded),
    Hier(HierEncoded),
    MultiRef(MultiRefEncoded),
}

impl EncodedColumn {
    pub fn kind(&self) -> &'static str {
        match self {
            EncodedColumn::For(_) => "for",
            EncodedColumn::Dict(_) => "dict",
            EncodedColumn::NonHier(_) => "nonhier",
            EncodedColumn::Hier(_) => "hier",
            EncodedColumn::MultiRef(_) => "multiref",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            EncodedColumn::For(e) => e.len(),
            EncodedColumn::Dict(e) => e.len(),
            EncodedColumn::NonHier(e) => e.len(),
            EncodedColumn::Hier(e) => e.len(),
            EncodedColumn::MultiRef(e) => e.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Exact serialized payload size in bytes.
    pub fn payload_len(&self) -> u64 {
        match self {
            EncodedColumn::For(e) => e.payload_len(),
            EncodedColumn::Dict(e) => e.payload_len(),
            EncodedColumn::NonHier(e) => e.payload_len(),
            EncodedColumn::Hier(e) => e.payload_len(),
            EncodedColumn::MultiRef(e) => e.payload_len(),
        }
    }

    /// Ids of the in-block columns this encoding needs at decode time.
    pub fn referenced_columns(&self) -> Vec<u16> {
        match self {
            EncodedColumn::For(_) | EncodedColumn::Dict(_) => Vec::new(),
            EncodedColumn::NonHier(e) => vec![e.reference()],
            EncodedColumn::Hier(e) => vec![e.reference()],
            EncodedColumn::MultiRef(e) => {
                let mut ids: Vec<u16> = e
                    .formula_set()
                    .groups()
                    .iter()
                    .flatten()
                    .copied()
                    .collect();
                ids.sort_unstable();
                ids.dedup();
                ids
            }
        }
    }
}

impl From<VerticalEncoded> for EncodedColumn {
    fn from(v: VerticalEncoded) -> Self {
        match v {
            VerticalEncoded::For(e) => EncodedColumn::For(e),
            VerticalEncoded::Dict(e) => EncodedColumn::Dict(e),
        }
    }
}
