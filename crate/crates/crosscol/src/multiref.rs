//! Non-hierarchical encoding against multiple reference columns. Reference
//! columns are partitioned into groups; each row stores a 2-bit code
//! selecting which subset of group sums reconstructs the target value. Rows
//! that no kept formula explains go to a separate outlier store of sorted
//! row indices and original values.
//!
//! There is no sentinel code: every code point denotes a formula, and
//! outlier-ness is decided purely by index membership. A sentinel would
//! force a fifth code point and with it three bits per row.

use crate::bitpack::{min_width, PackedBuffer};
use crate::error::{Error, Result};
use crate::model::Block;

/// Largest number of reference groups the subset enumeration accepts.
pub const MAX_GROUPS: usize = 8;

/// Default number of formulas kept, matching the 2-bit code budget.
pub const DEFAULT_MAX_FORMULAS: usize = 4;

/// Reference groups plus the kept subset-sum formulas.
///
/// A formula is a bitmask over the groups: bit `g` set means group `g`'s
/// row sum participates in the reconstruction. Formulas are kept in
/// ascending mask order, which fixes the code assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaSet {
    groups: Vec<Vec<u16>>,
    formulas: Vec<u8>,
}

impl FormulaSet {
    pub fn new(groups: Vec<Vec<u16>>, formulas: Vec<u8>) -> Result<Self> {
        if groups.is_empty() || groups.iter().any(|g| g.is_empty()) {
            return Err(Error::NoGroups);
        }
        if groups.len() > MAX_GROUPS {
            return Err(Error::TooManyGroups {
                got: groups.len(),
                max: MAX_GROUPS,
            });
        }
        let mut dedup = formulas.clone();
        dedup.sort_unstable();
        dedup.dedup();
        if formulas.is_empty() || formulas.len() > 4 || dedup.len() != formulas.len() {
            return Err(Error::PlanMismatch {
                reason: format!("need 1..=4 distinct formulas, got {formulas:?}"),
            });
        }
        Ok(FormulaSet { groups, formulas })
    }

    pub fn groups(&self) -> &[Vec<u16>] {
        &self.groups
    }

    pub fn formulas(&self) -> &[u8] {
        &self.formulas
    }

    pub fn code_width(&self) -> u32 {
        min_width(&[self.formulas.len() as u64 - 1])
    }

    /// Row-wise sum of every column in every group.
    pub fn group_sums(&self, block: &Block) -> Result<Vec<Vec<i64>>> {
        let rows = block.row_count();
        let mut sums = Vec::with_capacity(self.groups.len());
        for group in &self.groups {
            let mut acc = vec![0i64; rows];
            for &id in group {
                let col = block.column(id)?;
                for (a, &v) in acc.iter_mut().zip(col.int_values()?) {
                    *a = a.wrapping_add(v);
                }
            }
            sums.push(acc);
        }
        Ok(sums)
    }

    fn formula_value(&self, mask: u8, sums_at_row: &[i64]) -> i64 {
        let mut total = 0i64;
        for (g, &s) in sums_at_row.iter().enumerate() {
            if mask >> g & 1 == 1 {
                total = total.wrapping_add(s);
            }
        }
        total
    }
}

/// Row indices and original values for rows no formula explains. Indices
/// are strictly increasing, so membership is a binary search and sequential
/// decodes can merge-walk.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OutlierStore {
    indices: Vec<u32>,
    values: Vec<i64>,
}

impl OutlierStore {
    pub fn from_parts(indices: Vec<u32>, values: Vec<i64>) -> Result<Self> {
        if indices.len() != values.len() || !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Truncated {
                context: "outlier store".into(),
            });
        }
        Ok(OutlierStore { indices, values })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn lookup(&self, row: u32) -> Option<i64> {
        self.indices
            .binary_search(&row)
            .ok()
            .map(|slot| self.values[slot])
    }
}

/// The encoded target column: per-row formula codes plus the outlier store.
/// Outlier rows carry an arbitrary valid code that decoding ignores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiRefEncoded {
    formula_set: FormulaSet,
    codes: PackedBuffer,
    outliers: OutlierStore,
}

impl MultiRefEncoded {
    pub fn from_parts(
        formula_set: FormulaSet,
        codes: PackedBuffer,
        outliers: OutlierStore,
    ) -> Self {
        MultiRefEncoded {
            formula_set,
            codes,
            outliers,
        }
    }

    pub fn formula_set(&self) -> &FormulaSet {
        &self.formula_set
    }

    pub fn codes(&self) -> &PackedBuffer {
        &self.codes
    }

    pub fn outliers(&self) -> &OutlierStore {
        &self.outliers
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Decodes one row from the per-group sums at that row.
    pub fn decode_at(&self, sums_at_row: &[i64], index: usize) -> Result<i64> {
        if index >= self.codes.len() {
            return Err(Error::IndexOutOfBounds {
                index,
                len: self.codes.len(),
            });
        }
        if let Some(v) = self.outliers.lookup(index as u32) {
            return Ok(v);
        }
        let code = self.codes.unpack_at(index)? as usize;
        let mask = self.formula_set.formulas()[code];
        Ok(self.formula_set.formula_value(mask, sums_at_row))
    }

    /// Decodes the rows of a sorted selection, merge-walking the outlier
    /// store instead of binary-searching every row. `sums_at` yields the
    /// per-group sums for a row.
    pub fn decode_selection(
        &self,
        selection: &[u32],
        mut sums_at: impl FnMut(usize, &mut Vec<i64>),
    ) -> Result<Vec<i64>> {
        let mut out = Vec::with_capacity(selection.len());
        let mut next_outlier = 0usize;
        let mut sums = Vec::new();
        for &row in selection {
            while next_outlier < self.outliers.len()
                && self.outliers.indices()[next_outlier] < row
            {
                next_outlier += 1;
            }
            if next_outlier < self.outliers.len()
                && self.outliers.indices()[next_outlier] == row
            {
                out.push(self.outliers.values()[next_outlier]);
                continue;
            }
            let code = self.codes.unpack_at(row as usize)? as usize;
            let mask = self.formula_set.formulas()[code];
            sums.clear();
            sums_at(row as usize, &mut sums);
            out.push(self.formula_set.formula_value(mask, &sums));
        }
        Ok(out)
    }

    /// formula table + packed codes + outlier arrays, exactly as serialized.
    pub fn payload_len(&self) -> u64 {
        let groups = self.formula_set.groups();
        let table: u64 = 1
            + groups.iter().map(|g| 1 + 2 * g.len() as u64).sum::<u64>()
            + 1
            + self.formula_set.formulas().len() as u64;
        table
            + PackedBuffer::serialized_len(self.codes.width(), self.codes.len())
            + 4
            + 12 * self.outliers.len() as u64
    }
}

/// Evaluates every subset of the groups as a candidate formula and keeps the
/// `max_formulas` subsets with the highest row-match counts (zero-match
/// subsets are dropped, but at least one formula is always kept). Returns
/// the kept set in ascending mask order and the fraction of rows matched by
/// none of them.
pub fn select_formulas(
    target: &[i64],
    sums: &[Vec<i64>],
    groups: Vec<Vec<u16>>,
    max_formulas: usize,
) -> Result<(FormulaSet, f64)> {
    if groups.is_empty() {
        return Err(Error::NoGroups);
    }
    if groups.len() > MAX_GROUPS {
        return Err(Error::TooManyGroups {
            got: groups.len(),
            max: MAX_GROUPS,
        });
    }
    debug_assert_eq!(groups.len(), sums.len());
    let subsets = 1usize << groups.len();
    let mut match_counts = vec![0u64; subsets];
    let mut sums_at_row = vec![0i64; groups.len()];
    for (i, &t) in target.iter().enumerate() {
        for (g, s) in sums_at_row.iter_mut().zip(sums) {
            *g = s[i];
        }
        for (mask, count) in match_counts.iter_mut().enumerate() {
            let mut total = 0i64;
            for (g, &s) in sums_at_row.iter().enumerate() {
                if mask >> g & 1 == 1 {
                    total = total.wrapping_add(s);
                }
            }
            if total == t {
                *count += 1;
            }
        }
    }

    // Highest match count first; mask breaks ties deterministically.
    let mut order: Vec<usize> = (0..subsets).collect();
    order.sort_by_key(|&m| (std::cmp::Reverse(match_counts[m]), m));
    let mut kept: Vec<u8> = order
        .iter()
        .take(max_formulas.min(4))
        .filter(|&&m| match_counts[m] > 0)
        .map(|&m| m as u8)
        .collect();
    if kept.is_empty() {
        kept.push(order[0] as u8);
    }
    kept.sort_unstable();

    let matched: u64 = {
        let mut n = 0u64;
        for (i, &t) in target.iter().enumerate() {
            let hit = kept.iter().any(|&mask| {
                let mut total = 0i64;
                for (g, s) in sums.iter().enumerate() {
                    if mask >> g & 1 == 1 {
                        total = total.wrapping_add(s[i]);
                    }
                }
                total == t
            });
            if hit {
                n += 1;
            }
        }
        n
    };
    let outlier_rate = if target.is_empty() {
        0.0
    } else {
        1.0 - matched as f64 / target.len() as f64
    };
    Ok((FormulaSet::new(groups, kept)?, outlier_rate))
}

/// Encodes the target column under a fixed formula set. Rows matching
/// several formulas take the earliest kept one; rows matching none become
/// outliers with code 0.
pub fn multiref_encode(
    target: &[i64],
    sums: &[Vec<i64>],
    formula_set: FormulaSet,
) -> Result<MultiRefEncoded> {
    let mut codes = Vec::with_capacity(target.len());
    let mut outlier_indices = Vec::new();
    let mut outlier_values = Vec::new();
    let mut sums_at_row = vec![0i64; formula_set.groups().len()];
    for (i, &t) in target.iter().enumerate() {
        for (g, s) in sums_at_row.iter_mut().zip(sums) {
            *g = s[i];
        }
        let hit = formula_set
            .formulas()
            .iter()
            .position(|&mask| formula_set.formula_value(mask, &sums_at_row) == t);
        match hit {
            Some(code) => codes.push(code as u64),
            None => {
                codes.push(0);
                outlier_indices.push(i as u32);
                outlier_values.push(t);
            }
        }
    }
    let codes = PackedBuffer::pack(&codes, formula_set.code_width())?;
    let outliers = OutlierStore::from_parts(outlier_indices, outlier_values)?;
    Ok(MultiRefEncoded {
        formula_set,
        codes,
        outliers,
    })
}
