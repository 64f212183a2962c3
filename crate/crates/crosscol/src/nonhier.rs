//! Non-hierarchical horizontal encoding: store each row of the target column
//! as its difference to a reference column in the same row, then
//! frame-of-reference the differences and bit-pack them. Negative
//! differences are handled by the FOR re-centering, not by sign bits.

use crate::bitpack::{min_width, PackedBuffer};
use crate::error::{Error, Result};
use crate::model::ColumnVector;

/// A column stored as per-row differences to a reference column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonHierEncoded {
    reference: u16,
    diff_base: i64,
    diffs: PackedBuffer,
}

impl NonHierEncoded {
    pub fn from_parts(reference: u16, diff_base: i64, diffs: PackedBuffer) -> Self {
        NonHierEncoded {
            reference,
            diff_base,
            diffs,
        }
    }

    pub fn reference(&self) -> u16 {
        self.reference
    }

    pub fn diff_base(&self) -> i64 {
        self.diff_base
    }

    pub fn width(&self) -> u32 {
        self.diffs.width()
    }

    pub fn diffs(&self) -> &PackedBuffer {
        &self.diffs
    }

    pub fn len(&self) -> usize {
        self.diffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diffs.is_empty()
    }

    /// The raw difference `target - reference` at a row.
    pub fn raw_diff_at(&self, index: usize) -> Result<i64> {
        Ok(self
            .diff_base
            .wrapping_add(self.diffs.unpack_at(index)? as i64))
    }

    /// Reconstructs the target value given the decoded reference value at
    /// the same row.
    pub fn decode_at(&self, reference_value: i64, index: usize) -> Result<i64> {
        Ok(reference_value.wrapping_add(self.raw_diff_at(index)?))
    }

    /// reference id u16 + diff base i64 + packed diffs.
    pub fn payload_len(&self) -> u64 {
        2 + 8 + PackedBuffer::serialized_len(self.diffs.width(), self.diffs.len())
    }
}

fn check_pair(target: &ColumnVector, reference: &ColumnVector) -> Result<()> {
    if target.len() != reference.len() {
        return Err(Error::LengthMismatch {
            left: target.len(),
            right: reference.len(),
        });
    }
    if !target.ltype().unit_compatible(reference.ltype()) {
        return Err(Error::UnitMismatch {
            left: target.ltype().to_string(),
            right: reference.ltype().to_string(),
        });
    }
    Ok(())
}

/// Diff-encodes `target` with respect to `reference`. Both columns must have
/// the same length and count the same unit. `reference_id` is the reference
/// column's position in the owning block.
pub fn diff_encode(
    target: &ColumnVector,
    reference: &ColumnVector,
    reference_id: u16,
) -> Result<NonHierEncoded> {
    check_pair(target, reference)?;
    let t = target.int_values()?;
    let r = reference.int_values()?;
    let raw: Vec<i64> = t
        .iter()
        .zip(r)
        .map(|(&a, &b)| a.wrapping_sub(b))
        .collect();
    let diff_base = raw.iter().copied().min().unwrap_or(0);
    let offsets: Vec<u64> = raw
        .iter()
        .map(|&d| d.wrapping_sub(diff_base) as u64)
        .collect();
    let diffs = PackedBuffer::pack(&offsets, min_width(&offsets))?;
    Ok(NonHierEncoded {
        reference: reference_id,
        diff_base,
        diffs,
    })
}

/// Exact serialized size of `diff_encode(target, reference)` without
/// materializing the packed buffer.
pub fn estimate_diff_size(target: &ColumnVector, reference: &ColumnVector) -> Result<u64> {
    check_pair(target, reference)?;
    let t = target.int_values()?;
    let r = reference.int_values()?;
    let mut min = 0i64;
    let mut max = 0i64;
    for (i, (&a, &b)) in t.iter().zip(r).enumerate() {
        let d = a.wrapping_sub(b);
        if i == 0 {
            min = d;
            max = d;
        } else {
            min = min.min(d);
            max = max.max(d);
        }
    }
    let width = min_width(&[max.wrapping_sub(min) as u64]);
    Ok(2 + 8 + PackedBuffer::serialized_len(width, t.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{days_since_epoch, LogicalType};
    use proptest::prelude::*;

    fn date_col(name: &str, days: Vec<i64>) -> ColumnVector {
        ColumnVector::ints(name, LogicalType::Date, days).unwrap()
    }

    fn shipment_pair() -> (ColumnVector, ColumnVector) {
        let day = |y, m, d| days_since_epoch(y, m, d).unwrap() as i64;
        let ship = date_col(
            "shipdate",
            vec![day(1992, 1, 2), day(1998, 12, 1), day(2024, 6, 8)],
        );
        let commit = date_col(
            "commitdate",
            vec![day(1992, 3, 10), day(1998, 9, 4), day(2024, 6, 16)],
        );
        (ship, commit)
    }

    #[test]
    fn shipment_dates_diff_small() {
        let (ship, commit) = shipment_pair();
        let enc = diff_encode(&commit, &ship, 0).unwrap();
        let raw: Vec<i64> = (0..3).map(|i| enc.raw_diff_at(i).unwrap()).collect();
        assert_eq!(raw, vec![68, -88, 8]);
        assert_eq!(enc.diff_base(), -88);
        // Decoding against the per-row reference restores the dates.
        let ship_days = ship.int_values().unwrap();
        let commit_days = commit.int_values().unwrap();
        for i in 0..3 {
            assert_eq!(enc.decode_at(ship_days[i], i).unwrap(), commit_days[i]);
        }
        assert_eq!(
            enc.decode_at(ship_days[0], 0).unwrap(),
            days_since_epoch(1992, 3, 10).unwrap() as i64
        );
    }

    #[test]
    fn self_reference_needs_zero_bits() {
        let col = date_col("d", vec![3, 9, 27, 81]);
        let enc = diff_encode(&col, &col, 0).unwrap();
        assert_eq!(enc.width(), 0);
        assert_eq!(enc.diff_base(), 0);
        for (i, &v) in col.int_values().unwrap().iter().enumerate() {
            assert_eq!(enc.decode_at(v, i).unwrap(), v);
        }
        assert_eq!(
            estimate_diff_size(&col, &col).unwrap(),
            2 + 8 + PackedBuffer::serialized_len(0, 4)
        );
    }

    #[test]
    fn bounded_gap_controls_width() {
        // receipt = ship + U[1, 30]: diffs re-center to base 1, width 5.
        let ship: Vec<i64> = (0..500).map(|i| 8000 + (i * 13) % 2500).collect();
        let gaps: Vec<i64> = (0..500).map(|i| 1 + (i * 7) % 30).collect();
        let receipt: Vec<i64> = ship.iter().zip(&gaps).map(|(s, g)| s + g).collect();
        let ship = date_col("ship", ship);
        let receipt = date_col("receipt", receipt);
        let enc = diff_encode(&receipt, &ship, 0).unwrap();
        assert_eq!(enc.diff_base(), 1);
        assert_eq!(enc.width(), 5);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let a = date_col("a", vec![1, 2]);
        let b = date_col("b", vec![1]);
        assert!(matches!(
            diff_encode(&a, &b, 0),
            Err(Error::LengthMismatch { .. })
        ));
        let ts = ColumnVector::ints("t", LogicalType::Timestamp, vec![1, 2]).unwrap();
        assert!(matches!(
            diff_encode(&a, &ts, 0),
            Err(Error::UnitMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn lossless_for_arbitrary_pairs(
            pairs in proptest::collection::vec((any::<i64>(), any::<i64>()), 1..200)
        ) {
            let (t, r): (Vec<i64>, Vec<i64>) = pairs.into_iter().unzip();
            let target = date_col("t", t.clone());
            let reference = date_col("r", r.clone());
            let enc = diff_encode(&target, &reference, 0).unwrap();
            for i in 0..t.len() {
                prop_assert_eq!(enc.decode_at(r[i], i).unwrap(), t[i]);
            }
            // Estimate agrees with the real serialized size.
            prop_assert_eq!(
                estimate_diff_size(&target, &reference).unwrap(),
                enc.payload_len()
            );
            // Raw diffs are antisymmetric.
            let flipped = diff_encode(&reference, &target, 0).unwrap();
            for i in 0..t.len() {
                prop_assert_eq!(
                    enc.raw_diff_at(i).unwrap(),
                    flipped.raw_diff_at(i).unwrap().wrapping_neg()
                );
            }
        }

        #[test]
        fn narrower_diff_range_never_widens(
            base in -1_000_000i64..1_000_000,
            rows in proptest::collection::vec((0i64..10_000, 0i64..50), 1..100)
        ) {
            let (offs, gaps): (Vec<i64>, Vec<i64>) = rows.into_iter().unzip();
            let r: Vec<i64> = offs.iter().map(|o| base + o).collect();
            let t: Vec<i64> = r.iter().zip(&gaps).map(|(v, g)| v + g).collect();
            let target = date_col("t", t.clone());
            let reference = date_col("r", r);
            let enc = diff_encode(&target, &reference, 0).unwrap();
            let fore = crate::vertical::for_encode(&target).unwrap();
            let t_span = t.iter().max().unwrap() - t.iter().min().unwrap();
            let d_span = gaps.iter().max().unwrap() - gaps.iter().min().unwrap();
            if d_span < t_span {
                prop_assert!(enc.width() <= fore.width());
            }
        }
    }
}
