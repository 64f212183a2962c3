//! Hierarchical horizontal encoding for column pairs where each reference
//! value admits only a few target values (city and zip code, state and city,
//! country and IP). The distinct target values of every reference-dictionary
//! code are grouped contiguously in one global values array, indexed through
//! an offsets array; each row stores only its small within-group index.
//!
//! The reference column must be dictionary-encoded: rows are decoded as
//! `values[offsets[ref_code] + code]`.

use std::collections::HashMap;

use crate::bitpack::{min_width, PackedBuffer};
use crate::error::{Error, Result};
use crate::model::{ColumnData, ColumnVector, Value};
use crate::vertical::{DictEncoded, StringHeap, StringInterner};

/// Group values: physical integers, or indices into one shared string heap
/// so repeated strings across groups are stored once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupValues {
    Int(Vec<i64>),
    Str { heap: StringHeap, indices: Vec<u32> },
}

impl GroupValues {
    pub fn len(&self) -> usize {
        match self {
            GroupValues::Int(v) => v.len(),
            GroupValues::Str { indices, .. } => indices.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn serialized_len(&self) -> u64 {
        match self {
            GroupValues::Int(v) => 8 * v.len() as u64,
            GroupValues::Str { heap, indices } => {
                heap.serialized_len() + 4 * indices.len() as u64
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierEncoded {
    reference: u16,
    /// One start position per reference code, plus a terminal entry equal to
    /// the total number of group values.
    offsets: Vec<u32>,
    values: GroupValues,
    codes: PackedBuffer,
}

impl HierEncoded {
    pub fn from_parts(
        reference: u16,
        offsets: Vec<u32>,
        values: GroupValues,
        codes: PackedBuffer,
    ) -> Result<Self> {
        let ok = !offsets.is_empty()
            && offsets[0] == 0
            && offsets.windows(2).all(|w| w[0] <= w[1])
            && *offsets.last().unwrap() as usize == values.len();
        if !ok {
            return Err(Error::Truncated {
                context: "group offsets".into(),
            });
        }
        Ok(HierEncoded {
            reference,
            offsets,
            values,
            codes,
        })
    }

    pub fn reference(&self) -> u16 {
        self.reference
    }

    pub fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    pub fn group_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn values(&self) -> &GroupValues {
        &self.values
    }

    pub fn codes(&self) -> &PackedBuffer {
        &self.codes
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    fn slot(&self, ref_code: u64, index: usize) -> Result<usize> {
        let group = ref_code as usize;
        if group >= self.group_count() {
            return Err(Error::IndexOutOfBounds {
                index: group,
                len: self.group_count(),
            });
        }
        let code = self.codes.unpack_at(index)? as usize;
        let slot = lookup_slot(&mut |g| self.offsets[g] as usize, group, code);
        if slot >= self.offsets[group + 1] as usize {
            return Err(Error::IndexOutOfBounds {
                index: slot,
                len: self.offsets[group + 1] as usize,
            });
        }
        Ok(slot)
    }

    /// Decodes the row given the reference column's dictionary code at the
    /// same row.
    pub fn decode_at(&self, ref_code: u64, index: usize) -> Result<Value> {
        let slot = self.slot(ref_code, index)?;
        match &self.values {
            GroupValues::Int(v) => Ok(Value::Int(v[slot])),
            GroupValues::Str { heap, indices } => {
                Ok(Value::Str(heap.get(indices[slot] as usize)?.to_string()))
            }
        }
    }

    /// Integer fast path for the decode loop.
    pub fn int_at(&self, ref_code: u64, index: usize) -> Result<i64> {
        let slot = self.slot(ref_code, index)?;
        match &self.values {
            GroupValues::Int(v) => Ok(v[slot]),
            GroupValues::Str { .. } => Err(Error::NotInteger {
                name: "hierarchical group values".into(),
            }),
        }
    }

    /// reference id u16 + group count u32 + offsets + values + packed codes.
    pub fn payload_len(&self) -> u64 {
        2 + 4
            + 4 * self.offsets.len() as u64
            + self.values.serialized_len()
            + PackedBuffer::serialized_len(self.codes.width(), self.codes.len())
    }
}

/// The two-array lookup at the heart of the decode path; split out so tests
/// can count the indexed reads.
#[inline]
fn lookup_slot(offset_at: &mut impl FnMut(usize) -> usize, group: usize, code: usize) -> usize {
    offset_at(group) + code
}

/// Builds the hierarchical encoding in a single pass: an associative map
/// from reference code to that group's value list (first-occurrence order),
/// flattened into the values/offsets arrays afterwards.
pub fn hier_encode(
    target: &ColumnVector,
    reference: &DictEncoded,
    reference_id: u16,
) -> Result<HierEncoded> {
    if target.len() != reference.len() {
        return Err(Error::LengthMismatch {
            left: target.len(),
            right: reference.len(),
        });
    }
    let group_count = reference.distinct_count();

    // Interned target values: integers pass through, strings go through one
    // shared heap so every distinct string is stored once.
    let mut interner = StringInterner::new();
    let keys: Vec<i64> = match target.data() {
        ColumnData::Int(v) => v.clone(),
        ColumnData::Str(v) => v.iter().map(|s| interner.intern(s) as i64).collect(),
    };

    let mut groups: Vec<Vec<i64>> = vec![Vec::new(); group_count];
    let mut slot_of: HashMap<(u64, i64), u64> = HashMap::new();
    let mut codes = Vec::with_capacity(keys.len());
    let mut max_group = 0usize;
    for (i, &key) in keys.iter().enumerate() {
        let ref_code = reference.code_at(i)?;
        let code = *slot_of.entry((ref_code, key)).or_insert_with(|| {
            let group = &mut groups[ref_code as usize];
            group.push(key);
            max_group = max_group.max(group.len());
            group.len() as u64 - 1
        });
        codes.push(code);
    }

    let mut offsets = Vec::with_capacity(group_count + 1);
    let mut flat = Vec::new();
    offsets.push(0u32);
    for group in &groups {
        flat.extend_from_slice(group);
        offsets.push(flat.len() as u32);
    }

    let values = match target.data() {
        ColumnData::Int(_) => GroupValues::Int(flat),
        ColumnData::Str(_) => GroupValues::Str {
            heap: interner.into_heap(),
            indices: flat.into_iter().map(|k| k as u32).collect(),
        },
    };
    let width = min_width(&[max_group.saturating_sub(1) as u64]);
    let codes = PackedBuffer::pack(&codes, width)?;
    HierEncoded::from_parts(reference_id, offsets, values, codes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LogicalType;
    use crate::vertical::dict_encode;
    use proptest::prelude::*;

    fn city_zip_rows() -> (ColumnVector, ColumnVector) {
        let cities = ["Cortland", "Naples", "Naples", "Naples", "NYC", "NYC"];
        let zips = vec![13045i64, 34102, 34112, 34102, 10016, 10001];
        (
            ColumnVector::strings("city", cities.iter().map(|s| s.to_string()).collect())
                .unwrap(),
            ColumnVector::ints("zip", LogicalType::Integer, zips).unwrap(),
        )
    }

    #[test]
    fn city_zip_layout() {
        let (city, zip) = city_zip_rows();
        let city_dict = dict_encode(&city);
        let enc = hier_encode(&zip, &city_dict, 0).unwrap();
        assert_eq!(
            enc.values(),
            &GroupValues::Int(vec![13045, 34102, 34112, 10016, 10001])
        );
        assert_eq!(enc.offsets(), &[0, 1, 3, 5]);
        assert_eq!(enc.codes().unpack_all(), vec![0, 0, 1, 0, 0, 1]);
        assert_eq!(enc.codes().width(), 1);

        // Row 4 carries city code 2 (NYC); its zip is values[offsets[2] + 0].
        assert_eq!(city_dict.code_at(4).unwrap(), 2);
        assert_eq!(enc.decode_at(2, 4).unwrap(), Value::Int(10016));
        assert_eq!(enc.decode_at(0, 0).unwrap(), Value::Int(13045));

        // Full roundtrip through the reference codes.
        for (i, &z) in zip.int_values().unwrap().iter().enumerate() {
            let code = city_dict.code_at(i).unwrap();
            assert_eq!(enc.int_at(code, i).unwrap(), z);
        }
    }

    #[test]
    fn single_group_degenerates_to_dictionary() {
        let reference =
            ColumnVector::strings("r", vec!["only".into(); 5]).unwrap();
        let target =
            ColumnVector::ints("t", LogicalType::Integer, vec![9, 7, 9, 5, 7]).unwrap();
        let enc = hier_encode(&target, &dict_encode(&reference), 0).unwrap();
        assert_eq!(enc.group_count(), 1);
        assert_eq!(enc.values(), &GroupValues::Int(vec![9, 7, 5]));
        let plain = dict_encode(&target);
        assert_eq!(enc.codes().unpack_all(), plain.codes().unpack_all());
    }

    #[test]
    fn bijective_pair_needs_zero_code_bits() {
        let reference = ColumnVector::strings(
            "r",
            vec!["a".into(), "b".into(), "c".into(), "a".into()],
        )
        .unwrap();
        let target =
            ColumnVector::ints("t", LogicalType::Integer, vec![10, 20, 30, 10]).unwrap();
        let enc = hier_encode(&target, &dict_encode(&reference), 0).unwrap();
        assert_eq!(enc.codes().width(), 0);
    }

    #[test]
    fn string_targets_share_one_heap() {
        let state = ColumnVector::strings(
            "state",
            ["NY", "NY", "FL", "FL"].iter().map(|s| s.to_string()).collect(),
        )
        .unwrap();
        let city = ColumnVector::strings(
            "city",
            ["Albany", "Naples", "Naples", "Miami"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
        .unwrap();
        let enc = hier_encode(&city, &dict_encode(&state), 0).unwrap();
        let GroupValues::Str { heap, indices } = enc.values() else {
            panic!("expected string group values")
        };
        // "Naples" exists under both states but is stored once.
        assert_eq!(heap.len(), 3);
        assert_eq!(indices.len(), 4);
        assert_eq!(enc.decode_at(0, 1).unwrap(), Value::Str("Naples".into()));
        assert_eq!(enc.decode_at(1, 2).unwrap(), Value::Str("Naples".into()));
    }

    #[test]
    fn decode_reads_two_slots() {
        let mut reads = 0;
        let offsets = [0usize, 1, 3, 5];
        let slot = lookup_slot(
            &mut |g| {
                reads += 1;
                offsets[g]
            },
            2,
            1,
        );
        assert_eq!(slot, 4);
        // One offsets read; the values read is the caller's single index into
        // the flat array.
        assert_eq!(reads + 1, 2);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let (city, _) = city_zip_rows();
        let short = ColumnVector::ints("t", LogicalType::Integer, vec![1]).unwrap();
        assert!(matches!(
            hier_encode(&short, &dict_encode(&city), 0),
            Err(Error::LengthMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn lossless_even_without_real_hierarchy(
            rows in proptest::collection::vec(("[a-c]{1}", -20i64..20), 1..200)
        ) {
            let (refs, targets): (Vec<String>, Vec<i64>) = rows.into_iter().unzip();
            let reference = ColumnVector::strings("r", refs).unwrap();
            let target = ColumnVector::ints("t", LogicalType::Integer, targets.clone()).unwrap();
            let dict = dict_encode(&reference);
            let enc = hier_encode(&target, &dict, 0).unwrap();
            for (i, &t) in targets.iter().enumerate() {
                let code = dict.code_at(i).unwrap();
                prop_assert_eq!(enc.int_at(code, i).unwrap(), t);
            }
            // Group sizes sum to the global values array length and each
            // group holds unique values.
            let offs = enc.offsets();
            prop_assert_eq!(*offs.last().unwrap() as usize, enc.values().len());
            if let GroupValues::Int(vals) = enc.values() {
                for g in 0..enc.group_count() {
                    let group = &vals[offs[g] as usize..offs[g + 1] as usize];
                    let mut dedup = group.to_vec();
                    dedup.sort_unstable();
                    dedup.dedup();
                    prop_assert_eq!(dedup.len(), group.len());
                }
            }
        }

        #[test]
        fn lossless_string_targets(
            rows in proptest::collection::vec(("[a-b]{1}", "[x-z]{0,2}"), 1..120)
        ) {
            let (refs, targets): (Vec<String>, Vec<String>) = rows.into_iter().unzip();
            let reference = ColumnVector::strings("r", refs).unwrap();
            let target = ColumnVector::strings("t", targets.clone()).unwrap();
            let dict = dict_encode(&reference);
            let enc = hier_encode(&target, &dict, 0).unwrap();
            for (i, t) in targets.iter().enumerate() {
                let code = dict.code_at(i).unwrap();
                prop_assert_eq!(enc.decode_at(code, i).unwrap(), Value::Str(t.clone()));
            }
        }
    }
}
