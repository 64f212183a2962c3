//! Baseline single-column codecs: frame-of-reference plus bit-packing for
//! integers, dictionary plus bit-packing for strings and repetitive values,
//! and a best-of selector between them.

use std::collections::HashMap;

use crate::bitpack::{min_width, PackedBuffer};
use crate::error::{Error, Result};
use crate::model::{ColumnData, ColumnVector, SizeReport, Value};

/// Distinct strings flattened into one byte blob with per-value start
/// offsets (plus a terminal offset equal to the blob length).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StringHeap {
    bytes: Vec<u8>,
    offsets: Vec<u32>,
}

impl StringHeap {
    pub fn new() -> Self {
        StringHeap {
            bytes: Vec::new(),
            offsets: vec![0],
        }
    }

    pub fn from_parts(bytes: Vec<u8>, offsets: Vec<u32>) -> Result<Self> {
        let ok = !offsets.is_empty()
            && offsets[0] == 0
            && offsets.windows(2).all(|w| w[0] <= w[1])
            && *offsets.last().unwrap() as usize == bytes.len();
        if !ok {
            return Err(Error::Truncated {
                context: "string heap offsets".into(),
            });
        }
        Ok(StringHeap { bytes, offsets })
    }

    pub fn push(&mut self, s: &str) -> u32 {
        let id = self.len() as u32;
        self.bytes.extend_from_slice(s.as_bytes());
        self.offsets.push(self.bytes.len() as u32);
        id
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, index: usize) -> Result<&str> {
        if index >= self.len() {
            return Err(Error::IndexOutOfBounds {
                index,
                len: self.len(),
            });
        }
        let start = self.offsets[index] as usize;
        let end = self.offsets[index + 1] as usize;
        std::str::from_utf8(&self.bytes[start..end]).map_err(|_| Error::Truncated {
            context: "string heap utf-8".into(),
        })
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    /// count u32 + (count+1) u32 offsets + blob.
    pub fn serialized_len(&self) -> u64 {
        4 + 4 * self.offsets.len() as u64 + self.bytes.len() as u64
    }
}

/// Interns strings in first-occurrence order.
#[derive(Default)]
pub struct StringInterner {
    heap: StringHeap,
    seen: HashMap<String, u32>,
}

impl StringInterner {
    pub fn new() -> Self {
        StringInterner {
            heap: StringHeap::new(),
            seen: HashMap::new(),
        }
    }

    pub fn intern(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.seen.get(s) {
            return id;
        }
        let id = self.heap.push(s);
        self.seen.insert(s.to_string(), id);
        id
    }

    pub fn into_heap(self) -> StringHeap {
        self.heap
    }
}

/// Frame-of-reference encoding: a base value (the column minimum) plus
/// bit-packed non-negative offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForEncoded {
    base: i64,
    codes: PackedBuffer,
}

impl ForEncoded {
    pub fn from_parts(base: i64, codes: PackedBuffer) -> Self {
        ForEncoded { base, codes }
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    pub fn width(&self) -> u32 {
        self.codes.width()
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

    pub fn decode_at(&self, index: usize) -> Result<i64> {
        Ok(self.base.wrapping_add(self.codes.unpack_at(index)? as i64))
    }

    pub fn decode_all(&self) -> Vec<i64> {
        self.codes
            .unpack_all()
            .into_iter()
            .map(|c| self.base.wrapping_add(c as i64))
            .collect()
    }

    /// base i64 + packed codes.
    pub fn payload_len(&self) -> u64 {
        8 + PackedBuffer::serialized_len(self.codes.width(), self.codes.len())
    }
}

pub fn for_encode(col: &ColumnVector) -> Result<ForEncoded> {
    let values = col.int_values()?;
    if values.is_empty() {
        return Err(Error::EmptyColumn);
    }
    let base = *values.iter().min().unwrap();
    // Wrapping keeps the offset math total even across the full i64 range.
    let offsets: Vec<u64> = values.iter().map(|&v| v.wrapping_sub(base) as u64).collect();
    let codes = PackedBuffer::pack(&offsets, min_width(&offsets))?;
    Ok(ForEncoded { base, codes })
}

/// Exact serialized size of `for_encode(col)` without materializing it.
pub fn estimate_for_size(values: &[i64]) -> Result<u64> {
    if values.is_empty() {
        return Err(Error::EmptyColumn);
    }
    let base = *values.iter().min().unwrap();
    let max = *values.iter().max().unwrap();
    let width = min_width(&[max.wrapping_sub(base) as u64]);
    Ok(8 + PackedBuffer::serialized_len(width, values.len()))
}

/// Dictionary values in first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DictValues {
    Int(Vec<i64>),
    Str(StringHeap),
}

impl DictValues {
    pub fn len(&self) -> usize {
        match self {
            DictValues::Int(v) => v.len(),
            DictValues::Str(h) => h.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn serialized_len(&self) -> u64 {
        match self {
            // count u32 + one i64 per distinct value
            DictValues::Int(v) => 4 + 8 * v.len() as u64,
            DictValues::Str(h) => h.serialized_len(),
        }
    }
}

/// Dictionary encoding: distinct values plus bit-packed codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictEncoded {
    values: DictValues,
    codes: PackedBuffer,
}

impl DictEncoded {
    pub fn from_parts(values: DictValues, codes: PackedBuffer) -> Self {
        DictEncoded { values, codes }
    }

    pub fn values(&self) -> &DictValues {
        &self.values
    }

    pub fn codes(&self) -> &PackedBuffer {
        &self.codes
    }

    pub fn distinct_count(&self) -> usize {
        self.values.len()
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// The dictionary code at a row, without resolving the value.
    pub fn code_at(&self, index: usize) -> Result<u64> {
        self.codes.unpack_at(index)
    }

    pub fn value_of_code(&self, code: u64) -> Result<Value> {
        match &self.values {
            DictValues::Int(v) => v
                .get(code as usize)
                .map(|&x| Value::Int(x))
                .ok_or(Error::IndexOutOfBounds {
                    index: code as usize,
                    len: v.len(),
                }),
            DictValues::Str(h) => Ok(Value::Str(h.get(code as usize)?.to_string())),
        }
    }

    pub fn decode_at(&self, index: usize) -> Result<Value> {
        self.value_of_code(self.code_at(index)?)
    }

    pub fn decode_all(&self) -> Result<ColumnData> {
        let codes = self.codes.unpack_all();
        match &self.values {
            DictValues::Int(v) => {
                let mut out = Vec::with_capacity(codes.len());
                for c in codes {
                    out.push(*v.get(c as usize).ok_or(Error::IndexOutOfBounds {
                        index: c as usize,
                        len: v.len(),
                    })?);
                }
                Ok(ColumnData::Int(out))
            }
            DictValues::Str(h) => {
                let mut out = Vec::with_capacity(codes.len());
                for c in codes {
                    out.push(h.get(c as usize)?.to_string());
                }
                Ok(ColumnData::Str(out))
            }
        }
    }

    pub fn payload_len(&self) -> u64 {
        self.values.serialized_len()
            + PackedBuffer::serialized_len(self.codes.width(), self.codes.len())
    }
}

pub fn dict_encode(col: &ColumnVector) -> DictEncoded {
    match col.data() {
        ColumnData::Int(values) => {
            let mut distinct = Vec::new();
            let mut seen: HashMap<i64, u64> = HashMap::new();
            let codes: Vec<u64> = values
                .iter()
                .map(|&v| {
                    *seen.entry(v).or_insert_with(|| {
                        distinct.push(v);
                        distinct.len() as u64 - 1
                    })
                })
                .collect();
            let width = min_width(&[distinct.len().saturating_sub(1) as u64]);
            let codes = PackedBuffer::pack(&codes, width).expect("codes fit dict width");
            DictEncoded {
                values: DictValues::Int(distinct),
                codes,
            }
        }
        ColumnData::Str(values) => {
            let mut interner = StringInterner::new();
            let codes: Vec<u64> = values.iter().map(|s| interner.intern(s) as u64).collect();
            let heap = interner.into_heap();
            let width = min_width(&[heap.len().saturating_sub(1) as u64]);
            let codes = PackedBuffer::pack(&codes, width).expect("codes fit dict width");
            DictEncoded {
                values: DictValues::Str(heap),
                codes,
            }
        }
    }
}

/// Which baseline codec a column ended up with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerticalEncoded {
    For(ForEncoded),
    Dict(DictEncoded),
}

impl VerticalEncoded {
    pub fn payload_len(&self) -> u64 {
        match self {
            VerticalEncoded::For(e) => e.payload_len(),
            VerticalEncoded::Dict(e) => e.payload_len(),
        }
    }

    pub fn is_dict(&self) -> bool {
        matches!(self, VerticalEncoded::Dict(_))
    }
}

/// Best single-column encoding for the column: FOR or Dict for integers
/// (whichever serializes smaller, FOR on ties), always Dict for strings.
/// The report compares against the raw uncompressed layout.
pub fn best_vertical(col: &ColumnVector) -> Result<(VerticalEncoded, SizeReport)> {
    if col.is_empty() {
        return Err(Error::EmptyColumn);
    }
    let encoded = match col.data() {
        ColumnData::Str(_) => VerticalEncoded::Dict(dict_encode(col)),
        ColumnData::Int(_) => {
            let fore = for_encode(col)?;
            let dict = dict_encode(col);
            if dict.payload_len() < fore.payload_len() {
                VerticalEncoded::Dict(dict)
            } else {
                VerticalEncoded::For(fore)
            }
        }
    };
    let report = SizeReport::new(col.uncompressed_size(), encoded.payload_len())?;
    Ok((encoded, report))
}
