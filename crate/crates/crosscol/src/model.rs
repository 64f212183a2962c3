//! Logical column types, blocks, and size accounting.
//!
//! Every codec in this crate operates on a single physical integer pathway:
//! dates are signed day counts since 1970-01-01 (32-bit range), timestamps
//! are signed second counts since the epoch, money is signed cent counts.
//! Strings are the only non-integer physical representation.

use std::fmt;

use crate::error::{Error, Result};

/// Default number of rows per block.
pub const DEFAULT_BLOCK_CAPACITY: usize = 1_000_000;

/// Logical type of a column. Everything except `String` is stored as `i64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogicalType {
    /// Days since 1970-01-01, constrained to the `i32` range.
    Date,
    /// Seconds since the epoch.
    Timestamp,
    Integer,
    /// Exact scaled cents; no fractional part exists.
    Money,
    String,
}

impl LogicalType {
    pub fn is_string(self) -> bool {
        matches!(self, LogicalType::String)
    }

    pub fn is_integer(self) -> bool {
        !self.is_string()
    }

    /// Two integer columns are unit-compatible when they count the same
    /// thing (both day counts, both seconds, both cents, or both plain
    /// integers). Diff-encoding across units is meaningless.
    pub fn unit_compatible(self, other: LogicalType) -> bool {
        self.is_integer() && self == other
    }

    pub fn name(self) -> &'static str {
        match self {
            LogicalType::Date => "date",
            LogicalType::Timestamp => "timestamp",
            LogicalType::Integer => "integer",
            LogicalType::Money => "money",
            LogicalType::String => "string",
        }
    }

    pub fn parse(s: &str) -> Option<LogicalType> {
        match s {
            "date" => Some(LogicalType::Date),
            "timestamp" => Some(LogicalType::Timestamp),
            "integer" => Some(LogicalType::Integer),
            "money" => Some(LogicalType::Money),
            "string" => Some(LogicalType::String),
            _ => None,
        }
    }
}

impl fmt::Display for LogicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single decoded cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(i64),
    Str(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Str(s) => f.write_str(s),
        }
    }
}

/// Physical storage for one column's values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnData {
    Int(Vec<i64>),
    Str(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Int(v) => v.len(),
            ColumnData::Str(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value_at(&self, index: usize) -> Result<Value> {
        let len = self.len();
        match self {
            ColumnData::Int(v) => v
                .get(index)
                .map(|&x| Value::Int(x))
                .ok_or(Error::IndexOutOfBounds { index, len }),
            ColumnData::Str(v) => v
                .get(index)
                .map(|s| Value::Str(s.clone()))
                .ok_or(Error::IndexOutOfBounds { index, len }),
        }
    }
}

/// A typed logical column within one block. Immutable after construction;
/// no nulls anywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnVector {
    name: String,
    ltype: LogicalType,
    data: ColumnData,
}

impl ColumnVector {
    pub fn new(name: impl Into<String>, ltype: LogicalType, data: ColumnData) -> Result<Self> {
        let name = name.into();
        match (&data, ltype.is_string()) {
            (ColumnData::Str(_), true) | (ColumnData::Int(_), false) => {}
            _ => return Err(Error::NotInteger { name }),
        }
        Ok(ColumnVector { name, ltype, data })
    }

    pub fn ints(name: impl Into<String>, ltype: LogicalType, values: Vec<i64>) -> Result<Self> {
        Self::new(name, ltype, ColumnData::Int(values))
    }

    pub fn strings(name: impl Into<String>, values: Vec<String>) -> Result<Self> {
        Self::new(name, LogicalType::String, ColumnData::Str(values))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ltype(&self) -> LogicalType {
        self.ltype
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// The integer values, or an error for string columns.
    pub fn int_values(&self) -> Result<&[i64]> {
        match &self.data {
            ColumnData::Int(v) => Ok(v),
            ColumnData::Str(_) => Err(Error::NotInteger {
                name: self.name.clone(),
            }),
        }
    }

    pub fn str_values(&self) -> Option<&[String]> {
        match &self.data {
            ColumnData::Str(v) => Some(v),
            ColumnData::Int(_) => None,
        }
    }

    /// Raw size of the column with no encoding applied: 8 bytes per integer;
    /// for strings, the flattened bytes plus one 32-bit start offset per value
    /// (plus the terminal offset). The uncompressed query path in `bench`
    /// stores columns exactly like this.
    pub fn uncompressed_size(&self) -> u64 {
        match &self.data {
            ColumnData::Int(v) => 8 * v.len() as u64,
            ColumnData::Str(v) => {
                let bytes: u64 = v.iter().map(|s| s.len() as u64).sum();
                bytes + 4 * (v.len() as u64 + 1)
            }
        }
    }
}

/// A self-contained unit of rows; all columns share the same length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    row_count: usize,
    columns: Vec<ColumnVector>,
}

impl Block {
    pub fn new(columns: Vec<ColumnVector>) -> Result<Self> {
        Self::with_capacity(columns, DEFAULT_BLOCK_CAPACITY)
    }

    pub fn with_capacity(columns: Vec<ColumnVector>, capacity: usize) -> Result<Self> {
        let row_count = columns.first().map_or(0, |c| c.len());
        for col in &columns {
            if col.len() != row_count {
                return Err(Error::RowCountMismatch {
                    name: col.name().to_string(),
                    len: col.len(),
                    expected: row_count,
                });
            }
        }
        if row_count > capacity {
            return Err(Error::BlockTooLarge {
                rows: row_count,
                capacity,
            });
        }
        Ok(Block { row_count, columns })
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn columns(&self) -> &[ColumnVector] {
        &self.columns
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, id: u16) -> Result<&ColumnVector> {
        self.columns
            .get(id as usize)
            .ok_or(Error::UnknownColumn { id: id as usize })
    }

    pub fn column_by_name(&self, name: &str) -> Option<(u16, &ColumnVector)> {
        self.columns
            .iter()
            .position(|c| c.name() == name)
            .map(|i| (i as u16, &self.columns[i]))
    }
}

/// Compares an encoded column (metadata and outliers included) against its
/// single-column baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeReport {
    pub baseline_bytes: u64,
    pub encoded_bytes: u64,
    pub saving_rate: f64,
}

impl SizeReport {
    pub fn new(baseline_bytes: u64, encoded_bytes: u64) -> Result<Self> {
        Ok(SizeReport {
            baseline_bytes,
            encoded_bytes,
            saving_rate: saving_rate(baseline_bytes, encoded_bytes)?,
        })
    }
}

/// Fraction of the baseline saved by the encoding: `1 - encoded / baseline`.
/// Negative when the encoding is larger than the baseline.
pub fn saving_rate(baseline_bytes: u64, encoded_bytes: u64) -> Result<f64> {
    if baseline_bytes == 0 {
        return Err(Error::ZeroBaseline);
    }
    let diff = baseline_bytes as i128 - encoded_bytes as i128;
    Ok(diff as f64 / baseline_bytes as f64)
}

/// Day count since 1970-01-01 for a proleptic-Gregorian civil date.
///
/// Errors on calendar-invalid dates and on day counts outside the `i32`
/// range (the physical representation of `LogicalType::Date`).
pub fn days_since_epoch(year: i32, month: u32, day: u32) -> Result<i32> {
    let err = Error::DateOutOfRange { year, month, day };
    if !(1..=12).contains(&month) || day < 1 || day > days_in_month(year, month) {
        return Err(err);
    }
    let y = i64::from(year) - i64::from(month <= 2);
    let era = y.div_euclid(400);
    let yoe = (y - era * 400) as u64; // [0, 399]
    let mp = (month + 9) % 12; // March-based month, [0, 11]
    let doy = (153 * mp as u64 + 2) / 5 + day as u64 - 1; // [0, 365]
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy; // [0, 146096]
    let days = era * 146097 + doe as i64 - 719468;
    i32::try_from(days).map_err(|_| err)
}

/// Inverse of [`days_since_epoch`]: `(year, month, day)`.
pub fn civil_from_days(days: i32) -> (i32, u32, u32) {
    let z = i64::from(days) + 719468;
    let era = z.div_euclid(146097);
    let doe = (z - era * 146097) as u64; // [0, 146096]
    let yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365; // [0, 399]
    let y = yoe as i64 + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100); // [0, 365]
    let mp = (5 * doy + 2) / 153; // [0, 11]
    let day = (doy - (153 * mp + 2) / 5 + 1) as u32; // [1, 31]
    let month = if mp < 10 { mp + 3 } else { mp - 9 } as u32; // [1, 12]
    ((y + i64::from(month <= 2)) as i32, month, day)
}

pub fn is_leap_year(year: i32) -> bool {
    year % 4 == 0 && (year % 100 != 0 || year % 400 == 0)
}

pub fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            if is_leap_year(year) {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: count days one at a time from the epoch.
    fn epoch_days_by_counting(year: i32, month: u32, day: u32) -> i32 {
        assert!(year >= 1970, "counting oracle only walks forward");
        let mut days = 0i32;
        let (mut y, mut m, mut d) = (1970, 1, 1);
        while (y, m, d) != (year, month, day) {
            d += 1;
            if d > days_in_month(y, m) {
                d = 1;
                m += 1;
                if m > 12 {
                    m = 1;
                    y += 1;
                }
            }
            days += 1;
        }
        days
    }

    #[test]
    fn epoch_origin_is_day_zero() {
        assert_eq!(days_since_epoch(1970, 1, 1).unwrap(), 0);
    }

    #[test]
    fn day_count_matches_counting_oracle() {
        assert_eq!(epoch_days_by_counting(1992, 1, 2), 8036);
        assert_eq!(days_since_epoch(1992, 1, 2).unwrap(), 8036);
        for (y, m, d) in [
            (1970, 12, 31),
            (1972, 2, 29),
            (1992, 3, 10),
            (2000, 2, 29),
            (2024, 6, 8),
        ] {
            assert_eq!(
                days_since_epoch(y, m, d).unwrap(),
                epoch_days_by_counting(y, m, d),
                "{y}-{m}-{d}"
            );
        }
    }

    #[test]
    fn date_gap_between_shipment_rows() {
        let ship = days_since_epoch(1992, 1, 2).unwrap();
        let commit = days_since_epoch(1992, 3, 10).unwrap();
        assert_eq!(commit - ship, 68);
    }

    #[test]
    fn rejects_invalid_dates() {
        assert!(days_since_epoch(2023, 2, 29).is_err());
        assert!(days_since_epoch(1999, 13, 1).is_err());
        assert!(days_since_epoch(1999, 0, 1).is_err());
        assert!(days_since_epoch(1999, 4, 31).is_err());
        // Representable extremes survive, one step past them does not.
        let (y, m, d) = civil_from_days(i32::MAX);
        assert_eq!(days_since_epoch(y, m, d).unwrap(), i32::MAX);
        assert!(days_since_epoch(y, m, d + 1).is_err());
    }

    #[test]
    fn saving_rate_matches_published_ratios() {
        // Sizes quoted in the usual decimal megabytes.
        let mb = |x: f64| (x * 1_000_000.0) as u64;
        let receipt = saving_rate(mb(89.99), mb(37.49)).unwrap();
        assert!((receipt - 0.583).abs() < 0.0005, "{receipt}");
        let commit = saving_rate(mb(89.99), mb(59.99)).unwrap();
        assert!((commit - 0.333).abs() < 0.0005, "{commit}");
        assert_eq!(saving_rate(1234, 1234).unwrap(), 0.0);
        assert!(saving_rate(100, 150).unwrap() < 0.0);
        assert!(matches!(saving_rate(0, 10), Err(Error::ZeroBaseline)));
    }

    #[test]
    fn column_type_checks() {
        assert!(ColumnVector::ints("d", LogicalType::Date, vec![1, 2]).is_ok());
        assert!(ColumnVector::new(
            "d",
            LogicalType::String,
            ColumnData::Int(vec![1])
        )
        .is_err());
        assert!(ColumnVector::new(
            "s",
            LogicalType::Integer,
            ColumnData::Str(vec!["x".into()])
        )
        .is_err());
    }

    #[test]
    fn block_rejects_ragged_columns() {
        let a = ColumnVector::ints("a", LogicalType::Integer, vec![1, 2, 3]).unwrap();
        let b = ColumnVector::ints("b", LogicalType::Integer, vec![1]).unwrap();
        assert!(matches!(
            Block::new(vec![a.clone(), b]),
            Err(Error::RowCountMismatch { .. })
        ));
        assert!(matches!(
            Block::with_capacity(vec![a], 2),
            Err(Error::BlockTooLarge { .. })
        ));
    }

    #[test]
    fn unit_compatibility() {
        use LogicalType::*;
        assert!(Date.unit_compatible(Date));
        assert!(Money.unit_compatible(Money));
        assert!(!Date.unit_compatible(Timestamp));
        assert!(!String.unit_compatible(String));
    }
}
