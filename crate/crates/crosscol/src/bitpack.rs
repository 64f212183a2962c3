//! Fixed-width bit-packing with O(1) random access.
//!
//! Values are laid out LSB-first inside little-endian 64-bit words: value `i`
//! occupies bits `i*width .. (i+1)*width` of the stream and may straddle a
//! word boundary, in which case its low bits sit at the top of one word and
//! its high bits at the bottom of the next. Reading any value touches at most
//! two words. This layout is normative for the block file format.

use crate::error::{Error, Result};

/// A sequence of unsigned integers stored at a fixed bit width.
///
/// Width 0 is the degenerate all-zero column (no payload words at all);
/// width 64 is the escape hatch that stores values verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedBuffer {
    width: u32,
    count: usize,
    words: Vec<u64>,
}

/// Smallest width that can hold every value: `max < 2^width`.
/// Empty and all-zero inputs need zero bits.
pub fn min_width(values: &[u64]) -> u32 {
    match values.iter().max() {
        None | Some(0) => 0,
        Some(&max) => 64 - max.leading_zeros(),
    }
}

fn word_count(width: u32, count: usize) -> usize {
    let bits = width as u128 * count as u128;
    bits.div_ceil(64) as usize
}

impl PackedBuffer {
    pub fn pack(values: &[u64], width: u32) -> Result<Self> {
        if width > 64 {
            return Err(Error::InvalidWidth { width });
        }
        if width < 64 {
            let limit = 1u64 << width;
            if let Some(index) = values.iter().position(|&v| v >= limit) {
                return Err(Error::ValueTooWide {
                    index,
                    value: values[index],
                    width,
                });
            }
        }
        let mut words = vec![0u64; word_count(width, values.len())];
        if width > 0 {
            for (i, &v) in values.iter().enumerate() {
                let bit = i * width as usize;
                let word = bit / 64;
                let offset = (bit % 64) as u32;
                words[word] |= v << offset;
                if offset + width > 64 {
                    words[word + 1] |= v >> (64 - offset);
                }
            }
        }
        Ok(PackedBuffer {
            width,
            count: values.len(),
            words,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Size of the packed bit stream in bytes (a whole number of 64-bit words).
    pub fn byte_len(&self) -> u64 {
        self.words.len() as u64 * 8
    }

    pub fn unpack_at(&self, index: usize) -> Result<u64> {
        if index >= self.count {
            return Err(Error::IndexOutOfBounds {
                index,
                len: self.count,
            });
        }
        Ok(unpack_from(
            &mut |w| self.words[w],
            self.width,
            index,
        ))
    }

    pub fn unpack_all(&self) -> Vec<u64> {
        (0..self.count)
            .map(|i| unpack_from(&mut |w| self.words[w], self.width, i))
            .collect()
    }

    /// Serialized size of a buffer with the given shape, without building it.
    pub fn serialized_len(width: u32, count: usize) -> u64 {
        // width byte + count u32 + words
        5 + word_count(width, count) as u64 * 8
    }

    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.push(self.width as u8);
        out.extend_from_slice(&(self.count as u32).to_le_bytes());
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
    }

    pub fn read_from(bytes: &[u8], pos: &mut usize) -> Result<Self> {
        let truncated = |context: &str| Error::Truncated {
            context: context.to_string(),
        };
        let width = *bytes.get(*pos).ok_or_else(|| truncated("packed width"))? as u32;
        if width > 64 {
            return Err(Error::InvalidWidth { width });
        }
        *pos += 1;
        let count_bytes = bytes
            .get(*pos..*pos + 4)
            .ok_or_else(|| truncated("packed count"))?;
        let count = u32::from_le_bytes(count_bytes.try_into().unwrap()) as usize;
        *pos += 4;
        let n_words = word_count(width, count);
        let mut words = Vec::with_capacity(n_words);
        for _ in 0..n_words {
            let chunk = bytes
                .get(*pos..*pos + 8)
                .ok_or_else(|| truncated("packed words"))?;
            words.push(u64::from_le_bytes(chunk.try_into().unwrap()));
            *pos += 8;
        }
        Ok(PackedBuffer { width, count, words })
    }
}

/// Core random-access read. `word_at` is a closure so tests can count how
/// many words a single access touches.
#[inline]
fn unpack_from(word_at: &mut impl FnMut(usize) -> u64, width: u32, index: usize) -> u64 {
    if width == 0 {
        return 0;
    }
    let bit = index * width as usize;
    let word = bit / 64;
    let offset = (bit % 64) as u32;
    let mask = if width == 64 { u64::MAX } else { (1 << width) - 1 };
    let mut v = word_at(word) >> offset;
    if offset + width > 64 {
        v |= word_at(word + 1) << (64 - offset);
    }
    v & mask
}
