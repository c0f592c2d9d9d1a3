use std::io::{Read, Write};
use std::ops::BitOrAssign;

use crate::error::{Error, Result};

/// Dense membership set over `[0, len)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Bitmap {
    words: Vec<u64>,
    len: u64,
}

impl std::fmt::Debug for Bitmap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Bitmap {{ len: {}, ones: {} }}", self.len, self.count_ones())
    }
}

impl Bitmap {
    pub fn new(len: u64) -> Self {
        Bitmap {
            words: vec![0; len.div_ceil(64) as usize],
            len,
        }
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn set(&mut self, i: u64) {
        debug_assert!(i < self.len);
        self.words[(i >> 6) as usize] |= 1 << (i & 63);
    }

    /// Sets bit `i` and reports whether it was clear before.
    #[inline]
    pub fn insert(&mut self, i: u64) -> bool {
        let w = &mut self.words[(i >> 6) as usize];
        let mask = 1 << (i & 63);
        let fresh = *w & mask == 0;
        *w |= mask;
        fresh
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        i < self.len && self.words[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some(wi as u64 * 64 + bit)
            })
        })
    }

    /// Raw little-endian bytes, bit `i` at byte `i / 8`, position `i % 8`.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).collect();
        out.truncate(self.len.div_ceil(8) as usize);
        out
    }

    pub fn from_le_bytes(bytes: &[u8], len: u64) -> Result<Self> {
        if bytes.len() as u64 != len.div_ceil(8) {
            return Err(Error::CacheFormat(format!(
                "bitmap of {len} bits needs {} bytes, found {}",
                len.div_ceil(8),
                bytes.len()
            )));
        }
        let mut bm = Bitmap::new(len);
        for (i, chunk) in bytes.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            bm.words[i] = u64::from_le_bytes(buf);
        }
        Ok(bm)
    }
}

impl BitOrAssign<&Bitmap> for Bitmap {
    fn bitor_assign(&mut self, rhs: &Bitmap) {
        assert_eq!(self.len, rhs.len, "bitmap length mismatch");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a |= b;
        }
    }
}

pub const DUMP_MAGIC: [u8; 4] = *b"UPW1";

/// Header of a bitmap dump: magic, n, q, p, reserved byte, bit length (u64 LE); 16 bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DumpHeader {
    pub n: u8,
    pub q: u8,
    pub p: u8,
    pub bit_len: u64,
}

pub fn write_dump<W: Write>(mut w: W, header: DumpHeader, bitmap: &Bitmap) -> Result<()> {
    if header.bit_len != bitmap.len() {
        return Err(Error::InvalidArgument("header length disagrees with bitmap".into()));
    }
    let mut head = [0u8; 16];
    head[..4].copy_from_slice(&DUMP_MAGIC);
    head[4] = header.n;
    head[5] = header.q;
    head[6] = header.p;
    head[8..].copy_from_slice(&header.bit_len.to_le_bytes());
    w.write_all(&head)?;
    w.write_all(&bitmap.to_le_bytes())?;
    Ok(())
}

pub fn read_dump<R: Read>(mut r: R) -> Result<(DumpHeader, Bitmap)> {
    let mut head = [0u8; 16];
    r.read_exact(&mut head)?;
    if head[..4] != DUMP_MAGIC {
        return Err(Error::CacheFormat("bad bitmap magic".into()));
    }
    let header = DumpHeader {
        n: head[4],
        q: head[5],
        p: head[6],
        bit_len: u64::from_le_bytes(head[8..].try_into().unwrap()),
    };
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    let bm = Bitmap::from_le_bytes(&body, header.bit_len)?;
    Ok((header, bm))
}
