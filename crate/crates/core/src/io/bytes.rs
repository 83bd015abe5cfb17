//! Little-endian buffer primitives and the CRC-32 (IEEE) used by the model
//! container.

use crate::error::{Error, Result};

const fn crc32_table() -> [u32; 256] {
    let mut table = [0u32; 256];
    let mut i = 0;
    while i < 256 {
        let mut c = i as u32;
        let mut bit = 0;
        while bit < 8 {
            c = if c & 1 != 0 { 0xEDB88320 ^ (c >> 1) } else { c >> 1 };
            bit += 1;
        }
        table[i] = c;
        i += 1;
    }
    table
}

static CRC_TABLE: [u32; 256] = crc32_table();

pub(crate) fn crc32(data: &[u8]) -> u32 {
    let mut c = 0xFFFF_FFFFu32;
    for &b in data {
        c = CRC_TABLE[((c ^ b as u32) & 0xFF) as usize] ^ (c >> 8);
    }
    c ^ 0xFFFF_FFFF
}

#[derive(Default)]
pub(crate) struct ByteWriter {
    buf: Vec<u8>,
}

impl ByteWriter {
    pub fn new() -> Self {
        ByteWriter::default()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }

    pub fn put_u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn put_u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn put_f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    /// u64 length prefix followed by the raw values.
    pub fn put_f64_slice(&mut self, values: &[f64]) {
        self.put_u64(values.len() as u64);
        for &v in values {
            self.put_f64(v);
        }
    }

    pub fn put_i8_slice(&mut self, values: &[i8]) {
        self.put_u64(values.len() as u64);
        for &v in values {
            self.buf.push(v as u8);
        }
    }

    pub fn put_usize_slice(&mut self, values: &[usize]) {
        self.put_u64(values.len() as u64);
        for &v in values {
            self.put_u64(v as u64);
        }
    }
}

pub(crate) struct ByteReader<'a> {
    data: &'a [u8],
    pos: usize,
    what: &'static str,
}

impl<'a> ByteReader<'a> {
    pub fn new(data: &'a [u8], what: &'static str) -> Self {
        ByteReader {
            data,
            pos: 0,
            what,
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(Error::Format(format!("{} is truncated", self.what)));
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    pub fn is_exhausted(&self) -> bool {
        self.pos == self.data.len()
    }

    pub fn take_u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn take_u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub fn take_u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn take_u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn take_f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn take_len(&mut self) -> Result<usize> {
        let n = self.take_u64()?;
        // Guard against nonsense lengths from corrupt files.
        if n > (self.data.len() as u64) {
            return Err(Error::Format(format!(
                "{} declares an implausible length {n}",
                self.what
            )));
        }
        Ok(n as usize)
    }

    pub fn take_f64_slice(&mut self) -> Result<Vec<f64>> {
        let n = self.take_len()?;
        (0..n).map(|_| self.take_f64()).collect()
    }

    pub fn take_i8_slice(&mut self) -> Result<Vec<i8>> {
        let n = self.take_len()?;
        Ok(self.take(n)?.iter().map(|&b| b as i8).collect())
    }

    pub fn take_usize_slice(&mut self) -> Result<Vec<usize>> {
        let n = self.take_len()?;
        (0..n).map(|_| self.take_u64().map(|v| v as usize)).collect()
    }
}
