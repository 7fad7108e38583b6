//! Binary checkpoint format for named f64 arrays.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic   8 bytes  b"GTICKPT1"
//! version u32      caller-defined format tag
//! count   u32      number of arrays
//! per array:
//!   name_len u32, name bytes (UTF-8)
//!   ndim     u32, dims (u64 each)
//!   data     f64 LE, product(dims) values
//! ```
//!
//! The byte stream is a pure function of the entries, so identical
//! models produce identical files.

use crate::error::{NnError, Result};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"GTICKPT1";

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayEntry {
    pub name: String,
    pub dims: Vec<u64>,
    pub data: Vec<f64>,
}

impl ArrayEntry {
    pub fn new(name: &str, dims: Vec<u64>, data: Vec<f64>) -> Self {
        debug_assert_eq!(dims.iter().product::<u64>() as usize, data.len());
        ArrayEntry {
            name: name.to_string(),
            dims,
            data,
        }
    }
}

pub fn save(path: &Path, version: u32, entries: &[ArrayEntry]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&version.to_le_bytes())?;
    w.write_all(&(entries.len() as u32).to_le_bytes())?;
    for e in entries {
        let name = e.name.as_bytes();
        w.write_all(&(name.len() as u32).to_le_bytes())?;
        w.write_all(name)?;
        w.write_all(&(e.dims.len() as u32).to_le_bytes())?;
        for d in &e.dims {
            w.write_all(&d.to_le_bytes())?;
        }
        if e.dims.iter().product::<u64>() as usize != e.data.len() {
            return Err(NnError::Checkpoint(format!(
                "array {}: dims {:?} disagree with {} values",
                e.name,
                e.dims,
                e.data.len()
            )));
        }
        for v in &e.data {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load(path: &Path) -> Result<(u32, Vec<ArrayEntry>)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(NnError::Checkpoint(format!(
            "bad magic in {}",
            path.display()
        )));
    }
    let version = read_u32(&mut r)?;
    let count = read_u32(&mut r)? as usize;
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let name_len = read_u32(&mut r)? as usize;
        let mut name = vec![0u8; name_len];
        r.read_exact(&mut name)?;
        let name = String::from_utf8(name)
            .map_err(|_| NnError::Checkpoint("non-UTF8 array name".into()))?;
        let ndim = read_u32(&mut r)? as usize;
        let mut dims = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            dims.push(u64::from_le_bytes(b));
        }
        let len = dims.iter().product::<u64>() as usize;
        let mut data = Vec::with_capacity(len);
        let mut b = [0u8; 8];
        for _ in 0..len {
            r.read_exact(&mut b)?;
            data.push(f64::from_le_bytes(b));
        }
        entries.push(ArrayEntry { name, dims, data });
    }
    Ok((version, entries))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}
