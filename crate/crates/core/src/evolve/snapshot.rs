//! Binary snapshot files.
//!
//! Layout, all little-endian: magic `BDNK1`, `d: u32`, `N: u64 × d`,
//! `L: f64 × d`, `time: f64`, `count: u32`, then `count` names each as
//! `len: u32` + ASCII bytes, then each field's `f64` values in x-fastest order.

use std::io::{self, Read, Write};

use super::grid::{Fields, Grid, FIELD_NAMES};

pub const MAGIC: &[u8; 5] = b"BDNK1";

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub dim: usize,
    pub n: Vec<u64>,
    pub length: Vec<f64>,
    pub time: f64,
    pub names: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl Snapshot {
    pub fn from_fields(grid: &Grid, fields: &Fields, time: f64) -> Self {
        Self {
            dim: grid.dim,
            n: grid.n[..grid.dim].iter().map(|&x| x as u64).collect(),
            length: grid.length[..grid.dim].to_vec(),
            time,
            names: FIELD_NAMES.iter().map(|s| s.to_string()).collect(),
            data: fields.arrays().iter().map(|a| a.to_vec()).collect(),
        }
    }

    pub fn field(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.data[i].as_slice())
    }

    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        for n in &self.n {
            w.write_all(&n.to_le_bytes())?;
        }
        for l in &self.length {
            w.write_all(&l.to_le_bytes())?;
        }
        w.write_all(&self.time.to_le_bytes())?;
        w.write_all(&(self.names.len() as u32).to_le_bytes())?;
        for name in &self.names {
            w.write_all(&(name.len() as u32).to_le_bytes())?;
            w.write_all(name.as_bytes())?;
        }
        for field in &self.data {
            for v in field {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read<R: Read>(mut r: R) -> io::Result<Self> {
        let invalid = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(invalid("bad snapshot magic"));
        }
        let dim = read_u32(&mut r)? as usize;
        if !(1..=3).contains(&dim) {
            return Err(invalid("dimension must be 1, 2 or 3"));
        }
        let n = (0..dim).map(|_| read_u64(&mut r)).collect::<io::Result<Vec<_>>>()?;
        let length = (0..dim).map(|_| read_f64(&mut r)).collect::<io::Result<Vec<_>>>()?;
        let time = read_f64(&mut r)?;
        let count = read_u32(&mut r)? as usize;
        let mut names = Vec::with_capacity(count);
        for _ in 0..count {
            let len = read_u32(&mut r)? as usize;
            let mut buf = vec![0u8; len];
            r.read_exact(&mut buf)?;
            if !buf.is_ascii() {
                return Err(invalid("field name is not ASCII"));
            }
            names.push(String::from_utf8(buf).map_err(|_| invalid("field name"))?);
        }
        let points: u64 = n.iter().product();
        let data = (0..count)
            .map(|_| (0..points).map(|_| read_f64(&mut r)).collect())
            .collect::<io::Result<Vec<Vec<f64>>>>()?;
        Ok(Self {
            dim,
            n,
            length,
            time,
            names,
            data,
        })
    }
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> io::Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
