//! Binary field snapshots ("AFLD" format).
//!
//! Layout, all little-endian:
//! - 8-byte magic `AFLD0001`
//! - u32 dimension `d`
//! - `d` × u64 per-axis sample counts
//! - `d` × f64 per-axis box half-widths
//! - f64 time stamp
//! - `∏ N_j` complex samples as interleaved f64 `(re, im)`, row-major with
//!   the x1 axis slowest.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::grid::{Field, Grid};
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"AFLD0001";

pub fn write_field<W: Write>(w: &mut W, f: &Field) -> Result<()> {
    w.write_all(MAGIC)?;
    let g = &f.grid;
    w.write_all(&(g.dim() as u32).to_le_bytes())?;
    for a in 0..g.dim() {
        w.write_all(&(g.n_points(a) as u64).to_le_bytes())?;
    }
    for a in 0..g.dim() {
        w.write_all(&g.half_length(a).to_le_bytes())?;
    }
    w.write_all(&f.time.to_le_bytes())?;
    for v in &f.values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field<R: Read>(r: &mut R) -> Result<Field> {
    let mut magic = [0u8; 8];
    read_exact(r, &mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let d = read_u32(r)? as usize;
    if d == 0 || d > 3 {
        return Err(Error::Format(format!("unsupported dimension {d}")));
    }
    let mut n_points = Vec::with_capacity(d);
    for _ in 0..d {
        let n = read_u64(r)?;
        if n > 1 << 32 {
            return Err(Error::Format(format!("implausible axis count {n}")));
        }
        n_points.push(n as usize);
    }
    let mut half_length = Vec::with_capacity(d);
    for _ in 0..d {
        half_length.push(read_f64(r)?);
    }
    let time = read_f64(r)?;
    let grid = Grid::new(&half_length, &n_points)
        .map_err(|e| Error::Format(format!("invalid grid header: {e}")))?;
    let len = grid.len();
    let mut values = Vec::with_capacity(len);
    for _ in 0..len {
        let re = read_f64(r)?;
        let im = read_f64(r)?;
        values.push(Complex64::new(re, im));
    }
    Field::new(grid, time, values).map_err(|e| Error::Format(e.to_string()))
}

pub fn save(path: &Path, f: &Field) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_field(&mut w, f)
}

pub fn load(path: &Path) -> Result<Field> {
    let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
    read_field(&mut r)
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf)
        .map_err(|_| Error::Format("truncated payload".into()))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn sample_field() -> Field {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let g = Grid::new(&[2.0, 4.0], &[8, 16]).unwrap();
        Field::new(
            g.clone(),
            1.25,
            (0..g.len())
                .map(|_| Complex64::new(rng.gen(), rng.gen()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let f = sample_field();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let back = read_field(&mut buf.as_slice()).unwrap();
        assert_eq!(back.time, f.time);
        assert_eq!(back.grid, f.grid);
        assert_eq!(back.values, f.values);
    }

    #[test]
    fn rejects_bad_magic() {
        let f = sample_field();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        buf[0] = b'X';
        assert!(matches!(read_field(&mut buf.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn rejects_truncation() {
        let f = sample_field();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        buf.truncate(buf.len() - 9);
        assert!(matches!(read_field(&mut buf.as_slice()), Err(Error::Format(_))));
    }
}
