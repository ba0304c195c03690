//! Binary state checkpoints, all fields little-endian:
//!
//! ```text
//! offset  size   field
//! 0       4      magic "BECR"
//! 4       4      u32 format version
//! 8       8      u64 n (interior points)
//! 16      8      f64 r_max
//! 24      16·n   u_i as interleaved (re, im) f64 pairs
//! ```

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{RadialGrid, RadialState};
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"BECR";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_checkpoint<W: Write>(mut w: W, state: &RadialState) -> Result<()> {
    w.write_all(&CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&(state.grid.n as u64).to_le_bytes())?;
    w.write_all(&state.grid.r_max.to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * state.u.len());
    for z in &state.u {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<RadialState> {
    let mut header = [0u8; 24];
    r.read_exact(&mut header)?;
    if header[..4] != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let n = u64::from_le_bytes(header[8..16].try_into().unwrap()) as usize;
    let r_max = f64::from_le_bytes(header[16..24].try_into().unwrap());
    let grid = RadialGrid::new(r_max, n).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let mut payload = vec![0u8; 16 * n];
    r.read_exact(&mut payload)?;
    let u = payload
        .chunks_exact(16)
        .map(|c| Complex64::new(f64::from_le_bytes(c[..8].try_into().unwrap()), f64::from_le_bytes(c[8..].try_into().unwrap())))
        .collect();
    RadialState::new(grid, u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let grid = RadialGrid::new(10.0, 64).unwrap();
        let mut s = RadialState::gaussian(grid, 1.1);
        s.u[3].im = -0.25;
        let mut bytes = Vec::new();
        write_checkpoint(&mut bytes, &s).unwrap();
        assert_eq!(bytes.len(), 24 + 16 * 64);
        assert_eq!(&bytes[..4], b"BECR");
        assert_eq!(read_checkpoint(bytes.as_slice()).unwrap(), s);
    }

    #[test]
    fn rejects_corrupt_headers() {
        let s = RadialState::gaussian(RadialGrid::new(10.0, 16).unwrap(), 1.0);
        let mut bytes = Vec::new();
        write_checkpoint(&mut bytes, &s).unwrap();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(read_checkpoint(bad.as_slice()), Err(Error::Checkpoint(_))));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(read_checkpoint(bad.as_slice()), Err(Error::Checkpoint(_))));
        assert!(read_checkpoint(&bytes[..100]).is_err());
    }
}
