use std::io::{Read, Write};

use super::{Complex64, Grid, Result, SpectralError, SpectralField};

/// Little-endian header `d: u64, L: f64, Nx: u64, Ny: u64, t: f64`, then
/// interleaved `(re, im)` coefficients in storage order.
pub fn write_snapshot(mut w: impl Write, field: &SpectralField) -> Result<()> {
    let g = field.grid();
    w.write_all(&(g.d() as u64).to_le_bytes())?;
    w.write_all(&g.l().to_le_bytes())?;
    w.write_all(&(g.nx() as u64).to_le_bytes())?;
    w.write_all(&(g.ny() as u64).to_le_bytes())?;
    w.write_all(&field.time().to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * g.len());
    for z in field.coefficients() {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_snapshot(mut r: impl Read) -> Result<SpectralField> {
    let mut word = [0u8; 8];
    let mut next = |r: &mut dyn Read| -> Result<[u8; 8]> {
        r.read_exact(&mut word)?;
        Ok(word)
    };
    let d = u64::from_le_bytes(next(&mut r)?);
    let l = f64::from_le_bytes(next(&mut r)?);
    let nx = u64::from_le_bytes(next(&mut r)?);
    let ny = u64::from_le_bytes(next(&mut r)?);
    let t = f64::from_le_bytes(next(&mut r)?);
    let grid = Grid::new(d as usize, l, nx as usize, ny as usize)
        .map_err(|e| SpectralError::Snapshot(e.to_string()))?;
    let mut bytes = vec![0u8; 16 * grid.len()];
    r.read_exact(&mut bytes)
        .map_err(|e| SpectralError::Snapshot(format!("truncated coefficient block: {e}")))?;
    let coeffs = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    SpectralField::from_coefficients(grid, coeffs, t)
}
