//! Debug dump of a complex field: an 8-byte little-endian header length, a JSON
//! header describing the grids, then `f64` (re, im) pairs in row-major order
//! (x1 outer), little-endian. Not a stable format.

use std::io::{self, Read, Write};

use biphoton_core::{Complex64, ComplexField2D, Grid1D};
use serde::{Deserialize, Serialize};

pub const FORMAT: &str = "biphoton-field";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub format: String,
    pub version: u32,
    pub grid1: Grid1D,
    pub grid2: Grid1D,
    pub layout: String,
}

pub fn write(field: &ComplexField2D, mut w: impl Write) -> io::Result<()> {
    let header = SnapshotHeader {
        format: FORMAT.into(),
        version: 1,
        grid1: *field.grid1(),
        grid2: *field.grid2(),
        layout: "row-major x1, f64 le (re, im)".into(),
    };
    let json = serde_json::to_vec(&header)?;
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(&json)?;
    let mut buf = Vec::with_capacity(16 * field.amplitudes().len());
    for a in field.amplitudes() {
        buf.extend_from_slice(&a.re.to_le_bytes());
        buf.extend_from_slice(&a.im.to_le_bytes());
    }
    w.write_all(&buf)
}

pub fn read(mut r: impl Read) -> io::Result<(SnapshotHeader, ComplexField2D)> {
    let invalid = |m: String| io::Error::new(io::ErrorKind::InvalidData, m);
    let mut len = [0u8; 8];
    r.read_exact(&mut len)?;
    let mut json = vec![0u8; u64::from_le_bytes(len) as usize];
    r.read_exact(&mut json)?;
    let header: SnapshotHeader = serde_json::from_slice(&json)?;
    if header.format != FORMAT {
        return Err(invalid(format!("not a field snapshot: {}", header.format)));
    }
    let n = header.grid1.len() * header.grid2.len();
    let mut raw = vec![0u8; 16 * n];
    r.read_exact(&mut raw)?;
    let amp = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    let field = ComplexField2D::from_vec(header.grid1, header.grid2, amp)
        .map_err(|e| invalid(e.to_string()))?;
    Ok((header, field))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g1 = Grid1D::centered(1.0, 4).unwrap();
        let g2 = Grid1D::staggered(2.0, 8).unwrap();
        let f = ComplexField2D::from_fn(g1, g2, |a, b| Complex64::new(a, -b * 3.5));
        let mut bytes = Vec::new();
        write(&f, &mut bytes).unwrap();
        let (h, back) = read(bytes.as_slice()).unwrap();
        assert_eq!(h.grid2, g2);
        assert_eq!(back, f);
        assert!(read(&bytes[..bytes.len() - 1]).is_err());
    }
}
