//! 8-bit grayscale PGM heatmaps with a linear min-max scale, shared across
//! panels so side-by-side images are comparable.

use std::io::{BufWriter, Write};
use std::path::Path;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Min and max over several matrices together (one scale for all panels).
pub fn shared_min_max(mats: &[&DenseMatrix]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for m in mats {
        let (l, h) = m.min_max();
        lo = lo.min(l);
        hi = hi.max(h);
    }
    (lo, hi)
}

/// Binary PGM (P5), one byte per entry, values mapped linearly from
/// [lo, hi] to [0, 255]. A degenerate range renders mid-gray.
pub fn write_pgm(m: &DenseMatrix, lo: f64, hi: f64, path: &Path) -> Result<()> {
    if let Some((i, j)) = m.first_non_finite() {
        return Err(Error::NonFinite(i, j));
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", m.n_cols(), m.n_rows())?;
        let span = hi - lo;
        for i in 0..m.n_rows() {
            for &v in m.row(i) {
                let byte = if span > 0.0 {
                    ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
                } else {
                    128
                };
                w.write_all(&[byte])?;
            }
        }
        w.flush()
    })()
    .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_header_and_payload() {
        let m = DenseMatrix::from_vec(2, 3, vec![0.0, 0.5, 1.0, 1.0, 0.5, 0.0]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.pgm");
        write_pgm(&m, 0.0, 1.0, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
        let payload = &bytes[b"P5\n3 2\n255\n".len()..];
        assert_eq!(payload, &[0, 128, 255, 255, 128, 0]);
    }

    #[test]
    fn constant_matrix_renders_mid_gray() {
        let m = DenseMatrix::from_vec(1, 2, vec![3.0, 3.0]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.pgm");
        write_pgm(&m, 3.0, 3.0, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[bytes.len() - 2..], &[128, 128]);
    }

    #[test]
    fn shared_scale_covers_all_panels() {
        let a = DenseMatrix::from_vec(1, 2, vec![-1.0, 0.0]);
        let b = DenseMatrix::from_vec(1, 2, vec![0.5, 2.0]);
        assert_eq!(shared_min_max(&[&a, &b]), (-1.0, 2.0));
    }

    #[test]
    fn non_finite_rejected() {
        let m = DenseMatrix::from_vec(1, 1, vec![f64::NEG_INFINITY]);
        let dir = tempfile::tempdir().unwrap();
        assert!(write_pgm(&m, 0.0, 1.0, &dir.path().join("x.pgm")).is_err());
    }
}
