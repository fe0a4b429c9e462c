//! Flat little-endian model files.
//!
//! Layout: four `u64` dimensions (`x_dim`, `label_dim`, `hidden`, `latent`)
//! followed by the ten weight blocks as `f64`, in the order of
//! [`VaeModel::blocks`], each matrix written row by row.

use std::fs;
use std::path::Path;


use super::model::VaeModel;
use crate::{Error, Result};

pub fn save_model(model: &VaeModel, path: &Path) -> Result<()> {
    model.validate()?;
    fs::write(path, encode(model)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<VaeModel> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode(&bytes).map_err(|reason| Error::Format {
        path: path.to_path_buf(),
        reason,
    })
}

pub(crate) fn encode(model: &VaeModel) -> Vec<u8> {
    let dims = [model.x_dim(), model.label_dim(), model.hidden(), model.latent()];
    let mut out = Vec::new();
    for d in dims {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for (rows, block) in row_major_blocks(model) {
        let cols = block.len() / rows;
        // storage is column-major
        for r in 0..rows {
            for c in 0..cols {
                out.extend_from_slice(&block[c * rows + r].to_le_bytes());
            }
        }
    }
    out
}

pub(crate) fn decode(bytes: &[u8]) -> std::result::Result<VaeModel, String> {
    let mut cursor = bytes;
    let mut take = |n: usize| -> std::result::Result<&[u8], String> {
        if cursor.len() < n {
            return Err("file is truncated".to_string());
        }
        let (head, tail) = cursor.split_at(n);
        cursor = tail;
        Ok(head)
    };
    let mut dims = [0usize; 4];
    for d in &mut dims {
        let raw = u64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
        if raw > 1 << 20 {
            return Err(format!("implausible dimension {raw}"));
        }
        *d = raw as usize;
    }
    let [x, l, h, z] = dims;
    if x == 0 || h == 0 || z == 0 {
        return Err("zero dimension in header".to_string());
    }
    let mut model = VaeModel::zeros(x, l, h, z);
    let rows: Vec<usize> = row_major_blocks(&model).iter().map(|(r, _)| *r).collect();
    for ((_, block), rows) in model.blocks_mut().into_iter().zip(rows) {
        let cols = block.len() / rows;
        for r in 0..rows {
            for c in 0..cols {
                block[c * rows + r] = f64::from_le_bytes(take(8)?.try_into().expect("8 bytes"));
            }
        }
    }
    if !cursor.is_empty() {
        return Err(format!("{} trailing bytes", cursor.len()));
    }
    model.validate().map_err(|e| e.to_string())?;
    Ok(model)
}

/// Row count and column-major storage of each block, in file order.
fn row_major_blocks(model: &VaeModel) -> Vec<(usize, &[f64])> {
    let (x, h, z) = (model.x_dim(), model.hidden(), model.latent());
    let rows = [h, h, z, z, z, z, h, h, x, x];
    rows.into_iter()
        .zip(model.blocks())
        .map(|(r, (_, b))| (r, b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RngStream;
    use nalgebra::DMatrix;

    #[test]
    fn round_trip_through_a_file() {
        let m = VaeModel::new(2, 3, 5, 4, 0.3, &mut RngStream::new(9)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vae.bin");
        save_model(&m, &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), m);
        let len = std::fs::metadata(&path).unwrap().len() as usize;
        let params: usize = m.blocks().iter().map(|(_, b)| b.len()).sum();
        assert_eq!(len, 32 + 8 * params);
    }

    #[test]
    fn header_is_little_endian_and_rows_first() {
        let mut m = VaeModel::zeros(2, 0, 1, 1);
        m.enc_w1 = DMatrix::from_row_slice(1, 2, &[1.5, -2.0]);
        let bytes = encode(&m);
        assert_eq!(&bytes[..8], &2u64.to_le_bytes());
        assert_eq!(&bytes[32..40], &1.5f64.to_le_bytes());
        assert_eq!(&bytes[40..48], &(-2.0f64).to_le_bytes());
    }

    #[test]
    fn truncated_file_is_rejected() {
        let m = VaeModel::new(2, 1, 3, 2, 0.3, &mut RngStream::new(9)).unwrap();
        let bytes = encode(&m);
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode(&extra).is_err());
        assert!(matches!(load_model(Path::new("/nonexistent/vae.bin")), Err(Error::Io { .. })));
    }
}
