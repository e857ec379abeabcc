use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::DenseMatrix;

use super::params::{init_params, HigcnConfig, HigcnParams};

const MAGIC: &[u8; 8] = b"HIGCNCK1";
const FORMAT_VERSION: u32 = 1;

/// JSON header stored in front of the raw parameter block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointHeader {
    pub version: u32,
    pub config: HigcnConfig,
    pub seed: u64,
    pub num_params: usize,
}

/// Layout: magic, u64 LE header length, JSON header, then every parameter as f64 LE.
pub fn write_checkpoint(params: &HigcnParams) -> Vec<u8> {
    let header = CheckpointHeader {
        version: FORMAT_VERSION,
        config: params.config,
        seed: params.seed,
        num_params: params.num_params(),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let flat = params.to_flat();
    let mut out = Vec::with_capacity(16 + json.len() + 8 * flat.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for v in flat {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn read_checkpoint(bytes: &[u8]) -> Result<HigcnParams> {
    let bad = |msg: &str| Error::InvalidStructure(format!("checkpoint: {msg}"));
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(bad("missing magic"));
    }
    let hlen = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let body = bytes.get(16..).ok_or_else(|| bad("truncated"))?;
    if body.len() < hlen {
        return Err(bad("truncated header"));
    }
    let header: CheckpointHeader =
        serde_json::from_slice(&body[..hlen]).map_err(|e| bad(&format!("header: {e}")))?;
    if header.version != FORMAT_VERSION {
        return Err(bad(&format!("unsupported version {}", header.version)));
    }
    let data = &body[hlen..];
    if data.len() != 8 * header.num_params {
        return Err(bad(&format!("expected {} parameter bytes, found {}", 8 * header.num_params, data.len())));
    }
    let flat: Vec<f64> = data.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let mut params = init_params(header.config, header.seed)?;
    if params.num_params() != header.num_params {
        return Err(bad("parameter count does not match the configuration"));
    }
    params.assign_flat(&flat)?;
    if !DenseMatrix::from_vec(1, flat.len(), flat)?.is_finite() {
        return Err(Error::NonFinite("checkpoint parameters".into()));
    }
    Ok(params)
}

pub fn save_checkpoint(params: &HigcnParams, path: &Path) -> Result<()> {
    fs::write(path, write_checkpoint(params)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<HigcnParams> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::higcn::Head;

    fn params() -> HigcnParams {
        let cfg = HigcnConfig { orders: 3, hops: 4, input_dim: 5, hidden: 6, outputs: 2, alpha: 0.2, layers: 2, head: Head::LogSoftmax };
        let mut p = init_params(cfg, 77).unwrap();
        p.gamma[1][2] = -0.125;
        p
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let p = params();
        let bytes = write_checkpoint(&p);
        assert_eq!(&bytes[..8], b"HIGCNCK1");
        assert_eq!(read_checkpoint(&bytes).unwrap(), p);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.ckpt");
        save_checkpoint(&p, &path).unwrap();
        assert_eq!(load_checkpoint(&path).unwrap(), p);
    }

    #[test]
    fn rejects_corruption() {
        let bytes = write_checkpoint(&params());
        assert!(read_checkpoint(&bytes[..bytes.len() - 8]).is_err());
        let mut wrong = bytes.clone();
        wrong[0] = b'X';
        assert!(read_checkpoint(&wrong).is_err());
        assert!(read_checkpoint(&bytes[..10]).is_err());
    }
}
