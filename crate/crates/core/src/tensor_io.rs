//! Binary tensor container used for snapshots and density grids.
//!
//! Layout: 4-byte magic `MFT1`, little-endian u32 header length, a JSON
//! header carrying the shape and free-form metadata, then the payload as
//! packed little-endian f64 in row-major order.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"MFT1";

fn corrupt(reason: &str) -> Error {
    Error::CorruptCheckpoint {
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorHeader {
    pub dtype: String,
    pub shape: Vec<usize>,
    #[serde(default)]
    pub metadata: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub header: TensorHeader,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>, metadata: Value) -> Result<Self> {
        let count: usize = shape.iter().product();
        if count != data.len() {
            return Err(Error::InvalidConfig(format!(
                "tensor shape {:?} holds {} elements, got {}",
                shape,
                count,
                data.len()
            )));
        }
        Ok(Tensor {
            header: TensorHeader {
                dtype: "f64".into(),
                shape,
                metadata,
            },
            data,
        })
    }
}

pub fn write_tensor<W: Write>(mut w: W, tensor: &Tensor) -> Result<()> {
    let header = serde_json::to_vec(&tensor.header)?;
    w.write_all(MAGIC)?;
    w.write_all(&(header.len() as u32).to_le_bytes())?;
    w.write_all(&header)?;
    let mut buf = Vec::with_capacity(tensor.data.len() * 8);
    for v in &tensor.data {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_tensor<R: Read>(mut r: R) -> Result<Tensor> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| corrupt("truncated magic"))?;
    if &magic != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let mut len = [0u8; 4];
    r.read_exact(&mut len).map_err(|_| corrupt("truncated header length"))?;
    let len = u32::from_le_bytes(len) as usize;
    if len > 1 << 24 {
        return Err(corrupt("implausible header length"));
    }
    let mut header_bytes = vec![0u8; len];
    r.read_exact(&mut header_bytes)
        .map_err(|_| corrupt("truncated header"))?;
    let header: TensorHeader =
        serde_json::from_slice(&header_bytes).map_err(|_| corrupt("unreadable header"))?;
    if header.dtype != "f64" {
        return Err(corrupt("unsupported dtype"));
    }
    let count: usize = header.shape.iter().product();
    if count > 1 << 31 {
        return Err(corrupt("implausible tensor size"));
    }
    let mut payload = vec![0u8; count * 8];
    r.read_exact(&mut payload)
        .map_err(|_| corrupt("truncated payload"))?;
    let data = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Tensor { header, data })
}

pub fn save_tensor(path: &Path, tensor: &Tensor) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_tensor(std::io::BufWriter::new(f), tensor)
}

pub fn load_tensor(path: &Path) -> Result<Tensor> {
    let f = std::fs::File::open(path)?;
    read_tensor(std::io::BufReader::new(f))
}
