//! Binary snapshot files: magic `VEL2`, `u32` version, `u32 n`, then `f64`
//! `L, t, μ, η, δ` and the planes `u₁ u₂ F₁₁ F₁₂ F₂₁ F₂₂`, each `n²` row-major
//! `f64` values. Everything little-endian.

use std::fs;
use std::path::Path;

use crate::dynamics::{ModelParams, State};
use crate::error::{Error, Result};
use crate::spectral::{Grid2, MatrixField2, ScalarField, VectorField2};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"VEL2";
pub const SNAPSHOT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 5 * 8;

pub fn encode_snapshot(state: &State, params: &ModelParams) -> Vec<u8> {
    let g = state.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 6 * 8 * g.len());
    out.extend_from_slice(SNAPSHOT_MAGIC);
    out.extend_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    for v in [g.length(), state.t, params.mu, params.eta, params.delta] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for plane in state.u.c.iter().chain(state.f.c.iter()) {
        for v in &plane.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode_snapshot(bytes: &[u8], path: &Path) -> Result<(State, ModelParams)> {
    let bad = |reason: String| Error::Format {
        path: path.to_path_buf(),
        reason,
    };
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!(
            "{} bytes is shorter than the header",
            bytes.len()
        )));
    }
    if &bytes[0..4] != SNAPSHOT_MAGIC {
        return Err(bad("missing VEL2 magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != SNAPSHOT_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let n = u32_at(8) as usize;
    let head: Vec<f64> = (0..5).map(|i| f64_at(12 + 8 * i)).collect();
    let expected = HEADER_LEN + 6 * 8 * n * n;
    if bytes.len() != expected {
        return Err(bad(format!(
            "expected {expected} bytes for n = {n}, found {}",
            bytes.len()
        )));
    }
    let grid = Grid2::new(n, head[0]).map_err(|e| bad(e.to_string()))?;
    let params = ModelParams {
        mu: head[2],
        eta: head[3],
        delta: head[4],
    };
    let plane = |k: usize| {
        let start = HEADER_LEN + k * 8 * n * n;
        let values = (0..n * n).map(|i| f64_at(start + 8 * i)).collect();
        ScalarField::new(&grid, values)
    };
    let u = VectorField2::new(plane(0), plane(1));
    let f = MatrixField2::new([plane(2), plane(3), plane(4), plane(5)]);
    Ok((State::new(head[1], u, f), params))
}

pub fn write_snapshot(path: &Path, state: &State, params: &ModelParams) -> Result<()> {
    fs::write(path, encode_snapshot(state, params)).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<(State, ModelParams)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_snapshot(&bytes, path)
}
