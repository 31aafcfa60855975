//! Binary state snapshots.
//!
//! Layout, all integers and floats little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `SPINWELL` |
//! | 4     | `u32` format version (1) |
//! | 24    | dims: `u32` cosine modes per axis (3), `u32` EM functions per axis (3) |
//! | 8     | `f64` time `t` |
//! | 24·Nₘ | `M` coefficients |
//! | 24·Nᵧ | `B` coefficients |
//! | 24·Nᵧ | `E` coefficients |
//!
//! Coefficients are stored mode by mode in row-major mode order (last axis
//! fastest), each mode as its three Cartesian components.

use std::io::Write;
use std::path::Path;

use byteorder::{ByteOrder, LittleEndian, WriteBytesExt};
use spinwell_core::{CoeffsH, CoeffsY, GalerkinState, SpectralBases};

use crate::error::{Error, Result, SnapshotError};

pub const MAGIC: &[u8; 8] = b"SPINWELL";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 24 + 8;

/// A decoded snapshot: dims as stored, and the state.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub mag_modes: [u32; 3],
    pub em_functions: [u32; 3],
    pub state: GalerkinState,
}

impl Snapshot {
    pub fn dims(&self) -> [u32; 6] {
        let [a, b, c] = self.mag_modes;
        let [d, e, f] = self.em_functions;
        [a, b, c, d, e, f]
    }

    /// Fails unless the stored dims are those of `bases`.
    pub fn check_bases(&self, bases: &SpectralBases) -> std::result::Result<(), SnapshotError> {
        let expected = dims_of(bases);
        if self.dims() == expected {
            Ok(())
        } else {
            Err(SnapshotError::DimensionMismatch {
                expected,
                found: self.dims(),
            })
        }
    }
}

pub fn dims_of(bases: &SpectralBases) -> [u32; 6] {
    let m = bases.mag.modes_per_axis();
    let e = bases.em.functions_per_axis();
    [m[0], m[1], m[2], e[0], e[1], e[2]].map(|x| x as u32)
}

pub fn encode(bases: &SpectralBases, s: &GalerkinState) -> Result<Vec<u8>> {
    s.check_shape(bases)?;
    let n = HEADER_LEN + 24 * (s.m.modes() + s.b.modes() + s.e.modes());
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(MAGIC);
    // writes into a Vec cannot fail
    out.write_u32::<LittleEndian>(VERSION).unwrap();
    for d in dims_of(bases) {
        out.write_u32::<LittleEndian>(d).unwrap();
    }
    out.write_f64::<LittleEndian>(s.t).unwrap();
    for x in s.m.iter_flat().chain(s.b.iter_flat()).chain(s.e.iter_flat()) {
        out.write_f64::<LittleEndian>(x).unwrap();
    }
    debug_assert_eq!(out.len(), n);
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> std::result::Result<Snapshot, SnapshotError> {
    let truncated = |expected: usize| SnapshotError::Truncated {
        expected,
        found: bytes.len(),
    };
    if bytes.len() < 8 {
        return Err(if MAGIC.starts_with(bytes) {
            truncated(HEADER_LEN)
        } else {
            SnapshotError::BadMagic
        });
    }
    if &bytes[..8] != MAGIC {
        return Err(SnapshotError::BadMagic);
    }
    if bytes.len() < 12 {
        return Err(truncated(HEADER_LEN));
    }
    let version = LittleEndian::read_u32(&bytes[8..12]);
    if version != VERSION {
        return Err(SnapshotError::UnsupportedVersion(version));
    }
    if bytes.len() < HEADER_LEN {
        return Err(truncated(HEADER_LEN));
    }
    let mut dims = [0u32; 6];
    LittleEndian::read_u32_into(&bytes[12..36], &mut dims);
    let nm: usize = dims[..3].iter().map(|&d| d as usize).product();
    let ny: usize = dims[3..].iter().map(|&d| d as usize).product();
    let expected = HEADER_LEN + 24 * (nm + 2 * ny);
    if bytes.len() < expected {
        return Err(truncated(expected));
    }
    if bytes.len() > expected {
        return Err(SnapshotError::TrailingBytes {
            found: bytes.len() - expected,
        });
    }
    let t = LittleEndian::read_f64(&bytes[36..44]);
    let mut values = vec![0.0; 3 * (nm + 2 * ny)];
    LittleEndian::read_f64_into(&bytes[HEADER_LEN..], &mut values);
    let (m, rest) = values.split_at(3 * nm);
    let (b, e) = rest.split_at(3 * ny);
    Ok(Snapshot {
        mag_modes: [dims[0], dims[1], dims[2]],
        em_functions: [dims[3], dims[4], dims[5]],
        state: GalerkinState {
            m: CoeffsH::from_flat(m),
            b: CoeffsY::from_flat(b),
            e: CoeffsY::from_flat(e),
            t,
        },
    })
}

pub fn write_snapshot(path: &Path, bases: &SpectralBases, s: &GalerkinState) -> Result<()> {
    let bytes = encode(bases, s)?;
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(decode(&bytes)?)
}
