//! `IPQZ` container: a checksummed header, fixed-size code records and an
//! optional norm sidecar.
//!
//! ```text
//! "IPQZ" | version u8 = 1 | d u32 | delta_num u32 | delta_den u32 | count u64
//!        | crc32(header bytes above) u32
//! count records of ceil(l / 8) bytes, code left-aligned
//! [ 0x4E | count f64 norms | crc32(norm bytes) u32 ]
//! ```
//!
//! All integers are little-endian.

use std::io::{Read, Write};

use crate::codec::{CodeWord, Codec};
use crate::error::{Error, Result};
use crate::quantizer::{Delta, GridParams};

const MAGIC: &[u8; 4] = b"IPQZ";
const VERSION: u8 = 1;
const NORM_TAG: u8 = 0x4E;
const HEADER_LEN: usize = 4 + 1 + 4 + 4 + 4 + 8;

/// Decoded contents of a container file.
#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub grid: GridParams,
    pub codes: Vec<CodeWord>,
    pub norms: Option<Vec<f64>>,
}

pub fn write_container<W: Write>(
    sink: &mut W,
    grid: &GridParams,
    codes: &[CodeWord],
    norms: Option<&[f64]>,
) -> Result<()> {
    let codec_len = Codec::new(*grid).code_length();
    if let Some(n) = norms {
        if n.len() != codes.len() {
            return Err(Error::DimensionMismatch {
                expected: codes.len(),
                got: n.len(),
            });
        }
    }
    let mut header = Vec::with_capacity(HEADER_LEN + 4);
    header.extend_from_slice(MAGIC);
    header.push(VERSION);
    header.extend_from_slice(&(grid.d() as u32).to_le_bytes());
    header.extend_from_slice(&grid.delta().num().to_le_bytes());
    header.extend_from_slice(&grid.delta().den().to_le_bytes());
    header.extend_from_slice(&(codes.len() as u64).to_le_bytes());
    let crc = crc32fast::hash(&header);
    header.extend_from_slice(&crc.to_le_bytes());
    sink.write_all(&header)?;
    for code in codes {
        if code.grid() != grid || code.len_bits() != codec_len {
            return Err(Error::GridMismatch);
        }
        sink.write_all(code.bytes())?;
    }
    if let Some(norms) = norms {
        let mut body = Vec::with_capacity(norms.len() * 8);
        for n in norms {
            body.extend_from_slice(&n.to_le_bytes());
        }
        sink.write_all(&[NORM_TAG])?;
        sink.write_all(&body)?;
        sink.write_all(&crc32fast::hash(&body).to_le_bytes())?;
    }
    Ok(())
}

fn read_exact_or_truncated<R: Read>(source: &mut R, buf: &mut [u8]) -> Result<()> {
    source.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::TruncatedFile,
        _ => Error::Io(e),
    })
}

pub fn read_container<R: Read>(source: &mut R) -> Result<Container> {
    let mut header = [0u8; HEADER_LEN];
    read_exact_or_truncated(source, &mut header[..4])?;
    if &header[..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    read_exact_or_truncated(source, &mut header[4..5])?;
    if header[4] != VERSION {
        return Err(Error::VersionUnsupported(header[4]));
    }
    read_exact_or_truncated(source, &mut header[5..])?;
    let mut crc = [0u8; 4];
    read_exact_or_truncated(source, &mut crc)?;
    if u32::from_le_bytes(crc) != crc32fast::hash(&header) {
        return Err(Error::ChecksumMismatch);
    }
    let le32 = |at: usize| u32::from_le_bytes(header[at..at + 4].try_into().unwrap());
    let d = le32(5) as usize;
    let delta = Delta::new(le32(9), le32(13))?;
    let count = u64::from_le_bytes(header[17..25].try_into().unwrap());
    let grid = GridParams::new(d, delta)?;
    let len_bits = Codec::new(grid).code_length();
    let record = len_bits.div_ceil(8);

    let count = usize::try_from(count).map_err(|_| Error::TruncatedFile)?;
    let mut codes = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let mut bytes = vec![0u8; record];
        read_exact_or_truncated(source, &mut bytes)?;
        codes.push(CodeWord::from_bytes(grid, bytes, len_bits)?);
    }

    let mut tag = [0u8; 1];
    let norms = match source.read(&mut tag)? {
        0 => None,
        _ if tag[0] == NORM_TAG => {
            let mut body = vec![0u8; count * 8];
            read_exact_or_truncated(source, &mut body)?;
            let mut crc = [0u8; 4];
            read_exact_or_truncated(source, &mut crc)?;
            if u32::from_le_bytes(crc) != crc32fast::hash(&body) {
                return Err(Error::ChecksumMismatch);
            }
            Some(
                body.chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect(),
            )
        }
        _ => {
            return Err(Error::parse(
                (HEADER_LEN + 4 + count * record) as u64,
                format!("unknown section tag {:#04x}", tag[0]),
            ))
        }
    };
    if source.read(&mut tag)? != 0 {
        return Err(Error::parse(0, "trailing bytes after container"));
    }
    Ok(Container { grid, codes, norms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantizer::ZVector;

    fn sample() -> (GridParams, Vec<CodeWord>) {
        let grid = GridParams::new(3, Delta::new(1, 4).unwrap()).unwrap();
        let codec = Codec::new(grid);
        let codes = [[3, -2, 1], [0, 0, -6], [1, 1, 1]]
            .iter()
            .map(|z| codec.encode(&ZVector::new(z.to_vec(), grid).unwrap()).unwrap())
            .collect();
        (grid, codes)
    }

    #[test]
    fn round_trip_with_and_without_norms() {
        let (grid, codes) = sample();
        for norms in [None, Some(vec![1.0, 2.5, 0.125])] {
            let mut buf = Vec::new();
            write_container(&mut buf, &grid, &codes, norms.as_deref()).unwrap();
            let back = read_container(&mut buf.as_slice()).unwrap();
            assert_eq!(back.grid, grid);
            assert_eq!(back.codes, codes);
            assert_eq!(back.norms, norms);
        }
    }

    #[test]
    fn header_layout() {
        let (grid, codes) = sample();
        let mut buf = Vec::new();
        write_container(&mut buf, &grid, &codes, None).unwrap();
        assert_eq!(&buf[..4], b"IPQZ");
        assert_eq!(buf[4], 1);
        assert_eq!(&buf[5..9], &3u32.to_le_bytes());
        assert_eq!(&buf[9..13], &1u32.to_le_bytes());
        assert_eq!(&buf[13..17], &4u32.to_le_bytes());
        assert_eq!(&buf[17..25], &3u64.to_le_bytes());
        let record = Codec::new(grid).code_bytes();
        assert_eq!(buf.len(), 29 + 3 * record);
    }

    #[test]
    fn corrupt_inputs() {
        let (grid, codes) = sample();
        let mut buf = Vec::new();
        write_container(&mut buf, &grid, &codes, Some(&[1.0, 2.0, 3.0])).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_container(&mut bad.as_slice()), Err(Error::BadMagic)));

        let mut bad = buf.clone();
        bad[4] = 2;
        assert!(matches!(
            read_container(&mut bad.as_slice()),
            Err(Error::VersionUnsupported(2))
        ));

        let mut bad = buf.clone();
        bad[20] ^= 1;
        assert!(matches!(read_container(&mut bad.as_slice()), Err(Error::ChecksumMismatch)));

        let mut bad = buf.clone();
        let last = bad.len() - 6;
        bad[last] ^= 0x40;
        assert!(matches!(read_container(&mut bad.as_slice()), Err(Error::ChecksumMismatch)));

        for cut in [2, 10, 27, 31, buf.len() - 1] {
            assert!(
                matches!(read_container(&mut &buf[..cut]), Err(Error::TruncatedFile)),
                "cut at {cut}"
            );
        }

        let mut extra = buf.clone();
        extra.push(0);
        assert!(matches!(read_container(&mut extra.as_slice()), Err(Error::Parse { .. })));
    }
}
