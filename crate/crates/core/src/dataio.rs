//! Dataset ingestion, normalization onto the unit sphere, and pair sampling.
//!
//! Supported inputs: `fvecs`/`bvecs` (`[d: i32][d x f32 | u8]` records),
//! IDX (`00 00 type ndim` followed by big-endian dimension sizes; the first
//! dimension counts vectors, the rest are flattened) and plain CSV with one
//! vector per row.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{CodeWord, Codec};
use crate::error::{Error, Result};
use crate::estimator::estimate_inner;
use crate::quantizer::UnitVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Fvecs,
    Bvecs,
    Idx,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fvecs" => Ok(Format::Fvecs),
            "bvecs" => Ok(Format::Bvecs),
            "idx" => Ok(Format::Idx),
            "csv" => Ok(Format::Csv),
            other => Err(Error::parse(0, format!("unknown format {other:?}"))),
        }
    }
}

/// Vectors as read from disk, before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawVectors {
    pub d: usize,
    pub vectors: Vec<Vec<f64>>,
    pub source: String,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Skip the first CSV line.
    pub csv_header: bool,
    /// Stop after this many vectors.
    pub limit: Option<usize>,
}

pub fn load(path: &Path, format: Format) -> Result<RawVectors> {
    load_with(path, format, LoadOptions::default())
}

pub fn load_with(path: &Path, format: Format, opts: LoadOptions) -> Result<RawVectors> {
    let mut reader = BufReader::new(File::open(path)?);
    let (d, vectors) = match format {
        Format::Fvecs => read_vecs(&mut reader, 4, opts.limit, |b| {
            f32::from_le_bytes(b.try_into().unwrap()) as f64
        })?,
        Format::Bvecs => read_vecs(&mut reader, 1, opts.limit, |b| b[0] as f64)?,
        Format::Idx => read_idx(&mut reader, opts.limit)?,
        Format::Csv => read_csv(reader, opts)?,
    };
    Ok(RawVectors {
        d,
        vectors,
        source: path.display().to_string(),
    })
}

/// Reads until EOF or until a full buffer can't be filled; returns bytes read.
fn fill<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<usize> {
    let mut got = 0;
    while got < buf.len() {
        match r.read(&mut buf[got..]) {
            Ok(0) => break,
            Ok(n) => got += n,
            Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(got)
}

fn read_vecs<R: Read>(
    r: &mut R,
    width: usize,
    limit: Option<usize>,
    convert: impl Fn(&[u8]) -> f64,
) -> Result<(usize, Vec<Vec<f64>>)> {
    let mut offset = 0u64;
    let mut d = None;
    let mut out = Vec::new();
    while limit.is_none_or(|l| out.len() < l) {
        let mut head = [0u8; 4];
        match fill(r, &mut head)? {
            0 => break,
            4 => {}
            _ => return Err(Error::parse(offset, "truncated dimension field")),
        }
        let dim = i32::from_le_bytes(head);
        if dim <= 0 {
            return Err(Error::parse(offset, format!("invalid dimension {dim}")));
        }
        let dim = dim as usize;
        match d {
            None => d = Some(dim),
            Some(expected) if expected != dim => {
                return Err(Error::DimensionMismatch { expected, got: dim })
            }
            _ => {}
        }
        let mut body = vec![0u8; dim * width];
        if fill(r, &mut body)? != body.len() {
            return Err(Error::parse(offset + 4, "truncated vector record"));
        }
        out.push(body.chunks_exact(width).map(&convert).collect());
        offset += 4 + body.len() as u64;
    }
    Ok((d.unwrap_or(0), out))
}

fn read_idx<R: Read>(r: &mut R, limit: Option<usize>) -> Result<(usize, Vec<Vec<f64>>)> {
    let mut magic = [0u8; 4];
    if fill(r, &mut magic)? != 4 || magic[0] != 0 || magic[1] != 0 {
        return Err(Error::parse(0, "bad IDX magic"));
    }
    let (width, scale_u8) = match magic[2] {
        0x08 => (1, true),
        0x0D => (4, false),
        t => return Err(Error::parse(2, format!("unsupported IDX element type {t:#04x}"))),
    };
    let ndim = magic[3] as usize;
    if ndim == 0 {
        return Err(Error::parse(3, "IDX file with zero dimensions"));
    }
    let mut dims = Vec::with_capacity(ndim);
    for i in 0..ndim {
        let mut b = [0u8; 4];
        if fill(r, &mut b)? != 4 {
            return Err(Error::parse(4 + 4 * i as u64, "truncated IDX header"));
        }
        dims.push(u32::from_be_bytes(b) as usize);
    }
    let count = limit.map_or(dims[0], |l| l.min(dims[0]));
    let d: usize = dims[1..].iter().product::<usize>().max(1);
    let mut offset = 4 + 4 * ndim as u64;
    let mut out = Vec::with_capacity(count);
    let mut body = vec![0u8; d * width];
    for _ in 0..count {
        if fill(r, &mut body)? != body.len() {
            return Err(Error::parse(offset, "truncated IDX data"));
        }
        let v = if scale_u8 {
            body.iter().map(|&b| b as f64 / 255.0).collect()
        } else {
            body.chunks_exact(4)
                .map(|c| f32::from_be_bytes(c.try_into().unwrap()) as f64)
                .collect()
        };
        out.push(v);
        offset += body.len() as u64;
    }
    Ok((d, out))
}

fn read_csv<R: BufRead>(r: R, opts: LoadOptions) -> Result<(usize, Vec<Vec<f64>>)> {
    let mut offset = 0u64;
    let mut d = None;
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let start = offset;
        offset += line.len() as u64 + 1;
        if (i == 0 && opts.csv_header) || line.trim().is_empty() {
            continue;
        }
        if opts.limit.is_some_and(|l| out.len() >= l) {
            break;
        }
        let mut row = Vec::new();
        let mut col = start;
        for field in line.split(',') {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::parse(col, format!("not a number: {:?}", field.trim())))?;
            row.push(v);
            col += field.len() as u64 + 1;
        }
        match d {
            None => d = Some(row.len()),
            Some(expected) if expected != row.len() => {
                return Err(Error::parse(
                    start,
                    format!("row has {} fields, expected {expected}", row.len()),
                ))
            }
            _ => {}
        }
        out.push(row);
    }
    Ok((d.unwrap_or(0), out))
}

pub fn save_fvecs(path: &Path, vectors: &[Vec<f64>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for v in vectors {
        w.write_all(&(v.len() as i32).to_le_bytes())?;
        for &x in v {
            w.write_all(&(x as f32).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes one row per vector using the shortest round-trip decimal form.
pub fn save_csv(path: &Path, vectors: &[Vec<f64>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for v in vectors {
        let row: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Unit vectors with the original norms kept alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSet {
    pub d: usize,
    pub vectors: Vec<UnitVector>,
    pub norms: Option<Vec<f64>>,
    pub source: String,
    /// Zero vectors dropped during normalization.
    pub dropped: usize,
    /// Positions of the kept vectors in the raw input.
    pub origin: Vec<usize>,
}

impl VectorSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Divides every nonzero vector by its norm. Zero vectors are dropped and
/// counted in [`VectorSet::dropped`].
pub fn normalize(raw: &RawVectors) -> Result<VectorSet> {
    let mut vectors = Vec::with_capacity(raw.vectors.len());
    let mut norms = Vec::with_capacity(raw.vectors.len());
    let mut origin = Vec::with_capacity(raw.vectors.len());
    let mut dropped = 0;
    for (i, v) in raw.vectors.iter().enumerate() {
        if v.len() != raw.d {
            return Err(Error::DimensionMismatch {
                expected: raw.d,
                got: v.len(),
            });
        }
        match UnitVector::normalize(v.clone()) {
            Ok((u, n)) => {
                vectors.push(u);
                norms.push(n);
                origin.push(i);
            }
            Err(Error::ZeroVector) => dropped += 1,
            Err(e) => return Err(e),
        }
    }
    if vectors.is_empty() {
        return Err(Error::AllZero);
    }
    Ok(VectorSet {
        d: raw.d,
        vectors,
        norms: Some(norms),
        source: raw.source.clone(),
        dropped,
        origin,
    })
}

/// Inner product of two general vectors from their unit codes and norms.
///
/// The error is at most `norm_x * norm_y * (||x^ - y^|| delta + delta^2 / 2)`
/// where `x^`, `y^` are the unit directions.
pub fn general_inner(
    codec: &Codec,
    a: &CodeWord,
    b: &CodeWord,
    norm_a: f64,
    norm_b: f64,
) -> Result<f64> {
    if !(norm_a > 0.0 && norm_b > 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(norm_a * norm_b * estimate_inner(codec, a, b)?)
}

/// `count` seeded pairs `(i, j)` with `i != j`, drawn uniformly from `0..len`.
pub fn sample_pairs(len: usize, count: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if len < 2 {
        return Err(Error::SetTooSmall);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let i = rng.gen_range(0..len);
            let mut j = rng.gen_range(0..len - 1);
            if j >= i {
                j += 1;
            }
            (i, j)
        })
        .collect())
}
