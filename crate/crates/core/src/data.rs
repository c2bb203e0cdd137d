//! IDX containers, image datasets and the synthetic teacher task.
//!
//! IDX layout: two zero bytes, a dtype byte (`0x08` u8, `0x09` i8, `0x0B`
//! i16, `0x0C` i32, `0x0D` f32, `0x0E` f64), a rank byte, `rank` big-endian
//! `u32` dimensions, then the row-major big-endian payload.

use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::models::one_hot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdxType {
    U8,
    I8,
    I16,
    I32,
    F32,
    F64,
}

impl IdxType {
    pub fn code(self) -> u8 {
        match self {
            IdxType::U8 => 0x08,
            IdxType::I8 => 0x09,
            IdxType::I16 => 0x0B,
            IdxType::I32 => 0x0C,
            IdxType::F32 => 0x0D,
            IdxType::F64 => 0x0E,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        Ok(match code {
            0x08 => IdxType::U8,
            0x09 => IdxType::I8,
            0x0B => IdxType::I16,
            0x0C => IdxType::I32,
            0x0D => IdxType::F32,
            0x0E => IdxType::F64,
            other => return Err(Error::Idx(format!("unsupported dtype 0x{other:02x}"))),
        })
    }

    pub fn width(self) -> usize {
        match self {
            IdxType::U8 | IdxType::I8 => 1,
            IdxType::I16 => 2,
            IdxType::I32 | IdxType::F32 => 4,
            IdxType::F64 => 8,
        }
    }
}

/// Decoded IDX tensor with raw (unscaled) values.
#[derive(Debug, Clone, PartialEq)]
pub struct IdxTensor {
    pub dtype: IdxType,
    pub dims: Vec<usize>,
    pub data: Vec<f64>,
}

impl IdxTensor {
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

pub fn idx_parse(bytes: &[u8]) -> Result<IdxTensor> {
    if bytes.len() < 4 {
        return Err(Error::Idx(format!("header truncated at {} bytes", bytes.len())));
    }
    if bytes[0] != 0 || bytes[1] != 0 {
        return Err(Error::Idx(format!(
            "bad magic {:02x}{:02x}",
            bytes[0], bytes[1]
        )));
    }
    let dtype = IdxType::from_code(bytes[2])?;
    let rank = bytes[3] as usize;
    let header = 4 + 4 * rank;
    if bytes.len() < header {
        return Err(Error::Idx(format!("dimension table truncated ({rank} dims)")));
    }
    let dims: Vec<usize> = (0..rank)
        .map(|i| {
            let o = 4 + 4 * i;
            u32::from_be_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]) as usize
        })
        .collect();
    let count = dims
        .iter()
        .try_fold(1usize, |a, &d| a.checked_mul(d))
        .ok_or_else(|| Error::Idx(format!("dims {dims:?} overflow")))?;
    let w = dtype.width();
    let need = count
        .checked_mul(w)
        .and_then(|n| n.checked_add(header))
        .ok_or_else(|| Error::Idx("payload size overflows".into()))?;
    if bytes.len() < need {
        return Err(Error::Idx(format!(
            "payload truncated: {} bytes, {need} needed",
            bytes.len()
        )));
    }
    if bytes.len() > need {
        return Err(Error::Idx(format!(
            "{} trailing bytes after payload",
            bytes.len() - need
        )));
    }
    let payload = &bytes[header..need];
    let data = payload
        .chunks_exact(w)
        .map(|c| match dtype {
            IdxType::U8 => c[0] as f64,
            IdxType::I8 => c[0] as i8 as f64,
            IdxType::I16 => i16::from_be_bytes([c[0], c[1]]) as f64,
            IdxType::I32 => i32::from_be_bytes([c[0], c[1], c[2], c[3]]) as f64,
            IdxType::F32 => f32::from_be_bytes([c[0], c[1], c[2], c[3]]) as f64,
            IdxType::F64 => f64::from_be_bytes(c.try_into().expect("8-byte chunk")),
        })
        .collect();
    Ok(IdxTensor { dtype, dims, data })
}

/// Inverse of [`idx_parse`]. Values are cast to the tensor's dtype.
pub fn idx_serialize(t: &IdxTensor) -> Result<Vec<u8>> {
    if t.dims.len() > 255 {
        return Err(Error::Idx(format!("rank {} exceeds 255", t.dims.len())));
    }
    if t.dims.iter().product::<usize>() != t.data.len() {
        return Err(Error::Idx(format!(
            "{} values for dims {:?}",
            t.data.len(),
            t.dims
        )));
    }
    let mut out = vec![0, 0, t.dtype.code(), t.dims.len() as u8];
    for &d in &t.dims {
        let d = u32::try_from(d).map_err(|_| Error::Idx(format!("dimension {d} exceeds u32")))?;
        out.extend_from_slice(&d.to_be_bytes());
    }
    for &x in &t.data {
        match t.dtype {
            IdxType::U8 => out.push(x as u8),
            IdxType::I8 => out.push(x as i8 as u8),
            IdxType::I16 => out.extend_from_slice(&(x as i16).to_be_bytes()),
            IdxType::I32 => out.extend_from_slice(&(x as i32).to_be_bytes()),
            IdxType::F32 => out.extend_from_slice(&(x as f32).to_be_bytes()),
            IdxType::F64 => out.extend_from_slice(&x.to_be_bytes()),
        }
    }
    Ok(out)
}

/// Reads a file, transparently gunzipping names ending in `.gz`.
pub fn read_maybe_gz(path: &Path) -> Result<Vec<u8>> {
    let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "gz") {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .map_err(|e| Error::io(path, e))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

pub fn idx_read(path: &Path) -> Result<IdxTensor> {
    idx_parse(&read_maybe_gz(path)?).map_err(|e| match e {
        Error::Idx(msg) => Error::Idx(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Split {
    Train,
    Validation,
    Test,
}

/// Images in `[0, 1]` with integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub images: Matrix,
    pub labels: Vec<usize>,
    pub classes: usize,
    pub split: Split,
}

impl Dataset {
    pub fn new(images: Matrix, labels: Vec<usize>, classes: usize, split: Split) -> Result<Self> {
        if images.rows() == 0 {
            return Err(Error::Invalid("dataset has no samples".into()));
        }
        if images.rows() != labels.len() {
            return Err(Error::Shape(format!(
                "{} images but {} labels",
                images.rows(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::Invalid(format!("label {bad} outside {classes} classes")));
        }
        if images.as_slice().iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Invalid("pixel values must lie in [0, 1]".into()));
        }
        Ok(Self {
            images,
            labels,
            classes,
            split,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.images.cols()
    }

    pub fn image(&self, i: usize) -> &[f64] {
        self.images.row(i)
    }

    pub fn target(&self, i: usize) -> Vec<f64> {
        one_hot(self.labels[i], self.classes)
    }

    /// Samples `range` as a new dataset.
    pub fn slice(&self, start: usize, end: usize, split: Split) -> Result<Self> {
        let end = end.min(self.len());
        if start >= end {
            return Err(Error::Invalid(format!("empty slice {start}..{end}")));
        }
        let d = self.input_dim();
        let images = Matrix::from_vec(
            end - start,
            d,
            self.images.as_slice()[start * d..end * d].to_vec(),
        )?;
        Self::new(images, self.labels[start..end].to_vec(), self.classes, split)
    }

    /// Loads an IDX image file (rank ≥ 2, flattened per sample, scaled by
    /// 1/255) and its label file, keeping the first `limit` samples.
    pub fn from_idx(
        images: &Path,
        labels: &Path,
        classes: usize,
        limit: Option<usize>,
        split: Split,
    ) -> Result<Self> {
        let img = idx_read(images)?;
        let lab = idx_read(labels)?;
        if img.dims.len() < 2 || img.dtype != IdxType::U8 {
            return Err(Error::Idx(format!(
                "{}: expected unsigned-byte images of rank ≥ 2, got {:?} {:?}",
                images.display(),
                img.dtype,
                img.dims
            )));
        }
        if lab.dims.len() != 1 || lab.dims[0] != img.dims[0] {
            return Err(Error::Idx(format!(
                "{}: {:?} labels for {} images",
                labels.display(),
                lab.dims,
                img.dims[0]
            )));
        }
        let n = limit.map_or(img.dims[0], |l| l.min(img.dims[0]));
        let d: usize = img.dims[1..].iter().product();
        let pixels: Vec<f64> = img.data[..n * d].iter().map(|&p| p / 255.0).collect();
        let labels: Vec<usize> = lab.data[..n].iter().map(|&l| l as usize).collect();
        Self::new(Matrix::from_vec(n, d, pixels)?, labels, classes, split)
    }
}

/// Inputs uniform in `[0,1]^d`, labels the argmax of a fixed random linear
/// teacher applied to the centered input.
pub fn synth_teacher(n: usize, d: usize, classes: usize, seed: u64) -> Result<Dataset> {
    if n == 0 || d == 0 || classes == 0 {
        return Err(Error::Invalid(format!(
            "synthetic task needs n, d, classes ≥ 1 (got {n}, {d}, {classes})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let teacher = Matrix::from_fn(classes, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let images = Matrix::from_fn(n, d, |_, _| rng.random::<f64>());
    let labels = (0..n)
        .map(|i| {
            let centered: Vec<f64> = images.row(i).iter().map(|p| p - 0.5).collect();
            let z = teacher.matvec(&centered);
            z.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |b, (k, &v)| if v > b.1 { (k, v) } else { b })
                .0
        })
        .collect();
    Dataset::new(images, labels, classes, Split::Train)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(code: u8, dims: &[u32]) -> Vec<u8> {
        let mut b = vec![0, 0, code, dims.len() as u8];
        for d in dims {
            b.extend_from_slice(&d.to_be_bytes());
        }
        b
    }

    #[test]
    fn rank_one_labels() {
        let mut b = header(0x08, &[3]);
        b.extend_from_slice(&[7, 2, 9]);
        let t = idx_parse(&b).unwrap();
        assert_eq!(t.dims, vec![3]);
        assert_eq!(t.data, vec![7.0, 2.0, 9.0]);
    }

    #[test]
    fn rank_three_images() {
        let mut b = header(0x08, &[2, 2, 2]);
        b.extend_from_slice(&[0, 255, 10, 20, 30, 40, 50, 60]);
        let t = idx_parse(&b).unwrap();
        assert_eq!(t.dims, vec![2, 2, 2]);
        assert_eq!(&t.data[4..], &[30.0, 40.0, 50.0, 60.0]);
    }

    #[test]
    fn malformed_buffers_are_rejected() {
        let mut b = header(0x08, &[4]);
        b.extend_from_slice(&[1, 2, 3]);
        assert!(matches!(idx_parse(&b), Err(Error::Idx(_))));
        assert!(idx_parse(&[0, 0, 0x08]).is_err());
        assert!(idx_parse(&[1, 0, 0x08, 0]).is_err());
        assert!(idx_parse(&header(0x0A, &[0])).is_err());
        let mut long = header(0x08, &[1]);
        long.extend_from_slice(&[1, 2]);
        assert!(idx_parse(&long).is_err());
    }

    #[test]
    fn signed_and_float_types_round_trip() {
        for (dtype, data) in [
            (IdxType::I8, vec![-3.0, 4.0]),
            (IdxType::I16, vec![-300.0, 12_000.0]),
            (IdxType::I32, vec![-70_000.0, 5.0]),
            (IdxType::F32, vec![0.5, -1.25]),
            (IdxType::F64, vec![std::f64::consts::PI, -1e-300]),
        ] {
            let t = IdxTensor {
                dtype,
                dims: vec![2],
                data,
            };
            assert_eq!(idx_parse(&idx_serialize(&t).unwrap()).unwrap(), t);
        }
    }

    #[test]
    fn gz_files_are_decoded() {
        use flate2::write::GzEncoder;
        use std::io::Write;
        let dir = tempfile::tempdir().unwrap();
        let t = IdxTensor {
            dtype: IdxType::U8,
            dims: vec![2, 3],
            data: vec![0.0, 1.0, 2.0, 3.0, 4.0, 255.0],
        };
        let path = dir.path().join("t.idx.gz");
        let mut enc = GzEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(&idx_serialize(&t).unwrap()).unwrap();
        std::fs::write(&path, enc.finish().unwrap()).unwrap();
        assert_eq!(idx_read(&path).unwrap(), t);
    }

    #[test]
    fn dataset_from_idx_scales_pixels() {
        let dir = tempfile::tempdir().unwrap();
        let img = IdxTensor {
            dtype: IdxType::U8,
            dims: vec![3, 2, 2],
            data: (0..12).map(|v| (v * 20) as f64).collect(),
        };
        let lab = IdxTensor {
            dtype: IdxType::U8,
            dims: vec![3],
            data: vec![1.0, 0.0, 2.0],
        };
        let (ip, lp) = (dir.path().join("img"), dir.path().join("lab"));
        std::fs::write(&ip, idx_serialize(&img).unwrap()).unwrap();
        std::fs::write(&lp, idx_serialize(&lab).unwrap()).unwrap();
        let ds = Dataset::from_idx(&ip, &lp, 3, Some(2), Split::Train).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.input_dim(), 4);
        assert!((ds.image(1)[0] - 80.0 / 255.0).abs() < 1e-15);
        assert_eq!(ds.labels, vec![1, 0]);
        let missing = Dataset::from_idx(&dir.path().join("nope"), &lp, 3, None, Split::Train);
        assert!(missing.unwrap_err().is_io());
    }

    #[test]
    fn teacher_is_deterministic_and_degenerate_with_one_class() {
        let a = synth_teacher(50, 4, 3, 9).unwrap();
        assert_eq!(a, synth_teacher(50, 4, 3, 9).unwrap());
        assert_ne!(a, synth_teacher(50, 4, 3, 10).unwrap());
        let one = synth_teacher(20, 3, 1, 1).unwrap();
        assert!(one.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn teacher_task_is_learnable_by_logistic_regression() {
        let ds = synth_teacher(2000, 20, 2, 4).unwrap();
        let mut w = vec![0.0; 21];
        for _ in 0..300 {
            let mut g = vec![0.0; 21];
            for i in 0..ds.len() {
                let x = ds.image(i);
                let z: f64 = w[20] + x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
                let p = 1.0 / (1.0 + (-z).exp());
                let err = p - ds.labels[i] as f64;
                for k in 0..20 {
                    g[k] += err * x[k];
                }
                g[20] += err;
            }
            for k in 0..21 {
                w[k] -= 2.0 * g[k] / ds.len() as f64;
            }
        }
        let correct = (0..ds.len())
            .filter(|&i| {
                let z: f64 = w[20] + ds.image(i).iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
                (z > 0.0) as usize == ds.labels[i]
            })
            .count();
        assert!(correct as f64 / ds.len() as f64 >= 0.95, "{correct}");
    }
}
