//! Writes a tiny gzipped IDX image/label pair, then loads it back as a
//! dataset with pixels rescaled to [0, 1].
//!
//! ```text
//! cargo run --release --example idx_roundtrip -- [out_dir]
//! ```

use std::io::Write;
use std::path::PathBuf;

use flate2::write::GzEncoder;
use flate2::Compression;
use holoep::data::{idx_read, idx_serialize, Dataset, IdxTensor, IdxType, Split};

fn write_gz(path: &PathBuf, bytes: &[u8]) -> std::io::Result<()> {
    let mut enc = GzEncoder::new(std::fs::File::create(path)?, Compression::default());
    enc.write_all(bytes)?;
    enc.finish().map(|_| ())
}

fn main() -> holoep::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "runs/idx_demo".into()));
    std::fs::create_dir_all(&dir).map_err(|e| holoep::Error::io(&dir, e))?;
    let images = IdxTensor {
        dtype: IdxType::U8,
        dims: vec![3, 2, 2],
        data: vec![0., 255., 128., 64., 10., 20., 30., 40., 255., 255., 0., 0.],
    };
    let labels = IdxTensor {
        dtype: IdxType::U8,
        dims: vec![3],
        data: vec![2., 0., 1.],
    };
    let (ip, lp) = (dir.join("images-idx3-ubyte.gz"), dir.join("labels-idx1-ubyte.gz"));
    write_gz(&ip, &idx_serialize(&images)?).map_err(|e| holoep::Error::io(&ip, e))?;
    write_gz(&lp, &idx_serialize(&labels)?).map_err(|e| holoep::Error::io(&lp, e))?;
    assert_eq!(idx_read(&ip)?, images);
    let ds = Dataset::from_idx(&ip, &lp, 3, None, Split::Train)?;
    for i in 0..ds.len() {
        println!("sample {i}: label {}  pixels {:?}", ds.labels[i], ds.image(i));
    }
    Ok(())
}
