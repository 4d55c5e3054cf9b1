//! MNIST IDX parsing and construction of the digit-0-vs-rest task.
//!
//! The IDX container is a big-endian header followed by an unsigned-byte
//! payload. Image files carry magic `0x00000803` and three dimensions
//! (count, rows, cols); label files carry magic `0x00000801` and a count.
//! Gzip-compressed files are detected by their `1f 8b` prefix and inflated
//! before parsing.

use std::borrow::Cow;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statistic::Hypothesis;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const ROWS: usize = 28;
pub const COLS: usize = 28;
pub const IMAGE_PIXELS: usize = ROWS * COLS;

/// One 28x28 image in raw 0..=255 intensities, row-major.
pub type RawGrid = [u8; IMAGE_PIXELS];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    TrainSplit,
    TestSplit,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::TrainSplit => "train",
            Origin::TestSplit => "test",
        }
    }
}

/// A single observation with its binary hypothesis label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledImage {
    pixels: Vec<f32>,
    digit: u8,
    origin: Origin,
}

impl LabeledImage {
    pub fn new(grid: &RawGrid, digit: u8, origin: Origin) -> Result<Self> {
        if digit > 9 {
            return Err(Error::LabelRange { index: 0, value: digit });
        }
        Ok(Self {
            pixels: grid.iter().map(|&p| scale_pixel(p)).collect(),
            digit,
            origin,
        })
    }

    /// Intensities in `[0, 1]`, 784 of them.
    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    pub fn digit(&self) -> u8 {
        self.digit
    }

    pub fn hypothesis(&self) -> Hypothesis {
        Hypothesis::from_digit(self.digit)
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }
}

/// Maps 0 to 0 and 255 to 1 exactly.
#[inline]
pub fn scale_pixel(raw: u8) -> f32 {
    f32::from(raw) / 255.0
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisCounts {
    pub h0: usize,
    pub h1: usize,
}

impl HypothesisCounts {
    pub fn get(&self, h: Hypothesis) -> usize {
        match h {
            Hypothesis::H0 => self.h0,
            Hypothesis::H1 => self.h1,
        }
    }

    pub fn total(&self) -> usize {
        self.h0 + self.h1
    }

    fn bump(&mut self, h: Hypothesis) {
        match h {
            Hypothesis::H0 => self.h0 += 1,
            Hypothesis::H1 => self.h1 += 1,
        }
    }
}

impl std::ops::Add for HypothesisCounts {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            h0: self.h0 + rhs.h0,
            h1: self.h1 + rhs.h1,
        }
    }
}

/// Images of one or more MNIST splits with their population counts.
#[derive(Debug, Clone, Default)]
pub struct DatasetSplit {
    images: Vec<LabeledImage>,
    counts: HypothesisCounts,
}

impl DatasetSplit {
    pub fn from_images(images: Vec<LabeledImage>) -> Self {
        let mut counts = HypothesisCounts::default();
        for img in &images {
            counts.bump(img.hypothesis());
        }
        Self { images, counts }
    }

    pub fn images(&self) -> &[LabeledImage] {
        &self.images
    }

    pub fn counts(&self) -> HypothesisCounts {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn iter_hypothesis(&self, h: Hypothesis) -> impl Iterator<Item = &LabeledImage> {
        self.images.iter().filter(move |img| img.hypothesis() == h)
    }

    /// Concatenates two splits, keeping each image's origin.
    pub fn pooled(mut self, other: DatasetSplit) -> Self {
        self.counts = self.counts + other.counts;
        self.images.extend(other.images);
        self
    }

    /// Keeps only images that satisfy `keep`; counts are recomputed.
    pub fn filtered(self, keep: impl Fn(&LabeledImage) -> bool) -> Self {
        Self::from_images(self.images.into_iter().filter(|i| keep(i)).collect())
    }
}

fn read_u32_be(bytes: &[u8], offset: usize) -> Result<u32> {
    let end = offset + 4;
    let chunk = bytes.get(offset..end).ok_or(Error::Length {
        expected: end,
        found: bytes.len(),
    })?;
    Ok(u32::from_be_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]))
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<()> {
    let found = read_u32_be(bytes, 0)?;
    if found != expected {
        return Err(Error::Format { expected, found });
    }
    Ok(())
}

fn check_payload(bytes: &[u8], expected: usize) -> Result<()> {
    match bytes.len().cmp(&expected) {
        std::cmp::Ordering::Less => Err(Error::Length {
            expected,
            found: bytes.len(),
        }),
        std::cmp::Ordering::Greater => Err(Error::TrailingBytes {
            extra: bytes.len() - expected,
        }),
        std::cmp::Ordering::Equal => Ok(()),
    }
}

/// Inflates gzip input, passes anything else through untouched.
pub fn maybe_gunzip(bytes: &[u8]) -> Result<Cow<'_, [u8]>> {
    if bytes.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(bytes)
            .read_to_end(&mut out)
            .map_err(|e| Error::io("<gzip stream>", e))?;
        Ok(Cow::Owned(out))
    } else {
        Ok(Cow::Borrowed(bytes))
    }
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<RawGrid>> {
    let bytes = maybe_gunzip(bytes)?;
    check_magic(&bytes, IMAGE_MAGIC)?;
    let count = read_u32_be(&bytes, 4)? as usize;
    let rows = read_u32_be(&bytes, 8)? as usize;
    let cols = read_u32_be(&bytes, 12)? as usize;
    if rows != ROWS || cols != COLS {
        return Err(Error::Geometry { rows, cols });
    }
    check_payload(&bytes, 16 + count * IMAGE_PIXELS)?;
    Ok(bytes[16..]
        .chunks_exact(IMAGE_PIXELS)
        .map(|c| {
            let mut grid = [0u8; IMAGE_PIXELS];
            grid.copy_from_slice(c);
            grid
        })
        .collect())
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let bytes = maybe_gunzip(bytes)?;
    check_magic(&bytes, LABEL_MAGIC)?;
    let count = read_u32_be(&bytes, 4)? as usize;
    check_payload(&bytes, 8 + count)?;
    let labels = &bytes[8..];
    if let Some((index, &value)) = labels.iter().enumerate().find(|(_, &v)| v > 9) {
        return Err(Error::LabelRange { index, value });
    }
    Ok(labels.to_vec())
}

pub fn encode_idx_images(grids: &[RawGrid]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + grids.len() * IMAGE_PIXELS);
    out.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
    out.extend_from_slice(&(grids.len() as u32).to_be_bytes());
    out.extend_from_slice(&(ROWS as u32).to_be_bytes());
    out.extend_from_slice(&(COLS as u32).to_be_bytes());
    for g in grids {
        out.extend_from_slice(g);
    }
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

pub fn build_binary_task(images: &[RawGrid], labels: &[u8], origin: Origin) -> Result<DatasetSplit> {
    if images.len() != labels.len() {
        return Err(Error::Consistency(format!(
            "{} images but {} labels",
            images.len(),
            labels.len()
        )));
    }
    let images = images
        .iter()
        .zip(labels)
        .enumerate()
        .map(|(index, (grid, &digit))| {
            LabeledImage::new(grid, digit, origin).map_err(|_| Error::LabelRange { index, value: digit })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DatasetSplit::from_images(images))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Locations of the four MNIST files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MnistPaths {
    pub train_images: PathBuf,
    pub train_labels: PathBuf,
    pub test_images: PathBuf,
    pub test_labels: PathBuf,
}

impl MnistPaths {
    /// Standard file names inside `dir`; a `.gz` variant is used when the
    /// plain file is absent.
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        let pick = |stem: &str| {
            let plain = dir.join(stem);
            let gz = dir.join(format!("{stem}.gz"));
            if !plain.exists() && gz.exists() {
                gz
            } else {
                plain
            }
        };
        Self {
            train_images: pick("train-images-idx3-ubyte"),
            train_labels: pick("train-labels-idx1-ubyte"),
            test_images: pick("t10k-images-idx3-ubyte"),
            test_labels: pick("t10k-labels-idx1-ubyte"),
        }
    }

    pub fn load_split(&self, origin: Origin) -> Result<DatasetSplit> {
        let (img_path, lbl_path) = match origin {
            Origin::TrainSplit => (&self.train_images, &self.train_labels),
            Origin::TestSplit => (&self.test_images, &self.test_labels),
        };
        let images = parse_idx_images(&read_file(img_path)?)?;
        let labels = parse_idx_labels(&read_file(lbl_path)?)?;
        build_binary_task(&images, &labels, origin)
    }

    /// Loads (train, test).
    pub fn load(&self) -> Result<(DatasetSplit, DatasetSplit)> {
        Ok((
            self.load_split(Origin::TrainSplit)?,
            self.load_split(Origin::TestSplit)?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image_header(count: u32) -> Vec<u8> {
        let mut v = Vec::new();
        for x in [IMAGE_MAGIC, count, 28, 28] {
            v.extend_from_slice(&x.to_be_bytes());
        }
        v
    }

    #[test]
    fn single_zero_image() {
        let mut bytes = image_header(1);
        bytes.extend(std::iter::repeat_n(0u8, IMAGE_PIXELS));
        let grids = parse_idx_images(&bytes).unwrap();
        assert_eq!(grids.len(), 1);
        assert!(grids[0].iter().all(|&p| p == 0));
    }

    #[test]
    fn label_magic_rejected_by_image_parser() {
        let mut bytes = Vec::new();
        for x in [LABEL_MAGIC, 1, 28, 28] {
            bytes.extend_from_slice(&x.to_be_bytes());
        }
        bytes.extend(std::iter::repeat_n(0u8, IMAGE_PIXELS));
        match parse_idx_images(&bytes) {
            Err(Error::Format { expected, found }) => {
                assert_eq!(expected, 2051);
                assert_eq!(found, 2049);
            }
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_images() {
        let mut bytes = image_header(2);
        bytes.extend(std::iter::repeat_n(7u8, IMAGE_PIXELS + 10));
        match parse_idx_images(&bytes) {
            Err(Error::Length { expected, found }) => {
                assert_eq!(expected, 16 + 2 * IMAGE_PIXELS);
                assert_eq!(found, 16 + IMAGE_PIXELS + 10);
            }
            other => panic!("expected length error, got {other:?}"),
        }
    }

    #[test]
    fn trailing_bytes_rejected() {
        let mut bytes = encode_idx_labels(&[1, 2]);
        bytes.push(3);
        assert!(matches!(
            parse_idx_labels(&bytes),
            Err(Error::TrailingBytes { extra: 1 })
        ));
    }

    #[test]
    fn wrong_geometry() {
        let mut bytes = Vec::new();
        for x in [IMAGE_MAGIC, 0, 32, 32] {
            bytes.extend_from_slice(&x.to_be_bytes());
        }
        assert!(matches!(
            parse_idx_images(&bytes),
            Err(Error::Geometry { rows: 32, cols: 32 })
        ));
    }

    #[test]
    fn labels_decode() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
        bytes.extend_from_slice(&3u32.to_be_bytes());
        bytes.extend_from_slice(&[0, 5, 9]);
        assert_eq!(parse_idx_labels(&bytes).unwrap(), vec![0, 5, 9]);
    }

    #[test]
    fn empty_label_stream() {
        assert!(matches!(parse_idx_labels(&[]), Err(Error::Length { .. })));
    }

    #[test]
    fn label_out_of_range() {
        let bytes = encode_idx_labels(&[3, 10, 1]);
        assert!(matches!(
            parse_idx_labels(&bytes),
            Err(Error::LabelRange { index: 1, value: 10 })
        ));
    }

    #[test]
    fn gzip_is_transparent() {
        use flate2::write::GzEncoder;
        use flate2::Compression;
        use std::io::Write;

        let raw = encode_idx_labels(&[4, 0, 2]);
        let mut enc = GzEncoder::new(Vec::new(), Compression::default());
        enc.write_all(&raw).unwrap();
        let gz = enc.finish().unwrap();
        assert_eq!(parse_idx_labels(&gz).unwrap(), vec![4, 0, 2]);
    }

    #[test]
    fn single_seven() {
        let split = build_binary_task(&[[0u8; IMAGE_PIXELS]], &[7], Origin::TestSplit).unwrap();
        assert_eq!(split.counts(), HypothesisCounts { h0: 0, h1: 1 });
        assert_eq!(split.images()[0].hypothesis(), Hypothesis::H1);
    }

    #[test]
    fn length_mismatch() {
        let err = build_binary_task(&[[0u8; IMAGE_PIXELS]], &[1, 2], Origin::TrainSplit);
        assert!(matches!(err, Err(Error::Consistency(_))));
    }

    #[test]
    fn scaling_endpoints() {
        assert_eq!(scale_pixel(0), 0.0);
        assert_eq!(scale_pixel(255), 1.0);
        for v in 0..255u8 {
            assert!(scale_pixel(v) < scale_pixel(v + 1));
        }
    }
}
