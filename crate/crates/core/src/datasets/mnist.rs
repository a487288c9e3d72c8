use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const IMAGE_SIDE: usize = 28;
pub const PIXELS: usize = IMAGE_SIDE * IMAGE_SIDE;
pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

/// Environment variable naming the directory holding the four MNIST IDX files.
pub const MNIST_DIR_ENV: &str = "QBOOST_MNIST_DIR";

/// A 28×28 grey-scale digit, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageSample {
    pub pixels: Vec<u8>,
    pub label: u8,
}

impl ImageSample {
    pub fn new(pixels: Vec<u8>, label: u8) -> Result<Self> {
        if pixels.len() != PIXELS {
            return Err(Error::domain(format!("image needs {PIXELS} pixels, got {}", pixels.len())));
        }
        if label > 9 {
            return Err(Error::domain(format!("digit label {label} out of range")));
        }
        Ok(Self { pixels, label })
    }

    /// Pixels divided by 255², the scale the encoding matrix acts on.
    pub fn normalized(&self) -> Vec<f64> {
        const SCALE: f64 = 255.0 * 255.0;
        self.pixels.iter().map(|&p| f64::from(p) / SCALE).collect()
    }

    pub fn label(&self) -> usize {
        usize::from(self.label)
    }
}

/// `x = W v` with `W` row-major `rows × v.len()`.
pub fn encode_pixels(v: &[f64], w: &[f64], rows: usize) -> Result<Vec<f64>> {
    if w.len() != rows * v.len() {
        return Err(Error::domain(format!("encoding matrix has {} entries, expected {rows}×{}", w.len(), v.len())));
    }
    if v.is_empty() {
        return Ok(vec![0.0; rows]);
    }
    Ok(w.chunks_exact(v.len()).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect())
}

/// Trainable linear map from normalized pixels to rotation angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries, radians per normalized pixel.
    pub data: Vec<f64>,
}

impl EncodingMatrix {
    pub fn new(rows: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || data.len() != rows * PIXELS {
            return Err(Error::domain(format!("encoding matrix needs {rows}×{PIXELS} entries, got {}", data.len())));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical("encoding matrix has non-finite entries".into()));
        }
        Ok(Self { rows, cols: PIXELS, data })
    }

    pub fn zeros(rows: usize) -> Self {
        Self { rows, cols: PIXELS, data: vec![0.0; rows * PIXELS] }
    }
}

pub fn encode_image(sample: &ImageSample, w: &EncodingMatrix) -> Vec<f64> {
    encode_pixels(&sample.normalized(), &w.data, w.rows).expect("shapes fixed by construction")
}

struct Cursor<'a> {
    path: &'a Path,
    bytes: &'a [u8],
}

impl Cursor<'_> {
    fn fail(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Format { path: self.path.display().to_string(), offset: offset as u64, message: message.into() }
    }

    fn u32_at(&self, offset: usize) -> Result<u32> {
        let b = self.bytes.get(offset..offset + 4).ok_or_else(|| self.fail(offset, "truncated header"))?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    /// Check magic and dimensions; return the item count and payload offset.
    fn header(&self, magic: u32, dims: &[Option<u32>]) -> Result<(usize, usize)> {
        let got = self.u32_at(0)?;
        if got != magic {
            return Err(self.fail(0, format!("bad magic {got:#010x}, expected {magic:#010x}")));
        }
        let count = self.u32_at(4)? as usize;
        let mut item = 1usize;
        for (i, want) in dims.iter().enumerate() {
            let offset = 8 + 4 * i;
            let d = self.u32_at(offset)?;
            if let Some(want) = want {
                if d != *want {
                    return Err(self.fail(offset, format!("dimension {d}, expected {want}")));
                }
            }
            item *= d as usize;
        }
        let start = 8 + 4 * dims.len();
        let need = start + count * item;
        if self.bytes.len() < need {
            return Err(self.fail(self.bytes.len(), format!("truncated payload: {count} items need {need} bytes")));
        }
        Ok((count, start))
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingInput {
            path: path.to_path_buf(),
            hint: format!("set {MNIST_DIR_ENV} or place the MNIST IDX files there"),
        },
        _ => Error::Io(e),
    })
}

/// Parse an IDX image file and its label file.
pub fn load_mnist_idx(images_path: &Path, labels_path: &Path) -> Result<Vec<ImageSample>> {
    let image_bytes = read(images_path)?;
    let label_bytes = read(labels_path)?;
    let images = Cursor { path: images_path, bytes: &image_bytes };
    let labels = Cursor { path: labels_path, bytes: &label_bytes };
    let side = Some(IMAGE_SIDE as u32);
    let (n_images, image_start) = images.header(IMAGE_MAGIC, &[side, side])?;
    let (n_labels, label_start) = labels.header(LABEL_MAGIC, &[])?;
    if n_images != n_labels {
        return Err(labels.fail(4, format!("{n_labels} labels for {n_images} images")));
    }
    (0..n_images)
        .map(|i| {
            let label = label_bytes[label_start + i];
            if label > 9 {
                return Err(labels.fail(label_start + i, format!("label {label} out of range")));
            }
            let from = image_start + i * PIXELS;
            Ok(ImageSample { pixels: image_bytes[from..from + PIXELS].to_vec(), label })
        })
        .collect()
}

/// Write samples as an IDX image/label file pair.
pub fn write_mnist_idx(samples: &[ImageSample], images_path: &Path, labels_path: &Path) -> Result<()> {
    let count = u32::try_from(samples.len()).map_err(|_| Error::domain("too many samples for IDX"))?;
    let mut images = Vec::with_capacity(16 + samples.len() * PIXELS);
    images.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
    images.extend_from_slice(&count.to_be_bytes());
    images.extend_from_slice(&(IMAGE_SIDE as u32).to_be_bytes());
    images.extend_from_slice(&(IMAGE_SIDE as u32).to_be_bytes());
    let mut labels = Vec::with_capacity(8 + samples.len());
    labels.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    labels.extend_from_slice(&count.to_be_bytes());
    for s in samples {
        images.extend_from_slice(&s.pixels);
        labels.push(s.label);
    }
    fs::File::create(images_path)?.write_all(&images)?;
    fs::File::create(labels_path)?.write_all(&labels)?;
    Ok(())
}

/// Which half of MNIST to load.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MnistSplit {
    Train,
    Test,
}

impl MnistSplit {
    fn file_names(self) -> (&'static str, &'static str) {
        match self {
            MnistSplit::Train => ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
            MnistSplit::Test => ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
        }
    }
}

/// `$QBOOST_MNIST_DIR`, or `data/mnist` under the current directory.
pub fn default_mnist_dir() -> PathBuf {
    std::env::var_os(MNIST_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data/mnist"))
}

pub fn load_mnist(dir: &Path, split: MnistSplit) -> Result<Vec<ImageSample>> {
    let (images, labels) = split.file_names();
    load_mnist_idx(&dir.join(images), &dir.join(labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> ImageSample {
        ImageSample::new((0..PIXELS).map(|i| (i * 7 % 256) as u8).collect(), 3).unwrap()
    }

    #[test]
    fn idx_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let (img, lab) = (dir.path().join("i"), dir.path().join("l"));
        write_mnist_idx(&[fixture()], &img, &lab).unwrap();
        assert_eq!(fs::metadata(&img).unwrap().len(), 16 + 784);
        assert_eq!(load_mnist_idx(&img, &lab).unwrap(), vec![fixture()]);
    }

    #[test]
    fn empty_file_gives_empty_list() {
        let dir = tempfile::tempdir().unwrap();
        let (img, lab) = (dir.path().join("i"), dir.path().join("l"));
        write_mnist_idx(&[], &img, &lab).unwrap();
        assert!(load_mnist_idx(&img, &lab).unwrap().is_empty());
    }

    #[test]
    fn bad_magic_and_truncation_report_offsets() {
        let dir = tempfile::tempdir().unwrap();
        let (img, lab) = (dir.path().join("i"), dir.path().join("l"));
        write_mnist_idx(&[fixture()], &img, &lab).unwrap();
        let mut bytes = fs::read(&img).unwrap();
        bytes.truncate(500);
        fs::write(&img, &bytes).unwrap();
        match load_mnist_idx(&img, &lab) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 500),
            other => panic!("expected format error, got {other:?}"),
        }
        bytes[3] = 0x01;
        fs::write(&img, &bytes).unwrap();
        assert!(matches!(load_mnist_idx(&img, &lab), Err(Error::Format { offset: 0, .. })));
    }

    #[test]
    fn missing_file_is_reported_with_hint() {
        let err = load_mnist_idx(Path::new("/nonexistent/i"), Path::new("/nonexistent/l")).unwrap_err();
        assert!(matches!(err, Error::MissingInput { .. }));
    }

    #[test]
    fn encoding_cases() {
        let blank = ImageSample::new(vec![0; PIXELS], 0).unwrap();
        let mut w = EncodingMatrix::zeros(30);
        w.data.iter_mut().for_each(|x| *x = 0.3);
        assert!(encode_image(&blank, &w).iter().all(|&x| x == 0.0));
        assert!(encode_image(&fixture(), &EncodingMatrix::zeros(30)).iter().all(|&x| x == 0.0));

        let mut pixels = vec![0; PIXELS];
        pixels[100] = 200;
        let single = ImageSample::new(pixels, 1).unwrap();
        let mut selector = EncodingMatrix::zeros(30);
        selector.data[4 * PIXELS + 100] = 1.0;
        let x = encode_image(&single, &selector);
        assert_eq!(x[4], 200.0 / 65025.0);
        assert_eq!(x.iter().filter(|&&v| v != 0.0).count(), 1);
    }
}
