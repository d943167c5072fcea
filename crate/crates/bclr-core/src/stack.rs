//! Binary image-stack file format.
//!
//! Layout: magic bytes `BCLR-IS1`, then three little-endian u32 values
//! (frame count, rows, cols), then `n * rows * cols` little-endian f64
//! pixels, frame-major and row-major within each frame. Language-neutral
//! and trivially seekable.

use crate::cubical::ImageFrame;
use crate::error::Error;
use crate::Result;
use std::io::{Read, Write};
use std::path::Path;

/// Magic prefix of the stack format.
pub const MAGIC: &[u8; 8] = b"BCLR-IS1";

/// Serialize a frame series to a writer.
pub fn write_stack<W: Write>(mut w: W, frames: &[ImageFrame]) -> Result<()> {
    if frames.is_empty() {
        return Err(Error::InvalidInput("empty image series".into()));
    }
    let (rows, cols) = (frames[0].rows(), frames[0].cols());
    if frames.iter().any(|f| f.rows() != rows || f.cols() != cols) {
        return Err(Error::InvalidInput("frames differ in shape".into()));
    }
    w.write_all(MAGIC)?;
    for v in [frames.len() as u32, rows as u32, cols as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    for frame in frames {
        for p in frame.pixels() {
            w.write_all(&p.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Write a frame series to a file path.
pub fn write_stack_file<P: AsRef<Path>>(path: P, frames: &[ImageFrame]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_stack(std::io::BufWriter::new(file), frames)
}

/// Deserialize a frame series from a reader.
pub fn read_stack<R: Read>(mut r: R) -> Result<Vec<ImageFrame>> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format("truncated stack header".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic; not a BCLR-IS1 stack".into()));
    }
    let mut word = [0u8; 4];
    let mut dims = [0usize; 3];
    for d in dims.iter_mut() {
        r.read_exact(&mut word)
            .map_err(|_| Error::Format("truncated stack header".into()))?;
        *d = u32::from_le_bytes(word) as usize;
    }
    let [n, rows, cols] = dims;
    if n == 0 || rows == 0 || cols == 0 {
        return Err(Error::Format("stack dimensions must be positive".into()));
    }
    let mut frames = Vec::with_capacity(n);
    let mut buf = vec![0u8; rows * cols * 8];
    for _ in 0..n {
        r.read_exact(&mut buf)
            .map_err(|_| Error::Format("truncated pixel payload".into()))?;
        let pixels: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        frames.push(ImageFrame::new(rows, cols, pixels)?);
    }
    Ok(frames)
}

/// Read a frame series from a file path.
pub fn read_stack_file<P: AsRef<Path>>(path: P) -> Result<Vec<ImageFrame>> {
    let file = std::fs::File::open(path)?;
    read_stack(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn round_trip_preserves_bits() {
        let mut rng = crate::rng::RngStream::new(60, 0);
        let frames: Vec<ImageFrame> = (0..3)
            .map(|_| {
                ImageFrame::new(4, 5, (0..20).map(|_| rng.random::<f64>() - 0.5).collect())
                    .unwrap()
            })
            .collect();
        let mut buf = Vec::new();
        write_stack(&mut buf, &frames).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(buf.len(), 8 + 12 + 3 * 20 * 8);
        let back = read_stack(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in frames.iter().zip(&back) {
            assert_eq!(a.pixels(), b.pixels());
        }
    }

    #[test]
    fn rejects_bad_magic_and_truncation() {
        assert!(matches!(
            read_stack(&b"NOTBCLR1xxxx"[..]),
            Err(Error::Format(_))
        ));
        let mut buf = Vec::new();
        let frame = ImageFrame::new(2, 2, vec![1.0; 4]).unwrap();
        write_stack(&mut buf, &[frame]).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(read_stack(buf.as_slice()), Err(Error::Format(_))));
    }
}
