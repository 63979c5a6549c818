//! 8-bit raster images (grayscale or RGB) with PNG/PNM file I/O.

use std::path::Path;

use crate::error::{Error, Result};

/// Row-major interleaved 8-bit image, 1 or 3 channels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl Image {
    pub fn new(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidParameter(format!(
                "expected 1 or 3 channels, got {channels}"
            )));
        }
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected {
            return Err(Error::SizeMismatch(format!(
                "pixel buffer has {} bytes, {width}x{height}x{channels} needs {expected}",
                data.len()
            )));
        }
        Ok(Image {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn filled(width: u32, height: u32, channels: u8, value: u8) -> Result<Self> {
        let len = width as usize * height as usize * channels as usize;
        Image::new(width, height, channels, vec![value; len])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    /// Bytes per row.
    pub fn stride(&self) -> usize {
        self.width as usize * self.channels as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32, channel: u8) -> u8 {
        debug_assert!(x < self.width && y < self.height && channel < self.channels);
        self.data[(y as usize * self.width as usize + x as usize) * self.channels as usize
            + channel as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, channel: u8, value: u8) {
        debug_assert!(x < self.width && y < self.height && channel < self.channels);
        self.data[(y as usize * self.width as usize + x as usize) * self.channels as usize
            + channel as usize] = value;
    }

    /// Loads a PNG, PGM or PPM file. Other color layouts are converted
    /// to 8-bit RGB.
    pub fn load(path: &Path) -> Result<Image> {
        let dynimg = image::ImageReader::open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?
            .decode()
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let (width, height) = (dynimg.width(), dynimg.height());
        match dynimg {
            image::DynamicImage::ImageLuma8(buf) => Image::new(width, height, 1, buf.into_raw()),
            image::DynamicImage::ImageRgb8(buf) => Image::new(width, height, 3, buf.into_raw()),
            other => Image::new(width, height, 3, other.to_rgb8().into_raw()),
        }
    }

    /// Saves as PNG, PGM or PPM depending on the file extension.
    pub fn save(&self, path: &Path) -> Result<()> {
        let err = |e: image::ImageError| Error::Io(format!("{}: {e}", path.display()));
        match self.channels {
            1 => image::GrayImage::from_raw(self.width, self.height, self.data.clone())
                .expect("buffer length is validated on construction")
                .save(path)
                .map_err(err),
            _ => image::RgbImage::from_raw(self.width, self.height, self.data.clone())
                .expect("buffer length is validated on construction")
                .save(path)
                .map_err(err),
        }
    }
}
