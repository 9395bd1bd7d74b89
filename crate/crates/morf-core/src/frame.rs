//! Single-channel image container and separable convolution.
//!
//! All pixel math runs in f64; integer inputs are normalized to [0,1] at
//! load time. Convolution borders use half-sample symmetric reflection
//! (index -1 maps to 0, index n maps to n-1).

use crate::error::{MorfError, Result};

/// Row-major grayscale frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayFrame {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayFrame {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(MorfError::Dimension(format!(
                "data length {} does not match {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![0.0; width * height] }
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        Self { width, height, data: vec![value; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Errors unless every value is finite (no NaN/Inf).
    pub fn validate_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(MorfError::Structure("frame contains non-finite values".into()))
        }
    }

    pub fn same_dims(&self, other: &GrayFrame) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GrayFrame {
        GrayFrame {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &GrayFrame, f: impl Fn(f64, f64) -> f64) -> Result<GrayFrame> {
        if !self.same_dims(other) {
            return Err(MorfError::Structure(format!(
                "zip_map dims {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(GrayFrame {
            width: self.width,
            height: self.height,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scaled(&self, k: f64) -> GrayFrame {
        self.map(|v| v * k)
    }

    pub fn max_abs_diff(&self, other: &GrayFrame) -> f64 {
        debug_assert!(self.same_dims(other));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Separable convolution with a symmetric odd-length kernel.
    /// Borders reflect half-sample: f(-1) = f(0), f(n) = f(n-1).
    pub fn convolve_separable(&self, kernel: &[f64]) -> GrayFrame {
        let tmp = self.convolve_rows(kernel);
        tmp.convolve_cols(kernel)
    }

    pub fn convolve_rows(&self, kernel: &[f64]) -> GrayFrame {
        let r = kernel.len() / 2;
        let mut out = GrayFrame::zeros(self.width, self.height);
        for y in 0..self.height {
            let row = &self.data[y * self.width..(y + 1) * self.width];
            let out_row = &mut out.data[y * self.width..(y + 1) * self.width];
            for x in 0..self.width {
                let mut acc = 0.0;
                for (t, &k) in kernel.iter().enumerate() {
                    let i = reflect_index(x as isize + t as isize - r as isize, self.width);
                    acc += k * row[i];
                }
                out_row[x] = acc;
            }
        }
        out
    }

    pub fn convolve_cols(&self, kernel: &[f64]) -> GrayFrame {
        let r = kernel.len() / 2;
        let mut out = GrayFrame::zeros(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let mut acc = 0.0;
                for (t, &k) in kernel.iter().enumerate() {
                    let j = reflect_index(y as isize + t as isize - r as isize, self.height);
                    acc += k * self.data[j * self.width + x];
                }
                out.data[y * self.width + x] = acc;
            }
        }
        out
    }
}

/// Half-sample symmetric reflection, folded until the index lands in range.
#[inline]
pub fn reflect_index(i: isize, n: usize) -> usize {
    debug_assert!(n > 0);
    let n = n as isize;
    let mut i = i;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - i - 1;
        } else {
            return i as usize;
        }
    }
}

/// Truncated Gaussian kernel (3-sigma support), normalized to unit sum.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    assert!(sigma > 0.0, "gaussian_kernel requires sigma > 0");
    let radius = (3.0 * sigma).ceil() as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    for v in &mut k {
        *v /= sum;
    }
    k
}
