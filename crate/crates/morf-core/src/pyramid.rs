//! Invertible Laplacian pyramid.
//!
//! Lowpass is the separable binomial [1,4,6,4,1]/16. Downsampling keeps
//! even-indexed rows/columns of the lowpassed frame (ceil(n/2) sizes);
//! upsampling inserts zeros and filters with twice the kernel. Each band
//! stores `frame - upsample(downsample(frame))`, so collapsing with the
//! stored residual reconstructs the input to floating-point accuracy.

use crate::error::{MorfError, Result};
use crate::frame::GrayFrame;

pub const BINOMIAL5: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];
const BINOMIAL5_X2: [f64; 5] = [2.0 / 16.0, 8.0 / 16.0, 12.0 / 16.0, 8.0 / 16.0, 2.0 / 16.0];

/// Multi-scale decomposition: band 1 holds the highest frequencies.
#[derive(Debug, Clone)]
pub struct ImagePyramid {
    pub bands: Vec<GrayFrame>,
    pub residual: GrayFrame,
}

impl ImagePyramid {
    pub fn num_levels(&self) -> usize {
        self.bands.len()
    }

    /// Band for a 1-based pyramid level.
    pub fn band(&self, level: usize) -> Option<&GrayFrame> {
        if level == 0 {
            return None;
        }
        self.bands.get(level - 1)
    }
}

/// Lowpass then keep even-indexed rows/columns.
pub fn downsample(frame: &GrayFrame) -> GrayFrame {
    let low = frame.convolve_separable(&BINOMIAL5);
    let (w, h) = frame.dims();
    let (dw, dh) = (w.div_ceil(2), h.div_ceil(2));
    GrayFrame::from_fn(dw, dh, |x, y| low.get(2 * x, 2 * y))
}

/// Zero-insert to the target size, then filter with 2x the lowpass kernel.
/// Borders reflect in the decimated domain so the interpolation lattice
/// stays aligned (constants stay constant all the way to the edge).
pub fn upsample_to(frame: &GrayFrame, target_w: usize, target_h: usize) -> Result<GrayFrame> {
    let (w, h) = frame.dims();
    if w != target_w.div_ceil(2) || h != target_h.div_ceil(2) {
        return Err(MorfError::Structure(format!(
            "cannot upsample {}x{} to {}x{}",
            w, h, target_w, target_h
        )));
    }
    // Sample of the zero-stuffed extension at full-resolution index q:
    // zero at odd q, small[reflect(q/2)] at even q.
    let stuffed = |frame_n: usize, q: isize| -> Option<usize> {
        if q.rem_euclid(2) != 0 {
            return None;
        }
        Some(crate::frame::reflect_index(q.div_euclid(2), frame_n))
    };
    let r = BINOMIAL5_X2.len() as isize / 2;
    let mut rows = GrayFrame::zeros(target_w, h);
    for y in 0..h {
        for x in 0..target_w {
            let mut acc = 0.0;
            for (t, &k) in BINOMIAL5_X2.iter().enumerate() {
                if let Some(sx) = stuffed(w, x as isize + t as isize - r) {
                    acc += k * frame.get(sx, y);
                }
            }
            rows.set(x, y, acc);
        }
    }
    let mut out = GrayFrame::zeros(target_w, target_h);
    for y in 0..target_h {
        for x in 0..target_w {
            let mut acc = 0.0;
            for (t, &k) in BINOMIAL5_X2.iter().enumerate() {
                if let Some(sy) = stuffed(h, y as isize + t as isize - r) {
                    acc += k * rows.get(x, sy);
                }
            }
            out.set(x, y, acc);
        }
    }
    Ok(out)
}

pub fn build_pyramid(frame: &GrayFrame, num_levels: usize) -> Result<ImagePyramid> {
    let (w, h) = frame.dims();
    if num_levels == 0 {
        return Err(MorfError::Config("num_levels must be >= 1".into()));
    }
    let min_dim = w.min(h);
    if min_dim < (1usize << num_levels) {
        return Err(MorfError::Dimension(format!(
            "frame {}x{} too small for {} pyramid levels (needs min dim >= {})",
            w,
            h,
            num_levels,
            1usize << num_levels
        )));
    }
    let mut bands = Vec::with_capacity(num_levels);
    let mut cur = frame.clone();
    for _ in 0..num_levels {
        let low = downsample(&cur);
        let up = upsample_to(&low, cur.width(), cur.height())?;
        bands.push(cur.zip_map(&up, |a, b| a - b)?);
        cur = low;
    }
    Ok(ImagePyramid { bands, residual: cur })
}

pub fn collapse_pyramid(pyr: &ImagePyramid) -> Result<GrayFrame> {
    if pyr.bands.is_empty() {
        return Err(MorfError::Structure("pyramid has no band levels".into()));
    }
    // Verify the dimension chain before touching any pixels.
    let mut expect = pyr.bands[0].dims();
    for (i, band) in pyr.bands.iter().enumerate() {
        if band.dims() != expect {
            return Err(MorfError::Structure(format!(
                "band {} has dims {}x{}, expected {}x{}",
                i + 1,
                band.width(),
                band.height(),
                expect.0,
                expect.1
            )));
        }
        expect = (expect.0.div_ceil(2), expect.1.div_ceil(2));
    }
    if pyr.residual.dims() != expect {
        return Err(MorfError::Structure(format!(
            "residual has dims {}x{}, expected {}x{}",
            pyr.residual.width(),
            pyr.residual.height(),
            expect.0,
            expect.1
        )));
    }

    let mut cur = pyr.residual.clone();
    for band in pyr.bands.iter().rev() {
        let up = upsample_to(&cur, band.width(), band.height())?;
        cur = band.zip_map(&up, |b, u| b + u)?;
    }
    Ok(cur)
}
