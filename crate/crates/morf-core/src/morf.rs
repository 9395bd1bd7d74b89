//! Mean oriented Riesz image pair and the MORF descriptor family.
//!
//! The filtered quaternionic phase is averaged over the onset..apex window
//! into a per-level image pair; per-pixel magnitude and orientation are then
//! voted into a grid of orientation histograms. Level concatenation gives
//! F-MORF, amplification before averaging gives A-MORF.

use crate::error::{MorfError, Result};
use crate::frame::GrayFrame;
use crate::pyramid::build_pyramid;
use crate::riesz::{
    amplify_phase, amplify_phase_linear, filter_phase_sequence, riesz_transform,
    QuatPhaseField, TemporalFilterConfig,
};

/// Temporal mean of the filtered quaternionic phase over onset..apex.
#[derive(Debug, Clone)]
pub struct MorPair {
    pub mean_pc: GrayFrame,
    pub mean_ps: GrayFrame,
    pub level: usize,
    pub n_frames: usize,
}

impl MorPair {
    pub fn dims(&self) -> (usize, usize) {
        self.mean_pc.dims()
    }
}

/// How A-MORF maps the phase magnitude under amplification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplifyMode {
    /// Quaternion exponentiation: phi -> sin(alpha*phi).
    #[default]
    Sine,
    /// Re-extracted logarithm: phi -> alpha*phi.
    Linear,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct MorfParams {
    pub gx: usize,
    pub gy: usize,
    pub o: usize,
    /// Pyramid levels to extract, ascending; level 1 is the noisiest band
    /// and is excluded by default.
    pub levels: Vec<usize>,
    /// Amplification factor; 1 means none.
    pub alpha: f64,
    pub normalize: bool,
    #[serde(default)]
    pub amplify_mode: AmplifyMode,
}

impl Default for MorfParams {
    fn default() -> Self {
        Self {
            gx: 8,
            gy: 8,
            o: 6,
            levels: vec![2],
            alpha: 1.0,
            normalize: false,
            amplify_mode: AmplifyMode::Sine,
        }
    }
}

impl MorfParams {
    pub fn validate(&self) -> Result<()> {
        if self.gx < 1 || self.gy < 1 || self.o < 1 {
            return Err(MorfError::Config(format!(
                "grid and orientation counts must be >= 1, got gx={} gy={} o={}",
                self.gx, self.gy, self.o
            )));
        }
        if self.levels.is_empty() {
            return Err(MorfError::Config("levels must be non-empty".into()));
        }
        if self.levels.iter().any(|&l| l < 1) {
            return Err(MorfError::Config("pyramid levels are 1-based".into()));
        }
        if !(self.alpha > 0.0) {
            return Err(MorfError::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        Ok(())
    }

    pub fn descriptor_len(&self) -> usize {
        self.gx * self.gy * self.o * self.levels.len()
    }
}

/// Concatenated grid histograms, one segment per pyramid level.
#[derive(Debug, Clone)]
pub struct MorfDescriptor {
    pub values: Vec<f64>,
    pub params: MorfParams,
    /// Start offset of each level segment, ascending level order.
    pub segment_starts: Vec<usize>,
}

impl MorfDescriptor {
    pub fn segment(&self, idx: usize) -> &[f64] {
        let start = self.segment_starts[idx];
        let len = self.params.gx * self.params.gy * self.params.o;
        &self.values[start..start + len]
    }
}

/// Arithmetic mean of the phase fields over frames [f_o, f_a], summed in
/// ascending frame order.
pub fn mean_oriented_riesz(
    phase_seq: &[QuatPhaseField],
    f_o: usize,
    f_a: usize,
) -> Result<MorPair> {
    if f_o > f_a || f_a >= phase_seq.len() {
        return Err(MorfError::Annotation(format!(
            "window [{}, {}] invalid for sequence of {} frames",
            f_o,
            f_a,
            phase_seq.len()
        )));
    }
    let (w, h) = phase_seq[f_o].dims();
    let level = phase_seq[f_o].level;
    let mut sum_pc = GrayFrame::zeros(w, h);
    let mut sum_ps = GrayFrame::zeros(w, h);
    for field in &phase_seq[f_o..=f_a] {
        if field.dims() != (w, h) {
            return Err(MorfError::Structure("phase fields have mixed dims".into()));
        }
        sum_pc = sum_pc.zip_map(&field.pc, |a, b| a + b)?;
        sum_ps = sum_ps.zip_map(&field.ps, |a, b| a + b)?;
    }
    let n = f_a - f_o + 1;
    let inv = 1.0 / n as f64;
    Ok(MorPair {
        mean_pc: sum_pc.scaled(inv),
        mean_ps: sum_ps.scaled(inv),
        level,
        n_frames: n,
    })
}

/// Per-pixel magnitude and four-quadrant orientation of the mean pair.
/// Orientation is 0 where the magnitude vanishes.
pub fn magnitude_orientation(pair: &MorPair) -> (GrayFrame, GrayFrame) {
    let (w, h) = pair.dims();
    let mut phi = GrayFrame::zeros(w, h);
    let mut theta = GrayFrame::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let (c, s) = (pair.mean_pc.get(x, y), pair.mean_ps.get(x, y));
            let m = (c * c + s * s).sqrt();
            phi.set(x, y, m);
            theta.set(x, y, if m > 0.0 { s.atan2(c) } else { 0.0 });
        }
    }
    (phi, theta)
}

/// Orientation bin for theta in (-pi, pi], clamped so theta = pi lands in
/// the last bin.
#[inline]
pub fn orientation_bin(theta: f64, o: usize) -> usize {
    let t = (theta + std::f64::consts::PI) * o as f64 / (2.0 * std::f64::consts::PI);
    (t.floor() as isize).clamp(0, o as isize - 1) as usize
}

/// Phase-magnitude-weighted orientation histogram over a gy x gx grid of
/// non-overlapping cells. Output is cell-major (row, then column), bin-minor.
pub fn grid_histogram(
    phi_field: &GrayFrame,
    theta_field: &GrayFrame,
    gx: usize,
    gy: usize,
    o: usize,
    mask: Option<&GrayFrame>,
) -> Result<Vec<f64>> {
    let (w, h) = phi_field.dims();
    if theta_field.dims() != (w, h) {
        return Err(MorfError::Structure("phi/theta dims differ".into()));
    }
    if let Some(m) = mask {
        if m.dims() != (w, h) {
            return Err(MorfError::Structure("mask dims differ from fields".into()));
        }
    }
    if gx > w || gy > h {
        return Err(MorfError::Dimension(format!(
            "grid {}x{} larger than image {}x{}",
            gx, gy, w, h
        )));
    }
    let mut hist = vec![0.0f64; gx * gy * o];
    for row in 0..gy {
        let y0 = row * h / gy;
        let y1 = (row + 1) * h / gy;
        for col in 0..gx {
            let x0 = col * w / gx;
            let x1 = (col + 1) * w / gx;
            let cell = (row * gx + col) * o;
            for y in y0..y1 {
                for x in x0..x1 {
                    if let Some(m) = mask {
                        if m.get(x, y) == 0.0 {
                            continue;
                        }
                    }
                    let weight = phi_field.get(x, y);
                    if weight == 0.0 {
                        continue;
                    }
                    let bin = orientation_bin(theta_field.get(x, y), o);
                    hist[cell + bin] += weight;
                }
            }
        }
    }
    Ok(hist)
}

/// Full MORF extraction for one grayscale sequence.
pub fn extract_morf(
    seq: &[GrayFrame],
    f_o: usize,
    f_a: usize,
    params: &MorfParams,
    filter_cfg: &TemporalFilterConfig,
    mask: Option<&GrayFrame>,
) -> Result<MorfDescriptor> {
    params.validate()?;
    filter_cfg.validate()?;
    if seq.len() < 2 {
        return Err(MorfError::Sequence(format!(
            "extract_morf needs >= 2 frames, got {}",
            seq.len()
        )));
    }
    if f_o > f_a || f_a >= seq.len() {
        return Err(MorfError::Annotation(format!(
            "onset/apex window [{}, {}] invalid for {} frames",
            f_o,
            f_a,
            seq.len()
        )));
    }
    let max_level = *params.levels.iter().max().expect("levels non-empty");

    // One pyramid per frame; monogenic sequences per requested level.
    let pyramids: Vec<_> = seq
        .iter()
        .map(|frame| build_pyramid(frame, max_level))
        .collect::<Result<Vec<_>>>()?;

    let seg_len = params.gx * params.gy * params.o;
    let mut values = Vec::with_capacity(params.descriptor_len());
    let mut segment_starts = Vec::with_capacity(params.levels.len());

    let mut sorted_levels = params.levels.clone();
    sorted_levels.sort_unstable();

    for &level in &sorted_levels {
        let monogenic: Vec<_> = pyramids
            .iter()
            .map(|p| {
                let band = p.band(level).ok_or_else(|| {
                    MorfError::Dimension(format!("pyramid has no level {level}"))
                })?;
                riesz_transform(band, level)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut phases = filter_phase_sequence(&monogenic, filter_cfg)?;
        if params.alpha != 1.0 {
            phases = phases
                .iter()
                .map(|p| match params.amplify_mode {
                    AmplifyMode::Sine => amplify_phase(p, params.alpha),
                    AmplifyMode::Linear => amplify_phase_linear(p, params.alpha),
                })
                .collect::<Result<Vec<_>>>()?;
        }
        let pair = mean_oriented_riesz(&phases, f_o, f_a)?;
        let (phi, theta) = magnitude_orientation(&pair);

        let level_mask = mask.map(|m| downscale_mask(m, phi.width(), phi.height()));
        let mut seg = grid_histogram(
            &phi,
            &theta,
            params.gx,
            params.gy,
            params.o,
            level_mask.as_ref(),
        )?;
        if params.normalize {
            let norm = seg.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                for v in &mut seg {
                    *v /= norm;
                }
            }
        }
        segment_starts.push(values.len());
        values.extend_from_slice(&seg);
        debug_assert_eq!(seg_len, params.gx * params.gy * params.o);
    }

    Ok(MorfDescriptor { values, params: params.clone(), segment_starts })
}

/// Nearest-neighbour downscale of a binary vote mask to a level's resolution.
fn downscale_mask(mask: &GrayFrame, w: usize, h: usize) -> GrayFrame {
    let (mw, mh) = mask.dims();
    GrayFrame::from_fn(w, h, |x, y| {
        let sx = (x * mw / w).min(mw - 1);
        let sy = (y * mh / h).min(mh - 1);
        if mask.get(sx, sy) != 0.0 {
            1.0
        } else {
            0.0
        }
    })
}
