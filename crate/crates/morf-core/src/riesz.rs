//! Approximate Riesz transform, quaternionic phase, temporal filtering,
//! and phase amplification.
//!
//! Each pyramid subband I is paired with the three-tap finite-difference
//! responses (R1, R2). The triple is read as the quaternion
//! q = I + i*R1 + j*R2; its normalized logarithm gives the quaternionic
//! phase pair (phi*cos(theta), phi*sin(theta)), which is invariant to the
//! (A, phi, theta) vs (A, -phi, theta+pi) sign ambiguity.

use crate::error::{MorfError, Result};
use crate::frame::{gaussian_kernel, GrayFrame};

/// Guard below which a pixel is treated as phase-degenerate.
pub const DEGENERATE_EPS: f64 = 1e-10;

/// Subband plus its Riesz pair, all sharing dimensions.
#[derive(Debug, Clone)]
pub struct MonogenicLevel {
    pub i: GrayFrame,
    pub r1: GrayFrame,
    pub r2: GrayFrame,
    pub level: usize,
}

impl MonogenicLevel {
    pub fn dims(&self) -> (usize, usize) {
        self.i.dims()
    }

    /// Local amplitude sqrt(i^2 + r1^2 + r2^2) per pixel.
    pub fn amplitude(&self) -> AmplitudeField {
        let (w, h) = self.dims();
        let a = GrayFrame::from_fn(w, h, |x, y| {
            let i = self.i.get(x, y);
            let r1 = self.r1.get(x, y);
            let r2 = self.r2.get(x, y);
            (i * i + r1 * r1 + r2 * r2).sqrt()
        });
        AmplitudeField { a, level: self.level }
    }
}

/// Sign-unambiguous quaternionic phase: pc = phi*cos(theta), ps = phi*sin(theta).
#[derive(Debug, Clone)]
pub struct QuatPhaseField {
    pub pc: GrayFrame,
    pub ps: GrayFrame,
    pub level: usize,
}

impl QuatPhaseField {
    pub fn zeros(width: usize, height: usize, level: usize) -> Self {
        Self {
            pc: GrayFrame::zeros(width, height),
            ps: GrayFrame::zeros(width, height),
            level,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.pc.dims()
    }
}

/// Non-negative local amplitude per pixel.
#[derive(Debug, Clone)]
pub struct AmplitudeField {
    pub a: GrayFrame,
    pub level: usize,
}

/// Temporal band-pass plus optional amplitude-weighted spatial smoothing.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct TemporalFilterConfig {
    pub low_hz: f64,
    pub high_hz: f64,
    pub fps: f64,
    /// Gaussian width in pixels for amplitude-weighted smoothing; 0 disables.
    pub spatial_sigma: f64,
}

impl Default for TemporalFilterConfig {
    fn default() -> Self {
        // Micro-expressions last a fraction of a second; 0.5-10 Hz brackets
        // that band with room for annotation jitter.
        Self { low_hz: 0.5, high_hz: 10.0, fps: 30.0, spatial_sigma: 2.0 }
    }
}

impl TemporalFilterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fps > 0.0) {
            return Err(MorfError::Config(format!("fps must be positive, got {}", self.fps)));
        }
        if !(self.low_hz >= 0.0 && self.low_hz < self.high_hz && self.high_hz < self.fps / 2.0) {
            return Err(MorfError::Config(format!(
                "need 0 <= low_hz < high_hz < fps/2, got low={} high={} fps={}",
                self.low_hz, self.high_hz, self.fps
            )));
        }
        if self.spatial_sigma < 0.0 {
            return Err(MorfError::Config("spatial_sigma must be >= 0".into()));
        }
        Ok(())
    }

    /// A pass-band spanning [0, fps/2) acts as the identity filter.
    pub fn is_all_pass(&self) -> bool {
        self.low_hz <= 0.0 && self.high_hz >= 0.499 * self.fps
    }
}

/// Three-tap approximate Riesz transform of one subband:
/// r1(x,y) = 0.5*band(x+1,y) - 0.5*band(x-1,y), r2 analogous vertically,
/// with half-sample reflected borders.
pub fn riesz_transform(band: &GrayFrame, level: usize) -> Result<MonogenicLevel> {
    let (w, h) = band.dims();
    if w < 3 || h < 3 {
        return Err(MorfError::Dimension(format!(
            "riesz_transform needs at least 3x3, got {}x{}",
            w, h
        )));
    }
    let mut r1 = GrayFrame::zeros(w, h);
    let mut r2 = GrayFrame::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let xp = if x + 1 < w { x + 1 } else { w - 1 };
            let xm = if x > 0 { x - 1 } else { 0 };
            let yp = if y + 1 < h { y + 1 } else { h - 1 };
            let ym = if y > 0 { y - 1 } else { 0 };
            r1.set(x, y, 0.5 * band.get(xp, y) - 0.5 * band.get(xm, y));
            r2.set(x, y, 0.5 * band.get(x, yp) - 0.5 * band.get(x, ym));
        }
    }
    Ok(MonogenicLevel { i: band.clone(), r1, r2, level })
}

/// Spherical synthesis of one monogenic pixel:
/// (A*cos(phi), A*sin(phi)*cos(theta), A*sin(phi)*sin(theta)).
pub fn monogenic_from_spherical(a: f64, phi: f64, theta: f64) -> (f64, f64, f64) {
    (a * phi.cos(), a * phi.sin() * theta.cos(), a * phi.sin() * theta.sin())
}

#[inline]
fn quat_phase_pixel(i: f64, v1: f64, v2: f64, v3: f64) -> (f64, f64, f64) {
    let a = (i * i + v1 * v1 + v2 * v2 + v3 * v3).sqrt();
    let rm = (v1 * v1 + v2 * v2 + v3 * v3).sqrt();
    if a <= DEGENERATE_EPS || rm <= DEGENERATE_EPS {
        return (a, 0.0, 0.0);
    }
    let phi = rm.atan2(i);
    (a, phi * v1 / rm, phi * v2 / rm)
}

/// Amplitude and quaternionic phase per pixel. Degenerate pixels
/// (amplitude or Riesz magnitude below the epsilon guard) map to zero phase.
pub fn extract_quat_phase(m: &MonogenicLevel) -> (AmplitudeField, QuatPhaseField) {
    let (w, h) = m.dims();
    let mut a = GrayFrame::zeros(w, h);
    let mut pc = GrayFrame::zeros(w, h);
    let mut ps = GrayFrame::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let (av, pcv, psv) =
                quat_phase_pixel(m.i.get(x, y), m.r1.get(x, y), m.r2.get(x, y), 0.0);
            a.set(x, y, av);
            pc.set(x, y, pcv);
            ps.set(x, y, psv);
        }
    }
    (
        AmplitudeField { a, level: m.level },
        QuatPhaseField { pc, ps, level: m.level },
    )
}

/// Quaternionic phase of q_curr * conj(q_prev), normalized; measures the
/// per-pixel phase advance between two frames of one subband.
pub fn phase_difference(prev: &MonogenicLevel, curr: &MonogenicLevel) -> Result<QuatPhaseField> {
    if prev.dims() != curr.dims() {
        return Err(MorfError::Structure(format!(
            "phase_difference dims {:?} vs {:?}",
            prev.dims(),
            curr.dims()
        )));
    }
    if prev.level != curr.level {
        return Err(MorfError::Structure(format!(
            "phase_difference across levels {} and {}",
            prev.level, curr.level
        )));
    }
    let (w, h) = prev.dims();
    let mut pc = GrayFrame::zeros(w, h);
    let mut ps = GrayFrame::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let (w1, x1, y1) = (curr.i.get(x, y), curr.r1.get(x, y), curr.r2.get(x, y));
            let (w0, x0, y0) = (prev.i.get(x, y), -prev.r1.get(x, y), -prev.r2.get(x, y));
            // (w1 + x1 i + y1 j)(w0 + x0 i + y0 j); the k part appears when
            // the two orientations differ and is folded into the log radius.
            let pw = w1 * w0 - x1 * x0 - y1 * y0;
            let px = w1 * x0 + x1 * w0;
            let py = w1 * y0 + y1 * w0;
            let pz = x1 * y0 - y1 * x0;
            let n1 = (w1 * w1 + x1 * x1 + y1 * y1).sqrt();
            let n0 = (w0 * w0 + x0 * x0 + y0 * y0).sqrt();
            let norm = n1 * n0;
            if norm <= DEGENERATE_EPS * DEGENERATE_EPS {
                continue;
            }
            let (_, pcv, psv) = quat_phase_pixel(pw / norm, px / norm, py / norm, pz / norm);
            pc.set(x, y, pcv);
            ps.set(x, y, psv);
        }
    }
    Ok(QuatPhaseField { pc, ps, level: prev.level })
}

/// Second-order IIR band-pass (bilinear-transformed first-order Butterworth
/// prototype), applied causally per pixel and channel.
#[derive(Debug, Clone, Copy)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    pub fn band_pass(low_hz: f64, high_hz: f64, fps: f64) -> Self {
        let w1 = (std::f64::consts::PI * low_hz / fps).tan();
        let w2 = (std::f64::consts::PI * high_hz / fps).tan();
        let bw = w2 - w1;
        let w0sq = w1 * w2;
        let a0 = 1.0 + bw + w0sq;
        Biquad {
            b0: bw / a0,
            b1: 0.0,
            b2: -bw / a0,
            a1: 2.0 * (w0sq - 1.0) / a0,
            a2: (1.0 - bw + w0sq) / a0,
        }
    }

    /// Magnitude response at `hz` for sample rate `fps`.
    pub fn gain_at(&self, hz: f64, fps: f64) -> f64 {
        let w = 2.0 * std::f64::consts::PI * hz / fps;
        let (c1, s1) = (w.cos(), w.sin());
        let (c2, s2) = ((2.0 * w).cos(), (2.0 * w).sin());
        let num_re = self.b0 + self.b1 * c1 + self.b2 * c2;
        let num_im = -(self.b1 * s1 + self.b2 * s2);
        let den_re = 1.0 + self.a1 * c1 + self.a2 * c2;
        let den_im = -(self.a1 * s1 + self.a2 * s2);
        (num_re * num_re + num_im * num_im).sqrt() / (den_re * den_re + den_im * den_im).sqrt()
    }

    #[inline]
    fn step(&self, x: f64, state: &mut [f64; 4]) -> f64 {
        let y = self.b0 * x + self.b1 * state[0] + self.b2 * state[1]
            - self.a1 * state[2]
            - self.a2 * state[3];
        state[1] = state[0];
        state[0] = x;
        state[3] = state[2];
        state[2] = y;
        y
    }
}

/// Cumulative quaternionic phase relative to the first frame, band-pass
/// filtered in time, then (if spatial_sigma > 0) smoothed with an
/// amplitude-squared-weighted Gaussian. Output frame 0 is all zero.
pub fn filter_phase_sequence(
    levels: &[MonogenicLevel],
    cfg: &TemporalFilterConfig,
) -> Result<Vec<QuatPhaseField>> {
    cfg.validate()?;
    if levels.len() < 2 {
        return Err(MorfError::Sequence(format!(
            "filter_phase_sequence needs >= 2 frames, got {}",
            levels.len()
        )));
    }
    let dims = levels[0].dims();
    let level = levels[0].level;
    for m in levels {
        if m.dims() != dims || m.level != level {
            return Err(MorfError::Structure(
                "filter_phase_sequence requires constant dims and level".into(),
            ));
        }
    }
    let (w, h) = dims;
    let n = levels.len();

    // Cumulative phase: running sum of consecutive-frame differences.
    let mut cumulative: Vec<QuatPhaseField> = Vec::with_capacity(n);
    cumulative.push(QuatPhaseField::zeros(w, h, level));
    for t in 1..n {
        let d = phase_difference(&levels[t - 1], &levels[t])?;
        let prev = &cumulative[t - 1];
        cumulative.push(QuatPhaseField {
            pc: prev.pc.zip_map(&d.pc, |a, b| a + b)?,
            ps: prev.ps.zip_map(&d.ps, |a, b| a + b)?,
            level,
        });
    }

    let mut filtered = if cfg.is_all_pass() {
        cumulative
    } else {
        let bq = Biquad::band_pass(cfg.low_hz, cfg.high_hz, cfg.fps);
        let mut out: Vec<QuatPhaseField> =
            (0..n).map(|_| QuatPhaseField::zeros(w, h, level)).collect();
        let npx = w * h;
        let mut state_pc = vec![[0.0f64; 4]; npx];
        let mut state_ps = vec![[0.0f64; 4]; npx];
        for t in 0..n {
            let (src, dst) = (&cumulative[t], &mut out[t]);
            let spc = src.pc.data();
            let sps = src.ps.data();
            let dpc = dst.pc.data_mut();
            for (p, x) in spc.iter().enumerate() {
                dpc[p] = bq.step(*x, &mut state_pc[p]);
            }
            let dps = dst.ps.data_mut();
            for (p, x) in sps.iter().enumerate() {
                dps[p] = bq.step(*x, &mut state_ps[p]);
            }
        }
        out
    };

    // Frame 0 is the reference; force it to exact zero.
    filtered[0] = QuatPhaseField::zeros(w, h, level);

    if cfg.spatial_sigma > 0.0 {
        let kernel = gaussian_kernel(cfg.spatial_sigma);
        for (t, field) in filtered.iter_mut().enumerate() {
            let amp = levels[t].amplitude();
            *field = amplitude_weighted_blur(field, &amp, &kernel)?;
        }
    }
    Ok(filtered)
}

/// blur(A^2 * p) / blur(A^2), channelwise; pixels with no weight stay zero.
fn amplitude_weighted_blur(
    field: &QuatPhaseField,
    amp: &AmplitudeField,
    kernel: &[f64],
) -> Result<QuatPhaseField> {
    let w2 = amp.a.map(|v| v * v);
    let denom = w2.convolve_separable(kernel);
    let blur_channel = |p: &GrayFrame| -> Result<GrayFrame> {
        let num = w2.zip_map(p, |wv, pv| wv * pv)?.convolve_separable(kernel);
        num.zip_map(&denom, |n, d| if d > DEGENERATE_EPS { n / d } else { 0.0 })
    };
    Ok(QuatPhaseField {
        pc: blur_channel(&field.pc)?,
        ps: blur_channel(&field.ps)?,
        level: field.level,
    })
}

/// Quaternion-exponentiation amplification: phase magnitude phi maps to
/// sin(alpha*phi) with the orientation kept fixed. Zero pixels stay zero.
pub fn amplify_phase(p: &QuatPhaseField, alpha: f64) -> Result<QuatPhaseField> {
    if !(alpha > 0.0) {
        return Err(MorfError::Config(format!("alpha must be positive, got {alpha}")));
    }
    let (w, h) = p.dims();
    let mut pc = GrayFrame::zeros(w, h);
    let mut ps = GrayFrame::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let (c, s) = (p.pc.get(x, y), p.ps.get(x, y));
            let phi = (c * c + s * s).sqrt();
            if phi > 0.0 {
                let k = (alpha * phi).sin() / phi;
                pc.set(x, y, k * c);
                ps.set(x, y, k * s);
            }
        }
    }
    Ok(QuatPhaseField { pc, ps, level: p.level })
}

/// Alternative amplification that re-extracts the quaternion logarithm
/// after exponentiation, scaling phi to alpha*phi exactly.
pub fn amplify_phase_linear(p: &QuatPhaseField, alpha: f64) -> Result<QuatPhaseField> {
    if !(alpha > 0.0) {
        return Err(MorfError::Config(format!("alpha must be positive, got {alpha}")));
    }
    Ok(QuatPhaseField {
        pc: p.pc.scaled(alpha),
        ps: p.ps.scaled(alpha),
        level: p.level,
    })
}
