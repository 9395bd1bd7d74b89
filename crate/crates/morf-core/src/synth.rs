//! Synthetic motion stimuli and independent spectral reference computations.
//!
//! Everything here exists to test the pipeline: circle sequences rendered at
//! continuous sub-pixel positions, an exact frequency-domain Riesz transform
//! (the oracle the three-tap approximation is scored against), narrow-band
//! filtering helpers, and a deterministic on-disk motion dataset factory.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{num_complex::Complex, FftPlanner};

use crate::dataset::{DatasetManifest, SequenceAnnotation};
use crate::error::{MorfError, Result};
use crate::frame::GrayFrame;
use crate::io::write_pgm16;
use crate::riesz::MonogenicLevel;

/// Circle-stimulus description; the path holds one continuous center
/// position per frame.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub width: usize,
    pub height: usize,
    pub radius: f64,
    pub path: Vec<(f64, f64)>,
    pub edge_softness: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.path.is_empty() {
            return Err(MorfError::SynthSpec("path must contain at least one frame".into()));
        }
        if !(self.radius > 0.0) {
            return Err(MorfError::SynthSpec("radius must be positive".into()));
        }
        if self.edge_softness < 0.0 || self.noise_sigma < 0.0 {
            return Err(MorfError::SynthSpec("softness and noise sigma must be >= 0".into()));
        }
        let margin = self.radius + self.edge_softness;
        for &(cx, cy) in &self.path {
            if cx - margin < 0.0
                || cy - margin < 0.0
                || cx + margin > self.width as f64
                || cy + margin > self.height as f64
            {
                return Err(MorfError::SynthSpec(format!(
                    "circle at ({cx}, {cy}) radius {} exits the {}x{} frame",
                    self.radius, self.width, self.height
                )));
            }
        }
        Ok(())
    }
}

#[inline]
fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// One frame: intensity 1 inside the circle, 0 outside, smoothstep
/// transition of width `softness` evaluated at continuous positions.
pub fn render_circle_frame(
    width: usize,
    height: usize,
    cx: f64,
    cy: f64,
    radius: f64,
    softness: f64,
) -> GrayFrame {
    GrayFrame::from_fn(width, height, |x, y| {
        let dx = x as f64 - cx;
        let dy = y as f64 - cy;
        let d = (dx * dx + dy * dy).sqrt();
        if softness > 0.0 {
            smoothstep((radius + softness / 2.0 - d) / softness)
        } else if d <= radius {
            1.0
        } else {
            0.0
        }
    })
}

/// Standard-normal sample via Box-Muller.
fn sample_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn render_circle_sequence(spec: &SyntheticSpec) -> Result<Vec<GrayFrame>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut frames = Vec::with_capacity(spec.path.len());
    for &(cx, cy) in &spec.path {
        let mut f =
            render_circle_frame(spec.width, spec.height, cx, cy, spec.radius, spec.edge_softness);
        if spec.noise_sigma > 0.0 {
            for v in f.data_mut() {
                *v += spec.noise_sigma * sample_normal(&mut rng);
            }
        }
        frames.push(f);
    }
    Ok(frames)
}

// ---------------------------------------------------------------------------
// Frequency-domain reference computations
// ---------------------------------------------------------------------------

fn fft2(frame: &GrayFrame) -> Vec<Complex<f64>> {
    let (w, h) = frame.dims();
    let mut buf: Vec<Complex<f64>> =
        frame.data().iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(w);
    for y in 0..h {
        row_fft.process(&mut buf[y * w..(y + 1) * w]);
    }
    let col_fft = planner.plan_fft_forward(h);
    let mut col = vec![Complex::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            col[y] = buf[y * w + x];
        }
        col_fft.process(&mut col);
        for y in 0..h {
            buf[y * w + x] = col[y];
        }
    }
    buf
}

fn ifft2_real(mut buf: Vec<Complex<f64>>, w: usize, h: usize) -> GrayFrame {
    let mut planner = FftPlanner::new();
    let row_ifft = planner.plan_fft_inverse(w);
    for y in 0..h {
        row_ifft.process(&mut buf[y * w..(y + 1) * w]);
    }
    let col_ifft = planner.plan_fft_inverse(h);
    let mut col = vec![Complex::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            col[y] = buf[y * w + x];
        }
        col_ifft.process(&mut col);
        for y in 0..h {
            buf[y * w + x] = col[y];
        }
    }
    let scale = 1.0 / (w * h) as f64;
    GrayFrame::from_fn(w, h, |x, y| buf[y * w + x].re * scale)
}

/// Signed angular frequency of DFT bin k out of n, in radians per sample.
#[inline]
fn bin_freq(k: usize, n: usize) -> f64 {
    let k = k as isize;
    let n = n as isize;
    let signed = if 2 * k < n { k } else { k - n };
    2.0 * std::f64::consts::PI * signed as f64 / n as f64
}

/// Exact Riesz transform via the frequency multiplier i*w_l/|w|, zero at DC.
/// Nyquist rows/columns are zeroed to keep the output real-valued.
pub fn spectral_riesz_oracle(frame: &GrayFrame) -> MonogenicLevel {
    let (w, h) = frame.dims();
    let spectrum = fft2(frame);
    let mut s1 = spectrum.clone();
    let mut s2 = spectrum;
    for y in 0..h {
        let wy = bin_freq(y, h);
        let ny = h % 2 == 0 && y == h / 2;
        for x in 0..w {
            let wx = bin_freq(x, w);
            let nx = w % 2 == 0 && x == w / 2;
            let idx = y * w + x;
            let mag = (wx * wx + wy * wy).sqrt();
            if mag == 0.0 || nx || ny {
                s1[idx] = Complex::new(0.0, 0.0);
                s2[idx] = Complex::new(0.0, 0.0);
            } else {
                let m1 = Complex::new(0.0, wx / mag);
                let m2 = Complex::new(0.0, wy / mag);
                s1[idx] *= m1;
                s2[idx] *= m2;
            }
        }
    }
    MonogenicLevel {
        i: frame.clone(),
        r1: ifft2_real(s1, w, h),
        r2: ifft2_real(s2, w, h),
        level: 0,
    }
}

/// Radial Gaussian band-pass around `center_freq` (radians/sample), DC
/// and Nyquist lines removed. Periodic extension via the DFT.
pub fn annulus_bandpass(frame: &GrayFrame, center_freq: f64, sigma: f64) -> GrayFrame {
    let (w, h) = frame.dims();
    let mut spectrum = fft2(frame);
    for y in 0..h {
        let wy = bin_freq(y, h);
        for x in 0..w {
            let wx = bin_freq(x, w);
            let idx = y * w + x;
            let mag = (wx * wx + wy * wy).sqrt();
            let t = if mag == 0.0 {
                0.0
            } else {
                (-((mag - center_freq) * (mag - center_freq)) / (2.0 * sigma * sigma)).exp()
            };
            spectrum[idx] *= t;
        }
    }
    ifft2_real(spectrum, w, h)
}

/// Isotropic random field whose spectrum is a hard annulus at `center_freq`
/// of half-width `half_width`, tapered by a centered Gaussian envelope so
/// image borders carry negligible amplitude. `envelope_sigma <= 0` skips
/// the taper and leaves the field periodic.
pub fn render_bandpassed_noise(
    width: usize,
    height: usize,
    center_freq: f64,
    half_width: f64,
    envelope_sigma: f64,
    seed: u64,
) -> GrayFrame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let white = GrayFrame::from_fn(width, height, |_, _| sample_normal(&mut rng));
    let (w, h) = (width, height);
    let mut spectrum = fft2(&white);
    for y in 0..h {
        let wy = bin_freq(y, h);
        for x in 0..w {
            let wx = bin_freq(x, w);
            let idx = y * w + x;
            let mag = (wx * wx + wy * wy).sqrt();
            let keep = mag > 0.0 && (mag - center_freq).abs() <= half_width;
            if !keep {
                spectrum[idx] = Complex::new(0.0, 0.0);
            }
        }
    }
    let field = ifft2_real(spectrum, w, h);
    if envelope_sigma <= 0.0 {
        return field;
    }
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    GrayFrame::from_fn(w, h, |x, y| {
        let dx = x as f64 - cx;
        let dy = y as f64 - cy;
        let env = (-(dx * dx + dy * dy) / (2.0 * envelope_sigma * envelope_sigma)).exp();
        field.get(x, y) * env
    })
}

// ---------------------------------------------------------------------------
// Motion dataset factory
// ---------------------------------------------------------------------------

/// Named motion direction; angle in radians, 0 pointing +x, pi/2 pointing +y
/// (down, in image coordinates).
#[derive(Debug, Clone)]
pub struct MotionClass {
    pub label: String,
    pub angle: f64,
}

impl MotionClass {
    pub fn from_name(name: &str) -> Result<Self> {
        let angle = match name {
            "right" => 0.0,
            "down" => std::f64::consts::FRAC_PI_2,
            "left" => std::f64::consts::PI,
            "up" => -std::f64::consts::FRAC_PI_2,
            "diag" => std::f64::consts::FRAC_PI_4,
            other => {
                return Err(MorfError::Config(format!(
                    "unknown motion class '{other}' (expected right/down/left/up/diag)"
                )))
            }
        };
        Ok(Self { label: name.to_string(), angle })
    }
}

#[derive(Debug, Clone)]
pub struct MotionDatasetSpec {
    pub classes: Vec<MotionClass>,
    pub subjects: usize,
    pub reps: usize,
    pub noise_sigma: f64,
    pub seed: u64,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub fps: f64,
}

impl Default for MotionDatasetSpec {
    fn default() -> Self {
        Self {
            classes: vec![
                MotionClass::from_name("left").unwrap(),
                MotionClass::from_name("right").unwrap(),
                MotionClass::from_name("up").unwrap(),
            ],
            subjects: 10,
            reps: 3,
            noise_sigma: 0.01,
            seed: 7,
            width: 96,
            height: 96,
            frames: 12,
            fps: 30.0,
        }
    }
}

/// Renders one sequence per (subject, class, rep) with subject-specific
/// radius/center/speed jitter, writes 16-bit PGM frames under `out_dir`,
/// and returns the manifest describing them.
pub fn make_motion_dataset(spec: &MotionDatasetSpec, out_dir: &Path) -> Result<DatasetManifest> {
    if spec.classes.len() < 2 {
        return Err(MorfError::Config("need at least 2 motion classes".into()));
    }
    if spec.subjects < 2 {
        return Err(MorfError::Config("need at least 2 subjects for LOSO".into()));
    }
    if spec.frames < 2 {
        return Err(MorfError::Config("need at least 2 frames per sequence".into()));
    }
    std::fs::create_dir_all(out_dir)?;

    let mut sequences = Vec::new();
    for s in 0..spec.subjects {
        let subject_id = format!("s{:02}", s + 1);
        // Per-subject appearance jitter, deterministic in (seed, subject).
        let mut subj_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ (0x9E37_79B9 + s as u64));
        let min_dim = spec.width.min(spec.height) as f64;
        let radius = min_dim * subj_rng.gen_range(0.22..0.30);
        let base_cx = spec.width as f64 / 2.0 + subj_rng.gen_range(-3.0..3.0);
        let base_cy = spec.height as f64 / 2.0 + subj_rng.gen_range(-3.0..3.0);
        let speed = subj_rng.gen_range(0.6..1.0);

        for (ci, class) in spec.classes.iter().enumerate() {
            for rep in 0..spec.reps {
                let id = format!("{}_{}_{}", subject_id, class.label, rep);
                let seq_seed = spec.seed
                    ^ (s as u64).wrapping_mul(0x0100_0000_01B3)
                    ^ (ci as u64).wrapping_mul(0x1_0001)
                    ^ (rep as u64).wrapping_mul(0x9E37);
                let mut rep_rng = ChaCha8Rng::seed_from_u64(seq_seed);
                let rep_speed = speed * rep_rng.gen_range(0.9..1.1);
                let (dx, dy) = (class.angle.cos() * rep_speed, class.angle.sin() * rep_speed);
                let path: Vec<(f64, f64)> = (0..spec.frames)
                    .map(|t| (base_cx + dx * t as f64, base_cy + dy * t as f64))
                    .collect();
                let circle = SyntheticSpec {
                    width: spec.width,
                    height: spec.height,
                    radius,
                    path,
                    edge_softness: 1.0,
                    noise_sigma: spec.noise_sigma,
                    seed: seq_seed,
                };
                let frames = render_circle_sequence(&circle)?;

                let frames_dir = out_dir.join(&id);
                std::fs::create_dir_all(&frames_dir)?;
                for (t, frame) in frames.iter().enumerate() {
                    write_pgm16(&frames_dir.join(format!("frame_{t:04}.pgm")), frame)?;
                }
                sequences.push(SequenceAnnotation {
                    id,
                    subject_id: subject_id.clone(),
                    label: class.label.clone(),
                    frames_dir,
                    f_onset: 0,
                    f_apex: spec.frames - 1,
                    f_offset: Some(spec.frames - 1),
                    fps: spec.fps,
                });
            }
        }
    }

    let manifest = DatasetManifest {
        name: "synthetic-motion".to_string(),
        classes: spec.classes.iter().map(|c| c.label.clone()).collect(),
        sequences,
    };
    manifest.validate()?;
    Ok(manifest)
}
