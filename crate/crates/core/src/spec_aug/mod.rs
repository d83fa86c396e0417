//! Spectrogram augmenters.
//!
//! Every operation keeps the F x T shape and axis metadata and never emits a
//! value below the floor. All work in the dB domain except [`emda`], which
//! mixes in linear power.

mod randomized;
mod tps;

pub use randomized::{randomized, SpecOutcome};
pub use tps::{kernel, solve_inverse_warp, tps_solve, tps_solve_many, TpsError, TpsSpline, TpsWarp};

use crate::rng::RngStream;
use crate::spectrogram::Spectrogram;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecAugError {
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Tps(#[from] TpsError),
    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("label mismatch: {0:?} vs {1:?}")]
    LabelMismatch(Option<String>, Option<String>),
    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    RateMismatch(u32, u32),
    #[error("{0} needs a same-class partner")]
    MissingPartner(&'static str),
}

fn precondition(msg: impl Into<String>) -> SpecAugError {
    SpecAugError::Precondition(msg.into())
}

/// Positions within this distance of an integer sample that cell exactly.
const SNAP: f64 = 1e-9;

fn snap(pos: f64) -> f64 {
    let r = pos.round();
    if (pos - r).abs() < SNAP {
        r
    } else {
        pos
    }
}

/// Shifts columns by `cols` (positive = later in time).
pub fn spec_time_shift(spec: &Spectrogram, cols: i64, circular: bool) -> Result<Spectrogram, SpecAugError> {
    let t = spec.frames as i64;
    if cols.abs() >= t {
        return Err(precondition(format!("time shift of {cols} columns needs |cols| < {t}")));
    }
    let mut out = spec.clone();
    for r in 0..spec.bins {
        for c in 0..t {
            let src = c - cols;
            let v = if circular {
                spec.get(r, src.rem_euclid(t) as usize)
            } else if (0..t).contains(&src) {
                spec.get(r, src as usize)
            } else {
                spec.dyn_floor
            };
            out.set(r, c as usize, v);
        }
    }
    Ok(out)
}

/// Shifts rows by `rows` (positive = higher frequency), floor-filling.
pub fn spec_freq_shift(spec: &Spectrogram, rows: i64) -> Result<Spectrogram, SpecAugError> {
    let f = spec.bins as i64;
    if rows.abs() >= f {
        return Err(precondition(format!("frequency shift of {rows} rows needs |rows| < {f}")));
    }
    let mut out = spec.clone();
    for r in 0..f {
        let src = r - rows;
        for c in 0..spec.frames {
            let v = if (0..f).contains(&src) {
                spec.get(src as usize, c)
            } else {
                spec.dyn_floor
            };
            out.set(r as usize, c, v);
        }
    }
    Ok(out)
}

/// Adds i.i.d. Gaussian noise in dB and re-clamps to the floor.
pub fn spec_add_noise(spec: &Spectrogram, sigma_db: f64, rng: &mut RngStream) -> Result<Spectrogram, SpecAugError> {
    if !(sigma_db > 0.0 && sigma_db.is_finite()) {
        return Err(precondition("noise sigma must be positive"));
    }
    let floor = spec.dyn_floor;
    let values = spec
        .values
        .iter()
        .map(|v| (v + sigma_db * rng.normal()).max(floor))
        .collect();
    Ok(spec.with_values(values))
}

/// Piecewise-linear frequency map used by [`vtln_warp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VtlnMap {
    pub alpha: f64,
    pub f_max: f64,
    pub knee: f64,
}

impl VtlnMap {
    pub fn new(alpha: f64, bins: usize) -> Self {
        let f_max = bins.saturating_sub(1) as f64;
        Self {
            alpha,
            f_max,
            knee: 0.8 * f_max / alpha.max(1.0),
        }
    }

    /// `g(f) = alpha f` below the knee, then linear to `(f_max, f_max)`.
    pub fn forward(&self, f: f64) -> f64 {
        let Self { alpha, f_max, knee } = *self;
        if f <= knee {
            alpha * f
        } else {
            alpha * knee + (f - knee) * (f_max - alpha * knee) / (f_max - knee)
        }
    }

    pub fn inverse(&self, y: f64) -> f64 {
        let Self { alpha, f_max, knee } = *self;
        if y <= alpha * knee {
            y / alpha
        } else {
            knee + (y - alpha * knee) * (f_max - knee) / (f_max - alpha * knee)
        }
    }
}

/// Vocal-tract-length warp of the frequency axis, `alpha` in `[0.8, 1.2]`.
pub fn vtln_warp(spec: &Spectrogram, alpha: f64) -> Result<Spectrogram, SpecAugError> {
    if !(0.8..=1.2).contains(&alpha) {
        return Err(precondition(format!("VTLN alpha {alpha} outside [0.8, 1.2]")));
    }
    if spec.bins < 2 {
        return Ok(spec.clone());
    }
    let map = VtlnMap::new(alpha, spec.bins);
    let mut out = spec.clone();
    for r in 0..spec.bins {
        let src = snap(map.inverse(r as f64));
        for c in 0..spec.frames {
            out.set(r, c, sample_rows(spec, src, c));
        }
    }
    Ok(out)
}

fn sample_rows(spec: &Spectrogram, pos: f64, col: usize) -> f64 {
    let last = (spec.bins - 1) as f64;
    if !(0.0..=last).contains(&pos) {
        return spec.dyn_floor;
    }
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if frac == 0.0 {
        return spec.get(i, col);
    }
    let j = (i + 1).min(spec.bins - 1);
    // rounding can land a blend of floor cells just below the floor
    ((1.0 - frac) * spec.get(i, col) + frac * spec.get(j, col)).max(spec.dyn_floor)
}

/// Per-row equalizer gains, linearly interpolated between log-spaced anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct EqCurve {
    pub anchor_freqs: Vec<f64>,
    pub gains_db: Vec<f64>,
}

impl EqCurve {
    /// Anchor positions `(F)^(i/(B-1)) - 1`, from row 0 to row F-1.
    pub fn log_anchors(bins: usize, count: usize) -> Vec<f64> {
        let top = (bins as f64).ln();
        (0..count)
            .map(|i| (top * i as f64 / (count - 1) as f64).exp() - 1.0)
            .collect()
    }

    pub fn flat(bins: usize, count: usize, gain_db: f64) -> Self {
        Self {
            anchor_freqs: Self::log_anchors(bins, count),
            gains_db: vec![gain_db; count],
        }
    }

    /// Gains drawn uniformly from `[-max_db, max_db]`, lowest anchor first.
    pub fn random(bins: usize, count: usize, max_db: f64, rng: &mut RngStream) -> Self {
        Self {
            anchor_freqs: Self::log_anchors(bins, count),
            gains_db: (0..count).map(|_| rng.uniform_range(-max_db, max_db)).collect(),
        }
    }

    pub fn check(&self, bins: usize) -> Result<(), SpecAugError> {
        let a = &self.anchor_freqs;
        if a.len() < 2 || a.len() != self.gains_db.len() {
            return Err(precondition("equalizer needs at least 2 anchors with one gain each"));
        }
        let top = bins.saturating_sub(1) as f64;
        let increasing = a.windows(2).all(|w| w[0] < w[1]);
        if !increasing || a[0] < 0.0 || a[a.len() - 1] > top + 1e-9 {
            return Err(precondition("equalizer anchors must increase within [0, F-1]"));
        }
        if self.gains_db.iter().any(|g| !g.is_finite()) {
            return Err(precondition("equalizer gains must be finite"));
        }
        Ok(())
    }

    pub fn gain_at(&self, row: f64) -> f64 {
        let a = &self.anchor_freqs;
        let g = &self.gains_db;
        if row <= a[0] {
            return g[0];
        }
        if row >= a[a.len() - 1] {
            return g[g.len() - 1];
        }
        let k = a.partition_point(|&x| x <= row) - 1;
        let t = (row - a[k]) / (a[k + 1] - a[k]);
        g[k] + t * (g[k + 1] - g[k])
    }
}

/// Equalized mixture of two same-class spectrograms in the power domain.
///
/// `b` is delayed by `delay_cols` (floor-filled) before mixing; the result is
/// clamped to the new peak minus `a`'s dynamic range.
pub fn emda(
    a: &Spectrogram,
    b: &Spectrogram,
    weight: f64,
    eq_a: &EqCurve,
    eq_b: &EqCurve,
    delay_cols: usize,
) -> Result<Spectrogram, SpecAugError> {
    if !a.same_shape(b) {
        return Err(SpecAugError::ShapeMismatch(a.bins, a.frames, b.bins, b.frames));
    }
    if a.label != b.label {
        return Err(SpecAugError::LabelMismatch(a.label.clone(), b.label.clone()));
    }
    if a.sample_rate != b.sample_rate {
        return Err(SpecAugError::RateMismatch(a.sample_rate, b.sample_rate));
    }
    if !(0.0..=1.0).contains(&weight) {
        return Err(precondition(format!("EMDA weight {weight} outside [0, 1]")));
    }
    eq_a.check(a.bins)?;
    eq_b.check(b.bins)?;
    let range = a.peak() - a.dyn_floor;
    let power = |db: f64| 10f64.powf(db / 10.0);
    let mut values = Vec::with_capacity(a.values.len());
    for r in 0..a.bins {
        let ga = power(eq_a.gain_at(r as f64));
        let gb = power(eq_b.gain_at(r as f64));
        for c in 0..a.frames {
            let vb = if c >= delay_cols { b.get(r, c - delay_cols) } else { b.dyn_floor };
            let p = weight * ga * power(a.get(r, c)) + (1.0 - weight) * gb * power(vb);
            values.push(10.0 * p.log10());
        }
    }
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = peak - range;
    for v in &mut values {
        *v = v.max(floor);
    }
    let mut out = a.with_values(values);
    out.dyn_floor = floor;
    Ok(out)
}

/// A contiguous band set to the floor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mask {
    pub start: usize,
    pub width: usize,
}

fn draw_mask(len: usize, max_width: usize, rng: &mut RngStream) -> Mask {
    let width = rng.uniform_int(max_width as u64 + 1) as usize;
    let start = rng.uniform_int((len - width) as u64 + 1) as usize;
    Mask { start, width }
}

/// Floors `f` consecutive rows, `f ~ U{0..=max_width}`, start `~ U{0..=F-f}`.
pub fn freq_mask(spec: &Spectrogram, max_width: usize, rng: &mut RngStream) -> Result<(Spectrogram, Mask), SpecAugError> {
    if max_width >= spec.bins {
        return Err(precondition(format!("frequency mask width {max_width} must be < {}", spec.bins)));
    }
    let mask = draw_mask(spec.bins, max_width, rng);
    let mut out = spec.clone();
    for r in mask.start..mask.start + mask.width {
        for c in 0..spec.frames {
            out.set(r, c, spec.dyn_floor);
        }
    }
    Ok((out, mask))
}

/// Floors `t` consecutive columns, drawn like [`freq_mask`].
pub fn time_mask(spec: &Spectrogram, max_width: usize, rng: &mut RngStream) -> Result<(Spectrogram, Mask), SpecAugError> {
    if max_width >= spec.frames {
        return Err(precondition(format!("time mask width {max_width} must be < {}", spec.frames)));
    }
    let mask = draw_mask(spec.frames, max_width, rng);
    let mut out = spec.clone();
    for r in 0..spec.bins {
        for c in mask.start..mask.start + mask.width {
            out.set(r, c, spec.dyn_floor);
        }
    }
    Ok((out, mask))
}

/// Control grid for [`tps_warp`]: `grid x grid` points spanning the image,
/// corners included, row-major. The flag marks border points.
pub fn tps_control_grid(bins: usize, frames: usize, grid: usize) -> Vec<([f64; 2], bool)> {
    let (fr, fc) = ((bins - 1) as f64, (frames - 1) as f64);
    let step = (grid - 1) as f64;
    let mut pts = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            let border = i == 0 || j == 0 || i == grid - 1 || j == grid - 1;
            pts.push(([fr * i as f64 / step, fc * j as f64 / step], border));
        }
    }
    pts
}

/// Bilinear sample at a fractional `(row, col)`; outside the image gives the floor.
fn sample_bilinear(spec: &Spectrogram, pos: [f64; 2]) -> f64 {
    let (r, c) = (snap(pos[0]), snap(pos[1]));
    let (lr, lc) = ((spec.bins - 1) as f64, (spec.frames - 1) as f64);
    if !(0.0..=lr).contains(&r) || !(0.0..=lc).contains(&c) {
        return spec.dyn_floor;
    }
    let (i, j) = (r.floor() as usize, c.floor() as usize);
    let (fr, fc) = (r - i as f64, c - j as f64);
    let i1 = (i + 1).min(spec.bins - 1);
    let j1 = (j + 1).min(spec.frames - 1);
    if fr == 0.0 && fc == 0.0 {
        return spec.get(i, j);
    }
    let top = (1.0 - fc) * spec.get(i, j) + fc * spec.get(i, j1);
    let bottom = (1.0 - fc) * spec.get(i1, j) + fc * spec.get(i1, j1);
    ((1.0 - fr) * top + fr * bottom).max(spec.dyn_floor)
}

/// Warps `spec` so that each control point `p_i` lands at `p_i + d_i`.
///
/// The spline is solved from output to source coordinates and every output
/// cell samples the source bilinearly.
pub fn tps_warp_displaced(
    spec: &Spectrogram,
    points: &[[f64; 2]],
    displacements: &[[f64; 2]],
    lambda: f64,
) -> Result<Spectrogram, SpecAugError> {
    let warp = solve_inverse_warp(points, displacements, lambda)?;
    let mut values = Vec::with_capacity(spec.values.len());
    for r in 0..spec.bins {
        for c in 0..spec.frames {
            values.push(sample_bilinear(spec, warp.map([r as f64, c as f64])));
        }
    }
    Ok(spec.with_values(values))
}

/// Random smooth warp: interior grid points move by `N(0, sigma_px)` in each
/// coordinate (row then column, row-major point order); border points stay.
/// Returns the warped image and the displacements used.
pub fn tps_warp(
    spec: &Spectrogram,
    grid: usize,
    sigma_px: f64,
    lambda: f64,
    rng: &mut RngStream,
) -> Result<(Spectrogram, Vec<[f64; 2]>), SpecAugError> {
    if grid < 2 {
        return Err(precondition("TPS grid must be at least 2"));
    }
    if !(sigma_px >= 0.0 && sigma_px.is_finite()) {
        return Err(precondition("TPS displacement sigma must be >= 0"));
    }
    if spec.bins < 2 || spec.frames < 2 {
        return Err(precondition("TPS warp needs at least 2 rows and 2 columns"));
    }
    let grid_pts = tps_control_grid(spec.bins, spec.frames, grid);
    let points: Vec<[f64; 2]> = grid_pts.iter().map(|(p, _)| *p).collect();
    let displacements: Vec<[f64; 2]> = grid_pts
        .iter()
        .map(|(_, border)| {
            if *border {
                [0.0, 0.0]
            } else {
                [sigma_px * rng.normal(), sigma_px * rng.normal()]
            }
        })
        .collect();
    let out = tps_warp_displaced(spec, &points, &displacements, lambda)?;
    Ok((out, displacements))
}
