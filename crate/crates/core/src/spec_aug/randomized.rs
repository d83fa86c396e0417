use super::*;
use crate::registry::{AugmenterConfig, Domain, DrawnParams, Method};
use serde_json::{json, Map, Value};

/// Result of a randomized spectrogram augmentation.
///
/// `extras` holds secondary random draws (mask placement, equalizer gains,
/// control-point displacements) for the provenance log.
#[derive(Debug, Clone)]
pub struct SpecOutcome {
    pub spec: Spectrogram,
    pub drawn: DrawnParams,
    pub extras: Map<String, Value>,
}

fn fraction_to_cells(fraction: f64, len: usize) -> i64 {
    let cells = (fraction * len as f64).round() as i64;
    let limit = len as i64 - 1;
    cells.clamp(-limit, limit)
}

fn max_width(fraction: f64, len: usize) -> usize {
    ((fraction.max(0.0) * len as f64).floor() as usize).min(len.saturating_sub(1))
}

/// Draws parameters for `cfg` and applies the spectrogram operation.
/// `partner` is required by [`Method::Emda`].
pub fn randomized(
    cfg: &AugmenterConfig,
    rng: &mut RngStream,
    spec: &Spectrogram,
    partner: Option<&Spectrogram>,
) -> Result<SpecOutcome, SpecAugError> {
    if cfg.method.domain() != Domain::Spectrogram {
        return Err(precondition(format!("{} is not a spectrogram method", cfg.method)));
    }
    let p = cfg.draw(rng);
    let mut extras = Map::new();
    let out = match cfg.method {
        Method::SpecTimeShift => {
            let cols = fraction_to_cells(p.real("fraction"), spec.frames);
            extras.insert("cols".into(), json!(cols));
            spec_time_shift(spec, cols, p.flag("circular"))?
        }
        Method::SpecFreqShift => {
            let rows = fraction_to_cells(p.real("fraction"), spec.bins);
            extras.insert("rows".into(), json!(rows));
            spec_freq_shift(spec, rows)?
        }
        Method::SpecNoise => spec_add_noise(spec, p.real("sigma_db"), rng)?,
        Method::Vtln => vtln_warp(spec, p.real("alpha"))?,
        Method::Emda => {
            let partner = partner.ok_or(SpecAugError::MissingPartner("emda"))?;
            let anchors = p.int("anchors");
            if anchors < 2 {
                return Err(precondition("EMDA needs at least 2 anchors"));
            }
            let delay = p.int("delay_cols");
            if delay < 0 {
                return Err(precondition("EMDA delay must be >= 0"));
            }
            let max_db = p.real("eq_max_db");
            let eq_a = EqCurve::random(spec.bins, anchors as usize, max_db, rng);
            let eq_b = EqCurve::random(spec.bins, anchors as usize, max_db, rng);
            extras.insert("eq_a_db".into(), json!(eq_a.gains_db));
            extras.insert("eq_b_db".into(), json!(eq_b.gains_db));
            emda(spec, partner, p.real("weight"), &eq_a, &eq_b, delay as usize)?
        }
        Method::FreqMask => {
            let (out, m) = freq_mask(spec, max_width(p.real("max_fraction"), spec.bins), rng)?;
            extras.insert("start".into(), json!(m.start));
            extras.insert("width".into(), json!(m.width));
            out
        }
        Method::TimeMask => {
            let (out, m) = time_mask(spec, max_width(p.real("max_fraction"), spec.frames), rng)?;
            extras.insert("start".into(), json!(m.start));
            extras.insert("width".into(), json!(m.width));
            out
        }
        Method::TpsWarp => {
            let grid = p.int("grid");
            if grid < 2 {
                return Err(precondition("TPS grid must be at least 2"));
            }
            let sigma = p.real("sigma_fraction") * spec.bins.min(spec.frames) as f64;
            let (out, d) = tps_warp(spec, grid as usize, sigma, p.real("lambda"), rng)?;
            extras.insert("sigma_px".into(), json!(sigma));
            extras.insert("displacements".into(), json!(d));
            out
        }
        _ => unreachable!("domain checked above"),
    };
    Ok(SpecOutcome {
        spec: out,
        drawn: p,
        extras,
    })
}
