use super::ToleranceConfig;
use crate::error::{Error, Result};

const INITIAL_PANELS: usize = 16;
const MAX_DEPTH: u32 = 50;

struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson quadrature of `f` over `[lo, hi]` to absolute error
/// `cfg.quad_tol`.
///
/// The interval is first cut into a fixed number of panels so that narrow
/// peaks are not missed by the first five samples; each panel is then
/// bisected until the Richardson estimate meets its share of the tolerance.
pub fn integrate<F>(f: F, lo: f64, hi: f64, cfg: &ToleranceConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    if !(lo.is_finite() && hi.is_finite()) || !(lo < hi) {
        return Err(Error::domain(
            "integrate",
            format!("bounds [{lo}, {hi}] must be finite with lo < hi"),
        ));
    }
    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::domain(
                "integrate",
                format!("integrand is {y} at x = {x}"),
            ))
        }
    };

    let width = (hi - lo) / INITIAL_PANELS as f64;
    let panel_tol = cfg.quad_tol / INITIAL_PANELS as f64;
    let mut stack = Vec::with_capacity(64);
    let mut f_left = eval(lo)?;
    for i in 0..INITIAL_PANELS {
        let a = lo + i as f64 * width;
        let b = if i + 1 == INITIAL_PANELS {
            hi
        } else {
            a + width
        };
        let fb = eval(b)?;
        let fm = eval(0.5 * (a + b))?;
        stack.push(Segment {
            a,
            b,
            fa: f_left,
            fm,
            fb,
            whole: simpson(a, b, f_left, fm, fb),
            tol: panel_tol,
            depth: 0,
        });
        f_left = fb;
    }

    let mut total = 0.0;
    let mut compensation = 0.0;
    let mut subdivisions = 0usize;
    while let Some(seg) = stack.pop() {
        let m = 0.5 * (seg.a + seg.b);
        let flm = eval(0.5 * (seg.a + m))?;
        let frm = eval(0.5 * (m + seg.b))?;
        let left = simpson(seg.a, m, seg.fa, flm, seg.fm);
        let right = simpson(m, seg.b, seg.fm, frm, seg.fb);
        let delta = left + right - seg.whole;
        if delta.abs() <= 15.0 * seg.tol {
            // Kahan summation keeps thousands of accepted panels honest.
            let y = left + right + delta / 15.0 - compensation;
            let t = total + y;
            compensation = (t - total) - y;
            total = t;
            continue;
        }
        subdivisions += 1;
        if subdivisions > cfg.max_subdivisions || seg.depth >= MAX_DEPTH {
            return Err(Error::non_convergence(
                "integrate",
                format!(
                    "tolerance {} not met on [{lo}, {hi}] after {subdivisions} subdivisions",
                    cfg.quad_tol
                ),
            ));
        }
        let tol = 0.5 * seg.tol;
        let depth = seg.depth + 1;
        stack.push(Segment {
            a: seg.a,
            b: m,
            fa: seg.fa,
            fm: flm,
            fb: seg.fm,
            whole: left,
            tol,
            depth,
        });
        stack.push(Segment {
            a: m,
            b: seg.b,
            fa: seg.fm,
            fm: frm,
            fb: seg.fb,
            whole: right,
            tol,
            depth,
        });
    }
    Ok(total)
}
