//! Signal diagnostics for sampled observables.

/// Period of a sampled oscillating signal from its upward mean crossings.
///
/// A Schmitt trigger with hysteresis `hysteresis·(max − min)` around the mean
/// rejects small fast ripple riding on the slow oscillation. The crossing
/// time is interpolated linearly at the last mean crossing before the upper
/// threshold is reached. Returns `None` with fewer than two upward crossings.
pub fn crossing_period(times: &[f64], values: &[f64], hysteresis: f64) -> Option<f64> {
    assert_eq!(times.len(), values.len());
    let n = values.len();
    if n < 3 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let band = hysteresis * (hi - lo);
    if band <= 0.0 {
        return None;
    }

    let mut armed = values[0] < mean - band;
    let mut last_cross: Option<f64> = None;
    let mut crossings = Vec::new();
    for k in 1..n {
        let (v0, v1) = (values[k - 1] - mean, values[k] - mean);
        if v0 < 0.0 && v1 >= 0.0 {
            let frac = -v0 / (v1 - v0);
            last_cross = Some(times[k - 1] + frac * (times[k] - times[k - 1]));
        }
        if values[k] < mean - band {
            armed = true;
        } else if armed && values[k] > mean + band {
            if let Some(t) = last_cross {
                crossings.push(t);
            }
            armed = false;
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    Some((crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64)
}

/// Angular frequency of the carrier behind a rectified oscillation.
///
/// Quantities such as |cos(ωt)| or √(1 + cos²(ωt)) repeat every π/ω, so a
/// measured period `T` corresponds to the carrier frequency ω = π/T.
pub fn rectified_carrier_frequency(period: f64) -> f64 {
    std::f64::consts::PI / period
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

impl Extremum {
    pub fn label(self) -> &'static str {
        match self {
            Extremum::Max => "max",
            Extremum::Min => "min",
        }
    }
}

/// Global extrema of `values` that lie strictly inside the sampled range and
/// stand out from both endpoint values by more than `prominence`.
pub fn interior_extrema(values: &[f64], prominence: f64) -> Vec<(usize, Extremum)> {
    let n = values.len();
    if n < 3 {
        return Vec::new();
    }
    let (first, last) = (values[0], values[n - 1]);
    let mut out = Vec::new();
    let argmax = (0..n).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    if argmax != 0 && argmax != n - 1 && values[argmax] - first.max(last) > prominence {
        out.push((argmax, Extremum::Max));
    }
    let argmin = (0..n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    if argmin != 0 && argmin != n - 1 && first.min(last) - values[argmin] > prominence {
        out.push((argmin, Extremum::Min));
    }
    out.sort_by_key(|(i, _)| *i);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample(f: impl Fn(f64) -> f64, t_end: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect();
        let v = t.iter().map(|&x| f(x)).collect();
        (t, v)
    }

    #[test]
    fn sine_period() {
        let (t, v) = sample(|x| (3.0 * x).sin(), 20.0, 4001);
        let p = crossing_period(&t, &v, 0.1).unwrap();
        assert!((p - 2.0 * PI / 3.0).abs() < 1e-4);
    }

    #[test]
    fn rectified_cosine_carrier() {
        let w = 2.0;
        let (t, v) = sample(|x| (1.0 + (w * x).cos().powi(2)).sqrt(), 4.0 * PI, 2001);
        let p = crossing_period(&t, &v, 0.1).unwrap();
        assert!((rectified_carrier_frequency(p) / w - 1.0).abs() < 1e-3);
    }

    #[test]
    fn ripple_is_ignored() {
        let (t, v) = sample(|x| x.sin() + 0.02 * (400.0 * x).sin(), 30.0, 30001);
        let p = crossing_period(&t, &v, 0.1).unwrap();
        assert!((p - 2.0 * PI).abs() < 0.01);
    }

    #[test]
    fn flat_signal_has_no_period() {
        let (t, v) = sample(|_| 1.0, 1.0, 10);
        assert_eq!(crossing_period(&t, &v, 0.1), None);
    }

    #[test]
    fn extrema_detection() {
        let v = [0.3, 0.4, 0.5, 0.45, 0.1, 0.05];
        assert_eq!(interior_extrema(&v, 0.02), vec![(2, Extremum::Max)]);
        let v = [0.6, 0.5, 0.45, 0.5, 0.62];
        assert_eq!(interior_extrema(&v, 0.02), vec![(2, Extremum::Min)]);
        let v = [0.6, 0.605, 0.6];
        assert!(interior_extrema(&v, 0.02).is_empty());
    }
}
