//! Feature detection on concurrence series: first zero crossing, dark
//! intervals, and post-death revivals.

/// A contiguous excursion above the revival threshold that follows a dead
/// (below zero-threshold) stretch.
#[derive(Debug, Clone, Copy)]
pub struct Revival {
    pub t_start: f64,
    pub t_peak: f64,
    pub peak: f64,
}

#[derive(Debug, Clone)]
pub struct SeriesAnalysis {
    /// First sample time at which the series is dead.
    pub first_zero: Option<f64>,
    pub revivals: Vec<Revival>,
    /// Maximal runs of consecutive dead samples, as (t_first, t_last).
    pub dark_intervals: Vec<(f64, f64)>,
}

impl SeriesAnalysis {
    /// Length of the first dark interval, 0 when none exists.
    pub fn first_dark_length(&self) -> f64 {
        self.dark_intervals.first().map(|(a, b)| b - a).unwrap_or(0.0)
    }
}

/// Walk a series once, collecting dead runs and revivals. A revival opens
/// when the value exceeds `revival_threshold` after at least one dead sample
/// and closes when it drops back to `revival_threshold` or below; another
/// dead stretch is required before the next revival can open.
pub fn analyze_series(
    times: &[f64],
    values: &[f64],
    zero_threshold: f64,
    revival_threshold: f64,
) -> SeriesAnalysis {
    assert_eq!(times.len(), values.len());
    let dead = |v: f64| v <= zero_threshold;

    let mut first_zero = None;
    let mut dark_intervals = Vec::new();
    let mut dark_run: Option<(f64, f64)> = None;
    let mut revivals = Vec::new();
    let mut seen_dead = false;
    let mut current: Option<Revival> = None;

    for (&t, &v) in times.iter().zip(values) {
        if dead(v) {
            first_zero.get_or_insert(t);
            match dark_run.as_mut() {
                None => dark_run = Some((t, t)),
                Some((_, end)) => *end = t,
            }
        } else if let Some(run) = dark_run.take() {
            dark_intervals.push(run);
        }

        match current.as_mut() {
            None => {
                if dead(v) {
                    seen_dead = true;
                } else if seen_dead && v > revival_threshold {
                    current = Some(Revival { t_start: t, t_peak: t, peak: v });
                }
            }
            Some(r) => {
                if v > r.peak {
                    r.peak = v;
                    r.t_peak = t;
                }
                if v <= revival_threshold {
                    revivals.push(current.take().unwrap());
                    seen_dead = dead(v);
                }
            }
        }
    }
    if let Some(run) = dark_run {
        dark_intervals.push(run);
    }
    if let Some(r) = current {
        revivals.push(r);
    }
    SeriesAnalysis { first_zero, revivals, dark_intervals }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(values: &[f64]) -> Vec<f64> {
        (0..values.len()).map(|i| i as f64).collect()
    }

    #[test]
    fn monotone_decay_has_no_revival() {
        let values: Vec<f64> = (0..50).map(|i| (-0.3 * i as f64).exp()).collect();
        let a = analyze_series(&grid(&values), &values, 1e-6, 1e-3);
        assert!(a.revivals.is_empty());
        assert_eq!(a.first_zero, None);
    }

    #[test]
    fn death_and_single_revival() {
        let mut values = vec![0.8, 0.4, 0.1, 0.0, 0.0, 0.0, 0.05, 0.2, 0.05, 0.0, 0.0];
        let a = analyze_series(&grid(&values), &values, 1e-6, 1e-3);
        assert_eq!(a.first_zero, Some(3.0));
        assert_eq!(a.revivals.len(), 1);
        assert_eq!(a.revivals[0].peak, 0.2);
        assert_eq!(a.revivals[0].t_peak, 7.0);
        assert_eq!(a.dark_intervals.len(), 2);
        assert_eq!(a.dark_intervals[0], (3.0, 5.0));

        // Oscillation above the revival threshold is a single revival.
        values = vec![0.5, 0.0, 0.0, 0.3, 0.2, 0.3, 0.0, 0.0];
        let a = analyze_series(&grid(&values), &values, 1e-6, 1e-3);
        assert_eq!(a.revivals.len(), 1);
    }

    #[test]
    fn two_separated_revivals() {
        let values = vec![0.9, 0.0, 0.0, 0.4, 0.0, 0.0, 0.3, 0.0];
        let a = analyze_series(&grid(&values), &values, 1e-6, 1e-3);
        assert_eq!(a.revivals.len(), 2);
        assert_eq!(a.dark_intervals.len(), 3);
        assert_eq!(a.first_dark_length(), 1.0);
    }

    #[test]
    fn small_bump_below_threshold_not_counted() {
        let values = vec![0.9, 0.0, 0.0, 5e-4, 0.0, 0.0];
        let a = analyze_series(&grid(&values), &values, 1e-6, 1e-3);
        assert!(a.revivals.is_empty());
    }

    #[test]
    fn trailing_dark_interval_closed_at_series_end() {
        let values = vec![0.9, 0.5, 0.0, 0.0, 0.0];
        let a = analyze_series(&grid(&values), &values, 1e-6, 1e-3);
        assert_eq!(a.dark_intervals, vec![(2.0, 4.0)]);
    }
}
