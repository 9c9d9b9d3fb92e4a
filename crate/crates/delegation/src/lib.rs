//! File formats, experiment harnesses and the command-line front end for
//! [`delegation_core`].

pub mod cli;
pub mod evaluation;
pub mod io;
pub mod report;
pub mod sweep;

/// Independent seed for item `b` of stream `a`, so parallel work is reproducible
/// regardless of scheduling.
pub fn stream_seed(master: u64, a: u64, b: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(mix(master) ^ a) ^ b.rotate_left(32))
}

/// Sample mean with a normal-approximation 90% interval.
///
/// Empty input gives NaN throughout; a single value gives a zero-width interval.
pub fn mean_ci(xs: &[f64]) -> (f64, f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, mean, mean);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let half = 1.645 * var.sqrt() / n.sqrt();
    (mean, mean - half, mean + half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_differ() {
        let seeds = [stream_seed(1, 0, 0), stream_seed(1, 0, 1), stream_seed(1, 1, 0), stream_seed(2, 0, 0)];
        for i in 0..seeds.len() {
            for j in i + 1..seeds.len() {
                assert_ne!(seeds[i], seeds[j]);
            }
        }
        assert_eq!(stream_seed(7, 3, 9), stream_seed(7, 3, 9));
    }

    #[test]
    fn interval() {
        let (m, lo, hi) = mean_ci(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((hi - m - 1.645 / 3f64.sqrt()).abs() < 1e-12);
        assert!((m - lo - 1.645 / 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(mean_ci(&[4.0]), (4.0, 4.0, 4.0));
        assert!(mean_ci(&[]).0.is_nan());
    }
}
