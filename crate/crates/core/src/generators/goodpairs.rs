use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Monte-Carlo estimates for matched pairs landing in the right quarters.
///
/// With the positions `1..=2d` cut into quarters `Q1..Q4` of length `d/2`,
/// pair `(i, d+i)` for `i ≤ d/8` is good when `σ(i) ∈ Q1` and
/// `σ(d+i) ∈ Q3`; pair `(d/2+i, 3d/2+i)` is good when `σ(d/2+i) ∈ Q2` and
/// `σ(3d/2+i) ∈ Q4`. `f` and `f2` count the good pairs of each family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodPairStats {
    pub d: u32,
    pub samples: usize,
    pub seed: u64,
    /// Empirical probability that pair `i` of the first family is good.
    pub first_pair_probs: Vec<f64>,
    pub second_pair_probs: Vec<f64>,
    pub mean_f: f64,
    pub mean_f2: f64,
    pub sd_f: f64,
    pub sd_f2: f64,
    /// Fraction of samples with `f < d/1024`.
    pub tail_f: f64,
    pub tail_f2: f64,
}

/// Exact probability that a fixed pair is good: `(d/2)² / (2d(2d-1))`.
pub fn exact_pair_probability(d: u32) -> f64 {
    let d = d as f64;
    (d / 2.0) * (d / 2.0) / (2.0 * d * (2.0 * d - 1.0))
}

pub fn good_pair_stats(d: u32, samples: usize, seed: u64) -> Result<GoodPairStats> {
    if d == 0 || d % 8 != 0 {
        return Err(Error::BadDivisibility(d));
    }
    if samples == 0 {
        return Err(Error::PreconditionViolated(
            "at least one sample is required".into(),
        ));
    }
    let du = d as usize;
    let half = du / 2;
    let pairs = du / 8;
    let quarter = |pos: u32| ((pos as usize - 1) / half) + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sigma: Vec<u32> = (1..=2 * d).collect();
    let mut first = vec![0usize; pairs];
    let mut second = vec![0usize; pairs];
    let (mut f_vals, mut f2_vals) = (Vec::with_capacity(samples), Vec::with_capacity(samples));
    for _ in 0..samples {
        sigma.shuffle(&mut rng);
        let (mut f, mut f2) = (0usize, 0usize);
        for i in 0..pairs {
            if quarter(sigma[i]) == 1 && quarter(sigma[du + i]) == 3 {
                first[i] += 1;
                f += 1;
            }
            if quarter(sigma[half + i]) == 2 && quarter(sigma[3 * half + i]) == 4 {
                second[i] += 1;
                f2 += 1;
            }
        }
        f_vals.push(f as f64);
        f2_vals.push(f2 as f64);
    }
    let n = samples as f64;
    let probs = |c: Vec<usize>| c.into_iter().map(|k| k as f64 / n).collect::<Vec<_>>();
    let cutoff = d as f64 / 1024.0;
    let (mean_f, sd_f) = mean_sd(&f_vals);
    let (mean_f2, sd_f2) = mean_sd(&f2_vals);
    Ok(GoodPairStats {
        d,
        samples,
        seed,
        first_pair_probs: probs(first),
        second_pair_probs: probs(second),
        mean_f,
        mean_f2,
        sd_f,
        sd_f2,
        tail_f: f_vals.iter().filter(|&&f| f < cutoff).count() as f64 / n,
        tail_f2: f2_vals.iter().filter(|&&f| f < cutoff).count() as f64 / n,
    })
}

/// Mean and sample standard deviation.
fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
