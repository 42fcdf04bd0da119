//! Covariance matrix adaptation evolution strategy with an ask/tell loop.
//!
//! Follows the standard `(mu/mu_w, lambda)` formulation: weighted
//! recombination of the best half, cumulative step-size adaptation and rank-one
//! plus rank-mu covariance updates. Fitness is maximized.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{identity, mat_vec, norm, symmetric_eigen};
use crate::scalar::Scalar;

pub const DEFAULT_SIGMA: f64 = 0.5;

/// `4 + floor(3 ln n)`.
pub fn population_size(dimension: usize) -> usize {
    4 + (3.0 * (dimension as f64).ln()).floor() as usize
}

#[derive(Clone, Debug)]
pub struct CmaEs<T> {
    n: usize,
    lambda: usize,
    mu: usize,
    weights: Vec<T>,
    mueff: T,
    cc: T,
    cs: T,
    c1: T,
    cmu: T,
    damps: T,
    chi_n: T,

    mean: Vec<T>,
    sigma: T,
    cov: Vec<T>,
    pc: Vec<T>,
    ps: Vec<T>,
    /// Eigenvectors of `cov`, column-wise.
    basis: Vec<T>,
    /// Square roots of the eigenvalues of `cov`.
    scales: Vec<T>,
    /// `cov^(-1/2)`.
    inv_sqrt: Vec<T>,
    eigen_evaluations: usize,

    generation: usize,
    evaluations: usize,
    rng: ChaCha8Rng,
}

impl<T: Scalar> CmaEs<T> {
    /// Mean at the origin, step size 0.5, identity covariance.
    pub fn new(dimension: usize, seed: u64) -> Result<Self> {
        Self::with_start(vec![T::zero(); dimension], T::of(DEFAULT_SIGMA), seed)
    }

    pub fn with_start(mean: Vec<T>, sigma: T, seed: u64) -> Result<Self> {
        let n = mean.len();
        if n == 0 {
            return Err(Error::InvalidDimension("optimizer dimension must be at least 1".into()));
        }
        if !sigma.is_finite() || sigma <= T::zero() {
            return Err(Error::Numerical(format!("initial step size {sigma} is not positive")));
        }
        let lambda = population_size(n);
        let mu = lambda / 2;

        let raw: Vec<f64> = (1..=mu)
            .map(|i| ((lambda as f64 + 1.0) / 2.0).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let mueff = 1.0 / w.iter().map(|x| x * x).sum::<f64>();

        let nf = n as f64;
        let cc = (4.0 + mueff / nf) / (nf + 4.0 + 2.0 * mueff / nf);
        let cs = (mueff + 2.0) / (nf + mueff + 5.0);
        let c1 = 2.0 / ((nf + 1.3).powi(2) + mueff);
        let cmu = (1.0 - c1).min(2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nf + 2.0).powi(2) + mueff));
        let damps = 1.0 + 2.0 * (((mueff - 1.0) / (nf + 1.0)).sqrt() - 1.0).max(0.0) + cs;
        let chi_n = nf.sqrt() * (1.0 - 1.0 / (4.0 * nf) + 1.0 / (21.0 * nf * nf));

        Ok(CmaEs {
            n,
            lambda,
            mu,
            weights: w.into_iter().map(T::of).collect(),
            mueff: T::of(mueff),
            cc: T::of(cc),
            cs: T::of(cs),
            c1: T::of(c1),
            cmu: T::of(cmu),
            damps: T::of(damps),
            chi_n: T::of(chi_n),
            mean,
            sigma,
            cov: identity(n),
            pc: vec![T::zero(); n],
            ps: vec![T::zero(); n],
            basis: identity(n),
            scales: vec![T::one(); n],
            inv_sqrt: identity(n),
            eigen_evaluations: 0,
            generation: 0,
            evaluations: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn covariance(&self) -> &[T] {
        &self.cov
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Draws `lambda` candidates `mean + sigma * B D z` with `z ~ N(0, I)`.
    pub fn ask(&mut self) -> Result<Vec<Vec<T>>> {
        self.refresh_eigen()?;
        let n = self.n;
        let mut batch = Vec::with_capacity(self.lambda);
        for _ in 0..self.lambda {
            let scaled: Vec<T> = (0..n)
                .map(|k| {
                    let z: f64 = StandardNormal.sample(&mut self.rng);
                    self.scales[k] * T::of(z)
                })
                .collect();
            let y = mat_vec(&self.basis, &scaled);
            batch.push(self.mean.iter().zip(&y).map(|(&m, &yk)| m + self.sigma * yk).collect());
        }
        Ok(batch)
    }

    /// Updates the search distribution from one evaluated batch, higher
    /// fitness being better.
    pub fn tell(&mut self, candidates: &[Vec<T>], fitness: &[T]) -> Result<()> {
        let n = self.n;
        if candidates.len() != self.lambda || fitness.len() != self.lambda {
            return Err(Error::BatchMismatch(format!(
                "expected {} candidates and fitness values, got {} and {}",
                self.lambda,
                candidates.len(),
                fitness.len()
            )));
        }
        if let Some(c) = candidates.iter().find(|c| c.len() != n) {
            return Err(Error::BatchMismatch(format!(
                "candidate of length {} in a {n}-dimensional search",
                c.len()
            )));
        }
        if fitness.iter().any(|f| !f.is_finite()) {
            return Err(Error::Numerical("non-finite fitness value".into()));
        }

        let mut ranking: Vec<usize> = (0..self.lambda).collect();
        ranking.sort_by(|&a, &b| fitness[b].partial_cmp(&fitness[a]).expect("finite fitness"));

        let old_mean = self.mean.clone();
        let steps: Vec<Vec<T>> = ranking[..self.mu]
            .iter()
            .map(|&k| {
                candidates[k]
                    .iter()
                    .zip(&old_mean)
                    .map(|(&x, &m)| (x - m) / self.sigma)
                    .collect()
            })
            .collect();
        let mut y_w = vec![T::zero(); n];
        for (w, y) in self.weights.iter().zip(&steps) {
            for (acc, &yk) in y_w.iter_mut().zip(y) {
                *acc += *w * yk;
            }
        }
        for ((m, &om), &yk) in self.mean.iter_mut().zip(&old_mean).zip(&y_w) {
            *m = om + self.sigma * yk;
        }

        let two = T::of(2.0);
        let cs_norm = (self.cs * (two - self.cs) * self.mueff).sqrt();
        let whitened = mat_vec(&self.inv_sqrt, &y_w);
        for (p, &z) in self.ps.iter_mut().zip(&whitened) {
            *p = (T::one() - self.cs) * *p + cs_norm * z;
        }
        let ps_norm = norm(&self.ps);
        let decay = T::one() - (T::one() - self.cs).powi(2 * (self.generation as i32 + 1));
        let hsig = ps_norm / decay.sqrt() / self.chi_n < T::of(1.4) + two / T::of(n as f64 + 1.0);
        let hsig_f = if hsig { T::one() } else { T::zero() };

        let cc_norm = (self.cc * (two - self.cc) * self.mueff).sqrt();
        for (p, &yk) in self.pc.iter_mut().zip(&y_w) {
            *p = (T::one() - self.cc) * *p + hsig_f * cc_norm * yk;
        }

        let keep = T::one() - self.c1 - self.cmu;
        let stall = (T::one() - hsig_f) * self.cc * (two - self.cc);
        for r in 0..n {
            for c in r..n {
                let rank_mu: T = self.weights.iter().zip(&steps).map(|(&w, y)| w * y[r] * y[c]).sum();
                let old = self.cov[r * n + c];
                let updated = keep * old + self.c1 * (self.pc[r] * self.pc[c] + stall * old) + self.cmu * rank_mu;
                self.cov[r * n + c] = updated;
                self.cov[c * n + r] = updated;
            }
        }

        let exponent = ((self.cs / self.damps) * (ps_norm / self.chi_n - T::one())).min(T::one());
        self.sigma *= exponent.exp();
        if !self.sigma.is_finite() || self.sigma <= T::zero() {
            return Err(Error::Numerical(format!("step size degenerated to {}", self.sigma)));
        }

        self.generation += 1;
        self.evaluations += self.lambda;
        Ok(())
    }

    fn refresh_eigen(&mut self) -> Result<()> {
        let n = self.n as f64;
        let lag = self.lambda as f64 / (self.c1 + self.cmu).to_f64_lossy() / n / 10.0;
        if self.generation > 0 && ((self.evaluations - self.eigen_evaluations) as f64) <= lag {
            return Ok(());
        }
        self.eigen_evaluations = self.evaluations;
        let (values, vectors) = symmetric_eigen(&self.cov, self.n)?;
        if let Some(v) = values.iter().find(|&&v| v.is_nan() || v <= T::zero()) {
            return Err(Error::Numerical(format!(
                "covariance lost positive definiteness (eigenvalue {v})"
            )));
        }
        self.scales = values.iter().map(|v| v.sqrt()).collect();
        let nn = self.n;
        let mut inv = vec![T::zero(); nn * nn];
        for r in 0..nn {
            for c in 0..nn {
                inv[r * nn + c] = (0..nn)
                    .map(|k| vectors[r * nn + k] * vectors[c * nn + k] / self.scales[k])
                    .sum();
            }
        }
        self.basis = vectors;
        self.inv_sqrt = inv;
        Ok(())
    }
}
