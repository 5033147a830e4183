//! Covariance Matrix Adaptation Evolution Strategy (rank-one plus rank-mu
//! covariance update with cumulative step-size adaptation) using the
//! default strategy parameters.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Smallest admissible eigenvalue ratio of the covariance.
const MIN_CONDITION_RATIO: f64 = 1e-14;

/// Default strategy parameters for a given dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyParams {
    pub lambda: usize,
    pub mu: usize,
    pub weights: Vec<f64>,
    pub mu_eff: f64,
    pub c_sigma: f64,
    pub d_sigma: f64,
    pub c_c: f64,
    pub c1: f64,
    pub c_mu: f64,
    pub chi_n: f64,
}

impl StrategyParams {
    pub fn new(dim: usize) -> Self {
        let n = dim as f64;
        let lambda = 4 + (3.0 * n.ln()).floor() as usize;
        let mu = lambda / 2;
        let raw: Vec<f64> = (1..=mu)
            .map(|i| (mu as f64 + 0.5).ln() - (i as f64).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
        let c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        let d_sigma = 1.0 + 2.0 * (((mu_eff - 1.0) / (n + 1.0)).sqrt() - 1.0).max(0.0) + c_sigma;
        let c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        let c1 = 2.0 / ((n + 1.3).powi(2) + mu_eff);
        let c_mu =
            (1.0 - c1).min(2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0).powi(2) + mu_eff));
        let chi_n = n.sqrt() * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
        Self {
            lambda,
            mu,
            weights,
            mu_eff,
            c_sigma,
            d_sigma,
            c_c,
            c1,
            c_mu,
            chi_n,
        }
    }
}

/// Optimizer state; advance it with [`CmaState::ask`] and [`CmaState::tell`].
#[derive(Debug, Clone)]
pub struct CmaState {
    params: StrategyParams,
    mean: DVector<f64>,
    sigma: f64,
    cov: DMatrix<f64>,
    /// Eigenvectors of `cov`.
    basis: DMatrix<f64>,
    /// Square roots of the eigenvalues of `cov`.
    scales: DVector<f64>,
    p_sigma: DVector<f64>,
    p_c: DVector<f64>,
    generation: usize,
    best: Option<(Vec<f64>, f64)>,
    rejected_evaluations: usize,
    reconditions: usize,
}

impl CmaState {
    pub fn new(x0: &[f64], sigma0: f64) -> Result<Self> {
        if x0.is_empty() {
            return Err(Error::Empty("initial point"));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("initial point"));
        }
        if !(sigma0 > 0.0 && sigma0.is_finite()) {
            return Err(Error::OutOfRange {
                what: "sigma0",
                value: sigma0,
            });
        }
        let n = x0.len();
        Ok(Self {
            params: StrategyParams::new(n),
            mean: DVector::from_column_slice(x0),
            sigma: sigma0,
            cov: DMatrix::identity(n, n),
            basis: DMatrix::identity(n, n),
            scales: DVector::from_element(n, 1.0),
            p_sigma: DVector::zeros(n),
            p_c: DVector::zeros(n),
            generation: 0,
            best: None,
            rejected_evaluations: 0,
            reconditions: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn params(&self) -> &StrategyParams {
        &self.params
    }

    pub fn lambda(&self) -> usize {
        self.params.lambda
    }

    pub fn mean(&self) -> &[f64] {
        self.mean.as_slice()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Best candidate seen by any `tell` so far.
    pub fn best(&self) -> Option<(&[f64], f64)> {
        self.best.as_ref().map(|(x, f)| (x.as_slice(), *f))
    }

    /// Candidates dropped for non-finite fitness.
    pub fn rejected_evaluations(&self) -> usize {
        self.rejected_evaluations
    }

    /// Times the covariance had to be regularized.
    pub fn reconditions(&self) -> usize {
        self.reconditions
    }

    /// Ratio of largest to smallest covariance eigenvalue.
    pub fn condition_number(&self) -> f64 {
        let max = self.scales.max();
        let min = self.scales.min();
        (max / min).powi(2)
    }

    /// `lambda` samples from `N(mean, sigma^2 C)`.
    pub fn ask(&self, rng: &mut RngStream) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..self.params.lambda)
            .map(|_| {
                let z = DVector::from_fn(n, |i, _| self.scales[i] * rng.gaussian(1.0));
                let y = &self.basis * z;
                (&self.mean + self.sigma * y).as_slice().to_vec()
            })
            .collect()
    }

    /// Updates the distribution from evaluated candidates.
    ///
    /// Non-finite fitnesses are dropped from recombination and counted.
    pub fn tell(&mut self, candidates: &[Vec<f64>], fitnesses: &[f64]) -> Result<()> {
        if candidates.len() != fitnesses.len() {
            return Err(Error::LengthMismatch {
                what: "fitness values",
                expected: candidates.len(),
                actual: fitnesses.len(),
            });
        }
        let n = self.dim();
        if let Some(c) = candidates.iter().find(|c| c.len() != n) {
            return Err(Error::LengthMismatch {
                what: "candidate",
                expected: n,
                actual: c.len(),
            });
        }
        let mut order: Vec<usize> = (0..candidates.len())
            .filter(|&i| fitnesses[i].is_finite())
            .collect();
        self.rejected_evaluations += candidates.len() - order.len();
        if order.is_empty() {
            return Err(Error::GenerationRejected);
        }
        order.sort_by(|&a, &b| fitnesses[a].total_cmp(&fitnesses[b]));

        let top = order[0];
        if self.best.as_ref().is_none_or(|(_, f)| fitnesses[top] < *f) {
            self.best = Some((candidates[top].clone(), fitnesses[top]));
        }

        let k = order.len().min(self.params.mu);
        let w_total: f64 = self.params.weights[..k].iter().sum();
        let weights: Vec<f64> = self.params.weights[..k]
            .iter()
            .map(|w| w / w_total)
            .collect();
        let mu_eff = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();

        let steps: Vec<DVector<f64>> = order[..k]
            .iter()
            .map(|&i| (DVector::from_column_slice(&candidates[i]) - &self.mean) / self.sigma)
            .collect();
        let mut y_w = DVector::zeros(n);
        for (w, y) in weights.iter().zip(&steps) {
            y_w.axpy(*w, y, 1.0);
        }
        self.mean.axpy(self.sigma, &y_w, 1.0);

        let p = &self.params;
        let inv_sqrt = &self.basis
            * DMatrix::from_diagonal(&self.scales.map(|d| 1.0 / d))
            * self.basis.transpose();
        self.p_sigma = (1.0 - p.c_sigma) * &self.p_sigma
            + (p.c_sigma * (2.0 - p.c_sigma) * mu_eff).sqrt() * (inv_sqrt * &y_w);
        let g = (self.generation + 1) as f64;
        let ps_norm = self.p_sigma.norm();
        let h_sigma = ps_norm / (1.0 - (1.0 - p.c_sigma).powf(2.0 * g)).sqrt()
            < (1.4 + 2.0 / (n as f64 + 1.0)) * p.chi_n;
        let h = if h_sigma { 1.0 } else { 0.0 };
        self.p_c = (1.0 - p.c_c) * &self.p_c + h * (p.c_c * (2.0 - p.c_c) * mu_eff).sqrt() * &y_w;
        let delta = (1.0 - h) * p.c_c * (2.0 - p.c_c);

        let mut rank_mu = DMatrix::zeros(n, n);
        for (w, y) in weights.iter().zip(&steps) {
            rank_mu.ger(*w, y, y, 1.0);
        }
        let old = self.cov.clone();
        self.cov = (1.0 - p.c1 - p.c_mu) * &old
            + p.c1 * (&self.p_c * self.p_c.transpose() + delta * &old)
            + p.c_mu * rank_mu;

        self.sigma *= ((p.c_sigma / p.d_sigma) * (ps_norm / p.chi_n - 1.0)).exp();
        self.generation += 1;
        self.refresh_decomposition();
        Ok(())
    }

    fn refresh_decomposition(&mut self) {
        let n = self.dim();
        self.cov = 0.5 * (&self.cov + self.cov.transpose());
        let mut eig = SymmetricEigen::new(self.cov.clone());
        let max = eig.eigenvalues.max();
        let min = eig.eigenvalues.min();
        if !(min > 0.0 && min / max >= MIN_CONDITION_RATIO) {
            let floor = max.abs().max(f64::MIN_POSITIVE) * MIN_CONDITION_RATIO;
            self.cov += DMatrix::identity(n, n) * (floor - min);
            self.cov = 0.5 * (&self.cov + self.cov.transpose());
            eig = SymmetricEigen::new(self.cov.clone());
            self.reconditions += 1;
        }
        self.scales = eig.eigenvalues.map(|v| v.max(f64::MIN_POSITIVE).sqrt());
        self.basis = eig.eigenvectors;
    }
}

/// One generation of an optimization trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    /// Best fitness seen up to and including this generation.
    pub best_fitness: f64,
    /// Mean over the finite fitnesses of this generation.
    pub mean_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub best_params: Vec<f64>,
    pub best_fitness: f64,
    pub history: Vec<GenerationRecord>,
    pub evaluations: usize,
    pub rejected_evaluations: usize,
}

/// Ask/tell loop where `evaluate(generation, candidates)` scores a whole
/// population at once.
pub fn optimize_batch<F>(
    mut evaluate: F,
    x0: &[f64],
    sigma0: f64,
    max_generations: usize,
    seed: u64,
) -> Result<OptimizeResult>
where
    F: FnMut(usize, &[Vec<f64>]) -> Result<Vec<f64>>,
{
    if max_generations == 0 {
        return Err(Error::OutOfRange {
            what: "max_generations",
            value: 0.0,
        });
    }
    let mut state = CmaState::new(x0, sigma0)?;
    let mut rng = RngStream::from_seed(seed);
    let mut history = Vec::with_capacity(max_generations);
    let mut evaluations = 0;
    for generation in 0..max_generations {
        let candidates = state.ask(&mut rng);
        let fitnesses = evaluate(generation, &candidates)?;
        evaluations += candidates.len();
        state.tell(&candidates, &fitnesses)?;
        let finite: Vec<f64> = fitnesses
            .iter()
            .copied()
            .filter(|f| f.is_finite())
            .collect();
        history.push(GenerationRecord {
            generation,
            best_fitness: state.best().map(|(_, f)| f).unwrap_or(f64::INFINITY),
            mean_fitness: finite.iter().sum::<f64>() / finite.len() as f64,
        });
    }
    let (best_params, best_fitness) = state
        .best()
        .map(|(x, f)| (x.to_vec(), f))
        .ok_or(Error::GenerationRejected)?;
    Ok(OptimizeResult {
        best_params,
        best_fitness,
        history,
        evaluations,
        rejected_evaluations: state.rejected_evaluations(),
    })
}

/// Minimizes `loss` starting from `x0` with step size `sigma0`.
pub fn optimize<F>(
    mut loss: F,
    x0: &[f64],
    sigma0: f64,
    max_generations: usize,
    seed: u64,
) -> Result<OptimizeResult>
where
    F: FnMut(&[f64]) -> f64,
{
    optimize_batch(
        |_, candidates| Ok(candidates.iter().map(|c| loss(c)).collect()),
        x0,
        sigma0,
        max_generations,
        seed,
    )
}
