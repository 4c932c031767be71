// SPDX-License-Identifier: MIT
//! Random linear-Gaussian structural equation models and missingness
//! injection.
//!
//! A model over `p` variables is `X_i = Σ_{r<i} A_ir X_r + ε_i` with
//! independent standard-normal noise, followed by adding a mean vector `μ`.
//! Edges are drawn independently in the strict lower triangle with
//! probability `E(N)/(p-1)`; coefficients are uniform on
//! `[-1,-0.1] ∪ [0.1,1]` and means are `N(0, 4)` (standard deviation 2).
//!
//! Missingness is driven by "driver" variables: every target of a driver is
//! masked in the rows where the driver falls strictly below its empirical
//! `r`-quantile (nearest-rank). Under MNAR the drivers are latent, under MAR
//! they are observed and never masked, and under MCAR they are independent
//! noise.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use nalgebra::DMatrix;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Normal, StandardNormal};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::system::{CausalSystem, Role};

/// Generation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub p: usize,
    pub expected_neighbors: f64,
    pub n_latent_confounders: RangeInclusive<usize>,
    pub n_missingness_drivers: RangeInclusive<usize>,
    pub vars_per_driver: RangeInclusive<usize>,
    /// Range of the removal quantile `r`, drawn once per driver.
    pub r_range: RangeInclusive<f64>,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            p: 10,
            expected_neighbors: 2.0,
            n_latent_confounders: 0..=4,
            n_missingness_drivers: 1..=2,
            vars_per_driver: 3..=6,
            r_range: 0.1..=0.5,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::Config(format!("p must be at least 2, got {}", self.p)));
        }
        let max_en = (self.p - 1) as f64;
        if !(self.expected_neighbors >= 0.0 && self.expected_neighbors <= max_en) {
            return Err(Error::Config(format!(
                "expected_neighbors must lie in [0, {max_en}], got {}",
                self.expected_neighbors
            )));
        }
        for (name, r) in [
            ("n_latent_confounders", &self.n_latent_confounders),
            ("n_missingness_drivers", &self.n_missingness_drivers),
            ("vars_per_driver", &self.vars_per_driver),
        ] {
            if r.is_empty() {
                return Err(Error::Config(format!("{name} range is empty")));
            }
        }
        if *self.vars_per_driver.start() == 0 {
            return Err(Error::Config("every driver needs at least one target".into()));
        }
        let (lo, hi) = (*self.r_range.start(), *self.r_range.end());
        if !(0.0 <= lo && lo <= hi && hi < 1.0) {
            return Err(Error::Config(format!("r_range must satisfy 0 <= lo <= hi < 1, got [{lo}, {hi}]")));
        }
        Ok(())
    }

    /// Checks that the worst-case draw of latents and drivers still leaves
    /// enough observables for the smallest target set.
    pub fn validate_for(&self, mechanism: Mechanism) -> Result<()> {
        self.validate()?;
        let drivers_removed = match mechanism {
            Mechanism::Mcar => 0,
            _ => *self.n_missingness_drivers.end(),
        };
        let needed = self.n_latent_confounders.end() + drivers_removed + self.vars_per_driver.start();
        if self.p < needed {
            return Err(Error::Config(format!(
                "p = {} too small: up to {} latents and {} drivers leave fewer than {} targets",
                self.p,
                self.n_latent_confounders.end(),
                drivers_removed,
                self.vars_per_driver.start()
            )));
        }
        Ok(())
    }

    /// ChaCha8 generator seeded from `seed`.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Independent generator stream `stream` under a master seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Linear-Gaussian SEM with strictly lower-triangular coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SemModel {
    p: usize,
    // coef[i * p + r] is A_ir, the weight of X_r in the equation for X_i.
    coef: Vec<f64>,
    mu: Vec<f64>,
}

impl SemModel {
    pub fn new(p: usize, coef: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        if coef.len() != p * p || mu.len() != p {
            return Err(Error::InvalidArgument(format!("SEM of size {p} needs {} coefficients", p * p)));
        }
        for i in 0..p {
            for r in i..p {
                if coef[i * p + r] != 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "coefficient A[{i}][{r}] must be zero (strictly lower triangular)"
                    )));
                }
            }
        }
        if coef.iter().chain(&mu).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("SEM parameters must be finite".into()));
        }
        Ok(SemModel { p, coef, mu })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// `A_ir`, the coefficient of `X_r` in the equation of `X_i`.
    pub fn coefficient(&self, i: usize, r: usize) -> f64 {
        self.coef[i * self.p + r]
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn edge_count(&self) -> usize {
        self.coef.iter().filter(|&&c| c != 0.0).count()
    }

    /// `r -> i` for every nonzero `A_ir`.
    pub fn dag(&self) -> Dag {
        let edges: Vec<(usize, usize)> = (0..self.p)
            .flat_map(|i| (0..i).filter(move |&r| self.coefficient(i, r) != 0.0).map(move |r| (r, i)))
            .collect();
        Dag::from_edges(self.p, &edges).expect("lower-triangular coefficients form a DAG")
    }

    fn children_count(&self, r: usize) -> usize {
        (r + 1..self.p).filter(|&i| self.coefficient(i, r) != 0.0).count()
    }
}

/// Draws a random SEM.
pub fn generate_dag<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Result<SemModel> {
    cfg.validate()?;
    let p = cfg.p;
    let edge = Bernoulli::new(cfg.expected_neighbors / (p - 1) as f64)
        .map_err(|e| Error::Config(format!("edge probability: {e}")))?;
    let mut coef = vec![0.0; p * p];
    for i in 1..p {
        for r in 0..i {
            if edge.sample(rng) {
                let magnitude: f64 = rng.random_range(0.1..=1.0);
                coef[i * p + r] = if rng.random_bool(0.5) { magnitude } else { -magnitude };
            }
        }
    }
    let mean_dist = Normal::new(0.0, 2.0).expect("valid normal");
    let mu = (0..p).map(|_| mean_dist.sample(rng)).collect();
    Ok(SemModel { p, coef, mu })
}

/// `(I - A)^{-1}` by forward substitution on the unit lower-triangular system.
fn total_effects(m: &SemModel) -> DMatrix<f64> {
    let p = m.p;
    let mut b = DMatrix::<f64>::identity(p, p);
    for c in 0..p {
        for i in c + 1..p {
            let s: f64 = (c..i).map(|r| m.coefficient(i, r) * b[(r, c)]).sum();
            b[(i, c)] = s;
        }
    }
    b
}

/// `Σ = (I - A)^{-1} (I - A)^{-T}`.
pub fn analytic_cov(m: &SemModel) -> DMatrix<f64> {
    let b = total_effects(m);
    &b * b.transpose()
}

/// Draws `n` complete rows from the model.
pub fn sample_sem<R: Rng + ?Sized>(m: &SemModel, n: usize, rng: &mut R) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be positive".into()));
    }
    let p = m.p;
    let mut values = vec![0.0; n * p];
    for row in values.chunks_exact_mut(p) {
        for i in 0..p {
            let eps: f64 = StandardNormal.sample(rng);
            let s: f64 = (0..i).map(|r| m.coefficient(i, r) * row[r]).sum();
            row[i] = s + eps;
        }
        for (x, mu) in row.iter_mut().zip(&m.mu) {
            *x += mu;
        }
    }
    Dataset::complete(n, p, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "lowercase"))]
pub enum Mechanism {
    /// Drivers are latent variables of the model.
    Mnar,
    /// Drivers are fully observed variables of the model.
    Mar,
    /// Drivers are noise independent of the model.
    Mcar,
}

/// One missingness driver and the variables it masks.
#[derive(Debug, Clone, PartialEq)]
pub struct Driver {
    /// Model variable driving the mask; `None` for independent noise.
    pub source: Option<usize>,
    /// Model variables masked by this driver.
    pub targets: Vec<usize>,
    /// Removal quantile `r`.
    pub quantile: f64,
}

/// The random structural choices of a missingness injection, drawn once and
/// reusable across sample sizes of the same model.
#[derive(Debug, Clone, PartialEq)]
pub struct MissingnessPlan {
    pub mechanism: Mechanism,
    pub p: usize,
    /// Latent confounders removed from the data.
    pub confounders: Vec<usize>,
    pub drivers: Vec<Driver>,
}

fn sample_from<R: Rng + ?Sized>(rng: &mut R, pool: &[usize], k: usize) -> Vec<usize> {
    let k = k.min(pool.len());
    let mut picked: Vec<usize> = index::sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect();
    picked.sort_unstable();
    picked
}

fn without(pool: &[usize], removed: &[usize]) -> Vec<usize> {
    pool.iter().copied().filter(|v| !removed.contains(v)).collect()
}

impl MissingnessPlan {
    pub fn draw<R: Rng + ?Sized>(
        mechanism: Mechanism,
        m: &SemModel,
        cfg: &GenConfig,
        rng: &mut R,
    ) -> Result<Self> {
        cfg.validate_for(mechanism)?;
        if cfg.p != m.p {
            return Err(Error::Config(format!("config p = {} but model has {} variables", cfg.p, m.p)));
        }
        let all: Vec<usize> = (0..m.p).collect();
        let n_conf = rng.random_range(cfg.n_latent_confounders.clone());
        let confounders = match mechanism {
            // uniform over confounders with at least two children, i.e. rejection
            // sampling of the unrestricted draw
            Mechanism::Mar => {
                let eligible: Vec<usize> = all.iter().copied().filter(|&v| m.children_count(v) >= 2).collect();
                sample_from(rng, &eligible, n_conf)
            }
            _ => sample_from(rng, &all, n_conf),
        };
        let rest = without(&all, &confounders);
        let n_drivers = rng.random_range(cfg.n_missingness_drivers.clone());
        let (sources, targets_pool): (Vec<Option<usize>>, Vec<usize>) = match mechanism {
            Mechanism::Mnar | Mechanism::Mar => {
                let picked = sample_from(rng, &rest, n_drivers);
                let pool = without(&rest, &picked);
                (picked.into_iter().map(Some).collect(), pool)
            }
            Mechanism::Mcar => (vec![None; n_drivers], rest),
        };
        let drivers = sources
            .into_iter()
            .map(|source| {
                let k = rng.random_range(cfg.vars_per_driver.clone());
                let targets = sample_from(rng, &targets_pool, k);
                let quantile = rng.random_range(cfg.r_range.clone());
                Driver { source, targets, quantile }
            })
            .collect();
        Ok(MissingnessPlan { mechanism, p: m.p, confounders, drivers })
    }

    /// Model variables removed from the returned dataset.
    pub fn hidden_variables(&self) -> Vec<usize> {
        let mut hidden = self.confounders.clone();
        if self.mechanism == Mechanism::Mnar {
            hidden.extend(self.drivers.iter().filter_map(|d| d.source));
        }
        hidden.sort_unstable();
        hidden
    }

    /// Model variables kept as data columns, in ascending order.
    pub fn observed_variables(&self) -> Vec<usize> {
        without(&(0..self.p).collect::<Vec<_>>(), &self.hidden_variables())
    }

    /// Ground-truth system: the model DAG plus one indicator per driver
    /// (a childless child of its driver). MCAR drivers become extra latent
    /// roots with no edge into the model.
    pub fn system(&self, m: &SemModel) -> CausalSystem {
        let p = self.p;
        let per_driver = if self.mechanism == Mechanism::Mcar { 2 } else { 1 };
        let n = p + per_driver * self.drivers.len();
        let mut roles = vec![Role::Observed; n];
        for v in self.hidden_variables() {
            roles[v] = Role::Latent;
        }
        let mut extra_edges = Vec::new();
        let mut indicators = vec![Vec::new(); n];
        for (k, d) in self.drivers.iter().enumerate() {
            let (source, indicator) = match d.source {
                Some(s) => (s, p + k),
                None => {
                    let u = p + 2 * k;
                    roles[u] = Role::Latent;
                    (u, u + 1)
                }
            };
            roles[indicator] = Role::MissingnessIndicator;
            extra_edges.push((source, indicator));
            for &t in &d.targets {
                indicators[t].push(indicator);
            }
        }
        let dag = m.dag().extended(n - p, &extra_edges).expect("indicators are sinks");
        CausalSystem::new(dag, roles, indicators).expect("plan yields a consistent system")
    }

    /// Masks `data` (complete, one column per model variable), drops hidden
    /// columns and returns the masked data with its ground-truth system.
    pub fn apply<R: Rng + ?Sized>(
        &self,
        m: &SemModel,
        data: &Dataset,
        rng: &mut R,
    ) -> Result<(Dataset, CausalSystem)> {
        if data.n_cols() != self.p || data.has_missing() {
            return Err(Error::InvalidArgument(format!(
                "expected complete data with {} columns",
                self.p
            )));
        }
        let n = data.n_rows();
        let mut hidden = vec![false; n * self.p];
        for d in &self.drivers {
            let driver: Vec<f64> = match d.source {
                Some(s) => (0..n).map(|r| data.observed_value(r, s)).collect(),
                None => (0..n).map(|_| StandardNormal.sample(rng)).collect(),
            };
            let Some(threshold) = nearest_rank_quantile(&driver, d.quantile) else {
                continue;
            };
            for (r, &x) in driver.iter().enumerate() {
                if x < threshold {
                    for &t in &d.targets {
                        hidden[r * self.p + t] = true;
                    }
                }
            }
        }
        let masked = data.with_mask(&hidden);
        Ok((masked.select_columns(&self.observed_variables()), self.system(m)))
    }
}

/// Empirical `r`-quantile by the nearest-rank method: the `⌈r·n⌉`-th smallest
/// value, or `None` when that rank is zero.
pub fn nearest_rank_quantile(values: &[f64], r: f64) -> Option<f64> {
    let rank = libm::ceil(r * values.len() as f64) as usize;
    if rank == 0 || values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Some(sorted[rank.min(sorted.len()) - 1])
}

/// Latent drivers: values below a driver's quantile mask its targets.
pub fn inject_mnar<R: Rng + ?Sized>(
    m: &SemModel,
    data: &Dataset,
    cfg: &GenConfig,
    rng: &mut R,
) -> Result<(Dataset, CausalSystem)> {
    MissingnessPlan::draw(Mechanism::Mnar, m, cfg, rng)?.apply(m, data, rng)
}

/// Observed, never-masked drivers; latent confounders need two children.
pub fn inject_mar<R: Rng + ?Sized>(
    m: &SemModel,
    data: &Dataset,
    cfg: &GenConfig,
    rng: &mut R,
) -> Result<(Dataset, CausalSystem)> {
    MissingnessPlan::draw(Mechanism::Mar, m, cfg, rng)?.apply(m, data, rng)
}

/// Drivers independent of every model variable.
pub fn inject_mcar<R: Rng + ?Sized>(
    m: &SemModel,
    data: &Dataset,
    cfg: &GenConfig,
    rng: &mut R,
) -> Result<(Dataset, CausalSystem)> {
    MissingnessPlan::draw(Mechanism::Mcar, m, cfg, rng)?.apply(m, data, rng)
}
