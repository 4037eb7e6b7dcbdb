//! Linear-contextual agents built on one incremental weighted ridge
//! regression: vanilla LinTS, robust LinTS (leverage-weighted updates with an
//! inflated sampling scale), LinUCB and the CW-OFUL baseline.
//!
//! The design matrix `B = I + sum_s w_s x_s x_s^T` is tracked three ways: the
//! matrix itself, its lower Cholesky factor (used for sampling and for
//! `||x||_{B^-1}`), and its inverse (used for `mu_hat = B^-1 f`). Each update is
//! `O(d^2)`.

use super::{argmax_first, CorruptionKnowledge};
use crate::env::{ContextSet, LinearEnvSpec};
use crate::linalg::{
    cholesky_rank_one_update, dot, norm, sherman_morrison_update, solve_lower,
    solve_lower_transpose, Matrix, NotPositiveDefinite,
};
use crate::rng::RngStream;

/// Weight cap used when the declared corruption level is zero.
pub const GAMMA_MAX: f64 = 1e6;

/// Default confidence parameter.
pub const DEFAULT_DELTA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedRidgeState {
    b: Matrix,
    b_chol: Matrix,
    b_inv: Matrix,
    f: Vec<f64>,
    mu_hat: Vec<f64>,
    /// `f64::INFINITY` disables weighting entirely.
    gamma: f64,
}

impl WeightedRidgeState {
    pub fn new(d: usize, gamma: f64) -> Self {
        assert!(d >= 1);
        assert!(gamma > 0.0, "gamma must be positive, got {gamma}");
        Self {
            b: Matrix::identity(d),
            b_chol: Matrix::identity(d),
            b_inv: Matrix::identity(d),
            f: vec![0.0; d],
            mu_hat: vec![0.0; d],
            gamma,
        }
    }

    /// Plain ridge regression: every sample gets weight one.
    pub fn unweighted(d: usize) -> Self {
        Self::new(d, f64::INFINITY)
    }

    pub fn dim(&self) -> usize {
        self.f.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn b_chol(&self) -> &Matrix {
        &self.b_chol
    }

    pub fn b_inv(&self) -> &Matrix {
        &self.b_inv
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn mu_hat(&self) -> &[f64] {
        &self.mu_hat
    }

    /// `sqrt(x^T B^-1 x)`, computed as `||L^-1 x||`.
    pub fn inv_norm(&self, x: &[f64]) -> f64 {
        norm(&solve_lower(&self.b_chol, x))
    }

    /// `min(1, gamma / ||x||_{B^-1})`, and 1 for a zero-norm context.
    pub fn weight(&self, x: &[f64]) -> f64 {
        if self.gamma.is_infinite() {
            return 1.0;
        }
        let n = self.inv_norm(x);
        if n == 0.0 {
            1.0
        } else {
            (self.gamma / n).min(1.0)
        }
    }

    /// Adds the sample `(x, reward)` with weight [`Self::weight`], which is
    /// returned.
    pub fn update(&mut self, x: &[f64], reward: f64) -> Result<f64, NotPositiveDefinite> {
        assert_eq!(x.len(), self.dim());
        let w = self.weight(x);
        let mut v: Vec<f64> = x.iter().map(|xi| xi * w.sqrt()).collect();
        cholesky_rank_one_update(&mut self.b_chol, &mut v)?;
        self.b.add_outer(w, x);
        for (fi, xi) in self.f.iter_mut().zip(x) {
            *fi += w * xi * reward;
        }
        sherman_morrison_update(&mut self.b_inv, w, x);
        self.mu_hat = self.b_inv.mul_vec(&self.f);
        debug_assert!(
            self.b
                .mul(&self.b_inv)
                .max_abs_diff(&Matrix::identity(self.dim()))
                < 1e-6,
            "maintained inverse drifted"
        );
        Ok(w)
    }

    /// Draws from `Normal(mu_hat, scale^2 B^-1)` as `mu_hat + scale L^-T z`.
    /// Consumes exactly `d` normals.
    pub fn sample(&self, scale: f64, stream: &mut RngStream) -> Vec<f64> {
        let mut z = vec![0.0; self.dim()];
        stream.fill_gaussian(&mut z);
        let y = solve_lower_transpose(&self.b_chol, &z);
        self.mu_hat
            .iter()
            .zip(&y)
            .map(|(m, yi)| m + scale * yi)
            .collect()
    }
}

/// Sampling scale schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarianceSchedule {
    /// `v_t = 1`.
    Unit,
    /// `v_t = sigma * sqrt(9 d ln((t + 1) / delta))`.
    Inflated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinTsParams {
    pub sigma: f64,
    pub delta: f64,
    pub schedule: VarianceSchedule,
}

impl LinTsParams {
    pub fn vanilla(sigma: f64) -> Self {
        Self {
            sigma,
            delta: DEFAULT_DELTA,
            schedule: VarianceSchedule::Unit,
        }
    }

    pub fn robust(sigma: f64, delta: f64) -> Self {
        assert!(delta > 0.0 && delta < 1.0);
        assert!(sigma >= 0.0);
        Self {
            sigma,
            delta,
            schedule: VarianceSchedule::Inflated,
        }
    }

    pub fn v(&self, d: usize, t: usize) -> f64 {
        v_schedule(self, d, t)
    }
}

pub fn v_schedule(params: &LinTsParams, d: usize, t: usize) -> f64 {
    match params.schedule {
        VarianceSchedule::Unit => 1.0,
        VarianceSchedule::Inflated => {
            params.sigma * (9.0 * d as f64 * ((t as f64 + 1.0) / params.delta).ln()).sqrt()
        }
    }
}

/// First arm maximizing `x_i^T theta`.
pub fn lints_select(ctx: &ContextSet, theta: &[f64]) -> usize {
    let scores: Vec<f64> = ctx.contexts.iter().map(|x| dot(x, theta)).collect();
    argmax_first(&scores)
}

/// First arm maximizing `x_i^T mu_hat + radius ||x_i||_{B^-1}`.
pub fn linucb_select(state: &WeightedRidgeState, ctx: &ContextSet, radius: f64) -> usize {
    let scores: Vec<f64> = ctx
        .contexts
        .iter()
        .map(|x| dot(x, state.mu_hat()) + radius * state.inv_norm(x))
        .collect();
    argmax_first(&scores)
}

/// Confidence radius parameters of the OFUL-style agents (`lambda = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CwOfulParams {
    pub sigma: f64,
    pub delta: f64,
    pub lambda: f64,
    /// Additive `C * gamma` term; zero for plain LinUCB.
    pub corruption_term: f64,
}

impl CwOfulParams {
    /// `sigma sqrt(d ln((1 + t / lambda) / delta)) + sqrt(lambda) + corruption_term`.
    pub fn radius(&self, d: usize, t: usize) -> f64 {
        self.sigma * (d as f64 * ((1.0 + t as f64 / self.lambda) / self.delta).ln()).sqrt()
            + self.lambda.sqrt()
            + self.corruption_term
    }
}

pub fn cwoful_select(
    state: &WeightedRidgeState,
    params: &CwOfulParams,
    ctx: &ContextSet,
    t: usize,
) -> usize {
    linucb_select(state, ctx, params.radius(state.dim(), t))
}

/// Weighting level: `sqrt(d) / C` when the budget is known, `sqrt(d / T)`
/// otherwise. A known budget of zero maps to [`GAMMA_MAX`].
pub fn gamma_for(knowledge: CorruptionKnowledge, d: usize, horizon: usize) -> f64 {
    let sd = (d as f64).sqrt();
    match knowledge {
        CorruptionKnowledge::Known(c) if c > 0.0 => (sd / c).min(GAMMA_MAX),
        CorruptionKnowledge::Known(_) => GAMMA_MAX,
        CorruptionKnowledge::Unknown => sd / (horizon as f64).sqrt(),
    }
}

/// Whether the two concentration events hold at round `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoodEvents {
    pub e_mu: bool,
    pub e_theta: bool,
}

/// Checks the estimation event `E^mu(t)` and sampling event `E^theta(t)` for
/// the state *before* the round-`t` update. Needs the true parameter, so it is
/// only meaningful in diagnostic runs. At `t = 1` the sampling radius is zero.
#[allow(clippy::too_many_arguments)]
pub fn good_event_diagnostics(
    state: &WeightedRidgeState,
    params: &LinTsParams,
    env: &LinearEnvSpec,
    ctx: &ContextSet,
    mu_tilde: &[f64],
    t: usize,
    corruption_level: f64,
) -> GoodEvents {
    let d = state.dim();
    let tf = t as f64;
    let c_gamma = if corruption_level == 0.0 {
        0.0
    } else {
        corruption_level * state.gamma()
    };
    let mu_radius =
        params.sigma * (d as f64 * (tf.powi(3) / params.delta).ln()).sqrt() + 1.0 + c_gamma;
    let theta_radius = (4.0 * d as f64 * tf.ln()).sqrt() * params.v(d, t);
    let mut events = GoodEvents {
        e_mu: true,
        e_theta: true,
    };
    for x in &ctx.contexts {
        let width = state.inv_norm(x);
        let est = dot(x, state.mu_hat());
        if (est - env.expected_reward(x)).abs() > mu_radius * width {
            events.e_mu = false;
        }
        if (dot(x, mu_tilde) - est).abs() > theta_radius * width {
            events.e_theta = false;
        }
    }
    events
}

/// Common driving interface used by the harness.
pub trait LinearPolicy {
    fn select(&mut self, ctx: &ContextSet, t: usize, stream: &mut RngStream) -> usize;
    fn update(&mut self, x: &[f64], reward_post: f64) -> Result<f64, NotPositiveDefinite>;
    fn ridge(&self) -> &WeightedRidgeState;
    /// Parameter sample drawn by the most recent `select`, for sampling agents.
    fn last_sample(&self) -> Option<&[f64]> {
        None
    }
    fn ts_params(&self) -> Option<&LinTsParams> {
        None
    }
}

/// Thompson sampling over a (weighted) ridge posterior.
#[derive(Debug, Clone)]
pub struct LinTsAgent {
    ridge: WeightedRidgeState,
    params: LinTsParams,
    last_sample: Vec<f64>,
}

impl LinTsAgent {
    pub fn new(ridge: WeightedRidgeState, params: LinTsParams) -> Self {
        Self {
            ridge,
            params,
            last_sample: Vec::new(),
        }
    }

    /// Unit sampling scale, unweighted updates.
    pub fn vanilla(d: usize, sigma: f64) -> Self {
        Self::new(
            WeightedRidgeState::unweighted(d),
            LinTsParams::vanilla(sigma),
        )
    }

    /// Inflated sampling scale, leverage-weighted updates.
    pub fn robust(d: usize, gamma: f64, sigma: f64, delta: f64) -> Self {
        Self::new(
            WeightedRidgeState::new(d, gamma),
            LinTsParams::robust(sigma, delta),
        )
    }
}

impl LinearPolicy for LinTsAgent {
    fn select(&mut self, ctx: &ContextSet, t: usize, stream: &mut RngStream) -> usize {
        let v = self.params.v(self.ridge.dim(), t);
        self.last_sample = self.ridge.sample(v, stream);
        lints_select(ctx, &self.last_sample)
    }

    fn update(&mut self, x: &[f64], reward_post: f64) -> Result<f64, NotPositiveDefinite> {
        self.ridge.update(x, reward_post)
    }

    fn ridge(&self) -> &WeightedRidgeState {
        &self.ridge
    }

    fn last_sample(&self) -> Option<&[f64]> {
        Some(&self.last_sample)
    }

    fn ts_params(&self) -> Option<&LinTsParams> {
        Some(&self.params)
    }
}

/// Optimistic agent: LinUCB when `corruption_term = 0` and weighting is off,
/// CW-OFUL otherwise.
#[derive(Debug, Clone)]
pub struct OptimisticAgent {
    ridge: WeightedRidgeState,
    params: CwOfulParams,
    fixed_radius: Option<f64>,
}

impl OptimisticAgent {
    /// LinUCB using the OFUL radius schedule.
    pub fn linucb(d: usize, sigma: f64, delta: f64) -> Self {
        Self {
            ridge: WeightedRidgeState::unweighted(d),
            params: CwOfulParams {
                sigma,
                delta,
                lambda: 1.0,
                corruption_term: 0.0,
            },
            fixed_radius: None,
        }
    }

    /// LinUCB with a constant radius.
    pub fn linucb_fixed(d: usize, radius: f64) -> Self {
        assert!(radius >= 0.0);
        let mut agent = Self::linucb(d, 0.0, DEFAULT_DELTA);
        agent.fixed_radius = Some(radius);
        agent
    }

    pub fn cwoful(d: usize, gamma: f64, params: CwOfulParams) -> Self {
        Self {
            ridge: WeightedRidgeState::new(d, gamma),
            params,
            fixed_radius: None,
        }
    }

    pub fn radius(&self, t: usize) -> f64 {
        self.fixed_radius
            .unwrap_or_else(|| self.params.radius(self.ridge.dim(), t))
    }
}

impl LinearPolicy for OptimisticAgent {
    fn select(&mut self, ctx: &ContextSet, t: usize, _stream: &mut RngStream) -> usize {
        linucb_select(&self.ridge, ctx, self.radius(t))
    }

    fn update(&mut self, x: &[f64], reward_post: f64) -> Result<f64, NotPositiveDefinite> {
        self.ridge.update(x, reward_post)
    }

    fn ridge(&self) -> &WeightedRidgeState {
        &self.ridge
    }
}
