use crate::analysis::{convergence_prediction, iterations_to_reduce, ConvergencePrediction};
use crate::error::{Result, RotjacError};
use crate::jacobians::{svd_backward_with, SpectrumGuard};
use crate::linalg::{Mat3, Vec3};
use crate::sampling::{random_rotation, RngStream};
use crate::so3::{frobenius_loss, svdo_plus, RotationMatrix};

use super::{ExperimentReport, RecordTable, SummaryStats};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    /// Initial singular values, descending and positive.
    pub s0: [f64; 3],
    pub eta_svd: f64,
    pub eta_direct: f64,
    /// Required shrink factor of each tracked component (100 = 100×).
    pub target: f64,
    /// Initial rotation error `ω₀` in the right singular frame. `R*·diag(s0)`
    /// alone is already a minimizer of the SVD loss, so a small offset is
    /// needed for there to be anything to converge.
    pub offset: [f64; 3],
    pub max_iterations: usize,
    pub master_seed: u64,
}

impl ConvergenceConfig {
    pub fn new(s0: [f64; 3], eta_svd: f64, eta_direct: f64, target: f64, master_seed: u64) -> Self {
        Self { s0, eta_svd, eta_direct, target, offset: [1e-6; 3], max_iterations: 10_000, master_seed }
    }

    fn validate(&self) -> Result<()> {
        let [s1, s2, s3] = self.s0;
        if !(s3 > 0.0 && s1 >= s2 && s2 >= s3 && s1.is_finite()) {
            return Err(RotjacError::DomainError("s0 must be positive and sorted descending".into()));
        }
        if !(self.eta_svd > 0.0 && self.eta_direct > 0.0) {
            return Err(RotjacError::DomainError("step sizes must be positive".into()));
        }
        if !(self.target > 1.0) {
            return Err(RotjacError::DomainError("reduction target must exceed 1".into()));
        }
        if self.offset.iter().any(|w| !(w.abs() > 0.0 && w.is_finite())) {
            return Err(RotjacError::DomainError("offset components must be nonzero and finite".into()));
        }
        Ok(())
    }
}

/// How a gradient-descent run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RaceOutcome {
    /// Every tracked component shrank by the target; `iterations` is when
    /// the last one did.
    Converged {
        iterations: usize,
    },
    /// Loss exceeded 10× its starting value: the step is past the stability bound.
    Diverged {
        iteration: usize,
    },
    NotReached {
        iterations: usize,
    },
}

impl RaceOutcome {
    pub fn iterations(&self) -> Option<usize> {
        match *self {
            RaceOutcome::Converged { iterations } => Some(iterations),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RaceOutcome::Converged { .. } => "converged",
            RaceOutcome::Diverged { .. } => "diverged",
            RaceOutcome::NotReached { .. } => "not_reached",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaceStep {
    pub iteration: usize,
    pub loss_svd: f64,
    /// `|ω|` components for pairs (1,2), (1,3), (2,3).
    pub components: [f64; 3],
    pub loss_direct: f64,
    /// `‖M − R*‖_F` of the direct run.
    pub direct_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRace {
    pub config: ConvergenceConfig,
    pub prediction: ConvergencePrediction<f64>,
    pub trajectory: Vec<RaceStep>,
    pub svd_outcome: RaceOutcome,
    /// First iteration at which each pair component shrank by the target.
    pub pair_iterations: [Option<usize>; 3],
    /// Predicted iterations per pair from the contraction factors.
    pub predicted_pair_iterations: [Option<u64>; 3],
    pub direct_outcome: RaceOutcome,
    /// Direct loss after exactly one step.
    pub direct_loss_after_one: f64,
    /// Direct loss after one step of size ½ from the same start.
    pub direct_half_step_loss: f64,
}

/// Rotation error as pair components: the (i, j) pair moves the rotation
/// about the remaining axis k.
fn pair_components(w: Vec3<f64>) -> [f64; 3] {
    [w.z.abs(), w.y.abs(), w.x.abs()]
}

/// Plain gradient descent on `‖svdo_plus(M) − R*‖²` and on `‖M − R*‖²`
/// from `M₀ = R*·exp([ω₀]ₓ)·diag(s0)`, with `R*` Haar-random from the seed.
pub fn convergence_race(cfg: &ConvergenceConfig) -> Result<ConvergenceRace> {
    cfg.validate()?;
    let prediction = convergence_prediction(cfg.s0, cfg.eta_svd)?;
    let predicted_pair_iterations = prediction.contraction_factors.map(|r| iterations_to_reduce(r, cfg.target));

    let mut stream = RngStream::for_key(&[cfg.master_seed, 0, 0]);
    let r_star = random_rotation::<f64>(&mut stream);
    let w0 = Vec3::from_array(cfg.offset);
    let m0 = *r_star.matrix() * *RotationMatrix::from_axis_angle(w0, w0.norm()).matrix() * Mat3::diag(cfg.s0);

    let rt = r_star.transpose();
    let measure = |m: &Mat3<f64>| -> Result<(f64, [f64; 3])> {
        let r = svdo_plus(m)?;
        Ok((frobenius_loss(r.matrix(), &r_star), pair_components(rt.compose(&r).log())))
    };
    let direct_grad = |m: &Mat3<f64>| (*m - *r_star.matrix()).scale(2.0);
    let direct_loss = |m: &Mat3<f64>| frobenius_loss(m, &r_star);

    let (loss0, comp0) = measure(&m0)?;
    let direct0 = direct_loss(&m0);
    let direct_err0 = direct0.sqrt();
    let direct_half_step_loss = direct_loss(&(m0 - direct_grad(&m0).scale(0.5)));

    let mut m = m0;
    let mut md = m0;
    let mut trajectory = vec![RaceStep {
        iteration: 0,
        loss_svd: loss0,
        components: comp0,
        loss_direct: direct0,
        direct_error: direct_err0,
    }];
    let mut pair_iterations = [None; 3];
    let mut svd_outcome = RaceOutcome::NotReached { iterations: cfg.max_iterations };
    let mut direct_outcome = RaceOutcome::NotReached { iterations: cfg.max_iterations };
    let mut direct_loss_after_one = f64::NAN;

    for it in 1..=cfg.max_iterations {
        let r = svdo_plus(&m)?;
        let grad = svd_backward_with(&m, &(*r.matrix() - *r_star.matrix()).scale(2.0), SpectrumGuard::GapOnly)?;
        m = m - grad.scale(cfg.eta_svd);
        md = md - direct_grad(&md).scale(cfg.eta_direct);

        let (loss, comp) = measure(&m)?;
        let ld = direct_loss(&md);
        if it == 1 {
            direct_loss_after_one = ld;
        }
        trajectory.push(RaceStep {
            iteration: it,
            loss_svd: loss,
            components: comp,
            loss_direct: ld,
            direct_error: ld.sqrt(),
        });

        for k in 0..3 {
            if pair_iterations[k].is_none() && comp[k] * cfg.target <= comp0[k] {
                pair_iterations[k] = Some(it);
            }
        }
        if matches!(direct_outcome, RaceOutcome::NotReached { .. }) {
            if ld.sqrt() * cfg.target <= direct_err0 {
                direct_outcome = RaceOutcome::Converged { iterations: it };
            } else if ld > 10.0 * direct0 {
                direct_outcome = RaceOutcome::Diverged { iteration: it };
            }
        }
        if !(loss <= 10.0 * loss0) {
            svd_outcome = RaceOutcome::Diverged { iteration: it };
        } else if pair_iterations.iter().all(Option::is_some) {
            svd_outcome = RaceOutcome::Converged { iterations: it };
        }
        if !matches!(svd_outcome, RaceOutcome::NotReached { .. })
            && !matches!(direct_outcome, RaceOutcome::NotReached { .. })
        {
            break;
        }
    }

    Ok(ConvergenceRace {
        config: cfg.clone(),
        prediction,
        trajectory,
        svd_outcome,
        pair_iterations,
        predicted_pair_iterations,
        direct_outcome,
        direct_loss_after_one,
        direct_half_step_loss,
    })
}

impl ExperimentReport for ConvergenceRace {
    fn records(&self) -> RecordTable {
        let mut t = RecordTable::new(&[
            "iteration",
            "loss_svd",
            "component_12",
            "component_13",
            "component_23",
            "loss_direct",
            "direct_error",
        ]);
        for s in &self.trajectory {
            t.push(vec![
                s.iteration.into(),
                s.loss_svd.into(),
                s.components[0].into(),
                s.components[1].into(),
                s.components[2].into(),
                s.loss_direct.into(),
                s.direct_error.into(),
            ]);
        }
        t
    }

    fn summary(&self) -> Vec<SummaryStats> {
        let mut out = Vec::new();
        for (k, name) in ["12", "13", "23"].iter().enumerate() {
            let measured = self.pair_iterations[k].map_or(f64::NAN, |n| n as f64);
            let mut s = SummaryStats::single(&format!("svd_iterations_pair_{name}"), None, measured);
            if let Some(p) = self.predicted_pair_iterations[k] {
                s = s.with_prediction(p as f64);
            }
            out.push(s);
        }
        let iters = |o: &RaceOutcome| o.iterations().map_or(f64::NAN, |n| n as f64);
        out.push(SummaryStats::single("svd_iterations_all_components", None, iters(&self.svd_outcome)));
        let direct = SummaryStats::single("direct_iterations", None, iters(&self.direct_outcome));
        let rate = ConvergencePrediction::direct_rate_at(self.config.eta_direct);
        let pred = iterations_to_reduce(rate, self.config.target);
        out.push(match pred {
            Some(p) => direct.with_prediction(p as f64),
            None => direct,
        });
        out.push(SummaryStats::single("direct_loss_after_one_step", None, self.direct_loss_after_one));
        out.push(SummaryStats::single("direct_loss_after_half_step", None, self.direct_half_step_loss));
        out
    }
}
