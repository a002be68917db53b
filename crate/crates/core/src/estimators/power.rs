//! Power iteration on `T(g)^* T(g)` through input/output queries.
//!
//! Querying `T(g)` on the conjugated time reversal of an output applies the
//! adjoint: `T(g)^* y = J conj(T(g) J conj(y))`. For real signals this is
//! plain time reversal. Inputs are unit vectors scaled to the cap `M`
//! before querying; outputs are divided by `M` to compensate.

use super::{random_unit, scale, EstimateTrace, EstimatorConfig, Method};
use crate::error::{Error, Result};
use crate::oracle::QueryOracle;
use crate::rng;
use crate::signals::{adjoint_reverse, ComplexVec};

struct Probe {
    dim: usize,
    cap: f64,
    field: crate::signals::Field,
    seed: u64,
    restarts: u64,
}

impl Probe {
    fn new<O: QueryOracle + ?Sized>(oracle: &O, cfg: &EstimatorConfig) -> Self {
        Self {
            dim: oracle.dim(),
            cap: oracle.input_cap(),
            field: oracle.noise().field,
            seed: cfg.seed,
            restarts: 0,
        }
    }

    fn fresh_input(&mut self) -> ComplexVec {
        let mut stream = rng::stream(&[self.seed, 0x706f_7765_72, self.restarts]);
        self.restarts += 1;
        random_unit(&mut stream, self.dim, self.field)
    }

    /// Queries `M u` and returns the conjugate-reversed response over `M`.
    fn reversed_response<O: QueryOracle + ?Sized>(
        &self,
        oracle: &mut O,
        u: &ComplexVec,
    ) -> Result<ComplexVec> {
        let y = oracle.query(&scale(u, self.cap))?;
        Ok(adjoint_reverse(&scale(&y, 1.0 / self.cap)))
    }

    fn flags(&self) -> Vec<String> {
        // the first draw is the start vector, not a restart
        match self.restarts.saturating_sub(1) {
            0 => Vec::new(),
            n => vec![format!("restarted:{n}")],
        }
    }
}

/// One query per iteration; `H_t = sqrt(|mu_{t-1} <u_{t-1}, y~_t>|)` from the
/// second iteration on.
pub fn power_method_a<O: QueryOracle + ?Sized>(
    oracle: &mut O,
    cfg: &EstimatorConfig,
) -> Result<EstimateTrace> {
    let budget = oracle.remaining();
    if budget < 2 {
        return Err(Error::invalid(
            "budget",
            "power method A needs at least 2 queries",
        ));
    }
    let mut probe = Probe::new(oracle, cfg);
    let mut u = probe.fresh_input();
    let mut previous: Option<(f64, ComplexVec)> = None;
    let mut estimates = Vec::with_capacity(budget);

    for _ in 0..budget {
        let reversed = probe.reversed_response(oracle, &u)?;
        let mu = reversed.norm2();
        if let Some((mu_prev, u_prev)) = &previous {
            estimates.push((mu_prev * u_prev.inner(&reversed).norm()).sqrt());
        }
        if mu == 0.0 {
            previous = None;
            u = probe.fresh_input();
            continue;
        }
        let next = scale(&reversed, 1.0 / mu);
        previous = Some((mu, std::mem::replace(&mut u, next)));
    }

    if estimates.is_empty() {
        estimates.push(0.0);
    }
    EstimateTrace::from_rounds(Method::PowerA, estimates, budget, probe.flags())
}

/// Two queries per iteration (`N/2` iterations); `H_t = sqrt(|<u_t, z~_t>|)`.
pub fn power_method_b<O: QueryOracle + ?Sized>(
    oracle: &mut O,
    cfg: &EstimatorConfig,
) -> Result<EstimateTrace> {
    let budget = oracle.remaining();
    if budget < 2 {
        return Err(Error::invalid(
            "budget",
            "power method B needs at least 2 queries",
        ));
    }
    let iterations = budget / 2;
    let mut probe = Probe::new(oracle, cfg);
    let mut u = probe.fresh_input();
    let mut estimates = Vec::with_capacity(iterations);

    for _ in 0..iterations {
        let y_rev = probe.reversed_response(oracle, &u)?;
        let y_norm = y_rev.norm2();
        if y_norm == 0.0 {
            // T(g) u = 0 would make the second query uninformative; spend it on a new start.
            oracle.query(&ComplexVec::zeros(probe.dim))?;
            estimates.push(0.0);
            u = probe.fresh_input();
            continue;
        }
        // The adjoint query is taken on the unit-normalized reversal and rescaled.
        let z_rev = scale(
            &probe.reversed_response(oracle, &scale(&y_rev, 1.0 / y_norm))?,
            y_norm,
        );
        estimates.push(u.inner(&z_rev).norm().sqrt());
        match z_rev.normalized() {
            Some(next) => u = next,
            None => u = probe.fresh_input(),
        }
    }

    EstimateTrace::from_rounds(Method::PowerB, estimates, 2 * iterations, probe.flags())
}
