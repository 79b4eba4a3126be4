//! Postselected-teleportation (P-CTC) solutions of the circuit.
//!
//! The prescription evolves a pure chronology-respecting input by the
//! reduced operator `W = tr_CV[U]` and renormalises. `W |psi>` is computed
//! gatewise as `sum_j (<j|_CV (x) 1) U (|psi> (x) |j>_CV)` over CV basis
//! strings `j`, so the full unitary is never materialised; each `j` term
//! evolves through the sparse gate path.
//!
//! # Incomplete teleportation
//!
//! With a partially entangled resource, each mode of the prepared and
//! postselected pair carries amplitude `sqrt(h)` on `|00>` and
//! `sqrt((1-h)/N)` on every `|nn>`. Contracting the ancilla of the pair
//! against the postselection leaves the circuit sandwiched between
//! *identical* CV strings `j`, each weighted by the product of per-index
//! amplitudes squared: `h` per vacuous digit, `(1-h)/N` per clock digit.
//! The effective evolution is therefore exactly the weighted diagonal CV
//! sum `W_h = sum_j w(j) <j| U |j>`, which is how it is computed here; a
//! uniform profile recovers the plain partial trace.
//!
//! # Weight recovery at `N = M`
//!
//! The clock ladder is `N`-periodic (`|phi^(N)> = phase * |phi^(0)>`), so
//! at `N = M` and fixed delay the output family `{|Phi^(k)>}` for
//! `k = 0..=M` is linearly dependent and no single output vector determines
//! all `M + 1` loop weights. The weights themselves are delay-independent,
//! so [`recover_loop_weights`] samples the gatewise output at several
//! generic delays and solves the resulting Vandermonde system instead.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::clock::ClockSpec;
use crate::continuum::{binomial, binomial_u128, ln_factorial, BINOMIAL_EXACT_MAX};
use crate::error::{Error, Result};
use crate::gates::{CircuitSpec, Gate};
use crate::linalg;
use crate::state::{
    evolved_input, family_combination, ModeBasis, Operator, PureState, WeightProfile,
    MATERIALIZE_CAP,
};

/// Which P-CTC flavour an output was produced by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PctcVariant {
    Standard,
    /// Partially entangled resource with vacuum amplitude `h`.
    Incomplete { h: f64 },
    /// Probabilistic swaps of power `p`.
    Probabilistic { power: f64 },
}

/// A P-CTC output: the normalised state, the closed-form loop weights it
/// decomposes into on the evolved family, and (where a numeric gatewise
/// path ran) the relative deviation between the numeric vector and the
/// closed-form combination.
#[derive(Debug, Clone)]
pub struct PctcOutput {
    pub variant: PctcVariant,
    pub state: PureState,
    pub weights: Vec<Complex64>,
    pub residual: Option<f64>,
}

impl PctcOutput {
    /// Loop-count probabilities `|w_k|^2`, normalised.
    pub fn probabilities(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.weights.iter().map(|w| w.norm_sqr()).collect();
        let total: f64 = out.iter().sum();
        if total > 0.0 {
            for p in &mut out {
                *p /= total;
            }
        }
        out
    }
}

fn check_reduced_caps(ctx: &CircuitSpec) -> Result<()> {
    let cr = ctx.cr_dim()?;
    if cr > MATERIALIZE_CAP {
        return Err(Error::SizeCapExceeded {
            dim: cr,
            cap: MATERIALIZE_CAP,
        });
    }
    if ctx.has_power_gates() {
        // Power gates double the sparse support per gate, so the exact path
        // is only offered while the joint space itself is small.
        let joint = ctx.joint_dim()?;
        if joint > MATERIALIZE_CAP {
            return Err(Error::SizeCapExceeded {
                dim: joint,
                cap: MATERIALIZE_CAP,
            });
        }
    }
    Ok(())
}

/// Apply the reduced operator gatewise: returns the *unnormalised*
/// `sum_j w(j) (<j| (x) 1) U (|input> (x) |j>)`, with `w(j)` taken from the
/// profile (1 everywhere when absent).
pub fn reduced_apply(
    ctx: &CircuitSpec,
    input: &PureState,
    profile: Option<&WeightProfile>,
) -> Result<PureState> {
    check_reduced_caps(ctx)?;
    let basis = ctx.mode_basis();
    let m = ctx.modes();
    if input.modes() != m || input.basis() != basis {
        return Err(Error::DimensionMismatch {
            expected: ctx.cr_dim()?,
            got: input.dim(),
        });
    }
    if let Some(p) = profile {
        if p.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                got: p.len(),
            });
        }
    }
    let cv_dim = ctx.cr_dim()?;
    let gates = ctx.gate_sequence();
    let clock = ctx.clock();
    let total_modes = ctx.total_modes();

    let mut out = PureState::zero(basis, m)?;
    let out_amps = out.amplitudes_mut();
    let mut work: HashMap<usize, Complex64> = HashMap::new();
    for j in 0..cv_dim {
        let weight = match profile {
            Some(p) => p.string_weight(basis, j, m),
            None => 1.0,
        };
        if weight == 0.0 {
            continue;
        }
        work.clear();
        for (a, amp) in input.amplitudes().iter().enumerate() {
            if amp.re != 0.0 || amp.im != 0.0 {
                work.insert(a * cv_dim + j, *amp);
            }
        }
        for gate in &gates {
            work = apply_gate_sparse(&work, gate, basis, total_modes, clock)?;
        }
        // Project the CV half back onto <j|. Distinct sparse keys with the
        // same CV part have distinct CR parts, so each output slot receives
        // at most one contribution per j and the sum stays order-free.
        for (&idx, &amp) in &work {
            if idx % cv_dim == j {
                out_amps[idx / cv_dim] += weight * amp;
            }
        }
    }
    Ok(out)
}

fn apply_gate_sparse(
    map: &HashMap<usize, Complex64>,
    gate: &Gate,
    basis: ModeBasis,
    modes: usize,
    clock: &ClockSpec,
) -> Result<HashMap<usize, Complex64>> {
    let mut out = HashMap::with_capacity(map.len() * 2);
    match *gate {
        Gate::VacuumSwap { i, j } => {
            for (&x, &v) in map {
                let bi = basis.digit(x, i, modes);
                let bj = basis.digit(x, j, modes);
                let key = if bi >= 1 && bj >= 1 && bi != bj {
                    basis.exchange(x, i, j, modes)
                } else {
                    x
                };
                out.insert(key, v);
            }
        }
        Gate::PowerSwap { i, j, power } => {
            let (alpha, beta) = crate::gates::alpha_beta(power);
            let passthrough = alpha + beta;
            for (&x, &v) in map {
                let bi = basis.digit(x, i, modes);
                let bj = basis.digit(x, j, modes);
                if bi >= 1 && bj >= 1 && bi != bj {
                    let y = basis.exchange(x, i, j, modes);
                    *out.entry(x).or_insert(Complex64::new(0.0, 0.0)) += alpha * v;
                    *out.entry(y).or_insert(Complex64::new(0.0, 0.0)) += beta * v;
                } else {
                    *out.entry(x).or_insert(Complex64::new(0.0, 0.0)) += passthrough * v;
                }
            }
        }
        Gate::ClockEvolution { mode, delay } => {
            let rbar = clock.vacuum_evolution_operator(delay);
            for (&x, &v) in map {
                out.insert(x, v * rbar.entry(basis.digit(x, mode, modes)));
            }
        }
    }
    Ok(out)
}

/// Materialise the reduced operator `W = tr_CV[U]` column by column through
/// the gatewise path.
pub fn reduced_operator(ctx: &CircuitSpec) -> Result<Operator> {
    check_reduced_caps(ctx)?;
    let basis = ctx.mode_basis();
    let m = ctx.modes();
    let dim = ctx.cr_dim()?;
    let mut out = Operator::zeros(basis, m)?;
    for b in 0..dim {
        let column = reduced_apply(ctx, &PureState::basis_state(basis, m, b)?, None)?;
        for (r, amp) in column.amplitudes().iter().enumerate() {
            out.set(r, b, *amp);
        }
    }
    Ok(out)
}

fn normalised_output(
    variant: PctcVariant,
    numeric: PureState,
    weights: Vec<Complex64>,
    closed: &PureState,
) -> Result<PctcOutput> {
    let closed_norm = closed.norm();
    let mut diff = numeric.clone();
    diff.add_scaled(Complex64::new(-1.0, 0.0), closed)?;
    let residual = if closed_norm > 0.0 {
        diff.norm() / closed_norm
    } else {
        diff.norm()
    };
    let mut state = numeric;
    state.normalize()?;
    Ok(PctcOutput {
        variant,
        state,
        weights,
        residual: Some(residual),
    })
}

/// Standard P-CTC output: gatewise `W |Phi_M>` normalised, with the
/// binomial loop weights `binom(M, k)`.
pub fn pctc_output(ctx: &CircuitSpec, mode_weights: &[f64]) -> Result<PctcOutput> {
    let m = ctx.modes();
    let input = evolved_input(ctx.clock(), ctx.delay(), mode_weights, 0)?;
    let numeric = reduced_apply(ctx, &input, None)?;
    let weights: Vec<Complex64> = (0..=m)
        .map(|k| Complex64::new(binomial(m, k), 0.0))
        .collect();
    let closed = family_combination(ctx.clock(), ctx.delay(), mode_weights, &weights)?;
    normalised_output(PctcVariant::Standard, numeric, weights, &closed)
}

/// Incomplete-teleportation output: the weighted diagonal CV contraction
/// with profile `(h, (1-h)/N, ...)`, against the closed form
/// `sum_k binom(M,k) h^(M-k) ((1-h)/N)^k |Phi^(k)>`.
pub fn incomplete_output(ctx: &CircuitSpec, mode_weights: &[f64], h: f64) -> Result<PctcOutput> {
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::invalid("teleportation parameter h must lie in [0, 1]"));
    }
    let m = ctx.modes();
    let n = ctx.clock().levels();
    let profile = WeightProfile::incomplete_teleportation(n, h)?;
    let input = evolved_input(ctx.clock(), ctx.delay(), mode_weights, 0)?;
    let numeric = reduced_apply(ctx, &input, Some(&profile))?;
    let weights: Vec<Complex64> = (0..=m)
        .map(|k| {
            Complex64::new(
                binomial(m, k)
                    * h.powi((m - k) as i32)
                    * ((1.0 - h) / n as f64).powi(k as i32),
                0.0,
            )
        })
        .collect();
    let closed = family_combination(ctx.clock(), ctx.delay(), mode_weights, &weights)?;
    normalised_output(PctcVariant::Incomplete { h }, numeric, weights, &closed)
}

/// Conjectured loop weights of the all-power-swap circuit:
/// `binom(M,k) (alpha {1 + tr R} + beta)^(M-k) beta^k` at delay `dt`.
pub fn probabilistic_weights(
    clock: &ClockSpec,
    modes: usize,
    power: f64,
    dt: f64,
) -> Vec<Complex64> {
    let (alpha, beta) = crate::gates::alpha_beta(power);
    let tr_r = clock.evolution_operator(dt).trace();
    let miss = alpha * (Complex64::new(1.0, 0.0) + tr_r) + beta;
    (0..=modes)
        .map(|k| {
            Complex64::new(binomial(modes, k), 0.0)
                * miss.powu((modes - k) as u32)
                * beta.powu(k as u32)
        })
        .collect()
}

/// P-CTC output of the probabilistic-swap circuit, evaluated from the
/// conjectured closed form (the exact gatewise check lives in
/// [`verify_conjecture`]).
pub fn probabilistic_output(ctx: &CircuitSpec, mode_weights: &[f64]) -> Result<PctcOutput> {
    let power = match ctx.swap_variant() {
        crate::gates::SwapVariant::Power(p) => p,
        crate::gates::SwapVariant::Exact => {
            return Err(Error::invalid(
                "probabilistic output needs a power-swap circuit",
            ))
        }
    };
    let weights = probabilistic_weights(ctx.clock(), ctx.modes(), power, ctx.delay());
    let mut state = family_combination(ctx.clock(), ctx.delay(), mode_weights, &weights)?;
    state.normalize()?;
    Ok(PctcOutput {
        variant: PctcVariant::Probabilistic { power },
        state,
        weights,
        residual: None,
    })
}

/// Exact postselected evolution of the all-power-swap circuit versus the
/// conjectured closed form; returns the maximum component deviation. Only
/// available while the joint space fits the dense cap (M <= 3 at N = M).
pub fn verify_conjecture(ctx: &CircuitSpec, mode_weights: &[f64]) -> Result<f64> {
    let power = match ctx.swap_variant() {
        crate::gates::SwapVariant::Power(p) => p,
        crate::gates::SwapVariant::Exact => {
            return Err(Error::invalid("conjecture verifier needs a power-swap circuit"))
        }
    };
    let input = evolved_input(ctx.clock(), ctx.delay(), mode_weights, 0)?;
    let numeric = reduced_apply(ctx, &input, None)?;
    let weights = probabilistic_weights(ctx.clock(), ctx.modes(), power, ctx.delay());
    let closed = family_combination(ctx.clock(), ctx.delay(), mode_weights, &weights)?;
    Ok(numeric
        .amplitudes()
        .iter()
        .zip(closed.amplitudes())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0_f64, f64::max))
}

/// Loop-count probability `binom(M,k)^2 / binom(2M, M)`.
pub fn pctc_probability(m: usize, k: usize) -> Result<f64> {
    if k > m {
        return Err(Error::invalid(format!("loop count {k} exceeds modes {m}")));
    }
    if m <= BINOMIAL_EXACT_MAX {
        Ok(binomial_u128(m, k).pow(2) as f64 / binomial_u128(2 * m, m) as f64)
    } else {
        let ln_binom = |mm: usize, kk: usize| {
            ln_factorial(mm) - ln_factorial(kk) - ln_factorial(mm - kk)
        };
        Ok((2.0 * ln_binom(m, k) - ln_binom(2 * m, m)).exp())
    }
}

/// Exact integer check of the expectation identity
/// `sum_k k binom(M,k)^2 = (M/2) binom(2M, M)`.
pub fn expectation_is_half_m(m: usize) -> bool {
    let lhs: u128 = (0..=m)
        .map(|k| 2 * k as u128 * binomial_u128(m, k).pow(2))
        .sum();
    lhs == m as u128 * binomial_u128(2 * m, m)
}

/// Normalised probabilities of the incomplete variant,
/// `Pr(k) ~ [binom(M,k) h^(M-k) ((1-h)/N)^k]^2`. The common `h^M` factor is
/// divided out so large `M` stays finite.
pub fn incomplete_probability(m: usize, n: usize, h: f64, k: usize) -> Result<f64> {
    if k > m {
        return Err(Error::invalid(format!("loop count {k} exceeds modes {m}")));
    }
    if n == 0 {
        return Err(Error::invalid("need at least one clock level"));
    }
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::invalid("teleportation parameter h must lie in [0, 1]"));
    }
    if h == 0.0 {
        // Vacuum weight zero: only the fully evolved component survives.
        return Ok(if k == m { 1.0 } else { 0.0 });
    }
    let ratio = (1.0 - h) / (h * n as f64);
    let u = |kk: usize| binomial(m, kk) * ratio.powi(kk as i32);
    let total: f64 = (0..=m).map(|kk| u(kk).powi(2)).sum();
    Ok(u(k).powi(2) / total)
}

/// Normalised probabilities of the probabilistic-swap variant at the
/// orthogonal-clock delay, `Pr(k) ~ [binom(M,k) beta^k]^2` for swap
/// amplitude magnitude `beta`.
pub fn beta_weight_probability(m: usize, beta: f64, k: usize) -> Result<f64> {
    if k > m {
        return Err(Error::invalid(format!("loop count {k} exceeds modes {m}")));
    }
    if !(beta >= 0.0) {
        return Err(Error::invalid("beta must be nonnegative"));
    }
    let u = |kk: usize| binomial(m, kk) * beta.powi(kk as i32);
    let total: f64 = (0..=m).map(|kk| u(kk).powi(2)).sum();
    Ok(u(k).powi(2) / total)
}

/// Recover the loop weights of a standard-variant output from gatewise
/// evolutions at several delays (see the module notes on `N = M`
/// degeneracy). `delays` should be generic, i.e. avoid rational multiples
/// of the clock period; supplying at least two distinct delays makes the
/// system full rank for `N = M`.
pub fn recover_loop_weights(
    ctx: &CircuitSpec,
    mode_weights: &[f64],
    delays: &[f64],
) -> Result<Vec<Complex64>> {
    let m = ctx.modes();
    let n = ctx.clock().levels();
    if delays.is_empty() {
        return Err(Error::invalid("need at least one sample delay"));
    }
    if !(mode_weights[0] > 0.0) {
        return Err(Error::invalid("recovery reads mode 1: its weight must be positive"));
    }
    let basis = ctx.mode_basis();
    let stride = basis.stride(1, m);
    let scale = (n as f64).sqrt() / mode_weights[0].sqrt();

    let mut rows = Vec::with_capacity(delays.len() * n);
    let mut rhs = Vec::with_capacity(delays.len() * n);
    for &dt in delays {
        let sampled = ctx.with_delay(dt);
        let input = evolved_input(sampled.clock(), dt, mode_weights, 0)?;
        let output = reduced_apply(&sampled, &input, None)?;
        let phases = sampled.clock().evolution_operator(dt);
        for lvl_idx in 0..n {
            let z = phases.entry(lvl_idx);
            let row: Vec<Complex64> = (0..=m).map(|k| z.powu(k as u32)).collect();
            rows.push(row);
            rhs.push(output.amplitudes()[(lvl_idx + 1) * stride] * scale);
        }
    }
    linalg::lstsq(&rows, &rhs)
        .ok_or_else(|| Error::invalid("loop-weight recovery system is singular"))
}

/// The telescoped multi-wormhole evolution: apply `psi -> psi + Rbar^(xM) psi`
/// once per wormhole. After `M` wormholes this reproduces the standard
/// single-wormhole output `sum_k binom(M,k) |Phi^(k)>` (not normalised).
pub fn telescoped_output(
    clock: &ClockSpec,
    dt: f64,
    mode_weights: &[f64],
) -> Result<PureState> {
    let m = mode_weights.len();
    let evolve_all: Vec<Gate> = (1..=m)
        .map(|mode| Gate::ClockEvolution { mode, delay: dt })
        .collect();
    let mut psi = evolved_input(clock, dt, mode_weights, 0)?;
    for _ in 0..m {
        let mut evolved = psi.clone();
        crate::gates::apply_gates_state(&mut evolved, &evolve_all, clock)?;
        psi.add_scaled(Complex64::new(1.0, 0.0), &evolved)?;
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::SwapVariant;
    use crate::state::uniform_weights;

    #[test]
    fn single_mode_reduced_action() {
        // W |phi> = |phi^(0)> + |phi^(1)> at any delay.
        for &dt_factor in &[1.0, 0.37, 2.2] {
            let clock = ClockSpec::new(2).unwrap();
            let dt = dt_factor * clock.orthogonalisation_time();
            let ctx = CircuitSpec::new(1, clock.clone(), dt, SwapVariant::Exact).unwrap();
            let input = evolved_input(&clock, dt, &[1.0], 0).unwrap();
            let got = reduced_apply(&ctx, &input, None).unwrap();
            let ones = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
            let expect = family_combination(&clock, dt, &[1.0], &ones).unwrap();
            let dev = got
                .amplitudes()
                .iter()
                .zip(expect.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0_f64, f64::max);
            assert!(dev < 1e-12, "dt factor {dt_factor}");
        }
    }

    #[test]
    fn reduced_operator_matches_materialized_trace() {
        let ctx = CircuitSpec::standard(2).unwrap();
        let w = reduced_operator(&ctx).unwrap();
        let u = ctx.materialize_unitary().unwrap();
        let traced = u.partial_trace(&[3, 4]).unwrap();
        let dev = w
            .elements()
            .iter()
            .zip(traced.elements())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        assert!(dev < 1e-12);
    }

    #[test]
    fn swapless_circuit_reduces_to_identity_at_t_perp() {
        // With no swaps the reduced operator is (1 + tr R)^M times the
        // identity; at t_perp the bare trace vanishes, leaving exactly 1.
        let clock = ClockSpec::new(2).unwrap();
        let tp = clock.orthogonalisation_time();
        let gates = [Gate::ClockEvolution { mode: 2, delay: tp }];
        let u = crate::gates::materialize_gates(&gates, &clock, 2).unwrap();
        let w = u.partial_trace(&[2]).unwrap();
        let id = Operator::identity(w.basis(), 1).unwrap();
        let dev = w
            .elements()
            .iter()
            .zip(id.elements())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        assert!(dev < 1e-12);
    }

    #[test]
    fn standard_probabilities() {
        let two: Vec<f64> = (0..=2).map(|k| pctc_probability(2, k).unwrap()).collect();
        for (p, e) in two.iter().zip(&[1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]) {
            assert!((p - e).abs() < 1e-15);
        }
        let one: Vec<f64> = (0..=1).map(|k| pctc_probability(1, k).unwrap()).collect();
        assert!((one[0] - 0.5).abs() < 1e-15 && (one[1] - 0.5).abs() < 1e-15);

        for m in 1..=6 {
            let mean: f64 = (0..=m)
                .map(|k| k as f64 * pctc_probability(m, k).unwrap())
                .sum();
            assert!((mean - m as f64 / 2.0).abs() < 1e-12);
            assert!(expectation_is_half_m(m));
        }
        assert!(pctc_probability(2, 3).is_err());
    }

    #[test]
    fn two_mode_output_weights() {
        let ctx = CircuitSpec::standard(2).unwrap();
        let out = pctc_output(&ctx, &uniform_weights(2)).unwrap();
        assert!(out.residual.unwrap() < 1e-12);
        let expect = [1.0, 2.0, 1.0];
        for (w, e) in out.weights.iter().zip(&expect) {
            assert!((w - Complex64::new(*e, 0.0)).norm() < 1e-15);
        }
        let probs = out.probabilities();
        for (p, e) in probs.iter().zip(&[1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]) {
            assert!((p - e).abs() < 1e-12);
        }
    }

    #[test]
    fn incomplete_output_frozen_case() {
        // M = 2, N = 2, h = 0.3: weights (0.09, 0.21, 0.1225).
        let ctx = CircuitSpec::standard(2).unwrap();
        let out = incomplete_output(&ctx, &uniform_weights(2), 0.3).unwrap();
        assert!(out.residual.unwrap() < 1e-12);
        let expect = [0.09, 0.21, 0.1225];
        for (w, e) in out.weights.iter().zip(&expect) {
            assert!((w - Complex64::new(*e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn incomplete_probability_edges() {
        assert!((incomplete_probability(3, 3, 1.0, 0).unwrap() - 1.0).abs() < 1e-15);
        for k in 1..=3 {
            assert!(incomplete_probability(3, 3, 1.0, k).unwrap().abs() < 1e-15);
        }
        // M = 1 ratio Pr(1)/Pr(0) = ((1-h)/(h N))^2.
        let (h, n) = (0.3, 4);
        let p0 = incomplete_probability(1, n, h, 0).unwrap();
        let p1 = incomplete_probability(1, n, h, 1).unwrap();
        let ratio = ((1.0 - h) / (h * n as f64)).powi(2);
        assert!((p1 / p0 - ratio).abs() < 1e-12);
        // h = 0 keeps only k = M.
        assert!((incomplete_probability(2, 2, 0.0, 2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn maximal_entanglement_recovers_standard_weights() {
        let ctx = CircuitSpec::standard(2).unwrap();
        let n = ctx.clock().levels();
        let h = 1.0 / (n as f64 + 1.0);
        let out = incomplete_output(&ctx, &uniform_weights(2), h).unwrap();
        // Weights proportional to binomials.
        let scale = out.weights[0].re;
        for (k, w) in out.weights.iter().enumerate() {
            assert!((w.re / scale - binomial(2, k)).abs() < 1e-12);
        }
    }

    #[test]
    fn probabilistic_weights_degenerate_cases() {
        let clock = ClockSpec::new(2).unwrap();
        let tp = clock.orthogonalisation_time();
        // Odd power: beta = 1, alpha = 0 -> binomial weights.
        let w = probabilistic_weights(&clock, 2, 1.0, tp);
        for (k, wk) in w.iter().enumerate() {
            assert!((wk - Complex64::new(binomial(2, k), 0.0)).norm() < 1e-12);
        }
        // Even power: beta = 0 -> all weight on k = 0.
        let w = probabilistic_weights(&clock, 2, 2.0, tp);
        assert!((w[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(w[1].norm() < 1e-12 && w[2].norm() < 1e-12);
        // p = 1/2: weights (1, 2 beta, beta^2).
        let (_, beta) = crate::gates::alpha_beta(0.5);
        let w = probabilistic_weights(&clock, 2, 0.5, tp);
        assert!((w[1] - 2.0 * beta).norm() < 1e-12);
        assert!((w[2] - beta * beta).norm() < 1e-12);
    }

    #[test]
    fn conjecture_exact_for_single_mode() {
        for &p in &[0.25, 0.37, 0.5, 1.0, 1.7] {
            let clock = ClockSpec::new(1).unwrap();
            let tp = clock.orthogonalisation_time();
            for &dt in &[tp, 0.41 * tp, 2.3 * tp] {
                let ctx = CircuitSpec::new(1, clock.clone(), dt, SwapVariant::Power(p)).unwrap();
                let dev = verify_conjecture(&ctx, &[1.0]).unwrap();
                assert!(dev < 1e-12, "p={p} dt={dt}");
            }
        }
    }

    #[test]
    fn zero_norm_postselection_is_an_error() {
        // N = 1 at half the orthogonalisation time: W |phi> = |phi> - |phi>.
        let clock = ClockSpec::new(1).unwrap();
        let dt = 0.5 * clock.orthogonalisation_time();
        let ctx = CircuitSpec::new(1, clock, dt, SwapVariant::Exact).unwrap();
        match pctc_output(&ctx, &[1.0]) {
            Err(Error::PostselectionAnnihilatesInput { .. }) => {}
            other => panic!("expected annihilation error, got {other:?}"),
        }
    }

    #[test]
    fn size_caps_enforced() {
        // M = 5 (N = 5): CR dimension 7776 exceeds the dense cap.
        let ctx = CircuitSpec::standard(5).unwrap();
        assert!(matches!(
            pctc_output(&ctx, &uniform_weights(5)),
            Err(Error::SizeCapExceeded { .. })
        ));
        // Power gates at M = 4 exceed the joint cap.
        let clock = ClockSpec::new(4).unwrap();
        let tp = clock.orthogonalisation_time();
        let ctx = CircuitSpec::new(4, clock, tp, SwapVariant::Power(0.3)).unwrap();
        assert!(matches!(
            verify_conjecture(&ctx, &uniform_weights(4)),
            Err(Error::SizeCapExceeded { .. })
        ));
    }

    #[test]
    fn telescoping_matches_gatewise_single_wormhole() {
        for m in 1..=3 {
            let ctx = CircuitSpec::standard(m).unwrap();
            let c = uniform_weights(m);
            let tele = telescoped_output(ctx.clock(), ctx.delay(), &c).unwrap();
            let input = evolved_input(ctx.clock(), ctx.delay(), &c, 0).unwrap();
            let gate = reduced_apply(&ctx, &input, None).unwrap();
            let dev = tele
                .amplitudes()
                .iter()
                .zip(gate.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0_f64, f64::max);
            assert!(dev < 1e-12, "M={m}");
        }
    }
}
