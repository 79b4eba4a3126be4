//! The reproduction suite: every headline result of the model, evaluated
//! at fixed tolerances with an explicit pass/fail verdict per criterion.
//!
//! The CLI `verify` subcommand runs this suite and exits nonzero when any
//! criterion fails; the acceptance test target drives the same functions.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;

use crate::clock::ClockSpec;
use crate::continuum::{
    binomial, binomial_u128, convergence_report, pctc_h_limit_expectation, pctc_h_limit_pmf,
    LimitFamily,
};
use crate::deutsch::{
    self, ecp_from_seed, fixed_point_term_vector, loop_distribution_from_projection,
    project_onto_family, EcpSeed, FixedPointCoefficients, JointEngine,
};
use crate::dispersion::{dispersion_invariance_check, Prescription};
use crate::error::Result;
use crate::gates::{CircuitSpec, SwapVariant};
use crate::pctc::{
    expectation_is_half_m, incomplete_output, incomplete_probability, pctc_probability,
    recover_loop_weights, reduced_apply, telescoped_output, verify_conjecture,
};
use crate::state::{evolved_input, trace_distance, uniform_weights, PureState};

/// Verdict for one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} [{}]: {} ({})",
            self.id,
            self.title,
            if self.passed { "PASS" } else { "FAIL" },
            self.details
        )
    }
}

struct Criterion {
    id: usize,
    title: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new(id: usize, title: &'static str) -> Self {
        Criterion {
            id,
            title,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Record a bounded measurement: passes when `value < threshold`.
    fn bound(&mut self, label: &str, value: f64, threshold: f64) {
        if !(value < threshold) {
            self.failures
                .push(format!("{label}: {value:.3e} !< {threshold:.1e}"));
        }
    }

    fn require(&mut self, label: &str, ok: bool) {
        if !ok {
            self.failures.push(label.to_string());
        }
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    fn run(mut self, body: impl FnOnce(&mut Criterion) -> Result<()>) -> CriterionOutcome {
        if let Err(e) = body(&mut self) {
            self.failures.push(format!("error: {e}"));
        }
        let passed = self.failures.is_empty();
        let details = if passed {
            self.notes.join("; ")
        } else {
            self.failures.join("; ")
        };
        CriterionOutcome {
            id: self.id,
            title: self.title,
            passed,
            details,
        }
    }
}

/// Deterministic 64-bit mixer for the suite's pseudo-random samples.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// A strictly positive weight vector summing to one.
    fn weights(&mut self, len: usize) -> Vec<f64> {
        let mut w: Vec<f64> = (0..len).map(|_| 0.05 + self.next_f64()).collect();
        let total: f64 = w.iter().sum();
        for x in &mut w {
            *x /= total;
        }
        w
    }
}

/// Independent fixed-term Bessel series used as the oracle for criterion 8.
fn bessel_oracle(order: usize, x: f64) -> f64 {
    let mut sum = 0.0;
    for m in 0..60usize {
        let mut term = (x / 2.0).powi((2 * m + order) as i32);
        for i in 1..=m {
            term /= i as f64;
        }
        for i in 1..=(m + order) {
            term /= i as f64;
        }
        sum += term;
    }
    sum
}

fn max_amp_deviation(a: &PureState, b: &PureState) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0_f64, f64::max)
}

/// Criterion 1: the two-mode P-CTC output and its probabilities.
pub fn criterion_1() -> CriterionOutcome {
    Criterion::new(1, "two-mode P-CTC output").run(|c| {
        let started = Instant::now();
        let ctx = CircuitSpec::standard(2)?;
        let weights = uniform_weights(2);
        let input = evolved_input(ctx.clock(), ctx.delay(), &weights, 0)?;
        let numeric = reduced_apply(&ctx, &input, None)?;
        let expect = crate::state::family_combination(
            ctx.clock(),
            ctx.delay(),
            &weights,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        )?;
        // Proportionality: remove the best-fit scale, then compare.
        let scale = expect.inner(&numeric)? / expect.inner(&expect)?;
        let mut rescaled = expect.scaled(scale);
        rescaled.add_scaled(Complex64::new(-1.0, 0.0), &numeric)?;
        c.bound("proportionality deviation", rescaled.norm(), 1e-10);

        let probs: Vec<f64> = (0..=2).map(|k| pctc_probability(2, k).unwrap()).collect();
        let expected = [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0];
        let dev = probs
            .iter()
            .zip(&expected)
            .map(|(p, e)| (p - e).abs())
            .fold(0.0_f64, f64::max);
        c.bound("probability deviation", dev, 1e-10);

        let elapsed = started.elapsed().as_secs_f64();
        c.bound("runtime (s)", elapsed, 1.0);
        c.note(format!(
            "probabilities ({:.6}, {:.6}, {:.6}), runtime {elapsed:.3}s",
            probs[0], probs[1], probs[2]
        ));
        Ok(())
    })
}

/// Criterion 2: the analytic fixed-point family and coherence decay.
pub fn criterion_2() -> CriterionOutcome {
    Criterion::new(2, "D-CTC fixed-point family").run(|c| {
        let started = Instant::now();
        let mut worst_residual = 0.0_f64;
        let mut worst_decay_iters = 0usize;
        for m in [2usize, 3] {
            let ctx = CircuitSpec::standard(m)?;
            let clock = ctx.clock().clone();
            let tp = ctx.delay();
            let sigma = deutsch::input_density(&clock, &uniform_weights(m))?;
            let mut engine = JointEngine::new(&ctx)?;
            for bits in 0..1usize << m {
                let occupation: Vec<bool> =
                    (0..m).map(|i| bits >> (m - 1 - i) & 1 == 1).collect();
                let term = fixed_point_term_vector(&clock, tp, &occupation)?.to_density();
                let mapped = engine.cv_map(&sigma, &term)?;
                let residual = trace_distance(&mapped, &term)?;
                worst_residual = worst_residual.max(residual);
            }

            // Clock-vacuum coherence seed: must leave the family span fast.
            let vacuum = PureState::basis_state(ctx.mode_basis(), m, 0)?;
            let mut occupation = vec![false; m];
            occupation[0] = true;
            let clocked = fixed_point_term_vector(&clock, tp, &occupation)?;
            let mut seed_vec = vacuum.scaled(Complex64::new(0.5_f64.sqrt(), 0.0));
            seed_vec.add_scaled(Complex64::new(0.5_f64.sqrt(), 0.0), &clocked)?;
            let mut theta = seed_vec.to_density();
            let mut decayed = None;
            for iter in 1..=100 {
                theta = engine.cv_map(&sigma, &theta)?;
                let (_, leak) = project_onto_family(&theta, &clock, tp, m)?;
                if leak < 1e-10 {
                    decayed = Some(iter);
                    break;
                }
            }
            match decayed {
                Some(iters) => worst_decay_iters = worst_decay_iters.max(iters),
                None => c.require(
                    &format!("M={m}: coherence component did not decay in 100 iterations"),
                    false,
                ),
            }
        }
        c.bound("fixed-point residual", worst_residual, 1e-12);
        let elapsed = started.elapsed().as_secs_f64();
        c.bound("runtime (s)", elapsed, 30.0);
        c.note(format!(
            "max residual {worst_residual:.2e}, coherence gone within \
             {worst_decay_iters} iterations, runtime {elapsed:.1}s"
        ));
        Ok(())
    })
}

/// Criterion 3: ECP iteration reproduces the binomial mixture.
pub fn criterion_3() -> CriterionOutcome {
    Criterion::new(3, "ECP reproduction").run(|c| {
        let mut worst_pr = 0.0_f64;
        for m in [2usize, 3] {
            let ctx = CircuitSpec::standard(m)?;
            for &g in &[0.3, 0.5, 0.8] {
                let seed = EcpSeed::uniform(g, ctx.clock().levels())?;
                let (outcome, _) =
                    ecp_from_seed(&ctx, &uniform_weights(m), &seed, 1e-12, 10_000)?;
                c.require(
                    &format!("M={m} g={g}: ECP iteration converged"),
                    outcome.converged(),
                );
                let (coeffs, _) =
                    project_onto_family(outcome.state(), ctx.clock(), ctx.delay(), m)?;
                let pr = loop_distribution_from_projection(&coeffs, m);
                for (k, p) in pr.iter().enumerate() {
                    let expect = deutsch::ecp_probability(m, g, k)?;
                    worst_pr = worst_pr.max((p - expect).abs());
                }
                if m == 2 {
                    let expect = [
                        g * g,
                        g * (1.0 - g),
                        g * (1.0 - g),
                        (1.0 - g) * (1.0 - g),
                    ];
                    let dev = coeffs
                        .iter()
                        .zip(&expect)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0_f64, f64::max);
                    c.bound(&format!("M=2 g={g} coefficient identities"), dev, 1e-10);
                }
            }
        }
        c.bound("loop probability deviation", worst_pr, 1e-8);
        c.note(format!("max probability deviation {worst_pr:.2e}"));
        Ok(())
    })
}

/// Criterion 4: binomial weights from the gatewise path; exact expectation.
pub fn criterion_4() -> CriterionOutcome {
    Criterion::new(4, "P-CTC binomial weights").run(|c| {
        let mut worst = 0.0_f64;
        for m in 1..=4usize {
            let ctx = CircuitSpec::standard(m)?;
            let tp = ctx.delay();
            let delays: Vec<f64> = (0..3).map(|s| tp * (0.389 + 0.2137 * s as f64)).collect();
            let recovered = recover_loop_weights(&ctx, &uniform_weights(m), &delays)?;
            for (k, w) in recovered.iter().enumerate() {
                let expect = binomial_u128(m, k) as f64;
                worst = worst.max((w - Complex64::new(expect, 0.0)).norm());
            }
        }
        c.bound("recovered weight deviation", worst, 1e-8);

        for m in 1..=6usize {
            c.require(
                &format!("M={m}: expectation identity 2*sum(k C^2) == M*C(2M,M)"),
                expectation_is_half_m(m),
            );
        }
        c.note(format!(
            "max |recovered - binom| {worst:.2e} over M=1..4; expectation exact for M=1..6"
        ));
        Ok(())
    })
}

/// Criterion 5: incomplete teleportation against its closed form.
pub fn criterion_5() -> CriterionOutcome {
    Criterion::new(5, "incomplete teleportation").run(|c| {
        let mut worst = 0.0_f64;
        for m in [2usize, 3] {
            let ctx = CircuitSpec::standard(m)?;
            let n = ctx.clock().levels();
            let weights = uniform_weights(m);
            for &h in &[0.3, 1.0 / (n as f64 + 1.0), 0.9] {
                let out = incomplete_output(&ctx, &weights, h)?;
                worst = worst.max(out.residual.unwrap_or(f64::INFINITY));
                if (h - 1.0 / (n as f64 + 1.0)).abs() < 1e-15 {
                    // Maximal entanglement: weights proportional to binomials.
                    let scale = out.weights[0].re;
                    let dev = out
                        .weights
                        .iter()
                        .enumerate()
                        .map(|(k, w)| (w.re / scale - binomial(m, k)).abs())
                        .fold(0.0_f64, f64::max);
                    c.bound(
                        &format!("M={m} h=1/(N+1) reduces to binomial weights"),
                        dev,
                        1e-10,
                    );
                }
            }
        }
        c.bound("gatewise vs closed form", worst, 1e-10);
        c.note(format!("max relative deviation {worst:.2e}"));
        Ok(())
    })
}

/// Criterion 6: the probabilistic-swap conjecture at the orthogonal delay.
pub fn criterion_6() -> CriterionOutcome {
    Criterion::new(6, "probabilistic-swap conjecture").run(|c| {
        let mut worst = 0.0_f64;
        for m in 1..=3usize {
            let clock = ClockSpec::new(m)?;
            let tp = clock.orthogonalisation_time();
            for &p in &[0.25, 0.37, 0.5, 1.0] {
                let ctx = CircuitSpec::new(m, clock.clone(), tp, SwapVariant::Power(p))?;
                let dev = verify_conjecture(&ctx, &uniform_weights(m))?;
                worst = worst.max(dev);
            }
        }
        c.bound("max component deviation", worst, 1e-8);
        c.note(format!(
            "max deviation {worst:.2e} over M=1..3, p in {{0.25,0.37,0.5,1}}"
        ));
        Ok(())
    })
}

/// Criterion 7: the rescaled D-CTC binomial converges to its Poisson limit.
pub fn criterion_7() -> CriterionOutcome {
    Criterion::new(7, "continuum D-CTC").run(|c| {
        let family = LimitFamily::dctc(0.5)?;
        let report = convergence_report(&family, &[8, 16, 32, 64, 128, 256])?;
        for pair in report.windows(2) {
            c.require(
                &format!(
                    "distance nonincreasing M={}->{} ({:.3e} -> {:.3e})",
                    pair[0].m, pair[1].m, pair[0].sup_distance, pair[1].sup_distance
                ),
                pair[1].sup_distance <= pair[0].sup_distance + 1e-15,
            );
        }
        let last = report.last().unwrap();
        c.bound("final sup distance (M=256)", last.sup_distance, 1e-2);

        let support = family.support_len()?;
        let mean: f64 = (0..support)
            .map(|k| k as f64 * family.limit_pmf(k).unwrap())
            .sum();
        c.bound(
            "limit expectation vs ln 2",
            (mean - 2.0_f64.ln()).abs(),
            1e-10,
        );
        c.note(format!(
            "sup distance at M=256: {:.3e}; E = {mean:.12}",
            last.sup_distance
        ));
        Ok(())
    })
}

/// Criterion 8: both P-CTC regularisations against their Bessel limits.
pub fn criterion_8() -> CriterionOutcome {
    Criterion::new(8, "continuum P-CTC").run(|c| {
        let m_list = [8usize, 16, 32, 64, 128, 256];
        let h_family = LimitFamily::pctc_h(0.5)?;
        let h_report = convergence_report(&h_family, &m_list)?;
        c.bound(
            "h-variant final sup distance (M=256)",
            h_report.last().unwrap().sup_distance,
            1e-2,
        );
        let b_family = LimitFamily::pctc_beta(1.0)?;
        let b_report = convergence_report(&b_family, &m_list)?;
        c.bound(
            "beta-variant final sup distance (M=256)",
            b_report.last().unwrap().sup_distance,
            1e-2,
        );

        let i0 = bessel_oracle(0, 2.0);
        let i1 = bessel_oracle(1, 2.0);
        c.bound(
            "Pr(0) at h=1/2 vs series oracle",
            (pctc_h_limit_pmf(0, 0.5)? - 1.0 / i0).abs(),
            1e-6,
        );
        c.bound(
            "expectation at h=1/2 vs series oracle",
            (pctc_h_limit_expectation(0.5)? - i1 / i0).abs(),
            1e-6,
        );
        c.note(format!(
            "h: {:.3e}, beta: {:.3e}; Pr(0)={:.5}, E={:.5}",
            h_report.last().unwrap().sup_distance,
            b_report.last().unwrap().sup_distance,
            pctc_h_limit_pmf(0, 0.5)?,
            pctc_h_limit_expectation(0.5)?,
        ));
        Ok(())
    })
}

/// Criterion 9: dispersion leaves both prescriptions' outputs unchanged.
pub fn criterion_9() -> CriterionOutcome {
    Criterion::new(9, "dispersion invariance").run(|c| {
        let mut worst = 0.0_f64;
        for m in [2usize, 3] {
            for &p in &[0.2, 0.37, 0.8] {
                for prescription in [Prescription::DctcEcp { g: 0.4 }, Prescription::Pctc] {
                    let report = dispersion_invariance_check(m, p, prescription)?;
                    worst = worst
                        .max(report.state_deviation)
                        .max(report.distribution_deviation);
                }
            }
        }
        c.bound("max deviation from base model", worst, 1e-10);
        c.note(format!(
            "max deviation {worst:.2e} over M=2,3 and p in {{0.2,0.37,0.8}}"
        ));
        Ok(())
    })
}

/// Criterion 10: separate wormholes match the single-wormhole model.
pub fn criterion_10() -> CriterionOutcome {
    Criterion::new(10, "separate-wormhole equivalence").run(|c| {
        let mut worst_dctc = 0.0_f64;
        for m in [2usize, 3] {
            let clock = ClockSpec::new(m)?;
            let tp = clock.orthogonalisation_time();
            let weights = uniform_weights(m);
            for &g in &[0.4, 0.75] {
                let outputs =
                    deutsch::separate_ctc_outputs(&vec![g; m], &clock, tp, &weights)?;
                let coeffs = FixedPointCoefficients::ecp(m, g)?;
                let ecp_cr = deutsch::analytic_cr_state(&coeffs, &clock, tp, &weights)?;
                worst_dctc = worst_dctc.max(trace_distance(&outputs.cr_state, &ecp_cr)?);
            }
        }
        c.bound("separate CR vs ECP CR trace distance", worst_dctc, 1e-10);

        let mut worst_tele = 0.0_f64;
        for m in 1..=4usize {
            let ctx = CircuitSpec::standard(m)?;
            let weights = uniform_weights(m);
            let tele = telescoped_output(ctx.clock(), ctx.delay(), &weights)?;
            let input = evolved_input(ctx.clock(), ctx.delay(), &weights, 0)?;
            let single = reduced_apply(&ctx, &input, None)?;
            worst_tele = worst_tele.max(max_amp_deviation(&tele, &single));
        }
        c.bound("telescoped vs single-wormhole output", worst_tele, 1e-10);
        c.note(format!(
            "D-CTC max {worst_dctc:.2e}; telescoping max {worst_tele:.2e}"
        ));
        Ok(())
    })
}

/// Criterion 11: clock orthogonality and the overlap formula.
pub fn criterion_11() -> CriterionOutcome {
    Criterion::new(11, "clock algebra").run(|c| {
        let mut worst_orth = 0.0_f64;
        for n in 1..=8usize {
            let clock = ClockSpec::new(n)?;
            let tp = clock.orthogonalisation_time();
            let family: Vec<Vec<Complex64>> =
                (0..n).map(|k| clock.evolved_clock_state(tp, k)).collect();
            for i in 0..n {
                for j in 0..i {
                    let overlap: Complex64 = family[i]
                        .iter()
                        .zip(&family[j])
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    worst_orth = worst_orth.max(overlap.norm());
                }
            }
        }
        c.bound("pairwise overlap of evolved family", worst_orth, 1e-12);

        let mut rng = SplitMix64(0x5eed_c10c);
        let mut worst_formula = 0.0_f64;
        for _ in 0..100 {
            let n = 1 + (rng.next_u64() % 8) as usize;
            let clock = ClockSpec::new(n)?;
            let tp = clock.orthogonalisation_time();
            let t = (rng.next_f64() - 0.5) * 6.0 * tp;
            let dt = rng.next_f64() * 3.0 * n as f64 * tp;
            let direct: Complex64 = clock
                .clock_state(t)
                .iter()
                .zip(&clock.clock_state(t + dt))
                .map(|(a, b)| a.conj() * b)
                .sum();
            worst_formula = worst_formula.max((clock.overlap(t, dt) - direct).norm());
        }
        c.bound("overlap formula vs direct inner product", worst_formula, 1e-12);
        c.note(format!(
            "orthogonality {worst_orth:.2e}; formula deviation {worst_formula:.2e} \
             over 100 samples"
        ));
        Ok(())
    })
}

/// Criterion 12: robustness — localisation-weight independence, pmf
/// normalisation, and the non-convergence exit path of the CLI binary.
pub fn criterion_12(cli_binary: &Path) -> CriterionOutcome {
    Criterion::new(12, "robustness properties").run(|c| {
        let mut rng = SplitMix64(0xb111_a4d5);
        let mut worst_c_indep = 0.0_f64;
        for m in [2usize, 3] {
            let ctx = CircuitSpec::standard(m)?;
            let tp = ctx.delay();
            let g = 0.55;
            let reference: Vec<f64> = (0..=m)
                .map(|k| deutsch::ecp_probability(m, g, k).unwrap())
                .collect();
            let delays: Vec<f64> = (0..3).map(|s| tp * (0.389 + 0.2137 * s as f64)).collect();
            let ref_weights: Vec<f64> = (0..=m).map(|k| binomial(m, k)).collect();
            for _ in 0..5 {
                let weights = rng.weights(m);

                // D-CTC: iterate, project, compare loop distribution.
                let seed = EcpSeed::uniform(g, ctx.clock().levels())?;
                let (outcome, _) = ecp_from_seed(&ctx, &weights, &seed, 1e-12, 10_000)?;
                c.require("ECP converged at random localisation", outcome.converged());
                let (coeffs, _) = project_onto_family(outcome.state(), ctx.clock(), tp, m)?;
                let pr = loop_distribution_from_projection(&coeffs, m);
                for (p, e) in pr.iter().zip(&reference) {
                    worst_c_indep = worst_c_indep.max((p - e).abs());
                }

                // P-CTC: recovered loop weights must stay the binomials.
                let recovered = recover_loop_weights(&ctx, &weights, &delays)?;
                for (w, e) in recovered.iter().zip(&ref_weights) {
                    worst_c_indep = worst_c_indep.max((w - Complex64::new(*e, 0.0)).norm());
                }
            }
        }
        c.bound("localisation-weight independence", worst_c_indep, 1e-10);

        // Normalisation of every pmf family in play.
        let mut worst_norm = 0.0_f64;
        let mut check_norm = |total: f64| {
            worst_norm = worst_norm.max((total - 1.0).abs());
        };
        check_norm(
            (0..=256)
                .map(|k| deutsch::rescaled_probability(256, 0.5, k).unwrap())
                .sum(),
        );
        check_norm(
            (0..=256)
                .map(|k| incomplete_probability(256, 256, 0.5, k).unwrap())
                .sum(),
        );
        check_norm(
            (0..=256)
                .map(|k| crate::pctc::beta_weight_probability(256, 1.0 / 256.0, k).unwrap())
                .sum(),
        );
        check_norm((0..=4).map(|k| pctc_probability(4, k).unwrap()).sum());
        for family in [
            LimitFamily::dctc(0.5)?,
            LimitFamily::pctc_h(0.5)?,
            LimitFamily::pctc_beta(1.0)?,
        ] {
            let support = family.support_len()?;
            check_norm((0..support).map(|k| family.limit_pmf(k).unwrap()).sum());
        }
        c.bound("pmf normalisation", worst_norm, 1e-10);

        // The deliberately starved ECP run must exit with code 4.
        let status = std::process::Command::new(cli_binary)
            .args([
                "dctc", "--iterate", "--ecp", "--g", "0.5", "--M", "2", "--N", "2",
                "--tol", "1e-300", "--max-iter", "1",
            ])
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .status();
        match status {
            Ok(s) => c.require(
                &format!("non-convergence exits with code 4 (got {:?})", s.code()),
                s.code() == Some(4),
            ),
            Err(e) => c.require(&format!("spawning CLI binary failed: {e}"), false),
        }
        c.note(format!(
            "c-independence {worst_c_indep:.2e}; normalisation {worst_norm:.2e}; \
             exit-code path ok"
        ));
        Ok(())
    })
}

/// Run the full suite. `cli_binary` is the executable used to exercise the
/// non-convergence exit-code path of criterion 12.
pub fn run_all(cli_binary: &Path) -> Vec<CriterionOutcome> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
        criterion_12(cli_binary),
    ]
}

/// Render the suite report; one line per criterion plus a tail summary.
pub fn render_report(outcomes: &[CriterionOutcome]) -> String {
    let mut out = String::new();
    for outcome in outcomes {
        let _ = writeln!(out, "{}", outcome.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed == 0 {
        let _ = writeln!(out, "all {} criteria passed", outcomes.len());
    } else {
        let _ = writeln!(out, "{failed} of {} criteria FAILED", outcomes.len());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    // The full criteria run in the acceptance suite; here only the cheap
    // pure-function ones are smoke-tested.
    #[test]
    fn cheap_criteria_pass() {
        for outcome in [criterion_1(), criterion_7(), criterion_8(), criterion_11()] {
            assert!(outcome.passed, "{}", outcome.line());
        }
    }

    #[test]
    fn splitmix_is_deterministic() {
        let mut a = SplitMix64(42);
        let mut b = SplitMix64(42);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let w = SplitMix64(7).weights(3);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
