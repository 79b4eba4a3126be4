//! Quantum clock states on an equally spaced energy ladder.
//!
//! A clock is a uniform superposition of `N` energy eigenstates with
//! energies `E_n = E1 + (n-1)*dE`. Free evolution only rotates the phases
//! of the components, and after the orthogonalisation time `t_perp =
//! 2*pi*hbar / (N*dE)` the state is orthogonal to where it started. The
//! ladder therefore supports exactly `N` mutually orthogonal states
//! reachable by repeated `t_perp` steps, which is what lets a clock count
//! loops through the circuit.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute/relative tolerance used for scalar comparisons throughout the
/// crate: `a ~ b` iff `|a - b| <= TOL_SCALAR * max(1, |a|, |b|)`.
pub const TOL_SCALAR: f64 = 1e-12;

/// True when two complex scalars agree within [`TOL_SCALAR`].
pub fn complex_close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= TOL_SCALAR * 1.0_f64.max(a.norm()).max(b.norm())
}

/// Energy-ladder clock definition.
///
/// `base_energy` defaults to `spacing` so that `E_n = n * dE`; with that
/// choice `trace(R(t_perp))` vanishes exactly (the phases are the full set
/// of N-th roots of unity), which the probabilistic-swap results rely on.
/// Any other `base_energy` only contributes a global phase to single-clock
/// sectors; see the tests.
#[derive(Debug, Clone, PartialEq)]
pub struct ClockSpec {
    levels: usize,
    base_energy: f64,
    spacing: f64,
    hbar: f64,
}

impl ClockSpec {
    /// Clock with `levels` states, `E1 = dE = 1`, `hbar = 1`.
    pub fn new(levels: usize) -> Result<Self> {
        Self::with_params(levels, 1.0, 1.0, 1.0)
    }

    pub fn with_params(levels: usize, base_energy: f64, spacing: f64, hbar: f64) -> Result<Self> {
        if levels < 1 {
            return Err(Error::invalid("clock must have at least one level"));
        }
        if !(spacing > 0.0) {
            return Err(Error::invalid("level spacing must be positive"));
        }
        if !(hbar > 0.0) {
            return Err(Error::invalid("hbar must be positive"));
        }
        if !base_energy.is_finite() {
            return Err(Error::invalid("base energy must be finite"));
        }
        Ok(ClockSpec {
            levels,
            base_energy,
            spacing,
            hbar,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Dimension of one vacuum-inclusive mode, `N + 1`.
    pub fn mode_dim(&self) -> usize {
        self.levels + 1
    }

    /// Energy of level `n` (1-based).
    pub fn energy(&self, n: usize) -> f64 {
        self.base_energy + (n as f64 - 1.0) * self.spacing
    }

    /// Smallest duration after which the clock state becomes orthogonal to
    /// itself: `2*pi*hbar / (N*dE)`.
    pub fn orthogonalisation_time(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar / (self.levels as f64 * self.spacing)
    }

    /// Clock state at time `t`: component `n` is `exp(-i E_n t / hbar) / sqrt(N)`.
    pub fn clock_state(&self, t: f64) -> Vec<Complex64> {
        let norm = 1.0 / (self.levels as f64).sqrt();
        (1..=self.levels)
            .map(|n| (Complex64::new(0.0, -self.energy(n) * t / self.hbar)).exp() * norm)
            .collect()
    }

    /// Clock state evolved through `ticks` steps of `dt`, i.e. `R(dt)^ticks |phi>`.
    pub fn evolved_clock_state(&self, dt: f64, ticks: usize) -> Vec<Complex64> {
        self.clock_state(ticks as f64 * dt)
    }

    /// Overlap `<phi(t)|phi(t + dt)>`, evaluated from the closed-form phase
    /// sum. Independent of `t`; the argument is accepted to make that
    /// t-independence testable against the direct inner product.
    pub fn overlap(&self, _t: f64, dt: f64) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 1..=self.levels {
            sum += Complex64::new(0.0, -self.energy(n) * dt / self.hbar).exp();
        }
        sum / self.levels as f64
    }

    /// Time-evolution operator `R(dt)` on the bare clock space, diagonal in
    /// the energy basis with entries `exp(-i E_n dt / hbar)`.
    pub fn evolution_operator(&self, dt: f64) -> DiagonalUnitary {
        DiagonalUnitary {
            diag: (1..=self.levels)
                .map(|n| Complex64::new(0.0, -self.energy(n) * dt / self.hbar).exp())
                .collect(),
        }
    }

    /// Vacuum-inclusive evolution `Rbar(dt) = |0><0| + R(dt)`: identity on
    /// the vacuum index, clock phases on the rest. `<0|Rbar|0> = 1` for all
    /// `dt`.
    pub fn vacuum_evolution_operator(&self, dt: f64) -> DiagonalUnitary {
        let mut diag = Vec::with_capacity(self.mode_dim());
        diag.push(Complex64::new(1.0, 0.0));
        diag.extend(self.evolution_operator(dt).diag);
        DiagonalUnitary { diag }
    }
}

/// A unitary that is diagonal in the computational (energy) basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalUnitary {
    diag: Vec<Complex64>,
}

impl DiagonalUnitary {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn entry(&self, n: usize) -> Complex64 {
        self.diag[n]
    }

    pub fn diagonal(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn trace(&self) -> Complex64 {
        self.diag.iter().sum()
    }

    /// Composition `self * other` (phases add).
    pub fn compose(&self, other: &DiagonalUnitary) -> Result<DiagonalUnitary> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(DiagonalUnitary {
            diag: self
                .diag
                .iter()
                .zip(&other.diag)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn apply(&self, state: &mut [Complex64]) -> Result<()> {
        if state.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: state.len(),
            });
        }
        for (amp, d) in state.iter_mut().zip(&self.diag) {
            *amp *= d;
        }
        Ok(())
    }

    /// Dense row-major matrix form.
    pub fn matrix(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for (i, d) in self.diag.iter().enumerate() {
            m[i * n + i] = *d;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }

    #[test]
    fn orthogonalisation_time_formula() {
        let spec = ClockSpec::with_params(2, PI, PI, 1.0).unwrap();
        assert!((spec.orthogonalisation_time() - 1.0).abs() < 1e-15);

        let spec = ClockSpec::with_params(1, 0.5, 0.5, 1.0).unwrap();
        assert!((spec.orthogonalisation_time() - 2.0 * PI / 0.5).abs() < 1e-12);

        let spec = ClockSpec::with_params(4, 1.0, 1.0, 1.0).unwrap();
        assert!((spec.orthogonalisation_time() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn clock_state_components() {
        let spec = ClockSpec::new(3).unwrap();
        let at_zero = spec.clock_state(0.0);
        for amp in &at_zero {
            assert!(complex_close(*amp, Complex64::new(1.0 / 3f64.sqrt(), 0.0)));
        }

        // N=2, E1=0: at dE*t = pi the second component picks up phase -1.
        let spec = ClockSpec::with_params(2, 0.0, PI, 1.0).unwrap();
        let s = spec.clock_state(1.0);
        let r = 1.0 / 2f64.sqrt();
        assert!(complex_close(s[0], Complex64::new(r, 0.0)));
        assert!(complex_close(s[1], Complex64::new(-r, 0.0)));

        // Unit norm at arbitrary times.
        let spec = ClockSpec::new(5).unwrap();
        for &t in &[0.0, 0.37, 12.9, -4.4] {
            let s = spec.clock_state(t);
            assert!((inner(&s, &s).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn overlap_vanishes_at_orthogonalisation_time() {
        for n in 1..=8 {
            let spec = ClockSpec::new(n).unwrap();
            let tp = spec.orthogonalisation_time();
            if n > 1 {
                assert!(spec.overlap(0.0, tp).norm() < 1e-12, "N={n}");
            }
            assert!(complex_close(spec.overlap(0.3, 0.0), Complex64::new(1.0, 0.0)));
            // After N steps every phase realigns: pure phase of magnitude 1.
            let full = spec.overlap(0.0, n as f64 * tp);
            assert!((full.norm() - 1.0).abs() < 1e-12, "N={n}");
        }
    }

    #[test]
    fn overlap_is_t_independent_and_matches_inner_product() {
        let spec = ClockSpec::with_params(4, 2.0, 0.7, 1.3).unwrap();
        let dt = 0.613;
        let reference = spec.overlap(0.0, dt);
        // Ten spread-out t values; the closed form ignores t, the direct
        // inner product must agree at each of them.
        for i in 0..10 {
            let t = -3.0 + 1.7 * i as f64;
            let direct = inner(&spec.clock_state(t), &spec.clock_state(t + dt));
            assert!(complex_close(direct, reference), "t={t}");
        }
    }

    #[test]
    fn overlap_periodic_in_dt() {
        let spec = ClockSpec::new(3).unwrap();
        let tp = spec.orthogonalisation_time();
        let period = spec.levels() as f64 * tp;
        for &dt in &[0.0, 0.2 * tp, 1.4 * tp, 2.9 * tp] {
            let a = spec.overlap(0.0, dt).norm();
            let b = spec.overlap(0.0, dt + period).norm();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn evolution_operator_action_and_additivity() {
        let spec = ClockSpec::new(4).unwrap();
        let id = spec.evolution_operator(0.0);
        for n in 0..4 {
            assert!(complex_close(id.entry(n), Complex64::new(1.0, 0.0)));
        }

        let a = spec.evolution_operator(0.31);
        let b = spec.evolution_operator(1.07);
        let ab = a.compose(&b).unwrap();
        let direct = spec.evolution_operator(0.31 + 1.07);
        for n in 0..4 {
            assert!(complex_close(ab.entry(n), direct.entry(n)));
        }

        // R(dt) |phi(t)> = |phi(t + dt)>.
        let mut s = spec.clock_state(0.4);
        spec.evolution_operator(0.9).apply(&mut s).unwrap();
        let expect = spec.clock_state(1.3);
        for (x, y) in s.iter().zip(&expect) {
            assert!(complex_close(*x, *y));
        }

        // N=2, E1=0: R(t_perp) = diag(1, -1).
        let spec = ClockSpec::with_params(2, 0.0, 1.0, 1.0).unwrap();
        let r = spec.evolution_operator(spec.orthogonalisation_time());
        assert!(complex_close(r.entry(0), Complex64::new(1.0, 0.0)));
        assert!(complex_close(r.entry(1), Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn vacuum_evolution_fixes_vacuum() {
        let spec = ClockSpec::new(3).unwrap();
        for &dt in &[0.0, 0.77, 5.3] {
            let rbar = spec.vacuum_evolution_operator(dt);
            assert_eq!(rbar.dim(), 4);
            assert!(complex_close(rbar.entry(0), Complex64::new(1.0, 0.0)));
        }
        let id = spec.vacuum_evolution_operator(0.0);
        for n in 0..4 {
            assert!(complex_close(id.entry(n), Complex64::new(1.0, 0.0)));
        }
    }

    #[test]
    fn trace_of_vacuum_evolution_at_t_perp() {
        // With E1 = dE the bare trace vanishes at t_perp, so tr(Rbar) = 1.
        for n in 2..=6 {
            let spec = ClockSpec::new(n).unwrap();
            let tp = spec.orthogonalisation_time();
            let bare: Complex64 = spec.evolution_operator(tp).trace();
            assert!(bare.norm() < 1e-12, "N={n}");
            let full = spec.vacuum_evolution_operator(tp).trace();
            assert!(complex_close(full, Complex64::new(1.0, 0.0)));
        }
    }

    #[test]
    fn evolved_family_mutually_orthogonal() {
        for n in 1..=8 {
            let spec = ClockSpec::new(n).unwrap();
            let tp = spec.orthogonalisation_time();
            let family: Vec<_> = (0..n).map(|k| spec.evolved_clock_state(tp, k)).collect();
            for i in 0..n {
                for j in 0..n {
                    let ov = inner(&family[i], &family[j]).norm();
                    if i == j {
                        assert!((ov - 1.0).abs() < 1e-12);
                    } else {
                        assert!(ov < 1e-12, "N={n} i={i} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn base_energy_is_a_global_phase_on_single_clocks() {
        // Same ladder spacing, shifted base energy: states differ by a
        // k- and t-dependent overall phase only.
        let a = ClockSpec::with_params(3, 1.0, 1.0, 1.0).unwrap();
        let b = ClockSpec::with_params(3, 4.2, 1.0, 1.0).unwrap();
        let dt = 0.83;
        for k in 0..4 {
            let sa = a.evolved_clock_state(dt, k);
            let sb = b.evolved_clock_state(dt, k);
            let phase = sb[0] / sa[0];
            assert!((phase.norm() - 1.0).abs() < 1e-12);
            for (x, y) in sa.iter().zip(&sb) {
                assert!(complex_close(x * phase, *y));
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ClockSpec::new(0).is_err());
        assert!(ClockSpec::with_params(2, 0.0, -1.0, 1.0).is_err());
        assert!(ClockSpec::with_params(2, 0.0, 1.0, 0.0).is_err());
    }
}
