//! The SWAP gate family and the circuit built from it.
//!
//! Gates are stored symbolically (kind, target modes, parameter) and applied
//! through structured index permutation / pairwise mixing, so no full-space
//! matrix is ever required beyond the explicit materialisation cap.
//!
//! # Gate ordering
//!
//! A gate sequence is written in *application order*: the list `[g1, g2,
//! g3]` acts on a ket as the operator product `g3 * g2 * g1` (left
//! multiplication by each gate in turn). Worked two-mode example, modes
//! `{1,2}` chronology-respecting and `{3,4}` chronology-violating:
//!
//! ```text
//! sequence:  S(1,3)  S(1,4)  S(2,3)  S(2,4)  Rbar(3)  Rbar(4)
//! operator:  (1 (x) 1 (x) Rbar (x) Rbar) S(2,4) S(2,3) S(1,4) S(1,3)
//! ```
//!
//! so a clock entering on mode 1 first meets the swap with mode 3.

use num_complex::Complex64;

use crate::clock::ClockSpec;
use crate::error::{Error, Result};
use crate::state::{ModeBasis, Operator, PureState, MATERIALIZE_CAP};

/// Swap interaction strength: exact vacuum-modified swaps, or the power
/// family `alpha(p) I + beta(p) S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SwapVariant {
    Exact,
    Power(f64),
}

/// `alpha(p) = (1 + e^{-i pi p})/2`, `beta(p) = (1 - e^{-i pi p})/2`;
/// `alpha + beta = 1` identically and `|alpha| + |beta| = 1` for real `p`.
pub fn alpha_beta(p: f64) -> (Complex64, Complex64) {
    let phase = Complex64::new(0.0, -std::f64::consts::PI * p).exp();
    let one = Complex64::new(1.0, 0.0);
    ((one + phase) * 0.5, (one - phase) * 0.5)
}

/// One symbolic gate. Mode indices are 1-based over the full circuit space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// Vacuum-modified swap: exchanges the two mode contents unless either
    /// mode is vacuous.
    VacuumSwap { i: usize, j: usize },
    /// `alpha(p) I + beta(p) VacuumSwap`.
    PowerSwap { i: usize, j: usize, power: f64 },
    /// Vacuum-inclusive clock evolution `Rbar(delay)` on one mode.
    ClockEvolution { mode: usize, delay: f64 },
}

impl Gate {
    /// Line-oriented text form: `kind i j param` (single-mode gates use
    /// `j = 0`).
    pub fn line(&self) -> String {
        match self {
            Gate::VacuumSwap { i, j } => format!("vswap {i} {j} 0"),
            Gate::PowerSwap { i, j, power } => format!("pswap {i} {j} {power}"),
            Gate::ClockEvolution { mode, delay } => format!("evolve {mode} 0 {delay}"),
        }
    }

    fn check_modes(&self, modes: usize) -> Result<()> {
        let bad = |index| Error::ModeOutOfRange { index, modes };
        match *self {
            Gate::VacuumSwap { i, j } | Gate::PowerSwap { i, j, .. } => {
                if i < 1 || i > modes {
                    return Err(bad(i));
                }
                if j < 1 || j > modes {
                    return Err(bad(j));
                }
                if i >= j {
                    return Err(Error::invalid(format!(
                        "two-mode gate needs i < j (got {i}, {j})"
                    )));
                }
            }
            Gate::ClockEvolution { mode, .. } => {
                if mode < 1 || mode > modes {
                    return Err(bad(mode));
                }
            }
        }
        Ok(())
    }
}

/// Where dispersion gates sit relative to the interaction region.
///
/// `LoopMatched` is the model's own reading: the packet disperses while
/// traversing the loop, and the mouth identification forces its past self
/// to match, so the CV gates enter as a conjugation (inverse at loop entry,
/// forward at loop exit). That wrap is what makes the outputs of both
/// prescriptions provably insensitive to the loop dispersion. `EntryOnly`
/// drops the matching inverse and inserts every gate once, ahead of the
/// swap blocks; it exists for exploratory comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DispersionPlacement {
    #[default]
    LoopMatched,
    EntryOnly,
}

/// Neighbour-pair power swaps within each bundle; `cr_powers`/`cv_powers`
/// have length `M - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionSpec {
    pub cr_powers: Vec<f64>,
    pub cv_powers: Vec<f64>,
    pub placement: DispersionPlacement,
}

impl DispersionSpec {
    pub fn new(cr_powers: Vec<f64>, cv_powers: Vec<f64>) -> Self {
        DispersionSpec {
            cr_powers,
            cv_powers,
            placement: DispersionPlacement::LoopMatched,
        }
    }

    pub fn with_placement(mut self, placement: DispersionPlacement) -> Self {
        self.placement = placement;
        self
    }
}

/// The M-mode circuit: M chronology-respecting modes (1..=M) swap with M
/// chronology-violating modes (M+1..=2M), after which the CV modes evolve.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    modes: usize,
    clock: ClockSpec,
    delay: f64,
    swap: SwapVariant,
    dispersion: Option<DispersionSpec>,
}

impl CircuitSpec {
    pub fn new(modes: usize, clock: ClockSpec, delay: f64, swap: SwapVariant) -> Result<Self> {
        if modes < 1 {
            return Err(Error::invalid("need at least one mode per bundle"));
        }
        if clock.levels() < modes {
            return Err(Error::invalid(format!(
                "clock needs at least as many levels as modes (N={} < M={modes})",
                clock.levels()
            )));
        }
        Ok(CircuitSpec {
            modes,
            clock,
            delay,
            swap,
            dispersion: None,
        })
    }

    /// Standard circuit at the orthogonal-clock delay `dt = t_perp`, with
    /// `N = M` clock levels.
    pub fn standard(modes: usize) -> Result<Self> {
        let clock = ClockSpec::new(modes)?;
        let delay = clock.orthogonalisation_time();
        Self::new(modes, clock, delay, SwapVariant::Exact)
    }

    pub fn with_dispersion(mut self, dispersion: DispersionSpec) -> Result<Self> {
        if dispersion.cr_powers.len() != self.modes - 1
            || dispersion.cv_powers.len() != self.modes - 1
        {
            return Err(Error::invalid(format!(
                "dispersion power lists must have length M - 1 = {}",
                self.modes - 1
            )));
        }
        self.dispersion = Some(dispersion);
        Ok(self)
    }

    /// Same circuit with a different time delay (used for loop-weight
    /// recovery, which samples several delays).
    pub fn with_delay(&self, delay: f64) -> Self {
        let mut out = self.clone();
        out.delay = delay;
        out
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn clock(&self) -> &ClockSpec {
        &self.clock
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn swap_variant(&self) -> SwapVariant {
        self.swap
    }

    pub fn dispersion(&self) -> Option<&DispersionSpec> {
        self.dispersion.as_ref()
    }

    pub fn has_power_gates(&self) -> bool {
        matches!(self.swap, SwapVariant::Power(_)) || self.dispersion.is_some()
    }

    pub fn mode_basis(&self) -> ModeBasis {
        ModeBasis::for_clock(&self.clock)
    }

    /// Total mode count of the joint space, `2M`.
    pub fn total_modes(&self) -> usize {
        2 * self.modes
    }

    pub fn cr_dim(&self) -> Result<usize> {
        self.mode_basis().space_dim(self.modes)
    }

    pub fn joint_dim(&self) -> Result<usize> {
        self.mode_basis().space_dim(self.total_modes())
    }

    /// Gate list in application order: dispersion gates per their
    /// placement, for each CR mode `m` the block of swaps with every CV
    /// mode, then the CV clock evolutions. Under the loop-matched placement
    /// the CV dispersion wraps the whole interaction region (inverse powers
    /// first, forward powers after the evolutions).
    pub fn gate_sequence(&self) -> Vec<Gate> {
        let m = self.modes;
        let mut gates = Vec::new();
        let cv_pair = |idx: usize, p: f64| Gate::PowerSwap {
            i: m + idx + 1,
            j: m + idx + 2,
            power: p,
        };
        if let Some(d) = &self.dispersion {
            match d.placement {
                DispersionPlacement::LoopMatched => {
                    // Re-entry matching: the inverse of the loop dispersion,
                    // applied in reverse pair order.
                    for (idx, &p) in d.cv_powers.iter().enumerate().rev() {
                        gates.push(cv_pair(idx, -p));
                    }
                }
                DispersionPlacement::EntryOnly => {
                    for (idx, &p) in d.cv_powers.iter().enumerate() {
                        gates.push(cv_pair(idx, p));
                    }
                }
            }
            for (idx, &p) in d.cr_powers.iter().enumerate() {
                gates.push(Gate::PowerSwap {
                    i: idx + 1,
                    j: idx + 2,
                    power: p,
                });
            }
        }
        for cr in 1..=m {
            for cv in (m + 1)..=(2 * m) {
                gates.push(match self.swap {
                    SwapVariant::Exact => Gate::VacuumSwap { i: cr, j: cv },
                    SwapVariant::Power(p) => Gate::PowerSwap { i: cr, j: cv, power: p },
                });
            }
        }
        for cv in (m + 1)..=(2 * m) {
            gates.push(Gate::ClockEvolution {
                mode: cv,
                delay: self.delay,
            });
        }
        if let Some(d) = &self.dispersion {
            if d.placement == DispersionPlacement::LoopMatched {
                for (idx, &p) in d.cv_powers.iter().enumerate() {
                    gates.push(cv_pair(idx, p));
                }
            }
        }
        gates
    }

    /// Dense matrix of the full circuit unitary; refused above the cap.
    pub fn materialize_unitary(&self) -> Result<Operator> {
        let dim = self.joint_dim()?;
        if dim > MATERIALIZE_CAP {
            return Err(Error::SizeCapExceeded {
                dim,
                cap: MATERIALIZE_CAP,
            });
        }
        materialize_gates(&self.gate_sequence(), &self.clock, self.total_modes())
    }

    /// Apply the circuit to a pure state on the joint `2M`-mode space.
    pub fn apply_to_state(&self, state: &mut PureState) -> Result<()> {
        apply_gates_state(state, &self.gate_sequence(), &self.clock)
    }

    /// Conjugate a density on the joint space: `rho -> U rho U^dagger`.
    pub fn conjugate_density(&self, rho: &mut Operator) -> Result<()> {
        let compiled = compile_gates(
            &self.gate_sequence(),
            &self.clock,
            self.total_modes(),
            rho.side(),
        )?;
        for g in &compiled {
            g.conjugate_density(rho.side(), rho.elements_mut());
        }
        Ok(())
    }

    /// One gate per line, in application order.
    pub fn write_circuit<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for g in self.gate_sequence() {
            writeln!(out, "{}", g.line())?;
        }
        Ok(())
    }
}

/// A gate lowered onto a concrete space dimension: either an involutive
/// index pairing (exact swap), a pairwise mix (power swap), or a diagonal.
pub(crate) enum CompiledGate {
    Swap {
        pairs: Vec<(u32, u32)>,
    },
    Mix {
        pairs: Vec<(u32, u32)>,
        fixed: Vec<u32>,
        alpha: Complex64,
        beta: Complex64,
    },
    Diagonal {
        diag: Vec<Complex64>,
    },
}

pub(crate) fn compile_gate(
    gate: &Gate,
    clock: &ClockSpec,
    modes: usize,
    dim: usize,
) -> Result<CompiledGate> {
    gate.check_modes(modes)?;
    let basis = ModeBasis::for_clock(clock);
    debug_assert_eq!(basis.space_dim(modes)?, dim);
    match *gate {
        Gate::VacuumSwap { i, j } => Ok(CompiledGate::Swap {
            pairs: swap_pairs(basis, i, j, modes, dim),
        }),
        Gate::PowerSwap { i, j, power } => {
            let (alpha, beta) = alpha_beta(power);
            let pairs = swap_pairs(basis, i, j, modes, dim);
            let mut in_pair = vec![false; dim];
            for &(a, b) in &pairs {
                in_pair[a as usize] = true;
                in_pair[b as usize] = true;
            }
            let fixed = (0..dim as u32).filter(|&x| !in_pair[x as usize]).collect();
            Ok(CompiledGate::Mix {
                pairs,
                fixed,
                alpha,
                beta,
            })
        }
        Gate::ClockEvolution { mode, delay } => {
            let rbar = clock.vacuum_evolution_operator(delay);
            let diag = (0..dim)
                .map(|x| rbar.entry(basis.digit(x, mode, modes)))
                .collect();
            Ok(CompiledGate::Diagonal { diag })
        }
    }
}

pub(crate) fn compile_gates(
    gates: &[Gate],
    clock: &ClockSpec,
    modes: usize,
    dim: usize,
) -> Result<Vec<CompiledGate>> {
    gates
        .iter()
        .map(|g| compile_gate(g, clock, modes, dim))
        .collect()
}

/// Index pairs genuinely exchanged by the vacuum-modified swap: both digits
/// nonvacuous and distinct. Everything else is fixed.
fn swap_pairs(basis: ModeBasis, i: usize, j: usize, modes: usize, dim: usize) -> Vec<(u32, u32)> {
    let mut pairs = Vec::new();
    for x in 0..dim {
        let bi = basis.digit(x, i, modes);
        let bj = basis.digit(x, j, modes);
        if bi >= 1 && bj >= 1 && bi < bj {
            pairs.push((x as u32, basis.exchange(x, i, j, modes) as u32));
        }
    }
    pairs
}

impl CompiledGate {
    pub(crate) fn apply_vec(&self, amps: &mut [Complex64]) {
        match self {
            CompiledGate::Swap { pairs } => {
                for &(a, b) in pairs {
                    amps.swap(a as usize, b as usize);
                }
            }
            CompiledGate::Mix {
                pairs,
                fixed,
                alpha,
                beta,
            } => {
                let passthrough = alpha + beta;
                for &(a, b) in pairs {
                    let (x, y) = (amps[a as usize], amps[b as usize]);
                    amps[a as usize] = alpha * x + beta * y;
                    amps[b as usize] = alpha * y + beta * x;
                }
                for &f in fixed {
                    amps[f as usize] *= passthrough;
                }
            }
            CompiledGate::Diagonal { diag } => {
                for (a, d) in amps.iter_mut().zip(diag) {
                    *a *= d;
                }
            }
        }
    }

    /// In-place `rho -> G rho G^dagger` on a row-major `side x side` buffer.
    pub(crate) fn conjugate_density(&self, side: usize, elems: &mut [Complex64]) {
        match self {
            CompiledGate::Swap { pairs } => {
                for &(a, b) in pairs {
                    swap_rows(elems, side, a as usize, b as usize);
                }
                for &(a, b) in pairs {
                    swap_cols(elems, side, a as usize, b as usize);
                }
            }
            CompiledGate::Mix {
                pairs,
                fixed,
                alpha,
                beta,
            } => {
                let passthrough = alpha + beta;
                for &(a, b) in pairs {
                    mix_rows(elems, side, a as usize, b as usize, *alpha, *beta);
                }
                for &f in fixed {
                    scale_row(elems, side, f as usize, passthrough);
                }
                let (ac, bc, pc) = (alpha.conj(), beta.conj(), passthrough.conj());
                for &(a, b) in pairs {
                    mix_cols(elems, side, a as usize, b as usize, ac, bc);
                }
                for &f in fixed {
                    scale_col(elems, side, f as usize, pc);
                }
            }
            CompiledGate::Diagonal { diag } => {
                for (r, row) in elems.chunks_exact_mut(side).enumerate() {
                    let dr = diag[r];
                    for (e, dcol) in row.iter_mut().zip(diag) {
                        *e *= dr * dcol.conj();
                    }
                }
            }
        }
    }
}

fn swap_rows(elems: &mut [Complex64], side: usize, a: usize, b: usize) {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let (head, tail) = elems.split_at_mut(hi * side);
    head[lo * side..(lo + 1) * side].swap_with_slice(&mut tail[..side]);
}

fn swap_cols(elems: &mut [Complex64], side: usize, a: usize, b: usize) {
    for r in 0..side {
        elems.swap(r * side + a, r * side + b);
    }
}

fn mix_rows(elems: &mut [Complex64], side: usize, a: usize, b: usize, alpha: Complex64, beta: Complex64) {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let (head, tail) = elems.split_at_mut(hi * side);
    let row_a = &mut head[lo * side..(lo + 1) * side];
    let row_b = &mut tail[..side];
    for (x, y) in row_a.iter_mut().zip(row_b.iter_mut()) {
        let (old_x, old_y) = (*x, *y);
        *x = alpha * old_x + beta * old_y;
        *y = alpha * old_y + beta * old_x;
    }
}

fn mix_cols(elems: &mut [Complex64], side: usize, a: usize, b: usize, alpha: Complex64, beta: Complex64) {
    for r in 0..side {
        let (x, y) = (elems[r * side + a], elems[r * side + b]);
        elems[r * side + a] = alpha * x + beta * y;
        elems[r * side + b] = alpha * y + beta * x;
    }
}

fn scale_row(elems: &mut [Complex64], side: usize, r: usize, factor: Complex64) {
    for e in &mut elems[r * side..(r + 1) * side] {
        *e *= factor;
    }
}

fn scale_col(elems: &mut [Complex64], side: usize, c: usize, factor: Complex64) {
    for r in 0..side {
        elems[r * side + c] *= factor;
    }
}

/// Apply gates to a pure state, first listed gate first.
pub fn apply_gates_state(state: &mut PureState, gates: &[Gate], clock: &ClockSpec) -> Result<()> {
    let modes = state.modes();
    let dim = state.dim();
    for gate in gates {
        let compiled = compile_gate(gate, clock, modes, dim)?;
        compiled.apply_vec(state.amplitudes_mut());
    }
    Ok(())
}

/// Conjugate a density by the gate list: `rho -> U rho U^dagger` with
/// `U = g_last ... g_first`.
pub fn apply_gates_density(rho: &mut Operator, gates: &[Gate], clock: &ClockSpec) -> Result<()> {
    let modes = rho.modes();
    let side = rho.side();
    for gate in gates {
        let compiled = compile_gate(gate, clock, modes, side)?;
        compiled.conjugate_density(side, rho.elements_mut());
    }
    Ok(())
}

/// Dense matrix of a gate list (columns are the images of basis vectors).
pub fn materialize_gates(gates: &[Gate], clock: &ClockSpec, modes: usize) -> Result<Operator> {
    let basis = ModeBasis::for_clock(clock);
    let dim = basis.space_dim(modes)?;
    if dim > MATERIALIZE_CAP {
        return Err(Error::SizeCapExceeded {
            dim,
            cap: MATERIALIZE_CAP,
        });
    }
    let compiled = compile_gates(gates, clock, modes, dim)?;
    let mut out = Operator::zeros(basis, modes)?;
    let mut column = vec![Complex64::new(0.0, 0.0); dim];
    for b in 0..dim {
        column.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        column[b] = Complex64::new(1.0, 0.0);
        for g in &compiled {
            g.apply_vec(&mut column);
        }
        for (r, amp) in column.iter().enumerate() {
            out.set(r, b, *amp);
        }
    }
    Ok(out)
}
