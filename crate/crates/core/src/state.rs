//! Multi-mode states and operators over vacuum-inclusive modes.
//!
//! Every mode carries `N + 1` basis states: index 0 is the vacuum, indices
//! `1..=N` are the clock levels. Composite basis states are enumerated by a
//! mixed-radix integer with mode 1 as the *most significant* digit, so for
//! `d = 3`, `M = 2` the product state `|b1=1> (x) |b2=2>` sits at index
//! `1*3 + 2 = 5`. All dense storage is row-major.

use std::io::Write;

use num_complex::Complex64;

use crate::clock::ClockSpec;
use crate::error::{Error, Result};
use crate::linalg;

/// Largest Hilbert-space dimension for which dense operators (matrices)
/// may be materialised.
pub const MATERIALIZE_CAP: usize = 4096;

/// Tolerance for Hermiticity / unit-trace validation of densities.
pub const TOL_DENSITY: f64 = 1e-10;

/// Eigenvalue floor absorbing roundoff in positivity checks.
pub const TOL_EIGENVALUE_FLOOR: f64 = -1e-8;

/// Per-mode basis bookkeeping: dimension plus index arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeBasis {
    per_mode_dim: usize,
}

impl ModeBasis {
    pub fn new(per_mode_dim: usize) -> Result<Self> {
        if per_mode_dim < 2 {
            return Err(Error::invalid("per-mode dimension must be at least 2"));
        }
        Ok(ModeBasis { per_mode_dim })
    }

    pub fn for_clock(clock: &ClockSpec) -> Self {
        ModeBasis {
            per_mode_dim: clock.mode_dim(),
        }
    }

    pub fn dim(&self) -> usize {
        self.per_mode_dim
    }

    /// Total dimension of `modes` modes, guarding against overflow.
    pub fn space_dim(&self, modes: usize) -> Result<usize> {
        let mut dim: usize = 1;
        for _ in 0..modes {
            dim = dim
                .checked_mul(self.per_mode_dim)
                .ok_or_else(|| Error::invalid("mode space dimension overflows usize"))?;
        }
        Ok(dim)
    }

    /// Stride of `mode` (1-based) in a `modes`-mode index.
    pub fn stride(&self, mode: usize, modes: usize) -> usize {
        self.per_mode_dim.pow((modes - mode) as u32)
    }

    /// Digit of `index` at `mode` (1-based).
    pub fn digit(&self, index: usize, mode: usize, modes: usize) -> usize {
        index / self.stride(mode, modes) % self.per_mode_dim
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &d| acc * self.per_mode_dim + d)
    }

    /// Index with the digits at modes `i` and `j` exchanged.
    pub fn exchange(&self, index: usize, i: usize, j: usize, modes: usize) -> usize {
        let si = self.stride(i, modes) as i64;
        let sj = self.stride(j, modes) as i64;
        let bi = (index as i64 / si) % self.per_mode_dim as i64;
        let bj = (index as i64 / sj) % self.per_mode_dim as i64;
        (index as i64 + (bj - bi) * si + (bi - bj) * sj) as usize
    }
}

/// Nonnegative per-basis-index weights used by the weighted partial trace.
/// `weights[0]` applies to the vacuum, `weights[n]` to clock level `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    weights: Vec<f64>,
}

impl WeightProfile {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::invalid("weight profile needs at least two entries"));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::invalid("weight profile entries must be nonnegative"));
        }
        Ok(WeightProfile { weights })
    }

    /// All-ones profile: the weighted trace degenerates to the plain one.
    pub fn uniform(per_mode_dim: usize) -> Self {
        WeightProfile {
            weights: vec![1.0; per_mode_dim],
        }
    }

    /// Profile of the partially entangled teleportation resource:
    /// `h` on the vacuum, `(1 - h)/N` on each clock level.
    pub fn incomplete_teleportation(levels: usize, h: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&h) {
            return Err(Error::invalid("teleportation parameter h must lie in [0, 1]"));
        }
        let mut weights = vec![(1.0 - h) / levels as f64; levels + 1];
        weights[0] = h;
        WeightProfile::new(weights)
    }

    pub fn weight(&self, basis_index: usize) -> f64 {
        self.weights[basis_index]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Product of per-digit weights over a composite basis string.
    pub fn string_weight(&self, basis: ModeBasis, index: usize, modes: usize) -> f64 {
        let mut w = 1.0;
        let mut rest = index;
        for _ in 0..modes {
            w *= self.weights[rest % basis.dim()];
            rest /= basis.dim();
        }
        w
    }
}

/// A pure state over `modes` vacuum-inclusive modes.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    basis: ModeBasis,
    modes: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn from_amplitudes(basis: ModeBasis, modes: usize, amps: Vec<Complex64>) -> Result<Self> {
        let dim = basis.space_dim(modes)?;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: amps.len(),
            });
        }
        Ok(PureState { basis, modes, amps })
    }

    pub fn zero(basis: ModeBasis, modes: usize) -> Result<Self> {
        let dim = basis.space_dim(modes)?;
        Ok(PureState {
            basis,
            modes,
            amps: vec![Complex64::new(0.0, 0.0); dim],
        })
    }

    pub fn basis_state(basis: ModeBasis, modes: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(basis, modes)?;
        if index >= s.amps.len() {
            return Err(Error::invalid(format!("basis index {index} out of range")));
        }
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// The localised input family: a single clock spread over `M` modes,
    /// `sum_m sqrt(c_m) |0..0, phi, 0..0>` with the clock in mode `m`.
    pub fn localized(clock_amps: &[Complex64], mode_weights: &[f64]) -> Result<Self> {
        let levels = clock_amps.len();
        if levels == 0 {
            return Err(Error::invalid("clock amplitude vector is empty"));
        }
        let modes = mode_weights.len();
        if modes == 0 {
            return Err(Error::invalid("need at least one mode weight"));
        }
        if mode_weights.iter().any(|c| !(*c >= 0.0)) {
            return Err(Error::invalid("mode weights must be nonnegative"));
        }
        let total: f64 = mode_weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!(
                "mode weights must sum to 1 (got {total})"
            )));
        }
        let basis = ModeBasis::new(levels + 1)?;
        let mut state = Self::zero(basis, modes)?;
        for (m, c) in mode_weights.iter().enumerate() {
            let root = c.sqrt();
            let stride = basis.stride(m + 1, modes);
            for (n, amp) in clock_amps.iter().enumerate() {
                state.amps[(n + 1) * stride] += root * amp;
            }
        }
        Ok(state)
    }

    pub fn basis(&self) -> ModeBasis {
        self.basis
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n < 1e-14 {
            return Err(Error::PostselectionAnnihilatesInput { norm: n });
        }
        let inv = 1.0 / n;
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(())
    }

    pub fn scaled(&self, factor: Complex64) -> PureState {
        let mut out = self.clone();
        for a in &mut out.amps {
            *a *= factor;
        }
        out
    }

    pub fn add_scaled(&mut self, factor: Complex64, other: &PureState) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        if self.basis != other.basis {
            return Err(Error::invalid("tensor product needs matching per-mode bases"));
        }
        let modes = self.modes + other.modes;
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        PureState::from_amplitudes(self.basis, modes, amps)
    }

    pub fn to_density(&self) -> DensityOperator {
        DensityOperator(Operator::from_pure(self))
    }

    /// Text snapshot: one `index real imag` row per nonzero amplitude.
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (idx, amp) in self.amps.iter().enumerate() {
            if amp.re != 0.0 || amp.im != 0.0 {
                writeln!(out, "{} {:.17e} {:.17e}", idx, amp.re, amp.im)?;
            }
        }
        Ok(())
    }
}

/// The evolved input family `|Phi_M^(k)(dt)>`: each occupied mode carries a
/// clock evolved through `k` steps of `dt`, vacua are untouched.
pub fn evolved_input(
    clock: &ClockSpec,
    dt: f64,
    mode_weights: &[f64],
    ticks: usize,
) -> Result<PureState> {
    PureState::localized(&clock.evolved_clock_state(dt, ticks), mode_weights)
}

/// Uniform localisation weights `c_m = 1/M`.
pub fn uniform_weights(modes: usize) -> Vec<f64> {
    vec![1.0 / modes as f64; modes]
}

/// Linear combination `sum_k w_k |Phi_M^(k)(dt)>` (not normalised).
pub fn family_combination(
    clock: &ClockSpec,
    dt: f64,
    mode_weights: &[f64],
    weights: &[Complex64],
) -> Result<PureState> {
    let mut acc = PureState::zero(
        ModeBasis::new(clock.mode_dim())?,
        mode_weights.len(),
    )?;
    for (k, w) in weights.iter().enumerate() {
        let member = evolved_input(clock, dt, mode_weights, k)?;
        acc.add_scaled(*w, &member)?;
    }
    Ok(acc)
}

/// A general linear operator on `modes` vacuum-inclusive modes, stored as a
/// dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    basis: ModeBasis,
    modes: usize,
    side: usize,
    elems: Vec<Complex64>,
}

impl Operator {
    pub fn zeros(basis: ModeBasis, modes: usize) -> Result<Self> {
        let side = basis.space_dim(modes)?;
        if side > MATERIALIZE_CAP {
            return Err(Error::SizeCapExceeded {
                dim: side,
                cap: MATERIALIZE_CAP,
            });
        }
        Ok(Operator {
            basis,
            modes,
            side,
            elems: vec![Complex64::new(0.0, 0.0); side * side],
        })
    }

    pub fn identity(basis: ModeBasis, modes: usize) -> Result<Self> {
        let mut op = Self::zeros(basis, modes)?;
        for i in 0..op.side {
            op.elems[i * op.side + i] = Complex64::new(1.0, 0.0);
        }
        Ok(op)
    }

    pub fn from_pure(state: &PureState) -> Self {
        let side = state.dim();
        let mut elems = Vec::with_capacity(side * side);
        for a in state.amplitudes() {
            for b in state.amplitudes() {
                elems.push(a * b.conj());
            }
        }
        Operator {
            basis: state.basis(),
            modes: state.modes(),
            side,
            elems,
        }
    }

    pub fn from_elements(
        basis: ModeBasis,
        modes: usize,
        elems: Vec<Complex64>,
    ) -> Result<Self> {
        let side = basis.space_dim(modes)?;
        if elems.len() != side * side {
            return Err(Error::DimensionMismatch {
                expected: side * side,
                got: elems.len(),
            });
        }
        Ok(Operator {
            basis,
            modes,
            side,
            elems,
        })
    }

    pub fn basis(&self) -> ModeBasis {
        self.basis
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn elements(&self) -> &[Complex64] {
        &self.elems
    }

    pub fn elements_mut(&mut self) -> &mut [Complex64] {
        &mut self.elems
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.elems[row * self.side + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.elems[row * self.side + col] = value;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.side).map(|i| self.elems[i * self.side + i]).sum()
    }

    pub fn scale(&mut self, factor: Complex64) {
        for e in &mut self.elems {
            *e *= factor;
        }
    }

    pub fn add_scaled(&mut self, factor: f64, other: &Operator) -> Result<()> {
        if self.side != other.side {
            return Err(Error::DimensionMismatch {
                expected: self.side,
                got: other.side,
            });
        }
        for (a, b) in self.elems.iter_mut().zip(&other.elems) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        if self.side != other.side {
            return Err(Error::DimensionMismatch {
                expected: self.side,
                got: other.side,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.elems.iter_mut().zip(&other.elems) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &Operator) -> Result<Operator> {
        if self.side != other.side {
            return Err(Error::DimensionMismatch {
                expected: self.side,
                got: other.side,
            });
        }
        let n = self.side;
        let mut out = Operator {
            basis: self.basis,
            modes: self.modes,
            side: n,
            elems: vec![Complex64::new(0.0, 0.0); n * n],
        };
        for i in 0..n {
            for k in 0..n {
                let a = self.elems[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.elems[k * n..(k + 1) * n];
                let dst = &mut out.elems[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn conj_transpose(&self) -> Operator {
        let n = self.side;
        let mut elems = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                elems[c * n + r] = self.elems[r * n + c].conj();
            }
        }
        Operator {
            basis: self.basis,
            modes: self.modes,
            side: n,
            elems,
        }
    }

    pub fn apply_to_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.side {
            return Err(Error::DimensionMismatch {
                expected: self.side,
                got: v.len(),
            });
        }
        let n = self.side;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for r in 0..n {
            let row = &self.elems[r * n..(r + 1) * n];
            out[r] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        Ok(out)
    }

    pub fn tensor(&self, other: &Operator) -> Result<Operator> {
        if self.basis != other.basis {
            return Err(Error::invalid("tensor product needs matching per-mode bases"));
        }
        let modes = self.modes + other.modes;
        let side = self
            .side
            .checked_mul(other.side)
            .ok_or_else(|| Error::invalid("tensor dimension overflow"))?;
        if side > MATERIALIZE_CAP {
            return Err(Error::SizeCapExceeded {
                dim: side,
                cap: MATERIALIZE_CAP,
            });
        }
        let mut elems = vec![Complex64::new(0.0, 0.0); side * side];
        kron_into(&mut elems, &self.elems, self.side, &other.elems, other.side);
        Ok(Operator {
            basis: self.basis,
            modes,
            side,
            elems,
        })
    }

    /// Trace out the given modes (1-based, need not be contiguous); the
    /// remaining modes keep their relative order.
    pub fn partial_trace(&self, traced_modes: &[usize]) -> Result<Operator> {
        self.weighted_partial_trace_impl(traced_modes, None)
    }

    /// Weighted partial trace `sum_j w(j) <j| op |j>` over the traced modes,
    /// where `w(j)` is the product of per-digit profile weights along the
    /// traced basis string `j`. A uniform profile reproduces the plain
    /// partial trace.
    pub fn weighted_partial_trace(
        &self,
        traced_modes: &[usize],
        profile: &WeightProfile,
    ) -> Result<Operator> {
        if profile.len() != self.basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.dim(),
                got: profile.len(),
            });
        }
        self.weighted_partial_trace_impl(traced_modes, Some(profile))
    }

    fn weighted_partial_trace_impl(
        &self,
        traced_modes: &[usize],
        profile: Option<&WeightProfile>,
    ) -> Result<Operator> {
        let d = self.basis.dim();
        let mut is_traced = vec![false; self.modes + 1];
        for &m in traced_modes {
            if m < 1 || m > self.modes {
                return Err(Error::ModeOutOfRange {
                    index: m,
                    modes: self.modes,
                });
            }
            if is_traced[m] {
                return Err(Error::invalid(format!("mode {m} traced twice")));
            }
            is_traced[m] = true;
        }
        let kept: Vec<usize> = (1..=self.modes).filter(|m| !is_traced[*m]).collect();
        let kept_count = kept.len();
        let traced_count = traced_modes.len();
        let kept_dim = self.basis.space_dim(kept_count)?;
        let traced_dim = self.basis.space_dim(traced_count)?;

        // Map a (kept, traced) digit pair back to a full source index.
        let kept_strides: Vec<usize> = kept
            .iter()
            .map(|&m| self.basis.stride(m, self.modes))
            .collect();
        let mut traced_strides: Vec<usize> = Vec::with_capacity(traced_count);
        for m in 1..=self.modes {
            if is_traced[m] {
                traced_strides.push(self.basis.stride(m, self.modes));
            }
        }
        let expand = |compact: usize, strides: &[usize]| -> usize {
            let mut rest = compact;
            let mut full = 0;
            for stride in strides.iter().rev() {
                full += (rest % d) * stride;
                rest /= d;
            }
            full
        };

        let mut out = Operator {
            basis: self.basis,
            modes: kept_count,
            side: kept_dim,
            elems: vec![Complex64::new(0.0, 0.0); kept_dim * kept_dim],
        };
        for t in 0..traced_dim {
            let t_full = expand(t, &traced_strides);
            let w = match profile {
                Some(p) => p.string_weight(self.basis, t, traced_count),
                None => 1.0,
            };
            if w == 0.0 {
                continue;
            }
            for r in 0..kept_dim {
                let r_full = expand(r, &kept_strides) + t_full;
                for c in 0..kept_dim {
                    let c_full = expand(c, &kept_strides) + t_full;
                    out.elems[r * kept_dim + c] += w * self.elems[r_full * self.side + c_full];
                }
            }
        }
        Ok(out)
    }

    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(self.side, &self.elems)
    }

    pub fn hs_norm(&self) -> f64 {
        self.elems
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Expectation value `<psi| op |psi>`.
    pub fn expectation(&self, state: &PureState) -> Result<Complex64> {
        let applied = self.apply_to_vec(state.amplitudes())?;
        Ok(state
            .amplitudes()
            .iter()
            .zip(&applied)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Text snapshot: one `flat-index real imag` row per nonzero entry,
    /// where the flat index is `row * side + col`.
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (idx, e) in self.elems.iter().enumerate() {
            if e.re != 0.0 || e.im != 0.0 {
                writeln!(out, "{} {:.17e} {:.17e}", idx, e.re, e.im)?;
            }
        }
        Ok(())
    }
}

fn kron_into(
    out: &mut [Complex64],
    a: &[Complex64],
    a_side: usize,
    b: &[Complex64],
    b_side: usize,
) {
    let side = a_side * b_side;
    for ar in 0..a_side {
        for br in 0..b_side {
            let row = ar * b_side + br;
            let dst = &mut out[row * side..(row + 1) * side];
            for ac in 0..a_side {
                let f = a[ar * a_side + ac];
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                let brow = &b[br * b_side..(br + 1) * b_side];
                let chunk = &mut dst[ac * b_side..(ac + 1) * b_side];
                for (d, bb) in chunk.iter_mut().zip(brow) {
                    *d = f * bb;
                }
            }
        }
    }
}

/// A density operator: an [`Operator`] with Hermitian/unit-trace/PSD
/// semantics. Validation is explicit rather than enforced at construction
/// so that intermediate arithmetic stays cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(pub Operator);

impl std::ops::Deref for DensityOperator {
    type Target = Operator;
    fn deref(&self) -> &Operator {
        &self.0
    }
}

impl std::ops::DerefMut for DensityOperator {
    fn deref_mut(&mut self) -> &mut Operator {
        &mut self.0
    }
}

impl DensityOperator {
    pub fn new(op: Operator) -> Self {
        DensityOperator(op)
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(DensityOperator(self.0.tensor(&other.0)?))
    }

    /// Hermitian within 1e-10, unit trace within 1e-10 (when `normalized`),
    /// and positive semidefinite down to the -1e-8 eigenvalue floor.
    pub fn validate(&self, normalized: bool) -> Result<()> {
        let n = self.side();
        for r in 0..n {
            for c in r..n {
                let a = self.entry(r, c);
                let b = self.entry(c, r).conj();
                if (a - b).norm() > TOL_DENSITY {
                    return Err(Error::DensityInvalid(format!(
                        "not Hermitian at ({r},{c}): {:.3e}",
                        (a - b).norm()
                    )));
                }
            }
        }
        let tr = self.trace();
        if normalized && (tr - Complex64::new(1.0, 0.0)).norm() > TOL_DENSITY {
            return Err(Error::DensityInvalid(format!(
                "trace {tr} differs from 1"
            )));
        }
        let min = self
            .hermitian_eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < TOL_EIGENVALUE_FLOOR {
            return Err(Error::DensityInvalid(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }
}

/// Trace distance `(1/2) sum |eig(a - b)|`.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    let diff = a.0.sub(&b.0)?;
    Ok(0.5 * diff.hermitian_eigenvalues().iter().map(|e| e.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::complex_close;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn index_convention_mode_one_most_significant() {
        let basis = ModeBasis::new(3).unwrap();
        // |b1=1, b2=2> lives at index 1*3 + 2 = 5.
        assert_eq!(basis.index_of(&[1, 2]), 5);
        assert_eq!(basis.digit(5, 1, 2), 1);
        assert_eq!(basis.digit(5, 2, 2), 2);
        assert_eq!(basis.exchange(5, 1, 2, 2), basis.index_of(&[2, 1]));
    }

    #[test]
    fn localized_input_shapes() {
        let clock = ClockSpec::new(2).unwrap();
        let phi = clock.clock_state(0.0);

        // M = 1 is the bare clock embedded at indices 1..=N.
        let s = PureState::localized(&phi, &[1.0]).unwrap();
        assert!(complex_close(s.amplitudes()[1], phi[0]));
        assert!(complex_close(s.amplitudes()[2], phi[1]));
        assert!(s.amplitudes()[0].norm() < 1e-15);

        // M = 2: sqrt(c1)|phi,0> + sqrt(c2)|0,phi>.
        let s = PureState::localized(&phi, &[0.25, 0.75]).unwrap();
        let basis = s.basis();
        assert!(complex_close(
            s.amplitudes()[basis.index_of(&[1, 0])],
            0.5 * phi[0]
        ));
        assert!(complex_close(
            s.amplitudes()[basis.index_of(&[0, 2])],
            0.75f64.sqrt() * phi[1]
        ));
        assert!((s.norm() - 1.0).abs() < 1e-12);

        // Weight-sum violation is a contract error.
        assert!(PureState::localized(&phi, &[0.5, 0.6]).is_err());
    }

    #[test]
    fn tensor_dimensions_and_round_trip() {
        let basis = ModeBasis::new(3).unwrap();
        let a = PureState::basis_state(basis, 1, 0).unwrap();
        let b = PureState::basis_state(basis, 1, 0).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.dim(), 9);
        assert!(complex_close(ab.amplitudes()[0], c(1.0, 0.0)));

        // Product densities: tracing out the second factor recovers the first.
        let clock = ClockSpec::new(2).unwrap();
        let x = PureState::localized(&clock.clock_state(0.3), &[1.0])
            .unwrap()
            .to_density();
        let y = PureState::localized(&clock.clock_state(1.1), &[1.0])
            .unwrap()
            .to_density();
        let joint = x.tensor(&y).unwrap();
        let back = joint.partial_trace(&[2]).unwrap();
        for (p, q) in back.elements().iter().zip(x.elements()) {
            assert!(complex_close(*p, *q));
        }
    }

    #[test]
    fn partial_trace_preserves_trace_and_hermiticity() {
        let clock = ClockSpec::new(2).unwrap();
        let phi = clock.clock_state(0.0);
        let s = PureState::localized(&phi, &[0.3, 0.7]).unwrap();
        let rho = s.to_density();

        let all = rho.partial_trace(&[1, 2]).unwrap();
        assert_eq!(all.side(), 1);
        assert!(complex_close(all.entry(0, 0), rho.trace()));

        let reduced = DensityOperator(rho.partial_trace(&[1]).unwrap());
        assert!(complex_close(reduced.trace(), c(1.0, 0.0)));
        reduced.validate(true).unwrap();

        assert!(rho.partial_trace(&[3]).is_err());
        assert!(rho.partial_trace(&[1, 1]).is_err());
    }

    #[test]
    fn maximally_entangled_reduces_to_maximally_mixed() {
        // (|11> + |22>)/sqrt(2) over two 3-dimensional modes.
        let basis = ModeBasis::new(3).unwrap();
        let mut s = PureState::zero(basis, 2).unwrap();
        let r = 1.0 / 2f64.sqrt();
        s.amplitudes_mut()[basis.index_of(&[1, 1])] = c(r, 0.0);
        s.amplitudes_mut()[basis.index_of(&[2, 2])] = c(r, 0.0);
        let reduced = s.to_density().partial_trace(&[2]).unwrap();
        for n in 1..=2 {
            assert!(complex_close(reduced.entry(n, n), c(0.5, 0.0)));
        }
        assert!(reduced.entry(1, 2).norm() < 1e-14);
    }

    #[test]
    fn weighted_trace_degenerates_to_plain_trace() {
        let clock = ClockSpec::new(2).unwrap();
        let s = PureState::localized(&clock.clock_state(0.4), &[0.5, 0.5]).unwrap();
        let rho = s.to_density();
        let plain = rho.partial_trace(&[2]).unwrap();
        let uniform = rho
            .weighted_partial_trace(&[2], &WeightProfile::uniform(3))
            .unwrap();
        for (p, q) in plain.elements().iter().zip(uniform.elements()) {
            assert!(complex_close(*p, *q));
        }

        // Vacuum-only profile keeps exactly the all-vacuum diagonal block.
        let vac_only = WeightProfile::new(vec![1.0, 0.0, 0.0]).unwrap();
        let projected = rho.weighted_partial_trace(&[2], &vac_only).unwrap();
        let mut expect = Operator::zeros(rho.basis(), 1).unwrap();
        for r in 0..3 {
            for col in 0..3 {
                expect.set(r, col, rho.entry(r * 3, col * 3));
            }
        }
        for (p, q) in projected.elements().iter().zip(expect.elements()) {
            assert!(complex_close(*p, *q));
        }
    }

    #[test]
    fn trace_distance_basics() {
        let clock = ClockSpec::new(2).unwrap();
        let tp = clock.orthogonalisation_time();
        let a = PureState::localized(&clock.clock_state(0.0), &[1.0])
            .unwrap()
            .to_density();
        let b = PureState::localized(&clock.clock_state(tp), &[1.0])
            .unwrap()
            .to_density();
        assert!(trace_distance(&a, &a).unwrap() < 1e-12);
        // Orthogonal pure states sit at distance 1.
        assert!((trace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-10);

        // Mixing toward the midpoint can only shrink the distance.
        let mut mid = a.clone();
        mid.0.scale(c(0.5, 0.0));
        mid.0.add_scaled(0.5, &b.0).unwrap();
        let half = trace_distance(&a, &mid).unwrap();
        assert!(half <= trace_distance(&a, &b).unwrap() + 1e-12);
    }

    #[test]
    fn partial_trace_is_linear() {
        let clock = ClockSpec::new(2).unwrap();
        let x = PureState::localized(&clock.clock_state(0.2), &[0.6, 0.4]).unwrap();
        let y = PureState::localized(&clock.clock_state(1.9), &[0.1, 0.9]).unwrap();
        let (alpha, beta) = (0.3, 0.7);
        let mut mix = x.to_density();
        mix.0.scale(c(alpha, 0.0));
        mix.0.add_scaled(beta, &y.to_density().0).unwrap();

        let lhs = mix.partial_trace(&[1]).unwrap();
        let mut rhs = x.to_density().partial_trace(&[1]).unwrap();
        rhs.scale(c(alpha, 0.0));
        rhs.add_scaled(beta, &y.to_density().partial_trace(&[1]).unwrap())
            .unwrap();
        for (p, q) in lhs.elements().iter().zip(rhs.elements()) {
            assert!(complex_close(*p, *q));
        }
    }

    #[test]
    fn entangled_family_orthogonality_at_t_perp() {
        let clock = ClockSpec::new(3).unwrap();
        let tp = clock.orthogonalisation_time();
        let weights = [0.2, 0.5, 0.3];
        let family: Vec<_> = (0..=3)
            .map(|k| evolved_input(&clock, tp, &weights, k).unwrap())
            .collect();
        for j in 0..3 {
            for k in 0..3 {
                let ov = family[j].inner(&family[k]).unwrap().norm();
                if j == k {
                    assert!((ov - 1.0).abs() < 1e-12);
                } else {
                    assert!(ov < 1e-12);
                }
            }
        }
        // The ladder is N-periodic: k = N realigns with k = 0 up to phase.
        let wrap = family[0].inner(&family[3]).unwrap().norm();
        assert!((wrap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn snapshot_lists_nonzero_amplitudes() {
        let basis = ModeBasis::new(3).unwrap();
        let mut s = PureState::zero(basis, 1).unwrap();
        s.amplitudes_mut()[2] = c(0.25, -0.5);
        let mut buf = Vec::new();
        s.write_snapshot(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("2 "));
    }
}
