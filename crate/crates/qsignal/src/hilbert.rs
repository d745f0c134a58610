//! Dense complex linear algebra over small multi-qubit Hilbert spaces.
//!
//! States live in the computational basis with qubit 1 as the most
//! significant bit of the amplitude index. The Ψ-basis
//! |Ψ_x⟩ = (|x⟩ + i|x̄⟩)/√2 is never materialized as a change-of-basis
//! matrix; every Ψ-basis ket is expanded into its two computational
//! terms on the fly.

use num_complex::Complex64;

use crate::{Error, Result, TOL_ALG, TOL_NORM};

pub const MAX_QUBITS: usize = 8;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn check_qubit_count(n: usize) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(Error::QubitCountOutOfRange(n));
    }
    Ok(())
}

/// The (θ, α, β) triple parameterizing a one-qubit strategy operator.
///
/// θ ∈ [0, π], α ∈ [0, 2π), β ∈ [0, 2π). The identity is (0, 0, 0).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UnitaryParams {
    theta: f64,
    alpha: f64,
    beta: f64,
}

impl UnitaryParams {
    pub const IDENTITY: UnitaryParams = UnitaryParams {
        theta: 0.0,
        alpha: 0.0,
        beta: 0.0,
    };

    pub fn new(theta: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !theta.is_finite() || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::NonFinite("unitary parameters"));
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::ParameterOutOfRange {
                name: "theta",
                value: theta,
                range: "[0, pi]",
            });
        }
        let tau = 2.0 * std::f64::consts::PI;
        if !(0.0..tau).contains(&alpha) {
            return Err(Error::ParameterOutOfRange {
                name: "alpha",
                value: alpha,
                range: "[0, 2pi)",
            });
        }
        if !(0.0..tau).contains(&beta) {
            return Err(Error::ParameterOutOfRange {
                name: "beta",
                value: beta,
                range: "[0, 2pi)",
            });
        }
        Ok(UnitaryParams { theta, alpha, beta })
    }

    /// One-parameter operator U(θ) = U(θ, 0, 0); the classical-equivalent moves.
    pub fn theta_only(theta: f64) -> Result<Self> {
        Self::new(theta, 0.0, 0.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_theta_only(&self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0
    }

    /// Matrix representation with respect to the computational basis:
    ///
    /// ```text
    /// [ e^{iα}cos(θ/2)    i e^{iβ}sin(θ/2)  ]
    /// [ i e^{-iβ}sin(θ/2) e^{-iα}cos(θ/2)   ]
    /// ```
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let c = (self.theta / 2.0).cos();
        let s = (self.theta / 2.0).sin();
        let ea = Complex64::from_polar(1.0, self.alpha);
        let eb = Complex64::from_polar(1.0, self.beta);
        let i = Complex64::i();
        [[ea * c, i * eb * s], [i * eb.conj() * s, ea.conj() * c]]
    }
}

/// See [`UnitaryParams::matrix`].
pub fn su2_matrix(p: &UnitaryParams) -> [[Complex64; 2]; 2] {
    p.matrix()
}

/// Normalized complex amplitude vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

// Applies a 2x2 matrix to the given 1-based qubit, in place.
fn apply_single(amps: &mut [Complex64], n_qubits: usize, qubit: usize, m: &[[Complex64; 2]; 2]) {
    let stride = 1usize << (n_qubits - qubit);
    for idx in 0..amps.len() {
        if idx & stride == 0 {
            let j = idx | stride;
            let a = amps[idx];
            let b = amps[j];
            amps[idx] = m[0][0] * a + m[0][1] * b;
            amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }
}

impl StateVector {
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch {
                left: n_qubits,
                right: amps.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let state = StateVector { n_qubits, amps };
        let norm2: f64 = state.amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > TOL_NORM {
            return Err(Error::NumericInvariant(format!(
                "state norm² = {norm2}, expected 1"
            )));
        }
        Ok(state)
    }

    /// Computational basis state |x⟩.
    pub fn computational(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::QubitIndexOutOfRange {
                index,
                n_qubits,
            });
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index] = Complex64::ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Ψ-basis state |Ψ_x⟩ = (|x⟩ + i|x̄⟩)/√2, where x̄ is the bitwise negation.
    pub fn psi_basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::QubitIndexOutOfRange {
                index,
                n_qubits,
            });
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amps[index ^ (dim - 1)] = Complex64::new(0.0, FRAC_1_SQRT_2);
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// ⟨Ψ_x|self⟩ = (self[x] − i·self[x̄])/√2.
    pub fn psi_component(&self, x: usize) -> Complex64 {
        let mask = self.amps.len() - 1;
        (self.amps[x] - Complex64::i() * self.amps[x ^ mask]) * FRAC_1_SQRT_2
    }

    /// (U₁⊗…⊗U_n)|self⟩; `ops[j]` acts on qubit j+1.
    pub fn apply_local(&self, ops: &[UnitaryParams]) -> Result<StateVector> {
        if ops.len() != self.n_qubits {
            return Err(Error::ArityMismatch {
                expected: self.n_qubits,
                got: ops.len(),
            });
        }
        let mut amps = self.amps.clone();
        for (j, p) in ops.iter().enumerate() {
            if *p != UnitaryParams::IDENTITY {
                apply_single(&mut amps, self.n_qubits, j + 1, &p.matrix());
            }
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps,
        })
    }

    /// Applies operators to the listed (1-based) qubits, identity elsewhere.
    pub fn apply_on_qubits(&self, ops: &[(usize, UnitaryParams)]) -> Result<StateVector> {
        let mut amps = self.amps.clone();
        for (qubit, p) in ops {
            if *qubit < 1 || *qubit > self.n_qubits {
                return Err(Error::QubitIndexOutOfRange {
                    index: *qubit,
                    n_qubits: self.n_qubits,
                });
            }
            apply_single(&mut amps, self.n_qubits, *qubit, &p.matrix());
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps,
        })
    }
}

/// Sum of |Ψ_x⟩⟨Ψ_x| over every x that matches the fixed (qubit, bit)
/// constraints; unconstrained indices are summed over. An empty
/// constraint set is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiProjector {
    n_qubits: usize,
    constraints: Vec<(usize, bool)>,
}

impl PsiProjector {
    pub fn new(n_qubits: usize, constraints: &[(usize, bool)]) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut sorted: Vec<(usize, bool)> = Vec::new();
        for &(qubit, bit) in constraints {
            if qubit < 1 || qubit > n_qubits {
                return Err(Error::QubitIndexOutOfRange {
                    index: qubit,
                    n_qubits,
                });
            }
            match sorted.iter().find(|(q, _)| *q == qubit) {
                Some(&(_, b)) if b != bit => return Err(Error::ConflictingConstraint(qubit)),
                Some(_) => {}
                None => sorted.push((qubit, bit)),
            }
        }
        sorted.sort_unstable();
        Ok(PsiProjector {
            n_qubits,
            constraints: sorted,
        })
    }

    pub fn identity(n_qubits: usize) -> Self {
        PsiProjector {
            n_qubits,
            constraints: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn constraints(&self) -> &[(usize, bool)] {
        &self.constraints
    }

    /// Does the Ψ-basis label x satisfy every fixed bit?
    pub fn matches(&self, x: usize) -> bool {
        self.constraints.iter().all(|&(qubit, bit)| {
            let pos = self.n_qubits - qubit;
            ((x >> pos) & 1 == 1) == bit
        })
    }

    /// Labels of the Ψ-basis kets spanned by this projector.
    pub fn matching_labels(&self) -> impl Iterator<Item = usize> + '_ {
        (0..1usize << self.n_qubits).filter(|&x| self.matches(x))
    }

    // P|ψ⟩, unnormalized.
    fn apply_raw(&self, state: &StateVector) -> Vec<Complex64> {
        let dim = state.dim();
        let mask = dim - 1;
        let mut out = vec![Complex64::ZERO; dim];
        for x in self.matching_labels() {
            let c = state.psi_component(x);
            out[x] += c * FRAC_1_SQRT_2;
            out[x ^ mask] += c * Complex64::new(0.0, FRAC_1_SQRT_2);
        }
        out
    }
}

/// ⟨state|P|state⟩, clamped to [0, 1].
pub fn project_prob(state: &StateVector, proj: &PsiProjector) -> Result<f64> {
    if state.n_qubits() != proj.n_qubits {
        return Err(Error::DimensionMismatch {
            left: state.n_qubits(),
            right: proj.n_qubits,
        });
    }
    let p: f64 = proj
        .matching_labels()
        .map(|x| state.psi_component(x).norm_sqr())
        .sum();
    if !(-TOL_ALG..=1.0 + TOL_ALG).contains(&p) {
        return Err(Error::NumericInvariant(format!(
            "projection probability {p} outside [0, 1]"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// (P|state⟩/√⟨state|P|state⟩, probability).
///
/// Fails with [`Error::ZeroProbabilityBranch`] when the probability is at
/// or below tolerance — the signature of an off-path information set.
pub fn post_measurement(state: &StateVector, proj: &PsiProjector) -> Result<(StateVector, f64)> {
    let p = project_prob(state, proj)?;
    if p <= TOL_ALG {
        return Err(Error::ZeroProbabilityBranch(p));
    }
    let mut amps = proj.apply_raw(state);
    let scale = 1.0 / p.sqrt();
    for a in &mut amps {
        *a *= scale;
    }
    Ok((
        StateVector {
            n_qubits: state.n_qubits(),
            amps,
        },
        p,
    ))
}

/// Payoff-weighted sum of Ψ-basis projectors; Hermitian by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    n_qubits: usize,
    terms: Vec<(PsiProjector, f64)>,
}

impl Observable {
    pub fn new(n_qubits: usize, terms: Vec<(PsiProjector, f64)>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        for (proj, w) in &terms {
            if proj.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch {
                    left: n_qubits,
                    right: proj.n_qubits(),
                });
            }
            if !w.is_finite() {
                return Err(Error::NonFinite("observable weight"));
            }
        }
        Ok(Observable { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(PsiProjector, f64)] {
        &self.terms
    }

    /// M|ψ⟩.
    pub fn apply(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                left: state.n_qubits(),
                right: self.n_qubits,
            });
        }
        let mut out = vec![Complex64::ZERO; state.dim()];
        for (proj, w) in &self.terms {
            let pv = proj.apply_raw(state);
            for (o, v) in out.iter_mut().zip(pv) {
                *o += v * *w;
            }
        }
        Ok(out)
    }

    /// Flattens the projector terms into per-label weights for fast
    /// repeated expectation evaluation on hot search loops.
    pub fn compile(&self) -> CompiledObservable {
        let mut entries = Vec::new();
        for (proj, w) in &self.terms {
            if *w == 0.0 {
                continue;
            }
            for x in proj.matching_labels() {
                entries.push((x, x ^ ((1usize << self.n_qubits) - 1), *w));
            }
        }
        CompiledObservable {
            n_qubits: self.n_qubits,
            entries,
        }
    }
}

/// An [`Observable`] flattened to (x, x̄, weight) triples over Ψ-basis labels.
#[derive(Debug, Clone)]
pub struct CompiledObservable {
    n_qubits: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl CompiledObservable {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// ⟨ψ|M|ψ⟩, exactly real term by term.
    pub fn expectation(&self, state: &StateVector) -> f64 {
        let amps = state.amps();
        self.entries
            .iter()
            .map(|&(x, xb, w)| {
                let c = (amps[x] - Complex64::i() * amps[xb]) * FRAC_1_SQRT_2;
                w * c.norm_sqr()
            })
            .sum()
    }
}

/// ⟨state|M|state⟩. The imaginary residue must be below 1e-9 and is
/// discarded after the check.
pub fn expectation(state: &StateVector, obs: &Observable) -> Result<f64> {
    let mv = obs.apply(state)?;
    let e: Complex64 = state
        .amps()
        .iter()
        .zip(&mv)
        .map(|(a, b)| a.conj() * b)
        .sum();
    if e.im.abs() > TOL_NORM {
        return Err(Error::NumericInvariant(format!(
            "expectation has imaginary residue {}",
            e.im
        )));
    }
    Ok(e.re)
}

/// Dense density matrix over `n_qubits` qubits, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// ρ = |ψ⟩⟨ψ|.
    pub fn from_pure(state: &StateVector) -> Self {
        let dim = state.dim();
        let amps = state.amps();
        let mut data = vec![Complex64::ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = amps[r] * amps[c].conj();
            }
        }
        DensityMatrix {
            n_qubits: state.n_qubits(),
            data,
        }
    }

    /// ρ = Σ wₖ |ψₖ⟩⟨ψₖ|; weights must be nonnegative and sum to 1.
    pub fn from_ensemble(ensemble: &[(f64, StateVector)]) -> Result<Self> {
        let n_qubits = match ensemble.first() {
            Some((_, s)) => s.n_qubits(),
            None => return Err(Error::NonFinite("empty ensemble")),
        };
        let total: f64 = ensemble.iter().map(|(w, _)| w).sum();
        if ensemble.iter().any(|(w, _)| *w < -TOL_ALG || !w.is_finite()) {
            return Err(Error::NonFinite("ensemble weight"));
        }
        if (total - 1.0).abs() > TOL_NORM {
            return Err(Error::NumericInvariant(format!(
                "ensemble weights sum to {total}, expected 1"
            )));
        }
        let dim = 1usize << n_qubits;
        let mut data = vec![Complex64::ZERO; dim * dim];
        for (w, state) in ensemble {
            if state.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch {
                    left: n_qubits,
                    right: state.n_qubits(),
                });
            }
            let amps = state.amps();
            for r in 0..dim {
                for c in 0..dim {
                    data[r * dim + c] += amps[r] * amps[c].conj() * *w;
                }
            }
        }
        Ok(DensityMatrix { n_qubits, data })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|k| self.get(k, k)).sum()
    }

    /// trace and Hermiticity checks at the stated tolerances.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TOL_NORM || tr.im.abs() > TOL_NORM {
            return Err(Error::NumericInvariant(format!(
                "density matrix trace = {tr}"
            )));
        }
        let dim = self.dim();
        for r in 0..dim {
            for c in r..dim {
                let d = self.get(r, c) - self.get(c, r).conj();
                if d.norm() > TOL_ALG {
                    return Err(Error::NumericInvariant(format!(
                        "non-Hermitian entry at ({r},{c}): residue {}",
                        d.norm()
                    )));
                }
            }
        }
        Ok(())
    }

    /// UρU† with U = U₁⊗…⊗U_n; `ops[j]` acts on qubit j+1.
    pub fn apply_local(&self, ops: &[UnitaryParams]) -> Result<DensityMatrix> {
        if ops.len() != self.n_qubits {
            return Err(Error::ArityMismatch {
                expected: self.n_qubits,
                got: ops.len(),
            });
        }
        let dim = self.dim();
        let mut data = self.data.clone();
        for (j, p) in ops.iter().enumerate() {
            if *p == UnitaryParams::IDENTITY {
                continue;
            }
            let m = p.matrix();
            let stride = 1usize << (self.n_qubits - (j + 1));
            // Left multiply: rows pairwise within each column.
            for c in 0..dim {
                for r in 0..dim {
                    if r & stride == 0 {
                        let r2 = r | stride;
                        let a = data[r * dim + c];
                        let b = data[r2 * dim + c];
                        data[r * dim + c] = m[0][0] * a + m[0][1] * b;
                        data[r2 * dim + c] = m[1][0] * a + m[1][1] * b;
                    }
                }
            }
            // Right multiply by U†: columns pairwise within each row.
            for r in 0..dim {
                for c in 0..dim {
                    if c & stride == 0 {
                        let c2 = c | stride;
                        let a = data[r * dim + c];
                        let b = data[r * dim + c2];
                        data[r * dim + c] = a * m[0][0].conj() + b * m[0][1].conj();
                        data[r * dim + c2] = a * m[1][0].conj() + b * m[1][1].conj();
                    }
                }
            }
        }
        Ok(DensityMatrix {
            n_qubits: self.n_qubits,
            data,
        })
    }
}

/// tr(ρM). The imaginary residue must be below 1e-9 and is discarded.
pub fn density_expectation(rho: &DensityMatrix, obs: &Observable) -> Result<f64> {
    if rho.n_qubits() != obs.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: rho.n_qubits(),
            right: obs.n_qubits(),
        });
    }
    let mask = rho.dim() - 1;
    let mut e = Complex64::ZERO;
    for (proj, w) in obs.terms() {
        for x in proj.matching_labels() {
            let xb = x ^ mask;
            // ⟨Ψ_x|ρ|Ψ_x⟩ with |Ψ_x⟩ = (e_x + i e_x̄)/√2.
            let v = 0.5
                * (rho.get(x, x)
                    + rho.get(xb, xb)
                    + Complex64::i() * (rho.get(x, xb) - rho.get(xb, x)));
            e += v * *w;
        }
    }
    if e.im.abs() > TOL_NORM {
        return Err(Error::NumericInvariant(format!(
            "density expectation has imaginary residue {}",
            e.im
        )));
    }
    Ok(e.re)
}
