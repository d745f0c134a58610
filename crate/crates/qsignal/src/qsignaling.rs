//! The 6-tuple quantum scheme for the signaling game: the ξ
//! qubit-assignment map, payoff observables M₁/M₂, final-state and payoff
//! evaluation, and the quantum normal form over the classical-equivalent
//! pure strategies θ ∈ {0, π}.

use serde::{Deserialize, Serialize};

use crate::classical::{Player, SignalingSpec, StrategicForm};
use crate::hilbert::{expectation, Observable, PsiProjector, StateVector, UnitaryParams};
use crate::{Error, Result};

/// Number of qubits in the signaling-game scheme: chance + 2 per player.
pub const N_QUBITS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Owner {
    Chance,
    Player1,
    Player2,
}

/// The ξ map: qubit 1 belongs to the chance mover, qubits 2–3 to
/// player 1, qubits 4–5 to player 2.
pub fn xi(j: usize) -> Result<Owner> {
    match j {
        1 => Ok(Owner::Chance),
        2 | 3 => Ok(Owner::Player1),
        4 | 5 => Ok(Owner::Player2),
        _ => Err(Error::QubitIndexOutOfRange {
            index: j,
            n_qubits: N_QUBITS,
        }),
    }
}

/// Whether a player's operators range over θ only (classical-equivalent)
/// or the full three-parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamMode {
    ThetaOnly,
    FullSu2,
}

impl ParamMode {
    pub fn admits(&self, p: &UnitaryParams) -> bool {
        match self {
            ParamMode::ThetaOnly => p.is_theta_only(),
            ParamMode::FullSu2 => true,
        }
    }
}

/// The quantum scheme configuration: shared leaf payoffs, the (publicly
/// known) chance operator, and each player's parameter mode.
#[derive(Debug, Clone, PartialEq)]
pub struct QSchemeConfig {
    pub spec: SignalingSpec,
    pub chance: UnitaryParams,
    pub p1_mode: ParamMode,
    pub p2_mode: ParamMode,
}

/// A profile of player operators: (U₂, U₃) for player 1, (U₄, U₅) for
/// player 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QProfile {
    pub p1: (UnitaryParams, UnitaryParams),
    pub p2: (UnitaryParams, UnitaryParams),
}

impl QProfile {
    /// θ-only profile from (θ₂, θ₃, θ₄, θ₅).
    pub fn from_thetas(t2: f64, t3: f64, t4: f64, t5: f64) -> Result<Self> {
        Ok(QProfile {
            p1: (
                UnitaryParams::theta_only(t2)?,
                UnitaryParams::theta_only(t3)?,
            ),
            p2: (
                UnitaryParams::theta_only(t4)?,
                UnitaryParams::theta_only(t5)?,
            ),
        })
    }

    pub fn thetas(&self) -> [f64; 4] {
        [
            self.p1.0.theta(),
            self.p1.1.theta(),
            self.p2.0.theta(),
            self.p2.1.theta(),
        ]
    }

    /// Operator for a given (1-based) qubit; qubit 1 is not a player qubit.
    pub fn op_for_qubit(&self, j: usize) -> Result<UnitaryParams> {
        match j {
            2 => Ok(self.p1.0),
            3 => Ok(self.p1.1),
            4 => Ok(self.p2.0),
            5 => Ok(self.p2.1),
            _ => Err(Error::QubitIndexOutOfRange {
                index: j,
                n_qubits: N_QUBITS,
            }),
        }
    }

    fn check_modes(&self, config: &QSchemeConfig) -> Result<()> {
        if !config.p1_mode.admits(&self.p1.0) || !config.p1_mode.admits(&self.p1.1) {
            return Err(Error::ModeViolation("player 1"));
        }
        if !config.p2_mode.admits(&self.p2.0) || !config.p2_mode.admits(&self.p2.1) {
            return Err(Error::ModeViolation("player 2"));
        }
        Ok(())
    }
}

// The eight projector constraint sets of M_i, in the canonical leaf order
// (t1/L, t2/L, t1/R, t2/R blocks, u before d inside each block).
const OBSERVABLE_CONSTRAINTS: [&[(usize, bool)]; 8] = [
    &[(1, false), (2, false), (4, false)], // P_{0_1 0_2 0_4}
    &[(1, false), (2, false), (4, true)],  // P_{0_1 0_2 1_4}
    &[(1, true), (3, false), (4, false)],  // P_{1_1 0_3 0_4}
    &[(1, true), (3, false), (4, true)],   // P_{1_1 0_3 1_4}
    &[(1, false), (2, true), (5, false)],  // P_{0_1 1_2 0_5}
    &[(1, false), (2, true), (5, true)],   // P_{0_1 1_2 1_5}
    &[(1, true), (3, true), (5, false)],   // P_{1_1 1_3 0_5}
    &[(1, true), (3, true), (5, true)],    // P_{1_1 1_3 1_5}
];

/// M_i = Σ_k m^i_k P_k over the eight end-node projectors. The eight
/// projectors are mutually orthogonal and sum to the identity.
pub fn payoff_observable(spec: &SignalingSpec, player: Player) -> Observable {
    let terms = OBSERVABLE_CONSTRAINTS
        .iter()
        .zip(spec.leaves())
        .map(|(constraints, leaf)| {
            let w = match player {
                Player::One => leaf.0,
                Player::Two => leaf.1,
            };
            (
                PsiProjector::new(N_QUBITS, constraints).expect("valid constraints"),
                w,
            )
        })
        .collect();
    Observable::new(N_QUBITS, terms).expect("valid observable")
}

/// |Ψ_f⟩ = (U_chance ⊗ U₂ ⊗ U₃ ⊗ U₄ ⊗ U₅)|Ψ_{00000}⟩.
pub fn final_state(config: &QSchemeConfig, profile: &QProfile) -> Result<StateVector> {
    profile.check_modes(config)?;
    StateVector::psi_basis(N_QUBITS, 0)?.apply_local(&[
        config.chance,
        profile.p1.0,
        profile.p1.1,
        profile.p2.0,
        profile.p2.1,
    ])
}

/// (E₁, E₂) = (⟨Ψ_f|M₁|Ψ_f⟩, ⟨Ψ_f|M₂|Ψ_f⟩).
pub fn q_payoffs(config: &QSchemeConfig, profile: &QProfile) -> Result<(f64, f64)> {
    let state = final_state(config, profile)?;
    Ok((
        expectation(&state, &payoff_observable(&config.spec, Player::One))?,
        expectation(&state, &payoff_observable(&config.spec, Player::Two))?,
    ))
}

/// θ pair for a strategic-form index, ordered (0,0), (0,π), (π,0), (π,π).
pub fn grid_thetas(index: usize) -> (f64, f64) {
    let v = |bit: bool| if bit { std::f64::consts::PI } else { 0.0 };
    (v(index & 2 != 0), v(index & 1 != 0))
}

/// The θ-only profile sitting at strategic-form cell (row, col).
pub fn grid_profile(row: usize, col: usize) -> QProfile {
    let (t2, t3) = grid_thetas(row);
    let (t4, t5) = grid_thetas(col);
    QProfile::from_thetas(t2, t3, t4, t5).expect("grid thetas in range")
}

/// The 4×4 quantum normal form over θ ∈ {0, π} per qubit. Requires both
/// players in θ-only mode.
pub fn q_normal_form(config: &QSchemeConfig) -> Result<StrategicForm> {
    if config.p1_mode != ParamMode::ThetaOnly || config.p2_mode != ParamMode::ThetaOnly {
        return Err(Error::ModeViolation("q_normal_form requires ThetaOnly"));
    }
    let mut entries = [[(0.0, 0.0); 4]; 4];
    for (row, row_entries) in entries.iter_mut().enumerate() {
        for (col, cell) in row_entries.iter_mut().enumerate() {
            *cell = q_payoffs(config, &grid_profile(row, col))?;
        }
    }
    Ok(StrategicForm { entries })
}

/// Pure Nash equilibria of the quantum normal form, as grid cells with
/// their θ-only profiles, lexicographic by cell.
pub fn q_pure_nash(config: &QSchemeConfig) -> Result<Vec<((usize, usize), QProfile)>> {
    let form = q_normal_form(config)?;
    Ok(form
        .pure_nash()
        .into_iter()
        .map(|(r, c)| ((r, c), grid_profile(r, c)))
        .collect())
}

pub const ROW_LABELS_Q: [&str; 4] = [
    "U2(0)xU3(0)",
    "U2(0)xU3(pi)",
    "U2(pi)xU3(0)",
    "U2(pi)xU3(pi)",
];
pub const COL_LABELS_Q: [&str; 4] = [
    "U4(0)xU5(0)",
    "U4(0)xU5(pi)",
    "U4(pi)xU5(0)",
    "U4(pi)xU5(pi)",
];
