//! The generalized EWL 4-tuple scheme for n-player two-action strategic
//! games, plus the behavioral-strategy correspondence that ties the
//! θ-only operators back to classical play.

use crate::classical::Player;
use crate::hilbert::{expectation, Observable, PsiProjector, StateVector, UnitaryParams};
use crate::{Error, Result};

/// The 4-tuple scheme: n players, payoffs m^i_x for every bitstring x.
#[derive(Debug, Clone, PartialEq)]
pub struct EwlScheme {
    n_players: usize,
    /// payoffs[x][i] is player i's payoff on outcome Ψ_x.
    payoffs: Vec<Vec<f64>>,
}

impl EwlScheme {
    pub fn new(n_players: usize, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        if !(1..=crate::hilbert::MAX_QUBITS).contains(&n_players) {
            return Err(Error::QubitCountOutOfRange(n_players));
        }
        if payoffs.len() != 1 << n_players {
            return Err(Error::ArityMismatch {
                expected: 1 << n_players,
                got: payoffs.len(),
            });
        }
        for row in &payoffs {
            if row.len() != n_players {
                return Err(Error::ArityMismatch {
                    expected: n_players,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("payoff"));
            }
        }
        Ok(EwlScheme { n_players, payoffs })
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn payoff(&self, x: usize, player: usize) -> f64 {
        self.payoffs[x][player]
    }

    /// M_i = Σ_x m^i_x |Ψ_x⟩⟨Ψ_x| (0-based player index).
    pub fn observable(&self, player: usize) -> Observable {
        let n = self.n_players;
        let terms = (0..1usize << n)
            .map(|x| {
                let constraints: Vec<(usize, bool)> = (0..n)
                    .map(|j| (j + 1, (x >> (n - 1 - j)) & 1 == 1))
                    .collect();
                (
                    PsiProjector::new(n, &constraints).expect("valid full constraint"),
                    self.payoffs[x][player],
                )
            })
            .collect();
        Observable::new(n, terms).expect("valid observable")
    }
}

/// |Ψ_f⟩ = (U₁⊗…⊗U_n)|Ψ_{0…0}⟩.
pub fn ewl_final_state(scheme: &EwlScheme, params: &[UnitaryParams]) -> Result<StateVector> {
    if params.len() != scheme.n_players {
        return Err(Error::ArityMismatch {
            expected: scheme.n_players,
            got: params.len(),
        });
    }
    StateVector::psi_basis(scheme.n_players, 0)?.apply_local(params)
}

/// E_i = ⟨Ψ_f|M_i|Ψ_f⟩ for every player.
pub fn ewl_payoffs(scheme: &EwlScheme, params: &[UnitaryParams]) -> Result<Vec<f64>> {
    let state = ewl_final_state(scheme, params)?;
    (0..scheme.n_players)
        .map(|i| expectation(&state, &scheme.observable(i)))
        .collect()
}

/// Probability pair (p, 1−p) over a player's two actions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BehavioralStrategy {
    p: f64,
}

impl BehavioralStrategy {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParameterOutOfRange {
                name: "p",
                value: p,
                range: "[0, 1]",
            });
        }
        Ok(BehavioralStrategy { p })
    }

    /// Probability of action 0.
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn prob(&self, action: bool) -> f64 {
        if action {
            1.0 - self.p
        } else {
            self.p
        }
    }
}

/// The classical behavioral strategy induced by U(θ, 0, 0): p = cos²(θ/2).
pub fn behavioral_of_theta(theta: f64) -> Result<BehavioralStrategy> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::ParameterOutOfRange {
            name: "theta",
            value: theta,
            range: "[0, pi]",
        });
    }
    BehavioralStrategy::new((theta / 2.0).cos().powi(2))
}

/// The marker the observables are built for; re-exported for callers that
/// index players 1/2 instead of 0-based.
pub fn player_index(player: Player) -> usize {
    match player {
        Player::One => 0,
        Player::Two => 1,
    }
}
