//! The quantum counterpart of weak perfect Bayesian equilibrium:
//! conditioning on projective outcomes before a player's move,
//! Bayesian-consistent belief weights, conditional mixed states, and
//! sequential-type rationality via best-response maximization over the
//! player's unitary parameters.

use serde::Serialize;

use crate::classical::Player;
use crate::hilbert::{
    post_measurement, project_prob, CompiledObservable, DensityMatrix, Observable, PsiProjector,
    StateVector, UnitaryParams,
};
use crate::qsignaling::{
    grid_profile, payoff_observable, q_pure_nash, xi, Owner, ParamMode, QProfile, QSchemeConfig,
    N_QUBITS,
};
use crate::search::golden_section_max;
use crate::{Error, Result, TOL_ALG, TOL_OPT};

/// The four information sets of the quantum signaling game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QSetId {
    P1Upper,
    P1Lower,
    P2Left,
    P2Right,
}

/// An information set: who moves, which projective outcomes distinguish
/// its nodes, and which qubits the owner still acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct QInfoSet {
    pub id: QSetId,
    pub owner: Owner,
    pub conditioning: Vec<PsiProjector>,
    pub acting_qubits: Vec<usize>,
}

impl QInfoSet {
    pub fn new(
        id: QSetId,
        owner: Owner,
        conditioning: Vec<PsiProjector>,
        acting_qubits: Vec<usize>,
    ) -> Result<Self> {
        // Conditioning projectors must be mutually orthogonal: no Psi
        // label may match two of them.
        for (a, pa) in conditioning.iter().enumerate() {
            for pb in conditioning.iter().skip(a + 1) {
                if pa.matching_labels().any(|x| pb.matches(x)) {
                    return Err(Error::NumericInvariant(
                        "conditioning projectors overlap".into(),
                    ));
                }
            }
        }
        Ok(QInfoSet {
            id,
            owner,
            conditioning,
            acting_qubits,
        })
    }
}

/// The four standard sets: player 1 conditions on P_{0₁} / P_{1₁};
/// player 2's left set on {P_{0₁0₂}, P_{1₁0₃}}, right set on
/// {P_{0₁1₂}, P_{1₁1₃}}.
pub fn signaling_info_sets() -> Vec<QInfoSet> {
    let proj = |constraints: &[(usize, bool)]| {
        PsiProjector::new(N_QUBITS, constraints).expect("valid constraints")
    };
    vec![
        QInfoSet::new(
            QSetId::P1Upper,
            Owner::Player1,
            vec![proj(&[(1, false)])],
            vec![2, 3],
        )
        .expect("orthogonal"),
        QInfoSet::new(
            QSetId::P1Lower,
            Owner::Player1,
            vec![proj(&[(1, true)])],
            vec![2, 3],
        )
        .expect("orthogonal"),
        QInfoSet::new(
            QSetId::P2Left,
            Owner::Player2,
            vec![proj(&[(1, false), (2, false)]), proj(&[(1, true), (3, false)])],
            vec![4, 5],
        )
        .expect("orthogonal"),
        QInfoSet::new(
            QSetId::P2Right,
            Owner::Player2,
            vec![proj(&[(1, false), (2, true)]), proj(&[(1, true), (3, true)])],
            vec![4, 5],
        )
        .expect("orthogonal"),
    ]
}

/// The state a player measures before her move: chance plus the
/// operators of every qubit NOT owned by the set's owner, identity on
/// the owner's qubits.
pub fn pre_move_state(
    config: &QSchemeConfig,
    profile: &QProfile,
    info_set: &QInfoSet,
) -> Result<StateVector> {
    let mut ops = [UnitaryParams::IDENTITY; N_QUBITS];
    ops[0] = config.chance;
    for j in 2..=N_QUBITS {
        if xi(j)? != info_set.owner {
            ops[j - 1] = profile.op_for_qubit(j)?;
        }
    }
    StateVector::psi_basis(N_QUBITS, 0)?.apply_local(&ops)
}

/// Bayesian-consistent weights over a set's nodes plus the
/// post-measurement state at each positive-weight node.
#[derive(Debug, Clone)]
pub struct QBelief {
    pub weights: Vec<f64>,
    pub posteriors: Vec<Option<StateVector>>,
}

impl QBelief {
    /// The positive-weight part as a (weight, state) ensemble.
    pub fn ensemble(&self) -> Vec<(f64, StateVector)> {
        self.weights
            .iter()
            .zip(&self.posteriors)
            .filter_map(|(&w, s)| s.as_ref().map(|s| (w, s.clone())))
            .collect()
    }
}

/// weight(node) = ⟨ψ|P_node|ψ⟩ / Σ ⟨ψ|P|ψ⟩. Fails with
/// [`Error::OffPath`] when every node has probability at or below 1e-12;
/// off-path beliefs are reported, never invented.
pub fn q_beliefs(state: &StateVector, info_set: &QInfoSet) -> Result<QBelief> {
    let probs: Vec<f64> = info_set
        .conditioning
        .iter()
        .map(|p| project_prob(state, p))
        .collect::<Result<_>>()?;
    let total: f64 = probs.iter().sum();
    if total <= TOL_ALG {
        return Err(Error::OffPath);
    }
    let mut weights = Vec::with_capacity(probs.len());
    let mut posteriors = Vec::with_capacity(probs.len());
    for (prob, proj) in probs.iter().zip(&info_set.conditioning) {
        weights.push(prob / total);
        if *prob > TOL_ALG {
            posteriors.push(Some(post_measurement(state, proj)?.0));
        } else {
            posteriors.push(None);
        }
    }
    Ok(QBelief {
        weights,
        posteriors,
    })
}

/// ρ = Σ weight(node)·|posterior⟩⟨posterior| over the positive nodes.
pub fn conditional_mixed(belief: &QBelief) -> Result<DensityMatrix> {
    DensityMatrix::from_ensemble(&belief.ensemble())
}

/// Which operator set the best-response maximum ranges over.
///
/// `Pair` maximizes jointly over all of the owner's acting qubits;
/// `PerQubit` maximizes over each single qubit with the others pinned at
/// the profile values and takes the best. The two coincide for the
/// θ-only worked cases; neither is canonical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MaxScope {
    Pair,
    PerQubit,
}

/// Grid resolution and optimality tolerance for the best-response search.
#[derive(Debug, Clone, Copy)]
pub struct SearchSettings {
    /// Points per parameter axis.
    pub grid: usize,
    /// Values within this distance of the maximum count as argmax.
    pub opt_tol: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            grid: 513,
            opt_tol: TOL_OPT,
        }
    }
}

const MAX_GRID_POINTS: usize = 5_000_000;
const REFINE_XTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ParamKind {
    Theta,
    Alpha,
    Beta,
}

#[derive(Debug, Clone)]
struct Axis {
    qubit: usize,
    kind: ParamKind,
    values: Vec<f64>,
    lo: f64,
    hi: f64,
}

fn axes_for(acting_qubits: &[usize], mode: ParamMode, grid: usize) -> Vec<Axis> {
    use std::f64::consts::PI;
    let mut axes = Vec::new();
    for &q in acting_qubits {
        let theta_values: Vec<f64> = (0..grid)
            .map(|i| PI * i as f64 / (grid - 1) as f64)
            .collect();
        axes.push(Axis {
            qubit: q,
            kind: ParamKind::Theta,
            values: theta_values,
            lo: 0.0,
            hi: PI,
        });
        if mode == ParamMode::FullSu2 {
            for kind in [ParamKind::Alpha, ParamKind::Beta] {
                let values: Vec<f64> = (0..grid)
                    .map(|i| 2.0 * PI * i as f64 / grid as f64)
                    .collect();
                axes.push(Axis {
                    qubit: q,
                    kind,
                    values,
                    lo: 0.0,
                    hi: 2.0 * PI * (1.0 - 1e-12),
                });
            }
        }
    }
    axes
}

fn params_from_point(axes: &[Axis], point: &[f64]) -> Vec<(usize, UnitaryParams)> {
    let mut per_qubit: Vec<(usize, [f64; 3])> = Vec::new();
    for (axis, &v) in axes.iter().zip(point) {
        let entry = match per_qubit.iter_mut().find(|(q, _)| *q == axis.qubit) {
            Some(e) => e,
            None => {
                per_qubit.push((axis.qubit, [0.0; 3]));
                per_qubit.last_mut().unwrap()
            }
        };
        match axis.kind {
            ParamKind::Theta => entry.1[0] = v,
            ParamKind::Alpha => entry.1[1] = v,
            ParamKind::Beta => entry.1[2] = v,
        }
    }
    per_qubit
        .into_iter()
        .map(|(q, [t, a, b])| {
            (
                q,
                UnitaryParams::new(t, a, b).expect("search point within parameter ranges"),
            )
        })
        .collect()
}

/// Value of the objective Σ wₖ⟨ψₖ|U†MU|ψₖ⟩ for given per-qubit operators.
pub fn ensemble_value(
    ensemble: &[(f64, StateVector)],
    compiled: &CompiledObservable,
    qubit_ops: &[(usize, UnitaryParams)],
) -> Result<f64> {
    let mut value = 0.0;
    for (w, state) in ensemble {
        let moved = state.apply_on_qubits(qubit_ops)?;
        value += w * compiled.expectation(&moved);
    }
    Ok(value)
}

/// Argmax parameters along one axis, merged into closed intervals.
#[derive(Debug, Clone, Serialize)]
pub struct AxisArgmax {
    pub name: String,
    pub intervals: Vec<(f64, f64)>,
}

impl AxisArgmax {
    pub fn format(&self) -> String {
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|(lo, hi)| {
                if (hi - lo).abs() < 1e-9 {
                    format!("{{{lo:.6}}}")
                } else {
                    format!("[{lo:.6}, {hi:.6}]")
                }
            })
            .collect();
        format!("{} in {}", self.name, parts.join(" u "))
    }
}

/// Result of a best-response search: the maximum, the refined maximizer,
/// and the near-maximal parameter set per axis.
#[derive(Debug, Clone, Serialize)]
pub struct BestResponse {
    pub max_value: f64,
    pub at_max: Vec<f64>,
    pub argmax: Vec<AxisArgmax>,
}

fn axis_name(axis: &Axis) -> String {
    let kind = match axis.kind {
        ParamKind::Theta => "theta",
        ParamKind::Alpha => "alpha",
        ParamKind::Beta => "beta",
    };
    format!("{kind}{}", axis.qubit)
}

/// Maximizes the expectation of `obs` over the owner's operators applied
/// to the conditioned ensemble (identity on all other qubits): a uniform
/// grid per parameter followed by coordinate-wise golden-section
/// refinement around the grid maximum.
pub fn best_response(
    ensemble: &[(f64, StateVector)],
    obs: &Observable,
    acting_qubits: &[usize],
    mode: ParamMode,
    settings: &SearchSettings,
) -> Result<BestResponse> {
    if acting_qubits.is_empty() || settings.grid < 2 {
        return Err(Error::GridTooLarge(settings.grid));
    }
    let axes = axes_for(acting_qubits, mode, settings.grid);
    let total: usize = axes.iter().map(|a| a.values.len()).product();
    if total > MAX_GRID_POINTS {
        return Err(Error::GridTooLarge(total));
    }
    let compiled = obs.compile();
    let eval = |point: &[f64]| -> Result<f64> {
        ensemble_value(ensemble, &compiled, &params_from_point(&axes, point))
    };

    // Full grid sweep.
    let mut values = vec![0.0f64; total];
    let mut indices = vec![0usize; axes.len()];
    let mut point = vec![0.0f64; axes.len()];
    let mut best_flat = 0usize;
    let mut best_value = f64::NEG_INFINITY;
    for (flat, slot) in values.iter_mut().enumerate() {
        let mut rem = flat;
        for (d, axis) in axes.iter().enumerate().rev() {
            indices[d] = rem % axis.values.len();
            rem /= axis.values.len();
            point[d] = axis.values[indices[d]];
        }
        let v = eval(&point)?;
        *slot = v;
        if v > best_value {
            best_value = v;
            best_flat = flat;
        }
    }

    // Coordinate-wise golden-section refinement around the grid maximum.
    let mut refined = {
        let mut rem = best_flat;
        let mut p = vec![0.0; axes.len()];
        for (d, axis) in axes.iter().enumerate().rev() {
            let idx = rem % axis.values.len();
            rem /= axis.values.len();
            p[d] = axis.values[idx];
        }
        p
    };
    let mut refined_value = best_value;
    for _ in 0..30 {
        let before = refined_value;
        for d in 0..axes.len() {
            let spacing = if axes[d].values.len() > 1 {
                axes[d].values[1] - axes[d].values[0]
            } else {
                axes[d].hi - axes[d].lo
            };
            let lo = (refined[d] - spacing).max(axes[d].lo);
            let hi = (refined[d] + spacing).min(axes[d].hi);
            let current = refined.clone();
            let f = |x: f64| {
                let mut p = current.clone();
                p[d] = x;
                eval(&p).unwrap_or(f64::NEG_INFINITY)
            };
            let (x, v) = golden_section_max(f, lo, hi, REFINE_XTOL);
            if v > refined_value {
                refined_value = v;
                refined[d] = x;
            }
        }
        if refined_value - before < 1e-13 {
            break;
        }
    }
    let max_value = refined_value.max(best_value);

    // Near-maximal parameter set, projected per axis and merged into
    // interval unions.
    let threshold = max_value - settings.opt_tol;
    let mut marked: Vec<Vec<bool>> = axes.iter().map(|a| vec![false; a.values.len()]).collect();
    for (flat, &v) in values.iter().enumerate() {
        if v >= threshold {
            let mut rem = flat;
            for (d, axis) in axes.iter().enumerate().rev() {
                marked[d][rem % axis.values.len()] = true;
                rem /= axis.values.len();
            }
        }
    }
    let argmax = axes
        .iter()
        .zip(&marked)
        .enumerate()
        .map(|(d, (axis, marks))| {
            let mut intervals: Vec<(f64, f64)> = Vec::new();
            let mut run: Option<(f64, f64)> = None;
            for (i, &m) in marks.iter().enumerate() {
                if m {
                    let v = axis.values[i];
                    run = Some(match run {
                        Some((lo, _)) => (lo, v),
                        None => (v, v),
                    });
                } else if let Some(r) = run.take() {
                    intervals.push(r);
                }
            }
            if let Some(r) = run {
                intervals.push(r);
            }
            if intervals.is_empty() {
                // The refined maximum sits strictly between grid points.
                intervals.push((refined[d], refined[d]));
            }
            AxisArgmax {
                name: axis_name(axis),
                intervals,
            }
        })
        .collect();

    Ok(BestResponse {
        max_value,
        at_max: refined,
        argmax,
    })
}

/// Sequential-type rationality verdict for one information set.
#[derive(Debug, Clone, Serialize)]
pub struct RationalityVerdict {
    pub set: QSetId,
    /// True when the set is unreachable under the profile; the verdict is
    /// then a vacuous pass and carries no beliefs.
    pub off_path: bool,
    pub weights: Vec<f64>,
    pub achieved: f64,
    pub max_value: f64,
    pub gap: f64,
    pub pass: bool,
    pub argmax: Vec<AxisArgmax>,
}

fn owner_player(owner: Owner) -> Player {
    match owner {
        Owner::Player1 => Player::One,
        _ => Player::Two,
    }
}

fn owner_mode(config: &QSchemeConfig, owner: Owner) -> ParamMode {
    match owner {
        Owner::Player1 => config.p1_mode,
        _ => config.p2_mode,
    }
}

/// Checks, for each of the four information sets, that the profile's
/// prescribed operators attain the best-response maximum against the
/// Bayesian-consistent conditioned state.
pub fn sequential_rationality_q(
    config: &QSchemeConfig,
    profile: &QProfile,
    settings: &SearchSettings,
    scope: MaxScope,
) -> Result<Vec<RationalityVerdict>> {
    let mut out = Vec::with_capacity(4);
    for info_set in signaling_info_sets() {
        let pre = pre_move_state(config, profile, &info_set)?;
        let belief = match q_beliefs(&pre, &info_set) {
            Ok(b) => b,
            Err(Error::OffPath) => {
                out.push(RationalityVerdict {
                    set: info_set.id,
                    off_path: true,
                    weights: Vec::new(),
                    achieved: 0.0,
                    max_value: 0.0,
                    gap: 0.0,
                    pass: true,
                    argmax: Vec::new(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let ensemble = belief.ensemble();
        let obs = payoff_observable(&config.spec, owner_player(info_set.owner));
        let compiled = obs.compile();
        let profile_ops: Vec<(usize, UnitaryParams)> = info_set
            .acting_qubits
            .iter()
            .map(|&q| profile.op_for_qubit(q).map(|p| (q, p)))
            .collect::<Result<_>>()?;
        let achieved = ensemble_value(&ensemble, &compiled, &profile_ops)?;
        let mode = owner_mode(config, info_set.owner);
        let best = match scope {
            MaxScope::Pair => {
                best_response(&ensemble, &obs, &info_set.acting_qubits, mode, settings)?
            }
            MaxScope::PerQubit => {
                // Optimize each acting qubit with the others pinned at the
                // profile; keep the best single-factor response.
                let mut best: Option<BestResponse> = None;
                for &q in &info_set.acting_qubits {
                    let pinned: Vec<(usize, UnitaryParams)> = profile_ops
                        .iter()
                        .filter(|(oq, _)| *oq != q)
                        .cloned()
                        .collect();
                    let pinned_ensemble: Vec<(f64, StateVector)> = ensemble
                        .iter()
                        .map(|(w, s)| Ok((*w, s.apply_on_qubits(&pinned)?)))
                        .collect::<Result<_>>()?;
                    let br = best_response(&pinned_ensemble, &obs, &[q], mode, settings)?;
                    if best.as_ref().is_none_or(|b| br.max_value > b.max_value) {
                        best = Some(br);
                    }
                }
                best.expect("at least one acting qubit")
            }
        };
        let gap = best.max_value - achieved;
        if gap < -TOL_OPT {
            return Err(Error::NumericInvariant(format!(
                "best response below achieved value by {gap}"
            )));
        }
        out.push(RationalityVerdict {
            set: info_set.id,
            off_path: false,
            weights: belief.weights.clone(),
            achieved,
            max_value: best.max_value,
            gap,
            pass: gap <= settings.opt_tol,
            argmax: best.argmax,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProfileClass {
    /// Quantum Nash equilibrium and sequentially-type rational: the
    /// quantum PBE set.
    Both,
    NashOnly,
    RationalOnly,
    Neither,
}

#[derive(Debug, Clone, Serialize)]
pub struct QPbeRow {
    pub cell: (usize, usize),
    pub thetas: [f64; 4],
    pub payoffs: (f64, f64),
    pub nash: bool,
    pub rational: bool,
    pub class: ProfileClass,
    pub verdicts: Vec<RationalityVerdict>,
}

/// Classification of the 16 θ-only pure profiles. `rational_not_nash`
/// is the exploratory cross-table for the open question of whether
/// sequential-type rationality implies Nash here; it is data, not a
/// claim.
#[derive(Debug, Clone, Serialize)]
pub struct QPbeReport {
    pub rows: Vec<QPbeRow>,
    pub pbe_cells: Vec<(usize, usize)>,
    pub rational_not_nash: Vec<(usize, usize)>,
}

/// Classifies each of the 16 θ-only pure profiles as quantum-NE,
/// sequentially-type rational, both, or neither.
pub fn q_pbe(
    config: &QSchemeConfig,
    settings: &SearchSettings,
    scope: MaxScope,
) -> Result<QPbeReport> {
    let nash_cells: Vec<(usize, usize)> = q_pure_nash(config)?
        .into_iter()
        .map(|(cell, _)| cell)
        .collect();
    let mut rows = Vec::with_capacity(16);
    for r in 0..4 {
        for c in 0..4 {
            let profile = grid_profile(r, c);
            let payoffs = crate::qsignaling::q_payoffs(config, &profile)?;
            let verdicts = sequential_rationality_q(config, &profile, settings, scope)?;
            let nash = nash_cells.contains(&(r, c));
            let rational = verdicts.iter().all(|v| v.pass);
            let class = match (nash, rational) {
                (true, true) => ProfileClass::Both,
                (true, false) => ProfileClass::NashOnly,
                (false, true) => ProfileClass::RationalOnly,
                (false, false) => ProfileClass::Neither,
            };
            rows.push(QPbeRow {
                cell: (r, c),
                thetas: profile.thetas(),
                payoffs,
                nash,
                rational,
                class,
                verdicts,
            });
        }
    }
    let pbe_cells = rows
        .iter()
        .filter(|row| row.class == ProfileClass::Both)
        .map(|row| row.cell)
        .collect();
    let rational_not_nash = rows
        .iter()
        .filter(|row| row.class == ProfileClass::RationalOnly)
        .map(|row| row.cell)
        .collect();
    Ok(QPbeReport {
        rows,
        pbe_cells,
        rational_not_nash,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{SignalingSpec, PAPER_LEAVES};
    use crate::hilbert::density_expectation;
    use crate::{TOL_NORM, TOL_OPT};
    use std::f64::consts::PI;

    fn paper_config() -> QSchemeConfig {
        QSchemeConfig {
            spec: SignalingSpec::new(0.5, PAPER_LEAVES).unwrap(),
            chance: UnitaryParams::new(PI / 2.0, PI / 6.0, PI / 3.0).unwrap(),
            p1_mode: ParamMode::ThetaOnly,
            p2_mode: ParamMode::ThetaOnly,
        }
    }

    fn ne_profile() -> QProfile {
        QProfile::from_thetas(PI, 0.0, PI, 0.0).unwrap()
    }

    fn set(id: QSetId) -> QInfoSet {
        signaling_info_sets().into_iter().find(|s| s.id == id).unwrap()
    }

    fn small_settings() -> SearchSettings {
        SearchSettings {
            grid: 129,
            opt_tol: TOL_OPT,
        }
    }

    #[test]
    fn pre_move_state_player1_upper_probability() {
        let pre = pre_move_state(&paper_config(), &ne_profile(), &set(QSetId::P1Upper)).unwrap();
        let p = project_prob(&pre, &PsiProjector::new(5, &[(1, false)]).unwrap()).unwrap();
        assert!((p - 0.75).abs() < TOL_NORM);
    }

    #[test]
    fn pre_move_state_all_identity() {
        let config = QSchemeConfig {
            chance: UnitaryParams::IDENTITY,
            ..paper_config()
        };
        let profile = QProfile::from_thetas(0.0, 0.0, 0.0, 0.0).unwrap();
        let pre = pre_move_state(&config, &profile, &set(QSetId::P1Upper)).unwrap();
        assert!((pre.psi_component(0).norm_sqr() - 1.0).abs() < TOL_NORM);
    }

    #[test]
    fn left_set_reach_probability_is_half() {
        let pre = pre_move_state(&paper_config(), &ne_profile(), &set(QSetId::P2Left)).unwrap();
        let left = set(QSetId::P2Left);
        let total: f64 = left
            .conditioning
            .iter()
            .map(|p| project_prob(&pre, p).unwrap())
            .sum();
        assert!((total - 0.5).abs() < TOL_NORM);
    }

    #[test]
    fn left_set_beliefs_three_quarters() {
        let pre = pre_move_state(&paper_config(), &ne_profile(), &set(QSetId::P2Left)).unwrap();
        let belief = q_beliefs(&pre, &set(QSetId::P2Left)).unwrap();
        assert!((belief.weights[0] - 0.75).abs() < TOL_NORM);
        assert!((belief.weights[1] - 0.25).abs() < TOL_NORM);
        // Posteriors concentrate on Psi_00111 and Psi_11000 (up to phase).
        let upper = belief.posteriors[0].as_ref().unwrap();
        let lower = belief.posteriors[1].as_ref().unwrap();
        assert!((upper.psi_component(0b00111).norm_sqr() - 1.0).abs() < TOL_NORM);
        assert!((lower.psi_component(0b11000).norm_sqr() - 1.0).abs() < TOL_NORM);
    }

    #[test]
    fn right_set_beliefs_sum_to_one() {
        let pre = pre_move_state(&paper_config(), &ne_profile(), &set(QSetId::P2Right)).unwrap();
        let belief = q_beliefs(&pre, &set(QSetId::P2Right)).unwrap();
        assert!((belief.weights.iter().sum::<f64>() - 1.0).abs() < TOL_NORM);
    }

    #[test]
    fn singleton_set_weight_one() {
        let pre = pre_move_state(&paper_config(), &ne_profile(), &set(QSetId::P1Upper)).unwrap();
        let belief = q_beliefs(&pre, &set(QSetId::P1Upper)).unwrap();
        assert_eq!(belief.weights.len(), 1);
        assert!((belief.weights[0] - 1.0).abs() < TOL_NORM);
    }

    #[test]
    fn upper_posterior_matches_worked_state() {
        let pre = pre_move_state(&paper_config(), &ne_profile(), &set(QSetId::P1Upper)).unwrap();
        let belief = q_beliefs(&pre, &set(QSetId::P1Upper)).unwrap();
        let post = belief.posteriors[0].as_ref().unwrap();
        assert!((post.psi_component(0b00010).norm_sqr() - 0.5).abs() < TOL_NORM);
        assert!((post.psi_component(0b01101).norm_sqr() - 0.5).abs() < TOL_NORM);
    }

    #[test]
    fn conditional_mixed_trace_one() {
        let pre = pre_move_state(&paper_config(), &ne_profile(), &set(QSetId::P2Left)).unwrap();
        let belief = q_beliefs(&pre, &set(QSetId::P2Left)).unwrap();
        let rho = conditional_mixed(&belief).unwrap();
        rho.validate().unwrap();
    }

    #[test]
    fn mixed_state_payoff_at_profile() {
        // tr(rho'_2 M_2) at (theta4, theta5) = (pi, 0) equals 19/2.
        let config = paper_config();
        let pre = pre_move_state(&config, &ne_profile(), &set(QSetId::P2Left)).unwrap();
        let belief = q_beliefs(&pre, &set(QSetId::P2Left)).unwrap();
        let rho = conditional_mixed(&belief).unwrap();
        let moved = rho
            .apply_local(&[
                UnitaryParams::IDENTITY,
                UnitaryParams::IDENTITY,
                UnitaryParams::IDENTITY,
                UnitaryParams::theta_only(PI).unwrap(),
                UnitaryParams::theta_only(0.0).unwrap(),
            ])
            .unwrap();
        let m2 = payoff_observable(&config.spec, Player::Two);
        let got = density_expectation(&moved, &m2).unwrap();
        assert!((got - 9.5).abs() < TOL_NORM, "{got}");
    }

    #[test]
    fn player1_best_response_objective() {
        // On the upper-node posterior, the objective is 8 - 3cos^2(theta2/2):
        // achieved values at theta2 = 0 and pi, maximum 8 at theta2 = pi with
        // theta3 free.
        let config = paper_config();
        let pre = pre_move_state(&config, &ne_profile(), &set(QSetId::P1Upper)).unwrap();
        let belief = q_beliefs(&pre, &set(QSetId::P1Upper)).unwrap();
        let ensemble = belief.ensemble();
        let m1 = payoff_observable(&config.spec, Player::One);
        let compiled = m1.compile();
        for (theta2, want) in [(0.0, 5.0), (PI / 2.0, 6.5), (PI, 8.0)] {
            let v = ensemble_value(
                &ensemble,
                &compiled,
                &[
                    (2, UnitaryParams::theta_only(theta2).unwrap()),
                    (3, UnitaryParams::theta_only(1.1).unwrap()),
                ],
            )
            .unwrap();
            assert!((v - want).abs() < TOL_NORM, "theta2={theta2}: {v}");
        }
        let br = best_response(&ensemble, &m1, &[2, 3], ParamMode::ThetaOnly, &small_settings())
            .unwrap();
        assert!((br.max_value - 8.0).abs() < TOL_OPT);
        // theta2 pinned at pi, theta3 free over the whole range.
        assert_eq!(br.argmax[0].intervals.len(), 1);
        let (lo2, hi2) = br.argmax[0].intervals[0];
        assert!((lo2 - PI).abs() < 1e-6 && (hi2 - PI).abs() < 1e-6);
        let (lo3, hi3) = br.argmax[1].intervals[0];
        assert!(lo3.abs() < 1e-6 && (hi3 - PI).abs() < 1e-6);
    }

    #[test]
    fn player2_best_response_on_mixed_state() {
        let config = paper_config();
        let pre = pre_move_state(&config, &ne_profile(), &set(QSetId::P2Left)).unwrap();
        let belief = q_beliefs(&pre, &set(QSetId::P2Left)).unwrap();
        let m2 = payoff_observable(&config.spec, Player::Two);
        let br = best_response(
            &belief.ensemble(),
            &m2,
            &[4, 5],
            ParamMode::ThetaOnly,
            &small_settings(),
        )
        .unwrap();
        assert!((br.max_value - 9.5).abs() < TOL_OPT);
        let (lo4, hi4) = br.argmax[0].intervals[0];
        assert!((lo4 - PI).abs() < 1e-6 && (hi4 - PI).abs() < 1e-6);
        let (lo5, hi5) = br.argmax[1].intervals[0];
        assert!(lo5.abs() < 1e-6 && (hi5 - PI).abs() < 1e-6);
    }

    #[test]
    fn zero_observable_all_params_argmax() {
        let config = paper_config();
        let pre = pre_move_state(&config, &ne_profile(), &set(QSetId::P1Upper)).unwrap();
        let belief = q_beliefs(&pre, &set(QSetId::P1Upper)).unwrap();
        let zero = Observable::new(5, vec![]).unwrap();
        let br = best_response(
            &belief.ensemble(),
            &zero,
            &[2, 3],
            ParamMode::ThetaOnly,
            &small_settings(),
        )
        .unwrap();
        assert!(br.max_value.abs() < TOL_NORM);
        for axis in &br.argmax {
            assert_eq!(axis.intervals.len(), 1);
            let (lo, hi) = axis.intervals[0];
            assert!(lo.abs() < 1e-12 && (hi - PI).abs() < 1e-12);
        }
    }

    #[test]
    fn objective_linear_in_belief_weights() {
        let config = paper_config();
        let pre = pre_move_state(&config, &ne_profile(), &set(QSetId::P2Left)).unwrap();
        let belief = q_beliefs(&pre, &set(QSetId::P2Left)).unwrap();
        let ensemble = belief.ensemble();
        let m2 = payoff_observable(&config.spec, Player::Two);
        let compiled = m2.compile();
        let ops = [
            (4, UnitaryParams::theta_only(2.0).unwrap()),
            (5, UnitaryParams::theta_only(0.7).unwrap()),
        ];
        let v_upper =
            ensemble_value(&[(1.0, ensemble[0].1.clone())], &compiled, &ops).unwrap();
        let v_lower =
            ensemble_value(&[(1.0, ensemble[1].1.clone())], &compiled, &ops).unwrap();
        let v_mixed = ensemble_value(&ensemble, &compiled, &ops).unwrap();
        let w = ensemble[0].0;
        assert!((v_mixed - (w * v_upper + (1.0 - w) * v_lower)).abs() < TOL_ALG);
    }

    #[test]
    fn ne_profile_sequentially_rational() {
        let verdicts = sequential_rationality_q(
            &paper_config(),
            &ne_profile(),
            &small_settings(),
            MaxScope::Pair,
        )
        .unwrap();
        assert_eq!(verdicts.len(), 4);
        assert!(verdicts.iter().all(|v| v.pass && !v.off_path));
    }

    #[test]
    fn other_ne_profile_sequentially_rational() {
        let profile = QProfile::from_thetas(0.0, PI, 0.0, PI).unwrap();
        let verdicts = sequential_rationality_q(
            &paper_config(),
            &profile,
            &small_settings(),
            MaxScope::Pair,
        )
        .unwrap();
        assert!(verdicts.iter().all(|v| v.pass));
    }

    #[test]
    fn per_qubit_scope_agrees_on_worked_cases() {
        let verdicts = sequential_rationality_q(
            &paper_config(),
            &ne_profile(),
            &small_settings(),
            MaxScope::PerQubit,
        )
        .unwrap();
        assert!(verdicts.iter().all(|v| v.pass));
        let upper = verdicts.iter().find(|v| v.set == QSetId::P1Upper).unwrap();
        assert!((upper.max_value - 8.0).abs() < TOL_OPT);
    }

    #[test]
    fn dominated_profile_fails_somewhere() {
        // (0, 0, pi, pi) is not a quantum NE; some set's verdict fails.
        let profile = QProfile::from_thetas(0.0, 0.0, PI, PI).unwrap();
        let verdicts = sequential_rationality_q(
            &paper_config(),
            &profile,
            &small_settings(),
            MaxScope::Pair,
        )
        .unwrap();
        assert!(verdicts.iter().any(|v| !v.pass));
    }

    #[test]
    fn off_path_set_reports_vacuous_pass() {
        // Deterministic chance keeps the lower type branch unreachable.
        let config = QSchemeConfig {
            chance: UnitaryParams::IDENTITY,
            ..paper_config()
        };
        let profile = QProfile::from_thetas(0.0, 0.0, 0.0, 0.0).unwrap();
        let pre = pre_move_state(&config, &profile, &set(QSetId::P1Lower)).unwrap();
        assert!(matches!(
            q_beliefs(&pre, &set(QSetId::P1Lower)),
            Err(Error::OffPath)
        ));
        let verdicts =
            sequential_rationality_q(&config, &profile, &small_settings(), MaxScope::Pair)
                .unwrap();
        let lower = verdicts.iter().find(|v| v.set == QSetId::P1Lower).unwrap();
        assert!(lower.off_path && lower.pass);
    }

    #[test]
    fn belief_weights_are_bayesian_consistent() {
        let config = paper_config();
        let pre = pre_move_state(&config, &ne_profile(), &set(QSetId::P2Left)).unwrap();
        let left = set(QSetId::P2Left);
        let belief = q_beliefs(&pre, &left).unwrap();
        let probs: Vec<f64> = left
            .conditioning
            .iter()
            .map(|p| project_prob(&pre, p).unwrap())
            .collect();
        let total: f64 = probs.iter().sum();
        for (w, p) in belief.weights.iter().zip(&probs) {
            assert!((w * total - p).abs() < TOL_ALG);
        }
    }

    #[test]
    fn overlapping_conditioning_rejected() {
        let p0 = PsiProjector::new(5, &[(1, false)]).unwrap();
        let p01 = PsiProjector::new(5, &[(1, false), (2, false)]).unwrap();
        assert!(QInfoSet::new(QSetId::P2Left, Owner::Player2, vec![p0, p01], vec![4, 5]).is_err());
    }
}
