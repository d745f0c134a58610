//! The classical signaling game: extensive form, normal-form reduction,
//! pure Nash enumeration, assessments, Bayesian consistency, sequential
//! rationality, and weak perfect Bayesian equilibrium.
//!
//! Chance picks player 1's type (t₁ with probability p), player 1 signals
//! L or R, player 2 observes the signal but not the type and responds u
//! or d. Player 2's two information sets are the left one (after L) and
//! the right one (after R), each holding an upper (t₁) and a lower (t₂)
//! node.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, TOL_NORM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

/// Player 1's type, drawn by the chance move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeLabel {
    T1,
    T2,
}

/// Player 1's action (the signal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Signal {
    L,
    R,
}

/// Player 2's action (the response).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Response {
    U,
    D,
}

/// Chance parameter plus the eight leaf payoff pairs.
///
/// Canonical leaf order (shared with the quantum payoff observables):
/// (t₁,L,u), (t₁,L,d), (t₂,L,u), (t₂,L,d), (t₁,R,u), (t₁,R,d),
/// (t₂,R,u), (t₂,R,d).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalingSpec {
    p_chance: f64,
    leaves: [(f64, f64); 8],
}

/// Canonical index of a leaf in the shared payoff table.
pub fn leaf_index(t: TypeLabel, sig: Signal, resp: Response) -> usize {
    let block = match (sig, t) {
        (Signal::L, TypeLabel::T1) => 0,
        (Signal::L, TypeLabel::T2) => 1,
        (Signal::R, TypeLabel::T1) => 2,
        (Signal::R, TypeLabel::T2) => 3,
    };
    2 * block + usize::from(resp == Response::D)
}

impl SignalingSpec {
    pub fn new(p_chance: f64, leaves: [(f64, f64); 8]) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_chance) {
            return Err(Error::ParameterOutOfRange {
                name: "p_chance",
                value: p_chance,
                range: "[0, 1]",
            });
        }
        if leaves
            .iter()
            .any(|(a, b)| !a.is_finite() || !b.is_finite())
        {
            return Err(Error::NonFinite("leaf payoff"));
        }
        Ok(SignalingSpec { p_chance, leaves })
    }

    pub fn p_chance(&self) -> f64 {
        self.p_chance
    }

    pub fn with_p_chance(&self, p_chance: f64) -> Result<Self> {
        Self::new(p_chance, self.leaves)
    }

    pub fn leaves(&self) -> &[(f64, f64); 8] {
        &self.leaves
    }

    /// (u₁, u₂) at the leaf reached by (type, signal, response).
    pub fn leaf(&self, t: TypeLabel, sig: Signal, resp: Response) -> (f64, f64) {
        self.leaves[leaf_index(t, sig, resp)]
    }
}

/// A pure strategy profile: one signal per type for player 1, one
/// response per information set for player 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PureProfile {
    pub at_t1: Signal,
    pub at_t2: Signal,
    pub at_left: Response,
    pub at_right: Response,
}

impl PureProfile {
    pub fn new(at_t1: Signal, at_t2: Signal, at_left: Response, at_right: Response) -> Self {
        PureProfile {
            at_t1,
            at_t2,
            at_left,
            at_right,
        }
    }

    /// Row index into the strategic form: LL, LR, RL, RR.
    pub fn row_index(&self) -> usize {
        2 * usize::from(self.at_t1 == Signal::R) + usize::from(self.at_t2 == Signal::R)
    }

    /// Column index into the strategic form: uu, ud, du, dd.
    pub fn col_index(&self) -> usize {
        2 * usize::from(self.at_left == Response::D) + usize::from(self.at_right == Response::D)
    }

    pub fn from_indices(row: usize, col: usize) -> Self {
        let sig = |bit: bool| if bit { Signal::R } else { Signal::L };
        let resp = |bit: bool| if bit { Response::D } else { Response::U };
        PureProfile {
            at_t1: sig(row & 2 != 0),
            at_t2: sig(row & 1 != 0),
            at_left: resp(col & 2 != 0),
            at_right: resp(col & 1 != 0),
        }
    }

    /// All 16 profiles in lexicographic (row, column) order.
    pub fn all() -> Vec<PureProfile> {
        (0..4)
            .flat_map(|r| (0..4).map(move |c| PureProfile::from_indices(r, c)))
            .collect()
    }

    pub fn label(&self) -> String {
        let s = |x: Signal| if x == Signal::L { 'L' } else { 'R' };
        let r = |x: Response| if x == Response::U { 'u' } else { 'd' };
        format!(
            "({}{},{}{})",
            s(self.at_t1),
            s(self.at_t2),
            r(self.at_left),
            r(self.at_right)
        )
    }
}

pub const ROW_LABELS: [&str; 4] = ["LL", "LR", "RL", "RR"];
pub const COL_LABELS: [&str; 4] = ["uu", "ud", "du", "dd"];

/// A 4×4 bimatrix: rows are player 1 strategies, columns player 2's.
///
/// Also reused for the quantum normal form, where rows and columns are
/// the θ ∈ {0, π} operator pairs in the order (0,0), (0,π), (π,0), (π,π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategicForm {
    pub entries: [[(f64, f64); 4]; 4],
}

impl StrategicForm {
    /// All (row, col) cells from which no player gains by unilateral
    /// deviation (weak inequality, up to `tol`).
    pub fn pure_nash_with_tol(&self, tol: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..4 {
            for c in 0..4 {
                let row_best = (0..4)
                    .map(|r2| self.entries[r2][c].0)
                    .fold(f64::NEG_INFINITY, f64::max);
                let col_best = (0..4)
                    .map(|c2| self.entries[r][c2].1)
                    .fold(f64::NEG_INFINITY, f64::max);
                if self.entries[r][c].0 >= row_best - tol && self.entries[r][c].1 >= col_best - tol
                {
                    out.push((r, c));
                }
            }
        }
        out
    }

    pub fn pure_nash(&self) -> Vec<(usize, usize)> {
        self.pure_nash_with_tol(TOL_NORM)
    }
}

/// The normal form of the signaling game: entry(s₁, s₂) averages the two
/// type branches with the chance weights.
pub fn normal_form(spec: &SignalingSpec) -> StrategicForm {
    let mut entries = [[(0.0, 0.0); 4]; 4];
    for profile in PureProfile::all() {
        let mut u = (0.0, 0.0);
        for (t, w) in [
            (TypeLabel::T1, spec.p_chance()),
            (TypeLabel::T2, 1.0 - spec.p_chance()),
        ] {
            let sig = match t {
                TypeLabel::T1 => profile.at_t1,
                TypeLabel::T2 => profile.at_t2,
            };
            let resp = match sig {
                Signal::L => profile.at_left,
                Signal::R => profile.at_right,
            };
            let leaf = spec.leaf(t, sig, resp);
            u.0 += w * leaf.0;
            u.1 += w * leaf.1;
        }
        entries[profile.row_index()][profile.col_index()] = u;
    }
    StrategicForm { entries }
}

/// Pure Nash equilibria of the signaling game's normal form,
/// lexicographic by profile.
pub fn pure_nash(g: &StrategicForm) -> Vec<PureProfile> {
    g.pure_nash()
        .into_iter()
        .map(|(r, c)| PureProfile::from_indices(r, c))
        .collect()
}

/// Reach probabilities of the six decision nodes under chance and a
/// pure profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReachProbs {
    pub t1_node: f64,
    pub t2_node: f64,
    pub upper_left: f64,
    pub lower_left: f64,
    pub upper_right: f64,
    pub lower_right: f64,
}

pub fn reach_probabilities(spec: &SignalingSpec, profile: &PureProfile) -> ReachProbs {
    let p = spec.p_chance();
    let mut probs = ReachProbs {
        t1_node: p,
        t2_node: 1.0 - p,
        upper_left: 0.0,
        lower_left: 0.0,
        upper_right: 0.0,
        lower_right: 0.0,
    };
    match profile.at_t1 {
        Signal::L => probs.upper_left = p,
        Signal::R => probs.upper_right = p,
    }
    match profile.at_t2 {
        Signal::L => probs.lower_left = 1.0 - p,
        Signal::R => probs.lower_right = 1.0 - p,
    }
    probs
}

/// Bayesian-consistent beliefs (b₁ on the upper-left node, b₂ on the
/// upper-right node). `None` when the information set is off-path and the
/// belief is unconstrained.
pub fn consistent_beliefs(
    spec: &SignalingSpec,
    profile: &PureProfile,
) -> (Option<f64>, Option<f64>) {
    let probs = reach_probabilities(spec, profile);
    let left_mass = probs.upper_left + probs.lower_left;
    let right_mass = probs.upper_right + probs.lower_right;
    let b1 = (left_mass > 0.0).then(|| probs.upper_left / left_mass);
    let b2 = (right_mass > 0.0).then(|| probs.upper_right / right_mass);
    (b1, b2)
}

/// A pure strategy profile plus a belief system over player 2's
/// information-set nodes. Player 1's singleton-set beliefs are
/// identically 1 and not stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Assessment {
    pub profile: PureProfile,
    pub b1: f64,
    pub b2: f64,
    /// Whether Bayesian consistency pins b₁ (resp. b₂).
    pub constrained: (bool, bool),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InfoSetId {
    P1Type1,
    P1Type2,
    P2Left,
    P2Right,
}

/// Per-information-set sequential-rationality verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SetVerdict {
    pub set: InfoSetId,
    pub achieved: f64,
    pub best: f64,
    pub gap: f64,
    pub pass: bool,
}

fn verdict(set: InfoSetId, achieved: f64, best: f64) -> SetVerdict {
    let gap = best - achieved;
    SetVerdict {
        set,
        achieved,
        best,
        gap,
        pass: gap <= TOL_NORM,
    }
}

// Player 1's payoff at type t from signaling `sig`, given player 2's part
// of the profile.
fn p1_value(spec: &SignalingSpec, profile: &PureProfile, t: TypeLabel, sig: Signal) -> f64 {
    let resp = match sig {
        Signal::L => profile.at_left,
        Signal::R => profile.at_right,
    };
    spec.leaf(t, sig, resp).0
}

// Player 2's expected payoff at an information set with belief b on the
// upper (t1) node, from responding `resp`.
fn p2_value(spec: &SignalingSpec, sig: Signal, b: f64, resp: Response) -> f64 {
    b * spec.leaf(TypeLabel::T1, sig, resp).1 + (1.0 - b) * spec.leaf(TypeLabel::T2, sig, resp).1
}

/// Checks condition (sequential rationality) at each of the four
/// information sets: the prescribed action must attain the max over the
/// available actions, given the beliefs.
pub fn sequentially_rational(spec: &SignalingSpec, assessment: &Assessment) -> Vec<SetVerdict> {
    let profile = &assessment.profile;
    let mut out = Vec::with_capacity(4);
    for (set, t, sig) in [
        (InfoSetId::P1Type1, TypeLabel::T1, profile.at_t1),
        (InfoSetId::P1Type2, TypeLabel::T2, profile.at_t2),
    ] {
        let achieved = p1_value(spec, profile, t, sig);
        let best = p1_value(spec, profile, t, Signal::L).max(p1_value(spec, profile, t, Signal::R));
        out.push(verdict(set, achieved, best));
    }
    for (set, sig, b, resp) in [
        (InfoSetId::P2Left, Signal::L, assessment.b1, profile.at_left),
        (
            InfoSetId::P2Right,
            Signal::R,
            assessment.b2,
            profile.at_right,
        ),
    ] {
        let achieved = p2_value(spec, sig, b, resp);
        let best = p2_value(spec, sig, b, Response::U).max(p2_value(spec, sig, b, Response::D));
        out.push(verdict(set, achieved, best));
    }
    out
}

/// One belief choice tried for a profile, with the resulting verdicts.
#[derive(Debug, Clone, Serialize)]
pub struct BeliefTrial {
    pub b1: f64,
    pub b2: f64,
    pub verdicts: Vec<SetVerdict>,
    pub all_pass: bool,
}

/// The weak-PBE analysis of one pure profile.
#[derive(Debug, Clone, Serialize)]
pub struct PbeAnalysis {
    pub profile: PureProfile,
    /// Bayesian-consistent beliefs where the set is on-path.
    pub forced_b1: Option<f64>,
    pub forced_b2: Option<f64>,
    pub trials: Vec<BeliefTrial>,
    pub accepted: bool,
    /// Witness assessment when accepted.
    pub witness: Option<Assessment>,
}

/// Enumerates all 16 pure profiles and decides weak perfect Bayesian
/// equilibrium membership for each.
///
/// Unconstrained beliefs are searched at the vertices b ∈ {0, 1} only:
/// with two actions per information set the payoff difference between
/// actions is affine in the node belief, so the prescribed action is
/// optimal for some b ∈ [0, 1] iff it is optimal at a vertex. Each
/// player-2 belief only affects its own set's verdict, so the vertex
/// choices are independent.
pub fn weak_pbe(spec: &SignalingSpec) -> Vec<PbeAnalysis> {
    PureProfile::all()
        .into_iter()
        .map(|profile| {
            let (forced_b1, forced_b2) = consistent_beliefs(spec, &profile);
            let b1_candidates = match forced_b1 {
                Some(b) => vec![b],
                None => vec![0.0, 1.0],
            };
            let b2_candidates = match forced_b2 {
                Some(b) => vec![b],
                None => vec![0.0, 1.0],
            };
            let mut trials = Vec::new();
            for &b1 in &b1_candidates {
                for &b2 in &b2_candidates {
                    let assessment = Assessment {
                        profile,
                        b1,
                        b2,
                        constrained: (forced_b1.is_some(), forced_b2.is_some()),
                    };
                    let verdicts = sequentially_rational(spec, &assessment);
                    let all_pass = verdicts.iter().all(|v| v.pass);
                    trials.push(BeliefTrial {
                        b1,
                        b2,
                        verdicts,
                        all_pass,
                    });
                }
            }
            // With independent per-set belief effects, a passing pair of
            // vertices exists iff some passing combination was tried; pick
            // the first as witness.
            let witness = trials.iter().find(|t| t.all_pass).map(|t| Assessment {
                profile,
                b1: t.b1,
                b2: t.b2,
                constrained: (forced_b1.is_some(), forced_b2.is_some()),
            });
            PbeAnalysis {
                profile,
                forced_b1,
                forced_b2,
                accepted: witness.is_some(),
                witness,
                trials,
            }
        })
        .collect()
}

/// The payoff table of the worked example, in canonical leaf order.
pub const PAPER_LEAVES: [(f64, f64); 8] = [
    (6.0, 12.0),
    (4.0, 0.0),
    (6.0, 0.0),
    (6.0, 2.0),
    (10.0, 8.0),
    (6.0, 2.0),
    (4.0, 2.0),
    (6.0, 0.0),
];

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_spec() -> SignalingSpec {
        SignalingSpec::new(0.5, PAPER_LEAVES).unwrap()
    }

    // The reference normal form at p = 1/2.
    const REFERENCE_MATRIX: [[(f64, f64); 4]; 4] = [
        [(6.0, 6.0), (6.0, 6.0), (5.0, 1.0), (5.0, 1.0)],
        [(5.0, 7.0), (6.0, 6.0), (4.0, 1.0), (5.0, 0.0)],
        [(8.0, 4.0), (6.0, 1.0), (8.0, 5.0), (6.0, 2.0)],
        [(7.0, 5.0), (6.0, 1.0), (7.0, 5.0), (6.0, 1.0)],
    ];

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn normal_form_reproduces_reference_matrix() {
        let g = normal_form(&paper_spec());
        for r in 0..4 {
            for c in 0..4 {
                assert!(
                    (g.entries[r][c].0 - REFERENCE_MATRIX[r][c].0).abs() < 1e-12
                        && (g.entries[r][c].1 - REFERENCE_MATRIX[r][c].1).abs() < 1e-12,
                    "mismatch at ({r},{c}): {:?}",
                    g.entries[r][c]
                );
            }
        }
    }

    #[test]
    fn normal_form_degenerate_chance() {
        // p = 1: payoffs depend only on the t1 component.
        let spec = paper_spec().with_p_chance(1.0).unwrap();
        let g = normal_form(&spec);
        for c in 0..4 {
            assert_eq!(g.entries[0][c], g.entries[1][c]); // LL vs LR
            assert_eq!(g.entries[2][c], g.entries[3][c]); // RL vs RR
        }
    }

    #[test]
    fn pure_nash_paper_set() {
        let eqs = pure_nash(&normal_form(&paper_spec()));
        let labels: Vec<_> = eqs.iter().map(|p| p.label()).collect();
        assert_eq!(labels, vec!["(LL,ud)", "(RL,du)"]);
    }

    #[test]
    fn pure_nash_constant_game() {
        let g = StrategicForm {
            entries: [[(3.0, 3.0); 4]; 4],
        };
        assert_eq!(g.pure_nash().len(), 16);
    }

    #[test]
    fn reach_probabilities_ll() {
        let spec = paper_spec();
        let profile = PureProfile::new(Signal::L, Signal::L, Response::U, Response::D);
        let probs = reach_probabilities(&spec, &profile);
        assert_eq!(
            (probs.upper_left, probs.lower_left, probs.upper_right, probs.lower_right),
            (0.5, 0.5, 0.0, 0.0)
        );
    }

    #[test]
    fn reach_probabilities_rl() {
        let spec = paper_spec();
        let profile = PureProfile::new(Signal::R, Signal::L, Response::D, Response::U);
        let probs = reach_probabilities(&spec, &profile);
        assert_eq!(
            (probs.upper_left, probs.lower_left, probs.upper_right, probs.lower_right),
            (0.0, 0.5, 0.5, 0.0)
        );
    }

    #[test]
    fn reach_probabilities_p_one() {
        let spec = paper_spec().with_p_chance(1.0).unwrap();
        let profile = PureProfile::new(Signal::L, Signal::R, Response::U, Response::U);
        let probs = reach_probabilities(&spec, &profile);
        assert_eq!(probs.lower_left, 0.0);
        assert_eq!(probs.lower_right, 0.0);
    }

    #[test]
    fn consistent_beliefs_ll_ud() {
        let (b1, b2) = consistent_beliefs(
            &paper_spec(),
            &PureProfile::new(Signal::L, Signal::L, Response::U, Response::D),
        );
        assert_eq!(b1, Some(0.5));
        assert_eq!(b2, None);
    }

    #[test]
    fn consistent_beliefs_rl_du() {
        let (b1, b2) = consistent_beliefs(
            &paper_spec(),
            &PureProfile::new(Signal::R, Signal::L, Response::D, Response::U),
        );
        assert_eq!(b1, Some(0.0));
        assert_eq!(b2, Some(1.0));
    }

    #[test]
    fn consistent_beliefs_p_zero() {
        let spec = paper_spec().with_p_chance(0.0).unwrap();
        let (b1, _) = consistent_beliefs(
            &spec,
            &PureProfile::new(Signal::L, Signal::L, Response::U, Response::U),
        );
        assert_eq!(b1, Some(0.0));
    }

    #[test]
    fn d_at_right_set_always_fails_for_ll_ud() {
        let spec = paper_spec();
        let profile = PureProfile::new(Signal::L, Signal::L, Response::U, Response::D);
        for b2 in [0.0, 0.3, 0.5, 1.0] {
            let verdicts = sequentially_rational(
                &spec,
                &Assessment {
                    profile,
                    b1: 0.5,
                    b2,
                    constrained: (true, false),
                },
            );
            let right = verdicts
                .iter()
                .find(|v| v.set == InfoSetId::P2Right)
                .unwrap();
            assert!(!right.pass, "d should be suboptimal at b2 = {b2}");
        }
    }

    #[test]
    fn rl_du_with_forced_beliefs_passes_all_sets() {
        let spec = paper_spec();
        let profile = PureProfile::new(Signal::R, Signal::L, Response::D, Response::U);
        let verdicts = sequentially_rational(
            &spec,
            &Assessment {
                profile,
                b1: 0.0,
                b2: 1.0,
                constrained: (true, true),
            },
        );
        assert!(verdicts.iter().all(|v| v.pass));
    }

    #[test]
    fn weak_pbe_paper_spec() {
        let analyses = weak_pbe(&paper_spec());
        let accepted: Vec<_> = analyses
            .iter()
            .filter(|a| a.accepted)
            .map(|a| a.profile.label())
            .collect();
        assert!(accepted.contains(&"(RL,du)".to_string()));
        assert!(!accepted.contains(&"(LL,ud)".to_string()));
        let rl_du = analyses
            .iter()
            .find(|a| a.profile.label() == "(RL,du)")
            .unwrap();
        let w = rl_du.witness.unwrap();
        assert_eq!((w.b1, w.b2), (0.0, 1.0));
    }

    #[test]
    fn weak_pbe_constant_game_accepts_everything() {
        let spec = SignalingSpec::new(0.5, [(1.0, 1.0); 8]).unwrap();
        assert!(weak_pbe(&spec).iter().all(|a| a.accepted));
    }

    #[test]
    fn normal_form_is_affine_in_p() {
        let leaves = PAPER_LEAVES;
        let g0 = normal_form(&SignalingSpec::new(0.0, leaves).unwrap());
        let g1 = normal_form(&SignalingSpec::new(1.0, leaves).unwrap());
        for p in [0.2, 0.5, 0.77] {
            let gp = normal_form(&SignalingSpec::new(p, leaves).unwrap());
            for r in 0..4 {
                for c in 0..4 {
                    let want0 = p * g1.entries[r][c].0 + (1.0 - p) * g0.entries[r][c].0;
                    let want1 = p * g1.entries[r][c].1 + (1.0 - p) * g0.entries[r][c].1;
                    assert!((gp.entries[r][c].0 - want0).abs() < 1e-12);
                    assert!((gp.entries[r][c].1 - want1).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn spec_rejects_bad_inputs() {
        assert!(SignalingSpec::new(1.5, PAPER_LEAVES).is_err());
        let mut leaves = PAPER_LEAVES;
        leaves[3].1 = f64::NAN;
        assert!(SignalingSpec::new(0.5, leaves).is_err());
    }
}
