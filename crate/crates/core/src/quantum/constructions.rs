//! Explicit strategies: Tsirelson's CHSH pair, the four-qubit CHSH chain
//! state, the Mermin–Peres magic square and the polygamous three-player
//! construction.

use num_complex::Complex64;
use rand::Rng;

use super::linalg::{binary_projectors, c, identity, kron, pauli_x, pauli_y, pauli_z, CMat};
use super::state::{epr, CVec, DensityMatrix, PureState, State};
use super::strategy::{chsh_bias, QuantumStrategy};
use crate::error::{invalid, Result};
use crate::game::{magic_square_cells, Game, GraphGame};
use crate::graph::Graph;

fn real(x: f64) -> Complex64 {
    c(x, 0.0)
}

fn rotated(plus: bool) -> CMat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    if plus {
        (pauli_x() + pauli_z()) * real(h)
    } else {
        (pauli_x() - pauli_z()) * real(h)
    }
}

/// EPR pair; Alice measures `σ_z`, `σ_x`, Bob `(σ_z ± σ_x)/√2`.
pub fn tsirelson_strategy() -> QuantumStrategy {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let b0 = (pauli_z() + pauli_x()) * real(h);
    let b1 = (pauli_z() - pauli_x()) * real(h);
    QuantumStrategy::new(
        State::Pure(epr()),
        vec![
            vec![binary_projectors(&pauli_z()), binary_projectors(&pauli_x())],
            vec![binary_projectors(&b0), binary_projectors(&b1)],
        ],
    )
    .expect("Tsirelson strategy is valid")
}

/// Tsirelson pair on players 0 and 1 of a path on three vertices, while
/// player 2 holds `|0⟩` and always answers 0.
pub fn product_p3_strategy() -> QuantumStrategy {
    let t = tsirelson_strategy();
    let State::Pure(pair) = &t.state else { unreachable!() };
    let zero = PureState::basis(vec![2], 0).unwrap();
    let constant = vec![identity(2), CMat::zeros(2, 2)];
    let mut measurements = t.measurements.clone();
    measurements.push(vec![constant.clone(), constant]);
    QuantumStrategy::new(State::Pure(pair.tensor(&zero)), measurements).expect("valid product strategy")
}

fn sqrt5() -> f64 {
    5f64.sqrt()
}

/// The four-qubit state (players A, B, C, D) with amplitudes
/// `(3√5+5)` on `|iiii⟩`, `(5+√5)` on `|i i ī ī⟩`, `(5−√5)` on `|i ī ī i⟩`
/// and `(3√5−5)` on `|i ī i ī⟩`, normalised.
pub fn p4_state() -> PureState {
    let s = sqrt5();
    let coeff = [3.0 * s + 5.0, 5.0 + s, 5.0 - s, 3.0 * s - 5.0];
    let patterns = [[0, 0, 0, 0], [0, 0, 1, 1], [0, 1, 1, 0], [0, 1, 0, 1]];
    let mut v = CVec::zeros(16);
    for i in 0..2 {
        for (k, pat) in patterns.iter().enumerate() {
            let idx = pat.iter().fold(0, |acc, &bit| acc * 2 + (bit ^ i));
            v[idx] += real(coeff[k]);
        }
    }
    PureState::new(vec![2; 4], v).unwrap()
}

/// `S(|Ω⟩_AB ⊗ |Ω⟩_CD)`, normalised, with
/// `S = (−(5+√5)·(AD)(BC) + (5−3√5)·(AD) + (−5+√5)·(BC))/20`.
pub fn p4_state_from_swaps() -> PureState {
    let s = sqrt5();
    let omega = epr().tensor(&epr());
    let terms = [
        (-(5.0 + s) / 20.0, [3, 2, 1, 0]),
        ((5.0 - 3.0 * s) / 20.0, [3, 1, 2, 0]),
        ((-5.0 + s) / 20.0, [0, 2, 1, 3]),
    ];
    let mut v = CVec::zeros(16);
    for (w, order) in terms {
        v += omega.permute(&order).unwrap().amplitudes * real(w);
    }
    PureState::new(vec![2; 4], v).unwrap()
}

/// Observables `[O_0, O_1]` for A, B, C, D: `A = C = (σ_x, σ_z)` and
/// `B = D = ((σ_x + σ_z)/√2, (σ_x − σ_z)/√2)`.
pub fn p4_observables() -> Vec<[CMat; 2]> {
    let ac = [pauli_x(), pauli_z()];
    let bd = [rotated(true), rotated(false)];
    vec![ac.clone(), bd.clone(), ac, bd]
}

fn to_strategy(state: State, observables: &[[CMat; 2]]) -> Result<QuantumStrategy> {
    let measurements = observables
        .iter()
        .map(|obs| obs.iter().map(binary_projectors).collect())
        .collect();
    QuantumStrategy::new(state, measurements)
}

/// The four-player CHSH strategy on the path A–B–C–D.
pub fn build_p4_strategy() -> QuantumStrategy {
    to_strategy(State::Pure(p4_state()), &p4_observables()).expect("P4 strategy is valid")
}

/// CHSH biases `⟨B_e⟩` along the consecutive edges of a chain of players
/// `0, 1, …, n−1`, with the lower player in the role of the first party.
pub fn chain_biases(state: &State, observables: &[[CMat; 2]]) -> Result<Vec<f64>> {
    let n = state.dims().len();
    if observables.len() != n {
        return Err(invalid!("{} observable pairs for {n} players", observables.len()));
    }
    (0..n - 1)
        .map(|u| Ok(chsh_bias(&state.partial_trace(&[u, u + 1])?, &observables[u], &observables[u + 1])))
        .collect()
}

/// `Σ_e B_e` along the chain as an operator on the full qubit register.
pub fn chain_bell_operator(observables: &[[CMat; 2]]) -> CMat {
    let n = observables.len();
    let d = 1 << n;
    let mut bell = CMat::zeros(d, d);
    for u in 0..n.saturating_sub(1) {
        for x in 0..2 {
            for y in 0..2 {
                let sign = if x == 1 && y == 1 { -1.0 } else { 1.0 };
                let factors: Vec<CMat> = (0..n)
                    .map(|p| match p {
                        p if p == u => observables[u][x].clone(),
                        p if p == u + 1 => observables[p][y].clone(),
                        _ => identity(2),
                    })
                    .collect();
                bell += factors.iter().fold(identity(1), |acc, f| kron(&acc, f)) * real(sign);
            }
        }
    }
    bell
}

/// Result of optimising one-qubit observables in the x–z plane.
#[derive(Clone, Debug)]
pub struct RecoveredObservables {
    /// `angles[p][s]`: observable `cos θ·σ_z + sin θ·σ_x`.
    pub angles: Vec<[f64; 2]>,
    pub observables: Vec<[CMat; 2]>,
    pub biases: Vec<f64>,
}

/// Maximises the summed chain biases over x–z plane qubit observables by
/// exact coordinate ascent: the objective is affine in each observable, so
/// each step sets `θ = atan2(f(σ_x) − f(0), f(σ_z) − f(0))`.
pub fn recover_observables(state: &State, start: &[[f64; 2]], sweeps: usize) -> Result<RecoveredObservables> {
    let n = state.dims().len();
    if state.dims().iter().any(|&d| d != 2) || start.len() != n || n < 2 {
        return Err(invalid!("observable recovery needs a chain of qubits and one angle pair per player"));
    }
    let rhos: Vec<DensityMatrix> = (0..n - 1)
        .map(|u| state.partial_trace(&[u, u + 1]))
        .collect::<Result<_>>()?;
    let observable = |t: f64| pauli_z() * real(t.cos()) + pauli_x() * real(t.sin());
    let total = |obs: &[[CMat; 2]]| -> f64 { (0..n - 1).map(|u| chsh_bias(&rhos[u], &obs[u], &obs[u + 1])).sum() };
    let mut angles = start.to_vec();
    let mut obs: Vec<[CMat; 2]> = angles.iter().map(|a| [observable(a[0]), observable(a[1])]).collect();
    let mut best = total(&obs);
    for _ in 0..sweeps {
        for p in 0..n {
            for s in 0..2 {
                let mut probe = |m: CMat| {
                    obs[p][s] = m;
                    total(&obs)
                };
                let f0 = probe(CMat::zeros(2, 2));
                let fz = probe(pauli_z());
                let fx = probe(pauli_x());
                let theta = (fx - f0).atan2(fz - f0);
                angles[p][s] = theta;
                obs[p][s] = observable(theta);
            }
        }
        let now = total(&obs);
        let done = (now - best).abs() < 1e-13;
        best = now;
        if done {
            break;
        }
    }
    let biases = (0..n - 1).map(|u| chsh_bias(&rhos[u], &obs[u], &obs[u + 1])).collect();
    Ok(RecoveredObservables {
        angles,
        observables: obs,
        biases,
    })
}

/// Mermin–Peres grid; rows multiply to `+I`, columns to `−I`.
pub fn magic_square_grid() -> [[CMat; 3]; 3] {
    let (i, x, y, z) = (identity(2), pauli_x(), pauli_y(), pauli_z());
    let neg = |m: CMat| m * real(-1.0);
    [
        [kron(&x, &i), kron(&i, &x), kron(&x, &x)],
        [kron(&i, &z), kron(&z, &i), kron(&z, &z)],
        [neg(kron(&x, &z)), neg(kron(&z, &x)), kron(&y, &y)],
    ]
}

/// Two EPR pairs; on line `x` each player measures the three commuting
/// grid observables and reports their signs (bit 1 for `−1`).
pub fn magic_square_strategy() -> QuantumStrategy {
    let grid = magic_square_grid();
    let id = identity(4);
    let per_player: Vec<Vec<CMat>> = (0..6)
        .map(|x| {
            let cells = magic_square_cells(x);
            (0..8)
                .map(|a| {
                    cells.iter().enumerate().fold(id.clone(), |acc, (k, &(r, col))| {
                        let sign = if a >> k & 1 == 1 { -1.0 } else { 1.0 };
                        acc * ((&id + &grid[r][col] * real(sign)) * real(0.5))
                    })
                })
                .collect()
        })
        .collect();
    // qubits (A1, B1, A2, B2) regrouped as A = (A1, A2), B = (B1, B2)
    let state = epr().tensor(&epr()).permute(&[0, 2, 1, 3]).unwrap().group(&[2, 2]).unwrap();
    QuantumStrategy::new(State::Pure(state), vec![per_player.clone(), per_player]).expect("magic-square strategy is valid")
}

/// Two-player strategy for `base` extended to three players on the path
/// A–B–C for `base.or_compose()`: A and B share the base state in register
/// 1, B and C share it in register 2. A plays the first role in both
/// instances, C the second, B the second role in instance 1 and the first
/// role in instance 2.
pub fn build_polygamy_strategy(base: &Game, base_strategy: &QuantumStrategy) -> Result<QuantumStrategy> {
    if base_strategy.num_players() != 2 {
        return Err(invalid!("the base strategy must have two players"));
    }
    let value = base_strategy.edge_value(base, 0, 1)?;
    if value < 1.0 - 1e-9 {
        return Err(invalid!("the base strategy wins with probability {value}, not 1"));
    }
    let State::Pure(g) = &base_strategy.state else {
        return Err(invalid!("the polygamy construction needs a pure base state"));
    };
    let (da, db) = (g.dims[0], g.dims[1]);
    // factors A1, B1, C1, A2, B2, C2
    let state = g
        .tensor(&PureState::basis(vec![db], 0)?)
        .tensor(&PureState::basis(vec![da], 0)?)
        .tensor(g)
        .permute(&[0, 3, 1, 4, 2, 5])?
        .group(&[2, 2, 2])?;
    let (q, o) = (base.num_questions(), base.num_answers());
    let m = &base_strategy.measurements;
    let composite = |first: usize, second: usize| -> Vec<Vec<CMat>> {
        (0..q * q)
            .map(|xx| {
                let (x1, x2) = (xx / q, xx % q);
                (0..o * o)
                    .map(|aa| kron(&m[first][x1][aa / o], &m[second][x2][aa % o]))
                    .collect()
            })
            .collect()
    };
    QuantumStrategy::new(State::Pure(state), vec![composite(0, 0), composite(1, 0), composite(1, 1)])
}

/// `base` lifted to the question and answer space of `base.or_compose()`,
/// won when instance `which` (0 or 1) is won.
pub fn instance_game(base: &Game, which: usize) -> Result<Game> {
    if which > 1 {
        return Err(invalid!("instance index must be 0 or 1"));
    }
    let composed = base.or_compose();
    let (q, o) = (base.num_questions(), base.num_answers());
    let pick = |v: usize, n: usize| if which == 0 { v / n } else { v % n };
    let weights = (0..q * q)
        .flat_map(|x1| (0..q * q).map(move |x2| (x1, x2)))
        .map(|(x1, x2)| composed.weight(x1, x2).clone())
        .collect();
    Game::new(
        format!("{}-instance{}", base.label(), which + 1),
        q * q,
        o * o,
        |x1, x2, a1, a2| base.wins(pick(x1, q), pick(x2, q), pick(a1, o), pick(a2, o)),
        Some(weights),
    )
}

/// The path on three players with the composed game.
pub fn polygamy_game(base: &Game) -> GraphGame {
    GraphGame {
        base: base.or_compose(),
        graph: Graph::path(3),
    }
}

/// Haar-ish random unitary from the QR factorisation of a complex Gaussian
/// matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| c(gaussian(rng), gaussian(rng)));
    g.qr().q()
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

/// Random pure state with random projective measurements: each
/// measurement splits the columns of a random unitary among the answers
/// (every answer gets at least one column when `d ≥ answers`).
pub fn random_strategy<R: Rng + ?Sized>(rng: &mut R, dims: &[usize], questions: usize, answers: usize) -> QuantumStrategy {
    let total: usize = dims.iter().product();
    let amps = CVec::from_fn(total, |_, _| c(gaussian(rng), gaussian(rng)));
    let state = PureState::new(dims.to_vec(), amps).expect("nonzero random state");
    let measurements = dims
        .iter()
        .map(|&d| {
            (0..questions)
                .map(|_| {
                    let u = random_unitary(rng, d);
                    let mut ps = vec![CMat::zeros(d, d); answers];
                    for col in 0..d {
                        let a = if col < answers { col } else { rng.gen_range(0..answers) };
                        let v = u.column(col);
                        ps[a] += &v * v.adjoint();
                    }
                    ps
                })
                .collect()
        })
        .collect();
    QuantumStrategy::new(State::Pure(state), measurements).expect("random projectors are valid")
}

/// Conjugates the state by `⊗_p U_p` and every measurement of player `p`
/// by `U_p`; values are unchanged.
pub fn apply_local_unitaries(s: &QuantumStrategy, unitaries: &[CMat]) -> Result<QuantumStrategy> {
    if unitaries.len() != s.num_players() || unitaries.iter().zip(s.state.dims()).any(|(u, &d)| u.nrows() != d) {
        return Err(invalid!("one unitary of matching dimension per player is required"));
    }
    let global = unitaries.iter().fold(identity(1), |acc, u| kron(&acc, u));
    let state = match &s.state {
        State::Pure(p) => State::Pure(PureState::new(p.dims.clone(), &global * &p.amplitudes)?),
        State::Mixed(m) => State::Mixed(DensityMatrix::new(m.dims.clone(), &global * &m.rho * global.adjoint())?),
    };
    let measurements = s
        .measurements
        .iter()
        .zip(unitaries)
        .map(|(per_q, u)| {
            per_q
                .iter()
                .map(|ps| ps.iter().map(|p| u * p * u.adjoint()).collect())
                .collect()
        })
        .collect();
    QuantumStrategy::new(state, measurements)
}

#[cfg(test)]
mod tests {
    use super::super::state::ppt_min_eigenvalue;
    use super::super::strategy::strategy_value;
    use super::*;
    use crate::game::{chsh, extend_over_graph, magic_square};
    use approx::assert_abs_diff_eq;

    fn chsh_on(n: usize) -> GraphGame {
        extend_over_graph(&chsh(), &Graph::path(n)).unwrap()
    }

    #[test]
    fn tsirelson_value() {
        let v = strategy_value(&chsh_on(2), &tsirelson_strategy()).unwrap();
        assert_abs_diff_eq!(v, 0.5 + 0.25 * 2f64.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn product_strategy_on_p3() {
        let v = strategy_value(&chsh_on(3), &product_p3_strategy()).unwrap();
        assert_abs_diff_eq!(v, (0.5 + 0.25 * 2f64.sqrt() + 0.5) / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn p4_biases_and_value() {
        let s = build_p4_strategy();
        let b = chain_biases(&s.state, &p4_observables()).unwrap();
        let big = 4.0 * 2f64.sqrt() / sqrt5();
        assert_abs_diff_eq!(b[0], big, epsilon = 1e-9);
        assert_abs_diff_eq!(b[1], big / 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b[2], big, epsilon = 1e-9);
        assert!(b[0] * b[0] + b[1] * b[1] <= 8.0 + 1e-6);
        let v = strategy_value(&chsh_on(4), &s).unwrap();
        assert_abs_diff_eq!(v, 0.5 + 10f64.sqrt() / 12.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.state.density().trace(), 1.0, epsilon = 1e-12);
    }

    fn ppt(state: &State, pair: [usize; 2]) -> f64 {
        ppt_min_eigenvalue(&state.partial_trace(&pair).unwrap(), &[0]).unwrap()
    }

    #[test]
    fn p4_ppt_pattern() {
        let s = build_p4_strategy().state;
        for pair in [[0, 2], [1, 3]] {
            assert!(ppt(&s, pair) >= -1e-10, "{pair:?}");
        }
        for pair in [[0, 1], [2, 3], [1, 2], [0, 3]] {
            assert!(ppt(&s, pair) < -1e-6, "{pair:?}");
        }
        let swapped = State::Pure(p4_state_from_swaps());
        for pair in [[0, 3], [1, 2]] {
            assert!(ppt(&swapped, pair) >= -1e-10, "{pair:?}");
        }
        for pair in [[0, 1], [2, 3], [0, 2], [1, 3]] {
            assert!(ppt(&swapped, pair) < -1e-6, "{pair:?}");
        }
    }

    #[test]
    fn optimal_state_is_unique_for_the_observables() {
        let ev = crate::quantum::linalg::hermitian_eigenvalues(&chain_bell_operator(&p4_observables())).unwrap();
        let top = 2.0 * 10f64.sqrt();
        assert_abs_diff_eq!(ev[15], top, epsilon = 1e-9);
        assert!(ev[14] < top - 1.0);
        assert!(p4_state().overlap(&p4_state_from_swaps()) < 0.97);
    }

    #[test]
    fn recovery_reaches_the_optimum() {
        let state = State::Pure(p4_state());
        let r = recover_observables(&state, &[[0.3, 1.2], [0.7, -0.4], [0.1, 1.0], [0.9, -0.2]], 500).unwrap();
        let total: f64 = r.biases.iter().sum();
        assert_abs_diff_eq!(total, 10.0 * 2f64.sqrt() / sqrt5(), epsilon = 1e-8);
    }

    #[test]
    fn magic_square_wins_always() {
        let s = magic_square_strategy();
        let v = s.edge_value(&magic_square(), 0, 1).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn polygamy_from_tsirelson_is_rejected() {
        assert!(build_polygamy_strategy(&chsh(), &tsirelson_strategy()).is_err());
    }

    #[test]
    fn polygamy_on_anti_correlation() {
        let base = crate::game::anti_correlation();
        let singlet = PureState::new(vec![2, 2], CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)])).unwrap();
        let z = binary_projectors(&pauli_z());
        let strat = QuantumStrategy::new(State::Pure(singlet), vec![vec![z.clone()], vec![z]]).unwrap();
        let poly = build_polygamy_strategy(&base, &strat).unwrap();
        let gg = polygamy_game(&base);
        for v in poly.edge_values(&gg).unwrap() {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
        }
        let first = poly.edge_value(&instance_game(&base, 0).unwrap(), 0, 1).unwrap();
        assert_abs_diff_eq!(first, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn local_unitaries_preserve_values() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let s = build_p4_strategy();
        let us: Vec<CMat> = (0..4).map(|_| random_unitary(&mut rng, 2)).collect();
        let t = apply_local_unitaries(&s, &us).unwrap();
        let gg = chsh_on(4);
        assert_abs_diff_eq!(strategy_value(&gg, &s).unwrap(), strategy_value(&gg, &t).unwrap(), epsilon = 1e-9);
    }
}
