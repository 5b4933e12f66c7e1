//! Projective-measurement strategies and their values on graph games.

use serde_json::{json, Value};

use super::linalg::{c, identity, max_abs_diff, trace_product, CMat};
use super::state::{CVec, DensityMatrix, PureState, State};
use crate::error::{invalid, Error, Result};
use crate::game::{Game, GraphGame};

/// `measurements[player][question][answer]` is a projector on that
/// player's local space.
#[derive(Clone, Debug)]
pub struct QuantumStrategy {
    pub state: State,
    pub measurements: Vec<Vec<Vec<CMat>>>,
}

const STRUCTURE_TOL: f64 = 1e-10;

impl QuantumStrategy {
    /// Checks dimensions, idempotence, orthogonality and completeness of
    /// every measurement within `1e-10`.
    pub fn new(state: State, measurements: Vec<Vec<Vec<CMat>>>) -> Result<QuantumStrategy> {
        let dims = state.dims().to_vec();
        if measurements.len() != dims.len() {
            return Err(invalid!("{} measurement lists for {} players", measurements.len(), dims.len()));
        }
        for (p, per_question) in measurements.iter().enumerate() {
            let d = dims[p];
            for (x, projectors) in per_question.iter().enumerate() {
                let mut sum = CMat::zeros(d, d);
                for (a, pa) in projectors.iter().enumerate() {
                    if pa.nrows() != d || pa.ncols() != d {
                        return Err(invalid!("projector ({p},{x},{a}) is not {d}x{d}"));
                    }
                    if max_abs_diff(&(pa * pa), pa) > STRUCTURE_TOL || max_abs_diff(pa, &pa.adjoint()) > STRUCTURE_TOL {
                        return Err(invalid!("operator ({p},{x},{a}) is not an orthogonal projector"));
                    }
                    for pb in &projectors[a + 1..] {
                        if (pa * pb).iter().any(|z| z.norm() > STRUCTURE_TOL) {
                            return Err(invalid!("projectors of ({p},{x}) are not mutually orthogonal"));
                        }
                    }
                    sum += pa;
                }
                if max_abs_diff(&sum, &identity(d)) > STRUCTURE_TOL {
                    return Err(invalid!("projectors of ({p},{x}) do not sum to the identity"));
                }
            }
        }
        Ok(QuantumStrategy { state, measurements })
    }

    pub fn num_players(&self) -> usize {
        self.measurements.len()
    }

    fn check_game(&self, game: &Game) -> Result<()> {
        for (p, per_question) in self.measurements.iter().enumerate() {
            if per_question.len() != game.num_questions()
                || per_question.iter().any(|m| m.len() != game.num_answers())
            {
                return Err(invalid!(
                    "player {p} measurements do not match |I| = {}, |O| = {}",
                    game.num_questions(),
                    game.num_answers()
                ));
            }
        }
        Ok(())
    }

    /// Born probabilities `p(a, b | x, y)` for players `u` (first) and `v`.
    pub fn pair_distribution(&self, u: usize, v: usize, x: usize, y: usize) -> Result<Vec<Vec<f64>>> {
        let rho = self.state.partial_trace(&[u, v])?;
        let dv = self.state.dims()[v];
        let pu = &self.measurements[u][x];
        let pv = &self.measurements[v][y];
        Ok(pu
            .iter()
            .map(|p| {
                let sigma = conditional(&rho.rho, p, dv);
                pv.iter().map(|q| trace_product(q, &sigma).re).collect()
            })
            .collect())
    }

    /// Winning probability of `game` between players `u` (first) and `v`.
    pub fn edge_value(&self, game: &Game, u: usize, v: usize) -> Result<f64> {
        self.check_game(game)?;
        let rho = self.state.partial_trace(&[u, v])?;
        let dv = self.state.dims()[v];
        let (q, o) = (game.num_questions(), game.num_answers());
        let nonzero = |p: &CMat| p.iter().any(|z| z.norm() > 1e-14);
        let mut total = 0.0;
        for x in 0..q {
            for a in 0..o {
                let pa = &self.measurements[u][x][a];
                if !nonzero(pa) {
                    continue;
                }
                let sigma = conditional(&rho.rho, pa, dv);
                for y in 0..q {
                    let w = game.weight_f64(x, y);
                    if w == 0.0 {
                        continue;
                    }
                    for b in 0..o {
                        let qb = &self.measurements[v][y][b];
                        if game.wins(x, y, a, b) && nonzero(qb) {
                            total += w * trace_product(qb, &sigma).re;
                        }
                    }
                }
            }
        }
        Ok(total)
    }

    /// Per-edge winning probabilities in the order of `gg.edges()`.
    pub fn edge_values(&self, gg: &GraphGame) -> Result<Vec<f64>> {
        if self.num_players() != gg.num_players() {
            return Err(invalid!("{} players in the strategy, {} in the game", self.num_players(), gg.num_players()));
        }
        gg.edges().into_iter().map(|(u, v)| self.edge_value(&gg.base, u, v)).collect()
    }

    /// Transforms to JSON: `{"dims", "state": {"kind", "entries"},
    /// "measurements"}`, complex numbers as `[re, im]`, matrices row-major.
    pub fn to_json(&self) -> Value {
        let pair = |z: &num_complex::Complex64| json!([z.re, z.im]);
        let matrix = |m: &CMat| -> Value {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| pair(&m[(i, j)])).collect::<Vec<_>>())
                .collect()
        };
        let state = match &self.state {
            State::Pure(p) => json!({"kind": "pure", "entries": p.amplitudes.iter().map(pair).collect::<Vec<_>>()}),
            State::Mixed(m) => json!({"kind": "density", "entries": matrix(&m.rho)}),
        };
        let measurements: Vec<Value> = self
            .measurements
            .iter()
            .map(|per_q| per_q.iter().map(|ps| ps.iter().map(matrix).collect::<Vec<_>>()).collect())
            .collect();
        json!({"dims": self.state.dims(), "state": state, "measurements": measurements})
    }

    pub fn from_json(value: &Value) -> Result<QuantumStrategy> {
        let bad = |what: &str| Error::Parse(format!("strategy JSON: {what}"));
        let complex = |v: &Value| -> Result<num_complex::Complex64> {
            let a = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("complex entry"))?;
            Ok(c(
                a[0].as_f64().ok_or_else(|| bad("real part"))?,
                a[1].as_f64().ok_or_else(|| bad("imaginary part"))?,
            ))
        };
        let matrix = |v: &Value| -> Result<CMat> {
            let rows = v.as_array().ok_or_else(|| bad("matrix"))?;
            let n = rows.len();
            let mut m = CMat::zeros(n, n);
            for (i, row) in rows.iter().enumerate() {
                let row = row.as_array().filter(|r| r.len() == n).ok_or_else(|| bad("matrix row"))?;
                for (j, z) in row.iter().enumerate() {
                    m[(i, j)] = complex(z)?;
                }
            }
            Ok(m)
        };
        let dims: Vec<usize> = value
            .get("dims")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("dims"))?
            .iter()
            .map(|d| d.as_u64().map(|d| d as usize).ok_or_else(|| bad("dims entry")))
            .collect::<Result<_>>()?;
        let st = value.get("state").ok_or_else(|| bad("state"))?;
        let entries = st.get("entries").ok_or_else(|| bad("state entries"))?;
        let state = match st.get("kind").and_then(Value::as_str) {
            Some("pure") => {
                let amps = entries
                    .as_array()
                    .ok_or_else(|| bad("amplitudes"))?
                    .iter()
                    .map(complex)
                    .collect::<Result<Vec<_>>>()?;
                State::Pure(PureState::new(dims, CVec::from_vec(amps))?)
            }
            Some("density") => State::Mixed(DensityMatrix::new(dims, matrix(entries)?)?),
            _ => return Err(bad("state kind must be \"pure\" or \"density\"")),
        };
        let measurements = value
            .get("measurements")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("measurements"))?
            .iter()
            .map(|per_q| {
                per_q
                    .as_array()
                    .ok_or_else(|| bad("per-question list"))?
                    .iter()
                    .map(|ps| {
                        ps.as_array()
                            .ok_or_else(|| bad("projector list"))?
                            .iter()
                            .map(matrix)
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        QuantumStrategy::new(state, measurements)
    }
}

/// `Tr_u[(P ⊗ I) ρ]` for a two-party `ρ` whose second factor has
/// dimension `dv`.
fn conditional(rho: &CMat, p: &CMat, dv: usize) -> CMat {
    let du = p.nrows();
    let mut sigma = CMat::zeros(dv, dv);
    for i in 0..du {
        for j in 0..du {
            let pij = p[(i, j)];
            if pij.norm() == 0.0 {
                continue;
            }
            for l1 in 0..dv {
                for l2 in 0..dv {
                    sigma[(l1, l2)] += pij * rho[(j * dv + l1, i * dv + l2)];
                }
            }
        }
    }
    sigma
}

/// `ω(G^H; S)`: mean winning probability over the edges.
pub fn strategy_value(gg: &GraphGame, s: &QuantumStrategy) -> Result<f64> {
    let values = s.edge_values(gg)?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Expectation of `O_u ⊗ O_v` on the reduced state of players `u`, `v`.
pub fn correlator(rho_uv: &DensityMatrix, ou: &CMat, ov: &CMat) -> f64 {
    trace_product(&ou.kronecker(ov), &rho_uv.rho).re
}

/// `⟨X0Y0 + X0Y1 + X1Y0 − X1Y1⟩` for observables `x = [X0, X1]`,
/// `y = [Y0, Y1]`.
pub fn chsh_bias(rho_uv: &DensityMatrix, x: &[CMat; 2], y: &[CMat; 2]) -> f64 {
    correlator(rho_uv, &x[0], &y[0]) + correlator(rho_uv, &x[0], &y[1]) + correlator(rho_uv, &x[1], &y[0])
        - correlator(rho_uv, &x[1], &y[1])
}
