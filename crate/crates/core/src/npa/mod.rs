//! NPA relaxations for graph games with binary answers: upper bounds on
//! quantum values, feasibility of CHSH bias points and region scans.

pub mod moment;
pub mod sdp;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

pub use moment::{monomials, Level, MomentProblem};
pub use sdp::{SdpOptions, SdpProblem, SdpSolution, SdpStatus};

use crate::error::{invalid, Error, Result};
use crate::game::GraphGame;
use crate::graph::Graph;
use crate::quantum::linalg::CMat;
use crate::quantum::state::CVec;
use crate::quantum::{QuantumStrategy, State};
use crate::word::{Letter, Word};

pub const DEFAULT_TOL: f64 = 1e-8;

/// Edge-averaged winning probability of `gg` as an affine function of
/// correlators, using
/// `P(a,b|x,y) = (1 + (−1)^a⟨A_x⟩ + (−1)^b⟨B_y⟩ + (−1)^{a+b}⟨A_x B_y⟩)/4`.
pub fn objective_terms(gg: &GraphGame) -> Result<(Vec<(Word, f64)>, f64)> {
    let g = &gg.base;
    if g.num_answers() != 2 {
        return Err(invalid!("NPA bounds need a binary-answer game, got |O| = {}", g.num_answers()));
    }
    let edges = gg.edges();
    let scale = 1.0 / edges.len() as f64;
    let q = g.num_questions();
    let mut terms = Vec::new();
    let mut constant = 0.0;
    for &(u, v) in &edges {
        for x in 0..q {
            for y in 0..q {
                let w = g.weight_f64(x, y) * scale / 4.0;
                if w == 0.0 {
                    continue;
                }
                let (au, bv) = (Letter::new(u, x), Letter::new(v, y));
                for a in 0..2 {
                    for b in 0..2 {
                        if !g.wins(x, y, a, b) {
                            continue;
                        }
                        let (sa, sb) = (if a == 0 { 1.0 } else { -1.0 }, if b == 0 { 1.0 } else { -1.0 });
                        constant += w;
                        terms.push((Word::letter(au), w * sa));
                        terms.push((Word::letter(bv), w * sb));
                        terms.push((Word::from_letters([au, bv]), w * sa * sb));
                    }
                }
            }
        }
    }
    Ok((terms, constant))
}

pub fn build_moment_problem(gg: &GraphGame, level: Level) -> Result<MomentProblem> {
    let (terms, constant) = objective_terms(gg)?;
    let mut p = MomentProblem::new(gg.num_players(), gg.base.num_questions(), &gg.graph, level)?;
    p.set_objective(&terms, constant)?;
    Ok(p)
}

/// Result of an upper-bound solve. `bound` is certified from the dual
/// matrix including its residuals, so it is valid even when the solver
/// stops early.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub bound: f64,
    pub level: Level,
    pub gap: f64,
    pub status: SdpStatus,
    /// Objective at the moment vector found.
    pub primal: f64,
    pub matrix_size: usize,
    pub iterations: usize,
}

impl BoundReport {
    pub fn to_json(&self) -> Value {
        json!({
            "bound": self.bound,
            "level": self.level.to_string(),
            "gap": self.gap,
            "status": self.status.as_str(),
        })
    }
}

pub fn solve_sdp(p: &MomentProblem, tol: f64) -> Result<(SdpSolution, BoundReport)> {
    if tol < 1e-9 || !tol.is_finite() {
        return Err(invalid!("solver tolerance must be at least 1e-9, got {tol}"));
    }
    let sol = sdp::solve(&p.to_sdp(), SdpOptions { tol, ..SdpOptions::default() })?;
    let bound = p.certified_bound(&sol.x);
    let primal = sol.dual_objective + p.constant;
    let report = BoundReport {
        bound,
        level: p.level,
        gap: (bound - primal).max(0.0),
        status: sol.status,
        primal,
        matrix_size: p.size(),
        iterations: sol.iterations,
    };
    Ok((sol, report))
}

pub fn quantum_upper_bound(gg: &GraphGame, level: Level, tol: f64) -> Result<BoundReport> {
    let p = build_moment_problem(gg, level)?;
    let (_, report) = solve_sdp(&p, tol)?;
    log::info!(
        "NPA level {level}: size {}, bound {:.9}, gap {:.2e}, {} after {} iterations",
        report.matrix_size,
        report.bound,
        report.gap,
        report.status.as_str(),
        report.iterations
    );
    Ok(report)
}

/// Tries the levels in order and returns the first bound at most
/// `target`, or the last report if none certifies.
pub fn lowest_certifying_level(gg: &GraphGame, levels: &[Level], target: f64, tol: f64) -> Result<BoundReport> {
    let mut last = None;
    for &level in levels {
        let r = quantum_upper_bound(gg, level, tol)?;
        if r.bound <= target {
            return Ok(r);
        }
        last = Some(r);
    }
    last.ok_or_else(|| invalid!("no levels given"))
}

/// The CHSH expression `A0B0 + A0B1 + A1B0 − A1B1` between `u` and `v`.
pub fn chsh_terms(u: usize, v: usize) -> [(Word, f64); 4] {
    let w = |x, y| Word::from_letters([Letter::new(u, x), Letter::new(v, y)]);
    [(w(0, 0), 1.0), (w(0, 1), 1.0), (w(1, 0), 1.0), (w(1, 1), -1.0)]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Feasible,
    Infeasible,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Feasible => "true",
            Verdict::Infeasible => "false",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Feasibility answer with its evidence: `min_eigenvalue` of the best
/// moment matrix found (feasible when `≥ −tol`) and the dual certificate
/// value (infeasible when `< −tol`).
#[derive(Clone, Debug)]
pub struct Feasibility {
    pub verdict: Verdict,
    pub min_eigenvalue: f64,
    pub certificate: f64,
    pub status: SdpStatus,
}

/// Whether some moment matrix at `level` reaches the CHSH bias
/// `targets[e]` on every edge `e` of `h` (in `h.edges()` order).
///
/// One correlator per edge is eliminated through its bias equation; the
/// remaining problem is `max t` s.t. `Γ'(y) − tI ⪰ 0`.
pub fn bias_point_feasible(h: &Graph, targets: &[f64], level: Level, tol: f64) -> Result<Feasibility> {
    let edges = h.edges();
    if targets.len() != edges.len() {
        return Err(invalid!("{} targets for {} edges", targets.len(), edges.len()));
    }
    if tol < 1e-9 || !tol.is_finite() {
        return Err(invalid!("tolerance must be at least 1e-9, got {tol}"));
    }
    let p = MomentProblem::new(h.num_vertices(), 2, h, level)?;
    let n = p.size();
    let m = p.num_classes();
    // each class k becomes constant[k] + Σ_j sub[k][j]·free_j
    let mut pinned: Vec<Option<(f64, Vec<(usize, f64)>)>> = vec![None; m];
    for (&(u, v), &beta) in edges.iter().zip(targets) {
        let [(w00, _), rest @ ..] = chsh_terms(u, v);
        let k00 = p.class_of(&w00).ok_or_else(|| invalid!("missing correlator {w00}"))?;
        let subs = rest
            .iter()
            .map(|(w, s)| Ok((p.class_of(w).ok_or_else(|| invalid!("missing correlator {w}"))?, -s)))
            .collect::<Result<Vec<_>>>()?;
        pinned[k00] = Some((beta, subs));
    }
    let free: Vec<usize> = (0..m).filter(|&k| pinned[k].is_none()).collect();
    let mut free_pos = vec![usize::MAX; m];
    for (j, &k) in free.iter().enumerate() {
        free_pos[k] = j;
    }
    let entries = p.class_entries();
    let mut c = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if p.entry_class[i * n + j].is_none() {
                c[(i, j)] = 1.0;
            }
        }
    }
    let mut a: Vec<sdp::SparseSym> = vec![Vec::new(); free.len()];
    for k in 0..m {
        match &pinned[k] {
            None => {
                a[free_pos[k]].extend(entries[k].iter().map(|&(i, j)| (i, j, -1.0)));
            }
            Some((beta, subs)) => {
                for &(i, j) in &entries[k] {
                    c[(i, j)] += beta;
                    for &(kk, s) in subs {
                        a[free_pos[kk]].push((i, j, -s));
                    }
                }
            }
        }
    }
    let mut b = vec![0.0; free.len()];
    a.push((0..n).map(|i| (i, i, 1.0)).collect());
    b.push(1.0);
    let problem = SdpProblem {
        c: c.clone(),
        a,
        b: nalgebra::DVector::from_vec(b),
    };
    let nfree = free.len();
    // Γ'(y) = C − Σ_k y_k A_k over the free classes only
    let gamma_of = |y: &nalgebra::DVector<f64>| {
        let mut gamma = c.clone();
        for (k, ak) in problem.a[..nfree].iter().enumerate() {
            for &(i, j, v) in ak {
                gamma[(i, j)] -= y[k] * v;
            }
        }
        gamma
    };
    // a PSD Γ' needs ⟨Γ', X⟩ ≥ 0 for every PSD X; the value below bounds
    // ⟨Γ', X⟩/Tr X from above, so a negative value proves infeasibility
    let certificate_of = |x: &DMatrix<f64>| {
        let along: f64 = problem.a[..nfree]
            .iter()
            .map(|ak| ak.iter().map(|&(i, j, v)| v * x[(i, j)]).sum::<f64>().abs())
            .sum();
        let value = c.dot(x) + along + n as f64 * (-sdp::min_eigenvalue(x)).max(0.0);
        let trace = x.trace();
        if trace > 0.0 {
            value / trace
        } else {
            f64::INFINITY
        }
    };
    let sol = sdp::solve_until(&problem, SdpOptions { tol: tol.min(1e-8), ..SdpOptions::default() }, |x, y| {
        sdp::min_eigenvalue(&gamma_of(y)) >= -tol || certificate_of(x) < -tol
    })?;
    let min_eigenvalue = sdp::min_eigenvalue(&gamma_of(&sol.y));
    let certificate = certificate_of(&sol.x);
    let verdict = if min_eigenvalue >= -tol {
        Verdict::Feasible
    } else if certificate < -tol {
        Verdict::Infeasible
    } else {
        Verdict::Inconclusive
    };
    Ok(Feasibility {
        verdict,
        min_eigenvalue,
        certificate,
        status: sol.status,
    })
}

/// One grid point of the path-on-six slice.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub x: f64,
    pub y: f64,
    pub npa: Verdict,
    pub inside_quadratic: bool,
    pub inside_linear: bool,
}

/// Biases `(x, y, x, y, x)` on the edges of the path on six players.
pub fn slice_targets(x: f64, y: f64) -> Vec<f64> {
    vec![x, y, x, y, x]
}

pub const MAX_SCAN_POINTS: usize = 10_000;

/// Runs the slice feasibility test at every point, in parallel over
/// `threads` workers.
pub fn scan_points(points: &[(f64, f64)], level: Level, tol: f64, threads: usize) -> Result<Vec<ScanRow>> {
    if points.len() > MAX_SCAN_POINTS {
        return Err(Error::Capacity(format!("{} grid points exceed the cap {MAX_SCAN_POINTS}", points.len())));
    }
    let h = Graph::path(6);
    let threads = threads.max(1).min(points.len().max(1));
    let chunk = points.len().div_ceil(threads).max(1);
    let results: Vec<Result<Vec<ScanRow>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| {
                let h = &h;
                scope.spawn(move || {
                    part.iter()
                        .map(|&(x, y)| {
                            let f = bias_point_feasible(h, &slice_targets(x, y), level, tol)?;
                            Ok(ScanRow {
                                x,
                                y,
                                npa: f.verdict,
                                inside_quadratic: x * x + y * y <= 8.0,
                                inside_linear: 3.0 * x + 2.0 * y <= 10.0,
                            })
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scan worker panicked")).collect()
    });
    let mut rows = Vec::with_capacity(points.len());
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Uniform `nx × ny` grid over `[x0, x1] × [y0, y1]`.
pub fn grid(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Vec<(f64, f64)> {
    let at = |(lo, hi): (f64, f64), n: usize, i: usize| if n <= 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
    (0..nx)
        .flat_map(|i| (0..ny).map(move |j| (at(x, nx, i), at(y, ny, j))))
        .collect()
}

pub fn scan_region(xr: (f64, f64), yr: (f64, f64), nx: usize, ny: usize, level: Level, tol: f64, threads: usize) -> Result<Vec<ScanRow>> {
    if nx.saturating_mul(ny) > MAX_SCAN_POINTS {
        return Err(Error::Capacity(format!("{nx}x{ny} grid exceeds the cap {MAX_SCAN_POINTS}")));
    }
    scan_points(&grid(xr, yr, nx, ny), level, tol, threads)
}

/// Decimal rendering with at most `digits` significant digits.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub const SCAN_HEADER: &str = "x,y,npa_feasible,inside_quadratic,inside_linear";

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from(SCAN_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            format_significant(r.x, 9),
            format_significant(r.y, 9),
            r.npa.as_str(),
            r.inside_quadratic,
            r.inside_linear
        ));
    }
    out
}

/// Checks that an explicit binary strategy yields a valid moment matrix.
#[derive(Clone, Debug)]
pub struct MomentCheck {
    pub min_eigenvalue: f64,
    /// Largest spread of the entries of one class.
    pub class_deviation: f64,
    /// Objective evaluated at the strategy's moments.
    pub objective: f64,
}

fn observable(s: &QuantumStrategy, p: usize, x: usize) -> CMat {
    let ps = &s.measurements[p][x];
    &ps[0] - &ps[1]
}

/// `(I ⊗ … ⊗ O ⊗ … ⊗ I)·v` with `O` on factor `p`.
fn apply_local(op: &CMat, p: usize, dims: &[usize], v: &CVec) -> CVec {
    let d = dims[p];
    let inner: usize = dims[p + 1..].iter().product();
    let outer: usize = dims[..p].iter().product();
    let mut out = CVec::zeros(v.len());
    for o in 0..outer {
        for i in 0..inner {
            for r in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in 0..d {
                    acc += op[(r, c)] * v[(o * d + c) * inner + i];
                }
                out[(o * d + r) * inner + i] = acc;
            }
        }
    }
    out
}

/// `Γ_ij = Re⟨w_i* w_j⟩` for the strategy's observables `P_0 − P_1`.
pub fn strategy_moment_matrix(p: &MomentProblem, s: &QuantumStrategy) -> Result<DMatrix<f64>> {
    let dims = s.state.dims().to_vec();
    if dims.len() != p.parties || s.measurements.iter().any(|m| m.len() != p.settings || m.iter().any(|ps| ps.len() != 2)) {
        return Err(invalid!("strategy does not match the {}-party, {}-setting binary scenario", p.parties, p.settings));
    }
    let obs: Vec<Vec<CMat>> = (0..p.parties)
        .map(|q| (0..p.settings).map(|x| observable(s, q, x)).collect())
        .collect();
    let apply_word = |w: &Word, v: &CVec| -> CVec {
        w.letters()
            .iter()
            .rev()
            .fold(v.clone(), |acc, l| apply_local(&obs[l.party as usize][l.setting as usize], l.party as usize, &dims, &acc))
    };
    let n = p.size();
    let total: usize = dims.iter().product();
    // purify a mixed state through its eigen-decomposition columns
    let columns: Vec<CVec> = match &s.state {
        State::Pure(ps) => vec![ps.amplitudes.clone()],
        State::Mixed(m) => {
            let eig = m.rho.clone().symmetric_eigen();
            (0..total)
                .filter(|&k| eig.eigenvalues[k] > 1e-14)
                .map(|k| eig.eigenvectors.column(k).into_owned() * Complex64::new(eig.eigenvalues[k].sqrt(), 0.0))
                .collect()
        }
    };
    let mut gamma = DMatrix::zeros(n, n);
    for col in &columns {
        let images: Vec<CVec> = p.words.iter().map(|w| apply_word(w, col)).collect();
        for i in 0..n {
            for j in 0..n {
                gamma[(i, j)] += images[i].dotc(&images[j]).re;
            }
        }
    }
    Ok(gamma)
}

pub fn check_strategy_moments(p: &MomentProblem, s: &QuantumStrategy) -> Result<MomentCheck> {
    let gamma = strategy_moment_matrix(p, s)?;
    let n = p.size();
    let mut deviation: f64 = 0.0;
    for i in 0..n {
        if (gamma[(i, i)] - 1.0).abs() > deviation {
            deviation = (gamma[(i, i)] - 1.0).abs();
        }
    }
    let mut values = vec![0.0; p.num_classes()];
    for (k, es) in p.class_entries().iter().enumerate() {
        let first = gamma[es[0]];
        for &e in es {
            deviation = deviation.max((gamma[e] - first).abs());
        }
        values[k] = first;
    }
    let objective = p.constant + p.objective.iter().zip(&values).map(|(c, y)| c * y).sum::<f64>();
    Ok(MomentCheck {
        min_eigenvalue: sdp::min_eigenvalue(&gamma),
        class_deviation: deviation,
        objective,
    })
}
