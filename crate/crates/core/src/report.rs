//! The monogamy classification pipeline: classical values, NPA bounds on
//! `P3`, `P4` and the families `T_k`, and the transfer theorems that turn
//! these finitely many checks into a statement about all graphs.
//!
//! A graph `H` counts as having no quantum advantage when the certified NPA
//! bound is at most `ω(G^H) + tol`; an advantage is reported when the
//! bound exceeds it. Explicit strategies, where the library has one, are
//! attached as witnesses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::classical::{classical_value, classical_value_on_graph, strategy_graph};
use crate::error::Result;
use crate::game::{chsh, extend_over_graph, magic_square, Game};
use crate::graph::{enumerate_tk, homomorphism_exists, Graph, DEFAULT_TK_CAP};
use crate::npa::{lowest_certifying_level, Level};
use crate::quantum::constructions::{
    build_p4_strategy, build_polygamy_strategy, instance_game, polygamy_game, tsirelson_strategy,
};
use crate::quantum::{strategy_value, QuantumStrategy};
use crate::rational::{self, to_f64, Rational};

/// Default slack between a certified bound and the classical value.
pub const DEFAULT_ADVANTAGE_TOL: f64 = 1e-3;

#[derive(Clone, Debug, Serialize)]
pub struct GraphCheck {
    pub graph: String,
    #[serde(serialize_with = "rational::serialize")]
    pub classical: Rational,
    pub npa_bound: Option<f64>,
    pub level: Option<String>,
    pub no_advantage: Option<bool>,
    /// Value of an explicit quantum strategy from the library, if any.
    pub witness: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonogamyReport {
    pub game: String,
    #[serde(serialize_with = "rational::serialize")]
    pub classical_value: Rational,
    pub p2: GraphCheck,
    pub p3: GraphCheck,
    pub p4: GraphCheck,
    /// `tk[i]` holds the members of `T_{i+3}`.
    pub tk: Vec<Vec<GraphCheck>>,
    pub hom_p3: bool,
    pub hom_p4: bool,
    pub classification: String,
    pub advantage_on: Vec<String>,
    pub notes: Vec<String>,
}

impl MonogamyReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serialises")
    }

    pub fn is_monogamous(&self) -> bool {
        self.classification == "monogamous"
    }
}

#[derive(Clone, Debug)]
pub struct ReportOptions {
    pub max_k: usize,
    pub levels: Vec<Level>,
    pub tol: f64,
    pub solver_tol: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            max_k: 2,
            levels: Level::LADDER.to_vec(),
            tol: DEFAULT_ADVANTAGE_TOL,
            solver_tol: crate::npa::DEFAULT_TOL,
        }
    }
}

/// `P<n>` for paths, `star-a,b,c` for spiders, otherwise the `T_k` index.
pub fn describe_tree(g: &Graph, fallback: &str) -> String {
    let n = g.num_vertices();
    let degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    if g.is_tree() && degrees.iter().all(|&d| d <= 2) {
        return format!("P{n}");
    }
    let hubs: Vec<usize> = (0..n).filter(|&v| degrees[v] >= 3).collect();
    if g.is_tree() && hubs.len() == 1 {
        let hub = hubs[0];
        let mut legs: Vec<usize> = g
            .neighbors(hub)
            .iter()
            .map(|&start| {
                let (mut prev, mut cur, mut len) = (hub, start, 1);
                while let Some(&next) = g.neighbors(cur).iter().find(|&&w| w != prev) {
                    (prev, cur, len) = (cur, next, len + 1);
                }
                len
            })
            .collect();
        legs.sort_unstable();
        let legs: Vec<String> = legs.iter().map(usize::to_string).collect();
        return format!("star-{}", legs.join(","));
    }
    fallback.to_string()
}

fn is_chsh(game: &Game) -> bool {
    game.to_json() == chsh().with_label(game.label()).to_json()
}

fn witness(game: &Game, h: &Graph) -> Option<f64> {
    if !is_chsh(game) {
        return None;
    }
    let (s, path) = match h.num_vertices() {
        2 => (tsirelson_strategy(), Graph::path(2)),
        4 => (build_p4_strategy(), Graph::path(4)),
        _ => return None,
    };
    if !crate::graph::is_isomorphic(h, &path) {
        return None;
    }
    strategy_value(&extend_over_graph(game, &path).ok()?, &s).ok()
}

fn check(game: &Game, h: &Graph, name: String, opts: &ReportOptions, binary: bool) -> Result<GraphCheck> {
    let classical = classical_value_on_graph(game, h)?;
    let mut out = GraphCheck {
        graph: name,
        classical: classical.clone(),
        npa_bound: None,
        level: None,
        no_advantage: None,
        witness: witness(game, h),
    };
    if binary {
        let gg = extend_over_graph(game, h)?;
        let target = to_f64(&classical) + opts.tol;
        let r = lowest_certifying_level(&gg, &opts.levels, target, opts.solver_tol)?;
        out.no_advantage = Some(r.bound <= target);
        out.npa_bound = Some(r.bound);
        out.level = Some(r.level.to_string());
    }
    Ok(out)
}

pub fn monogamy_report(game: &Game, opts: &ReportOptions) -> Result<MonogamyReport> {
    let omega = classical_value(game)?;
    let binary = game.num_answers() == 2;
    let mut notes = Vec::new();
    if !binary {
        notes.push(format!(
            "no NPA relaxation for |O| = {}; quantum bounds unavailable",
            game.num_answers()
        ));
    }
    let sg = strategy_graph(game)?.graph;
    let hom_p3 = homomorphism_exists(&Graph::path(3), &sg);
    let hom_p4 = homomorphism_exists(&Graph::path(4), &sg);
    let p2 = check(game, &Graph::path(2), "P2".into(), opts, binary)?;
    let p3 = check(game, &Graph::path(3), "P3".into(), opts, binary)?;
    let p4 = check(game, &Graph::path(4), "P4".into(), opts, binary)?;
    let mut advantage_on = Vec::new();
    for c in [&p2, &p3, &p4] {
        if c.no_advantage == Some(false) {
            advantage_on.push(c.graph.clone());
        }
    }
    let mut tk = Vec::new();
    let classification;
    if !binary {
        classification = "inconclusive".to_string();
    } else if p3.no_advantage == Some(false) {
        notes.push("advantage on P3: the transfer theorems do not apply; the list covers the checked graphs only".into());
        classification = format!("advantage-on: [{}]", advantage_on.join(", "));
    } else if !(hom_p3 && hom_p4) {
        notes.push("P3 or P4 has no homomorphism to the strategy graph".into());
        classification = "inconclusive".to_string();
    } else if p4.no_advantage == Some(true) {
        if p2.no_advantage == Some(false) {
            notes.push("advantage on P2 only: any further connectivity removes it".into());
        }
        classification = "monogamous".to_string();
    } else {
        // P4 = T_2 has an advantage; look for the first k whose members
        // all lack one, which settles every larger k as well
        let mut closed = None;
        for k in 3..=opts.max_k {
            let members = enumerate_tk(k, DEFAULT_TK_CAP)?;
            let mut row = Vec::new();
            for (i, h) in members.iter().enumerate() {
                let name = describe_tree(h, &format!("T{k}:{i}"));
                row.push(check(game, h, name, opts, binary)?);
            }
            let all_clear = row.iter().all(|c| c.no_advantage == Some(true));
            for c in &row {
                if c.no_advantage == Some(false) {
                    advantage_on.push(c.graph.clone());
                }
            }
            tk.push(row);
            if all_clear {
                closed = Some(k);
                break;
            }
        }
        match closed {
            Some(k) => {
                notes.push(format!(
                    "no advantage on P3 and on all of T_{k}: none on T_j for j >= {k} nor on graphs outside every T_j"
                ));
                classification = format!("advantage-on: [{}]", advantage_on.join(", "));
            }
            None => {
                notes.push(format!("advantage persists up to T_{}; raise --max-k", opts.max_k.max(2)));
                classification = "inconclusive".to_string();
            }
        }
    }
    Ok(MonogamyReport {
        game: game.label().to_string(),
        classical_value: omega,
        p2,
        p3,
        p4,
        tk,
        hom_p3,
        hom_p4,
        classification,
        advantage_on,
        notes,
    })
}

/// Two simultaneous instances of a base game on `P3`, with the middle
/// player shared.
#[derive(Clone, Debug, Serialize)]
pub struct PolygamyReport {
    pub base: String,
    /// Values on the edges `(A, B)` and `(B, C)` of the composed game.
    pub edge_values: Vec<f64>,
    /// Instance one on `(A, B)` and instance two on `(B, C)`.
    pub instance_values: [f64; 2],
    #[serde(serialize_with = "rational::serialize")]
    pub base_classical: Rational,
    pub cited_classical: Option<String>,
    /// Set when the brute-force value disagrees with the cited one.
    pub classical_flagged: bool,
    pub or_bound: OrBoundCheck,
}

impl PolygamyReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serialises")
    }
}

/// `ω(G ∨ G) ≤ min(1, 3·ω(G))` on random games.
#[derive(Clone, Debug, Serialize)]
pub struct OrBoundCheck {
    pub seed: u64,
    pub games: usize,
    pub violations: Vec<OrBoundViolation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrBoundViolation {
    pub questions: usize,
    pub answers: usize,
    pub base: String,
    pub composed: String,
}

impl OrBoundCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sizes `|I|, |O| ≤ 3` except `3 × 3`, whose composition has `9^9`
/// strategies per player.
pub fn or_bound_check(seed: u64, games: usize) -> Result<OrBoundCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    for _ in 0..games {
        let (q, o) = loop {
            let pair = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            if pair != (3, 3) {
                break pair;
            }
        };
        let g = Game::random(&mut rng, q, o);
        let base = classical_value(&g)?;
        let composed = classical_value(&g.or_compose())?;
        let three = &base * Rational::from_integer(3.into());
        let one = Rational::from_integer(1.into());
        if composed > three.min(one) {
            violations.push(OrBoundViolation {
                questions: q,
                answers: o,
                base: rational::format_rational(&base),
                composed: rational::format_rational(&composed),
            });
        }
    }
    Ok(OrBoundCheck { seed, games, violations })
}

/// Value quoted for the symmetric magic square.
pub const CITED_MAGIC_SQUARE_VALUE: &str = "35/36";

pub fn polygamy_report(base: &Game, strategy: &QuantumStrategy, seed: u64, games: usize) -> Result<PolygamyReport> {
    let poly = build_polygamy_strategy(base, strategy)?;
    let edge_values = poly.edge_values(&polygamy_game(base))?;
    let first = poly.edge_value(&instance_game(base, 0)?, 0, 1)?;
    let second = poly.edge_value(&instance_game(base, 1)?, 1, 2)?;
    let base_classical = classical_value(base)?;
    let cited_classical = (base.to_json() == magic_square().with_label(base.label()).to_json())
        .then(|| CITED_MAGIC_SQUARE_VALUE.to_string());
    let classical_flagged = cited_classical
        .as_deref()
        .is_some_and(|c| rational::parse_rational(c).ok() != Some(base_classical.clone()));
    Ok(PolygamyReport {
        base: base.label().to_string(),
        edge_values,
        instance_values: [first, second],
        base_classical,
        cited_classical,
        classical_flagged,
        or_bound: or_bound_check(seed, games)?,
    })
}
