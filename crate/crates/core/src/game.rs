//! Symmetric two-player nonlocal games, their combinators and their
//! extension over graphs.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::rational::{format_rational, parse_rational, ratio, to_f64, Rational};

/// Default bound on `|I|^n · |O|^n` for [`Game::parallel_repeat`].
pub const DEFAULT_REPEAT_CAP: usize = 2000;

/// A finite symmetric game with a referee distribution over question pairs.
#[derive(Clone, PartialEq, Eq)]
pub struct Game {
    label: String,
    questions: usize,
    answers: usize,
    /// Indexed by `((x1·|I| + x2)·|O| + a1)·|O| + a2`.
    predicate: Vec<bool>,
    /// Indexed by `x1·|I| + x2`; sums to one.
    weights: Vec<Rational>,
}

impl fmt::Debug for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Game({:?}, |I|={}, |O|={})", self.label, self.questions, self.answers)
    }
}

impl Game {
    /// Builds a game from a winning rule and optional question weights
    /// (uniform when `None`). Rejects asymmetric rules and weights.
    pub fn new(
        label: impl Into<String>,
        questions: usize,
        answers: usize,
        wins: impl Fn(usize, usize, usize, usize) -> bool,
        weights: Option<Vec<Rational>>,
    ) -> Result<Game> {
        if questions == 0 || answers == 0 {
            return Err(invalid!("a game needs at least one question and one answer"));
        }
        let (q, o) = (questions, answers);
        let mut predicate = Vec::with_capacity(q * q * o * o);
        for x1 in 0..q {
            for x2 in 0..q {
                for a1 in 0..o {
                    for a2 in 0..o {
                        predicate.push(wins(x1, x2, a1, a2));
                    }
                }
            }
        }
        let weights = match weights {
            Some(w) => w,
            None => vec![ratio(1, (q * q) as i64); q * q],
        };
        Game::from_table(label.into(), q, o, predicate, weights)
    }

    fn from_table(
        label: String,
        questions: usize,
        answers: usize,
        predicate: Vec<bool>,
        weights: Vec<Rational>,
    ) -> Result<Game> {
        let (q, o) = (questions, answers);
        if predicate.len() != q * q * o * o || weights.len() != q * q {
            return Err(invalid!("table dimensions do not match |I| = {q}, |O| = {o}"));
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(invalid!("negative question weight"));
        }
        if !weights.iter().sum::<Rational>().is_one() {
            return Err(invalid!("question weights must sum to 1"));
        }
        let game = Game {
            label,
            questions,
            answers,
            predicate,
            weights,
        };
        game.check_symmetry()?;
        Ok(game)
    }

    fn check_symmetry(&self) -> Result<()> {
        let (q, o) = (self.questions, self.answers);
        for x1 in 0..q {
            for x2 in 0..q {
                if self.weight(x1, x2) != self.weight(x2, x1) {
                    return Err(invalid!("question weights not symmetric at ({x1},{x2})"));
                }
                for a1 in 0..o {
                    for a2 in 0..o {
                        if self.wins(x1, x2, a1, a2) != self.wins(x2, x1, a2, a1) {
                            return Err(invalid!(
                                "predicate not symmetric at ({x1},{x2},{a1},{a2})"
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Game {
        self.label = label.into();
        self
    }

    pub fn num_questions(&self) -> usize {
        self.questions
    }

    pub fn num_answers(&self) -> usize {
        self.answers
    }

    /// Unchecked predicate lookup.
    #[inline]
    pub fn wins(&self, x1: usize, x2: usize, a1: usize, a2: usize) -> bool {
        let (q, o) = (self.questions, self.answers);
        self.predicate[((x1 * q + x2) * o + a1) * o + a2]
    }

    pub fn eval_predicate(&self, x1: usize, x2: usize, a1: usize, a2: usize) -> Result<bool> {
        let (q, o) = (self.questions, self.answers);
        if x1 >= q || x2 >= q || a1 >= o || a2 >= o {
            return Err(Error::Range(format!(
                "({x1},{x2},{a1},{a2}) with |I| = {q}, |O| = {o}"
            )));
        }
        Ok(self.wins(x1, x2, a1, a2))
    }

    pub fn weight(&self, x1: usize, x2: usize) -> &Rational {
        &self.weights[x1 * self.questions + x2]
    }

    pub fn weight_f64(&self, x1: usize, x2: usize) -> f64 {
        to_f64(self.weight(x1, x2))
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    /// Question weights as integers over a common denominator.
    pub fn integer_weights(&self) -> (Vec<u64>, u64) {
        let den = self
            .weights
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let nums = self
            .weights
            .iter()
            .map(|w| (w.numer() * (&den / w.denom())).to_u64().expect("weight numerator fits u64"))
            .collect();
        (nums, den.to_u64().expect("weight denominator fits u64"))
    }

    /// Probability of winning with deterministic answer tables
    /// `f[x]`, `g[x]` for the two players.
    pub fn pair_value(&self, f: &[usize], g: &[usize]) -> Rational {
        let mut total = Rational::zero();
        for x1 in 0..self.questions {
            for x2 in 0..self.questions {
                if self.wins(x1, x2, f[x1], g[x2]) {
                    total += self.weight(x1, x2);
                }
            }
        }
        total
    }

    /// Two simultaneous instances, won when at least one is won. Question
    /// `(x, x')` is index `x·|I| + x'`, answers likewise.
    pub fn or_compose(&self) -> Game {
        self.product(2, false)
    }

    /// `n` simultaneous instances, all of which must be won.
    pub fn parallel_repeat(&self, n: usize, cap: usize) -> Result<Game> {
        if n == 0 {
            return Err(invalid!("parallel repetition needs n >= 1"));
        }
        let size = (self.questions as u128 * self.answers as u128)
            .checked_pow(n as u32)
            .unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::Capacity(format!(
                "(|I|·|O|)^{n} = {size} exceeds the repetition cap {cap}"
            )));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        Ok(self.product(n, true))
    }

    fn product(&self, n: usize, all: bool) -> Game {
        let (q, o) = (self.questions, self.answers);
        let qn = q.pow(n as u32);
        let on = o.pow(n as u32);
        let digits = |mut v: usize, base: usize| -> Vec<usize> {
            let mut d = vec![0; n];
            for slot in d.iter_mut().rev() {
                *slot = v % base;
                v /= base;
            }
            d
        };
        let qd: Vec<Vec<usize>> = (0..qn).map(|v| digits(v, q)).collect();
        let od: Vec<Vec<usize>> = (0..on).map(|v| digits(v, o)).collect();
        let mut predicate = Vec::with_capacity(qn * qn * on * on);
        let mut weights = Vec::with_capacity(qn * qn);
        for x1 in &qd {
            for x2 in &qd {
                weights.push((0..n).map(|i| self.weight(x1[i], x2[i]).clone()).product());
                for a1 in &od {
                    for a2 in &od {
                        let mut won = (0..n).map(|i| self.wins(x1[i], x2[i], a1[i], a2[i]));
                        predicate.push(if all { won.all(|w| w) } else { won.any(|w| w) });
                    }
                }
            }
        }
        let label = if all {
            format!("{}^{n}", self.label)
        } else {
            format!("{}-or", self.label)
        };
        Game {
            label,
            questions: qn,
            answers: on,
            predicate,
            weights,
        }
    }

    /// `{"label", "questions", "answers", "winning": [[x1,x2,a1,a2],...],
    /// "question_weights": [[x1,x2,"p/q"],...]}`; weights are omitted when
    /// uniform.
    pub fn to_json(&self) -> Value {
        let (q, o) = (self.questions, self.answers);
        let mut winning = Vec::new();
        for x1 in 0..q {
            for x2 in 0..q {
                for a1 in 0..o {
                    for a2 in 0..o {
                        if self.wins(x1, x2, a1, a2) {
                            winning.push(json!([x1, x2, a1, a2]));
                        }
                    }
                }
            }
        }
        let mut out = json!({
            "label": self.label,
            "questions": q,
            "answers": o,
            "winning": winning,
        });
        if !self.is_uniform() {
            let weights: Vec<Value> = (0..q)
                .flat_map(|x1| (0..q).map(move |x2| (x1, x2)))
                .filter(|&(x1, x2)| !self.weight(x1, x2).is_zero())
                .map(|(x1, x2)| json!([x1, x2, format_rational(self.weight(x1, x2))]))
                .collect();
            out["question_weights"] = Value::Array(weights);
        }
        out
    }

    pub fn from_json(value: &Value) -> Result<Game> {
        let bad = |what: &str| Error::Parse(format!("game JSON: {what}"));
        let label = value.get("label").and_then(Value::as_str).unwrap_or("game").to_string();
        let q = value.get("questions").and_then(Value::as_u64).ok_or_else(|| bad("questions"))? as usize;
        let o = value.get("answers").and_then(Value::as_u64).ok_or_else(|| bad("answers"))? as usize;
        if q == 0 || o == 0 {
            return Err(invalid!("a game needs at least one question and one answer"));
        }
        let index = |v: &Value, bound: usize| -> Result<usize> {
            let i = v.as_u64().ok_or_else(|| bad("index is not an integer"))? as usize;
            if i >= bound {
                return Err(Error::Range(format!("index {i} with bound {bound}")));
            }
            Ok(i)
        };
        let mut predicate = vec![false; q * q * o * o];
        let winning = value.get("winning").and_then(Value::as_array).ok_or_else(|| bad("winning"))?;
        for entry in winning {
            let t = entry.as_array().filter(|t| t.len() == 4).ok_or_else(|| bad("winning entry"))?;
            let (x1, x2) = (index(&t[0], q)?, index(&t[1], q)?);
            let (a1, a2) = (index(&t[2], o)?, index(&t[3], o)?);
            predicate[((x1 * q + x2) * o + a1) * o + a2] = true;
        }
        let weights = match value.get("question_weights") {
            None | Some(Value::Null) => vec![ratio(1, (q * q) as i64); q * q],
            Some(w) => {
                let mut weights = vec![Rational::zero(); q * q];
                for entry in w.as_array().ok_or_else(|| bad("question_weights"))? {
                    let t = entry.as_array().filter(|t| t.len() == 3).ok_or_else(|| bad("weight entry"))?;
                    let (x1, x2) = (index(&t[0], q)?, index(&t[1], q)?);
                    let w = match &t[2] {
                        Value::String(s) => parse_rational(s)?,
                        Value::Number(n) if n.is_u64() => Rational::from_integer(n.as_u64().unwrap().into()),
                        _ => return Err(bad("weight must be a \"p/q\" string")),
                    };
                    weights[x1 * q + x2] = w;
                }
                weights
            }
        };
        Game::from_table(label, q, o, predicate, weights)
    }

    /// A named game or a path to a game JSON file.
    pub fn load(spec: &str) -> Result<Game> {
        if let Ok(game) = named_game(spec) {
            return Ok(game);
        }
        let path = spec.strip_prefix("file:").unwrap_or(spec);
        if Path::new(path).exists() {
            let text = std::fs::read_to_string(path)?;
            return Game::from_json(&serde_json::from_str(&text)?);
        }
        Err(Error::Parse(format!("unknown game {spec:?}")))
    }

    /// Random symmetric predicate with uniform questions.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, questions: usize, answers: usize) -> Game {
        let (q, o) = (questions, answers);
        let mut table = vec![false; q * q * o * o];
        let idx = |x1: usize, x2: usize, a1: usize, a2: usize| ((x1 * q + x2) * o + a1) * o + a2;
        for x1 in 0..q {
            for x2 in 0..q {
                for a1 in 0..o {
                    for a2 in 0..o {
                        let (i, j) = (idx(x1, x2, a1, a2), idx(x2, x1, a2, a1));
                        if i <= j {
                            let bit = rng.gen::<bool>();
                            table[i] = bit;
                            table[j] = bit;
                        }
                    }
                }
            }
        }
        Game::new("random", q, o, |x1, x2, a1, a2| table[idx(x1, x2, a1, a2)], None)
            .expect("random table is symmetric")
    }
}

pub fn chsh() -> Game {
    Game::new("chsh", 2, 2, |x1, x2, a1, a2| (a1 ^ a2) == (x1 & x2), None).unwrap()
}

/// Odd cycle game on `C_n`: the referee asks equal vertices with total
/// weight 1/2 (answers must agree) and adjacent vertices with total weight
/// 1/2 (answers must differ). Other pairs are never asked.
pub fn odd_cycle(n: usize) -> Result<Game> {
    if n < 3 || n % 2 == 0 {
        return Err(invalid!("odd cycle game needs an odd n >= 3, got {n}"));
    }
    let adjacent = |x: usize, y: usize| (x + 1) % n == y || (y + 1) % n == x;
    let mut weights = vec![Rational::zero(); n * n];
    for x in 0..n {
        weights[x * n + x] = ratio(1, 2 * n as i64);
        weights[x * n + (x + 1) % n] = ratio(1, 4 * n as i64);
        weights[((x + 1) % n) * n + x] = ratio(1, 4 * n as i64);
    }
    Game::new(
        format!("oc{n}"),
        n,
        2,
        |x1, x2, a1, a2| {
            if x1 == x2 {
                a1 == a2
            } else if adjacent(x1, x2) {
                a1 != a2
            } else {
                true
            }
        },
        Some(weights),
    )
}

/// Cells `(row, col)` of magic-square line `x`: rows `0..3`, columns `3..6`.
pub fn magic_square_cells(x: usize) -> [(usize, usize); 3] {
    if x < 3 {
        [(x, 0), (x, 1), (x, 2)]
    } else {
        [(0, x - 3), (1, x - 3), (2, x - 3)]
    }
}

/// Whether the 3-bit answer `a` (bit `k` fills the `k`-th cell) has the
/// parity required of line `x`: even for rows, odd for columns.
pub fn magic_square_parity_ok(x: usize, a: usize) -> bool {
    let odd = a.count_ones() % 2 == 1;
    odd == (x >= 3)
}

/// Symmetric magic-square game over the six lines of a 3×3 grid.
pub fn magic_square() -> Game {
    Game::new(
        "magic-square",
        6,
        8,
        |x1, x2, a1, a2| {
            if !magic_square_parity_ok(x1, a1) || !magic_square_parity_ok(x2, a2) {
                return false;
            }
            let (c1, c2) = (magic_square_cells(x1), magic_square_cells(x2));
            for (i, cell) in c1.iter().enumerate() {
                if let Some(j) = c2.iter().position(|c| c == cell) {
                    if (a1 >> i & 1) != (a2 >> j & 1) {
                        return false;
                    }
                }
            }
            true
        },
        None,
    )
    .unwrap()
}

/// One question, one bit; won iff the bits differ.
pub fn anti_correlation() -> Game {
    Game::new("anti", 1, 2, |_, _, a1, a2| a1 != a2, None).unwrap()
}

pub fn always_win(questions: usize, answers: usize) -> Game {
    Game::new("always-win", questions, answers, |_, _, _, _| true, None).unwrap()
}

pub fn always_lose(questions: usize, answers: usize) -> Game {
    Game::new("always-lose", questions, answers, |_, _, _, _| false, None).unwrap()
}

/// `chsh`, `oc<n>`, `ms` / `magic-square`, `anti`, `always-win`,
/// `always-lose`, optionally suffixed with `-or` or `^<n>`.
pub fn named_game(name: &str) -> Result<Game> {
    if let Some(base) = name.strip_suffix("-or") {
        return Ok(named_game(base)?.or_compose());
    }
    if let Some((base, n)) = name.rsplit_once('^') {
        let n: usize = n.parse().map_err(|_| Error::Parse(format!("bad repetition in {name:?}")))?;
        return named_game(base)?.parallel_repeat(n, DEFAULT_REPEAT_CAP);
    }
    match name {
        "chsh" => Ok(chsh()),
        "ms" | "magic-square" => Ok(magic_square()),
        "anti" | "anti-correlation" => Ok(anti_correlation()),
        "always-win" => Ok(always_win(2, 2)),
        "always-lose" => Ok(always_lose(2, 2)),
        _ => match name.strip_prefix("oc").map(str::parse::<usize>) {
            Some(Ok(n)) => odd_cycle(n),
            _ => Err(Error::Parse(format!("unknown game {name:?}"))),
        },
    }
}

/// The game `G^H`: players on the vertices of `H` play `G` on a uniformly
/// random edge.
#[derive(Clone, Debug)]
pub struct GraphGame {
    pub base: Game,
    pub graph: Graph,
}

impl GraphGame {
    pub fn num_players(&self) -> usize {
        self.graph.num_vertices()
    }

    /// Edges `(u, v)` with `u < v`; `u` plays as the first player.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.graph.edges()
    }

    /// Exact value of a deterministic assignment `tables[v][x]`.
    pub fn assignment_value(&self, tables: &[Vec<usize>]) -> Result<Rational> {
        if tables.len() != self.num_players() {
            return Err(invalid!("{} tables for {} players", tables.len(), self.num_players()));
        }
        let (q, o) = (self.base.num_questions(), self.base.num_answers());
        if tables.iter().any(|t| t.len() != q || t.iter().any(|&a| a >= o)) {
            return Err(invalid!("answer tables must have length {q} with entries below {o}"));
        }
        let edges = self.edges();
        let total: Rational = edges
            .iter()
            .map(|&(u, v)| self.base.pair_value(&tables[u], &tables[v]))
            .sum();
        Ok(total / Rational::from_integer(BigInt::from(edges.len())))
    }
}

pub fn extend_over_graph(game: &Game, graph: &Graph) -> Result<GraphGame> {
    if !graph.is_simple() {
        return Err(invalid!("graph games need a loop-free graph"));
    }
    if graph.num_vertices() < 2 || !graph.is_connected() {
        return Err(invalid!("graph games need a connected graph on at least 2 vertices"));
    }
    Ok(GraphGame {
        base: game.clone(),
        graph: graph.clone(),
    })
}
