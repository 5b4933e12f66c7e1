//! Exact verification of noncommutative sum-of-squares identities
//! `constant − μ·Σ_e B_e = Σ_i w_i s_i²` certifying Bell monogamy relations.

mod poly;
mod scalar;

pub use poly::NcPolynomial;
pub use scalar::ExtScalar;

use std::path::Path;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::graph::{named_graph, Graph};
use crate::word::Word;

/// CHSH Bell operator `X0Y0 + X0Y1 + X1Y0 − X1Y1` for parties `x`, `y`.
pub fn chsh_operator(x: usize, y: usize) -> NcPolynomial {
    let l = NcPolynomial::letter;
    let one = ExtScalar::int(1);
    let mut out = NcPolynomial::zero();
    for (s, t, sign) in [(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, -1)] {
        let term = &l(x, s) * &l(y, t);
        out = &out + &term.scale(&(if sign > 0 { one.clone() } else { -&one }));
    }
    out
}

/// Sum of CHSH operators over the edges of `h` (lower endpoint first),
/// parties named `A, B, C, ...` by vertex index.
pub fn bell_chain(h: &Graph) -> Result<NcPolynomial> {
    if !h.is_simple() {
        return Err(invalid!("Bell chains need a loop-free graph"));
    }
    Ok(h.edges()
        .into_iter()
        .fold(NcPolynomial::zero(), |acc, (u, v)| &acc + &chsh_operator(u, v)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SosReport {
    /// `target == Σ sᵢ²` with unit weights.
    pub exact_match: bool,
    /// `target − Σ sᵢ²`.
    pub residual: NcPolynomial,
    /// `λ` with `target == λ·Σ sᵢ²`, when the identity is off by one global
    /// factor.
    pub scale: Option<ExtScalar>,
    /// Positive `wᵢ` with `target == Σ wᵢ sᵢ²`, when unit weights and a
    /// global scale both fail.
    pub weights: Option<Vec<ExtScalar>>,
    pub notes: Vec<String>,
}

impl SosReport {
    pub fn verdict(&self) -> String {
        if self.exact_match {
            "exact".into()
        } else if let Some(s) = &self.scale {
            format!("exact up to the global scale {s}")
        } else if let Some(w) = &self.weights {
            let w: Vec<String> = w.iter().map(ToString::to_string).collect();
            format!("not exact, no global scale; exact with per-square weights [{}]", w.join(", "))
        } else {
            "not an identity under any positive weighting".into()
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "exact_match": self.exact_match,
            "residual": self.residual.to_string(),
            "residual_terms": self.residual.num_terms(),
            "scale": self.scale.as_ref().map(ToString::to_string),
            "weights": self.weights.as_ref().map(|w| w.iter().map(ToString::to_string).collect::<Vec<_>>()),
            "verdict": self.verdict(),
            "notes": self.notes,
        })
    }
}

/// `s*·s`, which is `s²` for Hermitian `s`.
fn gram_term(s: &NcPolynomial) -> NcPolynomial {
    &s.adjoint() * s
}

pub fn verify_sos(target: &NcPolynomial, squares: &[NcPolynomial]) -> SosReport {
    let mut notes = Vec::new();
    let terms: Vec<NcPolynomial> = squares
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if !s.is_hermitian() {
                notes.push(format!("square {} is not Hermitian; used s*·s", i + 1));
            }
            gram_term(s)
        })
        .collect();
    let sum = terms.iter().fold(NcPolynomial::zero(), |acc, t| &acc + t);
    let residual = target - &sum;
    let exact_match = residual.is_zero();
    let mut scale = None;
    let mut weights = None;
    if !exact_match {
        scale = global_scale(target, &sum);
        if scale.is_none() {
            weights = solve_weights(target, &terms).filter(|w| w.iter().all(ExtScalar::is_positive));
        }
    }
    SosReport {
        exact_match,
        residual,
        scale,
        weights,
        notes,
    }
}

fn global_scale(target: &NcPolynomial, sum: &NcPolynomial) -> Option<ExtScalar> {
    let (w, c) = sum.terms().next()?;
    let lambda = &target.coefficient(w) / c;
    (!lambda.is_zero() && sum.scale(&lambda) == *target).then_some(lambda)
}

/// Exact solution of `target = Σ wᵢ tᵢ` by Gaussian elimination over
/// `Q(√2, √5)`; free unknowns are set to zero.
fn solve_weights(target: &NcPolynomial, terms: &[NcPolynomial]) -> Option<Vec<ExtScalar>> {
    let mut words: Vec<Word> = target.terms().map(|(w, _)| w.clone()).collect();
    for t in terms {
        words.extend(t.terms().map(|(w, _)| w.clone()));
    }
    words.sort();
    words.dedup();
    let k = terms.len();
    let mut rows: Vec<Vec<ExtScalar>> = words
        .iter()
        .map(|w| {
            let mut row: Vec<ExtScalar> = terms.iter().map(|t| t.coefficient(w)).collect();
            row.push(target.coefficient(w));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..k {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inverse().unwrap();
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..=k {
                    let delta = &f * &rows[r][j];
                    rows[i][j] -= &delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut w = vec![ExtScalar::zero(); k];
    for (i, &col) in pivots.iter().enumerate() {
        w[col] = rows[i][k].clone();
    }
    Some(w)
}

/// Checks `target == Σ wᵢ sᵢ*sᵢ` with every `wᵢ >= 0`.
pub fn verify_weighted(target: &NcPolynomial, squares: &[NcPolynomial], weights: &[ExtScalar]) -> bool {
    squares.len() == weights.len()
        && weights.iter().all(|w| !w.is_negative())
        && squares
            .iter()
            .zip(weights)
            .fold(target.clone(), |acc, (s, w)| &acc - &gram_term(s).scale(w))
            .is_zero()
}

/// From a verified identity `constant − μ·Σ_e B_e = Σ wᵢ sᵢ²` over a graph
/// with `edges` edges: `⟨Σ_e B_e⟩ <= constant/μ`, hence a winning
/// probability of at most `1/2 + constant / (8·μ·edges)`.
pub fn certified_bound_from_sos(
    squares: &[NcPolynomial],
    weights: Option<&[ExtScalar]>,
    bell: &NcPolynomial,
    multiplier: &ExtScalar,
    constant: &ExtScalar,
    edges: usize,
) -> Result<ExtScalar> {
    let unit;
    let weights = match weights {
        Some(w) => w,
        None => {
            unit = vec![ExtScalar::int(1); squares.len()];
            &unit
        }
    };
    if !multiplier.is_positive() || edges == 0 {
        return Err(invalid!("certified bounds need a positive multiplier and at least one edge"));
    }
    let target = &NcPolynomial::constant(constant.clone()) - &bell.scale(multiplier);
    if !verify_weighted(&target, squares, weights) {
        return Err(invalid!("the SOS identity does not verify"));
    }
    let bias = constant / multiplier;
    Ok(&ExtScalar::frac(1, 2) + &(&bias / &ExtScalar::int(8 * edges as i64)))
}

/// A named identity `constant − μ·Σ_e B_e = Σ wᵢ sᵢ²`, or a bare
/// `target = Σ sᵢ²` when no graph is attached.
#[derive(Clone, Debug)]
pub struct SosIdentity {
    pub label: String,
    pub target: NcPolynomial,
    pub squares: Vec<NcPolynomial>,
    pub weights: Option<Vec<ExtScalar>>,
    pub bell: Option<BellForm>,
}

#[derive(Clone, Debug)]
pub struct BellForm {
    pub graph: Graph,
    pub constant: ExtScalar,
    pub multiplier: ExtScalar,
}

impl SosIdentity {
    fn with_bell(label: &str, graph: Graph, constant: ExtScalar, multiplier: ExtScalar, squares: Vec<NcPolynomial>) -> SosIdentity {
        let chain = bell_chain(&graph).expect("named graphs are simple");
        let target = &NcPolynomial::constant(constant.clone()) - &chain.scale(&multiplier);
        SosIdentity {
            label: label.into(),
            target,
            squares,
            weights: None,
            bell: Some(BellForm {
                graph,
                constant,
                multiplier,
            }),
        }
    }

    pub fn verify(&self) -> SosReport {
        let mut report = verify_sos(&self.target, &self.squares);
        if let Some(w) = &self.weights {
            let ok = verify_weighted(&self.target, &self.squares, w);
            report.notes.push(format!("declared weights {}", if ok { "verify" } else { "fail" }));
        }
        report
    }

    /// Certified winning-probability bound, using the declared weights, or
    /// else whatever weighting [`verify_sos`] finds.
    pub fn certified_bound(&self) -> Result<ExtScalar> {
        let bell = self
            .bell
            .as_ref()
            .ok_or_else(|| invalid!("identity {:?} has no Bell form", self.label))?;
        let weights = match &self.weights {
            Some(w) => Some(w.clone()),
            None => {
                let r = verify_sos(&self.target, &self.squares);
                if r.exact_match {
                    None
                } else if let Some(s) = r.scale {
                    Some(vec![s; self.squares.len()])
                } else {
                    Some(r.weights.ok_or_else(|| invalid!("identity {:?} does not verify", self.label))?)
                }
            }
        };
        certified_bound_from_sos(
            &self.squares,
            weights.as_deref(),
            &bell_chain(&bell.graph)?,
            &bell.multiplier,
            &bell.constant,
            bell.graph.num_edges(),
        )
    }

    /// `{"label", "target" | ("chain", "constant", "multiplier"),
    /// "squares": [expr], "weights": [expr]}`.
    pub fn from_json(value: &Value) -> Result<SosIdentity> {
        let text = |key: &str| value.get(key).and_then(Value::as_str);
        let parse_scalar = |s: &str| -> Result<ExtScalar> {
            NcPolynomial::parse(s)?
                .as_constant()
                .ok_or_else(|| Error::Parse(format!("{s:?} is not a scalar")))
        };
        let label = text("label").unwrap_or("file").to_string();
        let squares = match value.get("squares") {
            None => Vec::new(),
            Some(v) => v
                .as_array()
                .ok_or_else(|| Error::Parse("squares must be a list of expressions".into()))?
                .iter()
                .map(|s| {
                    s.as_str()
                        .ok_or_else(|| Error::Parse("square must be a string".into()))
                        .and_then(NcPolynomial::parse)
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let weights = match value.get("weights") {
            None | Some(Value::Null) => None,
            Some(v) => Some(
                v.as_array()
                    .ok_or_else(|| Error::Parse("weights must be a list".into()))?
                    .iter()
                    .map(|s| {
                        s.as_str()
                            .ok_or_else(|| Error::Parse("weight must be a string".into()))
                            .and_then(parse_scalar)
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let mut identity = if let Some(chain) = text("chain") {
            let constant = parse_scalar(text("constant").unwrap_or("0"))?;
            let multiplier = parse_scalar(text("multiplier").unwrap_or("1"))?;
            SosIdentity::with_bell(&label, named_graph(chain)?, constant, multiplier, squares)
        } else {
            SosIdentity {
                label,
                target: NcPolynomial::parse(text("target").unwrap_or("0"))?,
                squares,
                weights: None,
                bell: None,
            }
        };
        identity.weights = weights;
        Ok(identity)
    }

    /// `p3`, `p4`, `p4-weighted`, `p4-main`, or `file:<path>` / a path.
    pub fn load(spec: &str) -> Result<SosIdentity> {
        match spec {
            "p3" => return Ok(p3_identity()),
            "p4" => return Ok(p4_identity()),
            "p4-weighted" => return Ok(p4_weighted_identity()),
            "p4-main" => return Ok(p4_main_text_identity()),
            _ => {}
        }
        let path = spec.strip_prefix("file:").unwrap_or(spec);
        if !Path::new(path).exists() {
            return Err(Error::Parse(format!("unknown identity {spec:?}")));
        }
        let text = std::fs::read_to_string(path)?;
        SosIdentity::from_json(&serde_json::from_str(&text)?)
    }
}

fn parse_all(exprs: &[&str]) -> Vec<NcPolynomial> {
    exprs
        .iter()
        .map(|e| NcPolynomial::parse(e).expect("built-in expression parses"))
        .collect()
}

/// `2 − (B_AB + B_BC)/2 = Q1² + Q2²`, certifying `ω*(CHSH^{P3}) = 3/4`.
pub fn p3_identity() -> SosIdentity {
    let squares = parse_all(&[
        "(A0 (B0 - B1) + C1 (B0 + B1) - 2 A0 C1) / (2 sqrt2)",
        "(A1 (B0 + B1) + C0 (B0 - B1) - 2 A1 C0) / (2 sqrt2)",
    ]);
    SosIdentity::with_bell("p3", Graph::path(3), ExtScalar::int(2), ExtScalar::frac(1, 2), squares)
}

fn r_polynomials() -> Vec<NcPolynomial> {
    parse_all(&[
        "C0 (B0 - B1) + C1 (B0 + B1) - 2 D0 (C0 + C1) + 2 D1 (C0 - C1)",
        "1 - (B0 (A0 + A1) + B1 (A0 - A1) + C0 (B0 + B1) + C1 (B0 - B1) + D0 (C0 + C1) + D1 (C0 - C1)) / (2 sqrt10)",
        "(B0 (3 A0 - A1) + B1 (3 A0 + A1) - C0 (B0 + B1) + C1 (B0 - B1) - D0 (C0 + C1) - D1 (C0 - C1)) / 3",
        "(4 A1 (B0 - B1) + C0 (B0 + B1) - C1 (B0 - B1) - 2 D0 (C0 + C1) - 2 D1 (C0 - C1)) / 4",
    ])
}

/// `2√10 − (B_AB + B_BC + B_CD) = R1² + R2² + R3² + R4²` with unit weights,
/// as printed; [`verify_sos`] decides whether it holds.
pub fn p4_identity() -> SosIdentity {
    SosIdentity::with_bell("p4", Graph::path(4), &ExtScalar::int(2) * &ExtScalar::sqrt10(), ExtScalar::int(1), r_polynomials())
}

/// The same squares with the weights `√10·(1/80, 1, 3/40, 1/15)` that make
/// the identity exact.
pub fn p4_weighted_identity() -> SosIdentity {
    let mut id = p4_identity();
    id.label = "p4-weighted".into();
    let s10 = ExtScalar::sqrt10();
    id.weights = Some(
        [(1, 80), (1, 1), (3, 40), (1, 15)]
            .iter()
            .map(|&(p, q)| &s10 * &ExtScalar::frac(p, q))
            .collect(),
    );
    id
}

/// The `1/3`-normalised form `2√10/3 − (B_AB + B_BC + B_CD)/3`, with the
/// weights divided by three.
pub fn p4_main_text_identity() -> SosIdentity {
    let third = ExtScalar::frac(1, 3);
    let mut id = SosIdentity::with_bell(
        "p4-main",
        Graph::path(4),
        &(&ExtScalar::int(2) * &ExtScalar::sqrt10()) * &third,
        third.clone(),
        r_polynomials(),
    );
    id.weights = p4_weighted_identity()
        .weights
        .map(|w| w.iter().map(|x| x * &third).collect());
    id
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_sizes() {
        assert_eq!(bell_chain(&Graph::path(3)).unwrap().num_terms(), 8);
        assert_eq!(bell_chain(&Graph::path(4)).unwrap().num_terms(), 12);
        assert_eq!(bell_chain(&Graph::path(6)).unwrap().num_terms(), 20);
    }

    #[test]
    fn p3_is_exact() {
        let id = p3_identity();
        let r = id.verify();
        assert!(r.exact_match, "residual {}", r.residual);
        assert_eq!(id.certified_bound().unwrap(), ExtScalar::frac(3, 4));
    }

    #[test]
    fn p4_needs_per_square_weights() {
        let r = p4_identity().verify();
        assert!(!r.exact_match);
        assert!(r.scale.is_none());
        let expected = p4_weighted_identity().weights.unwrap();
        assert_eq!(r.weights.as_ref(), Some(&expected));
        let bound = &ExtScalar::frac(1, 2) + &(&ExtScalar::sqrt10() / &ExtScalar::int(12));
        assert_eq!(p4_identity().certified_bound().unwrap(), bound);
        assert_eq!(p4_weighted_identity().certified_bound().unwrap(), bound);
        assert_eq!(p4_main_text_identity().certified_bound().unwrap(), bound);
    }

    #[test]
    fn empty_identity() {
        let r = verify_sos(&NcPolynomial::zero(), &[]);
        assert!(r.exact_match);
        let id = SosIdentity::from_json(&json!({"squares": []})).unwrap();
        assert!(id.verify().exact_match);
    }

    #[test]
    fn scaled_squares_double_the_constant() {
        let id = p3_identity();
        let s2 = ExtScalar::sqrt2();
        let scaled: Vec<NcPolynomial> = id.squares.iter().map(|s| s.scale(&s2)).collect();
        let bell = bell_chain(&Graph::path(3)).unwrap();
        // 4 − (B_AB + B_BC) = 2 (Q1² + Q2²).
        let b = certified_bound_from_sos(&scaled, None, &bell, &ExtScalar::int(1), &ExtScalar::int(4), 2).unwrap();
        assert_eq!(b, ExtScalar::frac(3, 4));
        assert!(certified_bound_from_sos(&scaled, None, &bell, &ExtScalar::int(1), &ExtScalar::int(2), 2).is_err());
    }

    #[test]
    fn global_scale_is_detected() {
        let s = NcPolynomial::parse("A0 + B0").unwrap();
        let target = (&s * &s).scale(&ExtScalar::int(3));
        let r = verify_sos(&target, &[s]);
        assert_eq!(r.scale, Some(ExtScalar::int(3)));
    }

    #[test]
    fn non_hermitian_squares_are_noted() {
        let s = NcPolynomial::parse("A0 A1").unwrap();
        let r = verify_sos(&NcPolynomial::constant(ExtScalar::int(1)), &[s]);
        assert!(r.exact_match);
        assert_eq!(r.notes.len(), 1);
    }
}
