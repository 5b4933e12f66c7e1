//! Moment matrices indexed by canonical words in the parties' dichotomic
//! observables.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use super::sdp::{SdpProblem, SparseSym};
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::word::{Letter, Word};

/// Largest moment matrix the builder accepts.
pub const MAX_MATRIX_SIZE: usize = 600;

/// All words of length at most `depth`, optionally with the products of
/// two letters from adjacent parties (`edge_pairs`) or with the words of
/// length `depth + 1` whose parties induce a connected subgraph (`local`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Level {
    pub depth: usize,
    pub edge_pairs: bool,
    pub local: bool,
}

impl Level {
    pub const ONE: Level = Level {
        depth: 1,
        edge_pairs: false,
        local: false,
    };
    pub const ONE_EDGE_PAIRS: Level = Level {
        depth: 1,
        edge_pairs: true,
        local: false,
    };
    pub const TWO: Level = Level {
        depth: 2,
        edge_pairs: false,
        local: false,
    };
    pub const THREE: Level = Level {
        depth: 3,
        edge_pairs: false,
        local: false,
    };
    pub const TWO_LOCAL: Level = Level {
        depth: 2,
        edge_pairs: false,
        local: true,
    };

    /// The levels tried in order when searching for a certifying one.
    pub const LADDER: [Level; 4] = [Level::ONE, Level::ONE_EDGE_PAIRS, Level::TWO, Level::TWO_LOCAL];
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.depth)?;
        if self.edge_pairs {
            write!(f, "+edge-pairs")?;
        }
        if self.local {
            write!(f, "+local")?;
        }
        Ok(())
    }
}

impl FromStr for Level {
    type Err = Error;

    /// `"1"`, `"2"`, `"1+edge-pairs"`, `"2+local"`, ...
    fn from_str(s: &str) -> Result<Level> {
        let bad = || Error::Parse(format!("bad NPA level {s:?}; use e.g. 1, 1+edge-pairs, 2, 2+local, 3"));
        let mut parts = s.trim().split('+');
        let depth: usize = parts.next().unwrap_or("").parse().map_err(|_| bad())?;
        if depth == 0 {
            return Err(bad());
        }
        let mut level = Level {
            depth,
            edge_pairs: false,
            local: false,
        };
        for extra in parts {
            match extra {
                "edge-pairs" if !level.edge_pairs => level.edge_pairs = true,
                "local" if !level.local => level.local = true,
                _ => return Err(bad()),
            }
        }
        Ok(level)
    }
}

/// Index words for `parties` players with `settings` dichotomic
/// observables each.
pub fn monomials(parties: usize, settings: usize, graph: &Graph, level: Level) -> Vec<Word> {
    let letters: Vec<Letter> = (0..parties)
        .flat_map(|p| (0..settings).map(move |s| Letter::new(p, s)))
        .collect();
    let mut seen: std::collections::HashSet<Word> = [Word::identity()].into_iter().collect();
    let mut words = vec![Word::identity()];
    let mut layer = vec![Word::identity()];
    for len in 1..=level.depth {
        let mut next = Vec::new();
        for w in &layer {
            for &l in &letters {
                let v = w.mul(&Word::letter(l));
                if v.len() == len && seen.insert(v.clone()) {
                    next.push(v);
                }
            }
        }
        next.sort();
        words.extend(next.iter().cloned());
        layer = next;
    }
    if level.edge_pairs {
        let mut extra = Vec::new();
        for (u, v) in graph.edges() {
            for x in 0..settings {
                for y in 0..settings {
                    let w = Word::from_letters([Letter::new(u, x), Letter::new(v, y)]);
                    if seen.insert(w.clone()) {
                        extra.push(w);
                    }
                }
            }
        }
        extra.sort();
        words.extend(extra);
    }
    if level.local {
        let mut extra = Vec::new();
        for w in &layer {
            for &l in &letters {
                let v = w.mul(&Word::letter(l));
                if v.len() == level.depth + 1 && connected_support(graph, &v) && seen.insert(v.clone()) {
                    extra.push(v);
                }
            }
        }
        extra.sort();
        words.extend(extra);
    }
    words
}

fn connected_support(graph: &Graph, w: &Word) -> bool {
    let parties: Vec<usize> = w.parties().into_iter().map(usize::from).collect();
    parties.len() <= 1 || graph.induced(&parties).is_connected()
}

/// Moment matrix `Γ_ij = ⟨w_i* w_j⟩` with entries grouped into classes of
/// equal moments, and a linear objective over the classes.
#[derive(Clone, Debug)]
pub struct MomentProblem {
    pub parties: usize,
    pub settings: usize,
    pub level: Level,
    pub words: Vec<Word>,
    /// Non-identity classes, each named by a real key.
    pub classes: Vec<Word>,
    pub class_index: HashMap<Word, usize>,
    /// `entry_class[i·n + j]`; `None` for the identity.
    pub entry_class: Vec<Option<usize>>,
    pub objective: Vec<f64>,
    pub constant: f64,
}

impl MomentProblem {
    pub fn new(parties: usize, settings: usize, graph: &Graph, level: Level) -> Result<MomentProblem> {
        if parties == 0 || settings == 0 || settings > 255 || parties > 255 {
            return Err(invalid!("scenario needs 1..=255 parties and settings"));
        }
        MomentProblem::from_words(parties, settings, level, monomials(parties, settings, graph, level))
    }

    /// Builds the matrix for an explicit list of index words; `level` is
    /// kept as a label.
    pub fn from_words(parties: usize, settings: usize, level: Level, words: Vec<Word>) -> Result<MomentProblem> {
        let n = words.len();
        if n > MAX_MATRIX_SIZE {
            return Err(Error::Capacity(format!(
                "level {level} gives a {n}x{n} moment matrix, above the cap {MAX_MATRIX_SIZE}"
            )));
        }
        let adjoints: Vec<Word> = words.iter().map(Word::adjoint).collect();
        let mut classes = Vec::new();
        let mut class_index = HashMap::new();
        let mut entry_class = Vec::with_capacity(n * n);
        for a in &adjoints {
            for w in &words {
                let key = a.mul(w).real_key();
                if key.is_empty() {
                    entry_class.push(None);
                    continue;
                }
                let k = *class_index.entry(key.clone()).or_insert_with(|| {
                    classes.push(key);
                    classes.len() - 1
                });
                entry_class.push(Some(k));
            }
        }
        let m = classes.len();
        Ok(MomentProblem {
            parties,
            settings,
            level,
            words,
            classes,
            class_index,
            entry_class,
            objective: vec![0.0; m],
            constant: 0.0,
        })
    }

    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, w: &Word) -> Option<usize> {
        self.class_index.get(&w.real_key()).copied()
    }

    /// Sets the objective `constant + Σ coeff·⟨word⟩`; every word must occur
    /// as a moment.
    pub fn set_objective(&mut self, terms: &[(Word, f64)], constant: f64) -> Result<()> {
        let mut obj = vec![0.0; self.num_classes()];
        let mut c0 = constant;
        for (w, coeff) in terms {
            if w.is_empty() {
                c0 += coeff;
                continue;
            }
            let k = self
                .class_of(w)
                .ok_or_else(|| invalid!("moment {w} does not occur at level {}", self.level))?;
            obj[k] += coeff;
        }
        self.objective = obj;
        self.constant = c0;
        Ok(())
    }

    /// `Γ(y)` for class values `y`.
    pub fn matrix(&self, y: &[f64]) -> DMatrix<f64> {
        let n = self.size();
        DMatrix::from_fn(n, n, |i, j| match self.entry_class[i * n + j] {
            None => 1.0,
            Some(k) => y[k],
        })
    }

    /// Positions of every class in the matrix.
    pub fn class_entries(&self) -> Vec<Vec<(usize, usize)>> {
        let n = self.size();
        let mut out = vec![Vec::new(); self.num_classes()];
        for (idx, c) in self.entry_class.iter().enumerate() {
            if let Some(k) = c {
                out[*k].push((idx / n, idx % n));
            }
        }
        out
    }

    /// `max objective·y + constant` s.t. `Γ(y) ⪰ 0`, as the dual form of
    /// [`SdpProblem`]: `C` holds the identity entries and `A_k = −F_k`.
    pub fn to_sdp(&self) -> SdpProblem {
        let n = self.size();
        let c = DMatrix::from_fn(n, n, |i, j| if self.entry_class[i * n + j].is_none() { 1.0 } else { 0.0 });
        let a: Vec<SparseSym> = self
            .class_entries()
            .into_iter()
            .map(|es| es.into_iter().map(|(i, j)| (i, j, -1.0)).collect())
            .collect();
        SdpProblem {
            c,
            a,
            b: DVector::from_vec(self.objective.clone()),
        }
    }

    /// Upper bound on `objective·y + constant` over all `y` with
    /// `Γ(y) ⪰ 0`, valid for any symmetric `X`: moments of a PSD unit
    /// diagonal matrix are bounded by 1 and `Tr Γ = n`.
    pub fn certified_bound(&self, x: &DMatrix<f64>) -> f64 {
        let n = self.size();
        let mut base = 0.0;
        let mut along = vec![0.0; self.num_classes()];
        for i in 0..n {
            for j in 0..n {
                match self.entry_class[i * n + j] {
                    None => base += x[(i, j)],
                    Some(k) => along[k] += x[(i, j)],
                }
            }
        }
        // ⟨Γ(y), X⟩ = base + Σ y_k along_k, and objective_k − (−along_k)
        // is the equality residual
        let residual: f64 = self.objective.iter().zip(&along).map(|(b, a)| (b + a).abs()).sum();
        let lmin = super::sdp::min_eigenvalue(x);
        base + self.constant + residual + n as f64 * (-lmin).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_parsing() {
        assert_eq!("1".parse::<Level>().unwrap(), Level::ONE);
        assert_eq!("1+edge-pairs".parse::<Level>().unwrap(), Level::ONE_EDGE_PAIRS);
        assert_eq!("3".parse::<Level>().unwrap().to_string(), "3");
        assert!("0".parse::<Level>().is_err());
        assert!("2+x".parse::<Level>().is_err());
        assert_eq!("2+local".parse::<Level>().unwrap(), Level::TWO_LOCAL);
        assert_eq!(Level::TWO_LOCAL.to_string(), "2+local");
    }

    #[test]
    fn matrix_sizes() {
        let p2 = Graph::path(2);
        assert_eq!(MomentProblem::new(2, 2, &p2, Level::ONE).unwrap().size(), 5);
        let p3 = Graph::path(3);
        assert_eq!(MomentProblem::new(3, 2, &p3, Level::ONE_EDGE_PAIRS).unwrap().size(), 15);
        // 1 + 12 letters + 6·2 same-party pairs + 15·4 cross pairs
        let p6 = Graph::path(6);
        assert_eq!(MomentProblem::new(6, 2, &p6, Level::TWO).unwrap().size(), 85);
        // + 12 single-party, 5·8 two-party and 4·8 three-party words of length 3
        assert_eq!(MomentProblem::new(6, 2, &p6, Level::TWO_LOCAL).unwrap().size(), 169);
    }

    #[test]
    fn classes_identify_adjoints() {
        let p = MomentProblem::new(2, 2, &Graph::path(2), Level::TWO).unwrap();
        let a = p.class_of(&Word::parse("A0A1").unwrap()).unwrap();
        let b = p.class_of(&Word::parse("A1A0").unwrap()).unwrap();
        assert_eq!(a, b);
        let diag: Vec<_> = (0..p.size()).map(|i| p.entry_class[i * p.size() + i]).collect();
        assert!(diag.iter().all(Option::is_none));
    }

    #[test]
    fn oversized_levels_are_capped() {
        let g = Graph::path(12);
        assert!(matches!(MomentProblem::new(12, 2, &g, Level::THREE), Err(Error::Capacity(_))));
    }
}
