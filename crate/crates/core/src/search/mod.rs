//! Searches over the discrete angle space of an ansatz.
//!
//! * [`exhaustive`] enumerates every assignment (the ground truth at small
//!   sizes).
//! * [`random_search`] evaluates distinct uniform-random assignments.
//! * [`bo_search`] runs a random warmup, then repeatedly fits a
//!   [`SurrogateForest`] to every evaluation so far and evaluates the pool
//!   candidate with the lowest predicted objective.
//!
//! All three minimize [`EnergyRecord::total`]. In a single thread every
//! search is bit-reproducible from its seed.

pub mod forest;
pub mod space;

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ansatz::{AnsatzTemplate, ParameterAssignment};
use crate::objective::{evaluate, EnergyRecord};
use crate::pauli::Hamiltonian;
use crate::{Error, Result};

pub use forest::SurrogateForest;
pub use space::{Domain, EighthTurns, QuarterTurns, SlotSelection};

/// Default enumeration cap for [`exhaustive`]: `2^24` assignments.
pub const DEFAULT_EXHAUSTIVE_CAP: u128 = 1 << 24;
/// Parents used for single-slot mutations in the candidate pool.
const POOL_PARENTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub warmup: usize,
    pub budget: usize,
    pub pool_size: usize,
    pub trees: usize,
    pub seed: u64,
    /// Stop when the best total has not improved by more than `tol` within
    /// the last `window` evaluations of the guided phase.
    pub stagnation: Option<(usize, f64)>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            warmup: 1000,
            budget: 2000,
            pool_size: 500,
            trees: 20,
            seed: 0,
            stagnation: None,
        }
    }
}

impl SearchConfig {
    /// Warmup default for a space of `size` points: `min(1000, size / 4)`,
    /// at least one.
    pub fn default_warmup(size: Option<u128>) -> usize {
        match size {
            Some(s) => (s / 4).clamp(1, 1000) as usize,
            None => 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.budget == 0 {
            return bad("budget must be at least 1");
        }
        if self.warmup > self.budget {
            return bad("warmup must not exceed budget");
        }
        if self.pool_size == 0 {
            return bad("pool_size must be at least 1");
        }
        if self.trees == 0 {
            return bad("trees must be at least 1");
        }
        if let Some((window, tol)) = self.stagnation {
            if window == 0 || !(tol >= 0.0) {
                return bad("stagnation needs window >= 1 and tol >= 0");
            }
        }
        Ok(())
    }
}

/// Angle alphabet of a trace's assignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alphabet {
    /// Indices in `0..4`, angle `index · π/2`.
    QuarterTurn,
    /// Indices in `0..8`, angle `index · π/4`, at most `k` odd.
    EighthTurn { k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// 1-based evaluation count.
    pub iteration: usize,
    /// Full-template indices in the trace's alphabet.
    pub assignment: Vec<u8>,
    pub record: EnergyRecord,
    pub best_so_far: f64,
}

impl TraceEntry {
    pub fn odd_slots(&self) -> usize {
        space::odd_count(&self.assignment)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchTrace {
    pub strategy: &'static str,
    pub alphabet: Alphabet,
    pub config: Option<SearchConfig>,
    /// Evaluations spent in the random warmup phase.
    pub warmup_used: usize,
    pub entries: Vec<TraceEntry>,
    best: usize,
}

impl SearchTrace {
    fn from_entries(
        strategy: &'static str,
        alphabet: Alphabet,
        config: Option<SearchConfig>,
        warmup_used: usize,
        entries: Vec<TraceEntry>,
    ) -> Self {
        let best = entries
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.record.total.total_cmp(&b.1.record.total).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
            .expect("trace has at least one entry");
        Self {
            strategy,
            alphabet,
            config,
            warmup_used,
            entries,
            best,
        }
    }

    /// The lowest-total entry (earliest on ties).
    pub fn best(&self) -> &TraceEntry {
        &self.entries[self.best]
    }

    pub fn best_total(&self) -> f64 {
        self.best().record.total
    }

    /// Best assignment as a Clifford [`ParameterAssignment`] (quarter-turn
    /// traces, or eighth-turn traces whose best is all even).
    pub fn best_assignment(&self) -> Result<ParameterAssignment> {
        let a = &self.best().assignment;
        match self.alphabet {
            Alphabet::QuarterTurn => ParameterAssignment::new(a.clone()),
            Alphabet::EighthTurn { .. } => {
                if a.iter().any(|x| x % 2 == 1) {
                    return Err(Error::OddBudgetExceeded {
                        found: space::odd_count(a),
                        budget: 0,
                    });
                }
                ParameterAssignment::new(a.iter().map(|x| x / 2).collect())
            }
        }
    }

    pub fn evaluations_used(&self) -> usize {
        self.entries.len()
    }

    /// First iteration whose total is within `tol` of `target` (or lower).
    pub fn iterations_to_reach(&self, target: f64, tol: f64) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.record.total <= target + tol)
            .map(|e| e.iteration)
    }

    /// As [`iterations_to_reach`](Self::iterations_to_reach), counted from
    /// the end of warmup (0 when the warmup already hit the target).
    pub fn guided_iterations_to_reach(&self, target: f64, tol: f64) -> Option<usize> {
        self.iterations_to_reach(target, tol)
            .map(|i| i.saturating_sub(self.warmup_used))
    }

    /// `iteration,total,best_so_far` rows (plus `odd_slots` for eighth-turn
    /// traces), preceded by `# `-prefixed header lines.
    pub fn to_csv(&self, header: &[String]) -> String {
        let eighth = matches!(self.alphabet, Alphabet::EighthTurn { .. });
        let mut out = String::new();
        for h in header {
            out.push_str("# ");
            out.push_str(h);
            out.push('\n');
        }
        out.push_str("iteration,total,best_so_far");
        if eighth {
            out.push_str(",odd_slots");
        }
        out.push('\n');
        for e in &self.entries {
            out.push_str(&format!("{},{},{}", e.iteration, e.record.total, e.best_so_far));
            if eighth {
                out.push_str(&format!(",{}", e.odd_slots()));
            }
            out.push('\n');
        }
        out
    }

    /// Full trace as JSON, with `manifest` embedded verbatim.
    pub fn to_json(&self, manifest: Value) -> Value {
        let eighth = matches!(self.alphabet, Alphabet::EighthTurn { .. });
        let entry = |e: &TraceEntry| {
            let mut v = json!({
                "iteration": e.iteration,
                "assignment": e.assignment,
                "raw_energy": e.record.raw_energy,
                "penalty": e.record.penalty,
                "total": e.record.total,
                "constraint_values": e.record.constraint_values,
                "best_so_far": e.best_so_far,
            });
            if eighth {
                v["odd_slots"] = json!(e.odd_slots());
            }
            v
        };
        json!({
            "manifest": manifest,
            "strategy": self.strategy,
            "alphabet": self.alphabet,
            "config": self.config,
            "warmup_used": self.warmup_used,
            "evaluations_used": self.evaluations_used(),
            "best": entry(self.best()),
            "entries": self.entries.iter().map(entry).collect::<Vec<_>>(),
        })
    }
}

/// A template, a Hamiltonian and the slots a search may tune.
#[derive(Debug, Clone)]
pub struct Problem<'a> {
    pub template: &'a AnsatzTemplate,
    pub hamiltonian: &'a Hamiltonian,
    selection: SlotSelection,
}

impl<'a> Problem<'a> {
    pub fn new(template: &'a AnsatzTemplate, hamiltonian: &'a Hamiltonian) -> Result<Self> {
        if template.num_qubits() != hamiltonian.num_qubits() {
            return Err(Error::SizeMismatch {
                left: hamiltonian.num_qubits(),
                right: template.num_qubits(),
            });
        }
        Ok(Self {
            template,
            hamiltonian,
            selection: SlotSelection::all(template.num_slots()),
        })
    }

    /// Restricts the search to `slots`; every other slot is frozen at 0.
    pub fn with_active_slots(mut self, slots: Vec<usize>) -> Result<Self> {
        self.selection = SlotSelection::subset(self.template.num_slots(), slots)?;
        Ok(self)
    }

    pub fn selection(&self) -> &SlotSelection {
        &self.selection
    }

    pub fn active_dims(&self) -> usize {
        self.selection.active().len()
    }

    pub fn quarter_domain(&self) -> QuarterTurns {
        QuarterTurns {
            dims: self.active_dims(),
        }
    }

    /// Clifford evaluation of active-slot values.
    pub fn evaluate_active(&self, values: &[u8]) -> Result<(Vec<u8>, EnergyRecord)> {
        let full = self.selection.expand(values);
        let a = ParameterAssignment::new(full)?;
        let record = evaluate(self.hamiltonian, self.template, &a)?;
        Ok((a.indices().to_vec(), record))
    }
}

fn check_cap(size: Option<u128>, cap: u128) -> Result<u128> {
    match size {
        Some(s) if s <= cap => Ok(s),
        Some(s) => Err(Error::SpaceTooLarge {
            size: s.to_string(),
            cap,
        }),
        None => Err(Error::SpaceTooLarge {
            size: "more than 2^128".into(),
            cap,
        }),
    }
}

/// Evaluates every feasible point of `domain` in lexicographic order.
pub(crate) fn run_exhaustive<D, F>(
    domain: &D,
    alphabet: Alphabet,
    cap: u128,
    eval: F,
) -> Result<SearchTrace>
where
    D: Domain + Sync,
    F: Fn(&[u8]) -> Result<(Vec<u8>, EnergyRecord)> + Sync,
{
    let grid = check_cap(domain.grid_size(), cap)?;
    let results: Vec<(Vec<u8>, EnergyRecord)> = (0..grid)
        .into_par_iter()
        .filter_map(|rank| {
            let v = domain.decode(rank);
            domain.is_feasible(&v).then(|| eval(&v))
        })
        .collect::<Result<_>>()?;
    let mut best = f64::INFINITY;
    let entries = results
        .into_iter()
        .enumerate()
        .map(|(i, (assignment, record))| {
            best = best.min(record.total);
            TraceEntry {
                iteration: i + 1,
                assignment,
                record,
                best_so_far: best,
            }
        })
        .collect();
    Ok(SearchTrace::from_entries(
        "exhaustive",
        alphabet,
        None,
        0,
        entries,
    ))
}

/// Shared random-warmup + surrogate-guided loop. With `warmup == budget`
/// this is plain random search.
pub(crate) fn run_guided<D, F>(
    domain: &D,
    alphabet: Alphabet,
    strategy: &'static str,
    config: &SearchConfig,
    mut eval: F,
) -> Result<SearchTrace>
where
    D: Domain,
    F: FnMut(&[u8]) -> Result<(Vec<u8>, EnergyRecord)>,
{
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut xs: Vec<Vec<u8>> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut entries: Vec<TraceEntry> = Vec::new();
    let mut best = f64::INFINITY;
    let mut best_history: Vec<f64> = Vec::new();

    let mut record = |v: Vec<u8>,
                      seen: &mut HashSet<Vec<u8>>,
                      xs: &mut Vec<Vec<u8>>,
                      ys: &mut Vec<f64>,
                      entries: &mut Vec<TraceEntry>|
     -> Result<()> {
        let (assignment, rec) = eval(&v)?;
        best = best.min(rec.total);
        best_history.push(best);
        seen.insert(v.clone());
        xs.push(v);
        ys.push(rec.total);
        entries.push(TraceEntry {
            iteration: entries.len() + 1,
            assignment,
            record: rec,
            best_so_far: best,
        });
        Ok(())
    };

    for _ in 0..config.warmup {
        let v = space::sample_unseen(domain, &mut rng, &seen)?;
        record(v, &mut seen, &mut xs, &mut ys, &mut entries)?;
    }
    let warmup_used = entries.len();

    while entries.len() < config.budget {
        if let Some((window, tol)) = config.stagnation {
            let guided = entries.len() - warmup_used;
            if guided >= window {
                let len = entries.len();
                let before = entries[len - window - 1].best_so_far;
                if before - entries[len - 1].best_so_far <= tol {
                    break;
                }
            }
        }
        let next = propose(domain, config, &mut rng, &seen, &xs, &ys)?;
        record(next, &mut seen, &mut xs, &mut ys, &mut entries)?;
    }

    Ok(SearchTrace::from_entries(
        strategy,
        alphabet,
        Some(config.clone()),
        warmup_used,
        entries,
    ))
}

/// Fits the surrogate and returns the pool candidate with the lowest
/// predicted objective.
fn propose<D: Domain>(
    domain: &D,
    config: &SearchConfig,
    rng: &mut ChaCha8Rng,
    seen: &HashSet<Vec<u8>>,
    xs: &[Vec<u8>],
    ys: &[f64],
) -> Result<Vec<u8>> {
    let forest = SurrogateForest::fit(xs, ys, domain.levels(), config.trees, rng);
    let pool = candidate_pool(domain, config.pool_size, rng, seen, xs, ys);
    if pool.is_empty() {
        return space::sample_unseen(domain, rng, seen);
    }
    let predictions: Vec<f64> = pool.iter().map(|c| forest.predict(c)).collect();
    let min = predictions.iter().copied().fold(f64::INFINITY, f64::min);
    let ties: Vec<usize> = (0..pool.len()).filter(|&i| predictions[i] == min).collect();
    let pick = if ties.len() > 1 {
        ties[rng.gen_range(0..ties.len())]
    } else {
        ties[0]
    };
    Ok(pool.into_iter().nth(pick).expect("in range"))
}

/// Half uniform draws, half single-slot mutations of the best evaluated
/// points; unseen and distinct.
fn candidate_pool<D: Domain>(
    domain: &D,
    pool_size: usize,
    rng: &mut ChaCha8Rng,
    seen: &HashSet<Vec<u8>>,
    xs: &[Vec<u8>],
    ys: &[f64],
) -> Vec<Vec<u8>> {
    let mut pool: Vec<Vec<u8>> = Vec::with_capacity(pool_size);
    let mut in_pool: HashSet<Vec<u8>> = HashSet::with_capacity(pool_size);
    let random_quota = pool_size / 2;
    let mutation_quota = pool_size - random_quota;

    let mut accept = |v: Vec<u8>, pool: &mut Vec<Vec<u8>>| {
        if !seen.contains(&v) && in_pool.insert(v.clone()) {
            pool.push(v);
            true
        } else {
            false
        }
    };

    let mut added = 0;
    for _ in 0..4 * random_quota {
        if added == random_quota {
            break;
        }
        if accept(domain.sample(rng), &mut pool) {
            added += 1;
        }
    }

    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| ys[a].total_cmp(&ys[b]).then(a.cmp(&b)));
    let parents: Vec<&Vec<u8>> = order.iter().take(POOL_PARENTS).map(|&i| &xs[i]).collect();
    let mut added = 0;
    for attempt in 0..4 * mutation_quota {
        if added == mutation_quota || parents.is_empty() {
            break;
        }
        let parent = parents[attempt % parents.len()];
        if let Some(v) = domain.mutate(parent, rng) {
            if accept(v, &mut pool) {
                added += 1;
            }
        }
    }
    pool
}

/// Every assignment of the problem's active slots, in lexicographic order.
pub fn exhaustive(problem: &Problem<'_>, cap: u128) -> Result<SearchTrace> {
    run_exhaustive(&problem.quarter_domain(), Alphabet::QuarterTurn, cap, |v| {
        problem.evaluate_active(v)
    })
}

/// Best assignment of an exhaustive enumeration without keeping the
/// history. Returns `(best assignment, its record, evaluations)`.
pub fn exhaustive_min(
    problem: &Problem<'_>,
    cap: u128,
) -> Result<(ParameterAssignment, EnergyRecord, u128)> {
    let domain = problem.quarter_domain();
    let grid = check_cap(domain.grid_size(), cap)?;
    let best = (0..grid)
        .into_par_iter()
        .map(|rank| {
            let (a, r) = problem.evaluate_active(&domain.decode(rank))?;
            Ok((r.total, rank, a, r))
        })
        .try_reduce_with(|x, y| {
            Ok(if y.0 < x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x })
        })
        .expect("non-empty space")?;
    Ok((ParameterAssignment::new(best.2)?, best.3, grid))
}

/// `config.budget` distinct uniform-random assignments.
pub fn random_search(problem: &Problem<'_>, config: &SearchConfig) -> Result<SearchTrace> {
    let config = SearchConfig {
        warmup: config.budget,
        ..config.clone()
    };
    run_guided(
        &problem.quarter_domain(),
        Alphabet::QuarterTurn,
        "random",
        &config,
        |v| problem.evaluate_active(v),
    )
}

/// Random-forest Bayesian optimization with greedy acquisition.
pub fn bo_search(problem: &Problem<'_>, config: &SearchConfig) -> Result<SearchTrace> {
    if config.warmup == 0 {
        return Err(Error::InvalidConfig("bo_search needs warmup >= 1".into()));
    }
    run_guided(
        &problem.quarter_domain(),
        Alphabet::QuarterTurn,
        "bo",
        config,
        |v| problem.evaluate_active(v),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_su2, Axis};

    fn xx() -> Hamiltonian {
        Hamiltonian::from_labels(2, &[("XX", 1.0)]).unwrap()
    }

    #[test]
    fn xx_single_slot_exhaustive() {
        let t = build_su2(2, 1);
        let h = xx();
        let p = Problem::new(&t, &h)
            .unwrap()
            .with_active_slots(vec![t.slot_index(Axis::Y, 0, 0)])
            .unwrap();
        let trace = exhaustive(&p, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(trace.evaluations_used(), 4);
        assert_eq!(trace.best_total(), -1.0);
        let totals: Vec<f64> = trace.entries.iter().map(|e| e.record.total).collect();
        assert_eq!(totals, [0.0, 1.0, 0.0, -1.0]);
    }

    #[test]
    fn identity_ties_pick_first_assignment() {
        let t = build_su2(2, 1);
        let h = Hamiltonian::new(2, vec![]).unwrap();
        let p = Problem::new(&t, &h)
            .unwrap()
            .with_active_slots(vec![0, 1, 2])
            .unwrap();
        let trace = exhaustive(&p, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(trace.evaluations_used(), 64);
        assert_eq!(trace.best().iteration, 1);
        assert_eq!(trace.best().assignment, vec![0; 8]);
        let (a, r, count) = exhaustive_min(&p, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(a, ParameterAssignment::zeros(8));
        assert_eq!(r.total, 0.0);
        assert_eq!(count, 64);
    }

    #[test]
    fn exhaustive_cap() {
        let t = build_su2(4, 1);
        let h = Hamiltonian::new(4, vec![]).unwrap();
        let p = Problem::new(&t, &h).unwrap();
        assert!(matches!(
            exhaustive(&p, DEFAULT_EXHAUSTIVE_CAP),
            Err(Error::SpaceTooLarge { .. })
        ));
    }

    #[test]
    fn random_search_covers_small_space() {
        let t = build_su2(2, 1);
        let h = Hamiltonian::from_labels(2, &[("XX", 1.0), ("ZI", 0.3)]).unwrap();
        let p = Problem::new(&t, &h)
            .unwrap()
            .with_active_slots(vec![0, 1, 4])
            .unwrap();
        let config = SearchConfig {
            budget: 64,
            ..Default::default()
        };
        let trace = random_search(&p, &config).unwrap();
        let ex = exhaustive(&p, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(trace.best_total(), ex.best_total());
        let distinct: HashSet<_> = trace.entries.iter().map(|e| e.assignment.clone()).collect();
        assert_eq!(distinct.len(), 64);
        let over = SearchConfig {
            budget: 65,
            ..Default::default()
        };
        assert!(matches!(
            random_search(&p, &over),
            Err(Error::SpaceExhausted { evaluated: 64 })
        ));
    }

    #[test]
    fn degenerate_bo_equals_random() {
        let t = build_su2(2, 1);
        let h = xx();
        let p = Problem::new(&t, &h).unwrap();
        let config = SearchConfig {
            warmup: 30,
            budget: 30,
            seed: 11,
            ..Default::default()
        };
        let a = bo_search(&p, &config).unwrap();
        let b = random_search(&p, &config).unwrap();
        assert_eq!(a.entries, b.entries);
    }

    #[test]
    fn config_validation() {
        let t = build_su2(2, 1);
        let h = xx();
        let p = Problem::new(&t, &h).unwrap();
        for bad in [
            SearchConfig {
                warmup: 10,
                budget: 5,
                ..Default::default()
            },
            SearchConfig {
                pool_size: 0,
                ..Default::default()
            },
            SearchConfig {
                trees: 0,
                ..Default::default()
            },
            SearchConfig {
                warmup: 0,
                budget: 5,
                ..Default::default()
            },
        ] {
            assert!(bo_search(&p, &bad).is_err());
        }
    }

    #[test]
    fn stagnation_stops_early() {
        let t = build_su2(2, 1);
        let h = Hamiltonian::new(2, vec![]).unwrap();
        let p = Problem::new(&t, &h).unwrap();
        let config = SearchConfig {
            warmup: 5,
            budget: 200,
            pool_size: 20,
            trees: 3,
            stagnation: Some((10, 1e-9)),
            ..Default::default()
        };
        let trace = bo_search(&p, &config).unwrap();
        assert_eq!(trace.evaluations_used(), 15);
    }

    #[test]
    fn default_warmup() {
        assert_eq!(SearchConfig::default_warmup(Some(4)), 1);
        assert_eq!(SearchConfig::default_warmup(Some(65536)), 1000);
        assert_eq!(SearchConfig::default_warmup(Some(256)), 64);
        assert_eq!(SearchConfig::default_warmup(None), 1000);
    }

    #[test]
    fn csv_and_json_export() {
        let t = build_su2(2, 1);
        let h = xx();
        let p = Problem::new(&t, &h)
            .unwrap()
            .with_active_slots(vec![0])
            .unwrap();
        let trace = exhaustive(&p, DEFAULT_EXHAUSTIVE_CAP).unwrap();
        let csv = trace.to_csv(&["seed=0".into()]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "# seed=0");
        assert_eq!(lines[1], "iteration,total,best_so_far");
        assert_eq!(lines[5], "4,-1,-1");
        let j = trace.to_json(json!({"command": "search"}));
        assert_eq!(j["best"]["assignment"], json!([3, 0, 0, 0, 0, 0, 0, 0]));
        assert_eq!(j["evaluations_used"], json!(4));
    }
}
