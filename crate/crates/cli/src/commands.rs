use std::path::Path;
use std::time::Instant;

use cliffseed::ansatz::{build_su2, AnsatzTemplate, ParameterAssignment};
use cliffseed::baselines::{
    chem_accurate, exact_ground, exact_ground_state, hf_search, recovered_correlation, relative_accuracy,
    MAX_EXACT_QUBITS,
};
use cliffseed::dense::StateVector;
use cliffseed::magic::{kt_exhaustive, kt_random_search, kt_search};
use cliffseed::objective::{order_term_rows, term_breakdown, term_rows_csv, EnergyRecord, TermRow};
use cliffseed::pauli::Hamiltonian;
use cliffseed::search::{
    bo_search, exhaustive, exhaustive_min, random_search, Alphabet, Domain, EighthTurns, Problem, QuarterTurns,
    SearchConfig, SearchTrace,
};
use serde_json::{json, Value};

use crate::{read_file, read_hamiltonian, write_file, CliError, SearchOpts, Strategy};

const DEFAULT_BUDGET: usize = 2000;

fn apply_weight(h: &mut Hamiltonian, weight: Option<f64>) -> Result<(), CliError> {
    if let Some(w) = weight {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(CliError::Input(format!("--constraint-weight must be finite and >= 0, got {w}")));
        }
        h.constraints_mut().iter_mut().for_each(|c| c.weight = w);
    }
    Ok(())
}

fn problem<'a>(t: &'a AnsatzTemplate, h: &'a Hamiltonian, opts: &SearchOpts) -> Result<Problem<'a>, CliError> {
    let p = Problem::new(t, h)?;
    Ok(match &opts.active_slots {
        Some(slots) => p.with_active_slots(slots.clone())?,
        None => p,
    })
}

fn space_size(p: &Problem<'_>, k: Option<usize>) -> Option<u128> {
    let dims = p.active_dims();
    match k {
        None => QuarterTurns { dims }.size(),
        Some(max_odd) => EighthTurns { dims, max_odd }.size(),
    }
}

/// Search configuration with budget and warmup defaults scaled to the
/// space; `None` for exhaustive enumeration.
fn search_config(opts: &SearchOpts, size: Option<u128>) -> Result<Option<SearchConfig>, CliError> {
    if opts.strategy == Strategy::Exhaustive {
        return Ok(None);
    }
    let fits = |v: usize| size.is_none_or(|s| (v as u128) <= s);
    let budget = opts.budget.unwrap_or(match size {
        Some(s) if !fits(DEFAULT_BUDGET) => s as usize,
        _ => DEFAULT_BUDGET,
    });
    let warmup = opts
        .warmup
        .unwrap_or_else(|| SearchConfig::default_warmup(size).min(budget));
    let stagnation = match &opts.stagnation {
        None => None,
        Some(v) => {
            let window = v[0]
                .parse::<usize>()
                .map_err(|e| CliError::Input(format!("stagnation window {:?}: {e}", v[0])))?;
            let tol = v[1]
                .parse::<f64>()
                .map_err(|e| CliError::Input(format!("stagnation tolerance {:?}: {e}", v[1])))?;
            Some((window, tol))
        }
    };
    let config = SearchConfig {
        warmup,
        budget,
        pool_size: opts.pool,
        trees: opts.trees,
        seed: opts.seed,
        stagnation,
    };
    config.validate()?;
    Ok(Some(config))
}

fn run_search(p: &Problem<'_>, opts: &SearchOpts, config: Option<&SearchConfig>) -> Result<SearchTrace, CliError> {
    let trace = match (opts.strategy, opts.k, config) {
        (Strategy::Exhaustive, None, _) => exhaustive(p, opts.cap),
        (Strategy::Exhaustive, Some(k), _) => kt_exhaustive(p, k, opts.cap),
        (Strategy::Bo, None, Some(c)) => bo_search(p, c),
        (Strategy::Bo, Some(k), Some(c)) => kt_search(p, k, c),
        (Strategy::Random, None, Some(c)) => random_search(p, c),
        (Strategy::Random, Some(k), Some(c)) => kt_random_search(p, k, c),
        (_, _, None) => unreachable!("guided strategies always carry a config"),
    };
    Ok(trace?)
}

fn manifest(command: &str, hams: &[&Path], h: Option<&Hamiltonian>, opts: &SearchOpts, config: Option<&SearchConfig>, threads: usize, outputs: &[String]) -> Value {
    json!({
        "tool": "cliffseed",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "hamiltonian": hams.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "hamiltonian_name": h.map(|h| h.name.clone()),
        "num_qubits": h.map(Hamiltonian::num_qubits),
        "reps": opts.reps,
        "strategy": opts.strategy.name(),
        "config": config,
        "k": opts.k,
        "active_slots": opts.active_slots,
        "constraint_weight": opts.constraint_weight,
        "cap": opts.cap.to_string(),
        "threads": threads,
        "outputs": outputs,
    })
}

pub fn search(ham: &Path, opts: &SearchOpts, out: Option<&Path>, threads: usize) -> Result<(), CliError> {
    let start = Instant::now();
    let mut h = read_hamiltonian(ham)?;
    apply_weight(&mut h, opts.constraint_weight)?;
    let t = build_su2(h.num_qubits(), opts.reps);
    let p = problem(&t, &h, opts)?;
    let config = search_config(opts, space_size(&p, opts.k))?;
    let trace = run_search(&p, opts, config.as_ref())?;
    let best = trace.best();
    let clifford = trace.best_assignment().ok();

    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
        let best_file = if clifford.is_some() {
            "best_assignment.json"
        } else {
            "best_assignment_eighth.json"
        };
        let outputs: Vec<String> = ["trace.csv", "trace.json", best_file].map(String::from).to_vec();
        let m = manifest("search", &[ham], Some(&h), opts, config.as_ref(), threads, &outputs);
        write_file(&dir.join("trace.csv"), &trace.to_csv(&[format!("manifest: {m}")]))?;
        let doc = serde_json::to_string_pretty(&trace.to_json(m)).expect("trace serializes");
        write_file(&dir.join("trace.json"), &(doc + "\n"))?;
        let indices = match &clifford {
            Some(a) => json!(a.indices()),
            None => json!(best.assignment),
        };
        write_file(&dir.join(best_file), &format!("{indices}\n"))?;
    }

    let alphabet = match trace.alphabet {
        Alphabet::QuarterTurn => "quarter_turn".to_string(),
        Alphabet::EighthTurn { k } => format!("eighth_turn(k={k})"),
    };
    println!(
        "best_energy={} raw_energy={} penalty={} iterations={} best_iteration={} alphabet={alphabet} assignment={} wall_ms={}",
        best.record.total,
        best.record.raw_energy,
        best.record.penalty,
        trace.evaluations_used(),
        best.iteration,
        json!(best.assignment),
        start.elapsed().as_millis()
    );
    Ok(())
}

fn read_assignment(path: &Path) -> Result<ParameterAssignment, CliError> {
    let indices: Vec<u8> = serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::Input(format!("{}: expected a JSON array of indices 0..3: {e}", path.display())))?;
    Ok(ParameterAssignment::new(indices)?)
}

pub fn terms(
    ham: &Path,
    assignment: &Path,
    reps: usize,
    with_hf: bool,
    with_exact: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let h = read_hamiltonian(ham)?;
    let a = read_assignment(assignment)?;
    let t = build_su2(h.num_qubits(), reps);
    let cafqa = term_breakdown(&h, &t, &a)?;
    let hf = if with_hf {
        let witness = hf_search(&h)?.witness.expect("HF result carries a witness");
        Some(term_breakdown(&h, &t, &t.bitstring_assignment(&witness)?)?)
    } else {
        None
    };
    let exact = if with_exact {
        let (_, v) = exact_ground_state(&h)?;
        let state = StateVector::from_amplitudes(h.num_qubits(), v)?;
        Some(
            h.terms()
                .iter()
                .map(|term| Ok(state.expectation(&term.pauli)?.re))
                .collect::<Result<Vec<f64>, CliError>>()?,
        )
    } else {
        None
    };
    let mut rows: Vec<TermRow> = cafqa
        .iter()
        .enumerate()
        .map(|(i, (term, e))| TermRow {
            label: term.pauli.label(),
            coeff: term.coeff,
            diagonal: term.pauli.is_diagonal(),
            cafqa: *e,
            hf: hf.as_ref().map(|rows| rows[i].1),
            exact: exact.as_ref().map(|v| v[i]),
        })
        .collect();
    order_term_rows(&mut rows);
    let m = json!({
        "tool": "cliffseed",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "terms",
        "hamiltonian": ham.display().to_string(),
        "assignment": assignment.display().to_string(),
        "assignment_indices": a.indices(),
        "reps": reps,
        "hf": with_hf,
        "exact": with_exact,
        "outputs": out.map(|p| p.display().to_string()),
    });
    let csv = format!("# manifest: {m}\n{}", term_rows_csv(&rows, with_hf, with_exact));
    match out {
        Some(path) => write_file(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

/// Quotes a CSV field when it holds a separator or quote.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

struct CompareRow {
    name: String,
    bond_length: Option<f64>,
    exact: Option<f64>,
    hf: Option<f64>,
    cafqa: Option<f64>,
    recovered: Option<f64>,
    errors: Vec<String>,
}

impl CompareRow {
    fn csv(&self) -> String {
        let abs_err = self.cafqa.zip(self.exact).map(|(c, e)| (c - e).abs());
        let chem = self.cafqa.zip(self.exact).map(|(c, e)| chem_accurate(c, e).to_string());
        let rel = match (self.cafqa, self.hf, self.exact) {
            (Some(c), Some(h), Some(e)) => Some(relative_accuracy(c, h, e)),
            _ => None,
        };
        [
            csv_field(&self.name),
            opt_num(self.bond_length),
            opt_num(self.exact),
            opt_num(self.hf),
            opt_num(self.cafqa),
            opt_num(abs_err),
            opt_num(self.recovered),
            chem.unwrap_or_default(),
            opt_num(rel),
            csv_field(&self.errors.join("; ")),
        ]
        .join(",")
    }
}

fn cafqa_energy(h: &Hamiltonian, opts: &SearchOpts) -> Result<EnergyRecord, CliError> {
    let t = build_su2(h.num_qubits(), opts.reps);
    let p = problem(&t, h, opts)?;
    if opts.strategy == Strategy::Exhaustive && opts.k.is_none() {
        return Ok(exhaustive_min(&p, opts.cap)?.1);
    }
    let config = search_config(opts, space_size(&p, opts.k))?;
    Ok(run_search(&p, opts, config.as_ref())?.best().record.clone())
}

fn compare_row(path: &Path, opts: &SearchOpts) -> (CompareRow, Option<CliError>) {
    let mut row = CompareRow {
        name: path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        bond_length: None,
        exact: None,
        hf: None,
        cafqa: None,
        recovered: None,
        errors: Vec::new(),
    };
    let mut h = match read_hamiltonian(path).and_then(|mut h| apply_weight(&mut h, opts.constraint_weight).map(|_| h)) {
        Ok(h) => h,
        Err(e) => {
            let (CliError::Input(m) | CliError::Runtime(m)) = &e;
            row.errors.push(m.clone());
            return (row, Some(e));
        }
    };
    if !h.name.is_empty() {
        row.name = std::mem::take(&mut h.name);
    }
    row.bond_length = h.bond_length();
    let mut first_error = None;
    let mut note = |stage: &str, e: CliError, first: &mut Option<CliError>| {
        let (CliError::Input(m) | CliError::Runtime(m)) = &e;
        row.errors.push(format!("{stage}: {m}"));
        first.get_or_insert(e);
    };
    let hf = hf_search(&h).map(|r| r.energy).map_err(CliError::from);
    let exact = if h.num_qubits() <= MAX_EXACT_QUBITS {
        exact_ground(&h).map(|r| Some(r.energy)).map_err(CliError::from)
    } else {
        Ok(None)
    };
    let cafqa = cafqa_energy(&h, opts).map(|r| r.raw_energy);
    let hf = hf.map_err(|e| note("hf", e, &mut first_error)).ok();
    let exact = exact.map_err(|e| note("exact", e, &mut first_error)).ok().flatten();
    let cafqa = cafqa.map_err(|e| note("cafqa", e, &mut first_error)).ok();
    let recovered = match (cafqa, hf, exact) {
        (Some(c), Some(h), Some(e)) => recovered_correlation(c, h, e)
            .map_err(|e| note("recovered_pct", e.into(), &mut None))
            .ok(),
        _ => None,
    };
    row.hf = hf;
    row.exact = exact;
    row.cafqa = cafqa;
    row.recovered = recovered;
    (row, first_error)
}

pub fn compare(hams: &[std::path::PathBuf], opts: &SearchOpts, out: Option<&Path>, threads: usize) -> Result<(), CliError> {
    let paths: Vec<&Path> = hams.iter().map(|p| p.as_path()).collect();
    let config = match opts.strategy {
        Strategy::Exhaustive => None,
        _ => search_config(opts, None).ok().flatten(),
    };
    let outputs: Vec<String> = out.iter().map(|p| p.display().to_string()).collect();
    let m = manifest("compare", &paths, None, opts, config.as_ref(), threads, &outputs);
    let mut csv = format!(
        "# manifest: {m}\nname,bond_length,E_exact,E_hf,E_cafqa,abs_err,recovered_pct,chem_accurate,relative_accuracy,error\n"
    );
    let mut succeeded = 0;
    let mut first_error = None;
    for path in &paths {
        let (row, err) = compare_row(path, opts);
        if row.cafqa.is_some() {
            succeeded += 1;
        }
        if let Some(e) = err {
            first_error.get_or_insert(e);
        }
        csv.push_str(&row.csv());
        csv.push('\n');
    }
    match out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    match first_error {
        Some(e) if succeeded == 0 => Err(e),
        _ => Ok(()),
    }
}
