//! One function per subcommand, each returning a [`Report`].

use std::path::Path;

use serde_json::json;
use treecode::distance::{
    distance_sequence, min_distance, optimal_search, random_growth_base, random_tree_distance, tree_distance,
    tropical_tree_distance, Dist, PoolEntry,
};
use treecode::heralded::{
    balanced, bell, bit_phase_channel, conditional, failure_probability, ferro, find_fixed_points, lost_information,
    simplex_seeds, to_full, Flow, HeraldedFlow, RandomEnsembleFlow,
};
use treecode::pauli::{named_gate, Clifford2, Pauli, PauliPair};
use treecode::popdyn::{
    run_experiment, Basis, ExperimentResult, HistogramSpec, Model, Rescale, RunOptions, SiteNoise, Timing,
};
use treecode::sampler::{exact_failure, sample_and_decode};
use treecode::tensors::{coset_enumerator, poly_to_json, vector_enumerator, Channel};
use treecode::tree::{RTilde, Tree, TreeSpec};

use crate::args::*;
use crate::error::{CliError, Result};
use crate::output::{num, Cell, Report, Table};

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))
}

/// Image-table parse with the offending line reported.
fn parse_gate_file(path: &Path, text: &str) -> Result<Clifford2> {
    for (k, line) in text.lines().enumerate() {
        let entry = line.trim();
        if entry.is_empty() || entry.starts_with('#') {
            continue;
        }
        let ok = entry
            .split_once("->")
            .is_some_and(|(l, r)| l.trim().parse::<PauliPair>().is_ok() && r.trim().parse::<PauliPair>().is_ok());
        if !ok {
            return Err(config(format!("{}:{}: expected 'PQ->RS', got '{entry}'", path.display(), k + 1)));
        }
    }
    text.parse().map_err(|e| config(format!("{}: {e}", path.display())))
}

/// A gate name, an inline table, or a file holding a table; with the
/// stabilizer input, defaulting to the gate's conventional one (else `Z`).
pub fn resolve_gate(spec: &str, stab: Option<Pauli>) -> Result<(Clifford2, Pauli)> {
    if let Some((g, s)) = named_gate(spec) {
        return Ok((g, stab.unwrap_or(s)));
    }
    let path = Path::new(spec);
    let gate = if path.is_file() {
        parse_gate_file(path, &read(path)?)?
    } else {
        Clifford2::parse_spec(spec).map_err(|e| config(format!("gate '{spec}': {e}")))?
    };
    Ok((gate, stab.unwrap_or(Pauli::Z)))
}

fn load_tree(path: &Path) -> Result<Tree> {
    let spec = TreeSpec::from_json(&read(path)?).map_err(|e| config(format!("{}: {e}", path.display())))?;
    Tree::from_spec(&spec).map_err(|e| config(format!("{}: {e}", path.display())))
}

fn distance_row(t: usize, d: &Dist) -> Vec<Cell> {
    vec![t.into(), d[1].into(), d[2].into(), d[3].into(), min_distance(d).into()]
}

const DIST_COLUMNS: [&str; 5] = ["t", "d_X", "d_Z", "d_Y", "d"];

pub fn distance(a: &DistanceArgs, seed: u64) -> Result<Report> {
    if a.random {
        let stab = a.stab.unwrap_or(Pauli::Z);
        let stats = random_tree_distance(a.tmax, a.samples, stab, seed)?;
        let mut t = Table::new("random", &["t", "mean", "stderr"]);
        for s in &stats {
            t.push(vec![s.t.into(), s.mean.into(), s.stderr.into()]);
        }
        let mut r = Report::single(t);
        r.note("growth_base", random_growth_base(&stats, a.exclude).ok().map_or(serde_json::Value::Null, num));
        return Ok(r);
    }
    if let Some(path) = &a.tree {
        let tree = load_tree(path)?;
        let d = match &a.erasures {
            None => tree_distance(&tree),
            Some(ep) => {
                let v: serde_json::Value =
                    serde_json::from_str(&read(ep)?).map_err(|e| config(format!("{}: {e}", ep.display())))?;
                let flags = |key: &str, n: usize| -> Result<Vec<bool>> {
                    match v.get(key) {
                        None => Ok(vec![false; n]),
                        Some(x) => serde_json::from_value(x.clone())
                            .map_err(|e| config(format!("{}: '{key}': {e}", ep.display()))),
                    }
                };
                let leaves = flags("leaves", tree.num_leaves())?;
                let links = flags("links", tree.num_nodes())?;
                tropical_tree_distance(&tree, &leaves, &links)?
            }
        };
        let mut cols = DIST_COLUMNS.to_vec();
        let mut row = distance_row(tree.depth(), &d);
        if let Some(reference) = &a.reference {
            let (g, s) = resolve_gate(reference, None)?;
            let base = distance_sequence(&RTilde::new(&g, s)?, tree.depth())[tree.depth()];
            cols.push("ratio");
            row.push((min_distance(&d) as f64 / min_distance(&base) as f64).into());
        }
        let mut t = Table::new("distance", &cols);
        t.push(row);
        return Ok(Report::single(t));
    }
    let (g, s) = resolve_gate(&a.gate, a.stab)?;
    let mut t = Table::new("distance", &DIST_COLUMNS);
    for (k, d) in distance_sequence(&RTilde::new(&g, s)?, a.tmax).iter().enumerate() {
        t.push(distance_row(k, d));
    }
    Ok(Report::single(t))
}

pub fn search(a: &SearchArgs) -> Result<Report> {
    let mut pool = Vec::new();
    for entry in &a.pool {
        let (name, stab) = match entry.split_once(':') {
            Some((n, s)) => (n, Some(s.parse::<Pauli>().map_err(|e| config(format!("pool entry '{entry}': {e}")))?)),
            None => (entry.as_str(), None),
        };
        let (g, s) = resolve_gate(name, stab)?;
        pool.push(PoolEntry::new(g, s)?);
    }
    let (g0, s0) = resolve_gate(a.pool[0].split(':').next().unwrap_or_default(), None)?;
    let base = distance_sequence(&RTilde::new(&g0, s0)?, a.tmax);
    let res = optimal_search(&pool, a.tmax, !a.no_prune)?;
    let mut t = Table::new("search", &["t", "front_size", "d_X", "d_Z", "d_Y", "d", "ratio"]);
    for b in &res.depths {
        let d = min_distance(&b.distance);
        t.push(vec![
            b.t.into(),
            b.front_size.into(),
            b.distance[1].into(),
            b.distance[2].into(),
            b.distance[3].into(),
            d.into(),
            (d as f64 / min_distance(&base[b.t]) as f64).into(),
        ]);
    }
    if let (Some(path), Some(best)) = (&a.tree_out, res.depths.last()) {
        std::fs::write(path, best.tree.to_json())?;
    }
    let mut r = Report::single(t);
    r.note("final_front", &res.final_front);
    Ok(r)
}

pub fn classify(a: &ClassifyArgs) -> Result<Report> {
    let eq = match a.equivalence {
        EquivalenceArg::Exact => treecode::classify::Equivalence::Exact,
        EquivalenceArg::Relabel => treecode::classify::Equivalence::Relabel,
    };
    let c = treecode::classify::classify_level1(eq, a.t_check)?;
    let mut t = Table::new(
        "classes",
        &["class", "members", "gate", "stab", "A_I", "A_X", "A_Z", "A_Y", "d_check", "exponential"],
    );
    for (k, cl) in c.classes.iter().enumerate() {
        let mut row: Vec<Cell> = vec![
            k.into(),
            cl.members.into(),
            cl.representative.0.clone().into(),
            cl.representative.1.to_string().into(),
        ];
        row.extend(cl.enumerator.iter().map(|e| Cell::from(e.clone())));
        row.push((*cl.distances.last().unwrap_or(&0)).into());
        row.push(cl.exponential.into());
        t.push(row);
    }
    let mut r = Report::single(t);
    r.note("classes", c.classes.len());
    r.note("exponential", c.num_exponential());
    Ok(r)
}

/// Slack on the `--init` total, so entries rounded to a few decimals are accepted.
const INIT_SUM_TOL: f64 = 1e-3;

fn initial_distribution(a: &FlowArgs) -> Result<Option<[f64; 5]>> {
    if let Some(s) = &a.init {
        let v: Vec<f64> = s
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| config(format!("--init '{s}': {e}"))))
            .collect::<Result<_>>()?;
        let pi: [f64; 5] = v.try_into().map_err(|_| config(format!("--init '{s}': need five entries n,x,z,y,a")))?;
        let total: f64 = pi.iter().sum();
        if pi.iter().any(|&x| !(0.0..=1.0).contains(&x)) || (total - 1.0).abs() > INIT_SUM_TOL {
            return Err(config(format!("--init '{s}' is not a probability distribution")));
        }
        return Ok(Some(pi.map(|x| x / total)));
    }
    let rate = |p: f64, flag: &str| {
        if (0.0..=1.0).contains(&p) {
            Ok(p)
        } else {
            Err(config(format!("--{flag} {p} is outside [0, 1]")))
        }
    };
    if let Some(p) = a.erasure {
        let p = rate(p, "erasure")?;
        return Ok(Some([1.0 - p, 0.0, 0.0, 0.0, p]));
    }
    if let Some(q) = a.bitphase {
        return Ok(Some(bit_phase_channel(rate(q, "bitphase")?)));
    }
    Ok(None)
}

pub fn flow(a: &FlowArgs) -> Result<Report> {
    let start = initial_distribution(a)?;
    if start.is_none() && !a.fixed_points {
        return Err(config("flow needs --init, --erasure or --bitphase, or --fixed-points"));
    }
    let gate_flow = match (&a.gate, a.ensemble) {
        (_, Some(Ensemble::Random)) => None,
        (Some(name), None) => {
            let (g, s) = resolve_gate(name, a.stab)?;
            let mut f = HeraldedFlow::new(name.clone(), &RTilde::new(&g, s)?)?;
            if let Some(q) = a.bulk_bitphase {
                f = f.with_bulk(bit_phase_channel(q));
            }
            Some(f)
        }
        (None, None) => return Err(config("flow needs --gate or --ensemble")),
    };
    let step = |pi: &[f64; 5]| match &gate_flow {
        Some(f) => f.step_full(pi),
        None => RandomEnsembleFlow::step_full(pi),
    };
    let mut tables = Vec::new();
    if let Some(mut pi) = start {
        let mut t = Table::new("series", &["t", "n", "x", "z", "y", "a", "p_f", "info"]);
        for k in 0..=a.tmax {
            let mut row: Vec<Cell> = vec![k.into()];
            row.extend(pi.iter().map(|&v| Cell::from(v)));
            row.push(failure_probability(&pi).into());
            row.push(lost_information(&pi).into());
            t.push(row);
            pi = step(&pi);
        }
        tables.push(t);
    }
    let mut report = Report::default();
    if a.fixed_points {
        let flow: &dyn Flow = match &gate_flow {
            Some(f) => f,
            None => &RandomEnsembleFlow,
        };
        let reports = find_fixed_points(flow, &simplex_seeds(flow.dim(), a.divisions));
        let mut t = Table::new(
            "fixed_points",
            &["n", "x", "z", "y", "a", "stability", "relevant", "lambda_re", "lambda_im", "xi"],
        );
        for r in &reports {
            let full = match &gate_flow {
                Some(_) => to_full(&r.point),
                None => {
                    let s = (1.0 - r.point[0] - r.point[1]) / 3.0;
                    [r.point[0], s, s, s, r.point[1]]
                }
            };
            let mut row: Vec<Cell> = full.iter().map(|&v| Cell::from(v)).collect();
            let (re, im) = r.eigenvalues.first().copied().unwrap_or((f64::NAN, f64::NAN));
            row.extend([
                format!("{:?}", r.stability).to_lowercase().into(),
                r.relevant.into(),
                re.into(),
                im.into(),
                r.xi.unwrap_or(f64::NAN).into(),
            ]);
            t.push(row);
        }
        report.note("fixed_points", &reports);
        tables.push(t);
    }
    report.tables = tables;
    Ok(report)
}

fn grid(hi: f64, points: usize) -> Vec<f64> {
    let n = points.max(2) - 1;
    (0..=n).map(|k| hi * k as f64 / n as f64).collect()
}

pub fn bell_cmd(a: &BellArgs, seed: u64) -> Result<Report> {
    let qc = bell::q_c_closed_form();
    if a.phase_diagram {
        let mut t = Table::new("phase_diagram", &["q", "x_s", "x_c", "x_f", "z_s", "z_c", "z_f"]);
        for r in bell::bell_phase_diagram(&grid(a.q_max, a.points)) {
            t.push(vec![
                r.q.into(),
                r.x_s.into(),
                r.x_c.into(),
                r.x_f.into(),
                r.z_s.into(),
                r.z_c.into(),
                r.z_f.into(),
            ]);
        }
        let mut rep = Report::single(t);
        rep.note("q_c", num(qc));
        rep.note("q_c_flow", num(bell::q_c_from_flow()?));
        rep.note("p_c", num(bell::p_c()));
        rep.note("xi_c", num(bell::xi_c()));
        return Ok(rep);
    }
    if a.ferro {
        let mut t = Table::new("ferro", &["q", "m_s", "m_c"]);
        for q in grid(a.q_max, a.points) {
            let (c, s) = ferro::mx_fixed_points(q).unwrap_or((f64::NAN, f64::NAN));
            t.push(vec![q.into(), s.into(), c.into()]);
        }
        let mut rep = Report::single(t);
        rep.note("q_fm", num(ferro::q_fm_closed_form()));
        return Ok(rep);
    }
    if a.balanced {
        let mut t = Table::new("balanced", &["tau", "m_x", "m_z"]);
        for tau in 0..=a.tau {
            let (mx, mz) = balanced::thresholds(tau);
            t.push(vec![tau.into(), mx.into(), mz.into()]);
        }
        return Ok(Report::single(t));
    }
    let q = a.q.unwrap_or(qc);
    if a.walk_bias {
        let pairs = conditional::sample_distance_pairs(a.tau, q, a.samples, seed)?;
        let mut t = Table::new("walk_bias", &["d_star", "delta", "count"]);
        for (d, delta, n) in conditional::bias(&pairs, a.min_count) {
            t.push(vec![d.into(), delta.into(), n.into()]);
        }
        return Ok(Report::single(t));
    }
    if a.conditional_distance {
        let p = a.p.unwrap_or(q);
        let trace = conditional::conditional_trace(p, q, a.tau, a.d_max)?;
        let stats = conditional::conditional_stats(&trace);
        let mut t = Table::new("conditional_distance", &["tau", "x0", "d", "d_prime", "d_peak", "overflow"]);
        for (s, x) in stats.iter().zip(&trace) {
            t.push(vec![
                s.tau.into(),
                x.probs[0].into(),
                s.d.into(),
                s.d_prime.into(),
                s.d_peak.into(),
                s.overflow.into(),
            ]);
        }
        let mut rep = Report::single(t);
        rep.note(
            "growth_rate",
            conditional::growth_rate(&stats, a.d_max, 10).ok().map_or(serde_json::Value::Null, num),
        );
        return Ok(rep);
    }
    let p = a.p.ok_or_else(|| config("the trajectory needs -p (and optionally -q)"))?;
    let q = a.q.unwrap_or(0.0);
    let mut t = Table::new("trajectory", &["tau", "x0", "z0", "loss", "info", "p_f"]);
    for r in bell::trajectory(p, q, a.tau) {
        t.push(vec![r.tau.into(), r.x0.into(), r.z0.into(), r.loss.into(), r.info.into(), r.p_fail.into()]);
    }
    let mut rep = Report::single(t);
    rep.note("phase", bell::classify(p, q));
    Ok(rep)
}

fn histogram_spec(a: &PopdynArgs, m_max: f64) -> Result<Option<HistogramSpec>> {
    if !a.histogram {
        return Ok(None);
    }
    let w = a.bin_width;
    let z = a.q / (1.0 - a.q);
    let (rescale, lo, hi) = match a.rescale {
        RescaleArg::None => (Rescale::None, 0.0, 1.0 + w),
        _ if !(z > 0.0) => return Err(config("--rescale z or z2 needs a positive bulk rate -q")),
        RescaleArg::Z => (Rescale::Z, -w / 2.0, m_max / z + w),
        RescaleArg::Z2 => (Rescale::Z2, -w / 2.0, m_max / (z * z) + w),
    };
    let generations =
        if a.generations.is_empty() { (a.tmax.saturating_sub(4)..=a.tmax).collect() } else { a.generations.clone() };
    Ok(Some(HistogramSpec { rescale, z, m_max, lo, hi, width: w, generations }))
}

pub fn popdyn(a: &PopdynArgs, seed: u64) -> Result<Report> {
    let mut opts = RunOptions::new(a.m, a.tmax, a.runs, seed);
    if a.continuous {
        opts.timing = Timing::Continuous;
    }
    if let Some(b) = a.memory_budget {
        opts.memory_budget = b;
    }
    let res: ExperimentResult = match a.mode {
        Mode::General => {
            let (g, s) = resolve_gate(&a.gate, a.stab)?;
            opts.histogram = histogram_spec(a, 1.0)?;
            let model =
                Model::general(&RTilde::new(&g, s)?, SiteNoise::depolarizing(a.p)?, SiteNoise::depolarizing(a.q)?);
            run_experiment(model, &opts)?
        }
        Mode::Css => {
            if !a.gate.eq_ignore_ascii_case("bell") {
                return Err(config("css mode is defined for the bell gate only"));
            }
            let basis = match a.basis {
                BasisArg::X => Basis::X,
                BasisArg::Z => Basis::Z,
            };
            let m_max = match a.basis {
                BasisArg::X => ferro::mx_fixed_points(a.q).map_or(1.0, |(_, s)| s),
                BasisArg::Z => 1.0,
            };
            opts.histogram = histogram_spec(a, m_max)?;
            run_experiment(Model::bell_css(basis, SiteNoise::flip(a.p)?, SiteNoise::flip(a.q)?), &opts)?
        }
    };
    let mut series = Table::new("series", &["t", "p_f", "stderr", "redraws"]);
    for r in &res.series {
        series.push(vec![r.t.into(), r.mean.into(), r.stderr.into(), r.redraws.into()]);
    }
    let mut rep = Report::single(series);
    rep.note("plateaus", &res.plateaus);
    if let Some(h) = &res.histogram {
        let total = h.total().max(1) as f64;
        let mut t = Table::new("histogram", &["bin_center", "count", "fraction"]);
        for (k, &c) in h.counts.iter().enumerate() {
            t.push(vec![h.bin_center(k).into(), c.into(), (c as f64 / total).into()]);
        }
        rep.note("histogram", json!({ "total": h.total(), "below": h.below, "above": h.above }));
        rep.note("peaks", h.peaks(0.001));
        rep.tables.push(t);
    }
    Ok(rep)
}

pub fn sample(a: &SampleArgs, seed: u64) -> Result<Report> {
    let (g, s) = resolve_gate(&a.gate, a.stab)?;
    let tree = Tree::uniform(a.t, g, s)?;
    let leaf = Channel::depolarizing(a.p)?;
    let bulk = a.q.map(Channel::depolarizing).transpose()?;
    let exact = if a.exact { Some(exact_failure(&tree, &leaf)?) } else { None };
    let e = sample_and_decode(&tree, &leaf, bulk.as_ref(), a.n, seed)?;
    let mut cols = vec!["samples", "failures", "ties", "p_f", "stderr", "p_f_random_ties", "stderr_random_ties"];
    let mut row: Vec<Cell> = vec![
        e.samples.into(),
        e.failures.into(),
        e.ties.into(),
        e.p_f.into(),
        e.stderr.into(),
        e.p_f_random_ties.into(),
        e.stderr_random_ties.into(),
    ];
    if let Some(x) = exact {
        cols.push("p_f_exact");
        row.push(x.into());
    }
    let mut t = Table::new("sample", &cols);
    t.push(row);
    Ok(Report::single(t))
}

pub fn enumerate(a: &EnumerateArgs) -> Result<Report> {
    let tree = match &a.tree {
        Some(p) => load_tree(p)?,
        None => {
            let (g, s) = resolve_gate(&a.gate, a.stab)?;
            Tree::uniform(a.t, g, s)?
        }
    };
    let polys = match &a.errors {
        None => vector_enumerator(&tree)?,
        Some(e) => {
            let errors: Vec<Pauli> = e
                .chars()
                .map(Pauli::from_char)
                .collect::<treecode::Result<_>>()
                .map_err(|x| config(format!("--errors: {x}")))?;
            coset_enumerator(&tree, &errors)?
        }
    };
    let mut t = Table::new("enumerator", &["j", "polynomial"]);
    for (j, p) in Pauli::ALL.iter().zip(&polys) {
        t.push(vec![j.to_string().into(), p.to_string().into()]);
    }
    let mut rep = Report::single(t);
    rep.note("enumerator", polys.iter().map(poly_to_json).collect::<Vec<_>>());
    Ok(rep)
}
