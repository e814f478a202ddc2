//! Plain-text reports. Every report is a sequence of `key = value` lines with
//! deterministic ordering, so two runs with the same inputs print the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use bvm_core::process::{period_diagnostic, return_time_bound, Classification, Period, Trajectory};
use bvm_core::spectrum::{MembershipResult, SetKind, Verdict};
use bvm_core::{AddingMachine, BigUint};

use crate::config::RunConfig;
use crate::format::{digit_list, format_complex, path_list};

pub fn set_name(set: SetKind) -> &'static str {
    match set {
        SetKind::F => "F",
        SetKind::E => "E",
        SetKind::Pt => "pt",
    }
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::BoundedWithinBudget => "bounded",
        Verdict::Escaped => "escaped",
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "none".to_string(), |v| v.to_string())
}

pub fn probe(r: &MembershipResult, budget: usize, radius: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "lambda = {}", format_complex(r.lambda));
    let _ = writeln!(s, "set = {}", set_name(r.set));
    let _ = writeln!(s, "verdict = {}", verdict_name(r.verdict));
    let _ = writeln!(s, "escape_index = {}", opt(r.escape_index));
    let _ = writeln!(s, "w_escape_index = {}", opt(r.w_escape_index));
    let _ = writeln!(s, "log_growth = {}", r.log_growth);
    let _ = writeln!(s, "certificate = {}", opt(r.certificate.map(|c| c.tag())));
    let _ = writeln!(s, "budget = {}", budget);
    let _ = writeln!(s, "radius = {}", radius);
    s
}

pub fn validate(cfg: &RunConfig) -> String {
    let d = cfg.diagram();
    let mut s = String::from("status = valid\n");
    let _ = writeln!(s, "stationary = {}", d.is_stationary());
    let _ = writeln!(s, "explicit_levels = {}", d.explicit_levels());
    let sizes: Vec<String> = (0..=d.explicit_levels())
        .map(|k| d.vertex_count(k).to_string())
        .collect();
    let _ = writeln!(s, "vertex_counts = {}", sizes.join(" "));
    let _ = writeln!(s, "canonical_ordering = {}", d.is_canonical());
    let _ = writeln!(s, "hypothesis_a = {}", d.check_hypothesis_a());
    let simple = d.check_simplicity(d.probe_depth());
    let _ = writeln!(
        s,
        "simplicity_witness = {}",
        opt(simple.witness().map(|(a, b)| format!("{}..{}", a, b)))
    );
    let _ = writeln!(
        s,
        "x0_tail_vertex = {}",
        cfg.system.x0_vertex(d.explicit_levels() + 1)
    );
    let _ = writeln!(
        s,
        "fg_numeration = {}",
        d.is_two_by_two() && d.is_canonical()
    );
    let _ = writeln!(
        s,
        "schedule = {}",
        if cfg.schedule.is_some() {
            "present"
        } else {
            "absent"
        }
    );
    s
}

pub fn classify(machine: &AddingMachine, c: &Classification) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "verdict = {}", c.verdict.tag());
    let _ = writeln!(s, "justification = {}", c.justification.tag());
    let period = match period_diagnostic(machine.schedule()) {
        Period::Aperiodic => "aperiodic",
        Period::Unknown => "unknown",
    };
    let _ = writeln!(s, "period = {}", period);
    if let Some([1, b, 1, 0]) = machine.system().diagram().coefficients_2x2(1) {
        if machine.system().diagram().is_stationary() && b > 0 {
            let bound = return_time_bound(b, machine.schedule(), 40);
            if bound.is_finite() {
                let _ = writeln!(s, "return_time_bound = {}", bound.bound);
            }
        }
    }
    s
}

/// Aggregated visits and per-replica return statistics, labelled by integers.
pub fn simulation(
    machine: &AddingMachine,
    seed: u64,
    start: &BigUint,
    runs: &[Trajectory],
) -> String {
    let mut s = String::new();
    let steps = runs.first().map_or(0, |t| t.steps);
    let _ = writeln!(s, "seed = {}", seed);
    let _ = writeln!(s, "steps = {}", steps);
    let _ = writeln!(s, "replicas = {}", runs.len());
    let _ = writeln!(s, "start = {}", start);
    let mut hist: BTreeMap<BigUint, u64> = BTreeMap::new();
    for (i, t) in runs.iter().enumerate() {
        for (x, n) in &t.visits {
            *hist.entry(machine.label_of(x)).or_insert(0) += n;
        }
        let times: Vec<String> = t.return_times.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "[replica {}]", i);
        let _ = writeln!(s, "final = {}", machine.label_of(&t.final_state));
        let _ = writeln!(s, "final_path = {}", path_list(&t.final_state.triples()));
        if let Some(num) = machine.numeration() {
            let digits = num.path_digits(&t.final_state);
            let _ = writeln!(s, "final_digits = {}", digit_list(digits.pairs()));
        }
        let _ = writeln!(s, "returns = {}", t.return_times.len());
        let _ = writeln!(s, "return_times = {}", times.join(" "));
    }
    let _ = writeln!(s, "[visits]");
    for (label, n) in hist {
        let _ = writeln!(s, "{} = {}", label, n);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use bvm_core::process::{classify_recurrence, replica_rng};

    const FIB: &str = r#"
[diagram]
levels = 2
incidence = [[[1, 1], [1, 0]]]

[schedule]
kind = "geometric"
ratio = "1/4"
"#;

    #[test]
    fn classification_includes_bound() {
        let cfg = parse_config(FIB).unwrap();
        let m = cfg.machine().unwrap();
        let c = classify_recurrence(m.system().diagram(), m.schedule());
        let text = classify(&m, &c);
        assert!(text.contains("verdict = positive_recurrent"));
        assert!(text.contains("return_time_bound = "));
        assert!(text.contains("period = aperiodic"));
    }

    #[test]
    fn simulation_is_labelled() {
        let cfg = parse_config(FIB).unwrap();
        let m = cfg.machine().unwrap();
        let x0 = m.system().x0();
        let t = m.simulate(&x0, 50, &mut replica_rng(3, 0));
        let text = simulation(&m, 3, &BigUint::from(0u32), std::slice::from_ref(&t));
        assert!(text.starts_with("seed = 3\nsteps = 50\nreplicas = 1\nstart = 0\n[replica 0]\n"));
        let total: u64 = text
            .split("[visits]\n")
            .nth(1)
            .unwrap()
            .lines()
            .map(|l| l.split(" = ").nth(1).unwrap().parse::<u64>().unwrap())
            .sum();
        assert_eq!(total, 50);
        assert!(text.contains(&format!("returns = {}\n", t.return_times.len())));
    }

    #[test]
    fn validation_summary() {
        let cfg = parse_config(FIB).unwrap();
        let text = validate(&cfg);
        assert!(text.contains("hypothesis_a = false"));
        assert!(text.contains("simplicity_witness = 0..2"));
    }
}
