//! Acceptance suite: every criterion at its stated tolerance, one PASS/FAIL
//! line each. Report files go to `$CARGO_TARGET_TMPDIR/acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::behavior::{check_novelty, check_on_off, check_session, novel_shapes, shape_pool, trained};
use common::engine_oracle::check_random_networks;
use common::plasticity_oracle::check_draws;
use neuropattern::architecture::{count_resources, PatternNetConfig};
use neuropattern::events::{Shape, SynthPattern};
use neuropattern::experiments::{
    confusion_table, curve_table, default_input_noise_levels, default_neuron_noise_levels, latency_table,
    measure_latencies, run_evaluation, sweep_input_noise, sweep_neuron_noise, trajectory_table, CurvePoint,
    NeuronNoise, ReportSink,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const LATENCY_RANGE: std::ops::RangeInclusive<u64> = 40..=120;
const RAIL_DEADLINE: u64 = 800;

fn sink(name: &str) -> ReportSink {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    ReportSink::at(&dir, name, "acceptance", &trained().protocol.seeds).unwrap()
}

fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

fn at_level(curve: &[CurvePoint], level: f64) -> f64 {
    curve.iter().find(|p| p.level == level).expect("level in sweep").mean
}

fn classification() -> Result<String, String> {
    let start = Instant::now();
    let t = trained();
    let report = run_evaluation(&t.net, &t.h, &t.outcome, &t.protocol).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let s = sink("classification");
    let (h, r) = confusion_table(&report.confusion_pre_wta);
    let pre = s.write_table("confusion_pre_wta", &h, &r).unwrap();
    let (h, r) = confusion_table(&report.confusion_post_wta);
    s.write_table("confusion_post_wta", &h, &r).unwrap();
    let detail = format!(
        "post-WTA {} (pre-WTA {}), {:.0?}; pre-WTA matrix at {}",
        pct(report.accuracy),
        pct(report.accuracy_pre_wta),
        elapsed,
        pre.display()
    );
    if report.accuracy < 0.95 {
        return Err(detail);
    }
    if elapsed >= Duration::from_secs(120) {
        return Err(format!("{detail}: over the 2 min budget"));
    }
    Ok(detail)
}

fn input_noise() -> Result<String, String> {
    let start = Instant::now();
    let t = trained();
    let levels = default_input_noise_levels();
    let curve = sweep_input_noise(&t.net, &t.h, &t.outcome, &t.protocol, &levels).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let (h, r) = curve_table(&curve);
    let path = sink("input_noise").write_table("curve", &h, &r).unwrap();
    let (base, worst) = (at_level(&curve, 0.0), at_level(&curve, 130.0));
    let detail = format!(
        "{} levels: 0% {} vs 130% {}, {:.0?}; curve at {}",
        levels.len(),
        pct(base),
        pct(worst),
        elapsed,
        path.display()
    );
    if levels.len() != 14 || base - worst > 0.02 + 1e-12 {
        return Err(detail);
    }
    if elapsed >= Duration::from_secs(600) {
        return Err(format!("{detail}: over the 10 min budget"));
    }
    Ok(detail)
}

fn neuron_noise() -> Result<String, String> {
    let t = trained();
    let levels = default_neuron_noise_levels();
    let curve = sweep_neuron_noise(&t.net, &t.h, &t.outcome, &t.protocol, &levels, NeuronNoise::default())
        .map_err(|e| e.to_string())?;
    let (h, r) = curve_table(&curve);
    let path = sink("neuron_noise").write_table("curve", &h, &r).unwrap();
    let (base, at20) = (at_level(&curve, 0.0), at_level(&curve, 20.0));
    let shape: Vec<String> = curve.iter().map(|p| format!("{}:{:.3}", p.level, p.mean)).collect();
    let detail = format!("0% {} vs 20% {} [{}]; curve at {}", pct(base), pct(at20), shape.join(" "), path.display());
    if at20 < base - 0.05 - 1e-12 {
        return Err(detail);
    }
    Ok(detail)
}

fn convergence() -> Result<String, String> {
    let t = trained();
    let (h, r) = trajectory_table(&t.outcome);
    let path = sink("learning").write_table("trajectory", &h, &r).unwrap();
    let episodes = &t.outcome.episodes;
    let steps: Vec<Option<u64>> = episodes.iter().map(|e| e.convergence_steps).collect();
    let detail = format!("{} episodes, steps to all 8400 railed {steps:?}; trajectory at {}", episodes.len(), path.display());
    let all_railed = episodes.iter().all(|e| e.railed_at_end == 8400);
    let in_time = steps.iter().all(|s| s.is_some_and(|s| s <= RAIL_DEADLINE));
    if episodes.len() != t.protocol.patterns.len() || !all_railed || !in_time {
        return Err(detail);
    }
    Ok(detail)
}

fn switch_latency() -> Result<String, String> {
    let t = trained();
    let report = measure_latencies(&t.net, &t.h, &t.outcome, &t.protocol).map_err(|e| e.to_string())?;
    let (h, r) = latency_table(&report);
    let path = sink("latency").write_table("switches", &h, &r).unwrap();
    let cross: Vec<_> = report.cross_switches().collect();
    let pairs: std::collections::BTreeSet<_> = cross.iter().map(|s| (s.from, s.to)).collect();
    let got: Vec<u64> = cross.iter().filter_map(|s| s.steps).collect();
    let (lo, hi) = (got.iter().min().copied(), got.iter().max().copied());
    let detail = format!(
        "{} ordered pairs x {} seeds, latency {lo:?}..={hi:?} steps; table at {}",
        pairs.len(),
        t.protocol.seeds.len(),
        path.display()
    );
    let ok = pairs.len() == 12
        && cross.iter().all(|s| s.steps.is_some_and(|x| LATENCY_RANGE.contains(&x)));
    if !ok {
        let bad: Vec<_> = cross
            .iter()
            .filter(|s| !s.steps.is_some_and(|x| LATENCY_RANGE.contains(&x)))
            .map(|s| format!("seed {} {}->{}: {:?}", s.seed, s.from, s.to, s.steps))
            .collect();
        return Err(format!("{detail}; out of range: {}", bad.join(", ")));
    }
    Ok(detail)
}

fn scalability() -> Result<String, String> {
    let mut fixed = Vec::new();
    let mut totals = Vec::new();
    for n in 1..=8 {
        let rc = count_resources(&PatternNetConfig::with_groups(n)).map_err(|e| e.to_string())?;
        if rc.neurons_per_added_pattern != 92 || rc.pattern_synapses_per_added_pattern != 8400 {
            return Err(format!(
                "n = {n}: {} neurons and {} pattern synapses per added pattern",
                rc.neurons_per_added_pattern, rc.pattern_synapses_per_added_pattern
            ));
        }
        fixed.push((rc.fixed_synapses_per_added_pattern, rc.disable_synapses_per_added_pattern));
        totals.push(rc.synapses_per_added_pattern);
    }
    let detail = format!(
        "92 neurons, 8400 pattern + {} fixed + {} disable synapses = {} per pattern, n = 1..8",
        fixed[0].0, fixed[0].1, totals[0]
    );
    if fixed.iter().any(|&f| f != fixed[0]) || totals.iter().any(|&s| s != totals[0]) {
        return Err(format!("per-pattern cost varies with n: {fixed:?}"));
    }
    Ok(detail)
}

fn plasticity_oracle() -> Result<String, String> {
    let (bad, notes) = check_draws(10_000, 7);
    if bad > 0 {
        return Err(format!("{bad} of 10000 draws disagree: {}", notes.join("; ")));
    }
    Ok("10000 draws bit-exact, fixed points and sign structure hold".into())
}

fn engine_oracle() -> Result<String, String> {
    let spikes = check_random_networks(100);
    Ok(format!("100 random networks identical to the reference stepper ({spikes} spikes)"))
}

fn run_property<S: Strategy>(
    name: &str,
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), String>,
) -> Result<String, String> {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner
        .run(&strategy, |v| test(v).map_err(TestCaseError::fail))
        .map(|()| format!("{name} ({cases} cases)"))
        .map_err(|e| format!("{name}: {e}"))
}

fn invariants() -> Result<String, String> {
    let pool = shape_pool().len();
    let sessions = (prop::collection::vec(0..pool, 5..8), any::<u64>());
    let statics = (0usize..4, 0u8..4, 0u8..12, 0u8..12, any::<u64>());
    let novel = (0..novel_shapes().len(), 1u64..1000);
    let results = [
        run_property("exclusion, uniqueness, non-repetition", 8, sessions, |(seq, seed)| {
            check_session(&seq, 2500, seed)
        }),
        run_property("ON/OFF 25 per feature", 24, statics, |(s, scale, r, c, seed)| {
            let max = SynthPattern::max_position(scale);
            let mut p = SynthPattern::new(Shape::standard()[s].clone(), scale, (r.min(max), c.min(max)));
            p.event_rate = 1.0;
            check_on_off(&p, seed)
        }),
        run_property("novelty", 10, novel, |(k, seed)| check_novelty(&novel_shapes()[k].1, seed, 2000)),
    ];
    let (ok, bad): (Vec<_>, Vec<_>) = results.into_iter().partition(Result::is_ok);
    let ok: Vec<String> = ok.into_iter().map(Result::unwrap).collect();
    if bad.is_empty() {
        Ok(ok.join(", "))
    } else {
        Err(bad.into_iter().map(Result::unwrap_err).collect::<Vec<_>>().join("; "))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Result<String, String>); 9] = [
        ("classification accuracy", classification),
        ("input-noise robustness", input_noise),
        ("neuron-parameter noise", neuron_noise),
        ("one-shot convergence", convergence),
        ("switch latency", switch_latency),
        ("scalability", scalability),
        ("plasticity oracle", plasticity_oracle),
        ("engine oracle", engine_oracle),
        ("behavioral invariants", invariants),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| f == &n.to_string() || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(msg)
        });
        let took = start.elapsed();
        match outcome {
            Ok(d) => println!("criterion {n} {name}: PASS ({took:.1?}) {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {n} {name}: FAIL ({took:.1?}) {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
