//! WebAssembly bindings behind `www/index.html`. Every export takes plain
//! numbers and strings and returns JSON text, so the page needs no glue
//! beyond what `wasm-bindgen` generates.

use neuropattern::architecture::{count_resources, PatternNetConfig, PatternRuleTuning};
use neuropattern::engine::{NetworkBuilder, PlasticId, Simulator};
use neuropattern::events::{inject_noise, synthesize, Jiggle, SynthPattern, GRID_SIDE};
use neuropattern::plasticity::Rule;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Spike counts per input pixel for a synthetic pattern, row-major over the
/// 16×16 grid, plus the total with and without the added noise.
#[wasm_bindgen]
pub fn pattern_heatmap(
    shape: &str,
    scale: u8,
    row: u8,
    col: u8,
    jiggle: u8,
    noise_percent: f64,
    steps: usize,
    seed: u64,
) -> Result<String, JsError> {
    let mut p = SynthPattern::new(shape.parse().map_err(js_err)?, scale, (row, col));
    p.event_rate = 0.5;
    p.jiggle = Jiggle { amplitude: jiggle, period: 4 };
    p.validate().map_err(js_err)?;
    let clean = synthesize(&p, steps, seed).map_err(js_err)?;
    let noisy = inject_noise(&clean, noise_percent, seed ^ 0x5eed).map_err(js_err)?;
    Ok(json!({
        "side": GRID_SIDE,
        "counts": noisy.pixel_counts(),
        "signal_spikes": clean.spike_count(),
        "total_spikes": noisy.spike_count(),
    })
    .to_string())
}

/// Weight of one pattern-rule synapse over `steps` simulator steps. The
/// postsynaptic neuron fires every step; the presynaptic one every
/// `pre_period` steps (never when 0).
#[wasm_bindgen]
pub fn weight_trajectory(pre_period: u32, initial_weight: i32, steps: usize) -> Result<String, JsError> {
    let tuning = PatternRuleTuning::default();
    let rule = Rule::Pattern(tuning.rule);
    let mut b = NetworkBuilder::new();
    let io = b.add_input_population("io", 2).map_err(js_err)?;
    let r = b.add_rule(rule).map_err(js_err)?;
    let t = b.add_trace(tuning.trace).map_err(js_err)?;
    let (lo, hi) = rule.bounds();
    b.connect_plastic(io.id(0), io.id(1), r, t, initial_weight.clamp(lo, hi), 0)
        .map_err(js_err)?;
    let net = b.build().map_err(js_err)?;
    let mut sim = Simulator::new(&net, 0);
    let mut weights = Vec::with_capacity(steps + 1);
    let mut traces = Vec::with_capacity(steps + 1);
    weights.push(sim.weight(PlasticId(0)));
    traces.push(sim.trace(PlasticId(0)));
    for s in 0..steps {
        let pre = pre_period > 0 && s as u32 % pre_period == 0;
        let ext = if pre { vec![io.id(0), io.id(1)] } else { vec![io.id(1)] };
        sim.step(&ext).map_err(js_err)?;
        weights.push(sim.weight(PlasticId(0)));
        traces.push(sim.trace(PlasticId(0)));
    }
    Ok(json!({
        "w_min": lo,
        "w_max": hi,
        "alpha": tuning.rule.alpha,
        "weights": weights,
        "traces": traces,
    })
    .to_string())
}

/// Network size for `n` output groups and the cost of one more.
#[wasm_bindgen]
pub fn resources(n_groups: usize) -> Result<String, JsError> {
    let rc = count_resources(&PatternNetConfig::with_groups(n_groups)).map_err(js_err)?;
    serde_json::to_string(&rc).map_err(js_err)
}
