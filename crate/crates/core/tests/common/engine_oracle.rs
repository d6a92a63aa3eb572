//! Oracle: the simulator against a deliberately naive stepper on random networks.
//!
//! The oracle keeps pending input in a map keyed by arrival step, one trace
//! per plastic synapse instead of shared slots, and does its fixed-point
//! rounding through `i128` division rather than shifts. Weight updates go
//! through `Rule::apply`, which has its own oracle in `plasticity_oracle`.

use std::collections::BTreeMap;

use neuropattern::engine::{
    CompartmentParams, Decay, NetworkBuilder, NetworkSpec, NeuronId, PlasticId, Simulator,
};
use neuropattern::plasticity::{FixedTrace, NsmRule, PatternRule, Rate, Rule, TraceConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone)]
struct Neuron {
    params: CompartmentParams,
    input: bool,
    noise: i32,
}

#[derive(Clone)]
struct Fixed {
    pre: usize,
    post: usize,
    weight: i32,
    delay: u32,
}

#[derive(Clone)]
struct Plastic {
    pre: usize,
    post: usize,
    rule: Rule,
    trace: FixedTrace,
    delay: u32,
    w0: i32,
    rule_idx: usize,
    trace_idx: usize,
}

struct Desc {
    neurons: Vec<Neuron>,
    fixed: Vec<Fixed>,
    plastic: Vec<Plastic>,
    /// Per step, the input neurons forced to spike.
    external: Vec<Vec<usize>>,
    seed: u64,
}

fn random_desc(case: u64) -> (Desc, NetworkSpec) {
    let mut r = ChaCha8Rng::seed_from_u64(0xE4_61_4E + case);
    let n = r.random_range(1..=50usize);
    let n_in = r.random_range(0..=n.min(8));
    let mut neurons = Vec::with_capacity(n);
    for i in 0..n {
        let params = CompartmentParams {
            threshold: r.random_range(1..=300),
            bias: r.random_range(-8..=12),
            current_decay: Decay::from_q12(r.random_range(0..=4096)).unwrap(),
            voltage_decay: Decay::from_q12(r.random_range(0..=4096)).unwrap(),
            refractory_period: r.random_range(0..=4),
        };
        let input = i < n_in;
        let noise = if !input && r.random_bool(0.3) { r.random_range(0..=40) } else { 0 };
        neurons.push(Neuron { params, input, noise });
    }
    let fixed: Vec<Fixed> = (0..r.random_range(0..=n * 8))
        .map(|_| Fixed {
            pre: r.random_range(0..n),
            post: r.random_range(0..n),
            weight: r.random_range(-80..=120),
            delay: r.random_range(0..=12),
        })
        .collect();
    let rules = [
        Rule::Pattern(PatternRule {
            alpha: r.random_range(1..=4096),
            lambda: Rate::new(r.random_range(1..=7), r.random_range(6..=12)),
            w_max: r.random_range(1..=100),
            w_min: -r.random_range(1..=100),
        }),
        Rule::Nsm(NsmRule {
            alpha: r.random_range(0..=4096),
            lambda: Rate::new(r.random_range(1..=5), r.random_range(4..=10)),
            gamma: Rate::new(r.random_range(1..=5), r.random_range(0..=8)),
            w_max: r.random_range(1..=100),
        }),
    ];
    let traces = [
        TraceConfig::new(r.random_range(0.1..2.0), r.random_range(1.0..40.0)).unwrap(),
        TraceConfig::new(r.random_range(0.1..2.0), r.random_range(1.0..40.0)).unwrap(),
    ];
    let plastic: Vec<Plastic> = (0..r.random_range(0..=n * 2))
        .map(|_| {
            let ri = r.random_range(0..2);
            let ti = r.random_range(0..2);
            let (lo, hi) = rules[ri].bounds();
            Plastic {
                pre: r.random_range(0..n),
                post: r.random_range(0..n),
                rule: rules[ri],
                trace: traces[ti].fixed(),
                delay: r.random_range(0..=6),
                w0: r.random_range(lo..=hi),
                rule_idx: ri,
                trace_idx: ti,
            }
        })
        .collect();
    let steps = r.random_range(1..=500);
    let external = (0..steps)
        .map(|_| (0..n_in).filter(|_| r.random_bool(0.3)).collect())
        .collect();

    let mut b = NetworkBuilder::new();
    for (i, nr) in neurons.iter().enumerate() {
        let pop = if nr.input {
            b.add_input_population(format!("n{i}"), 1).unwrap()
        } else {
            b.add_population(format!("n{i}"), 1, nr.params).unwrap()
        };
        if nr.noise > 0 {
            b.set_noise(pop.id(0), nr.noise).unwrap();
        }
    }
    let rule_ids = rules.map(|rl| b.add_rule(rl).unwrap());
    let trace_ids = traces.map(|t| b.add_trace(t).unwrap());
    for f in &fixed {
        b.connect(NeuronId(f.pre as u32), NeuronId(f.post as u32), f.weight, f.delay).unwrap();
    }
    for p in &plastic {
        b.connect_plastic(
            NeuronId(p.pre as u32),
            NeuronId(p.post as u32),
            rule_ids[p.rule_idx],
            trace_ids[p.trace_idx],
            p.w0,
            p.delay,
        )
        .unwrap();
    }
    let net = b.build().unwrap();
    // Input neurons are built as memoryless threshold-1 units.
    for nr in neurons.iter_mut().filter(|n| n.input) {
        nr.params = CompartmentParams::memoryless(1);
    }
    let seed = r.random();
    (
        Desc {
            neurons,
            fixed,
            plastic,
            external,
            seed,
        },
        net,
    )
}

/// `round(x * retain / 4096)` with ties away from zero, via division.
fn decay(x: i64, d: Decay) -> i64 {
    let retain = 4096 - d.q12() as i128;
    let p = x as i128 * retain;
    let q = if p >= 0 { (2 * p + 4096) / 8192 } else { (2 * p - 4096) / 8192 };
    q as i64
}

fn clamp32(x: i64) -> i64 {
    x.clamp(i32::MIN as i64, i32::MAX as i64)
}

struct Oracle<'d> {
    d: &'d Desc,
    u: Vec<i64>,
    v: Vec<i64>,
    refr: Vec<u32>,
    pending: BTreeMap<u64, Vec<i64>>,
    weights: Vec<i32>,
    traces: Vec<u32>,
    rng: ChaCha8Rng,
}

impl<'d> Oracle<'d> {
    fn new(d: &'d Desc) -> Self {
        let n = d.neurons.len();
        Oracle {
            d,
            u: vec![0; n],
            v: vec![0; n],
            refr: vec![0; n],
            pending: BTreeMap::new(),
            weights: d.plastic.iter().map(|p| p.w0).collect(),
            traces: vec![0; d.plastic.len()],
            rng: ChaCha8Rng::seed_from_u64(d.seed),
        }
    }

    fn step(&mut self, t: u64, external: &[usize]) -> Vec<usize> {
        let n = self.d.neurons.len();
        let mut input = self.pending.remove(&t).unwrap_or_else(|| vec![0; n]);
        for (i, nr) in self.d.neurons.iter().enumerate() {
            if nr.noise > 0 {
                input[i] += self.rng.random_range(-nr.noise..=nr.noise) as i64;
            }
        }
        let mut spiked = vec![false; n];
        for (i, nr) in self.d.neurons.iter().enumerate() {
            let p = nr.params;
            self.u[i] = clamp32(decay(self.u[i], p.current_decay) + input[i] + p.bias as i64);
            let forced = external.contains(&i);
            let fire = if self.refr[i] > 0 {
                self.refr[i] -= 1;
                self.v[i] = 0;
                forced
            } else {
                self.v[i] = clamp32(decay(self.v[i], p.voltage_decay) + self.u[i]);
                forced || self.v[i] >= p.threshold as i64
            };
            if fire {
                self.v[i] = 0;
                self.refr[i] = p.refractory_period;
                spiked[i] = true;
            }
        }
        for (k, p) in self.d.plastic.iter().enumerate() {
            let decayed = (self.traces[k] as u128 * p.trace.multiplier as u128 * 2 + 4096) / 8192;
            let next = decayed + if spiked[p.pre] { p.trace.impulse as u128 } else { 0 };
            self.traces[k] = next.min(u32::MAX as u128) as u32;
        }
        for (k, p) in self.d.plastic.iter().enumerate() {
            if spiked[p.post] {
                self.weights[k] = p.rule.apply(self.traces[k], self.weights[k]);
            }
        }
        for f in &self.d.fixed {
            if spiked[f.pre] {
                self.pending.entry(t + 1 + f.delay as u64).or_insert_with(|| vec![0; n])[f.post] += f.weight as i64;
            }
        }
        for (k, p) in self.d.plastic.iter().enumerate() {
            if spiked[p.pre] {
                self.pending.entry(t + 1 + p.delay as u64).or_insert_with(|| vec![0; n])[p.post] +=
                    self.weights[k] as i64;
            }
        }
        (0..n).filter(|&i| spiked[i]).collect()
    }
}

/// Step every random network through both steppers and panic at the first
/// difference in spikes, `u`, `v`, weights or traces. Returns the total
/// spike count so callers can check the comparison was not vacuous.
pub fn check_random_networks(nets: u64) -> usize {
    let mut total_spikes = 0usize;
    for case in 0..nets {
        let (d, net) = random_desc(case);
        let mut sim = Simulator::new(&net, d.seed);
        let mut oracle = Oracle::new(&d);
        for (t, ext) in d.external.iter().enumerate() {
            let ext_ids: Vec<NeuronId> = ext.iter().map(|&i| NeuronId(i as u32)).collect();
            let got: Vec<usize> = sim.step(&ext_ids).unwrap().iter().map(|id| id.index()).collect();
            let want = oracle.step(t as u64, ext);
            assert_eq!(got, want, "net {case} step {t}: spikes");
            total_spikes += got.len();
            for i in 0..d.neurons.len() {
                let id = NeuronId(i as u32);
                assert_eq!(sim.state().current(id) as i64, oracle.u[i], "net {case} step {t}: u[{i}]");
                assert_eq!(sim.state().voltage(id) as i64, oracle.v[i], "net {case} step {t}: v[{i}]");
            }
            assert_eq!(sim.weights(), &oracle.weights[..], "net {case} step {t}: weights");
            for k in 0..d.plastic.len() {
                assert_eq!(sim.trace(PlasticId(k as u32)), oracle.traces[k], "net {case} step {t}: trace {k}");
            }
        }
    }
    total_spikes
}
