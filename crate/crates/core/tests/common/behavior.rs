//! Network-level behavior checks on the default four-group network, shared
//! by the property tests and the acceptance suite. Each returns a
//! description of the first violation it finds.

use std::sync::OnceLock;

use neuropattern::architecture::{build, LayerHandles, PatternNetConfig, Side, WindowMap};
use neuropattern::engine::{NetworkSpec, SimState};
use neuropattern::events::{synthesize, Bar, Jiggle, Shape, SynthPattern};
use neuropattern::experiments::{
    evaluate_seed, experiment_pattern, run_training, Driver, EvalConditions, Protocol, TrainingOutcome,
};

pub struct Trained {
    pub net: NetworkSpec,
    pub h: LayerHandles,
    pub windows: WindowMap,
    pub protocol: Protocol,
    pub outcome: TrainingOutcome,
}

/// The default network trained on the default protocol, built once per
/// test binary.
pub fn trained() -> &'static Trained {
    static CELL: OnceLock<Trained> = OnceLock::new();
    CELL.get_or_init(|| {
        let (net, h, windows) = build(&PatternNetConfig::default()).unwrap();
        let protocol = Protocol::default();
        let outcome = run_training(&net, &h, &protocol, SimState::new(&net, protocol.train_seed)).unwrap();
        Trained { net, h, windows, protocol, outcome }
    })
}

/// Shapes outside the training set: two and three parallel bars, and a box.
pub fn novel_shapes() -> Vec<(&'static str, Shape)> {
    vec![
        ("double-h", Shape::Custom(vec![Bar::h(0, 0, 4), Bar::h(4, 0, 4)])),
        ("double-v", Shape::Custom(vec![Bar::v(0, 0, 4), Bar::v(4, 0, 4)])),
        ("triple-h", Shape::Custom(vec![Bar::h(0, 0, 4), Bar::h(2, 0, 4), Bar::h(4, 0, 4)])),
        ("triple-v", Shape::Custom(vec![Bar::v(0, 0, 4), Bar::v(2, 0, 4), Bar::v(4, 0, 4)])),
        ("box", Shape::Custom(vec![Bar::h(0, 0, 4), Bar::h(4, 0, 4), Bar::v(0, 0, 4), Bar::v(4, 0, 4)])),
    ]
}

/// The training shapes followed by the novel ones.
pub fn shape_pool() -> Vec<Shape> {
    let mut pool: Vec<Shape> = Shape::standard().into_iter().collect();
    pool.extend(novel_shapes().into_iter().map(|(_, s)| s));
    pool
}

/// Present `sequence` (indices into [`shape_pool`]) to a fresh untrained
/// network, `duration` steps each, and check that no step has both the
/// learning and the recognition pathway firing, that each presentation
/// selects at most one group, and that no group is selected twice.
pub fn check_session(sequence: &[usize], duration: usize, seed: u64) -> Result<(), String> {
    let (net, h) = {
        let t = trained();
        (&t.net, &t.h)
    };
    let pool = shape_pool();
    let motor = Protocol::default().motor_steps;
    let mut d = Driver::new(net, h, seed);
    let mut taken = vec![false; h.n_groups];
    for (i, &s) in sequence.iter().enumerate() {
        let input = synthesize(&experiment_pattern(pool[s].clone()), duration, seed ^ (i as u64 + 1) << 20)
            .map_err(|e| e.to_string())?;
        let log = d.present(&input, motor).map_err(|e| e.to_string())?;
        if let Some(t) = (0..log.len()).find(|&t| log.learning[t] > 0 && log.recognition[t] > 0) {
            return Err(format!("presentation {i} ({}): both pathways fire at step {t}", pool[s]));
        }
        let selected = log.selected_groups();
        if selected.len() > 1 {
            return Err(format!("presentation {i} ({}): groups {selected:?} all selected", pool[s]));
        }
        for g in selected {
            if taken[g] {
                return Err(format!("presentation {i} ({}): group {g} selected a second time", pool[s]));
            }
            taken[g] = true;
        }
    }
    Ok(())
}

/// With a static pattern on the input (no dither), every tuple holds, per
/// feature, exactly one active neuron of each ON/OFF pair, 25 in all.
/// Active means fired within the last `recent` steps of the presentation.
pub fn check_on_off(pattern: &SynthPattern, seed: u64) -> Result<(), String> {
    const STEPS: usize = 400;
    const RECENT: usize = 8;
    let t = trained();
    let (net, h) = (&t.net, &t.h);
    let mut p = pattern.clone();
    p.jiggle = Jiggle::NONE;
    let input = synthesize(&p, STEPS, seed).map_err(|e| e.to_string())?;
    let mut last = vec![usize::MAX; net.neuron_count()];
    Driver::new(net, h, seed)
        .present_with(&input, 0, |step, spikes, _| {
            for s in spikes {
                last[s.index()] = step;
            }
        })
        .map_err(|e| e.to_string())?;
    let active = |id: neuropattern::engine::NeuronId| last[id.index()] != usize::MAX && last[id.index()] + RECENT >= STEPS;
    let cells = h.tuple_resolution * h.tuple_resolution;
    for tuple in 0..t.windows.tuples.len() {
        for f in 0..h.n_features {
            let count = (0..cells)
                .filter(|&c| active(h.mapping_id(tuple, f, Side::On, c)) != active(h.mapping_id(tuple, f, Side::Off, c)))
                .count();
            let total = (0..cells)
                .map(|c| active(h.mapping_id(tuple, f, Side::On, c)) as usize + active(h.mapping_id(tuple, f, Side::Off, c)) as usize)
                .sum::<usize>();
            if count != cells || total != cells {
                return Err(format!(
                    "tuple {tuple} feature {f}: {total} active, {count} of {cells} pairs with exactly one"
                ));
            }
        }
    }
    Ok(())
}

/// Output spikes of every group to a novel shape against the weakest
/// learned group's response to its own pattern, on one evaluation seed.
pub fn novelty_margin(shape: &Shape, seed: u64, duration: usize) -> Result<(u64, u64), String> {
    let t = trained();
    let cond = EvalConditions { duration, input_noise_percent: 0.0 };
    let known = evaluate_seed(&t.net, &t.h, &t.outcome, &t.protocol, &t.protocol.patterns, cond, seed)
        .map_err(|e| e.to_string())?;
    let min_learned = known
        .iter()
        .filter_map(|k| {
            let g = t.outcome.labels.iter().position(|&l| l == Some(k.pattern))?;
            Some(k.output_spikes[g])
        })
        .min()
        .ok_or("no pattern was learned")?;
    let novel = evaluate_seed(&t.net, &t.h, &t.outcome, &t.protocol, &[experiment_pattern(shape.clone())], cond, seed)
        .map_err(|e| e.to_string())?;
    let max_novel = novel[0].output_spikes.iter().copied().max().unwrap_or(0);
    Ok((max_novel, min_learned))
}

pub fn check_novelty(shape: &Shape, seed: u64, duration: usize) -> Result<(), String> {
    let (novel, learned) = novelty_margin(shape, seed, duration)?;
    if novel < learned {
        Ok(())
    } else {
        Err(format!("{shape}: a group fires {novel} times, a learned group only {learned} to its own pattern"))
    }
}
