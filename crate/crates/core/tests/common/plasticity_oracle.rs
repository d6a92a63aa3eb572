//! Oracle for the learning rules and trace dynamics, in exact rational
//! arithmetic straight from the real-valued formulas.

use neuropattern::engine::{NetworkBuilder, PlasticId, Simulator};
use neuropattern::plasticity::{
    update_trace, FixedTrace, NsmRule, PatternRule, Rate, Rule, TraceConfig, MAX_RULE_WEIGHT, TRACE_ONE,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rate(r: Rate) -> BigRational {
    BigRational::new(BigInt::from(r.mantissa), BigInt::from(1u128) << r.shift)
}

fn trace(x1: u32) -> BigRational {
    BigRational::new(BigInt::from(x1), BigInt::from(TRACE_ONE))
}

/// `(x1 - alpha)(w_max - w)(w - w_min) * lambda` for the pattern rule,
/// `(alpha - x1)(w_max - w) * lambda - x1 * gamma` for the disabling rule.
pub fn exact_delta(rule: &Rule, x1: u32, w: i32) -> BigRational {
    match rule {
        Rule::Pattern(r) => {
            (trace(x1) - trace(r.alpha))
                * q((r.w_max - w) as i128)
                * q((w - r.w_min) as i128)
                * rate(r.lambda)
        }
        Rule::Nsm(r) => {
            (trace(r.alpha) - trace(x1)) * q((r.w_max - w) as i128) * rate(r.lambda)
                - trace(x1) * rate(r.gamma)
        }
    }
}

/// Round toward zero, but move at least one unit when the exact change is
/// nonzero, then clamp to the rule's bounds.
pub fn expected_weight(rule: &Rule, x1: u32, w: i32) -> i32 {
    let dw = exact_delta(rule, x1, w);
    let mut step = dw.trunc().to_integer();
    if step.is_zero() && !dw.is_zero() {
        step = if dw.is_positive() { BigInt::from(1) } else { BigInt::from(-1) };
    }
    let (lo, hi) = rule.bounds();
    let next = BigInt::from(w) + step;
    next.clamp(BigInt::from(lo), BigInt::from(hi)).to_i32().unwrap()
}

/// `floor(x1 * multiplier / 4096 + 1/2)` plus the impulse on a spike,
/// saturating at `u32::MAX`.
pub fn expected_trace(x1: u32, spiked: bool, cfg: FixedTrace) -> u32 {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let decayed = (trace(x1) * q(cfg.multiplier as i128) + half).floor().to_integer();
    let next = decayed + if spiked { BigInt::from(cfg.impulse) } else { BigInt::zero() };
    next.min(BigInt::from(u32::MAX)).to_u32().unwrap()
}

/// One simulator step of a two-neuron net whose only synapse is plastic:
/// the postsynaptic neuron is forced to spike, the presynaptic one when
/// `pre_spikes`. Returns the weight after the step.
fn integrated(rule: Rule, trace_cfg: TraceConfig, x1: u32, w: i32, pre_spikes: bool) -> i32 {
    let mut b = NetworkBuilder::new();
    let pop = b.add_input_population("io", 2).unwrap();
    let rid = b.add_rule(rule).unwrap();
    let tid = b.add_trace(trace_cfg).unwrap();
    b.connect_plastic(pop.id(0), pop.id(1), rid, tid, 0, 0).unwrap();
    let net = b.build().unwrap();
    let mut sim = Simulator::new(&net, 0);
    sim.set_weight(PlasticId(0), w).unwrap();
    sim.set_trace(PlasticId(0), x1).unwrap();
    let ext: Vec<_> = if pre_spikes { vec![pop.id(0), pop.id(1)] } else { vec![pop.id(1)] };
    sim.step(&ext).unwrap();
    sim.weight(PlasticId(0))
}

fn random_rate(r: &mut ChaCha8Rng) -> Rate {
    let mantissa = if r.random_bool(0.5) { r.random_range(1..=16) } else { r.random_range(1..=u32::MAX) };
    Rate::new(mantissa, r.random_range(0..=48))
}

fn random_trace(r: &mut ChaCha8Rng) -> u32 {
    match r.random_range(0..4) {
        0 => r.random_range(0..=TRACE_ONE),
        1 => r.random_range(0..=4 * TRACE_ONE),
        2 => r.random(),
        _ => [0, TRACE_ONE / 2, TRACE_ONE, u32::MAX][r.random_range(0..4)],
    }
}

fn random_rule(r: &mut ChaCha8Rng) -> Rule {
    let small = r.random_bool(0.5);
    let mag = |r: &mut ChaCha8Rng| if small { r.random_range(1..=128) } else { r.random_range(1..=MAX_RULE_WEIGHT) };
    if r.random_bool(0.5) {
        Rule::Pattern(PatternRule {
            alpha: r.random_range(1..=2 * TRACE_ONE),
            lambda: random_rate(r),
            w_max: mag(r),
            w_min: -mag(r),
        })
    } else {
        Rule::Nsm(NsmRule {
            alpha: r.random_range(0..=2 * TRACE_ONE),
            lambda: random_rate(r),
            gamma: random_rate(r),
            w_max: mag(r),
        })
    }
}

/// Compare `draws` random rule applications and trace updates against the
/// exact formulas, both standalone and integrated in a simulator step, and
/// check the sign structure and fixed points of the pattern rule and the
/// monotone disabling of the NSM rule on each draw. Returns the number of
/// failing draws, with the first few described.
pub fn check_draws(draws: usize, seed: u64) -> (usize, Vec<String>) {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    let mut notes = Vec::new();
    for i in 0..draws {
        let rule = random_rule(&mut r);
        let (lo, hi) = rule.bounds();
        let w = r.random_range(lo..=hi);
        let x1 = random_trace(&mut r);
        let got = rule.apply(x1, w);
        let want = expected_weight(&rule, x1, w);
        let d = rule.delta(x1, w);
        let exact = BigRational::new(BigInt::from(d.num), BigInt::from(1u128) << d.shift);
        let tcfg = TraceConfig::new(r.random_range(0.05..4.0), r.random_range(0.5..200.0)).unwrap();
        let cfg = tcfg.fixed();
        let spiked = r.random_bool(0.5);
        let tx = random_trace(&mut r);
        let (tg, tw) = (update_trace(tx, spiked, cfg), expected_trace(tx, spiked, cfg));
        let (ig, iw) = (integrated(rule, tcfg, tx, w, spiked), expected_weight(&rule, tw, w));
        let structure_ok = match rule {
            Rule::Pattern(pr) => {
                let inside = pr.w_min < w && w < pr.w_max;
                let sign_ok = !inside || x1 == pr.alpha || d.signum() == (x1 as i64 - pr.alpha as i64).signum() as i32;
                let zero_ok = d.is_zero() == (w == pr.w_min || w == pr.w_max || x1 == pr.alpha);
                sign_ok && zero_ok
            }
            Rule::Nsm(nr) => x1 <= nr.alpha || d.signum() < 0,
        };
        if got != want || exact != exact_delta(&rule, x1, w) || tg != tw || ig != iw || !structure_ok {
            bad += 1;
            if notes.len() < 5 {
                notes.push(format!(
                    "draw {i}: {rule:?} x1={x1} w={w}: weight {got} vs {want}; trace {tg} vs {tw}; in simulator {ig} vs {iw}"
                ));
            }
        }
    }
    (bad, notes)
}
