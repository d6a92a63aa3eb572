use neuropattern::plasticity::{
    update_trace, NsmRule, PatternRule, Rate, Rule, TraceConfig, MAX_RULE_WEIGHT, TRACE_ONE,
};
use proptest::prelude::*;

fn rate() -> impl Strategy<Value = Rate> {
    (1u32..=1 << 20, 0u32..=40).prop_map(|(m, s)| Rate::new(m, s))
}

fn pattern_rule() -> impl Strategy<Value = PatternRule> {
    (1u32..=2 * TRACE_ONE, rate(), 1..=MAX_RULE_WEIGHT, 1..=MAX_RULE_WEIGHT)
        .prop_map(|(alpha, lambda, hi, lo)| PatternRule { alpha, lambda, w_max: hi, w_min: -lo })
}

fn nsm_rule() -> impl Strategy<Value = NsmRule> {
    (0u32..=2 * TRACE_ONE, rate(), rate(), 1..=MAX_RULE_WEIGHT)
        .prop_map(|(alpha, lambda, gamma, w_max)| NsmRule { alpha, lambda, gamma, w_max })
}

fn rule() -> impl Strategy<Value = Rule> {
    prop_oneof![pattern_rule().prop_map(Rule::Pattern), nsm_rule().prop_map(Rule::Nsm)]
}

proptest! {
    #[test]
    fn pattern_rule_moves_toward_the_rail_the_trace_points_at(r in pattern_rule(), x1 in 0u32..4 * TRACE_ONE, f in 0.0f64..1.0) {
        let w = r.w_min + ((r.w_max - r.w_min) as f64 * f) as i32;
        let d = Rule::Pattern(r).delta(x1, w);
        let inside = r.w_min < w && w < r.w_max;
        if inside && x1 != r.alpha {
            prop_assert_eq!(d.signum(), (x1 as i64 - r.alpha as i64).signum() as i32);
        } else {
            prop_assert!(d.is_zero());
        }
    }

    #[test]
    fn rails_are_fixed_points(r in pattern_rule(), x1 in any::<u32>()) {
        let rule = Rule::Pattern(r);
        prop_assert_eq!(rule.apply(x1, r.w_max), r.w_max);
        prop_assert_eq!(rule.apply(x1, r.w_min), r.w_min);
    }

    #[test]
    fn weights_stay_in_bounds_over_any_sequence(rule in rule(), w0 in any::<i32>(), xs in prop::collection::vec(any::<u32>(), 1..200)) {
        let (lo, hi) = rule.bounds();
        let mut w = w0.clamp(lo, hi);
        for x1 in xs {
            w = rule.apply(x1, w);
            prop_assert!(lo <= w && w <= hi);
        }
    }

    #[test]
    fn pattern_delta_is_linear_in_the_rate(r in pattern_rule(), x1 in 0u32..4 * TRACE_ONE, w in -MAX_RULE_WEIGHT..=MAX_RULE_WEIGHT, k in 1u32..64) {
        let w = w.clamp(r.w_min, r.w_max);
        let base = Rule::Pattern(r).delta(x1, w);
        let scaled = Rule::Pattern(PatternRule { lambda: Rate::new(r.lambda.mantissa * k, r.lambda.shift), ..r }).delta(x1, w);
        prop_assert_eq!(scaled.shift, base.shift);
        prop_assert_eq!(scaled.num, base.num * k as i128);
    }

    #[test]
    fn nsm_delta_falls_as_the_trace_rises(r in nsm_rule(), w in 0..=MAX_RULE_WEIGHT, a in any::<u32>(), b in any::<u32>()) {
        let w = w.min(r.w_max);
        let (lo, hi) = (a.min(b), a.max(b));
        let rule = Rule::Nsm(r);
        let (dl, dh) = (rule.delta(lo, w), rule.delta(hi, w));
        prop_assert_eq!(dl.shift, dh.shift);
        prop_assert!(dh.num <= dl.num);
        prop_assert!(rule.apply(hi, w) <= rule.apply(lo, w));
    }

    #[test]
    fn nsm_weight_never_grows_above_alpha(r in nsm_rule(), w in 0..=MAX_RULE_WEIGHT, x1 in any::<u32>()) {
        let w = w.min(r.w_max);
        if x1 > r.alpha {
            prop_assert!(Rule::Nsm(r).apply(x1, w) <= w);
        }
    }

    #[test]
    fn trace_decays_without_spikes_and_jumps_with_them(x in any::<u32>(), impulse in 0.05f64..8.0, tau in 0.5f64..500.0) {
        let cfg = TraceConfig::new(impulse, tau).unwrap().fixed();
        let quiet = update_trace(x, false, cfg);
        prop_assert!(quiet <= x);
        let loud = update_trace(x, true, cfg);
        prop_assert_eq!(loud, quiet.saturating_add(cfg.impulse));
    }
}
