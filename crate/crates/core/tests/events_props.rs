use neuropattern::events::{
    decode_binary, decode_csv, downsample_bin, downsample_x, downsample_y, encode_binary, encode_csv,
    inject_noise, noise_spike_count, synthesize, BinnedInput, Jiggle, Polarity,
    PolarityFilter, RawEvent, Shape, SynthPattern, GRID_SIDE, SENSOR_HEIGHT, SENSOR_WIDTH, TIMESTEP_US,
};
use proptest::prelude::*;

fn event() -> impl Strategy<Value = RawEvent> {
    (0u32..2_000_000, 0..SENSOR_WIDTH as u16, 0..SENSOR_HEIGHT as u16, any::<bool>()).prop_map(
        |(timestamp_us, x, y, on)| RawEvent {
            timestamp_us,
            x,
            y,
            polarity: if on { Polarity::On } else { Polarity::Off },
        },
    )
}

fn sorted_events() -> impl Strategy<Value = Vec<RawEvent>> {
    prop::collection::vec(event(), 0..300).prop_map(|mut v| {
        v.sort_by_key(|e| e.timestamp_us);
        v
    })
}

fn pattern() -> impl Strategy<Value = SynthPattern> {
    (0usize..4, 0u8..4, 0u8..12, 0u8..12, 0.0f64..=1.0, 0u8..=1, 1u32..20)
        .prop_map(|(s, scale, r, c, rate, amplitude, period)| {
            let max = SynthPattern::max_position(scale);
            let mut p = SynthPattern::new(Shape::standard()[s].clone(), scale, (r.min(max), c.min(max)));
            p.event_rate = rate;
            p.jiggle = Jiggle { amplitude, period };
            p
        })
        .prop_filter("pattern stays on the grid", |p| p.validate().is_ok())
}

proptest! {
    #[test]
    fn csv_round_trip(events in sorted_events()) {
        let back = decode_csv(&encode_csv(&events)).unwrap();
        prop_assert_eq!(back.events, events);
        prop_assert_eq!(back.rejected, 0);
    }

    #[test]
    fn binary_round_trip(events in sorted_events()) {
        let bytes = encode_binary(&events);
        let back = decode_binary(&bytes).unwrap();
        prop_assert_eq!(encode_binary(&back.events), bytes);
        prop_assert_eq!(back.events, events);
    }

    #[test]
    fn binning_ignores_order_within_a_timestamp(events in sorted_events(), seed in any::<u64>()) {
        let mut shuffled = events.clone();
        // Reverse every run of equal timestamps, then rotate by the seed.
        let mut i = 0;
        while i < shuffled.len() {
            let j = (i..shuffled.len()).find(|&j| shuffled[j].timestamp_us != shuffled[i].timestamp_us).unwrap_or(shuffled.len());
            shuffled[i..j].reverse();
            if j - i > 1 {
                let k = (seed as usize) % (j - i);
                shuffled[i..j].rotate_left(k);
            }
            i = j;
        }
        for filter in [PolarityFilter::OnOnly, PolarityFilter::Both] {
            prop_assert_eq!(downsample_bin(&events, filter), downsample_bin(&shuffled, filter));
        }
    }

    #[test]
    fn downsampling_is_monotone(a in 0..SENSOR_WIDTH as u16, b in 0..SENSOR_WIDTH as u16,
                                c in 0..SENSOR_HEIGHT as u16, d in 0..SENSOR_HEIGHT as u16) {
        if a <= b { prop_assert!(downsample_x(a) <= downsample_x(b)); }
        if c <= d { prop_assert!(downsample_y(c) <= downsample_y(d)); }
    }

    #[test]
    fn synthesize_is_pure(p in pattern(), steps in 1usize..200, seed in any::<u64>()) {
        let a = synthesize(&p, steps, seed).unwrap();
        prop_assert_eq!(&a, &synthesize(&p, steps, seed).unwrap());
        prop_assert_eq!(a.duration(), steps);
    }

    #[test]
    fn inject_noise_is_pure_and_adds_exactly(p in pattern(), level in 0.0f64..200.0, seed in any::<u64>()) {
        let base = synthesize(&p, 100, seed).unwrap();
        let a = inject_noise(&base, level, seed ^ 1).unwrap();
        prop_assert_eq!(&a, &inject_noise(&base, level, seed ^ 1).unwrap());
        prop_assert_eq!(a.spike_count(), base.spike_count() + noise_spike_count(base.spike_count(), level));
        for t in 0..base.duration() {
            for &px in base.at(t) {
                prop_assert!(a.contains(t, px));
            }
        }
    }

    #[test]
    fn binned_json_lines_round_trip(p in pattern(), steps in 1usize..100, seed in any::<u64>()) {
        let a = synthesize(&p, steps, seed).unwrap();
        prop_assert_eq!(BinnedInput::from_json_lines(&a.to_json_lines(), Some(steps)).unwrap(), a);
    }
}

#[test]
fn downsampling_is_surjective_onto_the_grid() {
    let cols: std::collections::BTreeSet<_> = (0..SENSOR_WIDTH as u16).map(downsample_x).collect();
    let rows: std::collections::BTreeSet<_> = (0..SENSOR_HEIGHT as u16).map(downsample_y).collect();
    assert_eq!(cols, (0..GRID_SIDE).collect());
    assert_eq!(rows, (0..GRID_SIDE).collect());
}

#[test]
fn timesteps_are_quarter_milliseconds() {
    assert_eq!(TIMESTEP_US, 250);
}
