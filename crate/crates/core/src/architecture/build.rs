use super::config::PatternNetConfig;
use super::layout::{
    kernel_weight, pool_block, Arb, LayerHandles, NsmControl, NsmRole, Side, TupleWindow, WindowMap,
};
use crate::engine::{CompartmentParams, Decay, NetworkBuilder, NetworkSpec, NeuronId};
use crate::error::Result;
use crate::plasticity::Rule;

/// Build the complete recognition network.
///
/// Neuron ids are laid out population by population in this order: input,
/// motor, feature, learning, recognition, one pool population per scale
/// group, mapping, arbitration, state-machine control, WTA inhibitor, then
/// the per-group output, state-machine and WTA populations. Only the last
/// three grow with `n_output_groups`.
pub fn build(config: &PatternNetConfig) -> Result<(NetworkSpec, LayerHandles, WindowMap)> {
    config.validate()?;
    let tn = &config.tuning;
    let side = config.input_side;
    let nf = config.n_features;
    let res = config.tuple_resolution;
    let cells = res * res;
    let n_groups = config.n_output_groups;
    let per_group = config.outputs_per_group();
    let n_tuples = per_group;

    let mut b = NetworkBuilder::new();

    let input = b.add_input_population("input", side * side)?;
    let motor = b.add_input_population("motor", 1)?;

    let ft = &tn.feature;
    let feature = b.add_population(
        "feature",
        nf * side * side,
        CompartmentParams::memoryless(ft.threshold)
            .with_decays(ft.current_decay, ft.voltage_decay)
            .with_refractory(ft.refractory),
    )?;
    let learning = b.add_population(
        "learning",
        nf * cells,
        CompartmentParams::memoryless(tn.pathway.pool_threshold).with_bias(tn.pathway.learning_bias),
    )?;
    let recognition = b.add_population("recognition", nf * side * side, CompartmentParams::memoryless(1))?;
    let mut pools = Vec::new();
    for g in &config.scale_groups {
        let n = g.downscale;
        pools.push(b.add_population(
            format!("pool_{n}"),
            nf * n * n,
            CompartmentParams::memoryless(tn.pathway.pool_threshold),
        )?);
    }

    let mt = &tn.mapping;
    let on_params = CompartmentParams::memoryless(mt.on_threshold)
        .with_decays(mt.current_decay, Decay::FULL)
        .with_refractory(mt.refractory);
    let off_params = CompartmentParams::memoryless(mt.off_threshold)
        .with_bias(mt.off_bias)
        .with_decays(mt.current_decay, Decay::FULL)
        .with_refractory(mt.refractory);
    let mapping = b.add_population("mapping", n_tuples * config.mapping_per_tuple(), on_params)?;

    let at = &tn.arbitration;
    let level = CompartmentParams::memoryless(at.threshold).with_decays(at.current_decay, Decay::FULL);
    let arbitration = b.add_population("arbitration", Arb::ALL.len(), level)?;

    let ns = &tn.nsm;
    let link = CompartmentParams::memoryless(ns.link_threshold);
    let nsm_control = b.add_population("nsm_control", NsmControl::ALL.len(), link)?;
    let wt = &tn.wta;
    let wta_inhibitor = b.add_population(
        "wta_inhibitor",
        1,
        CompartmentParams::memoryless(wt.inhibitor_threshold),
    )?;

    let ot = &tn.output;
    let output = b.add_population(
        "output",
        n_groups * per_group,
        CompartmentParams::memoryless(ot.threshold)
            .with_bias(ot.bias)
            .with_decays(ot.current_decay, ot.voltage_decay)
            .with_refractory(ot.refractory),
    )?;
    let nsm = b.add_population("nsm", n_groups * NsmRole::COUNT, link)?;
    let wta = b.add_population(
        "wta",
        n_groups,
        CompartmentParams::memoryless(wt.threshold)
            .with_decays(wt.current_decay, Decay::FULL)
            .with_refractory(wt.refractory),
    )?;

    let h = LayerHandles {
        input_side: side,
        tuple_resolution: res,
        n_features: nf,
        n_groups,
        outputs_per_group: per_group,
        input,
        motor,
        feature,
        learning,
        recognition,
        pools,
        pool_sizes: config.scale_groups.iter().map(|g| g.downscale).collect(),
        mapping,
        arbitration,
        nsm_control,
        wta_inhibitor,
        output,
        nsm,
        wta,
    };

    // Per-neuron parameter overrides.
    for t in 0..n_tuples {
        for f in 0..nf {
            for c in 0..cells {
                b.set_params(h.mapping_id(t, f, Side::Off, c), off_params)?;
            }
        }
    }
    b.set_params(h.arb(Arb::A1), level.with_bias(at.a1_bias))?;
    b.set_params(h.arb(Arb::A5), level.with_bias(at.a5_bias))?;
    b.set_params(
        h.control(NsmControl::QuietTimer),
        CompartmentParams::memoryless(ns.timer_threshold)
            .with_bias(ns.timer_bias)
            .with_decays(Decay::FULL, ns.timer_voltage_decay),
    )?;
    b.set_params(
        h.control(NsmControl::Pool),
        link.with_decays(ns.pool_current_decay, Decay::FULL),
    )?;
    for g in 0..n_groups {
        b.set_params(h.nsm_id(g, NsmRole::Latch), CompartmentParams::memoryless(ns.latch_threshold))?;
        let p = b.params(h.wta_id(g))?;
        b.set_params(h.wta_id(g), p.with_bias(-(g as i32) * wt.tie_stagger))?;
    }

    // L1 -> L2: same-padded convolution with the two bar kernels.
    let half = (config.kernel_size / 2) as isize;
    for f in 0..nf {
        for r in 0..side {
            for c in 0..side {
                let post = h.feature_id(f, r, c);
                let taps: Vec<(usize, usize, isize, isize)> = (-half..=half)
                    .flat_map(|dr| (-half..=half).map(move |dc| (dr, dc)))
                    .filter_map(|(dr, dc)| {
                        let (sr, sc) = (r as isize + dr, c as isize + dc);
                        let inside = sr >= 0 && sc >= 0 && sr < side as isize && sc < side as isize;
                        inside.then_some((sr as usize, sc as usize, dr, dc))
                    })
                    .collect();
                let flank = if ft.balance_flanks {
                    // Excitatory mass over inhibitory taps, both counted inside the grid.
                    let centre = taps
                        .iter()
                        .filter(|t| kernel_weight(f, t.2, t.3, 1, 1) > 0)
                        .count() as i32;
                    let outer = taps.len() as i32 - centre;
                    if outer == 0 {
                        0
                    } else {
                        (2 * centre * ft.kernel_weight + outer) / (2 * outer)
                    }
                } else {
                    ft.flank_weight
                };
                for &(sr, sc, dr, dc) in &taps {
                    let w = kernel_weight(f, dr, dc, ft.kernel_weight, flank);
                    b.connect(h.input_id(sr, sc), post, w, 0)?;
                }
            }
        }
    }

    // L2 -> L3 (both pathways) and A5.
    let a5 = h.arb(Arb::A5);
    for f in 0..nf {
        for r in 0..side {
            for c in 0..side {
                let src = h.feature_id(f, r, c);
                b.connect(src, a5, -at.feature_to_a5, 0)?;
                b.connect(src, h.recognition_id(f, r, c), 1, 0)?;
                let cell = pool_block(r, res, side) * res + pool_block(c, res, side);
                b.connect(src, h.learning_id(f, cell), 1, 0)?;
            }
        }
    }
    let a6 = h.arb(Arb::A6);
    let a3 = h.arb(Arb::A3);
    for f in 0..nf {
        for r in 0..side {
            for c in 0..side {
                b.connect(a6, h.recognition_id(f, r, c), -tn.pathway.recognition_block, 0)?;
            }
        }
        for cell in 0..cells {
            let l = h.learning_id(f, cell);
            b.connect(a6, l, tn.pathway.learning_gate, 0)?;
            b.connect(a3, l, -tn.pathway.learning_block, 0)?;
        }
    }

    // Recognition neurons -> per-scale OR pools.
    for (s, g) in config.scale_groups.iter().enumerate() {
        let n = g.downscale;
        for f in 0..nf {
            for r in 0..side {
                for c in 0..side {
                    let post = h.pool_id(s, f, pool_block(r, n, side), pool_block(c, n, side));
                    b.connect(h.recognition_id(f, r, c), post, 1, 0)?;
                }
            }
        }
    }

    // L3 -> L4: windows of the pooled grids and the shared learning arrays.
    let mut tuples = Vec::with_capacity(n_tuples);
    for (s, g) in config.scale_groups.iter().enumerate() {
        for oy in 0..g.tuple_side {
            for ox in 0..g.tuple_side {
                let t = tuples.len();
                let mut sources = Vec::with_capacity(nf);
                for f in 0..nf {
                    let mut src = Vec::with_capacity(cells);
                    for a in 0..res {
                        for bc in 0..res {
                            let pool = h.pool_id(s, f, oy + a, ox + bc);
                            let cell = a * res + bc;
                            b.connect(pool, h.mapping_id(t, f, Side::On, cell), mt.source_weight, 0)?;
                            b.connect(pool, h.mapping_id(t, f, Side::Off, cell), -mt.source_weight, 0)?;
                            src.push(pool);
                        }
                    }
                    sources.push(src);
                }
                tuples.push(TupleWindow {
                    scale_group: s,
                    downscale: g.downscale,
                    offset: (oy, ox),
                    sources,
                });
            }
        }
    }
    for f in 0..nf {
        for cell in 0..cells {
            let l = h.learning_id(f, cell);
            for t in 0..n_tuples {
                b.connect(l, h.mapping_id(t, f, Side::On, cell), mt.source_weight, 0)?;
                b.connect(l, h.mapping_id(t, f, Side::Off, cell), -mt.source_weight, 0)?;
            }
        }
    }

    // Arbitration.
    let (a1, a2, a4) = (h.arb(Arb::A1), h.arb(Arb::A2), h.arb(Arb::A4));
    let motor_id = h.motor_id();
    b.connect(a2, a1, -at.a2_to_a1, 0)?;
    b.connect(a1, a4, -at.a1_to_a4, 0)?;
    b.connect(a5, a4, at.a5_to_a4, 0)?;
    b.connect(motor_id, a4, at.motor_to_a4, 0)?;
    b.connect(motor_id, a3, at.motor_to_a3, 0)?;
    b.connect(a4, a3, at.a4_to_a3, 0)?;
    b.connect(a6, a4, -at.a6_inhibition, 0)?;
    b.connect(a6, a5, -at.a6_inhibition, 0)?;

    // Shared state-machine control.
    let qt = h.control(NsmControl::QuietTimer);
    let tr = h.control(NsmControl::Trigger);
    let pool = h.control(NsmControl::Pool);
    b.connect(a3, qt, -ns.timer_inhibition, 0)?;
    b.connect(a4, qt, -ns.timer_inhibition, 0)?;
    b.connect(qt, tr, ns.trigger_drive, 0)?;
    b.connect(tr, tr, ns.trigger_drive, 0)?;
    b.connect(a3, tr, -ns.trigger_inhibition, 0)?;
    b.connect(a4, tr, -ns.trigger_inhibition, 0)?;

    let pattern_rule = b.add_rule(Rule::Pattern(tn.pattern_rule.rule))?;
    let pattern_trace = b.add_trace(tn.pattern_rule.trace)?;
    let disable_rule = b.add_rule(Rule::Nsm(ns.disable_rule))?;
    let disable_trace = b.add_trace(ns.disable_trace)?;
    let inhibitor = h.wta_inhibitor_id();

    for g in 0..n_groups {
        // L4 -> L5 plastic synapses, all starting at 0.
        for t in 0..n_tuples {
            let post = h.output_id(g, t);
            for m in h.tuple_mapping(t) {
                b.connect_plastic(NeuronId(m as u32), post, pattern_rule, pattern_trace, 0, 0)?;
            }
        }

        let id = |r| h.nsm_id(g, r);
        let (tap, latch, select) = (id(NsmRole::Tap), id(NsmRole::Latch), id(NsmRole::Select));
        let (relay, stim, suppress, end) = (
            id(NsmRole::Relay),
            id(NsmRole::Stim),
            id(NsmRole::Suppress),
            id(NsmRole::End),
        );
        b.connect(tr, tap, ns.link, g as u32 * ns.tap_stagger)?;
        b.connect_plastic(tap, latch, disable_rule, disable_trace, ns.disable_initial, 0)?;
        b.connect(latch, latch, ns.latch_self, 0)?;
        b.connect(latch, pool, ns.link, 0)?;
        b.connect(pool, latch, -ns.pool_inhibition, 0)?;
        b.connect(latch, select, ns.link, 0)?;
        b.connect(a4, suppress, ns.link, 0)?;
        b.connect(suppress, latch, -ns.suppress_inhibition, 0)?;
        b.connect(suppress, select, -ns.suppress_inhibition, 0)?;
        b.connect(select, a6, at.select_to_a6, 0)?;
        b.connect(select, relay, ns.link, ns.relay_delay)?;
        b.connect(relay, stim, ns.link, ns.stim_delay)?;
        b.connect(select, end, ns.link, ns.end_window)?;
        b.connect(select, end, -ns.veto, 0)?;
        b.connect(end, qt, -ns.end_to_timer, 0)?;
        b.connect(end, tr, -ns.trigger_inhibition, 0)?;
        b.connect(end, pool, ns.link, 0)?;
        b.connect(end, stim, -ns.veto, 0)?;

        // Stimulation, WTA readout and its feedback into arbitration.
        let w = h.wta_id(g);
        for t in 0..n_tuples {
            let o = h.output_id(g, t);
            b.connect(stim, o, ot.stim_weight, 0)?;
            b.connect(o, w, wt.input_weight, 0)?;
        }
        b.connect(w, w, wt.self_weight, 0)?;
        b.connect(w, inhibitor, wt.inhibitor_drive, 0)?;
        b.connect(inhibitor, w, -wt.inhibition, 0)?;
        b.connect(w, a2, at.wta_to_a2, 0)?;
        b.connect(w, a4, at.wta_to_a4, 0)?;
    }

    let net = b.build()?;
    Ok((net, h, WindowMap { tuples }))
}
