//! Frequency ramp from 50 Hz to 48 Hz at 1 Hz/s with a 0.8 pu setpoint:
//! measured-power feedback loses synchronism once the limiter caps the
//! deliverable power below setpoint + deceleration power, while
//! virtual-power feedback rides the ramp through.
//!
//! ```bash
//! cargo run --example rocof_event
//! ```

use gfc_stability::analysis::deceleration_power;
use gfc_stability::defaults;
use gfc_stability::scenario::{build_signal, Event};
use gfc_stability::simulator::{run, SimConfig, Verdict};
use gfc_stability::types::FeedbackMode;

fn main() {
    let mut gfc = defaults::gfc_params();
    gfc.p_set = 0.8;
    let net = defaults::network_params();

    let p_dec = deceleration_power(gfc.h_inertia, defaults::F_NOMINAL_HZ, 1.0);
    println!(
        "ramp demands {:.2} + {:.2} = {:.2} pu of feedback power during the ramp\n",
        gfc.p_set,
        p_dec,
        gfc.p_set + p_dec
    );

    let signal = build_signal(
        &[Event::RocofRamp {
            t_start: 1.0,
            rate_hz_per_s: -1.0,
            f_end_hz: 48.0,
        }],
        defaults::F_NOMINAL_HZ,
        net.vg_nominal,
    )
    .unwrap();

    for mode in FeedbackMode::BOTH {
        let mut g = gfc;
        g.feedback_mode = mode;
        let mut sim = SimConfig::new(mode);
        sim.t_end = 10.0;
        let traj = run(&signal, &g, &net, &sim).unwrap();
        match traj.verdict {
            Verdict::Stable => {
                // feedback power mid-ramp carries the deceleration share
                let i = traj.t.iter().position(|&t| t >= 2.8).unwrap();
                println!(
                    "{:8}: stable; mid-ramp p_virt = {:.3} pu, p_pcc = {:.3} pu, kc_lim = {:.3}",
                    mode.label(),
                    traj.p_virt[i],
                    traj.p_pcc[i],
                    traj.kc_lim[i]
                );
            }
            Verdict::LossOfSync { t_los } => {
                println!(
                    "{:8}: loss of synchronism at t = {t_los:.2} s",
                    mode.label()
                );
            }
        }
    }
}
