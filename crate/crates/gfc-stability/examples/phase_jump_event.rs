//! Grid phase jump at a 0.9 pu setpoint. A positive jump advances the
//! grid phase: the rotor angle drops instantly and the converter winds up
//! through the accelerating area while catching up. With the current
//! limiter capping the curve, measured-power feedback slips a pole at
//! 40 degrees; virtual-power feedback does not.
//!
//! ```bash
//! cargo run --example phase_jump_event [jump_deg]
//! ```

use gfc_stability::analysis::max_phase_jump;
use gfc_stability::defaults;
use gfc_stability::scenario::{build_signal, Event};
use gfc_stability::simulator::{run, SimConfig};
use gfc_stability::types::FeedbackMode;

fn main() {
    let jump_deg: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("a number"))
        .unwrap_or(40.0);
    let mut gfc = defaults::gfc_params();
    gfc.p_set = 0.9;
    let net = defaults::network_params();

    let signal = build_signal(
        &[Event::PhaseJump {
            t: 1.0,
            delta_theta: jump_deg.to_radians(),
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
        let peak = traj.delta.iter().cloned().fold(f64::MIN, f64::max);
        println!(
            "{:8}: {} (peak rotor angle {:.1} deg)",
            mode.label(),
            traj.verdict,
            peak.to_degrees()
        );
    }

    println!();
    for mode in FeedbackMode::BOTH {
        let stat = max_phase_jump(gfc.p_set, &gfc, &net, defaults::F_NOMINAL_HZ, mode, false)
            .unwrap()
            .value();
        let dynamic =
            max_phase_jump(gfc.p_set, &gfc, &net, defaults::F_NOMINAL_HZ, mode, true).unwrap();
        println!(
            "{:8}: static margin {:.2} deg, simulated margin {}",
            mode.label(),
            stat.to_degrees(),
            match dynamic {
                gfc_stability::Bound::Exact(v) => format!("{:.2} deg", v.to_degrees()),
                gfc_stability::Bound::AtLeast(v) => format!(">= {:.2} deg", v.to_degrees()),
            }
        );
    }
}
